use std::collections::BTreeSet;

use thiserror::Error;

use super::transform::{check_safety, desugar_choice, ChoiceRule, Safety};
use super::{Atom, Constant, Program, Rule, Term, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: unsupported feature: {feature}")]
    Unsupported {
        line: usize,
        column: usize,
        feature: String,
    },
    #[error("unsafe rules: {}", format_unsafe(.0))]
    Unsafe(Vec<UnsafeRule>),
}

/// One rule rejected by the safety check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnsafeRule {
    pub line: usize,
    pub rule: String,
    pub variables: Vec<String>,
}

fn format_unsafe(rules: &[UnsafeRule]) -> String {
    rules
        .iter()
        .map(|u| format!("line {}: `{}` ({})", u.line, u.rule, u.variables.join(", ")))
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Int(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Dot,
    If,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, message: String| ParseError::Syntax {
        line,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token {
                tok,
                line: tl,
                column: tc,
            });
            i += 1;
            col += 1;
            continue;
        }
        if c == ':' {
            if chars.get(i + 1) == Some(&'-') {
                out.push(Token {
                    tok: Tok::If,
                    line: tl,
                    column: tc,
                });
                i += 2;
                col += 2;
                continue;
            }
            return Err(err(tl, tc, "expected `:-`".into()));
        }
        if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            let v = s
                .parse::<i64>()
                .map_err(|_| err(tl, tc, format!("integer out of range: {s}")))?;
            out.push(Token {
                tok: Tok::Int(v),
                line: tl,
                column: tc,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = if c == '_' {
                return Err(err(
                    tl,
                    tc,
                    format!("identifiers starting with `_` are reserved: {s}"),
                ));
            } else if c.is_uppercase() {
                Tok::Var(s)
            } else {
                Tok::Ident(s)
            };
            out.push(Token {
                tok,
                line: tl,
                column: tc,
            });
            continue;
        }
        return Err(err(tl, tc, format!("unexpected character `{c}`")));
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn unsupported<T>(&self, feature: &str) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError::Unsupported {
            line: t.line,
            column: t.column,
            feature: feature.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => {
                self.next();
                if self.peek().tok == Tok::LParen {
                    return self.unsupported("function symbols");
                }
                Ok(Term::Const(Constant::sym(&s)))
            }
            Tok::Var(s) => {
                self.next();
                Ok(Term::Var(Variable::new(&s)))
            }
            Tok::Int(v) => {
                self.next();
                Ok(Term::Const(Constant::Int(v)))
            }
            _ => self.error("expected a term"),
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let name = match self.peek().tok.clone() {
            Tok::Ident(s) if s != "not" => s,
            Tok::Ident(_) => return self.error("`not` is a keyword, expected an atom"),
            Tok::Var(_) => return self.error("predicate names must start with a lowercase letter"),
            _ => return self.error("expected an atom"),
        };
        self.next();
        let mut args = Vec::new();
        if self.peek().tok == Tok::LParen {
            self.next();
            args.push(self.term()?);
            while self.peek().tok == Tok::Comma {
                self.next();
                args.push(self.term()?);
            }
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok(Atom::new(&name, args))
    }

    fn literal(&mut self) -> Result<(Atom, bool), ParseError> {
        if let Tok::Ident(s) = &self.peek().tok {
            if s == "not" {
                self.next();
                return Ok((self.atom()?, true));
            }
        }
        Ok((self.atom()?, false))
    }

    /// Parses `:- l1, ..., ln` if present.
    fn body(&mut self) -> Result<(Vec<Atom>, Vec<Atom>), ParseError> {
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        if self.peek().tok != Tok::If {
            return Ok((pos, neg));
        }
        self.next();
        loop {
            let (a, negated) = self.literal()?;
            if negated {
                neg.push(a);
            } else {
                pos.push(a);
            }
            if self.peek().tok == Tok::Comma {
                self.next();
            } else {
                break;
            }
        }
        Ok((pos, neg))
    }

    fn choice(&mut self, lower: Option<i64>) -> Result<Vec<Rule>, ParseError> {
        let (line, column) = (self.peek().line, self.peek().column);
        self.expect(Tok::LBrace, "`{`")?;
        let mut elements = Vec::new();
        if self.peek().tok != Tok::RBrace {
            elements.push(self.atom()?);
            while matches!(self.peek().tok, Tok::Semi | Tok::Comma) {
                self.next();
                elements.push(self.atom()?);
            }
        }
        self.expect(Tok::RBrace, "`}`")?;
        let upper = if let Tok::Int(v) = self.peek().tok {
            self.next();
            Some(v)
        } else {
            None
        };
        let (positive, negative) = self.body()?;
        self.expect(Tok::Dot, "`.`")?;
        let choice = ChoiceRule {
            elements,
            lower,
            upper,
            positive,
            negative,
        };
        desugar_choice(&choice)
            .map(|rs| rs.to_vec())
            .map_err(|e| ParseError::Unsupported {
                line,
                column,
                feature: e.to_string(),
            })
    }

    fn statement(&mut self) -> Result<Vec<Rule>, ParseError> {
        match self.peek().tok {
            Tok::LBrace => self.choice(None),
            Tok::Int(v) => {
                self.next();
                if self.peek().tok == Tok::LBrace {
                    self.choice(Some(v))
                } else {
                    self.error("expected a rule")
                }
            }
            Tok::If => {
                let (pos, neg) = self.body()?;
                self.expect(Tok::Dot, "`.`")?;
                Ok(vec![Rule::constraint(pos, neg)])
            }
            Tok::Ident(_) => {
                let head = self.atom()?;
                if self.peek().tok == Tok::Semi {
                    return self.unsupported("disjunctive heads");
                }
                let (pos, neg) = self.body()?;
                self.expect(Tok::Dot, "`.`")?;
                Ok(vec![Rule::new(Some(head), pos, neg)])
            }
            _ => self.error("expected a rule"),
        }
    }
}

/// Parses program text. Choice rules are desugared; every rule is checked
/// for safety and all unsafe rules are reported together.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let mut rules = Vec::new();
    let mut unsafe_rules = Vec::new();
    while p.peek().tok != Tok::Eof {
        let line = p.peek().line;
        for rule in p.statement()? {
            if let Safety::Violation(vars) = check_safety(&rule) {
                unsafe_rules.push(UnsafeRule {
                    line,
                    rule: rule.to_string(),
                    variables: vars.iter().map(|v| v.to_string()).collect(),
                });
            }
            rules.push(rule);
        }
    }
    if !unsafe_rules.is_empty() {
        return Err(ParseError::Unsafe(unsafe_rules));
    }
    Ok(Program::new(rules))
}

/// Parses a single atom such as `p(1,a)`; used for reading answer sets.
pub fn parse_atom(text: &str) -> Result<Atom, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let a = p.atom()?;
    if p.peek().tok != Tok::Eof {
        return p.error("trailing input after atom");
    }
    Ok(a)
}

/// Parses a line such as `{a, p(1,2)}` as printed for answer sets.
pub fn parse_atom_set(text: &str) -> Result<BTreeSet<Atom>, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    p.expect(Tok::LBrace, "`{`")?;
    let mut out = BTreeSet::new();
    if p.peek().tok != Tok::RBrace {
        loop {
            out.insert(p.atom()?);
            if p.peek().tok != Tok::Comma {
                break;
            }
            p.next();
        }
    }
    p.expect(Tok::RBrace, "`}`")?;
    if p.peek().tok != Tok::Eof {
        return p.error("trailing input after atom set");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_set_round_trip() {
        let set = parse_atom_set("{a, p(1,b)}").unwrap();
        assert_eq!(crate::program::format_atom_set(&set), "{a, p(1,b)}");
        assert!(parse_atom_set("{}").unwrap().is_empty());
        assert!(parse_atom_set("{a,}").is_err());
    }

    fn atom(name: &str, args: Vec<Term>) -> Atom {
        Atom::new(name, args)
    }

    #[test]
    fn parses_fact() {
        let p = parse_program("q(1).").unwrap();
        assert_eq!(p.rules, vec![Rule::fact(atom("q", vec![Term::int(1)]))]);
        assert!(p.rules[0].is_fact());
    }

    #[test]
    fn parses_rule_with_negation() {
        let p = parse_program("p(X) :- q(X), not r(X).").unwrap();
        let x = || vec![Term::var("X")];
        assert_eq!(
            p.rules,
            vec![Rule::new(
                Some(atom("p", x())),
                vec![atom("q", x())],
                vec![atom("r", x())]
            )]
        );
    }

    #[test]
    fn parses_constraint() {
        let p = parse_program(":- p(X), q(Y).").unwrap();
        assert_eq!(p.rules.len(), 1);
        assert!(p.rules[0].is_constraint());
        assert_eq!(p.rules[0].positive.len(), 2);
    }

    #[test]
    fn comments_and_symbols() {
        let p = parse_program("% header\nedge(a, b). % trailing\nnode(-3).\n").unwrap();
        assert_eq!(p.rules.len(), 2);
        assert_eq!(p.rules[1].head.as_ref().unwrap().args, vec![Term::int(-3)]);
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_program("a.\nb :- c\n").unwrap_err();
        match err {
            ParseError::Syntax { line, column, .. } => {
                assert_eq!((line, column), (3, 1));
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_program("p(X :- q.").unwrap_err();
        assert!(matches!(
            err,
            ParseError::Syntax {
                line: 1,
                column: 5,
                ..
            }
        ));
    }

    #[test]
    fn reserved_prefix_rejected() {
        assert!(matches!(
            parse_program("_not_a."),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn unsafe_rules_reported_each() {
        let err = parse_program("p(X) :- q(Y).\nok(X) :- q(X).\n:- not r(Z).").unwrap_err();
        match err {
            ParseError::Unsafe(rules) => {
                assert_eq!(rules.len(), 2);
                assert_eq!(rules[0].line, 1);
                assert_eq!(rules[0].variables, vec!["X".to_string()]);
                assert_eq!(rules[1].line, 3);
                assert_eq!(rules[1].variables, vec!["Z".to_string()]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn choice_rules_desugar() {
        let p = parse_program("{col(X,C)} :- node(X), colour(C).").unwrap();
        assert_eq!(p.rules.len(), 2);
        assert_eq!(
            p.rules[0].to_string(),
            "col(X,C) :- node(X), colour(C), not _not_col(X,C)."
        );
        assert_eq!(
            p.rules[1].to_string(),
            "_not_col(X,C) :- node(X), colour(C), not col(X,C)."
        );
        let p = parse_program("{a}.").unwrap();
        assert_eq!(p.rules[0].to_string(), "a :- not _not_a.");
        assert_eq!(p.rules[1].to_string(), "_not_a :- not a.");
    }

    #[test]
    fn unsupported_choice_forms() {
        for src in ["{a; b}.", "1 {a}.", "{a} 1.", "{}."] {
            assert!(
                matches!(parse_program(src), Err(ParseError::Unsupported { .. })),
                "{src}"
            );
        }
    }

    #[test]
    fn disjunction_unsupported() {
        assert!(matches!(
            parse_program("a; b."),
            Err(ParseError::Unsupported { .. })
        ));
    }

    #[test]
    fn single_atom() {
        assert_eq!(
            parse_atom("p(1,x)").unwrap(),
            atom("p", vec![Term::int(1), Term::sym("x")])
        );
        assert!(parse_atom("p(1) q").is_err());
    }
}
