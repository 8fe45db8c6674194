use thiserror::Error;

use super::assignment::{Lit, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("facts are asserted directly, not translated")]
    Fact,
    #[error("a rule with a head needs a body atom")]
    MissingBody,
}

/// Nogoods of one ground rule over solver variables. `beta` is the body
/// atom and must be given exactly when the rule has a head.
pub fn rule_to_nogoods(
    head: Option<Var>,
    positive: &[Var],
    negative: &[Var],
    beta: Option<Var>,
) -> Result<Vec<Vec<Lit>>, TranslateError> {
    let body = positive
        .iter()
        .map(|&b| Lit::pos(b))
        .chain(negative.iter().map(|&c| Lit::neg(c)));
    let Some(h) = head else {
        return Ok(vec![body.collect()]);
    };
    if positive.is_empty() && negative.is_empty() {
        return Err(TranslateError::Fact);
    }
    let beta = beta.ok_or(TranslateError::MissingBody)?;
    let mut out = Vec::with_capacity(2 + positive.len() + negative.len());
    out.push(std::iter::once(Lit::neg(beta)).chain(body).collect());
    out.push(vec![Lit::pos(beta), Lit::neg(h)]);
    out.extend(positive.iter().map(|&b| vec![Lit::pos(beta), Lit::neg(b)]));
    out.extend(negative.iter().map(|&c| vec![Lit::pos(beta), Lit::pos(c)]));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_with_negation() {
        let (h, b, c, beta) = (Var(0), Var(1), Var(2), Var(3));
        let got = rule_to_nogoods(Some(h), &[b], &[c], Some(beta)).unwrap();
        assert_eq!(
            got,
            vec![
                vec![Lit::neg(beta), Lit::pos(b), Lit::neg(c)],
                vec![Lit::pos(beta), Lit::neg(h)],
                vec![Lit::pos(beta), Lit::neg(b)],
                vec![Lit::pos(beta), Lit::pos(c)],
            ]
        );
    }

    #[test]
    fn constraint_is_one_nogood() {
        assert_eq!(
            rule_to_nogoods(None, &[Var(4)], &[], None).unwrap(),
            vec![vec![Lit::pos(Var(4))]]
        );
    }

    #[test]
    fn fact_is_rejected() {
        assert_eq!(
            rule_to_nogoods(Some(Var(0)), &[], &[], Some(Var(1))),
            Err(TranslateError::Fact)
        );
    }
}
