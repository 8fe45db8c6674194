use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use lazyasp::bench::{
    default_grid, run_benchmark, summarize_medians, write_records_csv, write_summary_csv,
    GraphColouringClass, HouseClass, ProblemClass, RunOptions,
};
use lazyasp::grounding::StrategyConfig;
use lazyasp::oracle::{full_ground, GroundOptions, Interpretation, DEFAULT_CAP};
use lazyasp::program::{format_atom_set, parse_atom_set, parse_program, Program};
use lazyasp::solving::{solve, SolveMode, SolveOptions, SolveStatus};

const EXIT_SAT: u8 = 10;
const EXIT_UNSAT: u8 = 20;
const EXIT_TIMEOUT: u8 = 30;
const EXIT_ERROR: u8 = 1;

#[derive(Parser, Debug)]
#[command(name = "lazyasp", version, about = "Lazy-grounding answer set solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one program given as one or more files.
    Solve(SolveArgs),
    /// Write benchmark instance files.
    Gen(GenArgs),
    /// Run the benchmark matrix and write result CSVs.
    Bench(BenchArgs),
    /// Check candidate answer sets, one `{...}` per line, against a program.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// `default`, `k:<co>,<ru>` (bounds may be `inf`), optional `+acc`, or `upfront`.
    #[arg(long, default_value = "default")]
    strategy: String,
    /// Answer sets to compute; 0 means all.
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Instantiation cap for `upfront`.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(subcommand)]
    problem: GenProblem,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[arg(long, default_value_t = 11, global = true)]
    replicas: u32,
    /// Output directory.
    #[arg(long, default_value = ".", global = true)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum GenProblem {
    /// Random graphs with `E` edges on `V` nodes and `C` colours.
    GraphColouring {
        #[arg(long)]
        v: u32,
        #[arg(long)]
        e: u32,
        #[arg(long)]
        c: u32,
    },
    /// House reconfiguration instances with `T` things.
    House {
        #[arg(long)]
        t: u32,
    },
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Strategies to compare; repeat the flag for several.
    #[arg(long, default_values_t = ["k:0,0".to_string(), "k:inf,0".to_string()])]
    strategy: Vec<String>,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 11)]
    replicas: u32,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
    /// Restrict to graph colouring classes with at most this many nodes and
    /// house classes with at most this many things.
    #[arg(long)]
    max_size: Option<u32>,
    /// Output directory for `results.csv` and `summary.csv`.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    program: PathBuf,
    answers: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
}

fn parse_mode(s: &str, cap: u64) -> Result<SolveMode> {
    if s == "upfront" {
        return Ok(SolveMode::Upfront { cap });
    }
    let config: StrategyConfig = s.parse().with_context(|| format!("bad strategy `{s}`"))?;
    Ok(SolveMode::Lazy(config))
}

fn parse_timeout(secs: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(secs).with_context(|| format!("bad timeout `{secs}`"))
}

fn read_program(files: &[PathBuf]) -> Result<Program> {
    let mut program = Program::default();
    for f in files {
        let text = fs::read_to_string(f).with_context(|| format!("cannot read {}", f.display()))?;
        program.extend(parse_program(&text).with_context(|| format!("in {}", f.display()))?);
    }
    Ok(program)
}

fn run_solve(args: &SolveArgs) -> Result<u8> {
    let mode = parse_mode(&args.strategy, args.cap)?;
    let program = read_program(&args.files)?;
    let mut opts = if args.n == 0 {
        SolveOptions::all()
    } else {
        SolveOptions::first(args.n)
    };
    if let Some(t) = args.timeout {
        opts = opts.with_timeout(parse_timeout(t)?);
    }
    let out = solve(&program, mode, &opts)?;
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    for set in &out.answer_sets {
        writeln!(w, "{}", format_atom_set(set))?;
    }
    let s = out.stats;
    writeln!(
        w,
        "STATS strategy={mode} answersets={} guesses={} conflicts={} rules={} status={} time_s={:.6}",
        s.answer_sets,
        s.guesses,
        s.conflicts,
        s.rules,
        match out.status {
            SolveStatus::Exhausted => "exhausted",
            SolveStatus::LimitReached => "limit",
            SolveStatus::Timeout => "timeout",
        },
        s.time_s
    )?;
    Ok(if !out.answer_sets.is_empty() {
        EXIT_SAT
    } else if out.status == SolveStatus::Timeout {
        EXIT_TIMEOUT
    } else {
        EXIT_UNSAT
    })
}

fn write_instances(cls: &ProblemClass, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    for i in 0..u64::from(cls.replicas()) {
        let path = dir.join(format!("{}_{}_{i:02}.lp", cls.problem(), cls.id()));
        let program = cls.instance(i)?;
        fs::write(&path, program.to_string())
            .with_context(|| format!("cannot write {}", path.display()))?;
        log::info!("wrote {}", path.display());
    }
    Ok(())
}

fn run_gen(args: &GenArgs) -> Result<u8> {
    let cls = match args.problem {
        GenProblem::GraphColouring { v, e, c } => {
            ProblemClass::GraphColouring(GraphColouringClass {
                v,
                e,
                c,
                seed: args.seed,
                replicas: args.replicas,
            })
        }
        GenProblem::House { t } => ProblemClass::House(HouseClass {
            t,
            seed: args.seed,
            replicas: args.replicas,
        }),
    };
    match cls {
        ProblemClass::GraphColouring(c) => c.validate()?,
        ProblemClass::House(c) => c.validate()?,
    }
    write_instances(&cls, &args.out)?;
    Ok(0)
}

fn run_bench(args: &BenchArgs) -> Result<u8> {
    let strategies = args
        .strategy
        .iter()
        .map(|s| parse_mode(s, args.cap))
        .collect::<Result<Vec<_>>>()?;
    let timeout = parse_timeout(args.timeout)?;
    if timeout.is_zero() {
        bail!("timeout must be positive");
    }
    if args.replicas.is_multiple_of(2) {
        bail!("replica count must be odd");
    }
    let classes: Vec<ProblemClass> = default_grid(args.seed, args.replicas)
        .into_iter()
        .filter(|c| match (args.max_size, c) {
            (None, _) => true,
            (Some(m), ProblemClass::GraphColouring(g)) => g.v <= m,
            (Some(m), ProblemClass::House(h)) => h.t <= m,
        })
        .collect();
    let opts = RunOptions {
        n: args.n,
        timeout,
        jobs: args.jobs,
    };
    let records = run_benchmark(&classes, &strategies, &opts);
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    let results = args.out.join("results.csv");
    write_records_csv(fs::File::create(&results)?, &records)?;
    let summary = args.out.join("summary.csv");
    write_summary_csv(fs::File::create(&summary)?, &summarize_medians(&records))?;
    let failed = records.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        log::warn!("{failed} runs failed; see the log above");
    }
    println!(
        "{} runs written to {} and {}",
        records.len(),
        results.display(),
        summary.display()
    );
    Ok(0)
}

fn run_verify(args: &VerifyArgs) -> Result<u8> {
    let program = read_program(std::slice::from_ref(&args.program))?;
    let gp = full_ground(
        &program,
        GroundOptions {
            cap: args.cap,
            drop_inactive: false,
        },
    )?;
    let text = fs::read_to_string(&args.answers)
        .with_context(|| format!("cannot read {}", args.answers.display()))?;
    let mut all_ok = true;
    let mut checked = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if !line.starts_with('{') {
            continue;
        }
        let set = parse_atom_set(line).with_context(|| format!("line {}", lineno + 1))?;
        let i = Interpretation::with_complements(set, &gp);
        let ok = lazyasp::oracle::is_answer_set(&gp, &i);
        checked += 1;
        println!("{} {}", if ok { "OK" } else { "INVALID" }, line);
        all_ok &= ok;
    }
    if checked == 0 {
        bail!("no answer sets found in {}", args.answers.display());
    }
    Ok(if all_ok { 0 } else { 1 })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Gen(a) => run_gen(a),
        Command::Bench(a) => run_bench(a),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
