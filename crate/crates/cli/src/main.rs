use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pring_core::padic::default_precision;
use pring_core::survey::{format_rows, pool, random_tasks, theta_tasks, with_escalation};
use pring_core::{
    emit_table, lambda, survey, verify, Error, Format, GammaFile, HomGamma, JacobiCheck, LieRingPresentation, PrimeCtx,
    Suite, TableKind,
};

#[derive(Parser)]
#[command(name = "pring", version, about = "Lie rings L_{i,m}(γ) over Z_p[θ] and the invariant λ(γ)")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// λ and y for ϑ_a (or random γ with --trials) over a range of levels.
    Survey(SurveyArgs),
    /// The mod-p coefficient table a(j,k).
    Atable(GammaArgs),
    /// The array J(j, j+1, l).
    Jtable(GammaArgs),
    /// λ(γ) with witness and bounds, as JSON.
    Lambda(GammaArgs),
    /// Structure constants, Jacobi check and lower central series of L_{i,m}(γ).
    Liering(LieArgs),
    /// Run a seeded verification suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Output {
    #[arg(long, default_value = "text")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GammaArgs {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    a: Option<i64>,
    #[arg(long, default_value_t = 0)]
    i: i64,
    #[arg(long)]
    precision: Option<u32>,
    /// γ in coefficient form (JSON); overrides --p, --a and --i.
    #[arg(long)]
    gamma: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SurveyArgs {
    #[arg(long)]
    p: u64,
    /// Comma-separated indices; all of 2..=(p-1)/2 when omitted.
    #[arg(long, value_delimiter = ',')]
    a: Vec<i64>,
    #[arg(long)]
    i: Option<i64>,
    /// Inclusive level range `LO..HI`.
    #[arg(long = "i-range")]
    i_range: Option<String>,
    #[arg(long)]
    precision: Option<u32>,
    /// Random γ per level instead of ϑ_a rows.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct LieArgs {
    #[command(flatten)]
    gamma: GammaArgs,
    /// Defaults to λ(γ).
    #[arg(long)]
    m: Option<i64>,
}

#[derive(Args)]
struct VerifyArgs {
    suite: String,
    #[arg(value_name = "TRIALS")]
    trials_pos: Option<usize>,
    #[arg(value_name = "SEED")]
    seed_pos: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    output: Output,
}

enum Failure {
    Core(Error),
    Verification(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) => match e {
                Error::PrecisionExhausted(_) | Error::PrecisionTooLarge { .. } => 2,
                Error::InvalidGamma(_)
                | Error::NotSurjective { .. }
                | Error::NotOneParameter
                | Error::NotWellDefined(_)
                | Error::IndexOutOfRange { .. }
                | Error::ValuationBelow { .. }
                | Error::ContextMismatch => 3,
                Error::BoundViolation(_) => 5,
                _ => 4,
            },
            Failure::Verification(_) => 5,
            Failure::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Verification(m) | Failure::Io(m) => f.write_str(m),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn write_out(output: &Output, text: &str) -> CliResult<()> {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn parse_range(s: &str) -> CliResult<(i64, i64)> {
    let bad = || Failure::Core(Error::Parse(format!("level range `{s}` is not LO..HI")));
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if lo > hi || lo < 0 {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Loads or constructs γ, escalating precision while `task` runs out of it.
fn with_gamma<T>(args: &GammaArgs, mut task: impl FnMut(&HomGamma) -> pring_core::Result<T>) -> CliResult<T> {
    match &args.gamma {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            let file: GammaFile = serde_json::from_str(&text).map_err(Error::from)?;
            let start = args.precision.unwrap_or(file.precision.max(default_precision(file.p, file.i)));
            Ok(with_escalation(file.p, start, |ctx| task(&HomGamma::from_file_in(ctx, &file)?))?)
        }
        None => {
            let p = args.p.ok_or_else(|| Failure::Core(Error::Parse("need --p and --a, or --gamma".into())))?;
            let a = args.a.ok_or_else(|| Failure::Core(Error::Parse("need --a (or --gamma)".into())))?;
            let start = args.precision.unwrap_or_else(|| default_precision(p, args.i));
            Ok(with_escalation(p, start, |ctx| task(&HomGamma::theta_a(ctx, args.i, a)?))?)
        }
    }
}

fn format_of(output: &Output) -> CliResult<Format> {
    Ok(output.format.parse::<Format>()?)
}

fn cmd_survey(args: &SurveyArgs) -> CliResult<()> {
    let format = format_of(&args.output)?;
    let (lo, hi) = match (&args.i_range, args.i) {
        (Some(r), _) => parse_range(r)?,
        (None, Some(i)) => (i, i),
        (None, None) => (0, 0),
    };
    // Validate p once up front so a bad prime is a parse-level error.
    PrimeCtx::new(args.p, 2)?;
    let tasks = match args.trials {
        Some(t) => random_tasks(args.p, lo..=hi, t, args.seed),
        None => {
            let all: Vec<i64> = (2..=(args.p as i64 - 1) / 2).collect();
            theta_tasks(args.p, if args.a.is_empty() { &all } else { &args.a }, lo..=hi)
        }
    };
    let rows = survey(&tasks, args.precision, args.jobs)?;
    write_out(&args.output, &format_rows(&rows, format))
}

fn cmd_table(args: &GammaArgs, kind: TableKind) -> CliResult<()> {
    let format = format_of(&args.output)?;
    let text = with_gamma(args, |g| emit_table(g, kind, g.d() as usize, format))?;
    write_out(&args.output, &text)
}

fn cmd_lambda(args: &GammaArgs) -> CliResult<()> {
    let format = format_of(&args.output)?;
    let r = with_gamma(args, lambda)?;
    let text = match format {
        Format::Json => serde_json::to_string(&r).expect("plain data serializes") + "\n",
        Format::Csv => format!(
            "p,i,rho,v,lambda,y,wj,wk,wl\n{},{},{},{},{},{},{},{},{}\n",
            r.p, r.i, r.rho, r.v, r.lambda, r.y_main, r.witness[0], r.witness[1], r.witness[2]
        ),
        Format::Text => format!(
            "p={} i={} rho={} v={} lambda={} y={} witness=({},{},{}) bounds=[{}, {}]\n",
            r.p,
            r.i,
            r.rho,
            r.v,
            r.lambda,
            r.y_main,
            r.witness[0],
            r.witness[1],
            r.witness[2],
            r.lower_bound,
            r.upper_bound
        ),
    };
    write_out(&args.output, &text)
}

fn cmd_liering(args: &LieArgs) -> CliResult<()> {
    let format = format_of(&args.gamma.output)?;
    let (l, check, series) = with_gamma(&args.gamma, |g| {
        let m = match args.m {
            Some(m) => m,
            None => lambda(g)?.lambda,
        };
        let l = LieRingPresentation::build(g, m)?;
        let check = l.check_jacobi();
        let series = if check.passed() { Some(l.lower_central_series()?) } else { None };
        Ok((l, check, series))
    })?;
    let text = match format {
        Format::Json => l.to_json() + "\n",
        Format::Text | Format::Csv => {
            let mut s = format!(
                "p={} i={} m={} order=p^{} orders={:?}\n",
                l.ctx().p(),
                l.level(),
                l.m(),
                l.order_exponent(),
                l.orders()
            );
            match check {
                JacobiCheck::Pass => s.push_str("jacobi: pass\n"),
                JacobiCheck::Fail(w) => s.push_str(&format!("jacobi: fail at generators {w:?}\n")),
            }
            if let Some(cs) = series {
                let class = cs.class.map_or_else(|| "not nilpotent".to_string(), |c| c.to_string());
                s.push_str(&format!("lower central series: {:?}\nclass: {class}\n", cs.orders));
            }
            s
        }
    };
    write_out(&args.gamma.output, &text)
}

fn cmd_verify(args: &VerifyArgs) -> CliResult<()> {
    let format = format_of(&args.output)?;
    let suite: Suite = args.suite.parse()?;
    let trials = args.trials.or(args.trials_pos).unwrap_or(100);
    let seed = args.seed.or(args.seed_pos).unwrap_or(0);
    let report = pool(args.jobs)?.install(|| verify(suite, trials, seed))?;
    let text = match format {
        Format::Json => serde_json::to_string(&report).expect("plain data serializes") + "\n",
        _ => {
            let mut s = format!("{}: {}/{} passed\n", report.suite, report.passed, report.trials);
            report.failures.iter().for_each(|f| s.push_str(&format!("FAIL {f}\n")));
            s
        }
    };
    write_out(&args.output, &text)?;
    if report.ok() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{} failures in suite {}", report.failures.len(), report.suite)))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.cmd {
        Command::Survey(a) => cmd_survey(a),
        Command::Atable(a) => cmd_table(a, TableKind::A),
        Command::Jtable(a) => cmd_table(a, TableKind::J),
        Command::Lambda(a) => cmd_lambda(a),
        Command::Liering(a) => cmd_liering(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
