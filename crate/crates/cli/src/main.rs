use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gid_core::experiment::{exhaustive_weights, run_easy_weights, ExperimentConfig};
use gid_core::instance::{
    gen_instance, gen_lwp_instance, read_instance, read_solution, write_instance, write_solution,
    GenMode,
};
use gid_core::minsat::{
    brute_minsat, brute_minsat_nonzero, lift, reduce_cwp, reduce_swp, Assignment, LiftContext,
    MinSatInstance,
};
use gid_core::oracle::gv_report;
use gid_core::solvers::{
    solve_cwp, solve_swp, verify_solution, Budget, DecodeResult, Instance, LwpInstance, Outcome,
    SdpInstance, StrategyConfig, StrategyKind,
};

/// Decoding with generalized inverses over prime fields.
#[derive(Parser)]
#[command(name = "gid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random or planted instance.
    Gen(GenArgs),
    /// Search a solution of H·x = s with |x| <= t.
    SolveCwp(SolveArgs),
    /// Search a nonzero codeword with |x| <= t.
    SolveSwp(SolveArgs),
    /// Export a binary instance as an affine MIN-SAT instance.
    ToMinsat(ToMinsatArgs),
    /// Solve a small binary instance (or an .affsat file) by brute force.
    BruteMinsat(BruteArgs),
    /// Check a solution file against an instance.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
    },
    /// Weight coverage experiments.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Weight thresholds near the Gilbert-Varshamov bound.
    Gv(GvArgs),
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Weights reachable with one (or a few) decompositions.
    EasyWeights(EasyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    Sdp,
    Lwp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Random,
    Planted,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    t: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "random")]
    mode: Mode,
    #[arg(long, value_enum, default_value = "sdp")]
    problem: Problem,
    /// Where to write the planted error (planted mode only).
    #[arg(long)]
    planted_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = "lee_brickell")]
    strategy: StrategyKind,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    ell: Option<usize>,
    /// Comma-separated identity block sizes for multi-block steering.
    #[arg(long, value_delimiter = ',')]
    ell_list: Vec<usize>,
    /// GIs drawn per decomposition by the randomized strategies.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 100)]
    budget_decomps: usize,
    #[arg(long)]
    budget_samples: Option<usize>,
    /// Wall clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Override the weight bound stored in the instance.
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ToMinsatArgs {
    instance: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BruteArgs {
    /// A binary .gid instance or an .affsat file.
    input: PathBuf,
    /// Solution file for the lifted optimum (.gid input only).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EasyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    iters: usize,
    #[arg(long, default_value_t = 1)]
    decomps: usize,
    #[arg(long)]
    threads: Option<usize>,
    /// Enumerate every solution instead (tiny instances only).
    #[arg(long)]
    exhaustive: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GvArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    q: u64,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

/// Failure with its exit code: 1 for usage and IO, 2 for search failure or
/// an invalid solution.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl ToString) -> Self {
        Failure {
            code: 1,
            msg: msg.to_string(),
        }
    }

    fn invalid(msg: impl ToString) -> Self {
        Failure {
            code: 2,
            msg: msg.to_string(),
        }
    }
}

impl From<gid_core::Error> for Failure {
    fn from(e: gid_core::Error) -> Self {
        Failure::usage(e)
    }
}

type CmdResult = Result<(), Failure>;

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(Failure::usage),
    }
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    read_instance(&read_file(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn gen(a: GenArgs) -> CmdResult {
    let (inst, planted) = match a.problem {
        Problem::Sdp => {
            let mode = match a.mode {
                Mode::Random => GenMode::Random,
                Mode::Planted => GenMode::Planted,
            };
            let g = gen_instance(a.n, a.k, a.q, a.t, mode, a.seed)?;
            (Instance::Sdp(g.instance), g.planted)
        }
        Problem::Lwp => {
            if matches!(a.mode, Mode::Planted) {
                return Err(Failure::usage("planted mode applies to sdp instances only"));
            }
            (
                Instance::Lwp(gen_lwp_instance(a.n, a.k, a.q, a.t, a.seed)?),
                None,
            )
        }
    };
    match (planted, a.planted_out) {
        (Some(e), Some(path)) => emit(Some(&path), &write_solution(&e))?,
        (None, Some(_)) => return Err(Failure::usage("--planted-out needs --mode planted")),
        _ => {}
    }
    emit(a.out.as_deref(), &write_instance(&inst))
}

fn strategy(a: &SolveArgs) -> StrategyConfig {
    let mut cfg = StrategyConfig::new(a.strategy, a.seed).with_ell_list(a.ell_list.clone());
    cfg.p = a.p;
    cfg.ell = a.ell;
    cfg.samples_per_decomposition = a.samples;
    cfg
}

fn budget(a: &SolveArgs) -> Result<Budget, Failure> {
    let wall_clock_limit = match a.time_limit {
        Some(s) if !(s.is_finite() && s > 0.0) => {
            return Err(Failure::usage(
                "--time-limit must be a positive number of seconds",
            ))
        }
        s => s.map(std::time::Duration::from_secs_f64),
    };
    Ok(Budget {
        max_decompositions: a.budget_decomps,
        max_samples_per_decomposition: a.budget_samples,
        wall_clock_limit,
        workers: a.threads,
    })
}

fn report(res: &DecodeResult, out: Option<&Path>) -> CmdResult {
    let stats = format!(
        "{} decompositions, {} samples, {:.3}s, seed {}",
        res.decompositions_used,
        res.samples_used,
        res.elapsed.as_secs_f64(),
        res.seed
    );
    match &res.outcome {
        Outcome::Found { x, weight } => {
            eprintln!("found weight {weight} ({stats})");
            emit(out, &write_solution(x))
        }
        Outcome::Fail => Err(Failure::invalid(format!(
            "no solution within budget ({stats})"
        ))),
    }
}

fn solve(a: SolveArgs, codeword: bool) -> CmdResult {
    let inst = load_instance(&a.instance)?;
    let cfg = strategy(&a);
    let budget = budget(&a)?;
    let res = match (inst, codeword) {
        (Instance::Sdp(i), false) => {
            let i = SdpInstance::new(i.h, i.s, a.t.unwrap_or(i.t))?;
            solve_cwp(&i, &cfg, &budget)?
        }
        (Instance::Lwp(i), true) => {
            let i = LwpInstance::new(i.h, a.t.unwrap_or(i.t))?;
            solve_swp(&i, &cfg, &budget)?
        }
        (Instance::Lwp(_), false) => return Err(Failure::usage("solve-cwp needs an sdp instance")),
        (Instance::Sdp(_), true) => return Err(Failure::usage("solve-swp needs an lwp instance")),
    };
    report(&res, a.out.as_deref())
}

fn reduce(inst: &Instance) -> Result<(MinSatInstance, LiftContext), Failure> {
    Ok(match inst {
        Instance::Sdp(i) => reduce_cwp(&i.h, &i.s)?,
        Instance::Lwp(i) => reduce_swp(&i.h)?,
    })
}

fn to_minsat(a: ToMinsatArgs) -> CmdResult {
    let (minsat, _) = reduce(&load_instance(&a.instance)?)?;
    emit(a.out.as_deref(), &minsat.to_affsat())
}

fn brute(a: BruteArgs) -> CmdResult {
    let text = read_file(&a.input)?;
    if text.starts_with("p affsat") {
        if a.out.is_some() {
            return Err(Failure::usage("--out needs a .gid instance to lift into"));
        }
        let minsat = MinSatInstance::from_affsat(&text)?;
        let (g, mu) = brute_minsat(&minsat)?;
        println!("mu*: {mu}");
        println!("assignment: {g}");
        return Ok(());
    }
    let inst = read_instance(&text)?;
    let (minsat, ctx) = reduce(&inst)?;
    let (g, mu) = brute_minsat(&minsat)?;
    let best: Option<(Assignment, usize)> = match inst {
        Instance::Sdp(_) => Some((g, mu)),
        Instance::Lwp(_) => {
            println!("mu*: {mu} (zero codeword)");
            brute_minsat_nonzero(&minsat)?
        }
    };
    let Some((g, w)) = best else {
        return Err(Failure::invalid("the code has no nonzero codeword"));
    };
    let x = lift(&ctx, &g)?;
    match inst {
        Instance::Sdp(_) => println!("mu*: {w}"),
        Instance::Lwp(_) => println!("best nonzero: {w}"),
    }
    println!("assignment: {g}");
    println!("solution: {x}");
    if let Some(path) = a.out {
        emit(Some(&path), &write_solution(&x))?;
    }
    Ok(())
}

fn verify(inst_path: &Path, sol_path: &Path) -> CmdResult {
    let inst = load_instance(inst_path)?;
    let h = inst.h();
    let x = read_solution(&read_file(sol_path)?, h.field(), h.n_cols())
        .map_err(|e| Failure::invalid(format!("invalid solution: {e}")))?;
    if !verify_solution(&inst, &x) {
        return Err(Failure::invalid(format!(
            "invalid solution: weight {} or syndrome check failed (t = {})",
            x.weight(),
            inst.t()
        )));
    }
    println!("valid (weight {})", x.weight());
    Ok(())
}

fn easy_weights(a: EasyArgs) -> CmdResult {
    let mut cfg = ExperimentConfig::new(a.n, a.k, a.q, a.seed);
    cfg.iterations = a.iters;
    cfg.decompositions = a.decomps;
    if a.exhaustive {
        let weights: Vec<String> = exhaustive_weights(&cfg)?
            .iter()
            .map(|w| w.to_string())
            .collect();
        return emit(a.out.as_deref(), &format!("{}\n", weights.join(" ")));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.threads.unwrap_or(0))
        .build()
        .map_err(Failure::usage)?;
    let out = pool.install(|| run_easy_weights(&cfg))?;
    let text = match a.format {
        Format::Csv => {
            let mut buf = Vec::new();
            out.report.write_csv(&mut buf)?;
            String::from_utf8(buf).expect("csv output is ASCII")
        }
        Format::Json => serde_json::to_string_pretty(&out).map_err(Failure::usage)? + "\n",
    };
    if let Some((lo, hi)) = out.report.interval() {
        eprintln!(
            "reached weights [{lo}, {hi}] in {} ms",
            out.report.elapsed_ms
        );
    }
    emit(a.out.as_deref(), &text)
}

fn gv(a: GvArgs) -> CmdResult {
    let r = gv_report(a.n, a.k, a.q)?;
    let text = match a.format {
        None => format!(
            "{}\nadjacent: {}\nq-ary weighted: {}\n",
            r.primary, r.adjacent, r.qary
        ),
        Some(Format::Csv) => format!(
            "n,k,q,primary,adjacent,qary\n{},{},{},{},{},{}\n",
            r.n, r.k, r.q, r.primary, r.adjacent, r.qary
        ),
        Some(Format::Json) => serde_json::to_string(&r).map_err(Failure::usage)? + "\n",
    };
    emit(None, &text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let res = match cli.command {
        Command::Gen(a) => gen(a),
        Command::SolveCwp(a) => solve(a, false),
        Command::SolveSwp(a) => solve(a, true),
        Command::ToMinsat(a) => to_minsat(a),
        Command::BruteMinsat(a) => brute(a),
        Command::Verify { instance, solution } => verify(&instance, &solution),
        Command::Experiment(ExperimentCommand::EasyWeights(a)) => easy_weights(a),
        Command::Gv(a) => gv(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
