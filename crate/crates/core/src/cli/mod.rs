//! Command-line front end: `solve`, `benchmark` and `simulate`.
//!
//! Exit codes: 0 success, 2 unreadable or malformed input, 3 bad flags or
//! an unsupported method/variant combination, 4 infeasible result.

mod bench;
pub mod compat;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ga::{evolve_seeded, GaError, GaParams, InitMix};
use crate::heuristics::{
    dispatch, dispatch_with_assignment, global_selection, local_selection, MachRule, OpRule,
};
use crate::model::{validate, Instance, Schedule, Variant};
use crate::parsers::{parse_bytes, FormatTag, ParseError};
use crate::sim::{run_online, write_trace, ArrivalConfig};

pub use compat::{allowed, support, MethodTag, ProblemClass, Support};
pub use output::{gantt, PlacementRecord, ScheduleDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "jobshop", version, about = "Job-shop scheduling solvers and simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance and write the schedule as JSON.
    Solve(SolveArgs),
    /// Run methods and seeds over a directory of instances, writing CSV.
    Benchmark(BenchArgs),
    /// Run the online arrival simulator with a dispatching rule.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RuleArgs {
    #[arg(long, default_value = "fifo")]
    pub op_rule: OpRule,
    #[arg(long, default_value = "spt")]
    pub mach_rule: MachRule,
}

#[derive(Debug, Clone, Args)]
pub struct GaArgs {
    #[arg(long, default_value_t = 100)]
    pub population: usize,
    #[arg(long, default_value_t = 200)]
    pub generations: usize,
    #[arg(long, default_value_t = 0.8)]
    pub crossover_rate: f64,
    #[arg(long, default_value_t = 0.1)]
    pub mutation_rate: f64,
    /// Initial population fractions `global,local,random`.
    #[arg(long, default_value = "0.6,0.3,0.1", value_parser = parse_init_mix)]
    pub init_mix: InitMix,
    #[arg(long, default_value_t = 3)]
    pub tournament: usize,
    #[arg(long, default_value_t = 2)]
    pub elite: usize,
}

impl GaArgs {
    pub fn params(&self, seed: u64) -> GaParams {
        GaParams {
            population_size: self.population,
            generations: self.generations,
            crossover_rate: self.crossover_rate,
            mutation_rate: self.mutation_rate,
            init_mix: self.init_mix,
            tournament_size: self.tournament,
            elite_count: self.elite,
            seed,
        }
    }
}

fn parse_init_mix(s: &str) -> Result<InitMix, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [global, local, random] => Ok(InitMix { global, local, random }),
        _ => Err(format!("expected three comma-separated fractions, got {s:?}")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub format: FormatTag,
    #[arg(long, default_value = "dispatch")]
    pub method: MethodTag,
    #[command(flatten)]
    pub rules: RuleArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub ga: GaArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Permit method/variant pairs marked as extensions (dispatch on setup times).
    #[arg(long)]
    pub allow_extension: bool,
    /// Print a text Gantt chart to stdout.
    #[arg(long)]
    pub gantt: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub dir: PathBuf,
    #[arg(long)]
    pub format: FormatTag,
    #[arg(long, value_delimiter = ',', default_value = "dispatch,heuristic_gs,heuristic_ls,ga")]
    pub methods: Vec<MethodTag>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub seeds: Vec<u64>,
    #[arg(long)]
    pub csv: PathBuf,
    #[command(flatten)]
    pub rules: RuleArgs,
    #[command(flatten)]
    pub ga: GaArgs,
    #[arg(long)]
    pub allow_extension: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub rules: RuleArgs,
    /// Only `dispatch` handles online arrivals.
    #[arg(long, default_value = "dispatch")]
    pub method: MethodTag,
    /// Write the event trace as JSON lines.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Overrides the seed from the config file.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Everything a method needs besides the instance.
#[derive(Clone, Debug)]
pub struct MethodOptions {
    pub op_rule: OpRule,
    pub mach_rule: MachRule,
    pub ga: GaParams,
}

impl MethodOptions {
    /// Short parameter summary for reports.
    pub fn describe(&self, method: MethodTag) -> String {
        match method {
            MethodTag::Dispatch => format!("{}+{}", self.op_rule, self.mach_rule),
            MethodTag::HeuristicGs | MethodTag::HeuristicLs => format!("{}", self.op_rule),
            MethodTag::Ga => {
                let p = &self.ga;
                format!(
                    "P={} G={} pc={} pm={} mix={}/{}/{} k={} e={}",
                    p.population_size,
                    p.generations,
                    p.crossover_rate,
                    p.mutation_rate,
                    p.init_mix.global,
                    p.init_mix.local,
                    p.init_mix.random,
                    p.tournament_size,
                    p.elite_count
                )
            }
        }
    }
}

/// Runs one method. Load-balancing heuristics fix machines first and then
/// sequence with `op_rule`; `ga.seed` seeds every randomised method.
pub fn run_method(instance: &Instance, method: MethodTag, opts: &MethodOptions) -> Result<Schedule, GaError> {
    let schedule = match method {
        MethodTag::Dispatch => dispatch(instance, opts.op_rule, opts.mach_rule)?,
        MethodTag::HeuristicGs => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.ga.seed);
            let assignment = global_selection(instance, &mut rng);
            dispatch_with_assignment(instance, opts.op_rule, &assignment)?
        }
        MethodTag::HeuristicLs => {
            dispatch_with_assignment(instance, opts.op_rule, &local_selection(instance))?
        }
        MethodTag::Ga => evolve_seeded(instance, &opts.ga)?.schedule,
    };
    Ok(schedule)
}

#[derive(Debug)]
pub enum LoadError {
    Io(io::Error),
    Parse(ParseError),
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadError::Io(e) => e.fmt(f),
            LoadError::Parse(e) => e.fmt(f),
        }
    }
}

/// Reads and parses an instance. A `jsp` file whose jobs all share one
/// route is tagged as a flow shop.
pub fn load_instance(path: &Path, format: FormatTag) -> Result<Instance, LoadError> {
    let bytes = fs::read(path).map_err(LoadError::Io)?;
    let instance = parse_bytes(format, &bytes).map_err(LoadError::Parse)?;
    if instance.variant() == Variant::Jsp && instance.is_flow_shop() {
        return Ok(instance
            .with_variant(Variant::Fsp)
            .expect("a single-route job shop is a valid flow shop"));
    }
    Ok(instance)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Solve(args) => solve(&args),
        Command::Benchmark(args) => bench::benchmark(&args),
        Command::Simulate(args) => simulate(&args),
    }
}

fn solve(args: &SolveArgs) -> i32 {
    let opts = MethodOptions {
        op_rule: args.rules.op_rule,
        mach_rule: args.rules.mach_rule,
        ga: args.ga.params(args.seed),
    };
    if args.method == MethodTag::Ga {
        if let Err(e) = opts.ga.validate() {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    }
    let instance = match load_instance(&args.instance, args.format) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {}: {e}", args.instance.display());
            return EXIT_INPUT;
        }
    };
    let class = ProblemClass::Static(instance.variant());
    match support(args.method, class) {
        Support::Supported => {}
        Support::Extension if args.allow_extension => {}
        Support::Extension => {
            eprintln!(
                "error: {} on {class} is an extension; pass --allow-extension to run it",
                args.method
            );
            return EXIT_USAGE;
        }
        Support::Unsupported => {
            eprintln!("error: {} does not support {class}", args.method);
            return EXIT_USAGE;
        }
    }

    let schedule = match run_method(&instance, args.method, &opts) {
        Ok(s) => s,
        Err(GaError::InvalidParams(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
        Err(e) => {
            eprintln!("error: no feasible schedule: {e}");
            return EXIT_INFEASIBLE;
        }
    };
    match validate(&schedule, &instance) {
        Ok(v) if v.is_empty() => {}
        Ok(v) => {
            eprintln!("error: schedule is infeasible: {} violation(s), first {:?}", v.len(), v[0]);
            return EXIT_INFEASIBLE;
        }
        Err(e) => {
            eprintln!("error: schedule is incomplete: {e}");
            return EXIT_INFEASIBLE;
        }
    }

    let doc = ScheduleDocument::new(
        &args.instance.display().to_string(),
        args.method.name(),
        &instance,
        &schedule,
    );
    if let Err(e) = fs::write(&args.out, doc.to_json()) {
        eprintln!("error: cannot write {}: {e}", args.out.display());
        return EXIT_INPUT;
    }
    println!("makespan: {}", schedule.makespan());
    if args.gantt {
        print!("{}", gantt(&instance, &schedule));
    }
    EXIT_OK
}

fn simulate(args: &SimulateArgs) -> i32 {
    if !allowed(args.method, ProblemClass::Online, false) {
        eprintln!("error: {} does not support online arrivals", args.method);
        return EXIT_USAGE;
    }
    let mut config = match ArrivalConfig::from_path(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let outcome = match run_online(&config, args.rules.op_rule, args.rules.mach_rule) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    if let Some(path) = &args.trace {
        let written = fs::File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            write_trace(&outcome.trace, &mut w)?;
            w.flush()
        });
        if let Err(e) = written {
            eprintln!("error: cannot write trace {}: {e}", path.display());
            return EXIT_INPUT;
        }
    }
    let stats = &outcome.stats;
    println!("jobs: {}", config.job_count);
    println!("makespan: {}", stats.makespan);
    println!("mean_flow_time: {:.3}", stats.mean_flow_time);
    println!("mean_interarrival: {:.3}", outcome.mean_interarrival());
    for (m, u) in stats.machine_utilizations.iter().enumerate() {
        println!("utilization[{m}]: {u:.4}");
    }
    EXIT_OK
}
