use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use struction::blowup::{cyclic_blow_up, Preset};
use struction::io::{self, GraphKind, RunStats};
use struction::reduce::{reduce, ReduceConfig, Rule};
use struction::solver::{brute_force_mwis, solve, SolveStatus, SolverConfig};
use struction::{Graph, KernelResult, StructionVariant, VertexId};

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_TIME_LIMIT: u8 = 3;

#[derive(Parser)]
#[command(name = "struction", version, about = "Maximum weight independent set kernelization and solving")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a graph and write the kernel plus a lifting sidecar.
    Reduce(ReduceArgs),
    /// Solve a graph exactly.
    Solve(SolveArgs),
    /// Generate a random weighted graph.
    Gen(GenArgs),
    /// Solve a small graph by exhaustive search.
    Oracle(OracleArgs),
    /// Check a solution file against a graph.
    Verify(VerifyArgs),
    /// Map a kernel solution back to the original graph.
    Lift(LiftArgs),
    /// Convert a whitespace-separated edge list to a weighted graph file.
    Import(ImportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Nonincreasing,
    CyclicFast,
    CyclicStrong,
}

impl From<Mode> for Preset {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Nonincreasing => Preset::NonIncreasing,
            Mode::CyclicFast => Preset::CyclicFast,
            Mode::CyclicStrong => Preset::CyclicStrong,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Original,
    Modified,
    Extended,
    ExtendedReduced,
}

impl From<Variant> for StructionVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Original => StructionVariant::Original,
            Variant::Modified => StructionVariant::Modified,
            Variant::Extended => StructionVariant::Extended,
            Variant::ExtendedReduced => StructionVariant::ExtendedReduced,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Gnp,
    Path,
    Cycle,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Kernel graph file.
    #[arg(long)]
    out: PathBuf,
    /// Lifting sidecar, defaults to `<out>.sidecar`.
    #[arg(long)]
    sidecar: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "cyclic-fast")]
    mode: Mode,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    dmax: Option<usize>,
    /// Unsuccessful blow-up phases before stopping.
    #[arg(long)]
    unsucc: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum)]
    variant: Option<Variant>,
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Include wall-clock times in the stats record.
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "cyclic-fast")]
    mode: Mode,
    #[arg(long)]
    sol: PathBuf,
    #[arg(long)]
    time_limit: Option<f64>,
    /// Seed for the local search.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    /// Edge probability (random graphs only).
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    #[arg(long, default_value_t = 1)]
    wmin: u64,
    #[arg(long, default_value_t = 200)]
    wmax: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "gnp")]
    kind: Kind,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    sol: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    sol: PathBuf,
}

#[derive(Args)]
struct LiftArgs {
    /// Kernel graph file written by `reduce`.
    #[arg(long)]
    kernel: PathBuf,
    #[arg(long)]
    sidecar: Option<PathBuf>,
    /// Solution of the kernel graph.
    #[arg(long)]
    sol: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ImportArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long, default_value_t = 1)]
    wmin: u64,
    #[arg(long, default_value_t = 200)]
    wmax: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Parse(String),
    TimeLimit,
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    // Deep branch-and-reduce recursion needs more than the default stack.
    let worker = std::thread::Builder::new().stack_size(512 << 20).spawn(move || run(cli.command));
    let result = worker.expect("spawn worker thread").join().expect("worker thread panicked");
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::TimeLimit) => ExitCode::from(EXIT_TIME_LIMIT),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_PARSE)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Reduce(a) => cmd_reduce(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Lift(a) => cmd_lift(a),
        Command::Import(a) => cmd_import(a),
    }
}

fn load(path: &Path) -> Result<Graph, Failure> {
    io::read_graph(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn instance_name(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn millis(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e3)
}

fn write_stats(path: Option<&Path>, stats: &RunStats) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, stats.render())?,
        None => print!("{}", stats.render()),
    }
    Ok(())
}

fn cmd_reduce(a: ReduceArgs) -> Result<(), Failure> {
    let g = load(&a.input)?;
    let preset = Preset::from(a.mode);
    let blowup_opts = a.nmax.is_some() || a.unsucc.is_some() || a.beta.is_some() || a.alpha.is_some();
    let d_max = a.dmax.unwrap_or(preset.d_max());
    let variant = a.variant.map_or(StructionVariant::Extended, StructionVariant::from);
    let mut reduce_cfg = ReduceConfig::non_increasing(d_max);
    reduce_cfg.variant = variant;

    let start = Instant::now();
    let (k, cyclic): (KernelResult, _) = match preset.blowup_config() {
        None => {
            if blowup_opts {
                return Err(Failure::Usage("--nmax, --unsucc, --beta and --alpha need a cyclic mode".into()));
            }
            (reduce(g.clone(), &reduce_cfg), None)
        }
        Some(mut cfg) => {
            cfg.d_max = d_max;
            cfg.variant = variant;
            cfg.reduce = reduce_cfg;
            if let Some(x) = a.nmax {
                cfg.n_max = x;
            }
            if let Some(x) = a.unsucc {
                cfg.max_unsuccessful = x;
            }
            if let Some(x) = a.beta {
                cfg.beta = x;
            }
            if let Some(x) = a.alpha {
                cfg.alpha = x;
            }
            cfg.validate().map_err(Failure::Usage)?;
            let r = cyclic_blow_up(g.clone(), &cfg);
            (r.kernel, Some(r.stats))
        }
    };
    let elapsed = start.elapsed();

    let sidecar = a.sidecar.unwrap_or_else(|| sidecar_path(&a.out));
    io::write_kernel(&k, g.num_vertices(), &a.out, &sidecar)?;

    let mut s = RunStats::new();
    s.push("instance", instance_name(&a.input))
        .push("mode", preset)
        .push("variant", variant)
        .push("n", g.num_vertices())
        .push("m", g.num_edges())
        .push("kernel_n", k.kernel.num_vertices())
        .push("kernel_m", k.kernel.num_edges())
        .push("offset", k.offset);
    if k.kernel.is_empty() {
        s.push("weight", k.offset);
    }
    if let Some(c) = &cyclic {
        s.push("initial_kernel_n", c.initial_kernel_n)
            .push("phases", c.phases)
            .push("accepted", c.accepted)
            .push("rejected", c.rejected);
    }
    for rule in Rule::ORDER {
        s.push(&format!("rule_{}", rule.name().replace('-', "_")), k.stats.count(rule));
    }
    if a.timings {
        s.push("reduce_ms", millis(elapsed));
    }
    write_stats(a.stats.as_deref(), &s)
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut p = out.as_os_str().to_owned();
    p.push(".sidecar");
    PathBuf::from(p)
}

fn cmd_solve(a: SolveArgs) -> Result<(), Failure> {
    let g = load(&a.input)?;
    let preset = Preset::from(a.mode);
    let mut cfg = SolverConfig::with_preset(preset);
    cfg.seed = a.seed;
    if let Some(t) = a.time_limit {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Failure::Usage("--time-limit must be positive".into()));
        }
        cfg.time_limit = Some(Duration::from_secs_f64(t));
    }
    let r = solve(&g, &cfg).map_err(|e| Failure::Usage(e.to_string()))?;
    io::write_solution(&a.sol, r.weight, &r.solution)?;

    let mut s = RunStats::new();
    s.push("instance", instance_name(&a.input))
        .push("mode", preset)
        .push("n", g.num_vertices())
        .push("m", g.num_edges())
        .push("initial_kernel_n", r.stats.initial_kernel_n)
        .push("kernel_n", r.stats.kernel_n)
        .push("kernel_m", r.stats.kernel_m)
        .push("nodes", r.stats.nodes)
        .push("branches", r.stats.branches)
        .push("max_depth", r.stats.max_depth)
        .push("weight", r.weight)
        .push("status", r.status.name())
        .push("seed", a.seed);
    if a.timings {
        s.push("reduce_ms", millis(r.stats.preprocess_time)).push("solve_ms", millis(r.stats.search_time));
    }
    write_stats(a.stats.as_deref(), &s)?;
    match r.status {
        SolveStatus::Optimal => Ok(()),
        SolveStatus::TimeLimit => Err(Failure::TimeLimit),
    }
}

fn cmd_gen(a: GenArgs) -> Result<(), Failure> {
    if a.wmin < 1 || a.wmax < a.wmin {
        return Err(Failure::Usage("weights need 1 <= wmin <= wmax".into()));
    }
    let kind = match a.kind {
        Kind::Gnp => {
            if !(0.0..=1.0).contains(&a.p) {
                return Err(Failure::Usage("--p must lie in [0, 1]".into()));
            }
            GraphKind::Gnp(a.p)
        }
        Kind::Path => GraphKind::Path,
        Kind::Cycle => GraphKind::Cycle,
    };
    let g = io::generate(kind, a.n, a.wmin, a.wmax, a.seed);
    io::write_graph(&g, &a.out)?;
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> Result<(), Failure> {
    let g = load(&a.input)?;
    let (w, sol) = brute_force_mwis(&g).map_err(|e| Failure::Usage(e.to_string()))?;
    let text = io::format_solution(w, &sol);
    match a.sol {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<(), Failure> {
    let g = load(&a.input)?;
    let sol = io::read_solution::<u64>(&a.sol).map_err(|e| Failure::Parse(format!("{}: {e}", a.sol.display())))?;
    if let Some(v) = sol.vertices.iter().find(|v| !g.is_active(**v)) {
        return Err(Failure::Usage(format!("InvalidVertex: {} is not a vertex of the graph", v.index() + 1)));
    }
    if !g.is_independent(&sol.vertices) {
        let mut pair = None;
        'outer: for (i, &u) in sol.vertices.iter().enumerate() {
            for &x in &sol.vertices[i + 1..] {
                if u == x || g.is_adjacent(u, x) {
                    pair = Some((u, x));
                    break 'outer;
                }
            }
        }
        let (u, x) = pair.expect("a conflicting pair exists");
        return Err(Failure::Usage(format!("NotIndependent: {} and {} conflict", u.index() + 1, x.index() + 1)));
    }
    let w = g.set_weight_sum(&sol.vertices);
    if let Some(claimed) = sol.weight {
        if claimed != w {
            return Err(Failure::Usage(format!("WeightMismatch: file claims {claimed}, set weighs {w}")));
        }
    }
    println!("ok weight={w} size={}", sol.vertices.len());
    Ok(())
}

fn cmd_lift(a: LiftArgs) -> Result<(), Failure> {
    let file_graph = load(&a.kernel)?;
    let sidecar = a.sidecar.unwrap_or_else(|| sidecar_path(&a.kernel));
    let side = io::read_kernel_sidecar::<u64>(&sidecar).map_err(|e| Failure::Parse(format!("{}: {e}", sidecar.display())))?;
    let kernel = side.restore(&file_graph).map_err(Failure::Parse)?;
    let sol = io::read_solution::<u64>(&a.sol).map_err(|e| Failure::Parse(format!("{}: {e}", a.sol.display())))?;
    let mut mapped = Vec::with_capacity(sol.vertices.len());
    for v in &sol.vertices {
        match side.ids.get(v.index()) {
            Some(&id) => mapped.push(id),
            None => return Err(Failure::Usage(format!("InvalidVertex: {} is not a kernel vertex", v.index() + 1))),
        }
    }
    let lifted: Vec<VertexId> = side.log.lift(&kernel, &mapped).map_err(|e| Failure::Usage(e.to_string()))?;
    let weight = side.offset + kernel.set_weight_sum(&mapped);
    io::write_solution(&a.out, weight, &lifted)?;
    Ok(())
}

fn cmd_import(a: ImportArgs) -> Result<(), Failure> {
    if a.wmin < 1 || a.wmax < a.wmin {
        return Err(Failure::Usage("weights need 1 <= wmin <= wmax".into()));
    }
    let file = fs::File::open(&a.edges).map_err(|e| Failure::Parse(format!("{}: {e}", a.edges.display())))?;
    let mut g = io::parse_edge_list(std::io::BufReader::new(file))
        .map_err(|e| Failure::Parse(format!("{}: {e}", a.edges.display())))?;
    io::assign_random_weights(&mut g, a.wmin, a.wmax, a.seed);
    io::write_graph(&g, &a.out)?;
    Ok(())
}
