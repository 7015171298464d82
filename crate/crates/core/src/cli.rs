//! Command-line front end. Machine-readable output (JSON, CSV) goes to
//! stdout; diagnostics go to stderr.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 infeasible instance or
//! oracle refusal, 3 search limit reached (the incumbent is still printed).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::apcp::Status;
use crate::bench::{
    bound_audit, gap_from_results, jobs_for, profile_from_results, read_results, run_sweep, sample_evenly, BenchError,
    BoundAudit, SweepConfig,
};
use crate::io::{from_json, load_instance, load_network, read_text, save_network, to_json, write_text, IoError};
use crate::kpi::{write_gap_csv, write_profile_csv, KpiError};
use crate::network::{enumerate_instances, generate_random, ArcId, GeneratorConfig, ModelError, NodeId};
use crate::rapcp::FilterMode;
use crate::solve::{solve, Method, SolveError, SolveOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error(transparent)]
    Kpi(#[from] KpiError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(name = "altpaths", version, about = "Failure-resilient alternative paths")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate random networks and a manifest describing them.
    Generate(GenerateArgs),
    /// Cut one instance (congested arc, destination) out of a network file.
    Extract(ExtractArgs),
    /// Solve one instance and print the solution JSON.
    Solve(SolveArgs),
    /// Sweep all instances of a generated set; write results, profile and gap CSVs.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// 20 nodes, densities 0.4 and 0.6, k in {3, 6}.
    Config1,
    /// 40 nodes, density 0.1, k in {3, 6}.
    Config2,
}

impl Preset {
    fn name(self) -> &'static str {
        match self {
            Preset::Config1 => "config1",
            Preset::Config2 => "config2",
        }
    }

    fn shape(self) -> (usize, &'static [f64], &'static [usize]) {
        match self {
            Preset::Config1 => (20, &[0.4, 0.6], &[3, 6]),
            Preset::Config2 => (40, &[0.1], &[3, 6]),
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum, conflicts_with_all = ["nodes", "density"])]
    pub preset: Option<Preset>,
    #[arg(long, required_unless_present = "preset", requires = "density")]
    pub nodes: Option<usize>,
    /// One or more densities, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub density: Vec<f64>,
    /// Path budgets recorded in the manifest (default: the preset's, else 3).
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Networks per density, seeded `seed`, `seed + 1`, ...
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[arg(long, default_value_t = GeneratorConfig::DEFAULT_CAPACITY_RANGE.0)]
    pub cap_min: i64,
    #[arg(long, default_value_t = GeneratorConfig::DEFAULT_CAPACITY_RANGE.1)]
    pub cap_max: i64,
    #[arg(long, default_value_t = GeneratorConfig::DEFAULT_COST_RANGE.0)]
    pub cost_min: i64,
    #[arg(long, default_value_t = GeneratorConfig::DEFAULT_COST_RANGE.1)]
    pub cost_max: i64,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub network: PathBuf,
    /// Id of the congested arc; it is removed and its tail becomes the source.
    #[arg(long)]
    pub arc: ArcId,
    #[arg(long)]
    pub dest: NodeId,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolverFlags {
    /// Wall-clock limit per solve, in seconds.
    #[arg(long, default_value_t = 200.0)]
    pub time_limit: f64,
    /// Search-node limit for the exact solver (machine-independent cutoff).
    #[arg(long)]
    pub node_limit: Option<u64>,
    /// Refuse oracle runs on instances with more simple paths than this.
    #[arg(long, default_value_t = 60)]
    pub oracle_cap: usize,
    /// Capacity filter of the relaxation: bottleneck or product.
    #[arg(long, default_value_t = FilterMode::Bottleneck)]
    pub filter: FilterMode,
    /// Start the exact search without the relaxation's solution.
    #[arg(long)]
    pub no_warm_start: bool,
}

impl SolverFlags {
    fn options(&self) -> Result<SolveOptions, CliError> {
        if !(self.time_limit.is_finite() && self.time_limit > 0.0) {
            return Err(CliError::Usage(format!(
                "--time-limit must be a positive number of seconds (got {})",
                self.time_limit
            )));
        }
        Ok(SolveOptions {
            time_limit: Duration::from_secs_f64(self.time_limit),
            node_limit: self.node_limit,
            warm_start: !self.no_warm_start,
            oracle_cap: self.oracle_cap,
            filter: self.filter,
        })
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = Method::Benders)]
    pub method: Method,
    /// Override the instance's path budget.
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub solver: SolverFlags,
    /// Write the solution here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory holding a manifest.json written by `generate`.
    #[arg(long)]
    pub dir: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "benders,rapcp")]
    pub methods: Vec<Method>,
    /// Only sweep these path budgets from the manifest.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Keep at most this many instances per (network, k), spread evenly.
    #[arg(long)]
    pub max_instances: Option<usize>,
    #[command(flatten)]
    pub solver: SolverFlags,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Output directory (default: <dir>/bench).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Profile horizon in seconds (default: the time limit, rounded up).
    #[arg(long)]
    pub horizon: Option<u64>,
}

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub preset: Option<String>,
    pub networks: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    /// File name relative to the manifest.
    pub file: String,
    pub k: Vec<usize>,
    pub arcs: usize,
    pub config: GeneratorConfig,
}

/// Parses `args` (including the program name) and runs the command. Returns
/// the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match run(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Generate(a) => generate(a, stdout),
        Command::Extract(a) => extract(a, stdout),
        Command::Solve(a) => solve_cmd(a, stdout, stderr),
        Command::Bench(a) => bench(a, stdout, stderr),
    }
}

fn out_err(e: std::io::Error) -> CliError {
    CliError::Io(IoError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    })
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|source| {
        CliError::Io(IoError::Io {
            path: path.to_path_buf(),
            source,
        })
    })
}

fn generate(a: GenerateArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let (nodes, densities, preset_k) = match a.preset {
        Some(p) => {
            let (n, d, k) = p.shape();
            (n, d.to_vec(), k.to_vec())
        }
        None => (a.nodes.expect("clap enforces --nodes"), a.density.clone(), vec![3]),
    };
    let k = if a.k.is_empty() { preset_k } else { a.k.clone() };
    if k.contains(&0) {
        return Err(CliError::Usage("--k values must be at least 1".into()));
    }
    if a.count == 0 {
        return Err(CliError::Usage("--count must be at least 1".into()));
    }
    create_dir(&a.out)?;
    let mut networks = Vec::new();
    for &density in &densities {
        for seed in a.seed..a.seed + a.count {
            let config = GeneratorConfig {
                node_count: nodes,
                density,
                capacity_range: (a.cap_min, a.cap_max),
                cost_range: (a.cost_min, a.cost_max),
                seed,
            };
            let net = generate_random(&config)?;
            let file = format!("n{nodes}-d{density:.2}-s{seed}.json");
            save_network(&net, &a.out.join(&file))?;
            networks.push(ManifestEntry {
                file,
                k: k.clone(),
                arcs: net.arc_count(),
                config,
            });
        }
    }
    let manifest = Manifest {
        preset: a.preset.map(|p| p.name().to_string()),
        networks,
    };
    let text = to_json(&manifest);
    write_text(&a.out.join(MANIFEST), &text)?;
    writeln!(stdout, "{text}").map_err(out_err)?;
    Ok(EXIT_OK)
}

fn extract(a: ExtractArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let net = load_network(&a.network)?;
    if a.k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    let found = enumerate_instances(&net, a.k)
        .into_iter()
        .find(|e| e.instance.congested_arc == Some(a.arc) && net.node_id(e.instance.dest) == a.dest)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "no instance for arc {} and destination {} (unknown id, or destination equals the arc's tail)",
                a.arc, a.dest
            ))
        })?;
    let text = to_json(&crate::io::InstanceFile::from_instance(&found.instance));
    match &a.out {
        Some(path) => write_text(path, &text)?,
        None => writeln!(stdout, "{text}").map_err(out_err)?,
    }
    Ok(EXIT_OK)
}

fn solve_cmd(a: SolveArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let options = a.solver.options()?;
    let mut instance = load_instance(&a.instance)?;
    if let Some(k) = a.k {
        instance = instance.with_k(k)?;
    }
    let outcome = match solve(&instance, a.method, &options) {
        Ok(o) => o,
        Err(SolveError::Refused(e)) => {
            let _ = writeln!(stderr, "refused: {e}");
            return Ok(EXIT_INFEASIBLE);
        }
    };
    let text = to_json(&outcome.to_file(&instance));
    match &a.out {
        Some(path) => write_text(path, &text)?,
        None => writeln!(stdout, "{text}").map_err(out_err)?,
    }
    Ok(match outcome.status {
        Status::Optimal => EXIT_OK,
        Status::Infeasible => {
            let _ = writeln!(stderr, "infeasible: the destination is unreachable from the source");
            EXIT_INFEASIBLE
        }
        Status::TimeLimitIncumbent => {
            let _ = writeln!(stderr, "search limit reached; printed the best path set found");
            EXIT_LIMIT
        }
    })
}

#[derive(Debug, Serialize)]
struct BenchSummary {
    results: PathBuf,
    profile: PathBuf,
    gap: Option<PathBuf>,
    instances: usize,
    resumed: usize,
    written: usize,
    errors: usize,
    bound_audit: Option<BoundAudit>,
}

fn bench(a: BenchArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let options = a.solver.options()?;
    if a.methods.is_empty() {
        return Err(CliError::Usage("--methods must name at least one method".into()));
    }
    let mut methods = a.methods.clone();
    methods.dedup();
    let manifest_path = a.dir.join(MANIFEST);
    let manifest: Manifest = from_json(&read_text(&manifest_path)?, &manifest_path.display().to_string())?;

    let mut jobs = Vec::new();
    for entry in &manifest.networks {
        let net = load_network(&a.dir.join(&entry.file))?;
        let label = entry.file.trim_end_matches(".json");
        for &k in entry.k.iter().filter(|k| a.k.is_empty() || a.k.contains(k)) {
            let all = jobs_for(label, &net, k);
            jobs.extend(match a.max_instances {
                Some(max) => sample_evenly(all, max),
                None => all,
            });
        }
    }

    let out = a.out.clone().unwrap_or_else(|| a.dir.join("bench"));
    create_dir(&out)?;
    let results = out.join("results.csv");
    let config = SweepConfig {
        methods: methods.clone(),
        options,
        jobs: a.jobs,
    };
    let total = jobs.len() * methods.len();
    let mut done = 0usize;
    let summary = run_sweep(&jobs, &config, &results, |row| {
        done += 1;
        let _ = writeln!(
            stderr,
            "[{done}/{total}] {} {} {} {:.3}s",
            row.instance_id, row.method, row.status, row.time_s
        );
    })?;

    let rows = read_results(&results)?;
    let horizon = a.horizon.unwrap_or_else(|| a.solver.time_limit.ceil().max(1.0) as u64);
    let profile_path = out.join("profile.csv");
    let profile = profile_from_results(&rows, &methods, horizon)?;
    write_csv(&profile_path, |w| write_profile_csv(&profile, w))?;

    let both = methods.contains(&Method::Benders) && methods.contains(&Method::Rapcp);
    let (gap, audit) = if both {
        let audit = bound_audit(&rows);
        let gap_path = out.join("gap.csv");
        match gap_from_results(&rows) {
            Ok(gap_rows) => {
                write_csv(&gap_path, |w| write_gap_csv(&gap_rows, w))?;
                (Some(gap_path), Some(audit))
            }
            Err(KpiError::EmptyIntersection) => {
                let _ = writeln!(
                    stderr,
                    "gap table skipped: no instance solved optimally by both methods"
                );
                (None, Some(audit))
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        let _ = writeln!(stderr, "gap table skipped: it needs both benders and rapcp");
        (None, None)
    };
    if let Some(audit) = &audit {
        let _ = writeln!(
            stderr,
            "bound audit: {} compared, {} below obj_a*obj_b, {} below (obj_a-1)*obj_b",
            audit.compared,
            audit.product_violations.len(),
            audit.weak_violations.len()
        );
    }

    let summary = BenchSummary {
        results,
        profile: profile_path,
        gap,
        instances: jobs.len(),
        resumed: summary.resumed,
        written: summary.written,
        errors: summary.errors,
        bound_audit: audit,
    };
    writeln!(stdout, "{}", to_json(&summary)).map_err(out_err)?;
    Ok(EXIT_OK)
}

fn write_csv(path: &Path, body: impl FnOnce(&mut fs::File) -> Result<(), KpiError>) -> Result<(), CliError> {
    let mut file = fs::File::create(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    body(&mut file)?;
    Ok(())
}
