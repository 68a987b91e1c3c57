//! Command-line front end and config-driven experiment runner.
//!
//! The binary exposes one subcommand per capability: `gen` (instance
//! families), `project` (sample and apply a map), `net` (hierarchy dump),
//! `ddim` (doubling-dimension estimate), `opt` (discrete clustering solve),
//! `verify` (one guarantee check over seeded trials), `stats` (lower-tail
//! table), and `experiment` (config-driven sweep writing CSV plus a JSON
//! summary).
//!
//! Exit codes: `0` — the run completed (**failed checks are data**, recorded
//! in the output, never a process error); `2` — the request or its input
//! data is invalid (bad flags, malformed config or file, unsupported
//! parameter combination); `3` — the environment failed (I/O).
//!
//! Determinism contract: for a fixed config and base seed, `experiment`
//! produces byte-identical CSV and summary output across reruns and across
//! thread counts. Per-row wall-clock times break that, so the `runtime_ms`
//! column is written as `0` unless the config opts in via `record_runtime`
//! (documented there).

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use crate::clustering::{
    assign_source, opt_auto, opt_exact, opt_local, ClusteringInstance, DEFAULT_ENUM_BUDGET,
};
use crate::geometry::{dist, Point, PowerExponent, WeightedPointSet};
use crate::instances::InstanceSpec;
use crate::nets::{build_hierarchy, estimate_ddim};
use crate::projection::{DimensionRecipe, GaussianMap};
use crate::stats::{chi_square_cdf_even, chi_square_lower_tail};
use crate::verify::{run_check, GuaranteeReport, TrialCheck, TrialSummary};
use crate::{Error, Result};

/// Version stamp embedded in every JSON report this module writes.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Header of the experiment result CSV, fixed.
pub const RESULT_HEADER: &str = "check,seed,t,eps,alpha,pass,worst_ratio,runtime_ms";

// ---------------------------------------------------------------------------
// experiment config
// ---------------------------------------------------------------------------

/// Root of the experiment config (TOML, or JSON for programmatic callers —
/// the two forms are field-for-field identical).
///
/// ```toml
/// output = "results.csv"       # summary lands next to it as *.summary.json
/// trials = 60
/// base_seed = 1
///
/// [instance]
/// family = "doubling"
/// n = 256
/// ddim = 2
///
/// [dimension]                  # either an explicit sweep ...
/// t = [4, 8, 16]
/// # ... or a recipe: recipe = { variant = "...", eps = 0.25, ... }
///
/// [[check]]
/// name = "contraction"
/// eps = 0.25
/// ```
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// CSV result path.
    pub output: PathBuf,
    /// JSON summary path; defaults to `output` with extension `summary.json`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
    /// Trials per (check, t) cell, seeded `base_seed, base_seed + 1, ...`.
    pub trials: u64,
    pub base_seed: u64,
    /// Record wall-clock per row. Off by default: timing is inherently
    /// nondeterministic and would break the byte-identical-output contract.
    #[serde(default)]
    pub record_runtime: bool,
    pub instance: InstanceSpec,
    pub dimension: DimensionChoice,
    #[serde(rename = "check")]
    pub checks: Vec<CheckSpec>,
}

/// Target dimensions to sweep: an explicit list, or a recipe evaluated once.
#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionChoice {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recipe: Option<DimensionRecipe>,
}

impl DimensionChoice {
    pub fn resolve(&self) -> Result<Vec<usize>> {
        match (&self.t, &self.recipe) {
            (Some(list), None) => {
                if list.is_empty() {
                    return Err(Error::Config("dimension.t must be nonempty".into()));
                }
                Ok(list.clone())
            }
            (None, Some(recipe)) => Ok(vec![recipe.target_dimension()?]),
            (Some(_), Some(_)) => {
                Err(Error::Config("set either dimension.t or dimension.recipe, not both".into()))
            }
            (None, None) => Err(Error::Config("dimension needs t = [...] or a recipe".into())),
        }
    }
}

/// One named check within an experiment.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    /// `expansion`, `contraction`, `relaxed-contraction`, `preserve-sum`, or
    /// `fixed-solution-expansion`.
    pub name: String,
    pub eps: f64,
    /// Cost-floor multiplier; only read by `relaxed-contraction` (default
    /// 100).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// `preserve-sum` only: overrides the instance's k in the slack term.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// `preserve-sum` only: which candidate point is the center (default 0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_index: Option<usize>,
    /// `fixed-solution-expansion` only: the candidate indices to hold fixed;
    /// defaults to a seeded solve of the source instance. The assignment is
    /// always the source-optimal one for those candidates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<usize>>,
}

impl CheckSpec {
    /// `alpha` as the result row reports it: set only where the check reads
    /// it.
    fn row_alpha(&self) -> Option<f64> {
        match self.name.as_str() {
            "relaxed-contraction" => Some(self.alpha.unwrap_or(100.0)),
            _ => None,
        }
    }

    pub fn build(&self, inst: &ClusteringInstance) -> Result<TrialCheck> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::Config(format!(
                "check '{}': eps must lie in (0, 1), got {}",
                self.name, self.eps
            )));
        }
        match self.name.as_str() {
            "expansion" => Ok(TrialCheck::Expansion { inst: inst.clone(), eps: self.eps }),
            "contraction" => Ok(TrialCheck::Contraction { inst: inst.clone(), eps: self.eps }),
            "relaxed-contraction" => Ok(TrialCheck::RelaxedContraction {
                inst: inst.clone(),
                eps: self.eps,
                alpha: self.alpha.unwrap_or(100.0),
            }),
            "preserve-sum" => {
                let idx = self.center_index.unwrap_or(0);
                if idx >= inst.q.len() {
                    return Err(Error::Config(format!(
                        "preserve-sum center_index {idx} out of range ({} candidates)",
                        inst.q.len()
                    )));
                }
                Ok(TrialCheck::PreserveSum {
                    points: inst.p.clone(),
                    center: inst.q.point(idx).clone(),
                    k: self.k.unwrap_or(inst.k),
                    z: inst.z,
                    eps: self.eps,
                })
            }
            "fixed-solution-expansion" => {
                let centers = match &self.centers {
                    Some(c) => c.clone(),
                    None => opt_auto(inst, 0x5EED)?.solution.center_indices,
                };
                let partition = assign_source(inst, &centers)?;
                Ok(TrialCheck::FixedSolutionExpansion {
                    inst: inst.clone(),
                    centers,
                    partition,
                    eps: self.eps,
                })
            }
            other => Err(Error::Config(format!(
                "unknown check '{other}' (expected expansion, contraction, \
                 relaxed-contraction, preserve-sum, or fixed-solution-expansion)"
            ))),
        }
    }
}

/// Parse an experiment config from TOML (default) or JSON (`.json` paths).
pub fn parse_config(text: &str, json: bool) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = if json {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config JSON: {e}")))?
    } else {
        toml::from_str(text).map_err(|e| Error::Config(format!("config TOML: {e}")))?
    };
    if config.trials < 1 {
        return Err(Error::Config("trials must be >= 1".into()));
    }
    if config.checks.is_empty() {
        return Err(Error::Config("at least one [[check]] is required".into()));
    }
    Ok(config)
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    parse_config(&text, json)
}

// ---------------------------------------------------------------------------
// experiment runner
// ---------------------------------------------------------------------------

/// The two artifacts an experiment produces, as strings so callers (and the
/// determinism tests) can compare them byte for byte before anything touches
/// the filesystem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentOutput {
    pub csv: String,
    pub summary: String,
}

#[derive(serde::Serialize)]
struct SummaryCell {
    trials: u64,
    successes: u64,
    rate: f64,
}

/// Execute every (check, t, seed) cell of the config and render the CSV and
/// the per-check JSON summary.
///
/// Rows appear in config order of checks, then sweep order of `t`, then
/// ascending seed; cells within one (check, t) block run in parallel but are
/// collected in seed order, so output bytes never depend on thread count. A
/// cell whose solver exceeds its enumeration budget is recorded as a failed
/// row with `worst_ratio` `NaN` rather than aborting the run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let inst = config.instance.generate()?;
    let t_list = config.dimension.resolve()?;
    let checks: Vec<(TrialCheck, &CheckSpec)> = config
        .checks
        .iter()
        .map(|spec| Ok((spec.build(&inst)?, spec)))
        .collect::<Result<_>>()?;

    let mut csv = String::from(RESULT_HEADER);
    csv.push('\n');
    let mut summary: std::collections::BTreeMap<String, SummaryCell> = Default::default();

    for (check, spec) in &checks {
        for &t in &t_list {
            let cells: Vec<(bool, f64, u128)> = (0..config.trials)
                .into_par_iter()
                .map(|i| {
                    let seed = config.base_seed.wrapping_add(i);
                    let started = std::time::Instant::now();
                    let (pass, ratio) = match run_check(check, t, seed) {
                        Ok(report) => (report.pass, report.worst_ratio),
                        Err(Error::BudgetExceeded { .. }) => (false, f64::NAN),
                        Err(e) => return Err(e),
                    };
                    let ms =
                        if config.record_runtime { started.elapsed().as_millis() } else { 0 };
                    Ok((pass, ratio, ms))
                })
                .collect::<Result<_>>()?;
            for (i, (pass, ratio, ms)) in cells.iter().enumerate() {
                let seed = config.base_seed.wrapping_add(i as u64);
                let alpha = match spec.row_alpha() {
                    Some(a) => a.to_string(),
                    None => String::new(),
                };
                csv.push_str(&format!(
                    "{},{seed},{t},{},{alpha},{pass},{ratio},{ms}\n",
                    spec.name, spec.eps
                ));
                let cell = summary.entry(spec.name.clone()).or_insert(SummaryCell {
                    trials: 0,
                    successes: 0,
                    rate: 0.0,
                });
                cell.trials += 1;
                cell.successes += u64::from(*pass);
            }
        }
    }
    for cell in summary.values_mut() {
        cell.rate = cell.successes as f64 / cell.trials as f64;
    }
    let mut summary_text = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::Config(format!("summary serialization: {e}")))?;
    summary_text.push('\n');
    Ok(ExperimentOutput { csv, summary: summary_text })
}

fn summary_path(config: &ExperimentConfig) -> PathBuf {
    config
        .summary
        .clone()
        .unwrap_or_else(|| config.output.with_extension("summary.json"))
}

// ---------------------------------------------------------------------------
// argument surface
// ---------------------------------------------------------------------------

#[derive(Parser, Debug)]
#[command(
    name = "lowdim",
    version,
    about = "Gaussian dimension reduction for discrete power clustering: \
             generators, maps, nets, solvers, guarantee checks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Generate a named instance family and write its points as CSV.
    Gen(GenArgs),
    /// Sample a seeded Gaussian map and write images and/or the map itself.
    Project(ProjectArgs),
    /// Build the net hierarchy around given centers and dump it as JSON.
    Net(NetArgs),
    /// Estimate the doubling dimension of a point set (greedy half covers).
    Ddim(DdimArgs),
    /// Solve the discrete clustering problem exactly or by local search.
    Opt(OptArgs),
    /// Run one guarantee check over seeded trials and write a JSON report.
    Verify(VerifyArgs),
    /// Tabulate squared-norm lower-tail estimates over a (t, eps) grid.
    Stats(StatsArgs),
    /// Run a config-driven experiment writing result CSV + JSON summary.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// basis | decay | eps-decay | candidate | pairs | kernel | doubling
    #[arg(long)]
    family: String,
    /// Family parameters as key=value pairs (e.g. --params n=256 ddim=2).
    #[arg(long, value_name = "KEY=VALUE", num_args = 1..)]
    params: Vec<String>,
    /// Where the data points (P) go.
    #[arg(long)]
    out: PathBuf,
    /// Also write the candidate set (Q) when it differs from P.
    #[arg(long)]
    out_candidates: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ProjectArgs {
    /// Input points CSV.
    #[arg(long)]
    input: PathBuf,
    /// Target dimension (mutually exclusive with --recipe).
    #[arg(long)]
    t: Option<usize>,
    /// TOML file holding a dimension recipe to evaluate instead of --t.
    #[arg(long)]
    recipe: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where the projected points go.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also persist the sampled map (binary, header + row-major entries).
    #[arg(long)]
    map_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct NetArgs {
    /// Input points CSV (P).
    #[arg(long)]
    input: PathBuf,
    /// Candidate points CSV (Q); defaults to P.
    #[arg(long)]
    candidates: Option<PathBuf>,
    /// Centers CSV (weights ignored).
    #[arg(long)]
    centers: PathBuf,
    /// Base radius; defaults to the diameter of P union Q.
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long, default_value_t = 0)]
    ell_min: i64,
    #[arg(long, default_value_t = 8)]
    ell_max: i64,
    #[arg(long)]
    eps: f64,
    /// Where the hierarchy JSON goes.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DdimArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum OptMode {
    Exact,
    Local,
}

#[derive(Args, Debug)]
struct OptArgs {
    /// Input points CSV (P).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    z: f64,
    /// Candidate points CSV (Q); defaults to P.
    #[arg(long)]
    candidates: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: OptMode,
    /// Local-search seed (ignored by --mode exact).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Enumeration budget for --mode exact.
    #[arg(long, default_value_t = DEFAULT_ENUM_BUDGET)]
    budget: u64,
    /// Local-search restarts for --mode local.
    #[arg(long, default_value_t = 8)]
    restarts: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// expansion | contraction | relaxed-contraction | preserve-sum |
    /// fixed-solution-expansion
    #[arg(long)]
    check: String,
    /// Input points CSV (P).
    #[arg(long)]
    input: PathBuf,
    /// Candidate points CSV (Q); defaults to P.
    #[arg(long)]
    candidates: Option<PathBuf>,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    z: f64,
    /// Target dimension; equal to the source dimension injects the exact
    /// identity map (distortion-free baseline).
    #[arg(long)]
    t: usize,
    #[arg(long)]
    eps: f64,
    /// Cost-floor multiplier for relaxed-contraction.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    base_seed: u64,
    /// preserve-sum: which candidate is the center (default 0).
    #[arg(long)]
    center_index: Option<usize>,
    /// fixed-solution-expansion: candidate indices, comma separated.
    #[arg(long, value_delimiter = ',')]
    centers: Option<Vec<usize>>,
    /// Report JSON path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum TailMode {
    Mc,
    ClosedForm,
}

#[derive(Args, Debug)]
struct StatsArgs {
    /// Degrees of freedom, comma separated (e.g. --t 6,8,12).
    #[arg(long, value_delimiter = ',', required = true)]
    t: Vec<u32>,
    /// Depths, comma separated (e.g. --eps 0.1,0.25,0.4).
    #[arg(long, value_delimiter = ',', required = true)]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// mc = Monte Carlo; closed-form = exact series (even t only, stderr 0).
    #[arg(long, value_enum, default_value_t = TailMode::Mc)]
    method: TailMode,
    /// Rate constant of the reference bound column exp(-c eps^2 t) / t.
    #[arg(long, default_value_t = 8.0)]
    bound_c: f64,
    /// CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Experiment config: TOML, or JSON when the path ends in .json.
    #[arg(long)]
    config: PathBuf,
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

/// Parse `std::env::args`, execute, and translate the outcome into the
/// documented exit code. The binary is a one-liner over this.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) => 3,
                _ => 2,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Gen(args) => cmd_gen(args),
        Cmd::Project(args) => cmd_project(args),
        Cmd::Net(args) => cmd_net(args),
        Cmd::Ddim(args) => cmd_ddim(args),
        Cmd::Opt(args) => cmd_opt(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Stats(args) => cmd_stats(args),
        Cmd::Experiment(args) => cmd_experiment(args),
    }
}

/// `--params key=value` pairs into an [`InstanceSpec`]. Duplicate or unknown
/// keys are errors so typos surface.
pub fn spec_from_params(family: &str, params: &[String]) -> Result<InstanceSpec> {
    let mut spec = InstanceSpec::new(family);
    let mut seen: Vec<&str> = Vec::new();
    for pair in params {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got '{pair}'")))?;
        if seen.contains(&key) {
            return Err(Error::Config(format!("duplicate parameter '{key}'")));
        }
        let bad = |e: std::num::ParseIntError| Error::Config(format!("{key}: {e}"));
        let bad_f = |e: std::num::ParseFloatError| Error::Config(format!("{key}: {e}"));
        match key {
            "n" => spec.n = Some(value.parse().map_err(bad)?),
            "s" => spec.s = Some(value.parse().map_err(bad)?),
            "k" => spec.k = Some(value.parse().map_err(bad)?),
            "d" => spec.d = Some(value.parse().map_err(bad)?),
            "eps" => spec.eps = Some(value.parse().map_err(bad_f)?),
            "ddim" => spec.ddim = Some(value.parse().map_err(bad)?),
            "spread" => spec.spread = Some(value.parse().map_err(bad_f)?),
            "seed" => spec.seed = Some(value.parse().map_err(bad)?),
            "override_k" => spec.override_k = Some(value.parse().map_err(bad)?),
            "z" => spec.z = Some(value.parse().map_err(bad_f)?),
            other => return Err(Error::Config(format!("unknown parameter '{other}'"))),
        }
        seen.push(key);
    }
    Ok(spec)
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let spec = spec_from_params(&args.family, &args.params)?;
    let inst = spec.generate()?;
    inst.p.write_csv(&args.out)?;
    let mut wrote_candidates = false;
    if let Some(path) = &args.out_candidates {
        inst.q.write_csv(path)?;
        wrote_candidates = true;
    }
    println!(
        "{}",
        json!({
            "family": args.family,
            "points": inst.p.len(),
            "candidates": inst.q.len(),
            "total_weight": inst.p.total_weight(),
            "dim": inst.p.dim(),
            "k": inst.k,
            "z": inst.z.get(),
            "wrote_candidates": wrote_candidates,
        })
    );
    Ok(())
}

fn cmd_project(args: ProjectArgs) -> Result<()> {
    let points = WeightedPointSet::read_csv(&args.input)?;
    let t = match (args.t, &args.recipe) {
        (Some(t), None) => t,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            let recipe: DimensionRecipe =
                toml::from_str(&text).map_err(|e| Error::Config(format!("recipe TOML: {e}")))?;
            recipe.target_dimension()?
        }
        (Some(_), Some(_)) => {
            return Err(Error::Config("pass either --t or --recipe, not both".into()))
        }
        (None, None) => return Err(Error::Config("one of --t or --recipe is required".into())),
    };
    let map = GaussianMap::sample(points.dim(), t, args.seed)?;
    if let Some(path) = &args.out {
        map.apply_set(&points)?.write_csv(path)?;
    }
    if let Some(path) = &args.map_out {
        map.write_binary(path)?;
    }
    println!(
        "{}",
        json!({ "d": map.d(), "t": map.t(), "seed": map.seed(), "points": points.len() })
    );
    Ok(())
}

fn cmd_net(args: NetArgs) -> Result<()> {
    let p = WeightedPointSet::read_csv(&args.input)?;
    let q = match &args.candidates {
        Some(path) => WeightedPointSet::read_csv(path)?,
        None => p.clone(),
    };
    let centers = WeightedPointSet::read_csv(&args.centers)?.points().to_vec();
    let r0 = match args.r0 {
        Some(r0) => r0,
        None => {
            let all: Vec<&Point> = p.points().iter().chain(q.points()).collect();
            let mut diam = 0.0f64;
            for (i, a) in all.iter().enumerate() {
                for b in &all[i + 1..] {
                    diam = diam.max(dist(a, b));
                }
            }
            diam
        }
    };
    let hierarchy = build_hierarchy(&p, &q, &centers, r0, args.ell_min, args.ell_max, args.eps)?;
    let mut file = std::fs::File::create(&args.out)?;
    let dump = hierarchy.to_json();
    writeln!(file, "{dump:#}")?;
    println!(
        "{}",
        json!({
            "levels": hierarchy.nets.len(),
            "r0": r0,
            "union_points": hierarchy.union.len(),
        })
    );
    Ok(())
}

fn cmd_ddim(args: DdimArgs) -> Result<()> {
    let points = WeightedPointSet::read_csv(&args.input)?;
    let estimate = estimate_ddim(&points);
    let text = serde_json::to_string(&estimate)
        .map_err(|e| Error::Config(format!("estimate serialization: {e}")))?;
    println!("{text}");
    Ok(())
}

fn read_instance(
    input: &Path,
    candidates: Option<&PathBuf>,
    k: usize,
    z: f64,
) -> Result<ClusteringInstance> {
    let p = WeightedPointSet::read_csv(input)?;
    let z = PowerExponent::new(z)?;
    match candidates {
        Some(path) => ClusteringInstance::new(p, WeightedPointSet::read_csv(path)?, k, z),
        None => ClusteringInstance::discrete(p, k, z),
    }
}

fn cmd_opt(args: OptArgs) -> Result<()> {
    let inst = read_instance(&args.input, args.candidates.as_ref(), args.k, args.z)?;
    let result = match args.mode {
        OptMode::Exact => opt_exact(&inst, args.budget)?,
        OptMode::Local => opt_local(&inst, args.restarts, args.seed)?,
    };
    println!(
        "{}",
        json!({
            "value": result.value,
            "centers": result.solution.center_indices,
            "exact": result.exact,
        })
    );
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let inst = read_instance(&args.input, args.candidates.as_ref(), args.k, args.z)?;
    let spec = CheckSpec {
        name: args.check.clone(),
        eps: args.eps,
        alpha: args.alpha,
        k: Some(args.k),
        center_index: args.center_index,
        centers: args.centers.clone(),
    };
    let check = spec.build(&inst)?;

    let seeds: Vec<u64> = (0..args.trials.max(1)).map(|i| args.base_seed.wrapping_add(i)).collect();
    if args.trials < 1 {
        return Err(Error::Config("trials must be >= 1".into()));
    }
    let reports: Vec<GuaranteeReport> = seeds
        .par_iter()
        .map(|&seed| run_check(&check, args.t, seed))
        .collect::<Result<_>>()?;
    let successes = reports.iter().filter(|r| r.pass).count() as u64;
    let summary = TrialSummary {
        trials: args.trials,
        successes,
        success_rate: successes as f64 / args.trials as f64,
        seeds: seeds.clone(),
    };
    let rows: Vec<serde_json::Value> = seeds
        .iter()
        .zip(&reports)
        .map(|(seed, r)| json!({ "seed": seed, "pass": r.pass, "worst_ratio": r.worst_ratio }))
        .collect();
    let report = json!({
        "schema_version": REPORT_SCHEMA_VERSION,
        "check": check.name(),
        "t": args.t,
        "eps": args.eps,
        "alpha": spec.row_alpha(),
        "base_seed": args.base_seed,
        "summary": summary,
        "rows": rows,
        "first_report": reports[0],
    });
    let text = format!("{report:#}\n");
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> Result<()> {
    let mut csv = String::from("t,eps,estimate,stderr,bound\n");
    for &t in &args.t {
        for &eps in &args.eps {
            let (estimate, stderr) = match args.method {
                TailMode::Mc => {
                    let est = chi_square_lower_tail(t, eps, args.trials, args.seed)?;
                    (est.probability, est.stderr)
                }
                TailMode::ClosedForm => {
                    (chi_square_cdf_even(t, t as f64 / (1.0 + eps))?, 0.0)
                }
            };
            let bound = (-args.bound_c * eps * eps * t as f64).exp() / t as f64;
            csv.push_str(&format!("{t},{eps},{estimate},{stderr},{bound}\n"));
        }
    }
    match &args.out {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> Result<()> {
    let config = load_config(&args.config)?;
    let output = run_experiment(&config)?;
    std::fs::write(&config.output, &output.csv)?;
    std::fs::write(summary_path(&config), &output.summary)?;
    println!(
        "{}",
        json!({
            "output": config.output,
            "summary": summary_path(&config),
            "rows": output.csv.lines().count() - 1,
        })
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE_TOML: &str = r#"
output = "results.csv"
trials = 3
base_seed = 7

[instance]
family = "doubling"
n = 16
ddim = 1
seed = 2

[dimension]
t = [3, 5]

[[check]]
name = "contraction"
eps = 0.25

[[check]]
name = "relaxed-contraction"
eps = 0.25
alpha = 50.0
"#;

    #[test]
    fn toml_and_json_configs_generate_identical_output() {
        let from_toml = parse_config(BASE_TOML, false).unwrap();
        let json_text = serde_json::to_string(&from_toml).unwrap();
        let from_json = parse_config(&json_text, true).unwrap();
        let a = run_experiment(&from_toml).unwrap();
        let b = run_experiment(&from_json).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn experiment_output_is_identical_across_thread_counts() {
        let config = parse_config(BASE_TOML, false).unwrap();
        let run_with = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_experiment(&config).unwrap())
        };
        let single = run_with(1);
        let multi = run_with(4);
        assert_eq!(single, multi);
        assert_eq!(single, run_with(1), "reruns must also be byte-identical");
    }

    #[test]
    fn experiment_rows_sweep_checks_then_dimensions_then_seeds() {
        let config = parse_config(BASE_TOML, false).unwrap();
        let output = run_experiment(&config).unwrap();
        let lines: Vec<&str> = output.csv.lines().collect();
        assert_eq!(lines[0], RESULT_HEADER);
        // 2 checks x 2 dimensions x 3 trials
        assert_eq!(lines.len(), 1 + 12);
        let fields: Vec<Vec<&str>> = lines[1..].iter().map(|l| l.split(',').collect()).collect();
        for row in &fields {
            assert_eq!(row.len(), 8);
            assert_eq!(row[7], "0", "runtime must be zeroed by default");
        }
        // order: contraction t=3 seeds 7,8,9; t=5 seeds 7,8,9; then relaxed
        let key: Vec<(String, String, String)> = fields
            .iter()
            .map(|row| (row[0].to_string(), row[2].to_string(), row[1].to_string()))
            .collect();
        let mut expected = Vec::new();
        for name in ["contraction", "relaxed-contraction"] {
            for t in ["3", "5"] {
                for seed in ["7", "8", "9"] {
                    expected.push((name.to_string(), t.to_string(), seed.to_string()));
                }
            }
        }
        assert_eq!(key, expected);
        // alpha column filled only where the check reads it
        for row in &fields {
            if row[0] == "relaxed-contraction" {
                assert_eq!(row[4], "50");
            } else {
                assert_eq!(row[4], "");
            }
        }
    }

    #[test]
    fn identity_dimension_rows_all_pass() {
        // doubling n=16 ddim=1 lives in 4 ambient dimensions; t = 4 injects
        // the identity, so every contraction row must pass
        let mut config = parse_config(BASE_TOML, false).unwrap();
        config.dimension = DimensionChoice { t: Some(vec![4]), recipe: None };
        config.checks.truncate(1);
        let output = run_experiment(&config).unwrap();
        for line in output.csv.lines().skip(1) {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields[5], "true", "{line}");
            assert_eq!(fields[6], "1", "identity ratio must print as 1: {line}");
        }
        let summary: serde_json::Value = serde_json::from_str(&output.summary).unwrap();
        assert_eq!(summary["contraction"]["trials"], json!(3));
        assert_eq!(summary["contraction"]["successes"], json!(3));
        assert_eq!(summary["contraction"]["rate"], json!(1.0));
    }

    #[test]
    fn config_validation_rejects_bad_requests() {
        for (mangle, expect) in [
            ("trials = 3", "trials must"),
            ("name = \"contraction\"", "unknown check"),
            ("t = [3, 5]", "dimension needs"),
        ] {
            let broken = match mangle {
                "trials = 3" => BASE_TOML.replace("trials = 3", "trials = 0"),
                "name = \"contraction\"" => {
                    BASE_TOML.replace("name = \"contraction\"", "name = \"contractoin\"")
                }
                _ => BASE_TOML.replace("t = [3, 5]", ""),
            };
            let result = parse_config(&broken, false).and_then(|c| run_experiment(&c));
            let err = result.expect_err(mangle).to_string();
            assert!(err.contains(expect), "{mangle}: {err}");
        }

        // both a sweep and a recipe set at once
        let both = BASE_TOML.replace(
            "t = [3, 5]",
            "t = [3]\nrecipe = { variant = \"relaxed\", eps = 0.3, z = 1.0, ddim = 1.0, k = 2, alpha = 100.0 }",
        );
        let err = parse_config(&both, false).and_then(|c| run_experiment(&c));
        assert!(err.is_err());

        // unknown fields are rejected, not ignored
        let typo = BASE_TOML.replace("base_seed = 7", "base_seed = 7\nbse_seed = 8");
        assert!(parse_config(&typo, false).is_err());
    }

    #[test]
    fn recipe_dimension_resolves_to_single_t() {
        let choice = DimensionChoice {
            t: None,
            recipe: Some(DimensionRecipe {
                variant: crate::projection::RecipeVariant::CandidateMultiplicative,
                eps: 0.5,
                z: 1.0,
                ddim: 1.0,
                k: 1,
                n: None,
                s: Some(4),
                alpha: None,
                c_const: 1.0,
            }),
        };
        let resolved = choice.resolve().unwrap();
        assert_eq!(resolved.len(), 1);
        assert!(resolved[0] >= 1);
    }

    #[test]
    fn params_parser_round_trips_and_rejects_typos() {
        let spec = spec_from_params(
            "doubling",
            &["n=256".into(), "ddim=2".into(), "spread=1.5".into(), "seed=3".into()],
        )
        .unwrap();
        assert_eq!(spec.n, Some(256));
        assert_eq!(spec.ddim, Some(2));
        assert_eq!(spec.spread, Some(1.5));
        assert_eq!(spec.seed, Some(3));

        assert!(spec_from_params("basis", &["n".into()]).is_err());
        assert!(spec_from_params("basis", &["n=8".into(), "n=9".into()]).is_err());
        assert!(spec_from_params("basis", &["count=8".into()]).is_err());
        assert!(spec_from_params("basis", &["n=abc".into()]).is_err());
        // family/parameter mismatch surfaces at generation time
        let spec = spec_from_params("basis", &["ddim=2".into()]).unwrap();
        assert!(spec.generate().is_err());
    }

    #[test]
    fn preserve_sum_check_spec_wires_candidate_center() {
        let inst = crate::instances::gen_doubling(8, 1, 1.0, 5).unwrap();
        let spec = CheckSpec {
            name: "preserve-sum".into(),
            eps: 0.3,
            alpha: None,
            k: Some(3),
            center_index: Some(2),
            centers: None,
        };
        let check = spec.build(&inst).unwrap();
        let TrialCheck::PreserveSum { points, center, k, .. } = &check else {
            panic!("expected preserve-sum")
        };
        assert_eq!(points.len(), inst.p.len());
        assert_eq!(center, inst.q.point(2));
        assert_eq!(*k, 3);
        assert!(spec.row_alpha().is_none());

        let out_of_range = CheckSpec { center_index: Some(99), ..spec };
        assert!(out_of_range.build(&inst).is_err());
    }

    #[test]
    fn fixed_solution_spec_defaults_to_seeded_source_optimum() {
        let inst = crate::instances::gen_doubling(10, 1, 1.0, 6).unwrap();
        let spec = CheckSpec {
            name: "fixed-solution-expansion".into(),
            eps: 0.3,
            alpha: None,
            k: None,
            center_index: None,
            centers: None,
        };
        let TrialCheck::FixedSolutionExpansion { centers, partition, .. } =
            spec.build(&inst).unwrap()
        else {
            panic!("expected fixed-solution-expansion")
        };
        assert_eq!(centers.len(), inst.effective_k());
        assert_eq!(partition.len(), inst.p.len());
        // the default must equal the source optimum's assigned cost
        let best = opt_auto(&inst, 0x5EED).unwrap();
        let assigned =
            crate::clustering::cost_partition(&inst, &partition, &centers).unwrap();
        assert_eq!(assigned, best.value);
    }

    #[test]
    fn budget_exhausted_cells_are_rows_not_errors() {
        // preserve-sum over 24 points needs the continuous optimum over all
        // 2-part set partitions (2^23, past the enumeration budget), so every
        // cell's solver gives up — which must surface as failed NaN rows, not
        // as a run abort
        let toml = r#"
output = "results.csv"
trials = 2
base_seed = 1

[instance]
family = "doubling"
n = 24
ddim = 1
seed = 2

[dimension]
t = [3]

[[check]]
name = "preserve-sum"
eps = 0.3
"#;
        let config = parse_config(toml, false).unwrap();
        let output = run_experiment(&config).unwrap();
        let lines: Vec<&str> = output.csv.lines().collect();
        assert_eq!(lines.len(), 3);
        for line in &lines[1..] {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields[5], "false", "{line}");
            assert_eq!(fields[6], "NaN", "{line}");
        }
        let summary: serde_json::Value = serde_json::from_str(&output.summary).unwrap();
        assert_eq!(summary["preserve-sum"]["rate"], json!(0.0));
    }
}
