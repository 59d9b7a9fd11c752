//! `infodiff` command-line front end.
//!
//! Exit codes: 0 success, 1 runtime or solver failure, 2 input error.
//! Every subcommand writes its outputs plus a `manifest.json` into
//! `--out-dir`. Configuration precedence is flag > config file > default.

mod manifest;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::calibrate::{self, FitOptions, SearchSpace};
use crate::events::{empirical_density, DensitySurface, VoteTable};
use crate::exec::Execution;
use crate::graph::{self, SocialGraph};
use crate::pde::{self, DLParams, GrowthRate, SolverConfig};
use crate::spline::{self, InitialDensity};
use crate::synth::{self, GraphKind, SimConfig};

pub use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "infodiff", version, about = "Diffusive logistic modelling of information spread")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Empirical density surface of one story.
    Density(DensityArgs),
    /// Build the initial profile from an observed hour and solve forward.
    Predict(PredictArgs),
    /// Fit model parameters to an observed surface.
    Fit(FitArgs),
    /// Score predictions against observations.
    Evaluate(EvaluateArgs),
    /// Simulate a vote cascade on a follow graph.
    Simulate(SimulateArgs),
    /// Generate a synthetic follow graph.
    GenGraph(GenGraphArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricArg {
    Hops,
    Interest,
}

#[derive(Debug, Args, Serialize)]
pub struct DensityArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub votes: PathBuf,
    #[arg(long)]
    pub story: String,
    #[arg(long, value_enum, default_value = "hops")]
    pub metric: MetricArg,
    #[arg(long, default_value_t = 6)]
    pub max_distance: u32,
    /// Bucket count for the interest metric.
    #[arg(long, default_value_t = 5)]
    pub buckets: u32,
    #[arg(long, default_value_t = 50)]
    pub horizon: u32,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub density: PathBuf,
    /// TOML or JSON: d, K, r = {a, b, c}, optional l, L, dx, dt, t_end.
    #[arg(long)]
    pub params: PathBuf,
    /// Observed hour whose slice becomes the initial profile (model hour 1).
    #[arg(long, default_value_t = 1)]
    pub train_t: u32,
    #[arg(long)]
    pub t_end: Option<u32>,
    #[arg(long)]
    pub dx: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = spline::DEFAULT_ADMISSIBILITY_STEP)]
    pub admissibility_step: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    #[arg(long)]
    pub density: PathBuf,
    /// TOML or JSON with `[lo, hi]` pairs for d, K, a, b, c.
    #[arg(long)]
    pub bounds: PathBuf,
    /// Objective hours, e.g. `2-6` or `2,4,6`. Defaults to 2..=horizon.
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub train_t: u32,
    #[arg(long)]
    pub dx: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 500)]
    pub max_evals: usize,
    #[arg(long, default_value_t = 3)]
    pub restarts: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Skip the final Levenberg-Marquardt refinement.
    #[arg(long)]
    pub no_polish: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub predicted: PathBuf,
    #[arg(long)]
    pub observed: PathBuf,
    /// Distances to score, e.g. `1-6`. Defaults to all observed distances.
    #[arg(long)]
    pub distances: Option<String>,
    #[arg(long, default_value = "2-6")]
    pub times: String,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// Follow graph CSV; if omitted the config's `[graph]` section is used.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Defaults to the most-followed user (ties: smallest id).
    #[arg(long)]
    pub initiator: Option<String>,
    #[arg(long, default_value = "s1")]
    pub story: String,
    #[arg(long)]
    pub p_follow: Option<f64>,
    #[arg(long)]
    pub q_random: Option<f64>,
    #[arg(long)]
    pub t_promote: Option<u32>,
    #[arg(long)]
    pub horizon: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Chain,
    Star,
    WattsStrogatz,
    BarabasiAlbert,
}

#[derive(Debug, Args, Serialize)]
pub struct GenGraphArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long)]
    pub n: usize,
    /// Watts-Strogatz neighbourhood size.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Watts-Strogatz rewiring probability.
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
    /// Barabasi-Albert follows per new user.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

/// Failure classified by exit code.
#[derive(Debug)]
pub enum CliError {
    Input(anyhow::Error),
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(e) => write!(f, "input error: {e:#}"),
            CliError::Runtime(e) => write!(f, "error: {e:#}"),
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.into())
        } else {
            CliError::Runtime(e.into())
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

trait InputContext<T> {
    fn input(self, what: impl FnOnce() -> String) -> CliResult<T>;
}

impl<T, E: Into<anyhow::Error>> InputContext<T> for std::result::Result<T, E> {
    fn input(self, what: impl FnOnce() -> String) -> CliResult<T> {
        self.map_err(|e| CliError::Input(e.into().context(what())))
    }
}

fn runtime<E: Into<anyhow::Error>>(e: E) -> CliError {
    CliError::Runtime(e.into())
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .input(|| format!("cannot open {}", path.display()))
}

/// TOML unless the extension is `.json`.
fn read_config<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).input(|| format!("cannot read {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).input(|| format!("invalid JSON in {}", path.display()))
    } else {
        toml::from_str(&text).input(|| format!("invalid TOML in {}", path.display()))
    }
}

/// Parses `2-6`, `1,3,5` or a mix like `1,3-5`.
pub fn parse_list(spec: &str) -> anyhow::Result<Vec<u32>> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u32, u32) = (a.trim().parse()?, b.trim().parse()?);
                if a > b {
                    return Err(anyhow!("empty range `{part}`"));
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse()?),
        }
    }
    if out.is_empty() {
        return Err(anyhow!("empty list `{spec}`"));
    }
    Ok(out)
}

/// Collects output files and writes the manifest at the end.
struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Outputs {
    fn new(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create {}", dir.display()))
            .map_err(runtime)?;
        Ok(Outputs {
            dir: dir.to_owned(),
            written: Vec::new(),
        })
    }

    fn write(
        &mut self,
        name: &str,
        f: impl FnOnce(&mut BufWriter<File>) -> anyhow::Result<()>,
    ) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        let file = File::create(&path)
            .with_context(|| format!("cannot create {}", path.display()))
            .map_err(runtime)?;
        let mut w = BufWriter::new(file);
        f(&mut w).map_err(runtime)?;
        w.flush().map_err(runtime)?;
        self.written.push(path.clone());
        Ok(path)
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<PathBuf> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }

    fn finish<C: Serialize>(self, subcommand: &str, config: &C, inputs: &[&Path]) -> CliResult<()> {
        let m = RunManifest::new(subcommand, config, inputs, &self.written).map_err(runtime)?;
        let path = self.dir.join("manifest.json");
        m.write(&path).map_err(runtime)
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Density(a) => cmd_density(&a),
        Command::Predict(a) => cmd_predict(&a),
        Command::Fit(a) => cmd_fit(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::GenGraph(a) => cmd_gen_graph(&a),
    }
}

fn read_graph(path: &Path) -> CliResult<SocialGraph> {
    let (g, stats) =
        SocialGraph::read_csv(open(path)?).input(|| format!("reading graph {}", path.display()))?;
    log::info!(
        "graph {}: {} users, {} edges ({} self-loops, {} duplicates dropped)",
        path.display(),
        g.len(),
        g.edge_count(),
        stats.self_loops,
        stats.duplicates
    );
    Ok(g)
}

fn read_surface(path: &Path) -> CliResult<DensitySurface> {
    DensitySurface::read_csv(open(path)?).input(|| format!("reading density {}", path.display()))
}

pub fn cmd_density(a: &DensityArgs) -> CliResult<()> {
    let graph = read_graph(&a.graph)?;
    let table = VoteTable::read_csv(open(&a.votes)?)
        .input(|| format!("reading votes {}", a.votes.display()))?;
    let (log, dropped) = table.story(&a.story).input(|| "selecting story".into())?;
    let partition = match a.metric {
        MetricArg::Hops => graph::partition_by_hops(&graph, log.initiator(), a.max_distance)?,
        MetricArg::Interest => graph::partition_by_interest(
            &table.histories(),
            log.initiator(),
            a.buckets,
            Execution::default(),
        )?,
    };
    let (surface, diag) = empirical_density(&log, &partition, a.horizon)?;
    let sizes = graph::partition_sizes(&partition);

    #[derive(Serialize)]
    struct Diagnostics<'a> {
        story: &'a str,
        initiator: &'a str,
        duplicate_votes_dropped: usize,
        #[serde(flatten)]
        density: &'a crate::events::DensityDiagnostics,
    }
    let mut out = Outputs::new(&a.out_dir)?;
    out.write("density.csv", |w| Ok(surface.write_csv(w)?))?;
    out.write("partition_sizes.csv", |w| Ok(graph::write_sizes_csv(&sizes, w)?))?;
    out.json(
        "diagnostics.json",
        &Diagnostics {
            story: &a.story,
            initiator: log.initiator(),
            duplicate_votes_dropped: dropped,
            density: &diag,
        },
    )?;
    out.finish("density", a, &[&a.graph, &a.votes])
}

/// Model parameter file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamsFile {
    pub d: f64,
    #[serde(rename = "K")]
    pub capacity: f64,
    pub r: GrowthRate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<u32>,
}

/// Initial profile from the `train_t` column, restricted to `[l, L]` when given.
fn initial_profile(
    surface: &DensitySurface,
    train_t: u32,
    bounds: (Option<f64>, Option<f64>),
) -> CliResult<InitialDensity> {
    let slice = surface
        .slice_at(train_t)
        .input(|| format!("density file has no t{train_t} column"))?;
    let (lo, hi) = (bounds.0.unwrap_or(f64::MIN), bounds.1.unwrap_or(f64::MAX));
    let samples: Vec<(f64, f64)> = slice
        .iter()
        .map(|(&x, &v)| (x as f64, v))
        .filter(|(x, _)| *x >= lo && *x <= hi)
        .collect();
    let phi = InitialDensity::build(&samples).input(|| "building the initial profile".into())?;
    if bounds.0.is_some_and(|l| l != phi.lower()) || bounds.1.is_some_and(|u| u != phi.upper()) {
        return Err(CliError::Input(anyhow!(
            "observed distances span [{}, {}], which does not match the requested domain",
            phi.lower(),
            phi.upper()
        )));
    }
    Ok(phi)
}

pub fn cmd_predict(a: &PredictArgs) -> CliResult<()> {
    let surface = read_surface(&a.density)?;
    let pf: ParamsFile = read_config(&a.params)?;
    let phi = initial_profile(&surface, a.train_t, (pf.l, pf.upper))?;
    let params = DLParams::new(pf.d, pf.r, pf.capacity, phi.lower(), phi.upper())
        .input(|| format!("invalid parameters in {}", a.params.display()))?;
    let config = SolverConfig {
        dx: a.dx.or(pf.dx).unwrap_or(pde::DEFAULT_DX),
        dt: a.dt.or(pf.dt).unwrap_or(pde::DEFAULT_DT),
        t_end: a.t_end.or(pf.t_end).unwrap_or(6),
    };
    let admissibility = spline::check_lower_solution(&phi, &params, a.admissibility_step)?;
    if !admissibility.passed {
        log::warn!(
            "initial profile is not a lower solution (min residual {:.3e} at x = {:.3}); \
             monotonicity is not guaranteed",
            admissibility.min_residual,
            admissibility.min_residual_at
        );
    }
    let solution = pde::solve(&params, &phi, &config)?;
    let properties = pde::verify_properties(&solution, admissibility.passed);
    let sampled = solution.to_surface()?;

    #[derive(Serialize)]
    struct Resolved<'a> {
        args: &'a PredictArgs,
        params: DLParams,
        solver: SolverConfig,
    }
    let mut out = Outputs::new(&a.out_dir)?;
    out.write("solution.csv", |w| Ok(sampled.write_csv(w)?))?;
    out.write("solution_grid.csv", |w| Ok(solution.write_grid_csv(w)?))?;
    out.json("initial_density.json", &phi)?;
    out.json("admissibility.json", &admissibility)?;
    out.json("properties.json", &properties)?;
    out.finish(
        "predict",
        &Resolved { args: a, params, solver: config },
        &[&a.density, &a.params],
    )
}

pub fn cmd_fit(a: &FitArgs) -> CliResult<()> {
    let surface = read_surface(&a.density)?;
    let space: SearchSpace = read_config(&a.bounds)?;
    space.validate().input(|| "invalid bounds".into())?;
    let phi = initial_profile(&surface, a.train_t, (None, None))?;
    let window = a
        .window
        .as_deref()
        .map(parse_list)
        .transpose()
        .input(|| "invalid --window".into())?;
    let options = FitOptions {
        dx: a.dx.unwrap_or(pde::DEFAULT_DX),
        dt: a.dt.unwrap_or(pde::DEFAULT_DT),
        window,
        max_evaluations: a.max_evals,
        restarts: a.restarts,
        seed: a.seed,
        start: None,
        polish: !a.no_polish,
        exec: Execution::default(),
    };
    let result = calibrate::fit(&surface, &phi, &space, &options)?;
    let fitted = ParamsFile {
        d: result.params.diffusion,
        capacity: result.params.capacity,
        r: result.params.growth,
        l: Some(result.params.lower),
        upper: Some(result.params.upper),
        dx: Some(options.dx),
        dt: Some(options.dt),
        t_end: Some(surface.horizon()),
    };

    #[derive(Serialize)]
    struct Resolved<'a> {
        args: &'a FitArgs,
        bounds: SearchSpace,
        options: &'a FitOptions,
    }
    let mut out = Outputs::new(&a.out_dir)?;
    out.write("fitted_params.toml", |w| {
        w.write_all(toml::to_string(&fitted)?.as_bytes())?;
        Ok(())
    })?;
    out.json("fit_diagnostics.json", &result)?;
    out.finish(
        "fit",
        &Resolved { args: a, bounds: space, options: &options },
        &[&a.density, &a.bounds],
    )
}

pub fn cmd_evaluate(a: &EvaluateArgs) -> CliResult<()> {
    let predicted = read_surface(&a.predicted)?;
    let observed = read_surface(&a.observed)?;
    let distances = match &a.distances {
        Some(s) => parse_list(s).input(|| "invalid --distances".into())?,
        None => observed.distances().to_vec(),
    };
    let times = parse_list(&a.times).input(|| "invalid --times".into())?;
    let report = calibrate::evaluate(&predicted, &observed, &distances, &times);
    let table = report.render_table();
    print!("{table}");

    let mut out = Outputs::new(&a.out_dir)?;
    out.write("report.txt", |w| Ok(w.write_all(table.as_bytes())?))?;
    out.write("report.csv", |w| Ok(report.write_csv(w)?))?;
    out.json("report.json", &report)?;
    out.finish("evaluate", a, &[&a.predicted, &a.observed])
}

/// Simulation config file: [`SimConfig`] fields plus an optional graph spec.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SimulateFile {
    pub p_follow: Option<f64>,
    pub t_promote: Option<u32>,
    pub q_random: Option<f64>,
    pub horizon: Option<u32>,
    pub seed: Option<u64>,
    pub graph: Option<GraphSpec>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GraphSpec {
    #[serde(flatten)]
    pub kind: GraphKind,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_initiator(g: &SocialGraph) -> Option<&str> {
    (0..g.len())
        .map(|i| (g.followers_idx(i).len(), g.id(i)))
        .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(a.1)))
        .map(|(_, id)| id)
}

pub fn cmd_simulate(a: &SimulateArgs) -> CliResult<()> {
    let file: SimulateFile = match &a.config {
        Some(p) => read_config(p)?,
        None => SimulateFile::default(),
    };
    let defaults = SimConfig::default();
    let config = SimConfig {
        p_follow: a.p_follow.or(file.p_follow).unwrap_or(defaults.p_follow),
        t_promote: a.t_promote.or(file.t_promote).unwrap_or(defaults.t_promote),
        q_random: a.q_random.or(file.q_random).unwrap_or(defaults.q_random),
        horizon: a.horizon.or(file.horizon).unwrap_or(defaults.horizon),
        seed: a.seed.or(file.seed).unwrap_or(defaults.seed),
    };
    config.validate().input(|| "invalid simulation config".into())?;
    let mut inputs: Vec<&Path> = a.config.iter().map(PathBuf::as_path).collect();
    let graph = match (&a.graph, &file.graph) {
        (Some(p), _) => {
            inputs.push(p);
            read_graph(p)?
        }
        (None, Some(spec)) => synth::generate_graph(&spec.kind, spec.n, spec.seed)?,
        (None, None) => {
            return Err(CliError::Input(anyhow!(
                "either --graph or a [graph] section in --config is required"
            )))
        }
    };
    let initiator = match &a.initiator {
        Some(i) => i.clone(),
        None => default_initiator(&graph)
            .ok_or_else(|| CliError::Input(anyhow!("graph is empty")))?
            .to_owned(),
    };
    let log = synth::generate_cascade(&graph, &config, &initiator, &a.story)?;

    #[derive(Serialize)]
    struct Resolved<'a> {
        args: &'a SimulateArgs,
        config: SimConfig,
        initiator: &'a str,
        graph: Option<GraphSpec>,
    }
    let mut out = Outputs::new(&a.out_dir)?;
    if a.graph.is_none() {
        out.write("graph.csv", |w| Ok(graph.write_csv(w)?))?;
    }
    out.write("votes.csv", |w| {
        Ok(crate::events::write_votes_csv(std::slice::from_ref(&log), w)?)
    })?;
    out.finish(
        "simulate",
        &Resolved { args: a, config, initiator: &initiator, graph: file.graph },
        &inputs,
    )
}

pub fn cmd_gen_graph(a: &GenGraphArgs) -> CliResult<()> {
    let kind = match a.kind {
        KindArg::Chain => GraphKind::Chain,
        KindArg::Star => GraphKind::Star,
        KindArg::WattsStrogatz => GraphKind::WattsStrogatz { k: a.k, beta: a.beta },
        KindArg::BarabasiAlbert => GraphKind::BarabasiAlbert { m: a.m },
    };
    let graph = synth::generate_graph(&kind, a.n, a.seed)?;
    let mut out = Outputs::new(&a.out_dir)?;
    out.write("graph.csv", |w| Ok(graph.write_csv(w)?))?;
    out.finish("gen-graph", a, &[])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_parsing() {
        assert_eq!(parse_list("2-6").unwrap(), vec![2, 3, 4, 5, 6]);
        assert_eq!(parse_list("1, 3-4,9").unwrap(), vec![1, 3, 4, 9]);
        assert!(parse_list("").is_err());
        assert!(parse_list("5-2").is_err());
        assert!(parse_list("x").is_err());
    }

    #[test]
    fn params_file_formats() {
        let toml_text = "d = 0.01\nK = 25\nr = { a = 1.4, b = 1.5, c = 0.25 }\n";
        let p: ParamsFile = toml::from_str(toml_text).unwrap();
        assert_eq!(p.capacity, 25.0);
        assert_eq!(p.r.a, 1.4);
        let json = r#"{"d":0.05,"K":60,"r":{"a":1.6,"b":1.0,"c":0.1},"l":1,"L":5,"dt":0.001}"#;
        let p: ParamsFile = serde_json::from_str(json).unwrap();
        assert_eq!((p.l, p.upper, p.dt), (Some(1.0), Some(5.0), Some(0.001)));
    }

    #[test]
    fn default_initiator_prefers_most_followed() {
        let g = synth::generate_graph(&GraphKind::Star, 5, 0).unwrap();
        assert_eq!(default_initiator(&g), Some("u0"));
        let g = synth::generate_graph(&GraphKind::Chain, 5, 0).unwrap();
        assert_eq!(default_initiator(&g), Some("u0"));
    }

    #[test]
    fn sim_file_with_graph_section() {
        let text = "p_follow = 0.3\n[graph]\nkind = \"watts-strogatz\"\nk = 4\nbeta = 0.1\nn = 50\nseed = 3\n";
        let f: SimulateFile = toml::from_str(text).unwrap();
        let spec = f.graph.unwrap();
        assert_eq!(spec.n, 50);
        assert!(matches!(spec.kind, GraphKind::WattsStrogatz { k: 4, .. }));
    }
}
