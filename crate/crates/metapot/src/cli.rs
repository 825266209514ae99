//! Command-line front end. Every command prints one JSON report on stdout
//! and exits 0 when all checks pass, 1 when a check fails and 2 on usage or
//! input errors. Options may also come from a TOML file given by
//! `--config`: top-level keys apply to every command, a table named after
//! the command overrides them, and flags override both.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ising::{self, barrier, test_objects, IsingModel, Lattice};
use crate::markov::{MarkovProcess, ProcessDocument};
use crate::montecarlo::{self, SimulationConfig, StopCondition};
use crate::potential;
use crate::report::{timed, Check, ExperimentReport};
use crate::verify::{self, Suite};
use crate::zrp::{self, ZrpModel};

#[derive(Debug, Parser)]
#[command(name = "metapot", version, about = "Capacities, variational principles and metastability experiments")]
pub struct Cli {
    /// TOML file with default options.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Side table in CSV.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Worker threads; all cores by default.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an invariant suite: core, potential, flows, variational, collapse or all.
    Verify(VerifyArgs),
    /// Capacity of two sets of a process file.
    Cap(CapArgs),
    /// Ising model on the K×L torus.
    Ising(IsingArgs),
    /// Zero-range process on the cycle.
    Zrp(ZrpArgs),
    /// Monte Carlo hitting times of a process file.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct VerifyArgs {
    pub suite: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct CapArgs {
    /// Process file, `{"states":[...], "rates":[[from,to,rate],...]}`.
    #[arg(long)]
    pub process: Option<PathBuf>,
    /// Comma-separated state labels.
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    /// Comma-separated routes: dirichlet, escape.
    #[arg(long)]
    pub routes: Option<String>,
    /// Also compute the capacity of the adjoint process.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub adjoint: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsingMode {
    Barrier,
    Structure,
    F0,
    Psi0,
    Exact,
    EkReport,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct IsingArgs {
    #[arg(long = "K", visible_alias = "k")]
    #[serde(rename = "K", alias = "k")]
    pub k: Option<usize>,
    #[arg(long = "L", visible_alias = "l")]
    #[serde(rename = "L", alias = "l")]
    pub l: Option<usize>,
    /// Comma-separated inverse temperatures.
    #[arg(long)]
    pub beta_grid: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<IsingMode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZrpMode {
    Capacity,
    Rates,
    Conditions,
    OrderMc,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct ZrpArgs {
    #[arg(long)]
    pub sites: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Comma-separated particle numbers.
    #[arg(long)]
    pub n_grid: Option<String>,
    /// Site-set pairs `A:B`, comma-separated, sites within a set joined by `+`.
    #[arg(long)]
    pub pairs: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<ZrpMode>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Valley changes simulated in order-mc mode.
    #[arg(long)]
    pub transitions: Option<usize>,
    #[arg(long)]
    pub max_events: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct SimulateArgs {
    #[arg(long)]
    pub process: Option<PathBuf>,
    /// Start label; the first state by default.
    #[arg(long)]
    pub start: Option<String>,
    /// Comma-separated labels of the target set.
    #[arg(long)]
    pub hit: Option<String>,
    #[arg(long)]
    pub reps: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_events: Option<u64>,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Malformed(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::UnknownState(_)
            | Error::OverlappingSets(_)
            | Error::EmptySet
            | Error::InvalidParameter(_)
            | Error::AlphaOutOfRange(_)
            | Error::NegativeRate { .. }
            | Error::DiagonalRate(_)
            | Error::NotIrreducible(_)
            | Error::DimensionOrder { .. }
            | Error::ValleysOverlap { .. }
            | Error::StateSpaceTooLarge { .. } => CliError::Usage(e.to_string()),
            other => CliError::Run(other),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Run(e.into())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Fills options missing on the command line from the config file: the
/// command's table first, then top-level keys.
fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&toml::Table>, section: &str) -> CliResult<T> {
    let mut merged = serde_json::to_value(flags).expect("args serialize");
    if let Some(table) = config {
        let sec = table.get(section).and_then(toml::Value::as_table);
        let obj = merged.as_object_mut().expect("args are structs");
        for (k, slot) in obj.iter_mut() {
            if !slot.is_null() {
                continue;
            }
            let found = sec.and_then(|t| t.get(k)).or_else(|| table.get(k).filter(|v| !v.is_table()));
            if let Some(v) = found {
                *slot = serde_json::to_value(v).map_err(|e| usage(format!("config key {k}: {e}")))?;
            }
        }
    }
    serde_json::from_value(merged).map_err(|e| usage(format!("config: {e}")))
}

fn read_config(path: &Path) -> CliResult<toml::Table> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    text.parse::<toml::Table>().map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|_| usage(format!("bad {what} `{t}`"))))
        .collect()
}

fn load_process(path: &Option<PathBuf>) -> CliResult<MarkovProcess> {
    let path = path.as_ref().ok_or_else(|| usage("--process is required"))?;
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let doc: ProcessDocument = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(MarkovProcess::from_document(&doc)?)
}

fn resolve(p: &MarkovProcess, labels: &Option<String>, flag: &str) -> CliResult<Vec<usize>> {
    let s = labels.as_ref().ok_or_else(|| usage(format!("--{flag} is required")))?;
    let out = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| p.index_of(t))
        .collect::<Result<Vec<usize>>>()?;
    if out.is_empty() {
        return Err(usage(format!("--{flag} is empty")));
    }
    Ok(out)
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let io = |e: csv::Error| CliError::Run(Error::Malformed(format!("csv: {e}")));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r.iter().map(|v| v.to_string())).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Run(e.into()))?;
    Ok(())
}

/// Runs a parsed command line and returns the report.
pub fn execute(cli: &Cli) -> CliResult<ExperimentReport> {
    let config = cli.config.as_deref().map(read_config).transpose()?;
    let threads = cli.threads.or_else(|| config.as_ref()?.get("threads")?.as_integer().map(|t| t as usize));
    let csv = cli.csv.clone().or_else(|| Some(PathBuf::from(config.as_ref()?.get("csv")?.as_str()?)));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| usage(format!("thread pool: {e}")))?;
    let cfg = config.as_ref();
    pool.install(|| match &cli.command {
        Command::Verify(a) => cmd_verify(&merge(a, cfg, "verify")?),
        Command::Cap(a) => cmd_cap(&merge(a, cfg, "cap")?),
        Command::Ising(a) => cmd_ising(&merge(a, cfg, "ising")?, csv.as_deref()),
        Command::Zrp(a) => cmd_zrp(&merge(a, cfg, "zrp")?, csv.as_deref()),
        Command::Simulate(a) => cmd_simulate(&merge(a, cfg, "simulate")?, csv.as_deref()),
    })
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult<ExperimentReport> {
    let name = args.suite.clone().unwrap_or_else(|| "all".into());
    let suites: Vec<Suite> = if name == "all" { Suite::ALL.to_vec() } else { vec![name.parse().map_err(CliError::from)?] };
    let seed = args.seed.unwrap_or(1);
    let trials = args.trials.unwrap_or(20);
    let mut report = ExperimentReport::new("verify", json!({"suite": name, "trials": trials}));
    report.seed = Some(seed);
    let mut results = serde_json::Map::new();
    for s in suites {
        let key = serde_json::to_value(s).expect("suite names").as_str().expect("string").to_string();
        let checks = timed(&mut report.timings, &key, || verify::run_suite(s, seed, trials))?;
        results.insert(key.clone(), json!({"checks": checks.len(), "failed": checks.iter().filter(|c| !c.passed).count()}));
        report.checks.extend(checks.into_iter().map(|mut c| {
            c.name = format!("{key}.{}", c.name);
            c
        }));
    }
    report.results = Value::Object(results);
    Ok(report)
}

pub fn cmd_cap(args: &CapArgs) -> CliResult<ExperimentReport> {
    let p = load_process(&args.process)?;
    let a = resolve(&p, &args.a, "a")?;
    let b = resolve(&p, &args.b, "b")?;
    potential::validate_sets(&p, &a, &b)?;
    let routes: Vec<String> = parse_list(args.routes.as_deref().unwrap_or("dirichlet,escape"), "route")?;
    let mut report = ExperimentReport::new(
        "cap",
        json!({"process": args.process, "A": args.a, "B": args.b, "routes": routes, "adjoint": args.adjoint.unwrap_or(false)}),
    );
    let mut values = serde_json::Map::new();
    let mut caps = Vec::new();
    for r in &routes {
        let c = match r.as_str() {
            "dirichlet" => potential::capacity(&p, &a, &b)?,
            "escape" => potential::capacity_via_escape(&p, &a, &b)?,
            other => return Err(usage(format!("unknown route `{other}`"))),
        };
        caps.push(c.value);
        values.insert(r.clone(), json!({"value": c.value, "residual": c.residual}));
    }
    if caps.len() > 1 {
        let lo = caps.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = caps.iter().copied().fold(0.0, f64::max);
        values.insert("crossRouteResidual".into(), json!((hi - lo) / hi));
        report.checks.push(Check::at_most("routes_agree", (hi - lo) / hi, 1e-10));
    }
    if args.adjoint.unwrap_or(false) {
        let cd = potential::capacity(&p.adjoint(), &a, &b)?.value;
        let c = caps.first().copied().unwrap_or(potential::capacity(&p, &a, &b)?.value);
        values.insert("adjoint".into(), json!(cd));
        report.checks.push(Check::at_most("adjoint_agrees", (cd - c).abs() / c, 1e-10));
    }
    report.results = Value::Object(values);
    Ok(report)
}

fn betas(grid: &Option<String>, default: &[f64]) -> CliResult<Vec<f64>> {
    match grid {
        Some(s) => parse_list(s, "beta"),
        None => Ok(default.to_vec()),
    }
}

fn decreasing_abs_dev(v: &[f64]) -> bool {
    let d: Vec<f64> = v.iter().map(|x| (x - 1.0).abs()).collect();
    zrp::limits::strictly_decreasing(&d)
}

pub fn cmd_ising(args: &IsingArgs, csv: Option<&Path>) -> CliResult<ExperimentReport> {
    let k = args.k.ok_or_else(|| usage("--K is required"))?;
    let l = args.l.ok_or_else(|| usage("--L is required"))?;
    let mode = args.mode.unwrap_or(IsingMode::Barrier);
    let mut report = ExperimentReport::new("ising", json!({"K": k, "L": l, "mode": mode, "betaGrid": args.beta_grid}));
    let mut t = std::mem::take(&mut report.timings);
    match mode {
        IsingMode::Barrier => {
            let lat = Lattice::new(k, l)?;
            let path = ising::canonical_path(&lat, 0, &vec![0; l]);
            let cap = match path {
                Ok(p) => p.iter().map(|&s| lat.energy(s)).max().unwrap_or(0),
                Err(_) => (2 * (k + l) + 2) as i64,
            };
            let gamma = timed(&mut t, "search", || {
                barrier::communication_height(&lat, lat.plus(), lat.minus(), cap, barrier::DEFAULT_BUDGET)
            })?;
            let mut res = json!({"Gamma": gamma, "expected": 2 * k + 2});
            if k * l <= 16 {
                let ex = timed(&mut t, "exhaustive", || barrier::communication_height_exhaustive(&lat, lat.plus(), lat.minus()))?;
                res["exhaustive"] = json!(ex);
                report.checks.push(Check::flag("search_equals_exhaustive", ex == gamma));
            }
            if IsingModel::new(k, l).map(|m| m.assumptions_ok).unwrap_or(false) {
                report.checks.push(Check::flag("gamma_is_2k_plus_2", gamma == 2 * k as i64 + 2));
            }
            report.results = res;
        }
        IsingMode::Structure | IsingMode::F0 | IsingMode::Psi0 | IsingMode::EkReport => {
            let model = IsingModel::new(k, l)?;
            let st = timed(&mut t, "structure", || ising::structure::typical_structure_default(&model))?;
            let c = st.constants;
            let mut res = json!({"constants": {"Gamma": c.gamma, "b": c.b, "e": c.e, "kappa": c.kappa}, "sizes": st.sizes()});
            let grid = betas(&args.beta_grid, &[4.0, 6.0, 8.0])?;
            match mode {
                IsingMode::Structure => {
                    res["checks"] = serde_json::to_value(&st.checks)?;
                    report.checks.push(Check::flag("set_identities", st.checks.all_hold()));
                }
                IsingMode::F0 => {
                    let f = test_objects::f0_checks(&st);
                    report.checks.push(Check::flag("f0_feasible", f.feasible));
                    report.checks.push(Check::flag("f0_in_unit_interval", f.in_unit_interval));
                    let rows = grid
                        .iter()
                        .map(|&b| Ok(json!({"beta": b, "scaledUpper": 2.0 * c.kappa * test_objects::scaled_dirichlet_f0(&st, b)?})))
                        .collect::<Result<Vec<Value>>>()?;
                    res["f0"] = serde_json::to_value(&f)?;
                    res["table"] = json!(rows);
                }
                IsingMode::Psi0 => {
                    let psi = ising::test_flow_psi0(&st);
                    let f = test_objects::flow_checks(&st, &psi);
                    report.checks.push(Check::at_most("psi0_off_ground_divergence", f.off_ground_max_div, 1e-12));
                    report.checks.push(Check::at_most("psi0_unit_out_of_minus", (f.minus_ground_div - 1.0).abs(), 1e-12));
                    report.checks.push(Check::flag("psi0_checks", f.passed));
                    let rows = grid
                        .iter()
                        .map(|&b| {
                            let n = test_objects::scaled_flow_norm(&st, &psi, b)?;
                            Ok(json!({"beta": b, "scaledFlow": n / (2.0 * c.kappa), "scaledLower": 2.0 * c.kappa / n}))
                        })
                        .collect::<Result<Vec<Value>>>()?;
                    res["psi0"] = serde_json::to_value(&f)?;
                    res["table"] = json!(rows);
                }
                _ => {
                    let psi = ising::test_flow_psi0(&st);
                    let rows = timed(&mut t, "limits", || ising::scaled_limits(&st, &psi, &grid))?;
                    let up: Vec<f64> = rows.iter().map(|r| r.scaled_upper).collect();
                    let fl: Vec<f64> = rows.iter().map(|r| r.scaled_flow).collect();
                    report.checks.push(Check::flag("upper_converging", decreasing_abs_dev(&up)));
                    report.checks.push(Check::flag("flow_converging", decreasing_abs_dev(&fl)));
                    if let (Some(u), Some(f)) = (up.last(), fl.last()) {
                        report.checks.push(Check::at_most("upper_last_deviation", (u - 1.0).abs(), 0.15));
                        report.checks.push(Check::at_most("flow_last_deviation", (f - 1.0).abs(), 0.15));
                    }
                    if let Some(path) = csv {
                        let table: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.beta, r.scaled_upper, r.scaled_lower]).collect();
                        write_csv(path, &["beta", "scaledUpper", "scaledLower"], &table)?;
                    }
                    res["table"] = serde_json::to_value(&rows)?;
                }
            }
            report.results = res;
        }
        IsingMode::Exact => {
            let grid = betas(&args.beta_grid, &[2.0, 3.0, 4.0])?;
            let r = timed(&mut t, "exact", || ising::exact_small_lattice(k, l, &grid))?;
            let routes = r.points.iter().map(|p| (p.capacity - p.capacity_escape).abs() / p.capacity).fold(0.0, f64::max);
            report.checks.push(Check::at_most("capacity_routes", routes, 1e-8));
            report.checks.push(Check::at_most("slope_vs_barrier", r.slope_rel_err, 0.10));
            report.results = serde_json::to_value(&r)?;
        }
    }
    report.timings = t;
    Ok(report)
}

fn parse_pairs(s: &str) -> CliResult<Vec<(Vec<usize>, Vec<usize>)>> {
    s.split(',')
        .map(|pair| {
            let (a, b) = pair.split_once(':').ok_or_else(|| usage(format!("pair `{pair}` needs A:B")))?;
            let sites = |t: &str| -> CliResult<Vec<usize>> {
                t.split('+').map(|x| x.trim().parse().map_err(|_| usage(format!("bad site `{x}`")))).collect()
            };
            Ok((sites(a)?, sites(b)?))
        })
        .collect()
}

pub fn cmd_zrp(args: &ZrpArgs, csv: Option<&Path>) -> CliResult<ExperimentReport> {
    let sites = args.sites.unwrap_or(3);
    let alpha = args.alpha.unwrap_or(2.0);
    let p = args.p.unwrap_or(0.7);
    let mode = args.mode.unwrap_or(ZrpMode::Capacity);
    let default_grid = match mode {
        ZrpMode::Rates => "12",
        ZrpMode::OrderMc => "20",
        _ => "10,20,30",
    };
    let grid: Vec<usize> = parse_list(args.n_grid.as_deref().unwrap_or(default_grid), "N")?;
    if grid.is_empty() {
        return Err(usage("--n-grid is empty"));
    }
    let mut report = ExperimentReport::new(
        "zrp",
        json!({"sites": sites, "alpha": alpha, "p": p, "nGrid": grid, "mode": mode, "pairs": args.pairs}),
    );
    let mut t = std::mem::take(&mut report.timings);
    match mode {
        ZrpMode::Capacity => {
            let pairs = parse_pairs(args.pairs.as_deref().unwrap_or("0:1"))?;
            let mut scans = Vec::new();
            let mut table = Vec::new();
            for (a, b) in &pairs {
                let s = timed(&mut t, "scan", || zrp::zrp_capacity_scan(sites, alpha, p, a, b, &grid))?;
                let tag = format!("{a:?}:{b:?}");
                report.checks.push(Check::flag(format!("rel_err_decreasing {tag}"), s.rel_err_decreasing));
                report.checks.push(Check::flag(format!("sector_sandwich {tag}"), s.sandwich_ok));
                for r in &s.rows {
                    table.push(vec![r.particles as f64, r.scaled_cap, r.cap_y, r.rel_err]);
                }
                scans.push(s);
            }
            let mass_ok = scans.first().is_some_and(|s| s.valley_mass_err_decreasing);
            report.checks.push(Check::flag("valley_mass_err_decreasing", mass_ok));
            if let Some(path) = csv {
                write_csv(path, &["N", "scaledCap", "capY", "relErr"], &table)?;
            }
            report.results = json!({"scans": scans});
        }
        ZrpMode::Rates => {
            let mut rows = Vec::new();
            for &n in &grid {
                let z = zrp::build_zrp(&ZrpModel::new(sites, n, alpha, p)?)?;
                let v = z.valleys()?;
                let m = timed(&mut t, &format!("rates{n}"), || zrp::mean_jump_rates(&z, &v))?;
                report.checks.push(Check::at_most(format!("holding_rate_identity N={n}"), m.e610_rel_err, 1e-8));
                report.checks.push(Check::at_most(format!("collapsed_ratio_identity N={n}"), m.e611_rel_err, 1e-8));
                if let Some(e) = m.reversible_formula_rel_err {
                    report.checks.push(Check::at_most(format!("reversible_formula N={n}"), e, 1e-8));
                }
                rows.push(json!({"N": n, "width": m.width, "r": m.r, "lambda": m.lambda,
                    "scaledRates": m.r.iter().map(|row| row.iter().map(|x| x * (n as f64).powf(1.0 + alpha)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "e610RelErr": m.e610_rel_err, "e611RelErr": m.e611_rel_err, "reversibleFormulaRelErr": m.reversible_formula_rel_err}));
            }
            let y = zrp::limit_chain(sites, alpha, p)?;
            report.results = json!({"rows": rows, "limit": y.summary()});
        }
        ZrpMode::Conditions => {
            let c = timed(&mut t, "conditions", || zrp::martingale_conditions(sites, alpha, p, &grid))?;
            report.checks.push(Check::flag("h0_decreasing", c.h0_decreasing));
            report.checks.push(Check::flag("h1_decreasing", c.h1_decreasing));
            report.checks.push(Check::flag("h2_decreasing", c.h2_decreasing));
            report.checks.push(Check::flag("h3_decreasing", c.h3_decreasing));
            report.results = serde_json::to_value(&c)?;
        }
        ZrpMode::OrderMc => {
            let seed = args.seed.unwrap_or(20_240_611);
            report.seed = Some(seed);
            let n = *grid.last().expect("non-empty");
            let model = ZrpModel::new(sites, n, alpha, p)?;
            let s = timed(&mut t, "simulation", || {
                zrp::order_chain_statistics(&model, args.transitions.unwrap_or(2000), seed, args.max_events.unwrap_or(2_000_000_000))
            })?;
            report.checks.push(Check::at_most("first_jump_within_3se", s.max_abs_z, 3.0));
            report.results = serde_json::to_value(&s)?;
        }
    }
    report.timings = t;
    Ok(report)
}

pub fn cmd_simulate(args: &SimulateArgs, csv: Option<&Path>) -> CliResult<ExperimentReport> {
    let p = load_process(&args.process)?;
    let hit = resolve(&p, &args.hit, "hit")?;
    let start = match &args.start {
        Some(s) => p.index_of(s)?,
        None => 0,
    };
    let reps = args.reps.unwrap_or(10_000);
    let seed = args.seed.unwrap_or(1);
    let max_events = args.max_events.unwrap_or(100_000_000);
    let mut report = ExperimentReport::new(
        "simulate",
        json!({"process": args.process, "start": p.label(start), "hit": args.hit, "reps": reps}),
    );
    report.seed = Some(seed);
    let mut t = std::mem::take(&mut report.timings);
    let est = timed(&mut t, "simulation", || montecarlo::estimate_hitting_time(&p, &[(start, 1.0)], &hit, reps, seed, max_events))?;
    let exact = potential::mean_hitting_time(&p, start, &hit)?;
    let z = if est.stderr > 0.0 { (est.mean - exact).abs() / est.stderr } else if est.mean == exact { 0.0 } else { f64::INFINITY };
    report.checks.push(Check::at_most("mean_within_3se", z, 3.0));
    if let Some(path) = csv {
        let cfg = SimulationConfig { seed, max_events, stop: StopCondition::Hit(hit.clone()) };
        let traj = montecarlo::simulate(&p, start, &cfg)?;
        let file = fs::File::create(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        traj.write_csv(&p, file)?;
    }
    report.results = json!({"mean": est.mean, "stderr": est.stderr, "exact": exact, "z": z});
    report.timings = t;
    Ok(report)
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{}", report.to_json());
            for c in report.failed() {
                eprintln!("check failed: {} = {} (tolerance {})", c.name, c.value, c.tolerance);
            }
            ExitCode::from(if report.passed() { 0 } else { 1 })
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
