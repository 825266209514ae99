//! Invariant suites over the default corpus and random chains. Each suite
//! reports the worst value of every check across its instances.

use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::collapse;
use crate::corpus;
use crate::error::{Error, Result};
use crate::flows::{self, EdgeSet, FlowKind, UnitFlowKind};
use crate::markov::MarkovProcess;
use crate::potential::{self, Variant};
use crate::report::Check;
use crate::rng::Stream;
use crate::variational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Core,
    Potential,
    Flows,
    Variational,
    Collapse,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Core, Suite::Potential, Suite::Flows, Suite::Variational, Suite::Collapse];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "core" => Ok(Suite::Core),
            "potential" => Ok(Suite::Potential),
            "flows" => Ok(Suite::Flows),
            "variational" => Ok(Suite::Variational),
            "collapse" => Ok(Suite::Collapse),
            other => Err(Error::InvalidParameter(format!("unknown suite `{other}`"))),
        }
    }
}

/// Worst-case accumulator: keeps the largest value of each `at_most` check
/// and the smallest of each margin.
#[derive(Default)]
struct Worst(Vec<(Check, bool)>);

impl Worst {
    fn upper(&mut self, name: &str, value: f64, tol: f64) {
        self.push(Check::at_most(name, value, tol), true);
    }

    fn lower(&mut self, name: &str, value: f64, tol: f64) {
        self.push(Check::margin(name, value, tol), false);
    }

    fn flag(&mut self, name: &str, ok: bool) {
        self.push(Check::flag(name, ok), false);
    }

    fn push(&mut self, c: Check, upper: bool) {
        match self.0.iter_mut().find(|e| e.0.name == c.name) {
            Some((old, _)) => {
                let worse = if upper { !(c.value <= old.value) } else { !(c.value >= old.value) };
                if worse {
                    *old = c;
                }
            }
            None => self.0.push((c, upper)),
        }
    }

    fn into_checks(self) -> Vec<Check> {
        self.0.into_iter().map(|e| e.0).collect()
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

type Instance = (String, MarkovProcess, Vec<usize>, Vec<usize>);

/// Corpus chains with a fixed target pair plus `trials` random instances on
/// at most 12 states.
fn instances(trials: usize, seed: u64) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for (name, p) in corpus::default_corpus()? {
        let n = p.n();
        out.push((name, p, vec![0], vec![n / 2]));
    }
    for t in 0..trials {
        let mut rng = Stream::derived(seed, t as u64);
        let (p, a, b) = corpus::random_instance(3, 12, &mut rng)?;
        out.push((format!("random#{t}"), p, a, b));
    }
    Ok(out)
}

fn random_function(n: usize, rng: &mut Stream) -> Vec<f64> {
    (0..n).map(|_| rng.range(-1.0, 1.0)).collect()
}

pub fn run_suite(suite: Suite, seed: u64, trials: usize) -> Result<Vec<Check>> {
    let mut w = Worst::default();
    let cases = instances(trials, seed)?;
    for (i, (_, p, a, b)) in cases.iter().enumerate() {
        let mut rng = Stream::derived(seed ^ 0x9e37_79b9, i as u64);
        match suite {
            Suite::Core => core_checks(&mut w, p, &mut rng)?,
            Suite::Potential => potential_checks(&mut w, p, a, b)?,
            Suite::Flows => flow_checks(&mut w, p, a, b, &mut rng)?,
            Suite::Variational => {
                for c in variational::verify_principles(p, a, b, trials.max(1), seed.wrapping_add(i as u64))? {
                    w.lower(&format!("{}_margin", c.principle), c.worst_margin, 1e-9);
                    w.upper(&format!("{}_optimizer", c.principle), c.optimizer_residual, 1e-9);
                }
            }
            Suite::Collapse => collapse_checks(&mut w, p, &mut rng, trials.max(1), seed.wrapping_add(i as u64))?,
        }
    }
    Ok(w.into_checks())
}

fn core_checks(w: &mut Worst, p: &MarkovProcess, rng: &mut Stream) -> Result<()> {
    let scale = (0..p.n()).map(|x| p.mu(x) * p.holding_rate(x)).fold(0.0, f64::max);
    w.upper("stationarity_residual", p.stationarity_residual() / scale, 1e-12);
    let adj = p.adjoint();
    w.upper("adjoint_stationarity_residual", adj.stationarity_residual() / scale, 1e-12);
    let back = adj.adjoint();
    let drift = p
        .rate_triplets()
        .iter()
        .map(|&(x, y, r)| rel(r, back.rate(x, y)))
        .fold(0.0, f64::max);
    w.upper("adjoint_involution", drift, 1e-12);
    let f = random_function(p.n(), rng);
    let g = random_function(p.n(), rng);
    w.upper("dirichlet_form_routes", rel(p.dirichlet_form(&f), p.dirichlet_form_via_generator(&f)), 1e-10);
    let sym = p.symmetrize();
    w.upper("symmetrized_form", rel(p.dirichlet_form(&f), sym.dirichlet_form(&f)), 1e-10);
    let cross = p.dirichlet_bilinear(&f, &g) - adj.dirichlet_bilinear(&g, &f);
    w.upper("adjoint_duality", cross.abs() / p.dirichlet_form(&f).max(p.dirichlet_form(&g)), 1e-10);
    w.upper("constant_energy", p.dirichlet_form(&vec![1.0; p.n()]), 1e-14);
    let emb = p.embedded_chain();
    let row_err = (0..p.n())
        .map(|x| (emb.jump_probs(x).iter().map(|e| e.1).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    w.upper("embedded_rows", row_err, 1e-14);
    let doc = MarkovProcess::from_document(&p.to_document())?;
    w.flag("document_round_trip", doc.rate_triplets() == p.rate_triplets());
    Ok(())
}

fn potential_checks(w: &mut Worst, p: &MarkovProcess, a: &[usize], b: &[usize]) -> Result<()> {
    let cap = potential::capacity(p, a, b)?.value;
    let esc = potential::capacity_via_escape(p, a, b)?.value;
    w.upper("capacity_routes", rel(cap, esc), 1e-10);
    let cap_adj = potential::capacity(&p.adjoint(), a, b)?.value;
    w.upper("capacity_adjoint", rel(cap, cap_adj), 1e-10);
    let cap_ba = potential::capacity(p, b, a)?.value;
    w.upper("capacity_symmetry", rel(cap, cap_ba), 1e-10);
    let free: Vec<usize> = (0..p.n()).filter(|x| !a.contains(x) && !b.contains(x)).collect();
    if let Some(&x) = free.first() {
        let mut a2 = a.to_vec();
        a2.push(x);
        let bigger = potential::capacity(p, &a2, b)?.value;
        w.lower("capacity_monotone", (bigger - cap) / cap, 1e-12);
        let (_, ok) = potential::potential_bound(p, x, a, b)?;
        w.flag("potential_bound", ok);
    }
    let direct = potential::hitting_times_direct(p, b)?;
    for &z in a {
        let e = potential::mean_hitting_time(p, z, b)?;
        w.upper("mean_hitting_routes", rel(e, direct[z]), 1e-10);
    }
    let h = potential::equilibrium_potential(p, a, b, Variant::Plain)?;
    let range = h.iter().fold(0.0f64, |m, &v| m.max((v - v.clamp(0.0, 1.0)).abs()));
    w.upper("potential_in_unit_interval", range, 1e-12);
    Ok(())
}

fn flow_checks(w: &mut Worst, p: &MarkovProcess, a: &[usize], b: &[usize], rng: &mut Stream) -> Result<()> {
    let edges = Arc::new(EdgeSet::of(p));
    let cap = potential::capacity(p, a, b)?.value;
    let mut kinds = vec![UnitFlowKind::Phi, UnitFlowKind::PhiStar];
    if p.is_reversible(1e-10) {
        kinds.push(UnitFlowKind::Psi);
        let psi = flows::unit_flow(p, a, b, UnitFlowKind::Psi)?;
        w.upper("unit_psi_norm", rel(psi.norm_sq(), 1.0 / cap), 1e-10);
    }
    for kind in kinds {
        let phi = flows::unit_flow(p, a, b, kind)?;
        w.upper("unit_flow_defect", flows::unit_flow_defect(&phi, a, b, 1.0), 1e-10);
    }
    let f = random_function(p.n(), rng);
    let psi = flows::flow_on(&edges, &f, FlowKind::Psi);
    w.upper("psi_norm_is_energy", rel(psi.norm_sq(), p.dirichlet_form(&f)), 1e-10);
    let lf = p.apply_generator(&f);
    let d = flows::flow_on(&edges, &f, FlowKind::PhiStar).divergences();
    let scale = lf.iter().zip(0..).map(|(v, x)| (p.mu(x) * v).abs()).fold(1e-300, f64::max);
    let err = (0..p.n()).map(|x| (d[x] - p.mu(x) * lf[x]).abs()).fold(0.0, f64::max) / scale;
    w.upper("phi_star_divergence", err, 1e-12);
    let phi = flows::flow_on(&edges, &f, FlowKind::Phi);
    let star = flows::flow_on(&edges, &f, FlowKind::PhiStar);
    let mean = phi.plus(&star).scaled(0.5).minus(&psi);
    w.upper("psi_is_mean", mean.norm_sq().sqrt() / psi.norm_sq().sqrt().max(1e-300), 1e-12);
    Ok(())
}

fn collapse_checks(w: &mut Worst, p: &MarkovProcess, rng: &mut Stream, trials: usize, seed: u64) -> Result<()> {
    let n = p.n();
    if n < 4 {
        return Ok(());
    }
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.index(i + 1));
    }
    let k = 2 + rng.index(n - 3);
    let e = &order[..k];
    let a = &order[k..k + 1];
    let r = collapse::verify_collapse_identities(p, e, a, trials, seed, None)?;
    w.upper("collapsed_capacity", r.cap_rel_err, 1e-10);
    w.upper("flow_contraction", r.max_norm_ratio - 1.0, 1e-12);
    w.upper("flow_equality", r.equality_rel_err, 1e-12);
    w.upper("dirichlet_preserved", r.dirichlet_rel_err, 1e-11);
    w.upper("bilinear_preserved", r.bilinear_rel_err, 1e-11);
    w.upper("divergence_preserved", r.divergence_err, 1e-12);
    w.flag("collapse_passed", r.passed);
    Ok(())
}
