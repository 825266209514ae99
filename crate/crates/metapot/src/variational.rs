//! Dirichlet and Thomson principles, their non-reversible and generalized
//! forms, the optimizers attaining them, sector constants and the
//! symmetrized-capacity sandwich.
//!
//! Dirichlet-type values bound the capacity from above, Thomson-type values
//! from below.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flows::{self, EdgeSet, Flow, FlowKind, UnitFlowKind};
use crate::markov::MarkovProcess;
use crate::potential::{self, Variant};
use crate::rng::Stream;

const REVERSIBLE_TOL: f64 = 1e-10;
const FLOW_TOL: f64 = 1e-10;

/// A function with `f ≡ a` on `A` and `f ≡ b` on `B`.
#[derive(Debug, Clone)]
pub struct FeasibleFunction {
    values: Vec<f64>,
    a_val: f64,
    b_val: f64,
}

impl FeasibleFunction {
    /// Boundary values are checked exactly.
    pub fn new(values: Vec<f64>, a: &[usize], b: &[usize], a_val: f64, b_val: f64) -> Result<Self> {
        for &x in a {
            if values[x] != a_val {
                return Err(Error::InfeasibleFunction(format!("f({x}) = {} on A, expected {a_val}", values[x])));
            }
        }
        for &x in b {
            if values[x] != b_val {
                return Err(Error::InfeasibleFunction(format!("f({x}) = {} on B, expected {b_val}", values[x])));
            }
        }
        Ok(Self { values, a_val, b_val })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn class(&self) -> (f64, f64) {
        (self.a_val, self.b_val)
    }

    fn require(&self, a_val: f64, b_val: f64) -> Result<()> {
        if self.a_val != a_val || self.b_val != b_val {
            return Err(Error::InfeasibleFunction(format!(
                "class C_{{{},{}}} where C_{{{a_val},{b_val}}} is required",
                self.a_val, self.b_val
            )));
        }
        Ok(())
    }
}

/// A flow divergence-free off `A∪B` with net outflow `a` from `A`.
#[derive(Debug, Clone)]
pub struct FeasibleFlow {
    flow: Flow,
    amount: f64,
}

impl FeasibleFlow {
    /// Divergence conditions are checked to `1e−10` times the flow's scale.
    pub fn new(flow: Flow, a: &[usize], b: &[usize], amount: f64) -> Result<Self> {
        let scale = flow.values().iter().fold(1.0f64, |m, v| m.max(v.abs())).max(amount.abs());
        let defect = flows::unit_flow_defect(&flow, a, b, amount);
        if defect > FLOW_TOL * scale {
            return Err(Error::InfeasibleFlow(format!("divergence defect {defect:e} for class U_{amount}")));
        }
        Ok(Self { flow, amount })
    }

    pub fn flow(&self) -> &Flow {
        &self.flow
    }

    pub fn amount(&self) -> f64 {
        self.amount
    }

    fn require(&self, amount: f64) -> Result<()> {
        if self.amount != amount {
            return Err(Error::InfeasibleFlow(format!("class U_{} where U_{amount} is required", self.amount)));
        }
        Ok(())
    }
}

fn require_reversible(p: &MarkovProcess) -> Result<()> {
    if p.is_reversible(REVERSIBLE_TOL) {
        Ok(())
    } else {
        Err(Error::NotReversible)
    }
}

/// `D(f)` for `f ∈ C_{1,0}`; at least `cap(A,B)`.
pub fn dirichlet_value_rev(p: &MarkovProcess, f: &FeasibleFunction) -> Result<f64> {
    require_reversible(p)?;
    f.require(1.0, 0.0)?;
    Ok(p.dirichlet_form(&f.values))
}

/// `1/‖φ‖²` for `φ ∈ U_1`; at most `cap(A,B)`.
pub fn thomson_value_rev(p: &MarkovProcess, phi: &FeasibleFlow) -> Result<f64> {
    require_reversible(p)?;
    phi.require(1.0)?;
    Ok(1.0 / phi.flow.norm_sq())
}

fn phi_of(p: &MarkovProcess, edges: &Arc<EdgeSet>, f: &[f64]) -> Flow {
    debug_assert_eq!(edges.n_states(), p.n());
    flows::flow_on(edges, f, FlowKind::Phi)
}

/// `‖Φ_f − φ‖²` for `f ∈ C_{1,0}`, `φ ∈ U_0`; at least `cap(A,B)`.
pub fn dirichlet_value_nonrev(p: &MarkovProcess, f: &FeasibleFunction, phi: &FeasibleFlow) -> Result<f64> {
    f.require(1.0, 0.0)?;
    phi.require(0.0)?;
    Ok(phi_of(p, phi.flow.edges(), &f.values).minus(&phi.flow).norm_sq())
}

/// `1/‖Φ_g − ψ‖²` for `g ∈ C_{0,0}`, `ψ ∈ U_1`; at most `cap(A,B)`.
pub fn thomson_value_nonrev(p: &MarkovProcess, g: &FeasibleFunction, psi: &FeasibleFlow) -> Result<f64> {
    g.require(0.0, 0.0)?;
    psi.require(1.0)?;
    Ok(1.0 / phi_of(p, psi.flow.edges(), &g.values).minus(&psi.flow).norm_sq())
}

fn h_dot_div(h: &[f64], phi: &Flow) -> f64 {
    phi.divergences().iter().zip(h).map(|(d, h)| d * h).sum()
}

/// `[Σ h(x)(div φ)(x)]² / ‖φ‖²` with the given `h`. Only a certified lower
/// bound on `cap` when `h` is the true equilibrium potential.
pub fn gen_thomson_value(h: &[f64], phi: &Flow) -> Result<f64> {
    let n = phi.norm_sq();
    if !(n > 0.0) {
        return Err(Error::ZeroNormFlow);
    }
    Ok(h_dot_div(h, phi).powi(2) / n)
}

/// Generalized Thomson principle for reversible chains; `h_{A,B}` is
/// recomputed here.
pub fn gen_thomson_rev(p: &MarkovProcess, a: &[usize], b: &[usize], phi: &Flow) -> Result<f64> {
    require_reversible(p)?;
    let h = potential::equilibrium_potential(p, a, b, Variant::Plain)?;
    gen_thomson_value(&h, phi)
}

/// `‖Φ_f − φ‖² − 2Σ h(div φ)` for `f ∈ C_{1,0}` and any flow `φ`.
pub fn gen_dirichlet_nonrev(
    p: &MarkovProcess,
    a: &[usize],
    b: &[usize],
    f: &FeasibleFunction,
    phi: &Flow,
) -> Result<f64> {
    f.require(1.0, 0.0)?;
    let h = potential::equilibrium_potential(p, a, b, Variant::Plain)?;
    Ok(phi_of(p, phi.edges(), &f.values).minus(phi).norm_sq() - 2.0 * h_dot_div(&h, phi))
}

/// `[Σ h(div ψ)]² / ‖Φ_g − ψ‖²` for `g ∈ C_{0,0}` and any flow `ψ`.
pub fn gen_thomson_nonrev(
    p: &MarkovProcess,
    a: &[usize],
    b: &[usize],
    g: &FeasibleFunction,
    psi: &Flow,
) -> Result<f64> {
    g.require(0.0, 0.0)?;
    let h = potential::equilibrium_potential(p, a, b, Variant::Plain)?;
    let n = phi_of(p, psi.edges(), &g.values).minus(psi).norm_sq();
    if !(n > 0.0) {
        return Err(Error::ZeroNormFlow);
    }
    Ok(h_dot_div(&h, psi).powi(2) / n)
}

/// The Dirichlet optimizer `((h + h†)/2, (Φ_{h†} − Φ*_h)/2)`, for which
/// `Φ_f − φ = Ψ_h`.
pub fn dirichlet_optimizer(p: &MarkovProcess, a: &[usize], b: &[usize]) -> Result<(FeasibleFunction, FeasibleFlow)> {
    let h = potential::equilibrium_potential(p, a, b, Variant::Plain)?;
    let hd = potential::equilibrium_potential(p, a, b, Variant::Adjoint)?;
    let edges = Arc::new(EdgeSet::of(p));
    let f: Vec<f64> = h.iter().zip(hd.iter()).map(|(x, y)| 0.5 * (x + y)).collect();
    let phi = flows::flow_on(&edges, &hd, FlowKind::Phi)
        .minus(&flows::flow_on(&edges, &h, FlowKind::PhiStar))
        .scaled(0.5);
    Ok((FeasibleFunction::new(f, a, b, 1.0, 0.0)?, FeasibleFlow::new(phi, a, b, 0.0)?))
}

/// The Thomson optimizer `((h − h†)/(2cap), −(Φ_{h†} + Φ*_h)/(2cap))`, for
/// which `Φ_g − ψ = Ψ_h/cap`.
pub fn thomson_optimizer(p: &MarkovProcess, a: &[usize], b: &[usize]) -> Result<(FeasibleFunction, FeasibleFlow)> {
    let cap = potential::capacity(p, a, b)?.value;
    if !(cap > 0.0) {
        return Err(Error::ZeroCapacity);
    }
    let h = potential::equilibrium_potential(p, a, b, Variant::Plain)?;
    let hd = potential::equilibrium_potential(p, a, b, Variant::Adjoint)?;
    let edges = Arc::new(EdgeSet::of(p));
    let g: Vec<f64> = h.iter().zip(hd.iter()).map(|(x, y)| (x - y) / (2.0 * cap)).collect();
    let psi = flows::flow_on(&edges, &hd, FlowKind::Phi)
        .plus(&flows::flow_on(&edges, &h, FlowKind::PhiStar))
        .scaled(-0.5 / cap);
    Ok((FeasibleFunction::new(g, a, b, 0.0, 0.0)?, FeasibleFlow::new(psi, a, b, 1.0)?))
}

/// `a·h + b·(1−h) + bump`, the bump uniform in `[−scale, scale]` off `A∪B`.
pub fn random_feasible_function(
    p: &MarkovProcess,
    a: &[usize],
    b: &[usize],
    a_val: f64,
    b_val: f64,
    scale: f64,
    rng: &mut Stream,
) -> Result<FeasibleFunction> {
    let h = potential::equilibrium_potential(p, a, b, Variant::Plain)?;
    let mut fixed = vec![false; p.n()];
    for &x in a.iter().chain(b) {
        fixed[x] = true;
    }
    let mut f: Vec<f64> = h.iter().map(|&h| a_val * h + b_val * (1.0 - h)).collect();
    for &x in a {
        f[x] = a_val;
    }
    for &x in b {
        f[x] = b_val;
    }
    for x in 0..p.n() {
        if !fixed[x] {
            f[x] += rng.range(-scale, scale);
        }
    }
    FeasibleFunction::new(f, a, b, a_val, b_val)
}

/// Random combination of fundamental cycles, coefficients in `[−scale, scale]`.
pub fn random_circulation(edges: &Arc<EdgeSet>, scale: f64, rng: &mut Stream) -> Flow {
    let mut flow = Flow::zero(edges.clone());
    for cycle in edges.fundamental_cycles() {
        let c = rng.range(-scale, scale);
        for (x, y) in cycle {
            flow.add_to(x, y, c).expect("cycle steps are edges");
        }
    }
    flow
}

/// `amount · φ*_{A,B}` plus a random circulation.
pub fn random_feasible_flow(
    p: &MarkovProcess,
    a: &[usize],
    b: &[usize],
    amount: f64,
    scale: f64,
    rng: &mut Stream,
) -> Result<FeasibleFlow> {
    let base = flows::unit_flow(p, a, b, UnitFlowKind::PhiStar)?;
    let circ = random_circulation(base.edges(), scale, rng);
    FeasibleFlow::new(base.scaled(amount).plus(&circ), a, b, amount)
}

/// A flow with independent uniform values in `[−scale, scale]` on every edge.
pub fn random_flow(edges: &Arc<EdgeSet>, scale: f64, rng: &mut Stream) -> Flow {
    Flow::from_fn(edges.clone(), |_, _| rng.range(-scale, scale))
}

/// Largest sampled `⟨f,−Lg⟩²/(D(f)D(g))`. Sample 0 is `f = g`; sample `i`
/// draws from stream `i` of `seed`, so the estimate never decreases in
/// `samples`.
pub fn estimate_sector_constant(p: &MarkovProcess, samples: usize, seed: u64) -> f64 {
    let n = p.n();
    let mut best: f64 = 0.0;
    for i in 0..samples.max(1) {
        let mut rng = Stream::derived(seed, i as u64);
        let f: Vec<f64> = (0..n).map(|_| rng.range(-1.0, 1.0)).collect();
        let g: Vec<f64> = if i == 0 { f.clone() } else { (0..n).map(|_| rng.range(-1.0, 1.0)).collect() };
        let df = p.dirichlet_form(&f);
        let dg = p.dirichlet_form(&g);
        if df <= 0.0 || dg <= 0.0 {
            continue;
        }
        let cross = p.dirichlet_bilinear(&f, &g);
        best = best.max(cross * cross / (df * dg));
    }
    best
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Sandwich {
    pub cap_s: f64,
    pub cap: f64,
    pub holds: bool,
}

/// `cap^s ≤ cap ≤ C₀·cap^s` with slack `1e−10`.
pub fn capacity_sandwich(p: &MarkovProcess, a: &[usize], b: &[usize], c0: f64) -> Result<Sandwich> {
    let cap = potential::capacity(p, a, b)?.value;
    let cap_s = potential::capacity(&p.symmetrize(), a, b)?.value;
    let holds = cap_s - 1e-10 <= cap && cap <= c0 * cap_s + 1e-10;
    Ok(Sandwich { cap_s, cap, holds })
}

/// Outcome of one principle over a batch of random trials.
#[derive(Debug, Clone, Serialize)]
pub struct PrincipleCheck {
    pub principle: String,
    pub trials: usize,
    /// Smallest signed distance to the capacity on the correct side, relative to `cap`.
    pub worst_margin: f64,
    /// Relative gap between the optimizer value and `cap`.
    pub optimizer_residual: f64,
    pub passed: bool,
}

fn check(principle: &str, trials: usize, worst: f64, opt: f64) -> PrincipleCheck {
    PrincipleCheck {
        principle: principle.to_string(),
        trials,
        worst_margin: worst,
        optimizer_residual: opt,
        passed: worst >= -1e-9 && opt <= 1e-9,
    }
}

/// Runs every principle applicable to `p`: the three reversible ones only
/// when `p` is reversible.
pub fn verify_principles(
    p: &MarkovProcess,
    a: &[usize],
    b: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<PrincipleCheck>> {
    let cap = potential::capacity(p, a, b)?.value;
    if !(cap > 0.0) {
        return Err(Error::ZeroCapacity);
    }
    let rel = |v: f64| v / cap;
    let edges = Arc::new(EdgeSet::of(p));
    let h = potential::equilibrium_potential(p, a, b, Variant::Plain)?;
    let flow_scale = flows::unit_flow(p, a, b, UnitFlowKind::PhiStar)?
        .values()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let mut out = Vec::new();
    let stream = |k: u64, t: usize| Stream::derived(seed, k * 1_000_003 + t as u64);

    if p.is_reversible(REVERSIBLE_TOL) {
        let mut worst = f64::INFINITY;
        for t in 0..trials {
            let mut r = stream(1, t);
            let f = random_feasible_function(p, a, b, 1.0, 0.0, 0.5, &mut r)?;
            worst = worst.min(rel(dirichlet_value_rev(p, &f)? - cap));
        }
        let opt = dirichlet_value_rev(p, &FeasibleFunction::new(h.to_vec(), a, b, 1.0, 0.0)?)?;
        out.push(check("dirichlet_rev", trials, worst, rel((opt - cap).abs())));

        let mut worst = f64::INFINITY;
        for t in 0..trials {
            let mut r = stream(2, t);
            let phi = random_feasible_flow(p, a, b, 1.0, flow_scale, &mut r)?;
            worst = worst.min(rel(cap - thomson_value_rev(p, &phi)?));
        }
        let psi = FeasibleFlow::new(flows::unit_flow(p, a, b, UnitFlowKind::Psi)?, a, b, 1.0)?;
        let opt = thomson_value_rev(p, &psi)?;
        out.push(check("thomson_rev", trials, worst, rel((opt - cap).abs())));

        let mut worst = f64::INFINITY;
        for t in 0..trials {
            let mut r = stream(3, t);
            let phi = random_flow(&edges, flow_scale * cap, &mut r);
            worst = worst.min(rel(cap - gen_thomson_rev(p, a, b, &phi)?));
        }
        let psi_h = flows::flow_on(&edges, &h, FlowKind::Psi);
        let mut opt: f64 = 0.0;
        for c in [1.0, 2.0, -2.0, 0.5, 10.0] {
            opt = opt.max(rel((gen_thomson_rev(p, a, b, &psi_h.scaled(c))? - cap).abs()));
        }
        out.push(check("gen_thomson_rev", trials, worst, opt));
    }

    let (f_opt, phi_opt) = dirichlet_optimizer(p, a, b)?;
    let (g_opt, psi_opt) = thomson_optimizer(p, a, b)?;

    let mut worst = f64::INFINITY;
    for t in 0..trials {
        let mut r = stream(4, t);
        let f = random_feasible_function(p, a, b, 1.0, 0.0, 0.5, &mut r)?;
        let circ = random_circulation(&edges, flow_scale * cap, &mut r);
        let phi = FeasibleFlow::new(phi_opt.flow().plus(&circ).scaled(r.range(0.0, 2.0)), a, b, 0.0)?;
        worst = worst.min(rel(dirichlet_value_nonrev(p, &f, &phi)? - cap));
    }
    let opt = dirichlet_value_nonrev(p, &f_opt, &phi_opt)?;
    out.push(check("dirichlet_nonrev", trials, worst, rel((opt - cap).abs())));

    let mut worst = f64::INFINITY;
    for t in 0..trials {
        let mut r = stream(5, t);
        let g = random_feasible_function(p, a, b, 0.0, 0.0, 0.5 / cap, &mut r)?;
        let psi = random_feasible_flow(p, a, b, 1.0, flow_scale, &mut r)?;
        worst = worst.min(rel(cap - thomson_value_nonrev(p, &g, &psi)?));
    }
    let opt = thomson_value_nonrev(p, &g_opt, &psi_opt)?;
    out.push(check("thomson_nonrev", trials, worst, rel((opt - cap).abs())));

    let mut worst = f64::INFINITY;
    for t in 0..trials {
        let mut r = stream(6, t);
        let f = random_feasible_function(p, a, b, 1.0, 0.0, 0.5, &mut r)?;
        let phi = random_flow(&edges, flow_scale * cap, &mut r);
        worst = worst.min(rel(gen_dirichlet_nonrev(p, a, b, &f, &phi)? - cap));
    }
    let opt = gen_dirichlet_nonrev(p, a, b, &f_opt, phi_opt.flow())?;
    out.push(check("gen_dirichlet_nonrev", trials, worst, rel((opt - cap).abs())));

    let mut worst = f64::INFINITY;
    for t in 0..trials {
        let mut r = stream(7, t);
        let g = random_feasible_function(p, a, b, 0.0, 0.0, 0.5 / cap, &mut r)?;
        let psi = random_flow(&edges, flow_scale, &mut r);
        worst = worst.min(rel(cap - gen_thomson_nonrev(p, a, b, &g, &psi)?));
    }
    let mut opt: f64 = 0.0;
    for c in [1.0, 3.0, -2.0, 0.5] {
        let g = FeasibleFunction::new(g_opt.values().iter().map(|v| c * v).collect(), a, b, 0.0, 0.0)?;
        let v = gen_thomson_nonrev(p, a, b, &g, &psi_opt.flow().scaled(c))?;
        opt = opt.max(rel((v - cap).abs()));
    }
    out.push(check("gen_thomson_nonrev", trials, worst, opt));
    Ok(out)
}
