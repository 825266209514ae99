//! The test function `f₀`, the test flow `ψ₀` and their scaled energies.
//!
//! All Gibbs quantities use offset `Γ`, so `e^{Γβ}D_β(f₀)` and
//! `e^{−Γβ}‖ψ₀‖²_β` are computed without ever forming `e^{−Γβ}`.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::Result;

use super::canonical::{protuberance, Canonical, Side};
use super::lattice::Lattice;
use super::structure::{EdgeChain, Sign, TypicalStructure};
use super::thermo::Gibbs;

/// `f₀(σ)`: `1` on `⊟`'s side, `0` on `⊞`'s, linear along the bulk and
/// `1` off the typical configurations.
pub fn f0_value(st: &TypicalStructure, s: u64) -> f64 {
    let c = st.constants;
    let ratio = c.e / c.kappa;
    if let Some(v) = st.chain_minus.project(s).filter(|_| st.edge_minus.contains(&s)) {
        return 1.0 - ratio * (1.0 - st.chain_minus.potential[v]);
    }
    if let Some(v) = st.chain_plus.project(s).filter(|_| st.edge_plus.contains(&s)) {
        return ratio * (1.0 - st.chain_plus.potential[v]);
    }
    if st.bulk.contains(&s) {
        return bulk_f0(st, s);
    }
    1.0
}

fn bulk_f0(st: &TypicalStructure, s: u64) -> f64 {
    let (k, l) = (st.model.k as f64, st.model.l as f64);
    let c = st.constants;
    match st.canonical.kind[&s] {
        Canonical::Band { v } => ((l - 2.0 - v as f64) / (l - 4.0) * c.b + c.e) / c.kappa,
        Canonical::Protuberance { v, h } => {
            let num = (k + 2.0) * (l - 2.0 - v as f64) - (h as f64 + 1.0);
            (num / ((k + 2.0) * (l - 4.0)) * c.b + c.e) / c.kappa
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct F0Checks {
    pub at_minus: f64,
    pub at_plus: f64,
    pub in_unit_interval: bool,
    /// `max |edge formula − bulk formula|` on `R₂ ∪ R_{L−2}`.
    pub overlap_mismatch: f64,
    pub r2_value: f64,
    pub feasible: bool,
}

pub fn f0_checks(st: &TypicalStructure) -> F0Checks {
    let lat = &st.lattice;
    let at_minus = f0_value(st, lat.minus());
    let at_plus = f0_value(st, lat.plus());
    let mut in_unit_interval = true;
    for &s in st.typical.iter() {
        let f = f0_value(st, s);
        in_unit_interval &= (0.0..=1.0).contains(&f);
    }
    let l = st.model.l;
    let mut overlap_mismatch: f64 = 0.0;
    for &s in st.canonical.r[2].iter().chain(&st.canonical.r[l - 2]) {
        overlap_mismatch = overlap_mismatch.max((f0_value(st, s) - bulk_f0(st, s)).abs());
    }
    F0Checks {
        at_minus,
        at_plus,
        in_unit_interval,
        overlap_mismatch,
        r2_value: f0_value(st, st.canonical.r[2][0]),
        feasible: at_minus == 1.0 && at_plus == 0.0,
    }
}

/// `e^{Γβ}·D_β(f₀)`: sums edges inside `E ∪ B` and edges leaving it.
pub fn scaled_dirichlet_f0(st: &TypicalStructure, beta: f64) -> Result<f64> {
    let lat = &st.lattice;
    let gibbs = Gibbs::new(lat, beta, st.gamma())?;
    let f: HashMap<u64, f64> = st.typical.iter().map(|&s| (s, f0_value(st, s))).collect();
    let mut total = 0.0;
    for (&s, &fs) in &f {
        let hs = lat.energy(s);
        for x in 0..lat.sites() {
            let t = lat.flip(s, x);
            let ft = match f.get(&t) {
                Some(&ft) if s < t => ft,
                Some(_) => continue,
                None => 1.0,
            };
            let d = ft - fs;
            if d != 0.0 {
                total += gibbs.conductance_shifted(hs, hs + lat.flip_delta(s, x)) * d * d;
            }
        }
    }
    Ok(total)
}

/// A flow on flip edges stored once per unordered pair.
#[derive(Debug, Clone, Default)]
pub struct SparseFlow {
    values: HashMap<(u64, u64), f64>,
    /// Largest disagreement when one edge was assigned twice.
    conflict: f64,
}

impl SparseFlow {
    /// Sets `ψ(a,b) = v` and `ψ(b,a) = −v`.
    pub fn set(&mut self, a: u64, b: u64, v: f64) {
        let (key, val) = if a < b { ((a, b), v) } else { ((b, a), -v) };
        if let Some(old) = self.values.insert(key, val) {
            self.conflict = self.conflict.max((old - val).abs());
        }
    }

    pub fn get(&self, a: u64, b: u64) -> f64 {
        if a < b {
            self.values.get(&(a, b)).copied().unwrap_or(0.0)
        } else {
            -self.values.get(&(b, a)).copied().unwrap_or(0.0)
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn conflict(&self) -> f64 {
        self.conflict
    }

    /// `Σ_ζ ψ(σ,ζ)`.
    pub fn divergence(&self, lat: &Lattice, s: u64) -> f64 {
        lat.flips(s).map(|t| self.get(s, t)).sum()
    }

    /// States touching a non-zero edge.
    pub fn support(&self) -> HashSet<u64> {
        let mut out = HashSet::new();
        for (&(a, b), &v) in &self.values {
            if v != 0.0 {
                out.insert(a);
                out.insert(b);
            }
        }
        out
    }

    /// `Σ ψ²/(e^{β·offset}μ_β c_β)`, i.e. `e^{−β·offset}‖ψ‖²_β`.
    pub fn scaled_norm_sq(&self, lat: &Lattice, gibbs: &Gibbs) -> f64 {
        self.values
            .iter()
            .map(|(&(a, b), &v)| v * v / gibbs.conductance_shifted(lat.energy(a), lat.energy(b)))
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u64, u64), f64)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }
}

fn add_edge_part(flow: &mut SparseFlow, lat: &Lattice, chain: &EdgeChain, e: f64) {
    // the + side carries flow from its exit band into ⊞
    let sign = match chain.sign {
        Sign::Minus => 1.0,
        Sign::Plus => -1.0,
    };
    for a in chain.first_outer..chain.vertices.len() {
        let s = chain.vertices[a];
        for t in lat.flips(s) {
            if let Some(b) = chain.project(t) {
                if chain.is_outer(b) && t < s {
                    continue;
                }
                flow.set(s, t, sign * e * (chain.potential[a] - chain.potential[b]));
            }
        }
    }
}

/// `ψ₀`, independent of `β`.
pub fn test_flow_psi0(st: &TypicalStructure) -> SparseFlow {
    let lat = &st.lattice;
    let (k, l) = (st.model.k, st.model.l);
    let c = st.constants;
    let mut flow = SparseFlow::default();
    add_edge_part(&mut flow, lat, &st.chain_minus, c.e);
    add_edge_part(&mut flow, lat, &st.chain_plus, c.e);
    let unit = c.b / ((k + 2) * (l - 4)) as f64;
    for v in 2..=l - 3 {
        for row in 0..l {
            for col in 0..k {
                for side in [Side::Up, Side::Down] {
                    let p = |col: usize, h: usize| protuberance(lat, side, row, v, col, h);
                    flow.set(p(col, 0), p(col, 1), 2.0 * unit);
                    flow.set(p(col, k - 1), p(col, k), 2.0 * unit);
                    for h in 1..=k - 2 {
                        flow.set(p(col, h), p(col, h + 1), unit);
                        flow.set(p(col, h), p(col + k - 1, h + 1), unit);
                    }
                }
            }
        }
    }
    flow
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FlowChecks {
    pub bulk_interior_max_div: f64,
    pub exit_bands_max_div: f64,
    pub outer_max_div: f64,
    pub support_outside_typical: usize,
    /// `max |div ψ₀|` over `X ∖ N(S)`.
    pub off_ground_max_div: f64,
    pub minus_ground_div: f64,
    pub plus_ground_div: f64,
    pub assignment_conflict: f64,
    pub passed: bool,
}

pub fn flow_checks(st: &TypicalStructure, flow: &SparseFlow) -> FlowChecks {
    let lat = &st.lattice;
    let l = st.model.l;
    let div = |s: u64| flow.divergence(lat, s);
    let max_abs = |it: &mut dyn Iterator<Item = u64>| it.map(|s| div(s).abs()).fold(0.0, f64::max);

    let bulk_interior_max_div = max_abs(
        &mut st
            .bulk
            .iter()
            .copied()
            .filter(|s| !st.edge_minus.contains(s) && !st.edge_plus.contains(s)),
    );
    let exit_bands_max_div = max_abs(&mut st.canonical.r[2].iter().chain(&st.canonical.r[l - 2]).copied());
    let outer = |c: &EdgeChain| c.vertices[c.first_outer..].to_vec();
    let outer_max_div = max_abs(&mut outer(&st.chain_minus).into_iter().chain(outer(&st.chain_plus)));
    let support = flow.support();
    let support_outside_typical = support.iter().filter(|&&s| !st.is_typical(s)).count();
    let off_ground_max_div = max_abs(
        &mut support
            .iter()
            .copied()
            .filter(|s| !st.n_minus.contains(s) && !st.n_plus.contains(s)),
    );
    let minus_ground_div: f64 = st.n_minus.iter().map(|&s| div(s)).sum();
    let plus_ground_div: f64 = st.n_plus.iter().map(|&s| div(s)).sum();
    let tol = 1e-12;
    let passed = bulk_interior_max_div <= tol
        && exit_bands_max_div <= tol
        && outer_max_div <= tol
        && support_outside_typical == 0
        && off_ground_max_div <= tol
        && (minus_ground_div - 1.0).abs() <= tol
        && (plus_ground_div + 1.0).abs() <= tol
        && flow.conflict() == 0.0;
    FlowChecks {
        bulk_interior_max_div,
        exit_bands_max_div,
        outer_max_div,
        support_outside_typical,
        off_ground_max_div,
        minus_ground_div,
        plus_ground_div,
        assignment_conflict: flow.conflict(),
        passed,
    }
}

/// `e^{−Γβ}‖ψ₀‖²_β`.
pub fn scaled_flow_norm(st: &TypicalStructure, flow: &SparseFlow, beta: f64) -> Result<f64> {
    let gibbs = Gibbs::new(&st.lattice, beta, st.gamma())?;
    Ok(flow.scaled_norm_sq(&st.lattice, &gibbs))
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScaledLimits {
    pub beta: f64,
    /// `2κ·e^{Γβ}·D_β(f₀)`.
    pub scaled_upper: f64,
    /// `e^{−Γβ}‖ψ₀‖²_β / (2κ)`.
    pub scaled_flow: f64,
    /// `2κ·e^{Γβ}/‖ψ₀‖²_β`, the Thomson-side estimate of `2κ·e^{Γβ}cap`.
    pub scaled_lower: f64,
}

pub fn scaled_limits(st: &TypicalStructure, flow: &SparseFlow, betas: &[f64]) -> Result<Vec<ScaledLimits>> {
    let kappa = st.constants.kappa;
    betas
        .iter()
        .map(|&beta| {
            let d = scaled_dirichlet_f0(st, beta)?;
            let n = scaled_flow_norm(st, flow, beta)?;
            Ok(ScaledLimits {
                beta,
                scaled_upper: 2.0 * kappa * d,
                scaled_flow: n / (2.0 * kappa),
                scaled_lower: 2.0 * kappa / n,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RateApproximation {
    pub beta: f64,
    /// `max |½e^{−Γβ}r^±(Πσ,Πσ′) − Σ μ_β c_β| · e^{(Γ+2)β}`.
    pub scaled_deviation: f64,
    /// `|½ − 1/Z_β|·e^{2β}`, the single-pair value for adjacent outer states.
    pub unit_pair_scaled: f64,
}

/// Compares the Metropolis conductances on `E^±` with the edge-chain rates.
pub fn rate_approximation_check(st: &TypicalStructure, betas: &[f64]) -> Result<Vec<RateApproximation>> {
    let lat = &st.lattice;
    let gamma = st.gamma();
    betas
        .iter()
        .map(|&beta| {
            let gibbs = Gibbs::new(lat, beta, gamma)?;
            let boost = (2.0 * beta).exp();
            let mut worst: f64 = 0.0;
            for chain in [&st.chain_minus, &st.chain_plus] {
                for a in chain.first_outer..chain.vertices.len() {
                    let s = chain.vertices[a];
                    let mut sums: HashMap<usize, f64> = HashMap::new();
                    for t in lat.flips(s) {
                        if let Some(b) = chain.project(t) {
                            *sums.entry(b).or_insert(0.0) += gibbs.conductance_shifted(gamma, lat.energy(t));
                        }
                    }
                    for (b, sum) in sums {
                        let r = chain.process.rate(a, b);
                        worst = worst.max((0.5 * r - sum).abs() * boost);
                    }
                }
            }
            let z = gibbs.partition_function();
            Ok(RateApproximation {
                beta,
                scaled_deviation: worst,
                unit_pair_scaled: (0.5 - 1.0 / z).abs() * boost,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::structure::{typical_structure_default, IsingModel};

    fn five_by_six() -> TypicalStructure {
        typical_structure_default(&IsingModel::new(5, 6).unwrap()).unwrap()
    }

    #[test]
    fn f0_is_feasible_and_consistent_on_r2() {
        let st = five_by_six();
        let c = f0_checks(&st);
        assert!(c.feasible && c.in_unit_interval);
        assert!(c.overlap_mismatch < 1e-15);
        let expected = 1.0 - st.constants.e / st.constants.kappa;
        assert!((c.r2_value - expected).abs() < 1e-15);
    }

    #[test]
    fn psi0_bulk_values_and_divergence() {
        let st = five_by_six();
        let psi = test_flow_psi0(&st);
        let lat = &st.lattice;
        let unit = st.constants.b / (7.0 * 2.0);
        let a = protuberance(lat, Side::Up, 0, 2, 1, 2);
        let b = protuberance(lat, Side::Up, 0, 2, 1, 3);
        assert!((psi.get(a, b) - unit).abs() < 1e-15);
        assert!((psi.get(b, a) + unit).abs() < 1e-15);
        let band = protuberance(lat, Side::Up, 0, 3, 0, 0);
        assert!(psi.divergence(lat, band).abs() < 1e-15);
        let checks = flow_checks(&st, &psi);
        assert!(checks.passed, "{checks:?}");
    }

    #[test]
    fn scaled_limits_approach_one() {
        let st = five_by_six();
        let psi = test_flow_psi0(&st);
        let rows = scaled_limits(&st, &psi, &[4.0, 8.0]).unwrap();
        assert!((rows[1].scaled_upper - 1.0).abs() < (rows[0].scaled_upper - 1.0).abs());
        assert!((rows[1].scaled_upper - 1.0).abs() < 0.15);
        assert!((rows[1].scaled_flow - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rate_deviation_does_not_grow() {
        let st = five_by_six();
        let r = rate_approximation_check(&st, &[3.0, 4.0]).unwrap();
        assert!(r[1].scaled_deviation <= r[0].scaled_deviation * 1.05);
        // a unit-rate outer pair deviates by exactly |½ − 1/Z|
        assert!(r.iter().all(|x| x.scaled_deviation >= x.unit_pair_scaled));
    }
}
