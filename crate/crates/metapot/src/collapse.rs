//! Contracting a set `E` to a single state `𝔢`.
//!
//! `r̄(x,y) = r(x,y)` off `E`, `r̄(x,𝔢) = Σ_{z∈E} r(x,z)`,
//! `r̄(𝔢,y) = Σ_{z∈E} μ(z)r(z,y) / μ(E)` and `μ̄(𝔢) = μ(E)`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flows::{EdgeSet, Flow, FlowKind};
use crate::markov::MarkovProcess;
use crate::potential;
use crate::rng::Stream;
use crate::variational;

#[derive(Debug, Clone)]
pub struct CollapsedProcess {
    process: MarkovProcess,
    set: Vec<usize>,
    state_map: Vec<usize>,
    collapsed: usize,
}

fn reserved_label(p: &MarkovProcess) -> String {
    let mut label = String::from("𝔢");
    while p.index_of(&label).is_ok() {
        label.push('\'');
    }
    label
}

/// Collapses `e` in `p`. Off-`E` states keep their relative order and `𝔢`
/// is the last state.
pub fn collapse_process(p: &MarkovProcess, e: &[usize]) -> Result<CollapsedProcess> {
    let n = p.n();
    let mut in_e = vec![false; n];
    for &z in e {
        if z >= n {
            return Err(Error::UnknownState(format!("index {z}")));
        }
        in_e[z] = true;
    }
    let size = in_e.iter().filter(|&&b| b).count();
    if size == 0 {
        return Err(Error::EmptyCollapseSet);
    }
    if size == n {
        return Err(Error::FullCollapseSet);
    }
    let collapsed = n - size;
    let mut state_map = vec![collapsed; n];
    let mut labels = Vec::with_capacity(collapsed + 1);
    for x in 0..n {
        if !in_e[x] {
            state_map[x] = labels.len();
            labels.push(p.label(x).to_string());
        }
    }
    labels.push(reserved_label(p));
    let mu_e: f64 = (0..n).filter(|&z| in_e[z]).map(|z| p.mu(z)).sum();
    let mut rates = Vec::new();
    for (x, y, r) in p.rate_triplets() {
        match (in_e[x], in_e[y]) {
            (true, true) => {}
            (false, _) => rates.push((state_map[x], state_map[y], r)),
            (true, false) => rates.push((collapsed, state_map[y], p.mu(x) * r / mu_e)),
        }
    }
    let mut weights = vec![0.0; collapsed + 1];
    for x in 0..n {
        weights[state_map[x]] += p.mu(x);
    }
    let process = MarkovProcess::with_measure(labels, &rates, weights)?;
    let mut set: Vec<usize> = (0..n).filter(|&z| in_e[z]).collect();
    set.sort_unstable();
    Ok(CollapsedProcess { process, set, state_map, collapsed })
}

impl CollapsedProcess {
    pub fn process(&self) -> &MarkovProcess {
        &self.process
    }

    /// Index of `𝔢` in the collapsed process.
    pub fn collapsed_state(&self) -> usize {
        self.collapsed
    }

    pub fn collapsed_set(&self) -> &[usize] {
        &self.set
    }

    /// Base index → collapsed index.
    pub fn map(&self, x: usize) -> usize {
        self.state_map[x]
    }

    pub fn map_set(&self, a: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = a.iter().map(|&x| self.state_map[x]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `f̄`, defined when `f` is constant on `E` (checked exactly).
    pub fn collapse_function(&self, f: &[f64]) -> Result<Vec<f64>> {
        let v = f[self.set[0]];
        if let Some(&z) = self.set.iter().find(|&&z| f[z] != v) {
            return Err(Error::NonConstantOnCollapseSet(z.to_string()));
        }
        let mut out = vec![0.0; self.process.n()];
        for (x, &fx) in f.iter().enumerate() {
            out[self.state_map[x]] = fx;
        }
        Ok(out)
    }

    /// `φ̄(x,𝔢) = Σ_{z∈E} φ(x,z)`; flow inside `E` is dropped.
    pub fn collapse_flow(&self, phi: &Flow) -> Flow {
        let edges = Arc::new(EdgeSet::of(&self.process));
        let mut out = Flow::zero(edges);
        let base = phi.edges();
        for (e, &v) in phi.values().iter().enumerate() {
            let (lo, hi) = base.ends(e);
            let (a, b) = (self.state_map[lo], self.state_map[hi]);
            if a != b {
                out.add_to(a, b, v).expect("collapsed edge exists");
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CollapseReport {
    pub cap_base: f64,
    pub cap_collapsed: f64,
    pub cap_rel_err: f64,
    /// Largest `‖φ̄‖²/‖φ‖²` over random flows.
    pub max_norm_ratio: f64,
    /// `|‖Ψ̄‖²/‖Ψ‖² − 1|` worst case over random `E`-constant `f`.
    pub equality_rel_err: f64,
    pub dirichlet_rel_err: f64,
    pub bilinear_rel_err: f64,
    pub divergence_err: f64,
    pub stationarity_residual: f64,
    pub sector_base: f64,
    pub sector_collapsed: f64,
    pub passed: bool,
}

/// Checks the collapsing identities with target set `a` disjoint from `e`.
/// `sector_bound` is an analytic sector constant of the base chain, if known.
pub fn verify_collapse_identities(
    p: &MarkovProcess,
    e: &[usize],
    a: &[usize],
    trials: usize,
    seed: u64,
    sector_bound: Option<f64>,
) -> Result<CollapseReport> {
    let c = collapse_process(p, e)?;
    let bar = c.process();
    let cap_base = potential::capacity(p, e, a)?.value;
    let cap_collapsed = potential::capacity(bar, &[c.collapsed], &c.map_set(a))?.value;
    let cap_rel_err = (cap_collapsed / cap_base - 1.0).abs();

    let edges = Arc::new(EdgeSet::of(p));
    let mut max_norm_ratio: f64 = 0.0;
    let mut equality_rel_err: f64 = 0.0;
    let mut dirichlet_rel_err: f64 = 0.0;
    let mut bilinear_rel_err: f64 = 0.0;
    let mut divergence_err: f64 = 0.0;
    for t in 0..trials {
        let mut rng = Stream::derived(seed, t as u64);
        let phi = variational::random_flow(&edges, 1.0, &mut rng);
        let phib = c.collapse_flow(&phi);
        max_norm_ratio = max_norm_ratio.max(phib.norm_sq() / phi.norm_sq());
        let div_e = phi.divergence_set(e);
        divergence_err = divergence_err.max((phib.divergence(c.collapsed) - div_e).abs());

        let e_constant = |rng: &mut Stream| {
            let mut f: Vec<f64> = (0..p.n()).map(|_| rng.range(-1.0, 1.0)).collect();
            let v = rng.range(-1.0, 1.0);
            for &z in e {
                f[z] = v;
            }
            f
        };
        let f = e_constant(&mut rng);
        let g = e_constant(&mut rng);
        let fb = c.collapse_function(&f)?;
        let gb = c.collapse_function(&g)?;
        let d = p.dirichlet_form(&f);
        dirichlet_rel_err = dirichlet_rel_err.max((bar.dirichlet_form(&fb) / d - 1.0).abs());
        let bl = p.dirichlet_bilinear(&g, &f);
        let blb = bar.dirichlet_bilinear(&gb, &fb);
        bilinear_rel_err = bilinear_rel_err.max((blb - bl).abs() / d.max(p.dirichlet_form(&g)));
        let psi = crate::flows::flow_on(&edges, &f, FlowKind::Psi);
        let psib = c.collapse_flow(&psi);
        equality_rel_err = equality_rel_err.max((psib.norm_sq() / psi.norm_sq() - 1.0).abs());
    }
    let samples = 4 * trials.max(1);
    let sector_base = variational::estimate_sector_constant(p, samples, seed ^ 0x5ec7);
    let sector_collapsed = variational::estimate_sector_constant(bar, samples, seed ^ 0x5ec7);
    let sector_ok = sector_bound.is_none_or(|c0| sector_collapsed <= c0 + 1e-9);
    let stationarity_residual = bar.stationarity_residual();
    let passed = cap_rel_err <= 1e-10
        && max_norm_ratio <= 1.0 + 1e-12
        && equality_rel_err <= 1e-12
        && dirichlet_rel_err <= 1e-11
        && bilinear_rel_err <= 1e-11
        && divergence_err <= 1e-12
        && sector_ok;
    Ok(CollapseReport {
        cap_base,
        cap_collapsed,
        cap_rel_err,
        max_norm_ratio,
        equality_rel_err,
        dirichlet_rel_err,
        bilinear_rel_err,
        divergence_err,
        stationarity_residual,
        sector_base,
        sector_collapsed,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::cycle_walk;

    #[test]
    fn rates_out_of_collapsed_pair() {
        let p = cycle_walk(6, 0.7).unwrap();
        let c = collapse_process(&p, &[0, 1]).unwrap();
        let bar = c.process();
        let e = c.collapsed_state();
        let two = c.map(2);
        assert!((bar.rate(e, two) - 0.35).abs() < 1e-15);
        assert!((bar.mu(e) - 1.0 / 3.0).abs() < 1e-15);
        // into 𝔢 from 5: r(5,0) = p
        assert!((bar.rate(c.map(5), e) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn singleton_collapse_keeps_rates() {
        let p = cycle_walk(5, 0.7).unwrap();
        let c = collapse_process(&p, &[2]).unwrap();
        for x in 0..5 {
            for y in 0..5 {
                assert!((c.process().rate(c.map(x), c.map(y)) - p.rate(x, y)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn degenerate_sets_rejected() {
        let p = cycle_walk(3, 0.7).unwrap();
        assert!(matches!(collapse_process(&p, &[]), Err(Error::EmptyCollapseSet)));
        assert!(matches!(collapse_process(&p, &[0, 1, 2]), Err(Error::FullCollapseSet)));
        let c = collapse_process(&p, &[0, 1]).unwrap();
        assert!(matches!(c.collapse_function(&[1.0, 2.0, 0.0]), Err(Error::NonConstantOnCollapseSet(_))));
    }

    #[test]
    fn reversibility_is_inherited() {
        let p = cycle_walk(8, 0.5).unwrap();
        let c = collapse_process(&p, &[0, 1, 5]).unwrap();
        assert!(c.process().is_reversible(1e-12));
    }

    #[test]
    fn identities_on_eight_cycle() {
        let p = cycle_walk(8, 0.7).unwrap();
        let r = verify_collapse_identities(&p, &[0, 1], &[4], 50, 9, Some(4.0 / 0.7)).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn flow_inside_the_set_strictly_contracts() {
        let p = cycle_walk(6, 0.5).unwrap();
        let c = collapse_process(&p, &[0, 1]).unwrap();
        let edges = Arc::new(EdgeSet::of(&p));
        let phi = Flow::from_entries(edges, &[(0, 1, 1.0), (2, 3, 0.5)]).unwrap();
        assert!(c.collapse_flow(&phi).norm_sq() < phi.norm_sq());
    }
}
