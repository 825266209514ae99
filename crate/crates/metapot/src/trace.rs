//! The trace of a process on a subset `E`, realized as the stochastic
//! complement of the generator.
//!
//! `j(η,ζ) = r(η,ζ) + Σ_{ξ∈Δ} r(η,ξ)·P_ξ[X(τ_E) = ζ]` for `η ≠ ζ` in `E`,
//! `Δ = E^c`. The entry distributions come from one factorization of the
//! `Δ`-block of `−L`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Factored, SparseMatrix};
use crate::markov::MarkovProcess;

#[derive(Debug, Clone)]
pub struct TraceProcess {
    process: MarkovProcess,
    /// `set[i]`: base index of trace state `i`, increasing.
    set: Vec<usize>,
    /// Base index → trace index.
    position: Vec<Option<usize>>,
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceDiagnostics {
    /// `max |μ_trace(η) / (μ(η)/μ(E)) − 1|`.
    pub measure_rel_err: f64,
    /// `max_η (Σ_ζ j(η,ζ) − λ(η))`, never positive up to round-off.
    pub max_rate_excess: f64,
}

/// Trace of `p` on `e`; the invariant measure is solved independently.
pub fn trace_process(p: &MarkovProcess, e: &[usize]) -> Result<TraceProcess> {
    let n = p.n();
    let mut position = vec![None; n];
    let mut set: Vec<usize> = e.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.is_empty() {
        return Err(Error::EmptyCollapseSet);
    }
    if let Some(&z) = set.iter().find(|&&z| z >= n) {
        return Err(Error::UnknownState(format!("index {z}")));
    }
    for (i, &z) in set.iter().enumerate() {
        position[z] = Some(i);
    }
    let delta: Vec<usize> = (0..n).filter(|&x| position[x].is_none()).collect();
    let labels: Vec<String> = set.iter().map(|&z| p.label(z).to_string()).collect();

    let mut rates: Vec<(usize, usize, f64)> = Vec::new();
    for (i, &z) in set.iter().enumerate() {
        for &(y, r) in p.rates_from(z) {
            if let Some(j) = position[y] {
                rates.push((i, j, r));
            }
        }
    }
    if !delta.is_empty() {
        let mut dpos = vec![usize::MAX; n];
        for (k, &x) in delta.iter().enumerate() {
            dpos[x] = k;
        }
        let mut block = Vec::new();
        // entry targets ζ ∈ E reachable in one step from Δ, with the Δ-side rates
        let mut entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); set.len()];
        for (k, &x) in delta.iter().enumerate() {
            block.push((k, k, p.holding_rate(x)));
            for &(y, r) in p.rates_from(x) {
                match position[y] {
                    Some(j) => entries[j].push((k, r)),
                    None => block.push((k, dpos[y], -r)),
                }
            }
        }
        let lu = Factored::new(SparseMatrix::from_triplets(delta.len(), &block))?;
        // rates from E into Δ, by Δ index
        let mut into_delta: Vec<Vec<(usize, f64)>> = vec![Vec::new(); set.len()];
        for (i, &z) in set.iter().enumerate() {
            for &(y, r) in p.rates_from(z) {
                if position[y].is_none() {
                    into_delta[i].push((dpos[y], r));
                }
            }
        }
        for (j, col) in entries.iter().enumerate() {
            if col.is_empty() {
                continue;
            }
            let mut rhs = vec![0.0; delta.len()];
            for &(k, r) in col {
                rhs[k] += r;
            }
            let u = lu.solve(&rhs)?;
            for (i, row) in into_delta.iter().enumerate() {
                if i == j {
                    continue;
                }
                let add: f64 = row.iter().map(|&(k, r)| r * u[k].max(0.0)).sum();
                if add > 0.0 {
                    rates.push((i, j, add));
                }
            }
        }
    }
    let process = MarkovProcess::new(labels, &rates)?;
    Ok(TraceProcess { process, set, position })
}

impl TraceProcess {
    pub fn process(&self) -> &MarkovProcess {
        &self.process
    }

    pub fn set(&self) -> &[usize] {
        &self.set
    }

    pub fn position(&self, base: usize) -> Option<usize> {
        self.position[base]
    }

    /// `j(η, ζ)` for base indices in `E`.
    pub fn rate(&self, from: usize, to: usize) -> f64 {
        match (self.position[from], self.position[to]) {
            (Some(i), Some(j)) => self.process.rate(i, j),
            _ => 0.0,
        }
    }

    pub fn diagnostics(&self, base: &MarkovProcess) -> TraceDiagnostics {
        let mass: f64 = self.set.iter().map(|&z| base.mu(z)).sum();
        let mut measure_rel_err: f64 = 0.0;
        let mut max_rate_excess = f64::NEG_INFINITY;
        for (i, &z) in self.set.iter().enumerate() {
            measure_rel_err = measure_rel_err.max((self.process.mu(i) / (base.mu(z) / mass) - 1.0).abs());
            max_rate_excess = max_rate_excess.max(self.process.holding_rate(i) - base.holding_rate(z));
        }
        TraceDiagnostics { measure_rel_err, max_rate_excess }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::cycle_walk;

    #[test]
    fn full_set_is_the_identity() {
        let p = cycle_walk(5, 0.7).unwrap();
        let t = trace_process(&p, &[0, 1, 2, 3, 4]).unwrap();
        for x in 0..5 {
            for y in 0..5 {
                assert_eq!(t.rate(x, y), p.rate(x, y));
            }
        }
    }

    #[test]
    fn two_point_trace_of_a_cycle() {
        // symmetric 4-cycle watched on {0, 2}: half of each excursion returns
        let p = cycle_walk(4, 0.5).unwrap();
        let t = trace_process(&p, &[0, 2]).unwrap();
        assert!((t.rate(0, 2) - 0.5).abs() < 1e-14);
        let d = t.diagnostics(&p);
        assert!(d.measure_rel_err < 1e-12);
    }

    #[test]
    fn conditioned_measure_on_a_nonreversible_walk() {
        let p = cycle_walk(7, 0.8).unwrap();
        let t = trace_process(&p, &[1, 2, 5]).unwrap();
        let d = t.diagnostics(&p);
        assert!(d.measure_rel_err < 1e-10);
        assert!(d.max_rate_excess <= 1e-12);
    }
}
