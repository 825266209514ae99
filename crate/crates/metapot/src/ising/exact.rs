//! Exact computations on the full Metropolis chain of a small torus.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::markov::MarkovProcess;
use crate::potential::{self, CapacityReport, Variant};

use super::barrier;
use super::lattice::Lattice;
use super::thermo::Gibbs;

/// Largest `K·L` for which the full chain is built.
pub const MAX_SITES: usize = 20;

/// The Metropolis chain on all `2^{KL}` configurations; state `i` is the
/// configuration with bits `i`.
pub fn metropolis_process(lat: &Lattice, beta: f64) -> Result<MarkovProcess> {
    let n = lat.sites();
    if n > MAX_SITES {
        return Err(Error::StateSpaceTooLarge { size: 1u128 << n, limit: 1u128 << MAX_SITES });
    }
    let states = 1usize << n;
    let energy: Vec<i64> = (0..states as u64).map(|s| lat.energy(s)).collect();
    let mut rates = Vec::with_capacity(states * n);
    for s in 0..states {
        for x in 0..n {
            let t = s ^ (1 << x);
            let d = energy[t] - energy[s];
            rates.push((s, t, (-beta * d.max(0) as f64).exp()));
        }
    }
    let gibbs = Gibbs::new(lat, beta, 0)?;
    let weights = energy.iter().map(|&h| gibbs.weight(h)).collect();
    let labels = (0..states).map(|s| format!("{s:#x}")).collect();
    MarkovProcess::with_measure(labels, &rates, weights)
}

/// `cap_β(A, B)` on the full chain.
pub fn exact_capacity(lat: &Lattice, beta: f64, a: &[u64], b: &[u64]) -> Result<CapacityReport> {
    let p = metropolis_process(lat, beta)?;
    let ia: Vec<usize> = a.iter().map(|&s| s as usize).collect();
    let ib: Vec<usize> = b.iter().map(|&s| s as usize).collect();
    potential::capacity(&p, &ia, &ib)
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExactPoint {
    pub beta: f64,
    /// `cap_β(⊟, ⊞)`.
    pub capacity: f64,
    pub capacity_escape: f64,
    /// `|cap(⊟,⊞)/cap(⊞,⊟) − 1|`.
    pub symmetry_err: f64,
    /// `max_{N(⊞)} h_{⊟,⊞}`.
    pub max_h_near_plus: f64,
    /// `max_{N(⊟)} (1 − h_{⊟,⊞})`.
    pub max_gap_near_minus: f64,
    /// `max_h_near_plus · e^{β}`.
    pub decay_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SmallLatticeReport {
    pub k: usize,
    pub l: usize,
    /// `Φ(⊞, ⊟)` from the exhaustive widest-path oracle.
    pub barrier: i64,
    pub points: Vec<ExactPoint>,
    /// `−Δlog cap / Δβ` between consecutive grid points.
    pub log_slopes: Vec<f64>,
    /// `|slope/Φ − 1|` at the largest pair.
    pub slope_rel_err: f64,
}

pub fn exact_small_lattice(k: usize, l: usize, betas: &[f64]) -> Result<SmallLatticeReport> {
    let lat = Lattice::new(k, l)?;
    if lat.sites() > MAX_SITES {
        return Err(Error::StateSpaceTooLarge { size: 1u128 << lat.sites(), limit: 1u128 << MAX_SITES });
    }
    let (minus, plus) = (lat.minus(), lat.plus());
    let barrier = barrier::communication_height_exhaustive(&lat, plus, minus)?;
    let near_plus = barrier::reachable(&lat, &[plus], barrier - 1, None, barrier::DEFAULT_BUDGET)?;
    let near_minus = barrier::reachable(&lat, &[minus], barrier - 1, None, barrier::DEFAULT_BUDGET)?;
    let mut points = Vec::with_capacity(betas.len());
    for &beta in betas {
        let p = metropolis_process(&lat, beta)?;
        let (m, q) = (minus as usize, plus as usize);
        let cap = potential::capacity(&p, &[m], &[q])?.value;
        let cap_rev = potential::capacity(&p, &[q], &[m])?.value;
        let cap_escape = potential::capacity_via_escape(&p, &[m], &[q])?.value;
        let h = potential::equilibrium_potential(&p, &[m], &[q], Variant::Plain)?;
        let max_h_near_plus = near_plus.iter().map(|&s| h[s as usize]).fold(0.0, f64::max);
        let max_gap_near_minus = near_minus.iter().map(|&s| 1.0 - h[s as usize]).fold(0.0, f64::max);
        points.push(ExactPoint {
            beta,
            capacity: cap,
            capacity_escape: cap_escape,
            symmetry_err: (cap / cap_rev - 1.0).abs(),
            max_h_near_plus,
            max_gap_near_minus,
            decay_ratio: max_h_near_plus * beta.exp(),
        });
    }
    let log_slopes: Vec<f64> = points
        .windows(2)
        .map(|w| -(w[1].capacity.ln() - w[0].capacity.ln()) / (w[1].beta - w[0].beta))
        .collect();
    let slope_rel_err = log_slopes
        .last()
        .map_or(f64::NAN, |s| (s / barrier as f64 - 1.0).abs());
    Ok(SmallLatticeReport { k, l, barrier, points, log_slopes, slope_rel_err })
}
