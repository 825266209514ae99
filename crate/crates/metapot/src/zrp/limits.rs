//! Finite-`N` sequences whose limits the theory predicts: scaled capacities,
//! valley masses and the martingale conditions H0–H3.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential;

use super::identities::sector_constant;
use super::limit::{limit_chain, LimitChain};
use super::model::{build_zrp, Valleys, ZrpModel, ZrpProcess};
use super::rates::mean_jump_rates;

/// `true` when every consecutive pair strictly decreases.
pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CapacityRow {
    pub particles: usize,
    pub width: usize,
    pub states: usize,
    pub cap: f64,
    pub cap_sym: f64,
    /// `N^{1+α}·cap_N(E(A), E(B))`.
    pub scaled_cap: f64,
    pub cap_y: f64,
    pub rel_err: f64,
    /// `cap^s ≤ cap ≤ C₀cap^s` at relative slack `1e−10`.
    pub sandwich_ok: bool,
    /// `μ_N(E^0)`.
    pub valley_mass: f64,
    pub delta_mass: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CapacityScan {
    pub sites: usize,
    pub alpha: f64,
    pub p: f64,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub sector_constant: f64,
    pub rows: Vec<CapacityRow>,
    pub rel_err_decreasing: bool,
    pub valley_mass_err_decreasing: bool,
    pub sandwich_ok: bool,
}

fn check_sites(sites: usize, a: &[usize], b: &[usize]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some(&x) = a.iter().chain(b).find(|&&x| x >= sites) {
        return Err(Error::UnknownState(format!("site {x}")));
    }
    if let Some(&x) = a.iter().find(|x| b.contains(x)) {
        return Err(Error::OverlappingSets(format!("site {x}")));
    }
    Ok(())
}

fn capacity_row(model: &ZrpModel, y: &LimitChain, a: &[usize], b: &[usize], c0: f64) -> Result<CapacityRow> {
    let z = build_zrp(model)?;
    let v = z.valleys()?;
    let (ea, eb) = (v.union(a), v.union(b));
    let cap = potential::capacity(&z.process, &ea, &eb)?.value;
    let cap_sym = potential::capacity(&z.process.symmetrize(), &ea, &eb)?.value;
    let n = model.particles as f64;
    let scaled_cap = n.powf(1.0 + model.alpha) * cap;
    let cap_y = y.capacity(a, b)?;
    let tol = 1e-10 * cap;
    Ok(CapacityRow {
        particles: model.particles,
        width: v.width,
        states: z.len(),
        cap,
        cap_sym,
        scaled_cap,
        cap_y,
        rel_err: (scaled_cap / cap_y - 1.0).abs(),
        sandwich_ok: cap_sym - tol <= cap && cap <= c0 * cap_sym + tol,
        valley_mass: z.mass(&v.valley[0]),
        delta_mass: z.mass(&v.delta),
    })
}

/// `N^{1+α}cap_N(E_N(A), E_N(B))` against `cap_Y(A,B)` over `grid`.
pub fn zrp_capacity_scan(
    sites: usize,
    alpha: f64,
    p: f64,
    a: &[usize],
    b: &[usize],
    grid: &[usize],
) -> Result<CapacityScan> {
    check_sites(sites, a, b)?;
    let y = limit_chain(sites, alpha, p)?;
    let c0 = sector_constant(sites, p);
    let rows = grid
        .par_iter()
        .map(|&n| capacity_row(&ZrpModel::new(sites, n, alpha, p)?, &y, a, b, c0))
        .collect::<Result<Vec<_>>>()?;
    let errs: Vec<f64> = rows.iter().map(|r| r.rel_err).collect();
    let mass_errs: Vec<f64> = rows.iter().map(|r| (r.valley_mass * sites as f64 - 1.0).abs()).collect();
    let sandwich_ok = rows.iter().all(|r| r.sandwich_ok);
    Ok(CapacityScan {
        sites,
        alpha,
        p,
        a: a.to_vec(),
        b: b.to_vec(),
        sector_constant: c0,
        rel_err_decreasing: strictly_decreasing(&errs),
        valley_mass_err_decreasing: strictly_decreasing(&mass_errs),
        sandwich_ok,
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConditionRow {
    pub particles: usize,
    pub width: usize,
    /// H0: `max_{x≠y} |N^{1+α}r_N(x,y)/a(x,y) − 1|`.
    pub h0_rel_err: f64,
    /// H1: `cap_N(E^0, Ĕ^0) / min_{η,ζ∈E^0} cap_N(η,ζ)`.
    pub h1_ratio: f64,
    /// `min_{η,ζ∈E^0} cap_N(η,ζ)` over the scanned pairs.
    pub h1_min_cap: f64,
    pub h1_pairs_scanned: usize,
    /// `min cap · ℓ_N^{α(κ−1)+1}`, the lower-bound constant.
    pub lower_bound_constant: f64,
    /// `h1_ratio · N^{1+α} / ℓ_N^{α(κ−1)+1}`.
    pub h1_shape_constant: f64,
    /// H2: `μ_N(Δ_N)/μ_N(E^0)`.
    pub h2_ratio: f64,
    /// `sup_{η∈E^0} E_η[τ_{ξ^0}] / N^{1+α}`, the Markov-inequality bound at `δ = 1`.
    pub h3_hitting_bound: f64,
    /// `sup_{η∈E^0} 1/(N^{1+α} cap_N(η, ξ^0))`, the capacity form of that bound.
    pub h3_capacity_bound: f64,
    /// `Z_N μ_N(Δ_N)`, the stationarity bound.
    pub h3_stationary_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConditionsReport {
    pub sites: usize,
    pub alpha: f64,
    pub p: f64,
    pub rows: Vec<ConditionRow>,
    pub h0_decreasing: bool,
    pub h1_decreasing: bool,
    pub h2_decreasing: bool,
    pub h3_decreasing: bool,
}

/// Configurations of `E^0` used for the `H1` infimum: all of `E^0` when
/// small, otherwise the condensate and the boundary `η_0 = N − ℓ_N`.
fn h1_candidates(z: &ZrpProcess, v: &Valleys, limit: usize) -> Vec<usize> {
    if v.valley[0].len() <= limit {
        return v.valley[0].clone();
    }
    let floor = (z.model.particles - v.width) as u32;
    let mut c: Vec<usize> = v.valley[0].iter().copied().filter(|&i| z.space.config(i)[0] == floor).collect();
    c.push(z.space.condensate(0));
    c
}

fn condition_row(model: &ZrpModel, y: &LimitChain) -> Result<ConditionRow> {
    let z = build_zrp(model)?;
    let v = z.valleys()?;
    let p = &z.process;
    let k = model.sites;
    let n = model.particles as f64;
    let scale = n.powf(1.0 + model.alpha);

    let rates = mean_jump_rates(&z, &v)?;
    let mut h0_rel_err: f64 = 0.0;
    for x in 0..k {
        for yy in 0..k {
            if x != yy {
                h0_rel_err = h0_rel_err.max((scale * rates.r[x][yy] / y.rate(x, yy) - 1.0).abs());
            }
        }
    }

    let cap_out = potential::capacity(p, &v.valley[0], &v.others(0))?.value;
    let cand = h1_candidates(&z, &v, 40);
    let pairs: Vec<(usize, usize)> = cand
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| cand[i + 1..].iter().map(move |&b| (a, b)))
        .collect();
    let caps = pairs
        .par_iter()
        .map(|&(a, b)| potential::capacity(p, &[a], &[b]).map(|c| c.value))
        .collect::<Result<Vec<f64>>>()?;
    let h1_min_cap = caps.iter().copied().fold(f64::INFINITY, f64::min);
    let exponent = model.alpha * (k as f64 - 1.0) + 1.0;
    let ell = (v.width as f64).powf(exponent);
    let h1_ratio = cap_out / h1_min_cap;

    let delta_mass = z.mass(&v.delta);
    let h2_ratio = delta_mass / z.mass(&v.valley[0]);

    let xi = z.space.condensate(0);
    let hit = potential::hitting_times_direct(p, &[xi])?;
    let h3_hitting_bound = v.valley[0].iter().map(|&i| hit[i]).fold(0.0, f64::max) / scale;
    let h3_capacity_bound = v.valley[0]
        .par_iter()
        .filter(|&&i| i != xi)
        .map(|&i| potential::capacity(p, &[i], &[xi]).map(|c| 1.0 / (scale * c.value)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let h3_stationary_bound = z.partition_function() * delta_mass;

    Ok(ConditionRow {
        particles: model.particles,
        width: v.width,
        h0_rel_err,
        h1_ratio,
        h1_min_cap,
        h1_pairs_scanned: pairs.len(),
        lower_bound_constant: h1_min_cap * ell,
        h1_shape_constant: h1_ratio * scale / ell,
        h2_ratio,
        h3_hitting_bound,
        h3_capacity_bound,
        h3_stationary_bound,
    })
}

pub fn martingale_conditions(sites: usize, alpha: f64, p: f64, grid: &[usize]) -> Result<ConditionsReport> {
    let y = limit_chain(sites, alpha, p)?;
    let rows = grid
        .par_iter()
        .map(|&n| condition_row(&ZrpModel::new(sites, n, alpha, p)?, &y))
        .collect::<Result<Vec<_>>>()?;
    let col = |f: fn(&ConditionRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    Ok(ConditionsReport {
        sites,
        alpha,
        p,
        h0_decreasing: strictly_decreasing(&col(|r| r.h0_rel_err)),
        h1_decreasing: strictly_decreasing(&col(|r| r.h1_ratio)),
        h2_decreasing: strictly_decreasing(&col(|r| r.h2_ratio)),
        h3_decreasing: strictly_decreasing(&col(|r| r.h3_capacity_bound))
            && strictly_decreasing(&col(|r| r.h3_hitting_bound))
            && strictly_decreasing(&col(|r| r.h3_stationary_bound)),
        rows,
    })
}
