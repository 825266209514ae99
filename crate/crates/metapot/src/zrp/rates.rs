//! Mean jump rates between valleys, computed from the trace process and
//! checked against the capacity and collapsed-chain routes.

use serde::Serialize;

use crate::collapse::collapse_process;
use crate::error::Result;
use crate::potential::{self, Variant};
use crate::trace::{trace_process, TraceDiagnostics};

use super::model::{Valleys, ZrpProcess};

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MeanJumpRates {
    pub particles: usize,
    pub width: usize,
    /// `r_N(x,y) = μ_N(E^x)⁻¹ Σ_{η∈E^x} Σ_{ζ∈E^y} μ_N(η) j_N(η,ζ)`.
    pub r: Vec<Vec<f64>>,
    /// `λ_N(x) = Σ_{y≠x} r_N(x,y)`.
    pub lambda: Vec<f64>,
    /// `cap_N(E^x, Ĕ^x)/μ_N(E^x)`.
    pub lambda_capacity: Vec<f64>,
    /// `P̄_𝔢[τ_{E^y} < τ_{Ĕ^{x,y}}]` with `E^x` collapsed to `𝔢`.
    pub collapsed_ratio: Vec<Vec<f64>>,
    pub e610_rel_err: f64,
    pub e611_rel_err: f64,
    /// `max |r_N(x,x+d)/r_N(0,d) − 1|`.
    pub rotation_rel_err: f64,
    /// Worst relative gap to `½[cap(E^x,Ĕ^x) + cap(E^y,Ĕ^y) − cap(E^x∪E^y, Ĕ^{x,y})]/μ_N(E^x)`,
    /// only at `p = ½`.
    pub reversible_formula_rel_err: Option<f64>,
    pub trace: TraceDiagnostics,
}

pub fn mean_jump_rates(z: &ZrpProcess, valleys: &Valleys) -> Result<MeanJumpRates> {
    let k = z.model.sites;
    let p = &z.process;
    let all = valleys.all();
    let tr = trace_process(p, &all)?;
    let trace = tr.diagnostics(p);
    let mass: Vec<f64> = valleys.valley.iter().map(|v| z.mass(v)).collect();

    let mut r = vec![vec![0.0; k]; k];
    for (x, vx) in valleys.valley.iter().enumerate() {
        for &eta in vx {
            let i = tr.position(eta).expect("valley state in trace");
            for &(j, rate) in tr.process().rates_from(i) {
                let zeta = tr.set()[j];
                if let Some(y) = valleys.label[zeta] {
                    if y != x {
                        r[x][y] += p.mu(eta) * rate;
                    }
                }
            }
        }
        for v in r[x].iter_mut() {
            *v /= mass[x];
        }
    }
    let lambda: Vec<f64> = r.iter().map(|row| row.iter().sum()).collect();

    let mut lambda_capacity = vec![0.0; k];
    let mut collapsed_ratio = vec![vec![0.0; k]; k];
    let mut e610_rel_err: f64 = 0.0;
    let mut e611_rel_err: f64 = 0.0;
    for x in 0..k {
        let others = valleys.others(x);
        let cap = potential::capacity(p, &valleys.valley[x], &others)?.value;
        lambda_capacity[x] = cap / mass[x];
        e610_rel_err = e610_rel_err.max((lambda[x] / lambda_capacity[x] - 1.0).abs());

        let c = collapse_process(p, &valleys.valley[x])?;
        let e = c.collapsed_state();
        for y in 0..k {
            if y == x {
                continue;
            }
            let rest = valleys.others2(x, y);
            collapsed_ratio[x][y] = if rest.is_empty() {
                1.0
            } else {
                let h = potential::equilibrium_potential(
                    c.process(),
                    &c.map_set(&valleys.valley[y]),
                    &c.map_set(&rest),
                    Variant::Plain,
                )?;
                h[e]
            };
            let direct = r[x][y] / lambda[x];
            e611_rel_err = e611_rel_err.max((direct / collapsed_ratio[x][y] - 1.0).abs());
        }
    }

    let mut rotation_rel_err: f64 = 0.0;
    for x in 0..k {
        for d in 1..k {
            let y = (x + d) % k;
            rotation_rel_err = rotation_rel_err.max((r[x][y] / r[0][d] - 1.0).abs());
        }
    }

    let reversible_formula_rel_err = if z.model.p == 0.5 {
        let cap_single: Vec<f64> = (0..k)
            .map(|x| potential::capacity(p, &valleys.valley[x], &valleys.others(x)).map(|c| c.value))
            .collect::<Result<_>>()?;
        let mut worst: f64 = 0.0;
        for x in 0..k {
            for y in 0..k {
                if x == y {
                    continue;
                }
                let rest = valleys.others2(x, y);
                let pair_cap = if rest.is_empty() {
                    0.0
                } else {
                    potential::capacity(p, &valleys.union(&[x, y]), &rest)?.value
                };
                let formula = 0.5 * (cap_single[x] + cap_single[y] - pair_cap) / mass[x];
                worst = worst.max((r[x][y] / formula - 1.0).abs());
            }
        }
        Some(worst)
    } else {
        None
    };

    Ok(MeanJumpRates {
        particles: z.model.particles,
        width: valleys.width,
        r,
        lambda,
        lambda_capacity,
        collapsed_ratio,
        e610_rel_err,
        e611_rel_err,
        rotation_rel_err,
        reversible_formula_rel_err,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zrp::model::{build_zrp, ZrpModel};

    #[test]
    fn both_identities_hold_at_twelve() {
        let z = build_zrp(&ZrpModel::new(3, 12, 2.0, 0.7).unwrap()).unwrap();
        let v = z.valleys().unwrap();
        let m = mean_jump_rates(&z, &v).unwrap();
        assert!(m.e610_rel_err < 1e-8, "{}", m.e610_rel_err);
        assert!(m.e611_rel_err < 1e-8, "{}", m.e611_rel_err);
        assert!(m.rotation_rel_err < 1e-8);
        assert!(m.trace.measure_rel_err < 1e-10);
        assert!(m.reversible_formula_rel_err.is_none());
    }

    #[test]
    fn reversible_three_capacity_formula() {
        for k in [2, 3, 4] {
            let z = build_zrp(&ZrpModel::new(k, 9, 2.0, 0.5).unwrap()).unwrap();
            let v = z.valleys().unwrap();
            let m = mean_jump_rates(&z, &v).unwrap();
            let err = m.reversible_formula_rel_err.unwrap();
            assert!(err < 1e-8, "kappa {k}: {err}");
        }
    }
}
