//! Exact identities of the zero-range process: the one-particle shift of the
//! invariant measure, the shifted Dirichlet form, capacity symmetries, the
//! collapsed-capacity identity and the sector inequality.

use serde::Serialize;

use crate::collapse::collapse_process;
use crate::error::{Error, Result};
use crate::potential;
use crate::rng::Stream;

use super::constants::partition_function;
use super::model::{StateSpace, Valleys, ZrpProcess, DEFAULT_STATE_BUDGET};

/// `a_N = N^α Z_{N−1} / ((N−1)^α Z_N)`.
pub fn shift_constant(sites: usize, particles: usize, alpha: f64) -> Result<f64> {
    if particles < 2 {
        return Err(Error::InvalidParameter("the shift needs N ≥ 2".into()));
    }
    let n = particles as f64;
    let z_n = partition_function(sites, particles, alpha)?;
    let z_prev = partition_function(sites, particles - 1, alpha)?;
    Ok(n.powf(alpha) * z_prev / ((n - 1.0).powf(alpha) * z_n))
}

/// `1/C` for the Poincaré inequality `Σ_x [g_x − ḡ]² ≤ C Σ_x [g_{x+1} − g_x]²`
/// on the `κ`-cycle, `C = 1/(2 − 2cos(2π/κ))`.
pub fn cycle_poincare_constant(sites: usize) -> f64 {
    1.0 / (2.0 - 2.0 * (2.0 * std::f64::consts::PI / sites as f64).cos())
}

/// `⟨g, −L_N f⟩ ≤ D_N(f) + (c/p)D_N(g)` with `c = max(1, C_κ)`, hence the
/// sector constant `C₀ = 4c/p`. `c = 1` for `κ ≤ 6`.
pub fn sector_constant(sites: usize, p: f64) -> f64 {
    4.0 * cycle_poincare_constant(sites).max(1.0) / p
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MeasureIdentities {
    pub a_n: f64,
    /// `max |μ_N(η)g(η_u) / (a_N μ_{N−1}(η − ω^u)) − 1|`.
    pub u1_rel_err: f64,
    /// `max |D_N(f) / shifted form − 1|` over random `f`.
    pub edr_rel_err: f64,
    /// `max |⟨g,−L_N f⟩ / shifted bilinear − 1|` over random `f, g`.
    pub bilinear_rel_err: f64,
}

/// Checks `μ_N(η)g(η_u) = a_N μ_{N−1}(η−ω^u)` and the shifted forms of
/// `D_N` and `⟨g, −L_N f⟩`.
pub fn measure_identities(z: &ZrpProcess, trials: usize, seed: u64) -> Result<MeasureIdentities> {
    let m = z.model;
    let k = m.sites;
    let a_n = shift_constant(k, m.particles, m.alpha)?;
    let lower = StateSpace::new(k, m.particles - 1, DEFAULT_STATE_BUDGET)?;
    let z_prev = partition_function(k, m.particles - 1, m.alpha)?;
    let n_prev = (m.particles - 1) as f64;
    let mu_prev: Vec<f64> = lower
        .iter()
        .map(|eta| n_prev.powf(m.alpha) / z_prev / eta.iter().map(|&n| m.a(n)).product::<f64>())
        .collect();

    let mut u1_rel_err: f64 = 0.0;
    let mut buf = vec![0u32; k];
    for (i, eta) in z.space.iter().enumerate() {
        for u in 0..k {
            if eta[u] == 0 {
                continue;
            }
            buf.copy_from_slice(eta);
            buf[u] -= 1;
            let rhs = a_n * mu_prev[lower.rank(&buf)];
            let lhs = z.mu(i) * m.g(eta[u]);
            u1_rel_err = u1_rel_err.max((lhs / rhs - 1.0).abs());
        }
    }

    // ζ + ω^x as an index of H_N
    let up: Vec<Vec<usize>> = lower
        .iter()
        .map(|zeta| {
            (0..k)
                .map(|x| {
                    let mut eta = zeta.to_vec();
                    eta[x] += 1;
                    z.space.rank(&eta)
                })
                .collect()
        })
        .collect();
    let mut edr_rel_err: f64 = 0.0;
    let mut bilinear_rel_err: f64 = 0.0;
    for t in 0..trials.max(1) {
        let mut rng = Stream::derived(seed, t as u64);
        let f: Vec<f64> = (0..z.len()).map(|_| rng.range(-1.0, 1.0)).collect();
        let g: Vec<f64> = (0..z.len()).map(|_| rng.range(-1.0, 1.0)).collect();
        let mut shifted_d = 0.0;
        let mut shifted_b = 0.0;
        for (j, ups) in up.iter().enumerate() {
            for x in 0..k {
                for y in 0..k {
                    let r = m.walk_rate(x, y);
                    if r == 0.0 {
                        continue;
                    }
                    let df = f[ups[x]] - f[ups[y]];
                    shifted_d += mu_prev[j] * r * df * df;
                    shifted_b += mu_prev[j] * r * df * g[ups[x]];
                }
            }
        }
        shifted_d *= 0.5 * a_n;
        shifted_b *= a_n;
        edr_rel_err = edr_rel_err.max((z.process.dirichlet_form(&f) / shifted_d - 1.0).abs());
        let direct_b = z.process.dirichlet_bilinear(&g, &f);
        bilinear_rel_err = bilinear_rel_err.max((direct_b - shifted_b).abs() / shifted_d);
    }
    Ok(MeasureIdentities { a_n, u1_rel_err, edr_rel_err, bilinear_rel_err })
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CapacityIdentities {
    pub cap: f64,
    /// `|cap(E(B),E(A))/cap(E(A),E(B)) − 1|`.
    pub swap_rel_err: f64,
    /// `|cap†(E(A),E(B))/cap(E(A),E(B)) − 1|`.
    pub adjoint_rel_err: f64,
    /// `|cap̄(E(A), 𝔢)/cap(E(A), E^{x₀}) − 1|` with `E^{x₀}` collapsed.
    pub collapsed_rel_err: f64,
}

/// `A`, `B` disjoint site sets; `x0 ∉ A` is the collapsed valley.
pub fn capacity_identities(
    z: &ZrpProcess,
    valleys: &Valleys,
    a: &[usize],
    b: &[usize],
    x0: usize,
) -> Result<CapacityIdentities> {
    let p = &z.process;
    let ea = valleys.union(a);
    let eb = valleys.union(b);
    let cap = potential::capacity(p, &ea, &eb)?.value;
    let swap = potential::capacity(p, &eb, &ea)?.value;
    let adj = potential::capacity(&p.adjoint(), &ea, &eb)?.value;
    let c = collapse_process(p, &valleys.valley[x0])?;
    let bar = potential::capacity(c.process(), &c.map_set(&ea), &[c.collapsed_state()])?.value;
    let direct = potential::capacity(p, &ea, &valleys.valley[x0])?.value;
    Ok(CapacityIdentities {
        cap,
        swap_rel_err: (swap / cap - 1.0).abs(),
        adjoint_rel_err: (adj / cap - 1.0).abs(),
        collapsed_rel_err: (bar / direct - 1.0).abs(),
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SectorReport {
    pub samples: usize,
    pub constant: f64,
    /// `max [⟨g,−Lf⟩ − D(f) − (c/p)D(g)] / (D(f) + D(g))`, at most round-off.
    pub max_linear_excess: f64,
    /// `max ⟨g,−Lf⟩²/(D(f)D(g))`.
    pub max_ratio: f64,
    /// `|⟨g,−L·1⟩|` for one random `g`.
    pub constant_f_value: f64,
    pub passed: bool,
}

pub fn sector_check_zrp(z: &ZrpProcess, samples: usize, seed: u64) -> SectorReport {
    let m = z.model;
    let constant = sector_constant(m.sites, m.p);
    let c_lin = cycle_poincare_constant(m.sites).max(1.0) / m.p;
    let p = &z.process;
    let n = z.len();
    let mut max_linear_excess = f64::NEG_INFINITY;
    let mut max_ratio: f64 = 0.0;
    for s in 0..samples {
        let mut rng = Stream::derived(seed, s as u64);
        let f: Vec<f64> = (0..n).map(|_| rng.range(-1.0, 1.0)).collect();
        let g: Vec<f64> = (0..n).map(|_| rng.range(-1.0, 1.0)).collect();
        let (df, dg) = (p.dirichlet_form(&f), p.dirichlet_form(&g));
        let cross = p.dirichlet_bilinear(&g, &f);
        max_linear_excess = max_linear_excess.max((cross - df - c_lin * dg) / (df + dg));
        max_ratio = max_ratio.max(cross * cross / (df * dg));
    }
    let mut rng = Stream::derived(seed, samples as u64);
    let g: Vec<f64> = (0..n).map(|_| rng.range(-1.0, 1.0)).collect();
    let constant_f_value = p.dirichlet_bilinear(&g, &vec![1.0; n]).abs();
    let passed = max_linear_excess <= 1e-10 && max_ratio <= constant + 1e-10 && constant_f_value <= 1e-12;
    SectorReport { samples, constant, max_linear_excess, max_ratio, constant_f_value, passed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zrp::model::{build_zrp, ZrpModel};

    #[test]
    fn poincare_constant_crosses_one_at_seven_sites() {
        assert!((cycle_poincare_constant(3) - 1.0 / 3.0).abs() < 1e-15);
        assert!((cycle_poincare_constant(6) - 1.0).abs() < 1e-12);
        assert!(cycle_poincare_constant(7) > 1.0);
        assert_eq!(sector_constant(3, 0.5), 8.0);
    }

    #[test]
    fn poincare_constant_is_sharp_on_the_cycle() {
        // g_x = cos(2πx/κ) attains the constant
        for k in [3, 5, 8] {
            let g: Vec<f64> = (0..k).map(|x| (2.0 * std::f64::consts::PI * x as f64 / k as f64).cos()).collect();
            let mean = g.iter().sum::<f64>() / k as f64;
            let var: f64 = g.iter().map(|v| (v - mean).powi(2)).sum();
            let grad: f64 = (0..k).map(|x| (g[(x + 1) % k] - g[x]).powi(2)).sum();
            assert!((var / grad - cycle_poincare_constant(k)).abs() < 1e-12);
        }
    }

    #[test]
    fn measure_identities_hold() {
        let z = build_zrp(&ZrpModel::new(3, 8, 2.0, 0.7).unwrap()).unwrap();
        let r = measure_identities(&z, 5, 3).unwrap();
        assert!(r.u1_rel_err < 1e-12, "{}", r.u1_rel_err);
        assert!(r.edr_rel_err < 1e-11, "{}", r.edr_rel_err);
        assert!(r.bilinear_rel_err < 1e-11, "{}", r.bilinear_rel_err);
    }

    #[test]
    fn shift_constant_tends_to_one() {
        let errs: Vec<f64> = [10, 40, 160].iter().map(|&n| (shift_constant(3, n, 2.0).unwrap() - 1.0).abs()).collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
    }

    #[test]
    fn capacity_identities_hold() {
        let z = build_zrp(&ZrpModel::new(3, 10, 2.0, 0.7).unwrap()).unwrap();
        let v = z.valleys().unwrap();
        let c = capacity_identities(&z, &v, &[0], &[1], 2).unwrap();
        assert!(c.swap_rel_err < 1e-10 && c.adjoint_rel_err < 1e-10 && c.collapsed_rel_err < 1e-10);
    }

    #[test]
    fn sector_inequalities() {
        let z = build_zrp(&ZrpModel::new(3, 12, 2.0, 0.7).unwrap()).unwrap();
        let r = sector_check_zrp(&z, 200, 11);
        assert!(r.passed, "{r:?}");
        let z = build_zrp(&ZrpModel::new(3, 12, 2.0, 0.5).unwrap()).unwrap();
        let r = sector_check_zrp(&z, 200, 11);
        assert!(r.max_ratio <= 1.0 + 1e-10, "{}", r.max_ratio);
    }
}
