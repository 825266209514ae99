//! Limit constants `Γ_α`, `I_α`, `Z` and the partition function `Z_N`.

use serde::Serialize;

use crate::error::{Error, Result};

/// `B_{2k}/(2k)!` for `k = 1..=6`.
const BERNOULLI_OVER_FACTORIAL: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
];

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

/// `ζ(α) = Σ_{n≥1} n^{−α}` by Euler–Maclaurin with cut `M = 64`.
pub fn zeta(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    const M: f64 = 64.0;
    let head: f64 = (1..64).map(|n| (n as f64).powf(-alpha)).sum();
    let mut tail = M.powf(1.0 - alpha) / (alpha - 1.0) + 0.5 * M.powf(-alpha);
    // rising factorial α(α+1)…(α+2k−2)
    let mut rising = alpha;
    for (k, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let k = k + 1;
        if k > 1 {
            rising *= (alpha + 2.0 * k as f64 - 3.0) * (alpha + 2.0 * k as f64 - 2.0);
        }
        tail += c * rising * M.powf(-alpha - 2.0 * k as f64 + 1.0);
    }
    Ok(head + tail)
}

/// `Γ_α = Σ_{n≥0} 1/a(n) = 1 + ζ(α)`.
pub fn gamma_alpha(alpha: f64) -> Result<f64> {
    Ok(1.0 + zeta(alpha)?)
}

/// `I_α = ∫₀¹ u^α(1−u)^α du = B(α+1, α+1)`.
pub fn i_alpha(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(statrs::function::beta::beta(alpha + 1.0, alpha + 1.0))
}

/// `I_α` by adaptive Simpson quadrature, as an independent route.
pub fn i_alpha_quadrature(alpha: f64, tol: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let f = |u: f64| (u * (1.0 - u)).powf(alpha);
    // symmetric about ½
    Ok(2.0 * adaptive_simpson(&f, 0.0, 0.5, tol / 2.0, 60))
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LimitConstants {
    pub gamma_alpha: f64,
    pub i_alpha: f64,
    /// `Z = κΓ_α^{κ−1}`.
    pub z: f64,
}

pub fn limit_constants(sites: usize, alpha: f64) -> Result<LimitConstants> {
    let gamma_alpha = gamma_alpha(alpha)?;
    let i_alpha = i_alpha(alpha)?;
    let z = sites as f64 * gamma_alpha.powi(sites as i32 - 1);
    Ok(LimitConstants { gamma_alpha, i_alpha, z })
}

/// `Z_N = N^α Σ_{η∈H_N} 1/a(η)` as the coefficient of `x^N` in
/// `(Σ_n x^n/a(n))^κ`; no enumeration.
pub fn partition_function(sites: usize, particles: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if sites < 1 || particles < 1 {
        return Err(Error::InvalidParameter("need at least one site and one particle".into()));
    }
    let base: Vec<f64> = (0..=particles)
        .map(|n| if n == 0 { 1.0 } else { (n as f64).powf(-alpha) })
        .collect();
    let mut acc = base.clone();
    for _ in 1..sites {
        let mut next = vec![0.0; particles + 1];
        for (i, &a) in acc.iter().enumerate() {
            for (j, &b) in base[..=particles - i].iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        acc = next;
    }
    Ok((particles as f64).powf(alpha) * acc[particles])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zrp::model::{build_zrp, ZrpModel};

    #[test]
    fn zeta_two_is_basel() {
        let z = zeta(2.0).unwrap();
        assert!((z - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-15);
        assert!((gamma_alpha(2.0).unwrap() - 2.644_934_066_848_226).abs() < 1e-14);
    }

    #[test]
    fn zeta_four_and_brute_tail() {
        assert!((zeta(4.0).unwrap() - std::f64::consts::PI.powi(4) / 90.0).abs() < 1e-15);
        // α = 3.5 against a long partial sum plus integral tail
        let n = 200_000;
        let partial: f64 = (1..n).rev().map(|k| (k as f64).powf(-3.5)).sum();
        let tail = (n as f64).powf(-2.5) / 2.5 + 0.5 * (n as f64).powf(-3.5);
        assert!((zeta(3.5).unwrap() - partial - tail).abs() < 1e-14);
    }

    #[test]
    fn i_two_is_one_thirtieth() {
        assert!((i_alpha(2.0).unwrap() - 1.0 / 30.0).abs() < 1e-15);
        for alpha in [1.5, 2.0, 2.7, 4.0] {
            let a = i_alpha(alpha).unwrap();
            let b = i_alpha_quadrature(alpha, 1e-15).unwrap();
            assert!((a - b).abs() < 1e-12, "alpha {alpha}: {a} vs {b}");
        }
    }

    #[test]
    fn alpha_at_most_one_is_rejected() {
        assert!(matches!(gamma_alpha(1.0), Err(Error::AlphaOutOfRange(_))));
        assert!(matches!(i_alpha(0.5), Err(Error::AlphaOutOfRange(_))));
    }

    #[test]
    fn partition_function_matches_enumeration() {
        let m = ZrpModel::new(3, 14, 2.0, 0.7).unwrap();
        let z = build_zrp(&m).unwrap();
        let zn = partition_function(3, 14, 2.0).unwrap();
        assert!((z.partition_function() / zn - 1.0).abs() < 1e-13);
    }

    #[test]
    fn partition_function_converges() {
        let c = limit_constants(3, 2.0).unwrap();
        assert!((c.z - 3.0 * c.gamma_alpha.powi(2)).abs() < 1e-12);
        // the correction decays like log N / N
        let errs: Vec<f64> = [15, 30, 60, 120, 480]
            .iter()
            .map(|&n| (partition_function(3, n, 2.0).unwrap() / c.z - 1.0).abs())
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
        assert!(errs[2] < 0.11 && errs[4] < 0.02, "{errs:?}");
    }
}
