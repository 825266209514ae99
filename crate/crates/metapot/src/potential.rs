//! Equilibrium potentials, capacities, equilibrium measures and
//! mean-hitting functionals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::markov::{MarkovProcess, Measure, PotentialFunction};

/// Which process the potential is taken with respect to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Plain,
    Adjoint,
    Symmetrized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    DirichletOfH,
    EscapeFormula,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapacityReport {
    pub value: f64,
    pub route: Route,
    pub residual: f64,
    #[serde(rename = "A")]
    pub a: Vec<String>,
    #[serde(rename = "B")]
    pub b: Vec<String>,
}

/// Rejects empty, out-of-range or overlapping sets.
pub fn validate_sets(p: &MarkovProcess, a: &[usize], b: &[usize]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut mark = vec![0u8; p.n()];
    for &x in a {
        if x >= p.n() {
            return Err(Error::UnknownState(format!("index {x}")));
        }
        mark[x] |= 1;
    }
    for &x in b {
        if x >= p.n() {
            return Err(Error::UnknownState(format!("index {x}")));
        }
        if mark[x] & 1 == 1 {
            return Err(Error::OverlappingSets(p.label(x).to_string()));
        }
        mark[x] |= 2;
    }
    Ok(())
}

fn chain_for(p: &MarkovProcess, variant: Variant) -> std::borrow::Cow<'_, MarkovProcess> {
    match variant {
        Variant::Plain => std::borrow::Cow::Borrowed(p),
        Variant::Adjoint => std::borrow::Cow::Owned(p.adjoint()),
        Variant::Symmetrized => std::borrow::Cow::Owned(p.symmetrize()),
    }
}

/// Solves `(−L)u = source` off the fixed states, with `u` prescribed on them.
/// Returns the solution and the relative residual `max |Lu + source| / λ`.
pub fn dirichlet_problem(
    p: &MarkovProcess,
    fixed: &[(usize, f64)],
    source: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let n = p.n();
    let mut slot: Vec<Option<usize>> = vec![None; n];
    let mut u = vec![0.0; n];
    let mut is_fixed = vec![false; n];
    for &(x, v) in fixed {
        is_fixed[x] = true;
        u[x] = v;
    }
    let interior: Vec<usize> = (0..n).filter(|&x| !is_fixed[x]).collect();
    for (i, &x) in interior.iter().enumerate() {
        slot[x] = Some(i);
    }
    if interior.is_empty() {
        return Ok((u, 0.0));
    }
    let m = interior.len();
    let mut t = Vec::with_capacity(m * 5);
    let mut rhs = vec![0.0; m];
    for (i, &x) in interior.iter().enumerate() {
        t.push((i, i, p.holding_rate(x)));
        rhs[i] = source[x];
        for &(y, r) in p.rates_from(x) {
            match slot[y] {
                Some(j) => t.push((i, j, -r)),
                None => rhs[i] += r * u[y],
            }
        }
    }
    let sol = linalg::solve(m, &t, &rhs)?;
    for (i, &x) in interior.iter().enumerate() {
        u[x] = sol[i];
    }
    let lu = p.apply_generator(&u);
    let residual = interior
        .iter()
        .map(|&x| (lu[x] + source[x]).abs() / p.holding_rate(x))
        .fold(0.0, f64::max);
    Ok((u, residual))
}

fn harmonic(p: &MarkovProcess, a: &[usize], b: &[usize]) -> Result<(Vec<f64>, f64)> {
    let fixed: Vec<(usize, f64)> = a
        .iter()
        .map(|&x| (x, 1.0))
        .chain(b.iter().map(|&x| (x, 0.0)))
        .collect();
    dirichlet_problem(p, &fixed, &vec![0.0; p.n()])
}

/// `h_{A,B}(x) = P_x[τ_A < τ_B]` for the chosen process.
pub fn equilibrium_potential(
    p: &MarkovProcess,
    a: &[usize],
    b: &[usize],
    variant: Variant,
) -> Result<PotentialFunction> {
    validate_sets(p, a, b)?;
    let q = chain_for(p, variant);
    Ok(harmonic(&q, a, b)?.0.into())
}

/// Equilibrium potential together with its harmonicity residual.
pub fn equilibrium_potential_with_residual(
    p: &MarkovProcess,
    a: &[usize],
    b: &[usize],
    variant: Variant,
) -> Result<(PotentialFunction, f64)> {
    validate_sets(p, a, b)?;
    let q = chain_for(p, variant);
    let (h, r) = harmonic(&q, a, b)?;
    Ok((h.into(), r))
}

fn labels(p: &MarkovProcess, s: &[usize]) -> Vec<String> {
    s.iter().map(|&x| p.label(x).to_string()).collect()
}

/// `cap(A,B) = D(h_{A,B})`.
pub fn capacity(p: &MarkovProcess, a: &[usize], b: &[usize]) -> Result<CapacityReport> {
    validate_sets(p, a, b)?;
    let (h, residual) = harmonic(p, a, b)?;
    Ok(CapacityReport {
        value: p.dirichlet_form(&h),
        route: Route::DirichletOfH,
        residual,
        a: labels(p, a),
        b: labels(p, b),
    })
}

/// Per-state escape mass `M(x)P_x[τ_B < τ_A⁺] = μ(x)Σ_y r(x,y)h_{B,A}(y)` on `A`.
fn escape_masses(p: &MarkovProcess, a: &[usize], b: &[usize]) -> Result<(Vec<(usize, f64)>, f64)> {
    let (g, residual) = harmonic(p, b, a)?;
    let masses = a
        .iter()
        .map(|&x| {
            let s: f64 = p.rates_from(x).iter().map(|&(y, r)| r * g[y]).sum();
            (x, p.mu(x) * s)
        })
        .collect();
    Ok((masses, residual))
}

/// `cap(A,B) = Σ_{x∈A} M(x)P_x[τ_B < τ_A⁺]`.
pub fn capacity_via_escape(p: &MarkovProcess, a: &[usize], b: &[usize]) -> Result<CapacityReport> {
    validate_sets(p, a, b)?;
    let (masses, residual) = escape_masses(p, a, b)?;
    Ok(CapacityReport {
        value: masses.iter().map(|e| e.1).sum(),
        route: Route::EscapeFormula,
        residual,
        a: labels(p, a),
        b: labels(p, b),
    })
}

/// `ν_{A,B}(x) = M(x)P_x[τ_B < τ_A⁺] / cap(A,B)` on `A`, zero elsewhere.
pub fn equilibrium_measure(
    p: &MarkovProcess,
    a: &[usize],
    b: &[usize],
    variant: Variant,
) -> Result<Measure> {
    validate_sets(p, a, b)?;
    let q = chain_for(p, variant);
    let (masses, _) = escape_masses(&q, a, b)?;
    let cap: f64 = masses.iter().map(|e| e.1).sum();
    if !(cap > 0.0) {
        return Err(Error::ZeroCapacity);
    }
    let mut w = vec![0.0; p.n()];
    for (x, m) in masses {
        w[x] = m / cap;
    }
    Ok(Measure::new(w, true))
}

/// `⟨f, h†_{A,B}⟩_μ / cap(A,B)`, the expected integral of `f` up to `τ_B`
/// started from `ν†_{A,B}`.
pub fn mean_hitting_functional(p: &MarkovProcess, a: &[usize], b: &[usize], f: &[f64]) -> Result<f64> {
    validate_sets(p, a, b)?;
    let hd = equilibrium_potential(p, a, b, Variant::Adjoint)?;
    let cap = capacity(p, a, b)?.value;
    if !(cap > 0.0) {
        return Err(Error::ZeroCapacity);
    }
    Ok(p.inner_product_mu(f, &hd) / cap)
}

/// `E_z[τ_B] = Σ_x h†_{z,B}(x)μ(x) / cap(z,B)`; zero when `z ∈ B`.
pub fn mean_hitting_time(p: &MarkovProcess, z: usize, b: &[usize]) -> Result<f64> {
    if b.contains(&z) {
        return Ok(0.0);
    }
    mean_hitting_functional(p, &[z], b, &vec![1.0; p.n()])
}

/// Direct solve of `(−L)u = f` off `B`, `u = 0` on `B`: expected integral of
/// `f` before `τ_B` from every start.
pub fn occupation_before_hitting(p: &MarkovProcess, b: &[usize], f: &[f64]) -> Result<Vec<f64>> {
    if b.is_empty() {
        return Err(Error::EmptySet);
    }
    let fixed: Vec<(usize, f64)> = b.iter().map(|&x| (x, 0.0)).collect();
    Ok(dirichlet_problem(p, &fixed, f)?.0)
}

/// Expected hitting times of `B` from every state by a direct solve.
pub fn hitting_times_direct(p: &MarkovProcess, b: &[usize]) -> Result<Vec<f64>> {
    occupation_before_hitting(p, b, &vec![1.0; p.n()])
}

/// `h_{A,B}(x) ≤ cap(x,A)/cap(x,A∪B)`: returns the bound and whether it holds.
pub fn potential_bound(p: &MarkovProcess, x: usize, a: &[usize], b: &[usize]) -> Result<(f64, bool)> {
    validate_sets(p, a, b)?;
    if a.contains(&x) || b.contains(&x) {
        return Err(Error::OverlappingSets(p.label(x).to_string()));
    }
    let ab: Vec<usize> = a.iter().chain(b).copied().collect();
    let num = capacity(p, &[x], a)?.value;
    let den = capacity(p, &[x], &ab)?.value;
    let bound = num / den;
    let h = equilibrium_potential(p, a, b, Variant::Plain)?;
    Ok((bound, h[x] <= bound + 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::cycle_walk;

    #[test]
    fn symmetric_cycle_potential_is_half_between() {
        let c = cycle_walk(4, 0.5).unwrap();
        let h = equilibrium_potential(&c, &[0], &[2], Variant::Plain).unwrap();
        assert_eq!(h[0], 1.0);
        assert_eq!(h[2], 0.0);
        assert!((h[1] - 0.5).abs() < 1e-15);
        assert!((h[3] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quarter_cycle_capacity_is_one_eighth() {
        // four edges of conductance 1/8, two parallel paths of two in series
        let c = cycle_walk(4, 0.5).unwrap();
        let d = capacity(&c, &[0], &[2]).unwrap().value;
        let e = capacity_via_escape(&c, &[0], &[2]).unwrap().value;
        assert!((d - 0.125).abs() < 1e-15);
        assert!((e - 0.125).abs() < 1e-15);
    }

    #[test]
    fn set_errors() {
        let c = cycle_walk(4, 0.5).unwrap();
        assert!(matches!(capacity(&c, &[0], &[0]), Err(Error::OverlappingSets(_))));
        assert!(matches!(capacity(&c, &[], &[1]), Err(Error::EmptySet)));
    }

    #[test]
    fn partition_capacity_is_edge_sum() {
        let c = cycle_walk(4, 0.7).unwrap();
        let r = capacity(&c, &[0, 1], &[2, 3]).unwrap();
        // D(1_A) = Σ over the two cut edges of c^s = 2 · (1/8)
        assert!((r.value - 0.25).abs() < 1e-15);
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn singleton_equilibrium_measure_is_dirac() {
        let c = cycle_walk(6, 0.7).unwrap();
        let nu = equilibrium_measure(&c, &[2], &[5], Variant::Adjoint).unwrap();
        assert!((nu[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn interior_of_a_gets_no_equilibrium_mass() {
        let c = cycle_walk(8, 0.7).unwrap();
        let nu = equilibrium_measure(&c, &[0, 1, 2], &[5], Variant::Plain).unwrap();
        assert_eq!(nu[1], 0.0);
        assert!((nu.total() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn cycle_hitting_time_matches_gambler_formula() {
        // symmetric walk with unit total rate: E_0[τ_3] on a 6-cycle = 3·3
        let c = cycle_walk(6, 0.5).unwrap();
        let t = mean_hitting_time(&c, 0, &[3]).unwrap();
        assert!((t - 9.0).abs() < 1e-12);
        let d = hitting_times_direct(&c, &[3]).unwrap();
        assert!((d[0] - 9.0).abs() < 1e-12);
    }

    #[test]
    fn potential_bound_on_symmetric_cycle() {
        let c = cycle_walk(6, 0.5).unwrap();
        let (bound, holds) = potential_bound(&c, 1, &[0], &[3]).unwrap();
        assert!(holds);
        assert!(bound <= 1.0);
    }
}
