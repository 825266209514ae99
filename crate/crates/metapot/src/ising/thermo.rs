//! Gibbs measure and Metropolis rates in energy-shifted arithmetic.
//!
//! Every Gibbs weight is `e^{−β(H − offset)}` for an explicit integer offset,
//! so sums stay representable at large `β`.

use crate::error::{Error, Result};

use super::lattice::Lattice;

/// Number of configurations at each energy, `g[E]`, `E = 0..=2KL`.
///
/// Row-to-row transfer matrix over `2^K` row states with polynomial entries,
/// `Z = Tr T^L`.
pub fn density_of_states(lat: &Lattice) -> Result<Vec<u128>> {
    let (k, l) = (lat.k(), lat.l());
    if k > 16 {
        return Err(Error::StateSpaceTooLarge { size: 1u128 << k, limit: 1u128 << 16 });
    }
    let rows = 1usize << k;
    let mask = (rows - 1) as u64;
    let row_energy = |s: u64| -> usize {
        let rot = ((s << 1) | (s >> (k - 1))) & mask;
        (s ^ rot).count_ones() as usize
    };
    let deg = 2 * k * l;
    let mut g = vec![0u128; deg + 1];
    for start in 0..rows {
        // poly[t][e]: weighted paths from `start` ending at row state t
        let mut poly = vec![vec![0u128; deg + 1]; rows];
        poly[start][row_energy(start as u64)] = 1;
        for step in 1..=l {
            let mut next = vec![vec![0u128; deg + 1]; rows];
            for (s, ps) in poly.iter().enumerate() {
                if ps.iter().all(|&c| c == 0) {
                    continue;
                }
                for (t, nt) in next.iter_mut().enumerate() {
                    if step == l && t != start {
                        continue;
                    }
                    let add = ((s ^ t) as u64).count_ones() as usize
                        + if step == l { 0 } else { row_energy(t as u64) };
                    for (e, &c) in ps.iter().enumerate() {
                        if c != 0 {
                            nt[e + add] += c;
                        }
                    }
                }
            }
            poly = next;
        }
        for (e, c) in poly[start].iter().enumerate() {
            g[e] += c;
        }
    }
    Ok(g)
}

/// `Σ_σ e^{−β(H(σ) − offset)}` by brute force; `K·L ≤ 24`.
pub fn partition_function_enumerated(lat: &Lattice, beta: f64, offset: i64) -> Result<f64> {
    let n = lat.sites();
    if n > 24 {
        return Err(Error::StateSpaceTooLarge { size: 1u128 << n, limit: 1u128 << 24 });
    }
    let mut counts = vec![0u64; 2 * n + 1];
    for s in 0..(1u64 << n) {
        counts[lat.energy(s) as usize] += 1;
    }
    Ok(counts
        .iter()
        .enumerate()
        .map(|(e, &c)| c as f64 * (-beta * (e as i64 - offset) as f64).exp())
        .sum())
}

/// Energy-shifted Gibbs bookkeeping for one lattice and inverse temperature.
#[derive(Debug, Clone)]
pub struct Gibbs {
    beta: f64,
    offset: i64,
    /// `Z_β ≥ 2`, never small.
    z: f64,
}

impl Gibbs {
    pub fn new(lat: &Lattice, beta: f64, offset: i64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be positive (got {beta})")));
        }
        let g = density_of_states(lat)?;
        let z = g
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(e, &c)| c as f64 * (-beta * e as f64).exp())
            .sum();
        Ok(Self { beta, offset, z })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// `Z_β`.
    pub fn partition_function(&self) -> f64 {
        self.z
    }

    /// `e^{−β(H − offset)}`.
    pub fn weight(&self, energy: i64) -> f64 {
        (-self.beta * (energy - self.offset) as f64).exp()
    }

    /// `e^{β·offset}·μ_β(σ)`.
    pub fn mu_shifted(&self, energy: i64) -> f64 {
        self.weight(energy) / self.z
    }

    /// `e^{β·offset}·μ_β(σ)c_β(σ,ζ) = e^{β·offset}·min{μ_β(σ), μ_β(ζ)}`.
    pub fn conductance_shifted(&self, h_from: i64, h_to: i64) -> f64 {
        self.mu_shifted(h_from.max(h_to))
    }
}

/// `c_β(σ, ζ) = e^{−β[H(ζ) − H(σ)]₊}` when `ζ = σ^x`, zero otherwise.
pub fn metropolis_rate(lat: &Lattice, beta: f64, from: u64, to: u64) -> f64 {
    if !lat.adjacent(from, to) {
        return 0.0;
    }
    let d = lat.energy(to) - lat.energy(from);
    (-beta * d.max(0) as f64).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transfer_matrix_matches_enumeration() {
        for (k, l) in [(2, 2), (3, 4), (4, 4), (2, 7), (4, 5)] {
            let lat = Lattice::new(k, l).unwrap();
            let g = density_of_states(&lat).unwrap();
            let mut brute = vec![0u128; 2 * k * l + 1];
            for s in 0..(1u64 << (k * l)) {
                brute[lat.energy(s) as usize] += 1;
            }
            assert_eq!(g, brute, "{k}x{l}");
        }
    }

    #[test]
    fn density_sums_to_state_count() {
        let lat = Lattice::new(5, 6).unwrap();
        let g = density_of_states(&lat).unwrap();
        assert_eq!(g.iter().sum::<u128>(), 1u128 << 30);
        assert_eq!(g[0], 2);
        assert_eq!(g[4], 60);
    }

    #[test]
    fn partition_function_approaches_two() {
        let lat = Lattice::new(3, 4).unwrap();
        // Z − 2 = O(e^{−2β}); single flips give the leading 2·KL·e^{−4β}
        let mut ratios = Vec::new();
        for beta in [1.0, 2.0, 3.0] {
            let z = Gibbs::new(&lat, beta, 0).unwrap().partition_function();
            let zb = partition_function_enumerated(&lat, beta, 0).unwrap();
            assert!((z / zb - 1.0).abs() < 1e-13);
            ratios.push((z - 2.0) * (4.0 * beta).exp());
        }
        assert!(ratios.windows(2).all(|w| w[1] <= w[0]));
        assert!(ratios[2] < 30.0);
    }

    #[test]
    fn conductance_bookkeeping() {
        let lat = Lattice::new(5, 6).unwrap();
        let g = Gibbs::new(&lat, 3.0, 0).unwrap();
        let s = lat.plus();
        let t = lat.flip(s, 7);
        let lhs = g.mu_shifted(0) * metropolis_rate(&lat, 3.0, s, t) * (3.0 * 4.0f64).exp()
            * g.partition_function();
        assert!((lhs - 1.0).abs() < 1e-12);
        // detailed balance
        let a = g.mu_shifted(lat.energy(s)) * metropolis_rate(&lat, 3.0, s, t);
        let b = g.mu_shifted(lat.energy(t)) * metropolis_rate(&lat, 3.0, t, s);
        assert!((a - b).abs() <= 1e-15 * a);
    }

    #[test]
    fn offset_cancels_in_shifted_mass() {
        let lat = Lattice::new(5, 6).unwrap();
        let g = Gibbs::new(&lat, 8.0, 12).unwrap();
        assert!((g.mu_shifted(12) * g.partition_function() - 1.0).abs() < 1e-15);
        assert!(g.partition_function() > 2.0 && g.partition_function() < 2.0 + 1e-12);
    }

    #[test]
    fn ground_state_mass_tends_to_half() {
        let lat = Lattice::new(3, 4).unwrap();
        let mut prev = 0.0;
        for beta in [1.0, 2.0, 3.0, 4.0] {
            let m = Gibbs::new(&lat, beta, 0).unwrap().mu_shifted(0);
            assert!(m > prev && m < 0.5);
            prev = m;
        }
        assert!(0.5 - prev < 1e-5);
    }
}
