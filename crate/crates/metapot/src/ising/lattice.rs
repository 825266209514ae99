//! Spin configurations on the torus `T_K × T_L`.
//!
//! Site `(k, ℓ)` (column `k ∈ T_K`, row `ℓ ∈ T_L`) is bit `ℓK + k`; a set bit
//! is spin `+`. Every site carries a right bond and an up bond, so
//! `H(σ) = #{disagreeing bonds}` counts each of the `2KL` bonds once.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A bit-packed configuration together with its lattice dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SpinConfig {
    pub k: usize,
    pub l: usize,
    pub bits: u64,
}

impl fmt::Display for SpinConfig {
    /// Rows from top (`ℓ = L−1`) to bottom, `+`/`-` per site.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in (0..self.l).rev() {
            for col in 0..self.k {
                let up = self.bits >> (row * self.k + col) & 1 == 1;
                f.write_str(if up { "+" } else { "-" })?;
            }
            if row > 0 {
                f.write_str("\n")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Lattice {
    k: usize,
    l: usize,
    full: u64,
    col0: u64,
    /// Left, right, down, up neighbours of each site.
    nbrs: Vec<[u8; 4]>,
}

/// Rows and columns that are monochromatic, with per-line bond energies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BridgeCensus {
    pub plus_bridges: usize,
    pub minus_bridges: usize,
    pub row_energies: Vec<u32>,
    pub col_energies: Vec<u32>,
}

impl BridgeCensus {
    /// `2[K + L − B₊ − B₋]`.
    pub fn lower_bound(&self) -> i64 {
        2 * (self.col_energies.len() + self.row_energies.len()) as i64
            - 2 * (self.plus_bridges + self.minus_bridges) as i64
    }
}

impl Lattice {
    pub fn new(k: usize, l: usize) -> Result<Self> {
        if k < 2 || l < 2 {
            return Err(Error::InvalidParameter(format!("lattice {k}x{l} needs both sides >= 2")));
        }
        let n = k * l;
        if n > 64 {
            return Err(Error::StateSpaceTooLarge { size: 1u128 << n.min(127), limit: 1u128 << 64 });
        }
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let col0 = (0..l).fold(0u64, |m, r| m | 1u64 << (r * k));
        let nbrs = (0..n)
            .map(|x| {
                let (c, r) = (x % k, x / k);
                [
                    (r * k + (c + k - 1) % k) as u8,
                    (r * k + (c + 1) % k) as u8,
                    (((r + l - 1) % l) * k + c) as u8,
                    (((r + 1) % l) * k + c) as u8,
                ]
            })
            .collect();
        Ok(Self { k, l, full, col0, nbrs })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn sites(&self) -> usize {
        self.k * self.l
    }

    pub fn site(&self, col: usize, row: usize) -> usize {
        (row % self.l) * self.k + col % self.k
    }

    /// `⊞`.
    pub fn plus(&self) -> u64 {
        self.full
    }

    /// `⊟`.
    pub fn minus(&self) -> u64 {
        0
    }

    pub fn config(&self, bits: u64) -> SpinConfig {
        SpinConfig { k: self.k, l: self.l, bits }
    }

    pub fn plus_count(&self, s: u64) -> usize {
        s.count_ones() as usize
    }

    /// `σ^x`.
    pub fn flip(&self, s: u64, x: usize) -> u64 {
        s ^ (1u64 << x)
    }

    pub fn energy(&self, s: u64) -> i64 {
        let k = self.k;
        let n = self.sites();
        let up = if n == k { s } else { ((s << k) | (s >> (n - k))) & self.full };
        let right = ((s << 1) & !self.col0 & self.full) | ((s >> (k - 1)) & self.col0);
        ((s ^ up).count_ones() + (s ^ right).count_ones()) as i64
    }

    /// `H(σ^x) − H(σ)`.
    pub fn flip_delta(&self, s: u64, x: usize) -> i64 {
        let me = s >> x & 1;
        self.nbrs[x]
            .iter()
            .map(|&y| if s >> y & 1 == me { 1 } else { -1 })
            .sum()
    }

    /// Configurations one flip away from `s`.
    pub fn flips(&self, s: u64) -> impl Iterator<Item = u64> + '_ {
        (0..self.sites()).map(move |x| s ^ (1u64 << x))
    }

    /// Whether `a` and `b` differ at exactly one site.
    pub fn adjacent(&self, a: u64, b: u64) -> bool {
        (a ^ b).count_ones() == 1
    }

    pub fn row_bits(&self, s: u64, row: usize) -> u64 {
        (s >> (row * self.k)) & ((1u64 << self.k) - 1)
    }

    pub fn bridge_census(&self, s: u64) -> BridgeCensus {
        let (k, l) = (self.k, self.l);
        let spin = |c: usize, r: usize| s >> self.site(c, r) & 1;
        let mut plus_bridges = 0;
        let mut minus_bridges = 0;
        let mut row_energies = Vec::with_capacity(l);
        for r in 0..l {
            let e = (0..k).filter(|&c| spin(c, r) != spin(c + 1, r)).count() as u32;
            let ones = (0..k).filter(|&c| spin(c, r) == 1).count();
            if ones == k {
                plus_bridges += 1;
            } else if ones == 0 {
                minus_bridges += 1;
            }
            row_energies.push(e);
        }
        let mut col_energies = Vec::with_capacity(k);
        for c in 0..k {
            let e = (0..l).filter(|&r| spin(c, r) != spin(c, r + 1)).count() as u32;
            let ones = (0..l).filter(|&r| spin(c, r) == 1).count();
            if ones == l {
                plus_bridges += 1;
            } else if ones == 0 {
                minus_bridges += 1;
            }
            col_energies.push(e);
        }
        BridgeCensus { plus_bridges, minus_bridges, row_energies, col_energies }
    }
}
