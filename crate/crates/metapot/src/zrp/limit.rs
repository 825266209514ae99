//! The limiting valley chain `Y` on `S = T_κ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::markov::{cycle_walk, MarkovProcess};
use crate::potential::{self, Variant};

use super::constants::{limit_constants, LimitConstants};

/// `Y` with rates `a(x,y) = κ/(Γ_α I_α)·cap_X(x,y)` and uniform measure.
#[derive(Debug, Clone)]
pub struct LimitChain {
    pub sites: usize,
    pub alpha: f64,
    pub p: f64,
    pub constants: LimitConstants,
    /// `cap_X(x,y)` of the underlying walk, `x ≠ y`.
    pub cap_x: Vec<Vec<f64>>,
    pub process: MarkovProcess,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LimitChainSummary {
    pub sites: usize,
    pub alpha: f64,
    pub p: f64,
    pub constants: LimitConstants,
    pub cap_x: Vec<Vec<f64>>,
    pub rates: Vec<Vec<f64>>,
}

pub fn limit_chain(sites: usize, alpha: f64, p: f64) -> Result<LimitChain> {
    let constants = limit_constants(sites, alpha)?;
    let walk = cycle_walk(sites, p)?;
    let mut cap_x = vec![vec![0.0; sites]; sites];
    for (x, row) in cap_x.iter_mut().enumerate() {
        for (y, c) in row.iter_mut().enumerate() {
            if x != y {
                *c = potential::capacity(&walk, &[x], &[y])?.value;
            }
        }
    }
    let scale = sites as f64 / (constants.gamma_alpha * constants.i_alpha);
    let mut rates = Vec::with_capacity(sites * sites);
    for (x, row) in cap_x.iter().enumerate() {
        for (y, &c) in row.iter().enumerate() {
            if x != y {
                rates.push((x, y, scale * c));
            }
        }
    }
    let labels = (0..sites).map(|x| x.to_string()).collect();
    let process = MarkovProcess::with_measure(labels, &rates, vec![1.0; sites])?;
    Ok(LimitChain { sites, alpha, p, constants, cap_x, process })
}

impl LimitChain {
    /// `a(x,y)`.
    pub fn rate(&self, x: usize, y: usize) -> f64 {
        self.process.rate(x, y)
    }

    /// `cap_Y(A,B) = 𝔇_Y(𝔥_{A,B})` by exact solve.
    pub fn capacity(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        Ok(potential::capacity(&self.process, a, b)?.value)
    }

    /// `𝔥_{A,B}`.
    pub fn potential(&self, a: &[usize], b: &[usize]) -> Result<Vec<f64>> {
        Ok(potential::equilibrium_potential(&self.process, a, b, Variant::Plain)?.into_vec())
    }

    /// `(1/(Γ_α I_α)) Σ_{x∈A, y∈B} cap_X(x,y)` for a partition `A ∪ B = S`.
    pub fn partition_capacity(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        if a.len() + b.len() != self.sites {
            return Err(Error::InvalidParameter("A and B must partition the sites".into()));
        }
        let s: f64 = a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).map(|(x, y)| self.cap_x[x][y]).sum();
        Ok(s / (self.constants.gamma_alpha * self.constants.i_alpha))
    }

    /// `cap_X(x,y)/Σ_{z≠x} cap_X(x,z)`, the limiting first-jump law from `x`.
    pub fn jump_distribution(&self, x: usize) -> Vec<f64> {
        let total: f64 = (0..self.sites).filter(|&z| z != x).map(|z| self.cap_x[x][z]).sum();
        (0..self.sites).map(|y| if y == x { 0.0 } else { self.cap_x[x][y] / total }).collect()
    }

    /// `Σ_{y≠x} a(x,y)`, the limiting holding rate.
    pub fn holding_rate(&self, x: usize) -> f64 {
        self.process.holding_rate(x)
    }

    pub fn summary(&self) -> LimitChainSummary {
        let rates = (0..self.sites).map(|x| (0..self.sites).map(|y| self.rate(x, y)).collect()).collect();
        LimitChainSummary {
            sites: self.sites,
            alpha: self.alpha,
            p: self.p,
            constants: self.constants,
            cap_x: self.cap_x.clone(),
            rates,
        }
    }
}
