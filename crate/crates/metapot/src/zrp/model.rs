//! Zero-range process on the discrete torus `T_κ`: state enumeration, rates
//! and the closed-form invariant measure.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::markov::MarkovProcess;

/// Default limit on `|H_N|`.
pub const DEFAULT_STATE_BUDGET: usize = 200_000;

/// Parameters `(κ, N, α, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ZrpModel {
    pub sites: usize,
    pub particles: usize,
    pub alpha: f64,
    pub p: f64,
}

impl ZrpModel {
    pub fn new(sites: usize, particles: usize, alpha: f64, p: f64) -> Result<Self> {
        if sites < 2 {
            return Err(Error::InvalidParameter(format!("cycle length {sites} < 2")));
        }
        if particles == 0 {
            return Err(Error::InvalidParameter("at least one particle is required".into()));
        }
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!("p = {p} outside (0,1)")));
        }
        Ok(Self { sites, particles, alpha, p })
    }

    /// Same parameters with a different particle number.
    pub fn with_particles(&self, particles: usize) -> Result<Self> {
        Self::new(self.sites, particles, self.alpha, self.p)
    }

    /// `a(0) = 1`, `a(n) = n^α`.
    pub fn a(&self, n: u32) -> f64 {
        if n == 0 { 1.0 } else { (n as f64).powf(self.alpha) }
    }

    /// `g(n) = a(n)/a(n−1)` for `n ≥ 1`, `g(0) = 0`.
    pub fn g(&self, n: u32) -> f64 {
        match n {
            0 => 0.0,
            1 => 1.0,
            _ => (n as f64 / (n - 1) as f64).powf(self.alpha),
        }
    }

    /// `r(x, x+1) = p`, `r(x, x−1) = 1 − p`; on two sites both moves coincide.
    pub fn walk_rate(&self, x: usize, y: usize) -> f64 {
        let k = self.sites;
        let mut r = 0.0;
        if y == (x + 1) % k {
            r += self.p;
        }
        if y == (x + k - 1) % k {
            r += 1.0 - self.p;
        }
        r
    }

    /// `θ = (1+α)/(1+(κ−1)α)`, the upper exponent of the valley window.
    pub fn theta(&self) -> f64 {
        (1.0 + self.alpha) / (1.0 + (self.sites as f64 - 1.0) * self.alpha)
    }

    /// `ℓ_N = ⌈N^{θ/2}⌉`.
    pub fn valley_width(&self) -> usize {
        ((self.particles as f64).powf(self.theta() / 2.0).ceil() as usize).max(1)
    }

    /// `C(N+κ−1, κ−1)`.
    pub fn state_count(&self) -> u128 {
        binomial((self.particles + self.sites - 1) as u64, (self.sites - 1) as u64)
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

/// `H_N` in colexicographic order of the bar positions
/// `b_j = η_0 + … + η_j + j`, `j < κ−1`; the rank is `Σ_j C(b_j, j+1)`.
#[derive(Debug, Clone)]
pub struct StateSpace {
    sites: usize,
    particles: usize,
    occ: Vec<u32>,
    /// `binom[n][k]` for `n ≤ N+κ−1`, `k ≤ κ−1`.
    binom: Vec<Vec<usize>>,
}

impl StateSpace {
    pub fn new(sites: usize, particles: usize, budget: usize) -> Result<Self> {
        let size = binomial((particles + sites - 1) as u64, (sites - 1) as u64);
        if size > budget as u128 {
            return Err(Error::StateSpaceTooLarge { size, limit: budget as u128 });
        }
        let top = particles + sites;
        let binom: Vec<Vec<usize>> = (0..=top)
            .map(|n| (0..sites).map(|k| binomial(n as u64, k as u64) as usize).collect())
            .collect();
        let mut space = Self { sites, particles, occ: Vec::new(), binom };
        let len = size as usize;
        let mut occ = Vec::with_capacity(len * sites);
        for r in 0..len {
            occ.extend(space.unrank(r));
        }
        space.occ = occ;
        Ok(space)
    }

    pub fn len(&self) -> usize {
        self.occ.len() / self.sites
    }

    pub fn is_empty(&self) -> bool {
        self.occ.is_empty()
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn config(&self, i: usize) -> &[u32] {
        &self.occ[i * self.sites..(i + 1) * self.sites]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.occ.chunks_exact(self.sites)
    }

    /// Index of `η`; `η` must hold `N` particles on `κ` sites.
    pub fn rank(&self, eta: &[u32]) -> usize {
        debug_assert_eq!(eta.iter().map(|&n| n as usize).sum::<usize>(), self.particles);
        let mut partial = 0usize;
        let mut r = 0usize;
        for (j, &n) in eta[..self.sites - 1].iter().enumerate() {
            partial += n as usize;
            r += self.binom[partial + j][j + 1];
        }
        r
    }

    fn unrank(&self, mut r: usize) -> Vec<u32> {
        let k = self.sites - 1;
        let mut bars = vec![0usize; k];
        let mut hi = self.particles + k;
        for j in (0..k).rev() {
            // largest b < hi with C(b, j+1) ≤ r
            let mut b = hi - 1;
            while self.binom[b][j + 1] > r {
                b -= 1;
            }
            bars[j] = b;
            r -= self.binom[b][j + 1];
            hi = b;
        }
        let mut eta = vec![0u32; self.sites];
        let mut prev = 0usize;
        for j in 0..k {
            let start = if j == 0 { 0 } else { bars[j - 1] + 1 };
            eta[j] = (bars[j] - start) as u32;
            prev = bars[j] + 1;
        }
        eta[k] = (self.particles + k - prev) as u32;
        eta
    }

    /// Index of the configuration with all particles at `x`.
    pub fn condensate(&self, x: usize) -> usize {
        let mut eta = vec![0u32; self.sites];
        eta[x] = self.particles as u32;
        self.rank(&eta)
    }
}

pub fn format_config(eta: &[u32]) -> String {
    let parts: Vec<String> = eta.iter().map(|n| n.to_string()).collect();
    format!("({})", parts.join(","))
}

/// The metastable valleys `E_N^x = {η_x ≥ N − ℓ_N}` and the rest `Δ_N`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Valleys {
    pub width: usize,
    /// `valley[x]`: sorted indices of `E_N^x`.
    pub valley: Vec<Vec<usize>>,
    pub delta: Vec<usize>,
    /// `label[i] = Some(x)` for `i ∈ E_N^x`.
    pub label: Vec<Option<usize>>,
}

impl Valleys {
    /// `E_N(A) = ∪_{x∈A} E_N^x`.
    pub fn union(&self, sites: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = sites.iter().flat_map(|&x| self.valley[x].iter().copied()).collect();
        out.sort_unstable();
        out
    }

    /// `Ĕ_N^x`.
    pub fn others(&self, x: usize) -> Vec<usize> {
        let rest: Vec<usize> = (0..self.valley.len()).filter(|&z| z != x).collect();
        self.union(&rest)
    }

    /// `Ĕ_N^{x,y}`.
    pub fn others2(&self, x: usize, y: usize) -> Vec<usize> {
        let rest: Vec<usize> = (0..self.valley.len()).filter(|&z| z != x && z != y).collect();
        self.union(&rest)
    }

    pub fn all(&self) -> Vec<usize> {
        self.union(&(0..self.valley.len()).collect::<Vec<_>>())
    }
}

/// A built zero-range process with its state space and closed-form measure.
#[derive(Debug, Clone)]
pub struct ZrpProcess {
    pub model: ZrpModel,
    pub space: StateSpace,
    pub process: MarkovProcess,
    /// `1/a(η)`, unnormalized.
    pub weights: Vec<f64>,
}

/// Generator `Σ_{x,y} g(η_x) r(x,y)[f(σ^{x,y}η) − f(η)]` on `H_N`.
pub fn build_zrp(model: &ZrpModel) -> Result<ZrpProcess> {
    build_zrp_with_budget(model, DEFAULT_STATE_BUDGET)
}

pub fn build_zrp_with_budget(model: &ZrpModel, budget: usize) -> Result<ZrpProcess> {
    let space = StateSpace::new(model.sites, model.particles, budget)?;
    let k = model.sites;
    let mut rates = Vec::with_capacity(space.len() * 2 * k);
    let mut weights = Vec::with_capacity(space.len());
    let mut labels = Vec::with_capacity(space.len());
    let mut target = vec![0u32; k];
    for (i, eta) in space.iter().enumerate() {
        labels.push(format_config(eta));
        weights.push(1.0 / eta.iter().map(|&n| model.a(n)).product::<f64>());
        for x in 0..k {
            if eta[x] == 0 {
                continue;
            }
            let gx = model.g(eta[x]);
            for (y, r) in [((x + 1) % k, model.p), ((x + k - 1) % k, 1.0 - model.p)] {
                target.copy_from_slice(eta);
                target[x] -= 1;
                target[y] += 1;
                rates.push((i, space.rank(&target), gx * r));
            }
        }
    }
    if space.len() == 1 {
        return Err(Error::InvalidParameter("state space has a single configuration".into()));
    }
    let process = MarkovProcess::with_measure(labels, &rates, weights.clone())?;
    Ok(ZrpProcess { model: *model, space, process, weights })
}

impl ZrpProcess {
    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    /// `Z_N = N^α Σ_η 1/a(η)`.
    pub fn partition_function(&self) -> f64 {
        (self.model.particles as f64).powf(self.model.alpha) * self.weights.iter().sum::<f64>()
    }

    pub fn mu(&self, i: usize) -> f64 {
        self.process.mu(i)
    }

    pub fn mass(&self, set: &[usize]) -> f64 {
        set.iter().map(|&i| self.process.mu(i)).sum()
    }

    /// Largest `|μ_solver/μ_closed − 1|` against an independent solve.
    pub fn measure_deviation(&self) -> Result<f64> {
        let solved = MarkovProcess::new(self.process.labels().to_vec(), &self.process.rate_triplets())?;
        Ok((0..self.len())
            .map(|i| (solved.mu(i) / self.process.mu(i) - 1.0).abs())
            .fold(0.0, f64::max))
    }

    pub fn valleys(&self) -> Result<Valleys> {
        self.valleys_with_width(self.model.valley_width())
    }

    /// Valleys for an explicit width `ℓ` with `2ℓ < N`.
    pub fn valleys_with_width(&self, width: usize) -> Result<Valleys> {
        let n = self.model.particles;
        if 2 * width >= n {
            return Err(Error::ValleysOverlap { width, particles: n });
        }
        let k = self.model.sites;
        let mut valley = vec![Vec::new(); k];
        let mut delta = Vec::new();
        let mut label = vec![None; self.len()];
        let floor = (n - width) as u32;
        for (i, eta) in self.space.iter().enumerate() {
            match (0..k).find(|&x| eta[x] >= floor) {
                Some(x) => {
                    valley[x].push(i);
                    label[i] = Some(x);
                }
                None => delta.push(i),
            }
        }
        Ok(Valleys { width, valley, delta, label })
    }
}
