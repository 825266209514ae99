//! Finite-state continuous-time Markov processes.
//!
//! A [`MarkovProcess`] owns its state labels, its sparse rate table and its
//! invariant measure. Everything downstream (potentials, flows, collapsing,
//! the model packs) reads these three things and nothing else.

use std::collections::{HashMap, VecDeque};
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Nonnegative state-indexed weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    weights: Vec<f64>,
    normalized: bool,
}

impl Measure {
    pub fn new(weights: Vec<f64>, normalized: bool) -> Self {
        Self { weights, normalized }
    }

    /// Rescales to total mass one.
    pub fn normalized(weights: Vec<f64>) -> Self {
        let total: f64 = weights.iter().sum();
        Self {
            weights: weights.into_iter().map(|w| w / total).collect(),
            normalized: true,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn of_set(&self, set: &[usize]) -> f64 {
        set.iter().map(|&x| self.weights[x]).sum()
    }
}

impl Deref for Measure {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.weights
    }
}

/// A real function on the state set.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialFunction {
    values: Vec<f64>,
}

impl PotentialFunction {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }
}

impl Deref for PotentialFunction {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl From<Vec<f64>> for PotentialFunction {
    fn from(values: Vec<f64>) -> Self {
        Self { values }
    }
}

/// Jump chain of a process together with its invariant measure `M = λμ`.
#[derive(Debug, Clone)]
pub struct EmbeddedChain {
    jump: Vec<Vec<(usize, f64)>>,
    measure: Measure,
}

impl EmbeddedChain {
    pub fn jump_probs(&self, x: usize) -> &[(usize, f64)] {
        &self.jump[x]
    }

    pub fn jump_prob(&self, x: usize, y: usize) -> f64 {
        lookup(&self.jump[x], y)
    }

    /// `M(x) = λ(x)μ(x)`, not normalized.
    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    /// `p†(x,y) = M(y)p(y,x)/M(x)` for every `y` with `p(y,x) > 0`.
    pub fn adjoint_jump_probs(&self, x: usize) -> Vec<(usize, f64)> {
        let m = &self.measure;
        let mut out: Vec<(usize, f64)> = (0..self.jump.len())
            .filter_map(|y| {
                let p = lookup(&self.jump[y], x);
                (p > 0.0).then(|| (y, m[y] * p / m[x]))
            })
            .collect();
        out.sort_by_key(|e| e.0);
        out
    }
}

fn lookup(row: &[(usize, f64)], y: usize) -> f64 {
    match row.binary_search_by_key(&y, |e| e.0) {
        Ok(k) => row[k].1,
        Err(_) => 0.0,
    }
}

/// An irreducible finite-state continuous-time Markov process.
#[derive(Debug, Clone)]
pub struct MarkovProcess {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    out: Vec<Vec<(usize, f64)>>,
    inc: Vec<Vec<(usize, f64)>>,
    holding: Vec<f64>,
    mu: Measure,
}

impl MarkovProcess {
    /// Builds a process from dense indices; duplicate rate entries are summed
    /// and zero rates dropped. Solves for the invariant measure.
    pub fn new(labels: Vec<String>, rates: &[(usize, usize, f64)]) -> Result<Self> {
        let mut p = Self::unsolved(labels, rates)?;
        p.mu = p.solve_invariant_measure()?;
        Ok(p)
    }

    /// Builds a process whose invariant measure is known in closed form.
    /// The supplied weights are normalized and checked for stationarity.
    pub fn with_measure(
        labels: Vec<String>,
        rates: &[(usize, usize, f64)],
        weights: Vec<f64>,
    ) -> Result<Self> {
        let mut p = Self::unsolved(labels, rates)?;
        if weights.len() != p.n() || weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter(
                "measure must be strictly positive on every state".into(),
            ));
        }
        p.mu = Measure::normalized(weights);
        let scale = (0..p.n())
            .map(|x| p.mu[x] * p.holding[x])
            .fold(0.0, f64::max);
        let res = p.stationarity_residual();
        if res > 1e-10 * scale {
            return Err(Error::SolveFailure(format!(
                "supplied measure is not stationary (residual {res:e})"
            )));
        }
        Ok(p)
    }

    fn unsolved(labels: Vec<String>, rates: &[(usize, usize, f64)]) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptySet);
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::Malformed(format!("duplicate state label {l}")));
            }
        }
        let mut acc: Vec<HashMap<usize, f64>> = vec![HashMap::new(); n];
        for &(x, y, r) in rates {
            if x >= n || y >= n {
                return Err(Error::UnknownState(format!("index {}", x.max(y))));
            }
            if r < 0.0 || !r.is_finite() {
                return Err(Error::NegativeRate {
                    from: labels[x].clone(),
                    to: labels[y].clone(),
                    rate: r,
                });
            }
            if r == 0.0 {
                continue;
            }
            if x == y {
                return Err(Error::DiagonalRate(labels[x].clone()));
            }
            *acc[x].entry(y).or_insert(0.0) += r;
        }
        let out: Vec<Vec<(usize, f64)>> = acc
            .into_iter()
            .map(|m| {
                let mut row: Vec<(usize, f64)> = m.into_iter().collect();
                row.sort_by_key(|e| e.0);
                row
            })
            .collect();
        let mut inc: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (x, row) in out.iter().enumerate() {
            for &(y, r) in row {
                inc[y].push((x, r));
            }
        }
        let holding: Vec<f64> = out.iter().map(|row| row.iter().map(|e| e.1).sum()).collect();
        let p = Self {
            labels,
            index,
            out,
            inc,
            holding,
            mu: Measure::new(Vec::new(), false),
        };
        p.check_irreducible()?;
        Ok(p)
    }

    fn check_irreducible(&self) -> Result<()> {
        let n = self.n();
        if n == 1 {
            return Err(Error::NotIrreducible(self.labels[0].clone()));
        }
        for adj in [&self.out, &self.inc] {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(x) = queue.pop_front() {
                for &(y, _) in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
            if let Some(bad) = seen.iter().position(|s| !s) {
                return Err(Error::NotIrreducible(self.labels[bad].clone()));
            }
        }
        Ok(())
    }

    fn solve_invariant_measure(&self) -> Result<Measure> {
        let n = self.n();
        let last = n - 1;
        let mut t = Vec::with_capacity(n * 4);
        for x in 0..n {
            for &(y, r) in &self.out[x] {
                if y != last {
                    t.push((y, x, r));
                }
            }
            if x != last {
                t.push((x, x, -self.holding[x]));
            }
            t.push((last, x, 1.0));
        }
        let mut rhs = vec![0.0; n];
        rhs[last] = 1.0;
        let w = linalg::solve(n, &t, &rhs)?;
        if let Some(x) = w.iter().position(|v| !(*v > 0.0)) {
            return Err(Error::SolveFailure(format!(
                "invariant measure not positive at {}",
                self.labels[x]
            )));
        }
        let mu = Measure::normalized(w);
        let mut probe = self.clone();
        probe.mu = mu;
        let res = probe.stationarity_residual();
        let qnorm = 2.0 * self.max_holding_rate();
        if res > 1e-12 * qnorm {
            return Err(Error::SolveFailure(format!(
                "stationarity residual {res:e} exceeds tolerance"
            )));
        }
        Ok(probe.mu)
    }

    /// `max_y |Σ_x μ(x)r(x,y) − μ(y)λ(y)|`.
    pub fn stationarity_residual(&self) -> f64 {
        (0..self.n())
            .map(|y| {
                let inflow: f64 = self.inc[y].iter().map(|&(x, r)| self.mu[x] * r).sum();
                (inflow - self.mu[y] * self.holding[y]).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownState(label.to_string()))
    }

    /// Positive-rate successors of `x`, sorted by index.
    pub fn rates_from(&self, x: usize) -> &[(usize, f64)] {
        &self.out[x]
    }

    /// Positive-rate predecessors of `y`.
    pub fn rates_into(&self, y: usize) -> &[(usize, f64)] {
        &self.inc[y]
    }

    pub fn rate(&self, x: usize, y: usize) -> f64 {
        lookup(&self.out[x], y)
    }

    pub fn holding_rate(&self, x: usize) -> f64 {
        self.holding[x]
    }

    pub fn max_holding_rate(&self) -> f64 {
        self.holding.iter().copied().fold(0.0, f64::max)
    }

    pub fn measure(&self) -> &Measure {
        &self.mu
    }

    pub fn mu(&self, x: usize) -> f64 {
        self.mu[x]
    }

    /// `c(x,y) = μ(x)r(x,y)`.
    pub fn conductance(&self, x: usize, y: usize) -> f64 {
        self.mu[x] * self.rate(x, y)
    }

    /// All directed positive-rate pairs as `(x, y, r)`.
    pub fn rate_triplets(&self) -> Vec<(usize, usize, f64)> {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(x, row)| row.iter().map(move |&(y, r)| (x, y, r)))
            .collect()
    }

    /// Detailed balance up to `tol` times the largest conductance.
    pub fn is_reversible(&self, tol: f64) -> bool {
        let mut worst = 0.0f64;
        let mut cmax = 0.0f64;
        for x in 0..self.n() {
            for &(y, r) in &self.out[x] {
                let c = self.mu[x] * r;
                cmax = cmax.max(c);
                worst = worst.max((c - self.conductance(y, x)).abs());
            }
        }
        worst <= tol * cmax
    }

    fn derived(&self, rates: Vec<(usize, usize, f64)>) -> Self {
        let mut p = Self::unsolved(self.labels.clone(), &rates)
            .expect("derived rates keep the irreducible support");
        p.mu = self.mu.clone();
        p
    }

    /// Time reversal `r†(x,y) = μ(y)r(y,x)/μ(x)`; shares the invariant measure.
    pub fn adjoint(&self) -> Self {
        let rates = self
            .rate_triplets()
            .into_iter()
            .map(|(x, y, r)| (y, x, self.mu[x] * r / self.mu[y]))
            .collect();
        self.derived(rates)
    }

    /// `r^s(x,y) = [μ(x)r(x,y) + μ(y)r(y,x)] / (2μ(x))`.
    pub fn symmetrize(&self) -> Self {
        let mut rates = Vec::new();
        for (x, y, r) in self.rate_triplets() {
            let c = self.mu[x] * r;
            rates.push((x, y, 0.5 * c / self.mu[x]));
            rates.push((y, x, 0.5 * c / self.mu[y]));
        }
        self.derived(rates)
    }

    pub fn embedded_chain(&self) -> EmbeddedChain {
        let jump = self
            .out
            .iter()
            .enumerate()
            .map(|(x, row)| row.iter().map(|&(y, r)| (y, r / self.holding[x])).collect())
            .collect();
        let m = (0..self.n()).map(|x| self.holding[x] * self.mu[x]).collect();
        EmbeddedChain {
            jump,
            measure: Measure::new(m, false),
        }
    }

    /// `(Lf)(x) = Σ_y r(x,y)[f(y) − f(x)]`.
    pub fn apply_generator(&self, f: &[f64]) -> Vec<f64> {
        self.out
            .iter()
            .enumerate()
            .map(|(x, row)| row.iter().map(|&(y, r)| r * (f[y] - f[x])).sum())
            .collect()
    }

    /// `(L†f)(x) = Σ_y r†(x,y)[f(y) − f(x)]`.
    pub fn apply_adjoint_generator(&self, f: &[f64]) -> Vec<f64> {
        self.inc
            .iter()
            .enumerate()
            .map(|(x, row)| {
                row.iter()
                    .map(|&(y, r)| self.mu[y] * r / self.mu[x] * (f[y] - f[x]))
                    .sum()
            })
            .collect()
    }

    /// `⟨f, g⟩_μ`.
    pub fn inner_product_mu(&self, f: &[f64], g: &[f64]) -> f64 {
        (0..self.n()).map(|x| self.mu[x] * f[x] * g[x]).sum()
    }

    /// `⟨f, −Lg⟩_μ`.
    pub fn dirichlet_bilinear(&self, f: &[f64], g: &[f64]) -> f64 {
        let lg = self.apply_generator(g);
        -(0..self.n()).map(|x| self.mu[x] * f[x] * lg[x]).sum::<f64>()
    }

    /// `½ Σ_x Σ_y μ(x)r(x,y)[f(y) − f(x)]²`.
    pub fn dirichlet_form(&self, f: &[f64]) -> f64 {
        0.5 * self
            .out
            .iter()
            .enumerate()
            .map(|(x, row)| {
                self.mu[x]
                    * row
                        .iter()
                        .map(|&(y, r)| r * (f[y] - f[x]) * (f[y] - f[x]))
                        .sum::<f64>()
            })
            .sum::<f64>()
    }

    /// `⟨f, −Lf⟩_μ`, the generator route to the Dirichlet form.
    pub fn dirichlet_form_via_generator(&self, f: &[f64]) -> f64 {
        self.dirichlet_bilinear(f, f)
    }

    pub fn to_document(&self) -> ProcessDocument {
        ProcessDocument {
            states: self.labels.iter().map(|l| serde_json::Value::String(l.clone())).collect(),
            rates: self
                .rate_triplets()
                .into_iter()
                .map(|(x, y, r)| {
                    (
                        serde_json::Value::String(self.labels[x].clone()),
                        serde_json::Value::String(self.labels[y].clone()),
                        r,
                    )
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &ProcessDocument) -> Result<Self> {
        let labels: Vec<String> = doc.states.iter().map(value_label).collect::<Result<_>>()?;
        let index: HashMap<&str, usize> =
            labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let resolve = |v: &serde_json::Value| -> Result<usize> {
            let l = value_label(v)?;
            index
                .get(l.as_str())
                .copied()
                .ok_or(Error::UnknownState(l))
        };
        let rates = doc
            .rates
            .iter()
            .map(|(a, b, r)| Ok((resolve(a)?, resolve(b)?, *r)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(labels, &rates)
    }
}

fn value_label(v: &serde_json::Value) -> Result<String> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::Malformed(format!("state identifier {other}"))),
    }
}

/// On-disk form: `{"states":[...], "rates":[[from,to,rate],...]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProcessDocument {
    pub states: Vec<serde_json::Value>,
    pub rates: Vec<(serde_json::Value, serde_json::Value, f64)>,
}

/// Builds a process from labelled states and labelled rate triples.
pub fn build_process<S: ToString>(states: &[S], rates: &[(S, S, f64)]) -> Result<MarkovProcess> {
    let labels: Vec<String> = states.iter().map(|s| s.to_string()).collect();
    let index: HashMap<String, usize> =
        labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
    let resolve = |s: &S| {
        let l = s.to_string();
        index.get(&l).copied().ok_or(Error::UnknownState(l))
    };
    let triplets = rates
        .iter()
        .map(|(a, b, r)| Ok((resolve(a)?, resolve(b)?, *r)))
        .collect::<Result<Vec<_>>>()?;
    MarkovProcess::new(labels, &triplets)
}

/// Walk on the discrete torus of length `n`: rate `p` forward, `1 − p`
/// backward. On the 2-cycle both moves land on the same site and their
/// rates add.
pub fn cycle_walk(n: usize, p: f64) -> Result<MarkovProcess> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("cycle length {n} < 2")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0,1]")));
    }
    let labels = (0..n).map(|i| i.to_string()).collect();
    let mut rates = Vec::with_capacity(2 * n);
    for x in 0..n {
        rates.push((x, (x + 1) % n, p));
        rates.push((x, (x + n - 1) % n, 1.0 - p));
    }
    MarkovProcess::new(labels, &rates)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state() -> MarkovProcess {
        build_process(&["1", "2"], &[("1", "2", 1.0), ("2", "1", 2.0)]).unwrap()
    }

    #[test]
    fn two_state_measure_matches_hand_solution() {
        let p = two_state();
        assert!((p.mu(0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((p.mu(1) - 1.0 / 3.0).abs() < 1e-15);
        assert!(p.is_reversible(1e-12));
    }

    #[test]
    fn absorbing_state_is_rejected() {
        let err = build_process(&["1", "2", "3"], &[("1", "2", 1.0), ("2", "3", 1.0), ("2", "1", 1.0)]);
        assert!(matches!(err, Err(Error::NotIrreducible(_))));
    }

    #[test]
    fn negative_and_diagonal_rates_are_rejected() {
        assert!(matches!(
            build_process(&["a", "b"], &[("a", "b", -1.0), ("b", "a", 1.0)]),
            Err(Error::NegativeRate { .. })
        ));
        assert!(matches!(
            build_process(&["a", "b"], &[("a", "a", 1.0), ("a", "b", 1.0), ("b", "a", 1.0)]),
            Err(Error::DiagonalRate(_))
        ));
    }

    #[test]
    fn cycle_walk_measure_is_uniform() {
        for &(n, p) in &[(8, 0.5), (4, 0.7), (2, 0.3), (5, 1.0)] {
            let c = cycle_walk(n, p).unwrap();
            for x in 0..n {
                assert!((c.mu(x) - 1.0 / n as f64).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn cycle_reversibility_depends_on_p() {
        assert!(cycle_walk(8, 0.5).unwrap().is_reversible(1e-12));
        assert!(!cycle_walk(8, 0.7).unwrap().is_reversible(1e-12));
        assert!(cycle_walk(2, 0.3).unwrap().is_reversible(1e-12));
    }

    #[test]
    fn adjoint_of_cycle_reverses_drift() {
        let c = cycle_walk(6, 0.7).unwrap();
        let a = c.adjoint();
        for x in 0..6 {
            assert!((a.rate(x, (x + 1) % 6) - 0.3).abs() < 1e-14);
            assert!((a.rate(x, (x + 5) % 6) - 0.7).abs() < 1e-14);
        }
        let aa = a.adjoint();
        for (x, y, r) in c.rate_triplets() {
            assert!((aa.rate(x, y) - r).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetrized_cycle_has_half_rates() {
        let s = cycle_walk(6, 0.7).unwrap().symmetrize();
        for x in 0..6 {
            assert!((s.rate(x, (x + 1) % 6) - 0.5).abs() < 1e-14);
        }
        assert!(s.is_reversible(1e-12));
    }

    #[test]
    fn embedded_chain_of_two_state() {
        let e = two_state().embedded_chain();
        assert_eq!(e.jump_prob(0, 1), 1.0);
        assert_eq!(e.jump_prob(1, 0), 1.0);
        assert!((e.measure()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((e.measure()[1] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn embedded_chain_of_cycle_equals_rates() {
        let c = cycle_walk(5, 0.7).unwrap();
        let e = c.embedded_chain();
        for (x, y, r) in c.rate_triplets() {
            assert!((e.jump_prob(x, y) - r).abs() < 1e-15);
        }
        let pd = e.adjoint_jump_probs(0);
        let total: f64 = pd.iter().map(|e| e.1).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn constant_function_has_zero_energy() {
        let c = cycle_walk(5, 0.7).unwrap();
        let f = vec![3.0; 5];
        assert!(c.apply_generator(&f).iter().all(|v| v.abs() < 1e-15));
        assert!(c.dirichlet_form(&f).abs() < 1e-15);
    }

    #[test]
    fn document_round_trip() {
        let c = cycle_walk(4, 0.7).unwrap();
        let json = serde_json::to_string(&c.to_document()).unwrap();
        let back = MarkovProcess::from_document(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.labels(), c.labels());
        for (x, y, r) in c.rate_triplets() {
            assert_eq!(back.rate(x, y), r);
        }
    }

    #[test]
    fn numeric_state_identifiers_are_accepted() {
        let doc: ProcessDocument =
            serde_json::from_str(r#"{"states":[0,1],"rates":[[0,1,1.0],[1,0,2.0]]}"#).unwrap();
        let p = MarkovProcess::from_document(&doc).unwrap();
        assert_eq!(p.index_of("1").unwrap(), 1);
    }

    #[test]
    fn supplied_measure_is_checked() {
        let labels = vec!["a".to_string(), "b".to_string()];
        let rates = [(0, 1, 1.0), (1, 0, 2.0)];
        assert!(MarkovProcess::with_measure(labels.clone(), &rates, vec![2.0, 1.0]).is_ok());
        assert!(MarkovProcess::with_measure(labels, &rates, vec![1.0, 1.0]).is_err());
    }
}
