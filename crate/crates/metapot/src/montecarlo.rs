//! Exact-clock simulation of continuous-time chains.
//!
//! Holding times and jump choices are both drawn by inverse transform from
//! one [`Stream`]: first `−ln(1−U)/λ(x)`, then the successor whose cumulative
//! rate in increasing state-index order first exceeds `U'·λ(x)`. Replication
//! `k` of root seed `s` uses `Stream::derived(s, k)`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::markov::MarkovProcess;
use crate::rng::Stream;

#[derive(Debug, Clone, PartialEq)]
pub enum StopCondition {
    /// Stop on entering the set; the start counts if it lies in the set.
    Hit(Vec<usize>),
    /// Stop once the clock passes the horizon.
    Horizon(f64),
    /// Stop after this many jumps.
    Events(u64),
}

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub seed: u64,
    pub max_events: u64,
    pub stop: StopCondition,
}

/// A path as visited states and the time spent in each. The last holding
/// time is truncated at a horizon and zero at a hit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub states: Vec<usize>,
    pub holding: Vec<f64>,
}

impl Trajectory {
    pub fn duration(&self) -> f64 {
        self.holding.iter().sum()
    }

    pub fn jumps(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    /// `t,state` rows, `t` the entry time of each visit.
    pub fn write_csv<W: Write>(&self, p: &MarkovProcess, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "state"]).map_err(csv_err)?;
        let mut t = 0.0;
        for (&s, &h) in self.states.iter().zip(&self.holding) {
            w.write_record([t.to_string(), p.label(s).to_string()]).map_err(csv_err)?;
            t += h;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Malformed(format!("csv: {e}"))
}

/// One step of the chain: the holding time at `x` and the next state.
pub fn step(p: &MarkovProcess, x: usize, rng: &mut Stream) -> (f64, usize) {
    let lambda = p.holding_rate(x);
    let dt = rng.exponential(lambda);
    let target = rng.uniform() * lambda;
    let row = p.rates_from(x);
    let mut acc = 0.0;
    for &(y, r) in row {
        acc += r;
        if target < acc {
            return (dt, y);
        }
    }
    (dt, row.last().expect("irreducible chains have successors").0)
}

pub fn simulate(p: &MarkovProcess, start: usize, config: &SimulationConfig) -> Result<Trajectory> {
    if start >= p.n() {
        return Err(Error::UnknownState(format!("index {start}")));
    }
    if config.max_events == 0 {
        return Err(Error::InvalidParameter("event budget must be positive".into()));
    }
    let mut in_target = vec![false; p.n()];
    if let StopCondition::Hit(b) = &config.stop {
        for &x in b {
            if x >= p.n() {
                return Err(Error::UnknownState(format!("index {x}")));
            }
            in_target[x] = true;
        }
    }
    let mut rng = Stream::new(config.seed);
    let mut traj = Trajectory { states: vec![start], holding: Vec::new() };
    let mut x = start;
    let mut t = 0.0;
    let mut events = 0u64;
    loop {
        match config.stop {
            StopCondition::Hit(_) if in_target[x] => {
                traj.holding.push(0.0);
                return Ok(traj);
            }
            StopCondition::Events(n) if events >= n => {
                traj.holding.push(0.0);
                return Ok(traj);
            }
            _ => {}
        }
        if events >= config.max_events {
            return Err(Error::BudgetExceeded(config.max_events));
        }
        let (dt, y) = step(p, x, &mut rng);
        if let StopCondition::Horizon(h) = config.stop {
            if t + dt >= h {
                traj.holding.push(h - t);
                return Ok(traj);
            }
        }
        traj.holding.push(dt);
        traj.states.push(y);
        t += dt;
        x = y;
        events += 1;
    }
}

/// Running mean and variance, mergeable in any grouping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Welford {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&self, other: &Welford) -> Welford {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + d * d * (self.count as f64 * other.count as f64) / count as f64;
        Welford { count, mean, m2 }
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 { 0.0 } else { self.m2 / (self.count - 1) as f64 }
    }

    pub fn stderr(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HittingEstimate {
    pub replications: u64,
    pub mean: f64,
    pub stderr: f64,
}

/// Hitting-time clock of `B` from one start; zero when the start is in `B`.
pub fn hitting_time(p: &MarkovProcess, start: usize, in_b: &[bool], rng: &mut Stream, max_events: u64) -> Result<f64> {
    let mut x = start;
    let mut t = 0.0;
    let mut events = 0u64;
    while !in_b[x] {
        if events >= max_events {
            return Err(Error::BudgetExceeded(max_events));
        }
        let (dt, y) = step(p, x, rng);
        t += dt;
        x = y;
        events += 1;
    }
    Ok(t)
}

/// Replications in chunks of 1024, each chunk on its own thread, merged in
/// chunk order so the result does not depend on the thread count.
pub fn estimate_hitting_time(
    p: &MarkovProcess,
    start: &[(usize, f64)],
    b: &[usize],
    replications: u64,
    seed: u64,
    max_events: u64,
) -> Result<HittingEstimate> {
    if b.is_empty() {
        return Err(Error::EmptySet);
    }
    if start.is_empty() {
        return Err(Error::InvalidParameter("empty start measure".into()));
    }
    let mut in_b = vec![false; p.n()];
    for &x in b {
        if x >= p.n() {
            return Err(Error::UnknownState(format!("index {x}")));
        }
        in_b[x] = true;
    }
    let total: f64 = start.iter().map(|e| e.1).sum();
    let mut cumulative = Vec::with_capacity(start.len());
    let mut acc = 0.0;
    for &(x, w) in start {
        if x >= p.n() || w < 0.0 {
            return Err(Error::InvalidParameter(format!("bad start entry ({x}, {w})")));
        }
        acc += w / total;
        cumulative.push((x, acc));
    }
    const CHUNK: u64 = 1024;
    let chunks = replications.div_ceil(CHUNK);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut w = Welford::default();
            for k in c * CHUNK..((c + 1) * CHUNK).min(replications) {
                let mut rng = Stream::derived(seed, k);
                let u = rng.uniform();
                let z = cumulative.iter().find(|e| u < e.1).unwrap_or(cumulative.last().expect("non-empty")).0;
                w.push(hitting_time(p, z, &in_b, &mut rng, max_events)?);
            }
            Ok(w)
        })
        .collect::<Result<Vec<Welford>>>()?;
    let w = parts.iter().fold(Welford::default(), |a, b| a.merge(b));
    Ok(HittingEstimate { replications, mean: w.mean, stderr: w.stderr() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Projection {
    /// Excursions outside the valleys are excised.
    Trace,
    /// Excursions are kept under the cemetery label `None`.
    WithCemetery,
}

/// A valley-label path with consecutive equal labels merged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectedPath {
    pub labels: Vec<Option<usize>>,
    pub holding: Vec<f64>,
}

impl ProjectedPath {
    pub fn duration(&self) -> f64 {
        self.holding.iter().sum()
    }

    /// As a trajectory on labels; `None` when the cemetery occurs.
    pub fn to_trajectory(&self) -> Option<Trajectory> {
        let states = self.labels.iter().copied().collect::<Option<Vec<usize>>>()?;
        Some(Trajectory { states, holding: self.holding.clone() })
    }
}

/// Projects through `valley` (state → label), dividing times by `time_scale`.
pub fn project_trajectory(traj: &Trajectory, valley: &[Option<usize>], time_scale: f64, mode: Projection) -> ProjectedPath {
    let mut out = ProjectedPath { labels: Vec::new(), holding: Vec::new() };
    for (&s, &h) in traj.states.iter().zip(&traj.holding) {
        let label = valley[s];
        if label.is_none() && mode == Projection::Trace {
            continue;
        }
        let h = h / time_scale;
        match out.labels.last() {
            Some(&last) if last == label => *out.holding.last_mut().expect("paired") += h,
            _ => {
                out.labels.push(label);
                out.holding.push(h);
            }
        }
    }
    out
}

/// One-sample Kolmogorov–Smirnov statistic against `Exp(rate)` and the
/// asymptotic 1% critical value `1.6276/√n`.
pub fn ks_exponential(samples: &[f64], rate: f64) -> (f64, f64) {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in s.iter().enumerate() {
        let f = 1.0 - (-rate * x).exp();
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    (d, 1.6276 / n.sqrt())
}

/// Empirical occupation fractions along a trajectory.
pub fn occupation(traj: &Trajectory, n: usize) -> Vec<f64> {
    let mut occ = vec![0.0; n];
    for (&s, &h) in traj.states.iter().zip(&traj.holding) {
        occ[s] += h;
    }
    let total = traj.duration();
    occ.iter().map(|t| t / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::{build_process, cycle_walk};
    use crate::potential;

    #[test]
    fn two_state_chain_alternates() {
        let p = build_process(&["a", "b"], &[("a", "b", 2.0), ("b", "a", 3.0)]).unwrap();
        let t = simulate(&p, 0, &SimulationConfig { seed: 1, max_events: 100, stop: StopCondition::Events(9) }).unwrap();
        assert_eq!(t.states, vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn seed_repeat_is_identical() {
        let p = cycle_walk(6, 0.7).unwrap();
        let cfg = SimulationConfig { seed: 42, max_events: 1000, stop: StopCondition::Horizon(50.0) };
        assert_eq!(simulate(&p, 0, &cfg).unwrap(), simulate(&p, 0, &cfg).unwrap());
        let t = simulate(&p, 0, &cfg).unwrap();
        assert!((t.duration() - 50.0).abs() < 1e-9);
    }

    #[test]
    fn budget_is_reported() {
        let p = cycle_walk(6, 0.7).unwrap();
        let cfg = SimulationConfig { seed: 1, max_events: 10, stop: StopCondition::Horizon(1e9) };
        assert!(matches!(simulate(&p, 0, &cfg), Err(Error::BudgetExceeded(10))));
    }

    #[test]
    fn occupation_approaches_uniform() {
        let p = cycle_walk(6, 0.7).unwrap();
        let cfg = SimulationConfig { seed: 5, max_events: 1_000_000, stop: StopCondition::Events(1_000_000) };
        let t = simulate(&p, 0, &cfg).unwrap();
        let occ = occupation(&t, 6);
        // holding times are Exp(1) and visits per state ≈ 10⁶/6
        let sigma = (1.0 / 6.0) / (1e6f64 / 6.0).sqrt();
        for o in occ {
            assert!((o - 1.0 / 6.0).abs() < 3.0 * sigma, "{o}");
        }
    }

    #[test]
    fn hitting_time_matches_exact_solve() {
        let p = cycle_walk(6, 0.5).unwrap();
        let exact = potential::mean_hitting_time(&p, 0, &[3]).unwrap();
        let est = estimate_hitting_time(&p, &[(0, 1.0)], &[3], 20_000, 9, 1_000_000).unwrap();
        assert!((est.mean - exact).abs() < 3.0 * est.stderr, "{} vs {exact}", est.mean);
        let zero = estimate_hitting_time(&p, &[(3, 1.0)], &[3], 10, 9, 10).unwrap();
        assert_eq!(zero.mean, 0.0);
    }

    #[test]
    fn welford_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut all = Welford::default();
        xs.iter().for_each(|&x| all.push(x));
        let (mut a, mut b) = (Welford::default(), Welford::default());
        xs[..37].iter().for_each(|&x| a.push(x));
        xs[37..].iter().for_each(|&x| b.push(x));
        let m = a.merge(&b);
        assert!((m.mean - all.mean).abs() < 1e-14 && (m.variance() - all.variance()).abs() < 1e-14);
    }

    #[test]
    fn projection_excises_excursions() {
        let traj = Trajectory { states: vec![0, 1, 2, 1, 0, 2], holding: vec![1.0, 2.0, 3.0, 4.0, 5.0, 0.0] };
        let map = [Some(0), None, Some(1)];
        let trace = project_trajectory(&traj, &map, 1.0, Projection::Trace);
        assert_eq!(trace.labels, vec![Some(0), Some(1), Some(0), Some(1)]);
        assert_eq!(trace.holding, vec![1.0, 3.0, 5.0, 0.0]);
        let hat = project_trajectory(&traj, &map, 2.0, Projection::WithCemetery);
        assert_eq!(hat.labels.len(), 6);
        assert!((hat.duration() - 7.5).abs() < 1e-15);
        // projecting again is the identity
        let again = project_trajectory(&trace.to_trajectory().unwrap(), &[Some(0), Some(1)], 1.0, Projection::Trace);
        assert_eq!(again, trace);
    }

    #[test]
    fn constant_path_in_one_valley() {
        let traj = Trajectory { states: vec![0, 1, 0], holding: vec![1.0, 1.0, 1.0] };
        let proj = project_trajectory(&traj, &[Some(4), Some(4)], 1.0, Projection::Trace);
        assert_eq!(proj.labels, vec![Some(4)]);
        assert_eq!(proj.holding, vec![3.0]);
    }

    #[test]
    fn holding_times_pass_ks() {
        let p = cycle_walk(5, 0.7).unwrap();
        let cfg = SimulationConfig { seed: 77, max_events: 60_000, stop: StopCondition::Events(50_000) };
        let t = simulate(&p, 0, &cfg).unwrap();
        let at_zero: Vec<f64> = t.states.iter().zip(&t.holding).take(t.jumps()).filter(|e| *e.0 == 0).map(|e| *e.1).collect();
        let (d, crit) = ks_exponential(&at_zero, 1.0);
        assert!(at_zero.len() > 9000);
        assert!(d < crit, "{d} vs {crit}");
    }
}
