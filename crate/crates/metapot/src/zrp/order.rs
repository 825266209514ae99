//! Monte Carlo of the valley order process: the sequence of condensate
//! positions read off a long run of the zero-range process.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::montecarlo::{step, Welford};
use crate::rng::Stream;

use super::limit::limit_chain;
use super::model::{build_zrp, ZrpModel};
use super::rates::mean_jump_rates;

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OrderChainStatistics {
    pub particles: usize,
    pub width: usize,
    pub seed: u64,
    pub transitions: usize,
    pub events: u64,
    /// Departures from valley 0 and their destinations.
    pub departures_from_zero: u64,
    pub counts: Vec<u64>,
    pub empirical: Vec<f64>,
    /// `cap_X(0,y)/Σ_z cap_X(0,z)`.
    pub limit: Vec<f64>,
    /// `r_N(0,y)/λ_N(0)` at this `N`.
    pub exact: Vec<f64>,
    /// Binomial standard errors under the limit law.
    pub std_errors: Vec<f64>,
    pub max_abs_z: f64,
    pub within_three_se: bool,
    /// Fraction of the run spent in `Δ_N`.
    pub delta_time_fraction: f64,
    /// Mean valley sojourn measured on the trace clock, pooled over valleys.
    pub mean_trace_sojourn: f64,
    pub mean_trace_sojourn_stderr: f64,
    /// `1/λ_N(0)`, the same for every valley by rotation.
    pub exact_mean_sojourn: f64,
    /// `N^{1+α}` times the empirical switching rate, against `Σ_y a(0,y)`.
    pub scaled_switch_rate: f64,
    pub limit_switch_rate: f64,
}

/// Runs from the condensate at site 0 until `transitions` valley changes.
pub fn order_chain_statistics(model: &ZrpModel, transitions: usize, seed: u64, max_events: u64) -> Result<OrderChainStatistics> {
    if transitions == 0 {
        return Err(Error::InvalidParameter("need at least one transition".into()));
    }
    let z = build_zrp(model)?;
    let v = z.valleys()?;
    let y = limit_chain(model.sites, model.alpha, model.p)?;
    let rates = mean_jump_rates(&z, &v)?;
    let k = model.sites;

    let mut rng = Stream::new(seed);
    let mut x = z.space.condensate(0);
    let mut current = 0usize;
    let (mut trace_clock, mut delta_time, mut sojourn) = (0.0, 0.0, 0.0);
    let mut counts = vec![0u64; k];
    let mut sojourns = Welford::default();
    let mut seen = 0usize;
    let mut events = 0u64;
    while seen < transitions {
        if events >= max_events {
            return Err(Error::BudgetExceeded(max_events));
        }
        let (dt, next) = step(&z.process, x, &mut rng);
        events += 1;
        match v.label[x] {
            Some(_) => {
                trace_clock += dt;
                sojourn += dt;
            }
            None => delta_time += dt,
        }
        x = next;
        if let Some(w) = v.label[x] {
            if w != current {
                if current == 0 {
                    counts[w] += 1;
                }
                sojourns.push(sojourn);
                sojourn = 0.0;
                current = w;
                seen += 1;
            }
        }
    }

    let departures: u64 = counts.iter().sum();
    let limit = y.jump_distribution(0);
    let exact: Vec<f64> = (0..k).map(|w| rates.r[0][w] / rates.lambda[0]).collect();
    let n = departures.max(1) as f64;
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    let std_errors: Vec<f64> = limit.iter().map(|&q| (q * (1.0 - q) / n).sqrt()).collect();
    let max_abs_z = (1..k)
        .map(|w| if std_errors[w] > 0.0 { (empirical[w] - limit[w]).abs() / std_errors[w] } else { 0.0 })
        .fold(0.0, f64::max);
    let scale = (model.particles as f64).powf(1.0 + model.alpha);
    Ok(OrderChainStatistics {
        particles: model.particles,
        width: v.width,
        seed,
        transitions,
        events,
        departures_from_zero: departures,
        counts,
        empirical,
        limit,
        exact,
        std_errors,
        max_abs_z,
        within_three_se: departures > 0 && max_abs_z <= 3.0,
        delta_time_fraction: delta_time / (delta_time + trace_clock),
        mean_trace_sojourn: sojourns.mean,
        mean_trace_sojourn_stderr: sojourns.stderr(),
        exact_mean_sojourn: 1.0 / rates.lambda[0],
        scaled_switch_rate: scale * transitions as f64 / trace_clock,
        limit_switch_rate: (1..k).map(|w| y.rate(0, w)).sum(),
    })
}
