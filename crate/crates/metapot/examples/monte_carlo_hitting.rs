//! Exact-clock simulation: hitting-time estimates against the exact solve
//! and a trajectory written as CSV.

use metapot::markov::cycle_walk;
use metapot::montecarlo::{estimate_hitting_time, ks_exponential, simulate, SimulationConfig, StopCondition};
use metapot::potential;

fn main() -> metapot::Result<()> {
    let p = cycle_walk(6, 0.7)?;
    let exact = potential::mean_hitting_time(&p, 0, &[3])?;
    let est = estimate_hitting_time(&p, &[(0, 1.0)], &[3], 100_000, 42, 10_000_000)?;
    println!("E_0[tau_3]: exact {exact:.6}  estimate {:.6} +- {:.6}", est.mean, est.stderr);

    let cfg = SimulationConfig { seed: 7, max_events: 200_000, stop: StopCondition::Events(100_000) };
    let t = simulate(&p, 0, &cfg)?;
    let at_zero: Vec<f64> = t.states.iter().zip(&t.holding).take(t.jumps()).filter(|e| *e.0 == 0).map(|e| *e.1).collect();
    let (d, crit) = ks_exponential(&at_zero, p.holding_rate(0));
    println!("KS on {} holding times at 0: D = {d:.4} (1% critical {crit:.4})", at_zero.len());

    let short = simulate(&p, 0, &SimulationConfig { seed: 1, max_events: 1000, stop: StopCondition::Hit(vec![3]) })?;
    short.write_csv(&p, std::io::stdout())?;
    Ok(())
}
