//! Long run of the zero-range process read through the valley labels: the
//! empirical law of the first jump out of valley 0 against the limit chain.

use metapot::zrp::{order_chain_statistics, ZrpModel};

fn main() -> metapot::Result<()> {
    let model = ZrpModel::new(3, 20, 2.0, 0.7)?;
    let s = order_chain_statistics(&model, 2000, 20_240_611, 500_000_000)?;
    println!("N = {}  width = {}  events = {}", s.particles, s.width, s.events);
    println!("departures from valley 0: {}", s.departures_from_zero);
    for y in 1..s.counts.len() {
        println!(
            "  -> {y}: empirical {:.4}  limit {:.4}  finite-N {:.4}  se {:.4}",
            s.empirical[y], s.limit[y], s.exact[y], s.std_errors[y]
        );
    }
    println!("max |z| = {:.3}  within 3 se: {}", s.max_abs_z, s.within_three_se);
    println!("time fraction in Delta: {:.4}", s.delta_time_fraction);
    println!(
        "mean trace sojourn {:.3} +- {:.3}  exact 1/lambda {:.3}",
        s.mean_trace_sojourn, s.mean_trace_sojourn_stderr, s.exact_mean_sojourn
    );
    println!("N^(1+a) x switching rate {:.4}  limit {:.4}", s.scaled_switch_rate, s.limit_switch_rate);

    println!("\nfraction of time outside the valleys:");
    for n in [10, 20, 30] {
        let s = order_chain_statistics(&model.with_particles(n)?, 300, 7, 500_000_000)?;
        println!("  N = {n:2} (width {}): {:.4}", s.width, s.delta_time_fraction);
    }
    Ok(())
}
