//! Condensation of a sticky zero-range process on a three-site cycle: scaled
//! capacities against the valley chain, mean jump rates and conditions H0–H3.

use metapot::zrp::{self, build_zrp, limit_chain, mean_jump_rates, ZrpModel};

fn main() -> metapot::Result<()> {
    let (sites, alpha, p) = (3, 2.0, 0.7);
    let y = limit_chain(sites, alpha, p)?;
    let c = y.constants;
    println!("Gamma_alpha = {:.12}  I_alpha = {:.12}  Z = {:.12}", c.gamma_alpha, c.i_alpha, c.z);
    println!("a(0,1) = {:.6}  cap_Y(0,1) = {:.6}", y.rate(0, 1), y.capacity(&[0], &[1])?);

    let grid = [10, 20, 30];
    let scan = zrp::zrp_capacity_scan(sites, alpha, p, &[0], &[1], &grid)?;
    println!("\n   N  width  states   N^(1+a) cap     cap_Y     rel.err  mu(E^0)   sandwich");
    for r in &scan.rows {
        println!(
            "{:4} {:6} {:7} {:14.8} {:10.6} {:10.5} {:9.6} {}",
            r.particles, r.width, r.states, r.scaled_cap, r.cap_y, r.rel_err, r.valley_mass, r.sandwich_ok
        );
    }
    println!("relative error decreasing: {}", scan.rel_err_decreasing);
    println!("valley mass error decreasing: {}", scan.valley_mass_err_decreasing);

    let z = build_zrp(&ZrpModel::new(sites, 12, alpha, p)?)?;
    let v = z.valleys()?;
    let m = mean_jump_rates(&z, &v)?;
    println!("\nN = 12: r_N(0,1) = {:.6e}  r_N(0,2) = {:.6e}", m.r[0][1], m.r[0][2]);
    println!("holding-rate identity rel.err {:.2e}", m.e610_rel_err);
    println!("collapsed-chain identity rel.err {:.2e}", m.e611_rel_err);

    let cond = zrp::martingale_conditions(sites, alpha, p, &grid)?;
    println!("\n   N   H0 err    H1 ratio   H2 ratio   H3 hit     H3 cap     H3 stat   lowerC");
    for r in &cond.rows {
        println!(
            "{:4} {:9.5} {:10.5} {:10.5} {:10.5} {:10.5} {:10.5} {:8.4}",
            r.particles,
            r.h0_rel_err,
            r.h1_ratio,
            r.h2_ratio,
            r.h3_hitting_bound,
            r.h3_capacity_bound,
            r.h3_stationary_bound,
            r.lower_bound_constant
        );
    }
    println!(
        "decreasing: H0 {} H1 {} H2 {} H3 {}",
        cond.h0_decreasing, cond.h1_decreasing, cond.h2_decreasing, cond.h3_decreasing
    );
    Ok(())
}
