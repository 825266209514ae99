//! Saddle structure of the 5×6 Ising torus and the scaled capacity bounds.

use std::time::Instant;

use metapot::ising::structure::typical_structure_default;
use metapot::ising::test_objects::{f0_checks, flow_checks, rate_approximation_check};
use metapot::ising::{scaled_limits, test_flow_psi0, IsingModel};

fn main() -> metapot::Result<()> {
    let t = Instant::now();
    let model = IsingModel::new(5, 6)?;
    let st = typical_structure_default(&model)?;
    println!("structure built in {:.1?}: {:?}", t.elapsed(), st.sizes());
    println!("constants: {:?}", st.constants);
    println!("checks: {:?}", st.checks);
    println!("f0: {:?}", f0_checks(&st));
    let psi = test_flow_psi0(&st);
    let (lo, hi) = st.typical.iter().map(|&s| metapot::ising::f0_value(&st, s)).fold((f64::MAX, f64::MIN), |(a, b), f| (a.min(f), b.max(f)));
    println!("f0 range [{lo:e}, {hi}]");
    println!("psi0: {:?}", flow_checks(&st, &psi));
    for row in scaled_limits(&st, &psi, &[4.0, 6.0, 8.0])? {
        println!(
            "beta {:>4}: 2k e^(Gb) D(f0) = {:.6}   e^(-Gb)|psi0|^2/2k = {:.6}",
            row.beta, row.scaled_upper, row.scaled_flow
        );
    }
    for r in rate_approximation_check(&st, &[3.0, 4.0, 5.0])? {
        println!("beta {}: scaled rate deviation {:.4e}", r.beta, r.scaled_deviation);
    }
    println!("total {:.1?}", t.elapsed());
    Ok(())
}
