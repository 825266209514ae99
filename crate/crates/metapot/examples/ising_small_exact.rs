//! Exact capacities of the full Metropolis chain on a 3×4 torus.

use metapot::ising::exact_small_lattice;

fn main() -> metapot::Result<()> {
    let r = exact_small_lattice(3, 4, &[2.0, 3.0, 4.0])?;
    println!("barrier {}", r.barrier);
    for p in &r.points {
        println!(
            "beta {}: cap {:.6e} (escape {:.6e}), max h near plus {:.3e}, ratio {:.4}",
            p.beta, p.capacity, p.capacity_escape, p.max_h_near_plus, p.decay_ratio
        );
    }
    println!("log slopes {:?}, relative error {:.4}", r.log_slopes, r.slope_rel_err);
    Ok(())
}
