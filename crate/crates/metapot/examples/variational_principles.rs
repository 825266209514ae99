//! Every variational principle for capacities checked against the exact
//! value, and the sector sandwich with the symmetrized chain.

use metapot::markov::cycle_walk;
use metapot::variational::{capacity_sandwich, estimate_sector_constant, verify_principles};

fn main() -> metapot::Result<()> {
    for (p, label) in [(cycle_walk(6, 0.5)?, "symmetric 6-cycle"), (cycle_walk(6, 0.85)?, "drifted 6-cycle")] {
        println!("{label}");
        for c in verify_principles(&p, &[0], &[3], 200, 5)? {
            println!(
                "  {:22} worst margin {:+.3e}  optimizer residual {:.1e}  {}",
                c.principle,
                c.worst_margin,
                c.optimizer_residual,
                if c.passed { "ok" } else { "FAILED" }
            );
        }
        let c0 = estimate_sector_constant(&p, 2000, 1);
        let s = capacity_sandwich(&p, &[0], &[3], c0.max(1.0))?;
        println!("  cap_s {:.8} <= cap {:.8} <= {:.3} cap_s: {}", s.cap_s, s.cap, c0, s.holds);
    }
    Ok(())
}
