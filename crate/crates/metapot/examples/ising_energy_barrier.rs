//! Energy barrier between the ground states of small Ising tori.

use std::time::Instant;

use metapot::ising::barrier::{communication_height, communication_height_exhaustive, DEFAULT_BUDGET};
use metapot::ising::{canonical_path, Lattice};

fn main() -> metapot::Result<()> {
    for (k, l) in [(3, 3), (3, 4), (4, 4)] {
        let lat = Lattice::new(k, l)?;
        let fast = communication_height(&lat, lat.plus(), lat.minus(), 64, DEFAULT_BUDGET)?;
        let slow = communication_height_exhaustive(&lat, lat.plus(), lat.minus())?;
        println!("{k}x{l}: search {fast}, exhaustive {slow}");
    }
    for (k, l) in [(5, 5), (5, 6), (5, 7)] {
        let lat = Lattice::new(k, l)?;
        // a canonical path gives the cap
        let path = canonical_path(&lat, 0, &vec![0; l])?;
        let cap = path.iter().map(|&s| lat.energy(s)).max().unwrap_or(0);
        let t = Instant::now();
        let phi = communication_height(&lat, lat.plus(), lat.minus(), cap, DEFAULT_BUDGET)?;
        println!("{k}x{l}: barrier {phi} (2K+2 = {}) in {:.1?}", 2 * k + 2, t.elapsed());
    }
    Ok(())
}
