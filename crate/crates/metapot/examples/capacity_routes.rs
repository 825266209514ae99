//! Capacity of a drifted cycle by the Dirichlet form of the equilibrium
//! potential and by the escape formula, plus mean hitting times.

use metapot::markov::cycle_walk;
use metapot::potential::{self, Variant};

fn main() -> metapot::Result<()> {
    let p = cycle_walk(8, 0.8)?;
    let (a, b) = (vec![0], vec![4]);
    let d = potential::capacity(&p, &a, &b)?;
    let e = potential::capacity_via_escape(&p, &a, &b)?;
    let adj = potential::capacity(&p.adjoint(), &a, &b)?;
    println!("cap via D(h)   {:.15}", d.value);
    println!("cap via escape {:.15}", e.value);
    println!("cap of adjoint {:.15}", adj.value);
    let h = potential::equilibrium_potential(&p, &a, &b, Variant::Plain)?;
    let hd = potential::equilibrium_potential(&p, &a, &b, Variant::Adjoint)?;
    for x in 0..p.n() {
        println!("  h({x}) = {:.6}   h*({x}) = {:.6}", h[x], hd[x]);
    }
    let direct = potential::hitting_times_direct(&p, &b)?;
    for z in [0, 1, 2] {
        println!("E_{z}[tau_B] = {:.10} (direct {:.10})", potential::mean_hitting_time(&p, z, &b)?, direct[z]);
    }
    Ok(())
}
