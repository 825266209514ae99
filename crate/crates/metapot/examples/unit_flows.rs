//! Unit flows from `A` to `B` built from equilibrium potentials, and the
//! flow norm identity on a random non-reversible chain.

use std::sync::Arc;

use metapot::corpus::random_chain;
use metapot::flows::{self, EdgeSet, FlowKind, UnitFlowKind};
use metapot::potential;
use metapot::rng::Stream;

fn main() -> metapot::Result<()> {
    let mut rng = Stream::new(11);
    let p = random_chain(9, false, 0.3, &mut rng)?;
    let (a, b) = (vec![0, 1], vec![7]);
    let cap = potential::capacity(&p, &a, &b)?.value;
    println!("states {}  reversible {}  cap {:.10}", p.n(), p.is_reversible(1e-10), cap);
    for kind in [UnitFlowKind::Phi, UnitFlowKind::PhiStar] {
        let phi = flows::unit_flow(&p, &a, &b, kind)?;
        println!("{kind:?}: defect {:.2e}  |phi|^2 = {:.8}", flows::unit_flow_defect(&phi, &a, &b, 1.0), phi.norm_sq());
    }
    let edges = Arc::new(EdgeSet::of(&p));
    let f: Vec<f64> = (0..p.n()).map(|_| rng.range(-1.0, 1.0)).collect();
    let psi = flows::flow_on(&edges, &f, FlowKind::Psi);
    println!("|Psi_f|^2 = {:.12}  D(f) = {:.12}", psi.norm_sq(), p.dirichlet_form(&f));
    println!("fundamental cycles: {}", edges.fundamental_cycles().len());
    Ok(())
}
