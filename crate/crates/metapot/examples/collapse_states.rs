//! Collapsing a set of states to a single state: capacities, Dirichlet
//! forms and flow norms before and after.

use metapot::collapse::{collapse_process, verify_collapse_identities};
use metapot::corpus::random_chain;
use metapot::potential;
use metapot::rng::Stream;

fn main() -> metapot::Result<()> {
    let p = random_chain(10, false, 0.3, &mut Stream::new(4))?;
    let e = [0, 1, 2, 3];
    let c = collapse_process(&p, &e)?;
    println!("{} states -> {} states, collapsed state {}", p.n(), c.process().n(), c.collapsed_state());
    let cap = potential::capacity(&p, &e, &[9])?.value;
    let bar = potential::capacity(c.process(), &[c.collapsed_state()], &c.map_set(&[9]))?.value;
    println!("cap(E, 9) = {cap:.12}  collapsed = {bar:.12}");
    let r = verify_collapse_identities(&p, &e, &[9], 100, 3, None)?;
    println!("{}", serde_json::to_string_pretty(&r)?);
    Ok(())
}
