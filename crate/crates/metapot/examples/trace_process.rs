//! The trace of a chain on a subset: rates of the watched process and its
//! stationary measure against the conditioned measure.

use metapot::corpus::random_chain;
use metapot::rng::Stream;
use metapot::trace::trace_process;

fn main() -> metapot::Result<()> {
    let p = random_chain(12, false, 0.25, &mut Stream::new(9))?;
    let set = [0, 3, 5, 8];
    let t = trace_process(&p, &set)?;
    for &x in &set {
        let row: Vec<String> = set.iter().map(|&y| format!("{:.5}", t.rate(x, y))).collect();
        println!("from {x}: [{}]", row.join(", "));
    }
    let d = t.diagnostics(&p);
    println!("measure relative error {:.2e}, max rate excess {:.2e}", d.measure_rel_err, d.max_rate_excess);
    Ok(())
}
