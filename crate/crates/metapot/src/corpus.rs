//! Random irreducible chains and target sets for property checks.

use crate::error::Result;
use crate::markov::{cycle_walk, MarkovProcess};
use crate::rng::Stream;

fn shuffled(n: usize, rng: &mut Stream) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        v.swap(i, rng.index(i + 1));
    }
    v
}

/// A random irreducible chain on `n ≥ 2` states.
///
/// Non-reversible chains carry a directed Hamiltonian cycle plus random
/// extra arcs. Reversible ones are built from symmetric conductances on a
/// spanning path plus extra edges, `r(x,y) = c(x,y)/w(x)` for random
/// weights `w`, so `w` is stationary.
pub fn random_chain(n: usize, reversible: bool, extra_density: f64, rng: &mut Stream) -> Result<MarkovProcess> {
    let order = shuffled(n, rng);
    let labels: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut rates = Vec::new();
    if reversible {
        let w: Vec<f64> = (0..n).map(|_| rng.range(0.2, 1.0)).collect();
        let edge = |x: usize, y: usize, c: f64, rates: &mut Vec<(usize, usize, f64)>| {
            rates.push((x, y, c / w[x]));
            rates.push((y, x, c / w[y]));
        };
        for i in 1..n {
            let c = rng.range(0.1, 2.0);
            edge(order[i - 1], order[i], c, &mut rates);
        }
        for x in 0..n {
            for y in x + 1..n {
                let adjacent = order.windows(2).any(|e| (e[0] == x && e[1] == y) || (e[0] == y && e[1] == x));
                if !adjacent && rng.bernoulli(extra_density) {
                    let c = rng.range(0.1, 2.0);
                    edge(x, y, c, &mut rates);
                }
            }
        }
    } else {
        let mut arc = vec![false; n * n];
        for i in 0..n {
            let (x, y) = (order[i], order[(i + 1) % n]);
            arc[x * n + y] = true;
            rates.push((x, y, rng.range(0.1, 2.0)));
        }
        for x in 0..n {
            for y in 0..n {
                if x != y && !arc[x * n + y] && rng.bernoulli(extra_density) {
                    rates.push((x, y, rng.range(0.1, 2.0)));
                }
            }
        }
    }
    MarkovProcess::new(labels, &rates)
}

/// Disjoint non-empty `A` and `B` with `|A| + |B| ≤ n − 1` when `n ≥ 3`.
pub fn random_sets(n: usize, rng: &mut Stream) -> (Vec<usize>, Vec<usize>) {
    let order = shuffled(n, rng);
    let room = if n >= 3 { n - 1 } else { n };
    let na = 1 + rng.index((room / 2).max(1));
    let nb = 1 + rng.index(room - na);
    let mut a = order[..na].to_vec();
    let mut b = order[na..na + nb].to_vec();
    a.sort_unstable();
    b.sort_unstable();
    (a, b)
}

/// One random instance: chain size in `min..=max`, reversible with
/// probability ½, and target sets.
pub fn random_instance(min: usize, max: usize, rng: &mut Stream) -> Result<(MarkovProcess, Vec<usize>, Vec<usize>)> {
    let n = min + rng.index(max - min + 1);
    let reversible = rng.bernoulli(0.5);
    let p = random_chain(n, reversible, 0.3, rng)?;
    let (a, b) = random_sets(n, rng);
    Ok((p, a, b))
}

/// Fixed small chains used by the verification suites.
pub fn default_corpus() -> Result<Vec<(String, MarkovProcess)>> {
    let mut out = vec![
        ("cycle6_sym".to_string(), cycle_walk(6, 0.5)?),
        ("cycle6_p07".to_string(), cycle_walk(6, 0.7)?),
        ("cycle8_p09".to_string(), cycle_walk(8, 0.9)?),
    ];
    let mut rng = Stream::new(0x5eed);
    for (i, rev) in [true, false, true, false].into_iter().enumerate() {
        out.push((format!("random{i}"), random_chain(7 + i, rev, 0.3, &mut rng)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reversible_chains_are_reversible() {
        let mut rng = Stream::new(3);
        for _ in 0..20 {
            let p = random_chain(9, true, 0.3, &mut rng).unwrap();
            assert!(p.is_reversible(1e-10));
        }
    }

    #[test]
    fn sets_are_disjoint_and_leave_room() {
        let mut rng = Stream::new(4);
        for n in 2..12 {
            for _ in 0..50 {
                let (a, b) = random_sets(n, &mut rng);
                assert!(!a.is_empty() && !b.is_empty());
                assert!(a.iter().all(|x| !b.contains(x)));
                if n >= 3 {
                    assert!(a.len() + b.len() < n);
                }
            }
        }
    }
}
