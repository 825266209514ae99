//! Level-set reachability and communication heights.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use crate::error::{Error, Result};

use super::lattice::Lattice;

pub const DEFAULT_BUDGET: usize = 5_000_000;

/// All configurations joined to some seed by a path staying at energy
/// `≤ level` and avoiding `forbidden`. Seeds above the level or inside
/// `forbidden` contribute nothing.
pub fn reachable(
    lat: &Lattice,
    seeds: &[u64],
    level: i64,
    forbidden: Option<&HashSet<u64>>,
    budget: usize,
) -> Result<HashSet<u64>> {
    let blocked = |s: &u64| forbidden.is_some_and(|f| f.contains(s));
    let mut seen = HashSet::new();
    let mut stack = Vec::new();
    for &s in seeds {
        if lat.energy(s) <= level && !blocked(&s) && seen.insert(s) {
            stack.push((s, lat.energy(s)));
        }
    }
    while let Some((s, h)) = stack.pop() {
        for x in 0..lat.sites() {
            let hn = h + lat.flip_delta(s, x);
            if hn > level {
                continue;
            }
            let t = lat.flip(s, x);
            if !blocked(&t) && seen.insert(t) {
                if seen.len() > budget {
                    return Err(Error::FrontierExplosion(budget));
                }
                stack.push((t, hn));
            }
        }
    }
    Ok(seen)
}

/// `Φ(σ, ζ)`, the minimal over flip paths of the maximal energy.
///
/// States are expanded level by level, so only states with energy at most
/// the returned value are ever visited.
pub fn communication_height(lat: &Lattice, from: u64, to: u64, cap: i64, budget: usize) -> Result<i64> {
    let h0 = lat.energy(from);
    if from == to {
        return Ok(h0);
    }
    if h0 > cap || lat.energy(to) > cap {
        return Err(Error::CapExceeded(cap));
    }
    let mut level = h0.max(lat.energy(to));
    let mut seen = HashSet::from([from]);
    let mut stack = vec![(from, h0)];
    let mut deferred: BinaryHeap<Reverse<(i64, u64)>> = BinaryHeap::new();
    loop {
        while let Some((s, h)) = stack.pop() {
            for x in 0..lat.sites() {
                let t = lat.flip(s, x);
                if seen.contains(&t) {
                    continue;
                }
                let hn = h + lat.flip_delta(s, x);
                if hn > level {
                    if hn <= cap {
                        deferred.push(Reverse((hn, t)));
                    }
                    continue;
                }
                if t == to {
                    return Ok(level);
                }
                seen.insert(t);
                if seen.len() > budget {
                    return Err(Error::FrontierExplosion(budget));
                }
                stack.push((t, hn));
            }
        }
        // raise the level to the cheapest deferred state not yet reached
        loop {
            match deferred.pop() {
                None => return Err(Error::CapExceeded(cap)),
                Some(Reverse((h, t))) => {
                    if seen.contains(&t) {
                        continue;
                    }
                    level = h;
                    if t == to {
                        return Ok(level);
                    }
                    seen.insert(t);
                    stack.push((t, h));
                    break;
                }
            }
        }
        while let Some(Reverse((h, t))) = deferred.peek().copied() {
            if h > level {
                break;
            }
            deferred.pop();
            if t == to {
                return Ok(level);
            }
            if seen.insert(t) {
                stack.push((t, h));
            }
        }
    }
}

/// Exhaustive widest-path oracle: add flip edges in order of their top
/// energy until the endpoints share a component. Needs `K·L ≤ 24`.
pub fn communication_height_exhaustive(lat: &Lattice, from: u64, to: u64) -> Result<i64> {
    let n = lat.sites();
    if n > 24 {
        return Err(Error::StateSpaceTooLarge { size: 1u128 << n, limit: 1u128 << 24 });
    }
    let states = 1usize << n;
    let energy: Vec<i64> = (0..states as u64).map(|s| lat.energy(s)).collect();
    let mut parent: Vec<u32> = (0..states as u32).collect();
    fn find(p: &mut [u32], mut x: u32) -> u32 {
        while p[x as usize] != x {
            p[x as usize] = p[p[x as usize] as usize];
            x = p[x as usize];
        }
        x
    }
    let top = 2 * n as i64;
    let start = energy[from as usize].max(energy[to as usize]);
    // vertices are admitted in order of energy, edges once both ends are in
    let mut by_energy: Vec<Vec<u32>> = vec![Vec::new(); top as usize + 1];
    for s in 0..states {
        by_energy[energy[s] as usize].push(s as u32);
    }
    for level in 0..=top {
        for &s in &by_energy[level as usize] {
            for x in 0..n {
                let t = s ^ (1u32 << x);
                if energy[t as usize] <= level {
                    let (a, b) = (find(&mut parent, s), find(&mut parent, t));
                    if a != b {
                        parent[a as usize] = b;
                    }
                }
            }
        }
        if level >= start && find(&mut parent, from as u32) == find(&mut parent, to as u32) {
            return Ok(level);
        }
    }
    unreachable!("the flip graph is connected")
}
