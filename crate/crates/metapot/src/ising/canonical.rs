//! Canonical configurations: horizontal bands `ζ_{ℓ,v}` and bands with a
//! one-row protuberance `ζ^{up/down}_{ℓ,v;k,h}`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

use super::lattice::Lattice;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Side {
    Up,
    Down,
}

/// `ζ_{ℓ,v}`: rows `ℓ, …, ℓ+v−1` are `+`.
pub fn band(lat: &Lattice, row: usize, v: usize) -> u64 {
    let mut s = 0u64;
    for i in 0..v {
        s |= lat.row_bits(lat.plus(), 0) << (((row + i) % lat.l()) * lat.k());
    }
    s
}

/// `ζ^{side}_{ℓ,v;k,h}`: `ζ_{ℓ,v}` plus `+` on columns `k, …, k+h−1` of row
/// `ℓ+v` (up) or `ℓ−1` (down). `h = 0` gives the band itself and `h = K`
/// the next band.
pub fn protuberance(lat: &Lattice, side: Side, row: usize, v: usize, col: usize, h: usize) -> u64 {
    let target = match side {
        Side::Up => row + v,
        Side::Down => row + lat.l() - 1,
    };
    let mut s = band(lat, row, v);
    for j in 0..h {
        s |= 1u64 << lat.site(col + j, target);
    }
    s
}

/// Which canonical family a configuration belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Canonical {
    /// `R_v`.
    Band { v: usize },
    /// `Q_v` with protuberance length `h`.
    Protuberance { v: usize, h: usize },
}

#[derive(Debug, Clone)]
pub struct CanonicalSets {
    /// `r[v] = R_v`, `v = 0..=L`.
    pub r: Vec<Vec<u64>>,
    /// `q[v] = Q_v`, `v = 0..L`.
    pub q: Vec<Vec<u64>>,
    /// `C` with the family of each member.
    pub kind: HashMap<u64, Canonical>,
}

impl CanonicalSets {
    pub fn contains(&self, s: u64) -> bool {
        self.kind.contains_key(&s)
    }
}

/// `R_v` for `v ∈ ⟦0,L⟧`, `Q_v` for `v ∈ ⟦0,L−1⟧` (`h ∈ ⟦1,K−1⟧`) and their union `C`.
pub fn canonical_configurations(lat: &Lattice) -> Result<CanonicalSets> {
    let (k, l) = (lat.k(), lat.l());
    if k > l {
        return Err(Error::DimensionOrder { k, l });
    }
    let mut kind = HashMap::new();
    let mut r = Vec::with_capacity(l + 1);
    for v in 0..=l {
        let mut set: Vec<u64> = (0..l).map(|row| band(lat, row, v)).collect();
        set.sort_unstable();
        set.dedup();
        for &s in &set {
            kind.insert(s, Canonical::Band { v });
        }
        r.push(set);
    }
    let mut q = Vec::with_capacity(l);
    for v in 0..l {
        let mut set = Vec::new();
        for row in 0..l {
            for col in 0..k {
                for h in 1..k {
                    for side in [Side::Up, Side::Down] {
                        set.push(protuberance(lat, side, row, v, col, h));
                    }
                }
            }
        }
        set.sort_unstable();
        set.dedup();
        for &s in &set {
            kind.insert(s, Canonical::Protuberance { v, h: lat.plus_count(s) - v * k });
        }
        q.push(set);
    }
    Ok(CanonicalSets { r, q, kind })
}

/// A standard path from `⊟` to `⊞`: rows `ℓ₀, ℓ₀+1, …` are filled in turn,
/// row `i` growing rightwards from column `starts[i]`.
pub fn canonical_path(lat: &Lattice, first_row: usize, starts: &[usize]) -> Result<Vec<u64>> {
    if starts.len() != lat.l() {
        return Err(Error::InvalidParameter(format!(
            "need one start column per row ({} given, {} rows)",
            starts.len(),
            lat.l()
        )));
    }
    let mut path = vec![lat.minus()];
    for (v, &col) in starts.iter().enumerate() {
        for h in 1..=lat.k() {
            path.push(protuberance(lat, Side::Up, first_row, v, col, h));
        }
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extreme_bands_are_ground_states() {
        let lat = Lattice::new(5, 6).unwrap();
        for row in 0..6 {
            assert_eq!(band(&lat, row, 0), lat.minus());
            assert_eq!(band(&lat, row, 6), lat.plus());
        }
    }

    #[test]
    fn canonical_energies() {
        let lat = Lattice::new(5, 6).unwrap();
        let c = canonical_configurations(&lat).unwrap();
        for v in 1..6 {
            assert_eq!(c.r[v].len(), 6);
            assert!(c.r[v].iter().all(|&s| lat.energy(s) == 10));
        }
        for v in 1..5 {
            assert_eq!(c.q[v].len(), 6 * 5 * 4 * 2);
            assert!(c.q[v].iter().all(|&s| lat.energy(s) == 12));
        }
    }

    #[test]
    fn full_protuberance_is_next_band() {
        let lat = Lattice::new(5, 7).unwrap();
        assert_eq!(protuberance(&lat, Side::Up, 2, 3, 4, 5), band(&lat, 2, 4));
        assert_eq!(protuberance(&lat, Side::Down, 2, 3, 4, 5), band(&lat, 1, 4));
        assert_eq!(protuberance(&lat, Side::Up, 2, 3, 4, 0), band(&lat, 2, 3));
    }

    #[test]
    fn canonical_path_peaks_at_barrier() {
        let lat = Lattice::new(5, 6).unwrap();
        let c = canonical_configurations(&lat).unwrap();
        let path = canonical_path(&lat, 3, &[0, 4, 2, 1, 3, 0]).unwrap();
        assert_eq!(*path.last().unwrap(), lat.plus());
        assert!(path.windows(2).all(|w| lat.adjacent(w[0], w[1])));
        assert_eq!(path.iter().map(|&s| lat.energy(s)).max(), Some(12));
        assert!(path.iter().all(|&s| c.contains(s)));
    }

    #[test]
    fn wide_lattice_is_rejected() {
        let lat = Lattice::new(6, 5).unwrap();
        assert!(matches!(canonical_configurations(&lat), Err(Error::DimensionOrder { .. })));
    }
}
