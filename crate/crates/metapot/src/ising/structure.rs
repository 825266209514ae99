//! Typical configurations, the edge chains `Z^±` and the constants `𝔟`, `𝔢`, `κ`.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::markov::MarkovProcess;
use crate::potential::{self, Variant};

use super::barrier::{self, DEFAULT_BUDGET};
use super::canonical::{canonical_configurations, CanonicalSets};
use super::lattice::Lattice;

/// Lattice dimensions with the derived barrier `Γ = 2K+2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IsingModel {
    pub k: usize,
    pub l: usize,
    pub gamma: i64,
    /// `5 ≤ K ≤ L`, the regime where `Γ = 2K+2` is a theorem.
    pub assumptions_ok: bool,
}

impl IsingModel {
    pub fn new(k: usize, l: usize) -> Result<Self> {
        if k > l {
            return Err(Error::DimensionOrder { k, l });
        }
        Lattice::new(k, l)?;
        Ok(Self { k, l, gamma: 2 * k as i64 + 2, assumptions_ok: k >= 5 })
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.k, self.l).expect("validated at construction")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Sign {
    Minus,
    Plus,
}

/// The chain `Z^±` on `V^± = O^± ∪ Ī^±`.
///
/// Vertex 0 is the ground state (standing for its whole `N`), vertices
/// `1..=L` are the exit band (`R₂` or `R_{L−2}`), the rest are `O^±` in
/// increasing bit order.
#[derive(Debug, Clone)]
pub struct EdgeChain {
    pub sign: Sign,
    pub vertices: Vec<u64>,
    pub exit: Vec<usize>,
    pub process: MarkovProcess,
    /// `𝔥^±`: equals 1 at the ground state and 0 on the exit band.
    pub potential: Vec<f64>,
    /// `cap^±(ground, exit band)` for the uniform measure on `V^±`.
    pub capacity: f64,
    /// `Π^±` from `E^±` to vertex indices.
    pub projection: HashMap<u64, usize>,
    pub first_outer: usize,
}

impl EdgeChain {
    pub fn is_outer(&self, v: usize) -> bool {
        v >= self.first_outer
    }

    pub fn project(&self, s: u64) -> Option<usize> {
        self.projection.get(&s).copied()
    }
}

/// Outcomes of the exact set identities.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StructureChecks {
    pub edges_disjoint: bool,
    pub minus_edge_meets_bulk_in_r2: bool,
    pub plus_edge_meets_bulk_in_rl2: bool,
    pub typical_is_edge_union_bulk: bool,
    pub inner_minus_identity: bool,
    pub inner_plus_identity: bool,
    pub low_energy_classified: bool,
    pub neighbourhoods_disjoint: bool,
    pub split_lemma: bool,
    /// Flip edges from `O^±` into `X ∖ E^±` with energy at most `Γ`.
    pub stray_outer_edges: usize,
    pub e_in_range: bool,
}

impl StructureChecks {
    pub fn all_hold(&self) -> bool {
        self.edges_disjoint
            && self.minus_edge_meets_bulk_in_r2
            && self.plus_edge_meets_bulk_in_rl2
            && self.typical_is_edge_union_bulk
            && self.inner_minus_identity
            && self.inner_plus_identity
            && self.low_energy_classified
            && self.neighbourhoods_disjoint
            && self.split_lemma
            && self.stray_outer_edges == 0
            && self.e_in_range
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Constants {
    pub gamma: i64,
    pub b: f64,
    pub e: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone)]
pub struct TypicalStructure {
    pub model: IsingModel,
    pub lattice: Lattice,
    pub canonical: CanonicalSets,
    pub bulk: HashSet<u64>,
    pub bulk_gamma: HashSet<u64>,
    pub edge_minus: HashSet<u64>,
    pub edge_plus: HashSet<u64>,
    pub typical: HashSet<u64>,
    pub n_minus: HashSet<u64>,
    pub n_plus: HashSet<u64>,
    pub chain_minus: EdgeChain,
    pub chain_plus: EdgeChain,
    pub constants: Constants,
    pub checks: StructureChecks,
}

impl TypicalStructure {
    pub fn gamma(&self) -> i64 {
        self.model.gamma
    }

    pub fn chain(&self, sign: Sign) -> &EdgeChain {
        match sign {
            Sign::Minus => &self.chain_minus,
            Sign::Plus => &self.chain_plus,
        }
    }

    pub fn is_typical(&self, s: u64) -> bool {
        self.edge_minus.contains(&s) || self.edge_plus.contains(&s) || self.bulk.contains(&s)
    }

    /// `|V^±|`, `|O^±|`, `|E^±|`, `|B|`, `|N̂(S)|`.
    pub fn sizes(&self) -> StructureSizes {
        StructureSizes {
            vertices_minus: self.chain_minus.vertices.len(),
            outer_minus: self.chain_minus.vertices.len() - self.chain_minus.first_outer,
            edge_minus: self.edge_minus.len(),
            edge_plus: self.edge_plus.len(),
            bulk: self.bulk.len(),
            typical: self.typical.len(),
            n_minus: self.n_minus.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StructureSizes {
    pub vertices_minus: usize,
    pub outer_minus: usize,
    pub edge_minus: usize,
    pub edge_plus: usize,
    pub bulk: usize,
    pub typical: usize,
    pub n_minus: usize,
}

/// `𝔟 = (K+2)(L−4)/(4KL)`.
pub fn bulk_constant(k: usize, l: usize) -> f64 {
    ((k + 2) * (l - 4)) as f64 / (4 * k * l) as f64
}

struct Side {
    edge: HashSet<u64>,
    ground_nbhd: HashSet<u64>,
    chain: EdgeChain,
    inner_identity: bool,
    disjoint: bool,
    stray: usize,
}

fn build_side(
    lat: &Lattice,
    gamma: i64,
    sign: Sign,
    exit_band: &[u64],
    bulk_gamma: &HashSet<u64>,
    budget: usize,
) -> Result<Side> {
    let ground = match sign {
        Sign::Minus => lat.minus(),
        Sign::Plus => lat.plus(),
    };
    let edge = barrier::reachable(lat, &[ground], gamma, Some(bulk_gamma), budget)?;
    let ground_nbhd = barrier::reachable(lat, &[ground], gamma - 1, None, budget)?;
    let mut projection: HashMap<u64, usize> = HashMap::new();
    let mut disjoint = true;
    for &s in &ground_nbhd {
        projection.insert(s, 0);
    }
    let mut vertices = vec![ground];
    let mut exit = Vec::with_capacity(exit_band.len());
    for &z in exit_band {
        let idx = vertices.len();
        vertices.push(z);
        exit.push(idx);
        for s in barrier::reachable(lat, &[z], gamma - 1, None, budget)? {
            disjoint &= projection.insert(s, idx).is_none();
        }
    }
    let inner: HashSet<u64> = edge.iter().copied().filter(|&s| lat.energy(s) < gamma).collect();
    let inner_identity = inner.len() == projection.len() && inner.iter().all(|s| projection.contains_key(s));

    let mut outer: Vec<u64> = edge.iter().copied().filter(|&s| lat.energy(s) == gamma).collect();
    outer.sort_unstable();
    let first_outer = vertices.len();
    for &s in &outer {
        projection.insert(s, vertices.len());
        vertices.push(s);
    }

    let mut acc: HashMap<(usize, usize), f64> = HashMap::new();
    let mut stray = 0;
    for (j, &s) in outer.iter().enumerate() {
        let a = first_outer + j;
        for t in lat.flips(s) {
            match projection.get(&t) {
                Some(&b) if b >= first_outer => {
                    if a < b {
                        acc.insert((a, b), 1.0);
                    }
                }
                Some(&b) => {
                    *acc.entry((a, b)).or_insert(0.0) += 1.0;
                }
                None => {
                    if lat.energy(t) <= gamma && !bulk_gamma.contains(&t) {
                        stray += 1;
                    }
                }
            }
        }
    }
    let mut rates = Vec::with_capacity(2 * acc.len());
    for (&(a, b), &r) in &acc {
        rates.push((a, b, r));
        rates.push((b, a, r));
    }
    rates.sort_by_key(|e| (e.0, e.1));
    let labels: Vec<String> = vertices
        .iter()
        .enumerate()
        .map(|(i, s)| match i {
            0 => "ground".to_string(),
            i if i < first_outer => format!("exit{}", i - 1),
            _ => format!("{s:#x}"),
        })
        .collect();
    let n = vertices.len();
    let process = MarkovProcess::with_measure(labels, &rates, vec![1.0; n])?;
    let potential = potential::equilibrium_potential(&process, &[0], &exit, Variant::Plain)?;
    let capacity = potential::capacity(&process, &[0], &exit)?.value;
    Ok(Side {
        edge,
        ground_nbhd,
        chain: EdgeChain {
            sign,
            vertices,
            exit,
            process,
            // round-off can leave the potential an ulp outside [0, 1]
            potential: potential.iter().map(|h| h.clamp(0.0, 1.0)).collect(),
            capacity,
            projection,
            first_outer,
        },
        inner_identity,
        disjoint,
        stray,
    })
}

/// Enumerates every typical configuration and builds both edge chains.
/// Needs `K < L` and `L ≥ 5`.
pub fn typical_structure(model: &IsingModel, budget: usize) -> Result<TypicalStructure> {
    let (k, l) = (model.k, model.l);
    if k >= l {
        return Err(Error::DimensionOrder { k, l });
    }
    if l < 5 {
        return Err(Error::InvalidParameter(format!("typical structure needs L >= 5 (got {l})")));
    }
    let lat = model.lattice();
    let gamma = model.gamma;
    let canonical = canonical_configurations(&lat)?;
    let mut bulk = HashSet::new();
    for v in 2..=l - 2 {
        bulk.extend(canonical.r[v].iter().copied());
    }
    let mut bulk_gamma = HashSet::new();
    for v in 2..=l - 3 {
        bulk_gamma.extend(canonical.q[v].iter().copied());
    }
    bulk.extend(bulk_gamma.iter().copied());

    let minus = build_side(&lat, gamma, Sign::Minus, &canonical.r[2], &bulk_gamma, budget)?;
    let plus = build_side(&lat, gamma, Sign::Plus, &canonical.r[l - 2], &bulk_gamma, budget)?;
    let typical = barrier::reachable(&lat, &[lat.minus(), lat.plus()], gamma, None, budget)?;

    let r2: HashSet<u64> = canonical.r[2].iter().copied().collect();
    let rl2: HashSet<u64> = canonical.r[l - 2].iter().copied().collect();
    let meet = |e: &HashSet<u64>| -> HashSet<u64> { e.intersection(&bulk).copied().collect() };
    let union_len = {
        let mut u: HashSet<u64> = minus.edge.clone();
        u.extend(plus.edge.iter().copied());
        u.extend(bulk.iter().copied());
        (u.len(), u.iter().all(|s| typical.contains(s)))
    };
    let low_energy_classified = typical.iter().all(|&s| {
        lat.energy(s) >= gamma
            || minus.ground_nbhd.contains(&s)
            || plus.ground_nbhd.contains(&s)
            || matches!(canonical.kind.get(&s), Some(super::canonical::Canonical::Band { .. }))
    });
    let split_lemma = {
        let a = barrier::reachable(&lat, &[lat.minus()], gamma, Some(&HashSet::from([lat.plus()])), budget)?;
        let b = barrier::reachable(&lat, &[lat.plus()], gamma, Some(&HashSet::from([lat.minus()])), budget)?;
        let mut u = a;
        u.extend(b);
        u == typical
    };

    let b = bulk_constant(k, l);
    let e = 1.0 / (minus.chain.vertices.len() as f64 * minus.chain.capacity);
    let kappa = b + 2.0 * e;
    let checks = StructureChecks {
        edges_disjoint: minus.edge.is_disjoint(&plus.edge),
        minus_edge_meets_bulk_in_r2: meet(&minus.edge) == r2,
        plus_edge_meets_bulk_in_rl2: meet(&plus.edge) == rl2,
        typical_is_edge_union_bulk: union_len.0 == typical.len() && union_len.1,
        inner_minus_identity: minus.inner_identity,
        inner_plus_identity: plus.inner_identity,
        low_energy_classified,
        neighbourhoods_disjoint: minus.disjoint && plus.disjoint,
        split_lemma,
        stray_outer_edges: minus.stray + plus.stray,
        e_in_range: e > 0.0 && e <= 1.0 / l as f64,
    };
    Ok(TypicalStructure {
        model: *model,
        lattice: lat,
        canonical,
        bulk,
        bulk_gamma,
        edge_minus: minus.edge,
        edge_plus: plus.edge,
        typical,
        n_minus: minus.ground_nbhd,
        n_plus: plus.ground_nbhd,
        chain_minus: minus.chain,
        chain_plus: plus.chain,
        constants: Constants { gamma, b, e, kappa },
        checks,
    })
}

/// Default-budget convenience wrapper.
pub fn typical_structure_default(model: &IsingModel) -> Result<TypicalStructure> {
    typical_structure(model, DEFAULT_BUDGET)
}
