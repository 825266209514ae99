//! Flow calculus on the conductance graph.
//!
//! Edges are unordered pairs `{x,y}` with `c^s(x,y) > 0`, stored once with
//! `lo < hi`. A [`Flow`] keeps `φ(lo,hi)` and answers `φ(hi,lo)` by negation,
//! so antisymmetry holds bit-exactly.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::MarkovProcess;
use crate::potential::{self, Variant};

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSet {
    n: usize,
    ends: Vec<(usize, usize)>,
    /// `c(lo,hi)`
    c_fwd: Vec<f64>,
    /// `c(hi,lo)`
    c_bwd: Vec<f64>,
    adj: Vec<Vec<(usize, usize)>>,
    index: HashMap<(usize, usize), usize>,
}

impl EdgeSet {
    pub fn of(p: &MarkovProcess) -> Self {
        let n = p.n();
        let mut index = HashMap::new();
        let mut ends = Vec::new();
        let mut c_fwd = Vec::new();
        let mut c_bwd = Vec::new();
        for (x, y, _) in p.rate_triplets() {
            let key = (x.min(y), x.max(y));
            if index.contains_key(&key) {
                continue;
            }
            let (lo, hi) = key;
            let cf = p.conductance(lo, hi);
            let cb = p.conductance(hi, lo);
            if cf + cb <= 0.0 {
                continue;
            }
            index.insert(key, ends.len());
            ends.push(key);
            c_fwd.push(cf);
            c_bwd.push(cb);
        }
        let mut adj = vec![Vec::new(); n];
        for (e, &(lo, hi)) in ends.iter().enumerate() {
            adj[lo].push((hi, e));
            adj[hi].push((lo, e));
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Self { n, ends, c_fwd, c_bwd, adj, index }
    }

    pub fn n_states(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    /// Canonical endpoints `(lo, hi)` of edge `e`.
    pub fn ends(&self, e: usize) -> (usize, usize) {
        self.ends[e]
    }

    pub fn id(&self, x: usize, y: usize) -> Option<usize> {
        self.index.get(&(x.min(y), x.max(y))).copied()
    }

    /// `(neighbour, edge id)` pairs of `x`, sorted by neighbour.
    pub fn neighbors(&self, x: usize) -> &[(usize, usize)] {
        &self.adj[x]
    }

    /// `c(x,y)`; zero off the edge set.
    pub fn c(&self, x: usize, y: usize) -> f64 {
        match self.id(x, y) {
            Some(e) if x < y => self.c_fwd[e],
            Some(e) => self.c_bwd[e],
            None => 0.0,
        }
    }

    pub fn cs(&self, e: usize) -> f64 {
        0.5 * (self.c_fwd[e] + self.c_bwd[e])
    }

    /// Fundamental cycles of a BFS spanning forest, each as a closed walk of
    /// directed steps.
    pub fn fundamental_cycles(&self) -> Vec<Vec<(usize, usize)>> {
        let mut parent: Vec<Option<usize>> = vec![None; self.n];
        let mut depth = vec![usize::MAX; self.n];
        let mut tree = vec![false; self.len()];
        for root in 0..self.n {
            if depth[root] != usize::MAX {
                continue;
            }
            depth[root] = 0;
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                for &(y, e) in &self.adj[x] {
                    if depth[y] == usize::MAX {
                        depth[y] = depth[x] + 1;
                        parent[y] = Some(x);
                        tree[e] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        let mut cycles = Vec::new();
        for (e, &(u, v)) in self.ends.iter().enumerate() {
            if tree[e] {
                continue;
            }
            // u → v, then v up to the common ancestor and back down to u
            let mut up_v = vec![v];
            let mut up_u = vec![u];
            let (mut a, mut b) = (v, u);
            while depth[a] > depth[b] {
                a = parent[a].expect("non-root");
                up_v.push(a);
            }
            while depth[b] > depth[a] {
                b = parent[b].expect("non-root");
                up_u.push(b);
            }
            while a != b {
                a = parent[a].expect("non-root");
                b = parent[b].expect("non-root");
                up_v.push(a);
                up_u.push(b);
            }
            let mut walk = vec![(u, v)];
            walk.extend(up_v.windows(2).map(|w| (w[0], w[1])));
            let down: Vec<usize> = up_u.into_iter().rev().collect();
            walk.extend(down.windows(2).map(|w| (w[0], w[1])));
            cycles.push(walk);
        }
        cycles
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowKind {
    Phi,
    PhiStar,
    Psi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum UnitFlowKind {
    Psi,
    Phi,
    PhiStar,
}

/// Antisymmetric edge function.
#[derive(Debug, Clone)]
pub struct Flow {
    edges: Arc<EdgeSet>,
    values: Vec<f64>,
}

impl Flow {
    pub fn zero(edges: Arc<EdgeSet>) -> Self {
        let values = vec![0.0; edges.len()];
        Self { edges, values }
    }

    /// `value(lo, hi)` gives `φ(lo,hi)` for each canonical edge.
    pub fn from_fn(edges: Arc<EdgeSet>, mut value: impl FnMut(usize, usize) -> f64) -> Self {
        let values = edges.ends.iter().map(|&(lo, hi)| value(lo, hi)).collect();
        Self { edges, values }
    }

    /// Builds from directed entries; each must lie on the edge set.
    pub fn from_entries(edges: Arc<EdgeSet>, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let mut f = Self::zero(edges);
        for &(x, y, v) in entries {
            f.add_to(x, y, v)?;
        }
        Ok(f)
    }

    pub fn edges(&self) -> &Arc<EdgeSet> {
        &self.edges
    }

    /// `φ(lo,hi)` indexed by edge id.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        match self.edges.id(x, y) {
            Some(e) if x < y => self.values[e],
            Some(e) => -self.values[e],
            None => 0.0,
        }
    }

    /// Adds `v` to `φ(x,y)` (and `−v` to `φ(y,x)`).
    pub fn add_to(&mut self, x: usize, y: usize, v: f64) -> Result<()> {
        let e = self
            .edges
            .id(x, y)
            .ok_or_else(|| Error::InfeasibleFlow(format!("({x},{y}) is not an edge")))?;
        self.values[e] += if x < y { v } else { -v };
        Ok(())
    }

    pub fn divergence(&self, x: usize) -> f64 {
        self.edges.adj[x]
            .iter()
            .map(|&(y, e)| if x < y { self.values[e] } else { -self.values[e] })
            .sum()
    }

    pub fn divergences(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.edges.n];
        for (e, &(lo, hi)) in self.edges.ends.iter().enumerate() {
            d[lo] += self.values[e];
            d[hi] -= self.values[e];
        }
        d
    }

    pub fn divergence_set(&self, a: &[usize]) -> f64 {
        a.iter().map(|&x| self.divergence(x)).sum()
    }

    /// `⟨φ,ψ⟩ = ½ Σ_{x,y} φψ/c^s`, each unordered edge counted once.
    pub fn inner(&self, other: &Flow) -> f64 {
        debug_assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(e, (a, b))| a * b / self.edges.cs(e))
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    pub fn scaled(&self, c: f64) -> Flow {
        Flow { edges: self.edges.clone(), values: self.values.iter().map(|v| c * v).collect() }
    }

    /// `self + c·other`
    pub fn axpy(&self, c: f64, other: &Flow) -> Flow {
        Flow {
            edges: self.edges.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect(),
        }
    }

    pub fn plus(&self, other: &Flow) -> Flow {
        self.axpy(1.0, other)
    }

    pub fn minus(&self, other: &Flow) -> Flow {
        self.axpy(-1.0, other)
    }

    /// `[[x, y, φ(x,y)]]` on canonical orientation, by state label.
    pub fn to_edge_list(&self, p: &MarkovProcess) -> Vec<(String, String, f64)> {
        self.edges
            .ends
            .iter()
            .zip(&self.values)
            .map(|(&(lo, hi), &v)| (p.label(lo).to_string(), p.label(hi).to_string(), v))
            .collect()
    }

    pub fn from_edge_list(p: &MarkovProcess, list: &[(String, String, f64)]) -> Result<Flow> {
        let edges = Arc::new(EdgeSet::of(p));
        let mut entries = Vec::with_capacity(list.len());
        for (x, y, v) in list {
            entries.push((p.index_of(x)?, p.index_of(y)?, *v));
        }
        Flow::from_entries(edges, &entries)
    }
}

/// `Φ_f`, `Φ*_f` or `Ψ_f` on the given edge set.
pub fn flow_on(edges: &Arc<EdgeSet>, f: &[f64], kind: FlowKind) -> Flow {
    let es = edges.clone();
    Flow::from_fn(edges.clone(), |lo, hi| {
        let e = es.index[&(lo, hi)];
        let (cf, cb) = (es.c_fwd[e], es.c_bwd[e]);
        let phi = f[hi] * cb - f[lo] * cf;
        let phi_star = f[hi] * cf - f[lo] * cb;
        match kind {
            FlowKind::Phi => phi,
            FlowKind::PhiStar => phi_star,
            FlowKind::Psi => 0.5 * (phi + phi_star),
        }
    })
}

pub fn flow_from_function(p: &MarkovProcess, f: &[f64], kind: FlowKind) -> Flow {
    flow_on(&Arc::new(EdgeSet::of(p)), f, kind)
}

/// `ψ = −Ψ_h/cap`, `φ = −Φ_{h†}/cap` or `φ* = −Φ*_h/cap`. The first is a
/// unit flow only for reversible chains; the other two always are.
pub fn unit_flow(p: &MarkovProcess, a: &[usize], b: &[usize], kind: UnitFlowKind) -> Result<Flow> {
    let cap = potential::capacity(p, a, b)?.value;
    if !(cap > 0.0) {
        return Err(Error::ZeroCapacity);
    }
    let edges = Arc::new(EdgeSet::of(p));
    let flow = match kind {
        UnitFlowKind::Psi => {
            let h = potential::equilibrium_potential(p, a, b, Variant::Plain)?;
            flow_on(&edges, &h, FlowKind::Psi)
        }
        UnitFlowKind::Phi => {
            let hd = potential::equilibrium_potential(p, a, b, Variant::Adjoint)?;
            flow_on(&edges, &hd, FlowKind::Phi)
        }
        UnitFlowKind::PhiStar => {
            let h = potential::equilibrium_potential(p, a, b, Variant::Plain)?;
            flow_on(&edges, &h, FlowKind::PhiStar)
        }
    };
    Ok(flow.scaled(-1.0 / cap))
}

/// Largest deviation of `φ` from the class `U_a(A,B)`.
pub fn unit_flow_defect(phi: &Flow, a: &[usize], b: &[usize], amount: f64) -> f64 {
    let d = phi.divergences();
    let mut in_ab = vec![false; d.len()];
    for &x in a.iter().chain(b) {
        in_ab[x] = true;
    }
    let interior = (0..d.len())
        .filter(|&x| !in_ab[x])
        .map(|x| d[x].abs())
        .fold(0.0, f64::max);
    let sa: f64 = a.iter().map(|&x| d[x]).sum();
    let sb: f64 = b.iter().map(|&x| d[x]).sum();
    interior.max((sa - amount).abs()).max((sb + amount).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::{build_process, cycle_walk};

    #[test]
    fn constant_function_flows() {
        let c = cycle_walk(5, 0.7).unwrap();
        let f = vec![1.0; 5];
        let phi = flow_from_function(&c, &f, FlowKind::Phi);
        assert!((phi.get(0, 1) - (c.conductance(1, 0) - c.conductance(0, 1))).abs() < 1e-15);
        let psi = flow_from_function(&c, &f, FlowKind::Psi);
        assert!(psi.values().iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn antisymmetry_is_exact() {
        let c = cycle_walk(5, 0.7).unwrap();
        let phi = flow_from_function(&c, &[0.3, -1.2, 2.0, 0.1, 0.7], FlowKind::Phi);
        for x in 0..5 {
            for y in 0..5 {
                assert_eq!(phi.get(x, y), -phi.get(y, x));
            }
        }
    }

    #[test]
    fn path_flow_divergence_telescopes() {
        let p = build_process(
            &["a", "b", "c", "d"],
            &[("a", "b", 1.0), ("b", "a", 1.0), ("b", "c", 1.0), ("c", "b", 1.0), ("c", "d", 1.0), ("d", "c", 1.0)],
        )
        .unwrap();
        let edges = Arc::new(EdgeSet::of(&p));
        let f = Flow::from_entries(edges, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(f.divergences(), vec![1.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn psi_divergence_is_mu_times_symmetric_generator() {
        let c = cycle_walk(6, 0.7).unwrap();
        let f = [0.3, -1.2, 2.0, 0.1, 0.7, 1.5];
        let d = flow_from_function(&c, &f, FlowKind::PhiStar).divergences();
        let lf = c.apply_generator(&f);
        for x in 0..6 {
            assert!((d[x] - c.mu(x) * lf[x]).abs() < 1e-14);
        }
        let d = flow_from_function(&c, &f, FlowKind::Phi).divergences();
        let lf = c.apply_adjoint_generator(&f);
        for x in 0..6 {
            assert!((d[x] - c.mu(x) * lf[x]).abs() < 1e-14);
        }
    }

    #[test]
    fn unit_flows_on_cycle() {
        let c = cycle_walk(4, 0.5).unwrap();
        let psi = unit_flow(&c, &[0], &[2], UnitFlowKind::Psi).unwrap();
        assert!(unit_flow_defect(&psi, &[0], &[2], 1.0) < 1e-12);
        assert!((psi.norm_sq() - 8.0).abs() < 1e-12);
        let c = cycle_walk(7, 0.7).unwrap();
        for kind in [UnitFlowKind::Phi, UnitFlowKind::PhiStar] {
            let phi = unit_flow(&c, &[0, 1], &[4], kind).unwrap();
            assert!(unit_flow_defect(&phi, &[0, 1], &[4], 1.0) < 1e-12);
        }
    }

    #[test]
    fn fundamental_cycles_are_circulations() {
        let c = cycle_walk(5, 0.7).unwrap();
        let edges = Arc::new(EdgeSet::of(&c));
        let cycles = edges.fundamental_cycles();
        assert_eq!(cycles.len(), 1);
        let circ = Flow::from_entries(edges, &cycles[0].iter().map(|&(x, y)| (x, y, 1.0)).collect::<Vec<_>>()).unwrap();
        assert!(circ.divergences().iter().all(|d| d.abs() < 1e-15));
        assert_eq!(cycles[0].len(), 5);
    }

    #[test]
    fn edge_list_round_trip() {
        let c = cycle_walk(4, 0.7).unwrap();
        let phi = flow_from_function(&c, &[1.0, 2.0, 0.0, -1.0], FlowKind::Psi);
        let list = phi.to_edge_list(&c);
        let back = Flow::from_edge_list(&c, &list).unwrap();
        assert_eq!(back.values(), phi.values());
    }
}
