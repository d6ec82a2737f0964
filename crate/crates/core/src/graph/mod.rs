//! The linear functional graph of `F_q^n`.
//!
//! Vertex ids: the `q^n - 1` nonzero vectors come first in lexicographic
//! order of their coordinates, followed by the functionals `f_u` in the same
//! order of `u`. A vector with coordinates `(c_1, .., c_n)` has code
//! `sum c_i q^(n-i)`; its id is `code - 1` on the vector side and
//! `q^n - 1 + code - 1` on the functional side.

mod domination;
mod export;

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::gf::{Felt, Field};
use crate::linalg::Vector;

pub use domination::{
    domination_number, domination_number_exhaustive, is_dominating, pencil_witness, DomMode,
    Domination, Target,
};
pub use export::{
    edge_list_json, graph6_decode, graph6_encode, EdgeListDoc, EdgeListVertex, ExportFormat,
};

/// Default cap on `2(q^n - 1)`.
pub const DEFAULT_VERTEX_LIMIT: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Vec,
    Fun,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Vec => Side::Fun,
            Side::Fun => Side::Vec,
        }
    }
}

/// A twin class: the nonzero multiples of one vector on one side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub side: Side,
    /// Monic representative.
    pub rep: Vector,
    /// Member ids ordered by the scalar `r` in `r * rep`, so `members[0]` is the
    /// representative itself.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct LfGraph {
    field: Field,
    n: usize,
    /// `q^n - 1`, the size of each side.
    half: usize,
    adj: Vec<BitSet>,
    lines: Vec<Line>,
    line_of: Vec<usize>,
}

fn checked_half(q: usize, n: usize) -> Option<usize> {
    q.checked_pow(n as u32).map(|x| x - 1)
}

impl LfGraph {
    pub fn build(field: &Field, n: usize) -> Result<Self> {
        LfGraph::build_with_limit(field, n, Some(DEFAULT_VERTEX_LIMIT))
    }

    /// `limit = None` lifts the size guard.
    pub fn build_with_limit(field: &Field, n: usize, limit: Option<usize>) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        let q = field.q();
        let half = checked_half(q, n).ok_or(Error::SizeGuard {
            vertices: usize::MAX,
            limit: limit.unwrap_or(0),
        })?;
        let total = half.saturating_mul(2);
        if let Some(limit) = limit {
            if total > limit {
                return Err(Error::SizeGuard {
                    vertices: total,
                    limit,
                });
            }
        }

        let vectors: Vec<Vector> = crate::linalg::nonzero_vectors(field, n).collect();
        let mut adj = vec![BitSet::new(total); total];
        for (ui, u) in vectors.iter().enumerate() {
            for (vi, v) in vectors.iter().enumerate() {
                if dot_raw(field, u.coords(), v.coords()).is_zero() {
                    adj[half + ui].insert(vi);
                    adj[vi].insert(half + ui);
                }
            }
        }

        let mut g = LfGraph {
            field: field.clone(),
            n,
            half,
            adj,
            lines: vec![],
            line_of: vec![0; total],
        };
        for side in [Side::Vec, Side::Fun] {
            for (i, v) in vectors.iter().enumerate() {
                if !v.is_monic() {
                    continue;
                }
                let members: Vec<usize> = field
                    .nonzero()
                    .map(|r| g.id_of(side, &v.scale(r)).expect("nonzero multiple"))
                    .collect();
                let li = g.lines.len();
                for &m in &members {
                    g.line_of[m] = li;
                }
                debug_assert_eq!(members[0], g.offset(side) + i);
                g.lines.push(Line {
                    side,
                    rep: v.clone(),
                    members,
                });
            }
        }
        Ok(g)
    }

    /// Convenience: `build(F_q, n)` with the built-in field of order `q`.
    pub fn for_order(q: usize, n: usize) -> Result<Self> {
        LfGraph::build(&Field::of_order(q)?, n)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> usize {
        self.field.q()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side_size(&self) -> usize {
        self.half
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.half
    }

    fn offset(&self, side: Side) -> usize {
        match side {
            Side::Vec => 0,
            Side::Fun => self.half,
        }
    }

    pub fn side(&self, id: usize) -> Side {
        if id < self.half {
            Side::Vec
        } else {
            Side::Fun
        }
    }

    pub fn side_set(&self, side: Side) -> BitSet {
        let off = self.offset(side);
        BitSet::from_iter(self.vertex_count(), off..off + self.half)
    }

    fn check_id(&self, id: usize) -> Result<()> {
        if id < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::InvalidVertex(id))
        }
    }

    /// Coordinates of a vertex (the vector `v`, or `u` for `f_u`).
    pub fn coords(&self, id: usize) -> Vector {
        let q = self.q();
        let mut code = id % self.half + 1;
        let mut c = vec![Felt::ZERO; self.n];
        for slot in c.iter_mut().rev() {
            *slot = Felt::from_index_unchecked(code % q);
            code /= q;
        }
        Vector::new(&self.field, c)
    }

    /// The vertex with the given side and (nonzero) coordinates.
    pub fn id_of(&self, side: Side, v: &Vector) -> Result<usize> {
        if *v.field() != self.field {
            return Err(Error::FieldMismatch);
        }
        if v.dim() != self.n {
            return Err(Error::DimensionMismatch(v.dim(), self.n));
        }
        let code = v
            .coords()
            .iter()
            .fold(0usize, |acc, c| acc * self.q() + c.index());
        if code == 0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.offset(side) + code - 1)
    }

    /// Id of the standard basis vector `e_i` (0-based) on the given side.
    pub fn basis_id(&self, side: Side, i: usize) -> usize {
        self.id_of(side, &Vector::basis(&self.field, self.n, i))
            .expect("basis vector")
    }

    pub fn neighbors(&self, id: usize) -> &BitSet {
        &self.adj[id]
    }

    #[inline]
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn adjacency(&self) -> &[BitSet] {
        &self.adj
    }

    pub fn degree(&self, id: usize) -> Result<usize> {
        self.check_id(id)?;
        Ok(self.adj[id].count())
    }

    /// `q^(n-1) - 1`.
    pub fn expected_degree(&self) -> usize {
        self.q().pow(self.n as u32 - 1) - 1
    }

    pub fn check_regular(&self) -> bool {
        let d = self.expected_degree();
        self.adj.iter().all(|row| row.count() == d)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.half)
            .flat_map(|v| self.adj[v].iter().map(move |f| (v, f)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.half).map(|v| self.adj[v].count()).sum()
    }

    /// Connected components by BFS, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let total = self.vertex_count();
        let mut seen = vec![false; total];
        let mut out = vec![];
        for start in 0..total {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for y in self.adj[x].iter() {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                        queue.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Whether the subgraph induced on `left ∪ right` is complete bipartite
    /// with exactly these parts.
    pub fn is_complete_bipartite(&self, left: &BitSet, right: &BitSet) -> bool {
        let mut all = left.clone();
        all.union_with(right);
        left.iter().all(|x| {
            let mut r = self.adj[x].clone();
            r.intersect_with(&all);
            r == *right
        }) && right.iter().all(|x| {
            let mut r = self.adj[x].clone();
            r.intersect_with(&all);
            r == *left
        })
    }

    /// All lines, vector side first, each side in lexicographic order of
    /// monic representatives.
    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    /// Number of lines per side, `(q^n - 1)/(q - 1)`.
    pub fn lines_per_side(&self) -> usize {
        self.lines.len() / 2
    }

    /// Index into `lines()` of the line containing `id`.
    pub fn line_of(&self, id: usize) -> usize {
        self.line_of[id]
    }

    pub fn line_set(&self, li: usize) -> BitSet {
        BitSet::from_iter(self.vertex_count(), self.lines[li].members.iter().copied())
    }

    /// Common neighborhood of a line's members (all members share it).
    pub fn neighbor_set(&self, line: &Line) -> BitSet {
        self.adj[line.members[0]].clone()
    }

    /// Twin classes obtained purely from equal neighbor bitsets, ordered by
    /// smallest member.
    pub fn twin_classes(&self) -> Vec<Vec<usize>> {
        let mut groups: HashMap<&BitSet, Vec<usize>> = HashMap::new();
        for (id, row) in self.adj.iter().enumerate() {
            groups.entry(row).or_default().push(id);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort_unstable_by_key(|c| c[0]);
        out
    }

    /// The line partition in the same normal form as `twin_classes`.
    pub fn line_partition(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self
            .lines
            .iter()
            .map(|l| {
                let mut m = l.members.clone();
                m.sort_unstable();
                m
            })
            .collect();
        out.sort_unstable_by_key(|c| c[0]);
        out
    }
}

#[inline]
pub(crate) fn dot_raw(f: &Field, a: &[Felt], b: &[Felt]) -> Felt {
    a.iter()
        .zip(b)
        .fold(Felt::ZERO, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}
