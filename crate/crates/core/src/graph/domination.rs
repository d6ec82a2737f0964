use serde::{Deserialize, Serialize};

use super::{LfGraph, Side};
use crate::bitset::BitSet;
use crate::budget::Deadline;
use crate::error::{Error, Result};
use crate::gf::Felt;
use crate::linalg::Vector;

/// Largest graph the exact solvers accept.
pub const DOMINATION_VERTEX_LIMIT: usize = 256;
const EXHAUSTIVE_VERTEX_LIMIT: usize = 20;

/// Which vertices must be dominated. For a side, dominators are drawn from
/// the opposite side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Vec,
    Fun,
    Whole,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomMode {
    /// Vertices outside `D` need a neighbor in `D`.
    Standard,
    /// Every target vertex needs a neighbor in `D`.
    Total,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domination {
    pub size: usize,
    pub witness: Vec<usize>,
}

struct CoverProblem {
    universe: BitSet,
    candidates: Vec<usize>,
    covers: Vec<BitSet>,
}

fn cover_problem(g: &LfGraph, target: Target, mode: DomMode) -> CoverProblem {
    let total = g.vertex_count();
    let (universe, candidates): (BitSet, Vec<usize>) = match target {
        Target::Vec => (
            g.side_set(Side::Vec),
            g.side_set(Side::Fun).iter().collect(),
        ),
        Target::Fun => (
            g.side_set(Side::Fun),
            g.side_set(Side::Vec).iter().collect(),
        ),
        Target::Whole => (BitSet::full(total), (0..total).collect()),
    };
    let covers = candidates
        .iter()
        .map(|&c| {
            let mut s = g.neighbors(c).clone();
            if mode == DomMode::Standard && universe.contains(c) {
                s.insert(c);
            }
            s.intersect_with(&universe);
            s
        })
        .collect();
    CoverProblem {
        universe,
        candidates,
        covers,
    }
}

/// Whether `set` dominates `target` in the given mode.
pub fn is_dominating(g: &LfGraph, target: Target, mode: DomMode, set: &[usize]) -> bool {
    let p = cover_problem(g, target, mode);
    let mut covered = BitSet::new(g.vertex_count());
    for &d in set {
        match p.candidates.iter().position(|&c| c == d) {
            Some(i) => covered.union_with(&p.covers[i]),
            None => return false,
        }
    }
    p.universe.is_subset(&covered)
}

/// The hyperplane pencil `{f_{e1 + a e2} : a in F_q} ∪ {f_{e2}}`, which
/// dominates the vector side with `q + 1` functionals.
pub fn pencil_witness(g: &LfGraph) -> Vec<usize> {
    let f = g.field();
    let e1 = Vector::basis(f, g.n(), 0);
    let e2 = Vector::basis(f, g.n(), 1);
    let mut out: Vec<usize> = f
        .elements()
        .map(|a| g.id_of(Side::Fun, &e1.add(&e2.scale(a)).unwrap()).unwrap())
        .collect();
    out.push(g.id_of(Side::Fun, &e2.scale(Felt::ONE)).unwrap());
    out.sort_unstable();
    out
}

fn check_size(g: &LfGraph, limit: usize) -> Result<()> {
    if g.vertex_count() > limit {
        return Err(Error::SizeGuard {
            vertices: g.vertex_count(),
            limit,
        });
    }
    Ok(())
}

/// Exact domination number with a witness, by branch and bound.
///
/// Branches on the uncovered vertex with the fewest remaining dominators;
/// candidates already tried at a node are excluded from later siblings.
/// Nodes are pruned by `ceil(uncovered / max_gain)`.
pub fn domination_number(
    g: &LfGraph,
    target: Target,
    mode: DomMode,
    deadline: &Deadline,
) -> Result<Domination> {
    check_size(g, DOMINATION_VERTEX_LIMIT)?;
    let p = cover_problem(g, target, mode);
    let total = g.vertex_count();
    let mut coverers = vec![vec![]; total];
    for (ci, cov) in p.covers.iter().enumerate() {
        for x in cov.iter() {
            coverers[x].push(ci);
        }
    }
    if p.universe.iter().any(|x| coverers[x].is_empty()) {
        return Err(Error::Invalid(
            "target has a vertex nothing can dominate".into(),
        ));
    }

    let greedy = greedy_cover(&p);
    let mut s = Search {
        covers: &p.covers,
        coverers: &coverers,
        best: greedy,
        chosen: vec![],
        deadline,
    };
    let mut excluded = BitSet::new(p.candidates.len());
    s.go(&p.universe, &mut excluded)?;

    let mut witness: Vec<usize> = s.best.iter().map(|&ci| p.candidates[ci]).collect();
    witness.sort_unstable();
    Ok(Domination {
        size: witness.len(),
        witness,
    })
}

fn greedy_cover(p: &CoverProblem) -> Vec<usize> {
    let mut uncovered = p.universe.clone();
    let mut out = vec![];
    while !uncovered.is_empty() {
        let (ci, _) = p
            .covers
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.intersection_count(&uncovered)))
            .max_by_key(|&(i, gain)| (gain, std::cmp::Reverse(i)))
            .expect("candidates");
        uncovered.difference_with(&p.covers[ci]);
        out.push(ci);
    }
    out
}

struct Search<'a> {
    covers: &'a [BitSet],
    coverers: &'a [Vec<usize>],
    best: Vec<usize>,
    chosen: Vec<usize>,
    deadline: &'a Deadline,
}

impl Search<'_> {
    fn go(&mut self, uncovered: &BitSet, excluded: &mut BitSet) -> Result<()> {
        self.deadline.tick()?;
        if uncovered.is_empty() {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
            }
            return Ok(());
        }
        if self.chosen.len() + 1 >= self.best.len() {
            return Ok(());
        }
        let max_gain = (0..self.covers.len())
            .filter(|&c| !excluded.contains(c))
            .map(|c| self.covers[c].intersection_count(uncovered))
            .max()
            .unwrap_or(0);
        if max_gain == 0 {
            return Ok(());
        }
        let lower = uncovered.count().div_ceil(max_gain);
        if self.chosen.len() + lower >= self.best.len() {
            return Ok(());
        }

        let mut pick = None;
        let mut fewest = usize::MAX;
        for x in uncovered.iter() {
            let avail = self.coverers[x]
                .iter()
                .filter(|&&c| !excluded.contains(c))
                .count();
            if avail < fewest {
                fewest = avail;
                pick = Some(x);
                if avail <= 1 {
                    break;
                }
            }
        }
        let x = pick.expect("uncovered is nonempty");
        if fewest == 0 {
            return Ok(());
        }
        let mut options: Vec<(usize, usize)> = self.coverers[x]
            .iter()
            .filter(|&&c| !excluded.contains(c))
            .map(|&c| (c, self.covers[c].intersection_count(uncovered)))
            .collect();
        options.sort_by_key(|&(c, gain)| (std::cmp::Reverse(gain), c));

        let mut tried = vec![];
        for (c, _) in options {
            self.chosen.push(c);
            let mut next = uncovered.clone();
            next.difference_with(&self.covers[c]);
            let r = self.go(&next, excluded);
            self.chosen.pop();
            if r.is_err() {
                for t in tried {
                    excluded.remove(t);
                }
                return r;
            }
            excluded.insert(c);
            tried.push(c);
        }
        for t in tried {
            excluded.remove(t);
        }
        Ok(())
    }
}

/// Exact domination number by trying every subset in order of size. Only
/// for graphs of at most 20 vertices; used to cross-check the main solver.
pub fn domination_number_exhaustive(
    g: &LfGraph,
    target: Target,
    mode: DomMode,
) -> Result<Domination> {
    check_size(g, EXHAUSTIVE_VERTEX_LIMIT)?;
    let p = cover_problem(g, target, mode);
    let m = p.candidates.len();
    for size in 0..=m {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let mut covered = BitSet::new(g.vertex_count());
            for &i in &idx {
                covered.union_with(&p.covers[i]);
            }
            if p.universe.is_subset(&covered) {
                let witness = idx.iter().map(|&i| p.candidates[i]).collect();
                return Ok(Domination { size, witness });
            }
            // next combination
            let Some(pos) = (0..size).rev().find(|&i| idx[i] < m - size + i) else {
                break;
            };
            idx[pos] += 1;
            for j in pos + 1..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Err(Error::Invalid(
        "target has a vertex nothing can dominate".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(q: usize, n: usize, t: Target, m: DomMode) -> Domination {
        let g = LfGraph::for_order(q, n).unwrap();
        let d = domination_number(&g, t, m, &Deadline::none()).unwrap();
        assert!(is_dominating(&g, t, m, &d.witness));
        d
    }

    #[test]
    fn one_sided_examples() {
        let g = LfGraph::for_order(2, 3).unwrap();
        let d = solve(2, 3, Target::Vec, DomMode::Standard);
        assert_eq!(d.size, 3);
        let w = pencil_witness(&g);
        let named: Vec<usize> = [[1, 0, 0], [1, 1, 0], [0, 1, 0]]
            .iter()
            .map(|c| {
                g.id_of(Side::Fun, &Vector::from_indices(g.field(), c).unwrap())
                    .unwrap()
            })
            .collect();
        let mut named_sorted = named.clone();
        named_sorted.sort();
        assert_eq!(w, named_sorted);
        assert!(is_dominating(&g, Target::Vec, DomMode::Standard, &w));
        for (q, n) in [(2, 2), (3, 2), (4, 2), (3, 3)] {
            assert_eq!(solve(q, n, Target::Vec, DomMode::Standard).size, q + 1);
            assert_eq!(solve(q, n, Target::Fun, DomMode::Total).size, q + 1);
        }
    }

    #[test]
    fn whole_graph_examples() {
        assert_eq!(solve(2, 2, Target::Whole, DomMode::Total).size, 6);
        assert_eq!(solve(2, 2, Target::Whole, DomMode::Standard).size, 3);
        // K_{2,2} components need two vertices each either way
        assert_eq!(solve(3, 2, Target::Whole, DomMode::Standard).size, 8);
        assert_eq!(solve(3, 2, Target::Whole, DomMode::Total).size, 8);
        assert_eq!(solve(2, 3, Target::Whole, DomMode::Total).size, 6);
    }

    #[test]
    fn solver_agrees_with_exhaustive_search() {
        for (q, n) in [(2, 2), (3, 2), (2, 3)] {
            let g = LfGraph::for_order(q, n).unwrap();
            for t in [Target::Vec, Target::Fun, Target::Whole] {
                for m in [DomMode::Standard, DomMode::Total] {
                    let a = domination_number(&g, t, m, &Deadline::none()).unwrap();
                    let b = domination_number_exhaustive(&g, t, m).unwrap();
                    assert_eq!(a.size, b.size, "({q},{n}) {t:?} {m:?}");
                    assert!(is_dominating(&g, t, m, &b.witness));
                }
            }
        }
    }

    #[test]
    fn exhaustive_guard() {
        let g = LfGraph::for_order(3, 3).unwrap();
        assert!(matches!(
            domination_number_exhaustive(&g, Target::Whole, DomMode::Standard),
            Err(Error::SizeGuard { .. })
        ));
    }

    #[test]
    fn non_dominating_sets_rejected() {
        let g = LfGraph::for_order(2, 3).unwrap();
        assert!(!is_dominating(&g, Target::Vec, DomMode::Standard, &[7, 8]));
        // vector-side vertices cannot dominate the vector side
        assert!(!is_dominating(
            &g,
            Target::Vec,
            DomMode::Standard,
            &[0, 1, 2, 3, 4, 5, 6]
        ));
        assert!(is_dominating(
            &g,
            Target::Whole,
            DomMode::Standard,
            &(0..14).collect::<Vec<_>>()
        ));
    }
}
