//! Exact automorphism counts.
//!
//! The main enumerator works on the twin-class quotient: classes are
//! collapsed to single nodes, node permutations preserving adjacency are
//! found by backtracking, and each one lifts to exactly `((q-1)!)^(2M)`
//! vertex automorphisms. A naive vertex-level search on the raw graph serves
//! as the cross-check on small instances.

use super::formulas::{formula_twin_stabilizer, BigCount};
use super::VertexPermutation;
use crate::bitset::BitSet;
use crate::budget::Deadline;
use crate::error::{Error, Result};
use crate::graph::{LfGraph, Side};

/// Largest graph accepted by the vertex-level enumerator.
pub const VERTEX_LEVEL_LIMIT: usize = 20;
const QUOTIENT_NODE_LIMIT: usize = 80;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismCount {
    /// Automorphisms of the twin-class quotient.
    pub quotient: u64,
    /// Automorphisms fixing every twin class.
    pub twin_factor: BigCount,
    pub total: BigCount,
}

/// Adjacency between twin classes, indexed like `g.lines()`.
pub fn quotient_adjacency(g: &LfGraph) -> Vec<BitSet> {
    let lines = g.lines();
    lines
        .iter()
        .map(|l| {
            let row = g.neighbors(l.members[0]);
            BitSet::from_iter(
                lines.len(),
                (0..lines.len()).filter(|&j| row.contains(lines[j].members[0])),
            )
        })
        .collect()
}

/// Next node is always the one with the most already-ordered neighbors,
/// so each new image is pinned down by as many constraints as possible.
fn search_order(adj: &[BitSet]) -> Vec<usize> {
    let n = adj.len();
    let mut placed = BitSet::new(n);
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n)
            .filter(|&x| !placed.contains(x))
            .max_by_key(|&x| (adj[x].intersection_count(&placed), std::cmp::Reverse(x)))
            .expect("unplaced node");
        placed.insert(next);
        order.push(next);
    }
    order
}

/// Backtracking over node images with bitset candidate refinement.
struct Matcher<'a> {
    adj: &'a [BitSet],
    order: Vec<usize>,
    degree: Vec<usize>,
}

impl<'a> Matcher<'a> {
    fn new(adj: &'a [BitSet]) -> Self {
        Matcher {
            adj,
            order: search_order(adj),
            degree: adj.iter().map(BitSet::count).collect(),
        }
    }

    fn first_candidates(&self) -> Vec<usize> {
        let Some(&x) = self.order.first() else {
            return vec![];
        };
        (0..self.adj.len())
            .filter(|&y| self.degree[y] == self.degree[x])
            .collect()
    }

    /// Visits every automorphism whose first node maps to `first`.
    fn run(
        &self,
        first: usize,
        deadline: &Deadline,
        visit: &mut dyn FnMut(&[usize]),
    ) -> Result<()> {
        let n = self.adj.len();
        let mut image = vec![usize::MAX; n];
        let mut used = BitSet::new(n);
        image[self.order[0]] = first;
        used.insert(first);
        self.extend(1, &mut image, &mut used, deadline, visit)
    }

    fn extend(
        &self,
        depth: usize,
        image: &mut [usize],
        used: &mut BitSet,
        deadline: &Deadline,
        visit: &mut dyn FnMut(&[usize]),
    ) -> Result<()> {
        deadline.tick()?;
        if depth == self.order.len() {
            visit(image);
            return Ok(());
        }
        let x = self.order[depth];
        let mut cand = BitSet::full(self.adj.len());
        cand.difference_with(used);
        for &w in &self.order[..depth] {
            if self.adj[x].contains(w) {
                cand.intersect_with(&self.adj[image[w]]);
            } else {
                cand.difference_with(&self.adj[image[w]]);
            }
        }
        for y in cand.iter() {
            if self.degree[y] != self.degree[x] {
                continue;
            }
            image[x] = y;
            used.insert(y);
            let r = self.extend(depth + 1, image, used, deadline, visit);
            used.remove(y);
            image[x] = usize::MAX;
            r?;
        }
        Ok(())
    }
}

fn check_quotient_size(g: &LfGraph) -> Result<()> {
    let nodes = g.lines().len();
    if nodes > QUOTIENT_NODE_LIMIT {
        return Err(Error::SizeGuard {
            vertices: nodes,
            limit: QUOTIENT_NODE_LIMIT,
        });
    }
    Ok(())
}

fn count_branch(m: &Matcher, first: usize, deadline: &Deadline) -> Result<u64> {
    let mut count = 0u64;
    m.run(first, deadline, &mut |_| count += 1)?;
    Ok(count)
}

/// Exact `|Aut|` by quotient enumeration.
pub fn count_automorphisms(g: &LfGraph, deadline: &Deadline) -> Result<AutomorphismCount> {
    check_quotient_size(g)?;
    let adj = quotient_adjacency(g);
    let m = Matcher::new(&adj);
    let firsts = m.first_candidates();

    #[cfg(feature = "parallel")]
    let quotient: u64 = {
        use rayon::prelude::*;
        let until = deadline.instant();
        firsts
            .par_iter()
            .map(|&y| count_branch(&m, y, &Deadline::at(until)))
            .collect::<Result<Vec<u64>>>()?
            .into_iter()
            .sum()
    };
    #[cfg(not(feature = "parallel"))]
    let quotient: u64 = firsts
        .iter()
        .map(|&y| count_branch(&m, y, deadline))
        .sum::<Result<u64>>()?;

    let twin_factor = formula_twin_stabilizer(g.q(), g.n())?;
    let total = BigCount::from(quotient) * &twin_factor;
    Ok(AutomorphismCount {
        quotient,
        twin_factor,
        total,
    })
}

/// All automorphisms of the twin-class quotient, as images of line indices.
pub fn quotient_automorphisms(g: &LfGraph, deadline: &Deadline) -> Result<Vec<Vec<usize>>> {
    check_quotient_size(g)?;
    let adj = quotient_adjacency(g);
    let m = Matcher::new(&adj);
    let mut out = vec![];
    for y in m.first_candidates() {
        m.run(y, deadline, &mut |img| out.push(img.to_vec()))?;
    }
    Ok(out)
}

/// The lift of a quotient automorphism sending the `k`-th member of each
/// class to the `k`-th member of its image class.
pub fn lift_quotient_automorphism(g: &LfGraph, class_image: &[usize]) -> Result<VertexPermutation> {
    let lines = g.lines();
    if class_image.len() != lines.len() {
        return Err(Error::DimensionMismatch(class_image.len(), lines.len()));
    }
    let mut image = vec![0; g.vertex_count()];
    for (line, &t) in lines.iter().zip(class_image) {
        let target = &lines.get(t).ok_or(Error::InvalidVertex(t))?.members;
        for (&m, &x) in line.members.iter().zip(target) {
            image[m] = x;
        }
    }
    VertexPermutation::from_image(image)
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..left.len() {
            let x = left.remove(i);
            cur.push(x);
            go(cur, left, out);
            cur.pop();
            left.insert(i, x);
        }
    }
    let mut out = vec![];
    go(&mut vec![], &mut (0..m).collect(), &mut out);
    out
}

/// Streams the whole automorphism group: every quotient automorphism
/// combined with every choice of member bijections between mapped classes.
/// Returns the number of permutations visited.
pub fn for_each_automorphism(
    g: &LfGraph,
    deadline: &Deadline,
    mut visit: impl FnMut(&VertexPermutation),
) -> Result<u64> {
    let lines = g.lines();
    let perms = permutations(g.q() - 1);
    let mut visited = 0u64;
    for qa in quotient_automorphisms(g, deadline)? {
        let mut choice = vec![0usize; lines.len()];
        loop {
            deadline.tick()?;
            let mut image = vec![0; g.vertex_count()];
            for (c, line) in lines.iter().enumerate() {
                let target = &lines[qa[c]].members;
                for (k, &m) in line.members.iter().enumerate() {
                    image[m] = target[perms[choice[c]][k]];
                }
            }
            visit(&VertexPermutation::from_image(image).expect("lifted bijection"));
            visited += 1;
            // odometer over per-class choices
            let Some(pos) = choice.iter().position(|&c| c + 1 < perms.len()) else {
                break;
            };
            choice[pos] += 1;
            choice[..pos].iter_mut().for_each(|c| *c = 0);
        }
    }
    Ok(visited)
}

fn boolean_matrix(g: &LfGraph, verts: &[usize]) -> Vec<Vec<bool>> {
    verts
        .iter()
        .map(|&a| verts.iter().map(|&b| g.adjacent(a, b)).collect())
        .collect()
}

/// Plain backtracking over vertex images on dense adjacency matrices, with
/// no use of twin classes or bitsets.
fn naive_isomorphisms(
    a: &[Vec<bool>],
    b: &[Vec<bool>],
    deadline: &Deadline,
    visit: &mut dyn FnMut(&[usize]),
) -> Result<u64> {
    fn go(
        a: &[Vec<bool>],
        b: &[Vec<bool>],
        image: &mut Vec<usize>,
        used: &mut [bool],
        deadline: &Deadline,
        visit: &mut dyn FnMut(&[usize]),
    ) -> Result<u64> {
        deadline.tick()?;
        let x = image.len();
        if x == a.len() {
            visit(image);
            return Ok(1);
        }
        let mut total = 0;
        for y in 0..b.len() {
            if used[y] || (0..x).any(|w| a[x][w] != b[y][image[w]]) {
                continue;
            }
            used[y] = true;
            image.push(y);
            total += go(a, b, image, used, deadline, visit)?;
            image.pop();
            used[y] = false;
        }
        Ok(total)
    }
    if a.len() != b.len() {
        return Ok(0);
    }
    go(
        a,
        b,
        &mut Vec::with_capacity(a.len()),
        &mut vec![false; b.len()],
        deadline,
        visit,
    )
}

fn check_vertex_level(g: &LfGraph) -> Result<()> {
    if g.vertex_count() > VERTEX_LEVEL_LIMIT {
        return Err(Error::SizeGuard {
            vertices: g.vertex_count(),
            limit: VERTEX_LEVEL_LIMIT,
        });
    }
    Ok(())
}

pub fn count_automorphisms_vertex_level(g: &LfGraph, deadline: &Deadline) -> Result<BigCount> {
    check_vertex_level(g)?;
    let all: Vec<usize> = (0..g.vertex_count()).collect();
    let m = boolean_matrix(g, &all);
    Ok(BigCount::from(naive_isomorphisms(
        &m,
        &m,
        deadline,
        &mut |_| {},
    )?))
}

pub fn for_each_automorphism_vertex_level(
    g: &LfGraph,
    deadline: &Deadline,
    mut visit: impl FnMut(&VertexPermutation),
) -> Result<u64> {
    check_vertex_level(g)?;
    let all: Vec<usize> = (0..g.vertex_count()).collect();
    let m = boolean_matrix(g, &all);
    naive_isomorphisms(&m, &m, deadline, &mut |img| {
        visit(&VertexPermutation::from_image(img.to_vec()).expect("bijection"))
    })
}

/// Number of adjacency-preserving bijections between the components of two
/// vector lines (`S ∪ N(S)`) of an `n = 2` graph, found by exhaustive search.
pub fn component_isomorphism_count(
    g: &LfGraph,
    first: usize,
    second: usize,
    deadline: &Deadline,
) -> Result<BigCount> {
    if g.n() != 2 {
        return Err(Error::RequiresPlane);
    }
    let closed = |li: usize| -> Result<Vec<usize>> {
        let line = g.lines().get(li).ok_or(Error::InvalidVertex(li))?;
        if line.side != Side::Vec {
            return Err(Error::Invalid(format!("line {li} is not a vector line")));
        }
        let mut set = g.neighbor_set(line);
        set.union_with(&g.line_set(li));
        Ok(set.iter().collect())
    };
    let a = boolean_matrix(g, &closed(first)?);
    let b = boolean_matrix(g, &closed(second)?);
    if a.len() > 2 * VERTEX_LEVEL_LIMIT {
        return Err(Error::SizeGuard {
            vertices: a.len(),
            limit: 2 * VERTEX_LEVEL_LIMIT,
        });
    }
    Ok(BigCount::from(naive_isomorphisms(
        &a,
        &b,
        deadline,
        &mut |_| {},
    )?))
}

/// Order of the within-class symmetric groups, `((q-1)!)^(2M)`, as a check
/// that the lift factor matches a direct product of factorials.
#[cfg(test)]
fn lift_factor(g: &LfGraph) -> BigCount {
    g.lines()
        .iter()
        .map(|l| super::formulas::factorial(l.members.len()))
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autos::{is_automorphism, line_action};
    use std::collections::HashSet;

    fn total(q: usize, n: usize) -> BigCount {
        count_automorphisms(&LfGraph::for_order(q, n).unwrap(), &Deadline::none())
            .unwrap()
            .total
    }

    #[test]
    fn plane_counts() {
        assert_eq!(total(2, 2), BigCount::from(48u32));
        assert_eq!(total(3, 2), BigCount::from(98304u32));
        let g = LfGraph::for_order(2, 2).unwrap();
        assert_eq!(
            count_automorphisms_vertex_level(&g, &Deadline::none()).unwrap(),
            BigCount::from(48u32)
        );
        let g = LfGraph::for_order(3, 2).unwrap();
        assert_eq!(
            count_automorphisms_vertex_level(&g, &Deadline::none()).unwrap(),
            BigCount::from(98304u32)
        );
    }

    #[test]
    fn fano_count() {
        let g = LfGraph::for_order(2, 3).unwrap();
        let c = count_automorphisms(&g, &Deadline::none()).unwrap();
        assert_eq!(c.quotient, 336);
        assert_eq!(
            count_automorphisms_vertex_level(&g, &Deadline::none()).unwrap(),
            BigCount::from(336u32)
        );
    }

    #[test]
    fn quotient_counts_match_projective_groups() {
        // 2 * |PGammaL(3, q)|
        for (q, expected) in [(2u64, 336u64), (3, 11232), (4, 241920)] {
            let g = LfGraph::for_order(q as usize, 3).unwrap();
            assert_eq!(
                count_automorphisms(&g, &Deadline::none()).unwrap().quotient,
                expected,
                "q={q}"
            );
        }
    }

    #[test]
    fn lift_factor_matches_formula() {
        for (q, n) in [(3, 2), (4, 2), (3, 3)] {
            let g = LfGraph::for_order(q, n).unwrap();
            assert_eq!(lift_factor(&g), formula_twin_stabilizer(q, n).unwrap());
        }
    }

    #[test]
    fn streams_agree() {
        for (q, n) in [(2, 2), (3, 2), (2, 3)] {
            let g = LfGraph::for_order(q, n).unwrap();
            let mut a = HashSet::new();
            let ca = for_each_automorphism(&g, &Deadline::none(), |p| {
                assert!(is_automorphism(&g, p));
                a.insert(p.image().to_vec());
            })
            .unwrap();
            let mut b = HashSet::new();
            let cb = for_each_automorphism_vertex_level(&g, &Deadline::none(), |p| {
                b.insert(p.image().to_vec());
            })
            .unwrap();
            assert_eq!(ca, cb);
            assert_eq!(a.len() as u64, ca);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn twin_stabilizer_subgroup() {
        let g = LfGraph::for_order(3, 2).unwrap();
        let ident: Vec<usize> = (0..g.lines().len()).collect();
        let mut fixing = 0u64;
        for_each_automorphism(&g, &Deadline::none(), |p| {
            if line_action(&g, p).unwrap() == ident {
                fixing += 1;
            }
        })
        .unwrap();
        assert_eq!(fixing, 256);
    }

    #[test]
    fn component_isomorphisms() {
        for q in [2, 3] {
            let g = LfGraph::for_order(q, 2).unwrap();
            let c = component_isomorphism_count(&g, 0, 1, &Deadline::none()).unwrap();
            assert_eq!(c, crate::autos::formula_component_isos(q).unwrap());
        }
    }

    #[test]
    fn guards_and_timeouts() {
        let g = LfGraph::for_order(3, 3).unwrap();
        assert!(matches!(
            count_automorphisms_vertex_level(&g, &Deadline::none()),
            Err(Error::SizeGuard { .. })
        ));
        let big = LfGraph::for_order(9, 3).unwrap();
        assert!(matches!(
            count_automorphisms(&big, &Deadline::none()),
            Err(Error::SizeGuard { .. })
        ));
        let past = Deadline::at(Some(std::time::Instant::now()));
        let g = LfGraph::for_order(4, 3).unwrap();
        assert_eq!(count_automorphisms(&g, &past), Err(Error::Timeout));
    }

    #[test]
    fn permutation_table() {
        assert_eq!(permutations(1), vec![vec![0]]);
        assert_eq!(permutations(3).len(), 6);
    }
}
