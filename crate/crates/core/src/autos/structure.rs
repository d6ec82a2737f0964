use serde::Serialize;

use super::generators::{plane_components, sigma_swap};
use super::{automorphism_violation, line_action, VertexPermutation};
use crate::error::{Error, Result};
use crate::graph::{LfGraph, Side};

/// Structural properties of one automorphism. Optional fields are `None`
/// when the property does not apply to this automorphism or dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureVerdict {
    /// Induces a well-defined bijection on twin classes.
    pub line_action: bool,
    /// `rho(N(L)) = N(rho(L))` for every twin class `L`.
    pub n_commutation: bool,
    /// For side-preserving `rho`: each hyperplane class maps onto the
    /// intersection of the neighborhoods of the images of its lines.
    pub intersection_identity: Option<bool>,
    /// For side-swapping `rho`: the same identity checked on `sigma ∘ rho`.
    pub intersection_via_sigma: Option<bool>,
    /// The vector side maps onto a single side.
    pub side_pure: bool,
    /// `n = 2`: every component maps onto a component, one side onto one side.
    pub componentwise_pure: Option<bool>,
    pub preserves_sides: bool,
    /// First failed property, with a witness vertex.
    pub failure: Option<(String, usize)>,
}

impl StructureVerdict {
    /// All properties that the theory predicts for this dimension hold.
    pub fn all_ok(&self, n: usize) -> bool {
        self.line_action
            && self.n_commutation
            && self.intersection_identity != Some(false)
            && self.intersection_via_sigma != Some(false)
            && self.componentwise_pure != Some(false)
            && (n == 2 || self.side_pure)
    }
}

/// Every member of line `from` lands in line `to`.
fn line_maps_to(g: &LfGraph, rho: &VertexPermutation, from: usize, to: usize) -> bool {
    g.lines()[from]
        .members
        .iter()
        .all(|&x| g.line_of(rho.apply(x)) == to)
}

/// First hyperplane class breaking the intersection identity, for a
/// side-preserving automorphism.
fn intersection_failure(g: &LfGraph, rho: &VertexPermutation) -> Option<usize> {
    let lines = g.lines();
    let vec_lines: Vec<usize> = (0..lines.len())
        .filter(|&i| lines[i].side == Side::Vec)
        .collect();
    let fun_side = g.side_set(Side::Fun);
    for h in lines.iter().filter(|l| l.side == Side::Fun) {
        let mut meet = fun_side.clone();
        for &si in &vec_lines {
            // the hyperplane class lies in N(S) exactly when S lies in the hyperplane
            if g.adjacent(h.members[0], lines[si].members[0]) {
                let img = g.line_of(rho.apply(lines[si].members[0]));
                meet.intersect_with(g.neighbors(lines[img].members[0]));
            }
        }
        let onto = meet.count() == h.members.len()
            && h.members.iter().all(|&x| meet.contains(rho.apply(x)));
        if !onto {
            return Some(h.members[0]);
        }
    }
    None
}

pub fn check_structure(g: &LfGraph, rho: &VertexPermutation) -> Result<StructureVerdict> {
    if let Some((x, y)) = automorphism_violation(g, rho) {
        return Err(Error::NotAutomorphism(format!(
            "adjacency of ({x}, {y}) not preserved"
        )));
    }
    let mut failure: Option<(String, usize)> = None;
    let mut fail = |what: &str, w: usize| {
        if failure.is_none() {
            failure = Some((what.to_string(), w));
        }
    };

    let action = line_action(g, rho);
    if let Err(e) = &action {
        fail(&format!("line action: {}", e.reason), e.witness.0);
    }

    let lines = g.lines();
    let mut n_commutation = true;
    for line in lines {
        let x = line.members[0];
        let target = g.neighbors(lines[g.line_of(rho.apply(x))].members[0]);
        let source = g.neighbors(x);
        let commutes = source.count() == target.count()
            && source.iter().all(|y| target.contains(rho.apply(y)));
        if !commutes {
            n_commutation = false;
            fail("neighborhood commutation", x);
            break;
        }
    }

    let h = g.side_size();
    let preserves_sides = (0..h).all(|x| rho.apply(x) < h);
    let swaps_sides = (0..h).all(|x| rho.apply(x) >= h);
    let side_pure = preserves_sides || swaps_sides;
    if !side_pure && g.n() > 2 {
        fail(
            "side purity",
            (0..h).find(|&x| rho.apply(x) >= h).unwrap_or(0),
        );
    }

    let intersection_identity = preserves_sides.then(|| intersection_failure(g, rho));
    if let Some(Some(w)) = intersection_identity {
        fail("intersection identity", w);
    }
    let intersection_via_sigma =
        swaps_sides.then(|| intersection_failure(g, &sigma_swap(g).compose(rho)));
    if let Some(Some(w)) = intersection_via_sigma {
        fail("intersection identity through the side swap", w);
    }

    let componentwise_pure = (g.n() == 2).then(|| {
        let comps = plane_components(g);
        let mut partner = vec![0; lines.len()];
        for &(vl, fl) in &comps {
            partner[vl] = fl;
            partner[fl] = vl;
        }
        for &(vl, fl) in &comps {
            let dest = g.line_of(rho.apply(lines[vl].members[0]));
            if !line_maps_to(g, rho, vl, dest) || !line_maps_to(g, rho, fl, partner[dest]) {
                fail("component purity", lines[vl].members[0]);
                return false;
            }
        }
        true
    });

    Ok(StructureVerdict {
        line_action: action.is_ok(),
        n_commutation,
        intersection_identity: intersection_identity.map(|f| f.is_none()),
        intersection_via_sigma: intersection_via_sigma.map(|f| f.is_none()),
        side_pure,
        componentwise_pure,
        preserves_sides,
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autos::{component_swap, for_each_automorphism, random_generated_automorphism};
    use crate::budget::Deadline;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_passes_everything() {
        for (q, n) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
            let g = LfGraph::for_order(q, n).unwrap();
            let v = check_structure(&g, &VertexPermutation::identity(g.vertex_count())).unwrap();
            assert!(v.all_ok(n) && v.side_pure && v.preserves_sides);
            assert_eq!(v.intersection_identity, Some(true));
            assert_eq!(v.intersection_via_sigma, None);
            assert_eq!(v.failure, None);
        }
    }

    #[test]
    fn fano_group_is_side_pure() {
        let g = LfGraph::for_order(2, 3).unwrap();
        let mut swapped = 0;
        for_each_automorphism(&g, &Deadline::none(), |p| {
            let v = check_structure(&g, p).unwrap();
            assert!(v.all_ok(3), "{v:?}");
            if !v.preserves_sides {
                swapped += 1;
                assert_eq!(v.intersection_via_sigma, Some(true));
            }
        })
        .unwrap();
        assert_eq!(swapped, 168);
    }

    #[test]
    fn mixed_plane_automorphism() {
        let g = LfGraph::for_order(3, 2).unwrap();
        let rho = component_swap(&g, &[false, true, false, false]).unwrap();
        let v = check_structure(&g, &rho).unwrap();
        assert_eq!(v.componentwise_pure, Some(true));
        assert!(!v.side_pure);
        assert!(v.all_ok(2));
        assert_eq!(v.intersection_identity, None);
    }

    #[test]
    fn random_generated_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = LfGraph::for_order(3, 3).unwrap();
        for _ in 0..10 {
            let rho = random_generated_automorphism(&g, &mut rng, true).unwrap();
            assert!(check_structure(&g, &rho).unwrap().all_ok(3));
        }
    }

    #[test]
    fn rejects_non_automorphism() {
        let g = LfGraph::for_order(2, 2).unwrap();
        let p = VertexPermutation::from_image(vec![2, 1, 0, 3, 4, 5]).unwrap();
        assert!(matches!(
            check_structure(&g, &p),
            Err(Error::NotAutomorphism(_))
        ));
    }
}
