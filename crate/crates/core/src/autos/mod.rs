//! Automorphisms of the linear functional graph.

mod decompose;
mod enumerate;
mod formulas;
mod generators;
mod structure;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::LfGraph;

pub use decompose::{
    compose, decompose, DecomposeFailure, DecomposeStep, Decomposition, DecompositionDoc,
};
pub use enumerate::{
    component_isomorphism_count, count_automorphisms, count_automorphisms_vertex_level,
    for_each_automorphism, for_each_automorphism_vertex_level, lift_quotient_automorphism,
    quotient_adjacency, quotient_automorphisms, AutomorphismCount, VERTEX_LEVEL_LIMIT,
};
pub use formulas::{
    factorial, formula_card_general, formula_card_n2, formula_component_isos,
    formula_twin_stabilizer, BigCount,
};
pub use generators::{
    chi_p, component_swap, delta_for, phi_bar, pi_extend, random_frobenius,
    random_generated_automorphism, random_phi, random_plane_automorphism, random_twin_table,
    sigma_swap, tau_from_table, Delta, DeltaForm, TwinTable,
};
pub use structure::{check_structure, StructureVerdict};

/// A bijection on vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexPermutation {
    image: Vec<usize>,
}

impl VertexPermutation {
    pub fn identity(len: usize) -> Self {
        VertexPermutation {
            image: (0..len).collect(),
        }
    }

    pub fn from_image(image: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; image.len()];
        for (i, &x) in image.iter().enumerate() {
            if x >= image.len() {
                return Err(Error::NotPermutation(format!(
                    "image of {i} is {x}, out of range"
                )));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::NotPermutation(format!("{x} is hit twice")));
            }
        }
        Ok(VertexPermutation { image })
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &VertexPermutation) -> VertexPermutation {
        assert_eq!(
            self.len(),
            inner.len(),
            "composing permutations of different sizes"
        );
        VertexPermutation {
            image: inner.image.iter().map(|&x| self.image[x]).collect(),
        }
    }

    pub fn inverse(&self) -> VertexPermutation {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.image.iter().enumerate() {
            inv[x] = i;
        }
        VertexPermutation { image: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn to_doc(&self, g: &LfGraph) -> PermutationDoc {
        PermutationDoc {
            q: g.q(),
            n: g.n(),
            image: self.image.clone(),
        }
    }
}

/// JSON form of a permutation: `{"q":, "n":, "image": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationDoc {
    pub q: usize,
    pub n: usize,
    pub image: Vec<usize>,
}

impl PermutationDoc {
    pub fn into_permutation(self, g: &LfGraph) -> Result<VertexPermutation> {
        if (self.q, self.n) != (g.q(), g.n()) {
            return Err(Error::Invalid(format!(
                "permutation is for q={}, n={} but graph has q={}, n={}",
                self.q,
                self.n,
                g.q(),
                g.n()
            )));
        }
        if self.image.len() != g.vertex_count() {
            return Err(Error::DimensionMismatch(self.image.len(), g.vertex_count()));
        }
        VertexPermutation::from_image(self.image)
    }
}

/// A pair `(x, y)` whose adjacency is not preserved, if any.
pub fn automorphism_violation(g: &LfGraph, perm: &VertexPermutation) -> Option<(usize, usize)> {
    if perm.len() != g.vertex_count() {
        return Some((perm.len(), g.vertex_count()));
    }
    for x in 0..g.vertex_count() {
        let source = g.neighbors(x);
        let target = g.neighbors(perm.apply(x));
        if source.count() == target.count() && source.iter().all(|y| target.contains(perm.apply(y)))
        {
            continue;
        }
        // witness: a neighbor whose image is not adjacent, or the reverse
        let mapped = source.mapped(perm.image());
        let mut diff = mapped.clone();
        diff.difference_with(target);
        let y = match diff.first() {
            Some(img) => perm.inverse().apply(img),
            None => {
                let mut d2 = target.clone();
                d2.difference_with(&mapped);
                perm.inverse().apply(d2.first().expect("rows differ"))
            }
        };
        return Some((x, y));
    }
    None
}

pub fn is_automorphism(g: &LfGraph, perm: &VertexPermutation) -> bool {
    automorphism_violation(g, perm).is_none()
}

/// Why a permutation does not induce a permutation of the twin classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ActionFailure {
    pub reason: String,
    pub witness: (usize, usize),
}

/// The permutation of twin classes (indices into `g.lines()`) induced by an
/// automorphism.
pub fn line_action(
    g: &LfGraph,
    perm: &VertexPermutation,
) -> std::result::Result<Vec<usize>, ActionFailure> {
    if let Some(w) = automorphism_violation(g, perm) {
        return Err(ActionFailure {
            reason: "not an automorphism".into(),
            witness: w,
        });
    }
    let lines = g.lines();
    let mut image = Vec::with_capacity(lines.len());
    let mut hit: Vec<Option<usize>> = vec![None; lines.len()];
    for (li, line) in lines.iter().enumerate() {
        let target = g.line_of(perm.apply(line.members[0]));
        if let Some(&m) = line
            .members
            .iter()
            .find(|&&m| g.line_of(perm.apply(m)) != target)
        {
            return Err(ActionFailure {
                reason: "class is split by the permutation".into(),
                witness: (line.members[0], m),
            });
        }
        if let Some(prev) = hit[target] {
            return Err(ActionFailure {
                reason: "two classes map into one".into(),
                witness: (lines[prev].members[0], line.members[0]),
            });
        }
        hit[target] = Some(li);
        image.push(target);
    }
    Ok(image)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Side;
    use crate::linalg::Vector;

    #[test]
    fn permutation_basics() {
        assert!(VertexPermutation::from_image(vec![0, 0]).is_err());
        assert!(VertexPermutation::from_image(vec![0, 2]).is_err());
        let p = VertexPermutation::from_image(vec![1, 2, 0]).unwrap();
        assert!(p.compose(&p.inverse()).is_identity());
        assert_eq!(p.compose(&p).image(), &[2, 0, 1]);
    }

    #[test]
    fn automorphism_checks() {
        let g = LfGraph::for_order(2, 2).unwrap();
        assert!(is_automorphism(&g, &VertexPermutation::identity(6)));
        let a = g
            .id_of(
                Side::Vec,
                &Vector::from_indices(g.field(), &[1, 0]).unwrap(),
            )
            .unwrap();
        let b = g
            .id_of(
                Side::Vec,
                &Vector::from_indices(g.field(), &[1, 1]).unwrap(),
            )
            .unwrap();
        let mut img: Vec<usize> = (0..6).collect();
        img.swap(a, b);
        let p = VertexPermutation::from_image(img).unwrap();
        assert!(!is_automorphism(&g, &p));
        assert!(automorphism_violation(&g, &p).is_some());
        assert!(line_action(&g, &p).is_err());
    }

    #[test]
    fn identity_line_action() {
        let g = LfGraph::for_order(3, 2).unwrap();
        let act = line_action(&g, &VertexPermutation::identity(g.vertex_count())).unwrap();
        assert_eq!(act, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn doc_round_trip() {
        let g = LfGraph::for_order(2, 2).unwrap();
        let p = VertexPermutation::from_image(vec![1, 0, 2, 4, 3, 5]).unwrap();
        let s = serde_json::to_string(&p.to_doc(&g)).unwrap();
        assert_eq!(s, r#"{"q":2,"n":2,"image":[1,0,2,4,3,5]}"#);
        let back: PermutationDoc = serde_json::from_str(&s).unwrap();
        assert_eq!(back.into_permutation(&g).unwrap(), p);
        let wrong = PermutationDoc {
            q: 3,
            n: 2,
            image: vec![],
        };
        assert!(wrong.into_permutation(&g).is_err());
    }
}
