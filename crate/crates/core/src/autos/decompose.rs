//! Factoring an automorphism into generators.
//!
//! For `n >= 3` the factors are `sigma^s ∘ chi_P ∘ pi_j ∘ tau`; for `n = 2`
//! they are `delta ∘ chi_P ∘ phi_bar ∘ tau`. Each step is checked, and a
//! failure names the step and a witness vertex.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::generators::{
    chi_p, delta_for, phi_bar, pi_extend, sigma_swap, tau_from_table, DeltaForm, TwinTable,
};
use super::{automorphism_violation, VertexPermutation};
use crate::error::{Error, Result};
use crate::gf::Felt;
use crate::graph::{LfGraph, Side};
use crate::linalg::{rank, Matrix, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecomposeStep {
    Input,
    SideSwap,
    BasisImages,
    ScalarForm,
    Frobenius,
    Phi,
    Residual,
    RoundTrip,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecomposeFailure {
    pub step: DecomposeStep,
    pub detail: String,
    pub witness: Option<usize>,
}

impl fmt::Display for DecomposeFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} step failed: {}", self.step, self.detail)?;
        if let Some(w) = self.witness {
            write!(f, " (vertex {w})")?;
        }
        Ok(())
    }
}

impl std::error::Error for DecomposeFailure {}

fn failure(
    step: DecomposeStep,
    detail: impl Into<String>,
    witness: Option<usize>,
) -> DecomposeFailure {
    DecomposeFailure {
        step,
        detail: detail.into(),
        witness,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub q: usize,
    pub n: usize,
    /// A side exchange is the outermost factor (`sigma`, or `delta` for `n = 2`).
    pub swap: bool,
    pub delta: Option<VertexPermutation>,
    pub delta_form: Option<DeltaForm>,
    pub p: Matrix,
    pub frob_exponent: Option<u32>,
    pub phi: Option<Vec<Felt>>,
    pub tau: TwinTable,
}

/// JSON form of a [`Decomposition`]; `p` is row-major and field elements are
/// canonical indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionDoc {
    pub q: usize,
    pub n: usize,
    pub swap: bool,
    pub delta: Option<Vec<usize>>,
    pub delta_form: Option<DeltaForm>,
    pub p: Vec<usize>,
    pub frob_exponent: Option<u32>,
    pub phi: Option<Vec<usize>>,
    pub tau: BTreeMap<usize, Vec<usize>>,
}

impl Decomposition {
    pub fn to_doc(&self) -> DecompositionDoc {
        DecompositionDoc {
            q: self.q,
            n: self.n,
            swap: self.swap,
            delta: self.delta.as_ref().map(|d| d.image().to_vec()),
            delta_form: self.delta_form,
            p: self.p.entries().iter().map(|x| x.index()).collect(),
            frob_exponent: self.frob_exponent,
            phi: self
                .phi
                .as_ref()
                .map(|t| t.iter().map(|x| x.index()).collect()),
            tau: self.tau.clone(),
        }
    }
}

impl DecompositionDoc {
    pub fn into_decomposition(self, g: &LfGraph) -> Result<Decomposition> {
        let f = g.field();
        let delta = match self.delta {
            Some(img) => Some(VertexPermutation::from_image(img)?),
            None => None,
        };
        let phi = match self.phi {
            Some(t) => Some(t.iter().map(|&i| f.elem(i)).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        Ok(Decomposition {
            q: self.q,
            n: self.n,
            swap: self.swap,
            delta,
            delta_form: self.delta_form,
            p: Matrix::from_indices(f, self.n, self.n, &self.p)?,
            frob_exponent: self.frob_exponent,
            phi,
            tau: self.tau,
        })
    }
}

/// Rebuilds the permutation `outer ∘ chi_P ∘ middle ∘ tau`.
pub fn compose(g: &LfGraph, d: &Decomposition) -> Result<VertexPermutation> {
    if (d.q, d.n) != (g.q(), g.n()) {
        return Err(Error::BadDecomposition(format!(
            "made for q={}, n={}",
            d.q, d.n
        )));
    }
    let tau = tau_from_table(g, &d.tau)?;
    let chi = chi_p(g, &d.p)?;
    let (outer, middle) = if g.n() == 2 {
        if d.frob_exponent.is_some() {
            return Err(Error::BadDecomposition(
                "field automorphism given for n = 2".into(),
            ));
        }
        let phi = d
            .phi
            .as_ref()
            .ok_or_else(|| Error::BadDecomposition("missing phi".into()))?;
        let outer = match &d.delta {
            Some(delta) if delta.len() == g.vertex_count() => delta.clone(),
            Some(_) => return Err(Error::BadDecomposition("delta has the wrong length".into())),
            None if d.swap => return Err(Error::BadDecomposition("swap set without delta".into())),
            None => VertexPermutation::identity(g.vertex_count()),
        };
        (outer, phi_bar(g, phi)?)
    } else {
        if d.phi.is_some() || d.delta.is_some() {
            return Err(Error::BadDecomposition(
                "phi and delta apply only to n = 2".into(),
            ));
        }
        let j = d
            .frob_exponent
            .ok_or_else(|| Error::BadDecomposition("missing field automorphism".into()))?;
        let outer = if d.swap {
            sigma_swap(g)
        } else {
            VertexPermutation::identity(g.vertex_count())
        };
        (outer, pi_extend(g, j)?)
    };
    Ok(outer.compose(&chi).compose(&middle).compose(&tau))
}

fn residual_table(
    g: &LfGraph,
    tau: &VertexPermutation,
) -> std::result::Result<TwinTable, DecomposeFailure> {
    if let Some(x) = (0..g.vertex_count()).find(|&x| g.line_of(tau.apply(x)) != g.line_of(x)) {
        return Err(failure(
            DecomposeStep::Residual,
            "residual moves a vertex out of its twin class",
            Some(x),
        ));
    }
    let mut table = TwinTable::new();
    for line in g.lines() {
        let imgs: Vec<usize> = line.members.iter().map(|&m| tau.apply(m)).collect();
        if imgs != line.members {
            table.insert(line.members[0], imgs);
        }
    }
    Ok(table)
}

/// Columns `rho(e_i)` as a matrix, and `chi_{P^-1} ∘ rho`.
fn basis_step(
    g: &LfGraph,
    rho: &VertexPermutation,
) -> std::result::Result<(Matrix, VertexPermutation), DecomposeFailure> {
    let h = g.side_size();
    if let Some(x) = (0..h).find(|&x| rho.apply(x) >= h) {
        return Err(failure(
            DecomposeStep::SideSwap,
            "vector side not restored",
            Some(x),
        ));
    }
    let cols: Vec<Vector> = (0..g.n())
        .map(|i| g.coords(rho.apply(g.basis_id(Side::Vec, i))))
        .collect();
    if rank(&cols) < g.n() {
        return Err(failure(
            DecomposeStep::BasisImages,
            "images of the standard basis are linearly dependent",
            Some(g.basis_id(Side::Vec, 0)),
        ));
    }
    let p = Matrix::from_columns(&cols).expect("n columns of length n");
    let back = chi_p(g, &p.inverse().expect("full rank")).expect("invertible");
    Ok((p, back.compose(rho)))
}

fn unexpected(e: Error) -> DecomposeFailure {
    failure(DecomposeStep::Input, e.to_string(), None)
}

pub fn decompose(
    g: &LfGraph,
    rho: &VertexPermutation,
) -> std::result::Result<Decomposition, DecomposeFailure> {
    if rho.len() != g.vertex_count() {
        return Err(failure(
            DecomposeStep::Input,
            "permutation has the wrong length",
            None,
        ));
    }
    if let Some((x, y)) = automorphism_violation(g, rho) {
        return Err(failure(
            DecomposeStep::Input,
            format!("not an automorphism: adjacency of ({x}, {y})"),
            Some(x),
        ));
    }
    let d = if g.n() == 2 {
        decompose_plane(g, rho)?
    } else {
        decompose_general(g, rho)?
    };
    match compose(g, &d) {
        Ok(back) if back == *rho => Ok(d),
        Ok(back) => {
            let x = (0..rho.len()).find(|&x| back.apply(x) != rho.apply(x));
            Err(failure(
                DecomposeStep::RoundTrip,
                "recomposed factors differ from the input",
                x,
            ))
        }
        Err(e) => Err(failure(DecomposeStep::RoundTrip, e.to_string(), None)),
    }
}

fn decompose_general(
    g: &LfGraph,
    rho: &VertexPermutation,
) -> std::result::Result<Decomposition, DecomposeFailure> {
    let f = g.field();
    let n = g.n();
    let swap = rho.apply(0) >= g.side_size();
    let rho_v = if swap {
        sigma_swap(g).compose(rho)
    } else {
        rho.clone()
    };
    let (p, rho1) = basis_step(g, &rho_v)?;

    // scalar normal form: rho1(e_1 + a e_j) ~ e_1 + pi_1j(a) e_j
    let e1 = Vector::basis(f, n, 0);
    let mut pi_1: Vec<Vec<Felt>> = Vec::with_capacity(n - 1);
    for j in 1..n {
        let ej = Vector::basis(f, n, j);
        let mut table = Vec::with_capacity(f.q());
        for a in f.elements() {
            let id = g
                .id_of(Side::Vec, &e1.add(&ej.scale(a)).expect("same dim"))
                .expect("nonzero");
            let img = g.coords(rho1.apply(id)).monic_rep().expect("nonzero");
            let c = img.coords();
            let shaped = c[0] == Felt::ONE && (1..n).all(|i| i == j || c[i].is_zero());
            if !shaped || (a.is_zero() != c[j].is_zero()) {
                return Err(failure(
                    DecomposeStep::ScalarForm,
                    format!(
                        "image of e1 + a e{} is not of the form e1 + b e{}",
                        j + 1,
                        j + 1
                    ),
                    Some(id),
                ));
            }
            table.push(c[j]);
        }
        pi_1.push(table);
    }

    let diag: Vec<Felt> = std::iter::once(Felt::ONE)
        .chain(pi_1.iter().map(|t| t[1]))
        .collect();
    let q_mat = Matrix::diag(f, &diag);
    let scale = pi_1[0][1];
    let pi: Vec<Felt> = pi_1[0]
        .iter()
        .map(|&b| f.div(b, scale).expect("nonzero"))
        .collect();
    let j = f
        .field_automorphisms()
        .into_iter()
        .find(|&j| {
            f.elements()
                .all(|a| f.frobenius(a, j).expect("in range") == pi[a.index()])
        })
        .ok_or_else(|| {
            let a = f
                .elements()
                .find(|a| f.frobenius(*a, 0).unwrap() != pi[a.index()])
                .unwrap_or(Felt::ONE);
            let id = g
                .id_of(
                    Side::Vec,
                    &e1.add(&Vector::basis(f, n, 1).scale(a)).expect("same dim"),
                )
                .ok();
            failure(
                DecomposeStep::Frobenius,
                "recovered field permutation is not a Frobenius power",
                id,
            )
        })?;

    let undo_q = chi_p(g, &q_mat.inverse().expect("nonzero diagonal")).map_err(unexpected)?;
    let undo_pi = pi_extend(g, (f.k() - j) % f.k()).map_err(unexpected)?;
    let tau = undo_pi.compose(&undo_q).compose(&rho1);
    let tau = residual_table(g, &tau)?;

    Ok(Decomposition {
        q: g.q(),
        n,
        swap,
        delta: None,
        delta_form: None,
        p: p.mul(&q_mat).expect("square"),
        frob_exponent: Some(j),
        phi: None,
        tau,
    })
}

fn decompose_plane(
    g: &LfGraph,
    rho: &VertexPermutation,
) -> std::result::Result<Decomposition, DecomposeFailure> {
    let f = g.field();
    let delta =
        delta_for(g, rho).map_err(|e| failure(DecomposeStep::SideSwap, e.to_string(), None))?;
    let rho_v = delta.perm.inverse().compose(rho);
    let (p, rho1) = basis_step(g, &rho_v)?;

    // rho1(f_{e1 + a e2}) ~ f_{e1 + phi(a) e2}
    let e1 = Vector::basis(f, 2, 0);
    let e2 = Vector::basis(f, 2, 1);
    let mut phi = Vec::with_capacity(f.q());
    for a in f.elements() {
        let id = g
            .id_of(Side::Fun, &e1.add(&e2.scale(a)).expect("same dim"))
            .expect("nonzero");
        let img = g.coords(rho1.apply(id)).monic_rep().expect("nonzero");
        if img.coords()[0] != Felt::ONE {
            return Err(failure(
                DecomposeStep::Phi,
                "image of f_(e1 + a e2) has zero first coordinate",
                Some(id),
            ));
        }
        phi.push(img.coords()[1]);
    }
    let phi_map = phi_bar(g, &phi).map_err(|e| {
        failure(
            DecomposeStep::Phi,
            format!("recovered field map is not a zero-fixing bijection: {e}"),
            None,
        )
    })?;
    let tau = residual_table(g, &phi_map.inverse().compose(&rho1))?;

    let swap = delta.form != DeltaForm::Identity;
    Ok(Decomposition {
        q: g.q(),
        n: 2,
        swap,
        delta: swap.then_some(delta.perm),
        delta_form: Some(delta.form),
        p,
        frob_exponent: None,
        phi: Some(phi),
        tau,
    })
}
