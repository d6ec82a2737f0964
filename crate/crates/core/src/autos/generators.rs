use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{automorphism_violation, VertexPermutation};
use crate::error::{Error, Result};
use crate::gf::{Felt, Field};
use crate::graph::{LfGraph, Side};
use crate::linalg::{Matrix, Vector};

/// Permutations of individual twin classes, keyed by the class
/// representative's vertex id. Each value lists the images of the class
/// members in member order. Classes not listed are fixed pointwise.
pub type TwinTable = BTreeMap<usize, Vec<usize>>;

fn map_vertices(
    g: &LfGraph,
    on_vec: impl Fn(&Vector) -> Result<(Side, Vector)>,
    on_fun: impl Fn(&Vector) -> Result<(Side, Vector)>,
) -> Result<VertexPermutation> {
    let image = (0..g.vertex_count())
        .map(|id| {
            let c = g.coords(id);
            let (side, v) = match g.side(id) {
                Side::Vec => on_vec(&c)?,
                Side::Fun => on_fun(&c)?,
            };
            g.id_of(side, &v)
        })
        .collect::<Result<Vec<_>>>()?;
    VertexPermutation::from_image(image)
}

/// `v -> Pv` on vectors and `f_u -> f_{(P^-1)^T u}` on functionals.
pub fn chi_p(g: &LfGraph, p: &Matrix) -> Result<VertexPermutation> {
    if p.field() != g.field() {
        return Err(Error::FieldMismatch);
    }
    if p.rows() != g.n() || p.cols() != g.n() {
        return Err(Error::DimensionMismatch(p.rows(), g.n()));
    }
    let dual = p.inverse()?.transpose();
    map_vertices(
        g,
        |v| Ok((Side::Vec, p.mul_vec(v)?)),
        |u| Ok((Side::Fun, dual.mul_vec(u)?)),
    )
}

/// Coordinatewise Frobenius `a -> a^(p^j)` on both sides.
pub fn pi_extend(g: &LfGraph, j: u32) -> Result<VertexPermutation> {
    let f = g.field();
    if j >= f.k() {
        return Err(Error::FrobeniusRange { j, k: f.k() });
    }
    let frob = |v: &Vector| v.map(|a| f.frobenius(a, j).expect("exponent checked"));
    map_vertices(
        g,
        |v| Ok((Side::Vec, frob(v))),
        |u| Ok((Side::Fun, frob(u))),
    )
}

/// Exchanges `u` and `f_u` for every `u`.
pub fn sigma_swap(g: &LfGraph) -> VertexPermutation {
    let h = g.side_size();
    let image = (0..g.vertex_count())
        .map(|i| if i < h { i + h } else { i - h })
        .collect();
    VertexPermutation::from_image(image).expect("involution")
}

/// A permutation stabilizing every twin class, built from per-class tables.
pub fn tau_from_table(g: &LfGraph, table: &TwinTable) -> Result<VertexPermutation> {
    let mut image: Vec<usize> = (0..g.vertex_count()).collect();
    for (&rep, imgs) in table {
        if rep >= g.vertex_count() {
            return Err(Error::InvalidVertex(rep));
        }
        let line = &g.lines()[g.line_of(rep)];
        if line.members[0] != rep {
            return Err(Error::BadTwinTable(format!(
                "{rep} is not a class representative"
            )));
        }
        if imgs.len() != line.members.len() {
            return Err(Error::BadTwinTable(format!(
                "class of {rep} has {} members, entry has {}",
                line.members.len(),
                imgs.len()
            )));
        }
        let mut sorted = imgs.clone();
        sorted.sort_unstable();
        let mut members = line.members.clone();
        members.sort_unstable();
        if sorted != members {
            let stray = imgs.iter().find(|x| !members.contains(x));
            return Err(Error::BadTwinTable(match stray {
                Some(x) => format!("entry for {rep} mixes classes ({x} is outside)"),
                None => format!("entry for {rep} is not a bijection"),
            }));
        }
        for (&m, &x) in line.members.iter().zip(imgs) {
            image[m] = x;
        }
    }
    VertexPermutation::from_image(image)
}

fn check_phi(f: &Field, phi: &[Felt]) -> Result<()> {
    if phi.len() != f.q() || phi[0] != Felt::ZERO || phi.iter().any(|x| x.index() >= f.q()) {
        return Err(Error::BadPhi);
    }
    let mut seen = vec![false; f.q()];
    for x in phi {
        if std::mem::replace(&mut seen[x.index()], true) {
            return Err(Error::BadPhi);
        }
    }
    Ok(())
}

/// The plane automorphism induced by a zero-fixing permutation `phi` of the
/// field (given as the table `phi[a.index()]`):
///
/// * `f_(a,b) -> f_(a, a phi(b/a))` when `a != 0`, fixed otherwise;
/// * `(c,d) -> (c, -c / phi(-c/d))` when `cd != 0`, fixed otherwise.
pub fn phi_bar(g: &LfGraph, phi: &[Felt]) -> Result<VertexPermutation> {
    if g.n() != 2 {
        return Err(Error::RequiresPlane);
    }
    let f = g.field();
    check_phi(f, phi)?;
    let ph = |x: Felt| phi[x.index()];
    map_vertices(
        g,
        |v| {
            let (c, d) = (v.coords()[0], v.coords()[1]);
            if c.is_zero() || d.is_zero() {
                return Ok((Side::Vec, v.clone()));
            }
            let t = ph(f.neg(f.div(c, d)?));
            let second = f.neg(f.div(c, t)?);
            Ok((Side::Vec, Vector::new(f, vec![c, second])))
        },
        |u| {
            let (a, b) = (u.coords()[0], u.coords()[1]);
            if a.is_zero() {
                return Ok((Side::Fun, u.clone()));
            }
            let second = f.mul(a, ph(f.div(b, a)?));
            Ok((Side::Fun, Vector::new(f, vec![a, second])))
        },
    )
}

/// The `n = 2` components as `(vector line, functional line)` index pairs,
/// ordered by vector line.
pub(crate) fn plane_components(g: &LfGraph) -> Vec<(usize, usize)> {
    g.lines()
        .iter()
        .enumerate()
        .filter(|(_, l)| l.side == Side::Vec)
        .map(|(li, l)| {
            let nb = g.neighbor_set(l).first().expect("degree >= 1");
            (li, g.line_of(nb))
        })
        .collect()
}

/// Swaps the two sides of every component whose vector line is flagged,
/// pairing the `k`-th members of the two lines.
pub fn component_swap(g: &LfGraph, flip: &[bool]) -> Result<VertexPermutation> {
    if g.n() != 2 {
        return Err(Error::RequiresPlane);
    }
    let comps = plane_components(g);
    if flip.len() != comps.len() {
        return Err(Error::DimensionMismatch(flip.len(), comps.len()));
    }
    let mut image: Vec<usize> = (0..g.vertex_count()).collect();
    for (&(vl, fl), &on) in comps.iter().zip(flip) {
        if !on {
            continue;
        }
        for (&a, &b) in g.lines()[vl].members.iter().zip(&g.lines()[fl].members) {
            image[a] = b;
            image[b] = a;
        }
    }
    VertexPermutation::from_image(image)
}

/// How a side-restoring map `delta` was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaForm {
    /// `rho` keeps the vector side; `delta` is the identity.
    Identity,
    /// `u <-> f_u` on the crossed part of the image of `rho`.
    Transpose,
    /// Member-wise side swap inside each crossed component; used when the
    /// `u <-> f_u` map is not an automorphism for this `rho`.
    Componentwise,
}

#[derive(Clone, Debug)]
pub struct Delta {
    pub perm: VertexPermutation,
    pub form: DeltaForm,
}

/// For `n = 2`: an automorphism `delta` with `delta^-1 ∘ rho` mapping the
/// vector side onto itself.
pub fn delta_for(g: &LfGraph, rho: &VertexPermutation) -> Result<Delta> {
    if g.n() != 2 {
        return Err(Error::RequiresPlane);
    }
    if let Some((x, y)) = automorphism_violation(g, rho) {
        return Err(Error::NotAutomorphism(format!(
            "adjacency of ({x}, {y}) not preserved"
        )));
    }
    let h = g.side_size();
    let total = g.vertex_count();
    // functionals hit by vectors, and vectors hit by functionals
    let mut crossed_fun = vec![false; total];
    let mut crossed_vec = vec![false; total];
    for x in 0..total {
        let y = rho.apply(x);
        match (g.side(x), g.side(y)) {
            (Side::Vec, Side::Fun) => crossed_fun[y] = true,
            (Side::Fun, Side::Vec) => crossed_vec[y] = true,
            _ => {}
        }
    }
    if !crossed_fun.iter().any(|&c| c) {
        return Ok(Delta {
            perm: VertexPermutation::identity(total),
            form: DeltaForm::Identity,
        });
    }

    let transpose: Vec<usize> = (0..total)
        .map(|x| match g.side(x) {
            Side::Fun if crossed_fun[x] => x - h,
            Side::Vec if crossed_vec[x] => x + h,
            _ => x,
        })
        .collect();
    let restores = |d: &VertexPermutation| {
        let back = d.inverse().compose(rho);
        (0..h).all(|x| back.apply(x) < h)
    };
    if let Ok(d) = VertexPermutation::from_image(transpose) {
        if automorphism_violation(g, &d).is_none() && restores(&d) {
            return Ok(Delta {
                perm: d,
                form: DeltaForm::Transpose,
            });
        }
    }

    let flip: Vec<bool> = plane_components(g)
        .iter()
        .map(|&(_, fl)| crossed_fun[g.lines()[fl].members[0]])
        .collect();
    let d = component_swap(g, &flip)?;
    debug_assert!(restores(&d));
    Ok(Delta {
        perm: d,
        form: DeltaForm::Componentwise,
    })
}

pub fn random_twin_table<R: Rng + ?Sized>(g: &LfGraph, rng: &mut R) -> TwinTable {
    let mut t = TwinTable::new();
    for line in g.lines() {
        let mut imgs = line.members.clone();
        imgs.shuffle(rng);
        if imgs != line.members {
            t.insert(line.members[0], imgs);
        }
    }
    t
}

/// A uniformly random permutation of the field fixing 0.
pub fn random_phi<R: Rng + ?Sized>(f: &Field, rng: &mut R) -> Vec<Felt> {
    let mut rest: Vec<Felt> = f.nonzero().collect();
    rest.shuffle(rng);
    std::iter::once(Felt::ZERO).chain(rest).collect()
}

pub fn random_frobenius<R: Rng + ?Sized>(f: &Field, rng: &mut R) -> u32 {
    rng.gen_range(0..f.k())
}

/// A uniformly random automorphism of an `n = 2` graph, assembled directly
/// from its component structure: components are permuted, each one is
/// optionally turned over, and members are matched by random bijections.
pub fn random_plane_automorphism<R: Rng + ?Sized>(
    g: &LfGraph,
    rng: &mut R,
) -> Result<VertexPermutation> {
    if g.n() != 2 {
        return Err(Error::RequiresPlane);
    }
    let comps = plane_components(g);
    let mut target: Vec<usize> = (0..comps.len()).collect();
    target.shuffle(rng);
    let mut image = vec![0; g.vertex_count()];
    for (ci, &(vl, fl)) in comps.iter().enumerate() {
        let (tv, tf) = comps[target[ci]];
        let (to_v, to_f) = if rng.gen_bool(0.5) {
            (tf, tv)
        } else {
            (tv, tf)
        };
        for (src, dst) in [(vl, to_v), (fl, to_f)] {
            let mut d = g.lines()[dst].members.clone();
            d.shuffle(rng);
            for (&a, b) in g.lines()[src].members.iter().zip(d) {
                image[a] = b;
            }
        }
    }
    VertexPermutation::from_image(image)
}

/// A random product of generators: `sigma^s ∘ chi_P ∘ pi ∘ tau` for `n >= 3`,
/// and `swap ∘ chi_P ∘ phi_bar ∘ tau` for `n = 2`, where `swap` turns over a
/// random nonempty set of components. `swap` is used only when `allow_swap`.
pub fn random_generated_automorphism<R: Rng + ?Sized>(
    g: &LfGraph,
    rng: &mut R,
    allow_swap: bool,
) -> Result<VertexPermutation> {
    let f = g.field();
    let p = Matrix::random_invertible(f, g.n(), rng);
    let tau = tau_from_table(g, &random_twin_table(g, rng))?;
    let mid = if g.n() == 2 {
        phi_bar(g, &random_phi(f, rng))?
    } else {
        pi_extend(g, random_frobenius(f, rng))?
    };
    let mut rho = chi_p(g, &p)?.compose(&mid).compose(&tau);
    if allow_swap && rng.gen_bool(0.5) {
        let outer = if g.n() == 2 {
            let comps = plane_components(g).len();
            let mut flip: Vec<bool> = (0..comps).map(|_| rng.gen_bool(0.5)).collect();
            let forced = rng.gen_range(0..comps);
            flip[forced] = true;
            component_swap(g, &flip)?
        } else {
            sigma_swap(g)
        };
        rho = outer.compose(&rho);
    }
    Ok(rho)
}
