use lfgraph::autos::{
    chi_p, compose, decompose, is_automorphism, random_generated_automorphism, VertexPermutation,
};
use lfgraph::linalg::{kernel_basis, rank};
use lfgraph::{Field, LfGraph, Matrix, Side, Vector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ORDERS: [usize; 12] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27];

fn field() -> impl Strategy<Value = Field> {
    prop::sample::select(&ORDERS[..]).prop_map(|q| Field::of_order(q).unwrap())
}

fn field_with_elems(count: usize) -> impl Strategy<Value = (Field, Vec<usize>)> {
    field().prop_flat_map(move |f| {
        let q = f.q();
        (Just(f), prop::collection::vec(0..q, count))
    })
}

fn small_graph() -> impl Strategy<Value = LfGraph> {
    prop::sample::select(
        &[
            (2usize, 2usize),
            (3, 2),
            (4, 2),
            (5, 2),
            (2, 3),
            (3, 3),
            (4, 3),
        ][..],
    )
    .prop_map(|(q, n)| LfGraph::for_order(q, n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms((f, e) in field_with_elems(3)) {
        let [a, b, c] = [f.elem(e[0]).unwrap(), f.elem(e[1]).unwrap(), f.elem(e[2]).unwrap()];
        prop_assert_eq!(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
        prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), f.elem(0).unwrap());
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.elem(1).unwrap());
            prop_assert_eq!(f.pow(a, f.q() as u64 - 1), f.elem(1).unwrap());
        } else {
            prop_assert!(f.inv(a).is_err());
        }
    }

    #[test]
    fn frobenius_is_a_field_automorphism((f, e) in field_with_elems(2), j in 0u32..8) {
        let j = j % f.k();
        let [a, b] = [f.elem(e[0]).unwrap(), f.elem(e[1]).unwrap()];
        let fr = |x| f.frobenius(x, j).unwrap();
        prop_assert_eq!(fr(f.add(a, b)), f.add(fr(a), fr(b)));
        prop_assert_eq!(fr(f.mul(a, b)), f.mul(fr(a), fr(b)));
    }

    #[test]
    fn matrix_inverse_and_transpose(f in field(), n in 1usize..5, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Matrix::random_invertible(&f, n, &mut rng);
        let b = Matrix::random_invertible(&f, n, &mut rng);
        let id = Matrix::identity(&f, n);
        prop_assert_eq!(a.mul(&a.inverse().unwrap()).unwrap(), id.clone());
        prop_assert_eq!(a.inverse().unwrap().mul(&a).unwrap(), id);
        prop_assert_eq!(rank(&(0..n).map(|r| a.row(r)).collect::<Vec<_>>()), n);
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.inverse().unwrap(), b.inverse().unwrap().mul(&a.inverse().unwrap()).unwrap());
        prop_assert_eq!(ab.transpose(), b.transpose().mul(&a.transpose()).unwrap());
    }

    #[test]
    fn monic_representative((f, e) in field_with_elems(4), s in 1usize..256) {
        let v = Vector::from_indices(&f, &e[..3]).unwrap();
        prop_assume!(!v.is_zero());
        let rep = v.monic_rep().unwrap();
        prop_assert!(rep.is_monic());
        prop_assert_eq!(rep.monic_rep().unwrap(), rep.clone());
        let scalar = f.elem(1 + s % (f.q() - 1)).unwrap();
        prop_assert_eq!(v.scale(scalar).monic_rep().unwrap(), rep);
    }

    #[test]
    fn kernel_is_orthogonal_hyperplane((f, e) in field_with_elems(3)) {
        let u = Vector::from_indices(&f, &e).unwrap();
        prop_assume!(!u.is_zero());
        let basis = kernel_basis(&u).unwrap();
        prop_assert_eq!(basis.len(), 2);
        prop_assert_eq!(rank(&basis), 2);
        for b in &basis {
            prop_assert!(u.dot(b).unwrap().is_zero());
        }
    }

    #[test]
    fn adjacency_is_annihilation(g in small_graph(), a in 0usize..1000, b in 0usize..1000) {
        let h = g.side_size();
        let (v, u) = (a % h, h + b % h);
        let zero = g.coords(u).dot(&g.coords(v)).unwrap().is_zero();
        prop_assert_eq!(g.adjacent(v, u), zero);
        prop_assert_eq!(g.adjacent(u, v), zero);
        prop_assert!(!g.adjacent(v, (v + 1) % h));
        prop_assert_eq!(g.id_of(g.side(u), &g.coords(u)).unwrap(), u);
        prop_assert_eq!(g.side(v), Side::Vec);
    }

    #[test]
    fn linear_action_is_a_homomorphism(g in small_graph(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Matrix::random_invertible(g.field(), g.n(), &mut rng);
        let b = Matrix::random_invertible(g.field(), g.n(), &mut rng);
        let (ca, cb) = (chi_p(&g, &a).unwrap(), chi_p(&g, &b).unwrap());
        prop_assert!(is_automorphism(&g, &ca));
        prop_assert_eq!(ca.compose(&cb), chi_p(&g, &a.mul(&b).unwrap()).unwrap());
        prop_assert!(chi_p(&g, &a.inverse().unwrap()).unwrap().compose(&ca).is_identity());
    }

    #[test]
    fn automorphisms_form_a_group(g in small_graph(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_generated_automorphism(&g, &mut rng, true).unwrap();
        let y = random_generated_automorphism(&g, &mut rng, true).unwrap();
        prop_assert!(is_automorphism(&g, &x.compose(&y)));
        prop_assert!(is_automorphism(&g, &x.inverse()));
        prop_assert!(x.compose(&x.inverse()).is_identity());
        let e = VertexPermutation::identity(g.vertex_count());
        prop_assert_eq!(x.compose(&e), x.clone());
    }

    #[test]
    fn decomposition_round_trips(g in small_graph(), seed: u64, swap: bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_generated_automorphism(&g, &mut rng, swap).unwrap();
        let d = decompose(&g, &rho).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(compose(&g, &d).unwrap(), rho);
        prop_assert!(d.p.is_invertible());
    }
}
