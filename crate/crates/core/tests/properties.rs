use std::f64::consts::PI;

use hamlearn_core::distances::{self, half_diamond_unitary, minmax_closed};
use hamlearn_core::linalg::{self, CMatrix, PauliSpectrum};
use hamlearn_core::{PauliString, Phase, SparseHamiltonian};
use num_complex::Complex64;
use proptest::prelude::*;

fn pauli(n: usize) -> impl Strategy<Value = PauliString> {
    proptest::collection::vec(prop::sample::select(vec!['I', 'X', 'Y', 'Z']), n)
        .prop_map(|letters| letters.into_iter().collect::<String>().parse().unwrap())
}

fn paulis_and_n(max_n: usize, count: usize) -> impl Strategy<Value = (usize, Vec<PauliString>)> {
    (1..=max_n).prop_flat_map(move |n| (Just(n), proptest::collection::vec(pauli(n), count)))
}

fn hamiltonian(n: usize, max_terms: usize) -> impl Strategy<Value = SparseHamiltonian> {
    proptest::collection::vec((pauli(n), -1.0f64..1.0), 1..=max_terms).prop_map(move |terms| {
        let mut h = SparseHamiltonian::zero(n);
        for (p, c) in terms {
            if !p.is_identity() {
                h.add_term(p, c).unwrap();
            }
        }
        h
    })
}

fn small_hamiltonian() -> impl Strategy<Value = SparseHamiltonian> {
    (1usize..=3).prop_flat_map(|n| hamiltonian(n, 6))
}

fn small_pair() -> impl Strategy<Value = (SparseHamiltonian, SparseHamiltonian)> {
    (1usize..=3).prop_flat_map(|n| (hamiltonian(n, 6), hamiltonian(n, 6)))
}

fn phase_product(a: Phase, b: Phase) -> Phase {
    Phase::from_power(a.power() as i64 + b.power() as i64)
}

proptest! {
    #[test]
    fn symplectic_product_is_symmetric_and_matches_reordering((_, ps) in paulis_and_n(70, 2)) {
        let (p, q) = (&ps[0], &ps[1]);
        let s = p.symplectic_product(q).unwrap();
        prop_assert_eq!(s, q.symplectic_product(p).unwrap());
        let (pq, a) = p.multiply(q).unwrap();
        let (qp, b) = q.multiply(p).unwrap();
        prop_assert_eq!(&pq, &qp);
        // PQ = (-1)^s QP.
        prop_assert_eq!(a, phase_product(b, Phase::from_power(2 * s as i64)));
    }

    #[test]
    fn multiplication_is_associative_with_phases((_, ps) in paulis_and_n(70, 3)) {
        let (p, q, r) = (&ps[0], &ps[1], &ps[2]);
        let (pq, a) = p.multiply(q).unwrap();
        let (left, b) = pq.multiply(r).unwrap();
        let (qr, c) = q.multiply(r).unwrap();
        let (right, d) = p.multiply(&qr).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(phase_product(a, b), phase_product(c, d));
    }

    #[test]
    fn squares_are_identity((_, ps) in paulis_and_n(70, 1)) {
        let (sq, phase) = ps[0].multiply(&ps[0]).unwrap();
        prop_assert!(sq.is_identity());
        prop_assert_eq!(phase, Phase::ONE);
    }

    #[test]
    fn dense_paulis_are_hermitian_involutions((_, ps) in paulis_and_n(4, 1)) {
        let m = ps[0].dense().unwrap();
        let d = m.nrows();
        prop_assert_eq!(&m.adjoint(), &m);
        prop_assert_eq!(&m * &m, CMatrix::identity(d, d));
    }

    #[test]
    fn restriction_is_order_independent_and_idempotent(
        (h, qs) in (1usize..=4).prop_flat_map(|n| (hamiltonian(n, 8), proptest::collection::vec(pauli(n), 0..4)))
    ) {
        let once = h.restrict(&qs).unwrap();
        let reversed: Vec<_> = qs.iter().rev().cloned().collect();
        prop_assert_eq!(&once, &h.restrict(&reversed).unwrap());
        prop_assert_eq!(&once, &once.restrict(&qs).unwrap());
        prop_assert!(once.support().all(|p| h.contains(p) && qs.iter().all(|q| p.commutes_with(q))));
    }

    #[test]
    fn norm_sandwich_and_parseval(h in small_hamiltonian()) {
        let n = h.norms().unwrap();
        prop_assert!(n.linf <= n.op + 1e-12);
        prop_assert!(n.op <= n.l1 + 1e-12);
        prop_assert!(n.l2 <= n.l1 + 1e-12);
        // ‖H‖_F² / 2^n = Σ h_P².
        let m = h.dense_matrix().unwrap();
        let d = m.nrows() as f64;
        prop_assert!((m.norm_squared() / d - n.l2 * n.l2).abs() < 1e-12);
    }

    #[test]
    fn unitary_spectra_sum_to_one(h in small_hamiltonian(), t in 0.0f64..5.0) {
        let u = h.eigen().unwrap().evolution(t);
        let total: f64 = PauliSpectrum::of(&u).probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn half_diamond_properties((h, g) in small_pair(), phase in -PI..PI) {
        let u = h.eigen().unwrap().evolution(1.0);
        let v = g.eigen().unwrap().evolution(1.0);
        let d = half_diamond_unitary(&u, &v).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!((d - half_diamond_unitary(&v, &u).unwrap()).abs() < 1e-9);
        prop_assert!(half_diamond_unitary(&u, &u).unwrap() < 1e-7);
        let shifted = &v * Complex64::from_polar(1.0, phase);
        prop_assert!((d - half_diamond_unitary(&u, &shifted).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn time_constrained_distance_grows_with_horizon((h, g) in small_pair(), t in 0.05f64..3.0) {
        let short = distances::d_t(&h, &g, t, 128).unwrap();
        let long = distances::d_t(&h, &g, 2.0 * t, 128).unwrap();
        prop_assert!(long.value + 1e-12 >= short.value);
        prop_assert!(short.value <= 1.0);
    }

    #[test]
    fn minmax_is_symmetric_and_bounded(a in -20.0f64..20.0, b in -20.0f64..20.0, k in -3i32..3) {
        let m = minmax_closed(a, b);
        prop_assert!((m - minmax_closed(b, a)).abs() < 1e-12);
        prop_assert!((0.0..=PI / 2.0 + 1e-12).contains(&m));
        prop_assert!(minmax_closed(a, a + 2.0 * PI * k as f64) < 1e-9);
    }

    #[test]
    fn conjugation_matches_dense((h, q) in (1usize..=3).prop_flat_map(|n| (hamiltonian(n, 6), pauli(n)))) {
        let a = h.dense_matrix().unwrap();
        let p = q.dense().unwrap();
        let fast = linalg::conjugate_by_pauli(&a, &q);
        prop_assert!((fast - &p * &a * &p).norm() < 1e-12);
    }
}
