use pairwalk_core::matrix::{
    assemble, block, hermitian_eig2, max_abs, unitary_exp, CMat2, CMat4, C64,
};
use proptest::prelude::*;

fn complex(bound: f64) -> impl Strategy<Value = C64> {
    (-bound..bound, -bound..bound).prop_map(|(re, im)| C64::new(re, im))
}

fn cmat4() -> impl Strategy<Value = CMat4> {
    prop::collection::vec(complex(10.0), 16).prop_map(|v| CMat4::from_iterator(v))
}

fn hermitian2(bound: f64) -> impl Strategy<Value = CMat2> {
    (-bound..bound, -bound..bound, complex(bound))
        .prop_map(|(a, d, b)| CMat2::new(C64::from(a), b.conj(), b, C64::from(d)))
}

fn hermitian4() -> impl Strategy<Value = CMat4> {
    cmat4().prop_map(|m| (m + m.adjoint()) * C64::from(0.5))
}

/// Partial sums of `Σ (i s h)^k / k!`.
fn taylor_exp(h: &CMat4, s: f64, terms: usize) -> CMat4 {
    let x = h * C64::new(0.0, s);
    let mut term = CMat4::identity();
    let mut sum = CMat4::identity();
    for k in 1..terms {
        term = term * x / C64::from(k as f64);
        sum += term;
    }
    sum
}

proptest! {
    #[test]
    fn assemble_inverts_block(m in cmat4()) {
        let back = assemble(&block(&m, 1), &block(&m, 2), &block(&m, 3), &block(&m, 4));
        prop_assert_eq!(back, m);
    }

    #[test]
    fn eig2_reconstructs(h in hermitian2(10.0)) {
        let spec = hermitian_eig2(&h).unwrap();
        prop_assert!(max_abs(&(spec.reconstruct() - h)) <= 1e-12);
        prop_assert!(spec.d1 >= spec.d2);
        let unitarity = max_abs(&(spec.v.adjoint() * spec.v - CMat2::identity()));
        prop_assert!(unitarity <= 1e-12);
    }

    #[test]
    fn exp_inverse(h in hermitian4(), s in -2.0..2.0f64) {
        let product = unitary_exp(&h, s).unwrap() * unitary_exp(&h, -s).unwrap();
        prop_assert!(max_abs(&(product - CMat4::identity())) <= 1e-12);
    }

    #[test]
    fn exp_group(h in hermitian4(), a in -1.0..1.0f64, b in -1.0..1.0f64) {
        let lhs = unitary_exp(&h, a).unwrap() * unitary_exp(&h, b).unwrap();
        prop_assert!(max_abs(&(lhs - unitary_exp(&h, a + b).unwrap())) <= 1e-10);
    }

    #[test]
    fn exp_matches_taylor(m in cmat4()) {
        // Scaled to keep the series well conditioned.
        let h = (m + m.adjoint()) * C64::from(0.05);
        let exact = unitary_exp(&h, 0.37).unwrap();
        prop_assert!(max_abs(&(exact - taylor_exp(&h, 0.37, 20))) <= 1e-10);
    }
}
