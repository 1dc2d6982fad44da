//! Property tests for the exponential-sum field algebra and the polar
//! decomposition contract.

use mdirac::field::{FourierField, PointField};
use mdirac::gamma::GammaSet;
use mdirac::linalg::{self, CMat, C64};
use proptest::prelude::*;

fn freq() -> impl Strategy<Value = [f64; 4]> {
    [
        -2.0..2.0f64,
        -2.0..2.0f64,
        -2.0..2.0f64,
        -2.0..2.0f64,
    ]
}

fn point() -> impl Strategy<Value = [f64; 4]> {
    [
        -3.0..3.0f64,
        -3.0..3.0f64,
        -3.0..3.0f64,
        -3.0..3.0f64,
    ]
}

fn coeff(rows: usize, cols: usize) -> impl Strategy<Value = CMat> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), rows * cols).prop_map(move |entries| {
        CMat::from_fn(rows, cols, |r, c| {
            let (re, im) = entries[r * cols + c];
            C64::new(re, im)
        })
    })
}

fn field(rows: usize, cols: usize) -> impl Strategy<Value = FourierField> {
    proptest::collection::vec((freq(), coeff(rows, cols)), 1..4).prop_map(move |terms| {
        FourierField::from_terms(rows, cols, terms).expect("small term count")
    })
}

proptest! {
    // Products obey the Leibniz rule pointwise, and frequencies merge
    // without changing values.
    #[test]
    fn leibniz_rule(f in field(2, 3), g in field(3, 2), x in point(), mu in 0usize..4) {
        let fg = f.multiply(&g).unwrap();
        let lhs = fg.differentiate(mu).value(x);
        let rhs = f.differentiate(mu).multiply(&g).unwrap().value(x)
            + f.multiply(&g.differentiate(mu)).unwrap().value(x);
        let scale = 1.0 + lhs.norm();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
    }

    // Mixed partials commute bit-for-bit.
    #[test]
    fn mixed_partials_commute(f in field(2, 2), mu in 0usize..4, nu in 0usize..4) {
        let a = f.differentiate_multi(&[mu, nu]);
        let b = f.differentiate_multi(&[nu, mu]);
        for (p, c) in a.terms() {
            prop_assert_eq!(c.clone(), b.coeff_at(p));
        }
    }

    // Addition is pointwise addition, whatever merging happened inside.
    #[test]
    fn addition_is_pointwise(f in field(2, 2), g in field(2, 2), x in point()) {
        let sum = f.add(&g).unwrap();
        let direct = f.value(x) + g.value(x);
        prop_assert!((sum.value(x) - direct).norm() <= 1e-13);
    }

    // The Dirac adjoint is an involution: γ⁰(ψ̄(x))† = ψ(x).
    #[test]
    fn dirac_adjoint_involution(psi in field(4, 2), x in point()) {
        let gamma = GammaSet::dirac();
        let bar = psi.dirac_adjoint(&gamma).unwrap();
        let recon = &gamma.gamma[0] * bar.value(x).adjoint();
        prop_assert!((recon - psi.value(x)).norm() <= 1e-12);
    }

    // Polar decomposition: P hermitian PSD, U unitary, PU = M.
    #[test]
    fn polar_contract(m in coeff(4, 4)) {
        let (p, u) = linalg::polar_decompose(&m).unwrap();
        let scale = 1.0 + m.norm();
        prop_assert!(linalg::hermitian_deviation(&p) <= 1e-10 * scale);
        prop_assert!(linalg::unitary_deviation(&u) <= 1e-10);
        prop_assert!((p.clone() * u - &m).norm() <= 1e-10 * scale);
        let min_eig = linalg::hermitian_eigenvalues(&p)[0];
        prop_assert!(min_eig >= -1e-10 * scale);
    }
}
