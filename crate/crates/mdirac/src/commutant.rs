//! The commutant com(N,K) = {X : [X,N] = [X,K] = 0}, its antihermitian part
//! L(l,N,K) = com(N,K) ∩ u(l), membership in the gauge group
//! G(l,N,K) = com(N,K) ∩ U(l), and the orthogonal projector onto L.
//!
//! The projector is orthogonal with respect to ⟨A,B⟩ = Re tr(A†B) on the
//! real vector space u(l). This is the inner product under which matrices
//! anticommuting with a hermitian involution are orthogonal to matrices
//! commuting with it — the mechanism that makes the projected current of a
//! solution conserved.

use crate::error::{Error, Result};
use crate::field::FourierField;
use crate::linalg::{
    commutation_map, commutator, mat_exp, null_space, null_space_real, orthonormalize_re,
    re_inner, unitary_deviation, unvec, CMat, C64, RMat, Tolerances,
};

/// Basis of com(N,K) over the complex scalars.
#[derive(Clone, Debug)]
pub struct ComBasis {
    pub l: usize,
    pub elements: Vec<CMat>,
    pub dim_c: usize,
}

/// Real-orthonormal basis of the antihermitian commutant L(l,N,K).
#[derive(Clone, Debug)]
pub struct LieBasis {
    pub l: usize,
    pub elements: Vec<CMat>,
    pub dim_r: usize,
}

/// Basis of the joint null space of X ↦ ([X,N], [X,K]) via vectorization to
/// an l²-column linear system.
pub fn commutant_basis(n: &CMat, k: &CMat, tol: &Tolerances) -> Result<ComBasis> {
    let l = n.nrows();
    if n.ncols() != l || k.nrows() != l || k.ncols() != l {
        return Err(Error::ShapeMismatch {
            expected: "square matrices of equal size".into(),
            got: format!("{}x{}, {}x{}", n.nrows(), n.ncols(), k.nrows(), k.ncols()),
        });
    }
    let cn = commutation_map(n);
    let ck = commutation_map(k);
    let mut system = CMat::zeros(2 * l * l, l * l);
    system.view_mut((0, 0), (l * l, l * l)).copy_from(&cn);
    system.view_mut((l * l, 0), (l * l, l * l)).copy_from(&ck);
    let basis = null_space(&system, tol);
    let elements: Vec<CMat> = basis.iter().map(|v| unvec(v, l, l)).collect();
    let dim_c = elements.len();
    Ok(ComBasis { l, elements, dim_c })
}

/// Real-linear system for the antihermitian commutant. Unknowns are the
/// real and imaginary parts of X stacked as a 2l² real vector.
fn lie_system(n: &CMat, k: &CMat) -> RMat {
    let l = n.nrows();
    let d = l * l;
    let re_part = |m: &CMat| RMat::from_fn(d, d, |r, c| m[(r % d, c % d)].re);
    let im_part = |m: &CMat| RMat::from_fn(d, d, |r, c| m[(r % d, c % d)].im);

    // Commutation with M = M_r + i·M_i splits into
    //   real: C_{M_r}·vec(A) - C_{M_i}·vec(B) = 0
    //   imag: C_{M_i}·vec(A) + C_{M_r}·vec(B) = 0
    // for X = A + iB.
    let mut rows: Vec<RMat> = Vec::new();
    for m in [n, k] {
        let cm = commutation_map(m);
        let cr = re_part(&cm);
        let ci = im_part(&cm);
        let mut block_re = RMat::zeros(d, 2 * d);
        block_re.view_mut((0, 0), (d, d)).copy_from(&cr);
        block_re.view_mut((0, d), (d, d)).copy_from(&(-&ci));
        rows.push(block_re);
        let mut block_im = RMat::zeros(d, 2 * d);
        block_im.view_mut((0, 0), (d, d)).copy_from(&ci);
        block_im.view_mut((0, d), (d, d)).copy_from(&cr);
        rows.push(block_im);
    }
    // Antihermiticity: Aᵀ = -A and Bᵀ = B, i.e. (T ± 1)·vec = 0 with T the
    // transposition permutation.
    let transpose_perm = RMat::from_fn(d, d, |r, c| {
        let (ri, rj) = (r % l, r / l);
        let (ci, cj) = (c % l, c / l);
        if ri == cj && rj == ci {
            1.0
        } else {
            0.0
        }
    });
    let eye = RMat::identity(d, d);
    let mut skew = RMat::zeros(d, 2 * d);
    skew.view_mut((0, 0), (d, d)).copy_from(&(&transpose_perm + &eye));
    rows.push(skew);
    let mut sym = RMat::zeros(d, 2 * d);
    sym.view_mut((0, d), (d, d)).copy_from(&(&transpose_perm - &eye));
    rows.push(sym);

    let total = rows.iter().map(|r| r.nrows()).sum();
    let mut system = RMat::zeros(total, 2 * d);
    let mut at = 0;
    for r in rows {
        system.view_mut((at, 0), (r.nrows(), 2 * d)).copy_from(&r);
        at += r.nrows();
    }
    system
}

/// Real orthonormal basis of L(l,N,K) = com(N,K) ∩ u(l).
///
/// Never empty: i·1 always commutes with everything, so dim_R ≥ 1.
pub fn lie_algebra_basis(n: &CMat, k: &CMat, tol: &Tolerances) -> Result<LieBasis> {
    let l = n.nrows();
    if n.ncols() != l || k.nrows() != l || k.ncols() != l {
        return Err(Error::ShapeMismatch {
            expected: "square matrices of equal size".into(),
            got: format!("{}x{}, {}x{}", n.nrows(), n.ncols(), k.nrows(), k.ncols()),
        });
    }
    let system = lie_system(n, k);
    let d = l * l;
    let null = null_space_real(&system, tol.rank_cut);
    let mut raw: Vec<CMat> = Vec::with_capacity(null.len());
    for v in &null {
        let mut x = CMat::zeros(l, l);
        for col in 0..l {
            for row in 0..l {
                let idx = col * l + row;
                x[(row, col)] = C64::new(v[idx], v[d + idx]);
            }
        }
        // Enforce exact antihermiticity; the null vector satisfies it only
        // to rounding.
        let x = (&x - x.adjoint()) * C64::new(0.5, 0.0);
        raw.push(x);
    }
    let elements = orthonormalize_re(&raw, 1e-8);
    let dim_r = elements.len();
    Ok(LieBasis { l, elements, dim_r })
}

impl LieBasis {
    /// Orthogonal projection of an antihermitian matrix onto L under
    /// ⟨A,B⟩ = Re tr(A†B).
    pub fn project(&self, m: &CMat, tol: &Tolerances) -> Result<CMat> {
        let dev = crate::linalg::antihermitian_deviation(m);
        if dev > tol.rel * (1.0 + m.norm()) {
            return Err(Error::NotAntihermitian(dev));
        }
        Ok(self.project_unchecked(m))
    }

    /// The same projection as a real-linear map on all of M(l,C); used
    /// term-wise on exponential sums whose pointwise values are
    /// antihermitian even though single terms are not.
    pub fn project_unchecked(&self, m: &CMat) -> CMat {
        let mut out = CMat::zeros(self.l, self.l);
        for b in &self.elements {
            out += b * C64::new(re_inner(b, m), 0.0);
        }
        out
    }

    /// Term-wise projection of an exponential sum.
    ///
    /// π is only real-linear, so it does not commute with complex phases.
    /// Splitting π(M) = P(M) + R(M†) into two complex-linear maps gives the
    /// exact term-wise rule: the projected coefficient at frequency p is
    /// P(C_p) + R(C_{-p}†), and the result stays exactly differentiable.
    pub fn project_field(&self, f: &FourierField) -> FourierField {
        let half = C64::new(0.5, 0.0);
        let p_map = |m: &CMat| {
            let mut out = CMat::zeros(self.l, self.l);
            for b in &self.elements {
                out += b * ((b.adjoint() * m).trace() * half);
            }
            out
        };
        let r_map = |y: &CMat| {
            let mut out = CMat::zeros(self.l, self.l);
            for b in &self.elements {
                out += b * ((y * b).trace() * half);
            }
            out
        };
        let mut out = FourierField::zero(f.rows(), f.cols());
        for (p, c) in f.terms() {
            let opposite = f.coeff_at([-p[0], -p[1], -p[2], -p[3]]);
            let coeff = p_map(c) + r_map(&opposite.adjoint());
            let pw = FourierField::plane_wave(p, coeff);
            out = out.add(&pw).expect("projection does not grow the term count");
        }
        out
    }
}

/// True iff V is unitary and commutes with both N and K, i.e. V ∈ G(l,N,K).
pub fn group_membership(v: &CMat, n: &CMat, k: &CMat, tol: &Tolerances) -> Result<bool> {
    let l = n.nrows();
    if v.nrows() != l || v.ncols() != l {
        return Err(Error::ShapeMismatch {
            expected: format!("{l}x{l}"),
            got: format!("{}x{}", v.nrows(), v.ncols()),
        });
    }
    let unitary = unitary_deviation(v) <= tol.rel * (1.0 + l as f64);
    let commutes = commutator(v, n).norm() <= tol.rel * (1.0 + n.norm()) * v.norm().max(1.0)
        && commutator(v, k).norm() <= tol.rel * (1.0 + k.norm()) * v.norm().max(1.0);
    Ok(unitary && commutes)
}

/// Exponential of a generator in L; lands in the gauge group.
pub fn exp_generator(theta: &CMat, n: &CMat, k: &CMat, tol: &Tolerances) -> Result<CMat> {
    let dev_ah = crate::linalg::antihermitian_deviation(theta);
    if dev_ah > tol.rel * (1.0 + theta.norm()) {
        return Err(Error::NotInLieAlgebra(dev_ah));
    }
    let dev_n = commutator(theta, n).norm();
    let dev_k = commutator(theta, k).norm();
    let bound = tol.rel * (1.0 + n.norm() + k.norm()) * theta.norm().max(1.0);
    if dev_n > bound || dev_k > bound {
        return Err(Error::NotInLieAlgebra(dev_n.max(dev_k)));
    }
    Ok(mat_exp(theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CVec, ONE, ZERO};
    use crate::nk::NkPair;
    use crate::rng::Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    // Independent oracle: assemble the same constraints entry by entry from
    // matrix units instead of Kronecker identities, and count the null space.
    fn brute_force_lie_dim(n: &CMat, k: &CMat) -> usize {
        let l = n.nrows();
        let d = l * l;
        // Real coordinates: A entries (real part) then B entries (imag part),
        // both in row-major order here, unlike the implementation.
        let mut cols: Vec<nalgebra::DVector<f64>> = Vec::new();
        for which in 0..2 {
            for i in 0..l {
                for j in 0..l {
                    let mut x = CMat::zeros(l, l);
                    x[(i, j)] = if which == 0 { ONE } else { C64::new(0.0, 1.0) };
                    // Apply every constraint to the unit direction.
                    let cn = commutator(&x, n);
                    let ck = commutator(&x, k);
                    let ah = &x + x.adjoint();
                    let mut col = Vec::with_capacity(6 * d);
                    for m in [&cn, &ck, &ah] {
                        for v in m.iter() {
                            col.push(v.re);
                            col.push(v.im);
                        }
                    }
                    cols.push(nalgebra::DVector::from_vec(col));
                }
            }
        }
        let rows = cols[0].len();
        let system = RMat::from_fn(rows, 2 * d, |r, c| cols[c][r]);
        null_space_real(&system, 1e-10).len()
    }

    #[test]
    fn commutant_of_zero_pair_is_everything() {
        let z = CMat::zeros(2, 2);
        let basis = commutant_basis(&z, &z, &tol()).unwrap();
        assert_eq!(basis.dim_c, 4);
    }

    // Null-space oracle on the vectorized commutator system.
    #[test]
    fn commutant_of_distinct_diagonal() {
        let n = CMat::from_diagonal(&CVec::from_vec(vec![ONE, C64::new(2.0, 0.0)]));
        let k = CMat::zeros(2, 2);
        let basis = commutant_basis(&n, &k, &tol()).unwrap();
        assert_eq!(basis.dim_c, 2);
        for x in &basis.elements {
            // Commutes with diag(1,2) iff diagonal.
            assert!(x[(0, 1)].norm() < 1e-10);
            assert!(x[(1, 0)].norm() < 1e-10);
            assert!(commutator(x, &n).norm() < 1e-10);
        }
    }

    // Commutant of a nonderogatory matrix is the polynomials in it.
    #[test]
    fn commutant_of_jordan_pair() {
        let pair = NkPair::example2(ZERO, ONE, &CMat::identity(4, 4), &tol()).unwrap();
        let basis = commutant_basis(&pair.n, &pair.k, &tol()).unwrap();
        assert_eq!(basis.dim_c, 4);
        // Every element is upper triangular and constant along diagonals.
        for x in &basis.elements {
            for r in 0..4 {
                for c in 0..r {
                    assert!(x[(r, c)].norm() < 1e-9, "lower entry {r},{c} nonzero");
                }
            }
            for offset in 0..4 {
                let v = x[(0, offset)];
                for r in 0..4 - offset {
                    assert!((x[(r, r + offset)] - v).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn lie_basis_u1() {
        let n = CMat::from_element(1, 1, C64::new(0.3, 0.0));
        let k = CMat::from_element(1, 1, C64::new(0.954, 0.0));
        let basis = lie_algebra_basis(&n, &k, &tol()).unwrap();
        assert_eq!(basis.dim_r, 1);
        // The single element is ±i.
        let v = basis.elements[0][(0, 0)];
        assert!(v.re.abs() < 1e-12);
        assert!((v.im.abs() - 1.0).abs() < 1e-12);
    }

    // Brute-force real null-space oracle fixes the dimension.
    #[test]
    fn lie_basis_distinct_angles_is_diagonal_imaginary() {
        let (xi, eta) = (0.4f64, 1.3f64);
        let n = CMat::from_diagonal(&CVec::from_vec(vec![
            C64::new(xi.cos(), 0.0),
            C64::new(eta.cos(), 0.0),
        ]));
        let k = CMat::from_diagonal(&CVec::from_vec(vec![
            C64::new(xi.sin(), 0.0),
            C64::new(eta.sin(), 0.0),
        ]));
        let basis = lie_algebra_basis(&n, &k, &tol()).unwrap();
        assert_eq!(basis.dim_r, 2);
        assert_eq!(brute_force_lie_dim(&n, &k), 2);
        for x in &basis.elements {
            assert!(x[(0, 1)].norm() < 1e-10);
            assert!(x[(1, 0)].norm() < 1e-10);
            assert!(x[(0, 0)].re.abs() < 1e-10);
            assert!(x[(1, 1)].re.abs() < 1e-10);
        }
    }

    #[test]
    fn lie_basis_jordan_pair_is_scalar() {
        let pair = NkPair::example2(ZERO, ONE, &CMat::identity(4, 4), &tol()).unwrap();
        let basis = lie_algebra_basis(&pair.n, &pair.k, &tol()).unwrap();
        assert_eq!(basis.dim_r, 1);
        assert_eq!(brute_force_lie_dim(&pair.n, &pair.k), 1);
        // Only antihermitian polynomial in the shift is an imaginary
        // multiple of the identity; normalized this is ±i·1/2.
        let x = &basis.elements[0];
        let expect = CMat::identity(4, 4) * C64::new(0.0, 0.5);
        let matches = (x - &expect).norm() < 1e-9 || (x + &expect).norm() < 1e-9;
        assert!(matches, "unexpected basis element {x}");
    }

    // Block-diagonal unitary algebra: dim_R = p² + q² for a two-angle pair.
    #[test]
    fn lie_basis_dimension_two_angle_pair() {
        let mut rng = Rng::new(41);
        let l = 4;
        let (p, q) = (1usize, 3usize);
        let (xi, eta) = (0.9f64, 2.1f64);
        let u = rng.unitary(l);
        let mut dn = Vec::new();
        let mut dk = Vec::new();
        for _ in 0..p {
            dn.push(C64::new(xi.cos(), 0.0));
            dk.push(C64::new(xi.sin(), 0.0));
        }
        for _ in 0..q {
            dn.push(C64::new(eta.cos(), 0.0));
            dk.push(C64::new(eta.sin(), 0.0));
        }
        let n = u.adjoint() * CMat::from_diagonal(&CVec::from_vec(dn)) * &u;
        let k = u.adjoint() * CMat::from_diagonal(&CVec::from_vec(dk)) * &u;
        let basis = lie_algebra_basis(&n, &k, &tol()).unwrap();
        assert_eq!(basis.dim_r, p * p + q * q);
        assert_eq!(brute_force_lie_dim(&n, &k), p * p + q * q);
        // Orthonormal and inside L.
        for (i, a) in basis.elements.iter().enumerate() {
            assert!(commutator(a, &n).norm() < 1e-9);
            assert!(commutator(a, &k).norm() < 1e-9);
            assert!(crate::linalg::antihermitian_deviation(a) < 1e-12);
            for (j, b) in basis.elements.iter().enumerate() {
                let g = re_inner(a, b);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn commutant_of_example1_with_distinct_pairs() {
        let mut rng = Rng::new(42);
        let l = 3;
        let angles = [0.2, 1.1, 2.5];
        let z: Vec<C64> = angles.iter().map(|a: &f64| C64::new(a.cos(), 0.0)).collect();
        let y: Vec<C64> = angles.iter().map(|a: &f64| C64::new(a.sin(), 0.0)).collect();
        let v = rng.unitary(l) + rng.matrix(l, l) * C64::new(0.2, 0.0);
        let pair = NkPair::example1(&z, &y, &v, &tol()).unwrap();
        let basis = commutant_basis(&pair.n, &pair.k, &tol()).unwrap();
        assert_eq!(basis.dim_c, l);
        // Each element is V·diagonal·V⁻¹.
        let v_inv = v.clone().try_inverse().unwrap();
        for x in &basis.elements {
            let d = &v_inv * x * &v;
            for r in 0..l {
                for c in 0..l {
                    if r != c {
                        assert!(d[(r, c)].norm() < 1e-8, "off-diagonal {r},{c}");
                    }
                }
            }
        }
    }

    #[test]
    fn projector_is_identity_on_members() {
        let mut rng = Rng::new(43);
        let pair = NkPair::standard(3, &tol()).unwrap();
        let basis = lie_algebra_basis(&pair.n, &pair.k, &tol()).unwrap();
        // Random element of L = u(3).
        let theta = rng.antihermitian(3);
        let projected = basis.project(&theta, &tol()).unwrap();
        assert!((projected - &theta).norm() < 1e-12 * (1.0 + theta.norm()));
    }

    #[test]
    fn projector_extracts_diagonal_block() {
        // L = imaginary diagonals for a distinct-angle diagonal pair.
        let n = CMat::from_diagonal(&CVec::from_vec(vec![
            C64::new(0.2f64.cos(), 0.0),
            C64::new(1.4f64.cos(), 0.0),
        ]));
        let k = CMat::from_diagonal(&CVec::from_vec(vec![
            C64::new(0.2f64.sin(), 0.0),
            C64::new(1.4f64.sin(), 0.0),
        ]));
        let basis = lie_algebra_basis(&n, &k, &tol()).unwrap();
        let m = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 1.0),
                ONE,
                C64::new(-1.0, 0.0),
                C64::new(0.0, 2.0),
            ],
        );
        let p = basis.project(&m, &tol()).unwrap();
        let expect = CMat::from_diagonal(&CVec::from_vec(vec![C64::new(0.0, 1.0), C64::new(0.0, 2.0)]));
        assert!((p - expect).norm() < 1e-12);
    }

    #[test]
    fn projector_rejects_nonantihermitian() {
        let pair = NkPair::standard(2, &tol()).unwrap();
        let basis = lie_algebra_basis(&pair.n, &pair.k, &tol()).unwrap();
        match basis.project(&CMat::identity(2, 2), &tol()) {
            Err(Error::NotAntihermitian(_)) => {}
            other => panic!("expected NotAntihermitian, got {other:?}"),
        }
    }

    #[test]
    fn group_membership_cases() {
        let mut rng = Rng::new(44);
        let n = CMat::from_diagonal(&CVec::from_vec(vec![ONE, C64::new(2.0, 0.0)]));
        let k = CMat::zeros(2, 2);
        assert!(group_membership(&CMat::identity(2, 2), &n, &k, &tol()).unwrap());
        let phase = CMat::identity(2, 2) * C64::new(0.0, 0.7).exp();
        assert!(group_membership(&phase, &n, &k, &tol()).unwrap());
        let generic = rng.unitary(2);
        assert!(!group_membership(&generic, &n, &k, &tol()).unwrap());
    }

    #[test]
    fn exp_generator_cases() {
        let pair = NkPair::standard(1, &tol()).unwrap();
        let zero = CMat::zeros(1, 1);
        let e = exp_generator(&zero, &pair.n, &pair.k, &tol()).unwrap();
        assert!((e - CMat::identity(1, 1)).norm() < 1e-15);

        let theta = CMat::from_element(1, 1, C64::new(0.0, std::f64::consts::PI));
        let e = exp_generator(&theta, &pair.n, &pair.k, &tol()).unwrap();
        assert!((e[(0, 0)] + ONE).norm() < 1e-12);
    }

    // Series oracle for the exponential, plus group membership of the result.
    #[test]
    fn exp_generator_random_in_group() {
        let mut rng = Rng::new(45);
        let mut dn = Vec::new();
        let mut dk = Vec::new();
        for _ in 0..2 {
            dn.push(C64::new(0.5f64.cos(), 0.0));
            dk.push(C64::new(0.5f64.sin(), 0.0));
        }
        for _ in 0..2 {
            dn.push(C64::new(1.9f64.cos(), 0.0));
            dk.push(C64::new(1.9f64.sin(), 0.0));
        }
        let u = rng.unitary(4);
        let n = u.adjoint() * CMat::from_diagonal(&CVec::from_vec(dn)) * &u;
        let k = u.adjoint() * CMat::from_diagonal(&CVec::from_vec(dk)) * &u;
        let basis = lie_algebra_basis(&n, &k, &tol()).unwrap();
        for _ in 0..5 {
            let mut theta = CMat::zeros(4, 4);
            for b in &basis.elements {
                theta += b * C64::new(rng.normal() * 0.5, 0.0);
            }
            let v = exp_generator(&theta, &n, &k, &tol()).unwrap();
            assert!(group_membership(&v, &n, &k, &tol()).unwrap());
            // Taylor-series oracle.
            let mut series = CMat::identity(4, 4);
            let mut term = CMat::identity(4, 4);
            for order in 1..40 {
                term = &term * &theta * C64::new(1.0 / order as f64, 0.0);
                series += &term;
            }
            assert!((&v - series).norm() < 1e-10);
        }

        let not_in_l = rng.antihermitian(4);
        assert!(matches!(
            exp_generator(&not_in_l, &n, &k, &tol()),
            Err(Error::NotInLieAlgebra(_))
        ));
    }
}
