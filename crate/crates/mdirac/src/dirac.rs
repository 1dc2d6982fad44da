//! The matrix Dirac equation iγ^μ∂_μψ = m(ψN + γ⁵ψK) for a 4×l wave
//! function, its Klein-Gordon consistency, the factorization identities that
//! motivate it, plane-wave solutions, lagrangian densities, bilinear
//! currents, and the conservation identities the currents satisfy.

use crate::commutant::LieBasis;
use crate::error::{Error, Result};
use crate::field::{FourierField, PointField};
use crate::gamma::GammaSet;
use crate::linalg::{CMat, C64, I, ONE, Tolerances};
use crate::nk::NkPair;
use crate::rng::Rng;

/// Minkowski square p·p = p₀² - p₁² - p₂² - p₃² of covariant components.
pub fn minkowski_square(p: [f64; 4]) -> f64 {
    p[0] * p[0] - p[1] * p[1] - p[2] * p[2] - p[3] * p[3]
}

/// Covariant momentum on the mass shell: p₀ = ±√(m² + |p⃗|²).
pub fn on_shell_momentum(m: f64, spatial: [f64; 3], positive_energy: bool) -> [f64; 4] {
    let e = (m * m + spatial[0] * spatial[0] + spatial[1] * spatial[1] + spatial[2] * spatial[2])
        .sqrt();
    let p0 = if positive_energy { e } else { -e };
    [p0, spatial[0], spatial[1], spatial[2]]
}

/// Basis of amplitudes Ψ₀ with (γ^μ p_μ)Ψ₀ = m(Ψ₀N + γ⁵Ψ₀K); the momentum
/// and mass they share; and the pair they solve for.
#[derive(Clone, Debug)]
pub struct PlaneWaveSolution {
    pub p: [f64; 4],
    pub basis: Vec<CMat>,
    pub nk: NkPair,
    pub m: f64,
}

impl PlaneWaveSolution {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// |p·p - m²|.
    pub fn on_shell_residual(&self) -> f64 {
        (minkowski_square(self.p) - self.m * self.m).abs()
    }

    /// Single-momentum solution field Σ c_i Ψ_i · exp(-i p·x).
    pub fn field(&self, coeffs: &[C64]) -> Result<FourierField> {
        if coeffs.len() != self.basis.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} coefficients", self.basis.len()),
                got: format!("{}", coeffs.len()),
            });
        }
        let mut amp = CMat::zeros(4, self.nk.l);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            amp += b * *c;
        }
        Ok(FourierField::plane_wave(self.p, amp))
    }

    /// Random unit-coefficient combination of the amplitude basis.
    pub fn random_field(&self, rng: &mut Rng) -> Result<FourierField> {
        let coeffs: Vec<C64> = (0..self.basis.len())
            .map(|_| rng.complex_normal())
            .collect();
        self.field(&coeffs)
    }
}

/// Solve the amplitude equation (γ^μ p_μ)Ψ₀ = m(Ψ₀N + γ⁵Ψ₀K) by
/// vectorizing with vec(AXB) = (Bᵀ⊗A)vec(X) and extracting the null space
/// of the resulting 4l×4l system.
///
/// An empty basis is a valid outcome; with the consistency condition in
/// force and m > 0 it is the expected outcome off the mass shell.
pub fn build_plane_wave(
    p: [f64; 4],
    nk: &NkPair,
    m: f64,
    tol: &Tolerances,
    gamma: &GammaSet,
) -> PlaneWaveSolution {
    let l = nk.l;
    let eye_l = CMat::identity(l, l);
    let eye_4 = CMat::identity(4, 4);
    let slash = gamma.slash(p);
    let mc = C64::new(m, 0.0);
    let system = eye_l.kronecker(&slash)
        - nk.n.transpose().kronecker(&eye_4) * mc
        - nk.k.transpose().kronecker(&gamma.gamma5) * mc;
    let null = crate::linalg::null_space(&system, tol);
    let basis = null
        .iter()
        .map(|v| crate::linalg::unvec(v, 4, l))
        .collect();
    PlaneWaveSolution {
        p,
        basis,
        nk: nk.clone(),
        m,
    }
}

/// (□ + m²)ψ, exact on exponential sums.
pub fn kg_residual(psi: &FourierField, m: f64) -> FourierField {
    psi.dalembertian()
        .add(&psi.scale(C64::new(m * m, 0.0)))
        .expect("same frequency support")
}

/// (□ + m²)ψ evaluated at a point for any field with second derivatives.
pub fn kg_residual_at(psi: &dyn PointField, m: f64, x: [f64; 4]) -> CMat {
    let mut out = psi.value(x) * C64::new(m * m, 0.0);
    for mu in 0..4 {
        let sign = if mu == 0 { 1.0 } else { -1.0 };
        out += psi.second_derivative(mu, mu, x) * C64::new(sign, 0.0);
    }
    out
}

/// iγ^μ∂_μψ - m(ψN + γ⁵ψK), exact term by term.
pub fn dirac_residual(psi: &FourierField, nk: &NkPair, m: f64, gamma: &GammaSet) -> Result<FourierField> {
    if psi.rows() != 4 || psi.cols() != nk.l {
        return Err(Error::ShapeMismatch {
            expected: format!("4x{} field", nk.l),
            got: format!("{}x{}", psi.rows(), psi.cols()),
        });
    }
    let mut out = FourierField::zero(4, nk.l);
    for (p, c) in psi.terms() {
        let term = gamma.slash(p) * c
            - (c * &nk.n + &gamma.gamma5 * c * &nk.k) * C64::new(m, 0.0);
        out = out.add(&FourierField::plane_wave(p, term))?;
    }
    Ok(out)
}

/// iγ^μ(∂_μψ - ψa_μ) - m(ψN + γ⁵ψK) at a point, for pointwise fields and
/// gauge potential values a_μ(x).
pub fn covariant_dirac_residual_at(
    psi: &dyn PointField,
    a_values: &[CMat; 4],
    nk: &NkPair,
    m: f64,
    gamma: &GammaSet,
    x: [f64; 4],
) -> Result<CMat> {
    let v = psi.value(x);
    if v.nrows() != 4 || v.ncols() != nk.l {
        return Err(Error::ShapeMismatch {
            expected: format!("4x{} field", nk.l),
            got: format!("{}x{}", v.nrows(), v.ncols()),
        });
    }
    let mut out = -(&v * &nk.n + &gamma.gamma5 * &v * &nk.k) * C64::new(m, 0.0);
    for mu in 0..4 {
        let d = psi.derivative(mu, x) - &v * &a_values[mu];
        out += &gamma.gamma[mu] * d * I;
    }
    Ok(out)
}

/// Apply both factorization factors and add back (□ + m²):
/// (iγ^μ∂_μ + m(z1 - yγ⁵)) (iγ^ν∂_ν - m(z1 + yγ⁵)) ψ + (□ + m²)ψ.
/// Vanishes identically when z² + y² = 1.
pub fn factorization_residual(
    z: C64,
    y: C64,
    psi: &FourierField,
    m: f64,
    gamma: &GammaSet,
) -> Result<FourierField> {
    let res = (z * z + y * y - ONE).norm();
    if res > 1e-10 {
        return Err(Error::ConstraintViolation(format!(
            "z^2 + y^2 = 1 violated by {res:.3e}"
        )));
    }
    if psi.rows() != 4 {
        return Err(Error::ShapeMismatch {
            expected: "4xL field".into(),
            got: format!("{}x{}", psi.rows(), psi.cols()),
        });
    }
    let mc = C64::new(m, 0.0);
    let apply = |f: &FourierField, sign_z: f64, sign_y: f64| -> FourierField {
        let mut out = FourierField::zero(4, f.cols());
        for (p, c) in f.terms() {
            let term = gamma.slash(p) * c
                + (c * (z * C64::new(sign_z, 0.0)) + &gamma.gamma5 * c * (y * C64::new(sign_y, 0.0)))
                    * mc;
            out = out
                .add(&FourierField::plane_wave(p, term))
                .expect("same frequency support");
        }
        out
    };
    // Inner factor iγ∂ - m(z + yγ⁵), then outer factor iγ∂ + m(z - yγ⁵).
    let inner = apply(psi, -1.0, -1.0);
    let outer = apply(&inner, 1.0, -1.0);
    outer.add(&kg_residual(psi, m))
}

/// The four raw bilinears iψ̄γ^νψ as exact exponential sums. Each value is
/// antihermitian, so the components live in u(l) pointwise.
pub fn bilinear_current_raw(psi: &FourierField, gamma: &GammaSet) -> Result<[FourierField; 4]> {
    let bar = psi.dirac_adjoint(gamma)?;
    let mut out = Vec::with_capacity(4);
    for nu in 0..4 {
        let g_psi = psi.left_mul(&gamma.gamma[nu])?;
        out.push(bar.multiply(&g_psi)?.scale(I));
    }
    Ok(out.try_into().expect("four components"))
}

/// The projected current J^ν = π(iψ̄γ^νψ), with values in L(l,N,K).
#[derive(Clone, Debug)]
pub struct CurrentField {
    pub comps: [FourierField; 4],
}

/// Apply the projector onto L term-wise to each raw bilinear so the result
/// remains exactly differentiable.
pub fn current_j(psi: &FourierField, basis: &LieBasis, gamma: &GammaSet) -> Result<CurrentField> {
    let raw = bilinear_current_raw(psi, gamma)?;
    let comps = [
        basis.project_field(&raw[0]),
        basis.project_field(&raw[1]),
        basis.project_field(&raw[2]),
        basis.project_field(&raw[3]),
    ];
    Ok(CurrentField { comps })
}

/// Σ_ν ∂_ν J^ν with exact derivatives.
pub fn divergence(j: &CurrentField) -> FourierField {
    let mut out = FourierField::zero(j.comps[0].rows(), j.comps[0].cols());
    for nu in 0..4 {
        out = out
            .add(&j.comps[nu].differentiate(nu))
            .expect("components share frequency support");
    }
    out
}

/// Residual of the current identity satisfied by every solution, hermitian
/// pair or not:
/// ∂_μ(iψ̄γ^μψ) - m(ψ̄ψN - N†ψ̄ψ + ψ̄γ⁵ψK - K†ψ̄γ⁵ψ).
///
/// Errors with [`Error::NotASolution`] when ψ does not satisfy the matrix
/// Dirac equation within tolerance.
pub fn current_identity_residual(
    psi: &FourierField,
    nk: &NkPair,
    m: f64,
    gamma: &GammaSet,
    tol: &Tolerances,
) -> Result<FourierField> {
    let dres = dirac_residual(psi, nk, m, gamma)?.coeff_norm();
    let scale = psi.coeff_norm().max(1.0);
    if dres > tol.rel * scale {
        return Err(Error::NotASolution(dres));
    }
    let bar = psi.dirac_adjoint(gamma)?;
    let h = bar.multiply(psi)?;
    let g5 = bar.multiply(&psi.left_mul(&gamma.gamma5)?)?;
    let n_dag = nk.n.adjoint();
    let k_dag = nk.k.adjoint();
    let mut div = FourierField::zero(nk.l, nk.l);
    let raw = bilinear_current_raw(psi, gamma)?;
    for mu in 0..4 {
        div = div.add(&raw[mu].differentiate(mu))?;
    }
    let mass_term = h
        .right_mul(&nk.n)?
        .sub(&h.left_mul(&n_dag)?)?
        .add(&g5.right_mul(&nk.k)?)?
        .sub(&g5.left_mul(&k_dag)?)?
        .scale(C64::new(m, 0.0));
    div.sub(&mass_term)
}

/// Matter lagrangian density at a point for a hermitian pair:
/// (1/2) tr[ i(ψ̄γ^μ∂_μψ - ∂_μψ̄·γ^μψ) - m(ψ̄ψN + Nψ̄ψ + ψ̄γ⁵ψK + Kψ̄γ⁵ψ) ].
/// Returns the full complex trace; the imaginary part vanishes to rounding.
pub fn lagrangian_density_value(
    psi: &dyn PointField,
    nk: &NkPair,
    m: f64,
    gamma: &GammaSet,
    x: [f64; 4],
) -> C64 {
    let v = psi.value(x);
    let bar = v.adjoint() * &gamma.gamma[0];
    let mut acc = C64::new(0.0, 0.0);
    for mu in 0..4 {
        let d = psi.derivative(mu, x);
        let dbar = d.adjoint() * &gamma.gamma[0];
        let kinetic = &bar * &gamma.gamma[mu] * &d - dbar * &gamma.gamma[mu] * &v;
        acc += kinetic.trace() * I;
    }
    let h = &bar * &v;
    let g5 = &bar * &gamma.gamma5 * &v;
    let mass = &h * &nk.n + &nk.n * &h + &g5 * &nk.k + &nk.k * &g5;
    acc -= mass.trace() * C64::new(m, 0.0);
    acc * C64::new(0.5, 0.0)
}

/// Real matter lagrangian density; requires a hermitian pair.
pub fn lagrangian_density(
    psi: &dyn PointField,
    nk: &NkPair,
    m: f64,
    gamma: &GammaSet,
    x: [f64; 4],
    tol: &Tolerances,
) -> Result<f64> {
    let dev = crate::linalg::hermitian_deviation(&nk.n).max(crate::linalg::hermitian_deviation(&nk.k));
    if dev > tol.rel * (1.0 + nk.n.norm() + nk.k.norm()) {
        return Err(Error::NonHermitianPair(dev));
    }
    Ok(lagrangian_density_value(psi, nk, m, gamma, x).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commutant::lie_algebra_basis;
    use crate::linalg::{hermitian_deviation, CVec, ZERO};
    use crate::nk::{CanonicalForm, CanonicalPair};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn points(rng: &mut Rng, n: usize) -> Vec<[f64; 4]> {
        (0..n)
            .map(|_| {
                [
                    rng.range(-2.0, 2.0),
                    rng.range(-2.0, 2.0),
                    rng.range(-2.0, 2.0),
                    rng.range(-2.0, 2.0),
                ]
            })
            .collect()
    }

    fn sup_norm(f: &FourierField, pts: &[[f64; 4]]) -> f64 {
        pts.iter().map(|&x| f.value(x).norm()).fold(0.0, f64::max)
    }

    fn canonical_pair(rng: &mut Rng, l: usize) -> NkPair {
        let p = 1 + rng.below(l);
        let q = l - p;
        let xi = rng.range(0.0, std::f64::consts::TAU);
        let eta = rng.range(0.0, std::f64::consts::TAU);
        let u = rng.unitary(l);
        NkPair::canonical(
            &CanonicalPair {
                form: CanonicalForm::Angles { p, q, xi, eta },
                u,
            },
            &tol(),
        )
        .unwrap()
    }

    #[test]
    fn kg_residual_on_shell_is_zero() {
        let m = 0.9;
        let p = on_shell_momentum(m, [0.3, -0.7, 0.2], true);
        let psi = FourierField::plane_wave(p, CMat::identity(4, 4));
        assert_eq!(kg_residual(&psi, m).num_terms(), 0);
        // Rest frame too.
        let rest = FourierField::plane_wave([m, 0.0, 0.0, 0.0], CMat::identity(4, 4));
        assert_eq!(kg_residual(&rest, m).num_terms(), 0);
    }

    #[test]
    fn kg_residual_generic_momentum() {
        let m = 1.1;
        let p = [0.4, 0.2, -0.6, 0.9];
        let c = CMat::identity(4, 2);
        let psi = FourierField::plane_wave(p, c.clone());
        let r = kg_residual(&psi, m);
        let expect = c * C64::new(m * m - minkowski_square(p), 0.0);
        assert!((r.coeff_at(p) - expect).norm() < 1e-14);
    }

    #[test]
    fn pointwise_kg_matches_exact_path() {
        let mut rng = Rng::new(50);
        let m = 1.4;
        let mut psi = FourierField::zero(4, 2);
        for _ in 0..3 {
            let p = [
                rng.range(-1.0, 1.0),
                rng.range(-1.0, 1.0),
                rng.range(-1.0, 1.0),
                rng.range(-1.0, 1.0),
            ];
            psi = psi.add(&FourierField::plane_wave(p, rng.matrix(4, 2))).unwrap();
        }
        let exact = kg_residual(&psi, m);
        for x in points(&mut rng, 5) {
            let pointwise = kg_residual_at(&psi, m, x);
            assert!((pointwise - exact.value(x)).norm() < 1e-12 * (1.0 + psi.coeff_norm()));
        }
    }

    #[test]
    fn dirac_residual_zero_field() {
        let gamma = GammaSet::dirac();
        let nk = NkPair::standard(2, &tol()).unwrap();
        let r = dirac_residual(&FourierField::zero(4, 2), &nk, 1.0, &gamma).unwrap();
        assert_eq!(r.num_terms(), 0);
    }

    #[test]
    fn rest_frame_standard_spinor_is_exact() {
        let gamma = GammaSet::dirac();
        let nk = NkPair::standard(1, &tol()).unwrap();
        let m = 1.7;
        let mut e1 = CMat::zeros(4, 1);
        e1[(0, 0)] = ONE;
        let psi = FourierField::plane_wave([m, 0.0, 0.0, 0.0], e1);
        let r = dirac_residual(&psi, &nk, m, &gamma).unwrap();
        assert_eq!(r.num_terms(), 0);
    }

    #[test]
    fn rest_frame_standard_dimension_is_two() {
        let gamma = GammaSet::dirac();
        let nk = NkPair::standard(1, &tol()).unwrap();
        let m = 1.0;
        let sol = build_plane_wave([m, 0.0, 0.0, 0.0], &nk, m, &tol(), &gamma);
        assert_eq!(sol.dimension(), 2);
    }

    // Singular-value oracle: on-shell solution space for the diagonalizable
    // family has dimension 2l; off-shell it is empty.
    #[test]
    fn plane_wave_dimensions() {
        let gamma = GammaSet::dirac();
        let mut rng = Rng::new(51);
        let m = 1.3;
        let angles = [0.3, 2.0];
        let z: Vec<C64> = angles.iter().map(|a: &f64| C64::new(a.cos(), 0.0)).collect();
        let y: Vec<C64> = angles.iter().map(|a: &f64| C64::new(a.sin(), 0.0)).collect();
        let v = rng.unitary(2);
        let nk = NkPair::example1(&z, &y, &v, &tol()).unwrap();

        let p = on_shell_momentum(m, [0.5, -0.2, 0.8], true);
        let sol = build_plane_wave(p, &nk, m, &tol(), &gamma);
        assert_eq!(sol.dimension(), 4);

        let mut off = p;
        off[0] += 0.7;
        let none = build_plane_wave(off, &nk, m, &tol(), &gamma);
        assert_eq!(none.dimension(), 0);
    }

    #[test]
    fn plane_wave_solves_dirac_and_kg() {
        let gamma = GammaSet::dirac();
        let mut rng = Rng::new(52);
        let m = 0.8;
        let nk = canonical_pair(&mut rng, 4);
        let p = on_shell_momentum(m, [0.1, 0.9, -0.4], false);
        let sol = build_plane_wave(p, &nk, m, &tol(), &gamma);
        assert!(sol.dimension() > 0);
        let psi = sol.random_field(&mut rng).unwrap();
        let pts = points(&mut rng, 10);
        let scale = psi.coeff_norm().max(1.0);
        let dres = dirac_residual(&psi, &nk, m, &gamma).unwrap();
        assert!(sup_norm(&dres, &pts) <= 1e-10 * scale);
        let kres = kg_residual(&psi, m);
        assert!(sup_norm(&kres, &pts) <= 1e-9 * scale);
    }

    // Superposition of solutions with the same pair and mass is a solution.
    #[test]
    fn superposition_is_still_a_solution() {
        let gamma = GammaSet::dirac();
        let mut rng = Rng::new(53);
        let m = 1.0;
        let nk = canonical_pair(&mut rng, 2);
        let p1 = on_shell_momentum(m, [0.4, 0.0, -0.3], true);
        let p2 = on_shell_momentum(m, [-0.8, 0.5, 0.1], true);
        let s1 = build_plane_wave(p1, &nk, m, &tol(), &gamma);
        let s2 = build_plane_wave(p2, &nk, m, &tol(), &gamma);
        let psi = s1
            .random_field(&mut rng)
            .unwrap()
            .add(&s2.random_field(&mut rng).unwrap())
            .unwrap();
        let r = dirac_residual(&psi, &nk, m, &gamma).unwrap();
        let pts = points(&mut rng, 10);
        assert!(sup_norm(&r, &pts) <= 1e-10 * psi.coeff_norm().max(1.0));
    }

    // Column reduction: each column of a solution for the diagonalizable
    // family solves the single-column equation with its own (z_k, y_k).
    #[test]
    fn column_reduction_to_scalar_pairs() {
        let gamma = GammaSet::dirac();
        let mut rng = Rng::new(54);
        let m = 1.2;
        let angles = [1.0, 2.4];
        let z: Vec<C64> = angles.iter().map(|a: &f64| C64::new(a.cos(), 0.0)).collect();
        let y: Vec<C64> = angles.iter().map(|a: &f64| C64::new(a.sin(), 0.0)).collect();
        let v = rng.unitary(2) + rng.matrix(2, 2) * C64::new(0.1, 0.0);
        let nk = NkPair::example1(&z, &y, &v, &tol()).unwrap();
        let p = on_shell_momentum(m, [0.2, 0.7, 0.0], true);
        let sol = build_plane_wave(p, &nk, m, &tol(), &gamma);
        let psi = sol.random_field(&mut rng).unwrap();
        let amp = psi.coeff_at(p);
        let cols = crate::nk::column_split(&amp, &v).unwrap();
        let pts = points(&mut rng, 5);
        for (k, col) in cols.iter().enumerate() {
            let scalar = NkPair::scalar(z[k], y[k], &tol()).unwrap();
            let col_field =
                FourierField::plane_wave(p, CMat::from_column_slice(4, 1, col.as_slice()));
            let r = dirac_residual(&col_field, &scalar, m, &gamma).unwrap();
            assert!(sup_norm(&r, &pts) <= 1e-10 * col_field.coeff_norm().max(1.0));
        }
        // l = 1 sanity: with a single column the split is the field itself.
        let first = CMat::from_column_slice(4, 1, amp.column(0).into_owned().as_slice());
        let one = crate::nk::column_split(&first, &CMat::identity(1, 1)).unwrap();
        assert!((&one[0] - amp.column(0).into_owned()).norm() == 0.0);
    }

    #[test]
    fn factorization_identities() {
        let gamma = GammaSet::dirac();
        let mut rng = Rng::new(55);
        let m = 1.4;
        let mut psi = FourierField::zero(4, 1);
        for _ in 0..3 {
            let p = [
                rng.range(-1.0, 1.0),
                rng.range(-1.0, 1.0),
                rng.range(-1.0, 1.0),
                rng.range(-1.0, 1.0),
            ];
            psi = psi.add(&FourierField::plane_wave(p, rng.matrix(4, 1))).unwrap();
        }
        let pts = points(&mut rng, 10);
        let scale = psi.coeff_norm().max(1.0);
        for (z, y) in [
            (ONE, ZERO),
            (ZERO, ONE),
            (C64::new(0.6, 0.0), C64::new(0.8, 0.0)),
        ] {
            let r = factorization_residual(z, y, &psi, m, &gamma).unwrap();
            assert!(
                sup_norm(&r, &pts) <= 1e-10 * scale,
                "factorization failed for z={z}, y={y}"
            );
        }
        assert!(matches!(
            factorization_residual(ONE, ONE, &psi, m, &gamma),
            Err(Error::ConstraintViolation(_))
        ));
    }

    #[test]
    fn bilinear_raw_examples() {
        let gamma = GammaSet::dirac();
        let mut rng = Rng::new(56);

        let zero = FourierField::zero(4, 2);
        let raw = bilinear_current_raw(&zero, &gamma).unwrap();
        for c in &raw {
            assert_eq!(c.num_terms(), 0);
        }

        // Constant real column e₁ at l = 1: iψ̄γ⁰ψ = i.
        let mut e1 = CMat::zeros(4, 1);
        e1[(0, 0)] = ONE;
        let psi = FourierField::constant(e1);
        let raw = bilinear_current_raw(&psi, &gamma).unwrap();
        let v = raw[0].value([0.0; 4]);
        assert!((v[(0, 0)] - I).norm() < 1e-15);

        // Hermiticity of ψ̄γ^νψ pointwise (so i× it is antihermitian).
        let psi = {
            let mut f = FourierField::zero(4, 3);
            for _ in 0..3 {
                let p = [
                    rng.range(-1.0, 1.0),
                    rng.range(-1.0, 1.0),
                    rng.range(-1.0, 1.0),
                    rng.range(-1.0, 1.0),
                ];
                f = f.add(&FourierField::plane_wave(p, rng.matrix(4, 3))).unwrap();
            }
            f
        };
        let raw = bilinear_current_raw(&psi, &gamma).unwrap();
        for x in points(&mut rng, 10) {
            for nu in 0..4 {
                let v = raw[nu].value(x) * (-I);
                assert!(hermitian_deviation(&v) <= 1e-12 * (1.0 + v.norm()));
            }
        }
    }

    #[test]
    fn current_projection_special_cases() {
        let gamma = GammaSet::dirac();
        let mut rng = Rng::new(57);

        // Scalar pair: L = u(l), projection is the identity.
        let nk = NkPair::standard(2, &tol()).unwrap();
        let basis = lie_algebra_basis(&nk.n, &nk.k, &tol()).unwrap();
        assert_eq!(basis.dim_r, 4);
        let m = 1.0;
        let p = on_shell_momentum(m, [0.3, 0.1, -0.2], true);
        let sol = build_plane_wave(p, &nk, m, &tol(), &gamma);
        let psi = sol.random_field(&mut rng).unwrap();
        let raw = bilinear_current_raw(&psi, &gamma).unwrap();
        let j = current_j(&psi, &basis, &gamma).unwrap();
        for x in points(&mut rng, 5) {
            for nu in 0..4 {
                let d = (j.comps[nu].value(x) - raw[nu].value(x)).norm();
                assert!(d <= 1e-10 * (1.0 + raw[nu].value(x).norm()));
            }
        }

        // Distinct-angle diagonal pair: projection keeps the diagonal part.
        let angles = [0.2f64, 1.5];
        let n = CMat::from_diagonal(&CVec::from_vec(
            angles.iter().map(|a| C64::new(a.cos(), 0.0)).collect(),
        ));
        let k = CMat::from_diagonal(&CVec::from_vec(
            angles.iter().map(|a| C64::new(a.sin(), 0.0)).collect(),
        ));
        let basis = lie_algebra_basis(&n, &k, &tol()).unwrap();
        assert_eq!(basis.dim_r, 2);
        let j = current_j(&psi, &basis, &gamma).unwrap();
        for x in points(&mut rng, 5) {
            for nu in 0..4 {
                let full = raw[nu].value(x);
                let proj = j.comps[nu].value(x);
                for r in 0..2 {
                    for c in 0..2 {
                        let expect = if r == c { full[(r, c)] } else { ZERO };
                        assert!((proj[(r, c)] - expect).norm() < 1e-10 * (1.0 + full.norm()));
                    }
                }
            }
        }
    }

    #[test]
    fn divergence_of_constant_current_is_zero() {
        let c = CMat::from_diagonal(&CVec::from_vec(vec![I, I]));
        let comps = [
            FourierField::constant(c.clone()),
            FourierField::constant(c.clone()),
            FourierField::constant(c.clone()),
            FourierField::constant(c),
        ];
        let j = CurrentField { comps };
        assert_eq!(divergence(&j).num_terms(), 0);
    }

    #[test]
    fn conservation_for_two_level_pair() {
        let gamma = GammaSet::dirac();
        let mut rng = Rng::new(58);
        let m = 1.1;
        let nk = canonical_pair(&mut rng, 3);
        assert!(nk.two_level);
        let basis = lie_algebra_basis(&nk.n, &nk.k, &tol()).unwrap();
        let p1 = on_shell_momentum(m, [0.6, -0.1, 0.2], true);
        let p2 = on_shell_momentum(m, [-0.2, 0.4, 0.9], false);
        let psi = build_plane_wave(p1, &nk, m, &tol(), &gamma)
            .random_field(&mut rng)
            .unwrap()
            .add(
                &build_plane_wave(p2, &nk, m, &tol(), &gamma)
                    .random_field(&mut rng)
                    .unwrap(),
            )
            .unwrap();
        let j = current_j(&psi, &basis, &gamma).unwrap();
        let div = divergence(&j);
        let pts = points(&mut rng, 10);
        let scale = j.comps.iter().map(|c| sup_norm(c, &pts)).fold(1.0, f64::max);
        assert!(sup_norm(&div, &pts) <= 1e-9 * scale);
        // Values lie in L: antihermitian and commuting with N, K.
        for x in points(&mut rng, 3) {
            for nu in 0..4 {
                let v = j.comps[nu].value(x);
                assert!(crate::linalg::antihermitian_deviation(&v) <= 1e-10 * (1.0 + v.norm()));
                assert!(crate::linalg::commutator(&v, &nk.n).norm() <= 1e-9 * (1.0 + v.norm()));
                assert!(crate::linalg::commutator(&v, &nk.k).norm() <= 1e-9 * (1.0 + v.norm()));
            }
        }
    }

    // Conservation genuinely fails without the two-level condition: the
    // Jordan pair leaks divergence through the non-hermitian mass term.
    #[test]
    fn conservation_fails_for_jordan_pair() {
        let gamma = GammaSet::dirac();
        let mut rng = Rng::new(59);
        let m = 1.0;
        let nk = NkPair::example2(ZERO, ONE, &CMat::identity(4, 4), &tol()).unwrap();
        let basis = lie_algebra_basis(&nk.n, &nk.k, &tol()).unwrap();
        let p1 = on_shell_momentum(m, [0.3, 0.2, -0.5], true);
        let p2 = on_shell_momentum(m, [-0.6, 0.1, 0.4], true);
        let pts = points(&mut rng, 10);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let psi = build_plane_wave(p1, &nk, m, &tol(), &gamma)
                .random_field(&mut rng)
                .unwrap()
                .add(
                    &build_plane_wave(p2, &nk, m, &tol(), &gamma)
                        .random_field(&mut rng)
                        .unwrap(),
                )
                .unwrap();
            let j = current_j(&psi, &basis, &gamma).unwrap();
            let scale = j.comps.iter().map(|c| sup_norm(c, &pts)).fold(1.0, f64::max);
            worst = worst.max(sup_norm(&divergence(&j), &pts) / scale);
        }
        assert!(worst > 1e-6, "divergence stayed at {worst:.3e}");
    }

    #[test]
    fn current_identity_holds_for_solutions() {
        let gamma = GammaSet::dirac();
        let mut rng = Rng::new(60);
        let m = 0.9;
        let pts = points(&mut rng, 10);

        // Two-level pair.
        let nk = canonical_pair(&mut rng, 2);
        let p = on_shell_momentum(m, [0.1, -0.8, 0.3], true);
        let psi = build_plane_wave(p, &nk, m, &tol(), &gamma)
            .random_field(&mut rng)
            .unwrap();
        let r = current_identity_residual(&psi, &nk, m, &gamma, &tol()).unwrap();
        assert!(sup_norm(&r, &pts) <= 1e-10 * psi.coeff_norm().max(1.0));

        // Non-hermitian Jordan pair: the identity still holds.
        let nk2 = NkPair::example2(C64::new(0.6, 0.0), C64::new(0.8, 0.0), &CMat::identity(4, 4), &tol()).unwrap();
        let p2 = on_shell_momentum(m, [0.5, 0.0, -0.1], false);
        let psi2 = build_plane_wave(p2, &nk2, m, &tol(), &gamma)
            .random_field(&mut rng)
            .unwrap();
        let r2 = current_identity_residual(&psi2, &nk2, m, &gamma, &tol()).unwrap();
        assert!(sup_norm(&r2, &pts) <= 1e-10 * psi2.coeff_norm().max(1.0));

        // Zero field trivially satisfies it.
        let r0 = current_identity_residual(&FourierField::zero(4, 2), &nk, m, &gamma, &tol()).unwrap();
        assert_eq!(r0.num_terms(), 0);

        // A non-solution is rejected.
        let junk = FourierField::plane_wave([0.4, 0.1, 0.0, 0.0], rng.matrix(4, 2));
        assert!(matches!(
            current_identity_residual(&junk, &nk, m, &gamma, &tol()),
            Err(Error::NotASolution(_))
        ));
    }

    #[test]
    fn lagrangian_reduces_to_single_column_form() {
        let gamma = GammaSet::dirac();
        let mut rng = Rng::new(61);
        let m = 1.3;
        let nk = NkPair::standard(1, &tol()).unwrap();
        let psi = {
            let mut f = FourierField::zero(4, 1);
            for _ in 0..2 {
                let p = [
                    rng.range(-1.0, 1.0),
                    rng.range(-1.0, 1.0),
                    rng.range(-1.0, 1.0),
                    rng.range(-1.0, 1.0),
                ];
                f = f.add(&FourierField::plane_wave(p, rng.matrix(4, 1))).unwrap();
            }
            f
        };
        for x in points(&mut rng, 5) {
            let ours = lagrangian_density(&psi, &nk, m, &gamma, x, &tol()).unwrap();
            // Independent single-column oracle:
            // (i/2)(ψ̄γ^μ∂_μψ - ∂_μψ̄γ^μψ) - mψ̄ψ.
            let v = psi.value(x);
            let bar = v.adjoint() * &gamma.gamma[0];
            let mut kinetic = C64::new(0.0, 0.0);
            for mu in 0..4 {
                let d = psi.derivative(mu, x);
                let dbar = d.adjoint() * &gamma.gamma[0];
                kinetic += ((&bar * &gamma.gamma[mu] * &d) - (dbar * &gamma.gamma[mu] * &v))[(0, 0)];
            }
            let oracle = (kinetic * I * C64::new(0.5, 0.0)
                - (&bar * &v)[(0, 0)] * C64::new(m, 0.0))
            .re;
            assert!((ours - oracle).abs() < 1e-12 * (1.0 + oracle.abs()));
        }
    }

    #[test]
    fn lagrangian_is_real_and_globally_invariant() {
        let gamma = GammaSet::dirac();
        let mut rng = Rng::new(62);
        let m = 0.7;
        let nk = canonical_pair(&mut rng, 3);
        let basis = lie_algebra_basis(&nk.n, &nk.k, &tol()).unwrap();
        let psi = {
            let mut f = FourierField::zero(4, 3);
            for _ in 0..2 {
                let p = [
                    rng.range(-1.0, 1.0),
                    rng.range(-1.0, 1.0),
                    rng.range(-1.0, 1.0),
                    rng.range(-1.0, 1.0),
                ];
                f = f.add(&FourierField::plane_wave(p, rng.matrix(4, 3))).unwrap();
            }
            f
        };
        // Constant group element from a random generator in L.
        let mut theta = CMat::zeros(3, 3);
        for b in &basis.elements {
            theta += b * C64::new(0.4 * rng.normal(), 0.0);
        }
        let v = crate::commutant::exp_generator(&theta, &nk.n, &nk.k, &tol()).unwrap();
        let psi_v = psi.right_mul(&v).unwrap();
        for x in points(&mut rng, 10) {
            let full = lagrangian_density_value(&psi, &nk, m, &gamma, x);
            assert!(full.im.abs() <= 1e-12 * (1.0 + full.norm()));
            let transformed = lagrangian_density_value(&psi_v, &nk, m, &gamma, x);
            assert!((full - transformed).norm() <= 1e-10 * (1.0 + full.norm()));
        }

        // Non-hermitian pairs are rejected.
        let jordan = NkPair::example2(ZERO, ONE, &CMat::identity(4, 4), &tol()).unwrap();
        let psi4 = FourierField::plane_wave([0.5, 0.0, 0.0, 0.0], rng.matrix(4, 4));
        assert!(matches!(
            lagrangian_density(&psi4, &jordan, m, &gamma, [0.0; 4], &tol()),
            Err(Error::NonHermitianPair(_))
        ));
    }
}
