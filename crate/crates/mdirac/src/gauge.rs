//! Gauge fields valued in L(l,N,K), their field strength, the Yang-Mills
//! residual, gauge transformations, the gauge-invariant lagrangian, and the
//! polar gauge.
//!
//! The gauge transformation with group-valued V(x) is
//!
//! ```text
//! ψ → ψV,   a_μ → V⁻¹a_μV + V⁻¹∂_μV,   f_{μν} → V⁻¹f_{μν}V,
//! ```
//!
//! and the third relation is a consequence of the second: recomputing the
//! field strength from the transformed potential reproduces the conjugated
//! field strength, which the tests check numerically.

use std::sync::Arc;

use crate::commutant::LieBasis;
use crate::error::{Error, Result};
use crate::field::{
    DynField, FourierField, GaugeTransformField, PointField, ProductField, ScalarTimesConst,
    SumField,
};
use crate::gamma::GammaSet;
use crate::linalg::{commutator, polar_decompose, CMat, C64, I, Tolerances};
use crate::nk::NkPair;

const METRIC_SIGN: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Four L-valued exponential-sum potentials a_μ.
#[derive(Clone, Debug)]
pub struct GaugeField {
    pub comps: [FourierField; 4],
    pub l: usize,
}

impl GaugeField {
    pub fn zero(l: usize) -> Self {
        GaugeField {
            comps: std::array::from_fn(|_| FourierField::zero(l, l)),
            l,
        }
    }

    pub fn new(comps: [FourierField; 4]) -> Result<Self> {
        let l = comps[0].rows();
        for c in &comps {
            if c.rows() != l || c.cols() != l {
                return Err(Error::ShapeMismatch {
                    expected: format!("{l}x{l}"),
                    got: format!("{}x{}", c.rows(), c.cols()),
                });
            }
        }
        Ok(GaugeField { comps, l })
    }

    /// Potential with components Σ_j s_j(x)·B_j over real scalar sums and
    /// Lie-basis elements, so values lie in L by construction.
    pub fn from_algebra_combination(
        basis: &LieBasis,
        components: [Vec<(FourierField, usize)>; 4],
    ) -> Result<Self> {
        let l = basis.l;
        let mut comps = Vec::with_capacity(4);
        for list in components {
            let mut acc = FourierField::zero(l, l);
            for (scalar, idx) in list {
                let embedded = scalar.scalar_embed(&basis.elements[idx])?;
                acc = acc.add(&embedded)?;
            }
            comps.push(acc);
        }
        Ok(GaugeField {
            comps: comps.try_into().expect("four components"),
            l,
        })
    }

    /// Check that values at the given points are antihermitian and commute
    /// with N and K.
    pub fn values_in_algebra(&self, n: &CMat, k: &CMat, tol: &Tolerances, pts: &[[f64; 4]]) -> bool {
        pts.iter().all(|&x| {
            self.comps.iter().all(|c| {
                let v = c.value(x);
                crate::linalg::antihermitian_deviation(&v) <= tol.rel * (1.0 + v.norm())
                    && commutator(&v, n).norm() <= tol.rel * (1.0 + v.norm()) * (1.0 + n.norm())
                    && commutator(&v, k).norm() <= tol.rel * (1.0 + v.norm()) * (1.0 + k.norm())
            })
        })
    }
}

/// Antisymmetric field strength f_{μν}, stored for all 16 index pairs with
/// exact antisymmetry (the lower triangle is the negation of the upper).
#[derive(Clone, Debug)]
pub struct FieldStrength {
    comps: Vec<FourierField>,
    pub l: usize,
}

impl FieldStrength {
    pub fn component(&self, mu: usize, nu: usize) -> &FourierField {
        &self.comps[mu * 4 + nu]
    }

    /// Rebuild from the six independent components f_{μν} with μ < ν; the
    /// lower triangle is the exact negation, the diagonal is zero.
    pub fn from_upper_components(l: usize, upper: Vec<(usize, usize, FourierField)>) -> Result<Self> {
        let zero = FourierField::zero(l, l);
        let mut comps = vec![zero; 16];
        for (mu, nu, f) in upper {
            if mu >= nu || nu > 3 {
                return Err(Error::ShapeMismatch {
                    expected: "index pair with mu < nu <= 3".into(),
                    got: format!("({mu},{nu})"),
                });
            }
            if f.rows() != l || f.cols() != l {
                return Err(Error::ShapeMismatch {
                    expected: format!("{l}x{l}"),
                    got: format!("{}x{}", f.rows(), f.cols()),
                });
            }
            comps[nu * 4 + mu] = f.scale(C64::new(-1.0, 0.0));
            comps[mu * 4 + nu] = f;
        }
        Ok(FieldStrength { comps, l })
    }
}

/// f_{μν} = ∂_μ a_ν - ∂_ν a_μ - [a_ν, a_μ], computed exactly.
pub fn field_strength(a: &GaugeField) -> Result<FieldStrength> {
    let l = a.l;
    let zero = FourierField::zero(l, l);
    let mut comps = vec![zero; 16];
    for mu in 0..4 {
        for nu in mu + 1..4 {
            let da = a.comps[nu].differentiate(mu);
            let db = a.comps[mu].differentiate(nu);
            let comm = a.comps[nu]
                .multiply(&a.comps[mu])?
                .sub(&a.comps[mu].multiply(&a.comps[nu])?)?;
            let f = da.sub(&db)?.sub(&comm)?;
            comps[nu * 4 + mu] = f.scale(C64::new(-1.0, 0.0));
            comps[mu * 4 + nu] = f;
        }
    }
    Ok(FieldStrength { comps, l })
}

/// Raise both indices with the metric: f^{μν} = g^{μα}g^{νβ}f_{αβ}, i.e. a
/// sign flip on each mixed time-space component.
pub fn raise_indices(f: &FieldStrength) -> FieldStrength {
    let mut comps = Vec::with_capacity(16);
    for mu in 0..4 {
        for nu in 0..4 {
            let s = METRIC_SIGN[mu] * METRIC_SIGN[nu];
            comps.push(f.component(mu, nu).scale(C64::new(s, 0.0)));
        }
    }
    FieldStrength { comps, l: f.l }
}

/// A full field configuration in pointwise form: the wave function, the four
/// potentials, and the sixteen field-strength components. Exact exponential
/// sums and gauge-transformed composites both reduce to this.
pub struct GaugeConfig {
    pub psi: DynField,
    pub a: Vec<DynField>,
    pub f: Vec<DynField>,
    pub l: usize,
}

impl GaugeConfig {
    pub fn from_exact(psi: &FourierField, a: &GaugeField, f: &FieldStrength) -> Self {
        GaugeConfig {
            psi: Arc::new(psi.clone()),
            a: a.comps.iter().map(|c| Arc::new(c.clone()) as DynField).collect(),
            f: (0..16)
                .map(|i| Arc::new(f.comps[i].clone()) as DynField)
                .collect(),
            l: a.l,
        }
    }

    pub fn a_values(&self, x: [f64; 4]) -> [CMat; 4] {
        std::array::from_fn(|mu| self.a[mu].value(x))
    }
}

/// Field strength of four pointwise potentials, evaluated at x.
pub fn field_strength_at(a: &[DynField], mu: usize, nu: usize, x: [f64; 4]) -> CMat {
    let av = a[nu].value(x);
    let au = a[mu].value(x);
    a[nu].derivative(mu, x) - a[mu].derivative(nu, x) - (&av * &au - au * av)
}

/// Gauge transformation by V(x) = exp(φ(x)Θ) with Θ ∈ L(l,N,K):
/// ψ' = ψV, a'_μ = V⁻¹a_μV + V⁻¹∂_μV, f'_{μν} = V⁻¹f_{μν}V, all as lazy
/// composites with exact derivatives (V⁻¹∂_μV collapses to (∂_μφ)Θ because
/// V commutes with its own generator).
pub fn gauge_transform(
    psi: &FourierField,
    a: &GaugeField,
    f: &FieldStrength,
    v: &GaugeTransformField,
    nk: &NkPair,
    tol: &Tolerances,
) -> Result<GaugeConfig> {
    let theta = v.generator();
    let dev_n = commutator(theta, &nk.n).norm();
    let dev_k = commutator(theta, &nk.k).norm();
    let bound = tol.rel * (1.0 + nk.n.norm() + nk.k.norm()) * theta.norm().max(1.0);
    if dev_n > bound || dev_k > bound {
        return Err(Error::NotInLieAlgebra(dev_n.max(dev_k)));
    }
    let v_arc: DynField = Arc::new(v.clone());
    let vinv_arc: DynField = Arc::new(v.inverse());

    let psi_prime: DynField = Arc::new(ProductField::new(vec![
        Arc::new(psi.clone()) as DynField,
        v_arc.clone(),
    ])?);

    let mut a_prime: Vec<DynField> = Vec::with_capacity(4);
    for mu in 0..4 {
        let conjugated = ProductField::new(vec![
            vinv_arc.clone(),
            Arc::new(a.comps[mu].clone()) as DynField,
            v_arc.clone(),
        ])?;
        let inhomogeneous = ScalarTimesConst::new(v.phase().differentiate(mu), theta.clone())?;
        a_prime.push(Arc::new(SumField::new(vec![
            Arc::new(conjugated) as DynField,
            Arc::new(inhomogeneous) as DynField,
        ])?));
    }

    let mut f_prime: Vec<DynField> = Vec::with_capacity(16);
    for mu in 0..4 {
        for nu in 0..4 {
            let conj = ProductField::new(vec![
                vinv_arc.clone(),
                Arc::new(f.component(mu, nu).clone()) as DynField,
                v_arc.clone(),
            ])?;
            f_prime.push(Arc::new(conj));
        }
    }

    Ok(GaugeConfig {
        psi: psi_prime,
        a: a_prime,
        f: f_prime,
        l: a.l,
    })
}

/// Yang-Mills residual per ν at a point:
/// Σ_μ ∂_μ f^{μν} - Σ_μ [f^{μν}, a_μ] + π(iψ̄γ^νψ).
pub fn ym_residual_at(
    cfg: &GaugeConfig,
    basis: &LieBasis,
    gamma: &GammaSet,
    x: [f64; 4],
) -> Result<[CMat; 4]> {
    let l = cfg.l;
    let psi_val = cfg.psi.value(x);
    if psi_val.nrows() != 4 || psi_val.ncols() != l {
        return Err(Error::ShapeMismatch {
            expected: format!("4x{l} wave function"),
            got: format!("{}x{}", psi_val.nrows(), psi_val.ncols()),
        });
    }
    let bar = psi_val.adjoint() * &gamma.gamma[0];
    let a_vals = cfg.a_values(x);
    let mut out: Vec<CMat> = Vec::with_capacity(4);
    for nu in 0..4 {
        let mut acc = CMat::zeros(l, l);
        for mu in 0..4 {
            let s = C64::new(METRIC_SIGN[mu] * METRIC_SIGN[nu], 0.0);
            let f_upper_val = cfg.f[mu * 4 + nu].value(x) * s;
            let f_upper_d = cfg.f[mu * 4 + nu].derivative(mu, x) * s;
            acc += f_upper_d;
            acc -= &f_upper_val * &a_vals[mu] - &a_vals[mu] * f_upper_val;
        }
        let source = (&bar * &gamma.gamma[nu] * &psi_val) * I;
        acc += basis.project_unchecked(&source);
        out.push(acc);
    }
    Ok(out.try_into().expect("four components"))
}

/// Gauge-invariant lagrangian density at a point:
/// the matter density with covariant derivatives plus (1/4)tr(f_{μν}f^{μν}).
pub fn gauge_lagrangian_value(
    cfg: &GaugeConfig,
    nk: &NkPair,
    m: f64,
    gamma: &GammaSet,
    x: [f64; 4],
) -> C64 {
    let v = cfg.psi.value(x);
    let bar = v.adjoint() * &gamma.gamma[0];
    let a_vals = cfg.a_values(x);
    let mut acc = C64::new(0.0, 0.0);
    for mu in 0..4 {
        let d = cfg.psi.derivative(mu, x) - &v * &a_vals[mu];
        let dbar = cfg.psi.derivative(mu, x).adjoint() * &gamma.gamma[0] + &a_vals[mu] * &bar;
        let kinetic = &bar * &gamma.gamma[mu] * &d - dbar * &gamma.gamma[mu] * &v;
        acc += kinetic.trace() * I;
    }
    let h = &bar * &v;
    let g5 = &bar * &gamma.gamma5 * &v;
    let mass = &h * &nk.n + &nk.n * &h + &g5 * &nk.k + &nk.k * &g5;
    acc -= mass.trace() * C64::new(m, 0.0);
    acc *= C64::new(0.5, 0.0);

    let mut ym = C64::new(0.0, 0.0);
    for mu in 0..4 {
        for nu in 0..4 {
            let s = C64::new(METRIC_SIGN[mu] * METRIC_SIGN[nu], 0.0);
            let f_val = cfg.f[mu * 4 + nu].value(x);
            ym += (&f_val * &f_val).trace() * s;
        }
    }
    acc + ym * C64::new(0.25, 0.0)
}

/// Real gauge-invariant lagrangian density; requires a hermitian pair.
pub fn gauge_lagrangian_density(
    cfg: &GaugeConfig,
    nk: &NkPair,
    m: f64,
    gamma: &GammaSet,
    x: [f64; 4],
    tol: &Tolerances,
) -> Result<f64> {
    let dev =
        crate::linalg::hermitian_deviation(&nk.n).max(crate::linalg::hermitian_deviation(&nk.k));
    if dev > tol.rel * (1.0 + nk.n.norm() + nk.k.norm()) {
        return Err(Error::NonHermitianPair(dev));
    }
    Ok(gauge_lagrangian_value(cfg, nk, m, gamma, x).re)
}

/// One polar-gauge sample: the hermitian PSD transformed wave function, the
/// transformed potential, the gauge element V = U⁻¹, and its
/// finite-difference derivatives.
#[derive(Clone, Debug)]
pub struct PolarSample {
    pub x: [f64; 4],
    pub psi_prime: CMat,
    pub a_prime: [CMat; 4],
    pub v: CMat,
    pub v_deriv: [CMat; 4],
}

/// Finite-difference step for the polar factor derivative.
pub const POLAR_FD_STEP: f64 = 1e-5;

/// The gauge element V(x) = U(x)⁻¹ extracted from the polar factorization
/// ψ(x) = P(x)U(x); unique wherever ψ(x) has full rank.
pub fn polar_gauge_element(psi: &dyn PointField, x: [f64; 4], tol: &Tolerances) -> Result<CMat> {
    let m = psi.value(x);
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin < tol.rank_cut.sqrt() * smax {
        return Err(Error::RankDeficient(smin / smax));
    }
    let (_, u) = polar_decompose(&m)?;
    Ok(u.adjoint())
}

/// Transform samples of a configuration into the polar gauge: at each x,
/// factor ψ(x) = P(x)U(x) and apply the gauge transformation V = U⁻¹, so
/// the transformed wave function is the hermitian PSD factor P. The
/// derivative of V entering a' is taken by central finite differences of
/// the polar factor.
///
/// Requires l = 4 and scalar N = cos ξ·1, K = sin ξ·1, so the gauge group
/// is the full unitary group and arbitrary V(x) is admissible.
pub fn polar_gauge(
    psi: &dyn PointField,
    a: &GaugeField,
    nk: &NkPair,
    samples: &[[f64; 4]],
    tol: &Tolerances,
) -> Result<Vec<PolarSample>> {
    if nk.l != 4 {
        return Err(Error::ConstraintViolation(format!(
            "polar gauge requires l = 4, got l = {}",
            nk.l
        )));
    }
    let eye = CMat::identity(4, 4);
    let n_scalar = &eye * nk.n[(0, 0)];
    let k_scalar = &eye * nk.k[(0, 0)];
    if (&nk.n - n_scalar).norm() > tol.rel * (1.0 + nk.n.norm())
        || (&nk.k - k_scalar).norm() > tol.rel * (1.0 + nk.k.norm())
    {
        return Err(Error::ConstraintViolation(
            "polar gauge requires scalar N = cos ξ·1, K = sin ξ·1".into(),
        ));
    }
    let h = POLAR_FD_STEP;
    let mut out = Vec::with_capacity(samples.len());
    for &x in samples {
        let v = polar_gauge_element(psi, x, tol)?;
        let psi_prime = psi.value(x) * &v;
        let mut v_deriv: Vec<CMat> = Vec::with_capacity(4);
        for mu in 0..4 {
            let mut xp = x;
            let mut xm = x;
            xp[mu] += h;
            xm[mu] -= h;
            let vp = polar_gauge_element(psi, xp, tol)?;
            let vm = polar_gauge_element(psi, xm, tol)?;
            v_deriv.push((vp - vm) * C64::new(0.5 / h, 0.0));
        }
        let v_inv = v.adjoint();
        let a_prime: Vec<CMat> = (0..4)
            .map(|mu| &v_inv * a.comps[mu].value(x) * &v + &v_inv * &v_deriv[mu])
            .collect();
        out.push(PolarSample {
            x,
            psi_prime,
            a_prime: a_prime.try_into().expect("four components"),
            v,
            v_deriv: v_deriv.try_into().expect("four components"),
        });
    }
    Ok(out)
}
