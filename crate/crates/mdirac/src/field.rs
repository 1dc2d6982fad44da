//! Matrix-valued fields on R⁴.
//!
//! [`FourierField`] is a finite sum Σ_k C_k exp(-i p_k·x) with p·x = Σ_μ p_μ x^μ,
//! closed under differentiation, products, and the Dirac adjoint, all computed
//! exactly term by term. [`PointField`] is the pointwise evaluation contract
//! (value and derivatives up to order 2) shared by exponential sums and the
//! lazy composites that gauge transformations produce.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gamma::GammaSet;
use crate::linalg::{CMat, C64, I, ONE};

pub const DEFAULT_TERM_BUDGET: usize = 4096;

/// Frequency 4-tuples are merged on exact bit equality, with -0.0
/// canonicalized to +0.0 so negation round trips.
fn freq_key(p: [f64; 4]) -> [u64; 4] {
    let mut key = [0u64; 4];
    for (k, &v) in key.iter_mut().zip(p.iter()) {
        let canon = if v == 0.0 { 0.0 } else { v };
        *k = canon.to_bits();
    }
    key
}

fn neg_freq(p: [f64; 4]) -> [f64; 4] {
    [-p[0], -p[1], -p[2], -p[3]]
}

#[derive(Clone, Debug)]
struct Term {
    p: [f64; 4],
    coeff: CMat,
}

/// Finite sum of matrix-valued complex exponentials.
#[derive(Clone, Debug)]
pub struct FourierField {
    rows: usize,
    cols: usize,
    terms: BTreeMap<[u64; 4], Term>,
    term_budget: usize,
}

impl FourierField {
    pub fn zero(rows: usize, cols: usize) -> Self {
        FourierField {
            rows,
            cols,
            terms: BTreeMap::new(),
            term_budget: DEFAULT_TERM_BUDGET,
        }
    }

    /// Constant field (single term at zero frequency).
    pub fn constant(c: CMat) -> Self {
        let mut f = FourierField::zero(c.nrows(), c.ncols());
        f.insert([0.0; 4], c);
        f
    }

    /// Single term C·exp(-i p·x).
    pub fn plane_wave(p: [f64; 4], c: CMat) -> Self {
        let mut f = FourierField::zero(c.nrows(), c.ncols());
        f.insert(p, c);
        f
    }

    pub fn from_terms(
        rows: usize,
        cols: usize,
        terms: impl IntoIterator<Item = ([f64; 4], CMat)>,
    ) -> Result<Self> {
        let mut f = FourierField::zero(rows, cols);
        for (p, c) in terms {
            if c.shape() != (rows, cols) {
                return Err(Error::ShapeMismatch {
                    expected: format!("{rows}x{cols}"),
                    got: format!("{}x{}", c.nrows(), c.ncols()),
                });
            }
            f.insert(p, c);
        }
        f.check_budget()?;
        Ok(f)
    }

    pub fn with_budget(mut self, budget: usize) -> Result<Self> {
        self.term_budget = budget;
        self.check_budget()?;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn term_budget(&self) -> usize {
        self.term_budget
    }

    pub fn terms(&self) -> impl Iterator<Item = ([f64; 4], &CMat)> {
        self.terms.values().map(|t| (t.p, &t.coeff))
    }

    /// Coefficient of the term at frequency p (zero matrix if absent).
    pub fn coeff_at(&self, p: [f64; 4]) -> CMat {
        match self.terms.get(&freq_key(p)) {
            Some(t) => t.coeff.clone(),
            None => CMat::zeros(self.rows, self.cols),
        }
    }

    /// Σ_k ||C_k||, an upper bound for sup_x ||F(x)||.
    pub fn coeff_norm(&self) -> f64 {
        self.terms.values().map(|t| t.coeff.norm()).sum()
    }

    fn insert(&mut self, p: [f64; 4], c: CMat) {
        debug_assert!(p.iter().all(|v| v.is_finite()));
        let key = freq_key(p);
        match self.terms.get_mut(&key) {
            Some(t) => {
                t.coeff += c;
                if t.coeff.norm() == 0.0 {
                    self.terms.remove(&key);
                }
            }
            None => {
                if c.norm() != 0.0 {
                    self.terms.insert(key, Term { p, coeff: c });
                }
            }
        }
    }

    fn check_budget(&self) -> Result<()> {
        if self.terms.len() > self.term_budget {
            return Err(Error::TermBudgetExceeded {
                count: self.terms.len(),
                budget: self.term_budget,
            });
        }
        Ok(())
    }

    fn shape_check(&self, other: &FourierField) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                expected: format!("{}x{}", self.rows, self.cols),
                got: format!("{}x{}", other.rows, other.cols),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &FourierField) -> Result<FourierField> {
        self.shape_check(other)?;
        let mut out = self.clone();
        for t in other.terms.values() {
            out.insert(t.p, t.coeff.clone());
        }
        out.check_budget()?;
        Ok(out)
    }

    pub fn sub(&self, other: &FourierField) -> Result<FourierField> {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, c: C64) -> FourierField {
        self.map_coeffs(|m| m * c)
    }

    /// Apply a shape-preserving matrix map to every coefficient
    /// (frequencies unchanged).
    pub fn map_coeffs(&self, f: impl Fn(&CMat) -> CMat) -> FourierField {
        let mut out = FourierField::zero(self.rows, self.cols);
        out.term_budget = self.term_budget;
        for t in self.terms.values() {
            out.insert(t.p, f(&t.coeff));
        }
        out
    }

    /// Left multiplication by a constant matrix.
    pub fn left_mul(&self, m: &CMat) -> Result<FourierField> {
        if m.ncols() != self.rows {
            return Err(Error::ShapeMismatch {
                expected: format!("left factor with {} columns", self.rows),
                got: format!("{}x{}", m.nrows(), m.ncols()),
            });
        }
        let mut out = FourierField::zero(m.nrows(), self.cols);
        out.term_budget = self.term_budget;
        for t in self.terms.values() {
            out.insert(t.p, m * &t.coeff);
        }
        Ok(out)
    }

    /// Right multiplication by a constant matrix.
    pub fn right_mul(&self, m: &CMat) -> Result<FourierField> {
        if m.nrows() != self.cols {
            return Err(Error::ShapeMismatch {
                expected: format!("right factor with {} rows", self.cols),
                got: format!("{}x{}", m.nrows(), m.ncols()),
            });
        }
        let mut out = FourierField::zero(self.rows, m.ncols());
        out.term_budget = self.term_budget;
        for t in self.terms.values() {
            out.insert(t.p, &t.coeff * m);
        }
        Ok(out)
    }

    /// ∂_μ: term-wise map C ↦ (-i p_μ)·C, exact.
    pub fn differentiate(&self, mu: usize) -> FourierField {
        self.differentiate_multi(&[mu])
    }

    /// Mixed partial Π_j ∂_{μ_j}. The scalar factor Π_j (-i p_{μ_j}) is
    /// formed first, so permuting the indices gives bit-identical output.
    pub fn differentiate_multi(&self, mus: &[usize]) -> FourierField {
        let mut out = FourierField::zero(self.rows, self.cols);
        out.term_budget = self.term_budget;
        for t in self.terms.values() {
            let mut factor = ONE;
            for &mu in mus {
                factor *= -I * C64::new(t.p[mu], 0.0);
            }
            out.insert(t.p, &t.coeff * factor);
        }
        out
    }

    /// □ = ∂₀² - ∂₁² - ∂₂² - ∂₃², term-wise factor -(p₀² - p₁² - p₂² - p₃²).
    pub fn dalembertian(&self) -> FourierField {
        let mut out = FourierField::zero(self.rows, self.cols);
        out.term_budget = self.term_budget;
        for t in self.terms.values() {
            let p2 = t.p[0] * t.p[0] - t.p[1] * t.p[1] - t.p[2] * t.p[2] - t.p[3] * t.p[3];
            out.insert(t.p, &t.coeff * C64::new(-p2, 0.0));
        }
        out
    }

    /// Pointwise product; frequencies add component-wise and identical
    /// frequencies merge.
    pub fn multiply(&self, other: &FourierField) -> Result<FourierField> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected: format!("right factor with {} rows", self.cols),
                got: format!("{}x{}", other.rows, other.cols),
            });
        }
        let mut out = FourierField::zero(self.rows, other.cols);
        out.term_budget = self.term_budget.min(other.term_budget);
        for a in self.terms.values() {
            for b in other.terms.values() {
                let p = [
                    a.p[0] + b.p[0],
                    a.p[1] + b.p[1],
                    a.p[2] + b.p[2],
                    a.p[3] + b.p[3],
                ];
                out.insert(p, &a.coeff * &b.coeff);
            }
        }
        out.check_budget()?;
        Ok(out)
    }

    /// Dirac adjoint ψ̄ = ψ†γ⁰: terms (p, C) ↦ (-p, C†γ⁰).
    pub fn dirac_adjoint(&self, gamma: &GammaSet) -> Result<FourierField> {
        if self.rows != 4 {
            return Err(Error::ShapeMismatch {
                expected: "4xL field".into(),
                got: format!("{}x{}", self.rows, self.cols),
            });
        }
        let mut out = FourierField::zero(self.cols, 4);
        out.term_budget = self.term_budget;
        for t in self.terms.values() {
            out.insert(neg_freq(t.p), t.coeff.adjoint() * &gamma.gamma[0]);
        }
        Ok(out)
    }

    /// Embed a 1×1 scalar sum as s(x)·M for a fixed matrix M.
    pub fn scalar_embed(&self, mat: &CMat) -> Result<FourierField> {
        if self.rows != 1 || self.cols != 1 {
            return Err(Error::ShapeMismatch {
                expected: "1x1 scalar field".into(),
                got: format!("{}x{}", self.rows, self.cols),
            });
        }
        let mut out = FourierField::zero(mat.nrows(), mat.ncols());
        out.term_budget = self.term_budget;
        for t in self.terms.values() {
            out.insert(t.p, mat * t.coeff[(0, 0)]);
        }
        Ok(out)
    }

    /// Exact mixed partial derivative value Π_j ∂_{μ_j} F at x.
    pub fn mixed_deriv_value(&self, mus: &[usize], x: [f64; 4]) -> CMat {
        let mut out = CMat::zeros(self.rows, self.cols);
        for t in self.terms.values() {
            let mut factor = phase(t.p, x);
            for &mu in mus {
                factor *= -I * C64::new(t.p[mu], 0.0);
            }
            out += &t.coeff * factor;
        }
        out
    }
}

fn phase(p: [f64; 4], x: [f64; 4]) -> C64 {
    let dot = p[0] * x[0] + p[1] * x[1] + p[2] * x[2] + p[3] * x[3];
    C64::new(0.0, -dot).exp()
}

/// Pointwise evaluation contract: value and exact derivatives up to order 2.
pub trait PointField: Send + Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn value(&self, x: [f64; 4]) -> CMat;
    fn derivative(&self, mu: usize, x: [f64; 4]) -> CMat;
    fn second_derivative(&self, mu: usize, nu: usize, x: [f64; 4]) -> CMat;
}

pub type DynField = Arc<dyn PointField>;

impl PointField for FourierField {
    fn rows(&self) -> usize {
        self.rows
    }
    fn cols(&self) -> usize {
        self.cols
    }
    fn value(&self, x: [f64; 4]) -> CMat {
        self.mixed_deriv_value(&[], x)
    }
    fn derivative(&self, mu: usize, x: [f64; 4]) -> CMat {
        self.mixed_deriv_value(&[mu], x)
    }
    fn second_derivative(&self, mu: usize, nu: usize, x: [f64; 4]) -> CMat {
        self.mixed_deriv_value(&[mu, nu], x)
    }
}

/// Constant matrix as a field.
pub struct ConstField(pub CMat);

impl PointField for ConstField {
    fn rows(&self) -> usize {
        self.0.nrows()
    }
    fn cols(&self) -> usize {
        self.0.ncols()
    }
    fn value(&self, _x: [f64; 4]) -> CMat {
        self.0.clone()
    }
    fn derivative(&self, _mu: usize, _x: [f64; 4]) -> CMat {
        CMat::zeros(self.0.nrows(), self.0.ncols())
    }
    fn second_derivative(&self, _mu: usize, _nu: usize, _x: [f64; 4]) -> CMat {
        CMat::zeros(self.0.nrows(), self.0.ncols())
    }
}

/// Ordered product of fields with exact Leibniz derivatives.
pub struct ProductField {
    factors: Vec<DynField>,
}

impl ProductField {
    pub fn new(factors: Vec<DynField>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::ShapeMismatch {
                expected: "at least one factor".into(),
                got: "0 factors".into(),
            });
        }
        for w in factors.windows(2) {
            if w[0].cols() != w[1].rows() {
                return Err(Error::ShapeMismatch {
                    expected: format!("factor with {} rows", w[0].cols()),
                    got: format!("{}x{}", w[1].rows(), w[1].cols()),
                });
            }
        }
        Ok(ProductField { factors })
    }

    /// Product with factor i replaced by its μ-derivative (and optionally
    /// factor j by its ν-derivative, or a second derivative when i == j).
    fn modified_product(&self, x: [f64; 4], subs: &[(usize, Vec<usize>)]) -> CMat {
        let mut acc: Option<CMat> = None;
        for (idx, f) in self.factors.iter().enumerate() {
            let v = match subs.iter().find(|(i, _)| *i == idx) {
                Some((_, mus)) => match mus.len() {
                    1 => f.derivative(mus[0], x),
                    2 => f.second_derivative(mus[0], mus[1], x),
                    _ => f.value(x),
                },
                None => f.value(x),
            };
            acc = Some(match acc {
                Some(a) => a * v,
                None => v,
            });
        }
        acc.unwrap()
    }
}

impl PointField for ProductField {
    fn rows(&self) -> usize {
        self.factors.first().unwrap().rows()
    }
    fn cols(&self) -> usize {
        self.factors.last().unwrap().cols()
    }
    fn value(&self, x: [f64; 4]) -> CMat {
        self.modified_product(x, &[])
    }
    fn derivative(&self, mu: usize, x: [f64; 4]) -> CMat {
        let mut out = CMat::zeros(self.rows(), self.cols());
        for i in 0..self.factors.len() {
            out += self.modified_product(x, &[(i, vec![mu])]);
        }
        out
    }
    fn second_derivative(&self, mu: usize, nu: usize, x: [f64; 4]) -> CMat {
        let n = self.factors.len();
        let mut out = CMat::zeros(self.rows(), self.cols());
        for i in 0..n {
            out += self.modified_product(x, &[(i, vec![mu, nu])]);
            for j in 0..n {
                if i != j {
                    out += self.modified_product(x, &[(i, vec![mu]), (j, vec![nu])]);
                }
            }
        }
        out
    }
}

/// Sum of fields of equal shape.
pub struct SumField {
    terms: Vec<DynField>,
}

impl SumField {
    pub fn new(terms: Vec<DynField>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::ShapeMismatch {
                expected: "at least one summand".into(),
                got: "0 summands".into(),
            });
        }
        let (r, c) = (terms[0].rows(), terms[0].cols());
        for t in &terms[1..] {
            if t.rows() != r || t.cols() != c {
                return Err(Error::ShapeMismatch {
                    expected: format!("{r}x{c}"),
                    got: format!("{}x{}", t.rows(), t.cols()),
                });
            }
        }
        Ok(SumField { terms })
    }
}

impl PointField for SumField {
    fn rows(&self) -> usize {
        self.terms[0].rows()
    }
    fn cols(&self) -> usize {
        self.terms[0].cols()
    }
    fn value(&self, x: [f64; 4]) -> CMat {
        self.terms
            .iter()
            .fold(CMat::zeros(self.rows(), self.cols()), |a, t| a + t.value(x))
    }
    fn derivative(&self, mu: usize, x: [f64; 4]) -> CMat {
        self.terms
            .iter()
            .fold(CMat::zeros(self.rows(), self.cols()), |a, t| {
                a + t.derivative(mu, x)
            })
    }
    fn second_derivative(&self, mu: usize, nu: usize, x: [f64; 4]) -> CMat {
        self.terms
            .iter()
            .fold(CMat::zeros(self.rows(), self.cols()), |a, t| {
                a + t.second_derivative(mu, nu, x)
            })
    }
}

/// Scalar exponential sum times a fixed matrix: s(x)·M.
pub struct ScalarTimesConst {
    pub scalar: FourierField,
    pub mat: CMat,
}

impl ScalarTimesConst {
    pub fn new(scalar: FourierField, mat: CMat) -> Result<Self> {
        if scalar.rows() != 1 || scalar.cols() != 1 {
            return Err(Error::ShapeMismatch {
                expected: "1x1 scalar field".into(),
                got: format!("{}x{}", scalar.rows(), scalar.cols()),
            });
        }
        Ok(ScalarTimesConst { scalar, mat })
    }

    fn scaled(&self, v: CMat) -> CMat {
        &self.mat * v[(0, 0)]
    }
}

impl PointField for ScalarTimesConst {
    fn rows(&self) -> usize {
        self.mat.nrows()
    }
    fn cols(&self) -> usize {
        self.mat.ncols()
    }
    fn value(&self, x: [f64; 4]) -> CMat {
        self.scaled(self.scalar.value(x))
    }
    fn derivative(&self, mu: usize, x: [f64; 4]) -> CMat {
        self.scaled(self.scalar.mixed_deriv_value(&[mu], x))
    }
    fn second_derivative(&self, mu: usize, nu: usize, x: [f64; 4]) -> CMat {
        self.scaled(self.scalar.mixed_deriv_value(&[mu, nu], x))
    }
}

/// Group-valued field V(x) = exp(φ(x)·Θ) with Θ a fixed antihermitian
/// generator and φ a real scalar exponential sum.
///
/// Since Θ commutes with itself, ∂_μV = (∂_μφ)·Θ·V exactly; higher
/// derivatives follow the same closed pattern, so no discretization enters
/// gauge-transformed fields.
#[derive(Clone)]
pub struct GaugeTransformField {
    theta: CMat,
    theta2: CMat,
    phi: FourierField,
    // Θ = W · diag(i·h) · W† with real h; V(x) = W · diag(exp(i h φ(x))) · W†.
    evecs: CMat,
    evals: Vec<f64>,
}

impl GaugeTransformField {
    pub fn new(theta: CMat, phi: FourierField, tol: f64) -> Result<Self> {
        let n = theta.nrows();
        if theta.ncols() != n {
            return Err(Error::ShapeMismatch {
                expected: "square generator".into(),
                got: format!("{}x{}", theta.nrows(), theta.ncols()),
            });
        }
        if phi.rows() != 1 || phi.cols() != 1 {
            return Err(Error::ShapeMismatch {
                expected: "1x1 scalar field".into(),
                got: format!("{}x{}", phi.rows(), phi.cols()),
            });
        }
        let dev = crate::linalg::antihermitian_deviation(&theta);
        if dev > tol * (1.0 + theta.norm()) {
            return Err(Error::NotAntihermitian(dev));
        }
        // φ must be real-valued: coefficients at opposite frequencies must be
        // complex conjugates.
        for (p, c) in phi.terms() {
            let other = phi.coeff_at(neg_freq(p));
            let dev = (other[(0, 0)] - c[(0, 0)].conj()).norm();
            if dev > 1e-12 * (1.0 + c.norm()) {
                return Err(Error::ConstraintViolation(
                    "phase field must be real-valued (conjugate-paired terms)".into(),
                ));
            }
        }
        // Hermitian eigendecomposition of -iΘ.
        let herm = &theta * (-I);
        let eig = nalgebra::SymmetricEigen::new((&herm + herm.adjoint()) * C64::new(0.5, 0.0));
        let evals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let evecs = eig.eigenvectors;
        let theta2 = &theta * &theta;
        Ok(GaugeTransformField {
            theta,
            theta2,
            phi,
            evecs,
            evals,
        })
    }

    pub fn generator(&self) -> &CMat {
        &self.theta
    }

    pub fn phase(&self) -> &FourierField {
        &self.phi
    }

    /// The pointwise inverse field V⁻¹(x) = exp(-φ(x)·Θ).
    pub fn inverse(&self) -> GaugeTransformField {
        GaugeTransformField {
            theta: -&self.theta,
            theta2: self.theta2.clone(),
            phi: self.phi.clone(),
            evecs: self.evecs.clone(),
            evals: self.evals.iter().map(|v| -v).collect(),
        }
    }

    fn phi_at(&self, x: [f64; 4]) -> f64 {
        self.phi.value(x)[(0, 0)].re
    }

    fn phi_deriv(&self, mus: &[usize], x: [f64; 4]) -> f64 {
        self.phi.mixed_deriv_value(mus, x)[(0, 0)].re
    }
}

impl PointField for GaugeTransformField {
    fn rows(&self) -> usize {
        self.theta.nrows()
    }
    fn cols(&self) -> usize {
        self.theta.ncols()
    }
    fn value(&self, x: [f64; 4]) -> CMat {
        let phi = self.phi_at(x);
        let n = self.rows();
        let d = CMat::from_fn(n, n, |r, c| {
            if r == c {
                C64::new(0.0, self.evals[r] * phi).exp()
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &self.evecs * d * self.evecs.adjoint()
    }
    fn derivative(&self, mu: usize, x: [f64; 4]) -> CMat {
        let d1 = self.phi_deriv(&[mu], x);
        &self.theta * self.value(x) * C64::new(d1, 0.0)
    }
    fn second_derivative(&self, mu: usize, nu: usize, x: [f64; 4]) -> CMat {
        let d1m = self.phi_deriv(&[mu], x);
        let d1n = self.phi_deriv(&[nu], x);
        let d2 = self.phi_deriv(&[mu, nu], x);
        let v = self.value(x);
        &self.theta * &v * C64::new(d2, 0.0) + &self.theta2 * &v * C64::new(d1m * d1n, 0.0)
    }
}

/// Build a real-valued 1×1 scalar field Σ A_j cos(p_j·x + δ_j) as
/// conjugate-paired exponential terms.
pub fn real_scalar_field(components: &[(f64, [f64; 4], f64)]) -> FourierField {
    let mut f = FourierField::zero(1, 1);
    for &(amp, p, delta) in components {
        let half = 0.5 * amp;
        let c_plus = CMat::from_element(1, 1, C64::new(0.0, -delta).exp() * half);
        let c_minus = CMat::from_element(1, 1, C64::new(0.0, delta).exp() * half);
        f.insert(p, c_plus);
        f.insert(neg_freq(p), c_minus);
    }
    f
}

/// Central finite difference of a field value; cross-check for analytic
/// derivatives.
pub fn fd_derivative(f: &dyn PointField, mu: usize, x: [f64; 4], h: f64) -> CMat {
    let mut xp = x;
    let mut xm = x;
    xp[mu] += h;
    xm[mu] -= h;
    (f.value(xp) - f.value(xm)) * C64::new(0.5 / h, 0.0)
}
