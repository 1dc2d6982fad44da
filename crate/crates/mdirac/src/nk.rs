//! Construction, validation, and classification of the l×l matrix pairs
//! (N, K) that parameterize the matrix Dirac equation.
//!
//! Two structural conditions matter:
//!
//! * the consistency condition `[N,K] = 0` and `N² + K² = 1`, under which
//!   every solution of the matrix Dirac equation also solves Klein-Gordon;
//! * the two-level condition: N and K hermitian, commuting, each with at
//!   most two distinct eigenvalues — equivalently N = α₁1 + β₁P₁ and
//!   K = α₂1 + β₂P₂ with hermitian-unitary P_i and real coefficients —
//!   under which the projected current is conserved.
//!
//! Pairs satisfying both reduce, in a joint eigenbasis, to angle pairs
//! (cos θ, sin θ) with at most two distinct angles, or to a common angle
//! with per-entry signs. [`classify`] recovers that canonical description
//! and [`NkPair::canonical`] rebuilds a pair from it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    cluster_values, commutator, hermitian_deviation, hermitian_eigenvalues, joint_diagonalize,
    unitary_deviation, CMat, CVec, C64, ONE, Tolerances,
};

/// How a pair was built. Serialized in the JSON wire format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Simultaneously diagonalizable family N = V diag(z) V⁻¹, K = V diag(y) V⁻¹.
    Example1,
    /// 4×4 Jordan-block family built on the superdiagonal shift.
    Example2,
    /// Two-angle canonical form.
    CanonicalAngles,
    /// Common-angle, per-entry-sign canonical form.
    CanonicalSigns,
    User,
}

/// A validated parameter pair for the matrix Dirac equation.
#[derive(Clone, Debug)]
pub struct NkPair {
    pub l: usize,
    pub n: CMat,
    pub k: CMat,
    /// `[N,K] = 0` and `N² + K² = 1` hold within tolerance.
    pub consistent: bool,
    /// Hermitian, commuting, and each of N, K has at most 2 distinct eigenvalues.
    pub two_level: bool,
    pub hermitian: bool,
    pub provenance: Provenance,
}

/// Residuals of the consistency condition.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConsistencyReport {
    pub commutator_residual: f64,
    pub completeness_residual: f64,
    pub ok: bool,
}

/// Canonical description of a pair satisfying both structural conditions.
#[derive(Clone, Debug)]
pub struct CanonicalPair {
    pub form: CanonicalForm,
    /// Unitary frame: N = U† D_N U, K = U† D_K U.
    pub u: CMat,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CanonicalForm {
    /// p entries at angle ξ and q at angle η: D_N = diag(cos ξ ×p, cos η ×q),
    /// D_K = diag(sin ξ ×p, sin η ×q).
    Angles { p: usize, q: usize, xi: f64, eta: f64 },
    /// Common angle with per-entry signs: D_N = diag(s^N) cos ξ,
    /// D_K = diag(s^K) sin ξ. The two sign patterns may differ.
    Signs {
        xi: f64,
        signs_n: Vec<i8>,
        signs_k: Vec<i8>,
    },
}

fn shape_check(n: &CMat, k: &CMat) -> Result<usize> {
    let l = n.nrows();
    if n.ncols() != l || k.nrows() != l || k.ncols() != l {
        return Err(Error::ShapeMismatch {
            expected: "square matrices of equal size".into(),
            got: format!("{}x{}, {}x{}", n.nrows(), n.ncols(), k.nrows(), k.ncols()),
        });
    }
    Ok(l)
}

/// Residuals of `[N,K] = 0` and `N² + K² = 1`; `ok` iff both are at most
/// `rel × l`.
pub fn validate_consistency(n: &CMat, k: &CMat, tol: &Tolerances) -> Result<ConsistencyReport> {
    let l = shape_check(n, k)?;
    let commutator_residual = commutator(n, k).norm();
    let completeness_residual = (n * n + k * k - CMat::identity(l, l)).norm();
    let bound = tol.rel * l as f64;
    Ok(ConsistencyReport {
        commutator_residual,
        completeness_residual,
        ok: commutator_residual <= bound && completeness_residual <= bound,
    })
}

/// Eigenvalue-gap tolerance for "at most two distinct eigenvalues":
/// values within 1e-8·(1 + spectral radius) of each other are identified.
fn spectral_gap(vals: &[f64]) -> f64 {
    let radius = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    1e-8 * (1.0 + radius)
}

fn distinct_eigenvalue_count(m: &CMat) -> usize {
    let vals = hermitian_eigenvalues(m);
    cluster_values(&vals, spectral_gap(&vals)).len()
}

/// True iff N, K are hermitian, commute, and each has at most two distinct
/// eigenvalues — the existence condition for the decomposition into a real
/// multiple of the identity plus a real multiple of a hermitian involution.
pub fn validate_two_level(n: &CMat, k: &CMat, tol: &Tolerances) -> Result<bool> {
    shape_check(n, k)?;
    let herm = hermitian_deviation(n) <= tol.rel * (1.0 + n.norm())
        && hermitian_deviation(k) <= tol.rel * (1.0 + k.norm());
    if !herm {
        return Ok(false);
    }
    let comm = commutator(n, k).norm() <= tol.rel * (1.0 + n.norm() + k.norm());
    if !comm {
        return Ok(false);
    }
    Ok(distinct_eigenvalue_count(n) <= 2 && distinct_eigenvalue_count(k) <= 2)
}

fn is_hermitian_pair(n: &CMat, k: &CMat, tol: &Tolerances) -> bool {
    hermitian_deviation(n) <= tol.rel * (1.0 + n.norm())
        && hermitian_deviation(k) <= tol.rel * (1.0 + k.norm())
}

impl NkPair {
    fn finish(l: usize, n: CMat, k: CMat, provenance: Provenance, tol: &Tolerances) -> Result<Self> {
        let consistent = validate_consistency(&n, &k, tol)?.ok;
        let two_level = validate_two_level(&n, &k, tol)?;
        let hermitian = is_hermitian_pair(&n, &k, tol);
        Ok(NkPair {
            l,
            n,
            k,
            consistent,
            two_level,
            hermitian,
            provenance,
        })
    }

    /// Wrap user-supplied matrices, computing the structural flags.
    pub fn from_matrices(n: CMat, k: CMat, tol: &Tolerances) -> Result<Self> {
        let l = shape_check(&n, &k)?;
        Self::finish(l, n, k, Provenance::User, tol)
    }

    /// l = 1 pair N = (z), K = (y); the scalar reduction of the matrix
    /// equation.
    pub fn scalar(z: C64, y: C64, tol: &Tolerances) -> Result<Self> {
        let n = CMat::from_element(1, 1, z);
        let k = CMat::from_element(1, 1, y);
        Self::finish(1, n, k, Provenance::User, tol)
    }

    /// Standard pair N = 1, K = 0 of size l.
    pub fn standard(l: usize, tol: &Tolerances) -> Result<Self> {
        let n = CMat::identity(l, l);
        let k = CMat::zeros(l, l);
        Self::finish(l, n, k, Provenance::User, tol)
    }

    /// Simultaneously diagonalizable family: N = V diag(z) V⁻¹,
    /// K = V diag(y) V⁻¹ with z_k² + y_k² = 1 and V invertible.
    pub fn example1(z: &[C64], y: &[C64], v: &CMat, tol: &Tolerances) -> Result<Self> {
        let l = z.len();
        if y.len() != l || v.nrows() != l || v.ncols() != l {
            return Err(Error::ShapeMismatch {
                expected: format!("lists of length {l} and {l}x{l} matrix"),
                got: format!("{} values, {}x{}", y.len(), v.nrows(), v.ncols()),
            });
        }
        for (i, (&zi, &yi)) in z.iter().zip(y).enumerate() {
            let res = (zi * zi + yi * yi - ONE).norm();
            if res > tol.rel {
                return Err(Error::ConstraintViolation(format!(
                    "z[{i}]^2 + y[{i}]^2 = 1 violated by {res:.3e}"
                )));
            }
        }
        let v_inv = v.clone().try_inverse().ok_or(Error::SingularMatrix)?;
        let dz = CMat::from_diagonal(&CVec::from_vec(z.to_vec()));
        let dy = CMat::from_diagonal(&CVec::from_vec(y.to_vec()));
        let n = v * dz * &v_inv;
        let k = v * dy * &v_inv;
        Self::finish(l, n, k, Provenance::Example1, tol)
    }

    /// Jordan-block family at l = 4: N = V(z·1 + J)V⁻¹ with J the
    /// superdiagonal shift, K = V(y·1 + aJ + bJ² + cJ³)V⁻¹ where
    /// a = -z/y, b = -1/(2y³), c = -z/(2y⁵).
    pub fn example2(z: C64, y: C64, v: &CMat, tol: &Tolerances) -> Result<Self> {
        if v.nrows() != 4 || v.ncols() != 4 {
            return Err(Error::ShapeMismatch {
                expected: "4x4".into(),
                got: format!("{}x{}", v.nrows(), v.ncols()),
            });
        }
        if y.norm() == 0.0 {
            return Err(Error::ZeroY);
        }
        let res = (z * z + y * y - ONE).norm();
        if res > tol.rel {
            return Err(Error::ConstraintViolation(format!(
                "z^2 + y^2 = 1 violated by {res:.3e}"
            )));
        }
        let a = -z / y;
        let b = -ONE / (C64::new(2.0, 0.0) * y * y * y);
        let c = -z / (C64::new(2.0, 0.0) * y.powu(5));
        let shift = superdiagonal_shift(4);
        let shift2 = &shift * &shift;
        let shift3 = &shift2 * &shift;
        let eye = CMat::identity(4, 4);
        let n0 = &eye * z + &shift;
        let k0 = &eye * y + &shift * a + &shift2 * b + &shift3 * c;
        let v_inv = v.clone().try_inverse().ok_or(Error::SingularMatrix)?;
        let n = v * n0 * &v_inv;
        let k = v * k0 * &v_inv;
        Self::finish(4, n, k, Provenance::Example2, tol)
    }

    /// Rebuild a pair from its canonical description.
    pub fn canonical(canon: &CanonicalPair, tol: &Tolerances) -> Result<Self> {
        let u = &canon.u;
        let l = u.nrows();
        let dev = unitary_deviation(u);
        if dev > tol.rel * (1.0 + l as f64) {
            return Err(Error::NotUnitary(dev));
        }
        let (dn, dk, provenance) = match &canon.form {
            CanonicalForm::Angles { p, q, xi, eta } => {
                if p + q != l {
                    return Err(Error::BadPartition { p: *p, q: *q, l });
                }
                let mut dn = Vec::with_capacity(l);
                let mut dk = Vec::with_capacity(l);
                for _ in 0..*p {
                    dn.push(C64::new(xi.cos(), 0.0));
                    dk.push(C64::new(xi.sin(), 0.0));
                }
                for _ in 0..*q {
                    dn.push(C64::new(eta.cos(), 0.0));
                    dk.push(C64::new(eta.sin(), 0.0));
                }
                (dn, dk, Provenance::CanonicalAngles)
            }
            CanonicalForm::Signs { xi, signs_n, signs_k } => {
                if signs_n.len() != l || signs_k.len() != l {
                    return Err(Error::BadPartition {
                        p: signs_n.len(),
                        q: signs_k.len(),
                        l,
                    });
                }
                let dn = signs_n
                    .iter()
                    .map(|&s| C64::new(s as f64 * xi.cos(), 0.0))
                    .collect();
                let dk = signs_k
                    .iter()
                    .map(|&s| C64::new(s as f64 * xi.sin(), 0.0))
                    .collect();
                (dn, dk, Provenance::CanonicalSigns)
            }
        };
        let n = u.adjoint() * CMat::from_diagonal(&CVec::from_vec(dn)) * u;
        let k = u.adjoint() * CMat::from_diagonal(&CVec::from_vec(dk)) * u;
        Self::finish(l, n, k, provenance, tol)
    }
}

fn superdiagonal_shift(l: usize) -> CMat {
    CMat::from_fn(l, l, |r, c| if c == r + 1 { ONE } else { C64::new(0.0, 0.0) })
}

fn wrap_angle(theta: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut t = theta % tau;
    if t < 0.0 {
        t += tau;
    }
    if t >= tau {
        t -= tau;
    }
    t
}

/// Circular distance between two angles in [0, 2π).
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let d = (wrap_angle(a) - wrap_angle(b)).abs();
    d.min(tau - d)
}

/// Cluster angles on the circle; returns (center, members) sorted by center.
fn cluster_angles(thetas: &[f64], gap: f64) -> Vec<(f64, Vec<usize>)> {
    let mut order: Vec<usize> = (0..thetas.len()).collect();
    order.sort_by(|&a, &b| thetas[a].partial_cmp(&thetas[b]).unwrap());
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        match clusters.last_mut() {
            Some(last) if angle_distance(thetas[*last.last().unwrap()], thetas[idx]) <= gap => {
                last.push(idx)
            }
            _ => clusters.push(vec![idx]),
        }
    }
    // The first and last clusters may wrap around 2π.
    if clusters.len() > 1 {
        let first = clusters.first().unwrap();
        let last = clusters.last().unwrap();
        if angle_distance(thetas[first[0]], thetas[*last.last().unwrap()]) <= gap {
            let tail = clusters.pop().unwrap();
            clusters[0].extend(tail);
        }
    }
    clusters
        .into_iter()
        .map(|members| {
            // Average on the circle via the embedding into R².
            let (s, c) = members
                .iter()
                .fold((0.0, 0.0), |(s, c), &i| (s + thetas[i].sin(), c + thetas[i].cos()));
            (wrap_angle(s.atan2(c)), members)
        })
        .collect()
}

/// Recover the canonical description of a pair satisfying both the
/// consistency and two-level conditions.
///
/// Joint-diagonalizes the pair, reads off angle pairs θ_k = atan2(ε_k, λ_k),
/// and emits the two-angle form, or the common-angle sign form when the
/// angles fall on a ±(cos ξ, sin ξ) lattice.
pub fn classify(n: &CMat, k: &CMat, tol: &Tolerances) -> Result<CanonicalPair> {
    let consistency = validate_consistency(n, k, tol)?;
    if !consistency.ok {
        return Err(Error::NotCanonical(format!(
            "consistency residuals {:.3e}, {:.3e} exceed tolerance",
            consistency.commutator_residual, consistency.completeness_residual
        )));
    }
    if !validate_two_level(n, k, tol)? {
        return Err(Error::NotCanonical(
            "pair is not hermitian-commuting with at most two eigenvalue levels".into(),
        ));
    }
    let (u_jd, lambda, eps) = joint_diagonalize(n, k, tol)?;
    let l = lambda.len();
    let thetas: Vec<f64> = lambda
        .iter()
        .zip(&eps)
        .map(|(&lam, &e)| wrap_angle(e.atan2(lam)))
        .collect();
    // Angles live on the unit circle, so the clustering scale is O(1).
    let gap = 1e-7;
    let clusters = cluster_angles(&thetas, gap);

    // Reorder the frame columns so equal angles sit in contiguous blocks.
    let order: Vec<usize> = clusters.iter().flat_map(|(_, m)| m.iter().copied()).collect();
    let u_sorted = CMat::from_fn(l, l, |r, c| u_jd[(r, order[c])]);
    // Stored in the convention N = U† D U.
    let u = u_sorted.adjoint();

    let form = match clusters.len() {
        1 => CanonicalForm::Angles {
            p: l,
            q: 0,
            xi: clusters[0].0,
            eta: 0.0,
        },
        2 => {
            let (xi, ref mem_a) = clusters[0];
            let (eta, _) = clusters[1];
            if angle_distance(xi + std::f64::consts::PI, eta) <= gap {
                // Opposite angles: common-angle form with a shared sign pattern.
                let mut signs = vec![0i8; l];
                for (slot, &orig) in order.iter().enumerate() {
                    signs[slot] = if mem_a.contains(&orig) { 1 } else { -1 };
                }
                CanonicalForm::Signs {
                    xi,
                    signs_n: signs.clone(),
                    signs_k: signs,
                }
            } else {
                CanonicalForm::Angles {
                    p: clusters[0].1.len(),
                    q: clusters[1].1.len(),
                    xi,
                    eta,
                }
            }
        }
        _ => {
            // More than two distinct angles can still satisfy the two-level
            // condition when the pairs are (±cos ξ, ±sin ξ) with independent
            // signs. Verify that structure explicitly.
            let abs_lam: Vec<f64> = lambda.iter().map(|v| v.abs()).collect();
            let abs_eps: Vec<f64> = eps.iter().map(|v| v.abs()).collect();
            let spread = |vals: &[f64]| {
                let max = vals.iter().cloned().fold(f64::MIN, f64::max);
                let min = vals.iter().cloned().fold(f64::MAX, f64::min);
                max - min
            };
            if spread(&abs_lam) > 1e-7 || spread(&abs_eps) > 1e-7 {
                return Err(Error::NotCanonical(
                    "angle pairs do not reduce to two angles or a sign lattice".into(),
                ));
            }
            let cos_xi = abs_lam.iter().sum::<f64>() / l as f64;
            let sin_xi = abs_eps.iter().sum::<f64>() / l as f64;
            let xi = sin_xi.atan2(cos_xi);
            let sign_of = |v: f64, magnitude: f64| -> i8 {
                if magnitude < 1e-9 || v >= 0.0 {
                    1
                } else {
                    -1
                }
            };
            let signs_n: Vec<i8> = order.iter().map(|&i| sign_of(lambda[i], cos_xi)).collect();
            let signs_k: Vec<i8> = order.iter().map(|&i| sign_of(eps[i], sin_xi)).collect();
            CanonicalForm::Signs { xi, signs_n, signs_k }
        }
    };
    Ok(CanonicalPair { form, u })
}

/// Multiply a 4×l amplitude by each column of V: the column-reduction of a
/// matrix solution into l bispinor solutions.
pub fn column_split(psi0: &CMat, v: &CMat) -> Result<Vec<CVec>> {
    if psi0.ncols() != v.nrows() || v.nrows() != v.ncols() {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0} mixing matrix", psi0.ncols()),
            got: format!("{}x{}", v.nrows(), v.ncols()),
        });
    }
    if v.clone().try_inverse().is_none() {
        return Err(Error::SingularMatrix);
    }
    Ok((0..v.ncols())
        .map(|k| psi0 * v.column(k).into_owned())
        .collect())
}
