//! Gamma matrices in the Dirac representation, the 16-element basis of the
//! 4×4 complex matrix algebra, and the Minkowski metric.
//!
//! Conventions here follow the block form
//!
//! ```text
//! γ⁰ = [σ⁰  0 ]      γᵏ = [ 0  -σᵏ]      γ⁵ = γ⁰γ¹γ²γ³
//!      [0  -σ⁰]           [σᵏ   0 ]
//! ```
//!
//! with σᵏ the Pauli matrices. With this sign choice γ⁵ is antihermitian
//! and squares to -1, which is what makes the z² + y² = 1 factorization of
//! the Klein-Gordon operator close (see [`crate::dirac`]).
//!
//! All entries are Gaussian integers, so the defining relations hold with
//! zero floating-point error and tests may assert exact equality.

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, C64, I, ONE, ZERO};

/// Minkowski metric diag(1, -1, -1, -1).
#[derive(Clone, Copy, Debug)]
pub struct Metric {
    diag: [f64; 4],
}

impl Default for Metric {
    fn default() -> Self {
        Metric {
            diag: [1.0, -1.0, -1.0, -1.0],
        }
    }
}

impl Metric {
    /// Diagonal entry g^{μμ}.
    pub fn sign(&self, mu: usize) -> f64 {
        self.diag[mu]
    }

    /// g^{μν} (zero off the diagonal).
    pub fn entry(&self, mu: usize, nu: usize) -> f64 {
        if mu == nu {
            self.diag[mu]
        } else {
            0.0
        }
    }

    pub fn as_matrix(&self) -> CMat {
        CMat::from_fn(4, 4, |r, c| C64::new(self.entry(r, c), 0.0))
    }

    pub fn signature(&self) -> &'static str {
        "(+,-,-,-)"
    }
}

/// The four gamma matrices, γ⁵, the Pauli matrices, and the 16-element
/// product basis of M(4, C).
#[derive(Clone, Debug)]
pub struct GammaSet {
    pub gamma: [CMat; 4],
    pub gamma5: CMat,
    /// Ordered basis: 1, γ⁰..γ³, the six γ^{μν} (μ<ν), the four γ^{μνλ}
    /// (μ<ν<λ), γ⁵.
    pub basis16: Vec<CMat>,
    pub pauli: [CMat; 4],
    pub metric: Metric,
    /// 16×16 system matrix whose columns are the vectorized basis elements.
    basis_system: CMat,
}

fn pauli_matrices() -> [CMat; 4] {
    let s0 = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]);
    let s1 = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let s2 = CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
    let s3 = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    [s0, s1, s2, s3]
}

fn block_2x2(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> CMat {
    let mut m = CMat::zeros(4, 4);
    m.view_mut((0, 0), (2, 2)).copy_from(a);
    m.view_mut((0, 2), (2, 2)).copy_from(b);
    m.view_mut((2, 0), (2, 2)).copy_from(c);
    m.view_mut((2, 2), (2, 2)).copy_from(d);
    m
}

impl GammaSet {
    /// Build the Dirac representation.
    pub fn dirac() -> Self {
        let pauli = pauli_matrices();
        let zero2 = CMat::zeros(2, 2);
        let gamma0 = block_2x2(&pauli[0], &zero2, &zero2, &(-&pauli[0]));
        let gamma_k = |k: usize| block_2x2(&zero2, &(-&pauli[k]), &pauli[k], &zero2);
        let gamma = [gamma0, gamma_k(1), gamma_k(2), gamma_k(3)];
        let gamma5 = &gamma[0] * &gamma[1] * &gamma[2] * &gamma[3];

        let mut basis16 = Vec::with_capacity(16);
        basis16.push(CMat::identity(4, 4));
        for g in &gamma {
            basis16.push(g.clone());
        }
        for mu in 0..4 {
            for nu in mu + 1..4 {
                basis16.push(&gamma[mu] * &gamma[nu]);
            }
        }
        for mu in 0..4 {
            for nu in mu + 1..4 {
                for la in nu + 1..4 {
                    basis16.push(&gamma[mu] * &gamma[nu] * &gamma[la]);
                }
            }
        }
        basis16.push(gamma5.clone());

        let mut basis_system = CMat::zeros(16, 16);
        for (j, b) in basis16.iter().enumerate() {
            basis_system
                .column_mut(j)
                .copy_from(&CVec::from_column_slice(b.as_slice()));
        }

        GammaSet {
            gamma,
            gamma5,
            basis16,
            pauli,
            metric: Metric::default(),
            basis_system,
        }
    }

    /// γ^μγ^ν + γ^νγ^μ; equals 2g^{μν}·1 exactly.
    pub fn anticommutator(&self, mu: usize, nu: usize) -> Result<CMat> {
        if mu > 3 {
            return Err(Error::IndexOutOfRange(mu));
        }
        if nu > 3 {
            return Err(Error::IndexOutOfRange(nu));
        }
        Ok(&self.gamma[mu] * &self.gamma[nu] + &self.gamma[nu] * &self.gamma[mu])
    }

    /// Coefficients c with Σ c_i basis16[i] = M, by solving the 16×16
    /// linear system (the basis is not trace-orthonormal, so a direct solve
    /// avoids convention traps).
    pub fn decompose_in_basis(&self, m: &CMat) -> Result<[C64; 16]> {
        if m.shape() != (4, 4) {
            return Err(Error::ShapeMismatch {
                expected: "4x4".into(),
                got: format!("{}x{}", m.nrows(), m.ncols()),
            });
        }
        let b = CVec::from_column_slice(m.as_slice());
        let sol = self
            .basis_system
            .clone()
            .lu()
            .solve(&b)
            .ok_or(Error::SingularMatrix)?;
        let mut out = [ZERO; 16];
        for i in 0..16 {
            out[i] = sol[i];
        }
        Ok(out)
    }

    /// Σ c_i basis16[i].
    pub fn reconstruct(&self, coeffs: &[C64; 16]) -> CMat {
        let mut m = CMat::zeros(4, 4);
        for (c, b) in coeffs.iter().zip(&self.basis16) {
            m += b * *c;
        }
        m
    }

    /// γ^μ p_μ for covariant components p.
    pub fn slash(&self, p: [f64; 4]) -> CMat {
        let mut m = CMat::zeros(4, 4);
        for mu in 0..4 {
            m += &self.gamma[mu] * C64::new(p[mu], 0.0);
        }
        m
    }
}
