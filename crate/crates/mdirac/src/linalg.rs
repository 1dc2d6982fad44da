//! Dense complex matrix utilities: null spaces, polar decomposition, and
//! joint diagonalization of commuting hermitian pairs.
//!
//! Everything here works at desk scale (matrices up to ~16×16 and the
//! vectorized systems they induce); singular value and eigenvalue
//! computations are delegated to nalgebra.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;
pub type CMat = nalgebra::DMatrix<C64>;
pub type CVec = nalgebra::DVector<C64>;
pub type RMat = nalgebra::DMatrix<f64>;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

/// Relative tolerance and singular-value cutoff used by rank decisions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative tolerance for residual checks (default 1e-10).
    pub rel: f64,
    /// Singular values below `rank_cut` times the largest one count as zero.
    pub rank_cut: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel: 1e-10,
            rank_cut: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn new(rel: f64, rank_cut: f64) -> Result<Self> {
        if !(rel > 0.0 && rel < 1.0) {
            return Err(Error::InvalidTolerance(format!(
                "rel must be in (0,1), got {rel}"
            )));
        }
        if !(rank_cut > 0.0 && rank_cut < 1.0) {
            return Err(Error::InvalidTolerance(format!(
                "rank_cut must be in (0,1), got {rank_cut}"
            )));
        }
        Ok(Tolerances { rel, rank_cut })
    }
}

/// Commutator AB - BA.
pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Real inner product Re tr(A†B) on matrices viewed as a real vector space.
pub fn re_inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Hermitian deviation ||M - M†||.
pub fn hermitian_deviation(m: &CMat) -> f64 {
    (m - m.adjoint()).norm()
}

/// Antihermitian deviation ||M + M†||.
pub fn antihermitian_deviation(m: &CMat) -> f64 {
    (m + m.adjoint()).norm()
}

/// Unitarity deviation ||M†M - 1||.
pub fn unitary_deviation(m: &CMat) -> f64 {
    (m.adjoint() * m - CMat::identity(m.ncols(), m.ncols())).norm()
}

/// Column-stacking vectorization (nalgebra storage order).
pub fn vec_of(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

/// Inverse of [`vec_of`] for an `rows × cols` matrix.
pub fn unvec(v: &CVec, rows: usize, cols: usize) -> CMat {
    CMat::from_column_slice(rows, cols, v.as_slice())
}

/// Matrix of the linear map X ↦ XM - MX under column-stacking: Mᵀ⊗1 - 1⊗M.
pub fn commutation_map(m: &CMat) -> CMat {
    let l = m.nrows();
    let eye = CMat::identity(l, l);
    m.transpose().kronecker(&eye) - eye.kronecker(m)
}

/// Orthonormal basis of the null space {v : Mv = 0}.
///
/// Singular values are thresholded at `rank_cut` times the largest one.
/// Returns an empty list when M has full column rank.
pub fn null_space(m: &CMat, tol: &Tolerances) -> Vec<CVec> {
    let (rows, cols) = m.shape();
    // Thin SVD only returns min(rows, cols) right singular vectors; pad wide
    // matrices with zero rows so the whole right factor is available.
    let work = if rows < cols {
        let mut padded = CMat::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let smax = svd.singular_values.max();
    let cutoff = tol.rank_cut * smax;
    let mut basis = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff {
            basis.push(v_t.row(i).adjoint());
        }
    }
    basis
}

/// Orthonormal null-space basis of a real matrix.
pub fn null_space_real(m: &RMat, rank_cut: f64) -> Vec<nalgebra::DVector<f64>> {
    let (rows, cols) = m.shape();
    let work = if rows < cols {
        let mut padded = RMat::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let smax = svd.singular_values.max();
    let cutoff = rank_cut * smax;
    let mut basis = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff {
            basis.push(v_t.row(i).transpose());
        }
    }
    basis
}

/// Polar decomposition M = PU with P hermitian positive semidefinite and U
/// unitary, via the singular value decomposition M = WΣZ†:
/// P = WΣW†, U = WZ†.
pub fn polar_decompose(m: &CMat) -> Result<(CMat, CMat)> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::ShapeMismatch {
            expected: "square matrix".into(),
            got: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    let svd = m.clone().svd(true, true);
    let w = svd.u.expect("requested left singular vectors");
    let z_t = svd.v_t.expect("requested right singular vectors");
    let sigma = CMat::from_diagonal(&svd.singular_values.map(|s| C64::new(s, 0.0)));
    let p = &w * &sigma * w.adjoint();
    let u = &w * &z_t;
    // Symmetrize away rounding in P.
    let p = (&p + p.adjoint()) * C64::new(0.5, 0.0);
    Ok((p, u))
}

fn sorted_hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Eigenvalues of a hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    sorted_hermitian_eigen(m).0
}

/// Group sorted values into clusters separated by more than `gap`.
pub fn cluster_values(sorted: &[f64], gap: f64) -> Vec<(f64, usize)> {
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > gap {
            let slice = &sorted[start..i];
            let center = slice.iter().sum::<f64>() / slice.len() as f64;
            clusters.push((center, slice.len()));
            start = i;
        }
    }
    clusters
}

/// Simultaneously diagonalize a commuting hermitian pair: U†NU = diag(λ),
/// U†KU = diag(ε).
///
/// Strategy: eigen-decompose N + tK for a fixed generic t, then split any
/// degenerate eigenspace by diagonalizing K restricted to it. Falls back to
/// other values of t if the off-diagonal residual is not small enough.
pub fn joint_diagonalize(
    n: &CMat,
    k: &CMat,
    tol: &Tolerances,
) -> Result<(CMat, Vec<f64>, Vec<f64>)> {
    let l = n.nrows();
    if n.ncols() != l || k.nrows() != l || k.ncols() != l {
        return Err(Error::ShapeMismatch {
            expected: "two square matrices of equal size".into(),
            got: format!("{}x{} and {}x{}", n.nrows(), n.ncols(), k.nrows(), k.ncols()),
        });
    }
    let dev_n = hermitian_deviation(n);
    let dev_k = hermitian_deviation(k);
    let scale = n.norm() + k.norm();
    if dev_n > tol.rel * (1.0 + n.norm()) {
        return Err(Error::NotHermitian(dev_n));
    }
    if dev_k > tol.rel * (1.0 + k.norm()) {
        return Err(Error::NotHermitian(dev_k));
    }
    let comm = commutator(n, k).norm();
    if comm > tol.rel * (1.0 + scale) {
        return Err(Error::NotCommuting(comm));
    }

    let nh = (n + n.adjoint()) * C64::new(0.5, 0.0);
    let kh = (k + k.adjoint()) * C64::new(0.5, 0.0);

    // Generic mixing weights; irrational and mutually unrelated so joint
    // eigenvalues λ + tε collide only when the pairs themselves coincide.
    const WEIGHTS: [f64; 3] = [0.739_085_133_215_160_7, 1.236_067_977_499_789_7, 0.547_722_557_505_166_1];
    for &t in &WEIGHTS {
        let a = &nh + &kh * C64::new(t, 0.0);
        let (avals, mut q) = sorted_hermitian_eigen(&a);
        let amax = avals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let gap = 1e-8 * (1.0 + amax);
        // Split each degenerate eigenspace of A by diagonalizing K inside it.
        let clusters = cluster_values(&avals, gap);
        let mut col = 0;
        for &(_, size) in &clusters {
            if size > 1 {
                let block = q.columns(col, size).into_owned();
                let restricted = block.adjoint() * &kh * &block;
                let (_, w) = sorted_hermitian_eigen(&restricted);
                let rotated = &block * w;
                q.columns_mut(col, size).copy_from(&rotated);
            }
            col += size;
        }
        let dn = q.adjoint() * &nh * &q;
        let dk = q.adjoint() * &kh * &q;
        let off = |m: &CMat| -> f64 {
            let mut s = 0.0;
            for r in 0..l {
                for c in 0..l {
                    if r != c {
                        s += m[(r, c)].norm_sqr();
                    }
                }
            }
            s.sqrt()
        };
        let off_res = off(&dn) + off(&dk);
        if off_res <= 1e-9 * (1.0 + scale) {
            let lambda: Vec<f64> = (0..l).map(|i| dn[(i, i)].re).collect();
            let eps: Vec<f64> = (0..l).map(|i| dk[(i, i)].re).collect();
            return Ok((q, lambda, eps));
        }
    }
    Err(Error::JointDiagonalizationFailed)
}

/// Matrix exponential.
pub fn mat_exp(m: &CMat) -> CMat {
    m.clone().exp()
}

/// Modified Gram-Schmidt with one re-orthogonalization pass, under the real
/// inner product Re tr(A†B). Drops numerically dependent inputs.
pub fn orthonormalize_re(mats: &[CMat], drop_tol: f64) -> Vec<CMat> {
    let mut basis: Vec<CMat> = Vec::new();
    for m in mats {
        let mut v = m.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = re_inner(b, &v);
                v -= b * C64::new(c, 0.0);
            }
        }
        let norm = re_inner(&v, &v).sqrt();
        if norm > drop_tol {
            basis.push(v * C64::new(1.0 / norm, 0.0));
        }
    }
    basis
}
