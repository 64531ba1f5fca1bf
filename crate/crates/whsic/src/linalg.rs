//! Small dense complex linear-algebra layer.
//!
//! Everything in the crate works with dense [`CMat`]/[`CVec`] values at desk
//! scale (dimension ≤ 64, so tensor squares ≤ 4096). The decompositions are
//! built on nalgebra's Hermitian eigensolver and QR; anything fancier
//! (operator exponentials, singular values, Haar sampling) is derived here so
//! the rest of the crate never touches raw numerics.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Dense complex matrix used throughout the crate.
pub type CMat = DMatrix<Complex64>;
/// Dense complex vector used throughout the crate.
pub type CVec = DVector<Complex64>;

/// Complex number from real and imaginary parts.
#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Real number embedded as a complex scalar.
#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest entry modulus of a matrix (max norm).
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Largest entry modulus of a vector.
pub fn max_abs_vec(v: &CVec) -> f64 {
    v.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Max-norm distance ‖a − b‖_max between two equally sized matrices.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

/// ‖U†U − I‖_max, the unitarity defect of a square matrix.
pub fn unitarity_residual(u: &CMat) -> f64 {
    let n = u.ncols();
    let mut g = u.adjoint() * u;
    for i in 0..n {
        g[(i, i)] -= cr(1.0);
    }
    max_abs(&g)
}

/// ‖M − M†‖_max, the Hermiticity defect of a square matrix.
pub fn hermiticity_residual(m: &CMat) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted
/// ascending. Returns `(eigenvalues, eigenvectors)` where column `k` of the
/// eigenvector matrix belongs to eigenvalue `k`.
///
/// The input is symmetrized as `(M + M†)/2` first, so tiny Hermiticity
/// defects from upstream floating-point work are harmless.
pub fn hermitian_eigen_sorted(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    debug_assert_eq!(n, m.ncols());
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Singular values of a (possibly rectangular) complex matrix, descending.
///
/// Computed as the square roots of the eigenvalues of M†M, which is accurate
/// to ~1e−8·σ_max for the tiny matrices this crate handles and avoids a
/// complex SVD dependency.
pub fn singular_values_desc(m: &CMat) -> Vec<f64> {
    let gram = m.adjoint() * m;
    let (mut vals, _) = hermitian_eigen_sorted(&gram);
    vals.reverse();
    vals.iter().map(|v| v.max(0.0).sqrt()).collect()
}

/// Unitary exponential `exp(i·H)` of a Hermitian matrix via its
/// eigendecomposition.
pub fn exp_i_hermitian(h: &CMat) -> CMat {
    let n = h.nrows();
    let (vals, vecs) = hermitian_eigen_sorted(h);
    let mut phases = CMat::zeros(n, n);
    for k in 0..n {
        phases[(k, k)] = c(vals[k].cos(), vals[k].sin());
    }
    &vecs * phases * vecs.adjoint()
}

/// Vector with independent standard-complex-Gaussian entries.
pub fn random_complex_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVec {
    CVec::from_fn(n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) / cr(std::f64::consts::SQRT_2)
    })
}

/// Haar-random unit vector.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVec {
    loop {
        let v = random_complex_vector(n, rng);
        let norm = v.norm();
        if norm > 1e-6 {
            return v / cr(norm);
        }
    }
}

/// Random Hermitian matrix with Gaussian entries (GUE-like, unnormalized).
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let a = CMat::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    });
    (&a + a.adjoint()).scale(0.5)
}

/// Haar-distributed random unitary, via QR of a complex Ginibre matrix with
/// the standard phase correction that makes the R diagonal positive.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) / cr(std::f64::consts::SQRT_2)
    });
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for k in 0..n {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 {
            rkk / cr(rkk.norm())
        } else {
            cr(1.0)
        };
        let col = u.column(k) * phase;
        u.set_column(k, &col);
    }
    u
}

/// Component of `v` orthogonal to the span of an orthonormal family.
pub fn project_out(basis: &[CVec], v: &CVec) -> CVec {
    let mut w = v.clone();
    for b in basis {
        let coeff = b.dotc(&w);
        w -= b * coeff;
    }
    w
}

/// Completes an orthonormal family to an orthonormal basis of dimension
/// `dim`, deterministically: canonical basis vectors e_0, e_1, … are
/// orthogonalized against the family in order and kept whenever they
/// contribute a new direction.
///
/// Errors if the input family is not orthonormal within `1e-8` or cannot be
/// completed (more vectors than dimensions).
pub fn complete_orthonormal_basis(family: &[CVec], dim: usize) -> Result<Vec<CVec>> {
    for (i, u) in family.iter().enumerate() {
        if u.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: u.len(),
            });
        }
        for (j, w) in family.iter().enumerate() {
            let g = u.dotc(w);
            let target = if i == j { 1.0 } else { 0.0 };
            let residual = (g - cr(target)).norm();
            if residual > 1e-8 {
                return Err(Error::LiftNotOrthogonal { residual });
            }
        }
    }
    if family.len() > dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: family.len(),
        });
    }
    let mut basis: Vec<CVec> = family.to_vec();
    for k in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut e = CVec::zeros(dim);
        e[k] = cr(1.0);
        // Orthogonalize twice for numerical stability.
        let mut w = project_out(&basis, &e);
        w = project_out(&basis, &w);
        let norm = w.norm();
        if norm > 1e-6 {
            basis.push(w / cr(norm));
        }
    }
    if basis.len() != dim {
        // Cannot happen for an orthonormal family: the canonical vectors span.
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: basis.len(),
        });
    }
    Ok(basis)
}
