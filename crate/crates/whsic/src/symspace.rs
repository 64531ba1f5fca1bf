//! The symmetric subspace of the tensor square H ⊗ H.
//!
//! Vectors on H ⊗ H use the row-major pairing `(i, j) ↦ i·d + j`. The
//! symmetric subspace H_sym is the +1 eigenspace of the factor swap; its
//! projector `P_sym = (I + SWAP)/2` also has a purely Weyl-Heisenberg
//! expression,
//!
//! ```text
//! P_sym = (d+1)/(2d) · ( I + 1/(d+1) · Σ_{a≠0} T_a ⊗ T_{−a} ),
//! ```
//!
//! which is the identity connecting SIC fiducials to the tensor-square
//! constructions in this crate ([`p_sym_wh`] realizes it and is tested to
//! agree with the swap construction entrywise).
//!
//! The module also provides the partial trace over the first factor, the
//! Schmidt rank, and [`takagi_symmetric`]: every symmetric vector admits a
//! *symmetric* Schmidt decomposition `v = Σ cᵢ aᵢ ⊗ aᵢ` with orthonormal aᵢ
//! and cᵢ > 0 (an Autonne–Takagi factorization of the d×d reshaping), whose
//! symmetric rank equals the Schmidt rank.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::heisenberg::{lattice_points, PhaseConstants};
use crate::linalg::{cr, hermitian_eigen_sorted, max_abs_vec, CMat, CVec};

/// Relative gap under which neighboring singular values are treated as one
/// degenerate cluster by [`takagi_symmetric`].
const CLUSTER_RELATIVE_GAP: f64 = 1e-6;

/// Side length d of the tensor square a vector of length `len = d²` lives on.
pub fn tensor_square_dim(len: usize) -> Result<usize> {
    let d = (len as f64).sqrt().round() as usize;
    if d * d != len || d == 0 {
        return Err(Error::NotTensorSquare { len });
    }
    Ok(d)
}

fn check_pair_dim(v: &CVec, d: usize) -> Result<()> {
    if v.len() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            got: v.len(),
        });
    }
    Ok(())
}

/// Swaps the two tensor factors: `(SWAP v)[i·d+j] = v[j·d+i]`.
pub fn swap_tensor_factors(v: &CVec, d: usize) -> Result<CVec> {
    check_pair_dim(v, d)?;
    Ok(CVec::from_fn(d * d, |p, _| v[(p % d) * d + p / d]))
}

/// Applies `P_sym = (I + SWAP)/2` to a vector.
pub fn symmetrize(v: &CVec, d: usize) -> Result<CVec> {
    let swapped = swap_tensor_factors(v, d)?;
    Ok((v + swapped).scale(0.5))
}

/// `‖(I − P_sym) v‖`, the distance from the symmetric subspace.
pub fn asymmetry_residual(v: &CVec, d: usize) -> Result<f64> {
    let swapped = swap_tensor_factors(v, d)?;
    Ok((v - swapped).norm() * 0.5)
}

/// Symmetric-subspace projector built from the factor swap, `(I + SWAP)/2`.
///
/// Idempotent, Hermitian, trace `d(d+1)/2`.
pub fn p_sym_swap(d: usize) -> Result<CMat> {
    PhaseConstants::new(d)?;
    let n = d * d;
    let mut p = CMat::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            p[(i * d + j, i * d + j)] += cr(0.5);
            p[(i * d + j, j * d + i)] += cr(0.5);
        }
    }
    Ok(p)
}

/// Symmetric-subspace projector built from doubled displacements:
/// `(d+1)/(2d) · (I + 1/(d+1) Σ_{a≠0} T_a ⊗ T_{−a})`.
///
/// Agrees with [`p_sym_swap`] entrywise within 1e−12; the displacement form
/// is what makes the projector commute with every `T_a ⊗ T_a` manifestly.
pub fn p_sym_wh(d: usize) -> Result<CMat> {
    PhaseConstants::new(d)?;
    let n = d * d;
    let mut acc = CMat::identity(n, n);
    for a in lattice_points(d) {
        if a == crate::heisenberg::LatticeIndex::ZERO {
            continue;
        }
        let ta = crate::heisenberg::displacement(d, a)?;
        let tneg = crate::heisenberg::displacement(d, -a)?;
        acc += ta.kronecker(&tneg).scale(1.0 / (d as f64 + 1.0));
    }
    Ok(acc.scale((d as f64 + 1.0) / (2.0 * d as f64)))
}

/// Row-major d×d reshaping `M[i, j] = v[i·d + j]` of a tensor-square vector.
pub fn reshape_to_matrix(v: &CVec, d: usize) -> Result<CMat> {
    check_pair_dim(v, d)?;
    Ok(CMat::from_fn(d, d, |i, j| v[i * d + j]))
}

/// Reduced state on the second factor after tracing out the first.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedState {
    dim: usize,
    matrix: CMat,
}

impl ReducedState {
    /// Side length d.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The d×d Hermitian positive-semidefinite matrix.
    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// Trace (equals ‖v‖² of the input vector).
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.matrix[(i, i)].re).sum()
    }

    /// Frobenius norm squared `Σ |ρ_{jl}|²` (the unnormalized purity).
    pub fn frobenius_sq(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Partial trace of `|v⟩⟨v|` over the **first** tensor factor:
/// `(ρ₂)_{jl} = Σ_i v̄_{(i,j)} v_{(i,l)}`, i.e. `M†M` of the row-major
/// reshaping. Hermitian and positive semidefinite; unit trace when `v` is a
/// unit vector.
pub fn partial_trace_first(v: &CVec, d: usize) -> Result<ReducedState> {
    let m = reshape_to_matrix(v, d)?;
    Ok(ReducedState {
        dim: d,
        matrix: m.adjoint() * m,
    })
}

/// Eigenvectors of M†M with singular values refined as `σᵢ = ‖M wᵢ‖`.
///
/// Taking square roots of M†M eigenvalues floors small singular values at
/// √ε·σ_max ≈ 1e−8·σ_max; re-evaluating the norm directly restores absolute
/// ~ε accuracy, which rank decisions at 1e−9 tolerances need. Returns the
/// pairs sorted by ascending singular value.
fn refined_singular_pairs(m: &CMat) -> Vec<(f64, CVec)> {
    let gram = m.adjoint() * m;
    let (_, vecs) = hermitian_eigen_sorted(&gram);
    let mut pairs: Vec<(f64, CVec)> = (0..m.ncols())
        .map(|k| {
            let w: CVec = vecs.column(k).into();
            ((m * &w).norm(), w)
        })
        .collect();
    pairs.sort_by(|(s1, _), (s2, _)| s1.total_cmp(s2));
    pairs
}

/// Singular values of the d×d reshaping of `v`, ascending (full d values,
/// clamped at zero).
pub fn schmidt_spectrum(v: &CVec, d: usize) -> Result<Vec<f64>> {
    let m = reshape_to_matrix(v, d)?;
    Ok(refined_singular_pairs(&m)
        .into_iter()
        .map(|(s, _)| s)
        .collect())
}

/// Schmidt rank: the number of singular values of the d×d reshaping that
/// exceed `tol · (largest singular value)`.
pub fn schmidt_rank(v: &CVec, d: usize, tol: f64) -> Result<usize> {
    if max_abs_vec(v) == 0.0 {
        return Err(Error::ZeroVector);
    }
    let spectrum = schmidt_spectrum(v, d)?;
    let top = spectrum.last().copied().unwrap_or(0.0);
    Ok(spectrum.iter().filter(|&&s| s > tol * top).count())
}

/// Symmetric Schmidt (Autonne–Takagi) decomposition
/// `v = Σᵢ cᵢ aᵢ ⊗ aᵢ` of a symmetric tensor-square vector.
#[derive(Clone, Debug)]
pub struct SymmetricSchmidt {
    /// Symmetric rank r (= Schmidt rank of `v`).
    pub rank: usize,
    /// The r positive coefficients, ascending.
    pub coeffs: Vec<f64>,
    /// The r orthonormal d-vectors aᵢ, matching `coeffs` order.
    pub vectors: Vec<CVec>,
    /// Full singular spectrum of the reshaping (all d values, ascending),
    /// kept for auditing rank decisions.
    pub spectrum: Vec<f64>,
}

impl SymmetricSchmidt {
    /// Rebuilds `Σ cᵢ aᵢ ⊗ aᵢ` as a d²-vector.
    pub fn reconstruct(&self) -> CVec {
        let d = self.vectors.first().map_or(0, |a| a.len());
        let mut v = CVec::zeros(d * d);
        for (c, a) in self.coeffs.iter().zip(self.vectors.iter()) {
            for i in 0..d {
                for j in 0..d {
                    v[i * d + j] += cr(*c) * a[i] * a[j];
                }
            }
        }
        v
    }
}

/// Flips the sign of a Takagi vector so that its largest-modulus entry has
/// positive real part (imaginary part breaking ties), making the ±a freedom
/// deterministic.
fn canonicalize_sign(a: &mut CVec) {
    let mut best = 0usize;
    let mut best_norm = -1.0f64;
    for (k, z) in a.iter().enumerate() {
        if z.norm() > best_norm + 1e-12 {
            best_norm = z.norm();
            best = k;
        }
    }
    let z = a[best];
    if z.re < 0.0 || (z.re == 0.0 && z.im < 0.0) {
        for entry in a.iter_mut() {
            *entry = -*entry;
        }
    }
}

/// Takagi step on a small complex symmetric block B: solves the
/// conjugate-linear eigenproblem `B ḡ = s g` through the real embedding
/// `K = [[X, Y], [Y, −X]]` (for `B = X + iY`), whose positive eigenpairs
/// `(s, [u; v])` give the factors `g = u + iv` with `B = Σ s g gᵀ`.
///
/// Returns the pairs with `s > floor`, orthonormal by construction.
fn takagi_block(b: &CMat, floor: f64) -> Vec<(f64, CVec)> {
    let m = b.nrows();
    let mut k = nalgebra::DMatrix::<f64>::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let x = 0.5 * (b[(i, j)].re + b[(j, i)].re);
            let y = 0.5 * (b[(i, j)].im + b[(j, i)].im);
            k[(i, j)] = x;
            k[(i, j + m)] = y;
            k[(i + m, j)] = y;
            k[(i + m, j + m)] = -x;
        }
    }
    let eig = k.symmetric_eigen();
    let mut out = Vec::new();
    for idx in 0..2 * m {
        let s = eig.eigenvalues[idx];
        if s > floor {
            let col = eig.eigenvectors.column(idx);
            let g = CVec::from_fn(m, |t, _| Complex64::new(col[t], col[t + m]));
            out.push((s, g));
        }
    }
    // The embedding doubles nothing: exactly m eigenvalues are ≥ 0, so at
    // most m pairs survive the floor.
    debug_assert!(out.len() <= m);
    out
}

/// Symmetric Schmidt decomposition of a vector in the symmetric subspace.
///
/// Requires `‖(I − P_sym) v‖ < tol`; the decomposition then reproduces `v`
/// within 10·tol. Coefficients come back ascending; the rank counts singular
/// values above `tol·σ_max` exactly as [`schmidt_rank`] does.
///
/// Algorithm: eigendecompose `G = M†M` of the (symmetrized) reshaping M.
/// Non-degenerate eigenvectors w of G with `G w = σ² w` yield Takagi vectors
/// `a = e^{i·arg(wᵀMw)/2} · w̄`; clusters of near-equal singular values are
/// re-decomposed jointly through a small real-embedding Takagi step, which
/// keeps the aᵢ orthonormal to solver precision even under exact degeneracy.
pub fn takagi_symmetric(v: &CVec, tol: f64) -> Result<SymmetricSchmidt> {
    let d = tensor_square_dim(v.len())?;
    if max_abs_vec(v) == 0.0 {
        return Err(Error::ZeroVector);
    }
    let residual = asymmetry_residual(v, d)?;
    if residual >= tol {
        return Err(Error::NotSymmetric { residual, tol });
    }
    // Kill the sub-tolerance asymmetric component so M is exactly symmetric.
    let m0 = reshape_to_matrix(v, d)?;
    let m = (&m0 + m0.transpose()).scale(0.5);

    let singular_pairs = refined_singular_pairs(&m);
    let spectrum: Vec<f64> = singular_pairs.iter().map(|(s, _)| *s).collect();
    let sigma_max = spectrum.last().copied().unwrap_or(0.0);
    let rank_floor = tol * sigma_max;

    // Group indices of near-equal singular values (ascending order).
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..d {
        match clusters.last_mut() {
            Some(cluster)
                if spectrum[i] - spectrum[*cluster.last().unwrap()]
                    <= CLUSTER_RELATIVE_GAP * sigma_max =>
            {
                cluster.push(i);
            }
            _ => clusters.push(vec![i]),
        }
    }

    let mut pairs: Vec<(f64, CVec)> = Vec::new();
    for cluster in clusters {
        // Clusters entirely below the rank floor carry no Takagi vectors.
        if spectrum[*cluster.last().unwrap()] <= rank_floor {
            continue;
        }
        if cluster.len() == 1 {
            let idx = cluster[0];
            let w = &singular_pairs[idx].1;
            let wm: CVec = CVec::from_fn(d, |i, _| {
                (0..d).map(|j| m[(i, j)] * w[j]).sum::<Complex64>()
            });
            let b: Complex64 = (0..d).map(|i| w[i] * wm[i]).sum();
            let half_phase = Complex64::from_polar(1.0, 0.5 * b.arg());
            let a = CVec::from_fn(d, |i, _| w[i].conj() * half_phase);
            pairs.push((spectrum[idx], a));
        } else {
            // Joint sub-Takagi of the cluster block B = V_cᵀ M V_c.
            let mc = cluster.len();
            let vc = CMat::from_fn(d, mc, |i, k| singular_pairs[cluster[k]].1[i]);
            let b = vc.transpose() * &m * &vc;
            for (s, g) in takagi_block(&b, rank_floor) {
                let a = CVec::from_fn(d, |i, _| {
                    (0..mc).map(|k| vc[(i, k)].conj() * g[k]).sum::<Complex64>()
                });
                pairs.push((s, a));
            }
        }
    }
    // Drop anything the block step kept but the global rank floor rejects.
    pairs.retain(|(s, _)| *s > rank_floor);

    for (_, a) in pairs.iter_mut() {
        canonicalize_sign(a);
    }
    pairs.sort_by(|(s1, a1), (s2, a2)| {
        s1.total_cmp(s2).then_with(|| {
            for (x, y) in a1.iter().zip(a2.iter()) {
                let ord = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
                if ord != std::cmp::Ordering::Equal {
                    return ord;
                }
            }
            std::cmp::Ordering::Equal
        })
    });

    Ok(SymmetricSchmidt {
        rank: pairs.len(),
        coeffs: pairs.iter().map(|(s, _)| *s).collect(),
        vectors: pairs.into_iter().map(|(_, a)| a).collect(),
        spectrum,
    })
}
