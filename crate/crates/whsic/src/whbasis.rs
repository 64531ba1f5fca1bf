//! WH-type orthonormal bases of the tensor square H ⊗ H.
//!
//! A *WH-type basis* is an orthonormal basis of H ⊗ H of the form
//! `{𝕋_a b}` for a single fiducial vector `b`, where `𝕋_a = T_a ⊗ T_a` are
//! the doubled displacements. Such bases exist in every dimension and are
//! completely parametrized by small unitary blocks, one per *class* of
//! invariant subspaces of the doubled action:
//!
//! * **odd d** — H ⊗ H splits into d invariant subspaces of dimension d,
//!   labeled `H_s` for `s ∈ {0, ±1, …, ±(d−1)/2}`: the diagonal space
//!   (`s = 0`, spanned by `|j,j⟩`) and, for each offset, a symmetric
//!   (`s > 0`) and antisymmetric (`s < 0`) pairing space. One d×d unitary
//!   block parametrizes the bases.
//! * **even d = 2h** — each pairing space splits in half, giving 2d
//!   invariant subspaces `H_s^{(α,β)}` of dimension h, where
//!   `α = (−1)^s ∈ {±1}` tracks which clock eigenvalues appear and
//!   `β ∈ {±1}` is the sign picked up by cycling h steps with `S ⊗ S`.
//!   The four classes `(α, β)` each carry one h×h unitary block.
//!
//! The member subspaces come with *canonical isometries* `O_l` onto them
//! that intertwine the doubled clock and shift with small clock and shift
//! matrices uniformly inside each class; all higher constructions (building
//! and decomposing fiducials, the K-involutions that swap subspaces, the
//! block-sum unitaries) are phrased through these isometries.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::heisenberg::{double_displacement_apply, lattice_points, LatticeIndex, PhaseConstants};
use crate::linalg::{
    cr, exp_i_hermitian, haar_unitary, max_abs, random_hermitian, unitarity_residual, CMat, CVec,
};
use crate::symspace::tensor_square_dim;

/// Unitarity tolerance used when constructing parameter blocks.
pub const BLOCK_UNITARITY_TOL: f64 = 1e-12;

/// Label of one invariant subspace of the doubled displacement action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    /// Odd dimensions: `H_s` with `s ∈ {0, ±1, …, ±(d−1)/2}`.
    Odd {
        /// Signed pairing offset; the sign selects symmetric (+) or
        /// antisymmetric (−) combinations.
        s: i64,
    },
    /// Even dimensions: `H_s^{(α,β)}` with `|s| ≤ d/2`.
    Even {
        /// Signed pairing offset.
        s: i64,
        /// Clock parity `α = (−1)^s`.
        alpha: i8,
        /// Shift cycling sign `(S⊗S)^{d/2} = β` on the subspace.
        beta: i8,
    },
}

impl Label {
    /// Signed pairing offset of the subspace.
    pub fn s(&self) -> i64 {
        match self {
            Label::Odd { s } | Label::Even { s, .. } => *s,
        }
    }

    /// Whether the subspace lies inside the symmetric subspace H_sym.
    pub fn is_symmetric(&self) -> bool {
        self.s() >= 0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Odd { s } => write!(f, "H[{s:+}]"),
            Label::Even { s, alpha, beta } => write!(f, "H[{s:+};{alpha:+},{beta:+}]"),
        }
    }
}

/// The even-dimension classes in canonical order.
const EVEN_CLASSES: [(i8, i8); 4] = [(1, 1), (-1, 1), (1, -1), (-1, -1)];

fn even_class_index(alpha: i8, beta: i8) -> usize {
    EVEN_CLASSES
        .iter()
        .position(|&(a, b)| (a, b) == (alpha, beta))
        .expect("class signs are ±1")
}

/// Decomposition of H ⊗ H into the invariant subspaces of `{T_a ⊗ T_a}`,
/// carrying one isometry (d² × subspace-dim matrix of orthonormal columns)
/// per subspace.
#[derive(Clone, Debug)]
pub struct SubspaceChart {
    d: usize,
    labels: Vec<Label>,
    isometries: Vec<CMat>,
    canonical: bool,
}

/// Enumerates the labels in canonical order.
///
/// Odd d: `0, +1, −1, +2, −2, …`. Even d: the four classes
/// `(α,β) = (+,+), (−,+), (+,−), (−,−)` in that order, each sorted by |s|
/// ascending with + before −.
fn enumerate_labels(d: usize) -> Vec<Label> {
    if d % 2 == 1 {
        let mut labels = vec![Label::Odd { s: 0 }];
        for i in 1..=(d as i64 - 1) / 2 {
            labels.push(Label::Odd { s: i });
            labels.push(Label::Odd { s: -i });
        }
        labels
    } else {
        let h = d as i64 / 2;
        let mut labels = Vec::with_capacity(2 * d);
        for &(alpha, beta) in EVEN_CLASSES.iter() {
            let mut class: Vec<Label> = Vec::new();
            // s = 0 exists for α = +1 with either β.
            if alpha == 1 {
                class.push(Label::Even { s: 0, alpha, beta });
            }
            // 0 < |s| < h with α = (−1)^s, either β.
            for s in 1..h {
                if (s % 2 == 0) == (alpha == 1) {
                    class.push(Label::Even { s, alpha, beta });
                    class.push(Label::Even { s: -s, alpha, beta });
                }
            }
            // |s| = h ties β to the sign of s and has α = (−1)^h.
            let alpha_h = if h % 2 == 0 { 1 } else { -1 };
            if alpha == alpha_h {
                let s = if beta == 1 { h } else { -h };
                class.push(Label::Even { s, alpha, beta });
            }
            debug_assert_eq!(class.len(), h as usize);
            labels.extend(class);
        }
        labels
    }
}

/// Spanning vector `w_j` of the even-dimension subspace `H_s^{(α,β)}`,
/// `j ∈ [0, h)`. Eigenvector of C⊗C with eigenvalue `ω^{2j+s}`, and
/// `(S⊗S) w_j = w_{j+1}` with `w_h = β w_0`.
fn even_spanning_vector(d: usize, label: Label, j: usize) -> CVec {
    let Label::Even { s, beta, .. } = label else {
        unreachable!("even spanning vectors need even labels");
    };
    let h = d / 2;
    let dd = d as i64;
    let jj = j as i64;
    let beta_f = beta as f64;
    let idx =
        |row: i64, col: i64| -> usize { (row.rem_euclid(dd) * dd + col.rem_euclid(dd)) as usize };
    let mut w = CVec::zeros(d * d);
    if s == 0 {
        let inv = 1.0 / std::f64::consts::SQRT_2;
        w[idx(jj, jj)] = cr(inv);
        w[idx(jj + h as i64, jj + h as i64)] = cr(beta_f * inv);
    } else if s.unsigned_abs() as usize == h {
        let sigma = if s > 0 { 1.0 } else { -1.0 };
        let inv = 1.0 / std::f64::consts::SQRT_2;
        w[idx(jj, jj + h as i64)] = cr(inv);
        w[idx(jj + h as i64, jj)] = cr(sigma * inv);
    } else {
        let sigma = if s > 0 { 1.0 } else { -1.0 };
        let hh = h as i64;
        w[idx(jj, jj + s)] = cr(0.5);
        w[idx(jj + s, jj)] = cr(sigma * 0.5);
        w[idx(jj + hh, jj + s + hh)] = cr(beta_f * 0.5);
        w[idx(jj + s + hh, jj + hh)] = cr(sigma * beta_f * 0.5);
    }
    w
}

/// Raw isometry (columns = spanning vectors in construction order) for one
/// subspace.
fn raw_isometry(d: usize, label: Label) -> CMat {
    match label {
        Label::Odd { s } => {
            let dd = d as i64;
            let mut o = CMat::zeros(d * d, d);
            for j in 0..dd {
                set_odd_pair_column(&mut o, d, s, j, j as usize);
            }
            o
        }
        Label::Even { .. } => {
            let h = d / 2;
            let mut o = CMat::zeros(d * d, h);
            for j in 0..h {
                o.set_column(j, &even_spanning_vector(d, label, j));
            }
            o
        }
    }
}

/// Writes the odd-dimension pairing vector for cell `j` of `H_s` into column
/// `col`: `|j,j⟩` for s = 0, `(|j,j+s⟩ + sgn(s)|j+s,j⟩)/√2` otherwise.
fn set_odd_pair_column(o: &mut CMat, d: usize, s: i64, j: i64, col: usize) {
    let dd = d as i64;
    let idx =
        |row: i64, colk: i64| -> usize { (row.rem_euclid(dd) * dd + colk.rem_euclid(dd)) as usize };
    if s == 0 {
        o[(idx(j, j), col)] = cr(1.0);
    } else {
        let inv = 1.0 / std::f64::consts::SQRT_2;
        let sigma = if s > 0 { 1.0 } else { -1.0 };
        o[(idx(j, j + s), col)] = cr(inv);
        o[(idx(j + s, j), col)] = cr(sigma * inv);
    }
}

/// Builds the chart of invariant subspaces with raw (construction-order)
/// isometries. Most callers want [`canonical_isometries`] applied on top;
/// [`SubspaceChart::canonical`] does both.
pub fn build_chart(d: usize) -> Result<SubspaceChart> {
    PhaseConstants::new(d)?;
    let labels = enumerate_labels(d);
    let isometries = labels.iter().map(|&l| raw_isometry(d, l)).collect();
    Ok(SubspaceChart {
        d,
        labels,
        isometries,
        canonical: false,
    })
}

/// Replaces the chart's isometries with the canonical ones.
///
/// * Odd d: `O_s e_m` is the pairing vector at cell `j = (m − s·(d+1)/2) mod d`,
///   which makes every subspace intertwine identically:
///   `O_s†(C⊗C)O_s = C²` and `O_s†(S⊗S)O_s = S` (no phases).
/// * Even d: the first column is the spanning vector whose C⊗C eigenvalue is
///   `ω^{(1−α)/2}` (sign-fixed so its first nonzero entry is positive), and
///   successive columns follow by `v_{k+1} = ω^{−(1−β)/2} (S⊗S) v_k`, giving
///   `O†(C⊗C)O = ω^{(1−α)/2} C_h` and `O†(S⊗S)O = ω^{(1−β)/2} S_h`.
///
/// Every isometry is self-checked against its intertwining relations before
/// the chart is returned.
pub fn canonical_isometries(chart: SubspaceChart) -> Result<SubspaceChart> {
    let d = chart.d;
    let pc = PhaseConstants::new(d)?;
    let dd = d as i64;
    let mut isometries = Vec::with_capacity(chart.labels.len());
    for &label in &chart.labels {
        let o = match label {
            Label::Odd { s } => {
                let inv2 = (dd + 1) / 2;
                let mut o = CMat::zeros(d * d, d);
                for m in 0..dd {
                    let j = (m - s * inv2).rem_euclid(dd);
                    set_odd_pair_column(&mut o, d, s, j, m as usize);
                }
                o
            }
            Label::Even { s, alpha, beta } => {
                let h = d / 2;
                // Anchor column: C⊗C eigenvalue ω^{2j₀+s} = ω^{(1−α)/2}.
                let r = ((1 - alpha as i64) / 2 - s).rem_euclid(dd);
                debug_assert_eq!(r % 2, 0, "α = (−1)^s makes the residue even");
                let j0 = ((r / 2) as usize) % h;
                let mut v = even_spanning_vector(d, label, j0);
                if let Some(first) = v.iter().find(|z| z.norm() > 1e-9) {
                    if first.re < 0.0 {
                        v = -v;
                    }
                }
                let cycle_phase = pc.omega_pow(-(1 - beta as i64) / 2);
                let mut o = CMat::zeros(d * d, h);
                for k in 0..h {
                    o.set_column(k, &v);
                    if k + 1 < h {
                        v = shift_both_factors(d, &v) * cycle_phase;
                    }
                }
                o
            }
        };
        let (alpha, beta) = match label {
            Label::Odd { .. } => (1i8, 1i8),
            Label::Even { alpha, beta, .. } => (alpha, beta),
        };
        let residual = intertwining_residual(d, &o, alpha, beta)?;
        if residual > 1e-10 {
            return Err(Error::IntertwinerCheck { residual });
        }
        isometries.push(o);
    }
    Ok(SubspaceChart {
        d,
        labels: chart.labels,
        isometries,
        canonical: true,
    })
}

/// `(S ⊗ S) v` on the tensor square.
fn shift_both_factors(d: usize, v: &CVec) -> CVec {
    let mut y = CVec::zeros(d * d);
    for i in 0..d {
        for j in 0..d {
            y[((i + 1) % d) * d + ((j + 1) % d)] = v[i * d + j];
        }
    }
    y
}

/// `(C ⊗ C) v` on the tensor square.
fn clock_both_factors(d: usize, v: &CVec) -> Result<CVec> {
    let pc = PhaseConstants::new(d)?;
    let mut y = CVec::zeros(d * d);
    for i in 0..d {
        for j in 0..d {
            y[i * d + j] = pc.omega_pow((i + j) as i64) * v[i * d + j];
        }
    }
    Ok(y)
}

/// Max-entry residual of the canonical intertwining relations
/// `O†(C⊗C)O = ω^{(1−α)/2} C_m` and `O†(S⊗S)O = ω^{(1−β)/2} S_m`,
/// where m is the subspace dimension and `C_m|k⟩ = ω^{2k}|k⟩`.
fn intertwining_residual(d: usize, o: &CMat, alpha: i8, beta: i8) -> Result<f64> {
    let pc = PhaseConstants::new(d)?;
    let m = o.ncols();
    let mut residual = 0.0_f64;
    for k in 0..m {
        let col: CVec = o.column(k).into();
        // Clock: (C⊗C) O e_k = ω^{(1−α)/2 + 2k} O e_k.
        let want_c = &col * pc.omega_pow((1 - alpha as i64) / 2 + 2 * k as i64);
        let got_c = clock_both_factors(d, &col)?;
        residual = residual.max((got_c - want_c).norm());
        // Shift: (S⊗S) O e_k = ω^{(1−β)/2} O e_{k+1 mod m}.
        let next: CVec = o.column((k + 1) % m).into();
        let want_s = next * pc.omega_pow((1 - beta as i64) / 2);
        let got_s = shift_both_factors(d, &col);
        residual = residual.max((got_s - want_s).norm());
    }
    Ok(residual)
}

impl SubspaceChart {
    /// Chart with canonical isometries (the common entry point).
    pub fn canonical(d: usize) -> Result<Self> {
        canonical_isometries(build_chart(d)?)
    }

    /// The dimension d of the single factor H.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Dimension of each invariant subspace: d for odd d, d/2 for even d.
    pub fn subspace_dim(&self) -> usize {
        if self.d % 2 == 1 {
            self.d
        } else {
            self.d / 2
        }
    }

    /// Number of parameter classes: 1 for odd d, 4 for even d.
    pub fn class_count(&self) -> usize {
        if self.d % 2 == 1 {
            1
        } else {
            4
        }
    }

    /// Whether [`canonical_isometries`] has been applied.
    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    /// All labels in canonical enumeration order.
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Position of a label in the enumeration.
    pub fn index_of(&self, label: Label) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or(Error::UnknownLabel {
                label: label.to_string(),
                d: self.d,
            })
    }

    /// Isometry onto the subspace at enumeration position `idx`.
    pub fn isometry(&self, idx: usize) -> &CMat {
        &self.isometries[idx]
    }

    /// Class index of a label (always 0 for odd d).
    pub fn class_of(&self, label: Label) -> usize {
        match label {
            Label::Odd { .. } => 0,
            Label::Even { alpha, beta, .. } => even_class_index(alpha, beta),
        }
    }

    /// Enumeration positions of all members of one class, in order.
    pub fn class_members(&self, class: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| self.class_of(l) == class)
            .map(|(i, _)| i)
            .collect()
    }

    /// Enumeration position of the marked subspace of a class (its first
    /// member: the diagonal space for odd d, the minimal-|s| member for
    /// even d).
    pub fn marked_index(&self, class: usize) -> usize {
        self.class_members(class)[0]
    }

    /// Enumeration positions of the subspaces inside H_sym (s ≥ 0).
    pub fn symmetric_indices(&self) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_symmetric())
            .map(|(i, _)| i)
            .collect()
    }

    /// Orthogonal projector `O_l O_l†` onto the subspace at position `idx`.
    pub fn projector(&self, idx: usize) -> CMat {
        let o = &self.isometries[idx];
        o * o.adjoint()
    }

    fn require_canonical(&self) -> Result<()> {
        if self.canonical {
            Ok(())
        } else {
            Err(Error::ChartNotCanonical)
        }
    }

    fn require_dim(&self, d: usize) -> Result<()> {
        if self.d == d {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.d,
                got: d,
            })
        }
    }
}

/// The involution `K_l = O_• O_l† + O_l O_•† + (I − P_• − P_l)` that swaps
/// the subspace of `label` with the marked subspace of its class and fixes
/// everything else. Hermitian, squares to the identity, and commutes with
/// every doubled displacement; in particular it maps WH-type basis
/// fiducials to WH-type basis fiducials.
pub fn k_operator(chart: &SubspaceChart, label: Label) -> Result<CMat> {
    chart.require_canonical()?;
    let idx = chart.index_of(label)?;
    let marked = chart.marked_index(chart.class_of(label));
    let n = chart.d * chart.d;
    if idx == marked {
        return Ok(CMat::identity(n, n));
    }
    let o_marked = &chart.isometries[marked];
    let o_l = &chart.isometries[idx];
    let mut k = CMat::identity(n, n);
    k += o_marked * o_l.adjoint();
    k += o_l * o_marked.adjoint();
    k -= chart.projector(marked);
    k -= chart.projector(idx);
    Ok(k)
}

/// Fiducial vector of a WH-type orthonormal basis `{𝕋_a b}` of H ⊗ H.
#[derive(Clone, Debug, PartialEq)]
pub struct FiducialBasisVector {
    d: usize,
    vector: CVec,
}

impl FiducialBasisVector {
    /// Wraps a raw d²-vector without verification (callers that need a
    /// membership guarantee should run [`is_wh_fiducial`]).
    pub fn from_vector(vector: CVec) -> Result<Self> {
        let d = tensor_square_dim(vector.len())?;
        Ok(Self { d, vector })
    }

    /// Dimension d of the single factor.
    pub fn d(&self) -> usize {
        self.d
    }

    /// The underlying d²-vector.
    pub fn vector(&self) -> &CVec {
        &self.vector
    }

    /// Consumes self, returning the vector.
    pub fn into_vector(self) -> CVec {
        self.vector
    }
}

/// Canonical WH-type basis fiducial `b₀ = |0⟩ ⊗ F|0⟩`, whose orbit is the
/// product basis `{|a₁⟩ ⊗ F|a₂⟩}` (the doubled displacements reproduce it
/// with no extra phases).
pub fn canonical_fiducial(d: usize) -> Result<FiducialBasisVector> {
    PhaseConstants::new(d)?;
    let mut v = CVec::zeros(d * d);
    let inv = cr(1.0 / (d as f64).sqrt());
    for j in 0..d {
        v[j] = inv;
    }
    Ok(FiducialBasisVector { d, vector: v })
}

/// Outcome of the WH-type basis membership test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MembershipReport {
    /// True when both residuals fall below the tolerance.
    pub pass: bool,
    /// `max_{a≠0} |⟨v|𝕋_a v⟩|` over the fundamental lattice cell.
    pub max_overlap: f64,
    /// `| ‖v‖ − 1 |`.
    pub norm_residual: f64,
}

/// Tests whether `{𝕋_a v}` is an orthonormal basis: `v` must be a unit
/// vector whose doubled-displacement overlaps all vanish.
pub fn is_wh_fiducial(v: &CVec, tol: f64) -> Result<MembershipReport> {
    let d = tensor_square_dim(v.len())?;
    PhaseConstants::new(d)?;
    let norm_residual = (v.norm() - 1.0).abs();
    let mut max_overlap = 0.0_f64;
    for a in lattice_points(d) {
        if a == LatticeIndex::ZERO {
            continue;
        }
        let overlap = v.dotc(&double_displacement_apply(d, a, v)?);
        max_overlap = max_overlap.max(overlap.norm());
    }
    Ok(MembershipReport {
        pass: max_overlap < tol && norm_residual < tol,
        max_overlap,
        norm_residual,
    })
}

/// Unitary block parameters of a WH-type basis: one d×d block for odd d,
/// four (d/2)×(d/2) blocks (classes `(+,+), (−,+), (+,−), (−,−)`) for even d.
#[derive(Clone, Debug, PartialEq)]
pub struct WhBasisParams {
    d: usize,
    blocks: Vec<CMat>,
}

/// Expected `(block count, block size)` for dimension d.
pub fn block_shape(d: usize) -> (usize, usize) {
    if d % 2 == 1 {
        (1, d)
    } else {
        (4, d / 2)
    }
}

impl WhBasisParams {
    /// Validates and wraps unitary blocks. Each block must be unitary within
    /// `tol` (use [`BLOCK_UNITARITY_TOL`] for freshly constructed unitaries).
    pub fn new(d: usize, blocks: Vec<CMat>, tol: f64) -> Result<Self> {
        PhaseConstants::new(d)?;
        let (count, size) = block_shape(d);
        if blocks.len() != count || blocks.iter().any(|b| b.shape() != (size, size)) {
            return Err(Error::BlockShape {
                expected: count,
                size,
                got: format!(
                    "{} blocks of shapes {:?}",
                    blocks.len(),
                    blocks.iter().map(|b| b.shape()).collect::<Vec<_>>()
                ),
            });
        }
        for b in &blocks {
            let residual = unitarity_residual(b);
            if residual > tol {
                return Err(Error::NotUnitary { residual, tol });
            }
        }
        Ok(Self { d, blocks })
    }

    /// Identity blocks.
    pub fn identity(d: usize) -> Result<Self> {
        let (count, size) = block_shape(d);
        PhaseConstants::new(d)?;
        Ok(Self {
            d,
            blocks: vec![CMat::identity(size, size); count],
        })
    }

    /// Independent Haar-random blocks.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Self> {
        let (count, size) = block_shape(d);
        PhaseConstants::new(d)?;
        Ok(Self {
            d,
            blocks: (0..count).map(|_| haar_unitary(size, rng)).collect(),
        })
    }

    /// Blocks multiplied by `exp(i·scale·H)` with independent random
    /// Hermitian H of unit-scale entries — a small deterministic-seed
    /// perturbation used for warm starts.
    pub fn perturbed<R: Rng + ?Sized>(&self, scale: f64, rng: &mut R) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b * exp_i_hermitian(&(random_hermitian(b.nrows(), rng) * cr(scale))))
            .collect();
        Self { d: self.d, blocks }
    }

    /// Dimension d.
    pub fn d(&self) -> usize {
        self.d
    }

    /// The unitary blocks in class order.
    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    /// Wraps blocks known to be unitary (e.g. products of validated blocks
    /// with exact matrix exponentials) without the residual check.
    pub(crate) fn from_validated(d: usize, blocks: Vec<CMat>) -> Self {
        Self { d, blocks }
    }
}

/// Normalization 1/√d (odd) or 1/√(2d) (even): each of the `class_count ·
/// subspace_dim` columns contributes one unit vector.
fn build_scale(d: usize) -> f64 {
    let (count, size) = block_shape(d);
    1.0 / ((count * size) as f64).sqrt()
}

/// Builds the WH-type basis fiducial determined by unitary blocks:
///
/// ```text
/// b = scale · Σ_c Σ_k O_{l_{c,k}} (U_c e_k)
/// ```
///
/// where `l_{c,k}` is the k-th member of class c and the scale is `1/√d`
/// (odd) or `1/√(2d)` (even). Every choice of unitary blocks gives a
/// member, and [`decompose_fiducial`] inverts the construction exactly.
pub fn build_fiducial(
    params: &WhBasisParams,
    chart: &SubspaceChart,
) -> Result<FiducialBasisVector> {
    chart.require_canonical()?;
    chart.require_dim(params.d)?;
    let d = chart.d;
    let scale = cr(build_scale(d));
    let mut v = CVec::zeros(d * d);
    for class in 0..chart.class_count() {
        let block = &params.blocks[class];
        for (k, &idx) in chart.class_members(class).iter().enumerate() {
            let col: CVec = block.column(k).into();
            v += chart.isometry(idx) * col * scale;
        }
    }
    Ok(FiducialBasisVector { d, vector: v })
}

/// Recovers the unitary blocks of a WH-type basis fiducial:
/// column k of block c is `O_{l_{c,k}}† v / scale`. The input must pass
/// [`is_wh_fiducial`] at `tol`; the recovered blocks are unitary to the
/// same accuracy.
pub fn decompose_fiducial(v: &CVec, chart: &SubspaceChart, tol: f64) -> Result<WhBasisParams> {
    chart.require_canonical()?;
    let d = tensor_square_dim(v.len())?;
    chart.require_dim(d)?;
    let report = is_wh_fiducial(v, tol)?;
    if !report.pass {
        return Err(Error::NotWhFiducial {
            max_overlap: report.max_overlap,
            norm_residual: report.norm_residual,
            tol,
        });
    }
    let scale = build_scale(d);
    let size = chart.subspace_dim();
    let mut blocks = Vec::with_capacity(chart.class_count());
    for class in 0..chart.class_count() {
        let mut block = CMat::zeros(size, size);
        for (k, &idx) in chart.class_members(class).iter().enumerate() {
            let col = chart.isometry(idx).adjoint() * v * cr(1.0 / scale);
            block.set_column(k, &col);
        }
        blocks.push(block);
    }
    // Membership at tol makes the recovered blocks unitary at ~tol; allow
    // slack for the constant.
    WhBasisParams::new(d, blocks, (100.0 * tol).max(BLOCK_UNITARITY_TOL))
}

/// The block-sum unitary `U = Σ_l O_l U_{class(l)} O_l†`.
///
/// It acts on fiducials as the parameter action: if `b_V` is the member
/// built from blocks `V_c`, then `U b_V = b_{U·V}` (blockwise products).
/// `U` commutes with every `T_a ⊗ T_{−a}` and, equivalently, lies in the
/// span of the doubled displacements `{𝕋_a}`.
pub fn uwh_from_blocks(chart: &SubspaceChart, params: &WhBasisParams) -> Result<CMat> {
    chart.require_canonical()?;
    chart.require_dim(params.d)?;
    let d = chart.d;
    let n = d * d;
    let mut u = CMat::zeros(n, n);
    for class in 0..chart.class_count() {
        let block = &params.blocks[class];
        for &idx in &chart.class_members(class) {
            let o = chart.isometry(idx);
            u += o * block * o.adjoint();
        }
    }
    Ok(u)
}

/// Coefficients `c_a = Tr(𝕋_a† U)/d²` of the expansion of U in the doubled
/// displacements (an orthogonal operator basis of their span), in
/// `lattice_points` order.
pub fn double_displacement_coefficients(u: &CMat) -> Result<Vec<Complex64>> {
    let n = u.nrows();
    let d = tensor_square_dim(n)?;
    let mut coeffs = Vec::with_capacity(d * d);
    for a in lattice_points(d) {
        // Tr(𝕋_a† U) walks the d² nonzero entries of 𝕋_a.
        let mut e = CVec::zeros(n);
        let mut trace = Complex64::default();
        for p in 0..n {
            e[p] = cr(1.0);
            let col = double_displacement_apply(d, a, &e)?;
            e[p] = cr(0.0);
            // ⟨𝕋_a e_p, U e_p⟩ accumulated over p gives Tr(𝕋_a†U).
            let ucol: CVec = u.column(p).into();
            trace += col.dotc(&ucol);
        }
        coeffs.push(trace / cr((d * d) as f64));
    }
    Ok(coeffs)
}

/// Rebuilds `Σ_a c_a 𝕋_a` from expansion coefficients in
/// `lattice_points` order.
pub fn double_displacement_combination(d: usize, coeffs: &[Complex64]) -> Result<CMat> {
    if coeffs.len() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            got: coeffs.len(),
        });
    }
    let n = d * d;
    let mut u = CMat::zeros(n, n);
    let mut e = CVec::zeros(n);
    for (c, a) in coeffs.iter().zip(lattice_points(d)) {
        if c.norm() == 0.0 {
            continue;
        }
        for p in 0..n {
            e[p] = cr(1.0);
            let col = double_displacement_apply(d, a, &e)?;
            e[p] = cr(0.0);
            for q in 0..n {
                if col[q] != Complex64::default() {
                    u[(q, p)] += c * col[q];
                }
            }
        }
    }
    Ok(u)
}

/// `‖U − Σ_a c_a 𝕋_a‖_max` with the projection coefficients of
/// [`double_displacement_coefficients`]: zero exactly when U lies in the
/// span of the doubled displacements.
pub fn double_displacement_span_residual(u: &CMat) -> Result<f64> {
    let d = tensor_square_dim(u.nrows())?;
    let coeffs = double_displacement_coefficients(u)?;
    let rebuilt = double_displacement_combination(d, &coeffs)?;
    Ok(max_abs(&(u - rebuilt)))
}

/// The unique unitary in the span of the doubled displacements carrying one
/// WH-type basis onto another:
///
/// ```text
/// U = Σ_a ⟨𝕋_a b₁ | b₂⟩ 𝕋_a,    U b₁ = b₂.
/// ```
///
/// Both inputs must pass [`is_wh_fiducial`] at `tol`; U is then unitary to
/// comparable accuracy and maps `b₁` to `b₂` exactly by the resolution of
/// the identity over the first basis.
pub fn connecting_unitary(b1: &CVec, b2: &CVec, tol: f64) -> Result<CMat> {
    let d = tensor_square_dim(b1.len())?;
    if b2.len() != b1.len() {
        return Err(Error::DimensionMismatch {
            expected: b1.len(),
            got: b2.len(),
        });
    }
    for v in [b1, b2] {
        let report = is_wh_fiducial(v, tol)?;
        if !report.pass {
            return Err(Error::NotWhFiducial {
                max_overlap: report.max_overlap,
                norm_residual: report.norm_residual,
                tol,
            });
        }
    }
    let mut coeffs = Vec::with_capacity(d * d);
    for a in lattice_points(d) {
        let ta_b1 = double_displacement_apply(d, a, b1)?;
        coeffs.push(ta_b1.dotc(b2));
    }
    double_displacement_combination(d, &coeffs)
}
