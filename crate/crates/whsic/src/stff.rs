//! Symmetric tight fusion frames from SIC fiducials (odd dimensions).
//!
//! For odd d, a SIC fiducial `f` determines unit-modulus phases
//! `e^{iθ_a} = √(d+1)·⟨f|T_{−a}f⟩` and, for any integer 2×2 matrix X with
//! `det X ≡ 2⁻¹ (mod d)`, a rank-(d+1)/2 projector
//!
//! ```text
//! Π⁺ = (d+1)/(2d) · I + (1/2d) · Σ_{a≠0} e^{2iθ_{Xa}} T_a.
//! ```
//!
//! Its displacement orbit `{T_a Π⁺ T_a†}` is a *symmetric tight fusion
//! frame*: all pairwise trace inner products coincide
//! (`Tr(Π_a Π_b) = ¼(d+2+d·δ_ab)`) and the orbit resolves the identity
//! (`Σ_a Π_a = d(d+1)/2·I`). The complement `I − Π⁺` is one as well, with
//! rank (d−1)/2 and pairwise traces `¼(d−2+d·δ_ab)`.
//!
//! The same projector also arises geometrically: the components of `f⊗f`
//! in the symmetric invariant subspaces of the tensor square, carried to
//! the diagonal subspace and pulled back through its canonical isometry,
//! sum to exactly `Π⁺` for `X = diag(1, 2⁻¹ mod d)` — tying the fusion
//! frame to the SIC lift.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::heisenberg::{
    displacement, displacement_apply, lattice_points, overlap_table, LatticeIndex, PhaseConstants,
};
use crate::linalg::{cr, hermiticity_residual, max_abs, CMat, CVec};
use crate::sicframes::{product_vector, verify_sic_overlaps};
use crate::whbasis::SubspaceChart;

fn require_odd(d: usize) -> Result<()> {
    PhaseConstants::new(d)?;
    if d.is_multiple_of(2) {
        return Err(Error::EvenDimension(d));
    }
    Ok(())
}

/// The multiplicative inverse of 2 modulo odd d, namely (d+1)/2.
pub fn half_mod(d: usize) -> i64 {
    (d as i64 + 1) / 2
}

/// Phases `θ_a` of a SIC fiducial: `e^{iθ_a} = √(d+1)·⟨f|T_{−a}f⟩` for
/// `a ≠ 0`, with `θ_(0,0) = 0`.
#[derive(Clone, Debug)]
pub struct PhaseTable {
    d: usize,
    theta: Vec<f64>,
}

impl PhaseTable {
    /// Dimension d.
    pub fn d(&self) -> usize {
        self.d
    }

    /// `θ_a` with the index reduced to the fundamental cell (valid because
    /// odd-dimension displacements are d-periodic).
    pub fn theta(&self, a: LatticeIndex) -> f64 {
        let d = self.d as i64;
        let k1 = a.k1.rem_euclid(d) as usize;
        let k2 = a.k2.rem_euclid(d) as usize;
        self.theta[k1 * self.d + k2]
    }
}

/// Extracts the phase table of a SIC fiducial in odd dimension d. Each
/// `√(d+1)·⟨f|T_{−a}f⟩` must have unit modulus within `tol` (this is the
/// SIC property in disguise), otherwise the input is rejected.
pub fn sic_phases(f: &CVec, tol: f64) -> Result<PhaseTable> {
    let d = f.len();
    require_odd(d)?;
    let scale = (d as f64 + 1.0).sqrt();
    let overlaps = overlap_table(d, f)?;
    let mut theta = vec![0.0_f64; d * d];
    for a in lattice_points(d) {
        if a == LatticeIndex::ZERO {
            continue;
        }
        // ⟨f|T_{−a}f⟩ = conj(⟨f|T_a f⟩), and the table stores ⟨f|T_a f⟩ at a.
        // Read the entry at −a directly to keep the definition literal.
        let neg = LatticeIndex::new((-a.k1).rem_euclid(d as i64), (-a.k2).rem_euclid(d as i64));
        let z = overlaps[(neg.k1 as usize) * d + neg.k2 as usize] * scale;
        if (z.norm() - 1.0).abs() > tol {
            return Err(Error::NotSicFiducial {
                residual: (z.norm() - 1.0).abs(),
                tol,
            });
        }
        theta[(a.k1 as usize) * d + a.k2 as usize] = z.arg();
    }
    Ok(PhaseTable { d, theta })
}

/// Integer 2×2 lattice re-indexing matrix with `det ≡ 2⁻¹ (mod d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeMatrix {
    d: usize,
    entries: [[i64; 2]; 2],
}

impl LatticeMatrix {
    /// Validates the determinant congruence `det X ≡ (d+1)/2 (mod d)`.
    pub fn new(d: usize, entries: [[i64; 2]; 2]) -> Result<Self> {
        require_odd(d)?;
        let det = entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0];
        let det_mod = det.rem_euclid(d as i64);
        let required = half_mod(d);
        if det_mod != required {
            return Err(Error::InvalidLatticeMatrix {
                det_mod,
                required,
                d,
            });
        }
        Ok(Self { d, entries })
    }

    /// The canonical diagonal choice `diag(1, 2⁻¹ mod d)`.
    pub fn diag_canonical(d: usize) -> Result<Self> {
        Self::new(d, [[1, 0], [0, half_mod(d)]])
    }

    /// Dimension d.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Matrix entries row-major.
    pub fn entries(&self) -> [[i64; 2]; 2] {
        self.entries
    }

    /// `X·a` reduced mod d.
    pub fn apply(&self, a: LatticeIndex) -> LatticeIndex {
        let d = self.d as i64;
        LatticeIndex::new(
            (self.entries[0][0] * a.k1 + self.entries[0][1] * a.k2).rem_euclid(d),
            (self.entries[1][0] * a.k1 + self.entries[1][1] * a.k2).rem_euclid(d),
        )
    }
}

/// The fusion-frame projector of a SIC fiducial:
///
/// ```text
/// Π⁺ = (d+1)/(2d)·I + (1/2d)·Σ_{a≠0} e^{2iθ_{Xa}} T_a,
/// ```
///
/// a Hermitian idempotent of trace (d+1)/2 whose displacement orbit is a
/// symmetric tight fusion frame. `f` is verified at `tol` first.
pub fn stff_projector(f: &CVec, x: &LatticeMatrix, tol: f64) -> Result<CMat> {
    let d = f.len();
    require_odd(d)?;
    if x.d() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x.d(),
        });
    }
    let report = verify_sic_overlaps(f, tol)?;
    if !report.pass {
        return Err(Error::NotSicFiducial {
            residual: report.max_deviation.max(report.norm_residual),
            tol,
        });
    }
    let phases = sic_phases(f, tol)?;
    let df = d as f64;
    let mut pi = CMat::identity(d, d) * cr((df + 1.0) / (2.0 * df));
    for a in lattice_points(d) {
        if a == LatticeIndex::ZERO {
            continue;
        }
        let coeff = Complex64::from_polar(1.0, 2.0 * phases.theta(x.apply(a)));
        pi += displacement(d, a)? * (coeff / cr(2.0 * df));
    }
    Ok(pi)
}

/// Deviations of the symmetric tight fusion frame identities for the orbit
/// `{T_a Π T_a†}` of a candidate projector Π of rank r:
///
/// * Π is a Hermitian idempotent of integer trace r;
/// * `Tr(Π_a Π_b) = r(dr−1)/(d²−1)` for all `a ≠ b` (equiangularity);
/// * `Σ_a Π_a = d·r·I` (tightness).
///
/// For `r = (d+1)/2` the pairwise constant is `(d+2)/4`; for the
/// complement rank `(d−1)/2` it is `(d−2)/4`.
#[derive(Clone, Copy, Debug)]
pub struct StffReport {
    /// Dimension d.
    pub d: usize,
    /// Rank inferred from the trace (nearest integer).
    pub rank: usize,
    /// True when every deviation falls below the tolerance.
    pub pass: bool,
    /// `max(‖Π² − Π‖_max, ‖Π† − Π‖_max)`.
    pub projector_residual: f64,
    /// `|Tr Π − rank|`.
    pub trace_deviation: f64,
    /// `max_c | Tr(Π Π_c) − target(c) |` over the fundamental cell
    /// (covariance reduces pairs (a, b) to differences c = b − a).
    pub pairwise_deviation: f64,
    /// `‖Σ_a Π_a − d·r·I‖_max`.
    pub resolution_deviation: f64,
}

/// Verifies the symmetric tight fusion frame identities for Π at `tol`.
pub fn stff_verify(pi: &CMat, tol: f64) -> Result<StffReport> {
    let d = pi.nrows();
    require_odd(d)?;
    if pi.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: pi.ncols(),
        });
    }
    let df = d as f64;
    let trace: Complex64 = (0..d).map(|k| pi[(k, k)]).sum();
    let rank = trace.re.round().max(0.0) as usize;
    let rf = rank as f64;
    let trace_deviation = (trace - cr(rf)).norm();
    let projector_residual = max_abs(&(pi * pi - pi)).max(hermiticity_residual(pi));

    // Pairwise traces depend only on the displacement difference:
    // Tr(Π_a Π_b) = Tr(Π Π_{b−a}).
    let offdiag_target = rf * (df * rf - 1.0) / (df * df - 1.0);
    let mut pairwise_deviation = 0.0_f64;
    let mut resolution = CMat::zeros(d, d);
    for c in lattice_points(d) {
        let t = displacement(d, c)?;
        let pi_c = &t * pi * t.adjoint();
        resolution += &pi_c;
        let product_trace: Complex64 = (pi * &pi_c).diagonal().iter().sum();
        let target = if c == LatticeIndex::ZERO {
            rf
        } else {
            offdiag_target
        };
        pairwise_deviation = pairwise_deviation.max((product_trace - cr(target)).norm());
    }
    let resolution_deviation = max_abs(&(resolution - CMat::identity(d, d) * cr(df * rf)));

    Ok(StffReport {
        d,
        rank,
        pass: projector_residual < tol
            && trace_deviation < tol
            && pairwise_deviation < tol
            && resolution_deviation < tol,
        projector_residual,
        trace_deviation,
        pairwise_deviation,
        resolution_deviation,
    })
}

/// The geometric construction of the fusion-frame projector: with
/// `y_l = √((d+1)/2d)·O_l†(f⊗f)` over the symmetric subspace labels of the
/// chart, returns `d·Σ_l y_l y_l†` — the rank-(d+1)/2 projector carried by
/// the diagonal subspace. Equals
/// `stff_projector(f, diag(1, 2⁻¹ mod d))` exactly.
pub fn geometric_stff(f: &CVec, chart: &SubspaceChart, tol: f64) -> Result<CMat> {
    let d = f.len();
    require_odd(d)?;
    if chart.d() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: chart.d(),
        });
    }
    if !chart.is_canonical() {
        return Err(Error::ChartNotCanonical);
    }
    let report = verify_sic_overlaps(f, tol)?;
    if !report.pass {
        return Err(Error::NotSicFiducial {
            residual: report.max_deviation.max(report.norm_residual),
            tol,
        });
    }
    let ff = product_vector(f, f);
    let scale = cr((0.5 * (d as f64 + 1.0) / d as f64).sqrt());
    let mut pi = CMat::zeros(d, d);
    for idx in chart.symmetric_indices() {
        let y = chart.isometry(idx).adjoint() * &ff * scale;
        for p in 0..d {
            for q in 0..d {
                pi[(p, q)] += y[p] * y[q].conj();
            }
        }
    }
    Ok(pi * cr(d as f64))
}

/// `Tr(Π·T_{(c₁, 2c₂ mod d)})`, the trace pairing of a fusion-frame
/// projector against the displacement that represents `𝕋_c` on the
/// diagonal subspace. For the geometric projector of a SIC fiducial this
/// equals `((d+1)/2)·⟨f|T_c f⟩²`.
pub fn diagonal_pairing(pi: &CMat, c: LatticeIndex) -> Result<Complex64> {
    let d = pi.nrows();
    require_odd(d)?;
    let rep = LatticeIndex::new(c.k1, (2 * c.k2).rem_euclid(d as i64));
    let t = displacement(d, rep)?;
    Ok((pi * t).diagonal().iter().sum())
}

/// Convenience: `T_a f` for phase bookkeeping tests.
pub fn displaced(f: &CVec, a: LatticeIndex) -> Result<CVec> {
    displacement_apply(f.len(), a, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::sicframes::known_fiducial;

    #[test]
    fn phase_table_basics() {
        let fid = known_fiducial(3).unwrap();
        let phases = sic_phases(fid.vector(), 1e-10).unwrap();
        assert_eq!(phases.theta(LatticeIndex::ZERO), 0.0);
        // Conjugate symmetry θ_{−a} = −θ_a.
        for a in lattice_points(3) {
            if a == LatticeIndex::ZERO {
                continue;
            }
            let diff = phases.theta(a) + phases.theta(-a);
            let wrapped = (diff / (2.0 * std::f64::consts::PI)).round();
            assert!(
                (diff - wrapped * 2.0 * std::f64::consts::PI).abs() < 1e-12,
                "phase antisymmetry at {a:?}"
            );
        }
    }

    #[test]
    fn phase_extraction_rejects_non_sic_and_even_dimensions() {
        let mut e0 = CVec::zeros(3);
        e0[0] = cr(1.0);
        assert!(matches!(
            sic_phases(&e0, 1e-9),
            Err(Error::NotSicFiducial { .. })
        ));
        let fid2 = known_fiducial(2).unwrap();
        assert!(matches!(
            sic_phases(fid2.vector(), 1e-9),
            Err(Error::EvenDimension(2))
        ));
    }

    #[test]
    fn lattice_matrix_validation() {
        assert!(LatticeMatrix::new(3, [[1, 0], [0, 2]]).is_ok());
        assert!(LatticeMatrix::new(5, [[1, 0], [0, 3]]).is_ok());
        match LatticeMatrix::new(3, [[1, 0], [0, 1]]) {
            Err(Error::InvalidLatticeMatrix {
                det_mod, required, ..
            }) => {
                assert_eq!((det_mod, required), (1, 2));
            }
            other => panic!("expected InvalidLatticeMatrix, got {other:?}"),
        }
        assert!(matches!(
            LatticeMatrix::new(4, [[1, 0], [0, 1]]),
            Err(Error::EvenDimension(4))
        ));
        let x = LatticeMatrix::diag_canonical(5).unwrap();
        assert_eq!(x.entries(), [[1, 0], [0, 3]]);
        assert_eq!(
            x.apply(LatticeIndex::new(2, 4)),
            LatticeIndex::new(2, 2),
            "X(2,4) = (2, 12 mod 5)"
        );
    }

    #[test]
    fn stff_projector_is_a_trace_half_d_plus_one_idempotent() {
        let fid = known_fiducial(3).unwrap();
        let x = LatticeMatrix::diag_canonical(3).unwrap();
        let pi = stff_projector(fid.vector(), &x, 1e-10).unwrap();
        let trace: Complex64 = pi.diagonal().iter().sum();
        assert!((trace - cr(2.0)).norm() < 1e-12, "trace (d+1)/2 = 2");
        assert!(max_abs(&(&pi * &pi - &pi)) < 1e-12, "idempotent");
        assert!(hermiticity_residual(&pi) < 1e-12, "Hermitian");
    }

    #[test]
    fn stff_orbit_identities_hold_for_several_lattice_matrices() {
        let fid = known_fiducial(3).unwrap();
        let d = 3;
        for entries in [
            [[1, 0], [0, 2]],
            [[1, 1], [0, 2]],
            [[0, 1], [1, 0]],
            [[2, 0], [1, 1]],
        ] {
            let x = LatticeMatrix::new(d, entries).unwrap();
            let pi = stff_projector(fid.vector(), &x, 1e-10).unwrap();
            let report = stff_verify(&pi, 1e-9).unwrap();
            assert_eq!(report.rank, 2);
            assert!(
                report.pass,
                "identities fail for X = {entries:?}: {report:?}"
            );
            // Pairwise target for rank (d+1)/2 is (d+2)/4.
            assert!(report.pairwise_deviation < 1e-12);
        }
    }

    #[test]
    fn complement_is_a_fusion_frame_of_rank_half_d_minus_one() {
        let fid = known_fiducial(3).unwrap();
        let x = LatticeMatrix::diag_canonical(3).unwrap();
        let pi = stff_projector(fid.vector(), &x, 1e-10).unwrap();
        let complement = CMat::identity(3, 3) - &pi;
        let report = stff_verify(&complement, 1e-9).unwrap();
        assert_eq!(report.rank, 1);
        assert!(report.pass, "complement identities: {report:?}");
    }

    #[test]
    fn stff_verify_rejects_a_generic_projector() {
        // Rank-2 projector onto span{e₀, e₁}: covariant identities fail.
        let mut pi = CMat::zeros(3, 3);
        pi[(0, 0)] = cr(1.0);
        pi[(1, 1)] = cr(1.0);
        let report = stff_verify(&pi, 1e-9).unwrap();
        assert!(!report.pass);
        assert!(report.projector_residual < 1e-15, "it is a projector");
        assert!(
            report.pairwise_deviation > 1e-3 || report.resolution_deviation > 1e-3,
            "covariant identities must fail: {report:?}"
        );
    }

    #[test]
    fn geometric_construction_matches_the_phase_formula() {
        let d = 3;
        let chart = SubspaceChart::canonical(d).unwrap();
        let fid = known_fiducial(d).unwrap();
        let geo = geometric_stff(fid.vector(), &chart, 1e-10).unwrap();
        let x = LatticeMatrix::diag_canonical(d).unwrap();
        let alg = stff_projector(fid.vector(), &x, 1e-10).unwrap();
        assert!(
            max_abs_diff(&geo, &alg) < 1e-12,
            "geometric vs phase-formula projector: {:.3e}",
            max_abs_diff(&geo, &alg)
        );
        let report = stff_verify(&geo, 1e-9).unwrap();
        assert!(report.pass && report.rank == 2);
    }

    #[test]
    fn geometric_projector_pairs_with_displacements_via_squared_overlaps() {
        let d = 3;
        let chart = SubspaceChart::canonical(d).unwrap();
        let fid = known_fiducial(d).unwrap();
        let geo = geometric_stff(fid.vector(), &chart, 1e-10).unwrap();
        let overlaps = overlap_table(d, fid.vector()).unwrap();
        for c in lattice_points(d) {
            let pairing = diagonal_pairing(&geo, c).unwrap();
            let overlap = overlaps[(c.k1 as usize) * d + c.k2 as usize];
            let expected = overlap * overlap * cr((d as f64 + 1.0) / 2.0);
            assert!(
                (pairing - expected).norm() < 1e-12,
                "pairing mismatch at {c:?}: {pairing} vs {expected}"
            );
        }
    }

    #[test]
    fn even_dimensions_are_rejected_across_the_module() {
        let fid = known_fiducial(2).unwrap();
        let chart = SubspaceChart::canonical(2).unwrap();
        assert!(matches!(
            geometric_stff(fid.vector(), &chart, 1e-9),
            Err(Error::EvenDimension(2))
        ));
        let pi = CMat::identity(2, 2);
        assert!(matches!(
            stff_verify(&pi, 1e-9),
            Err(Error::EvenDimension(2))
        ));
    }

    #[test]
    fn displaced_preserves_norm() {
        let fid = known_fiducial(3).unwrap();
        let moved = displaced(fid.vector(), LatticeIndex::new(1, 1)).unwrap();
        assert!((moved.norm() - 1.0).abs() < 1e-12);
    }
}
