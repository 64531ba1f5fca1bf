//! Numerical SIC search over WH-type basis parameters.
//!
//! The symmetric part of a basis member `b` has squared norm `(d+1)/2d`;
//! normalizing it and tracing out the first tensor factor gives a reduced
//! state `ρ₂` whose purity `Tr(ρ₂²)` lies in `[1/d, 1]`, reaching 1 exactly
//! when `P_sym b` is a symmetric product state `λ f⊗f` — and then `f` is a
//! SIC fiducial with `λ = √((d+1)/2d)`. Maximizing purity over the block
//! unitaries is therefore a SIC search; this module implements gradient
//! ascent in exponential coordinates (`U ← U·exp(itG)` with Hermitian `G`,
//! so iterates stay exactly unitary), with Armijo backtracking, seeded
//! random restarts, and Takagi-based fiducial extraction at convergence.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{cr, exp_i_hermitian, CMat, CVec};
use crate::sicframes::{verify_sic_overlaps, FiducialSource, SicFiducial};
use crate::symspace::{reshape_to_matrix, symmetrize, takagi_symmetric, tensor_square_dim};
use crate::whbasis::{
    block_shape, build_fiducial, is_wh_fiducial, FiducialBasisVector, SubspaceChart, WhBasisParams,
};

/// Hyperparameters of the purity-ascent search.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Dimension d.
    pub d: usize,
    /// Number of independent ascent runs (restart k draws its start from a
    /// generator seeded with `seed ^ k`, so any execution order gives the
    /// same results).
    pub restarts: usize,
    /// Iteration cap per restart.
    pub max_iterations: usize,
    /// Central-difference step for the gradient (must lie in (0, 1e−2)).
    pub grad_step: f64,
    /// Ascent stops when the gradient Frobenius norm falls below this.
    pub conv_tol: f64,
    /// Base seed for the restart generators.
    pub seed: u64,
    /// Purity level that counts as success and triggers extraction.
    pub threshold: f64,
    /// Tolerance handed to [`extract_fiducial`] after a successful run
    /// (optimizer-limited outputs need a looser cut than analytic inputs).
    pub extraction_tol: f64,
    /// Optional starting point for restart 0 (further restarts are random).
    pub warm_start: Option<WhBasisParams>,
}

impl SearchConfig {
    /// Baseline configuration for dimension d.
    pub fn new(d: usize) -> Result<Self> {
        crate::heisenberg::PhaseConstants::new(d)?;
        Ok(Self {
            d,
            restarts: 10,
            max_iterations: 500,
            grad_step: 1e-5,
            conv_tol: 1e-8,
            seed: 0,
            threshold: 1.0 - 1e-9,
            extraction_tol: 1e-4,
            warm_start: None,
        })
    }

    fn validate(&self) -> Result<()> {
        crate::heisenberg::PhaseConstants::new(self.d)?;
        if self.restarts == 0 || self.max_iterations == 0 {
            return Err(Error::FileFormat(
                "search needs at least one restart and one iteration".into(),
            ));
        }
        if !(self.grad_step > 0.0 && self.grad_step < 1e-2) {
            return Err(Error::FileFormat(format!(
                "gradient step {} outside (0, 1e-2)",
                self.grad_step
            )));
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(Error::FileFormat(format!(
                "purity threshold {} outside (0, 1]",
                self.threshold
            )));
        }
        if let Some(ws) = &self.warm_start {
            if ws.d() != self.d {
                return Err(Error::DimensionMismatch {
                    expected: self.d,
                    got: ws.d(),
                });
            }
        }
        Ok(())
    }
}

/// Outcome of one full search (all restarts).
#[derive(Clone, Debug)]
pub struct SearchResult {
    /// Parameters of the best point found.
    pub best_params: WhBasisParams,
    /// Purity at the best point.
    pub best_purity: f64,
    /// Per-iteration purity values of the best restart (index 0 is the
    /// starting purity).
    pub purity_trace: Vec<f64>,
    /// Final purity of every restart, in restart order.
    pub restart_purities: Vec<f64>,
    /// Number of restarts whose final purity reached the threshold.
    pub converged_restart_count: usize,
    /// Extraction outcome; present exactly when the best purity reached the
    /// threshold and the extracted vector verified as a SIC fiducial.
    pub extracted: Option<ExtractionOutcome>,
}

/// A fiducial recovered from a purity-1 (or nearly so) member.
#[derive(Clone, Debug)]
pub struct ExtractionOutcome {
    /// The verified fiducial.
    pub fiducial: SicFiducial,
    /// Dominant Takagi coefficient λ of the (unnormalized) symmetric part.
    pub lambda: f64,
    /// `|λ − √((d+1)/2d)|`.
    pub lambda_deviation: f64,
    /// Subdominant symmetric Schmidt coefficient (0 for exact rank 1).
    pub subdominant: f64,
}

/// Purity `Tr(ρ₂²)` of the normalized symmetric part of `b`, computed from
/// the reshaped matrix M of `P_sym b` as `‖M†M‖_F² / ‖M‖_F⁴`.
pub fn purity_of_member(b: &CVec) -> Result<f64> {
    let d = tensor_square_dim(b.len())?;
    let w = symmetrize(b, d)?;
    let m = reshape_to_matrix(&w, d)?;
    let gram = m.adjoint() * &m;
    let norm_sq: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    if norm_sq == 0.0 {
        return Err(Error::ZeroVector);
    }
    let gram_sq: f64 = gram.iter().map(|z| z.norm_sqr()).sum();
    Ok(gram_sq / (norm_sq * norm_sq))
}

/// Purity of the member built from `params` (see [`purity_of_member`]).
pub fn purity(params: &WhBasisParams, chart: &SubspaceChart) -> Result<f64> {
    purity_of_member(build_fiducial(params, chart)?.vector())
}

/// Orthonormal Hermitian generator basis of u(m): the m diagonal units
/// `E_kk`, then `(E_kl + E_lk)/√2` and `(iE_kl − iE_lk)/√2` for k < l.
fn hermitian_generators(m: usize) -> Vec<CMat> {
    let mut gens = Vec::with_capacity(m * m);
    for k in 0..m {
        let mut g = CMat::zeros(m, m);
        g[(k, k)] = cr(1.0);
        gens.push(g);
    }
    let inv = 1.0 / std::f64::consts::SQRT_2;
    for k in 0..m {
        for l in (k + 1)..m {
            let mut g = CMat::zeros(m, m);
            g[(k, l)] = cr(inv);
            g[(l, k)] = cr(inv);
            gens.push(g);
            let mut g = CMat::zeros(m, m);
            g[(k, l)] = Complex64::new(0.0, inv);
            g[(l, k)] = Complex64::new(0.0, -inv);
            gens.push(g);
        }
    }
    gens
}

/// Replaces block `c` with `blocks[c]·exp(i·t·G)` and rebuilds the params.
fn step_block(params: &WhBasisParams, c: usize, t: f64, g: &CMat) -> WhBasisParams {
    let mut blocks: Vec<CMat> = params.blocks().to_vec();
    blocks[c] = &blocks[c] * exp_i_hermitian(&(g * cr(t)));
    // Blocks remain unitary to machine precision; skip re-validation.
    WhBasisParams::from_validated(params.d(), blocks)
}

/// Riemannian purity gradient: one Hermitian matrix per block, expressed in
/// exponential coordinates around the current blocks (the ascent move is
/// `U_c ← U_c·exp(i·t·G_c)`). Computed by central finite differences of
/// step `h` along the orthonormal generator basis.
pub fn purity_gradient(params: &WhBasisParams, chart: &SubspaceChart, h: f64) -> Result<Vec<CMat>> {
    let (class_count, m) = block_shape(params.d());
    let gens = hermitian_generators(m);
    let mut grads = Vec::with_capacity(class_count);
    for c in 0..class_count {
        let mut g_total = CMat::zeros(m, m);
        for gen in &gens {
            let plus = purity(&step_block(params, c, h, gen), chart)?;
            let minus = purity(&step_block(params, c, -h, gen), chart)?;
            let slope = (plus - minus) / (2.0 * h);
            g_total += gen * cr(slope);
        }
        grads.push(g_total);
    }
    Ok(grads)
}

fn gradient_norm(grads: &[CMat]) -> f64 {
    grads
        .iter()
        .map(|g| g.iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        .sqrt()
}

/// One gradient-ascent run from `start`; returns the final parameters, the
/// purity trace, and the final purity.
fn ascend(
    start: WhBasisParams,
    chart: &SubspaceChart,
    config: &SearchConfig,
) -> Result<(WhBasisParams, Vec<f64>, f64)> {
    const ARMIJO: f64 = 1e-4;
    const MAX_HALVINGS: usize = 64;
    let mut params = start;
    let mut value = purity(&params, chart)?;
    let mut trace = vec![value];
    let mut last_step = 1.0_f64;
    for _ in 0..config.max_iterations {
        if value >= config.threshold {
            break;
        }
        let grads = purity_gradient(&params, chart, config.grad_step)?;
        let slope_sq = gradient_norm(&grads).powi(2);
        if slope_sq.sqrt() < config.conv_tol {
            break;
        }
        // Backtracking line search with a growing initial step.
        let mut t = 2.0 * last_step;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let mut blocks: Vec<CMat> = params.blocks().to_vec();
            for (c, g) in grads.iter().enumerate() {
                blocks[c] = &blocks[c] * exp_i_hermitian(&(g * cr(t)));
            }
            let candidate = WhBasisParams::from_validated(params.d(), blocks);
            let candidate_value = purity(&candidate, chart)?;
            if candidate_value >= value + ARMIJO * t * slope_sq {
                accepted = Some((candidate, candidate_value, t));
                break;
            }
            t *= 0.5;
        }
        let Some((next, next_value, step)) = accepted else {
            break; // Stuck: no step improves sufficiently.
        };
        params = next;
        value = next_value;
        last_step = step;
        trace.push(value);
    }
    Ok((params, trace, value))
}

/// Runs the full multi-restart search. Deterministic in `config.seed`:
/// restart k seeds its own generator with `seed ^ k`, so serial and
/// parallel schedules agree. Non-convergence is reported, never an error.
pub fn search(config: &SearchConfig, chart: &SubspaceChart) -> Result<SearchResult> {
    config.validate()?;
    if chart.d() != config.d {
        return Err(Error::DimensionMismatch {
            expected: config.d,
            got: chart.d(),
        });
    }
    if !chart.is_canonical() {
        return Err(Error::ChartNotCanonical);
    }

    let mut best: Option<(WhBasisParams, Vec<f64>, f64)> = None;
    let mut restart_purities = Vec::with_capacity(config.restarts);
    let mut converged_restart_count = 0usize;
    for k in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ k as u64);
        let start = match (&config.warm_start, k) {
            (Some(ws), 0) => ws.clone(),
            _ => WhBasisParams::random(config.d, &mut rng)?,
        };
        let (params, trace, value) = ascend(start, chart, config)?;
        if value >= config.threshold {
            converged_restart_count += 1;
        }
        restart_purities.push(value);
        if best.as_ref().is_none_or(|(_, _, b)| value > *b) {
            best = Some((params, trace, value));
        }
    }
    let (best_params, purity_trace, best_purity) = best.expect("restarts ≥ 1");

    let extracted = if best_purity >= config.threshold {
        let b = build_fiducial(&best_params, chart)?;
        extract_fiducial(b.vector(), config.extraction_tol).ok()
    } else {
        None
    };

    Ok(SearchResult {
        best_params,
        best_purity,
        purity_trace,
        restart_purities,
        converged_restart_count,
        extracted,
    })
}

/// Extracts the SIC fiducial from a basis member whose symmetric part is
/// (numerically) a product state: Takagi-factor `P_sym b`, require the
/// subdominant coefficient below `tol`, renormalize the dominant vector,
/// and verify the SIC overlap property at `tol`.
///
/// The dominant coefficient λ is reported; for exact members it must equal
/// `√((d+1)/2d)`.
pub fn extract_fiducial(b: &CVec, tol: f64) -> Result<ExtractionOutcome> {
    let d = tensor_square_dim(b.len())?;
    let membership = is_wh_fiducial(b, tol.max(1e-10))?;
    if !membership.pass {
        return Err(Error::NotWhFiducial {
            max_overlap: membership.max_overlap,
            norm_residual: membership.norm_residual,
            tol: tol.max(1e-10),
        });
    }
    let w = symmetrize(b, d)?;
    let schmidt = takagi_symmetric(&w, 1e-12)?;
    let lambda = *schmidt
        .coeffs
        .last()
        .expect("symmetric part of a member is nonzero");
    let subdominant = if schmidt.spectrum.len() >= 2 {
        schmidt.spectrum[schmidt.spectrum.len() - 2]
    } else {
        0.0
    };
    if subdominant >= tol {
        return Err(Error::ExtractionFailed { subdominant, tol });
    }
    let raw = schmidt.vectors.last().expect("rank ≥ 1");
    let f = raw / cr(raw.norm());
    let report = verify_sic_overlaps(&f, tol)?;
    if !report.pass {
        return Err(Error::NotSicFiducial {
            residual: report.max_deviation.max(report.norm_residual),
            tol,
        });
    }
    let target = (0.5 * (d as f64 + 1.0) / d as f64).sqrt();
    Ok(ExtractionOutcome {
        fiducial: SicFiducial::new(f, FiducialSource::Search, tol)?,
        lambda,
        lambda_deviation: (lambda - target).abs(),
        subdominant,
    })
}

/// Lift + decompose round trip: parameters whose member is the lift of a
/// known or supplied SIC fiducial — a convenient purity-1 warm start.
pub fn params_of_lift(
    f: &CVec,
    chart: &SubspaceChart,
    tol: f64,
) -> Result<(WhBasisParams, FiducialBasisVector)> {
    let lift = crate::sicframes::lift_fiducial(f, chart, tol)?;
    let params = crate::whbasis::decompose_fiducial(lift.fiducial.vector(), chart, tol)?;
    Ok((params, lift.fiducial))
}

/// The reshaped symmetric part as a matrix (diagnostic helper).
pub fn symmetric_part_matrix(b: &CVec) -> Result<DMatrix<Complex64>> {
    let d = tensor_square_dim(b.len())?;
    reshape_to_matrix(&symmetrize(b, d)?, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sicframes::known_fiducial;
    use rand::SeedableRng;

    fn canonical_purity(d: usize) -> f64 {
        let df = d as f64;
        (df * df + 6.0 * df + 1.0) / (2.0 * (df + 1.0) * (df + 1.0))
    }

    #[test]
    fn purity_of_the_canonical_member_matches_closed_form() {
        for d in 2..=6 {
            let b0 = crate::whbasis::canonical_fiducial(d).unwrap();
            let p = purity_of_member(b0.vector()).unwrap();
            assert!(
                (p - canonical_purity(d)).abs() < 1e-13,
                "canonical purity mismatch for d={d}: {p} vs {}",
                canonical_purity(d)
            );
        }
    }

    #[test]
    fn purity_of_lifted_sic_is_one() {
        for d in [2usize, 3] {
            let chart = SubspaceChart::canonical(d).unwrap();
            let fid = known_fiducial(d).unwrap();
            let (params, b) = params_of_lift(fid.vector(), &chart, 1e-10).unwrap();
            assert!((purity_of_member(b.vector()).unwrap() - 1.0).abs() < 1e-12);
            assert!((purity(&params, &chart).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn purity_respects_bounds_and_depends_only_on_the_member() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for d in [3usize, 4] {
            let chart = SubspaceChart::canonical(d).unwrap();
            for _ in 0..5 {
                let params = WhBasisParams::random(d, &mut rng).unwrap();
                let b = build_fiducial(&params, &chart).unwrap();
                let p1 = purity(&params, &chart).unwrap();
                let p2 = purity_of_member(b.vector()).unwrap();
                assert!((p1 - p2).abs() < 1e-14);
                assert!(p1 >= 1.0 / d as f64 - 1e-12 && p1 <= 1.0 + 1e-12);
                // Global phase on the member leaves purity unchanged.
                let phased = b.vector() * Complex64::from_polar(1.0, 0.7);
                assert!((purity_of_member(&phased).unwrap() - p1).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn gradient_vanishes_at_a_maximum_and_has_no_trace_component() {
        let d = 3;
        let chart = SubspaceChart::canonical(d).unwrap();
        let fid = known_fiducial(d).unwrap();
        let (params, _) = params_of_lift(fid.vector(), &chart, 1e-10).unwrap();
        let grads = purity_gradient(&params, &chart, 1e-5).unwrap();
        assert!(
            gradient_norm(&grads) < 1e-6,
            "gradient at the SIC point: {:.3e}",
            gradient_norm(&grads)
        );

        // Purity is invariant under a global phase, so the trace component
        // (identity generator direction) of the gradient vanishes anywhere.
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        let random = WhBasisParams::random(d, &mut rng).unwrap();
        let grads = purity_gradient(&random, &chart, 1e-5).unwrap();
        for g in &grads {
            let trace: Complex64 = (0..g.nrows()).map(|k| g[(k, k)]).sum();
            assert!(trace.norm() < 1e-6, "trace component: {:.3e}", trace.norm());
        }
    }

    #[test]
    fn gradient_matches_directional_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        for d in [2usize, 3] {
            let chart = SubspaceChart::canonical(d).unwrap();
            let (class_count, m) = block_shape(d);
            for _ in 0..3 {
                let params = WhBasisParams::random(d, &mut rng).unwrap();
                let grads = purity_gradient(&params, &chart, 1e-5).unwrap();
                // Random unit Hermitian direction in one block.
                let c = rand::Rng::random_range(&mut rng, 0..class_count);
                let dir = crate::linalg::random_hermitian(m, &mut rng);
                let dir_norm = dir.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let dir = dir * cr(1.0 / dir_norm);
                let predicted: f64 = grads[c]
                    .iter()
                    .zip(dir.iter())
                    .map(|(g, x)| (g.conj() * x).re)
                    .sum();
                let t = 1e-5;
                let plus = purity(&step_block(&params, c, t, &dir), &chart).unwrap();
                let minus = purity(&step_block(&params, c, -t, &dir), &chart).unwrap();
                let measured = (plus - minus) / (2.0 * t);
                assert!(
                    (predicted - measured).abs() < 1e-6,
                    "directional derivative mismatch d={d}: {predicted} vs {measured}"
                );
            }
        }
    }

    #[test]
    fn warm_started_search_converges_to_purity_one() {
        let d = 3;
        let chart = SubspaceChart::canonical(d).unwrap();
        let fid = known_fiducial(d).unwrap();
        let (params, _) = params_of_lift(fid.vector(), &chart, 1e-10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let mut config = SearchConfig::new(d).unwrap();
        config.restarts = 1;
        config.warm_start = Some(params.perturbed(1e-3, &mut rng));
        let result = search(&config, &chart).unwrap();
        assert!(
            result.best_purity >= 1.0 - 1e-9,
            "warm start purity: {}",
            result.best_purity
        );
        let extracted = result.extracted.expect("extraction after convergence");
        assert!(extracted.lambda_deviation < 1e-4);
        assert!(
            verify_sic_overlaps(extracted.fiducial.vector(), 1e-4)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn search_is_deterministic_in_the_seed() {
        let d = 2;
        let chart = SubspaceChart::canonical(d).unwrap();
        let mut config = SearchConfig::new(d).unwrap();
        config.restarts = 3;
        config.max_iterations = 40;
        config.seed = 12345;
        let r1 = search(&config, &chart).unwrap();
        let r2 = search(&config, &chart).unwrap();
        assert_eq!(r1.purity_trace, r2.purity_trace, "bit-identical traces");
        assert_eq!(r1.restart_purities, r2.restart_purities);
        assert_eq!(r1.best_purity, r2.best_purity);
    }

    #[test]
    fn cold_search_in_dimension_two_finds_a_sic() {
        let d = 2;
        let chart = SubspaceChart::canonical(d).unwrap();
        let mut config = SearchConfig::new(d).unwrap();
        config.restarts = 20;
        config.seed = 7;
        let result = search(&config, &chart).unwrap();
        assert!(
            result.best_purity > 1.0 - 1e-8,
            "best purity over restarts: {}",
            result.best_purity
        );
        assert!(result.converged_restart_count >= 1);
        let extracted = result.extracted.expect("a d=2 search should extract");
        // The ascent stops once purity crosses 1 − 1e−9, so the extracted
        // vector deviates from an exact fiducial by ~√(1−p) ≈ 1e−4 at worst.
        assert!(extracted.subdominant < 1e-4);
        assert!(crate::sicframes::two_design_residual(extracted.fiducial.vector()).unwrap() < 1e-3);
    }

    #[test]
    fn extraction_recovers_the_lifted_fiducial_up_to_phase() {
        let d = 3;
        let chart = SubspaceChart::canonical(d).unwrap();
        let fid = known_fiducial(d).unwrap();
        let (_, b) = params_of_lift(fid.vector(), &chart, 1e-10).unwrap();
        let outcome = extract_fiducial(b.vector(), 1e-9).unwrap();
        assert!(outcome.lambda_deviation < 1e-12);
        assert!(outcome.subdominant < 1e-12);
        let overlap = outcome.fiducial.vector().dotc(fid.vector()).norm();
        assert!(
            (overlap - 1.0).abs() < 1e-12,
            "recovered fiducial differs beyond a phase: |⟨f̂,f⟩| = {overlap}"
        );
    }

    #[test]
    fn extraction_fails_on_the_canonical_member_with_rank_two_spectrum() {
        let d = 4;
        let b0 = crate::whbasis::canonical_fiducial(d).unwrap();
        match extract_fiducial(b0.vector(), 1e-9) {
            Err(Error::ExtractionFailed { subdominant, .. }) => {
                // Subdominant coefficient of P_sym b₀ is (√d−1)/(2√d).
                let expected = ((d as f64).sqrt() - 1.0) / (2.0 * (d as f64).sqrt());
                assert!((subdominant - expected).abs() < 1e-12);
            }
            other => panic!("expected ExtractionFailed, got {other:?}"),
        }
    }

    #[test]
    fn config_validation_rejects_bad_hyperparameters() {
        let mut config = SearchConfig::new(3).unwrap();
        config.grad_step = 0.5;
        let chart = SubspaceChart::canonical(3).unwrap();
        assert!(search(&config, &chart).is_err());
        let mut config = SearchConfig::new(3).unwrap();
        config.restarts = 0;
        assert!(search(&config, &chart).is_err());
    }
}
