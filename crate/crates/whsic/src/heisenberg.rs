//! Weyl-Heisenberg displacement operators on ℂ^d.
//!
//! The clock operator C acts as `C|i⟩ = ω^i |i⟩` and the shift operator S as
//! `S|i⟩ = |i+1 mod d⟩`, with `ω = exp(2πi/d)`. Displacements are indexed by
//! lattice points `a = (a₁, a₂) ∈ ℤ²`:
//!
//! ```text
//! T_a = τ^{a₁ a₂} S^{a₁} C^{a₂},    τ = exp(2πi (d+1) / (2d)) = −exp(πi/d).
//! ```
//!
//! With this phase convention the displacements satisfy the group law
//! `T_a T_b = τ^{⟨a,b⟩} T_{a+b}` with the symplectic form
//! `⟨a,b⟩ = a₂b₁ − b₂a₁`, together with `T_a† = T_{−a}` and the periodicity
//! `T_{a+d·b} = ε^{⟨a,b⟩} T_a` where `ε = τ^d` equals +1 for odd d and −1 for
//! even d. Because τ is a 2d-th root of unity, lattice indices are kept as
//! plain (unreduced) integers and each operation performs its own reduction:
//! mod d for positions, mod 2d for phase exponents.
//!
//! All phases are evaluated from exact reduced fractions of a full turn, so
//! entries like ±1 and ±i come out bit-exact and no drift accumulates for
//! large indices.

use num_complex::Complex64;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg::{c, cr, CMat, CVec};

/// Largest dimension accepted by the dense constructions in this crate.
pub const MAX_DIMENSION: usize = 64;

fn check_dimension(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::DimensionTooSmall(d))
    } else if d > MAX_DIMENSION {
        Err(Error::DimensionTooLarge(d))
    } else {
        Ok(())
    }
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a.rem_euclid(b));
    }
    a.abs()
}

/// `exp(2πi · num/den)` evaluated from the reduced fraction.
///
/// Quarter-turn multiples (den dividing 4 after reduction) are returned
/// bit-exactly as ±1 / ±i; everything else goes through one sin/cos of an
/// angle already reduced to [0, 2π), so the result is accurate to an ulp.
pub fn unit_phase(num: i64, den: i64) -> Complex64 {
    assert!(den != 0, "unit_phase: zero denominator");
    let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
    let p = num.rem_euclid(den);
    let g = gcd(p, den).max(1);
    let (p, q) = (p / g, den / g);
    match q {
        1 => cr(1.0),
        2 => cr(-1.0),
        4 => {
            if p == 1 {
                c(0.0, 1.0)
            } else {
                c(0.0, -1.0)
            }
        }
        _ => {
            let theta = 2.0 * std::f64::consts::PI * (p as f64) / (q as f64);
            c(theta.cos(), theta.sin())
        }
    }
}

/// Point of the displacement lattice ℤ². Indices are intentionally *not*
/// reduced mod d: for even d the displacement phase is only 2d-periodic, and
/// silent reduction would corrupt signs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeIndex {
    /// Shift component (first index).
    pub k1: i64,
    /// Clock component (second index).
    pub k2: i64,
}

impl LatticeIndex {
    /// The origin `(0, 0)`.
    pub const ZERO: LatticeIndex = LatticeIndex { k1: 0, k2: 0 };

    /// New lattice point.
    pub const fn new(k1: i64, k2: i64) -> Self {
        Self { k1, k2 }
    }

    /// Is this the origin modulo d?
    pub fn is_zero_mod(&self, d: usize) -> bool {
        let d = d as i64;
        self.k1.rem_euclid(d) == 0 && self.k2.rem_euclid(d) == 0
    }

    /// Componentwise scaling.
    pub fn scale(self, s: i64) -> Self {
        Self::new(s * self.k1, s * self.k2)
    }
}

impl Add for LatticeIndex {
    type Output = LatticeIndex;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.k1 + rhs.k1, self.k2 + rhs.k2)
    }
}

impl Sub for LatticeIndex {
    type Output = LatticeIndex;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.k1 - rhs.k1, self.k2 - rhs.k2)
    }
}

impl Neg for LatticeIndex {
    type Output = LatticeIndex;
    fn neg(self) -> Self {
        Self::new(-self.k1, -self.k2)
    }
}

impl From<(i64, i64)> for LatticeIndex {
    fn from((k1, k2): (i64, i64)) -> Self {
        Self::new(k1, k2)
    }
}

/// Symplectic form `⟨a,b⟩ = a₂b₁ − b₂a₁` entering the group law.
pub fn symplectic_form(a: LatticeIndex, b: LatticeIndex) -> i64 {
    a.k2 * b.k1 - b.k2 * a.k1
}

/// All lattice points `(k₁, k₂) ∈ [0, d)²` in row-major order.
pub fn lattice_points(d: usize) -> impl Iterator<Item = LatticeIndex> {
    (0..d as i64).flat_map(move |k1| (0..d as i64).map(move |k2| LatticeIndex::new(k1, k2)))
}

/// Exact phase arithmetic for a fixed dimension: powers of
/// `τ = exp(2πi(d+1)/(2d))` and `ω = τ² = exp(2πi/d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseConstants {
    d: usize,
}

impl PhaseConstants {
    /// Phase system for dimension `d ≥ 2`.
    pub fn new(d: usize) -> Result<Self> {
        check_dimension(d)?;
        Ok(Self { d })
    }

    /// The dimension.
    pub fn d(&self) -> usize {
        self.d
    }

    /// `τ = exp(2πi(d+1)/(2d))`, the square root of ω entering displacements.
    pub fn tau(&self) -> Complex64 {
        self.tau_pow(1)
    }

    /// `ω = exp(2πi/d)`.
    pub fn omega(&self) -> Complex64 {
        self.omega_pow(1)
    }

    /// `ε = τ^d`: +1 for odd d, −1 for even d. Governs the d-periodicity
    /// defect of displacements.
    pub fn epsilon(&self) -> f64 {
        if self.d.is_multiple_of(2) {
            -1.0
        } else {
            1.0
        }
    }

    /// `τ^n`, exact for any integer n (reduction mod 2d happens internally).
    pub fn tau_pow(&self, n: i64) -> Complex64 {
        let two_d = 2 * self.d as i64;
        let n_red = n.rem_euclid(two_d);
        unit_phase((self.d as i64 + 1) * n_red, two_d)
    }

    /// `ω^n`, exact for any integer n.
    pub fn omega_pow(&self, n: i64) -> Complex64 {
        unit_phase(n.rem_euclid(self.d as i64), self.d as i64)
    }
}

/// Clock operator `C|i⟩ = ω^i|i⟩`.
pub fn clock(d: usize) -> Result<CMat> {
    let pc = PhaseConstants::new(d)?;
    let mut m = CMat::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = pc.omega_pow(i as i64);
    }
    Ok(m)
}

/// Shift operator `S|i⟩ = |i+1 mod d⟩`.
pub fn shift(d: usize) -> Result<CMat> {
    check_dimension(d)?;
    let mut m = CMat::zeros(d, d);
    for i in 0..d {
        m[((i + 1) % d, i)] = cr(1.0);
    }
    Ok(m)
}

/// Discrete Fourier matrix `F_{ij} = ω^{ij}/√d`, which swaps clock and shift:
/// `F⁻¹ T_{(a₁,a₂)} F = T_{(a₂,−a₁)}`.
pub fn fourier(d: usize) -> Result<CMat> {
    let pc = PhaseConstants::new(d)?;
    let scale = cr(1.0 / (d as f64).sqrt());
    let mut m = CMat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = pc.omega_pow((i * j) as i64) * scale;
        }
    }
    Ok(m)
}

/// Displacement operator `T_a = τ^{a₁a₂} S^{a₁} C^{a₂}` as a dense matrix.
///
/// Entrywise, `T_a[(j+a₁) mod d, j] = τ^{a₁a₂ + 2a₂j}` and all other entries
/// vanish. The lattice index may be any pair of integers.
pub fn displacement(d: usize, a: LatticeIndex) -> Result<CMat> {
    let pc = PhaseConstants::new(d)?;
    let dd = d as i64;
    // Reducing both components mod 2d preserves every phase exponent mod 2d
    // (and positions mod d) while keeping the products below overflow.
    let k1 = a.k1.rem_euclid(2 * dd);
    let k2 = a.k2.rem_euclid(2 * dd);
    let mut m = CMat::zeros(d, d);
    for j in 0..dd {
        let row = ((j + k1).rem_euclid(dd)) as usize;
        m[(row, j as usize)] = pc.tau_pow(k1 * k2 + 2 * k2 * j);
    }
    Ok(m)
}

/// Action of `T_a` on a vector without forming the matrix.
pub fn displacement_apply(d: usize, a: LatticeIndex, x: &CVec) -> Result<CVec> {
    let pc = PhaseConstants::new(d)?;
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x.len(),
        });
    }
    let dd = d as i64;
    let k1 = a.k1.rem_euclid(2 * dd);
    let k2 = a.k2.rem_euclid(2 * dd);
    let mut y = CVec::zeros(d);
    for j in 0..dd {
        let row = ((j + k1).rem_euclid(dd)) as usize;
        y[row] = pc.tau_pow(k1 * k2 + 2 * k2 * j) * x[j as usize];
    }
    Ok(y)
}

/// Doubled displacement `𝕋_a = T_a ⊗ T_a` on the tensor square, as a dense
/// d²×d² matrix. These satisfy `𝕋_a 𝕋_b = τ^{2⟨a,b⟩} 𝕋_{a+b} = ω^{⟨a,b⟩} 𝕋_{a+b}`
/// and are d-periodic in `a` for every d (the ε signs cancel).
pub fn double_displacement(d: usize, a: LatticeIndex) -> Result<CMat> {
    let t = displacement(d, a)?;
    Ok(t.kronecker(&t))
}

/// Action of `𝕋_a = T_a ⊗ T_a` on a d²-vector without forming the matrix.
///
/// Uses the row-major pairing `(i, j) ↦ i·d + j`.
pub fn double_displacement_apply(d: usize, a: LatticeIndex, x: &CVec) -> Result<CVec> {
    let pc = PhaseConstants::new(d)?;
    if x.len() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            got: x.len(),
        });
    }
    let dd = d as i64;
    let k1 = a.k1.rem_euclid(2 * dd);
    let k2 = a.k2.rem_euclid(2 * dd);
    let mut y = CVec::zeros(d * d);
    for i in 0..dd {
        let ri = ((i + k1).rem_euclid(dd)) as usize;
        for j in 0..dd {
            let rj = ((j + k1).rem_euclid(dd)) as usize;
            let phase = pc.tau_pow(2 * k1 * k2 + 2 * k2 * (i + j));
            y[ri * d + rj] = phase * x[(i * dd + j) as usize];
        }
    }
    Ok(y)
}

/// Overlap table `a ↦ ⟨f|T_a|f⟩` over the fundamental lattice cell
/// `[0,d)²`, returned in row-major order.
pub fn overlap_table(d: usize, f: &CVec) -> Result<Vec<Complex64>> {
    check_dimension(d)?;
    if f.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: f.len(),
        });
    }
    lattice_points(d)
        .map(|a| Ok(f.dotc(&displacement_apply(d, a, f)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, max_abs_diff, random_unit_vector, unitarity_residual};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn li(k1: i64, k2: i64) -> LatticeIndex {
        LatticeIndex::new(k1, k2)
    }

    #[test]
    fn phase_constants_satisfy_defining_identities() {
        for d in 2..=12usize {
            let pc = PhaseConstants::new(d).unwrap();
            // τ² = ω: bit-exact through the reduced-fraction path, and within
            // rounding when multiplied out as complex numbers.
            assert_eq!(pc.tau_pow(2), pc.omega());
            assert!((pc.tau() * pc.tau() - pc.omega()).norm() < 1e-14);
            // τ^d = ε, τ^{2d} = 1, ω^d = 1
            assert!((pc.tau_pow(d as i64) - cr(pc.epsilon())).norm() < 1e-15);
            assert_eq!(pc.tau_pow(2 * d as i64), cr(1.0));
            assert_eq!(pc.omega_pow(d as i64), cr(1.0));
            // exactness far out on the lattice
            assert_eq!(pc.tau_pow(1 + 2 * (d as i64) * 1_000_000), pc.tau_pow(1));
        }
    }

    #[test]
    fn unit_phase_quarter_turns_are_exact() {
        assert_eq!(unit_phase(0, 5), cr(1.0));
        assert_eq!(unit_phase(2, 4), cr(-1.0));
        assert_eq!(unit_phase(1, 4), c(0.0, 1.0));
        assert_eq!(unit_phase(3, 4), c(0.0, -1.0));
        assert_eq!(unit_phase(6, 8), c(0.0, -1.0));
        assert_eq!(unit_phase(-1, 4), c(0.0, -1.0));
        assert_eq!(unit_phase(1, -4), c(0.0, -1.0));
    }

    #[test]
    fn clock_shift_commutation() {
        for d in 2..=9usize {
            let pc = PhaseConstants::new(d).unwrap();
            let cm = clock(d).unwrap();
            let sm = shift(d).unwrap();
            let lhs = &cm * &sm;
            let rhs = (&sm * &cm).scale(1.0) * pc.omega();
            assert!(
                max_abs_diff(&lhs, &rhs) < 1e-15,
                "CS = ωSC failed for d={d}"
            );
        }
    }

    #[test]
    fn displacement_special_cases() {
        for d in 2..=6usize {
            let id = CMat::identity(d, d);
            assert!(max_abs_diff(&displacement(d, li(0, 0)).unwrap(), &id) < 1e-15);
            assert!(max_abs_diff(&displacement(d, li(1, 0)).unwrap(), &shift(d).unwrap()) < 1e-15);
            assert!(max_abs_diff(&displacement(d, li(0, 1)).unwrap(), &clock(d).unwrap()) < 1e-15);
        }
        // d = 2, a = (1,1): τ = exp(2πi·3/4) = −i, T = τ S C = [[0, i], [−i, 0]].
        let t = displacement(2, li(1, 1)).unwrap();
        assert_eq!(t[(0, 0)], cr(0.0));
        assert_eq!(t[(0, 1)], c(0.0, 1.0));
        assert_eq!(t[(1, 0)], c(0.0, -1.0));
        assert_eq!(t[(1, 1)], cr(0.0));
    }

    #[test]
    fn displacement_matches_monomial_definition() {
        // T_a = τ^{a₁a₂} S^{a₁} C^{a₂} built by repeated multiplication.
        for d in 2..=5usize {
            let pc = PhaseConstants::new(d).unwrap();
            let s = shift(d).unwrap();
            let c = clock(d).unwrap();
            for a in lattice_points(d) {
                let mut m = CMat::identity(d, d);
                for _ in 0..a.k1 {
                    m = &s * m;
                }
                for _ in 0..a.k2 {
                    m *= &c;
                }
                let m = m * pc.tau_pow(a.k1 * a.k2);
                assert!(max_abs_diff(&displacement(d, a).unwrap(), &m) < 1e-14);
            }
        }
    }

    #[test]
    fn adjoint_is_displacement_by_negated_index() {
        for d in 2..=6usize {
            for a in lattice_points(d) {
                let t = displacement(d, a).unwrap();
                let tneg = displacement(d, -a).unwrap();
                assert!(max_abs_diff(&t.adjoint(), &tneg) < 1e-12);
                assert!(unitarity_residual(&t) < 1e-12);
            }
        }
    }

    #[test]
    fn group_law_exhaustive_small_dimensions() {
        for d in 2..=6usize {
            let pc = PhaseConstants::new(d).unwrap();
            for a in lattice_points(d) {
                for b in lattice_points(d) {
                    let lhs = displacement(d, a).unwrap() * displacement(d, b).unwrap();
                    let rhs = displacement(d, a + b).unwrap() * pc.tau_pow(symplectic_form(a, b));
                    assert!(
                        max_abs_diff(&lhs, &rhs) < 1e-12,
                        "group law failed for d={d}, a={a:?}, b={b:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn periodicity_with_epsilon_sign() {
        for d in [3usize, 4] {
            let pc = PhaseConstants::new(d).unwrap();
            let dd = d as i64;
            for a in lattice_points(d) {
                for b1 in -2..=2i64 {
                    for b2 in -2..=2i64 {
                        let b = li(b1, b2);
                        let shifted = displacement(d, a + b.scale(dd)).unwrap();
                        let sign = pc.epsilon().powi(symplectic_form(a, b) as i32);
                        let expected = displacement(d, a).unwrap() * cr(sign);
                        assert!(
                            max_abs_diff(&shifted, &expected) < 1e-12,
                            "periodicity failed for d={d}, a={a:?}, b={b:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn hilbert_schmidt_orthogonality() {
        for d in 2..=6usize {
            for a in lattice_points(d) {
                for b in lattice_points(d) {
                    let prod = displacement(d, a).unwrap().adjoint() * displacement(d, b).unwrap();
                    let trace: Complex64 = (0..d).map(|i| prod[(i, i)]).sum();
                    let expected = if a == b { d as f64 } else { 0.0 };
                    assert!(
                        (trace - cr(expected)).norm() < 1e-12,
                        "HS orthogonality failed for d={d}, a={a:?}, b={b:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn fourier_swaps_clock_and_shift() {
        for d in 2..=6usize {
            let f = fourier(d).unwrap();
            assert!(unitarity_residual(&f) < 1e-13);
            for a in lattice_points(d) {
                let lhs = f.adjoint() * displacement(d, a).unwrap() * &f;
                let rhs = displacement(d, li(a.k2, -a.k1)).unwrap();
                assert!(
                    max_abs_diff(&lhs, &rhs) < 1e-12,
                    "Fourier conjugation failed for d={d}, a={a:?}"
                );
            }
        }
    }

    #[test]
    fn displaced_states_form_tight_frame() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 2..=6usize {
            let f = random_unit_vector(d, &mut rng);
            let mut acc = CMat::zeros(d, d);
            for a in lattice_points(d) {
                let tf = displacement_apply(d, a, &f).unwrap();
                acc += &tf * tf.adjoint();
            }
            let expected = CMat::identity(d, d).scale(d as f64);
            assert!(
                max_abs_diff(&acc, &expected) < 1e-10,
                "tight frame property failed for d={d}"
            );
        }
    }

    #[test]
    fn double_displacement_group_law_and_periodicity() {
        for d in 2..=5usize {
            let pc = PhaseConstants::new(d).unwrap();
            let dd = d as i64;
            for a in lattice_points(d) {
                for b in lattice_points(d) {
                    let lhs =
                        double_displacement(d, a).unwrap() * double_displacement(d, b).unwrap();
                    let rhs = double_displacement(d, a + b).unwrap()
                        * pc.tau_pow(2 * symplectic_form(a, b));
                    assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
                }
                // d-periodicity holds for every d on the doubled operators.
                let shifted = double_displacement(d, a + li(dd, dd)).unwrap();
                assert!(max_abs_diff(&shifted, &double_displacement(d, a).unwrap()) < 1e-12);
            }
        }
    }

    #[test]
    fn apply_functions_match_dense_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in [2usize, 3, 5] {
            let x = random_unit_vector(d, &mut rng);
            let xx = random_unit_vector(d * d, &mut rng);
            for a in [li(0, 0), li(1, 2), li(-3, 7), li(2 * d as i64 + 1, -1)] {
                let dense = displacement(d, a).unwrap() * &x;
                let fast = displacement_apply(d, a, &x).unwrap();
                assert!((dense - fast).norm() < 1e-13);
                let dense2 = double_displacement(d, a).unwrap() * &xx;
                let fast2 = double_displacement_apply(d, a, &xx).unwrap();
                assert!((dense2 - fast2).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn dimension_guards() {
        assert!(matches!(clock(0), Err(crate::Error::DimensionTooSmall(0))));
        assert!(matches!(clock(1), Err(crate::Error::DimensionTooSmall(1))));
        assert!(matches!(
            clock(MAX_DIMENSION + 1),
            Err(crate::Error::DimensionTooLarge(_))
        ));
    }

    proptest! {
        /// Group law with arbitrary (unreduced, possibly negative) indices:
        /// the identity T_a T_b = τ^{⟨a,b⟩} T_{a+b} is an exact integer-phase
        /// statement, so it must hold far outside the fundamental cell.
        #[test]
        fn group_law_for_unreduced_indices(
            d in 2usize..8,
            a1 in -500i64..500, a2 in -500i64..500,
            b1 in -500i64..500, b2 in -500i64..500,
        ) {
            let pc = PhaseConstants::new(d).unwrap();
            let a = li(a1, a2);
            let b = li(b1, b2);
            let lhs = displacement(d, a).unwrap() * displacement(d, b).unwrap();
            let rhs = displacement(d, a + b).unwrap() * pc.tau_pow(symplectic_form(a, b));
            prop_assert!(max_abs(&(lhs - rhs)) < 1e-12);
        }
    }
}
