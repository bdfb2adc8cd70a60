//! One- and two-qubit linear algebra in the time-bin basis.
//!
//! Basis ordering is fixed everywhere: `|t0⟩ = (1, 0)`, `|t1⟩ = (0, 1)`, and
//! two-qubit vectors are indexed `|t0 t0⟩, |t0 t1⟩, |t1 t0⟩, |t1 t1⟩` with the
//! first factor as the most significant index. Bell states are always listed
//! as Φ⁺, Φ⁻, Ψ⁺, Ψ⁻.

use std::fmt;

use nalgebra::{DMatrix, Matrix2, SymmetricEigen, Vector2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for algebraic identities (normalization, hermiticity, unitarity).
pub const ALG_TOL: f64 = 1e-12;
/// Slack allowed for eigenvalues of a density matrix below zero.
pub const PSD_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// A normalized single-qubit pure state `α|t0⟩ + β|t1⟩`, stored with its
/// global phase fixed: the first amplitude with modulus above [`ALG_TOL`] is
/// real and non-negative.
#[derive(Debug, Clone, Copy)]
pub struct PureState {
    alpha: C64,
    beta: C64,
}

impl PureState {
    /// Builds a state from amplitudes that must already be normalized.
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let norm2 = alpha.norm_sqr() + beta.norm_sqr();
        if (norm2 - 1.0).abs() > ALG_TOL {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self::canonical(alpha, beta))
    }

    /// Builds a state by normalizing arbitrary (non-zero) amplitudes.
    pub fn normalized(alpha: C64, beta: C64) -> Result<Self> {
        let norm2 = alpha.norm_sqr() + beta.norm_sqr();
        if norm2 <= 0.0 || !norm2.is_finite() {
            return Err(Error::NotNormalized(norm2));
        }
        let n = norm2.sqrt();
        Ok(Self::canonical(alpha / n, beta / n))
    }

    fn canonical(alpha: C64, beta: C64) -> Self {
        let lead = if alpha.norm() > ALG_TOL { alpha } else { beta };
        let phase = lead.conj() / lead.norm();
        let mut alpha = alpha * phase;
        let mut beta = beta * phase;
        if alpha.norm() > ALG_TOL {
            alpha = C64::new(alpha.norm(), 0.0);
        } else {
            beta = C64::new(beta.norm(), 0.0);
        }
        Self { alpha, beta }
    }

    pub fn t0() -> Self {
        Self { alpha: ONE, beta: ZERO }
    }

    pub fn t1() -> Self {
        Self { alpha: ZERO, beta: ONE }
    }

    /// `(|t0⟩ + |t1⟩)/√2`
    pub fn diagonal() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            alpha: C64::new(h, 0.0),
            beta: C64::new(h, 0.0),
        }
    }

    /// `(|t0⟩ + i|t1⟩)/√2`
    pub fn circular() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            alpha: C64::new(h, 0.0),
            beta: C64::new(0.0, h),
        }
    }

    /// Draws a state uniformly from the Bloch sphere (Haar measure).
    pub fn haar_random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v: [f64; 4] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            if let Ok(s) = Self::normalized(C64::new(v[0], v[1]), C64::new(v[2], v[3])) {
                return s;
            }
        }
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    pub fn amplitudes(&self) -> Vector2<C64> {
        Vector2::new(self.alpha, self.beta)
    }

    /// `|⟨self|other⟩|²`
    pub fn overlap(&self, other: &PureState) -> f64 {
        (self.alpha.conj() * other.alpha + self.beta.conj() * other.beta).norm_sqr()
    }

    /// True when both states describe the same ray (equal up to global phase).
    pub fn same_ray(&self, other: &PureState) -> bool {
        1.0 - self.overlap(other) <= ALG_TOL
    }

    pub fn projector(&self) -> DensityMatrix {
        let v = self.amplitudes();
        let m = v * v.adjoint();
        DensityMatrix::from_raw(DMatrix::from_iterator(2, 2, m.iter().copied()))
    }

    /// Bloch vector `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)`.
    pub fn bloch(&self) -> [f64; 3] {
        self.projector().bloch().expect("dim 2")
    }
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:.6}{:+.6}i)|t0⟩ + ({:.6}{:+.6}i)|t1⟩",
            self.alpha.re, self.alpha.im, self.beta.re, self.beta.im
        )
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix of dimension 2 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates `m` against the density-matrix invariants.
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        let d = m.nrows();
        if m.ncols() != d || !(d == 2 || d == 4) {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: d,
            });
        }
        let herm_dev = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_dev > ALG_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm_dev:e})"
            )));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > ALG_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} ≠ 1")));
        }
        let (evals, _) = hermitian_eigen(&m);
        if let Some(min) = evals.iter().copied().reduce(f64::min) {
            if min < -PSD_TOL {
                return Err(Error::InvalidDensityMatrix(format!(
                    "negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(Self { m })
    }

    /// Wraps a matrix produced by an operation that preserves the invariants.
    pub(crate) fn from_raw(m: DMatrix<C64>) -> Self {
        debug_assert!(Self::new(m.clone()).is_ok(), "invariant broken: {m}");
        Self { m }
    }

    pub fn from_pure(s: &PureState) -> Self {
        s.projector()
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if !(dim == 2 || dim == 4) {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: dim,
            });
        }
        Ok(Self {
            m: DMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0),
        })
    }

    /// Single-qubit state from a Bloch vector with `|r| ≤ 1`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if len > 1.0 + ALG_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "Bloch vector length {len} > 1"
            )));
        }
        let mut m = Pauli::I.matrix();
        for (k, p) in [Pauli::X, Pauli::Y, Pauli::Z].iter().enumerate() {
            m += p.matrix() * C64::new(r[k], 0.0);
        }
        m *= C64::new(0.5, 0.0);
        Ok(Self::from_raw(to_dynamic(&m)))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.m[(row, col)]
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    /// `tr(ρ²)`
    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.m).0
    }

    /// Bloch vector of a single-qubit state.
    pub fn bloch(&self) -> Result<[f64; 3]> {
        self.require_dim(2)?;
        let m = &self.m;
        Ok([
            2.0 * m[(0, 1)].re,
            -2.0 * m[(0, 1)].im,
            (m[(0, 0)] - m[(1, 1)]).re,
        ])
    }

    /// Convex combination `w·self + (1−w)·other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<Self> {
        crate::error::check_probability("weight", w)?;
        self.require_dim(other.dim())?;
        Ok(Self::from_raw(
            &self.m * C64::new(w, 0.0) + &other.m * C64::new(1.0 - w, 0.0),
        ))
    }

    /// Zeroes the off-diagonal elements (complete dephasing in the time-bin basis).
    pub fn dephased(&self) -> Self {
        let d = self.dim();
        Self::from_raw(DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                self.m[(i, j)]
            } else {
                ZERO
            }
        }))
    }

    pub(crate) fn require_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                got: self.dim(),
            })
        }
    }
}

/// The four single-qubit Pauli operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> Matrix2<C64> {
        match self {
            Pauli::I => Matrix2::new(ONE, ZERO, ZERO, ONE),
            Pauli::X => Matrix2::new(ZERO, ONE, ONE, ZERO),
            Pauli::Y => Matrix2::new(ZERO, -I, I, ZERO),
            Pauli::Z => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        }
    }

    pub fn unitary(self) -> Unitary2 {
        Unitary2 { m: self.matrix() }
    }

    pub fn label(self) -> &'static str {
        match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// A 2×2 matrix verified to be unitary within [`ALG_TOL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    m: Matrix2<C64>,
}

impl Unitary2 {
    pub fn new(m: Matrix2<C64>) -> Result<Self> {
        let dev = (m * m.adjoint() - Matrix2::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > ALG_TOL || !dev.is_finite() {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        Pauli::I.unitary()
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.m
    }

    /// `self · other`
    pub fn then_after(&self, other: &Unitary2) -> Unitary2 {
        Unitary2 { m: self.m * other.m }
    }

    pub fn apply_pure(&self, s: &PureState) -> PureState {
        let v = self.m * s.amplitudes();
        // unitary maps the unit sphere to itself
        PureState::normalized(v[0], v[1]).expect("unitary preserves norm")
    }

    pub fn apply_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        rho.require_dim(2)?;
        let u = to_dynamic(&self.m);
        let out = &u * rho.matrix() * u.adjoint();
        Ok(DensityMatrix::from_raw(hermitize(out)))
    }

    /// Fidelity between the operator's action and another unitary's action,
    /// `|tr(U†V)|²/4`.
    pub fn process_overlap(&self, other: &Unitary2) -> f64 {
        (self.m.adjoint() * other.m).trace().norm_sqr() / 4.0
    }
}

/// States that evolve under a single-qubit unitary.
pub trait Evolve: Sized {
    fn evolve(&self, u: &Unitary2) -> Result<Self>;
}

impl Evolve for PureState {
    fn evolve(&self, u: &Unitary2) -> Result<Self> {
        Ok(u.apply_pure(self))
    }
}

impl Evolve for DensityMatrix {
    fn evolve(&self, u: &Unitary2) -> Result<Self> {
        u.apply_density(self)
    }
}

/// Applies a raw 2×2 operator after checking it is unitary.
pub fn apply_unitary<S: Evolve>(u: &Matrix2<C64>, state: &S) -> Result<S> {
    state.evolve(&Unitary2::new(*u)?)
}

/// Kronecker product of two single-qubit density matrices.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    a.require_dim(2)?;
    b.require_dim(2)?;
    Ok(DensityMatrix::from_raw(a.matrix().kronecker(b.matrix())))
}

/// Which subsystem of a two-qubit state survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

pub fn partial_trace(rho: &DensityMatrix, keep: Keep) -> Result<DensityMatrix> {
    rho.require_dim(4)?;
    let m = rho.matrix();
    let out = DMatrix::from_fn(2, 2, |i, j| match keep {
        Keep::First => m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)],
        Keep::Second => m[(i, j)] + m[(2 + i, 2 + j)],
    });
    Ok(DensityMatrix::from_raw(hermitize(out)))
}

/// `⟨target|ρ|target⟩`
pub fn fidelity_pure(target: &PureState, rho: &DensityMatrix) -> Result<f64> {
    rho.require_dim(2)?;
    let v = target.amplitudes();
    let m = rho.matrix();
    let mut acc = ZERO;
    for i in 0..2 {
        for j in 0..2 {
            acc += v[i].conj() * m[(i, j)] * v[j];
        }
    }
    Ok(acc.re.clamp(0.0, 1.0))
}

/// The four maximally entangled two-qubit states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    /// Amplitudes over `|t0t0⟩, |t0t1⟩, |t1t0⟩, |t1t1⟩`.
    pub fn vector(self) -> [C64; 4] {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match self {
            BellState::PhiPlus => [h, ZERO, ZERO, h],
            BellState::PhiMinus => [h, ZERO, ZERO, -h],
            BellState::PsiPlus => [ZERO, h, h, ZERO],
            BellState::PsiMinus => [ZERO, h, -h, ZERO],
        }
    }

    pub fn projector(self) -> DensityMatrix {
        let v = self.vector();
        DensityMatrix::from_raw(DMatrix::from_fn(4, 4, |i, j| v[i] * v[j].conj()))
    }

    /// Pauli relating the receiver's conditional state to the input when
    /// this outcome is projected out of `|ψ⟩|Φ⁺⟩`.
    pub fn conditional_pauli(self) -> Pauli {
        match self {
            BellState::PhiPlus => Pauli::I,
            BellState::PhiMinus => Pauli::Z,
            BellState::PsiPlus => Pauli::X,
            BellState::PsiMinus => Pauli::Y,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BellState::PhiPlus => "Phi+",
            BellState::PhiMinus => "Phi-",
            BellState::PsiPlus => "Psi+",
            BellState::PsiMinus => "Psi-",
        }
    }
}

/// One branch of the Bell-basis expansion of `|ψ⟩_in ⊗ |Φ⁺⟩_si`.
#[derive(Debug, Clone, Copy)]
pub struct BellBranch {
    pub bell: BellState,
    /// Receiver's normalized state given this outcome.
    pub conditional: PureState,
    pub probability: f64,
}

/// Expands `|ψ⟩ ⊗ |Φ⁺⟩` over the Bell basis of the first two qubits using
/// `|ψ⟩|Φ⁺⟩ = ½ Σ_k |B_k⟩ ⊗ σ_k|ψ⟩`.
pub fn bell_decompose(input: &PureState) -> [BellBranch; 4] {
    BellState::ALL.map(|bell| {
        let sigma = bell.conditional_pauli().matrix();
        let v = sigma * input.amplitudes() * C64::new(0.5, 0.0);
        let probability = v.norm_squared();
        BellBranch {
            bell,
            conditional: PureState::normalized(v[0], v[1]).expect("Pauli preserves norm"),
            probability,
        }
    })
}

pub(crate) fn to_dynamic(m: &Matrix2<C64>) -> DMatrix<C64> {
    DMatrix::from_iterator(2, 2, m.iter().copied())
}

pub(crate) fn hermitize(m: DMatrix<C64>) -> DMatrix<C64> {
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending with
/// matching eigenvector columns.
pub(crate) fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(hermitize(m.clone()));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_density<R: Rng>(rng: &mut R) -> DensityMatrix {
        let p: f64 = rng.random();
        PureState::haar_random(rng)
            .projector()
            .mix(&DensityMatrix::maximally_mixed(2).unwrap(), p)
            .unwrap()
    }

    fn max_dev(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn tensor_of_mixed_states_is_mixed() {
        let half = DensityMatrix::maximally_mixed(2).unwrap();
        let out = tensor(&half, &half).unwrap();
        let expected = DensityMatrix::maximally_mixed(4).unwrap();
        assert!(max_dev(out.matrix(), expected.matrix()) < ALG_TOL);
    }

    #[test]
    fn tensor_of_projectors() {
        let out = tensor(&PureState::t0().projector(), &PureState::t1().projector()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == 1 && j == 1 { 1.0 } else { 0.0 };
                assert!((out.entry(i, j) - C64::new(want, 0.0)).norm() < ALG_TOL);
            }
        }
    }

    #[test]
    fn tensor_trace_is_product_of_traces() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let a = random_density(&mut rng);
            let b = random_density(&mut rng);
            let t = tensor(&a, &b).unwrap();
            // direct multiply-and-sum over the diagonal
            let mut tr = ZERO;
            for i in 0..2 {
                for k in 0..2 {
                    tr += a.entry(i, i) * b.entry(k, k);
                }
            }
            assert!((t.trace() - tr).norm() < ALG_TOL);
            assert!((t.trace().re - 1.0).abs() < ALG_TOL);
            assert!(DensityMatrix::new(t.matrix().clone()).is_ok());
        }
    }

    #[test]
    fn tensor_rejects_two_qubit_input() {
        let four = DensityMatrix::maximally_mixed(4).unwrap();
        let two = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(matches!(
            tensor(&four, &two),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sigma_y_maps_t0_to_t1() {
        let out = apply_unitary(&Pauli::Y.matrix(), &PureState::t0()).unwrap();
        assert!(out.same_ray(&PureState::t1()));
    }

    #[test]
    fn sigma_z_flips_diagonal() {
        let out = apply_unitary(&Pauli::Z.matrix(), &PureState::diagonal()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let anti = PureState::new(C64::new(h, 0.0), C64::new(-h, 0.0)).unwrap();
        assert!(out.same_ray(&anti));
    }

    #[test]
    fn sigma_x_on_circular_canonical_form() {
        // σx (1, i)/√2 = (i, 1)/√2 = i·(1, −i)/√2
        let out = apply_unitary(&Pauli::X.matrix(), &PureState::circular()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.alpha() - C64::new(h, 0.0)).norm() < ALG_TOL);
        assert!((out.beta() - C64::new(0.0, -h)).norm() < ALG_TOL);
    }

    #[test]
    fn apply_unitary_rejects_non_unitary() {
        let m = Matrix2::new(ONE, ONE, ZERO, ONE);
        assert!(matches!(
            apply_unitary(&m, &PureState::t0()),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn unitary_preserves_trace_on_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random_density(&mut rng);
        let out = apply_unitary(&Pauli::Y.matrix(), &rho).unwrap();
        assert!((out.trace().re - 1.0).abs() < ALG_TOL);
        assert!((out.purity() - rho.purity()).abs() < ALG_TOL);
    }

    #[test]
    fn fidelity_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = PureState::haar_random(&mut rng);
        assert!((fidelity_pure(&psi, &psi.projector()).unwrap() - 1.0).abs() < ALG_TOL);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((fidelity_pure(&PureState::t0(), &mixed).unwrap() - 0.5).abs() < ALG_TOL);
        let v = 0.917;
        let noisy = PureState::diagonal().projector().mix(&mixed, v).unwrap();
        let expected = v + (1.0 - v) / 2.0;
        assert!((expected - 0.9585).abs() < 1e-12);
        assert!((fidelity_pure(&PureState::diagonal(), &noisy).unwrap() - expected).abs() < ALG_TOL);
    }

    #[test]
    fn fidelity_rejects_two_qubit_state() {
        let four = DensityMatrix::maximally_mixed(4).unwrap();
        assert!(fidelity_pure(&PureState::t0(), &four).is_err());
    }

    #[test]
    fn partial_trace_of_bell_state_is_mixed() {
        let phi = BellState::PhiPlus.projector();
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        for keep in [Keep::First, Keep::Second] {
            let r = partial_trace(&phi, keep).unwrap();
            assert!(max_dev(r.matrix(), mixed.matrix()) < ALG_TOL);
        }
    }

    #[test]
    fn partial_trace_of_product_recovers_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_density(&mut rng);
        let b = random_density(&mut rng);
        let ab = tensor(&a, &b).unwrap();
        let first = partial_trace(&ab, Keep::First).unwrap();
        let second = partial_trace(&ab, Keep::Second).unwrap();
        assert!(max_dev(first.matrix(), a.matrix()) < ALG_TOL);
        assert!(max_dev(second.matrix(), b.matrix()) < ALG_TOL);
        let tr: C64 = (0..2).map(|i| first.entry(i, i)).sum();
        assert!((tr.re - 1.0).abs() < ALG_TOL);
    }

    #[test]
    fn partial_trace_rejects_single_qubit() {
        let two = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(partial_trace(&two, Keep::First).is_err());
    }

    #[test]
    fn bell_states_orthonormal() {
        for a in BellState::ALL {
            for b in BellState::ALL {
                let ip: C64 = a
                    .vector()
                    .iter()
                    .zip(b.vector().iter())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((ip - C64::new(want, 0.0)).norm() < ALG_TOL);
            }
        }
    }

    #[test]
    fn pauli_algebra() {
        let x = Pauli::X.matrix();
        let z = Pauli::Z.matrix();
        assert!((x * z + z * x).iter().all(|e| e.norm() < ALG_TOL));
        for p in Pauli::ALL {
            let m = p.matrix();
            assert!(Unitary2::new(m).is_ok());
            assert!((m - m.adjoint()).iter().all(|e| e.norm() < ALG_TOL));
        }
    }

    #[test]
    fn bell_decompose_examples() {
        let branches = bell_decompose(&PureState::t0());
        for b in &branches {
            assert!((b.probability - 0.25).abs() < ALG_TOL);
        }
        assert!(branches[3].conditional.same_ray(&PureState::t1()));
        assert!(branches[0].conditional.same_ray(&PureState::t0()));
    }

    #[test]
    fn density_validation_rejects_bad_matrices() {
        let bad_trace = DMatrix::from_diagonal_element(2, 2, C64::new(1.0, 0.0));
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.5, 0.0), ZERO, ZERO, C64::new(-0.5, 0.0)],
        );
        assert!(DensityMatrix::new(negative).is_err());
        let non_herm =
            DMatrix::from_row_slice(2, 2, &[C64::new(0.5, 0.0), ONE, ZERO, C64::new(0.5, 0.0)]);
        assert!(DensityMatrix::new(non_herm).is_err());
        assert!(DensityMatrix::maximally_mixed(3).is_err());
    }

    #[test]
    fn canonical_form_fixes_phase() {
        let phase = C64::from_polar(1.0, 0.7);
        let s = PureState::new(phase * 0.6, phase * C64::new(0.0, 0.8)).unwrap();
        assert!((s.alpha() - C64::new(0.6, 0.0)).norm() < ALG_TOL);
        assert!((s.beta() - C64::new(0.0, 0.8)).norm() < ALG_TOL);
        let t1 = PureState::new(ZERO, -I).unwrap();
        assert!((t1.beta() - ONE).norm() < ALG_TOL);
        assert!(PureState::new(ONE, ONE).is_err());
    }
}
