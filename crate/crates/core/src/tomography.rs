//! Single-qubit state tomography from Pauli-basis counts and χ-matrix
//! process tomography from the four probe states.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::InputStateLabel;
use crate::qubit::{hermitian_eigen, hermitize, to_dynamic, DensityMatrix, Pauli, C64};

/// Allowed negative eigenvalue of a reconstructed χ matrix.
pub const CHI_PSD_TOL: f64 = 1e-8;
pub const CHI_TRACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
    Y,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::Z, Basis::X, Basis::Y];

    pub fn pauli(self) -> Pauli {
        match self {
            Basis::Z => Pauli::Z,
            Basis::X => Pauli::X,
            Basis::Y => Pauli::Y,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Basis::Z => "Z",
            Basis::X => "X",
            Basis::Y => "Y",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BasisCounts {
    pub plus: u64,
    pub minus: u64,
}

impl BasisCounts {
    pub fn total(&self) -> u64 {
        self.plus + self.minus
    }

    /// `(n₊ − n₋)/(n₊ + n₋)`
    pub fn expectation(&self) -> Option<f64> {
        let t = self.total();
        (t > 0).then(|| (self.plus as f64 - self.minus as f64) / t as f64)
    }
}

/// Two-outcome counts in each of the Z, X and Y bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CountTable {
    pub z: BasisCounts,
    pub x: BasisCounts,
    pub y: BasisCounts,
}

impl CountTable {
    pub fn get(&self, basis: Basis) -> BasisCounts {
        match basis {
            Basis::Z => self.z,
            Basis::X => self.x,
            Basis::Y => self.y,
        }
    }

    fn get_mut(&mut self, basis: Basis) -> &mut BasisCounts {
        match basis {
            Basis::Z => &mut self.z,
            Basis::X => &mut self.x,
            Basis::Y => &mut self.y,
        }
    }

    pub fn check_nonzero(&self) -> Result<()> {
        for b in Basis::ALL {
            if self.get(b).total() == 0 {
                return Err(Error::ZeroCounts(b.name()));
            }
        }
        Ok(())
    }
}

/// Binomial counts per basis with `p₊ = tr(ρ·(I + σ)/2)`.
pub fn simulate_counts<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    shots_per_basis: u64,
    rng: &mut R,
) -> Result<CountTable> {
    if shots_per_basis == 0 {
        return Err(Error::OutOfRange {
            name: "shots_per_basis",
            value: 0.0,
            allowed: "≥ 1",
        });
    }
    let bloch = rho.bloch()?;
    let mut table = CountTable::default();
    for (k, basis) in [Basis::X, Basis::Y, Basis::Z].into_iter().enumerate() {
        let p_plus = ((1.0 + bloch[k]) / 2.0).clamp(0.0, 1.0);
        let plus = Binomial::new(shots_per_basis, p_plus)
            .expect("probability clamped to [0, 1]")
            .sample(rng);
        *table.get_mut(basis) = BasisCounts {
            plus,
            minus: shots_per_basis - plus,
        };
    }
    Ok(table)
}

/// Linear inversion followed by projection onto the closest density matrix.
pub fn reconstruct_state(counts: &CountTable) -> Result<DensityMatrix> {
    let mut r = [0.0; 3];
    for (k, basis) in [Basis::X, Basis::Y, Basis::Z].into_iter().enumerate() {
        r[k] = counts
            .get(basis)
            .expectation()
            .ok_or(Error::ZeroCounts(basis.name()))?;
    }
    let mut m = Pauli::I.matrix();
    for (k, p) in [Pauli::X, Pauli::Y, Pauli::Z].into_iter().enumerate() {
        m += p.matrix() * C64::new(r[k], 0.0);
    }
    m *= C64::new(0.5, 0.0);
    DensityMatrix::new(project_to_density(&to_dynamic(&m)))
}

/// Closest unit-trace PSD matrix (Frobenius norm) to a Hermitian matrix:
/// negative eigenvalues are truncated and their weight spread evenly over the
/// remaining ones until none is negative.
pub fn project_to_density(m: &DMatrix<C64>) -> DMatrix<C64> {
    let d = m.nrows();
    let tr = m.trace().re;
    let scaled = if tr.abs() > f64::EPSILON {
        m / C64::new(tr, 0.0)
    } else {
        m.clone()
    };
    let (mut vals, vecs) = hermitian_eigen(&scaled);
    // ascending order: the most negative eigenvalues come first
    let mut cut = 0;
    let mut carried = 0.0;
    while cut < d {
        let remaining = (d - cut) as f64;
        if vals[cut] + carried / remaining < 0.0 {
            carried += vals[cut];
            vals[cut] = 0.0;
            cut += 1;
        } else {
            break;
        }
    }
    if cut == d {
        // degenerate input; fall back to the maximally mixed state
        return DMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0);
    }
    let share = carried / (d - cut) as f64;
    for v in vals.iter_mut().skip(cut) {
        *v += share;
    }
    let diag = DMatrix::from_diagonal(&DVector::from_iterator(
        d,
        vals.iter().map(|&v| C64::new(v, 0.0)),
    ));
    hermitize(&vecs * diag * vecs.adjoint())
}

/// Process matrix over the Pauli basis `{I, X, Y, Z}`:
/// `E(ρ) = Σ_mn χ_mn σ_m ρ σ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiMatrix {
    m: DMatrix<C64>,
}

impl ChiMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != 4 || m.ncols() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: m.nrows(),
            });
        }
        let herm = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > CHI_TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("χ not Hermitian ({herm:e})")));
        }
        let tr = m.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > CHI_TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("χ trace {tr} ≠ 1")));
        }
        let (vals, _) = hermitian_eigen(&m);
        if vals[0] < -CHI_PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "χ has negative eigenvalue {:e}",
                vals[0]
            )));
        }
        Ok(Self { m })
    }

    /// Mixture of Pauli conjugations `ρ ↦ Σ_k p_k σ_k ρ σ_k`.
    pub fn pauli_channel(probs: [f64; 4]) -> Result<Self> {
        let mut m = DMatrix::zeros(4, 4);
        for (k, p) in probs.iter().enumerate() {
            crate::error::check_probability("pauli_probability", *p)?;
            m[(k, k)] = C64::new(*p, 0.0);
        }
        Self::new(m)
    }

    /// Rank-one χ of conjugation by a single Pauli.
    pub fn pauli_conjugation(p: Pauli) -> Self {
        let mut probs = [0.0; 4];
        probs[p.index()] = 1.0;
        Self::pauli_channel(probs).expect("valid")
    }

    /// The ideal teleportation process, `ρ ↦ σy ρ σy`.
    pub fn ideal_teleportation() -> Self {
        Self::pauli_conjugation(Pauli::Y)
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn get(&self, row: Pauli, col: Pauli) -> C64 {
        self.m[(row.index(), col.index())]
    }

    /// Action of the channel on a single-qubit state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        rho.require_dim(2)?;
        let mut out = DMatrix::zeros(2, 2);
        for a in Pauli::ALL {
            let sa = to_dynamic(&a.matrix());
            for b in Pauli::ALL {
                let c = self.get(a, b);
                if c.norm() == 0.0 {
                    continue;
                }
                let sb = to_dynamic(&b.matrix());
                out += (&sa * rho.matrix() * &sb) * c;
            }
        }
        DensityMatrix::new(project_to_density(&hermitize(out)))
    }
}

impl fmt::Display for ChiMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "     ")?;
        for p in Pauli::ALL {
            write!(f, "{:>18}", p.label())?;
        }
        writeln!(f)?;
        for a in Pauli::ALL {
            write!(f, "{:>4} ", a.label())?;
            for b in Pauli::ALL {
                let z = self.get(a, b);
                write!(f, "{:>9.4}{:+8.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn pauli_components(m: &DMatrix<C64>) -> [C64; 4] {
    Pauli::ALL.map(|p| (to_dynamic(&p.matrix()) * m).trace() * 0.5)
}

/// Reconstructs χ from the channel outputs for the probe states
/// `|t0⟩, |t1⟩, |D⟩, |R⟩`.
pub fn reconstruct_process(io_pairs: &[(InputStateLabel, DensityMatrix)]) -> Result<ChiMatrix> {
    let output = |label: InputStateLabel| -> Result<&DMatrix<C64>> {
        let rho = io_pairs
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, rho)| rho)
            .ok_or(Error::MissingInput(label.name()))?;
        rho.require_dim(2)?;
        Ok(rho.matrix())
    };
    let e0 = output(InputStateLabel::T0)?;
    let e1 = output(InputStateLabel::T1)?;
    let ed = output(InputStateLabel::D)?;
    let er = output(InputStateLabel::R)?;

    let two = C64::new(2.0, 0.0);
    let e_i = e0 + e1;
    let e_z = e0 - e1;
    let e_x = ed * two - &e_i;
    let e_y = er * two - &e_i;
    let images = [e_i, e_x, e_y, e_z];

    // λ_{jk}: component k of E(σ_j)
    let mut lambda = DVector::zeros(16);
    for (j, img) in images.iter().enumerate() {
        for (k, c) in pauli_components(img).into_iter().enumerate() {
            lambda[4 * j + k] = c;
        }
    }

    // β_{jk,mn}: component k of σ_m σ_j σ_n
    let sig: Vec<DMatrix<C64>> = Pauli::ALL.iter().map(|p| to_dynamic(&p.matrix())).collect();
    let mut beta = DMatrix::zeros(16, 16);
    for j in 0..4 {
        for m in 0..4 {
            for n in 0..4 {
                let prod = &sig[m] * &sig[j] * &sig[n];
                for (k, c) in pauli_components(&prod).into_iter().enumerate() {
                    beta[(4 * j + k, 4 * m + n)] = c;
                }
            }
        }
    }

    let chi_vec = beta.lu().solve(&lambda).ok_or(Error::Singular)?;
    let chi = DMatrix::from_fn(4, 4, |m, n| chi_vec[4 * m + n]);
    ChiMatrix::new(project_to_density(&hermitize(chi)))
}

/// `tr(χ·χ_ideal)`
pub fn process_fidelity(chi: &ChiMatrix, chi_ideal: &ChiMatrix) -> f64 {
    (chi.matrix() * chi_ideal.matrix()).trace().re.clamp(0.0, 1.0)
}

/// Haar-average state fidelity of a qubit channel with process fidelity `F_p`.
pub fn average_fidelity_from_process(process_fidelity: f64) -> Result<f64> {
    crate::error::check_probability("process_fidelity", process_fidelity)?;
    Ok((2.0 * process_fidelity + 1.0) / 3.0)
}
