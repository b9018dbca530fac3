//! Multi-qubit k-photon cavity Hamiltonian on a truncated Fock space.
//!
//! ```text
//! H = ω (n̂ + 1/2)
//!   + Σ_j [E_j/2 − d_j cos(π Φ_e/Φ_0) f(n̂)] σ_z^(j)
//!   + Σ_j [g_j ψ^k g_k(n̂) σ_+^(j) + h.c.]
//! ```
//!
//! The Hilbert space is ordered qubit 0 ⊗ qubit 1 ⊗ … ⊗ field, with the
//! excited state first in every qubit factor. Couplings that would leave the
//! truncated ladder are dropped (hard truncation).
//!
//! Two independent constructions are provided: [`build_hamiltonian`] assembles
//! the operator from Kronecker products, while the block builders evaluate
//! matrix elements directly between labelled basis states.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::linalg::{kron_all, ComplexMatrix, LinalgError, DEFAULT_MAX_ENTRIES};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HamiltonianError {
    #[error("Fock cutoff {cutoff} too small, need at least {required}")]
    CutoffTooSmall { cutoff: usize, required: usize },
    #[error("Hilbert space of dimension {dim} exceeds the entry cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },
    #[error("block needs {expected} qubit(s), model has {got}")]
    WrongQubitCount { expected: usize, got: usize },
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QubitState {
    Excited,
    Ground,
}

impl QubitState {
    /// Index inside a qubit factor (excited first).
    pub fn index(self) -> usize {
        match self {
            QubitState::Excited => 0,
            QubitState::Ground => 1,
        }
    }

    fn sigma_z(self) -> f64 {
        match self {
            QubitState::Excited => 1.0,
            QubitState::Ground => -1.0,
        }
    }
}

/// Product basis state `|q_1, …, q_m, n⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel {
    pub qubits: Vec<QubitState>,
    pub photons: usize,
}

impl BasisLabel {
    pub fn new(qubits: Vec<QubitState>, photons: usize) -> Self {
        Self { qubits, photons }
    }

    pub fn excited_count(&self) -> usize {
        self.qubits
            .iter()
            .filter(|q| **q == QubitState::Excited)
            .count()
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for q in &self.qubits {
            write!(f, "{},", if *q == QubitState::Excited { 'e' } else { 'g' })?;
        }
        write!(f, "{}>", self.photons)
    }
}

/// Photon-number dependence of the longitudinal term `f(n̂)` or of the
/// k-photon coupling `g_k(n̂)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum CouplingProfile {
    #[default]
    ConstantOne,
    /// One value per photon number, starting at n = 0.
    Table(Vec<f64>),
}

impl CouplingProfile {
    pub fn value(&self, n: usize) -> f64 {
        match self {
            CouplingProfile::ConstantOne => 1.0,
            CouplingProfile::Table(t) => t[n],
        }
    }

    fn covers(&self, cutoff: usize) -> bool {
        match self {
            CouplingProfile::ConstantOne => true,
            CouplingProfile::Table(t) => t.len() > cutoff && t.iter().all(|v| v.is_finite()),
        }
    }
}

/// Per-qubit parameters in energy units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitParams {
    /// Qubit splitting E_j.
    pub splitting: f64,
    /// Transverse coupling g_j to the cavity.
    pub coupling: f64,
    /// Longitudinal amplitude d_j, multiplied by cos(π Φ_e/Φ_0).
    pub diagonal_amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub qubits: Vec<QubitParams>,
    /// Number of photons k exchanged per qubit flip.
    pub photon_order: usize,
    pub fock_cutoff: usize,
    pub photon_energy: f64,
    pub flux_ratio: f64,
    pub diagonal_profile: CouplingProfile,
    pub coupling_profile: CouplingProfile,
}

impl ModelConfig {
    /// Identical qubits in units ħ = ω = λ = 1 with coupling λ and flux
    /// Φ_0/2. The splitting is set so that `E − kω = detuning`.
    pub fn dimensionless(
        num_qubits: usize,
        photon_order: usize,
        detuning: f64,
        fock_cutoff: usize,
    ) -> Self {
        let qubit = QubitParams {
            splitting: detuning + photon_order as f64,
            coupling: 1.0,
            diagonal_amplitude: 0.0,
        };
        Self {
            qubits: vec![qubit; num_qubits],
            photon_order,
            fock_cutoff,
            photon_energy: 1.0,
            flux_ratio: 0.5,
            diagonal_profile: CouplingProfile::ConstantOne,
            coupling_profile: CouplingProfile::ConstantOne,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn field_dim(&self) -> usize {
        self.fock_cutoff + 1
    }

    pub fn dim(&self) -> usize {
        (1usize << self.num_qubits()) * self.field_dim()
    }

    /// Δ_j = E_j − k ω.
    pub fn detuning(&self, qubit: usize) -> f64 {
        self.qubits[qubit].splitting - self.photon_order as f64 * self.photon_energy
    }

    fn flux_factor(&self) -> f64 {
        (PI * self.flux_ratio).cos()
    }

    pub fn validate(&self) -> Result<(), HamiltonianError> {
        let bad = |s: &str| Err(HamiltonianError::InvalidConfig(s.to_string()));
        if self.qubits.is_empty() {
            return bad("at least one qubit is required");
        }
        if self.photon_order == 0 {
            return bad("photon order must be at least 1");
        }
        let required = 2 * self.photon_order + 2;
        if self.fock_cutoff < required {
            return Err(HamiltonianError::CutoffTooSmall {
                cutoff: self.fock_cutoff,
                required,
            });
        }
        if !(self.photon_energy.is_finite() && self.photon_energy > 0.0) {
            return bad("photon energy must be positive");
        }
        if !(0.0..1.0).contains(&self.flux_ratio) {
            return bad("flux ratio must lie in [0, 1)");
        }
        for q in &self.qubits {
            if !(q.splitting.is_finite() && q.diagonal_amplitude.is_finite()) {
                return bad("qubit parameters must be finite");
            }
            if !(q.coupling.is_finite() && q.coupling >= 0.0) {
                return bad("couplings must be finite and non-negative");
            }
        }
        if !self.diagonal_profile.covers(self.fock_cutoff)
            || !self.coupling_profile.covers(self.fock_cutoff)
        {
            return bad("profile tables must cover every photon number up to the cutoff");
        }
        Ok(())
    }

    /// Position of a label in the full product basis.
    pub fn index_of(&self, label: &BasisLabel) -> usize {
        let q = label
            .qubits
            .iter()
            .fold(0usize, |acc, s| acc * 2 + s.index());
        q * self.field_dim() + label.photons
    }

    /// Label of a full-basis index.
    pub fn label_of(&self, index: usize) -> BasisLabel {
        let m = self.num_qubits();
        let q = index / self.field_dim();
        let qubits = (0..m)
            .map(|j| {
                if (q >> (m - 1 - j)) & 1 == 0 {
                    QubitState::Excited
                } else {
                    QubitState::Ground
                }
            })
            .collect();
        BasisLabel::new(qubits, index % self.field_dim())
    }

    /// Conserved excitation number `n + k · #excited`.
    pub fn excitation_of(&self, label: &BasisLabel) -> usize {
        label.photons + self.photon_order * label.excited_count()
    }
}

/// `sqrt((n+k)!/n!)`, the matrix element of `ψ^k` between `|n+k⟩` and `|n⟩`.
pub fn ladder_factor(n: usize, k: usize) -> f64 {
    ((n + 1)..=(n + k)).map(|i| (i as f64).sqrt()).product()
}

fn check_dim(c: &ModelConfig) -> Result<usize, HamiltonianError> {
    let dim = (1usize << c.num_qubits().min(usize::BITS as usize - 1))
        .checked_mul(c.field_dim())
        .filter(|d| d.checked_mul(*d).is_some_and(|e| e <= DEFAULT_MAX_ENTRIES));
    dim.ok_or(HamiltonianError::DimensionOverflow {
        dim: usize::MAX,
        cap: DEFAULT_MAX_ENTRIES,
    })
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `I ⊗ … ⊗ op (position j) ⊗ … ⊗ I ⊗ field_op`.
fn embed(
    m: usize,
    j: Option<usize>,
    qubit_op: &ComplexMatrix,
    field_op: &ComplexMatrix,
) -> Result<ComplexMatrix, HamiltonianError> {
    let mut factors: Vec<ComplexMatrix> = (0..m)
        .map(|i| {
            if Some(i) == j {
                qubit_op.clone()
            } else {
                ComplexMatrix::identity(2)
            }
        })
        .collect();
    factors.push(field_op.clone());
    Ok(kron_all(&factors)?)
}

fn annihilation(dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            real((j as f64).sqrt())
        } else {
            real(0.0)
        }
    })
}

/// Photon-number operator `I ⊗ ψ†ψ` on the full space.
pub fn number_operator(c: &ModelConfig) -> Result<ComplexMatrix, HamiltonianError> {
    check_dim(c)?;
    let n = ComplexMatrix::from_diagonal(&(0..c.field_dim()).map(|n| n as f64).collect::<Vec<_>>());
    embed(c.num_qubits(), None, &ComplexMatrix::identity(2), &n)
}

/// Excitation-number operator `ψ†ψ + k Σ_j (σ_z^(j) + 1)/2`.
pub fn excitation_operator(c: &ModelConfig) -> Result<ComplexMatrix, HamiltonianError> {
    let mut out = number_operator(c)?;
    let excited = ComplexMatrix::from_diagonal(&[c.photon_order as f64, 0.0]);
    let id = ComplexMatrix::identity(c.field_dim());
    for j in 0..c.num_qubits() {
        out = &out + &embed(c.num_qubits(), Some(j), &excited, &id)?;
    }
    Ok(out)
}

/// Full Hamiltonian assembled from Kronecker products of the field and
/// qubit operators.
pub fn build_hamiltonian(c: &ModelConfig) -> Result<ComplexMatrix, HamiltonianError> {
    c.validate()?;
    check_dim(c)?;
    let m = c.num_qubits();
    let nf = c.field_dim();
    let k = c.photon_order;

    let field_energy = ComplexMatrix::from_diagonal(
        &(0..nf)
            .map(|n| c.photon_energy * (n as f64 + 0.5))
            .collect::<Vec<_>>(),
    );
    let id_field = ComplexMatrix::identity(nf);
    let f_diag = ComplexMatrix::from_diagonal(
        &(0..nf)
            .map(|n| c.diagonal_profile.value(n))
            .collect::<Vec<_>>(),
    );
    let g_diag = ComplexMatrix::from_diagonal(
        &(0..nf)
            .map(|n| c.coupling_profile.value(n))
            .collect::<Vec<_>>(),
    );
    let a = annihilation(nf);
    let mut a_k = ComplexMatrix::identity(nf);
    for _ in 0..k {
        a_k = &a_k * &a;
    }
    let lower_k = &a_k * &g_diag;

    let sigma_z = ComplexMatrix::from_diagonal(&[1.0, -1.0]);
    let sigma_plus = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);

    let mut h = embed(m, None, &ComplexMatrix::identity(2), &field_energy)?;
    for (j, q) in c.qubits.iter().enumerate() {
        let bare = embed(m, Some(j), &sigma_z, &id_field)?.scale(real(q.splitting / 2.0));
        h = &h + &bare;
        let long = q.diagonal_amplitude * c.flux_factor();
        if long != 0.0 {
            let term = embed(m, Some(j), &sigma_z, &f_diag)?.scale(real(-long));
            h = &h + &term;
        }
        if q.coupling != 0.0 {
            let raise = embed(m, Some(j), &sigma_plus, &lower_k)?.scale(real(q.coupling));
            h = &h + &raise;
            h = &h + &raise.adjoint();
        }
    }
    Ok(h)
}

/// `⟨bra|H|ket⟩` evaluated from the basis labels.
pub fn matrix_element(c: &ModelConfig, bra: &BasisLabel, ket: &BasisLabel) -> f64 {
    let k = c.photon_order;
    if bra == ket {
        let n = bra.photons;
        let mut e = c.photon_energy * (n as f64 + 0.5);
        for (q, s) in c.qubits.iter().zip(&bra.qubits) {
            let long = q.diagonal_amplitude * c.flux_factor() * c.diagonal_profile.value(n);
            e += s.sigma_z() * (q.splitting / 2.0 - long);
        }
        return e;
    }
    let differing: Vec<usize> = (0..bra.qubits.len())
        .filter(|&j| bra.qubits[j] != ket.qubits[j])
        .collect();
    let [j] = differing[..] else { return 0.0 };
    // Orient so that `hi` carries the excited qubit and fewer photons.
    let (hi, lo) = if bra.qubits[j] == QubitState::Excited {
        (bra, ket)
    } else {
        (ket, bra)
    };
    if lo.photons != hi.photons + k {
        return 0.0;
    }
    c.qubits[j].coupling * c.coupling_profile.value(lo.photons) * ladder_factor(hi.photons, k)
}

/// Hamiltonian restricted to an ordered list of basis states.
pub fn block_matrix(c: &ModelConfig, basis: &[BasisLabel]) -> ComplexMatrix {
    ComplexMatrix::from_fn(basis.len(), basis.len(), |i, j| {
        real(matrix_element(c, &basis[i], &basis[j]))
    })
}

pub fn single_qubit_basis(c: &ModelConfig, n: usize) -> Vec<BasisLabel> {
    use QubitState::*;
    vec![
        BasisLabel::new(vec![Excited], n),
        BasisLabel::new(vec![Ground], n + c.photon_order),
    ]
}

pub fn two_qubit_basis(c: &ModelConfig, n: usize) -> Vec<BasisLabel> {
    use QubitState::*;
    let k = c.photon_order;
    vec![
        BasisLabel::new(vec![Excited, Excited], n),
        BasisLabel::new(vec![Excited, Ground], n + k),
        BasisLabel::new(vec![Ground, Excited], n + k),
        BasisLabel::new(vec![Ground, Ground], n + 2 * k),
    ]
}

fn check_block(c: &ModelConfig, qubits: usize, n: usize) -> Result<(), HamiltonianError> {
    c.validate()?;
    if c.num_qubits() != qubits {
        return Err(HamiltonianError::WrongQubitCount {
            expected: qubits,
            got: c.num_qubits(),
        });
    }
    let required = n + qubits * c.photon_order;
    if required > c.fock_cutoff {
        return Err(HamiltonianError::CutoffTooSmall {
            cutoff: c.fock_cutoff,
            required,
        });
    }
    Ok(())
}

/// 2×2 block on `{|e,n⟩, |g,n+k⟩}`.
pub fn single_qubit_block(c: &ModelConfig, n: usize) -> Result<ComplexMatrix, HamiltonianError> {
    check_block(c, 1, n)?;
    Ok(block_matrix(c, &single_qubit_basis(c, n)))
}

/// 4×4 block on `{|e,e,n⟩, |e,g,n+k⟩, |g,e,n+k⟩, |g,g,n+2k⟩}`.
pub fn two_qubit_block(c: &ModelConfig, n: usize) -> Result<ComplexMatrix, HamiltonianError> {
    check_block(c, 2, n)?;
    Ok(block_matrix(c, &two_qubit_basis(c, n)))
}

/// Basis states sharing one excitation number.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationSector {
    pub excitation: usize,
    /// Ordered by decreasing number of excited qubits, then by qubit pattern.
    pub basis: Vec<BasisLabel>,
    /// False when the cutoff removed some member of the sector.
    pub complete: bool,
}

/// Partition of the truncated space into excitation-number sectors, in
/// increasing excitation order.
pub fn excitation_sectors(c: &ModelConfig) -> Vec<ExcitationSector> {
    let m = c.num_qubits();
    let k = c.photon_order;
    let max_exc = c.fock_cutoff + m * k;
    let mut out = Vec::new();
    for exc in 0..=max_exc {
        let mut basis = Vec::new();
        let mut complete = true;
        for pattern in 0..(1usize << m) {
            let qubits: Vec<QubitState> = (0..m)
                .map(|j| {
                    if (pattern >> (m - 1 - j)) & 1 == 0 {
                        QubitState::Excited
                    } else {
                        QubitState::Ground
                    }
                })
                .collect();
            let excited = qubits.iter().filter(|q| **q == QubitState::Excited).count();
            let Some(photons) = exc.checked_sub(excited * k) else {
                continue;
            };
            if photons > c.fock_cutoff {
                complete = false;
                continue;
            }
            basis.push(BasisLabel::new(qubits, photons));
        }
        basis.sort_by(|a, b| {
            b.excited_count()
                .cmp(&a.excited_count())
                .then_with(|| a.qubits.cmp(&b.qubits))
        });
        if !basis.is_empty() {
            out.push(ExcitationSector {
                excitation: exc,
                basis,
                complete,
            });
        }
    }
    out
}
