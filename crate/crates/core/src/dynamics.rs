//! Dressed states and the spectral evolution operator.
//!
//! The Hamiltonian conserves `n̂ + k Σ_j (σ_z^(j)+1)/2`, so every excitation
//! sector is diagonalized on its own. Sectors clipped by the Fock cutoff are
//! not diagonalized; [`evolution_operator`] advances them with their bare
//! energies and they are excluded from every physics check.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::hamiltonian::{
    block_matrix, excitation_sectors, matrix_element, single_qubit_basis, two_qubit_basis,
    BasisLabel, ExcitationSector, HamiltonianError, ModelConfig,
};
use crate::linalg::{eig_hermitian, ComplexMatrix, HermitianEigen, LinalgError};

/// Relative gap below which two dressed energies count as degenerate.
const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("dressed-state analysis supports 1 or 2 qubits, got {0}")]
    UnsupportedQubitCount(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// One diagonalized excitation sector.
#[derive(Debug, Clone)]
pub struct DressedBlock {
    pub excitation: usize,
    /// Photon number of the all-excited member, when the sector has one.
    pub n: Option<usize>,
    pub basis: Vec<BasisLabel>,
    /// Dressed energies Ω, ascending.
    pub omegas: Vec<f64>,
    /// Column j holds the amplitudes a_i^(j) on `basis`.
    pub amplitudes: ComplexMatrix,
}

impl DressedBlock {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Amplitudes of the j-th eigenstate in ascending energy order.
    pub fn eigenstate(&self, j: usize) -> Vec<C64> {
        self.amplitudes.col(j)
    }

    /// Index of the `rank`-th eigenstate counted from the top of the block
    /// (`rank = 0` is the highest dressed energy).
    pub fn index_from_top(&self, rank: usize) -> Option<usize> {
        self.len().checked_sub(rank + 1)
    }
}

/// All-ground states `|s, g…g⟩` with `s < k`, which no coupling reaches.
#[derive(Debug, Clone, Default)]
pub struct UncoupledBand {
    pub states: Vec<BasisLabel>,
    pub energies: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct DressedSpectrum {
    pub blocks: Vec<DressedBlock>,
    pub uncoupled: UncoupledBand,
    /// Sectors truncated by the cutoff.
    pub incomplete: Vec<ExcitationSector>,
}

impl DressedSpectrum {
    /// Block whose all-excited member carries `n` photons.
    pub fn block_for(&self, n: usize) -> Option<&DressedBlock> {
        self.blocks.iter().find(|b| b.n == Some(n))
    }

    /// Full-space indices covered by complete sectors and the uncoupled band.
    pub fn complete_indices(&self, c: &ModelConfig) -> Vec<usize> {
        let mut idx: Vec<usize> = self
            .blocks
            .iter()
            .flat_map(|b| b.basis.iter().map(|l| c.index_of(l)))
            .chain(self.uncoupled.states.iter().map(|l| c.index_of(l)))
            .collect();
        idx.sort_unstable();
        idx
    }
}

fn check_qubits(c: &ModelConfig) -> Result<(), DynamicsError> {
    match c.num_qubits() {
        1 | 2 => Ok(()),
        m => Err(DynamicsError::UnsupportedQubitCount(m)),
    }
}

/// Permutation exchanging qubits 0 and 1 inside a block basis, if the basis
/// is closed under the exchange.
fn swap_permutation(basis: &[BasisLabel]) -> Option<ComplexMatrix> {
    if basis.first()?.qubits.len() != 2 {
        return None;
    }
    let mut p = ComplexMatrix::zeros(basis.len(), basis.len());
    for (j, label) in basis.iter().enumerate() {
        let swapped = BasisLabel::new(vec![label.qubits[1], label.qubits[0]], label.photons);
        let i = basis.iter().position(|l| *l == swapped)?;
        p[(i, j)] = C64::new(1.0, 0.0);
    }
    Some(p)
}

/// Within each degenerate cluster, rotate the eigenvectors onto eigenstates
/// of `symmetry` (ascending symmetry eigenvalue).
fn resolve_degeneracies(
    eig: &mut HermitianEigen,
    symmetry: &ComplexMatrix,
) -> Result<(), LinalgError> {
    let n = eig.values.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n
            && eig.values[end] - eig.values[start]
                <= DEGENERACY_TOL * eig.values[start].abs().max(1.0)
        {
            end += 1;
        }
        if end - start > 1 {
            let cluster: Vec<usize> = (start..end).collect();
            let v = ComplexMatrix::from_fn(n, cluster.len(), |i, j| eig.vectors[(i, cluster[j])]);
            let reduced = &(&v.adjoint() * symmetry) * &v;
            let sym = eig_hermitian(&reduced)?;
            let rotated = &v * &sym.vectors;
            for (jj, &j) in cluster.iter().enumerate() {
                for i in 0..n {
                    eig.vectors[(i, j)] = rotated[(i, jj)];
                }
            }
        }
        start = end;
    }
    Ok(())
}

/// Diagonalizes the Hamiltonian on an ordered basis. Degenerate dressed
/// levels of two-qubit blocks are resolved by qubit-exchange symmetry.
pub fn diagonalize_block(
    c: &ModelConfig,
    excitation: usize,
    basis: Vec<BasisLabel>,
) -> Result<DressedBlock, DynamicsError> {
    let h = block_matrix(c, &basis);
    let mut eig = eig_hermitian(&h)?;
    if let Some(swap) = swap_permutation(&basis) {
        resolve_degeneracies(&mut eig, &swap)?;
    }
    let m = c.num_qubits();
    let n = excitation.checked_sub(m * c.photon_order);
    Ok(DressedBlock {
        excitation,
        n,
        basis,
        omegas: eig.values,
        amplitudes: eig.vectors,
    })
}

/// Dressed block labelled by the photon number `n` of its all-excited state.
pub fn dressed_block(c: &ModelConfig, n: usize) -> Result<DressedBlock, DynamicsError> {
    check_qubits(c)?;
    c.validate()?;
    let m = c.num_qubits();
    let required = n + m * c.photon_order;
    if required > c.fock_cutoff {
        return Err(HamiltonianError::CutoffTooSmall {
            cutoff: c.fock_cutoff,
            required,
        }
        .into());
    }
    let basis = if m == 1 {
        single_qubit_basis(c, n)
    } else {
        two_qubit_basis(c, n)
    };
    diagonalize_block(c, n + m * c.photon_order, basis)
}

pub fn dressed_spectrum(c: &ModelConfig) -> Result<DressedSpectrum, DynamicsError> {
    check_qubits(c)?;
    c.validate()?;
    let mut blocks = Vec::new();
    let mut uncoupled = UncoupledBand::default();
    let mut incomplete = Vec::new();
    for sector in excitation_sectors(c) {
        if !sector.complete {
            incomplete.push(sector);
        } else if sector.basis.len() == 1 {
            let label = sector.basis[0].clone();
            uncoupled.energies.push(matrix_element(c, &label, &label));
            uncoupled.states.push(label);
        } else {
            blocks.push(diagonalize_block(c, sector.excitation, sector.basis)?);
        }
    }
    Ok(DressedSpectrum {
        blocks,
        uncoupled,
        incomplete,
    })
}

/// Spectral evolution operator on the full truncated space.
pub fn evolution_operator(c: &ModelConfig, t: f64) -> Result<ComplexMatrix, DynamicsError> {
    let spectrum = dressed_spectrum(c)?;
    Ok(evolution_from_spectrum(c, &spectrum, t))
}

/// As [`evolution_operator`], reusing an existing decomposition.
pub fn evolution_from_spectrum(c: &ModelConfig, s: &DressedSpectrum, t: f64) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(c.dim(), c.dim());
    for block in &s.blocks {
        let idx: Vec<usize> = block.basis.iter().map(|l| c.index_of(l)).collect();
        let phases: Vec<C64> = block
            .omegas
            .iter()
            .map(|&w| C64::from_polar(1.0, -w * t))
            .collect();
        let a = &block.amplitudes;
        for (i, &gi) in idx.iter().enumerate() {
            for (j, &gj) in idx.iter().enumerate() {
                u[(gi, gj)] = (0..idx.len())
                    .map(|l| phases[l] * a[(i, l)] * a[(j, l)].conj())
                    .sum();
            }
        }
    }
    for (label, &w) in s.uncoupled.states.iter().zip(&s.uncoupled.energies) {
        let i = c.index_of(label);
        u[(i, i)] = C64::from_polar(1.0, -w * t);
    }
    for sector in &s.incomplete {
        for label in &sector.basis {
            let i = c.index_of(label);
            u[(i, i)] = C64::from_polar(1.0, -matrix_element(c, label, label) * t);
        }
    }
    u
}

/// `U ρ U†`.
pub fn evolve(rho0: &ComplexMatrix, u: &ComplexMatrix) -> Result<ComplexMatrix, DynamicsError> {
    if !rho0.is_square() || !u.is_square() || rho0.rows() != u.rows() {
        return Err(DynamicsError::DimensionMismatch(format!(
            "state {}x{} vs propagator {}x{}",
            rho0.rows(),
            rho0.cols(),
            u.rows(),
            u.cols()
        )));
    }
    Ok(&(u * rho0) * &u.adjoint())
}

/// Full-space ket for amplitudes given on a block basis.
pub fn embed_state(c: &ModelConfig, basis: &[BasisLabel], amplitudes: &[C64]) -> ComplexMatrix {
    let mut v = vec![C64::new(0.0, 0.0); c.dim()];
    for (label, a) in basis.iter().zip(amplitudes) {
        v[c.index_of(label)] = *a;
    }
    ComplexMatrix::column(&v)
}
