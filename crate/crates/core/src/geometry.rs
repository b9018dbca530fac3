//! Berry phases.
//!
//! The cavity phase is probed with the phase-shift operator
//! `R(t) = exp(−i φ(t) ψ†ψ)`, with φ swept from 0 to 2π over one period.
//! A state `|χ⟩` picks up `γ = i ∮ ⟨χ|R†(dR/dt)|χ⟩ dt = 2π ⟨χ|ψ†ψ|χ⟩`.
//!
//! For mixed states the phase is the argument of the weighted sum of
//! per-component phase factors, each with its dynamical part removed by the
//! parallel-transport integral. The undefined final propagator in that
//! expression is taken to be the end point of the same path.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::hamiltonian::{single_qubit_block, HamiltonianError, ModelConfig};
use crate::linalg::{eig_hermitian, exp_hermitian, ComplexMatrix, LinalgError};

/// Default trapezoid resolution per cycle.
pub const DEFAULT_SAMPLES: usize = 512;
const MAX_SAMPLES: usize = 1 << 16;
const QUADRATURE_TOL: f64 = 1e-8;
const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid phase path: {0}")]
    InvalidPath(String),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("sample {index} is not unitary (defect {defect:.3e})")]
    NonUnitarySample { index: usize, defect: f64 },
    #[error("ensemble weights {0} and {1} are degenerate")]
    DegenerateWeights(usize, usize),
    #[error("ensemble projectors are not orthonormal pure states: {0}")]
    NonOrthonormalEnsemble(String),
    #[error("invalid ensemble weights: {0}")]
    InvalidWeights(String),
    #[error("phase is undefined: the weighted phase factors cancel")]
    UndefinedPhase,
    #[error("closed form needs a single qubit, model has {0}")]
    UnsupportedQubitCount(usize),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A phase reported both unreduced and folded into `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerryPhase {
    pub raw: f64,
    pub reduced: f64,
}

impl BerryPhase {
    pub fn from_raw(raw: f64) -> Self {
        Self {
            raw,
            reduced: reduce_angle(raw),
        }
    }

    /// Reduced value in units of π, in `[0, 2)`.
    pub fn reduced_over_pi(&self) -> f64 {
        self.reduced / PI
    }
}

/// Folds an angle into `[0, 2π)`. Values within rounding of a multiple of
/// 2π map to 0.
pub fn reduce_angle(raw: f64) -> f64 {
    let r = raw.rem_euclid(TAU);
    let slack = 1e-12 * raw.abs().max(1.0);
    if r >= TAU - slack || r < slack {
        0.0
    } else {
        r
    }
}

/// Shape of φ(t) on the normalized time s = t/τ ∈ [0, 1].
#[derive(Debug, Clone, Copy)]
pub enum PhaseProfile {
    /// φ = 2π s.
    Linear,
    /// φ = 2π s − sin(2π s), starting and stopping with zero rate.
    RaisedCosine,
    /// User supplied profile and rate, both on normalized time. The rate
    /// must be the derivative of the profile with respect to s.
    Custom {
        phase: fn(f64) -> f64,
        rate: fn(f64) -> f64,
    },
}

impl PhaseProfile {
    fn eval(&self, s: f64) -> (f64, f64) {
        match *self {
            PhaseProfile::Linear => (TAU * s, TAU),
            PhaseProfile::RaisedCosine => {
                (TAU * s - (TAU * s).sin(), TAU * (1.0 - (TAU * s).cos()))
            }
            PhaseProfile::Custom { phase, rate } => (phase(s), rate(s)),
        }
    }
}

/// Cyclic sweep of the cavity phase over one period.
#[derive(Debug, Clone, Copy)]
pub struct PhasePath {
    period: f64,
    profile: PhaseProfile,
    samples: usize,
}

impl PhasePath {
    pub fn new(period: f64, profile: PhaseProfile, samples: usize) -> Result<Self, GeometryError> {
        if !(period.is_finite() && period > 0.0) {
            return Err(GeometryError::InvalidPath(format!(
                "period {period} must be positive"
            )));
        }
        if samples < 2 {
            return Err(GeometryError::TooFewSamples {
                needed: 2,
                got: samples,
            });
        }
        let path = Self {
            period,
            profile,
            samples,
        };
        let (start, _) = profile.eval(0.0);
        let (end, _) = profile.eval(1.0);
        if start.abs() > 1e-12 || (end - TAU).abs() > 1e-12 {
            return Err(GeometryError::InvalidPath(format!(
                "endpoints must be 0 and 2π, got {start} and {end}"
            )));
        }
        let probe = 1024;
        let mut prev = start;
        for i in 1..=probe {
            let (phi, rate) = profile.eval(i as f64 / probe as f64);
            if phi < prev - 1e-12 || rate < -1e-12 {
                return Err(GeometryError::InvalidPath(
                    "profile must be non-decreasing".into(),
                ));
            }
            prev = phi;
        }
        Ok(path)
    }

    pub fn linear(period: f64) -> Self {
        Self::new(period, PhaseProfile::Linear, DEFAULT_SAMPLES).expect("linear path is valid")
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// φ(t).
    pub fn phase(&self, t: f64) -> f64 {
        self.profile.eval(t / self.period).0
    }

    /// dφ/dt.
    pub fn rate(&self, t: f64) -> f64 {
        self.profile.eval(t / self.period).1 / self.period
    }
}

fn trapezoid(values: &[f64], dt: f64) -> f64 {
    let n = values.len();
    let inner: f64 = values[1..n - 1].iter().sum();
    dt * (inner + 0.5 * (values[0] + values[n - 1]))
}

fn trapezoid_c(values: &[C64], dt: f64) -> C64 {
    let n = values.len();
    let inner: C64 = values[1..n - 1].iter().sum();
    (inner + (values[0] + values[n - 1]) * 0.5) * dt
}

fn check_ket(state: &ComplexMatrix, dim: usize) -> Result<(), GeometryError> {
    if state.cols() != 1 || state.rows() != dim {
        return Err(GeometryError::DimensionMismatch(format!(
            "state is {}x{}, operator dimension {dim}",
            state.rows(),
            state.cols()
        )));
    }
    let norm2 = state.inner(state).re;
    if (norm2 - 1.0).abs() > NORM_TOL {
        return Err(GeometryError::NotNormalized(norm2));
    }
    Ok(())
}

/// `H' = R H R† − i R dR†/dt = R H R† + φ̇ n̂` at an instant where the cavity
/// phase is `phi` and its rate `phi_rate`.
pub fn rotated_hamiltonian(
    h: &ComplexMatrix,
    phi: f64,
    phi_rate: f64,
    n_op: &ComplexMatrix,
) -> Result<ComplexMatrix, GeometryError> {
    if !h.is_square() || !n_op.is_square() || h.rows() != n_op.rows() {
        return Err(GeometryError::DimensionMismatch(format!(
            "H is {}x{}, n is {}x{}",
            h.rows(),
            h.cols(),
            n_op.rows(),
            n_op.cols()
        )));
    }
    let r = exp_hermitian(n_op, phi)?;
    let rotated = &(&r * h) * &r.adjoint();
    Ok(&rotated + &n_op.scale(C64::new(phi_rate, 0.0)))
}

/// `2π ⟨χ|n̂|χ⟩`, the analytic value of the cyclic phase.
pub fn berry_phase_expectation(
    state: &ComplexMatrix,
    n_op: &ComplexMatrix,
) -> Result<BerryPhase, GeometryError> {
    check_ket(state, n_op.rows())?;
    Ok(BerryPhase::from_raw(TAU * n_op.expectation(state).re))
}

/// Berry phase of a pure state under the cavity phase sweep, integrated
/// along the path by the trapezoid rule. The resolution starts at the path's
/// sample count and is doubled until two successive estimates agree; the
/// last pair is combined with one Richardson step.
pub fn berry_phase_pure(
    state: &ComplexMatrix,
    n_op: &ComplexMatrix,
    path: &PhasePath,
) -> Result<BerryPhase, GeometryError> {
    if !n_op.is_square() {
        return Err(GeometryError::DimensionMismatch(
            "number operator must be square".into(),
        ));
    }
    check_ket(state, n_op.rows())?;
    let eig = eig_hermitian(n_op)?;
    let coeffs = &eig.vectors.adjoint() * state;
    let dim = n_op.rows();

    // i <χ|R† dR/dt|χ> at time t, with dR/dt = −i φ̇ n̂ R.
    let integrand = |t: f64| -> f64 {
        let phi = path.phase(t);
        let rotated: Vec<C64> = (0..dim)
            .map(|l| coeffs[(l, 0)] * C64::from_polar(1.0, -phi * eig.values[l]))
            .collect();
        let w = &eig.vectors * &ComplexMatrix::column(&rotated);
        let dw = (n_op * &w).scale(C64::new(0.0, -path.rate(t)));
        (C64::i() * w.inner(&dw)).re
    };

    let evaluate = |samples: usize| -> f64 {
        let dt = path.period / (samples - 1) as f64;
        let values: Vec<f64> = (0..samples).map(|i| integrand(i as f64 * dt)).collect();
        trapezoid(&values, dt)
    };

    let mut samples = path.samples;
    let mut coarse = evaluate(samples);
    let mut estimate = coarse;
    while samples < MAX_SAMPLES {
        samples = 2 * samples - 1;
        let finer = evaluate(samples);
        let change = finer - coarse;
        estimate = finer + change / 3.0;
        coarse = finer;
        if change.abs() < QUADRATURE_TOL {
            break;
        }
    }
    Ok(BerryPhase::from_raw(estimate))
}

/// Which dressed state of a single-qubit block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Higher dressed energy.
    Upper,
    Lower,
}

/// Analytic Berry phase of a single-qubit dressed state:
/// `2πn + πk(1 ∓ Δ/√(Δ² + 4μ_n²))`, with Δ the diagonal splitting of the
/// block and μ_n its off-diagonal element.
pub fn berry_phase_dressed_closed_form(
    c: &ModelConfig,
    n: usize,
    branch: Branch,
) -> Result<BerryPhase, GeometryError> {
    if c.num_qubits() != 1 {
        return Err(GeometryError::UnsupportedQubitCount(c.num_qubits()));
    }
    let block = single_qubit_block(c, n)?;
    let delta = block[(0, 0)].re - block[(1, 1)].re;
    let mu = block[(0, 1)].re;
    let root = (delta * delta + 4.0 * mu * mu).sqrt();
    let x = if root == 0.0 { 0.0 } else { delta / root };
    let k = c.photon_order as f64;
    let mixing = match branch {
        Branch::Upper => 1.0 - x,
        Branch::Lower => 1.0 + x,
    };
    Ok(BerryPhase::from_raw(TAU * n as f64 + PI * k * mixing))
}

/// Propagators sampled on a uniform time grid.
#[derive(Debug, Clone)]
pub struct SampledPath {
    pub dt: f64,
    pub samples: Vec<ComplexMatrix>,
}

impl SampledPath {
    /// Samples `f` at `count` points spanning `[0, period]`.
    pub fn from_fn(period: f64, count: usize, f: impl Fn(f64) -> ComplexMatrix) -> Self {
        let dt = if count > 1 {
            period / (count - 1) as f64
        } else {
            0.0
        };
        Self {
            dt,
            samples: (0..count).map(|i| f(i as f64 * dt)).collect(),
        }
    }

    fn check(&self, needed: usize, dim: usize) -> Result<(), GeometryError> {
        if self.samples.len() < needed {
            return Err(GeometryError::TooFewSamples {
                needed,
                got: self.samples.len(),
            });
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(GeometryError::InvalidPath(format!(
                "time step {} must be positive",
                self.dt
            )));
        }
        for (index, u) in self.samples.iter().enumerate() {
            if !u.is_square() || u.rows() != dim {
                return Err(GeometryError::DimensionMismatch(format!(
                    "sample {index} is {}x{}, expected {dim}x{dim}",
                    u.rows(),
                    u.cols()
                )));
            }
            let defect = (&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(dim));
            if defect > 1e-8 {
                return Err(GeometryError::NonUnitarySample { index, defect });
            }
        }
        Ok(())
    }

    /// Second-order central difference at an interior sample.
    fn central_derivative(&self, i: usize) -> ComplexMatrix {
        (&self.samples[i + 1] - &self.samples[i - 1]).scale(C64::new(0.5 / self.dt, 0.0))
    }

    /// Derivative using the five-point stencil where it fits and
    /// second-order one-sided or central differences near the ends.
    fn derivative(&self, i: usize) -> ComplexMatrix {
        let s = &self.samples;
        let n = s.len();
        let w = |coeffs: &[(usize, f64)]| {
            let mut acc = ComplexMatrix::zeros(s[0].rows(), s[0].cols());
            for &(j, c) in coeffs {
                acc = &acc + &s[j].scale(C64::new(c / self.dt, 0.0));
            }
            acc
        };
        if n >= 5 && i >= 2 && i + 2 < n {
            w(&[
                (i - 2, 1.0 / 12.0),
                (i - 1, -8.0 / 12.0),
                (i + 1, 8.0 / 12.0),
                (i + 2, -1.0 / 12.0),
            ])
        } else if i == 0 {
            w(&[(0, -1.5), (1, 2.0), (2, -0.5)])
        } else if i == n - 1 {
            w(&[(n - 1, 1.5), (n - 2, -2.0), (n - 3, 0.5)])
        } else {
            self.central_derivative(i)
        }
    }
}

/// `max |Tr[ρ_k(t) U̇(t) U†(t)]|` over interior samples, with
/// `ρ_k(t) = U(t) ρ_k U†(t)` and central differences for `U̇`. Zero for a
/// parallel-transported path.
pub fn parallel_transport_residual(
    path: &SampledPath,
    rho_k: &ComplexMatrix,
) -> Result<f64, GeometryError> {
    let dim = rho_k.rows();
    path.check(3, dim)?;
    let mut worst = 0.0f64;
    for i in 1..path.samples.len() - 1 {
        let u = &path.samples[i];
        let rho_t = &(u * rho_k) * &u.adjoint();
        let generator = &path.central_derivative(i) * &u.adjoint();
        worst = worst.max((&rho_t * &generator).trace().norm());
    }
    Ok(worst)
}

/// Non-degenerate mixture of orthonormal pure states.
#[derive(Debug, Clone)]
pub struct MixedEnsemble {
    weights: Vec<f64>,
    projectors: Vec<ComplexMatrix>,
}

impl MixedEnsemble {
    pub fn new(weights: Vec<f64>, projectors: Vec<ComplexMatrix>) -> Result<Self, GeometryError> {
        if weights.is_empty() || weights.len() != projectors.len() {
            return Err(GeometryError::InvalidWeights(format!(
                "{} weights for {} projectors",
                weights.len(),
                projectors.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(GeometryError::InvalidWeights(
                "weights must be positive".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(GeometryError::InvalidWeights(format!(
                "weights sum to {total}"
            )));
        }
        for i in 0..weights.len() {
            for j in (i + 1)..weights.len() {
                if (weights[i] - weights[j]).abs() <= 1e-9 {
                    return Err(GeometryError::DegenerateWeights(i, j));
                }
            }
        }
        let dim = projectors[0].rows();
        for (i, p) in projectors.iter().enumerate() {
            if !p.is_square() || p.rows() != dim {
                return Err(GeometryError::DimensionMismatch(format!(
                    "projector {i} has the wrong shape"
                )));
            }
            if (p.trace() - C64::new(1.0, 0.0)).norm() > 1e-10
                || (p * p).max_abs_diff(p) > 1e-10
                || !p.is_hermitian(1e-10)
            {
                return Err(GeometryError::NonOrthonormalEnsemble(format!(
                    "projector {i} is not a pure state"
                )));
            }
            for (j, q) in projectors.iter().enumerate().skip(i + 1) {
                let overlap = (p * q).trace().norm();
                if overlap > 1e-10 {
                    return Err(GeometryError::NonOrthonormalEnsemble(format!(
                        "Tr[ρ_{i} ρ_{j}] = {overlap:.3e}"
                    )));
                }
            }
        }
        Ok(Self {
            weights,
            projectors,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    /// `Σ_k ξ_k ρ_k`.
    pub fn density(&self) -> ComplexMatrix {
        let dim = self.projectors[0].rows();
        self.weights
            .iter()
            .zip(&self.projectors)
            .fold(ComplexMatrix::zeros(dim, dim), |acc, (w, p)| {
                &acc + &p.scale(C64::new(*w, 0.0))
            })
    }
}

/// `arg Σ_k ξ_k f_k` in (−π, π].
pub fn weighted_phase(weights: &[f64], factors: &[C64]) -> Result<f64, GeometryError> {
    if weights.len() != factors.len() {
        return Err(GeometryError::InvalidWeights(format!(
            "{} weights for {} factors",
            weights.len(),
            factors.len()
        )));
    }
    let total: C64 = weights.iter().zip(factors).map(|(w, f)| f * *w).sum();
    if total.norm() < 1e-14 {
        return Err(GeometryError::UndefinedPhase);
    }
    Ok(total.arg())
}

/// Mixed-state geometric phase of `ens` along the sampled path `u0`,
/// closing with `u_final` (normally the last sample of `u0`):
///
/// `arg Σ_k ξ_k Tr[ρ_k U_final] exp(−∫ Tr[ρ_k U₀† U̇₀] dt)`.
///
/// The trace under the integral is imaginary for unitary paths, so each
/// exponential is a pure phase that removes the dynamical contribution.
pub fn berry_phase_mixed(
    ens: &MixedEnsemble,
    u0: &SampledPath,
    u_final: &ComplexMatrix,
) -> Result<f64, GeometryError> {
    let dim = ens.projectors[0].rows();
    u0.check(3, dim)?;
    if !u_final.is_square() || u_final.rows() != dim {
        return Err(GeometryError::DimensionMismatch(
            "final propagator has the wrong shape".into(),
        ));
    }
    let generators: Vec<ComplexMatrix> = (0..u0.samples.len())
        .map(|i| &u0.samples[i].adjoint() * &u0.derivative(i))
        .collect();
    let factors: Vec<C64> = ens
        .projectors
        .iter()
        .map(|rho| {
            let traces: Vec<C64> = generators.iter().map(|g| (rho * g).trace()).collect();
            let dynamical = trapezoid_c(&traces, u0.dt);
            (rho * u_final).trace() * (-dynamical).exp()
        })
        .collect();
    weighted_phase(&ens.weights, &factors)
}

/// `2π(|a₁|² − |a₄|²)` for amplitudes on `{|e,e,n⟩, |e,g,n+k⟩, |g,e,n+k⟩, |g,g,n+2k⟩}`.
pub fn two_qubit_berry(a: &[C64; 4]) -> Result<BerryPhase, GeometryError> {
    let norm2: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    if (norm2 - 1.0).abs() > NORM_TOL {
        return Err(GeometryError::NotNormalized(norm2));
    }
    Ok(BerryPhase::from_raw(
        TAU * (a[0].norm_sqr() - a[3].norm_sqr()),
    ))
}
