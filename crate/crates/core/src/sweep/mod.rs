//! Parameter sweeps over Δ/λ and photon number, written as CSV.

mod config;
pub mod csv;

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::dynamics::{dressed_block, embed_state, DynamicsError};
use crate::entanglement::{concurrence_pure, paper_cn, von_neumann_entropy, EntanglementError};
use crate::geometry::{berry_phase_pure, two_qubit_berry, GeometryError, PhasePath};
use crate::hamiltonian::{number_operator, HamiltonianError, ModelConfig};
use crate::linalg::{partial_trace_tail, ComplexMatrix, LinalgError, C64};

pub use config::{
    parse_config, parse_config_as, ConfigError, DeltaAxis, EigenstateSelector, SweepMode, SweepSpec,
};

const RECORD_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Entanglement(#[from] EntanglementError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("n = {n}, delta/lambda = {delta}: {reason}")]
    InvalidRecord {
        n: usize,
        delta: f64,
        reason: String,
    },
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl SweepError {
    pub fn is_io(&self) -> bool {
        matches!(self, SweepError::Io(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub delta_over_lambda: f64,
    pub n: usize,
    pub berry_over_pi: f64,
    pub entropy_nats: f64,
    pub concurrence: Option<f64>,
    pub paper_cn: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    /// Footer comment lines, without the leading `#`.
    pub footer: Vec<String>,
    pub warnings: Vec<String>,
}

impl SweepOutput {
    pub fn to_csv(&self) -> String {
        csv::render(&self.records, &self.footer)
    }

    pub fn write_to(&self, out: &mut impl Write) -> std::io::Result<()> {
        out.write_all(self.to_csv().as_bytes())?;
        out.flush()
    }

    pub fn write_file(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_csv())
    }
}

fn sorted_unique<T>(values: &[T], what: &str, warnings: &mut Vec<String>) -> Vec<T>
where
    T: Copy + PartialOrd + std::fmt::Display,
{
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let before = v.len();
    v.dedup_by(|a, b| a == b);
    if v.len() < before {
        warnings.push(format!(
            "dropped {} duplicate {what} value(s)",
            before - v.len()
        ));
    }
    v
}

/// Model for one grid point in units ħ = ω = λ = 1.
pub fn point_config(spec: &SweepSpec, n: usize, delta: f64) -> ModelConfig {
    let k = spec.photon_order;
    let m = spec.num_qubits;
    let cutoff = spec.fock_cutoff.unwrap_or((n + m * k).max(2 * k + 2));
    let mut c = ModelConfig::dimensionless(m, k, delta, cutoff);
    c.flux_ratio = spec.flux_ratio;
    for q in &mut c.qubits {
        q.coupling = spec.coupling;
    }
    c
}

/// Evaluates the selected dressed state of block `n` at detuning `delta`.
pub fn evaluate_point(spec: &SweepSpec, n: usize, delta: f64) -> Result<SweepRecord, SweepError> {
    let c = point_config(spec, n, delta);
    let block = dressed_block(&c, n)?;
    let invalid = |reason: String| SweepError::InvalidRecord { n, delta, reason };
    let j = block.index_from_top(spec.eigenstate.rank).ok_or_else(|| {
        invalid(format!(
            "eigenstate {} requested from a block of {}",
            spec.eigenstate,
            block.len()
        ))
    })?;
    let amps = block.eigenstate(j);
    let psi = embed_state(&c, &block.basis, &amps);
    let rho = ComplexMatrix::projector(&psi);

    let m = c.num_qubits();
    let mut dims = vec![2; m];
    dims.push(c.field_dim());
    let reduced = partial_trace_tail(&rho, &dims, m)?;
    let entropy = von_neumann_entropy(&reduced)?;

    let (berry, concurrence, cn) = if m == 1 {
        let n_op = number_operator(&c)?;
        let phase = berry_phase_pure(&psi, &n_op, &PhasePath::linear(1.0))?;
        (phase.reduced_over_pi(), None, None)
    } else {
        let a: [C64; 4] = amps
            .as_slice()
            .try_into()
            .map_err(|_| invalid(format!("two-qubit block of size {}", amps.len())))?;
        let phase = two_qubit_berry(&a)?;
        (
            phase.reduced_over_pi(),
            Some(clamp_unit(concurrence_pure(&a)?).ok_or_else(|| invalid("concurrence".into()))?),
            Some(paper_cn(&a)?),
        )
    };

    let max_entropy = (m as f64) * std::f64::consts::LN_2 + RECORD_TOL;
    if !(0.0..=max_entropy).contains(&entropy) {
        return Err(invalid(format!("entropy {entropy} out of range")));
    }
    if !(0.0..2.0).contains(&berry) {
        return Err(invalid(format!("berry phase {berry} pi out of range")));
    }
    if cn.is_some_and(|v| !v.is_finite()) {
        return Err(invalid("non-finite paper_cn".into()));
    }
    Ok(SweepRecord {
        delta_over_lambda: delta,
        n,
        berry_over_pi: berry,
        entropy_nats: entropy,
        concurrence,
        paper_cn: cn,
    })
}

fn clamp_unit(x: f64) -> Option<f64> {
    if (-RECORD_TOL..=1.0 + RECORD_TOL).contains(&x) {
        Some(x.clamp(0.0, 1.0))
    } else {
        None
    }
}

/// Pearson correlation, `None` when either series is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let len = x.len().min(y.len());
    if len < 2 {
        return None;
    }
    let mean = |v: &[f64]| v[..len].iter().sum::<f64>() / len as f64;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..len {
        let (dx, dy) = (x[i] - mx, y[i] - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let flat = |s: f64, m: f64| s.sqrt() <= 1e-12 * m.abs().max(1.0) * (len as f64).sqrt();
    if flat(sxx, mx) || flat(syy, my) {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn correlation_footer(records: &[SweepRecord], deltas: &[f64]) -> Vec<String> {
    let show = |r: Option<f64>| r.map_or("undefined".to_string(), csv::format_sig9);
    deltas
        .iter()
        .map(|&d| {
            let series: Vec<&SweepRecord> = records
                .iter()
                .filter(|r| r.delta_over_lambda == d)
                .collect();
            let berry: Vec<f64> = series.iter().map(|r| r.berry_over_pi).collect();
            let conc: Vec<f64> = series.iter().filter_map(|r| r.concurrence).collect();
            let cn: Vec<f64> = series.iter().filter_map(|r| r.paper_cn).collect();
            format!(
                "pearson delta_over_lambda={} berry_vs_concurrence={} berry_vs_paper_cn={}",
                csv::format_sig9(d),
                show(pearson(&berry, &conc)),
                show(pearson(&berry, &cn)),
            )
        })
        .collect()
}

/// Evaluates every (n, Δ/λ) pair of a `SweepSpec`, in parallel on `threads`
/// workers (rayon's default when `None`). Rows come back sorted by (n, Δ/λ).
pub fn run_sweep(spec: &SweepSpec, threads: Option<usize>) -> Result<SweepOutput, SweepError> {
    spec.validate()?;
    let mut warnings = Vec::new();
    let ns = sorted_unique(&spec.photon_numbers, "n", &mut warnings);
    let deltas = sorted_unique(&spec.delta.points(), "delta_over_lambda", &mut warnings);
    let grid: Vec<(usize, f64)> = ns
        .iter()
        .flat_map(|&n| deltas.iter().map(move |&d| (n, d)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| SweepError::ThreadPool(e.to_string()))?;
    let records = pool.install(|| {
        grid.par_iter()
            .map(|&(n, d)| evaluate_point(spec, n, d))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let footer = if spec.num_qubits == 2 {
        correlation_footer(&records, &deltas)
    } else {
        Vec::new()
    };
    Ok(SweepOutput {
        records,
        footer,
        warnings,
    })
}

fn require_mode(spec: &SweepSpec, mode: SweepMode) -> Result<(), SweepError> {
    if spec.mode != mode {
        return Err(ConfigError::OutOfRange {
            key: "mode".into(),
            reason: format!("expected {}, got {}", mode.name(), spec.mode.name()),
        }
        .into());
    }
    Ok(())
}

/// Single-qubit Berry phase and entropy against detuning.
pub fn run_fig2(spec: &SweepSpec, threads: Option<usize>) -> Result<SweepOutput, SweepError> {
    require_mode(spec, SweepMode::Fig2)?;
    run_sweep(spec, threads)
}

/// Two-qubit Berry phase against concurrence, with a correlation footer.
pub fn run_fig3(spec: &SweepSpec, threads: Option<usize>) -> Result<SweepOutput, SweepError> {
    require_mode(spec, SweepMode::Fig3)?;
    run_sweep(spec, threads)
}

pub fn run_custom(spec: &SweepSpec, threads: Option<usize>) -> Result<SweepOutput, SweepError> {
    require_mode(spec, SweepMode::Custom)?;
    run_sweep(spec, threads)
}
