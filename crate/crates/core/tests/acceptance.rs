//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI, TAU};
use std::process::Command;

use qberry::dynamics::{dressed_block, dressed_spectrum, embed_state, evolution_operator};
use qberry::entanglement::{concurrence_pure, concurrence_wootters, von_neumann_entropy};
use qberry::geometry::{
    berry_phase_dressed_closed_form, berry_phase_mixed, berry_phase_pure,
    parallel_transport_residual, reduce_angle, weighted_phase, Branch, MixedEnsemble, PhasePath,
    PhaseProfile, SampledPath,
};
use qberry::hamiltonian::{build_hamiltonian, number_operator, ModelConfig, QubitParams};
use qberry::linalg::{exp_hermitian, kron, partial_trace_tail, ComplexMatrix, C64};
use qberry::sweep::{self, pearson, SweepMode, SweepSpec};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn cutoff(n: usize, m: usize, k: usize) -> usize {
    (n + m * k).max(2 * k + 2)
}

fn upper_state(cfg: &ModelConfig, n: usize) -> (ComplexMatrix, f64) {
    let b = dressed_block(cfg, n).unwrap();
    let j = b.index_from_top(0).unwrap();
    (embed_state(cfg, &b.basis, &b.eigenstate(j)), b.omegas[j])
}

fn qubit_entropy(cfg: &ModelConfig, psi: &ComplexMatrix) -> f64 {
    let rho = ComplexMatrix::projector(psi);
    let reduced = partial_trace_tail(&rho, &[2, cfg.field_dim()], 1).unwrap();
    von_neumann_entropy(&reduced).unwrap()
}

fn resonance_anchor() -> Outcome {
    let mut worst_phase = 0.0f64;
    let mut worst_entropy = 0.0f64;
    for n in [0, 10] {
        let cfg = ModelConfig::dimensionless(1, 1, 0.0, cutoff(n, 1, 1));
        let (psi, _) = upper_state(&cfg, n);
        let g = berry_phase_pure(
            &psi,
            &number_operator(&cfg).unwrap(),
            &PhasePath::linear(1.0),
        )
        .unwrap();
        worst_phase = worst_phase.max((g.reduced - PI).abs());
        worst_entropy = worst_entropy.max((qubit_entropy(&cfg, &psi) - LN_2).abs());
    }
    outcome(
        worst_phase < 1e-9 && worst_entropy < 1e-9,
        format!(
            "max |gamma - pi| = {worst_phase:.2e}, max |S - ln2| = {worst_entropy:.2e} (tol 1e-9)"
        ),
    )
}

fn detuning_decay() -> Outcome {
    let out = sweep::run_fig2(&SweepSpec::defaults(SweepMode::Fig2), None).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for n in [0, 10] {
        let rows: Vec<_> = out.records.iter().filter(|r| r.n == n).collect();
        let monotone = |f: &dyn Fn(usize) -> f64| (1..rows.len()).all(|i| f(i) <= f(i - 1) + 1e-12);
        let berry_ok = monotone(&|i| rows[i].berry_over_pi);
        let entropy_ok = monotone(&|i| rows[i].entropy_nats);
        ok &= rows.len() == 200 && berry_ok && entropy_ok;
        notes.push(format!(
            "n={n}: {} rows, monotone berry {berry_ok}, entropy {entropy_ok}",
            rows.len()
        ));
        if n == 0 {
            let (first, last) = (rows[0], rows[rows.len() - 1]);
            let rb = last.berry_over_pi / first.berry_over_pi;
            let rs = last.entropy_nats / first.entropy_nats;
            ok &= last.delta_over_lambda == 10.0 && rb < 0.35 && rs < 0.35;
            notes.push(format!(
                "n=0 ratios at 10: berry {rb:.4}, entropy {rs:.4} (< 0.35)"
            ));
        }
    }
    outcome(ok, notes.join("; "))
}

fn closed_form_agreement() -> Outcome {
    let path = PhasePath::new(1.0, PhaseProfile::Linear, 512).unwrap();
    let mut worst = 0.0f64;
    let mut count = 0;
    for k in [1, 2] {
        for n in [0, 1, 5, 10] {
            for i in 0..50 {
                let delta = 10.0 * i as f64 / 49.0;
                let cfg = ModelConfig::dimensionless(1, k, delta, cutoff(n, 1, k));
                let (psi, _) = upper_state(&cfg, n);
                let q = berry_phase_pure(&psi, &number_operator(&cfg).unwrap(), &path).unwrap();
                let exact = berry_phase_dressed_closed_form(&cfg, n, Branch::Upper).unwrap();
                let d = (q.reduced - exact.reduced).abs();
                worst = worst.max(d.min(TAU - d));
                count += 1;
            }
        }
    }
    outcome(
        worst < 1e-9,
        format!("{count} points, max deviation {worst:.2e} rad (tol 1e-9)"),
    )
}

/// Upper eigenvector of [[Δ/2, μ], [μ, −Δ/2]] by the quadratic formula.
fn two_level_oracle(delta: f64, mu: f64) -> (f64, f64) {
    let root = (delta * delta / 4.0 + mu * mu).sqrt();
    let (x, y) = (mu, root - delta / 2.0);
    let norm2 = x * x + y * y;
    let p_excited = x * x / norm2;
    let photons = 1.0 - p_excited;
    let entropy = -p_excited * p_excited.ln() - photons * photons.ln();
    (2.0 * photons, entropy)
}

fn spot_value() -> Outcome {
    let mut spec = SweepSpec::defaults(SweepMode::Fig2);
    spec.delta = sweep::DeltaAxis::Values(vec![2.0]);
    spec.photon_numbers = vec![0];
    let row = sweep::run_fig2(&spec, Some(1)).unwrap().records[0].clone();
    let (berry, entropy) = two_level_oracle(2.0, 1.0);
    let db = (row.berry_over_pi - berry).abs();
    let ds = (row.entropy_nats - entropy).abs();
    let literal = (berry - (1.0 - 2.0 / 8f64.sqrt())).abs();
    outcome(
        db < 1e-6 && ds < 1e-6 && literal < 1e-12,
        format!(
            "berry/pi {:.9} vs oracle {berry:.9}, entropy {:.9} vs oracle {entropy:.9} (tol 1e-6)",
            row.berry_over_pi, row.entropy_nats
        ),
    )
}

fn random_config(rng: &mut StdRng) -> ModelConfig {
    let m = rng.gen_range(1..=2);
    let k = rng.gen_range(1..=2);
    let mut cfg = ModelConfig::dimensionless(m, k, 0.0, 2 * k + rng.gen_range(2..5));
    for q in &mut cfg.qubits {
        *q = QubitParams {
            splitting: k as f64 + rng.gen_range(-2.0..2.0),
            coupling: rng.gen_range(0.1..1.5),
            diagonal_amplitude: rng.gen_range(-1.0..1.0),
        };
    }
    cfg.flux_ratio = rng.gen_range(0.0..0.99);
    cfg
}

fn evolution_operator_check() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst_exp = 0.0f64;
    let mut worst_group = 0.0f64;
    for _ in 0..10 {
        let cfg = random_config(&mut rng);
        let t = rng.gen_range(-3.0..3.0);
        let complete = dressed_spectrum(&cfg).unwrap().complete_indices(&cfg);
        let u = evolution_operator(&cfg, t).unwrap();
        let reference = exp_hermitian(&build_hamiltonian(&cfg).unwrap(), t).unwrap();
        worst_exp = worst_exp.max(
            u.submatrix(&complete)
                .max_abs_diff(&reference.submatrix(&complete)),
        );

        let (t1, t2) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let product =
            &evolution_operator(&cfg, t1).unwrap() * &evolution_operator(&cfg, t2).unwrap();
        let joint = evolution_operator(&cfg, t1 + t2).unwrap();
        worst_group = worst_group.max(
            product
                .submatrix(&complete)
                .max_abs_diff(&joint.submatrix(&complete)),
        );
    }
    outcome(
        worst_exp < 1e-9 && worst_group < 1e-9,
        format!("10 configs: |U - exp| {worst_exp:.2e}, group law {worst_group:.2e} (tol 1e-9)"),
    )
}

fn parallel_transport() -> Outcome {
    let mut worst_fixed = 0.0f64;
    let mut worst_rel = 0.0f64;
    let mut states = 0;
    for (m, delta, n) in [(1, 0.5, 0), (1, -0.7, 2), (2, 0.3, 0), (2, 0.0, 1)] {
        let cfg = ModelConfig::dimensionless(m, 1, delta, cutoff(n, m, 1));
        let h = build_hamiltonian(&cfg).unwrap();
        let b = dressed_block(&cfg, n).unwrap();
        for j in 0..b.len() {
            let omega = b.omegas[j];
            let rho = ComplexMatrix::projector(&embed_state(&cfg, &b.basis, &b.eigenstate(j)));
            let path = |shift: f64| {
                SampledPath::from_fn(1.0, 200, |t| {
                    exp_hermitian(&h, t)
                        .unwrap()
                        .scale(C64::from_polar(1.0, shift * t))
                })
            };
            let fixed = parallel_transport_residual(&path(omega), &rho).unwrap();
            let raw = parallel_transport_residual(&path(0.0), &rho).unwrap();
            worst_fixed = worst_fixed.max(fixed);
            worst_rel = worst_rel.max((raw - omega.abs()).abs() / omega.abs());
            states += 1;
        }
    }
    outcome(
        worst_fixed < 1e-6 && worst_rel < 0.05,
        format!(
            "{states} eigenstates: corrected residual {worst_fixed:.2e} (tol 1e-6), uncorrected vs |Omega| rel {worst_rel:.2e} (tol 0.05)"
        ),
    )
}

fn mixed_phase() -> Outcome {
    let mut worst_single = 0.0f64;
    for (delta, n) in [(1.3, 0), (0.0, 1), (-2.0, 3)] {
        let cfg = ModelConfig::dimensionless(1, 1, delta, cutoff(n, 1, 1));
        let n_op = number_operator(&cfg).unwrap();
        let (psi, _) = upper_state(&cfg, n);
        let pure = berry_phase_pure(&psi, &n_op, &PhasePath::linear(1.0)).unwrap();
        let path = PhasePath::linear(1.0);
        let samples =
            SampledPath::from_fn(1.0, 2048, |t| exp_hermitian(&n_op, path.phase(t)).unwrap());
        let last = samples.samples.last().unwrap().clone();
        let ens = MixedEnsemble::new(vec![1.0], vec![ComplexMatrix::projector(&psi)]).unwrap();
        let mixed = reduce_angle(berry_phase_mixed(&ens, &samples, &last).unwrap());
        let d = (mixed - pure.reduced).abs();
        worst_single = worst_single.max(d.min(TAU - d));
    }

    let factor = weighted_phase(&[0.75, 0.25], &[c(0.0, 1.0), c(0.0, -1.0)]).unwrap();
    let proj = |i: usize| {
        ComplexMatrix::projector(&ComplexMatrix::column(&[
            if i == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) },
            if i == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) },
        ]))
    };
    let ens = MixedEnsemble::new(vec![0.75, 0.25], vec![proj(0), proj(1)]).unwrap();
    let identity = SampledPath::from_fn(1.0, 16, |_| ComplexMatrix::identity(2));
    let closing = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => c(0.0, 1.0),
        (1, 1) => c(0.0, -1.0),
        _ => c(0.0, 0.0),
    });
    let through_path = berry_phase_mixed(&ens, &identity, &closing).unwrap();
    let weighted_err = (factor - PI / 2.0)
        .abs()
        .max((through_path - PI / 2.0).abs());
    outcome(
        worst_single < 1e-6 && weighted_err < 1e-9,
        format!("single-component vs pure {worst_single:.2e} (tol 1e-6), pi/2 case {weighted_err:.2e} (tol 1e-9)"),
    )
}

fn random_ket(rng: &mut StdRng, dim: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..dim)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

fn random_unitary(rng: &mut StdRng, dim: usize) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(dim, dim, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let h = (&a + &a.adjoint()).scale(c(0.5, 0.0));
    exp_hermitian(&h, 1.0).unwrap()
}

fn concurrence_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xc0c);
    let s = FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let bells = [
        [c(s, 0.0), z, z, c(s, 0.0)],
        [c(s, 0.0), z, z, c(-s, 0.0)],
        [z, c(s, 0.0), c(s, 0.0), z],
        [z, c(s, 0.0), c(-s, 0.0), z],
    ];
    let mut bell_err = 0.0f64;
    for a in &bells {
        let rho = ComplexMatrix::projector(&ComplexMatrix::column(a));
        bell_err = bell_err
            .max((concurrence_wootters(&rho).unwrap() - 1.0).abs())
            .max((concurrence_pure(a).unwrap() - 1.0).abs());
    }

    let mut product_err = 0.0f64;
    for _ in 0..20 {
        let (x, y) = (random_ket(&mut rng, 2), random_ket(&mut rng, 2));
        let a = [x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1]];
        let rho = ComplexMatrix::projector(&ComplexMatrix::column(&a));
        product_err = product_err
            .max(concurrence_wootters(&rho).unwrap())
            .max(concurrence_pure(&a).unwrap());
    }

    let mut pure_err = 0.0f64;
    for _ in 0..1000 {
        let v = random_ket(&mut rng, 4);
        let a = [v[0], v[1], v[2], v[3]];
        let rho = ComplexMatrix::projector(&ComplexMatrix::column(&a));
        pure_err = pure_err
            .max((concurrence_pure(&a).unwrap() - concurrence_wootters(&rho).unwrap()).abs());
    }

    let singlet = ComplexMatrix::projector(&ComplexMatrix::column(&bells[3]));
    let werner = &singlet.scale(c(0.5, 0.0)) + &ComplexMatrix::identity(4).scale(c(0.125, 0.0));
    let werner_err = (concurrence_wootters(&werner).unwrap() - 0.25).abs();

    let mut lu_err = 0.0f64;
    for _ in 0..20 {
        let weights = [0.5, 0.3, 0.15, 0.05];
        let mut rho = ComplexMatrix::zeros(4, 4);
        for w in weights {
            let p = ComplexMatrix::projector(&ComplexMatrix::column(&random_ket(&mut rng, 4)));
            rho = &rho + &p.scale(c(w, 0.0));
        }
        let local = kron(&random_unitary(&mut rng, 2), &random_unitary(&mut rng, 2)).unwrap();
        let moved = &(&local * &rho) * &local.adjoint();
        lu_err = lu_err.max(
            (concurrence_wootters(&rho).unwrap() - concurrence_wootters(&moved).unwrap()).abs(),
        );
    }

    outcome(
        bell_err < 1e-12 && product_err < 1e-12 && pure_err < 1e-8 && werner_err < 1e-9 && lu_err < 1e-8,
        format!(
            "Bell {bell_err:.1e} (1e-12), product {product_err:.1e} (1e-12), pure vs Wootters {pure_err:.1e} (1e-8), \
             Werner {werner_err:.1e} (1e-9), local unitary {lu_err:.1e} (1e-8)"
        ),
    )
}

fn fig3_relation() -> Outcome {
    let out = sweep::run_fig3(&SweepSpec::defaults(SweepMode::Fig3), None).unwrap();
    let series = |d: f64| -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let rows: Vec<_> = out
            .records
            .iter()
            .filter(|r| r.delta_over_lambda == d)
            .collect();
        (
            rows.iter().map(|r| r.berry_over_pi).collect(),
            rows.iter().map(|r| r.concurrence.unwrap()).collect(),
            rows.iter().map(|r| r.paper_cn.unwrap()).collect(),
        )
    };
    let (berry, conc, cn) = series(0.3);
    let r = pearson(&berry, &conc);
    let r_cn = pearson(&berry, &cn);
    let (_, resonant, _) = series(0.0);
    let max = resonant.iter().cloned().fold(0.0, f64::max);
    let min = resonant.iter().cloned().fold(1.0, f64::min);
    let collapsed = resonant.len() == 11 && min >= 0.9 * max;
    outcome(
        berry.len() == 11 && r.is_some_and(|r| r.abs() >= 0.95) && collapsed,
        format!(
            "delta=0.3: r(berry, C) = {}, r(berry, paper_cn) = {}; delta=0: C in [{min:.4}, {max:.4}]",
            r.map_or("undefined".into(), |r| format!("{r:.4}")),
            r_cn.map_or("undefined".into(), |r| format!("{r:.4}")),
        ),
    )
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_qberry");
    let run = |args: &[&str]| {
        let out = Command::new(bin).args(args).output().expect("binary runs");
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };
    let mut ok = true;
    let mut notes = Vec::new();
    for fig in ["fig2", "fig3"] {
        let reference = run(&[fig, "--threads", "1"]);
        let variants = [
            run(&[fig, "--threads", "1"]),
            run(&[fig, "--threads", "4"]),
            run(&[fig]),
        ];
        let same = variants.iter().all(|v| *v == reference);
        ok &= same && !reference.is_empty();
        notes.push(format!(
            "{fig}: {} bytes, identical {same}",
            reference.len()
        ));
    }
    outcome(ok, notes.join("; "))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("resonance anchor", resonance_anchor),
        ("detuning decay", detuning_decay),
        ("closed form vs quadrature", closed_form_agreement),
        ("spot value", spot_value),
        ("evolution operator", evolution_operator_check),
        ("parallel transport", parallel_transport),
        ("mixed-phase consistency", mixed_phase),
        ("concurrence suite", concurrence_suite),
        ("two-qubit berry vs concurrence", fig3_relation),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
