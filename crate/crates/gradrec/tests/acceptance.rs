//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs as its own harness so the lines show under `cargo test`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gradrec::harness::{run_grid, GridSpec, Mode, TrialRecord};
use gradrec_core::linalg::Matrix;
use gradrec_core::nonuniform::{
    build_operator, jittered_samples, recalc_to_uniform, NonuniformGrid,
};
use gradrec_core::recon::{
    gradient, gradient_reference, perturbation_differences, reconstruct, PartialSignal, ReconConfig,
};
use gradrec_core::spectral::{srr, SampleSet};
use gradrec_core::synth::{generate_multitone, random_missing_set, MultitoneSpec};
use gradrec_core::uniqueness::{
    check_uniqueness, oracle_unique, s_term, stride_missing_count, UniquenessReport,
};
use num_complex::Complex64;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const AVAILABLE: [usize; 16] = [
    7, 14, 18, 21, 34, 37, 51, 69, 79, 82, 89, 90, 99, 100, 113, 117,
];
const SUPPORT: [usize; 6] = [22, 35, 59, 69, 93, 106];

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

fn example_set() -> SampleSet {
    SampleSet::from_available(128, AVAILABLE).unwrap()
}

fn example_report() -> UniquenessReport {
    check_uniqueness(&SUPPORT, &example_set()).unwrap()
}

fn full_recoveries(records: &[TrialRecord]) -> usize {
    records.iter().filter(|r| r.full_recovery).count()
}

fn counting_exactness() -> Outcome {
    let set = example_set();
    let start = Instant::now();
    let report = check_uniqueness(&SUPPORT, &set).unwrap();
    let elapsed = start.elapsed();
    let q: Vec<usize> = report.rows.iter().map(|r| r.q_stride).collect();
    let s: Vec<usize> = report.rows.iter().map(|r| r.s_term).collect();
    // the per-h helpers must agree with the report
    let q_direct: Vec<usize> = (0..7)
        .map(|h| stride_missing_count(&set, h).unwrap())
        .collect();
    let s_direct: Vec<usize> = (0..7).map(|h| s_term(&SUPPORT, &set, h).unwrap()).collect();
    let pass = q == [112, 58, 31, 16, 8, 4, 2]
        && s == [0, 0, 4, 5, 4, 4, 2]
        && q == q_direct
        && s == s_direct
        && elapsed < Duration::from_millis(1);
    outcome(pass, format!("Q={q:?} S={s:?} in {elapsed:?}"))
}

fn worst_case_bound() -> Outcome {
    let report = example_report();
    // independent evaluation with every S set to zero
    let largest = (0..=64usize)
        .filter(|&s| {
            report
                .rows
                .iter()
                .all(|r| 2 * (s as i64) < 128 - (1i64 << r.h) * (r.q_stride as i64 - 1))
        })
        .max();
    let pass = report.worst_case_max_s == Some(3) && largest == Some(3);
    outcome(
        pass,
        format!(
            "worst_case_max_s={:?}, direct scan={largest:?} (requires s<4)",
            report.worst_case_max_s
        ),
    )
}

fn specific_uniqueness() -> Outcome {
    let report = example_report();
    let margins: Vec<i64> = report.rows.iter().map(|r| r.margin).collect();
    outcome(
        report.unique && report.sparsity == 6,
        format!(
            "s={} margins={margins:?} unique={}",
            report.sparsity, report.unique
        ),
    )
}

fn oracle_soundness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut certified, mut violations) = (0, 0);
    for case in 0..200usize {
        let len = if case < 100 { 8 } else { 16 };
        let missing = rng.random_range(1..len);
        let set = SampleSet::from_missing(len, index::sample(&mut rng, len, missing)).unwrap();
        let s = rng.random_range(1..=4);
        let support = index::sample(&mut rng, len, s).into_vec();
        if check_uniqueness(&support, &set).unwrap().unique {
            certified += 1;
            if !oracle_unique(&support, &set, s).unwrap() {
                violations += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        violations == 0 && certified > 0 && elapsed < Duration::from_secs(60),
        format!("{certified}/200 certified, {violations} violations, {elapsed:.2?}"),
    )
}

fn recovery_region() -> Outcome {
    let start = Instant::now();
    let spec = |s: usize, m: usize| GridSpec {
        n: 64,
        s_values: vec![s],
        m_values: vec![m],
        trials: 100,
        seed: 7,
        ..GridSpec::for_len(64)
    };
    let easy = run_grid(&spec(4, 32), Some(1)).unwrap();
    let hard = run_grid(&spec(16, 20), Some(1)).unwrap();
    let elapsed = start.elapsed();
    let (e, h) = (full_recoveries(&easy), full_recoveries(&hard));
    outcome(
        e >= 95 && h <= 5 && elapsed < Duration::from_secs(600),
        format!("s=4,M=32: {e}/100; s=16,M=20: {h}/100; {elapsed:.1?} single-threaded"),
    )
}

fn noise_floor() -> Outcome {
    let spec = GridSpec {
        n: 64,
        s_values: vec![4],
        m_values: vec![32],
        trials: 100,
        seed: 7,
        noise_snr_db: Some(20.0),
        ..GridSpec::for_len(64)
    };
    let records = run_grid(&spec, None).unwrap();
    let mut srr_db: Vec<f64> = records.iter().map(|r| r.srr_db).collect();
    srr_db.sort_by(f64::total_cmp);
    let median = (srr_db[49] + srr_db[50]) / 2.0;
    outcome(
        (14.0..=28.0).contains(&median),
        format!("median SRR {median:.2} dB at 20 dB input SNR"),
    )
}

fn convergence_mechanics() -> Outcome {
    let truth = generate_multitone(&MultitoneSpec::new(128, 3, 2024)).unwrap();
    let set = random_missing_set(128, 64, 2024).unwrap();
    let partial = PartialSignal::from_signal(&truth.signal, set).unwrap();
    let cfg = ReconConfig::default();
    let r = reconstruct(&partial, &cfg).unwrap();
    let ends: Vec<usize> = (0..r.trace.len())
        .filter(|&i| r.trace[i].tr_db.is_some())
        .collect();
    let preceded = ends.iter().all(|&i| {
        r.trace[i]
            .beta_deg
            .is_some_and(|b| b >= cfg.angle_threshold_deg)
    });
    let ratios_ok = r.trace.windows(2).all(|w| {
        w[0].delta == w[1].delta || ((w[0].delta / w[1].delta) / 10f64.sqrt() - 1.0).abs() <= 1e-12
    });
    let changes = r
        .trace
        .windows(2)
        .filter(|w| w[0].delta != w[1].delta)
        .count();
    let final_tr = r.final_tr_db().unwrap_or(f64::INFINITY);
    let pass = r.outer_iterations >= 5
        && changes + 1 == r.outer_iterations
        && preceded
        && ratios_ok
        && final_tr < -100.0
        && r.converged
        && r.inner_cap_hits == 0
        && r.iterations <= cfg.inner_iter_cap * cfg.outer_iter_cap;
    outcome(
        pass,
        format!(
            "{} reductions, all after beta>=170: {preceded}, sqrt(10) ratios: {ratios_ok}, final T_r {final_tr:.2} dB, {} iterations, SRR {:.2} dB",
            r.outer_iterations,
            r.iterations,
            srr(&truth.signal, &r.reconstructed).unwrap()
        ),
    )
}

fn naive_dft(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(t, &v)| {
                    Complex64::from_polar(v, -2.0 * PI * ((t * k) % n) as f64 / n as f64)
                })
                .sum()
        })
        .collect()
}

fn gradient_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut mismatch: f64 = 0.0;
    for _ in 0..1000 {
        let n = [8usize, 16, 32, 64][rng.random_range(0..4)];
        let scale = 10f64.powf(rng.random_range(-3.0..3.0));
        let y: Vec<f64> = (0..n)
            .map(|_| scale * rng.random_range(-1.0..1.0))
            .collect();
        let delta = 10f64.powf(rng.random_range(-8.0..3.0));
        let pos = rng.random_range(0..n);
        let spectrum = naive_dft(&y);
        let direction: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * ((pos * k) % n) as f64 / n as f64))
            .collect();
        for (k, diff) in perturbation_differences(&spectrum, &direction, delta).enumerate() {
            let bound = (2.0 * spectrum[k].norm()).min(2.0 * delta);
            worst = worst.max(diff.abs() - bound);
            let literal = (spectrum[k] + direction[k] * delta).norm()
                - (spectrum[k] - direction[k] * delta).norm();
            mismatch = mismatch.max((diff - literal).abs() / (1.0 + spectrum[k].norm()));
        }
    }
    outcome(
        worst <= 1e-12 && mismatch < 1e-9,
        format!("max excess over bound {worst:.3e}, max deviation from literal {mismatch:.1e}"),
    )
}

fn nonuniform_recalculation() -> Outcome {
    let truth = generate_multitone(&MultitoneSpec::new(128, 3, 9)).unwrap();
    let slots: Vec<usize> = (0..128).collect();
    let samples = jittered_samples(&truth.signal, &slots, 1.0, 0.5, 9).unwrap();
    let grid = NonuniformGrid::from_samples(128, 1.0, &samples).unwrap();
    let op = build_operator(&grid).unwrap();
    let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
    let back = recalc_to_uniform(&values, &op).unwrap();
    let ratio = srr(&truth.signal, &back).unwrap();
    let identity = build_operator(&NonuniformGrid::uniform(128, 1.0).unwrap()).unwrap();
    let exact = identity.b == Matrix::identity(128) && identity.b_inv == Matrix::identity(128);
    outcome(
        ratio > 120.0 && exact,
        format!(
            "SRR {ratio:.2} dB (condition {:.2e}), zero-jitter B is identity: {exact}",
            op.condition_estimate
        ),
    )
}

fn nonuniform_recovery() -> Outcome {
    let spec = GridSpec {
        n: 128,
        s_values: vec![6],
        m_values: vec![64],
        trials: 20,
        seed: 11,
        mode: Mode::Nonuniform,
        ..GridSpec::for_len(128)
    };
    let records = run_grid(&spec, None).unwrap();
    let full = full_recoveries(&records);
    let detected: Vec<&TrialRecord> = records.iter().filter(|r| r.detected_sparse).collect();
    let detected_ok = detected.iter().all(|r| r.srr_db > 100.0);
    let min = records
        .iter()
        .map(|r| r.srr_db)
        .fold(f64::INFINITY, f64::min);
    outcome(
        full >= 18 && detected_ok,
        format!(
            "{full}/20 full recoveries, {} detected sparse (all > 100 dB: {detected_ok}), min SRR {min:.2} dB",
            detected.len()
        ),
    )
}

fn dual_path() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for case in 0..100u64 {
        let set = random_missing_set(32, 8, case).unwrap();
        let y: Vec<f64> = (0..32).map(|_| rng.random_range(-2.0..2.0)).collect();
        let delta = 10f64.powf(rng.random_range(-6.0..0.5));
        let fast = gradient(&y, &set, delta).unwrap();
        let slow = gradient_reference(&y, &set, delta).unwrap();
        for (a, b) in fast.iter().zip(slow.iter()) {
            worst = worst.max((a - b).abs());
        }
    }
    outcome(worst <= 1e-10, format!("max |difference| {worst:.2e}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("stride counts Q and S", counting_exactness),
        ("worst-case sparsity bound", worst_case_bound),
        ("uniqueness of the recovered example", specific_uniqueness),
        ("certificate implies rank oracle", oracle_soundness),
        ("uniform recovery region", recovery_region),
        ("noise-limited SRR", noise_floor),
        ("step-size adaptation trace", convergence_mechanics),
        ("per-bin gradient bound", gradient_bound),
        ("nonuniform recalculation", nonuniform_recalculation),
        ("nonuniform recovery", nonuniform_recovery),
        ("incremental vs two-DFT gradient", dual_path),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {} ({})",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            name,
            o.detail
        );
    }
    println!(
        "acceptance: {}/{} passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
