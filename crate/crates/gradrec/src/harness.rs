//! Monte Carlo sweeps over sparsity `s` and available-sample count `M`.
//!
//! Trial `t` of every cell draws from seed `substream(seed, t)`, so cells
//! share signals' random state trial by trial and results do not depend on
//! execution order or thread count.

use std::collections::BTreeMap;
use std::time::Instant;

use gradrec_core::nonuniform::{
    detect_sparse, jittered_samples, reconstruct_nonuniform, NonuniformSample, DETECTION_FRACTION,
};
use gradrec_core::recon::{reconstruct, PartialSignal, ReconConfig};
use gradrec_core::spectral::{srr, SampleSet, Signal};
use gradrec_core::synth::{
    add_noise, generate_multitone, random_missing_set, substream, GroundTruth, MultitoneSpec,
};
use gradrec_core::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Uniform,
    Nonuniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub n: usize,
    pub s_values: Vec<usize>,
    pub m_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub noise_snr_db: Option<f64>,
    pub mode: Mode,
    pub full_recovery_threshold_db: f64,
    /// Sparse-recovery detection level as a fraction of `N`.
    pub detection_fraction: f64,
    /// Largest jitter in units of `dt` (nonuniform mode).
    pub max_jitter: f64,
    pub recon: ReconConfig,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::for_len(64)
    }
}

impl GridSpec {
    /// Sparsities `2, 4, 8, ..` up to `N/4` and `M = N/8, 2N/8, .., 7N/8`.
    pub fn for_len(n: usize) -> Self {
        let s_values = std::iter::successors(Some(2), |s| Some(s * 2))
            .take_while(|&s| s <= (n / 4).max(2))
            .collect();
        let step = (n / 8).max(1);
        let m_values = (1..8).map(|j| j * step).filter(|&m| m < n).collect();
        Self {
            n,
            s_values,
            m_values,
            trials: 100,
            seed: 0,
            noise_snr_db: None,
            mode: Mode::Uniform,
            full_recovery_threshold_db: 100.0,
            detection_fraction: DETECTION_FRACTION,
            max_jitter: 0.5,
            recon: ReconConfig {
                t_max_db: -120.0,
                ..ReconConfig::default()
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad =
            |name: &'static str, reason: String| Err(Error::InvalidParameter { name, reason });
        if self.n < 4 || !self.n.is_multiple_of(2) {
            return bad("n", format!("{} must be even and at least 4", self.n));
        }
        if self.s_values.is_empty() || self.m_values.is_empty() {
            return bad("s_values", "s and M lists must be non-empty".into());
        }
        if let Some(s) = self
            .s_values
            .iter()
            .find(|&&s| s % 2 != 0 || s < 2 || s > self.n / 2)
        {
            return bad("s_values", format!("s={s} must be even with 2 <= s <= N/2"));
        }
        if let Some(m) = self.m_values.iter().find(|&&m| m == 0 || m >= self.n) {
            return bad("m_values", format!("M={m} must satisfy 0 < M < N"));
        }
        if self.trials == 0 {
            return bad("trials", "at least one trial".into());
        }
        if self.noise_snr_db.is_some_and(|v| !v.is_finite()) {
            return bad("noise_snr_db", "must be finite".into());
        }
        if !self.full_recovery_threshold_db.is_finite() {
            return bad("full_recovery_threshold_db", "must be finite".into());
        }
        if !(self.detection_fraction > 0.0 && self.detection_fraction.is_finite()) {
            return bad("detection_fraction", "must be positive".into());
        }
        if !(0.0..=0.5).contains(&self.max_jitter) {
            return bad("max_jitter", "must lie in [0, 0.5]".into());
        }
        self.recon.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub s: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub trial: usize,
    /// SRR over all `N` samples against the noise-free signal; NaN if the
    /// trial raised an error.
    pub srr_db: f64,
    pub full_recovery: bool,
    pub iterations: usize,
    pub elapsed_s: f64,
    pub detected_sparse: bool,
    #[serde(skip)]
    pub converged: bool,
    #[serde(skip)]
    pub error: Option<String>,
}

impl TrialRecord {
    /// Equality ignoring wall time.
    pub fn same_outcome(&self, other: &Self) -> bool {
        (self.s, self.m, self.trial) == (other.s, other.m, other.trial)
            && self.srr_db.to_bits() == other.srr_db.to_bits()
            && self.full_recovery == other.full_recovery
            && self.iterations == other.iterations
            && self.detected_sparse == other.detected_sparse
            && self.converged == other.converged
            && self.error == other.error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub s: usize,
    #[serde(rename = "M")]
    pub m: usize,
    /// Mean of the per-trial dB values, errored trials excluded.
    pub mean_srr_db: f64,
    pub recovery_pct: f64,
    pub mean_iter: f64,
    pub mean_elapsed_s: f64,
    #[serde(skip)]
    pub trials: usize,
    #[serde(skip)]
    pub failed: usize,
}

/// What one trial observes.
#[derive(Debug, Clone)]
pub enum Observation {
    Uniform(PartialSignal),
    Nonuniform(Vec<NonuniformSample>),
}

#[derive(Debug, Clone)]
pub struct TrialInstance {
    pub truth: GroundTruth,
    pub sample_set: SampleSet,
    pub observation: Observation,
}

/// Draws the signal, mask, jitter and noise of one trial.
pub fn trial_instance(spec: &GridSpec, s: usize, m: usize, trial: usize) -> Result<TrialInstance> {
    let n = spec.n;
    let seed = substream(spec.seed, trial as u64);
    let truth = generate_multitone(&MultitoneSpec::new(n, s / 2, seed))?;
    if m == 0 || m >= n {
        return Err(Error::InvalidParameter {
            name: "m",
            reason: format!("M={m} must satisfy 0 < M < N"),
        });
    }
    let sample_set = random_missing_set(n, n - m, seed)?;
    let observation = match spec.mode {
        Mode::Uniform => {
            let observed = match spec.noise_snr_db {
                Some(snr) => add_noise(&truth.signal, snr, seed)?,
                None => truth.signal.clone(),
            };
            Observation::Uniform(PartialSignal::from_signal(&observed, sample_set.clone())?)
        }
        Mode::Nonuniform => {
            let mut samples = jittered_samples(
                &truth.signal,
                sample_set.available(),
                1.0,
                spec.max_jitter,
                seed,
            )?;
            if let Some(snr) = spec.noise_snr_db {
                let clean = Signal::new(samples.iter().map(|p| p.value).collect())?;
                let noisy = add_noise(&clean, snr, seed)?;
                samples
                    .iter_mut()
                    .zip(noisy.iter())
                    .for_each(|(p, &v)| p.value = v);
            }
            Observation::Nonuniform(samples)
        }
    };
    Ok(TrialInstance {
        truth,
        sample_set,
        observation,
    })
}

/// Reconstruction, iteration count and convergence flag.
pub fn solve_instance(spec: &GridSpec, instance: &TrialInstance) -> Result<(Signal, usize, bool)> {
    match &instance.observation {
        Observation::Uniform(partial) => {
            let r = reconstruct(partial, &spec.recon)?;
            Ok((r.reconstructed, r.iterations, r.converged))
        }
        Observation::Nonuniform(samples) => {
            let r = reconstruct_nonuniform(samples, spec.n, 1.0, &spec.recon)?;
            Ok((
                r.result.reconstructed,
                r.result.iterations,
                r.result.converged,
            ))
        }
    }
}

pub fn run_trial(spec: &GridSpec, s: usize, m: usize, trial: usize) -> TrialRecord {
    let start = Instant::now();
    let outcome = trial_instance(spec, s, m, trial).and_then(|inst| {
        let (recon, iterations, converged) = solve_instance(spec, &inst)?;
        Ok((
            srr(&inst.truth.signal, &recon)?,
            recon,
            iterations,
            converged,
        ))
    });
    let elapsed_s = start.elapsed().as_secs_f64();
    match outcome {
        Ok((srr_db, recon, iterations, converged)) => TrialRecord {
            s,
            m,
            trial,
            srr_db,
            full_recovery: srr_db > spec.full_recovery_threshold_db,
            iterations,
            elapsed_s,
            detected_sparse: detect_sparse(&recon, spec.detection_fraction),
            converged,
            error: None,
        },
        Err(e) => TrialRecord {
            s,
            m,
            trial,
            srr_db: f64::NAN,
            full_recovery: false,
            iterations: 0,
            elapsed_s,
            detected_sparse: false,
            converged: false,
            error: Some(e.to_string()),
        },
    }
}

/// All trials of the grid, ordered by `s`, then `M`, then trial index.
///
/// `jobs = Some(1)` runs on the calling thread; `None` uses the global pool.
pub fn run_grid(spec: &GridSpec, jobs: Option<usize>) -> Result<Vec<TrialRecord>> {
    spec.validate()?;
    let tasks: Vec<(usize, usize, usize)> = spec
        .s_values
        .iter()
        .flat_map(|&s| {
            spec.m_values
                .iter()
                .flat_map(move |&m| (0..spec.trials).map(move |t| (s, m, t)))
        })
        .collect();
    let run = || -> Vec<TrialRecord> {
        tasks
            .par_iter()
            .map(|&(s, m, t)| run_trial(spec, s, m, t))
            .collect()
    };
    match jobs {
        Some(1) => Ok(tasks
            .iter()
            .map(|&(s, m, t)| run_trial(spec, s, m, t))
            .collect()),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map(|pool| pool.install(run))
            .map_err(|e| Error::InvalidParameter {
                name: "jobs",
                reason: e.to_string(),
            }),
        None => Ok(run()),
    }
}

/// Per-`(s, M)` means, ordered by `s` then `M`.
pub fn aggregate(records: &[TrialRecord]) -> Vec<CellSummary> {
    let mut cells: BTreeMap<(usize, usize), Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        cells.entry((r.s, r.m)).or_default().push(r);
    }
    cells
        .into_iter()
        .map(|((s, m), rs)| {
            let count = rs.len() as f64;
            let finite: Vec<f64> = rs
                .iter()
                .map(|r| r.srr_db)
                .filter(|v| !v.is_nan())
                .collect();
            let mean_srr_db = if finite.is_empty() {
                f64::NAN
            } else {
                finite.iter().sum::<f64>() / finite.len() as f64
            };
            CellSummary {
                s,
                m,
                mean_srr_db,
                recovery_pct: 100.0 * rs.iter().filter(|r| r.full_recovery).count() as f64 / count,
                mean_iter: rs.iter().map(|r| r.iterations as f64).sum::<f64>() / count,
                mean_elapsed_s: rs.iter().map(|r| r.elapsed_s).sum::<f64>() / count,
                trials: rs.len(),
                failed: rs.iter().filter(|r| r.error.is_some()).count(),
            }
        })
        .collect()
}

/// Ranks with ties sharing their average rank.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation; `None` for fewer than two points or a constant
/// input.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let mean = (x.len() as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mean) * (b - mean);
        sxx += (a - mean) * (a - mean);
        syy += (b - mean) * (b - mean);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

/// Rank correlation between mean time and `mean_iter * (N - M)` over cells.
pub fn cost_rank_correlation(cells: &[CellSummary], n: usize) -> Option<f64> {
    let time: Vec<f64> = cells.iter().map(|c| c.mean_elapsed_s).collect();
    let work: Vec<f64> = cells
        .iter()
        .map(|c| c.mean_iter * (n - c.m) as f64)
        .collect();
    spearman(&time, &work)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(s: usize, m: usize, srr_db: f64, iterations: usize) -> TrialRecord {
        TrialRecord {
            s,
            m,
            trial: 0,
            srr_db,
            full_recovery: srr_db > 100.0,
            iterations,
            elapsed_s: 0.5,
            detected_sparse: true,
            converged: true,
            error: None,
        }
    }

    #[test]
    fn default_grid_is_valid() {
        let spec = GridSpec::default();
        spec.validate().unwrap();
        assert_eq!(spec.s_values, [2, 4, 8, 16]);
        assert_eq!(spec.m_values, [8, 16, 24, 32, 40, 48, 56]);
    }

    #[test]
    fn invalid_cells_rejected() {
        let mut spec = GridSpec {
            s_values: vec![3],
            ..GridSpec::default()
        };
        assert!(spec.validate().is_err());
        spec.s_values = vec![34];
        assert!(spec.validate().is_err());
        spec.s_values = vec![2];
        spec.m_values = vec![64];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn single_record_summary_equals_record() {
        let r = record(4, 32, 123.4, 77);
        let cells = aggregate(std::slice::from_ref(&r));
        assert_eq!(cells.len(), 1);
        let c = &cells[0];
        assert_eq!((c.s, c.m, c.trials), (4, 32, 1));
        assert_eq!(c.mean_srr_db, 123.4);
        assert_eq!(c.recovery_pct, 100.0);
        assert_eq!(c.mean_iter, 77.0);
        assert_eq!(c.mean_elapsed_s, 0.5);
    }

    #[test]
    fn all_failures_give_zero_recovery() {
        let records = [record(8, 10, 12.0, 10), record(8, 10, 20.0, 30)];
        let c = &aggregate(&records)[0];
        assert_eq!(c.recovery_pct, 0.0);
        assert_eq!(c.mean_srr_db, 16.0);
        assert_eq!(c.mean_iter, 20.0);
    }

    #[test]
    fn errored_trials_excluded_from_mean_srr() {
        let mut bad = record(2, 4, f64::NAN, 0);
        bad.full_recovery = false;
        bad.error = Some("diverged".into());
        let c = &aggregate(&[record(2, 4, 110.0, 5), bad])[0];
        assert_eq!(c.mean_srr_db, 110.0);
        assert_eq!(c.recovery_pct, 50.0);
        assert_eq!(c.failed, 1);
    }

    #[test]
    fn spearman_handles_ties_and_direction() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), Some(1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(spearman(&[1.0, 1.0], &[1.0, 2.0]), None);
        assert_eq!(ranks(&[5.0, 1.0, 5.0, 2.0]), [3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn one_missing_sample_always_recovers() {
        let spec = GridSpec {
            n: 32,
            s_values: vec![2],
            m_values: vec![31],
            trials: 20,
            seed: 5,
            ..GridSpec::for_len(32)
        };
        let records = run_grid(&spec, Some(1)).unwrap();
        assert_eq!(records.len(), 20);
        assert!(records.iter().all(|r| r.full_recovery), "{records:?}");
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let spec = GridSpec {
            n: 32,
            s_values: vec![2, 4],
            m_values: vec![12, 20],
            trials: 6,
            seed: 11,
            ..GridSpec::for_len(32)
        };
        let serial = run_grid(&spec, Some(1)).unwrap();
        let parallel = run_grid(&spec, Some(3)).unwrap();
        assert!(serial.iter().zip(&parallel).all(|(a, b)| a.same_outcome(b)));
        let single = run_trial(&spec, 4, 20, 5);
        assert!(single.same_outcome(&serial[3 * 6 + 5]));
    }
}
