//! Adaptive-step gradient reconstruction of missing samples.
//!
//! The missing samples are the optimization variables and the available
//! samples stay fixed. Each inner iteration estimates, for every missing
//! position, the finite-difference change of the spectral l1 measure under a
//! `+/- delta` perturbation, and moves all missing samples at once by that
//! estimate. When two successive gradient estimates point in nearly opposite
//! directions (angle at or above the threshold) the iterate is oscillating
//! around the minimum, so `delta` is divided by the step divisor. The run stops
//! once the relative change of the missing samples over one inner loop, `T_r`,
//! falls below the precision threshold.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{measure_l1, DftPlan, SampleSet, Signal};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ReconConfig {
    /// Initial step; defaults to the largest available magnitude.
    pub delta_init: Option<f64>,
    pub angle_threshold_deg: f64,
    pub step_divisor: f64,
    /// Stop once `T_r` drops below this (dB).
    pub t_max_db: f64,
    /// Overrides `t_max_db` when set.
    pub target_precision_db: Option<f64>,
    /// Iterations allowed per fixed `delta`.
    pub inner_iter_cap: usize,
    /// Number of step reductions allowed.
    pub outer_iter_cap: usize,
}

impl Default for ReconConfig {
    fn default() -> Self {
        Self {
            delta_init: None,
            angle_threshold_deg: 170.0,
            step_divisor: libm::sqrt(10.0),
            t_max_db: -100.0,
            target_precision_db: None,
            inner_iter_cap: 2000,
            outer_iter_cap: 50,
        }
    }
}

impl ReconConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.angle_threshold_deg > 0.0 && self.angle_threshold_deg < 180.0) {
            return Err(Error::param("angle_threshold_deg", "must lie in (0, 180)"));
        }
        if !(self.step_divisor > 1.0 && self.step_divisor.is_finite()) {
            return Err(Error::param("step_divisor", "must be finite and > 1"));
        }
        if self.inner_iter_cap == 0 || self.outer_iter_cap == 0 {
            return Err(Error::param("iteration caps", "must be >= 1"));
        }
        if let Some(d) = self.delta_init {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::param("delta_init", "must be positive and finite"));
            }
        }
        if self.stop_threshold_db().is_nan() {
            return Err(Error::param("t_max_db", "must not be NaN"));
        }
        Ok(())
    }

    pub fn stop_threshold_db(&self) -> f64 {
        self.target_precision_db.unwrap_or(self.t_max_db)
    }
}

/// Available sample values together with their positions.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSignal {
    sample_set: SampleSet,
    /// Aligned with `sample_set.available()`.
    values: Vec<f64>,
}

impl PartialSignal {
    pub fn new(sample_set: SampleSet, values: Vec<f64>) -> Result<Self> {
        if values.len() != sample_set.available_count() {
            return Err(Error::LengthMismatch {
                expected: sample_set.available_count(),
                actual: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                index: sample_set.available()[i],
            });
        }
        Ok(Self { sample_set, values })
    }

    /// Keeps the entries of `signal` at the available positions of `sample_set`.
    pub fn from_signal(signal: &[f64], sample_set: SampleSet) -> Result<Self> {
        if signal.len() != sample_set.len() {
            return Err(Error::LengthMismatch {
                expected: sample_set.len(),
                actual: signal.len(),
            });
        }
        let values = sample_set.available().iter().map(|&i| signal[i]).collect();
        Self::new(sample_set, values)
    }

    /// From `(index, value)` pairs; unlisted indices are missing.
    pub fn from_pairs(len: usize, pairs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut pairs: Vec<(usize, f64)> = pairs.into_iter().collect();
        pairs.sort_by_key(|p| p.0);
        let sample_set = SampleSet::from_available(len, pairs.iter().map(|p| p.0))?;
        Self::new(sample_set, pairs.into_iter().map(|p| p.1).collect())
    }

    pub fn sample_set(&self) -> &SampleSet {
        &self.sample_set
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.sample_set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample_set.is_empty()
    }

    /// Full-length vector with zeros at the missing positions.
    pub fn zero_filled(&self) -> Vec<f64> {
        let mut y = vec![0.0; self.len()];
        for (&i, &v) in self.sample_set.available().iter().zip(&self.values) {
            y[i] = v;
        }
        y
    }
}

/// Per-position gradient estimate; zero at every available position.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientVector(Vec<f64>);

impl GradientVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.0.iter().map(|g| g * g).sum())
    }
}

impl core::ops::Deref for GradientVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// One inner iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceEntry {
    /// 1-based running iteration count.
    pub iteration: usize,
    pub delta: f64,
    /// Angle to the previous gradient; absent on the first iteration of a step.
    pub beta_deg: Option<f64>,
    /// l1 measure of the iterate the gradient was taken at.
    pub measure: f64,
    /// Set on the last iteration of each inner loop.
    pub tr_db: Option<f64>,
    /// Largest absolute update applied in this iteration.
    pub max_update: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ReconResult {
    pub reconstructed: Signal,
    pub iterations: usize,
    pub outer_iterations: usize,
    pub trace: Vec<TraceEntry>,
    /// `T_r` reached the threshold before the outer cap, and no inner loop
    /// was cut short by the inner cap.
    pub converged: bool,
    /// Inner loops that ended at the cap instead of on an angle reversal.
    pub inner_cap_hits: usize,
}

impl ReconResult {
    /// `T_r` of the final outer iteration.
    pub fn final_tr_db(&self) -> Option<f64> {
        self.trace.iter().rev().find_map(|e| e.tr_db)
    }
}

/// Zero-filled start vector and initial step.
///
/// The step is the override when given, otherwise the largest available
/// magnitude; an all-zero set of available values without override is an error.
pub fn initialize(partial: &PartialSignal, delta_override: Option<f64>) -> Result<(Signal, f64)> {
    let y0 = Signal::new(partial.zero_filled())?;
    let delta = match delta_override {
        Some(d) => d,
        None => partial
            .values()
            .iter()
            .fold(0.0, |m, v| f64::max(m, libm::fabs(*v))),
    };
    if delta == 0.0 {
        return Err(Error::ZeroInitialStep);
    }
    Ok((y0, delta))
}

/// Per-bin values of `|Y(k) + delta D(k)| - |Y(k) - delta D(k)|`.
///
/// Evaluated as `4 Re(Y conj(delta D)) / (|Y + delta D| + |Y - delta D|)`,
/// which is algebraically identical but avoids cancellation for small steps.
/// Each value is bounded in magnitude by `2 min(|Y(k)|, delta |D(k)|)`.
pub fn perturbation_differences<'a>(
    spectrum: &'a [Complex64],
    direction: &'a [Complex64],
    delta: f64,
) -> impl Iterator<Item = f64> + 'a {
    spectrum.iter().zip(direction).map(move |(y, d)| {
        let a = d * delta;
        let (pr, pi) = (y.re + a.re, y.im + a.im);
        let (mr, mi) = (y.re - a.re, y.im - a.im);
        let sum = libm::sqrt(pr * pr + pi * pi) + libm::sqrt(mr * mr + mi * mi);
        if sum == 0.0 {
            0.0
        } else {
            4.0 * (y.re * a.re + y.im * a.im) / sum
        }
    })
}

/// Maps the optimization variables to the spectrum whose l1 measure is minimized.
///
/// Perturbing the variable at missing position `missing[r]` by `+/- delta`
/// must shift the spectrum by `+/- delta * direction(r)`.
pub trait SparsityDomain {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn sample_set(&self) -> &SampleSet;
    fn spectrum(&self, variables: &[f64]) -> Vec<Complex64>;
    /// Spectrum of a unit change of the `rank`-th missing variable.
    fn direction(&self, rank: usize) -> &[Complex64];
}

/// Uniform-grid domain: the spectrum is the DFT of the variables themselves.
#[derive(Debug, Clone)]
pub struct UniformDomain {
    plan: DftPlan,
    sample_set: SampleSet,
    directions: Vec<Vec<Complex64>>,
}

impl UniformDomain {
    pub fn new(sample_set: SampleSet) -> Result<Self> {
        let plan = DftPlan::fast(sample_set.len())?;
        let directions = sample_set
            .missing()
            .iter()
            .map(|&n| plan.impulse_spectrum(n))
            .collect();
        Ok(Self {
            plan,
            sample_set,
            directions,
        })
    }
}

impl SparsityDomain for UniformDomain {
    fn len(&self) -> usize {
        self.plan.len()
    }

    fn sample_set(&self) -> &SampleSet {
        &self.sample_set
    }

    fn spectrum(&self, variables: &[f64]) -> Vec<Complex64> {
        self.plan.forward_real(variables)
    }

    fn direction(&self, rank: usize) -> &[Complex64] {
        &self.directions[rank]
    }
}

/// Gradient from a precomputed spectrum of the current iterate.
pub fn gradient_from_spectrum<D: SparsityDomain + ?Sized>(
    domain: &D,
    spectrum: &[Complex64],
    delta: f64,
) -> GradientVector {
    let n = domain.len();
    let mut g = vec![0.0; n];
    for (rank, &pos) in domain.sample_set().missing().iter().enumerate() {
        let total: f64 = perturbation_differences(spectrum, domain.direction(rank), delta).sum();
        g[pos] = total / n as f64;
    }
    GradientVector(g)
}

/// Gradient of the l1 spectral measure by the incremental route: one DFT of
/// `y`, then `|Y(k) +/- delta D_n(k)|` per missing position.
pub fn gradient(y: &[f64], sample_set: &SampleSet, delta: f64) -> Result<GradientVector> {
    if y.len() != sample_set.len() {
        return Err(Error::LengthMismatch {
            expected: sample_set.len(),
            actual: y.len(),
        });
    }
    let domain = UniformDomain::new(sample_set.clone())?;
    let spectrum = domain.spectrum(y);
    Ok(gradient_from_spectrum(&domain, &spectrum, delta))
}

/// Gradient by the literal route: two full DFTs per missing position.
pub fn gradient_reference(y: &[f64], sample_set: &SampleSet, delta: f64) -> Result<GradientVector> {
    if y.len() != sample_set.len() {
        return Err(Error::LengthMismatch {
            expected: sample_set.len(),
            actual: y.len(),
        });
    }
    let n = y.len();
    let plan = DftPlan::new(n)?;
    let mut g = vec![0.0; n];
    let mut probe = y.to_vec();
    for &pos in sample_set.missing() {
        probe[pos] = y[pos] + delta;
        let up = measure_l1(&plan.forward_real(&probe));
        probe[pos] = y[pos] - delta;
        let down = measure_l1(&plan.forward_real(&probe));
        probe[pos] = y[pos];
        g[pos] = (up - down) / n as f64;
    }
    Ok(GradientVector(g))
}

/// Norm below which a gradient counts as degenerate.
const DEGENERATE_NORM: f64 = 1e-300;

/// Angle between two gradient estimates in degrees.
///
/// A degenerate (near-zero) vector yields 180, which requests a step reduction.
pub fn gradient_angle(prev: &[f64], curr: &[f64]) -> f64 {
    let dot: f64 = prev.iter().zip(curr).map(|(a, b)| a * b).sum();
    let np = libm::sqrt(prev.iter().map(|v| v * v).sum());
    let nc = libm::sqrt(curr.iter().map(|v| v * v).sum());
    if np < DEGENERATE_NORM || nc < DEGENERATE_NORM {
        return 180.0;
    }
    let cos = (dot / (np * nc)).clamp(-1.0, 1.0);
    libm::acos(cos).to_degrees()
}

/// `10 log10(sum |y_p - y|^2 / sum |y|^2)` over the missing positions;
/// `+inf` when the iterate is zero there.
pub fn relative_change_db(before: &[f64], after: &[f64], missing: &[usize]) -> f64 {
    let num: f64 = missing
        .iter()
        .map(|&i| (before[i] - after[i]) * (before[i] - after[i]))
        .sum();
    let den: f64 = missing.iter().map(|&i| after[i] * after[i]).sum();
    if den == 0.0 {
        return f64::INFINITY;
    }
    10.0 * libm::log10(num / den)
}

/// Result of the domain-generic loop; `variables` live in the domain's
/// variable space.
#[derive(Debug, Clone)]
pub struct EngineOutput {
    pub variables: Vec<f64>,
    pub iterations: usize,
    pub outer_iterations: usize,
    pub trace: Vec<TraceEntry>,
    pub converged: bool,
    pub inner_cap_hits: usize,
}

/// Runs the double loop over any [`SparsityDomain`].
///
/// `initial` holds the fixed available values and the starting missing
/// values; only the missing positions of the domain's sample set are written.
pub fn run_engine<D: SparsityDomain + ?Sized>(
    domain: &D,
    initial: Vec<f64>,
    delta_init: f64,
    config: &ReconConfig,
) -> Result<EngineOutput> {
    config.validate()?;
    if !(delta_init > 0.0 && delta_init.is_finite()) {
        return Err(Error::param("delta_init", "must be positive and finite"));
    }
    if initial.len() != domain.len() {
        return Err(Error::LengthMismatch {
            expected: domain.len(),
            actual: initial.len(),
        });
    }
    let missing = domain.sample_set().missing();
    let mut y = initial;
    let mut out = EngineOutput {
        variables: Vec::new(),
        iterations: 0,
        outer_iterations: 0,
        trace: Vec::new(),
        converged: missing.is_empty(),
        inner_cap_hits: 0,
    };
    if missing.is_empty() {
        out.variables = y;
        return Ok(out);
    }

    let threshold = config.stop_threshold_db();
    let mut delta = delta_init;
    let mut reached = false;
    while out.outer_iterations < config.outer_iter_cap {
        out.outer_iterations += 1;
        let snapshot = y.clone();
        let mut previous: Option<GradientVector> = None;
        let mut inner = 0;
        loop {
            inner += 1;
            out.iterations += 1;
            let spectrum = domain.spectrum(&y);
            let measure = measure_l1(&spectrum);
            let g = gradient_from_spectrum(domain, &spectrum, delta);
            let beta = previous.as_ref().map(|p| gradient_angle(p, &g));

            let mut max_update = 0.0f64;
            for &i in missing {
                y[i] -= g[i];
                max_update = max_update.max(libm::fabs(g[i]));
                if !y[i].is_finite() {
                    return Err(Error::Diverged {
                        iteration: out.iterations,
                    });
                }
            }
            out.trace.push(TraceEntry {
                iteration: out.iterations,
                delta,
                beta_deg: beta,
                measure,
                tr_db: None,
                max_update,
            });

            if beta.is_some_and(|b| b >= config.angle_threshold_deg) {
                break;
            }
            if inner >= config.inner_iter_cap {
                out.inner_cap_hits += 1;
                break;
            }
            previous = Some(g);
        }
        delta /= config.step_divisor;
        let tr = relative_change_db(&snapshot, &y, missing);
        if let Some(last) = out.trace.last_mut() {
            last.tr_db = Some(tr);
        }
        if tr < threshold {
            reached = true;
            break;
        }
    }
    out.converged = reached && out.inner_cap_hits == 0;
    out.variables = y;
    Ok(out)
}

/// Reconstructs the missing samples of a uniformly sampled signal.
pub fn reconstruct(partial: &PartialSignal, config: &ReconConfig) -> Result<ReconResult> {
    config.validate()?;
    if partial.sample_set().missing().is_empty() {
        return Ok(ReconResult {
            reconstructed: Signal::new(partial.zero_filled())?,
            iterations: 0,
            outer_iterations: 0,
            trace: Vec::new(),
            converged: true,
            inner_cap_hits: 0,
        });
    }
    let (y0, delta) = initialize(partial, config.delta_init)?;
    let domain = UniformDomain::new(partial.sample_set().clone())?;
    let out = run_engine(&domain, y0.into_inner(), delta, config)?;
    Ok(ReconResult {
        reconstructed: Signal::new(out.variables)?,
        iterations: out.iterations,
        outer_iterations: out.outer_iterations,
        trace: out.trace,
        converged: out.converged,
        inner_cap_hits: out.inner_cap_hits,
    })
}
