//! Nonuniformly positioned samples.
//!
//! A periodic band-limited signal with `N` (even) samples per period is
//! determined by its values on the uniform grid `n * dt`; its value at any
//! instant `t` is a Dirichlet-kernel combination of those samples. Stacking
//! the kernel rows for a set of instants gives the matrix `B` with
//! `x_hat = B x`. Reconstruction treats the instant-domain values as the
//! variables: measured slots keep their values, unmeasured slots are placed
//! on the uniform grid and start at zero, and every candidate is mapped back
//! to the uniform grid with `B^-1` before its spectrum is measured.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::recon::{
    gradient_from_spectrum, initialize, run_engine, GradientVector, PartialSignal, ReconConfig,
    ReconResult, SparsityDomain,
};
use crate::spectral::{
    measure_l1, measure_lp_quarter, real_part_checked, DftPlan, SampleSet, Signal, IMAG_RESIDUE_TOL,
};
use crate::synth::{rng_for, Stream};

/// Conditioning above which [`build_operator`] refuses the grid.
pub const MAX_CONDITION: f64 = 1e12;

/// Distance to an integer below which the kernel takes its limit value.
const SINGULARITY_TOL: f64 = 1e-12;

/// Imaginary tolerance of [`eval_interpolant`].
const INTERP_IMAG_TOL: f64 = 1e-9;

/// Default sparse-recovery detection level, as a fraction of `N`.
pub const DETECTION_FRACTION: f64 = 0.5;

/// Sampling instants for one period, one per grid slot.
#[derive(Debug, Clone, PartialEq)]
pub struct NonuniformGrid {
    len: usize,
    dt: f64,
    instants: Vec<f64>,
    measured: Vec<bool>,
}

impl NonuniformGrid {
    /// Validates `|t_i - i dt| <= dt/2` on measured slots, `t_i = i dt` on the
    /// others, and strictly increasing instants.
    pub fn new(len: usize, dt: f64, instants: Vec<f64>, measured: Vec<bool>) -> Result<Self> {
        if len < 2 {
            return Err(Error::TooShort(len));
        }
        if !len.is_multiple_of(2) {
            return Err(Error::OddLength(len));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param("dt", "must be positive and finite"));
        }
        for (name, got) in [("instants", instants.len()), ("measured", measured.len())] {
            if got != len {
                return Err(Error::InvalidGrid(alloc::format!(
                    "{name} has {got} entries, expected {len}"
                )));
            }
        }
        for (i, (&t, &m)) in instants.iter().zip(&measured).enumerate() {
            let nominal = i as f64 * dt;
            if !t.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            if m && libm::fabs(t - nominal) > 0.5 * dt * (1.0 + 1e-12) {
                return Err(Error::InvalidGrid(alloc::format!(
                    "instant {t} of slot {i} is more than dt/2 from {nominal}"
                )));
            }
            if !m && t != nominal {
                return Err(Error::InvalidGrid(alloc::format!(
                    "unmeasured slot {i} must sit at {nominal}"
                )));
            }
        }
        if let Some(i) = instants.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(alloc::format!(
                "instants not strictly increasing at slots {i}, {}",
                i + 1
            )));
        }
        Ok(Self {
            len,
            dt,
            instants,
            measured,
        })
    }

    pub fn uniform(len: usize, dt: f64) -> Result<Self> {
        let instants = (0..len).map(|i| i as f64 * dt).collect();
        Self::new(len, dt, instants, vec![false; len])
    }

    /// Measured slots at their instants, every other slot on the grid.
    pub fn from_samples(len: usize, dt: f64, samples: &[NonuniformSample]) -> Result<Self> {
        let mut instants: Vec<f64> = (0..len).map(|i| i as f64 * dt).collect();
        let mut measured = vec![false; len];
        for s in samples {
            if s.slot >= len {
                return Err(Error::IndexOutOfRange { index: s.slot, len });
            }
            if measured[s.slot] {
                return Err(Error::DuplicateIndex(s.slot));
            }
            measured[s.slot] = true;
            instants[s.slot] = s.t;
        }
        Self::new(len, dt, instants, measured)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn instants(&self) -> &[f64] {
        &self.instants
    }

    pub fn measured(&self) -> &[bool] {
        &self.measured
    }

    pub fn period(&self) -> f64 {
        self.len as f64 * self.dt
    }

    /// Highest representable angular frequency, `pi / dt`.
    pub fn omega_max(&self) -> f64 {
        PI / self.dt
    }
}

/// Weight of the uniform sample at offset `u = n - t/dt` in the periodic
/// band-limited interpolant of length `len` (even):
/// `sin(pi u) / (len sin(pi u / len)) * exp(j pi u / len)`.
///
/// The kernel has period `len` in `u`; at integer `u` it equals 1 on
/// multiples of `len` and 0 elsewhere.
pub fn dirichlet_kernel(u: f64, len: usize) -> Complex64 {
    let n = len as f64;
    let u = u - n * libm::round(u / n);
    let m = libm::round(u);
    let frac = u - m;
    if libm::fabs(frac) < SINGULARITY_TOL {
        return if m == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    // sin(pi u) = (-1)^m sin(pi frac), exact reduction
    let sign = if (m as i64) % 2 == 0 { 1.0 } else { -1.0 };
    let ratio = sign * libm::sin(PI * frac) / (n * libm::sin(PI * u / n));
    let phase = PI * u / n;
    Complex64::new(ratio * libm::cos(phase), ratio * libm::sin(phase))
}

/// Interpolant value at `t`, complex in general.
pub fn eval_interpolant_complex(uniform: &[f64], t: f64, dt: f64) -> Result<Complex64> {
    let len = uniform.len();
    if !len.is_multiple_of(2) {
        return Err(Error::OddLength(len));
    }
    if len < 2 {
        return Err(Error::TooShort(len));
    }
    let pos = t / dt;
    Ok(uniform
        .iter()
        .enumerate()
        .map(|(n, &x)| dirichlet_kernel(n as f64 - pos, len) * x)
        .sum())
}

/// Interpolant value at `t` for a real signal without Nyquist content.
pub fn eval_interpolant(uniform: &[f64], t: f64, dt: f64) -> Result<f64> {
    let v = eval_interpolant_complex(uniform, t, dt)?;
    let scale = uniform
        .iter()
        .fold(libm::fabs(v.re), |m, x| f64::max(m, libm::fabs(*x)));
    let tol = INTERP_IMAG_TOL * scale.max(f64::MIN_POSITIVE);
    if libm::fabs(v.im) > tol {
        return Err(Error::ImaginaryResidue {
            residue: libm::fabs(v.im),
            tolerance: tol,
        });
    }
    Ok(v.re)
}

/// `B`, `B^-1` and a 1-norm condition estimate for a fixed grid.
#[derive(Debug, Clone)]
pub struct InterpolationOperator {
    pub b: Matrix,
    pub b_inv: Matrix,
    pub condition_estimate: f64,
}

impl InterpolationOperator {
    pub fn len(&self) -> usize {
        self.b.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.b.dim() == 0
    }
}

pub fn build_operator(grid: &NonuniformGrid) -> Result<InterpolationOperator> {
    let len = grid.len();
    let dt = grid.dt();
    let b = Matrix::from_fn(len, |i, j| {
        dirichlet_kernel(j as f64 - grid.instants()[i] / dt, len)
    });
    let b_inv = match b.inverse() {
        Ok(inv) => inv,
        Err(Error::Singular) => {
            return Err(Error::IllConditioned {
                estimate: f64::INFINITY,
            })
        }
        Err(e) => return Err(e),
    };
    let condition_estimate = b.norm_one() * b_inv.norm_one();
    if condition_estimate.is_nan() || condition_estimate > MAX_CONDITION {
        return Err(Error::IllConditioned {
            estimate: condition_estimate,
        });
    }
    Ok(InterpolationOperator {
        b,
        b_inv,
        condition_estimate,
    })
}

/// `x = B^-1 x_hat`, returned as a real uniform-grid signal.
pub fn recalc_to_uniform(values: &[f64], op: &InterpolationOperator) -> Result<Signal> {
    if values.len() != op.len() {
        return Err(Error::LengthMismatch {
            expected: op.len(),
            actual: values.len(),
        });
    }
    Signal::new(real_part_checked(
        &op.b_inv.mul_real_vec(values),
        IMAG_RESIDUE_TOL,
    )?)
}

/// One measured value and the grid slot it belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NonuniformSample {
    pub slot: usize,
    pub t: f64,
    pub value: f64,
}

impl NonuniformSample {
    /// Assigns each `(t, value)` to the nearest grid slot.
    pub fn from_instants(len: usize, dt: f64, points: &[(f64, f64)]) -> Result<Vec<Self>> {
        points
            .iter()
            .map(|&(t, value)| {
                if !t.is_finite() || !value.is_finite() {
                    return Err(Error::InvalidGrid(
                        "non-finite instant or value".to_string(),
                    ));
                }
                let slot = libm::round(t / dt);
                if slot < 0.0 || slot >= len as f64 {
                    return Err(Error::InvalidGrid(alloc::format!(
                        "instant {t} falls outside the period"
                    )));
                }
                Ok(Self {
                    slot: slot as usize,
                    t,
                    value,
                })
            })
            .collect()
    }
}

/// Samples a uniform-grid signal at jittered instants of the given slots.
///
/// Jitter is uniform in `[-max_jitter, max_jitter) * dt`, `max_jitter <= 0.5`.
pub fn jittered_samples(
    uniform: &[f64],
    slots: &[usize],
    dt: f64,
    max_jitter: f64,
    seed: u64,
) -> Result<Vec<NonuniformSample>> {
    if !(0.0..=0.5).contains(&max_jitter) {
        return Err(Error::param("max_jitter", "must lie in [0, 0.5]"));
    }
    let mut rng = rng_for(seed, Stream::Jitter);
    slots
        .iter()
        .map(|&slot| {
            let nu = if max_jitter > 0.0 {
                rng.random_range(-max_jitter..max_jitter)
            } else {
                0.0
            };
            let t = (slot as f64 + nu) * dt;
            Ok(NonuniformSample {
                slot,
                t,
                value: eval_interpolant(uniform, t, dt)?,
            })
        })
        .collect()
}

/// Variables live on the instant grid; spectra are those of `B^-1 x_hat`.
#[derive(Debug, Clone)]
pub struct OperatorDomain<'a> {
    plan: DftPlan,
    op: &'a InterpolationOperator,
    sample_set: SampleSet,
    directions: Vec<Vec<Complex64>>,
}

impl<'a> OperatorDomain<'a> {
    pub fn new(op: &'a InterpolationOperator, sample_set: SampleSet) -> Result<Self> {
        if sample_set.len() != op.len() {
            return Err(Error::LengthMismatch {
                expected: op.len(),
                actual: sample_set.len(),
            });
        }
        let plan = DftPlan::fast(op.len())?;
        // one cached column of B^-1 per unmeasured slot
        let directions = sample_set
            .missing()
            .iter()
            .map(|&slot| plan.forward(&op.b_inv.column(slot)))
            .collect();
        Ok(Self {
            plan,
            op,
            sample_set,
            directions,
        })
    }

    pub fn to_uniform(&self, variables: &[f64]) -> Vec<Complex64> {
        self.op.b_inv.mul_real_vec(variables)
    }
}

impl SparsityDomain for OperatorDomain<'_> {
    fn len(&self) -> usize {
        self.op.len()
    }

    fn sample_set(&self) -> &SampleSet {
        &self.sample_set
    }

    fn spectrum(&self, variables: &[f64]) -> Vec<Complex64> {
        self.plan.forward(&self.to_uniform(variables))
    }

    fn direction(&self, rank: usize) -> &[Complex64] {
        &self.directions[rank]
    }
}

/// Gradient in the instant domain through the cached `B^-1` columns.
pub fn gradient_nonuniform(
    variables: &[f64],
    domain: &OperatorDomain<'_>,
    delta: f64,
) -> GradientVector {
    let spectrum = domain.spectrum(variables);
    gradient_from_spectrum(domain, &spectrum, delta)
}

/// Same gradient by solving `B y = x_hat +/- delta e_i` twice per slot.
pub fn gradient_nonuniform_reference(
    variables: &[f64],
    op: &InterpolationOperator,
    sample_set: &SampleSet,
    delta: f64,
) -> Result<Vec<f64>> {
    let n = op.len();
    let lu = Lu::factor(&op.b)?;
    let plan = DftPlan::new(n)?;
    let mut probe: Vec<Complex64> = variables.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut g = vec![0.0; n];
    for &slot in sample_set.missing() {
        probe[slot] = Complex64::new(variables[slot] + delta, 0.0);
        let up = measure_l1(&plan.forward(&lu.solve(&probe)));
        probe[slot] = Complex64::new(variables[slot] - delta, 0.0);
        let down = measure_l1(&plan.forward(&lu.solve(&probe)));
        probe[slot] = Complex64::new(variables[slot], 0.0);
        g[slot] = (up - down) / n as f64;
    }
    Ok(g)
}

#[derive(Debug, Clone)]
pub struct NonuniformRecon {
    /// Uniform-grid reconstruction (real part) with the engine's trace.
    pub result: ReconResult,
    /// Final instant-domain values; measured slots are untouched.
    pub instant_values: Vec<f64>,
    /// Largest imaginary part dropped when mapping to the uniform grid.
    pub imag_residue: f64,
    pub condition_estimate: f64,
}

/// Reconstructs the uniform-grid signal from measurements at arbitrary instants.
pub fn reconstruct_nonuniform(
    samples: &[NonuniformSample],
    len: usize,
    dt: f64,
    config: &ReconConfig,
) -> Result<NonuniformRecon> {
    config.validate()?;
    if samples.is_empty() {
        return Err(Error::NoAvailableSamples);
    }
    let grid = NonuniformGrid::from_samples(len, dt, samples)?;
    let op = build_operator(&grid)?;
    let partial = PartialSignal::from_pairs(len, samples.iter().map(|s| (s.slot, s.value)))?;
    let (start, delta) = initialize(&partial, config.delta_init)?;
    let domain = OperatorDomain::new(&op, partial.sample_set().clone())?;
    let out = run_engine(&domain, start.into_inner(), delta, config)?;

    let uniform = domain.to_uniform(&out.variables);
    let imag_residue = uniform
        .iter()
        .fold(0.0, |m, c| f64::max(m, libm::fabs(c.im)));
    let reconstructed = Signal::new(uniform.iter().map(|c| c.re).collect())?;
    Ok(NonuniformRecon {
        result: ReconResult {
            reconstructed,
            iterations: out.iterations,
            outer_iterations: out.outer_iterations,
            trace: out.trace,
            converged: out.converged,
            inner_cap_hits: out.inner_cap_hits,
        },
        instant_values: out.variables,
        imag_residue,
        condition_estimate: op.condition_estimate,
    })
}

/// `true` when the l_(1/4) measure of the signal's spectrum is below
/// `fraction * N`, i.e. the result looks like a genuinely sparse recovery.
pub fn detect_sparse(uniform: &[f64], fraction: f64) -> bool {
    let plan = match DftPlan::fast(uniform.len()) {
        Ok(p) => p,
        Err(_) => return false,
    };
    measure_lp_quarter(&plan.forward_real(uniform)) < fraction * uniform.len() as f64
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;
    use crate::recon::reconstruct;
    use crate::spectral::srr;
    use crate::synth::{generate_multitone, random_missing_set, MultitoneSpec};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent Fourier-series evaluation with bins folded to
    /// `-N/2..N/2-1`: `x(t) = sum_k X_k exp(j 2 pi k t / T)`, `X_k = X(k)/N`.
    fn fourier_series(uniform: &[f64], t: f64, dt: f64) -> Complex64 {
        let n = uniform.len();
        let period = n as f64 * dt;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let mut xk = Complex64::new(0.0, 0.0);
            for (i, &x) in uniform.iter().enumerate() {
                let a = -2.0 * PI * ((i * k) % n) as f64 / n as f64;
                xk += Complex64::new(libm::cos(a), libm::sin(a)) * x;
            }
            let kk = if k < n / 2 {
                k as f64
            } else {
                k as f64 - n as f64
            };
            let a = 2.0 * PI * kk * t / period;
            acc += xk / n as f64 * Complex64::new(libm::cos(a), libm::sin(a));
        }
        acc
    }

    fn jittered_grid(len: usize, dt: f64, seed: u64) -> NonuniformGrid {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let instants = (0..len)
            .map(|i| (i as f64 + rng.random_range(-0.45..0.45)) * dt)
            .collect();
        NonuniformGrid::new(len, dt, instants, vec![true; len]).unwrap()
    }

    #[test]
    fn grid_points_return_samples() {
        let truth = generate_multitone(&MultitoneSpec::new(16, 2, 3)).unwrap();
        for n in 0..16 {
            let v = eval_interpolant(&truth.signal, n as f64 * 0.5, 0.5).unwrap();
            assert!((v - truth.signal[n]).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_is_reproduced() {
        let c = vec![1.75; 32];
        for t in [0.1, 3.3, 17.77, 31.9] {
            assert!((eval_interpolant(&c, t, 1.0).unwrap() - 1.75).abs() < 1e-12);
        }
    }

    #[test]
    fn odd_length_rejected() {
        assert_eq!(
            eval_interpolant(&[1.0; 7], 0.3, 1.0).unwrap_err(),
            Error::OddLength(7)
        );
        assert!(NonuniformGrid::uniform(9, 1.0).is_err());
    }

    #[test]
    fn interpolant_matches_fourier_series() {
        let truth = generate_multitone(&MultitoneSpec::new(128, 3, 77)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let t = rng.random_range(0.0..128.0) * 0.01;
            let got = eval_interpolant(&truth.signal, t, 0.01).unwrap();
            let want = fourier_series(&truth.signal, t, 0.01);
            assert!((got - want.re).abs() < 1e-9 && want.im.abs() < 1e-9);
        }
    }

    #[test]
    fn uniform_grid_gives_identity() {
        let op = build_operator(&NonuniformGrid::uniform(64, 0.25).unwrap()).unwrap();
        assert_eq!(op.b, Matrix::identity(64));
        assert_eq!(op.b_inv, Matrix::identity(64));
        let x: Vec<f64> = (0..64).map(|i| i as f64 * 0.1 - 2.0).collect();
        assert_eq!(recalc_to_uniform(&x, &op).unwrap().values(), &x[..]);
    }

    #[test]
    fn operator_rows_evaluate_interpolant() {
        let truth = generate_multitone(&MultitoneSpec::new(32, 3, 5)).unwrap();
        let grid = jittered_grid(32, 1.0, 8);
        let op = build_operator(&grid).unwrap();
        let at_instants = op.b.mul_real_vec(&truth.signal);
        for (i, v) in at_instants.iter().enumerate() {
            let want = fourier_series(&truth.signal, grid.instants()[i], 1.0);
            assert!((v - want).norm() < 1e-9);
        }
        assert!(op.b_inv.mul(&op.b).identity_residual() < 1e-8);
        assert!(op.b.mul(&op.b_inv).identity_residual() < 1e-8);
    }

    #[test]
    fn full_jittered_measurement_recalculates_exactly() {
        let truth = generate_multitone(&MultitoneSpec::new(128, 3, 21)).unwrap();
        let slots: Vec<usize> = (0..128).collect();
        let samples = jittered_samples(&truth.signal, &slots, 1.0, 0.5, 21).unwrap();
        let grid = NonuniformGrid::from_samples(128, 1.0, &samples).unwrap();
        let op = build_operator(&grid).unwrap();
        let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
        let back = recalc_to_uniform(&values, &op).unwrap();
        assert!(srr(&truth.signal, &back).unwrap() > 120.0);
        assert_eq!(
            recalc_to_uniform(&[0.0; 128], &op).unwrap().values(),
            &[0.0; 128][..]
        );
    }

    #[test]
    fn coincident_instants_rejected() {
        let err = NonuniformGrid::new(4, 1.0, vec![0.0, 1.5, 1.5, 3.0], vec![true; 4]).unwrap_err();
        assert!(matches!(err, Error::InvalidGrid(_)));
        let err = NonuniformGrid::new(4, 1.0, vec![0.0, 1.7, 2.0, 3.0], vec![true; 4]).unwrap_err();
        assert!(matches!(err, Error::InvalidGrid(_)));
    }

    #[test]
    fn near_coincident_instants_are_ill_conditioned() {
        let grid = NonuniformGrid::new(
            8,
            1.0,
            vec![0.0, 1.0, 2.0, 3.5 - 1e-14, 3.5, 5.0, 6.0, 7.0],
            vec![true; 8],
        )
        .unwrap();
        assert!(matches!(
            build_operator(&grid),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn zero_jitter_matches_uniform_engine() {
        let truth = generate_multitone(&MultitoneSpec::new(64, 2, 31)).unwrap();
        let set = random_missing_set(64, 30, 31).unwrap();
        let samples: Vec<NonuniformSample> = set
            .available()
            .iter()
            .map(|&i| NonuniformSample {
                slot: i,
                t: i as f64,
                value: truth.signal[i],
            })
            .collect();
        let cfg = ReconConfig::default();
        let nu = reconstruct_nonuniform(&samples, 64, 1.0, &cfg).unwrap();
        let partial = PartialSignal::from_signal(&truth.signal, set).unwrap();
        let uni = reconstruct(&partial, &cfg).unwrap();
        assert_eq!(nu.result.iterations, uni.iterations);
        for (a, b) in nu.result.trace.iter().zip(&uni.trace) {
            assert_eq!(a.delta, b.delta);
            assert!((a.measure - b.measure).abs() <= 1e-10 * b.measure);
            match (a.beta_deg, b.beta_deg) {
                (Some(x), Some(y)) => assert!((x - y).abs() < 1e-6),
                (None, None) => {}
                other => panic!("{other:?}"),
            }
        }
        for (a, b) in nu.result.reconstructed.iter().zip(uni.reconstructed.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn moderate_nonuniform_recovery() {
        let truth = generate_multitone(&MultitoneSpec::new(128, 3, 4)).unwrap();
        let set = random_missing_set(128, 64, 4).unwrap();
        let samples = jittered_samples(&truth.signal, set.available(), 1.0, 0.5, 4).unwrap();
        let cfg = ReconConfig {
            target_precision_db: Some(-120.0),
            ..Default::default()
        };
        let rec = reconstruct_nonuniform(&samples, 128, 1.0, &cfg).unwrap();
        assert!(srr(&truth.signal, &rec.result.reconstructed).unwrap() > 100.0);
        for s in &samples {
            assert_eq!(rec.instant_values[s.slot].to_bits(), s.value.to_bits());
        }
        assert!(detect_sparse(&rec.result.reconstructed, DETECTION_FRACTION));
    }

    proptest! {
        #[test]
        fn recalc_is_linear(seed in any::<u64>(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
            let grid = jittered_grid(16, 1.0, seed);
            let op = build_operator(&grid).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // instant-domain vectors of real band-limited signals (no Nyquist bin)
            let mut sample = || {
                let mut u: Vec<f64> = (0..16).map(|_| rng.random_range(-1.0..1.0)).collect();
                let nyq: f64 = u.iter().enumerate().map(|(i, v)| if i % 2 == 0 { *v } else { -*v }).sum::<f64>() / 16.0;
                u.iter_mut().enumerate().for_each(|(i, v)| *v -= if i % 2 == 0 { nyq } else { -nyq });
                op.b.mul_real_vec(&u).iter().map(|c| c.re).collect::<Vec<f64>>()
            };
            let (u, v) = (sample(), sample());
            let combo: Vec<f64> = u.iter().zip(&v).map(|(a, b)| alpha * a + beta * b).collect();
            let lhs = recalc_to_uniform(&combo, &op).unwrap();
            let ru = recalc_to_uniform(&u, &op).unwrap();
            let rv = recalc_to_uniform(&v, &op).unwrap();
            for i in 0..16 {
                prop_assert!((lhs[i] - (alpha * ru[i] + beta * rv[i])).abs() < 1e-9);
            }
        }

        #[test]
        fn cached_columns_match_two_solves(seed in any::<u64>()) {
            let len = 32;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let set = random_missing_set(len, 10, seed).unwrap();
            let mut instants: Vec<f64> = (0..len).map(|i| i as f64).collect();
            for &i in set.available() {
                instants[i] += rng.random_range(-0.45..0.45);
            }
            let measured: Vec<bool> = (0..len).map(|i| set.is_available(i)).collect();
            let grid = NonuniformGrid::new(len, 1.0, instants, measured).unwrap();
            let op = build_operator(&grid).unwrap();
            let y: Vec<f64> = (0..len).map(|_| rng.random_range(-2.0..2.0)).collect();
            let delta = libm::pow(10.0, rng.random_range(-5.0..0.0));
            let domain = OperatorDomain::new(&op, set.clone()).unwrap();
            let fast = gradient_nonuniform(&y, &domain, delta);
            let slow = gradient_nonuniform_reference(&y, &op, &set, delta).unwrap();
            for (a, b) in fast.iter().zip(&slow) {
                prop_assert!((a - b).abs() <= 1e-10, "{} vs {}", a, b);
            }
        }
    }
}
