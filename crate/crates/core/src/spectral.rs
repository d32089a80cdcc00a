//! DFT engine, sparsity measures and reconstruction-quality metrics.
//!
//! Convention: the forward transform is unnormalized,
//! `X(k) = sum_n x(n) exp(-j 2 pi n k / N)`, and the inverse carries `1/N`.
//! Every measure and gradient in the crate uses this convention.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Deref;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Returned by [`srr`] when the reconstruction error is exactly zero.
pub const SRR_CAP_DB: f64 = 300.0;

/// Relative tolerance for discarding the imaginary part of an inverse DFT.
pub const IMAG_RESIDUE_TOL: f64 = 1e-8;

/// A real-valued time-domain signal of length `N >= 2`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Signal(Vec<f64>);

impl Signal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooShort(values.len()));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn energy(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| f64::max(m, libm::fabs(*v)))
    }
}

impl Deref for Signal {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Complex DFT coefficients, one per frequency bin.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<Complex64>);

impl Spectrum {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::TooShort(coeffs.len()));
        }
        if let Some(index) = coeffs
            .iter()
            .position(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(coeffs))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// Checks `X(k) = conj(X(N-k))` to within `rel_tol` of the largest
    /// coefficient magnitude.
    pub fn is_conjugate_symmetric(&self, rel_tol: f64) -> bool {
        let n = self.0.len();
        let scale = self
            .0
            .iter()
            .fold(0.0, |m, c| f64::max(m, c.norm()))
            .max(f64::MIN_POSITIVE);
        (0..n).all(|k| (self.0[k] - self.0[(n - k) % n].conj()).norm() <= rel_tol * scale)
    }
}

impl Deref for Spectrum {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

/// Partition of `0..N` into available and missing sample positions.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SampleSet {
    len: usize,
    available: Vec<usize>,
    missing: Vec<usize>,
}

impl SampleSet {
    /// Builds the partition from the available positions; everything else is missing.
    pub fn from_available(len: usize, available: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mask = index_mask(len, available)?;
        Self::from_mask(len, &mask)
    }

    /// Builds the partition from the missing positions; everything else is available.
    pub fn from_missing(len: usize, missing: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mask = index_mask(len, missing)?;
        let available: Vec<bool> = mask.iter().map(|m| !m).collect();
        Self::from_mask(len, &available)
    }

    /// All positions available.
    pub fn complete(len: usize) -> Result<Self> {
        Self::from_mask(len, &vec![true; len])
    }

    fn from_mask(len: usize, available_mask: &[bool]) -> Result<Self> {
        if len < 2 {
            return Err(Error::TooShort(len));
        }
        let (available, missing): (Vec<usize>, Vec<usize>) =
            (0..len).partition(|&i| available_mask[i]);
        if available.is_empty() {
            return Err(Error::NoAvailableSamples);
        }
        Ok(Self {
            len,
            available,
            missing,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Sorted available positions.
    pub fn available(&self) -> &[usize] {
        &self.available
    }

    /// Sorted missing positions.
    pub fn missing(&self) -> &[usize] {
        &self.missing
    }

    pub fn missing_count(&self) -> usize {
        self.missing.len()
    }

    pub fn available_count(&self) -> usize {
        self.available.len()
    }

    pub fn is_available(&self, index: usize) -> bool {
        self.available.binary_search(&index).is_ok()
    }
}

fn index_mask(len: usize, indices: impl IntoIterator<Item = usize>) -> Result<Vec<bool>> {
    let mut mask = vec![false; len];
    for index in indices {
        if index >= len {
            return Err(Error::IndexOutOfRange { index, len });
        }
        if mask[index] {
            return Err(Error::DuplicateIndex(index));
        }
        mask[index] = true;
    }
    Ok(mask)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Algorithm {
    Direct,
    Radix2,
}

/// Precomputed transform of a fixed length.
///
/// [`DftPlan::new`] evaluates the direct `O(N^2)` sum. [`DftPlan::fast`] uses
/// an iterative radix-2 transform when `N` is a power of two and falls back to
/// the direct sum otherwise. Both share one twiddle table, so the factor for
/// `(n, k)` is bit-identical to `twiddle(n * k)`.
#[derive(Debug, Clone)]
pub struct DftPlan {
    len: usize,
    twiddles: Vec<Complex64>,
    algorithm: Algorithm,
}

impl DftPlan {
    pub fn new(len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::TooShort(len));
        }
        let twiddles = (0..len)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / len as f64;
                Complex64::new(libm::cos(angle), libm::sin(angle))
            })
            .collect();
        Ok(Self {
            len,
            twiddles,
            algorithm: Algorithm::Direct,
        })
    }

    pub fn fast(len: usize) -> Result<Self> {
        let mut plan = Self::new(len)?;
        if len.is_power_of_two() {
            plan.algorithm = Algorithm::Radix2;
        }
        Ok(plan)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `exp(-j 2 pi m / N)` for any integer `m`.
    pub fn twiddle(&self, m: usize) -> Complex64 {
        self.twiddles[m % self.len]
    }

    /// Spectrum of a unit impulse at `n`: `D_n(k) = exp(-j 2 pi n k / N)`.
    pub fn impulse_spectrum(&self, n: usize) -> Vec<Complex64> {
        (0..self.len).map(|k| self.twiddle(n * k)).collect()
    }

    pub fn forward(&self, input: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(input.len(), self.len, "DFT input length mismatch");
        match self.algorithm {
            Algorithm::Direct => self.direct(input, false),
            Algorithm::Radix2 => self.radix2(input, false),
        }
    }

    pub fn forward_real(&self, input: &[f64]) -> Vec<Complex64> {
        let buf: Vec<Complex64> = input.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&buf)
    }

    /// Inverse transform including the `1/N` factor.
    pub fn inverse(&self, input: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(input.len(), self.len, "DFT input length mismatch");
        let mut out = match self.algorithm {
            Algorithm::Direct => self.direct(input, true),
            Algorithm::Radix2 => self.radix2(input, true),
        };
        let scale = 1.0 / self.len as f64;
        out.iter_mut().for_each(|v| *v *= scale);
        out
    }

    fn direct(&self, input: &[Complex64], inverse: bool) -> Vec<Complex64> {
        let n = self.len;
        (0..n)
            .map(|k| {
                input
                    .iter()
                    .enumerate()
                    .fold(Complex64::new(0.0, 0.0), |acc, (t, &x)| {
                        let w = self.twiddles[(t * k) % n];
                        acc + x * if inverse { w.conj() } else { w }
                    })
            })
            .collect()
    }

    fn radix2(&self, input: &[Complex64], inverse: bool) -> Vec<Complex64> {
        let n = self.len;
        let bits = n.trailing_zeros();
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (i, &x) in input.iter().enumerate() {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            buf[j] = x;
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let stride = n / size;
            for start in (0..n).step_by(size) {
                for j in 0..half {
                    let w = self.twiddles[j * stride];
                    let w = if inverse { w.conj() } else { w };
                    let a = buf[start + j];
                    let b = buf[start + j + half] * w;
                    buf[start + j] = a + b;
                    buf[start + j + half] = a - b;
                }
            }
            size *= 2;
        }
        buf
    }
}

/// Forward DFT of a real signal (direct evaluation).
pub fn dft(signal: &Signal) -> Spectrum {
    let plan = DftPlan::new(signal.len()).expect("Signal invariant guarantees len >= 2");
    Spectrum(plan.forward_real(signal))
}

/// Inverse DFT to a real signal.
///
/// Fails with [`Error::ImaginaryResidue`] when the spectrum is not conjugate
/// symmetric, i.e. the largest imaginary part exceeds [`IMAG_RESIDUE_TOL`]
/// times the largest output magnitude.
pub fn idft(spectrum: &Spectrum) -> Result<Signal> {
    let plan = DftPlan::new(spectrum.len())?;
    real_part_checked(&plan.inverse(spectrum), IMAG_RESIDUE_TOL).and_then(Signal::new)
}

/// Drops the imaginary part if it is negligible relative to the largest magnitude.
pub fn real_part_checked(values: &[Complex64], rel_tol: f64) -> Result<Vec<f64>> {
    let scale = values.iter().fold(0.0, |m, c| f64::max(m, c.norm()));
    let residue = values
        .iter()
        .fold(0.0, |m, c| f64::max(m, libm::fabs(c.im)));
    if residue > rel_tol * scale {
        return Err(Error::ImaginaryResidue {
            residue,
            tolerance: rel_tol * scale,
        });
    }
    Ok(values.iter().map(|c| c.re).collect())
}

/// `sum_k |X(k)|`.
pub fn measure_l1(coeffs: &[Complex64]) -> f64 {
    coeffs.iter().map(|c| c.norm()).sum()
}

/// `sum_k |X(k)/N|^(1/4)`. Close to the support size for a genuinely sparse
/// spectrum and of order `N` for a dense one.
pub fn measure_lp_quarter(coeffs: &[Complex64]) -> f64 {
    let n = coeffs.len() as f64;
    coeffs
        .iter()
        .map(|c| libm::sqrt(libm::sqrt(c.norm() / n)))
        .sum()
}

/// Signal-to-reconstruction-error ratio in dB over all samples.
///
/// Exact reconstruction returns [`SRR_CAP_DB`].
pub fn srr(original: &[f64], reconstructed: &[f64]) -> Result<f64> {
    if original.len() != reconstructed.len() {
        return Err(Error::LengthMismatch {
            expected: original.len(),
            actual: reconstructed.len(),
        });
    }
    let signal: f64 = original.iter().map(|v| v * v).sum();
    if signal == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let error: f64 = original
        .iter()
        .zip(reconstructed)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    if error == 0.0 {
        return Ok(SRR_CAP_DB);
    }
    Ok((10.0 * libm::log10(signal / error)).min(SRR_CAP_DB))
}
