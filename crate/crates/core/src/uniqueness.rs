//! Uniqueness certificate for a recovered DFT-sparse signal from the
//! positions of its missing samples, for `N = 2^r`.
//!
//! For each stride `2^h`, `h = 0..r-1`:
//!
//! * `Q(2^h)` is the largest number of missing positions sharing one residue
//!   class modulo `2^h`;
//! * `S(2^(r-h))` sums the `Q(2^h) - 1` smallest per-class counts of the
//!   support modulo `2^(r-h)`.
//!
//! The solution of sparsity `s` is certified unique when
//! `2s < N - 2^h (Q(2^h) - 1) + 2 S(2^(r-h))` holds for every `h`. Forcing all
//! `S` terms to zero gives the signal-independent (worst case) bound.
//!
//! The certificate is not a guarantee. Small exhaustive checks with
//! [`oracle_unique`] find supports it accepts although a different signal of
//! the same sparsity matches the available samples; the worst case bound can
//! also fail for supports that are not conjugate symmetric.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::numerical_rank;
use crate::spectral::{DftPlan, SampleSet};

/// Singular-value threshold (relative) of the exhaustive rank oracle.
pub const ORACLE_RANK_TOL: f64 = 1e-8;

/// Largest length accepted by [`oracle_unique`].
pub const ORACLE_MAX_LEN: usize = 16;

/// Counts for one stride.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StrideRow {
    pub h: u32,
    /// `Q(2^h)`.
    pub q_stride: usize,
    /// `S(2^(r-h))`.
    pub s_term: usize,
    /// `N - 2^h (Q - 1) + 2S - 2s`; the certificate needs it positive.
    pub margin: i64,
    /// Per-stride value of the inequality exactly as typeset in the
    /// theorem statement, where `s` cancels: `N - 2^h (Q - 1) - 2S`.
    pub literal_margin: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UniquenessReport {
    pub len: usize,
    pub r: u32,
    pub sparsity: usize,
    pub rows: Vec<StrideRow>,
    pub unique: bool,
    /// Outcome of the literal inequality; informational only.
    pub literal_unique: bool,
    /// Largest `s` certified for every signal (all `S` forced to zero);
    /// `None` if even `s = 0` is not.
    pub worst_case_max_s: Option<usize>,
}

/// `log2(len)` for a power of two `len >= 2`.
pub fn exponent_of(len: usize) -> Result<u32> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros())
}

fn check_stride(len: usize, h: u32) -> Result<u32> {
    let r = exponent_of(len)?;
    if h >= r {
        return Err(Error::param(
            "h",
            alloc::format!("stride exponent {h} must be below r = {r}"),
        ));
    }
    Ok(r)
}

fn class_counts(indices: impl Iterator<Item = usize>, modulus: usize) -> Vec<usize> {
    let mut counts = vec![0usize; modulus];
    for i in indices {
        counts[i % modulus] += 1;
    }
    counts
}

/// `Q(2^h)`: the largest residue class of missing positions modulo `2^h`.
pub fn stride_missing_count(sample_set: &SampleSet, h: u32) -> Result<usize> {
    check_stride(sample_set.len(), h)?;
    Ok(class_counts(sample_set.missing().iter().copied(), 1 << h)
        .into_iter()
        .max()
        .unwrap_or(0))
}

fn validate_support(support: &[usize], len: usize) -> Result<()> {
    let mut seen = vec![false; len];
    for &k in support {
        if k >= len {
            return Err(Error::IndexOutOfRange { index: k, len });
        }
        if seen[k] {
            return Err(Error::DuplicateIndex(k));
        }
        seen[k] = true;
    }
    Ok(())
}

/// `S(2^(r-h))`: sum of the `Q(2^h) - 1` smallest support counts per
/// residue class modulo `2^(r-h)`.
pub fn s_term(support: &[usize], sample_set: &SampleSet, h: u32) -> Result<usize> {
    let r = check_stride(sample_set.len(), h)?;
    validate_support(support, sample_set.len())?;
    let q = stride_missing_count(sample_set, h)?;
    Ok(s_term_for(support, r, h, q))
}

fn s_term_for(support: &[usize], r: u32, h: u32, q: usize) -> usize {
    let mut counts = class_counts(support.iter().copied(), 1 << (r - h));
    counts.sort_unstable();
    // Q(2^h) <= 2^(r-h), so the slice is always in range
    counts[..q.saturating_sub(1)].iter().sum()
}

/// Evaluates the certificate for `support` (the recovered DFT positions).
pub fn check_uniqueness(support: &[usize], sample_set: &SampleSet) -> Result<UniquenessReport> {
    let len = sample_set.len();
    let r = exponent_of(len)?;
    validate_support(support, len)?;
    let s = support.len() as i64;
    let n = len as i64;

    let mut rows = Vec::with_capacity(r as usize);
    let mut worst_bound = i64::MAX;
    for h in 0..r {
        let q = stride_missing_count(sample_set, h)?;
        let st = s_term_for(support, r, h, q);
        let base = n - (1i64 << h) * (q as i64 - 1);
        worst_bound = worst_bound.min(base);
        rows.push(StrideRow {
            h,
            q_stride: q,
            s_term: st,
            margin: base + 2 * st as i64 - 2 * s,
            literal_margin: base - 2 * st as i64,
        });
    }
    // largest s with 2s < worst_bound
    let worst_case_max_s = if worst_bound > 0 {
        Some(((worst_bound - 1) / 2) as usize)
    } else {
        None
    };
    Ok(UniquenessReport {
        len,
        r,
        sparsity: support.len(),
        unique: rows.iter().all(|row| row.margin > 0),
        literal_unique: rows.iter().all(|row| row.literal_margin > 0),
        rows,
        worst_case_max_s,
    })
}

/// Exhaustive check of the uniqueness notion for small `N`.
///
/// Returns `false` iff some nonzero spectrum supported on `support` plus at
/// most `s_max` further bins has an inverse DFT vanishing at every available
/// position, i.e. some other signal of sparsity `<= s_max` matches the
/// available samples. Checked by the numerical rank of the inverse-DFT
/// submatrix (rows: available positions, columns: candidate bins).
pub fn oracle_unique(support: &[usize], sample_set: &SampleSet, s_max: usize) -> Result<bool> {
    oracle_unique_with_tol(support, sample_set, s_max, ORACLE_RANK_TOL)
}

pub fn oracle_unique_with_tol(
    support: &[usize],
    sample_set: &SampleSet,
    s_max: usize,
    rank_tol: f64,
) -> Result<bool> {
    let len = sample_set.len();
    if len > ORACLE_MAX_LEN {
        return Err(Error::TooLarge {
            len,
            max: ORACLE_MAX_LEN,
        });
    }
    validate_support(support, len)?;
    if sample_set.missing().is_empty() {
        return Ok(true);
    }
    let plan = DftPlan::new(len)?;
    // inverse-DFT column for bin k restricted to the available rows
    let column = |k: usize| -> Vec<Complex64> {
        sample_set
            .available()
            .iter()
            .map(|&n| plan.twiddle(n * k).conj())
            .collect()
    };
    let mut in_support = vec![false; len];
    support.iter().for_each(|&k| in_support[k] = true);
    let others: Vec<usize> = (0..len).filter(|&k| !in_support[k]).collect();
    let extra = s_max.min(others.len());
    let width = support.len() + extra;
    if width > sample_set.available_count() {
        return Ok(false);
    }

    let base: Vec<Vec<Complex64>> = support.iter().map(|&k| column(k)).collect();
    let mut pick: Vec<usize> = (0..extra).collect();
    loop {
        let mut cols = base.clone();
        cols.extend(pick.iter().map(|&i| column(others[i])));
        if numerical_rank(&cols, rank_tol) < width {
            return Ok(false);
        }
        if !next_combination(&mut pick, others.len()) {
            return Ok(true);
        }
    }
}

/// Advances `pick` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    for i in (0..k).rev() {
        if pick[i] < n - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// A change `z(n)` confined to the missing positions.
///
/// Adding it to a signal keeps the available samples; its spectrum
/// `Z(k) = sum_m z(q_m) exp(-j 2 pi q_m k / N)` is what the sparsity
/// minimization has to rule out.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSignal {
    sample_set: SampleSet,
    values: Vec<f64>,
}

impl PerturbationSignal {
    /// `values` aligned with `sample_set.missing()`.
    pub fn new(sample_set: SampleSet, values: Vec<f64>) -> Result<Self> {
        if values.len() != sample_set.missing_count() {
            return Err(Error::LengthMismatch {
                expected: sample_set.missing_count(),
                actual: values.len(),
            });
        }
        Ok(Self { sample_set, values })
    }

    pub fn to_signal(&self) -> Vec<f64> {
        let mut z = vec![0.0; self.sample_set.len()];
        for (&q, &v) in self.sample_set.missing().iter().zip(&self.values) {
            z[q] = v;
        }
        z
    }

    pub fn spectrum(&self) -> Vec<Complex64> {
        let n = self.sample_set.len();
        (0..n)
            .map(|k| {
                self.sample_set
                    .missing()
                    .iter()
                    .zip(&self.values)
                    .map(|(&q, &v)| {
                        let angle = -2.0 * PI * ((q * k) % n) as f64 / n as f64;
                        Complex64::new(libm::cos(angle), libm::sin(angle)) * v
                    })
                    .sum()
            })
            .collect()
    }
}
