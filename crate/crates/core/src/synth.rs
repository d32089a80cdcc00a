//! Seeded generation of multitone test signals, missing-sample patterns and noise.
//!
//! Every generator is a pure function of its parameters and a 64-bit seed.
//! The generator is ChaCha8 seeded through `seed_from_u64`; each purpose
//! (tones, masks, noise, jitter) reads its own ChaCha stream so that the
//! same seed can drive all of them without correlation.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::spectral::{SampleSet, Signal};

/// ChaCha stream identifiers, one per generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Tones = 0,
    Mask = 1,
    Noise = 2,
    Jitter = 3,
}

/// RNG for a given seed and purpose.
pub fn rng_for(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Per-trial seed.
pub fn substream(seed: u64, trial: u64) -> u64 {
    seed ^ trial
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultitoneSpec {
    pub len: usize,
    /// Number of real cosines; the DFT sparsity is twice this.
    pub components: usize,
    pub seed: u64,
    pub amplitude_sigma: f64,
}

impl MultitoneSpec {
    pub fn new(len: usize, components: usize, seed: u64) -> Self {
        Self {
            len,
            components,
            seed,
            amplitude_sigma: 1.0,
        }
    }

    pub fn sparsity(&self) -> usize {
        2 * self.components
    }

    fn validate(&self) -> Result<()> {
        if self.len < 4 {
            return Err(Error::TooShort(self.len));
        }
        if self.components == 0 || self.components > self.len / 4 {
            return Err(Error::param(
                "components",
                alloc::format!(
                    "need 1 <= K <= N/4 = {}, got {}",
                    self.len / 4,
                    self.components
                ),
            ));
        }
        if !(self.amplitude_sigma.is_finite() && self.amplitude_sigma > 0.0) {
            return Err(Error::param(
                "amplitude_sigma",
                "must be positive and finite",
            ));
        }
        Ok(())
    }
}

/// A generated signal together with its true DFT support.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub signal: Signal,
    /// Sorted DFT support: every `k_i` and its mirror `N - k_i`.
    pub support: Vec<usize>,
    pub frequencies: Vec<usize>,
    pub amplitudes: Vec<f64>,
    pub phases: Vec<f64>,
}

impl GroundTruth {
    pub fn sparsity(&self) -> usize {
        self.support.len()
    }
}

/// `x(n) = sum_i A_i cos(2 pi n k_i / N + phi_i)` with Gaussian amplitudes,
/// uniform phases in `[0, 2 pi)` and frequencies in `1..N` such that no two
/// components share a bin or a mirror bin. `k = N/2` is never used.
pub fn generate_multitone(spec: &MultitoneSpec) -> Result<GroundTruth> {
    spec.validate()?;
    let n = spec.len;
    // Bins 1..ceil(N/2) each represent one {k, N-k} pair.
    let pairs = (n - 1) / 2;
    if spec.components > pairs {
        return Err(Error::FrequencyPlacement {
            requested: spec.components,
            len: n,
        });
    }
    let mut rng = rng_for(spec.seed, Stream::Tones);
    let chosen = index::sample(&mut rng, pairs, spec.components);

    let mut frequencies = Vec::with_capacity(spec.components);
    let mut amplitudes = Vec::with_capacity(spec.components);
    let mut phases = Vec::with_capacity(spec.components);
    for pair in chosen.iter() {
        let low = pair + 1;
        let k = if rng.random::<bool>() { low } else { n - low };
        let a: f64 = StandardNormal.sample(&mut rng);
        let phi = rng.random_range(0.0..2.0 * PI);
        frequencies.push(k);
        amplitudes.push(spec.amplitude_sigma * a);
        phases.push(phi);
    }

    let values = (0..n)
        .map(|t| {
            frequencies
                .iter()
                .zip(&amplitudes)
                .zip(&phases)
                .map(|((&k, &a), &phi)| {
                    // (t * k) mod N keeps the cosine argument small and exact
                    let arg = 2.0 * PI * ((t * k) % n) as f64 / n as f64 + phi;
                    a * libm::cos(arg)
                })
                .sum()
        })
        .collect();

    let mut support: Vec<usize> = frequencies.iter().flat_map(|&k| [k, n - k]).collect();
    support.sort_unstable();

    Ok(GroundTruth {
        signal: Signal::new(values)?,
        support,
        frequencies,
        amplitudes,
        phases,
    })
}

/// Uniformly random set of `missing` positions out of `len`.
pub fn random_missing_set(len: usize, missing: usize, seed: u64) -> Result<SampleSet> {
    if len < 2 {
        return Err(Error::TooShort(len));
    }
    if missing == 0 || missing >= len {
        return Err(Error::param(
            "missing",
            alloc::format!("need 1 <= Q <= N-1 = {}, got {missing}", len - 1),
        ));
    }
    let mut rng = rng_for(seed, Stream::Mask);
    SampleSet::from_missing(len, index::sample(&mut rng, len, missing))
}

/// Adds white Gaussian noise scaled so the realized SNR is exactly `snr_db`.
pub fn add_noise(signal: &Signal, snr_db: f64, seed: u64) -> Result<Signal> {
    if !snr_db.is_finite() {
        return Err(Error::param("snr_db", "must be finite"));
    }
    let energy = signal.energy();
    if energy == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let mut rng = rng_for(seed, Stream::Noise);
    let noise: Vec<f64> = (0..signal.len())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let noise_energy: f64 = noise.iter().map(|w| w * w).sum();
    let target = energy / libm::pow(10.0, snr_db / 10.0);
    let scale = libm::sqrt(target / noise_energy);
    Signal::new(
        signal
            .iter()
            .zip(&noise)
            .map(|(x, w)| x + scale * w)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;
    use crate::spectral::dft;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn single_component_has_two_equal_bins() {
        let truth = generate_multitone(&MultitoneSpec::new(32, 1, 17)).unwrap();
        let spec = dft(&truth.signal);
        let big: Vec<usize> = (0..32).filter(|&k| spec[k].norm() > 1e-9).collect();
        assert_eq!(big, truth.support);
        assert_eq!(big.len(), 2);
        assert!((spec[big[0]].norm() - spec[big[1]].norm()).abs() < 1e-12);
    }

    #[test]
    fn three_components_n128_give_six_bins() {
        let truth = generate_multitone(&MultitoneSpec::new(128, 3, 2024)).unwrap();
        assert_eq!(truth.sparsity(), 6);
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = MultitoneSpec::new(64, 5, 7);
        let a = generate_multitone(&spec).unwrap();
        let b = generate_multitone(&spec).unwrap();
        assert_eq!(a, b);
        let bits = |g: &GroundTruth| g.signal.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_eq!(random_missing_set(64, 20, 3), random_missing_set(64, 20, 3));
    }

    #[test]
    fn component_count_bounds() {
        assert!(generate_multitone(&MultitoneSpec::new(64, 0, 1)).is_err());
        assert!(generate_multitone(&MultitoneSpec::new(64, 17, 1)).is_err());
        assert!(generate_multitone(&MultitoneSpec::new(64, 16, 1)).is_ok());
    }

    #[test]
    fn missing_set_bounds() {
        assert!(random_missing_set(16, 0, 1).is_err());
        assert!(random_missing_set(16, 16, 1).is_err());
        let one_left = random_missing_set(16, 15, 1).unwrap();
        assert_eq!(one_left.available_count(), 1);
        assert_eq!(one_left.missing_count(), 15);
    }

    #[test]
    fn noise_hits_target_snr() {
        let truth = generate_multitone(&MultitoneSpec::new(64, 2, 5)).unwrap();
        let x = &truth.signal;
        for snr in [0.0, 20.0] {
            let noisy = add_noise(x, snr, 9).unwrap();
            let noise_energy: f64 = noisy
                .iter()
                .zip(x.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let realized = 10.0 * libm::log10(x.energy() / noise_energy);
            assert!((realized - snr).abs() < 1e-9, "{realized}");
        }
        let quiet = add_noise(x, 300.0, 9).unwrap();
        for (a, b) in quiet.iter().zip(x.iter()) {
            assert!((a - b).abs() <= 1e-14 * x.max_abs());
        }
        assert_eq!(
            add_noise(&Signal::zeros(8).unwrap(), 20.0, 1).unwrap_err(),
            Error::ZeroEnergy
        );
    }

    #[test]
    fn streams_are_independent() {
        let mut a = rng_for(1, Stream::Tones);
        let mut b = rng_for(1, Stream::Mask);
        assert_ne!(a.random::<u64>(), b.random::<u64>());
    }

    proptest! {
        #[test]
        fn support_is_exact_and_mirror_free(seed in any::<u64>(), k in 1usize..=16) {
            let n = 64;
            let truth = generate_multitone(&MultitoneSpec::new(n, k, seed)).unwrap();
            prop_assert_eq!(truth.support.len(), 2 * k);
            let mut dedup = truth.support.clone();
            dedup.dedup();
            prop_assert_eq!(dedup.len(), 2 * k);
            for &f in &truth.frequencies {
                prop_assert!(f != 0 && 2 * f != n);
            }
            let spec = dft(&truth.signal);
            let peak = spec.iter().fold(0.0, |m, c| f64::max(m, c.norm()));
            let mut on_support = vec![false; n];
            truth.support.iter().for_each(|&k| on_support[k] = true);
            for (bin, c) in spec.iter().enumerate() {
                if !on_support[bin] {
                    prop_assert!(c.norm() <= 1e-9 * peak);
                }
            }
        }
    }
}
