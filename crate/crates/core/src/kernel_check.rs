//! Statistical checks of the cosine sampler against its kernel.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::phase_function::ScatteringKernel;
use crate::sampling::{rotate_direction, sample_azimuth, sample_isotropic, CosineSampler, RandomStream, SamplingError};

/// Bins are merged with neighbours until each expects at least this many counts.
pub const MIN_EXPECTED_COUNT: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub merged_bins: usize,
}

/// Exact probability of each of `bins` equal-width bins on `[-1, 1]`.
pub fn bin_probabilities(kernel: &ScatteringKernel, bins: usize) -> Vec<f64> {
    let mono = kernel.normalize().expect("kernel must be normalizable").to_monomial();
    let antiderivative = |mu: f64| -> f64 {
        mono.coefficients().iter().enumerate().map(|(l, c)| c * mu.powi(l as i32 + 1) / (l + 1) as f64).sum()
    };
    let edge = |j: usize| -1.0 + 2.0 * j as f64 / bins as f64;
    (0..bins).map(|j| antiderivative(edge(j + 1)) - antiderivative(edge(j))).collect()
}

/// Pearson chi-square of `counts` against `probabilities` (scaled to the total count).
pub fn chi_square(counts: &[u64], probabilities: &[f64]) -> ChiSquareResult {
    let total: u64 = counts.iter().sum();
    let mut merged: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probabilities) {
        obs += c as f64;
        exp += p * total as f64;
        if exp >= MIN_EXPECTED_COUNT {
            merged.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if exp > 0.0 || obs > 0.0 {
        match merged.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
            }
            None => merged.push((obs, exp)),
        }
    }
    let statistic: f64 = merged.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = merged.len().saturating_sub(1).max(1);
    let p_value = ChiSquared::new(dof as f64).map(|d| d.sf(statistic)).unwrap_or(f64::NAN);
    ChiSquareResult { statistic, degrees_of_freedom: dof, p_value, merged_bins: merged.len() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerStats {
    pub draws: usize,
    pub mean_cosine: f64,
    pub chi_square: ChiSquareResult,
}

/// Draws `n` cosines from one stream; returns their mean and a binned chi-square test.
pub fn sampler_stats(kernel: &ScatteringKernel, n: usize, bins: usize, stream: &mut RandomStream) -> Result<SamplerStats, SamplingError> {
    let sampler = CosineSampler::new(kernel)?;
    let mut counts = vec![0u64; bins];
    let mut sum = 0.0;
    for _ in 0..n {
        let mu = sampler.sample(stream)?;
        sum += mu;
        let j = (((mu + 1.0) * 0.5 * bins as f64) as usize).min(bins - 1);
        counts[j] += 1;
    }
    let chi = chi_square(&counts, &bin_probabilities(kernel, bins));
    Ok(SamplerStats { draws: n, mean_cosine: sum / n as f64, chi_square: chi })
}

/// First and second direction moments after one scatter of an isotropic ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteredMoments {
    pub mean_x: f64,
    pub mean_y: f64,
    pub mean_z: f64,
    pub mean_x2: f64,
}

/// Scatters `n` isotropic directions once with `kernel`; history `i` uses stream `(seed, i)`.
pub fn scatter_isotropic_ensemble(kernel: &ScatteringKernel, n: u64, seed: u64) -> Result<ScatteredMoments, SamplingError> {
    let sampler = CosineSampler::new(kernel)?;
    let (mut sx, mut sy, mut sz, mut sxx) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let mut stream = RandomStream::new(seed, i);
        let incoming = sample_isotropic(&mut stream);
        let mu = sampler.sample(&mut stream)?;
        let phi = sample_azimuth(&mut stream);
        let d = rotate_direction(incoming, mu, phi);
        sx += d.x;
        sy += d.y;
        sz += d.z;
        sxx += d.x * d.x;
    }
    let nf = n as f64;
    Ok(ScatteredMoments { mean_x: sx / nf, mean_y: sy / nf, mean_z: sz / nf, mean_x2: sxx / nf })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::Preset;

    #[test]
    fn bin_probabilities_sum_to_one() {
        for p in Preset::ALL {
            let probs = bin_probabilities(&p.kernel(), 50);
            assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12, "{p}");
            assert!(probs.iter().all(|&q| q >= -1e-15));
        }
        let iso = bin_probabilities(&ScatteringKernel::isotropic(), 4);
        assert!(iso.iter().all(|q| (q - 0.25).abs() < 1e-15));
    }

    #[test]
    fn chi_square_of_perfect_counts_is_zero() {
        let r = chi_square(&[25, 25, 25, 25], &[0.25; 4]);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.degrees_of_freedom, 3);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sparse_bins_are_merged() {
        let r = chi_square(&[0, 1, 2, 97], &[0.001, 0.01, 0.02, 0.969]);
        assert_eq!(r.merged_bins, 1);
        let r = chi_square(&[0, 10, 90], &[0.001, 0.099, 0.9]);
        assert_eq!(r.merged_bins, 2);
    }

    #[test]
    fn grossly_wrong_counts_fail() {
        let r = chi_square(&[1000, 0, 0, 0], &[0.25; 4]);
        assert!(r.p_value < 1e-10);
    }

    #[test]
    fn small_sample_of_f1_is_consistent() {
        let mut stream = RandomStream::new(11, 0);
        let stats = sampler_stats(&Preset::F1.kernel(), 100_000, 50, &mut stream).unwrap();
        assert!((stats.mean_cosine - 1.0 / 3.0).abs() < 4.0 / (100_000f64).sqrt());
        assert!(stats.chi_square.p_value > 1e-3);
    }
}
