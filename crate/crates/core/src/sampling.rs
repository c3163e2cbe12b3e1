//! Scattering-angle sampling, direction rotation, and per-history random streams.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::phase_function::{horner, KernelError, ScatteringKernel};

/// Largest accepted `|F(mu) - u|` for an inverted cosine.
pub const CDF_TOLERANCE: f64 = 1e-12;
/// Iteration cap for the bracketed CDF inversion.
pub const MAX_CDF_ITERATIONS: usize = 60;
/// Incoming directions with `|z|` above this use the x axis as the frame reference.
pub const POLE_THRESHOLD: f64 = 1.0 - 1e-10;

const CDF_TABLE_INTERVALS: usize = 1024;
const GUIDE_CELLS: usize = 1024;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplingError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("CDF inversion did not converge for u = {u}: residual {residual:e} after {MAX_CDF_ITERATIONS} iterations")]
    ConvergenceFailure { u: f64, residual: f64 },
}

/// A reproducible stream of uniforms identified by `(seed, stream_id)`.
///
/// Backed by ChaCha8 with the stream id selecting one of 2^64 independent
/// keystreams, so a history's draws never depend on which thread runs it.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Uniform on `(0, 1]`, safe to pass to `ln`.
    #[inline]
    pub fn uniform_open_low(&mut self) -> f64 {
        1.0 - self.rng.gen::<f64>()
    }
}

/// Unit direction vector; `x` is the cosine against the slab axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Direction {
    pub const X: Direction = Direction { x: 1.0, y: 0.0, z: 0.0 };
    pub const Z: Direction = Direction { x: 0.0, y: 0.0, z: 1.0 };

    /// Normalizes `(x, y, z)`. Panics on the zero vector.
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        let norm = (x * x + y * y + z * z).sqrt();
        assert!(norm > 0.0, "direction must be non-zero");
        Self { x: x / norm, y: y / norm, z: z / norm }
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    fn cross(&self, other: &Direction) -> Direction {
        Direction {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }
}

/// Inverse-CDF sampler for a normalized, non-negative polynomial kernel.
#[derive(Debug, Clone)]
pub struct CosineSampler {
    pdf: Vec<f64>,
    cdf: Vec<f64>,
    /// `F` at the `CDF_TABLE_INTERVALS + 1` uniform nodes in `mu`.
    table: Vec<f64>,
    /// For each of `GUIDE_CELLS` equal slices of `u`, the last table interval starting at or below the slice.
    guide: Vec<u32>,
}

impl CosineSampler {
    /// Normalizes and validates `kernel`, then precomputes its CDF.
    pub fn new(kernel: &ScatteringKernel) -> Result<Self, SamplingError> {
        let pdf = kernel.prepared()?.to_monomial().coefficients().to_vec();
        // F(mu) = sum_l C_l (mu^{l+1} - (-1)^{l+1}) / (l + 1)
        let mut cdf = vec![0.0; pdf.len() + 1];
        for (l, c) in pdf.iter().enumerate() {
            let scaled = c / (l + 1) as f64;
            cdf[l + 1] = scaled;
            cdf[0] += if l % 2 == 0 { scaled } else { -scaled };
        }
        let table: Vec<f64> = (0..=CDF_TABLE_INTERVALS).map(|j| horner(&cdf, node(j))).collect();
        let guide = (0..GUIDE_CELLS)
            .map(|k| {
                let u = k as f64 / GUIDE_CELLS as f64;
                (table.partition_point(|&f| f <= u).clamp(1, CDF_TABLE_INTERVALS) - 1) as u32
            })
            .collect();
        Ok(Self { pdf, cdf, table, guide })
    }

    pub fn pdf(&self, mu: f64) -> f64 {
        horner(&self.pdf, mu)
    }

    pub fn cdf(&self, mu: f64) -> f64 {
        horner(&self.cdf, mu)
    }

    #[inline]
    pub fn sample(&self, stream: &mut RandomStream) -> Result<f64, SamplingError> {
        self.invert(stream.uniform())
    }

    /// Solves `F(mu) = u` inside a bracket taken from a tabulated CDF.
    ///
    /// Each step keeps a sign-change bracket and takes a Newton step only when
    /// it lands strictly inside it, otherwise the midpoint.
    pub fn invert(&self, u: f64) -> Result<f64, SamplingError> {
        let cell = ((u * GUIDE_CELLS as f64) as usize).min(GUIDE_CELLS - 1);
        let mut j = self.guide[cell] as usize;
        while j + 1 < CDF_TABLE_INTERVALS && self.table[j + 1] <= u {
            j += 1;
        }
        let (mut lo, mut hi) = (node(j), node(j + 1));
        let span = self.table[j + 1] - self.table[j];
        let mut mu = if span > 0.0 {
            lo + (hi - lo) * ((u - self.table[j]) / span).clamp(0.0, 1.0)
        } else {
            0.5 * (lo + hi)
        };
        let mut residual = f64::INFINITY;
        for _ in 0..MAX_CDF_ITERATIONS {
            residual = self.cdf(mu) - u;
            if residual.abs() <= CDF_TOLERANCE {
                return Ok(mu);
            }
            if residual < 0.0 {
                lo = mu;
            } else {
                hi = mu;
            }
            let slope = self.pdf(mu);
            let newton = mu - residual / slope;
            mu = if slope > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        }
        Err(SamplingError::ConvergenceFailure { u, residual })
    }
}

#[inline]
fn node(j: usize) -> f64 {
    if j == CDF_TABLE_INTERVALS {
        1.0
    } else {
        -1.0 + 2.0 * j as f64 / CDF_TABLE_INTERVALS as f64
    }
}

/// Draws a scattering cosine with density `p(mu)` from `kernel`.
pub fn sample_cosine(kernel: &ScatteringKernel, stream: &mut RandomStream) -> Result<f64, SamplingError> {
    CosineSampler::new(kernel)?.sample(stream)
}

pub fn azimuth_from_uniform(u: f64) -> f64 {
    2.0 * PI * u
}

/// Uniform azimuth on `[0, 2 pi)`.
pub fn sample_azimuth(stream: &mut RandomStream) -> f64 {
    azimuth_from_uniform(stream.uniform())
}

/// Turns `incoming` by the polar angle `acos(cos_theta)` and azimuth `phi`.
///
/// The azimuth is measured in the right-handed frame `(e1, e2, incoming)` with
/// `e1` the normalized projection of the z axis (x axis near the poles)
/// orthogonal to `incoming`.
pub fn rotate_direction(incoming: Direction, cos_theta: f64, phi: f64) -> Direction {
    let cos_theta = cos_theta.clamp(-1.0, 1.0);
    let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    let reference = if incoming.z.abs() > POLE_THRESHOLD { Direction::X } else { Direction::Z };
    let along = reference.dot(&incoming);
    let inv = 1.0 / (1.0 - along * along).sqrt();
    let e1 = Direction {
        x: (reference.x - along * incoming.x) * inv,
        y: (reference.y - along * incoming.y) * inv,
        z: (reference.z - along * incoming.z) * inv,
    };
    let e2 = incoming.cross(&e1);
    let (sin_phi, cos_phi) = phi.sin_cos();
    let a = sin_theta * cos_phi;
    let b = sin_theta * sin_phi;
    Direction::new(
        cos_theta * incoming.x + a * e1.x + b * e2.x,
        cos_theta * incoming.y + a * e1.y + b * e2.y,
        cos_theta * incoming.z + a * e1.z + b * e2.z,
    )
}

pub fn isotropic_from_uniforms(u1: f64, u2: f64) -> Direction {
    let z = 2.0 * u1 - 1.0;
    let s = (1.0 - z * z).max(0.0).sqrt();
    let (sin_phi, cos_phi) = azimuth_from_uniform(u2).sin_cos();
    Direction { x: s * cos_phi, y: s * sin_phi, z }
}

/// Uniform direction on the unit sphere.
pub fn sample_isotropic(stream: &mut RandomStream) -> Direction {
    let u1 = stream.uniform();
    let u2 = stream.uniform();
    isotropic_from_uniforms(u1, u2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::Preset;

    fn assert_dir(d: Direction, x: f64, y: f64, z: f64) {
        assert!((d.x - x).abs() < 1e-12 && (d.y - y).abs() < 1e-12 && (d.z - z).abs() < 1e-12, "{d:?} vs ({x}, {y}, {z})");
    }

    #[test]
    fn inverse_cdf_examples() {
        let iso = CosineSampler::new(&ScatteringKernel::isotropic()).unwrap();
        assert!((iso.invert(0.75).unwrap() - 0.5).abs() < 1e-12);
        let f1 = CosineSampler::new(&Preset::F1.kernel()).unwrap();
        assert!(f1.invert(0.25).unwrap().abs() < 1e-12);
        let s2 = CosineSampler::new(&Preset::S2.kernel()).unwrap();
        // F = (mu^3 + 1)/2 is flat at 0, so the residual bound leaves mu ~ 1e-4
        let mu = s2.invert(0.5).unwrap();
        assert!((s2.cdf(mu) - 0.5).abs() <= CDF_TOLERANCE);
        assert!(mu.abs() < 2e-4, "{mu}");
    }

    #[test]
    fn inverse_cdf_endpoints_and_residual() {
        for p in Preset::ALL {
            let s = CosineSampler::new(&p.kernel()).unwrap();
            assert!(s.cdf(-1.0).abs() < 1e-15, "{p}");
            assert!((s.cdf(1.0) - 1.0).abs() < 1e-14, "{p}");
            for i in 0..=1000 {
                let u = i as f64 / 1000.0;
                let mu = s.invert(u).unwrap();
                assert!((-1.0..=1.0).contains(&mu));
                assert!((s.cdf(mu) - u).abs() <= CDF_TOLERANCE, "{p} u={u}");
            }
        }
    }

    #[test]
    fn sampler_rejects_invalid_kernels() {
        let neg = ScatteringKernel::monomial(vec![0.5, 1.0]).unwrap();
        assert!(matches!(CosineSampler::new(&neg), Err(SamplingError::Kernel(KernelError::NegativeDensity { .. }))));
        let zero = ScatteringKernel::monomial(vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            CosineSampler::new(&zero),
            Err(SamplingError::Kernel(KernelError::NonPositiveNormalization(_)))
        ));
    }

    #[test]
    fn azimuth_examples() {
        assert_eq!(azimuth_from_uniform(0.0), 0.0);
        assert_eq!(azimuth_from_uniform(0.5), PI);
        assert_eq!(azimuth_from_uniform(0.25), PI / 2.0);
    }

    #[test]
    fn rotation_examples() {
        let (t, phi) = (0.3_f64, 1.1_f64);
        let s = (1.0 - t * t).sqrt();
        assert_dir(rotate_direction(Direction::Z, t, phi), s * phi.cos(), s * phi.sin(), t);
        let d = Direction::new(0.3, -0.4, 0.5);
        let r = rotate_direction(d, 1.0, 2.0);
        assert_dir(r, d.x, d.y, d.z);
        assert_dir(rotate_direction(Direction::X, -1.0, 0.7), -1.0, 0.0, 0.0);
        let down = Direction { x: 0.0, y: 0.0, z: -1.0 };
        assert!((rotate_direction(down, 0.2, 0.4).dot(&down) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn isotropic_examples() {
        assert_dir(isotropic_from_uniforms(0.5, 0.0), 1.0, 0.0, 0.0);
        assert_dir(isotropic_from_uniforms(1.0, 0.37), 0.0, 0.0, 1.0);
    }

    #[test]
    fn isotropic_ensemble_mean_z() {
        let mut stream = RandomStream::new(7, 0);
        let n = 1_000_000;
        let mean = (0..n).map(|_| sample_isotropic(&mut stream).z).sum::<f64>() / n as f64;
        assert!(mean.abs() < 3e-3, "{mean}");
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let draw = |seed, id| {
            let mut s = RandomStream::new(seed, id);
            (0..8).map(|_| s.uniform()).collect::<Vec<_>>()
        };
        assert_eq!(draw(1, 5), draw(1, 5));
        assert_ne!(draw(1, 5), draw(1, 6));
        assert_ne!(draw(1, 5), draw(2, 5));
        let mut s = RandomStream::new(3, 9);
        assert!((0..10_000).map(|_| s.uniform_open_low()).all(|u| u > 0.0 && u <= 1.0));
    }
}
