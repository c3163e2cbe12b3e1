//! Closed-form diffusion-limit predictions.

use std::f64::consts::PI;

use thiserror::Error;

use crate::phase_function::{KernelError, ScatteringKernel};

/// Wavenumber of the `sin(pi x / 2)` perturbation.
pub const MODE_WAVENUMBER: f64 = PI / 2.0;
/// Mean density of the initial condition `10 + 5 sin(pi x / 2)`.
pub const BACKGROUND_DENSITY: f64 = 10.0;
/// Initial amplitude of the sine perturbation.
pub const INITIAL_AMPLITUDE: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoryError {
    #[error("mean scattering cosine {0} >= 1: no diffusion limit")]
    SingularKernel(f64),
    #[error("scattering coefficient must be positive, got {0}")]
    InvalidSigma(f64),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionPrediction {
    pub g_bar: f64,
    pub diffusion: f64,
    pub lambda_tr: f64,
    pub lambda_s: f64,
    pub c: f64,
}

impl DiffusionPrediction {
    /// Decay rate `D (pi/2)^2` of the sine mode.
    pub fn decay_rate(&self) -> f64 {
        self.diffusion * MODE_WAVENUMBER * MODE_WAVENUMBER
    }
}

fn check(sigma: f64, g_bar: f64) -> Result<(), TheoryError> {
    if !(sigma > 0.0) {
        return Err(TheoryError::InvalidSigma(sigma));
    }
    if !(g_bar < 1.0) {
        return Err(TheoryError::SingularKernel(g_bar));
    }
    Ok(())
}

/// `D = c / (3 (1 - g) sigma)`.
pub fn diffusion_coefficient(c: f64, sigma: f64, g_bar: f64) -> Result<f64, TheoryError> {
    check(sigma, g_bar)?;
    Ok(c / (3.0 * (1.0 - g_bar) * sigma))
}

/// `lambda_tr = (1 / sigma) / (1 - g)`.
pub fn transport_mfp(sigma: f64, g_bar: f64) -> Result<f64, TheoryError> {
    check(sigma, g_bar)?;
    Ok((1.0 / sigma) / (1.0 - g_bar))
}

/// `A(x, t) = 5 sin(pi x / 2) exp(-D (pi/2)^2 t)`.
pub fn amplitude(x: f64, t: f64, diffusion: f64) -> f64 {
    INITIAL_AMPLITUDE * (MODE_WAVENUMBER * x).sin() * (-diffusion * MODE_WAVENUMBER * MODE_WAVENUMBER * t).exp()
}

fn double_factorial_odd(n: i64) -> f64 {
    // n!! for odd n >= -1, with (-1)!! = 1
    let mut acc = 1.0;
    let mut k = n;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

/// `integral over the unit sphere of mu^r xi^s zeta^t`.
pub fn sphere_monomial_moment(r: u32, s: u32, t: u32) -> f64 {
    if r % 2 == 1 || s % 2 == 1 || t % 2 == 1 {
        return 0.0;
    }
    let (r, s, t) = (r as i64, s as i64, t as i64);
    4.0 * PI * double_factorial_odd(r - 1) * double_factorial_odd(s - 1) * double_factorial_odd(t - 1)
        / double_factorial_odd(r + s + t + 1)
}

pub fn predict(kernel: &ScatteringKernel, sigma: f64, c: f64) -> Result<DiffusionPrediction, TheoryError> {
    let g_bar = kernel.normalize()?.mean_cosine();
    let lambda_tr = transport_mfp(sigma, g_bar)?;
    Ok(DiffusionPrediction { g_bar, diffusion: c * lambda_tr / 3.0, lambda_tr, lambda_s: 1.0 / sigma, c })
}
