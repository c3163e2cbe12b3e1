//! Polynomial scattering phase functions in the scattering cosine `mu`.
//!
//! A kernel is stored as coefficients in either the Legendre basis
//! `p(mu) = sum_l C_l P_l(mu)` or the monomial basis `p(mu) = sum_l C*_l mu^l`.
//! Densities are azimuthally integrated, so the isotropic kernel is `1/2` on
//! `[-1, 1]`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Highest supported polynomial order.
pub const MAX_ORDER: usize = 32;

/// Smallest density value accepted by [`ScatteringKernel::validate_positivity`].
pub const POSITIVITY_TOLERANCE: f64 = -1e-12;

/// Grid size used when a kernel is validated before sampling or transport.
pub const DEFAULT_VALIDATION_POINTS: usize = 10_001;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("kernel has no coefficients")]
    Empty,
    #[error("kernel order {0} exceeds the supported maximum of {MAX_ORDER}")]
    OrderTooHigh(usize),
    #[error("kernel coefficient {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("normalization integral {0} is not positive")]
    NonPositiveNormalization(f64),
    #[error("mu = {0} lies outside [-1, 1]")]
    Domain(f64),
    #[error("negative density: phase function p({mu}) = {value} < 0")]
    NegativeDensity { mu: f64, value: f64 },
    #[error("positivity grid needs at least 2 points, got {0}")]
    GridTooSmall(usize),
    #[error("cannot parse kernel spec: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Legendre,
    Monomial,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Legendre => f.write_str("legendre"),
            Basis::Monomial => f.write_str("monomial"),
        }
    }
}

/// A polynomial phase function `p(mu)` on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringKernel {
    basis: Basis,
    coefficients: Vec<f64>,
    normalized: bool,
}

impl ScatteringKernel {
    pub fn new(basis: Basis, coefficients: Vec<f64>) -> Result<Self, KernelError> {
        if coefficients.is_empty() {
            return Err(KernelError::Empty);
        }
        if coefficients.len() > MAX_ORDER + 1 {
            return Err(KernelError::OrderTooHigh(coefficients.len() - 1));
        }
        if let Some((index, &value)) = coefficients.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(KernelError::NonFinite { index, value });
        }
        Ok(Self { basis, coefficients, normalized: false })
    }

    pub fn legendre(coefficients: Vec<f64>) -> Result<Self, KernelError> {
        Self::new(Basis::Legendre, coefficients)
    }

    pub fn monomial(coefficients: Vec<f64>) -> Result<Self, KernelError> {
        Self::new(Basis::Monomial, coefficients)
    }

    /// The isotropic density `1/2`, already normalized.
    pub fn isotropic() -> Self {
        Self { basis: Basis::Monomial, coefficients: vec![0.5], normalized: true }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Rewrites the kernel in the monomial basis. Identity for monomial kernels.
    pub fn to_monomial(&self) -> Self {
        match self.basis {
            Basis::Monomial => self.clone(),
            Basis::Legendre => {
                let table = legendre_monomial_table(self.order());
                let mut mono = vec![0.0; self.coefficients.len()];
                for (c, row) in self.coefficients.iter().zip(&table) {
                    for (m, r) in mono.iter_mut().zip(row) {
                        *m += c * r;
                    }
                }
                Self { basis: Basis::Monomial, coefficients: mono, normalized: self.normalized }
            }
        }
    }

    /// `I0 = integral of p over [-1, 1]`, evaluated exactly from the coefficients.
    pub fn normalization_integral(&self) -> f64 {
        match self.basis {
            // only P_0 has a non-zero integral
            Basis::Legendre => 2.0 * self.coefficients[0],
            Basis::Monomial => monomial_moment(&self.coefficients, 0),
        }
    }

    /// Scales the coefficients so that `p` integrates to one.
    pub fn normalize(&self) -> Result<Self, KernelError> {
        if self.normalized {
            return Ok(self.clone());
        }
        let integral = self.normalization_integral();
        if !(integral > 0.0) {
            return Err(KernelError::NonPositiveNormalization(integral));
        }
        let coefficients = if integral == 1.0 {
            self.coefficients.clone()
        } else {
            self.coefficients.iter().map(|c| c / integral).collect()
        };
        Ok(Self { basis: self.basis, coefficients, normalized: true })
    }

    pub fn evaluate(&self, mu: f64) -> Result<f64, KernelError> {
        if !(-1.0..=1.0).contains(&mu) {
            return Err(KernelError::Domain(mu));
        }
        Ok(horner(self.to_monomial().coefficients(), mu))
    }

    /// Exact `integral of mu^k p(mu) over [-1, 1]`.
    pub fn polynomial_moment(&self, k: usize) -> f64 {
        monomial_moment(self.to_monomial().coefficients(), k)
    }

    /// Average cosine of the scattering angle, the first moment of `p`.
    pub fn mean_cosine(&self) -> f64 {
        self.polynomial_moment(1)
    }

    /// True when the density is even in `mu` (all odd monomial coefficients vanish).
    pub fn is_even(&self) -> bool {
        self.to_monomial().coefficients.iter().skip(1).step_by(2).all(|&c| c == 0.0)
    }

    /// Checks `p(mu) >= -1e-12` on a uniform grid of `grid_points` nodes.
    /// The error reports the grid minimum.
    pub fn validate_positivity(&self, grid_points: usize) -> Result<(), KernelError> {
        if grid_points < 2 {
            return Err(KernelError::GridTooSmall(grid_points));
        }
        let mono = self.to_monomial();
        let step = 2.0 / (grid_points - 1) as f64;
        let (mu, value) = (0..grid_points)
            .map(|j| {
                let mu = if j == grid_points - 1 { 1.0 } else { -1.0 + j as f64 * step };
                (mu, horner(&mono.coefficients, mu))
            })
            .fold((f64::NAN, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        if value < POSITIVITY_TOLERANCE {
            Err(KernelError::NegativeDensity { mu, value })
        } else {
            Ok(())
        }
    }

    /// Normalizes and validates the kernel for use as a sampling density.
    pub fn prepared(&self) -> Result<Self, KernelError> {
        let kernel = self.normalize()?;
        kernel.validate_positivity(DEFAULT_VALIDATION_POINTS)?;
        Ok(kernel)
    }
}

/// Monomial coefficients of `P_0 .. P_order`; row `l` holds `P_l`.
pub fn legendre_monomial_table(order: usize) -> Vec<Vec<f64>> {
    let width = order + 1;
    let mut table = vec![vec![0.0; width]; width];
    table[0][0] = 1.0;
    if order >= 1 {
        table[1][1] = 1.0;
    }
    for n in 1..order {
        // (n + 1) P_{n+1} = (2n + 1) mu P_n - n P_{n-1}
        let a = (2 * n + 1) as f64 / (n + 1) as f64;
        let b = n as f64 / (n + 1) as f64;
        for j in 0..width {
            let shifted = if j > 0 { table[n][j - 1] } else { 0.0 };
            table[n + 1][j] = a * shifted - b * table[n - 1][j];
        }
    }
    table
}

/// `P_l(mu)` by the three-term recurrence.
pub fn legendre_p(l: usize, mu: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, mu);
    if l == 0 {
        return prev;
    }
    for n in 1..l {
        let next = ((2 * n + 1) as f64 * mu * cur - n as f64 * prev) / (n + 1) as f64;
        prev = cur;
        cur = next;
    }
    cur
}

pub(crate) fn horner(coefficients: &[f64], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn monomial_moment(coefficients: &[f64], k: usize) -> f64 {
    coefficients
        .iter()
        .enumerate()
        .filter(|(l, _)| (l + k) % 2 == 0)
        .map(|(l, c)| c * 2.0 / (l + k + 1) as f64)
        .sum()
}

impl fmt::Display for ScatteringKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "basis={}; coeffs=", self.basis)?;
        for (i, c) in self.coefficients.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Parses `basis=legendre|monomial; coeffs=c0,c1,...`, ignoring case and whitespace.
impl FromStr for ScatteringKernel {
    type Err = KernelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
        let mut basis = None;
        let mut coeffs = None;
        for field in compact.split(';').filter(|f| !f.is_empty()) {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| KernelError::Parse(format!("expected key=value, found `{field}`")))?;
            match key {
                "basis" => {
                    basis = Some(match value {
                        "legendre" => Basis::Legendre,
                        "monomial" => Basis::Monomial,
                        other => return Err(KernelError::Parse(format!("unknown basis `{other}`"))),
                    })
                }
                "coeffs" => {
                    let parsed = value
                        .split(',')
                        .map(|c| c.parse::<f64>().map_err(|e| KernelError::Parse(format!("coefficient `{c}`: {e}"))))
                        .collect::<Result<Vec<_>, _>>()?;
                    coeffs = Some(parsed);
                }
                other => return Err(KernelError::Parse(format!("unknown key `{other}`"))),
            }
        }
        let basis = basis.ok_or_else(|| KernelError::Parse("missing `basis`".into()))?;
        let coeffs = coeffs.ok_or_else(|| KernelError::Parse("missing `coeffs`".into()))?;
        ScatteringKernel::new(basis, coeffs)
    }
}
