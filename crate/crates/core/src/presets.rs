//! Named kernels: the isotropic kernel, symmetric `SL`, forward `FL` and
//! backward `BL` series.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::phase_function::ScatteringKernel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown kernel preset `{0}`")]
pub struct UnknownPreset(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Isotropic,
    S2,
    S4,
    S6,
    F1,
    F3,
    F5,
    F7,
    B1,
    B3,
    B5,
    B7,
}

impl Preset {
    pub const ALL: [Preset; 12] = [
        Preset::Isotropic,
        Preset::S2,
        Preset::S4,
        Preset::S6,
        Preset::F1,
        Preset::F3,
        Preset::F5,
        Preset::F7,
        Preset::B1,
        Preset::B3,
        Preset::B5,
        Preset::B7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Isotropic => "isotropic",
            Preset::S2 => "S2",
            Preset::S4 => "S4",
            Preset::S6 => "S6",
            Preset::F1 => "F1",
            Preset::F3 => "F3",
            Preset::F5 => "F5",
            Preset::F7 => "F7",
            Preset::B1 => "B1",
            Preset::B3 => "B3",
            Preset::B5 => "B5",
            Preset::B7 => "B7",
        }
    }

    pub fn order(self) -> usize {
        match self {
            Preset::Isotropic => 0,
            Preset::F1 | Preset::B1 => 1,
            Preset::S2 => 2,
            Preset::F3 | Preset::B3 => 3,
            Preset::S4 => 4,
            Preset::F5 | Preset::B5 => 5,
            Preset::S6 => 6,
            Preset::F7 | Preset::B7 => 7,
        }
    }

    /// The kernel as tabulated, before normalization.
    ///
    /// `SL` is `(L+1)/2 mu^L`. `FL` has every Legendre coefficient equal to
    /// `1/(L+1)`; `BL` flips the sign of the odd ones.
    pub fn kernel(self) -> ScatteringKernel {
        let order = self.order();
        let built = match self {
            Preset::Isotropic => return ScatteringKernel::isotropic(),
            Preset::S2 | Preset::S4 | Preset::S6 => {
                let mut c = vec![0.0; order + 1];
                c[order] = (order + 1) as f64 / 2.0;
                ScatteringKernel::monomial(c)
            }
            Preset::F1 | Preset::F3 | Preset::F5 | Preset::F7 => {
                ScatteringKernel::legendre(vec![1.0 / (order + 1) as f64; order + 1])
            }
            Preset::B1 | Preset::B3 | Preset::B5 | Preset::B7 => {
                let c = (0..=order)
                    .map(|l| if l % 2 == 0 { 1.0 } else { -1.0 } / (order + 1) as f64)
                    .collect();
                ScatteringKernel::legendre(c)
            }
        };
        built.expect("preset coefficients are valid")
    }

    /// Tabulated mean scattering cosine.
    pub fn table_mean_cosine(self) -> f64 {
        match self {
            Preset::Isotropic | Preset::S2 | Preset::S4 | Preset::S6 => 0.0,
            Preset::F1 | Preset::F3 | Preset::F5 | Preset::F7 => 1.0 / 3.0,
            Preset::B1 | Preset::B3 | Preset::B5 | Preset::B7 => -1.0 / 3.0,
        }
    }

    /// Tabulated diffusion coefficient as `c / (k sigma)`; returns `k`.
    pub fn table_diffusion_denominator(self) -> u32 {
        match self {
            Preset::Isotropic | Preset::S2 | Preset::S4 | Preset::S6 => 3,
            Preset::F1 | Preset::F3 | Preset::F5 | Preset::F7 => 2,
            Preset::B1 | Preset::B3 | Preset::B5 | Preset::B7 => 4,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = UnknownPreset;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim();
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(key))
            .ok_or_else(|| UnknownPreset(key.to_string()))
    }
}
