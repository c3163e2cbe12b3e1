//! Monte Carlo transport of neutral particles in a periodic 1D slab with
//! polynomial anisotropic scattering, together with the closed-form
//! diffusion-limit prediction and the tools to compare the two.
//!
//! - [`phase_function`] and [`presets`]: polynomial kernels in Legendre or monomial form.
//! - [`sampling`]: scattering-cosine sampling, direction rotation, per-history random streams.
//! - [`transport`]: the census-based history loop and cell tallies.
//! - [`theory`]: diffusion coefficient, transport mean free path, amplitude law.
//! - [`analysis`]: amplitude extraction, decay fits, diffusive-regime diagnostics.
//! - [`cli`]: experiment driver behind the `anisoscat` binary.

pub mod analysis;
pub mod cli;
pub mod kernel_check;
pub mod phase_function;
pub mod presets;
pub mod sampling;
pub mod theory;
pub mod transport;

pub use phase_function::{Basis, KernelError, ScatteringKernel};
pub use presets::Preset;
pub use sampling::{CosineSampler, Direction, RandomStream};
pub use theory::DiffusionPrediction;
pub use transport::{SimulationConfig, TallyGrid};
