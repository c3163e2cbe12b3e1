//! High-particle-count run of the diffusive moment diagnostics at sigma = 25.
//!
//! Usage: `moment_oracle <particles> <cells> <preset>...`

use anisoscat::analysis::diffusive_diagnostics;
use anisoscat::theory::predict;
use anisoscat::transport::run_simulation;
use anisoscat::{Preset, SimulationConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args.len() < 4 {
        eprintln!("usage: moment_oracle <particles> <cells> <preset>...");
        std::process::exit(2);
    }
    let n_particles: u64 = args[1].parse().expect("particle count");
    let n_cells: usize = args[2].parse().expect("cell count");
    for name in &args[3..] {
        let preset: Preset = name.parse().expect("preset name");
        let config = SimulationConfig {
            kernel: preset.kernel(),
            sigma: 25.0,
            c: 1.0,
            n_particles,
            n_cells,
            t_end: 1.0,
            census_dt: 0.2,
            seed: 7,
        };
        let prediction = predict(&preset.kernel(), config.sigma, config.c).expect("prediction");
        for grid in run_simulation(&config).expect("simulation").iter().skip(1) {
            let d = diffusive_diagnostics(grid, &prediction);
            println!(
                "{name} t={:.1} mean J_xx/rho={:.5} rms dev={:.4} Fick L2={:.4} over {} cells",
                d.time, d.mean_jxx_ratio, d.jxx_ratio_rms_deviation, d.fick_relative_l2, d.fick_cells
            );
        }
    }
}
