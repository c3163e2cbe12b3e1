use proptest::prelude::*;

use anisoscat::analysis::{compare_to_theory, DecayFit};
use anisoscat::sampling::rotate_direction;
use anisoscat::theory::predict;
use anisoscat::{Direction, Preset, ScatteringKernel};

/// Three-term recurrence, independent of the crate's basis tables.
fn legendre_sum(coeffs: &[f64], mu: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, mu);
    let mut sum = coeffs[0];
    for (l, c) in coeffs.iter().enumerate().skip(1) {
        sum += c * p1;
        let next = ((2 * l + 1) as f64 * mu * p1 - l as f64 * p0) / (l + 1) as f64;
        p0 = p1;
        p1 = next;
    }
    sum
}

fn direction() -> impl Strategy<Value = Direction> {
    let generic = (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(z, phi)| {
        let s = (1.0 - z * z).sqrt();
        Direction::new(s * phi.cos(), s * phi.sin(), z)
    });
    let polar = (prop::bool::ANY, 0.0f64..1e-9, 0.0f64..std::f64::consts::TAU).prop_map(|(up, eps, phi)| {
        let z = if up { 1.0 } else { -1.0 };
        Direction::new(eps * phi.cos(), eps * phi.sin(), z)
    });
    prop_oneof![3 => generic, 1 => polar]
}

proptest! {
    #[test]
    fn legendre_and_monomial_forms_agree(
        coeffs in prop::collection::vec(-1.0f64..1.0, 1..=9),
        mus in prop::collection::vec(-1.0f64..=1.0, 64),
    ) {
        let kernel = ScatteringKernel::legendre(coeffs.clone()).unwrap();
        let mono = kernel.to_monomial();
        for mu in mus {
            let want = legendre_sum(&coeffs, mu);
            prop_assert!((mono.evaluate(mu).unwrap() - want).abs() <= 1e-12, "mu={mu}");
            prop_assert!((kernel.evaluate(mu).unwrap() - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn normalization_is_idempotent(coeffs in prop::collection::vec(0.0f64..1.0, 1..=9)) {
        let mut coeffs = coeffs;
        coeffs[0] += 0.5;
        let once = ScatteringKernel::monomial(coeffs).unwrap().normalize().unwrap();
        prop_assert!((once.normalization_integral() - 1.0).abs() < 1e-13);
        let twice = once.normalize().unwrap();
        prop_assert_eq!(once.coefficients(), twice.coefficients());
    }

    #[test]
    fn rotation_keeps_unit_norm_and_angle(d in direction(), cos_theta in -1.0f64..=1.0, phi in 0.0f64..std::f64::consts::TAU) {
        let out = rotate_direction(d, cos_theta, phi);
        prop_assert!((out.norm() - 1.0).abs() <= 1e-12);
        prop_assert!((out.dot(&d) - cos_theta).abs() <= 1e-12, "{:?} -> {:?}", d, out);
    }

    #[test]
    fn comparison_is_unit_invariant(
        preset_index in 0usize..12,
        sigma in 0.5f64..50.0,
        c in 0.1f64..10.0,
        scale in 0.01f64..100.0,
        ratio in 0.5f64..1.5,
    ) {
        let kernel = Preset::ALL[preset_index].kernel();
        let base = predict(&kernel, sigma, c).unwrap();
        let scaled = predict(&kernel, sigma, c * scale).unwrap();
        let fit = |rate: f64| DecayFit { rate, rate_stderr: 0.0, intercept: 0.0, window: (0.0, 1.0), n_points: 3 };
        let a = compare_to_theory(&fit(ratio * base.decay_rate()), &base, 0.03);
        let b = compare_to_theory(&fit(ratio * base.decay_rate() * scale), &scaled, 0.03);
        prop_assert!((a.relative_error - b.relative_error).abs() <= 1e-12);
    }
}

#[test]
fn rotation_norm_over_many_draws_including_poles() {
    let mut stream = anisoscat::RandomStream::new(2024, 0);
    let mut d = Direction::Z;
    for k in 0..10_000 {
        let cos_theta = 2.0 * stream.uniform() - 1.0;
        let phi = std::f64::consts::TAU * stream.uniform();
        let incoming = if k % 100 == 0 { Direction::new(0.0, 0.0, if k % 200 == 0 { 1.0 } else { -1.0 }) } else { d };
        d = rotate_direction(incoming, cos_theta, phi);
        assert!((d.norm() - 1.0).abs() <= 1e-12, "step {k}: {d:?}");
        assert!((d.dot(&incoming) - cos_theta).abs() <= 1e-12);
    }
}
