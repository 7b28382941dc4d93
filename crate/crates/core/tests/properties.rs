//! Property-based invariants of the building blocks: energy conservation of
//! the lossless mirror, linear coupling scaling, envelope bounds, target
//! normalization, and kernel symmetries.

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use cavsim_core::couplings::{eta, CouplingMode, CouplingSet};
use cavsim_core::mirror::{fresnel_r, layer_coefficients, CavitySpec, MirrorSpec};
use cavsim_core::observables::{cumulative_trapezoid, trapezoid};
use cavsim_core::shaping::gaussian_target;
use cavsim_core::units::DriveEnvelope;
use cavsim_core::verify::{kernel_closed_form, kernel_support};

fn test_cavity(n: f64) -> CavitySpec {
    CavitySpec::single_layer(0.0013, 1, n).unwrap()
}

proptest! {
    /// A lossless dielectric layer conserves energy: |t|² + |r|² = 1.
    #[test]
    fn layer_is_unitary(n in 1.01f64..40.0, detune in -0.4f64..0.4) {
        let cavity = test_cavity(n);
        let mirror: MirrorSpec = cavity.mirror.unwrap();
        let omega = cavity.omega_c * (1.0 + detune);
        let (t, r) = layer_coefficients(omega, &mirror);
        prop_assert!((t.norm_sqr() + r.norm_sqr() - 1.0).abs() < 1e-12);
    }

    /// The Fresnel amplitude of a physical interface stays in [0, 1).
    #[test]
    fn fresnel_amplitude_is_bounded(n in 1.0f64..1e3) {
        let r = fresnel_r(n).unwrap();
        prop_assert!((0.0..1.0).contains(&r));
    }

    /// Γ_c is defined through |r(ω_c)|, so R = e^{-2LΓ_c/c} must equal
    /// |r(ω_c)|² for any mirror.
    #[test]
    fn resonant_reflectivity_matches_mirror(n in 1.5f64..40.0) {
        let cavity = test_cavity(n);
        let (_, r) = layer_coefficients(cavity.omega_c, cavity.mirror.as_ref().unwrap());
        prop_assert!((cavity.resonant_reflectivity() - r.norm_sqr()).abs() < 1e-12);
    }

    /// The atom-continuum coupling is linear in the dipole strength g.
    #[test]
    fn coupling_scales_linearly_in_g(
        g in 0.01f64..100.0,
        scale in 0.1f64..10.0,
        detune in -0.3f64..0.3,
    ) {
        let cavity = test_cavity(27.735);
        let omega = cavity.omega_c * (1.0 + detune);
        let base = CouplingSet {
            g,
            cavity,
            x_atom: -cavity.length / 2.0,
            mode: CouplingMode::Exact,
        };
        let scaled = CouplingSet { g: scale * g, ..base };
        let a = eta(omega, &base).unwrap();
        let b = eta(omega, &scaled).unwrap();
        prop_assert!((b - a * scale).norm() <= 1e-9 * b.norm().max(1.0));
    }

    /// Drive envelopes never exceed their reported window maximum.
    #[test]
    fn envelope_respects_its_maximum(
        amplitude in -100.0f64..100.0,
        duration in 0.1f64..5.0,
        frac in 0.0f64..1.0,
        gaussian in proptest::bool::ANY,
    ) {
        let drive = if gaussian {
            DriveEnvelope::Gaussian { amplitude, duration }
        } else {
            DriveEnvelope::Sin2 { amplitude, duration }
        };
        let (t0, tf) = (-2.0 * duration, 3.0 * duration);
        let bound = drive.max_abs(t0, tf);
        let t = t0 + frac * (tf - t0);
        prop_assert!(drive.value(t).abs() <= bound + 1e-9 * bound.max(1.0));
    }

    /// The Gaussian target is a non-negative flux normalized to η.
    #[test]
    fn gaussian_target_is_normalized(eta_eff in 0.05f64..0.999, duration in 0.2f64..3.0) {
        let target = gaussian_target(duration, eta_eff);
        prop_assert!(target.flux.iter().all(|&f| f >= 0.0));
        prop_assert!((target.integral() - eta_eff).abs() < 1e-6);
    }

    /// Cumulative trapezoid agrees with the one-shot integral at the end.
    #[test]
    fn cumulative_trapezoid_is_consistent(values in proptest::collection::vec(-10.0f64..10.0, 2..200)) {
        let x: Vec<f64> = (0..values.len()).map(|i| 0.1 * i as f64).collect();
        let cumulative = cumulative_trapezoid(&x, &values);
        let total = trapezoid(&x, &values);
        prop_assert!((cumulative.last().unwrap() - total).abs() < 1e-9);
    }

    /// The response kernel is conjugate-symmetric in the delay and vanishes
    /// outside its support window.
    #[test]
    fn kernel_symmetry_and_support(s_frac in -3.0f64..3.0) {
        let cavity = test_cavity(2.5);
        let width = kernel_support(&cavity);
        let s = s_frac * width;
        let forward = kernel_closed_form(s, 0.0, &cavity).value;
        let backward = kernel_closed_form(-s, 0.0, &cavity).value;
        prop_assert!((forward - backward.conj()).norm() < 1e-12 * (forward.norm() + 1.0));
        if s.abs() >= width {
            prop_assert_eq!(forward, C64::new(0.0, 0.0));
        }
    }
}
