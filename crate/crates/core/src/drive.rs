//! Phase modulation of one lattice beam and the homogeneous inertial force it
//! produces in the frame where the lattice is static.

use crate::units::{DriveParams, K};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceSample {
    pub t: f64,
    pub f: f64,
}

/// α(t) = α0 [A cos ωt + (B/4) cos(2ωt − φ)].
pub fn alpha(t: f64, d: &DriveParams) -> f64 {
    let wt = d.omega * t;
    d.alpha0 * (d.a_amp * wt.cos() + 0.25 * d.b_amp * (2.0 * wt - d.canonical_phi()).cos())
}

/// Prefactor M ω² α0 / 2k of the inertial force.
pub fn force_scale(d: &DriveParams, mass: f64) -> f64 {
    mass * d.omega * d.omega * d.alpha0 / (2.0 * K)
}

/// Inertial force −(M/2k) α̈(t) in closed form:
/// (M ω² α0 / 2k) [A cos ωt + B cos(2ωt − φ)].
pub fn inertial_force(t: f64, d: &DriveParams, mass: f64) -> f64 {
    let wt = d.omega * t;
    force_scale(d, mass) * (d.a_amp * wt.cos() + d.b_amp * (2.0 * wt - d.canonical_phi()).cos())
}

/// Offset α(t)/2k between the laboratory and the accelerated frame.
pub fn frame_displacement(t: f64, d: &DriveParams) -> f64 {
    alpha(t, d) / (2.0 * K)
}

/// Shortest period of the force: T = 2π/ω, or T/2 when only the second
/// harmonic is present.
pub fn fundamental_period(d: &DriveParams) -> f64 {
    if d.a_amp == 0.0 && d.b_amp != 0.0 {
        0.5 * d.period()
    } else {
        d.period()
    }
}

/// Whether F(t + T/2) = −F(t) with T the fundamental period. Holds exactly
/// when one of the two harmonics is absent.
pub fn shift_symmetry_holds(d: &DriveParams) -> bool {
    d.a_amp * d.b_amp * d.alpha0 == 0.0
}

/// Whether F(−t) = F(t). Holds when φ = nπ or the second harmonic is absent.
pub fn time_reversal_symmetry_holds(d: &DriveParams) -> bool {
    d.canonical_phi().sin().abs() <= 1e-12 || d.b_amp * d.alpha0 == 0.0
}

/// `n` equally spaced force samples over one drive period.
pub fn sample_period(d: &DriveParams, mass: f64, n: usize) -> Vec<ForceSample> {
    let period = d.period();
    (0..n)
        .map(|i| {
            let t = period * i as f64 / n as f64;
            ForceSample {
                t,
                f: inertial_force(t, d, mass),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::MASS;
    use std::f64::consts::{PI, TAU};

    fn drive(a: f64, b: f64, phi: f64, alpha0: f64) -> DriveParams {
        DriveParams {
            alpha0,
            a_amp: a,
            b_amp: b,
            omega: 24.6,
            phi,
        }
    }

    #[test]
    fn alpha_values() {
        let d = drive(0.75, 1.0, 0.0, 10.0);
        assert!((alpha(0.0, &d) - 10.0).abs() < 1e-12);
        let d0 = drive(0.75, 1.0, 1.3, 0.0);
        for i in 0..50 {
            assert_eq!(alpha(0.1 * i as f64, &d0), 0.0);
        }
        let d = drive(1.0, 0.0, 2.2, 3.0);
        assert!((alpha(d.period() / 2.0, &d) + 3.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_is_periodic() {
        let d = drive(0.5, 0.5, 0.7, 8.0);
        for i in 0..100 {
            let t = 0.013 * i as f64;
            assert!((alpha(t + d.period(), &d) - alpha(t, &d)).abs() < 1e-9);
        }
    }

    #[test]
    fn closed_form_matches_second_derivative_of_alpha() {
        let d = drive(0.5, 0.5, 1.1, 8.0);
        let period = d.period();
        let h = period * 1e-4;
        let scale = force_scale(&d, MASS);
        for i in 0..200 {
            let t = period * i as f64 / 200.0;
            let acc = (alpha(t + h, &d) - 2.0 * alpha(t, &d) + alpha(t - h, &d)) / (h * h);
            let fd = -MASS / (2.0 * K) * acc;
            let f = inertial_force(t, &d, MASS);
            assert!((f - fd).abs() / scale < 1e-6, "t={t} f={f} fd={fd}");
        }
    }

    #[test]
    fn force_averages_to_zero_over_a_period() {
        let d = drive(0.75, 1.0, 0.4, 10.0);
        // rectangle rule is exact for trigonometric polynomials of low degree
        let n = 64;
        let mean: f64 = sample_period(&d, MASS, n).iter().map(|s| s.f).sum::<f64>() / n as f64;
        assert!(mean.abs() / force_scale(&d, MASS) < 1e-12);
    }

    #[test]
    fn force_at_origin() {
        let d = drive(0.75, 1.0, 0.4, 10.0);
        let expected = force_scale(&d, MASS) * (0.75 + 0.4f64.cos());
        assert!((inertial_force(0.0, &d, MASS) - expected).abs() < 1e-7 * force_scale(&d, MASS));
    }

    #[test]
    fn shift_predicate() {
        assert!(shift_symmetry_holds(&drive(1.0, 0.0, 0.3, 8.0)));
        assert!(!shift_symmetry_holds(&drive(0.75, 1.0, 0.3, 10.0)));
        assert!(shift_symmetry_holds(&drive(0.75, 1.0, 0.3, 0.0)));
    }

    #[test]
    fn reversal_predicate() {
        assert!(time_reversal_symmetry_holds(&drive(0.5, 0.5, 0.0, 8.0)));
        assert!(!time_reversal_symmetry_holds(&drive(
            0.5,
            0.5,
            PI / 2.0,
            8.0
        )));
        assert!(time_reversal_symmetry_holds(&drive(0.5, 0.5, PI, 8.0)));
        assert!(time_reversal_symmetry_holds(&drive(
            0.5,
            0.5,
            -3.0 * PI,
            8.0
        )));
        assert!(time_reversal_symmetry_holds(&drive(0.5, 0.0, 1.0, 8.0)));
    }

    #[test]
    fn frame_displacement_values() {
        let d = drive(0.75, 1.0, 0.0, 10.0);
        assert!((frame_displacement(0.0, &d) - 5.0).abs() < 1e-12);
        let off = drive(0.75, 1.0, 0.0, 0.0);
        assert_eq!(frame_displacement(0.37, &off), 0.0);
        let n = 64;
        let mean: f64 = (0..n)
            .map(|i| frame_displacement(d.period() * i as f64 / n as f64, &d))
            .sum::<f64>()
            / n as f64;
        assert!(mean.abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn monochromatic_force_is_shift_antisymmetric(a in 0.0f64..2.0, phi in -10.0f64..10.0, t in -5.0f64..5.0) {
                let d = drive(a, 0.0, phi, 8.0);
                let half = d.period() / 2.0;
                let sum = inertial_force(t + half, &d, MASS) + inertial_force(t, &d, MASS);
                prop_assert!(sum.abs() <= 1e-9 * force_scale(&d, MASS).max(1.0));
            }

            #[test]
            fn zero_phase_force_is_even(a in 0.0f64..2.0, b in 0.0f64..2.0, t in -5.0f64..5.0) {
                let d = drive(a, b, 0.0, 8.0);
                prop_assert_eq!(inertial_force(-t, &d, MASS), inertial_force(t, &d, MASS));
            }

            #[test]
            fn force_is_periodic(a in 0.0f64..2.0, b in 0.0f64..2.0, phi in -10.0f64..10.0, t in -5.0f64..5.0) {
                let d = drive(a, b, phi, 8.0);
                let diff = inertial_force(t + d.period(), &d, MASS) - inertial_force(t, &d, MASS);
                prop_assert!(diff.abs() <= 1e-9 * force_scale(&d, MASS));
            }

            #[test]
            fn full_turn_in_phase_is_bit_identical(phi in 0.0f64..TAU, n in -3i32..4, t in -5.0f64..5.0) {
                let d = drive(0.5, 0.5, phi, 8.0);
                let shifted = drive(0.5, 0.5, phi + n as f64 * TAU, 8.0);
                prop_assert_eq!(inertial_force(t, &d, MASS).to_bits(), inertial_force(t, &shifted, MASS).to_bits());
                prop_assert_eq!(alpha(t, &d).to_bits(), alpha(t, &shifted).to_bits());
            }
        }
    }
}
