//! The lin⊥lin bipotential seen by the two ground sublevels, its forces and
//! the position-dependent optical-pumping rates between the sublevels.
//!
//! All functions take the phase coordinate ξ = 2kz (in the accelerated frame,
//! where the potential is static).

use crate::units::{LatticeParams, K};

/// Ground sublevel |g, m = ±1/2⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InternalState {
    Plus,
    Minus,
}

impl InternalState {
    pub fn toggle(self) -> Self {
        match self {
            InternalState::Plus => InternalState::Minus,
            InternalState::Minus => InternalState::Plus,
        }
    }

    /// +1 for `Plus`, −1 for `Minus`.
    pub fn sign(self) -> f64 {
        match self {
            InternalState::Plus => 1.0,
            InternalState::Minus => -1.0,
        }
    }
}

/// U±(ξ) = U0 (−2 ± cos ξ).
pub fn potential(lattice: &LatticeParams, xi: f64, s: InternalState) -> f64 {
    lattice.u0 * (-2.0 + s.sign() * xi.cos())
}

/// Conservative force −∂U/∂z = −2k ∂U/∂ξ.
pub fn lattice_force(lattice: &LatticeParams, xi: f64, s: InternalState) -> f64 {
    2.0 * K * lattice.u0 * s.sign() * xi.sin()
}

/// Rate of leaving sublevel `s`: γ0 cos²(ξ/2) from Plus, γ0 sin²(ξ/2) from
/// Minus. Each rate vanishes at the bottom of the state's own wells.
pub fn pumping_rate(lattice: &LatticeParams, xi: f64, s: InternalState) -> f64 {
    // cos²(ξ/2) = (1 + cos ξ)/2
    lattice.gamma0 * 0.5 * (1.0 + s.sign() * xi.cos())
}

/// Position of the bottom of the `s` well nearest the origin (units 1/k).
pub fn well_bottom(s: InternalState) -> f64 {
    match s {
        InternalState::Plus => std::f64::consts::FRAC_PI_2 / K,
        InternalState::Minus => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use InternalState::{Minus, Plus};

    const L: LatticeParams = LatticeParams {
        u0: 100.0,
        gamma0: 6.0,
        recoil_kick: true,
    };

    #[test]
    fn toggle_is_involution() {
        for s in [Plus, Minus] {
            assert_ne!(s.toggle(), s);
            assert_eq!(s.toggle().toggle(), s);
        }
    }

    #[test]
    fn potential_values() {
        assert_eq!(potential(&L, 0.0, Plus), -L.u0);
        assert!((potential(&L, PI, Plus) + 3.0 * L.u0).abs() < 1e-12);
        assert_eq!(
            potential(&L, 0.7, Plus) + potential(&L, 0.7, Minus),
            -4.0 * L.u0
        );
    }

    #[test]
    fn force_values() {
        for s in [Plus, Minus] {
            assert_eq!(lattice_force(&L, 0.0, s), 0.0);
        }
        assert!((lattice_force(&L, PI / 2.0, Plus) - 2.0 * L.u0).abs() < 1e-12);
    }

    #[test]
    fn force_matches_finite_difference() {
        // dU/dz with ξ = 2z, central difference in z
        let h = 1e-5;
        for i in 0..200 {
            let z = -3.0 + 0.031 * i as f64;
            for s in [Plus, Minus] {
                let fd = -(potential(&L, 2.0 * (z + h), s) - potential(&L, 2.0 * (z - h), s))
                    / (2.0 * h);
                let f = lattice_force(&L, 2.0 * z, s);
                assert!((f - fd).abs() / (2.0 * L.u0) < 1e-8, "z={z} f={f} fd={fd}");
            }
        }
    }

    #[test]
    fn rate_values() {
        assert!(pumping_rate(&L, PI, Plus).abs() < 1e-15);
        assert_eq!(pumping_rate(&L, 0.0, Plus), L.gamma0);
        assert_eq!(pumping_rate(&L, 0.0, Minus), 0.0);
        for i in 0..100 {
            let xi = -7.0 + 0.17 * i as f64;
            let total = pumping_rate(&L, xi, Plus) + pumping_rate(&L, xi, Minus);
            assert!((total - L.gamma0).abs() < 1e-12);
        }
    }

    #[test]
    fn undriven_atom_at_well_bottom_never_jumps() {
        for s in [Plus, Minus] {
            let xi = 2.0 * K * well_bottom(s);
            assert!(pumping_rate(&L, xi, s) < 1e-15);
            assert!(lattice_force(&L, xi, s).abs() < 1e-12);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn state() -> impl Strategy<Value = InternalState> {
            prop_oneof![Just(Plus), Just(Minus)]
        }

        proptest! {
            #[test]
            fn spatially_symmetric(xi in -50.0f64..50.0, s in state()) {
                prop_assert_eq!(potential(&L, -xi, s), potential(&L, xi, s));
                prop_assert_eq!(pumping_rate(&L, -xi, s), pumping_rate(&L, xi, s));
            }

            #[test]
            fn periodic(xi in -50.0f64..50.0, s in state()) {
                prop_assert!((potential(&L, xi + 2.0 * PI, s) - potential(&L, xi, s)).abs() < 1e-9);
                prop_assert!((pumping_rate(&L, xi + 2.0 * PI, s) - pumping_rate(&L, xi, s)).abs() < 1e-9);
            }

            #[test]
            fn states_exchange_under_half_period_shift(xi in -50.0f64..50.0) {
                prop_assert!((potential(&L, xi + PI, Plus) - potential(&L, xi, Minus)).abs() < 1e-9);
                prop_assert!((pumping_rate(&L, xi + PI, Plus) - pumping_rate(&L, xi, Minus)).abs() < 1e-9);
            }

            #[test]
            fn rates_bounded(xi in -50.0f64..50.0, s in state()) {
                let r = pumping_rate(&L, xi, s);
                prop_assert!((0.0..=L.gamma0).contains(&r));
            }

            #[test]
            fn sisyphus_condition(xi in -50.0f64..50.0, s in state()) {
                // the rate is an increasing affine function of the potential
                let u = potential(&L, xi, s);
                let r = pumping_rate(&L, xi, s);
                let expected = L.gamma0 * (u + 3.0 * L.u0) / (2.0 * L.u0);
                prop_assert!((r - expected).abs() < 1e-9);
            }
        }
    }
}
