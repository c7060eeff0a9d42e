use std::f64::consts::{PI, TAU};

use axial_fisher::beam::{field_and_derivative, StateProfile};
use axial_fisher::classical::refine_at_zeta;
use axial_fisher::oscillator::{generator_variance, hl_expand, required_cutoff};
use axial_fisher::quantum::qfi_oracle;
use axial_fisher::{FisherComponents, HLIndex, LGIndex, ModeSuperposition, QuadratureConfig};
use num_complex::Complex64;
use proptest::prelude::*;

fn index() -> impl Strategy<Value = LGIndex> {
    (0u32..=1, -3i32..=3).prop_map(|(p, l)| LGIndex::new(p, l))
}

/// Two or three distinct low-order modes with random complex weights.
fn superposition() -> impl Strategy<Value = ModeSuperposition> {
    prop::collection::vec((index(), 0.2f64..1.0, 0.0f64..TAU), 2..=3).prop_filter_map(
        "modes must be distinct",
        |terms| {
            let mut seen = Vec::new();
            for (idx, _, _) in &terms {
                if seen.contains(idx) {
                    return None;
                }
                seen.push(*idx);
            }
            let terms = terms
                .into_iter()
                .map(|(i, a, ph)| (i, Complex64::from_polar(a, ph)))
                .collect();
            ModeSuperposition::normalized(terms).ok()
        },
    )
}

fn components(state: &ModeSuperposition, zeta: f64) -> FisherComponents {
    let r = refine_at_zeta(state, zeta, &QuadratureConfig::default()).unwrap();
    assert!(r.converged, "no convergence for {state} at ζ = {zeta}");
    *r.last()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-12)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn information_inequalities(state in superposition(), zeta in -2.5f64..2.5) {
        let tol = QuadratureConfig::default().refine_tolerance;
        let c = components(&state, zeta);
        let q = qfi_oracle(&state).unwrap().value;
        prop_assert!(c.total <= q * (1.0 + 2.0 * tol), "F = {} > Q = {q}", c.total);
        prop_assert!(c.radial >= 0.0 && c.radial <= c.total);
        prop_assert!(c.azimuthal >= 0.0 && c.azimuthal <= c.total);
        prop_assert!(c.total - (c.radial + c.azimuthal) >= -2.0 * tol * c.total,
            "F = {}, Fr + Fφ = {}", c.total, c.radial + c.azimuthal);
        prop_assert!((c.norm - 1.0).abs() < 1e-9, "norm {}", c.norm);
    }

    #[test]
    fn rotating_the_pattern_changes_nothing(state in superposition(), zeta in 0.05f64..2.5, alpha in 0.0f64..TAU) {
        // ψ(ρ, φ − α): each term picks up e^{ilα}
        let rotated = ModeSuperposition::new(
            state.terms().iter().map(|&(i, c)| (i, c * Complex64::from_polar(1.0, f64::from(i.l) * alpha))).collect(),
        ).unwrap();
        let (a, b) = (components(&state, zeta), components(&rotated, zeta));
        prop_assert!(close(a.total, b.total, 1e-7), "{} vs {}", a.total, b.total);
        prop_assert!(close(a.radial, b.radial, 1e-7));
        prop_assert!(close(a.azimuthal, b.azimuthal, 1e-6) || a.azimuthal.max(b.azimuthal) < 1e-9 * a.total);
    }

    #[test]
    fn flipping_z_conjugates_the_weights(state in superposition(), zeta in 0.05f64..2.5) {
        // A(ρ, −ζ) = conj A(ρ, ζ) per mode, so only real weights give an even curve
        let conjugated = ModeSuperposition::new(state.terms().iter().map(|&(i, c)| (i, c.conj())).collect()).unwrap();
        let (a, b) = (components(&state, -zeta), components(&conjugated, zeta));
        prop_assert!(close(a.total, b.total, 1e-7), "{} vs {}", a.total, b.total);
        prop_assert!(close(a.radial, b.radial, 1e-7));
        let real = ModeSuperposition::normalized(state.terms().iter().map(|&(i, c)| (i, Complex64::new(c.norm(), 0.0))).collect()).unwrap();
        let (a, b) = (components(&real, zeta), components(&real, -zeta));
        prop_assert!(close(a.total, b.total, 1e-7), "{} vs {}", a.total, b.total);
    }

    #[test]
    fn global_phase_is_invisible(state in superposition(), zeta in 0.05f64..2.5, phase in 0.0f64..TAU) {
        let shifted = state.with_global_phase(phase);
        prop_assert!(close(components(&state, zeta).total, components(&shifted, zeta).total, 1e-9));
        let cut = required_cutoff(&state);
        prop_assert!(close(generator_variance(&state, cut).unwrap(), generator_variance(&shifted, cut).unwrap(), 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn pure_intensity_has_no_azimuthal_structure(p in 0u32..4, l in -6i32..=6, rho in 0.0f64..4.0, zeta in -3.0f64..3.0) {
        let profile = StateProfile::new(&ModeSuperposition::pure(LGIndex::new(p, l)), zeta);
        let reference = profile.intensity(rho, 0.0);
        for k in 1..64 {
            let phi = TAU * f64::from(k) / 64.0;
            prop_assert!((profile.intensity(rho, phi) - reference).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_matches_central_difference(state in superposition(), rho in 0.1f64..3.0, phi in 0.0f64..TAU, zeta in -2.0f64..2.0) {
        let h = 1e-5;
        let (psi, d) = field_and_derivative(&state, rho, phi, zeta);
        let fd = (field_and_derivative(&state, rho, phi, zeta + h).0 - field_and_derivative(&state, rho, phi, zeta - h).0) / (2.0 * h);
        let peak = 1.0;
        if psi.norm() > 1e-3 {
            prop_assert!((d - fd).norm() <= 1e-6 * d.norm().max(1e-3), "{d} vs {fd}");
        } else {
            prop_assert!((d - fd).norm() <= 1e-8 * peak, "{d} vs {fd}");
        }
    }

    #[test]
    fn hl_variance_ignores_sphere_longitude(n1 in 0u32..=3, n2 in 0u32..=3, theta in 0.0f64..PI, phi in 0.0f64..TAU) {
        let at = |phi: f64| {
            let s = hl_expand(&HLIndex::new(n1, n2, theta, phi));
            generator_variance(&s, required_cutoff(&s)).unwrap()
        };
        prop_assert!(close(at(0.0), at(phi), 1e-12));
    }

    #[test]
    fn extra_cutoff_is_exact(p in 0u32..4, l in -4i32..=4, extra in 1usize..4) {
        let s = ModeSuperposition::equal(&[LGIndex::new(p, l), LGIndex::new(p + 1, l)]).unwrap();
        let cut = required_cutoff(&s);
        prop_assert!(close(generator_variance(&s, cut).unwrap(), generator_variance(&s, cut + extra).unwrap(), 1e-14));
    }
}
