//! Public-API cross checks against closed forms.

use axial_fisher::classical::{cfi_pure_closed, cfi_pure_from_laguerre_integrals, cfi_total};
use axial_fisher::oscillator::{generator_variance, hl_expand, required_cutoff};
use axial_fisher::quantum::{qfi_oracle, qfi_pure, qfi_two_mode_printed};
use axial_fisher::{BeamGeometry, HLIndex, LGIndex, ModeSuperposition, QuadratureConfig};

#[test]
fn pure_mode_qfi() {
    for p in 0..=4 {
        for l in -6..=6 {
            let idx = LGIndex::new(p, l);
            let expected = f64::from(2 * p * (p + idx.abs_l()) + 2 * p + idx.abs_l() + 1);
            let oracle = qfi_oracle(&ModeSuperposition::pure(idx)).unwrap().value;
            assert!(
                (oracle - expected).abs() <= 1e-12 * expected,
                "{idx}: {oracle}"
            );
            assert_eq!(qfi_pure(idx).value, expected);
        }
    }
}

#[test]
fn qfi_scales_with_rayleigh_range() {
    let g = BeamGeometry::from_wavelength(2e-6, 633e-9).unwrap();
    let q = qfi_pure(LGIndex::new(1, 2));
    let z_r = g.rayleigh_range();
    assert!((q.physical(&g) - q.value / (z_r * z_r)).abs() <= 1e-12 * q.physical(&g));
}

#[test]
fn pure_mode_cfi_three_ways() {
    let g = BeamGeometry::unit();
    let cfg = QuadratureConfig::default();
    for idx in [LGIndex::new(0, 0), LGIndex::new(0, 3), LGIndex::new(2, -1)] {
        for z in [0.25, 1.0, 2.0] {
            let closed = cfi_pure_closed(idx, &g, z);
            let integrals = cfi_pure_from_laguerre_integrals(idx, &g, z);
            let quad = cfi_total(&ModeSuperposition::pure(idx), &g, z, &cfg).unwrap();
            assert!((integrals - closed).abs() <= 1e-10 * closed, "{idx} z={z}");
            assert!(
                (quad - closed).abs() <= 1e-6 * closed,
                "{idx} z={z}: {quad} vs {closed}"
            );
        }
    }
}

#[test]
fn intensity_reaches_the_quantum_bound_at_the_rayleigh_plane() {
    let g = BeamGeometry::unit();
    for idx in [LGIndex::new(0, 1), LGIndex::new(1, 1), LGIndex::new(2, 0)] {
        let f = cfi_total(
            &ModeSuperposition::pure(idx),
            &g,
            1.0,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!((f / qfi_pure(idx).value - 1.0).abs() < 1e-6);
    }
}

#[test]
fn printed_two_mode_formula_is_four_times_the_oracle() {
    for (l, lp) in [(1, 0), (2, 0), (3, 1), (-2, 4)] {
        let s = ModeSuperposition::equal(&[LGIndex::new(0, l), LGIndex::new(0, lp)]).unwrap();
        let ratio = qfi_two_mode_printed(l, lp).unwrap().value / qfi_oracle(&s).unwrap().value;
        assert!((ratio - 4.0).abs() < 1e-12, "({l},{lp}): {ratio}");
    }
}

#[test]
fn hl_poles_and_equator() {
    // poles are LG modes; the equator is a Hermite-Gauss mode
    for (n1, n2) in [(1, 0), (2, 1), (3, 1)] {
        let pole = hl_expand(&HLIndex::new(n1, n2, 0.0, 0.0));
        let v = generator_variance(&pole, required_cutoff(&pole)).unwrap();
        let (n1f, n2f) = (f64::from(n1), f64::from(n2));
        assert!((v - (2.0 * n1f * n2f + n1f + n2f + 1.0)).abs() < 1e-12);
        let equator = hl_expand(&HLIndex::new(n1, n2, std::f64::consts::FRAC_PI_2, 0.0));
        let v = generator_variance(&equator, required_cutoff(&equator)).unwrap();
        let expected = 0.5 * ((n1f * n1f + n1f + 1.0) + (n2f * n2f + n2f + 1.0));
        assert!(
            (v - expected).abs() < 1e-12,
            "({n1},{n2}): {v} vs {expected}"
        );
    }
}
