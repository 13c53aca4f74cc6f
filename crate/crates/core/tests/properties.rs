//! Property tests for the grid/field layer and the nodewise null-field
//! identities.

use std::sync::Arc;

use critwave_core::field::{h_norm_sq, quadrature, Formulation, RadialField, RadialState};
use critwave_core::grid::RadialGrid;
use critwave_core::evolution::Mode;
use critwave_core::lightcone::null_fields;
use proptest::prelude::*;

fn grid() -> Arc<RadialGrid> {
    RadialGrid::uniform(10.0, 400).unwrap()
}

fn smooth_field(a: f64, c: f64, w: f64) -> RadialField {
    RadialField::from_fn(grid(), Formulation::U, move |r| {
        a * critwave_core::corpus::bump(r, c, w)
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadrature_is_additive_over_adjacent_bands(
        a in -2.0..2.0f64,
        c in 2.0..7.0f64,
        w in 0.5..2.0f64,
        split in 0.1..0.9f64,
    ) {
        let f = smooth_field(a, c, w);
        let mid = split * 10.0;
        let whole = quadrature(&f, 3, 0.0, 10.0).unwrap();
        let left = quadrature(&f, 3, 0.0, mid).unwrap();
        let right = quadrature(&f, 3, mid, 10.0).unwrap();
        prop_assert!((whole - left - right).abs() < 1e-9 * (1.0 + whole.abs()));
    }

    #[test]
    fn interpolation_is_exact_at_nodes(
        a in -2.0..2.0f64,
        c in 2.0..7.0f64,
        w in 0.5..2.0f64,
        idx in 0usize..400,
    ) {
        let f = smooth_field(a, c, w);
        let r = f.grid().nodes()[idx];
        prop_assert_eq!(f.interpolate(r).unwrap(), f.values()[idx]);
    }

    #[test]
    fn h_norm_is_monotone_in_the_band(
        a in 0.5..2.0f64,
        c in 2.0..6.0f64,
        w in 0.5..2.0f64,
        hi in 0.2..1.0f64,
    ) {
        let s = RadialState::new(
            smooth_field(a, c, w),
            smooth_field(0.3 * a, c, w),
            0.0,
        ).unwrap();
        let part = h_norm_sq(&s, 0.0, hi * 10.0).unwrap();
        let full = h_norm_sq(&s, 0.0, 10.0).unwrap();
        prop_assert!(part <= full + 1e-12);
        prop_assert!(part >= 0.0);
    }

    #[test]
    fn a_sq_minus_b_sq_is_2rm_nodewise(
        a in -1.0..1.0f64,
        b in -1.0..1.0f64,
        c in 2.0..7.0f64,
    ) {
        let g = grid();
        let pos = RadialField::from_fn(g.clone(), Formulation::Psi, |r| {
            a * critwave_core::corpus::bump(r, c, 2.0) * r / (1.0 + r)
        }).unwrap();
        let vel = RadialField::from_fn(g.clone(), Formulation::Psi, |r| {
            b * critwave_core::corpus::bump(r, c + 0.5, 1.5) * r / (1.0 + r)
        }).unwrap();
        let s = RadialState::new(pos, vel, 0.3).unwrap();
        let nf = null_fields(&s, Mode::Cubic).unwrap();
        for j in 0..nf.r.len() {
            let lhs = nf.a_sq[j] - nf.b_sq[j];
            let rhs = 2.0 * nf.r[j] * nf.m[j];
            prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs().max(rhs.abs())));
        }
    }

    #[test]
    fn scale_estimator_is_sign_blind(
        amp in 0.5..2.0f64,
        c in 2.0..6.0f64,
    ) {
        use critwave_core::decomposition::scale_estimator;
        let g = grid();
        let mk = |sign: f64| {
            RadialState::new(
                RadialField::from_fn(g.clone(), Formulation::U, |r| {
                    sign * amp * critwave_core::corpus::bump(r, c, 2.0)
                }).unwrap(),
                RadialField::zeros(g.clone(), Formulation::U),
                0.0,
            ).unwrap()
        };
        let plus = scale_estimator(&mk(1.0)).unwrap();
        let minus = scale_estimator(&mk(-1.0)).unwrap();
        prop_assert_eq!(plus, minus);
    }
}
