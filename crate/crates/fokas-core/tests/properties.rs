//! Randomized invariants: parity and oracle agreement on piecewise-constant
//! data, jump reflection symmetry, theta evenness and text round trips.

use proptest::prelude::*;

use fokas_core::contour::{ray_direction, theta};
use fokas_core::formats::{parse_field, parse_profile, profile_to_string, field_to_string};
use fokas_core::rhp::assemble_jump;
use fokas_core::spectral::{FnSpectral, RhpFamily};
use fokas_core::{compute_ab, oracle_ab_piecewise_constant, Axis, FieldGrid, IntegratorOptions, Profile, Report, StepData, C64};

fn cplx(range: f64) -> impl Strategy<Value = C64> {
    (-range..range, -range..range).prop_map(|(re, im)| C64::new(re, im))
}

/// One to three disjoint steps on [0, 4] with |value| < 0.3.
fn steps() -> impl Strategy<Value = StepData> {
    prop::collection::vec((0.05f64..0.95, cplx(0.2)), 1..=3).prop_map(|v| {
        let n = v.len() as f64;
        let steps = v
            .iter()
            .enumerate()
            .map(|(i, &(frac, val))| {
                let start = 4.0 * i as f64 / n;
                (start, start + 4.0 * frac / n, val)
            })
            .collect();
        StepData::new(steps, 4.0).unwrap()
    })
}

/// lambda with Im lambda^2 >= 0: first or third quadrant.
fn upper_l2() -> impl Strategy<Value = C64> {
    (0.1f64..3.0, 0.0f64..std::f64::consts::FRAC_PI_2, any::<bool>())
        .prop_map(|(r, phi, flip)| C64::from_polar(r, phi) * if flip { -1.0 } else { 1.0 })
}

fn close(p: C64, q: C64, tol: f64) -> bool {
    (p - q).norm() <= tol * q.norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn step_data_a_even_b_odd(data in steps(), l in upper_l2()) {
        let (a, b) = oracle_ab_piecewise_constant(&data, l);
        let (am, bm) = oracle_ab_piecewise_constant(&data, -l);
        prop_assert!(close(am, a, 1e-12), "a({l}) = {a}, a(-l) = {am}");
        prop_assert!(close(bm, -b, 1e-12), "b({l}) = {b}, b(-l) = {bm}");
    }

    #[test]
    fn integrator_matches_transfer_matrices(data in steps(), l in upper_l2()) {
        let got = compute_ab(&data, &[l], &IntegratorOptions::default()).unwrap()[0];
        let want = oracle_ab_piecewise_constant(&data, l);
        prop_assert!(close(got.0, want.0, 1e-7), "a: {} vs {}", got.0, want.0);
        prop_assert!(close(got.1, want.1, 1e-7), "b: {} vs {}", got.1, want.1);
    }

    #[test]
    fn x_jump_reflection_symmetry(data in steps(), r in 0.1f64..3.0, ray in 0usize..4, x in 0.0f64..3.0) {
        let src = FnSpectral {
            ab: |l: C64| oracle_ab_piecewise_constant(&data, l),
            big_ab: |_| (C64::new(1.0, 0.0), C64::default()),
            horizon: 0.0,
        };
        let l = ray_direction(3 * ray) * r;
        let j = assemble_jump(RhpFamily::X, &src, x, 0.0, l).unwrap();
        let refl = assemble_jump(RhpFamily::X, &src, x, 0.0, -l.conj()).unwrap();
        let d = (refl.adjoint() - j).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(d <= 1e-10 * j.iter().map(|z| z.norm()).fold(1.0, f64::max), "defect {d}");
    }

    #[test]
    fn theta_is_even(l in cplx(3.0), x in 0.0f64..10.0, y in 0.0f64..2.0) {
        prop_assert_eq!(theta(l, x, y), theta(-l, x, y));
    }

    #[test]
    fn profile_text_round_trip(v in prop::collection::vec(cplx(1e3), 4..40), h in 1e-4f64..1.0, y_axis in any::<bool>()) {
        let axis = if y_axis { Axis::Y } else { Axis::X };
        let p = Profile::new(axis, h, v).unwrap();
        prop_assert_eq!(parse_profile("mem", &profile_to_string(&p)).unwrap(), p);
    }

    #[test]
    fn field_text_round_trip(nx in 1usize..6, ny in 1usize..6, seed in cplx(1.0)) {
        let f = FieldGrid::from_fn(0.1, 0.01, nx, ny, |x, y| seed * (x - y * 3.0).exp() + C64::new(y, x)).unwrap();
        prop_assert_eq!(parse_field("mem", &field_to_string(&f)).unwrap(), f);
    }

    #[test]
    fn report_round_trip(vals in prop::collection::vec((any::<u16>(), -1e6f64..1e6), 0..12)) {
        let mut r = Report::new();
        for (k, v) in &vals {
            r.num(format!("k{k}.value"), *v);
        }
        prop_assert_eq!(Report::parse(&r.to_string()), r);
    }
}
