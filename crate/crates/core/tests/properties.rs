//! Property tests for the structural invariants: transform round trips,
//! norm homogeneity and equivalence bands, the triangle inequality, and
//! monotonicity of the scheduler pieces.

use num_complex::Complex64;
use proptest::prelude::*;

use dduet_core::field::{Field, WavePair};
use dduet_core::globalizer::{
    bound_check, step_size, RunLog, ScheduleParams, StepRecord, SystemKind,
};
use dduet_core::grid::Grid1D;
use dduet_core::propagators::schrodinger_group;

fn complex_vec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

fn physical_field(n: usize, period: f64) -> impl Strategy<Value = Field<Grid1D>> {
    complex_vec(n).prop_map(move |data| Field::from_physical(&Grid1D::new(n, period), data))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn round_trip_is_the_identity(f in physical_field(64, 17.0)) {
        let back = f.to_spectral().to_physical();
        let scale = f.max_abs().max(1e-6);
        for (a, b) in f.data().iter().zip(back.data()) {
            prop_assert!((a - b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn norms_are_positively_homogeneous(
        f in physical_field(64, 9.0),
        re in -3.0..3.0f64,
        im in -3.0..3.0f64,
        s in -2.0..2.0f64,
    ) {
        let c = Complex64::new(re, im);
        let scaled = f.scale(c);
        let tol = 1e-12;
        prop_assert!(
            (scaled.sobolev_norm(s) - c.norm() * f.sobolev_norm(s)).abs()
                <= tol * (1.0 + f.sobolev_norm(s))
        );
        prop_assert!(
            (scaled.a_norm(s) - c.norm() * f.a_norm(s)).abs() <= tol * (1.0 + f.a_norm(s))
        );
    }

    #[test]
    fn a_norm_sits_in_the_sobolev_band(f in physical_field(64, 23.0), s in -2.0..2.0f64) {
        let a = f.a_norm(s);
        let h = f.sobolev_norm(s);
        let band = 2.0_f64.powf(s.abs() / 2.0);
        prop_assert!(a <= band * h * (1.0 + 1e-12));
        prop_assert!(a >= h / band * (1.0 - 1e-12));
        if s >= 0.0 {
            prop_assert!(a <= h * (1.0 + 1e-12));
        } else {
            prop_assert!(a >= h * (1.0 - 1e-12));
        }
    }

    #[test]
    fn w_norm_triangle_inequality(
        a_n in complex_vec(64),
        a_t in complex_vec(64),
        b_n in complex_vec(64),
        b_t in complex_vec(64),
    ) {
        let g = Grid1D::new(64, 31.0);
        let a = WavePair::new(Field::from_physical(&g, a_n), Field::from_physical(&g, a_t));
        let b = WavePair::new(Field::from_physical(&g, b_n), Field::from_physical(&g, b_t));
        prop_assert!(a.add(&b).w_norm() <= a.w_norm() + b.w_norm() + 1e-12);
        prop_assert!(a.add(&b).g_norm() <= a.g_norm() + b.g_norm() + 1e-12);
    }

    #[test]
    fn schrodinger_group_is_linear_and_isometric(
        u in physical_field(64, 11.0),
        v in physical_field(64, 11.0),
        t in -5.0..5.0f64,
    ) {
        let sum_flow = schrodinger_group(&u.add(&v), t);
        let flow_sum = schrodinger_group(&u, t).add(&schrodinger_group(&v, t));
        let scale = sum_flow.max_abs().max(1e-6);
        for (a, b) in sum_flow.to_physical().data().iter().zip(flow_sum.to_physical().data()) {
            prop_assert!((a - b).norm() <= 1e-12 * scale);
        }
        prop_assert!(
            (schrodinger_group(&u, t).l2_norm() - u.l2_norm()).abs()
                <= 1e-12 * (1.0 + u.l2_norm())
        );
    }

    #[test]
    fn step_size_is_monotone_and_capped(
        u1 in 0.0..50.0f64,
        u2 in 0.0..50.0f64,
        n1 in 0.0..50.0f64,
        n2 in 0.0..50.0f64,
    ) {
        let p = ScheduleParams { min_step: f64::MIN_POSITIVE, ..ScheduleParams::zakharov_defaults() };
        let d11 = step_size(u1, n1, &p).unwrap();
        prop_assert!(d11 <= p.c_step);
        let d21 = step_size(u1.max(u2), n1, &p).unwrap();
        prop_assert!(d21 <= d11 || u2 <= u1);
        let d12 = step_size(u1, n1.max(n2), &p).unwrap();
        prop_assert!(d12 <= d11 || n2 <= n1);
    }

    #[test]
    fn bound_check_is_monotone_under_extension(
        norms in proptest::collection::vec(0.1..20.0f64, 3..24),
        split in 2..22usize,
    ) {
        let mk = |vals: &[f64]| RunLog {
            system: SystemKind::Zakharov,
            records: vals
                .iter()
                .enumerate()
                .map(|(i, &n)| StepRecord {
                    time: 0.25 * i as f64,
                    dt: 0.25,
                    u_l2: 1.0,
                    n_norm: n,
                    mass: 1.0,
                    mass_drift: 0.0,
                    hamiltonian: None,
                    picard_iters: 1,
                    retries: 0,
                })
                .collect(),
            doubling_times: Vec::new(),
        };
        let cut = split.min(norms.len());
        let short = bound_check(&mk(&norms[..cut]), 1.0, norms[0]).unwrap();
        let long = bound_check(&mk(&norms), 1.0, norms[0]).unwrap();
        prop_assert!(long.c >= short.c - 1e-12);
    }
}
