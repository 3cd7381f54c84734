use std::f64::consts::TAU;

use proptest::prelude::*;
use slag_core::calibration::{imomega_residual, omega_residual, tangent_frame, BasePartials};
use slag_core::embedding::{lift_point, moment_residual};
use slag_core::export::{fields_from_csv, fields_to_csv};
use slag_core::families::{affine_uv, hl_f, hl_solve_alpha, hl_triple, AffineSolution, HlConfig};
use slag_core::winding::{circle_trace, multiplicity_at_zero, winding_number};
use slag_core::{Complex, Error, Field, Grid, Params};

fn nonsingular(max_len: usize) -> impl Strategy<Value = Params> {
    prop::collection::vec(-2.0f64..3.0, 2..=max_len)
        .prop_map(|a| Params::new(a).unwrap())
        .prop_filter("unique minimum", |p| p.is_nonsingular())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn branch_solves_and_is_monotone(p in nonsingular(5), s1 in 0.0f64..1e4, s2 in 0.0f64..1e4) {
        let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
        let b1 = p.solve_branch(lo).unwrap();
        let b2 = p.solve_branch(hi).unwrap();
        prop_assert!((p.eval_p(b1.w) - lo).abs() <= 1e-12 * (1.0 + lo));
        prop_assert!(b1.w >= p.w0() && b1.w <= b2.w);
        prop_assert!(p.coefficient_f(lo).unwrap() <= p.coefficient_f(hi).unwrap() * (1.0 + 1e-14));
        prop_assert_eq!(p.solve_branch(0.0).unwrap().w, p.w0());
    }

    #[test]
    fn branch_sensitivity_matches_finite_differences(p in nonsingular(5), s in 0.01f64..1e3) {
        let state = p.solve_branch(s).unwrap();
        prop_assume!(state.p_prime_at_w >= 1e-8);
        let h = 1e-6 * (1.0 + s);
        let fd = (p.solve_branch(s + h).unwrap().w - p.solve_branch(s - h).unwrap().w) / (2.0 * h);
        let an = p.branch_sensitivity(&state).unwrap();
        prop_assert!((an - fd).abs() <= 1e-6 * an.abs());
    }

    #[test]
    fn p_prime_is_the_derivative(p in nonsingular(5), w in -3.0f64..3.0) {
        let h = 1e-5;
        let fd = (p.eval_p(w + h) - p.eval_p(w - h)) / (2.0 * h);
        let an = p.eval_p_prime(w);
        prop_assert!((an - fd).abs() <= 1e-7 * an.abs().max(1.0));
    }

    #[test]
    fn joyce_coefficient(a in 0.1f64..3.0, s in 0.0f64..1e3) {
        let p = Params::new(vec![a, -a]).unwrap();
        prop_assert!((p.coefficient_f(s).unwrap() - 2.0 * (s + a * a).sqrt()).abs() <= 1e-10);
    }

    #[test]
    fn lifted_points_satisfy_the_reduction(
        p in nonsingular(5), x in -2.0f64..2.0, y in -2.0f64..2.0, u in -2.0f64..2.0, v in -2.0f64..2.0,
        seed in 0.0f64..TAU,
    ) {
        prop_assume!(v.hypot(y) > 1e-3);
        let angles: Vec<f64> = (0..p.n() - 2).map(|k| (seed * (k + 1) as f64) % TAU).collect();
        let s = lift_point(&p, x, y, u, v, &angles).unwrap();
        prop_assert!((s.invariant_product() - Complex::new(v, y)).norm() <= 1e-10 * (1.0 + v.hypot(y)));
        prop_assert!(moment_residual(&p, &s).iter().all(|r| r.abs() <= 1e-10 * (1.0 + s.w.abs())));
    }

    #[test]
    fn affine_frames_are_calibrated(
        p in nonsingular(4), al in -2.0f64..2.0, be in -2.0f64..2.0, ga in -2.0f64..2.0,
        x in -1.0f64..1.0, y in -1.0f64..1.0,
    ) {
        let (u, v) = affine_uv(&AffineSolution::new(al, be, ga), x, y);
        prop_assume!(v.hypot(y) > 1e-2);
        let s = lift_point(&p, x, y, u, v, &vec![0.3; p.n() - 2]).unwrap();
        let f = tangent_frame(&p, &s, BasePartials::new(al, 0.0, 0.0, al)).unwrap();
        prop_assert!(omega_residual(&f) <= 1e-10);
        prop_assert!(imomega_residual(&f) <= 1e-10);
        prop_assert_eq!(f.real_rank(), p.n());
    }

    #[test]
    fn affine_split_phase_is_constant(
        p in nonsingular(4), al in -2.0f64..2.0, be in -2.0f64..2.0, ga in -2.0f64..2.0,
    ) {
        let sol = AffineSolution::new(al, be, ga);
        let phase = sol.split_phase().conj();
        let d = Grid::square(-1.0, 1.0, 7).unwrap();
        // (1 − iα)(x + i(αx + β)) = (1 + α²)x + αβ + iβ
        let expected = be / (1.0 + al * al).sqrt();
        for j in 0..d.ny() {
            for i in 0..d.nx() {
                let (x, y) = (d.x(i), d.y(j));
                let (u, v) = affine_uv(&sol, x, y);
                if v.hypot(y) < 1e-9 {
                    continue;
                }
                let s = lift_point(&p, x, y, u, v, &vec![0.0; p.n() - 2]).unwrap();
                prop_assert!(((phase * s.z[p.n() - 1]).im - expected).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn hl_triples_close_their_constraints(
        leading in prop::collection::vec(-1.0f64..2.0, 1..=3), b in -1.0f64..1.0,
        x in -2.0f64..2.0, y in -2.0f64..2.0,
    ) {
        prop_assume!(y.abs() > 1e-3);
        let cfg = HlConfig::from_leading(&leading, b).unwrap();
        match hl_solve_alpha(&cfg, x, y) {
            Ok(root) => {
                if root.hi > root.lo {
                    let probes: Vec<f64> = (1..=20)
                        .map(|k| hl_f(&cfg, x, y, root.lo + (root.hi - root.lo) * k as f64 / 21.0).unwrap())
                        .collect();
                    prop_assert!(probes.windows(2).all(|w| w[1] < w[0]));
                }
                let t = hl_triple(&cfg, x, y).unwrap();
                prop_assert!(t.invariants(&cfg).hold(), "{:?}", t.invariants(&cfg));
                prop_assert_eq!(t.u.signum(), -y.signum());
            }
            Err(Error::DegenerateRegion { roots }) => {
                for r in roots {
                    prop_assert!(hl_f(&cfg, x, y, r).unwrap().abs() <= 1e-8 * (1.0 + y * y));
                }
            }
            Err(Error::NoPositiveRoot) => prop_assert_eq!(x, 0.0),
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn hl_root_grows_with_y(leading in prop::collection::vec(0.0f64..2.0, 1..=2), x in 0.1f64..2.0, y in 0.1f64..2.0) {
        let cfg = HlConfig::from_leading(&leading, 0.0).unwrap();
        let a1 = hl_solve_alpha(&cfg, x, y).unwrap().alpha;
        let a2 = hl_solve_alpha(&cfg, x, 2.0 * y).unwrap().alpha;
        prop_assert!(a2 > a1);
    }

    #[test]
    fn winding_of_powers_is_stable(k in 1u32..=3, samples in 32usize..200, cx in -0.3f64..0.3, cy in -0.3f64..0.3) {
        let trace = |m| circle_trace((cx, cy), 1.0, m, |x, y| {
            let z = Complex::new(x, y).powu(k);
            Ok((z.re, z.im))
        }).unwrap();
        let t = trace(samples);
        let w = winding_number(&t).unwrap();
        prop_assert_eq!(w, k as i64);
        prop_assert_eq!(winding_number(&trace(2 * samples)).unwrap(), w);
        prop_assert_eq!(winding_number(&t.reversed()).unwrap(), -w);
    }

    #[test]
    fn distinct_affine_solutions_meet_with_multiplicity_one(
        a1 in -2.0f64..2.0, da in 0.5f64..2.0, b1 in -0.5f64..0.5, b2 in -0.5f64..0.5,
        g1 in -0.5f64..0.5, g2 in -0.5f64..0.5,
    ) {
        let d = Grid::square(-3.0, 3.0, 31).unwrap();
        let (u1, v1) = AffineSolution::new(a1, b1, g1).fields(d);
        let (u2, v2) = AffineSolution::new(a1 + da, b2, g2).fields(d);
        let center = ((b1 - b2) / da, (g1 - g2) / da);
        let m = multiplicity_at_zero(&u1, &v1, &u2, &v2, center, 0.25, 64).unwrap();
        prop_assert_eq!(m, 1);
    }

    #[test]
    fn field_csv_round_trip(nx in 3usize..9, ny in 3usize..9, x0 in -5.0f64..0.0, w in 0.1f64..5.0, seed in 0.0f64..10.0) {
        let d = Grid::new(x0, x0 + w, -1.0, 1.0 + seed, nx, ny).unwrap();
        let f = Field::from_fn(d, |x, y| (seed * x).sin() * y.exp() / 3.0);
        let back = fields_from_csv(&fields_to_csv(&["f"], &[&f]).unwrap()).unwrap();
        prop_assert_eq!(back.get("f").unwrap(), &f);
    }
}

#[test]
fn single_precision_paths() {
    let p = slag_core::params::ReductionParams::<f32>::new(vec![1.0, -1.0]).unwrap();
    let b = p.solve_branch(3.0).unwrap();
    assert!((b.w - 2.0).abs() < 1e-5);
    let s = lift_point(&p, 0.3f32, 0.5, 0.9, 1.2, &[0.0]).unwrap();
    let f = tangent_frame(&p, &s, BasePartials::new(0.6f32, 0.0, 0.0, 0.6)).unwrap();
    assert!(omega_residual(&f) < 1e-5);
    assert!(imomega_residual(&f) < 1e-5);
}
