use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector4};
use proptest::prelude::*;

use dehnlab::chart::LocalChart;
use dehnlab::compactify::{phi, phi_inv, solve_profile_f, CompactifyProfile, CotangentPoint};
use dehnlab::geom::{area_form, rotate, ProductPoint, SpherePoint, TangentVector, Vec3};
use dehnlab::interp::MonotoneCubic;
use dehnlab::maps::{homotopy_h, mu, profile_r, rho, swap_iota, tau, tau_inv, SWAP_RADIUS};
use dehnlab::sampling::{point_at_axis_norm, sample_rng};
use dehnlab::topology::{winding_number, MatrixLoop};
use dehnlab::verify::rotation2;

fn unit() -> impl Strategy<Value = SpherePoint> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("away from the origin", |(a, b, c)| a * a + b * b + c * c > 1e-2)
        .prop_map(|(a, b, c)| SpherePoint::from_xyz(a, b, c).unwrap())
}

fn product() -> impl Strategy<Value = ProductPoint> {
    (unit(), unit()).prop_map(|(x, y)| ProductPoint::new(x, y))
}

fn tangent_at(x: SpherePoint) -> impl Strategy<Value = TangentVector> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(move |(a, b, c)| TangentVector::project(x, Vec3::new(a, b, c)))
}

fn turn(axis: &Vec3, angle: f64, p: &SpherePoint) -> SpherePoint {
    SpherePoint::new(rotate(axis, angle, p.coords()).unwrap()).unwrap()
}

fn turn_pair(axis: &Vec3, angle: f64, p: &ProductPoint) -> ProductPoint {
    ProductPoint::new(turn(axis, angle, &p.x), turn(axis, angle, &p.y))
}

fn profile() -> &'static CompactifyProfile {
    static P: std::sync::OnceLock<CompactifyProfile> = std::sync::OnceLock::new();
    P.get_or_init(|| solve_profile_f().unwrap())
}

proptest! {
    #[test]
    fn rotations_compose(a in unit(), v in unit(), s in -10.0..10.0f64, t in -10.0..10.0f64) {
        let axis = a.coords() * 3.0;
        let twice = rotate(&axis, s, &rotate(&axis, t, v.coords()).unwrap()).unwrap();
        let once = rotate(&axis, s + t, v.coords()).unwrap();
        prop_assert!((twice - once).norm() < 1e-12);
        prop_assert!((once.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn area_form_is_rotation_invariant(
        (x, u, v) in unit().prop_flat_map(|x| (Just(x), tangent_at(x), tangent_at(x))),
        a in unit(),
        angle in -PI..PI,
    ) {
        let rx = turn(a.coords(), angle, &x);
        let ru = TangentVector::new(rx, rotate(a.coords(), angle, &u.vec).unwrap()).unwrap();
        let rv = TangentVector::new(rx, rotate(a.coords(), angle, &v.vec).unwrap()).unwrap();
        let before = area_form(&x, &u, &v).unwrap();
        prop_assert!((area_form(&rx, &ru, &rv).unwrap() - before).abs() < 1e-13);
        prop_assert!((area_form(&x, &v, &u).unwrap() + before).abs() < 1e-15);
    }

    #[test]
    fn circle_action_is_a_group_law(p in product(), s in -7.0..7.0f64, t in -7.0..7.0f64) {
        prop_assume!(p.axis_norm() > 1e-3);
        let composed = rho(s, &rho(t, &p).unwrap()).unwrap();
        prop_assert!(composed.distance(&rho(s + t, &p).unwrap()) < 1e-12);
        prop_assert!((mu(&composed) - mu(&p)).abs() < 1e-12);
        prop_assert!(rho(2.0 * PI, &p).unwrap().distance(&p) < 1e-12);
    }

    #[test]
    fn twist_inverts(p in product()) {
        prop_assert!(tau_inv(&tau(&p)).distance(&p) < 1e-12);
        prop_assert!(tau(&tau_inv(&p)).distance(&p) < 1e-12);
    }

    #[test]
    fn twist_is_equivariant(p in product(), a in unit(), angle in -PI..PI) {
        let axis = a.coords();
        let lhs = tau(&turn_pair(axis, angle, &p));
        let rhs = turn_pair(axis, angle, &tau(&p));
        // Rotation moves |x + y| by rounding, which only matters on a plateau edge.
        prop_assert!(lhs.distance(&rhs) < 1e-10);
    }

    #[test]
    fn twist_preserves_mu(p in product()) {
        prop_assert!((mu(&tau(&p)) - mu(&p)).abs() < 1e-12);
    }

    #[test]
    fn twist_supports_are_exact(seed in any::<u64>(), u in 0.0..1.0f64) {
        let inner = point_at_axis_norm(&mut sample_rng(seed, 0), SWAP_RADIUS * u);
        if inner.axis_norm() <= SWAP_RADIUS {
            prop_assert_eq!(tau(&inner), swap_iota(&inner));
        }
        let outer = point_at_axis_norm(&mut sample_rng(seed, 1), 1.0 + u);
        if outer.axis_norm() >= 1.0 {
            prop_assert_eq!(tau(&outer), outer);
        }
    }

    #[test]
    fn swap_is_an_involution(p in product()) {
        prop_assert_eq!(swap_iota(&swap_iota(&p)), p);
        prop_assert_eq!(mu(&swap_iota(&p)), mu(&p));
    }

    #[test]
    fn profile_stays_in_range(t in -1.0..3.0f64) {
        let r = profile_r(t);
        prop_assert!((-PI..=0.0).contains(&r));
    }

    #[test]
    fn homotopy_endpoints(p in product()) {
        prop_assert_eq!(homotopy_h(0.0, &p).unwrap(), p);
        prop_assert!(homotopy_h(1.0, &p).unwrap().distance(&tau(&tau(&p))) < 1e-9);
    }

    #[test]
    fn chart_round_trip(p in product(), a in -0.1..0.1f64, b in -0.1..0.1f64, c in -0.1..0.1f64, d in -0.1..0.1f64) {
        let xi = Vector4::new(a, b, c, d);
        prop_assert!((p.chart_inv(&p.chart(&xi)).unwrap() - xi).amax() < 1e-14);
    }

    #[test]
    fn compactification_round_trips(p in product()) {
        prop_assume!(p.x.distance(&p.y) > 1e-6);
        let prof = profile();
        let q = phi(prof, &p).unwrap();
        prop_assert!(q.covector.norm() < 1.0);
        prop_assert!(phi_inv(prof, &q).unwrap().distance(&p) < 1e-9);
    }

    #[test]
    fn compactification_inverse_round_trips(u in unit(), w in unit(), r in 0.0..0.999f64) {
        let c = u.coords();
        let t = w.coords() - c * c.dot(w.coords());
        prop_assume!(t.norm() > 1e-6);
        let q = CotangentPoint::new(u, t / t.norm() * r).unwrap();
        let prof = profile();
        prop_assert!(phi(prof, &phi_inv(prof, &q).unwrap()).unwrap().distance(&q) < 1e-9);
    }

    #[test]
    fn monotone_data_gives_monotone_interpolant(steps in proptest::collection::vec(0.0..2.0f64, 3..30)) {
        let xs: Vec<f64> = (0..steps.len()).map(|i| i as f64).collect();
        let ys: Vec<f64> = steps.iter().scan(0.0, |acc, s| { *acc += s; Some(*acc) }).collect();
        let m = MonotoneCubic::new(xs, ys).unwrap();
        let n = steps.len() - 1;
        let mut prev = m.eval(0.0);
        for k in 1..=100 * n {
            let v = m.eval(k as f64 / 100.0);
            prop_assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn winding_negates_under_reversal(k in -3i64..=3, n in 32usize..96, squash in 0.2..3.0f64) {
        let scale = Matrix2::new(squash, 0.0, 0.0, 1.0);
        let lp = MatrixLoop::from_fn(n, |t| Ok(rotation2(2.0 * PI * k as f64 * t) * scale)).unwrap();
        let w = winding_number(&lp).unwrap().winding;
        prop_assert_eq!(w, k);
        prop_assert_eq!(winding_number(&lp.reversed()).unwrap().winding, -k);
    }

    #[test]
    fn winding_survives_reparameterization(k in -2i64..=2, bend in -0.9..0.9f64) {
        // t ↦ t + bend·t(1 - t)/2 is an increasing bijection of [0, 1].
        let warp = |t: f64| t + 0.5 * bend * t * (1.0 - t);
        let plain = MatrixLoop::from_fn(80, |t| Ok(rotation2(2.0 * PI * k as f64 * t))).unwrap();
        let warped = MatrixLoop::from_fn(80, |t| Ok(rotation2(2.0 * PI * k as f64 * warp(t)))).unwrap();
        prop_assert_eq!(winding_number(&plain).unwrap().winding, winding_number(&warped).unwrap().winding);
    }
}
