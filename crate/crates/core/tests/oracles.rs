//! Independent oracles: each test recomputes a quantity without the chart and
//! frame machinery of the library and compares.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Rotation3, Unit, Vector3};

use dehnlab::compactify::{phi, solve_profile_f, CompactifyProfile};
use dehnlab::geom::{area_form, rotate, tangent_frame, ProductPoint, SpherePoint, TangentVector, Vec3};
use dehnlab::maps::{homotopy_h, mu, swap_iota, tau};
use dehnlab::quadrature::gauss_legendre;
use dehnlab::sampling::{product_point, sample_rng, sphere_point, unit_tangent};
use dehnlab::topology::{homology_matrix, Basepoints};
use dehnlab::verify::{hamiltonian_residual, normal_action, polar_angle, rotation2, DEFAULT_STEP};

type Ambient = (Vec3, Vec3);

fn ambient(p: &ProductPoint) -> Ambient {
    (*p.x.coords(), *p.y.coords())
}

/// `ω` written out with cross products.
fn omega_ambient(p: &Ambient, a: &Ambient, b: &Ambient) -> f64 {
    p.0.dot(&a.0.cross(&b.0)) + p.1.dot(&a.1.cross(&b.1))
}

/// Push-forward of the tangent `(u, v)` by a fourth-order stencil along the
/// curve `t ↦ (normalize(x + t u), normalize(y + t v))`.
fn push<F: Fn(&ProductPoint) -> ProductPoint>(f: &F, p: &ProductPoint, t: &Ambient, h: f64) -> Ambient {
    let at = |s: f64| {
        let q = ProductPoint::new(
            SpherePoint::new(p.x.coords() + t.0 * s).unwrap(),
            SpherePoint::new(p.y.coords() + t.1 * s).unwrap(),
        );
        ambient(&f(&q))
    };
    let (p2, p1, m1, m2) = (at(2.0 * h), at(h), at(-h), at(-2.0 * h));
    let d = |a: Vec3, b: Vec3, c: Vec3, e: Vec3| (-a + b * 8.0 - c * 8.0 + e) / (12.0 * h);
    (d(p2.0, p1.0, m1.0, m2.0), d(p2.1, p1.1, m1.1, m2.1))
}

fn random_tangent(rng: &mut rand_chacha::ChaCha8Rng, p: &ProductPoint) -> Ambient {
    (unit_tangent(rng, &p.x), unit_tangent(rng, &p.y))
}

#[test]
fn tau_preserves_omega_in_ambient_coordinates() {
    let f = |q: &ProductPoint| tau(q);
    let mut worst = 0.0f64;
    for i in 0..2000 {
        let mut rng = sample_rng(11, i);
        let p = product_point(&mut rng);
        let a = random_tangent(&mut rng, &p);
        let b = random_tangent(&mut rng, &p);
        let q = ambient(&tau(&p));
        let lhs = omega_ambient(&q, &push(&f, &p, &a, 1e-4), &push(&f, &p, &b, 1e-4));
        let rhs = omega_ambient(&ambient(&p), &a, &b);
        worst = worst.max((lhs - rhs).abs());
    }
    assert!(worst < 1e-6, "{worst:e}");
}

#[test]
fn homotopy_preserves_omega_in_ambient_coordinates() {
    for s in [0.3, 0.8] {
        let f = |q: &ProductPoint| homotopy_h(s, q).unwrap();
        for i in 0..500 {
            let mut rng = sample_rng(12, i);
            let p = product_point(&mut rng);
            let a = random_tangent(&mut rng, &p);
            let b = random_tangent(&mut rng, &p);
            let q = ambient(&f(&p));
            let lhs = omega_ambient(&q, &push(&f, &p, &a, 1e-4), &push(&f, &p, &b, 1e-4));
            assert!((lhs - omega_ambient(&ambient(&p), &a, &b)).abs() < 1e-6);
        }
    }
}

#[test]
fn area_form_matches_cross_product() {
    for i in 0..200 {
        let mut rng = sample_rng(13, i);
        let x = sphere_point(&mut rng);
        let u = unit_tangent(&mut rng, &x) * 0.7;
        let v = unit_tangent(&mut rng, &x) * 1.3;
        let got = area_form(&x, &TangentVector::new(x, u).unwrap(), &TangentVector::new(x, v).unwrap()).unwrap();
        assert!((got - x.coords().dot(&u.cross(&v))).abs() < 1e-15);
    }
}

#[test]
fn rotation_matches_axis_angle() {
    for i in 0..200 {
        let mut rng = sample_rng(14, i);
        let axis = *sphere_point(&mut rng).coords() * 2.5;
        let v = *sphere_point(&mut rng).coords();
        let angle = -7.0 + 14.0 * (i as f64 / 200.0);
        let expected = Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle) * v;
        assert!((rotate(&axis, angle, &v).unwrap() - expected).norm() < 1e-14);
    }
}

#[test]
fn polar_angle_matches_svd() {
    for i in 0..500 {
        let mut rng = sample_rng(15, i);
        let g = sphere_point(&mut rng);
        let h = sphere_point(&mut rng);
        let m = Matrix2::new(g.coords()[0] + 2.0, g.coords()[1], h.coords()[0], h.coords()[2] + 2.0);
        if m.determinant() <= 0.1 {
            continue;
        }
        let svd = m.svd(true, true);
        let q = svd.u.unwrap() * svd.v_t.unwrap();
        let expected = q[(1, 0)].atan2(q[(0, 0)]);
        assert!((polar_angle(&m).unwrap() - expected).abs() < 1e-12);
    }
}

#[test]
fn gauss_legendre_three_point_rule() {
    let (x, w) = gauss_legendre(3);
    let r = (0.6f64).sqrt();
    assert!((x[0] + r).abs() < 1e-15 && x[1].abs() < 1e-15 && (x[2] - r).abs() < 1e-15);
    assert!((w[0] - 5.0 / 9.0).abs() < 1e-15 && (w[1] - 8.0 / 9.0).abs() < 1e-15);
}

#[test]
fn moment_map_against_analytic_generator() {
    // The generator at unit speed is (n × x, n × y) with n = (x + y)/|x + y|,
    // and dμ(v) = -⟨n, v_x + v_y⟩.
    for i in 0..1000 {
        let mut rng = sample_rng(16, i);
        let p = product_point(&mut rng);
        if p.axis_norm() < 0.1 {
            continue;
        }
        let n = p.axis() / p.axis_norm();
        let gen = (n.cross(p.x.coords()), n.cross(p.y.coords()));
        let v = random_tangent(&mut rng, &p);
        let contraction = omega_ambient(&ambient(&p), &v, &gen);
        let dmu = -n.dot(&(v.0 + v.1));
        assert!((contraction - dmu).abs() < 1e-14);
        // Directional derivative of μ itself, for the sign of μ.
        let h = 1e-6;
        let moved = ProductPoint::new(
            SpherePoint::new(p.x.coords() + v.0 * h).unwrap(),
            SpherePoint::new(p.y.coords() + v.1 * h).unwrap(),
        );
        let back = ProductPoint::new(
            SpherePoint::new(p.x.coords() - v.0 * h).unwrap(),
            SpherePoint::new(p.y.coords() - v.1 * h).unwrap(),
        );
        assert!(((mu(&moved) - mu(&back)) / (2.0 * h) - dmu).abs() < 1e-7);
        assert!(hamiltonian_residual(&p, DEFAULT_STEP).unwrap() < 1e-6);
    }
}

#[test]
fn normal_action_of_homotopy_against_rotation_about_x() {
    // At (x, x) the homotopy is the rotation by 2πs about 2x, which turns the
    // normal direction (e, -e) about x.
    for i in 0..20 {
        let x = sphere_point(&mut sample_rng(17, i));
        let f = tangent_frame(&x);
        for s in [0.1, 0.25, 0.6] {
            let e1 = rotate(x.coords(), 2.0 * PI * s, &f.e1.vec).unwrap();
            let expected = Matrix2::new(
                e1.dot(&f.e1.vec),
                -e1.dot(&f.e2.vec),
                e1.dot(&f.e2.vec),
                e1.dot(&f.e1.vec),
            );
            let map = |p: &ProductPoint| homotopy_h(s, p);
            let got = normal_action(&map, &x, DEFAULT_STEP).unwrap().matrix;
            assert!((got - expected).amax() < 1e-8);
            assert!((got - rotation2(2.0 * PI * s)).amax() < 1e-8);
        }
    }
}

/// Icosahedron subdivided `level` times, projected to the sphere.
fn icosphere(level: usize) -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v: Vec<Vec3> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(a, b, c)| Vector3::new(a, b, c).normalize())
    .collect();
    let mut faces = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache = std::collections::HashMap::new();
        let mut mid = |a: usize, b: usize, v: &mut Vec<Vec3>| {
            *cache.entry((a.min(b), a.max(b))).or_insert_with(|| {
                v.push(((v[a] + v[b]) * 0.5).normalize());
                v.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut v);
            let bc = mid(b, c, &mut v);
            let ca = mid(c, a, &mut v);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    (v, faces)
}

/// Degree as the total signed area of the image mesh over 4π.
fn mesh_degree<G: Fn(&SpherePoint) -> SpherePoint>(g: &G, level: usize) -> f64 {
    let (v, faces) = icosphere(level);
    let image: Vec<Vec3> = v.iter().map(|p| *g(&SpherePoint::new(*p).unwrap()).coords()).collect();
    let mut total = 0.0;
    for [a, b, c] in faces {
        let (a, b, c) = (image[a], image[b], image[c]);
        total += 2.0 * a.dot(&b.cross(&c)).atan2(1.0 + a.dot(&b) + b.dot(&c) + c.dot(&a));
    }
    total / (4.0 * PI)
}

#[test]
fn homology_matrix_against_mesh_degrees() {
    let maps: [(&str, fn(&ProductPoint) -> ProductPoint); 2] = [("swap", swap_iota), ("tau", tau)];
    for (name, f) in maps {
        let bp = Basepoints::standard();
        let mut mesh = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let g = |w: &SpherePoint| {
                    let p = if j == 0 { ProductPoint::new(*w, bp.y0) } else { ProductPoint::new(bp.x0, *w) };
                    let q = f(&p);
                    if i == 0 { q.x } else { q.y }
                };
                let d = mesh_degree(&g, 5);
                assert!((d - d.round()).abs() < 1e-6, "{name} [{i}][{j}] = {d}");
                mesh[i][j] = d.round() as i64;
            }
        }
        let wrapped = |p: &ProductPoint| Ok(f(p));
        let quad = homology_matrix(&wrapped, &Basepoints::defaults(), 128).unwrap();
        assert_eq!(quad.entries, mesh, "{name}");
        assert_eq!(mesh, [[0, 1], [1, 0]]);
    }
}

fn profile() -> CompactifyProfile {
    solve_profile_f().unwrap()
}

/// Tangent `(δu, δp)` of the disc bundle pushed forward from `(a.0, a.1)` by
/// a fourth-order stencil, with no charts involved.
fn push_phi(prof: &CompactifyProfile, p: &ProductPoint, t: &Ambient, h: f64) -> (Vec3, Vec3) {
    let at = |s: f64| {
        let q = ProductPoint::new(
            SpherePoint::new(p.x.coords() + t.0 * s).unwrap(),
            SpherePoint::new(p.y.coords() + t.1 * s).unwrap(),
        );
        let c = phi(prof, &q).unwrap();
        (*c.base.coords(), c.covector)
    };
    let (p2, p1, m1, m2) = (at(2.0 * h), at(h), at(-h), at(-2.0 * h));
    let d = |a: Vec3, b: Vec3, c: Vec3, e: Vec3| (-a + b * 8.0 - c * 8.0 + e) / (12.0 * h);
    (d(p2.0, p1.0, m1.0, m2.0), d(p2.1, p1.1, m1.1, m2.1))
}

#[test]
fn phi_pulls_eta_back_to_half_omega() {
    // The slice reduction gives f ≡ 1/2, hence phi*η = ω/2.
    let prof = profile();
    assert!(prof.values().iter().all(|f| (f - 0.5).abs() < 1e-12));
    for i in 0..1000 {
        let mut rng = sample_rng(18, i);
        let p = product_point(&mut rng);
        if p.x.distance(&p.y) < 0.05 {
            continue;
        }
        let a = random_tangent(&mut rng, &p);
        let b = random_tangent(&mut rng, &p);
        let (du_a, dp_a) = push_phi(&prof, &p, &a, 1e-4);
        let (du_b, dp_b) = push_phi(&prof, &p, &b, 1e-4);
        let eta = dp_a.dot(&du_b) - dp_b.dot(&du_a);
        let w = omega_ambient(&ambient(&p), &a, &b);
        assert!((eta - 0.5 * w).abs() < 1e-6 * (1.0 + w.abs()), "{eta} vs {w}");
    }
}

#[test]
fn covector_norm_is_half_the_axis() {
    let prof = profile();
    for i in 0..1000 {
        let p = product_point(&mut sample_rng(19, i));
        let q = phi(&prof, &p).unwrap();
        assert!((q.covector.norm() - 0.5 * p.axis_norm()).abs() < 1e-13);
    }
}
