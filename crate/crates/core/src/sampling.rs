//! Seeded sampling on S², S² × S² and the unit-disc bundle.
//!
//! Every sample owns its own stream: the generator for sample `index` is
//! ChaCha8 seeded with `seed` on stream `index`. Results therefore depend only
//! on `(seed, index)`, never on evaluation order.

use nalgebra::Vector4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geom::{ProductPoint, SpherePoint, Vec3};

pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian3<R: Rng>(rng: &mut R) -> Vec3 {
    Vec3::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    )
}

/// Uniform point on S² (normalized Gaussian).
pub fn sphere_point<R: Rng>(rng: &mut R) -> SpherePoint {
    loop {
        if let Ok(p) = SpherePoint::new(gaussian3(rng)) {
            return p;
        }
    }
}

/// Independent uniform points on each factor.
pub fn product_point<R: Rng>(rng: &mut R) -> ProductPoint {
    ProductPoint::new(sphere_point(rng), sphere_point(rng))
}

/// Uniform unit vector of R⁴, used as a tangent in frame coordinates.
pub fn unit_vector4<R: Rng>(rng: &mut R) -> Vector4<f64> {
    loop {
        let v = Vector4::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let n: f64 = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Uniform unit tangent direction at `x`.
pub fn unit_tangent<R: Rng>(rng: &mut R, x: &SpherePoint) -> Vec3 {
    let c = x.coords();
    loop {
        let g = gaussian3(rng);
        let t = g - c * c.dot(&g);
        let n = t.norm();
        if n > 1e-12 {
            return t / n;
        }
    }
}

/// Random tangent vector at `x` with norm uniform in `[0, max_norm)`.
pub fn tangent_in_disc<R: Rng>(rng: &mut R, x: &SpherePoint, max_norm: f64) -> Vec3 {
    unit_tangent(rng, x) * (rng.random::<f64>() * max_norm)
}

/// Random point with `|x + y| = s` (up to rounding), for `s ∈ [0, 2]`: the
/// midpoint direction is uniform and the chord direction uniform around it.
pub fn point_at_axis_norm<R: Rng>(rng: &mut R, s: f64) -> ProductPoint {
    let c = sphere_point(rng);
    let perp = unit_tangent(rng, &c);
    let h = 0.5 * s.clamp(0.0, 2.0);
    let w = (1.0 - h * h).max(0.0).sqrt();
    let x = c.coords() * h + perp * w;
    let y = c.coords() * h - perp * w;
    ProductPoint::new(
        SpherePoint::new(x).expect("unit vector"),
        SpherePoint::new(y).expect("unit vector"),
    )
}
