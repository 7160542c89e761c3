//! Monotone piecewise cubic Hermite interpolation (Fritsch–Carlson slopes).

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return Err(Error::Precondition(format!(
                "interpolation needs ≥ 2 matching nodes, got {} x and {} y",
                n,
                ys.len()
            )));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Precondition("interpolation nodes must be strictly increasing".into()));
        }
        let secants: Vec<f64> = (0..n - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            let (a, b) = (secants[i - 1], secants[i]);
            slopes[i] = if a * b <= 0.0 { 0.0 } else { 0.5 * (a + b) };
        }
        // Fritsch–Carlson limiter: keep (α, β) inside the circle of radius 3.
        for i in 0..n - 1 {
            let d = secants[i];
            if d == 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
                continue;
            }
            let alpha = slopes[i] / d;
            let beta = slopes[i + 1] / d;
            let r2 = alpha * alpha + beta * beta;
            if r2 > 9.0 {
                let t = 3.0 / r2.sqrt();
                slopes[i] = t * alpha * d;
                slopes[i + 1] = t * beta * d;
            }
        }
        Ok(MonotoneCubic { xs, ys, slopes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.xs.len();
        match self.xs.partition_point(|&v| v <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    /// Value at `x`; linear extrapolation with the end slopes outside the table.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x < self.xs[0] {
            return self.ys[0] + self.slopes[0] * (x - self.xs[0]);
        }
        if x > self.xs[n - 1] {
            return self.ys[n - 1] + self.slopes[n - 1] * (x - self.xs[n - 1]);
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x < self.xs[0] {
            return self.slopes[0];
        }
        if x > self.xs[n - 1] {
            return self.slopes[n - 1];
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let d00 = 6.0 * t2 - 6.0 * t;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = -6.0 * t2 + 6.0 * t;
        let d11 = 3.0 * t2 - 2.0 * t;
        (d00 * self.ys[i] + d01 * self.ys[i + 1]) / h + d10 * self.slopes[i] + d11 * self.slopes[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_nodes_and_lines() {
        let xs: Vec<f64> = (0..11).map(|i| i as f64 * 0.2).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        let m = MonotoneCubic::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(m.eval(*x), *y);
        }
        assert!((m.eval(0.37) - (3.0 * 0.37 - 1.0)).abs() < 1e-14);
        assert!((m.derivative(1.13) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn preserves_monotonicity_of_step_data() {
        let xs: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let ys = vec![0.0, 0.0, 0.0, 0.1, 5.0, 5.1, 5.1, 5.1];
        let m = MonotoneCubic::new(xs, ys).unwrap();
        let mut prev = m.eval(0.0);
        for k in 1..=700 {
            let v = m.eval(k as f64 * 0.01);
            assert!(v >= prev - 1e-15, "overshoot at {}", k as f64 * 0.01);
            prev = v;
        }
    }

    #[test]
    fn rejects_bad_nodes() {
        assert!(MonotoneCubic::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(MonotoneCubic::new(vec![0.0], vec![1.0]).is_err());
    }

    #[test]
    fn smooth_data_converges() {
        let make = |n: usize| {
            let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
            let ys = xs.iter().map(|x| x.exp()).collect();
            MonotoneCubic::new(xs, ys).unwrap()
        };
        let err = |m: &MonotoneCubic| {
            (0..1000)
                .map(|k| {
                    let x = (k as f64 + 0.5) / 1000.0;
                    (m.eval(x) - x.exp()).abs()
                })
                .fold(0.0, f64::max)
        };
        // Averaged-secant slopes make the scheme second order.
        assert!(err(&make(64)) < 1e-4);
        assert!(err(&make(128)) < err(&make(64)) / 3.5);
    }
}
