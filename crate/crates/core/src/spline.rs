//! Uniformly sampled tables with natural cubic spline interpolation.

use crate::error::{Error, Result};

/// What a table returns past its last sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Beyond {
    /// Short-ranged functions vanish past the table.
    Zero,
    /// Value pinned to the last sample, slope of the last interval.
    Clamp,
}

/// Samples `y_i = f(i * spacing)` for `i in 0..count`, interpolated by a
/// natural cubic spline built once at construction.
#[derive(Debug, Clone)]
pub struct TabulatedFunction {
    samples: Vec<f64>,
    spacing: f64,
    beyond: Beyond,
    // per-interval cubic: a + b t + c t^2 + d t^3, t = x - x_k
    coeffs: Vec<[f64; 4]>,
}

impl TabulatedFunction {
    pub fn new(samples: Vec<f64>, spacing: f64, beyond: Beyond) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Domain(format!(
                "a table needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::Domain(format!("table spacing must be > 0, got {spacing}")));
        }
        if let Some(bad) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite table sample at index {bad}")));
        }
        let coeffs = natural_spline(&samples, spacing);
        Ok(Self {
            samples,
            spacing,
            beyond,
            coeffs,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    pub fn beyond(&self) -> Beyond {
        self.beyond
    }

    /// Abscissa of the last sample.
    pub fn last_knot(&self) -> f64 {
        (self.samples.len() - 1) as f64 * self.spacing
    }

    /// Interpolated value and analytic derivative of the interpolant at `x`.
    pub fn eval(&self, x: f64) -> Result<(f64, f64)> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("table evaluated at negative abscissa {x}")));
        }
        let last = self.samples.len() - 1;
        let u = x / self.spacing;
        if u > last as f64 {
            return Ok(match self.beyond {
                Beyond::Zero => (0.0, 0.0),
                Beyond::Clamp => {
                    let (_, d) = self.eval_segment(last - 1, self.spacing);
                    (self.samples[last], d)
                }
            });
        }
        // Snap onto a knot when x lands on one so the stored sample comes back exactly.
        let nearest = u.round();
        if (u - nearest).abs() <= 4.0 * f64::EPSILON * u.max(1.0) {
            let k = nearest as usize;
            let seg = k.min(last - 1);
            let (_, d) = self.eval_segment(seg, (k - seg) as f64 * self.spacing);
            return Ok((self.samples[k], d));
        }
        let seg = (u.floor() as usize).min(last - 1);
        Ok(self.eval_segment(seg, x - seg as f64 * self.spacing))
    }

    /// Evaluates interval `seg`'s cubic at offset `t` from its left knot,
    /// without range checks. Used for two-sided continuity checks.
    pub fn eval_segment(&self, seg: usize, t: f64) -> (f64, f64) {
        let [a, b, c, d] = self.coeffs[seg];
        (a + t * (b + t * (c + t * d)), b + t * (2.0 * c + 3.0 * t * d))
    }
}

fn natural_spline(y: &[f64], h: f64) -> Vec<[f64; 4]> {
    let n = y.len();
    // Second derivatives m, zero at both ends; interior rows solve
    // m[i-1] + 4 m[i] + m[i+1] = 6 (y[i+1] - 2 y[i] + y[i-1]) / h^2 (Thomas algorithm).
    let mut m = vec![0.0; n];
    if n > 2 {
        let inner = n - 2;
        let mut diag = vec![4.0; inner];
        let mut rhs: Vec<f64> = (1..n - 1)
            .map(|i| 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h))
            .collect();
        for i in 1..inner {
            let w = 1.0 / diag[i - 1];
            diag[i] -= w;
            rhs[i] -= w * rhs[i - 1];
        }
        m[inner] = rhs[inner - 1] / diag[inner - 1];
        for i in (0..inner - 1).rev() {
            m[i + 1] = (rhs[i] - m[i + 2]) / diag[i];
        }
    }
    (0..n - 1)
        .map(|k| {
            let b = (y[k + 1] - y[k]) / h - h * (2.0 * m[k] + m[k + 1]) / 6.0;
            [y[k], b, 0.5 * m[k], (m[k + 1] - m[k]) / (6.0 * h)]
        })
        .collect()
}
