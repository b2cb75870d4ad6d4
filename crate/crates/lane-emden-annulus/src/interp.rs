//! Piecewise-cubic utilities: Hermite segments over sampled (value, slope)
//! data and a monotone (Fritsch-Carlson) cubic for data without slopes.

/// Evaluate the cubic Hermite interpolant on [x0, x1] at x.
pub fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * y0 + h * (h10 * d0 + h11 * d1) + h01 * y1
}

/// Derivative of the cubic Hermite interpolant on [x0, x1] at x.
pub fn hermite_deriv(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let dh00 = (6.0 * t2 - 6.0 * t) / h;
    let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
    let dh01 = (-6.0 * t2 + 6.0 * t) / h;
    let dh11 = 3.0 * t2 - 2.0 * t;
    dh00 * y0 + dh10 * d0 + dh11 * d1 + dh01 * y1
}

/// A grid function with slopes, viewed as a C^1 piecewise cubic.
///
/// Used for evaluating solver profiles between their uniform samples; both
/// arrays come from the integrator's dense output so the segment cubics stay
/// within the integration tolerance of the true solution.
#[derive(Debug, Clone)]
pub struct HermiteSeries<'a> {
    pub grid: &'a [f64],
    pub values: &'a [f64],
    pub slopes: &'a [f64],
}

impl<'a> HermiteSeries<'a> {
    pub fn new(grid: &'a [f64], values: &'a [f64], slopes: &'a [f64]) -> Self {
        assert_eq!(grid.len(), values.len());
        assert_eq!(grid.len(), slopes.len());
        assert!(grid.len() >= 2);
        HermiteSeries { grid, values, slopes }
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.grid.len();
        let idx = self.grid.partition_point(|&g| g < x);
        idx.clamp(1, n - 1) - 1
    }

    pub fn value(&self, x: f64) -> f64 {
        let i = self.segment(x);
        hermite(
            self.grid[i],
            self.grid[i + 1],
            self.values[i],
            self.values[i + 1],
            self.slopes[i],
            self.slopes[i + 1],
            x,
        )
    }

    pub fn slope(&self, x: f64) -> f64 {
        let i = self.segment(x);
        hermite_deriv(
            self.grid[i],
            self.grid[i + 1],
            self.values[i],
            self.values[i + 1],
            self.slopes[i],
            self.slopes[i + 1],
            x,
        )
    }

    /// Integrate f(x, v(x), v'(x)) over [lo, hi] with composite Simpson panels
    /// split at grid nodes, each panel no wider than half a grid cell.
    pub fn integrate<G: Fn(f64, f64, f64) -> f64>(&self, lo: f64, hi: f64, f: G) -> f64 {
        assert!(hi >= lo);
        if hi == lo {
            return 0.0;
        }
        let s = |xx: f64| f(xx, self.value(xx), self.slope(xx));
        let mut total = 0.0;
        // Walk segments overlapping [lo, hi]; segment(hi) is the one with hi
        // as interior point or right endpoint, so the range is inclusive.
        for i in self.segment(lo)..=self.segment(hi) {
            let a = self.grid[i].max(lo);
            let b = self.grid[i + 1].min(hi);
            if b <= a {
                continue;
            }
            let cell = self.grid[i + 1] - self.grid[i];
            let panels = ((b - a) / (0.5 * cell)).ceil().max(1.0) as usize;
            let hp = (b - a) / panels as f64;
            for k in 0..panels {
                let x0 = a + hp * k as f64;
                let x1 = x0 + hp;
                let xm = 0.5 * (x0 + x1);
                total += hp / 6.0 * (s(x0) + 4.0 * s(xm) + s(x1));
            }
        }
        total
    }
}

/// Monotone cubic (Fritsch-Carlson) interpolation of plain data.
///
/// Stays within the local data range, which keeps interpolated potentials
/// nonnegative near zeros of the underlying profile.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    grid: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Self {
        let n = grid.len();
        assert!(n >= 2);
        assert_eq!(n, values.len());
        let mut delta = vec![0.0; n - 1];
        for i in 0..n - 1 {
            delta[i] = (values[i + 1] - values[i]) / (grid[i + 1] - grid[i]);
        }
        let mut d = vec![0.0; n];
        d[0] = delta[0];
        d[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= 0.0 {
                d[i] = 0.0;
            } else {
                let h0 = grid[i] - grid[i - 1];
                let h1 = grid[i + 1] - grid[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        // Clamp endpoint slopes to preserve monotonicity of the end cells.
        for (i, di) in [(0usize, 0usize), (n - 1, n - 2)] {
            if delta[di] == 0.0 {
                d[i] = 0.0;
            } else if d[i] / delta[di] > 3.0 {
                d[i] = 3.0 * delta[di];
            } else if d[i] / delta[di] < 0.0 {
                d[i] = 0.0;
            }
        }
        MonotoneCubic { grid, values, slopes: d }
    }

    pub fn value(&self, x: f64) -> f64 {
        let n = self.grid.len();
        let i = self.grid.partition_point(|&g| g < x).clamp(1, n - 1) - 1;
        hermite(
            self.grid[i],
            self.grid[i + 1],
            self.values[i],
            self.values[i + 1],
            self.slopes[i],
            self.slopes[i + 1],
            x,
        )
    }
}
