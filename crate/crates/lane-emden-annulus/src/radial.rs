//! Radial solver: initial value integration and nodal shooting.
//!
//! The radial reduction of -Δu = |u|^(p-1) u on an annulus a < r < b is
//!
//! ```text
//! v'' + (N-1)/r v' + |v|^(p-1) v = 0,   v(a) = v(b) = 0,
//! ```
//!
//! normalized so that v'(a) > 0. The solver shoots on the initial slope.
//! Because the amplitude of the m-zone solution behaves like
//! lambda_m^(1/(p-1)), which overflows f64 once p is close enough to 1, the
//! shot is parametrized by the coefficient kappa of the rescaled problem
//!
//! ```text
//! W'' + (N-1)/r W' + kappa |W|^(p-1) W = 0,   W(a) = 0, W'(a) = 1,
//! ```
//!
//! with kappa = alpha^(p-1). Any solution of one form is an exact rescaling
//! of the other, and kappa stays bounded near p = 1 while alpha does not.
//! Profiles are stored sup-normalized together with the amplitude power
//! sup_norm^(p-1), which is the quantity all downstream modules consume.

use crate::annulus::{validate_exponent, validate_zones, AnnulusSpec};
use crate::error::{Error, Result};
use crate::interp::HermiteSeries;
use crate::ode::{Integrator, ScanOutcome, Solution, StopRule, Tolerances};
use crate::roots::brent;

/// Options shared by the radial construction paths.
#[derive(Debug, Clone, Copy)]
pub struct RadialOptions {
    /// Number of uniform grid cells of the stored profile.
    pub grid_intervals: usize,
    /// Integrator tolerances.
    pub tol: Tolerances,
    /// Geometric scan range for the shooting coefficient kappa.
    pub kappa_range: (f64, f64),
    /// Geometric scan factor.
    pub scan_factor: f64,
    /// Acceptance threshold for |W(b)| relative to sup |W|.
    pub boundary_tol: f64,
}

impl Default for RadialOptions {
    fn default() -> Self {
        RadialOptions {
            grid_intervals: 2048,
            tol: Tolerances::default(),
            kappa_range: (1e-12, 1e40),
            scan_factor: 8.0,
            boundary_tol: 1e-11,
        }
    }
}

/// Raw initial value trajectory in the unscaled variables.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub spec: AnnulusSpec,
    pub p: f64,
    pub alpha: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
    /// Interior zeros, bisection-refined on the dense output.
    pub zeros: Vec<f64>,
    pub sup: f64,
    pub end_value: f64,
}

/// A nodal solution profile, stored sup-normalized.
///
/// `values` and `slopes` hold v / ||v||_inf and its derivative on the uniform
/// `grid`; the true amplitude is carried by `sup_pow` = ||v||_inf^(p-1) and
/// `ln_sup` = ln ||v||_inf, which stay finite for every p > 1 even when
/// ||v||_inf itself overflows.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub spec: AnnulusSpec,
    pub p: f64,
    /// Number of nodal zones m (zeros.len() + 1).
    pub zones: usize,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
    /// The m - 1 interior zeros in increasing order.
    pub zeros: Vec<f64>,
    sup_pow: f64,
    ln_sup: f64,
    ln_alpha: f64,
}

impl RadialProfile {
    /// ||v||_inf^(p-1); finite for all p > 1 and the scale used internally.
    pub fn sup_norm_pow(&self) -> f64 {
        self.sup_pow
    }

    /// ln ||v||_inf.
    pub fn ln_sup_norm(&self) -> f64 {
        self.ln_sup
    }

    /// ||v||_inf; +inf if the amplitude exceeds the f64 range (p very near 1).
    pub fn sup_norm(&self) -> f64 {
        self.ln_sup.exp()
    }

    /// Initial slope v'(a) of the unscaled solution; +inf if out of range.
    pub fn alpha_star(&self) -> f64 {
        self.ln_alpha.exp()
    }

    pub fn ln_alpha_star(&self) -> f64 {
        self.ln_alpha
    }

    /// Normalized shape as a C^1 interpolant.
    pub fn shape(&self) -> HermiteSeries<'_> {
        HermiteSeries::new(&self.grid, &self.values, &self.slopes)
    }

    /// Zone boundaries (lo, hi) of the i-th nodal zone, 0-based.
    pub fn zone_bounds(&self, i: usize) -> (f64, f64) {
        let lo = if i == 0 { self.spec.inner } else { self.zeros[i - 1] };
        let hi = if i + 1 == self.zones {
            self.spec.outer
        } else {
            self.zeros[i]
        };
        (lo, hi)
    }

    /// Sign of the profile on zone i: positive on the first zone.
    pub fn zone_sign(&self, i: usize) -> f64 {
        if i % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Normalized flux-form residual of the radial equation.
    ///
    /// On each grid cell the momentum balance
    ///     dw' + ∫ [ (N-1)/r w' + sup_pow |w|^(p-1) w ] dr = 0
    /// and the kinematic balance dw = ∫ w' dr are evaluated with the stored
    /// C^1 data; the largest cell defect is normalized by the slope scale.
    /// Pointwise second differences cannot certify the solver tolerance at
    /// this grid size, the integrated form can.
    pub fn ode_residual(&self) -> f64 {
        let shape = self.shape();
        let nm1 = (self.spec.dim - 1) as f64;
        let kappa = self.sup_pow;
        let pm1 = self.p - 1.0;
        let slope_scale = 1.0 + self.slopes.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let mut worst = 0.0f64;
        for i in 0..self.grid.len() - 1 {
            let (r0, r1) = (self.grid[i], self.grid[i + 1]);
            let source = shape.integrate(r0, r1, |r, w, dw| {
                nm1 / r * dw + kappa * w.abs().powf(pm1) * w
            });
            let momentum = self.slopes[i + 1] - self.slopes[i] + source;
            let transport = shape.integrate(r0, r1, |_r, _w, dw| dw);
            let kinematic = self.values[i + 1] - self.values[i] - transport;
            worst = worst.max(momentum.abs() / slope_scale).max(kinematic.abs() / 2.0);
        }
        worst
    }

    /// Construct from already normalized data. Internal: callers guarantee
    /// sup |values| = 1 and zeros sorted strictly inside the annulus.
    pub(crate) fn from_parts(
        spec: AnnulusSpec,
        p: f64,
        zones: usize,
        grid: Vec<f64>,
        values: Vec<f64>,
        slopes: Vec<f64>,
        zeros: Vec<f64>,
        sup_pow: f64,
        ln_sup: f64,
        ln_alpha: f64,
    ) -> Self {
        RadialProfile {
            spec,
            p,
            zones,
            grid,
            values,
            slopes,
            zeros,
            sup_pow,
            ln_sup,
            ln_alpha,
        }
    }
}

fn scaled_rhs(
    spec: AnnulusSpec,
    p: f64,
    kappa: f64,
) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + Copy {
    let nm1 = (spec.dim - 1) as f64;
    let pm1 = p - 1.0;
    move |r, y| {
        let w = y[0];
        [y[1], -nm1 / r * y[1] - kappa * w.abs().powf(pm1) * w]
    }
}

/// Integrate the unscaled radial initial value problem v(a) = 0, v'(a) = alpha
/// and resample it on the uniform profile grid.
pub fn integrate_radial_ivp(
    spec: AnnulusSpec,
    p: f64,
    alpha: f64,
    opts: &RadialOptions,
) -> Result<Trajectory> {
    validate_exponent(p)?;
    if !(alpha.is_finite() && alpha != 0.0) {
        return Err(Error::invalid(format!("initial slope must be nonzero, got {alpha}")));
    }
    let integ = Integrator::new(scaled_rhs(spec, p, 1.0), opts.tol);
    let sol = integ.run(spec.inner, spec.outer, [0.0, alpha], StopRule::ToEnd)?;
    let grid = spec.uniform_grid(opts.grid_intervals);
    let (values, slopes) = resample(&sol, &grid);
    Ok(Trajectory {
        spec,
        p,
        alpha,
        grid,
        values,
        slopes,
        zeros: sol.zeros.clone(),
        sup: refine_sup(&sol),
        end_value: sol.final_state[0],
    })
}

fn resample(sol: &Solution, grid: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut values = Vec::with_capacity(grid.len());
    let mut slopes = Vec::with_capacity(grid.len());
    for &r in grid {
        let y = sol.eval(r);
        values.push(y[0]);
        slopes.push(y[1]);
    }
    (values, slopes)
}

/// Locate the true sup of |v| by polishing every local grid extremum with a
/// bisection on v'. The raw grid max is off by O(h^2) at the peaks, which is
/// too coarse for the normalization of the stored profile.
pub(crate) fn refine_sup(sol: &Solution) -> f64 {
    const SCAN: usize = 4096;
    let h = (sol.end - sol.start) / SCAN as f64;
    let mut best = sol.final_state[0].abs();
    let mut prev_r = sol.start;
    let mut prev_d = sol.eval(prev_r)[1];
    for i in 1..=SCAN {
        let r = sol.start + h * i as f64;
        let y = sol.eval(r);
        best = best.max(y[0].abs());
        if prev_d * y[1] < 0.0 {
            // v' changes sign: interior extremum inside (prev_r, r).
            let (mut lo, mut hi, mut dlo) = (prev_r, r, prev_d);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let d = sol.eval(mid)[1];
                if dlo * d <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    dlo = d;
                }
            }
            best = best.max(sol.eval(0.5 * (lo + hi))[0].abs());
        }
        prev_r = r;
        prev_d = y[1];
    }
    best
}

/// Shooting driver in the kappa parametrization.
struct Shooter {
    spec: AnnulusSpec,
    p: f64,
    m: usize,
    opts: RadialOptions,
}

impl Shooter {
    fn scan(&self, kappa: f64) -> Result<ScanOutcome> {
        let integ = Integrator::new(scaled_rhs(self.spec, self.p, kappa), self.opts.tol);
        integ.scan(
            self.spec.inner,
            self.spec.outer,
            [0.0, 1.0],
            StopRule::ZeroBudget { max_zeros: self.m + 1 },
        )
    }

    fn full(&self, kappa: f64) -> Result<Solution> {
        let integ = Integrator::new(scaled_rhs(self.spec, self.p, kappa), self.opts.tol);
        integ.run(self.spec.inner, self.spec.outer, [0.0, 1.0], StopRule::ToEnd)
    }

    /// Interior zero count, saturated at m + 2 when the budget cut in.
    fn count(&self, kappa: f64) -> Result<(usize, ScanOutcome)> {
        let out = self.scan(kappa)?;
        let c = if out.cut_short { self.m + 2 } else { out.zero_count };
        Ok((c, out))
    }

    /// Signed terminal residual; positive on the low-count side of the shot.
    fn residual(&self, out: &ScanOutcome) -> f64 {
        let parity = if (self.m - 1) % 2 == 0 { 1.0 } else { -1.0 };
        parity * out.end_value
    }

    /// Locate the shooting coefficient without the final dense integration.
    /// Returns kappa and the terminal scan data at kappa.
    fn solve_kappa(&self) -> Result<(f64, ScanOutcome)> {
        let target = self.m - 1;
        let (mut k_lo, mut k_hi) = (None, None);
        let (range_lo, range_hi) = self.opts.kappa_range;

        // Geometric sweep: the interior zero count is nondecreasing in kappa.
        let mut kappa = range_lo;
        while kappa <= range_hi * (1.0 + 1e-12) {
            let (c, out) = self.count(kappa)?;
            if !out.cut_short && c == target && out.end_value.abs() <= self.boundary_tol(&out) {
                return Ok((kappa, out));
            }
            if c <= target {
                k_lo = Some(kappa);
            } else {
                k_hi = Some(kappa);
                break;
            }
            kappa *= self.opts.scan_factor;
        }
        let (Some(mut lo), Some(mut hi)) = (k_lo, k_hi) else {
            return Err(Error::BracketFailure {
                zones: self.m,
                lo: range_lo,
                hi: range_hi,
            });
        };

        // Bisect in log kappa until the count jump is exactly target -> target+1.
        let mut c_lo = self.count(lo)?.0;
        let mut c_hi = self.count(hi)?.0;
        let mut out_hi_opt: Option<ScanOutcome> = None;
        for _ in 0..240 {
            if c_lo == target && c_hi == target + 1 {
                break;
            }
            let mid = (0.5 * (lo.ln() + hi.ln())).exp();
            if mid <= lo || mid >= hi {
                return Err(Error::NoConvergence(
                    "zero-count bracket collapsed before isolating a single jump".into(),
                ));
            }
            let (c, out) = self.count(mid)?;
            if !out.cut_short && c == target && out.end_value.abs() <= self.boundary_tol(&out) {
                return Ok((mid, out));
            }
            if c <= target {
                lo = mid;
                c_lo = c;
            } else {
                hi = mid;
                c_hi = c;
                out_hi_opt = Some(out);
            }
        }
        if !(c_lo == target && c_hi == target + 1) {
            return Err(Error::NoConvergence(
                "interior zero count would not settle on the requested jump".into(),
            ));
        }

        // Refine on the signed boundary residual.
        let out_lo = self.scan(lo)?;
        let out_hi = match out_hi_opt {
            Some(o) => o,
            None => self.scan(hi)?,
        };
        let f_lo = self.residual(&out_lo);
        let f_hi = self.residual(&out_hi);
        if !(f_lo >= 0.0 && f_hi <= 0.0) {
            return Err(Error::NoConvergence(format!(
                "boundary residual signs inconsistent with the zero count bracket: ({f_lo:e}, {f_hi:e})"
            )));
        }
        let sup_scale = out_lo.sup.max(out_hi.sup).max(1e-300);
        let ftol = self.opts.boundary_tol * sup_scale;
        let mut err: Option<Error> = None;
        let (kappa, _fk) = brent(
            |k| match self.scan(k) {
                Ok(out) => self.residual(&out),
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            },
            lo,
            hi,
            f_lo,
            f_hi,
            (hi - lo) * 1e-15 + lo * 1e-15,
            ftol,
            220,
        );
        if let Some(e) = err {
            return Err(e);
        }
        let out = self.scan(kappa)?;
        if out.cut_short || out.end_value.abs() > 10.0 * ftol {
            return Err(Error::NoConvergence(format!(
                "shooting residual {:e} stayed above tolerance {:e}",
                out.end_value.abs(),
                ftol
            )));
        }
        Ok((kappa, out))
    }

    fn boundary_tol(&self, out: &ScanOutcome) -> f64 {
        self.opts.boundary_tol * out.sup.max(1e-300)
    }

    /// Like `solve_kappa`, but first tries a narrow scan window around a known
    /// good coefficient from a nearby configuration. Falls back to the full
    /// sweep when the narrow window misses.
    fn solve_kappa_hinted(&self, hint: Option<f64>) -> Result<(f64, ScanOutcome)> {
        if let Some(k) = hint {
            if k.is_finite() && k > 0.0 {
                let mut opts = self.opts;
                opts.kappa_range = (k / 64.0, k * 64.0);
                opts.scan_factor = 2.0;
                let narrow = Shooter {
                    spec: self.spec,
                    p: self.p,
                    m: self.m,
                    opts,
                };
                if let Ok(found) = narrow.solve_kappa() {
                    return Ok(found);
                }
            }
        }
        self.solve_kappa()
    }
}

/// One-zone helpers used by the zone-wise constrained minimization. Both
/// solve the positive scaled problem W(lo) = 0, W'(lo) = 1, W(hi) = 0;
/// `hint` warm-starts the coefficient scan from a nearby zone's value.
///
/// The lean form returns (kappa, W'(hi), sup W), enough for the slope-balance
/// line searches; the full form carries the dense trajectory for gluing.
pub(crate) fn positive_zone_kappa(
    dim: u32,
    p: f64,
    lo: f64,
    hi: f64,
    opts: &RadialOptions,
    hint: Option<f64>,
) -> Result<(f64, f64, f64)> {
    let sub = AnnulusSpec::new(lo, hi, dim)?;
    let shooter = Shooter { spec: sub, p, m: 1, opts: *opts };
    let (kappa, out) = shooter.solve_kappa_hinted(hint)?;
    Ok((kappa, out.end_slope, out.sup))
}

pub(crate) fn shoot_positive_scaled(
    dim: u32,
    p: f64,
    lo: f64,
    hi: f64,
    opts: &RadialOptions,
    hint: Option<f64>,
) -> Result<(f64, Solution)> {
    let sub = AnnulusSpec::new(lo, hi, dim)?;
    let shooter = Shooter { spec: sub, p, m: 1, opts: *opts };
    let (kappa, _) = shooter.solve_kappa_hinted(hint)?;
    Ok((kappa, shooter.full(kappa)?))
}

/// Construct the m-zone nodal profile by shooting.
pub fn shoot_nodal(
    spec: AnnulusSpec,
    p: f64,
    m: usize,
    opts: &RadialOptions,
) -> Result<RadialProfile> {
    shoot_nodal_hinted(spec, p, m, opts, None).map(|(_, prof)| prof)
}

/// Hinted variant for parameter sweeps: a shooting coefficient from a nearby
/// exponent shrinks the scan window. Returns the coefficient for chaining.
pub(crate) fn shoot_nodal_hinted(
    spec: AnnulusSpec,
    p: f64,
    m: usize,
    opts: &RadialOptions,
    hint: Option<f64>,
) -> Result<(f64, RadialProfile)> {
    validate_exponent(p)?;
    validate_zones(m)?;
    let shooter = Shooter { spec, p, m, opts: *opts };
    let (kappa, _) = shooter.solve_kappa_hinted(hint)?;
    let sol = shooter.full(kappa)?;
    let prof = profile_from_scaled_solution(spec, p, m, kappa, &sol, opts)?;
    Ok((kappa, prof))
}

pub(crate) fn profile_from_scaled_solution(
    spec: AnnulusSpec,
    p: f64,
    m: usize,
    kappa: f64,
    sol: &Solution,
    opts: &RadialOptions,
) -> Result<RadialProfile> {
    let grid = spec.uniform_grid(opts.grid_intervals);
    let (mut values, mut slopes) = resample(sol, &grid);
    let sup = refine_sup(sol);
    if !(sup.is_finite() && sup > 0.0) {
        return Err(Error::NoConvergence("degenerate shooting amplitude".into()));
    }

    // Keep zeros strictly inside; the m-th zero sits at b by construction and
    // must not be misread as interior.
    let edge = 100.0 * crate::ode::ZERO_REFINE_TOL.max(f64::EPSILON * spec.outer);
    let zeros: Vec<f64> = sol
        .zeros
        .iter()
        .copied()
        .filter(|z| *z > spec.inner + edge && *z < spec.outer - edge)
        .collect();
    if zeros.len() != m - 1 {
        return Err(Error::NoConvergence(format!(
            "expected {} interior zeros, found {}",
            m - 1,
            zeros.len()
        )));
    }

    for v in values.iter_mut() {
        *v /= sup;
    }
    for s in slopes.iter_mut() {
        *s /= sup;
    }
    // The boundary values are solver noise around zero; pin the inner one,
    // which is exact by construction.
    values[0] = 0.0;

    let pm1 = p - 1.0;
    let sup_pow = kappa * sup.powf(pm1);
    let ln_sup = kappa.ln() / pm1 + sup.ln();
    let ln_alpha = kappa.ln() / pm1; // v'(a) = kappa^(1/(p-1)) * W'(a), W'(a) = 1.
    Ok(RadialProfile::from_parts(
        spec, p, m, grid, values, slopes, zeros, sup_pow, ln_sup, ln_alpha,
    ))
}
