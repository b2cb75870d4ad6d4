//! Adaptive Dormand-Prince 5(4) integration for the planar radial system.
//!
//! The state is the pair (v, v'). The integrator keeps every accepted step
//! together with the stage data needed for the quartic continuous extension,
//! so trajectories can be resampled on arbitrary grids and sign changes can
//! be located by bisection on the interpolant rather than on step endpoints.

use crate::error::{Error, Result};

/// Safety cap on accepted + rejected steps for a single integration.
const MAX_STEPS: usize = 4_000_000;

/// Absolute guard against values large enough to overflow |v|^p downstream.
const VALUE_GUARD: f64 = 1e120;

// Butcher tableau of Dormand-Prince 5(4).
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense output coefficients (Hairer's contd5).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

type State = [f64; 2];

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
struct DenseStep {
    r0: f64,
    h: f64,
    // contd5 polynomial coefficients per component.
    c1: State,
    c2: State,
    c3: State,
    c4: State,
    c5: State,
}

impl DenseStep {
    fn eval(&self, r: f64) -> State {
        let theta = ((r - self.r0) / self.h).clamp(0.0, 1.0);
        let om = 1.0 - theta;
        let mut out = [0.0; 2];
        for k in 0..2 {
            out[k] = self.c1[k]
                + theta * (self.c2[k] + om * (self.c3[k] + theta * (self.c4[k] + om * self.c5[k])));
        }
        out
    }
}

/// A fully resolved trajectory on [start, end].
#[derive(Debug, Clone)]
pub struct Solution {
    steps: Vec<DenseStep>,
    pub start: f64,
    pub end: f64,
    pub final_state: State,
    /// Refined interior zeros of the first component, in increasing order.
    pub zeros: Vec<f64>,
    /// Max of |v| over accepted step endpoints and located extrema candidates.
    pub sup: f64,
    pub accepted_steps: usize,
}

impl Solution {
    /// Evaluate (v, v') anywhere inside the integration interval.
    pub fn eval(&self, r: f64) -> State {
        debug_assert!(!self.steps.is_empty());
        // First step whose right endpoint reaches r; steps are contiguous.
        let idx = self.steps.partition_point(|s| s.r0 + s.h < r);
        self.steps[idx.min(self.steps.len() - 1)].eval(r)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r)[0]
    }
}

/// Early-termination policy for shooting scans.
#[derive(Debug, Clone, Copy)]
pub enum StopRule {
    /// Integrate all the way to the outer radius.
    ToEnd,
    /// Stop as soon as more than `max_zeros` interior sign changes occurred.
    ZeroBudget { max_zeros: usize },
}

/// Outcome of an integration that may have been cut short by a stop rule.
#[derive(Debug, Clone)]
pub struct ScanOutcome {
    /// Interior sign changes observed before stopping (samples inside (start, end)).
    pub zero_count: usize,
    /// Terminal value of v when the end was reached; meaningless if `cut_short`.
    pub end_value: f64,
    pub end_slope: f64,
    pub cut_short: bool,
    pub sup: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        // Tight enough that the quartic dense output stays a couple of orders
        // below the acceptance-level residual tolerances.
        Tolerances {
            rtol: 1e-12,
            atol: 1e-12,
        }
    }
}

/// Radius tolerance for zero refinement by bisection on the dense output.
pub const ZERO_REFINE_TOL: f64 = 1e-12;

pub struct Integrator<F: Fn(f64, &State) -> State> {
    rhs: F,
    tol: Tolerances,
}

impl<F: Fn(f64, &State) -> State> Integrator<F> {
    pub fn new(rhs: F, tol: Tolerances) -> Self {
        Integrator { rhs, tol }
    }

    fn error_norm(&self, y0: &State, y1: &State, err: &State) -> f64 {
        let mut acc: f64 = 0.0;
        for k in 0..2 {
            let sc = self.tol.atol + self.tol.rtol * y0[k].abs().max(y1[k].abs());
            acc += (err[k] / sc) * (err[k] / sc);
        }
        (acc / 2.0).sqrt()
    }

    /// Integrate from `start` to `end`, collecting dense steps.
    ///
    /// When `stop` carries a zero budget the integration returns as soon as
    /// the budget is exceeded; the partial trajectory is still valid on the
    /// covered interval.
    pub fn run(&self, start: f64, end: f64, y0: State, stop: StopRule) -> Result<Solution> {
        self.run_impl(start, end, y0, stop, false)
    }

    /// `lean` drops the dense trajectory and the zero refinement: sign changes
    /// are only counted (positions are sample midpoints), which is all the
    /// shooting scans consume. Cuts both allocation and eval work.
    fn run_impl(
        &self,
        start: f64,
        end: f64,
        y0: State,
        stop: StopRule,
        lean: bool,
    ) -> Result<Solution> {
        assert!(end > start);
        let rhs = &self.rhs;
        let mut r = start;
        let mut y = y0;
        let mut k1 = rhs(r, &y);
        if !k1.iter().all(|v| v.is_finite()) {
            return Err(Error::BlowUp { radius: r });
        }

        let mut h = initial_step(start, end, &y, &k1, self.tol);
        let mut steps: Vec<DenseStep> = Vec::with_capacity(256);
        let mut zeros: Vec<f64> = Vec::new();
        let mut sup = y[0].abs();
        let mut nsteps = 0usize;
        let mut accepted = 0usize;

        let zero_budget = match stop {
            StopRule::ToEnd => usize::MAX,
            StopRule::ZeroBudget { max_zeros } => max_zeros,
        };
        let mut cut_short = false;

        while r < end {
            nsteps += 1;
            if nsteps > MAX_STEPS {
                return Err(Error::StepLimit { radius: r });
            }
            if r + h > end {
                h = end - r;
            }

            let k2 = rhs(r + C2 * h, &add(&y, h, &[(A21, &k1)]));
            let k3 = rhs(r + C3 * h, &add(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = rhs(r + C4 * h, &add(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = rhs(
                r + C5 * h,
                &add(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = rhs(
                r + h,
                &add(
                    &y,
                    h,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y1 = add(
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = rhs(r + h, &y1);

            let mut finite = y1.iter().all(|v| v.is_finite());
            for kk in [&k2, &k3, &k4, &k5, &k6, &k7] {
                finite &= kk.iter().all(|v| v.is_finite());
            }
            if !finite || y1[0].abs() > VALUE_GUARD || y1[1].abs() > VALUE_GUARD {
                return Err(Error::BlowUp { radius: r });
            }

            let mut err = [0.0; 2];
            for k in 0..2 {
                err[k] = h
                    * (E1 * k1[k] + E3 * k3[k] + E4 * k4[k] + E5 * k5[k] + E6 * k6[k]
                        + E7 * k7[k]);
            }
            let en = self.error_norm(&y, &y1, &err);

            if en <= 1.0 {
                // Accept: build the dense step.
                let mut c1 = [0.0; 2];
                let mut c2 = [0.0; 2];
                let mut c3 = [0.0; 2];
                let mut c4 = [0.0; 2];
                let mut c5 = [0.0; 2];
                for k in 0..2 {
                    let ydiff = y1[k] - y[k];
                    let bspl = h * k1[k] - ydiff;
                    c1[k] = y[k];
                    c2[k] = ydiff;
                    c3[k] = bspl;
                    c4[k] = ydiff - h * k7[k] - bspl;
                    c5[k] = h
                        * (D1 * k1[k]
                            + D3 * k3[k]
                            + D4 * k4[k]
                            + D5 * k5[k]
                            + D6 * k6[k]
                            + D7 * k7[k]);
                }
                let step = DenseStep { r0: r, h, c1, c2, c3, c4, c5 };
                if lean {
                    count_zeros_coarse(&step, start, end, &mut zeros, &mut sup);
                } else {
                    locate_zeros(&step, start, end, &mut zeros);
                    sup = sup.max(step_sup(&step));
                    steps.push(step);
                }
                accepted += 1;
                r += h;
                y = y1;
                k1 = k7; // FSAL

                if zeros.len() > zero_budget {
                    cut_short = true;
                    break;
                }
            }

            // Step size update (plain I controller with the usual clamps).
            let factor = if en == 0.0 {
                5.0
            } else {
                (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
            if !h.is_finite() || h <= 0.0 {
                return Err(Error::NoConvergence("step size underflow".into()));
            }
            if r + h == r {
                return Err(Error::StepLimit { radius: r });
            }
        }

        let _ = cut_short;
        Ok(Solution {
            steps,
            start,
            end: r,
            final_state: y,
            zeros,
            sup,
            accepted_steps: accepted,
        })
    }

    /// Lean scan variant: zero count / terminal data without keeping steps.
    pub fn scan(&self, start: f64, end: f64, y0: State, stop: StopRule) -> Result<ScanOutcome> {
        let sol = self.run_impl(start, end, y0, stop, true)?;
        let cut_short = sol.end < end;
        Ok(ScanOutcome {
            zero_count: sol.zeros.len(),
            end_value: sol.final_state[0],
            end_slope: sol.final_state[1],
            cut_short,
            sup: sol.sup,
        })
    }
}

fn add(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for k in 0..2 {
        let mut acc = 0.0;
        for (c, v) in terms {
            acc += c * v[k];
        }
        out[k] += h * acc;
    }
    out
}

fn initial_step(start: f64, end: f64, y: &State, dy: &State, tol: Tolerances) -> f64 {
    let span = end - start;
    let scale = y[0].abs().max(y[1].abs()).max(1.0);
    let dscale = dy[0].abs().max(dy[1].abs()).max(1e-8);
    let h = (tol.rtol.powf(0.2) * scale / dscale).min(span / 16.0);
    h.max(span * 1e-12)
}

/// Scan the dense step for sign changes of v and refine each by bisection.
fn locate_zeros(step: &DenseStep, start: f64, end: f64, zeros: &mut Vec<f64>) {
    const SAMPLES: usize = 8;
    let mut prev_r = step.r0;
    let mut prev_v = step.eval(prev_r)[0];
    for i in 1..=SAMPLES {
        let r = step.r0 + step.h * i as f64 / SAMPLES as f64;
        let v = step.eval(r)[0];
        if prev_v == 0.0 {
            // A sample landing exactly on a zero: record it once.
            if prev_r > start && prev_r < end && !near_last(zeros, prev_r) {
                zeros.push(prev_r);
            }
        } else if prev_v * v < 0.0 {
            let z = bisect_zero(step, prev_r, r);
            if z > start && z < end && !near_last(zeros, z) {
                zeros.push(z);
            }
        }
        prev_r = r;
        prev_v = v;
    }
}

/// Count sign changes across the step's sample points without refining them,
/// and fold the samples into the running sup. Positions are only accurate to
/// the sample spacing, which suffices for budget counting.
fn count_zeros_coarse(step: &DenseStep, start: f64, end: f64, zeros: &mut Vec<f64>, sup: &mut f64) {
    const SAMPLES: usize = 8;
    let mut prev_r = step.r0;
    let mut prev_v = step.eval(prev_r)[0];
    for i in 1..=SAMPLES {
        let r = step.r0 + step.h * i as f64 / SAMPLES as f64;
        let v = step.eval(r)[0];
        *sup = sup.max(v.abs());
        if prev_v == 0.0 {
            if prev_r > start && prev_r < end && !near_last(zeros, prev_r) {
                zeros.push(prev_r);
            }
        } else if prev_v * v < 0.0 {
            let z = 0.5 * (prev_r + r);
            if z > start && z < end {
                zeros.push(z);
            }
        }
        prev_r = r;
        prev_v = v;
    }
}

fn near_last(zeros: &[f64], z: f64) -> bool {
    zeros
        .last()
        .is_some_and(|&last| (z - last).abs() <= 10.0 * ZERO_REFINE_TOL)
}

fn bisect_zero(step: &DenseStep, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = step.eval(lo)[0];
    for _ in 0..200 {
        if hi - lo <= ZERO_REFINE_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = step.eval(mid)[0];
        if fm == 0.0 {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}

fn step_sup(step: &DenseStep) -> f64 {
    // Eight interior samples catch every extremum the step can resolve.
    let mut m: f64 = 0.0;
    for i in 0..=8 {
        let r = step.r0 + step.h * i as f64 / 8.0;
        m = m.max(step.eval(r)[0].abs());
    }
    m
}
