//! Newton continuation from the radial profile onto the deformed domain.
//!
//! The discrete system at amplitude t is F_t(v) = A_t v - R_t(v) - d0 where
//! A_t is the pullback stiffness, R_t the lumped reaction, and d0 the defect
//! of the radial samples under the t = 0 operators. Subtracting d0 makes the
//! radial lift an exact discrete solution at t = 0, so the continuation
//! starts from a consistent state and grid error enters only through the
//! t-dependence. Amplitude is ramped in equal increments, each solved by a
//! damped Newton iteration whose matrix is "stiffness minus diagonal", one
//! block Thomas factorization per iteration.

use super::assemble::{assemble, Assembly};
use super::map::{DeformationSpec, FrameJacobian, PolarGrid};
use crate::error::{Error, Result};
use crate::radial::RadialProfile;

/// Newton iteration cap per continuation step.
const MAX_NEWTON: usize = 25;
/// Step-halving attempts when a full Newton step increases the residual.
const MAX_BACKTRACK: usize = 4;
/// Residual tolerance scale relative to 1 + sup|v|^p.
const TOL_SCALE: f64 = 1e-8;
/// Half-width of the exclusion window around known degenerate exponents.
const DEGENERACY_WINDOW: f64 = 1e-4;

/// Solution of the deformed problem at one amplitude.
#[derive(Debug, Clone)]
pub struct PerturbedSolution {
    pub grid: PolarGrid,
    pub deformation: DeformationSpec,
    pub p: f64,
    /// Nodal zone count of the radial profile the continuation started from.
    pub m: usize,
    pub t: f64,
    /// Field values over all grid nodes, radial line i then angle j at
    /// i * n_theta + j; the two boundary lines hold exact zeros.
    pub v: Vec<f64>,
    /// Frame Jacobian of the deformation at every node, same layout.
    pub jacobians: Vec<FrameJacobian>,
    /// Scaled residual max |F_i| / (r_i h_r h_theta) at the final iterate.
    pub residual_norm: f64,
    /// Newton iterations spent on each continuation step.
    pub newton_iterations: Vec<usize>,
    /// Final scaled residual of each continuation step.
    pub step_residuals: Vec<f64>,
}

impl PerturbedSolution {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.v[self.grid.node(i, j)]
    }

    pub fn sup(&self) -> f64 {
        self.v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    /// Interior slice of the field, the unknowns of the discrete system.
    pub(crate) fn interior(&self) -> &[f64] {
        let n_t = self.grid.n_theta;
        &self.v[n_t..self.v.len() - n_t]
    }
}

fn scaled_norm(f: &[f64], w_base: &[f64]) -> f64 {
    f.iter()
        .zip(w_base)
        .fold(0.0, |acc, (x, w)| acc.max(x.abs() / w))
}

fn sup_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// F(v) = A v - R(v) - defect on the interior nodes.
fn residual(asm: &Assembly, p: f64, v: &[f64], defect: &[f64]) -> Vec<f64> {
    let mut f = asm.stiffness.apply(v);
    let reaction = asm.reaction(p, v);
    for i in 0..f.len() {
        f[i] -= reaction[i] + defect[i];
    }
    f
}

/// One damped Newton solve at fixed amplitude. Returns the iterate, the
/// iteration count, and the final scaled residual.
fn newton_at(
    asm: &Assembly,
    p: f64,
    mut v: Vec<f64>,
    defect: &[f64],
) -> Result<(Vec<f64>, usize, f64)> {
    let mut f = residual(asm, p, &v, defect);
    let mut rn = scaled_norm(&f, &asm.w_base);
    for iter in 0..=MAX_NEWTON {
        let tol = TOL_SCALE * (1.0 + sup_abs(&v).powf(p));
        if rn <= tol {
            return Ok((v, iter, rn));
        }
        if iter == MAX_NEWTON {
            return Err(Error::NoConvergence(format!(
                "newton residual {rn:e} after {MAX_NEWTON} iterations (tolerance {tol:e})"
            )));
        }

        let slope: Vec<f64> = asm.reaction_slope(p, &v).iter().map(|s| -s).collect();
        let mut hess = asm.stiffness.clone();
        hess.add_diag(&slope);
        let factor = hess.factor()?;
        let rhs: Vec<f64> = f.iter().map(|x| -x).collect();
        let delta = factor.solve(&rhs);

        // Full step first; halve while the scaled residual grows. If no
        // candidate improves, keep the best one seen and let the iteration
        // cap decide whether the continuation is salvageable.
        let mut best: Option<(Vec<f64>, Vec<f64>, f64)> = None;
        let mut scale = 1.0;
        for _ in 0..=MAX_BACKTRACK {
            let cand: Vec<f64> = v
                .iter()
                .zip(&delta)
                .map(|(x, d)| x + scale * d)
                .collect();
            let fc = residual(asm, p, &cand, defect);
            let rc = scaled_norm(&fc, &asm.w_base);
            let better_than_best = best.as_ref().map_or(true, |(_, _, rb)| rc < *rb);
            if better_than_best {
                best = Some((cand, fc, rc));
            }
            if rc < rn {
                break;
            }
            scale *= 0.5;
        }
        let (vb, fb, rb) = best.expect("at least one candidate evaluated");
        v = vb;
        f = fb;
        rn = rb;
    }
    unreachable!("loop returns or errors at the iteration cap");
}

/// Continuation solve of the deformed problem at amplitude `t`.
///
/// Starts from the radial profile lifted to the polar grid, ramps the
/// amplitude in `steps` equal increments, and Newton-solves at each stop.
/// `avoid` lists exponents where the radial solution is degenerate; the
/// solve refuses to run within 1e-4 of any of them since the linearization
/// loses invertibility there.
pub fn newton_solve(
    radial: &RadialProfile,
    dspec: &DeformationSpec,
    grid: &PolarGrid,
    t: f64,
    steps: usize,
    avoid: &[f64],
) -> Result<PerturbedSolution> {
    if radial.spec.dim != 2 {
        return Err(Error::invalid("deformed solves are planar; need dim = 2"));
    }
    if radial.spec.inner != grid.spec.inner || radial.spec.outer != grid.spec.outer {
        return Err(Error::invalid("grid and radial profile live on different annuli"));
    }
    if steps == 0 {
        return Err(Error::invalid("need at least one continuation step"));
    }
    if !t.is_finite() {
        return Err(Error::invalid("deformation amplitude must be finite"));
    }
    let p = radial.p;
    for &q in avoid {
        if (p - q).abs() < DEGENERACY_WINDOW {
            return Err(Error::invalid(format!(
                "exponent {p} lies within {DEGENERACY_WINDOW:e} of the degenerate value {q}"
            )));
        }
    }
    let sup = radial.ln_sup_norm().exp();
    if !sup.is_finite() {
        return Err(Error::invalid(
            "radial amplitude overflows f64; the exponent sits too close to 1 for a direct solve",
        ));
    }

    // Radial lift and its t = 0 defect, subtracted from every residual.
    let shape = radial.shape();
    let n_t = grid.n_theta;
    let mut v = Vec::with_capacity((grid.n_r - 1) * n_t);
    for i in 1..grid.n_r {
        let value = sup * shape.value(grid.radii[i]);
        v.extend(std::iter::repeat(value).take(n_t));
    }
    let base = assemble(dspec, grid, 0.0)?;
    let defect = residual(&base, p, &v, &vec![0.0; v.len()]);

    let mut iterations = Vec::with_capacity(steps);
    let mut residuals = Vec::with_capacity(steps);
    let mut asm = base;
    for step in 1..=steps {
        let ts = t * step as f64 / steps as f64;
        if ts != 0.0 {
            asm = assemble(dspec, grid, ts)?;
        }
        let (vn, iters, rn) = newton_at(&asm, p, v, &defect)?;
        v = vn;
        iterations.push(iters);
        residuals.push(rn);
    }

    let mut full = vec![0.0; grid.node_count()];
    full[n_t..n_t * grid.n_r].copy_from_slice(&v);
    Ok(PerturbedSolution {
        grid: grid.clone(),
        deformation: dspec.clone(),
        p,
        m: radial.zones,
        t,
        v: full,
        jacobians: asm.jacobians,
        residual_norm: *residuals.last().expect("steps >= 1"),
        newton_iterations: iterations,
        step_residuals: residuals,
    })
}

/// Morse index of the computed solution: the number of negative eigenvalues
/// of the second variation A_t - diag(p w det |v|^(p-1)) on the grid the
/// solution was computed on.
pub fn morse_index_2d(sol: &PerturbedSolution) -> Result<usize> {
    hessian(sol, &sol.grid, sol.interior().to_vec())?.inertia()
}

/// Morse index recomputed on a finer grid, with the field carried over by
/// bilinear interpolation. The index counts angular oscillations up to the
/// grid's resolution, so deep spectra (large p) need more angular nodes than
/// the Newton solve itself; refining only the counting grid keeps the solve
/// cheap while the inertia converges.
pub fn morse_index_2d_refined(
    sol: &PerturbedSolution,
    r_mult: usize,
    theta_mult: usize,
) -> Result<usize> {
    if r_mult == 0 || theta_mult == 0 {
        return Err(Error::invalid("grid multipliers must be positive"));
    }
    let fine = PolarGrid::new(
        sol.grid.spec,
        sol.grid.n_r * r_mult,
        sol.grid.n_theta * theta_mult,
    )?;
    let mut v = Vec::with_capacity((fine.n_r - 1) * fine.n_theta);
    for i in 1..fine.n_r {
        for j in 0..fine.n_theta {
            v.push(bilinear(sol, fine.radii[i], fine.angles[j]));
        }
    }
    hessian(sol, &fine, v)?.inertia()
}

fn hessian(
    sol: &PerturbedSolution,
    grid: &PolarGrid,
    interior: Vec<f64>,
) -> Result<super::assemble::BlockTridiag> {
    let asm = assemble(&sol.deformation, grid, sol.t)?;
    let slope: Vec<f64> = asm
        .reaction_slope(sol.p, &interior)
        .iter()
        .map(|s| -s)
        .collect();
    let mut h = asm.stiffness;
    h.add_diag(&slope);
    Ok(h)
}

/// Bilinear sample of the solution field at an arbitrary point, wrapping in
/// angle and clamping to the annulus radially.
fn bilinear(sol: &PerturbedSolution, r: f64, theta: f64) -> f64 {
    let g = &sol.grid;
    let h_r = g.h_r();
    let h_t = g.h_theta();
    let x = ((r - g.spec.inner) / h_r).clamp(0.0, g.n_r as f64);
    let i0 = (x.floor() as usize).min(g.n_r - 1);
    let fr = x - i0 as f64;
    let y = (theta / h_t).rem_euclid(g.n_theta as f64);
    let j0 = (y.floor() as usize).min(g.n_theta - 1);
    let ft = y - j0 as f64;
    let j1 = (j0 + 1) % g.n_theta;
    let v00 = sol.value(i0, j0);
    let v10 = sol.value(i0 + 1, j0);
    let v01 = sol.value(i0, j1);
    let v11 = sol.value(i0 + 1, j1);
    v00 * (1.0 - fr) * (1.0 - ft)
        + v10 * fr * (1.0 - ft)
        + v01 * (1.0 - fr) * ft
        + v11 * fr * ft
}
