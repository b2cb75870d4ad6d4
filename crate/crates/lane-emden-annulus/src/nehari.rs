//! Zone-wise variational construction of nodal profiles.
//!
//! The m-zone solution minimizes the total action over sign-alternating
//! configurations: pick interior cut radii a < r_1 < ... < r_{m-1} < b, put
//! the least-action positive solution on each zone, and minimize the summed
//! action over the cuts. The derivative of a zone's action with respect to
//! moving one of its Dirichlet endpoints is (up to the shared weight) the
//! squared slope there, so the cut placement is optimal exactly when adjacent
//! zone slopes match in magnitude, which is also what makes the glued
//! profile C^1. The solver runs coordinate descent over the cuts with an
//! exact slope-balance line solve per cut.
//!
//! Slope magnitudes are compared in log scale: the zone amplitudes carry the
//! factor kappa^(1/(p-1)), which overflows f64 near p = 1 while its log does
//! not.

use crate::annulus::{validate_exponent, validate_zones, AnnulusSpec};
use crate::error::{Error, Result};
use crate::ode::Solution;
use crate::radial::{
    positive_zone_kappa, refine_sup, shoot_nodal, shoot_positive_scaled, RadialOptions,
    RadialProfile,
};
use crate::roots::brent;

#[derive(Debug, Clone, Copy)]
pub struct NehariOptions {
    /// Sweep convergence threshold on cut movement, relative to b - a.
    pub placement_tol: f64,
    pub max_sweeps: usize,
    pub radial: RadialOptions,
}

impl Default for NehariOptions {
    fn default() -> Self {
        NehariOptions {
            placement_tol: 1e-12,
            max_sweeps: 80,
            radial: RadialOptions::default(),
        }
    }
}

/// Per-zone action bookkeeping.
///
/// True-scale quantities (`energy`, `gradient_integral`) overflow to +inf
/// when the amplitude is out of f64 range; the ln forms are always finite.
#[derive(Debug, Clone)]
pub struct ZoneEnergy {
    pub bounds: (f64, f64),
    pub sign: f64,
    /// ln of the zone's amplitude max |v|.
    pub ln_peak: f64,
    /// (p-1)/(2(p+1)) times the gradient integral.
    pub energy: f64,
    pub ln_energy: f64,
    /// Integral of r^(N-1) v'^2 over the zone.
    pub gradient_integral: f64,
    /// Relative gap between the gradient and power integrals; zero in exact
    /// arithmetic for every zone solution.
    pub nehari_defect: f64,
}

#[derive(Debug, Clone)]
pub struct NehariSolution {
    pub profile: RadialProfile,
    /// Total action; +inf when the amplitude is out of f64 range.
    pub lambda: f64,
    pub ln_lambda: f64,
    pub zones: Vec<ZoneEnergy>,
    pub sweeps: usize,
}

/// Construct the m-zone nodal profile by constrained minimization over zone
/// cuts. Agrees with the shooting construction up to solver tolerances; the
/// two paths share no iteration logic beyond the inner one-zone solver.
pub fn minimize_nodal(
    spec: AnnulusSpec,
    p: f64,
    m: usize,
    opts: &NehariOptions,
) -> Result<NehariSolution> {
    validate_exponent(p)?;
    validate_zones(m)?;
    if m == 1 {
        let profile = shoot_nodal(spec, p, 1, &opts.radial)?;
        return assemble(profile, 0);
    }

    let width = spec.width();
    let mut cuts: Vec<f64> = (1..m)
        .map(|i| spec.inner + width * i as f64 / m as f64)
        .collect();
    // Warm-start coefficients per zone, refreshed as cuts move.
    let mut kappas: Vec<Option<f64>> = vec![None; m];

    let mut sweeps = 0;
    loop {
        sweeps += 1;
        if sweeps > opts.max_sweeps {
            return Err(Error::NoConvergence(format!(
                "cut placement still moving after {} sweeps",
                opts.max_sweeps
            )));
        }
        let mut moved: f64 = 0.0;
        for i in 0..m - 1 {
            let lo = if i == 0 { spec.inner } else { cuts[i - 1] };
            let hi = if i + 2 <= m - 1 { cuts[i + 1] } else { spec.outer };
            let x0 = cuts[i];
            let (hint_l, hint_r) = (kappas[i], kappas[i + 1]);
            let (x, kl, kr) =
                balance_cut(spec.dim, p, lo, hi, x0, hint_l, hint_r, &opts.radial, width)?;
            kappas[i] = Some(kl);
            kappas[i + 1] = Some(kr);
            moved = moved.max((x - x0).abs());
            cuts[i] = x;
        }
        if moved <= opts.placement_tol * width {
            break;
        }
    }

    let profile = glue(spec, p, m, &cuts, &kappas, &opts.radial)?;
    assemble(profile, sweeps)
}

/// Signed log slope mismatch at cut x between the zones (lo, x) and (x, hi).
///
/// Positive when the left zone's boundary slope dominates, which pushes the
/// optimal cut to the right. The right zone's scaled slope at x is exactly 1
/// by the shooting normalization, so only its kappa enters.
struct CutProbe<'a> {
    dim: u32,
    p: f64,
    lo: f64,
    hi: f64,
    opts: &'a RadialOptions,
    hint_l: Option<f64>,
    hint_r: Option<f64>,
}

impl CutProbe<'_> {
    fn mismatch(&mut self, x: f64) -> Result<f64> {
        let (kl, end_slope, _) =
            positive_zone_kappa(self.dim, self.p, self.lo, x, self.opts, self.hint_l)?;
        let (kr, _, _) = positive_zone_kappa(self.dim, self.p, x, self.hi, self.opts, self.hint_r)?;
        self.hint_l = Some(kl);
        self.hint_r = Some(kr);
        let pm1 = self.p - 1.0;
        Ok(kl.ln() / pm1 + end_slope.abs().ln() - kr.ln() / pm1)
    }
}

#[allow(clippy::too_many_arguments)]
fn balance_cut(
    dim: u32,
    p: f64,
    lo: f64,
    hi: f64,
    x0: f64,
    hint_l: Option<f64>,
    hint_r: Option<f64>,
    opts: &RadialOptions,
    width: f64,
) -> Result<(f64, f64, f64)> {
    let mut probe = CutProbe { dim, p, lo, hi, opts, hint_l, hint_r };
    let g0 = probe.mismatch(x0)?;

    // Expand toward the boundary the mismatch sign points at; the mismatch
    // diverges to +inf at lo and -inf at hi, so a sign change must appear.
    let (mut xa, mut ga, mut xb, mut gb);
    if g0 == 0.0 {
        return finish(probe, x0);
    } else if g0 > 0.0 {
        xa = x0;
        ga = g0;
        xb = x0;
        gb = g0;
        for _ in 0..60 {
            xb += 0.5 * (hi - xb);
            gb = probe.mismatch(xb)?;
            if gb <= 0.0 {
                break;
            }
            xa = xb;
            ga = gb;
        }
    } else {
        xb = x0;
        gb = g0;
        xa = x0;
        ga = g0;
        for _ in 0..60 {
            xa -= 0.5 * (xa - lo);
            ga = probe.mismatch(xa)?;
            if ga >= 0.0 {
                break;
            }
            xb = xa;
            gb = ga;
        }
    }
    if !(ga >= 0.0 && gb <= 0.0) {
        return Err(Error::InvalidPlacement(format!(
            "no slope balance between {lo} and {hi} (mismatch {ga:e}..{gb:e})"
        )));
    }

    let mut err: Option<Error> = None;
    let (x, _) = brent(
        |x| match probe.mismatch(x) {
            Ok(g) => g,
            Err(e) => {
                err = Some(e);
                0.0
            }
        },
        xa,
        xb,
        ga,
        gb,
        1e-14 * width,
        0.0,
        120,
    );
    if let Some(e) = err {
        return Err(e);
    }
    finish(probe, x)
}

fn finish(mut probe: CutProbe<'_>, x: f64) -> Result<(f64, f64, f64)> {
    probe.mismatch(x)?;
    Ok((x, probe.hint_l.unwrap(), probe.hint_r.unwrap()))
}

/// Assemble the normalized profile from converged cuts.
fn glue(
    spec: AnnulusSpec,
    p: f64,
    m: usize,
    cuts: &[f64],
    kappas: &[Option<f64>],
    opts: &RadialOptions,
) -> Result<RadialProfile> {
    let pm1 = p - 1.0;
    let mut zones: Vec<(f64, Solution, f64)> = Vec::with_capacity(m);
    for i in 0..m {
        let lo = if i == 0 { spec.inner } else { cuts[i - 1] };
        let hi = if i == m - 1 { spec.outer } else { cuts[i] };
        let (kappa, sol) = shoot_positive_scaled(spec.dim, p, lo, hi, opts, kappas[i])?;
        let sup = refine_sup(&sol);
        zones.push((kappa, sol, sup));
    }

    // Global amplitude in log scale; the largest zone fixes sup_pow exactly.
    let ln_amps: Vec<f64> = zones
        .iter()
        .map(|(k, _, sup)| k.ln() / pm1 + sup.ln())
        .collect();
    let (i_max, ln_sup) = ln_amps
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one zone");
    let sup_pow = zones[i_max].0 * zones[i_max].2.powf(pm1);

    let grid = spec.uniform_grid(opts.grid_intervals);
    let mut values = Vec::with_capacity(grid.len());
    let mut slopes = Vec::with_capacity(grid.len());
    for &r in &grid {
        // r exactly on a cut belongs to the right zone, whose value there is 0.
        let zi = cuts.partition_point(|&c| c < r);
        let (kappa, sol, _) = &zones[zi];
        let scale = (kappa.ln() / pm1 - ln_sup).exp();
        let sign = if zi % 2 == 0 { 1.0 } else { -1.0 };
        let y = sol.eval(r.clamp(sol.start, sol.end));
        values.push(sign * y[0] * scale);
        slopes.push(sign * y[1] * scale);
    }
    values[0] = 0.0;

    let ln_alpha = zones[0].0.ln() / pm1;
    Ok(RadialProfile::from_parts(
        spec,
        p,
        m,
        grid,
        values,
        slopes,
        cuts.to_vec(),
        sup_pow,
        ln_sup,
        ln_alpha,
    ))
}

fn assemble(profile: RadialProfile, sweeps: usize) -> Result<NehariSolution> {
    let zones = zone_energies(&profile)?;
    let (lambda, ln_lambda) = action_level(&zones);
    Ok(NehariSolution {
        profile,
        lambda,
        ln_lambda,
        zones,
        sweeps,
    })
}

/// Per-zone action data computed from a normalized profile.
///
/// Works for profiles from either construction path; all integrals run on
/// the stored C^1 interpolant.
pub fn zone_energies(profile: &RadialProfile) -> Result<Vec<ZoneEnergy>> {
    let shape = profile.shape();
    let nm1 = (profile.spec.dim - 1) as f64;
    let p = profile.p;
    let sup_pow = profile.sup_norm_pow();
    let ln_sup = profile.ln_sup_norm();
    let mut out = Vec::with_capacity(profile.zones);
    for i in 0..profile.zones {
        let (lo, hi) = profile.zone_bounds(i);
        let grad = shape.integrate(lo, hi, |r, _v, dv| r.powf(nm1) * dv * dv);
        let power = sup_pow * shape.integrate(lo, hi, |r, v, _dv| r.powf(nm1) * v.abs().powf(p + 1.0));
        if !(grad.is_finite() && grad > 0.0) {
            return Err(Error::NullTestFunction);
        }
        let defect = (grad - power).abs() / grad;
        let ln_gradient = 2.0 * ln_sup + grad.ln();
        let ln_energy = ((p - 1.0) / (2.0 * (p + 1.0))).ln() + ln_gradient;
        // Zone peak over the grid nodes it contains; h^2-accurate, reporting only.
        let peak = profile
            .grid
            .iter()
            .zip(&profile.values)
            .filter(|(r, _)| **r >= lo && **r <= hi)
            .fold(0.0f64, |acc, (_, v)| acc.max(v.abs()));
        out.push(ZoneEnergy {
            bounds: (lo, hi),
            sign: profile.zone_sign(i),
            ln_peak: ln_sup + peak.max(f64::MIN_POSITIVE).ln(),
            energy: ln_energy.exp(),
            ln_energy,
            gradient_integral: ln_gradient.exp(),
            nehari_defect: defect,
        });
    }
    Ok(out)
}

/// Total action of a zone decomposition: plain sum and log-sum-exp form.
pub fn action_level(zones: &[ZoneEnergy]) -> (f64, f64) {
    let lambda = zones.iter().map(|z| z.energy).sum();
    let m = zones
        .iter()
        .map(|z| z.ln_energy)
        .fold(f64::NEG_INFINITY, f64::max);
    let ln_lambda = m + zones.iter().map(|z| (z.ln_energy - m).exp()).sum::<f64>().ln();
    (lambda, ln_lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec2() -> AnnulusSpec {
        AnnulusSpec::new(1.0, 2.0, 2).unwrap()
    }

    #[test]
    fn one_zone_matches_shooting_bitwise() {
        let opts = NehariOptions::default();
        let neh = minimize_nodal(spec2(), 3.0, 1, &opts).unwrap();
        let shot = shoot_nodal(spec2(), 3.0, 1, &opts.radial).unwrap();
        assert_eq!(neh.profile.values, shot.values);
        assert_eq!(neh.sweeps, 0);
        assert_eq!(neh.zones.len(), 1);
        assert!(neh.lambda.is_finite() && neh.lambda > 0.0);
    }

    #[test]
    fn two_zone_construction_matches_shooting() {
        let opts = NehariOptions::default();
        let neh = minimize_nodal(spec2(), 3.0, 2, &opts).unwrap();
        let shot = shoot_nodal(spec2(), 3.0, 2, &opts.radial).unwrap();
        assert_eq!(neh.profile.zeros.len(), 1);
        let dz = (neh.profile.zeros[0] - shot.zeros[0]).abs();
        assert!(dz < 1e-8, "cut vs shooting zero: {dz:e}");
        let dv = neh
            .profile
            .values
            .iter()
            .zip(&shot.values)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        assert!(dv < 1e-7, "profile gap {dv:e}");
        let dp = ((neh.profile.sup_norm_pow() - shot.sup_norm_pow()) / shot.sup_norm_pow()).abs();
        assert!(dp < 1e-8, "amplitude power gap {dp:e}");
    }

    #[test]
    fn three_zone_construction_matches_shooting_in_3d() {
        let spec = AnnulusSpec::new(1.0, 2.0, 3).unwrap();
        let opts = NehariOptions::default();
        let neh = minimize_nodal(spec, 2.2, 3, &opts).unwrap();
        let shot = shoot_nodal(spec, 2.2, 3, &opts.radial).unwrap();
        for (a, b) in neh.profile.zeros.iter().zip(&shot.zeros) {
            assert!((a - b).abs() < 1e-8, "cut {a} vs zero {b}");
        }
        let dv = neh
            .profile
            .values
            .iter()
            .zip(&shot.values)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        assert!(dv < 1e-7, "profile gap {dv:e}");
    }

    #[test]
    fn zone_actions_satisfy_constraint_identity() {
        let opts = NehariOptions::default();
        let neh = minimize_nodal(spec2(), 3.0, 3, &opts).unwrap();
        assert_eq!(neh.zones.len(), 3);
        for (i, z) in neh.zones.iter().enumerate() {
            assert!(z.nehari_defect < 1e-6, "zone {i} defect {:e}", z.nehari_defect);
            assert!(z.energy > 0.0);
        }
        let sum: f64 = neh.zones.iter().map(|z| z.energy).sum();
        assert!(((neh.lambda - sum) / sum).abs() < 1e-12);
        assert!((neh.ln_lambda - sum.ln()).abs() < 1e-10);
        // The glued profile solves the same equation as a shot profile.
        assert!(neh.profile.ode_residual() < 1e-8);
    }

    #[test]
    fn placement_is_deterministic() {
        let opts = NehariOptions::default();
        let a = minimize_nodal(spec2(), 2.5, 3, &opts).unwrap();
        let b = minimize_nodal(spec2(), 2.5, 3, &opts).unwrap();
        assert_eq!(a.profile.zeros, b.profile.zeros);
        assert_eq!(a.profile.values, b.profile.values);
        assert_eq!(a.sweeps, b.sweeps);
    }

    #[test]
    fn rejects_bad_arguments() {
        let opts = NehariOptions::default();
        assert!(minimize_nodal(spec2(), 1.0, 2, &opts).is_err());
        assert!(minimize_nodal(spec2(), 3.0, 0, &opts).is_err());
    }
}
