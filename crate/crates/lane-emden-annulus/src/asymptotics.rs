//! Limit diagnostics at the two ends of the exponent range.
//!
//! Dropping p to 1 sends the normalized m-zone profile to the m-th radial
//! Dirichlet eigenfunction psi_m of the Laplacian and sup^(p-1) to its
//! eigenvalue lambda_m, while the top linearized eigenvalue nu_m fades to
//! zero. Growing p sends nu_m under the line (1-p) a^2 lambda_1. Both
//! trends are tabulated against independently computed Laplace eigenpairs.

use crate::annulus::{validate_zones, AnnulusSpec};
use crate::error::{Error, Result};
use crate::radial::{shoot_nodal, RadialOptions};
use crate::spectrum::{interior_sign_changes, laplace_pencil, linearized_pencil};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct AsymptoticsOptions {
    /// Discretization cells for both the Laplace and linearized pencils.
    pub intervals: usize,
    pub eigen_tol: f64,
    pub radial: RadialOptions,
}

impl Default for AsymptoticsOptions {
    fn default() -> Self {
        AsymptoticsOptions {
            intervals: 4096,
            eigen_tol: 1e-12,
            radial: RadialOptions::default(),
        }
    }
}

/// Radial Dirichlet eigenpair of the Laplacian on the annulus.
#[derive(Debug, Clone)]
pub struct LaplaceEigenpair {
    pub spec: AnnulusSpec,
    /// 1-based index in the radial spectrum.
    pub m: usize,
    pub lambda: f64,
    /// Full uniform grid including both boundary nodes.
    pub grid: Vec<f64>,
    /// Eigenfunction on the grid, sup-normalized, rising at the inner end.
    pub psi: Vec<f64>,
}

/// The m-th radial Dirichlet eigenvalue and eigenfunction, from the same
/// pencil machinery as the linearized spectrum with the potential zeroed
/// and the volume weight r^(N-1) on the right-hand side.
pub fn laplace_radial_eigen(
    spec: AnnulusSpec,
    m: usize,
    opts: &AsymptoticsOptions,
) -> Result<LaplaceEigenpair> {
    validate_zones(m)?;
    let pencil = laplace_pencil(spec, opts.intervals);
    let pairs = pencil.eigenpairs(m, opts.eigen_tol)?;
    let (lambda, psi) = pairs.into_iter().nth(m - 1).unwrap();
    // Sturm structure of the reduction: the m-th mode oscillates m-1 times.
    let flips = interior_sign_changes(&psi);
    if flips != m - 1 {
        return Err(Error::InconsistentSpectrum(format!(
            "radial mode {m} shows {flips} sign changes"
        )));
    }
    Ok(LaplaceEigenpair {
        spec,
        m,
        lambda,
        grid: pencil.grid,
        psi,
    })
}

/// One row of the p -> 1 diagnostic table.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct LinearLimitRow {
    pub p: f64,
    /// sup_norm^(p-1) of the profile; tends to lambda_m.
    pub supnorm_pow: f64,
    /// Reference eigenvalue, identical on every row.
    pub lambda_m: f64,
    /// sup distance between the normalized profile and +/- psi_m.
    pub err_profile: f64,
    /// Top linearized eigenvalue; tends to zero.
    pub nu_m: f64,
}

/// Tabulate the linear-limit diagnostics along exponents decreasing to 1.
pub fn p_to_1_diagnostics(
    spec: AnnulusSpec,
    m: usize,
    p_list: &[f64],
    opts: &AsymptoticsOptions,
) -> Result<Vec<LinearLimitRow>> {
    if p_list.is_empty()
        || p_list.iter().any(|&p| !(1.0 < p && p <= 2.0))
        || p_list.windows(2).any(|w| w[0] <= w[1])
    {
        return Err(Error::invalid(
            "exponent list must sit in (1, 2] and decrease toward 1",
        ));
    }
    let reference = laplace_radial_eigen(spec, m, opts)?;
    let rows: Vec<Result<LinearLimitRow>> = p_list
        .par_iter()
        .map(|&p| diagnostics_row(spec, m, p, &reference, opts).map_err(|e| Error::at_exponent(p, e)))
        .collect();
    rows.into_iter().collect()
}

fn diagnostics_row(
    spec: AnnulusSpec,
    m: usize,
    p: f64,
    reference: &LaplaceEigenpair,
    opts: &AsymptoticsOptions,
) -> Result<LinearLimitRow> {
    let prof = shoot_nodal(spec, p, m, &opts.radial)?;
    let shape = prof.shape();
    // Both the profile and psi_m rise at the inner boundary, so the matching
    // sign is positive; keep the resolution explicit in case a caller feeds
    // a differently oriented reference.
    let sign = reference.psi[1].signum();
    let mut err: f64 = 0.0;
    for (&r, &psi) in reference.grid.iter().zip(&reference.psi) {
        err = err.max((shape.value(r) - sign * psi).abs());
    }
    let nu_m = linearized_pencil(&prof, opts.intervals).eigenvalues(m, opts.eigen_tol)[m - 1];
    Ok(LinearLimitRow {
        p,
        supnorm_pow: prof.sup_norm_pow(),
        lambda_m: reference.lambda,
        err_profile: err,
        nu_m,
    })
}

/// One row of the large-p bound table.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct LargePRow {
    pub p: f64,
    pub nu_m: f64,
    /// (1-p) a^2 lambda_1; nu_m never exceeds it.
    pub bound: f64,
    /// bound - nu_m, nonnegative when the inequality holds.
    pub margin: f64,
}

/// Check nu_m(p) <= (1-p) a^2 lambda_1 along the given exponents.
pub fn large_p_bound_check(
    spec: AnnulusSpec,
    m: usize,
    p_list: &[f64],
    opts: &AsymptoticsOptions,
) -> Result<Vec<LargePRow>> {
    if p_list.iter().any(|&p| p <= 1.0) {
        return Err(Error::invalid("exponents must exceed 1"));
    }
    let lambda_1 = laplace_radial_eigen(spec, 1, opts)?.lambda;
    let rows: Vec<Result<LargePRow>> = p_list
        .par_iter()
        .map(|&p| {
            let prof = shoot_nodal(spec, p, m, &opts.radial).map_err(|e| Error::at_exponent(p, e))?;
            let nu_m =
                linearized_pencil(&prof, opts.intervals).eigenvalues(m, opts.eigen_tol)[m - 1];
            let bound = (1.0 - p) * spec.inner * spec.inner * lambda_1;
            Ok(LargePRow {
                p,
                nu_m,
                bound,
                margin: bound - nu_m,
            })
        })
        .collect();
    rows.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec2() -> AnnulusSpec {
        AnnulusSpec::new(1.0, 2.0, 2).unwrap()
    }

    /// First root of the Bessel cross product J0(k a) Y0(k b) - J0(k b) Y0(k a)
    /// above the given starting point, by plain bisection on a sign bracket.
    fn cross_product_root(a: f64, b: f64, near: f64) -> f64 {
        let f = |k: f64| libm::j0(k * a) * libm::y0(k * b) - libm::j0(k * b) * libm::y0(k * a);
        let (mut lo, mut hi) = (near - 0.3, near + 0.3);
        let (mut flo, fhi) = (f(lo), f(hi));
        assert!(flo * fhi < 0.0, "oracle bracket missed the root near {near}");
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid);
            if flo * fm <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
                flo = fm;
            }
        }
        0.5 * (lo + hi)
    }

    /// Second-order pencil eigenvalues admit h^2 Richardson elimination.
    fn richardson_lambda(spec: AnnulusSpec, m: usize, intervals: usize) -> f64 {
        let coarse = laplace_pencil(spec, intervals).eigenvalues(m, 1e-13)[m - 1];
        let fine = laplace_pencil(spec, 2 * intervals).eigenvalues(m, 1e-13)[m - 1];
        (4.0 * fine - coarse) / 3.0
    }

    #[test]
    fn thin_annulus_eigenvalue_approaches_the_flat_limit() {
        // Far from the origin the curvature term is negligible and the
        // problem is a unit interval string.
        let spec = AnnulusSpec::new(100.0, 101.0, 2).unwrap();
        let pair = laplace_radial_eigen(spec, 1, &AsymptoticsOptions::default()).unwrap();
        assert!((pair.lambda - PI * PI).abs() < 0.01 * PI * PI);
    }

    #[test]
    fn eigenvalues_match_the_bessel_cross_product_roots() {
        // In dimension 2 the radial eigenfunctions are combinations of
        // J0(k r) and Y0(k r); the Dirichlet condition at both ends makes
        // lambda_m the square of the m-th cross-product root.
        let spec = spec2();
        for (m, near) in [(1, PI), (2, 2.0 * PI), (3, 3.0 * PI)] {
            let k = cross_product_root(1.0, 2.0, near);
            let lambda = richardson_lambda(spec, m, 4096);
            let rel = (lambda - k * k).abs() / (k * k);
            assert!(rel < 1e-6, "mode {m}: {lambda} vs {}, rel {rel:e}", k * k);
        }
    }

    #[test]
    fn radial_eigenvalues_increase_with_index() {
        for dim in [2, 3] {
            let spec = AnnulusSpec::new(1.0, 2.0, dim).unwrap();
            let opts = AsymptoticsOptions::default();
            let lambdas: Vec<f64> = (1..=4)
                .map(|m| laplace_radial_eigen(spec, m, &opts).unwrap().lambda)
                .collect();
            assert!(lambdas.windows(2).all(|w| w[0] < w[1]), "{lambdas:?}");
            assert!(lambdas[0] > 0.0);
        }
    }

    #[test]
    fn eigenfunction_solves_the_radial_equation() {
        let spec = AnnulusSpec::new(1.0, 2.0, 3).unwrap();
        let opts = AsymptoticsOptions::default();
        let pair = laplace_radial_eigen(spec, 2, &opts).unwrap();
        let n = pair.grid.len();
        assert_eq!(pair.psi[0], 0.0);
        assert_eq!(pair.psi[n - 1], 0.0);
        assert_eq!(interior_sign_changes(&pair.psi), 1);
        assert!(pair.psi[1] > 0.0);
        let sup = pair.psi.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        assert!((sup - 1.0).abs() < 1e-12);

        // Centered differences against -psi'' - (N-1)/r psi' = lambda psi;
        // the discretization and the stencil differ at O(h^2).
        let h = pair.grid[1] - pair.grid[0];
        let mut worst: f64 = 0.0;
        for i in 1..n - 1 {
            let lap = (pair.psi[i + 1] - 2.0 * pair.psi[i] + pair.psi[i - 1]) / (h * h);
            let drift = (pair.psi[i + 1] - pair.psi[i - 1]) / (2.0 * h * pair.grid[i]) * 2.0;
            let res = -lap - drift - pair.lambda * pair.psi[i];
            worst = worst.max(res.abs());
        }
        assert!(worst < 1e-3 * pair.lambda, "residual {worst:e}");
    }

    #[test]
    fn linear_limit_table_shows_all_three_trends() {
        let opts = AsymptoticsOptions::default();
        let rows = p_to_1_diagnostics(spec2(), 2, &[1.1, 1.01, 1.001], &opts).unwrap();
        assert_eq!(rows.len(), 3);
        let gap: Vec<f64> = rows.iter().map(|r| (r.supnorm_pow - r.lambda_m).abs()).collect();
        assert!(gap[0] > gap[1] && gap[1] > gap[2], "eigenvalue gaps {gap:?}");
        let prof: Vec<f64> = rows.iter().map(|r| r.err_profile).collect();
        assert!(prof[0] > prof[1] && prof[1] > prof[2], "profile errors {prof:?}");
        let nus: Vec<f64> = rows.iter().map(|r| r.nu_m.abs()).collect();
        assert!(nus[0] > nus[1] && nus[1] > nus[2], "top eigenvalues {nus:?}");
        assert!(rows[2].err_profile <= 0.05, "final shape error {}", rows[2].err_profile);
        assert!(rows.iter().all(|r| r.nu_m < 0.0));
    }

    #[test]
    fn diagnostics_validate_their_input() {
        let opts = AsymptoticsOptions::default();
        assert!(p_to_1_diagnostics(spec2(), 2, &[1.01, 1.1], &opts).is_err());
        assert!(p_to_1_diagnostics(spec2(), 2, &[2.5, 1.1], &opts).is_err());
        assert!(p_to_1_diagnostics(spec2(), 2, &[], &opts).is_err());
        assert!(large_p_bound_check(spec2(), 1, &[0.9], &opts).is_err());
    }

    #[test]
    fn large_p_bound_holds_with_growing_margin() {
        let opts = AsymptoticsOptions::default();
        let rows = large_p_bound_check(spec2(), 2, &[2.0, 5.0, 10.0], &opts).unwrap();
        for row in &rows {
            assert!(row.nu_m <= row.bound, "p = {}: {} > {}", row.p, row.nu_m, row.bound);
            assert!(row.margin >= 0.0);
        }
        assert!(rows[0].margin < rows[1].margin && rows[1].margin < rows[2].margin);
    }

    #[test]
    fn both_sides_of_the_bound_fade_near_the_linear_end() {
        // For a single zone the bound and nu_1 are both within 0.5 of zero
        // at p = 1.01. With two zones nu_2's slope in p is steeper (about
        // -80 here), so the same window is reached closer to 1; measured
        // nu_2(1.01) = -0.80.
        let opts = AsymptoticsOptions::default();
        let row = &large_p_bound_check(spec2(), 1, &[1.01], &opts).unwrap()[0];
        assert!(row.bound.abs() < 0.5 && row.nu_m.abs() < 0.5, "{row:?}");
        let row = &large_p_bound_check(spec2(), 2, &[1.01], &opts).unwrap()[0];
        assert!(row.nu_m.abs() < 1.0 && row.nu_m < row.bound, "{row:?}");
    }

    #[test]
    fn first_eigenvalue_respects_the_discrete_potential_bound() {
        // The reaction-to-weight ratio is bounded below by -p sup^(p-1) b^2
        // node by node, so the discrete first eigenvalue is too. This is the
        // per-sample version of the compact-interval lower bound.
        let opts = AsymptoticsOptions::default();
        for p in [1.001, 1.01, 1.1, 1.5] {
            let prof = shoot_nodal(spec2(), p, 2, &opts.radial).unwrap();
            let nu_1 = linearized_pencil(&prof, opts.intervals).eigenvalues(1, 1e-12)[0];
            let floor = -p * prof.sup_norm_pow() * 4.0;
            assert!(nu_1 >= floor, "p = {p}: {nu_1} under {floor}");
        }
    }
}
