//! Linearized radial spectrum with the angular-separation weight.
//!
//! Writing perturbations of a radial solution v as phi(r) Y(theta) with Y a
//! spherical harmonic of degree j separates the second variation into radial
//! pencils: phi solves
//!
//! ```text
//! -(r^(N-1) phi')' - p r^(N-1) |v|^(p-1) phi = nu r^(N-3) phi
//! ```
//!
//! with Dirichlet ends, and the mode (phi, Y_j) is a negative direction of
//! the second variation exactly when nu < -j(N-2+j). The weight r^(N-3) on
//! the right is what the angular term scales by, so one pencil slice covers
//! every angular degree at once.
//!
//! Discretization is a flux-form finite volume scheme on a uniform grid:
//! face coefficients r^(N-1)/h, nodal reaction and weight terms. The scheme
//! is symmetrizable by the diagonal weight, and the reduced matrix is Jacobi
//! (negative offdiagonals), which guarantees simple eigenvalues and the
//! Sturm oscillation structure that the tests pin down.

use crate::annulus::AnnulusSpec;
use crate::error::{Error, Result};
use crate::radial::RadialProfile;
use crate::tridiag::SymTridiag;

#[derive(Debug, Clone, Copy)]
pub struct SpectrumOptions {
    /// Grid cells of the discretization.
    pub intervals: usize,
    /// Number of lowest eigenpairs to deliver.
    pub n_eigs: usize,
    /// Eigenvalue bisection tolerance (relative to the spectral scale).
    pub tol: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            intervals: 4096,
            n_eigs: 6,
            tol: 1e-12,
        }
    }
}

/// Self-adjoint pencil A phi = nu B phi on a uniform Dirichlet grid, with
/// A in flux form and B a positive diagonal weight.
pub struct SlPencil {
    /// Full grid including both boundary nodes.
    pub grid: Vec<f64>,
    h: f64,
    /// Face conductances r_(i+1/2)^(N-1) / h, one per cell.
    faces: Vec<f64>,
    /// Nodal reaction h * c(r_i) on interior nodes.
    reaction: Vec<f64>,
    /// Nodal weight h * w(r_i) on interior nodes.
    bdiag: Vec<f64>,
}

impl SlPencil {
    /// Assemble the pencil for the operator -(r^(N-1) u')' + c(r) u against
    /// the weight w(r), both given pointwise.
    pub fn assemble(
        spec: AnnulusSpec,
        intervals: usize,
        c: impl Fn(f64) -> f64,
        w: impl Fn(f64) -> f64,
    ) -> Self {
        assert!(intervals >= 4);
        let grid = spec.uniform_grid(intervals);
        let h = (spec.outer - spec.inner) / intervals as f64;
        let nm1 = (spec.dim - 1) as f64;
        let faces: Vec<f64> = (0..intervals)
            .map(|i| (spec.inner + (i as f64 + 0.5) * h).powf(nm1) / h)
            .collect();
        let reaction: Vec<f64> = grid[1..intervals].iter().map(|&r| h * c(r)).collect();
        let bdiag: Vec<f64> = grid[1..intervals].iter().map(|&r| h * w(r)).collect();
        SlPencil { grid, h, faces, reaction, bdiag }
    }

    fn interior(&self) -> usize {
        self.grid.len() - 2
    }

    /// Symmetric reduction C = B^(-1/2) A B^(-1/2).
    fn reduced(&self) -> SymTridiag {
        let n = self.interior();
        let mut diag = Vec::with_capacity(n);
        let mut off = Vec::with_capacity(n - 1);
        for i in 0..n {
            let a_ii = self.faces[i] + self.faces[i + 1] + self.reaction[i];
            diag.push(a_ii / self.bdiag[i]);
            if i + 1 < n {
                off.push(-self.faces[i + 1] / (self.bdiag[i] * self.bdiag[i + 1]).sqrt());
            }
        }
        SymTridiag::new(diag, off)
    }

    /// The k smallest pencil eigenvalues, ascending.
    pub fn eigenvalues(&self, k: usize, tol: f64) -> Vec<f64> {
        let sym = self.reduced();
        (0..k).map(|l| sym.eigenvalue(l, tol)).collect()
    }

    /// The k smallest eigenpairs; vectors are on the full grid with boundary
    /// zeros, sup-normalized, first interior value positive.
    pub fn eigenpairs(&self, k: usize, tol: f64) -> Result<Vec<(f64, Vec<f64>)>> {
        let sym = self.reduced();
        let pairs = sym.eigen_smallest(k, tol)?;
        let n = self.interior();
        let mut out = Vec::with_capacity(k);
        for (nu, psi) in pairs {
            let mut phi = Vec::with_capacity(n + 2);
            phi.push(0.0);
            for i in 0..n {
                phi.push(psi[i] / self.bdiag[i].sqrt());
            }
            phi.push(0.0);
            let sup = phi.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if sup == 0.0 {
                return Err(Error::InconsistentSpectrum("zero eigenvector".into()));
            }
            let sign = if phi[1] < 0.0 { -1.0 } else { 1.0 };
            for v in phi.iter_mut() {
                *v *= sign / sup;
            }
            out.push((nu, phi));
        }
        Ok(out)
    }

    /// Discrete Rayleigh quotient of a full-grid test function vanishing at
    /// both boundary nodes. Exact (to round-off) on discrete eigenvectors.
    pub fn rayleigh(&self, phi: &[f64]) -> Result<f64> {
        let n = self.interior();
        assert_eq!(phi.len(), n + 2);
        let mut num = 0.0;
        for i in 0..=n {
            let d = phi[i + 1] - phi[i];
            num += self.faces[i] * d * d;
        }
        let mut den = 0.0;
        for i in 0..n {
            num += self.reaction[i] * phi[i + 1] * phi[i + 1];
            den += self.bdiag[i] * phi[i + 1] * phi[i + 1];
        }
        if den <= 0.0 || !den.is_finite() {
            return Err(Error::NullTestFunction);
        }
        Ok(num / den)
    }

    /// Cell width of the discretization.
    pub fn cell_width(&self) -> f64 {
        self.h
    }
}

/// Pencil of the operator linearized at a nodal profile, weighted for the
/// angular separation: c = -p r^(N-1) |v|^(p-1), w = r^(N-3).
pub fn linearized_pencil(profile: &RadialProfile, intervals: usize) -> SlPencil {
    let spec = profile.spec;
    let p = profile.p;
    let sup_pow = profile.sup_norm_pow();
    let shape = profile.shape();
    let nm1 = (spec.dim - 1) as f64;
    let nm3 = spec.dim as f64 - 3.0;
    SlPencil::assemble(
        spec,
        intervals,
        move |r| -p * sup_pow * r.powf(nm1) * shape.value(r).abs().powf(p - 1.0),
        move |r| r.powf(nm3),
    )
}

/// Dirichlet pencil of the plain radial Laplacian: c = 0, w = r^(N-1).
pub fn laplace_pencil(spec: AnnulusSpec, intervals: usize) -> SlPencil {
    let nm1 = (spec.dim - 1) as f64;
    SlPencil::assemble(spec, intervals, |_r| 0.0, move |r| r.powf(nm1))
}

/// One eigenmode of the linearized pencil.
#[derive(Debug, Clone)]
pub struct EigenMode {
    pub nu: f64,
    /// Full-grid eigenfunction, sup-normalized with positive inner slope.
    pub phi: Vec<f64>,
    pub sign_changes: usize,
}

/// The lowest slice of the linearized spectrum at a nodal profile.
#[derive(Debug, Clone)]
pub struct SpectrumSlice {
    pub spec: AnnulusSpec,
    pub p: f64,
    pub zones: usize,
    pub grid: Vec<f64>,
    pub modes: Vec<EigenMode>,
}

impl SpectrumSlice {
    /// Eigenvalues below the given threshold.
    pub fn count_below(&self, threshold: f64) -> usize {
        self.modes.iter().filter(|m| m.nu < threshold).count()
    }

    pub fn nus(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.nu).collect()
    }
}

/// Compute the lowest eigenmodes of the linearized pencil at a profile.
pub fn mode_slice(profile: &RadialProfile, opts: &SpectrumOptions) -> Result<SpectrumSlice> {
    let pencil = linearized_pencil(profile, opts.intervals);
    let pairs = pencil.eigenpairs(opts.n_eigs, opts.tol)?;
    let mut modes = Vec::with_capacity(pairs.len());
    for (l, (nu, phi)) in pairs.into_iter().enumerate() {
        let sign_changes = interior_sign_changes(&phi);
        // Sturm oscillation: the l-th mode of a Jacobi reduction must flip
        // sign exactly l times; anything else means the solve went wrong.
        if sign_changes != l {
            return Err(Error::InconsistentSpectrum(format!(
                "mode {l} has {sign_changes} sign changes"
            )));
        }
        modes.push(EigenMode { nu, phi, sign_changes });
    }
    Ok(SpectrumSlice {
        spec: profile.spec,
        p: profile.p,
        zones: profile.zones,
        grid: pencil.grid,
        modes,
    })
}

pub(crate) fn interior_sign_changes(values: &[f64]) -> usize {
    let mut flips = 0;
    let mut prev = 0.0f64;
    for &v in values {
        if v != 0.0 {
            if prev != 0.0 && prev * v < 0.0 {
                flips += 1;
            }
            prev = v;
        }
    }
    flips
}

/// Zero counts of the two classical comparison functions built from the
/// profile: z = r v' + 2/(p-1) v (scaling direction) and zeta = v' (slope).
/// For an m-zone profile z changes sign exactly m times inside the annulus
/// and zeta at least m times.
#[derive(Debug, Clone)]
pub struct AuxiliaryCounts {
    pub z_sign_changes: usize,
    pub zeta_sign_changes: usize,
}

pub fn auxiliary_zero_counts(profile: &RadialProfile) -> AuxiliaryCounts {
    let two_over = 2.0 / (profile.p - 1.0);
    let n = profile.grid.len();
    // Skip the boundary nodes: z(a) and z(b) are slope multiples, and the
    // counts concern the open interval.
    let z: Vec<f64> = (1..n - 1)
        .map(|i| profile.grid[i] * profile.slopes[i] + two_over * profile.values[i])
        .collect();
    let zeta: Vec<f64> = profile.slopes[1..n - 1].to_vec();
    AuxiliaryCounts {
        z_sign_changes: interior_sign_changes(&z),
        zeta_sign_changes: interior_sign_changes(&zeta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{shoot_nodal, RadialOptions};

    /// In 3 dimensions the radial Dirichlet Laplacian on (a, b) has the
    /// exact eigenfunctions sin(k pi (r-a)/(b-a)) / r, eigenvalue (k pi /
    /// (b-a))^2, independent of a. This pins the pencil assembly.
    #[test]
    fn laplace_pencil_matches_exact_3d_spectrum() {
        let spec = AnnulusSpec::new(1.0, 2.0, 3).unwrap();
        let pencil = laplace_pencil(spec, 2048);
        let pairs = pencil.eigenpairs(3, 1e-12).unwrap();
        for (k, (lam, phi)) in pairs.iter().enumerate() {
            let exact = ((k + 1) as f64 * std::f64::consts::PI).powi(2);
            let rel = (lam - exact).abs() / exact;
            assert!(rel < 1e-5, "eigenvalue {k}: rel error {rel:e}");
            // Compare against the exact mode, sup-normalized.
            let reference: Vec<f64> = pencil
                .grid
                .iter()
                .map(|&r| ((k + 1) as f64 * std::f64::consts::PI * (r - 1.0)).sin() / r)
                .collect();
            let sup = reference.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let mut worst = 0.0f64;
            for (a, b) in phi.iter().zip(&reference) {
                worst = worst.max((a - b / sup).abs());
            }
            assert!(worst < 2e-5, "mode {k} shape error {worst:e}");
        }
    }

    #[test]
    fn laplace_pencil_converges_at_second_order() {
        let spec = AnnulusSpec::new(1.0, 2.0, 3).unwrap();
        let exact = std::f64::consts::PI.powi(2);
        let err = |k: usize| {
            let pencil = laplace_pencil(spec, k);
            (pencil.eigenvalues(1, 1e-13)[0] - exact).abs()
        };
        let ratio = err(256) / err(512);
        assert!(
            (3.5..4.5).contains(&ratio),
            "expected second order, got ratio {ratio}"
        );
    }

    #[test]
    fn rayleigh_is_exact_on_discrete_eigenvectors() {
        let spec = AnnulusSpec::new(1.0, 2.0, 2).unwrap();
        let prof = shoot_nodal(spec, 3.0, 2, &RadialOptions::default()).unwrap();
        let pencil = linearized_pencil(&prof, 1024);
        let pairs = pencil.eigenpairs(4, 1e-12).unwrap();
        for (nu, phi) in &pairs {
            let r = pencil.rayleigh(phi).unwrap();
            let scale = nu.abs().max(1.0);
            assert!(
                (r - nu).abs() < 1e-9 * scale,
                "rayleigh {r} vs eigenvalue {nu}"
            );
        }
    }

    #[test]
    fn rayleigh_rejects_null_functions() {
        let spec = AnnulusSpec::new(1.0, 2.0, 2).unwrap();
        let pencil = laplace_pencil(spec, 64);
        let zero = vec![0.0; pencil.grid.len()];
        assert!(matches!(
            pencil.rayleigh(&zero),
            Err(Error::NullTestFunction)
        ));
    }

    #[test]
    fn two_zone_slice_has_expected_negative_structure() {
        // An m-zone profile carries exactly m negative pencil eigenvalues;
        // the first m-1 sit strictly below -(N-1) for every exponent, while
        // the m-th is merely negative (it dives below the edge as p grows).
        let spec = AnnulusSpec::new(1.0, 2.0, 2).unwrap();
        let prof = shoot_nodal(spec, 3.0, 2, &RadialOptions::default()).unwrap();
        let slice = mode_slice(&prof, &SpectrumOptions::default()).unwrap();
        let nus = slice.nus();
        assert_eq!(slice.count_below(0.0), 2, "negatives in {nus:?}");
        let edge = -(spec.dim as f64 - 1.0);
        assert!(nus[0] < edge, "nu_1 = {} not below {edge}", nus[0]);
        assert!(nus[1] < 0.0, "nu_2 = {}", nus[1]);
        assert!(nus[0] < nus[1], "ordering in {nus:?}");
        assert!(nus[2] > 0.0, "nu_3 = {}", nus[2]);
    }

    #[test]
    fn three_zone_slice_in_3d_keeps_the_pattern() {
        let spec = AnnulusSpec::new(1.0, 2.0, 3).unwrap();
        let prof = shoot_nodal(spec, 2.5, 3, &RadialOptions::default()).unwrap();
        let slice = mode_slice(&prof, &SpectrumOptions::default()).unwrap();
        let nus = slice.nus();
        assert_eq!(slice.count_below(0.0), 3, "negatives in {nus:?}");
        let edge = -(spec.dim as f64 - 1.0);
        assert!(nus[0] < edge && nus[1] < edge, "edge gap in {nus:?}");
        assert!(nus[2] < 0.0 && nus[3] > 0.0, "tail of {nus:?}");
    }

    #[test]
    fn modes_oscillate_like_their_index() {
        let spec = AnnulusSpec::new(1.0, 2.0, 2).unwrap();
        let prof = shoot_nodal(spec, 3.0, 3, &RadialOptions::default()).unwrap();
        let slice = mode_slice(&prof, &SpectrumOptions::default()).unwrap();
        for (l, mode) in slice.modes.iter().enumerate() {
            assert_eq!(mode.sign_changes, l);
            assert!(mode.phi[1] > 0.0, "inner slope sign of mode {l}");
        }
    }

    #[test]
    fn zone_restrictions_are_negative_directions() {
        // Each single-zone restriction of the profile, extended by zero, is
        // a test function with strictly negative Rayleigh quotient, giving
        // the lower bound count >= zones without any eigensolve.
        let spec = AnnulusSpec::new(1.0, 2.0, 2).unwrap();
        let prof = shoot_nodal(spec, 3.0, 3, &RadialOptions::default()).unwrap();
        let pencil = linearized_pencil(&prof, 2048);
        let shape = prof.shape();
        for zone in 0..3 {
            let (lo, hi) = prof.zone_bounds(zone);
            let phi: Vec<f64> = pencil
                .grid
                .iter()
                .map(|&r| {
                    if r > lo && r < hi {
                        shape.value(r)
                    } else {
                        0.0
                    }
                })
                .collect();
            let quotient = pencil.rayleigh(&phi).unwrap();
            assert!(quotient < 0.0, "zone {zone} quotient {quotient}");
        }
    }

    #[test]
    fn zone_restriction_quotient_matches_continuum_identity() {
        // With v restricted to one zone, the numerator collapses by the
        // zone's constraint identity to (1-p) * power integral, so the
        // quotient must equal (1-p) * P / W with W the weighted L2 norm.
        let spec = AnnulusSpec::new(1.0, 2.0, 2).unwrap();
        let prof = shoot_nodal(spec, 3.0, 2, &RadialOptions::default()).unwrap();
        let pencil = linearized_pencil(&prof, 4096);
        let shape = prof.shape();
        let nm1 = (spec.dim - 1) as f64;
        let nm3 = spec.dim as f64 - 3.0;
        let p = prof.p;
        let sup_pow = prof.sup_norm_pow();
        for zone in 0..2 {
            let (lo, hi) = prof.zone_bounds(zone);
            let phi: Vec<f64> = pencil
                .grid
                .iter()
                .map(|&r| if r > lo && r < hi { shape.value(r) } else { 0.0 })
                .collect();
            let got = pencil.rayleigh(&phi).unwrap();
            let power = sup_pow
                * shape.integrate(lo, hi, |r, v, _| r.powf(nm1) * v.abs().powf(p + 1.0));
            let weighted = shape.integrate(lo, hi, |r, v, _| r.powf(nm3) * v * v);
            let expect = (1.0 - p) * power / weighted;
            let rel = ((got - expect) / expect).abs();
            assert!(rel < 1e-3, "zone {zone}: {got} vs {expect} (rel {rel:e})");
        }
    }

    #[test]
    fn comparison_functions_count_zeros_as_predicted() {
        let spec = AnnulusSpec::new(1.0, 2.0, 2).unwrap();
        for m in 1..=3usize {
            let prof = shoot_nodal(spec, 3.0, m, &RadialOptions::default()).unwrap();
            let counts = auxiliary_zero_counts(&prof);
            assert_eq!(counts.z_sign_changes, m, "z for m={m}");
            assert!(counts.zeta_sign_changes >= m, "zeta for m={m}");
        }
    }
}
