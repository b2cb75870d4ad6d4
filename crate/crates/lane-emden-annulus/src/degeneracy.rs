//! Crossing exponents and Morse index bookkeeping.
//!
//! As p grows, the linearized eigenvalues nu_l(p) drift downward. Whenever
//! one meets a harmonic level -j(N-2+j) the radial profile picks up a kernel
//! direction of angular order j, and its Morse index jumps by the dimension
//! of that harmonic space. This module traces the curves p -> nu_l(p),
//! brackets and refines the crossings, and evaluates the index formula
//!
//! ```text
//! index(p) = sum_l sum_{0 <= j < J_l(p)} mult(N, j),
//! J_l(p) = (sqrt((N-2)^2 - 4 nu_l(p)) - (N-2)) / 2.
//! ```
//!
//! Only the top eigenvalue nu_m can meet the j = 1 level -(N-1); the lower
//! ones stay strictly below it for every exponent, so (l, j) pairs with
//! l < m are scanned for j >= 2 only.

use crate::annulus::{validate_zones, AnnulusSpec};
use crate::error::{Error, Result};
use crate::radial::{shoot_nodal_hinted, RadialOptions};
use crate::spectrum::{linearized_pencil, SpectrumSlice};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct DegeneracyOptions {
    /// Coarse samples of the base scan grid, geometric in p - 1.
    pub samples: usize,
    /// Bisection stops once the bracket width is below p_tol * max(1, p).
    pub p_tol: f64,
    /// Crossings closer than this in p are flagged, not merged.
    pub collision_gap: f64,
    /// Double the sample grid until the crossing count repeats twice.
    pub stabilize: bool,
    pub max_doublings: usize,
    /// Discretization cells of the eigenvalue pencil.
    pub intervals: usize,
    /// Eigenvalue bisection tolerance, relative to the spectral scale.
    pub eigen_tol: f64,
    pub radial: RadialOptions,
}

impl Default for DegeneracyOptions {
    fn default() -> Self {
        DegeneracyOptions {
            samples: 64,
            p_tol: 1e-10,
            collision_gap: 1e-6,
            stabilize: false,
            max_doublings: 4,
            intervals: 4096,
            eigen_tol: 1e-12,
            radial: RadialOptions::default(),
        }
    }
}

/// A root of nu_l(p) = -j(N-2+j).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct DegeneracyPoint {
    /// Crossing exponent.
    pub p: f64,
    /// Eigenvalue index, 1-based.
    pub l: usize,
    /// Angular harmonic order.
    pub j: u32,
    /// The level -j(N-2+j) that was crossed.
    pub target: f64,
    /// |nu_l(p) - target| at the refined exponent.
    pub residual: f64,
    /// Another crossing sits within the collision gap.
    pub near_collision: bool,
}

/// Outcome of a crossing scan over a p interval.
#[derive(Debug, Clone)]
pub struct DegeneracyScan {
    /// All refined crossings, sorted by exponent.
    pub points: Vec<DegeneracyPoint>,
    /// Levels that admit no bracket inside the scanned range.
    pub warnings: Vec<String>,
    /// Final sample grid (after any stabilizing refinements).
    pub grid: Vec<f64>,
    /// Eigenvalues nu_1..nu_m at each grid exponent, for curve plots.
    pub nu_samples: Vec<Vec<f64>>,
    /// Bracketed sign changes per refinement level; a stable tail means the
    /// grid resolves every crossing in range.
    pub crossing_counts: Vec<usize>,
}

/// Morse index of a radial profile via the harmonic multiplicity sum.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MorseReport {
    pub p: f64,
    /// J_l(p) for l = 1..m, each positive.
    pub j_values: Vec<f64>,
    pub morse_index: u64,
    /// (m-1)(N+1) + 1; the index never falls below this.
    pub lower_bound: u64,
    /// Some J_l sits within 1e-9 of an integer: p is at or near a crossing
    /// and the boundary term was excluded from the sum.
    pub degenerate_boundary: bool,
}

/// The level crossed by angular order j in dimension `dim`.
pub fn harmonic_level(dim: u32, j: u32) -> f64 {
    -(j as f64) * (dim as f64 - 2.0 + j as f64)
}

/// Dimension of the degree-j spherical harmonic space on S^(N-1), exact.
pub fn spherical_multiplicity(dim: u32, j: u32) -> u64 {
    assert!(dim >= 2, "ambient dimension");
    if j == 0 {
        return 1;
    }
    if dim == 2 {
        // cos(j theta), sin(j theta).
        return 2;
    }
    let n = dim as u128;
    let jj = j as u128;
    let num = (n + 2 * jj - 2) * binomial(n + jj - 3, jj);
    debug_assert_eq!(num % (n - 2), 0);
    (num / (n - 2)) as u64
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // Stays integral at every step: acc holds C(n-k+i, i) after step i.
        acc = acc * (n - k + i) / i;
    }
    acc
}

/// (l, j) pairs whose crossing is possible: j = 1 only for the top index.
pub fn admissible_pairs(zones: usize, j_max: u32) -> Vec<(usize, u32)> {
    let mut pairs = Vec::new();
    for l in 1..=zones {
        for j in 1..=j_max {
            if j >= 2 || l == zones {
                pairs.push((l, j));
            }
        }
    }
    pairs
}

/// Sample grid over (lo, hi), geometric in p - 1 so the near-linear end is
/// resolved as finely as the large-p tail.
pub fn geometric_grid(p_range: (f64, f64), samples: usize) -> Vec<f64> {
    let (lo, hi) = p_range;
    assert!(lo > 1.0 && hi > lo && samples >= 2);
    let (llo, lhi) = ((lo - 1.0).ln(), (hi - 1.0).ln());
    let mut grid: Vec<f64> = (0..samples)
        .map(|i| {
            let t = i as f64 / (samples - 1) as f64;
            1.0 + (llo + t * (lhi - llo)).exp()
        })
        .collect();
    grid[0] = lo;
    *grid.last_mut().unwrap() = hi;
    grid
}

fn nus_at(
    spec: AnnulusSpec,
    m: usize,
    p: f64,
    n_eigs: usize,
    opts: &DegeneracyOptions,
    hint: Option<f64>,
) -> Result<(f64, Vec<f64>)> {
    let (kappa, prof) = shoot_nodal_hinted(spec, p, m, &opts.radial, hint)?;
    let pencil = linearized_pencil(&prof, opts.intervals);
    Ok((kappa, pencil.eigenvalues(n_eigs, opts.eigen_tol)))
}

/// Sample the curve p -> nu_l(p) on the given exponents (l is 1-based).
/// Samples are independent solves; failures carry the offending exponent.
pub fn nu_curve(
    spec: AnnulusSpec,
    m: usize,
    l: usize,
    p_grid: &[f64],
) -> Result<Vec<f64>> {
    nu_curve_with(spec, m, l, p_grid, &DegeneracyOptions::default())
}

pub fn nu_curve_with(
    spec: AnnulusSpec,
    m: usize,
    l: usize,
    p_grid: &[f64],
    opts: &DegeneracyOptions,
) -> Result<Vec<f64>> {
    validate_zones(m)?;
    if l == 0 || l > m {
        return Err(Error::invalid(format!(
            "eigenvalue index {l} outside 1..={m}"
        )));
    }
    if p_grid.windows(2).any(|w| w[0] >= w[1]) || p_grid.iter().any(|&p| p <= 1.0) {
        return Err(Error::invalid("exponent grid must be increasing and > 1"));
    }
    let sampled: Vec<Result<f64>> = p_grid
        .par_iter()
        .map(|&p| {
            nus_at(spec, m, p, l, opts, None)
                .map(|(_, nus)| nus[l - 1])
                .map_err(|e| Error::at_exponent(p, e))
        })
        .collect();
    // Surface the leftmost failure regardless of scheduling order.
    sampled.into_iter().collect()
}

/// Scan for all admissible crossings of nu_l(p) with the harmonic levels up
/// to j_max over the given exponent range.
pub fn find_degeneracies(
    spec: AnnulusSpec,
    m: usize,
    p_range: (f64, f64),
    j_max: u32,
    opts: &DegeneracyOptions,
) -> Result<DegeneracyScan> {
    validate_zones(m)?;
    if !(p_range.0 > 1.0 && p_range.1 > p_range.0) {
        return Err(Error::invalid("exponent range must satisfy 1 < lo < hi"));
    }
    if j_max < 1 {
        return Err(Error::invalid("need at least one harmonic order"));
    }
    let pairs = admissible_pairs(m, j_max);

    // Coarse sweep, chaining the shooting coefficient as a warm start from
    // one exponent to the next.
    let mut grid = geometric_grid(p_range, opts.samples.max(2));
    let mut curves = sweep(spec, m, &grid, opts)?;
    let mut crossing_counts = vec![count_crossings(spec.dim, &pairs, &grid, &curves)];

    if opts.stabilize {
        for _ in 0..opts.max_doublings {
            refine_sweep(spec, m, &mut grid, &mut curves, opts)?;
            crossing_counts.push(count_crossings(spec.dim, &pairs, &grid, &curves));
            let n = crossing_counts.len();
            if n >= 3
                && crossing_counts[n - 1] == crossing_counts[n - 2]
                && crossing_counts[n - 2] == crossing_counts[n - 3]
            {
                break;
            }
        }
    }

    let mut points = Vec::new();
    let mut warnings = Vec::new();
    for &(l, j) in &pairs {
        let target = harmonic_level(spec.dim, j);
        let g: Vec<f64> = curves.iter().map(|nus| nus[l - 1] - target).collect();
        let mut found = false;
        for i in 0..grid.len() {
            if g[i] == 0.0 {
                // Exactly on a sample node; the windows beside it see no
                // strict sign product and would miss it.
                points.push(DegeneracyPoint {
                    p: grid[i],
                    l,
                    j,
                    target,
                    residual: 0.0,
                    near_collision: false,
                });
                found = true;
            }
        }
        for i in 0..grid.len() - 1 {
            if g[i] * g[i + 1] < 0.0 {
                let pt = refine_crossing(spec, m, l, target, (grid[i], grid[i + 1]), opts)?;
                points.push(DegeneracyPoint {
                    p: pt.0,
                    l,
                    j,
                    target,
                    residual: pt.1,
                    near_collision: false,
                });
                found = true;
            }
        }
        if !found {
            let side = if g.iter().all(|&v| v > 0.0) {
                "stays above"
            } else if g.iter().all(|&v| v < 0.0) {
                "stays below"
            } else {
                "straddles but never brackets"
            };
            warnings.push(format!(
                "nu_{l} {side} level {target} (j = {j}) on [{}, {}]; widen the range to locate it",
                p_range.0, p_range.1
            ));
        }
    }

    points.sort_by(|a, b| a.p.total_cmp(&b.p).then(a.l.cmp(&b.l)).then(a.j.cmp(&b.j)));
    for i in 1..points.len() {
        if points[i].p - points[i - 1].p < opts.collision_gap {
            points[i].near_collision = true;
            points[i - 1].near_collision = true;
        }
    }
    Ok(DegeneracyScan {
        points,
        warnings,
        grid,
        nu_samples: curves,
        crossing_counts,
    })
}

fn sweep(
    spec: AnnulusSpec,
    m: usize,
    grid: &[f64],
    opts: &DegeneracyOptions,
) -> Result<Vec<Vec<f64>>> {
    let mut curves = Vec::with_capacity(grid.len());
    let mut hint = None;
    for &p in grid {
        let (kappa, nus) =
            nus_at(spec, m, p, m, opts, hint).map_err(|e| Error::at_exponent(p, e))?;
        hint = Some(kappa);
        curves.push(nus);
    }
    Ok(curves)
}

/// Insert geometric midpoints (in p - 1) between existing samples, solving
/// only the new exponents.
fn refine_sweep(
    spec: AnnulusSpec,
    m: usize,
    grid: &mut Vec<f64>,
    curves: &mut Vec<Vec<f64>>,
    opts: &DegeneracyOptions,
) -> Result<()> {
    let mut new_grid = Vec::with_capacity(2 * grid.len() - 1);
    let mut new_curves = Vec::with_capacity(2 * grid.len() - 1);
    for i in 0..grid.len() - 1 {
        new_grid.push(grid[i]);
        new_curves.push(curves[i].clone());
        let mid = 1.0 + ((grid[i] - 1.0) * (grid[i + 1] - 1.0)).sqrt();
        let (_, nus) = nus_at(spec, m, mid, m, opts, None).map_err(|e| Error::at_exponent(mid, e))?;
        new_grid.push(mid);
        new_curves.push(nus);
    }
    new_grid.push(*grid.last().unwrap());
    new_curves.push(curves.last().unwrap().clone());
    *grid = new_grid;
    *curves = new_curves;
    Ok(())
}

fn count_crossings(
    dim: u32,
    pairs: &[(usize, u32)],
    grid: &[f64],
    curves: &[Vec<f64>],
) -> usize {
    let mut count = 0;
    for &(l, j) in pairs {
        let target = harmonic_level(dim, j);
        for i in 0..grid.len() - 1 {
            let (ga, gb) = (curves[i][l - 1] - target, curves[i + 1][l - 1] - target);
            if ga * gb < 0.0 || ga == 0.0 {
                count += 1;
            }
        }
        if curves[grid.len() - 1][l - 1] == target {
            count += 1;
        }
    }
    count
}

/// Bisect nu_l(p) - target inside a bracketing window. The curve is locally
/// analytic, so plain bisection on a true bracket cannot stall; bisection is
/// preferred over Newton because each evaluation is a full solve and no
/// derivative is available.
fn refine_crossing(
    spec: AnnulusSpec,
    m: usize,
    l: usize,
    target: f64,
    window: (f64, f64),
    opts: &DegeneracyOptions,
) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = window;
    let eval = |p: f64, hint: Option<f64>| -> Result<(f64, f64)> {
        let (kappa, nus) = nus_at(spec, m, p, l, opts, hint).map_err(|e| Error::at_exponent(p, e))?;
        Ok((kappa, nus[l - 1] - target))
    };
    let (mut hint, mut g_lo) = eval(lo, None)?;
    let tol = |p: f64| opts.p_tol * p.abs().max(1.0);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        if hi - lo <= tol(mid) || mid <= lo || mid >= hi {
            break;
        }
        let (k, g) = eval(mid, Some(hint))?;
        hint = k;
        if g == 0.0 {
            return Ok((mid, 0.0));
        }
        if g_lo * g < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            g_lo = g;
        }
    }
    // Report the residual at the exponent actually returned.
    let (_, g) = eval(mid, Some(hint))?;
    Ok((mid, g.abs()))
}

/// Evaluate the index formula from the leading eigenvalues of a slice.
pub fn morse_index(slice: &SpectrumSlice) -> Result<MorseReport> {
    let nus = slice.nus();
    morse_from_nus(slice.spec.dim, slice.p, slice.zones, &nus)
}

/// Index report straight from (spec, p, m) without eigenvectors; used by
/// sweeps that only need the eigenvalue slice.
pub fn morse_index_at(
    spec: AnnulusSpec,
    m: usize,
    p: f64,
    opts: &DegeneracyOptions,
) -> Result<MorseReport> {
    let (_, nus) = nus_at(spec, m, p, m, opts, None).map_err(|e| Error::at_exponent(p, e))?;
    morse_from_nus(spec.dim, p, m, &nus)
}

fn morse_from_nus(dim: u32, p: f64, zones: usize, nus: &[f64]) -> Result<MorseReport> {
    if nus.len() < zones || nus[..zones].iter().any(|&nu| nu >= 0.0) {
        return Err(Error::InconsistentSpectrum(format!(
            "need {zones} negative eigenvalues, got {:?}",
            &nus[..nus.len().min(zones)]
        )));
    }
    let mut boundary = false;
    let mut j_values = Vec::with_capacity(zones);
    let mut index: u64 = 0;
    let n2 = dim as f64 - 2.0;
    for &nu in &nus[..zones] {
        let jl = 0.5 * ((n2 * n2 - 4.0 * nu).sqrt() - n2);
        j_values.push(jl);
        // Count harmonic orders strictly below J_l. When J_l sits on an
        // integer (to 1e-9) the boundary term is excluded and flagged.
        let rounded = jl.round();
        let terms = if (jl - rounded).abs() <= 1e-9 {
            boundary = true;
            rounded as u32
        } else {
            jl.floor() as u32 + 1
        };
        for j in 0..terms {
            index += spherical_multiplicity(dim, j);
        }
    }
    let lower_bound = (zones as u64 - 1) * (dim as u64 + 1) + 1;
    Ok(MorseReport {
        p,
        j_values,
        morse_index: index,
        lower_bound,
        degenerate_boundary: boundary,
    })
}
