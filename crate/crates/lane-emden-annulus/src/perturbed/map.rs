//! Radially directed boundary deformations and their pullback tensors.
//!
//! The deformed domain is the image of the annulus under x -> x + t sigma(x)
//! with sigma = f(r, theta) x/|x| and f interpolating two boundary trig
//! polynomials linearly in r. Because the displacement is radial, the map
//! sends the ray at angle theta to itself and its differential, written in
//! the orthonormal polar frames of source and target, is upper triangular:
//!
//! ```text
//! F = [ 1 + t f_r   t f_theta / r ]
//!     [ 0           1 + t f / r   ]
//! ```
//!
//! Rotations drop out of det J and of M = det J * J^-1 J^-T, so the whole
//! variational pullback is assembled from F alone.

use crate::annulus::AnnulusSpec;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// One harmonic of a boundary displacement: c cos(k theta) + d sin(k theta).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FourierTerm {
    pub k: u32,
    pub c: f64,
    pub d: f64,
}

/// Trig-polynomial displacements of the two boundary circles.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DeformationSpec {
    pub inner: Vec<FourierTerm>,
    pub outer: Vec<FourierTerm>,
}

fn trig_eval(terms: &[FourierTerm], theta: f64) -> (f64, f64) {
    let mut value = 0.0;
    let mut slope = 0.0;
    for t in terms {
        let k = t.k as f64;
        let (s, c) = (k * theta).sin_cos();
        value += t.c * c + t.d * s;
        slope += k * (t.d * c - t.c * s);
    }
    (value, slope)
}

impl DeformationSpec {
    /// Single outer-boundary harmonic, the workhorse configuration.
    pub fn one_mode_outer(k: u32, amplitude: f64) -> Self {
        DeformationSpec {
            inner: Vec::new(),
            outer: vec![FourierTerm { k, c: amplitude, d: 0.0 }],
        }
    }

    /// Pure dilation x -> (1 + t) x of the annulus (a, b).
    pub fn dilation(spec: AnnulusSpec) -> Self {
        DeformationSpec {
            inner: vec![FourierTerm { k: 0, c: spec.inner, d: 0.0 }],
            outer: vec![FourierTerm { k: 0, c: spec.outer, d: 0.0 }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self
            .inner
            .iter()
            .chain(&self.outer)
            .all(|t| t.c.is_finite() && t.d.is_finite());
        if !finite {
            return Err(Error::invalid("deformation coefficients must be finite"));
        }
        Ok(())
    }

    /// Displacement magnitude f(r, theta).
    pub fn displacement(&self, spec: AnnulusSpec, r: f64, theta: f64) -> f64 {
        let (fi, _) = trig_eval(&self.inner, theta);
        let (fo, _) = trig_eval(&self.outer, theta);
        let s = (r - spec.inner) / (spec.outer - spec.inner);
        fi * (1.0 - s) + fo * s
    }

    /// (f_r, f_theta) by the analytic derivatives of the interpolation.
    pub fn displacement_gradient(&self, spec: AnnulusSpec, r: f64, theta: f64) -> (f64, f64) {
        let (fi, di) = trig_eval(&self.inner, theta);
        let (fo, dor) = trig_eval(&self.outer, theta);
        let width = spec.outer - spec.inner;
        let s = (r - spec.inner) / width;
        ((fo - fi) / width, di * (1.0 - s) + dor * s)
    }

    /// Frame Jacobian of x + t sigma at (r, theta).
    pub fn frame_jacobian(&self, spec: AnnulusSpec, r: f64, theta: f64, t: f64) -> FrameJacobian {
        let f = self.displacement(spec, r, theta);
        let (fr, ft) = self.displacement_gradient(spec, r, theta);
        FrameJacobian {
            alpha: 1.0 + t * fr,
            beta: t * ft / r,
            gamma: 1.0 + t * f / r,
        }
    }

    /// The same deformation advanced by a rigid rotation: the boundary
    /// displacements become theta -> f(theta - angle).
    pub fn rotated(&self, angle: f64) -> Self {
        let rot = |terms: &[FourierTerm]| -> Vec<FourierTerm> {
            terms
                .iter()
                .map(|t| {
                    let (s, c) = (t.k as f64 * angle).sin_cos();
                    FourierTerm {
                        k: t.k,
                        c: t.c * c - t.d * s,
                        d: t.d * c + t.c * s,
                    }
                })
                .collect()
        };
        DeformationSpec { inner: rot(&self.inner), outer: rot(&self.outer) }
    }
}

/// Differential of the deformation in the rotated orthonormal frames.
#[derive(Debug, Clone, Copy)]
pub struct FrameJacobian {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl FrameJacobian {
    pub fn det(&self) -> f64 {
        self.alpha * self.gamma
    }

    /// Pullback tensor M = det J * J^-1 J^-T in the polar frame, returned
    /// as (m_rr, m_rt, m_tt).
    pub fn pullback(&self) -> (f64, f64, f64) {
        let FrameJacobian { alpha, beta, gamma } = *self;
        (
            gamma / alpha + beta * beta / (alpha * gamma),
            -beta / gamma,
            alpha / gamma,
        )
    }
}

/// Tensor grid on the annulus: uniform radii, equispaced periodic angles.
#[derive(Debug, Clone)]
pub struct PolarGrid {
    pub spec: AnnulusSpec,
    /// Radial intervals; radii has n_r + 1 nodes, the two end lines Dirichlet.
    pub n_r: usize,
    /// Angular nodes, even; the angle axis wraps.
    pub n_theta: usize,
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
}

impl PolarGrid {
    pub fn new(spec: AnnulusSpec, n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r < 16 {
            return Err(Error::invalid("need at least 16 radial intervals"));
        }
        if n_theta < 8 || n_theta % 2 != 0 {
            return Err(Error::invalid("angular node count must be even and >= 8"));
        }
        let radii = spec.uniform_grid(n_r);
        let h_t = std::f64::consts::TAU / n_theta as f64;
        let angles = (0..n_theta).map(|j| j as f64 * h_t).collect();
        Ok(PolarGrid { spec, n_r, n_theta, radii, angles })
    }

    pub fn h_r(&self) -> f64 {
        (self.spec.outer - self.spec.inner) / self.n_r as f64
    }

    pub fn h_theta(&self) -> f64 {
        std::f64::consts::TAU / self.n_theta as f64
    }

    /// Node-major index of (radial line i, angle j).
    pub fn node(&self, i: usize, j: usize) -> usize {
        i * self.n_theta + j
    }

    pub fn node_count(&self) -> usize {
        (self.n_r + 1) * self.n_theta
    }
}

/// Per-node frame Jacobians of the deformation; errors when the map folds.
pub fn build_deformation(
    dspec: &DeformationSpec,
    grid: &PolarGrid,
    t: f64,
) -> Result<Vec<FrameJacobian>> {
    dspec.validate()?;
    let mut out = Vec::with_capacity(grid.node_count());
    for &r in &grid.radii {
        for &theta in &grid.angles {
            let fj = dspec.frame_jacobian(grid.spec, r, theta, t);
            let det = fj.det();
            if !(det > 0.0) {
                return Err(Error::Fold { radius: r, angle: theta });
            }
            out.push(fj);
        }
    }
    Ok(out)
}

/// Largest amplitude keeping det J >= 0.2 on a fine probe grid; the working
/// |t| should stay below this. Engineering bound, reported alongside runs.
pub fn safety_bound(dspec: &DeformationSpec, spec: AnnulusSpec, probe: usize) -> f64 {
    let n = probe.max(64);
    let min_det = |t: f64| -> f64 {
        let mut worst = f64::INFINITY;
        for i in 0..=n {
            let r = spec.inner + (spec.outer - spec.inner) * i as f64 / n as f64;
            for j in 0..n {
                let theta = std::f64::consts::TAU * j as f64 / n as f64;
                worst = worst.min(dspec.frame_jacobian(spec, r, theta, t).det());
            }
        }
        worst
    };
    if min_det(1.0) >= 0.2 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if min_det(mid) >= 0.2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
