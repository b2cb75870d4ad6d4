//! Annular domain description.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An annulus { x in R^N : a < |x| < b } described by its radii and dimension.
///
/// Only the radial data matter for most of the crate; the dimension enters
/// through the volume element r^(N-1) and the singular weight r^(N-3).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSpec {
    /// Inner radius, strictly positive.
    pub inner: f64,
    /// Outer radius, strictly larger than `inner`.
    pub outer: f64,
    /// Space dimension N >= 2.
    pub dim: u32,
}

impl AnnulusSpec {
    pub fn new(inner: f64, outer: f64, dim: u32) -> Result<Self> {
        if !(inner.is_finite() && outer.is_finite()) {
            return Err(Error::invalid("annulus radii must be finite"));
        }
        if inner <= 0.0 {
            return Err(Error::invalid(format!(
                "inner radius must be positive, got {inner}"
            )));
        }
        if outer <= inner {
            return Err(Error::invalid(format!(
                "outer radius must exceed inner radius, got [{inner}, {outer}]"
            )));
        }
        if dim < 2 {
            return Err(Error::invalid(format!("dimension must be >= 2, got {dim}")));
        }
        Ok(AnnulusSpec { inner, outer, dim })
    }

    pub fn width(&self) -> f64 {
        self.outer - self.inner
    }

    /// Volume element r^(N-1).
    pub fn volume_weight(&self, r: f64) -> f64 {
        r.powi(self.dim as i32 - 1)
    }

    /// Singular weight r^(N-3) of the linearized pencil.
    pub fn singular_weight(&self, r: f64) -> f64 {
        r.powi(self.dim as i32 - 3)
    }

    /// The annulus scaled by `mu > 0`.
    pub fn scaled(&self, mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::invalid(format!("scale factor must be positive, got {mu}")));
        }
        AnnulusSpec::new(self.inner * mu, self.outer * mu, self.dim)
    }

    /// Uniform grid with `n` intervals, endpoints included.
    pub fn uniform_grid(&self, n: usize) -> Vec<f64> {
        let h = self.width() / n as f64;
        let mut g: Vec<f64> = (0..=n).map(|i| self.inner + h * i as f64).collect();
        // Pin the last node exactly; downstream code relies on grid[n] == outer.
        g[n] = self.outer;
        g
    }
}

/// Exponent validation shared by every solver entry point.
pub fn validate_exponent(p: f64) -> Result<()> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::invalid(format!("exponent p must satisfy p > 1, got {p}")));
    }
    Ok(())
}

/// Nodal zone count validation.
pub fn validate_zones(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid("nodal zone count m must be >= 1"));
    }
    Ok(())
}
