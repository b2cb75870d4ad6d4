//! Nodal solutions on perturbed planar annuli.
//!
//! The domain is the image of the annulus under x -> x + t sigma(x), where
//! sigma displaces points radially by an amount interpolating trig
//! polynomials on the two boundary circles. Instead of meshing the deformed
//! domain, the problem is pulled back to the reference annulus: the
//! Laplacian turns into a variable tensor M = det J J^-1 J^-T and the
//! reaction picks up det J. Solutions are continued in the amplitude t from
//! the radial profile, and the diagnostics (nodal count, Morse index, shape
//! distance) make the stability statements testable: for small t the nodal
//! picture and the index of the radial solution must survive the
//! deformation.
//!
//! Everything here is planar; the deformation machinery relies on the
//! rotation group of the circle and makes no sense for spherical shells.

mod assemble;
mod map;
mod solve;

pub use map::{
    build_deformation, safety_bound, DeformationSpec, FourierTerm, FrameJacobian, PolarGrid,
};
pub use solve::{morse_index_2d, morse_index_2d_refined, newton_solve, PerturbedSolution};

use crate::asymptotics::LaplaceEigenpair;
use crate::error::{Error, Result};
use crate::radial::RadialProfile;

/// Relative cutoff below which a node counts as lying on the nodal set.
const NODAL_THRESHOLD: f64 = 1e-10;

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

/// Number of nodal zones of the field: connected components of the set
/// where |v| exceeds a small multiple of its sup, two nodes being adjacent
/// when they share a grid edge (the angle axis wraps) and carry the same
/// sign. Flipping the field's sign cannot change the count.
pub fn nodal_count_2d(sol: &PerturbedSolution) -> usize {
    let g = &sol.grid;
    let threshold = NODAL_THRESHOLD * sol.sup();
    let active = |i: usize, j: usize| sol.value(i, j).abs() > threshold;
    let mut dsu = Dsu::new(g.node_count());
    for i in 0..=g.n_r {
        for j in 0..g.n_theta {
            if !active(i, j) {
                continue;
            }
            let here = sol.value(i, j) > 0.0;
            let jr = (j + 1) % g.n_theta;
            if active(i, jr) && (sol.value(i, jr) > 0.0) == here {
                dsu.union(g.node(i, j), g.node(i, jr));
            }
            if i + 1 <= g.n_r && active(i + 1, j) && (sol.value(i + 1, j) > 0.0) == here {
                dsu.union(g.node(i, j), g.node(i + 1, j));
            }
        }
    }
    let mut roots = Vec::new();
    for i in 0..=g.n_r {
        for j in 0..g.n_theta {
            if active(i, j) {
                let r = dsu.find(g.node(i, j));
                if !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
    }
    roots.len()
}

/// Sup distance between the normalized field and a normalized radial
/// reference, minimized over the overall sign. Both sides are scaled by
/// their sup over the same grid radii so the distance vanishes on exact
/// lifts.
fn compare_profiles(sol: &PerturbedSolution, reference: impl Fn(f64) -> f64) -> f64 {
    let g = &sol.grid;
    let sup = sol.sup();
    let refs: Vec<f64> = g.radii.iter().map(|&r| reference(r)).collect();
    let ref_sup = refs.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let mut correlation = 0.0;
    for i in 0..=g.n_r {
        for j in 0..g.n_theta {
            correlation += sol.value(i, j) * refs[i];
        }
    }
    let sign = if correlation < 0.0 { -1.0 } else { 1.0 };
    let mut worst = 0.0_f64;
    for i in 0..=g.n_r {
        let r = sign * refs[i] / ref_sup;
        for j in 0..g.n_theta {
            worst = worst.max((sol.value(i, j) / sup - r).abs());
        }
    }
    worst
}

/// Shape distance to a radial profile on the same annulus.
pub fn shape_compare_radial(sol: &PerturbedSolution, profile: &RadialProfile) -> Result<f64> {
    if profile.spec.inner != sol.grid.spec.inner || profile.spec.outer != sol.grid.spec.outer {
        return Err(Error::invalid("profile lives on a different annulus"));
    }
    let shape = profile.shape();
    Ok(compare_profiles(sol, |r| shape.value(r)))
}

/// Shape distance to a radial Laplace eigenfunction on the same annulus.
/// Useful near p = 1, where the solution collapses onto the eigenfunction.
pub fn shape_compare_eigen(sol: &PerturbedSolution, pair: &LaplaceEigenpair) -> Result<f64> {
    if pair.spec.inner != sol.grid.spec.inner || pair.spec.outer != sol.grid.spec.outer {
        return Err(Error::invalid("eigenpair lives on a different annulus"));
    }
    let eval = |r: f64| -> f64 {
        let h = (pair.spec.outer - pair.spec.inner) / (pair.grid.len() - 1) as f64;
        let x = ((r - pair.spec.inner) / h).clamp(0.0, (pair.grid.len() - 1) as f64);
        let i = (x.floor() as usize).min(pair.grid.len() - 2);
        let f = x - i as f64;
        pair.psi[i] * (1.0 - f) + pair.psi[i + 1] * f
    };
    Ok(compare_profiles(sol, eval))
}
