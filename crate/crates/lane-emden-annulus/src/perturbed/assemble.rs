//! Discretization of the pulled-back variational problem.
//!
//! The weak form on the reference annulus reads
//!
//! ```text
//! integral (M grad v) . grad phi dx  =  integral det J |v|^(p-1) v phi dx
//! ```
//!
//! and in polar coordinates the left side picks up the usual r weights:
//! c_rr = M_rr r, c_rt = M_rt, c_tt = M_tt / r against (v_r, v_theta).
//! Bilinear elements on the (r, theta) tensor grid keep the mixed M_rt term
//! symmetric, which a plain 5-point difference stencil cannot do; gradients
//! are integrated with 2x2 Gauss points per cell. The reaction term is mass
//! lumped at nodes so the Newton matrix stays "stiffness plus diagonal".
//!
//! Matrices are stored by radial line: dense angular blocks on the diagonal
//! (the theta axis wraps, so each block carries its own periodic coupling)
//! and one dense coupling block per adjacent pair of lines. The whole
//! operator is symmetric, so only diagonal and upper blocks are kept.

use nalgebra::linalg::{SymmetricEigen, LU};
use nalgebra::{DMatrix, DVector, Dyn};

use super::map::{build_deformation, DeformationSpec, FrameJacobian, PolarGrid};
use crate::error::{Error, Result};

/// Symmetric block tridiagonal matrix with square blocks of one size.
#[derive(Clone)]
pub(crate) struct BlockTridiag {
    /// Number of diagonal blocks (interior radial lines).
    pub k: usize,
    /// Block size (angular nodes).
    pub n: usize,
    pub diag: Vec<DMatrix<f64>>,
    /// upper[i] couples line i to line i + 1; the lower part is its transpose.
    pub upper: Vec<DMatrix<f64>>,
}

impl BlockTridiag {
    fn zeros(k: usize, n: usize) -> Self {
        BlockTridiag {
            k,
            n,
            diag: (0..k).map(|_| DMatrix::zeros(n, n)).collect(),
            upper: (0..k.saturating_sub(1)).map(|_| DMatrix::zeros(n, n)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.k * self.n
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.len());
        let mut y = vec![0.0; self.len()];
        for b in 0..self.k {
            let xs = DVector::from_column_slice(&x[b * self.n..(b + 1) * self.n]);
            let mut acc = &self.diag[b] * &xs;
            if b + 1 < self.k {
                let xn = DVector::from_column_slice(&x[(b + 1) * self.n..(b + 2) * self.n]);
                acc += &self.upper[b] * xn;
            }
            if b > 0 {
                let xp = DVector::from_column_slice(&x[(b - 1) * self.n..b * self.n]);
                acc += self.upper[b - 1].tr_mul(&xp);
            }
            y[b * self.n..(b + 1) * self.n].copy_from_slice(acc.as_slice());
        }
        y
    }

    /// Adds `values` to the matrix diagonal.
    pub fn add_diag(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.len());
        for b in 0..self.k {
            for j in 0..self.n {
                self.diag[b][(j, j)] += values[b * self.n + j];
            }
        }
    }

    /// Block Thomas factorization; fails when a Schur complement is close
    /// to singular, which signals a degenerate linearization.
    pub fn factor(&self) -> Result<BlockFactor<'_>> {
        let mut lus: Vec<LU<f64, Dyn, Dyn>> = Vec::with_capacity(self.k);
        let mut ws = Vec::with_capacity(self.k.saturating_sub(1));
        let mut s = self.diag[0].clone();
        for b in 0..self.k {
            let lu = LU::new(s.clone());
            let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
            for i in 0..self.n {
                let u = lu.u()[(i, i)].abs();
                lo = lo.min(u);
                hi = hi.max(u);
            }
            let ratio = lo / hi;
            if !(ratio > 1e-12) {
                return Err(Error::DegenerateLinearization { pivot_ratio: ratio });
            }
            if b + 1 < self.k {
                let w = lu
                    .solve(&self.upper[b])
                    .ok_or(Error::DegenerateLinearization { pivot_ratio: ratio })?;
                s = &self.diag[b + 1] - self.upper[b].tr_mul(&w);
                ws.push(w);
            }
            lus.push(lu);
        }
        Ok(BlockFactor { n: self.n, lus, ws, upper: &self.upper })
    }

    /// Number of negative eigenvalues, by inertia additivity of Schur
    /// complements: the counts of the successively eliminated diagonal
    /// blocks sum to the inertia of the whole matrix.
    pub fn inertia(&self) -> Result<usize> {
        let mut s = self.diag[0].clone();
        let mut negatives = 0;
        for b in 0..self.k {
            // Symmetrize first; the recursion drifts by round-off even
            // though the exact complements are symmetric.
            s = (&s + s.transpose()) * 0.5;
            negatives += symmetric_negatives(&s)?;
            if b + 1 < self.k {
                let lu = LU::new(s);
                let w = lu.solve(&self.upper[b]).ok_or(Error::DegenerateLinearization {
                    pivot_ratio: 0.0,
                })?;
                s = &self.diag[b + 1] - self.upper[b].tr_mul(&w);
            } else {
                break;
            }
        }
        Ok(negatives)
    }

    #[cfg(test)]
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.len(), self.len());
        for b in 0..self.k {
            a.view_mut((b * self.n, b * self.n), (self.n, self.n))
                .copy_from(&self.diag[b]);
            if b + 1 < self.k {
                a.view_mut((b * self.n, (b + 1) * self.n), (self.n, self.n))
                    .copy_from(&self.upper[b]);
                a.view_mut(((b + 1) * self.n, b * self.n), (self.n, self.n))
                    .copy_from(&self.upper[b].transpose());
            }
        }
        a
    }
}

/// Negative-eigenvalue count of one dense symmetric block. Unpivoted LDL^T
/// gives the count in n^3/6 flops; when a pivot collapses or the pivot
/// spread looks near-singular the slow eigensolve settles it, and a genuine
/// near-null direction is reported as a degenerate linearization.
fn symmetric_negatives(s: &DMatrix<f64>) -> Result<usize> {
    let n = s.nrows();
    let scale = s.abs().max().max(1e-300);
    let mut a = s.clone_owned();
    let mut negatives = 0;
    let mut spread = (f64::INFINITY, 0.0_f64);
    let mut clean = true;
    'ldlt: for k in 0..n {
        let d = a[(k, k)];
        if d.abs() <= 1e-8 * scale {
            clean = false;
            break 'ldlt;
        }
        spread = (spread.0.min(d.abs()), spread.1.max(d.abs()));
        if d < 0.0 {
            negatives += 1;
        }
        for i in k + 1..n {
            let l = a[(i, k)] / d;
            for j in k + 1..=i {
                a[(i, j)] -= l * a[(j, k)];
            }
        }
    }
    if clean && spread.0 > 1e-10 * spread.1 {
        return Ok(negatives);
    }

    let eig = SymmetricEigen::new(s.clone_owned());
    let top = eig.eigenvalues.amax().max(1e-300);
    let mut count = 0;
    for &lambda in eig.eigenvalues.iter() {
        if lambda < -1e-10 * top {
            count += 1;
        } else if lambda <= 1e-10 * top {
            return Err(Error::DegenerateLinearization {
                pivot_ratio: lambda.abs() / top,
            });
        }
    }
    Ok(count)
}

/// Factorized block tridiagonal operator.
pub(crate) struct BlockFactor<'a> {
    n: usize,
    lus: Vec<LU<f64, Dyn, Dyn>>,
    /// ws[i] = S_i^-1 upper[i], the block back-substitution multipliers.
    ws: Vec<DMatrix<f64>>,
    upper: &'a [DMatrix<f64>],
}

impl BlockFactor<'_> {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let k = self.lus.len();
        let n = self.n;
        let mut ys: Vec<DVector<f64>> = Vec::with_capacity(k);
        for i in 0..k {
            let mut z = DVector::from_column_slice(&b[i * n..(i + 1) * n]);
            if i > 0 {
                z -= self.upper[i - 1].tr_mul(&ys[i - 1]);
            }
            let y = self.lus[i].solve(&z).expect("factor() verified the pivots");
            ys.push(y);
        }
        for i in (0..k.saturating_sub(1)).rev() {
            let correction = &self.ws[i] * &ys[i + 1];
            ys[i] -= correction;
        }
        let mut x = vec![0.0; k * n];
        for i in 0..k {
            x[i * n..(i + 1) * n].copy_from_slice(ys[i].as_slice());
        }
        x
    }
}

/// Stiffness, geometry weights, and node data for one deformation amplitude.
pub(crate) struct Assembly {
    pub stiffness: BlockTridiag,
    /// Frame Jacobians at every grid node, Dirichlet lines included.
    pub jacobians: Vec<FrameJacobian>,
    /// Base polar measure r h_r h_theta at interior nodes.
    pub w_base: Vec<f64>,
    /// det J times the base measure at interior nodes (reaction weight).
    pub w_det: Vec<f64>,
}

const GAUSS: [f64; 2] = [
    0.5 - 0.288_675_134_594_812_9,
    0.5 + 0.288_675_134_594_812_9,
];

/// Reference-square gradients of the four bilinear basis functions at
/// (xi, eta), ordered (i, j), (i+1, j), (i, j+1), (i+1, j+1).
fn q1_gradients(xi: f64, eta: f64) -> [(f64, f64); 4] {
    [
        (-(1.0 - eta), -(1.0 - xi)),
        (1.0 - eta, -xi),
        (-eta, 1.0 - xi),
        (eta, xi),
    ]
}

pub(crate) fn assemble(dspec: &DeformationSpec, grid: &PolarGrid, t: f64) -> Result<Assembly> {
    let jacobians = build_deformation(dspec, grid, t)?;
    let (n_r, n_t) = (grid.n_r, grid.n_theta);
    let (h_r, h_t) = (grid.h_r(), grid.h_theta());
    let k = n_r - 1;
    let mut stiffness = BlockTridiag::zeros(k, n_t);

    let interior = |i: usize| i >= 1 && i <= n_r - 1;
    for ci in 0..n_r {
        for cj in 0..n_t {
            // Cell between radial nodes ci, ci+1 and angles cj, cj+1 (wrapped).
            let mut local = [[0.0; 4]; 4];
            for &xi in &GAUSS {
                for &eta in &GAUSS {
                    let r = grid.radii[ci] + xi * h_r;
                    let theta = grid.angles[cj] + eta * h_t;
                    let fj = dspec.frame_jacobian(grid.spec, r, theta, t);
                    if !(fj.det() > 0.0) {
                        return Err(Error::Fold { radius: r, angle: theta });
                    }
                    let (m_rr, m_rt, m_tt) = fj.pullback();
                    let (c_rr, c_rt, c_tt) = (m_rr * r, m_rt, m_tt / r);
                    let grads = q1_gradients(xi, eta);
                    for a in 0..4 {
                        let (dr_a, dt_a) = (grads[a].0 / h_r, grads[a].1 / h_t);
                        for b in 0..4 {
                            let (dr_b, dt_b) = (grads[b].0 / h_r, grads[b].1 / h_t);
                            local[a][b] += 0.25
                                * h_r
                                * h_t
                                * (c_rr * dr_a * dr_b
                                    + c_rt * (dr_a * dt_b + dt_a * dr_b)
                                    + c_tt * dt_a * dt_b);
                        }
                    }
                }
            }

            let nodes = [
                (ci, cj),
                (ci + 1, cj),
                (ci, (cj + 1) % n_t),
                (ci + 1, (cj + 1) % n_t),
            ];
            for a in 0..4 {
                let (ia, ja) = nodes[a];
                if !interior(ia) {
                    continue;
                }
                for b in 0..4 {
                    let (ib, jb) = nodes[b];
                    if !interior(ib) || ib < ia {
                        continue;
                    }
                    if ib == ia {
                        stiffness.diag[ia - 1][(ja, jb)] += local[a][b];
                    } else {
                        stiffness.upper[ia - 1][(ja, jb)] += local[a][b];
                    }
                }
            }
        }
    }

    let mut w_base = Vec::with_capacity(k * n_t);
    let mut w_det = Vec::with_capacity(k * n_t);
    for i in 1..n_r {
        for j in 0..n_t {
            let w0 = grid.radii[i] * h_r * h_t;
            w_base.push(w0);
            w_det.push(jacobians[grid.node(i, j)].det() * w0);
        }
    }

    Ok(Assembly { stiffness, jacobians, w_base, w_det })
}

impl Assembly {
    /// Lumped reaction vector: w_det |v|^(p-1) v at interior nodes.
    pub fn reaction(&self, p: f64, v: &[f64]) -> Vec<f64> {
        v.iter()
            .zip(&self.w_det)
            .map(|(&x, &w)| w * x.abs().powf(p - 1.0) * x)
            .collect()
    }

    /// Diagonal of the reaction derivative: p w_det |v|^(p-1).
    pub fn reaction_slope(&self, p: f64, v: &[f64]) -> Vec<f64> {
        v.iter()
            .zip(&self.w_det)
            .map(|(&x, &w)| p * w * x.abs().powf(p - 1.0))
            .collect()
    }
}
