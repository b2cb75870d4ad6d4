//! Symmetric tridiagonal eigensolver: Sturm-count bisection for eigenvalues,
//! shifted inverse iteration for eigenvectors.
//!
//! Sizes here are a few thousand and only the lowest handful of eigenpairs
//! is ever needed, so bisection with the LDLT inertia count is both simple
//! and bit-for-bit deterministic.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    /// Subdiagonal, length diag.len() - 1.
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty());
        assert_eq!(off.len() + 1, diag.len());
        SymTridiag { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of eigenvalues strictly below x (LDLT pivot signs).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = self.diag[0] - x;
        if d == 0.0 {
            d = -f64::MIN_POSITIVE;
        }
        if d < 0.0 {
            count += 1;
        }
        for k in 1..self.len() {
            d = (self.diag[k] - x) - self.off[k - 1] * self.off[k - 1] / d;
            if d == 0.0 {
                d = -f64::MIN_POSITIVE;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Interval certain to contain the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..n {
            let mut radius = 0.0;
            if k > 0 {
                radius += self.off[k - 1].abs();
            }
            if k + 1 < n {
                radius += self.off[k].abs();
            }
            lo = lo.min(self.diag[k] - radius);
            hi = hi.max(self.diag[k] + radius);
        }
        (lo, hi)
    }

    /// k-th smallest eigenvalue (0-based) by bisection on the Sturm count.
    pub fn eigenvalue(&self, k: usize, tol: f64) -> f64 {
        assert!(k < self.len());
        let (mut lo, mut hi) = self.gershgorin();
        // Widen marginally so the counts at the ends are 0 and n even with
        // rounding on the bound arithmetic.
        let pad = 1e-12 * (hi - lo).abs().max(1.0);
        lo -= pad;
        hi += pad;
        while hi - lo > tol * hi.abs().max(lo.abs()).max(1.0) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// The `n_eigs` smallest eigenpairs, ascending, each vector 2-normalized
    /// with its largest-magnitude entry positive.
    pub fn eigen_smallest(&self, n_eigs: usize, tol: f64) -> Result<Vec<(f64, Vec<f64>)>> {
        assert!(n_eigs <= self.len());
        let scale = {
            let (lo, hi) = self.gershgorin();
            hi.abs().max(lo.abs()).max(1.0)
        };
        let mut out = Vec::with_capacity(n_eigs);
        let mut prev: Option<f64> = None;
        for k in 0..n_eigs {
            let lambda = self.eigenvalue(k, tol);
            if let Some(p) = prev {
                if lambda - p <= 1e-13 * scale {
                    return Err(Error::ClusteredSpectrum { index: k });
                }
            }
            let vec = self.inverse_iteration(lambda, k, scale)?;
            out.push((lambda, vec));
            prev = Some(lambda);
        }
        Ok(out)
    }

    fn inverse_iteration(&self, lambda: f64, k: usize, scale: f64) -> Result<Vec<f64>> {
        let n = self.len();
        // Tiny shift off the eigenvalue keeps the factorization regular
        // without hurting the convergence rate.
        let shift = lambda + 1e-14 * scale;
        let lu = TridiagLu::factor(self, shift);

        // Deterministic start with the expected oscillation count.
        let mut x: Vec<f64> = (0..n)
            .map(|j| ((k + 1) as f64 * std::f64::consts::PI * (j + 1) as f64 / (n + 1) as f64).sin())
            .collect();
        normalize(&mut x);
        for _ in 0..4 {
            lu.solve_in_place(&mut x)?;
            normalize(&mut x);
        }

        // Residual certificate.
        let mut resid: f64 = 0.0;
        for j in 0..n {
            let mut t = self.diag[j] * x[j] - lambda * x[j];
            if j > 0 {
                t += self.off[j - 1] * x[j - 1];
            }
            if j + 1 < n {
                t += self.off[j] * x[j + 1];
            }
            resid = resid.max(t.abs());
        }
        if resid > 1e-8 * scale {
            return Err(Error::InconsistentSpectrum(format!(
                "inverse iteration residual {resid:e} for eigenvalue {lambda}"
            )));
        }
        Ok(x)
    }
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (mut imax, mut vmax) = (0, 0.0f64);
    for (i, v) in x.iter().enumerate() {
        if v.abs() > vmax {
            vmax = v.abs();
            imax = i;
        }
    }
    let sign = if x[imax] < 0.0 { -1.0 } else { 1.0 };
    for v in x.iter_mut() {
        *v *= sign / norm;
    }
}

/// LU factorization of (T - shift I) with partial pivoting; the U factor has
/// two superdiagonals.
struct TridiagLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(t: &SymTridiag, shift: f64) -> Self {
        let n = t.len();
        let mut dl: Vec<f64> = t.off.clone();
        let mut d: Vec<f64> = t.diag.iter().map(|a| a - shift).collect();
        let mut du: Vec<f64> = t.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];

        for i in 0..n - 1 {
            if dl[i].abs() <= d[i].abs() {
                // No swap.
                if d[i] != 0.0 {
                    let f = dl[i] / d[i];
                    dl[i] = f;
                    d[i + 1] -= f * du[i];
                }
                if i + 2 < n {
                    du2[i] = 0.0;
                }
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        TridiagLu { dl, d, du, du2, swapped }
    }

    fn solve_in_place(&self, b: &mut [f64]) -> Result<()> {
        let n = self.d.len();
        // Forward sweep with the recorded row swaps.
        for i in 0..n - 1 {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.dl[i] * b[i];
        }
        // Back substitution.
        for i in (0..n).rev() {
            let mut v = b[i];
            if i + 1 < n {
                v -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                v -= self.du2[i] * b[i + 2];
            }
            let piv = self.d[i];
            if piv == 0.0 {
                return Err(Error::DegenerateLinearization { pivot_ratio: 0.0 });
            }
            b[i] = v / piv;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dirichlet chain: eigenvalues 2 - 2 cos(k pi / (n+1)).
    fn chain(n: usize) -> SymTridiag {
        SymTridiag::new(vec![2.0; n], vec![-1.0; n - 1])
    }

    fn chain_eig(n: usize, k: usize) -> f64 {
        2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos()
    }

    #[test]
    fn sturm_count_matches_known_spectrum() {
        let t = chain(64);
        for k in 0..64 {
            let lam = chain_eig(64, k);
            assert_eq!(t.count_below(lam - 1e-9), k, "below eigenvalue {k}");
            assert_eq!(t.count_below(lam + 1e-9), k + 1, "above eigenvalue {k}");
        }
        assert_eq!(t.count_below(-1.0), 0);
        assert_eq!(t.count_below(5.0), 64);
    }

    #[test]
    fn bisection_recovers_eigenvalues() {
        let t = chain(200);
        for k in [0usize, 1, 5, 42, 199] {
            let got = t.eigenvalue(k, 1e-14);
            let expect = chain_eig(200, k);
            assert!(
                (got - expect).abs() < 1e-11,
                "eigenvalue {k}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn eigenvectors_match_sine_modes() {
        let n = 150;
        let t = chain(n);
        let pairs = t.eigen_smallest(4, 1e-14).unwrap();
        for (k, (lam, vec)) in pairs.iter().enumerate() {
            assert!((lam - chain_eig(n, k)).abs() < 1e-11);
            // Overlap with the analytic mode, up to the overall sign fixed
            // by the largest entry.
            let mut reference: Vec<f64> = (0..n)
                .map(|j| {
                    ((k + 1) as f64 * std::f64::consts::PI * (j + 1) as f64 / (n + 1) as f64).sin()
                })
                .collect();
            normalize(&mut reference);
            let dot: f64 = reference.iter().zip(vec).map(|(a, b)| a * b).sum();
            assert!(dot.abs() > 1.0 - 1e-10, "mode {k} overlap {dot}");
        }
    }

    #[test]
    fn eigenvector_sign_changes_count_mode_index() {
        let n = 120;
        let t = chain(n);
        let pairs = t.eigen_smallest(5, 1e-14).unwrap();
        for (k, (_, vec)) in pairs.iter().enumerate() {
            let flips = vec.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
            assert_eq!(flips, k, "mode {k}");
        }
    }

    #[test]
    fn gershgorin_contains_spectrum() {
        let t = SymTridiag::new(vec![1.0, -3.0, 7.5, 0.25], vec![0.5, -2.0, 1.0]);
        let (lo, hi) = t.gershgorin();
        for k in 0..4 {
            let lam = t.eigenvalue(k, 1e-13);
            assert!(lam >= lo && lam <= hi);
        }
        assert_eq!(t.count_below(hi + 1.0), 4);
    }

    #[test]
    fn detects_clustered_pairs() {
        // Two decoupled blocks produce a doubly degenerate eigenvalue.
        let t = SymTridiag::new(vec![1.0, 1.0], vec![0.0]);
        let err = t.eigen_smallest(2, 1e-14).unwrap_err();
        assert!(matches!(err, Error::ClusteredSpectrum { index: 1 }));
    }
}
