//! Scalar root bracketing helpers used by the shooting and scan layers.

/// Brent's method on a bracket [lo, hi] with f(lo)*f(hi) <= 0.
///
/// Stops when |f| <= ftol or the bracket shrinks below xtol (absolute).
/// Returns the best abscissa and its residual.
pub fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    flo: f64,
    fhi: f64,
    xtol: f64,
    ftol: f64,
    max_iter: usize,
) -> (f64, f64) {
    debug_assert!(flo * fhi <= 0.0);
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (flo, fhi);
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut mflag = true;

    for _ in 0..max_iter {
        if fb == 0.0 || fb.abs() <= ftol || (b - a).abs() <= xtol {
            return (b, fb);
        }
        let mut s = if fa != fc && fb != fc {
            // Inverse quadratic interpolation.
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };

        let lo_guard = (3.0 * a + b) / 4.0;
        let between = (s > lo_guard.min(b) && s < lo_guard.max(b)) || s == b;
        let big_step = if mflag {
            (s - b).abs() >= (b - c).abs() / 2.0
        } else {
            (s - b).abs() >= (c - d).abs() / 2.0
        };
        if !between || big_step {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }

        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    (b, fb)
}

/// Plain bisection on a sign change, to absolute tolerance xtol.
pub fn bisect<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    mut flo: f64,
    xtol: f64,
    max_iter: usize,
) -> f64 {
    for _ in 0..max_iter {
        if hi - lo <= xtol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}
