//! Slow, independent reference evaluators.
//!
//! Everything here exists to check the fast paths from the outside: no code
//! is shared with the closed forms or the composite rules beyond the kernel
//! evaluation itself. These run in the verification battery and in tests,
//! where a brute-force answer at modest accuracy is worth more than speed.

/// Adaptive Simpson integration with a depth cap.
///
/// The cap keeps integrable endpoint/interior singularities from recursing
/// forever; panels that hit it are small enough that their own truncation
/// error is negligible for the tolerances used here.
pub fn adaptive_integral<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> f64 {
    fn simpson(fl: f64, fm: f64, fr: f64, width: f64) -> f64 {
        width / 6.0 * (fl + 4.0 * fm + fr)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        lo: f64,
        hi: f64,
        fl: f64,
        fm: f64,
        fr: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let mid = 0.5 * (lo + hi);
        let lm = 0.5 * (lo + mid);
        let rm = 0.5 * (mid + hi);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fl, flm, fm, mid - lo);
        let right = simpson(fm, frm, fr, hi - mid);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, lo, mid, fl, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, mid, hi, fm, frm, fr, right, tol / 2.0, depth - 1)
    }
    let mid = 0.5 * (lo + hi);
    let fl = f(lo);
    let fm = f(mid);
    let fr = f(hi);
    let whole = simpson(fl, fm, fr, hi - lo);
    recurse(f, lo, hi, fl, fm, fr, whole, tol, 50)
}

/// Iteratively refined grid minimization on `[lo, hi]`.
///
/// Each round samples `points` equispaced values, then shrinks the bracket
/// to the two grid cells around the argmin. Returns `(argmin, min)`.
pub fn grid_min<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    points: usize,
    rounds: usize,
) -> (f64, f64) {
    assert!(points >= 3 && hi > lo);
    let (mut lo, mut hi) = (lo, hi);
    let mut best_x = lo;
    let mut best_v = f64::INFINITY;
    for _ in 0..rounds {
        let step = (hi - lo) / (points - 1) as f64;
        let mut arg = 0usize;
        best_v = f64::INFINITY;
        for i in 0..points {
            let x = lo + step * i as f64;
            let v = f(x);
            if v < best_v {
                best_v = v;
                best_x = x;
                arg = i;
            }
        }
        let new_lo = lo + step * arg.saturating_sub(1) as f64;
        let new_hi = (lo + step * (arg + 1) as f64).min(hi);
        lo = new_lo;
        hi = new_hi;
    }
    (best_x, best_v)
}

/// Supremum of `f` over a dense grid on `[lo, hi]`, endpoints included.
pub fn grid_sup<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, points: usize) -> f64 {
    assert!(points >= 2);
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|i| f(lo + step * i as f64))
        .fold(f64::NEG_INFINITY, f64::max)
}
