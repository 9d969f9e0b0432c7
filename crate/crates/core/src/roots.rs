//! Bracketed scalar root finding and golden-section minimization.
//!
//! Critical times are roots of smooth transcendental functions whose
//! derivative may vanish inside the search interval, so every root is first
//! bracketed and bisected; Newton is only used to polish inside the bracket.

/// Bisection width target.
pub const BISECTION_TOL: f64 = 1e-12;
/// Polishing steps after bisection.
pub const NEWTON_POLISH_STEPS: usize = 3;
/// First step of the doubling search.
pub const FIRST_STEP: f64 = 1.0 / 16.0;

fn straddles(fa: f64, fb: f64) -> bool {
    fa == 0.0 || fb == 0.0 || (fa < 0.0) != (fb < 0.0)
}

/// Bisection on `[lo, hi]`; `None` if `f` has the same strict sign at both ends.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if !straddles(flo, fhi) {
        return None;
    }
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    // Interval halving stalls at one ulp, so the iteration count is bounded too.
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Walks right from `start` with steps `FIRST_STEP, 2 FIRST_STEP, 4 FIRST_STEP, ...`
/// and returns the first interval over which `f` changes sign.
pub fn bracket_by_doubling<F: Fn(f64) -> f64>(f: F, start: f64, horizon: f64) -> Option<(f64, f64)> {
    let mut a = start;
    let mut fa = f(a);
    let mut step = FIRST_STEP;
    while a < horizon {
        let b = (a + step).min(horizon);
        let fb = f(b);
        if fb == 0.0 || (fa != 0.0 && (fa < 0.0) != (fb < 0.0)) {
            return Some((a, b));
        }
        a = b;
        fa = fb;
        step *= 2.0;
    }
    None
}

/// Bisection to [`BISECTION_TOL`] followed by guarded Newton polishing: a
/// Newton step is kept only if it stays in the bracket and does not increase `|f|`.
pub fn bisect_newton<F, D>(f: F, df: D, lo: f64, hi: f64) -> Option<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut x = bisect(&f, lo, hi, BISECTION_TOL)?;
    let mut fx = f(x);
    for _ in 0..NEWTON_POLISH_STEPS {
        let d = df(x);
        if fx == 0.0 || d == 0.0 || !d.is_finite() {
            break;
        }
        let cand = x - fx / d;
        if !(lo..=hi).contains(&cand) {
            break;
        }
        let fc = f(cand);
        if fc.abs() > fx.abs() {
            break;
        }
        x = cand;
        fx = fc;
    }
    Some(x)
}

/// First sign change of `f` to the right of `start` (within `horizon`),
/// located by doubling, bisection and Newton polishing.
pub fn first_root_after<F, D>(f: F, df: D, start: f64, horizon: f64) -> Option<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (a, b) = bracket_by_doubling(&f, start, horizon)?;
    bisect_newton(f, df, a, b)
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
/// Returns `(argmin, min)`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    // The endpoints are candidates too: a tangency at the end of the
    // interval makes the minimum sit on the boundary.
    [(lo, f(lo)), (hi, f(hi)), (0.5 * (lo + hi), f(0.5 * (lo + hi)))]
        .into_iter()
        .fold((c, fc), |best, cand| if cand.1 < best.1 { cand } else { best })
}
