//! Gauss–Legendre rules and adaptive interval bisection.

use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
#[error("quadrature did not converge within {max_depth} bisections near [{a}, {b}]")]
pub struct QuadratureFailure {
    pub max_depth: usize,
    pub a: f64,
    pub b: f64,
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// with nodes in increasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's estimate of the i-th largest root, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let dp = legendre(n, x).1;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

fn rule32() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(32))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Absolute tolerance on the interval; `INFINITY` disables refinement.
    pub tol: f64,
    /// Tolerance relative to the rule's estimate of `∫|f|`. Keeps the target
    /// above rounding when the integrand is large.
    pub rel_tol: f64,
    pub max_depth: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            tol: 1e-12,
            rel_tol: 1e-13,
            max_depth: 20,
        }
    }
}

/// A fixed rule mapped to `[a, b]`.
#[derive(Debug, Clone)]
pub struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = if n == 32 { rule32().clone() } else { gauss_legendre(n) };
        Rule { nodes, weights }
    }

    pub fn apply<E>(&self, f: &dyn Fn(f64) -> Result<f64, E>, a: f64, b: f64) -> Result<f64, E> {
        Ok(self.apply_with_abs(f, a, b)?.0)
    }

    /// `(∫f, ∫|f|)` from the same nodes.
    pub fn apply_with_abs<E>(&self, f: &dyn Fn(f64) -> Result<f64, E>, a: f64, b: f64) -> Result<(f64, f64), E> {
        let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
        let (mut sum, mut abs) = (0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(c + r * x)?;
            sum += w * v;
            abs += w * v.abs();
        }
        Ok((r * sum, r * abs))
    }
}

/// Integrates `f` on `[a, b]` by comparing the rule on each interval with
/// the rule on its two halves and bisecting until they agree to `tol`
/// (split evenly between halves) or to `rel_tol ∫|f|`.
///
/// The relative floor is taken from the whole interval and is not split:
/// node positions carry an error of one ulp of `x`, so on short intervals
/// the two estimates differ by about `ulp(x) |f'| (b - a)`, which shrinks no
/// faster than a halved tolerance.
pub fn adaptive<E>(
    rule: &Rule,
    f: &dyn Fn(f64) -> Result<f64, E>,
    a: f64,
    b: f64,
    opts: &QuadratureOptions,
) -> Result<f64, E>
where
    E: From<QuadratureFailure>,
{
    if b <= a {
        return Ok(0.0);
    }
    let (whole, abs) = rule.apply_with_abs(f, a, b)?;
    let floor = opts.rel_tol * abs;
    refine(rule, f, a, b, whole, opts.tol, floor, 0, opts)
}

#[allow(clippy::too_many_arguments)]
fn refine<E>(
    rule: &Rule,
    f: &dyn Fn(f64) -> Result<f64, E>,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    floor: f64,
    depth: usize,
    opts: &QuadratureOptions,
) -> Result<f64, E>
where
    E: From<QuadratureFailure>,
{
    if tol.is_infinite() {
        return Ok(whole);
    }
    let m = 0.5 * (a + b);
    let (left, right) = (rule.apply(f, a, m)?, rule.apply(f, m, b)?);
    let halves = left + right;
    if (halves - whole).abs() <= tol.max(floor) {
        return Ok(halves);
    }
    if depth >= opts.max_depth {
        return Err(QuadratureFailure {
            max_depth: opts.max_depth,
            a,
            b,
        }
        .into());
    }
    Ok(refine(rule, f, a, m, left, 0.5 * tol, floor, depth + 1, opts)?
        + refine(rule, f, m, b, right, 0.5 * tol, floor, depth + 1, opts)?)
}
