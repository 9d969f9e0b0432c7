//! Distributional check of candidate solutions.
//!
//! For a test function `φ` the residuals are the weak forms
//!
//! ```text
//!     R_mass     = -∬ ρ (φ_t + u φ_x) dx dt - ∫ w (φ_t + σ φ_x)|_{x = s(t)} dt
//!     R_velocity = -∬ (u φ_t + u²/2 φ_x) dx dt - ∬ S φ dx dt
//! ```
//!
//! with `S = g` left of the front and `f` right of it. The velocity carries
//! no concentrated part, so its residual has no line term. Integrating by
//! parts on each side shows it equals `∫ (σ[u] - [u²/2]) φ dt` along the front
//! whenever the smooth parts solve their own equations, which is the jump
//! condition being certified.
//!
//! Both double integrals are computed in `(t, x)`: each `t`-slice of the
//! support is split at the front, and both the slices and the `t`-interval are
//! integrated with adaptive 32-point Gauss–Legendre.

use crate::model::{FrontPerturbation, PiecewiseField};
use crate::quadrature::{self, QuadratureFailure, QuadratureOptions, Rule};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub const GAUSS_NODES: usize = 32;
/// Default pass threshold, relative to `‖φ‖∞ × support area`.
pub const DEFAULT_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeakError {
    #[error(transparent)]
    QuadratureFailure(#[from] QuadratureFailure),
    #[error("test function support [{t_lo}, {t_hi}] leaves the validity interval (0, {valid_until}]")]
    SupportOutsideValidity { t_lo: f64, t_hi: f64, valid_until: f64 },
}

pub trait TestFunction: Sync {
    /// `(φ, φ_x, φ_t)`.
    fn eval(&self, x: f64, t: f64) -> [f64; 3];
    /// Time extent of the support.
    fn t_support(&self) -> (f64, f64);
    /// Spatial extent of the support on the slice `t`, if the slice meets it.
    fn x_support(&self, t: f64) -> Option<(f64, f64)>;
    fn sup_norm(&self) -> f64;
    fn support_area(&self) -> f64;
}

/// `e · exp(-1 / (1 - r²))` on the ellipse `r < 1`, scaled so its maximum is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bump {
    /// `(x, t)`.
    pub center: [f64; 2],
    /// `(r_x, r_t)`.
    pub radii: [f64; 2],
}

impl Bump {
    pub fn new(x: f64, t: f64, rx: f64, rt: f64) -> Self {
        assert!(rx > 0.0 && rt > 0.0, "bump radii must be positive");
        Bump {
            center: [x, t],
            radii: [rx, rt],
        }
    }
}

impl TestFunction for Bump {
    fn eval(&self, x: f64, t: f64) -> [f64; 3] {
        let (dx, dt) = (
            (x - self.center[0]) / self.radii[0],
            (t - self.center[1]) / self.radii[1],
        );
        let q = 1.0 - dx * dx - dt * dt;
        if q <= 0.0 {
            return [0.0; 3];
        }
        let phi = (1.0 - 1.0 / q).exp();
        // Near the edge φ underflows first; q² then underflows too and φ/q² is NaN.
        if phi == 0.0 {
            return [0.0; 3];
        }
        // dφ = φ dq / q² and dq = -2 (dx/r_x, dt/r_t).
        let g = -2.0 * phi / (q * q);
        [phi, g * dx / self.radii[0], g * dt / self.radii[1]]
    }

    fn t_support(&self) -> (f64, f64) {
        (self.center[1] - self.radii[1], self.center[1] + self.radii[1])
    }

    fn x_support(&self, t: f64) -> Option<(f64, f64)> {
        let dt = (t - self.center[1]) / self.radii[1];
        let h = 1.0 - dt * dt;
        (h > 0.0).then(|| {
            let half = self.radii[0] * h.sqrt();
            (self.center[0] - half, self.center[0] + half)
        })
    }

    fn sup_norm(&self) -> f64 {
        1.0
    }

    fn support_area(&self) -> f64 {
        std::f64::consts::PI * self.radii[0] * self.radii[1]
    }
}

/// `Σ α_i φ_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Combination {
    pub terms: Vec<(f64, Bump)>,
}

impl TestFunction for Combination {
    fn eval(&self, x: f64, t: f64) -> [f64; 3] {
        self.terms.iter().fold([0.0; 3], |mut acc, (a, b)| {
            let v = b.eval(x, t);
            for k in 0..3 {
                acc[k] += a * v[k];
            }
            acc
        })
    }

    fn t_support(&self) -> (f64, f64) {
        self.terms
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, b)| {
                let (a, c) = b.t_support();
                (lo.min(a), hi.max(c))
            })
    }

    fn x_support(&self, t: f64) -> Option<(f64, f64)> {
        self.terms
            .iter()
            .filter_map(|(_, b)| b.x_support(t))
            .reduce(|(a, b), (c, d)| (a.min(c), b.max(d)))
    }

    /// Upper bound `Σ |α_i| ‖φ_i‖∞`.
    fn sup_norm(&self) -> f64 {
        self.terms.iter().map(|(a, b)| a.abs() * b.sup_norm()).sum()
    }

    fn support_area(&self) -> f64 {
        self.terms.iter().map(|(_, b)| b.support_area()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakOptions {
    pub nodes: usize,
    /// Absolute tolerance of each slice integral, relative to the slice width.
    pub slice_tol: f64,
    /// Absolute tolerance of the outer integral, relative to the support area.
    pub tol: f64,
    /// Floor relative to `∫|integrand|` for both levels; small supports make
    /// `∇φ` large and push the absolute targets below rounding.
    pub rel_tol: f64,
    pub max_depth: usize,
}

impl Default for WeakOptions {
    fn default() -> Self {
        WeakOptions {
            nodes: GAUSS_NODES,
            slice_tol: 1e-12,
            tol: 1e-11,
            rel_tol: 1e-13,
            max_depth: 20,
        }
    }
}

impl WeakOptions {
    /// One application of the rule per slice and per `t`-panel.
    pub fn fixed(nodes: usize) -> Self {
        WeakOptions {
            nodes,
            slice_tol: f64::INFINITY,
            tol: f64::INFINITY,
            rel_tol: 0.0,
            max_depth: 0,
        }
    }
}

#[derive(Clone, Copy)]
enum Equation {
    Mass,
    Velocity,
}

pub fn residual_velocity(field: &PiecewiseField, phi: &dyn TestFunction, opts: &WeakOptions) -> Result<f64, WeakError> {
    residual(field, phi, opts, Equation::Velocity)
}

pub fn residual_mass(field: &PiecewiseField, phi: &dyn TestFunction, opts: &WeakOptions) -> Result<f64, WeakError> {
    residual(field, phi, opts, Equation::Mass)
}

fn residual(
    field: &PiecewiseField,
    phi: &dyn TestFunction,
    opts: &WeakOptions,
    eq: Equation,
) -> Result<f64, WeakError> {
    let (t_lo, t_hi) = phi.t_support();
    let valid_until = field.path().valid_until();
    if !(t_lo > 0.0) || t_hi > valid_until {
        return Err(WeakError::SupportOutsideValidity {
            t_lo,
            t_hi,
            valid_until,
        });
    }
    let rule = Rule::new(opts.nodes);
    let source = field.source();

    let slice = |t: f64| -> Result<f64, WeakError> {
        let Some((xa, xb)) = phi.x_support(t) else {
            return Ok(0.0);
        };
        let s = field.front_position(t);
        let sides = [
            (xa, xb.min(s), field.left_state(xa, t), true),
            (xa.max(s), xb, field.right_state(xb, t), false),
        ];
        let slice_opts = QuadratureOptions {
            tol: opts.slice_tol * (xb - xa),
            rel_tol: opts.rel_tol,
            max_depth: opts.max_depth,
        };
        let mut total = 0.0;
        for (a, b, (rho, u), left) in sides {
            if b <= a {
                continue;
            }
            let force = if left { source.left(t, u) } else { source.right(t, u) };
            let integrand = |x: f64| -> Result<f64, WeakError> {
                let [p, px, pt] = phi.eval(x, t);
                Ok(match eq {
                    Equation::Mass => -rho * (pt + u * px),
                    Equation::Velocity => -(u * pt + 0.5 * u * u * px) - force * p,
                })
            };
            total += quadrature::adaptive(&rule, &integrand, a, b, &slice_opts)?;
        }
        if let Equation::Mass = eq {
            let [_, px, pt] = phi.eval(s, t);
            total -= field.front_weight(t) * (pt + field.front_speed(t) * px);
        }
        Ok(total)
    };

    // Sampled fronts are only C¹ at their knots, so panels break there.
    let mut knots = vec![t_lo];
    if let Some(track) = field.path().track() {
        knots.extend(track.samples().iter().map(|p| p.t).filter(|&t| t > t_lo && t < t_hi));
    }
    knots.push(t_hi);
    let outer = QuadratureOptions {
        tol: opts.tol * phi.support_area() / (knots.len() - 1) as f64,
        rel_tol: opts.rel_tol,
        max_depth: opts.max_depth,
    };
    knots
        .windows(2)
        .map(|w| quadrature::adaptive(&rule, &slice, w[0], w[1], &outer))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BumpReport {
    pub center: [f64; 2],
    pub radii: [f64; 2],
    /// Normalized by `‖φ‖∞ × support area`.
    pub residual_velocity: f64,
    pub residual_mass: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub threshold: f64,
    pub bumps: Vec<BumpReport>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn failing(&self) -> impl Iterator<Item = (usize, &BumpReport)> {
        self.bumps.iter().enumerate().filter(|(_, b)| !b.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.bumps
            .iter()
            .map(|b| b.residual_velocity.abs().max(b.residual_mass.abs()))
            .fold(0.0, f64::max)
    }
}

/// Five fixed placements inside `(0, T)` with `T = min(death, horizon)`:
/// three straddling the front early, midway and late, and one on each side
/// of it.
pub fn battery(field: &PiecewiseField, horizon: f64) -> Vec<Bump> {
    let t_end = field.path().valid_until().min(horizon);
    let r = 0.2 * t_end;
    let on_front = |frac: f64| {
        let t = frac * t_end;
        Bump::new(field.front_position(t), t, r, r)
    };
    let mid = 0.5 * t_end;
    let s_mid = field.front_position(mid);
    vec![
        on_front(0.3),
        on_front(0.5),
        on_front(0.7),
        Bump::new(s_mid - 3.0 * r, mid, r, r),
        Bump::new(s_mid + 3.0 * r, mid, r, r),
    ]
}

/// Default battery horizon for fronts that never die.
pub const BATTERY_HORIZON: f64 = 2.0;

pub fn verify(field: &PiecewiseField, threshold: f64, opts: &WeakOptions) -> Result<VerificationReport, WeakError> {
    let bumps = battery(field, BATTERY_HORIZON);
    let rows = bumps
        .par_iter()
        .map(|b| {
            let norm = b.sup_norm() * b.support_area();
            let rv = residual_velocity(field, b, opts)? / norm;
            let rm = residual_mass(field, b, opts)? / norm;
            Ok(BumpReport {
                center: b.center,
                radii: b.radii,
                residual_velocity: rv,
                residual_mass: rm,
                pass: rv.abs() <= threshold && rm.abs() <= threshold,
            })
        })
        .collect::<Result<Vec<_>, WeakError>>()?;
    Ok(VerificationReport {
        threshold,
        pass: rows.iter().all(|r| r.pass),
        bumps: rows,
    })
}

/// Field with its front moved to `s(t) + shift_rate t` and its weight scaled.
pub fn perturb(field: &PiecewiseField, shift_rate: f64, weight_scale: f64) -> PiecewiseField {
    field.clone().perturbed(FrontPerturbation {
        shift_rate,
        weight_scale,
    })
}
