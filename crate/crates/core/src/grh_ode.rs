//! Numerical integration of the generalized Rankine–Hugoniot conditions.
//!
//! The state is `(s, w, u_l, u_r)`: front position, weight and the velocity
//! traces on either side. With flux `u^2/2` the third jump condition fixes
//! the speed to the mean of the traces, so
//!
//! ```text
//!     ds/dt   = (u_l + u_r) / 2
//!     dw/dt   = sigma (rho_+ - rho_-) - (rho_+ u_r - rho_- u_l)
//!     du_l/dt = g(t, u_l)
//!     du_r/dt = f(t, u_r)
//! ```
//!
//! integrated by the Dormand–Prince 5(4) pair. Integration stops when the
//! entropy margin `u_l - u_r` reaches zero.

use crate::model::{DeltaShockPath, HermiteTrack, PiecewiseField, Problem, SourceSpec, TrackSample};
use thiserror::Error;

/// Smallest step the controller may take.
pub const MIN_STEP: f64 = 1e-14;
/// Width of the Hermite bisection bracket for the death event.
pub const EVENT_TOL: f64 = 1e-11;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrhError {
    #[error("step size fell below {MIN_STEP:e} at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("tolerance {0} outside [1e-14, 1e-3]")]
    InvalidTolerance(f64),
    #[error("end time must be positive and finite, got {0}")]
    InvalidHorizon(f64),
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    /// Relative and absolute error target per step.
    pub tol: f64,
    /// Upper bound on the adaptive step. Keeps the cubic Hermite dense output
    /// of the stored track as accurate as the steps themselves.
    pub max_step: f64,
    /// Disables step control and advances with this step.
    pub fixed_step: Option<f64>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            tol: 1e-10,
            max_step: 0.02,
            fixed_step: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopReason {
    Horizon,
    EntropyDeath(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrhState {
    pub t: f64,
    pub s: f64,
    pub w: f64,
    pub u_l: f64,
    pub u_r: f64,
}

impl GrhState {
    pub fn sigma(&self) -> f64 {
        0.5 * (self.u_l + self.u_r)
    }

    pub fn jump_residual(&self) -> f64 {
        jump_residual(self.sigma(), self.u_l, self.u_r)
    }
}

/// `sigma [u] - [u^2/2]` with `[v] = v_r - v_l`.
pub fn jump_residual(sigma: f64, u_l: f64, u_r: f64) -> f64 {
    sigma * (u_r - u_l) - 0.5 * (u_r * u_r - u_l * u_l)
}

#[derive(Debug, Clone)]
pub struct Integration {
    pub path: DeltaShockPath,
    pub stop: StopReason,
    pub accepted: usize,
    pub rejected: usize,
    /// Largest `|jump_residual|` over accepted steps.
    pub max_jump_residual: f64,
}

impl Integration {
    pub fn states(&self) -> Vec<GrhState> {
        let track = self.path.track().expect("integrated paths are sampled");
        track
            .samples()
            .iter()
            .map(|p| GrhState {
                t: p.t,
                s: p.s,
                w: p.w,
                u_l: p.u_l,
                u_r: p.u_r,
            })
            .collect()
    }

    pub fn end_time(&self) -> f64 {
        match self.stop {
            StopReason::EntropyDeath(t) => t,
            StopReason::Horizon => self.path.valid_until(),
        }
    }
}

type Vec4 = [f64; 4];

struct Rhs<'a> {
    source: &'a SourceSpec,
    rho_minus: f64,
    rho_plus: f64,
}

impl Rhs<'_> {
    fn eval(&self, t: f64, y: &Vec4) -> Vec4 {
        let [_, _, ul, ur] = *y;
        let sigma = 0.5 * (ul + ur);
        [
            sigma,
            sigma * (self.rho_plus - self.rho_minus) - (self.rho_plus * ur - self.rho_minus * ul),
            self.source.left(t, ul),
            self.source.right(t, ur),
        ]
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Step {
    y: Vec4,
    /// Right-hand side at the new point (first stage of the next step).
    f: Vec4,
    err: Vec4,
}

fn dopri_step(rhs: &Rhs, t: f64, y: &Vec4, f0: &Vec4, h: f64) -> Step {
    let mut k = [[0.0; 4]; 7];
    k[0] = *f0;
    for i in 1..7 {
        let mut yi = *y;
        for (j, kj) in k.iter().enumerate().take(i) {
            for c in 0..4 {
                yi[c] += h * A[i][j] * kj[c];
            }
        }
        k[i] = rhs.eval(t + C[i] * h, &yi);
        if i == 6 {
            // The last stage is evaluated at the 5th-order solution (FSAL).
            let mut err = [0.0; 4];
            for (e, kj) in E.iter().zip(&k) {
                for c in 0..4 {
                    err[c] += h * e * kj[c];
                }
            }
            return Step { y: yi, f: k[6], err };
        }
    }
    unreachable!()
}

fn error_norm(err: &Vec4, y0: &Vec4, y1: &Vec4, tol: f64) -> f64 {
    let sum: f64 = (0..4)
        .map(|c| {
            let sc = tol + tol * y0[c].abs().max(y1[c].abs());
            (err[c] / sc).powi(2)
        })
        .sum();
    (sum / 4.0).sqrt()
}

fn sample(t: f64, y: &Vec4, f: &Vec4) -> TrackSample {
    TrackSample {
        t,
        s: y[0],
        w: y[1],
        u_l: y[2],
        u_r: y[3],
        ds: f[0],
        dw: f[1],
        du_l: f[2],
        du_r: f[3],
    }
}

/// Zero of the margin inside an accepted step that ended with `u_l <= u_r`.
///
/// The crossing is bracketed on the cubic Hermite interpolant of the margin,
/// then polished with Newton iterations on genuine Runge–Kutta substeps from
/// the start of the step, so the reported time is the zero of the discrete
/// solution rather than of its interpolant.
fn locate_death(rhs: &Rhs, t0: f64, y0: &Vec4, f0: &Vec4, h: f64, y1: &Vec4, f1: &Vec4) -> (f64, Step) {
    let (g0, g1) = (y0[2] - y0[3], y1[2] - y1[3]);
    let (d0, d1) = (f0[2] - f0[3], f1[2] - f1[3]);
    let hermite = |tau: f64| {
        let th = (tau - t0) / h;
        let h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
        let h10 = th * (1.0 - th) * (1.0 - th);
        let h01 = th * th * (3.0 - 2.0 * th);
        let h11 = th * th * (th - 1.0);
        h00 * g0 + h10 * h * d0 + h01 * g1 + h11 * h * d1
    };
    let mut tau = crate::roots::bisect(hermite, t0, t0 + h, EVENT_TOL).unwrap_or(t0 + h);
    let mut step = dopri_step(rhs, t0, y0, f0, tau - t0);
    for _ in 0..4 {
        let g = step.y[2] - step.y[3];
        let dg = step.f[2] - step.f[3];
        if g == 0.0 || dg == 0.0 || !dg.is_finite() {
            break;
        }
        let next = (tau - g / dg).clamp(t0, t0 + h);
        if next == tau {
            break;
        }
        tau = next;
        step = dopri_step(rhs, t0, y0, f0, tau - t0);
    }
    (tau, step)
}

/// Fewest adaptive steps over the life of a front. A front that dies
/// sooner is integrated again with a proportionally smaller `max_step`, so
/// the cubic dense output resolves short lifetimes as well as long ones.
pub const MIN_LIFETIME_STEPS: usize = 32;

/// Integrates the front from `t = 0` to `t_end` or to its death.
pub fn integrate(problem: &Problem, t_end: f64, opts: &IntegratorOptions) -> Result<Integration, GrhError> {
    let run = integrate_once(problem, t_end, opts)?;
    match run.stop {
        StopReason::EntropyDeath(d) if opts.fixed_step.is_none() && run.accepted < MIN_LIFETIME_STEPS => {
            let refined = IntegratorOptions {
                max_step: opts.max_step.min(d / MIN_LIFETIME_STEPS as f64),
                ..*opts
            };
            integrate_once(problem, t_end, &refined)
        }
        _ => Ok(run),
    }
}

fn integrate_once(problem: &Problem, t_end: f64, opts: &IntegratorOptions) -> Result<Integration, GrhError> {
    if !(1e-14..=1e-3).contains(&opts.tol) {
        return Err(GrhError::InvalidTolerance(opts.tol));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(GrhError::InvalidHorizon(t_end));
    }
    let data = problem.data();
    let rhs = Rhs {
        source: problem.source(),
        rho_minus: data.rho_minus(),
        rho_plus: data.rho_plus(),
    };

    let mut t = 0.0;
    let mut y: Vec4 = [0.0, 0.0, data.u_minus(), data.u_plus()];
    let mut f = rhs.eval(t, &y);
    let mut samples = vec![sample(t, &y, &f)];
    let mut h = opts.fixed_step.unwrap_or(0.1 * opts.tol.powf(0.2)).min(opts.max_step);
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let mut max_jump_residual = 0.0f64;

    let finish = |samples: Vec<TrackSample>, stop, accepted, rejected, max_jump_residual| {
        let death = match stop {
            StopReason::EntropyDeath(d) => Some(d),
            StopReason::Horizon => None,
        };
        Integration {
            path: DeltaShockPath::sampled(data, HermiteTrack::new(samples), death),
            stop,
            accepted,
            rejected,
            max_jump_residual,
        }
    };

    while t < t_end {
        let remaining = t_end - t;
        let last = h >= remaining;
        let h_try = if last { remaining } else { h };
        if h_try < MIN_STEP && !last {
            return Err(GrhError::StepUnderflow { t });
        }
        let step = dopri_step(&rhs, t, &y, &f, h_try);
        let finite = step.y.iter().chain(&step.f).all(|v| v.is_finite());
        let err = if finite {
            error_norm(&step.err, &y, &step.y, opts.tol)
        } else {
            f64::INFINITY
        };
        if opts.fixed_step.is_none() && err > 1.0 {
            rejected += 1;
            h = h_try * (0.9 * err.powf(-0.2)).max(0.2);
            continue;
        }
        if !finite {
            return Err(GrhError::NonFinite { t });
        }

        if step.y[2] - step.y[3] <= 0.0 {
            let (death, at) = locate_death(&rhs, t, &y, &f, h_try, &step.y, &step.f);
            accepted += 1;
            if death > t {
                samples.push(sample(death, &at.y, &at.f));
            }
            return Ok(finish(
                samples,
                StopReason::EntropyDeath(death),
                accepted,
                rejected,
                max_jump_residual,
            ));
        }

        t = if last { t_end } else { t + h_try };
        y = step.y;
        f = step.f;
        accepted += 1;
        samples.push(sample(t, &y, &f));
        let state = GrhState {
            t,
            s: y[0],
            w: y[1],
            u_l: y[2],
            u_r: y[3],
        };
        max_jump_residual = max_jump_residual.max(state.jump_residual().abs());

        if opts.fixed_step.is_none() {
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h_try * factor).min(opts.max_step);
        }
    }
    Ok(finish(
        samples,
        StopReason::Horizon,
        accepted,
        rejected,
        max_jump_residual,
    ))
}

/// Piecewise field built on an integrated front. No vacuum is constructed,
/// so points past the death of the front are reported as unresolved.
pub fn integrate_field(problem: &Problem, t_end: f64, opts: &IntegratorOptions) -> Result<PiecewiseField, GrhError> {
    let run = integrate(problem, t_end, opts)?;
    Ok(PiecewiseField::new(
        *problem.data(),
        problem.source().clone(),
        run.path,
        None,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate, RiemannData, Sign};
    use approx::assert_abs_diff_eq;

    fn problem(um: f64, up: f64, source: SourceSpec) -> Problem {
        validate(RiemannData::new(1.0, um, 1.0, up).unwrap(), source).unwrap()
    }

    #[test]
    fn jump_residual_examples() {
        assert_eq!(jump_residual(1.0, 2.0, 0.0), 0.0);
        assert_abs_diff_eq!(jump_residual(1.1, 2.0, 0.0), -0.2, epsilon = 1e-15);
    }

    #[test]
    fn homogeneous_is_straight() {
        let run = integrate(&problem(2.0, 0.0, SourceSpec::Homogeneous), 3.0, &Default::default()).unwrap();
        assert_eq!(run.stop, StopReason::Horizon);
        assert_abs_diff_eq!(run.path.position(3.0), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(run.path.weight(3.0), 6.0, epsilon = 1e-12);
        assert!(run.max_jump_residual <= 1e-13);
    }

    #[test]
    fn mixed_death_matches_q_root() {
        let run = integrate(
            &problem(2.0, 0.0, SourceSpec::MixedConstRightDragLeft),
            5.0,
            &Default::default(),
        )
        .unwrap();
        match run.stop {
            StopReason::EntropyDeath(t) => assert_abs_diff_eq!(t, 0.852_605_502_013_725_5, epsilon = 1e-8),
            other => panic!("unexpected stop {other:?}"),
        }
    }

    #[test]
    fn decel_left_mirrors_accel_left() {
        let opts = IntegratorOptions::default();
        let plus = integrate(&problem(2.0, 0.5, SourceSpec::ConstLeft(Sign::Plus)), 1.0, &opts).unwrap();
        let minus = integrate(&problem(-0.5, -2.0, SourceSpec::ConstLeft(Sign::Minus)), 1.0, &opts).unwrap();
        for k in 0..=20 {
            let t = k as f64 / 20.0;
            assert_abs_diff_eq!(minus.path.position(t), -plus.path.position(t), epsilon = 1e-10);
        }
    }

    #[test]
    fn rejects_bad_options() {
        let p = problem(2.0, 0.0, SourceSpec::Homogeneous);
        let bad = IntegratorOptions {
            tol: 1e-2,
            ..Default::default()
        };
        assert_eq!(integrate(&p, 1.0, &bad).unwrap_err(), GrhError::InvalidTolerance(1e-2));
        assert_eq!(
            integrate(&p, 0.0, &Default::default()).unwrap_err(),
            GrhError::InvalidHorizon(0.0)
        );
    }

    #[test]
    fn singular_source_underflows() {
        use crate::model::Forcing;
        // du/dt = u^2 blows up at t = 1/u0 = 0.5.
        let src = SourceSpec::General {
            f: Forcing::constant(0.0),
            g: Forcing::custom(|_, u| u * u),
        };
        let err = integrate(&problem(2.0, 0.0, src), 1.0, &Default::default()).unwrap_err();
        assert!(
            matches!(err, GrhError::StepUnderflow { t } if (t - 0.5).abs() < 1e-3),
            "{err:?}"
        );
    }
}
