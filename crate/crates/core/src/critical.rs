//! Entropy monitoring, critical times and case classification.
//!
//! Every regime is sorted into the solution diagram it produces. The
//! named diagrams (`Fig1a` ... `Fig5`) follow the case analysis for
//! `g = 1`, `g = -u` and `(f, g) = (1, -u)`; the remaining regimes get their
//! own tags.
//!
//! Decision thresholds built from several inputs (`u_- + u_+`,
//! `1 + u_+ + ln u_-`, `t5 - t6`) are compared to zero with a relative
//! tolerance of [`TIE_TOL`], and ties go to the equality branch.

use crate::grh_ode::{self, IntegratorOptions, StopReason};
use crate::model::{PiecewiseField, Problem, RiemannData, Sign, SourceSpec};
use crate::roots;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Search horizon for roots in regimes where the front may live forever.
pub const HORIZON: f64 = 50.0;
/// Relative tolerance for ties on composite decision thresholds.
pub const TIE_TOL: f64 = 1e-12;

/// `p(t) = u_- e^{-t} - u_+`, twice the entropy margin for `g = -u`.
pub fn p(data: &RiemannData, t: f64) -> f64 {
    data.u_minus() * (-t).exp() - data.u_plus()
}

pub fn p_prime(data: &RiemannData, t: f64) -> f64 {
    -data.u_minus() * (-t).exp()
}

/// `q(t) = u_- e^{-t} - (u_+ + t)`, twice the entropy margin for `(f, g) = (1, -u)`.
pub fn q(data: &RiemannData, t: f64) -> f64 {
    data.u_minus() * (-t).exp() - (data.u_plus() + t)
}

pub fn q_prime(data: &RiemannData, t: f64) -> f64 {
    -data.u_minus() * (-t).exp() - 1.0
}

/// Named critical times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CriticalTime {
    /// Front speed vanishes (`g = 1`).
    #[serde(rename = "t1")]
    T1,
    /// Vertex of the left characteristics (`g = 1`, `u_- < 0`).
    #[serde(rename = "t1*")]
    T1Star,
    /// Front returns to `x = 0` (`g = 1`).
    #[serde(rename = "t2")]
    T2,
    /// Vertex of the right characteristics (`f = 1`, `u_+ < 0`).
    #[serde(rename = "t2*")]
    T2Star,
    /// Death for `g = -u`, `u_- > u_+ > 0`.
    #[serde(rename = "t3")]
    T3,
    /// Turning point for `g = -u`, `u_- > 0 > u_+`.
    #[serde(rename = "t4")]
    T4,
    /// Death for `(f, g) = (1, -u)`.
    #[serde(rename = "t5")]
    T5,
    /// Inflection of the front for `(f, g) = (1, -u)`, `u_- > 1`.
    #[serde(rename = "t6")]
    T6,
    /// First turning point in the concave-convex backward excursion.
    #[serde(rename = "t7")]
    T7,
    /// Second turning point in the concave-convex backward excursion.
    #[serde(rename = "t8")]
    T8,
    /// Single turning point when the front starts backward.
    #[serde(rename = "t9")]
    T9,
    /// Front returns to `x = 0` for `g = -u`.
    #[serde(rename = "t_hat")]
    THat,
    /// Maximum of `q` when `u_- < -1`.
    #[serde(rename = "t_tilde")]
    TTilde,
}

impl CriticalTime {
    pub fn name(self) -> &'static str {
        match self {
            CriticalTime::T1 => "t1",
            CriticalTime::T1Star => "t1*",
            CriticalTime::T2 => "t2",
            CriticalTime::T2Star => "t2*",
            CriticalTime::T3 => "t3",
            CriticalTime::T4 => "t4",
            CriticalTime::T5 => "t5",
            CriticalTime::T6 => "t6",
            CriticalTime::T7 => "t7",
            CriticalTime::T8 => "t8",
            CriticalTime::T9 => "t9",
            CriticalTime::THat => "t_hat",
            CriticalTime::TTilde => "t_tilde",
        }
    }
}

/// Solution diagram a problem falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Panel {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig1d,
    Fig2a,
    Fig2b,
    Fig2c,
    Fig2d,
    Fig2e,
    Fig2f,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig3d,
    Fig3e,
    Fig3f,
    Fig4a,
    Fig4b,
    Fig5,
    /// `f = g = 0`: straight front.
    Homogeneous,
    /// `f = g = -u`: front decelerates, never dies.
    UniformDrag,
    /// `g = -1`: left side decelerates; the front dies at `u_- - u_+`.
    DecelLeft,
    /// `g = +u`, `u_- >= 0`: the front never dies.
    GrowthLeftPersistent,
    /// `g = +u`, `u_- < 0`: the front dies at `ln(u_+ / u_-)`.
    GrowthLeftVacuum,
    /// Sources handled by the integrator only.
    General,
}

impl fmt::Display for Panel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    pub regime: &'static str,
    pub panel: Panel,
    pub times: BTreeMap<CriticalTime, f64>,
    pub death: Option<f64>,
    pub vacuum_after: bool,
}

impl CaseReport {
    pub fn time(&self, name: CriticalTime) -> Option<f64> {
        self.times.get(&name).copied()
    }
}

/// Entropy margins; the front is admissible while both are positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyMargin {
    /// `sigma - u(s+0)`.
    pub lower: f64,
    /// `u(s-0) - sigma`.
    pub upper: f64,
}

impl EntropyMargin {
    pub fn holds(&self) -> bool {
        self.lower > 0.0 && self.upper > 0.0
    }
}

pub fn entropy_margin(field: &PiecewiseField, t: f64) -> EntropyMargin {
    let sigma = field.front_speed(t);
    let path = field.path();
    EntropyMargin {
        lower: sigma - path.right_velocity(t),
        upper: path.left_velocity(t) - sigma,
    }
}

fn sign_tol(x: f64, scale: f64) -> Ordering {
    if x.abs() <= TIE_TOL * scale.max(1.0) {
        Ordering::Equal
    } else if x > 0.0 {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Critical times of a problem (the `times` map of its [`CaseReport`]).
pub fn critical_times(problem: &Problem) -> BTreeMap<CriticalTime, f64> {
    classify(problem).times
}

/// Panel, critical times and death time.
///
/// Sources without a closed form are classified by integrating the front up
/// to [`HORIZON`] and watching the entropy margin.
pub fn classify(problem: &Problem) -> CaseReport {
    classify_parts(problem.data(), problem.source()).unwrap_or_else(|| {
        let opts = IntegratorOptions {
            tol: 1e-10,
            ..Default::default()
        };
        let death = match grh_ode::integrate(problem, HORIZON, &opts) {
            Ok(run) => match run.stop {
                StopReason::EntropyDeath(t) => Some(t),
                StopReason::Horizon => None,
            },
            Err(_) => None,
        };
        CaseReport {
            regime: problem.source().kind_name(),
            panel: Panel::General,
            times: BTreeMap::new(),
            death,
            vacuum_after: death.is_some(),
        }
    })
}

/// Classification for every source with a closed-form solution; `None` for
/// [`SourceSpec::General`].
pub(crate) fn classify_parts(data: &RiemannData, source: &SourceSpec) -> Option<CaseReport> {
    let (panel, times, death) = match source {
        SourceSpec::Homogeneous => (Panel::Homogeneous, BTreeMap::new(), None),
        SourceSpec::UniformDrag => (Panel::UniformDrag, BTreeMap::new(), None),
        SourceSpec::ConstLeft(Sign::Plus) => {
            let (panel, times) = const_left_case(data);
            (panel, times, None)
        }
        SourceSpec::ConstLeft(Sign::Minus) => (Panel::DecelLeft, BTreeMap::new(), Some(data.u_minus() - data.u_plus())),
        SourceSpec::LinearDragLeft(Sign::Minus) => drag_left_case(data),
        SourceSpec::LinearDragLeft(Sign::Plus) => {
            if data.u_minus() < 0.0 {
                let death = (data.u_plus() / data.u_minus()).ln();
                (Panel::GrowthLeftVacuum, BTreeMap::new(), Some(death))
            } else {
                (Panel::GrowthLeftPersistent, BTreeMap::new(), None)
            }
        }
        SourceSpec::MixedConstRightDragLeft => mixed_case(data),
        SourceSpec::General { .. } => return None,
    };
    Some(CaseReport {
        regime: source.kind_name(),
        panel,
        times,
        death,
        vacuum_after: death.is_some(),
    })
}

/// `f = 0`, `g = 1`.
fn const_left_case(data: &RiemannData) -> (Panel, BTreeMap<CriticalTime, f64>) {
    let (um, up) = (data.u_minus(), data.u_plus());
    let sum = um + up;
    let mut times = BTreeMap::new();
    if sign_tol(sum, um.abs() + up.abs()) != Ordering::Less {
        return (if up > 0.0 { Panel::Fig1a } else { Panel::Fig1b }, times);
    }
    // sigma = (u_- + u_+ + t)/2 and s = t^2/4 + (u_- + u_+) t/2.
    times.insert(CriticalTime::T1, -sum);
    times.insert(CriticalTime::T2, -2.0 * sum);
    if um >= 0.0 {
        (Panel::Fig1c, times)
    } else {
        times.insert(CriticalTime::T1Star, -um);
        (Panel::Fig1d, times)
    }
}

/// `f = 0`, `g = -u`.
fn drag_left_case(data: &RiemannData) -> (Panel, BTreeMap<CriticalTime, f64>, Option<f64>) {
    let (um, up) = (data.u_minus(), data.u_plus());
    let mut times = BTreeMap::new();
    if sign_tol(um + up, um.abs() + up.abs()) == Ordering::Greater {
        if up > 0.0 {
            let t3 = (um / up).ln();
            times.insert(CriticalTime::T3, t3);
            (Panel::Fig2a, times, Some(t3))
        } else if up < 0.0 {
            let t4 = (-um / up).ln();
            times.insert(CriticalTime::T4, t4);
            let s = |t: f64| 0.5 * (-um * (-t).exp_m1() + up * t);
            let ds = |t: f64| 0.5 * (um * (-t).exp() + up);
            if let Some(t_hat) = roots::first_root_after(s, ds, t4, HORIZON) {
                times.insert(CriticalTime::THat, t_hat);
            }
            (Panel::Fig2b, times, None)
        } else {
            (Panel::Fig2c, times, None)
        }
    } else if um > 0.0 {
        (Panel::Fig2d, times, None)
    } else if um < 0.0 {
        (Panel::Fig2e, times, None)
    } else {
        (Panel::Fig2f, times, None)
    }
}

/// `f = 1`, `g = -u`.
fn mixed_case(data: &RiemannData) -> (Panel, BTreeMap<CriticalTime, f64>, Option<f64>) {
    let (um, up) = (data.u_minus(), data.u_plus());
    let mut times = BTreeMap::new();

    // q(0) = u_- - u_+ > 0 and q -> -inf, with a single sign change.
    let t5 = roots::first_root_after(|t| q(data, t), |t| q_prime(data, t), 0.0, HORIZON)
        .expect("q changes sign before the horizon");
    times.insert(CriticalTime::T5, t5);
    if up < 0.0 {
        times.insert(CriticalTime::T2Star, -up);
    }
    if um < -1.0 {
        // q' = -u_- e^{-t} - 1 starts positive and tends to -1.
        let qp = |t: f64| q_prime(data, t);
        let qpp = |t: f64| um * (-t).exp();
        if let Some(tt) = roots::first_root_after(qp, qpp, 0.0, HORIZON) {
            times.insert(CriticalTime::TTilde, tt);
        }
    }

    let sigma = |t: f64| 0.5 * (um * (-t).exp() + up + t);
    let dsigma = |t: f64| 0.5 * (1.0 - um * (-t).exp());
    let root_in = |lo: f64, hi: f64| roots::bisect_newton(sigma, dsigma, lo, hi);

    let t6 = (um > 1.0).then(|| um.ln());
    if let Some(t6) = t6 {
        times.insert(CriticalTime::T6, t6);
    }

    let panel = match sign_tol(um + up, um.abs() + up.abs()) {
        Ordering::Equal => {
            if let Some(t6) = t6 {
                // Starts at rest, dips backward through t6, turns at t9.
                if let Some(t9) = root_in(t6, t5) {
                    times.insert(CriticalTime::T9, t9);
                }
                Panel::Fig5
            } else {
                Panel::Fig3b
            }
        }
        Ordering::Greater => match t6 {
            None if up >= 0.0 => Panel::Fig3a,
            None => Panel::Fig3b,
            Some(t6) => {
                let d = 1.0 + up + um.ln();
                match sign_tol(d, 1.0 + up.abs() + um.ln()) {
                    Ordering::Equal => Panel::Fig3c,
                    Ordering::Less => {
                        if let Some(t7) = root_in(0.0, t6) {
                            times.insert(CriticalTime::T7, t7);
                        }
                        if let Some(t8) = root_in(t6, t5) {
                            times.insert(CriticalTime::T8, t8);
                        }
                        Panel::Fig3d
                    }
                    Ordering::Greater => {
                        if sign_tol(t5 - t6, t5) == Ordering::Greater {
                            Panel::Fig3c
                        } else if up >= 0.0 {
                            Panel::Fig3e
                        } else {
                            Panel::Fig3f
                        }
                    }
                }
            }
        },
        Ordering::Less => {
            if um <= 0.0 {
                Panel::Fig4a
            } else if let Some(t6) = t6 {
                if let Some(t9) = root_in(t6, t5) {
                    times.insert(CriticalTime::T9, t9);
                }
                Panel::Fig5
            } else {
                if let Some(t9) = root_in(0.0, t5) {
                    times.insert(CriticalTime::T9, t9);
                }
                Panel::Fig4b
            }
        }
    };
    (panel, times, Some(t5))
}
