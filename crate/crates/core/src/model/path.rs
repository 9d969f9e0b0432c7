use super::RiemannData;
use serde::Serialize;

/// Velocity history of the uniform state on one side of the front.
///
/// In every closed-form regime the state on each side stays constant in `x`,
/// so a side is fully described by `u(t)` and its time integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SideMotion {
    /// `u = u0`.
    Uniform { u0: f64 },
    /// `u = u0 + a t` (constant body force `a`).
    Accelerated { u0: f64, accel: f64 },
    /// `u = u0 e^{-t}` (force `-u`).
    Damped { u0: f64 },
    /// `u = u0 e^{t}` (force `+u`).
    Amplified { u0: f64 },
}

impl SideMotion {
    pub fn velocity(&self, t: f64) -> f64 {
        match *self {
            SideMotion::Uniform { u0 } => u0,
            SideMotion::Accelerated { u0, accel } => u0 + accel * t,
            SideMotion::Damped { u0 } => u0 * (-t).exp(),
            SideMotion::Amplified { u0 } => u0 * t.exp(),
        }
    }

    /// `∫_0^t u(τ) dτ`, the displacement of a characteristic.
    pub fn displacement(&self, t: f64) -> f64 {
        match *self {
            SideMotion::Uniform { u0 } => u0 * t,
            SideMotion::Accelerated { u0, accel } => u0 * t + 0.5 * accel * t * t,
            SideMotion::Damped { u0 } => -u0 * (-t).exp_m1(),
            SideMotion::Amplified { u0 } => u0 * t.exp_m1(),
        }
    }

    pub fn acceleration(&self, t: f64) -> f64 {
        match *self {
            SideMotion::Uniform { .. } => 0.0,
            SideMotion::Accelerated { accel, .. } => accel,
            SideMotion::Damped { u0 } => -u0 * (-t).exp(),
            SideMotion::Amplified { u0 } => u0 * t.exp(),
        }
    }
}

/// One accepted point of an integrated front, with the time derivatives
/// needed for cubic Hermite interpolation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrackSample {
    pub t: f64,
    pub s: f64,
    pub w: f64,
    pub u_l: f64,
    pub u_r: f64,
    pub ds: f64,
    pub dw: f64,
    pub du_l: f64,
    pub du_r: f64,
}

/// Piecewise cubic Hermite interpolant through a sequence of [`TrackSample`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteTrack {
    samples: Vec<TrackSample>,
}

impl HermiteTrack {
    /// Samples must be strictly increasing in `t`; at least one is required.
    pub fn new(samples: Vec<TrackSample>) -> Self {
        assert!(!samples.is_empty(), "empty track");
        debug_assert!(samples.windows(2).all(|p| p[0].t < p[1].t));
        HermiteTrack { samples }
    }

    pub fn samples(&self) -> &[TrackSample] {
        &self.samples
    }

    pub fn t_start(&self) -> f64 {
        self.samples[0].t
    }

    pub fn t_end(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    /// Interpolated `(s, w, u_l, u_r)`. Clamped outside the sampled range.
    pub fn eval(&self, t: f64) -> [f64; 4] {
        let n = self.samples.len();
        let pick = |p: &TrackSample| [p.s, p.w, p.u_l, p.u_r];
        if t <= self.samples[0].t {
            return pick(&self.samples[0]);
        }
        if t >= self.samples[n - 1].t {
            return pick(&self.samples[n - 1]);
        }
        let i = self.samples.partition_point(|p| p.t <= t) - 1;
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        let h = b.t - a.t;
        let th = (t - a.t) / h;
        let h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
        let h10 = th * (1.0 - th) * (1.0 - th);
        let h01 = th * th * (3.0 - 2.0 * th);
        let h11 = th * th * (th - 1.0);
        let mix = |ya: f64, da: f64, yb: f64, db: f64| h00 * ya + h10 * h * da + h01 * yb + h11 * h * db;
        [
            mix(a.s, a.ds, b.s, b.ds),
            mix(a.w, a.dw, b.w, b.dw),
            mix(a.u_l, a.du_l, b.u_l, b.du_l),
            mix(a.u_r, a.du_r, b.u_r, b.du_r),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
enum FrontLaw {
    ClosedForm { left: SideMotion, right: SideMotion },
    Sampled(HermiteTrack),
}

/// Row of an exported front trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathSample {
    pub t: f64,
    pub s: f64,
    pub w: f64,
    pub sigma: f64,
    pub u_l: f64,
    pub u_r: f64,
}

/// The delta-shock front `t -> (s, w, u_delta, sigma)`.
///
/// Speed and front velocity coincide (`sigma = u_delta`) and equal the mean of
/// the one-sided velocity traces. Closed-form paths are valid up to `death`;
/// sampled paths up to the last sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaShockPath {
    rho_minus: f64,
    rho_plus: f64,
    law: FrontLaw,
    death: Option<f64>,
}

impl DeltaShockPath {
    /// Front between two uniform states: `s = (X_l + X_r)/2`,
    /// `w = (rho_- + rho_+)/2 (X_l - X_r)`, with `X` the side displacements.
    pub fn closed_form(data: &RiemannData, left: SideMotion, right: SideMotion, death: Option<f64>) -> Self {
        DeltaShockPath {
            rho_minus: data.rho_minus(),
            rho_plus: data.rho_plus(),
            law: FrontLaw::ClosedForm { left, right },
            death,
        }
    }

    pub fn sampled(data: &RiemannData, track: HermiteTrack, death: Option<f64>) -> Self {
        DeltaShockPath {
            rho_minus: data.rho_minus(),
            rho_plus: data.rho_plus(),
            law: FrontLaw::Sampled(track),
            death,
        }
    }

    pub fn death(&self) -> Option<f64> {
        self.death
    }

    /// Last time at which the path is defined.
    pub fn valid_until(&self) -> f64 {
        match (&self.law, self.death) {
            (_, Some(d)) => d,
            (FrontLaw::ClosedForm { .. }, None) => f64::INFINITY,
            (FrontLaw::Sampled(track), None) => track.t_end(),
        }
    }

    pub fn left_motion(&self) -> Option<SideMotion> {
        match self.law {
            FrontLaw::ClosedForm { left, .. } => Some(left),
            FrontLaw::Sampled(_) => None,
        }
    }

    pub fn right_motion(&self) -> Option<SideMotion> {
        match self.law {
            FrontLaw::ClosedForm { right, .. } => Some(right),
            FrontLaw::Sampled(_) => None,
        }
    }

    pub fn track(&self) -> Option<&HermiteTrack> {
        match &self.law {
            FrontLaw::Sampled(track) => Some(track),
            FrontLaw::ClosedForm { .. } => None,
        }
    }

    pub fn position(&self, t: f64) -> f64 {
        match &self.law {
            FrontLaw::ClosedForm { left, right } => 0.5 * (left.displacement(t) + right.displacement(t)),
            FrontLaw::Sampled(track) => track.eval(t)[0],
        }
    }

    pub fn weight(&self, t: f64) -> f64 {
        match &self.law {
            FrontLaw::ClosedForm { left, right } => {
                0.5 * (self.rho_minus + self.rho_plus) * (left.displacement(t) - right.displacement(t))
            }
            FrontLaw::Sampled(track) => track.eval(t)[1],
        }
    }

    /// Velocity of the state just left of the front.
    pub fn left_velocity(&self, t: f64) -> f64 {
        match &self.law {
            FrontLaw::ClosedForm { left, .. } => left.velocity(t),
            FrontLaw::Sampled(track) => track.eval(t)[2],
        }
    }

    /// Velocity of the state just right of the front.
    pub fn right_velocity(&self, t: f64) -> f64 {
        match &self.law {
            FrontLaw::ClosedForm { right, .. } => right.velocity(t),
            FrontLaw::Sampled(track) => track.eval(t)[3],
        }
    }

    /// `ds/dt`.
    pub fn speed(&self, t: f64) -> f64 {
        0.5 * (self.left_velocity(t) + self.right_velocity(t))
    }

    /// Velocity carried by the concentrated mass; equal to the speed.
    pub fn u_delta(&self, t: f64) -> f64 {
        self.speed(t)
    }

    /// `n + 1` evenly spaced rows on `[0, t_end]`.
    pub fn samples(&self, t_end: f64, n: usize) -> Vec<PathSample> {
        (0..=n)
            .map(|k| {
                let t = t_end * k as f64 / n as f64;
                self.sample_at(t)
            })
            .collect()
    }

    pub fn sample_at(&self, t: f64) -> PathSample {
        let (u_l, u_r) = (self.left_velocity(t), self.right_velocity(t));
        PathSample {
            t,
            s: self.position(t),
            w: self.weight(t),
            sigma: 0.5 * (u_l + u_r),
            u_l,
            u_r,
        }
    }
}
