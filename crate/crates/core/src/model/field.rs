use super::{DeltaShockPath, RiemannData, SideMotion, SourceSpec};

/// Zero-density wedge opening between the last left and first right
/// characteristics once the front has died.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumRegion {
    t_start: f64,
    x_start: f64,
    left: SideMotion,
    right: SideMotion,
}

impl VacuumRegion {
    /// Boundaries are the characteristics through `(x_start, t_start)`.
    /// Callers guarantee the right side outruns the left after `t_start`.
    pub(crate) fn new(t_start: f64, x_start: f64, left: SideMotion, right: SideMotion) -> Self {
        VacuumRegion {
            t_start,
            x_start,
            left,
            right,
        }
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn x_start(&self) -> f64 {
        self.x_start
    }

    pub fn x_left(&self, t: f64) -> f64 {
        self.x_start + self.left.displacement(t) - self.left.displacement(self.t_start)
    }

    pub fn x_right(&self, t: f64) -> f64 {
        self.x_start + self.right.displacement(t) - self.right.displacement(self.t_start)
    }

    /// `dx_left/dt`.
    pub fn left_slope(&self, t: f64) -> f64 {
        self.left.velocity(t)
    }

    /// `dx_right/dt`.
    pub fn right_slope(&self, t: f64) -> f64 {
        self.right.velocity(t)
    }

    /// Strict interior test.
    pub fn contains(&self, x: f64, t: f64) -> bool {
        t > self.t_start && x > self.x_left(t) && x < self.x_right(t)
    }
}

/// Deliberate corruption of a front, used to check that the weak-form
/// verifier rejects paths that violate the jump conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontPerturbation {
    /// The front is moved to `s(t) + shift_rate * t`.
    pub shift_rate: f64,
    /// The weight is replaced by `weight_scale * w(t)`.
    pub weight_scale: f64,
}

impl Default for FrontPerturbation {
    fn default() -> Self {
        FrontPerturbation {
            shift_rate: 0.0,
            weight_scale: 1.0,
        }
    }
}

/// What the solution looks like at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldState {
    Smooth {
        rho: f64,
        u: f64,
    },
    Front {
        weight: f64,
        velocity: f64,
    },
    Vacuum,
    /// Past the death of a front whose post-death structure is not constructed.
    Unresolved,
}

/// Piecewise solution: uniform state left of the front, delta mass on it,
/// uniform state right of it, and a vacuum wedge after the front dies.
#[derive(Debug, Clone)]
pub struct PiecewiseField {
    data: RiemannData,
    source: SourceSpec,
    path: DeltaShockPath,
    vacuum: Option<VacuumRegion>,
    perturbation: FrontPerturbation,
}

impl PiecewiseField {
    pub(crate) fn new(
        data: RiemannData,
        source: SourceSpec,
        path: DeltaShockPath,
        vacuum: Option<VacuumRegion>,
    ) -> Self {
        PiecewiseField {
            data,
            source,
            path,
            vacuum,
            perturbation: FrontPerturbation::default(),
        }
    }

    pub fn data(&self) -> &RiemannData {
        &self.data
    }

    pub fn source(&self) -> &SourceSpec {
        &self.source
    }

    pub fn path(&self) -> &DeltaShockPath {
        &self.path
    }

    pub fn vacuum(&self) -> Option<&VacuumRegion> {
        self.vacuum.as_ref()
    }

    pub fn death(&self) -> Option<f64> {
        self.path.death()
    }

    pub fn perturbation(&self) -> FrontPerturbation {
        self.perturbation
    }

    pub fn perturbed(mut self, perturbation: FrontPerturbation) -> Self {
        self.perturbation = perturbation;
        self
    }

    pub fn front_position(&self, t: f64) -> f64 {
        self.path.position(t) + self.perturbation.shift_rate * t
    }

    pub fn front_speed(&self, t: f64) -> f64 {
        self.path.speed(t) + self.perturbation.shift_rate
    }

    pub fn front_weight(&self, t: f64) -> f64 {
        self.perturbation.weight_scale * self.path.weight(t)
    }

    /// `(rho, u)` of the uniform state left of the front.
    pub fn left_state(&self, _x: f64, t: f64) -> (f64, f64) {
        (self.data.rho_minus(), self.path.left_velocity(t))
    }

    /// `(rho, u)` of the uniform state right of the front.
    pub fn right_state(&self, _x: f64, t: f64) -> (f64, f64) {
        (self.data.rho_plus(), self.path.right_velocity(t))
    }

    pub fn state_at(&self, x: f64, t: f64) -> FieldState {
        let smooth = |(rho, u): (f64, f64)| FieldState::Smooth { rho, u };
        let alive = self.death().is_none_or(|d| t <= d);
        if alive {
            let s = self.front_position(t);
            return if x < s {
                smooth(self.left_state(x, t))
            } else if x > s {
                smooth(self.right_state(x, t))
            } else {
                FieldState::Front {
                    weight: self.front_weight(t),
                    velocity: self.front_speed(t),
                }
            };
        }
        match &self.vacuum {
            Some(v) if v.contains(x, t) => FieldState::Vacuum,
            Some(v) if x <= v.x_left(t) => smooth(self.left_state(x, t)),
            Some(_) => smooth(self.right_state(x, t)),
            None => FieldState::Unresolved,
        }
    }
}
