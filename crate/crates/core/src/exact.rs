//! Closed-form delta-shock solutions.
//!
//! In every regime with a closed form, the states on both sides of the front
//! stay uniform in `x` and only evolve in time, so each solution is fixed by
//! the pair of [`SideMotion`]s plus the death time of the front.

use crate::characteristics;
use crate::critical;
use crate::model::{
    DeltaShockPath, FieldState, ModelError, PiecewiseField, Problem, RiemannData, SideMotion, Sign, SourceSpec,
};

/// `f = g = 0`.
pub fn solve_homogeneous(data: &RiemannData) -> PiecewiseField {
    build(data, SourceSpec::Homogeneous)
}

/// `f = 0`, `g = c`.
pub fn solve_const_left(data: &RiemannData, c: Sign) -> PiecewiseField {
    build(data, SourceSpec::ConstLeft(c))
}

/// `f = 0`, `g = sign * u`.
pub fn solve_drag_left(data: &RiemannData, sign: Sign) -> PiecewiseField {
    build(data, SourceSpec::LinearDragLeft(sign))
}

/// `f = 1`, `g = -u`. The front always dies, at the root of `q`.
pub fn solve_mixed(data: &RiemannData) -> PiecewiseField {
    build(data, SourceSpec::MixedConstRightDragLeft)
}

/// `f = g = -u`. The front never dies.
pub fn solve_uniform_drag(data: &RiemannData) -> PiecewiseField {
    build(data, SourceSpec::UniformDrag)
}

/// Dispatches on the source; general sources have no closed form.
pub fn solve(problem: &Problem) -> Result<PiecewiseField, ModelError> {
    let source = problem.source();
    if source.is_general() {
        return Err(ModelError::UnsupportedSource(
            "general sources have no closed form; integrate the jump conditions instead".into(),
        ));
    }
    Ok(build(problem.data(), source.clone()))
}

pub fn eval_state(field: &PiecewiseField, x: f64, t: f64) -> FieldState {
    field.state_at(x, t)
}

/// Velocity histories `(left, right)` for sources with a closed form.
pub fn side_motions(data: &RiemannData, source: &SourceSpec) -> Option<(SideMotion, SideMotion)> {
    let (um, up) = (data.u_minus(), data.u_plus());
    let uniform = |u0| SideMotion::Uniform { u0 };
    let motions = match source {
        SourceSpec::Homogeneous => (uniform(um), uniform(up)),
        SourceSpec::ConstLeft(c) => (
            SideMotion::Accelerated {
                u0: um,
                accel: c.value(),
            },
            uniform(up),
        ),
        SourceSpec::LinearDragLeft(Sign::Minus) => (SideMotion::Damped { u0: um }, uniform(up)),
        SourceSpec::LinearDragLeft(Sign::Plus) => (SideMotion::Amplified { u0: um }, uniform(up)),
        SourceSpec::MixedConstRightDragLeft => (
            SideMotion::Damped { u0: um },
            SideMotion::Accelerated { u0: up, accel: 1.0 },
        ),
        SourceSpec::UniformDrag => (SideMotion::Damped { u0: um }, SideMotion::Damped { u0: up }),
        SourceSpec::General { .. } => return None,
    };
    Some(motions)
}

fn build(data: &RiemannData, source: SourceSpec) -> PiecewiseField {
    let (left, right) = side_motions(data, &source).expect("closed-form source");
    let death = critical::classify_parts(data, &source)
        .expect("closed-form source")
        .death;
    let path = DeltaShockPath::closed_form(data, left, right, death);
    let vacuum = characteristics::vacuum_from_path(&path);
    PiecewiseField::new(*data, source, path, vacuum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn data(um: f64, up: f64) -> RiemannData {
        RiemannData::new(1.0, um, 1.0, up).unwrap()
    }

    #[test]
    fn homogeneous_two_zero() {
        let f = solve_homogeneous(&data(2.0, 0.0));
        let p = f.path();
        assert_eq!((p.position(1.0), p.speed(1.0), p.weight(1.0)), (1.0, 1.0, 2.0));
        assert_eq!(f.death(), None);
        assert!(f.vacuum().is_none());
    }

    #[test]
    fn const_left_two_zero() {
        // Independent ODE integration gives s(1) = 5/4 and w(1) = 5/2.
        let f = solve_const_left(&data(2.0, 0.0), Sign::Plus);
        let p = f.path();
        assert_eq!(p.position(1.0), 1.25);
        assert_eq!(p.weight(1.0), 2.5);
        assert_eq!(p.speed(1.0), 1.5);
        assert_eq!((p.position(0.0), p.weight(0.0), p.speed(0.0)), (0.0, 0.0, 1.0));
    }

    #[test]
    fn drag_left_values() {
        let f = solve_drag_left(&data(1.0, -1.0), Sign::Minus);
        assert_abs_diff_eq!(f.path().position(1.0), -0.183_939_720_585_721_16, epsilon = 1e-15);
        let f = solve_drag_left(&data(2.0, 1.0), Sign::Minus);
        assert_eq!(f.death(), Some(2f64.ln()));
        assert!(f.vacuum().is_some());
        assert_eq!(f.path().speed(0.0), 1.5);
    }

    #[test]
    fn mixed_values_and_tangency() {
        let f = solve_mixed(&data(2.0, 0.0));
        assert_abs_diff_eq!(f.path().position(0.5), 0.455_969_340_287_366_6, epsilon = 1e-15);
        let t5 = f.death().unwrap();
        assert_abs_diff_eq!(t5, 0.852_605_502_013_725_5, epsilon = 1e-13);
        let p = f.path();
        assert_abs_diff_eq!(p.speed(t5), 2.0 * (-t5).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(p.speed(t5), t5, epsilon = 1e-12);
    }

    #[test]
    fn uniform_drag_limits() {
        let f = solve_uniform_drag(&data(2.0, 0.0));
        assert_abs_diff_eq!(f.path().position(60.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.path().weight(60.0), 2.0, epsilon = 1e-15);
        let f = solve_uniform_drag(&data(1.5, -1.5));
        for &t in &[0.0, 0.7, 3.0] {
            assert_eq!(f.path().position(t), 0.0);
        }
    }

    #[test]
    fn mirrored_extensions() {
        let f = solve_const_left(&data(2.0, 0.5), Sign::Minus);
        assert_eq!(f.death(), Some(1.5));
        let p = f.path();
        assert_abs_diff_eq!(p.speed(1.5), 0.5, epsilon = 1e-15);
        let f = solve_drag_left(&data(-1.0, -2.0), Sign::Plus);
        let d = f.death().unwrap();
        assert_abs_diff_eq!(f.path().left_velocity(d), -2.0, epsilon = 1e-14);
    }

    #[test]
    fn eval_state_regions() {
        let f = solve_mixed(&data(2.0, 0.0));
        assert_eq!(
            eval_state(&f, -5.0, 0.1),
            FieldState::Smooth {
                rho: 1.0,
                u: 2.0 * (-0.1f64).exp()
            }
        );
        let f = solve_homogeneous(&data(2.0, 0.0));
        assert_eq!(
            eval_state(&f, 1.0, 1.0),
            FieldState::Front {
                weight: 2.0,
                velocity: 1.0
            }
        );
        assert!(matches!(eval_state(&f, 1.5, 1.0), FieldState::Smooth { u, .. } if u == 0.0));
    }

    #[test]
    fn general_has_no_closed_form() {
        use crate::model::{validate, Forcing};
        let src = SourceSpec::General {
            f: Forcing::constant(0.0),
            g: Forcing::constant(0.0),
        };
        let p = validate(data(2.0, 0.0), src).unwrap();
        assert!(matches!(solve(&p), Err(ModelError::UnsupportedSource(_))));
    }
}
