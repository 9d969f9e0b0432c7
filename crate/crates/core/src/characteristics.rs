//! Characteristic curves on both sides of the front and the vacuum wedge
//! that opens once the front dies.

use crate::critical::HORIZON;
use crate::exact;
use crate::model::{DeltaShockPath, PiecewiseField, RiemannData, SideMotion, SourceSpec, VacuumRegion};
use crate::roots;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Contact tolerance for tangential clipping.
pub const TANGENCY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CharError {
    #[error("characteristics must start off the origin")]
    SeedAtOrigin,
    #[error("characteristics of general sources come from the integrator")]
    UnsupportedSource,
    #[error("the front never dies, so no vacuum opens")]
    NoDeath,
    #[error("fan needs at least one curve and a positive step")]
    InvalidFan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// `x(t) = x0 + ∫_0^t u(τ) dτ` with `u` the velocity history of its side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharCurve {
    x0: f64,
    side: Side,
    motion: SideMotion,
    clipped_at: Option<f64>,
}

impl CharCurve {
    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn motion(&self) -> SideMotion {
        self.motion
    }

    /// First time the curve runs into the front, if it does.
    pub fn clipped_at(&self) -> Option<f64> {
        self.clipped_at
    }

    pub fn trace(&self, t: f64) -> f64 {
        self.x0 + self.motion.displacement(t)
    }

    pub fn slope(&self, t: f64) -> f64 {
        self.motion.velocity(t)
    }
}

/// Characteristic through `(x0, 0)`; the side is the sign of `x0`.
pub fn characteristic(source: &SourceSpec, data: &RiemannData, x0: f64) -> Result<CharCurve, CharError> {
    if x0 == 0.0 {
        return Err(CharError::SeedAtOrigin);
    }
    let (left, right) = exact::side_motions(data, source).ok_or(CharError::UnsupportedSource)?;
    let (side, motion) = if x0 < 0.0 {
        (Side::Left, left)
    } else {
        (Side::Right, right)
    };
    Ok(CharCurve {
        x0,
        side,
        motion,
        clipped_at: None,
    })
}

/// Sets `clipped_at` to the first contact with the front before it dies
/// (or before the end of the path's validity, capped at the search horizon).
///
/// While the entropy condition holds, every characteristic approaches the
/// front monotonically, so the gap changes sign at most once. At the death
/// time the contact is tangential and the gap may stop a rounding error short
/// of zero; a golden-section search on `|gap|` catches that case.
pub fn clip_to_front(curve: CharCurve, path: &DeltaShockPath) -> CharCurve {
    let end = path.valid_until().min(HORIZON);
    let gap = |t: f64| curve.trace(t) - path.position(t);
    let dgap = |t: f64| curve.slope(t) - path.speed(t);
    let scale = 1.0 + curve.x0.abs();
    let hit = roots::bisect_newton(gap, dgap, 0.0, end).or_else(|| {
        let (t, g) = roots::golden_min(|t| gap(t).abs(), 0.0, end, TANGENCY_TOL);
        (g <= TANGENCY_TOL * scale).then_some(t)
    });
    CharCurve {
        clipped_at: hit.filter(|&t| t > 0.0),
        ..curve
    }
}

/// Vacuum bounded by the left and right characteristics tangent to the front
/// at its death.
pub fn vacuum_region(field: &PiecewiseField) -> Result<VacuumRegion, CharError> {
    if field.death().is_none() {
        return Err(CharError::NoDeath);
    }
    if let Some(v) = field.vacuum() {
        return Ok(*v);
    }
    vacuum_from_path(field.path()).ok_or(CharError::UnsupportedSource)
}

pub(crate) fn vacuum_from_path(path: &DeltaShockPath) -> Option<VacuumRegion> {
    let death = path.death()?;
    let (left, right) = (path.left_motion()?, path.right_motion()?);
    Some(VacuumRegion::new(death, path.position(death), left, right))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveTag {
    Left,
    Right,
    Front,
    VacLeft,
    VacRight,
}

impl CurveTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveTag::Left => "left",
            CurveTag::Right => "right",
            CurveTag::Front => "front",
            CurveTag::VacLeft => "vac_left",
            CurveTag::VacRight => "vac_right",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    pub curve_id: usize,
    pub tag: CurveTag,
    /// `(t, x)` vertices in increasing `t`.
    pub points: Vec<(f64, f64)>,
}

/// Seeds on one side, geometric in `|x0|` from `span / 64` to `span`.
fn seeds(n: usize, span: f64) -> Vec<f64> {
    if n == 1 {
        return vec![span];
    }
    let ratio = 64f64.powf(1.0 / (n - 1) as f64);
    (0..n).map(|k| span / 64.0 * ratio.powi(k as i32)).collect()
}

fn polyline(curve_id: usize, tag: CurveTag, t0: f64, t1: f64, dt: f64, x: impl Fn(f64) -> f64) -> Polyline {
    let mut points = Vec::new();
    let mut k = 0usize;
    loop {
        let t = t0 + k as f64 * dt;
        if t >= t1 {
            break;
        }
        points.push((t, x(t)));
        k += 1;
    }
    points.push((t1, x(t1)));
    Polyline { curve_id, tag, points }
}

/// Characteristic fan on `[0, t_max]`: `n_curves` seeds per side (left seeds
/// first, ordered by `x0`), then the front, then the vacuum boundaries if the
/// front dies before `t_max`. Curves stop where they meet the front.
pub fn sample_fan(field: &PiecewiseField, n_curves: usize, t_max: f64, dt: f64) -> Result<Vec<Polyline>, CharError> {
    if n_curves == 0 || !(dt > 0.0) || !(t_max > 0.0) {
        return Err(CharError::InvalidFan);
    }
    let (data, source, path) = (field.data(), field.source(), field.path());
    let (left, right) = exact::side_motions(data, source).ok_or(CharError::UnsupportedSource)?;
    let span = [
        left.displacement(t_max),
        right.displacement(t_max),
        path.position(t_max),
    ]
    .iter()
    .fold(1.0f64, |m, v| m.max(2.0 * v.abs()));

    let right_seeds = seeds(n_curves, span);
    let seeds_all: Vec<f64> = right_seeds
        .iter()
        .rev()
        .map(|x| -x)
        .chain(right_seeds.iter().copied())
        .collect();
    let mut lines: Vec<Polyline> = seeds_all
        .par_iter()
        .enumerate()
        .map(|(id, &x0)| {
            let curve = clip_to_front(characteristic(source, data, x0)?, path);
            let tag = if x0 < 0.0 { CurveTag::Left } else { CurveTag::Right };
            let end = curve.clipped_at().map_or(t_max, |t| t.min(t_max));
            Ok(polyline(id, tag, 0.0, end, dt, |t| curve.trace(t)))
        })
        .collect::<Result<_, CharError>>()?;

    let front_end = field.death().map_or(t_max, |d| d.min(t_max));
    let next_id = lines.len();
    lines.push(polyline(next_id, CurveTag::Front, 0.0, front_end, dt, |t| {
        field.front_position(t)
    }));
    if let (Some(v), true) = (field.vacuum(), front_end < t_max) {
        lines.push(polyline(next_id + 1, CurveTag::VacLeft, v.t_start(), t_max, dt, |t| {
            v.x_left(t)
        }));
        lines.push(polyline(next_id + 2, CurveTag::VacRight, v.t_start(), t_max, dt, |t| {
            v.x_right(t)
        }));
    }
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sign;
    use approx::assert_abs_diff_eq;

    fn data(um: f64, up: f64) -> RiemannData {
        RiemannData::new(1.0, um, 1.0, up).unwrap()
    }

    #[test]
    fn closed_form_traces() {
        let c = characteristic(&SourceSpec::ConstLeft(Sign::Plus), &data(2.0, 0.0), -1.0).unwrap();
        assert_eq!(c.trace(1.0), 1.5);
        let c = characteristic(&SourceSpec::Homogeneous, &data(2.0, 1.0), 2.0).unwrap();
        assert_eq!(c.trace(3.0), 5.0);
        let c = characteristic(&SourceSpec::LinearDragLeft(Sign::Minus), &data(2.0, 1.0), -1.0).unwrap();
        assert_abs_diff_eq!(c.trace(60.0), 1.0, epsilon = 1e-15);
        assert_eq!(
            characteristic(&SourceSpec::Homogeneous, &data(2.0, 1.0), 0.0),
            Err(CharError::SeedAtOrigin)
        );
    }

    #[test]
    fn homogeneous_clip() {
        let f = exact::solve_homogeneous(&data(2.0, 0.0));
        let c = clip_to_front(characteristic(f.source(), f.data(), -1.0).unwrap(), f.path());
        assert_abs_diff_eq!(c.clipped_at().unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn receding_curve_is_not_clipped() {
        // The front dies before it reaches a distant right characteristic.
        let f = exact::solve_drag_left(&data(2.0, 1.0), Sign::Minus);
        let t3 = f.death().unwrap();
        let far = 10.0;
        let c = clip_to_front(characteristic(f.source(), f.data(), far).unwrap(), f.path());
        assert!(c.trace(t3) > f.path().position(t3));
        assert_eq!(c.clipped_at(), None);
    }

    #[test]
    fn tangential_contact_at_death() {
        let f = exact::solve_mixed(&data(2.0, 0.0));
        let t5 = f.death().unwrap();
        let x0 = f.path().position(t5) - 2.0 * (1.0 - (-t5).exp());
        let c = clip_to_front(characteristic(f.source(), f.data(), x0).unwrap(), f.path());
        assert_abs_diff_eq!(c.clipped_at().unwrap(), t5, epsilon = 1e-9);
        assert!((c.slope(t5) - f.path().speed(t5)).abs() <= 1e-9);
    }

    #[test]
    fn drag_vacuum_is_tangent() {
        let f = exact::solve_drag_left(&data(2.0, 1.0), Sign::Minus);
        let v = vacuum_region(&f).unwrap();
        let t3 = 2f64.ln();
        assert_eq!(v.t_start(), t3);
        assert_abs_diff_eq!(v.left_slope(t3), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.right_slope(t3), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.x_left(t3), v.x_right(t3), epsilon = 1e-15);
        assert!(v.x_left(t3 + 1.0) < v.x_right(t3 + 1.0));
    }

    #[test]
    fn no_vacuum_without_death() {
        let f = exact::solve_uniform_drag(&data(2.0, 0.0));
        assert_eq!(vacuum_region(&f), Err(CharError::NoDeath));
    }

    #[test]
    fn mixed_vacuum_opens() {
        let f = exact::solve_mixed(&data(2.0, 0.0));
        let v = vacuum_region(&f).unwrap();
        let t = v.t_start() + 1.0;
        assert!(v.x_right(t) - v.x_left(t) > 0.0);
    }

    #[test]
    fn homogeneous_fan_shape() {
        let f = exact::solve_homogeneous(&data(2.0, 0.0));
        let fan = sample_fan(&f, 3, 2.0, 0.01).unwrap();
        assert_eq!(fan.len(), 7);
        assert_eq!(fan.iter().filter(|p| p.tag == CurveTag::Front).count(), 1);
        for line in &fan {
            let (t0, x0) = line.points[0];
            let (t1, x1) = *line.points.last().unwrap();
            // Straight lines: every vertex is on the chord.
            for &(t, x) in &line.points {
                let on_chord = x0 + (x1 - x0) * (t - t0) / (t1 - t0);
                assert_abs_diff_eq!(x, on_chord, epsilon = 1e-12);
            }
        }
        let ids: Vec<_> = fan.iter().map(|p| p.curve_id).collect();
        assert_eq!(ids, (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn fan_rejects_bad_arguments() {
        let f = exact::solve_homogeneous(&data(2.0, 0.0));
        assert_eq!(sample_fan(&f, 0, 1.0, 0.1), Err(CharError::InvalidFan));
        assert_eq!(sample_fan(&f, 1, 1.0, 0.0), Err(CharError::InvalidFan));
    }
}
