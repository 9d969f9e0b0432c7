//! Plot-ready CSV output. Numbers carry 17 significant digits, which is
//! enough to round-trip any `f64`; lines end with `\n`.

use crate::characteristics::Polyline;
use crate::model::{PathSample, PiecewiseField};
use std::fmt::Write;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowEvent {
    Sample,
    /// The front dies here; no rows follow.
    Death,
    /// Last requested time, reached with the front alive.
    Horizon,
}

impl RowEvent {
    pub fn as_str(self) -> &'static str {
        match self {
            RowEvent::Sample => "sample",
            RowEvent::Death => "death",
            RowEvent::Horizon => "horizon",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub sample: PathSample,
    pub event: RowEvent,
}

/// Rows at `t = t_max k / n` for `k = 0..=n`, cut at the death of the front
/// with an extra row at the death time itself.
pub fn trajectory_rows(field: &PiecewiseField, t_max: f64, n: usize) -> Vec<TrajectoryRow> {
    let path = field.path();
    let stop = field.death().filter(|&d| d <= t_max);
    let end = stop.unwrap_or(t_max).min(path.valid_until());
    let mut rows: Vec<TrajectoryRow> = (0..=n)
        .map(|k| t_max * k as f64 / n as f64)
        .take_while(|&t| t < end || (stop.is_none() && t <= end))
        .map(|t| TrajectoryRow {
            sample: sample(field, t),
            event: RowEvent::Sample,
        })
        .collect();
    match stop {
        Some(d) => rows.push(TrajectoryRow {
            sample: sample(field, d),
            event: RowEvent::Death,
        }),
        None => {
            if let Some(last) = rows.last_mut() {
                last.event = RowEvent::Horizon;
            }
        }
    }
    rows
}

fn sample(field: &PiecewiseField, t: f64) -> PathSample {
    let path = field.path();
    let (u_l, u_r) = (path.left_velocity(t), path.right_velocity(t));
    PathSample {
        t,
        s: field.front_position(t),
        w: field.front_weight(t),
        sigma: field.front_speed(t),
        u_l,
        u_r,
    }
}

pub fn trajectory_csv(rows: &[TrajectoryRow]) -> String {
    let mut out = String::from("t,s,w,sigma,u_l,u_r,event\n");
    for r in rows {
        let p = &r.sample;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            num(p.t),
            num(p.s),
            num(p.w),
            num(p.sigma),
            num(p.u_l),
            num(p.u_r),
            r.event.as_str()
        );
    }
    out
}

pub fn fan_csv(lines: &[Polyline]) -> String {
    let mut out = String::from("curve_id,tag,t,x\n");
    for line in lines {
        for &(t, x) in &line.points {
            let _ = writeln!(out, "{},{},{},{}", line.curve_id, line.tag.as_str(), num(t), num(x));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleRow {
    pub t: f64,
    pub cluster_x: f64,
    pub cluster_mass: f64,
    pub total_mass: f64,
    pub total_momentum: f64,
    pub s_exact: f64,
    pub w_exact: f64,
}

impl OracleRow {
    pub fn err_x(&self) -> f64 {
        (self.cluster_x - self.s_exact).abs()
    }

    pub fn err_mass(&self) -> f64 {
        (self.cluster_mass - self.w_exact).abs()
    }
}

pub fn oracle_csv(rows: &[OracleRow]) -> String {
    let mut out = String::from("t,cluster_x,cluster_mass,total_mass,total_momentum,s_exact,w_exact,err_x,err_mass\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            num(r.t),
            num(r.cluster_x),
            num(r.cluster_mass),
            num(r.total_mass),
            num(r.total_momentum),
            num(r.s_exact),
            num(r.w_exact),
            num(r.err_x()),
            num(r.err_mass())
        );
    }
    out
}
