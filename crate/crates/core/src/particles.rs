//! Sticky-particle oracle.
//!
//! Mass points fly freely under the body force and merge inelastically when
//! they would cross, so a delta shock shows up as one heavy particle. The
//! force on a merged particle is only unambiguous when both sides feel the
//! same source, so only `Homogeneous` and `UniformDrag` are accepted.

use crate::model::{RiemannData, SourceSpec};
use serde::Serialize;
use thiserror::Error;

/// A cluster is a particle heavier than this many initial particles.
pub const CLUSTER_FACTOR: f64 = 3.0;
pub const MIN_PER_SIDE: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParticleError {
    #[error("no particle heavier than {CLUSTER_FACTOR} initial particles at t = {t}")]
    NoCluster { t: f64 },
    #[error("the particle oracle only supports sources equal on both sides, got `{0}`")]
    UnsupportedSource(&'static str),
    #[error("need at least {MIN_PER_SIDE} particles per side, got {0}")]
    TooFewParticles(usize),
    #[error("step and half-width must be positive")]
    NonPositive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSystem {
    positions: Vec<f64>,
    velocities: Vec<f64>,
    masses: Vec<f64>,
    time: f64,
    unit_mass: f64,
}

/// Cell-centred particles on `[-L, 0)` and `(0, L]`, `n_per_side` on each side.
pub fn init(data: &RiemannData, n_per_side: usize, half_width: f64) -> Result<ParticleSystem, ParticleError> {
    if n_per_side < MIN_PER_SIDE {
        return Err(ParticleError::TooFewParticles(n_per_side));
    }
    if !(half_width > 0.0) {
        return Err(ParticleError::NonPositive);
    }
    let h = half_width / n_per_side as f64;
    let n = 2 * n_per_side;
    let mut sys = ParticleSystem {
        positions: Vec::with_capacity(n),
        velocities: Vec::with_capacity(n),
        masses: Vec::with_capacity(n),
        time: 0.0,
        unit_mass: data.rho_minus().max(data.rho_plus()) * h,
    };
    for i in 0..n_per_side {
        sys.positions.push(-half_width + (i as f64 + 0.5) * h);
        sys.velocities.push(data.u_minus());
        sys.masses.push(data.rho_minus() * h);
    }
    for i in 0..n_per_side {
        sys.positions.push((i as f64 + 0.5) * h);
        sys.velocities.push(data.u_plus());
        sys.masses.push(data.rho_plus() * h);
    }
    Ok(sys)
}

impl ParticleSystem {
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn velocities(&self) -> &[f64] {
        &self.velocities
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn total_momentum(&self) -> f64 {
        self.masses.iter().zip(&self.velocities).map(|(m, u)| m * u).sum()
    }

    /// Position and mass of the heaviest particle, if it qualifies as a cluster.
    pub fn cluster(&self) -> Result<(f64, f64), ParticleError> {
        let (i, &m) = self
            .masses
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .ok_or(ParticleError::NoCluster { t: self.time })?;
        if m > CLUSTER_FACTOR * self.unit_mass {
            Ok((self.positions[i], m))
        } else {
            Err(ParticleError::NoCluster { t: self.time })
        }
    }

    /// Drift `x += u dt`, then the exact velocity factor of the source, then
    /// merging until positions are strictly increasing again.
    pub fn step(&mut self, source: &SourceSpec, dt: f64) -> Result<(), ParticleError> {
        let decay = match source {
            SourceSpec::Homogeneous => 1.0,
            SourceSpec::UniformDrag => (-dt).exp(),
            other => return Err(ParticleError::UnsupportedSource(other.kind_name())),
        };
        if !(dt > 0.0) {
            return Err(ParticleError::NonPositive);
        }
        for (x, u) in self.positions.iter_mut().zip(&mut self.velocities) {
            *x += *u * dt;
            *u *= decay;
        }
        self.merge();
        self.time += dt;
        Ok(())
    }

    /// Stack pass: each particle is merged into the top of the stack for as
    /// long as it is not strictly to its right. Merges conserve mass and
    /// momentum and place the result at the centre of mass.
    fn merge(&mut self) {
        let n = self.masses.len();
        let mut top = 0usize;
        for i in 1..n {
            top += 1;
            self.positions[top] = self.positions[i];
            self.velocities[top] = self.velocities[i];
            self.masses[top] = self.masses[i];
            while top > 0 && self.positions[top - 1] >= self.positions[top] {
                let (a, b) = (top - 1, top);
                let m = self.masses[a] + self.masses[b];
                let p = self.masses[a] * self.velocities[a] + self.masses[b] * self.velocities[b];
                let x = (self.masses[a] * self.positions[a] + self.masses[b] * self.positions[b]) / m;
                self.positions[a] = x;
                self.velocities[a] = p / m;
                self.masses[a] = m;
                top -= 1;
            }
        }
        let len = if n == 0 { 0 } else { top + 1 };
        self.positions.truncate(len);
        self.velocities.truncate(len);
        self.masses.truncate(len);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Snapshot {
    pub t: f64,
    /// `None` before the first cluster forms.
    pub cluster: Option<(f64, f64)>,
    pub total_mass: f64,
    pub total_momentum: f64,
}

impl Snapshot {
    pub fn of(sys: &ParticleSystem) -> Self {
        Snapshot {
            t: sys.time(),
            cluster: sys.cluster().ok(),
            total_mass: sys.total_mass(),
            total_momentum: sys.total_momentum(),
        }
    }
}

/// `(t, value)` pairs.
pub type Series = Vec<(f64, f64)>;

/// Front trajectory `(t, x)` and mass `(t, m)` of the cluster over a history.
pub fn extract_front(history: &[Snapshot]) -> Result<(Series, Series), ParticleError> {
    let mut trajectory = Vec::with_capacity(history.len());
    let mut mass = Vec::with_capacity(history.len());
    for snap in history {
        let (x, m) = snap.cluster.ok_or(ParticleError::NoCluster { t: snap.t })?;
        trajectory.push((snap.t, x));
        mass.push((snap.t, m));
    }
    Ok((trajectory, mass))
}

/// Stable step for spacing `h`: no particle moves more than a quarter of the
/// spacing relative to any other.
pub fn default_dt(data: &RiemannData, n_per_side: usize, half_width: f64) -> f64 {
    let h = half_width / n_per_side as f64;
    let speed = data
        .u_minus()
        .abs()
        .max(data.u_plus().abs())
        .max(data.u_minus() - data.u_plus());
    0.25 * h / speed.max(1e-12)
}

/// Runs the system and records a snapshot at each of `times` (increasing,
/// positive). The step is shortened to land exactly on each recording time.
pub fn run(
    data: &RiemannData,
    source: &SourceSpec,
    n_per_side: usize,
    half_width: f64,
    times: &[f64],
) -> Result<Vec<Snapshot>, ParticleError> {
    let mut sys = init(data, n_per_side, half_width)?;
    let dt = default_dt(data, n_per_side, half_width);
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        while sys.time() < target {
            let h = dt.min(target - sys.time());
            if h <= 1e-15 * target.max(1.0) {
                sys.time = target;
                break;
            }
            sys.step(source, h)?;
        }
        out.push(Snapshot::of(&sys));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn data(rm: f64, um: f64, rp: f64, up: f64) -> RiemannData {
        RiemannData::new(rm, um, rp, up).unwrap()
    }

    #[test]
    fn init_layout() {
        let s = init(&data(1.0, 2.0, 1.0, 0.0), 10, 1.0).unwrap();
        assert_eq!(s.len(), 20);
        assert_abs_diff_eq!(s.total_mass(), 2.0, epsilon = 1e-14);
        assert!(s.positions().windows(2).all(|p| p[0] < p[1]));
        let s = init(&data(2.0, 2.0, 1.0, 0.0), 10, 1.0).unwrap();
        let left: f64 = s.masses()[..10].iter().sum();
        let right: f64 = s.masses()[10..].iter().sum();
        assert_abs_diff_eq!(left, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(right, 1.0, epsilon = 1e-14);
        assert_eq!(
            init(&data(1.0, 2.0, 1.0, 0.0), 9, 1.0),
            Err(ParticleError::TooFewParticles(9))
        );
    }

    #[test]
    fn head_on_pair_merges_at_rest() {
        let mut s = ParticleSystem {
            positions: vec![-0.1, 0.1],
            velocities: vec![1.0, -1.0],
            masses: vec![1.0, 1.0],
            time: 0.0,
            unit_mass: 1.0,
        };
        s.step(&SourceSpec::Homogeneous, 0.2).unwrap();
        assert_eq!(s.masses(), &[2.0]);
        assert_eq!(s.velocities(), &[0.0]);
        assert_abs_diff_eq!(s.positions()[0], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn no_cluster_before_first_merge() {
        let s = init(&data(1.0, 2.0, 1.0, 0.0), 10, 1.0).unwrap();
        assert_eq!(s.cluster(), Err(ParticleError::NoCluster { t: 0.0 }));
        assert!(extract_front(&[Snapshot::of(&s)]).is_err());
    }

    #[test]
    fn rejects_one_sided_sources() {
        use crate::model::Sign;
        let mut s = init(&data(1.0, 2.0, 1.0, 0.0), 10, 1.0).unwrap();
        assert_eq!(
            s.step(&SourceSpec::LinearDragLeft(Sign::Minus), 0.01),
            Err(ParticleError::UnsupportedSource("linear_drag_left"))
        );
    }

    #[test]
    fn invariants_over_many_steps() {
        let d = data(1.0, 2.0, 1.5, -1.0);
        for source in [SourceSpec::Homogeneous, SourceSpec::UniformDrag] {
            let mut s = init(&d, 200, 2.0).unwrap();
            let (m0, p0) = (s.total_mass(), s.total_momentum());
            let dt = 1e-4;
            for _ in 0..10_000 {
                s.step(&source, dt).unwrap();
                assert!(s.positions().windows(2).all(|p| p[0] < p[1]));
            }
            assert!((s.total_mass() - m0).abs() <= 1e-12 * m0);
            let expected = match source {
                SourceSpec::UniformDrag => p0 * (-s.time()).exp(),
                _ => p0,
            };
            assert_abs_diff_eq!(s.total_momentum(), expected, epsilon = 1e-10);
        }
    }
}
