//! One function per subcommand. Each writes its files under the output
//! directory, prefixed by the scenario name, and returns what to print.

use crate::error::{exit, CliError};
use crate::scenario::Scenario;
use deltashock::characteristics::{sample_fan, CharError};
use deltashock::export::{self, OracleRow};
use deltashock::grh_ode::{self, GrhError, IntegratorOptions};
use deltashock::model::{PiecewiseField, SourceSpec};
use deltashock::particles::{self, ParticleError};
use deltashock::weak_residual::{self, WeakOptions, DEFAULT_THRESHOLD};
use deltashock::{critical, exact};
use serde_json::json;
use std::path::{Path, PathBuf};

pub const DEFAULT_PARTICLES: usize = 4000;
/// Smallest half-width of the particle domain.
pub const MIN_HALF_WIDTH: f64 = 3.0;
/// Oracle snapshots at `t_max k / ORACLE_TIMES`, `k = 1..=ORACLE_TIMES`.
pub const ORACLE_TIMES: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub out: PathBuf,
    /// Integrator tolerance for general sources.
    pub tol: Option<f64>,
    /// Front shift rate applied before verification.
    pub perturb_front: Option<f64>,
    /// Particles per side for the oracle.
    pub n_particles: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            out: PathBuf::from("."),
            tol: None,
            perturb_front: None,
            n_particles: DEFAULT_PARTICLES,
        }
    }
}

/// What a successful command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// Printed to standard output.
    pub summary: String,
}

/// Closed-form field, or the integrated front for general sources.
pub fn solve_field(scenario: &Scenario, opts: &Options) -> Result<PiecewiseField, CliError> {
    let problem = &scenario.problem;
    if !problem.source().is_general() {
        return Ok(exact::solve(problem)?);
    }
    let integrator = IntegratorOptions {
        tol: opts.tol.unwrap_or(IntegratorOptions::default().tol),
        ..IntegratorOptions::default()
    };
    grh_ode::integrate_field(problem, scenario.t_max, &integrator).map_err(|e| match e {
        GrhError::InvalidTolerance(_) | GrhError::InvalidHorizon(_) => {
            CliError::validation("InvalidTolerance", e.to_string())
        }
        _ => CliError::new(exit::FAILURE, "IntegrationFailed", e.to_string()),
    })
}

fn write(opts: &Options, scenario: &Scenario, suffix: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(&opts.out)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", opts.out.display())))?;
    let path = opts.out.join(format!("{}.{suffix}", scenario.name));
    std::fs::write(&path, contents).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn pretty(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn wrote(path: &Path) -> String {
    format!("wrote {}", path.display())
}

pub fn solve(scenario: &Scenario, opts: &Options) -> Result<Outcome, CliError> {
    let field = solve_field(scenario, opts)?;
    let rows = export::trajectory_rows(&field, scenario.t_max, scenario.samples);
    let path = write(opts, scenario, "trajectory.csv", &export::trajectory_csv(&rows))?;
    Ok(Outcome {
        summary: wrote(&path),
        files: vec![path],
    })
}

pub fn classify(scenario: &Scenario, opts: &Options) -> Result<Outcome, CliError> {
    let report = critical::classify(&scenario.problem);
    let text = pretty(&report);
    let path = write(opts, scenario, "classify.json", &text)?;
    Ok(Outcome {
        summary: text.trim_end().to_string(),
        files: vec![path],
    })
}

pub fn fan(scenario: &Scenario, opts: &Options) -> Result<Outcome, CliError> {
    let field = solve_field(scenario, opts)?;
    let lines = sample_fan(&field, scenario.fan_curves, scenario.t_max, scenario.fan_dt).map_err(|e| match e {
        CharError::UnsupportedSource => CliError::validation("UnsupportedSource", e.to_string()),
        _ => CliError::validation("InvalidScenario", e.to_string()),
    })?;
    let path = write(opts, scenario, "fan.csv", &export::fan_csv(&lines))?;
    Ok(Outcome {
        summary: wrote(&path),
        files: vec![path],
    })
}

/// Writes the report whether or not the battery passes; a failing battery
/// is reported as an error with exit code 3 after the file is on disk.
pub fn verify(scenario: &Scenario, opts: &Options) -> Result<Outcome, CliError> {
    let mut field = solve_field(scenario, opts)?;
    if let Some(a) = opts.perturb_front {
        field = weak_residual::perturb(&field, a, 1.0);
    }
    let report = weak_residual::verify(&field, DEFAULT_THRESHOLD, &WeakOptions::default())
        .map_err(|e| CliError::new(exit::FAILURE, "QuadratureFailure", e.to_string()))?;
    let failing: Vec<usize> = report.failing().map(|(i, _)| i).collect();
    let text = pretty(&json!({
        "scenario": scenario.name,
        "source": scenario.problem.source().kind_name(),
        "perturb_front": opts.perturb_front,
        "threshold": report.threshold,
        "pass": report.pass,
        "max_residual": report.max_residual(),
        "failing": failing,
        "bumps": report.bumps,
    }));
    let path = write(opts, scenario, "verify.json", &text)?;
    if !report.pass {
        return Err(CliError::new(
            exit::VERIFICATION,
            "VerificationFailed",
            format!(
                "bumps {failing:?} exceed {:e} (max residual {:e}); report in {}",
                report.threshold,
                report.max_residual(),
                path.display()
            ),
        ));
    }
    Ok(Outcome {
        summary: format!("pass: max residual {:e}; {}", report.max_residual(), wrote(&path)),
        files: vec![path],
    })
}

pub fn oracle(scenario: &Scenario, opts: &Options) -> Result<Outcome, CliError> {
    let source = scenario.problem.source();
    if !matches!(source, SourceSpec::Homogeneous | SourceSpec::UniformDrag) {
        return Err(CliError::new(
            exit::UNSUPPORTED_ORACLE,
            "UnsupportedOracle",
            format!(
                "the sticky-particle oracle needs the same force on both sides of the front \
                 (homogeneous or uniform_drag), got `{}`",
                source.kind_name()
            ),
        ));
    }
    let field = solve_field(scenario, opts)?;
    let data = scenario.problem.data();
    let t_max = scenario.t_max;
    // Wide enough that no particle feeding the front starts outside the domain.
    let half_width = MIN_HALF_WIDTH.max(1.5 * data.u_minus().abs().max(data.u_plus().abs()) * t_max);
    let times: Vec<f64> = (1..=ORACLE_TIMES)
        .map(|k| t_max * k as f64 / ORACLE_TIMES as f64)
        .collect();
    let history = particles::run(data, source, opts.n_particles, half_width, &times).map_err(|e| match e {
        ParticleError::TooFewParticles(_) | ParticleError::NonPositive => {
            CliError::validation("InvalidParticles", e.to_string())
        }
        _ => CliError::new(exit::FAILURE, "OracleFailed", e.to_string()),
    })?;
    let mut rows = Vec::with_capacity(history.len());
    for snap in &history {
        let (cluster_x, cluster_mass) = snap.cluster.ok_or_else(|| {
            CliError::new(
                exit::FAILURE,
                "OracleFailed",
                ParticleError::NoCluster { t: snap.t }.to_string(),
            )
        })?;
        rows.push(OracleRow {
            t: snap.t,
            cluster_x,
            cluster_mass,
            total_mass: snap.total_mass,
            total_momentum: snap.total_momentum,
            s_exact: field.front_position(snap.t),
            w_exact: field.front_weight(snap.t),
        });
    }
    let max_err_x = rows.iter().map(OracleRow::err_x).fold(0.0, f64::max);
    let max_err_mass = rows.iter().map(OracleRow::err_mass).fold(0.0, f64::max);
    let max_rel_err_mass = rows.iter().map(|r| r.err_mass() / r.w_exact).fold(0.0, f64::max);
    let csv = write(opts, scenario, "oracle.csv", &export::oracle_csv(&rows))?;
    let summary = pretty(&json!({
        "scenario": scenario.name,
        "source": source.kind_name(),
        "n_particles_per_side": opts.n_particles,
        "half_width": half_width,
        "max_err_x": max_err_x,
        "max_err_mass": max_err_mass,
        "max_rel_err_mass": max_rel_err_mass,
    }));
    let json_path = write(opts, scenario, "oracle.json", &summary)?;
    Ok(Outcome {
        summary: format!(
            "max |x - s| = {max_err_x:e}, max relative mass error = {max_rel_err_mass:e}; {}, {}",
            wrote(&csv),
            wrote(&json_path)
        ),
        files: vec![csv, json_path],
    })
}
