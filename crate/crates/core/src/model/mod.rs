//! Problem data shared by every solver: the Riemann states, the source pair
//! acting on either side of the front, and the validated combination of both.
//!
//! The system is
//!
//! ```text
//!     rho_t + (rho u)_x = 0
//!     u_t + (u^2/2)_x  = H(x - s(t)) f(t, u) + H(s(t) - x) g(t, u)
//! ```
//!
//! with Riemann data `(rho_-, u_-)` for `x < 0` and `(rho_+, u_+)` for `x > 0`.
//! `f` acts to the right of the front, `g` to the left.

mod field;
mod path;

pub use field::{FieldState, FrontPerturbation, PiecewiseField, VacuumRegion};
pub use path::{DeltaShockPath, HermiteTrack, PathSample, SideMotion, TrackSample};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("densities must be strictly positive (rho_minus = {rho_minus}, rho_plus = {rho_plus})")]
    NonPositiveDensity { rho_minus: f64, rho_plus: f64 },
    #[error("no delta shock: requires u_minus > u_plus, got u_minus = {u_minus}, u_plus = {u_plus}")]
    NoDeltaShock { u_minus: f64, u_plus: f64 },
    #[error("unsupported source: {0}")]
    UnsupportedSource(String),
    #[error("`{0}` is not a finite number")]
    NonFinite(&'static str),
}

impl ModelError {
    /// Stable machine-readable tag.
    pub fn code(&self) -> &'static str {
        match self {
            ModelError::NonPositiveDensity { .. } => "NonPositiveDensity",
            ModelError::NoDeltaShock { .. } => "NoDeltaShock",
            ModelError::UnsupportedSource(_) => "UnsupportedSource",
            ModelError::NonFinite(_) => "NonFinite",
        }
    }
}

/// Constant left/right Riemann states. Always satisfies `rho_± > 0` and
/// `u_minus > u_plus`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRiemannData")]
pub struct RiemannData {
    rho_minus: f64,
    u_minus: f64,
    rho_plus: f64,
    u_plus: f64,
}

#[derive(Deserialize)]
struct RawRiemannData {
    rho_minus: f64,
    u_minus: f64,
    rho_plus: f64,
    u_plus: f64,
}

impl TryFrom<RawRiemannData> for RiemannData {
    type Error = ModelError;

    fn try_from(raw: RawRiemannData) -> Result<Self, Self::Error> {
        RiemannData::new(raw.rho_minus, raw.u_minus, raw.rho_plus, raw.u_plus)
    }
}

impl RiemannData {
    pub fn new(rho_minus: f64, u_minus: f64, rho_plus: f64, u_plus: f64) -> Result<Self, ModelError> {
        for (name, v) in [
            ("rho_minus", rho_minus),
            ("u_minus", u_minus),
            ("rho_plus", rho_plus),
            ("u_plus", u_plus),
        ] {
            if !v.is_finite() {
                return Err(ModelError::NonFinite(name));
            }
        }
        if rho_minus <= 0.0 || rho_plus <= 0.0 {
            return Err(ModelError::NonPositiveDensity { rho_minus, rho_plus });
        }
        if u_minus <= u_plus {
            return Err(ModelError::NoDeltaShock { u_minus, u_plus });
        }
        Ok(RiemannData {
            rho_minus,
            u_minus,
            rho_plus,
            u_plus,
        })
    }

    pub fn rho_minus(&self) -> f64 {
        self.rho_minus
    }

    pub fn u_minus(&self) -> f64 {
        self.u_minus
    }

    pub fn rho_plus(&self) -> f64 {
        self.rho_plus
    }

    pub fn u_plus(&self) -> f64 {
        self.u_plus
    }

    /// `(rho_- + rho_+) / 2`, the factor in every weight formula.
    pub fn mean_density(&self) -> f64 {
        0.5 * (self.rho_minus + self.rho_plus)
    }

    /// Same densities, different velocities.
    pub fn with_velocities(&self, u_minus: f64, u_plus: f64) -> Result<Self, ModelError> {
        RiemannData::new(self.rho_minus, u_minus, self.rho_plus, u_plus)
    }

    /// Same velocities, different densities.
    pub fn with_densities(&self, rho_minus: f64, rho_plus: f64) -> Result<Self, ModelError> {
        RiemannData::new(rho_minus, self.u_minus, rho_plus, self.u_plus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl TryFrom<i64> for Sign {
    type Error = ModelError;

    fn try_from(v: i64) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(ModelError::UnsupportedSource(format!(
                "sign must be +1 or -1, got {other}"
            ))),
        }
    }
}

/// `c + a_t t + a_u u + a_x x`. The `x` coefficient exists only so that
/// x-dependent input can be named and rejected by [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineForcing {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub t: f64,
    #[serde(default)]
    pub u: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub x: f64,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

pub type ForcingFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// A body force `F(t, u)` acting on one side of the front.
#[derive(Clone)]
pub enum Forcing {
    Affine(AffineForcing),
    Custom(Arc<ForcingFn>),
}

impl Forcing {
    pub fn custom(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Forcing::Custom(Arc::new(f))
    }

    pub fn constant(c: f64) -> Self {
        Forcing::Affine(AffineForcing {
            constant: c,
            ..Default::default()
        })
    }

    pub fn linear_in_u(k: f64) -> Self {
        Forcing::Affine(AffineForcing {
            u: k,
            ..Default::default()
        })
    }

    pub fn eval(&self, t: f64, u: f64) -> f64 {
        match self {
            Forcing::Affine(a) => a.constant + a.t * t + a.u * u,
            Forcing::Custom(f) => f(t, u),
        }
    }

    fn depends_on_x(&self) -> bool {
        matches!(self, Forcing::Affine(a) if a.x != 0.0)
    }
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Forcing::Affine(a) => f.debug_tuple("Affine").field(a).finish(),
            Forcing::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl PartialEq for Forcing {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Forcing::Affine(a), Forcing::Affine(b)) => a == b,
            (Forcing::Custom(a), Forcing::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

/// The `(f, g)` source pair. `f` acts right of the front, `g` left of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SourceRepr", into = "SourceRepr")]
pub enum SourceSpec {
    /// `f = g = 0`.
    Homogeneous,
    /// `f = 0`, `g = ±1`.
    ConstLeft(Sign),
    /// `f = 0`, `g = ±u`.
    LinearDragLeft(Sign),
    /// `f = 1`, `g = -u`.
    MixedConstRightDragLeft,
    /// `f = g = -u`.
    UniformDrag,
    /// Arbitrary `(t, u)`-dependent pair, handled by the ODE integrator.
    General { f: Forcing, g: Forcing },
}

impl SourceSpec {
    /// Force right of the front.
    pub fn right(&self, t: f64, u: f64) -> f64 {
        match self {
            SourceSpec::Homogeneous | SourceSpec::ConstLeft(_) | SourceSpec::LinearDragLeft(_) => 0.0,
            SourceSpec::MixedConstRightDragLeft => 1.0,
            SourceSpec::UniformDrag => -u,
            SourceSpec::General { f, .. } => f.eval(t, u),
        }
    }

    /// Force left of the front.
    pub fn left(&self, t: f64, u: f64) -> f64 {
        match self {
            SourceSpec::Homogeneous => 0.0,
            SourceSpec::ConstLeft(c) => c.value(),
            SourceSpec::LinearDragLeft(c) => c.value() * u,
            SourceSpec::MixedConstRightDragLeft | SourceSpec::UniformDrag => -u,
            SourceSpec::General { g, .. } => g.eval(t, u),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SourceSpec::Homogeneous => "homogeneous",
            SourceSpec::ConstLeft(_) => "const_left",
            SourceSpec::LinearDragLeft(_) => "linear_drag_left",
            SourceSpec::MixedConstRightDragLeft => "mixed",
            SourceSpec::UniformDrag => "uniform_drag",
            SourceSpec::General { .. } => "general",
        }
    }

    pub fn is_general(&self) -> bool {
        matches!(self, SourceSpec::General { .. })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceRepr {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sign: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    f: Option<AffineForcing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    g: Option<AffineForcing>,
}

impl TryFrom<SourceRepr> for SourceSpec {
    type Error = ModelError;

    fn try_from(r: SourceRepr) -> Result<Self, Self::Error> {
        let takes_sign = matches!(r.kind.as_str(), "const_left" | "linear_drag_left");
        if r.sign.is_some() && !takes_sign {
            return Err(ModelError::UnsupportedSource(format!(
                "kind `{}` takes no sign",
                r.kind
            )));
        }
        if (r.f.is_some() || r.g.is_some()) && r.kind != "general" {
            return Err(ModelError::UnsupportedSource(format!(
                "kind `{}` takes no forcing coefficients",
                r.kind
            )));
        }
        let sign = || -> Result<Sign, ModelError> {
            let s = r
                .sign
                .ok_or_else(|| ModelError::UnsupportedSource(format!("kind `{}` requires a sign", r.kind)))?;
            Sign::try_from(s)
        };
        Ok(match r.kind.as_str() {
            "homogeneous" => SourceSpec::Homogeneous,
            "const_left" => SourceSpec::ConstLeft(sign()?),
            "linear_drag_left" => SourceSpec::LinearDragLeft(sign()?),
            "mixed" | "mixed_const_right_drag_left" => SourceSpec::MixedConstRightDragLeft,
            "uniform_drag" => SourceSpec::UniformDrag,
            "general" => SourceSpec::General {
                f: Forcing::Affine(r.f.unwrap_or_default()),
                g: Forcing::Affine(r.g.unwrap_or_default()),
            },
            other => return Err(ModelError::UnsupportedSource(format!("unknown kind `{other}`"))),
        })
    }
}

impl From<SourceSpec> for SourceRepr {
    fn from(s: SourceSpec) -> Self {
        let sign_of = |c: Sign| Some(if c == Sign::Plus { 1 } else { -1 });
        let (sign, f, g) = match &s {
            SourceSpec::ConstLeft(c) | SourceSpec::LinearDragLeft(c) => (sign_of(*c), None, None),
            SourceSpec::General { f, g } => {
                // Closures have no textual form; they serialize as the zero forcing.
                let affine = |x: &Forcing| match x {
                    Forcing::Affine(a) => *a,
                    Forcing::Custom(_) => AffineForcing::default(),
                };
                (None, Some(affine(f)), Some(affine(g)))
            }
            _ => (None, None, None),
        };
        SourceRepr {
            kind: s.kind_name().to_string(),
            sign,
            f,
            g,
        }
    }
}

/// A Riemann problem whose data and source have both been checked.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    data: RiemannData,
    source: SourceSpec,
}

impl Problem {
    pub fn data(&self) -> &RiemannData {
        &self.data
    }

    pub fn source(&self) -> &SourceSpec {
        &self.source
    }
}

/// Accepts the pair if the source only depends on `(t, u)`.
pub fn validate(data: RiemannData, source: SourceSpec) -> Result<Problem, ModelError> {
    if let SourceSpec::General { f, g } = &source {
        if f.depends_on_x() || g.depends_on_x() {
            return Err(ModelError::UnsupportedSource(
                "x-dependent forcing is not supported; sources may depend on (t, u) only".into(),
            ));
        }
    }
    Ok(Problem { data, source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn accepts_delta_shock_data() {
        let d = RiemannData::new(1.0, 2.0, 1.0, 1.0).unwrap();
        let p = validate(d, SourceSpec::Homogeneous).unwrap();
        assert_eq!(p.data(), &d);
        assert_eq!(p.source(), &SourceSpec::Homogeneous);
    }

    #[test]
    fn rejects_rarefaction_and_contact() {
        let e = RiemannData::new(1.0, 1.0, 1.0, 2.0).unwrap_err();
        assert_eq!(e.code(), "NoDeltaShock");
        let e = RiemannData::new(1.0, 1.0, 1.0, 1.0).unwrap_err();
        assert_eq!(e.code(), "NoDeltaShock");
    }

    #[test]
    fn density_checked_before_velocity_order() {
        let e = RiemannData::new(-1.0, 2.0, 1.0, 1.0).unwrap_err();
        assert_eq!(e.code(), "NonPositiveDensity");
        let e = RiemannData::new(1.0, 1.0, 0.0, 2.0).unwrap_err();
        assert_eq!(e.code(), "NonPositiveDensity");
    }

    #[test]
    fn rejects_nan() {
        assert_eq!(
            RiemannData::new(1.0, f64::NAN, 1.0, 0.0).unwrap_err(),
            ModelError::NonFinite("u_minus")
        );
    }

    #[test]
    fn deserialization_enforces_invariants() {
        let bad = r#"{"rho_minus":1,"u_minus":1,"rho_plus":1,"u_plus":2}"#;
        assert!(serde_json::from_str::<RiemannData>(bad).is_err());
        let ok = r#"{"rho_minus":1,"u_minus":2,"rho_plus":1,"u_plus":1}"#;
        assert_eq!(
            serde_json::from_str::<RiemannData>(ok).unwrap(),
            RiemannData::new(1.0, 2.0, 1.0, 1.0).unwrap()
        );
    }

    #[test]
    fn source_schema() {
        let s: SourceSpec = serde_json::from_str(r#"{"kind":"const_left","sign":-1}"#).unwrap();
        assert_eq!(s, SourceSpec::ConstLeft(Sign::Minus));
        let s: SourceSpec = serde_json::from_str(r#"{"kind":"mixed"}"#).unwrap();
        assert_eq!(s, SourceSpec::MixedConstRightDragLeft);
        assert!(serde_json::from_str::<SourceSpec>(r#"{"kind":"const_left"}"#).is_err());
        assert!(serde_json::from_str::<SourceSpec>(r#"{"kind":"const_left","sign":2}"#).is_err());
        assert!(serde_json::from_str::<SourceSpec>(r#"{"kind":"homogeneous","sign":1}"#).is_err());
        assert!(serde_json::from_str::<SourceSpec>(r#"{"kind":"gravity"}"#).is_err());
    }

    #[test]
    fn x_dependent_source_rejected() {
        let s: SourceSpec = serde_json::from_str(r#"{"kind":"general","g":{"x":1}}"#).unwrap();
        let d = RiemannData::new(1.0, 2.0, 1.0, 0.0).unwrap();
        assert_eq!(validate(d, s).unwrap_err().code(), "UnsupportedSource");
    }

    #[test]
    fn named_sources_match_their_forcing() {
        let u = 0.7;
        let t = 1.3;
        assert_eq!(SourceSpec::ConstLeft(Sign::Plus).left(t, u), 1.0);
        assert_eq!(SourceSpec::ConstLeft(Sign::Plus).right(t, u), 0.0);
        assert_eq!(SourceSpec::LinearDragLeft(Sign::Minus).left(t, u), -u);
        assert_eq!(SourceSpec::MixedConstRightDragLeft.right(t, u), 1.0);
        assert_eq!(SourceSpec::MixedConstRightDragLeft.left(t, u), -u);
        assert_eq!(SourceSpec::UniformDrag.right(t, u), -u);
        let g = SourceSpec::General {
            f: Forcing::constant(1.0),
            g: Forcing::custom(|t, u| t * u),
        };
        assert_eq!(g.right(t, u), 1.0);
        assert_eq!(g.left(t, u), t * u);
    }

    fn arb_source() -> impl Strategy<Value = SourceSpec> {
        let sign = prop_oneof![Just(Sign::Plus), Just(Sign::Minus)];
        let affine = (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(|(c, t, u)| {
            Forcing::Affine(AffineForcing {
                constant: c,
                t,
                u,
                x: 0.0,
            })
        });
        prop_oneof![
            Just(SourceSpec::Homogeneous),
            sign.clone().prop_map(SourceSpec::ConstLeft),
            sign.prop_map(SourceSpec::LinearDragLeft),
            Just(SourceSpec::MixedConstRightDragLeft),
            Just(SourceSpec::UniformDrag),
            (affine.clone(), affine).prop_map(|(f, g)| SourceSpec::General { f, g }),
        ]
    }

    proptest! {
        #[test]
        fn data_round_trips(rm in 0.01..10.0f64, rp in 0.01..10.0f64, up in -5.0..5.0f64, gap in 1e-6..5.0f64) {
            let d = RiemannData::new(rm, up + gap, rp, up).unwrap();
            let back: RiemannData = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
            prop_assert_eq!(back, d);
        }

        #[test]
        fn source_round_trips(s in arb_source()) {
            let back: SourceSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
