//! Characteristics, weak-form residuals and particles on random data.

use deltashock::characteristics::{characteristic, clip_to_front, Side};
use deltashock::exact;
use deltashock::grh_ode::{self, IntegratorOptions};
use deltashock::model::{validate, AffineForcing, FieldState, Forcing, RiemannData, Sign, SourceSpec};
use deltashock::particles;
use deltashock::weak_residual::{
    self, residual_mass, residual_velocity, Bump, Combination, TestFunction, WeakOptions, DEFAULT_THRESHOLD,
};
use proptest::prelude::*;

fn closed_form_sources() -> impl Strategy<Value = SourceSpec> {
    prop_oneof![
        Just(SourceSpec::Homogeneous),
        Just(SourceSpec::ConstLeft(Sign::Plus)),
        Just(SourceSpec::ConstLeft(Sign::Minus)),
        Just(SourceSpec::LinearDragLeft(Sign::Plus)),
        Just(SourceSpec::LinearDragLeft(Sign::Minus)),
        Just(SourceSpec::MixedConstRightDragLeft),
        Just(SourceSpec::UniformDrag),
    ]
}

prop_compose! {
    fn data()(rm in 0.2f64..5.0, rp in 0.2f64..5.0, up in -3.0f64..3.0, gap in 0.05f64..3.0) -> RiemannData {
        RiemannData::new(rm, up + gap, rp, up).unwrap()
    }
}

prop_compose! {
    fn affine()(constant in -1.0f64..1.0, t in -0.5f64..0.5, u in -1.0f64..1.0) -> AffineForcing {
        AffineForcing { constant, t, u, ..AffineForcing::default() }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn characteristics_carry_the_side_velocity(
        d in data(),
        source in closed_form_sources(),
        x0 in prop_oneof![-4.0f64..-0.05, 0.05f64..4.0],
        frac in 0.05f64..0.9,
    ) {
        let field = exact::solve(&validate(d, source.clone()).unwrap()).unwrap();
        let curve = clip_to_front(characteristic(&source, &d, x0).unwrap(), field.path());
        prop_assert_eq!(curve.side(), if x0 < 0.0 { Side::Left } else { Side::Right });
        let end = curve.clipped_at().unwrap_or(f64::INFINITY).min(field.path().valid_until()).min(3.0);
        let t = frac * end;
        let h = 1e-5_f64.min(0.5 * t);
        let fd = (curve.trace(t + h) - curve.trace(t - h)) / (2.0 * h);
        let u = match field.state_at(curve.trace(t), t) {
            FieldState::Smooth { u, .. } => u,
            other => return Err(TestCaseError::fail(format!("{other:?} on an unclipped characteristic"))),
        };
        prop_assert!((fd - u).abs() <= 1e-8 * u.abs().max(1.0), "{fd} vs {u}");
        prop_assert_eq!(curve.slope(t), curve.motion().velocity(t));
        // A clipped curve really meets the front, from its own side.
        if let Some(tc) = curve.clipped_at() {
            prop_assert!((curve.trace(tc) - field.front_position(tc)).abs() <= 1e-8 * tc.max(1.0));
            let gap = field.front_position(t) - curve.trace(t);
            let on_own_side = if x0 < 0.0 { gap > 0.0 } else { gap < 0.0 };
            prop_assert!(on_own_side, "gap {gap} at t = {t}");
        }
    }

    #[test]
    fn characteristics_never_cross_on_one_side(
        d in data(),
        source in closed_form_sources(),
        a in 0.05f64..4.0,
        b in 0.05f64..4.0,
        left in any::<bool>(),
    ) {
        prop_assume!((a - b).abs() > 1e-3);
        let sign = if left { -1.0 } else { 1.0 };
        let (x0, x1) = (sign * a.min(b), sign * a.max(b));
        let c0 = characteristic(&source, &d, x0).unwrap();
        let c1 = characteristic(&source, &d, x1).unwrap();
        for k in 0..=30 {
            let t = 0.1 * k as f64;
            prop_assert_eq!((c1.trace(t) - c0.trace(t)).signum(), (x1 - x0).signum());
        }
    }

    #[test]
    fn residuals_are_linear_in_the_test_function(
        d in data(),
        source in closed_form_sources(),
        alpha in -2.0f64..2.0,
        beta in -2.0f64..2.0,
        dx in -0.3f64..0.3,
    ) {
        let field = exact::solve(&validate(d, source).unwrap()).unwrap();
        let end = field.path().valid_until().min(2.0);
        let t1 = 0.4 * end;
        let t2 = 0.6 * end;
        let b1 = Bump::new(field.front_position(t1) + dx * end, t1, 0.3 * end, 0.3 * end);
        let b2 = Bump::new(field.front_position(t2), t2, 0.2 * end, 0.25 * end);
        // Perturbed, so the residuals are far from zero and linearity is not vacuous.
        let field = weak_residual::perturb(&field, 0.2, 1.1);
        let combo = Combination { terms: vec![(alpha, b1), (beta, b2)] };
        let opts = WeakOptions::default();
        let area = combo.support_area() * combo.sup_norm().max(1.0);
        for r in [residual_velocity, residual_mass] {
            let whole = r(&field, &combo, &opts).unwrap();
            let parts = alpha * r(&field, &b1, &opts).unwrap() + beta * r(&field, &b2, &opts).unwrap();
            prop_assert!((whole - parts).abs() <= 1e-9 * area, "{whole} vs {parts}");
        }
    }

    #[test]
    fn integrated_fronts_are_weak_solutions(d in data(), f in affine(), g in affine()) {
        let problem = validate(d, SourceSpec::General { f: Forcing::Affine(f), g: Forcing::Affine(g) }).unwrap();
        let field = grh_ode::integrate_field(&problem, 2.0, &IntegratorOptions::default()).unwrap();
        prop_assume!(field.path().valid_until() > 1e-3);
        let report = weak_residual::verify(&field, DEFAULT_THRESHOLD, &WeakOptions::default()).unwrap();
        prop_assert!(report.pass, "max residual {:e}", report.max_residual());
    }

    #[test]
    fn particles_conserve_mass_and_order(
        d in data(),
        drag in any::<bool>(),
        steps in 1usize..400,
    ) {
        let source = if drag { SourceSpec::UniformDrag } else { SourceSpec::Homogeneous };
        let mut sys = particles::init(&d, 50, 3.0).unwrap();
        let (m0, p0) = (sys.total_mass(), sys.total_momentum());
        let dt = particles::default_dt(&d, 50, 3.0);
        for _ in 0..steps {
            sys.step(&source, dt).unwrap();
        }
        prop_assert!(sys.positions().windows(2).all(|p| p[0] < p[1]));
        prop_assert!((sys.total_mass() - m0).abs() <= 1e-13 * m0);
        let p = if drag { p0 * (-sys.time()).exp() } else { p0 };
        let scale = sys.masses().iter().zip(sys.velocities()).map(|(m, u)| (m * u).abs()).sum::<f64>().max(1.0);
        prop_assert!((sys.total_momentum() - p).abs() <= 1e-12 * scale);
        prop_assert!(sys.masses().iter().all(|&m| m > 0.0));
    }
}

/// Fixed rules on a bump straddling a front converge to the adaptive value.
#[test]
fn fixed_rules_converge_under_refinement() {
    let d = RiemannData::new(1.0, 2.0, 1.0, 1.0).unwrap();
    let field = exact::solve_drag_left(&d, Sign::Minus);
    let field = weak_residual::perturb(&field, 0.1, 1.0);
    let bump = Bump::new(field.front_position(0.35), 0.35, 0.2, 0.2);
    let reference = residual_velocity(&field, &bump, &WeakOptions::default()).unwrap();
    let errors: Vec<f64> = [4usize, 8, 16, 32]
        .iter()
        .map(|&n| (residual_velocity(&field, &bump, &WeakOptions::fixed(n)).unwrap() - reference).abs())
        .collect();
    assert!(errors.windows(2).all(|e| e[1] < e[0]), "{errors:?}");
    assert!(errors[3] <= 1e-2 * errors[0], "{errors:?}");
}
