//! Acceptance criteria. Each test writes one `PASS`/`FAIL` line straight to
//! stdout (bypassing the harness capture) and then asserts its gate.

use std::io::Write;

use lsb_lab::actions::{ConnectionCoefficients, CostConvention, RiccatiCoefficients, StateSpace, Value};
use lsb_lab::dynamics::{
    integrate_euler_poincare, integrate_extremal, integrate_riccati, reconstruct_group, Control,
    Frame, IntegratorConfig, SymmetricSolutionParams, Trajectory,
};
use lsb_lab::error::Error;
use lsb_lab::lie::{AlgebraElement, GroupElement, GroupId, InertiaOperator, C64};
use lsb_lab::verify::{
    audit_closed_loop, check_action_equality, check_closed_form, check_conservation,
    check_cross_ratio, check_equivalence_rigid, check_lie_closure, check_rk4_order, rigid_lift,
    CheckEntry,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn line(criterion: u8, title: &str, passed: bool, detail: &str) -> bool {
    let tag = if passed { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout();
    let _ = writeln!(out, "acceptance {criterion} [{tag}] {title}: {detail}");
    let _ = out.flush();
    passed
}

fn summary(entries: &[CheckEntry]) -> String {
    entries
        .iter()
        .map(|e| format!("{}={:.3e} (tol {:.1e})", e.name, e.max_residual, e.tolerance))
        .collect::<Vec<_>>()
        .join(", ")
}

const SO3_OMEGA: [f64; 3] = [0.8, 0.3, 0.1];

fn so3_inertia() -> InertiaOperator {
    InertiaOperator::diagonal(GroupId::So3, [1.0, 2.0, 3.0]).unwrap()
}

fn rigid_trajectory() -> Trajectory {
    let g = GroupId::So3;
    let cfg = IntegratorConfig::rk4(1e-3, 1.0).unwrap();
    let ep = integrate_euler_poincare(&so3_inertia(), &AlgebraElement::real(g, SO3_OMEGA), &cfg).unwrap();
    reconstruct_group(&ep, &GroupElement::identity(g), Frame::Body).unwrap()
}

fn symmetric_params(group: GroupId) -> SymmetricSolutionParams {
    SymmetricSolutionParams {
        inertia: 1.0,
        inertia_zero: 2.0,
        connection: [1.0; 3],
        xi_zero: 0.5.into(),
        xi_plus0: 1.0.into(),
        // SL(2,ℝ) does not use ξ₋0; the other groups take the same value as ξ₊0
        xi_minus0: if group == GroupId::Sl2r { 0.0.into() } else { 1.0.into() },
    }
}

const LINE_GROUPS: [GroupId; 3] = [GroupId::Sl2r, GroupId::Su2, GroupId::So21];

#[test]
fn criterion_1_structure_constants() {
    let g = GroupId::Sl2r;
    let e = |i| AlgebraElement::basis(g, i);
    let brackets = [
        (e(0).bracket(&e(1)).unwrap(), e(2)),
        (e(0).bracket(&e(2)).unwrap(), e(0) * -2.0),
        (e(1).bracket(&e(2)).unwrap(), e(1) * 2.0),
    ];
    let relations = brackets.iter().all(|(got, want)| got == want);
    let commutators = (0..3).all(|a| {
        (0..3).all(|b| {
            let m = e(a).matrix() * e(b).matrix() - e(b).matrix() * e(a).matrix();
            e(a).bracket(&e(b)).unwrap().matrix() == m
        })
    });
    // Jacobi on integer structure constants: Σ_d C_ab^d C_dc^e + cyclic = 0
    let mut jacobi = true;
    for grp in GroupId::ALL {
        let c = grp.structure_constants();
        for a in 0..3 {
            for b in 0..3 {
                for k in 0..3 {
                    for out in 0..3 {
                        let s: i64 = (0..3)
                            .map(|d| {
                                i64::from(c[a][b][d]) * i64::from(c[d][k][out])
                                    + i64::from(c[b][k][d]) * i64::from(c[d][a][out])
                                    + i64::from(c[k][a][d]) * i64::from(c[d][b][out])
                            })
                            .sum();
                        jacobi &= s == 0;
                    }
                }
            }
        }
    }
    let ok = relations && commutators && jacobi;
    assert!(line(
        1,
        "structure constants",
        ok,
        &format!("sl2r relations exact: {relations}, matrix commutators exact: {commutators}, integer Jacobi on all groups: {jacobi}"),
    ));
}

#[test]
fn criterion_2_lie_closure() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let b = ConnectionCoefficients::maurer_cartan();
    let mut entries = Vec::new();
    for g in LINE_GROUPS {
        let pts: Vec<Value> = (0..100)
            .map(|_| {
                let re = rng.gen_range(-3.0..3.0);
                let im = if g.is_complex() { rng.gen_range(-3.0..3.0) } else { 0.0 };
                Value::Scalar(C64::new(re, im))
            })
            .collect();
        let mut e = check_lie_closure(StateSpace::moebius(g).unwrap(), &b, &pts).unwrap();
        e.name = format!("{}.{}", e.name, g.name());
        entries.push(e);
    }
    let ok = entries.iter().all(|e| e.passed);
    assert!(line(2, "Lie closure of Möbius generators (100 random points)", ok, &summary(&entries)));
}

#[test]
fn criterion_3_rigid_body_equivalence() {
    let traj = rigid_trajectory();
    let mut entries = check_equivalence_rigid(&so3_inertia(), &traj, &GroupElement::identity(GroupId::So3)).unwrap();
    for e in &mut entries {
        e.tolerance = 1e-5;
        e.passed = e.max_residual <= 1e-5;
    }
    let cfg = IntegratorConfig::rk4(1e-3, 10.0).unwrap();
    entries.extend(
        check_conservation(&so3_inertia(), &AlgebraElement::real(GroupId::So3, SO3_OMEGA), &cfg, 1e-6).unwrap(),
    );
    let ok = entries.iter().all(|e| e.passed);
    assert!(line(3, "rigid-body equivalence and conservation", ok, &summary(&entries)));
}

#[test]
fn criterion_4_symmetric_closed_form() {
    let alpha = symmetric_params(GroupId::Sl2r).alpha();
    let alpha_ok = alpha == C64::from(1.0);
    let cfg = IntegratorConfig::rk4(1e-4, 1.0).unwrap();
    let mut entries = Vec::new();
    for g in LINE_GROUPS {
        entries.extend(check_closed_form(g, &symmetric_params(g), &cfg).unwrap());
    }
    let ok = alpha_ok && entries.iter().all(|e| e.passed);
    let detail = format!(
        "alpha = {alpha}; {}; {}",
        summary(&entries),
        entries
            .iter()
            .filter(|e| !e.passed)
            .map(|e| format!("{}: {}", e.name, e.details))
            .collect::<Vec<_>>()
            .join("; ")
    );
    assert!(line(4, "symmetric closed form vs numeric closed loop", ok, &detail));
}

#[test]
fn criterion_5_xi_zero_conservation() {
    let g = GroupId::Sl2r;
    let p = symmetric_params(g);
    let j = p.inertia_operator(g).unwrap();
    let xi0 = AlgebraElement::new(g, [p.xi_plus0, 0.7.into(), p.xi_zero]);
    let cfg = IntegratorConfig::rk4(1e-3, 1.0).unwrap();
    let traj = integrate_euler_poincare(&j, &xi0, &cfg).unwrap();
    let drift = traj
        .xi_series()
        .unwrap()
        .iter()
        .map(|xi| (xi.coeffs()[2] - p.xi_zero).norm())
        .fold(0.0, f64::max);
    let ok = drift <= 1e-10;
    assert!(line(5, "xi_0 conservation, symmetric sl2r", ok, &format!("max |xi_0(t) - xi_0(0)| = {drift:.3e} (tol 1e-10)")));
}

#[test]
fn criterion_6_action_equality() {
    let mut entries = Vec::new();
    let lift = rigid_lift(&so3_inertia(), &rigid_trajectory(), &GroupElement::identity(GroupId::So3)).unwrap();
    let mut e = check_action_equality(&so3_inertia(), &ConnectionCoefficients::maurer_cartan(), &lift, CostConvention::Coordinate).unwrap();
    e.name = "action.rigid_so3".into();
    entries.push(e);

    let cfg = IntegratorConfig::rk4(1e-4, 1.0).unwrap();
    let mut notes = Vec::new();
    for g in LINE_GROUPS {
        let params = symmetric_params(g);
        let j = params.inertia_operator(g).unwrap();
        let b = params.connection().unwrap();
        let (x0, p0) = lsb_lab::dynamics::closed_form_symmetric(g, &params, 0.0).unwrap();
        let run = integrate_extremal(
            StateSpace::moebius(g).unwrap(), &b, &j, &Value::Scalar(x0), &Value::Scalar(p0), &Control::Feedback, &cfg,
        );
        let traj = match run {
            Ok(t) => t,
            Err(Error::Divergence { escape_time, partial, .. }) => {
                notes.push(format!("{} closed loop escapes at t = {escape_time:.4}, prefix t <= {:.4} used", g.name(), 0.9 * escape_time));
                partial.truncated(0.9 * escape_time)
            }
            Err(e) => panic!("{e}"),
        };
        let mut e = check_action_equality(&j, &b, &traj, CostConvention::Coordinate).unwrap();
        e.name = format!("action.closed_loop_{}", g.name());
        entries.push(e);
    }
    let ok = entries.iter().all(|e| e.passed);
    assert!(line(6, "action equality S_L = S_Clebsch", ok, &format!("{}; {}", summary(&entries), notes.join("; "))));
}

#[test]
fn criterion_7_riccati_superposition() {
    let cfg = IntegratorConfig::rk4(1e-4, 0.2).unwrap();
    let square = RiccatiCoefficients { a: 1.0.into(), b: 0.0.into(), c: 0.0.into() };
    let starts = [1.0f64, 2.0, 3.0, 4.0];
    let numeric: Vec<Vec<C64>> = starts
        .iter()
        .map(|&s| {
            let t = integrate_riccati(GroupId::Sl2r, |_| square, s.into(), &cfg).unwrap();
            t.x_series().unwrap().iter().map(|v| v.as_scalar().unwrap()).collect()
        })
        .collect();
    let times = cfg.times();
    let exact: Vec<Vec<C64>> = starts
        .iter()
        .map(|&s| times.iter().map(|t| C64::from(s / (1.0 - s * t))).collect())
        .collect();
    let family_error = numeric
        .iter()
        .zip(&exact)
        .flat_map(|(n, e)| n.iter().zip(e).map(|(a, b)| ((a - b) / b).norm()))
        .fold(0.0, f64::max);
    let drift = check_cross_ratio(&numeric).unwrap();
    let exact_drift = check_cross_ratio(&exact).unwrap();
    let ok = drift.passed && exact_drift.passed;
    assert!(line(
        7,
        "Riccati cross-ratio superposition",
        ok,
        &format!(
            "numeric drift {:.3e}, exact-family drift {:.3e} (tol 1e-8); max relative error vs x0/(1 - x0 t) {family_error:.3e}",
            drift.max_residual, exact_drift.max_residual
        ),
    ));
}

#[test]
fn criterion_8_closed_loop_audit() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pts: Vec<(f64, f64)> = (0..200).map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
    let b = ConnectionCoefficients([1.0, 0.5, 2.0]);
    let (checks, findings) = audit_closed_loop(&b, [1.0, 2.0, 3.0], &pts).unwrap();
    let consistency = &checks[0];
    let notes = findings
        .iter()
        .map(|f| format!("{} deviates by {:.3e} ({})", f.name, f.max_deviation, f.details))
        .collect::<Vec<_>>()
        .join("; ");
    assert!(line(
        8,
        "closed-loop audit",
        consistency.passed,
        &format!("self-consistency {:.3e} (tol 1e-14); findings: {notes}", consistency.max_residual),
    ));
}

#[test]
fn criterion_9_rk4_order() {
    let e = check_rk4_order(&so3_inertia(), &AlgebraElement::real(GroupId::So3, SO3_OMEGA), 0.1, 2.0).unwrap();
    assert!(line(9, "RK4 convergence order on the rigid body", e.passed, &e.details));
}

#[test]
fn closed_form_starts_on_the_closed_loop_state() {
    // the closed-form parameters reproduce (x0, p0) at t = 0 for every group
    for g in LINE_GROUPS {
        let p = symmetric_params(g);
        let (x0, p0) = lsb_lab::dynamics::closed_form_symmetric(g, &p, 0.0).unwrap();
        let back = SymmetricSolutionParams::from_costate(g, 1.0, 2.0, [1.0; 3], x0, p0).unwrap();
        let (x1, p1) = lsb_lab::dynamics::closed_form_symmetric(g, &back, 0.0).unwrap();
        assert!((x1 - x0).norm() < 1e-14 && (p1 - p0).norm() < 1e-14, "{g}");
    }
}
