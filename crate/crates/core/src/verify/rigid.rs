use super::{differential_tolerance, CheckEntry};
use crate::actions::{StateSpace, Value};
use crate::dynamics::{
    central_difference, euler_poincare_rhs, integrate_euler_poincare, IntegratorConfig, Method,
    Sample, Trajectory,
};
use crate::error::{Error, Result};
use crate::lie::{frobenius, AlgebraElement, CMatrix, GroupElement, GroupId, InertiaOperator, C64};

fn rigid_group(g: GroupId) -> Result<()> {
    match g {
        GroupId::So3 | GroupId::Su2 => Ok(()),
        _ => Err(Error::Unsupported(format!("{g} has no rigid-body lift"))),
    }
}

/// `xᴴp − pᴴx`
fn constraint_form(x: &CMatrix, p: &CMatrix) -> CMatrix {
    x.adjoint() * p - p.adjoint() * x
}

/// Lifts a reconstructed trajectory (`ξ` and `g`) to the state–costate
/// curve `x(t) = x₀ g(t)`, `p(t) = p(0) g(0)⁻¹ g(t)`, where `p(0)` is the
/// minimum-norm solution of `xᴴp − pᴴx = Jξ` at `t = 0`.
pub fn rigid_lift(j: &InertiaOperator, traj: &Trajectory, x0: &GroupElement) -> Result<Trajectory> {
    let group = traj.group();
    rigid_group(group)?;
    let xi = traj.xi_series()?;
    let g = traj.g_series()?;
    if x0.group() != group || j.group() != group {
        return Err(Error::GroupMismatch {
            left: group,
            right: if x0.group() != group { x0.group() } else { j.group() },
        });
    }
    let m0 = j.apply(&xi[0])?.matrix();
    let x_start = x0.matrix() * g[0].matrix();
    // m0 is skew-Hermitian and x_start unitary, so this is exact and minimal
    let p_start = &x_start * &m0 * C64::from(0.5);
    let p_base = &p_start * g[0].inverse()?.matrix();
    let samples = traj
        .samples()
        .iter()
        .zip(&g)
        .map(|(s, gk)| Sample {
            x: Some(Value::Matrix(x0.matrix() * gk.matrix())),
            p: Some(Value::Matrix(&p_base * gk.matrix())),
            ..s.clone()
        })
        .collect();
    Trajectory::new(group, Some(StateSpace::GroupManifold(group)), traj.times().to_vec(), samples)
}

fn matrices(values: Vec<Value>) -> Vec<CMatrix> {
    values
        .into_iter()
        .map(|v| match v {
            Value::Matrix(m) => m,
            Value::Scalar(z) => CMatrix::from_element(1, 1, z),
        })
        .collect()
}

/// Control-equation, constraint and derivative-tie residuals along the lift
/// of `traj` through `x0`.
pub fn check_equivalence_rigid(
    j: &InertiaOperator,
    traj: &Trajectory,
    x0: &GroupElement,
) -> Result<Vec<CheckEntry>> {
    let lift = rigid_lift(j, traj, x0)?;
    let h = lift.step();
    let tol = differential_tolerance(h);
    let xi = lift.xi_series()?;
    let x = matrices(lift.x_series()?);
    let p = matrices(lift.p_series()?);
    let xdot = central_difference(&x, h)?;

    let mut control = 0.0f64;
    let mut constraint = 0.0f64;
    let mut forms = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        let v = xi[k].matrix();
        control = control.max(frobenius(&(&xdot[k] - &x[k] * &v)));
        let form = constraint_form(&x[k], &p[k]);
        constraint = constraint.max(frobenius(&(&form - j.apply(&xi[k])?.matrix())));
        forms.push(form);
    }
    let dforms = central_difference(&forms, h)?;
    let mut tie = 0.0f64;
    for (k, d) in dforms.iter().enumerate() {
        let jdot = j.apply(&euler_poincare_rhs(j, &xi[k])?)?.matrix();
        tie = tie.max(frobenius(&(d - jdot)));
    }
    Ok(vec![
        CheckEntry::new(
            "rigid.control_residual",
            control,
            tol,
            format!("max ‖ẋ − xξ‖ over the lift x = x₀g, central differences, h = {h}"),
        ),
        CheckEntry::new(
            "rigid.constraint_residual",
            constraint,
            tol,
            "max ‖xᴴp − pᴴx − Jξ‖ with minimum-norm p₀",
        ),
        CheckEntry::new(
            "rigid.derivative_tie",
            tie,
            tol,
            "max ‖d/dt(xᴴp − pᴴx) − Jξ̇‖ with ξ̇ from the Euler–Poincaré field",
        ),
    ])
}

fn energy(j: &InertiaOperator, xi: &AlgebraElement) -> Result<f64> {
    Ok(j.coordinate_cost(xi)?.re)
}

fn casimir(j: &InertiaOperator, xi: &AlgebraElement) -> Result<f64> {
    Ok(j.apply(xi)?.coeffs().iter().map(|z| z.norm_sqr()).sum())
}

/// Drift of the energy `½ξ·Jξ` and of `‖Jξ‖²` along the Euler–Poincaré flow.
pub fn check_conservation(
    j: &InertiaOperator,
    xi0: &AlgebraElement,
    cfg: &IntegratorConfig,
    tolerance: f64,
) -> Result<Vec<CheckEntry>> {
    let traj = integrate_euler_poincare(j, xi0, cfg)?;
    let xi = traj.xi_series()?;
    let (e0, c0) = (energy(j, &xi[0])?, casimir(j, &xi[0])?);
    let mut de = 0.0f64;
    let mut dc = 0.0f64;
    for x in &xi {
        de = de.max((energy(j, x)? - e0).abs());
        dc = dc.max((casimir(j, x)? - c0).abs());
    }
    let span = format!("over [0, {}] with h = {}", cfg.horizon(), cfg.step());
    Ok(vec![
        CheckEntry::new("conservation.energy", de, tolerance, format!("max |E(t) − E(0)| {span}")),
        CheckEntry::new("conservation.casimir", dc, tolerance, format!("max |‖Jξ(t)‖² − ‖Jξ(0)‖²| {span}")),
    ])
}

/// Ratio of RK4 terminal errors at `h` and `h/2` against an `h/64`
/// reference; the entry passes when the ratio lies in `[12, 20]`.
pub fn check_rk4_order(j: &InertiaOperator, xi0: &AlgebraElement, step: f64, horizon: f64) -> Result<CheckEntry> {
    let terminal = |h: f64| -> Result<AlgebraElement> {
        let cfg = IntegratorConfig::new(Method::Rk4, h, horizon)?;
        let traj = integrate_euler_poincare(j, xi0, &cfg)?;
        Ok(*traj.samples().last().and_then(|s| s.xi.as_ref()).expect("ξ samples"))
    };
    let reference = terminal(step / 64.0)?;
    let e1 = (terminal(step)? - reference).norm();
    let e2 = (terminal(step / 2.0)? - reference).norm();
    let ratio = e1 / e2;
    Ok(CheckEntry::new(
        "rk4.order",
        (ratio - 16.0).abs(),
        4.0,
        format!("error ratio {ratio:.4} (h = {step}: {e1:.3e}, h/2: {e2:.3e}); passes inside [12, 20]"),
    ))
}
