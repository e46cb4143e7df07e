use super::CheckEntry;
use crate::actions::{clebsch_lagrangian, lagrangian, ConnectionCoefficients, CostConvention};
use crate::dynamics::{fourth_order_difference, simpson, Trajectory};
use crate::error::{Error, Result};
use crate::lie::InertiaOperator;

/// `|S_L − S_𝓛| ≤ 1e-8·(1 + |S_L|)`, where `S_𝓛` integrates the Clebsch
/// Lagrangian along the stored `(x, p, ξ)` with `ẋ` from fourth-order
/// differences.
pub fn check_action_equality(
    j: &InertiaOperator,
    b: &ConnectionCoefficients,
    traj: &Trajectory,
    cost: CostConvention,
) -> Result<CheckEntry> {
    let space = traj
        .space()
        .ok_or_else(|| Error::Domain("action check needs a trajectory with a state space".into()))?;
    let h = traj.step();
    let xi = traj.xi_series()?;
    let x = traj.x_series()?;
    let p = traj.p_series()?;
    let xdot = fourth_order_difference(&x, h)?;
    let plain = xi.iter().map(|u| lagrangian(j, u, cost)).collect::<Result<Vec<_>>>()?;
    let clebsch = (0..xi.len())
        .map(|k| clebsch_lagrangian(space, b, j, &x[k], &p[k], &xdot[k], &xi[k], cost))
        .collect::<Result<Vec<_>>>()?;
    let s_l = simpson(&plain, h)?;
    let s_c = simpson(&clebsch, h)?;
    let diff = (s_l - s_c).norm();
    Ok(CheckEntry::new(
        "action.equality",
        diff,
        1e-8 * (1.0 + s_l.norm()),
        format!(
            "S_L = {s_l:.12e}, S_Clebsch = {s_c:.12e} on [0, {}], h = {h}",
            traj.horizon()
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{StateSpace, Value};
    use crate::dynamics::{integrate_extremal, Control, IntegratorConfig};
    use crate::lie::{AlgebraElement, GroupElement, GroupId};

    #[test]
    fn zero_velocity_has_zero_actions() {
        let g = GroupId::So3;
        let j = InertiaOperator::diagonal(g, [1.0, 2.0, 3.0]).unwrap();
        let cfg = IntegratorConfig::rk4(0.01, 1.0).unwrap();
        let x0 = Value::Matrix(GroupElement::identity(g).into_matrix());
        let traj = integrate_extremal(
            StateSpace::GroupManifold(g), &ConnectionCoefficients::maurer_cartan(), &j, &x0, &x0,
            &Control::EulerPoincare(AlgebraElement::zero(g)), &cfg,
        )
        .unwrap();
        let e = check_action_equality(&j, &ConnectionCoefficients::maurer_cartan(), &traj, CostConvention::Coordinate).unwrap();
        // only stencil roundoff on a constant x
        assert!(e.max_residual < 1e-13, "{}", e.max_residual);
    }

    #[test]
    fn zero_costate_makes_equality_exact() {
        let g = GroupId::So3;
        let j = InertiaOperator::diagonal(g, [1.0, 2.0, 3.0]).unwrap();
        let cfg = IntegratorConfig::rk4(0.01, 1.0).unwrap();
        let x0 = Value::Matrix(GroupElement::identity(g).into_matrix());
        let p0 = x0.zero_like();
        let traj = integrate_extremal(
            StateSpace::GroupManifold(g), &ConnectionCoefficients::maurer_cartan(), &j, &x0, &p0,
            &Control::EulerPoincare(AlgebraElement::real(g, [0.8, 0.3, 0.1])), &cfg,
        )
        .unwrap();
        let e = check_action_equality(&j, &ConnectionCoefficients::maurer_cartan(), &traj, CostConvention::Coordinate).unwrap();
        assert_eq!(e.max_residual, 0.0);
        assert!(e.passed);
    }

    #[test]
    fn closed_loop_extremal_passes() {
        let g = GroupId::Sl2r;
        let j = InertiaOperator::diagonal(g, [1.0, 1.0, 2.0]).unwrap();
        let b = ConnectionCoefficients::maurer_cartan();
        let cfg = IntegratorConfig::rk4(1e-3, 0.5).unwrap();
        let traj = integrate_extremal(
            StateSpace::moebius(g).unwrap(), &b, &j, &Value::real(0.5), &Value::real(1.0), &Control::Feedback, &cfg,
        )
        .unwrap();
        let e = check_action_equality(&j, &b, &traj, CostConvention::Coordinate).unwrap();
        assert!(e.passed, "{} > {}", e.max_residual, e.tolerance);
    }
}
