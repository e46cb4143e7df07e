//! Pontryagin extremal flows: lifted extremals on a group manifold and the
//! closed-loop Riccati system on the Möbius line.

use nalgebra::DVector;

use super::euler_poincare::euler_poincare_rhs;
use super::integrator::{integrate, IntegratorConfig, State};
use super::trajectory::{Sample, Trajectory};
use crate::actions::{
    line_generators, riccati_coefficients, ConnectionCoefficients, RiccatiCoefficients,
    StateSpace, Value,
};
use crate::error::{Error, Result};
use crate::lie::{AlgebraElement, CMatrix, GroupId, InertiaOperator, C64};

/// Optimal feedback on the Möbius line: the stationary point of the
/// Pontryagin Hamiltonian in `ξ`, `J ξ = μ(x, p)` with `μ_a = p X_a(x)`.
///
/// For SL(2,ℝ) with diagonal inertia this is
/// `ξ₊ = B₊p/I₊`, `ξ₋ = −B₋px²/I₋`, `ξ₀ = 2B₀px/I₀`.
pub fn feedback_solve(
    group: GroupId,
    b: &ConnectionCoefficients,
    j: &InertiaOperator,
    x: C64,
    p: C64,
) -> Result<AlgebraElement> {
    let gens = line_generators(group, b, x)?;
    let mu = AlgebraElement::new(group, gens.map(|(v, _)| p * v));
    j.solve(&mu)
}

/// Closed-loop Hamiltonian vector field: feedback substituted into the
/// Riccati coefficients, then `ẋ = ax² + bx + c`, `ṗ = −(2ax + b)p`.
pub fn closed_loop_rhs(
    group: GroupId,
    b: &ConnectionCoefficients,
    j: &InertiaOperator,
    x: C64,
    p: C64,
) -> Result<(C64, C64)> {
    let xi = feedback_solve(group, b, j, x, p)?;
    let r = riccati_coefficients(group, &xi, b)?;
    Ok((r.eval(x), -r.derivative(x) * p))
}

/// Source of the control along an extremal.
#[derive(Clone, Debug, PartialEq)]
pub enum Control {
    /// Closed loop through [`feedback_solve`] (Möbius line).
    Feedback,
    /// `ξ(t)` from the Euler–Poincaré flow started at the given value
    /// (group manifold).
    EulerPoincare(AlgebraElement),
}

fn divergence(traj: Trajectory, escape_time: f64) -> Error {
    Error::Divergence {
        last_time: traj.horizon(),
        escape_time,
        partial: Box::new(traj),
    }
}

/// Integrates the coupled state–costate system with RK4 (or Euler).
///
/// * Group manifold: `ẋ = x·B(ξ)`, `ṗ = p·B(ξ)` with `ξ` evolving by
///   Euler–Poincaré alongside.
/// * Möbius line: the closed-loop Riccati system of [`closed_loop_rhs`].
pub fn integrate_extremal(
    space: StateSpace,
    b: &ConnectionCoefficients,
    j: &InertiaOperator,
    x0: &Value,
    p0: &Value,
    control: &Control,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    space.validate(x0)?;
    space.validate(p0)?;
    let group = space.group();
    if j.group() != group {
        return Err(Error::GroupMismatch {
            left: group,
            right: j.group(),
        });
    }
    match (space, control) {
        (StateSpace::MoebiusLine(_), Control::Feedback) => {
            let (x0, p0) = (x0.as_scalar().unwrap(), p0.as_scalar().unwrap());
            let run = integrate(
                |_, y| {
                    let (dx, dp) = closed_loop_rhs(group, b, j, y[0], y[1])?;
                    Ok(DVector::from_column_slice(&[dx, dp]))
                },
                DVector::from_column_slice(&[x0, p0]),
                cfg,
            )?;
            let samples = run
                .states
                .iter()
                .map(|y| {
                    Ok(Sample {
                        xi: Some(feedback_solve(group, b, j, y[0], y[1])?),
                        x: Some(Value::Scalar(y[0])),
                        p: Some(Value::Scalar(y[1])),
                        g: None,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            finish(space, cfg, samples, run.escape_time)
        }
        (StateSpace::GroupManifold(_), Control::EulerPoincare(xi0)) => {
            if xi0.group() != group {
                return Err(Error::GroupMismatch {
                    left: group,
                    right: xi0.group(),
                });
            }
            let n = group.dim();
            let nn = n * n;
            let unpack = |y: &State| {
                let xi = AlgebraElement::new(group, [y[0], y[1], y[2]]);
                let x = CMatrix::from_column_slice(n, n, &y.as_slice()[3..3 + nn]);
                let p = CMatrix::from_column_slice(n, n, &y.as_slice()[3 + nn..]);
                (xi, x, p)
            };
            let mut y0 = Vec::with_capacity(3 + 2 * nn);
            y0.extend_from_slice(xi0.coeffs());
            y0.extend(x0.as_matrix().unwrap().iter());
            y0.extend(p0.as_matrix().unwrap().iter());
            let run = integrate(
                |_, y| {
                    let (xi, x, p) = unpack(y);
                    let dxi = euler_poincare_rhs(j, &xi)?;
                    let v = b.apply(&xi).matrix();
                    let mut out = Vec::with_capacity(y.len());
                    out.extend_from_slice(dxi.coeffs());
                    out.extend((&x * &v).iter());
                    out.extend((&p * &v).iter());
                    Ok(DVector::from_vec(out))
                },
                DVector::from_vec(y0),
                cfg,
            )?;
            let samples = run
                .states
                .iter()
                .map(|y| {
                    let (xi, x, p) = unpack(y);
                    Sample {
                        xi: Some(xi),
                        x: Some(Value::Matrix(x)),
                        p: Some(Value::Matrix(p)),
                        g: None,
                    }
                })
                .collect();
            finish(space, cfg, samples, run.escape_time)
        }
        _ => Err(Error::Unsupported(format!(
            "control {control:?} is not available on {space:?}"
        ))),
    }
}

fn finish(
    space: StateSpace,
    cfg: &IntegratorConfig,
    samples: Vec<Sample>,
    escape_time: Option<f64>,
) -> Result<Trajectory> {
    let times = cfg.times()[..samples.len()].to_vec();
    let traj = Trajectory::new(space.group(), Some(space), times, samples)?;
    match escape_time {
        Some(t) => Err(divergence(traj, t)),
        None => Ok(traj),
    }
}

/// Integrates `ẋ = a(t)x² + b(t)x + c(t)` from `x0`; samples carry `x` only.
pub fn integrate_riccati(
    group: GroupId,
    coeffs: impl Fn(f64) -> RiccatiCoefficients,
    x0: C64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let space = StateSpace::moebius(group)?;
    let run = integrate(
        |t, y| Ok(DVector::from_element(1, coeffs(t).eval(y[0]))),
        DVector::from_element(1, x0),
        cfg,
    )?;
    let samples = run
        .states
        .iter()
        .map(|y| Sample {
            x: Some(Value::Scalar(y[0])),
            ..Sample::default()
        })
        .collect();
    finish(space, cfg, samples, run.escape_time)
}

/// Closed-loop extremal from `(x0, p0)` together with further solutions of
/// the same time-dependent Riccati equation it drives, started at `starts`.
///
/// Everything is advanced as one coupled system so that every solution sees
/// the control at the exact RK4 stage times.
#[allow(clippy::too_many_arguments)]
pub fn integrate_riccati_family(
    group: GroupId,
    b: &ConnectionCoefficients,
    j: &InertiaOperator,
    x0: C64,
    p0: C64,
    starts: &[C64],
    cfg: &IntegratorConfig,
) -> Result<(Trajectory, Vec<Vec<C64>>)> {
    let space = StateSpace::moebius(group)?;
    let mut y0 = vec![x0, p0];
    y0.extend_from_slice(starts);
    let run = integrate(
        |_, y| {
            let xi = feedback_solve(group, b, j, y[0], y[1])?;
            let r = riccati_coefficients(group, &xi, b)?;
            let mut out = Vec::with_capacity(y.len());
            out.push(r.eval(y[0]));
            out.push(-r.derivative(y[0]) * y[1]);
            out.extend(y.iter().skip(2).map(|&z| r.eval(z)));
            Ok(DVector::from_vec(out))
        },
        DVector::from_vec(y0),
        cfg,
    )?;
    let mut family = vec![Vec::with_capacity(run.states.len()); starts.len()];
    let mut samples = Vec::with_capacity(run.states.len());
    for y in &run.states {
        samples.push(Sample {
            xi: Some(feedback_solve(group, b, j, y[0], y[1])?),
            x: Some(Value::Scalar(y[0])),
            p: Some(Value::Scalar(y[1])),
            g: None,
        });
        for (f, z) in family.iter_mut().zip(y.iter().skip(2)) {
            f.push(*z);
        }
    }
    let traj = finish(space, cfg, samples, run.escape_time)?;
    Ok((traj, family))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{pontryagin_hamiltonian, CostConvention};
    use crate::lie::{exp_map, GroupElement};

    const MC: ConnectionCoefficients = ConnectionCoefficients([1.0; 3]);

    fn unit(g: GroupId) -> InertiaOperator {
        InertiaOperator::diagonal(g, [1.0; 3]).unwrap()
    }

    fn close(a: C64, b: f64) -> bool {
        (a - C64::from(b)).norm() < 1e-14
    }

    #[test]
    fn feedback_examples() {
        let g = GroupId::Sl2r;
        let xi = feedback_solve(g, &MC, &unit(g), 0.3.into(), 0.0.into()).unwrap();
        assert_eq!(xi, AlgebraElement::zero(g));
        let xi = feedback_solve(g, &MC, &unit(g), 1.0.into(), 1.0.into()).unwrap();
        assert_eq!(xi, AlgebraElement::real(g, [1.0, -1.0, 2.0]));
        let xi = feedback_solve(g, &MC, &unit(g), 2.0.into(), 1.0.into()).unwrap();
        assert_eq!(xi, AlgebraElement::real(g, [1.0, -4.0, 4.0]));
    }

    #[test]
    fn feedback_is_stationary_for_the_hamiltonian() {
        // central finite differences of H in each ξ direction
        let b = ConnectionCoefficients([0.8, 1.3, -0.6]);
        for g in [GroupId::Sl2r, GroupId::Su2, GroupId::So21] {
            let j = InertiaOperator::diagonal(g, [1.2, 0.7, 2.5]).unwrap();
            let space = StateSpace::moebius(g).unwrap();
            let (x, p) = if g.is_complex() {
                (C64::new(0.4, -0.3), C64::new(1.1, 0.2))
            } else {
                (C64::from(0.4), C64::from(1.1))
            };
            let xi = feedback_solve(g, &b, &j, x, p).unwrap();
            let h = |xi: &AlgebraElement| {
                pontryagin_hamiltonian(space, &b, &j, &Value::Scalar(x), &Value::Scalar(p), xi, CostConvention::Coordinate).unwrap()
            };
            let eps = 1e-5;
            for a in 0..3 {
                let d = AlgebraElement::basis(g, a) * eps;
                let grad = (h(&(xi + d)) - h(&(xi - d))) / (2.0 * eps);
                assert!(grad.norm() < 1e-8, "{g} a={a}: {grad}");
            }
        }
    }

    #[test]
    fn closed_loop_examples() {
        let g = GroupId::Sl2r;
        let (dx, dp) = closed_loop_rhs(g, &MC, &unit(g), 0.5.into(), 0.0.into()).unwrap();
        assert!(close(dx, 0.0) && close(dp, 0.0));
        let (dx, dp) = closed_loop_rhs(g, &MC, &unit(g), 0.0.into(), 1.0.into()).unwrap();
        assert!(close(dx, 1.0) && close(dp, 0.0));
        let (dx, dp) = closed_loop_rhs(g, &MC, &unit(g), 1.0.into(), 1.0.into()).unwrap();
        assert!(close(dx, 6.0) && close(dp, -6.0));
    }

    #[test]
    fn zero_costate_leaves_line_state_fixed() {
        let g = GroupId::Su2;
        let cfg = IntegratorConfig::rk4(0.01, 1.0).unwrap();
        let x0 = Value::Scalar(C64::new(0.3, 0.2));
        let traj = integrate_extremal(
            StateSpace::moebius(g).unwrap(), &MC, &unit(g), &x0, &Value::Scalar(0.0.into()), &Control::Feedback, &cfg,
        )
        .unwrap();
        assert!(traj.x_series().unwrap().iter().all(|x| *x == x0));
        assert!(traj.p_series().unwrap().iter().all(|p| p.norm() == 0.0));
    }

    #[test]
    fn zero_velocity_lifted_extremal_is_constant() {
        let g = GroupId::So3;
        let cfg = IntegratorConfig::rk4(0.01, 1.0).unwrap();
        let x0 = Value::Matrix(exp_map(&AlgebraElement::real(g, [0.1, 0.2, 0.3])).into_matrix());
        let p0 = Value::Matrix(AlgebraElement::real(g, [1.0, 0.0, -1.0]).matrix());
        let j = InertiaOperator::diagonal(g, [1.0, 2.0, 3.0]).unwrap();
        let traj = integrate_extremal(
            StateSpace::GroupManifold(g), &MC, &j, &x0, &p0,
            &Control::EulerPoincare(AlgebraElement::zero(g)), &cfg,
        )
        .unwrap();
        assert!(traj.x_series().unwrap().iter().all(|x| *x == x0));
        assert!(traj.p_series().unwrap().iter().all(|p| *p == p0));
    }

    #[test]
    fn control_must_match_space() {
        let g = GroupId::Sl2r;
        let cfg = IntegratorConfig::rk4(0.1, 1.0).unwrap();
        let x = Value::Matrix(GroupElement::identity(g).into_matrix());
        let res = integrate_extremal(StateSpace::GroupManifold(g), &MC, &unit(g), &x, &x, &Control::Feedback, &cfg);
        assert!(matches!(res, Err(Error::Unsupported(_))));
    }

    #[test]
    fn closed_loop_blow_up_is_reported() {
        let g = GroupId::Sl2r;
        let j = InertiaOperator::diagonal(g, [1.0, 1.0, 2.0]).unwrap();
        let cfg = IntegratorConfig::rk4(1e-3, 2.0).unwrap();
        let res = integrate_extremal(
            StateSpace::moebius(g).unwrap(), &MC, &j, &Value::real(0.5), &Value::real(1.0), &Control::Feedback, &cfg,
        );
        match res {
            Err(Error::Divergence { escape_time, last_time, partial }) => {
                // H = ½p²(x⁴ + 2x² + 1) is conserved, so ẋ = 1.25(x² + 1)
                let exact = (std::f64::consts::FRAC_PI_2 - 0.5f64.atan()) / 1.25;
                assert!((escape_time - exact).abs() < 2e-3, "{escape_time} vs {exact}");
                assert!(last_time <= escape_time);
                assert_eq!(partial.horizon(), last_time);
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn riccati_translation_flow() {
        let cfg = IntegratorConfig::rk4(0.1, 1.0).unwrap();
        let one = RiccatiCoefficients { a: 0.0.into(), b: 0.0.into(), c: 1.0.into() };
        let traj = integrate_riccati(GroupId::Sl2r, |_| one, 2.0.into(), &cfg).unwrap();
        let last = traj.x_series().unwrap().last().unwrap().as_scalar().unwrap();
        assert!((last - C64::from(3.0)).norm() < 1e-14);
    }
}
