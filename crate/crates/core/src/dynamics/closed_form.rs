//! Closed-form symmetric solutions (`I₊ = I₋`) on the Möbius line, and the
//! objective functional.

use super::extremal::feedback_solve;
use super::quadrature::simpson;
use super::trajectory::Trajectory;
use crate::actions::{lagrangian, ConnectionCoefficients, CostConvention};
use crate::error::{Error, Result};
use crate::lie::{GroupId, InertiaOperator, C64};

/// Data of the symmetric case: common inertia `I = I₊ = I₋`, `I₀`, the
/// connection `B = (B₊, B₋, B₀)` and the initial controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetricSolutionParams {
    pub inertia: f64,
    pub inertia_zero: f64,
    pub connection: [f64; 3],
    pub xi_zero: C64,
    pub xi_plus0: C64,
    pub xi_minus0: C64,
}

impl SymmetricSolutionParams {
    pub fn validate(&self) -> Result<()> {
        if self.inertia == 0.0 || self.inertia_zero == 0.0 {
            return Err(Error::Domain("inertia coefficients must be nonzero".into()));
        }
        if self.connection.contains(&0.0) {
            return Err(Error::Domain("connection coefficients must be nonzero".into()));
        }
        Ok(())
    }

    /// `α = 2ξ₀(I₀ − I)/I`
    pub fn alpha(&self) -> C64 {
        self.xi_zero * (2.0 * (self.inertia_zero - self.inertia) / self.inertia)
    }

    pub fn c_zero(&self) -> C64 {
        self.xi_zero * (self.inertia_zero / (2.0 * self.connection[2]))
    }

    pub fn c_plus(&self) -> C64 {
        self.xi_plus0 * (self.inertia / (2.0 * self.connection[0]))
    }

    pub fn c_minus(&self) -> C64 {
        self.xi_minus0 * (self.inertia / (2.0 * self.connection[1]))
    }

    /// `diag(I, I, I₀)`
    pub fn inertia_operator(&self, group: GroupId) -> Result<InertiaOperator> {
        InertiaOperator::diagonal(group, [self.inertia, self.inertia, self.inertia_zero])
    }

    pub fn connection(&self) -> Result<ConnectionCoefficients> {
        ConnectionCoefficients::new(self.connection)
    }

    /// Parameters whose initial controls are the optimal feedback at
    /// `(x0, p0)`, so the closed form starts from that point.
    pub fn from_costate(
        group: GroupId,
        inertia: f64,
        inertia_zero: f64,
        connection: [f64; 3],
        x0: C64,
        p0: C64,
    ) -> Result<Self> {
        let j = InertiaOperator::diagonal(group, [inertia, inertia, inertia_zero])?;
        let b = ConnectionCoefficients::new(connection)?;
        let [xp, xm, x0c] = *feedback_solve(group, &b, &j, x0, p0)?.coeffs();
        let params = Self {
            inertia,
            inertia_zero,
            connection,
            xi_zero: x0c,
            xi_plus0: xp,
            xi_minus0: xm,
        };
        params.validate()?;
        Ok(params)
    }
}

fn ratio(num: C64, den: C64, scale: f64, t: f64) -> Result<C64> {
    if !(den.norm() > 1e-14 * scale) {
        return Err(Error::Pole { time: t });
    }
    Ok(num / den)
}

/// Evaluates the symmetric closed-form extremal `(x(t), p(t))`.
pub fn closed_form_symmetric(group: GroupId, params: &SymmetricSolutionParams, t: f64) -> Result<(C64, C64)> {
    params.validate()?;
    let (c0, cp, cm) = (params.c_zero(), params.c_plus(), params.c_minus());
    let grow = (params.alpha() * t).exp();
    let decay = (-params.alpha() * t).exp();
    let i = C64::i();
    match group {
        GroupId::Sl2r => {
            let x = ratio(c0 * decay, cp * 2.0, cp.norm() * 2.0, t)?;
            Ok((x, cp * grow * 2.0))
        }
        GroupId::Su2 => {
            let (a, b) = (cm * decay, i * cp * grow);
            let x = ratio(c0, a + b, a.norm() + b.norm(), t)?;
            Ok((x, cp * grow - i * cm * decay))
        }
        GroupId::So21 => {
            let (a, b) = (cm * decay, i * c0);
            let x = ratio(cp * grow, a - b, a.norm() + b.norm(), t)?;
            Ok((x, -i * cm * decay - c0))
        }
        GroupId::So3 => Err(Error::Unsupported(
            "so3 has no Möbius-line closed form".into(),
        )),
    }
}

/// `∫₀ᵀ L(ξ) dt` by composite Simpson quadrature on the trajectory grid.
pub fn objective_value(j: &InertiaOperator, traj: &Trajectory, cost: CostConvention) -> Result<C64> {
    let values = traj
        .xi_series()?
        .iter()
        .map(|xi| lagrangian(j, xi, cost))
        .collect::<Result<Vec<_>>>()?;
    simpson(&values, traj.step())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::euler_poincare::integrate_euler_poincare;
    use crate::dynamics::integrator::IntegratorConfig;
    use crate::lie::AlgebraElement;

    fn params() -> SymmetricSolutionParams {
        SymmetricSolutionParams {
            inertia: 1.0,
            inertia_zero: 2.0,
            connection: [1.0, 0.5, 2.0],
            xi_zero: 0.5.into(),
            xi_plus0: 1.0.into(),
            xi_minus0: 0.7.into(),
        }
    }

    #[test]
    fn derived_constants() {
        let p = params();
        assert_eq!(p.alpha(), C64::from(1.0));
        assert_eq!(p.c_zero(), C64::from(0.25));
        assert_eq!(p.c_plus(), C64::from(0.5));
        assert_eq!(p.c_minus(), C64::from(0.7));
        let bad = SymmetricSolutionParams { connection: [1.0, 0.0, 1.0], ..p };
        assert!(closed_form_symmetric(GroupId::Sl2r, &bad, 0.0).is_err());
    }

    #[test]
    fn values_at_zero() {
        let p = params();
        let (x, q) = closed_form_symmetric(GroupId::Sl2r, &p, 0.0).unwrap();
        assert_eq!((x, q), (p.c_zero() / (p.c_plus() * 2.0), p.c_plus() * 2.0));
        let (x, q) = closed_form_symmetric(GroupId::Su2, &p, 0.0).unwrap();
        let i = C64::i();
        assert!((x - p.c_zero() / (p.c_minus() + i * p.c_plus())).norm() < 1e-15);
        assert!((q - (p.c_plus() - i * p.c_minus())).norm() < 1e-15);
    }

    #[test]
    fn sl2r_product_is_constant() {
        let p = params();
        for k in 0..20 {
            let (x, q) = closed_form_symmetric(GroupId::Sl2r, &p, k as f64 * 0.1).unwrap();
            assert!((x * q - p.c_zero()).norm() < 1e-12);
        }
    }

    #[test]
    fn costate_parameters_reproduce_the_start() {
        for g in [GroupId::Sl2r, GroupId::Su2, GroupId::So21] {
            let (x0, p0) = if g.is_complex() {
                (C64::new(0.3, 0.2), C64::new(0.9, -0.4))
            } else {
                (C64::from(0.3), C64::from(0.9))
            };
            let p = SymmetricSolutionParams::from_costate(g, 1.3, 0.6, [0.8, 1.1, 0.7], x0, p0).unwrap();
            let (x, q) = closed_form_symmetric(g, &p, 0.0).unwrap();
            assert!((x - x0).norm() < 1e-14 && (q - p0).norm() < 1e-14, "{g}");
        }
    }

    #[test]
    fn pole_is_reported() {
        // SO(2,1) denominator C₋ − iC₀ vanishes when C₋ = iC₀
        let p = SymmetricSolutionParams {
            xi_zero: 0.0.into(),
            xi_minus0: 0.0.into(),
            ..params()
        };
        assert!(matches!(
            closed_form_symmetric(GroupId::So21, &p, 0.3),
            Err(Error::Pole { .. })
        ));
        assert!(matches!(
            closed_form_symmetric(GroupId::So3, &params(), 0.0),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn objective_examples() {
        let g = GroupId::Sl2r;
        let cfg = IntegratorConfig::rk4(1e-2, 1.0).unwrap();
        let j = InertiaOperator::diagonal(g, [1.0, 1.0, 2.0]).unwrap();
        let zero = integrate_euler_poincare(&j, &AlgebraElement::zero(g), &cfg).unwrap();
        assert_eq!(objective_value(&j, &zero, CostConvention::Coordinate).unwrap(), C64::from(0.0));

        let e0 = AlgebraElement::basis(g, 2);
        let cfg2 = IntegratorConfig::rk4(0.1, 2.0).unwrap();
        let flat = integrate_euler_poincare(&j, &e0, &cfg2).unwrap();
        let s = objective_value(&j, &flat, CostConvention::Coordinate).unwrap();
        assert!((s - C64::from(2.0)).norm() < 1e-14);
    }

    #[test]
    fn symmetric_objective_matches_integral() {
        let g = GroupId::Sl2r;
        let cfg = IntegratorConfig::rk4(1e-3, 1.0).unwrap();
        let p = params();
        let j = p.inertia_operator(g).unwrap();
        let xi0 = AlgebraElement::new(g, [p.xi_plus0, p.xi_minus0, p.xi_zero]);
        let traj = integrate_euler_poincare(&j, &xi0, &cfg).unwrap();
        let s = objective_value(&j, &traj, CostConvention::Coordinate).unwrap();
        let (a, i, i0) = (1.0f64, 1.0, 2.0);
        let exact = 0.5
            * (i * 1.0 * ((2.0 * a).exp() - 1.0) / (2.0 * a)
                + i * 0.49 * (1.0 - (-2.0 * a).exp()) / (2.0 * a)
                + i0 * 0.25);
        assert!((s.re - exact).abs() < 1e-8, "{} vs {exact}", s.re);
    }
}
