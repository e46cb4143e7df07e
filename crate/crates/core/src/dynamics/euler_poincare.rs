use nalgebra::DVector;

use super::integrator::{integrate, IntegratorConfig, State};
use super::trajectory::{Sample, Trajectory};
use crate::error::{Error, Result};
use crate::lie::{exp_map, AlgebraElement, GroupElement, GroupId, InertiaOperator, C64};

/// Reduced Euler–Poincaré vector field `ξ̇ = J⁻¹[Jξ, ξ]`.
///
/// SO(2,1) uses the starred form `ξ̇ = J⁻¹[ξ*, Jξ]`, with `ξ*` the conjugate
/// transpose of the matrix of `ξ`.
pub fn euler_poincare_rhs(j: &InertiaOperator, xi: &AlgebraElement) -> Result<AlgebraElement> {
    let jxi = j.apply(xi)?;
    let torque = match xi.group() {
        GroupId::So21 => xi.star().bracket(&jxi)?,
        _ => jxi.bracket(xi)?,
    };
    j.solve(&torque)
}

fn to_state(xi: &AlgebraElement) -> State {
    DVector::from_column_slice(xi.coeffs())
}

fn from_state(group: GroupId, y: &State) -> AlgebraElement {
    AlgebraElement::new(group, [y[0], y[1], y[2]])
}

fn divergence(last_time: f64, escape_time: f64, partial: Trajectory) -> Error {
    Error::Divergence {
        last_time,
        escape_time,
        partial: Box::new(partial),
    }
}

/// Integrates the Euler–Poincaré equations from `xi0`; samples carry `ξ` only.
pub fn integrate_euler_poincare(
    j: &InertiaOperator,
    xi0: &AlgebraElement,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let group = xi0.group();
    if j.group() != group {
        return Err(Error::GroupMismatch {
            left: j.group(),
            right: group,
        });
    }
    let run = integrate(
        |_, y| euler_poincare_rhs(j, &from_state(group, y)).map(|d| to_state(&d)),
        to_state(xi0),
        cfg,
    )?;
    let samples: Vec<Sample> = run
        .states
        .iter()
        .map(|y| Sample {
            xi: Some(from_state(group, y)),
            ..Sample::default()
        })
        .collect();
    let times = cfg.times()[..samples.len()].to_vec();
    let traj = Trajectory::new(group, None, times, samples)?;
    match run.escape_time {
        Some(t) => Err(divergence(traj.horizon(), t, traj)),
        None => Ok(traj),
    }
}

/// Which side the algebra velocity acts from during reconstruction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Frame {
    /// `ġ = g ξ`
    #[default]
    Body,
    /// `ġ = ξ g`
    Spatial,
}

/// `ξ` at the midpoint of interval `k`, by cubic interpolation inside the
/// grid and quadratic interpolation on the end intervals.
fn midpoint(xi: &[AlgebraElement], k: usize) -> AlgebraElement {
    let n = xi.len();
    match n {
        2 => (xi[0] + xi[1]) * 0.5,
        _ if k == 0 => (xi[0] * 3.0 + xi[1] * 6.0 - xi[2]) * 0.125,
        _ if k + 2 == n => (xi[n - 1] * 3.0 + xi[n - 2] * 6.0 - xi[n - 3]) * 0.125,
        _ => (xi[k] * 9.0 + xi[k + 1] * 9.0 - xi[k - 1] - xi[k + 2]) * (1.0 / 16.0),
    }
}

/// Product-integral reconstruction `g_{k+1} = g_k · exp(h ξ(t_k + h/2))`
/// (or `exp(h ξ) · g_k` in the spatial frame). Returns a copy of `traj`
/// with `g` filled in.
pub fn reconstruct_group(traj: &Trajectory, g0: &GroupElement, frame: Frame) -> Result<Trajectory> {
    let xi = traj.xi_series()?;
    if g0.group() != traj.group() {
        return Err(Error::GroupMismatch {
            left: traj.group(),
            right: g0.group(),
        });
    }
    let h = traj.step();
    let mut out = traj.clone();
    let mut g = g0.clone();
    let samples = out.samples_mut();
    samples[0].g = Some(g.clone());
    for k in 0..xi.len().saturating_sub(1) {
        let step = exp_map(&(midpoint(&xi, k) * h));
        g = match frame {
            Frame::Body => g.compose(&step)?,
            Frame::Spatial => step.compose(&g)?,
        };
        if g.matrix().iter().any(|z| !z.is_finite()) {
            let t = traj.times()[k];
            return Err(divergence(t, t, traj.truncated(t)));
        }
        samples[k + 1].g = Some(g.clone());
    }
    Ok(out)
}

/// SL(2,ℝ) Euler–Poincaré equations written out by components for diagonal
/// inertia `(I₊, I₋, I₀)`.
pub fn sl2r_component_rhs(inertia: [f64; 3], xi: [C64; 3]) -> [C64; 3] {
    let [ip, im, i0] = inertia;
    let [xp, xm, x0] = xi;
    [
        xp * x0 * (2.0 * (i0 - ip) / ip),
        -xm * x0 * (2.0 * (i0 - im) / im),
        xp * xm * ((ip - im) / i0),
    ]
}
