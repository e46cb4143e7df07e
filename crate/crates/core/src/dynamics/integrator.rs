use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::C64;

/// States whose norm exceeds this are treated as escaped to infinity.
pub const ESCAPE_NORM: f64 = 1e10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Rk4,
    Euler,
}

/// Fixed-step integration settings on the uniform grid `0, h, …, T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    method: Method,
    horizon: f64,
    steps: usize,
}

impl IntegratorConfig {
    pub fn new(method: Method, step: f64, horizon: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::config("step", format!("must be positive, got {step}")));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::config("horizon", format!("must be positive, got {horizon}")));
        }
        if step > horizon {
            return Err(Error::config(
                "step",
                format!("step {step} exceeds horizon {horizon}"),
            ));
        }
        let ratio = horizon / step;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-9 {
            return Err(Error::config(
                "step",
                format!("horizon/step = {ratio} is not an integer sample count"),
            ));
        }
        Ok(Self {
            method,
            horizon,
            steps: steps as usize,
        })
    }

    pub fn rk4(step: f64, horizon: f64) -> Result<Self> {
        Self::new(Method::Rk4, step, horizon)
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Grid spacing `T / N` (equal to the requested step up to rounding).
    pub fn step(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps {
            self.horizon
        } else {
            k as f64 * self.step()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.time(k)).collect()
    }
}

pub(crate) type State = DVector<C64>;

/// Result of a fixed-step run: all finite states, plus the estimated escape
/// time when the run stopped early.
pub(crate) struct Integration {
    pub states: Vec<State>,
    pub escape_time: Option<f64>,
}

fn escaped(y: &State) -> bool {
    y.iter().any(|z| !z.is_finite()) || y.norm() > ESCAPE_NORM
}

pub(crate) fn integrate<F>(mut rhs: F, y0: State, cfg: &IntegratorConfig) -> Result<Integration>
where
    F: FnMut(f64, &State) -> Result<State>,
{
    let h = cfg.step();
    let mut states = Vec::with_capacity(cfg.steps() + 1);
    states.push(y0);
    for k in 0..cfg.steps() {
        let t = cfg.time(k);
        let y = &states[k];
        // a stage increment larger than the state itself means the step
        // cannot resolve the flow, which near a pole means it jumped across it
        let scale = 1.0 + y.norm();
        let mut unresolved = false;
        let mut stage = |t: f64, z: &State| -> Result<State> {
            let f = rhs(t, z)?;
            unresolved |= !(h * f.norm() <= scale);
            Ok(f)
        };
        let next = match cfg.method() {
            Method::Euler => y + stage(t, y)? * C64::from(h),
            Method::Rk4 => {
                let hc = C64::from(h);
                let half = C64::from(0.5 * h);
                let k1 = stage(t, y)?;
                let k2 = stage(t + 0.5 * h, &(y + &k1 * half))?;
                let k3 = stage(t + 0.5 * h, &(y + &k2 * half))?;
                let k4 = stage(t + h, &(y + &k3 * hc))?;
                y + (k1 + (k2 + k3) * C64::from(2.0) + k4) * C64::from(h / 6.0)
            }
        };
        if unresolved || escaped(&next) {
            let speed = rhs(t, y).map(|f| f.norm()).unwrap_or(f64::INFINITY);
            let remaining = if speed > 0.0 { y.norm() / speed } else { h };
            return Ok(Integration {
                states,
                escape_time: Some(t + remaining.min(h)),
            });
        }
        states.push(next);
    }
    Ok(Integration {
        states,
        escape_time: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::rk4(0.1, 1.0).is_ok());
        let err = IntegratorConfig::rk4(2.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig { ref field, .. } if field == "step"));
        assert!(IntegratorConfig::rk4(0.3, 1.0).is_err());
        assert!(IntegratorConfig::rk4(-0.1, 1.0).is_err());
        assert!(matches!(
            IntegratorConfig::rk4(0.1, 0.0),
            Err(Error::InvalidConfig { ref field, .. }) if field == "horizon"
        ));
        let cfg = IntegratorConfig::rk4(1e-4, 1.0).unwrap();
        assert_eq!(cfg.steps(), 10_000);
        assert_eq!(*cfg.times().last().unwrap(), 1.0);
    }

    #[test]
    fn rk4_is_exact_on_cubic_polynomials() {
        // y' = 3t², y(0) = 0
        let cfg = IntegratorConfig::rk4(0.25, 1.0).unwrap();
        let run = integrate(
            |t, _| Ok(State::from_element(1, C64::from(3.0 * t * t))),
            State::zeros(1),
            &cfg,
        )
        .unwrap();
        assert!((run.states.last().unwrap()[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn blow_up_reports_escape_time() {
        // y' = y², y(0) = 1 escapes at t = 1
        let cfg = IntegratorConfig::rk4(1e-4, 2.0).unwrap();
        let run = integrate(|_, y| Ok(y.map(|z| z * z)), State::from_element(1, C64::from(1.0)), &cfg)
            .unwrap();
        let t = run.escape_time.unwrap();
        assert!((t - 1.0).abs() < 1e-3, "{t}");
        assert!(run.states.iter().all(|y| y.norm() <= ESCAPE_NORM));
    }
}
