use crate::actions::{StateSpace, Value};
use crate::error::{Error, Result};
use crate::lie::{AlgebraElement, GroupElement, GroupId};

/// One time sample; fields are present according to what produced it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Sample {
    pub xi: Option<AlgebraElement>,
    pub g: Option<GroupElement>,
    pub x: Option<Value>,
    pub p: Option<Value>,
}

/// Samples on a uniform, strictly increasing time grid starting at 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    group: GroupId,
    space: Option<StateSpace>,
    times: Vec<f64>,
    samples: Vec<Sample>,
}

impl Trajectory {
    pub fn new(
        group: GroupId,
        space: Option<StateSpace>,
        times: Vec<f64>,
        samples: Vec<Sample>,
    ) -> Result<Self> {
        if times.len() != samples.len() {
            return Err(Error::Domain("times and samples differ in length".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("time grid must be strictly increasing".into()));
        }
        Ok(Self {
            group,
            space,
            times,
            samples,
        })
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn space(&self) -> Option<StateSpace> {
        self.space
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub(crate) fn samples_mut(&mut self) -> &mut [Sample] {
        &mut self.samples
    }

    /// Grid spacing; zero for a single-sample trajectory.
    pub fn step(&self) -> f64 {
        match self.times.len() {
            0 | 1 => 0.0,
            n => (self.times[n - 1] - self.times[0]) / (n - 1) as f64,
        }
    }

    pub fn horizon(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    fn collect<T: Clone>(&self, what: &str, f: impl Fn(&Sample) -> Option<&T>) -> Result<Vec<T>> {
        self.samples
            .iter()
            .map(|s| f(s).cloned())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Domain(format!("trajectory has no `{what}` samples")))
    }

    pub fn xi_series(&self) -> Result<Vec<AlgebraElement>> {
        self.collect("xi", |s| s.xi.as_ref())
    }

    pub fn g_series(&self) -> Result<Vec<GroupElement>> {
        self.collect("g", |s| s.g.as_ref())
    }

    pub fn x_series(&self) -> Result<Vec<Value>> {
        self.collect("x", |s| s.x.as_ref())
    }

    pub fn p_series(&self) -> Result<Vec<Value>> {
        self.collect("p", |s| s.p.as_ref())
    }

    /// Keeps the samples with `t ≤ until`.
    pub fn truncated(&self, until: f64) -> Self {
        let n = self.times.iter().take_while(|&&t| t <= until).count();
        Self {
            group: self.group,
            space: self.space,
            times: self.times[..n].to_vec(),
            samples: self.samples[..n].to_vec(),
        }
    }
}
