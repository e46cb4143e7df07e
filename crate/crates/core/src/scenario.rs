//! Scenario files: schema, overrides, validation and the runs they drive.

use serde::Deserialize;
use serde_json::Value as Json;
use sha2::{Digest, Sha256};

use crate::actions::{ConnectionCoefficients, CostConvention, StateSpace, Value};
use crate::dynamics::{
    closed_form_symmetric, feedback_solve, integrate_euler_poincare, integrate_extremal,
    integrate_riccati_family, reconstruct_group, Control, Frame, IntegratorConfig, Method,
    Sample, SymmetricSolutionParams, Trajectory,
};
use crate::error::{Error, Result};
use crate::lie::{AlgebraElement, CMatrix, GroupElement, GroupId, InertiaOperator, C64};
use crate::verify::{
    audit_closed_loop, check_action_equality, check_closed_form, check_conservation,
    check_cross_ratio, check_equivalence_rigid, check_lie_closure, check_rk4_order, AuditPoint,
    CheckEntry, VerificationReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    RigidBody,
    Riccati,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InertiaSpec {
    Diag([f64; 3]),
    Anticommutator(Vec<f64>),
}

/// A real number or a `[re, im]` pair.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ScalarSpec {
    Real(f64),
    Complex([f64; 2]),
}

impl ScalarSpec {
    pub fn value(self) -> C64 {
        match self {
            ScalarSpec::Real(x) => x.into(),
            ScalarSpec::Complex([re, im]) => C64::new(re, im),
        }
    }
}

/// A scalar, or a matrix given as rows of scalars.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Scalar(ScalarSpec),
    Matrix(Vec<Vec<ScalarSpec>>),
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub xi0: Option<[ScalarSpec; 3]>,
    pub g0: Option<Vec<Vec<ScalarSpec>>>,
    pub x0: Option<PointSpec>,
    pub p0: Option<PointSpec>,
    /// Starting points of the four passenger solutions used by the
    /// cross-ratio check; defaults to `x0 + {0, 0.1, 0.2, 0.4}`.
    pub cross_ratio_starts: Option<Vec<ScalarSpec>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Equivalence,
    Conservation,
    Rk4Order,
    LieClosure,
    ActionEquality,
    CrossRatio,
    ClosedForm,
    ClosedLoopAudit,
    XiZeroConservation,
}

impl CheckName {
    fn allowed(self, problem: Problem) -> bool {
        use CheckName::*;
        match self {
            Equivalence | Conservation | Rk4Order => problem == Problem::RigidBody,
            CrossRatio | ClosedForm | ClosedLoopAudit | XiZeroConservation => problem == Problem::Riccati,
            LieClosure | ActionEquality => true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub trajectory_csv: Option<String>,
    pub report_json: Option<String>,
}

fn unit_connection() -> [f64; 3] {
    [1.0; 3]
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct Schema {
    group: GroupId,
    problem: Problem,
    inertia: InertiaSpec,
    #[serde(default = "unit_connection")]
    connection: [f64; 3],
    #[serde(default)]
    initial: InitialSpec,
    horizon: f64,
    step: f64,
    #[serde(default)]
    integrator: Method,
    #[serde(default)]
    cost: CostConvention,
    #[serde(default)]
    checks: Vec<CheckName>,
    #[serde(default)]
    outputs: Outputs,
}

/// Problem-specific initial data after validation.
#[derive(Clone, Debug, PartialEq)]
pub enum Initial {
    RigidBody {
        xi0: AlgebraElement,
        g0: GroupElement,
        x0: GroupElement,
        p0: Option<CMatrix>,
    },
    Riccati {
        x0: C64,
        p0: C64,
        cross_ratio_starts: [C64; 4],
    },
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub group: GroupId,
    pub problem: Problem,
    pub inertia_spec: InertiaSpec,
    pub inertia: InertiaOperator,
    pub connection: ConnectionCoefficients,
    pub initial: Initial,
    pub config: IntegratorConfig,
    pub cost: CostConvention,
    pub checks: Vec<CheckName>,
    pub outputs: Outputs,
    /// SHA-256 of the canonical JSON text after overrides.
    pub digest: String,
}

/// Parses scenario text into a JSON document, before any override.
pub fn parse_document(text: &str) -> Result<Json> {
    serde_json::from_str(text).map_err(|e| Error::config("<document>", e.to_string()))
}

/// Sets the value at a dotted path (`initial.x0`, `checks.0` or `checks[0]`), creating
/// intermediate objects. `raw` is read as JSON, or as a string if it is not
/// valid JSON.
pub fn apply_override(doc: &mut Json, path: &str, raw: &str) -> Result<()> {
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Json::String(raw.to_string()));
    let dotted = path.replace('[', ".").replace(']', "");
    if path.is_empty() || path.split('.').any(str::is_empty) {
        return Err(Error::config(path, "override path must be a dotted key"));
    }
    let mut cur = doc;
    for key in dotted.split('.') {
        cur = match cur {
            Json::Object(map) => map.entry(key.to_string()).or_insert(Json::Null),
            Json::Array(items) => {
                let idx: usize = key
                    .parse()
                    .map_err(|_| Error::config(path, format!("`{key}` is not an array index")))?;
                items
                    .get_mut(idx)
                    .ok_or_else(|| Error::config(path, format!("index {idx} out of range")))?
            }
            other @ Json::Null => {
                *other = Json::Object(Default::default());
                match other {
                    Json::Object(map) => map.entry(key.to_string()).or_insert(Json::Null),
                    _ => unreachable!(),
                }
            }
            _ => return Err(Error::config(path, format!("cannot descend into `{key}`"))),
        };
    }
    *cur = value;
    Ok(())
}

fn scalar_real(z: C64, field: &str) -> Result<f64> {
    if z.im != 0.0 {
        return Err(Error::config(field, "must be real for this group"));
    }
    Ok(z.re)
}

fn matrix(rows: &[Vec<ScalarSpec>], n: usize, field: &str) -> Result<CMatrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::config(field, format!("expected a {n}x{n} matrix")));
    }
    let mut m = CMatrix::zeros(n, n);
    for (i, r) in rows.iter().enumerate() {
        for (j, z) in r.iter().enumerate() {
            m[(i, j)] = z.value();
        }
    }
    Ok(m)
}

fn group_element(group: GroupId, rows: &[Vec<ScalarSpec>], field: &str) -> Result<GroupElement> {
    let m = matrix(rows, group.dim(), field)?;
    GroupElement::new(group, m).map_err(|e| Error::config(field, e.to_string()))
}

fn point_scalar(p: &Option<PointSpec>, group: GroupId, field: &str) -> Result<C64> {
    match p {
        Some(PointSpec::Scalar(s)) => {
            let z = s.value();
            if !group.is_complex() {
                scalar_real(z, field)?;
            }
            Ok(z)
        }
        Some(PointSpec::Matrix(_)) => Err(Error::config(field, "expected a scalar on the Möbius line")),
        None => Err(Error::config(field, "required for riccati problems")),
    }
}

impl Scenario {
    /// Parses, applies `overrides` in order and validates.
    pub fn load(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut doc = parse_document(text)?;
        for (k, v) in overrides {
            apply_override(&mut doc, k, v)?;
        }
        Self::from_document(&doc)
    }

    pub fn from_document(doc: &Json) -> Result<Self> {
        let schema: Schema = serde_path_to_error::deserialize(doc).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { "<document>".to_string() } else { path };
            Error::InvalidConfig {
                field,
                reason: e.into_inner().to_string(),
            }
        })?;
        let digest = {
            let text = serde_json::to_string(doc).expect("JSON values serialize");
            let hash = Sha256::digest(text.as_bytes());
            hash.iter().map(|b| format!("{b:02x}")).collect()
        };
        Self::validate(schema, digest)
    }

    fn validate(s: Schema, digest: String) -> Result<Self> {
        let group = s.group;
        let compatible = match s.problem {
            Problem::RigidBody => matches!(group, GroupId::So3 | GroupId::Su2),
            Problem::Riccati => matches!(group, GroupId::Sl2r | GroupId::Su2 | GroupId::So21),
        };
        if !compatible {
            return Err(Error::config(
                "problem",
                format!("{:?} is not available on {group}", s.problem),
            ));
        }
        let config = IntegratorConfig::new(s.integrator, s.step, s.horizon)?;
        let inertia = match &s.inertia {
            InertiaSpec::Diag(d) => InertiaOperator::diagonal(group, *d)
                .map_err(|e| Error::config("inertia.diag", e.to_string()))?,
            InertiaSpec::Anticommutator(v) => InertiaOperator::anticommutator_diag(group, v)
                .map_err(|e| Error::config("inertia.anticommutator", e.to_string()))?,
        };
        let connection = ConnectionCoefficients::new(s.connection)
            .map_err(|e| Error::config("connection", e.to_string()))?;
        for (i, c) in s.checks.iter().enumerate() {
            if !c.allowed(s.problem) {
                return Err(Error::config(
                    &format!("checks[{i}]"),
                    format!("{c:?} does not apply to {:?}", s.problem),
                ));
            }
        }
        let init = &s.initial;
        let initial = match s.problem {
            Problem::RigidBody => {
                if connection != ConnectionCoefficients::maurer_cartan() {
                    return Err(Error::config("connection", "rigid_body uses the Maurer–Cartan connection [1, 1, 1]"));
                }
                let xi = init
                    .xi0
                    .ok_or_else(|| Error::config("initial.xi0", "required for rigid_body problems"))?;
                let coeffs = xi.map(ScalarSpec::value);
                if coeffs.iter().any(|z| z.im != 0.0) {
                    return Err(Error::config("initial.xi0", "rigid-body velocities are real"));
                }
                let n = group.dim();
                let g0 = match &init.g0 {
                    Some(rows) => group_element(group, rows, "initial.g0")?,
                    None => GroupElement::identity(group),
                };
                let x0 = match &init.x0 {
                    Some(PointSpec::Matrix(rows)) => group_element(group, rows, "initial.x0")?,
                    Some(PointSpec::Scalar(_)) => {
                        return Err(Error::config("initial.x0", "expected a group element"))
                    }
                    None => GroupElement::identity(group),
                };
                let p0 = match &init.p0 {
                    Some(PointSpec::Matrix(rows)) => Some(matrix(rows, n, "initial.p0")?),
                    Some(PointSpec::Scalar(_)) => {
                        return Err(Error::config("initial.p0", "expected a matrix"))
                    }
                    None => None,
                };
                Initial::RigidBody {
                    xi0: AlgebraElement::new(group, coeffs),
                    g0,
                    x0,
                    p0,
                }
            }
            Problem::Riccati => {
                let x0 = point_scalar(&init.x0, group, "initial.x0")?;
                let p0 = point_scalar(&init.p0, group, "initial.p0")?;
                let starts = match &init.cross_ratio_starts {
                    None => [0.0, 0.1, 0.2, 0.4].map(|d| x0 + d),
                    Some(v) => {
                        let v: Vec<C64> = v.iter().map(|z| z.value()).collect();
                        if !group.is_complex() && v.iter().any(|z| z.im != 0.0) {
                            return Err(Error::config("initial.cross_ratio_starts", "must be real for this group"));
                        }
                        v.try_into().map_err(|_| {
                            Error::config("initial.cross_ratio_starts", "expected exactly 4 starts")
                        })?
                    }
                };
                Initial::Riccati {
                    x0,
                    p0,
                    cross_ratio_starts: starts,
                }
            }
        };
        Ok(Self {
            group,
            problem: s.problem,
            inertia_spec: s.inertia,
            inertia,
            connection,
            initial,
            config,
            cost: s.cost,
            checks: s.checks,
            outputs: s.outputs,
            digest,
        })
    }

    pub fn space(&self) -> StateSpace {
        match self.problem {
            Problem::RigidBody => StateSpace::GroupManifold(self.group),
            Problem::Riccati => StateSpace::MoebiusLine(self.group),
        }
    }

    /// Runs the scenario's flow. Divergence errors carry the partial
    /// trajectory.
    pub fn simulate(&self) -> Result<Trajectory> {
        let j = &self.inertia;
        match &self.initial {
            Initial::RigidBody { xi0, g0, x0, p0 } => {
                let ep = integrate_euler_poincare(j, xi0, &self.config)?;
                let rec = reconstruct_group(&ep, g0, Frame::Body)?;
                match p0 {
                    None => crate::verify::rigid_lift(j, &rec, x0),
                    Some(p0) => {
                        let x_start = Value::Matrix(x0.matrix() * g0.matrix());
                        let ext = integrate_extremal(
                            self.space(),
                            &self.connection,
                            j,
                            &x_start,
                            &Value::Matrix(p0.clone()),
                            &Control::EulerPoincare(*xi0),
                            &self.config,
                        )?;
                        let samples: Vec<Sample> = ext
                            .samples()
                            .iter()
                            .zip(rec.samples())
                            .map(|(e, r)| Sample { g: r.g.clone(), ..e.clone() })
                            .collect();
                        Trajectory::new(self.group, Some(self.space()), ext.times().to_vec(), samples)
                    }
                }
            }
            Initial::Riccati { x0, p0, .. } => integrate_extremal(
                self.space(),
                &self.connection,
                j,
                &Value::Scalar(*x0),
                &Value::Scalar(*p0),
                &Control::Feedback,
                &self.config,
            ),
        }
    }

    fn symmetric_params(&self) -> Result<SymmetricSolutionParams> {
        let (x0, p0) = match self.initial {
            Initial::Riccati { x0, p0, .. } => (x0, p0),
            _ => return Err(Error::config("problem", "closed forms exist for riccati problems only")),
        };
        let d = match self.inertia.as_diagonal() {
            Some(d) if d[0] == d[1] => d,
            _ => {
                return Err(Error::config(
                    "inertia",
                    "closed forms need diagonal inertia with I₊ = I₋",
                ))
            }
        };
        SymmetricSolutionParams::from_costate(self.group, d[0], d[2], self.connection.0, x0, p0)
    }

    /// Runs the simulation and every requested check. A divergence of the
    /// scenario's own flow is returned as an error.
    pub fn verify(&self) -> Result<VerificationReport> {
        self.verify_trajectory(&self.simulate()?)
    }

    /// Runs the requested checks against an already simulated trajectory.
    pub fn verify_trajectory(&self, traj: &Trajectory) -> Result<VerificationReport> {
        let mut report = VerificationReport::new();
        report.scenario_digest = Some(self.digest.clone());
        for check in &self.checks {
            self.run_check(*check, traj, &mut report)?;
        }
        Ok(report)
    }

    fn run_check(&self, check: CheckName, traj: &Trajectory, report: &mut VerificationReport) -> Result<()> {
        let j = &self.inertia;
        let b = &self.connection;
        match (check, &self.initial) {
            (CheckName::Equivalence, Initial::RigidBody { x0, .. }) => {
                report.extend(check_equivalence_rigid(j, traj, x0)?);
            }
            (CheckName::Conservation, Initial::RigidBody { xi0, .. }) => {
                report.extend(check_conservation(j, xi0, &self.config, 1e-6)?);
            }
            (CheckName::Rk4Order, Initial::RigidBody { xi0, .. }) => {
                report.push(check_rk4_order(j, xi0, self.config.step(), self.config.horizon())?);
            }
            (CheckName::LieClosure, _) => {
                report.push(check_lie_closure(self.space(), b, &closure_points(self.space()))?);
            }
            (CheckName::ActionEquality, _) => {
                report.push(check_action_equality(j, b, traj, self.cost)?);
            }
            (CheckName::CrossRatio, Initial::Riccati { x0, p0, cross_ratio_starts }) => {
                let entry = match integrate_riccati_family(self.group, b, j, *x0, *p0, cross_ratio_starts, &self.config) {
                    Ok((_, family)) => check_cross_ratio(&family)?,
                    Err(Error::Divergence { escape_time, .. }) => CheckEntry::new(
                        "riccati.cross_ratio",
                        f64::INFINITY,
                        1e-8,
                        format!("a passenger solution escaped at t ≈ {escape_time:.6}"),
                    ),
                    Err(e) => return Err(e),
                };
                report.push(entry);
            }
            (CheckName::ClosedForm, _) => {
                let params = self.symmetric_params()?;
                match check_closed_form(self.group, &params, &self.config) {
                    Ok(entries) => report.extend(entries),
                    Err(Error::Pole { time }) => report.push(CheckEntry::new(
                        format!("closed_form.{}", self.group.name()),
                        f64::INFINITY,
                        1e-7,
                        format!("closed form has a pole at t = {time}"),
                    )),
                    Err(e) => return Err(e),
                }
            }
            (CheckName::ClosedLoopAudit, _) => {
                if self.group != GroupId::Sl2r {
                    return Err(Error::config("checks", "closed_loop_audit applies to sl2r only"));
                }
                let d = self
                    .inertia
                    .as_diagonal()
                    .ok_or_else(|| Error::config("inertia", "closed_loop_audit needs diagonal inertia"))?;
                let (checks, findings) = audit_closed_loop(b, d, &audit_points())?;
                report.extend(checks);
                report.findings.extend(findings);
            }
            (CheckName::XiZeroConservation, Initial::Riccati { x0, p0, .. }) => {
                self.symmetric_params()?;
                let xi0 = feedback_solve(self.group, b, j, *x0, *p0)?;
                let ep = integrate_euler_poincare(j, &xi0, &self.config)?;
                let start = xi0.coeffs()[2];
                let drift = ep
                    .xi_series()?
                    .iter()
                    .map(|xi| (xi.coeffs()[2] - start).norm())
                    .fold(0.0, f64::max);
                report.push(CheckEntry::new(
                    "euler_poincare.xi_zero",
                    drift,
                    1e-10,
                    format!("max |ξ₀(t) − ξ₀(0)| along the Euler–Poincaré flow from the feedback at t = 0, ξ₀(0) = {start}"),
                ));
            }
            _ => unreachable!("checks are validated against the problem"),
        }
        Ok(())
    }

    /// Closed-form versus numeric closed loop on the scenario grid. The
    /// second value is the escape time when the numeric run diverged.
    pub fn compare(&self) -> Result<(Vec<CompareRow>, Option<f64>)> {
        let params = self.symmetric_params()?;
        let (traj, escape) = match self.simulate() {
            Ok(t) => (t, None),
            Err(Error::Divergence { escape_time, partial, .. }) => (*partial, Some(escape_time)),
            Err(e) => return Err(e),
        };
        let xs = traj.x_series()?;
        let ps = traj.p_series()?;
        let mut rows = Vec::with_capacity(traj.len());
        for (k, &t) in traj.times().iter().enumerate() {
            let (xe, pe) = closed_form_symmetric(self.group, &params, t)?;
            rows.push(CompareRow {
                t,
                x_numeric: xs[k].as_scalar().expect("line state"),
                x_closed: xe,
                p_numeric: ps[k].as_scalar().expect("line costate"),
                p_closed: pe,
            });
        }
        Ok((rows, escape))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompareRow {
    pub t: f64,
    pub x_numeric: C64,
    pub x_closed: C64,
    pub p_numeric: C64,
    pub p_closed: C64,
}

impl CompareRow {
    pub fn gap(&self) -> f64 {
        (self.x_numeric - self.x_closed)
            .norm()
            .max((self.p_numeric - self.p_closed).norm())
    }
}

/// Fixed evaluation points for the closure check.
fn closure_points(space: StateSpace) -> Vec<Value> {
    let g = space.group();
    match space {
        StateSpace::MoebiusLine(_) => (0..100)
            .map(|k| {
                let x = -2.0 + 4.0 * k as f64 / 99.0;
                let z = if g.is_complex() { C64::new(x, 0.5 - k as f64 / 99.0) } else { x.into() };
                Value::Scalar(z)
            })
            .collect(),
        StateSpace::GroupManifold(_) => (0..10)
            .map(|k| {
                let s = k as f64;
                let xi = AlgebraElement::real(g, [0.1 * s, -0.05 * s, 0.07 * s]);
                Value::Matrix(crate::lie::exp_map(&xi).into_matrix())
            })
            .collect(),
    }
}

/// A 10 × 10 grid of `(x, p)` in `[−1, 1] × [0.5, 1.5]`.
fn audit_points() -> Vec<AuditPoint> {
    let mut pts = Vec::with_capacity(100);
    for i in 0..10 {
        for k in 0..10 {
            pts.push((-1.0 + 2.0 * i as f64 / 9.0, 0.5 + k as f64 / 9.0));
        }
    }
    pts
}
