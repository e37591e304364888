//! Fixed-step RK4 integration of `q̈ = Λ(t, q, q̇)` and first-integral drift.

use std::collections::BTreeMap;
use std::io;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::identity::{scaled_residual, SamplingError};
use crate::expr::{diff, eval, EvalError, Expr, SamplePoint, Var};
use crate::mechanics::LagrangianSystem;

pub const DEFAULT_DT: f64 = 1e-3;
/// Integration stops once a singular-set expression drops below this.
pub const TRAJECTORY_EXCLUSION: f64 = 1e-3;
/// Relative singular-value cutoff for the numeric rank.
pub const RANK_THRESHOLD: f64 = 1e-8;
pub const RANK_SAMPLES: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("step size must be positive, got {0}")]
    InvalidStep(f64),
    #[error("final time {t1} precedes initial time {t0}")]
    InvalidHorizon { t0: f64, t1: f64 },
    #[error("initial state has {got} components, system dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("initial state lies in the exclusion zone of `{0}`")]
    SingularStart(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rk4,
}

#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub t: f64,
    pub q: Vec<f64>,
    pub qdot: Vec<f64>,
}

/// Why a trajectory ended before its horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub t: f64,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub system: String,
    pub method: Method,
    pub dt: f64,
    pub t0: f64,
    pub t1: f64,
    pub states: Vec<State>,
    pub truncated: Option<Truncation>,
    /// Scaled difference between symbolic and numeric `Λ` at the start;
    /// `None` if the symbolic form could not be evaluated.
    pub lambda_crosscheck: Option<f64>,
}

impl Trajectory {
    pub fn is_truncated(&self) -> bool {
        self.truncated.is_some()
    }

    pub fn last(&self) -> &State {
        self.states.last().expect("a trajectory holds at least its initial state")
    }

    /// CSV with header `t,q1..qn,qdot1..qdotn`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let n = self.states[0].q.len();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("q{i}")));
        header.extend((1..=n).map(|i| format!("qdot{i}")));
        w.write_record(&header)?;
        for s in &self.states {
            let row = std::iter::once(s.t).chain(s.q.iter().copied()).chain(s.qdot.iter().copied());
            w.write_record(row.map(|v| format!("{v:.17e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn singular_hit(sys: &LagrangianSystem, p: &SamplePoint) -> Option<String> {
    for e in sys.singular_sets() {
        match eval(e, p) {
            Ok(v) if v.abs() >= TRAJECTORY_EXCLUSION => {}
            _ => return Some(e.print(sys.alphabet())),
        }
    }
    None
}

/// Signs of the factors of every singular set. Even powers never change sign,
/// so a crossing is detected on their bases.
fn factor_signs(factors: &[Expr], p: &SamplePoint) -> Vec<f64> {
    factors.iter().map(|e| eval(e, p).map_or(f64::NAN, f64::signum)).collect()
}

fn accel(sys: &LagrangianSystem, t: f64, q: &[f64], qdot: &[f64]) -> Result<Vec<f64>, EvalError> {
    sys.accel_numeric(&sys.point(t, q, qdot, &vec![0.0; q.len()]))
}

fn axpy(x: &[f64], h: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + h * b).collect()
}

fn rk4_step(sys: &LagrangianSystem, s: &State, h: f64) -> Result<State, EvalError> {
    let (t, q, v) = (s.t, &s.q, &s.qdot);
    let a1 = accel(sys, t, q, v)?;
    let (q2, v2) = (axpy(q, h / 2.0, v), axpy(v, h / 2.0, &a1));
    let a2 = accel(sys, t + h / 2.0, &q2, &v2)?;
    let (q3, v3) = (axpy(q, h / 2.0, &v2), axpy(v, h / 2.0, &a2));
    let a3 = accel(sys, t + h / 2.0, &q3, &v3)?;
    let (q4, v4) = (axpy(q, h, &v3), axpy(v, h, &a3));
    let a4 = accel(sys, t + h, &q4, &v4)?;
    let n = q.len();
    let q_next = (0..n).map(|i| q[i] + h / 6.0 * (v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i])).collect();
    let v_next = (0..n).map(|i| v[i] + h / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i])).collect();
    Ok(State { t: t + h, q: q_next, qdot: v_next })
}

/// Classical RK4 from `start` to `t1` with step `dt`. Stops early, with
/// [`Trajectory::truncated`] set, when a state enters the exclusion zone of a
/// singular set or `Λ` cannot be evaluated.
pub fn integrate(sys: &LagrangianSystem, start: State, t1: f64, dt: f64) -> Result<Trajectory, DynamicsError> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(DynamicsError::InvalidStep(dt));
    }
    if t1 < start.t {
        return Err(DynamicsError::InvalidHorizon { t0: start.t, t1 });
    }
    let n = sys.dim();
    for len in [start.q.len(), start.qdot.len()] {
        if len != n {
            return Err(DynamicsError::DimensionMismatch { expected: n, got: len });
        }
    }
    let at = |s: &State| sys.point(s.t, &s.q, &s.qdot, &vec![0.0; n]);
    if let Some(set) = singular_hit(sys, &at(&start)) {
        return Err(DynamicsError::SingularStart(set));
    }
    let factors: Vec<Expr> = sys.singular_sets().iter().flat_map(|e| e.zero_set_factors()).collect();
    let mut signs = factor_signs(&factors, &at(&start));
    let numeric = accel(sys, start.t, &start.q, &start.qdot)?;
    let p0 = sys.point(start.t, &start.q, &start.qdot, &vec![0.0; n]);
    let lambda_crosscheck = sys
        .accel()
        .iter()
        .zip(&numeric)
        .map(|(e, v)| eval(e, &p0).map(|s| scaled_residual(s, *v)))
        .collect::<Result<Vec<f64>, _>>()
        .ok()
        .map(|r| r.into_iter().fold(0.0, f64::max));

    let t0 = start.t;
    let steps = ((t1 - t0) / dt).round() as usize;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(start);
    let mut truncated = None;
    for k in 1..=steps {
        let prev = states.last().unwrap();
        let mut next = match rk4_step(sys, prev, dt) {
            Ok(s) => s,
            Err(e) => {
                truncated = Some(Truncation { t: prev.t, reason: e.to_string() });
                break;
            }
        };
        next.t = t0 + k as f64 * dt;
        let p = at(&next);
        if let Some(set) = singular_hit(sys, &p) {
            truncated = Some(Truncation { t: next.t, reason: format!("entered the exclusion zone of `{set}`") });
            break;
        }
        // a fast approach can step across a set without landing near it
        let now = factor_signs(&factors, &p);
        if let Some(i) = now.iter().zip(&signs).position(|(a, b)| a * b < 0.0) {
            let set = factors[i].print(sys.alphabet());
            truncated = Some(Truncation { t: next.t, reason: format!("stepped across `{set}`") });
            break;
        }
        signs = now;
        states.push(next);
    }
    Ok(Trajectory { system: sys.name().to_string(), method: Method::Rk4, dt, t0, t1, states, truncated, lambda_crosscheck })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub integral: String,
    pub initial: f64,
    pub max_abs: f64,
    /// `max_abs / |N(t0)|`, or `max_abs` when `N(t0) = 0`.
    pub max_rel: f64,
    pub nodes: usize,
    pub truncated: bool,
}

/// Largest deviation of `N` from its initial value over the trajectory nodes.
pub fn monitor_drift(sys: &LagrangianSystem, traj: &Trajectory, name: &str, n: &Expr) -> Result<DriftReport, EvalError> {
    let zeros = vec![0.0; sys.dim()];
    let values: Vec<f64> =
        traj.states.iter().map(|s| eval(n, &sys.point(s.t, &s.q, &s.qdot, &zeros))).collect::<Result<_, _>>()?;
    let initial = values[0];
    let max_abs = values.iter().map(|v| (v - initial).abs()).fold(0.0, f64::max);
    let max_rel = if initial == 0.0 { max_abs } else { max_abs / initial.abs() };
    Ok(DriftReport { integral: name.to_string(), initial, max_abs, max_rel, nodes: values.len(), truncated: traj.is_truncated() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    /// Most frequent rank over the sample points.
    pub rank: usize,
    pub per_point: Vec<usize>,
    pub points: Vec<BTreeMap<String, f64>>,
}

impl RankReport {
    pub fn count(&self, rank: usize) -> usize {
        self.per_point.iter().filter(|&&r| r == rank).count()
    }
}

fn jacobian(sys: &LagrangianSystem, integrals: &[Expr]) -> Vec<Vec<Expr>> {
    let n = sys.dim();
    integrals
        .iter()
        .map(|e| (0..n).map(|i| diff(e, Var::Coord(i))).chain((0..n).map(|i| diff(e, Var::Vel(i)))).collect())
        .collect()
}

fn numeric_rank(jac: &[Vec<Expr>], p: &crate::expr::SamplePoint) -> Result<usize, EvalError> {
    let rows = jac.len();
    let cols = jac.first().map_or(0, Vec::len);
    let mut m = DMatrix::zeros(rows, cols);
    for (i, row) in jac.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            m[(i, j)] = eval(e, p)?;
        }
    }
    let sv = m.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    Ok(sv.iter().filter(|&&s| s > RANK_THRESHOLD * top).count())
}

/// Numeric rank of `∂(N₁..N_m)/∂(q, q̇)` at one point.
pub fn rank_at(sys: &LagrangianSystem, integrals: &[Expr], p: &crate::expr::SamplePoint) -> Result<usize, EvalError> {
    numeric_rank(&jacobian(sys, integrals), p)
}

/// Rank of the Jacobian of the integrals at [`RANK_SAMPLES`] generic points,
/// reported per point and by majority.
pub fn functional_independence_rank(sys: &LagrangianSystem, integrals: &[Expr], seed: u64) -> Result<RankReport, DynamicsError> {
    let jac = jacobian(sys, integrals);
    let domain = sys.domain().clone().with_singular(integrals.iter().flat_map(Expr::singular_factors));
    let samples = domain.sample_map(RANK_SAMPLES, seed, |p| numeric_rank(&jac, p))?;
    let per_point: Vec<usize> = samples.iter().map(|(_, r)| *r).collect();
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for r in &per_point {
        *counts.entry(*r).or_default() += 1;
    }
    let rank = counts.iter().max_by_key(|(r, c)| (**c, **r)).map_or(0, |(r, _)| *r);
    let points = samples.iter().map(|(p, _)| p.named_values(sys.alphabet())).collect();
    Ok(RankReport { rank, per_point, points })
}
