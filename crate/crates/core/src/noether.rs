//! Killing-type equations, Noether integrals and the reverse problem: given a
//! first integral `N`, produce triples `(τ, ξ, f)` whose Noether integral is `N`.
//!
//! Standard convention:
//!
//! ```text
//! τ ∂_t L + ∂_q L·ξ + ∂_q̇ L·(ξ̇ − q̇ τ̇) + L τ̇ = ḟ,    N = f − L τ − ∂_q̇ L·(ξ − q̇ τ)
//! ```
//!
//! Alternative convention (`ξ` measured relative to the flow):
//!
//! ```text
//! τ ∂_t L + ∂_q L·(ξ + τ q̇) + ∂_q̇ L·(ξ̇ + τ q̈) + L τ̇ = ḟ,    N = f − L τ − ∂_q̇ L·ξ
//! ```
//!
//! In strong forms `q̈` is an independent variable; in on-flow forms it is
//! replaced by the normal form `Λ`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::identity::{vanishes, CheckConfig, IdentityReport, SamplingError, Verdict};
use crate::expr::{diff, dot, eval, quotient, substitute, total_dt, Alphabet, DtMode, Expr, SamplePoint, Substitution, TotalDerivativeError, Var};
use crate::mechanics::{LagrangianSystem, MechanicsError};

/// Tolerance for the affineness tests of [`velocity_independence_check`].
pub const AFFINE_TOLERANCE: f64 = 1e-8;
/// Samples used to decide that `L + c` is not identically small.
const NONVANISHING_SAMPLES: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoetherError {
    #[error("triple has {got} space components, system dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("triple components must not contain accelerations")]
    ContainsAcceleration,
    #[error("`{integral}` is not conserved: residual {residual:e} at {point:?}")]
    NotConserved { integral: String, residual: f64, point: BTreeMap<String, f64> },
    #[error("L + {shift} vanishes on the sampled domain")]
    LagrangianVanishes { shift: f64 },
    #[error("g⁻¹ has no symbolic form for this system")]
    NoSymbolicInverse,
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Mechanics(#[from] MechanicsError),
}

impl From<TotalDerivativeError> for NoetherError {
    fn from(e: TotalDerivativeError) -> Self {
        match e {
            TotalDerivativeError::DimensionMismatch { expected, got } => NoetherError::DimensionMismatch { expected, got },
            TotalDerivativeError::ContainsAcceleration => NoetherError::ContainsAcceleration,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Form {
    #[serde(rename = "strong")]
    Strong,
    #[serde(rename = "onflow")]
    OnFlow,
    #[serde(rename = "alt-strong")]
    AltStrong,
    #[serde(rename = "alt-onflow")]
    AltOnFlow,
}

impl Form {
    pub const ALL: [Form; 4] = [Form::Strong, Form::OnFlow, Form::AltStrong, Form::AltOnFlow];

    pub fn is_strong(self) -> bool {
        matches!(self, Form::Strong | Form::AltStrong)
    }

    pub fn convention(self) -> Convention {
        match self {
            Form::Strong | Form::OnFlow => Convention::Standard,
            Form::AltStrong | Form::AltOnFlow => Convention::Alternative,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Form::Strong => "strong",
            Form::OnFlow => "onflow",
            Form::AltStrong => "alt-strong",
            Form::AltOnFlow => "alt-onflow",
        }
    }

    /// Same strength, other convention.
    pub fn switch_convention(self) -> Form {
        match self {
            Form::Strong => Form::AltStrong,
            Form::OnFlow => Form::AltOnFlow,
            Form::AltStrong => Form::Strong,
            Form::AltOnFlow => Form::OnFlow,
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Form {
    type Err = String;

    fn from_str(s: &str) -> Result<Form, String> {
        match s.trim() {
            "strong" => Ok(Form::Strong),
            "onflow" | "on-flow" => Ok(Form::OnFlow),
            "alt-strong" | "alt_strong" => Ok(Form::AltStrong),
            "alt-onflow" | "alt_onflow" | "alt-on-flow" => Ok(Form::AltOnFlow),
            other => Err(format!("unknown form `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    Standard,
    Alternative,
}

/// Infinitesimal time change `tau`, space change `xi` and boundary term `f`,
/// together with the form of the Killing-type equation it claims to solve.
#[derive(Clone, Debug, PartialEq)]
pub struct Triple {
    pub tau: Expr,
    pub xi: Vec<Expr>,
    pub f: Expr,
    pub form: Form,
}

impl Triple {
    pub fn new(tau: Expr, xi: Vec<Expr>, f: Expr, form: Form) -> Triple {
        Triple { tau, xi, f, form }
    }

    pub fn zero(dim: usize, form: Form) -> Triple {
        Triple::new(Expr::zero(), vec![Expr::zero(); dim], Expr::zero(), form)
    }

    pub fn with_form(mut self, form: Form) -> Triple {
        self.form = form;
        self
    }

    pub fn simplified(&self) -> Triple {
        use crate::expr::simplify;
        Triple {
            tau: simplify(&self.tau),
            xi: self.xi.iter().map(simplify).collect(),
            f: simplify(&self.f),
            form: self.form,
        }
    }

    fn check(&self, sys: &LagrangianSystem) -> Result<(), NoetherError> {
        if self.xi.len() != sys.dim() {
            return Err(NoetherError::DimensionMismatch { expected: sys.dim(), got: self.xi.len() });
        }
        if self.tau.has_acceleration() || self.f.has_acceleration() || self.xi.iter().any(Expr::has_acceleration) {
            return Err(NoetherError::ContainsAcceleration);
        }
        Ok(())
    }
}

/// Outcome of the conservation check attached to a [`FirstIntegral`].
#[derive(Clone, Debug, PartialEq)]
pub enum Conservation {
    Verified { tol: f64, samples: usize, max_residual: f64 },
    Unverified { max_residual: f64, witness: BTreeMap<String, f64> },
}

/// A candidate first integral with the result of its on-flow conservation
/// check. Only [`FirstIntegral::check`] creates one, so the status always
/// reflects an actual check.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstIntegral {
    name: String,
    expr: Expr,
    status: Conservation,
}

impl FirstIntegral {
    /// Check `dN/dt = 0` along the flow and record the outcome.
    pub fn check(sys: &LagrangianSystem, name: &str, expr: Expr, config: &CheckConfig) -> Result<FirstIntegral, NoetherError> {
        let report = conservation_report(sys, &expr, config)?;
        let status = if report.passed() {
            Conservation::Verified { tol: config.tol, samples: config.k, max_residual: report.max_residual }
        } else {
            Conservation::Unverified {
                max_residual: report.max_residual,
                witness: point_values(sys, &report.worst_point, false),
            }
        };
        Ok(FirstIntegral { name: name.to_string(), expr, status })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn status(&self) -> &Conservation {
        &self.status
    }

    pub fn is_verified(&self) -> bool {
        matches!(self.status, Conservation::Verified { .. })
    }

    /// The integral, or [`NoetherError::NotConserved`] with the witness.
    pub fn require_conserved(&self) -> Result<&Expr, NoetherError> {
        match &self.status {
            Conservation::Verified { .. } => Ok(&self.expr),
            Conservation::Unverified { max_residual, witness } => Err(NoetherError::NotConserved {
                integral: self.name.clone(),
                residual: *max_residual,
                point: witness.clone(),
            }),
        }
    }
}

/// Serializable outcome of an identity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub mode: String,
    pub k: usize,
    pub tol: f64,
    pub max_residual: f64,
    pub worst_point: BTreeMap<String, f64>,
    pub verdict: Verdict,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integral: Option<Box<VerificationReport>>,
}

impl VerificationReport {
    fn from_identity(sys: &LagrangianSystem, check: &str, mode: &str, with_acc: bool, r: &IdentityReport) -> VerificationReport {
        VerificationReport {
            check: check.to_string(),
            mode: mode.to_string(),
            k: r.config.k,
            tol: r.config.tol,
            max_residual: r.max_residual,
            worst_point: point_values(sys, &r.worst_point, with_acc),
            verdict: r.verdict,
            seed: r.config.seed,
            integral: None,
        }
    }

    /// Verdict of the Killing check combined with the integral check, if any.
    pub fn passed(&self) -> bool {
        self.verdict.passed() && self.integral.as_ref().is_none_or(|r| r.passed())
    }
}

fn point_values(sys: &LagrangianSystem, p: &SamplePoint, with_acc: bool) -> BTreeMap<String, f64> {
    let a: &Alphabet = sys.alphabet();
    let mut out = BTreeMap::new();
    out.insert("t".to_string(), p.t);
    for i in 0..sys.dim() {
        out.insert(a.var_name(Var::Coord(i)), p.q[i]);
        out.insert(a.var_name(Var::Vel(i)), p.qdot[i]);
        if with_acc {
            out.insert(a.var_name(Var::Acc(i)), p.qddot[i]);
        }
    }
    out
}

fn dt_mode(sys: &LagrangianSystem, form: Form) -> DtMode<'_> {
    if form.is_strong() {
        DtMode::Generic
    } else {
        DtMode::OnFlow(sys.accel())
    }
}

/// Left-hand side of the Killing-type equation in the given form.
pub fn killing_lhs(sys: &LagrangianSystem, tr: &Triple, form: Form) -> Result<Expr, NoetherError> {
    tr.check(sys)?;
    let n = sys.dim();
    let l = sys.lagrangian();
    let p = sys.momentum();
    let mode = dt_mode(sys, form);
    let tau_dot = total_dt(&tr.tau, n, mode)?;
    let xi_dot: Vec<Expr> = tr.xi.iter().map(|x| total_dt(x, n, mode)).collect::<Result<_, _>>()?;
    let grad_q: Vec<Expr> = (0..n).map(|i| diff(l, Var::Coord(i))).collect();
    let qdot: Vec<Expr> = (0..n).map(Expr::qdot).collect();
    let time_part = &tr.tau * diff(l, Var::Time) + l * &tau_dot;
    let rest = match form.convention() {
        Convention::Standard => {
            let moved: Vec<Expr> = xi_dot.iter().zip(&qdot).map(|(xd, v)| xd - v * &tau_dot).collect();
            dot(&grad_q, &tr.xi) + dot(p, &moved)
        }
        Convention::Alternative => {
            let accel: Vec<Expr> = match mode {
                DtMode::Generic => (0..n).map(Expr::qddot).collect(),
                DtMode::OnFlow(lambda) => lambda.to_vec(),
            };
            let shifted: Vec<Expr> = tr.xi.iter().zip(&qdot).map(|(x, v)| x + &tr.tau * v).collect();
            let moved: Vec<Expr> = xi_dot.iter().zip(&accel).map(|(xd, a)| xd + &tr.tau * a).collect();
            dot(&grad_q, &shifted) + dot(p, &moved)
        }
    };
    Ok(time_part + rest)
}

/// `killing_lhs - ḟ` in the given form.
pub fn killing_residual(sys: &LagrangianSystem, tr: &Triple, form: Form) -> Result<Expr, NoetherError> {
    let lhs = killing_lhs(sys, tr, form)?;
    let f_dot = total_dt(&tr.f, sys.dim(), dt_mode(sys, form))?;
    Ok(lhs - f_dot)
}

/// Noether integral of a triple in the given convention.
pub fn noether_expr(sys: &LagrangianSystem, tr: &Triple, convention: Convention) -> Expr {
    let l = sys.lagrangian();
    let p = sys.momentum();
    let moved: Vec<Expr> = match convention {
        Convention::Standard => tr.xi.iter().enumerate().map(|(i, x)| x - Expr::qdot(i) * &tr.tau).collect(),
        Convention::Alternative => tr.xi.clone(),
    };
    &tr.f - l * &tr.tau - dot(p, &moved)
}

/// Noether integral together with its conservation check.
pub fn noether_integral(
    sys: &LagrangianSystem,
    tr: &Triple,
    convention: Convention,
    config: &CheckConfig,
) -> Result<FirstIntegral, NoetherError> {
    tr.check(sys)?;
    FirstIntegral::check(sys, "N", noether_expr(sys, tr, convention), config)
}

fn conservation_report(sys: &LagrangianSystem, n_expr: &Expr, config: &CheckConfig) -> Result<IdentityReport, NoetherError> {
    if n_expr.has_acceleration() {
        return Err(NoetherError::ContainsAcceleration);
    }
    let dn = total_dt(n_expr, sys.dim(), DtMode::OnFlow(sys.accel()))?;
    Ok(vanishes(&dn, sys.domain(), config)?)
}

/// Verify `tr` against the Killing-type equation in `form`. If `integral` is
/// given, also compare the Noether integral of `tr` (in the convention of
/// `form`) with it.
pub fn verify_triple(
    sys: &LagrangianSystem,
    tr: &Triple,
    form: Form,
    integral: Option<&Expr>,
    config: &CheckConfig,
) -> Result<VerificationReport, NoetherError> {
    let residual = killing_residual(sys, tr, form)?;
    let r = vanishes(&residual, sys.domain(), config)?;
    let mut report = VerificationReport::from_identity(sys, "killing", form.name(), form.is_strong(), &r);
    if let Some(n) = integral {
        let diff = noether_expr(sys, tr, form.convention()) - n;
        let r = vanishes(&diff, sys.domain(), config)?;
        report.integral = Some(Box::new(VerificationReport::from_identity(sys, "noether-integral", form.name(), false, &r)));
    }
    Ok(report)
}

/// Conservation check of `N` as a report.
pub fn verify_conservation(sys: &LagrangianSystem, n_expr: &Expr, config: &CheckConfig) -> Result<VerificationReport, NoetherError> {
    let r = conservation_report(sys, n_expr, config)?;
    Ok(VerificationReport::from_identity(sys, "conservation", "onflow", false, &r))
}

/// Error unless `L + shift` stays away from zero somewhere on the domain.
fn ensure_nonvanishing(sys: &LagrangianSystem, shift: f64) -> Result<Expr, NoetherError> {
    let denom = sys.lagrangian() + shift;
    let domain = sys.domain().clone().with_singular([denom.clone()]);
    match domain.sample_points(NONVANISHING_SAMPLES, 0) {
        Ok(_) => Ok(denom),
        Err(SamplingError::Exhausted { .. }) => Err(NoetherError::LagrangianVanishes { shift }),
        Err(e) => Err(e.into()),
    }
}

fn qdot_times(sys: &LagrangianSystem, s: &Expr) -> Vec<Expr> {
    (0..sys.dim()).map(|i| Expr::qdot(i) * s).collect()
}

/// General on-flow solution: any `τ`, `ξ` with `f = τL + N + ∂_q̇L·(ξ − τq̇)`.
pub fn solve_onflow(sys: &LagrangianSystem, n: &FirstIntegral, tau: Expr, xi: Vec<Expr>) -> Result<Triple, NoetherError> {
    let n_expr = n.require_conserved()?;
    let tr = Triple::new(tau, xi, Expr::zero(), Form::OnFlow);
    tr.check(sys)?;
    let moved: Vec<Expr> = tr.xi.iter().zip(qdot_times(sys, &tr.tau)).map(|(x, v)| x - v).collect();
    let f = &tr.tau * sys.lagrangian() + n_expr + dot(sys.momentum(), &moved);
    Ok(Triple { f, ..tr })
}

/// `τ = −N/(L+c)`, `ξ = τq̇`. The gauge term is `−cτ`, which is zero for
/// `c = 0` and keeps the triple a solution for `L` itself when `c ≠ 0`.
pub fn solve_onflow_simplest(sys: &LagrangianSystem, n: &FirstIntegral, c: f64) -> Result<Triple, NoetherError> {
    solve_onflow_with_r(sys, n, &vec![Expr::zero(); sys.dim()], c)
}

/// `τ = −(N + ∂_q̇L·R)/(L+c)`, `ξ = R + τq̇`, `f = −cτ`.
pub fn solve_onflow_with_r(sys: &LagrangianSystem, n: &FirstIntegral, r: &[Expr], c: f64) -> Result<Triple, NoetherError> {
    let n_expr = n.require_conserved()?;
    if r.len() != sys.dim() {
        return Err(NoetherError::DimensionMismatch { expected: sys.dim(), got: r.len() });
    }
    let denom = ensure_nonvanishing(sys, c)?;
    let tau = -quotient(n_expr + dot(sys.momentum(), r), denom);
    let xi = r.iter().zip(qdot_times(sys, &tau)).map(|(ri, v)| ri + v).collect();
    let f = -(&tau * c);
    let tr = Triple::new(tau, xi, f, Form::OnFlow);
    tr.check(sys)?;
    Ok(tr)
}

fn g_inverse_grad(sys: &LagrangianSystem, n_expr: &Expr) -> Result<Vec<Expr>, NoetherError> {
    let grad: Vec<Expr> = (0..sys.dim()).map(|i| diff(n_expr, Var::Vel(i))).collect();
    let solved = sys.invert_g_apply(&grad)?;
    if !solved.is_symbolic() {
        return Err(NoetherError::NoSymbolicInverse);
    }
    Ok(solved.solution)
}

/// General strong solution: any `τ`, with `ξ = τq̇ − g⁻¹∂_q̇N` and
/// `f = τL + N − ∂_q̇L·g⁻¹∂_q̇N`.
pub fn solve_strong(sys: &LagrangianSystem, n: &FirstIntegral, tau: Expr) -> Result<Triple, NoetherError> {
    let n_expr = n.require_conserved()?;
    let w = g_inverse_grad(sys, n_expr)?;
    let xi = qdot_times(sys, &tau).into_iter().zip(&w).map(|(v, wi)| v - wi).collect();
    let f = &tau * sys.lagrangian() + n_expr - dot(sys.momentum(), &w);
    let tr = Triple::new(tau, xi, f, Form::Strong);
    tr.check(sys)?;
    Ok(tr)
}

/// Alternative-convention strong solution with `f = −cτ` (zero for `c = 0`):
/// `τ = −(N − ∂_q̇L·g⁻¹∂_q̇N)/(L+c)`, `ξ = −g⁻¹∂_q̇N`.
pub fn solve_alt_strong_trivial_gauge(sys: &LagrangianSystem, n: &FirstIntegral, c: f64) -> Result<Triple, NoetherError> {
    let n_expr = n.require_conserved()?;
    let w = g_inverse_grad(sys, n_expr)?;
    let denom = ensure_nonvanishing(sys, c)?;
    let tau = -quotient(n_expr - dot(sys.momentum(), &w), denom);
    let xi = w.iter().map(|wi| -wi.clone()).collect();
    let f = -(&tau * c);
    let tr = Triple::new(tau, xi, f, Form::AltStrong);
    tr.check(sys)?;
    Ok(tr)
}

/// Move to the standard convention, apply `op`, and move back.
fn in_standard(tr: &Triple, op: impl FnOnce(Triple) -> Triple) -> Triple {
    match tr.form.convention() {
        Convention::Standard => op(tr.clone()),
        Convention::Alternative => {
            let std = convert_standard_alternative(tr);
            convert_standard_alternative(&op(std))
        }
    }
}

/// Replace the boundary term by `h`: `δ = (h − f)/L`,
/// `(τ + δ, ξ + q̇δ, h)` in the standard convention.
pub fn multiplicity_transform(sys: &LagrangianSystem, tr: &Triple, h: Expr) -> Result<Triple, NoetherError> {
    tr.check(sys)?;
    if h.has_acceleration() {
        return Err(NoetherError::ContainsAcceleration);
    }
    let l = ensure_nonvanishing(sys, 0.0)?;
    Ok(in_standard(tr, |t| {
        let delta = quotient(&h - &t.f, l);
        let xi = t.xi.iter().zip(qdot_times(sys, &delta)).map(|(x, v)| x + v).collect();
        Triple::new(&t.tau + &delta, xi, h, t.form)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trivialize {
    /// `τ = 0`: `(0, ξ − q̇τ, f − Lτ)`.
    Time,
    /// `f = 0`: `(τ − f/L, ξ − q̇f/L, 0)`.
    Gauge,
}

pub fn trivialize(sys: &LagrangianSystem, tr: &Triple, which: Trivialize) -> Result<Triple, NoetherError> {
    tr.check(sys)?;
    match which {
        Trivialize::Time => Ok(in_standard(tr, |t| {
            let xi = t.xi.iter().zip(qdot_times(sys, &t.tau)).map(|(x, v)| x - v).collect();
            let f = &t.f - sys.lagrangian() * &t.tau;
            Triple::new(Expr::zero(), xi, f, t.form)
        })),
        Trivialize::Gauge => multiplicity_transform(sys, tr, Expr::zero()),
    }
}

/// Switch conventions: standard to alternative maps `ξ ↦ ξ − τq̇`,
/// alternative to standard maps `ξ ↦ ξ + τq̇`. `τ` and `f` are unchanged.
pub fn convert_standard_alternative(tr: &Triple) -> Triple {
    let sign = match tr.form.convention() {
        Convention::Standard => -1.0,
        Convention::Alternative => 1.0,
    };
    let xi = tr.xi.iter().enumerate().map(|(i, x)| x + sign * (Expr::qdot(i) * &tr.tau)).collect();
    Triple::new(tr.tau.clone(), xi, tr.f.clone(), tr.form.switch_convention())
}

/// Outcome of [`velocity_independence_check`].
#[derive(Clone, Debug, PartialEq)]
pub enum VelocityIndependence {
    /// `g⁻¹∂_q̇N = a(t,q) + b(t,q) q̇`; the strong solution with `τ = b`
    /// is `(b, −a, f)` with no velocity dependence in `τ` or `ξ`.
    Admissible { a: Vec<Expr>, b: Expr },
    Inadmissible { reason: String, residual: f64, witness: BTreeMap<String, f64> },
}

impl VelocityIndependence {
    pub fn is_admissible(&self) -> bool {
        matches!(self, VelocityIndependence::Admissible { .. })
    }
}

/// Decide whether `N` comes from a triple that does not depend on `q̇`:
/// this holds iff `g⁻¹∂_q̇N` is affine in `q̇` with a scalar linear part.
pub fn velocity_independence_check(
    sys: &LagrangianSystem,
    n_expr: &Expr,
    config: &CheckConfig,
) -> Result<VelocityIndependence, NoetherError> {
    let dim = sys.dim();
    let w = g_inverse_grad(sys, n_expr)?;
    let cfg = config.with_tol(AFFINE_TOLERANCE);
    let inadmissible = |reason: String, r: &IdentityReport| VelocityIndependence::Inadmissible {
        reason,
        residual: r.max_residual,
        witness: point_values(sys, &r.worst_point, false),
    };
    let jac: Vec<Vec<Expr>> = w.iter().map(|wi| (0..dim).map(|j| diff(wi, Var::Vel(j))).collect()).collect();
    for (i, row) in jac.iter().enumerate() {
        for (j, jij) in row.iter().enumerate() {
            for k in j..dim {
                let second = diff(jij, Var::Vel(k));
                let r = vanishes(&second, sys.domain(), &cfg)?;
                if !r.passed() {
                    return Ok(inadmissible(format!("component {} is not affine in velocity {} and {}", i + 1, j + 1, k + 1), &r));
                }
            }
        }
    }
    let b = &jac[0][0];
    for (i, row) in jac.iter().enumerate() {
        for (j, jij) in row.iter().enumerate() {
            let expected = if i == j { b.clone() } else { Expr::zero() };
            let r = vanishes(&(jij - expected), sys.domain(), &cfg)?;
            if !r.passed() {
                return Ok(inadmissible(format!("velocity Jacobian entry ({}, {}) breaks the scalar form", i + 1, j + 1), &r));
            }
        }
    }
    let mut at_rest = Substitution::new();
    for i in 0..dim {
        at_rest = at_rest.var(Var::Vel(i), Expr::zero());
    }
    Ok(VelocityIndependence::Admissible {
        a: w.iter().map(|wi| substitute(wi, &at_rest)).collect(),
        b: substitute(b, &at_rest),
    })
}

/// Evaluate every component of a triple at a point.
pub fn eval_triple(tr: &Triple, p: &SamplePoint) -> Result<(f64, Vec<f64>, f64), crate::expr::EvalError> {
    Ok((eval(&tr.tau, p)?, tr.xi.iter().map(|x| eval(x, p)).collect::<Result<_, _>>()?, eval(&tr.f, p)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::identity::equal_numeric;
    use crate::expr::parse;

    fn free() -> LagrangianSystem {
        let a = Alphabet::with_coords(&["q"]);
        LagrangianSystem::builder("free", a.clone(), parse("qdot^2/2", &a).unwrap()).build().unwrap()
    }

    fn ex(sys: &LagrangianSystem, s: &str) -> Expr {
        parse(s, sys.alphabet()).unwrap()
    }

    fn tri(sys: &LagrangianSystem, tau: &str, xi: &str, f: &str, form: Form) -> Triple {
        Triple::new(ex(sys, tau), vec![ex(sys, xi)], ex(sys, f), form)
    }

    fn same(sys: &LagrangianSystem, a: &Expr, b: &Expr) -> bool {
        equal_numeric(a, b, sys.domain(), &CheckConfig::default()).unwrap().passed()
    }

    fn integral(sys: &LagrangianSystem, s: &str) -> FirstIntegral {
        FirstIntegral::check(sys, s, ex(sys, s), &CheckConfig::default()).unwrap()
    }

    #[test]
    fn killing_lhs_on_free_particle() {
        let s = free();
        let lhs = killing_lhs(&s, &tri(&s, "0", "q", "0", Form::Strong), Form::Strong).unwrap();
        assert!(same(&s, &lhs, &ex(&s, "qdot^2")));
        let lhs = killing_lhs(&s, &tri(&s, "q", "0", "0", Form::OnFlow), Form::OnFlow).unwrap();
        assert!(same(&s, &lhs, &ex(&s, "-qdot^3/2")));
        let lhs = killing_lhs(&s, &tri(&s, "0", "1", "0", Form::Strong), Form::Strong).unwrap();
        assert!(lhs.is_zero());
    }

    #[test]
    fn triple_with_acceleration_is_rejected() {
        let s = free();
        let t = Triple::new(Expr::qddot(0), vec![Expr::zero()], Expr::zero(), Form::Strong);
        assert_eq!(killing_lhs(&s, &t, Form::Strong), Err(NoetherError::ContainsAcceleration));
    }

    #[test]
    fn non_conserved_integral_blocks_solvers() {
        let s = free();
        let n = integral(&s, "q");
        assert!(!n.is_verified());
        assert!(matches!(solve_strong(&s, &n, Expr::zero()), Err(NoetherError::NotConserved { .. })));
        assert!(matches!(solve_onflow_simplest(&s, &n, 0.0), Err(NoetherError::NotConserved { .. })));
    }

    #[test]
    fn strong_solutions_of_free_particle() {
        let s = free();
        let t = solve_strong(&s, &integral(&s, "-qdot"), Expr::zero()).unwrap();
        assert!(same(&s, &t.xi[0], &Expr::one()) && same(&s, &t.f, &Expr::zero()));
        let t = solve_strong(&s, &integral(&s, "qdot^2/2"), Expr::one()).unwrap();
        assert!(same(&s, &t.tau, &Expr::one()) && same(&s, &t.xi[0], &Expr::zero()) && same(&s, &t.f, &Expr::zero()));
    }

    #[test]
    fn simplest_onflow_solution() {
        let s = free();
        let t = solve_onflow_simplest(&s, &integral(&s, "qdot"), 0.0).unwrap();
        assert!(same(&s, &t.tau, &ex(&s, "-2/qdot")));
        assert!(same(&s, &t.xi[0], &Expr::constant(-2.0)));
        assert!(t.f.is_zero());
        let cfg = CheckConfig::default();
        assert!(verify_triple(&s, &t, Form::OnFlow, Some(&ex(&s, "qdot")), &cfg).unwrap().passed());
    }

    #[test]
    fn shifted_solution_still_solves_for_l() {
        let s = free();
        let n = ex(&s, "q - t*qdot");
        let t = solve_onflow_simplest(&s, &integral(&s, "q - t*qdot"), 1.5).unwrap();
        let r = verify_triple(&s, &t, Form::OnFlow, Some(&n), &CheckConfig::default()).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn zero_lagrangian_shift_is_reported() {
        let a = Alphabet::new(1);
        let s = LagrangianSystem::builder("s", a.clone(), parse("qdot1^2/2", &a).unwrap()).velocity_range(0, 0.0, 0.0).build();
        // g = 1 everywhere but L = 0 on the whole box
        let s = s.unwrap();
        let n = FirstIntegral::check(&s, "N", parse("qdot1", &a).unwrap(), &CheckConfig::default()).unwrap();
        assert_eq!(solve_onflow_simplest(&s, &n, 0.0), Err(NoetherError::LagrangianVanishes { shift: 0.0 }));
    }

    #[test]
    fn conversion_round_trip_and_integrals() {
        let s = free();
        let std = tri(&s, "1", "0", "0", Form::Strong);
        let alt = convert_standard_alternative(&std);
        assert_eq!(alt.form, Form::AltStrong);
        assert!(same(&s, &alt.xi[0], &ex(&s, "-qdot")));
        assert_eq!(convert_standard_alternative(&alt), std);
        let n_std = noether_expr(&s, &std, Convention::Standard);
        let n_alt = noether_expr(&s, &alt, Convention::Alternative);
        assert!(same(&s, &n_std, &ex(&s, "qdot^2/2")) && same(&s, &n_alt, &n_std));
    }

    #[test]
    fn time_trivialization() {
        let s = free();
        let t = trivialize(&s, &tri(&s, "1", "0", "0", Form::Strong), Trivialize::Time).unwrap();
        assert!(t.tau.is_zero());
        assert!(same(&s, &t.xi[0], &ex(&s, "-qdot")) && same(&s, &t.f, &ex(&s, "-qdot^2/2")));
        assert!(same(&s, &noether_expr(&s, &t, Convention::Standard), &ex(&s, "qdot^2/2")));
    }

    #[test]
    fn gauge_trivialization_of_gauge_free_triple() {
        let s = free();
        let t = tri(&s, "1", "0", "0", Form::Strong);
        let g = trivialize(&s, &t, Trivialize::Gauge).unwrap();
        assert_eq!(g, t);
    }

    #[test]
    fn alt_trivial_gauge_on_free_particle() {
        let s = free();
        let n = integral(&s, "-qdot");
        let t = solve_alt_strong_trivial_gauge(&s, &n, 0.0).unwrap();
        assert!(same(&s, &t.tau, &Expr::zero()) && same(&s, &t.xi[0], &Expr::one()) && t.f.is_zero());
        let r = verify_triple(&s, &t, Form::AltStrong, Some(n.expr()), &CheckConfig::default()).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn velocity_dependent_integral_is_inadmissible() {
        let s = free();
        let v = velocity_independence_check(&s, &ex(&s, "(q - t*qdot)^3"), &CheckConfig::default()).unwrap();
        assert!(!v.is_admissible());
        let v = velocity_independence_check(&s, &ex(&s, "q - t*qdot"), &CheckConfig::default()).unwrap();
        let VelocityIndependence::Admissible { a, b } = v else { panic!("expected admissible") };
        assert!(same(&s, &a[0], &ex(&s, "-t")) && same(&s, &b, &Expr::zero()));
    }

    #[test]
    fn report_serializes_with_fixed_keys() {
        let s = free();
        let r = verify_triple(&s, &tri(&s, "0", "q", "0", Form::Strong), Form::Strong, None, &CheckConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.worst_point.contains_key("qddot"));
        let json = serde_json::to_value(&r).unwrap();
        for key in ["check", "mode", "k", "tol", "max_residual", "worst_point", "verdict", "seed"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert_eq!(json["verdict"], "FAIL");
    }
}
