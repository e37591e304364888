//! Euler-Lagrange structure of a Lagrangian system: momenta `∂_q̇ L`, the
//! velocity Hessian `g`, the normal form `q̈ = Λ(t, q, q̇)`, and the
//! Euler-Lagrange residual.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::expr::identity::{scaled_residual, SamplingDomain, SamplingError};
use crate::expr::{diff, eval, product, quotient, simplify, sub, sum, total_dt, Alphabet, DtMode, EvalError, Expr, FunctionBinding, SamplePoint, Var};

/// Number of points used for the sampled regularity check.
pub const REGULARITY_SAMPLES: usize = 20;
/// Smallest admissible `|det g|` at a sample point.
pub const REGULARITY_THRESHOLD: f64 = 1e-8;
const REGULARITY_SEED: u64 = 0x0072_6567_756c_6172;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MechanicsError {
    #[error("system dimension must be at least 1")]
    EmptySystem,
    #[error("the Lagrangian must not contain accelerations")]
    AccelerationInLagrangian,
    #[error("singular velocity Hessian: det g = {det:e} at {point:?}")]
    SingularHessian { det: f64, point: BTreeMap<String, f64> },
    #[error("vector has {got} components, system dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// How a symbolic linear solve `g v = w` was carried out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    /// `v = adj(g) w / det g`, used for `n <= 3`.
    Adjugate,
    /// Fraction-free elimination with symbolic pivots.
    FractionFree,
    /// No usable symbolic pivot; only per-point numeric solves are available.
    PerPoint,
}

/// Result of [`LagrangianSystem::invert_g_apply`].
#[derive(Clone, Debug)]
pub struct GSolve {
    pub method: SolveMethod,
    /// Symbolic solution, empty when `method` is [`SolveMethod::PerPoint`].
    pub solution: Vec<Expr>,
    /// Largest scaled residual of `g v - w` over the spot-check points;
    /// `None` when `w` involves functions without a numeric binding.
    pub spot_residual: Option<f64>,
}

impl GSolve {
    pub fn is_symbolic(&self) -> bool {
        self.method != SolveMethod::PerPoint
    }
}

#[derive(Clone, Debug)]
pub struct RegularityReport {
    pub samples: usize,
    pub min_abs_det: f64,
}

/// Builder for [`LagrangianSystem`].
#[derive(Clone, Debug)]
pub struct SystemBuilder {
    name: String,
    alphabet: Alphabet,
    lagrangian: Expr,
    domain: SamplingDomain,
    force_fraction_free: bool,
}

impl SystemBuilder {
    pub fn param(mut self, name: &str, value: f64) -> SystemBuilder {
        self.alphabet = self.alphabet.param(name);
        self.domain.params.insert(name.to_string(), value);
        self
    }

    pub fn function(mut self, name: &str, binding: FunctionBinding) -> SystemBuilder {
        self.alphabet = self.alphabet.function(name);
        self.domain.functions.insert(name.to_string(), binding);
        self
    }

    pub fn singular(mut self, e: Expr) -> SystemBuilder {
        self.domain = self.domain.with_singular([e]);
        self
    }

    pub fn time_range(mut self, lo: f64, hi: f64) -> SystemBuilder {
        self.domain.time = (lo, hi);
        self
    }

    pub fn coord_range(mut self, i: usize, lo: f64, hi: f64) -> SystemBuilder {
        self.domain.coords[i] = (lo, hi);
        self
    }

    pub fn velocity_range(mut self, i: usize, lo: f64, hi: f64) -> SystemBuilder {
        self.domain.velocities[i] = (lo, hi);
        self
    }

    /// Use fraction-free elimination even for small systems.
    pub fn fraction_free(mut self) -> SystemBuilder {
        self.force_fraction_free = true;
        self
    }

    pub fn build(self) -> Result<LagrangianSystem, MechanicsError> {
        LagrangianSystem::from_builder(self)
    }
}

/// A regular Lagrangian system with its derived Euler-Lagrange data.
#[derive(Clone, Debug)]
pub struct LagrangianSystem {
    name: String,
    alphabet: Alphabet,
    lagrangian: Expr,
    domain: SamplingDomain,
    force_fraction_free: bool,
    momentum: Vec<Expr>,
    hessian: Vec<Vec<Expr>>,
    force: Vec<Expr>,
    accel: Vec<Expr>,
    accel_method: SolveMethod,
    el_lhs: Vec<Expr>,
    regularity: RegularityReport,
}

impl LagrangianSystem {
    pub fn builder(name: &str, alphabet: Alphabet, lagrangian: Expr) -> SystemBuilder {
        let n = alphabet.dim();
        let mut domain = SamplingDomain::new(n);
        for p in alphabet.param_names() {
            domain.params.entry(p.clone()).or_insert(0.0);
        }
        SystemBuilder { name: name.to_string(), alphabet, lagrangian, domain, force_fraction_free: false }
    }

    fn from_builder(b: SystemBuilder) -> Result<LagrangianSystem, MechanicsError> {
        let n = b.alphabet.dim();
        if n == 0 {
            return Err(MechanicsError::EmptySystem);
        }
        if b.lagrangian.has_acceleration() {
            return Err(MechanicsError::AccelerationInLagrangian);
        }
        let l = &b.lagrangian;
        let momentum: Vec<Expr> = (0..n).map(|i| diff(l, Var::Vel(i))).collect();
        let hessian: Vec<Vec<Expr>> =
            momentum.iter().map(|p| (0..n).map(|j| diff(p, Var::Vel(j))).collect()).collect();
        // ∂_q L - ∂²_{q̇ t} L - ∂²_{q̇ q} L q̇
        let force: Vec<Expr> = (0..n)
            .map(|i| {
                let mut terms = vec![diff(l, Var::Coord(i)), -diff(&momentum[i], Var::Time)];
                for j in 0..n {
                    terms.push(-(diff(&momentum[i], Var::Coord(j)) * Expr::qdot(j)));
                }
                sum(terms)
            })
            .collect();
        let el_lhs = (0..n)
            .map(|i| {
                let dp = total_dt(&momentum[i], n, DtMode::Generic).expect("momentum is free of accelerations");
                sub(diff(l, Var::Coord(i)), dp)
            })
            .collect();
        let auto_singular: Vec<Expr> =
            l.singular_factors().into_iter().chain(force.iter().flat_map(Expr::singular_factors)).collect();
        let mut sys = LagrangianSystem {
            name: b.name,
            alphabet: b.alphabet,
            domain: b.domain.with_singular(auto_singular),
            lagrangian: b.lagrangian,
            force_fraction_free: b.force_fraction_free,
            momentum,
            hessian,
            force,
            accel: Vec::new(),
            accel_method: SolveMethod::Adjugate,
            el_lhs,
            regularity: RegularityReport { samples: 0, min_abs_det: 0.0 },
        };
        sys.regularity = sys.check_regularity()?;
        let solved = sys.solve_linear(&sys.force.clone())?;
        sys.accel_method = solved.method;
        sys.accel = solved.solution.iter().map(simplify).collect();
        Ok(sys)
    }

    fn check_regularity(&self) -> Result<RegularityReport, MechanicsError> {
        let dets = self.domain.sample_map(REGULARITY_SAMPLES, REGULARITY_SEED, |p| {
            Ok(self.hessian_at(p)?.determinant())
        })?;
        let mut min_abs_det = f64::INFINITY;
        for (p, det) in &dets {
            if det.abs() <= REGULARITY_THRESHOLD {
                return Err(MechanicsError::SingularHessian { det: *det, point: p.named_values(&self.alphabet) });
            }
            min_abs_det = min_abs_det.min(det.abs());
        }
        Ok(RegularityReport { samples: dets.len(), min_abs_det })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.alphabet.dim()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn lagrangian(&self) -> &Expr {
        &self.lagrangian
    }

    /// Sampling box, parameter values, function bindings and singular sets
    /// (declared ones plus the denominators of `L` and of the force).
    pub fn domain(&self) -> &SamplingDomain {
        &self.domain
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.domain.params
    }

    pub fn singular_sets(&self) -> &[Expr] {
        &self.domain.singular
    }

    /// `∂_q̇ L`.
    pub fn momentum(&self) -> &[Expr] {
        &self.momentum
    }

    /// `g = ∂²_q̇q̇ L`.
    pub fn hessian(&self) -> &[Vec<Expr>] {
        &self.hessian
    }

    /// `∂_q L - ∂²_{q̇ t} L - ∂²_{q̇ q} L q̇`, so that `g Λ` equals it.
    pub fn force(&self) -> &[Expr] {
        &self.force
    }

    /// Normal form `Λ`.
    pub fn accel(&self) -> &[Expr] {
        &self.accel
    }

    pub fn accel_method(&self) -> SolveMethod {
        self.accel_method
    }

    pub fn regularity(&self) -> &RegularityReport {
        &self.regularity
    }

    /// Symbolic `∂_q L - d/dt ∂_q̇ L` with accelerations left free.
    pub fn el_expressions(&self) -> &[Expr] {
        &self.el_lhs
    }

    /// Fill in parameter values and function bindings of this system.
    pub fn point(&self, t: f64, q: &[f64], qdot: &[f64], qddot: &[f64]) -> SamplePoint {
        SamplePoint {
            t,
            q: q.to_vec(),
            qdot: qdot.to_vec(),
            qddot: qddot.to_vec(),
            params: self.domain.params.clone(),
            functions: self.domain.functions.clone(),
            arg: None,
        }
    }

    pub fn hessian_at(&self, p: &SamplePoint) -> Result<DMatrix<f64>, EvalError> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = eval(&self.hessian[i][j], p)?;
            }
        }
        Ok(m)
    }

    /// `∂_q L - d/dt ∂_q̇ L` evaluated at a point that binds `q̈`.
    pub fn el_residual(&self, p: &SamplePoint) -> Result<Vec<f64>, EvalError> {
        self.el_lhs.iter().map(|e| eval(e, p)).collect()
    }

    /// `g (Λ - q̈)` at the same point; equals [`Self::el_residual`].
    pub fn el_residual_via_hessian(&self, p: &SamplePoint) -> Result<Vec<f64>, EvalError> {
        let g = self.hessian_at(p)?;
        let lambda: Vec<f64> = self.accel.iter().map(|e| eval(e, p)).collect::<Result<_, _>>()?;
        let d = DVector::from_iterator(self.dim(), lambda.iter().zip(&p.qddot).map(|(l, a)| l - a));
        Ok((g * d).iter().copied().collect())
    }

    /// Normal form at a point from a per-point linear solve of `g Λ = force`.
    pub fn accel_numeric(&self, p: &SamplePoint) -> Result<Vec<f64>, EvalError> {
        let rhs: Vec<f64> = self.force.iter().map(|e| eval(e, p)).collect::<Result<_, _>>()?;
        self.solve_at(p, &rhs)
    }

    /// Numeric solve of `g v = w` at a point.
    pub fn solve_at(&self, p: &SamplePoint, w: &[f64]) -> Result<Vec<f64>, EvalError> {
        let g = self.hessian_at(p)?;
        let rhs = DVector::from_column_slice(w);
        match g.lu().solve(&rhs) {
            Some(v) => Ok(v.iter().copied().collect()),
            None => Err(EvalError::Domain { subtree: "g".into(), reason: "singular Hessian" }),
        }
    }

    /// Symbolic `g⁻¹ w`, spot-checked numerically.
    pub fn invert_g_apply(&self, w: &[Expr]) -> Result<GSolve, MechanicsError> {
        if w.len() != self.dim() {
            return Err(MechanicsError::DimensionMismatch { expected: self.dim(), got: w.len() });
        }
        self.solve_linear(w)
    }

    fn solve_linear(&self, w: &[Expr]) -> Result<GSolve, MechanicsError> {
        let n = self.dim();
        let spot = self.domain.sample_points(REGULARITY_SAMPLES, REGULARITY_SEED ^ 1)?;
        let solution = if n <= 3 && !self.force_fraction_free {
            Some((adjugate_solve(&self.hessian, w), SolveMethod::Adjugate))
        } else {
            fraction_free_solve(&self.hessian, w, &spot).map(|v| (v, SolveMethod::FractionFree))
        };
        let Some((solution, method)) = solution else {
            return Ok(GSolve { method: SolveMethod::PerPoint, solution: Vec::new(), spot_residual: None });
        };
        let check = |p: &SamplePoint| -> Result<f64, EvalError> {
            let g = self.hessian_at(p)?;
            let v: Vec<f64> = solution.iter().map(|e| eval(e, p)).collect::<Result<_, _>>()?;
            let wv: Vec<f64> = w.iter().map(|e| eval(e, p)).collect::<Result<_, _>>()?;
            let gv = g * DVector::from_column_slice(&v);
            Ok((0..n).map(|i| scaled_residual(gv[i], wv[i])).fold(0.0, f64::max))
        };
        let mut spot_residual: Option<f64> = Some(0.0);
        for p in &spot {
            match check(p) {
                Ok(r) => spot_residual = spot_residual.map(|m| m.max(r)),
                Err(EvalError::Unbound(_)) => {
                    spot_residual = None;
                    break;
                }
                // a point on a singular set of w itself
                Err(EvalError::Domain { .. }) => {}
            }
        }
        Ok(GSolve { method, solution, spot_residual })
    }
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    match n {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        2 => sub(product([m[0][0].clone(), m[1][1].clone()]), product([m[0][1].clone(), m[1][0].clone()])),
        _ => sum((0..n).map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            product([Expr::constant(sign), m[0][j].clone(), determinant(&minor(m, 0, j))])
        })),
    }
}

fn minor(m: &[Vec<Expr>], row: usize, col: usize) -> Vec<Vec<Expr>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, e)| e.clone()).collect())
        .collect()
}

fn adjugate_solve(g: &[Vec<Expr>], w: &[Expr]) -> Vec<Expr> {
    let n = g.len();
    let det = determinant(g);
    (0..n)
        .map(|i| {
            // row i of adj(g) is column i of the cofactor matrix
            let num = sum((0..n).map(|j| {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                product([Expr::constant(sign), determinant(&minor(g, j, i)), w[j].clone()])
            }));
            quotient(num, det.clone())
        })
        .collect()
}

fn numerically_nonzero(e: &Expr, points: &[SamplePoint]) -> bool {
    points.iter().any(|p| eval(e, p).is_ok_and(|v| v.abs() > REGULARITY_THRESHOLD))
}

/// Bareiss elimination on `[g | w]` with row swaps chosen by numeric pivot
/// viability; `None` if some column has no usable pivot.
fn fraction_free_solve(g: &[Vec<Expr>], w: &[Expr], points: &[SamplePoint]) -> Option<Vec<Expr>> {
    let n = g.len();
    let mut m: Vec<Vec<Expr>> = g.iter().zip(w).map(|(row, wi)| {
        let mut r = row.clone();
        r.push(wi.clone());
        r
    }).collect();
    let mut prev = Expr::one();
    for k in 0..n {
        let pivot = (k..n).find(|&r| numerically_nonzero(&m[r][k], points))?;
        m.swap(k, pivot);
        for i in k + 1..n {
            for j in k + 1..=n {
                let num = sub(product([m[k][k].clone(), m[i][j].clone()]), product([m[i][k].clone(), m[k][j].clone()]));
                m[i][j] = quotient(num, prev.clone());
            }
            m[i][k] = Expr::zero();
        }
        prev = m[k][k].clone();
    }
    let mut x = vec![Expr::zero(); n];
    for i in (0..n).rev() {
        let mut acc = vec![m[i][n].clone()];
        for j in i + 1..n {
            acc.push(-(m[i][j].clone() * x[j].clone()));
        }
        x[i] = quotient(sum(acc), m[i][i].clone());
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::identity::{equal_numeric, CheckConfig};
    use crate::expr::parse;

    fn free_particle() -> LagrangianSystem {
        let a = Alphabet::with_coords(&["q"]);
        LagrangianSystem::builder("free", a.clone(), parse("qdot^2/2", &a).unwrap()).build().unwrap()
    }

    #[test]
    fn free_particle_structure() {
        let s = free_particle();
        assert!(s.hessian()[0][0].is_one());
        assert!(s.accel()[0].is_zero());
        assert_eq!(s.accel_method(), SolveMethod::Adjugate);
    }

    #[test]
    fn isochrony_normal_form() {
        let a = Alphabet::with_coords(&["x", "y"]).function("G");
        let l = parse("xdot*ydot - G(x)*y", &a).unwrap();
        let s = LagrangianSystem::builder("iso", a.clone(), l).build().unwrap();
        let g = s.hessian();
        assert!(g[0][0].is_zero() && g[1][1].is_zero());
        assert!(g[0][1].is_one() && g[1][0].is_one());
        assert_eq!(s.accel()[0], parse("-G(x)", &a).unwrap());
        assert_eq!(s.accel()[1], parse("-G'(x)*y", &a).unwrap());
    }

    #[test]
    fn degenerate_lagrangian_rejected() {
        let a = Alphabet::new(1);
        let err = LagrangianSystem::builder("deg", a.clone(), parse("qdot1", &a).unwrap()).build().unwrap_err();
        assert!(matches!(err, MechanicsError::SingularHessian { .. }));
        let err = LagrangianSystem::builder("acc", a.clone(), parse("qddot1^2", &a).unwrap()).build().unwrap_err();
        assert_eq!(err, MechanicsError::AccelerationInLagrangian);
    }

    #[test]
    fn identity_hessian_leaves_vector_unchanged() {
        let s = free_particle();
        let w = vec![parse("q*t + sin(qdot)", s.alphabet()).unwrap()];
        let solved = s.invert_g_apply(&w).unwrap();
        assert_eq!(solved.solution, w);
        assert!(solved.spot_residual.unwrap() < 1e-14);
    }

    #[test]
    fn fraction_free_matches_adjugate() {
        let a = Alphabet::new(3);
        let l = parse("qdot1^2 + qdot1*qdot2*q3 + (2 + q1^2)*qdot2^2/2 + qdot3^2*exp(q2)/2 + qdot1*qdot3/4 - q1*q2", &a).unwrap();
        let adj = LagrangianSystem::builder("m", a.clone(), l.clone()).build().unwrap();
        let ff = LagrangianSystem::builder("m", a, l).fraction_free().build().unwrap();
        assert_eq!(ff.accel_method(), SolveMethod::FractionFree);
        let cfg = CheckConfig::default();
        for i in 0..3 {
            let r = equal_numeric(&adj.accel()[i], &ff.accel()[i], adj.domain(), &cfg).unwrap();
            assert!(r.passed(), "component {i}: {}", r.max_residual);
        }
    }

    #[test]
    fn el_residual_cross_check() {
        let a = Alphabet::new(2);
        let l = parse("(qdot1^2 + qdot2^2)/2 + qdot1*q2 - q1^2*q2", &a).unwrap();
        let s = LagrangianSystem::builder("m", a, l).build().unwrap();
        let p = s.point(0.3, &[0.5, -1.0], &[1.5, 0.2], &[0.7, -0.4]);
        let r1 = s.el_residual(&p).unwrap();
        let r2 = s.el_residual_via_hessian(&p).unwrap();
        for (x, y) in r1.iter().zip(&r2) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
