//! Randomized numeric identity testing.
//!
//! Two expressions are compared at `k` random points of a sampling box that
//! avoids declared singular sets. A FAIL carries a concrete witness and is
//! conclusive; a PASS is probabilistic evidence of an identity.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{eval, EvalError, Expr, FunctionBinding, SamplePoint};

pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 0x006e_6f65_7468_6572;
pub const SINGULAR_EXCLUSION: f64 = 1e-3;
pub const MAX_DRAWS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplingError {
    #[error("no admissible sample point after {draws} draws (point {index})")]
    Exhausted { index: usize, draws: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Box to sample from, fixed parameter values, function bindings and the
/// singular sets to keep away from.
#[derive(Clone, Debug)]
pub struct SamplingDomain {
    pub time: (f64, f64),
    pub coords: Vec<(f64, f64)>,
    pub velocities: Vec<(f64, f64)>,
    pub accelerations: Vec<(f64, f64)>,
    pub params: BTreeMap<String, f64>,
    pub functions: BTreeMap<String, FunctionBinding>,
    pub singular: Vec<Expr>,
    pub exclusion: f64,
    pub max_draws: usize,
}

impl SamplingDomain {
    /// Coordinates and velocities in `[-2, 2]`, `t` in `[0, 2]`.
    pub fn new(dim: usize) -> SamplingDomain {
        SamplingDomain {
            time: (0.0, 2.0),
            coords: vec![(-2.0, 2.0); dim],
            velocities: vec![(-2.0, 2.0); dim],
            accelerations: vec![(-2.0, 2.0); dim],
            params: BTreeMap::new(),
            functions: BTreeMap::new(),
            singular: Vec::new(),
            exclusion: SINGULAR_EXCLUSION,
            max_draws: MAX_DRAWS,
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn with_singular(mut self, extra: impl IntoIterator<Item = Expr>) -> SamplingDomain {
        for e in extra {
            if !self.singular.contains(&e) {
                self.singular.push(e);
            }
        }
        self
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> SamplePoint {
        let mut uniform = |(lo, hi): (f64, f64)| if hi > lo { rng.random_range(lo..hi) } else { lo };
        SamplePoint {
            t: uniform(self.time),
            q: self.coords.iter().map(|r| uniform(*r)).collect(),
            qdot: self.velocities.iter().map(|r| uniform(*r)).collect(),
            qddot: self.accelerations.iter().map(|r| uniform(*r)).collect(),
            params: self.params.clone(),
            functions: self.functions.clone(),
            arg: None,
        }
    }

    /// True if `p` keeps at least `exclusion` away from every singular set.
    pub fn admissible(&self, p: &SamplePoint) -> Result<bool, EvalError> {
        for s in &self.singular {
            match eval(s, p) {
                Ok(v) if v.abs() >= self.exclusion => {}
                Ok(_) | Err(EvalError::Domain { .. }) => return Ok(false),
                Err(e) => return Err(e),
            }
        }
        Ok(true)
    }

    /// Draw `k` admissible points and evaluate `f` at each. Points where `f`
    /// reports a domain violation are redrawn. Deterministic in `seed`.
    pub fn sample_map<T, F>(&self, k: usize, seed: u64, f: F) -> Result<Vec<(SamplePoint, T)>, SamplingError>
    where
        T: Send,
        F: Fn(&SamplePoint) -> Result<T, EvalError> + Sync,
    {
        (0..k)
            .into_par_iter()
            .map(|index| {
                let mut rng = ChaCha8Rng::seed_from_u64(point_seed(seed, index as u64));
                for _ in 0..self.max_draws {
                    let p = self.draw(&mut rng);
                    if !self.admissible(&p)? {
                        continue;
                    }
                    match f(&p) {
                        Ok(v) => return Ok((p, v)),
                        Err(EvalError::Domain { .. }) => continue,
                        Err(e) => return Err(e.into()),
                    }
                }
                Err(SamplingError::Exhausted { index, draws: self.max_draws })
            })
            .collect()
    }

    pub fn sample_points(&self, k: usize, seed: u64) -> Result<Vec<SamplePoint>, SamplingError> {
        Ok(self.sample_map(k, seed, |_| Ok(()))?.into_iter().map(|(p, _)| p).collect())
    }
}

/// splitmix64 over the seed and point index.
fn point_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub k: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { k: DEFAULT_SAMPLES, tol: DEFAULT_TOLERANCE, seed: DEFAULT_SEED }
    }
}

impl CheckConfig {
    pub fn with_seed(self, seed: u64) -> CheckConfig {
        CheckConfig { seed, ..self }
    }

    pub fn with_tol(self, tol: f64) -> CheckConfig {
        CheckConfig { tol, ..self }
    }

    pub fn with_k(self, k: usize) -> CheckConfig {
        CheckConfig { k, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub verdict: Verdict,
    pub config: CheckConfig,
    /// Largest `|a - b| / (1 + max(|a|, |b|))` over the sample.
    pub max_residual: f64,
    pub worst_point: SamplePoint,
    /// `(a, b)` at the worst point.
    pub worst_values: (f64, f64),
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

/// Scaled residual used by every identity check.
pub fn scaled_residual(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

/// Compare `a` and `b` at `config.k` admissible points. Denominators of both
/// expressions are added to the singular sets automatically.
pub fn equal_numeric(
    a: &Expr,
    b: &Expr,
    domain: &SamplingDomain,
    config: &CheckConfig,
) -> Result<IdentityReport, SamplingError> {
    assert!(config.k >= 1, "identity check needs at least one sample point");
    let domain = domain.clone().with_singular(a.singular_factors()).with_singular(b.singular_factors());
    let samples = domain.sample_map(config.k, config.seed, |p| Ok((eval(a, p)?, eval(b, p)?)))?;
    let mut worst = 0;
    let mut max_residual = -1.0;
    for (i, (_, (va, vb))) in samples.iter().enumerate() {
        let r = scaled_residual(*va, *vb);
        if r > max_residual {
            max_residual = r;
            worst = i;
        }
    }
    let (worst_point, worst_values) = samples.into_iter().nth(worst).unwrap();
    let verdict = if max_residual <= config.tol { Verdict::Pass } else { Verdict::Fail };
    Ok(IdentityReport { verdict, config: *config, max_residual, worst_point, worst_values })
}

/// `equal_numeric(e, 0)`.
pub fn vanishes(e: &Expr, domain: &SamplingDomain, config: &CheckConfig) -> Result<IdentityReport, SamplingError> {
    equal_numeric(e, &Expr::zero(), domain, config)
}

#[cfg(test)]
mod tests {
    use super::super::{parse, Alphabet};
    use super::*;

    #[test]
    fn square_identity_passes() {
        let a = Alphabet::new(1);
        let d = SamplingDomain::new(1);
        let r = equal_numeric(&parse("qdot1*qdot1", &a).unwrap(), &parse("qdot1^2", &a).unwrap(), &d, &CheckConfig::default()).unwrap();
        assert!(r.passed());
        assert!(r.max_residual <= 1e-15);
    }

    #[test]
    fn degree_mismatch_fails_with_witness() {
        let a = Alphabet::new(1);
        let d = SamplingDomain::new(1);
        let lhs = parse("qdot1^2", &a).unwrap();
        let rhs = parse("2*qdot1 - 1", &a).unwrap();
        let r = equal_numeric(&lhs, &rhs, &d, &CheckConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let (va, vb) = r.worst_values;
        assert_eq!(va, eval(&lhs, &r.worst_point).unwrap());
        assert_eq!(vb, eval(&rhs, &r.worst_point).unwrap());
        assert!(scaled_residual(va, vb) > 1e-9);
    }

    #[test]
    fn deterministic_in_seed() {
        let d = SamplingDomain::new(2);
        let p1 = d.sample_points(5, 7).unwrap();
        let p2 = d.sample_points(5, 7).unwrap();
        let p3 = d.sample_points(5, 8).unwrap();
        assert_eq!(p1.iter().map(|p| p.q.clone()).collect::<Vec<_>>(), p2.iter().map(|p| p.q.clone()).collect::<Vec<_>>());
        assert_ne!(p1[0].q, p3[0].q);
    }

    #[test]
    fn singular_sets_are_avoided() {
        let a = Alphabet::with_coords(&["x"]);
        let d = SamplingDomain::new(1);
        let e = parse("1/x^3", &a).unwrap();
        let pts = d.clone().with_singular(e.singular_factors()).sample_points(200, 1).unwrap();
        assert!(pts.iter().all(|p| p.q[0].powi(3).abs() >= 1e-3));
    }

    #[test]
    fn empty_domain_is_an_error() {
        let a = Alphabet::with_coords(&["x"]);
        let mut d = SamplingDomain::new(1);
        d.coords[0] = (-1e-4, 1e-4);
        d.max_draws = 50;
        let e = parse("1/x", &a).unwrap();
        assert!(matches!(equal_numeric(&e, &e, &d, &CheckConfig::default()), Err(SamplingError::Exhausted { .. })));
    }
}
