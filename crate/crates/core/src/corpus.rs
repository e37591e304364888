//! Worked systems with their first integrals and named solution triples:
//! the free particle, the isochrony family `L = ẋẏ − G(x)y`, and Kepler's
//! problem with the Laplace-Runge-Lenz vector.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::expr::identity::{vanishes, CheckConfig, IdentityReport, SamplingDomain, SamplingError};
use crate::expr::{diff, parse, total_dt, Alphabet, DtMode, Expr, FunctionBinding, Var};
use crate::mechanics::{LagrangianSystem, MechanicsError};
use crate::noether::{solve_onflow, FirstIntegral, Form, NoetherError, Triple};

pub const DEFAULT_MU: f64 = 1.0;
pub const DEFAULT_U: [f64; 3] = [0.3, -0.2, 0.5];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorpusError {
    #[error("unknown corpus entry `{0}`")]
    Unknown(String),
    #[error("G = {choice} requires {requirement}, got c = {c}")]
    InvalidG { choice: GChoice, c: f64, requirement: &'static str },
    #[error("corpus integral `{0}` failed its conservation check")]
    NotConserved(String),
    #[error(transparent)]
    Mechanics(#[from] MechanicsError),
    #[error(transparent)]
    Noether(#[from] NoetherError),
}

/// Basis solutions of `(c + x²) G'' + 3x G' − 3G = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GChoice {
    /// `G = x`, any `c`.
    Linear,
    /// `G = 1/x³`, `c = 0`.
    InverseCube,
    /// `G = (c + 2x²)/√(c + x²)`, `c > 0`.
    RadicalPositive,
    /// `G = (−c − 2x²)/√(−c − x²)`, `c < 0`, defined for `|x| < √(−c)`.
    RadicalNegative,
}

impl GChoice {
    pub const ALL: [GChoice; 4] = [GChoice::Linear, GChoice::InverseCube, GChoice::RadicalPositive, GChoice::RadicalNegative];

    pub fn name(self) -> &'static str {
        match self {
            GChoice::Linear => "linear",
            GChoice::InverseCube => "inverse-cube",
            GChoice::RadicalPositive => "radical-pos",
            GChoice::RadicalNegative => "radical-neg",
        }
    }

    /// Body in the formal argument `u`, possibly using the parameter `c`.
    pub fn body(self) -> &'static str {
        match self {
            GChoice::Linear => "u",
            GChoice::InverseCube => "u^(-3)",
            GChoice::RadicalPositive => "(c + 2*u^2)/sqrt(c + u^2)",
            GChoice::RadicalNegative => "(-c - 2*u^2)/sqrt(-c - u^2)",
        }
    }

    /// An antiderivative of `G` in terms of `x`.
    pub fn antiderivative(self) -> &'static str {
        match self {
            GChoice::Linear => "x^2/2",
            GChoice::InverseCube => "-1/(2*x^2)",
            GChoice::RadicalPositive => "x*sqrt(c + x^2)",
            GChoice::RadicalNegative => "x*sqrt(-c - x^2)",
        }
    }

    /// Value of `c` used when none is given.
    pub fn default_c(self) -> f64 {
        match self {
            GChoice::Linear | GChoice::RadicalPositive => 1.0,
            GChoice::InverseCube => 0.0,
            GChoice::RadicalNegative => -1.0,
        }
    }

    fn validate(self, c: f64) -> Result<(), CorpusError> {
        let (ok, requirement) = match self {
            GChoice::Linear => (c.is_finite(), "a finite c"),
            GChoice::InverseCube => (c == 0.0, "c = 0"),
            GChoice::RadicalPositive => (c > 0.0, "c > 0"),
            GChoice::RadicalNegative => (c < 0.0, "c < 0"),
        };
        if ok {
            Ok(())
        } else {
            Err(CorpusError::InvalidG { choice: self, c, requirement })
        }
    }
}

impl fmt::Display for GChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GChoice {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<GChoice, CorpusError> {
        GChoice::ALL.into_iter().find(|g| g.name() == s).ok_or_else(|| CorpusError::Unknown(format!("isochrony:{s}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CorpusName {
    FreeParticle,
    Isochrony { g: GChoice, c: f64 },
    Kepler3d,
}

impl CorpusName {
    /// One representative per entry and G-choice.
    pub fn all() -> Vec<CorpusName> {
        let mut out = vec![CorpusName::FreeParticle];
        out.extend(GChoice::ALL.map(|g| CorpusName::Isochrony { g, c: g.default_c() }));
        out.push(CorpusName::Kepler3d);
        out
    }
}

impl fmt::Display for CorpusName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusName::FreeParticle => f.write_str("freeparticle"),
            CorpusName::Isochrony { g, c } => write!(f, "isochrony:{g}:{c}"),
            CorpusName::Kepler3d => f.write_str("kepler3d"),
        }
    }
}

/// `freeparticle`, `kepler3d`, `isochrony` (inverse cube, `c = 0`),
/// `isochrony:<g>` or `isochrony:<g>:<c>`.
impl FromStr for CorpusName {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<CorpusName, CorpusError> {
        let mut parts = s.trim().split(':');
        match parts.next() {
            Some("freeparticle") if parts.clone().next().is_none() => Ok(CorpusName::FreeParticle),
            Some("kepler3d") if parts.clone().next().is_none() => Ok(CorpusName::Kepler3d),
            Some("isochrony") => {
                let g: GChoice = parts.next().map_or(Ok(GChoice::InverseCube), str::parse)?;
                let c = match parts.next() {
                    Some(text) => text.parse().map_err(|_| CorpusError::Unknown(s.to_string()))?,
                    None => g.default_c(),
                };
                if parts.next().is_some() {
                    return Err(CorpusError::Unknown(s.to_string()));
                }
                Ok(CorpusName::Isochrony { g, c })
            }
            _ => Err(CorpusError::Unknown(s.to_string())),
        }
    }
}

#[derive(Clone, Debug)]
pub struct NamedTriple {
    pub name: String,
    pub triple: Triple,
    /// Name of the corpus integral this triple generates.
    pub integral: String,
    /// First integral attached to the underlying Lie symmetry, where known.
    pub lie_integral: Option<Expr>,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: CorpusName,
    pub system: LagrangianSystem,
    pub integrals: Vec<FirstIntegral>,
    pub triples: Vec<NamedTriple>,
    pub notes: Vec<String>,
}

impl CorpusEntry {
    pub fn integral(&self, name: &str) -> Option<&FirstIntegral> {
        self.integrals.iter().find(|n| n.name() == name)
    }

    pub fn triple(&self, name: &str) -> Option<&NamedTriple> {
        self.triples.iter().find(|t| t.name == name)
    }

    /// Parse an expression in this entry's alphabet.
    ///
    /// # Panics
    /// If `text` does not parse.
    pub fn expr(&self, text: &str) -> Expr {
        parse(text, self.system.alphabet()).unwrap_or_else(|e| panic!("`{text}`: {e}"))
    }
}

pub fn load(name: CorpusName) -> Result<CorpusEntry, CorpusError> {
    match name {
        CorpusName::FreeParticle => free_particle(),
        CorpusName::Isochrony { g, c } => isochrony(g, c),
        CorpusName::Kepler3d => kepler3d(),
    }
}

struct Builder {
    name: CorpusName,
    system: LagrangianSystem,
    integrals: Vec<FirstIntegral>,
    triples: Vec<NamedTriple>,
    notes: Vec<String>,
}

impl Builder {
    fn expr(&self, text: &str) -> Expr {
        parse(text, self.system.alphabet()).unwrap_or_else(|e| panic!("corpus expression `{text}`: {e}"))
    }

    fn integral(&mut self, name: &str, e: Expr) -> Result<(), CorpusError> {
        let n = FirstIntegral::check(&self.system, name, e, &CheckConfig::default())?;
        if !n.is_verified() {
            return Err(CorpusError::NotConserved(name.to_string()));
        }
        self.integrals.push(n);
        Ok(())
    }

    fn integral_text(&mut self, name: &str, text: &str) -> Result<(), CorpusError> {
        let e = self.expr(text);
        self.integral(name, e)
    }

    fn get(&self, name: &str) -> &FirstIntegral {
        self.integrals.iter().find(|n| n.name() == name).expect("integral registered above")
    }

    fn triple(&mut self, name: &str, triple: Triple, integral: &str, lie: Option<&str>) {
        let lie_integral = lie.map(|s| self.expr(s));
        self.triples.push(NamedTriple { name: name.to_string(), triple, integral: integral.to_string(), lie_integral });
    }

    fn triple_text(&mut self, name: &str, parts: (&str, &[&str], &str), form: Form, integral: &str, lie: Option<&str>) {
        let (tau, xi, f) = parts;
        let t = Triple::new(self.expr(tau), xi.iter().map(|x| self.expr(x)).collect(), self.expr(f), form);
        self.triple(name, t, integral, lie);
    }

    fn finish(self) -> CorpusEntry {
        CorpusEntry { name: self.name, system: self.system, integrals: self.integrals, triples: self.triples, notes: self.notes }
    }
}

fn free_particle() -> Result<CorpusEntry, CorpusError> {
    let a = Alphabet::with_coords(&["q"]);
    let system = LagrangianSystem::builder("freeparticle", a.clone(), parse("qdot^2/2", &a).expect("literal")).build()?;
    let mut b = Builder { name: CorpusName::FreeParticle, system, integrals: vec![], triples: vec![], notes: vec![] };
    b.integral_text("momentum", "-qdot")?;
    b.integral_text("galilei", "q - t*qdot")?;
    b.integral_text("energy", "qdot^2/2")?;
    b.integral_text("dilation", "(t*qdot - q)*qdot")?;
    b.integral_text("projective", "(q - t*qdot)^2/2")?;

    b.triple_text("gamma1", ("0", &["1"], "0"), Form::Strong, "momentum", Some("qdot"));
    b.triple_text("gamma2", ("0", &["t"], "q"), Form::Strong, "galilei", Some("t*qdot - q"));
    b.triple_text("gamma3", ("1", &["0"], "0"), Form::Strong, "energy", Some("qdot"));
    b.triple_text("gamma4", ("2*t", &["q"], "0"), Form::Strong, "dilation", Some("(t*qdot - q)*qdot"));
    b.triple_text("gamma5", ("t^2", &["t*q"], "q^2/2"), Form::Strong, "projective", Some("t*qdot - q"));

    // the remaining Lie symmetries only admit on-flow completions
    let n = b.get("galilei").clone();
    let lie = "(t*qdot - q)/qdot";
    for (name, tau, xi) in [("gamma6", "0", "q"), ("gamma7", "q", "0"), ("gamma8", "q*t", "q^2")] {
        let t = solve_onflow(&b.system, &n, b.expr(tau), vec![b.expr(xi)])?;
        b.triple(name, t, "galilei", Some(lie));
    }
    b.notes.push("gamma1..gamma5 are strong solutions; gamma6..gamma8 are completed on-flow with N = q - t*qdot".into());
    b.notes.push("the Lie first integral column is kept for reference and not used in checks".into());
    Ok(b.finish())
}

fn isochrony(g: GChoice, c: f64) -> Result<CorpusEntry, CorpusError> {
    g.validate(c)?;
    let a = Alphabet::with_coords(&["x", "y"]).param("c").function("G");
    let params = vec!["c".to_string()];
    let binding = FunctionBinding::parse(g.body(), "u", &params).expect("literal binding");
    let mut builder = LagrangianSystem::builder("isochrony", a.clone(), parse("xdot*ydot - G(x)*y", &a).expect("literal"))
        .param("c", c)
        .function("G", binding);
    match g {
        // near the pole, terms of size |x|^-5 cancel to O(1) and swamp the tolerance
        GChoice::InverseCube => builder = builder.singular(parse("x", &a).expect("literal")).coord_range(0, 0.25, 2.0),
        GChoice::RadicalPositive => builder = builder.singular(parse("c + x^2", &a).expect("literal")),
        GChoice::RadicalNegative => {
            let edge = (-c).sqrt();
            builder = builder.singular(parse("-c - x^2", &a).expect("literal")).coord_range(0, -edge, edge);
        }
        GChoice::Linear => {}
    }
    let system = builder.build()?;
    let mut b = Builder { name: CorpusName::Isochrony { g, c }, system, integrals: vec![], triples: vec![], notes: vec![] };
    b.integral_text("n1", "xdot*ydot + G(x)*y")?;
    b.integral_text("n2", &format!("xdot^2/2 + {}", g.antiderivative()))?;
    b.integral_text("n3", "(c + x^2)*G'(x)*xdot*y - (c + x^2)*G(x)*ydot - x*xdot^2*ydot + xdot^3*y")?;

    b.triple_text("n1_strong", ("1", &["0", "0"], "0"), Form::Strong, "n1", None);
    b.triple_text(
        "n2_strong",
        ("0", &["0", "-xdot"], &format!("-xdot^2/2 + {}", g.antiderivative())),
        Form::Strong,
        "n2",
        None,
    );
    // xi = (h, 0) with f = y*dh/dt taken along the flow
    let h = b.expr("(c + x^2)*G(x) + x*xdot^2");
    let h_dot = total_dt(&h, 2, DtMode::OnFlow(b.system.accel())).expect("h is free of accelerations");
    let onflow = Triple::new(Expr::zero(), vec![h, Expr::zero()], Expr::q(1) * h_dot, Form::OnFlow);
    b.triple("n3_onflow", onflow, "n3", None);
    let strong = isochrony_n3_strong(&b.system, Expr::zero());
    b.triple("n3_strong", strong, "n3", None);

    b.notes.push(format!("G(x) = {} with c = {c}", g.body().replace('u', "x")));
    b.notes.push("g^-1 d(n2)/d(qdot) computed directly is (0, xdot)".into());
    b.notes.push("n3_strong is the T = 0 member of the strong family for n3; see isochrony_n3_strong".into());
    Ok(b.finish())
}

/// Strong solutions for `N₃` with arbitrary time change `T`.
pub fn isochrony_n3_strong(sys: &LagrangianSystem, t: Expr) -> Triple {
    let e = |s: &str| parse(s, sys.alphabet()).expect("literal");
    let (xdot, ydot, y) = (Expr::qdot(0), Expr::qdot(1), Expr::q(1));
    let xi = vec![
        e("(c + x^2)*G(x)") + (&t + e("x*xdot")) * &xdot,
        e("-y*(c + x^2)*G'(x) - 3*xdot^2*y + 2*x*xdot*ydot") + &t * &ydot,
    ];
    let f = (&t + e("2*x*xdot")) * &xdot * &ydot - e("2*xdot^3*y") - e("G(x)") * &t * &y;
    Triple::new(t, xi, f, Form::Strong)
}

/// `(0, (c + x²)G'(x)y + (3ẋy − 2xẏ)ẋ)`: the difference between the on-flow
/// `N₃` triple's `ξ` and the strong `ξ` with the same `τ = 0`.
pub fn isochrony_n3_strongness_gap(sys: &LagrangianSystem) -> Vec<Expr> {
    let e = |s: &str| parse(s, sys.alphabet()).expect("literal");
    vec![Expr::zero(), e("(c + x^2)*G'(x)*y + (3*xdot*y - 2*x*ydot)*xdot")]
}

/// `(c + x²)G'' + 3xG' − 3G` for a concrete `G` in the first coordinate.
pub fn g_ode_residual(g: &Expr, c: f64) -> Expr {
    let x = Expr::q(0);
    let g1 = diff(g, Var::Coord(0));
    let g2 = diff(&g1, Var::Coord(0));
    (c + x.powi(2)) * g2 + 3.0 * x * g1 - 3.0 * g
}

/// Numeric check that `G(x)` solves the linear ODE selecting the
/// superintegrable cases. `x` is sampled in `[-2, 2]`, away from the
/// singular points of the residual.
pub fn check_g_ode(g: &Expr, c: f64, config: &CheckConfig) -> Result<IdentityReport, SamplingError> {
    vanishes(&g_ode_residual(g, c), &SamplingDomain::new(1), config)
}

fn cross(a: &[Expr], b: &[Expr]) -> Vec<Expr> {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn dot3(a: &[Expr], b: &[Expr]) -> Expr {
    crate::expr::dot(a, b)
}

fn scale3(s: &Expr, a: &[Expr]) -> Vec<Expr> {
    a.iter().map(|x| s * x).collect()
}

fn add3(a: &[Expr], b: &[Expr]) -> Vec<Expr> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Vectors used by the Kepler formulas.
pub struct KeplerVectors {
    pub r: Vec<Expr>,
    pub v: Vec<Expr>,
    pub u: Vec<Expr>,
    pub mu: Expr,
    /// `|r|`.
    pub norm_r: Expr,
    /// `v × (r × v)`.
    pub vrv: Vec<Expr>,
    /// Laplace-Runge-Lenz vector `v × (r × v) − μ r/|r|`.
    pub lrl: Vec<Expr>,
    /// `f₀ = μ r·u/|r|`.
    pub f0: Expr,
}

impl KeplerVectors {
    pub fn new() -> KeplerVectors {
        let r: Vec<Expr> = (0..3).map(Expr::q).collect();
        let v: Vec<Expr> = (0..3).map(Expr::qdot).collect();
        let u: Vec<Expr> = ["u1", "u2", "u3"].iter().map(|n| Expr::param(n)).collect();
        let mu = Expr::param("mu");
        let norm_r = dot3(&r, &r).sqrt();
        let vrv = cross(&v, &cross(&r, &v));
        let mu_r = scale3(&(&mu / &norm_r), &r);
        let lrl = vrv.iter().zip(&mu_r).map(|(a, b)| a - b).collect();
        let f0 = &mu * dot3(&r, &u) / &norm_r;
        KeplerVectors { r, v, u, mu, norm_r, vrv, lrl, f0 }
    }

    /// `−u·A`.
    pub fn lrl_u(&self) -> Expr {
        -dot3(&self.u, &self.lrl)
    }
}

impl Default for KeplerVectors {
    fn default() -> Self {
        KeplerVectors::new()
    }
}

/// On-flow family with boundary term `h`, obtained from the `(0, ξ_Z, f₀)`
/// triple by the multiplicity transform:
/// `τ = (h − f₀)/L`, `Ξ = (r × v) × u + τ v`, `f = h`.
pub fn kepler_lrl_family(sys: &LagrangianSystem, h: Expr) -> Triple {
    let k = KeplerVectors::new();
    let tau = (&h - &k.f0) / sys.lagrangian();
    let xi = add3(&cross(&cross(&k.r, &k.v), &k.u), &scale3(&tau, &k.v));
    Triple::new(tau, xi, h, Form::OnFlow)
}

/// Strong solutions for `−u·A` with boundary term `h`, built on
/// `b = −u(r·v) − r(v·u) + v(u·r)`.
pub fn kepler_strong_family(sys: &LagrangianSystem, h: Expr) -> Triple {
    let k = KeplerVectors::new();
    let l = sys.lagrangian();
    let b: Vec<Expr> = (0..3)
        .map(|i| {
            -(&k.u[i] * dot3(&k.r, &k.v)) - &k.r[i] * dot3(&k.v, &k.u) + &k.v[i] * dot3(&k.u, &k.r)
        })
        .collect();
    let mu_r = scale3(&(&k.mu / &k.norm_r), &k.r);
    let tau = (&h - dot3(&k.u, &add3(&k.vrv, &mu_r))) / l;
    let vbv = cross(&k.v, &cross(&b, &k.v));
    let xi = (0..3)
        .map(|i| (&h * &k.v[i] + 0.5 * &vbv[i] + &k.mu * &b[i] / &k.norm_r) / l)
        .collect();
    Triple::new(tau, xi, h, Form::Strong)
}

fn kepler3d() -> Result<CorpusEntry, CorpusError> {
    let a = Alphabet::with_coords(&["r1", "r2", "r3"]).params(&["mu", "u1", "u2", "u3"]);
    let l = parse("(r1dot^2 + r2dot^2 + r3dot^2)/2 + mu/sqrt(r1^2 + r2^2 + r3^2)", &a).expect("literal");
    let system = LagrangianSystem::builder("kepler3d", a.clone(), l)
        .param("mu", DEFAULT_MU)
        .param("u1", DEFAULT_U[0])
        .param("u2", DEFAULT_U[1])
        .param("u3", DEFAULT_U[2])
        .singular(parse("r1^2 + r2^2 + r3^2", &a).expect("literal"))
        .build()?;
    let mut b = Builder { name: CorpusName::Kepler3d, system, integrals: vec![], triples: vec![], notes: vec![] };
    let k = KeplerVectors::new();

    b.integral_text("energy", "(r1dot^2 + r2dot^2 + r3dot^2)/2 - mu/sqrt(r1^2 + r2^2 + r3^2)")?;
    for (i, m) in cross(&k.r, &k.v).into_iter().enumerate() {
        b.integral(&format!("l{}", i + 1), m)?;
    }
    for (i, a_i) in k.lrl.iter().enumerate() {
        b.integral(&format!("a{}", i + 1), a_i.clone())?;
    }
    b.integral("lrl_u", k.lrl_u())?;

    let l = b.system.lagrangian().clone();
    let tau0 = dot3(&k.u, &k.vrv) / &l;
    b.triple("tau0", Triple::new(tau0.clone(), scale3(&tau0, &k.v), k.f0.clone(), Form::OnFlow), "lrl_u", None);

    let grad: Vec<Expr> = (0..3).map(|i| -0.5 * diff(&k.lrl_u(), Var::Vel(i))).collect();
    b.triple("levy_leblond", Triple::new(Expr::zero(), grad, k.f0.clone(), Form::OnFlow), "lrl_u", None);

    let xi_z = cross(&cross(&k.r, &k.v), &k.u);
    b.triple("xi_z", Triple::new(Expr::zero(), xi_z, k.f0.clone(), Form::OnFlow), "lrl_u", None);

    let family = kepler_lrl_family(&b.system, Expr::zero());
    b.triple("lrl_family", family, "lrl_u", None);
    let strong = kepler_strong_family(&b.system, Expr::zero());
    b.triple("lrl_strong", strong, "lrl_u", None);

    b.notes.push(format!("mu = {DEFAULT_MU}, u = ({}, {}, {})", DEFAULT_U[0], DEFAULT_U[1], DEFAULT_U[2]));
    b.notes.push("lrl_family and lrl_strong are the h = 0 members; see kepler_lrl_family and kepler_strong_family".into());
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::identity::equal_numeric;

    #[test]
    fn names_round_trip() {
        for name in CorpusName::all() {
            assert_eq!(name.to_string().parse::<CorpusName>().unwrap(), name);
        }
        assert_eq!("isochrony".parse::<CorpusName>().unwrap(), CorpusName::Isochrony { g: GChoice::InverseCube, c: 0.0 });
        assert!("pendulum".parse::<CorpusName>().is_err());
    }

    #[test]
    fn invalid_g_and_c() {
        let err = load(CorpusName::Isochrony { g: GChoice::InverseCube, c: 1.0 }).unwrap_err();
        assert!(matches!(err, CorpusError::InvalidG { .. }));
        assert!(load(CorpusName::Isochrony { g: GChoice::RadicalNegative, c: 2.0 }).is_err());
    }

    #[test]
    fn g_ode_examples() {
        let a = Alphabet::with_coords(&["x"]);
        let cfg = CheckConfig::default();
        assert!(check_g_ode(&parse("x", &a).unwrap(), 3.0, &cfg).unwrap().passed());
        assert!(check_g_ode(&parse("1/x^3", &a).unwrap(), 0.0, &cfg).unwrap().passed());
        assert!(!check_g_ode(&parse("x^2", &a).unwrap(), 1.0, &cfg).unwrap().passed());
    }

    #[test]
    fn kepler_normal_form() {
        let e = load(CorpusName::Kepler3d).unwrap();
        let expected = e.expr("-mu*r1/(r1^2 + r2^2 + r3^2)^(3/2)");
        assert!(equal_numeric(&e.system.accel()[0], &expected, e.system.domain(), &CheckConfig::default()).unwrap().passed());
        assert_eq!(e.integrals.len(), 8);
    }
}
