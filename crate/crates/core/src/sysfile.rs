//! Plain-text system and triple files.
//!
//! ```text
//! # comments start with '#'
//! [system]
//! name = isochrony
//! coords = x, y
//! params = c = 1
//! functions = G
//! lagrangian = xdot*ydot - G(x)*y
//! singular = x
//! range.x = 0.25, 2
//!
//! [bindings]
//! G = u^(-3)
//!
//! [integral]
//! name = n1
//! expr = xdot*ydot + G(x)*y
//!
//! [triple]
//! name = n1_strong
//! form = strong
//! tau = 1
//! xi = 0, 0
//! f = 0
//! ```
//!
//! A system file has one `[system]` section, at most one `[bindings]`
//! section and any number of `[integral]` and `[triple]` sections. A triple
//! file holds a single `[triple]` section. Binding bodies are written in the
//! formal argument `u`. Without `coords`, `dim = n` declares `q1..qn`.

use thiserror::Error;

use crate::corpus::CorpusEntry;
use crate::expr::identity::SamplingDomain;
use crate::expr::{parse, Alphabet, Expr, FunctionBinding, ParseError};
use crate::mechanics::{LagrangianSystem, MechanicsError};
use crate::noether::{Form, Triple};

/// Formal argument of function bindings.
pub const BINDING_ARG: &str = "u";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}, column {column}: {source}")]
    Expr { line: usize, column: usize, source: ParseError },
    #[error(transparent)]
    System(#[from] MechanicsError),
}

impl FileError {
    fn syntax(line: usize, message: impl Into<String>) -> FileError {
        FileError::Syntax { line, message: message.into() }
    }
}

#[derive(Debug)]
struct Entry {
    key: String,
    value: String,
    line: usize,
    /// 1-based column where `value` starts.
    col: usize,
}

#[derive(Debug)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    fn require(&self, key: &str) -> Result<&Entry, FileError> {
        self.get(key).ok_or_else(|| FileError::syntax(self.line, format!("[{}] needs `{key}`", self.name)))
    }
}

fn sections(text: &str) -> Result<Vec<Section>, FileError> {
    let mut out: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| FileError::syntax(line, "unterminated section header"))?;
            out.push(Section { name: name.trim().to_string(), line, entries: Vec::new() });
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| FileError::syntax(line, "expected `key = value`"))?;
        let section = out.last_mut().ok_or_else(|| FileError::syntax(line, "entry outside of any section"))?;
        let key = key.trim().to_string();
        if section.get(&key).is_some() {
            return Err(FileError::syntax(line, format!("duplicate key `{key}`")));
        }
        let value_start = value.as_ptr() as usize - raw.as_ptr() as usize + (value.len() - value.trim_start().len());
        section.entries.push(Entry { key, value: value.trim().to_string(), line, col: value_start + 1 });
    }
    Ok(out)
}

fn list(value: &str) -> Vec<&str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn number(text: &str, line: usize) -> Result<f64, FileError> {
    text.trim().parse().map_err(|_| FileError::syntax(line, format!("`{}` is not a number", text.trim())))
}

/// Parse `value`, a slice of `entry.value`, and map error columns back to
/// columns of the file line.
fn expr_at(value: &str, entry: &Entry, alphabet: &Alphabet) -> Result<Expr, FileError> {
    let offset = (value.as_ptr() as usize).saturating_sub(entry.value.as_ptr() as usize);
    parse(value, alphabet).map_err(|source| FileError::Expr { line: entry.line, column: entry.col + offset + source.column() - 1, source })
}

/// A parsed system file.
#[derive(Clone, Debug)]
pub struct SystemDocument {
    pub system: LagrangianSystem,
    pub integrals: Vec<(String, Expr)>,
    pub triples: Vec<(String, Triple)>,
}

impl SystemDocument {
    pub fn integral(&self, name: &str) -> Option<&Expr> {
        self.integrals.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    pub fn triple(&self, name: &str) -> Option<&Triple> {
        self.triples.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }
}

pub fn parse_system(text: &str) -> Result<SystemDocument, FileError> {
    let secs = sections(text)?;
    let mut systems = secs.iter().filter(|s| s.name == "system");
    let sys_sec = systems.next().ok_or_else(|| FileError::syntax(1, "missing [system] section"))?;
    if let Some(extra) = systems.next() {
        return Err(FileError::syntax(extra.line, "only one [system] section is allowed"));
    }
    for s in &secs {
        if !matches!(s.name.as_str(), "system" | "bindings" | "integral" | "triple") {
            return Err(FileError::syntax(s.line, format!("unknown section [{}]", s.name)));
        }
    }

    let mut alphabet = match (sys_sec.get("coords"), sys_sec.get("dim")) {
        (Some(c), _) => Alphabet::with_coords(&list(&c.value)),
        (None, Some(d)) => {
            let n: usize = d.value.parse().map_err(|_| FileError::syntax(d.line, "dim must be a positive integer"))?;
            Alphabet::new(n)
        }
        (None, None) => return Err(FileError::syntax(sys_sec.line, "[system] needs `coords` or `dim`")),
    };
    let mut params = Vec::new();
    if let Some(p) = sys_sec.get("params") {
        for item in list(&p.value) {
            let (name, value) = item.split_once('=').ok_or_else(|| FileError::syntax(p.line, format!("parameter `{item}` needs a value")))?;
            params.push((name.trim().to_string(), number(value, p.line)?));
        }
    }
    for (name, _) in &params {
        alphabet = alphabet.param(name);
    }
    let functions: Vec<String> = sys_sec.get("functions").map_or(Vec::new(), |f| list(&f.value).iter().map(|s| s.to_string()).collect());
    for f in &functions {
        alphabet = alphabet.function(f);
    }

    let lag = sys_sec.require("lagrangian")?;
    let name = sys_sec.get("name").map_or("system".to_string(), |e| e.value.clone());
    let mut builder = LagrangianSystem::builder(&name, alphabet.clone(), expr_at(&lag.value, lag, &alphabet)?);
    for (p, v) in &params {
        builder = builder.param(p, *v);
    }
    if let Some(s) = sys_sec.get("singular") {
        for item in list(&s.value) {
            builder = builder.singular(expr_at(item, s, &alphabet)?);
        }
    }
    for e in sys_sec.entries.iter().filter(|e| e.key.starts_with("range.")) {
        let var = &e.key["range.".len()..];
        let bounds = list(&e.value);
        let [lo, hi] = bounds[..] else {
            return Err(FileError::syntax(e.line, "a range is `lo, hi`"));
        };
        let (lo, hi) = (number(lo, e.line)?, number(hi, e.line)?);
        builder = match alphabet.lookup_var(var) {
            Some(crate::expr::Var::Time) => builder.time_range(lo, hi),
            Some(crate::expr::Var::Coord(i)) => builder.coord_range(i, lo, hi),
            Some(crate::expr::Var::Vel(i)) => builder.velocity_range(i, lo, hi),
            _ => return Err(FileError::syntax(e.line, format!("cannot set a range for `{var}`"))),
        };
    }
    let param_names: Vec<String> = params.iter().map(|(n, _)| n.clone()).collect();
    for s in secs.iter().filter(|s| s.name == "bindings") {
        for e in &s.entries {
            if !functions.contains(&e.key) {
                return Err(FileError::syntax(e.line, format!("binding for undeclared function `{}`", e.key)));
            }
            let b = FunctionBinding::parse(&e.value, BINDING_ARG, &param_names)
                .map_err(|source| FileError::Expr { line: e.line, column: source.column(), source })?;
            builder = builder.function(&e.key, b);
        }
    }
    let system = builder.build()?;

    let mut integrals = Vec::new();
    for s in secs.iter().filter(|s| s.name == "integral") {
        let n = s.require("name")?;
        let e = s.require("expr")?;
        integrals.push((n.value.clone(), expr_at(&e.value, e, &alphabet)?));
    }
    let mut triples = Vec::new();
    for (k, s) in secs.iter().filter(|s| s.name == "triple").enumerate() {
        let name = s.get("name").map_or(format!("triple{}", k + 1), |e| e.value.clone());
        triples.push((name, triple_section(s, &system)?));
    }
    Ok(SystemDocument { system, integrals, triples })
}

fn triple_section(s: &Section, sys: &LagrangianSystem) -> Result<Triple, FileError> {
    let a = sys.alphabet();
    let tau = s.require("tau")?;
    let xi = s.require("xi")?;
    let f = s.require("f")?;
    let form = match s.get("form") {
        Some(e) => e.value.parse::<Form>().map_err(|m| FileError::syntax(e.line, m))?,
        None => Form::OnFlow,
    };
    let xs = list(&xi.value);
    if xs.len() != sys.dim() {
        return Err(FileError::syntax(xi.line, format!("xi has {} components, system dimension is {}", xs.len(), sys.dim())));
    }
    Ok(Triple::new(
        expr_at(&tau.value, tau, a)?,
        xs.iter().map(|x| expr_at(x, xi, a)).collect::<Result<_, _>>()?,
        expr_at(&f.value, f, a)?,
        form,
    ))
}

/// Parse a file holding one `[triple]` section against `sys`.
pub fn parse_triple(text: &str, sys: &LagrangianSystem) -> Result<(Option<String>, Triple), FileError> {
    let secs = sections(text)?;
    let mut triples = secs.iter().filter(|s| s.name == "triple");
    let s = triples.next().ok_or_else(|| FileError::syntax(1, "missing [triple] section"))?;
    if let Some(extra) = triples.next() {
        return Err(FileError::syntax(extra.line, "a triple file holds one [triple] section"));
    }
    Ok((s.get("name").map(|e| e.value.clone()), triple_section(s, sys)?))
}

pub fn write_triple(tr: &Triple, alphabet: &Alphabet, name: Option<&str>) -> String {
    let mut out = String::from("[triple]\n");
    if let Some(n) = name {
        out.push_str(&format!("name = {n}\n"));
    }
    out.push_str(&format!("form = {}\n", tr.form));
    out.push_str(&format!("tau = {}\n", tr.tau.print(alphabet)));
    let xi: Vec<String> = tr.xi.iter().map(|x| x.print(alphabet)).collect();
    out.push_str(&format!("xi = {}\n", xi.join(", ")));
    out.push_str(&format!("f = {}\n", tr.f.print(alphabet)));
    out
}

fn write_range(out: &mut String, name: &str, r: (f64, f64), default: (f64, f64)) {
    if r != default {
        out.push_str(&format!("range.{name} = {}, {}\n", r.0, r.1));
    }
}

/// Render a system with optional integrals and triples.
pub fn write_system(sys: &LagrangianSystem, integrals: &[(String, Expr)], triples: &[(String, Triple)]) -> String {
    let a = sys.alphabet();
    let d = sys.domain();
    let mut out = String::from("[system]\n");
    out.push_str(&format!("name = {}\n", sys.name()));
    out.push_str(&format!("coords = {}\n", a.coords().join(", ")));
    if !a.param_names().is_empty() {
        let ps: Vec<String> = a.param_names().iter().map(|p| format!("{p} = {}", d.params.get(p).copied().unwrap_or(0.0))).collect();
        out.push_str(&format!("params = {}\n", ps.join(", ")));
    }
    if !a.function_names().is_empty() {
        out.push_str(&format!("functions = {}\n", a.function_names().join(", ")));
    }
    out.push_str(&format!("lagrangian = {}\n", sys.lagrangian().print(a)));
    if !d.singular.is_empty() {
        let s: Vec<String> = d.singular.iter().map(|e| e.print(a)).collect();
        out.push_str(&format!("singular = {}\n", s.join(", ")));
    }
    let default = SamplingDomain::new(sys.dim());
    write_range(&mut out, "t", d.time, default.time);
    for i in 0..sys.dim() {
        write_range(&mut out, &a.var_name(crate::expr::Var::Coord(i)), d.coords[i], default.coords[i]);
        write_range(&mut out, &a.var_name(crate::expr::Var::Vel(i)), d.velocities[i], default.velocities[i]);
    }
    if !d.functions.is_empty() {
        let ba = Alphabet::for_binding(BINDING_ARG).params(a.param_names());
        out.push_str("\n[bindings]\n");
        for (name, b) in &d.functions {
            out.push_str(&format!("{name} = {}\n", b.body().print(&ba)));
        }
    }
    for (name, e) in integrals {
        out.push_str(&format!("\n[integral]\nname = {name}\nexpr = {}\n", e.print(a)));
    }
    for (name, t) in triples {
        out.push('\n');
        out.push_str(&write_triple(t, a, Some(name)));
    }
    out
}

/// System file for a corpus entry, with all its integrals and triples.
pub fn export_entry(entry: &CorpusEntry) -> String {
    let integrals: Vec<(String, Expr)> = entry.integrals.iter().map(|n| (n.name().to_string(), n.expr().clone())).collect();
    let triples: Vec<(String, Triple)> = entry.triples.iter().map(|t| (t.name.clone(), t.triple.clone())).collect();
    let mut out = String::new();
    for note in &entry.notes {
        out.push_str(&format!("# {note}\n"));
    }
    out.push_str(&write_system(&entry.system, &integrals, &triples));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FREE: &str = "[system]\nname = free\ncoords = q\nlagrangian = qdot^2/2\n\n[integral]\nname = p\nexpr = qdot\n";

    #[test]
    fn reads_minimal_system() {
        let doc = parse_system(FREE).unwrap();
        assert_eq!(doc.system.dim(), 1);
        assert_eq!(doc.integral("p"), Some(&Expr::qdot(0)));
    }

    #[test]
    fn reports_expression_positions() {
        let err = parse_system("[system]\ncoords = q\nlagrangian = qdot^2 +* 2\n").unwrap_err();
        match err {
            FileError::Expr { line, column, .. } => assert_eq!((line, column), (3, 22)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(parse_system("lagrangian = 1"), Err(FileError::Syntax { line: 1, .. })));
        assert!(matches!(parse_system("[system]\ncoords = q\n"), Err(FileError::Syntax { .. })));
        assert!(matches!(parse_system("[system]\ncoords = q\nlagrangian = qdot\n"), Err(FileError::System(_))));
    }

    #[test]
    fn triple_round_trip() {
        let doc = parse_system(FREE).unwrap();
        let a = doc.system.alphabet();
        let t = Triple::new(parse("t^2", a).unwrap(), vec![parse("t*q", a).unwrap()], parse("q^2/2", a).unwrap(), Form::Strong);
        let text = write_triple(&t, a, Some("g5"));
        let (name, back) = parse_triple(&text, &doc.system).unwrap();
        assert_eq!(name.as_deref(), Some("g5"));
        assert_eq!(back, t);
    }
}
