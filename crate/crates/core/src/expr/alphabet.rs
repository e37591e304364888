use super::Var;

/// Declared symbols of a system: coordinate names, parameters and opaque
/// function names.
///
/// Coordinates default to `q1..qn`. Velocities are written `<coord>dot` and
/// accelerations `<coord>ddot`; for default names `qdot1` and `qddot1` are
/// also accepted and are what the printer emits.
#[derive(Clone, Debug, PartialEq)]
pub struct Alphabet {
    coords: Vec<String>,
    default_names: bool,
    params: Vec<String>,
    functions: Vec<String>,
    arg: Option<String>,
}

impl Alphabet {
    pub fn new(dim: usize) -> Alphabet {
        Alphabet {
            coords: (1..=dim).map(|i| format!("q{i}")).collect(),
            default_names: true,
            params: Vec::new(),
            functions: Vec::new(),
            arg: None,
        }
    }

    pub fn with_coords<S: AsRef<str>>(names: &[S]) -> Alphabet {
        let coords: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let default_names = coords.iter().enumerate().all(|(i, c)| *c == format!("q{}", i + 1));
        Alphabet { coords, default_names, params: Vec::new(), functions: Vec::new(), arg: None }
    }

    /// One-variable alphabet for function bindings: the formal argument is
    /// named `arg` and parses to [`Var::Arg`].
    pub fn for_binding(arg: &str) -> Alphabet {
        Alphabet {
            coords: Vec::new(),
            default_names: false,
            params: Vec::new(),
            functions: Vec::new(),
            arg: Some(arg.to_string()),
        }
    }

    pub fn param(mut self, name: &str) -> Alphabet {
        if !self.params.iter().any(|p| p == name) {
            self.params.push(name.to_string());
        }
        self
    }

    pub fn params<S: AsRef<str>>(mut self, names: &[S]) -> Alphabet {
        for n in names {
            self = self.param(n.as_ref());
        }
        self
    }

    pub fn function(mut self, name: &str) -> Alphabet {
        if !self.functions.iter().any(|p| p == name) {
            self.functions.push(name.to_string());
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn param_names(&self) -> &[String] {
        &self.params
    }

    pub fn function_names(&self) -> &[String] {
        &self.functions
    }

    pub fn has_param(&self, name: &str) -> bool {
        self.params.iter().any(|p| p == name)
    }

    pub fn has_function(&self, name: &str) -> bool {
        self.functions.iter().any(|p| p == name)
    }

    pub fn lookup_var(&self, ident: &str) -> Option<Var> {
        if ident == "t" {
            return Some(Var::Time);
        }
        if self.arg.as_deref() == Some(ident) {
            return Some(Var::Arg);
        }
        for (i, c) in self.coords.iter().enumerate() {
            if ident == c {
                return Some(Var::Coord(i));
            }
            if let Some(base) = ident.strip_suffix("ddot") {
                if base == c {
                    return Some(Var::Acc(i));
                }
            } else if let Some(base) = ident.strip_suffix("dot") {
                if base == c {
                    return Some(Var::Vel(i));
                }
            }
        }
        if self.default_names {
            if let Some(k) = ident.strip_prefix("qddot") {
                return self.index(k).map(Var::Acc);
            }
            if let Some(k) = ident.strip_prefix("qdot") {
                return self.index(k).map(Var::Vel);
            }
        }
        None
    }

    fn index(&self, digits: &str) -> Option<usize> {
        let k: usize = digits.parse().ok()?;
        (1..=self.dim()).contains(&k).then(|| k - 1)
    }

    pub fn var_name(&self, v: Var) -> String {
        var_name(Some(self), v)
    }
}

pub(crate) fn var_name(alphabet: Option<&Alphabet>, v: Var) -> String {
    let custom = alphabet.filter(|a| !a.default_names);
    match (v, custom) {
        (Var::Time, _) => "t".into(),
        (Var::Arg, Some(a)) => a.arg.clone().unwrap_or_else(|| "u".into()),
        (Var::Arg, None) => alphabet.and_then(|a| a.arg.clone()).unwrap_or_else(|| "u".into()),
        (Var::Coord(i), Some(a)) if i < a.dim() => a.coords[i].clone(),
        (Var::Vel(i), Some(a)) if i < a.dim() => format!("{}dot", a.coords[i]),
        (Var::Acc(i), Some(a)) if i < a.dim() => format!("{}ddot", a.coords[i]),
        (Var::Coord(i), _) => format!("q{}", i + 1),
        (Var::Vel(i), _) => format!("qdot{}", i + 1),
        (Var::Acc(i), _) => format!("qddot{}", i + 1),
    }
}
