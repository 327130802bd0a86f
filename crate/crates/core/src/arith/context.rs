use std::fmt;
use std::sync::Arc;

use super::ArithError;

/// Names reserved for the flow parameters `t` and `t'`.
pub const RESERVED: [&str; 2] = ["t", "tp"];

/// Ordered list of variable names for a polynomial ring.
///
/// Cheap to clone; contexts compare equal when their names agree.
#[derive(Clone)]
pub struct VarContext {
    names: Arc<[String]>,
}

impl VarContext {
    /// Builds a user-facing context. Names must be distinct identifiers and
    /// may not use the reserved flow parameters.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, ArithError> {
        if names.is_empty() {
            return Err(ArithError::InvalidContext("at least one variable is required".into()));
        }
        for n in names {
            let n = n.as_ref();
            if RESERVED.contains(&n) {
                return Err(ArithError::InvalidContext(format!("`{n}` is reserved")));
            }
        }
        Self::build(names)
    }

    /// Builds a context without the reserved-name check. Used for the
    /// extended contexts that carry `t` and `tp`.
    pub(crate) fn build<S: AsRef<str>>(names: &[S]) -> Result<Self, ArithError> {
        let mut out: Vec<String> = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            if !is_identifier(n) {
                return Err(ArithError::InvalidContext(format!("`{n}` is not an identifier")));
            }
            if out.iter().any(|m| m == n) {
                return Err(ArithError::InvalidContext(format!("duplicate variable `{n}`")));
            }
            out.push(n.to_string());
        }
        Ok(VarContext { names: out.into() })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The context `(t, tp, x_1, ..., x_n)` in which flows live.
    pub fn flow_extension(&self) -> VarContext {
        let mut names: Vec<&str> = RESERVED.to_vec();
        names.extend(self.names.iter().map(String::as_str));
        VarContext::build(&names).expect("base context is valid")
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl PartialEq for VarContext {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.names, &other.names) || self.names == other.names
    }
}

impl Eq for VarContext {}

impl fmt::Debug for VarContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_reserved_and_duplicates() {
        assert!(VarContext::new(&["x", "t"]).is_err());
        assert!(VarContext::new(&["tp"]).is_err());
        assert!(VarContext::new(&["x", "x"]).is_err());
        assert!(VarContext::new(&["2x"]).is_err());
        assert!(VarContext::new::<&str>(&[]).is_err());
        let c = VarContext::new(&["x", "y"]).unwrap();
        assert_eq!(c.index_of("y"), Some(1));
    }

    #[test]
    fn flow_extension_prepends_parameters() {
        let c = VarContext::new(&["x"]).unwrap();
        let e = c.flow_extension();
        assert_eq!(e.names(), &["t".to_string(), "tp".into(), "x".into()]);
    }
}
