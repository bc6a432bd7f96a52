use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::monomial::Monomial;
use crate::error::{Error, Result};

/// A ring variable and its grading weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarSpec {
    pub name: String,
    pub weight: u32,
}

impl VarSpec {
    pub fn new(name: impl Into<String>, weight: u32) -> Self {
        VarSpec {
            name: name.into(),
            weight,
        }
    }
}

/// Which monomials survive: per-variable exponent caps plus a cap on the
/// weighted total degree. Variables absent from `caps` are uncapped.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncationSpec {
    pub caps: BTreeMap<String, u32>,
    pub total: u32,
}

impl TruncationSpec {
    pub fn new(total: u32) -> Self {
        TruncationSpec {
            caps: BTreeMap::new(),
            total,
        }
    }

    pub fn with_cap(mut self, var: impl Into<String>, cap: u32) -> Self {
        self.caps.insert(var.into(), cap);
        self
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct RingData {
    vars: Vec<VarSpec>,
    trunc: TruncationSpec,
    caps: Vec<Option<u32>>,
}

/// Shared handle to a variable list together with its truncation rule.
#[derive(Clone)]
pub struct Ring(Arc<RingData>);

impl Ring {
    pub fn new(vars: Vec<VarSpec>, trunc: TruncationSpec) -> Result<Ring> {
        for (i, v) in vars.iter().enumerate() {
            if v.name.is_empty() {
                return Err(Error::InvalidRing("empty variable name".into()));
            }
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::InvalidRing(format!("duplicate variable `{}`", v.name)));
            }
        }
        for name in trunc.caps.keys() {
            if !vars.iter().any(|v| &v.name == name) {
                return Err(Error::InvalidRing(format!("cap on unknown variable `{name}`")));
            }
        }
        let caps = vars.iter().map(|v| trunc.caps.get(&v.name).copied()).collect();
        Ok(Ring(Arc::new(RingData { vars, trunc, caps })))
    }

    pub fn vars(&self) -> &[VarSpec] {
        &self.0.vars
    }

    pub fn nvars(&self) -> usize {
        self.0.vars.len()
    }

    pub fn truncation(&self) -> &TruncationSpec {
        &self.0.trunc
    }

    pub fn cap(&self, index: usize) -> Option<u32> {
        self.0.caps[index]
    }

    pub fn weight(&self, index: usize) -> u32 {
        self.0.vars[index].weight
    }

    pub fn total_cap(&self) -> u32 {
        self.0.trunc.total
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.try_index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn try_index_of(&self, name: &str) -> Option<usize> {
        self.0.vars.iter().position(|v| v.name == name)
    }

    pub fn has_var(&self, name: &str) -> bool {
        self.try_index_of(name).is_some()
    }

    pub fn weighted_degree(&self, m: &Monomial) -> u64 {
        m.exps()
            .iter()
            .zip(&self.0.vars)
            .map(|(&e, v)| e as u64 * v.weight as u64)
            .sum()
    }

    pub fn admits(&self, m: &Monomial) -> bool {
        for (i, &e) in m.exps().iter().enumerate() {
            if let Some(c) = self.0.caps[i] {
                if e as u32 > c {
                    return false;
                }
            }
        }
        self.weighted_degree(m) <= self.0.trunc.total as u64
    }

    /// A ring with the same variables and a different truncation rule.
    pub fn with_truncation(&self, trunc: TruncationSpec) -> Result<Ring> {
        Ring::new(self.0.vars.clone(), trunc)
    }

    /// Same variables; every existing cap (and the total) raised by the given amounts.
    pub fn extended(&self, extra_total: u32, extra_caps: &[(&str, u32)]) -> Result<Ring> {
        let mut t = self.0.trunc.clone();
        t.total += extra_total;
        for (name, extra) in extra_caps {
            if let Some(c) = t.caps.get_mut(*name) {
                *c += extra;
            }
        }
        self.with_truncation(t)
    }

    pub fn describe(&self) -> String {
        let vars: Vec<String> = self
            .0
            .vars
            .iter()
            .map(|v| match self.0.trunc.caps.get(&v.name) {
                Some(c) => format!("{}:w{}<={}", v.name, v.weight, c),
                None => format!("{}:w{}", v.name, v.weight),
            })
            .collect();
        format!("{}; total<={}", vars.join(","), self.0.trunc.total)
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Ring) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({})", self.describe())
    }
}
