use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Role of a variable in a ring context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarClass {
    /// Coordinates `x_1..x_n` (and `z_1..z_p` for Sebastiani-Thom sums).
    Base,
    /// Cotangent coordinates `xi_i` dual to base variables.
    Cotangent,
    /// Cotangent coordinates `eta_j` dual to the second block of a sum.
    EtaCotangent,
    /// Auxiliary parameters such as `s`, `t`, `lambda`.
    Param,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarId {
    pub class: VarClass,
    pub index: u32,
    pub name: String,
}

impl VarId {
    pub fn new(class: VarClass, index: u32, name: impl Into<String>) -> Self {
        VarId {
            class,
            index,
            name: name.into(),
        }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// An ordered list of variables. Exponent vectors of polynomials in the
/// ring are dense and follow this order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ring {
    vars: Vec<VarId>,
}

impl Ring {
    pub fn new(vars: Vec<VarId>) -> Result<Arc<Ring>> {
        for (i, v) in vars.iter().enumerate() {
            if !is_identifier(&v.name) {
                return Err(Error::Ring(format!("`{}` is not a valid variable name", v.name)));
            }
            for w in &vars[..i] {
                if w.name == v.name {
                    return Err(Error::Ring(format!("duplicate variable `{}`", v.name)));
                }
                if w.class == v.class && w.index == v.index {
                    return Err(Error::Ring(format!(
                        "variables `{}` and `{}` share class and index",
                        w.name, v.name
                    )));
                }
            }
        }
        Ok(Arc::new(Ring { vars }))
    }

    /// Ring of base coordinates with the given names, indexed from 1.
    pub fn base(names: &[&str]) -> Result<Arc<Ring>> {
        Ring::new(
            names
                .iter()
                .enumerate()
                .map(|(i, n)| VarId::new(VarClass::Base, i as u32 + 1, *n))
                .collect(),
        )
    }

    /// Parses a comma separated list such as `x1,x2,x3`.
    pub fn parse_base(list: &str) -> Result<Arc<Ring>> {
        let names: Vec<&str> = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        if names.is_empty() {
            return Err(Error::Ring("empty variable list".into()));
        }
        Ring::base(&names)
    }

    /// `x1..xn`.
    pub fn standard(n: usize) -> Arc<Ring> {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Ring::base(&refs).expect("standard names are valid")
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn var(&self, i: usize) -> &VarId {
        &self.vars[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn position(&self, id: &VarId) -> Option<usize> {
        self.vars.iter().position(|v| v == id)
    }

    /// Indices of variables in the given class.
    pub fn class_indices(&self, class: VarClass) -> Vec<usize> {
        (0..self.vars.len())
            .filter(|&i| self.vars[i].class == class)
            .collect()
    }

    pub fn base_indices(&self) -> Vec<usize> {
        self.class_indices(VarClass::Base)
    }

    /// A new ring with `extra` appended.
    pub fn extend(&self, extra: Vec<VarId>) -> Result<Arc<Ring>> {
        let mut vars = self.vars.clone();
        vars.extend(extra);
        Ring::new(vars)
    }

    /// Ring with `names` as fresh parameters, avoiding clashes by priming.
    pub fn with_params(&self, names: &[&str]) -> Arc<Ring> {
        let mut vars = self.vars.clone();
        let mut next = self
            .vars
            .iter()
            .filter(|v| v.class == VarClass::Param)
            .map(|v| v.index)
            .max()
            .unwrap_or(0);
        for n in names {
            let mut name = n.to_string();
            while vars.iter().any(|v| v.name == name) {
                name.push('_');
            }
            next += 1;
            vars.push(VarId::new(VarClass::Param, next, name));
        }
        Ring::new(vars).expect("fresh parameter names are unique")
    }

    /// Drops the variables at the given positions.
    pub fn without(&self, drop: &[usize]) -> Arc<Ring> {
        let vars = self
            .vars
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, v)| v.clone())
            .collect();
        Arc::new(Ring { vars })
    }

    /// Base ring extended by one cotangent variable per base variable.
    /// Variables of class `Base` in `eta_block` get `EtaCotangent` duals.
    pub fn cotangent(&self, eta_block: &[usize]) -> Arc<Ring> {
        let mut vars = self.vars.clone();
        let mut xi = 0;
        let mut eta = 0;
        for (i, v) in self.vars.iter().enumerate() {
            if v.class != VarClass::Base {
                continue;
            }
            let (class, idx, stem) = if eta_block.contains(&i) {
                eta += 1;
                (VarClass::EtaCotangent, eta, "eta")
            } else {
                xi += 1;
                (VarClass::Cotangent, xi, "xi")
            };
            let mut name = cotangent_name(stem, &v.name, idx);
            while vars.iter().any(|w| w.name == name) {
                name.push('_');
            }
            vars.push(VarId::new(class, idx, name));
        }
        Arc::new(Ring { vars })
    }

    /// Position of the cotangent dual of base variable `i`, if present.
    pub fn dual_of(&self, i: usize) -> Option<usize> {
        let base = self.base_indices();
        let k = base.iter().position(|&b| b == i)?;
        let duals: Vec<usize> = (0..self.vars.len())
            .filter(|&j| {
                matches!(
                    self.vars[j].class,
                    VarClass::Cotangent | VarClass::EtaCotangent
                )
            })
            .collect();
        duals.get(k).copied()
    }
}

fn cotangent_name(stem: &str, base: &str, idx: u32) -> String {
    // x3 -> xi3, z -> eta1
    let digits: String = base.chars().rev().take_while(char::is_ascii_digit).collect();
    if !digits.is_empty() && base.len() > digits.len() && stem == "xi" {
        let digits: String = digits.chars().rev().collect();
        format!("{stem}{digits}")
    } else {
        format!("{stem}{idx}")
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_names_rejected() {
        assert!(Ring::base(&["x", "x"]).is_err());
        assert!(Ring::base(&["1x"]).is_err());
    }

    #[test]
    fn cotangent_naming() {
        let r = Ring::base(&["x1", "x2", "z"]).unwrap();
        let t = r.cotangent(&[2]);
        let names: Vec<&str> = t.vars().iter().map(|v| v.name.as_str()).collect();
        assert_eq!(names, ["x1", "x2", "z", "xi1", "xi2", "eta1"]);
        assert_eq!(t.dual_of(1), Some(4));
        assert_eq!(t.dual_of(2), Some(5));
    }

    #[test]
    fn params_avoid_clashes() {
        let r = Ring::base(&["s", "x"]).unwrap();
        let e = r.with_params(&["s"]);
        assert_eq!(e.var(2).name, "s_");
    }
}
