//! Exact computations around annihilators of meromorphic functions
//! `1/h`: Groebner bases and standard bases, Weyl algebra actions,
//! Bernstein-Sato functional equations, logarithmic derivations,
//! conormal varieties and decision procedures for the related conditions.

pub mod bernstein;
pub mod conditions;
pub mod conormal;
pub mod error;
pub mod family;
pub mod groebner;
pub mod linalg;
pub mod logder;
pub mod lp;
pub mod poly;
pub mod rational;
pub mod verdict;
pub mod weyl;

pub use error::{Error, Result};
pub use poly::{Poly, Ring, VarClass, VarId, WeightSystem};
pub use rational::Q;
