//! Differential operators with polynomial coefficients and their action on
//! twisted sections `m f^s`.

mod bfunction;
mod op;
mod solve;
mod twisted;

pub use bfunction::{rescale_roots, BFunction};
pub use op::WeylOp;
pub use solve::{solve_functional_equation, Bounds, FunctionalEquation, Section};
pub use twisted::{annihilates, TwistedElem};
