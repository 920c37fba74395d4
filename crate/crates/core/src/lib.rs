//! Search, verification and theory checks for Dillon-type hexanomials
//!
//! f(x) = x(Ax^2 + Bx^q + Cx^{2q}) + x^2(Dx^q + Ex^{2q}) + x^{3q}
//!
//! over GF(q^2), q = 2^m.

pub mod diffanalysis;
pub mod error;
pub mod field;
pub mod hexanomial;
pub mod invariants;
pub mod search;
pub mod sympoly;
pub mod theory;
pub mod walsh;

pub use error::{Error, FieldError, GateError, Result};
pub use field::{Elem, Field, FieldSpec};
pub use hexanomial::Coeffs;
