//! Arithmetic of one-parameter Dwork-type families and their mirrors: brute-force
//! and character-sum point counts, Picard-Fuchs operators by pole reduction,
//! Frobenius series solutions, and zeta functions.

pub mod charcount;
pub mod counting;
pub mod error;
pub mod families;
pub mod finite_field;
pub mod frobenius;
pub mod numeric;
pub mod picard_fuchs;
pub mod padic_char;
pub mod ratfun;
pub mod verify;
pub mod zeta;

pub use error::{Error, Result};
