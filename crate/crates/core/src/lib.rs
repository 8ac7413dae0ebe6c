//! Sub-Hopf algebras of the polynomial part of the odd-primary Steenrod
//! algebra, described by profile functions.
//!
//! The crate has three layers:
//!
//! * [`hopf`]: profile functions, the quotient Hopf algebras `B_*` they
//!   define, their coproducts and primitives.
//! * [`cobar`]: the normalized cobar complex of `B_*`, used as a brute-force
//!   oracle for `Ext` dimensions and for deciding whether products vanish.
//! * [`symbolic`] and [`classifier`]: the formal algebra of the classes
//!   `h_{t,s}`, `b_{t,s}` under Steenrod operations, derivations of monomial
//!   relations, and the quasi-elementary classification built on them.
//!
//! Everything is exact arithmetic over F_p ([`fp_linalg`]).

pub mod arith;
pub mod classifier;
pub mod cobar;
pub mod derive;
pub mod fp_linalg;
pub mod hopf;
pub mod par;
pub mod symbolic;

pub use arith::{binom_mod_p, Prime};
pub use hopf::{Monomial, ProfileFunction};
