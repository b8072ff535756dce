//! Exact computation and certification of polynomial automorphisms built
//! around the Vénéreau polynomials `f_n = y + x^n (x z + y (y u + z^2))`.
//!
//! Polynomials live in `Q[x, x^-1][c, y, z, u, t]`; see [`poly::MultiPoly`].

pub mod certificate;
pub mod coeff;
pub mod derivation;
pub mod divide;
pub mod error;
pub mod frame;
pub mod map;
pub mod modp;
pub mod monomial;
pub mod parse;
pub mod poly;
pub mod stable;
pub mod suite;
pub mod venereau;

pub use certificate::{Certificate, Check, Status, VerifyOptions};
pub use coeff::Coeff;
pub use derivation::Derivation;
pub use divide::exact_divide;
pub use error::{Error, Result};
pub use frame::Frame;
pub use map::{verify_inverse_pair, PolyMap};
pub use monomial::{Monomial, Var};
pub use poly::MultiPoly;
pub use suite::verify_all;
