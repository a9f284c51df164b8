//! Decides whether a birational morphism of the affine plane, given as a
//! pair of bivariate polynomials over the rationals, is a product of
//! simple affine contractions, and emits replayable certificates.
//!
//! The crate is organized as:
//!
//! - [`ring`], [`unipoly`], [`poly2`]: exact polynomial arithmetic over an
//!   abstract coefficient field;
//! - [`tower`]: a triangular tower of algebraic extensions of the
//!   rationals with zero tests and inversion that may split a context
//!   into branches (dynamic evaluation);
//! - [`engine`]: elementary transformations and the bounded exhaustive
//!   search over degree-reducing moves;
//! - [`certify`]: the certificate format, its replay verifier, and the
//!   literal recomposition check;
//! - [`text`]: the canonical expression grammar (parser and printer);
//! - [`cli`]: the decide/verify/reduce/repl commands.

pub mod certify;
pub mod cli;
pub mod engine;
pub mod poly2;
pub mod ring;
pub mod text;
pub mod tower;
pub mod unipoly;

pub use certify::Certificate;
pub use engine::{decide, Decision, Outcome};
pub use poly2::{Monomial, Poly2};
pub use ring::{CoeffRing, Degree, Rat, QQ};
pub use text::{parse_poly, render_poly};
pub use tower::{Elem, FieldCtx, Mode};
pub use unipoly::UniPoly;
