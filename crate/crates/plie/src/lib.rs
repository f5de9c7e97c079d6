//! Exact computer algebra for restricted Lie algebras over prime fields.
//!
//! The crate works with four interlocking structures, all over F_p and all
//! handled with exact arithmetic:
//!
//! * restricted Lie algebras given by structure constants, with a bracket
//!   and a p-operation satisfying Jacobson's axioms ([`lie`]);
//! * the degree-truncated tensor algebra on a finite set of generators,
//!   viewed as a bialgebra with primitive generators ([`tensor`]);
//! * the restricted enveloping algebra in its monomial normal form, with
//!   its coproduct and its space of primitive elements ([`enveloping`]);
//! * free restricted Lie algebras realised degree by degree as the
//!   primitives of the tensor bialgebra ([`free_restricted`]).
//!
//! On top of these, [`monadic`] checks computationally that extracting a
//! bracket and a p-operation from the degreewise evaluation map of an
//! algebra-over-the-monad recovers the structure one started from, and
//! certifies the enveloping algebra presentation degree by degree from two
//! independent directions. [`cli`] exposes the whole kit as a command-line
//! tool working on small JSON descriptions of algebras.
//!
//! Everything is deterministic: iteration orders are fixed, random sampling
//! is seeded, and results are exact — there are no tolerances anywhere.

pub mod cli;
pub mod enveloping;
pub mod error;
pub mod fp;
pub mod free_restricted;
pub mod lie;
pub mod monadic;
pub mod tensor;

pub use error::Error;
pub use fp::{EchelonBasis, Fp, FpMatrix, FpVector, Prime, SpanSolver};
