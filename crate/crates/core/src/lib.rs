//! twistlab: an exact-arithmetic workbench around substitution automorphisms
//! of free groups (Dehn-twist style), their linearizations, and the p-adic
//! machinery needed to study them.
//!
//! The crate is organized as independent engines that share a few value types:
//!
//! - [`words`]: run-length-encoded free-group words, the genus-g boundary word
//!   delta = \[a1,b1\]...\[ag,bg\], and the twist family phi, phi_i, phi'_i,
//!   phi''_i acting by substitution.
//! - [`ablin`]: abelianization of substitution endomorphisms to exact integer
//!   matrices, the symplectic form check M^T J M = J, and breadth-first
//!   congruence-quotient generation with the Sp order formula as oracle.
//! - [`trace_kernel`]: exact rational linear algebra certifying that the
//!   abelianized twist family on Q^d has a unique invariant hyperplane, equal
//!   to the predicted span, plus the orbit-span "difference trick".
//! - [`padic`]: precision-tracked p-adic scalars and matrices, p-adic and
//!   matrix logarithms, Lie-algebra dimension lower bounds by bracket closure,
//!   and exact commutant dimensions of regular representations.
//! - [`lubin_tate`]: the formal group law for f(t) = pi*t + t^q, its
//!   [a]-endomorphisms and formal logarithm, to a degree cutoff.
//! - [`finite_group`]: brute-force finite group laboratory (automorphisms,
//!   centralizers, inner/outer classes) verifying the normalizer identity
//!   N_Out(Gamma)(Pi/Gamma) = image of Aut_Gamma(Pi) in Out(Gamma).
//! - [`report`]: the verification suites behind the `twistlab verify ...`
//!   command line, emitting deterministic JSON reports.
//!
//! Everything is exact: arbitrary-precision integers and rationals, or p-adic
//! intervals with explicitly tracked precision. No floating point.

pub mod ablin;
pub mod finite_group;
pub mod lubin_tate;
pub mod padic;
pub mod ratmat;
pub mod report;
pub mod trace_kernel;
pub mod words;
