//! Exact-arithmetic kernels for verifying mod-p congruences of classical and
//! degree-2 Siegel modular forms.
//!
//! Everything here is computed over arbitrary-precision rationals — there is
//! no floating point anywhere on a value-producing path (the lattice
//! enumerator uses f64 only for sound branch pruning; accepted vectors are
//! re-measured in exact integer arithmetic).
//!
//! Module map:
//! - [`arith`]: rationals, Bernoulli numbers, p-adic valuations, classical
//!   congruence predicates (von Staudt–Clausen, Kummer, Adams, regularity).
//! - [`characters`]: Kronecker symbol, fundamental discriminants, quadratic
//!   characters, generalized Bernoulli numbers, Carlitz criteria.
//! - [`quadforms`]: binary quadratic forms, Gauss reduction, class lists,
//!   index enumeration for truncated expansions.
//! - [`qexp`]: truncated Fourier expansions of degree 1 and 2 with the theta
//!   operator, the Siegel Φ-operator, ring operations and mod-p reduction.
//! - [`eisenstein`]: closed-form Eisenstein coefficients (degrees 1 and 2),
//!   Cohen's H function, Δ, and the Bernoulli-factor divisibility
//!   certificates that mechanize the degree-≥3 divisibility statements.
//! - [`lattices`]: Golay code, Leech lattice, short-vector enumeration,
//!   genus theta series of binary quadratic forms.
//! - [`exec`]: the sequential/rayon execution switch used by the
//!   data-parallel kernels.

pub mod arith;
pub mod characters;
pub mod eisenstein;
pub mod exec;
pub mod lattices;
pub mod qexp;
pub mod quadforms;

pub use arith::{Int, Rat};
pub use exec::Exec;
