//! Exact arithmetic engine for quasi-modular forms of level one.
//!
//! Everything here works over arbitrary-precision rationals. The main pieces:
//!
//! - [`useries`]: truncated Laurent series in `u` with `u^2 = q`;
//! - [`qmpoly`]: the graded ring `Q[E2, E4, E6]`, Ramanujan's derivation and
//!   the dimension formulas;
//! - [`extremal`]: extremal forms by exact row reduction of q-expansions;
//! - [`wronskian`]: the vector-valued form attached to a quasi-modular form
//!   and its D-Wronskian;
//! - [`depth1`]: the depth-one recursion, its Ore-operator identities and the
//!   denominator bound;
//! - [`leech`]: the theta series of the Leech lattice and `f_{1,14}`;
//! - [`scan`] and [`verify`]: grid scans and the bundled check suite.

pub mod arith;
pub mod depth1;
pub mod error;
pub mod extremal;
pub mod leech;
pub mod linalg;
pub mod par;
pub mod qmpoly;
pub mod rational;
pub mod scan;
pub mod useries;
pub mod verify;
pub mod wronskian;

pub use error::{QmxError, Result};
pub use qmpoly::{Monomial, QMPoly};
pub use rational::Rational;
pub use useries::{USeries, Valuation};
