//! Divisor theory on finite graphs and compact metric graphs, with exact
//! certificates for the graded semi-rings `⊕_m R(·, m·D)`.
//!
//! * [`graph`]: multigraphs, divisors, rational functions, linear equivalence.
//! * [`linear_system`]: enumeration of `R(G, D)`, chip firing, extremals.
//! * [`semiring`]: graded cone, Hilbert basis, generation certificates.
//! * [`gn`]: the family `G_n` whose canonical semi-ring needs a generator in degree `n`.
//! * [`metric`]: metric graphs, piecewise linear functions, refinement.
//! * [`witness`]: non-finite-generation certificates for `Z`-metric graphs.
//!
//! All arithmetic is exact (machine or big integers and big rationals).

pub mod budget;
pub mod error;
pub mod gn;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod linear_system;
pub mod metric;
pub mod rational;
pub mod semiring;
pub mod smith;
pub mod witness;

pub use budget::Budgets;
pub use error::{Error, Result};
pub use graph::{Divisor, FiniteGraph, LaplacianView, RationalFunction};
pub use linear_system::{FiringSubset, RgdElement};
