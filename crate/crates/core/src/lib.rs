//! Constructive clique-factor pipeline for pseudorandom regular graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`], [`weighted`], [`io`]: graphs, edge weights, text files;
//! * [`gen`]: seeded instance generators;
//! * [`spectral`]: second eigenvalue, mixing audits, branch thresholds;
//! * [`cliques`]: `K_t` enumeration, counting windows, clique families;
//! * [`lp`]: the fractional `K_t`-matching programme and its dual;
//! * [`pipeline`]: factor extraction, the random hypergraph `H_f`, and matching.
//!
//! Numeric code in [`weighted`] and [`lp`] is generic over [`Scalar`]; the
//! aliases below fix the two instantiations used in practice.

pub mod cliques;
pub mod error;
pub mod gen;
pub mod graph;
pub mod io;
pub mod lp;
pub mod packing;
pub mod pipeline;
pub mod rng;
pub mod scalar;
pub mod spectral;
pub mod weighted;

pub use error::{Error, ErrorKind, Result};
pub use graph::{Graph, RegularityInfo};
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub type WGraph = weighted::WeightedGraph<f64>;
pub type ExactWGraph = weighted::WeightedGraph<Rational>;

pub type Primal = lp::PrimalSolution<f64>;
pub type Dual = lp::DualSolution<f64>;
pub type FactorCert = lp::FactorCert<f64>;
pub type ExactFactorCert = lp::FactorCert<Rational>;
