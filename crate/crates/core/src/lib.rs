//! Logical-information coding over GF(2).
//!
//! Propositional statements become multilinear polynomials over GF(2); a set
//! of statements is summarized by its algebraic set (its common zeros), and
//! knowledge is transmitted by coding that set, optionally relative to shared
//! background knowledge or to a weaker target query.

pub mod algset;
pub mod bitcodec;
pub mod bits;
pub mod gf2;
pub mod groebner;
pub mod logic;
pub mod partition;
pub mod poly;
pub mod protocols;
pub mod simlab;

pub use algset::{entails, sigma, sigma_poly, zeros, AlgSet, AlgSetError, Point, M_MAX};
pub use bitcodec::{BitReader, BitWriter, Bitstream, CodecError};
pub use logic::{parse_statements, Formula, ParseError};
pub use partition::{CodecKind, PartitionError, PartitionVector, SharedRandomness, Ternary, TernaryVector};
pub use groebner::{delta, entails_groebner, groebner_basis, normal_form, GroebnerBasis, GroebnerError};
pub use poly::{Monomial, Poly, PolySet};
pub use protocols::{CodecId, Decoded, Header, PartitionOptions, ProtocolError, Scenario, Transmission};
pub use simlab::{bounds_table, run_trials, Bounds, LawSpec, RateReport, SimError};
