//! Certified enclosures and anytime upper bounds for topological entropy and
//! pressure of Z^d subshifts, plus ground-state energy and entropy
//! approximations.
//!
//! The crate is organized around a small set of exact data types (shapes,
//! patterns, rational potentials) and one rigorous numeric kernel
//! ([`rigor`]): every real-valued answer leaves the library as an
//! outward-rounded dyadic interval together with the assumptions it is
//! conditional on.

pub mod error;
pub mod lattice;
pub mod language;
pub mod potential;
pub mod pressure;
pub mod rigor;
pub mod transfer;
pub mod samples;
pub mod subshift;

pub use error::{Error, Result};
pub use lattice::{centered_box, growth_sites, LatticeBox, Shape, Site};
pub use rigor::{
    exp_interval, exp_rational, ln_integer, ln_interval, spectral_radius_bounds, Dyadic,
    DyadicInterval, IntervalMatrix, RoundDir, SpectralBounds,
};
pub use subshift::{
    enumerate_locally_admissible, is_locally_admissible, is_subword_at, parse_sft, print_sft,
    Alphabet, ForbiddenEnumeration, Pattern, SftSpec,
};
