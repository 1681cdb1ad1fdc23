//! Coset-coded transmission over the binary erasure wiretap channel using
//! spatially coupled two-edge-type LDPC ensembles.
//!
//! The crate is organized around the pipeline of a wiretap-coding experiment:
//!
//! - [`gf2`]: exact linear algebra over GF(2) (packed bit matrices, rank,
//!   system solving, uniform solution sampling),
//! - [`ensemble`]: ensemble parameters, design-rate formulas, rate-equivocation
//!   region geometry and degree selection,
//! - [`de`]: coupled density evolution over the BEC and BP-threshold search,
//! - [`sampler`]: finite Tanner-graph instances of the two-edge-type ensembles,
//! - [`stopping`]: stopping-set weight-enumerator growth rates and exact
//!   enumeration oracles,
//! - [`wiretap`]: coset encoding, BEC transmission, peeling decoding and exact
//!   rank-based equivocation measurement,
//! - [`seeding`]: the reproducibility conventions shared by everything above.
//!
//! Every capability has a runnable demo under `examples/`, and the `wtldpc`
//! binary exposes the same operations as batch subcommands.

pub mod de;
pub mod ensemble;
pub mod gf2;
pub mod sampler;
pub mod seeding;
pub mod stopping;
pub mod wiretap;

pub use ensemble::{EnsembleParams, Variant, WiretapChannelSpec};
pub use gf2::{BitMatrix, BitVec};
pub use sampler::TannerGraph;
pub use wiretap::CosetCode;
