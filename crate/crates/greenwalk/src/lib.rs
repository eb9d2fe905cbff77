//! Random walks on Cayley graphs of catalog groups: Green functions with
//! certified error intervals, Ancona-style hit/bypass probabilities, and
//! geometric hyperbolicity diagnostics (ball-bypass ratio, bigon widths,
//! suitable-interval heights, paradox-parameter ledgers).
//!
//! The crate is organized around a pipeline:
//!
//! 1. [`groups`] — word-problem oracles for a fixed catalog of groups
//!    (free, free abelian, free products of cyclics, direct products,
//!    lamplighter), plus user-chosen extra generators.
//! 2. [`cayley`] — finite radius-R balls of the Cayley graph with interned
//!    vertices, BFS distance fields, geodesic intervals and enumeration.
//! 3. [`walk`] — admissible measures, convolution powers with escape-mass
//!    accounting, Green function estimates with certified lower/upper
//!    bounds, and spectral-radius lower bounds.
//! 4. [`ancona`] — the Green path measure: exact path enumeration, killed
//!    Green functions, hit/bypass probability estimators, and a conditioned
//!    path sampler.
//! 5. [`geometry`] — pure-metric diagnostics: bypass ratio pi(I), bigon
//!    width functions, suitable-interval heights h_k, paradox certificates.
//! 6. [`criteria`] — parameter arithmetic for the A/B conditions, the
//!    nonamenability tail inequality, the bypass-decay test, and aggregate
//!    evidence reports.
//! 7. [`cli`] — a batch front end mapping JSON configs to report files.
//!
//! Everything downstream of `groups` treats oracles and balls as immutable,
//! shareable data; all sampled quantities are reproducible from a single
//! seed regardless of worker count.

pub mod ancona;
pub mod cayley;
pub mod cli;
pub mod criteria;
pub mod geometry;
pub mod groups;
pub mod util;
pub mod walk;
