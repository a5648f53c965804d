//! Runtimes and experiment harnesses for centralised local graph algorithms.
//!
//! The crate is organised around a small number of moving parts:
//!
//! * [`graph`] — canonical labeled bounded-degree graphs, gadget generators
//!   (cycles, paths, two-path instances, random regular graphs, double covers),
//!   girth computation, and a plain-text file format.
//! * [`models`] — the three execution models for local algorithms: synchronous
//!   `LOCAL` rounds evaluated on radius-`r` views, per-vertex probe trees with a
//!   hard probe budget, and centralised local algorithms (LCAs) with an explicit
//!   seed and read-write state. Stateless probe trees and stateless LCAs are the
//!   same object, and the runtimes here make that equivalence checkable.
//! * [`perm`] — seeded permutation families over an identifier space `[N]`:
//!   explicit uniform tables, lazily sampled permutations for astronomically
//!   large `N`, and a seed-efficient approximately `k`-wise independent family
//!   with a native inverse. Quality is measured, not assumed, via
//!   [`perm::tuple_uniformity_test`].
//! * [`sim`] — the virtual-world construction: a real graph `G` is embedded in
//!   a relabelled world `[N]` alongside a procedural filler graph `H`, and a
//!   probe algorithm is run against the world without ever materialising it.
//!   Includes the failure-probability bound, Monte Carlo estimation, exhaustive
//!   derandomization at micro scale, and the end-to-end localized-LCA runner
//!   with per-query locality certificates.
//! * [`algo`] — concrete algorithms and verifiers: Cole–Vishkin 3-coloring on
//!   degree-≤2 graphs, ball-gathering reductions from `LOCAL` to LCA,
//!   color-class sweeps for maximal independent set and maximal matching, and
//!   the two-path leader-election pair that separates stateful from stateless
//!   LCAs.
//! * [`lowerbounds`] — the two-copies vs. bipartite-double-cover
//!   indistinguishability experiment: exact transcript distributions over all
//!   2^n identifier pair-swaps, equality checks below half girth, and exact
//!   independent-set / max-cut gap reports.
//!
//! Identifiers are 0-based everywhere: a graph on `n` vertices uses ids
//! `0..n`, and a world of size `N` uses ids `0..N`. All randomness is derived
//! from explicit `u64` seeds via [`seeding`], so every run is reproducible
//! bit-for-bit.

pub mod algo;
mod bits;
pub mod graph;
pub mod lowerbounds;
pub mod models;
pub mod par;
pub mod perm;
pub mod report;
pub mod seeding;
pub mod sim;
