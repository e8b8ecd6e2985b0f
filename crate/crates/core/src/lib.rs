//! Simulation and analysis of the periodically forced second-order Ricker
//! equation `x_{n+1} = x_{n-1} e^{a_n - x_{n-1} - x_n}`.
//!
//! The equation factors into the triangular pair
//! `t_{n+1} = e^{a_n} / t_n` (factor) and `x_{n+1} = t_{n+1} x_n e^{-x_n}`
//! (cofactor). The factor sequence is periodic for odd forcing periods and
//! drifts for even periods unless `sigma = 0`; everything else in this crate
//! builds on that split:
//!
//! - [`cycle`] and [`orbit`]: forcing cycles and direct iteration.
//! - [`factor`]: closed-form factor solutions and the factored orbit path.
//! - [`maps`]: the interval maps `g_k`, their compositions and return map,
//!   derivatives, periodic points and the invariant interval.
//! - [`analysis`]: cycle detection, even-period limit cycles, boundary
//!   solutions, the first-order Ricker cycle sum and basin scans.
//! - [`suite`]: the reproduction checks run by `ricker verify`.

pub mod analysis;
pub mod cycle;
pub mod error;
pub mod factor;
pub mod maps;
pub mod orbit;
pub mod suite;

pub use analysis::{
    basin_scan, boundary_orbit, detect_cycle, sacker_check, verify_even_limit_cycle, AxisRange,
    BasinCell, BasinScan, BoundaryParity, CycleClass, CycleEntry, CycleReport, DetectParams,
    EvenVerdict, SackerRecord, ScanGrid,
};
pub use cycle::ParameterCycle;
pub use error::{Result, RickerError};
pub use factor::{classify, iterate_factored, s_partial, FactorSolution, ParityClass};
pub use maps::{
    build_return_map, find_periodic_points, g_eval, invariant_interval, map_derivative,
    map_derivative_log, orbit_decomposition_check, ComposedMap, DecompositionReport,
    InvariantInterval, PeriodicPoint, SearchGrid, SignedLog, Stability, Subsequence,
};
pub use orbit::{iterate_direct, step_direct, InitialData, OrbitSource, OrbitTrace};
