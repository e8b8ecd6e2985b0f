//! Shared inputs for the benchmarks.

use ricker_core::{build_return_map, ComposedMap, FactorSolution, InitialData, ParameterCycle};

pub fn multistable_cycle() -> ParameterCycle {
    ParameterCycle::new(vec![1.0, 1.9, 0.8]).unwrap()
}

pub fn even_cycle() -> ParameterCycle {
    ParameterCycle::new(vec![1.4, 1.8, 1.6, 0.3]).unwrap()
}

/// Return map of `a = (2, 4, 1)` from the initial pair `(1, x_curr)`.
pub fn figure_map(x_curr: f64) -> ComposedMap {
    let c = ParameterCycle::new(vec![2.0, 4.0, 1.0]).unwrap();
    let fs = FactorSolution::from_initial(&c, &InitialData::new(1.0, x_curr).unwrap()).unwrap();
    build_return_map(&fs).unwrap()
}
