//! Shared proptest strategies.

use proptest::prelude::*;

use crate::linalg::{self, C64};
use crate::state::{bell_mixture, BellCoeffs, DensityMatrix};

/// Uniform point of the tetrahedron via Dirichlet(1,1,1,1) weights.
pub fn tetrahedron_point() -> impl Strategy<Value = BellCoeffs> {
    proptest::array::uniform4(1e-6f64..1.0).prop_map(|g| {
        let e: Vec<f64> = g.iter().map(|x| -x.ln()).collect();
        let s: f64 = e.iter().sum();
        bell_mixture(e[0] / s, e[1] / s, e[2] / s, 1.0 - (e[0] + e[1] + e[2]) / s)
            .unwrap_or_else(|_| BellCoeffs::zero())
    })
}

/// `A A^dagger / Tr` for a random complex 4x4 `A`.
pub fn random_state() -> impl Strategy<Value = DensityMatrix> {
    proptest::collection::vec(-1.0f64..1.0, 32).prop_map(|v| {
        let mut a = linalg::zeros::<4>();
        for i in 0..4 {
            for j in 0..4 {
                a[i][j] = C64::new(v[8 * i + 2 * j], v[8 * i + 2 * j + 1]);
            }
        }
        let m = linalg::matmul(&a, &linalg::adjoint(&a));
        let tr = linalg::trace(&m).re.max(1e-12);
        DensityMatrix::new(linalg::scale(&m, C64::new(1.0 / tr, 0.0)))
            .unwrap_or_else(|_| DensityMatrix::maximally_mixed())
    })
}

/// Deterministic sample list from a strategy.
pub fn samples<S: Strategy>(strategy: S, n: usize) -> Vec<S::Value> {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    let mut runner = TestRunner::deterministic();
    (0..n)
        .map(|_| strategy.new_tree(&mut runner).unwrap().current())
        .collect()
}
