//! Block-coordinate pairwise Frank-Wolfe.
//!
//! Each row moves mass from its worst active pattern (the away vertex) to
//! the linear-oracle vertex. Both patterns sit in the same target column, so
//! only two garbled cells change and the exact step has a closed form.

use super::frank_wolfe::FwRun;
use super::problem::Problem;

pub(crate) fn run(problem: &Problem, mut weights: Vec<f64>, tolerance: f64, max_sweeps: usize) -> FwRun {
    let k = problem.k();
    let mut grad = vec![0.0; weights.len()];
    let mut vertex = vec![0usize; problem.rows];
    let mut garbled = problem.garble(&weights);
    let mut gap = f64::INFINITY;
    let mut sweeps = 0;

    while sweeps < max_sweeps {
        snap_negligible(&mut weights, k);
        // fresh marginals each sweep so incremental updates cannot drift
        problem.garble_into(&weights, &mut garbled);
        problem.gradient(&garbled, &mut grad);
        problem.linear_oracle(&grad, &mut vertex);
        gap = problem.duality_gap(&weights, &grad, &vertex);
        sweeps += 1;
        if gap <= tolerance {
            break;
        }
        for r in 0..problem.rows {
            let row = &mut weights[r * k..(r + 1) * k];
            for _ in 0..2 * k {
                if !problem.pairwise_step(r, row, &mut garbled) {
                    break;
                }
            }
        }
    }
    let value = problem.objective(&garbled);
    FwRun {
        weights,
        value,
        gap,
        iterations: sweeps,
        converged: gap <= tolerance,
    }
}

/// Weights this small only matter through the sign of `log p(t | x̃)` in
/// cells they alone populate, where they pin a `-inf` gradient entry that no
/// finite step can clear. Folding them into the row's largest weight moves
/// the objective by far less than any usable tolerance.
fn snap_negligible(weights: &mut [f64], k: usize) {
    for row in weights.chunks_mut(k) {
        let mut freed = 0.0;
        let mut top = 0;
        for j in 0..k {
            if row[j] > 0.0 && row[j] < NEGLIGIBLE_WEIGHT {
                freed += row[j];
                row[j] = 0.0;
            }
            if row[j] > row[top] {
                top = j;
            }
        }
        row[top] += freed;
    }
}

const NEGLIGIBLE_WEIGHT: f64 = 1e-13;
