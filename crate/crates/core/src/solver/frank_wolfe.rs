use super::problem::Problem;
use super::StepRule;

pub(crate) struct FwRun {
    pub weights: Vec<f64>,
    pub value: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Conditional-gradient iterations from `weights` until the duality gap
/// drops to `tolerance` or `max_iterations` linear-oracle calls are spent.
pub(crate) fn run(
    problem: &Problem,
    mut weights: Vec<f64>,
    tolerance: f64,
    max_iterations: usize,
    step_rule: StepRule,
) -> FwRun {
    let k = problem.k();
    let mut grad = vec![0.0; weights.len()];
    let mut vertex = vec![0usize; problem.rows];
    let mut garbled = problem.garble(&weights);
    let mut gap = f64::INFINITY;
    let mut iterations = 0;

    while iterations < max_iterations {
        problem.gradient(&garbled, &mut grad);
        problem.linear_oracle(&grad, &mut vertex);
        gap = problem.duality_gap(&weights, &grad, &vertex);
        iterations += 1;
        if gap <= tolerance {
            break;
        }
        let gamma = match step_rule {
            StepRule::OpenLoop => 2.0 / (iterations as f64 + 1.0),
            StepRule::LineSearch | StepRule::BlockPairwise => line_search(problem, &weights, &vertex),
        };
        if gamma <= 0.0 {
            continue;
        }
        for r in 0..problem.rows {
            for j in 0..k {
                weights[r * k + j] *= 1.0 - gamma;
            }
            weights[r * k + vertex[r]] += gamma;
        }
        problem.garble_into(&weights, &mut garbled);
    }
    let value = problem.objective(&garbled);
    FwRun {
        weights,
        value,
        gap,
        iterations,
        converged: gap <= tolerance,
    }
}

/// Minimizes the convex restriction `γ ↦ f(W + γ(V − W))` on `[0, 1]` by
/// bisection on its derivative.
fn line_search(problem: &Problem, weights: &[f64], vertex: &[usize]) -> f64 {
    let k = problem.k();
    let mut trial = weights.to_vec();
    let mut grad = vec![0.0; weights.len()];
    let mut slope = |gamma: f64| -> f64 {
        for r in 0..problem.rows {
            for j in 0..k {
                trial[r * k + j] = (1.0 - gamma) * weights[r * k + j];
            }
            trial[r * k + vertex[r]] += gamma;
        }
        let g = problem.garble(&trial);
        problem.gradient(&g, &mut grad);
        let mut d = 0.0;
        for r in 0..problem.rows {
            let mut at_w = 0.0;
            for j in 0..k {
                let wj = weights[r * k + j];
                if wj > 0.0 {
                    at_w += wj * grad[r * k + j];
                }
            }
            d += grad[r * k + vertex[r]] - at_w;
        }
        d
    };
    if slope(1.0) <= 0.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
