//! The fault-tolerance redundancy `I_ft(α)`: the least information about
//! `T` left in any garbled copy of the sources in which some member of `α`
//! always survives.
//!
//! The feasible set is a product, over support points, of simplices on the
//! allowed failure patterns, and `I(T; X̃)` is convex in the strategy, so a
//! conditional-gradient method with a duality-gap certificate solves it
//! globally.

mod frank_wolfe;
mod oracle;
mod pairwise;
mod problem;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::SourceIndexSet;
use crate::error::{Error, Result};
use crate::lattice::SourceAntichain;
use crate::sfs::{self, allowed_patterns, FailurePattern, FailureStrategy, StrategyRow};
use crate::JointSystem;

pub use oracle::oracle_grid_search;
use problem::Problem;

/// Largest reduced subsystem the solver accepts; pattern sets grow as `2^n`.
pub const MAX_SOLVER_SOURCES: usize = 16;

/// Step size rule for the conditional-gradient iterations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StepRule {
    /// `γ_k = 2 / (k + 2)`.
    OpenLoop,
    /// Exact minimization along the segment towards the oracle vertex.
    LineSearch,
    /// Row-by-row pairwise steps (away vertex to oracle vertex) with exact
    /// line search; one iteration is a sweep over all rows.
    #[default]
    BlockPairwise,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Duality gap, in bits, that certifies a solve.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Independent starts; the first is the uniform strategy.
    pub restarts: usize,
    /// Probability increment of the grid oracle.
    pub oracle_grid_step: f64,
    pub step_rule: StepRule,
    /// Seed for the randomized restarts.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-7,
            max_iterations: 10_000,
            restarts: 4,
            oracle_grid_step: 0.05,
            step_rule: StepRule::default(),
            seed: 0x5eed,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidOptions(format!("tolerance {} must be positive", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidOptions("max_iterations must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidOptions("restarts must be at least 1".into()));
        }
        if !(self.oracle_grid_step > 0.0 && self.oracle_grid_step <= 0.5) {
            return Err(Error::InvalidOptions(format!(
                "grid step {} outside (0, 0.5]",
                self.oracle_grid_step
            )));
        }
        Ok(())
    }
}

/// Result of one `I_ft` solve.
#[derive(Clone, Debug)]
pub struct SolverCertificate {
    /// `I_ft(α)` in bits.
    pub value: f64,
    /// A minimizing strategy on the full system.
    pub strategy: FailureStrategy,
    /// Frank-Wolfe gap at the returned strategy; bounds `value - I_ft(α)`.
    pub duality_gap: f64,
    pub iterations: usize,
    /// Sources the problem was solved on.
    pub reduced_index_set: SourceIndexSet,
    /// Final value of each converged restart.
    pub restart_values: Vec<f64>,
}

/// `I_ft(α)`, solved on the subsystem spanned by the members of `α`.
pub fn solve_ift(
    system: &JointSystem,
    alpha: &SourceAntichain,
    opts: &SolverOptions,
) -> Result<SolverCertificate> {
    check_arity(system, alpha)?;
    let reduced = sfs::reduce_to_subsystem(alpha);
    let sub = system.subsystem(reduced)?;
    let sub_alpha = alpha.relabel_into(reduced)?;
    let mut cert = frank_wolfe_minimize(&sub, &sub_alpha, opts)?;
    cert.strategy = lift_strategy(system, &sub, reduced, &cert.strategy);
    cert.reduced_index_set = reduced;
    Ok(cert)
}

/// Frank-Wolfe on `system` as given, without reducing to the sources that
/// `alpha` mentions.
pub fn frank_wolfe_minimize(
    system: &JointSystem,
    alpha: &SourceAntichain,
    opts: &SolverOptions,
) -> Result<SolverCertificate> {
    opts.validate()?;
    check_arity(system, alpha)?;
    let n = system.n();
    if n > MAX_SOLVER_SOURCES {
        return Err(Error::CapExceeded {
            n,
            cap: MAX_SOLVER_SOURCES,
        });
    }
    let full = SourceIndexSet::full(n)?;
    if system.support().len() <= 1 || system.target_marginal().len() <= 1 {
        return Ok(SolverCertificate {
            value: 0.0,
            strategy: FailureStrategy::constant(system, FailurePattern::all_alive(n))?,
            duality_gap: 0.0,
            iterations: 0,
            reduced_index_set: full,
            restart_values: vec![0.0],
        });
    }

    let problem = Problem::new(system, allowed_patterns(alpha, n)?);
    let k = problem.k();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<frank_wolfe::FwRun> = None;
    let mut worst_gap = 0.0f64;
    let mut total_iterations = 0;
    let mut restart_values = Vec::new();

    for restart in 0..opts.restarts {
        let start = if restart == 0 {
            vec![1.0 / k as f64; problem.rows * k]
        } else {
            random_rows(&mut rng, problem.rows, k)
        };
        let run = match opts.step_rule {
            StepRule::BlockPairwise => pairwise::run(&problem, start, opts.tolerance, opts.max_iterations),
            rule => frank_wolfe::run(&problem, start, opts.tolerance, opts.max_iterations, rule),
        };
        total_iterations = total_iterations.max(run.iterations);
        if !run.converged {
            worst_gap = worst_gap.max(run.gap);
            continue;
        }
        restart_values.push(run.value);
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
        // A single feasible point needs no second look.
        if k == 1 {
            break;
        }
    }

    let Some(best) = best else {
        return Err(Error::ConvergenceFailure {
            gap: worst_gap,
            tolerance: opts.tolerance,
            iterations: total_iterations,
        });
    };
    let strategy = strategy_from_weights(system, &problem, &best.weights);
    Ok(SolverCertificate {
        value: best.value,
        strategy,
        duality_gap: best.gap,
        iterations: best.iterations,
        reduced_index_set: full,
        restart_values,
    })
}

fn check_arity(system: &JointSystem, alpha: &SourceAntichain) -> Result<()> {
    if alpha.n() != system.n() {
        return Err(Error::ArityMismatch(format!(
            "antichain over n={} for a system with n={}",
            alpha.n(),
            system.n()
        )));
    }
    Ok(())
}

fn random_rows<R: Rng>(rng: &mut R, rows: usize, k: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(rows * k);
    for _ in 0..rows {
        // normalized exponentials: a uniform point of the simplex
        let row: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let s: f64 = row.iter().sum();
        w.extend(row.into_iter().map(|v| v / s));
    }
    w
}

fn strategy_from_weights(system: &JointSystem, problem: &Problem, w: &[f64]) -> FailureStrategy {
    let k = problem.k();
    let rows = system
        .support()
        .iter()
        .enumerate()
        .map(|(r, o)| StrategyRow {
            x: o.x.clone(),
            t: o.t,
            weights: problem
                .patterns
                .iter()
                .enumerate()
                .map(|(j, f)| (*f, w[r * k + j]))
                .filter(|(_, p)| *p > 0.0)
                .collect(),
        })
        .collect();
    FailureStrategy::from_rows_unchecked(system.n(), rows)
}

/// Extends a strategy on the subsystem over `reduced` to the full system;
/// sources outside `reduced` always crash.
fn lift_strategy(
    system: &JointSystem,
    sub: &JointSystem,
    reduced: SourceIndexSet,
    sub_strategy: &FailureStrategy,
) -> FailureStrategy {
    let n = system.n();
    let pos = reduced.positions();
    let rows = system
        .support()
        .iter()
        .map(|o| {
            let key: Vec<_> = pos.iter().map(|&p| o.x[p]).collect();
            let r = sub
                .support()
                .binary_search_by(|s| s.x.cmp(&key).then(s.t.cmp(&o.t)))
                .expect("subsystem support covers every projected outcome");
            let weights = sub_strategy.rows()[r]
                .weights
                .iter()
                .map(|&(f, w)| {
                    let mut alive = 0u32;
                    for (k, &p) in pos.iter().enumerate() {
                        if f.alive_mask() & (1 << k) != 0 {
                            alive |= 1 << p;
                        }
                    }
                    (FailurePattern::from_mask(n, alive), w)
                })
                .collect();
            StrategyRow {
                x: o.x.clone(),
                t: o.t,
                weights,
            }
        })
        .collect();
    FailureStrategy::from_rows_unchecked(n, rows)
}

/// `I(T; X̃)` for the garbling of `system` under `strategy`.
pub fn objective(system: &JointSystem, strategy: &FailureStrategy) -> Result<f64> {
    Ok(sfs::garble(system, strategy)?.mutual_information())
}

/// Gradient of `I(T; X̃)` with respect to the strategy weights on the
/// allowed patterns of `alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientTable {
    pub patterns: Vec<FailurePattern>,
    /// One entry per support point, aligned with `patterns`.
    pub rows: Vec<Vec<f64>>,
}

impl GradientTable {
    pub fn get(&self, row: usize, pattern: FailurePattern) -> Option<f64> {
        let j = self.patterns.iter().position(|&f| f == pattern)?;
        self.rows.get(row).map(|r| r[j])
    }
}

/// Entry `(x, t, f)` is `p(x, t) log2 p(t | x̃)` with `x̃` the crash of `x`
/// under `f`, taken under the garbled joint of `strategy`. Constants shared
/// by a whole row are omitted; they cancel on the feasible set.
pub fn objective_gradient(
    system: &JointSystem,
    alpha: &SourceAntichain,
    strategy: &FailureStrategy,
) -> Result<GradientTable> {
    check_arity(system, alpha)?;
    let patterns = allowed_patterns(alpha, system.n())?;
    // validates that the strategy belongs to this system
    sfs::garble(system, strategy)?;
    let problem = Problem::new(system, patterns.clone());
    let k = problem.k();
    let mut w = vec![0.0; problem.rows * k];
    for (r, row) in strategy.rows().iter().enumerate() {
        for &(f, p) in &row.weights {
            match patterns.iter().position(|&g| g == f) {
                Some(j) => w[r * k + j] = p,
                None if p > 0.0 => return Err(Error::InfeasibleStrategy),
                None => {}
            }
        }
    }
    let g = problem.garble(&w);
    let mut flat = vec![0.0; w.len()];
    problem.gradient(&g, &mut flat);
    Ok(GradientTable {
        patterns,
        rows: flat.chunks(k).map(<[f64]>::to_vec).collect(),
    })
}
