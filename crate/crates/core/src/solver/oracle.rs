//! Gradient-free upper bound on `I_ft(α)` from strategies whose rows are
//! points of a regular grid on the allowed-pattern simplex.
//!
//! Every evaluation goes through [`crate::sfs::garble`] and the generic
//! mutual information, not through the solver's dense encoding.

use crate::error::{Error, Result};
use crate::lattice::SourceAntichain;
use crate::sfs::{self, allowed_patterns, FailurePattern, FailureStrategy};
use crate::JointSystem;

/// Upper limit on enumerated strategies.
pub const ORACLE_LIMIT: u128 = 10_000_000;

/// Full grid products up to this size are enumerated outright; larger ones
/// are searched row by row from every deterministic strategy's best.
const EXHAUSTIVE_LIMIT: u128 = 200_000;

const MAX_SWEEPS: usize = 200;

/// Minimum of `I(T; X̃)` over grid strategies on the reduced subsystem.
pub fn oracle_grid_search(system: &JointSystem, alpha: &SourceAntichain, step: f64) -> Result<f64> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::InvalidOptions(format!("grid step {step} outside (0, 0.5]")));
    }
    let units = (1.0 / step).round() as usize;
    if ((units as f64) * step - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidOptions(format!("grid step {step} does not divide 1")));
    }
    if alpha.n() != system.n() {
        return Err(Error::ArityMismatch(format!(
            "antichain over n={} for a system with n={}",
            alpha.n(),
            system.n()
        )));
    }
    let reduced = sfs::reduce_to_subsystem(alpha);
    let sub = system.subsystem(reduced)?;
    let sub_alpha = alpha.relabel_into(reduced)?;
    let patterns = allowed_patterns(&sub_alpha, sub.n())?;
    let rows = sub.support().len();
    let grid = simplex_grid(patterns.len(), units);

    let eval = |choice: &[usize]| -> f64 {
        let mut r = 0;
        let strategy = FailureStrategy::from_fn(&sub, |_, _| {
            let point = &grid[choice[r]];
            r += 1;
            patterns
                .iter()
                .zip(point)
                .filter(|(_, &u)| u > 0)
                .map(|(&f, &u)| (f, u as f64 / units as f64))
                .collect::<Vec<(FailurePattern, f64)>>()
        })
        .expect("grid rows are stochastic");
        sfs::garble(&sub, &strategy)
            .expect("strategy built on this support")
            .mutual_information()
    };

    let full = pow_saturating(grid.len() as u128, rows);
    if full <= EXHAUSTIVE_LIMIT {
        let mut best = f64::INFINITY;
        for_each_product(grid.len(), rows, |c| best = best.min(eval(c)));
        return Ok(best);
    }

    let vertices = pow_saturating(patterns.len() as u128, rows);
    if vertices > ORACLE_LIMIT {
        return Err(Error::OracleTooLarge(format!(
            "{} allowed patterns on {rows} support points",
            patterns.len()
        )));
    }
    // grid index of each vertex of the pattern simplex
    let vertex_ids: Vec<usize> = (0..patterns.len())
        .map(|j| grid.iter().position(|p| p[j] == units).unwrap())
        .collect();
    let mut best_vertex = vec![vertex_ids[0]; rows];
    let mut best = f64::INFINITY;
    for_each_product(patterns.len(), rows, |c| {
        let choice: Vec<usize> = c.iter().map(|&j| vertex_ids[j]).collect();
        let v = eval(&choice);
        if v < best {
            best = v;
            best_vertex = choice;
        }
    });

    let centre = grid
        .iter()
        .enumerate()
        .min_by_key(|(_, p)| p.iter().max().copied().unwrap_or(0))
        .map(|(i, _)| i)
        .unwrap();
    for start in [best_vertex, vec![centre; rows]] {
        best = best.min(row_descent(&eval, start, grid.len()));
    }
    Ok(best)
}

/// Cyclic exact minimization of one row at a time over the grid.
fn row_descent(eval: &impl Fn(&[usize]) -> f64, mut choice: Vec<usize>, points: usize) -> f64 {
    let mut value = eval(&choice);
    for _ in 0..MAX_SWEEPS {
        let mut improved = false;
        for r in 0..choice.len() {
            let keep = choice[r];
            let mut best_here = (value, keep);
            for g in 0..points {
                if g == keep {
                    continue;
                }
                choice[r] = g;
                let v = eval(&choice);
                if v < best_here.0 - 1e-15 {
                    best_here = (v, g);
                }
            }
            choice[r] = best_here.1;
            if best_here.1 != keep {
                improved = true;
                value = best_here.0;
            }
        }
        if !improved {
            break;
        }
    }
    value
}

/// All compositions of `units` into `k` nonnegative parts.
fn simplex_grid(k: usize, units: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == k {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for u in 0..=left {
            cur.push(u);
            rec(k, left - u, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, units, &mut Vec::with_capacity(k), &mut out);
    out
}

fn pow_saturating(base: u128, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base))
}

fn for_each_product(radix: usize, len: usize, mut f: impl FnMut(&[usize])) {
    let mut c = vec![0usize; len];
    loop {
        f(&c);
        let mut i = 0;
        while i < len {
            c[i] += 1;
            if c[i] < radix {
                break;
            }
            c[i] = 0;
            i += 1;
        }
        if i == len {
            return;
        }
    }
}
