//! Classical reference quantities: interaction information, the `I_min`
//! redundancy and bivariate PID bookkeeping.

use crate::dist::SourceIndexSet;
use crate::error::{Error, Result};
use crate::lattice::SourceAntichain;
use crate::JointSystem;

/// The four bivariate atoms, in bits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BivariatePid {
    pub redundancy: f64,
    pub unique1: f64,
    pub unique2: f64,
    pub synergy: f64,
}

fn require_bivariate(system: &JointSystem) -> Result<()> {
    if system.n() != 2 {
        return Err(Error::ArityError {
            expected: 2,
            found: system.n(),
        });
    }
    Ok(())
}

fn one() -> SourceIndexSet {
    SourceIndexSet::singleton(1).unwrap()
}

fn two() -> SourceIndexSet {
    SourceIndexSet::singleton(2).unwrap()
}

/// `I(T; X1 | X2) − I(T; X1)`. Positive means synergy dominates, negative
/// redundancy.
pub fn interaction_information(system: &JointSystem) -> Result<f64> {
    require_bivariate(system)?;
    let conditional = system.conditional_mutual_information(one(), Some(two()))?;
    Ok(conditional - system.mutual_information(one())?)
}

/// `Σ_t p(t) min_{A∈α} I(T = t; X_A)`.
pub fn i_min(system: &JointSystem, alpha: &SourceAntichain) -> Result<f64> {
    if alpha.n() != system.n() {
        return Err(Error::ArityMismatch(format!(
            "antichain over n={} for a system with n={}",
            alpha.n(),
            system.n()
        )));
    }
    let mut total = 0.0;
    for (&t, &pt) in &system.target_marginal() {
        if pt <= 0.0 {
            continue;
        }
        let mut least = f64::INFINITY;
        for &member in alpha.members() {
            least = least.min(system.specific_information(t, member)?);
        }
        total += pt * least;
    }
    Ok(total.max(0.0))
}

/// Fills in the unique and synergistic atoms once the redundancy is fixed.
pub fn bivariate_pid_from_redundancy(system: &JointSystem, redundancy: f64) -> Result<BivariatePid> {
    require_bivariate(system)?;
    let i1 = system.mutual_information(one())?;
    let i2 = system.mutual_information(two())?;
    let i12 = system.total_mutual_information();
    let max = i1.min(i2);
    if !(redundancy >= -1e-12 && redundancy <= max + 1e-12) {
        return Err(Error::RedundancyOutOfRange { r: redundancy, max });
    }
    let unique1 = i1 - redundancy;
    let unique2 = i2 - redundancy;
    Ok(BivariatePid {
        redundancy,
        unique1,
        unique2,
        synergy: i12 - redundancy - unique1 - unique2,
    })
}
