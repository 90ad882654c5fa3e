//! Lattice-wide decomposition, the crash-tolerance profile and axiom checks.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::baselines::{self, BivariatePid};
use crate::dist::SourceIndexSet;
use crate::error::{Error, Result};
use crate::lattice::{alpha_ell, Lattice, SourceAntichain, DEFAULT_LATTICE_CAP};
use crate::solver::{solve_ift, SolverOptions};
use crate::JointSystem;

/// Slack allowed when checking axioms against solver output.
pub const AXIOM_TOLERANCE: f64 = 1e-6;

/// Which redundancy function feeds the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Measure {
    /// Fault-tolerance redundancy.
    #[default]
    Ft,
    /// Minimum specific information.
    Min,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Ft => "ft",
            Measure::Min => "min",
        })
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ft" => Ok(Measure::Ft),
            "min" => Ok(Measure::Min),
            other => Err(Error::Parse(format!("unknown measure \"{other}\""))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EngineOptions {
    pub solver: SolverOptions,
    pub lattice_cap: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            lattice_cap: DEFAULT_LATTICE_CAP,
        }
    }
}

/// One lattice node of a decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomRecord {
    pub antichain: SourceAntichain,
    /// Cumulative redundancy at this node.
    pub i_cap: f64,
    /// Möbius atom.
    pub pi: f64,
    /// Solver certificate, for `Measure::Ft`.
    pub duality_gap: Option<f64>,
    pub iterations: Option<usize>,
    /// Atom is negative beyond solver noise.
    pub negative: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PidResult {
    pub n: usize,
    pub measure: Measure,
    /// Canonical lattice order.
    pub records: Vec<AtomRecord>,
    pub warnings: Vec<String>,
}

impl PidResult {
    pub fn get(&self, alpha: &SourceAntichain) -> Option<&AtomRecord> {
        self.records
            .binary_search_by(|r| r.antichain.cmp(alpha))
            .ok()
            .map(|k| &self.records[k])
    }

    /// `(R, U1, U2, S)` for a two-source decomposition.
    pub fn bivariate_atoms(&self) -> Option<BivariatePid> {
        if self.n != 2 {
            return None;
        }
        let pi = |s: &str| self.get(&SourceAntichain::parse(s, 2).unwrap()).map(|r| r.pi);
        Some(BivariatePid {
            redundancy: pi("{1}{2}")?,
            unique1: pi("{1}")?,
            unique2: pi("{2}")?,
            synergy: pi("{1,2}")?,
        })
    }
}

struct NodeValue {
    value: f64,
    gap: Option<f64>,
    iterations: Option<usize>,
}

fn node_value(
    system: &JointSystem,
    alpha: &SourceAntichain,
    measure: Measure,
    opts: &SolverOptions,
) -> Result<NodeValue> {
    match measure {
        Measure::Ft => {
            let cert = solve_ift(system, alpha, opts)?;
            Ok(NodeValue {
                value: cert.value,
                gap: Some(cert.duality_gap),
                iterations: Some(cert.iterations),
            })
        }
        Measure::Min => Ok(NodeValue {
            value: baselines::i_min(system, alpha)?,
            gap: None,
            iterations: None,
        }),
    }
}

/// Redundancy at every node, solved in parallel and returned in lattice
/// order.
fn lattice_values(
    system: &JointSystem,
    lattice: &Lattice,
    measure: Measure,
    opts: &SolverOptions,
) -> Result<Vec<NodeValue>> {
    lattice
        .nodes()
        .par_iter()
        .map(|alpha| node_value(system, alpha, measure, opts))
        .collect()
}

/// Full decomposition: redundancy at every antichain, then Möbius atoms.
pub fn decompose(system: &JointSystem, measure: Measure, opts: &EngineOptions) -> Result<PidResult> {
    opts.solver.validate()?;
    let lattice = Lattice::new(system.n(), opts.lattice_cap)?;
    let values = lattice_values(system, &lattice, measure, &opts.solver)?;
    let cumulative: Vec<f64> = values.iter().map(|v| v.value).collect();
    let atoms = lattice.moebius_invert(&cumulative);

    let noise = match measure {
        Measure::Ft => (10.0 * opts.solver.tolerance).max(1e-9),
        Measure::Min => 1e-9,
    };
    let mut warnings = Vec::new();
    let records = lattice
        .nodes()
        .iter()
        .zip(values)
        .zip(atoms)
        .map(|((alpha, v), pi)| {
            let negative = pi < -noise;
            if negative {
                warnings.push(format!("negative atom at {alpha}: {pi:.9} bits"));
            }
            AtomRecord {
                antichain: alpha.clone(),
                i_cap: v.value,
                pi,
                duality_gap: v.gap,
                iterations: v.iterations,
                negative,
            }
        })
        .collect();
    Ok(PidResult {
        n: system.n(),
        measure,
        records,
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileEntry {
    /// Number of tolerated crashes.
    pub ell: usize,
    /// `C(n, ell)` surviving sources of size `n - ell`; `None` at `ell = n`.
    pub sources: Option<u64>,
    pub i_ft: f64,
    pub duality_gap: f64,
}

/// Guaranteed information as a function of how many sources may crash.
#[derive(Clone, Debug, PartialEq)]
pub struct FtProfile {
    pub n: usize,
    pub entries: Vec<ProfileEntry>,
}

impl FtProfile {
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.i_ft).collect()
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// `I_ft(α_ℓ)` for `ℓ = 0..n`, with `α_n` (nothing survives) worth 0.
pub fn ft_profile(system: &JointSystem, opts: &SolverOptions) -> Result<FtProfile> {
    opts.validate()?;
    let n = system.n();
    let mut entries: Vec<ProfileEntry> = (0..n)
        .into_par_iter()
        .map(|ell| {
            let cert = solve_ift(system, &alpha_ell(n, ell)?, opts)?;
            Ok(ProfileEntry {
                ell,
                sources: Some(binomial(n, ell)),
                i_ft: cert.value,
                duality_gap: cert.duality_gap,
            })
        })
        .collect::<Result<_>>()?;
    entries.push(ProfileEntry {
        ell: n,
        sources: None,
        i_ft: 0.0,
        duality_gap: 0.0,
    });
    Ok(FtProfile { n, entries })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxiomKind {
    Symmetry,
    SelfRedundancy,
    Monotonicity,
}

impl fmt::Display for AxiomKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxiomKind::Symmetry => "symmetry",
            AxiomKind::SelfRedundancy => "self-redundancy",
            AxiomKind::Monotonicity => "monotonicity",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomCheck {
    pub kind: AxiomKind,
    pub subject: String,
    /// Nonnegative when the axiom holds exactly; checks pass down to
    /// `-AXIOM_TOLERANCE`.
    pub margin: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, kind: AxiomKind, subject: String, margin: f64) {
        self.checks.push(AxiomCheck {
            kind,
            subject,
            margin,
            passed: margin >= -AXIOM_TOLERANCE,
        });
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Checks symmetry, self-redundancy and lattice monotonicity of `I_ft` on
/// every node and every comparable pair. Limited to `n <= 3`.
pub fn verify_axioms(system: &JointSystem, opts: &SolverOptions) -> Result<AxiomReport> {
    opts.validate()?;
    let lattice = Lattice::new(system.n(), 3)?;
    let values: Vec<f64> = lattice_values(system, &lattice, Measure::Ft, opts)?
        .into_iter()
        .map(|v| v.value)
        .collect();
    let mut report = AxiomReport::default();

    for (k, alpha) in lattice.nodes().iter().enumerate() {
        if alpha.len() < 2 {
            continue;
        }
        for perm in permutations(alpha.len()).into_iter().skip(1) {
            let shuffled = alpha.with_member_order(&perm)?;
            let v = solve_ift(system, &shuffled, opts)?.value;
            let order: Vec<String> = shuffled.members().iter().map(ToString::to_string).collect();
            report.push(AxiomKind::Symmetry, order.concat(), -(v - values[k]).abs());
        }
    }

    for (k, alpha) in lattice.nodes().iter().enumerate() {
        if alpha.is_singleton() {
            let source: SourceIndexSet = alpha.members()[0];
            let mi = system.mutual_information(source)?;
            report.push(AxiomKind::SelfRedundancy, alpha.to_string(), -(values[k] - mi).abs());
        }
    }

    for b in 0..lattice.len() {
        for &a in lattice.strict_down(b) {
            let subject = format!("{} <= {}", lattice.nodes()[a], lattice.nodes()[b]);
            report.push(AxiomKind::Monotonicity, subject, values[b] - values[a]);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn entrance_ft_atoms() {
        let r = decompose(&fixtures::entrance_cameras(), Measure::Ft, &EngineOptions::default()).unwrap();
        let p = r.bivariate_atoms().unwrap();
        assert!(close(p.redundancy, 0.0, 1e-6));
        assert!(close(p.unique1, 0.5, 1e-6));
        assert!(close(p.unique2, 0.5, 1e-6));
        assert!(close(p.synergy, 0.0, 1e-6));
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn entrance_min_atoms() {
        let r = decompose(&fixtures::entrance_cameras(), Measure::Min, &EngineOptions::default()).unwrap();
        let p = r.bivariate_atoms().unwrap();
        assert!(close(p.redundancy, 0.5, 1e-9));
        assert!(close(p.unique1, 0.0, 1e-9));
        assert!(close(p.unique2, 0.0, 1e-9));
        assert!(close(p.synergy, 0.5, 1e-9));
        assert!(r.records.iter().all(|a| a.duality_gap.is_none()));
    }

    #[test]
    fn copy_ft_atoms() {
        let r = decompose(&fixtures::copy(), Measure::Ft, &EngineOptions::default()).unwrap();
        let p = r.bivariate_atoms().unwrap();
        assert!(close(p.redundancy, 1.0, 1e-6));
        assert!(close(p.unique1, 0.0, 1e-6));
        assert!(close(p.unique2, 0.0, 1e-6));
        assert!(close(p.synergy, 0.0, 1e-6));
    }

    #[test]
    fn profiles() {
        let opts = SolverOptions::default();
        let cases = [
            (fixtures::entrance_cameras(), [1.0, 0.0, 0.0]),
            (fixtures::copy(), [1.0, 1.0, 0.0]),
            (fixtures::xor(), [1.0, 0.0, 0.0]),
        ];
        for (system, want) in cases {
            let p = ft_profile(&system, &opts).unwrap();
            assert_eq!(p.entries.len(), 3);
            for (got, want) in p.values().iter().zip(want) {
                assert!(close(*got, want, 1e-6), "{:?}", p.values());
            }
            assert_eq!(p.entries[0].sources, Some(1));
            assert_eq!(p.entries[1].sources, Some(2));
            assert_eq!(p.entries[2].sources, None);
        }
    }

    #[test]
    fn axioms_hold_on_fixtures() {
        let opts = SolverOptions::default();
        for system in [fixtures::entrance_cameras(), fixtures::copy(), fixtures::xor()] {
            let report = verify_axioms(&system, &opts).unwrap();
            assert!(report.all_passed(), "{:?}", report.failures().collect::<Vec<_>>());
            assert!(report.checks.iter().any(|c| c.kind == AxiomKind::Monotonicity));
        }
    }

    #[test]
    fn axioms_cover_symmetry_for_three_sources() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        let system = fixtures::random_system(&mut rng, &fixtures::RandomSystemSpec::new(3, 2));
        let report = verify_axioms(&system, &SolverOptions::default()).unwrap();
        assert!(report.checks.iter().any(|c| c.kind == AxiomKind::Symmetry));
        assert!(report.all_passed(), "{:?}", report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn verify_rejects_large_systems() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1);
        let system = fixtures::random_system(&mut rng, &fixtures::RandomSystemSpec::new(4, 2));
        assert!(matches!(
            verify_axioms(&system, &SolverOptions::default()),
            Err(Error::CapExceeded { n: 4, cap: 3 })
        ));
    }

    #[test]
    fn measure_round_trip() {
        assert_eq!("ft".parse::<Measure>().unwrap(), Measure::Ft);
        assert_eq!(Measure::Min.to_string(), "min");
        assert!("broja".parse::<Measure>().is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(permutations(3).len(), 6);
    }
}
