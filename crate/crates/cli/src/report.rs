//! Report documents and their table renderings. Every number passes through
//! [`round9`] so the bytes are stable across runs.

use std::fmt::Write;

use ftpid_core::{AxiomReport, FtProfile, Lattice, PidResult, SolverCertificate, SourceAntichain};
use serde::Serialize;

/// Rounds to 9 decimals and folds `-0` into `0`.
pub fn round9(v: f64) -> f64 {
    let r = (v * 1e9).round() / 1e9;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Output unit; the library always works in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unit {
    Bits,
    Nats,
}

impl Unit {
    pub fn name(self) -> &'static str {
        match self {
            Unit::Bits => "bits",
            Unit::Nats => "nats",
        }
    }

    pub fn convert(self, bits: f64) -> f64 {
        match self {
            Unit::Bits => round9(bits),
            Unit::Nats => round9(bits * std::f64::consts::LN_2),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AtomRow {
    pub antichain: String,
    pub i_cap: f64,
    pub pi: f64,
    pub gap: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ProfileRow {
    pub ell: usize,
    pub sources: Option<u64>,
    pub i_ft: f64,
}

#[derive(Debug, Serialize)]
pub struct DecompositionReport {
    pub measure: String,
    pub n: usize,
    pub unit: &'static str,
    pub atoms: Vec<AtomRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<ProfileRow>>,
    pub warnings: Vec<String>,
}

impl DecompositionReport {
    pub fn new(pid: &PidResult, profile: Option<&FtProfile>, unit: Unit) -> Self {
        Self {
            measure: pid.measure.to_string(),
            n: pid.n,
            unit: unit.name(),
            atoms: pid
                .records
                .iter()
                .map(|r| AtomRow {
                    antichain: r.antichain.to_string(),
                    i_cap: unit.convert(r.i_cap),
                    pi: unit.convert(r.pi),
                    gap: r.duality_gap.map(|g| unit.convert(g)),
                })
                .collect(),
            profile: profile.map(|p| profile_rows(p, unit)),
            warnings: pid.warnings.clone(),
        }
    }

    pub fn table(&self) -> String {
        let mut out = format!("measure {}  n {}  unit {}\n", self.measure, self.n, self.unit);
        let width = self.atoms.iter().map(|a| a.antichain.len()).max().unwrap_or(0).max(9);
        let _ = writeln!(out, "{:<width$}  {:>12}  {:>12}  {:>9}", "antichain", "i_cap", "pi", "gap");
        for a in &self.atoms {
            let gap = a.gap.map_or("-".to_string(), |g| format!("{g:.1e}"));
            let _ = writeln!(out, "{:<width$}  {:>12.9}  {:>12.9}  {:>9}", a.antichain, a.i_cap, a.pi, gap);
        }
        if let Some(profile) = &self.profile {
            out.push('\n');
            out.push_str(&profile_table(profile));
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

fn profile_rows(profile: &FtProfile, unit: Unit) -> Vec<ProfileRow> {
    profile
        .entries
        .iter()
        .map(|e| ProfileRow {
            ell: e.ell,
            sources: e.sources,
            i_ft: unit.convert(e.i_ft),
        })
        .collect()
}

fn profile_table(rows: &[ProfileRow]) -> String {
    let mut out = format!("{:>4}  {:>8}  {:>12}\n", "ell", "sources", "i_ft");
    for r in rows {
        let sources = r.sources.map_or("—".to_string(), |s| s.to_string());
        let _ = writeln!(out, "{:>4}  {:>8}  {:>12.9}", r.ell, sources, r.i_ft);
    }
    out
}

#[derive(Debug, Serialize)]
pub struct ProfileReport {
    pub n: usize,
    pub unit: &'static str,
    pub profile: Vec<ProfileRow>,
}

impl ProfileReport {
    pub fn new(profile: &FtProfile, unit: Unit) -> Self {
        Self {
            n: profile.n,
            unit: unit.name(),
            profile: profile_rows(profile, unit),
        }
    }

    pub fn table(&self) -> String {
        profile_table(&self.profile)
    }
}

#[derive(Debug, Serialize)]
pub struct RedundancyReport {
    pub antichain: String,
    pub unit: &'static str,
    pub i_ft: f64,
    pub gap: f64,
    pub iterations: usize,
    pub reduced_sources: String,
}

impl RedundancyReport {
    pub fn new(alpha: &SourceAntichain, cert: &SolverCertificate, unit: Unit) -> Self {
        Self {
            antichain: alpha.to_string(),
            unit: unit.name(),
            i_ft: unit.convert(cert.value),
            gap: unit.convert(cert.duality_gap),
            iterations: cert.iterations,
            reduced_sources: cert.reduced_index_set.to_string(),
        }
    }

    pub fn table(&self) -> String {
        format!(
            "antichain        {}\ni_ft             {:.9} {}\nduality gap      {:.1e}\niterations       {}\nreduced sources  {}\n",
            self.antichain, self.i_ft, self.unit, self.gap, self.iterations, self.reduced_sources
        )
    }
}

#[derive(Debug, Serialize)]
pub struct LatticeNode {
    pub index: usize,
    pub antichain: String,
    /// Hasse covers below this node.
    pub covers: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct LatticeReport {
    pub n: usize,
    pub nodes: Vec<LatticeNode>,
}

impl LatticeReport {
    pub fn new(lattice: &Lattice) -> Self {
        let nodes = lattice.nodes();
        Self {
            n: lattice.n(),
            nodes: nodes
                .iter()
                .enumerate()
                .map(|(k, alpha)| LatticeNode {
                    index: k,
                    antichain: alpha.to_string(),
                    covers: lattice.lower_covers(k).into_iter().map(|c| nodes[c].to_string()).collect(),
                })
                .collect(),
        }
    }

    pub fn table(&self) -> String {
        let width = self.nodes.iter().map(|v| v.antichain.len()).max().unwrap_or(0).max(9);
        let mut out = format!("{:>5}  {:<width$}  covers\n", "index", "antichain");
        for v in &self.nodes {
            let line = format!("{:>5}  {:<width$}  {}", v.index, v.antichain, v.covers.join(" "));
            let _ = writeln!(out, "{}", line.trim_end());
        }
        out
    }
}

#[derive(Debug, Serialize)]
pub struct CheckRow {
    pub axiom: String,
    pub subject: String,
    pub margin: f64,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub checks: usize,
    pub failed: Vec<CheckRow>,
    pub all_passed: bool,
}

impl VerifyReport {
    pub fn new(report: &AxiomReport) -> Self {
        Self {
            checks: report.checks.len(),
            failed: report
                .failures()
                .map(|c| CheckRow {
                    axiom: c.kind.to_string(),
                    subject: c.subject.clone(),
                    margin: round9(c.margin),
                    passed: c.passed,
                })
                .collect(),
            all_passed: report.all_passed(),
        }
    }

    pub fn table(&self) -> String {
        if self.all_passed {
            return format!("{} checks, all checks passed\n", self.checks);
        }
        let mut out = format!("{} of {} checks failed\n", self.failed.len(), self.checks);
        for c in &self.failed {
            let _ = writeln!(out, "{:<16} {:<28} margin {:.9}", c.axiom, c.subject, c.margin);
        }
        out
    }
}
