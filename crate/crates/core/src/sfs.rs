//! Source-fallible systems: crash-failure strategies, the garbled systems
//! they induce, and redundant satisfaction of an antichain.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::dist::{
    self, low_bits, Outcome, SourceIndexSet, Symbol, FAILURE_SYMBOL, NORMALIZATION_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::lattice::SourceAntichain;
use crate::JointSystem;

/// Which sources are alive. Bit `i - 1` set means source `i` reports its
/// true value; cleared means it crashed and reports `0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FailurePattern {
    n: u8,
    alive: u32,
}

impl FailurePattern {
    /// From a 0/1 vector `(f_1, ..., f_n)`.
    pub fn new(bits: &[u8]) -> Result<Self> {
        if bits.is_empty() || bits.len() > SourceIndexSet::MAX_INDEX {
            return Err(Error::ArityMismatch(format!("pattern of length {}", bits.len())));
        }
        let mut alive = 0;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => alive |= 1 << i,
                _ => return Err(Error::Parse(format!("pattern bit {b} is not 0 or 1"))),
            }
        }
        Ok(Self {
            n: bits.len() as u8,
            alive,
        })
    }

    pub fn from_mask(n: usize, alive: u32) -> Self {
        debug_assert!((1..=SourceIndexSet::MAX_INDEX).contains(&n));
        Self {
            n: n as u8,
            alive: alive & low_bits(n),
        }
    }

    pub fn all_alive(n: usize) -> Self {
        Self::from_mask(n, low_bits(n))
    }

    pub fn all_failed(n: usize) -> Self {
        Self::from_mask(n, 0)
    }

    pub fn n(self) -> usize {
        self.n as usize
    }

    pub fn alive_mask(self) -> u32 {
        self.alive
    }

    /// `f_i` for a 1-based index.
    pub fn is_alive(self, index: usize) -> bool {
        self.alive & (1 << (index - 1)) != 0
    }

    pub fn bits(self) -> Vec<u8> {
        (0..self.n).map(|i| ((self.alive >> i) & 1) as u8).collect()
    }

    /// True when every source of `set` survives.
    #[inline]
    pub fn covers(self, set: SourceIndexSet) -> bool {
        set.mask() & !self.alive == 0
    }

    /// Applies the crash map to a source vector.
    pub fn apply(self, x: &[Symbol]) -> Vec<Symbol> {
        x.iter()
            .enumerate()
            .map(|(i, &s)| if self.alive & (1 << i) != 0 { s } else { FAILURE_SYMBOL })
            .collect()
    }
}

impl Ord for FailurePattern {
    /// Lexicographic on `(f_1, ..., f_n)`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.bits().cmp(&other.bits()))
    }
}

impl PartialOrd for FailurePattern {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FailurePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, b) in self.bits().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for FailurePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All `2^n` patterns in canonical order.
pub fn all_patterns(n: usize) -> Vec<FailurePattern> {
    let mut v: Vec<FailurePattern> = (0..=low_bits(n))
        .map(|m| FailurePattern::from_mask(n, m))
        .collect();
    v.sort();
    v
}

/// Patterns under which at least one member of `alpha` is fully alive,
/// in canonical order.
pub fn allowed_patterns(alpha: &SourceAntichain, n: usize) -> Result<Vec<FailurePattern>> {
    if alpha.n() != n {
        return Err(Error::ArityMismatch(format!(
            "antichain over n={} used with n={n}",
            alpha.n()
        )));
    }
    Ok(all_patterns(n)
        .into_iter()
        .filter(|f| satisfies(*f, alpha))
        .collect())
}

#[inline]
pub(crate) fn satisfies(pattern: FailurePattern, alpha: &SourceAntichain) -> bool {
    alpha.members().iter().any(|&m| pattern.covers(m))
}

/// Failure distribution at one support point `(x, t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyRow {
    pub x: Vec<Symbol>,
    pub t: Symbol,
    /// Patterns in canonical order, each listed once.
    pub weights: Vec<(FailurePattern, f64)>,
}

impl StrategyRow {
    pub fn probability(&self, pattern: FailurePattern) -> f64 {
        self.weights
            .iter()
            .find(|(f, _)| *f == pattern)
            .map_or(0.0, |(_, w)| *w)
    }
}

/// A conditional law of failure patterns given `(x, t)`, defined on exactly
/// the support of a base system. Deterministic strategies are the
/// point-mass case.
#[derive(Clone, Debug, PartialEq)]
pub struct FailureStrategy {
    n: usize,
    rows: Vec<StrategyRow>,
}

impl FailureStrategy {
    /// Rows must follow the system's support order.
    pub fn new(system: &JointSystem, rows: Vec<StrategyRow>) -> Result<Self> {
        let n = system.n();
        let support = system.support();
        if rows.len() != support.len() {
            return Err(Error::StrategySupportMismatch(format!(
                "{} rows for a support of {}",
                rows.len(),
                support.len()
            )));
        }
        let mut clean = Vec::with_capacity(rows.len());
        for (row, o) in rows.into_iter().zip(support) {
            if row.x != o.x || row.t != o.t {
                return Err(Error::StrategySupportMismatch(format!(
                    "row for x={:?}, t={} where x={:?}, t={} was expected",
                    row.x, row.t, o.x, o.t
                )));
            }
            let mut merged: BTreeMap<FailurePattern, f64> = BTreeMap::new();
            for (f, w) in row.weights {
                if f.n() != n {
                    return Err(Error::ArityMismatch(format!("pattern {f} for n={n}")));
                }
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::StrategyNotStochastic {
                        x: row.x,
                        t: row.t,
                        sum: w,
                    });
                }
                *merged.entry(f).or_insert(0.0) += w;
            }
            let sum: f64 = merged.values().sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(Error::StrategyNotStochastic {
                    x: row.x,
                    t: row.t,
                    sum,
                });
            }
            clean.push(StrategyRow {
                x: row.x,
                t: row.t,
                weights: merged.into_iter().filter(|(_, w)| *w > 0.0).collect(),
            });
        }
        Ok(Self { n, rows: clean })
    }

    pub fn from_fn(
        system: &JointSystem,
        mut f: impl FnMut(&[Symbol], Symbol) -> Vec<(FailurePattern, f64)>,
    ) -> Result<Self> {
        let rows = system
            .support()
            .iter()
            .map(|o| StrategyRow {
                x: o.x.clone(),
                t: o.t,
                weights: f(&o.x, o.t),
            })
            .collect();
        Self::new(system, rows)
    }

    /// A pattern chosen as a function of `(x, t)`.
    pub fn deterministic(
        system: &JointSystem,
        mut f: impl FnMut(&[Symbol], Symbol) -> FailurePattern,
    ) -> Result<Self> {
        Self::from_fn(system, |x, t| vec![(f(x, t), 1.0)])
    }

    /// The same pattern everywhere.
    pub fn constant(system: &JointSystem, pattern: FailurePattern) -> Result<Self> {
        Self::deterministic(system, |_, _| pattern)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[StrategyRow] {
        &self.rows
    }

    pub fn is_deterministic(&self) -> bool {
        self.rows.iter().all(|r| r.weights.len() == 1)
    }

    /// Every pattern with positive probability somewhere.
    pub fn active_patterns(&self) -> Vec<FailurePattern> {
        let mut v: Vec<FailurePattern> = self
            .rows
            .iter()
            .flat_map(|r| r.weights.iter().map(|(f, _)| *f))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub(crate) fn from_rows_unchecked(n: usize, rows: Vec<StrategyRow>) -> Self {
        Self { n, rows }
    }
}

/// The joint law of `(X̃, T)`. Source alphabets include the failure symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct GarbledSystem {
    target_alphabet: Vec<Symbol>,
    source_alphabets: Vec<Vec<Symbol>>,
    support: Vec<Outcome>,
}

impl GarbledSystem {
    fn from_table(
        target_alphabet: Vec<Symbol>,
        source_alphabets: Vec<Vec<Symbol>>,
        table: BTreeMap<(Vec<Symbol>, Symbol), f64>,
    ) -> Self {
        let support = table
            .into_iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|((x, t), p)| Outcome { x, t, p })
            .collect();
        Self {
            target_alphabet,
            source_alphabets,
            support,
        }
    }

    pub fn n(&self) -> usize {
        self.source_alphabets.len()
    }

    pub fn target_alphabet(&self) -> &[Symbol] {
        &self.target_alphabet
    }

    pub fn source_alphabets(&self) -> &[Vec<Symbol>] {
        &self.source_alphabets
    }

    pub fn support(&self) -> &[Outcome] {
        &self.support
    }

    pub fn probability(&self, x: &[Symbol], t: Symbol) -> f64 {
        self.support
            .binary_search_by(|o| o.x.as_slice().cmp(x).then(o.t.cmp(&t)))
            .map_or(0.0, |k| self.support[k].p)
    }

    pub fn total_mass(&self) -> f64 {
        self.support.iter().map(|o| o.p).sum()
    }

    pub fn target_marginal(&self) -> BTreeMap<Symbol, f64> {
        dist::target_marginal_of(&self.support)
    }

    /// `I(T; X̃_1, ..., X̃_n)`.
    pub fn mutual_information(&self) -> f64 {
        dist::mutual_information_of(&self.support, low_bits(self.n()))
    }

    /// `I(T; X̃_I)`.
    pub fn source_mutual_information(&self, source: SourceIndexSet) -> Result<f64> {
        source.check_within(self.n())?;
        Ok(dist::mutual_information_of(&self.support, source.mask()))
    }
}

/// Pushes the base system through a failure strategy:
/// `p(x̃, t) = Σ p(x, t) W(f | x, t)` over all `(x, f)` that crash to `x̃`.
pub fn garble(system: &JointSystem, strategy: &FailureStrategy) -> Result<GarbledSystem> {
    if strategy.n() != system.n() {
        return Err(Error::StrategySupportMismatch(format!(
            "strategy for n={} applied to n={}",
            strategy.n(),
            system.n()
        )));
    }
    if strategy.rows().len() != system.support().len() {
        return Err(Error::StrategySupportMismatch(format!(
            "{} rows for a support of {}",
            strategy.rows().len(),
            system.support().len()
        )));
    }
    let mut table: BTreeMap<(Vec<Symbol>, Symbol), f64> = BTreeMap::new();
    for (o, row) in system.support().iter().zip(strategy.rows()) {
        if row.x != o.x || row.t != o.t {
            return Err(Error::StrategySupportMismatch(format!(
                "row for x={:?}, t={} where x={:?}, t={} was expected",
                row.x, row.t, o.x, o.t
            )));
        }
        for &(f, w) in &row.weights {
            if w > 0.0 {
                *table.entry((f.apply(&o.x), o.t)).or_insert(0.0) += o.p * w;
            }
        }
    }
    let alphabets = system
        .source_alphabets()
        .iter()
        .map(|a| with_failure_symbol(a))
        .collect();
    Ok(GarbledSystem::from_table(
        system.target_alphabet().to_vec(),
        alphabets,
        table,
    ))
}

fn with_failure_symbol(alphabet: &[Symbol]) -> Vec<Symbol> {
    let mut a = Vec::with_capacity(alphabet.len() + 1);
    a.push(FAILURE_SYMBOL);
    a.extend(alphabet.iter().copied().filter(|&s| s != FAILURE_SYMBOL));
    a
}

/// True iff, at every support point, all positive-probability patterns keep
/// some member of `alpha` fully alive.
pub fn redundantly_satisfies(strategy: &FailureStrategy, alpha: &SourceAntichain) -> Result<bool> {
    if strategy.n() != alpha.n() {
        return Err(Error::ArityMismatch(format!(
            "strategy n={} vs antichain n={}",
            strategy.n(),
            alpha.n()
        )));
    }
    Ok(strategy
        .rows()
        .iter()
        .all(|r| r.weights.iter().all(|&(f, w)| w <= 0.0 || satisfies(f, alpha))))
}

/// Places a garbled subsystem over the sources `indices` into an `n`-source
/// system, with every other source permanently crashed.
pub fn embed(sub: &GarbledSystem, indices: SourceIndexSet, n: usize) -> Result<GarbledSystem> {
    if sub.n() != indices.len() {
        return Err(Error::ArityMismatch(format!(
            "subsystem has {} sources but index set {indices} has {}",
            sub.n(),
            indices.len()
        )));
    }
    indices
        .check_within(n)
        .map_err(|_| Error::ArityMismatch(format!("{indices} is not inside [{n}]")))?;
    let pos = indices.positions();
    let mut alphabets = vec![vec![FAILURE_SYMBOL]; n];
    for (k, &p) in pos.iter().enumerate() {
        alphabets[p] = sub.source_alphabets()[k].clone();
    }
    let mut table = BTreeMap::new();
    for o in sub.support() {
        let mut x = vec![FAILURE_SYMBOL; n];
        for (k, &p) in pos.iter().enumerate() {
            x[p] = o.x[k];
        }
        *table.entry((x, o.t)).or_insert(0.0) += o.p;
    }
    Ok(GarbledSystem::from_table(
        sub.target_alphabet().to_vec(),
        alphabets,
        table,
    ))
}

/// Smallest subsystem on which the redundancy of `alpha` can be computed.
pub fn reduce_to_subsystem(alpha: &SourceAntichain) -> SourceIndexSet {
    alpha.union()
}
