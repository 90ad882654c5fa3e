//! Finite joint distributions of sources and a target, and the
//! information measures the rest of the crate is built on.
//!
//! All quantities are in bits. Terms with zero joint mass are skipped,
//! so `0 log 0` never gets evaluated.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// A variable outcome. `0` is reserved for a failed source.
pub type Symbol = u32;

/// Symbol emitted by a crashed source.
pub const FAILURE_SYMBOL: Symbol = 0;

/// Tolerance on the total input mass.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// A nonempty set of 1-based source indices, stored as a bitmask
/// (bit `i - 1` is index `i`).
///
/// Sets order by size first, then lexicographically by their sorted indices,
/// which is the member order used when printing antichains.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SourceIndexSet(u32);

impl SourceIndexSet {
    pub const MAX_INDEX: usize = 32;

    /// Builds a set from 1-based indices. Duplicates, zero and empty input
    /// are rejected.
    pub fn new(indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidIndexSet("empty index set".into()));
        }
        let mut mask = 0u32;
        for &i in indices {
            if i == 0 || i > Self::MAX_INDEX {
                return Err(Error::InvalidIndexSet(format!(
                    "index {i} outside 1..={}",
                    Self::MAX_INDEX
                )));
            }
            let bit = 1u32 << (i - 1);
            if mask & bit != 0 {
                return Err(Error::InvalidIndexSet(format!("duplicate index {i}")));
            }
            mask |= bit;
        }
        Ok(Self(mask))
    }

    pub fn from_mask(mask: u32) -> Option<Self> {
        (mask != 0).then_some(Self(mask))
    }

    pub fn singleton(index: usize) -> Result<Self> {
        Self::new(&[index])
    }

    /// `{1, ..., n}`.
    pub fn full(n: usize) -> Result<Self> {
        if n == 0 || n > Self::MAX_INDEX {
            return Err(Error::InvalidIndexSet(format!("cannot build [n] for n={n}")));
        }
        Ok(Self(low_bits(n)))
    }

    #[inline]
    pub fn mask(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        false
    }

    #[inline]
    pub fn contains(self, index: usize) -> bool {
        (1..=Self::MAX_INDEX).contains(&index) && self.0 & (1 << (index - 1)) != 0
    }

    #[inline]
    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Option<Self> {
        Self::from_mask(self.0 & other.0)
    }

    /// Ascending 1-based indices.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (1..=Self::MAX_INDEX).filter(move |&i| mask & (1 << (i - 1)) != 0)
    }

    /// Zero-based coordinate positions, ascending.
    pub(crate) fn positions(self) -> Vec<usize> {
        self.indices().map(|i| i - 1).collect()
    }

    pub fn max_index(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    /// Fails unless every index lies in `1..=n`.
    pub fn check_within(self, n: usize) -> Result<()> {
        let max = self.max_index();
        if max > n {
            return Err(Error::IndexOutOfRange { index: max, n });
        }
        Ok(())
    }
}

impl Ord for SourceIndexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.indices().cmp(other.indices()))
    }
}

impl PartialOrd for SourceIndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SourceIndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.indices().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for SourceIndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[inline]
pub(crate) fn low_bits(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// One support point `(x, t)` of a joint pmf.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub x: Vec<Symbol>,
    pub t: Symbol,
    pub p: f64,
}

impl Outcome {
    pub fn new(x: Vec<Symbol>, t: Symbol, p: f64) -> Self {
        Self { x, t, p }
    }
}

/// A marginal table. Keys hold the selected source coordinates in ascending
/// index order, followed by the target when it was included.
#[derive(Clone, Debug, PartialEq)]
pub struct Marginal {
    pub sources: Option<SourceIndexSet>,
    pub include_target: bool,
    pub table: BTreeMap<Vec<Symbol>, f64>,
}

impl Marginal {
    pub fn get(&self, key: &[Symbol]) -> f64 {
        self.table.get(key).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.table.values().sum()
    }
}

/// A predictor-target base system: `n` sources, one target and their
/// joint pmf, held as a sparse support sorted by `(x, t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointSystem {
    target_alphabet: Vec<Symbol>,
    source_alphabets: Vec<Vec<Symbol>>,
    support: Vec<Outcome>,
}

impl JointSystem {
    /// Validates the inputs, drops zero-mass outcomes and renormalizes.
    pub fn new(
        target_alphabet: Vec<Symbol>,
        source_alphabets: Vec<Vec<Symbol>>,
        outcomes: Vec<Outcome>,
    ) -> Result<Self> {
        let mut system = Self {
            target_alphabet,
            source_alphabets,
            support: outcomes,
        };
        system.validate()?;
        system.support.retain(|o| o.p > 0.0);
        system
            .support
            .sort_by(|a, b| a.x.cmp(&b.x).then(a.t.cmp(&b.t)));
        system.renormalize();
        Ok(system)
    }

    /// Checks every structural and numeric invariant of a base system.
    pub fn validate(&self) -> Result<()> {
        if self.source_alphabets.is_empty() {
            return Err(Error::AlphabetMismatch("at least one source is required".into()));
        }
        if self.source_alphabets.len() > SourceIndexSet::MAX_INDEX {
            return Err(Error::AlphabetMismatch(format!(
                "at most {} sources are supported",
                SourceIndexSet::MAX_INDEX
            )));
        }
        check_alphabet(&self.target_alphabet, "target alphabet", false)?;
        for (i, a) in self.source_alphabets.iter().enumerate() {
            check_alphabet(a, &format!("alphabet of X{}", i + 1), false)?;
        }
        check_outcomes(
            &self.support,
            &self.target_alphabet,
            &self.source_alphabets,
        )
    }

    fn renormalize(&mut self) {
        let total: f64 = self.support.iter().map(|o| o.p).sum();
        // Already-normalized input is left bit-for-bit unchanged.
        if (total - 1.0).abs() > 4.0 * f64::EPSILON * self.support.len() as f64 {
            for o in &mut self.support {
                o.p /= total;
            }
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

    /// Positive-mass outcomes in `(x, t)` order.
    pub fn support(&self) -> &[Outcome] {
        &self.support
    }

    /// Number of cells in the declared alphabet product (saturating).
    pub fn alphabet_product_size(&self) -> usize {
        self.source_alphabets
            .iter()
            .fold(self.target_alphabet.len(), |acc, a| acc.saturating_mul(a.len()))
    }

    pub fn marginal(&self, over: Option<SourceIndexSet>, include_target: bool) -> Result<Marginal> {
        if let Some(s) = over {
            s.check_within(self.n())?;
        }
        Ok(marginal_of(&self.support, over, include_target))
    }

    pub fn target_marginal(&self) -> BTreeMap<Symbol, f64> {
        target_marginal_of(&self.support)
    }

    /// `H(T)` in bits.
    pub fn target_entropy(&self) -> f64 {
        entropy(self.target_marginal().values().copied())
    }

    /// `I(T; X_I)` in bits.
    pub fn mutual_information(&self, source: SourceIndexSet) -> Result<f64> {
        source.check_within(self.n())?;
        Ok(mutual_information_of(&self.support, source.mask()))
    }

    /// `I(T; X_1, ..., X_n)`.
    pub fn total_mutual_information(&self) -> f64 {
        mutual_information_of(&self.support, low_bits(self.n()))
    }

    /// `I(T; X_a | X_given)`; `None` conditions on nothing.
    pub fn conditional_mutual_information(
        &self,
        a: SourceIndexSet,
        given: Option<SourceIndexSet>,
    ) -> Result<f64> {
        a.check_within(self.n())?;
        let g = match given {
            Some(g) => {
                g.check_within(self.n())?;
                if let Some(common) = a.intersection(g) {
                    return Err(Error::OverlappingIndexSets(common.indices().collect()));
                }
                g.mask()
            }
            None => 0,
        };
        Ok(conditional_mutual_information_of(&self.support, a.mask(), g))
    }

    /// Specific information `I(T = t; X_I)`, the `t`-conditional
    /// contribution to `I(T; X_I)`.
    pub fn specific_information(&self, t: Symbol, source: SourceIndexSet) -> Result<f64> {
        source.check_within(self.n())?;
        specific_information_of(&self.support, t, source.mask())
    }

    /// The subsystem `(X_I, T)` with sources renumbered `1..=|I|` in
    /// ascending order of their original index.
    pub fn subsystem(&self, indices: SourceIndexSet) -> Result<JointSystem> {
        indices.check_within(self.n())?;
        let pos = indices.positions();
        let alphabets = pos.iter().map(|&i| self.source_alphabets[i].clone()).collect();
        let mut table: BTreeMap<(Vec<Symbol>, Symbol), f64> = BTreeMap::new();
        for o in &self.support {
            *table.entry((project(&o.x, indices.mask()), o.t)).or_insert(0.0) += o.p;
        }
        let support = table
            .into_iter()
            .map(|((x, t), p)| Outcome { x, t, p })
            .collect();
        Ok(JointSystem {
            target_alphabet: self.target_alphabet.clone(),
            source_alphabets: alphabets,
            support,
        })
    }
}

fn check_alphabet(alphabet: &[Symbol], label: &str, allow_failure: bool) -> Result<()> {
    if alphabet.is_empty() {
        return Err(Error::AlphabetMismatch(format!("{label} is empty")));
    }
    if !allow_failure && alphabet.contains(&FAILURE_SYMBOL) {
        return Err(Error::ReservedSymbol {
            alphabet: label.to_string(),
        });
    }
    let mut sorted = alphabet.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != alphabet.len() {
        return Err(Error::AlphabetMismatch(format!("{label} has repeated symbols")));
    }
    Ok(())
}

fn check_outcomes(
    outcomes: &[Outcome],
    target_alphabet: &[Symbol],
    source_alphabets: &[Vec<Symbol>],
) -> Result<()> {
    let n = source_alphabets.len();
    let mut total = 0.0;
    let mut seen: HashMap<(&[Symbol], Symbol), ()> = HashMap::with_capacity(outcomes.len());
    for (index, o) in outcomes.iter().enumerate() {
        if !o.p.is_finite() || o.p < 0.0 {
            return Err(Error::InvalidProbability { index, value: o.p });
        }
        if o.x.len() != n {
            return Err(Error::AlphabetMismatch(format!(
                "outcome {index} has {} source coordinates, expected {n}",
                o.x.len()
            )));
        }
        if !target_alphabet.contains(&o.t) {
            return Err(Error::AlphabetMismatch(format!(
                "outcome {index}: target symbol {} not in target alphabet",
                o.t
            )));
        }
        for (i, (s, a)) in o.x.iter().zip(source_alphabets).enumerate() {
            if !a.contains(s) {
                return Err(Error::AlphabetMismatch(format!(
                    "outcome {index}: symbol {s} not in alphabet of X{}",
                    i + 1
                )));
            }
        }
        if seen.insert((o.x.as_slice(), o.t), ()).is_some() {
            return Err(Error::DuplicateOutcome {
                x: o.x.clone(),
                t: o.t,
            });
        }
        total += o.p;
    }
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Normalization {
            total,
            tolerance: NORMALIZATION_TOLERANCE,
        });
    }
    Ok(())
}

/// Coordinates of `x` selected by `mask`, ascending.
#[inline]
pub(crate) fn project(x: &[Symbol], mask: u32) -> Vec<Symbol> {
    x.iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, &s)| s)
        .collect()
}

pub(crate) fn entropy(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

pub(crate) fn target_marginal_of(outcomes: &[Outcome]) -> BTreeMap<Symbol, f64> {
    let mut m = BTreeMap::new();
    for o in outcomes {
        *m.entry(o.t).or_insert(0.0) += o.p;
    }
    m
}

pub(crate) fn marginal_of(
    outcomes: &[Outcome],
    over: Option<SourceIndexSet>,
    include_target: bool,
) -> Marginal {
    let mask = over.map_or(0, SourceIndexSet::mask);
    let mut table = BTreeMap::new();
    for o in outcomes {
        let mut key = project(&o.x, mask);
        if include_target {
            key.push(o.t);
        }
        *table.entry(key).or_insert(0.0) += o.p;
    }
    Marginal {
        sources: over,
        include_target,
        table,
    }
}

// Ordered maps keep every sum in a fixed order, so results are
// bit-reproducible across runs.
pub(crate) fn mutual_information_of(outcomes: &[Outcome], mask: u32) -> f64 {
    let mut joint: BTreeMap<(Vec<Symbol>, Symbol), f64> = BTreeMap::new();
    let mut px: BTreeMap<Vec<Symbol>, f64> = BTreeMap::new();
    let mut pt: BTreeMap<Symbol, f64> = BTreeMap::new();
    for o in outcomes {
        let xs = project(&o.x, mask);
        *px.entry(xs.clone()).or_insert(0.0) += o.p;
        *joint.entry((xs, o.t)).or_insert(0.0) += o.p;
        *pt.entry(o.t).or_insert(0.0) += o.p;
    }
    let mi: f64 = joint
        .iter()
        .filter(|(_, &p)| p > 0.0)
        .map(|((xs, t), &p)| p * (p / (px[xs] * pt[t])).log2())
        .sum();
    mi.max(0.0)
}

pub(crate) fn conditional_mutual_information_of(outcomes: &[Outcome], a: u32, g: u32) -> f64 {
    // I(T; A | G) = sum p(a,g,t) log [ p(a,g,t) p(g) / (p(a,g) p(g,t)) ]
    let ag = a | g;
    let mut p_agt: BTreeMap<(Vec<Symbol>, Symbol), f64> = BTreeMap::new();
    let mut p_ag: BTreeMap<Vec<Symbol>, f64> = BTreeMap::new();
    let mut p_gt: BTreeMap<(Vec<Symbol>, Symbol), f64> = BTreeMap::new();
    let mut p_g: BTreeMap<Vec<Symbol>, f64> = BTreeMap::new();
    for o in outcomes {
        let xag = project(&o.x, ag);
        let xg = project(&o.x, g);
        *p_agt.entry((xag.clone(), o.t)).or_insert(0.0) += o.p;
        *p_ag.entry(xag).or_insert(0.0) += o.p;
        *p_gt.entry((xg.clone(), o.t)).or_insert(0.0) += o.p;
        *p_g.entry(xg).or_insert(0.0) += o.p;
    }
    // Recover the G-coordinates of an (A ∪ G)-projection.
    let g_within_ag: Vec<usize> = (0..32)
        .filter(|i| ag & (1 << i) != 0)
        .enumerate()
        .filter(|(_, i)| g & (1 << i) != 0)
        .map(|(k, _)| k)
        .collect();
    let cmi: f64 = p_agt
        .iter()
        .filter(|(_, &p)| p > 0.0)
        .map(|((xag, t), &p)| {
            let xg: Vec<Symbol> = g_within_ag.iter().map(|&k| xag[k]).collect();
            let num = p * p_g[&xg];
            let den = p_ag[xag] * p_gt[&(xg, *t)];
            p * (num / den).log2()
        })
        .sum();
    cmi.max(0.0)
}

pub(crate) fn specific_information_of(outcomes: &[Outcome], t: Symbol, mask: u32) -> Result<f64> {
    let mut p_at: BTreeMap<Vec<Symbol>, f64> = BTreeMap::new();
    let mut p_a: BTreeMap<Vec<Symbol>, f64> = BTreeMap::new();
    let mut p_t = 0.0;
    for o in outcomes {
        let xs = project(&o.x, mask);
        if o.t == t {
            *p_at.entry(xs.clone()).or_insert(0.0) += o.p;
            p_t += o.p;
        }
        *p_a.entry(xs).or_insert(0.0) += o.p;
    }
    if p_t <= 0.0 {
        return Err(Error::ZeroProbabilityTarget(t));
    }
    // sum_a p(a|t) [log p(t|a) - log p(t)]
    Ok(p_at
        .iter()
        .filter(|(_, &p)| p > 0.0)
        .map(|(a, &p)| {
            let p_a_given_t = p / p_t;
            let p_t_given_a = p / p_a[a];
            p_a_given_t * (p_t_given_a.log2() - p_t.log2())
        })
        .sum())
}
