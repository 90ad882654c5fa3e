//! Source antichains and the redundancy lattice over them.
//!
//! `α ⪯ β` holds when every member of `β` contains some member of `α`.
//! The bottom of the lattice is `{1}{2}...{n}` and the top is `{1,...,n}`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::dist::{low_bits, SourceIndexSet};
use crate::error::{Error, Result};

/// Largest `n` enumerated without an explicit override (7579 antichains).
pub const DEFAULT_LATTICE_CAP: usize = 5;

/// A nonempty family of pairwise incomparable source index sets over `[n]`.
///
/// Members keep the order they were given in; equality, ordering and
/// hashing use the canonical member order (size, then lexicographic).
#[derive(Clone)]
pub struct SourceAntichain {
    n: usize,
    members: Vec<SourceIndexSet>,
}

impl SourceAntichain {
    pub fn new(n: usize, members: Vec<SourceIndexSet>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidAntichain("an antichain needs at least one member".into()));
        }
        for m in &members {
            m.check_within(n)?;
        }
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                if a == b {
                    return Err(Error::InvalidAntichain(format!("member {a} repeated")));
                }
                if a.is_subset_of(*b) || b.is_subset_of(*a) {
                    return Err(Error::InvalidAntichain(format!(
                        "members {a} and {b} are comparable"
                    )));
                }
            }
        }
        Ok(Self { n, members })
    }

    /// The single-source antichain `{X_I}`.
    pub fn singleton(n: usize, source: SourceIndexSet) -> Result<Self> {
        Self::new(n, vec![source])
    }

    /// Parses the brace grammar, e.g. `"{1}{2,3}"`. Whitespace is ignored
    /// and indices must increase strictly within a group.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut rest = compact.as_str();
        let mut members = Vec::new();
        if rest.is_empty() {
            return Err(Error::Parse("empty antichain".into()));
        }
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('{')
                .ok_or_else(|| Error::Parse(format!("expected '{{' at \"{rest}\"")))?;
            let close = body
                .find('}')
                .ok_or_else(|| Error::Parse(format!("unterminated group in \"{text}\"")))?;
            let group = &body[..close];
            rest = &body[close + 1..];
            if group.is_empty() {
                return Err(Error::Parse("empty group \"{}\"".into()));
            }
            let mut indices = Vec::new();
            for tok in group.split(',') {
                let i: usize = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad index \"{tok}\" in \"{text}\"")))?;
                if let Some(&last) = indices.last() {
                    if i <= last {
                        return Err(Error::Parse(format!(
                            "indices must increase within a group: \"{{{group}}}\""
                        )));
                    }
                }
                indices.push(i);
            }
            if let Some(&i) = indices.iter().find(|&&i| i == 0 || i > n) {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            members.push(SourceIndexSet::new(&indices)?);
        }
        Self::new(n, members)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Members in the order they were supplied.
    pub fn members(&self) -> &[SourceIndexSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_singleton(&self) -> bool {
        self.members.len() == 1
    }

    /// Union of all member index sets.
    pub fn union(&self) -> SourceIndexSet {
        self.members
            .iter()
            .copied()
            .reduce(SourceIndexSet::union)
            .expect("antichains are nonempty")
    }

    /// Members in canonical order.
    pub fn canonical_members(&self) -> Vec<SourceIndexSet> {
        let mut m = self.members.clone();
        m.sort();
        m
    }

    pub fn canonical(&self) -> Self {
        Self {
            n: self.n,
            members: self.canonical_members(),
        }
    }

    /// Same antichain with members in the given order.
    pub fn with_member_order(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.members.len()];
        let mut members = Vec::with_capacity(order.len());
        for &k in order {
            if k >= seen.len() || std::mem::replace(&mut seen[k], true) {
                return Err(Error::InvalidAntichain(format!("bad member permutation {order:?}")));
            }
            members.push(self.members[k]);
        }
        Self::new(self.n, members)
    }

    /// `self ⪯ other`.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::MixedArity(self.n, other.n));
        }
        Ok(leq_masks(&self.masks(), &other.masks()))
    }

    pub(crate) fn masks(&self) -> Vec<u32> {
        self.members.iter().map(|m| m.mask()).collect()
    }

    /// Re-expresses the antichain inside the subsystem on `within`, whose
    /// sources are renumbered `1..=|within|` in ascending order.
    pub(crate) fn relabel_into(&self, within: SourceIndexSet) -> Result<Self> {
        let pos: Vec<usize> = within.indices().collect();
        let members = self
            .members
            .iter()
            .map(|m| {
                if !m.is_subset_of(within) {
                    return Err(Error::InvalidIndexSet(format!("{m} not inside {within}")));
                }
                let idx: Vec<usize> = m
                    .indices()
                    .map(|i| pos.iter().position(|&p| p == i).unwrap() + 1)
                    .collect();
                SourceIndexSet::new(&idx)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(pos.len(), members)
    }
}

#[inline]
pub(crate) fn leq_masks(alpha: &[u32], beta: &[u32]) -> bool {
    beta.iter().all(|&b| alpha.iter().any(|&a| a & !b == 0))
}

impl PartialEq for SourceAntichain {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.canonical_members() == other.canonical_members()
    }
}

impl Eq for SourceAntichain {}

impl Hash for SourceAntichain {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.canonical_members().hash(state);
    }
}

impl Ord for SourceAntichain {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.canonical_members().cmp(&other.canonical_members()))
    }
}

impl PartialOrd for SourceAntichain {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SourceAntichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in self.canonical_members() {
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SourceAntichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n == 0 || n > SourceIndexSet::MAX_INDEX {
        return Err(Error::OutOfRange {
            what: "n",
            value: n,
            range: format!("1..={}", SourceIndexSet::MAX_INDEX),
        });
    }
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    Ok(())
}

/// Every antichain of nonempty subsets of `[n]`, each once, in canonical
/// order.
pub fn enumerate_antichains(n: usize, cap: usize) -> Result<Vec<SourceAntichain>> {
    check_cap(n, cap)?;
    let mut subsets: Vec<SourceIndexSet> = (1..=low_bits(n))
        .map(|m| SourceIndexSet::from_mask(m).unwrap())
        .collect();
    subsets.sort();
    let masks: Vec<u32> = subsets.iter().map(|s| s.mask()).collect();

    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    extend_antichains(&masks, 0, &mut chosen, &mut |c| {
        out.push(SourceAntichain {
            n,
            members: c.iter().map(|&k| subsets[k]).collect(),
        })
    });
    out.sort();
    Ok(out)
}

fn extend_antichains(
    masks: &[u32],
    start: usize,
    chosen: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    for k in start..masks.len() {
        let m = masks[k];
        let free = chosen
            .iter()
            .all(|&c| m & !masks[c] != 0 && masks[c] & !m != 0);
        if free {
            chosen.push(k);
            emit(chosen);
            extend_antichains(masks, k + 1, chosen, emit);
            chosen.pop();
        }
    }
}

/// `α_ℓ`: all sources of size `n - ℓ`, i.e. what is guaranteed to survive
/// when up to `ℓ` sources crash.
pub fn alpha_ell(n: usize, ell: usize) -> Result<SourceAntichain> {
    if n == 0 || ell >= n {
        return Err(Error::OutOfRange {
            what: "ell",
            value: ell,
            range: format!("0..={}", n.saturating_sub(1)),
        });
    }
    let size = (n - ell) as u32;
    let mut members: Vec<SourceIndexSet> = (1..=low_bits(n))
        .filter(|m| m.count_ones() == size)
        .map(|m| SourceIndexSet::from_mask(m).unwrap())
        .collect();
    members.sort();
    SourceAntichain::new(n, members)
}

/// All `β ⪯ α`, including `α`, in canonical order.
pub fn down_set(alpha: &SourceAntichain) -> Vec<SourceAntichain> {
    let top = alpha.masks();
    enumerate_antichains(alpha.n(), usize::MAX)
        .expect("antichain arity is in range")
        .into_iter()
        .filter(|b| leq_masks(&b.masks(), &top))
        .collect()
}

/// Values attached to every node of the lattice for some `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeValueMap {
    n: usize,
    entries: Vec<(SourceAntichain, f64)>,
}

impl LatticeValueMap {
    /// Entries are sorted into canonical order; coverage is checked by the
    /// consumers that need a complete map.
    pub fn new(n: usize, mut entries: Vec<(SourceAntichain, f64)>) -> Self {
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        Self { n, entries }
    }

    pub fn from_fn(lattice: &Lattice, mut f: impl FnMut(&SourceAntichain) -> f64) -> Self {
        Self {
            n: lattice.n(),
            entries: lattice.nodes().iter().map(|a| (a.clone(), f(a))).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(SourceAntichain, f64)] {
        &self.entries
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.1).collect()
    }

    pub fn get(&self, alpha: &SourceAntichain) -> Option<f64> {
        self.entries
            .binary_search_by(|e| e.0.cmp(alpha))
            .ok()
            .map(|k| self.entries[k].1)
    }
}

/// Recovers the per-atom values `Π` from cumulative values, so that the sum
/// of `Π` over every down-set reproduces the input.
pub fn moebius_invert(values: &LatticeValueMap) -> Result<LatticeValueMap> {
    let lattice = Lattice::new(values.n(), usize::MAX)?;
    let raw = lattice.values_in_order(values)?;
    let atoms = lattice.moebius_invert(&raw);
    Ok(LatticeValueMap {
        n: values.n(),
        entries: lattice.nodes().iter().cloned().zip(atoms).collect(),
    })
}

/// The enumerated lattice with its order relation precomputed.
#[derive(Clone, Debug)]
pub struct Lattice {
    n: usize,
    nodes: Vec<SourceAntichain>,
    strict_down: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

impl Lattice {
    pub fn new(n: usize, cap: usize) -> Result<Self> {
        let nodes = enumerate_antichains(n, cap)?;
        let masks: Vec<Vec<u32>> = nodes.iter().map(SourceAntichain::masks).collect();
        let strict_down: Vec<Vec<usize>> = (0..nodes.len())
            .map(|a| {
                (0..nodes.len())
                    .filter(|&b| b != a && leq_masks(&masks[b], &masks[a]))
                    .collect()
            })
            .collect();
        let mut topo: Vec<usize> = (0..nodes.len()).collect();
        topo.sort_by_key(|&k| strict_down[k].len());
        Ok(Self {
            n,
            nodes,
            strict_down,
            topo,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[SourceAntichain] {
        &self.nodes
    }

    pub fn index_of(&self, alpha: &SourceAntichain) -> Option<usize> {
        self.nodes.binary_search(alpha).ok()
    }

    /// Indices of all `β ≺ α`.
    pub fn strict_down(&self, index: usize) -> &[usize] {
        &self.strict_down[index]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        a == b || self.strict_down[b].binary_search(&a).is_ok()
    }

    /// Node indices ordered so that every node follows its down-set.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn bottom(&self) -> usize {
        self.topo[0]
    }

    pub fn top(&self) -> usize {
        *self.topo.last().unwrap()
    }

    /// Nodes covered by `index` in the Hasse diagram.
    pub fn lower_covers(&self, index: usize) -> Vec<usize> {
        let below = &self.strict_down[index];
        let mut shadowed = vec![false; self.nodes.len()];
        for &g in below {
            for &b in &self.strict_down[g] {
                shadowed[b] = true;
            }
        }
        below.iter().copied().filter(|&b| !shadowed[b]).collect()
    }

    fn values_in_order(&self, values: &LatticeValueMap) -> Result<Vec<f64>> {
        let incomplete = |reason: String| Error::IncompleteValueMap { n: self.n, reason };
        if values.n() != self.n {
            return Err(incomplete(format!("map has n={}", values.n())));
        }
        if values.entries().len() != self.nodes.len() {
            return Err(incomplete(format!(
                "{} entries for {} antichains",
                values.entries().len(),
                self.nodes.len()
            )));
        }
        self.nodes
            .iter()
            .zip(values.entries())
            .map(|(node, (key, v))| {
                if node == key {
                    Ok(*v)
                } else {
                    Err(incomplete(format!("expected {node}, found {key}")))
                }
            })
            .collect()
    }

    /// `Π(α) = I(α) − Σ_{β≺α} Π(β)`, evaluated bottom-up.
    pub fn moebius_invert(&self, cumulative: &[f64]) -> Vec<f64> {
        assert_eq!(cumulative.len(), self.nodes.len());
        let mut atoms = vec![0.0; self.nodes.len()];
        for &a in &self.topo {
            let below: f64 = self.strict_down[a].iter().map(|&b| atoms[b]).sum();
            atoms[a] = cumulative[a] - below;
        }
        atoms
    }

    /// `Σ_{β⪯α} Π(β)` for every `α`.
    pub fn cumulate(&self, atoms: &[f64]) -> Vec<f64> {
        assert_eq!(atoms.len(), self.nodes.len());
        (0..self.nodes.len())
            .map(|a| atoms[a] + self.strict_down[a].iter().map(|&b| atoms[b]).sum::<f64>())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ac(text: &str, n: usize) -> SourceAntichain {
        SourceAntichain::parse(text, n).unwrap()
    }

    #[test]
    fn bivariate_lattice() {
        let nodes = enumerate_antichains(2, DEFAULT_LATTICE_CAP).unwrap();
        let shown: Vec<String> = nodes.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["{1}", "{1}{2}", "{2}", "{1,2}"]);
    }

    #[test]
    fn lattice_sizes() {
        assert_eq!(enumerate_antichains(1, 5).unwrap().len(), 1);
        assert_eq!(enumerate_antichains(3, 5).unwrap().len(), 18);
        assert_eq!(enumerate_antichains(4, 5).unwrap().len(), 166);
        assert!(matches!(
            enumerate_antichains(6, DEFAULT_LATTICE_CAP),
            Err(Error::CapExceeded { n: 6, cap: 5 })
        ));
    }

    #[test]
    fn leq_examples() {
        let bottom = ac("{1}{2}", 2);
        let one = ac("{1}", 2);
        let two = ac("{2}", 2);
        let top = ac("{1,2}", 2);
        assert!(bottom.leq(&one).unwrap());
        assert!(one.leq(&top).unwrap());
        assert!(!one.leq(&two).unwrap());
        assert!(!two.leq(&one).unwrap());
        assert!(matches!(one.leq(&ac("{1}", 3)), Err(Error::MixedArity(2, 3))));
    }

    #[test]
    fn down_set_examples() {
        let show = |a: &str| -> Vec<String> {
            down_set(&ac(a, 2)).iter().map(ToString::to_string).collect()
        };
        assert_eq!(show("{1}{2}"), ["{1}{2}"]);
        assert_eq!(show("{1}"), ["{1}", "{1}{2}"]);
        assert_eq!(show("{1,2}").len(), 4);
    }

    #[test]
    fn moebius_bivariate_examples() {
        let lat = Lattice::new(2, 5).unwrap();
        let map = |b: f64, one: f64, two: f64, top: f64| {
            LatticeValueMap::new(
                2,
                vec![
                    (ac("{1}{2}", 2), b),
                    (ac("{1}", 2), one),
                    (ac("{2}", 2), two),
                    (ac("{1,2}", 2), top),
                ],
            )
        };
        let atoms = moebius_invert(&map(0.0, 0.5, 0.5, 1.0)).unwrap();
        let get = |m: &LatticeValueMap, s: &str| m.get(&ac(s, 2)).unwrap();
        assert_eq!(
            [get(&atoms, "{1}{2}"), get(&atoms, "{1}"), get(&atoms, "{2}"), get(&atoms, "{1,2}")],
            [0.0, 0.5, 0.5, 0.0]
        );
        let atoms = moebius_invert(&map(0.5, 0.5, 0.5, 1.0)).unwrap();
        assert_eq!(
            [get(&atoms, "{1}{2}"), get(&atoms, "{1}"), get(&atoms, "{2}"), get(&atoms, "{1,2}")],
            [0.5, 0.0, 0.0, 0.5]
        );
        let constant = lat.moebius_invert(&[0.7; 4]);
        let bottom = lat.bottom();
        for (k, v) in constant.iter().enumerate() {
            assert_eq!(*v, if k == bottom { 0.7 } else { 0.0 });
        }
    }

    #[test]
    fn moebius_rejects_incomplete_map() {
        let partial = LatticeValueMap::new(2, vec![(ac("{1}", 2), 1.0)]);
        assert!(matches!(
            moebius_invert(&partial),
            Err(Error::IncompleteValueMap { .. })
        ));
    }

    #[test]
    fn alpha_ell_examples() {
        assert_eq!(alpha_ell(2, 0).unwrap().to_string(), "{1,2}");
        assert_eq!(alpha_ell(2, 1).unwrap().to_string(), "{1}{2}");
        assert_eq!(alpha_ell(3, 1).unwrap().to_string(), "{1,2}{1,3}{2,3}");
        assert!(matches!(alpha_ell(2, 2), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn parse_grammar() {
        assert_eq!(ac(" { 2 , 3 } {1}", 3).to_string(), "{1}{2,3}");
        assert!(SourceAntichain::parse("{1}{1,2}", 2).is_err());
        assert!(SourceAntichain::parse("{2,1}", 2).is_err());
        assert!(SourceAntichain::parse("{1}{}", 2).is_err());
        assert!(SourceAntichain::parse("{1", 2).is_err());
        assert!(SourceAntichain::parse("", 2).is_err());
        assert!(SourceAntichain::parse("{1}x", 2).is_err());
        assert!(matches!(
            SourceAntichain::parse("{3}", 2),
            Err(Error::IndexOutOfRange { index: 3, n: 2 })
        ));
    }

    #[test]
    fn member_order_does_not_affect_identity() {
        let a = ac("{2}{1,3}", 3);
        let b = a.with_member_order(&[1, 0]).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.members()[0].to_string(), "{1,3}");
    }

    #[test]
    fn hasse_covers_bivariate() {
        let lat = Lattice::new(2, 5).unwrap();
        let top = lat.top();
        let mut covers: Vec<String> = lat
            .lower_covers(top)
            .into_iter()
            .map(|k| lat.nodes()[k].to_string())
            .collect();
        covers.sort();
        assert_eq!(covers, ["{1}", "{2}"]);
    }
}
