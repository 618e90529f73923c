//! States, dense state sets, variable index sets and block-local layouts.

use std::fmt;

use crate::error::{Error, Result};

/// Hard ceiling on the width of any explicit state space.
pub const MAX_WIDTH: usize = 30;

/// A network state packed into a word: bit `p` holds the value of the
/// `p`-th variable of the owning layout (for a full network, bit `i - 1`
/// stores variable `i`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
#[repr(transparent)]
pub struct State(pub u32);

impl State {
    #[inline]
    pub fn get(self, pos: usize) -> bool {
        (self.0 >> pos) & 1 == 1
    }

    #[inline]
    pub fn with(self, pos: usize, value: bool) -> State {
        if value {
            State(self.0 | (1 << pos))
        } else {
            State(self.0 & !(1 << pos))
        }
    }

    #[inline]
    pub fn toggle(self, mask: u32) -> State {
        State(self.0 ^ mask)
    }

    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    /// Renders the state as a `width`-character 0/1 string, position 0 leftmost.
    pub fn to_bit_string(self, width: usize) -> String {
        (0..width)
            .map(|p| if self.get(p) { '1' } else { '0' })
            .collect()
    }

    /// Parses a 0/1 string where the leftmost character is position 0.
    pub fn parse_bits(text: &str) -> Result<State> {
        let text = text.trim();
        if text.is_empty() || text.len() > MAX_WIDTH {
            return Err(Error::InvalidState(text.to_string()));
        }
        let mut bits = 0u32;
        for (p, c) in text.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << p,
                _ => return Err(Error::InvalidState(text.to_string())),
            }
        }
        Ok(State(bits))
    }

    /// Sort key matching the lexicographic order of [`State::to_bit_string`].
    pub fn lex_key(self, width: usize) -> u32 {
        if width == 0 {
            return 0;
        }
        self.0.reverse_bits() >> (32 - width)
    }
}

/// A set of variable positions, stored as a bitmask (bit `i` = variable `i + 1`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct IndexSet(pub u32);

/// A control: the set of variables toggled in one step.
pub type ControlSet = IndexSet;

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn full(n: usize) -> IndexSet {
        if n >= 32 {
            IndexSet(u32::MAX)
        } else {
            IndexSet((1u32 << n) - 1)
        }
    }

    pub fn singleton(pos: usize) -> IndexSet {
        IndexSet(1 << pos)
    }

    /// Builds a set from 1-based variable indices.
    pub fn from_one_based<I: IntoIterator<Item = usize>>(indices: I) -> IndexSet {
        let mut mask = 0u32;
        for i in indices {
            debug_assert!(i >= 1);
            mask |= 1 << (i - 1);
        }
        IndexSet(mask)
    }

    pub fn from_positions<I: IntoIterator<Item = usize>>(positions: I) -> IndexSet {
        IndexSet(positions.into_iter().fold(0, |m, p| m | (1 << p)))
    }

    #[inline]
    pub fn contains(self, pos: usize) -> bool {
        (self.0 >> pos) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, pos: usize) {
        self.0 |= 1 << pos;
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn union(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 & !other.0)
    }

    #[inline]
    pub fn is_subset(self, other: IndexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// 0-based positions in increasing order.
    pub fn positions(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let p = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(p)
            }
        })
    }

    /// 1-based indices in increasing order.
    pub fn to_one_based(self) -> Vec<usize> {
        self.positions().map(|p| p + 1).collect()
    }

    /// Orders sets by their sorted 1-based index lists (`{2,3} < {2,3,4} < {2,4}`).
    pub fn lex_cmp(&self, other: &IndexSet) -> std::cmp::Ordering {
        self.to_one_based().cmp(&other.to_one_based())
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.to_one_based().into_iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

// Sets compare lexicographically on their index lists so that BTreeSets of
// them iterate in report order.
impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IndexSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.lex_cmp(other)
    }
}

/// Dense membership set over the `2^width` states of a state universe.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StateSet {
    width: usize,
    words: Vec<u64>,
}

impl StateSet {
    pub fn empty(width: usize) -> StateSet {
        assert!(
            width <= MAX_WIDTH,
            "state width {width} exceeds {MAX_WIDTH}"
        );
        let bits = 1usize << width;
        StateSet {
            width,
            words: vec![0; bits.div_ceil(64)],
        }
    }

    pub fn full(width: usize) -> StateSet {
        let mut set = StateSet::empty(width);
        let bits = 1usize << width;
        for w in set.words.iter_mut() {
            *w = u64::MAX;
        }
        let tail = bits % 64;
        if tail != 0 {
            *set.words.last_mut().unwrap() = (1u64 << tail) - 1;
        }
        set
    }

    pub fn from_states<I: IntoIterator<Item = State>>(width: usize, states: I) -> StateSet {
        let mut set = StateSet::empty(width);
        for s in states {
            set.insert(s);
        }
        set
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of states in the universe, `2^width`.
    #[inline]
    pub fn capacity(&self) -> usize {
        1 << self.width
    }

    #[inline]
    pub fn contains(&self, s: State) -> bool {
        let c = s.code();
        c < self.capacity() && (self.words[c >> 6] >> (c & 63)) & 1 == 1
    }

    /// Inserts `s`; returns true if it was not present.
    #[inline]
    pub fn insert(&mut self, s: State) -> bool {
        let c = s.code();
        debug_assert!(c < self.capacity());
        let word = &mut self.words[c >> 6];
        let bit = 1u64 << (c & 63);
        let fresh = *word & bit == 0;
        *word |= bit;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, s: State) {
        let c = s.code();
        self.words[c >> 6] &= !(1u64 << (c & 63));
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members in increasing code order.
    pub fn iter(&self) -> impl Iterator<Item = State> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(State(((k << 6) + b) as u32))
                }
            })
        })
    }

    pub fn union_with(&mut self, other: &StateSet) {
        assert_eq!(self.width, other.width);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &StateSet) {
        assert_eq!(self.width, other.width);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.width == other.width
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    pub fn first(&self) -> Option<State> {
        self.iter().next()
    }

    /// Members as 0/1 strings, in lexicographic string order.
    pub fn to_bit_strings(&self) -> Vec<String> {
        let mut out: Vec<String> = self.iter().map(|s| s.to_bit_string(self.width)).collect();
        out.sort();
        out
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.to_bit_strings()).finish()
    }
}

/// An ordered list of global variable positions describing the bit layout
/// of a block-local state: local bit `k` holds global variable `vars[k]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Layout {
    vars: Vec<usize>,
    mask: IndexSet,
}

impl Layout {
    pub fn new(vars: IndexSet) -> Layout {
        Layout {
            vars: vars.positions().collect(),
            mask: vars,
        }
    }

    pub fn full(n: usize) -> Layout {
        Layout::new(IndexSet::full(n))
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn mask(&self) -> IndexSet {
        self.mask
    }

    pub fn width(&self) -> usize {
        self.vars.len()
    }

    /// Local bit position of a global variable, if it belongs to the layout.
    pub fn local(&self, global: usize) -> Option<usize> {
        self.vars.binary_search(&global).ok()
    }

    /// Converts a local diff mask to a global index set.
    pub fn globalize(&self, local_mask: u32) -> IndexSet {
        let mut out = IndexSet::EMPTY;
        let mut rest = local_mask;
        while rest != 0 {
            let k = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out.insert(self.vars[k]);
        }
        out
    }

    /// Converts a global index set to a local mask (variables outside the layout are dropped).
    pub fn localize(&self, set: IndexSet) -> u32 {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, &g)| set.contains(g))
            .fold(0, |m, (k, _)| m | (1 << k))
    }
}

/// Order-preserving map from a source layout to a sub-layout.
#[derive(Clone, Debug)]
pub struct Projection {
    // For each target bit, the source bit it reads.
    source_bits: Vec<u8>,
}

impl Projection {
    /// Fails if `target` is not contained in `source`.
    pub fn new(source: &Layout, target: &Layout) -> Result<Projection> {
        if !target.mask().is_subset(source.mask()) {
            return Err(Error::LayoutMismatch);
        }
        let source_bits = target
            .vars()
            .iter()
            .map(|&g| source.local(g).expect("subset checked") as u8)
            .collect();
        Ok(Projection { source_bits })
    }

    #[inline]
    pub fn apply(&self, s: State) -> State {
        let mut out = 0u32;
        for (k, &b) in self.source_bits.iter().enumerate() {
            out |= ((s.0 >> b) & 1) << k;
        }
        State(out)
    }
}

/// Projects `s` (laid out by `source`) onto the variables of `target`.
pub fn project(s: State, source: &Layout, target: &Layout) -> Result<State> {
    Ok(Projection::new(source, target)?.apply(s))
}

/// Combines two block-local states into a state over the union of their
/// layouts. Returns `None` when they disagree on a shared variable.
pub fn cross(s1: State, l1: &Layout, s2: State, l2: &Layout) -> Option<(State, Layout)> {
    let union = Layout::new(l1.mask().union(l2.mask()));
    let mut out = 0u32;
    for (k, &g) in union.vars().iter().enumerate() {
        let a = l1.local(g).map(|p| s1.get(p));
        let b = l2.local(g).map(|p| s2.get(p));
        let v = match (a, b) {
            (Some(x), Some(y)) if x != y => return None,
            (Some(x), _) => x,
            (None, Some(y)) => y,
            (None, None) => unreachable!(),
        };
        if v {
            out |= 1 << k;
        }
    }
    Some((State(out), union))
}

/// Set-level cross: every crossable combination of members.
pub fn cross_sets(a: &StateSet, la: &Layout, b: &StateSet, lb: &Layout) -> (StateSet, Layout) {
    let union = Layout::new(la.mask().union(lb.mask()));
    let mut out = StateSet::empty(union.width());
    for s1 in a.iter() {
        for s2 in b.iter() {
            if let Some((s, _)) = cross(s1, la, s2, lb) {
                out.insert(s);
            }
        }
    }
    (out, union)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> State {
        State::parse_bits(s).unwrap()
    }

    #[test]
    fn bit_strings_put_variable_one_leftmost() {
        let s = bits("1100");
        assert!(s.get(0) && s.get(1) && !s.get(2));
        assert_eq!(s.to_bit_string(4), "1100");
        assert!(State::parse_bits("10x1").is_err());
    }

    #[test]
    fn lex_key_follows_string_order() {
        let mut v: Vec<State> = ["0001", "1000", "0100", "0011"]
            .iter()
            .map(|s| bits(s))
            .collect();
        v.sort_by_key(|s| s.lex_key(4));
        let strings: Vec<String> = v.iter().map(|s| s.to_bit_string(4)).collect();
        assert_eq!(strings, ["0001", "0011", "0100", "1000"]);
    }

    #[test]
    fn projection_examples() {
        let full = Layout::full(4);
        let b34 = Layout::new(IndexSet::from_one_based([3, 4]));
        let b12 = Layout::new(IndexSet::from_one_based([1, 2]));
        assert_eq!(
            project(bits("1100"), &full, &b34).unwrap().to_bit_string(2),
            "00"
        );
        assert_eq!(
            project(bits("1010"), &full, &b12).unwrap().to_bit_string(2),
            "10"
        );
        assert_eq!(project(bits("1010"), &full, &full).unwrap(), bits("1010"));
        assert!(project(bits("10"), &b12, &b34).is_err());
    }

    #[test]
    fn cross_examples() {
        let b1 = Layout::new(IndexSet::from_one_based([1, 2]));
        let b2 = Layout::new(IndexSet::from_one_based([2, 3, 4]));
        let (s, l) = cross(bits("11"), &b1, bits("100"), &b2).unwrap();
        assert_eq!(l, Layout::full(4));
        assert_eq!(s, bits("1100"));
        assert!(cross(bits("11"), &b1, bits("010"), &b2).is_none());
        assert_eq!(
            cross(bits("10"), &b1, bits("10"), &b1).unwrap().0,
            bits("10")
        );
    }

    #[test]
    fn state_set_basics() {
        let mut set = StateSet::empty(4);
        assert!(set.insert(bits("1010")));
        assert!(!set.insert(bits("1010")));
        set.insert(bits("0001"));
        assert_eq!(set.len(), 2);
        assert_eq!(set.to_bit_strings(), ["0001", "1010"]);
        assert_eq!(StateSet::full(3).len(), 8);
        assert_eq!(StateSet::full(7).len(), 128);
    }

    #[test]
    fn index_set_order_and_display() {
        let a = IndexSet::from_one_based([2, 3]);
        let b = IndexSet::from_one_based([2, 4]);
        let c = IndexSet::from_one_based([2, 3, 4]);
        assert!(a < c && c < b);
        assert_eq!(a.to_string(), "{2,3}");
        assert_eq!(IndexSet::EMPTY.to_string(), "{}");
    }

    proptest::proptest! {
        #[test]
        fn cross_then_project_round_trips(s in 0u32..64, a in 1u32..64, b in 1u32..64) {
            let full = Layout::full(6);
            let la = Layout::new(IndexSet(a));
            let lb = Layout::new(IndexSet(b));
            let s = State(s);
            let sa = project(s, &full, &la).unwrap();
            let sb = project(s, &full, &lb).unwrap();
            let (joined, lu) = cross(sa, &la, sb, &lb).unwrap();
            proptest::prop_assert_eq!(project(joined, &lu, &la).unwrap(), sa);
            proptest::prop_assert_eq!(project(joined, &lu, &lb).unwrap(), sb);
        }
    }
}
