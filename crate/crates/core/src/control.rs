//! Existential control: Hamming machinery, control matrices, lattice
//! labelling and the exact minimal-cover search, plus the target, all-pairs
//! and full control problems in global and decomposed form.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::decomp::BlockBasins;
use crate::error::{Error, Result};
use crate::network::BooleanNetwork;
use crate::state::{ControlSet, IndexSet, Layout, State, StateSet};
use crate::transition::{
    attractors, compute_basin, TransitionSystem, Universe, UpdateMode, DEFAULT_STATE_CAP_BITS,
};

/// Hamming distance between two states and the positions where they differ.
pub fn hamming(s: State, t: State) -> (usize, IndexSet) {
    let diff = IndexSet(s.0 ^ t.0);
    (diff.len(), diff)
}

/// Minimum distance from `s` to `targets` and every difference set realizing it.
pub fn hamming_to_set(s: State, targets: &StateSet) -> Result<(usize, BTreeSet<IndexSet>)> {
    let mut best = usize::MAX;
    let mut args = BTreeSet::new();
    for t in targets.iter() {
        let (d, diff) = hamming(s, t);
        if d < best {
            best = d;
            args.clear();
        }
        if d == best {
            args.insert(diff);
        }
    }
    if best == usize::MAX {
        return Err(Error::EmptyTargetSet);
    }
    Ok((best, args))
}

/// Toggles every variable in `control`.
#[inline]
pub fn apply_control(control: ControlSet, s: State) -> State {
    s.toggle(control.0)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Method {
    Global,
    Decomposed,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Global => "global",
            Method::Decomposed => "decomposed",
        }
    }
}

/// Which optimal covers to report.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum CoverMode {
    /// All covers of minimum cardinality.
    #[default]
    MinimumCardinality,
    /// All inclusion-minimal covers.
    SubsetMinimal,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub mode: UpdateMode,
    pub cap_bits: usize,
    pub cover: CoverMode,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            mode: UpdateMode::Async,
            cap_bits: DEFAULT_STATE_CAP_BITS,
            cover: CoverMode::MinimumCardinality,
        }
    }
}

/// `p × p` families of index sets; entry `(i, j)` lists the toggles that
/// move some state of attractor `i` into the basin of attractor `j`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ControlMatrix {
    entries: Vec<Vec<BTreeSet<IndexSet>>>,
    /// Indices the entries range over.
    pub scope: IndexSet,
}

impl ControlMatrix {
    pub fn from_entries(entries: Vec<Vec<BTreeSet<IndexSet>>>, scope: IndexSet) -> ControlMatrix {
        ControlMatrix { entries, scope }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &BTreeSet<IndexSet> {
        &self.entries[i][j]
    }

    /// Ordered off-diagonal pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let p = self.size();
        (0..p).flat_map(move |i| (0..p).filter(move |&j| j != i).map(move |j| (i, j)))
    }
}

/// Global control matrix over full-network states.
pub fn build_control_matrix(
    attractor_sets: &[StateSet],
    basins: &[StateSet],
) -> Result<ControlMatrix> {
    let p = attractor_sets.len();
    if p < 2 {
        return Err(Error::TooFewAttractors);
    }
    assert_eq!(p, basins.len());
    let width = attractor_sets[0].width();
    let mut entries = vec![vec![BTreeSet::new(); p]; p];
    for i in 0..p {
        for j in (0..p).filter(|&j| j != i) {
            let family = &mut entries[i][j];
            let mut seen = HashSet::new();
            for s in attractor_sets[i].iter() {
                for t in basins[j].iter() {
                    if seen.insert(s.0 ^ t.0) {
                        family.insert(IndexSet(s.0 ^ t.0));
                    }
                }
            }
        }
    }
    Ok(ControlMatrix {
        entries,
        scope: IndexSet::full(width),
    })
}

/// `ℓ*(L)`: pairs `(i, j)` with some member of `M_ij` contained in `l`.
pub fn label_closure(m: &ControlMatrix, l: ControlSet) -> BTreeSet<(usize, usize)> {
    m.pairs()
        .filter(|&(i, j)| m.entry(i, j).iter().any(|member| member.is_subset(l)))
        .collect()
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoverResult {
    pub minimum_size: usize,
    /// Sorted lexicographically.
    pub solutions: Vec<ControlSet>,
    /// Search nodes visited.
    pub explored: u64,
}

/// All minimum-cardinality sets `L` with every off-diagonal pair in `ℓ*(L)`.
pub fn minimal_cover(m: &ControlMatrix) -> Result<CoverResult> {
    minimal_cover_with(m, CoverMode::MinimumCardinality)
}

pub fn minimal_cover_with(m: &ControlMatrix, mode: CoverMode) -> Result<CoverResult> {
    // Reduce to inclusion-minimal members; pairs containing ∅ are free.
    let mut families: Vec<Vec<IndexSet>> = Vec::new();
    for (i, j) in m.pairs() {
        let entry = m.entry(i, j);
        if entry.is_empty() {
            return Err(Error::Uncontrollable(i + 1, j + 1));
        }
        if entry.contains(&IndexSet::EMPTY) {
            continue;
        }
        let reduced = inclusion_minimal(entry.iter().copied());
        if !families.contains(&reduced) {
            families.push(reduced);
        }
    }
    let universe = families
        .iter()
        .flatten()
        .fold(IndexSet::EMPTY, |acc, &s| acc.union(s));

    let mut search = CoverSearch {
        families: &families,
        found: BTreeSet::new(),
        seen: HashSet::new(),
        explored: 0,
    };
    match mode {
        CoverMode::MinimumCardinality => {
            for k in 0..=universe.len() {
                search.seen.clear();
                search.run(IndexSet::EMPTY, k);
                if !search.found.is_empty() {
                    break;
                }
            }
        }
        CoverMode::SubsetMinimal => {
            search.run(IndexSet::EMPTY, universe.len());
            let all: Vec<IndexSet> = search.found.iter().copied().collect();
            search.found = inclusion_minimal(all).into_iter().collect();
        }
    }
    let solutions: Vec<IndexSet> = search.found.into_iter().collect();
    let minimum_size = solutions.iter().map(|s| s.len()).min().unwrap_or(0);
    Ok(CoverResult {
        minimum_size,
        solutions,
        explored: search.explored,
    })
}

fn inclusion_minimal<I: IntoIterator<Item = IndexSet>>(sets: I) -> Vec<IndexSet> {
    let mut sorted: Vec<IndexSet> = sets.into_iter().collect();
    sorted.sort_by_key(|s| (s.len(), *s));
    sorted.dedup();
    let mut keep: Vec<IndexSet> = Vec::new();
    for s in sorted {
        if !keep.iter().any(|k| k.is_subset(s)) {
            keep.push(s);
        }
    }
    keep.sort();
    keep
}

struct CoverSearch<'f> {
    families: &'f [Vec<IndexSet>],
    found: BTreeSet<IndexSet>,
    seen: HashSet<IndexSet>,
    explored: u64,
}

impl CoverSearch<'_> {
    // Branch on the uncovered family with the fewest members that still fit
    // within `budget`; every cover reachable this way is a union of members.
    fn run(&mut self, chosen: IndexSet, budget: usize) {
        if !self.seen.insert(chosen) {
            return;
        }
        self.explored += 1;
        let mut branch: Option<Vec<IndexSet>> = None;
        for family in self.families {
            if family.iter().any(|m| m.is_subset(chosen)) {
                continue;
            }
            let options: Vec<IndexSet> = family
                .iter()
                .copied()
                .filter(|m| m.union(chosen).len() <= budget)
                .collect();
            if options.is_empty() {
                return;
            }
            if branch.as_ref().is_none_or(|b| options.len() < b.len()) {
                branch = Some(options);
            }
        }
        match branch {
            None => {
                self.found.insert(chosen);
            }
            Some(options) => {
                for m in options {
                    self.run(chosen.union(m), budget);
                }
            }
        }
    }
}

/// One ordered pair's evidence: toggling `control` on `from` lands in the
/// target basin at `to`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Witness {
    pub control: ControlSet,
    pub from: State,
    pub to: State,
}

/// Per-block outcome of the decomposed method.
#[derive(Clone, Debug)]
pub struct BlockCover {
    pub block: usize,
    pub nodes: IndexSet,
    pub hat: IndexSet,
    pub matrix: ControlMatrix,
    pub cover: CoverResult,
}

#[derive(Clone, Debug)]
pub struct ControlSolution {
    pub method: Method,
    /// Global attractors the solution switches between, in input order.
    pub attractors: Vec<StateSet>,
    pub control: ControlSet,
    pub minimum_size: usize,
    pub all_minimum_solutions: Vec<ControlSet>,
    /// Keyed by 0-based positions in `attractors`.
    pub witnesses: WitnessMap,
    /// Pairs for which no subset of `control` reaches the target basin.
    pub unsound_pairs: Vec<(usize, usize)>,
    pub per_block: Vec<BlockCover>,
    /// Size of the subset lattice(s) the method searches.
    pub lattice_nodes: u64,
}

impl ControlSolution {
    pub fn is_sound(&self) -> bool {
        self.unsound_pairs.is_empty()
    }
}

/// Full-network transition system, its attractors and basins on demand.
pub struct GlobalAnalysis {
    pub ts: TransitionSystem,
    pub attractors: Vec<StateSet>,
}

impl GlobalAnalysis {
    pub fn new(bn: &BooleanNetwork, options: &SolveOptions) -> Result<GlobalAnalysis> {
        let ts =
            TransitionSystem::build(bn, Universe::full(bn.len()), options.mode, options.cap_bits)?;
        let attractors = attractors(&ts).into_iter().map(|a| a.states).collect();
        Ok(GlobalAnalysis { ts, attractors })
    }

    pub fn basin(&self, attractor: &StateSet) -> StateSet {
        compute_basin(&self.ts, attractor)
    }

    /// Index of the attractor containing `s`.
    pub fn attractor_of(&self, s: State) -> Option<usize> {
        self.attractors.iter().position(|a| a.contains(s))
    }
}

/// Minimum toggles moving `s` into the basin of `target`.
pub fn target_control(
    bn: &BooleanNetwork,
    s: State,
    target: &StateSet,
    options: &SolveOptions,
) -> Result<ControlSolution> {
    let global = GlobalAnalysis::new(bn, options)?;
    let basin = global.basin(target);
    let (distance, args) = hamming_to_set(s, &basin)?;
    let solutions: Vec<ControlSet> = args.into_iter().collect();
    let control = solutions[0];
    let mut witnesses = BTreeMap::new();
    witnesses.insert(
        (0, 0),
        Witness {
            control,
            from: s,
            to: apply_control(control, s),
        },
    );
    Ok(ControlSolution {
        method: Method::Global,
        attractors: vec![target.clone()],
        control,
        minimum_size: distance,
        all_minimum_solutions: solutions,
        witnesses,
        unsound_pairs: Vec::new(),
        per_block: Vec::new(),
        lattice_nodes: 1u64 << bn.len(),
    })
}

/// Global method: basins on the full system, one matrix, one cover.
pub fn global_cover(
    global: &GlobalAnalysis,
    attractor_sets: &[StateSet],
    mode: CoverMode,
) -> Result<(ControlMatrix, Vec<StateSet>, CoverResult)> {
    let basins: Vec<StateSet> = attractor_sets.iter().map(|a| global.basin(a)).collect();
    let matrix = build_control_matrix(attractor_sets, &basins)?;
    let cover = minimal_cover_with(&matrix, mode)?;
    Ok((matrix, basins, cover))
}

/// Decomposed method: per-block matrices over the hat indices, one cover
/// per block. Does not touch the full-network transition system unless the
/// last block's ancestor closure is the whole network.
pub fn decomposed_cover(
    bn: &BooleanNetwork,
    attractor_sets: &[StateSet],
    options: &SolveOptions,
) -> Result<Vec<BlockCover>> {
    let p = attractor_sets.len();
    if p < 2 {
        return Err(Error::TooFewAttractors);
    }
    let mut engine = BlockBasins::new(bn, options.mode, options.cap_bits);
    let blocks = engine.graph().blocks().to_vec();
    let mut out = Vec::with_capacity(blocks.len());
    for (j, block) in blocks.iter().enumerate() {
        let layout = Layout::new(block.ancestor_closure);
        let hat_local = layout.localize(block.hat);
        let mut projections = Vec::with_capacity(p);
        let mut basin_hats: Vec<HashSet<u32>> = Vec::with_capacity(p);
        for a in attractor_sets {
            let (local, basin) = engine.block_basin(j, a)?;
            projections.push(local);
            basin_hats.push(basin.iter().map(|s| s.0 & hat_local).collect());
        }
        let mut entries = vec![vec![BTreeSet::new(); p]; p];
        for q in 0..p {
            let sources: BTreeSet<u32> = projections[q].iter().map(|s| s.0 & hat_local).collect();
            for r in (0..p).filter(|&r| r != q) {
                for &src in &sources {
                    for &dst in &basin_hats[r] {
                        entries[q][r].insert(layout.globalize(src ^ dst));
                    }
                }
            }
        }
        let matrix = ControlMatrix::from_entries(entries, block.hat);
        let cover = minimal_cover_with(&matrix, options.cover)?;
        out.push(BlockCover {
            block: j,
            nodes: block.nodes,
            hat: block.hat,
            matrix,
            cover,
        });
    }
    Ok(out)
}

/// Unions of one optimal cover per block, sorted and deduplicated.
pub fn combine_block_covers(blocks: &[BlockCover]) -> Vec<ControlSet> {
    let mut combos: BTreeSet<IndexSet> = BTreeSet::from([IndexSet::EMPTY]);
    for b in blocks {
        combos = combos
            .iter()
            .flat_map(|&acc| b.cover.solutions.iter().map(move |&s| acc.union(s)))
            .collect();
    }
    combos.into_iter().collect()
}

/// Witnesses keyed by 0-based `(from, to)` attractor positions.
pub type WitnessMap = BTreeMap<(usize, usize), Witness>;

/// For each ordered pair, the best subset of `control` moving some source
/// attractor state into the target basin: fewest toggles, then
/// lexicographically smallest toggle set, then smallest destination string.
pub fn find_witnesses(
    attractor_sets: &[StateSet],
    basins: &[StateSet],
    control: ControlSet,
    width: usize,
) -> (WitnessMap, Vec<(usize, usize)>) {
    let p = attractor_sets.len();
    let mut witnesses = BTreeMap::new();
    let mut missing = Vec::new();
    for i in 0..p {
        for j in (0..p).filter(|&j| j != i) {
            let mut best: Option<(usize, IndexSet, u32, Witness)> = None;
            for s in attractor_sets[i].iter() {
                for t in basins[j].iter() {
                    let diff = IndexSet(s.0 ^ t.0);
                    if !diff.is_subset(control) {
                        continue;
                    }
                    let key = (diff.len(), diff, t.lex_key(width));
                    if best.as_ref().is_none_or(|b| key < (b.0, b.1, b.2)) {
                        best = Some((
                            key.0,
                            key.1,
                            key.2,
                            Witness {
                                control: diff,
                                from: s,
                                to: t,
                            },
                        ));
                    }
                }
            }
            match best {
                Some(b) => {
                    witnesses.insert((i, j), b.3);
                }
                None => missing.push((i, j)),
            }
        }
    }
    (witnesses, missing)
}

/// Minimal existential all-pairs control for the given global attractors.
pub fn all_pairs_control(
    bn: &BooleanNetwork,
    attractor_sets: &[StateSet],
    method: Method,
    options: &SolveOptions,
) -> Result<ControlSolution> {
    if attractor_sets.len() < 2 {
        return Err(Error::TooFewAttractors);
    }
    let global = GlobalAnalysis::new(bn, options)?;
    solve_with(bn, &global, attractor_sets, method, options)
}

/// [`all_pairs_control`] reusing an existing global analysis.
pub fn solve_with(
    bn: &BooleanNetwork,
    global: &GlobalAnalysis,
    attractor_sets: &[StateSet],
    method: Method,
    options: &SolveOptions,
) -> Result<ControlSolution> {
    if attractor_sets.len() < 2 {
        return Err(Error::TooFewAttractors);
    }
    let width = bn.len();
    match method {
        Method::Global => {
            let (_, basins, cover) = global_cover(global, attractor_sets, options.cover)?;
            let control = cover.solutions[0];
            let (witnesses, unsound_pairs) =
                find_witnesses(attractor_sets, &basins, control, width);
            Ok(ControlSolution {
                method,
                attractors: attractor_sets.to_vec(),
                control,
                minimum_size: cover.minimum_size,
                all_minimum_solutions: cover.solutions,
                witnesses,
                unsound_pairs,
                per_block: Vec::new(),
                lattice_nodes: 1u64 << width,
            })
        }
        Method::Decomposed => {
            let blocks = decomposed_cover(bn, attractor_sets, options)?;
            let mut solutions = combine_block_covers(&blocks);
            if options.cover == CoverMode::MinimumCardinality {
                let min = solutions.iter().map(|s| s.len()).min().unwrap_or(0);
                solutions.retain(|s| s.len() == min);
            }
            let basins: Vec<StateSet> = attractor_sets.iter().map(|a| global.basin(a)).collect();
            // Every candidate is a minimal blockwise answer; report the first
            // one that actually switches all pairs, if there is one.
            let checked: Vec<_> = solutions
                .iter()
                .map(|&c| (c, find_witnesses(attractor_sets, &basins, c, width)))
                .collect();
            let (control, (witnesses, unsound_pairs)) = checked
                .iter()
                .find(|(_, (_, missing))| missing.is_empty())
                .unwrap_or(&checked[0])
                .clone();
            let lattice_nodes = blocks.iter().map(|b| 1u64 << b.hat.len()).sum();
            Ok(ControlSolution {
                method,
                attractors: attractor_sets.to_vec(),
                control,
                minimum_size: control.len(),
                all_minimum_solutions: solutions,
                witnesses,
                unsound_pairs,
                per_block: blocks,
                lattice_nodes,
            })
        }
    }
}

/// All-pairs control over every attractor of the network. With fewer than
/// two attractors the answer is the empty control.
pub fn full_control(
    bn: &BooleanNetwork,
    method: Method,
    options: &SolveOptions,
) -> Result<ControlSolution> {
    let global = GlobalAnalysis::new(bn, options)?;
    if global.attractors.len() < 2 {
        return Ok(ControlSolution {
            method,
            attractors: global.attractors.clone(),
            control: IndexSet::EMPTY,
            minimum_size: 0,
            all_minimum_solutions: vec![IndexSet::EMPTY],
            witnesses: BTreeMap::new(),
            unsound_pairs: Vec::new(),
            per_block: Vec::new(),
            lattice_nodes: match method {
                Method::Global => 1u64 << bn.len(),
                Method::Decomposed => crate::decomp::decompose(bn)
                    .blocks()
                    .iter()
                    .map(|b| 1u64 << b.hat.len())
                    .sum(),
            },
        });
    }
    let atts = global.attractors.clone();
    solve_with(bn, &global, &atts, method, options)
}
