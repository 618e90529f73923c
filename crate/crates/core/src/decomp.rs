//! SCC block decomposition of the influence graph and blockwise basin
//! computation over realized transition systems.
//!
//! A basic block is a maximal SCC of the influence graph together with its
//! regulators. Block `B'` is a parent of `B` when the SCC of `B'` contains
//! one of `B`'s control nodes (the regulators of `B`'s SCC lying outside
//! it). Blocks are kept in topological order with ties broken by smallest
//! member index, so every prefix union is closed under regulators.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::network::BooleanNetwork;
use crate::scc::tarjan;
use crate::state::{cross_sets, IndexSet, Layout, Projection, State, StateSet};
use crate::transition::{
    attractors, compute_basin, TransitionSystem, Universe, UpdateMode, DEFAULT_STATE_CAP_BITS,
};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BlockKind {
    Elementary,
    NonElementary,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Block {
    /// The maximal SCC the block is built around.
    pub scc: IndexSet,
    /// `scc ∪ par(scc)`.
    pub nodes: IndexSet,
    /// Regulators of the SCC that lie outside it.
    pub control_nodes: IndexSet,
    /// Positions of parent blocks in [`BlockGraph::blocks`].
    pub parents: Vec<usize>,
    /// The block united with all its ancestors.
    pub ancestor_closure: IndexSet,
    /// Nodes not covered by any earlier block.
    pub hat: IndexSet,
}

impl Block {
    pub fn kind(&self) -> BlockKind {
        if self.parents.is_empty() {
            BlockKind::Elementary
        } else {
            BlockKind::NonElementary
        }
    }

    pub fn is_elementary(&self) -> bool {
        self.kind() == BlockKind::Elementary
    }

    /// The ancestor closure without the block's own SCC.
    pub fn ancestor_closure_minus(&self) -> IndexSet {
        self.ancestor_closure.difference(self.scc)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BlockGraph {
    blocks: Vec<Block>,
}

impl BlockGraph {
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// `(parent, child)` pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(j, b)| b.parents.iter().map(move |&p| (p, j)))
            .collect()
    }

    /// Union of the first `j + 1` blocks.
    pub fn prefix_union(&self, j: usize) -> IndexSet {
        self.blocks[..=j]
            .iter()
            .fold(IndexSet::EMPTY, |acc, b| acc.union(b.nodes))
    }

    /// `B_j` minus the union of the blocks before it.
    pub fn minus(&self, j: usize) -> IndexSet {
        let before = if j == 0 {
            IndexSet::EMPTY
        } else {
            self.prefix_union(j - 1)
        };
        self.blocks[j].nodes.difference(before)
    }

    /// SCCs contained in `vars`, in block order.
    fn sccs_within(&self, vars: IndexSet) -> impl Iterator<Item = IndexSet> + '_ {
        self.blocks
            .iter()
            .map(|b| b.scc)
            .filter(move |s| s.is_subset(vars))
    }
}

/// True if every variable in `vars` has all its regulators in `vars`.
pub fn is_closed_under_regulators(bn: &BooleanNetwork, vars: IndexSet) -> bool {
    vars.positions().all(|v| bn.regulators(v).is_subset(vars))
}

/// Splits the influence graph into basic blocks and sorts them topologically.
pub fn decompose(bn: &BooleanNetwork) -> BlockGraph {
    let n = bn.len();
    let adjacency: Vec<Vec<u32>> = (0..n)
        .map(|j| {
            (0..n)
                .filter(|&i| bn.regulators(i).contains(j))
                .map(|i| i as u32)
                .collect()
        })
        .collect();
    let sccs: Vec<IndexSet> = tarjan(n, |_| true, |v| adjacency[v].as_slice())
        .into_iter()
        .map(|c| IndexSet::from_positions(c.into_iter().map(|v| v as usize)))
        .collect();

    let mut raw: Vec<Block> = sccs
        .iter()
        .map(|&scc| {
            let regs = scc
                .positions()
                .fold(IndexSet::EMPTY, |acc, v| acc.union(bn.regulators(v)));
            let control_nodes = regs.difference(scc);
            Block {
                scc,
                nodes: scc.union(control_nodes),
                control_nodes,
                parents: Vec::new(),
                ancestor_closure: IndexSet::EMPTY,
                hat: IndexSet::EMPTY,
            }
        })
        .collect();

    let parent_sets: Vec<Vec<usize>> = raw
        .iter()
        .map(|b| {
            (0..raw.len())
                .filter(|&p| !raw[p].scc.intersection(b.control_nodes).is_empty())
                .collect()
        })
        .collect();

    // Kahn's algorithm, smallest (min member, min SCC member) first.
    let key = |b: &Block| (b.nodes.min(), b.scc.min());
    let mut remaining: Vec<usize> = parent_sets.iter().map(|p| p.len()).collect();
    let mut ready: BTreeSet<(Option<usize>, Option<usize>, usize)> = (0..raw.len())
        .filter(|&k| remaining[k] == 0)
        .map(|k| {
            let (a, b) = key(&raw[k]);
            (a, b, k)
        })
        .collect();
    let mut order = Vec::with_capacity(raw.len());
    while let Some(first) = ready.pop_first() {
        let k = first.2;
        order.push(k);
        for (c, ps) in parent_sets.iter().enumerate() {
            if ps.contains(&k) {
                remaining[c] -= 1;
                if remaining[c] == 0 {
                    let (a, b) = key(&raw[c]);
                    ready.insert((a, b, c));
                }
            }
        }
    }
    debug_assert_eq!(order.len(), raw.len(), "block graph has a cycle");

    let mut position = vec![0usize; raw.len()];
    for (pos, &k) in order.iter().enumerate() {
        position[k] = pos;
    }
    let mut blocks: Vec<Block> = Vec::with_capacity(raw.len());
    let mut covered = IndexSet::EMPTY;
    for &k in &order {
        let mut block = std::mem::replace(
            &mut raw[k],
            Block {
                scc: IndexSet::EMPTY,
                nodes: IndexSet::EMPTY,
                control_nodes: IndexSet::EMPTY,
                parents: Vec::new(),
                ancestor_closure: IndexSet::EMPTY,
                hat: IndexSet::EMPTY,
            },
        );
        let mut parents: Vec<usize> = parent_sets[k].iter().map(|&p| position[p]).collect();
        parents.sort_unstable();
        block.ancestor_closure = parents
            .iter()
            .fold(block.nodes, |acc, &p| acc.union(blocks[p].ancestor_closure));
        block.parents = parents;
        block.hat = block.nodes.difference(covered);
        covered = covered.union(block.nodes);
        blocks.push(block);
    }
    BlockGraph { blocks }
}

/// Transition system of block `j`. Elementary blocks get the plain system
/// over their own variables; non-elementary blocks get the system over the
/// ancestor closure restricted to states whose projection onto the closure
/// minus the block's SCC lies in `parent_basin`.
pub fn realized_ts(
    bn: &BooleanNetwork,
    graph: &BlockGraph,
    j: usize,
    parent_basin: Option<&StateSet>,
    mode: UpdateMode,
    cap_bits: usize,
) -> Result<TransitionSystem> {
    let block = &graph.blocks()[j];
    match (block.kind(), parent_basin) {
        (BlockKind::Elementary, _) => TransitionSystem::build(
            bn,
            Universe::whole(Layout::new(block.nodes)),
            mode,
            cap_bits,
        ),
        (BlockKind::NonElementary, Some(parent)) => realize(
            bn,
            block.ancestor_closure,
            block.ancestor_closure_minus(),
            parent,
            mode,
            cap_bits,
        ),
        (BlockKind::NonElementary, None) => Err(Error::Invalid(format!(
            "block {} is non-elementary and needs a parent basin",
            j + 1
        ))),
    }
}

fn realize(
    bn: &BooleanNetwork,
    vars: IndexSet,
    minus: IndexSet,
    parent_basin: &StateSet,
    mode: UpdateMode,
    cap_bits: usize,
) -> Result<TransitionSystem> {
    let layout = Layout::new(vars);
    if layout.width() > cap_bits {
        return Err(Error::StateCapExceeded {
            width: layout.width(),
            cap_bits,
        });
    }
    let parent_layout = Layout::new(minus);
    if parent_basin.width() != parent_layout.width() {
        return Err(Error::LayoutMismatch);
    }
    let proj = Projection::new(&layout, &parent_layout)?;
    let mut members = StateSet::empty(layout.width());
    for code in 0..(1u32 << layout.width()) {
        let s = State(code);
        if parent_basin.contains(proj.apply(s)) {
            members.insert(s);
        }
    }
    if members.is_empty() {
        return Err(Error::EmptyUniverse);
    }
    TransitionSystem::build(bn, Universe { layout, members }, mode, cap_bits)
}

/// Guarded pre-image fixpoint: starting from `attractor`, repeatedly adds
/// predecessors, dropping any whose projection misses `guard`'s basin.
pub fn compute_basin_block(
    ts: &TransitionSystem,
    attractor: &StateSet,
    guard: Option<(&Projection, &StateSet)>,
) -> StateSet {
    let mut basin = attractor.clone();
    let mut frontier: Vec<State> = attractor.iter().collect();
    while let Some(s) = frontier.pop() {
        for &p in ts.predecessors(s) {
            if let Some((proj, allowed)) = guard {
                if !allowed.contains(proj.apply(p)) {
                    continue;
                }
            }
            if basin.insert(p) {
                frontier.push(p);
            }
        }
    }
    basin
}

type ProjectionKey = (IndexSet, Vec<State>);

/// Pipeline state for blockwise basin computation. Basins and realized
/// transition systems are cached per (variable set, attractor projection).
pub struct BlockBasins<'a> {
    bn: &'a BooleanNetwork,
    graph: BlockGraph,
    mode: UpdateMode,
    cap_bits: usize,
    basins: HashMap<ProjectionKey, Rc<StateSet>>,
    systems: HashMap<ProjectionKey, Rc<TransitionSystem>>,
    local_attractors: HashMap<IndexSet, Rc<Vec<StateSet>>>,
}

impl<'a> BlockBasins<'a> {
    pub fn new(bn: &'a BooleanNetwork, mode: UpdateMode, cap_bits: usize) -> BlockBasins<'a> {
        BlockBasins {
            bn,
            graph: decompose(bn),
            mode,
            cap_bits,
            basins: HashMap::new(),
            systems: HashMap::new(),
            local_attractors: HashMap::new(),
        }
    }

    pub fn with_defaults(bn: &'a BooleanNetwork) -> BlockBasins<'a> {
        BlockBasins::new(bn, UpdateMode::Async, DEFAULT_STATE_CAP_BITS)
    }

    pub fn graph(&self) -> &BlockGraph {
        &self.graph
    }

    /// Number of realized transition systems built so far.
    pub fn realized_count(&self) -> usize {
        self.systems.len()
    }

    /// Basin of `attractor` (given as states over `Layout::new(vars)`) in the
    /// dynamics of the regulator-closed variable set `vars`.
    pub fn basin(&mut self, vars: IndexSet, attractor: &[State]) -> Result<Rc<StateSet>> {
        let mut states = attractor.to_vec();
        states.sort_unstable();
        states.dedup();
        let key = (vars, states);
        if let Some(hit) = self.basins.get(&key) {
            return Ok(hit.clone());
        }
        debug_assert!(is_closed_under_regulators(self.bn, vars));
        let layout = Layout::new(vars);
        let target = StateSet::from_states(layout.width(), key.1.iter().copied());
        let last = self
            .graph
            .sccs_within(vars)
            .last()
            .ok_or(Error::NotParentClosed)?;
        let basin = if last == vars {
            let ts = TransitionSystem::build(
                self.bn,
                Universe::whole(layout),
                self.mode,
                self.cap_bits,
            )?;
            compute_basin(&ts, &target)
        } else {
            let minus = vars.difference(last);
            let minus_layout = Layout::new(minus);
            let proj = Projection::new(&layout, &minus_layout)?;
            let parent_attractor: Vec<State> = key.1.iter().map(|&s| proj.apply(s)).collect();
            let parent_basin = self.basin(minus, &parent_attractor)?;
            let ts = self.realized(vars, minus, &parent_attractor, &parent_basin)?;
            compute_basin_block(&ts, &target, Some((&proj, &parent_basin)))
        };
        let basin = Rc::new(basin);
        self.basins.insert(key, basin.clone());
        Ok(basin)
    }

    fn realized(
        &mut self,
        vars: IndexSet,
        minus: IndexSet,
        parent_attractor: &[State],
        parent_basin: &StateSet,
    ) -> Result<Rc<TransitionSystem>> {
        let mut states = parent_attractor.to_vec();
        states.sort_unstable();
        states.dedup();
        let key = (vars, states);
        if let Some(ts) = self.systems.get(&key) {
            return Ok(ts.clone());
        }
        let ts = Rc::new(realize(
            self.bn,
            vars,
            minus,
            parent_basin,
            self.mode,
            self.cap_bits,
        )?);
        self.systems.insert(key, ts.clone());
        Ok(ts)
    }

    /// Projection of a global attractor onto the ancestor closure of block
    /// `j`, together with its basin there.
    pub fn block_basin(
        &mut self,
        j: usize,
        global_attractor: &StateSet,
    ) -> Result<(Vec<State>, Rc<StateSet>)> {
        let vars = self.graph.blocks()[j].ancestor_closure;
        let proj = Projection::new(&Layout::full(self.bn.len()), &Layout::new(vars))?;
        let mut local: Vec<State> = global_attractor.iter().map(|s| proj.apply(s)).collect();
        local.sort_unstable();
        local.dedup();
        let basin = self.basin(vars, &local)?;
        Ok((local, basin))
    }

    /// All attractors of the dynamics of the regulator-closed set `vars`,
    /// found block by block: each attractor of the set without its last SCC
    /// realizes a transition system whose attractors are collected.
    pub fn attractors_within(&mut self, vars: IndexSet) -> Result<Rc<Vec<StateSet>>> {
        if let Some(hit) = self.local_attractors.get(&vars) {
            return Ok(hit.clone());
        }
        let layout = Layout::new(vars);
        let last = self
            .graph
            .sccs_within(vars)
            .last()
            .ok_or(Error::NotParentClosed)?;
        let mut found: Vec<StateSet> = if last == vars {
            let ts = TransitionSystem::build(
                self.bn,
                Universe::whole(layout),
                self.mode,
                self.cap_bits,
            )?;
            attractors(&ts).into_iter().map(|a| a.states).collect()
        } else {
            let minus = vars.difference(last);
            let parents = self.attractors_within(minus)?;
            let mut out = Vec::new();
            for parent in parents.iter() {
                let parent_states: Vec<State> = parent.iter().collect();
                let parent_basin = self.basin(minus, &parent_states)?;
                let ts = self.realized(vars, minus, &parent_states, &parent_basin)?;
                out.extend(attractors(&ts).into_iter().map(|a| a.states));
            }
            out
        };
        found.sort_by_key(|s| s.first());
        found.dedup();
        let found = Rc::new(found);
        self.local_attractors.insert(vars, found.clone());
        Ok(found)
    }
}

/// Crosses block attractors (attractors of each ancestor closure) across
/// all blocks, keeping the non-empty combinations, as full-network sets.
pub fn compose_attractors(engine: &mut BlockBasins<'_>) -> Result<Vec<StateSet>> {
    let closures: Vec<IndexSet> = engine
        .graph()
        .blocks()
        .iter()
        .map(|b| b.ancestor_closure)
        .collect();
    let mut partial: Vec<(StateSet, Layout)> =
        vec![(StateSet::full(0), Layout::new(IndexSet::EMPTY))];
    for vars in closures {
        let layout = Layout::new(vars);
        let local = engine.attractors_within(vars)?;
        let mut next = Vec::new();
        for (set, set_layout) in &partial {
            for a in local.iter() {
                let (joined, joined_layout) = cross_sets(set, set_layout, a, &layout);
                if !joined.is_empty() {
                    next.push((joined, joined_layout));
                }
            }
        }
        partial = next;
    }
    let mut out: Vec<StateSet> = partial.into_iter().map(|(s, _)| s).collect();
    out.sort_by_key(|s| s.first());
    out.dedup();
    Ok(out)
}

/// States whose projection onto every block's ancestor closure lies in the
/// blockwise basin of the matching projection of `global_attractor`.
pub fn compose_basin(
    engine: &mut BlockBasins<'_>,
    global_attractor: &StateSet,
) -> Result<StateSet> {
    let n = global_attractor.width();
    let full = Layout::full(n);
    let mut parts = Vec::new();
    for j in 0..engine.graph().len() {
        let vars = engine.graph().blocks()[j].ancestor_closure;
        let (_, basin) = engine.block_basin(j, global_attractor)?;
        parts.push((Projection::new(&full, &Layout::new(vars))?, basin));
    }
    let mut out = StateSet::empty(n);
    for code in 0..(1u32 << n) {
        let s = State(code);
        if parts
            .iter()
            .all(|(proj, basin)| basin.contains(proj.apply(s)))
        {
            out.insert(s);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{bits, example_network, set_of};
    use crate::transition::build_async_ts;

    fn ids(set: IndexSet) -> Vec<usize> {
        set.to_one_based()
    }

    #[test]
    fn example_network_has_two_blocks() {
        let bg = decompose(&example_network());
        assert_eq!(bg.len(), 2);
        let (b1, b2) = (&bg.blocks()[0], &bg.blocks()[1]);
        assert_eq!(ids(b1.nodes), vec![1, 2]);
        assert!(b1.is_elementary());
        assert_eq!(ids(b2.nodes), vec![2, 3, 4]);
        assert_eq!(b2.kind(), BlockKind::NonElementary);
        assert_eq!(b2.parents, vec![0]);
        assert_eq!(ids(b2.control_nodes), vec![2]);
        assert_eq!(ids(b2.hat), vec![3, 4]);
        assert_eq!(ids(b2.ancestor_closure), vec![1, 2, 3, 4]);
        assert_eq!(ids(b2.ancestor_closure_minus()), vec![1, 2]);
        assert_eq!(bg.edges(), vec![(0, 1)]);
    }

    #[test]
    fn strongly_connected_network_is_one_elementary_block() {
        let bn = BooleanNetwork::parse("a = b | c\nb = a & c\nc = a | b").unwrap();
        let bg = decompose(&bn);
        assert_eq!(bg.len(), 1);
        assert_eq!(ids(bg.blocks()[0].nodes), vec![1, 2, 3]);
        assert!(bg.blocks()[0].is_elementary());
    }

    #[test]
    fn chain_blocks_and_hats() {
        let bn = BooleanNetwork::parse("v1 = v1\nv2 = v1 & v2\nv3 = v2 | v3").unwrap();
        let bg = decompose(&bn);
        let nodes: Vec<Vec<usize>> = bg.blocks().iter().map(|b| ids(b.nodes)).collect();
        assert_eq!(nodes, vec![vec![1], vec![1, 2], vec![2, 3]]);
        let hats: Vec<Vec<usize>> = bg.blocks().iter().map(|b| ids(b.hat)).collect();
        assert_eq!(hats, vec![vec![1], vec![2], vec![3]]);
        assert_eq!(bg.edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn constants_form_their_own_blocks() {
        let bn = BooleanNetwork::parse("a = 1\nb = a & b").unwrap();
        let bg = decompose(&bn);
        assert_eq!(bg.len(), 2);
        assert_eq!(ids(bg.blocks()[0].nodes), vec![1]);
        assert!(bg.blocks()[0].is_elementary());
        assert_eq!(ids(bg.blocks()[1].control_nodes), vec![1]);
    }

    #[test]
    fn common_parent_does_not_link_siblings() {
        let bn = BooleanNetwork::parse("a = a\nb = a | b\nc = !a & c").unwrap();
        let bg = decompose(&bn);
        assert_eq!(bg.len(), 3);
        assert_eq!(bg.edges(), vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn realized_universes_of_the_second_block() {
        let bn = example_network();
        let bg = decompose(&bn);
        let left = set_of(2, &["10", "00", "01"]);
        let ts = realized_ts(&bn, &bg, 1, Some(&left), UpdateMode::Async, 24).unwrap();
        assert_eq!(ts.members().len(), 12);
        let right = set_of(2, &["11"]);
        let ts = realized_ts(&bn, &bg, 1, Some(&right), UpdateMode::Async, 24).unwrap();
        assert_eq!(*ts.members(), set_of(4, &["1100", "1110", "1111", "1101"]));
        let ts = realized_ts(&bn, &bg, 0, None, UpdateMode::Async, 24).unwrap();
        assert_eq!(ts.members().len(), 4);
        assert_eq!(ts.successors(bits("01")), &[bits("00"), bits("01")]);
        assert_eq!(ts.successors(bits("00")), &[bits("00"), bits("10")]);
        let found: Vec<Vec<String>> = attractors(&ts)
            .iter()
            .map(|a| a.states.to_bit_strings())
            .collect();
        assert_eq!(found, vec![vec!["10"], vec!["11"]]);
        assert!(realized_ts(&bn, &bg, 1, None, UpdateMode::Async, 24).is_err());
        assert_eq!(
            realized_ts(
                &bn,
                &bg,
                1,
                Some(&StateSet::empty(2)),
                UpdateMode::Async,
                24
            )
            .err(),
            Some(Error::EmptyUniverse)
        );
    }

    #[test]
    fn guarded_basins_of_the_second_block() {
        let bn = example_network();
        let bg = decompose(&bn);
        let full = Layout::full(4);
        let parent = Layout::new(IndexSet::from_one_based([1, 2]));
        let proj = Projection::new(&full, &parent).unwrap();

        let left = set_of(2, &["10", "00", "01"]);
        let ts = realized_ts(&bn, &bg, 1, Some(&left), UpdateMode::Async, 24).unwrap();
        let basin = compute_basin_block(&ts, &set_of(4, &["1010"]), Some((&proj, &left)));
        assert_eq!(
            basin,
            set_of(
                4,
                &["1010", "1011", "1001", "0010", "0011", "0001", "0110", "0111", "0101"]
            )
        );

        let right = set_of(2, &["11"]);
        let ts = realized_ts(&bn, &bg, 1, Some(&right), UpdateMode::Async, 24).unwrap();
        let basin = compute_basin_block(&ts, &set_of(4, &["1100"]), Some((&proj, &right)));
        assert_eq!(basin, set_of(4, &["1100", "1110", "1111", "1101"]));
    }

    #[test]
    fn unrestricted_guard_matches_plain_basin() {
        let bn = example_network();
        let ts = build_async_ts(&bn, Universe::full(4)).unwrap();
        let parent = Layout::new(IndexSet::from_one_based([1, 2]));
        let proj = Projection::new(&Layout::full(4), &parent).unwrap();
        let everything = StateSet::full(2);
        for a in attractors(&ts) {
            assert_eq!(
                compute_basin_block(&ts, &a.states, Some((&proj, &everything))),
                compute_basin(&ts, &a.states)
            );
        }
    }

    #[test]
    fn pipeline_basins_on_the_example() {
        let bn = example_network();
        let mut engine = BlockBasins::with_defaults(&bn);
        let (local, basin) = engine.block_basin(0, &set_of(4, &["1010"])).unwrap();
        assert_eq!(local, vec![bits("10")]);
        assert_eq!(*basin, set_of(2, &["10", "00", "01"]));
        let (_, basin) = engine.block_basin(0, &set_of(4, &["1100"])).unwrap();
        assert_eq!(*basin, set_of(2, &["11"]));
        let (_, basin) = engine.block_basin(1, &set_of(4, &["1100"])).unwrap();
        assert_eq!(*basin, set_of(4, &["1100", "1110", "1111", "1101"]));
        let found = engine.attractors_within(IndexSet::full(4)).unwrap();
        let strings: Vec<Vec<String>> = found.iter().map(|s| s.to_bit_strings()).collect();
        assert_eq!(strings, vec![vec!["1000"], vec!["1100"], vec!["1010"]]);
    }
}
