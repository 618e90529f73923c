//! Explicit transition systems, attractors and weak basins.

use crate::error::{Error, Result};
use crate::network::BooleanNetwork;
use crate::scc::tarjan;
use crate::state::{Layout, State, StateSet};

/// Default cap on explicit state spaces, as a power of two.
pub const DEFAULT_STATE_CAP_BITS: usize = 24;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum UpdateMode {
    #[default]
    Async,
    Sync,
}

/// The states a transition system ranges over: a layout of variables and
/// the member states of that layout's space.
#[derive(Clone, Debug)]
pub struct Universe {
    pub layout: Layout,
    pub members: StateSet,
}

impl Universe {
    pub fn full(n: usize) -> Universe {
        Universe::whole(Layout::full(n))
    }

    /// All states over `layout`.
    pub fn whole(layout: Layout) -> Universe {
        let members = StateSet::full(layout.width());
        Universe { layout, members }
    }
}

// Update function of one layout position, rewired to local bit positions.
struct LocalFunction {
    inputs: Vec<u8>,
    table: crate::network::TruthTable,
}

impl LocalFunction {
    #[inline]
    fn eval(&self, s: u32) -> bool {
        let mut r = 0u32;
        for (k, &b) in self.inputs.iter().enumerate() {
            r |= ((s >> b) & 1) << k;
        }
        self.table.row(r)
    }
}

fn compile(bn: &BooleanNetwork, layout: &Layout) -> Result<Vec<LocalFunction>> {
    layout
        .vars()
        .iter()
        .map(|&g| {
            let table = bn.table(g).clone();
            let inputs = table
                .inputs
                .iter()
                .map(|&i| {
                    layout
                        .local(i)
                        .map(|p| p as u8)
                        .ok_or(Error::NotParentClosed)
                })
                .collect::<Result<Vec<u8>>>()?;
            Ok(LocalFunction { inputs, table })
        })
        .collect()
}

/// Successor and predecessor lists over the members of a universe, indexed
/// by local state code. Edges leaving the universe are dropped.
pub struct TransitionSystem {
    universe: Universe,
    mode: UpdateMode,
    succ_offsets: Vec<u32>,
    succ: Vec<State>,
    pred_offsets: Vec<u32>,
    pred: Vec<State>,
}

impl TransitionSystem {
    pub fn build(
        bn: &BooleanNetwork,
        universe: Universe,
        mode: UpdateMode,
        cap_bits: usize,
    ) -> Result<TransitionSystem> {
        let width = universe.layout.width();
        if width > cap_bits {
            return Err(Error::StateCapExceeded { width, cap_bits });
        }
        if universe.members.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        let functions = compile(bn, &universe.layout)?;
        let space = 1usize << width;
        let members = &universe.members;

        let mut succ_offsets = Vec::with_capacity(space + 1);
        let mut succ = Vec::new();
        let mut in_degree = vec![0u32; space];
        succ_offsets.push(0);
        for code in 0..space {
            let s = State(code as u32);
            if members.contains(s) {
                let start = succ.len();
                match mode {
                    UpdateMode::Async => {
                        let mut has_stable = false;
                        for (p, f) in functions.iter().enumerate() {
                            if f.eval(s.0) == s.get(p) {
                                has_stable = true;
                            } else {
                                let t = s.toggle(1 << p);
                                if members.contains(t) {
                                    succ.push(t);
                                }
                            }
                        }
                        if has_stable {
                            succ.push(s);
                        }
                    }
                    UpdateMode::Sync => {
                        let t = functions
                            .iter()
                            .enumerate()
                            .fold(0u32, |acc, (p, f)| acc | ((f.eval(s.0) as u32) << p));
                        if members.contains(State(t)) {
                            succ.push(State(t));
                        }
                    }
                }
                succ[start..].sort_unstable();
                for t in &succ[start..] {
                    in_degree[t.code()] += 1;
                }
            }
            succ_offsets.push(succ.len() as u32);
        }

        let mut pred_offsets = Vec::with_capacity(space + 1);
        pred_offsets.push(0u32);
        let mut acc = 0u32;
        for d in &in_degree {
            acc += d;
            pred_offsets.push(acc);
        }
        let mut fill: Vec<u32> = pred_offsets[..space].to_vec();
        let mut pred = vec![State(0); succ.len()];
        for code in 0..space {
            let (a, b) = (succ_offsets[code] as usize, succ_offsets[code + 1] as usize);
            for t in &succ[a..b] {
                let slot = &mut fill[t.code()];
                pred[*slot as usize] = State(code as u32);
                *slot += 1;
            }
        }

        Ok(TransitionSystem {
            universe,
            mode,
            succ_offsets,
            succ,
            pred_offsets,
            pred,
        })
    }

    pub fn layout(&self) -> &Layout {
        &self.universe.layout
    }

    pub fn members(&self) -> &StateSet {
        &self.universe.members
    }

    pub fn mode(&self) -> UpdateMode {
        self.mode
    }

    pub fn width(&self) -> usize {
        self.universe.layout.width()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.len()
    }

    #[inline]
    pub fn successors(&self, s: State) -> &[State] {
        let c = s.code();
        &self.succ[self.succ_offsets[c] as usize..self.succ_offsets[c + 1] as usize]
    }

    #[inline]
    pub fn predecessors(&self, s: State) -> &[State] {
        let c = s.code();
        &self.pred[self.pred_offsets[c] as usize..self.pred_offsets[c + 1] as usize]
    }

    fn successor_codes(&self, c: usize) -> &[u32] {
        let slice = &self.succ[self.succ_offsets[c] as usize..self.succ_offsets[c + 1] as usize];
        // SAFETY: `State` is `repr(transparent)` over `u32`.
        unsafe { std::slice::from_raw_parts(slice.as_ptr() as *const u32, slice.len()) }
    }
}

pub fn build_async_ts(bn: &BooleanNetwork, universe: Universe) -> Result<TransitionSystem> {
    TransitionSystem::build(bn, universe, UpdateMode::Async, DEFAULT_STATE_CAP_BITS)
}

pub fn build_sync_ts(bn: &BooleanNetwork, universe: Universe) -> Result<TransitionSystem> {
    TransitionSystem::build(bn, universe, UpdateMode::Sync, DEFAULT_STATE_CAP_BITS)
}

/// Union of the predecessors of every member of `target`.
pub fn pre_image(ts: &TransitionSystem, target: &StateSet) -> StateSet {
    let mut out = StateSet::empty(ts.width());
    for s in target.iter() {
        for &p in ts.predecessors(s) {
            out.insert(p);
        }
    }
    out
}

/// Forward closure of `s`, including `s`.
pub fn reach(ts: &TransitionSystem, s: State) -> StateSet {
    let mut seen = StateSet::empty(ts.width());
    seen.insert(s);
    let mut frontier = vec![s];
    while let Some(v) = frontier.pop() {
        for &t in ts.successors(v) {
            if seen.insert(t) {
                frontier.push(t);
            }
        }
    }
    seen
}

/// A terminal strongly connected component of a transition system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attractor {
    pub id: usize,
    pub states: StateSet,
}

impl Attractor {
    pub fn min_state(&self) -> State {
        self.states.first().expect("attractors are non-empty")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Terminal SCCs of `ts`, ordered by their smallest state code; ids follow that order.
pub fn attractors(ts: &TransitionSystem) -> Vec<Attractor> {
    let space = 1usize << ts.width();
    let members = ts.members();
    let components = tarjan(
        space,
        |v| members.contains(State(v as u32)),
        |v| ts.successor_codes(v),
    );
    let mut owner = vec![u32::MAX; space];
    for (k, comp) in components.iter().enumerate() {
        for &v in comp {
            owner[v as usize] = k as u32;
        }
    }
    let mut found: Vec<StateSet> = components
        .iter()
        .enumerate()
        .filter(|(k, comp)| {
            comp.iter().all(|&v| {
                ts.successors(State(v))
                    .iter()
                    .all(|t| owner[t.code()] == *k as u32)
            })
        })
        .map(|(_, comp)| StateSet::from_states(ts.width(), comp.iter().map(|&v| State(v))))
        .collect();
    found.sort_by_key(|set| set.first());
    found
        .into_iter()
        .enumerate()
        .map(|(id, states)| {
            debug_assert!(states.iter().all(|s| reach(ts, s) == states));
            Attractor { id, states }
        })
        .collect()
}

/// Least fixpoint of the pre-image operator containing `attractor`: every
/// state from which some path reaches it.
pub fn compute_basin(ts: &TransitionSystem, attractor: &StateSet) -> StateSet {
    let mut basin = attractor.clone();
    let mut frontier: Vec<State> = attractor.iter().collect();
    while let Some(s) = frontier.pop() {
        for &p in ts.predecessors(s) {
            if basin.insert(p) {
                frontier.push(p);
            }
        }
    }
    basin
}
