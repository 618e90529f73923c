//! Brute-force oracles and seeded random networks.
//!
//! The oracles recompute successors straight from the expression trees and
//! search with plain BFS; none of them goes through the transition-system,
//! decomposition or cover code they are meant to check. [`check_network`]
//! runs that code and compares it with the oracles.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::control::{solve_with, GlobalAnalysis, Method, SolveOptions};
use crate::decomp::{compose_attractors, compose_basin, BlockBasins};
use crate::error::{Error, Result};
use crate::network::BooleanNetwork;
use crate::state::{ControlSet, IndexSet, State, StateSet};
use crate::transition::UpdateMode;

/// Largest network the oracles accept.
pub const ORACLE_MAX_VARS: usize = 12;
/// Largest network the exhaustive control oracle accepts.
pub const ORACLE_CONTROL_MAX_VARS: usize = 10;
pub const ORACLE_CONTROL_MAX_ATTRACTORS: usize = 16;

fn oracle_successors(bn: &BooleanNetwork, s: State) -> Vec<State> {
    let mut out = Vec::with_capacity(bn.len() + 1);
    let mut stable = false;
    for i in 0..bn.len() {
        let v = bn.eval(i, s);
        if v == s.get(i) {
            stable = true;
        } else {
            out.push(s.with(i, v));
        }
    }
    if stable {
        out.push(s);
    }
    out
}

fn oracle_forward(bn: &BooleanNetwork, s: State) -> HashSet<State> {
    let mut seen = HashSet::from([s]);
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for t in oracle_successors(bn, v) {
            if seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    seen
}

/// True iff some asynchronous path leads from `s` into `target`.
pub fn oracle_reaches(bn: &BooleanNetwork, s: State, target: &StateSet) -> Result<bool> {
    if bn.len() > ORACLE_MAX_VARS {
        return Err(Error::Invalid(format!(
            "oracle limited to {ORACLE_MAX_VARS} variables"
        )));
    }
    Ok(oracle_forward(bn, s).iter().any(|t| target.contains(*t)))
}

/// Per attractor, the set of states from which it is reachable.
pub fn oracle_basins(bn: &BooleanNetwork, attractor_sets: &[StateSet]) -> Result<Vec<StateSet>> {
    if bn.len() > ORACLE_MAX_VARS {
        return Err(Error::Invalid(format!(
            "oracle limited to {ORACLE_MAX_VARS} variables"
        )));
    }
    let n = bn.len();
    let mut basins = vec![StateSet::empty(n); attractor_sets.len()];
    for code in 0..(1u32 << n) {
        let s = State(code);
        let forward = oracle_forward(bn, s);
        for (a, basin) in attractor_sets.iter().zip(basins.iter_mut()) {
            if forward.iter().any(|t| a.contains(*t)) {
                basin.insert(s);
            }
        }
    }
    Ok(basins)
}

/// Attractors by definition: states whose forward closure is strongly
/// connected back to them, grouped, sorted by smallest state code.
pub fn oracle_attractors(bn: &BooleanNetwork) -> Result<Vec<StateSet>> {
    if bn.len() > ORACLE_MAX_VARS {
        return Err(Error::Invalid(format!(
            "oracle limited to {ORACLE_MAX_VARS} variables"
        )));
    }
    let n = bn.len();
    let forward: Vec<HashSet<State>> = (0..(1u32 << n))
        .map(|c| oracle_forward(bn, State(c)))
        .collect();
    let mut found: BTreeSet<Vec<State>> = BTreeSet::new();
    for (code, reached) in forward.iter().enumerate() {
        let s = State(code as u32);
        if reached.iter().all(|t| forward[t.0 as usize].contains(&s)) {
            let mut states: Vec<State> = reached.iter().copied().collect();
            states.sort();
            found.insert(states);
        }
    }
    Ok(found
        .into_iter()
        .map(|v| StateSet::from_states(n, v))
        .collect())
}

fn subsets_of(mask: u32) -> impl Iterator<Item = u32> {
    // All submasks of `mask`, including 0 and `mask`.
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            Some((cur - 1) & mask)
        };
        Some(cur)
    })
}

/// Pairs `(i, j)` for which no subset of `control` applied to any state of
/// attractor `i` lands in a state that reaches attractor `j`.
pub fn oracle_failed_pairs(
    bn: &BooleanNetwork,
    attractor_sets: &[StateSet],
    control: ControlSet,
) -> Result<Vec<(usize, usize)>> {
    let basins = oracle_basins(bn, attractor_sets)?;
    let p = attractor_sets.len();
    let mut failed = Vec::new();
    for i in 0..p {
        for j in (0..p).filter(|&j| j != i) {
            let ok = attractor_sets[i]
                .iter()
                .any(|s| subsets_of(control.0).any(|sub| basins[j].contains(s.toggle(sub))));
            if !ok {
                failed.push((i, j));
            }
        }
    }
    Ok(failed)
}

/// Exact minimum all-pairs control by enumerating candidate sets in order
/// of increasing size.
pub fn oracle_minimal_control(
    bn: &BooleanNetwork,
    attractor_sets: &[StateSet],
) -> Result<(usize, Vec<ControlSet>)> {
    let n = bn.len();
    if n > ORACLE_CONTROL_MAX_VARS || attractor_sets.len() > ORACLE_CONTROL_MAX_ATTRACTORS {
        return Err(Error::Invalid(format!(
            "control oracle limited to {ORACLE_CONTROL_MAX_VARS} variables and \
             {ORACLE_CONTROL_MAX_ATTRACTORS} attractors"
        )));
    }
    if attractor_sets.len() < 2 {
        return Ok((0, vec![IndexSet::EMPTY]));
    }
    let basins = oracle_basins(bn, attractor_sets)?;
    let p = attractor_sets.len();
    let sources: Vec<Vec<State>> = attractor_sets.iter().map(|a| a.iter().collect()).collect();
    for size in 0..=n {
        let mut hits: Vec<ControlSet> = (0..(1u32 << n))
            .filter(|c| c.count_ones() as usize == size)
            .filter(|&c| {
                (0..p).all(|i| {
                    (0..p).filter(|&j| j != i).all(|j| {
                        sources[i]
                            .iter()
                            .any(|s| subsets_of(c).any(|sub| basins[j].contains(s.toggle(sub))))
                    })
                })
            })
            .map(IndexSet)
            .collect();
        if !hits.is_empty() {
            hits.sort();
            return Ok((size, hits));
        }
    }
    unreachable!("toggling every variable reaches any state")
}

/// Parameters of a random network: `n` variables, each with between 1 and
/// `k` distinct regulators and a random truth table whose rows are 1 with
/// probability `bias`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomBnSpec {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub bias: f64,
}

impl RandomBnSpec {
    pub fn new(n: usize, k: usize, seed: u64) -> RandomBnSpec {
        RandomBnSpec {
            n,
            k,
            seed,
            bias: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > crate::network::DEFAULT_MAX_VARS {
            return Err(Error::Invalid(format!(
                "--vars must be in 1..=24, got {}",
                self.n
            )));
        }
        if self.k == 0 || self.k > self.n || self.k > crate::network::MAX_SUPPORT {
            return Err(Error::Invalid(format!(
                "--in-degree must be in 1..=min(vars, 20), got {}",
                self.k
            )));
        }
        if !(0.0..=1.0).contains(&self.bias) {
            return Err(Error::Invalid(format!(
                "--bias must be in [0, 1], got {}",
                self.bias
            )));
        }
        Ok(())
    }
}

/// Text of a seeded random network in the `.bn` format.
pub fn random_network_text(spec: &RandomBnSpec) -> Result<String> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let names: Vec<String> = (1..=spec.n).map(|i| format!("v{i}")).collect();
    let mut text = String::new();
    for name in &names {
        let arity = rng.gen_range(1..=spec.k);
        let mut regulators = sample(&mut rng, spec.n, arity).into_vec();
        regulators.sort_unstable();
        let rows = 1usize << arity;
        let mut table: Vec<bool> = Vec::new();
        for _attempt in 0..=10 {
            table = (0..rows).map(|_| rng.gen_bool(spec.bias)).collect();
            if table_has_support(&table, arity) {
                break;
            }
        }
        text.push_str(name);
        text.push_str(" = ");
        text.push_str(&table_to_dnf(&table, &regulators, &names));
        text.push('\n');
    }
    Ok(text)
}

/// A seeded random network.
pub fn generate_random_bn(spec: &RandomBnSpec) -> Result<BooleanNetwork> {
    BooleanNetwork::parse(&random_network_text(spec)?)
}

fn table_has_support(table: &[bool], arity: usize) -> bool {
    (0..arity).any(|k| (0..table.len()).any(|r| table[r] != table[r ^ (1 << k)]))
}

fn table_to_dnf(table: &[bool], regulators: &[usize], names: &[String]) -> String {
    let terms: Vec<String> = table
        .iter()
        .enumerate()
        .filter(|(_, &v)| v)
        .map(|(row, _)| {
            let literals: Vec<String> = regulators
                .iter()
                .enumerate()
                .map(|(k, &r)| {
                    if (row >> k) & 1 == 1 {
                        names[r].clone()
                    } else {
                        format!("!{}", names[r])
                    }
                })
                .collect();
            literals.join(" & ")
        })
        .collect();
    match terms.len() {
        0 => "0".to_string(),
        n if n == table.len() => "1".to_string(),
        1 => terms[0].clone(),
        _ => terms
            .iter()
            .map(|t| {
                if t.contains('&') {
                    format!("({t})")
                } else {
                    t.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" | "),
    }
}

/// Outcome of [`check_network`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NetworkCheck {
    pub attractors: usize,
    /// Disagreements between production code and the oracles.
    pub mismatches: Vec<String>,
    /// Whether the exhaustive control oracle was run.
    pub control_checked: bool,
    /// Pairs the reported decomposed control fails to switch.
    pub decomposed_unsound_pairs: Vec<(usize, usize)>,
    /// `(global, decomposed)` minimum sizes when they differ.
    pub gap: Option<(usize, usize)>,
}

/// Cross-checks the production pipeline on `bn` (asynchronous updates)
/// against the oracles: attractors, basins, block composition, and the
/// global all-pairs control when the network is small enough.
pub fn check_network(bn: &BooleanNetwork, options: &SolveOptions) -> Result<NetworkCheck> {
    let options = SolveOptions {
        mode: UpdateMode::Async,
        ..*options
    };
    let global = GlobalAnalysis::new(bn, &options)?;
    let mut check = NetworkCheck {
        attractors: global.attractors.len(),
        ..NetworkCheck::default()
    };
    if oracle_attractors(bn)? != global.attractors {
        check
            .mismatches
            .push("attractors differ from oracle".into());
    }
    let basins = oracle_basins(bn, &global.attractors)?;
    for (k, (a, o)) in global.attractors.iter().zip(&basins).enumerate() {
        if global.basin(a) != *o {
            check
                .mismatches
                .push(format!("basin of A{} differs from oracle", k + 1));
        }
    }
    let mut engine = BlockBasins::new(bn, options.mode, options.cap_bits);
    if compose_attractors(&mut engine)? != global.attractors {
        check
            .mismatches
            .push("block composition of attractors differs".into());
    }
    for (k, a) in global.attractors.iter().enumerate() {
        if compose_basin(&mut engine, a)? != global.basin(a) {
            check
                .mismatches
                .push(format!("block composition of basin A{} differs", k + 1));
        }
    }
    let p = global.attractors.len();
    if p >= 2 && bn.len() <= ORACLE_CONTROL_MAX_VARS && p <= ORACLE_CONTROL_MAX_ATTRACTORS {
        check.control_checked = true;
        let g = solve_with(bn, &global, &global.attractors, Method::Global, &options)?;
        let (size, sets) = oracle_minimal_control(bn, &global.attractors)?;
        if g.minimum_size != size || g.all_minimum_solutions != sets {
            check
                .mismatches
                .push("global control differs from oracle".into());
        }
        let d = solve_with(
            bn,
            &global,
            &global.attractors,
            Method::Decomposed,
            &options,
        )?;
        check.decomposed_unsound_pairs = oracle_failed_pairs(bn, &global.attractors, d.control)?;
        if d.minimum_size != g.minimum_size {
            check.gap = Some((g.minimum_size, d.minimum_size));
        }
    }
    Ok(check)
}
