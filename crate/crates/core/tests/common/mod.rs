#![allow(dead_code)]

use std::collections::BTreeSet;

use bnctl_core::verify::{generate_random_bn, RandomBnSpec};
use bnctl_core::{BooleanNetwork, IndexSet, State, StateSet};

pub const CORPUS_SIZE: u64 = 210;

/// Seeded random networks with 2..=8 variables and in-degree at most 2.
pub fn corpus() -> impl Iterator<Item = (RandomBnSpec, BooleanNetwork)> {
    (0..CORPUS_SIZE).map(|seed| {
        let n = 2 + (seed % 7) as usize;
        let k = 1 + ((seed / 7) % 2) as usize;
        let spec = RandomBnSpec::new(n, k, seed);
        (spec, generate_random_bn(&spec).expect("corpus network"))
    })
}

pub fn example() -> BooleanNetwork {
    BooleanNetwork::parse(bnctl_core::EXAMPLE_NETWORK).unwrap()
}

pub fn bits(s: &str) -> State {
    State::parse_bits(s).unwrap()
}

pub fn set_of(width: usize, states: &[&str]) -> StateSet {
    StateSet::from_states(width, states.iter().map(|s| bits(s)))
}

pub fn family(sets: &[&[usize]]) -> BTreeSet<IndexSet> {
    sets.iter()
        .map(|s| IndexSet::from_one_based(s.iter().copied()))
        .collect()
}
