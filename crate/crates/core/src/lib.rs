//! Attractors, weak basins and minimal existential control sets for Boolean
//! networks under asynchronous (or synchronous) updates.
//!
//! Two routes solve the all-pairs control problem: a global one that works
//! on the full state space, and a decomposed one that splits the influence
//! graph into SCC blocks and searches one small lattice per block.

pub mod bench;
pub mod control;
pub mod decomp;
pub mod error;
pub mod network;
pub mod report;
pub mod scc;
pub mod state;
pub mod transition;
pub mod verify;

pub use control::{
    all_pairs_control, apply_control, build_control_matrix, full_control, hamming, hamming_to_set,
    label_closure, minimal_cover, target_control, ControlMatrix, ControlSolution, CoverMode,
    GlobalAnalysis, Method, SolveOptions, Witness,
};
pub use decomp::{
    compute_basin_block, decompose, realized_ts, Block, BlockBasins, BlockGraph, BlockKind,
};
pub use error::{Error, Result};
pub use network::{parse_network, BoolExpr, BooleanNetwork, Dependency, ParseOptions};
pub use state::{cross, project, ControlSet, IndexSet, Layout, Projection, State, StateSet};
pub use transition::{
    attractors, build_async_ts, build_sync_ts, compute_basin, pre_image, reach, Attractor,
    TransitionSystem, Universe, UpdateMode,
};

/// The four-variable network used throughout the documentation and tests.
pub const EXAMPLE_NETWORK: &str = "\
x1 = !x2 | (x1 & x2)
x2 = x1 & x2
x3 = x4 | (!x2 & x3)
x4 = !x3 & x4
";
