//! Timing rows comparing the global and decomposed all-pairs methods.

use std::time::Instant;

use crate::control::{decomposed_cover, global_cover, CoverMode, GlobalAnalysis, SolveOptions};
use crate::decomp::decompose;
use crate::error::Result;
use crate::network::BooleanNetwork;

pub const CSV_HEADER: &str =
    "n,k,seed,t_global_ms,t_decomp_ms,lattice_nodes_global,lattice_nodes_blocks_sum";

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub t_global_ms: f64,
    pub t_decomp_ms: f64,
    pub lattice_nodes_global: u64,
    pub lattice_nodes_blocks_sum: u64,
}

impl BenchRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{:.3},{:.3},{},{}",
            self.n,
            self.k,
            self.seed,
            self.t_global_ms,
            self.t_decomp_ms,
            self.lattice_nodes_global,
            self.lattice_nodes_blocks_sum
        )
    }
}

/// Times full control on `bn` with both methods. Attractor detection is
/// shared and not timed; the global timing includes building the full
/// transition system. With fewer than two attractors both timings are 0.
pub fn bench_network(
    bn: &BooleanNetwork,
    k: usize,
    seed: u64,
    options: &SolveOptions,
) -> Result<BenchRow> {
    let n = bn.len();
    let blocks = decompose(bn);
    let lattice_nodes_blocks_sum = blocks.blocks().iter().map(|b| 1u64 << b.hat.len()).sum();
    let attractors = GlobalAnalysis::new(bn, options)?.attractors;
    let (mut t_global_ms, mut t_decomp_ms) = (0.0, 0.0);
    if attractors.len() >= 2 {
        let start = Instant::now();
        let global = GlobalAnalysis::new(bn, options)?;
        global_cover(&global, &attractors, CoverMode::MinimumCardinality)?;
        t_global_ms = start.elapsed().as_secs_f64() * 1e3;

        let start = Instant::now();
        decomposed_cover(bn, &attractors, options)?;
        t_decomp_ms = start.elapsed().as_secs_f64() * 1e3;
    }
    Ok(BenchRow {
        n,
        k,
        seed,
        t_global_ms,
        t_decomp_ms,
        lattice_nodes_global: 1u64 << n,
        lattice_nodes_blocks_sum,
    })
}
