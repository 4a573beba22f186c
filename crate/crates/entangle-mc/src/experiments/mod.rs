//! Monte Carlo estimators over the sampled ensembles.
//!
//! Work is split into fixed-size logical shards, each owning its own RNG
//! stream derived from (seed, task, shard index). Shards produce partial
//! accumulators that are merged sequentially in shard order, so the outputs
//! are bit-identical whether the shards run on one thread or many. The
//! `parallel` feature (on by default) maps shards onto rayon; without it the
//! same plan runs on the current thread.

mod estimators;
mod figures;
mod hist;
mod run;

pub use estimators::{
    delta_e_distribution, entanglement_histogram, final_dist_fixed_initial, gate_from_separable,
    initial_stats_vs_delta, initial_stats_vs_delta_conditioned, mean_final_vs_initial,
    DeltaEDistribution, EstimatorCtx,
};
pub use figures::{
    crossing_point, run_figure, ExperimentConfig, ExperimentError, FigureId, FigureRun,
    NamedOutput, OutputKind,
};
pub use hist::{summary_csv, BinSpec, ConditionalCurve, Histogram, ScalarStat};
pub use run::{shard_layout, stream_id, ExecMode, Shard, SHARD_SAMPLES};
