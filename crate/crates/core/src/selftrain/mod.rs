//! Class-rebalancing self-training: rank classes by labeled count, convert
//! the counts into per-rank sampling proportions (ISDL or ISDLplus), select
//! the per-class top-confidence pseudo-labels each generation, and retrain.

mod schedule;
mod select;
mod train_loop;

pub use schedule::{
    proportion_isdl, proportion_isdlplus, rank_classes, ClassRanking, SamplingSchedule, Variant,
};
pub use select::{above_floor_counts, select_pseudo, PseudoLabel, PseudoLabelBatch};
pub use train_loop::{
    self_train, write_generations_csv, GenerationClassStats, GenerationStats, SelfTrainConfig,
    SelfTrainOutcome,
};
