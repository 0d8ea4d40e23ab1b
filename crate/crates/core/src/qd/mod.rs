//! Quality-diversity optimization: the elite archive over the behavior grid
//! and the mutation-selection loop that fills it.

pub mod archive;
pub mod run;

pub use archive::{Archive, Elite, InsertResult};
pub use run::{
    mutate, run, sample_prior_genome, GenerationStats, QdError, RunConfig, RunMetrics, RunResult,
    SeedGenome,
};
