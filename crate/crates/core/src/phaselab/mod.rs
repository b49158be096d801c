//! Seeded ensembles, phase-transition sweeps over `log2 π`, and the
//! distance-to-optimal sweep.
//!
//! Instances are independent, so sweeps map over them with [`Exec`] and
//! aggregate afterwards; output never depends on the worker count.
//!
//! Randomness: instance `i` draws from ChaCha8 seeded with
//! `ChaCha8Rng::seed_from_u64(seed)` and switched to stream `i` via
//! `set_stream`. Uniform reals are `(next_u64 >> 11) · 2^-53`; bounded
//! integers are the high word of `next_u64 · n`.
//!
//! [`Exec`]: crate::exec::Exec

mod config;
mod generate;
mod sweep;

pub use config::{EnsembleConfig, Generator, Instance};
pub use generate::{gen_powerlaw, gen_powerlaw_log, gen_uniform, gen_uniform_instance};
pub use sweep::{
    nearest_rank, read_distance_csv, read_sweep_csv, run_distance_sweep, run_sweep,
    write_distance_csv, write_distance_csv_file, write_sweep_csv, write_sweep_csv_file, Bin,
    DistanceInstance, DistanceRow, DistanceSweepResult, InstanceRecord, RunStatus, SweepResult,
    SweepRow, DISTANCE_CSV_HEADER, SWEEP_CSV_HEADER,
};
