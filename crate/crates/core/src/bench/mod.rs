//! Benchmark suites, run records and reports.

mod report;
mod stats;
mod suite;
mod svg;

pub use report::{
    rank_index, render_report, time_to_target, GapRow, Report, TtsRow, WinsRow, GAP_HEADER, MIN_TTS, RANKS,
    TTS_HEADER, WINS_HEADER,
};
pub use stats::{geo_stats, mean_std, primal_gap, tts_ratio, wins};
pub use suite::{
    read_records, records_path, run_experiment, AnnealSettings, Arm, ModelKind, RunRecord, Suite, RECORDS_FILE,
};
