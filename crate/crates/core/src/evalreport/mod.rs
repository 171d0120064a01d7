//! End-to-end evaluation: split, fit, select, score against the naive
//! baseline, persist models, and render result tables.

mod metrics;
mod pipeline;
mod report;
mod serving;

pub use metrics::{mae, per_dataset_win, relative_change};
pub use pipeline::{
    run_pipeline, EvaluationReport, EvaluationRow, PersistedModel, PipelineConfig, PipelineOutput,
    SummaryRow, Warning, REPORT_SCHEMA_VERSION,
};
pub use report::{emit_report, format_delta, format_mae, ReportFormat};
pub use serving::{
    check_compatibility, predict_unseen, read_manifest, write_model_dir, ManifestEntry,
    ModelManifest, PredictionRow, PredictionTable, MANIFEST_FILE, MANIFEST_SCHEMA_VERSION,
};
