//! Input parsing and dataset-level splitting.

mod results;
mod series;
mod split;

pub use results::{
    parse_fold_accuracies, parse_results, EntryKey, FoldAccuracyTable, ResultsTable,
    SummaryAccuracy, SummaryTable,
};
pub use series::{
    discover_datasets, load_dataset, parse_ts_dataset, DatasetFiles, TimeSeriesDataset,
    TimeSeriesInstance,
};
pub use split::{split_datasets, SplitAssignment, SplitRatios};
