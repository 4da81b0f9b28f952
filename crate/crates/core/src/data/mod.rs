//! Tabular datasets and the preprocessing pipeline.
//!
//! Raw CSV text is loaded into a [`RawDataset`] (strings only), cleaned with
//! [`drop_missing`], and turned into a numeric [`Dataset`] by
//! [`encode_categorical`]. Everything downstream (synthesis, merging,
//! splitting, partitioning, training) works on [`Dataset`].

mod dataset;
mod encode;
mod io;
mod labels;
mod merge;
mod raw;
mod split;
mod synth;

pub use dataset::{CodeTable, Dataset, Matrix};
pub use encode::{encode_categorical, encode_with_schema, FeatureKind, FeatureSchema, Schema};
pub use io::{dataset_to_csv, read_dataset_csv, sidecar_path, write_atomic, write_dataset_csv};
pub use labels::{class_name, parse_label, ASD, NON_ASD};
pub use merge::{merge_datasets, DISTANCE_FEATURE_NAMES};
pub use raw::{drop_missing, load_csv, parse_csv, RawDataset};
pub use split::{
    kfold_plan, partition_clients, partition_clients_with, train_test_split, FoldPlan,
    Partitioning, SplitPair,
};
pub use synth::synthesize_behavioral;
pub(crate) use split::partition_indices;
