//! Reading interaction logs, feature matrices, and availability masks.

mod features;
mod interactions;
mod mask;
mod split;
mod stats;

pub use features::{
    decode_mmfi, encode_mmfi, parse_features_tsv, read_features, write_features, FeatureMatrix,
    MMFI_DTYPE_F32, MMFI_MAGIC, MMFI_VERSION,
};
pub use interactions::{
    parse_interactions, read_interactions, IdMap, InteractionMatrix, ParsedInteractions,
};
pub use mask::{parse_mask, read_mask, write_mask, AvailabilityMask};
pub use split::holdout_split;
pub use stats::{dataset_stats, DatasetStats};
