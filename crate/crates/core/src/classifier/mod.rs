//! Dissimilarity-space classification: Euclidean embedding against the
//! training set, one-vs-rest pseudo-Fisher discriminants solved with the
//! Moore-Penrose pseudoinverse, max-rule fusion and a 1-D nearest neighbor.

mod dissimilarity;
mod fusion;
mod nearest;
mod persist;
mod pfld;

pub use dissimilarity::{dissimilarity_matrix, embed_probe, euclidean, DissimilarityMatrix};
pub use fusion::{fuse_max, fused_scores};
pub use nearest::nearest_neighbor_single_feature;
pub(crate) use nearest::nearest_label_index;
pub(crate) use pfld::argmax as argmax_index;
pub use persist::{load_model, read_model, save_model, write_model, MODEL_MAGIC};
pub use pfld::{
    classify, fit_pfld, train_pfld, ClassScores, PfldWeights, TrainedModel, SINGULAR_CUTOFF,
};
