//! Kernel SVM on precomputed Gram matrices: an SMO dual solver, a
//! one-vs-one multiclass wrapper, scores, stratified splitting and
//! cross-validated grid search.

mod cv;
mod io;
mod multiclass;
mod scores;
mod smo;

pub use cv::{
    cv_grid_search, stratified_folds, stratified_split, CvCell, CvOptions, CvOutcome, IndexAudit,
};
pub use io::SavedModel;
pub use multiclass::{sorted_classes, train_multiclass, MulticlassModel, PairModel};
pub use scores::{accuracy, balanced_accuracy, balanced_accuracy_over, imbalance_ratio, Metric};
pub use smo::{dual_objective, solve_binary, SmoOptions, TrainedModel, DEFAULT_TOL};
