//! Meshless PDE solving with physics-informed neural networks, plus a
//! decoupled architecture/hyperparameter search pipeline.
//!
//! The crate is organized bottom-up:
//!
//! - [`activation`], [`network`], [`jet`] — an MLP whose forward pass carries
//!   first and second input derivatives (a jet), and reverse accumulation
//!   over that jet for parameter gradients.
//! - [`pde`] — the seven benchmark problems: residual operators,
//!   boundary/initial terms, exact or reference solutions.
//! - [`sampling`] — collocation/boundary/initial point generation (random and
//!   uniform-grid schemes with the named presets) and dense test grids.
//! - [`loss`], [`optim`], [`trainer`] — the composite residual+constraint
//!   loss, full-batch Adam and L-BFGS (strong Wolfe), and the two-phase
//!   single-trial runner.
//! - [`search`] — the decoupled architecture search (activation, width
//!   regions, structures, changing point, verification) and a random-search
//!   baseline with exact trial accounting.
//! - [`analysis`] — heatmap grids, structure-error sweeps, loss-error
//!   regression and search-report comparison, all emitted as CSV.

pub mod activation;
pub mod analysis;
pub mod csvio;
pub mod error;
pub mod jet;
pub mod loss;
pub mod network;
pub mod optim;
pub mod pde;
pub mod sampling;
pub mod search;
pub mod trainer;

mod batch;

pub use activation::Activation;
pub use error::{Error, Result};
pub use jet::{forward_jet, JetEvaluator, JetValue};
pub use loss::{composite_loss, loss_gradient, LossBreakdown};
pub use network::{init_network, MlpArchitecture, MlpNetwork, ParamGradient};
pub use pde::{PdeId, PdeProblem};
pub use sampling::{sample_points, test_grid, PointSet, SamplingScheme, SamplingSpec, TestGrid};
pub use trainer::{l2_relative_error, train, TrainConfig, TrialResult};
