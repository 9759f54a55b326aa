//! The non-Euclidean trust-region step family: Muon, BlockMuon, and
//! MuonBP, plus scaled sign descent, the RMS learning-rate transfer
//! rule, and the closed-form convergence bounds.

mod bounds;
mod config;
mod sign;
mod step;

pub use bounds::{ntr_bound, optimal_stepsizes, theorem2_bound, BoundInputs, OptimalStepsizes};
pub use config::{OptimizerConfig, OrthBackend, Orthogonalizer, Period};
pub use sign::{baseline_sign_step, rms_transfer_scale, sign_descent_step};
pub use step::{muonbp_step, MomentumState, NtrNorm, StepMode, StepReport};

pub use step::ntr_step;
