//! Muon, BlockMuon, and MuonBP inside a simulated model-parallel
//! runtime.
//!
//! The crate is organized around five pieces:
//!
//! - [`tensor`]: dense matrices, SVD oracles, operator/nuclear/block
//!   norms and their dual witnesses, and Newton-Schulz
//!   orthogonalization.
//! - [`sharding`]: block partitions, shard layouts, and exact
//!   gather/scatter between full matrices and device-resident shards.
//! - [`optim`]: the non-Euclidean trust-region step family (Muon,
//!   BlockMuon, MuonBP) with momentum, two-stepsize scheduling, the RMS
//!   learning-rate transfer rule, and closed-form convergence bounds.
//! - [`sim`]: a virtual cluster that executes sharded optimizer steps
//!   and charges every collective and orthogonalization to
//!   communication/FLOP ledgers with a wall-clock model.
//! - [`testbed`]: differentiable problems with controllable smoothness
//!   constants, a gradient noise model, and smoothness estimators.

pub mod error;
pub mod optim;
pub mod sharding;
pub mod sim;
pub mod tensor;
pub mod testbed;

pub use error::{Error, Result};
pub use sharding::{gather, scatter, BlockPartition, ShardLayout, ShardedTensor};
pub use tensor::{Matrix, NsConfig};
