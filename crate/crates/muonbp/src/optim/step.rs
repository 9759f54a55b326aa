//! Trust-region steps and the MuonBP recursion.
//!
//! Every update is the dual-norm witness of the momentum in the chosen
//! norm: the polar factor under the operator norm, blockwise polar
//! factors under the block-spectral norm. MuonBP alternates between the
//! two, communicating once per period.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::optim::config::{OptimizerConfig, Orthogonalizer};
use crate::optim::rms_transfer_scale;
use crate::sharding::{gather, scatter, BlockPartition, ShardedTensor};
use crate::tensor::{block_spectral_norm, operator_norm, Matrix};

/// Norm choice for a single trust-region step.
#[derive(Debug, Clone)]
pub enum NtrNorm<'a> {
    Operator,
    Block(&'a BlockPartition),
}

/// One non-Euclidean trust-region step: `x - eta * W` where `W` is the
/// dual witness of `m` (the steepest descent direction of the linear
/// model over the `eta`-ball of the chosen norm).
pub fn ntr_step(
    x: &Matrix,
    m: &Matrix,
    eta: f64,
    norm: NtrNorm<'_>,
    orth: &Orthogonalizer,
) -> Result<Matrix> {
    if x.shape() != m.shape() {
        return Err(Error::ShapeMismatch {
            expected: x.shape(),
            got: m.shape(),
            context: "ntr_step".into(),
        });
    }
    let witness = match norm {
        NtrNorm::Operator => orth.apply(m),
        NtrNorm::Block(part) => {
            part.check_matches(m, "ntr_step block norm")?;
            let blocks: Vec<Matrix> = part
                .iter_blocks()
                .map(|(i, j)| orth.apply(&part.extract(m, i, j)))
                .collect();
            part.assemble(&blocks)?
        }
    };
    Ok(x.sub_scaled(&witness, eta))
}

/// Whether a step gathered for full orthogonalization or stayed
/// shard-local.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepMode {
    Full,
    Block,
}

impl StepMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            StepMode::Full => "full",
            StepMode::Block => "block",
        }
    }
}

/// What a single optimizer step did. Communication bytes and FLOPs are
/// filled in by the simulation runtime that drives the step.
#[derive(Debug, Clone, Serialize)]
pub struct StepReport {
    pub step: u64,
    pub mode: StepMode,
    /// Effective stepsize after RMS transfer scaling.
    pub stepsize: f64,
    /// Operator norm of the orthogonalized update `s * U`.
    pub update_op_norm: f64,
    /// Block-spectral norm of the same update under the layout's
    /// partition.
    pub update_block_norm: f64,
    pub comm_bytes: u64,
    pub flops: u64,
}

/// Per-device momentum buffers plus the step counter.
#[derive(Debug, Clone)]
pub struct MomentumState {
    buffers: ShardedTensor,
    t: u64,
}

impl MomentumState {
    /// Buffers start at zero and keep the parameter layout at all times.
    pub fn new(template: &ShardedTensor) -> Result<Self> {
        let (rows, cols) = template.global_shape();
        Ok(Self {
            buffers: ShardedTensor::zeros(template.layout(), rows, cols)?,
            t: 0,
        })
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    pub fn buffers(&self) -> &ShardedTensor {
        &self.buffers
    }

    /// Gathered momentum, for diagnostics and lemma checks.
    pub fn gathered(&self) -> Matrix {
        gather(&self.buffers)
    }
}

/// One MuonBP step (Muon when the period is 1, BlockMuon when it is
/// infinite).
///
/// Momentum is always updated shard-locally. On full steps (`t mod P =
/// 0`, counting from zero) the momentum is gathered, orthogonalized
/// globally, and the update scattered back; on block steps each shard is
/// orthogonalized in place. A non-finite gradient rejects the step and
/// leaves the state untouched.
pub fn muonbp_step(
    state: &mut MomentumState,
    grad: &ShardedTensor,
    cfg: &OptimizerConfig,
    params: &ShardedTensor,
) -> Result<(ShardedTensor, StepReport)> {
    params.check_compatible(grad, "muonbp_step gradient")?;
    params.check_compatible(&state.buffers, "muonbp_step momentum")?;
    let t = state.t;
    if !grad.is_finite() {
        return Err(Error::NonFiniteGradient { step: t });
    }

    let mu = cfg.momentum;
    let momentum = state.buffers.zip_shards(grad, |m, g| mu * m + g)?;
    if !momentum.is_finite() {
        return Err(Error::NonFiniteGradient { step: t });
    }

    let orth = cfg.orthogonalizer();
    let part = params.partition();
    let (rows, cols) = params.global_shape();

    let (mode, stepsize, update_sharded, update_full) = if cfg.period.is_full_step(t) {
        let gathered = gather(&momentum);
        let witness = orth.apply(&gathered);
        let s = effective_stepsize(cfg.eta_full, (rows, cols), cfg.rms_beta);
        (StepMode::Full, s, scatter(&witness, cfg.layout)?, witness)
    } else {
        let witness = momentum.per_shard_map(|m| orth.apply(m))?;
        let shard_shape = witness.shard(0).shape();
        let s = effective_stepsize(cfg.eta_block, shard_shape, cfg.rms_beta);
        let full = gather(&witness);
        (StepMode::Block, s, witness, full)
    };

    let mut new_params = params.zip_shards(&update_sharded, |x, u| x - stepsize * u)?;
    if let Some(wd) = cfg.weight_decay {
        let base_eta = match mode {
            StepMode::Full => cfg.eta_full,
            StepMode::Block => cfg.eta_block,
        };
        let factor = 1.0 - base_eta * wd;
        new_params = new_params.per_shard_map(|x| x.scale(factor))?;
    }

    let report = StepReport {
        step: t,
        mode,
        stepsize,
        update_op_norm: stepsize * operator_norm(&update_full),
        update_block_norm: stepsize * block_spectral_norm(&update_full, &part)?,
        comm_bytes: 0,
        flops: 0,
    };

    state.buffers = momentum;
    state.t = t + 1;
    Ok((new_params, report))
}

/// RMS learning-rate transfer: multiply the base stepsize by
/// `beta * sqrt(max(m, n))` of the update matrix. Block steps pass the
/// shard shape, full steps the full shape.
fn effective_stepsize(eta: f64, shape: (usize, usize), rms_beta: Option<f64>) -> f64 {
    match rms_beta {
        Some(beta) => eta * rms_transfer_scale(shape, beta),
        None => eta,
    }
}
