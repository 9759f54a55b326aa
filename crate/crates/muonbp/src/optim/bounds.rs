//! Closed-form convergence bounds and optimal stepsizes for the
//! block-periodic schedule.
//!
//! The guarantee for the two-norm schedule with period `P` is a
//! five-term sum over `min_t E||grad f(X_t)||_op*`; at the optimal
//! two-stepsize pair (noiseless, no momentum) it collapses to
//! `sqrt(2 * delta0 * L_bp / T)` where `L_bp` is the harmonic mean of
//! the operator- and block-norm smoothness constants weighted `1/P` and
//! `(P-1)/P`. Tying the stepsizes replaces the harmonic mean with the
//! arithmetic one, which is never smaller.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::config::Period;

/// Everything the periodic-schedule bound depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub eta_full: f64,
    pub eta_block: f64,
    pub period: Period,
    /// Horizon `T`; must be divisible by a finite period.
    pub horizon: u64,
    /// Momentum coefficient in `[0, 1)`.
    pub momentum: f64,
    /// Gradient noise level.
    pub sigma: f64,
    /// Initial suboptimality `f(X_0) - f_*`.
    pub delta0: f64,
    pub l_op: f64,
    pub l_b: f64,
    /// Block grid dimensions `(r, c)`.
    pub grid: (usize, usize),
}

impl BoundInputs {
    /// Fraction of steps that are full steps; the infinite period is
    /// the `1/P -> 0` limit.
    fn full_weight(&self) -> f64 {
        match self.period {
            Period::Finite(p) => 1.0 / p as f64,
            Period::Infinite => 0.0,
        }
    }

    /// Step-weighted average stepsize
    /// `eta_full / P + eta_block * (P - 1) / P`.
    pub fn eta_bar(&self) -> f64 {
        let w = self.full_weight();
        w * self.eta_full + (1.0 - w) * self.eta_block
    }

    pub fn eta_max(&self) -> f64 {
        self.eta_full.max(self.eta_block)
    }

    /// `A = max(eta_full * sqrt(L_op), eta_block * sqrt(L_B))`.
    pub fn a_term(&self) -> f64 {
        (self.eta_full * self.l_op.sqrt()).max(self.eta_block * self.l_b.sqrt())
    }

    /// `Q = L_op eta_full^2 / (2P) + L_B eta_block^2 (P-1) / (2P)`.
    pub fn q_term(&self) -> f64 {
        let w = self.full_weight();
        w * self.l_op * self.eta_full * self.eta_full / 2.0
            + (1.0 - w) * self.l_b * self.eta_block * self.eta_block / 2.0
    }

    /// The momentum cross term, transcribed verbatim:
    /// `R = 2mu/(1-mu) * [ L_op eta_full max(eta_block sqrt(rc), eta_full) / P
    ///     + L_B eta_block max(eta_full, eta_block) (P-1) / P ]`.
    pub fn r_term(&self) -> f64 {
        if self.momentum == 0.0 {
            return 0.0;
        }
        let w = self.full_weight();
        let rc = (self.grid.0 * self.grid.1) as f64;
        let full_part =
            self.l_op * self.eta_full * (self.eta_block * rc.sqrt()).max(self.eta_full);
        let block_part = self.l_b * self.eta_block * self.eta_full.max(self.eta_block);
        2.0 * self.momentum / (1.0 - self.momentum) * (w * full_part + (1.0 - w) * block_part)
    }

    fn validate(&self) -> Result<()> {
        if let Period::Finite(p) = self.period {
            if p == 0 {
                return Err(Error::InvalidConfig("period must be at least 1".into()));
            }
            if self.horizon % p != 0 {
                return Err(Error::HorizonNotDivisible {
                    horizon: self.horizon,
                    period: p,
                });
            }
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidConfig(
                "momentum must be in [0, 1) for the bound".into(),
            ));
        }
        Ok(())
    }
}

/// The periodic-schedule guarantee on `min_t E||grad f(X_t)||_op*`: the
/// five-term sum
/// `delta0/(eta_bar T) + 4(1-mu) sigma eta_max/(eta_bar T)
///  + 6 mu sqrt(delta0) A/((1-mu) eta_bar T) + (Q+R)/eta_bar
///  + 2 sigma sqrt((1-mu)/(1+mu))`.
pub fn theorem2_bound(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    let t = inputs.horizon as f64;
    let eta_bar = inputs.eta_bar();
    let mu = inputs.momentum;

    let term_init = inputs.delta0 / (eta_bar * t);
    let term_noise_transient = 4.0 * (1.0 - mu) * inputs.sigma * inputs.eta_max() / (eta_bar * t);
    let term_momentum_transient =
        6.0 * mu * inputs.delta0.sqrt() * inputs.a_term() / ((1.0 - mu) * eta_bar * t);
    let term_stepsize = (inputs.q_term() + inputs.r_term()) / eta_bar;
    let term_noise_floor = 2.0 * inputs.sigma * ((1.0 - mu) / (1.0 + mu)).sqrt();

    Ok(term_init + term_noise_transient + term_momentum_transient + term_stepsize
        + term_noise_floor)
}

/// The single-norm trust-region guarantee (Muon under the operator
/// norm, BlockMuon under the block norm):
/// `delta0/(eta T) + 3 sqrt(L delta0) mu/((1-mu) T) + 2(1-mu) rho
///  sigma/T + L eta mu/(1-mu) + rho sigma sqrt((1-mu)/(1+mu)) + L
///  eta/2`.
pub fn ntr_bound(
    l: f64,
    rho: f64,
    delta0: f64,
    horizon: u64,
    eta: f64,
    mu: f64,
    sigma: f64,
) -> f64 {
    let t = horizon as f64;
    delta0 / (eta * t)
        + 3.0 * (l * delta0).sqrt() * mu / ((1.0 - mu) * t)
        + 2.0 * (1.0 - mu) * rho * sigma / t
        + l * eta * mu / (1.0 - mu)
        + rho * sigma * ((1.0 - mu) / (1.0 + mu)).sqrt()
        + l * eta / 2.0
}

/// The closed-form optimum of the noiseless bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalStepsizes {
    pub eta_full: f64,
    pub eta_block: f64,
    /// Weighted harmonic mean of `L_op` and `L_B`:
    /// governs the two-stepsize rate `sqrt(2 delta0 L_bp / T)`.
    pub l_bar_bp: f64,
    /// Best single stepsize when both step kinds are tied.
    pub eta_tied: f64,
    /// Weighted arithmetic mean governing the tied-stepsize rate.
    pub l_bar_bp2: f64,
}

impl OptimalStepsizes {
    pub fn two_stepsize_rate(&self, delta0: f64, horizon: u64) -> f64 {
        (2.0 * delta0 * self.l_bar_bp / horizon as f64).sqrt()
    }

    pub fn tied_stepsize_rate(&self, delta0: f64, horizon: u64) -> f64 {
        (2.0 * delta0 * self.l_bar_bp2 / horizon as f64).sqrt()
    }
}

/// Optimal stepsizes for the noiseless, momentum-free schedule:
/// `eta_full = sqrt(2 delta0 L_bp / T) / L_op`,
/// `eta_block = sqrt(2 delta0 L_bp / T) / L_B`, with
/// `1/L_bp = (1/P)/L_op + ((P-1)/P)/L_B`.
///
/// Expects `l_op <= l_b`; callers should warn (not reject) when the
/// estimates come out the other way around.
pub fn optimal_stepsizes(
    l_op: f64,
    l_b: f64,
    delta0: f64,
    horizon: u64,
    period: Period,
) -> OptimalStepsizes {
    let w = match period {
        Period::Finite(p) => 1.0 / p as f64,
        Period::Infinite => 0.0,
    };
    let l_bar_bp = 1.0 / (w / l_op + (1.0 - w) / l_b);
    let l_bar_bp2 = w * l_op + (1.0 - w) * l_b;
    let common = (2.0 * delta0 * l_bar_bp / horizon as f64).sqrt();
    OptimalStepsizes {
        eta_full: common / l_op,
        eta_block: common / l_b,
        l_bar_bp,
        eta_tied: (2.0 * delta0 / (horizon as f64 * l_bar_bp2)).sqrt(),
        l_bar_bp2,
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    #[test]
    fn period_one_recovers_single_norm_optimum() {
        let (l_op, delta0, t) = (3.0, 1.5, 200u64);
        let opt = optimal_stepsizes(l_op, 7.0, delta0, t, Period::Finite(1));
        assert_abs_diff_eq!(opt.l_bar_bp, l_op, epsilon = 1e-14);
        assert_abs_diff_eq!(
            opt.eta_full,
            (2.0 * delta0 / (t as f64 * l_op)).sqrt(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn equal_constants_tie_the_stepsizes() {
        let opt = optimal_stepsizes(2.0, 2.0, 1.0, 100, Period::Finite(4));
        assert_abs_diff_eq!(opt.eta_full, opt.eta_block, epsilon = 1e-14);
        assert_abs_diff_eq!(opt.l_bar_bp, opt.l_bar_bp2, epsilon = 1e-14);
    }

    #[test]
    fn harmonic_and_arithmetic_means_worked_example() {
        // L_op = 1, L_B = 4, P = 5: 1/L_bp = 0.2 + 0.8 * 0.25 = 0.4
        let opt = optimal_stepsizes(1.0, 4.0, 1.0, 100, Period::Finite(5));
        assert_abs_diff_eq!(opt.l_bar_bp, 2.5, epsilon = 1e-14);
        assert_abs_diff_eq!(opt.l_bar_bp2, 3.4, epsilon = 1e-14);
        assert!(1.0 <= opt.l_bar_bp && opt.l_bar_bp <= opt.l_bar_bp2 && opt.l_bar_bp2 <= 4.0);
    }

    #[test]
    fn infinite_period_is_the_block_limit() {
        let opt = optimal_stepsizes(1.0, 4.0, 1.0, 100, Period::Infinite);
        assert_abs_diff_eq!(opt.l_bar_bp, 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(opt.l_bar_bp2, 4.0, epsilon = 1e-14);
    }

    fn base_inputs() -> BoundInputs {
        BoundInputs {
            eta_full: 0.1,
            eta_block: 0.05,
            period: Period::Finite(5),
            horizon: 100,
            momentum: 0.0,
            sigma: 0.0,
            delta0: 2.0,
            l_op: 1.0,
            l_b: 4.0,
            grid: (2, 4),
        }
    }

    #[test]
    fn noiseless_momentum_free_p1_reduces_to_two_terms() {
        let mut inputs = base_inputs();
        inputs.period = Period::Finite(1);
        inputs.eta_block = inputs.eta_full;
        let eta = inputs.eta_full;
        let expect = inputs.delta0 / (eta * 100.0) + inputs.l_op * eta / 2.0;
        assert_abs_diff_eq!(theorem2_bound(&inputs).unwrap(), expect, epsilon = 1e-14);
    }

    #[test]
    fn bound_at_optimum_matches_closed_form() {
        let inputs = base_inputs();
        let opt = optimal_stepsizes(
            inputs.l_op,
            inputs.l_b,
            inputs.delta0,
            inputs.horizon,
            inputs.period,
        );
        let at_opt = BoundInputs {
            eta_full: opt.eta_full,
            eta_block: opt.eta_block,
            ..inputs.clone()
        };
        let bound = theorem2_bound(&at_opt).unwrap();
        let rate = opt.two_stepsize_rate(inputs.delta0, inputs.horizon);
        assert!((bound - rate).abs() <= 1e-12 * rate.max(1.0));
    }

    #[test]
    fn horizon_must_divide() {
        let mut inputs = base_inputs();
        inputs.horizon = 101;
        assert!(matches!(
            theorem2_bound(&inputs),
            Err(Error::HorizonNotDivisible { .. })
        ));
    }

    #[test]
    fn full_parameter_double_entry_check() {
        // independent transcription of the five terms
        let inputs = BoundInputs {
            eta_full: 0.2,
            eta_block: 0.07,
            period: Period::Finite(5),
            horizon: 100,
            momentum: 0.9,
            sigma: 1.0,
            delta0: 3.0,
            l_op: 1.0,
            l_b: 6.0,
            grid: (4, 2),
        };
        let (ef, eb, p, t, mu, sg) = (0.2f64, 0.07f64, 5.0f64, 100.0f64, 0.9f64, 1.0f64);
        let (lop, lb, rc, d0) = (1.0f64, 6.0f64, 8.0f64, 3.0f64);
        let ebar = ef / p + eb * (p - 1.0) / p;
        let emax = ef.max(eb);
        let a = (ef * lop.sqrt()).max(eb * lb.sqrt());
        let q = lop * ef * ef / (2.0 * p) + lb * eb * eb * (p - 1.0) / (2.0 * p);
        let r = 2.0 * mu / (1.0 - mu)
            * (lop * ef * (eb * rc.sqrt()).max(ef) / p
                + lb * eb * ef.max(eb) * (p - 1.0) / p);
        let expect = d0 / (ebar * t)
            + 4.0 * (1.0 - mu) * sg * emax / (ebar * t)
            + 6.0 * mu * d0.sqrt() * a / ((1.0 - mu) * ebar * t)
            + (q + r) / ebar
            + 2.0 * sg * ((1.0 - mu) / (1.0 + mu)).sqrt();
        assert_abs_diff_eq!(theorem2_bound(&inputs).unwrap(), expect, epsilon = 1e-14);
    }

    #[test]
    fn two_stepsizes_beat_tied_when_constants_differ() {
        let (l_op, l_b, d0, t) = (1.0, 4.0, 2.0, 100u64);
        for p in [2u64, 5, 10] {
            let opt = optimal_stepsizes(l_op, l_b, d0, t, Period::Finite(p));
            assert!(
                opt.two_stepsize_rate(d0, t) < opt.tied_stepsize_rate(d0, t),
                "P = {p}"
            );
        }
    }

    #[test]
    fn ntr_bound_two_term_form() {
        // sigma = 0, mu = 0 leaves delta0/(eta T) + L eta / 2
        let b = ntr_bound(2.0, 1.0, 1.0, 50, 0.1, 0.0, 0.0);
        assert_abs_diff_eq!(b, 1.0 / (0.1 * 50.0) + 2.0 * 0.1 / 2.0, epsilon = 1e-14);
    }
}
