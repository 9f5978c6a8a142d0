//! Independent checks of the protocol engine: an exhaustive branch walk over
//! every Bell and filter outcome, and a seeded Monte Carlo estimator.

use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

use crate::channels::{channel_state, correction_kraus, Channel, Distortion};
use crate::error::{Error, Result};
use crate::protocols::{run, run_validated, ChainConfig, ProtocolKind, Resolver, Transcript};
use crate::quantum::{
    bell_branches, kraus_branches, BellOutcome, KrausOutcome, KrausPair, PureState, RandomSource,
};

/// Longest chain the exhaustive walk accepts (`4^M` Bell paths).
pub const MAX_ENUMERATION_HOPS: usize = 10;
/// Paths lighter than this are dropped from the walk.
pub const PRUNE_WEIGHT: f64 = 1e-14;
/// Monte Carlo agreement band, in standard errors.
pub const SIGMA_BAND: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactResult {
    pub success_probability: f64,
    pub failure_probability: f64,
    /// Number of leaves of the outcome tree.
    pub branch_count: usize,
    /// GMTP: total weight of the paths with each error index, before the
    /// receiver's filter.
    pub per_error_index: BTreeMap<usize, f64>,
    /// GMTP: success weight contributed by each error index.
    pub per_error_index_success: BTreeMap<usize, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McResult {
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub std_error: f64,
}

impl McResult {
    pub fn from_counts(trials: u64, successes: u64) -> Self {
        let estimate = successes as f64 / trials as f64;
        let std_error = (estimate * (1.0 - estimate) / trials as f64).sqrt();
        McResult { trials, successes, estimate, std_error }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub z_score: f64,
    /// Standard error the z-score was measured in.
    pub sigma: f64,
}

struct Walk<'a> {
    config: &'a ChainConfig,
    result: ExactResult,
}

impl Walk<'_> {
    fn hop_branches(&self, carrier: &PureState, channel: &Channel) -> Result<Vec<(BellOutcome, f64, PureState)>> {
        let joint = carrier.tensor(&channel_state(channel))?;
        let mut out = Vec::with_capacity(4);
        for branch in bell_branches(&joint, 0, 1)? {
            if let Some(collapsed) = branch.collapsed {
                let corrected = collapsed.apply_single_qubit(0, &branch.outcome.correction().matrix())?;
                out.push((branch.outcome, branch.probability, corrected));
            }
        }
        Ok(out)
    }

    fn leaf(&mut self, weight: f64, success: bool) {
        self.result.branch_count += 1;
        if success {
            self.result.success_probability += weight;
        } else {
            self.result.failure_probability += weight;
        }
    }

    fn smtp(&mut self, hop: usize, carrier: &PureState, weight: f64) -> Result<()> {
        if hop == self.config.hops() {
            self.leaf(weight, true);
            return Ok(());
        }
        let channel = self.config.channels[hop];
        for (outcome, p, corrected) in self.hop_branches(carrier, &channel)? {
            let w = weight * p;
            if w < PRUNE_WEIGHT {
                continue;
            }
            let kraus = correction_kraus(&Distortion::hop(&channel, outcome.is_odd_parity()))?;
            let [ok, fail] = kraus_branches(&corrected, 0, &kraus)?;
            if fail.probability * w >= PRUNE_WEIGHT {
                self.leaf(w * fail.probability, false);
            }
            if let Some(next) = ok.post_state {
                if ok.probability * w >= PRUNE_WEIGHT {
                    self.smtp(hop + 1, &next, w * ok.probability)?;
                }
            }
        }
        Ok(())
    }

    fn gmtp(&mut self, hop: usize, carrier: &PureState, weight: f64, swaps: usize, u: f64, v: f64) -> Result<()> {
        if hop == self.config.hops() {
            *self.result.per_error_index.entry(swaps).or_insert(0.0) += weight;
            let distortion = Distortion::new(u, v)?;
            let success = if distortion.is_balanced() {
                self.leaf(weight, true);
                weight
            } else {
                let [ok, fail] = kraus_branches(carrier, 0, &correction_kraus(&distortion)?)?;
                self.leaf(weight * ok.probability, true);
                self.leaf(weight * fail.probability, false);
                weight * ok.probability
            };
            *self.result.per_error_index_success.entry(swaps).or_insert(0.0) += success;
            return Ok(());
        }
        let channel = self.config.channels[hop];
        for (outcome, p, corrected) in self.hop_branches(carrier, &channel)? {
            let w = weight * p;
            if w < PRUNE_WEIGHT {
                continue;
            }
            let (nu, nv, swaps) = if outcome.is_odd_parity() {
                (u * channel.beta(), v * channel.alpha(), swaps + 1)
            } else {
                (u * channel.alpha(), v * channel.beta(), swaps)
            };
            // Keep the pair away from underflow; only the ratio matters.
            let m = nu.max(nv);
            self.gmtp(hop + 1, &corrected, w, swaps, nu / m, nv / m)?;
        }
        Ok(())
    }
}

/// Exact success probability by walking every Bell outcome sequence and
/// every filter outcome of the literal protocol.
pub fn enumerate(config: &ChainConfig) -> Result<ExactResult> {
    config.validate()?;
    if config.hops() > MAX_ENUMERATION_HOPS {
        return Err(Error::TooLarge { hops: config.hops(), max: MAX_ENUMERATION_HOPS });
    }
    let mut walk = Walk {
        config,
        result: ExactResult {
            success_probability: 0.0,
            failure_probability: 0.0,
            branch_count: 0,
            per_error_index: BTreeMap::new(),
            per_error_index_success: BTreeMap::new(),
        },
    };
    match config.kind {
        ProtocolKind::Smtp => walk.smtp(0, &config.input, 1.0)?,
        ProtocolKind::Gmtp => walk.gmtp(0, &config.input, 1.0, 0, 1.0, 1.0)?,
    }
    Ok(walk.result)
}

/// Steers the engine down one prescribed path and records the fan-out seen
/// at every decision.
struct ScriptedResolver {
    path: Vec<usize>,
    widths: Vec<usize>,
    depth: usize,
}

impl ScriptedResolver {
    fn choose(&mut self, width: usize) -> usize {
        let d = self.depth;
        self.depth += 1;
        if d < self.widths.len() {
            self.widths[d] = width;
        } else {
            self.widths.push(width);
        }
        if d >= self.path.len() {
            self.path.push(0);
        }
        self.path[d]
    }
}

impl Resolver for ScriptedResolver {
    fn bell(&mut self, state: &PureState, q1: usize, q2: usize) -> Result<(BellOutcome, PureState, f64)> {
        let possible: Vec<_> = bell_branches(state, q1, q2)?
            .into_iter()
            .filter(|b| b.is_possible() && b.collapsed.is_some())
            .collect();
        let pick = self.choose(possible.len());
        let b = &possible[pick];
        Ok((b.outcome, b.collapsed.clone().expect("filtered"), b.probability))
    }

    fn kraus(&mut self, state: PureState, qubit: usize, kraus: &KrausPair) -> Result<KrausOutcome> {
        let possible: Vec<_> =
            kraus_branches(&state, qubit, kraus)?.into_iter().filter(|b| b.post_state.is_some()).collect();
        let pick = self.choose(possible.len());
        let b = &possible[pick];
        Ok(KrausOutcome {
            success: b.success,
            post_state: b.post_state.clone().expect("filtered"),
            probability: b.probability,
        })
    }
}

/// Every transcript the protocol engine can produce for `config`, each
/// carrying its exact path probability.
pub fn enumerate_transcripts(config: &ChainConfig) -> Result<Vec<Transcript>> {
    config.validate()?;
    if config.hops() > MAX_ENUMERATION_HOPS {
        return Err(Error::TooLarge { hops: config.hops(), max: MAX_ENUMERATION_HOPS });
    }
    let mut out = Vec::new();
    let mut path: Vec<usize> = Vec::new();
    loop {
        let mut resolver = ScriptedResolver { path, widths: Vec::new(), depth: 0 };
        out.push(run(config, &mut resolver)?);
        let ScriptedResolver { path: mut taken, widths, depth } = resolver;
        taken.truncate(depth);
        // Advance the deepest decision that still has an unexplored branch.
        loop {
            let Some(d) = taken.len().checked_sub(1) else {
                return Ok(out);
            };
            if taken[d] + 1 < widths[d] {
                taken[d] += 1;
                break;
            }
            taken.pop();
        }
        path = taken;
    }
}

/// Trials per random stream in [`monte_carlo`] and [`for_each_trial`].
pub const TRIAL_BLOCK: u64 = 1024;

/// Runs trials `block * TRIAL_BLOCK ..` (at most `TRIAL_BLOCK` of them, capped
/// at `trials`) on the stream `RandomSource::derived(master_seed, block)`.
fn run_block(
    config: &ChainConfig,
    trials: u64,
    master_seed: u64,
    block: u64,
    visit: &mut impl FnMut(Transcript) -> Result<()>,
) -> Result<()> {
    let start = block * TRIAL_BLOCK;
    let end = (start + TRIAL_BLOCK).min(trials);
    let mut rng = RandomSource::derived(master_seed, block);
    for _ in start..end {
        visit(run_validated(config, &mut rng)?)?;
    }
    Ok(())
}

fn block_count(trials: u64) -> u64 {
    trials.div_ceil(TRIAL_BLOCK)
}

/// Sequentially replays exactly the trials [`monte_carlo`] samples, in trial
/// order, handing each transcript to `visit`.
pub fn for_each_trial(
    config: &ChainConfig,
    trials: u64,
    master_seed: u64,
    mut visit: impl FnMut(Transcript) -> Result<()>,
) -> Result<()> {
    config.validate()?;
    for block in 0..block_count(trials) {
        run_block(config, trials, master_seed, block, &mut visit)?;
    }
    Ok(())
}

/// Seeded estimate of the success probability. Trials are grouped into
/// blocks of [`TRIAL_BLOCK`], block `b` drawing from
/// `RandomSource::derived(master_seed, b)`, so the result does not depend on
/// how blocks are scheduled across threads.
pub fn monte_carlo(config: &ChainConfig, trials: u64, master_seed: u64) -> Result<McResult> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    config.validate()?;
    let successes = (0..block_count(trials))
        .into_par_iter()
        .map(|block| {
            let mut count = 0;
            run_block(config, trials, master_seed, block, &mut |t| {
                count += u64::from(t.success);
                Ok(())
            })?;
            Ok::<u64, Error>(count)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(McResult::from_counts(trials, successes))
}

/// Passes when the estimate lies within four standard errors of the exact
/// value. When every trial agreed (zero sample variance) the binomial
/// standard error at the exact probability is used instead.
pub fn compare(exact: &ExactResult, mc: &McResult) -> Verdict {
    compare_value(exact.success_probability, mc)
}

pub fn compare_value(expected: f64, mc: &McResult) -> Verdict {
    let diff = (mc.estimate - expected).abs();
    let sigma = if mc.std_error > 0.0 {
        mc.std_error
    } else {
        (expected * (1.0 - expected) / mc.trials as f64).max(0.0).sqrt()
    };
    let z_score = if sigma > 0.0 {
        diff / sigma
    } else if diff <= 1e-12 {
        0.0
    } else {
        f64::INFINITY
    };
    Verdict { pass: z_score <= SIGMA_BAND, z_score, sigma }
}
