//! Hop-by-hop execution of multi-hop teleportation over a chain of parties.
//!
//! Party `k` holds the travelling qubit and shares `channels[k]` with party
//! `k + 1`. Every hop is a full teleportation step: the carrier qubit is joined
//! with the channel pair, a Bell measurement is made on the sender's two
//! qubits, and the two classical bits travel with the hop record.
//!
//! * `Smtp` (separate): each receiver applies the Pauli correction and then
//!   filters its own hop's distortion with a Kraus measurement. A failed filter
//!   ends the chain.
//! * `Gmtp` (global): intermediaries only apply the Pauli correction. The
//!   diagonal distortion accumulates and is filtered once by the final
//!   receiver, and is skipped entirely when the accumulated distortion is
//!   balanced.

use serde::{Deserialize, Serialize};

use crate::channels::{correction_kraus, Channel, Distortion};
use crate::error::{Error, Result};
use crate::quantum::{
    bell_measure, generalized_measure_into, BellOutcome, KrausOutcome, KrausPair, PauliCorrection,
    PureState, RandomSource,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Smtp,
    Gmtp,
}

impl std::fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProtocolKind::Smtp => "smtp",
            ProtocolKind::Gmtp => "gmtp",
        })
    }
}

/// One simulation unit: protocol, hop channels and the qubit to send.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub kind: ProtocolKind,
    pub channels: Vec<Channel>,
    pub input: PureState,
    /// GMTP only: intermediaries keep Pauli corrections as classical
    /// bookkeeping and the final receiver applies the composed correction.
    pub pauli_frame: bool,
}

impl ChainConfig {
    pub fn new(kind: ProtocolKind, channels: Vec<Channel>, input: PureState) -> Result<Self> {
        let config = ChainConfig { kind, channels, input, pauli_frame: false };
        config.validate()?;
        Ok(config)
    }

    pub fn homogeneous(kind: ProtocolKind, hops: usize, channel: Channel, input: PureState) -> Result<Self> {
        Self::new(kind, vec![channel; hops], input)
    }

    pub fn with_pauli_frame(mut self, enabled: bool) -> Self {
        self.pauli_frame = enabled;
        self
    }

    pub fn hops(&self) -> usize {
        self.channels.len()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.channels.windows(2).all(|w| w[0] == w[1])
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels.is_empty() {
            return Err(Error::InvalidConfig("a chain needs at least one hop".into()));
        }
        if let Some(k) = self.channels.iter().position(Channel::is_degenerate) {
            return Err(Error::InvalidConfig(format!("channel {k} is a product state (alpha = 0)")));
        }
        if self.input.num_qubits() != 1 {
            return Err(Error::InvalidConfig(format!(
                "input must be a single qubit, got {} qubits",
                self.input.num_qubits()
            )));
        }
        if !self.input.is_normalized() {
            return Err(Error::NotNormalized(self.input.norm_sqr()));
        }
        Ok(())
    }
}

/// Classical record of one hop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopRecord {
    pub hop_index: usize,
    pub bell_outcome: BellOutcome,
    pub pauli_applied: PauliCorrection,
    pub smtp_kraus_success: Option<bool>,
    /// Probability of the realized Bell outcome, times the filter outcome
    /// probability for SMTP.
    pub branch_probability: f64,
}

/// Full record of one protocol run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transcript {
    pub kind: ProtocolKind,
    pub hops: Vec<HopRecord>,
    /// GMTP: number of hops whose realized branch swapped the distortion.
    pub error_index: Option<usize>,
    /// GMTP: result of the receiver's filter, `None` when no filter was needed.
    pub final_kraus_success: Option<bool>,
    pub final_kraus_probability: Option<f64>,
    /// GMTP with a Pauli frame: correction applied by the final receiver.
    pub frame_correction: Option<PauliCorrection>,
    pub success: bool,
    pub final_state: PureState,
    pub total_probability: f64,
}

impl Transcript {
    /// Product of the recorded branch probabilities, in hop order.
    pub fn recorded_probability(&self) -> f64 {
        let hops: f64 = self.hops.iter().map(|h| h.branch_probability).product();
        hops * self.final_kraus_probability.unwrap_or(1.0)
    }
}

/// Source of measurement outcomes for the protocol engine.
///
/// [`RandomSource`] samples outcomes; a scripted resolver can steer the
/// engine down a chosen branch for exhaustive enumeration.
pub trait Resolver {
    fn bell(&mut self, state: &PureState, q1: usize, q2: usize) -> Result<(BellOutcome, PureState, f64)>;
    fn kraus(&mut self, state: PureState, qubit: usize, kraus: &KrausPair) -> Result<KrausOutcome>;
}

impl Resolver for RandomSource {
    fn bell(&mut self, state: &PureState, q1: usize, q2: usize) -> Result<(BellOutcome, PureState, f64)> {
        bell_measure(state, q1, q2, self)
    }

    fn kraus(&mut self, state: PureState, qubit: usize, kraus: &KrausPair) -> Result<KrausOutcome> {
        generalized_measure_into(state, qubit, kraus, self)
    }
}

/// Teleports `carrier` through `channel`: returns the Bell outcome, the
/// receiver's uncorrected qubit and the outcome probability.
fn teleport_hop<R: Resolver>(
    carrier: &PureState,
    channel: &Channel,
    resolver: &mut R,
) -> Result<(BellOutcome, PureState, f64)> {
    let joint = carrier.tensor_amplitudes(2, &channel.amplitudes())?;
    resolver.bell(&joint, 0, 1)
}

fn apply_correction(mut state: PureState, correction: PauliCorrection) -> Result<PureState> {
    if correction != PauliCorrection::Identity {
        state.apply_single_qubit_in_place(0, &correction.matrix())?;
    }
    Ok(state)
}

/// Runs either protocol according to `config.kind`.
pub fn run<R: Resolver>(config: &ChainConfig, resolver: &mut R) -> Result<Transcript> {
    config.validate()?;
    run_validated(config, resolver)
}

/// [`run`] for a configuration that already passed [`ChainConfig::validate`].
pub(crate) fn run_validated<R: Resolver>(config: &ChainConfig, resolver: &mut R) -> Result<Transcript> {
    match config.kind {
        ProtocolKind::Smtp => smtp(config, resolver),
        ProtocolKind::Gmtp => gmtp(config, resolver),
    }
}

pub fn run_smtp(config: &ChainConfig, rng: &mut RandomSource) -> Result<Transcript> {
    if config.kind != ProtocolKind::Smtp {
        return Err(Error::InvalidConfig("run_smtp called on a GMTP configuration".into()));
    }
    run(config, rng)
}

pub fn run_gmtp(config: &ChainConfig, rng: &mut RandomSource) -> Result<Transcript> {
    if config.kind != ProtocolKind::Gmtp {
        return Err(Error::InvalidConfig("run_gmtp called on an SMTP configuration".into()));
    }
    run(config, rng)
}

fn smtp<R: Resolver>(config: &ChainConfig, resolver: &mut R) -> Result<Transcript> {
    let mut carrier = config.input.clone();
    let mut hops = Vec::with_capacity(config.hops());
    let mut total = 1.0;

    for (hop_index, channel) in config.channels.iter().enumerate() {
        let (outcome, received, p_bell) = teleport_hop(&carrier, channel, resolver)?;
        let correction = outcome.correction();
        let corrected = apply_correction(received, correction)?;
        let kraus = correction_kraus(&Distortion::hop(channel, outcome.is_odd_parity()))?;
        let filtered = resolver.kraus(corrected, 0, &kraus)?;
        let branch_probability = p_bell * filtered.probability;
        total *= branch_probability;
        hops.push(HopRecord {
            hop_index,
            bell_outcome: outcome,
            pauli_applied: correction,
            smtp_kraus_success: Some(filtered.success),
            branch_probability,
        });
        carrier = filtered.post_state;
        if !filtered.success {
            return Ok(Transcript {
                kind: ProtocolKind::Smtp,
                hops,
                error_index: None,
                final_kraus_success: None,
                final_kraus_probability: None,
                frame_correction: None,
                success: false,
                final_state: carrier,
                total_probability: total,
            });
        }
    }

    Ok(Transcript {
        kind: ProtocolKind::Smtp,
        hops,
        error_index: None,
        final_kraus_success: None,
        final_kraus_probability: None,
        frame_correction: None,
        success: true,
        final_state: carrier,
        total_probability: total,
    })
}

fn gmtp<R: Resolver>(config: &ChainConfig, resolver: &mut R) -> Result<Transcript> {
    let mut carrier = config.input.clone();
    let mut hops = Vec::with_capacity(config.hops());
    let mut distortion = Distortion::identity();
    let mut error_index = 0;
    let mut frame = PauliCorrection::Identity;
    let mut total = 1.0;

    for (hop_index, channel) in config.channels.iter().enumerate() {
        let (outcome, received, p_bell) = teleport_hop(&carrier, channel, resolver)?;
        let correction = outcome.correction();
        // With a pending X in the frame the carrier arrives with its basis
        // flipped, so this hop's distortion lands in the opposite orientation.
        let (swapped, applied) = if config.pauli_frame {
            let swapped = outcome.is_odd_parity() ^ frame.has_x();
            frame = correction.compose(frame);
            carrier = received;
            (swapped, PauliCorrection::Identity)
        } else {
            carrier = apply_correction(received, correction)?;
            (outcome.is_odd_parity(), correction)
        };
        if swapped {
            error_index += 1;
        }
        distortion = distortion.then(&Distortion::hop(channel, swapped));
        total *= p_bell;
        hops.push(HopRecord {
            hop_index,
            bell_outcome: outcome,
            pauli_applied: applied,
            smtp_kraus_success: None,
            branch_probability: p_bell,
        });
    }

    let frame_correction = if config.pauli_frame {
        carrier = apply_correction(carrier, frame)?;
        Some(frame)
    } else {
        None
    };

    let (success, final_kraus_success, final_kraus_probability) = if distortion.is_balanced() {
        (true, None, None)
    } else {
        let filtered = resolver.kraus(carrier, 0, &correction_kraus(&distortion)?)?;
        carrier = filtered.post_state;
        total *= filtered.probability;
        (filtered.success, Some(filtered.success), Some(filtered.probability))
    };

    Ok(Transcript {
        kind: ProtocolKind::Gmtp,
        hops,
        error_index: Some(error_index),
        final_kraus_success,
        final_kraus_probability,
        frame_correction,
        success,
        final_state: carrier,
        total_probability: total,
    })
}

/// Product of per-hop distortions for a realized outcome sequence, as seen
/// by a receiver that applied every Pauli correction.
pub fn accumulated_distortion(channels: &[Channel], outcomes: &[BellOutcome]) -> Result<Distortion> {
    if channels.len() != outcomes.len() {
        return Err(Error::InvalidParameter(format!(
            "{} channels but {} outcomes",
            channels.len(),
            outcomes.len()
        )));
    }
    Ok(channels
        .iter()
        .zip(outcomes)
        .fold(Distortion::identity(), |d, (ch, o)| d.then(&Distortion::hop(ch, o.is_odd_parity()))))
}
