use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use super::kraus::{KrausBranch, KrausPair, KRAUS_TOLERANCE};
use super::matrix::Matrix2;
use super::rng::RandomSource;
use super::state::{PureState, NORM_TOLERANCE};
use crate::error::{Error, Result};

/// Branches with probability below this are impossible and carry no state.
pub const ZERO_PROBABILITY: f64 = 1e-14;

/// Result of a Bell-basis measurement.
///
/// The two-bit wire encoding is `(parity, phase)`: `PhiPlus = 0b00`,
/// `PhiMinus = 0b01`, `PsiPlus = 0b10`, `PsiMinus = 0b11`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] =
        [BellOutcome::PhiPlus, BellOutcome::PhiMinus, BellOutcome::PsiPlus, BellOutcome::PsiMinus];

    pub fn bits(self) -> u8 {
        match self {
            BellOutcome::PhiPlus => 0b00,
            BellOutcome::PhiMinus => 0b01,
            BellOutcome::PsiPlus => 0b10,
            BellOutcome::PsiMinus => 0b11,
        }
    }

    pub fn from_bits(bits: u8) -> Option<Self> {
        match bits {
            0b00 => Some(BellOutcome::PhiPlus),
            0b01 => Some(BellOutcome::PhiMinus),
            0b10 => Some(BellOutcome::PsiPlus),
            0b11 => Some(BellOutcome::PsiMinus),
            _ => None,
        }
    }

    /// Odd-parity outcomes (`Psi±`) exchange the roles of the channel's
    /// Schmidt coefficients on the teleported qubit.
    pub fn is_odd_parity(self) -> bool {
        self.bits() & 0b10 != 0
    }

    pub fn correction(self) -> PauliCorrection {
        match self {
            BellOutcome::PhiPlus => PauliCorrection::Identity,
            BellOutcome::PhiMinus => PauliCorrection::Z,
            BellOutcome::PsiPlus => PauliCorrection::X,
            BellOutcome::PsiMinus => PauliCorrection::IY,
        }
    }
}

impl Serialize for BellOutcome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.bits())
    }
}

impl<'de> Deserialize<'de> for BellOutcome {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let bits = u8::deserialize(d)?;
        BellOutcome::from_bits(bits)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid Bell outcome {bits}")))
    }
}

/// Pauli correction `Z^z X^x`, so `IY = Z X = [[0, 1], [-1, 0]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliCorrection {
    Identity,
    Z,
    X,
    IY,
}

impl PauliCorrection {
    pub fn matrix(self) -> Matrix2 {
        match self {
            PauliCorrection::Identity => Matrix2::identity(),
            PauliCorrection::Z => Matrix2::pauli_z(),
            PauliCorrection::X => Matrix2::pauli_x(),
            PauliCorrection::IY => Matrix2::i_pauli_y(),
        }
    }

    pub fn has_x(self) -> bool {
        matches!(self, PauliCorrection::X | PauliCorrection::IY)
    }

    pub fn has_z(self) -> bool {
        matches!(self, PauliCorrection::Z | PauliCorrection::IY)
    }

    pub fn from_xz(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliCorrection::Identity,
            (false, true) => PauliCorrection::Z,
            (true, false) => PauliCorrection::X,
            (true, true) => PauliCorrection::IY,
        }
    }

    /// Product of two corrections, up to global phase.
    pub fn compose(self, other: PauliCorrection) -> Self {
        Self::from_xz(self.has_x() ^ other.has_x(), self.has_z() ^ other.has_z())
    }
}

/// One of the four Bell-measurement branches.
#[derive(Debug, Clone, PartialEq)]
pub struct BellBranch {
    pub outcome: BellOutcome,
    pub probability: f64,
    /// Normalized state of the unmeasured qubits; `None` when the branch is
    /// impossible or no qubits remain.
    pub collapsed: Option<PureState>,
}

impl BellBranch {
    pub fn is_possible(&self) -> bool {
        self.probability >= ZERO_PROBABILITY
    }
}

fn check_normalized(state: &PureState) -> Result<()> {
    let n2 = state.norm_sqr();
    if (n2 - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(n2));
    }
    Ok(())
}

/// Index arithmetic for projecting two qubits out of a register.
struct PairLayout {
    bit1: usize,
    bit2: usize,
    lo: usize,
    hi: usize,
    rest: usize,
}

impl PairLayout {
    fn new(state: &PureState, q1: usize, q2: usize) -> Result<Self> {
        state.check_qubit(q1)?;
        state.check_qubit(q2)?;
        if q1 == q2 {
            return Err(Error::QubitClash(q1));
        }
        check_normalized(state)?;
        let n = state.num_qubits();
        let bit1 = n - 1 - q1;
        let bit2 = n - 1 - q2;
        Ok(PairLayout { bit1, bit2, lo: bit1.min(bit2), hi: bit1.max(bit2), rest: n - 2 })
    }

    /// Full register index for remaining index `r` and measured bits `x, y`.
    fn full_index(&self, r: usize, x: usize, y: usize) -> usize {
        let low = r & ((1usize << self.lo) - 1);
        let mid = (r >> self.lo) & ((1usize << (self.hi - 1 - self.lo)) - 1);
        let top = r >> (self.hi - 1);
        low | (mid << (self.lo + 1)) | (top << (self.hi + 1)) | (x << self.bit1) | (y << self.bit2)
    }

    /// Amplitudes of `|xy>` on the measured pair at remaining index `r`.
    fn gather(&self, state: &PureState, r: usize) -> [Complex64; 4] {
        [(0, 0), (0, 1), (1, 0), (1, 1)].map(|(x, y)| state.amplitude(self.full_index(r, x, y)))
    }

    /// Unnormalized `<Bell|_{q1 q2} |state>` at remaining index `r`, for every
    /// outcome in [`BellOutcome::ALL`] order.
    fn projected(&self, state: &PureState, r: usize) -> [Complex64; 4] {
        let [a00, a01, a10, a11] = self.gather(state, r);
        let h = FRAC_1_SQRT_2;
        [a00 * h + a11 * h, a00 * h - a11 * h, a01 * h + a10 * h, a01 * h - a10 * h]
    }

    fn weights(&self, state: &PureState) -> [f64; 4] {
        let mut w = [0.0; 4];
        for r in 0..1usize << self.rest {
            for (acc, amp) in w.iter_mut().zip(self.projected(state, r)) {
                *acc += amp.norm_sqr();
            }
        }
        w
    }

    /// Normalized collapsed register, or `None` if nothing remains.
    fn collapse(&self, state: &PureState, outcome: BellOutcome, weight: f64) -> Option<PureState> {
        if weight < ZERO_PROBABILITY || self.rest == 0 {
            return None;
        }
        let scale = 1.0 / weight.sqrt();
        let k = outcome.bits() as usize;
        let amps = (0..1usize << self.rest).map(|r| self.projected(state, r)[k] * scale).collect();
        Some(PureState::from_parts(self.rest, amps))
    }
}

/// Enumerates all four Bell outcomes on `(q1, q2)`. `q1` is the first qubit of
/// the Bell pair. Measured qubits are removed from the collapsed register,
/// which keeps the remaining qubits in their original order.
pub fn bell_branches(state: &PureState, q1: usize, q2: usize) -> Result<[BellBranch; 4]> {
    let layout = PairLayout::new(state, q1, q2)?;
    let weights = layout.weights(state);
    Ok(BellOutcome::ALL.map(|outcome| {
        let probability = weights[outcome.bits() as usize];
        BellBranch { outcome, probability, collapsed: layout.collapse(state, outcome, probability) }
    }))
}

/// Samples one Bell outcome with probability given by [`bell_branches`].
pub fn bell_measure(
    state: &PureState,
    q1: usize,
    q2: usize,
    rng: &mut RandomSource,
) -> Result<(BellOutcome, PureState, f64)> {
    let layout = PairLayout::new(state, q1, q2)?;
    if layout.rest == 0 {
        return Err(Error::InvalidParameter(
            "sampling a Bell measurement needs at least one unmeasured qubit".into(),
        ));
    }
    let weights = layout.weights(state);
    let pick = sample(&weights, rng);
    let outcome = BellOutcome::ALL[pick];
    let collapsed = layout.collapse(state, outcome, weights[pick]).expect("possible branch carries a state");
    Ok((outcome, collapsed, weights[pick]))
}

fn check_kraus(state: &PureState, qubit: usize, kraus: &KrausPair) -> Result<()> {
    state.check_qubit(qubit)?;
    let dev = kraus.completeness_deviation();
    if !(dev <= KRAUS_TOLERANCE) {
        return Err(Error::IncompleteKraus(dev));
    }
    check_normalized(state)
}

/// `|| op_qubit |state> ||^2` without materializing the branch vector.
fn operator_weight(state: &PureState, qubit: usize, op: &Matrix2) -> f64 {
    let stride = 1usize << (state.num_qubits() - 1 - qubit);
    let amps = state.amplitudes();
    (0..amps.len())
        .filter(|base| base & stride == 0)
        .map(|base| {
            let [lo, hi] = op.apply([amps[base], amps[base | stride]]);
            lo.norm_sqr() + hi.norm_sqr()
        })
        .sum()
}

fn kraus_post_state(state: &PureState, qubit: usize, op: &Matrix2, weight: f64) -> Result<Option<PureState>> {
    if weight < ZERO_PROBABILITY {
        return Ok(None);
    }
    let mut post = state.clone();
    post.apply_single_qubit_in_place(qubit, op)?;
    Ok(Some(post.normalized()?))
}

/// Both outcomes of `kraus` applied to `qubit`.
pub fn kraus_branches(state: &PureState, qubit: usize, kraus: &KrausPair) -> Result<[KrausBranch; 2]> {
    check_kraus(state, qubit, kraus)?;
    let branch = |success: bool, op: &Matrix2| -> Result<KrausBranch> {
        let probability = operator_weight(state, qubit, op);
        let post_state = kraus_post_state(state, qubit, op, probability)?;
        Ok(KrausBranch { success, probability, post_state })
    };
    Ok([branch(true, kraus.e_success())?, branch(false, kraus.e_fail())?])
}

/// Realized outcome of a Kraus measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausOutcome {
    pub success: bool,
    pub post_state: PureState,
    pub probability: f64,
}

/// Samples one outcome of `kraus` on `qubit`.
pub fn generalized_measure(
    state: &PureState,
    qubit: usize,
    kraus: &KrausPair,
    rng: &mut RandomSource,
) -> Result<KrausOutcome> {
    generalized_measure_into(state.clone(), qubit, kraus, rng)
}

/// [`generalized_measure`] reusing the register's storage for the result.
pub(crate) fn generalized_measure_into(
    mut state: PureState,
    qubit: usize,
    kraus: &KrausPair,
    rng: &mut RandomSource,
) -> Result<KrausOutcome> {
    check_kraus(&state, qubit, kraus)?;
    let ops = [kraus.e_success(), kraus.e_fail()];
    let weights = ops.map(|op| operator_weight(&state, qubit, op));
    let pick = sample(&weights, rng);
    state.apply_single_qubit_in_place(qubit, ops[pick])?;
    Ok(KrausOutcome { success: pick == 0, post_state: state.normalized()?, probability: weights[pick] })
}

fn sample(weights: &[f64], rng: &mut RandomSource) -> usize {
    let possible = |w: f64| if w >= ZERO_PROBABILITY { w } else { 0.0 };
    let total: f64 = weights.iter().map(|&w| possible(w)).sum();
    let target = rng.next_f64() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        let w = possible(w);
        if w == 0.0 {
            continue;
        }
        acc += w;
        last = i;
        if target < acc {
            return i;
        }
    }
    last
}
