//! Partially entangled channel resources `alpha|00> + beta|11>`, their
//! concurrence, and the filtering measurements that undo the diagonal
//! amplitude distortion a teleportation through them leaves behind.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::quantum::{KrausPair, PureState};

const UNIT_TOLERANCE: f64 = 1e-12;

/// Shared two-qubit resource `alpha|00> + beta|11>` in canonical form
/// `0 <= alpha <= beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Channel {
    alpha: f64,
    beta: f64,
}

impl Channel {
    /// Builds a channel from its Schmidt coefficients. Signs are dropped and
    /// the pair is ordered so that `alpha <= beta`.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidChannel(format!("non-finite coefficients ({alpha}, {beta})")));
        }
        let norm = alpha * alpha + beta * beta;
        if (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::InvalidChannel(format!("alpha^2 + beta^2 = {norm}, expected 1")));
        }
        let (a, b) = (alpha.abs(), beta.abs());
        Ok(if a <= b { Channel { alpha: a, beta: b } } else { Channel { alpha: b, beta: a } })
    }

    /// Channel with the given squared smaller coefficient `alpha^2`.
    pub fn from_alpha2(alpha2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha2) {
            return Err(Error::InvalidChannel(format!("alpha^2 = {alpha2} outside [0, 1]")));
        }
        Channel::new(alpha2.sqrt(), (1.0 - alpha2).sqrt())
    }

    pub fn maximal() -> Self {
        Channel { alpha: FRAC_1_SQRT_2, beta: FRAC_1_SQRT_2 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha * self.alpha
    }

    /// A product state (`alpha = 0`) cannot teleport anything.
    pub fn is_degenerate(&self) -> bool {
        self.alpha == 0.0
    }

    pub fn concurrence(&self) -> f64 {
        concurrence(self)
    }

    pub fn state(&self) -> PureState {
        channel_state(self)
    }

    /// `alpha|00> + beta|11>` as raw amplitudes.
    pub(crate) fn amplitudes(&self) -> [Complex64; 4] {
        let zero = Complex64::new(0.0, 0.0);
        [Complex64::new(self.alpha, 0.0), zero, zero, Complex64::new(self.beta, 0.0)]
    }
}

/// `C = 2 |alpha beta|`.
pub fn concurrence(ch: &Channel) -> f64 {
    2.0 * ch.alpha * ch.beta
}

/// Inverse of [`concurrence`], always returning the `alpha <= 1/sqrt 2` root.
pub fn channel_from_concurrence(c: f64) -> Result<Channel> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::InvalidParameter(format!("concurrence {c} outside [0, 1]")));
    }
    // alpha^2 = (1 - sqrt(1 - c^2)) / 2, rearranged to avoid cancellation at small c.
    let s = (1.0 - c * c).sqrt();
    let alpha2 = c * c / (2.0 * (1.0 + s));
    let beta2 = (1.0 + s) / 2.0;
    Channel::new(alpha2.sqrt(), beta2.sqrt())
}

/// The two-qubit state `alpha|00> + beta|11>`.
pub fn channel_state(ch: &Channel) -> PureState {
    PureState::from_real(&ch.amplitudes().map(|a| a.re)).expect("canonical channel is normalized")
}

/// Accumulated diagonal factor `diag(u, v)` multiplying `(a, b)` before
/// renormalization. Only the ratio `u / v` is physically meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Distortion {
    u: f64,
    v: f64,
}

const RESCALE_HIGH: f64 = 1e6;
const RESCALE_LOW: f64 = 1e-6;

impl Distortion {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !(u > 0.0) || !(v > 0.0) || !u.is_finite() || !v.is_finite() {
            return Err(Error::InvalidDistortion { u, v });
        }
        Ok(Distortion { u, v }.rescaled())
    }

    pub fn identity() -> Self {
        Distortion { u: 1.0, v: 1.0 }
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    /// `min(u, v) / max(u, v)`
    pub fn ratio(&self) -> f64 {
        self.u.min(self.v) / self.u.max(self.v)
    }

    /// Distortion left by one hop through `ch`: `diag(alpha, beta)` for an
    /// even-parity Bell outcome, `diag(beta, alpha)` for an odd one.
    pub fn hop(ch: &Channel, swapped: bool) -> Self {
        if swapped {
            Distortion { u: ch.beta, v: ch.alpha }
        } else {
            Distortion { u: ch.alpha, v: ch.beta }
        }
    }

    /// Composes another diagonal factor onto this one.
    pub fn then(&self, other: &Distortion) -> Self {
        Distortion { u: self.u * other.u, v: self.v * other.v }.rescaled()
    }

    /// Both directions scaled equally, so the state is undistorted.
    pub fn is_balanced(&self) -> bool {
        (self.u - self.v).abs() <= 1e-12 * self.u.max(self.v)
    }

    fn rescaled(self) -> Self {
        let m = self.u.max(self.v);
        let lo = self.u.min(self.v);
        if m > RESCALE_HIGH || lo < RESCALE_LOW {
            Distortion { u: self.u / m, v: self.v / m }
        } else {
            self
        }
    }
}

/// Filter that maps the distorted state back to the original one on success.
///
/// With `r = min(u, v) / max(u, v)`, `E_S` multiplies the larger-amplitude
/// basis direction by `r` and leaves the other alone; `E_F = sqrt(1 - r^2)` on
/// the larger direction.
pub fn correction_kraus(d: &Distortion) -> Result<KrausPair> {
    if !(d.u > 0.0) || !(d.v > 0.0) {
        return Err(Error::InvalidDistortion { u: d.u, v: d.v });
    }
    if d.is_balanced() {
        return Ok(KrausPair::identity());
    }
    let r = d.ratio();
    let fail = (1.0 - r * r).sqrt();
    if d.u > d.v {
        KrausPair::diagonal([r, 1.0], [fail, 0.0])
    } else {
        KrausPair::diagonal([1.0, r], [0.0, fail])
    }
}
