use super::matrix::Matrix2;
use super::state::PureState;
use crate::error::{Error, Result};

/// Tolerance on `E_S^† E_S + E_F^† E_F = I`.
pub const KRAUS_TOLERANCE: f64 = 1e-12;

/// Two-outcome generalized measurement `{E_S, E_F}` on one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausPair {
    e_success: Matrix2,
    e_fail: Matrix2,
    deviation: f64,
}

impl KrausPair {
    pub fn new(e_success: Matrix2, e_fail: Matrix2) -> Result<Self> {
        let sum = e_success.dagger() * e_success + e_fail.dagger() * e_fail;
        let deviation = sum.max_abs_diff(&Matrix2::identity());
        if !(deviation <= KRAUS_TOLERANCE) {
            return Err(Error::IncompleteKraus(deviation));
        }
        Ok(KrausPair { e_success, e_fail, deviation })
    }

    /// Diagonal pair `{diag(s0, s1), diag(f0, f1)}` with real entries.
    pub fn diagonal(s: [f64; 2], f: [f64; 2]) -> Result<Self> {
        let deviation = (s[0] * s[0] + f[0] * f[0] - 1.0).abs().max((s[1] * s[1] + f[1] * f[1] - 1.0).abs());
        if !(deviation <= KRAUS_TOLERANCE) {
            return Err(Error::IncompleteKraus(deviation));
        }
        Ok(KrausPair { e_success: Matrix2::diag(s[0], s[1]), e_fail: Matrix2::diag(f[0], f[1]), deviation })
    }

    /// `{I, 0}`: always succeeds and leaves the state alone.
    pub fn identity() -> Self {
        KrausPair { e_success: Matrix2::identity(), e_fail: Matrix2::zero(), deviation: 0.0 }
    }

    pub fn e_success(&self) -> &Matrix2 {
        &self.e_success
    }

    pub fn e_fail(&self) -> &Matrix2 {
        &self.e_fail
    }

    /// Max entrywise deviation of `E_S^† E_S + E_F^† E_F` from the identity.
    pub fn completeness_deviation(&self) -> f64 {
        self.deviation
    }

    pub fn is_identity(&self) -> bool {
        self.e_success.max_abs_diff(&Matrix2::identity()) <= KRAUS_TOLERANCE
    }
}

/// One outcome of a Kraus measurement, with the unnormalized weight already
/// folded into `probability`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausBranch {
    pub success: bool,
    pub probability: f64,
    /// Renormalized post-measurement state; `None` for impossible outcomes.
    pub post_state: Option<PureState>,
}
