use num_complex::Complex64;
use serde::Serialize;

use super::matrix::Matrix2;
use super::MAX_QUBITS;
use crate::error::{Error, Result};

/// Tolerance on `sum |amp|^2 = 1` for states that claim to be normalized.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Dense amplitude vector over an ordered qubit register.
///
/// Basis labels are big-endian: qubit 0 is the most significant bit of the
/// amplitude index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

fn check_amplitudes(amplitudes: &[Complex64]) -> Result<usize> {
    let len = amplitudes.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::BadLength(len));
    }
    let num_qubits = len.trailing_zeros() as usize;
    if num_qubits > MAX_QUBITS {
        return Err(Error::Capacity(num_qubits));
    }
    if let Some(i) = amplitudes.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    Ok(num_qubits)
}

impl PureState {
    /// Wraps an amplitude vector that must already be normalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = check_amplitudes(&amplitudes)?;
        let state = PureState { num_qubits, amplitudes };
        let n2 = state.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(n2));
        }
        Ok(state)
    }

    /// Rescales an arbitrary nonzero amplitude vector to unit norm.
    pub fn from_unnormalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = check_amplitudes(&amplitudes)?;
        PureState { num_qubits, amplitudes }.normalized()
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis state `|index>` on `num_qubits` qubits.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::BadLength(1));
        }
        if num_qubits > MAX_QUBITS {
            return Err(Error::Capacity(num_qubits));
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(PureState { num_qubits, amplitudes })
    }

    /// Single qubit `a|0> + b|1>`.
    pub fn qubit(a: Complex64, b: Complex64) -> Result<Self> {
        Self::from_amplitudes(vec![a, b])
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::NotNormalized(n2));
        }
        let scale = 1.0 / n2.sqrt();
        for a in &mut self.amplitudes {
            *a *= scale;
        }
        Ok(self)
    }

    /// Kronecker product `self ⊗ other`; `self` occupies the leading qubits.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        self.tensor_amplitudes(other.num_qubits, &other.amplitudes)
    }

    /// [`PureState::tensor`] with a trusted, already normalized right factor.
    pub(crate) fn tensor_amplitudes(&self, other_qubits: usize, other: &[Complex64]) -> Result<PureState> {
        let num_qubits = self.num_qubits + other_qubits;
        if num_qubits > MAX_QUBITS {
            return Err(Error::Capacity(num_qubits));
        }
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.len());
        for &x in &self.amplitudes {
            amplitudes.extend(other.iter().map(|&y| x * y));
        }
        Ok(PureState { num_qubits, amplitudes })
    }

    /// Applies `op` to one tensor factor. The result is not renormalized, so a
    /// non-unitary `op` (a Kraus operator) yields the unnormalized branch vector.
    pub fn apply_single_qubit(&self, qubit: usize, op: &Matrix2) -> Result<PureState> {
        let mut out = self.clone();
        out.apply_single_qubit_in_place(qubit, op)?;
        Ok(out)
    }

    pub(crate) fn apply_single_qubit_in_place(&mut self, qubit: usize, op: &Matrix2) -> Result<()> {
        self.check_qubit(qubit)?;
        let stride = 1usize << (self.num_qubits - 1 - qubit);
        let amplitudes = &mut self.amplitudes;
        for base in 0..amplitudes.len() {
            if base & stride != 0 {
                continue;
            }
            let [lo, hi] = op.apply([amplitudes[base], amplitudes[base | stride]]);
            amplitudes[base] = lo;
            amplitudes[base | stride] = hi;
        }
        Ok(())
    }

    /// `<self|other>`
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch(self.num_qubits, other.num_qubits));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub(crate) fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange { index: qubit, num_qubits: self.num_qubits });
        }
        Ok(())
    }

    /// Builds a register from raw parts without checks; used by measurement
    /// code that has already validated length and normalization.
    pub(crate) fn from_parts(num_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << num_qubits);
        PureState { num_qubits, amplitudes }
    }
}

/// `|<a|b>|^2`, insensitive to global phase.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    let overlap = a.inner(b)?.norm_sqr();
    Ok(overlap.min(1.0))
}
