//! Closed-form success probabilities for the separate (SMTP) and global
//! (GMTP) protocols over `2N` hops, and for the two-hop heterogeneous chain.
//!
//! All functions take the smaller Schmidt coefficient `alpha` of a channel in
//! canonical form, so `0 < alpha <= 1/sqrt 2` and `beta = sqrt(1 - alpha^2)`.

use num_complex::Complex64;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::channels::channel_from_concurrence;
use crate::error::{Error, Result};

const ALPHA_SLACK: f64 = 1e-12;
/// `C(n, k)` is computed exactly in integers up to this `n`.
const EXACT_BINOMIAL_MAX_N: u64 = 120;

fn check_alpha(alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha > FRAC_1_SQRT_2 + ALPHA_SLACK {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} outside (0, 1/sqrt 2]")));
    }
    let alpha = alpha.min(FRAC_1_SQRT_2);
    Ok(alpha)
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    Ok(())
}

/// `ln C(n, k)`
fn ln_binomial(n: u64, k: u64) -> f64 {
    if n <= EXACT_BINOMIAL_MAX_N {
        (binomial_exact(n, k) as f64).ln()
    } else {
        ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
    }
}

fn binomial_exact(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    (1..=k as u128).fold(1u128, |acc, i| acc * (n as u128 - k as u128 + i) / i)
}

/// Binomial coefficient `C(n, k)` as a real.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= EXACT_BINOMIAL_MAX_N {
        binomial_exact(n, k) as f64
    } else {
        ln_binomial(n, k).exp()
    }
}

/// `C(n, k) * x^(n-k) * y^k` evaluated in the log domain when the binomial
/// is too large for exact integers.
fn binomial_term(n: u64, k: u64, x: f64, y: f64) -> f64 {
    if n <= EXACT_BINOMIAL_MAX_N {
        binomial_exact(n, k) as f64 * x.powi((n - k) as i32) * y.powi(k as i32)
    } else {
        (ln_binomial(n, k) + (n - k) as f64 * x.ln() + k as f64 * y.ln()).exp()
    }
}

/// Single-hop success probability `2 alpha^2`.
pub fn p_single(alpha: f64) -> Result<f64> {
    let alpha = check_alpha(alpha)?;
    Ok(2.0 * alpha * alpha)
}

/// SMTP over `2N` hops: `(2 alpha^2)^(2N)`.
pub fn p_smtp(n: u32, alpha: f64) -> Result<f64> {
    check_n(n)?;
    let p = p_single(alpha)?;
    Ok(p.powi(2 * n as i32))
}

/// Weight of the GMTP branches with error index `i` over `2N` hops for input
/// `(a, b)`: `C(2N, i) (alpha^{2(2N-i)} beta^{2i} |a|^2 + alpha^{2i} beta^{2(2N-i)} |b|^2)`.
pub fn gmtp_branch_weight(n: u32, i: u32, alpha: f64, a: Complex64, b: Complex64) -> Result<f64> {
    check_n(n)?;
    let alpha = check_alpha(alpha)?;
    let m = 2 * n as u64;
    if i as u64 > m {
        return Err(Error::InvalidParameter(format!("error index {i} exceeds 2N = {m}")));
    }
    let norm = a.norm_sqr() + b.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let (a2, b2) = (alpha * alpha, 1.0 - alpha * alpha);
    let i = i as u64;
    let zero_side = binomial_term(m, i, a2, b2);
    let one_side = binomial_term(m, i, b2, a2);
    Ok(zero_side * a.norm_sqr() + one_side * b.norm_sqr())
}

/// Success probability contributed by the GMTP branches with error index `i`
/// over `2N` hops, after the receiver's filter: `C(2N, i) min(u, v)^2` with
/// `(u, v) = (alpha^{2N-i} beta^i, alpha^i beta^{2N-i})`. Input independent.
pub fn gmtp_index_success(n: u32, i: u32, alpha: f64) -> Result<f64> {
    check_n(n)?;
    let alpha = check_alpha(alpha)?;
    let m = 2 * n as u64;
    if i as u64 > m {
        return Err(Error::InvalidParameter(format!("error index {i} exceeds 2N = {m}")));
    }
    let (a2, b2) = (alpha * alpha, 1.0 - alpha * alpha);
    let i = i as u64;
    // The smaller of u and v carries alpha to the larger power.
    Ok(binomial_term(m, i.min(m - i), a2, b2))
}

/// GMTP over `2N` hops:
/// `C(2N, N) alpha^{2N} beta^{2N} + 2 sum_{i<N} C(2N, i) alpha^{2(2N-i)} beta^{2i}`.
pub fn p_gmtp(n: u32, alpha: f64) -> Result<f64> {
    check_n(n)?;
    let alpha = check_alpha(alpha)?;
    let m = 2 * n as u64;
    let (a2, b2) = (alpha * alpha, 1.0 - alpha * alpha);
    let balanced = binomial_term(m, n as u64, a2, b2);
    let unbalanced: f64 = (0..n as u64).map(|i| binomial_term(m, i, a2, b2)).sum();
    Ok((balanced + 2.0 * unbalanced).min(1.0))
}

/// `p_gmtp / p_smtp`; equals `1 / (2 alpha^2)` at `N = 1`.
pub fn ratio_gmtp_smtp(n: u32, alpha: f64) -> Result<f64> {
    let g = p_gmtp(n, alpha)?;
    let s = p_smtp(n, alpha)?;
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!("p_smtp underflows at N = {n}, alpha = {alpha}")));
    }
    Ok(g / s)
}

/// Two hops over different channels: `min(2 alpha1^2, 2 alpha2^2)`.
pub fn p_hetero(alpha1: f64, alpha2: f64) -> Result<f64> {
    Ok(p_single(alpha1)?.min(p_single(alpha2)?))
}

/// One row of the figure data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub concurrence: f64,
    #[serde(rename = "N")]
    pub n: u32,
    pub p_smtp: f64,
    pub p_gmtp: f64,
    pub ratio: f64,
}

/// Evaluates both protocols for each concurrence in `grid`.
pub fn sweep(n: u32, grid: &[f64]) -> Result<Vec<SweepPoint>> {
    grid.iter()
        .map(|&c| {
            if !(c > 0.0 && c <= 1.0) {
                return Err(Error::InvalidParameter(format!("sweep concurrence {c} outside (0, 1]")));
            }
            let alpha = channel_from_concurrence(c)?.alpha();
            Ok(SweepPoint {
                concurrence: c,
                n,
                p_smtp: p_smtp(n, alpha)?,
                p_gmtp: p_gmtp(n, alpha)?,
                ratio: ratio_gmtp_smtp(n, alpha)?,
            })
        })
        .collect()
}
