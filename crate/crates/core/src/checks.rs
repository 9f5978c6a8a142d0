//! The verification matrix behind `multihop-teleport verify`: exhaustive
//! walk against closed forms, and Monte Carlo against the walk.

use num_complex::Complex64;
use serde::Serialize;

use crate::analytics::{p_gmtp, p_hetero, p_single, p_smtp};
use crate::channels::Channel;
use crate::error::Result;
use crate::protocols::{ChainConfig, ProtocolKind};
use crate::quantum::PureState;
use crate::verification::{compare, enumerate, monte_carlo};

/// Absolute tolerance for walk-versus-closed-form checks.
pub const EXACT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub detail: String,
    pub expected: f64,
    pub observed: f64,
    /// Absolute tolerance for exact checks, sigma band for Monte Carlo.
    pub tolerance: f64,
    pub pass: bool,
}

/// The default `alpha^2` grid used by the closed-form checks.
pub const ALPHA2_GRID: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];

fn default_input() -> PureState {
    PureState::qubit(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).expect("normalized")
}

fn exact_check(check: &str, detail: String, expected: f64, observed: f64) -> CheckResult {
    CheckResult {
        check: check.to_string(),
        detail,
        expected,
        observed,
        tolerance: EXACT_TOLERANCE,
        pass: (expected - observed).abs() <= EXACT_TOLERANCE,
    }
}

/// Runs the full matrix. Monte Carlo checks use `trials` trials each, seeded
/// from `seed`.
pub fn run_default_checks(trials: u64, seed: u64) -> Result<Vec<CheckResult>> {
    let input = default_input();
    let mut out = Vec::new();

    for &alpha2 in &ALPHA2_GRID {
        let ch = Channel::from_alpha2(alpha2)?;
        let walk = enumerate(&ChainConfig::homogeneous(ProtocolKind::Smtp, 1, ch, input.clone())?)?;
        out.push(exact_check(
            "single_hop",
            format!("alpha2={alpha2}"),
            p_single(ch.alpha())?,
            walk.success_probability,
        ));
    }

    for n in 1..=4u32 {
        for &alpha2 in &ALPHA2_GRID {
            let ch = Channel::from_alpha2(alpha2)?;
            let hops = 2 * n as usize;
            let smtp = enumerate(&ChainConfig::homogeneous(ProtocolKind::Smtp, hops, ch, input.clone())?)?;
            out.push(exact_check(
                "smtp_closed_form",
                format!("N={n} alpha2={alpha2}"),
                p_smtp(n, ch.alpha())?,
                smtp.success_probability,
            ));
            let gmtp = enumerate(&ChainConfig::homogeneous(ProtocolKind::Gmtp, hops, ch, input.clone())?)?;
            out.push(exact_check(
                "gmtp_closed_form",
                format!("N={n} alpha2={alpha2}"),
                p_gmtp(n, ch.alpha())?,
                gmtp.success_probability,
            ));
        }
    }

    for &a1 in &ALPHA2_GRID {
        for &a2 in &ALPHA2_GRID {
            let (c1, c2) = (Channel::from_alpha2(a1)?, Channel::from_alpha2(a2)?);
            let walk = enumerate(&ChainConfig::new(ProtocolKind::Gmtp, vec![c1, c2], input.clone())?)?;
            out.push(exact_check(
                "hetero_closed_form",
                format!("alpha1_2={a1} alpha2_2={a2}"),
                p_hetero(c1.alpha(), c2.alpha())?,
                walk.success_probability,
            ));
        }
    }

    let mc_cases = [
        (ProtocolKind::Smtp, vec![0.3; 1]),
        (ProtocolKind::Smtp, vec![0.3; 2]),
        (ProtocolKind::Gmtp, vec![0.3; 2]),
        (ProtocolKind::Gmtp, vec![0.2, 0.4]),
        (ProtocolKind::Gmtp, vec![0.25; 4]),
        (ProtocolKind::Smtp, vec![0.4; 4]),
    ];
    for (case, (kind, alphas2)) in mc_cases.into_iter().enumerate() {
        let channels = alphas2.iter().map(|&a| Channel::from_alpha2(a)).collect::<Result<Vec<_>>>()?;
        let config = ChainConfig::new(kind, channels, input.clone())?;
        let exact = enumerate(&config)?;
        let mc = monte_carlo(&config, trials, seed.wrapping_add(case as u64))?;
        let verdict = compare(&exact, &mc);
        out.push(CheckResult {
            check: "monte_carlo_vs_walk".into(),
            detail: format!("{kind} alphas2={alphas2:?} z={:.3}", verdict.z_score),
            expected: exact.success_probability,
            observed: mc.estimate,
            tolerance: crate::verification::SIGMA_BAND,
            pass: verdict.pass,
        });
    }

    Ok(out)
}
