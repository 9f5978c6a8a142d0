//! Command-line front end. Every command renders a table as CSV (fixed
//! header, reals with 17 significant digits) or as JSON lines.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{Map, Value};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use crate::analytics::{p_gmtp, p_hetero, p_single, p_smtp, ratio_gmtp_smtp, sweep};
use crate::channels::{channel_from_concurrence, Channel};
use crate::checks::run_default_checks;
use crate::error::{Error, Result};
use crate::protocols::{ChainConfig, ProtocolKind};
use crate::quantum::PureState;
use crate::verification::{compare_value, enumerate, for_each_trial, monte_carlo, McResult};

#[derive(Debug, Parser)]
#[command(name = "multihop-teleport", version, about = "Multi-hop teleportation over partially entangled channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo run of one protocol, with the matching closed form.
    Simulate(SimulateArgs),
    /// Closed-form success probabilities for one channel.
    Analytic(AnalyticArgs),
    /// Oracle-versus-closed-form and Monte-Carlo-versus-oracle matrix.
    Verify(VerifyArgs),
    /// Figure data: success probabilities and their ratio against concurrence.
    Sweep(SweepArgs),
    /// Two-hop chain over two different channels.
    Hetero(HeteroArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Protocol {
    Smtp,
    Gmtp,
}

impl From<Protocol> for ProtocolKind {
    fn from(p: Protocol) -> Self {
        match p {
            Protocol::Smtp => ProtocolKind::Smtp,
            Protocol::Gmtp => ProtocolKind::Gmtp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Curve {
    /// Grid 0.50:0.005:1.00
    Probability,
    /// Grid 0.90:0.001:1.00
    Ratio,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Squared smaller Schmidt coefficient of every channel.
    #[arg(long, conflicts_with_all = ["concurrence", "alphas2"])]
    pub alpha2: Option<f64>,
    /// Concurrence of every channel.
    #[arg(long, conflicts_with = "alphas2")]
    pub concurrence: Option<f64>,
    /// Per-hop alpha^2 values (heterogeneous chain); sets the hop count.
    #[arg(long, value_delimiter = ',')]
    pub alphas2: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub protocol: Protocol,
    /// Chain of 2N hops (2N + 1 parties).
    #[arg(long, conflicts_with = "hops")]
    pub n: Option<u32>,
    #[arg(long)]
    pub hops: Option<usize>,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defer GMTP Pauli corrections to the final receiver.
    #[arg(long)]
    pub pauli_frame: bool,
    /// Write every trial's transcript as JSON lines to this file.
    #[arg(long)]
    pub transcripts: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, conflicts_with = "concurrence")]
    pub alpha2: Option<f64>,
    #[arg(long)]
    pub concurrence: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 20_240_601)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Values of N (chains of 2N hops).
    #[arg(long, value_delimiter = ',', default_values_t = [1u32, 5, 10])]
    pub n: Vec<u32>,
    /// Selects the default concurrence grid.
    #[arg(long, value_enum, default_value = "probability")]
    pub curve: Curve,
    /// Concurrence grid `start:step:end`, overriding the curve default.
    #[arg(long)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct HeteroArgs {
    /// `alpha1^2,alpha2^2` of the two channels.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub alphas2: Vec<f64>,
    /// Monte Carlo trials; 0 skips the simulation.
    #[arg(long, default_value_t = 0)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => format_real(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Real(x) => Value::from(*x),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

/// 17 significant digits, `.` decimal separator.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn render(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Csv => {
                writeln!(out, "{}", self.header.join(","))?;
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    writeln!(out, "{}", cells.join(","))?;
                }
            }
            Format::Json => {
                for row in &self.rows {
                    let record: Map<String, Value> =
                        self.header.iter().zip(row).map(|(k, v)| (k.to_string(), v.json())).collect();
                    writeln!(out, "{}", Value::Object(record))?;
                }
            }
        }
        Ok(())
    }
}

fn default_input() -> PureState {
    PureState::qubit(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).expect("normalized")
}

fn single_channel(alpha2: Option<f64>, concurrence: Option<f64>) -> Result<Channel> {
    match (alpha2, concurrence) {
        (Some(a), None) => Channel::from_alpha2(a),
        (None, Some(c)) => channel_from_concurrence(c),
        _ => Err(Error::InvalidParameter("give exactly one of --alpha2 or --concurrence".into())),
    }
}

fn simulate_channels(args: &SimulateArgs) -> Result<Vec<Channel>> {
    if let Some(list) = &args.channel.alphas2 {
        if args.n.is_some() || args.hops.is_some_and(|h| h != list.len()) {
            return Err(Error::InvalidParameter("--alphas2 fixes the hop count; drop --n/--hops".into()));
        }
        return list.iter().map(|&a| Channel::from_alpha2(a)).collect();
    }
    let channel = single_channel(args.channel.alpha2, args.channel.concurrence)?;
    let hops = match (args.n, args.hops) {
        (Some(n), None) => 2 * n as usize,
        (None, Some(h)) => h,
        _ => return Err(Error::InvalidParameter("give exactly one of --n or --hops".into())),
    };
    Ok(vec![channel; hops])
}

/// Closed form matching a chain, when one is known.
fn closed_form(kind: ProtocolKind, channels: &[Channel]) -> Result<Option<f64>> {
    let homogeneous = channels.windows(2).all(|w| w[0] == w[1]);
    let alpha = channels[0].alpha();
    Ok(match kind {
        ProtocolKind::Smtp => {
            let mut p = 1.0;
            for ch in channels {
                p *= p_single(ch.alpha())?;
            }
            Some(p)
        }
        ProtocolKind::Gmtp if channels.len() == 1 => Some(p_single(alpha)?),
        ProtocolKind::Gmtp if homogeneous && channels.len() % 2 == 0 => {
            Some(p_gmtp((channels.len() / 2) as u32, alpha)?)
        }
        ProtocolKind::Gmtp if channels.len() == 2 => Some(p_hetero(alpha, channels[1].alpha())?),
        ProtocolKind::Gmtp => None,
    })
}

fn join_alpha2(channels: &[Channel]) -> String {
    channels.iter().map(|c| format!("{}", c.alpha2())).collect::<Vec<_>>().join(";")
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<Table> {
    let channels = simulate_channels(args)?;
    let kind = ProtocolKind::from(args.protocol);
    let config = ChainConfig::new(kind, channels.clone(), default_input())?.with_pauli_frame(args.pauli_frame);
    if args.trials == 0 {
        return Err(Error::InvalidParameter("--trials must be at least 1".into()));
    }

    let mc = match &args.transcripts {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            let mut successes = 0;
            for_each_trial(&config, args.trials, args.seed, |t| {
                successes += u64::from(t.success);
                let line = serde_json::to_string(&t).map_err(|e| Error::Io(e.to_string()))?;
                writeln!(w, "{line}")?;
                Ok(())
            })?;
            w.flush()?;
            McResult::from_counts(args.trials, successes)
        }
        None => monte_carlo(&config, args.trials, args.seed)?,
    };

    let closed = closed_form(kind, &channels)?;
    let z = closed.map(|p| compare_value(p, &mc).z_score);
    let mut table = Table::new(vec![
        "protocol",
        "hops",
        "channels_alpha2",
        "pauli_frame",
        "trials",
        "seed",
        "successes",
        "estimate",
        "std_error",
        "closed_form",
        "z_score",
    ]);
    table.rows.push(vec![
        Cell::Text(kind.to_string()),
        Cell::Int(channels.len() as u64),
        Cell::Text(join_alpha2(&channels)),
        Cell::Bool(args.pauli_frame),
        Cell::Int(mc.trials),
        Cell::Int(args.seed),
        Cell::Int(mc.successes),
        Cell::Real(mc.estimate),
        Cell::Real(mc.std_error),
        closed.map_or(Cell::Empty, Cell::Real),
        z.map_or(Cell::Empty, Cell::Real),
    ]);
    Ok(table)
}

pub fn cmd_analytic(args: &AnalyticArgs) -> Result<Table> {
    let ch = single_channel(args.alpha2, args.concurrence)?;
    let alpha = ch.alpha();
    let mut table = Table::new(vec!["N", "alpha2", "concurrence", "p_single", "p_smtp", "p_gmtp", "ratio"]);
    table.rows.push(vec![
        Cell::Int(args.n as u64),
        Cell::Real(ch.alpha2()),
        Cell::Real(ch.concurrence()),
        Cell::Real(p_single(alpha)?),
        Cell::Real(p_smtp(args.n, alpha)?),
        Cell::Real(p_gmtp(args.n, alpha)?),
        Cell::Real(ratio_gmtp_smtp(args.n, alpha)?),
    ]);
    Ok(table)
}

pub fn cmd_hetero(args: &HeteroArgs) -> Result<Table> {
    let [a1, a2] = args.alphas2[..] else {
        return Err(Error::InvalidParameter(format!(
            "--alphas2 needs exactly two values, got {}",
            args.alphas2.len()
        )));
    };
    let (c1, c2) = (Channel::from_alpha2(a1)?, Channel::from_alpha2(a2)?);
    let config = ChainConfig::new(ProtocolKind::Gmtp, vec![c1, c2], default_input())?;
    let closed = p_hetero(c1.alpha(), c2.alpha())?;
    let exact = enumerate(&config)?.success_probability;
    let mut table = Table::new(vec![
        "alpha1_2",
        "alpha2_2",
        "p_closed_form",
        "p_exact",
        "trials",
        "mc_estimate",
        "mc_std_error",
    ]);
    let (trials, est, se) = if args.trials > 0 {
        let mc = monte_carlo(&config, args.trials, args.seed)?;
        (Cell::Int(mc.trials), Cell::Real(mc.estimate), Cell::Real(mc.std_error))
    } else {
        (Cell::Int(0), Cell::Empty, Cell::Empty)
    };
    table.rows.push(vec![Cell::Real(a1), Cell::Real(a2), Cell::Real(closed), Cell::Real(exact), trials, est, se]);
    Ok(table)
}

/// Returns the table and whether every check passed.
pub fn cmd_verify(args: &VerifyArgs) -> Result<(Table, bool)> {
    let results = run_default_checks(args.trials, args.seed)?;
    let all_pass = results.iter().all(|r| r.pass);
    let mut table = Table::new(vec!["check", "detail", "expected", "observed", "tolerance", "status"]);
    for r in results {
        table.rows.push(vec![
            Cell::Text(r.check),
            Cell::Text(r.detail.replace(',', ";")),
            Cell::Real(r.expected),
            Cell::Real(r.observed),
            Cell::Real(r.tolerance),
            Cell::Text(if r.pass { "pass" } else { "fail" }.into()),
        ]);
    }
    Ok((table, all_pass))
}

/// Parses `start:step:end` into grid points, rounded to 12 decimals so that
/// values like 0.96 land exactly on their decimal representation.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::InvalidParameter(format!("bad grid '{spec}': {e}")))?;
    let [start, step, end] = parts[..] else {
        return Err(Error::InvalidParameter(format!("grid '{spec}' must be start:step:end")));
    };
    if !(step > 0.0) || end < start {
        return Err(Error::InvalidParameter(format!("grid '{spec}' is empty or has a nonpositive step")));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12).collect())
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Table> {
    let grid = match (&args.grid, args.curve) {
        (Some(g), _) => parse_grid(g)?,
        (None, Curve::Probability) => parse_grid("0.50:0.005:1.00")?,
        (None, Curve::Ratio) => parse_grid("0.90:0.001:1.00")?,
    };
    let mut table = Table::new(vec!["concurrence", "N", "p_smtp", "p_gmtp", "ratio"]);
    for &n in &args.n {
        for p in sweep(n, &grid)? {
            table.rows.push(vec![
                Cell::Real(p.concurrence),
                Cell::Int(p.n as u64),
                Cell::Real(p.p_smtp),
                Cell::Real(p.p_gmtp),
                Cell::Real(p.ratio),
            ]);
        }
    }
    Ok(table)
}

fn output_of(command: &Command) -> &OutputArgs {
    match command {
        Command::Simulate(a) => &a.output,
        Command::Analytic(a) => &a.output,
        Command::Verify(a) => &a.output,
        Command::Sweep(a) => &a.output,
        Command::Hetero(a) => &a.output,
    }
}

/// Runs one command, writing to `--out` or `stdout`. Returns `false` when a
/// verification check failed.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<bool> {
    let (table, ok) = match &cli.command {
        Command::Simulate(a) => (cmd_simulate(a)?, true),
        Command::Analytic(a) => (cmd_analytic(a)?, true),
        Command::Verify(a) => cmd_verify(a)?,
        Command::Sweep(a) => (cmd_sweep(a)?, true),
        Command::Hetero(a) => (cmd_hetero(a)?, true),
    };
    let output = output_of(&cli.command);
    match &output.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.render(output.format, &mut w)?;
            w.flush()?;
        }
        None => table.render(output.format, stdout)?,
    }
    Ok(ok)
}
