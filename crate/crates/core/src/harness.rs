//! Repeated trials, aggregation, slope fits and bootstrap comparisons.
//!
//! Per-trial seeds are `derive_seed(master, [family tag, n, trial])`, and
//! results are gathered by trial index before any reduction, so every
//! summary is a pure function of its [`ExperimentConfig`].

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{simulate, Protocol, ProtocolConfig, TrialResult};
use crate::error::{Error, Result};
use crate::graph::{generate_network, Family, FamilySpec, Network, Topology};
use crate::rng::{derive_seed, label_tag, stream};

pub const BOOTSTRAP_RESAMPLES: usize = 10_000;
const GRAPH_STREAM: u64 = u64::MAX;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub families: Vec<Family>,
    pub protocol: Protocol,
    pub q: f64,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    pub tilde_threshold_enabled: bool,
    pub start_vertex: usize,
    pub max_rounds: Option<u32>,
}

impl ExperimentConfig {
    pub fn new(family: Family, protocol: Protocol, q: f64, n_values: Vec<usize>, trials: usize, master_seed: u64) -> Self {
        Self {
            families: vec![family],
            protocol,
            q,
            n_values,
            trials,
            master_seed,
            tilde_threshold_enabled: true,
            start_vertex: 0,
            max_rounds: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidSpec("trials must be at least 1".into()));
        }
        if self.families.is_empty() || self.n_values.is_empty() {
            return Err(Error::InvalidSpec("need at least one family and one n".into()));
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSpec("n values must be strictly increasing".into()));
        }
        Ok(())
    }

    fn protocol_config(&self) -> ProtocolConfig {
        ProtocolConfig {
            protocol: self.protocol,
            q: self.q,
            start_vertex: self.start_vertex,
            max_rounds: self.max_rounds,
            tilde_threshold_enabled: self.tilde_threshold_enabled,
        }
    }
}

/// Seed used to build the graph for one (family, n) point.
pub fn graph_seed(master: u64, family: &Family, n: usize) -> u64 {
    derive_seed(master, &[label_tag(&family.to_string()), n as u64, GRAPH_STREAM])
}

pub fn trial_seed(master: u64, family: &Family, n: usize, trial: usize) -> u64 {
    derive_seed(master, &[label_tag(&family.to_string()), n as u64, trial as u64])
}

/// Runs `trials` simulations on one shared graph, in trial order.
pub fn run_point<T: Topology + ?Sized>(
    g: &T,
    cfg: &ProtocolConfig,
    seeds: &[u64],
    keep_traces: bool,
) -> Result<Vec<TrialResult>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let mut r = simulate(g, cfg, seed)?;
            if !keep_traces {
                r.trace = Vec::new();
            }
            Ok(r)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub family: String,
    pub n: usize,
    pub protocol: Protocol,
    pub q: f64,
    pub trial: usize,
    pub seed: u64,
    #[serde(rename = "T")]
    pub rounds: u32,
    #[serde(rename = "T_tilde")]
    pub t_tilde: Option<u32>,
    pub completed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub family: String,
    pub n: usize,
    pub protocol: Protocol,
    pub q: f64,
    pub trials: usize,
    pub completed: usize,
    pub completion_rate: f64,
    pub mean_t: Option<f64>,
    pub sd_t: Option<f64>,
    pub q05_t: Option<f64>,
    pub q50_t: Option<f64>,
    pub q95_t: Option<f64>,
    pub mean_t_tilde: Option<f64>,
    pub master_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub version: String,
    pub config: ExperimentConfig,
    pub points: Vec<PointSummary>,
    #[serde(skip)]
    pub rows: Vec<TrialRow>,
}

impl Summary {
    /// Errors when some trial on a connected graph never finished.
    pub fn completion_gate(&self) -> Result<()> {
        match self.points.iter().find(|p| p.completed < p.trials) {
            Some(p) => Err(Error::GenerationFailure(format!(
                "{} of {} trials on {} n={} did not complete",
                p.trials - p.completed,
                p.trials,
                p.family,
                p.n
            ))),
            None => Ok(()),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut value = serde_json::to_value(self)?;
        round_json_floats(&mut value);
        Ok(serde_json::to_string_pretty(&value)?)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows_csv(&self.rows, out)
    }
}

/// Columns `family,n,protocol,q,trial,seed,T,T_tilde,completed`.
pub fn write_rows_csv<W: Write>(rows: &[TrialRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["family", "n", "protocol", "q", "trial", "seed", "T", "T_tilde", "completed"])?;
    for row in rows {
        writer.write_record([
            row.family.clone(),
            row.n.to_string(),
            row.protocol.to_string(),
            format_float(row.q),
            row.trial.to_string(),
            row.seed.to_string(),
            row.rounds.to_string(),
            row.t_tilde.map(|t| t.to_string()).unwrap_or_default(),
            row.completed.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn trial_rows(family: &str, n: usize, protocol: Protocol, q: f64, results: &[TrialResult]) -> Vec<TrialRow> {
    results
        .iter()
        .enumerate()
        .map(|(i, r)| TrialRow {
            family: family.to_string(),
            n,
            protocol,
            q,
            trial: i,
            seed: r.seed,
            rounds: r.rounds,
            t_tilde: r.t_tilde,
            completed: r.completed,
        })
        .collect()
}

/// Generates each (family, n) graph once and runs all trials on it.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Summary> {
    cfg.validate()?;
    let protocol_cfg = cfg.protocol_config();
    let mut points = Vec::new();
    let mut rows = Vec::new();
    for family in &cfg.families {
        for &n in &cfg.n_values {
            let spec = FamilySpec::new(*family, n)?;
            let network: Network = generate_network(&spec, graph_seed(cfg.master_seed, family, n))?;
            let seeds: Vec<u64> = (0..cfg.trials)
                .map(|i| trial_seed(cfg.master_seed, family, n, i))
                .collect();
            let results = run_point(&network, &protocol_cfg, &seeds, false)?;
            let label = family.to_string();
            rows.extend(trial_rows(&label, n, cfg.protocol, cfg.q, &results));
            points.push(summarize(&label, n, cfg.protocol, cfg.q, cfg.master_seed, &results));
        }
    }
    Ok(Summary {
        version: crate::VERSION.to_string(),
        config: cfg.clone(),
        points,
        rows,
    })
}

/// Statistics over completed trials; non-completion shows up in
/// `completed` and `completion_rate` only.
pub fn summarize(
    family: &str,
    n: usize,
    protocol: Protocol,
    q: f64,
    master_seed: u64,
    results: &[TrialResult],
) -> PointSummary {
    let mut done: Vec<f64> = results.iter().filter_map(|r| r.runtime()).map(f64::from).collect();
    done.sort_by(f64::total_cmp);
    let tilde: Vec<f64> = results.iter().filter_map(|r| r.t_tilde).map(f64::from).collect();
    let completed = done.len();
    PointSummary {
        family: family.to_string(),
        n,
        protocol,
        q,
        trials: results.len(),
        completed,
        completion_rate: completed as f64 / results.len() as f64,
        mean_t: mean(&done),
        sd_t: sample_sd(&done),
        q05_t: quantile(&done, 0.05),
        q50_t: quantile(&done, 0.5),
        q95_t: quantile(&done, 0.95),
        mean_t_tilde: mean(&tilde),
        master_seed,
    }
}

pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

pub fn sample_sd(xs: &[f64]) -> Option<f64> {
    let m = mean(xs)?;
    if xs.len() < 2 {
        return Some(0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - m).powi(2)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

/// Least-squares fit of mean runtime against `ln n`.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::Degenerate(format!("need at least 3 points, got {}", points.len())));
    }
    if points.iter().any(|&(n, _)| n.is_nan() || n <= 0.0) {
        return Err(Error::Degenerate("n must be positive".into()));
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| n.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, t)| t).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-12 * xs.iter().map(|x| x * x).sum::<f64>().max(1.0) {
        return Err(Error::Degenerate("all n values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Ok(SlopeFit {
        slope,
        intercept,
        max_residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanComparison {
    /// `mean(a) − mean(b)`.
    pub difference: f64,
    /// One-sided p-value for `mean(a) > mean(b)`.
    pub p_value: f64,
}

/// One-sided bootstrap test of `mean(a) > mean(b)`.
///
/// Both samples are shifted to the pooled mean (imposing the null), then
/// resampled with replacement; the p-value is the share of resampled
/// differences at least as large as the observed one, ties counted half.
pub fn compare_means(a: &[f64], b: &[f64], seed: u64) -> Result<MeanComparison> {
    compare_means_with(a, b, BOOTSTRAP_RESAMPLES, seed)
}

pub fn compare_means_with(a: &[f64], b: &[f64], resamples: usize, seed: u64) -> Result<MeanComparison> {
    let (Some(ma), Some(mb)) = (mean(a), mean(b)) else {
        return Err(Error::EmptySample);
    };
    let observed = ma - mb;
    let pooled = (a.iter().sum::<f64>() + b.iter().sum::<f64>()) / (a.len() + b.len()) as f64;
    let a0: Vec<f64> = a.iter().map(|x| x - ma + pooled).collect();
    let b0: Vec<f64> = b.iter().map(|x| x - mb + pooled).collect();
    let mut rng = stream(seed);
    let mut resample_mean = |xs: &[f64]| {
        (0..xs.len()).map(|_| xs[rng.gen_range(0..xs.len())]).sum::<f64>() / xs.len() as f64
    };
    let tol = 1e-12 * (1.0 + observed.abs());
    let mut exceed = 0.0;
    for _ in 0..resamples {
        let d = resample_mean(&a0) - resample_mean(&b0);
        if (d - observed).abs() <= tol {
            exceed += 0.5;
        } else if d > observed {
            exceed += 1.0;
        }
    }
    Ok(MeanComparison {
        difference: observed,
        p_value: exceed / resamples as f64,
    })
}

/// Mean of `e(I_{t+1},U_{t+1}) / e(I_t,U_t)` over the rounds of one trace
/// with `√ln n ≤ |I_t| ≤ n/ln n`; `None` if no round qualifies.
pub fn boundary_growth(trace: &[crate::engine::RoundRecord], n: usize) -> Option<f64> {
    let ln_n = (n as f64).ln();
    let (lo, hi) = (ln_n.sqrt(), n as f64 / ln_n);
    let ratios: Vec<f64> = trace
        .windows(2)
        .filter(|w| {
            let size = w[0].informed as f64;
            size >= lo && size <= hi && w[0].boundary > 0
        })
        .map(|w| w[1].boundary as f64 / w[0].boundary as f64)
        .collect();
    mean(&ratios)
}

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn format_float(x: f64) -> String {
    format!("{}", round_sig(x))
}

/// Rounds every float in a JSON tree to 12 significant digits.
pub fn round_json_floats(value: &mut serde_json::Value) {
    use serde_json::Value;
    match value {
        Value::Number(num) if num.is_f64() => {
            if let Some(x) = num.as_f64().and_then(|x| serde_json::Number::from_f64(round_sig(x))) {
                *num = x;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json_floats),
        Value::Object(map) => map.values_mut().for_each(round_json_floats),
        _ => {}
    }
}

/// Caps the global worker pool at `RUMOR_THREADS` when set.
pub fn configure_threads() {
    if let Some(threads) = std::env::var("RUMOR_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Already-initialised pools are left alone.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
}
