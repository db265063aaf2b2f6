//! Erdős–Rényi sampling and the stochastic experiments: the diagonality
//! phase transition, cycle-count Poisson statistics, the rank law of large
//! numbers, and the dense pawful regime.

use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Dist, Graph, PawfulVerdict};
use crate::homology::{
    compute_homology, decide_diagonality, magnitude_from_homology, Certificate, ComputeOptions,
    Verdict,
};

#[derive(Debug, Error)]
pub enum RandomError {
    #[error("the limiting non-diagonality probability is undefined at c = 1")]
    CriticalC,
    #[error("edge probability {0} is outside [0, 1]")]
    BadProbability(f64),
}

/// Parameters of one Erdős–Rényi experiment run.
#[derive(Clone, Debug, Serialize)]
pub struct ErConfig {
    pub n: usize,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    pub l_max: u32,
    pub max_cycle_len: usize,
}

impl ErConfig {
    pub fn new(n: usize, p: f64, trials: usize, seed: u64) -> Self {
        ErConfig {
            n,
            p,
            trials,
            seed,
            l_max: 5,
            max_cycle_len: 8,
        }
    }

    /// p = c / n parameterization of the sparse regime.
    pub fn with_c(n: usize, c: f64, trials: usize, seed: u64) -> Self {
        Self::new(n, c / n as f64, trials, seed)
    }

    /// The sparse parameter c = p * n.
    pub fn c(&self) -> f64 {
        self.p * self.n as f64
    }
}

/// The generator for one trial: one seed, one independent stream per trial
/// index, so trials replay bit-for-bit in any order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Sample G_{n,p}: each vertex pair appears independently with probability
/// p, via geometric skipping over the pair sequence.
pub fn sample_er(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    assert!((0.0..=1.0).contains(&p), "p out of range");
    if p <= 0.0 {
        return Graph::new(n, []).unwrap();
    }
    let mut edges = Vec::new();
    if p >= 1.0 {
        for v in 1..n {
            for u in 0..v {
                edges.push((u, v));
            }
        }
        return Graph::new(n, edges).unwrap();
    }
    // Batagelj-Brandes skipping: jump over non-edges in one geometric draw.
    let log_q = (1.0 - p).ln();
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.gen_range(0.0..1.0);
        w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    Graph::new(n, edges).unwrap()
}

/// lim P(G_{n, c/n} is non-diagonal)
/// = 1 - sqrt(1 - c) * exp(c/2 + c^2/4 + c^3/6 + c^4/8) for 0 < c < 1,
/// = 1 for c > 1. Undefined at c = 1.
pub fn limiting_nondiag_prob(c: f64) -> Result<f64, RandomError> {
    assert!(c > 0.0, "c must be positive");
    if c == 1.0 {
        return Err(RandomError::CriticalC);
    }
    if c > 1.0 {
        return Ok(1.0);
    }
    let exponent = c / 2.0 + c * c / 4.0 + c * c * c / 6.0 + c * c * c * c / 8.0;
    Ok(1.0 - (1.0 - c).sqrt() * exponent.exp())
}

/// u(c) = (1/c) sum_{i>=1} i^{i-2}/i! (c e^{-c})^i, the limiting component
/// density; equals 1 - c/2 for c <= 1 and exceeds it for c > 1.
pub fn u_of_c(c: f64, terms: usize) -> f64 {
    assert!(c > 0.0 && terms >= 1);
    let x = c * (-c).exp();
    let mut term = x; // i = 1: 1^{-1}/1! x
    let mut sum = term;
    for i in 1..terms {
        // t_{i+1}/t_i = (1 + 1/i)^{i-2} x
        term *= (1.0 + 1.0 / i as f64).powi(i as i32 - 2) * x;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum / c
}

/// Exact (Clopper-Pearson) binomial confidence interval at the given level,
/// computed by bisecting the binomial tail in log space.
pub fn binomial_ci(successes: u64, trials: u64, level: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials && (0.0..1.0).contains(&(1.0 - level)));
    let alpha = 1.0 - level;
    let k = successes;
    let n = trials;
    // P(X >= k | p) and P(X <= k | p) via stable log-pmf accumulation.
    let tail_ge = |p: f64| 1.0 - binom_cdf(k.wrapping_sub(1), n, p);
    let tail_le = |p: f64| binom_cdf(k, n, p);
    let lo = if k == 0 {
        0.0
    } else {
        // Largest p with P(X >= k | p) <= alpha/2.
        bisect(|p| tail_ge(p) - alpha / 2.0)
    };
    let hi = if k == n {
        1.0
    } else {
        // Smallest p with P(X <= k | p) <= alpha/2.
        bisect(|p| alpha / 2.0 - tail_le(p))
    };
    (lo, hi)
}

/// P(X <= k) for X ~ Binom(n, p); k wrapping to u64::MAX means "below 0".
fn binom_cdf(k: u64, n: u64, p: f64) -> f64 {
    if k == u64::MAX {
        return 0.0;
    }
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return if k >= n { 1.0 } else { 0.0 };
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut log_pmf = n as f64 * lq; // P(X = 0)
    let mut acc = log_pmf.exp();
    for i in 1..=k.min(n) {
        log_pmf += ((n - i + 1) as f64 / i as f64).ln() + lp - lq;
        acc += log_pmf.exp();
    }
    acc.min(1.0)
}

/// Root of an increasing-through-zero function on (0, 1).
fn bisect(f: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Mean, variance, and an event-frequency confidence interval.
#[derive(Clone, Debug, Serialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub variance: f64,
    pub ci: Option<(f64, f64)>,
}

impl SummaryStats {
    pub fn of_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let variance = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
        SummaryStats {
            mean,
            variance,
            ci: None,
        }
    }

    pub fn of_frequency(successes: u64, trials: u64, level: f64) -> Self {
        let mean = successes as f64 / trials as f64;
        SummaryStats {
            mean,
            variance: mean * (1.0 - mean) / trials as f64,
            ci: Some(binomial_ci(successes, trials, level)),
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self, samples: usize) -> f64 {
        (self.variance / samples as f64).sqrt()
    }
}

/// Everything recorded about one sampled graph.
#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub verdict: Option<Verdict>,
    pub certificate: Option<String>,
    pub cycle_counts: Vec<u64>,
    pub edges: usize,
    pub components: usize,
    pub circuit_rank: usize,
    pub tree_vertices: usize,
    pub ranks: Vec<(usize, u32, usize)>,
}

fn base_record(trial: u64, g: &Graph, max_cycle_len: usize) -> TrialRecord {
    let components = g.components().components.len();
    let circuit_rank = g.circuit_rank();
    assert_eq!(
        circuit_rank,
        g.edge_count() + components - g.n(),
        "circuit rank identity"
    );
    TrialRecord {
        trial,
        verdict: None,
        certificate: None,
        cycle_counts: g.count_cycles_up_to(max_cycle_len),
        edges: g.edge_count(),
        components,
        circuit_rank,
        tree_vertices: g.tree_vertex_count(),
        ranks: Vec::new(),
    }
}

fn certificate_tag(c: &Certificate) -> String {
    match c {
        Certificate::AllComponentsForest => "forest".into(),
        Certificate::UnicyclicShortCycles => "unicyclic-short".into(),
        Certificate::CompleteGraph => "complete".into(),
        Certificate::Pawful => "pawful".into(),
        Certificate::GirthWitness { girth, .. } => format!("girth-witness-{girth}"),
        Certificate::OffDiagonalRank { k, l } => format!("off-diagonal-{k}-{l}"),
        Certificate::ExhaustedToLmax { l_max } => format!("exhausted-{l_max}"),
    }
}

/// Result of the phase-transition experiment at one (n, p).
#[derive(Clone, Debug, Serialize)]
pub struct DiagonalityOutcome {
    pub config: ErConfig,
    pub diagonal: u64,
    pub nondiagonal: u64,
    pub unresolved: u64,
    /// Non-diagonal frequency among resolved trials.
    pub frequency: f64,
    pub ci: (f64, f64),
    /// The n -> infinity formula, when p = c/n with c != 1.
    pub limit: Option<f64>,
    pub records: Vec<TrialRecord>,
}

impl DiagonalityOutcome {
    pub fn unresolved_fraction(&self) -> f64 {
        self.unresolved as f64 / self.config.trials as f64
    }

    /// Curve row: c, empirical, ci_lo, ci_hi, limit_formula,
    /// unresolved_fraction.
    pub fn curve_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.config.c(),
            self.frequency,
            self.ci.0,
            self.ci.1,
            self.limit.map_or("".into(), |v| v.to_string()),
            self.unresolved_fraction()
        )
    }
}

/// Sample `trials` graphs, decide diagonality for each, and compare the
/// resolved non-diagonal frequency against the limit formula. Trials that
/// exhaust l_max stay in a separate unresolved bucket.
pub fn run_diagonality_experiment(cfg: &ErConfig, ci_level: f64) -> DiagonalityOutcome {
    let records: Vec<TrialRecord> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t);
            let g = sample_er(cfg.n, cfg.p, &mut rng);
            let mut rec = base_record(t, &g, cfg.max_cycle_len);
            let verdict = decide_diagonality(&g, cfg.l_max);
            if let Certificate::GirthWitness { edge, girth, .. } = &verdict.certificate {
                let rechecked = g.girth_edge(edge.0, edge.1).unwrap();
                assert!(
                    rechecked == Dist::Finite(*girth) && *girth >= 5,
                    "girth witness failed recheck"
                );
            }
            rec.certificate = Some(certificate_tag(&verdict.certificate));
            rec.verdict = Some(verdict.verdict);
            rec
        })
        .collect();
    let mut diagonal = 0;
    let mut nondiagonal = 0;
    let mut unresolved = 0;
    for r in &records {
        match r.verdict.unwrap() {
            Verdict::Diagonal => diagonal += 1,
            Verdict::NonDiagonal => nondiagonal += 1,
            Verdict::DiagonalUpTo(_) => unresolved += 1,
        }
    }
    let resolved = diagonal + nondiagonal;
    let frequency = if resolved > 0 {
        nondiagonal as f64 / resolved as f64
    } else {
        0.0
    };
    let ci = if resolved > 0 {
        binomial_ci(nondiagonal, resolved, ci_level)
    } else {
        (0.0, 1.0)
    };
    let c = cfg.c();
    let limit = (c > 0.0).then(|| limiting_nondiag_prob(c).ok()).flatten();
    DiagonalityOutcome {
        config: cfg.clone(),
        diagonal,
        nondiagonal,
        unresolved,
        frequency,
        ci,
        limit,
        records,
    }
}

/// Per-length comparison of empirical cycle counts against the Poisson
/// limit law.
#[derive(Clone, Debug, Serialize)]
pub struct CycleLawRow {
    pub len: usize,
    pub empirical_mean: f64,
    pub empirical_stderr: f64,
    pub poisson_mean: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleOutcome {
    pub config: ErConfig,
    pub rows: Vec<CycleLawRow>,
    /// Empirical P(C_5 = ... = C_m = 0) with its prediction
    /// exp(-1/2 sum_{i=5}^m c^i / i).
    pub joint_zero_empirical: f64,
    pub joint_zero_predicted: f64,
    pub records: Vec<TrialRecord>,
}

/// Cycle counts C_3..C_m over `trials` samples versus Poisson(c^i / 2i).
pub fn run_cycle_experiment(cfg: &ErConfig, m: usize) -> CycleOutcome {
    assert!(m >= 3);
    let records: Vec<TrialRecord> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t);
            let g = sample_er(cfg.n, cfg.p, &mut rng);
            base_record(t, &g, m)
        })
        .collect();
    let c = cfg.c();
    let trials = cfg.trials as f64;
    let rows = (3..=m)
        .map(|len| {
            let samples: Vec<f64> = records
                .iter()
                .map(|r| r.cycle_counts[len - 3] as f64)
                .collect();
            let stats = SummaryStats::of_samples(&samples);
            CycleLawRow {
                len,
                empirical_mean: stats.mean,
                empirical_stderr: stats.stderr(records.len()),
                poisson_mean: c.powi(len as i32) / (2.0 * len as f64),
            }
        })
        .collect();
    let joint_zero = records
        .iter()
        .filter(|r| (5..=m).all(|len| r.cycle_counts[len - 3] == 0))
        .count() as f64
        / trials;
    let predicted = if m >= 5 {
        (-0.5 * (5..=m).map(|i| c.powi(i as i32) / i as f64).sum::<f64>()).exp()
    } else {
        1.0
    };
    CycleOutcome {
        config: cfg.clone(),
        rows,
        joint_zero_empirical: joint_zero,
        joint_zero_predicted: predicted,
        records,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WllnRow {
    pub k: usize,
    pub l: u32,
    pub mean_rank_over_n: f64,
    pub stderr: f64,
    /// c * delta_{k,l}.
    pub limit: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WllnOutcome {
    pub config: ErConfig,
    pub rows: Vec<WllnRow>,
    /// Per length l: mean chi_l / n with the limit (-1)^l c.
    pub chi_rows: Vec<(u32, f64, f64)>,
    pub records: Vec<TrialRecord>,
}

/// Mean rank(MH_{k,l}) / n per requested pair, with the chi_l / n statistic
/// as a byproduct of the same tables.
pub fn run_wlln_experiment(cfg: &ErConfig, pairs: &[(usize, u32)]) -> WllnOutcome {
    let l_max = pairs.iter().map(|&(_, l)| l).max().unwrap_or(0);
    assert!(l_max <= cfg.l_max);
    let results: Vec<(TrialRecord, Vec<i64>)> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t);
            let g = sample_er(cfg.n, cfg.p, &mut rng);
            let mut rec = base_record(t, &g, cfg.max_cycle_len);
            let table = compute_homology(&g, &ComputeOptions::with_l_max(l_max));
            for &(k, l) in pairs {
                rec.ranks.push((k, l, table.rank(k, l)));
            }
            let chi = magnitude_from_homology(&table).coefficients;
            (rec, chi)
        })
        .collect();
    let n = cfg.n as f64;
    let c = cfg.c();
    let rows = pairs
        .iter()
        .enumerate()
        .map(|(idx, &(k, l))| {
            let samples: Vec<f64> = results
                .iter()
                .map(|(r, _)| r.ranks[idx].2 as f64 / n)
                .collect();
            let stats = SummaryStats::of_samples(&samples);
            WllnRow {
                k,
                l,
                mean_rank_over_n: stats.mean,
                stderr: stats.stderr(samples.len()),
                limit: if k as u32 == l { c } else { 0.0 },
            }
        })
        .collect();
    let chi_rows = (0..=l_max)
        .map(|l| {
            let mean = results
                .iter()
                .map(|(_, chi)| chi[l as usize] as f64 / n)
                .sum::<f64>()
                / results.len() as f64;
            let limit = if l % 2 == 0 { c } else { -c };
            (l, mean, if l == 0 { 1.0 } else { limit })
        })
        .collect();
    WllnOutcome {
        config: cfg.clone(),
        rows,
        chi_rows,
        records: results.into_iter().map(|(r, _)| r).collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PawfulOutcome {
    pub config: ErConfig,
    pub pawful: u64,
    pub frequency: f64,
    pub ci: (f64, f64),
}

/// Frequency of the pawful certificate in the dense regime
/// p ~ ((3 + eps) ln n / n)^{1/3}.
pub fn run_pawful_experiment(cfg: &ErConfig, ci_level: f64) -> PawfulOutcome {
    let pawful = (0..cfg.trials as u64)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = trial_rng(cfg.seed, t);
            let g = sample_er(cfg.n, cfg.p, &mut rng);
            matches!(g.is_pawful(), PawfulVerdict::Pawful)
        })
        .count() as u64;
    PawfulOutcome {
        config: cfg.clone(),
        pawful,
        frequency: pawful as f64 / cfg.trials as f64,
        ci: binomial_ci(pawful, cfg.trials as u64, ci_level),
    }
}

/// Per-trial CSV with the TrialRecord fields.
pub fn records_to_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(
        "# maghom-csv v1\ntrial,verdict,certificate,edges,components,circuit_rank,tree_vertices,cycle_counts,ranks\n",
    );
    for r in records {
        let verdict = match r.verdict {
            Some(Verdict::Diagonal) => "diagonal",
            Some(Verdict::NonDiagonal) => "non-diagonal",
            Some(Verdict::DiagonalUpTo(_)) => "unresolved",
            None => "",
        };
        let cycles = r
            .cycle_counts
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let ranks = r
            .ranks
            .iter()
            .map(|(k, l, v)| format!("{k}:{l}:{v}"))
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.trial,
            verdict,
            r.certificate.as_deref().unwrap_or(""),
            r.edges,
            r.components,
            r.circuit_rank,
            r.tree_vertices,
            cycles,
            ranks
        );
    }
    out
}
