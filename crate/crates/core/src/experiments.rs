//! Random-graph experiments: `G(n, p)` sampling, triangle-free conditioning,
//! exact sharpness trials, Glauber dynamics, and exhaustive conjecture scans.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`. Replica `r` of an experiment with seed `s` uses the seed
//! `s ^ splitmix64(r)`, so each replica can be re-run on its own. Within a
//! replica, graph sampling, triangle deletion, and Glauber dynamics read
//! separate ChaCha streams (0, 1, and 2).

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{enumerate_labeled_graphs, pair_order, Graph, ENUMERATION_LIMIT};
use crate::numfmt::sig12;
use crate::poly::{independence_polynomial, log_z, occupancy_fraction, Fugacity};
use crate::special::{conjecture_rhs, f_lambda, upper_rate_phi, upper_rate_phi_at_zero};

/// Absolute slack allowed before a lower-bound violation is reported.
pub const LOWER_BOUND_SLACK: f64 = 1e-9;

const SAMPLE_STREAM: u64 = 0;
const DELETION_STREAM: u64 = 1;
const GLAUBER_STREAM: u64 = 2;

/// SplitMix64 finaliser.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replica `index` of an experiment seeded with `seed`.
pub fn replica_seed(seed: u64, index: u64) -> u64 {
    seed ^ splitmix64(index)
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `G(n, p)`: each pair `i < j`, in lexicographic order, is an edge when the
/// next uniform `[0, 1)` draw is below `p`.
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "edge probability {p} not in [0, 1]"
        )));
    }
    let mut rng = rng_for(seed, SAMPLE_STREAM);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edge_list(n, &edges)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TriangleFreeMode {
    /// Resample until a triangle-free graph appears.
    Rejection,
    /// Repeatedly delete a uniformly random edge of the lowest-index triangle.
    TriangleDeletion,
}

impl TriangleFreeMode {
    /// Rejection for `d <= 3`, where acceptance is about `e^{-d³/6}`;
    /// deletion above.
    pub fn default_for(d: f64) -> TriangleFreeMode {
        if d <= 3.0 {
            TriangleFreeMode::Rejection
        } else {
            TriangleFreeMode::TriangleDeletion
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TriangleFreeMode::Rejection => "rejection",
            TriangleFreeMode::TriangleDeletion => "triangle-deletion",
        }
    }
}

impl FromStr for TriangleFreeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<TriangleFreeMode> {
        match s {
            "rejection" => Ok(TriangleFreeMode::Rejection),
            "triangle-deletion" | "deletion" => Ok(TriangleFreeMode::TriangleDeletion),
            _ => Err(Error::InvalidArgument(format!(
                "unknown triangle-free mode {s:?}"
            ))),
        }
    }
}

impl fmt::Display for TriangleFreeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A triangle-free graph plus how it was obtained.
#[derive(Clone, Debug, PartialEq)]
pub struct Conditioned {
    pub graph: Graph,
    pub mode: TriangleFreeMode,
    /// Samples drawn, counting the input graph (rejection mode).
    pub tries: u64,
    /// Edges deleted (deletion mode).
    pub edges_removed: usize,
}

/// Makes `g` triangle-free.
///
/// Rejection mode returns `g` if it already is triangle-free and otherwise
/// draws fresh graphs from `resample(try_seed)` for tries `1..max_tries`.
/// Deletion mode needs no resampler.
pub fn make_triangle_free(
    g: Graph,
    mode: TriangleFreeMode,
    seed: u64,
    max_tries: u64,
    resample: Option<&dyn Fn(u64) -> Result<Graph>>,
) -> Result<Conditioned> {
    match mode {
        TriangleFreeMode::TriangleDeletion => {
            let mut rng = rng_for(seed, DELETION_STREAM);
            let (graph, edges_removed) = delete_triangles(&g, &mut rng);
            Ok(Conditioned {
                graph,
                mode,
                tries: 1,
                edges_removed,
            })
        }
        TriangleFreeMode::Rejection => {
            if max_tries == 0 {
                return Err(Error::InvalidArgument("max_tries must be positive".into()));
            }
            if g.is_triangle_free() {
                return Ok(Conditioned {
                    graph: g,
                    mode,
                    tries: 1,
                    edges_removed: 0,
                });
            }
            let resample = resample.ok_or_else(|| {
                Error::InvalidArgument("rejection mode needs a resampling callback".into())
            })?;
            for t in 1..max_tries {
                let h = resample(replica_seed(seed, t))?;
                if h.is_triangle_free() {
                    return Ok(Conditioned {
                        graph: h,
                        mode,
                        tries: t + 1,
                        edges_removed: 0,
                    });
                }
            }
            Err(Error::RejectionExhausted {
                tries: max_tries,
                rejection_rate: 1.0,
            })
        }
    }
}

fn delete_triangles(g: &Graph, rng: &mut ChaCha8Rng) -> (Graph, usize) {
    let n = g.n();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).collect()).collect();
    let mut removed = 0;
    // Deleting edges never creates triangles, so the scan position only advances.
    let mut a = 0;
    while a < n {
        match first_triangle_at(&adj, a) {
            Some((b, c)) => {
                let (u, v) = [(a, b), (a, c), (b, c)][rng.random_range(0..3)];
                adj[u].remove(&v);
                adj[v].remove(&u);
                removed += 1;
            }
            None => a += 1,
        }
    }
    let edges: Vec<_> = adj
        .iter()
        .enumerate()
        .flat_map(|(u, s)| s.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
        .collect();
    (
        Graph::from_edge_list(n, &edges).expect("subgraph of a valid graph"),
        removed,
    )
}

/// Lexicographically smallest triangle `(a, b, c)`, `a < b < c`, with the given `a`.
fn first_triangle_at(adj: &[BTreeSet<usize>], a: usize) -> Option<(usize, usize)> {
    for &b in adj[a].range(a + 1..) {
        if let Some(&c) = adj[a].range(b + 1..).find(|c| adj[b].contains(c)) {
            return Some((b, c));
        }
    }
    None
}

/// Parameters of a sharpness experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    /// Target average degree; edges appear with probability `d/n`.
    pub d: f64,
    pub lambda: Fugacity,
    pub replicas: usize,
    pub seed: u64,
    pub tf_mode: TriangleFreeMode,
    /// When nonzero, each replica also runs Glauber dynamics for this many
    /// steps as a cross-check of the exact occupancy.
    pub mcmc_steps: u64,
    pub burn_in: u64,
    pub max_tries: u64,
}

impl ExperimentConfig {
    pub fn new(n: usize, d: f64, lambda: Fugacity, replicas: usize, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            n,
            d,
            lambda,
            replicas,
            seed,
            tf_mode: TriangleFreeMode::default_for(d),
            mcmc_steps: 0,
            burn_in: 0,
            max_tries: 1_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.n > crate::graph::BIT_ROW_LIMIT {
            return Err(Error::TooManyVertices {
                n: self.n,
                max: crate::graph::BIT_ROW_LIMIT,
            });
        }
        if !(self.d >= 0.0 && self.d <= self.n as f64) {
            return bad(format!("d = {} must lie in [0, n]", self.d));
        }
        if self.replicas == 0 {
            return bad("replicas must be at least 1".into());
        }
        if self.mcmc_steps > 0 && self.mcmc_steps <= self.burn_in {
            return bad("mcmc_steps must exceed burn_in".into());
        }
        Ok(())
    }

    /// Parses flat `key = value` lines. Keys: `n`, `d`, `lambda`, `replicas`,
    /// `seed`, `tf_mode`, `mcmc_steps`, `burn_in`, `max_tries`. `n`, `d`,
    /// `lambda`, and `seed` are required. Unknown keys are errors.
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let mut n = None;
        let mut d = None;
        let mut lambda = None;
        let mut seed = None;
        let mut replicas = 1usize;
        let mut tf_mode = None;
        let mut mcmc_steps = 0u64;
        let mut burn_in = 0u64;
        let mut max_tries = 1_000_000u64;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: i + 1, msg };
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| perr(format!("expected key = value, got {line:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            fn num<T: FromStr>(v: &str, k: &str, line: usize) -> Result<T> {
                v.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad value {v:?} for {k}"),
                })
            }
            match k {
                "n" => n = Some(num(v, k, i + 1)?),
                "d" => d = Some(num(v, k, i + 1)?),
                "lambda" => lambda = Some(v.parse::<Fugacity>()?),
                "seed" => seed = Some(num(v, k, i + 1)?),
                "replicas" => replicas = num(v, k, i + 1)?,
                "tf_mode" => tf_mode = Some(v.parse::<TriangleFreeMode>()?),
                "mcmc_steps" => mcmc_steps = num(v, k, i + 1)?,
                "burn_in" => burn_in = num(v, k, i + 1)?,
                "max_tries" => max_tries = num(v, k, i + 1)?,
                _ => return Err(perr(format!("unknown key {k:?}"))),
            }
        }
        let missing = |k: &str| Error::InvalidArgument(format!("missing required key {k:?}"));
        let d: f64 = d.ok_or_else(|| missing("d"))?;
        let cfg = ExperimentConfig {
            n: n.ok_or_else(|| missing("n"))?,
            d,
            lambda: lambda.ok_or_else(|| missing("lambda"))?,
            replicas,
            seed: seed.ok_or_else(|| missing("seed"))?,
            tf_mode: tf_mode.unwrap_or_else(|| TriangleFreeMode::default_for(d)),
            mcmc_steps,
            burn_in,
            max_tries,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One replica of a sharpness experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub replica: usize,
    pub replica_seed: u64,
    pub n: usize,
    pub realized_avg_degree: f64,
    /// Edges removed by triangle deletion (0 in rejection mode).
    pub triangles_removed: usize,
    pub tries: u64,
    pub log_z_per_vertex: f64,
    pub alpha_per_vertex: f64,
    pub occupancy_per_vertex: f64,
    /// `f_λ` at the realized degree.
    pub lower_rate: f64,
    /// `φ(λ, ·)` at the realized degree.
    pub upper_rate: f64,
    pub glauber: Option<GlauberEstimate>,
}

/// Header of the CSV emitted by [`results_csv`].
pub const RESULTS_CSV_HEADER: &str =
    "replica,seed,n,realized_d,triangles_removed,log_z_per_vertex,alpha_per_vertex,occupancy_per_vertex";

/// CSV with a header line and one row per replica.
pub fn results_csv(results: &[ExperimentResult]) -> String {
    let mut s = String::from(RESULTS_CSV_HEADER);
    s.push('\n');
    for r in results {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.replica,
            r.replica_seed,
            r.n,
            sig12(r.realized_avg_degree),
            r.triangles_removed,
            sig12(r.log_z_per_vertex),
            sig12(r.alpha_per_vertex),
            sig12(r.occupancy_per_vertex),
        ));
    }
    s
}

/// Replica results and their summary.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub results: Vec<ExperimentResult>,
    pub min_log_z_per_vertex: f64,
    pub median_log_z_per_vertex: f64,
    pub max_log_z_per_vertex: f64,
    pub median_realized_degree: f64,
    /// Smallest `log_z_per_vertex - lower_rate` over replicas.
    pub min_lower_slack: f64,
    /// Largest `log_z_per_vertex - upper_rate` over replicas.
    pub max_upper_excess: f64,
    /// `φ(λ, d)` at the target degree.
    pub upper_rate_at_target: f64,
    /// Largest `|glauber - exact|` in units of the reported standard error.
    pub max_glauber_z: Option<f64>,
}

impl ExperimentReport {
    pub fn summary_lines(&self) -> Vec<String> {
        let mut v = vec![
            format!("mode={}", self.config.tf_mode),
            format!(
                "log_z_per_vertex min={} median={} max={}",
                sig12(self.min_log_z_per_vertex),
                sig12(self.median_log_z_per_vertex),
                sig12(self.max_log_z_per_vertex)
            ),
            format!("median_realized_d={}", sig12(self.median_realized_degree)),
            format!("min_lower_slack={}", sig12(self.min_lower_slack)),
            format!("max_upper_excess={}", sig12(self.max_upper_excess)),
            format!("upper_rate_at_target={}", sig12(self.upper_rate_at_target)),
        ];
        if let Some(z) = self.max_glauber_z {
            v.push(format!("max_glauber_z={}", sig12(z)));
        }
        v
    }
}

/// Median of a nonempty slice (mean of the middle two for even length).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Upper rate at a realized degree, using the `d → 0` limit for edgeless graphs.
fn upper_at(lambda: f64, d: f64) -> f64 {
    if d > 0.0 {
        upper_rate_phi(lambda, d).expect("d > 0")
    } else {
        upper_rate_phi_at_zero(lambda)
    }
}

/// Runs all replicas of a sharpness experiment with exact counting.
///
/// Returns `Error::Inconsistency` if any triangle-free replica with `λ <= 1`
/// has `log Z / n` below the lower rate at its realized degree.
pub fn sharpness_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let results = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| run_replica(cfg, r))
        .collect::<Result<Vec<_>>>()?;

    let lz: Vec<f64> = results.iter().map(|r| r.log_z_per_vertex).collect();
    let degs: Vec<f64> = results.iter().map(|r| r.realized_avg_degree).collect();
    let lambda = cfg.lambda.to_f64();
    let max_glauber_z = results
        .iter()
        .filter_map(|r| {
            r.glauber
                .map(|g| (g.mean - r.occupancy_per_vertex).abs() / g.std_err.max(f64::MIN_POSITIVE))
        })
        .reduce(f64::max);
    Ok(ExperimentReport {
        config: cfg.clone(),
        min_log_z_per_vertex: lz.iter().copied().fold(f64::INFINITY, f64::min),
        median_log_z_per_vertex: median(&lz),
        max_log_z_per_vertex: lz.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        median_realized_degree: median(&degs),
        min_lower_slack: results
            .iter()
            .map(|r| r.log_z_per_vertex - r.lower_rate)
            .fold(f64::INFINITY, f64::min),
        max_upper_excess: results
            .iter()
            .map(|r| r.log_z_per_vertex - r.upper_rate)
            .fold(f64::NEG_INFINITY, f64::max),
        upper_rate_at_target: upper_at(lambda, cfg.d),
        max_glauber_z,
        results,
    })
}

fn run_replica(cfg: &ExperimentConfig, replica: usize) -> Result<ExperimentResult> {
    let seed = replica_seed(cfg.seed, replica as u64);
    let p = cfg.d / cfg.n as f64;
    let n = cfg.n;
    let resample = move |s: u64| sample_gnp(n, p, s);
    let first = sample_gnp(n, p, seed)?;
    let cond = make_triangle_free(first, cfg.tf_mode, seed, cfg.max_tries, Some(&resample))?;
    let g = cond.graph;
    let poly = independence_polynomial(&g)?;
    let nf = n as f64;
    let lambda = cfg.lambda.to_f64();
    let log_z_per_vertex = log_z(&poly, &cfg.lambda) / nf;
    let d = g.average_degree();
    let lower_rate = f_lambda(lambda, d);
    if lambda <= 1.0 && log_z_per_vertex < lower_rate - LOWER_BOUND_SLACK {
        return Err(Error::Inconsistency(format!(
            "replica {replica} (seed {seed}): log Z/n = {log_z_per_vertex} is below the \
             proven lower rate {lower_rate} at d = {d}"
        )));
    }
    let occupancy_per_vertex = if cfg.lambda.is_zero() {
        0.0
    } else {
        occupancy_fraction(&poly, &cfg.lambda)? / nf
    };
    let glauber = if cfg.mcmc_steps > 0 && !cfg.lambda.is_zero() {
        Some(glauber_occupancy(
            &g,
            lambda,
            cfg.mcmc_steps,
            cfg.burn_in,
            seed,
        )?)
    } else {
        None
    };
    Ok(ExperimentResult {
        replica,
        replica_seed: seed,
        n,
        realized_avg_degree: d,
        triangles_removed: cond.edges_removed,
        tries: cond.tries,
        log_z_per_vertex,
        alpha_per_vertex: poly.degree() as f64 / nf,
        occupancy_per_vertex,
        lower_rate,
        upper_rate: upper_at(lambda, d),
        glauber,
    })
}

/// Per-vertex occupancy estimate from Glauber dynamics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlauberEstimate {
    /// Mean occupied fraction after burn-in.
    pub mean: f64,
    /// Batch-means standard error of `mean`.
    pub std_err: f64,
    pub steps: u64,
    pub burn_in: u64,
}

pub const GLAUBER_BATCHES: u64 = 30;

/// Default `(steps, burn_in)` for an `n`-vertex graph: burn-in
/// `100·n·log n` and measurement `1000·n·log n` single-site updates, with
/// `log n` floored at 1.
pub fn glauber_defaults(n: usize) -> (u64, u64) {
    let scale = n as f64 * (n as f64).ln().max(1.0);
    let burn_in = (100.0 * scale).ceil() as u64;
    let measure = (1000.0 * scale).ceil() as u64;
    (burn_in + measure, burn_in)
}

/// Single-site Glauber dynamics for the hard-core model at fugacity λ.
///
/// Each step picks a uniform vertex; if none of its neighbours is occupied
/// it becomes occupied with probability `λ/(1+λ)` and vacant otherwise.
/// `steps` counts all updates including the `burn_in` ones; the occupied
/// count is recorded after every update past burn-in and split into 30
/// batches for the standard error.
pub fn glauber_occupancy(
    g: &Graph,
    lambda: f64,
    steps: u64,
    burn_in: u64,
    seed: u64,
) -> Result<GlauberEstimate> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "fugacity must be positive, got {lambda}"
        )));
    }
    if steps <= burn_in {
        return Err(Error::InvalidArgument(format!(
            "steps ({steps}) must exceed burn_in ({burn_in})"
        )));
    }
    let measured = steps - burn_in;
    if measured < GLAUBER_BATCHES {
        return Err(Error::InvalidArgument(format!(
            "need at least {GLAUBER_BATCHES} measured steps, got {measured}"
        )));
    }
    let n = g.n();
    if n == 0 {
        return Ok(GlauberEstimate {
            mean: 0.0,
            std_err: 0.0,
            steps,
            burn_in,
        });
    }
    let adj: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v).collect()).collect();
    let accept = lambda / (1.0 + lambda);
    let validate = cfg!(debug_assertions) && n <= 20;
    let mut rng = rng_for(seed, GLAUBER_STREAM);
    let mut occupied = vec![false; n];
    let mut blocked = vec![0u32; n];
    let mut count = 0u64;

    let batch_len = measured / GLAUBER_BATCHES;
    let mut batch_sums = vec![0f64; GLAUBER_BATCHES as usize];
    for step in 0..steps {
        let v = rng.random_range(0..n);
        let u: f64 = rng.random();
        let want = blocked[v] == 0 && u < accept;
        if want != occupied[v] {
            occupied[v] = want;
            for &w in &adj[v] {
                if want {
                    blocked[w] += 1;
                } else {
                    blocked[w] -= 1;
                }
            }
            if want {
                count += 1;
            } else {
                count -= 1;
            }
        }
        if validate {
            for (a, nb) in adj.iter().enumerate() {
                assert!(
                    !occupied[a] || nb.iter().all(|&b| !occupied[b]),
                    "Glauber state is not an independent set at step {step}"
                );
            }
        }
        if step >= burn_in {
            let k = (step - burn_in) / batch_len;
            // The remainder steps fold into the last batch.
            let k = k.min(GLAUBER_BATCHES - 1) as usize;
            batch_sums[k] += count as f64;
        }
    }
    let nf = n as f64;
    let means: Vec<f64> = batch_sums
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let len = if k as u64 == GLAUBER_BATCHES - 1 {
                measured - batch_len * (GLAUBER_BATCHES - 1)
            } else {
                batch_len
            };
            s / len as f64 / nf
        })
        .collect();
    let total: f64 = batch_sums.iter().sum();
    let mean = total / measured as f64 / nf;
    let b = GLAUBER_BATCHES as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (b - 1.0);
    Ok(GlauberEstimate {
        mean,
        std_err: (var / b).sqrt(),
        steps,
        burn_in,
    })
}

/// One (graph, λ) evaluation in a conjecture scan.
#[derive(Clone, Debug, PartialEq)]
pub struct SlackRecord {
    pub n: usize,
    /// Edge code of the labelled graph (see `graph::pair_order`).
    pub code: u64,
    pub edges: Vec<(usize, usize)>,
    pub lambda: Fugacity,
    pub lambda_index: usize,
    pub avg_degree: f64,
    pub occupancy: f64,
    /// `occupancy - n·conjecture_rhs(λ, d)`.
    pub slack: f64,
}

impl SlackRecord {
    fn order(&self, other: &SlackRecord) -> Ordering {
        self.slack
            .total_cmp(&other.slack)
            .then(self.n.cmp(&other.n))
            .then(self.code.cmp(&other.code))
            .then(self.lambda_index.cmp(&other.lambda_index))
    }
}

/// Result of [`conjecture_scan`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConjectureScanReport {
    pub n_max: usize,
    pub lambdas: Vec<Fugacity>,
    pub graphs_scanned: u64,
    pub evaluations: u64,
    /// The `KEEP_SMALLEST` smallest slacks, ascending.
    pub smallest: Vec<SlackRecord>,
}

impl ConjectureScanReport {
    pub fn min(&self) -> &SlackRecord {
        &self.smallest[0]
    }
}

/// Number of smallest-slack records kept by [`conjecture_scan`].
pub const KEEP_SMALLEST: usize = 100;

/// Evaluates `λZ'(λ)/Z(λ) - n·(W(λd) - W(2λ))/(d - 2)` on every labelled
/// triangle-free graph with `1 <= n <= n_max` vertices and every λ. This
/// gathers evidence; a negative minimum would be a counterexample candidate.
pub fn conjecture_scan(n_max: usize, lambdas: &[Fugacity]) -> Result<ConjectureScanReport> {
    if n_max == 0 || n_max > ENUMERATION_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "n_max must lie in [1, {ENUMERATION_LIMIT}], got {n_max}"
        )));
    }
    if lambdas.is_empty() || lambdas.iter().any(Fugacity::is_zero) {
        return Err(Error::InvalidArgument(
            "need at least one positive fugacity".into(),
        ));
    }
    const SHARDS: u64 = 64;
    let mut jobs = Vec::new();
    for n in 1..=n_max {
        let total = 1u64 << pair_order(n).len();
        let shards = SHARDS.min(total);
        for s in 0..shards {
            jobs.push((n, s * total / shards..(s + 1) * total / shards));
        }
    }
    let partials = jobs
        .into_par_iter()
        .map(|(n, codes)| scan_shard(n, codes, lambdas))
        .collect::<Result<Vec<_>>>()?;

    let mut graphs_scanned = 0;
    let mut evaluations = 0;
    let mut smallest = Vec::new();
    for (g, e, recs) in partials {
        graphs_scanned += g;
        evaluations += e;
        smallest.extend(recs);
    }
    smallest.sort_by(SlackRecord::order);
    smallest.truncate(KEEP_SMALLEST);
    Ok(ConjectureScanReport {
        n_max,
        lambdas: lambdas.to_vec(),
        graphs_scanned,
        evaluations,
        smallest,
    })
}

fn scan_shard(
    n: usize,
    codes: std::ops::Range<u64>,
    lambdas: &[Fugacity],
) -> Result<(u64, u64, Vec<SlackRecord>)> {
    let lf: Vec<f64> = lambdas.iter().map(Fugacity::to_f64).collect();
    let mut it = enumerate_labeled_graphs(n, true)?.shard(codes);
    let mut kept: Vec<SlackRecord> = Vec::new();
    let (mut graphs, mut evals) = (0u64, 0u64);
    while let Some((code, g)) = it.next_with_code() {
        graphs += 1;
        let p = independence_polynomial(&g)?;
        let d = g.average_degree();
        for (i, lambda) in lambdas.iter().enumerate() {
            evals += 1;
            let occupancy = occupancy_fraction(&p, lambda)?;
            let slack = occupancy - n as f64 * conjecture_rhs(lf[i], d)?;
            if kept.len() >= KEEP_SMALLEST && slack > kept[kept.len() - 1].slack {
                continue;
            }
            kept.push(SlackRecord {
                n,
                code,
                edges: g.edges(),
                lambda: lambda.clone(),
                lambda_index: i,
                avg_degree: d,
                occupancy,
                slack,
            });
            if kept.len() > 4 * KEEP_SMALLEST {
                kept.sort_by(SlackRecord::order);
                kept.truncate(KEEP_SMALLEST);
            }
        }
    }
    kept.sort_by(SlackRecord::order);
    kept.truncate(KEEP_SMALLEST);
    Ok((graphs, evals, kept))
}

/// One row of [`limit_ratio_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct LimitRow {
    pub lambda: Fugacity,
    /// `log Z(λ) / (n log λ)`.
    pub ratio: f64,
    /// `ratio - α(G)/n`.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitTable {
    pub alpha_per_vertex: f64,
    pub rows: Vec<LimitRow>,
    /// Every gap is positive and the gaps strictly decrease along the list.
    pub converging: bool,
}

/// Tracks `log Z(λ)/(n log λ)` approaching `α(G)/n` as λ grows.
pub fn limit_ratio_check(g: &Graph, lambdas: &[Fugacity]) -> Result<LimitTable> {
    if g.n() == 0 {
        return Err(Error::InvalidArgument(
            "graph must have at least one vertex".into(),
        ));
    }
    let one = Fugacity::integer(1);
    if lambdas.iter().any(|l| *l <= one) {
        return Err(Error::InvalidArgument(
            "every fugacity must exceed 1".into(),
        ));
    }
    if lambdas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "fugacities must be increasing".into(),
        ));
    }
    let p = independence_polynomial(g)?;
    let n = g.n() as f64;
    let alpha_per_vertex = p.degree() as f64 / n;
    let rows: Vec<LimitRow> = lambdas
        .iter()
        .map(|l| {
            let ratio = log_z(&p, l) / (n * l.to_f64().ln());
            LimitRow {
                lambda: l.clone(),
                ratio,
                gap: ratio - alpha_per_vertex,
            }
        })
        .collect();
    let converging =
        rows.iter().all(|r| r.gap > 0.0) && rows.windows(2).all(|w| w[1].gap < w[0].gap);
    Ok(LimitTable {
        alpha_per_vertex,
        rows,
        converging,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::brute_force_polynomial;

    fn lam(s: &str) -> Fugacity {
        s.parse().unwrap()
    }

    #[test]
    fn gnp_extremes() {
        let g = sample_gnp(20, 0.0, 1).unwrap();
        assert_eq!(g.edge_count(), 0);
        let k = sample_gnp(20, 1.0, 1).unwrap();
        assert_eq!(k.edge_count(), 190);
        assert!(sample_gnp(5, 1.5, 1).is_err());
        assert_eq!(
            sample_gnp(30, 0.2, 9).unwrap(),
            sample_gnp(30, 0.2, 9).unwrap()
        );
        assert_ne!(
            sample_gnp(30, 0.2, 9).unwrap(),
            sample_gnp(30, 0.2, 10).unwrap()
        );
    }

    #[test]
    fn gnp_mean_degree_concentrates() {
        let degs: Vec<f64> = (0..50)
            .map(|s| sample_gnp(1000, 3.0 / 1000.0, s).unwrap().average_degree())
            .collect();
        let mean = degs.iter().sum::<f64>() / degs.len() as f64;
        assert!((2.7..=3.3).contains(&mean), "{mean}");
    }

    #[test]
    fn conditioning_trivial_cases() {
        let c5 = Graph::cycle(5);
        for mode in [
            TriangleFreeMode::Rejection,
            TriangleFreeMode::TriangleDeletion,
        ] {
            let c = make_triangle_free(c5.clone(), mode, 3, 10, None).unwrap();
            assert_eq!(c.graph, c5);
            assert_eq!(c.edges_removed, 0);
        }
        let c = make_triangle_free(
            Graph::complete(3),
            TriangleFreeMode::TriangleDeletion,
            3,
            1,
            None,
        )
        .unwrap();
        assert_eq!(c.edges_removed, 1);
        assert_eq!(c.graph.edge_count(), 2);
        assert!(c.graph.is_triangle_free());
        assert_eq!(c.graph.connected_components().len(), 1);
        // Rejection needs a resampler once the input has a triangle.
        assert!(
            make_triangle_free(Graph::complete(3), TriangleFreeMode::Rejection, 1, 5, None)
                .is_err()
        );
    }

    #[test]
    fn rejection_exhaustion_is_reported() {
        let always_k3 = |_: u64| Ok(Graph::complete(3));
        let err = make_triangle_free(
            Graph::complete(3),
            TriangleFreeMode::Rejection,
            1,
            5,
            Some(&always_k3),
        );
        assert!(matches!(
            err,
            Err(Error::RejectionExhausted { tries: 5, .. })
        ));
    }

    #[test]
    fn rejection_acceptance_rate() {
        // n = 100, d = 2: acceptance tends to e^{-8/6} ≈ 0.264.
        let accepted = (0..500u64)
            .filter(|&s| sample_gnp(100, 0.02, s).unwrap().is_triangle_free())
            .count();
        let rate = accepted as f64 / 500.0;
        let limit = (-8.0f64 / 6.0).exp();
        assert!(rate > limit / 3.0 && rate < limit * 3.0, "{rate}");
    }

    #[test]
    fn deletion_only_lowers_degree() {
        for s in 0..20 {
            let g = sample_gnp(40, 0.25, s).unwrap();
            let c = make_triangle_free(g.clone(), TriangleFreeMode::TriangleDeletion, s, 1, None)
                .unwrap();
            assert!(c.graph.is_triangle_free());
            assert!(c.graph.average_degree() <= g.average_degree());
            assert_eq!(c.graph.edge_count() + c.edges_removed, g.edge_count());
            for (u, v) in c.graph.edges() {
                assert!(g.has_edge(u, v));
            }
        }
    }

    #[test]
    fn config_parsing() {
        let cfg = ExperimentConfig::parse(
            "# sharpness\nn = 30\nd = 3\nlambda = 1\nreplicas = 5\nseed = 42\ntf_mode = rejection\n",
        )
        .unwrap();
        assert_eq!(cfg.n, 30);
        assert_eq!(cfg.replicas, 5);
        assert_eq!(cfg.tf_mode, TriangleFreeMode::Rejection);
        assert!(
            ExperimentConfig::parse("n = 30\nd = 3\nlambda = 1\nseed = 1\ncolour = red\n").is_err()
        );
        assert!(ExperimentConfig::parse("n = 30\nd = 3\nlambda = 1\n").is_err());
        assert!(
            ExperimentConfig::parse("n = 30\nd = 3\nlambda = 1\nseed = 1\nreplicas = 0\n").is_err()
        );
        let auto = ExperimentConfig::parse("n = 20\nd = 5\nlambda = 1/2\nseed = 1\n").unwrap();
        assert_eq!(auto.tf_mode, TriangleFreeMode::TriangleDeletion);
    }

    #[test]
    fn edgeless_experiment() {
        let cfg = ExperimentConfig::new(12, 0.0, lam("1"), 3, 5);
        let rep = sharpness_experiment(&cfg).unwrap();
        for r in &rep.results {
            assert_eq!(r.log_z_per_vertex, 2f64.ln());
            assert_eq!(r.alpha_per_vertex, 1.0);
            assert_eq!(r.occupancy_per_vertex, 0.5);
        }
    }

    #[test]
    fn experiments_are_reproducible() {
        let mut cfg = ExperimentConfig::new(20, 4.0, lam("1/2"), 6, 77);
        cfg.mcmc_steps = 20_000;
        cfg.burn_in = 2_000;
        let a = sharpness_experiment(&cfg).unwrap();
        let b = sharpness_experiment(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.min_lower_slack >= -LOWER_BOUND_SLACK);
        assert!(a.max_glauber_z.is_some());
        // A replica re-runs on its own from its seed.
        let single = run_replica(&cfg, 4).unwrap();
        assert_eq!(single, a.results[4]);
        assert_eq!(results_csv(&a.results).lines().count(), 7);
        assert_eq!(
            results_csv(&a.results).lines().next(),
            Some(RESULTS_CSV_HEADER)
        );
    }

    #[test]
    fn glauber_small_graphs() {
        let (steps, burn) = glauber_defaults(1);
        let k1 = glauber_occupancy(&Graph::empty(1), 1.0, steps, burn, 3).unwrap();
        assert!((k1.mean - 0.5).abs() <= 3.0 * k1.std_err, "{k1:?}");

        let c5 = Graph::cycle(5);
        let exact =
            occupancy_fraction(&brute_force_polynomial(&c5).unwrap(), &lam("1")).unwrap() / 5.0;
        assert!((exact - 15.0 / 55.0).abs() < 1e-15);
        let (steps, burn) = glauber_defaults(5);
        let est = glauber_occupancy(&c5, 1.0, steps, burn, 11).unwrap();
        assert!(
            (est.mean - exact).abs() <= 3.0 * est.std_err,
            "{est:?} vs {exact}"
        );

        assert!(glauber_occupancy(&c5, 1.0, 100, 100, 1).is_err());
        assert!(glauber_occupancy(&c5, 0.0, 1000, 10, 1).is_err());
    }

    #[test]
    fn conjecture_scan_small() {
        let rep = conjecture_scan(3, &[lam("1")]).unwrap();
        // Triangle-free labelled graphs on 1, 2, 3 vertices: 1 + 2 + 7.
        assert_eq!(rep.graphs_scanned, 10);
        assert_eq!(rep.evaluations, 10);
        let w2 = crate::special::lambert_w(2.0).unwrap();
        // K_1 (edgeless, n = 1): 1/2 - W(2)/2.
        let k1 = rep.smallest.iter().find(|r| r.n == 1).unwrap();
        assert!((k1.slack - (0.5 - w2 / 2.0)).abs() < 1e-12);
        // K_2: 2/3 - 2·(W(1) - W(2))/(-1) ≈ 0.0957.
        let k2 = rep
            .smallest
            .iter()
            .find(|r| r.n == 2 && r.edges.len() == 1)
            .unwrap();
        assert!((k2.slack - 0.0957).abs() < 1e-4, "{}", k2.slack);
        let sorted = rep.smallest.windows(2).all(|w| w[0].slack <= w[1].slack);
        assert!(sorted);
        assert!(conjecture_scan(8, &[lam("1")]).is_err());
        assert!(conjecture_scan(3, &[lam("0")]).is_err());
    }

    #[test]
    fn limit_ratios() {
        let k1 = limit_ratio_check(&Graph::empty(1), &[lam("1000000")]).unwrap();
        let want = (1.0f64 + 1e6).ln() / 1e6f64.ln() - 1.0;
        assert!((k1.rows[0].gap - want).abs() < 1e-12);
        assert!((k1.rows[0].gap - 7.2e-8).abs() < 1e-9);

        let c5 = limit_ratio_check(
            &Graph::cycle(5),
            &[lam("100"), lam("10000"), lam("1000000")],
        )
        .unwrap();
        assert!(c5.converging);
        assert_eq!(c5.alpha_per_vertex, 0.4);

        let e3 = limit_ratio_check(&Graph::empty(3), &[lam("1000")]).unwrap();
        assert!(
            (e3.rows[0].gap - 1.45e-4).abs() < 1e-6,
            "{}",
            e3.rows[0].gap
        );
        assert!(limit_ratio_check(&Graph::cycle(5), &[lam("1")]).is_err());
        assert!(limit_ratio_check(&Graph::cycle(5), &[lam("10"), lam("5")]).is_err());
    }
}
