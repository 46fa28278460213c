use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hardcore::bounds::bound_report;
use hardcore::experiments::{conjecture_scan, results_csv, sharpness_experiment, ExperimentConfig};
use hardcore::graph::{enumerate_labeled_graphs, ENUMERATION_LIMIT};
use hardcore::numfmt::sig12;
use hardcore::poly::{independence_polynomial, log_z, occupancy_fraction};
use hardcore::special::{envelope_table, envelope_table_text};
use hardcore::verify::{
    check_convex, check_inequality, check_monotone, crossover_residual, edgeless_crossover,
    estimate_lambda_max, GridSpec, REPORT_HEADER,
};
use hardcore::{Fugacity, Graph, InequalityMode};

/// Exact counting and numerical checks for the hard-core model on
/// triangle-free graphs.
#[derive(Parser)]
#[command(name = "hardcore", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count independent sets and evaluate log Z(λ)/n for a graph file.
    Count(CountArgs),
    /// Compare log Z(λ)/n against the lower and upper rates at the graph's degree.
    Bounds(BoundsArgs),
    /// Grid-check monotonicity, convexity and the induction inequality over a λ range.
    Verify(VerifyArgs),
    /// Largest λ at which all grid checks still pass.
    LambdaMax(LambdaMaxArgs),
    /// Fugacity where the d = 0 lower bound overtakes log(1 + λ).
    Crossover,
    /// Random triangle-free graph trials from a key = value config file.
    Experiment(ExperimentArgs),
    /// Exhaustive occupancy-fraction scan over small triangle-free graphs.
    Conjecture(ConjectureArgs),
    /// Lower and upper rate curves as a "d lower upper" table.
    Plotdata(PlotArgs),
    /// Stream every labelled graph on n vertices.
    Enumerate(EnumerateArgs),
}

#[derive(Args)]
struct CountArgs {
    /// Graph file ("n m" header then one "u v" line per edge); "-" reads stdin.
    graph: PathBuf,
    #[arg(long, default_value = "1")]
    lambda: Fugacity,
    /// Print the coefficients of the independence polynomial.
    #[arg(long)]
    polynomial: bool,
    /// Print the occupancy fraction λZ'(λ)/Z(λ).
    #[arg(long)]
    occupancy: bool,
    /// Print α(G) even for the empty graph.
    #[arg(long)]
    alpha: bool,
}

#[derive(Args)]
struct BoundsArgs {
    graph: PathBuf,
    #[arg(long, default_value = "1")]
    lambda: Fugacity,
}

#[derive(Args, Clone)]
struct GridArgs {
    #[arg(long, default_value_t = 2000)]
    log_count: usize,
    #[arg(long, default_value_t = 1e-6)]
    log_lo: f64,
    #[arg(long, default_value_t = 1e8)]
    log_hi: f64,
    #[arg(long, default_value_t = 200)]
    linear_count: usize,
    #[arg(long, default_value_t = 10.0)]
    linear_hi: f64,
}

impl GridArgs {
    fn spec(&self) -> Result<GridSpec> {
        if !(self.log_lo > 0.0 && self.log_lo < self.log_hi && self.linear_hi > 0.0) {
            bail!("grid bounds must satisfy 0 < log-lo < log-hi and linear-hi > 0");
        }
        Ok(GridSpec {
            log_count: self.log_count,
            log_lo: self.log_lo,
            log_hi: self.log_hi,
            linear_count: self.linear_count,
            linear_hi: self.linear_hi,
        })
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0.0)]
    lambda_min: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda_max: f64,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct LambdaMaxArgs {
    #[arg(long, default_value_t = 0.01)]
    resolution: f64,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Config file of key = value lines.
    config: PathBuf,
    /// Overrides the seed in the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the per-replica CSV here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConjectureArgs {
    #[arg(long, default_value_t = 7)]
    n_max: usize,
    /// Comma-separated fugacities.
    #[arg(long, value_delimiter = ',', default_value = "1/4,1/2,1")]
    lambdas: Vec<Fugacity>,
    /// Number of smallest-slack records to list.
    #[arg(long, default_value_t = 10)]
    top: usize,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long, default_value_t = 0.0)]
    d_min: f64,
    #[arg(long, default_value_t = 100.0)]
    d_max: f64,
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    n: usize,
    #[arg(long)]
    triangle_free: bool,
    /// Print only the number of graphs.
    #[arg(long)]
    count: bool,
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn read_graph(path: &Path) -> Result<Graph> {
    read_input(path)?
        .parse()
        .with_context(|| format!("parsing graph file {}", path.display()))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout()
            .write_all(text.as_bytes())
            .context("writing stdout"),
    }
}

fn cmd_count(a: &CountArgs) -> Result<bool> {
    let g = read_graph(&a.graph)?;
    let p = independence_polynomial(&g)?;
    let n = g.n();
    let per_vertex = if n == 0 {
        0.0
    } else {
        log_z(&p, &a.lambda) / n as f64
    };
    let mut line = format!("i={}, logZ/n={}", p.count(), sig12(per_vertex));
    if n > 0 || a.alpha {
        line.push_str(&format!(", alpha={}", p.degree()));
    }
    if a.occupancy {
        let occ = if a.lambda.is_zero() {
            0.0
        } else {
            occupancy_fraction(&p, &a.lambda)?
        };
        line.push_str(&format!(", occupancy={}", sig12(occ)));
    }
    println!("{line}");
    if a.polynomial {
        println!("polynomial: {p}");
    }
    Ok(true)
}

fn cmd_bounds(a: &BoundsArgs) -> Result<bool> {
    let g = read_graph(&a.graph)?;
    println!("{}", bound_report(&g, &a.lambda)?);
    Ok(true)
}

fn cmd_verify(a: &VerifyArgs) -> Result<bool> {
    if !(a.lambda_min >= 0.0 && a.lambda_min <= a.lambda_max && a.step > 0.0) {
        bail!("need 0 <= lambda-min <= lambda-max and step > 0");
    }
    let spec = a.grid.spec()?;
    let count = ((a.lambda_max - a.lambda_min) / a.step + 1e-9).floor() as usize;
    let mut ok = true;
    println!("{REPORT_HEADER}");
    for i in 0..=count {
        let lambda = a.lambda_min + i as f64 * a.step;
        let grid = spec.build(lambda);
        let reports = [
            check_monotone(lambda, &grid)?,
            check_convex(lambda, &grid)?,
            check_inequality(lambda, &grid, InequalityMode::Direct)?,
            check_inequality(lambda, &grid, InequalityMode::RFunction)?,
        ];
        for r in &reports {
            println!("{r}");
            if !r.passed && lambda <= 1.0 {
                ok = false;
            }
        }
    }
    if !ok {
        eprintln!("error: a claim failed for some lambda <= 1");
    }
    Ok(ok)
}

fn cmd_lambda_max(a: &LambdaMaxArgs) -> Result<bool> {
    let lm = estimate_lambda_max(&a.grid.spec()?, a.resolution)?;
    println!("lambda_max={}", sig12(lm));
    Ok(true)
}

fn cmd_crossover() -> Result<bool> {
    let c = edgeless_crossover()?;
    println!(
        "crossover={}, residual={}",
        sig12(c),
        sig12(crossover_residual(c))
    );
    Ok(true)
}

fn cmd_experiment(a: &ExperimentArgs) -> Result<bool> {
    let mut text = read_input(&a.config)?;
    if let Some(seed) = a.seed {
        // Later keys win, so an appended seed overrides the file's.
        text.push_str(&format!("\nseed = {seed}\n"));
    }
    let cfg = ExperimentConfig::parse(&text)
        .with_context(|| format!("parsing config {}", a.config.display()))?;
    let report = sharpness_experiment(&cfg)?;
    write_output(a.output.as_deref(), &results_csv(&report.results))?;
    for line in report.summary_lines() {
        eprintln!("{line}");
    }
    Ok(true)
}

fn cmd_conjecture(a: &ConjectureArgs) -> Result<bool> {
    let rep = conjecture_scan(a.n_max, &a.lambdas)?;
    let m = rep.min();
    println!(
        "graphs={}, evaluations={}, min_slack={}, n={}, lambda={}, edges={:?}",
        rep.graphs_scanned,
        rep.evaluations,
        sig12(m.slack),
        m.n,
        m.lambda,
        m.edges
    );
    println!("n\tlambda\td\toccupancy\tslack\tedges");
    for r in rep.smallest.iter().take(a.top) {
        println!(
            "{}\t{}\t{}\t{}\t{}\t{:?}",
            r.n,
            r.lambda,
            sig12(r.avg_degree),
            sig12(r.occupancy),
            sig12(r.slack),
            r.edges
        );
    }
    Ok(true)
}

fn cmd_plotdata(a: &PlotArgs) -> Result<bool> {
    if !(a.d_min >= 0.0 && a.d_min < a.d_max) {
        bail!(
            "bad range: need 0 <= d-min < d-max, got [{}, {}]",
            a.d_min,
            a.d_max
        );
    }
    let rows = envelope_table(a.lambda, a.d_min, a.d_max, a.step)?;
    write_output(a.output.as_deref(), &envelope_table_text(&rows))?;
    Ok(true)
}

fn cmd_enumerate(a: &EnumerateArgs) -> Result<bool> {
    if a.n > ENUMERATION_LIMIT {
        bail!(
            "n = {} exceeds the enumeration limit {ENUMERATION_LIMIT}",
            a.n
        );
    }
    let graphs = enumerate_labeled_graphs(a.n, a.triangle_free)?;
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let mut count = 0u64;
    for g in graphs {
        count += 1;
        if !a.count {
            // One graph per line: "n m u-v u-v ...".
            write!(out, "{} {}", g.n(), g.edge_count())?;
            for (u, v) in g.edges() {
                write!(out, " {u}-{v}")?;
            }
            writeln!(out)?;
        }
    }
    if a.count {
        writeln!(out, "{count}")?;
    }
    out.flush()?;
    eprintln!("{count} graphs");
    Ok(true)
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Count(a) => cmd_count(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Verify(a) => cmd_verify(a),
        Command::LambdaMax(a) => cmd_lambda_max(a),
        Command::Crossover => cmd_crossover(),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Conjecture(a) => cmd_conjecture(a),
        Command::Plotdata(a) => cmd_plotdata(a),
        Command::Enumerate(a) => cmd_enumerate(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
