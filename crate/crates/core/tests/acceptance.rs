//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::time::Instant;

use hardcore::bounds::lower_bound_scan;
use hardcore::experiments::{
    conjecture_scan, glauber_defaults, glauber_occupancy, sharpness_experiment, ExperimentConfig,
    TriangleFreeMode,
};
use hardcore::graph::enumerate_labeled_graphs;
use hardcore::poly::{brute_force_polynomial, independence_polynomial, occupancy_fraction};
use hardcore::special::{
    envelope_table, envelope_table_text, f_lambda, lambert_w, shearer_rate, shearer_rate_deriv,
    upper_rate_phi, SEAM_WINDOW,
};
use hardcore::verify::{
    check_convex, check_hypothesis, check_inequality, check_monotone, edgeless_crossover,
    estimate_lambda_max, lemma_holds, Grid, GridSpec,
};
use hardcore::{Fugacity, Graph, InequalityMode};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let p: f64 = rng.random_range(0.05..0.6);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edge_list(n, &edges).unwrap()
}

fn frac(s: &str) -> Fugacity {
    s.parse().unwrap()
}

fn oracle_equivalence() -> Outcome {
    let mut checked = 0;
    for g in enumerate_labeled_graphs(6, false).map_err(|e| e.to_string())? {
        let fast = independence_polynomial(&g).map_err(|e| e.to_string())?;
        let slow = brute_force_polynomial(&g).map_err(|e| e.to_string())?;
        ensure(fast == slow, || format!("mismatch on {:?}", g.edges()))?;
        checked += 1;
    }
    ensure(checked == 1 << 15, || {
        format!("saw {checked} graphs on 6 vertices")
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0001);
    for i in 0..200 {
        let g = random_graph(&mut rng, 7 + i % 12);
        let fast = independence_polynomial(&g).map_err(|e| e.to_string())?;
        let slow = brute_force_polynomial(&g).map_err(|e| e.to_string())?;
        ensure(fast == slow, || {
            format!("mismatch on random graph {i}: {:?}", g.edges())
        })?;
    }
    Ok(format!(
        "{checked} graphs on 6 vertices and 200 random graphs with 7..=18 vertices agree"
    ))
}

fn recursion_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0002);
    let mut identities = 0;
    for _ in 0..500 {
        let n = rng.random_range(1..=12);
        let g = random_graph(&mut rng, n);
        let whole = independence_polynomial(&g).map_err(|e| e.to_string())?;
        for v in 0..n {
            let out = independence_polynomial(&g.delete_vertex(v).unwrap()).unwrap();
            let inn = independence_polynomial(&g.delete_closed_neighborhood(v).unwrap()).unwrap();
            ensure(whole == out.add_shifted(&inn), || {
                format!("identity fails at v={v} on {:?}", g.edges())
            })?;
            identities += 1;
        }
    }
    Ok(format!(
        "{identities} vertex identities on 500 random graphs"
    ))
}

fn small_graph_lower_bound() -> Outcome {
    let lambdas = [frac("1/10"), frac("1/2"), frac("1")];
    let rows = lower_bound_scan(7, &lambdas).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for r in &rows {
        ensure(r.min_slack >= -1e-9, || {
            format!(
                "λ={}: slack {} on n={} edges {:?}",
                r.lambda, r.min_slack, r.argmin_n, r.argmin_edges
            )
        })?;
        parts.push(format!("λ={} min slack {:.3e}", r.lambda, r.min_slack));
    }
    Ok(format!(
        "{} triangle-free graphs; {}",
        rows[0].graphs,
        parts.join(", ")
    ))
}

fn unit_interval_grid_checks() -> Outcome {
    let spec = GridSpec::default();
    let mut worst = f64::INFINITY;
    for k in 0..=20 {
        let lambda = k as f64 / 20.0;
        let grid = spec.build(lambda);
        let reports = [
            check_monotone(lambda, &grid).map_err(|e| e.to_string())?,
            check_convex(lambda, &grid).map_err(|e| e.to_string())?,
            check_inequality(lambda, &grid, InequalityMode::Direct).map_err(|e| e.to_string())?,
            check_inequality(lambda, &grid, InequalityMode::RFunction)
                .map_err(|e| e.to_string())?,
        ];
        for r in &reports {
            ensure(r.passed, || format!("{r}"))?;
            worst = worst.min(r.worst_margin);
        }
    }
    Ok(format!(
        "21 λ values x 4 checks pass; worst margin {worst:.3e}"
    ))
}

fn threshold() -> Outcome {
    let spec = GridSpec::default();
    let lm = estimate_lambda_max(&spec, 0.01).map_err(|e| e.to_string())?;
    ensure((11.0..=12.2).contains(&lm), || {
        format!("λ_max estimate {lm} outside [11.0, 12.2]")
    })?;
    ensure(lemma_holds(2.61, &spec).map_err(|e| e.to_string())?, || {
        "predicate fails at 2.61".into()
    })?;
    Ok(format!("λ_max ≈ {lm:.4}; predicate holds at 2.61"))
}

fn crossover() -> Outcome {
    let c = edgeless_crossover().map_err(|e| e.to_string())?;
    ensure((c - 13.971).abs() <= 1e-3, || format!("crossover {c}"))?;
    Ok(format!("crossover at λ = {c:.6}"))
}

fn shearer_recovery() -> Outcome {
    let grid = GridSpec::default().build(1.0);
    for lambda in [1.0f64, 10.0, 100.0] {
        let l = lambda.ln();
        // At λ = 1 the rate is identically zero, including its slope at d = 0.
        let deriv = |d: f64| {
            if l == 0.0 {
                0.0
            } else {
                shearer_rate_deriv(d) * l
            }
        };
        let rep = check_hypothesis(|d| shearer_rate(d) * l, deriv, lambda, &grid)
            .map_err(|e| e.to_string())?;
        ensure(rep.passed(), || format!("λ={lambda}: {rep:?}"))?;
    }
    let mut worst: f64 = 0.0;
    for x in Grid::log_spaced(1e-2, 1e4, 400).points {
        let h = 1e-5 * x;
        let fp = (shearer_rate(x + h) - shearer_rate(x - h)) / (2.0 * h);
        let gap = (1.0 + (x - x * x) * fp - (x + 1.0) * shearer_rate(x)).abs();
        worst = worst.max(gap);
    }
    ensure(worst <= 1e-8, || format!("equality gap {worst:e}"))?;
    Ok(format!(
        "hypothesis holds at λ ∈ {{1, 10, 100}}; equality gap {worst:.2e}"
    ))
}

fn lambert() -> Outcome {
    let mut inv: f64 = 0.0;
    for x in Grid::log_spaced(1e-6, 1e9, 2000).points {
        let w = lambert_w(x).map_err(|e| e.to_string())?;
        let err = (w * w.exp() - x).abs() / (1.0 + x);
        ensure(err <= 1e-13, || {
            format!("inverse identity at x={x}: {err:e}")
        })?;
        inv = inv.max(err);
    }
    let mut comp: f64 = 0.0;
    for i in 0..=3000 {
        let x = i as f64 * 0.01;
        let err = (lambert_w(x * x.exp()).unwrap() - x).abs();
        ensure(err <= 1e-12, || {
            format!("composition identity at x={x}: {err:e}")
        })?;
        comp = comp.max(err);
    }
    for x in Grid::log_spaced(1e4, 1e300, 500).points {
        let (l1, l2) = (x.ln(), x.ln().ln());
        let w = lambert_w(x).unwrap();
        ensure((w - (l1 - l2)).abs() <= 1.1 * l2 / l1, || {
            format!("sandwich fails at x={x}")
        })?;
    }
    Ok(format!(
        "inverse {inv:.1e}, composition {comp:.1e}, sandwich ok"
    ))
}

fn sharpness() -> Outcome {
    let mut cfg = ExperimentConfig::new(30, 3.0, frac("1"), 50, 20_240_601);
    cfg.tf_mode = TriangleFreeMode::Rejection;
    // Fails with an inconsistency if any replica falls below the lower rate.
    let rep = sharpness_experiment(&cfg).map_err(|e| e.to_string())?;
    ensure(rep.min_lower_slack >= -1e-9, || {
        format!("lower slack {}", rep.min_lower_slack)
    })?;
    let phi = upper_rate_phi(1.0, 3.0).unwrap();
    ensure(rep.median_log_z_per_vertex <= phi + 0.2, || {
        format!(
            "median {} above φ(1,3) + 0.2 = {}",
            rep.median_log_z_per_vertex,
            phi + 0.2
        )
    })?;
    Ok(format!(
        "median logZ/n {:.6} vs φ(1,3) = {phi:.6}; min lower slack {:.4}",
        rep.median_log_z_per_vertex, rep.min_lower_slack
    ))
}

fn mcmc() -> Outcome {
    let mut parts = Vec::new();
    for (name, g, seed) in [
        ("C5", Graph::cycle(5), 5u64),
        ("Petersen", Graph::petersen(), 10),
    ] {
        let n = g.n() as f64;
        let exact =
            occupancy_fraction(&brute_force_polynomial(&g).unwrap(), &frac("1")).unwrap() / n;
        let (steps, burn_in) = glauber_defaults(g.n());
        let est = glauber_occupancy(&g, 1.0, steps, burn_in, seed).map_err(|e| e.to_string())?;
        let dev = (est.mean - exact).abs();
        ensure(dev <= 3.0 * est.std_err && dev <= 0.02, || {
            format!(
                "{name}: estimate {} ± {} vs exact {exact}",
                est.mean, est.std_err
            )
        })?;
        parts.push(format!(
            "{name} {:.5} ± {:.5} (exact {exact:.5})",
            est.mean, est.std_err
        ));
    }
    Ok(parts.join("; "))
}

/// Bisection Lambert W, kept separate from the library's Halley iteration.
fn w_bisect(x: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, x.max(1.0));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * mid.exp() < x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn conjecture() -> Outcome {
    let lambdas = [frac("1/4"), frac("1/2"), frac("1")];
    let rep = conjecture_scan(7, &lambdas).map_err(|e| e.to_string())?;
    ensure(rep.smallest.len() == 100, || {
        format!("kept {} records", rep.smallest.len())
    })?;
    for r in &rep.smallest {
        let g = Graph::from_edge_list(r.n, &r.edges).unwrap();
        let p = brute_force_polynomial(&g).unwrap();
        let l = r.lambda.to_f64();
        let (mut z, mut dz) = (0.0, 0.0);
        for (k, c) in p.coeffs().iter().enumerate() {
            let t = c.to_f64().unwrap() * l.powi(k as i32);
            z += t;
            dz += k as f64 * t;
        }
        let d = 2.0 * g.edge_count() as f64 / r.n as f64;
        let w2 = w_bisect(2.0 * l);
        // d = 2 exactly when m = n; the limit fills the removable singularity.
        let rhs = if g.edge_count() == r.n {
            w2 / (2.0 * (1.0 + w2))
        } else {
            (w_bisect(l * d) - w2) / (d - 2.0)
        };
        let slack = dz / z - r.n as f64 * rhs;
        ensure((slack - r.slack).abs() <= 1e-9, || {
            format!(
                "recomputed slack {slack} vs reported {} on {:?}",
                r.slack, r.edges
            )
        })?;
    }
    let m = rep.min();
    Ok(format!(
        "{} graphs; min slack {:.6} at n={} λ={} edges {:?} ({})",
        rep.graphs_scanned,
        m.slack,
        m.n,
        m.lambda,
        m.edges,
        if m.slack >= 0.0 {
            "nonnegative"
        } else {
            "NEGATIVE"
        }
    ))
}

fn plotdata() -> Outcome {
    let rows = envelope_table(1.0, 0.0, 100.0, 0.1).map_err(|e| e.to_string())?;
    let text = envelope_table_text(&rows);
    let mut lines = text.lines();
    ensure(lines.next() == Some("d lower upper"), || {
        "missing header".into()
    })?;
    let parsed: Vec<[f64; 3]> = lines
        .map(|l| {
            let v: Vec<f64> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect();
    ensure(parsed.len() == 1001, || format!("{} rows", parsed.len()))?;
    for w in parsed.windows(2) {
        ensure(
            w[1][1] <= w[0][1] + 1e-12 && w[1][2] <= w[0][2] + 1e-12,
            || format!("curves increase between d={} and d={}", w[0][0], w[1][0]),
        )?;
    }
    for &[d, lo, up] in &parsed {
        if d >= 0.5 {
            ensure(0.0 <= lo && lo <= up && up <= 1.0, || {
                format!("ordering fails at d={d}")
            })?;
        }
    }
    let at = |d: f64| {
        parsed
            .iter()
            .find(|r| (r[0] - d).abs() < 1e-9)
            .copied()
            .unwrap()
    };
    ensure((at(2.0)[1] - 0.426303).abs() < 1e-6, || {
        format!("lower(2) = {}", at(2.0)[1])
    })?;
    ensure((at(100.0)[2] - 0.09117).abs() < 1e-5, || {
        format!("upper(100) = {}", at(100.0)[2])
    })?;
    let mut seam: f64 = 0.0;
    for side in [-1.0, 1.0] {
        let inside = f_lambda(1.0, 2.0 + side * SEAM_WINDOW * (1.0 - 1e-9));
        let outside = f_lambda(1.0, 2.0 + side * SEAM_WINDOW);
        seam = seam.max((inside - outside).abs());
    }
    ensure(seam <= 1e-8, || format!("seam jump {seam:e}"))?;
    Ok(format!(
        "1001 rows; lower(2) = {}, upper(100) = {}, seam jump {seam:.1e}",
        at(2.0)[1],
        at(100.0)[2]
    ))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("oracle equivalence", oracle_equivalence),
        ("recursion identity", recursion_identity),
        ("lower bound on small triangle-free graphs", small_graph_lower_bound),
        ("grid checks for λ in [0, 1]", unit_interval_grid_checks),
        ("threshold reproduction", threshold),
        ("edgeless crossover", crossover),
        ("Shearer recovery", shearer_recovery),
        ("Lambert W identities", lambert),
        ("sharpness experiment", sharpness),
        ("Glauber dynamics", mcmc),
        ("conjecture evidence", conjecture),
        ("envelope plot data", plotdata),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} ({name}, {secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} ({name}, {secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
