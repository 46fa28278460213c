//! Per-graph comparison of exact `log Z / n` against the lower rate `f_λ(d)`
//! and the upper envelope `φ(λ, d)`.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{enumerate_labeled_graphs, pair_order, Graph, ENUMERATION_LIMIT};
use crate::numfmt::sig12;
use crate::poly::{independence_polynomial, log_z, Fugacity};
use crate::special::{f_lambda, upper_rate_phi, upper_rate_phi_at_zero};

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub avg_degree: f64,
    pub lambda: Fugacity,
    pub log_z_per_vertex: f64,
    /// `f_λ(d)`, a proven lower bound on `log Z / n` for triangle-free graphs
    /// when `λ <= 1`.
    pub lower_rate: f64,
    /// `φ(λ, d)`, the rate achieved by random triangle-free graphs.
    pub upper_rate: f64,
    pub triangle_free: bool,
}

impl BoundReport {
    /// `log Z / n - f_λ(d)`.
    pub fn lower_slack(&self) -> f64 {
        self.log_z_per_vertex - self.lower_rate
    }

    /// `φ(λ, d) - log Z / n`. Individual graphs may go negative.
    pub fn upper_slack(&self) -> f64 {
        self.upper_rate - self.log_z_per_vertex
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "n={}, d={}, lambda={}",
            self.n,
            sig12(self.avg_degree),
            self.lambda
        )?;
        writeln!(f, "logZ/n={}", sig12(self.log_z_per_vertex))?;
        writeln!(
            f,
            "lower={} (slack {})",
            sig12(self.lower_rate),
            sig12(self.lower_slack())
        )?;
        write!(
            f,
            "upper={} (slack {})",
            sig12(self.upper_rate),
            sig12(self.upper_slack())
        )?;
        if !self.triangle_free {
            write!(
                f,
                "\nwarning: graph has triangles; the lower bound is not guaranteed"
            )?;
        }
        Ok(())
    }
}

/// Exact `log Z / n` of `g` next to both envelopes at its average degree.
pub fn bound_report(g: &Graph, lambda: &Fugacity) -> Result<BoundReport> {
    if g.n() == 0 {
        return Err(Error::InvalidArgument(
            "graph must have at least one vertex".into(),
        ));
    }
    let p = independence_polynomial(g)?;
    let l = lambda.to_f64();
    let d = g.average_degree();
    Ok(BoundReport {
        n: g.n(),
        avg_degree: d,
        lambda: lambda.clone(),
        log_z_per_vertex: log_z(&p, lambda) / g.n() as f64,
        lower_rate: f_lambda(l, d),
        upper_rate: if d > 0.0 {
            upper_rate_phi(l, d)?
        } else {
            upper_rate_phi_at_zero(l)
        },
        triangle_free: g.is_triangle_free(),
    })
}

/// Tightest case found by [`lower_bound_scan`] for one fugacity.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerScanRow {
    pub lambda: Fugacity,
    pub graphs: u64,
    /// Smallest `log Z - n·f_λ(d)` (total, not per vertex).
    pub min_slack: f64,
    pub argmin_n: usize,
    pub argmin_edges: Vec<(usize, usize)>,
}

/// Checks `log Z(λ) >= n·f_λ(d)` on every labelled triangle-free graph with
/// `1 <= n <= n_max`, returning the minimum slack per fugacity.
pub fn lower_bound_scan(n_max: usize, lambdas: &[Fugacity]) -> Result<Vec<LowerScanRow>> {
    if n_max == 0 || n_max > ENUMERATION_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "n_max must lie in [1, {ENUMERATION_LIMIT}], got {n_max}"
        )));
    }
    let lf: Vec<f64> = lambdas.iter().map(Fugacity::to_f64).collect();
    let mut jobs = Vec::new();
    for n in 1..=n_max {
        let total = 1u64 << pair_order(n).len();
        let shards = 64.min(total);
        for s in 0..shards {
            jobs.push((n, s * total / shards..(s + 1) * total / shards));
        }
    }
    type Best = (f64, usize, u64);
    let partials: Vec<(u64, Vec<Best>)> = jobs
        .into_par_iter()
        .map(|(n, codes)| -> Result<(u64, Vec<Best>)> {
            let mut it = enumerate_labeled_graphs(n, true)?.shard(codes);
            let mut best = vec![(f64::INFINITY, 0, 0); lambdas.len()];
            let mut count = 0;
            while let Some((code, g)) = it.next_with_code() {
                count += 1;
                let p = independence_polynomial(&g)?;
                let d = g.average_degree();
                for (i, lambda) in lambdas.iter().enumerate() {
                    let slack = log_z(&p, lambda) - n as f64 * f_lambda(lf[i], d);
                    if slack < best[i].0 {
                        best[i] = (slack, n, code);
                    }
                }
            }
            Ok((count, best))
        })
        .collect::<Result<_>>()?;

    let graphs: u64 = partials.iter().map(|p| p.0).sum();
    lambdas
        .iter()
        .enumerate()
        .map(|(i, lambda)| {
            // Ties resolve to the first shard, which is the smallest (n, code).
            let (min_slack, n, code) = partials
                .iter()
                .map(|p| p.1[i])
                .fold((f64::INFINITY, 0, 0), |a, b| if b.0 < a.0 { b } else { a });
            Ok(LowerScanRow {
                lambda: lambda.clone(),
                graphs,
                min_slack,
                argmin_n: n,
                argmin_edges: crate::graph::labeled_graph_from_code(n, code)?.edges(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c5_report() {
        let r = bound_report(&Graph::cycle(5), &Fugacity::integer(1)).unwrap();
        assert!((r.log_z_per_vertex - 11f64.ln() / 5.0).abs() < 1e-15);
        assert!((r.lower_rate - 0.426302751007).abs() < 1e-9);
        assert!(r.lower_slack() > 0.0);
        assert!(r.upper_slack() > 0.0);
        assert!(r.triangle_free);
        assert!(r.to_string().contains("logZ/n=0.47957905456"));
    }

    #[test]
    fn edgeless_uses_zero_degree_limit() {
        let r = bound_report(&Graph::empty(4), &Fugacity::from_ratio(1, 2).unwrap()).unwrap();
        assert_eq!(r.upper_rate, upper_rate_phi_at_zero(0.5));
        assert!((r.log_z_per_vertex - 1.5f64.ln()).abs() < 1e-15);
        assert!(bound_report(&Graph::empty(0), &Fugacity::integer(1)).is_err());
    }

    #[test]
    fn small_scan_holds() {
        let rows = lower_bound_scan(5, &[Fugacity::integer(1)]).unwrap();
        assert_eq!(rows[0].graphs, 1 + 2 + 7 + 41 + 388);
        assert!(rows[0].min_slack >= -1e-9, "{rows:?}");
        assert!(lower_bound_scan(8, &[Fugacity::integer(1)]).is_err());
    }
}
