//! Grid certification of the analytic facts behind the lower-bound rate
//! `f_λ`: it is non-increasing, convex, and satisfies the induction
//! inequality
//!
//! ```text
//! exp(-x f'(x) - f(x)) + λ exp((x - x²) f'(x) - (x + 1) f(x)) >= 1.
//! ```
//!
//! Each claim reduces to the sign of an auxiliary expression (`m_λ`, `k_λ`,
//! `r_λ`, or the inequality itself). Margins are normalised by the
//! magnitude of the terms that make up the expression, so a claim passes when
//! `value >= -TOLERANCE · (1 + scale)` at every grid point.

use std::fmt;

use crate::error::{Error, Result};
use crate::special::{c_lambda, f_lambda, f_lambda_deriv, w0};

/// Relative pass tolerance for every claim.
pub const TOLERANCE: f64 = 1e-9;

/// Relative agreement required between closed-form and finite-difference
/// derivatives of `f_λ`.
pub const DERIVATIVE_REL_TOL: f64 = 1e-6;

/// Relative agreement required between a caller-supplied derivative and
/// finite differences in [`check_hypothesis`].
pub const HYPOTHESIS_DERIVATIVE_REL_TOL: f64 = 1e-5;

/// Above this exponent `r_λ` is evaluated divided through by `e^{λx}`.
const R_SCALE_THRESHOLD: f64 = 600.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Claim {
    Monotone,
    Convex,
    InequalityDirect,
    InequalityR,
}

impl Claim {
    pub fn name(self) -> &'static str {
        match self {
            Claim::Monotone => "monotone",
            Claim::Convex => "convex",
            Claim::InequalityDirect => "inequality-direct",
            Claim::InequalityR => "inequality-r",
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InequalityMode {
    /// The inequality itself at raw degree `x`.
    Direct,
    /// The sufficient condition `r_λ(x) >= 0` in the substituted coordinate
    /// where raw degree is `x·e^{λx}`.
    RFunction,
}

/// Evaluation points plus a short description for reports.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub points: Vec<f64>,
    pub description: String,
}

impl Grid {
    pub fn new(description: impl Into<String>, mut points: Vec<f64>) -> Grid {
        points.retain(|x| x.is_finite() && *x >= 0.0);
        points.sort_by(f64::total_cmp);
        points.dedup();
        Grid {
            points,
            description: description.into(),
        }
    }

    pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Grid {
        Grid::new(
            format!("{count} log-spaced on [{lo:e}, {hi:e}]"),
            log_points(lo, hi, count),
        )
    }

    pub fn linear(lo: f64, hi: f64, count: usize) -> Grid {
        Grid::new(
            format!("{count} linear on [{lo}, {hi}]"),
            linear_points(lo, hi, count),
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn log_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
            .collect(),
    }
}

fn linear_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Recipe for the λ-dependent default grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub log_count: usize,
    pub log_lo: f64,
    pub log_hi: f64,
    pub linear_count: usize,
    pub linear_hi: f64,
}

impl Default for GridSpec {
    fn default() -> GridSpec {
        GridSpec {
            log_count: 2000,
            log_lo: 1e-6,
            log_hi: 1e8,
            linear_count: 200,
            linear_hi: 10.0,
        }
    }
}

impl GridSpec {
    /// Log and linear points plus the critical points `2`, `W(2λ)/λ`, and the
    /// image `2e^{2λ}` of `2` under `x ↦ x·e^{λx}`.
    pub fn build(&self, lambda: f64) -> Grid {
        let mut pts = log_points(self.log_lo, self.log_hi, self.log_count);
        pts.extend(linear_points(0.0, self.linear_hi, self.linear_count));
        pts.push(2.0);
        if lambda > 0.0 {
            pts.push(w0(2.0 * lambda) / lambda);
            pts.push(2.0 * (2.0 * lambda).exp());
        }
        Grid::new(
            format!(
                "{} log-spaced on [{:e}, {:e}] + {} linear on [0, {}] + critical points",
                self.log_count, self.log_lo, self.log_hi, self.linear_count, self.linear_hi
            ),
            pts,
        )
    }
}

/// Outcome of checking one claim at one λ.
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaCheckReport {
    pub lambda: f64,
    pub claim: Claim,
    pub grid_spec: String,
    /// Smallest normalised margin; the claim holds where it is `>= -TOLERANCE`.
    pub worst_margin: f64,
    pub worst_x: f64,
    pub passed: bool,
    /// Largest relative gap between closed-form and numerical derivatives,
    /// when the check includes such a cross-check.
    pub derivative_rel_err: Option<f64>,
}

/// Header for the tab-separated report format.
pub const REPORT_HEADER: &str = "lambda\tclaim\tworst_x\tworst_margin\tpassed";

impl fmt::Display for LemmaCheckReport {
    /// `lambda, claim, worst_x, worst_margin, passed`, tab-separated.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{:.12e}\t{:.12e}\t{}",
            self.lambda, self.claim, self.worst_x, self.worst_margin, self.passed
        )
    }
}

/// Running minimum of margins; a NaN margin is always the worst.
struct Worst {
    margin: f64,
    x: f64,
}

impl Worst {
    fn new() -> Worst {
        Worst {
            margin: f64::INFINITY,
            x: f64::NAN,
        }
    }

    fn observe(&mut self, x: f64, margin: f64) {
        if self.margin.is_nan() {
            return;
        }
        if margin.is_nan() || margin < self.margin {
            self.margin = margin;
            self.x = x;
        }
    }

    fn report(
        self,
        lambda: f64,
        claim: Claim,
        grid: &Grid,
        deriv: Option<f64>,
    ) -> LemmaCheckReport {
        LemmaCheckReport {
            lambda,
            claim,
            grid_spec: grid.description.clone(),
            worst_margin: self.margin,
            worst_x: self.x,
            passed: self.margin >= -TOLERANCE,
            derivative_rel_err: deriv,
        }
    }
}

/// `value / (1 + scale)`, with infinite values mapped to ±1.
fn normalised(value: f64, scale: f64) -> f64 {
    if value.is_infinite() {
        value.signum()
    } else {
        value / (1.0 + scale)
    }
}

/// `m_λ(x) = c_λ x - x W(λx)²/2 - 2W(λx)`; `f_λ' = m_λ / (x(x-2)²)`.
pub fn m_lambda(lambda: f64, x: f64) -> f64 {
    let (value, _) = m_terms(lambda, x);
    value
}

fn m_terms(lambda: f64, x: f64) -> (f64, f64) {
    let w = w0(lambda * x);
    let t = [c_lambda(lambda) * x, -0.5 * x * w * w, -2.0 * w];
    (compensated_sum(&t), t.iter().map(|v| v.abs()).sum())
}

/// `k_λ(x) = W(x²W² + (8x-4)W + 4x) - 2x²(W+1)c_λ` with `W = W(λx)`;
/// `f_λ'' = k_λ / ((x-2)³ x² (W+1))`.
pub fn k_lambda(lambda: f64, x: f64) -> f64 {
    k_terms(lambda, x).0
}

fn k_terms(lambda: f64, x: f64) -> (f64, f64) {
    let w = w0(lambda * x);
    let c = c_lambda(lambda);
    let t = [
        w * x * x * w * w,
        w * (8.0 * x - 4.0) * w,
        w * 4.0 * x,
        -2.0 * x * x * (w + 1.0) * c,
    ];
    (compensated_sum(&t), t.iter().map(|v| v.abs()).sum())
}

/// `r_λ(x) = λ(4 + (2+λx)² + λx²e^{λx}) - 2(2e^{λx} + λ)c_λ`.
pub fn r_lambda(lambda: f64, x: f64) -> f64 {
    let c = c_lambda(lambda);
    let e = (lambda * x).exp();
    lambda * (4.0 + (2.0 + lambda * x).powi(2) + lambda * x * x * e) - 2.0 * (2.0 * e + lambda) * c
}

/// Normalised margin of `r_λ(x) >= 0`, dividing through by `e^{λx}` when
/// the exponential would overflow.
fn r_margin(lambda: f64, x: f64) -> f64 {
    let c = c_lambda(lambda);
    let lx = lambda * x;
    let poly = [4.0 * lambda, lambda * (2.0 + lx).powi(2), -2.0 * lambda * c];
    if lx <= R_SCALE_THRESHOLD {
        let e = lx.exp();
        let t = [
            poly[0],
            poly[1],
            poly[2],
            lambda * x * x * e * lambda,
            -4.0 * e * c,
        ];
        let scale: f64 = t.iter().map(|v| v.abs()).sum();
        normalised(compensated_sum(&t), scale)
    } else {
        let damp = (-lx).exp();
        let t = [
            poly[0] * damp,
            poly[1] * damp,
            poly[2] * damp,
            lx * lx,
            -4.0 * c,
        ];
        let scale: f64 = t.iter().map(|v| v.abs()).sum();
        compensated_sum(&t) / (damp + scale)
    }
}

/// The two exponential terms of the induction inequality for a rate with
/// value `f` and derivative `fp` at `x`.
fn inequality_terms(lambda: f64, x: f64, f: f64, fp: f64) -> (f64, f64) {
    let xfp = if x == 0.0 { 0.0 } else { x * fp };
    let a = (-xfp - f).exp();
    let b = lambda * (xfp - x * xfp - (x + 1.0) * f).exp();
    (a, b)
}

fn inequality_margin(lambda: f64, x: f64, f: f64, fp: f64) -> f64 {
    let (a, b) = inequality_terms(lambda, x, f, fp);
    normalised(compensated_sum(&[a, b, -1.0]), a + b + 1.0)
}

/// Left-hand side of the induction inequality for `f_λ` at `x`.
pub fn induction_lhs(lambda: f64, x: f64) -> f64 {
    let (a, b) = inequality_terms(lambda, x, f_lambda(lambda, x), f_lambda_deriv(lambda, x));
    a + b
}

/// Neumaier summation.
fn compensated_sum(terms: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        0.0
    } else {
        d / a.abs().max(b.abs())
    }
}

/// Up to `count` grid points spread over the grid, restricted by `keep`.
fn sample_points(grid: &Grid, count: usize, keep: impl Fn(f64) -> bool) -> Vec<f64> {
    let eligible: Vec<f64> = grid.points.iter().copied().filter(|&x| keep(x)).collect();
    if eligible.len() <= count {
        return eligible;
    }
    (0..count)
        .map(|i| eligible[i * (eligible.len() - 1) / (count - 1)])
        .collect()
}

fn away_from_singularities(x: f64) -> bool {
    (1e-2..=1e6).contains(&x) && (x - 2.0).abs() > 0.1
}

/// `f_λ` is non-increasing: `m_λ <= 0` on the grid. Also cross-checks
/// `f_λ' = m_λ/(x(x-2)²)` against central differences of `f_λ`.
pub fn check_monotone(lambda: f64, grid: &Grid) -> Result<LemmaCheckReport> {
    check_lambda(lambda)?;
    let mut worst = Worst::new();
    for &x in &grid.points {
        let (m, scale) = m_terms(lambda, x);
        worst.observe(x, normalised(-m, scale));
    }
    let mut max_err: f64 = 0.0;
    for x in sample_points(grid, 20, away_from_singularities) {
        let closed = m_lambda(lambda, x) / (x * (x - 2.0).powi(2));
        let h = 1e-4 * x;
        let numeric = (f_lambda(lambda, x + h) - f_lambda(lambda, x - h)) / (2.0 * h);
        let err = relative_gap(closed, numeric);
        if err.is_nan() || err > DERIVATIVE_REL_TOL {
            return Err(Error::DerivativeMismatch { x, closed, numeric });
        }
        max_err = max_err.max(err);
    }
    Ok(worst.report(lambda, Claim::Monotone, grid, Some(max_err)))
}

/// `f_λ` is convex: `(x-2)·k_λ(x) >= 0` on the grid. Also cross-checks
/// `f_λ'' = k_λ/((x-2)³x²(W+1))` against central differences of `f_λ'`.
pub fn check_convex(lambda: f64, grid: &Grid) -> Result<LemmaCheckReport> {
    check_lambda(lambda)?;
    let mut worst = Worst::new();
    for &x in &grid.points {
        let (k, scale) = k_terms(lambda, x);
        let s = x - 2.0;
        worst.observe(x, normalised(s * k, s.abs() * scale));
    }
    let mut max_err: f64 = 0.0;
    for x in sample_points(grid, 20, away_from_singularities) {
        let w = w0(lambda * x);
        let closed = k_lambda(lambda, x) / ((x - 2.0).powi(3) * x * x * (w + 1.0));
        // Differencing f' rather than f: f'' can be far smaller than f near
        // x = 0, where a second difference of f drowns in rounding.
        let h = 1e-4 * x;
        let numeric = (f_lambda_deriv(lambda, x + h) - f_lambda_deriv(lambda, x - h)) / (2.0 * h);
        let err = relative_gap(closed, numeric);
        if err.is_nan() || err > DERIVATIVE_REL_TOL {
            return Err(Error::DerivativeMismatch { x, closed, numeric });
        }
        max_err = max_err.max(err);
    }
    Ok(worst.report(lambda, Claim::Convex, grid, Some(max_err)))
}

/// The induction inequality for `f_λ`, either directly or through `r_λ >= 0`.
pub fn check_inequality(
    lambda: f64,
    grid: &Grid,
    mode: InequalityMode,
) -> Result<LemmaCheckReport> {
    check_lambda(lambda)?;
    let mut worst = Worst::new();
    let claim = match mode {
        InequalityMode::Direct => {
            for &x in &grid.points {
                let m =
                    inequality_margin(lambda, x, f_lambda(lambda, x), f_lambda_deriv(lambda, x));
                worst.observe(x, m);
            }
            Claim::InequalityDirect
        }
        InequalityMode::RFunction => {
            for &x in &grid.points {
                // r_0 ≡ 0: the bound degenerates to equality.
                let m = if lambda == 0.0 {
                    0.0
                } else {
                    r_margin(lambda, x)
                };
                worst.observe(x, m);
            }
            Claim::InequalityR
        }
    };
    Ok(worst.report(lambda, claim, grid, None))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "lambda must be finite and >= 0, got {lambda}"
        )))
    }
}

/// Monotone, convex, and the direct inequality, all on the grid for λ.
pub fn lemma_holds(lambda: f64, spec: &GridSpec) -> Result<bool> {
    let grid = spec.build(lambda);
    Ok(check_monotone(lambda, &grid)?.passed
        && check_convex(lambda, &grid)?.passed
        && check_inequality(lambda, &grid, InequalityMode::Direct)?.passed)
}

/// Upper end of the bisection bracket for [`estimate_lambda_max`].
pub const LAMBDA_MAX_SEARCH_HI: f64 = 20.0;

/// Bisects for the largest λ at which [`lemma_holds`], to within `resolution`.
pub fn estimate_lambda_max(spec: &GridSpec, resolution: f64) -> Result<f64> {
    if !(resolution > 0.0 && resolution <= 0.05) {
        return Err(Error::InvalidArgument(format!(
            "resolution must lie in (0, 0.05], got {resolution}"
        )));
    }
    let (mut lo, mut hi) = (1.0, LAMBDA_MAX_SEARCH_HI);
    if !lemma_holds(lo, spec)? {
        return Err(Error::Inconsistency(
            "the rate fails its own hypotheses at λ = 1, which is covered analytically".into(),
        ));
    }
    if lemma_holds(hi, spec)? {
        return Err(Error::NoBracket { lo, hi });
    }
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if lemma_holds(mid, spec)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Solves `log(1 + λ) = (W(2λ)² + 2W(2λ))/4`: beyond this λ the `d = 0` value
/// of the lower bound exceeds `log Z` of an edgeless graph.
pub fn edgeless_crossover() -> Result<f64> {
    let g = |l: f64| (1.0 + l).ln() - 0.5 * c_lambda(l);
    let (mut lo, mut hi) = (1.0f64, 100.0f64);
    if g(lo).signum() == g(hi).signum() {
        return Err(Error::NoBracket { lo, hi });
    }
    let lo_sign = g(lo).signum();
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if g(mid).signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Residual `log(1 + λ) - (W(2λ)² + 2W(2λ))/4`.
pub fn crossover_residual(lambda: f64) -> f64 {
    (1.0 + lambda).ln() - 0.5 * c_lambda(lambda)
}

/// Per-hypothesis results for a candidate rate.
#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisReport {
    pub monotone: LemmaCheckReport,
    pub convex: LemmaCheckReport,
    pub inequality: LemmaCheckReport,
}

impl HypothesisReport {
    pub fn passed(&self) -> bool {
        self.monotone.passed && self.convex.passed && self.inequality.passed
    }
}

/// Checks an arbitrary rate `d ↦ rate(d)` (with derivative `rate_deriv`)
/// against the hypotheses of the vertex-deletion induction: non-increasing,
/// convex (by second differences), and the induction inequality at λ.
pub fn check_hypothesis(
    rate: impl Fn(f64) -> f64,
    rate_deriv: impl Fn(f64) -> f64,
    lambda: f64,
    grid: &Grid,
) -> Result<HypothesisReport> {
    check_lambda(lambda)?;
    let mut worst_err: Option<(f64, f64, f64, f64)> = None;
    for x in sample_points(grid, 20, |x| (1e-3..=1e6).contains(&x)) {
        let h = 1e-4 * x;
        let numeric = (rate(x + h) - rate(x - h)) / (2.0 * h);
        let closed = rate_deriv(x);
        let err = relative_gap(closed, numeric);
        if worst_err.is_none_or(|(e, ..)| err.is_nan() || err > e) {
            worst_err = Some((err, x, closed, numeric));
        }
    }
    let deriv_err = match worst_err {
        Some((err, x, closed, numeric)) if err.is_nan() || err > HYPOTHESIS_DERIVATIVE_REL_TOL => {
            return Err(Error::DerivativeMismatch { x, closed, numeric });
        }
        Some((err, ..)) => Some(err),
        None => None,
    };

    let mut mono = Worst::new();
    let mut conv = Worst::new();
    let mut ineq = Worst::new();
    for &x in &grid.points {
        let f = rate(x);
        let fp = rate_deriv(x);
        mono.observe(x, normalised(-fp, fp.abs()));

        let h = 1e-3 * x.max(1e-3);
        let (a, b, c) = if x - h >= 0.0 {
            (rate(x - h), f, rate(x + h))
        } else {
            (f, rate(x + h), rate(x + 2.0 * h))
        };
        let second = (a - 2.0 * b + c) / (h * h);
        let scale = (a.abs() + 2.0 * b.abs() + c.abs()) / (h * h);
        conv.observe(x, normalised(second, scale));

        ineq.observe(x, inequality_margin(lambda, x, f, fp));
    }
    Ok(HypothesisReport {
        monotone: mono.report(lambda, Claim::Monotone, grid, deriv_err),
        convex: conv.report(lambda, Claim::Convex, grid, None),
        inequality: ineq.report(lambda, Claim::InequalityDirect, grid, None),
    })
}
