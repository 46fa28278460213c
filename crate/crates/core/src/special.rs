//! Lambert W on the nonnegative reals and the closed-form rate functions
//! built on it. All rates are in nats per vertex.

use crate::error::{Error, Result};
use crate::numfmt::sig12;

/// Half-width of the window around a removable singularity inside which a
/// series expansion replaces the raw quotient.
pub const SEAM_WINDOW: f64 = 1e-4;

/// Window around `x = 2` inside which `f_lambda_deriv` integrates instead of
/// dividing by `(x - 2)^2`.
const DERIV_WINDOW: f64 = 0.05;

const MAX_HALLEY_ITERS: usize = 50;

/// Principal branch of Lambert W: the `w >= 0` with `w·e^w = x`.
pub fn lambert_w(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "lambert_w is defined here only for x >= 0, got {x}"
        )));
    }
    Ok(w0(x))
}

/// Lambert W without the domain check; callers guarantee `x >= 0`.
#[inline]
pub(crate) fn w0(x: f64) -> f64 {
    debug_assert!(x >= 0.0, "w0({x})");
    if x == 0.0 || x.is_infinite() {
        return x;
    }
    let mut w = if x < std::f64::consts::E {
        x.ln_1p()
    } else {
        let l = x.ln();
        l - l.ln()
    };
    for _ in 0..MAX_HALLEY_ITERS {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() < 1e-15 * (1.0 + w.abs()) {
            break;
        }
    }
    w
}

/// `c_λ = W(2λ) + W(2λ)²/2`, the value of `W(λx) + W(λx)²/2` at `x = 2`.
pub fn c_lambda(lambda: f64) -> f64 {
    let w = w0(2.0 * lambda);
    w + 0.5 * w * w
}

/// The lower-bound rate `(W(λx) + W(λx)²/2 - c_λ) / (x - 2)`.
///
/// Equivalently `(W(λd)² + 2W(λd) - W(2λ)² - 2W(2λ)) / (2(d - 2))`: every
/// triangle-free graph of average degree `d` has `log Z(λ) >= f_λ(d)·n` for
/// `λ ∈ [0, 1]`. Near `x = 2` a second-order expansion fills the removable
/// singularity.
pub fn f_lambda(lambda: f64, x: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let eps = x - 2.0;
    if eps.abs() < SEAM_WINDOW {
        let [d1, d2, d3] = numerator_derivs_at_two(lambda);
        d1 + eps * (d2 / 2.0 + eps * d3 / 6.0)
    } else {
        let w = w0(lambda * x);
        (w + 0.5 * w * w - c_lambda(lambda)) / eps
    }
}

/// First three derivatives of `h(x) = W(λx) + W(λx)²/2` at `x = 2`.
fn numerator_derivs_at_two(lambda: f64) -> [f64; 3] {
    let w = w0(2.0 * lambda);
    let wp1 = 1.0 + w;
    [
        w / 2.0,
        -w * w / (4.0 * wp1),
        w * w * w * (2.0 * w + 3.0) / (8.0 * wp1 * wp1 * wp1),
    ]
}

/// `h''(y) = -W(λy)² / (y²(1 + W(λy)))`.
fn numerator_second_deriv(lambda: f64, y: f64) -> f64 {
    let w = w0(lambda * y);
    -w * w / (y * y * (1.0 + w))
}

/// `f_λ'(x)`, in the form `(c_λ - W²/2 - 2λe^{-W}) / (x - 2)²` with
/// `W = W(λx)`; this is `m_λ(x) / (x(x-2)²)` with the factor `x` cancelled
/// through `W(λx)/x = λe^{-W(λx)}`, so it stays finite at `x = 0`.
/// Close to `x = 2` it integrates `f'(2+ε) = ∫₀¹ t·h''(2+tε) dt` instead.
pub fn f_lambda_deriv(lambda: f64, x: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let eps = x - 2.0;
    if eps.abs() < DERIV_WINDOW {
        gauss_legendre_unit(|t| t * numerator_second_deriv(lambda, 2.0 + t * eps))
    } else {
        let w = w0(lambda * x);
        (c_lambda(lambda) - 0.5 * w * w - 2.0 * lambda * (-w).exp()) / (eps * eps)
    }
}

/// 10-point Gauss–Legendre rule on [0, 1].
fn gauss_legendre_unit(f: impl Fn(f64) -> f64) -> f64 {
    const NODES: [(f64, f64); 5] = [
        (0.148_874_338_981_631_2, 0.295_524_224_714_752_87),
        (0.433_395_394_129_247_2, 0.269_266_719_309_996_35),
        (0.679_409_568_299_024_4, 0.219_086_362_515_982_04),
        (0.865_063_366_688_984_5, 0.149_451_349_150_580_6),
        (0.973_906_528_517_171_7, 0.066_671_344_308_688_14),
    ];
    let mut s = 0.0;
    for &(xi, wi) in &NODES {
        s += wi * (f(0.5 * (1.0 - xi)) + f(0.5 * (1.0 + xi)));
    }
    0.5 * s
}

/// The random-graph upper envelope `φ(λ, d)`: `(W(λd)² + 2W(λd)) / (2d)` when
/// `log λ <= d`, otherwise `1 - d/2 + log λ`.
pub fn upper_rate_phi(lambda: f64, d: f64) -> Result<f64> {
    if d.is_nan() || d <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "upper_rate_phi needs d > 0, got {d}"
        )));
    }
    if lambda < 0.0 || lambda.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "upper_rate_phi needs lambda >= 0, got {lambda}"
        )));
    }
    if lambda == 0.0 || lambda.ln() <= d {
        let w = w0(lambda * d);
        Ok((w * w + 2.0 * w) / (2.0 * d))
    } else {
        Ok(1.0 - 0.5 * d + lambda.ln())
    }
}

/// `lim_{d→0+} φ(λ, d)`: `λ` when `λ <= 1`, else `1 + log λ`.
pub fn upper_rate_phi_at_zero(lambda: f64) -> f64 {
    if lambda <= 1.0 {
        lambda
    } else {
        1.0 + lambda.ln()
    }
}

/// Shearer's rate `f(d) = (d log d - d + 1) / (d - 1)²`, with `f(0) = 1`
/// and the series `Σ_{k≥2} (-1)^k t^{k-2} / (k(k-1))`, `t = d - 1`, near 1.
pub fn shearer_rate(d: f64) -> f64 {
    if d == 0.0 {
        return 1.0;
    }
    let t = d - 1.0;
    if t.abs() < SEAM_WINDOW {
        shearer_series(t, 0)
    } else {
        (d * d.ln() - d + 1.0) / (t * t)
    }
}

/// `f'(d) = ((d - 1) log d - 2(d log d - d + 1)) / (d - 1)³`; `-∞` at `d = 0`.
pub fn shearer_rate_deriv(d: f64) -> f64 {
    if d == 0.0 {
        return f64::NEG_INFINITY;
    }
    let t = d - 1.0;
    if t.abs() < DERIV_WINDOW {
        shearer_series(t, 1)
    } else {
        (t * d.ln() - 2.0 * (d * d.ln() - d + 1.0)) / (t * t * t)
    }
}

/// `order`-th derivative of the series for `shearer_rate` around `d = 1`.
fn shearer_series(t: f64, order: u32) -> f64 {
    let mut s = 0.0;
    for k in (2 + order as i32..40).rev() {
        let p = k - 2;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let mut coef = sign / (k as f64 * (k - 1) as f64);
        for j in 0..order as i32 {
            coef *= (p - j) as f64;
        }
        s = s * t + coef;
    }
    s
}

/// `η_d = 2W(e·d/2)/d`, the root of `d/2 = (1/η) log(e/η)`.
pub fn shearer_sharpness_eta(d: f64) -> Result<f64> {
    if d.is_nan() || d < 2.0 {
        return Err(Error::InvalidArgument(format!(
            "shearer_sharpness_eta needs d >= 2, got {d}"
        )));
    }
    Ok(2.0 * w0(std::f64::consts::E * d / 2.0) / d)
}

/// Right-hand side rate of the occupancy conjecture, `(W(λd) - W(2λ)) / (d - 2)`,
/// filled at `d = 2` by its limit `W(2λ) / (2(1 + W(2λ)))`.
pub fn conjecture_rhs(lambda: f64, d: f64) -> Result<f64> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "conjecture_rhs needs lambda > 0, got {lambda}"
        )));
    }
    let eps = d - 2.0;
    let w2 = w0(2.0 * lambda);
    if eps.abs() < SEAM_WINDOW {
        let wp1 = 1.0 + w2;
        let u1 = w2 / (2.0 * wp1);
        let u2 = -w2 * w2 * (w2 + 2.0) / (4.0 * wp1.powi(3));
        let u3 = w2.powi(3) * (2.0 * w2 * w2 + 8.0 * w2 + 9.0) / (8.0 * wp1.powi(5));
        Ok(u1 + eps * (u2 / 2.0 + eps * u3 / 6.0))
    } else {
        Ok((w0(lambda * d) - w2) / eps)
    }
}

/// A rate evaluated at one `(λ, d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePoint {
    pub lambda: f64,
    pub d: f64,
    pub value: f64,
}

/// One row of the lower/upper envelope table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvelopeRow {
    pub lower: RatePoint,
    pub upper: RatePoint,
}

/// Lower rate `f_λ(d)` and upper rate `φ(λ, d)` at one degree; `d = 0` uses
/// the limit of `φ`.
pub fn envelope(lambda: f64, d: f64) -> Result<EnvelopeRow> {
    if d.is_nan() || d < 0.0 {
        return Err(Error::InvalidArgument(format!("negative degree {d}")));
    }
    let upper = if d == 0.0 {
        upper_rate_phi_at_zero(lambda)
    } else {
        upper_rate_phi(lambda, d)?
    };
    Ok(EnvelopeRow {
        lower: RatePoint {
            lambda,
            d,
            value: f_lambda(lambda, d),
        },
        upper: RatePoint {
            lambda,
            d,
            value: upper,
        },
    })
}

/// Envelope rows for `d = d_min, d_min + step, ...` up to `d_max` inclusive.
pub fn envelope_table(lambda: f64, d_min: f64, d_max: f64, step: f64) -> Result<Vec<EnvelopeRow>> {
    if !(d_min >= 0.0 && d_min < d_max && step > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= d_min < d_max and step > 0, got [{d_min}, {d_max}] step {step}"
        )));
    }
    let count = ((d_max - d_min) / step + 1e-9).floor() as usize;
    (0..=count)
        .map(|i| envelope(lambda, d_min + i as f64 * step))
        .collect()
}

/// Header of the whitespace-separated envelope table.
pub const PLOT_HEADER: &str = "d lower upper";

/// Renders envelope rows as `d lower upper` lines under [`PLOT_HEADER`].
pub fn envelope_table_text(rows: &[EnvelopeRow]) -> String {
    let mut out = String::from(PLOT_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{} {} {}\n",
            sig12(r.lower.d),
            sig12(r.lower.value),
            sig12(r.upper.value)
        ));
    }
    out
}
