//! Exact independence polynomials and the hard-core partition function.
//!
//! Coefficients are counted with the vertex-deletion recursion
//! `Z_G = Z_{G-v} + λ·Z_{G-N[v]}` after splitting into connected components.
//! Evaluation at a fugacity happens in exact rational arithmetic; only the
//! final logarithm or ratio is rounded to `f64`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::{BitIter, Graph, BIT_ROW_LIMIT};

/// Largest graph accepted by [`brute_force_polynomial`].
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// A nonnegative rational fugacity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fugacity(BigRational);

impl Fugacity {
    pub fn new(value: BigRational) -> Result<Fugacity> {
        if value.is_negative() {
            return Err(Error::InvalidArgument(format!(
                "fugacity must be nonnegative, got {value}"
            )));
        }
        Ok(Fugacity(value))
    }

    pub fn from_ratio(numer: u64, denom: u64) -> Result<Fugacity> {
        if denom == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(Fugacity(BigRational::new(numer.into(), denom.into())))
    }

    pub fn integer(value: u64) -> Fugacity {
        Fugacity(BigRational::from_integer(value.into()))
    }

    /// The exact binary value of a finite nonnegative float. The conversion is
    /// exact, so the only error is the one already in `x`.
    pub fn from_f64(x: f64) -> Result<Fugacity> {
        if !x.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "fugacity {x} is not finite"
            )));
        }
        let r = BigRational::from_float(x)
            .ok_or_else(|| Error::InvalidArgument(format!("cannot represent {x}")))?;
        Fugacity::new(r)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(self.0.numer(), self.0.denom().magnitude())
    }
}

impl FromStr for Fugacity {
    type Err = Error;

    /// Accepts `a/b`, integers, and plain decimals such as `0.25` (parsed exactly).
    fn from_str(s: &str) -> Result<Fugacity> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("cannot parse fugacity {s:?}"));
        let r = if let Some((a, b)) = s.split_once('/') {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            BigRational::new(a, b)
        } else if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            BigRational::new(digits, scale)
        } else {
            BigRational::from_integer(s.parse().map_err(|_| bad())?)
        };
        Fugacity::new(r)
    }
}

impl fmt::Display for Fugacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Coefficient sequence of `Z_G(λ)`; entry `k` counts independent sets of size `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndependencePolynomial {
    coeffs: Vec<BigUint>,
}

impl IndependencePolynomial {
    /// Wraps a coefficient vector, trimming trailing zeros. The constant term
    /// must be 1.
    pub fn from_coeffs(mut coeffs: Vec<BigUint>) -> Result<IndependencePolynomial> {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.first() != Some(&BigUint::one()) {
            return Err(Error::InvalidArgument(
                "independence polynomial must have constant term 1".into(),
            ));
        }
        Ok(IndependencePolynomial { coeffs })
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `i(G) = Z_G(1)`.
    pub fn count(&self) -> BigUint {
        self.coeffs.iter().sum()
    }

    /// `self · other`, the polynomial of a disjoint union.
    pub fn mul(&self, other: &IndependencePolynomial) -> IndependencePolynomial {
        let mut out = vec![BigUint::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IndependencePolynomial { coeffs: out }
    }

    /// `self + λ·other`, the right-hand side of the deletion recursion.
    pub fn add_shifted(&self, other: &IndependencePolynomial) -> IndependencePolynomial {
        let len = self.coeffs.len().max(other.coeffs.len() + 1);
        let mut out = vec![BigUint::zero(); len];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            out[k + 1] += c;
        }
        IndependencePolynomial { coeffs: out }
    }

    /// Exact value at a rational point.
    pub fn evaluate(&self, lambda: &Fugacity) -> BigRational {
        let (num, den) = self.scaled_sums(lambda);
        BigRational::new(num.0.into(), den.into())
    }

    /// Returns `(Σ c_k a^k b^(K-k), Σ k c_k a^k b^(K-k))` and `b^K` for λ = a/b,
    /// so that `Z = sums.0 / b^K` and `λZ' = sums.1 / b^K`.
    fn scaled_sums(&self, lambda: &Fugacity) -> ((BigUint, BigUint), BigUint) {
        let a = lambda.0.numer().magnitude();
        let b = lambda.0.denom().magnitude();
        let deg = self.degree();
        let mut a_pow = BigUint::one();
        let mut b_pows = Vec::with_capacity(deg + 1);
        let mut bp = BigUint::one();
        for _ in 0..=deg {
            b_pows.push(bp.clone());
            bp *= b;
        }
        let mut z = BigUint::zero();
        let mut dz = BigUint::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            let term = c * &a_pow * &b_pows[deg - k];
            dz += &term * BigUint::from(k);
            z += term;
            a_pow *= a;
        }
        ((z, dz), b_pows.pop().expect("deg + 1 powers"))
    }
}

impl fmt::Display for IndependencePolynomial {
    /// Space-separated decimal coefficients, constant term first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for IndependencePolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<IndependencePolynomial> {
        let coeffs = s
            .split_whitespace()
            .map(|t| {
                t.parse::<BigUint>().map_err(|e| Error::Parse {
                    line: 1,
                    msg: format!("bad coefficient {t:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        IndependencePolynomial::from_coeffs(coeffs)
    }
}

/// Memoisation policy for [`independence_polynomial_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Memo {
    /// Cache only for graphs with more than 32 vertices, with the default cap.
    Auto,
    Off,
    /// Cache with at most this many entries.
    Capped(usize),
}

pub const DEFAULT_MEMO_CAP: usize = 1 << 20;

/// Independence polynomial by component splitting and max-degree pivoting.
pub fn independence_polynomial(g: &Graph) -> Result<IndependencePolynomial> {
    independence_polynomial_with(g, Memo::Auto)
}

pub fn independence_polynomial_with(g: &Graph, memo: Memo) -> Result<IndependencePolynomial> {
    let rows = g.bit_rows().ok_or(Error::TooManyVertices {
        n: g.n(),
        max: BIT_ROW_LIMIT,
    })?;
    let cap = match memo {
        Memo::Auto if g.n() > 32 => DEFAULT_MEMO_CAP,
        Memo::Auto | Memo::Off => 0,
        Memo::Capped(c) => c,
    };
    let mut counter = Counter {
        rows,
        cache: HashMap::new(),
        cap,
    };
    let all = if g.n() == 64 { !0 } else { (1u64 << g.n()) - 1 };
    let coeffs = counter.poly(all);
    Ok(IndependencePolynomial {
        coeffs: coeffs.into_iter().map(BigUint::from).collect(),
    })
}

// Every intermediate coefficient counts independent sets of size k in a
// subgraph on at most 64 vertices, so it is at most C(64, 32) < 2^61 and the
// u128 arithmetic below can never overflow.
type Coeffs = Vec<u128>;

struct Counter<'a> {
    rows: &'a [u64],
    cache: HashMap<u64, Coeffs>,
    cap: usize,
}

impl Counter<'_> {
    fn poly(&mut self, mask: u64) -> Coeffs {
        if mask == 0 {
            return vec![1];
        }
        let mut rest = mask;
        let mut acc: Option<Coeffs> = None;
        while rest != 0 {
            let comp = self.component(rest);
            rest &= !comp;
            let p = self.connected_poly(comp);
            acc = Some(match acc {
                None => p,
                Some(a) => mul(&a, &p),
            });
        }
        acc.expect("nonempty mask")
    }

    fn component(&self, mask: u64) -> u64 {
        let start = mask & mask.wrapping_neg();
        let mut comp = start;
        let mut frontier = start;
        while frontier != 0 {
            let mut next = 0;
            for v in BitIter(frontier) {
                next |= self.rows[v];
            }
            next &= mask & !comp;
            comp |= next;
            frontier = next;
        }
        comp
    }

    fn connected_poly(&mut self, comp: u64) -> Coeffs {
        match comp.count_ones() {
            1 => return vec![1, 1],
            2 => return vec![1, 2],
            _ => {}
        }
        if self.cap > 0 {
            if let Some(p) = self.cache.get(&comp) {
                return p.clone();
            }
        }
        // Max degree within the component; ties go to the smallest index.
        let mut pivot = 0;
        let mut best = 0;
        for v in BitIter(comp) {
            let d = (self.rows[v] & comp).count_ones();
            if d > best {
                best = d;
                pivot = v;
            }
        }
        let bit = 1u64 << pivot;
        let out = self.poly(comp & !bit);
        let inn = self.poly(comp & !(bit | self.rows[pivot]));
        let mut p = out;
        if p.len() < inn.len() + 1 {
            p.resize(inn.len() + 1, 0);
        }
        for (k, c) in inn.into_iter().enumerate() {
            p[k + 1] += c;
        }
        if self.cap > 0 && self.cache.len() < self.cap {
            self.cache.insert(comp, p.clone());
        }
        p
    }
}

fn mul(a: &[u128], b: &[u128]) -> Coeffs {
    let mut out = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Independence polynomial by testing all `2^n` vertex subsets directly
/// against the adjacency relation.
pub fn brute_force_polynomial(g: &Graph) -> Result<IndependencePolynomial> {
    let n = g.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooManyVertices {
            n,
            max: BRUTE_FORCE_LIMIT,
        });
    }
    let edges = g.edges();
    let mut tally = vec![0u64; n + 1];
    for s in 0u32..(1u32 << n) {
        let independent = edges
            .iter()
            .all(|&(u, v)| s >> u & 1 == 0 || s >> v & 1 == 0);
        if independent {
            tally[s.count_ones() as usize] += 1;
        }
    }
    IndependencePolynomial::from_coeffs(tally.into_iter().map(BigUint::from).collect())
}

/// `log Z(λ)`, computed from the exact rational value of `Z(λ)`.
pub fn log_z(p: &IndependencePolynomial, lambda: &Fugacity) -> f64 {
    let ((z, _), den) = p.scaled_sums(lambda);
    // z ≥ den since the constant term is 1 and every term is nonnegative.
    let excess = &z - &den;
    if excess.bits() + 1 < den.bits() {
        // Z - 1 < 1/2: keep the relative precision of the small logarithm.
        ratio_to_f64(&BigInt::from(excess), &den).ln_1p()
    } else {
        ln_ratio(&z, &den)
    }
}

/// Occupancy fraction `λ Z'(λ) / Z(λ)`, the expected size of the hard-core
/// random independent set.
pub fn occupancy_fraction(p: &IndependencePolynomial, lambda: &Fugacity) -> Result<f64> {
    if lambda.is_zero() {
        return Err(Error::InvalidArgument(
            "occupancy fraction requires a positive fugacity".into(),
        ));
    }
    Ok(occupancy_ratio(p, lambda).to_f64_exact())
}

/// The occupancy fraction as an exact rational.
pub fn occupancy_ratio(p: &IndependencePolynomial, lambda: &Fugacity) -> ExactRatio {
    let ((z, dz), _) = p.scaled_sums(lambda);
    ExactRatio { num: dz, den: z }
}

/// A nonnegative rational kept as numerator and denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactRatio {
    pub num: BigUint,
    pub den: BigUint,
}

impl ExactRatio {
    pub fn to_f64_exact(&self) -> f64 {
        ratio_to_f64(&BigInt::from(self.num.clone()), &self.den)
    }
}

/// `α(G)`, the degree of the independence polynomial.
pub fn independence_number(p: &IndependencePolynomial) -> usize {
    p.degree()
}

/// Correctly scaled `num / den` with about 63 significant bits before the
/// final rounding to `f64`.
pub(crate) fn ratio_to_f64(num: &BigInt, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let sign = if num.is_negative() { -1.0 } else { 1.0 };
    let mag = num.magnitude();
    let shift = 65i64 + den.bits() as i64 - mag.bits() as i64;
    let q = if shift >= 0 {
        (mag << shift as u64).div_floor(den)
    } else {
        (mag >> (-shift) as u64).div_floor(den)
    };
    let qf = q.to_f64().expect("quotient fits in f64");
    sign * scale_pow2(qf, -shift)
}

fn scale_pow2(x: f64, mut e: i64) -> f64 {
    let mut x = x;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// `ln(num / den)` for `num >= den > 0`, via a 64-bit mantissa and a binary
/// exponent so that huge ratios neither overflow nor lose relative precision.
fn ln_ratio(num: &BigUint, den: &BigUint) -> f64 {
    let shift = 64i64 + den.bits() as i64 - num.bits() as i64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        (num >> (-shift) as u64) / den
    };
    let k = q.bits() as i64 - 1;
    let mantissa = scale_pow2(q.to_f64().expect("quotient fits in f64"), -k);
    mantissa.ln() + (k - shift) as f64 * std::f64::consts::LN_2
}
