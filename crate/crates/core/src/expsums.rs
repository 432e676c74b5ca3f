//! Exponential sums over prime fields.
//!
//! Sums are accumulated in double precision with Kahan compensation. Long
//! ranges are cut into fixed-size blocks summed in parallel and combined by
//! a pairwise tree in block order, so results are bit-identical from run to
//! run regardless of thread count.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Poly, PrimeField};

/// Fields up to this size get a precomputed table of roots of unity.
pub const TABLE_LIMIT: u64 = 1 << 20;

const BLOCK: u64 = 1 << 14;

/// `e_p(x) = exp(2 pi i x / p)`.
pub fn additive_char(field: PrimeField, x: u64) -> Complex64 {
    let p = field.modulus();
    Complex64::from_polar(1.0, TAU * (x % p) as f64 / p as f64)
}

/// `e_p` on all of `F_p`, tabulated for small fields.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    field: PrimeField,
    table: Option<Vec<Complex64>>,
}

impl CharacterTable {
    pub fn new(field: PrimeField) -> Self {
        let p = field.modulus();
        let table = (p <= TABLE_LIMIT).then(|| (0..p).map(|x| additive_char(field, x)).collect());
        CharacterTable { field, table }
    }

    #[inline]
    pub fn get(&self, x: u64) -> Complex64 {
        match &self.table {
            Some(t) => t[(x % self.field.modulus()) as usize],
            None => additive_char(self.field, x),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Kahan {
    sum: Complex64,
    comp: Complex64,
}

impl Kahan {
    fn add(&mut self, v: Complex64) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

fn tree_sum(mut parts: Vec<Complex64>) -> Complex64 {
    if parts.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    while parts.len() > 1 {
        parts = parts
            .chunks(2)
            .map(|c| if c.len() == 2 { c[0] + c[1] } else { c[0] })
            .collect();
    }
    parts[0]
}

/// `sum_{x in [lo, hi)} term(x)`, deterministic.
fn sum_range(lo: u64, hi: u64, term: impl Fn(u64) -> Complex64 + Sync) -> Complex64 {
    if hi <= lo {
        return Complex64::new(0.0, 0.0);
    }
    let blocks = (hi - lo).div_ceil(BLOCK);
    let parts: Vec<Complex64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = lo + b * BLOCK;
            let end = (start + BLOCK).min(hi);
            let mut acc = Kahan::default();
            for x in start..end {
                acc.add(term(x));
            }
            acc.sum
        })
        .collect();
    tree_sum(parts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumResult {
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
    pub terms: u64,
}

impl SumResult {
    fn new(z: Complex64, terms: u64) -> Self {
        SumResult {
            re: z.re,
            im: z.im,
            magnitude: z.norm(),
            terms,
        }
    }
}

/// `sum_{x in F_p} e_p(c x)`.
pub fn linear_sum(field: PrimeField, c: u64) -> SumResult {
    let table = CharacterTable::new(field);
    let p = field.modulus();
    SumResult::new(sum_range(0, p, |x| table.get(field.mul(c % p, x))), p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeilReport {
    pub sum: SumResult,
    pub degree: usize,
    /// `(deg f - 1) sqrt(p)`.
    pub bound: f64,
    pub within: bool,
}

/// `sum_{x in F_p} e_p(f(x))` against the bound for the exact degree of `f`.
pub fn weil_sum(f: &Poly) -> Result<WeilReport> {
    let field = f.field();
    let degree = match f.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(Error::ConstantPolynomial),
    };
    let table = CharacterTable::new(field);
    let p = field.modulus();
    let sum = SumResult::new(sum_range(0, p, |x| table.get(f.eval(x))), p);
    let bound = (degree as f64 - 1.0) * (p as f64).sqrt();
    Ok(WeilReport {
        sum,
        degree,
        bound,
        within: sum.magnitude <= bound + 1e-6,
    })
}

/// `sum_{nu = 1}^{len} e_p(a nu^{-1} + b nu)`.
pub fn kloosterman_sum(field: PrimeField, a: u64, b: u64, len: u64) -> Result<SumResult> {
    let p = field.modulus();
    if a.is_multiple_of(p) {
        return Err(Error::ZeroNumerator);
    }
    if len == 0 || len > p - 1 {
        return Err(Error::RangeTooLong { len, max: p - 1 });
    }
    let (a, b) = (a % p, b % p);
    let table = CharacterTable::new(field);
    let z = sum_range(1, len + 1, |nu| {
        let inv = field.inv(nu).expect("nu in [1, p-1]");
        table.get(field.add(field.mul(a, inv), field.mul(b, nu)))
    });
    Ok(SumResult::new(z, len))
}

/// `max_{a != 0} |sum_{nu <= len} e_p(a / nu)|` and the maximizing `a`.
pub fn max_short_kloosterman(field: PrimeField, len: u64) -> Result<(u64, f64)> {
    let p = field.modulus();
    if len == 0 || len > p - 1 {
        return Err(Error::RangeTooLong { len, max: p - 1 });
    }
    let table = CharacterTable::new(field);
    let inverses: Vec<u64> = (1..=len).map(|nu| field.inv(nu).expect("nonzero")).collect();
    let best = (1..p)
        .into_par_iter()
        .map(|a| {
            let mut acc = Kahan::default();
            for &inv in &inverses {
                acc.add(table.get(field.mul(a, inv)));
            }
            (a, acc.sum.norm())
        })
        .reduce(
            || (0, f64::NEG_INFINITY),
            |x, y| {
                if y.1 > x.1 || (y.1 == x.1 && y.0 < x.0) {
                    y
                } else {
                    x
                }
            },
        );
    Ok(best)
}

/// Korolev's bound on short Kloosterman sums, evaluated numerically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KorolevBound {
    #[serde(rename = "D")]
    pub d: f64,
    /// `n * 260 ln D / D`.
    pub bound_plain: f64,
    /// `n * 222 ln D / D^{3/4}`.
    pub bound_twisted: f64,
    /// `exp((ln p)^{2/3} (ln ln p)^{1/3}) <= n <= sqrt p`.
    pub in_range: bool,
    /// Neither bound says anything beyond the trivial `|S| <= n`.
    pub vacuous: bool,
}

impl KorolevBound {
    /// Evaluates from `ln p` and `ln n`, so that astronomically large
    /// parameters can be explored. The two bounds are reported divided by
    /// `n` (as fractions of the trivial bound) when `n` overflows `f64`.
    pub fn from_logs(ln_p: f64, ln_n: f64) -> Self {
        let lnln_p = ln_p.ln();
        let d = ln_n.powf(1.5) / (ln_p * lnln_p * lnln_p);
        let n = ln_n.exp();
        let scale = if n.is_finite() { n } else { 1.0 };
        let ln_d = d.ln();
        let bound_plain = scale * 260.0 * ln_d / d;
        let bound_twisted = scale * 222.0 * ln_d / d.powf(0.75);
        // the lower end of the range, already in log space
        let ln_lower = ln_p.powf(2.0 / 3.0) * lnln_p.cbrt();
        let in_range = ln_lower <= ln_n && ln_n <= 0.5 * ln_p;
        let useless = |b: f64| b <= 0.0 || b >= scale;
        KorolevBound {
            d,
            bound_plain,
            bound_twisted,
            in_range,
            vacuous: ln_d <= 0.0 || useless(bound_plain) || useless(bound_twisted),
        }
    }
}

pub fn korolev_bound(p: u64, n: u64) -> KorolevBound {
    KorolevBound::from_logs((p as f64).ln(), (n as f64).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProgressionCheck {
    pub magnitude: f64,
    /// `n cos(2 pi t / p)`.
    pub lower_bound: f64,
    pub passed: bool,
}

/// `|sum e_p(a_i)|` for integers `a_i` in `[-t, t]` against
/// `n cos(2 pi t / p)`.
pub fn progression_sum_check(a: &[i64], field: PrimeField, t: u64) -> Result<ProgressionCheck> {
    if let Some(&bad) = a.iter().find(|v| v.unsigned_abs() > t) {
        return Err(Error::WindowViolation { value: bad, t });
    }
    let p = field.modulus();
    let mut acc = Kahan::default();
    for &v in a {
        acc.add(additive_char(field, field.reduce_i64(v)));
    }
    let magnitude = acc.sum.norm();
    let lower_bound = a.len() as f64 * (TAU * t as f64 / p as f64).cos();
    Ok(ProgressionCheck {
        magnitude,
        lower_bound,
        passed: magnitude >= lower_bound - 1e-9,
    })
}
