//! Bessel functions of order zero and one, root isolation, and the spectral
//! constants derived from the first zero of `J0`.
//!
//! `J0` and `J1` are evaluated by their power series for `x <= 12` and by the
//! Hankel asymptotic expansion, truncated at its smallest term, beyond that.
//! Both branches stay within `1e-12` absolute of the true value on `[0, 50]`.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

/// Arguments above this value use the asymptotic expansion.
pub const SERIES_SWITCHOVER: f64 = 12.0;

const SERIES_CUTOFF: f64 = 1e-18;
const MAX_SERIES_TERMS: usize = 200;

/// Bisection stops once the bracket is narrower than this.
pub const BRACKET_TOLERANCE: f64 = 1e-13;

const MAX_BISECTIONS: usize = 400;
const SCAN_SUBINTERVALS: usize = 64;
const MAX_NEWTON_STEPS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BesselMethod {
    Series,
    Asymptotic,
}

/// One evaluation of `J0`, tagged with the branch that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselEval {
    pub argument: f64,
    pub value: f64,
    pub method: BesselMethod,
}

/// `j01`, `Λ2 = j01²` and `V0 = j01²/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralConstants {
    /// First positive zero of `J0`.
    pub j01: f64,
    /// First Dirichlet eigenvalue of the Laplacian on the unit disk.
    pub lambda2: f64,
    /// First zero of `r ↦ J0(2√r)`.
    pub v0: f64,
}

fn check_argument(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("Bessel argument must be finite, got {x}")));
    }
    if x < 0.0 {
        return Err(Error::InvalidArgument(format!("Bessel argument must be nonnegative, got {x}")));
    }
    Ok(())
}

/// Unevaluated sum `hi + lo` of two doubles, used to keep the alternating
/// series free of cancellation error near the switchover.
#[derive(Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        Self { hi: s, lo: (a - (s - bb)) + (b - bb) }
    }

    fn normalized(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Self { hi: s, lo: lo - (s - hi) }
    }

    fn add(self, other: Self) -> Self {
        let s = Self::two_sum(self.hi, other.hi);
        Self::normalized(s.hi, s.lo + self.lo + other.lo)
    }

    fn mul(self, other: Self) -> Self {
        let p = self.hi * other.hi;
        let err = self.hi.mul_add(other.hi, -p);
        Self::normalized(p, err + self.hi * other.lo + self.lo * other.hi)
    }

    fn div(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let p = q1 * d;
        let p_err = q1.mul_add(d, -p);
        let r = (self.hi - p) - p_err + self.lo;
        Self::normalized(q1, r / d)
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Power series `Σ (-1)^n (x/2)^(2n+order) / (n! (n+order)!)` for order 0 or 1,
/// summed in double-double arithmetic.
fn series(x: f64, order: u32) -> f64 {
    let xx = DoubleDouble::new(x).mul(DoubleDouble::new(x));
    let minus_q = DoubleDouble { hi: -0.25 * xx.hi, lo: -0.25 * xx.lo };
    let mut term = DoubleDouble::new(if order == 0 { 1.0 } else { 0.5 * x });
    let mut sum = term;
    for n in 1..MAX_SERIES_TERMS {
        let n = n as f64;
        term = term.mul(minus_q).div(n * (n + order as f64));
        sum = sum.add(term);
        if term.hi.abs() < SERIES_CUTOFF {
            break;
        }
    }
    sum.value()
}

/// Hankel expansion `sqrt(2/(πx)) (P cos χ - Q sin χ)` with `χ = x - (2ν+1)π/4`.
fn asymptotic(x: f64, order: u32) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let mut p = 0.0;
    let mut q = 0.0;
    // a_k = Π_{j<=k} (μ - (2j-1)²) / (k! 8^k) x^{-k}
    let mut a = 1.0;
    let mut previous = f64::INFINITY;
    for k in 0..MAX_SERIES_TERMS {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            a *= (mu - odd * odd) / (8.0 * k as f64 * x);
        }
        if a.abs() >= previous || a.abs() < SERIES_CUTOFF {
            break;
        }
        previous = a.abs();
        // even k feed P, odd k feed Q, each with alternating sign (-1)^{floor(k/2)}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
    }
    let chi = x - (2.0 * order as f64 + 1.0) * FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn j0_raw(x: f64) -> (f64, BesselMethod) {
    if x <= SERIES_SWITCHOVER {
        (series(x, 0), BesselMethod::Series)
    } else {
        (asymptotic(x, 0), BesselMethod::Asymptotic)
    }
}

fn j1_raw(x: f64) -> f64 {
    if x <= SERIES_SWITCHOVER {
        series(x, 1)
    } else {
        asymptotic(x, 1)
    }
}

/// `J0(x)` together with the branch used.
pub fn bessel_j0_eval(x: f64) -> Result<BesselEval> {
    check_argument(x)?;
    let (value, method) = j0_raw(x);
    Ok(BesselEval { argument: x, value, method })
}

/// Bessel function of the first kind of order zero, for `x >= 0`.
pub fn bessel_j0(x: f64) -> Result<f64> {
    bessel_j0_eval(x).map(|e| e.value)
}

/// Bessel function of the first kind of order one, for `x >= 0`.
pub fn bessel_j1(x: f64) -> Result<f64> {
    check_argument(x)?;
    Ok(j1_raw(x))
}

/// Evaluate a series branch explicitly, bypassing the switchover.
pub fn bessel_j0_branch(x: f64, method: BesselMethod) -> Result<f64> {
    check_argument(x)?;
    Ok(match method {
        BesselMethod::Series => series(x, 0),
        BesselMethod::Asymptotic => asymptotic(x, 0),
    })
}

/// `V(r) = J0(2√r)`, the radial solution of `(r v')' + v = 0` regular at 0.
pub fn bessel_v(r: f64) -> Result<f64> {
    check_argument(r)?;
    Ok(j0_raw(2.0 * r.sqrt()).0)
}

/// Locate the first sign change of `f` in `[lo, hi]` and bisect it down to a
/// bracket of width at most [`BRACKET_TOLERANCE`].
///
/// The bracket is first scanned on a uniform subdivision so that the
/// leftmost sign change is the one refined. The result is deterministic.
pub fn find_first_zero<F>(f: F, bracket: (f64, f64)) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::InvalidArgument(format!("invalid bracket [{lo}, {hi}]")));
    }
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() && f_hi != 0.0 {
        return Err(Error::Bracketing { lo, hi });
    }

    // leftmost sign change on the scan grid
    let step = (hi - lo) / SCAN_SUBINTERVALS as f64;
    let (mut a, mut fa) = (lo, f_lo);
    let mut b = hi;
    for i in 1..=SCAN_SUBINTERVALS {
        let x = if i == SCAN_SUBINTERVALS { hi } else { lo + step * i as f64 };
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() != fa.signum() {
            b = x;
            break;
        }
        a = x;
        fa = fx;
    }

    let scale = f_lo.abs().max(f_hi.abs());
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (a + b);
        if b - a <= BRACKET_TOLERANCE || mid <= a || mid >= b {
            let fm = f(mid);
            if fm.abs() <= 1e-12 * scale || b - a <= BRACKET_TOLERANCE {
                return Ok(mid);
            }
            return Err(Error::Convergence {
                iterations: MAX_BISECTIONS,
                detail: format!("bracket collapsed at {mid} with residual {fm:e}"),
            });
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Err(Error::Convergence {
        iterations: MAX_BISECTIONS,
        detail: format!("bracket [{a}, {b}] still wider than {BRACKET_TOLERANCE:e}"),
    })
}

/// Up to five Newton steps from `x`, kept only while `|f|` decreases and the
/// iterate stays inside `bracket`.
pub fn newton_polish<F, D>(f: F, df: D, mut x: f64, bracket: (f64, f64)) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut fx = f(x);
    for _ in 0..MAX_NEWTON_STEPS {
        let d = df(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - fx / d;
        if !(bracket.0..=bracket.1).contains(&next) {
            break;
        }
        let f_next = f(next);
        if f_next.abs() >= fx.abs() {
            break;
        }
        x = next;
        fx = f_next;
    }
    x
}

/// First positive zero of `J0`, bisected on `[2, 3]` and Newton-polished with `J0' = -J1`.
pub fn first_zero_j0() -> Result<f64> {
    let bracket = (2.0, 3.0);
    let f = |x: f64| j0_raw(x).0;
    let x = find_first_zero(f, bracket)?;
    Ok(newton_polish(f, |x| -j1_raw(x), x, bracket))
}

/// First zero of `V(r) = J0(2√r)`, found by its own root search on `[1, 2]`.
pub fn first_zero_v() -> Result<f64> {
    let bracket = (1.0, 2.0);
    let f = |r: f64| j0_raw(2.0 * r.sqrt()).0;
    // d/dr J0(2√r) = -J1(2√r)/√r
    let df = |r: f64| -j1_raw(2.0 * r.sqrt()) / r.sqrt();
    let r = find_first_zero(f, bracket)?;
    Ok(newton_polish(f, df, r, bracket))
}

/// The spectral constants, computed once and cached.
pub fn spectral_constants() -> SpectralConstants {
    static CONSTANTS: OnceLock<SpectralConstants> = OnceLock::new();
    *CONSTANTS.get_or_init(|| {
        let j01 = first_zero_j0().expect("J0 changes sign on [2, 3]");
        let lambda2 = j01 * j01;
        SpectralConstants { j01, lambda2, v0: lambda2 / 4.0 }
    })
}
