//! Closed-form sharp constants.
//!
//! Each function evaluates one printed formula. Where two printed forms of
//! the same constant disagree, both are exposed and [`crate::varmin`]
//! decides between them numerically.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::radial::Domain;
use crate::special::spectral_constants;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantId {
    Hardy,
    BrezisVazquez,
    /// Remainder `‖u‖²_{2N/(N-1),2}`.
    Thm1,
    /// Same inequality with remainder `∫ u²/|x| dx`.
    Thm1Weighted,
    Thm2,
    /// `(1/(4|Ω|)) (N/(N-1))²`.
    Thm4Text,
    /// `(1/(4 ω_N |Ω|)) (N/(N-1))²`.
    Thm4Stmt,
    Thm5,
    PropLog,
}

impl ConstantId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConstantId::Hardy => "hardy",
            ConstantId::BrezisVazquez => "brezis_vazquez",
            ConstantId::Thm1 => "thm1",
            ConstantId::Thm1Weighted => "thm1_weighted",
            ConstantId::Thm2 => "thm2",
            ConstantId::Thm4Text => "thm4_text",
            ConstantId::Thm4Stmt => "thm4_stmt",
            ConstantId::Thm5 => "thm5",
            ConstantId::PropLog => "prop_log",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantParams {
    pub dim: u32,
    pub volume: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantRecord {
    pub id: ConstantId,
    pub params: ConstantParams,
    pub value: f64,
    pub formula_text: String,
}

/// `(N-2)²/4`.
pub fn hardy_constant(dim: u32) -> Result<f64> {
    if dim < 3 {
        return Err(Error::InvalidArgument(format!("Hardy constant needs N >= 3, got {dim}")));
    }
    let k = (dim as f64 - 2.0) / 2.0;
    Ok(k * k)
}

/// `ω_N^{2/N} |Ω|^{-1/N} V0`: best constant for the remainder `‖u‖²_{2N/(N-1),2}`.
pub fn thm1_constant(dom: &Domain) -> f64 {
    let n = dom.n();
    dom.omega_n.powf(2.0 / n) / dom.volume.powf(1.0 / n) * spectral_constants().v0
}

/// `(ω_N/|Ω|)^{1/N} V0 = V0/R_Ω`: best constant for the remainder `∫ u²/|x|`.
///
/// Since `‖u‖²_{2N/(N-1),2} = ω_N^{-1/N} ∫ u²/|x|` for radial decreasing `u`,
/// this equals `ω_N^{-1/N}` times [`thm1_constant`].
pub fn thm1_weighted_constant(dom: &Domain) -> f64 {
    (dom.omega_n / dom.volume).powf(1.0 / dom.n()) * spectral_constants().v0
}

/// `a = N/p - N/2 + 1`, the exponent of the planar minimizer `R^a - r^a`.
pub fn linear_exponent(dim: u32, p: f64) -> f64 {
    let n = dim as f64;
    n / p - n / 2.0 + 1.0
}

fn check_thm2_range(dim: u32, p: f64) -> Result<()> {
    let crit = 2.0 * dim as f64 / (dim as f64 - 2.0);
    if !(p.is_finite() && (1.0..crit).contains(&p)) {
        return Err(Error::InvalidArgument(format!(
            "p = {p} outside [1, {crit}) = [1, 2N/(N-2)) for N = {dim}"
        )));
    }
    Ok(())
}

/// `2a³ ω_N^{2/N} / (N |Ω|^{2a/N})` with `a = N/p - N/2 + 1`, for `1 <= p < 2*`.
pub fn thm2_constant(dom: &Domain, p: f64) -> Result<f64> {
    check_thm2_range(dom.dim, p)?;
    let n = dom.n();
    let a = linear_exponent(dom.dim, p);
    Ok(2.0 * a.powi(3) / (n * dom.volume.powf(2.0 * a / n)) * dom.omega_n.powf(2.0 / n))
}

/// Both printed values of the gradient-`L¹` constant: `(text, statement)`.
/// Their ratio is `ω_N`.
pub fn thm4_constants(dom: &Domain) -> (f64, f64) {
    let n = dom.n();
    let text = (n / (n - 1.0)).powi(2) / (4.0 * dom.volume);
    (text, text / dom.omega_n)
}

/// Open interval `(max{2N/(3N-2), N/(N+1)}, 1)` of admissible `p`, with the
/// lower endpoint as a reduced fraction.
pub fn thm5_range(dim: u32) -> (f64, String) {
    let n = dim as u64;
    let (a_num, a_den) = (2 * n, 3 * n - 2);
    let (b_num, b_den) = (n, n + 1);
    // compare a_num/a_den with b_num/b_den
    let (num, den) = if a_num * b_den >= b_num * a_den { (a_num, a_den) } else { (b_num, b_den) };
    let g = gcd(num, den);
    (num as f64 / den as f64, format!("{}/{}", num / g, den / g))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `α = N/p - N`, so that `‖|∇u|‖_{p,1}` is a weighted `L¹` norm with weight `|x|^α`.
pub fn thm5_alpha(dim: u32, p: f64) -> f64 {
    dim as f64 / p - dim as f64
}

pub fn check_thm5_range(dim: u32, p: f64) -> Result<()> {
    let (lo, lo_text) = thm5_range(dim);
    if !(p.is_finite() && p > lo && p < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "p = {p} outside the open interval ({lo_text}, 1) = (max{{2N/(3N-2), N/(N+1)}}, 1) for N = {dim}"
        )));
    }
    Ok(())
}

/// `((2-p)/p)³ / (4 |Ω|^{2/p-1}) · (Np/(N-p))²`.
pub fn thm5_constant(dom: &Domain, p: f64) -> Result<f64> {
    check_thm5_range(dom.dim, p)?;
    Ok(thm5_formula(dom, p))
}

pub(crate) fn thm5_formula(dom: &Domain, p: f64) -> f64 {
    let n = dom.n();
    ((2.0 - p) / p).powi(3) / (4.0 * dom.volume.powf(2.0 / p - 1.0)) * (n * p / (n - p)).powi(2)
}

/// `Λ2 / R_Ω²`.
pub fn brezis_vazquez(dom: &Domain) -> f64 {
    spectral_constants().lambda2 / (dom.radius * dom.radius)
}

/// Coefficient of the logarithmic remainder, valid when `|Ω| = ω_N/e^N`.
pub const PROP_LOG_CONSTANT: f64 = 0.25;

/// Every constant that applies to `dom` and the optional exponents.
///
/// `p` selects the Lorentz-`L(p,1)` constant when `1 <= p < 2*` and the
/// gradient-`L(p,1)` constant when `p` lies in its open interval below 1.
/// A `p` admissible for neither is an error naming both ranges.
pub fn records(dom: &Domain, p: Option<f64>, q: Option<f64>) -> Result<Vec<ConstantRecord>> {
    let base = ConstantParams { dim: dom.dim, volume: dom.volume, p: None, alpha: None, q: None };
    let mut out = vec![
        ConstantRecord {
            id: ConstantId::Hardy,
            params: base,
            value: hardy_constant(dom.dim)?,
            formula_text: "(N-2)^2/4".into(),
        },
        ConstantRecord {
            id: ConstantId::BrezisVazquez,
            params: base,
            value: brezis_vazquez(dom),
            formula_text: "Lambda_2/R_Omega^2, Lambda_2 = j01^2".into(),
        },
        ConstantRecord {
            id: ConstantId::Thm1,
            params: base,
            value: thm1_constant(dom),
            formula_text: "omega_N^(2/N)/|Omega|^(1/N) * V0".into(),
        },
        ConstantRecord {
            id: ConstantId::Thm1Weighted,
            params: base,
            value: thm1_weighted_constant(dom),
            formula_text: "(omega_N/|Omega|)^(1/N) * V0".into(),
        },
    ];

    let q1 = ConstantParams { q: Some(q.unwrap_or(1.0)), ..base };
    if q.map_or(true, |q| q == 1.0) {
        let (text, stmt) = thm4_constants(dom);
        out.push(ConstantRecord {
            id: ConstantId::Thm4Text,
            params: q1,
            value: text,
            formula_text: "(1/(4|Omega|)) * (N/(N-1))^2".into(),
        });
        out.push(ConstantRecord {
            id: ConstantId::Thm4Stmt,
            params: q1,
            value: stmt,
            formula_text: "(1/(4 omega_N |Omega|)) * (N/(N-1))^2".into(),
        });
    }

    match p {
        None => {
            let p = dom.n() / (dom.n() - 1.0);
            out.push(thm2_record(dom, p)?);
        }
        Some(p) => {
            let thm2 = thm2_constant(dom, p);
            let thm5 = thm5_constant(dom, p);
            match (thm2, thm5) {
                (Err(e2), Err(e5)) => {
                    return Err(Error::InvalidArgument(format!("{e2}; {e5}")));
                }
                (Ok(_), _) => out.push(thm2_record(dom, p)?),
                (_, Ok(value)) => out.push(ConstantRecord {
                    id: ConstantId::Thm5,
                    params: ConstantParams { p: Some(p), alpha: Some(thm5_alpha(dom.dim, p)), q: Some(1.0), ..base },
                    value,
                    formula_text: "((2-p)/p)^3 / (4 |Omega|^(2/p-1)) * (N p/(N-p))^2".into(),
                }),
            }
        }
    }

    let log_dom = Domain::new(dom.dim, dom.omega_n / std::f64::consts::E.powi(dom.dim as i32))?;
    out.push(ConstantRecord {
        id: ConstantId::PropLog,
        params: ConstantParams { volume: log_dom.volume, ..base },
        value: PROP_LOG_CONSTANT,
        formula_text: "1/4, weight 1/(|x| log|x|)^2 on |Omega| = omega_N/e^N".into(),
    });
    Ok(out)
}

fn thm2_record(dom: &Domain, p: f64) -> Result<ConstantRecord> {
    Ok(ConstantRecord {
        id: ConstantId::Thm2,
        params: ConstantParams { dim: dom.dim, volume: dom.volume, p: Some(p), alpha: None, q: None },
        value: thm2_constant(dom, p)?,
        formula_text: "2a^3 omega_N^(2/N) / (N |Omega|^(2a/N)), a = N/p - N/2 + 1".into(),
    })
}
