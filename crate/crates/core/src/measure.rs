//! Step profiles on a measure interval `[0, V]` and the rearrangement calculus
//! built on them.
//!
//! A [`StepProfile`] is piecewise constant on consecutive cells. All
//! operations here are finite combinatorics on `(value, width)` pairs, so
//! rearrangements are exact and cumulative integrals are piecewise linear.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for `Σ widths = total_measure`.
const WIDTH_SUM_TOL: f64 = 1e-12;
/// Relative tolerance for equality of integrals.
pub const INTEGRAL_TOL: f64 = 1e-10;

/// A piecewise-constant function on `[0, total_measure]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepProfile {
    total_measure: f64,
    widths: Vec<f64>,
    values: Vec<f64>,
}

/// Exponent pair `(r, s)` of the Lorentz space `L(r, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzIndex {
    r: f64,
    s: f64,
}

impl LorentzIndex {
    pub fn new(r: f64, s: f64) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(r) || !ok(s) {
            return Err(Error::InvalidArgument(format!(
                "Lorentz exponents must be finite and positive, got ({r}, {s})"
            )));
        }
        Ok(Self { r, s })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

impl StepProfile {
    pub fn new(widths: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let total: f64 = widths.iter().sum();
        Self::with_total(total, widths, values)
    }

    /// Build a profile and check that the widths add up to `total_measure`.
    pub fn with_total(total_measure: f64, widths: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if widths.is_empty() || widths.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "need matching nonempty widths and values, got {} and {}",
                widths.len(),
                values.len()
            )));
        }
        if !(total_measure.is_finite() && total_measure > 0.0) {
            return Err(Error::InvalidArgument(format!("total measure must be positive, got {total_measure}")));
        }
        if let Some(w) = widths.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidArgument(format!("cell widths must be positive, got {w}")));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("cell values must be finite, got {v}")));
        }
        let sum: f64 = widths.iter().sum();
        if ((sum - total_measure) / total_measure).abs() > WIDTH_SUM_TOL {
            return Err(Error::InvalidArgument(format!(
                "widths sum to {sum}, expected {total_measure}"
            )));
        }
        Ok(Self { total_measure, widths, values })
    }

    /// `n` equal cells covering `[0, total_measure]`.
    pub fn uniform(total_measure: f64, values: Vec<f64>) -> Result<Self> {
        let n = values.len().max(1);
        Self::with_total(total_measure, vec![total_measure / n as f64; values.len()], values)
    }

    pub fn total_measure(&self) -> f64 {
        self.total_measure
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Cell boundaries `0 = s_0 < s_1 < ... < s_n = total_measure`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len() + 1);
        let mut s = 0.0;
        out.push(s);
        for w in &self.widths[..self.len() - 1] {
            s += w;
            out.push(s);
        }
        out.push(self.total_measure);
        out
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().zip(&self.widths).map(|(v, w)| v * w).sum()
    }

    /// `Σ |value|^p · width`.
    pub fn power_sum(&self, p: f64) -> f64 {
        self.values.iter().zip(&self.widths).map(|(v, w)| v.abs().powf(p) * w).sum()
    }

    pub fn is_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }

    /// Measure of the superlevel set `{f > t}`.
    pub fn distribution(&self, t: f64) -> f64 {
        self.values.iter().zip(&self.widths).filter(|(v, _)| **v > t).map(|(_, w)| w).sum()
    }

    /// Restrict to a finer partition given by strictly increasing breakpoints
    /// that contain the current ones.
    pub fn refine(&self, breaks: &[f64]) -> Result<StepProfile> {
        let own = self.breakpoints();
        let tol = WIDTH_SUM_TOL * self.total_measure;
        let mut widths = Vec::with_capacity(breaks.len());
        let mut values = Vec::with_capacity(breaks.len());
        let mut cell = 0;
        for pair in breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            while cell + 1 < self.len() && own[cell + 1] <= a + tol {
                cell += 1;
            }
            if b > own[cell + 1] + tol {
                return Err(Error::DomainMismatch(format!(
                    "breakpoint list does not refine the profile near {b}"
                )));
            }
            widths.push(b - a);
            values.push(self.values[cell]);
        }
        Self::with_total(self.total_measure, widths, values)
    }

    /// Mean of the profile over `[a, b]`.
    pub fn mean_on(&self, a: f64, b: f64) -> f64 {
        let mut acc = 0.0;
        let mut lo = 0.0;
        for (v, w) in self.values.iter().zip(&self.widths) {
            let hi = lo + w;
            let overlap = hi.min(b) - lo.max(a);
            if overlap > 0.0 {
                acc += v * overlap;
            }
            lo = hi;
        }
        acc / (b - a)
    }
}

fn check_same_measure(f: &StepProfile, g: &StepProfile) -> Result<()> {
    let (a, b) = (f.total_measure, g.total_measure);
    if ((a - b) / a.max(b)).abs() > WIDTH_SUM_TOL {
        return Err(Error::DomainMismatch(format!("total measures differ: {a} vs {b}")));
    }
    Ok(())
}

/// Union of two breakpoint lists, merging points closer than the width tolerance.
fn merged_breakpoints(f: &StepProfile, g: &StepProfile) -> Vec<f64> {
    let total = f.total_measure;
    let tol = WIDTH_SUM_TOL * total;
    let mut pts: Vec<f64> = f.breakpoints().into_iter().chain(g.breakpoints()).collect();
    pts.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for p in pts {
        match out.last() {
            Some(&last) if p - last <= tol => {}
            _ => out.push(p),
        }
    }
    // pin both ends exactly
    out[0] = 0.0;
    let last = out.len() - 1;
    out[last] = total;
    out
}

/// Refine two profiles onto their common partition.
pub fn common_refinement(f: &StepProfile, g: &StepProfile) -> Result<(StepProfile, StepProfile)> {
    check_same_measure(f, g)?;
    let breaks = merged_breakpoints(f, g);
    Ok((f.refine(&breaks)?, g.refine(&breaks)?))
}

/// The decreasing rearrangement `f*`: the same `(value, width)` pairs sorted
/// by value, largest first. Ties keep their original order.
pub fn decreasing_rearrangement(f: &StepProfile) -> StepProfile {
    let mut pairs: Vec<(f64, f64)> = f.values.iter().copied().zip(f.widths.iter().copied()).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (values, widths) = pairs.into_iter().unzip();
    StepProfile { total_measure: f.total_measure, widths, values }
}

/// `∫_0^s f` for every breakpoint `s` in `points` (sorted ascending).
fn cumulative_at(f: &StepProfile, points: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(points.len());
    let mut cell = 0;
    let mut lo = 0.0;
    let mut acc = 0.0;
    for &s in points {
        while cell < f.len() && lo + f.widths[cell] <= s {
            acc += f.values[cell] * f.widths[cell];
            lo += f.widths[cell];
            cell += 1;
        }
        let partial = if cell < f.len() { f.values[cell] * (s - lo).max(0.0) } else { 0.0 };
        out.push(acc + partial);
    }
    out
}

/// Dominance `f ≺ g`: every partial integral of `f*` is bounded by that of `g*`
/// and the total integrals agree.
///
/// Cumulative integrals of step functions are piecewise linear, so checking at
/// the merged breakpoints is exact.
pub fn dominates(f: &StepProfile, g: &StepProfile) -> Result<bool> {
    check_same_measure(f, g)?;
    let fs = decreasing_rearrangement(f);
    let gs = decreasing_rearrangement(g);
    let points = merged_breakpoints(&fs, &gs);
    let cf = cumulative_at(&fs, &points);
    let cg = cumulative_at(&gs, &points);
    let scale = cf.iter().chain(&cg).fold(0.0_f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let tol = INTEGRAL_TOL * scale;
    let partial_ok = cf.iter().zip(&cg).all(|(a, b)| *a <= *b + tol);
    let (tf, tg) = (f.integral(), g.integral());
    let total_ok = (tf - tg).abs() <= INTEGRAL_TOL * tf.abs().max(tg.abs()).max(f64::MIN_POSITIVE);
    Ok(partial_ok && total_ok)
}

/// `∫ f* g*`, the Hardy–Littlewood upper bound for `∫ f g`.
pub fn hardy_littlewood_bound(f: &StepProfile, g: &StepProfile) -> Result<f64> {
    check_same_measure(f, g)?;
    let (fs, gs) = common_refinement(&decreasing_rearrangement(f), &decreasing_rearrangement(g))?;
    Ok(fs.values.iter().zip(&gs.values).zip(&fs.widths).map(|((a, b), w)| a * b * w).sum())
}

/// `∫ f g` on the common refinement.
pub fn pairing(f: &StepProfile, g: &StepProfile) -> Result<f64> {
    let (fr, gr) = common_refinement(f, g)?;
    Ok(fr.values.iter().zip(&gr.values).zip(&fr.widths).map(|((a, b), w)| a * b * w).sum())
}

/// Rearrange the decreasing profile `f0` along the level order of `psi`.
///
/// The cells of `psi` are ranked by value (largest first, ties by index) and
/// laid end to end; the cell of rank `k` receives the stretch of `f0` that
/// occupies the same position in `[0, V]`. With equal widths this places the
/// `k`-th largest value of `f0` on the cell holding the `k`-th largest value
/// of `psi`. When a stretch crosses a breakpoint of `f0` the cell is split,
/// so the output is always exactly equimeasurable with `f0` and
/// `∫ f̄ ψ = ∫ f0 ψ*`.
pub fn pseudo_rearrangement(f0: &StepProfile, psi: &StepProfile) -> Result<StepProfile> {
    if !f0.is_decreasing() {
        return Err(Error::Precondition("pseudo-rearrangement needs a decreasing f0".into()));
    }
    if let Some(out) = permute_on_uniform_cells(f0, psi)? {
        return Ok(out);
    }
    let (f0, psi) = common_refinement(f0, psi)?;
    let total = f0.total_measure;
    let tol = WIDTH_SUM_TOL * total;

    let mut order: Vec<usize> = (0..psi.len()).collect();
    order.sort_by(|&i, &j| psi.values[j].total_cmp(&psi.values[i]).then(i.cmp(&j)));

    let f0_breaks = f0.breakpoints();
    // pieces[i] collects the (value, width) pieces assigned to psi cell i
    let mut pieces: Vec<Vec<(f64, f64)>> = vec![Vec::new(); psi.len()];
    let mut position = 0.0;
    let mut cell = 0;
    for &i in &order {
        let end = position + psi.widths[i];
        let mut a = position;
        while a < end - tol {
            while cell + 1 < f0.len() && f0_breaks[cell + 1] <= a + tol {
                cell += 1;
            }
            let b = if cell + 1 < f0.len() { f0_breaks[cell + 1].min(end) } else { end };
            pieces[i].push((f0.values[cell], b - a));
            a = b;
        }
        // absorb float drift into the last piece so widths match psi exactly
        let assigned: f64 = pieces[i].iter().map(|p| p.1).sum();
        if let Some(last) = pieces[i].last_mut() {
            last.1 += psi.widths[i] - assigned;
        }
        position = end;
    }

    let (values, widths): (Vec<f64>, Vec<f64>) = pieces.into_iter().flatten().filter(|p| p.1 > 0.0).unzip();
    StepProfile::with_total(total, widths, values)
}

/// When `f0` and `psi` both sit on the same equal-width cells the placement is
/// a permutation of `f0`'s cells; doing it directly keeps `f0`'s widths
/// bit for bit instead of rebuilding them from breakpoints.
fn permute_on_uniform_cells(f0: &StepProfile, psi: &StepProfile) -> Result<Option<StepProfile>> {
    check_same_measure(f0, psi)?;
    let n = f0.len();
    if psi.len() != n {
        return Ok(None);
    }
    let tol = WIDTH_SUM_TOL * f0.total_measure;
    let w = f0.total_measure / n as f64;
    if f0.widths.iter().chain(&psi.widths).any(|x| (x - w).abs() > tol) {
        return Ok(None);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| psi.values[j].total_cmp(&psi.values[i]).then(i.cmp(&j)));
    let mut values = vec![0.0; n];
    let mut widths = vec![0.0; n];
    for (rank, &i) in order.iter().enumerate() {
        values[i] = f0.values[rank];
        widths[i] = f0.widths[rank];
    }
    Ok(Some(StepProfile::with_total(f0.total_measure, widths, values)?))
}

/// Lorentz quasi-norm `‖u‖_{r,s}` of a decreasing profile in measure coordinates.
///
/// Substituting `t = ω_N |x|^N` in the radial definition turns
/// `ω_N^{1/r-1/s} (∫ [u#(x)|x|^{N/r}]^s dx/|x|^N)^{1/s}` into
/// `(∫_0^V [t^{1/r} u*(t)]^s dt/t)^{1/s}`; the powers of `ω_N` cancel, so `dim`
/// only enters through its validity check. On a step profile each cell
/// contributes `|u_k|^s (r/s)(b^{s/r} - a^{s/r})` exactly.
pub fn lorentz_norm(u_star: &StepProfile, idx: LorentzIndex, dim: u32) -> Result<f64> {
    if dim < 3 {
        return Err(Error::InvalidArgument(format!("dimension must be at least 3, got {dim}")));
    }
    if !u_star.is_decreasing() {
        return Err(Error::Precondition("Lorentz norm expects a decreasing rearrangement".into()));
    }
    Ok(lorentz_norm_unchecked(u_star, idx))
}

pub(crate) fn lorentz_norm_unchecked(u_star: &StepProfile, idx: LorentzIndex) -> f64 {
    let e = idx.s / idx.r;
    let mut acc = 0.0;
    let mut a: f64 = 0.0;
    for (v, w) in u_star.values.iter().zip(&u_star.widths) {
        let b = a + w;
        if *v != 0.0 {
            acc += v.abs().powf(idx.s) * (b.powf(e) - a.powf(e)) / e;
        }
        a = b;
    }
    acc.powf(1.0 / idx.s)
}
