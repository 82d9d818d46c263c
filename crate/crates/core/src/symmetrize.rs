//! Gradient-preserving symmetrization in measure coordinates.
//!
//! Input is a [`FieldSample`]: values of `u` and of `|∇u|` on `n` cells of
//! equal measure. The pipeline builds
//!
//! 1. `f0 = |∇u|*`,
//! 2. `F`, the gradient mass accumulated along the superlevel sets of `u`,
//! 3. the radial potential `g(s) = (N ω_N^{1/N})^{-1} ∫_s^V F(t) t^{1/N-1} dt`,
//! 4. the norming density `φ` of `g` in the dual Lorentz space and its
//!    averaged primitive `ψ`,
//! 5. `f̄`, the rearrangement of `f0` along the level order of `ψ`, and the
//!    symmetrized function `ū`, the potential of `f̄`.
//!
//! Potentials are handled in the variable `x = s^{1/N}` (proportional to the
//! radius), where every quantity is a polynomial on each cell and all the
//! Lorentz norms and pairings below are exact.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{
    self, decreasing_rearrangement, dominates, lorentz_norm_unchecked, pseudo_rearrangement, LorentzIndex, StepProfile,
};
use crate::radial::{Domain, RadialProfile};
use crate::report::VerificationReport;

/// Relative tolerance on the norming property of the explicit dual density.
pub const NORMING_TOL: f64 = 1e-4;
/// Relative tolerance on the two routes to `∫ f̄ ψ`.
pub const PAIRING_TOL: f64 = 1e-6;
/// Relative tolerance (times `max u`) on `u* <= g` for radial samples.
pub const MAJORIZATION_TOL: f64 = 1e-6;
const VOLUME_TOL: f64 = 1e-12;

/// `u` and `|∇u|` on `n` cells of measure `total_measure / n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub total_measure: f64,
    pub n: usize,
    pub u: Vec<f64>,
    pub grad: Vec<f64>,
}

impl FieldSample {
    pub fn new(total_measure: f64, u: Vec<f64>, grad: Vec<f64>) -> Result<Self> {
        let field = Self { total_measure, n: u.len(), u, grad };
        field.validate()?;
        Ok(field)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.total_measure.is_finite() && self.total_measure > 0.0) {
            return Err(Error::InvalidArgument(format!("total_measure must be positive, got {}", self.total_measure)));
        }
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 cells, got {}", self.n)));
        }
        if self.u.len() != self.n || self.grad.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "n = {} but u has {} and grad has {} entries",
                self.n,
                self.u.len(),
                self.grad.len()
            )));
        }
        if self.u.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidArgument("u values must be finite and nonnegative".into()));
        }
        if self.grad.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidArgument("grad values must be finite and nonnegative".into()));
        }
        Ok(())
    }

    fn check_domain(&self, dom: &Domain) -> Result<()> {
        self.validate()?;
        if (self.total_measure - dom.volume).abs() > VOLUME_TOL * dom.volume {
            return Err(Error::DomainMismatch(format!(
                "field has total measure {} but the domain has volume {}",
                self.total_measure, dom.volume
            )));
        }
        Ok(())
    }

    pub fn u_profile(&self) -> Result<StepProfile> {
        StepProfile::uniform(self.total_measure, self.u.clone())
    }

    pub fn grad_profile(&self) -> Result<StepProfile> {
        StepProfile::uniform(self.total_measure, self.grad.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.u.iter().chain(&self.grad).all(|v| *v == 0.0)
    }

    /// Sample a radial `U` with `U(R) = 0` on the shells of equal measure:
    /// each cell carries `U` at its outer radius and the slope of the chord.
    pub fn from_radial<F: Fn(f64) -> f64>(profile: F, dom: &Domain, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 cells, got {n}")));
        }
        let radii = shell_radii(dom, n);
        let mut u = Vec::with_capacity(n);
        let mut grad = Vec::with_capacity(n);
        for k in 0..n {
            let (a, b) = (radii[k], radii[k + 1]);
            let outer = if k + 1 == n { 0.0 } else { profile(b) };
            u.push(outer);
            grad.push(((profile(a) - outer) / (b - a)).abs());
        }
        Self::new(dom.volume, u, grad)
    }

    /// A random field for which `u* <= g` holds: gradient values are random,
    /// `u` is constant on random tie blocks, each drop of `u` between blocks
    /// is at most the potential increment of the next block, and the cells
    /// are shuffled at the end.
    pub fn random_admissible<R: Rng>(rng: &mut R, dom: &Domain, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 cells, got {n}")));
        }
        let x = cell_nodes(dom.volume, n, dom.dim);
        let grad: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..2.0)).collect();
        let mut blocks = Vec::new();
        let mut start = 0;
        while start < n {
            let len = if rng.gen_bool(0.2) { rng.gen_range(2..=4) } else { 1 };
            let end = (start + len).min(n);
            blocks.push(start..end);
            start = end;
        }
        let scale = dom.omega_n.powf(-1.0 / dom.n());
        let mut u = vec![0.0; n];
        let mut level = 0.0;
        for b in (0..blocks.len()).rev() {
            if b + 1 < blocks.len() {
                let next = blocks[b + 1].clone();
                let mean = next.clone().map(|j| grad[j]).sum::<f64>() / next.len() as f64;
                let budget = scale * mean * (x[next.end] - x[next.start]);
                level += budget / rng.gen_range(1.0..3.0);
            }
            for j in blocks[b].clone() {
                u[j] = level;
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let u = order.iter().map(|&i| u[i]).collect();
        let grad = order.iter().map(|&i| grad[i]).collect();
        Self::new(dom.volume, u, grad)
    }
}

/// `x_k = s_k^{1/N}` at the breakpoints of `n` equal cells.
fn cell_nodes(volume: f64, n: usize, dim: u32) -> Vec<f64> {
    (0..=n).map(|k| (volume * k as f64 / n as f64).powf(1.0 / dim as f64)).collect()
}

/// Radii of the balls of measure `k V / n`.
fn shell_radii(dom: &Domain, n: usize) -> Vec<f64> {
    let scale = dom.omega_n.powf(-1.0 / dom.n());
    cell_nodes(dom.volume, n, dom.dim).into_iter().map(|x| x * scale).collect()
}

fn lorentz_index(dom: &Domain) -> LorentzIndex {
    LorentzIndex::new(dom.crit_exp, 2.0).expect("critical exponent is positive")
}

fn dual_index(dom: &Domain) -> LorentzIndex {
    let n = dom.n();
    LorentzIndex::new(2.0 * n / (n + 2.0), 2.0).expect("dual exponent is positive")
}

/// `∫_a^b x^p dx` for `p >= 0`.
fn monomial(a: f64, b: f64, p: i32) -> f64 {
    (b.powi(p + 1) - a.powi(p + 1)) / (p + 1) as f64
}

fn gauss8<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    const X: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
    const W: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    X.iter().zip(W).map(|(x, w)| w * (f(m - h * x) + f(m + h * x))).sum::<f64>() * h
}

/// `g(s) = (N ω_N^{1/N})^{-1} ∫_s^V f(t) t^{1/N-1} dt` for a nonnegative step `f`.
///
/// On cell `k` this is `g = A_k - B_k x` with `x = s^{1/N}` and
/// `B_k = f_k ω_N^{-1/N}`; in the radius `r = x ω_N^{-1/N}` it is piecewise
/// linear with slope `-f_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Potential {
    dim: u32,
    omega_n: f64,
    total_measure: f64,
    /// `x_k = s_k^{1/N}` at the cell breakpoints.
    nodes: Vec<f64>,
    slopes: Vec<f64>,
    /// `g(s_k)`; the last entry is 0.
    node_values: Vec<f64>,
}

impl Potential {
    pub fn from_density(f: &StepProfile, dom: &Domain) -> Result<Self> {
        if (f.total_measure() - dom.volume).abs() > VOLUME_TOL * dom.volume {
            return Err(Error::DomainMismatch(format!(
                "density lives on [0, {}] but the domain has volume {}",
                f.total_measure(),
                dom.volume
            )));
        }
        if f.values().iter().any(|v| *v < 0.0) {
            return Err(Error::Precondition("potential needs a nonnegative density".into()));
        }
        let inv_n = 1.0 / dom.n();
        let nodes: Vec<f64> = f.breakpoints().into_iter().map(|s| s.powf(inv_n)).collect();
        let scale = dom.omega_n.powf(-inv_n);
        let slopes: Vec<f64> = f.values().iter().map(|v| v * scale).collect();
        let m = slopes.len();
        let mut node_values = vec![0.0; m + 1];
        for k in (0..m).rev() {
            node_values[k] = node_values[k + 1] + slopes[k] * (nodes[k + 1] - nodes[k]);
        }
        Ok(Self { dim: dom.dim, omega_n: dom.omega_n, total_measure: f.total_measure(), nodes, slopes, node_values })
    }

    pub fn len(&self) -> usize {
        self.slopes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slopes.is_empty()
    }

    pub fn node_values(&self) -> &[f64] {
        &self.node_values
    }

    pub fn measure_breakpoints(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.nodes.iter().map(|x| x.powi(self.dim as i32)).collect();
        *s.last_mut().unwrap() = self.total_measure;
        s
    }

    pub fn is_zero(&self) -> bool {
        self.node_values[0] == 0.0
    }

    fn offset(&self, k: usize) -> f64 {
        self.node_values[k + 1] + self.slopes[k] * self.nodes[k + 1]
    }

    fn cell_of(&self, x: f64) -> usize {
        self.nodes[1..].partition_point(|&b| b < x).min(self.len() - 1)
    }

    pub fn value(&self, s: f64) -> f64 {
        let x = s.clamp(0.0, self.total_measure).powf(1.0 / self.dim as f64);
        let k = self.cell_of(x);
        self.offset(k) - self.slopes[k] * x
    }

    /// Cell averages in measure coordinates.
    pub fn step_means(&self) -> Result<StepProfile> {
        let s = self.measure_breakpoints();
        let n = self.dim as i32;
        let widths: Vec<f64> = s.windows(2).map(|w| w[1] - w[0]).collect();
        let values = (0..self.len())
            .map(|k| {
                let (a, b) = (self.nodes[k], self.nodes[k + 1]);
                let integral =
                    n as f64 * (self.offset(k) * monomial(a, b, n - 1) - self.slopes[k] * monomial(a, b, n));
                integral / widths[k]
            })
            .collect();
        StepProfile::with_total(self.total_measure, widths, values)
    }

    /// The potential as a function of the radius; exact under linear interpolation.
    pub fn radial_profile(&self) -> Result<RadialProfile> {
        let scale = self.omega_n.powf(-1.0 / self.dim as f64);
        let grid = self.nodes.iter().map(|x| x * scale).collect();
        RadialProfile::new(grid, self.node_values.clone(), true)
    }

    /// Merged `x` breakpoints of two potentials on the same interval.
    fn merged_nodes(&self, other: &Potential) -> Vec<f64> {
        let tol = 1e-14 * self.nodes.last().unwrap();
        let mut all: Vec<f64> = self.nodes.iter().chain(&other.nodes).copied().collect();
        all.sort_by(f64::total_cmp);
        all.dedup_by(|b, a| (*b - *a).abs() <= tol);
        all
    }

    /// `∫_0^V g h s^{-2/N} ds`, exact.
    pub fn weighted_pairing(&self, other: &Potential) -> f64 {
        let n = self.dim as i32;
        let nodes = self.merged_nodes(other);
        nodes
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let mid = 0.5 * (a + b);
                let (i, j) = (self.cell_of(mid), other.cell_of(mid));
                let (a1, b1) = (self.offset(i), self.slopes[i]);
                let (a2, b2) = (other.offset(j), other.slopes[j]);
                a1 * a2 * monomial(a, b, n - 3) - (a1 * b2 + a2 * b1) * monomial(a, b, n - 2)
                    + b1 * b2 * monomial(a, b, n - 1)
            })
            .sum::<f64>()
            * n as f64
    }

    /// `‖g‖_{2*,2} = (∫ g² s^{-2/N} ds)^{1/2}`; `g` is decreasing so `g* = g`.
    pub fn lorentz_norm(&self) -> f64 {
        self.weighted_pairing(self).max(0.0).sqrt()
    }

    /// `∫ φ g ds` for a step `φ` on the same interval, exact.
    pub fn step_pairing(&self, phi: &StepProfile) -> f64 {
        let n = self.dim as i32;
        let inv_n = 1.0 / self.dim as f64;
        let phi_nodes: Vec<f64> = phi.breakpoints().into_iter().map(|s| s.powf(inv_n)).collect();
        let mut all: Vec<f64> = self.nodes.iter().chain(&phi_nodes).copied().collect();
        all.sort_by(f64::total_cmp);
        let tol = 1e-14 * self.nodes.last().unwrap();
        all.dedup_by(|b, a| (*b - *a).abs() <= tol);
        all.windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let mid = 0.5 * (a + b);
                let k = self.cell_of(mid);
                let j = phi_nodes[1..].partition_point(|&t| t < mid).min(phi.len() - 1);
                phi.values()[j]
                    * n as f64
                    * (self.offset(k) * monomial(a, b, n - 1) - self.slopes[k] * monomial(a, b, n))
            })
            .sum()
    }

    /// `Φ(x_k) = ∫_0^{s_k} g t^{-2/N} dt` at every node.
    fn weighted_primitive(&self) -> Vec<f64> {
        let n = self.dim as i32;
        let mut out = vec![0.0; self.len() + 1];
        for k in 0..self.len() {
            let (a, b) = (self.nodes[k], self.nodes[k + 1]);
            out[k + 1] = out[k]
                + n as f64 * (self.offset(k) * monomial(a, b, n - 3) - self.slopes[k] * monomial(a, b, n - 2));
        }
        out
    }

    /// `Φ` inside cell `k`.
    fn primitive_at(&self, start: f64, k: usize, x: f64) -> f64 {
        let n = self.dim as i32;
        let a = self.nodes[k];
        start + n as f64 * (self.offset(k) * monomial(a, x, n - 3) - self.slopes[k] * monomial(a, x, n - 2))
    }
}

/// Gradient mass along superlevel sets: cells are ordered by decreasing `u`
/// (ties by index), `F` takes their gradient values in that order and is
/// averaged over cells where `u` ties. `F` is a rearrangement of `|∇u|`
/// followed by averaging, hence `F ≺ f0`.
pub fn build_f(field: &FieldSample) -> Result<StepProfile> {
    field.validate()?;
    let all_flat = field.grad.iter().all(|g| *g == 0.0);
    let constant = field.u.iter().all(|u| *u == field.u[0]);
    if all_flat && !constant {
        return Err(Error::Inconsistent("u varies but every gradient sample is zero".into()));
    }
    let mut order: Vec<usize> = (0..field.n).collect();
    order.sort_by(|&i, &j| field.u[j].total_cmp(&field.u[i]).then(i.cmp(&j)));
    let mut values: Vec<f64> = order.iter().map(|&i| field.grad[i]).collect();
    let mut start = 0;
    while start < field.n {
        let level = field.u[order[start]];
        let mut end = start + 1;
        while end < field.n && field.u[order[end]] == level {
            end += 1;
        }
        if end - start > 1 {
            let mean = values[start..end].iter().sum::<f64>() / (end - start) as f64;
            values[start..end].iter_mut().for_each(|v| *v = mean);
        }
        start = end;
    }
    let f = StepProfile::uniform(field.total_measure, values)?;
    if !dominates(&f, &field.grad_profile()?)? {
        return Err(Error::Inconsistent("accumulated gradient is not dominated by |∇u|*".into()));
    }
    Ok(f)
}

/// `max_k (u*_k - g(s_{k+1}))`: positive values measure how far the sample
/// is from the majorization `u* <= g`.
pub fn majorization_excess(field: &FieldSample, g: &Potential) -> Result<f64> {
    let u_star = decreasing_rearrangement(&field.u_profile()?);
    let breaks = u_star.breakpoints();
    Ok(u_star
        .values()
        .iter()
        .zip(&breaks[1..])
        .map(|(u, s)| u - g.value(*s))
        .fold(f64::NEG_INFINITY, f64::max))
}

pub fn build_g(f: &StepProfile, dom: &Domain) -> Result<Potential> {
    Potential::from_density(f, dom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DualSource {
    /// `φ ∝ g s^{-2/N}`.
    Candidate,
    /// Step density from [`dual_ascent`].
    Ascent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiConstruction {
    /// Cell averages of `ψ(s) = (N ω_N^{1/N} s^{1-1/N})^{-1} ∫_0^s φ`.
    pub psi: StepProfile,
    pub source: DualSource,
    /// `‖g‖_{2*,2}`.
    pub norm_g: f64,
    /// `∫ φ g` by quadrature.
    pub pairing: f64,
    /// Step density when `source` is `Ascent`.
    pub dual_step: Option<StepProfile>,
}

/// Averaged primitive of the norming density of `g`.
///
/// The density `φ = g s^{-2/N} / ‖g‖_{2*,2}` is decreasing, has dual norm 1
/// and pairs with `g` to `‖g‖_{2*,2}`. The pairing is re-checked by Gauss
/// quadrature; if that check fails the step density from [`dual_ascent`] is
/// used instead.
pub fn build_psi(g: &Potential, dom: &Domain) -> Result<PsiConstruction> {
    if g.is_zero() {
        return Err(Error::Degenerate("potential vanishes identically".into()));
    }
    let norm_g = g.lorentz_norm();
    let n = dom.n();
    let quad: f64 = (0..g.len())
        .map(|k| {
            let (a, b) = (g.nodes[k], g.nodes[k + 1]);
            // ∫ g² s^{-2/N} ds = N ∫ g² x^{N-3} dx
            gauss8(|x| (g.offset(k) - g.slopes[k] * x).powi(2) * n * x.powi(g.dim as i32 - 3), a, b)
        })
        .sum::<f64>()
        / norm_g;
    if ((quad - norm_g) / norm_g).abs() <= NORMING_TOL {
        let primitive = g.weighted_primitive();
        let s = g.measure_breakpoints();
        let factor = dom.omega_n.powf(-1.0 / n) / norm_g;
        let d = g.dim as i32;
        let values: Vec<f64> = (0..g.len())
            .map(|k| {
                let (a, b) = (g.nodes[k], g.nodes[k + 1]);
                // ∫_cell ψ ds = ω^{-1/N} ∫ Φ dx / ‖g‖
                let (c, off, slope) = (primitive[k], g.offset(k), g.slopes[k]);
                let integral = c * (b - a)
                    + n * off / (n - 2.0) * (monomial(a, b, d - 2) - a.powi(d - 2) * (b - a))
                    - n * slope / (n - 1.0) * (monomial(a, b, d - 1) - a.powi(d - 1) * (b - a));
                factor * integral / (s[k + 1] - s[k])
            })
            .collect();
        let widths = s.windows(2).map(|w| w[1] - w[0]).collect();
        return Ok(PsiConstruction {
            psi: StepProfile::with_total(g.total_measure, widths, values)?,
            source: DualSource::Candidate,
            norm_g,
            pairing: quad,
            dual_step: None,
        });
    }
    let ascent = dual_ascent(g, dom, 200)?;
    Ok(PsiConstruction {
        psi: psi_from_step(&ascent.phi, dom)?,
        source: DualSource::Ascent,
        norm_g,
        pairing: ascent.pairing,
        dual_step: Some(ascent.phi),
    })
}

/// `ψ` cell averages for a step density `φ`.
pub fn psi_from_step(phi: &StepProfile, dom: &Domain) -> Result<StepProfile> {
    let n = dom.n();
    let inv_n = 1.0 / n;
    let s = phi.breakpoints();
    let mut acc = 0.0;
    let mut values = Vec::with_capacity(phi.len());
    for (k, (v, w)) in phi.values().iter().zip(phi.widths()).enumerate() {
        let (a, b) = (s[k], s[k + 1]);
        // ∫ (acc + v(t - a)) t^{1/N - 1} dt / (N ω^{1/N})
        let i0 = n * (b.powf(inv_n) - a.powf(inv_n));
        let i1 = n / (n + 1.0) * (b.powf(1.0 + inv_n) - a.powf(1.0 + inv_n));
        let integral = ((acc - v * a) * i0 + v * i1) / (n * dom.omega_n.powf(inv_n));
        values.push(integral / w);
        acc += v * w;
    }
    StepProfile::with_total(phi.total_measure(), phi.widths().to_vec(), values)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualAscent {
    pub phi: StepProfile,
    pub pairing: f64,
    pub iterations: usize,
}

/// Maximize `∫ φ g` over nonnegative step densities on the cells of `g`
/// with `‖φ‖_{2N/(N+2),2} <= 1`.
///
/// Each step moves along `G_k / w_k`, where `G_k = ∫_cell g` and
/// `w_k = ∫_cell t^{2/N}` is the norm weight of cell `k`, clips at zero and
/// rescales onto the unit sphere of the dual norm.
pub fn dual_ascent(g: &Potential, dom: &Domain, iterations: usize) -> Result<DualAscent> {
    if g.is_zero() {
        return Err(Error::Degenerate("potential vanishes identically".into()));
    }
    let idx = dual_index(dom);
    let means = g.step_means()?;
    let s = means.breakpoints();
    let e = 1.0 + 2.0 / dom.n();
    let direction: Vec<f64> = (0..means.len())
        .map(|k| {
            let w = (s[k + 1].powf(e) - s[k].powf(e)) / e;
            means.values()[k] * means.widths()[k] / w
        })
        .collect();
    let norm_of = |values: &[f64]| -> Result<f64> {
        let p = StepProfile::with_total(means.total_measure(), means.widths().to_vec(), values.to_vec())?;
        Ok(lorentz_norm_unchecked(&decreasing_rearrangement(&p), idx))
    };
    let step = 1.0 / norm_of(&direction)?;
    let mut phi = vec![1.0; means.len()];
    let n0 = norm_of(&phi)?;
    phi.iter_mut().for_each(|v| *v /= n0);
    let mut used = iterations;
    for it in 0..iterations {
        let mut next: Vec<f64> = phi.iter().zip(&direction).map(|(p, d)| (p + step * d).max(0.0)).collect();
        let nn = norm_of(&next)?;
        next.iter_mut().for_each(|v| *v /= nn);
        let change = next.iter().zip(&phi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        phi = next;
        if change <= 1e-14 * phi.iter().copied().fold(0.0, f64::max) {
            used = it + 1;
            break;
        }
    }
    let phi = StepProfile::with_total(means.total_measure(), means.widths().to_vec(), phi)?;
    let pairing = g.step_pairing(&phi);
    Ok(DualAscent { phi, pairing, iterations: used })
}

/// The three sides of the `L²` estimate for `ψ` built from the norming
/// density of `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiBound {
    /// `‖ψ‖_2`.
    pub psi_l2: f64,
    /// `(N ω_N^{1/N})^{-1} ‖φ‖_{2N/(N+2),2}` with the norm taken on `φ*`; this is `(N ω_N^{1/N})^{-1}`.
    pub rearrangement_bound: f64,
    /// Same with the norm taken on the maximal function `φ**`.
    pub maximal_bound: f64,
    /// `(N ω_N^{1/N})^{-1} (2N/(N-2)) ‖φ‖`, from Hardy's inequality for `φ → φ**`.
    pub hardy_bound: f64,
}

pub fn psi_l2_bound(g: &Potential, dom: &Domain) -> Result<PsiBound> {
    if g.is_zero() {
        return Err(Error::Degenerate("potential vanishes identically".into()));
    }
    let n = dom.n();
    let d = g.dim as i32;
    let norm_g = g.lorentz_norm();
    let primitive = g.weighted_primitive();
    let c = 1.0 / (n * dom.omega_n.powf(1.0 / n));
    let mut psi_sq = 0.0;
    let mut maximal_sq = 0.0;
    for k in 0..g.len() {
        let (a, b) = (g.nodes[k], g.nodes[k + 1]);
        let big_phi = |x: f64| g.primitive_at(primitive[k], k, x) / norm_g;
        // ψ(s) with s = x^N, ds = N x^{N-1} dx
        psi_sq += gauss8(|x| (c * big_phi(x) / x.powi(d - 1)).powi(2) * n * x.powi(d - 1), a, b);
        // t^{2/N} (Φ(t)/t)² dt/t · t
        maximal_sq += gauss8(
            |x| {
                let t = x.powi(d);
                t.powf(2.0 / n) * (big_phi(x) / t).powi(2) * n * x.powi(d - 1)
            },
            a,
            b,
        );
    }
    Ok(PsiBound {
        psi_l2: psi_sq.sqrt(),
        rearrangement_bound: c,
        maximal_bound: c * maximal_sq.sqrt(),
        hardy_bound: c * 2.0 * n / (n - 2.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetrizationResult {
    pub f0: StepProfile,
    #[serde(rename = "F")]
    pub f: StepProfile,
    pub g: Potential,
    pub psi: StepProfile,
    pub psi_source: Option<DualSource>,
    pub fbar: StepProfile,
    /// `ū` as a function of the radius.
    pub ubar: RadialProfile,
    pub lorentz_u: f64,
    pub lorentz_g: f64,
    pub lorentz_ubar: f64,
    /// `∫ f̄ ψ` summed cell by cell.
    pub pairing_direct: f64,
    /// `∫ φ ū`, the same integral after integration by parts.
    pub pairing_by_parts: f64,
    /// `∫ F ψ`.
    pub pairing_f: f64,
    /// See [`majorization_excess`].
    pub majorization_excess: f64,
    pub degenerate: bool,
}

impl SymmetrizationResult {
    /// `‖u‖_{2*,2} <= ‖ū‖_{2*,2}` up to `tol` relative to `‖ū‖`.
    pub fn dominated(&self, tol: f64) -> bool {
        self.lorentz_u <= self.lorentz_ubar + tol * self.lorentz_ubar.max(self.lorentz_u).max(f64::MIN_POSITIVE)
    }
}

fn zero_result(field: &FieldSample, dom: &Domain) -> Result<SymmetrizationResult> {
    let zeros = StepProfile::uniform(field.total_measure, vec![0.0; field.n])?;
    let g = Potential::from_density(&zeros, dom)?;
    Ok(SymmetrizationResult {
        f0: zeros.clone(),
        f: zeros.clone(),
        ubar: g.radial_profile()?,
        g,
        psi: zeros.clone(),
        psi_source: None,
        fbar: zeros,
        lorentz_u: 0.0,
        lorentz_g: 0.0,
        lorentz_ubar: 0.0,
        pairing_direct: 0.0,
        pairing_by_parts: 0.0,
        pairing_f: 0.0,
        majorization_excess: 0.0,
        degenerate: true,
    })
}

/// Run the full pipeline on one field.
///
/// Fails with [`Error::Inconsistent`] if the two routes to `∫ f̄ ψ` disagree
/// or `∫ f̄ ψ < ∫ F ψ`. The domination `‖u‖ <= ‖ū‖` is returned, not
/// enforced: samples that do not satisfy `u* <= g` can violate it.
pub fn symmetrize(field: &FieldSample, dom: &Domain) -> Result<SymmetrizationResult> {
    field.check_domain(dom)?;
    if field.is_zero() {
        return zero_result(field, dom);
    }
    let f0 = decreasing_rearrangement(&field.grad_profile()?);
    let f = build_f(field)?;
    let g = build_g(&f, dom)?;
    let idx = lorentz_index(dom);
    let lorentz_u = lorentz_norm_unchecked(&decreasing_rearrangement(&field.u_profile()?), idx);
    let excess = majorization_excess(field, &g)?;
    if g.is_zero() {
        // constant u with no gradient: ψ is undefined and ū = 0
        let mut out = zero_result(field, dom)?;
        out.lorentz_u = lorentz_u;
        out.majorization_excess = excess;
        return Ok(out);
    }
    let psi = build_psi(&g, dom)?;
    let fbar = pseudo_rearrangement(&f0, &psi.psi)?;
    let ubar = Potential::from_density(&fbar, dom)?;

    let pairing_direct = measure::pairing(&fbar, &psi.psi)?;
    let pairing_f = measure::pairing(&f, &psi.psi)?;
    let pairing_by_parts = match &psi.dual_step {
        None => g.weighted_pairing(&ubar) / psi.norm_g,
        Some(phi) => ubar.step_pairing(phi),
    };
    let scale = pairing_direct.abs().max(pairing_by_parts.abs()).max(f64::MIN_POSITIVE);
    if (pairing_direct - pairing_by_parts).abs() > PAIRING_TOL * scale {
        return Err(Error::Inconsistent(format!(
            "∫ f̄ψ = {pairing_direct} directly but {pairing_by_parts} after integration by parts"
        )));
    }
    if pairing_direct < pairing_f - PAIRING_TOL * scale {
        return Err(Error::Inconsistent(format!("∫ f̄ψ = {pairing_direct} below ∫ Fψ = {pairing_f}")));
    }

    Ok(SymmetrizationResult {
        lorentz_g: g.lorentz_norm(),
        lorentz_ubar: ubar.lorentz_norm(),
        ubar: ubar.radial_profile()?,
        f0,
        f,
        g,
        psi_source: Some(psi.source),
        psi: psi.psi,
        fbar,
        lorentz_u,
        pairing_direct,
        pairing_by_parts,
        pairing_f,
        majorization_excess: excess,
        degenerate: false,
    })
}

/// Compare `J(u) = (∫|∇u|² - ((N-2)/2)² ∫u²/|x|²) / ‖|∇u|‖_q²` before and
/// after symmetrization. The Hardy term of `u` is bounded above through
/// `∫u²/|x|² <= ω_N^{2/N} ‖u‖²_{2*,2}` (Hardy–Littlewood), which is an
/// equality for `ū`.
pub fn quotient_decrease_check(field: &FieldSample, dom: &Domain, q: f64, tol: f64) -> Result<VerificationReport> {
    if !(q.is_finite() && (1.0..2.0).contains(&q)) {
        return Err(Error::InvalidArgument(format!("q = {q} outside [1, 2)")));
    }
    let result = symmetrize(field, dom)?;
    let base = VerificationReport::inequality("dec", 0.0, 0.0, 1.0, tol);
    let report = |r: VerificationReport| {
        r.param("dim", dom.dim)
            .param("volume", dom.volume)
            .param("q", q)
            .param("n", field.n)
            .param("lorentz_u", result.lorentz_u)
            .param("lorentz_ubar", result.lorentz_ubar)
    };
    let denom = result.f0.power_sum(q).powf(2.0 / q);
    if result.degenerate || denom == 0.0 {
        return Ok(report(base).note("degenerate"));
    }
    let hardy = dom.hardy_constant() * dom.omega_n.powf(2.0 / dom.n());
    let original = (result.f0.power_sum(2.0) - hardy * result.lorentz_u.powi(2)) / denom;
    let symmetrized = (result.fbar.power_sum(2.0) - hardy * result.lorentz_ubar.powi(2)) / denom;
    let scale = original.abs().max(result.f0.power_sum(2.0) / denom);
    let mut r = report(VerificationReport::inequality("dec", symmetrized, original, scale, tol))
        .param("J_original", original)
        .param("J_symmetrized", symmetrized)
        .param("majorization_excess", result.majorization_excess);
    if result.majorization_excess > MAJORIZATION_TOL * field.u.iter().copied().fold(0.0, f64::max) {
        r = r.note("sample violates u* <= g");
    }
    Ok(r)
}
