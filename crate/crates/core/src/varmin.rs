//! Discrete variational solvers that recompute the sharp constants without
//! using their closed forms.
//!
//! Radial problems are posed in the planar variable `v = u r^{(N-2)/2}`, where
//! the Hardy gap of a radial `u` becomes `N ω_N ∫ (v')² r dr`. On a grid
//! `0 = r_0 < ... < r_M = R` with `v(R) = 0` the Dirichlet form is assembled
//! with linear elements (exact for the coefficient `r`), and the lower-order
//! terms use lumped hat-function moments. The node at `r = 0` carries the
//! natural boundary condition: the infimum over `H¹_0` functions is the same
//! as over the natural space because points have zero capacity in the plane.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::constants;
use crate::error::{Error, Result};
use crate::radial::{self, uniform_grid, Domain, RadialProfile};
use crate::special::{bessel_v, spectral_constants};
use crate::tridiag::SymTridiag;

pub const MIN_GRID: usize = 64;
/// Residual bound `‖Kx - λBx‖/‖x‖` for accepted eigenpairs.
pub const EIGEN_RESIDUAL: f64 = 1e-9;
const MAX_INVERSE_ITERATIONS: usize = 2000;
/// Random starts used by [`best_constant_search`] besides the closed-form start.
pub const RANDOM_STARTS: usize = 8;
const MAX_DESCENT_STEPS: usize = 400;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenResult {
    pub eigenvalue: f64,
    /// Peak-normalized eigenvector on the solver grid.
    pub eigenvector: RadialProfile,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstrainedMinResult {
    pub minimizer: RadialProfile,
    /// `I(v) = 2π ∫ (v')² r dr - 2 N ω_N ∫ v r^{a-1} dr`.
    pub objective: f64,
    /// `2π ∫ v r^{a-1} dr`, the normalization integral.
    pub constraint_value: f64,
    /// `2π ∫ (v')² r dr`.
    pub energy: f64,
    pub radius: f64,
    pub exponent: f64,
}

fn check_grid(grid_size: usize) -> Result<()> {
    if grid_size < MIN_GRID {
        return Err(Error::Resolution(format!("grid size must be at least {MIN_GRID}, got {grid_size}")));
    }
    Ok(())
}

/// Stiffness of `∫ (v')² r dr` on the free nodes `0..M-1` (node `M` is fixed to 0).
fn plane_stiffness(grid: &[f64]) -> SymTridiag {
    let m = grid.len() - 1;
    let edge: Vec<f64> = grid.windows(2).map(|w| 0.5 * (w[0] + w[1]) / (w[1] - w[0])).collect();
    let mut diag = vec![0.0; m];
    let mut off = vec![0.0; m.saturating_sub(1)];
    for i in 0..m {
        diag[i] = edge[i] + if i > 0 { edge[i - 1] } else { 0.0 };
        if i + 1 < m {
            off[i] = -edge[i];
        }
    }
    SymTridiag { diag, off }
}

/// `∫ φ_i r^β dr` for the hat functions of the free nodes `0..M-1`, `β > -1`.
fn hat_moments(grid: &[f64], beta: f64) -> Vec<f64> {
    const GL_NODES: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683,
        0.0,
        0.538_469_310_105_683,
        0.906_179_845_938_664,
    ];
    const GL_WEIGHTS: [f64; 5] = [
        0.236_926_885_056_189_1,
        0.478_628_670_499_366_5,
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
    ];
    let m = grid.len() - 1;
    let mut out = vec![0.0; m + 1];
    for e in 0..m {
        let (a, b) = (grid[e], grid[e + 1]);
        let h = b - a;
        let (left, right) = if a < 64.0 * h {
            // closed form; cancellation is mild this close to the origin
            let i0 = (b.powf(beta + 1.0) - a.powf(beta + 1.0)) / (beta + 1.0);
            let i1 = (b.powf(beta + 2.0) - a.powf(beta + 2.0)) / (beta + 2.0);
            ((b * i0 - i1) / h, (i1 - a * i0) / h)
        } else {
            let (mut l, mut r) = (0.0, 0.0);
            for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
                let t = 0.5 * (x + 1.0);
                let f = (a + t * h).powf(beta) * w * 0.5 * h;
                l += (1.0 - t) * f;
                r += t * f;
            }
            (l, r)
        };
        out[e] += left;
        out[e + 1] += right;
    }
    out.truncate(m);
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize_peak(x: &mut [f64]) {
    let peak = x.iter().copied().fold(0.0_f64, |m, v| if v.abs() > m.abs() { v } else { m });
    if peak != 0.0 {
        x.iter_mut().for_each(|v| *v /= peak);
    }
}

/// Smallest eigenpair of `K x = λ B x` (`B` diagonal) by inverse iteration
/// from the all-ones vector.
fn inverse_iteration(k: &SymTridiag, b: &[f64], shift: f64) -> Result<(f64, Vec<f64>, f64, usize)> {
    let n = k.len();
    let shifted = SymTridiag {
        diag: k.diag.iter().zip(b).map(|(d, w)| d - shift * w).collect(),
        off: k.off.clone(),
    };
    let mut x = vec![1.0; n];
    let mut lambda = f64::NAN;
    let mut residual = f64::INFINITY;
    for it in 1..=MAX_INVERSE_ITERATIONS {
        let bx: Vec<f64> = x.iter().zip(b).map(|(v, w)| v * w).collect();
        let mut y = shifted.solve(&bx)?;
        normalize_peak(&mut y);
        x = y;
        let kx = k.mul(&x);
        let xbx: f64 = x.iter().zip(b).map(|(v, w)| v * v * w).sum();
        lambda = dot(&kx, &x) / xbx;
        let r: Vec<f64> = kx.iter().zip(&x).zip(b).map(|((kv, v), w)| kv - lambda * w * v).collect();
        let previous = residual;
        residual = norm2(&r) / norm2(&x);
        if residual <= 0.1 * EIGEN_RESIDUAL || (residual <= EIGEN_RESIDUAL && residual >= 0.9 * previous) {
            return Ok((lambda, x, residual, it));
        }
    }
    Err(Error::Convergence {
        iterations: MAX_INVERSE_ITERATIONS,
        detail: format!("inverse iteration stalled at λ = {lambda}, residual = {residual:e}"),
    })
}

fn eigen_profile(grid: Vec<f64>, mut x: Vec<f64>) -> Result<RadialProfile> {
    x.push(0.0);
    RadialProfile::new(grid, x, true)
}

/// `μ(R) = min ∫_0^R (v')² r dr / ∫_0^R v² dr` over `v(R) = 0`.
///
/// The exact value is `V0/R`: rescaling `r → r V0/R` leaves the numerator
/// unchanged and multiplies the denominator by `R/V0`.
pub fn min_weighted_rayleigh(radius: f64, grid_size: usize) -> Result<EigenResult> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    check_grid(grid_size)?;
    let grid = uniform_grid(0.0, radius, grid_size);
    let k = plane_stiffness(&grid);
    let b = hat_moments(&grid, 0.0);
    let (eigenvalue, x, residual, iterations) = inverse_iteration(&k, &b, 0.0)?;
    Ok(EigenResult { eigenvalue, eigenvector: eigen_profile(grid, x)?, residual, iterations })
}

/// First Dirichlet eigenvalue `Λ2` of the unit disk from the radial problem
/// `-(r v')' = λ r v`, `v'(0) = 0`, `v(1) = 0`.
pub fn disk_dirichlet_eigenvalue(grid_size: usize) -> Result<EigenResult> {
    check_grid(grid_size)?;
    let grid = uniform_grid(0.0, 1.0, grid_size);
    let k = plane_stiffness(&grid);
    let b = hat_moments(&grid, 1.0);
    let (eigenvalue, x, residual, iterations) = inverse_iteration(&k, &b, 0.0)?;
    Ok(EigenResult { eigenvalue, eigenvector: eigen_profile(grid, x)?, residual, iterations })
}

/// Radius `R` with `R^{2a} = 2a³/(N ω_N)`, which normalizes the planar minimizer.
pub fn linear_radius(dim: u32, p: f64) -> f64 {
    let a = constants::linear_exponent(dim, p);
    let omega = crate::radial::unit_ball_volume(dim);
    (2.0 * a.powi(3) / (dim as f64 * omega)).powf(1.0 / (2.0 * a))
}

/// Closed-form planar minimizer `V(r) = (N ω_N / 2π) a^{-2} (R^a - r^a)`.
pub fn linear_minimizer(dim: u32, p: f64, r: f64) -> f64 {
    let a = constants::linear_exponent(dim, p);
    let radius = linear_radius(dim, p);
    let omega = crate::radial::unit_ball_volume(dim);
    dim as f64 * omega / (2.0 * std::f64::consts::PI) / (a * a) * (radius.powf(a) - r.powf(a))
}

/// Minimize `I(v) = 2π ∫ (v')² r dr - 2 N ω_N ∫ v r^{a-1} dr` on the disk of
/// radius [`linear_radius`], subject to `2π ∫ v r^{a-1} dr = 1`.
///
/// On the constraint set `I` differs from the energy by a constant, so the
/// discrete Euler system is `K v = λ ℓ` with `ℓ` the hat moments of `r^{a-1}`
/// and `λ` fixed by the constraint.
pub fn min_linear_constraint(dim: u32, p: f64, grid_size: usize) -> Result<ConstrainedMinResult> {
    if dim < 3 {
        return Err(Error::InvalidArgument(format!("dimension must be at least 3, got {dim}")));
    }
    let crit = 2.0 * dim as f64 / (dim as f64 - 2.0);
    if !(p.is_finite() && p >= 1.0 && p < crit) {
        return Err(Error::InvalidArgument(format!("p = {p} outside [1, {crit})")));
    }
    check_grid(grid_size)?;
    let a = constants::linear_exponent(dim, p);
    let radius = linear_radius(dim, p);
    let grid = uniform_grid(0.0, radius, grid_size);
    let k = plane_stiffness(&grid);
    let ell = hat_moments(&grid, a - 1.0);
    let w = k.solve(&ell)?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let scale = 1.0 / (two_pi * dot(&ell, &w));
    let v: Vec<f64> = w.iter().map(|x| x * scale).collect();
    let energy = two_pi * k.quadratic_form(&v);
    let linear = dot(&ell, &v);
    let constraint_value = two_pi * linear;
    let omega = crate::radial::unit_ball_volume(dim);
    let objective = energy - 2.0 * dim as f64 * omega * linear;
    let mut values = v;
    values.push(0.0);
    Ok(ConstrainedMinResult {
        minimizer: RadialProfile::new(grid, values, true)?,
        objective,
        constraint_value,
        energy,
        radius,
        exponent: a,
    })
}

/// Hardy gap over `∫ u²/|x|` on `B_{V0}` for `u = r^{-(N-2)/2} J0(2√r) η(r)`,
/// where the cutoff `η` is 0 below `δ²`, 1 above `δ` and `log(r/δ²)/log(1/δ)`
/// in between.
///
/// In the planar variable the cutoff costs `∫ (η')² r dr = 1/log(1/δ)`, so the
/// quotient decreases to 1, the sharp constant for this remainder on
/// `B_{V0}`; the limit `r^{-(N-2)/2} J0(2√r)` is not in `H¹` and the constant
/// is not attained. The shell `[δ², V0]` is integrated on a graded grid with
/// `δ` as a node.
pub fn log_cutoff_quotient(dim: u32, delta: f64, grid_size: usize) -> Result<f64> {
    let v0 = spectral_constants().v0;
    if !(delta > 0.0 && delta < 1.0_f64.min(v0)) {
        return Err(Error::InvalidArgument(format!("cutoff must lie in (0, 1), got {delta}")));
    }
    check_grid(grid_size)?;
    let dom = Domain::ball(dim, v0)?;
    let k = (dom.n() - 2.0) / 2.0;
    let inner = delta * delta;
    let grid = radial::with_nodes(radial::graded_grid(inner, v0, grid_size)?, &[delta]);
    let cutoff = |r: f64| if r >= delta { 1.0 } else { (r / inner).ln() / (1.0 / delta).ln() };
    let mut values = Vec::with_capacity(grid.len());
    for &r in &grid {
        values.push(r.powf(-k) * bessel_v(r)? * cutoff(r));
    }
    *values.last_mut().unwrap() = 0.0;
    let u = RadialProfile::new(grid, values, true)?;
    let gap = radial::hardy_gap(&u, &dom)?;
    let remainder = radial::weighted_integral(&u.map(|_, x| x * x), -1.0, dim)?;
    Ok(gap / remainder)
}

/// The radial quotients whose infima are the sharp constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Inequality {
    /// Hardy gap over `‖u‖²_{2N/(N-1),2}`.
    LorentzL2,
    /// Hardy gap over `∫ u²/|x|`.
    InverseDistanceL2,
    /// Hardy gap over `‖u‖²_{p,1}`, `1 <= p < 2*`.
    LorentzL1 { p: f64 },
    /// Hardy gap over `‖∇u‖²_1`.
    GradientL1,
    /// Hardy gap over `‖|∇u|‖²_{p,1}`, `p` below 1.
    GradientLorentzL1 { p: f64 },
    /// Hardy gap over `‖u‖²_2`.
    PoincareL2,
}

impl Inequality {
    pub fn case_id(&self) -> &'static str {
        match self {
            Inequality::LorentzL2 => "thm1",
            Inequality::InverseDistanceL2 => "thm1_weighted",
            Inequality::LorentzL1 { .. } => "thm2",
            Inequality::GradientL1 => "thm4",
            Inequality::GradientLorentzL1 { .. } => "thm5",
            Inequality::PoincareL2 => "brezis_vazquez",
        }
    }

    /// Printed closed forms this quotient is compared against, by name.
    pub fn candidates(&self, dom: &Domain) -> Result<Vec<(String, f64)>> {
        Ok(match *self {
            Inequality::LorentzL2 => vec![
                ("omega_N^(2/N)/|Omega|^(1/N) V0".into(), constants::thm1_constant(dom)),
                ("(omega_N/|Omega|)^(1/N) V0".into(), constants::thm1_weighted_constant(dom)),
            ],
            Inequality::InverseDistanceL2 => vec![
                ("(omega_N/|Omega|)^(1/N) V0".into(), constants::thm1_weighted_constant(dom)),
                ("omega_N^(2/N)/|Omega|^(1/N) V0".into(), constants::thm1_constant(dom)),
            ],
            Inequality::LorentzL1 { p } => vec![("2a^3 omega_N^(2/N)/(N |Omega|^(2a/N))".into(), constants::thm2_constant(dom, p)?)],
            Inequality::GradientL1 => {
                let (text, stmt) = constants::thm4_constants(dom);
                vec![("(1/(4|Omega|))(N/(N-1))^2".into(), text), ("(1/(4 omega_N |Omega|))(N/(N-1))^2".into(), stmt)]
            }
            Inequality::GradientLorentzL1 { p } => {
                vec![("((2-p)/p)^3/(4|Omega|^(2/p-1)) (Np/(N-p))^2".into(), constants::thm5_constant(dom, p)?)]
            }
            Inequality::PoincareL2 => vec![("Lambda_2/R_Omega^2".into(), constants::brezis_vazquez(dom))],
        })
    }
}

enum Remainder {
    /// `Σ m_i v_i²`
    Quadratic(Vec<f64>),
    /// `(Σ ℓ_i v_i)²`
    LinearSquared(Vec<f64>),
}

/// `Q(v) = prefactor · vKv / D(v)` on the planar grid.
struct ReducedQuotient {
    grid: Vec<f64>,
    stiffness: SymTridiag,
    prefactor: f64,
    remainder: Remainder,
    /// `(N-2)/2`, the exponent linking `v` and `u`.
    k: f64,
}

impl ReducedQuotient {
    fn new(id: Inequality, dom: &Domain, grid_size: usize) -> Result<Self> {
        let n = dom.n();
        let omega = dom.omega_n;
        let grid = uniform_grid(0.0, dom.radius, grid_size);
        let stiffness = plane_stiffness(&grid);
        let linear = |a: f64| Remainder::LinearSquared(hat_moments(&grid, a - 1.0));
        let (prefactor, remainder) = match id {
            // ‖u‖²_{2N/(N-1),2} = ω^{-1/N} N ω ∫ v² dr
            Inequality::LorentzL2 => (omega.powf(1.0 / n), Remainder::Quadratic(hat_moments(&grid, 0.0))),
            Inequality::InverseDistanceL2 => (1.0, Remainder::Quadratic(hat_moments(&grid, 0.0))),
            // ‖u‖²_2 = N ω ∫ v² r dr
            Inequality::PoincareL2 => (1.0, Remainder::Quadratic(hat_moments(&grid, 1.0))),
            // ‖u‖_{p,1} = N ω^{1/p} ∫ v r^{a-1} dr
            Inequality::LorentzL1 { p } => {
                constants::thm2_constant(dom, p)?;
                (1.0 / (n * omega.powf(2.0 / p - 1.0)), linear(constants::linear_exponent(dom.dim, p)))
            }
            // ∫|∇u| = (N-1) N ω ∫ v r^{N/2-1} dr
            Inequality::GradientL1 => (1.0 / ((n - 1.0).powi(2) * n * omega), linear(n / 2.0)),
            // ‖|∇u|‖_{p,1} <= ω^{α/N} (N+α-1) N ω ∫ v r^{N/2+α-1} dr, equality for radially decreasing |∇u|
            Inequality::GradientLorentzL1 { p } => {
                constants::check_thm5_range(dom.dim, p)?;
                let alpha = constants::thm5_alpha(dom.dim, p);
                let pre = 1.0 / (omega.powf(1.0 + 2.0 * alpha / n) * (n + alpha - 1.0).powi(2) * n);
                (pre, linear(n / 2.0 + alpha))
            }
        };
        Ok(Self { grid, stiffness, prefactor, remainder, k: (n - 2.0) / 2.0 })
    }

    fn energy(&self, v: &[f64]) -> f64 {
        self.stiffness.quadratic_form(v)
    }

    fn remainder(&self, v: &[f64]) -> f64 {
        match &self.remainder {
            Remainder::Quadratic(m) => v.iter().zip(m).map(|(x, w)| x * x * w).sum(),
            Remainder::LinearSquared(l) => dot(l, v).powi(2),
        }
    }

    fn value(&self, v: &[f64]) -> f64 {
        let d = self.remainder(v);
        if d <= 0.0 {
            return f64::INFINITY;
        }
        self.prefactor * self.energy(v) / d
    }

    /// Target of a full step along the energy-preconditioned negative gradient.
    fn preconditioned_target(&self, v: &[f64]) -> Result<Vec<f64>> {
        let ratio = self.energy(v) / self.remainder(v);
        Ok(match &self.remainder {
            Remainder::Quadratic(m) => {
                let mv: Vec<f64> = v.iter().zip(m).map(|(x, w)| x * w).collect();
                self.stiffness.solve(&mv)?.into_iter().map(|z| ratio * z).collect()
            }
            Remainder::LinearSquared(l) => {
                let lv = dot(l, v);
                self.stiffness.solve(l)?.into_iter().map(|z| ratio * lv * z).collect()
            }
        })
    }

    /// Project onto profiles whose `u = v r^{-k}` is nonnegative and
    /// nonincreasing (isotonic regression by pooling adjacent violators).
    fn project(&self, v: &mut [f64]) {
        let m = v.len();
        let u: Vec<f64> = (1..m).map(|i| v[i] * self.grid[i].powf(-self.k)).collect();
        let u = pool_nonincreasing(&u);
        for i in 1..m {
            v[i] = u[i - 1].max(0.0) * self.grid[i].powf(self.k);
        }
        v[0] = v[0].max(0.0);
    }
}

/// Least-squares projection onto nonincreasing sequences.
fn pool_nonincreasing(x: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(x.len());
    for &value in x {
        blocks.push((value, 1));
        while blocks.len() > 1 {
            let (s2, c2) = blocks[blocks.len() - 1];
            let (s1, c1) = blocks[blocks.len() - 2];
            if s1 / c1 as f64 >= s2 / c2 as f64 {
                break;
            }
            blocks.pop();
            *blocks.last_mut().unwrap() = (s1 + s2, c1 + c2);
        }
    }
    blocks.into_iter().flat_map(|(s, c)| std::iter::repeat(s / c as f64).take(c)).collect()
}

struct Descent {
    value: f64,
    v: Vec<f64>,
    converged: bool,
}

fn descend(q: &ReducedQuotient, start: Vec<f64>) -> Result<Descent> {
    let mut v = start;
    q.project(&mut v);
    normalize_peak(&mut v);
    let mut value = q.value(&v);
    if !value.is_finite() {
        return Ok(Descent { value, v, converged: false });
    }
    for _ in 0..MAX_DESCENT_STEPS {
        let target = q.preconditioned_target(&v)?;
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-10 {
            let mut cand: Vec<f64> = v.iter().zip(&target).map(|(x, y)| x + t * (y - x)).collect();
            q.project(&mut cand);
            normalize_peak(&mut cand);
            let cv = q.value(&cand);
            if cv <= value {
                accepted = Some((cand, cv));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, cv)) = accepted else {
            // no descent direction left: stationary for the projected problem
            return Ok(Descent { value, v, converged: true });
        };
        let improvement = value - cv;
        v = cand;
        value = cv;
        if improvement <= 1e-13 * value.abs() {
            return Ok(Descent { value, v, converged: true });
        }
    }
    Ok(Descent { value, v, converged: false })
}

fn closed_form_start(id: Inequality, grid: &[f64], dom: &Domain) -> Vec<f64> {
    let r_max = dom.radius;
    let sc = spectral_constants();
    let free = &grid[..grid.len() - 1];
    match id {
        Inequality::LorentzL2 | Inequality::InverseDistanceL2 => {
            free.iter().map(|&r| bessel_v(sc.v0 * r / r_max).unwrap_or(0.0)).collect()
        }
        Inequality::PoincareL2 => {
            free.iter().map(|&r| crate::special::bessel_j0(sc.j01 * r / r_max).unwrap_or(0.0)).collect()
        }
        Inequality::LorentzL1 { p } => {
            let a = constants::linear_exponent(dom.dim, p);
            free.iter().map(|&r| r_max.powf(a) - r.powf(a)).collect()
        }
        Inequality::GradientL1 => {
            let a = dom.n() / 2.0;
            free.iter().map(|&r| r_max.powf(a) - r.powf(a)).collect()
        }
        Inequality::GradientLorentzL1 { p } => {
            let a = dom.n() / 2.0 + constants::thm5_alpha(dom.dim, p);
            free.iter().map(|&r| r_max.powf(a) - r.powf(a)).collect()
        }
    }
}

/// Random start: a sorted random decreasing `u`, mapped to `v = u r^k`.
fn random_start(rng: &mut ChaCha8Rng, grid: &[f64], k: f64) -> Vec<f64> {
    let m = grid.len() - 1;
    let mut u: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut v: Vec<f64> = (0..m).map(|i| u[i] * grid[i].powf(k)).collect();
    v[0] = v[1.min(m - 1)];
    v
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub inequality: Inequality,
    pub grid_size: usize,
    /// Smallest quotient found over all starts.
    pub infimum: f64,
    /// Final quotient from each start; the closed-form start comes first.
    pub start_values: Vec<f64>,
    /// Printed closed forms compared against.
    pub candidates: Vec<(String, f64)>,
    /// Relative gap to each candidate.
    pub rel_gaps: Vec<f64>,
    pub converged: bool,
    pub warning: Option<String>,
    /// Planar profile `v` achieving the infimum.
    pub minimizer: RadialProfile,
}

impl SearchOutcome {
    /// Index of the only candidate within `tol`, if exactly one is.
    pub fn winner(&self, tol: f64) -> Option<usize> {
        let hits: Vec<usize> = self.rel_gaps.iter().enumerate().filter(|(_, g)| **g <= tol).map(|(i, _)| i).collect();
        (hits.len() == 1).then(|| hits[0])
    }
}

/// Infimum of the quotient `id` over radial decreasing profiles on the ball
/// of volume `|Ω|`, by energy-preconditioned projected gradient descent from
/// the closed-form minimizer and [`RANDOM_STARTS`] seeded random starts.
pub fn best_constant_search(id: Inequality, dom: &Domain, grid_size: usize, seed: u64) -> Result<SearchOutcome> {
    check_grid(grid_size)?;
    let quotient = ReducedQuotient::new(id, dom, grid_size)?;
    let candidates = id.candidates(dom)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = vec![closed_form_start(id, &quotient.grid, dom)];
    for _ in 0..RANDOM_STARTS {
        starts.push(random_start(&mut rng, &quotient.grid, quotient.k));
    }
    let runs: Vec<Descent> = starts.into_par_iter().map(|s| descend(&quotient, s)).collect::<Result<_>>()?;

    let start_values: Vec<f64> = runs.iter().map(|d| d.value).collect();
    let best = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .expect("at least one start");
    let converged = runs.iter().all(|d| d.converged);
    let warning = (!converged).then(|| {
        let failed = runs.iter().filter(|d| !d.converged).count();
        format!("{failed} of {} starts hit the step limit", runs.len())
    });
    let infimum = runs[best].value;
    let rel_gaps = candidates.iter().map(|(_, c)| ((infimum - c) / c).abs()).collect();
    let mut v = runs[best].v.clone();
    v.push(0.0);
    Ok(SearchOutcome {
        inequality: id,
        grid_size,
        infimum,
        start_values,
        candidates,
        rel_gaps,
        converged,
        warning,
        minimizer: RadialProfile::new(quotient.grid.clone(), v, true)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hat_moments_integrate_monomials() {
        let grid = uniform_grid(0.0, 2.0, 100);
        // moments of r^β over all nodes (including the fixed one) sum to ∫ r^β
        for beta in [0.0, 1.0, 0.5, -0.5] {
            let m = hat_moments(&grid, beta);
            let last_edge_right = {
                let (a, b) = (grid[99], grid[100]);
                let i0 = (b.powf(beta + 1.0) - a.powf(beta + 1.0)) / (beta + 1.0);
                let i1 = (b.powf(beta + 2.0) - a.powf(beta + 2.0)) / (beta + 2.0);
                (i1 - a * i0) / (b - a)
            };
            let total: f64 = m.iter().sum::<f64>() + last_edge_right;
            let exact = 2.0_f64.powf(beta + 1.0) / (beta + 1.0);
            assert!(((total - exact) / exact).abs() < 1e-12, "β = {beta}");
        }
    }

    #[test]
    fn pooling_produces_nonincreasing() {
        let y = pool_nonincreasing(&[1.0, 3.0, 2.0, 2.0, 5.0, 0.0]);
        assert!(y.windows(2).all(|w| w[0] >= w[1] - 1e-15));
        let sum: f64 = y.iter().sum();
        assert!((sum - 13.0).abs() < 1e-12);
        assert_eq!(pool_nonincreasing(&[3.0, 2.0, 1.0]), vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn rayleigh_rejects_small_grids() {
        assert!(matches!(min_weighted_rayleigh(1.0, 10), Err(Error::Resolution(_))));
        assert!(min_weighted_rayleigh(-1.0, 128).is_err());
    }

    #[test]
    fn sobolev_radius_gives_unit_eigenvalue() {
        let v0 = spectral_constants().v0;
        let e = min_weighted_rayleigh(v0, 1024).unwrap();
        assert!((e.eigenvalue - 1.0).abs() < 1e-4);
        assert!(e.residual <= EIGEN_RESIDUAL);
    }

    #[test]
    fn linear_constraint_rejects_bad_p() {
        assert!(min_linear_constraint(3, 0.5, 128).is_err());
        assert!(min_linear_constraint(3, 6.0, 128).is_err());
    }

    #[test]
    fn thm5_search_rejects_out_of_range_p() {
        let dom = Domain::unit_ball(3).unwrap();
        assert!(best_constant_search(Inequality::GradientLorentzL1 { p: 0.5 }, &dom, 128, 0).is_err());
    }
}
