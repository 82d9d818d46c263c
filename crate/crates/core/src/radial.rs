//! Radial functions on balls: domains, grids, quadrature and the two
//! changes of variable that reduce radial Hardy-type quotients to the plane.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{self, LorentzIndex, StepProfile};

/// Ambient dimension and volume of `Ω`, with the derived ball data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Domain {
    pub dim: u32,
    pub volume: f64,
    /// Volume of the unit ball `ω_N`.
    pub omega_n: f64,
    /// Radius `R_Ω` of the ball with the same volume as `Ω`.
    pub radius: f64,
    /// Critical Sobolev exponent `2N/(N-2)`.
    pub crit_exp: f64,
}

/// `ω_N = π^{N/2}/Γ(N/2+1)` by the recursion `ω_N = 2π ω_{N-2} / N`.
pub fn unit_ball_volume(dim: u32) -> f64 {
    let (mut omega, start) = if dim % 2 == 0 { (1.0, 2) } else { (2.0, 3) };
    let mut n = start;
    while n <= dim {
        omega *= 2.0 * PI / n as f64;
        n += 2;
    }
    omega
}

impl Domain {
    pub fn new(dim: u32, volume: f64) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidArgument(format!("dimension must be at least 3, got {dim}")));
        }
        if !(volume.is_finite() && volume > 0.0) {
            return Err(Error::InvalidArgument(format!("volume must be positive, got {volume}")));
        }
        let omega_n = unit_ball_volume(dim);
        let n = dim as f64;
        Ok(Self {
            dim,
            volume,
            omega_n,
            radius: (volume / omega_n).powf(1.0 / n),
            crit_exp: 2.0 * n / (n - 2.0),
        })
    }

    /// The ball of radius `radius`.
    pub fn ball(dim: u32, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        Self::new(dim, unit_ball_volume(dim.max(3)) * radius.powi(dim as i32))
    }

    pub fn unit_ball(dim: u32) -> Result<Self> {
        Self::ball(dim, 1.0)
    }

    pub fn n(&self) -> f64 {
        self.dim as f64
    }

    /// `N ω_N`, the surface area of the unit sphere.
    pub fn sphere_area(&self) -> f64 {
        self.n() * self.omega_n
    }

    /// `(N-2)²/4`.
    pub fn hardy_constant(&self) -> f64 {
        let k = (self.n() - 2.0) / 2.0;
        k * k
    }
}

/// Samples of a radial function on a strictly increasing grid `[δ, R]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    grid: Vec<f64>,
    values: Vec<f64>,
    zero_at_outer: bool,
}

impl RadialProfile {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, zero_at_outer: bool) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "need at least two grid points and matching values, got {} and {}",
                grid.len(),
                values.len()
            )));
        }
        if grid[0] < 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) || grid.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidArgument("grid must be nonnegative and strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("profile values must be finite".into()));
        }
        if zero_at_outer && *values.last().unwrap() != 0.0 {
            return Err(Error::InvalidArgument("profile flagged zero at the outer radius is not".into()));
        }
        Ok(Self { grid, values, zero_at_outer })
    }

    /// Sample `f` on `grid`. With `zero_at_outer` the last sample is pinned to 0.
    pub fn sample<F: Fn(f64) -> f64>(grid: Vec<f64>, f: F, zero_at_outer: bool) -> Result<Self> {
        let mut values: Vec<f64> = grid.iter().map(|&r| f(r)).collect();
        if zero_at_outer {
            if let Some(last) = values.last_mut() {
                *last = 0.0;
            }
        }
        Self::new(grid, values, zero_at_outer)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn zero_at_outer(&self) -> bool {
        self.zero_at_outer
    }

    pub fn inner_radius(&self) -> f64 {
        self.grid[0]
    }

    pub fn outer_radius(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn is_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Pointwise map of the values, keeping the grid.
    pub fn map<F: Fn(f64, f64) -> f64>(&self, f: F) -> RadialProfile {
        let values = self.grid.iter().zip(&self.values).map(|(&r, &v)| f(r, v)).collect();
        RadialProfile { grid: self.grid.clone(), values, zero_at_outer: self.zero_at_outer }
    }

    /// Second-order finite-difference derivative on the (possibly nonuniform)
    /// grid: centered three-point stencil inside, one-sided three-point at the ends.
    pub fn derivative(&self) -> Result<Vec<f64>> {
        let r = &self.grid;
        let f = &self.values;
        let n = r.len();
        if n < 3 {
            return Err(Error::Resolution(format!("derivative needs 3 grid points, got {n}")));
        }
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h1 = r[i] - r[i - 1];
            let h2 = r[i + 1] - r[i];
            d[i] = -h2 / (h1 * (h1 + h2)) * f[i - 1] + (h2 - h1) / (h1 * h2) * f[i] + h1 / (h2 * (h1 + h2)) * f[i + 1];
        }
        let (h1, h2) = (r[1] - r[0], r[2] - r[1]);
        d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1] - h1 / (h2 * (h1 + h2)) * f[2];
        let (h1, h2) = (r[n - 2] - r[n - 3], r[n - 1] - r[n - 2]);
        d[n - 1] = h2 / (h1 * (h1 + h2)) * f[n - 3] - (h1 + h2) / (h1 * h2) * f[n - 2] + (2.0 * h2 + h1) / (h2 * (h1 + h2)) * f[n - 1];
        Ok(d)
    }

    /// Step profile in measure coordinates `t = ω_N r^N`: shell `[r_i, r_{i+1}]`
    /// becomes the cell `[ω_N r_i^N, ω_N r_{i+1}^N]` carrying the mean of the
    /// two endpoint values. A positive inner radius adds the ball `B_δ` as a
    /// first cell holding the innermost value.
    pub fn to_measure_profile(&self, dim: u32) -> Result<StepProfile> {
        let omega = unit_ball_volume(dim);
        let t = |r: f64| omega * r.powi(dim as i32);
        let mut widths = Vec::with_capacity(self.grid.len());
        let mut values = Vec::with_capacity(self.grid.len());
        if self.grid[0] > 0.0 {
            widths.push(t(self.grid[0]));
            values.push(self.values[0]);
        }
        for i in 0..self.grid.len() - 1 {
            widths.push(t(self.grid[i + 1]) - t(self.grid[i]));
            values.push(0.5 * (self.values[i] + self.values[i + 1]));
        }
        StepProfile::with_total(t(self.outer_radius()), widths, values)
    }
}

/// `m + 1` equally spaced points on `[a, b]`.
pub fn uniform_grid(a: f64, b: f64, m: usize) -> Vec<f64> {
    let h = (b - a) / m as f64;
    let mut g: Vec<f64> = (0..=m).map(|i| a + h * i as f64).collect();
    g[m] = b;
    g
}

/// About `m + 1` points on `[δ, R]`: geometric from `δ` up to a switch radius,
/// uniform above it, with the last geometric step matching the uniform step.
/// A quarter of the intervals go to the geometric stretch.
pub fn graded_grid(delta: f64, r_max: f64, m: usize) -> Result<Vec<f64>> {
    if !(delta > 0.0 && delta < r_max) {
        return Err(Error::InvalidArgument(format!("graded grid needs 0 < δ < R, got δ={delta}, R={r_max}")));
    }
    if m < 8 {
        return Err(Error::Resolution(format!("graded grid needs at least 8 intervals, got {m}")));
    }
    let m_geo = m / 4;
    let m_uni = m - m_geo;
    // Find the switch radius s where the geometric step s(1 - 1/q) matches (R - s)/m_uni,
    // q = (s/δ)^{1/m_geo}. The mismatch is increasing in s.
    let mismatch = |s: f64| {
        let q = (s / delta).powf(1.0 / m_geo as f64);
        s * (1.0 - 1.0 / q) - (r_max - s) / m_uni as f64
    };
    let (mut lo, mut hi) = (delta * (1.0 + 1e-9), r_max * (1.0 - 1e-9));
    if mismatch(lo) >= 0.0 {
        return Ok(uniform_grid(delta, r_max, m));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mismatch(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    let q = (s / delta).powf(1.0 / m_geo as f64);
    let mut grid: Vec<f64> = (0..m_geo).map(|i| delta * q.powi(i as i32)).collect();
    grid.extend(uniform_grid(s, r_max, m_uni));
    Ok(grid)
}

/// Insert extra nodes into a sorted grid, dropping duplicates.
pub fn with_nodes(mut grid: Vec<f64>, nodes: &[f64]) -> Vec<f64> {
    grid.extend_from_slice(nodes);
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs().max(1e-300));
    grid
}

/// Composite trapezoid rule.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])).sum()
}

/// `N ω_N ∫ p(r) r^{w+N-1} dr` by the trapezoid rule on the profile grid.
pub fn weighted_integral(p: &RadialProfile, weight_exponent: f64, dim: u32) -> Result<f64> {
    if dim < 1 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let power = weight_exponent + dim as f64 - 1.0;
    if power < 0.0 && p.inner_radius() == 0.0 {
        return Err(Error::SingularIntegrand(format!(
            "r^{power} is singular at the origin; use an inner cutoff δ > 0"
        )));
    }
    let y: Vec<f64> = p.grid.iter().zip(&p.values).map(|(&r, &v)| weighted_value(v, r, power)).collect();
    Ok(dim as f64 * unit_ball_volume(dim) * trapezoid(&p.grid, &y))
}

fn weighted_value(v: f64, r: f64, power: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v * r.powf(power)
    }
}

/// `N ω_N ∫ (u')² r^{N-1} dr` with `u'` from [`RadialProfile::derivative`].
pub fn gradient_energy(u: &RadialProfile, dim: u32) -> Result<f64> {
    if !u.zero_at_outer {
        return Err(Error::Precondition("gradient energy needs a profile vanishing at the outer radius".into()));
    }
    let du = u.derivative()?;
    let power = dim as f64 - 1.0;
    let y: Vec<f64> = u.grid.iter().zip(&du).map(|(&r, &d)| weighted_value(d * d, r, power)).collect();
    Ok(dim as f64 * unit_ball_volume(dim) * trapezoid(&u.grid, &y))
}

/// `∫|∇u|² - ((N-2)²/4) ∫ u²/|x|²` over the shell `[δ, R]`.
pub fn hardy_gap(u: &RadialProfile, dom: &Domain) -> Result<f64> {
    if u.inner_radius() <= 0.0 {
        return Err(Error::Precondition("Hardy gap needs an inner cutoff δ > 0".into()));
    }
    let energy = gradient_energy(u, dom.dim)?;
    let squared = u.map(|_, v| v * v);
    let hardy = weighted_integral(&squared, -2.0, dom.dim)?;
    Ok(energy - dom.hardy_constant() * hardy)
}

/// `v(r) = u(r) r^{(N-2)/2}`.
pub fn magical_transform(u: &RadialProfile, dim: u32) -> RadialProfile {
    let k = (dim as f64 - 2.0) / 2.0;
    u.map(|r, v| if v == 0.0 { 0.0 } else { v * r.powf(k) })
}

/// Inverse of [`magical_transform`]: `u(r) = v(r) r^{-(N-2)/2}`.
pub fn inverse_magical_transform(v: &RadialProfile, dim: u32) -> Result<RadialProfile> {
    if v.inner_radius() <= 0.0 && v.values[0] != 0.0 && dim > 2 {
        return Err(Error::SingularIntegrand("r^{-(N-2)/2} blows up at r = 0".into()));
    }
    let k = (dim as f64 - 2.0) / 2.0;
    Ok(v.map(|r, x| if x == 0.0 { 0.0 } else { x * r.powf(-k) }))
}

/// Result of the logarithmic change of variable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogTransform {
    pub profile: RadialProfile,
    /// `|v(δ) log δ|` at the inner cutoff.
    pub boundary_residual: f64,
    /// Set when the boundary residual exceeds `1e-3 · max|v|`.
    pub warning: Option<String>,
}

/// Largest admissible radius for the logarithmic weight.
pub const LOG_RADIUS: f64 = 1.0 / std::f64::consts::E;

/// `u(r) = v(r) r^{-(N-2)/2} √(-log r)` on a grid inside `(0, 1/e]`.
pub fn log_transform(v: &RadialProfile, dim: u32) -> Result<LogTransform> {
    if v.inner_radius() <= 0.0 {
        return Err(Error::InvalidArgument("logarithmic transform needs grid points in (0, 1/e]".into()));
    }
    if v.outer_radius() > LOG_RADIUS * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "grid point {} lies beyond 1/e",
            v.outer_radius()
        )));
    }
    if *v.values.last().unwrap() != 0.0 {
        return Err(Error::Precondition("v must vanish at the outer radius".into()));
    }
    let delta = v.inner_radius();
    let boundary_residual = (v.values[0] * delta.ln()).abs();
    let tol = 1e-3 * v.max_abs();
    let warning = (boundary_residual > tol).then(|| {
        format!("|v(δ) log δ| = {boundary_residual:e} exceeds 1e-3·max|v| = {tol:e} at δ = {delta:e}")
    });
    let k = (dim as f64 - 2.0) / 2.0;
    let mut profile = v.map(|r, x| if x == 0.0 { 0.0 } else { x * r.powf(-k) * (-r.ln()).max(0.0).sqrt() });
    profile.zero_at_outer = true;
    Ok(LogTransform { profile, boundary_residual, warning })
}

/// Both sides of `∫_0^{1/e} v v' log r dr = -½ ∫_0^{1/e} v²/r dr` by trapezoid
/// quadrature on the profile grid (finite-difference `v'`).
///
/// A grid starting at `r = 0` is allowed when `v(0) = 0`; the integrands are
/// then taken as 0 there.
pub fn log_integration_by_parts(v: &RadialProfile) -> Result<(f64, f64)> {
    let dv = v.derivative()?;
    let r = &v.grid;
    let lhs_y: Vec<f64> =
        r.iter().zip(&v.values).zip(&dv).map(|((&r, &x), &d)| if x == 0.0 { 0.0 } else { x * d * r.ln() }).collect();
    let rhs_y: Vec<f64> = r.iter().zip(&v.values).map(|(&r, &x)| if x == 0.0 { 0.0 } else { x * x / r }).collect();
    Ok((trapezoid(r, &lhs_y), -0.5 * trapezoid(r, &rhs_y)))
}

/// `∫_{B_R} |∇u| dx` and `(N-1) ω_N^{1/N} ‖u‖_{N/(N-1),1}` for a radial
/// decreasing `u` vanishing at `R`.
///
/// The left side uses finite differences and the trapezoid rule; the right
/// side goes through [`measure::lorentz_norm`] on the measure-coordinate
/// step profile of `u`.
pub fn gradient_l1_lorentz_identity(u: &RadialProfile, dom: &Domain) -> Result<(f64, f64)> {
    if !u.is_decreasing() {
        return Err(Error::Precondition("gradient/Lorentz identity needs a decreasing profile".into()));
    }
    if !u.zero_at_outer {
        return Err(Error::Precondition("profile must vanish at the outer radius".into()));
    }
    let du = u.derivative()?;
    let n = dom.n();
    let y: Vec<f64> = u.grid.iter().zip(&du).map(|(&r, &d)| weighted_value(d.abs(), r, n - 1.0)).collect();
    let lhs = dom.sphere_area() * trapezoid(&u.grid, &y);

    let star = u.to_measure_profile(dom.dim)?;
    let idx = LorentzIndex::new(n / (n - 1.0), 1.0)?;
    let rhs = (n - 1.0) * dom.omega_n.powf(1.0 / n) * measure::lorentz_norm(&star, idx, dom.dim)?;
    Ok((lhs, rhs))
}
