//! Unit-cell decomposition of the plane.
//!
//! Cells are half-open squares `[j - 1/2, j + 1/2) x [k - 1/2, k + 1/2)`, so
//! every point of the plane belongs to exactly one cell. Disks are open.

use num_complex::Complex64;

use crate::error::{FockError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub j: i64,
    pub k: i64,
}

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint { j: 0, k: 0 };

    pub fn new(j: i64, k: i64) -> Self {
        Self { j, k }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.j as f64, self.k as f64)
    }

    /// Euclidean distance `|nu - nu'|` between lattice points.
    pub fn distance(self, other: LatticePoint) -> f64 {
        ((self.j - other.j) as f64).hypot((self.k - other.k) as f64)
    }

    /// Chebyshev norm, the window coordinate.
    pub fn sup_norm(self) -> i64 {
        self.j.abs().max(self.k.abs())
    }
}

impl std::fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.j, self.k)
    }
}

/// The half-open unit square around a lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub center: LatticePoint,
}

impl Cell {
    pub fn new(center: LatticePoint) -> Self {
        Self { center }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let (x0, y0) = (self.center.j as f64 - 0.5, self.center.k as f64 - 0.5);
        z.re >= x0 && z.re < x0 + 1.0 && z.im >= y0 && z.im < y0 + 1.0
    }

    /// Distance from `z` to the closed cell.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        let dx = ((z.re - self.center.j as f64).abs() - 0.5).max(0.0);
        let dy = ((z.im - self.center.k as f64).abs() - 0.5).max(0.0);
        dx.hypot(dy)
    }
}

/// Cells with `max(|j|, |k|) <= n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub n_max: i64,
}

impl Window {
    pub fn new(n_max: i64) -> Result<Self> {
        if n_max < 0 {
            return Err(FockError::InvalidGrid(format!("window n_max {n_max} < 0")));
        }
        Ok(Self { n_max })
    }

    pub fn cell_count(&self) -> usize {
        let side = (2 * self.n_max + 1) as usize;
        side * side
    }

    pub fn contains(&self, nu: LatticePoint) -> bool {
        nu.sup_norm() <= self.n_max
    }

    /// Half side of the covered square region.
    pub fn half_side(&self) -> f64 {
        self.n_max as f64 + 0.5
    }

    /// Row-major by `j`, then `k`.
    pub fn cells(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        let n = self.n_max;
        (-n..=n).flat_map(move |j| (-n..=n).map(move |k| LatticePoint::new(j, k)))
    }

    /// Windows of roughly doubling size ending at `self`, used for growth tests.
    pub fn growth_sequence(&self) -> Vec<Window> {
        let n = self.n_max;
        let mut sizes: Vec<i64> = [n as f64 / 8.0, n as f64 / 4.0, n as f64 / 2.0]
            .iter()
            .map(|x| x.round().max(1.0) as i64)
            .chain(std::iter::once(n))
            .filter(|&m| m <= n)
            .collect();
        sizes.dedup();
        sizes.into_iter().map(|n_max| Window { n_max }).collect()
    }
}

/// Discretization choices shared by all numerical routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub step: f64,
    pub radius: f64,
    pub window: Window,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            step: 0.05,
            radius: 16.0,
            window: Window { n_max: 12 },
        }
    }
}

impl GridSpec {
    pub fn new(step: f64, radius: f64, n_max: i64) -> Result<Self> {
        let window = Window::new(n_max)?;
        if !(step > 0.0 && step.is_finite()) {
            return Err(FockError::InvalidGrid(format!(
                "step {step} must be positive"
            )));
        }
        if !(radius >= n_max as f64 + 2.0) {
            return Err(FockError::InvalidGrid(format!(
                "radius {radius} must be at least n_max + 2 = {}",
                n_max + 2
            )));
        }
        Ok(Self {
            step,
            radius,
            window,
        })
    }

    pub fn with_step(self, step: f64) -> Result<Self> {
        Self::new(step, self.radius, self.window.n_max)
    }

    pub fn with_window(self, n_max: i64) -> Result<Self> {
        let radius = self.radius.max(n_max as f64 + 2.0);
        Self::new(self.step, radius, n_max)
    }

    /// Node spacing of window-wide outer integrals (integrals of disk
    /// masses, which are smooth apart from atom circles).
    pub fn outer_step(&self) -> f64 {
        2.0 * self.step
    }
}

pub fn cell_of(z: Complex64) -> LatticePoint {
    LatticePoint::new((z.re + 0.5).floor() as i64, (z.im + 0.5).floor() as i64)
}

/// Lattice points whose closed cell comes within distance `< radius` of `z`.
pub fn covering_cells(z: Complex64, radius: f64) -> Vec<LatticePoint> {
    let reach = radius + 0.5;
    let j0 = (z.re - reach).floor() as i64;
    let j1 = (z.re + reach).ceil() as i64;
    let k0 = (z.im - reach).floor() as i64;
    let k1 = (z.im + reach).ceil() as i64;
    let mut out = Vec::new();
    for j in j0..=j1 {
        for k in k0..=k1 {
            let nu = LatticePoint::new(j, k);
            if Cell::new(nu).distance_to(z) < radius {
                out.push(nu);
            }
        }
    }
    out
}
