//! Quadrature building blocks shared by every module.
//!
//! Three rules are used throughout the crate:
//! - tensor midpoint on axis-parallel squares,
//! - a polar Gauss-Legendre x trapezoid rule on disks,
//! - midpoint on the truncated plane `[-R, R]^2`.
//!
//! Reductions go through [`NeumaierSum`] in a fixed order so results do not
//! depend on evaluation scheduling.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Compensated summation (Neumaier's variant of Kahan).
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn kahan_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().value()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Product rule on a disk: Gauss-Legendre in the radius, uniform trapezoid
/// in the angle (spectrally accurate for periodic integrands).
#[derive(Debug, Clone)]
pub struct DiskRule {
    /// Offsets from the center together with their weights.
    offsets: Vec<(Complex64, f64)>,
}

impl DiskRule {
    /// Rule for a disk of radius `radius`, resolution tied to the grid step.
    pub fn new(radius: f64, step: f64) -> Self {
        let n_r = ((0.6 * radius / step).ceil() as usize).clamp(8, 240);
        let n_theta = ((1.6 * radius / step).ceil() as usize).clamp(24, 960);
        Self::with_nodes(radius, n_r, n_theta)
    }

    pub fn with_nodes(radius: f64, n_r: usize, n_theta: usize) -> Self {
        let (x, w) = gauss_legendre(n_r);
        let dtheta = 2.0 * PI / n_theta as f64;
        let mut offsets = Vec::with_capacity(n_r * n_theta);
        for (xi, wi) in x.iter().zip(&w) {
            let rho = 0.5 * radius * (xi + 1.0);
            let wr = 0.5 * radius * wi * rho * dtheta;
            for j in 0..n_theta {
                let theta = (j as f64 + 0.5) * dtheta;
                offsets.push((Complex64::from_polar(rho, theta), wr));
            }
        }
        Self { offsets }
    }

    pub fn integrate<F: FnMut(Complex64) -> f64>(&self, center: Complex64, mut f: F) -> f64 {
        let mut acc = NeumaierSum::new();
        for &(off, w) in &self.offsets {
            acc.add(w * f(center + off));
        }
        acc.value()
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

/// Midpoint nodes of the axis-parallel square centered at `center` with side
/// `side`; at least `ceil(side / step)` nodes per axis.
pub fn square_nodes(center: Complex64, side: f64, step: f64) -> (Vec<Complex64>, f64) {
    let n = ((side / step).ceil() as usize).max(1);
    let h = side / n as f64;
    let x0 = center.re - 0.5 * side;
    let y0 = center.im - 0.5 * side;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let x = x0 + (i as f64 + 0.5) * h;
        for j in 0..n {
            out.push(Complex64::new(x, y0 + (j as f64 + 0.5) * h));
        }
    }
    (out, h * h)
}

/// Composite 4-point Gauss-Legendre rule on the square: an even number of
/// panels of side about `4 * step`, so the center is a panel corner (radial
/// weights are only Lipschitz at the origin).
pub fn integrate_square<F: FnMut(Complex64) -> f64>(
    center: Complex64,
    side: f64,
    step: f64,
    mut f: F,
) -> f64 {
    const GL4_X: [f64; 4] = [
        -0.861_136_311_594_052_6,
        -0.339_981_043_584_856_3,
        0.339_981_043_584_856_3,
        0.861_136_311_594_052_6,
    ];
    const GL4_W: [f64; 4] = [
        0.347_854_845_137_453_9,
        0.652_145_154_862_546_1,
        0.652_145_154_862_546_1,
        0.347_854_845_137_453_9,
    ];
    let m = 2 * ((side / (8.0 * step)).ceil() as usize).max(1);
    let panel = side / m as f64;
    let half = 0.5 * panel;
    let mut xs = Vec::with_capacity(4 * m);
    let mut ws = Vec::with_capacity(4 * m);
    for k in 0..m {
        let mid = -0.5 * side + (k as f64 + 0.5) * panel;
        for (x, w) in GL4_X.iter().zip(GL4_W) {
            xs.push(mid + half * x);
            ws.push(w * half);
        }
    }
    let mut acc = NeumaierSum::new();
    for (x, wx) in xs.iter().zip(&ws) {
        let mut row = NeumaierSum::new();
        for (y, wy) in xs.iter().zip(&ws) {
            row.add(wy * f(Complex64::new(center.re + x, center.im + y)));
        }
        acc.add(wx * row.value());
    }
    acc.value()
}

/// Axis-aligned node lattice of `[-radius, radius]^2`.
#[derive(Debug, Clone, Copy)]
pub struct PlaneGrid {
    pub radius: f64,
    pub n: usize,
    pub h: f64,
}

impl PlaneGrid {
    pub fn new(radius: f64, step: f64) -> Self {
        let n = ((2.0 * radius / step).ceil() as usize).max(1);
        Self {
            radius,
            n,
            h: 2.0 * radius / n as f64,
        }
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -self.radius + (i as f64 + 0.5) * self.h
    }

    /// Index range of nodes whose coordinate lies in `[lo, hi]`.
    pub fn index_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let a = ((lo + self.radius) / self.h - 0.5).ceil().max(0.0) as usize;
        let b = (((hi + self.radius) / self.h - 0.5).floor() + 1.0).max(0.0) as usize;
        a.min(self.n)..b.min(self.n)
    }

    /// Midpoint integral over nodes inside the box `[x0,x1] x [y0,y1]`.
    pub fn integrate_box<F: FnMut(Complex64) -> f64>(
        &self,
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
        mut f: F,
    ) -> f64 {
        let mut acc = NeumaierSum::new();
        for i in self.index_range(x0, x1) {
            let x = self.coord(i);
            let mut row = NeumaierSum::new();
            for j in self.index_range(y0, y1) {
                row.add(f(Complex64::new(x, self.coord(j))));
            }
            acc.add(row.value());
        }
        acc.value() * self.h * self.h
    }

    pub fn integrate<F: FnMut(Complex64) -> f64>(&self, f: F) -> f64 {
        let r = self.radius;
        self.integrate_box(-r, r, -r, r, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(6);
        // degree 11 is exact for 6 nodes
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((v - 2.0 / 11.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn disk_rule_area() {
        let rule = DiskRule::new(1.0, 0.05);
        let a = rule.integrate(Complex64::new(3.0, -1.0), |_| 1.0);
        assert!((a - PI).abs() < 1e-12);
    }

    #[test]
    fn plane_grid_gaussian() {
        let g = PlaneGrid::new(8.0, 0.05);
        let v = g.integrate(|z| (-z.norm_sqr()).exp());
        assert!((v - PI).abs() < 1e-10);
    }

    #[test]
    fn neumaier_recovers_cancellation() {
        let v = kahan_sum([1e16, 1.0, -1e16]);
        assert_eq!(v, 1.0);
    }
}
