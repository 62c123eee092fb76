//! Fock-space primitives.
//!
//! Every integrand is assembled from the bounded Gaussian factor
//! `exp(-(alpha/2)|z-u|^2)`: a normalized kernel satisfies
//! `K_u(z) exp(-(alpha/2)|z|^2) / ||K_u|| = exp(-(alpha/2)|z-u|^2 + i alpha Im(conj(u) z)) / n_u`
//! with a reduced normalizer `n_u` of order one, so nothing overflows.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{FockError, Result};
use crate::lattice::{Cell, GridSpec, LatticePoint};
use crate::measures::{mass_on_cell, Measure};
use crate::quadrature::{DiskRule, NeumaierSum, PlaneGrid};
use crate::summing::ls_norm_values;
use crate::weights::{averaged_weight, mass_on_square, Weight};

/// Relative size below which Gaussian tails are dropped from integrals.
const LOG_CUTOFF: f64 = 60.0;

/// Reproducing kernel `K_u(z) = exp(alpha conj(u) z)` of `F^2_alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelFunction {
    pub u: Complex64,
    pub alpha: f64,
}

impl KernelFunction {
    pub fn new(u: Complex64, alpha: f64) -> Self {
        Self { u, alpha }
    }

    /// `log |K_u(z)|`.
    pub fn log_abs(&self, z: Complex64) -> f64 {
        self.alpha * (self.u.conj() * z).re
    }

    /// `|K_u(z)| exp(-(alpha/2)(|z|^2 + |u|^2))`, assembled in the log domain.
    pub fn normalized_abs(&self, z: Complex64) -> f64 {
        (self.log_abs(z) - 0.5 * self.alpha * (z.norm_sqr() + self.u.norm_sqr())).exp()
    }
}

/// Both sides of the kernel-norm equivalence, stored as logarithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelNorm {
    /// `log ||K_u||^p` by quadrature.
    pub log_direct: f64,
    /// `log( exp((p alpha/2)|u|^2) w(D(u,1)) )`.
    pub log_proxy: f64,
}

impl KernelNorm {
    pub fn direct(&self) -> f64 {
        self.log_direct.exp()
    }

    pub fn proxy(&self) -> f64 {
        self.log_proxy.exp()
    }

    pub fn ratio(&self) -> f64 {
        (self.log_direct - self.log_proxy).exp()
    }
}

/// Half-width beyond which `exp(-c d^2) w` is negligible relative to its peak.
fn gaussian_reach(c: f64, w: &Weight, radius: f64) -> f64 {
    let growth = w.radial_form().map_or(0.0, |r| r.quad.max(0.0));
    if growth >= c {
        return 2.0 * radius;
    }
    (LOG_CUTOFF / (c - growth)).sqrt() + 1.0
}

/// `int exp(-c |z-u|^2) w(z) dA(z)` over the truncated plane, with the
/// truncation check.
fn gaussian_weight_integral(u: Complex64, c: f64, w: &Weight, grid: &GridSpec) -> Result<f64> {
    let plane = PlaneGrid::new(grid.radius, grid.step);
    let reach = gaussian_reach(c, w, grid.radius);
    let r = grid.radius;
    let mut peak = f64::NEG_INFINITY;
    let val = plane.integrate_box(
        (u.re - reach).max(-r),
        (u.re + reach).min(r),
        (u.im - reach).max(-r),
        (u.im + reach).min(r),
        |z| {
            let l = -c * (z - u).norm_sqr() + w.log_density(z);
            if l > peak {
                peak = l;
            }
            l.exp()
        },
    );
    // integrand on the boundary of [-R, R]^2
    let mut boundary = f64::NEG_INFINITY;
    let n = ((2.0 * r / grid.step).ceil() as usize).clamp(8, 4000);
    for i in 0..=n {
        let t = -r + 2.0 * r * i as f64 / n as f64;
        for z in [
            Complex64::new(t, -r),
            Complex64::new(t, r),
            Complex64::new(-r, t),
            Complex64::new(r, t),
        ] {
            boundary = boundary.max(-c * (z - u).norm_sqr() + w.log_density(z));
        }
    }
    let ratio = (boundary - peak).exp();
    if ratio > 1e-10 {
        return Err(FockError::TruncationTooTight { ratio });
    }
    Ok(val)
}

/// `||K_u||^p_{F^p_{alpha,w}}` by quadrature and by the disk-mass proxy.
pub fn kernel_norm(
    u: Complex64,
    p: f64,
    alpha: f64,
    w: &Weight,
    grid: &GridSpec,
) -> Result<KernelNorm> {
    if !(p > 0.0 && alpha > 0.0) {
        return Err(FockError::Domain(format!(
            "need p, alpha > 0, got p={p}, alpha={alpha}"
        )));
    }
    if u.norm() + 3.0 > grid.radius {
        return Err(FockError::Domain(format!(
            "|u| + 3 = {} exceeds the truncation radius {}",
            u.norm() + 3.0,
            grid.radius
        )));
    }
    let c = 0.5 * p * alpha;
    let integral = gaussian_weight_integral(u, c, w, grid)?;
    let disk = w.disk_mass_with(&DiskRule::new(1.0, grid.step), u, 1.0);
    Ok(KernelNorm {
        log_direct: c * u.norm_sqr() + integral.ln(),
        log_proxy: c * u.norm_sqr() + disk.ln(),
    })
}

/// `f = sum_nu c_nu K_nu / ||K_nu||_{F^p_{alpha,w}}` over finitely many cells.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub coefficients: Vec<(LatticePoint, Complex64)>,
    /// `n_nu = ||K_nu|| exp(-(alpha/2)|nu|^2)`.
    pub reduced_norms: Vec<f64>,
    pub alpha: f64,
    pub p: f64,
    pub weight: Weight,
}

impl TestFunction {
    /// Kernel normalizers `||K_nu||_{F^p_{alpha,w}}`, as logarithms.
    pub fn log_normalizers(&self) -> Vec<f64> {
        self.coefficients
            .iter()
            .zip(&self.reduced_norms)
            .map(|((nu, _), n)| 0.5 * self.alpha * nu.to_complex().norm_sqr() + n.ln())
            .collect()
    }

    /// `f(z) exp(-(alpha/2)|z|^2)`.
    pub fn eval_reduced(&self, z: Complex64) -> Complex64 {
        let a = self.alpha;
        let mut acc = Complex64::new(0.0, 0.0);
        for ((nu, c), n) in self.coefficients.iter().zip(&self.reduced_norms) {
            let v = nu.to_complex();
            let d2 = (z - v).norm_sqr();
            if 0.5 * a * d2 > LOG_CUTOFF {
                continue;
            }
            let phase = a * (v.conj() * z).im;
            acc += c * Complex64::from_polar((-0.5 * a * d2).exp() / n, phase);
        }
        acc
    }

    /// `f(z)` itself; overflows for large `|z|`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_reduced(z) * (0.5 * self.alpha * z.norm_sqr()).exp()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|(_, c)| c.norm() == 0.0)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for (_, c) in &mut out.coefficients {
            *c *= s;
        }
        out
    }

    fn support_box(&self) -> Option<(f64, f64, f64, f64)> {
        let reach = (2.0 * LOG_CUTOFF / self.alpha).sqrt() + 1.0;
        let mut it = self.coefficients.iter().map(|(nu, _)| nu.to_complex());
        let first = it.next()?;
        let (mut x0, mut x1, mut y0, mut y1) = (first.re, first.re, first.im, first.im);
        for z in it {
            x0 = x0.min(z.re);
            x1 = x1.max(z.re);
            y0 = y0.min(z.im);
            y1 = y1.max(z.im);
        }
        Some((x0 - reach, x1 + reach, y0 - reach, y1 + reach))
    }

    /// `||f||_{F^p_{alpha,v}}` for an arbitrary weight `v`.
    pub fn norm_with_weight(&self, v: &Weight, grid: &GridSpec) -> f64 {
        let Some((x0, x1, y0, y1)) = self.support_box() else {
            return 0.0;
        };
        let r = grid.radius;
        let plane = PlaneGrid::new(r, grid.step);
        let p = self.p;
        let s = plane.integrate_box(x0.max(-r), x1.min(r), y0.max(-r), y1.min(r), |z| {
            let m = self.eval_reduced(z).norm();
            if m == 0.0 {
                0.0
            } else {
                m.powf(p) * v.density(z)
            }
        });
        s.powf(1.0 / p)
    }

    /// `||f||_{F^p_{alpha,w}}`.
    pub fn norm(&self, grid: &GridSpec) -> f64 {
        self.norm_with_weight(&self.weight, grid)
    }
}

/// Normalized-kernel synthesis of a test function.
pub fn synthesize_test_function(
    coefficients: &[(LatticePoint, Complex64)],
    p: f64,
    alpha: f64,
    w: &Weight,
    grid: &GridSpec,
) -> Result<TestFunction> {
    if let Some((nu, _)) = coefficients
        .iter()
        .find(|(nu, _)| !grid.window.contains(*nu))
    {
        return Err(FockError::Domain(format!(
            "coefficient at {nu} lies outside the window"
        )));
    }
    let c = 0.5 * p * alpha;
    let reduced_norms = coefficients
        .iter()
        .map(|(nu, _)| {
            gaussian_weight_integral(nu.to_complex(), c, w, grid).map(|i| i.powf(1.0 / p))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TestFunction {
        coefficients: coefficients.to_vec(),
        reduced_norms,
        alpha,
        p,
        weight: w.clone(),
    })
}

/// Local mean-value ratio
/// `|f(z)|^p e^{-(p alpha/2)|z|^2} / ( w(D(z,t))^{-1} int_{D(z,t)} |f|^p e^{-(p alpha/2)|u|^2} w dA )`.
pub fn pointwise_bound_check(
    f: &TestFunction,
    z: Complex64,
    t: f64,
    grid: &GridSpec,
) -> Result<f64> {
    if z.norm() + t > grid.radius {
        return Err(FockError::Domain(format!(
            "disk D({z}, {t}) leaves the truncation"
        )));
    }
    let p = f.p;
    let num = f.eval_reduced(z).norm().powf(p);
    if num == 0.0 {
        return Ok(0.0);
    }
    let rule = DiskRule::new(t, grid.step);
    let wmass = f.weight.disk_mass_with(&rule, z, t);
    let local = rule.integrate(z, |u| {
        f.eval_reduced(u).norm().powf(p) * f.weight.density(u)
    });
    Ok(num * wmass / local)
}

/// `<f, g>_alpha = int f conj(g) exp(-alpha |z|^2) dA`.
pub fn dual_pairing(f: &TestFunction, g: &TestFunction, grid: &GridSpec) -> Result<Complex64> {
    if (f.alpha - g.alpha).abs() > 0.0 {
        return Err(FockError::Domain("pairing needs a common alpha".into()));
    }
    let (Some(a), Some(b)) = (f.support_box(), g.support_box()) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    // the product is negligible outside the intersection of the two boxes
    let r = grid.radius;
    let (x0, x1) = (a.0.max(b.0).max(-r), a.1.min(b.1).min(r));
    let (y0, y1) = (a.2.max(b.2).max(-r), a.3.min(b.3).min(r));
    if x0 >= x1 || y0 >= y1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let plane = PlaneGrid::new(r, grid.step);
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    let h2 = plane.h * plane.h;
    for i in plane.index_range(x0, x1) {
        let x = plane.coord(i);
        for j in plane.index_range(y0, y1) {
            let z = Complex64::new(x, plane.coord(j));
            let v = f.eval_reduced(z) * g.eval_reduced(z).conj();
            re.add(v.re);
            im.add(v.im);
        }
    }
    Ok(Complex64::new(re.value() * h2, im.value() * h2))
}

/// `B_alpha f(z) = int f(u) exp(-alpha |z-u|^2) dA(u)`.
pub fn berezin_transform<F: Fn(Complex64) -> f64>(
    f: F,
    alpha: f64,
    z: Complex64,
    grid: &GridSpec,
) -> f64 {
    let reach = (LOG_CUTOFF / alpha).sqrt() + 1.0;
    let r = grid.radius;
    let plane = PlaneGrid::new(r, grid.step);
    plane.integrate_box(
        (z.re - reach).max(-r),
        (z.re + reach).min(r),
        (z.im - reach).max(-r),
        (z.im + reach).min(r),
        |u| {
            let g = (-alpha * (z - u).norm_sqr()).exp();
            if g == 0.0 {
                0.0
            } else {
                f(u) * g
            }
        },
    )
}

/// `int_{Q_1(nu)} exp(-alpha |x - u|^2) dA(u)` in closed form.
pub fn berezin_of_cell(nu: LatticePoint, alpha: f64, x: Complex64) -> f64 {
    let sa = alpha.sqrt();
    let k = 0.5 * (PI / alpha).sqrt();
    let one_d = |center: f64, t: f64| {
        let (a, b) = (center - 0.5, center + 0.5);
        k * (libm::erf(sa * (b - t)) - libm::erf(sa * (a - t)))
    };
    one_d(nu.j as f64, x.re) * one_d(nu.k as f64, x.im)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerezinBounds {
    /// Best `||B f||_{L^{q/2}(mu)} / ||f||` found by the search.
    pub lower: f64,
    /// `||lambda||_{l^s}` with `lambda_nu = mu(Q_1 nu) / w(Q_1 nu)^{q/p}`.
    pub lattice_proxy: f64,
    pub s: f64,
}

/// Lower bound for `||B_alpha : L^{p/(2-p)}(w_hat^{2/(2-p)} dA) -> L^{q/2}(mu)||`
/// by seeded search over nonnegative cell-step functions, plus the lattice proxy.
#[allow(clippy::too_many_arguments)]
pub fn berezin_opnorm_bounds(
    p: f64,
    q: f64,
    alpha: f64,
    w: &Weight,
    mu: &Measure,
    trials: usize,
    seed: u64,
    grid: &GridSpec,
) -> Result<BerezinBounds> {
    if !(p > 1.0 && p < 2.0) {
        return Err(FockError::Domain(format!("p = {p} must lie in (1, 2)")));
    }
    if !(1.0..=2.0).contains(&q) {
        return Err(FockError::Domain(format!("q = {q} must lie in [1, 2]")));
    }
    let s = 2.0 * p / (2.0 * p - 2.0 * q + p * q);
    if mu.is_zero() {
        return Ok(BerezinBounds {
            lower: 0.0,
            lattice_proxy: 0.0,
            s,
        });
    }
    let window = grid.window;

    // lattice proxy
    let mut lambda = Vec::with_capacity(window.cell_count());
    for nu in window.cells() {
        let m = mass_on_cell(mu, nu, grid);
        if m == 0.0 {
            continue;
        }
        let wm = mass_on_square(w, nu.to_complex(), 1.0, grid)?;
        lambda.push(m / wm.powf(q / p));
    }
    let lattice_proxy = ls_norm_values(&lambda, s);

    // point masses the transform is tested against
    let points = crate::measures::point_masses(mu, window, grid.outer_step());
    let reach = (LOG_CUTOFF / alpha).sqrt() + 1.0;
    let cells: Vec<LatticePoint> = window
        .cells()
        .filter(|nu| {
            points
                .iter()
                .any(|(z, _)| Cell::new(*nu).distance_to(*z) < reach)
        })
        .collect();
    if cells.is_empty() || points.is_empty() {
        return Ok(BerezinBounds {
            lower: 0.0,
            lattice_proxy,
            s,
        });
    }

    // V_nu = int_{Q_1 nu} w_hat^{2/(2-p)} dA
    let big_p = p / (2.0 - p);
    let v_exp = 2.0 / (2.0 - p);
    let hat = averaged_weight(w, grid);
    let v: Vec<f64> = cells
        .iter()
        .map(|nu| match w.is_constant() {
            Some(c) => c.powf(v_exp),
            None => crate::quadrature::integrate_square(nu.to_complex(), 1.0, 0.25, |u| {
                hat.density(u).powf(v_exp)
            }),
        })
        .collect();
    let kernel: Vec<Vec<f64>> = points
        .iter()
        .map(|(z, _)| {
            cells
                .iter()
                .map(|nu| berezin_of_cell(*nu, alpha, *z))
                .collect()
        })
        .collect();
    let half_q = 0.5 * q;
    let ratio = |a: &[f64]| -> f64 {
        let denom: f64 = a
            .iter()
            .zip(&v)
            .map(|(ai, vi)| ai.powf(big_p) * vi)
            .sum::<f64>()
            .powf(1.0 / big_p);
        if denom == 0.0 {
            return 0.0;
        }
        let mut acc = NeumaierSum::new();
        for ((_, m), row) in points.iter().zip(&kernel) {
            let bf: f64 = row.iter().zip(a).map(|(k, ai)| k * ai).sum();
            acc.add(m * bf.powf(half_q));
        }
        acc.value().powf(1.0 / half_q) / denom
    };

    // guided start: Hoelder extremal of the diagonal approximation
    let cell_mass: Vec<f64> = cells
        .iter()
        .map(|nu| {
            points
                .iter()
                .filter(|(z, _)| crate::lattice::cell_of(*z) == *nu)
                .map(|(_, m)| m)
                .sum::<f64>()
        })
        .collect();
    let expo = 1.0 / (2.0 * big_p / q - 1.0);
    let guided: Vec<f64> = cell_mass
        .iter()
        .zip(&v)
        .map(|(m, vi)| (m / vi).powf(expo).powf(2.0 / q))
        .collect();
    let mut best = ratio(&guided);
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(
            seed ^ (trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        let a: Vec<f64> = if trial % 2 == 0 {
            guided
                .iter()
                .map(|g| {
                    let z: f64 = rng.gen_range(-1.0..1.0);
                    g * (0.75 * z).exp() + 1e-3 * rng.gen::<f64>() * g
                })
                .collect()
        } else {
            cells
                .iter()
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        rng.gen::<f64>()
                    } else {
                        0.0
                    }
                })
                .collect()
        };
        let val = ratio(&a);
        if val > best {
            best = val;
        }
    }
    Ok(BerezinBounds {
        lower: best,
        lattice_proxy,
        s,
    })
}
