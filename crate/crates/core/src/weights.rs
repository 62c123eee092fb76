//! Weights on the plane and their restricted Muckenhoupt-type constants.
//!
//! A [`Weight`] is an expression tree over a few closed-form families. Every
//! node evaluates `log w(z)` so that Gaussian weights never overflow; the
//! density itself is only exponentiated at the last moment.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::error::{FockError, Result};
use crate::lattice::{GridSpec, LatticePoint, Window};
use crate::quadrature::{integrate_square, square_nodes, DiskRule};

/// `log w(z) = log_scale + quad * |z|^2 + power * ln(1 + |z|)`, exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialLog {
    pub log_scale: f64,
    pub quad: f64,
    pub power: f64,
}

impl RadialLog {
    pub fn eval(&self, r: f64) -> f64 {
        self.log_scale + self.quad * r * r + self.power * r.ln_1p()
    }

    fn scaled(self, e: f64) -> Self {
        Self {
            log_scale: self.log_scale * e,
            quad: self.quad * e,
            power: self.power * e,
        }
    }

    fn plus(self, o: RadialLog) -> Self {
        Self {
            log_scale: self.log_scale + o.log_scale,
            quad: self.quad + o.quad,
            power: self.power + o.power,
        }
    }

    /// Minimum and maximum of the log-profile over radii in `[lo, hi]`.
    pub fn range_on(&self, lo: f64, hi: f64) -> (f64, f64) {
        let lo = lo.max(0.0);
        let mut cands = vec![self.eval(lo), self.eval(hi)];
        // stationary points of quad r^2 + power ln(1+r): 2 quad r (1 + r) + power = 0
        if self.quad != 0.0 {
            let (a, b, c) = (2.0 * self.quad, 2.0 * self.quad, self.power);
            let disc = b * b - 4.0 * a * c;
            if disc >= 0.0 {
                for r in [
                    (-b + disc.sqrt()) / (2.0 * a),
                    (-b - disc.sqrt()) / (2.0 * a),
                ] {
                    if r > lo && r < hi {
                        cands.push(self.eval(r));
                    }
                }
            }
        }
        let min = cands.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = cands.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (min, max)
    }
}

type DensityFn = dyn Fn(Complex64) -> f64 + Send + Sync;

enum WeightExpr {
    Const(f64),
    /// `(1 + |z|)^gamma`
    Poly(f64),
    /// `exp(beta |z|^2)`
    Exp2(f64),
    /// Indicator of `Re z >= 0`.
    RightHalfPlane,
    Product(Vec<Weight>),
    Power {
        base: Weight,
        exponent: f64,
    },
    Averaged(Arc<AveragedTable>),
    Custom(Arc<DensityFn>),
}

#[derive(Clone)]
pub struct Weight {
    expr: Arc<WeightExpr>,
    label: String,
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Weight")
            .field("label", &self.label)
            .finish()
    }
}

impl Weight {
    fn from_expr(expr: WeightExpr, label: String) -> Self {
        Self {
            expr: Arc::new(expr),
            label,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_expr(WeightExpr::Const(c), format!("const:{c}"))
    }

    pub fn unit() -> Self {
        Self::constant(1.0)
    }

    /// `(1 + |z|)^gamma`.
    pub fn poly(gamma: f64) -> Self {
        Self::from_expr(WeightExpr::Poly(gamma), format!("poly:{gamma}"))
    }

    /// `exp(beta |z|^2)`; not a restricted weight for `beta != 0`.
    pub fn exp2(beta: f64) -> Self {
        Self::from_expr(WeightExpr::Exp2(beta), format!("exp2:{beta}"))
    }

    pub fn right_half_plane() -> Self {
        Self::from_expr(WeightExpr::RightHalfPlane, "halfplane".to_string())
    }

    pub fn product(factors: Vec<Weight>) -> Self {
        let label = format!(
            "product:{}",
            factors
                .iter()
                .map(|w| format!("({})", w.label))
                .collect::<Vec<_>>()
                .join(",")
        );
        Self::from_expr(WeightExpr::Product(factors), label)
    }

    pub fn power(base: Weight, exponent: f64) -> Self {
        let label = format!("pow:{exponent}@({})", base.label);
        Self::from_expr(WeightExpr::Power { base, exponent }, label)
    }

    pub fn from_fn<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(Complex64) -> f64 + Send + Sync + 'static,
    {
        Self::from_expr(WeightExpr::Custom(Arc::new(f)), label.into())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn is_constant(&self) -> Option<f64> {
        match &*self.expr {
            WeightExpr::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// `log w(z)`, `-inf` where the weight vanishes.
    pub fn log_density(&self, z: Complex64) -> f64 {
        match &*self.expr {
            WeightExpr::Const(c) => c.ln(),
            WeightExpr::Poly(g) => g * z.norm().ln_1p(),
            WeightExpr::Exp2(b) => b * z.norm_sqr(),
            WeightExpr::RightHalfPlane => {
                if z.re >= 0.0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            WeightExpr::Product(fs) => fs.iter().map(|w| w.log_density(z)).sum(),
            WeightExpr::Power { base, exponent } => {
                let l = base.log_density(z);
                if l == f64::NEG_INFINITY && *exponent < 0.0 {
                    f64::INFINITY
                } else {
                    exponent * l
                }
            }
            WeightExpr::Averaged(t) => t.eval(z).ln(),
            WeightExpr::Custom(f) => f(z).ln(),
        }
    }

    pub fn density(&self, z: Complex64) -> f64 {
        match &*self.expr {
            WeightExpr::Const(c) => *c,
            WeightExpr::Averaged(t) => t.eval(z),
            WeightExpr::Custom(f) => f(z),
            _ => self.log_density(z).exp(),
        }
    }

    /// Exact radial log-profile when the weight is built from radial
    /// closed-form families only.
    pub fn radial_form(&self) -> Option<RadialLog> {
        match &*self.expr {
            WeightExpr::Const(c) if *c > 0.0 => Some(RadialLog {
                log_scale: c.ln(),
                quad: 0.0,
                power: 0.0,
            }),
            WeightExpr::Const(_) => None,
            WeightExpr::Poly(g) => Some(RadialLog {
                log_scale: 0.0,
                quad: 0.0,
                power: *g,
            }),
            WeightExpr::Exp2(b) => Some(RadialLog {
                log_scale: 0.0,
                quad: *b,
                power: 0.0,
            }),
            WeightExpr::Product(fs) => {
                let mut acc = RadialLog {
                    log_scale: 0.0,
                    quad: 0.0,
                    power: 0.0,
                };
                for f in fs {
                    acc = acc.plus(f.radial_form()?);
                }
                Some(acc)
            }
            WeightExpr::Power { base, exponent } => base.radial_form().map(|r| r.scaled(*exponent)),
            WeightExpr::RightHalfPlane | WeightExpr::Averaged(_) | WeightExpr::Custom(_) => None,
        }
    }

    /// `w(D(z, t))` using a prepared disk rule of radius `t`.
    pub(crate) fn disk_mass_with(&self, rule: &DiskRule, z: Complex64, t: f64) -> f64 {
        if let Some(c) = self.is_constant() {
            return c * PI * t * t;
        }
        rule.integrate(z, |u| self.density(u))
    }
}

/// `w(Q_t(z))` by the tensor midpoint rule.
pub fn mass_on_square(w: &Weight, z: Complex64, t: f64, grid: &GridSpec) -> Result<f64> {
    if !(t > 0.0) {
        return Err(FockError::Domain(format!(
            "square side {t} must be positive"
        )));
    }
    let mass = match w.is_constant() {
        Some(c) => c * t * t,
        None => integrate_square(z, t, grid.step, |u| w.density(u)),
    };
    if !(mass > 0.0) {
        return Err(FockError::NonPositiveMass {
            mass,
            re: z.re,
            im: z.im,
            side: t,
        });
    }
    Ok(mass)
}

/// `w(D(z, t))` by the polar product rule.
pub fn mass_on_disk(w: &Weight, z: Complex64, t: f64, grid: &GridSpec) -> Result<f64> {
    if !(t > 0.0) {
        return Err(FockError::Domain(format!(
            "disk radius {t} must be positive"
        )));
    }
    let rule = DiskRule::new(t, grid.step);
    let mass = w.disk_mass_with(&rule, z, t);
    if !(mass > 0.0) {
        return Err(FockError::NonPositiveMass {
            mass,
            re: z.re,
            im: z.im,
            side: 2.0 * t,
        });
    }
    Ok(mass)
}

/// Three-valued membership verdict derived from window growth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Stable,
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantReport {
    pub value: f64,
    pub argmax: Complex64,
    /// `(n_max, running supremum)` over growing windows.
    pub trace: Vec<(i64, f64)>,
    pub membership: Membership,
}

const SUBGRID: [f64; 4] = [-0.375, -0.125, 0.125, 0.375];

fn log_mean_exp(values: &[f64]) -> f64 {
    let m = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = values.iter().map(|v| (v - m).exp()).sum();
    m + (s / values.len() as f64).ln()
}

fn constant_sweep<F>(
    w: &Weight,
    t: f64,
    grid: &GridSpec,
    mut log_value: F,
) -> Result<ConstantReport>
where
    F: FnMut(&[f64], Complex64) -> Result<f64>,
{
    if !(t > 0.0) {
        return Err(FockError::Domain(format!(
            "square side {t} must be positive"
        )));
    }
    let windows = grid.window.growth_sequence();
    let mut best_per_ring: Vec<(f64, Complex64)> =
        vec![(f64::NEG_INFINITY, Complex64::new(0.0, 0.0)); grid.window.n_max as usize + 1];
    let mut logs = Vec::new();
    for nu in grid.window.cells() {
        for dx in SUBGRID {
            for dy in SUBGRID {
                let z = nu.to_complex() + Complex64::new(dx, dy);
                let (nodes, _) = square_nodes(z, t, grid.step);
                logs.clear();
                logs.extend(nodes.iter().map(|u| w.log_density(*u)));
                let lv = log_value(&logs, z)?;
                let ring = nu.sup_norm() as usize;
                if lv > best_per_ring[ring].0 {
                    best_per_ring[ring] = (lv, z);
                }
            }
        }
    }
    let mut trace = Vec::new();
    let mut best = (f64::NEG_INFINITY, Complex64::new(0.0, 0.0));
    let mut ring = 0usize;
    for win in &windows {
        while ring <= win.n_max as usize {
            if best_per_ring[ring].0 > best.0 {
                best = best_per_ring[ring];
            }
            ring += 1;
        }
        trace.push((win.n_max, best.0.exp()));
    }
    let values: Vec<f64> = trace.iter().map(|(_, v)| *v).collect();
    let first = values[0];
    let last = *values.last().unwrap();
    if values.len() >= 4 && (last / first > 10.0 || !last.is_finite()) {
        return Err(FockError::DivergentConstant { trace: values });
    }
    let membership = if values.len() >= 2 {
        let prev = values[values.len() - 2];
        if (last - prev).abs() <= 0.01 * prev {
            Membership::Stable
        } else {
            Membership::Inconclusive
        }
    } else {
        Membership::Inconclusive
    };
    Ok(ConstantReport {
        value: last,
        argmax: best.1,
        trace,
        membership,
    })
}

/// Restricted `A_p` constant: the supremum over sampled squares `Q_t(z)` of
/// `avg(w) * avg(w^{-p'/p})^{p/p'}`.
pub fn apr_constant(w: &Weight, p: f64, t: f64, grid: &GridSpec) -> Result<ConstantReport> {
    if !(p > 1.0) {
        return Err(FockError::Domain(format!("p = {p} must exceed 1")));
    }
    if let Some(c) = w.is_constant() {
        if c > 0.0 {
            let trace = grid
                .window
                .growth_sequence()
                .iter()
                .map(|win| (win.n_max, 1.0))
                .collect();
            return Ok(ConstantReport {
                value: 1.0,
                argmax: Complex64::new(0.0, 0.0),
                trace,
                membership: Membership::Stable,
            });
        }
    }
    // p'/p = 1/(p-1)
    let dual_exp = 1.0 / (p - 1.0);
    let mut scratch = Vec::new();
    constant_sweep(w, t, grid, |logs, z| {
        if logs.contains(&f64::NEG_INFINITY) {
            return Err(FockError::ZeroInfimum { re: z.re, im: z.im });
        }
        let lw = log_mean_exp(logs);
        scratch.clear();
        scratch.extend(logs.iter().map(|l| -dual_exp * l));
        let ld = log_mean_exp(&scratch);
        Ok(lw + ld / dual_exp)
    })
}

/// Restricted `A_1` constant with the essential infimum taken over nodes.
pub fn a1_constant(w: &Weight, t: f64, grid: &GridSpec) -> Result<ConstantReport> {
    constant_sweep(w, t, grid, |logs, z| {
        let min = logs.iter().cloned().fold(f64::INFINITY, f64::min);
        if min == f64::NEG_INFINITY {
            return Err(FockError::ZeroInfimum { re: z.re, im: z.im });
        }
        Ok(log_mean_exp(logs) - min)
    })
}

/// `w' = w^{-p'/p}`.
pub fn dual_weight(w: &Weight, p: f64) -> Result<Weight> {
    if !(p > 1.0) {
        return Err(FockError::Domain(format!("p = {p} must exceed 1")));
    }
    let exponent = -1.0 / (p - 1.0);
    Ok(Weight::power(w.clone(), exponent).with_label(format!("dual:{p}@({})", w.label())))
}

/// Memoized `w(Q_1(.))` on a quarter-spaced sub-lattice, bilinear in between.
pub struct AveragedTable {
    base: Weight,
    step: f64,
    cache: Mutex<HashMap<(i64, i64), f64>>,
}

const AVG_SUB: f64 = 4.0;

impl AveragedTable {
    fn node(&self, a: i64, b: i64) -> f64 {
        if let Some(v) = self.cache.lock().unwrap().get(&(a, b)) {
            return *v;
        }
        let z = Complex64::new(a as f64 / AVG_SUB, b as f64 / AVG_SUB);
        let v = match self.base.is_constant() {
            Some(c) => c,
            None => integrate_square(z, 1.0, self.step, |u| self.base.density(u)),
        };
        self.cache.lock().unwrap().insert((a, b), v);
        v
    }

    fn eval(&self, z: Complex64) -> f64 {
        let x = z.re * AVG_SUB;
        let y = z.im * AVG_SUB;
        let (a, b) = (x.floor(), y.floor());
        let (fx, fy) = (x - a, y - b);
        let (a, b) = (a as i64, b as i64);
        let v00 = self.node(a, b);
        if fx == 0.0 && fy == 0.0 {
            return v00;
        }
        let v10 = self.node(a + 1, b);
        let v01 = self.node(a, b + 1);
        let v11 = self.node(a + 1, b + 1);
        (1.0 - fx) * (1.0 - fy) * v00
            + fx * (1.0 - fy) * v10
            + (1.0 - fx) * fy * v01
            + fx * fy * v11
    }
}

/// `w_hat(z) = w(Q_1(z))`.
pub fn averaged_weight(w: &Weight, grid: &GridSpec) -> Weight {
    let table = AveragedTable {
        base: w.clone(),
        // finer than the grid: the table is memoized and radial weights
        // are only Lipschitz at the origin
        step: 0.25 * grid.step,
        cache: Mutex::new(HashMap::new()),
    };
    Weight::from_expr(
        WeightExpr::Averaged(Arc::new(table)),
        format!("hat@({})", w.label()),
    )
}

/// `w(Q_1(nu))` for every cell of a window.
#[derive(Debug, Clone)]
pub struct CellMassTable {
    pub window: Window,
    masses: Vec<f64>,
}

impl CellMassTable {
    pub fn build(w: &Weight, window: Window, grid: &GridSpec) -> Result<Self> {
        let masses = window
            .cells()
            .map(|nu| mass_on_square(w, nu.to_complex(), 1.0, grid))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { window, masses })
    }

    fn index(&self, nu: LatticePoint) -> Option<usize> {
        if !self.window.contains(nu) {
            return None;
        }
        let n = self.window.n_max;
        let side = 2 * n + 1;
        Some(((nu.j + n) * side + (nu.k + n)) as usize)
    }

    pub fn get(&self, nu: LatticePoint) -> Option<f64> {
        self.index(nu).map(|i| self.masses[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (LatticePoint, f64)> + '_ {
        self.window.cells().zip(self.masses.iter().cloned())
    }

    /// Smallest `C >= 1` bounding adjacent-cell mass ratios.
    pub fn growth_constant(&self) -> f64 {
        let mut c: f64 = 1.0;
        for (nu, m) in self.iter() {
            for nb in [
                LatticePoint::new(nu.j + 1, nu.k),
                LatticePoint::new(nu.j, nu.k + 1),
            ] {
                if let Some(m2) = self.get(nb) {
                    c = c.max(m / m2).max(m2 / m);
                }
            }
        }
        c
    }
}

/// Growth constant `C` with `w(Q_1(nu)) / w(Q_1(nu')) <= C^{|nu - nu'|}`,
/// read off adjacent pairs.
pub fn esti_growth_constant(w: &Weight, window: Window, grid: &GridSpec) -> Result<f64> {
    Ok(CellMassTable::build(w, window, grid)?.growth_constant())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::default()
    }

    fn origin() -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    #[test]
    fn constant_masses() {
        let w = Weight::unit();
        let g = grid();
        assert_eq!(
            mass_on_square(&w, Complex64::new(3.3, 1.0), 1.0, &g).unwrap(),
            1.0
        );
        assert_eq!(mass_on_square(&w, origin(), 2.0, &g).unwrap(), 4.0);
        let d = mass_on_disk(&w, origin(), 2.0, &g).unwrap();
        assert!((d - 4.0 * PI).abs() < 1e-12);
        // the generic path, not the closed form
        let w1 = Weight::from_fn("one", |_| 1.0);
        let g01 = grid().with_step(0.01).unwrap();
        let d1 = mass_on_disk(&w1, Complex64::new(0.3, -2.0), 1.0, &g01).unwrap();
        assert!((d1 - PI).abs() < 1e-4);
        let s1 = mass_on_square(&w1, origin(), 2.0, &g).unwrap();
        assert!((s1 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn square_mass_matches_richardson_oracle() {
        let w = Weight::poly(2.0);
        let f = |h: f64| {
            let g = grid().with_step(h).unwrap();
            mass_on_square(&w, origin(), 1.0, &g).unwrap()
        };
        // refinement oracle, cross-checked against the closed form
        // 1 + (sqrt 2 + ln(1 + sqrt 2)) / 3 + 1/6
        let refined = f(0.001);
        let exact = 1.0 + (2f64.sqrt() + 2f64.sqrt().ln_1p()) / 3.0 + 1.0 / 6.0;
        assert!(((refined - exact) / exact).abs() < 1e-9);
        let at = f(0.005);
        assert!(((at - refined) / refined).abs() < 1e-6, "{at} {refined}");
    }

    #[test]
    fn disk_mass_matches_radial_oracle() {
        let w = Weight::poly(-2.0);
        let v = mass_on_disk(&w, origin(), 1.0, &grid()).unwrap();
        let exact = 2.0 * PI * (2f64.ln() - 0.5);
        assert!((v - exact).abs() < 1e-6);
    }

    #[test]
    fn non_positive_mass_error() {
        let w = Weight::constant(0.0);
        assert!(matches!(
            mass_on_square(&w, origin(), 1.0, &grid()),
            Err(FockError::NonPositiveMass { .. })
        ));
    }

    #[test]
    fn apr_of_unit_weight_is_one() {
        let r = apr_constant(&Weight::unit(), 2.5, 1.0, &grid()).unwrap();
        assert_eq!(r.value, 1.0);
        let a1 = a1_constant(&Weight::unit(), 1.0, &GridSpec::new(0.1, 8.0, 4).unwrap()).unwrap();
        assert!((a1.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn apr_stable_for_polynomial_weight() {
        let w = Weight::poly(2.0);
        let g8 = GridSpec::new(0.1, 14.0, 8).unwrap();
        let g12 = GridSpec::new(0.1, 14.0, 12).unwrap();
        let a = apr_constant(&w, 2.0, 1.0, &g8).unwrap().value;
        let b = apr_constant(&w, 2.0, 1.0, &g12).unwrap().value;
        assert!(a >= 1.0 && a.is_finite());
        assert!((a - b).abs() / a < 0.01);
    }

    #[test]
    fn apr_diverges_for_gaussian_weight() {
        let w = Weight::exp2(1.0);
        let g = GridSpec::new(0.1, 14.0, 12).unwrap();
        match apr_constant(&w, 2.0, 1.0, &g) {
            Err(FockError::DivergentConstant { trace }) => {
                assert!(trace.windows(2).all(|p| p[1] >= p[0]));
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn a1_examples() {
        let g = GridSpec::new(0.1, 14.0, 12).unwrap();
        let r = a1_constant(&Weight::poly(1.0), 1.0, &g).unwrap();
        assert!(r.value >= 1.0 && r.value < 3.0);
        assert_eq!(r.membership, Membership::Stable);
        assert!(matches!(
            a1_constant(&Weight::right_half_plane(), 1.0, &g),
            Err(FockError::ZeroInfimum { .. })
        ));
    }

    #[test]
    fn dual_weight_exponents() {
        let w = Weight::poly(3.0);
        let d = dual_weight(&w, 2.0).unwrap();
        let z = Complex64::new(1.5, -0.7);
        assert!((d.density(z) - (1.0 + z.norm()).powf(-3.0)).abs() < 1e-14);
        let u = dual_weight(&Weight::unit(), 3.0).unwrap();
        assert!((u.density(z) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dual_is_involution() {
        let w = Weight::product(vec![Weight::poly(1.7), Weight::constant(2.5)]);
        for p in [1.5, 2.0, 3.0] {
            let pc = p / (p - 1.0);
            let dd = dual_weight(&dual_weight(&w, p).unwrap(), pc).unwrap();
            for i in 0..50 {
                let z = Complex64::new(i as f64 * 0.3 - 7.0, 3.0 - i as f64 * 0.11);
                let (a, b) = (w.density(z), dd.density(z));
                assert!(((a - b) / a).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn duality_band_for_poly_weight() {
        // w(Q1) * w'(Q1)^{p/p'} is bounded above and below across the window
        let g = GridSpec::new(0.05, 14.0, 12).unwrap();
        let w = Weight::poly(2.0);
        let wd = dual_weight(&w, 2.0).unwrap();
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for nu in g.window.cells() {
            let z = nu.to_complex();
            let v =
                mass_on_square(&w, z, 1.0, &g).unwrap() * mass_on_square(&wd, z, 1.0, &g).unwrap();
            lo = lo.min(v);
            hi = hi.max(v);
        }
        // Cauchy-Schwarz: w(Q) * (1/w)(Q) >= |Q|^2 = 1
        assert!(lo >= 1.0 - 1e-12, "{lo}");
        let band = crate::calibration::Calibration::builtin()
            .band("dual-poly2")
            .unwrap();
        let wide = band.widened(crate::calibration::SLACK);
        assert!(
            wide.contains(lo) && wide.contains(hi),
            "[{lo}, {hi}] vs {band}"
        );
    }

    #[test]
    fn averaged_weight_examples() {
        let g = grid();
        let one = averaged_weight(&Weight::unit(), &g);
        assert!((one.density(Complex64::new(0.3, 0.1)) - 1.0).abs() < 1e-15);
        let w = Weight::poly(2.0);
        let hat = averaged_weight(&w, &g);
        let fine = mass_on_square(&w, origin(), 1.0, &grid().with_step(0.002).unwrap()).unwrap();
        let v = hat.density(origin());
        let direct = mass_on_square(&w, origin(), 1.0, &g).unwrap();
        assert!((v / direct - 1.0).abs() < 1e-5);
        assert!((v - fine).abs() < 1e-6, "{v} {fine}");
        let nu = Complex64::new(3.0, -2.0);
        assert!((hat.density(nu) / mass_on_square(&w, nu, 1.0, &g).unwrap() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn growth_constant_examples() {
        let g = grid();
        let win = Window::new(12).unwrap();
        assert_eq!(esti_growth_constant(&Weight::unit(), win, &g).unwrap(), 1.0);
        let c = esti_growth_constant(&Weight::poly(2.0), win, &g).unwrap();
        assert!(c > 1.0 && c <= 9.0);
        let c5 = esti_growth_constant(
            &Weight::product(vec![Weight::poly(2.0), Weight::constant(5.0)]),
            win,
            &g,
        )
        .unwrap();
        assert!((c - c5).abs() < 1e-12);
    }

    #[test]
    fn apr_power_weights_window_stable() {
        let g8 = GridSpec::new(0.1, 14.0, 8).unwrap();
        let g12 = GridSpec::new(0.1, 14.0, 12).unwrap();
        for gamma in [-2.0, -1.0, 1.0, 2.0] {
            for p in [1.5, 2.0, 3.0] {
                let w = Weight::poly(gamma);
                let a = apr_constant(&w, p, 1.0, &g8).unwrap().value;
                let b = apr_constant(&w, p, 1.0, &g12).unwrap().value;
                assert!(a >= 1.0 - 1e-12);
                assert!((a - b).abs() / a < 0.01, "gamma {gamma} p {p}: {a} {b}");
            }
        }
    }
}
