//! Regimes, lattice sequences and the summing verdict for `I_d`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calibration::Calibration;
use crate::error::{FockError, Result};
use crate::lattice::{GridSpec, LatticePoint, Window};
use crate::measures::{mass_on_cell, Measure, Tri};
use crate::quadrature::{DiskRule, NeumaierSum};
use crate::weights::{mass_on_square, RadialLog, Weight};

/// Divergence needs this many consecutive growth steps of the windowed sum.
const GROWTH_STEPS: usize = 3;
const GROWTH_FACTOR: f64 = 1.2;
/// Sub-samples per axis in outer cells crossed by an atom circle.
const REFINE: usize = 8;
const TAIL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    SubTwo,
    LowR,
    MidR,
    HighR,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::SubTwo => "SubTwo",
            Regime::LowR => "LowR",
            Regime::MidR => "MidR",
            Regime::HighR => "HighR",
        })
    }
}

pub fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

/// Regime of `(p, r)` and the exponent `s` with `pi_r(I_d) ~ ||mu_hat||_{L^s}^{1/p}`.
///
/// Ties go to the lower branch; the branches agree there.
pub fn target_exponent(p: f64, r: f64) -> Result<(Regime, f64)> {
    if !(p > 1.0) || p.is_nan() {
        return Err(FockError::Domain(format!("p = {p} must exceed 1")));
    }
    if !(r >= 1.0) {
        return Err(FockError::Domain(format!("r = {r} must be at least 1")));
    }
    if p < 2.0 {
        return Ok((Regime::SubTwo, 2.0 / p));
    }
    let pc = conjugate(p);
    Ok(if r <= pc {
        (Regime::LowR, pc / p)
    } else if r <= p {
        (Regime::MidR, r / p)
    } else {
        (Regime::HighR, 1.0)
    })
}

/// Finitely supported sequence on the lattice.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiagonalSequence {
    pub values: Vec<(LatticePoint, f64)>,
}

impl DiagonalSequence {
    /// Plain vector, laid out along the first lattice axis.
    pub fn from_values(v: &[f64]) -> Self {
        Self {
            values: v
                .iter()
                .enumerate()
                .map(|(i, x)| (LatticePoint::new(i as i64, 0), *x))
                .collect(),
        }
    }

    pub fn raw(&self) -> Vec<f64> {
        self.values.iter().map(|(_, v)| *v).collect()
    }

    pub fn get(&self, nu: LatticePoint) -> f64 {
        self.values
            .iter()
            .find(|(m, _)| *m == nu)
            .map_or(0.0, |(_, v)| *v)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `mu(Q_1(nu)) / w(Q_1(nu))^{q/p}` over the window, row-major.
pub fn lattice_sequence(
    mu: &Measure,
    w: &Weight,
    q_over_p: f64,
    window: Window,
    grid: &GridSpec,
) -> Result<DiagonalSequence> {
    let values = window
        .cells()
        .map(|nu| {
            let wm = cell_weight_mass(w, nu, grid)?;
            Ok((nu, mass_on_cell(mu, nu, grid) / wm.powf(q_over_p)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiagonalSequence { values })
}

fn cell_weight_mass(w: &Weight, nu: LatticePoint, grid: &GridSpec) -> Result<f64> {
    mass_on_square(w, nu.to_complex(), 1.0, grid).map_err(|e| match e {
        FockError::NonPositiveMass { mass, re, im, .. } => {
            FockError::DegenerateWeight { mass, re, im }
        }
        other => other,
    })
}

/// `(sum |v|^s)^{1/s}`, a quasi-norm for `s < 1`; `s = inf` gives the maximum.
pub fn ls_norm_values(v: &[f64], s: f64) -> f64 {
    let m = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if s.is_infinite() || m == 0.0 || !m.is_finite() {
        return m;
    }
    let mut acc = NeumaierSum::new();
    for x in v {
        acc.add((x.abs() / m).powf(s));
    }
    m * acc.value().powf(1.0 / s)
}

pub fn ls_norm(lambda: &DiagonalSequence, s: f64) -> f64 {
    ls_norm_values(&lambda.raw(), s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    SummingCertified,
    NotSummingCertified,
    Inconclusive,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::SummingCertified => "summing_certified",
            Classification::NotSummingCertified => "not_summing_certified",
            Classification::Inconclusive => "inconclusive",
        }
    }

    pub fn as_tri(&self) -> Tri {
        match self {
            Classification::SummingCertified => Tri::True,
            Classification::NotSummingCertified => Tri::False,
            Classification::Inconclusive => Tri::Inconclusive,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Upper bound for `int mu_hat^s dA` outside the window.
#[derive(Debug, Clone, PartialEq)]
pub struct TailCertificate {
    pub bound: f64,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummingVerdict {
    pub p: f64,
    pub r: f64,
    pub alpha: f64,
    pub regime: Regime,
    pub s: f64,
    pub lattice_norm: f64,
    pub integral_norm: f64,
    pub window: Window,
    pub tail_certificate: Option<TailCertificate>,
    pub pi_r_low: f64,
    pub pi_r_high: f64,
    pub classification: Classification,
    /// `(n_max, sum of lambda^s)` over the growth windows.
    pub growth: Vec<(i64, f64)>,
}

/// One quadrature sample of `mu_hat`: `mu(D(z,1))`, `w(D(z,1))`, `mu` density at `z`, area.
#[derive(Debug, Clone, Copy)]
struct Sample {
    mu: f64,
    w: f64,
    dens: f64,
    area: f64,
}

/// Everything about `(w, mu)` the verdict needs, independent of `(p, r)`.
pub struct EmbeddingField {
    grid: GridSpec,
    cells: Vec<(LatticePoint, f64, f64)>,
    inner: Vec<Sample>,
    outer: Vec<Sample>,
    atoms_in_window: Vec<(f64, f64)>,
    zero: bool,
    has_density: bool,
    envelope_terms: Option<(Vec<RadialLog>, bool)>,
    weight_form: Option<RadialLog>,
}

impl EmbeddingField {
    pub fn build(w: &Weight, mu: &Measure, grid: &GridSpec) -> Result<Self> {
        let window = grid.window;
        let mut cells = Vec::with_capacity(window.cell_count());
        for nu in window.cells() {
            let wm = cell_weight_mass(w, nu, grid)?;
            cells.push((nu, mass_on_cell(mu, nu, grid), wm));
        }
        let rule = DiskRule::new(1.0, grid.step);
        let w_disk = |z: Complex64| -> Result<f64> {
            let m = w.disk_mass_with(&rule, z, 1.0);
            if !(m > 0.0) {
                return Err(FockError::DegenerateWeight {
                    mass: m,
                    re: z.re,
                    im: z.im,
                });
            }
            Ok(m)
        };
        let h = grid.outer_step();
        let half = window.half_side();
        // node index i sits at (i + 1/2) h, i in -n..n
        let n_in = (half / h).round() as i64;
        let h = half / n_in as f64;
        let sample_box = |n: i64, skip_inner: bool| -> Result<Vec<Sample>> {
            let mut out = Vec::new();
            for i in -n..n {
                let x = (i as f64 + 0.5) * h;
                for j in -n..n {
                    let y = (j as f64 + 0.5) * h;
                    if skip_inner && x.abs() < half && y.abs() < half {
                        continue;
                    }
                    let z = Complex64::new(x, y);
                    let wd = w_disk(z)?;
                    let dens = mu.density_at(z);
                    let dens_disk = if mu.has_density() {
                        mu.density_disk_with(&rule, z)
                    } else {
                        0.0
                    };
                    let crossing = mu.atoms().iter().any(|a| {
                        ((a.z - z).norm() - 1.0).abs() < h * std::f64::consts::FRAC_1_SQRT_2
                    });
                    if crossing {
                        let hs = h / REFINE as f64;
                        for a in 0..REFINE {
                            for b in 0..REFINE {
                                let u = Complex64::new(
                                    x - 0.5 * h + (a as f64 + 0.5) * hs,
                                    y - 0.5 * h + (b as f64 + 0.5) * hs,
                                );
                                out.push(Sample {
                                    mu: mu.atoms_in_disk(u, 1.0).0 + dens_disk,
                                    w: wd,
                                    dens,
                                    area: hs * hs,
                                });
                            }
                        }
                    } else {
                        out.push(Sample {
                            mu: mu.atoms_in_disk(z, 1.0).0 + dens_disk,
                            w: wd,
                            dens,
                            area: h * h,
                        });
                    }
                }
            }
            Ok(out)
        };
        let inner = sample_box(n_in, false)?;
        // atoms near or beyond the window edge leave an exactly computable tail
        let reach = mu
            .atoms()
            .iter()
            .map(|a| a.z.re.abs().max(a.z.im.abs()))
            .fold(0.0f64, f64::max)
            + 1.0;
        let outer = if !mu.atoms().is_empty() && reach > half {
            let n_out = (reach / h).ceil() as i64 + 1;
            sample_box(n_out, true)?
                .into_iter()
                .filter(|s| s.mu > 0.0)
                .map(|s| Sample { dens: 0.0, ..s })
                .collect()
        } else {
            Vec::new()
        };
        let atoms_in_window = mu
            .atoms()
            .iter()
            .filter(|a| window.contains(crate::lattice::cell_of(a.z)))
            .map(|a| Ok((a.mass, w_disk(a.z)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: *grid,
            cells,
            inner,
            outer,
            atoms_in_window,
            zero: mu.is_zero(),
            has_density: mu.has_density(),
            envelope_terms: mu.envelope().map(|e| (e.terms.clone(), e.sharp)),
            weight_form: w.radial_form(),
        })
    }

    pub fn window(&self) -> Window {
        self.grid.window
    }

    /// `sum lambda_nu^s` over the cells of `window`.
    pub fn lattice_sum(&self, s: f64, window: Window) -> f64 {
        let mut acc = NeumaierSum::new();
        for (nu, m, wm) in &self.cells {
            if *m > 0.0 && window.contains(*nu) {
                acc.add((m / wm).powf(s));
            }
        }
        acc.value()
    }

    /// `int_window mu_hat^s dA`.
    pub fn integral(&self, s: f64) -> f64 {
        sum_samples(&self.inner, |x| x.powf(s))
    }

    /// `sum_window mu(Q_1 nu)^gamma / w(Q_1 nu)^eta`.
    pub fn lattice_power_sum(&self, gamma: f64, eta: f64) -> f64 {
        let mut acc = NeumaierSum::new();
        for (_, m, wm) in &self.cells {
            if *m > 0.0 {
                acc.add(m.powf(gamma) / wm.powf(eta));
            }
        }
        acc.value()
    }

    /// `int_window mu(D(z,1))^gamma / w(D(z,1))^eta dA`.
    pub fn integral_power(&self, gamma: f64, eta: f64) -> f64 {
        let mut acc = NeumaierSum::new();
        for smp in &self.inner {
            if smp.mu > 0.0 {
                acc.add(smp.mu.powf(gamma) / smp.w.powf(eta) * smp.area);
            }
        }
        acc.value()
    }

    /// `int_window d mu(z) / w(D(z,1))`.
    pub fn intermediate(&self) -> f64 {
        let mut acc = NeumaierSum::new();
        for (m, wd) in &self.atoms_in_window {
            acc.add(m / wd);
        }
        for smp in &self.inner {
            if smp.dens > 0.0 {
                acc.add(smp.dens / smp.w * smp.area);
            }
        }
        acc.value()
    }

    /// Growth trace `(n, sum lambda^s)` over the window's growth sequence.
    pub fn growth(&self, s: f64) -> Vec<(i64, f64)> {
        self.grid
            .window
            .growth_sequence()
            .into_iter()
            .map(|win| (win.n_max, self.lattice_sum(s, win)))
            .collect()
    }

    /// Tail bound for `int_{outside window} mu_hat^s dA`, when one is computable.
    pub fn tail_certificate(&self, s: f64) -> Option<TailCertificate> {
        if self.zero {
            return Some(TailCertificate {
                bound: 0.0,
                source: "zero measure".into(),
            });
        }
        let atom_tail = sum_samples(&self.outer, |x| x.powf(s));
        if !self.has_density {
            return Some(TailCertificate {
                bound: atom_tail,
                source: "atoms: exact exterior quadrature".into(),
            });
        }
        let (terms, _) = self.envelope_terms.as_ref()?;
        let wf = self.weight_form?;
        let half = self.grid.window.half_side();
        let mut dens_tail = 0.0;
        for t in terms {
            if envelope_tail(t, &wf, s) != Tri::True {
                return None;
            }
            dens_tail += envelope_tail_bound(t, &wf, s, half);
        }
        let k = terms.len() as f64 + if self.outer.is_empty() { 0.0 } else { 1.0 };
        let factor = if s > 1.0 { k.powf(s - 1.0) } else { 1.0 };
        Some(TailCertificate {
            bound: factor * (dens_tail + atom_tail),
            source: "radial envelope against radial weight".into(),
        })
    }

    /// A sharp envelope proves `mu_hat` is not in `L^s`.
    fn sharp_divergence(&self, s: f64) -> bool {
        match (&self.envelope_terms, &self.weight_form) {
            (Some((terms, true)), Some(wf)) => {
                terms.iter().any(|t| envelope_tail(t, wf, s) == Tri::False)
            }
            _ => false,
        }
    }

    /// The verdict for `(p, r, alpha)`.
    pub fn verdict(&self, p: f64, r: f64, alpha: f64) -> Result<SummingVerdict> {
        if !(alpha > 0.0) {
            return Err(FockError::Domain(format!(
                "alpha = {alpha} must be positive"
            )));
        }
        let (regime, s) = target_exponent(p, r)?;
        let outer = 1.0 / (s * p);
        let growth = self.growth(s);
        let total = self.lattice_sum(s, self.grid.window);
        let lattice_norm = total.powf(outer);
        let integral_norm = self.integral(s).powf(outer);
        let tail_certificate = self.tail_certificate(s);
        let classification = if tail_certificate.is_some() {
            Classification::SummingCertified
        } else if grows(&growth) || (self.sharp_divergence(s) && strictly_increasing(&growth)) {
            Classification::NotSummingCertified
        } else {
            Classification::Inconclusive
        };
        let band = Calibration::builtin().band("pi")?;
        let kappa = (p * alpha / (2.0 * PI)).powf(1.0 / p);
        let (lo, hi) = if lattice_norm <= integral_norm {
            (lattice_norm, integral_norm)
        } else {
            (integral_norm, lattice_norm)
        };
        Ok(SummingVerdict {
            p,
            r,
            alpha,
            regime,
            s,
            lattice_norm,
            integral_norm,
            window: self.grid.window,
            tail_certificate,
            pi_r_low: band.lo * kappa * lo,
            pi_r_high: band.hi * kappa * hi,
            classification,
            growth,
        })
    }
}

fn sum_samples<F: Fn(f64) -> f64>(samples: &[Sample], f: F) -> f64 {
    let mut acc = NeumaierSum::new();
    for smp in samples {
        if smp.mu > 0.0 {
            acc.add(f(smp.mu / smp.w) * smp.area);
        }
    }
    acc.value()
}

/// Whether `int (e^{t(|z|)} / e^{w(|z|)})^s dA` converges at infinity.
fn envelope_tail(t: &RadialLog, w: &RadialLog, s: f64) -> Tri {
    let dq = t.quad - w.quad;
    if dq < -TAIL_TOL {
        Tri::True
    } else if dq > TAIL_TOL {
        Tri::False
    } else if t.quad.abs() <= TAIL_TOL && w.quad.abs() <= TAIL_TOL {
        if s * (t.power - w.power) < -2.0 - TAIL_TOL {
            Tri::True
        } else {
            Tri::False
        }
    } else {
        Tri::Inconclusive
    }
}

/// `int_{|z| > r0} (pi max_{D(z,1)} e^t / (pi min_{D(z,1)} e^w))^s dA`, by
/// radial quadrature in `ln r` and a power-law remainder.
fn envelope_tail_bound(t: &RadialLog, w: &RadialLog, s: f64, r0: f64) -> f64 {
    let log_f = |r: f64| {
        let tmax = t.range_on(r - 1.0, r + 1.0).1;
        let wmin = w.range_on(r - 1.0, r + 1.0).0;
        (2.0 * PI * r).ln() + s * (tmax - wmin)
    };
    let r_end = r0 * 1e6;
    let n = 4000;
    let (u0, u1) = (r0.ln(), r_end.ln());
    let du = (u1 - u0) / n as f64;
    let mut acc = NeumaierSum::new();
    for i in 0..=n {
        let u = u0 + i as f64 * du;
        let r = u.exp();
        let wgt = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc.add(wgt * (log_f(r) + u).exp());
    }
    let a = s * (t.power - w.power);
    let remainder = if t.quad - w.quad < -TAIL_TOL {
        0.0
    } else {
        log_f(r_end).exp() * r_end / (-2.0 - a)
    };
    acc.value() * du + remainder
}

fn grows(trace: &[(i64, f64)]) -> bool {
    let sums: Vec<f64> = trace.iter().map(|(_, v)| *v).collect();
    if sums.len() < GROWTH_STEPS + 1 {
        return false;
    }
    let tail = &sums[sums.len() - GROWTH_STEPS - 1..];
    tail.windows(2)
        .all(|w| !w[1].is_finite() || (w[0] > 0.0 && w[1] >= GROWTH_FACTOR * w[0]))
}

fn strictly_increasing(trace: &[(i64, f64)]) -> bool {
    trace.len() >= 2 && trace.windows(2).all(|w| w[1].1 > w[0].1)
}

/// `classify_embedding` for the embedding `F^p_{alpha,w} -> L^p_alpha(mu)`.
pub fn classify_embedding(
    p: f64,
    r: f64,
    alpha: f64,
    w: &Weight,
    mu: &Measure,
    grid: &GridSpec,
) -> Result<SummingVerdict> {
    target_exponent(p, r)?;
    EmbeddingField::build(w, mu, grid)?.verdict(p, r, alpha)
}

/// `pi_r(M_lambda)` on `l^p` up to constants: `||lambda||_{p'}`, `||lambda||_r` or `||lambda||_p`.
pub fn diag_summing_estimate(lambda: &[f64], p: f64, r: f64) -> Result<f64> {
    if !(p >= 2.0) {
        return Err(FockError::Domain(format!("p = {p} must be at least 2")));
    }
    if !(r >= 1.0) {
        return Err(FockError::Domain(format!("r = {r} must be at least 1")));
    }
    let pc = conjugate(p);
    let e = if r <= pc {
        pc
    } else if r <= p {
        r
    } else {
        p
    };
    Ok(ls_norm_values(lambda, e))
}

fn lp(v: &[f64], p: f64) -> f64 {
    ls_norm_values(v, p)
}

/// `sup_{||c||_{r'} <= 1} ||sum_j c_j x_j||_p` by conditional-gradient ascent.
fn weak_norm(xs: &[Vec<f64>], p: f64, r: f64, rng: &mut ChaCha8Rng) -> f64 {
    let m = xs.len();
    let n = xs[0].len();
    let combine = |c: &[f64]| -> Vec<f64> {
        let mut y = vec![0.0; n];
        for (cj, x) in c.iter().zip(xs) {
            for (yi, xi) in y.iter_mut().zip(x) {
                *yi += cj * xi;
            }
        }
        y
    };
    // maximizer of <g, c> over the unit ball of l^{r'}
    let dual_step = |g: &[f64]| -> Vec<f64> {
        if r == 1.0 {
            return g
                .iter()
                .map(|x| if *x >= 0.0 { 1.0 } else { -1.0 })
                .collect();
        }
        let nr = lp(g, r);
        if nr == 0.0 {
            return g.to_vec();
        }
        g.iter()
            .map(|x| x.signum() * (x.abs() / nr).powf(r - 1.0))
            .collect()
    };
    let ascend = |mut c: Vec<f64>| -> f64 {
        let mut val = lp(&combine(&c), p);
        for _ in 0..500 {
            let y = combine(&c);
            let ny = lp(&y, p);
            if ny == 0.0 {
                break;
            }
            let gy: Vec<f64> = y
                .iter()
                .map(|v| v.signum() * (v.abs() / ny).powf(p - 1.0))
                .collect();
            let g: Vec<f64> = xs
                .iter()
                .map(|x| x.iter().zip(&gy).map(|(a, b)| a * b).sum())
                .collect();
            let next = dual_step(&g);
            let nv = lp(&combine(&next), p);
            if nv <= val * (1.0 + 1e-8) {
                val = val.max(nv);
                break;
            }
            val = nv;
            c = next;
        }
        val
    };
    let r_dual_unit = |j: usize| -> Vec<f64> {
        let mut c = vec![0.0; m];
        c[j] = 1.0;
        c
    };
    let mut best = 0.0f64;
    for j in 0..m {
        best = best.max(ascend(r_dual_unit(j)));
    }
    for _ in 0..20 {
        let g: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        best = best.max(ascend(dual_step(&g)));
    }
    best
}

/// Lower bound for `pi_r(M_lambda : l^p_n -> l^p_n)` over test families:
/// singletons, the unit basis and seeded random families.
pub fn diag_summing_bruteforce(
    lambda: &[f64],
    p: f64,
    r: f64,
    families: usize,
    seed: u64,
) -> Result<f64> {
    let n = lambda.len();
    if n == 0 {
        return Ok(0.0);
    }
    if n > 64 {
        return Err(FockError::Domain(format!("support size {n} exceeds 64")));
    }
    if !(p >= 1.0 && r >= 1.0) {
        return Err(FockError::Domain(format!(
            "need p, r >= 1, got p={p}, r={r}"
        )));
    }
    // singletons: ratio |lambda_j|
    let mut best = lambda.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    // unit basis: weak norm is n^{max(0, 1/p - 1/r')} exactly
    let rc_inv = 1.0 - 1.0 / r;
    let weak = (n as f64).powf((1.0 / p - rc_inv).max(0.0));
    best = best.max(lp(lambda, r) / weak);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..families {
        let m = rng.gen_range(1..=n);
        let xs: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let strong: Vec<f64> = xs
            .iter()
            .map(|x| {
                lp(
                    &x.iter().zip(lambda).map(|(a, l)| a * l).collect::<Vec<_>>(),
                    p,
                )
            })
            .collect();
        let num = lp(&strong, r);
        let den = weak_norm(&xs, p, r, &mut rng);
        if den > 0.0 {
            best = best.max(num / den);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderBoundedReport {
    pub status: Tri,
    /// `int_window mu_hat_w dA`.
    pub value: f64,
    /// `int_window d mu(z) / w(D(z,1))`.
    pub intermediate: f64,
    pub tail_certificate: Option<TailCertificate>,
}

/// Order boundedness of `I_d`, decided by `mu_hat_w in L^1`.
/// The criterion does not involve `p` or `alpha`.
pub fn order_bounded_check(
    mu: &Measure,
    w: &Weight,
    _p: f64,
    _alpha: f64,
    grid: &GridSpec,
) -> Result<OrderBoundedReport> {
    let field = EmbeddingField::build(w, mu, grid)?;
    let tail_certificate = field.tail_certificate(1.0);
    let status = if tail_certificate.is_some() {
        Tri::True
    } else {
        let g = field.growth(1.0);
        if grows(&g) || (field.sharp_divergence(1.0) && strictly_increasing(&g)) {
            Tri::False
        } else {
            Tri::Inconclusive
        }
    };
    Ok(OrderBoundedReport {
        status,
        value: field.integral(1.0),
        intermediate: field.intermediate(),
        tail_certificate,
    })
}

/// `(mu(Q_1 nu) / w(Q_1 nu))^{1/p}`, the 1-summing bound of the block at `nu`.
pub fn local_summing_bound(
    mu: &Measure,
    w: &Weight,
    nu: LatticePoint,
    p: f64,
    grid: &GridSpec,
) -> Result<f64> {
    let wm = cell_weight_mass(w, nu, grid)?;
    Ok((mass_on_cell(mu, nu, grid) / wm).powf(1.0 / p))
}

/// `(sum_nu b_nu^r)^{1/r}`.
pub fn aggregate_local_bounds(bounds: &[f64], r: f64) -> f64 {
    ls_norm_values(bounds, r)
}
