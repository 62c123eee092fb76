//! Cross-verification reports.
//!
//! Every two-sided equivalence is checked as a measured ratio band: bands
//! are measured on [`CALIBRATION_SEED`], pinned in the calibration file, and
//! re-checked with relative slack [`SLACK`] on other seeds.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calibration::{Band, Calibration, SLACK};
use crate::error::Result;
use crate::fock::{
    berezin_opnorm_bounds, kernel_norm, pointwise_bound_check, synthesize_test_function,
};
use crate::lattice::{GridSpec, LatticePoint, Window};
use crate::measures::{mass_on_cell, point_masses, pullback_measure, AffineSymbol, Atom, Measure};
use crate::quadrature::{NeumaierSum, PlaneGrid};
use crate::summing::{
    classify_embedding, conjugate, diag_summing_bruteforce, diag_summing_estimate, ls_norm_values,
    Classification, EmbeddingField,
};
use crate::weights::{averaged_weight, dual_weight, mass_on_square, Weight};

/// Seed the pinned bands were measured with.
pub const CALIBRATION_SEED: u64 = 0;

/// Exponent pairs `(gamma, eta)` of the lattice/integral equivalence.
pub const LATTICE_INTEGRAL_EXPONENTS: [(f64, f64); 3] = [(0.5, 0.5), (1.0, 1.0), (2.0, 1.0)];
pub const BRIDGE_EXPONENTS: [f64; 3] = [1.25, 1.5, 1.75];

/// Independent per-case seed.
pub fn derive_seed(seed: u64, case: u64) -> u64 {
    let mut z = seed ^ (case.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `n` atoms uniform in `D(0, radius)` with masses uniform in `[0.1, 1)`.
pub fn seeded_atoms(n: usize, radius: f64, seed: u64) -> Measure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms = (0..n)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let z = Complex64::from_polar(r, rng.gen_range(0.0..2.0 * PI));
            Atom::new(z, rng.gen_range(0.1..1.0))
        })
        .collect();
    Measure::from_atoms(atoms).expect("positive masses")
}

/// The three weight families of the lattice/integral check.
pub fn lattice_integral_weights() -> Vec<(&'static str, Weight)> {
    vec![
        ("unit", Weight::unit()),
        ("poly2", Weight::poly(2.0)),
        ("polym2", Weight::poly(-2.0)),
    ]
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

pub fn lattice_integral_band_id(weight: &str, gamma: f64, eta: f64) -> String {
    format!("li-{weight}-{}-{}", fmt_num(gamma), fmt_num(eta))
}

pub fn bridge_band_id(p: f64) -> String {
    format!("bridge-{}", fmt_num(p))
}

/// Outcome of one band check.
#[derive(Debug, Clone, PartialEq)]
pub struct BandCheck {
    pub id: String,
    pub min: f64,
    pub max: f64,
    pub band: Band,
    pub pass: bool,
}

impl BandCheck {
    fn new(id: String, values: &[f64], band: Band) -> Self {
        let (min, max) = min_max(values);
        let wide = band.widened(SLACK);
        Self {
            pass: wide.contains(min) && wide.contains(max),
            id,
            min,
            max,
            band,
        }
    }

    /// Only the upper edge is checked.
    fn upper(id: String, values: &[f64], band: Band) -> Self {
        let (min, max) = min_max(values);
        Self {
            pass: max <= band.widened(SLACK).hi,
            id,
            min,
            max,
            band,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: min {} max {} band {} (slack {})",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            g12(self.min),
            g12(self.max),
            self.band,
            SLACK
        )
    }
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
            (a.min(*x), b.max(*x))
        })
}

/// `%.12g`-style formatting.
pub fn g12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let exp = x.abs().log10().floor() as i32;
    let s = if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        trim_zeros(&s)
    } else {
        let s = format!("{x:.11e}");
        let (m, e) = s.split_once('e').unwrap();
        let e: i32 = e.parse().unwrap();
        format!(
            "{}e{}{:02}",
            trim_zeros(m),
            if e < 0 { '-' } else { '+' },
            e.abs()
        )
    };
    // rounding can carry into a new digit, e.g. 9.99999999999995
    if s.len() > 20 {
        return format!("{x:e}");
    }
    s
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Pass/fail summary of a verification suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub lines: Vec<String>,
    pub pass: bool,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            lines: Vec::new(),
            pass: true,
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.lines
            .push(format!("{} {line}", if ok { "PASS" } else { "FAIL" }));
    }

    fn band(&mut self, b: BandCheck) {
        self.pass &= b.pass;
        self.lines.push(b.line());
    }

    pub fn render(&self) -> String {
        let mut out = format!("suite {}\n", self.name);
        for l in &self.lines {
            let _ = writeln!(out, "  {l}");
        }
        let _ = writeln!(
            out,
            "suite {}: {}",
            self.name,
            if self.pass { "PASS" } else { "FAIL" }
        );
        out
    }
}

fn oracle_grid() -> GridSpec {
    GridSpec::new(0.05, 10.0, 6).expect("valid grid")
}

// ---------------------------------------------------------------- lattice vs integral

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeIntegralRow {
    pub case: usize,
    pub weight: String,
    pub gamma: f64,
    pub eta: f64,
    pub lattice: f64,
    pub integral: f64,
    pub ratio: f64,
    /// Largest relative change of the ratio under `mu -> c mu`, `c in {1e-3, 1e3}`.
    pub scale_error: f64,
}

/// Both sides of the lattice/integral equivalence for one measure and weight.
pub fn lattice_integral_sides(
    mu: &Measure,
    w: &Weight,
    gamma: f64,
    eta: f64,
    grid: &GridSpec,
) -> Result<(f64, f64)> {
    let f = EmbeddingField::build(w, mu, grid)?;
    Ok((
        f.lattice_power_sum(gamma, eta),
        f.integral_power(gamma, eta),
    ))
}

/// `cases` seeded atomic measures against every weight family and exponent pair.
pub fn verify_lattice_integral_equivalence(
    cases: usize,
    seed: u64,
) -> Result<Vec<LatticeIntegralRow>> {
    let grid = oracle_grid();
    let mut rows = Vec::new();
    for case in 0..cases {
        let mu = seeded_atoms(20, 4.0, derive_seed(seed, case as u64));
        for (name, w) in lattice_integral_weights() {
            let fields: Vec<EmbeddingField> = [1.0, 1e-3, 1e3]
                .iter()
                .map(|c| EmbeddingField::build(&w, &mu.scaled(*c), &grid))
                .collect::<Result<_>>()?;
            for (gamma, eta) in LATTICE_INTEGRAL_EXPONENTS {
                let ratio_of = |f: &EmbeddingField| {
                    f.lattice_power_sum(gamma, eta) / f.integral_power(gamma, eta)
                };
                let ratio = ratio_of(&fields[0]);
                let scale_error = fields[1..]
                    .iter()
                    .map(|f| (ratio_of(f) / ratio - 1.0).abs())
                    .fold(0.0, f64::max);
                rows.push(LatticeIntegralRow {
                    case,
                    weight: name.into(),
                    gamma,
                    eta,
                    lattice: fields[0].lattice_power_sum(gamma, eta),
                    integral: fields[0].integral_power(gamma, eta),
                    ratio,
                    scale_error,
                });
            }
        }
    }
    Ok(rows)
}

fn lattice_integral_ratios(
    rows: &[LatticeIntegralRow],
    weight: &str,
    gamma: f64,
    eta: f64,
) -> Vec<f64> {
    rows.iter()
        .filter(|r| r.weight == weight && r.gamma == gamma && r.eta == eta)
        .map(|r| r.ratio)
        .collect()
}

pub fn suite_lattice_integral(seed: u64, cases: usize) -> Result<SuiteReport> {
    let cal = Calibration::builtin();
    let mut rep = SuiteReport::new("lattice-integral");
    let (one_l, one_i) = lattice_integral_sides(
        &Measure::dirac(Complex64::new(0.0, 0.0), 1.0),
        &Weight::unit(),
        1.0,
        1.0,
        &oracle_grid(),
    )?;
    rep.check(
        (one_l / one_i - 1.0).abs() < 1e-3,
        format!("unit atom: lattice {} integral {}", g12(one_l), g12(one_i)),
    );
    let rows = verify_lattice_integral_equivalence(cases, seed)?;
    let worst = rows.iter().map(|r| r.scale_error).fold(0.0, f64::max);
    rep.check(
        worst <= 1e-9,
        format!("scale invariance: worst relative change {worst:e}"),
    );
    for (name, _) in lattice_integral_weights() {
        for (gamma, eta) in LATTICE_INTEGRAL_EXPONENTS {
            let id = lattice_integral_band_id(name, gamma, eta);
            rep.band(BandCheck::new(
                id.clone(),
                &lattice_integral_ratios(&rows, name, gamma, eta),
                cal.band(&id)?,
            ));
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------- Gaussian bridge

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeReport {
    /// `int (int exp(-alpha |z-u|^2) d mu(z))^{p'/2} w(u)^{-p'/p} dA(u)`.
    pub b_side: f64,
    /// `sum_nu lambda_nu^{p'/2}` with `lambda_nu = mu(Q_1 nu) / w(Q_1 nu)^{2/p}`.
    pub d_side: f64,
    pub ratio: f64,
}

pub fn verify_prop33_equivalence(
    p: f64,
    alpha: f64,
    w: &Weight,
    mu: &Measure,
    grid: &GridSpec,
) -> Result<BridgeReport> {
    if !(p > 1.0 && p < 2.0) {
        return Err(crate::FockError::Domain(format!(
            "p = {p} must lie in (1, 2)"
        )));
    }
    let pc = conjugate(p);
    let e = 0.5 * pc;
    let window = grid.window;
    let mut d = NeumaierSum::new();
    for nu in window.cells() {
        let m = mass_on_cell(mu, nu, grid);
        if m > 0.0 {
            let wm = mass_on_square(w, nu.to_complex(), 1.0, grid)?;
            d.add((m / wm.powf(2.0 / p)).powf(e));
        }
    }
    let points = point_masses(mu, window, grid.outer_step());
    if points.is_empty() {
        return Ok(BridgeReport {
            b_side: 0.0,
            d_side: d.value(),
            ratio: f64::NAN,
        });
    }
    let reach = (60.0 / (alpha * e)).sqrt() + 1.0;
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for (z, _) in &points {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    let r = grid.radius;
    let plane = PlaneGrid::new(r, grid.step);
    let dual_exp = -pc / p;
    let b = plane.integrate_box(
        (x0 - reach).max(-r),
        (x1 + reach).min(r),
        (y0 - reach).max(-r),
        (y1 + reach).min(r),
        |u| {
            let mut g = 0.0;
            for (z, m) in &points {
                let d2 = (z - u).norm_sqr();
                if alpha * d2 < 745.0 {
                    g += m * (-alpha * d2).exp();
                }
            }
            if g == 0.0 {
                0.0
            } else {
                g.powf(e) * (dual_exp * w.log_density(u)).exp()
            }
        },
    );
    let d = d.value();
    Ok(BridgeReport {
        b_side: b,
        d_side: d,
        ratio: b / d,
    })
}

fn bridge_ratios(p: f64, cases: usize, seed: u64) -> Result<Vec<f64>> {
    let grid = oracle_grid();
    (0..cases)
        .map(|i| {
            let mu = seeded_atoms(10, 3.0, derive_seed(seed, i as u64));
            Ok(verify_prop33_equivalence(p, 1.0, &Weight::unit(), &mu, &grid)?.ratio)
        })
        .collect()
}

pub fn suite_bridge(seed: u64, cases: usize) -> Result<SuiteReport> {
    let cal = Calibration::builtin();
    let grid = oracle_grid();
    let mut rep = SuiteReport::new("bridge");
    for p in BRIDGE_EXPONENTS {
        let mu = seeded_atoms(10, 3.0, derive_seed(seed, 1000));
        let a = verify_prop33_equivalence(p, 1.0, &Weight::unit(), &mu, &grid)?;
        let b = verify_prop33_equivalence(p, 1.0, &Weight::unit(), &mu.scaled(5.0), &grid)?;
        let k = 5f64.powf(0.5 * conjugate(p));
        let err = (b.b_side / a.b_side / k - 1.0)
            .abs()
            .max((b.d_side / a.d_side / k - 1.0).abs());
        rep.check(
            err < 1e-9,
            format!("p = {p}: both sides scale as c^(p'/2), relative error {err:e}"),
        );
        let id = bridge_band_id(p);
        rep.band(BandCheck::new(
            id.clone(),
            &bridge_ratios(p, cases, seed)?,
            cal.band(&id)?,
        ));
    }
    Ok(rep)
}

// ---------------------------------------------------------------- HS oracle

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsReport {
    /// `sqrt(alpha mu(C) / pi)`.
    pub exact: f64,
    pub pi_low: f64,
    pub pi_high: f64,
    pub bracketed: bool,
    pub band_factor: f64,
}

/// `pi_2` of `F^2_alpha -> L^2_alpha(mu)` is its Hilbert-Schmidt norm.
pub fn verify_hs_oracle(alpha: f64, mu: &Measure, grid: &GridSpec) -> Result<HsReport> {
    let v = classify_embedding(2.0, 2.0, alpha, &Weight::unit(), mu, grid)?;
    let exact = (alpha * mu.atom_mass() / PI).sqrt();
    Ok(HsReport {
        exact,
        pi_low: v.pi_r_low,
        pi_high: v.pi_r_high,
        bracketed: v.pi_r_low <= exact && exact <= v.pi_r_high,
        band_factor: v.pi_r_high / v.pi_r_low,
    })
}

pub fn suite_hs(seed: u64) -> Result<SuiteReport> {
    let grid = GridSpec::new(0.05, 10.0, 6)?;
    let mut rep = SuiteReport::new("hs");
    let d = verify_hs_oracle(1.0, &Measure::dirac(Complex64::new(0.0, 0.0), 1.0), &grid)?;
    rep.check(
        (d.exact - 1.0 / PI.sqrt()).abs() < 1e-15 && d.bracketed,
        format!(
            "unit atom: exact {} in [{}, {}]",
            g12(d.exact),
            g12(d.pi_low),
            g12(d.pi_high)
        ),
    );
    let mu = seeded_atoms(50, 3.0, derive_seed(seed, 0));
    let a = verify_hs_oracle(1.0, &mu, &grid)?;
    rep.check(
        a.bracketed && a.band_factor <= 3.0,
        format!(
            "50 atoms: exact {} in [{}, {}], band factor {}",
            g12(a.exact),
            g12(a.pi_low),
            g12(a.pi_high),
            g12(a.band_factor)
        ),
    );
    let b = verify_hs_oracle(1.0, &mu.scaled(4.0), &grid)?;
    rep.check(
        (b.exact / a.exact - 2.0).abs() < 1e-12,
        "exact value scales as sqrt(c)".into(),
    );
    Ok(rep)
}

// ---------------------------------------------------------------- Berezin

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerezinReport {
    /// `lower^{q/2}`.
    pub lower_pow: f64,
    pub proxy: f64,
    pub ratio: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn verify_berezin_equivalence(
    p: f64,
    q: f64,
    alpha: f64,
    w: &Weight,
    mu: &Measure,
    trials: usize,
    seed: u64,
    grid: &GridSpec,
) -> Result<BerezinReport> {
    let b = berezin_opnorm_bounds(p, q, alpha, w, mu, trials, seed, grid)?;
    let lower_pow = b.lower.powf(0.5 * q);
    Ok(BerezinReport {
        lower_pow,
        proxy: b.lattice_proxy,
        ratio: lower_pow / b.lattice_proxy,
    })
}

fn berezin_ratios(cases: usize, seed: u64) -> Result<Vec<f64>> {
    let grid = GridSpec::new(0.1, 10.0, 6)?;
    (0..cases)
        .map(|i| {
            let s = derive_seed(seed, i as u64);
            let mu = seeded_atoms(30, 4.0, s);
            Ok(
                verify_berezin_equivalence(1.5, 2.0, 1.0, &Weight::unit(), &mu, 40, s, &grid)?
                    .ratio,
            )
        })
        .collect()
}

pub fn suite_berezin(seed: u64, cases: usize) -> Result<SuiteReport> {
    let cal = Calibration::builtin();
    let grid = GridSpec::new(0.1, 10.0, 6)?;
    let mut rep = SuiteReport::new("berezin");
    let z = verify_berezin_equivalence(
        1.5,
        2.0,
        1.0,
        &Weight::unit(),
        &Measure::zero(),
        5,
        seed,
        &grid,
    )?;
    rep.check(
        z.lower_pow == 0.0 && z.proxy == 0.0,
        "zero measure: both sides 0".into(),
    );
    let mu = seeded_atoms(30, 4.0, derive_seed(seed, 99));
    let a = verify_berezin_equivalence(1.5, 2.0, 1.0, &Weight::unit(), &mu, 20, seed, &grid)?;
    let b = verify_berezin_equivalence(
        1.5,
        2.0,
        1.0,
        &Weight::unit(),
        &mu.scaled(3.0),
        20,
        seed,
        &grid,
    )?;
    let err = (b.lower_pow / a.lower_pow / 3.0 - 1.0)
        .abs()
        .max((b.proxy / a.proxy / 3.0 - 1.0).abs());
    rep.check(
        err < 1e-9,
        format!("linear scaling in mu, relative error {err:e}"),
    );
    rep.band(BandCheck::new(
        "berezin".into(),
        &berezin_ratios(cases, seed)?,
        cal.band("berezin")?,
    ));
    Ok(rep)
}

// ---------------------------------------------------------------- diagonal

#[derive(Debug, Clone, PartialEq)]
pub struct DiagCase {
    pub lambda: Vec<f64>,
    pub p: f64,
    pub r: f64,
    pub lower: f64,
    pub formula: f64,
}

/// `cases` seeded sequences of length at most 16 over `p in {2,3,4}`,
/// `r in {1, p', 2, p, p+1}`.
pub fn verify_diag_consistency(cases: usize, seed: u64) -> Result<Vec<DiagCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cases)
        .map(|i| {
            let p = [2.0, 3.0, 4.0][i % 3];
            let rs = [1.0, conjugate(p), 2.0, p, p + 1.0];
            let r = rs[(i / 3) % rs.len()];
            let n = rng.gen_range(1..=16);
            let lambda: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let lower = diag_summing_bruteforce(&lambda, p, r, 8, derive_seed(seed, i as u64))?;
            let formula = diag_summing_estimate(&lambda, p, r)?;
            Ok(DiagCase {
                lambda,
                p,
                r,
                lower,
                formula,
            })
        })
        .collect()
}

pub fn suite_diag(seed: u64, cases: usize) -> Result<SuiteReport> {
    let cal = Calibration::builtin();
    let mut rep = SuiteReport::new("diag");
    let mut worst = 0.0f64;
    for (p, r) in [(2.0, 1.0), (2.0, 2.0), (3.0, 1.5), (3.0, 2.0), (4.0, 5.0)] {
        for v in [0.3, 1.0, 2.5] {
            let lb = diag_summing_bruteforce(&[v], p, r, 5, seed)?;
            worst = worst.max((lb - v).abs() / v);
        }
    }
    rep.check(
        worst <= 1e-6,
        format!("rank one: worst relative error {worst:e}"),
    );
    let id8 = diag_summing_bruteforce(&[1.0; 8], 2.0, 2.0, 5, seed)?;
    rep.check(
        (id8 / 8f64.sqrt() - 1.0).abs() <= 0.1,
        format!(
            "identity on l2^8: {} vs sqrt(8) = {}",
            g12(id8),
            g12(8f64.sqrt())
        ),
    );
    let rows = verify_diag_consistency(cases, seed)?;
    let ratios: Vec<f64> = rows.iter().map(|c| c.lower / c.formula).collect();
    rep.band(BandCheck::upper("diag".into(), &ratios, cal.band("diag")?));
    Ok(rep)
}

// ---------------------------------------------------------------- monotonicity

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityRow {
    pub symbol: AffineSymbol,
    pub q: f64,
    pub beta: f64,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    /// Symbols whose base verdict at `(p, alpha)` was certified summing.
    pub premises: usize,
    pub rows: Vec<MonotonicityRow>,
    pub holds: bool,
}

/// For each pull-back measure `mu_phi` built at `(p, alpha)` that is certified
/// `r`-summing there, re-classify the same measure at every `(q, beta)`.
pub fn verify_monotonicity(
    symbols: &[AffineSymbol],
    p: f64,
    r: f64,
    alpha: f64,
    qs: &[f64],
    betas: &[f64],
    grid: &GridSpec,
) -> Result<MonotonicityReport> {
    let mut rows = Vec::new();
    let mut premises = 0;
    for phi in symbols {
        let mu = pullback_measure(phi, p, alpha)?;
        let field = EmbeddingField::build(&Weight::unit(), &mu, grid)?;
        if field.verdict(p, r, alpha)?.classification != Classification::SummingCertified {
            continue;
        }
        premises += 1;
        for &q in qs {
            for &beta in betas {
                rows.push(MonotonicityRow {
                    symbol: *phi,
                    q,
                    beta,
                    classification: field.verdict(q, r, beta)?.classification,
                });
            }
        }
    }
    let holds = rows
        .iter()
        .all(|r| r.classification == Classification::SummingCertified);
    Ok(MonotonicityReport {
        premises,
        rows,
        holds,
    })
}

// ---------------------------------------------------------------- Fock-space bands

/// `direct / proxy` of the kernel norm over lattice points `|u| <= 5`.
pub fn kernel_ratios(w: &Weight, p: f64, grid: &GridSpec) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for j in -5i64..=5 {
        for k in -5i64..=5 {
            if j * j + k * k <= 25 {
                out.push(kernel_norm(Complex64::new(j as f64, k as f64), p, 1.0, w, grid)?.ratio());
            }
        }
    }
    Ok(out)
}

fn random_coefficients(rng: &mut ChaCha8Rng, window: Window) -> Vec<(LatticePoint, Complex64)> {
    let n = rng.gen_range(1..=6);
    let span = window.n_max.min(4);
    (0..n)
        .map(|_| {
            (
                LatticePoint::new(rng.gen_range(-span..=span), rng.gen_range(-span..=span)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            )
        })
        .collect()
}

/// `||f||_{F^p_{alpha,w}} / ||f||_{F^p_{alpha,w_hat}}` for `count` random test functions.
pub fn hat_ratios(
    w: &Weight,
    p: f64,
    count: usize,
    seed: u64,
    grid: &GridSpec,
) -> Result<Vec<f64>> {
    let hat = averaged_weight(w, grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let f = synthesize_test_function(
                &random_coefficients(&mut rng, grid.window),
                p,
                1.0,
                w,
                grid,
            )?;
            Ok(f.norm(grid) / f.norm_with_weight(&hat, grid))
        })
        .collect()
}

/// `||f|| / ||c||_{l^p}` for `count` random coefficient maps.
pub fn synthesis_ratios(
    w: &Weight,
    p: f64,
    count: usize,
    seed: u64,
    grid: &GridSpec,
) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut coeffs = random_coefficients(&mut rng, grid.window);
            coeffs.sort_by_key(|(nu, _)| (nu.j, nu.k));
            coeffs.dedup_by_key(|(nu, _)| *nu);
            let f = synthesize_test_function(&coeffs, p, 1.0, w, grid)?;
            let c: Vec<f64> = coeffs.iter().map(|(_, c)| c.norm()).collect();
            Ok(f.norm(grid) / ls_norm_values(&c, p))
        })
        .collect()
}

/// Mean-value ratios at random `(f, z)` with `|z| <= 4`, `t = 1`.
pub fn pointwise_ratios(
    w: &Weight,
    p: f64,
    count: usize,
    seed: u64,
    grid: &GridSpec,
) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let f = synthesize_test_function(
                &random_coefficients(&mut rng, grid.window),
                p,
                1.0,
                w,
                grid,
            )?;
            let z =
                Complex64::from_polar(4.0 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
            pointwise_bound_check(&f, z, 1.0, grid)
        })
        .collect()
}

/// `w(Q_1 nu) w'(Q_1 nu)^{p/p'}` over the window.
pub fn duality_products(w: &Weight, p: f64, grid: &GridSpec) -> Result<Vec<f64>> {
    let wd = dual_weight(w, p)?;
    let e = p / conjugate(p);
    grid.window
        .cells()
        .map(|nu| {
            let z = nu.to_complex();
            Ok(mass_on_square(w, z, 1.0, grid)? * mass_on_square(&wd, z, 1.0, grid)?.powf(e))
        })
        .collect()
}

fn fock_grid() -> GridSpec {
    GridSpec::new(0.1, 16.0, 6).expect("valid grid")
}

pub fn suite_fock(seed: u64) -> Result<SuiteReport> {
    let cal = Calibration::builtin();
    let g = GridSpec::default();
    let fg = fock_grid();
    let w = Weight::poly(2.0);
    let mut rep = SuiteReport::new("fock");
    rep.band(BandCheck::new(
        "kernel-poly2".into(),
        &kernel_ratios(&w, 2.0, &g)?,
        cal.band("kernel-poly2")?,
    ));
    rep.band(BandCheck::new(
        "hat-poly2".into(),
        &hat_ratios(&w, 2.0, 20, seed, &fg)?,
        cal.band("hat-poly2")?,
    ));
    for (name, wt) in [("unit", Weight::unit()), ("poly2", w.clone())] {
        let id = format!("synthesis-{name}");
        rep.band(BandCheck::upper(
            id.clone(),
            &synthesis_ratios(&wt, 2.0, 20, seed, &fg)?,
            cal.band(&id)?,
        ));
        let id = format!("pointwise-{name}");
        rep.band(BandCheck::upper(
            id.clone(),
            &pointwise_ratios(&wt, 2.0, 50, seed, &fg)?,
            cal.band(&id)?,
        ));
    }
    rep.band(BandCheck::new(
        "dual-poly2".into(),
        &duality_products(&w, 2.0, &g)?,
        cal.band("dual-poly2")?,
    ));
    Ok(rep)
}

// ---------------------------------------------------------------- calibration

/// Re-measure every band on `seed` and render a calibration file.
/// Calibration samples this many times more cases than a verification run.
pub const CALIBRATION_FACTOR: usize = 5;

pub fn measure_bands(seed: u64) -> Result<String> {
    let mut out = String::from(
        "# Pinned ratio bands. Each record: case id, band lo, band hi.\n\
         # Measured by `fock-summing calibrate`; re-checked with a relative slack of 0.2.\n\
         version 1\n",
    );
    let mut push = |id: &str, v: &[f64]| {
        let (lo, hi) = min_max(v);
        let _ = writeln!(out, "{id} {} {}", g12(lo), g12(hi));
    };
    push("pi", &[0.6, 1.7]);
    let k = CALIBRATION_FACTOR;
    let rows = verify_lattice_integral_equivalence(20 * k, seed)?;
    for (name, _) in lattice_integral_weights() {
        for (gamma, eta) in LATTICE_INTEGRAL_EXPONENTS {
            push(
                &lattice_integral_band_id(name, gamma, eta),
                &lattice_integral_ratios(&rows, name, gamma, eta),
            );
        }
    }
    for p in BRIDGE_EXPONENTS {
        push(&bridge_band_id(p), &bridge_ratios(p, 10 * k, seed)?);
    }
    push("berezin", &berezin_ratios(10 * k, seed)?);
    let diag: Vec<f64> = verify_diag_consistency(50 * k, seed)?
        .iter()
        .map(|c| c.lower / c.formula)
        .collect();
    push("diag", &diag);
    let g = GridSpec::default();
    let fg = fock_grid();
    let w = Weight::poly(2.0);
    push("kernel-poly2", &kernel_ratios(&w, 2.0, &g)?);
    push("hat-poly2", &hat_ratios(&w, 2.0, 20 * k, seed, &fg)?);
    for (name, wt) in [("unit", Weight::unit()), ("poly2", w.clone())] {
        push(
            &format!("synthesis-{name}"),
            &synthesis_ratios(&wt, 2.0, 20 * k, seed, &fg)?,
        );
        push(
            &format!("pointwise-{name}"),
            &pointwise_ratios(&wt, 2.0, 50 * k, seed, &fg)?,
        );
    }
    push("dual-poly2", &duality_products(&w, 2.0, &g)?);
    Ok(out)
}

/// Every named suite, in a fixed order.
pub const SUITES: [&str; 6] = [
    "lattice-integral",
    "bridge",
    "hs",
    "berezin",
    "diag",
    "fock",
];

pub fn run_suite(name: &str, seed: u64) -> Result<Vec<SuiteReport>> {
    Ok(match name {
        "lattice-integral" => vec![suite_lattice_integral(seed, 20)?],
        "bridge" => vec![suite_bridge(seed, 10)?],
        "hs" => vec![suite_hs(seed)?],
        "berezin" => vec![suite_berezin(seed, 10)?],
        "diag" => vec![suite_diag(seed, 50)?],
        "fock" => vec![suite_fock(seed)?],
        "all" => {
            let mut v = Vec::new();
            for s in SUITES {
                v.extend(run_suite(s, seed)?);
            }
            v
        }
        other => return Err(crate::FockError::Parse(format!("unknown suite {other:?}"))),
    })
}
