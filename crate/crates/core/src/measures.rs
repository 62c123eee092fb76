//! Positive Borel measures: finitely many atoms plus an optional density.
//!
//! Tail claims (summability on the whole plane, moment bounds) are only made
//! when the measure carries an [`Envelope`]; everything else is window data.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{FockError, Result};
use crate::lattice::{cell_of, GridSpec, LatticePoint};
use crate::quadrature::{integrate_square, DiskRule, PlaneGrid};
use crate::weights::{RadialLog, Weight};

const BOUNDARY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub z: Complex64,
    pub mass: f64,
}

impl Atom {
    pub fn new(z: Complex64, mass: f64) -> Self {
        Self { z, mass }
    }
}

/// Upper bound `density(z) <= sum_i exp(term_i(|z|))`.
///
/// `sharp` additionally asserts that the true density has the same
/// integrability class as the bound, which lets divergence be certified.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub terms: Vec<RadialLog>,
    pub sharp: bool,
}

impl Envelope {
    pub fn single(log: RadialLog, sharp: bool) -> Self {
        Self {
            terms: vec![log],
            sharp,
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(r).exp()).sum()
    }

    /// Upper bound of the density over the annulus `lo <= |z| <= hi`.
    pub fn max_on(&self, lo: f64, hi: f64) -> f64 {
        self.terms.iter().map(|t| t.range_on(lo, hi).1.exp()).sum()
    }
}

type DensityFn = dyn Fn(Complex64) -> f64 + Send + Sync;

#[derive(Clone)]
pub struct Measure {
    atoms: Vec<Atom>,
    density: Option<Arc<DensityFn>>,
    envelope: Option<Envelope>,
    label: String,
}

impl fmt::Debug for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Measure")
            .field("label", &self.label)
            .field("atoms", &self.atoms.len())
            .field("density", &self.density.is_some())
            .field("envelope", &self.envelope)
            .finish()
    }
}

/// Disk mass together with the number of atoms sitting on the boundary circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskMass {
    pub value: f64,
    pub boundary_atoms: usize,
}

impl Measure {
    pub fn zero() -> Self {
        Self {
            atoms: Vec::new(),
            density: None,
            envelope: None,
            label: "zero".into(),
        }
    }

    pub fn from_atoms(atoms: Vec<Atom>) -> Result<Self> {
        if let Some(a) = atoms.iter().find(|a| !(a.mass > 0.0 && a.mass.is_finite())) {
            return Err(FockError::Domain(format!(
                "atom mass {} must be positive",
                a.mass
            )));
        }
        if let Some(a) = atoms
            .iter()
            .find(|a| !(a.z.re.is_finite() && a.z.im.is_finite()))
        {
            return Err(FockError::Domain(format!(
                "atom location {} is not finite",
                a.z
            )));
        }
        Ok(Self {
            label: format!("atoms[{}]", atoms.len()),
            atoms,
            density: None,
            envelope: None,
        })
    }

    pub fn dirac(z: Complex64, mass: f64) -> Self {
        Self::from_atoms(vec![Atom::new(z, mass)]).expect("positive mass")
    }

    pub fn from_density<F>(label: impl Into<String>, f: F, envelope: Option<Envelope>) -> Self
    where
        F: Fn(Complex64) -> f64 + Send + Sync + 'static,
    {
        Self {
            atoms: Vec::new(),
            density: Some(Arc::new(f)),
            envelope,
            label: label.into(),
        }
    }

    pub fn lebesgue() -> Self {
        let env = Envelope::single(
            RadialLog {
                log_scale: 0.0,
                quad: 0.0,
                power: 0.0,
            },
            true,
        );
        Self::from_density("lebesgue", |_| 1.0, Some(env))
    }

    /// Density `exp(-beta |z|^2)`.
    pub fn gauss(beta: f64) -> Self {
        let env = Envelope::single(
            RadialLog {
                log_scale: 0.0,
                quad: -beta,
                power: 0.0,
            },
            true,
        );
        Self::from_density(
            format!("gauss:{beta}"),
            move |z| (-beta * z.norm_sqr()).exp(),
            Some(env),
        )
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn has_density(&self) -> bool {
        self.density.is_some()
    }

    pub fn envelope(&self) -> Option<&Envelope> {
        self.envelope.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_envelope(mut self, envelope: Option<Envelope>) -> Self {
        self.envelope = envelope;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.density.is_none()
    }

    pub fn density_at(&self, z: Complex64) -> f64 {
        self.density.as_ref().map_or(0.0, |f| f(z))
    }

    pub fn atom_mass(&self) -> f64 {
        crate::quadrature::kahan_sum(self.atoms.iter().map(|a| a.mass))
    }

    /// Largest `|z|` of an atom (0 without atoms).
    pub fn atom_extent(&self) -> f64 {
        self.atoms.iter().map(|a| a.z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom::new(a.z, a.mass * c))
            .collect();
        let density = self.density.clone().map(|f| {
            let g: Arc<DensityFn> = Arc::new(move |z| c * f(z));
            g
        });
        let envelope = self.envelope.as_ref().map(|e| Envelope {
            terms: e
                .terms
                .iter()
                .map(|t| RadialLog {
                    log_scale: t.log_scale + c.ln(),
                    ..*t
                })
                .collect(),
            sharp: e.sharp,
        });
        Self {
            atoms,
            density,
            envelope,
            label: format!("{c}*({})", self.label),
        }
    }

    pub fn sum(&self, other: &Measure) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        let density: Option<Arc<DensityFn>> = match (&self.density, &other.density) {
            (None, None) => None,
            (Some(f), None) | (None, Some(f)) => Some(f.clone()),
            (Some(f), Some(g)) => {
                let (f, g) = (f.clone(), g.clone());
                Some(Arc::new(move |z| f(z) + g(z)))
            }
        };
        let envelope = match (&self.density, &other.density) {
            (None, None) => None,
            (Some(_), None) => self.envelope.clone(),
            (None, Some(_)) => other.envelope.clone(),
            (Some(_), Some(_)) => match (&self.envelope, &other.envelope) {
                (Some(a), Some(b)) => {
                    let mut terms = a.terms.clone();
                    terms.extend_from_slice(&b.terms);
                    Some(Envelope {
                        terms,
                        sharp: a.sharp && b.sharp,
                    })
                }
                _ => None,
            },
        };
        Self {
            atoms,
            density,
            envelope,
            label: format!("sum({};{})", self.label, other.label),
        }
    }

    /// Envelope domination at `probes` seeded points of `|z| <= radius`.
    pub fn envelope_dominates(&self, probes: usize, radius: f64, seed: u64) -> bool {
        let (Some(f), Some(env)) = (&self.density, &self.envelope) else {
            return true;
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..probes).all(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let z = Complex64::from_polar(r, rng.gen_range(0.0..2.0 * PI));
            f(z) <= env.eval(z.norm()) * (1.0 + 1e-12)
        })
    }

    pub(crate) fn atoms_in_disk(&self, z: Complex64, r: f64) -> (f64, usize) {
        let mut acc = crate::quadrature::NeumaierSum::new();
        let mut boundary = 0;
        for a in &self.atoms {
            let d = (a.z - z).norm();
            if (d - r).abs() < BOUNDARY_EPS {
                boundary += 1;
            }
            if d < r {
                acc.add(a.mass);
            }
        }
        (acc.value(), boundary)
    }

    pub(crate) fn density_disk_with(&self, rule: &DiskRule, z: Complex64) -> f64 {
        match &self.density {
            Some(f) => rule.integrate(z, |u| f(u)),
            None => 0.0,
        }
    }
}

/// Atoms in the window plus the density sampled on a midpoint grid of
/// spacing about `h`, as weighted points.
pub(crate) fn point_masses(
    mu: &Measure,
    window: crate::lattice::Window,
    h: f64,
) -> Vec<(Complex64, f64)> {
    let mut points: Vec<(Complex64, f64)> = mu
        .atoms
        .iter()
        .filter(|a| window.contains(cell_of(a.z)))
        .map(|a| (a.z, a.mass))
        .collect();
    if let Some(f) = &mu.density {
        let plane = PlaneGrid::new(window.half_side(), h);
        let area = plane.h * plane.h;
        for i in 0..plane.n {
            for j in 0..plane.n {
                let z = Complex64::new(plane.coord(i), plane.coord(j));
                let d = f(z);
                if d > 0.0 {
                    points.push((z, d * area));
                }
            }
        }
    }
    points
}

/// `mu(D(z, r))` with the open-disk convention.
pub fn mass_on_disk(mu: &Measure, z: Complex64, r: f64, grid: &GridSpec) -> Result<DiskMass> {
    if !(r > 0.0) {
        return Err(FockError::Domain(format!(
            "disk radius {r} must be positive"
        )));
    }
    let (atoms, boundary_atoms) = mu.atoms_in_disk(z, r);
    let dens = if mu.has_density() {
        mu.density_disk_with(&DiskRule::new(r, grid.step), z)
    } else {
        0.0
    };
    Ok(DiskMass {
        value: atoms + dens,
        boundary_atoms,
    })
}

/// `mu(Q_1(nu))` with the half-open cell convention.
pub fn mass_on_cell(mu: &Measure, nu: LatticePoint, grid: &GridSpec) -> f64 {
    let atoms = crate::quadrature::kahan_sum(
        mu.atoms
            .iter()
            .filter(|a| cell_of(a.z) == nu)
            .map(|a| a.mass),
    );
    let dens = match &mu.density {
        Some(f) => integrate_square(nu.to_complex(), 1.0, grid.step, |u| f(u)),
        None => 0.0,
    };
    atoms + dens
}

/// `mu(D(z,1)) / w(D(z,1))`.
pub fn mu_hat(mu: &Measure, w: &Weight, z: Complex64, grid: &GridSpec) -> Result<f64> {
    let rule = DiskRule::new(1.0, grid.step);
    let denom = w.disk_mass_with(&rule, z, 1.0);
    if !(denom > 0.0) {
        return Err(FockError::DegenerateWeight {
            mass: denom,
            re: z.re,
            im: z.im,
        });
    }
    Ok(mass_on_disk(mu, z, 1.0, grid)?.value / denom)
}

/// Affine composition symbol `phi(z) = a z + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineSymbol {
    pub a: Complex64,
    pub b: Complex64,
}

impl AffineSymbol {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.a * z + self.b
    }
}

/// Polynomial `g(z) = sum_k c_k z^k` in the monomial basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialSymbol {
    coeffs: Vec<Complex64>,
}

impl PolynomialSymbol {
    /// Trailing zero coefficients are dropped.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == Complex64::new(0.0, 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|c| Complex64::new(*c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> PolynomialSymbol {
        if self.coeffs.len() == 1 {
            return PolynomialSymbol::new(vec![Complex64::new(0.0, 0.0)]);
        }
        PolynomialSymbol::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }
}

/// Pull-back of `exp(-(p alpha/2)|u|^2) dA(u)` through `phi`, reweighted so
/// that `||C_phi f||^p = int |f|^p exp(-(p alpha/2)|z|^2) d mu_phi`.
pub fn pullback_measure(phi: &AffineSymbol, p: f64, alpha: f64) -> Result<Measure> {
    if !(p > 0.0 && alpha > 0.0) {
        return Err(FockError::Domain(format!(
            "need p > 0 and alpha > 0, got p={p}, alpha={alpha}"
        )));
    }
    let (a, b) = (phi.a, phi.b);
    let c = 0.5 * p * alpha;
    let label = format!("pullback:{},{},{},{}", a.re, a.im, b.re, b.im);
    let abs_a = a.norm();
    if abs_a == 0.0 {
        let mass = (PI / c) * (c * b.norm_sqr()).exp();
        return Ok(Measure::dirac(b, mass).with_label(label));
    }
    let inv_a2 = 1.0 / a.norm_sqr();
    let density =
        move |v: Complex64| inv_a2 * (-c * (((v - b) / a).norm_sqr() - v.norm_sqr())).exp();
    let envelope = if abs_a < 1.0 {
        // |v-b|^2 >= (1-eps)|v|^2 - (1/eps - 1)|b|^2 with eps = (1-|a|^2)/2
        let eps = 0.5 * (1.0 - abs_a * abs_a);
        Some(Envelope::single(
            RadialLog {
                log_scale: inv_a2.ln() + c * (1.0 / eps - 1.0) * b.norm_sqr() * inv_a2,
                quad: -c * (1.0 - abs_a * abs_a) * inv_a2 * 0.5,
                power: 0.0,
            },
            false,
        ))
    } else if abs_a > 1.0 {
        // Gaussian growth: the same bound with eps = 1/2 keeps a positive rate
        let eps = 0.5;
        Some(Envelope::single(
            RadialLog {
                log_scale: inv_a2.ln() + c * (1.0 / eps - 1.0) * b.norm_sqr() * inv_a2,
                quad: c * (1.0 - (1.0 - eps) * inv_a2),
                power: 0.0,
            },
            true,
        ))
    } else if b.norm() == 0.0 {
        Some(Envelope::single(
            RadialLog {
                log_scale: 0.0,
                quad: 0.0,
                power: 0.0,
            },
            true,
        ))
    } else {
        None
    };
    Ok(Measure::from_density(label, density, envelope))
}

/// `d mu_{g,p} = |g'(z)|^p / (1+|z|)^p dA`.
pub fn volterra_measure(g: &PolynomialSymbol, p: f64) -> Result<Measure> {
    if !(p > 0.0) {
        return Err(FockError::Domain(format!("p = {p} must be positive")));
    }
    let label = format!(
        "volterra:{}",
        g.coeffs()
            .iter()
            .map(|c| format!("{}", c.re))
            .collect::<Vec<_>>()
            .join(",")
    );
    if g.degree() == 0 {
        return Ok(Measure::zero().with_label(label));
    }
    let dg = g.derivative();
    let bound: f64 = dg.coeffs().iter().map(|c| c.norm()).sum();
    let d = g.degree() as f64;
    let envelope = Envelope::single(
        RadialLog {
            log_scale: p * bound.ln(),
            quad: 0.0,
            power: (d - 2.0) * p,
        },
        true,
    );
    let density = move |z: Complex64| (dg.eval(z).norm() / (1.0 + z.norm())).powf(p);
    Ok(Measure::from_density(label, density, Some(envelope)))
}

/// `w_{kp}(z) = w(z) / (1+|z|)^{kp}`.
pub fn tilted_weight(w: &Weight, k: i64, p: f64) -> Weight {
    if k == 0 {
        return w.clone();
    }
    let gamma = k as f64 * p;
    Weight::product(vec![w.clone(), Weight::poly(-gamma)])
        .with_label(format!("tilt:{k},{p}@({})", w.label()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tri {
    True,
    False,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub status: Tri,
    /// `int |z|^{lp} exp(-(p alpha/2)|z|^2) d mu` over the truncated plane.
    pub moments: Vec<f64>,
    pub reason: String,
}

/// Moment hypothesis for `l = 0..=l_max`.
pub fn moment_condition(
    mu: &Measure,
    p: f64,
    alpha: f64,
    l_max: usize,
    grid: &GridSpec,
) -> MomentReport {
    let c = 0.5 * p * alpha;
    let plane = PlaneGrid::new(grid.radius, grid.step);
    let moments: Vec<f64> = (0..=l_max)
        .map(|l| {
            let e = l as f64 * p;
            let atoms = crate::quadrature::kahan_sum(
                mu.atoms()
                    .iter()
                    .map(|a| a.mass * a.z.norm().powf(e) * (-c * a.z.norm_sqr()).exp()),
            );
            let dens = if mu.has_density() {
                plane.integrate(|z| {
                    let r2 = z.norm_sqr();
                    let g = r2.sqrt().powf(e) * (-c * r2).exp();
                    if g == 0.0 {
                        0.0
                    } else {
                        g * mu.density_at(z)
                    }
                })
            } else {
                0.0
            };
            atoms + dens
        })
        .collect();
    if !mu.has_density() {
        return MomentReport {
            status: Tri::True,
            moments,
            reason: "finitely many atoms".into(),
        };
    }
    let Some(env) = mu.envelope() else {
        return MomentReport {
            status: Tri::Inconclusive,
            moments,
            reason: "missing envelope: density tail cannot be certified".into(),
        };
    };
    let mut all_finite = true;
    for t in &env.terms {
        let q = t.quad - c;
        for l in 0..=l_max {
            let power = t.power + l as f64 * p;
            if !tail_integrable(q, power, 1.0) {
                all_finite = false;
            }
        }
    }
    let (status, reason) = if all_finite {
        (Tri::True, "envelope certifies every moment".to_string())
    } else if env.sharp {
        (Tri::False, "sharp envelope: a moment diverges".to_string())
    } else {
        (
            Tri::Inconclusive,
            "envelope too coarse to certify moments".to_string(),
        )
    };
    MomentReport {
        status,
        moments,
        reason,
    }
}

/// Whether `int exp(s (q r^2 + power ln(1+r))) dA` is finite.
pub(crate) fn tail_integrable(quad: f64, power: f64, s: f64) -> bool {
    const TOL: f64 = 1e-9;
    if quad < -TOL {
        true
    } else if quad > TOL {
        false
    } else {
        s * power < -2.0 - TOL
    }
}
