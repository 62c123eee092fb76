//! The ten acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so every line is printed; exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use fock_summing::calibration::{Calibration, SLACK};
use fock_summing::measures::Tri;
use fock_summing::measures::{mass_on_disk, pullback_measure};
use fock_summing::operators::{
    classify_composition, classify_volterra, Agreement, CompositionSymbol, OperatorVerdict,
};
use fock_summing::oracle::{
    bridge_band_id, lattice_integral_band_id, seeded_atoms, verify_diag_consistency,
    verify_lattice_integral_equivalence, verify_monotonicity, verify_prop33_equivalence,
    BRIDGE_EXPONENTS, LATTICE_INTEGRAL_EXPONENTS,
};
use fock_summing::quadrature::PlaneGrid;
use fock_summing::summing::{
    conjugate, diag_summing_bruteforce, diag_summing_estimate, order_bounded_check, EmbeddingField,
};
use fock_summing::{
    classify_embedding, fock, target_exponent, AffineSymbol, Atom, Classification, Complex64,
    GridSpec, Measure, PolynomialSymbol, Regime, Weight,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeds never used for calibration.
const FRESH_SEEDS: [u64; 2] = [20_261_018, 777];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn hs_exactness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(FRESH_SEEDS[0]);
    let atoms: Vec<Atom> = (0..50)
        .map(|_| {
            let r = 3.0 * rng.gen::<f64>().sqrt();
            let t = rng.gen_range(0.0..2.0 * PI);
            Atom::new(Complex64::from_polar(r, t), rng.gen_range(0.05..2.0))
        })
        .collect();
    let total: f64 = atoms.iter().map(|a| a.mass).sum();
    let exact = (total / PI).sqrt();
    let mu = Measure::from_atoms(atoms).unwrap();
    let v = classify_embedding(2.0, 2.0, 1.0, &Weight::unit(), &mu, &GridSpec::default()).unwrap();
    let elapsed = start.elapsed();
    let factor = v.pi_r_high / v.pi_r_low;
    outcome(
        v.pi_r_low <= exact
            && exact <= v.pi_r_high
            && factor <= 3.0
            && elapsed < Duration::from_secs(10),
        format!(
            "pi_2 = {exact:.6} in [{:.6}, {:.6}], factor {factor:.3}, {:.2}s",
            v.pi_r_low,
            v.pi_r_high,
            elapsed.as_secs_f64()
        ),
    )
}

fn composition_case_one() -> Outcome {
    let phi = AffineSymbol::new(c(1.0, 0.0), c(0.0, 0.0));
    let mu = pullback_measure(&phi, 2.0, 1.0).unwrap();
    let fine = GridSpec::default().with_step(0.01).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(FRESH_SEEDS[1]);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let z = c(rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0));
        let m = mass_on_disk(&mu, z, 1.0, &fine).unwrap().value;
        worst = worst.max((m - PI).abs());
    }
    let grid = GridSpec::default();
    let mut wrong = Vec::new();
    for p in [1.5, 2.0, 3.0] {
        for r in [1.0, 2.0, 5.0] {
            let rep =
                classify_composition(&CompositionSymbol::Affine(phi), p, r, 1.0, &grid).unwrap();
            if rep.verdict != OperatorVerdict::NotSumming {
                wrong.push(format!("(p={p}, r={r}) -> {}", rep.verdict));
            }
        }
    }
    outcome(
        worst <= 1e-3 && wrong.is_empty(),
        format!("max |mu_phi(D(z,1)) - pi| = {worst:.2e}; non-NOT_SUMMING cells: {wrong:?}"),
    )
}

/// Closed-form truth: composition by a z is summing iff |a| < 1; `J_g` is
/// summing iff g is constant, or g is affine when both p and r exceed 2.
fn truth_tables() -> Outcome {
    let start = Instant::now();
    let grid = GridSpec::default();
    let mut mismatches = Vec::new();
    let mut disagreements = Vec::new();
    let (mut certified, mut total) = (0, 0);
    for p in [1.5, 2.0, 3.0] {
        for r in [1.0, 2.0, 3.0] {
            for a in [0.0, 0.5, 1.0] {
                let sym = CompositionSymbol::Affine(AffineSymbol::new(c(a, 0.0), c(0.0, 0.0)));
                let rep = classify_composition(&sym, p, r, 1.0, &grid).unwrap();
                let expect = if a < 1.0 {
                    OperatorVerdict::Summing
                } else {
                    OperatorVerdict::NotSumming
                };
                if rep.verdict != expect {
                    mismatches.push(format!("C a={a} p={p} r={r}"));
                }
                total += 1;
                match rep.agreement {
                    Agreement::Agree => certified += 1,
                    Agreement::Disagree => disagreements.push(format!("C a={a} p={p} r={r}")),
                    _ => {}
                }
            }
            for deg in 0..=2usize {
                let mut coeffs = vec![0.0; deg + 1];
                coeffs[deg] = 1.0;
                let g = PolynomialSymbol::from_real(&coeffs);
                let rep = classify_volterra(&g, p, r, 1.0, &grid).unwrap();
                let summing = if p > 2.0 && r > 2.0 {
                    deg <= 1
                } else {
                    deg == 0
                };
                let expect = if summing {
                    OperatorVerdict::Summing
                } else {
                    OperatorVerdict::NotSumming
                };
                if rep.verdict != expect {
                    mismatches.push(format!("J deg={deg} p={p} r={r}"));
                }
                total += 1;
                match rep.agreement {
                    Agreement::Agree => certified += 1,
                    Agreement::Disagree => disagreements.push(format!("J deg={deg} p={p} r={r}")),
                    _ => {}
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches.is_empty() && disagreements.is_empty() && elapsed < Duration::from_secs(60),
        format!(
            "{total} cells, mismatches {mismatches:?}, numeric agree {certified}/{total}, disagree {disagreements:?}, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn regime_algebra() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for p in [2.0, 2.5, 3.0, 4.0, 7.0] {
        let pc = conjugate(p);
        // r = p': LowR value p'/p equals the MidR formula r/p
        let (reg, s) = target_exponent(p, pc).unwrap();
        ok &= reg == Regime::LowR && s == pc / p;
        // r = p: MidR value r/p equals the HighR value 1 (at p = 2, r = p = p' is LowR)
        let (reg, s) = target_exponent(p, p).unwrap();
        ok &= reg == if p == 2.0 { Regime::LowR } else { Regime::MidR } && s == 1.0;
        let (reg, s) = target_exponent(p, p * (1.0 + f64::EPSILON)).unwrap();
        ok &= reg == Regime::HighR && s == 1.0;
    }
    // p = 2: the sub-two formula 2/p and the low-r formula p'/p both give 1
    for r in [1.0, 1.5, 2.0] {
        let (_, s) = target_exponent(2.0, r).unwrap();
        ok &= s == 1.0;
        let (_, below) = target_exponent(2.0 * (1.0 - f64::EPSILON), r).unwrap();
        ok &= (below - 1.0).abs() <= 4.0 * f64::EPSILON;
    }
    if !ok {
        notes.push("boundary mismatch".to_string());
    }
    let grid = GridSpec::new(0.05, 12.0, 8).unwrap();
    let w = Weight::poly(1.5);
    let mu = seeded_atoms(25, 5.0, FRESH_SEEDS[0]);
    let f1 = EmbeddingField::build(&w, &mu, &grid).unwrap();
    let mut worst = 0.0f64;
    for scale in [1e-3, 7.5, 1e3] {
        let fc = EmbeddingField::build(&w, &mu.scaled(scale), &grid).unwrap();
        for (p, r) in [(1.5, 1.0), (2.0, 2.0), (3.0, 1.2), (3.0, 2.5), (3.0, 5.0)] {
            let a = f1.verdict(p, r, 1.0).unwrap().lattice_norm;
            let b = fc.verdict(p, r, 1.0).unwrap().lattice_norm;
            worst = worst.max((b / a / scale.powf(1.0 / p) - 1.0).abs());
        }
    }
    notes.push(format!("homogeneity worst relative error {worst:.2e}"));
    outcome(ok && worst <= 1e-9, notes.join("; "))
}

fn lattice_integral() -> Outcome {
    let cal = Calibration::builtin();
    let mut pass = true;
    let mut worst_scale = 0.0f64;
    let mut failures = Vec::new();
    for seed in FRESH_SEEDS {
        let rows = verify_lattice_integral_equivalence(20, seed).unwrap();
        worst_scale = rows
            .iter()
            .map(|r| r.scale_error)
            .fold(worst_scale, f64::max);
        for name in ["unit", "poly2", "polym2"] {
            for (gamma, eta) in LATTICE_INTEGRAL_EXPONENTS {
                let id = lattice_integral_band_id(name, gamma, eta);
                let band = cal.band(&id).unwrap().widened(SLACK);
                for r in rows
                    .iter()
                    .filter(|r| r.weight == name && r.gamma == gamma && r.eta == eta)
                {
                    if !band.contains(r.ratio) {
                        pass = false;
                        failures.push(format!("{id} seed {seed} case {}: {:.4}", r.case, r.ratio));
                    }
                }
            }
        }
    }
    outcome(
        pass && worst_scale <= 1e-9,
        format!("scale invariance {worst_scale:.2e}; out of band: {failures:?}"),
    )
}

fn bridge() -> Outcome {
    let cal = Calibration::builtin();
    let grid = GridSpec::new(0.05, 10.0, 6).unwrap();
    let mut pass = true;
    let mut notes = Vec::new();
    for p in BRIDGE_EXPONENTS {
        let band = cal.band(&bridge_band_id(p)).unwrap().widened(SLACK);
        let e = 0.5 * conjugate(p);
        let mut range = (f64::INFINITY, 0.0f64);
        let mut scale_err = 0.0f64;
        for i in 0..10u64 {
            let mu = seeded_atoms(10, 3.0, FRESH_SEEDS[0] + i);
            let a = verify_prop33_equivalence(p, 1.0, &Weight::unit(), &mu, &grid).unwrap();
            range = (range.0.min(a.ratio), range.1.max(a.ratio));
            pass &= band.contains(a.ratio);
            if i == 0 {
                let b = verify_prop33_equivalence(p, 1.0, &Weight::unit(), &mu.scaled(6.0), &grid)
                    .unwrap();
                let k = 6f64.powf(e);
                scale_err = (b.b_side / a.b_side / k - 1.0)
                    .abs()
                    .max((b.d_side / a.d_side / k - 1.0).abs());
            }
        }
        pass &= scale_err <= 1e-9;
        notes.push(format!(
            "p={p}: ratio [{:.3}, {:.3}] in {band}, scale err {scale_err:.1e}",
            range.0, range.1
        ));
    }
    outcome(pass, notes.join("; "))
}

fn diagonal() -> Outcome {
    let mut rank_one = 0.0f64;
    for (p, r) in [(2.0, 1.0), (2.0, 2.0), (3.0, 1.5), (3.0, 3.0), (4.0, 5.0)] {
        for v in [0.2, 1.0, 3.7] {
            rank_one =
                rank_one.max((diag_summing_bruteforce(&[v], p, r, 4, 1).unwrap() - v).abs() / v);
            rank_one = rank_one.max((diag_summing_estimate(&[v], p, r).unwrap() - v).abs() / v);
        }
    }
    let cal = Calibration::builtin();
    let hi = cal.band("diag").unwrap().widened(SLACK).hi;
    let cases = verify_diag_consistency(50, FRESH_SEEDS[1]).unwrap();
    let worst = cases
        .iter()
        .map(|c| c.lower / c.formula)
        .fold(0.0f64, f64::max);
    let mut id_err = 0.0f64;
    for n in [4usize, 9, 16] {
        let lb = diag_summing_bruteforce(&vec![1.0; n], 2.0, 2.0, 6, 3).unwrap();
        id_err = id_err.max((lb / (n as f64).sqrt() - 1.0).abs());
    }
    outcome(
        rank_one <= 1e-6 && worst <= hi && id_err <= 0.1,
        format!("rank-one error {rank_one:.1e}; max lower/formula {worst:.4} <= {hi:.4}; identity error {id_err:.3}"),
    )
}

fn quadrature_sanity() -> Outcome {
    let grid = GridSpec::default();
    let plane = PlaneGrid::new(grid.radius, grid.step);
    let mut gauss = 0.0f64;
    for alpha in [0.5, 1.0, 2.0] {
        let v = plane.integrate(|z| (-alpha * z.norm_sqr()).exp());
        gauss = gauss.max((v - PI / alpha).abs());
    }
    let mut ratios = Vec::new();
    for j in -5i64..=5 {
        for k in -5i64..=5 {
            if j * j + k * k <= 25 {
                ratios.push(
                    fock::kernel_norm(c(j as f64, k as f64), 2.0, 1.0, &Weight::unit(), &grid)
                        .unwrap()
                        .ratio(),
                );
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(FRESH_SEEDS[0]);
    for _ in 0..10 {
        let u = Complex64::from_polar(5.0 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
        ratios.push(
            fock::kernel_norm(u, 2.0, 1.0, &Weight::unit(), &grid)
                .unwrap()
                .ratio(),
        );
    }
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), x| (a.min(*x), b.max(*x)));
    let spread = hi / lo - 1.0;
    outcome(
        gauss <= 1e-6 && spread <= 1e-3,
        format!(
            "gaussian error {gauss:.1e}; kernel ratio spread {spread:.1e} over {} points",
            ratios.len()
        ),
    )
}

fn monotonicity() -> Outcome {
    let grid = GridSpec::default();
    let symbols = [
        AffineSymbol::new(c(0.0, 0.0), c(1.0, -0.5)),
        AffineSymbol::new(c(0.3, 0.0), c(0.0, 0.0)),
        AffineSymbol::new(c(0.5, 0.2), c(-1.0, 1.0)),
        AffineSymbol::new(c(-0.7, 0.0), c(0.5, 0.0)),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (p, r, alpha) in [(3.0f64, 2.0, 1.0), (2.0, 1.0, 0.5)] {
        let qs = [1.5, p.min(2.0)];
        let betas = [alpha / 2.0, alpha, 2.0 * alpha];
        let rep = verify_monotonicity(&symbols, p, r, alpha, &qs, &betas, &grid).unwrap();
        pass &= rep.holds && rep.premises > 0;
        let bad: Vec<String> = rep
            .rows
            .iter()
            .filter(|r| r.classification != Classification::SummingCertified)
            .map(|r| format!("a={} q={} beta={}", r.symbol.a, r.q, r.beta))
            .collect();
        notes.push(format!(
            "(p={p}, r={r}, alpha={alpha}): {} premises, {} implications, failures {bad:?}",
            rep.premises,
            rep.rows.len()
        ));
    }
    outcome(pass, notes.join("; "))
}

fn order_bounded() -> Outcome {
    let grid = GridSpec::default();
    let mut dirac = 0.0f64;
    for u in [c(0.0, 0.0), c(0.3, 0.7), c(-2.5, 1.2), c(4.0, -4.0)] {
        let rep =
            order_bounded_check(&Measure::dirac(u, 1.0), &Weight::unit(), 2.0, 1.0, &grid).unwrap();
        dirac = dirac.max((rep.value - 1.0).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(FRESH_SEEDS[1]);
    let (mut premises, mut failures) = (0, Vec::new());
    for i in 0..10u64 {
        let atoms = seeded_atoms(15, 6.0, FRESH_SEEDS[1] + i);
        let mu = match i % 3 {
            0 => atoms,
            1 => atoms.sum(&Measure::gauss(rng.gen_range(0.2..2.0))),
            _ => atoms.sum(&Measure::lebesgue().scaled(rng.gen_range(0.1..1.0))),
        };
        let w = if i % 2 == 0 {
            Weight::unit()
        } else {
            Weight::poly(1.0)
        };
        let rep = order_bounded_check(&mu, &w, 2.0, 1.0, &grid).unwrap();
        if rep.status != Tri::True {
            continue;
        }
        premises += 1;
        let field = EmbeddingField::build(&w, &mu, &grid).unwrap();
        for (p, r) in [(2.0, 3.0), (3.0, 4.0)] {
            let v = field.verdict(p, r, 1.0).unwrap();
            if v.regime != Regime::HighR || v.classification != Classification::SummingCertified {
                failures.push(format!("case {i} (p={p}, r={r}): {}", v.classification));
            }
        }
    }
    outcome(
        dirac <= 1e-3 && premises > 0 && failures.is_empty(),
        format!("dirac |value - 1| <= {dirac:.1e}; {premises} order-bounded measures, failures {failures:?}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("hs-exactness", hs_exactness),
        ("composition-case-1", composition_case_one),
        ("classifier-truth-tables", truth_tables),
        ("regime-algebra", regime_algebra),
        ("lattice-integral-equivalence", lattice_integral),
        ("gaussian-bridge", bridge),
        ("diagonal-operators", diagonal),
        ("quadrature-sanity", quadrature_sanity),
        ("monotonicity", monotonicity),
        ("order-boundedness", order_bounded),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name} ({:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
