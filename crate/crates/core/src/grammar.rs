//! Text specs for weights and measures, and the atoms CSV format.
//!
//! Weights:
//!
//! ```text
//! weight  := "unit" | "const:" C | "poly:" G | "exp2:" B | "halfplane"
//!          | "tilt:" K "," P [ "@" weight ]      w (1+|z|)^(-K P), base defaults to unit
//!          | "product:" weight ("," weight)+     nested lists need parentheses
//!          | "dual:" P "@" weight                w^(-p'/p)
//!          | "hat@" weight                       cell average over Q_1(z)
//!          | "(" weight ")"
//! ```
//!
//! Measures:
//!
//! ```text
//! measure := "zero" | "lebesgue" | "gauss:" B | "atoms:" PATH | "atom:" X "," Y "," M
//!          | "pullback:" A_RE "," A_IM "," B_RE "," B_IM    uses the run's p and alpha
//!          | "volterra:" C0 ("," C)*                         uses the run's p
//!          | "scale:" C "@" measure
//!          | "sum:" measure (";" measure)+
//!          | "(" measure ")"
//! ```
//!
//! Atoms CSV: UTF-8, header row `x,y,mass`, one atom per line, blank lines ignored.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{FockError, Result};
use crate::lattice::GridSpec;
use crate::measures::{
    pullback_measure, tilted_weight, volterra_measure, AffineSymbol, Atom, Measure,
    PolynomialSymbol,
};
use crate::weights::{averaged_weight, dual_weight, Weight};

fn perr(msg: impl Into<String>) -> FockError {
    FockError::Parse(msg.into())
}

fn num(s: &str, what: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| perr(format!("{what}: expected a number, got {s:?}")))?;
    if !v.is_finite() {
        return Err(perr(format!("{what}: {s:?} is not finite")));
    }
    Ok(v)
}

fn nums(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',').map(|x| num(x, what)).collect()
}

/// Split on `sep` outside parentheses.
fn split_top(s: &str, sep: char) -> Result<Vec<&str>> {
    let mut depth = 0i32;
    let mut start = 0;
    let mut out = Vec::new();
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(perr(format!("unbalanced ')' in {s:?}")));
                }
            }
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(perr(format!("unbalanced '(' in {s:?}")));
    }
    out.push(&s[start..]);
    Ok(out)
}

/// Strip one pair of enclosing parentheses when they match each other.
fn unwrap_parens(s: &str) -> Option<&str> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    let mut depth = 0i32;
    for ch in inner.chars() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            _ => {}
        }
    }
    (depth == 0).then_some(inner)
}

pub fn parse_weight(spec: &str, grid: &GridSpec) -> Result<Weight> {
    let s = spec.trim();
    if let Some(inner) = unwrap_parens(s) {
        return parse_weight(inner, grid);
    }
    let w = if s == "unit" {
        Weight::unit()
    } else if s == "halfplane" {
        Weight::right_half_plane()
    } else if let Some(rest) = s.strip_prefix("const:") {
        let c = num(rest, "const")?;
        if c <= 0.0 {
            return Err(perr(format!("const: weight must be positive, got {c}")));
        }
        Weight::constant(c)
    } else if let Some(rest) = s.strip_prefix("poly:") {
        Weight::poly(num(rest, "poly")?)
    } else if let Some(rest) = s.strip_prefix("exp2:") {
        Weight::exp2(num(rest, "exp2")?)
    } else if let Some(rest) = s.strip_prefix("tilt:") {
        let (args, base) = match rest.split_once('@') {
            Some((a, b)) => (a, parse_weight(b, grid)?),
            None => (rest, Weight::unit()),
        };
        let v = nums(args, "tilt")?;
        let [k, p] = v[..] else {
            return Err(perr(format!("tilt: expected K,P, got {args:?}")));
        };
        if k.fract() != 0.0 {
            return Err(perr(format!("tilt: K must be an integer, got {k}")));
        }
        tilted_weight(&base, k as i64, p)
    } else if let Some(rest) = s.strip_prefix("product:") {
        let parts = split_top(rest, ',')?;
        if parts.len() < 2 {
            return Err(perr("product: needs at least two factors"));
        }
        Weight::product(
            parts
                .iter()
                .map(|p| parse_weight(p, grid))
                .collect::<Result<_>>()?,
        )
    } else if let Some(rest) = s.strip_prefix("dual:") {
        let (p, base) = rest
            .split_once('@')
            .ok_or_else(|| perr("dual: expected P@WEIGHT"))?;
        let p = num(p, "dual")?;
        if p <= 1.0 {
            return Err(perr(format!("dual: p must exceed 1, got {p}")));
        }
        dual_weight(&parse_weight(base, grid)?, p)?
    } else if let Some(rest) = s.strip_prefix("hat@") {
        averaged_weight(&parse_weight(rest, grid)?, grid)
    } else {
        return Err(perr(format!("unknown weight spec {s:?}")));
    };
    Ok(w.with_label(s))
}

/// Parameters a measure spec may depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureContext {
    pub p: f64,
    pub alpha: f64,
}

pub fn parse_measure(spec: &str, ctx: MeasureContext) -> Result<Measure> {
    let s = spec.trim();
    if let Some(inner) = unwrap_parens(s) {
        return parse_measure(inner, ctx);
    }
    let mu = if s == "zero" {
        Measure::zero()
    } else if s == "lebesgue" {
        Measure::lebesgue()
    } else if let Some(rest) = s.strip_prefix("gauss:") {
        Measure::gauss(num(rest, "gauss")?)
    } else if let Some(rest) = s.strip_prefix("atoms:") {
        read_atoms_csv(Path::new(rest.trim()))?
    } else if let Some(rest) = s.strip_prefix("atom:") {
        let v = nums(rest, "atom")?;
        let [x, y, m] = v[..] else {
            return Err(perr(format!("atom: expected X,Y,M, got {rest:?}")));
        };
        Measure::from_atoms(vec![Atom::new(Complex64::new(x, y), m)])?
    } else if let Some(rest) = s.strip_prefix("pullback:") {
        let v = nums(rest, "pullback")?;
        let [ar, ai, br, bi] = v[..] else {
            return Err(perr(format!(
                "pullback: expected A_RE,A_IM,B_RE,B_IM, got {rest:?}"
            )));
        };
        pullback_measure(
            &AffineSymbol::new(Complex64::new(ar, ai), Complex64::new(br, bi)),
            ctx.p,
            ctx.alpha,
        )?
    } else if let Some(rest) = s.strip_prefix("volterra:") {
        volterra_measure(
            &PolynomialSymbol::from_real(&nums(rest, "volterra")?),
            ctx.p,
        )?
    } else if let Some(rest) = s.strip_prefix("scale:") {
        let (c, base) = rest
            .split_once('@')
            .ok_or_else(|| perr("scale: expected C@MEASURE"))?;
        let c = num(c, "scale")?;
        if c <= 0.0 {
            return Err(perr(format!("scale: factor must be positive, got {c}")));
        }
        parse_measure(base, ctx)?.scaled(c)
    } else if let Some(rest) = s.strip_prefix("sum:") {
        let parts = split_top(rest, ';')?;
        if parts.len() < 2 {
            return Err(perr("sum: needs at least two terms"));
        }
        let mut acc = parse_measure(parts[0], ctx)?;
        for p in &parts[1..] {
            acc = acc.sum(&parse_measure(p, ctx)?);
        }
        acc
    } else {
        return Err(perr(format!("unknown measure spec {s:?}")));
    };
    Ok(mu.with_label(s))
}

/// Parse atoms from CSV text (`x,y,mass` header).
pub fn parse_atoms_csv(text: &str) -> Result<Vec<Atom>> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| perr("atoms csv: missing header row"))?;
    let cols: Vec<String> = header
        .split(',')
        .map(|c| c.trim().to_ascii_lowercase())
        .collect();
    if cols != ["x", "y", "mass"] {
        return Err(perr(format!(
            "atoms csv: header must be x,y,mass, got {header:?}"
        )));
    }
    let mut atoms = Vec::new();
    for (no, line) in lines {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 3 {
            return Err(perr(format!(
                "atoms csv line {}: expected 3 fields",
                no + 1
            )));
        }
        let what = format!("atoms csv line {}", no + 1);
        let (x, y, m) = (num(f[0], &what)?, num(f[1], &what)?, num(f[2], &what)?);
        if m <= 0.0 {
            return Err(perr(format!("{what}: mass must be positive, got {m}")));
        }
        atoms.push(Atom::new(Complex64::new(x, y), m));
    }
    Ok(atoms)
}

pub fn read_atoms_csv(path: &Path) -> Result<Measure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| FockError::Io(format!("{}: {e}", path.display())))?;
    Measure::from_atoms(parse_atoms_csv(&text)?)
}

/// Render atoms in the CSV format read by [`parse_atoms_csv`].
pub fn write_atoms_csv(atoms: &[Atom]) -> String {
    let mut out = String::from("x,y,mass\n");
    for a in atoms {
        out.push_str(&format!("{},{},{}\n", a.z.re, a.z.im, a.mass));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> MeasureContext {
        MeasureContext { p: 2.0, alpha: 1.0 }
    }

    fn z(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn weights_parse() {
        let g = GridSpec::default();
        let p = |s: &str| parse_weight(s, &g).unwrap();
        assert_eq!(p("const:2.5").is_constant(), Some(2.5));
        assert_eq!(p("unit").is_constant(), Some(1.0));
        let u = z(1.5, -2.0);
        let r = 1.0 + u.norm();
        assert!((p("poly:2").density(u) - r * r).abs() < 1e-12);
        assert!((p("exp2:0.5").density(u) - (0.5 * u.norm_sqr()).exp()).abs() < 1e-12);
        assert!((p("tilt:1,2").density(u) - r.powi(-2)).abs() < 1e-12);
        assert!((p("tilt:-1,3@poly:3").density(u) - r.powi(6)).abs() < 1e-9);
        assert!((p("product:poly:1,const:3").density(u) - 3.0 * r).abs() < 1e-12);
        assert!(
            (p("product:(product:poly:1,poly:1),const:2").density(u) - 2.0 * r * r).abs() < 1e-12
        );
        assert!((p("dual:2@poly:2").density(u) - r.powi(-2)).abs() < 1e-12);
        assert_eq!(p("halfplane").density(z(-1.0, 0.0)), 0.0);
        assert!((p("hat@unit").density(u) - 1.0).abs() < 1e-12);
        assert_eq!(p("(poly:2)").label(), "poly:2");
    }

    #[test]
    fn weight_errors() {
        let g = GridSpec::default();
        for bad in [
            "",
            "poly:",
            "poly:x",
            "const:-1",
            "tilt:1.5,2",
            "tilt:1",
            "product:unit",
            "dual:1@unit",
            "nope",
            "product:(unit,unit",
        ] {
            assert!(
                matches!(parse_weight(bad, &g), Err(FockError::Parse(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn measures_parse() {
        let m = parse_measure("atom:0.5,0,2", ctx()).unwrap();
        assert_eq!(m.atoms(), &[Atom::new(z(0.5, 0.0), 2.0)]);
        assert!(parse_measure("zero", ctx()).unwrap().is_zero());
        assert_eq!(
            parse_measure("lebesgue", ctx())
                .unwrap()
                .density_at(z(3.0, 1.0)),
            1.0
        );
        assert!(
            (parse_measure("gauss:0.5", ctx())
                .unwrap()
                .density_at(z(1.0, 1.0))
                - (-1.0f64).exp())
            .abs()
                < 1e-15
        );
        let s = parse_measure("sum:atom:0,0,1;scale:3@(atom:1,1,1)", ctx()).unwrap();
        assert_eq!(s.atom_mass(), 4.0);
        let pb = parse_measure("pullback:0,0,0,0", ctx()).unwrap();
        assert!((pb.atom_mass() - std::f64::consts::PI).abs() < 1e-12);
        let v = parse_measure("volterra:5", ctx()).unwrap();
        assert!(v.is_zero());
        let v = parse_measure("volterra:0,1", ctx()).unwrap();
        assert!((v.density_at(z(1.0, 0.0)) - 0.25).abs() < 1e-12);
        for bad in [
            "atom:1,2",
            "atom:0,0,-1",
            "sum:zero",
            "pullback:1,0",
            "gauss:",
            "scale:0@zero",
            "what",
        ] {
            assert!(parse_measure(bad, ctx()).is_err(), "{bad}");
        }
    }

    #[test]
    fn atoms_csv_roundtrip() {
        let atoms = vec![Atom::new(z(0.25, -1.0), 0.5), Atom::new(z(3.0, 2.0), 1.75)];
        let text = write_atoms_csv(&atoms);
        assert_eq!(parse_atoms_csv(&text).unwrap(), atoms);
        let with_bom = "\u{feff}X, Y ,Mass\n\n1,2,3\n".to_string();
        assert_eq!(
            parse_atoms_csv(&with_bom).unwrap(),
            vec![Atom::new(z(1.0, 2.0), 3.0)]
        );
        assert!(parse_atoms_csv("1,2,3\n").is_err());
        assert!(parse_atoms_csv("x,y,mass\n1,2\n").is_err());
        assert!(parse_atoms_csv("x,y,mass\n1,2,0\n").is_err());
        assert!(parse_atoms_csv("").is_err());
    }

    #[test]
    fn atoms_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        std::fs::write(&path, "x,y,mass\n0,0,1\n").unwrap();
        let m = parse_measure(&format!("atoms:{}", path.display()), ctx()).unwrap();
        assert_eq!(m.atom_mass(), 1.0);
        assert!(matches!(
            parse_measure("atoms:/no/such/file.csv", ctx()),
            Err(FockError::Io(_))
        ));
    }
}
