//! Closed-form verdicts for composition, Volterra and differentiation
//! operators, each cross-checked through the embedding classifier.

use std::fmt;

use crate::error::Result;
use crate::lattice::GridSpec;
use crate::measures::{
    moment_condition, pullback_measure, tilted_weight, volterra_measure, AffineSymbol, Measure,
    MomentReport, PolynomialSymbol, Tri,
};
use crate::summing::{classify_embedding, target_exponent, Classification, SummingVerdict};
use crate::weights::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorVerdict {
    Summing,
    NotSumming,
    /// The operator is not even bounded.
    NotBounded,
    Inconclusive,
}

impl OperatorVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            OperatorVerdict::Summing => "SUMMING",
            OperatorVerdict::NotSumming => "NOT_SUMMING",
            OperatorVerdict::NotBounded => "NOT_BOUNDED",
            OperatorVerdict::Inconclusive => "INCONCLUSIVE",
        }
    }

    fn from_bool(summing: bool) -> Self {
        if summing {
            OperatorVerdict::Summing
        } else {
            OperatorVerdict::NotSumming
        }
    }

    pub fn from_classification(c: Classification) -> Self {
        match c {
            Classification::SummingCertified => OperatorVerdict::Summing,
            Classification::NotSummingCertified => OperatorVerdict::NotSumming,
            Classification::Inconclusive => OperatorVerdict::Inconclusive,
        }
    }
}

impl fmt::Display for OperatorVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agreement {
    Agree,
    Disagree,
    /// The numeric side could not certify either way.
    Uncertified,
    /// No numeric side was run.
    NotChecked,
}

impl Agreement {
    fn between(closed: OperatorVerdict, numeric: Classification) -> Self {
        match (closed, numeric) {
            (_, Classification::Inconclusive) => Agreement::Uncertified,
            (OperatorVerdict::Summing, Classification::SummingCertified) => Agreement::Agree,
            (OperatorVerdict::NotSumming, Classification::NotSummingCertified) => Agreement::Agree,
            _ => Agreement::Disagree,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorReport {
    pub verdict: OperatorVerdict,
    pub cross_check: Option<SummingVerdict>,
    pub agreement: Agreement,
    pub reason: String,
}

/// Composition symbol; only affine symbols induce bounded operators.
#[derive(Debug, Clone, PartialEq)]
pub enum CompositionSymbol {
    Affine(AffineSymbol),
    Polynomial(PolynomialSymbol),
}

impl CompositionSymbol {
    fn as_affine(&self) -> Option<AffineSymbol> {
        match self {
            CompositionSymbol::Affine(a) => Some(*a),
            CompositionSymbol::Polynomial(g) if g.degree() <= 1 => {
                let c = g.coeffs();
                let zero = num_complex::Complex64::new(0.0, 0.0);
                Some(AffineSymbol::new(
                    c.get(1).copied().unwrap_or(zero),
                    c.first().copied().unwrap_or(zero),
                ))
            }
            CompositionSymbol::Polynomial(_) => None,
        }
    }
}

/// `C_phi` is `r`-summing iff `phi(z) = a z + b` with `|a| < 1`.
pub fn classify_composition(
    symbol: &CompositionSymbol,
    p: f64,
    r: f64,
    alpha: f64,
    grid: &GridSpec,
) -> Result<OperatorReport> {
    target_exponent(p, r)?;
    let Some(phi) = symbol.as_affine() else {
        return Ok(OperatorReport {
            verdict: OperatorVerdict::NotBounded,
            cross_check: None,
            agreement: Agreement::NotChecked,
            reason: "non-affine symbols do not induce bounded composition operators".into(),
        });
    };
    let verdict = OperatorVerdict::from_bool(phi.a.norm() < 1.0);
    let mu = pullback_measure(&phi, p, alpha)?;
    let check = classify_embedding(p, r, alpha, &Weight::unit(), &mu, grid)?;
    Ok(OperatorReport {
        verdict,
        agreement: Agreement::between(verdict, check.classification),
        reason: format!(
            "|a| = {} {} 1",
            phi.a.norm(),
            if phi.a.norm() < 1.0 { "<" } else { ">=" }
        ),
        cross_check: Some(check),
    })
}

/// Closed-form Volterra verdict: constant symbols always, linear symbols
/// exactly when `p > 2` and `r > 2`.
pub fn volterra_closed_form(degree: usize, p: f64, r: f64) -> bool {
    if p <= 2.0 || r <= 2.0 {
        degree == 0
    } else {
        degree <= 1
    }
}

pub fn classify_volterra(
    g: &PolynomialSymbol,
    p: f64,
    r: f64,
    alpha: f64,
    grid: &GridSpec,
) -> Result<OperatorReport> {
    target_exponent(p, r)?;
    let d = g.degree();
    let verdict = OperatorVerdict::from_bool(volterra_closed_form(d, p, r));
    let mu = volterra_measure(g, p)?;
    let check = classify_embedding(p, r, alpha, &Weight::unit(), &mu, grid)?;
    Ok(OperatorReport {
        verdict,
        agreement: Agreement::between(verdict, check.classification),
        reason: format!("deg g = {d}, p = {p}, r = {r}"),
        cross_check: Some(check),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DifferentiationReport {
    pub verdict: OperatorVerdict,
    pub moment: MomentReport,
    pub embedding: Option<SummingVerdict>,
    pub reason: String,
}

/// `D^(k)` (integration for `k < 0`) into `L^p_alpha(mu)`, reduced to the
/// embedding with the tilted weight `w (1+|z|)^{-kp}`.
#[allow(clippy::too_many_arguments)]
pub fn reduce_differentiation(
    k: i64,
    p: f64,
    r: f64,
    alpha: f64,
    w: &Weight,
    mu: &Measure,
    grid: &GridSpec,
) -> Result<DifferentiationReport> {
    target_exponent(p, r)?;
    let l_max = (-k - 1).max(0) as usize;
    let moment = moment_condition(mu, p, alpha, l_max, grid);
    if moment.status != Tri::True {
        return Ok(DifferentiationReport {
            verdict: OperatorVerdict::Inconclusive,
            reason: format!("moment condition not certified: {}", moment.reason),
            moment,
            embedding: None,
        });
    }
    let tilted = tilted_weight(w, k, p);
    let v = classify_embedding(p, r, alpha, &tilted, mu, grid)?;
    Ok(DifferentiationReport {
        verdict: OperatorVerdict::from_classification(v.classification),
        reason: format!("embedding with weight {}", tilted.label()),
        moment,
        embedding: Some(v),
    })
}
