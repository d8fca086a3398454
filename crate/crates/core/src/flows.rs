//! Formal flows of vector fields `f(y) d/dy` on the line.
//!
//! The flow `φ_t(y) = Σ c_r(t) y^r` solves `dφ/dt = f(φ)`, `φ_0 = y`, one power
//! of `y` at a time. When `f` vanishes to order at least 2 every `c_r` is a
//! polynomial in `t`. When `f = a y + ...` with `a ≠ 0` rational, the `c_r` are
//! polynomials in `E = e^{at}` instead.

use std::fmt;

use crate::error::{Error, Result};
use crate::exact_series::{Rational, Scalar, SymbolStyle, TruncatedSeries};
use crate::jet_groups::{Jet, JET_VAR};

/// A vector field `f(y) d/dy` fixing 0.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorField {
    series: TruncatedSeries,
    vanishing_order: Option<usize>,
}

impl VectorField {
    /// Validates `f`: zero constant term, no time dependence, and rational
    /// coefficients when the linear term is present.
    pub fn new(series: TruncatedSeries) -> Result<Self> {
        if series.var() != JET_VAR {
            return Err(Error::VariableMismatch {
                left: JET_VAR,
                right: series.var(),
            });
        }
        if !series.coeff(0).is_zero() {
            return Err(Error::validation(
                "vector field",
                "f(0) must vanish (the field has to fix 0)",
            ));
        }
        if series.coeffs().iter().any(|c| !c.is_time_free()) {
            return Err(Error::UnsupportedRing(
                "vector field coefficients may not depend on t".into(),
            ));
        }
        let vanishing_order = series.valuation();
        if vanishing_order == Some(1) && !series.coeffs().iter().all(Scalar::is_rational) {
            return Err(Error::UnsupportedRing(
                "a field with a linear term needs rational coefficients".into(),
            ));
        }
        Ok(VectorField {
            series,
            vanishing_order,
        })
    }

    /// `y^k d/dy` at truncation order `m`.
    pub fn monomial(k: usize, m: usize) -> Self {
        let series = TruncatedSeries::monomial(JET_VAR, Scalar::one(), k, m.max(k));
        VectorField::new(series).expect("monomial fields are valid")
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.series
    }

    /// Least power with a nonzero coefficient; `None` for the zero field.
    pub fn vanishing_order(&self) -> Option<usize> {
        self.vanishing_order
    }

    pub fn is_zero(&self) -> bool {
        self.vanishing_order.is_none()
    }

    /// The rational linear coefficient `a` when the field vanishes to order 1.
    pub fn linear_rate(&self) -> Option<Rational> {
        match self.vanishing_order {
            Some(1) => self.series.coeff(1).as_rational().cloned(),
            _ => None,
        }
    }

    fn at_order(&self, m: usize) -> TruncatedSeries {
        if m >= self.series.order() {
            self.series.extend(m).expect("extending")
        } else {
            self.series.truncate(m).expect("truncating")
        }
    }

    /// The derivation `h ↦ f h'`, truncated at `m`.
    fn apply(&self, h: &TruncatedSeries, m: usize) -> TruncatedSeries {
        self.at_order(m)
            .mul(&h.derivative())
            .expect("equal orders")
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) d/dy", self.series)
    }
}

/// How the time parameter enters the flow coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FlowRegime {
    /// Coefficients are polynomials in `t`.
    Polynomial,
    /// Coefficients are polynomials in `E`, standing for `e^{rate t}`.
    Exponential { rate: Rational },
}

/// The m-jet of the time-t flow, `φ_t(y) = Σ c_r(t) y^r`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FlowJet {
    coeffs: Vec<Scalar>,
    regime: FlowRegime,
}

impl FlowJet {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn regime(&self) -> &FlowRegime {
        &self.regime
    }

    /// `c_r(t)` for `r = 1..=order`.
    pub fn coeff(&self, r: usize) -> Scalar {
        if r == 0 || r > self.coeffs.len() {
            return Scalar::zero();
        }
        self.coeffs[r - 1].clone()
    }

    pub fn series(&self) -> TruncatedSeries {
        let mut all = vec![Scalar::zero()];
        all.extend(self.coeffs.iter().cloned());
        TruncatedSeries::new(JET_VAR, all, self.coeffs.len())
    }

    /// The time derivative of every coefficient.
    fn time_derivative(&self) -> TruncatedSeries {
        match &self.regime {
            FlowRegime::Polynomial => self.series().map_coeffs(Scalar::time_derivative),
            FlowRegime::Exponential { rate } => {
                let a = Scalar::from_rational(rate.clone());
                self.series().map_coeffs(|c| &c.exp_euler() * &a)
            }
        }
    }

    pub fn style(&self) -> SymbolStyle<'static> {
        match self.regime {
            FlowRegime::Polynomial => SymbolStyle::default(),
            FlowRegime::Exponential { .. } => SymbolStyle {
                time: "t",
                exp_multiplier: Some("t"),
            },
        }
    }
}

impl fmt::Display for FlowJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.series().fmt_with(&self.style()))
    }
}

/// Solves `dφ/dt = f(φ)` to order `m`.
pub fn flow_jet(x: &VectorField, m: usize) -> Result<FlowJet> {
    if m == 0 {
        return Err(Error::validation("flow order", "must be at least 1"));
    }
    let f = x.at_order(m);
    let regime = match x.vanishing_order() {
        Some(1) => {
            let rate = x.linear_rate().ok_or_else(|| {
                Error::UnsupportedRing("linear coefficient must be rational".into())
            })?;
            FlowRegime::Exponential { rate }
        }
        _ => FlowRegime::Polynomial,
    };
    let mut phi = vec![Scalar::zero(); m + 1];
    phi[1] = match &regime {
        FlowRegime::Polynomial => Scalar::one(),
        FlowRegime::Exponential { .. } => Scalar::exp_symbol(),
    };
    for r in 2..=m {
        // with c_r still zero, [f∘φ]_r is the forcing term
        let partial = TruncatedSeries::new(JET_VAR, phi[..r].to_vec(), r);
        let f_r = f.truncate(r).expect("r <= m");
        let forcing = f_r.compose(&partial)?.coeff(r);
        phi[r] = match &regime {
            FlowRegime::Polynomial => forcing.time_integral(),
            FlowRegime::Exponential { rate } => integrate_exponential(&forcing, rate, r)?,
        };
    }
    Ok(FlowJet {
        coeffs: phi[1..].to_vec(),
        regime,
    })
}

/// Solves `c' = a c + G`, `c(0) = 0`, for `G = Σ g_m E^m`, `E = e^{at}`:
/// `c = Σ g_m / ((m - 1) a) (E^m - E)`.
fn integrate_exponential(forcing: &Scalar, rate: &Rational, r: usize) -> Result<Scalar> {
    let terms = forcing.laurent_terms().ok_or_else(|| {
        Error::UnsupportedRing(format!("forcing term {forcing} is not a Laurent polynomial in E"))
    })?;
    let e = Scalar::exp_symbol();
    let mut out = Scalar::zero();
    for (j, m, g) in terms {
        if j != 0 || m == 1 {
            return Err(Error::UnsupportedRing(format!(
                "resonant forcing at order {r}: {forcing}"
            )));
        }
        let denom = Rational::from_integer((m - 1).into()) * rate;
        let c = Scalar::from_rational(g / denom);
        out = &out + &(&c * &(&Scalar::exp_power(m) - &e));
    }
    Ok(out)
}

/// Evaluates the flow at time `t0`. In the exponential regime `t0` must be an
/// integer, and `E` then denotes `e^{rate}`.
pub fn flow_at(flow: &FlowJet, t0: &Scalar) -> Result<Jet> {
    let coeffs = match &flow.regime {
        FlowRegime::Polynomial => flow.coeffs.iter().map(|c| c.substitute_time(t0)).collect(),
        FlowRegime::Exponential { .. } => {
            let n = t0.as_integer().ok_or_else(|| {
                Error::UnsupportedRing(format!(
                    "exponential flows are evaluated at integer times only, got {t0}"
                ))
            })?;
            flow.coeffs
                .iter()
                .map(|c| c.substitute_exp_power(n))
                .collect::<Result<Vec<_>>>()?
        }
    };
    Jet::new(coeffs)
}

/// Expansion of `y (1 - (k-1) t y^{k-1})^{-1/(k-1)}` to order `m`: the term
/// `y^{1 + n(k-1)}` has coefficient `t^n Π_{i<n} (1 + i(k-1)) / n!`.
pub fn flow_closed_form_model(k: usize, m: usize) -> Result<FlowJet> {
    if k < 2 {
        return Err(Error::validation("model flow", format!("k = {k} must be at least 2")));
    }
    if m < k {
        return Err(Error::validation("model flow", format!("order {m} is below k = {k}")));
    }
    let mut coeffs = vec![Scalar::zero(); m];
    let step = k - 1;
    let mut c = Rational::from_integer(1.into());
    let mut n = 0usize;
    while 1 + n * step <= m {
        coeffs[n * step] = &Scalar::from_rational(c.clone()) * &Scalar::time_power(n);
        c = c * Rational::from_integer((1 + n * step).into())
            / Rational::from_integer((n + 1).into());
        n += 1;
    }
    Ok(FlowJet {
        coeffs,
        regime: FlowRegime::Polynomial,
    })
}

/// `dφ/dt - f∘φ`, which vanishes exactly for a correct flow jet.
pub fn flow_residual(x: &VectorField, flow: &FlowJet) -> Result<TruncatedSeries> {
    let m = flow.order();
    let phi = flow.series();
    let rhs = x.at_order(m).compose(&phi)?;
    flow.time_derivative().sub(&rhs)
}

/// The time-one map `exp(f d/dy)` of a field vanishing to order at least 2,
/// as the Lie series `Σ (f d/dy)^n (y) / n!`. Coefficients may lie anywhere in
/// the `t`-free part of the coefficient ring.
pub fn time_one_map(x: &VectorField, m: usize) -> Result<Jet> {
    if x.vanishing_order().is_some_and(|v| v < 2) {
        return Err(Error::validation(
            "time-one map",
            "the Lie series needs a field vanishing to order at least 2",
        ));
    }
    let mut term = TruncatedSeries::variable(JET_VAR, m);
    let mut sum = term.clone();
    let mut n = 1i64;
    loop {
        term = x.apply(&term, m).scale(&Scalar::ratio(1, n));
        if term.is_zero() {
            break;
        }
        sum = sum.add(&term)?;
        n += 1;
    }
    Jet::from_series(sum)
}

/// The field `Z` with `exp(Z) = g` for a unipotent jet `g`, solved one
/// coefficient at a time.
pub fn unipotent_log(g: &Jet) -> Result<VectorField> {
    if !g.is_unipotent() {
        return Err(Error::validation("logarithm", format!("{g} is not unipotent")));
    }
    let r = g.order();
    let mut z = TruncatedSeries::zero(JET_VAR, r);
    for j in 2..=r {
        let current = time_one_map(&VectorField::new(z.clone())?, r)?;
        let delta = &g.coeff(j) - &current.coeff(j);
        if !delta.is_zero() {
            z = z.add(&TruncatedSeries::monomial(JET_VAR, delta, j, r))?;
        }
    }
    VectorField::new(z)
}
