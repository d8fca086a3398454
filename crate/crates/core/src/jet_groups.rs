//! The groups `J^r` of r-jets at 0 of diffeomorphisms of the line fixing 0.
//!
//! A jet is stored as its Taylor polynomial `a_1 y + ... + a_r y^r`; the group
//! law is composition followed by truncation.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::exact_series::{Scalar, SymbolStyle, TruncatedSeries};

/// Name of the jet variable.
pub const JET_VAR: char = 'y';

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Jet {
    series: TruncatedSeries,
}

impl Jet {
    /// Builds `a_1 y + ... + a_r y^r` from `[a_1, ..., a_r]`.
    pub fn new(coeffs: Vec<Scalar>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::validation("jet", "order must be at least 1"));
        }
        let order = coeffs.len();
        let mut all = Vec::with_capacity(order + 1);
        all.push(Scalar::zero());
        all.extend(coeffs);
        Self::from_series(TruncatedSeries::new(JET_VAR, all, order))
    }

    /// Checks the jet invariants on a series in `y`.
    pub fn from_series(series: TruncatedSeries) -> Result<Self> {
        if series.var() != JET_VAR {
            return Err(Error::VariableMismatch {
                left: JET_VAR,
                right: series.var(),
            });
        }
        if series.order() == 0 {
            return Err(Error::validation("jet", "order must be at least 1"));
        }
        if !series.coeff(0).is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let lead = series.coeff(1);
        if lead.checked_inv().is_err() {
            return Err(Error::NotInvertible(format!("leading coefficient {lead}")));
        }
        Ok(Jet { series })
    }

    pub fn identity(order: usize) -> Self {
        Jet {
            series: TruncatedSeries::variable(JET_VAR, order.max(1)),
        }
    }

    /// `c y` in `J^r`.
    pub fn linear(c: Scalar, order: usize) -> Result<Self> {
        let mut coeffs = vec![Scalar::zero(); order];
        coeffs[0] = c;
        Self::new(coeffs)
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.series
    }

    /// Coefficient `a_i` of `y^i`.
    pub fn coeff(&self, i: usize) -> Scalar {
        self.series.coeff(i)
    }

    /// `[a_1, ..., a_r]`.
    pub fn coeffs(&self) -> Vec<Scalar> {
        self.series.coeffs()[1..].to_vec()
    }

    pub fn leading(&self) -> Scalar {
        self.series.coeff(1)
    }

    pub fn is_identity(&self) -> bool {
        self.leading().is_one() && (2..=self.order()).all(|i| self.coeff(i).is_zero())
    }

    /// `a_1 = 1`.
    pub fn is_unipotent(&self) -> bool {
        self.leading().is_one()
    }

    pub fn mul(&self, other: &Jet) -> Result<Jet> {
        Ok(Jet {
            series: self.series.compose(&other.series)?,
        })
    }

    pub fn inv(&self) -> Jet {
        Jet {
            series: self
                .series
                .compose_inverse()
                .expect("jet invariants guarantee an invertible leading coefficient"),
        }
    }

    /// Delete the terms above `order`.
    pub fn project(&self, order: usize) -> Result<Jet> {
        if order == 0 {
            return Err(Error::validation("projection", "target order must be at least 1"));
        }
        Ok(Jet {
            series: self.series.truncate(order)?,
        })
    }

    /// The lift with zero coefficients above the current order.
    pub fn lift(&self, order: usize) -> Result<Jet> {
        Ok(Jet {
            series: self.series.extend(order)?,
        })
    }

    /// `h g h^-1`.
    pub fn conjugate_by(&self, h: &Jet) -> Result<Jet> {
        h.mul(self)?.mul(&h.inv())
    }

    pub fn pow(&self, n: i64) -> Jet {
        let mut base = if n < 0 { self.inv() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Jet::identity(self.order());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("equal orders");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("equal orders");
            }
        }
        acc
    }

    /// Whether the leading coefficient is positive.
    pub fn is_orientation_preserving(&self) -> Result<bool> {
        Ok(self.leading().sign()? == Ordering::Greater)
    }

    /// Apply `f` to every coefficient, re-checking the invariants.
    pub fn try_map_coeffs<F>(&self, f: F) -> Result<Jet>
    where
        F: FnMut(&Scalar) -> Result<Scalar>,
    {
        Jet::from_series(self.series.try_map_coeffs(f)?)
    }

    pub fn fmt_with(&self, style: &SymbolStyle<'_>) -> String {
        self.series.fmt_with(style)
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.series.fmt(f)
    }
}

pub fn jet_mul(g: &Jet, h: &Jet) -> Result<Jet> {
    g.mul(h)
}

pub fn jet_inv(g: &Jet) -> Jet {
    g.inv()
}

pub fn jet_project(g: &Jet, order: usize) -> Result<Jet> {
    g.project(order)
}

/// `y + t y^k`, the image of `t` under the central inclusion into `J^k`.
pub fn jet_embed_translation(t: &Scalar, k: usize) -> Result<Jet> {
    if k < 2 {
        return Err(Error::validation("translation", format!("k = {k} must be at least 2")));
    }
    let mut coeffs = vec![Scalar::zero(); k];
    coeffs[0] = Scalar::one();
    coeffs[k - 1] = t.clone();
    Jet::new(coeffs)
}

/// `h g h^-1`.
pub fn jet_conjugate(h: &Jet, g: &Jet) -> Result<Jet> {
    g.conjugate_by(h)
}

/// `g h g^-1 h^-1`.
pub fn commutator(g: &Jet, h: &Jet) -> Result<Jet> {
    g.mul(h)?.mul(&g.inv())?.mul(&h.inv())
}

/// `g = linear ∘ unipotent` with `linear = a_1 y` and `unipotent` in `J^{2,r}`.
pub fn jet_semidirect_split(g: &Jet) -> (Jet, Jet) {
    let a1 = g.leading();
    let linear = Jet::linear(a1.clone(), g.order()).expect("leading coefficient is invertible");
    let inv = a1.checked_inv().expect("leading coefficient is invertible");
    let unipotent = Jet {
        series: g.series.scale(&inv),
    };
    (linear, unipotent)
}

/// Element of `J^k` tagged with its coset of the central subgroup `{y + t y^k}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JetGroupElementClass {
    pub jet: Jet,
    pub coset_tag: Jet,
}

impl JetGroupElementClass {
    pub fn new(jet: Jet) -> Result<Self> {
        if jet.order() < 2 {
            return Err(Error::validation("coset tag", "order must be at least 2"));
        }
        let coset_tag = jet.project(jet.order() - 1)?;
        Ok(JetGroupElementClass { jet, coset_tag })
    }

    /// The central parameter `t` with `jet = lift(coset_tag) ∘ (y + t y^k)`.
    pub fn central_parameter(&self) -> Scalar {
        let k = self.jet.order();
        let base = self.coset_tag.lift(k).expect("lift to a higher order");
        let rest = base.inv().mul(&self.jet).expect("equal orders");
        rest.coeff(k)
    }
}

/// Successive commutator stages of a finite generating set.
#[derive(Clone, Debug)]
pub struct DerivedSeries {
    /// `stages[0]` are the distinct non-identity generators; `stages[i+1]` the
    /// distinct non-identity commutators of pairs from `stages[i]`.
    pub stages: Vec<Vec<Jet>>,
    /// First stage with no non-identity element, if reached.
    pub identity_stage: Option<usize>,
}

/// Default number of commutator rounds.
pub const DERIVED_SERIES_DEPTH: usize = 3;

/// Closes a generating set under pairwise commutators for at most `max_steps`
/// rounds, stopping once a stage consists of identities only.
pub fn derived_series(generators: &[Jet], max_steps: usize) -> Result<DerivedSeries> {
    if let Some(first) = generators.first() {
        if let Some(bad) = generators.iter().find(|g| g.order() != first.order()) {
            return Err(Error::OrderMismatch {
                left: first.order(),
                right: bad.order(),
            });
        }
    }
    let mut stage = dedup_nontrivial(generators.iter().cloned());
    let mut stages = Vec::new();
    for step in 0..=max_steps {
        if stage.is_empty() {
            stages.push(stage);
            return Ok(DerivedSeries {
                stages,
                identity_stage: Some(step),
            });
        }
        if step == max_steps {
            stages.push(stage);
            break;
        }
        let mut next = Vec::new();
        for (i, g) in stage.iter().enumerate() {
            for h in &stage[i + 1..] {
                next.push(commutator(g, h)?);
            }
        }
        stages.push(stage);
        stage = dedup_nontrivial(next);
    }
    Ok(DerivedSeries {
        stages,
        identity_stage: None,
    })
}

fn dedup_nontrivial<I: IntoIterator<Item = Jet>>(jets: I) -> Vec<Jet> {
    let mut seen = HashSet::new();
    jets.into_iter()
        .filter(|j| !j.is_identity())
        .filter(|j| seen.insert(j.clone()))
        .collect()
}

/// Preimage of `g = c_1 y + c_2 y^2` under `ay + b ↦ a^-1 y + b a^-2 y^2`.
pub fn j2_to_affine(g: &Jet) -> Result<(Scalar, Scalar)> {
    if g.order() != 2 {
        return Err(Error::OrderMismatch {
            left: g.order(),
            right: 2,
        });
    }
    let c1_inv = g.leading().checked_inv()?;
    let a = c1_inv.clone();
    let b = &g.coeff(2) * &(&c1_inv * &c1_inv);
    Ok((a, b))
}

/// `ay + b ↦ a^-1 y + b a^-2 y^2`.
pub fn affine_to_j2(a: &Scalar, b: &Scalar) -> Result<Jet> {
    let a_inv = a.checked_inv()?;
    let c2 = b * &(&a_inv * &a_inv);
    Jet::new(vec![a_inv, c2])
}

/// Product in the affine group: `(a1, b1)(a2, b2) = (a1 a2, a1 b2 + b1)`.
pub fn affine_mul(m1: &(Scalar, Scalar), m2: &(Scalar, Scalar)) -> (Scalar, Scalar) {
    (&m1.0 * &m2.0, &(&m1.0 * &m2.1) + &m1.1)
}
