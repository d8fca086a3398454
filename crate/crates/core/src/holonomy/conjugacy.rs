//! Simultaneous conjugacy of finite tuples in `J^r`.
//!
//! Every tuple is first brought to a normal form under conjugation by unipotent
//! jets, one order at a time: at order `m + 1` the stabiliser of the tuple's
//! `m`-jets moves the order-`(m+1)` coefficients through an affine subspace,
//! and we pick its representative reduced against an echelon basis. Two normal
//! forms are then conjugate iff they differ by a dilation `λ y`, which scales
//! the coefficient of `y^m` by `λ^{1-m}`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::exact_series::scalar::ext_gcd;
use crate::exact_series::{Scalar, TruncatedSeries};
use crate::flows::{time_one_map, VectorField};
use crate::jet_groups::{Jet, JET_VAR};
use crate::linalg;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ConjugacyVerdict {
    /// `conjugator g1 conjugator^-1 = g2` for every generator.
    Conjugate { conjugator: Jet },
    /// Conjugate through a dilation `λ y` with `λ^degree = value`, whose root
    /// does not lie in the coefficient ring.
    ConjugateIrrational { degree: u32, value: Scalar },
    NotConjugate { order: usize, reason: String },
}

impl ConjugacyVerdict {
    pub fn is_conjugate(&self) -> bool {
        !matches!(self, ConjugacyVerdict::NotConjugate { .. })
    }
}

impl fmt::Display for ConjugacyVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConjugacyVerdict::Conjugate { conjugator } => write!(f, "conjugate by {conjugator}"),
            ConjugacyVerdict::ConjugateIrrational { degree, value } => write!(
                f,
                "conjugate by a dilation lambda y with lambda^{degree} = {value}"
            ),
            ConjugacyVerdict::NotConjugate { order, reason } => {
                write!(f, "not conjugate: obstruction at order {order}: {reason}")
            }
        }
    }
}

/// A tuple conjugated into normal form, with the unipotent conjugator used.
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub tuple: Vec<Jet>,
    pub conjugator: Jet,
}

fn field_from(basis_vec: &[Scalar], r: usize) -> TruncatedSeries {
    let mut coeffs = vec![Scalar::zero(); 2];
    coeffs.extend(basis_vec.iter().cloned());
    TruncatedSeries::new(JET_VAR, coeffs, r)
}

/// Coefficient of `y^n` in `z∘g - g' z`, the infinitesimal change of `g`
/// under conjugation by `exp(z d/dy)`.
fn infinitesimal(z: &TruncatedSeries, g: &Jet, n: usize) -> Result<Scalar> {
    let zg = z.compose(g.series())?;
    let gz = g.series().derivative().mul(z)?;
    Ok(&zg.coeff(n) - &gz.coeff(n))
}

/// Normal form of a tuple of jets of order `r` under unipotent conjugation.
pub fn unipotent_normal_form(tuple: &[Jet], r: usize) -> Result<NormalForm> {
    let mut gs = tuple.to_vec();
    let mut u = Jet::identity(r);
    // basis of the stabiliser algebra, in coordinates of y^2..y^r
    let mut basis: Vec<Vec<Scalar>> = (0..r.saturating_sub(1))
        .map(|i| {
            let mut v = vec![Scalar::zero(); r - 1];
            v[i] = Scalar::one();
            v
        })
        .collect();
    for m in 1..r {
        if basis.is_empty() || gs.is_empty() {
            break;
        }
        let n = m + 1;
        let fields: Vec<TruncatedSeries> = basis.iter().map(|b| field_from(b, r)).collect();
        let mut rows = Vec::with_capacity(gs.len());
        for g in &gs {
            let row = fields
                .iter()
                .map(|z| infinitesimal(z, g, n))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let cols: Vec<Vec<Scalar>> = (0..basis.len())
            .map(|j| rows.iter().map(|row| row[j].clone()).collect())
            .collect();
        let tau: Vec<Scalar> = gs.iter().map(|g| g.coeff(n)).collect();
        let reduced = linalg::reduce_modulo_span(&cols, &tau)?;
        if reduced != tau {
            let rhs: Vec<Scalar> = reduced.iter().zip(&tau).map(|(a, b)| a - b).collect();
            let s = linalg::solve(&rows, basis.len(), &rhs)?
                .ok_or_else(|| Error::Domain("normal form: reduction left the orbit".into()))?;
            let mut z = TruncatedSeries::zero(JET_VAR, r);
            for (sj, f) in s.iter().zip(&fields) {
                z = z.add(&f.scale(sj))?;
            }
            let c = time_one_map(&VectorField::new(z)?, r)?;
            let c_inv = c.inv();
            for g in gs.iter_mut() {
                *g = c.mul(g)?.mul(&c_inv)?;
            }
            u = c.mul(&u)?;
            if gs.iter().map(|g| g.coeff(n)).ne(reduced.iter().cloned()) {
                return Err(Error::Domain(format!(
                    "normal form: stabiliser step at order {n} did not reach the reduced coefficients"
                )));
            }
        }
        let ker = linalg::kernel(&rows, basis.len())?;
        basis = ker
            .iter()
            .map(|kv| {
                let mut v = vec![Scalar::zero(); r - 1];
                for (kj, b) in kv.iter().zip(&basis) {
                    if kj.is_zero() {
                        continue;
                    }
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi = &*vi + &(kj * bi);
                    }
                }
                v
            })
            .collect();
    }
    Ok(NormalForm {
        tuple: gs,
        conjugator: u,
    })
}

/// `λ^exponent = value`, accumulated over all coefficient equations.
struct DilationEquations {
    exponent: i64,
    value: Scalar,
}

impl DilationEquations {
    /// Adds `λ^e = q`; returns `false` when inconsistent with earlier equations.
    fn add(&mut self, e: i64, q: Scalar) -> Result<bool> {
        if self.exponent == 0 {
            self.exponent = e;
            self.value = q;
            return Ok(true);
        }
        let (d, a, b) = ext_gcd(self.exponent, e);
        let combined = &self.value.pow(a)? * &q.pow(b)?;
        if combined.pow(self.exponent / d)? != self.value || combined.pow(e / d)? != q {
            return Ok(false);
        }
        self.exponent = d;
        self.value = combined;
        Ok(true)
    }

    /// Whether a real solution exists.
    fn has_real_root(&self) -> Result<bool> {
        if self.exponent % 2 == 1 || self.exponent == 0 {
            return Ok(true);
        }
        Ok(self.value.sign()? == Ordering::Greater)
    }
}

/// Decides whether some `h` in `J^r` satisfies `h g1[i] h^-1 = g2[i]` for all
/// `i`. `names` label the generators in diagnostics.
pub fn conjugate_tuples(names: &[char], g1: &[Jet], g2: &[Jet], r: usize) -> Result<ConjugacyVerdict> {
    if g1.len() != g2.len() || g1.len() != names.len() {
        return Err(Error::validation("conjugacy", "tuples of different lengths"));
    }
    for g in g1.iter().chain(g2) {
        if g.order() != r {
            return Err(Error::OrderMismatch {
                left: r,
                right: g.order(),
            });
        }
    }
    for ((name, a), b) in names.iter().zip(g1).zip(g2) {
        if a.leading() != b.leading() {
            return Ok(ConjugacyVerdict::NotConjugate {
                order: 1,
                reason: format!(
                    "leading coefficients of {name} differ ({} vs {})",
                    a.leading(),
                    b.leading()
                ),
            });
        }
    }
    let n1 = unipotent_normal_form(g1, r)?;
    let n2 = unipotent_normal_form(g2, r)?;

    let mut eqs = DilationEquations {
        exponent: 0,
        value: Scalar::one(),
    };
    for m in 2..=r {
        for ((name, a), b) in names.iter().zip(&n1.tuple).zip(&n2.tuple) {
            let (x, x2) = (a.coeff(m), b.coeff(m));
            match (x.is_zero(), x2.is_zero()) {
                (true, true) => continue,
                (true, false) | (false, true) => {
                    return Ok(ConjugacyVerdict::NotConjugate {
                        order: m,
                        reason: format!(
                            "normal forms of {name} differ at y^{m} ({x} vs {x2}) and no dilation relates them"
                        ),
                    })
                }
                (false, false) => {
                    let q = x.checked_div(&x2)?;
                    if !eqs.add(m as i64 - 1, q)? {
                        return Ok(ConjugacyVerdict::NotConjugate {
                            order: m,
                            reason: format!("dilation equations become inconsistent at y^{m} of {name}"),
                        });
                    }
                }
            }
        }
        if !eqs.has_real_root()? {
            return Ok(ConjugacyVerdict::NotConjugate {
                order: m,
                reason: format!(
                    "a dilation would need lambda^{} = {} < 0",
                    eqs.exponent, eqs.value
                ),
            });
        }
    }

    let lambda = if eqs.exponent == 0 {
        Scalar::one()
    } else {
        match eqs.value.exact_root(eqs.exponent as u32) {
            Some(l) => l,
            None => {
                return Ok(ConjugacyVerdict::ConjugateIrrational {
                    degree: eqs.exponent as u32,
                    value: eqs.value,
                })
            }
        }
    };
    let dilation = Jet::linear(lambda, r)?;
    let h = n2.conjugator.inv().mul(&dilation)?.mul(&n1.conjugator)?;
    let h_inv = h.inv();
    for (a, b) in g1.iter().zip(g2) {
        if &h.mul(a)?.mul(&h_inv)? != b {
            return Err(Error::Domain(format!("conjugator {h} failed verification")));
        }
    }
    Ok(ConjugacyVerdict::Conjugate { conjugator: h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_series::parse_series;

    fn jet(text: &str, r: usize) -> Jet {
        Jet::from_series(parse_series(text, 'y', r).unwrap()).unwrap()
    }

    fn check(g1: &[Jet], g2: &[Jet], r: usize) -> ConjugacyVerdict {
        let names: Vec<char> = ('a'..='z').take(g1.len()).collect();
        conjugate_tuples(&names, g1, g2, r).unwrap()
    }

    #[test]
    fn half_dilation() {
        let v = check(&[jet("y + y^2", 2)], &[jet("y + 2y^2", 2)], 2);
        assert_eq!(v, ConjugacyVerdict::Conjugate { conjugator: jet("1/2 y", 2) });
    }

    #[test]
    fn leading_obstruction() {
        let v = check(&[jet("y", 1)], &[Jet::linear(Scalar::exp_symbol(), 1).unwrap()], 1);
        assert!(matches!(v, ConjugacyVerdict::NotConjugate { order: 1, .. }));
    }

    #[test]
    fn self_conjugacy_is_identity() {
        let g = [jet("2y + y^2 - 3y^3", 3), jet("-y + 5y^3", 3)];
        match check(&g, &g, 3) {
            ConjugacyVerdict::Conjugate { conjugator } => assert!(conjugator.is_identity()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trips() {
        let cases = [
            (vec![jet("y + y^2 + y^3 - y^4", 4)], jet("3y - y^2 + 2y^4", 4)),
            (vec![jet("2y + y^2", 3), jet("2y - y^3", 3)], jet("-y + y^2 + y^3", 3)),
            (vec![jet("-y + y^2", 4)], jet("1/2 y + 7y^3", 4)),
            (vec![jet("y", 3), jet("y + y^3", 3)], jet("y + y^2", 3)),
            (vec![jet("E y + y^2", 3)], jet("2y + E y^2", 3)),
        ];
        for (g, h0) in cases {
            let r = h0.order();
            let g2: Vec<Jet> = g.iter().map(|x| x.conjugate_by(&h0).unwrap()).collect();
            match check(&g, &g2, r) {
                ConjugacyVerdict::Conjugate { conjugator } => {
                    for (a, b) in g.iter().zip(&g2) {
                        assert_eq!(&a.conjugate_by(&conjugator).unwrap(), b);
                    }
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn genuine_obstructions() {
        // y + y^3 and y - y^3 need lambda^2 = -1
        let v = check(&[jet("y + y^3", 3)], &[jet("y - y^3", 3)], 3);
        assert!(matches!(v, ConjugacyVerdict::NotConjugate { order: 3, .. }));
        // y + y^2 and y + y^3: zero patterns differ in normal form
        let v = check(&[jet("y + y^2", 3)], &[jet("y + y^3", 3)], 3);
        assert!(matches!(v, ConjugacyVerdict::NotConjugate { order: 2, .. }));
        // y + y^3 vs y + 2 y^3 needs lambda^2 = 1/2
        let v = check(&[jet("y + y^3", 3)], &[jet("y + 2y^3", 3)], 3);
        assert!(matches!(v, ConjugacyVerdict::ConjugateIrrational { degree: 2, .. }));
    }
}
