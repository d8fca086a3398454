//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails or exceeds its time budget.

use std::time::{Duration, Instant};

use folhol::cmd_table1;
use folhol_core::exact_series::{parse_bivariate, parse_series, rat, Rational, Scalar, TruncatedSeries};
use folhol_core::flows::{flow_jet, VectorField};
use folhol_core::foliations::{
    check_local_submersion, check_vertical_automorphism, LeafPresentation, SubmersionCandidate,
};
use folhol_core::groupoid_model::{
    check_separation_sample, component_of, omega_chart, separation_epsilon, GroupoidElement, OmegaPoint,
    SampleCheck,
};
use folhol_core::holonomy::{conjugate_tuples, holonomy_hom, realize_hom, ConjugacyVerdict, HolonomyHom};
use folhol_core::jet_groups::{
    affine_mul, affine_to_j2, derived_series, j2_to_affine, jet_embed_translation, Jet,
};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rand_rational(r: &mut ChaCha8Rng, range: i64) -> Rational {
    rat(r.gen_range(-range..=range), r.gen_range(1..=4))
}

fn rand_nonzero(r: &mut ChaCha8Rng, range: i64) -> Rational {
    loop {
        let q = rand_rational(r, range);
        if !q.is_zero() {
            return q;
        }
    }
}

fn rand_jet(r: &mut ChaCha8Rng, order: usize) -> Jet {
    let mut coeffs = vec![Scalar::from_rational(rand_nonzero(r, 4))];
    for _ in 1..order {
        coeffs.push(Scalar::from_rational(rand_rational(r, 4)));
    }
    Jet::new(coeffs).unwrap()
}

/// A jet whose leading coefficient is often ±1, where conjugacy is subtle.
fn rand_holonomy_jet(r: &mut ChaCha8Rng, order: usize) -> Jet {
    let lead = match r.gen_range(0..4) {
        0 => Rational::one(),
        1 => -Rational::one(),
        _ => rand_nonzero(r, 3),
    };
    let mut coeffs = vec![Scalar::from_rational(lead)];
    for _ in 1..order {
        let c = if r.gen_bool(0.3) { Rational::zero() } else { rand_rational(r, 3) };
        coeffs.push(Scalar::from_rational(c));
    }
    Jet::new(coeffs).unwrap()
}

struct Outcome {
    name: &'static str,
    limit: Duration,
    elapsed: Duration,
    result: Result<(), String>,
}

fn run(name: &'static str, limit_ms: u64, f: impl FnOnce() -> Result<(), String>) -> Outcome {
    let start = Instant::now();
    let result = f();
    Outcome {
        name,
        limit: Duration::from_millis(limit_ms),
        elapsed: start.elapsed(),
        result,
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Result<(), String> {
    let report = cmd_table1().map_err(|e| e.to_string())?;
    ensure(!report.failed, || format!("table mismatch:\n{report}"))?;
    let text = report.to_string();
    for expected in [
        "{E^t y}",
        "{y + t y^2}",
        "{E^n y + t y^2}",
        "{y + n y^2 + n^2 y^3 + t y^4}",
        "k = 1: unique foliation",
    ] {
        ensure(text.contains(expected), || format!("missing {expected}"))?;
    }
    Ok(())
}

/// Coefficients of `(1 - (k-1) t y^{k-1})^{-1/(k-1)} y` through `y^m`, from the
/// generalized binomial series.
fn closed_form_coeffs(k: usize, m: usize) -> Vec<Scalar> {
    let km1 = Rational::from_integer((k as i64 - 1).into());
    let alpha = -Rational::one() / &km1;
    let mut out = vec![Scalar::zero(); m + 1];
    let mut binom = Rational::one();
    let mut n = 0usize;
    while 1 + n * (k - 1) <= m {
        // C(alpha, n) (-(k-1))^n t^n
        let c = &binom * num_traits::pow(-km1.clone(), n);
        out[1 + n * (k - 1)] = &Scalar::from_rational(c) * &Scalar::time_power(n);
        binom = binom * (&alpha - Rational::from_integer((n as i64).into()))
            / Rational::from_integer((n as i64 + 1).into());
        n += 1;
    }
    out
}

fn criterion_2() -> Result<(), String> {
    for k in 2..=5 {
        for m in 1..=8 {
            let flow = flow_jet(&VectorField::monomial(k, m), m).map_err(|e| e.to_string())?;
            let got = flow.series();
            let want = TruncatedSeries::new('y', closed_form_coeffs(k, m), m);
            ensure(got == want, || format!("k = {k}, m = {m}: {got} vs {want}"))?;
        }
    }
    Ok(())
}

fn criterion_3() -> Result<(), String> {
    let mut r = rng(3);
    for order in 1..=6usize {
        let id = Jet::identity(order);
        for _ in 0..1000 {
            let (a, b, c) = (rand_jet(&mut r, order), rand_jet(&mut r, order), rand_jet(&mut r, order));
            let ab = a.mul(&b).unwrap();
            ensure(ab.mul(&c).unwrap() == a.mul(&b.mul(&c).unwrap()).unwrap(), || {
                format!("associativity fails at order {order}")
            })?;
            ensure(a.mul(&id).unwrap() == a && id.mul(&a).unwrap() == a, || "identity".into())?;
            let ai = a.inv();
            ensure(a.mul(&ai).unwrap().is_identity() && ai.mul(&a).unwrap().is_identity(), || {
                format!("inverse of {a}")
            })?;
            for s in 1..order {
                let lhs = ab.project(s).unwrap();
                let rhs = a.project(s).unwrap().mul(&b.project(s).unwrap()).unwrap();
                ensure(lhs == rhs, || format!("projection to {s} of {a} and {b}"))?;
            }
            if order >= 2 {
                // a · lift(proj(a))^-1 lies in the kernel, which is {y + t y^order}
                let lifted = a.project(order - 1).unwrap().lift(order).unwrap();
                let kernel_elt = a.mul(&lifted.inv()).unwrap();
                ensure(kernel_elt.project(order - 1).unwrap().is_identity(), || "kernel".into())?;
                let t = kernel_elt.coeff(order);
                ensure(kernel_elt == jet_embed_translation(&t, order).unwrap(), || {
                    format!("kernel element {kernel_elt} is not central translation")
                })?;
                let emb = jet_embed_translation(&Scalar::from_rational(rand_rational(&mut r, 5)), order).unwrap();
                ensure(emb.project(order - 1).unwrap().is_identity(), || "embedding".into())?;
                let conj = emb.conjugate_by(&a).unwrap();
                ensure(conj.project(order - 1).unwrap().is_identity(), || "kernel is not normal".into())?;
            }
            ensure(a.conjugate_by(&b).unwrap().leading() == a.leading(), || {
                format!("conjugation changed the leading coefficient of {a}")
            })?;
        }
    }
    Ok(())
}

fn criterion_4() -> Result<(), String> {
    let mut r = rng(4);
    for _ in 0..1000 {
        let m1 = (Scalar::from_rational(rand_nonzero(&mut r, 6)), Scalar::from_rational(rand_rational(&mut r, 6)));
        let m2 = (Scalar::from_rational(rand_nonzero(&mut r, 6)), Scalar::from_rational(rand_rational(&mut r, 6)));
        let j1 = affine_to_j2(&m1.0, &m1.1).unwrap();
        let j2 = affine_to_j2(&m2.0, &m2.1).unwrap();
        let prod = affine_mul(&m1, &m2);
        ensure(j1.mul(&j2).unwrap() == affine_to_j2(&prod.0, &prod.1).unwrap(), || {
            format!("not a homomorphism at {j1}, {j2}")
        })?;
        ensure(j2_to_affine(&j1).unwrap() == m1, || "not inverse maps".into())?;
    }
    Ok(())
}

fn criterion_5() -> Result<(), String> {
    let mut r = rng(5);
    for k in 1..=5usize {
        for _ in 0..20 {
            let n = r.gen_range(1..=3);
            let gens: Vec<Jet> = (0..n).map(|_| rand_jet(&mut r, k)).collect();
            let ds = derived_series(&gens, 3).map_err(|e| e.to_string())?;
            let stage = ds.identity_stage.ok_or_else(|| format!("no identity within depth 3 in J^{k}"))?;
            ensure(stage <= k, || format!("identity at stage {stage} > k = {k}"))?;
        }
    }
    Ok(())
}

fn criterion_6() -> Result<(), String> {
    let mut r = rng(6);
    for i in 0..500 {
        let order = 1 + i % 4;
        let n = r.gen_range(1..=3);
        let names: Vec<char> = "abc".chars().take(n).collect();
        let g1: Vec<Jet> = (0..n).map(|_| rand_holonomy_jet(&mut r, order)).collect();
        let h0 = rand_jet(&mut r, order);
        let g2: Vec<Jet> = g1.iter().map(|g| g.conjugate_by(&h0).unwrap()).collect();
        match conjugate_tuples(&names, &g1, &g2, order).map_err(|e| e.to_string())? {
            ConjugacyVerdict::Conjugate { conjugator } => {
                for (a, b) in g1.iter().zip(&g2) {
                    ensure(&a.conjugate_by(&conjugator).unwrap() == b, || {
                        format!("returned conjugator {conjugator} fails on {a}")
                    })?;
                }
            }
            other => return Err(format!("{g1:?} by {h0}: {other}")),
        }
    }
    let trivial = [Jet::identity(1)];
    let twisted = [Jet::linear(Scalar::exp_symbol(), 1).unwrap()];
    match conjugate_tuples(&['a'], &trivial, &twisted, 1).map_err(|e| e.to_string())? {
        ConjugacyVerdict::NotConjugate { order: 1, .. } => Ok(()),
        other => Err(format!("cylinder pair: {other}")),
    }
}

fn criterion_7() -> Result<(), String> {
    let mut r = rng(7);
    for i in 0..200 {
        let k = 2 + i % 4;
        let n = r.gen_range(1..=3);
        let names: Vec<char> = "abc".chars().take(n).collect();
        let images: Vec<Jet> = (0..n).map(|_| rand_holonomy_jet(&mut r, k - 1)).collect();
        let hom = HolonomyHom::new(LeafPresentation::new(names, vec![]).unwrap(), k - 1, images, None)
            .map_err(|e| e.to_string())?;
        let spec = realize_hom(&hom, k).map_err(|e| e.to_string())?;
        let back = holonomy_hom(&spec).map_err(|e| e.to_string())?;
        ensure(back == hom, || format!("round trip changed {hom}"))?;
    }
    Ok(())
}

fn criterion_8() -> Result<(), String> {
    let cand = |s: &str, k| SubmersionCandidate::new(parse_bivariate(s, ('x', 'y')).unwrap(), k).unwrap();
    ensure(check_local_submersion(&cand("y + x y^2", 2)).holds, || "k = 2 should pass".into())?;
    let v = check_local_submersion(&cand("y + x y^2", 3));
    ensure(!v.holds && v.failing_order == Some(2), || format!("k = 3: {v:?}"))?;
    for c in [rat(3, 1), rat(-1, 2), rat(7, 5)] {
        let scaled = parse_bivariate("y + x y^2", ('x', 'y')).unwrap().scale(&Scalar::from_rational(c));
        let pass = check_local_submersion(&SubmersionCandidate::new(scaled.clone(), 2).unwrap());
        let fail = check_local_submersion(&SubmersionCandidate::new(scaled, 3).unwrap());
        ensure(pass.holds && fail.failing_order == Some(2), || "rescaling changed the verdict".into())?;
    }
    let theta = parse_bivariate("2y - y^3 + x y^4", ('x', 'y')).unwrap();
    ensure(check_vertical_automorphism(&theta, 4).unwrap().holds, || "vertical k = 4".into())?;
    ensure(!check_vertical_automorphism(&theta, 5).unwrap().holds, || "vertical k = 5".into())
}

fn rand_poly(r: &mut ChaCha8Rng, degree: usize) -> TruncatedSeries {
    let mut coeffs = vec![Scalar::zero()];
    for _ in 0..degree {
        coeffs.push(Scalar::from_rational(rand_rational(r, 3)));
    }
    TruncatedSeries::new('y', coeffs, degree)
}

fn criterion_9() -> Result<(), String> {
    let mut r = rng(9);
    let mut active = 0usize;
    for i in 0..100 {
        let k = 2 + i % 2;
        let (t1, t2) = loop {
            let a = rand_poly(&mut r, 4);
            let b = rand_poly(&mut r, 4);
            if (1..k).any(|j| a.coeff(j) != b.coeff(j)) {
                break (a, b);
            }
        };
        let cert = separation_epsilon(&t1, &t2, k).map_err(|e| e.to_string())?;
        let eps = cert.epsilon.clone();
        ensure(eps.is_positive(), || "epsilon must be positive".into())?;
        for _ in 0..1000 {
            // 0 < |y| < eps
            let frac = rat(r.gen_range(1..64), 64);
            let y = if r.gen_bool(0.5) { &eps * frac } else { -(&eps * frac) };
            let s1 = rand_rational(&mut r, 8);
            let s2 = rand_rational(&mut r, 8);
            let omega = |t: &Rational| (Rational::one() + t * num_traits::pow(y.clone(), k - 1)).is_positive();
            if !(omega(&s1) && omega(&s2)) {
                continue;
            }
            match check_separation_sample(&t1, &t2, k, &s1, &s2, &y).map_err(|e| e.to_string())? {
                SampleCheck::Collision => {
                    return Err(format!("counterexample {t1} / {t2} at t = {s1}, {s2}, y = {y}"))
                }
                SampleCheck::Disjoint => active += 1,
                SampleCheck::Vacuous => {}
            }
        }
    }
    ensure(active > 10_000, || format!("only {active} samples exercised the claim"))
}

fn criterion_10() -> Result<(), String> {
    let mut r = rng(10);
    let nz = |r: &mut ChaCha8Rng| rand_nonzero(r, 9);
    for _ in 0..500 {
        let pts: Vec<Rational> = (0..4).map(|_| nz(&mut r)).collect();
        let a = GroupoidElement::pair(pts[0].clone(), pts[1].clone()).unwrap();
        let b = GroupoidElement::pair(pts[1].clone(), pts[2].clone()).unwrap();
        let c = GroupoidElement::pair(pts[2].clone(), pts[3].clone()).unwrap();
        check_laws(&a, &b, &c, 2)?;
    }
    for k in 2..=4 {
        for _ in 0..200 {
            let [a, b, c] = [0, 1, 2].map(|_| GroupoidElement::Jet(rand_jet(&mut r, k)));
            check_laws(&a, &b, &c, k)?;
        }
    }
    let id = Jet::identity(3);
    for _ in 0..200 {
        let s = rand_rational(&mut r, 9);
        let t = rand_rational(&mut r, 9);
        let chart = |x: &Rational| omega_chart(&OmegaPoint::new(x.clone(), Rational::zero(), id.clone(), 3).unwrap(), 3).unwrap();
        let lhs = chart(&s).compose(&chart(&t)).unwrap();
        let sum = &s + &t;
        ensure(lhs == chart(&sum), || format!("chart at {s} and {t}"))?;
        let embedded = jet_embed_translation(&Scalar::from_rational(sum), 3).unwrap();
        ensure(lhs == GroupoidElement::Jet(embedded), || "embedding".into())?;
    }
    Ok(())
}

fn check_laws(a: &GroupoidElement, b: &GroupoidElement, c: &GroupoidElement, k: usize) -> Result<(), String> {
    let ab = a.compose(b).map_err(|e| e.to_string())?;
    let bc = b.compose(c).map_err(|e| e.to_string())?;
    ensure(ab.compose(c).unwrap() == a.compose(&bc).unwrap(), || format!("associativity {a} {b} {c}"))?;
    let left = GroupoidElement::unit(&a.target(), k);
    let right = GroupoidElement::unit(&a.source(), k);
    ensure(left.compose(a).unwrap() == *a && a.compose(&right).unwrap() == *a, || format!("units at {a}"))?;
    ensure(a.compose(&a.inverse()).unwrap() == left, || format!("a a^-1 for {a}"))?;
    ensure(a.inverse().compose(a).unwrap() == right, || format!("a^-1 a for {a}"))?;
    let ca = component_of(a).unwrap();
    let cb = component_of(b).unwrap();
    ensure(component_of(&ab).unwrap() == ca.times(cb), || format!("components of {a} and {b}"))
}

#[test]
fn acceptance_criteria() {
    let outcomes = vec![
        run("1 Table 1 reproduction", 1000, criterion_1),
        run("2 flow oracle agreement", 1000, criterion_2),
        run("3 jet-group property suite", 5000, criterion_3),
        run("4 J^2 and the affine group", 1000, criterion_4),
        run("5 solvability probe", 5000, criterion_5),
        run("6 conjugacy solver round trips", 10000, criterion_6),
        run("7 realization round trip", 5000, criterion_7),
        run("8 local submersion criterion", 1000, criterion_8),
        run("9 separation certificates", 10000, criterion_9),
        run("10 groupoid axioms", 2000, criterion_10),
    ];
    let mut all = true;
    for o in &outcomes {
        let timely = o.elapsed <= o.limit;
        let pass = o.result.is_ok() && timely;
        all &= pass;
        let detail = match (&o.result, timely) {
            (Err(e), _) => format!(": {e}"),
            (Ok(()), false) => format!(": over the {:?} budget", o.limit),
            _ => String::new(),
        };
        println!(
            "criterion {}: {} ({:.3} s){detail}",
            o.name,
            if pass { "PASS" } else { "FAIL" },
            o.elapsed.as_secs_f64()
        );
    }
    assert!(all, "acceptance criteria failed");
}

#[test]
fn jet_literal_sanity() {
    let j = Jet::from_series(parse_series("y + y^2", 'y', 3).unwrap()).unwrap();
    assert_eq!(j.mul(&j).unwrap().to_string(), "y + 2 y^2 + 2 y^3");
    assert!(rat(1, 2).abs() == rat(-1, 2).abs());
}
