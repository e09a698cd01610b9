//! The acceptance criteria as library functions, shared by the `acceptance`
//! test target and `reslab verify`.

use std::time::Instant;

use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::fixtures::{abs_term, e, one, random_symbol, sum, xi_term};
use super::HarnessError;
use crate::algebra::{rat, CRational, Mat};
use crate::anomaly::{
    coboundary_anomaly, correction_sum, family_derivative, hochschild_b, interpolation_difference, iterated_simplex_integral,
    mellin_residue, richardson_derivative, simplex_constant, weighted_cochain, CoefficientConvention, FamilySpec,
    MultiIndex, Operand, OracleTrace,
};
use crate::oracle::checks::{b_jlo_check, basicformula_check, duhamel_check};
use crate::oracle::{jlo_value, weighted_trace, zeta_trace_germ, SpectralOperator};
use crate::symbol::{compose, ClassicalSymbol, EigenvalueLaw, Weight};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: String,
    pub title: String,
    pub pass: bool,
    /// The quantity compared against `tolerance` (a failure count for exact criteria).
    pub metric: f64,
    pub tolerance: f64,
    pub detail: String,
    pub side_table: Vec<String>,
    pub millis: u128,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} {} {}: metric {:.3e} (tol {:.1e}) {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.metric,
            self.tolerance,
            self.detail
        )
    }
}

struct Outcome {
    metric: f64,
    detail: String,
    side_table: Vec<String>,
}

impl Outcome {
    fn new(metric: f64, detail: impl Into<String>) -> Self {
        Outcome {
            metric,
            detail: detail.into(),
            side_table: Vec::new(),
        }
    }
}

fn run(id: &str, title: &str, tolerance: f64, f: impl FnOnce() -> Result<Outcome, HarnessError>) -> CriterionResult {
    let start = Instant::now();
    let (pass, metric, detail, side_table) = match f() {
        Ok(o) => (o.metric <= tolerance, o.metric, o.detail, o.side_table),
        Err(err) => (false, f64::INFINITY, format!("error: {err}"), Vec::new()),
    };
    CriterionResult {
        id: id.to_string(),
        title: title.to_string(),
        pass,
        metric,
        tolerance,
        detail,
        side_table,
        millis: start.elapsed().as_millis(),
    }
}

fn is_zero(c: &CRational) -> bool {
    *c == CRational::default()
}

fn lap() -> EigenvalueLaw {
    EigenvalueLaw::laplacian()
}

fn law(p: &[i64]) -> EigenvalueLaw {
    EigenvalueLaw::from_ints(p).expect("fixture laws are positive")
}

fn q(a: &ClassicalSymbol) -> SpectralOperator {
    SpectralOperator::quantize(a)
}

fn mult(f: crate::algebra::FourierPoly) -> ClassicalSymbol {
    ClassicalSymbol::multiplier(f)
}

fn c(n: i64) -> CRational {
    CRational::from_int(n)
}

// ---------------------------------------------------------------- residues

pub fn a1_residue_trace_law(_tol_scale: f64) -> CriterionResult {
    run("A-1", "residue vanishes on commutators", 0.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA1);
        let (mut bad, mut nontrivial) = (0u32, 0u32);
        for _ in 0..200 {
            let (oa, ob) = (rng.gen_range(-3..=3), rng.gen_range(-3..=3));
            let a = random_symbol(&mut rng, oa, 8, 3);
            let b = random_symbol(&mut rng, ob, 8, 3);
            let ab = compose(&a, &b, -2)?;
            let ba = compose(&b, &a, -2)?;
            if !is_zero(&ab.sub(&ba)?.residue()?) {
                bad += 1;
            }
            if !is_zero(&ab.residue()?) {
                nontrivial += 1;
            }
        }
        Ok(Outcome::new(
            f64::from(bad),
            format!("200 pairs, {bad} nonzero commutator residues, {nontrivial} pairs with res(AB) != 0"),
        ))
    })
}

fn a2_fixtures() -> Vec<(EigenvalueLaw, ClassicalSymbol, i64)> {
    let mixed = sum(&[xi_term(2, e(1)), xi_term(1, one()), abs_term(1, e(-1).add(&one().scale(&c(3))))]);
    let low = sum(&[abs_term(-1, one().add(&e(2))), xi_term(-2, e(1)), abs_term(-3, one())]);
    let odd = sum(&[xi_term(1, one().scale(&c(5))), xi_term(-1, one()), abs_term(0, e(1))]);
    let complex = ClassicalSymbol::monomial(
        3,
        one().scale(&CRational::from_parts(1, 2, 3, 1)),
        one().scale(&CRational::from_parts(-2, 1, 0, 1)),
    );
    let mut out = vec![(lap(), ClassicalSymbol::abs_xi_power(1), 1)];
    for l in [lap(), law(&[1, 1]), law(&[3, 1, 2]), law(&[2, 0, 0, 1])] {
        out.push((l.clone(), mixed.clone(), 1));
        out.push((l.clone(), low.clone(), 0));
        out.push((l.clone(), odd.clone(), 2));
        out.push((l.clone(), complex.clone(), 2));
    }
    out.push((lap(), ClassicalSymbol::abs_xi_power(-1), 0));
    out.push((law(&[1, 1]), ClassicalSymbol::xi_power(2), 3));
    out.push((lap(), ClassicalSymbol::identity(1), 0));
    out
}

pub fn a2_pole_law(tol_scale: f64) -> CriterionResult {
    run("A-2", "zeta pole equals the residue", 1e-9 * tol_scale, || {
        let fixtures = a2_fixtures();
        let mut worst = 0.0f64;
        let mut table = vec!["law | order(A) | k | oracle pole | (1/q) res".to_string()];
        for (l, a, k) in &fixtures {
            let c_op = q(a).mul(&SpectralOperator::weight_power(l, 1, -k))?;
            let germ = zeta_trace_germ(l, &c_op)?;
            let w = Weight::from_law(l.clone(), 1);
            let mut ops = vec![a.clone()];
            if *k > 0 {
                ops.push(w.power_neg(*k as u32, -24)?);
            }
            let r = mellin_residue(&w, &ops)?;
            let pole = germ.exact.pole.to_c64();
            worst = worst.max((pole - r.to_c64()).norm());
            table.push(format!(
                "{:?} | {} | {} | {} | {}",
                l.coeffs().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                a.order(),
                k,
                germ.exact.pole.to_exact_string(),
                r.to_exact_string()
            ));
        }
        let anchor = &table[1];
        let mut o = Outcome::new(worst, format!("{} fixtures, anchor {anchor}", fixtures.len()));
        o.side_table = table;
        Ok(o)
    })
}

pub fn a3_weighted_trace_anchors(tol_scale: f64) -> CriterionResult {
    run("A-3", "weighted trace anchors", 1e-9 * tol_scale, || {
        let (id, _) = weighted_trace(&lap(), &SpectralOperator::identity(1))?;
        let (abs, _) = weighted_trace(&lap(), &q(&ClassicalSymbol::abs_xi_power(1)))?;
        let (inv, _) = weighted_trace(&lap(), &SpectralOperator::weight_power(&lap(), 1, -1))?;
        let pi = std::f64::consts::PI;
        let d_id = id.norm();
        let d_abs = (abs - Complex64::new(-7.0 / 6.0, 0.0)).norm();
        let d_inv = (inv - Complex64::new(pi / pi.tanh(), 0.0)).norm();
        // the identity anchor carries its own, tighter bound
        let metric = d_abs.max(d_inv).max(d_id * 10.0);
        Ok(Outcome::new(
            metric,
            format!("tr(I) = {:.3e}, tr(|D|) + 7/6 = {d_abs:.3e}, tr((1-Δ)^-1) - π coth π = {d_inv:.3e}", id.re),
        ))
    })
}

// ---------------------------------------------------------------- JLO

fn shift(m: i64) -> SpectralOperator {
    q(&mult(e(m)))
}

pub fn b1_duhamel(tol_scale: f64) -> CriterionResult {
    run("B-1", "Duhamel formula", 1e-8 * tol_scale, || {
        let mut worst = 0.0f64;
        let mut parts = Vec::new();
        for u in [0.3, 1.0] {
            let d = duhamel_check(&lap(), &shift(1), u, 32, 64)?;
            parts.push(format!("u={u}: {d:.3e}"));
            worst = worst.max(d);
        }
        Ok(Outcome::new(worst, parts.join(", ")))
    })
}

/// Three tuples of three operators and one of four.
pub fn jlo_fixtures() -> Vec<Vec<SpectralOperator>> {
    let t1 = vec![mult(e(1)), mult(e(-1)), mult(one().add(&e(1)).add(&e(-1)))];
    let t2 = vec![xi_term(1, e(1)), mult(e(-1)), ClassicalSymbol::abs_xi_power(1)];
    let t3 = vec![mult(e(2)), xi_term(1, e(-1)), mult(e(-1).add(&one()))];
    let t4 = vec![mult(e(1)), xi_term(1, e(1)), mult(e(-1)), mult(e(-1).add(&one()))];
    [t1, t2, t3, t4].iter().map(|t| t.iter().map(q).collect()).collect()
}

pub fn b2_b_jlo(tol_scale: f64) -> CriterionResult {
    run("B-2", "coboundary identity of the JLO cochain", 1e-8 * tol_scale, || {
        let mut worst = 0.0f64;
        let mut table = vec!["operators | lhs | rhs | relative deviation".to_string()];
        for ops in jlo_fixtures() {
            let r = b_jlo_check(&lap(), &ops, 0.7, 24)?;
            worst = worst.max(r.deviation);
            table.push(format!("{} | {:.12e} | {:.12e} | {:.3e}", ops.len(), r.lhs, r.rhs, r.deviation));
        }
        let mut o = Outcome::new(worst, "t = 0.7, radius 24 / 48, four tuples");
        o.side_table = table;
        Ok(o)
    })
}

pub fn b3_jlo_cyclicity(tol_scale: f64) -> CriterionResult {
    run("B-3", "cyclic invariance of the JLO cochain", 1e-9 * tol_scale, || {
        let mut worst = 0.0f64;
        for ops in jlo_fixtures() {
            let base = jlo_value(&lap(), &ops, 0.7, 24)?.value;
            for s in 1..ops.len() {
                let mut rot = ops.clone();
                rot.rotate_left(s);
                let v = jlo_value(&lap(), &rot, 0.7, 24)?.value;
                worst = worst.max((v - base).norm() / base.norm().max(1.0));
            }
        }
        Ok(Outcome::new(worst, "all cyclic shifts of the B-2 tuples"))
    })
}

fn random_matrix(rng: &mut ChaCha8Rng) -> Mat<CRational> {
    Mat::from_rows(
        2,
        (0..4)
            .map(|_| CRational::from_parts(rng.gen_range(-5..=5), rng.gen_range(1..=4), rng.gen_range(-2..=2), 1))
            .collect(),
    )
}

pub fn b4_hochschild_nilpotent(_tol_scale: f64) -> CriterionResult {
    run("B-4", "b∘b = 0", 0.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xB4);
        let mut bad = 0u32;
        let mut checked = 0u32;
        let mul = |a: &Mat<CRational>, b: &Mat<CRational>| -> Result<Mat<CRational>, HarnessError> { Ok(a.mul(b)) };
        for n in 0..=3usize {
            for _ in 0..5 {
                // a random multilinear cochain φ(A₀,…,A_n) = tr(A₀R₀A₁R₁⋯A_nR_n)
                let weights: Vec<Mat<CRational>> = (0..=n).map(|_| random_matrix(&mut rng)).collect();
                let phi = |a: &[Mat<CRational>]| -> Result<CRational, HarnessError> {
                    let mut p = Mat::identity(2);
                    for (x, r) in a.iter().zip(&weights) {
                        p = p.mul(x).mul(r);
                    }
                    Ok(p.trace())
                };
                let b_phi = |a: &[Mat<CRational>]| hochschild_b(&phi, a, &mul);
                let args: Vec<Mat<CRational>> = (0..n + 3).map(|_| random_matrix(&mut rng)).collect();
                let single = hochschild_b(&phi, &args[..n + 2], &mul)?;
                let bb = hochschild_b(&b_phi, &args, &mul)?;
                checked += 1;
                if !is_zero(&bb) {
                    bad += 1;
                }
                // the check is only meaningful when bφ itself is nonzero
                if is_zero(&single) {
                    bad += 1;
                }
            }
        }
        Ok(Outcome::new(f64::from(bad), format!("{checked} random cochains of degree 0..3 over M2(Q)")))
    })
}

// ---------------------------------------------------------------- constants

pub fn b5_simplex_constants(_tol_scale: f64) -> CriterionResult {
    run("B-5", "simplex constants", 0.0, || {
        let mut bad = 0u32;
        let mut count = 0u32;
        let mut table = vec!["k | exact | printed".to_string()];
        for s in 1..=4usize {
            for total in 0..=5u32 {
                for k in MultiIndex::with_total(s, total) {
                    count += 1;
                    let c = simplex_constant(&k);
                    if iterated_simplex_integral(&k) != c.value_exact {
                        bad += 1;
                    }
                    if s == 1 && c.value_exact != c.value_paper {
                        bad += 1;
                    }
                    if s >= 2 && c.value_exact != c.value_paper && total <= 2 {
                        table.push(format!("{:?} | {} | {}", k.0, c.value_exact, c.value_paper));
                    }
                }
            }
        }
        let mut o = Outcome::new(
            f64::from(bad),
            format!("{count} multiindices checked by iterated integration; s = 1 agrees with 1/(k+1)!"),
        );
        o.side_table = table;
        Ok(o)
    })
}

pub fn b6_basic_formula(tol_scale: f64) -> CriterionResult {
    run("B-6", "small-time expansion and coefficient adjudication", 0.3 * tol_scale, || {
        let grid = [0.4, 0.2, 0.1, 0.05];
        let id = SpectralOperator::identity(1);
        let ids = [id.clone(), id.clone(), id];
        let ex = basicformula_check(&lap(), &ids, &grid, 0, CoefficientConvention::Exact, 32)?;
        let pa = basicformula_check(&lap(), &ids, &grid, 0, CoefficientConvention::Paper, 32)?;
        let mut table = vec!["case | t | EXACT residual | PAPER residual | tr(e^{-tQ})".to_string()];
        let mut identities_ok = true;
        for (e_row, p_row) in ex.rows.iter().zip(&pa.rows) {
            let tr = e_row.heat_trace_identity;
            identities_ok &= e_row.residual <= 1e-12 * tr;
            identities_ok &= (p_row.residual - 0.5 * tr).abs() <= 1e-12;
            table.push(format!(
                "n=2 identities K=0 | {} | {:.3e} | {:.6e} | {:.6e}",
                e_row.t, e_row.residual, p_row.residual, tr
            ));
        }
        let pair = [shift(1), shift(-1)];
        let slope_law = law(&[1, 1]);
        let shift_ex = basicformula_check(&slope_law, &pair, &grid, 2, CoefficientConvention::Exact, 1024)?;
        for r in &shift_ex.rows {
            table.push(format!("n=1 shift pair K=2, Q=1+|D| | {} | {:.3e} | (same) |", r.t, r.residual));
        }
        let slope = shift_ex.slope.unwrap_or(f64::NAN);
        let default_law = basicformula_check(&lap(), &pair, &grid, 2, CoefficientConvention::Exact, 1024)?;
        table.push(format!(
            "n=1 shift pair K=2, Q=1-Δ: slope {:.3} (informational)",
            default_law.slope.unwrap_or(f64::NAN)
        ));
        let triple = [shift(1), shift(1), shift(-2)];
        for conv in [CoefficientConvention::Exact, CoefficientConvention::Paper] {
            let r = basicformula_check(&slope_law, &triple, &grid, 2, conv, 1024)?;
            table.push(format!(
                "n=2 shift triple K=2, Q=1+|D|, {}: slope {:.3}",
                conv.name(),
                r.slope.unwrap_or(f64::NAN)
            ));
        }
        let metric = if identities_ok { (slope - 3.0).abs() } else { f64::INFINITY };
        let mut o = Outcome::new(
            metric,
            format!(
                "identity insertions {}; shift-pair slope {slope:.3}",
                if identities_ok { "match EXACT, PAPER off by tr/2" } else { "FAILED" }
            ),
        );
        o.side_table = table;
        Ok(o)
    })
}

// ---------------------------------------------------------------- anomalies

fn c1_pairs() -> Vec<(EigenvalueLaw, ClassicalSymbol, ClassicalSymbol)> {
    vec![
        (lap(), mult(e(1)), abs_term(1, e(-1))),
        (lap(), xi_term(1, e(2)), abs_term(1, e(-2))),
        (lap(), ClassicalSymbol::xi_power(2), mult(e(1).add(&e(-1)))),
        (
            law(&[1, 1]),
            sum(&[xi_term(1, e(1)), ClassicalSymbol::abs_xi_power(1)]),
            sum(&[xi_term(2, e(-1)), mult(e(-1))]),
        ),
        (
            law(&[2, 1, 3]),
            sum(&[abs_term(-1, e(1)), mult(e(2))]),
            sum(&[xi_term(2, e(-1)), abs_term(1, e(-2))]),
        ),
    ]
}

pub fn c1_coboundary_p0(tol_scale: f64) -> CriterionResult {
    run("C-1", "coboundary anomaly of tr^Q", 1e-7 * tol_scale, || {
        let mut worst = 0.0f64;
        let mut table = vec!["pair | formula | oracle".to_string()];
        for (i, (l, a, b)) in c1_pairs().into_iter().enumerate() {
            let w = Weight::from_law(l.clone(), 1);
            let f = coboundary_anomaly(&w, &[a.clone(), b.clone()], CoefficientConvention::Exact, 0)?;
            let (qa, qb) = (q(&a), q(&b));
            let (ab, _) = weighted_trace(&l, &qa.mul(&qb)?)?;
            let (ba, _) = weighted_trace(&l, &qb.mul(&qa)?)?;
            let oracle = ab - ba;
            worst = worst.max((f.value.to_c64() - oracle).norm());
            table.push(format!("{i} | {} | {:.12e}", f.value.to_exact_string(), oracle));
        }
        let mut o = Outcome::new(worst, "5 pairs, anchor (e^{ix}, e^{-ix}|D|) = -1");
        o.side_table = table;
        Ok(o)
    })
}

fn c2_tuple() -> Vec<ClassicalSymbol> {
    vec![
        mult(one().add(&e(1))),
        sum(&[xi_term(1, e(-1)), ClassicalSymbol::abs_xi_power(1)]),
        sum(&[ClassicalSymbol::abs_xi_power(1), mult(e(1))]),
        sum(&[mult(e(-1).add(&e(1).scale(&c(2)))), ClassicalSymbol::xi_power(1)]),
    ]
}

pub fn c2_coboundary_p1(tol_scale: f64) -> CriterionResult {
    run("C-2", "coboundary anomaly of χ_2", 1e-6 * tol_scale, || {
        let syms = c2_tuple();
        let w = Weight::laplacian();
        let operands: Vec<Operand> = syms.iter().cloned().map(Operand::new).collect();
        let mut metric = 0.0;
        let mut table = vec!["convention | formula | Hochschild combination | error estimate".to_string()];
        for conv in [CoefficientConvention::Exact, CoefficientConvention::Paper] {
            let f = coboundary_anomaly(&w, &syms, conv, 0)?;
            let chi = |a: &[Operand]| weighted_cochain(&w, a, &OracleTrace, conv);
            let b = hochschild_b(&chi, &operands, &|x: &Operand, y: &Operand| x.mul(y))?;
            let diff = (f.value.to_c64() - b.value).norm();
            if conv == CoefficientConvention::Exact {
                metric = diff;
            }
            table.push(format!(
                "{} | {} | {:.12e} | {:.1e}",
                conv.name(),
                f.value.to_exact_string(),
                b.value,
                b.err
            ));
        }
        let mut o = Outcome::new(metric, "one 4-tuple, Q = 1-Δ, EXACT convention");
        o.side_table = table;
        Ok(o)
    })
}

fn random_tuple_with_order_sum(rng: &mut ChaCha8Rng, len: usize, max_sum: i64) -> Vec<ClassicalSymbol> {
    loop {
        let orders: Vec<i64> = (0..len).map(|_| rng.gen_range(-3..=2)).collect();
        if orders.iter().sum::<i64>() <= max_sum {
            return orders.iter().map(|o| random_symbol(rng, *o, 8, 2)).collect();
        }
    }
}

pub fn c3_cocycle_vanishing(_tol_scale: f64) -> CriterionResult {
    run("C-3", "anomaly vanishes below order zero", 0.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
        let mut bad = 0u32;
        let mut residues = 0usize;
        for i in 0..50 {
            let w = if i % 2 == 0 { Weight::laplacian() } else { Weight::from_law(law(&[1, 1, 1]), 1) };
            let len = if i % 3 == 0 { 4 } else { 2 };
            let ops = random_tuple_with_order_sum(&mut rng, len, -1);
            // two extra shells force residues to be materialized rather than skipped
            let ev = coboundary_anomaly(&w, &ops, CoefficientConvention::Exact, 2)?;
            residues += ev.terms.len();
            if !is_zero(&ev.value) || ev.terms.iter().any(|t| t.residue != "0") {
                bad += 1;
            }
        }
        Ok(Outcome::new(
            f64::from(bad),
            format!("50 tuples, {residues} residues materialized, {bad} nonzero"),
        ))
    })
}

pub fn c4_cutoff(_tol_scale: f64) -> CriterionResult {
    run("C-4", "correction sum cutoff", 0.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC4);
        let (mut bad, mut nonzero, mut extra_rows) = (0u32, 0u32, 0usize);
        for i in 0..50 {
            let w = if i % 2 == 0 { Weight::laplacian() } else { Weight::from_law(law(&[2, 1, 1]), 1) };
            let len = 2 + i % 2;
            let ops: Vec<ClassicalSymbol> =
                (0..len)
                .map(|_| {
                    let order = rng.gen_range(-1..=2);
                    random_symbol(&mut rng, order, 8, 2)
                })
                .collect();
            let base = correction_sum(&w, &ops, CoefficientConvention::Exact, 0)?;
            let ext = correction_sum(&w, &ops, CoefficientConvention::Exact, 2)?;
            let extra = &ext.terms[base.terms.len()..];
            extra_rows += extra.len();
            if base.value != ext.value || extra.iter().any(|t| t.residue != "0") || extra.is_empty() {
                bad += 1;
            }
            if !is_zero(&base.value) {
                nonzero += 1;
            }
        }
        Ok(Outcome::new(
            f64::from(bad),
            format!("50 fixtures ({nonzero} with nonzero corrections), {extra_rows} extra residues all zero"),
        ))
    })
}

// ---------------------------------------------------------------- families

fn family() -> Result<FamilySpec, HarnessError> {
    Ok(FamilySpec::new(
        Weight::laplacian(),
        ClassicalSymbol::abs_xi_power(1),
        Some(EigenvalueLaw::direction(vec![rat(0, 1), rat(1, 1)])),
        (rat(0, 1), rat(1, 1)),
    )?)
}

fn family_law(t: &BigRational) -> Result<EigenvalueLaw, HarnessError> {
    Ok(lap().affine(&EigenvalueLaw::direction(vec![rat(0, 1), rat(1, 1)]), t)?)
}

fn d_fixtures() -> Vec<ClassicalSymbol> {
    vec![
        ClassicalSymbol::abs_xi_power(1),
        sum(&[ClassicalSymbol::xi_power(2), xi_term(1, e(1).add(&one().scale(&c(2))))]),
        sum(&[ClassicalSymbol::abs_xi_power(3), ClassicalSymbol::xi_power(1).scale(&c(2)), mult(one().add(&e(-1)))]),
    ]
}

pub fn d1_family_derivative(tol_scale: f64) -> CriterionResult {
    run("D-1", "derivative along a weight family", 1e-6 * tol_scale, || {
        let fam = family()?;
        let t = rat(1, 2);
        let mut worst = 0.0f64;
        let mut table = vec!["fixture | formula | finite difference | extrapolation error".to_string()];
        for (i, a) in d_fixtures().iter().enumerate() {
            let op = q(a);
            let f = |s: &BigRational| -> Result<Complex64, crate::anomaly::AnomalyError> {
                let l = lap()
                    .affine(&EigenvalueLaw::direction(vec![rat(0, 1), rat(1, 1)]), s)
                    .map_err(crate::anomaly::AnomalyError::from)?;
                Ok(weighted_trace(&l, &op)?.0)
            };
            let (fd, err) = richardson_derivative(f, &t, &rat(1, 8), 3)?;
            let formula = family_derivative(&fam, &t, std::slice::from_ref(a), CoefficientConvention::Exact)?;
            worst = worst.max((formula.value.to_c64() - fd).norm());
            table.push(format!("{i} | {} | {:.12e} | {:.1e}", formula.value.to_exact_string(), fd, err));
        }
        let mut o = Outcome::new(worst, "Q_t = 1-Δ + t|D| at t = 1/2");
        o.side_table = table;
        Ok(o)
    })
}

pub fn d2_interpolation(tol_scale: f64) -> CriterionResult {
    run("D-2", "interpolation between two weights", 1e-6 * tol_scale, || {
        let fam = family()?;
        let (l0, l1) = (family_law(&rat(0, 1))?, family_law(&rat(1, 1))?);
        let mut worst = 0.0f64;
        let mut table = vec!["fixture | quadrature | oracle difference".to_string()];
        for (i, a) in d_fixtures().iter().enumerate() {
            let v = interpolation_difference(&fam, std::slice::from_ref(a), 8, CoefficientConvention::Exact)?;
            let op = q(a);
            let oracle = weighted_trace(&l1, &op)?.0 - weighted_trace(&l0, &op)?.0;
            worst = worst.max((v.value - oracle).norm());
            table.push(format!("{i} | {:.12e} | {:.12e}", v.value, oracle));
        }
        let tc = sum(&[ClassicalSymbol::abs_xi_power(-2), abs_term(-3, e(1).add(&one()))]);
        let v = interpolation_difference(&fam, std::slice::from_ref(&tc), 8, CoefficientConvention::Exact)?;
        let op = q(&tc);
        let oracle = weighted_trace(&l1, &op)?.0 - weighted_trace(&l0, &op)?.0;
        table.push(format!("trace class | {:.3e} | {:.3e}", v.value, oracle));
        let exact_zero = v.value == Complex64::new(0.0, 0.0) && oracle == Complex64::new(0.0, 0.0);
        let metric = if exact_zero { worst } else { f64::INFINITY };
        let mut o = Outcome::new(
            metric,
            format!(
                "3 fixtures, 8/16-node Gauss-Legendre; trace-class fixture {}",
                if exact_zero { "exactly 0 on both sides" } else { "NOT exactly 0" }
            ),
        );
        o.side_table = table;
        Ok(o)
    })
}

pub fn d3_cyclicity(tol_scale: f64) -> CriterionResult {
    run("D-3", "cyclicity of χ_1", 1e-7 * tol_scale, || {
        let w = Weight::laplacian();
        let pairs = [
            (mult(e(1)), abs_term(1, e(-1))),
            (sum(&[xi_term(1, e(1)), ClassicalSymbol::abs_xi_power(1)]), xi_term(2, e(-1))),
            (sum(&[abs_term(-1, e(2)), mult(one())]), sum(&[xi_term(2, e(-2)), xi_term(1, e(-1))])),
        ];
        let mut worst = 0.0f64;
        let mut table = vec!["pair | χ1(A,B) | χ1(B,A) | error estimate".to_string()];
        for (i, (a, b)) in pairs.iter().enumerate() {
            let (oa, ob) = (Operand::new(a.clone()), Operand::new(b.clone()));
            let ab = weighted_cochain(&w, &[oa.clone(), ob.clone()], &OracleTrace, CoefficientConvention::Exact)?;
            let ba = weighted_cochain(&w, &[ob, oa], &OracleTrace, CoefficientConvention::Exact)?;
            worst = worst.max((ab.value - ba.value).norm());
            table.push(format!("{i} | {:.12e} | {:.12e} | {:.1e}", ab.value, ba.value, ab.err + ba.err));
        }
        let mut o = Outcome::new(worst, "3 pairs, Q = 1-Δ");
        o.side_table = table;
        Ok(o)
    })
}

// ---------------------------------------------------------------- suites

pub type CriterionFn = fn(f64) -> CriterionResult;

pub const CRITERIA: &[(&str, CriterionFn)] = &[
    ("A-1", a1_residue_trace_law),
    ("A-2", a2_pole_law),
    ("A-3", a3_weighted_trace_anchors),
    ("B-1", b1_duhamel),
    ("B-2", b2_b_jlo),
    ("B-3", b3_jlo_cyclicity),
    ("B-4", b4_hochschild_nilpotent),
    ("B-5", b5_simplex_constants),
    ("B-6", b6_basic_formula),
    ("C-1", c1_coboundary_p0),
    ("C-2", c2_coboundary_p1),
    ("C-3", c3_cocycle_vanishing),
    ("C-4", c4_cutoff),
    ("D-1", d1_family_derivative),
    ("D-2", d2_interpolation),
    ("D-3", d3_cyclicity),
];

pub const SUITES: &[(&str, &[&str])] = &[
    ("exact-residue", &["A-1", "A-2"]),
    ("weighted-trace", &["A-3"]),
    ("jlo", &["B-1", "B-2", "B-3", "B-4"]),
    ("constants", &["B-5", "B-6"]),
    ("anomalies", &["C-1", "C-2", "C-3", "C-4"]),
    ("families", &["D-1", "D-2", "D-3"]),
    (
        "paper-core",
        &["A-1", "A-2", "A-3", "B-1", "B-2", "B-3", "B-4", "B-5", "B-6", "C-1", "C-2", "C-3", "C-4", "D-1", "D-2", "D-3"],
    ),
];

pub fn criterion(id: &str) -> Option<CriterionFn> {
    CRITERIA.iter().find(|(i, _)| *i == id).map(|(_, f)| *f)
}

pub fn suite(name: &str) -> Option<&'static [&'static str]> {
    SUITES.iter().find(|(n, _)| *n == name).map(|(_, ids)| *ids)
}

/// Runs a suite with criteria in parallel; results keep the suite order.
pub fn run_suite(name: &str, tol_scale: f64) -> Option<Vec<CriterionResult>> {
    use rayon::prelude::*;
    let ids = suite(name)?;
    Some(
        ids.par_iter()
            .map(|id| criterion(id).expect("suite lists known criteria")(tol_scale))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_reference_known_criteria() {
        for (_, ids) in SUITES {
            for id in *ids {
                assert!(criterion(id).is_some(), "{id}");
            }
        }
        assert_eq!(suite("paper-core").unwrap().len(), CRITERIA.len());
        assert!(suite("exact-residu").is_none());
    }

    #[test]
    fn fast_criteria_pass() {
        for f in [a3_weighted_trace_anchors, b5_simplex_constants, b4_hochschild_nilpotent] {
            let r = f(1.0);
            assert!(r.pass, "{}", r.line());
        }
    }
}
