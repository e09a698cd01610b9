//! Matrix-level checks: the Duhamel formula, the coboundary identities of JLO
//! cochains and the small-time expansion of `χ̃_n(t)`.

use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::heat::{heat_trace, jlo_value};
use super::operator::SpectralOperator;
use super::OracleError;
use crate::algebra::quadrature::gauss_legendre;
use crate::anomaly::{hochschild_b, simplex_constant, CochainValue, CoefficientConvention, MultiIndex};
use crate::symbol::EigenvalueLaw;

/// `‖[A, e^{−uQ}] + u∫₀¹ e^{−u(1−s)Q}[A,Q]e^{−usQ} ds‖_F` over `|m|, |n| ≤ radius`,
/// the integral by Gauss–Legendre on panels doubled until stable.
pub fn duhamel_check(law: &EigenvalueLaw, a: &SpectralOperator, u: f64, radius: i64, nodes: usize) -> Result<f64, OracleError> {
    if u <= 0.0 {
        return Err(OracleError::NonPositiveTime);
    }
    let band = a.band(radius)?;
    let integral = |lm: f64, ln: f64| -> f64 {
        let f = |s: f64| (-u * (1.0 - s) * lm - u * s * ln).exp();
        let panel_sum = |panels: usize| -> f64 {
            let h = 1.0 / panels as f64;
            (0..panels)
                .map(|p| {
                    gauss_legendre(nodes, p as f64 * h, (p + 1) as f64 * h)
                        .iter()
                        .map(|(x, w)| w * f(*x))
                        .sum::<f64>()
                })
                .sum()
        };
        let mut panels = 1;
        let mut prev = panel_sum(panels);
        loop {
            panels *= 2;
            let next = panel_sum(panels);
            if (next - prev).abs() <= 1e-16 * next.abs() || panels >= 64 {
                return next;
            }
            prev = next;
        }
    };
    let mut sq = 0.0;
    for n in -radius..=radius {
        for m in (n - band.bandwidth)..=(n + band.bandwidth) {
            let blk = band.block(m, n);
            if blk.is_empty() {
                continue;
            }
            let (lm, ln) = (law.eval(m), law.eval(n));
            let comm = (-u * ln).exp() - (-u * lm).exp();
            let duhamel = u * (ln - lm) * integral(lm, ln);
            for v in blk {
                sq += (v * (comm + duhamel)).norm_sqr();
            }
        }
    }
    Ok(sq.sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BJloReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub err: f64,
    /// `|lhs − rhs|` relative to the summed magnitudes of all cochain values involved.
    pub deviation: f64,
}

fn jlo(law: &EigenvalueLaw, ops: &[SpectralOperator], t: f64, radius: i64) -> Result<CochainValue, OracleError> {
    let v = jlo_value(law, ops, t, radius)?;
    Ok(CochainValue {
        value: v.value,
        err: v.err,
        exact_part: None,
    })
}

/// Both sides of the coboundary identity for `χ̃_n(t)` with `n = ops.len() − 2`:
///
/// - `n = 2p`: `bχ̃_{2p}(t) = t Σ_{j≤p} χ̃_{2p+1}(t)(…, [Q, A_{2j+1}], …)`;
/// - `n = 2k+1`: `bχ̃_{2k+1}(t) = t Σ_{j≤k} χ̃_{2k+2}(t)(…, [Q, A_{2j+1}], …) + χ̃_{2k+1}(t)(A_{2k+2}A₀, A₁, …, A_{2k+1})`.
pub fn b_jlo_check(law: &EigenvalueLaw, ops: &[SpectralOperator], t: f64, radius: i64) -> Result<BJloReport, OracleError> {
    if ops.len() < 2 {
        return Err(OracleError::RankMismatch);
    }
    let n = ops.len() - 2;
    // magnitude of the individual cochain values, so that the deviation stays
    // meaningful when both sides cancel to zero
    let scale = std::cell::Cell::new(0.0f64);
    let chi = |a: &[SpectralOperator]| {
        let v = jlo(law, a, t, radius)?;
        scale.set(scale.get() + v.value.norm());
        Ok(v)
    };
    let mul = |a: &SpectralOperator, b: &SpectralOperator| a.mul(b);
    let lhs = hochschild_b(&chi, ops, &mul)?;
    let q = SpectralOperator::weight_power(law, ops[0].rank(), 1);
    let mut rhs = Complex64::new(0.0, 0.0);
    let mut err = lhs.err;
    for j in 0..=(n / 2) {
        let mut a = ops.to_vec();
        a[2 * j + 1] = q.commutator(&ops[2 * j + 1])?;
        let v = jlo_value(law, &a, t, radius)?;
        rhs += v.value * t;
        err += v.err * t;
        scale.set(scale.get() + v.value.norm() * t);
    }
    if n % 2 == 1 {
        let mut a = vec![ops[n + 1].mul(&ops[0])?];
        a.extend_from_slice(&ops[1..=n]);
        let v = jlo_value(law, &a, t, radius)?;
        rhs += v.value;
        err += v.err;
        scale.set(scale.get() + v.value.norm());
    }
    let scale = scale.get();
    let deviation = if scale > 0.0 { (lhs.value - rhs).norm() / scale } else { 0.0 };
    Ok(BJloReport {
        lhs: lhs.value,
        rhs,
        err,
        deviation,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionRow {
    pub t: f64,
    pub jlo: Complex64,
    pub expansion: Complex64,
    pub residual: f64,
    pub heat_trace_identity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasicFormulaReport {
    pub convention: CoefficientConvention,
    pub depth: u32,
    pub rows: Vec<ExpansionRow>,
    /// Least-squares slope of `log residual` against `log t`; `None` with fewer
    /// than two positive residuals.
    pub slope: Option<f64>,
}

/// Compares `χ̃_n(t)(A₀,…,A_n)` with
/// `Σ_{|k|≤K} (−t)^{|k|} D(k) tr(A₀A₁^{(k₁)}⋯A_n^{(k_n)} e^{−tQ})` on a grid of `t`.
pub fn basicformula_check(
    law: &EigenvalueLaw,
    ops: &[SpectralOperator],
    t_grid: &[f64],
    depth: u32,
    conv: CoefficientConvention,
    radius: i64,
) -> Result<BasicFormulaReport, OracleError> {
    if ops.is_empty() {
        return Err(OracleError::RankMismatch);
    }
    let slots = ops.len() - 1;
    // ad_Q^j(A_i) for j ≤ K
    let mut ads: Vec<Vec<SpectralOperator>> = Vec::with_capacity(slots);
    for a in &ops[1..] {
        let mut v = vec![a.clone()];
        for j in 1..=depth as usize {
            v.push(v[j - 1].ad_power(law, 1)?);
        }
        ads.push(v);
    }
    let mut products: Vec<(MultiIndex, f64, SpectralOperator)> = Vec::new();
    for total in 0..=depth {
        for k in MultiIndex::with_total(slots, total) {
            let d = simplex_constant(&k).coefficient(conv).to_f64().expect("finite");
            let mut p = ops[0].clone();
            for (i, ki) in k.0.iter().enumerate() {
                p = p.mul(&ads[i][*ki as usize])?;
            }
            products.push((k, d, p));
        }
    }
    let id = SpectralOperator::identity(ops[0].rank());
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let j = jlo_value(law, ops, t, radius)?;
        let mut e = Complex64::new(0.0, 0.0);
        for (k, d, p) in &products {
            let h = heat_trace(law, p, t)?;
            e += h.value * d * (-t).powi(k.total() as i32);
        }
        rows.push(ExpansionRow {
            t,
            jlo: j.value,
            expansion: e,
            residual: (j.value - e).norm(),
            heat_trace_identity: heat_trace(law, &id, t)?.value.re,
        });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.residual > 0.0)
        .map(|r| (r.t.ln(), r.residual.ln()))
        .collect();
    let slope = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    } else {
        None
    };
    Ok(BasicFormulaReport {
        convention: conv,
        depth,
        rows,
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{CRational, FourierPoly};
    use crate::symbol::ClassicalSymbol;

    fn law() -> EigenvalueLaw {
        EigenvalueLaw::laplacian()
    }

    fn shift(m: i64) -> SpectralOperator {
        SpectralOperator::quantize(&ClassicalSymbol::multiplier(FourierPoly::monomial(m, CRational::from_int(1))))
    }

    #[test]
    fn duhamel_examples() {
        let id = SpectralOperator::identity(1);
        assert_eq!(duhamel_check(&law(), &id, 1.0, 16, 64).unwrap(), 0.0);
        let diag = SpectralOperator::quantize(&ClassicalSymbol::abs_xi_power(1));
        assert_eq!(duhamel_check(&law(), &diag, 1.0, 16, 64).unwrap(), 0.0);
        for u in [0.3, 1.0] {
            assert!(duhamel_check(&law(), &shift(1), u, 32, 64).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn b_jlo_trivial_cases() {
        let a = shift(1);
        let id = SpectralOperator::identity(1);
        let r = b_jlo_check(&law(), &[a.clone(), id], 0.7, 12).unwrap();
        assert!(r.lhs.norm() < 1e-14 && r.rhs.norm() < 1e-14);
        let d1 = SpectralOperator::quantize(&ClassicalSymbol::abs_xi_power(1));
        let d2 = SpectralOperator::quantize(&ClassicalSymbol::xi_power(2));
        let r = b_jlo_check(&law(), &[d1, d2], 0.7, 12).unwrap();
        assert!(r.lhs.norm() < 1e-13 && r.rhs.norm() < 1e-13);
    }

    #[test]
    fn b_jlo_shift_pair() {
        let r = b_jlo_check(&law(), &[shift(1), shift(-1)], 0.7, 12).unwrap();
        assert!(r.deviation <= 1e-8, "{r:?}");
    }

    #[test]
    fn basic_formula_trivial_cases() {
        let id = SpectralOperator::identity(1);
        let t = [0.4, 0.2];
        let r = basicformula_check(&law(), &[shift(1)], &t, 2, CoefficientConvention::Exact, 16).unwrap();
        for row in &r.rows {
            assert!(row.residual <= 1e-15 * (1.0 + row.jlo.norm()));
        }
        let ids = [id.clone(), id.clone(), id];
        let ex = basicformula_check(&law(), &ids, &t, 0, CoefficientConvention::Exact, 16).unwrap();
        let pa = basicformula_check(&law(), &ids, &t, 0, CoefficientConvention::Paper, 16).unwrap();
        for (e, p) in ex.rows.iter().zip(&pa.rows) {
            assert!(e.residual <= 1e-12 * e.heat_trace_identity);
            assert!((p.residual - 0.5 * p.heat_trace_identity).abs() <= 1e-12 * p.heat_trace_identity);
        }
    }
}
