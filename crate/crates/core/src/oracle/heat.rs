//! Heat traces and JLO cochains `χ̃_n(t)` for diagonal weights.

use num_complex::Complex64;
use rayon::prelude::*;

use super::operator::{Band, SpectralOperator};
use super::OracleError;
use crate::symbol::EigenvalueLaw;

/// A float value with an engineered error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatValue {
    pub value: Complex64,
    pub err: f64,
}

/// `tr(C e^{-tQ})`, summing outward from `n = 0` until the Gaussian-type decay of
/// `e^{-tλ(n)}` dominates any polynomial growth of the diagonal.
pub fn heat_trace(law: &EigenvalueLaw, c: &SpectralOperator, t: f64) -> Result<HeatValue, OracleError> {
    if t <= 0.0 {
        return Err(OracleError::NonPositiveTime);
    }
    let term = |n: i64| -> Result<Complex64, OracleError> {
        let d = c.entry(n, n)?.trace().to_c64();
        Ok(d * (-t * law.eval(n)).exp())
    };
    let mut acc = term(0)?;
    let mut small_run = 0;
    let mut n = 1i64;
    let last = loop {
        let v = term(n)? + term(-n)?;
        acc += v;
        let last = v.norm();
        let decayed = t * law.eval(n) > 40.0 && n > c.crossover() + c.bandwidth();
        if decayed && last <= 1e-20 * (1.0 + acc.norm()) {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 8 {
            break last;
        }
        n += 1;
    };
    let err = 2.0 * last + 8.0 * f64::EPSILON * (n as f64) * (1.0 + acc.norm());
    Ok(HeatValue { value: acc, err })
}

/// `∫_{Δ_n} e^{-t Σ u_j λ_j} du`, the divided difference of `exp` at the nodes
/// `−tλ_j`, read off as the corner entry of `exp` of the lower-bidiagonal node
/// matrix. Repeated nodes need no special handling.
pub fn simplex_heat_kernel(nodes: &[f64], t: f64) -> f64 {
    let n = nodes.len();
    if n == 0 {
        return 0.0;
    }
    if n == 1 {
        return (-t * nodes[0]).exp();
    }
    let x: Vec<f64> = nodes.iter().map(|l| -t * l).collect();
    let shift = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = x[i] - shift;
        if i > 0 {
            m[i * n + i - 1] = 1.0;
        }
    }
    let norm = (0..n)
        .map(|i| (0..n).map(|j| m[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = 0.5f64.powi(squarings as i32);
    for v in m.iter_mut() {
        *v *= scale;
    }
    let mul = |a: &[f64], b: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..=i {
                let aik = a[i * n + k];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..=k {
                    out[i * n + j] += aik * b[k * n + j];
                }
            }
        }
        out
    };
    let mut e = vec![0.0; n * n];
    for i in 0..n {
        e[i * n + i] = 1.0;
    }
    let mut power = e.clone();
    for k in 1..=30 {
        power = mul(&power, &m);
        let inv = 1.0 / (1..=k).map(f64::from).product::<f64>();
        let mut biggest = 0.0f64;
        for (ei, pi) in e.iter_mut().zip(&power) {
            *ei += pi * inv;
            biggest = biggest.max((pi * inv).abs());
        }
        if biggest < 1e-300 {
            break;
        }
    }
    for _ in 0..squarings {
        e = mul(&e, &e);
    }
    e[(n - 1) * n] * shift.exp()
}

fn jlo_at(law: &EigenvalueLaw, ops: &[SpectralOperator], t: f64, radius: i64) -> Result<Complex64, OracleError> {
    let bands: Vec<Band> = ops.iter().map(|a| a.band(radius)).collect::<Result<_, _>>()?;
    let r = ops[0].rank();
    let lambda: Vec<f64> = (-radius..=radius).map(|n| law.eval(n)).collect();
    let lam = |n: i64| lambda[(n + radius) as usize];
    let n_ops = ops.len();
    let starts: Vec<i64> = (-radius..=radius).collect();
    let partial: Vec<Complex64> = starts
        .par_iter()
        .map(|&i0| {
            // depth-first over index paths i0 → i1 → … → i_n → i0 carrying the
            // running r×r block product
            let mut acc = Complex64::new(0.0, 0.0);
            let mut path = vec![i0];
            let mut prods: Vec<Vec<Complex64>> = vec![identity_block(r)];
            walk(&bands, n_ops, r, &mut path, &mut prods, &mut |path, block| {
                let tr: Complex64 = (0..r).map(|i| block[i * r + i]).sum();
                if tr == Complex64::new(0.0, 0.0) {
                    return;
                }
                // A_j sits between e^{-u_{j-1}tQ} and e^{-u_j tQ}; the exponential after A_j acts on i_{j+1}
                let nodes: Vec<f64> = (1..=n_ops).map(|j| lam(path[j % n_ops])).collect();
                acc += tr * simplex_heat_kernel(&nodes, t);
            });
            acc
        })
        .collect();
    Ok(partial.into_iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b))
}

fn identity_block(r: usize) -> Vec<Complex64> {
    let mut b = vec![Complex64::new(0.0, 0.0); r * r];
    for i in 0..r {
        b[i * r + i] = Complex64::new(1.0, 0.0);
    }
    b
}

fn block_mul(a: &[Complex64], b: &[Complex64], r: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); r * r];
    for i in 0..r {
        for k in 0..r {
            let x = a[i * r + k];
            for j in 0..r {
                out[i * r + j] += x * b[k * r + j];
            }
        }
    }
    out
}

fn walk<F: FnMut(&[i64], &[Complex64])>(
    bands: &[Band],
    n_ops: usize,
    r: usize,
    path: &mut Vec<i64>,
    prods: &mut Vec<Vec<Complex64>>,
    visit: &mut F,
) {
    let j = path.len() - 1;
    let cur = path[j];
    let b = &bands[j];
    if j + 1 == n_ops {
        let blk = b.block(cur, path[0]);
        if blk.is_empty() {
            return;
        }
        let p = block_mul(&prods[j], blk, r);
        visit(path, &p);
        return;
    }
    for next in (cur - b.bandwidth)..=(cur + b.bandwidth) {
        let blk = b.block(cur, next);
        if blk.is_empty() || blk.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
            continue;
        }
        let p = block_mul(&prods[j], blk, r);
        path.push(next);
        prods.push(p);
        walk(bands, n_ops, r, path, prods, visit);
        path.pop();
        prods.pop();
    }
}

/// JLO value `χ̃_n(t)(A₀,…,A_n)` on the Fourier band `|i| ≤ 2·radius`, with the
/// change from radius `radius` as the truncation estimate.
pub fn jlo_value(law: &EigenvalueLaw, ops: &[SpectralOperator], t: f64, radius: i64) -> Result<HeatValue, OracleError> {
    if t <= 0.0 {
        return Err(OracleError::NonPositiveTime);
    }
    if ops.is_empty() {
        return Ok(HeatValue {
            value: Complex64::new(0.0, 0.0),
            err: 0.0,
        });
    }
    if ops.iter().any(|a| a.rank() != ops[0].rank()) {
        return Err(OracleError::RankMismatch);
    }
    let bandwidth: i64 = ops.iter().map(|a| a.bandwidth()).sum();
    if bandwidth >= radius {
        return Err(OracleError::RadiusTooSmall { radius, bandwidth });
    }
    let inner = jlo_at(law, ops, t, radius)?;
    let outer = jlo_at(law, ops, t, 2 * radius)?;
    let err = (outer - inner).norm() + 16.0 * f64::EPSILON * (1.0 + outer.norm());
    Ok(HeatValue { value: outer, err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{CRational, FourierPoly};
    use crate::symbol::ClassicalSymbol;
    use proptest::prelude::*;

    /// Divided-difference recursion for distinct nodes.
    fn kernel_recursive(nodes: &[f64], t: f64) -> f64 {
        if nodes.len() == 1 {
            return (-t * nodes[0]).exp();
        }
        let n = nodes.len();
        let a = kernel_recursive(&nodes[..n - 1], t);
        let b = kernel_recursive(&nodes[1..], t);
        (a - b) / (t * (nodes[n - 1] - nodes[0]))
    }

    fn law() -> EigenvalueLaw {
        EigenvalueLaw::laplacian()
    }

    #[test]
    fn heat_trace_of_identity() {
        let v = heat_trace(&law(), &SpectralOperator::identity(1), 1.0).unwrap();
        let direct: f64 = (-200i32..=200).map(|n| (-(1.0 + f64::from(n * n))).exp()).sum();
        assert!((v.value.re - direct).abs() < 1e-15);
        assert!((v.value.re - 0.652_116_784_311_336).abs() < 1e-14);
        let d = SpectralOperator::finite_diagonal(&[(0, CRational::from_int(1))]);
        assert!((heat_trace(&law(), &d, 1.0).unwrap().value.re - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn heat_trace_decreases_in_t() {
        let id = SpectralOperator::identity(1);
        let a = heat_trace(&law(), &id, 0.5).unwrap().value.re;
        let b = heat_trace(&law(), &id, 0.6).unwrap().value.re;
        assert!(a > b);
    }

    #[test]
    fn kernel_examples() {
        assert!((simplex_heat_kernel(&[3.0, 3.0], 0.7) - (-2.1f64).exp()).abs() < 1e-15);
        let closed = (-1.0f64).exp() - (-2.0f64).exp();
        assert!((simplex_heat_kernel(&[1.0, 2.0], 1.0) - closed).abs() < 1e-15);
        assert!((simplex_heat_kernel(&[0.0, 0.0, 0.0], 1.0) - 0.5).abs() < 1e-15);
        // confluent limit: d/dλ of e^{-tλ} divided by −t
        let (l, t) = (2.0, 0.8);
        assert!((simplex_heat_kernel(&[l, l, l], t) - 0.5 * (-t * l).exp()).abs() < 1e-15);
    }

    #[test]
    fn kernel_with_wide_spread() {
        let nodes = [1.0, 577.0, 26.0, 2305.0];
        let t = 0.7;
        let k = simplex_heat_kernel(&nodes, t);
        let r = kernel_recursive(&nodes, t);
        assert!((k - r).abs() <= 1e-12 * r.abs(), "{k} vs {r}");
    }

    proptest! {
        #[test]
        fn kernel_matches_recursion_and_is_symmetric(
            nodes in proptest::collection::vec(0.0f64..40.0, 2..5),
            t in 0.05f64..1.5,
        ) {
            let mut sorted = nodes.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            prop_assume!(sorted.windows(2).all(|w| w[1] - w[0] > 0.5));
            let k = simplex_heat_kernel(&nodes, t);
            let r = kernel_recursive(&sorted, t);
            prop_assert!((k - r).abs() <= 1e-10 * r.abs() + 1e-300);
            let mut rev = nodes.clone();
            rev.reverse();
            prop_assert!((simplex_heat_kernel(&rev, t) - k).abs() <= 1e-13 * k.abs());
        }

        #[test]
        fn kernel_is_continuous_at_collisions(l in 0.0f64..20.0, t in 0.1f64..1.0, h in 1e-7f64..1e-5) {
            let a = simplex_heat_kernel(&[l, l], t);
            let b = simplex_heat_kernel(&[l, l + h], t);
            prop_assert!((a - b).abs() <= 2.0 * t * h * a + 1e-14);
        }
    }

    #[test]
    fn jlo_collapses() {
        let id = SpectralOperator::identity(1);
        let t = 0.7;
        let ht = heat_trace(&law(), &id, t).unwrap().value.re;
        let j0 = jlo_value(&law(), &[id.clone()], t, 16).unwrap();
        assert!((j0.value.re - ht).abs() < 1e-14);
        let j2 = jlo_value(&law(), &[id.clone(), id.clone(), id.clone()], t, 16).unwrap();
        assert!((j2.value.re - 0.5 * ht).abs() < 1e-14);
        let a = SpectralOperator::quantize(&ClassicalSymbol::abs_xi_power(1));
        let b = SpectralOperator::quantize(&ClassicalSymbol::xi_power(2));
        let j1 = jlo_value(&law(), &[a, b], t, 16).unwrap();
        let direct: f64 = (-32i64..=32)
            .map(|n| (n.abs() * n * n) as f64 * (-t * (1.0 + (n * n) as f64)).exp())
            .sum();
        assert!((j1.value.re - direct).abs() < 1e-12);
    }

    #[test]
    fn radius_too_small() {
        let s = SpectralOperator::quantize(&ClassicalSymbol::multiplier(FourierPoly::monomial(3, CRational::from_int(1))));
        assert!(matches!(
            jlo_value(&law(), &[s.clone(), s], 1.0, 5),
            Err(OracleError::RadiusTooSmall { .. })
        ));
    }
}
