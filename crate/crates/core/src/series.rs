//! Truncated power series in the coupling. `c[i]` is the coefficient of λⁱ.

/// Horner evaluation.
pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn at(c: &[f64], i: usize) -> f64 {
    c.get(i).copied().unwrap_or(0.0)
}

/// Product truncated after λ^order.
pub fn mul(a: &[f64], b: &[f64], order: usize) -> Vec<f64> {
    (0..=order)
        .map(|n| (0..=n).map(|i| at(a, i) * at(b, n - i)).sum())
        .collect()
}

/// Quotient a/b truncated after λ^order. Requires b[0] ≠ 0.
pub fn div(a: &[f64], b: &[f64], order: usize) -> Option<Vec<f64>> {
    let b0 = at(b, 0);
    if b0 == 0.0 {
        return None;
    }
    let mut q = vec![0.0; order + 1];
    for n in 0..=order {
        let acc: f64 = (0..n).map(|i| q[i] * at(b, n - i)).sum();
        q[n] = (at(a, n) - acc) / b0;
    }
    Some(q)
}

/// Principal square root truncated after λ^order. Requires a[0] > 0.
pub fn sqrt(a: &[f64], order: usize) -> Option<Vec<f64>> {
    let a0 = at(a, 0);
    if !(a0 > 0.0) {
        return None;
    }
    // s² = a, solved order by order
    let mut s = vec![0.0; order + 1];
    s[0] = a0.sqrt();
    for n in 1..=order {
        let cross: f64 = (1..n).map(|i| s[i] * s[n - i]).sum();
        s[n] = (at(a, n) - cross) / (2.0 * s[0]);
    }
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series() {
        let q = div(&[1.0], &[1.0, -1.0], 6).unwrap();
        assert_eq!(q, vec![1.0; 7]);
    }

    #[test]
    fn sqrt_of_square() {
        let a = [2.0, -1.0, 0.5];
        let sq = mul(&a, &a, 8);
        let root = sqrt(&sq, 8).unwrap();
        for (i, r) in root.iter().enumerate() {
            assert!((r - at(&a, i)).abs() < 1e-14, "{i}: {r}");
        }
    }

    #[test]
    fn binomial_sqrt() {
        // √(1 + x) = 1 + x/2 - x²/8 + x³/16 - 5x⁴/128
        let s = sqrt(&[1.0, 1.0], 4).unwrap();
        let expect = [1.0, 0.5, -0.125, 0.0625, -5.0 / 128.0];
        for (a, b) in s.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn horner() {
        assert_eq!(eval(&[1.0, 2.0, 3.0], 2.0), 17.0);
        assert_eq!(eval(&[], 2.0), 0.0);
    }
}
