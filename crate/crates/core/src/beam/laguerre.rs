//! Generalized Laguerre polynomials.

/// Generalized Laguerre polynomial `L_p^α(x)` by the ascending three-term
/// recurrence
///
/// `(k+1) L_{k+1} = (2k+1+α−x) L_k − (k+α) L_{k−1}`.
pub fn laguerre(p: u32, alpha: f64, x: f64) -> f64 {
    if p == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    for k in 1..p {
        let k = f64::from(k);
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_p^α(x)` together with `L_{p−1}^{α+1}(x) = −d/dx L_p^α(x)`.
/// The second value is zero for `p = 0`.
pub(crate) fn laguerre_with_derivative(p: u32, alpha: f64, x: f64) -> (f64, f64) {
    let value = laguerre(p, alpha, x);
    let lowered = if p == 0 {
        0.0
    } else {
        laguerre(p - 1, alpha + 1.0, x)
    };
    (value, lowered)
}

/// `ln(p! / (p+n)!)` for integer arguments.
pub(crate) fn ln_factorial_ratio(p: u32, n: u32) -> f64 {
    -(p + 1..=p + n).map(|j| f64::from(j).ln()).sum::<f64>()
}
