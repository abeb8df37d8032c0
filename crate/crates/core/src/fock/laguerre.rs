/// Associated Laguerre polynomial `L_n^k(x)`, by upward recurrence in `n`.
///
/// Panics if `k < -n`.
pub fn laguerre_assoc(n: usize, k: i64, x: f64) -> f64 {
    assert!(
        k >= -(n as i64),
        "laguerre_assoc: need k >= -n (n = {n}, k = {k})"
    );
    laguerre_sequence(n, k, x)[n]
}

/// `[L_0^k(x), L_1^k(x), ..., L_n_max^k(x)]` from the three-term recurrence
///
/// `(m + 1) L_{m+1} = (2m + 1 + k - x) L_m - (m + k) L_{m-1}`.
pub fn laguerre_sequence(n_max: usize, k: i64, x: f64) -> Vec<f64> {
    let k = k as f64;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max == 0 {
        return out;
    }
    out.push(1.0 + k - x);
    for m in 1..n_max {
        let mf = m as f64;
        let next = ((2.0 * mf + 1.0 + k - x) * out[m] - (mf + k) * out[m - 1]) / (mf + 1.0);
        out.push(next);
    }
    out
}
