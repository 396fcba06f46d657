//! Largest argument norm `θ_m` for which the degree-`m` Taylor polynomial
//! `T_m` satisfies `T_m(X) = exp(X + ΔX)` with `‖ΔX‖ <= tol ‖X‖`.
//!
//! With `h(x) = log(e^{-x} T_m(x)) = Σ_{k>m} c_k x^k`, the bound
//! `Σ |c_k| θ^{k-1} <= tol` defines `θ_m`.

/// Degrees considered when choosing a polynomial.
pub const MAX_TAYLOR_DEGREE: usize = 55;

/// `|c_k|` for `k = 0..len`, the backward-error series of degree `m`.
fn backward_error_series(m: usize, len: usize) -> Vec<f64> {
    // 1 - e^{-x} T_m(x) = q(x); q'(x) = e^{-x} x^m / m!
    let mut q = vec![0.0; len];
    let mut inv_fact_m = 1.0;
    for k in 1..=m {
        inv_fact_m /= k as f64;
    }
    let mut inv_fact_r = 1.0; // 1/r!
    for r in 0..len {
        let j = m + 1 + r;
        if j >= len {
            break;
        }
        if r > 0 {
            inv_fact_r /= r as f64;
        }
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        q[j] = sign * inv_fact_m * inv_fact_r / j as f64;
    }
    // log(1 - q) = -Σ_{p>=1} q^p / p
    let mut h = vec![0.0; len];
    let mut power = q.clone();
    let mut p = 1usize;
    while power.iter().any(|&c| c != 0.0) {
        for (hk, pk) in h.iter_mut().zip(&power) {
            *hk -= pk / p as f64;
        }
        p += 1;
        let mut next = vec![0.0; len];
        for (a, &pa) in power.iter().enumerate() {
            if pa == 0.0 {
                continue;
            }
            for (b, &qb) in q.iter().enumerate().take(len - a) {
                next[a + b] += pa * qb;
            }
        }
        power = next;
    }
    h.iter().map(|c| c.abs()).collect()
}

/// `θ_m` for the relative backward-error tolerance `tol`.
pub fn taylor_theta(m: usize, tol: f64) -> f64 {
    assert!(m >= 1, "degree must be positive");
    let len = 4 * (m + 1) + 60;
    let coeffs = backward_error_series(m, len);
    let logs: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0.0)
        .map(|(k, &c)| (k, c.ln()))
        .collect();
    let bound = |theta: f64| -> f64 {
        let lt = theta.ln();
        logs.iter()
            .map(|&(k, lc)| (lc + (k as f64 - 1.0) * lt).exp())
            .sum()
    };
    let (mut lo, mut hi) = (0.0f64, m as f64 + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bound(mid) <= tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `θ_1 .. θ_MAX` for one tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaTable {
    tol: f64,
    theta: Vec<f64>,
}

impl ThetaTable {
    pub fn new(tol: f64) -> Self {
        let theta = (1..=MAX_TAYLOR_DEGREE)
            .map(|m| taylor_theta(m, tol))
            .collect();
        ThetaTable { tol, theta }
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `θ_m`, `1 <= m <= MAX_TAYLOR_DEGREE`.
    pub fn get(&self, m: usize) -> f64 {
        self.theta[m - 1]
    }
}
