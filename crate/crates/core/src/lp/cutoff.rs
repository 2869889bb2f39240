//! The dyadic cutoff `eta` and the blocks `phi_N` built from it.

/// `6t^5 - 15t^4 + 10t^3`, clamped to `[0, 1]`.
fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

/// Plateau bump: `1` on `|xi| <= 1`, `0` on `|xi| >= 2`, `C^2` in between.
pub fn eta(xi: f64) -> f64 {
    let a = xi.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        1.0 - smoothstep(a - 1.0)
    }
}

/// `phi(xi) = eta(xi) - eta(2 xi)`, supported in `1/2 <= |xi| <= 2`.
pub fn phi(xi: f64) -> f64 {
    eta(xi) - eta(2.0 * xi)
}

/// `phi_N(xi) = phi(xi / N)`.
pub fn phi_n(xi: f64, n: f64) -> f64 {
    phi(xi / n)
}

/// Symbol of `P~_N = P_{N/2} + P_N + P_{2N}`.
pub fn phi_wide(xi: f64, n: f64) -> f64 {
    eta(xi / (2.0 * n)) - eta(4.0 * xi / n)
}

/// Symbol of `P_{<<N}`, the sum of blocks `K <= N/8`.
pub fn low_symbol(xi: f64, n: f64) -> f64 {
    eta(8.0 * xi / n)
}

/// Symbol of `P_{>~N} = 1 - P_{<<N}`.
pub fn high_symbol(xi: f64, n: f64) -> f64 {
    1.0 - low_symbol(xi, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape() {
        assert_eq!(eta(0.5), 1.0);
        assert_eq!(eta(-1.0), 1.0);
        assert_eq!(eta(2.5), 0.0);
        assert!((eta(1.5) - 0.5).abs() < 1e-15);
        for i in 0..=400 {
            let x = -3.0 + 0.015 * i as f64;
            let e = eta(x);
            assert!((0.0..=1.0).contains(&e));
            assert!(phi(x) >= 0.0);
        }
        assert_eq!(phi(0.4), 0.0);
        assert_eq!(phi(2.1), 0.0);
    }

    #[test]
    fn wide_block_is_three_blocks() {
        for i in 1..200 {
            let x = 0.07 * i as f64;
            let n = 2.0;
            let s = phi_n(x, n / 2.0) + phi_n(x, n) + phi_n(x, 2.0 * n);
            assert!((s - phi_wide(x, n)).abs() < 1e-14);
        }
    }

    #[test]
    fn eta_is_c2_at_the_joins() {
        let h = 1e-4;
        for &x0 in &[1.0, 2.0] {
            let d2 = |x: f64| (eta(x + h) - 2.0 * eta(x) + eta(x - h)) / (h * h);
            assert!((d2(x0 + 2.0 * h) - d2(x0 - 2.0 * h)).abs() < 5e-2);
        }
    }
}
