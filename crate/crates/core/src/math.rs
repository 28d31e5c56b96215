//! Log-space combinatorics shared by the cardinality, distribution and
//! posterior code.

use statrs::function::gamma::ln_gamma;

/// `ln(x!)` for a non-negative count.
#[inline]
pub fn ln_factorial(x: u64) -> f64 {
    // exact table for the small arguments that dominate toggle updates
    const SMALL: usize = 32;
    static TABLE: std::sync::OnceLock<[f64; SMALL]> = std::sync::OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = [0.0; SMALL];
        for i in 1..SMALL {
            t[i] = t[i - 1] + (i as f64).ln();
        }
        t
    });
    if (x as usize) < SMALL {
        table[x as usize]
    } else {
        ln_gamma(x as f64 + 1.0)
    }
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `C(n, 2)` as an integer.
#[inline]
pub fn pairs(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// `ln Γ(x + d) - ln Γ(x)` for integer `d`, by rising products when `|d|` is
/// small and log-gamma otherwise.
pub fn ln_gamma_shift(x: f64, d: i64) -> f64 {
    match d {
        0 => 0.0,
        1..=4 => (0..d).map(|i| (x + i as f64).ln()).sum(),
        -4..=-1 => -(1..=-d).map(|i| (x - i as f64).ln()).sum::<f64>(),
        _ => ln_gamma(x + d as f64) - ln_gamma(x),
    }
}

/// `ln((2m)! / (2^m m!))`, the log number of perfect matchings on `2m` stubs.
pub fn ln_stub_matchings(m: u64) -> f64 {
    ln_factorial(2 * m) - m as f64 * std::f64::consts::LN_2 - ln_factorial(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials_agree_across_the_table_boundary() {
        for x in 0..80u64 {
            let direct: f64 = (1..=x).map(|i| (i as f64).ln()).sum();
            assert!((ln_factorial(x) - direct).abs() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn choose_small_values() {
        assert!((ln_choose(6, 3).exp() - 20.0).abs() < 1e-9);
        assert_eq!(ln_choose(3, 4), f64::NEG_INFINITY);
        assert_eq!(pairs(4), 6);
        assert_eq!(pairs(1), 0);
    }

    #[test]
    fn gamma_shift_matches_log_gamma() {
        for &x in &[0.5, 1.0, 2.5, 17.0] {
            for d in -4..=6i64 {
                if x + (d as f64) <= 0.0 {
                    continue;
                }
                let want = ln_gamma(x + d as f64) - ln_gamma(x);
                assert!((ln_gamma_shift(x, d) - want).abs() < 1e-10, "x={x} d={d}");
            }
        }
    }

    #[test]
    fn stub_matchings_is_double_factorial() {
        // (2m-1)!! for m = 1..4: 1, 3, 15, 105
        for (m, want) in [(1u64, 1.0), (2, 3.0), (3, 15.0), (4, 105.0)] {
            assert!((ln_stub_matchings(m).exp() - want).abs() < 1e-9);
        }
    }
}
