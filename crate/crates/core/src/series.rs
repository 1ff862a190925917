//! Sums of `L^{-p}` over integer ranges, including divergent partial sums
//! (`p <= 1`) and convergent tails (`p > 1`, upper end at infinity).
//!
//! Short ranges are summed directly. Long ranges use Euler–Maclaurin with
//! three Bernoulli corrections starting at `L >= 32`, where the remainder is
//! below double precision relative to the sum.

const DIRECT_BELOW: u64 = 32;
const DIRECT_RUN: u64 = 64;

fn integral(p: f64, lo: f64, hi: Option<f64>) -> f64 {
    match hi {
        None => lo.powf(1.0 - p) / (p - 1.0),
        Some(hi) => {
            let l = ((hi - lo) / lo).ln_1p();
            let e = 1.0 - p;
            if e.abs() < 1e-12 {
                l
            } else {
                lo.powf(e) * (e * l).exp_m1() / e
            }
        }
    }
}

// Odd derivatives f', f''', f^(5) of x^{-p}.
fn odd_derivatives(p: f64, x: f64) -> [f64; 3] {
    let f = x.powf(-p);
    let d1 = -p * f / x;
    let d3 = d1 * (p + 1.0) * (p + 2.0) / (x * x);
    let d5 = d3 * (p + 3.0) * (p + 4.0) / (x * x);
    [d1, d3, d5]
}

fn euler_maclaurin(p: f64, lo: u64, hi: Option<u64>) -> f64 {
    let a = lo as f64;
    let b = hi.map(|h| h as f64);
    let mut s = integral(p, a, b) + 0.5 * a.powf(-p);
    let da = odd_derivatives(p, a);
    let db = match b {
        Some(b) => {
            s += 0.5 * b.powf(-p);
            odd_derivatives(p, b)
        }
        None => [0.0; 3],
    };
    s += (db[0] - da[0]) / 12.0;
    s -= (db[1] - da[1]) / 720.0;
    s += (db[2] - da[2]) / 30240.0;
    s
}

/// `Σ_{L=lo}^{hi} L^{-p}` with `lo >= 1`; `hi = None` means infinity and
/// requires `p > 1`. Returns 0 for empty ranges.
pub fn power_sum(p: f64, lo: u64, hi: Option<u64>) -> f64 {
    assert!(lo >= 1, "power sums start at L = 1");
    if let Some(h) = hi {
        if h < lo {
            return 0.0;
        }
    } else {
        assert!(p > 1.0, "infinite power sum requires p > 1");
    }
    let mut total = 0.0;
    let mut l = lo;
    // Direct part: small L, or a short finite range.
    let direct_end = match hi {
        Some(h) if h - lo < DIRECT_RUN => h,
        _ => lo.max(DIRECT_BELOW).saturating_sub(1),
    };
    while l <= direct_end {
        total += (l as f64).powf(-p);
        l += 1;
    }
    match hi {
        Some(h) if l > h => total,
        Some(h) if h - l < DIRECT_RUN => {
            while l <= h {
                total += (l as f64).powf(-p);
                l += 1;
            }
            total
        }
        _ => total + euler_maclaurin(p, l, hi),
    }
}

/// Riemann zeta `ζ(q)` for `q > 1`.
pub fn zeta(q: f64) -> f64 {
    power_sum(q, 1, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(p: f64, lo: u64, hi: u64) -> f64 {
        // Smallest terms first for accuracy.
        (lo..=hi).rev().map(|l| (l as f64).powf(-p)).sum()
    }

    #[test]
    fn matches_brute_force_on_long_ranges() {
        for &p in &[0.2, 0.75, 0.8, 1.0, 1.2, 1.8, 2.5] {
            for &(lo, hi) in &[(1u64, 10u64), (1, 5000), (7, 100_000), (40, 41), (1000, 300_000)] {
                let a = power_sum(p, lo, Some(hi));
                let b = brute(p, lo, hi);
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "p={p} [{lo},{hi}] {a} vs {b}");
            }
        }
    }

    #[test]
    fn zeta_known_values() {
        assert!((zeta(2.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        assert!((zeta(4.0) - std::f64::consts::PI.powi(4) / 90.0).abs() < 1e-14);
        // ζ(1.2) = 5.591582441177750... (reference value)
        assert!((zeta(1.2) - 5.591_582_441_177_75).abs() < 1e-11);
    }

    #[test]
    fn tail_plus_head_is_total() {
        let q = 1.35;
        let head = power_sum(q, 1, Some(1 << 20));
        let tail = power_sum(q, (1 << 20) + 1, None);
        assert!((head + tail - zeta(q)).abs() < 1e-12);
    }

    #[test]
    fn empty_range_is_zero() {
        assert_eq!(power_sum(0.5, 10, Some(9)), 0.0);
    }
}
