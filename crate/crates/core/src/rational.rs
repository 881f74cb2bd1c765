//! Recovering small-denominator fractions from floating-point LP optima.

use num_rational::Rational64;

/// Distance within which a float is accepted as equal to its reconstruction.
pub const RATIONAL_TOLERANCE: f64 = 1e-6;

/// Best rational approximation of `v` with denominator at most `max_den`,
/// returned only if it lies within [`RATIONAL_TOLERANCE`] of `v`.
///
/// Walks the continued-fraction convergents of `v`; when the next convergent
/// would exceed `max_den` the largest admissible semiconvergent is also
/// considered.
pub fn rationalize(v: f64, max_den: i64) -> Option<Rational64> {
    if !v.is_finite() || max_den < 1 || v.abs() > 1e15 {
        return None;
    }
    let negative = v < 0.0;
    let x = v.abs();

    // convergents h/k with recurrences h_n = a_n h_{n-1} + h_{n-2}
    let (mut h_prev, mut h) = (1i64, x.floor() as i64);
    let (mut k_prev, mut k) = (0i64, 1i64);
    let mut rem = x - x.floor();
    let mut best = (h, k);
    for _ in 0..64 {
        if (x - h as f64 / k as f64).abs() <= f64::EPSILON * x.max(1.0) || rem < 1e-15 {
            break;
        }
        let inv = 1.0 / rem;
        let a = inv.floor();
        rem = inv - a;
        let a = a as i64;
        let k_next = a.checked_mul(k).and_then(|t| t.checked_add(k_prev));
        let h_next = a.checked_mul(h).and_then(|t| t.checked_add(h_prev));
        match (h_next, k_next) {
            (Some(hn), Some(kn)) if kn <= max_den => {
                h_prev = h;
                k_prev = k;
                h = hn;
                k = kn;
                best = (h, k);
            }
            _ => {
                // largest semiconvergent (h_prev + t h)/(k_prev + t k) within bound
                let t = (max_den - k_prev) / k;
                if t > 0 {
                    let semi = (h_prev + t * h, k_prev + t * k);
                    let err = |(p, q): (i64, i64)| (x - p as f64 / q as f64).abs();
                    if err(semi) < err(best) {
                        best = semi;
                    }
                }
                break;
            }
        }
    }

    let (p, q) = best;
    if (x - p as f64 / q as f64).abs() > RATIONAL_TOLERANCE {
        return None;
    }
    let r = Rational64::new(p, q);
    Some(if negative { -r } else { r })
}
