//! Tridiagonal chains evaluated as continued fractions.
//!
//! A chain with diagonal `d_k`, off-diagonal `i c_k` and source
//! `−s_in a_in` on the first site has `R = 1 + s_in S_1` and
//! `T = s_out S_N`. Writing `R` as the continued fraction
//! `1 − s_in²/(d_1 + c_1²/(d_2 + …))` the Wallis–Euler recurrences
//! `A_n = b_n A_{n−1} + a_n A_{n−2}` (same for `B`) give `R = A_N/B_N`,
//! and `B_N` is the chain determinant, so
//! `T = −s_in s_out (−i)^{N−1} Π c_k / B_N`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Stand-in for an infinite diagonal entry (a manifold whose response
/// sum vanishes); large enough to zero its transmission, small enough
/// that products never overflow.
pub(crate) const HUGE: f64 = 1e150;

pub(crate) fn chain_amplitudes(
    omega: f64,
    diag: &[Complex64],
    couplings: &[f64],
    s_in: f64,
    s_out: f64,
) -> Result<(Complex64, Complex64)> {
    debug_assert_eq!(couplings.len() + 1, diag.len());
    // (A_{n-2}, A_{n-1}), (B_{n-2}, B_{n-1}) starting from n = 1.
    let one = Complex64::new(1.0, 0.0);
    let (mut a2, mut a1) = (one, one);
    let (mut b2, mut b1) = (Complex64::new(0.0, 0.0), one);
    // log |B| scale removed by renormalisation.
    let mut log_scale = 0.0;
    for (n, &d) in diag.iter().enumerate() {
        let an = if n == 0 {
            -s_in * s_in
        } else {
            couplings[n - 1] * couplings[n - 1]
        };
        let a = d * a1 + an * a2;
        let b = d * b1 + an * b2;
        let s = b.norm().max(a.norm());
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Singular { omega });
        }
        a2 = a1 / s;
        b2 = b1 / s;
        a1 = a / s;
        b1 = b / s;
        log_scale += s.ln();
    }
    if b1.norm() == 0.0 {
        return Err(Error::Singular { omega });
    }
    let r = a1 / b1;
    let n = diag.len();
    let t = if couplings.contains(&0.0) || s_out == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        let log_mag = couplings.iter().map(|c| c.ln()).sum::<f64>() + (s_in * s_out).ln() - log_scale;
        let phase = Complex64::new(0.0, -1.0).powu((n - 1) as u32);
        -phase * log_mag.exp() / b1
    };
    Ok((r, t))
}
