use super::{TransferResult, Transmission};

/// Default tolerance on `1 − |T|²` for a peak to count as perfect.
pub const PEAK_TOLERANCE: f64 = 1e-6;

/// Relative (to the local grid spacing) width at which refinement stops.
const REFINE_RTOL: f64 = 1e-10;

/// Frequencies where `|T|²` has a local maximum with `|T|² ≥ 1 − tol`.
///
/// Candidates are the sampled local maxima of `|T|²`. With a model the
/// maximum is refined by bisection on the sign of `d|T|²/dω` inside the
/// bracket formed by the neighbouring samples and judged by the refined
/// value; without one the sampled value is used as is.
pub fn find_perfect_transmission(result: &TransferResult, model: Option<&dyn Transmission>, tol: f64) -> Vec<f64> {
    let x = result.t.points();
    let p = result.t.norm_sqr();
    let n = x.len();
    let mut found: Vec<f64> = Vec::new();
    for i in 0..n {
        let left_ok = i == 0 || p[i] >= p[i - 1];
        let right_ok = i == n - 1 || p[i] > p[i + 1];
        if !(left_ok && right_ok) {
            continue;
        }
        // Edge samples only count if they are already perfect.
        if (i == 0 || i == n - 1) && p[i] < 1.0 - tol {
            continue;
        }
        let (omega, value) = match model {
            Some(m) if i > 0 && i < n - 1 => refine(m, x[i - 1], x[i], x[i + 1], p[i]),
            _ => (x[i], p[i]),
        };
        if value >= 1.0 - tol {
            let spacing = if i + 1 < n { x[i + 1] - x[i] } else { x[i] - x[i - 1] };
            if found.last().is_none_or(|&w| (omega - w).abs() > 1e-6 * spacing) {
                found.push(omega);
            }
        }
    }
    found
}

fn power(model: &dyn Transmission, omega: f64) -> Option<f64> {
    model.amplitudes(omega).ok().map(|a| a.t.norm_sqr())
}

fn refine(model: &dyn Transmission, lo: f64, mid: f64, hi: f64, sampled: f64) -> (f64, f64) {
    let spacing = (hi - lo).min(mid - lo).min(hi - mid);
    let stop = REFINE_RTOL * spacing;
    let delta = 1e-4 * stop.max(f64::EPSILON * mid.abs());
    let slope = |w: f64| -> Option<f64> { Some(power(model, w + delta)? - power(model, w - delta)?) };
    let (mut a, mut b) = (lo, hi);
    match (slope(a), slope(b)) {
        (Some(sa), Some(sb)) if sa > 0.0 && sb < 0.0 => {
            while b - a > stop {
                let c = 0.5 * (a + b);
                match slope(c) {
                    Some(s) if s > 0.0 => a = c,
                    Some(s) if s < 0.0 => b = c,
                    Some(_) => {
                        a = c;
                        b = c;
                    }
                    None => break,
                }
            }
        }
        _ => return golden(model, lo, hi, stop).unwrap_or((mid, sampled)),
    }
    let w = 0.5 * (a + b);
    match power(model, w) {
        Some(v) if v >= sampled => (w, v),
        _ => (mid, sampled),
    }
}

/// Golden-section maximisation, used when the bracket shows no clean
/// derivative sign change.
fn golden(model: &dyn Transmission, mut a: f64, mut b: f64, stop: f64) -> Option<(f64, f64)> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = power(model, c)?;
    let mut fd = power(model, d)?;
    while b - a > stop {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = power(model, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = power(model, d)?;
        }
    }
    let w = 0.5 * (a + b);
    Some((w, power(model, w)?))
}
