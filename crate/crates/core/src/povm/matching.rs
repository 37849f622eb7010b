use num_complex::Complex64;

use crate::error::{param, Error, Result};
use crate::spectral::SpectralFunction;

/// Default smallest `|T|` accepted on the target's support.
pub const TRANSMISSION_FLOOR: f64 = 1e-6;
/// Points with `|f̃|` above this fraction of its peak form the support.
const SUPPORT_FRACTION: f64 = 1e-8;

/// A trigger spectrum matched to a target photon.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedDesign {
    /// `Ψ̃ ∝ f̃ e^{−iωT}/T*`, normalized.
    pub psi_tilde: SpectralFunction,
    /// `P_T/w_T = |⟨TΨ_T|f⟩|²`, one for an exact match.
    pub efficiency_ratio: f64,
}

/// Trigger spectrum that makes the detector project onto `f̃` after the
/// filter `T`, for a click at `detection_time`.
///
/// Fails with [`Error::BandGap`] when `T` vanishes on the support of `f̃`:
/// either `|T|` drops below `floor` at a sample, or `T` changes sign
/// between neighbouring samples. The reported frequency is the sample of
/// the offending pair closer to the zero.
pub fn mode_matched_design(
    target: &SpectralFunction,
    t: &SpectralFunction,
    detection_time: f64,
    floor: f64,
) -> Result<MatchedDesign> {
    target.require_same_grid(t)?;
    let f = target.normalized()?;
    let w = f.points();
    let fa = f.abs();
    let peak = fa.iter().cloned().fold(0.0, f64::max);
    let support = |i: usize| fa[i] > SUPPORT_FRACTION * peak;
    let tv = t.values();
    for i in 0..w.len() {
        if support(i) && tv[i].norm() < floor {
            return Err(Error::BandGap { omega: w[i] });
        }
    }
    for i in 0..w.len() - 1 {
        if (support(i) || support(i + 1)) && (tv[i] * tv[i + 1].conj()).re < 0.0 {
            let k = if tv[i].norm() <= tv[i + 1].norm() { i } else { i + 1 };
            return Err(Error::BandGap { omega: w[k] });
        }
    }
    let values = (0..w.len())
        .map(|i| {
            if support(i) {
                f.values()[i] * Complex64::from_polar(1.0, -w[i] * detection_time) / tv[i].conj()
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let raw = SpectralFunction::new(f.grid().clone(), values)?;
    let psi_tilde = raw.normalized()?;
    // Projected state Ψ̃T*e^{iωT}/τ against the target.
    let projected = psi_tilde
        .map(|omega, p| p * Complex64::from_polar(1.0, omega * detection_time))?
        .product(&t.conj())?;
    let tau2 = projected.norm_sqr_integral();
    if !(tau2 > 0.0) {
        return param("matched trigger is fully blocked by the filter");
    }
    let overlap = projected.inner(&f)?.norm_sqr() / tau2;
    if overlap < 1.0 - 1e-6 {
        return Err(Error::Numeric(format!(
            "matched design reaches only P_T/w_T = {overlap}"
        )));
    }
    Ok(MatchedDesign {
        psi_tilde,
        efficiency_ratio: overlap,
    })
}
