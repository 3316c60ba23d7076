//! Linear dispersion relation of the probe,
//! K(ω) = ω/c + κ₁₃ (ω + d₂₁)/D(ω) with D(ω) = |Ω_c|² − (ω + d₂₁)(ω + d₃₁),
//! its Taylor coefficients at ω = 0 (closed-form quotient-rule derivatives),
//! transparency-window scans, and the first-order atomic coherences.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{ComplexDetunings, MediumParams};

/// Pole guard: |D(ω)| must stay above this fraction of |Ω_c|²
/// (or of |d₂₁d₃₁| when the control field is off).
pub const DEFAULT_POLE_FLOOR_FRAC: f64 = 1e-6;

/// Sampled K(ω) over a frequency window, with absorption landmarks.
#[derive(Debug, Clone)]
pub struct DispersionProfile {
    /// Sideband frequencies, rad/s, strictly increasing.
    pub omega: Vec<f64>,
    /// Complex K(ω), cm⁻¹.
    pub k: Vec<Complex64>,
    /// Frequency of minimum Im K within the scan (transparency point).
    pub omega_min_imk: f64,
    pub min_imk: f64,
    /// The two largest interior absorption peaks (ω, Im K), ordered by ω.
    /// Empty for flat profiles (e.g. κ₁₃ = 0).
    pub peaks: Vec<(f64, f64)>,
}

/// K(ω) expanded at ω = 0: K₀ + K₁ω + (K₂/2)ω².
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TaylorCoefficients {
    pub k0: Complex64,
    /// cm⁻¹·s
    pub k1: Complex64,
    /// cm⁻¹·s²
    pub k2: Complex64,
    /// Group velocity 1/Re K₁, cm/s.
    pub vg: f64,
}

/// D(ω) = |Ω_c|² − (ω + d₂₁)(ω + d₃₁), s⁻².
pub fn big_d(omega: f64, d: &ComplexDetunings, omega_c: Complex64) -> Complex64 {
    omega_c.norm_sqr() - (omega + d.d21) * (omega + d.d31)
}

fn pole_floor(p: &MediumParams, d: &ComplexDetunings, frac: f64) -> f64 {
    let scale = p.omega_c_abs2().max((d.d21 * d.d31).norm());
    frac * scale
}

/// K(ω) = ω/c + κ₁₃ (ω + d₂₁)/D(ω). Requires κ₁₃ (calibrated or supplied).
pub fn linear_dispersion(p: &MediumParams, omega: f64) -> Result<Complex64> {
    linear_dispersion_with_floor(p, omega, DEFAULT_POLE_FLOOR_FRAC)
}

/// [`linear_dispersion`] with a caller-chosen pole floor (as a fraction of
/// the |Ω_c|² scale).
pub fn linear_dispersion_with_floor(
    p: &MediumParams,
    omega: f64,
    floor_frac: f64,
) -> Result<Complex64> {
    let kappa13 = p.kappa13_required()?;
    let d = p.complex_detunings()?;
    if !omega.is_finite() {
        return Err(Error::NonFinite("omega"));
    }
    if kappa13 == 0.0 {
        return Ok(Complex64::new(omega / p.c_light, 0.0));
    }
    let dd = big_d(omega, &d, p.omega_c);
    let floor = pole_floor(p, &d, floor_frac);
    if dd.norm() < floor {
        return Err(Error::Pole {
            omega,
            d_abs: dd.norm(),
            floor,
        });
    }
    Ok(omega / p.c_light + kappa13 * (omega + d.d21) / dd)
}

/// Closed-form derivatives of f(ω) = (ω + d₂₁)/D(ω) at ω = 0.
///
/// With u = ω + d₂₁, v = ω + d₃₁: D' = −(u + v), and
/// f' = (D + u(u+v))/D², f'' = 2[uD + (D + u(u+v))(u+v)]/D³.
pub(crate) fn rational_derivatives(
    d: &ComplexDetunings,
    omega_c: Complex64,
) -> (Complex64, Complex64, Complex64, Complex64) {
    let u = d.d21;
    let v = d.d31;
    let d0 = omega_c.norm_sqr() - u * v;
    let f0 = u / d0;
    let s = u + v;
    let f1 = (d0 + u * s) / (d0 * d0);
    let f2 = 2.0 * (u * d0 + (d0 + u * s) * s) / (d0 * d0 * d0);
    (d0, f0, f1, f2)
}

/// K₀, K₁, K₂ at ω = 0 and the group velocity V_g = 1/Re K₁.
pub fn taylor_coefficients(p: &MediumParams) -> Result<TaylorCoefficients> {
    let kappa13 = p.kappa13_required()?;
    let d = p.complex_detunings()?;
    let (d0, f0, f1, f2) = rational_derivatives(&d, p.omega_c);
    let floor = pole_floor(p, &d, DEFAULT_POLE_FLOOR_FRAC);
    if d0.norm() < floor {
        return Err(Error::Pole {
            omega: 0.0,
            d_abs: d0.norm(),
            floor,
        });
    }
    let k0 = kappa13 * f0;
    let k1 = Complex64::new(1.0 / p.c_light, 0.0) + kappa13 * f1;
    let k2 = kappa13 * f2;
    let vg = 1.0 / k1.re;
    Ok(TaylorCoefficients { k0, k1, k2, vg })
}

/// Uniform scan of K(ω) over [omega_min, omega_max] (inclusive, n points).
pub fn transparency_scan(
    p: &MediumParams,
    omega_min: f64,
    omega_max: f64,
    n: usize,
) -> Result<DispersionProfile> {
    if n < 2 {
        return Err(Error::InvalidParam("scan needs n >= 2 points".into()));
    }
    if omega_min.is_nan() || omega_max.is_nan() || omega_min >= omega_max {
        return Err(Error::InvalidParam(
            "scan needs omega_min < omega_max".into(),
        ));
    }
    let step = (omega_max - omega_min) / (n - 1) as f64;
    let mut omega = Vec::with_capacity(n);
    let mut k = Vec::with_capacity(n);
    for j in 0..n {
        // endpoints returned exactly as given
        let w = if j == n - 1 {
            omega_max
        } else {
            omega_min + step * j as f64
        };
        omega.push(w);
        k.push(linear_dispersion(p, w)?);
    }

    let (i_min, min_imk) = k
        .iter()
        .enumerate()
        .map(|(i, kk)| (i, kk.im))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("n >= 2");

    // Interior local maxima of Im K; keep the two tallest, report by omega.
    let mut maxima: Vec<(f64, f64)> = Vec::new();
    for i in 1..n - 1 {
        if k[i].im > k[i - 1].im && k[i].im >= k[i + 1].im && k[i].im > 0.0 {
            maxima.push((omega[i], k[i].im));
        }
    }
    maxima.sort_by(|a, b| b.1.total_cmp(&a.1));
    maxima.truncate(2);
    maxima.sort_by(|a, b| a.0.total_cmp(&b.0));

    Ok(DispersionProfile {
        omega_min_imk: omega[i_min],
        min_imk,
        peaks: maxima,
        omega,
        k,
    })
}

/// First-order coherence envelopes driven by a probe envelope value `a`
/// (in single-photon envelope units, carrier phase excluded):
/// S₂₁ = −g_p Ω_c* a / (|Ω_c|² − d₂₁d₃₁), S₃₁ = g_p d₂₁ a / (|Ω_c|² − d₂₁d₃₁).
///
/// Uses the phase convention g_p = √(|g_p|²) real ≥ 0; requires `gp_abs2`.
pub fn first_order_coherences(
    p: &MediumParams,
    a: Complex64,
) -> Result<(Complex64, Complex64)> {
    let gp = p.gp_abs2_required()?.sqrt();
    let d = p.complex_detunings()?;
    let den = p.omega_c_abs2() - d.d21 * d.d31;
    let scale = p.omega_c_abs2().max((d.d21 * d.d31).norm());
    if den.norm() < 1e-9 * scale {
        return Err(Error::ResonanceDenominator(den.norm()));
    }
    let s21 = -gp * p.omega_c.conj() * a / den;
    let s31 = gp * d.d21 * a / den;
    Ok((s21, s31))
}

/// Write a scan as CSV with header `omega_rad_s,ReK_cm-1,ImK_cm-1`.
pub fn write_scan_csv<W: std::io::Write>(profile: &DispersionProfile, mut w: W) -> Result<()> {
    writeln!(w, "omega_rad_s,ReK_cm-1,ImK_cm-1")?;
    for (omega, k) in profile.omega.iter().zip(&profile.k) {
        writeln!(w, "{},{},{}", omega, k.re, k.im)?;
    }
    Ok(())
}
