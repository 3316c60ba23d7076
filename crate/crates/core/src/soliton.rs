//! Analytic bright-soliton family of the reduced envelope equation, the
//! physical probe-field reconstruction, and the solitonlike atomic-coherence
//! profiles.
//!
//! Envelope (lab coordinates):
//! B = 2η₀B₀ sech{(2η₀/l₀)[z − (V_g + 4ξ₀l₀/t₀)t − z₀]} e^{iΘ_B},
//! Θ_B = −(2ξ₀/l₀)z + 2[ξ₀V_g/l₀ + 2(ξ₀² − η₀²)/t₀]t − φ₀,
//! with B₀ = [−2/(WV_g t₀)]^{1/2} and l₀ = [K₂V_g³t₀/2]^{1/2}.

use num_complex::Complex64;
use serde::Serialize;

use crate::dispersion;
use crate::error::{Error, Result};
use crate::params::MediumParams;
use crate::reduction::NlseCoefficients;

/// Canonical fundamental-soliton amplitude parameter.
pub const DEFAULT_ETA0: f64 = 0.5;

/// Soliton family parameters plus derived quantities.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolitonParams {
    pub eta0: f64,
    pub xi0: f64,
    /// Position offset, cm.
    pub z0: f64,
    /// Phase offset, rad.
    pub phi0: f64,
    /// Pulse duration, s.
    pub t0: f64,
    /// Envelope amplitude unit B₀ (dimensionless).
    pub b0: f64,
    /// Width unit l₀, cm.
    pub l0: f64,
    /// Soliton velocity V_s = V_g + 4ξ₀l₀/t₀, cm/s.
    pub vs: f64,
    /// Group velocity carried over from the coefficient set, cm/s.
    pub vg: f64,
    /// Re K₂ and Re W carried over for residual checks.
    pub k2: f64,
    pub w: f64,
    /// Re K₀ (linear phase shift entering the probe carrier).
    pub k0_re: f64,
}

impl SolitonParams {
    /// Build the family from envelope coefficients. Fails outside the bright
    /// regime (needs K₂ > 0 and W < 0) or for t₀ ≤ 0.
    pub fn new(
        coeffs: &NlseCoefficients,
        eta0: f64,
        xi0: f64,
        t0: f64,
        z0: f64,
        phi0: f64,
    ) -> Result<Self> {
        if !coeffs.bright_soliton() {
            return Err(Error::Regime(format!(
                "bright soliton needs K2 > 0 and W < 0, got K2 = {:e}, W = {:e}",
                coeffs.k2.re, coeffs.w.re
            )));
        }
        if t0 <= 0.0 || !t0.is_finite() {
            return Err(Error::InvalidParam("t0 must be > 0".into()));
        }
        for (name, v) in [("eta0", eta0), ("xi0", xi0), ("z0", z0), ("phi0", phi0)] {
            if !v.is_finite() {
                return Err(Error::NonFinite(match name {
                    "eta0" => "eta0",
                    "xi0" => "xi0",
                    "z0" => "z0",
                    _ => "phi0",
                }));
            }
        }
        let vg = coeffs.vg;
        let k2 = coeffs.k2.re;
        let w = coeffs.w.re;
        let b0 = (-2.0 / (w * vg * t0)).sqrt();
        let l0 = (k2 * vg.powi(3) * t0 / 2.0).sqrt();
        Ok(SolitonParams {
            eta0,
            xi0,
            z0,
            phi0,
            t0,
            b0,
            l0,
            vs: vg + 4.0 * xi0 * l0 / t0,
            vg,
            k2,
            w,
            k0_re: coeffs.k0.re,
        })
    }

    /// Envelope B(z, t) in lab coordinates.
    pub fn envelope(&self, z: f64, t: f64) -> Complex64 {
        let arg = (2.0 * self.eta0 / self.l0) * (z - self.vs * t - self.z0);
        let theta = -(2.0 * self.xi0 / self.l0) * z
            + 2.0
                * (self.xi0 * self.vg / self.l0
                    + 2.0 * (self.xi0 * self.xi0 - self.eta0 * self.eta0) / self.t0)
                * t
            - self.phi0;
        2.0 * self.eta0 * self.b0 * sech(arg) * Complex64::from_polar(1.0, theta)
    }

    /// Envelope in the comoving frame ξ = z − V_g t.
    pub fn comoving_envelope(&self, xi: f64, t: f64) -> Complex64 {
        self.envelope(xi + self.vg * t, t)
    }

    /// Peak envelope magnitude 2η₀B₀.
    pub fn peak(&self) -> f64 {
        2.0 * self.eta0 * self.b0
    }

    /// sech argument Ξ(z, t) shared by the probe field and the coherences.
    pub fn xi_arg(&self, z: f64, t: f64) -> f64 {
        (2.0 * self.eta0 / self.l0) * (z - self.vs * t - self.z0)
    }

    /// Carrier phase Θ_s(z, t) of the reconstructed probe field, using the
    /// real part of K₀ (absorption disregarded in real-part-only mode).
    pub fn theta_s(&self, p: &MediumParams, z: f64, t: f64) -> f64 {
        let omega_p = p.k_p * p.c_light;
        self.carrier_wavenumber(p) * z
            - (omega_p
                - 2.0
                    * (self.xi0 * self.vg / self.l0
                        + 2.0 * (self.xi0 * self.xi0 - self.eta0 * self.eta0) / self.t0))
                * t
            - self.phi0
    }

    /// Total carrier wavenumber k_p + Re K₀ − 2ξ₀/l₀.
    pub fn carrier_wavenumber(&self, p: &MediumParams) -> f64 {
        p.k_p + self.k0_re - 2.0 * self.xi0 / self.l0
    }

    /// Physical probe field E_p(z, t) = 2E_{p0} sech(Ξ) cos(Θ_s) in units of
    /// the single-photon amplitude (E_{p0} = 2B₀η₀ in those units).
    pub fn probe_field(&self, p: &MediumParams, z: f64, t: f64) -> f64 {
        let ep0 = 2.0 * self.b0 * self.eta0;
        2.0 * ep0 * sech(self.xi_arg(z, t)) * self.theta_s(p, z, t).cos()
    }

    /// Probe-field envelope 2E_{p0} sech(Ξ) without the carrier.
    pub fn probe_envelope(&self, z: f64, t: f64) -> f64 {
        4.0 * self.b0 * self.eta0 * sech(self.xi_arg(z, t))
    }

    /// Solitonlike coherence profiles ⟨S₃₁⟩, ⟨S₂₁⟩: first-order coefficients
    /// scaled by the envelope peak, sharing Ξ and Θ_s with the probe.
    pub fn coherence_profiles(
        &self,
        p: &MediumParams,
        z: f64,
        t: f64,
    ) -> Result<(Complex64, Complex64)> {
        let amp = Complex64::from(self.peak());
        let (s21_unit, s31_unit) = dispersion::first_order_coherences(p, amp)?;
        let shape = sech(self.xi_arg(z, t)) * Complex64::from_polar(1.0, self.theta_s(p, z, t));
        Ok((s31_unit * shape, s21_unit * shape))
    }
}

pub fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// Surface |B| over (s = ξ/l₀, t/t₀), the real-space soliton picture.
#[derive(Debug, Clone)]
pub struct SolitonSurface {
    pub s: Vec<f64>,
    pub t_over_t0: Vec<f64>,
    /// Row-major |B| values, rows indexed by t/t₀.
    pub abs_b: Vec<f64>,
}

pub fn soliton_surface(
    sp: &SolitonParams,
    s_min: f64,
    s_max: f64,
    ns: usize,
    t_max_over_t0: f64,
    nt: usize,
) -> Result<SolitonSurface> {
    if ns < 2 || nt < 2 || s_min.is_nan() || s_max.is_nan() || s_min >= s_max || t_max_over_t0.is_nan() || t_max_over_t0 <= 0.0 {
        return Err(Error::InvalidParam("bad soliton surface grid".into()));
    }
    let s: Vec<f64> = (0..ns)
        .map(|j| s_min + (s_max - s_min) * j as f64 / (ns - 1) as f64)
        .collect();
    let tt: Vec<f64> = (0..nt)
        .map(|j| t_max_over_t0 * j as f64 / (nt - 1) as f64)
        .collect();
    let mut abs_b = Vec::with_capacity(ns * nt);
    for &tau in &tt {
        let t = tau * sp.t0;
        for &si in &s {
            abs_b.push(sp.comoving_envelope(si * sp.l0, t).norm());
        }
    }
    Ok(SolitonSurface {
        s,
        t_over_t0: tt,
        abs_b,
    })
}

/// CSV export with header `s,t_over_t0,absB`.
pub fn write_surface_csv<W: std::io::Write>(surf: &SolitonSurface, mut w: W) -> Result<()> {
    writeln!(w, "s,t_over_t0,absB")?;
    for (row, tau) in surf.t_over_t0.iter().enumerate() {
        for (col, s) in surf.s.iter().enumerate() {
            writeln!(w, "{},{},{}", s, tau, surf.abs_b[row * surf.s.len() + col])?;
        }
    }
    Ok(())
}

/// CSV field dump `z_cm,t_s,ReB,ImB,absB` over a (z, t) grid.
pub fn write_field_dump_csv<W: std::io::Write>(
    sp: &SolitonParams,
    z: &[f64],
    t: &[f64],
    mut w: W,
) -> Result<()> {
    writeln!(w, "z_cm,t_s,ReB,ImB,absB")?;
    for &ti in t {
        for &zi in z {
            let b = sp.envelope(zi, ti);
            writeln!(w, "{},{},{},{},{}", zi, ti, b.re, b.im, b.norm())?;
        }
    }
    Ok(())
}

/// CSV probe-field dump `z_cm,t_s,Ep` over a (z, t) grid.
pub fn write_probe_dump_csv<W: std::io::Write>(
    sp: &SolitonParams,
    p: &MediumParams,
    z: &[f64],
    t: &[f64],
    mut w: W,
) -> Result<()> {
    writeln!(w, "z_cm,t_s,Ep")?;
    for &ti in t {
        for &zi in z {
            writeln!(w, "{},{},{}", zi, ti, sp.probe_field(p, zi, ti))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::{calibrate, CalibrationTargets};
    use approx::assert_relative_eq;

    fn coeffs() -> NlseCoefficients {
        let (cal, _) = calibrate(
            &MediumParams::rb87_preset(),
            CalibrationTargets { k2: 4.82e-15, w: -2.28e-7 },
        )
        .unwrap();
        NlseCoefficients::assemble(&cal).unwrap()
    }

    fn params() -> MediumParams {
        let (cal, _) = calibrate(
            &MediumParams::rb87_preset(),
            CalibrationTargets { k2: 4.82e-15, w: -2.28e-7 },
        )
        .unwrap();
        cal
    }

    #[test]
    fn derived_quantities_reference_chain() {
        let sp = SolitonParams::new(&coeffs(), DEFAULT_ETA0, 0.1, 2.4e-7, 0.0, 0.0).unwrap();
        assert_relative_eq!(sp.l0, 3.334668041e-1, max_relative = 1e-6);
        assert_relative_eq!(sp.b0, 2.516493416e3, max_relative = 1e-5);
        // ultraslow propagation, reference 2.11e-4 c within 10 percent
        let c = MediumParams::rb87_preset().c_light;
        assert_relative_eq!(sp.vs / c, 2.11e-4, max_relative = 0.1);
        assert_relative_eq!(sp.vs / c, 2.110516e-4, max_relative = 1e-5);
    }

    #[test]
    fn stationary_soliton_moves_at_group_velocity() {
        let sp = SolitonParams::new(&coeffs(), DEFAULT_ETA0, 0.0, 2.4e-7, 0.0, 0.0).unwrap();
        assert_eq!(sp.vs, sp.vg);
    }

    #[test]
    fn quadrupled_kerr_halves_amplitude_unit() {
        let c = coeffs();
        let mut c4 = c;
        c4.w *= 4.0;
        let sp = SolitonParams::new(&c, DEFAULT_ETA0, 0.1, 2.4e-7, 0.0, 0.0).unwrap();
        let sp4 = SolitonParams::new(&c4, DEFAULT_ETA0, 0.1, 2.4e-7, 0.0, 0.0).unwrap();
        assert_relative_eq!(sp4.b0, sp.b0 / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn peak_sits_on_trajectory() {
        let sp = SolitonParams::new(&coeffs(), DEFAULT_ETA0, 0.1, 2.4e-7, 0.37, 1.2).unwrap();
        for &t in &[0.0, 1e-7, 5e-7] {
            let z = sp.vs * t + sp.z0;
            assert_relative_eq!(sp.envelope(z, t).norm(), sp.peak(), max_relative = 1e-12);
            // slightly off the trajectory the magnitude drops
            assert!(sp.envelope(z + 0.3 * sp.l0, t).norm() < sp.peak());
        }
    }

    #[test]
    fn traveling_wave_magnitude_invariance() {
        let sp = SolitonParams::new(&coeffs(), DEFAULT_ETA0, 0.1, 2.4e-7, 0.0, 0.5).unwrap();
        let (z, t) = (0.21, 3.1e-7);
        let b_ref = sp.envelope(z, t).norm();
        for &shift in &[1e-8, 2.5e-7, 8e-7] {
            let b = sp.envelope(z + sp.vs * shift, t + shift).norm();
            assert!((b - b_ref).abs() <= 1e-12 * sp.peak());
        }
    }

    #[test]
    fn bright_regime_gate_always_errors() {
        let mut c = coeffs();
        c.w = -c.w; // W > 0
        assert!(matches!(
            SolitonParams::new(&c, DEFAULT_ETA0, 0.0, 2.4e-7, 0.0, 0.0),
            Err(Error::Regime(_))
        ));
        let mut c2 = coeffs();
        c2.k2 = -c2.k2; // K2 < 0
        assert!(matches!(
            SolitonParams::new(&c2, DEFAULT_ETA0, 0.0, 2.4e-7, 0.0, 0.0),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn probe_field_envelope_and_carrier() {
        let p = params();
        let sp = SolitonParams::new(&coeffs(), DEFAULT_ETA0, 0.1, 2.4e-7, 0.0, 0.0).unwrap();
        // envelope of the reconstructed field is 2 Ep0 sech(Xi)
        let (z, t) = (0.1, 2e-7);
        let envelope = sp.probe_envelope(z, t);
        assert_relative_eq!(
            envelope,
            4.0 * sp.b0 * sp.eta0 * sech(sp.xi_arg(z, t)),
            max_relative = 1e-14
        );
        assert!(sp.probe_field(&p, z, t).abs() <= envelope * (1.0 + 1e-12));
        // carrier wavenumber as printed
        assert_relative_eq!(
            sp.carrier_wavenumber(&p),
            p.k_p + sp.k0_re - 2.0 * sp.xi0 / sp.l0,
            max_relative = 1e-14
        );
        // doubling eta0 at fixed B0 doubles the peak: Ep0 = 2 B0 eta0
        let sp2 = SolitonParams::new(&coeffs(), 2.0 * DEFAULT_ETA0, 0.1, 2.4e-7, 0.0, 0.0).unwrap();
        let ep0 = 2.0 * sp.b0 * sp.eta0;
        let ep0_2 = 2.0 * sp2.b0 * sp2.eta0;
        assert_relative_eq!(ep0_2 / ep0, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn coherence_ratio_and_decay() {
        let p = params();
        let sp = SolitonParams::new(&coeffs(), DEFAULT_ETA0, 0.1, 2.4e-7, 0.0, 0.0).unwrap();
        let d = p.complex_detunings().unwrap();
        for &(z, t) in &[(0.0, 0.0), (0.4, 1e-7), (-0.2, 3e-7)] {
            let (s31, s21) = sp.coherence_profiles(&p, z, t).unwrap();
            let ratio = (s21 / s31).norm();
            assert_relative_eq!(ratio, (p.omega_c / d.d21).norm(), max_relative = 1e-12);
        }
        // profiles vanish far from the soliton
        let (s31_far, _) = sp.coherence_profiles(&p, 50.0, 0.0).unwrap();
        assert!(s31_far.norm() < 1e-30);
        // peak coherence magnitude from the arithmetic oracle
        let (s31_peak, _) = sp.coherence_profiles(&p, sp.z0, 0.0).unwrap();
        assert_relative_eq!(s31_peak.norm(), 3.260153e-2, max_relative = 1e-4);
    }

    #[test]
    fn surface_slices_are_shape_invariant() {
        let sp = SolitonParams::new(&coeffs(), DEFAULT_ETA0, 0.1, 2.4e-7, 0.0, 0.0).unwrap();
        let surf = soliton_surface(&sp, -12.0, 12.0, 241, 3.0, 31).unwrap();
        let ns = surf.s.len();
        let maxima: Vec<f64> = surf
            .abs_b
            .chunks(ns)
            .map(|row| row.iter().cloned().fold(0.0, f64::max))
            .collect();
        let lo = maxima.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = maxima.iter().cloned().fold(0.0, f64::max);
        assert!((hi - lo) / hi < 0.01, "slice maxima vary by {:e}", (hi - lo) / hi);
    }
}
