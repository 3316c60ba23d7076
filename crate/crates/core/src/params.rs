//! Physical parameters of the Λ-type medium: validation, the Rb-87 preset,
//! complex detunings, the EIT-condition diagnostic, and config-file I/O.
//!
//! Unit discipline: angular frequencies in rad/s, lengths in cm, times in s,
//! densities in cm⁻³. The config format forces an explicit unit suffix on
//! every value so that 2π bookkeeping mistakes fail loudly at parse time.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vacuum light speed in cm/s.
pub const C_LIGHT_CM_S: f64 = 2.998e10;

/// Default probe carrier wavelength (Rb-87 D2 line), cm.
pub const DEFAULT_PROBE_WAVELENGTH_CM: f64 = 780e-7;

/// Floor used by [`MediumParams::eit_condition`] when the ground-state
/// dephasing is exactly zero (rad/s).
pub const EIT_GAMMA21_FLOOR: f64 = std::f64::consts::TAU;

/// Default threshold on |Ω_c|²/(γ₂₁γ₃₁) above which EIT is considered open.
pub const EIT_RATIO_THRESHOLD: f64 = 100.0;

/// All physical constants of the Λ system.
///
/// `kappa13` (= |g_p|²N/c, cm⁻¹s⁻¹) and `gp_abs2` (= |g_p|², s⁻²) stay unset
/// until provided by the user or recovered by calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    /// Spontaneous decay rate |3⟩→|1⟩, rad/s.
    pub gamma13: f64,
    /// Spontaneous decay rate |3⟩→|2⟩, rad/s.
    pub gamma23: f64,
    /// Pure ground-state dephasing rate γ₂₁, rad/s.
    pub gamma21_deph: f64,
    /// Two-photon detuning Δ₂, rad/s.
    pub delta2: f64,
    /// One-photon detuning Δ₃, rad/s.
    pub delta3: f64,
    /// Control half Rabi frequency Ω_c, rad/s (complex).
    pub omega_c: Complex64,
    /// Atomic number density 𝒩_a = N/V, cm⁻³.
    pub atom_density: f64,
    /// Propagation coupling κ₁₃ = |g_p|²N/c, cm⁻¹s⁻¹ (set by calibration).
    pub kappa13: Option<f64>,
    /// Single-photon coupling strength squared |g_p|², s⁻² (set by calibration).
    pub gp_abs2: Option<f64>,
    /// Probe carrier wavenumber k_p, cm⁻¹.
    pub k_p: f64,
    /// Cell length L, cm.
    pub cell_length: f64,
    /// Vacuum light speed, cm/s.
    pub c_light: f64,
}

/// Complex detunings d₂₁ = Δ₂ + iγ₂₁ and d₃₁ = Δ₃ + iγ₃₁.
///
/// The sign convention (damping on the +i side) is the one that makes
/// Im K(ω) ≥ 0 (absorption, not gain) across the transparency window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexDetunings {
    pub d21: Complex64,
    pub d31: Complex64,
}

/// Result of the EIT-condition check |Ω_c|² ≫ γ₂₁γ₃₁.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EitCondition {
    pub ratio: f64,
    pub satisfied: bool,
    /// True when γ₂₁ = 0 and the configured floor replaced it.
    pub floor_used: bool,
    pub floor: f64,
    pub threshold: f64,
}

impl MediumParams {
    /// Laser-cooled Rb-87 preset: Γ₁₃ = Γ₂₃ = 2π×3 MHz, Δ₃ = 2π×60 MHz,
    /// Δ₂ = 2π×1.2 MHz, Ω_c = 2π×28 MHz, 𝒩_a = 8×10¹⁰ cm⁻³. The couplings
    /// κ₁₃ and |g_p|² are left unset, awaiting calibration.
    pub fn rb87_preset() -> Self {
        let tau = std::f64::consts::TAU;
        MediumParams {
            gamma13: tau * 3e6,
            gamma23: tau * 3e6,
            gamma21_deph: 0.0,
            delta2: tau * 1.2e6,
            delta3: tau * 60e6,
            omega_c: Complex64::new(tau * 28e6, 0.0),
            atom_density: 8e10,
            kappa13: None,
            gp_abs2: None,
            k_p: tau / DEFAULT_PROBE_WAVELENGTH_CM,
            cell_length: 1.0,
            c_light: C_LIGHT_CM_S,
        }
    }

    /// Excited-state coherence damping rate γ₃₁ = (Γ₁₃ + Γ₂₃)/2, rad/s.
    pub fn gamma31(&self) -> f64 {
        0.5 * (self.gamma13 + self.gamma23)
    }

    /// Ground-state coherence damping rate γ₂₁ (pure dephasing), rad/s.
    pub fn gamma21(&self) -> f64 {
        self.gamma21_deph
    }

    /// |Ω_c|², s⁻².
    pub fn omega_c_abs2(&self) -> f64 {
        self.omega_c.norm_sqr()
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("gamma13", self.gamma13),
            ("gamma23", self.gamma23),
            ("gamma21_deph", self.gamma21_deph),
            ("delta2", self.delta2),
            ("delta3", self.delta3),
            ("omega_c", self.omega_c.re),
            ("omega_c_im", self.omega_c.im),
            ("atom_density", self.atom_density),
            ("k_p", self.k_p),
            ("cell_length", self.cell_length),
            ("c_light", self.c_light),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        if self.gamma13 < 0.0 || self.gamma23 < 0.0 || self.gamma21_deph < 0.0 {
            return Err(Error::InvalidParam(
                "decay and dephasing rates must be >= 0".into(),
            ));
        }
        if self.atom_density <= 0.0 {
            return Err(Error::InvalidParam("atom_density must be > 0".into()));
        }
        if self.cell_length <= 0.0 {
            return Err(Error::InvalidParam("cell_length must be > 0".into()));
        }
        if self.k_p <= 0.0 {
            return Err(Error::InvalidParam("k_p must be > 0".into()));
        }
        if self.c_light <= 0.0 {
            return Err(Error::InvalidParam("c_light must be > 0".into()));
        }
        if let Some(k) = self.kappa13 {
            if !k.is_finite() || k < 0.0 {
                return Err(Error::InvalidParam("kappa13 must be finite and >= 0".into()));
            }
        }
        if let Some(g) = self.gp_abs2 {
            if !g.is_finite() || g < 0.0 {
                return Err(Error::InvalidParam("gp_abs2 must be finite and >= 0".into()));
            }
        }
        // Both couplings set: their ratio is the effective column count
        // N = kappa13 c / |g_p|^2, which must come out positive and finite.
        if let (Some(k), Some(g)) = (self.kappa13, self.gp_abs2) {
            if g > 0.0 {
                let n = k * self.c_light / g;
                if !n.is_finite() || n <= 0.0 {
                    return Err(Error::InvalidParam(format!(
                        "kappa13*c/gp_abs2 = {n:e} is not a positive atom count"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Complex detunings d₂₁ = Δ₂ + iγ₂₁, d₃₁ = Δ₃ + iγ₃₁.
    pub fn complex_detunings(&self) -> Result<ComplexDetunings> {
        self.validate()?;
        Ok(ComplexDetunings {
            d21: Complex64::new(self.delta2, self.gamma21()),
            d31: Complex64::new(self.delta3, self.gamma31()),
        })
    }

    /// EIT-condition ratio |Ω_c|²/(max(γ₂₁, floor)·γ₃₁) with the default
    /// floor and threshold.
    pub fn eit_condition(&self) -> EitCondition {
        self.eit_condition_with(EIT_GAMMA21_FLOOR, EIT_RATIO_THRESHOLD)
    }

    pub fn eit_condition_with(&self, floor: f64, threshold: f64) -> EitCondition {
        let g21 = self.gamma21();
        let floor_used = g21 < floor;
        let g21_eff = g21.max(floor);
        let g31 = self.gamma31();
        let ratio = if self.omega_c_abs2() == 0.0 {
            0.0
        } else {
            self.omega_c_abs2() / (g21_eff * g31)
        };
        EitCondition {
            ratio,
            satisfied: ratio > threshold,
            floor_used,
            floor,
            threshold,
        }
    }

    /// Effective atom number N = κ₁₃ c / |g_p|², when both couplings are set.
    pub fn effective_atom_count(&self) -> Option<f64> {
        match (self.kappa13, self.gp_abs2) {
            (Some(k), Some(g)) if g > 0.0 => Some(k * self.c_light / g),
            _ => None,
        }
    }

    pub fn kappa13_required(&self) -> Result<f64> {
        self.kappa13.ok_or(Error::MissingCalibration("kappa13"))
    }

    pub fn gp_abs2_required(&self) -> Result<f64> {
        self.gp_abs2.ok_or(Error::MissingCalibration("gp_abs2"))
    }

    pub fn save_config(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_config_string())?;
        Ok(())
    }

    pub fn load_config(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_config_str(&text)
    }

    /// Serialize to the key-value config format. Values are written in base
    /// units with shortest round-trip decimals, so a save/load cycle is the
    /// identity on every field.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# eit-qnlse medium configuration");
        let _ = writeln!(s, "gamma13 = {} rad_s", self.gamma13);
        let _ = writeln!(s, "gamma23 = {} rad_s", self.gamma23);
        let _ = writeln!(s, "gamma21_deph = {} rad_s", self.gamma21_deph);
        let _ = writeln!(s, "delta2 = {} rad_s", self.delta2);
        let _ = writeln!(s, "delta3 = {} rad_s", self.delta3);
        let _ = writeln!(s, "omega_c = {} rad_s", self.omega_c.re);
        if self.omega_c.im != 0.0 {
            let _ = writeln!(s, "omega_c_im = {} rad_s", self.omega_c.im);
        }
        let _ = writeln!(s, "atom_density = {} cm-3", self.atom_density);
        let _ = writeln!(s, "k_p = {} cm-1", self.k_p);
        let _ = writeln!(s, "cell_length = {} cm", self.cell_length);
        let _ = writeln!(s, "c_light = {} cm_s-1", self.c_light);
        if let Some(k) = self.kappa13 {
            let _ = writeln!(s, "kappa13 = {} cm-1_s-1", k);
        }
        if let Some(g) = self.gp_abs2 {
            let _ = writeln!(s, "gp_abs2 = {} s-2", g);
        }
        s
    }

    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut seen: Vec<(&str, f64)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line.split_once('=').ok_or_else(|| Error::ConfigParse {
                line: line_no,
                msg: format!("expected \"key = value unit\", got \"{line}\""),
            })?;
            let key = key.trim();
            let field = field_spec(key).ok_or_else(|| Error::UnknownKey {
                line: line_no,
                key: key.to_string(),
            })?;
            if seen.iter().any(|(k, _)| *k == field.name) {
                return Err(Error::ConfigParse {
                    line: line_no,
                    msg: format!("duplicate key \"{key}\""),
                });
            }
            let mut parts = rest.split_whitespace();
            let value_str = parts.next().ok_or_else(|| Error::ConfigParse {
                line: line_no,
                msg: format!("field \"{key}\" has no value"),
            })?;
            let unit_str = parts.next().ok_or_else(|| Error::ConfigParse {
                line: line_no,
                msg: format!(
                    "field \"{key}\" has no unit suffix (expected {})",
                    field.dimension.expected()
                ),
            })?;
            if parts.next().is_some() {
                return Err(Error::ConfigParse {
                    line: line_no,
                    msg: format!("field \"{key}\": trailing tokens after unit"),
                });
            }
            let value: f64 = value_str.parse().map_err(|_| Error::ConfigParse {
                line: line_no,
                msg: format!("field \"{key}\": cannot parse \"{value_str}\" as a number"),
            })?;
            let scale = field.dimension.parse_unit(unit_str).ok_or_else(|| {
                Error::UnitMismatch {
                    field: key.to_string(),
                    expected: field.dimension.expected(),
                    got: unit_str.to_string(),
                }
            })?;
            seen.push((field.name, value * scale));
        }

        let get = |name: &str| seen.iter().find(|(k, _)| *k == name).map(|(_, v)| *v);
        let require = |name: &'static str| get(name).ok_or(Error::MissingField(name));

        let p = MediumParams {
            gamma13: require("gamma13")?,
            gamma23: require("gamma23")?,
            gamma21_deph: get("gamma21_deph").unwrap_or(0.0),
            delta2: require("delta2")?,
            delta3: require("delta3")?,
            omega_c: Complex64::new(require("omega_c")?, get("omega_c_im").unwrap_or(0.0)),
            atom_density: require("atom_density")?,
            kappa13: get("kappa13"),
            gp_abs2: get("gp_abs2"),
            k_p: get("k_p").unwrap_or(std::f64::consts::TAU / DEFAULT_PROBE_WAVELENGTH_CM),
            cell_length: get("cell_length").unwrap_or(1.0),
            c_light: get("c_light").unwrap_or(C_LIGHT_CM_S),
        };
        p.validate()?;
        Ok(p)
    }
}

/// Physical dimension of a config field, used to accept or reject a unit
/// suffix and to convert to base units.
#[derive(Debug, Clone, Copy)]
enum Dimension {
    AngularFrequency,
    Density,
    Length,
    InverseLength,
    Velocity,
    Coupling,
    FrequencySquared,
}

impl Dimension {
    fn expected(self) -> &'static str {
        match self {
            Dimension::AngularFrequency => "rad_s or [k|M|G]Hz_x2pi",
            Dimension::Density => "cm-3",
            Dimension::Length => "cm",
            Dimension::InverseLength => "cm-1",
            Dimension::Velocity => "cm_s-1",
            Dimension::Coupling => "cm-1_s-1",
            Dimension::FrequencySquared => "s-2",
        }
    }

    /// Multiplier taking a value with this unit suffix to base units, or
    /// None when the suffix does not belong to this dimension.
    fn parse_unit(self, unit: &str) -> Option<f64> {
        let tau = std::f64::consts::TAU;
        match self {
            Dimension::AngularFrequency => match unit {
                "rad_s" => Some(1.0),
                "Hz_x2pi" => Some(tau),
                "kHz_x2pi" => Some(tau * 1e3),
                "MHz_x2pi" => Some(tau * 1e6),
                "GHz_x2pi" => Some(tau * 1e9),
                _ => None,
            },
            Dimension::Density => (unit == "cm-3").then_some(1.0),
            Dimension::Length => (unit == "cm").then_some(1.0),
            Dimension::InverseLength => (unit == "cm-1").then_some(1.0),
            Dimension::Velocity => (unit == "cm_s-1").then_some(1.0),
            Dimension::Coupling => (unit == "cm-1_s-1").then_some(1.0),
            Dimension::FrequencySquared => (unit == "s-2").then_some(1.0),
        }
    }
}

struct FieldSpec {
    name: &'static str,
    dimension: Dimension,
}

fn field_spec(key: &str) -> Option<FieldSpec> {
    use Dimension::*;
    let dim = match key {
        "gamma13" | "gamma23" | "gamma21_deph" | "delta2" | "delta3" | "omega_c"
        | "omega_c_im" => AngularFrequency,
        "atom_density" => Density,
        "kappa13" => Coupling,
        "gp_abs2" => FrequencySquared,
        "k_p" => InverseLength,
        "cell_length" => Length,
        "c_light" => Velocity,
        _ => return None,
    };
    // `name` is the canonical storage key (same string for all fields).
    Some(FieldSpec {
        name: match key {
            "gamma13" => "gamma13",
            "gamma23" => "gamma23",
            "gamma21_deph" => "gamma21_deph",
            "delta2" => "delta2",
            "delta3" => "delta3",
            "omega_c" => "omega_c",
            "omega_c_im" => "omega_c_im",
            "atom_density" => "atom_density",
            "kappa13" => "kappa13",
            "gp_abs2" => "gp_abs2",
            "k_p" => "k_p",
            "cell_length" => "cell_length",
            "c_light" => "c_light",
            _ => unreachable!(),
        },
        dimension: dim,
    })
}
