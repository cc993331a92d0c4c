//! Rotor-craft propulsion power model.
//!
//! Covers general forward flight (blade profile, induced, and fuselage drag
//! terms) and the hover special case used by the system energy totals. A
//! static UAV holds thrust equal to its weight, so hover power depends only
//! on the airframe parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of a rotor craft.
///
/// Defaults describe the reference airframe used throughout the experiments:
/// a 20 N craft with a 0.4 m rotor at 300 rad/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotorCraft {
    /// Aircraft weight in Newtons (`W`).
    pub weight_n: f64,
    /// Air density in kg/m^3.
    pub air_density: f64,
    /// Rotor radius in meters.
    pub rotor_radius_m: f64,
    /// Rotor disc area in m^2. Falls back to the circular disc of the
    /// configured radius when a config omits it.
    pub disc_area_m2: f64,
    /// Blade angular velocity in rad/s.
    pub blade_angular_vel: f64,
    /// Rotor solidity: fraction of the disc covered by blades.
    pub solidity: f64,
    /// Incremental correction factor to induced power.
    pub correction_k: f64,
    /// Profile drag coefficient.
    pub profile_drag: f64,
    /// Fuselage drag ratio; only matters in forward flight.
    #[serde(default)]
    pub fuselage_drag_ratio: f64,
    /// Number of rotor blades, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blade_count: Option<u32>,
    /// Blade chord length in meters, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chord_m: Option<f64>,
}

impl Default for RotorCraft {
    fn default() -> Self {
        RotorCraft {
            weight_n: 20.0,
            air_density: 1.225,
            rotor_radius_m: 0.4,
            disc_area_m2: 0.503,
            blade_angular_vel: 300.0,
            solidity: 0.05,
            correction_k: 0.1,
            profile_drag: 0.012,
            fuselage_drag_ratio: 0.0,
            blade_count: None,
            chord_m: None,
        }
    }
}

impl RotorCraft {
    /// Checks physical plausibility and the solidity/blade-geometry tie.
    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("weight_n", self.weight_n),
            ("air_density", self.air_density),
            ("rotor_radius_m", self.rotor_radius_m),
            ("disc_area_m2", self.disc_area_m2),
            ("blade_angular_vel", self.blade_angular_vel),
            ("solidity", self.solidity),
            ("correction_k", self.correction_k),
            ("profile_drag", self.profile_drag),
        ];
        for (name, value) in positives {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::Domain(format!(
                    "rotor craft {name} must be positive, got {value}"
                )));
            }
        }
        if self.fuselage_drag_ratio < 0.0 || !self.fuselage_drag_ratio.is_finite() {
            return Err(Error::Domain(format!(
                "fuselage_drag_ratio must be >= 0, got {}",
                self.fuselage_drag_ratio
            )));
        }
        if let (Some(blades), Some(chord)) = (self.blade_count, self.chord_m) {
            let s = rotor_solidity(blades, chord, self.rotor_radius_m)?;
            if (s - self.solidity).abs() > 1e-9 {
                return Err(Error::Domain(format!(
                    "solidity {} inconsistent with blade geometry (expected {s})",
                    self.solidity
                )));
            }
        }
        Ok(())
    }
}

/// File-facing form of [`RotorCraft`]: every field optional.
///
/// Missing fields take the reference-airframe defaults, except the disc
/// area, which falls back to `pi * radius^2` whenever the radius was given
/// explicitly.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RotorCraftConfig {
    pub weight_n: Option<f64>,
    pub air_density: Option<f64>,
    pub rotor_radius_m: Option<f64>,
    pub disc_area_m2: Option<f64>,
    pub blade_angular_vel: Option<f64>,
    pub solidity: Option<f64>,
    pub correction_k: Option<f64>,
    pub profile_drag: Option<f64>,
    pub fuselage_drag_ratio: Option<f64>,
    pub blade_count: Option<u32>,
    pub chord_m: Option<f64>,
}

impl RotorCraftConfig {
    pub fn build(&self) -> Result<RotorCraft> {
        let defaults = RotorCraft::default();
        let rotor_radius_m = self.rotor_radius_m.unwrap_or(defaults.rotor_radius_m);
        let disc_area_m2 = match (self.disc_area_m2, self.rotor_radius_m) {
            (Some(area), _) => area,
            // Radius overridden without an area: derive the circular disc.
            (None, Some(r)) => std::f64::consts::PI * r * r,
            (None, None) => defaults.disc_area_m2,
        };
        // Solidity from blade geometry when given without an explicit value.
        let solidity = match (self.solidity, self.blade_count, self.chord_m) {
            (Some(s), _, _) => s,
            (None, Some(b), Some(c)) => rotor_solidity(b, c, rotor_radius_m)?,
            _ => defaults.solidity,
        };
        let craft = RotorCraft {
            weight_n: self.weight_n.unwrap_or(defaults.weight_n),
            air_density: self.air_density.unwrap_or(defaults.air_density),
            rotor_radius_m,
            disc_area_m2,
            blade_angular_vel: self.blade_angular_vel.unwrap_or(defaults.blade_angular_vel),
            solidity,
            correction_k: self.correction_k.unwrap_or(defaults.correction_k),
            profile_drag: self.profile_drag.unwrap_or(defaults.profile_drag),
            fuselage_drag_ratio: self.fuselage_drag_ratio.unwrap_or(0.0),
            blade_count: self.blade_count,
            chord_m: self.chord_m,
        };
        craft.validate()?;
        Ok(craft)
    }
}

/// Rotor solidity `s = b * c / (pi * R)` from blade count, chord, and radius.
pub fn rotor_solidity(blade_count: u32, chord_m: f64, rotor_radius_m: f64) -> Result<f64> {
    if blade_count == 0 || !(chord_m > 0.0) || !(rotor_radius_m > 0.0) {
        return Err(Error::Domain(format!(
            "rotor_solidity requires positive inputs, got ({blade_count}, {chord_m}, {rotor_radius_m})"
        )));
    }
    Ok(f64::from(blade_count) * chord_m / (std::f64::consts::PI * rotor_radius_m))
}

/// Mean induced velocity at thrust `T` and forward speed `V`:
/// `sqrt(sqrt(T^2 / (4 rho^2 A^2) + V^4 / 4) - V^2 / 2)`.
pub fn induced_velocity(thrust_n: f64, speed_mps: f64, craft: &RotorCraft) -> f64 {
    let rho_a = craft.air_density * craft.disc_area_m2;
    let t_term = thrust_n * thrust_n / (4.0 * rho_a * rho_a);
    let v2 = speed_mps * speed_mps;
    ((t_term + v2 * v2 / 4.0).sqrt() - v2 / 2.0).sqrt()
}

/// Propulsion power in forward flight: blade profile term, induced term,
/// and fuselage drag.
pub fn forward_power_w(craft: &RotorCraft, speed_mps: f64, thrust_n: f64) -> f64 {
    let tip = craft.blade_angular_vel * craft.rotor_radius_m;
    let disc = craft.air_density * craft.solidity * craft.disc_area_m2;
    let omega3_r3 = tip * tip * tip;
    let blade = craft.profile_drag / 8.0
        * disc
        * omega3_r3
        * (1.0 + 3.0 * speed_mps * speed_mps / (tip * tip));
    let induced =
        (1.0 + craft.correction_k) * thrust_n * induced_velocity(thrust_n, speed_mps, craft);
    let fuselage = 0.5 * craft.fuselage_drag_ratio * disc * speed_mps * speed_mps * speed_mps;
    blade + induced + fuselage
}

/// Hover power of a static craft whose rotor thrust carries its weight:
/// `(delta/8) rho s A Omega^3 R^3 + (1+k) W^{3/2} / sqrt(2 rho A)`.
pub fn hover_power_w(craft: &RotorCraft) -> f64 {
    let tip = craft.blade_angular_vel * craft.rotor_radius_m;
    let blade = craft.profile_drag / 8.0
        * craft.air_density
        * craft.solidity
        * craft.disc_area_m2
        * tip
        * tip
        * tip;
    let induced = (1.0 + craft.correction_k) * craft.weight_n.powf(1.5)
        / (2.0 * craft.air_density * craft.disc_area_m2).sqrt();
    blade + induced
}
