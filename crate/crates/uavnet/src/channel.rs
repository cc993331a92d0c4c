//! Air-to-ground channel model: free-space path loss, line-of-sight
//! probability, expected link gain, and the transmit power needed to carry
//! a rate over a bandwidth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{Environment, UavPlacement, User};

/// Speed of light, m/s. Prose often rounds to 3e8; the difference is under
/// 0.01 dB of path loss.
pub const SPEED_OF_LIGHT_M_S: f64 = 2.997_924_58e8;

/// Budget of a single user-to-UAV link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub user_id: usize,
    pub uav_index: usize,
    /// Slant distance, meters.
    pub distance_3d_m: f64,
    /// Horizontal distance, meters.
    pub distance_h_m: f64,
    pub p_los: f64,
    /// Expected channel gain in linear units.
    pub gain_linear: f64,
    /// `10 log10(gain_linear)`.
    pub gain_db: f64,
}

/// Free-space path loss in dB: `20log10(d) + 20log10(fc) + 20log10(4 pi / c)`.
pub fn free_space_path_loss_db(d_m: f64, fc_hz: f64) -> Result<f64> {
    if !(d_m > 0.0) || !(fc_hz > 0.0) {
        return Err(Error::Domain(format!(
            "path loss needs positive distance and frequency, got d={d_m}, fc={fc_hz}"
        )));
    }
    Ok(20.0 * d_m.log10()
        + 20.0 * fc_hz.log10()
        + 20.0 * (4.0 * std::f64::consts::PI / SPEED_OF_LIGHT_M_S).log10())
}

/// Line-of-sight probability of the sigmoid elevation-angle model:
/// `1 / (1 + a exp(-b (theta_deg - a)))` with `theta = atan(h / d_H)`.
///
/// A user directly below the UAV (`d_H = 0`) sees a 90 degree elevation.
pub fn p_los(h_m: f64, d_h_m: f64, env: &Environment) -> Result<f64> {
    if !(h_m > 0.0) || !(d_h_m >= 0.0) {
        return Err(Error::Domain(format!(
            "p_los needs h > 0 and d_H >= 0, got h={h_m}, d_H={d_h_m}"
        )));
    }
    let theta_deg = (h_m / d_h_m).atan().to_degrees();
    Ok(1.0 / (1.0 + env.a * (-env.b * (theta_deg - env.a)).exp()))
}

/// Expected link gain between a user and a UAV.
///
/// Each branch's loss (path loss plus excess loss) converts to linear gain
/// first; the LoS probability mixes the branches in the linear domain, so
/// the result is an expected received-power ratio. The dB field reports
/// `10 log10` of that expectation.
pub fn expected_gain(
    user: &User,
    uav: &UavPlacement,
    uav_index: usize,
    env: &Environment,
    fc_hz: f64,
) -> Result<LinkBudget> {
    let d_h = uav.horizontal_distance_to(user.x_m, user.y_m);
    let d = d_h.hypot(uav.altitude_m);
    let fspl = free_space_path_loss_db(d, fc_hz)?;
    let p = p_los(uav.altitude_m, d_h, env)?;
    let g_los = 10f64.powf(-(fspl + env.eta_los_db) / 10.0);
    let g_nlos = 10f64.powf(-(fspl + env.eta_nlos_db) / 10.0);
    let gain_linear = p * g_los + (1.0 - p) * g_nlos;
    Ok(LinkBudget {
        user_id: user.id,
        uav_index,
        distance_3d_m: d,
        distance_h_m: d_h,
        p_los: p,
        gain_linear,
        gain_db: 10.0 * gain_linear.log10(),
    })
}

/// Transmit power (W) for rate `C` over bandwidth `b` at expected gain `g`:
/// `(2^(C/b) - 1) N0 b / g`.
pub fn required_power_w(
    rate_bps: f64,
    bandwidth_hz: f64,
    gain_linear: f64,
    n0: f64,
) -> Result<f64> {
    if !(gain_linear > 0.0) || !(n0 > 0.0) || !(rate_bps >= 0.0) {
        return Err(Error::Domain(format!(
            "power needs g > 0, N0 > 0, rate >= 0, got g={gain_linear}, N0={n0}, C={rate_bps}"
        )));
    }
    if !(bandwidth_hz > 0.0) {
        if rate_bps > 0.0 {
            return Err(Error::InfeasibleLink { rate_bps });
        }
        return Ok(0.0);
    }
    Ok(bandwidth_energy_term(rate_bps, bandwidth_hz) * n0 / gain_linear)
}

/// The bandwidth-dependent factor `(2^(C/b) - 1) b` of the link energy.
/// Convex and strictly decreasing in `b` for fixed `C > 0`.
pub fn bandwidth_energy_term(rate_bps: f64, bandwidth_hz: f64) -> f64 {
    ((rate_bps / bandwidth_hz).exp2() - 1.0) * bandwidth_hz
}
