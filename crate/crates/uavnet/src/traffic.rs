//! Service dimensioning: control-channel rate sizing, CSMA/CD derating,
//! Erlang-B call blocking, and the per-second duty weights of each service
//! class.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::ServiceParams;

/// Derived per-service requirements for a given user count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServiceDemands {
    /// Minimum control-channel rate from the latency budget, bps.
    pub c_min_bps: f64,
    /// Required control-channel rate, bps.
    pub c_req_bps: f64,
    /// Aggregate offered call traffic, Erlang.
    pub traffic_load_erlang: f64,
    /// Minimal physical channel count meeting the blocking target.
    pub n_physical_channels: usize,
    /// Real-time RF channel count (ten subframes per RF channel).
    pub k_r: usize,
    /// Fraction of each second a user's control link transmits.
    pub duty_control: f64,
    /// Fraction of each second a user's call link transmits.
    pub duty_realtime: f64,
}

/// Minimum control rate to keep mean latency within `t_req`:
/// `1/T_req + n lambda L`.
pub fn control_rate_min(
    t_req_s: f64,
    n_users: usize,
    lambda_per_s: f64,
    packet_len_bits: f64,
) -> Result<f64> {
    if !(t_req_s > 0.0) || !(lambda_per_s >= 0.0) || !(packet_len_bits >= 0.0) {
        return Err(Error::Domain(format!(
            "control rate needs t_req > 0 and nonnegative traffic, got ({t_req_s}, {lambda_per_s}, {packet_len_bits})"
        )));
    }
    Ok(1.0 / t_req_s + n_users as f64 * lambda_per_s * packet_len_bits)
}

/// Control rate inflated for CSMA/CD contention:
/// `(1 + 3.44 T_prop / T_tran) C_min` with `T_tran = L / C_min`.
pub fn csma_cd_required_rate(c_min_bps: f64, t_prop_s: f64, packet_len_bits: f64) -> Result<f64> {
    if !(c_min_bps > 0.0) || !(t_prop_s >= 0.0) || !(packet_len_bits > 0.0) {
        return Err(Error::Domain(format!(
            "CSMA/CD rate needs positive C_min and L, got ({c_min_bps}, {t_prop_s}, {packet_len_bits})"
        )));
    }
    let t_tran = packet_len_bits / c_min_bps;
    Ok((1.0 + 3.44 * t_prop_s / t_tran) * c_min_bps)
}

/// Erlang-B blocking probability via the stable recursion
/// `B(0) = 1, B(k) = A B(k-1) / (k + A B(k-1))`.
pub fn erlang_b(traffic_erlang: f64, n_channels: usize) -> Result<f64> {
    if !(traffic_erlang >= 0.0) || !traffic_erlang.is_finite() {
        return Err(Error::Domain(format!(
            "traffic load must be nonnegative, got {traffic_erlang}"
        )));
    }
    let mut b = 1.0;
    for k in 1..=n_channels {
        b = traffic_erlang * b / (k as f64 + traffic_erlang * b);
    }
    Ok(b)
}

/// Aggregate offered traffic of `n` users each placing `Q` calls of `T`
/// minutes per window of `t` minutes: `n Q T / t` Erlang.
pub fn traffic_load(
    q_calls: f64,
    t_duration_min: f64,
    unit_time_min: f64,
    n_users: usize,
) -> Result<f64> {
    if !(q_calls >= 0.0) || !(t_duration_min >= 0.0) || !(unit_time_min > 0.0) {
        return Err(Error::Domain(format!(
            "traffic load needs nonnegative Q, T and positive t, got ({q_calls}, {t_duration_min}, {unit_time_min})"
        )));
    }
    Ok(n_users as f64 * q_calls * t_duration_min / unit_time_min)
}

/// Smallest channel count whose blocking probability meets the target.
pub fn min_channels(traffic_erlang: f64, max_block_prob: f64) -> Result<usize> {
    if !(max_block_prob > 0.0 && max_block_prob < 1.0) {
        return Err(Error::Domain(format!(
            "blocking target must lie in (0, 1), got {max_block_prob}"
        )));
    }
    if !(traffic_erlang >= 0.0) || !traffic_erlang.is_finite() {
        return Err(Error::Domain(format!(
            "traffic load must be nonnegative, got {traffic_erlang}"
        )));
    }
    if traffic_erlang == 0.0 {
        return Ok(0);
    }
    let mut b = 1.0;
    let mut n = 0usize;
    while b > max_block_prob {
        n += 1;
        b = traffic_erlang * b / (n as f64 + traffic_erlang * b);
    }
    Ok(n)
}

/// Per-second transmit duty factors: control links send `L lambda / C_c`
/// of the time, call links `T Q / t`. Non-real-time links are continuous
/// (duty 1) and need no weight here.
pub fn service_energy_weights(service: &ServiceParams, c_c_bps: f64) -> Result<(f64, f64)> {
    if !(c_c_bps > 0.0) {
        return Err(Error::Domain(format!(
            "control rate must be positive, got {c_c_bps}"
        )));
    }
    let control = service.packet_len_bits * service.lambda_per_s / c_c_bps;
    let realtime = service.call_rate_per_hour * service.call_duration_min / service.unit_time_min;
    Ok((control, realtime))
}

/// Sizes every service class for `n` users under the given parameters.
///
/// The control requirement uses the latency bound directly; the CSMA/CD
/// correction is available separately and adds well under one percent at
/// these propagation delays.
pub fn derive_demands(service: &ServiceParams, n_users: usize) -> Result<ServiceDemands> {
    if n_users == 0 {
        return Err(Error::EmptyScenario);
    }
    let c_min = control_rate_min(
        service.t_req_s,
        n_users,
        service.lambda_per_s,
        service.packet_len_bits,
    )?;
    let c_req = c_min;
    let load = traffic_load(
        service.call_rate_per_hour,
        service.call_duration_min,
        service.unit_time_min,
        n_users,
    )?;
    let n_phys = min_channels(load, service.max_block_prob)?;
    let k_r = n_phys.div_ceil(10).max(1);
    let (duty_control, duty_realtime) = service_energy_weights(service, c_req)?;
    Ok(ServiceDemands {
        c_min_bps: c_min,
        c_req_bps: c_req,
        traffic_load_erlang: load,
        n_physical_channels: n_phys,
        k_r,
        duty_control,
        duty_realtime,
    })
}
