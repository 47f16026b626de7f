//! Rate, power, energy-efficiency and payload-feasibility metrics.
//!
//! Surface power model (watts):
//!
//! ```text
//! P_RIS = N * P_sw + N * P_dc + (N / L) * P_A    (active)
//! P_RIS = N * P_sw + N * P_dc                    (passive)
//! ```
//!
//! where `P_sw` is the per-element phase-switch power, `P_dc` the per-element
//! control overhead and `P_A` the per-amplifier consumption.

use crate::error::{Error, Result};
use crate::ris::{RisArchitecture, RisMode};

/// Link direction relative to the gateways.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Ground station to platform to gateway.
    Downlink,
    /// Gateway to platform to ground station.
    Uplink,
}

impl Direction {
    pub fn label(&self) -> &'static str {
        match self {
            Direction::Downlink => "downlink",
            Direction::Uplink => "uplink",
        }
    }
}

/// Per-element and per-amplifier power draws, in watts.
#[derive(Debug, Clone, Copy)]
pub struct RisPowerParams {
    /// Phase-switch power per element.
    pub switch_power_w: f64,
    /// Control-circuit power per element.
    pub control_power_w: f64,
    /// Consumption per power amplifier.
    pub amplifier_power_w: f64,
}

impl Default for RisPowerParams {
    fn default() -> Self {
        Self {
            switch_power_w: 7.8e-3,
            // -5 dBm of control overhead per element.
            control_power_w: crate::units::dbm_to_watt(-5.0),
            amplifier_power_w: 2.0,
        }
    }
}

impl RisPowerParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("switch_power_w", self.switch_power_w),
            ("control_power_w", self.control_power_w),
            ("amplifier_power_w", self.amplifier_power_w),
        ] {
            if !(v >= 0.0) {
                return Err(Error::Config(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Mass and solar-sizing assumptions for the payload check.
#[derive(Debug, Clone, Copy)]
pub struct FeasibilityParams {
    pub element_mass_kg: f64,
    /// Solar constant at stratospheric altitude.
    pub solar_irradiance_w_per_m2: f64,
    /// End-to-end efficiency of the panel and power chain.
    pub solar_efficiency: f64,
}

impl Default for FeasibilityParams {
    fn default() -> Self {
        Self {
            element_mass_kg: 0.010,
            solar_irradiance_w_per_m2: 1360.0,
            solar_efficiency: 0.27,
        }
    }
}

impl FeasibilityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.element_mass_kg > 0.0) {
            return Err(Error::Config(format!(
                "element_mass_kg must be positive, got {}",
                self.element_mass_kg
            )));
        }
        if !(self.solar_irradiance_w_per_m2 > 0.0) {
            return Err(Error::Config(format!(
                "solar_irradiance_w_per_m2 must be positive, got {}",
                self.solar_irradiance_w_per_m2
            )));
        }
        if !(self.solar_efficiency > 0.0 && self.solar_efficiency <= 1.0) {
            return Err(Error::Config(format!(
                "solar_efficiency must lie in (0, 1], got {}",
                self.solar_efficiency
            )));
        }
        Ok(())
    }
}

/// Payload budget of one surface configuration.
#[derive(Debug, Clone, Copy)]
pub struct FeasibilityReport {
    /// Surface aperture, `N * (edge_fraction * lambda)^2`.
    pub aperture_area_m2: f64,
    pub total_mass_kg: f64,
    /// Panel area needed to supply the surface.
    pub solar_area_m2: f64,
    pub ris_power_w: f64,
}

/// One evaluated link in one drop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkMetrics {
    pub gateway_id: usize,
    pub drop_id: usize,
    pub direction: Direction,
    pub snr_db: f64,
    pub rate_bps: f64,
    /// Bits per joule against transmit plus surface power.
    pub energy_efficiency: f64,
}

/// Shannon rate `B * log2(1 + SNR)` in bit/s.
pub fn shannon_rate(snr_linear: f64, bandwidth_hz: f64) -> Result<f64> {
    if !(snr_linear >= 0.0) {
        return Err(Error::Domain(format!(
            "snr must be >= 0, got {snr_linear}"
        )));
    }
    if !(bandwidth_hz > 0.0) {
        return Err(Error::Domain(format!(
            "bandwidth must be positive, got {bandwidth_hz}"
        )));
    }
    Ok(bandwidth_hz * (1.0 + snr_linear).log2())
}

/// Largest possible rate gain from a 1 dB transmit-power increase,
/// `B * log2(10^0.1)`, in Mbit/s. About 33.22 at 100 MHz.
pub fn shannon_slope_bound_mbps_per_db(bandwidth_hz: f64) -> f64 {
    bandwidth_hz * 10f64.powf(0.1).log2() / 1e6
}

/// Total surface consumption for one architecture, in watts.
pub fn ris_power_consumption(arch: &RisArchitecture, params: &RisPowerParams) -> Result<f64> {
    params.validate()?;
    arch.validate()?;
    let n = arch.n_total as f64;
    let base = n * params.switch_power_w + n * params.control_power_w;
    Ok(match arch.mode {
        RisMode::Passive => base,
        RisMode::SubConnectedActive { .. } => {
            base + arch.amplifier_count() as f64 * params.amplifier_power_w
        }
    })
}

/// Bits per joule spent in the transmitter and the surface.
pub fn energy_efficiency(rate_bps: f64, tx_power_w: f64, ris_power_w: f64) -> Result<f64> {
    if !(rate_bps >= 0.0) {
        return Err(Error::Domain(format!("rate must be >= 0, got {rate_bps}")));
    }
    if !(tx_power_w >= 0.0) || !(ris_power_w >= 0.0) {
        return Err(Error::Domain(format!(
            "powers must be >= 0, got tx = {tx_power_w}, ris = {ris_power_w}"
        )));
    }
    let total = tx_power_w + ris_power_w;
    if total == 0.0 {
        return Err(Error::Domain("total power is zero".into()));
    }
    Ok(rate_bps / total)
}

/// Sizing check of the airborne surface: aperture, mass and solar panel.
pub fn feasibility_report(
    arch: &RisArchitecture,
    power: &RisPowerParams,
    feas: &FeasibilityParams,
    frequency_ghz: f64,
) -> Result<FeasibilityReport> {
    feas.validate()?;
    if !(frequency_ghz > 0.0) {
        return Err(Error::Domain(format!(
            "frequency must be positive, got {frequency_ghz}"
        )));
    }
    let lambda_m = 299_792_458.0 / (frequency_ghz * 1e9);
    let cell_edge_m = arch.unit_cell_edge_fraction * lambda_m;
    let n = arch.n_total as f64;
    let ris_power_w = ris_power_consumption(arch, power)?;
    Ok(FeasibilityReport {
        aperture_area_m2: n * cell_edge_m * cell_edge_m,
        total_mass_kg: n * feas.element_mass_kg,
        solar_area_m2: ris_power_w / (feas.solar_irradiance_w_per_m2 * feas.solar_efficiency),
        ris_power_w,
    })
}

/// Empirical CDF over a fixed sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfSummary {
    sorted: Vec<f64>,
}

/// Builds the empirical CDF of a non-empty list of finite values.
pub fn empirical_cdf(values: &[f64]) -> Result<CdfSummary> {
    if values.is_empty() {
        return Err(Error::Domain("empirical CDF of an empty sample".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(
            "empirical CDF requires finite values".into(),
        ));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));
    Ok(CdfSummary { sorted })
}

impl CdfSummary {
    /// `F(x)`: fraction of samples `<= x`.
    pub fn evaluate(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// Smallest sample value `v` with `F(v) >= p`, for `p` in [0, 1].
    pub fn percentile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!(
                "percentile level must lie in [0, 1], got {p}"
            )));
        }
        let n = self.sorted.len();
        let idx = ((p * n as f64).ceil() as isize - 1).clamp(0, n as isize - 1);
        Ok(self.sorted[idx as usize])
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.sorted[0]
    }

    pub fn max(&self) -> f64 {
        self.sorted[self.sorted.len() - 1]
    }
}
