//! Reflecting-surface model: passive and sub-connected active architectures.
//!
//! In the sub-connected active architecture the surface is partitioned into
//! groups of `L` elements, each group sharing one power amplifier, so an
//! `N`-element surface needs `N/L` amplifiers. Every amplifier runs at its
//! output budget, which fixes a common amplification factor `rho`; active
//! elements also re-radiate amplifier noise (the dynamic noise term).
//!
//! With per-element hop gains `g1` (transmitter to surface) and `g2`
//! (surface to receiver), ideal phase alignment gives
//!
//! ```text
//! SNR = P_t * rho^2 * N^2 * g1 * g2
//!       -----------------------------------------
//!       rho^2 * N * g2 * sigma_v^2  +  sigma_rx^2
//! ```
//!
//! The passive architecture is the special case `rho = 1`, `sigma_v^2 = 0`.

use crate::channel::HopGain;
use crate::error::{Error, Result};
use crate::units::db_to_linear;

/// Surface operating mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RisMode {
    Passive,
    /// One amplifier per group of `group_size` elements.
    SubConnectedActive { group_size: usize },
}

/// Static description of one surface configuration.
#[derive(Debug, Clone, Copy)]
pub struct RisArchitecture {
    pub mode: RisMode,
    /// Total number of unit cells.
    pub n_total: usize,
    /// Output power budget per amplifier, in watts.
    pub pa_output_power_w: f64,
    /// Lower clamp on the amplification factor; 1 means no attenuation.
    pub amp_gain_floor: f64,
    /// Upper clamp on the amplification factor; infinity disables it.
    pub amp_gain_cap: f64,
    /// Noise figure of the active elements.
    pub ris_noise_figure_db: f64,
    /// Per-element gain, applied once per hop.
    pub element_gain_dbi: f64,
    /// Unit-cell edge as a fraction of the wavelength.
    pub unit_cell_edge_fraction: f64,
}

/// Per-element gain of a square aperture with the given edge fraction:
/// `10*log10(4*pi*f^2)`. At f = 0.2 this is about -3.0 dBi.
pub fn aperture_element_gain_dbi(edge_fraction: f64) -> f64 {
    10.0 * (4.0 * std::f64::consts::PI * edge_fraction * edge_fraction).log10()
}

impl RisArchitecture {
    /// Passive surface with default cell geometry.
    pub fn passive(n_total: usize) -> Self {
        Self {
            mode: RisMode::Passive,
            n_total,
            pa_output_power_w: 2.0,
            amp_gain_floor: 1.0,
            amp_gain_cap: f64::INFINITY,
            ris_noise_figure_db: 5.0,
            element_gain_dbi: aperture_element_gain_dbi(0.2),
            unit_cell_edge_fraction: 0.2,
        }
    }

    /// Sub-connected active surface with groups of `group_size` elements.
    pub fn sub_connected(n_total: usize, group_size: usize) -> Self {
        Self {
            mode: RisMode::SubConnectedActive { group_size },
            ..Self::passive(n_total)
        }
    }

    pub fn group_size(&self) -> Option<usize> {
        match self.mode {
            RisMode::Passive => None,
            RisMode::SubConnectedActive { group_size } => Some(group_size),
        }
    }

    /// Number of power amplifiers: `N / L` when active, 0 when passive.
    pub fn amplifier_count(&self) -> usize {
        match self.mode {
            RisMode::Passive => 0,
            RisMode::SubConnectedActive { group_size } => self.n_total / group_size,
        }
    }

    /// Short label used in tables and CSV output, e.g. `passive` or `L500`.
    pub fn label(&self) -> String {
        match self.mode {
            RisMode::Passive => "passive".to_string(),
            RisMode::SubConnectedActive { group_size } => format!("L{group_size}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_total == 0 {
            return Err(Error::Config("n_total must be at least 1".into()));
        }
        if let RisMode::SubConnectedActive { group_size } = self.mode {
            if group_size == 0 || group_size > self.n_total {
                return Err(Error::Config(format!(
                    "group size {} must lie in 1..={}",
                    group_size, self.n_total
                )));
            }
            if self.n_total % group_size != 0 {
                return Err(Error::Config(format!(
                    "group size {} does not divide n_total {}",
                    group_size, self.n_total
                )));
            }
            if !(self.pa_output_power_w > 0.0) {
                return Err(Error::Config(format!(
                    "pa_output_power_w must be positive, got {}",
                    self.pa_output_power_w
                )));
            }
        }
        if !(self.amp_gain_floor >= 1.0) {
            return Err(Error::Config(format!(
                "amp_gain_floor must be >= 1, got {}",
                self.amp_gain_floor
            )));
        }
        if !(self.amp_gain_cap >= self.amp_gain_floor) {
            return Err(Error::Config(format!(
                "amp_gain_cap {} must be >= amp_gain_floor {}",
                self.amp_gain_cap, self.amp_gain_floor
            )));
        }
        if !(self.ris_noise_figure_db >= 0.0) {
            return Err(Error::Config(format!(
                "ris_noise_figure_db must be >= 0, got {}",
                self.ris_noise_figure_db
            )));
        }
        if !(self.unit_cell_edge_fraction > 0.0 && self.unit_cell_edge_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "unit_cell_edge_fraction must lie in (0, 1], got {}",
                self.unit_cell_edge_fraction
            )));
        }
        Ok(())
    }
}

/// Two-hop cascade through the surface, per element.
#[derive(Debug, Clone, Copy)]
pub struct CascadeLink {
    /// Transmitter to surface.
    pub hop1: HopGain,
    /// Surface to receiver.
    pub hop2: HopGain,
}

/// Operating point of the shared amplifiers for one link realization.
#[derive(Debug, Clone, Copy)]
pub struct AmplifierState {
    /// Common amplitude amplification factor, >= 1.
    pub rho: f64,
    /// Signal power entering one element, in watts.
    pub input_power_per_element_w: f64,
    /// Noise power injected per active element (`sigma_v^2`), in watts.
    pub dynamic_noise_power_w: f64,
}

impl AmplifierState {
    /// Passive operating point: unit gain, no injected noise.
    pub fn passive(input_power_per_element_w: f64) -> Self {
        Self {
            rho: 1.0,
            input_power_per_element_w,
            dynamic_noise_power_w: 0.0,
        }
    }
}

/// Computes the common amplification factor from the per-amplifier output
/// budget:
///
/// `rho = sqrt(P_A / (L * (P_t * g1 + sigma_v^2)))`, clamped to the
/// architecture's floor and cap. `sigma_v^2` is the thermal noise power
/// scaled by the surface noise figure.
///
/// Only meaningful for the active mode; passive surfaces have no amplifiers.
pub fn amplification_factor(
    arch: &RisArchitecture,
    tx_power_w: f64,
    hop1: &HopGain,
    thermal_noise_w: f64,
) -> Result<AmplifierState> {
    let RisMode::SubConnectedActive { group_size } = arch.mode else {
        return Err(Error::Contract(
            "amplification_factor called on a passive architecture".into(),
        ));
    };
    if !(tx_power_w > 0.0) {
        return Err(Error::Domain(format!(
            "tx_power_w must be positive, got {tx_power_w}"
        )));
    }
    if !(thermal_noise_w >= 0.0) {
        return Err(Error::Domain(format!(
            "thermal_noise_w must be >= 0, got {thermal_noise_w}"
        )));
    }
    if !(hop1.power_gain_linear > 0.0) {
        return Err(Error::Domain(format!(
            "hop1 gain must be positive, got {}",
            hop1.power_gain_linear
        )));
    }
    let input_power_per_element_w = tx_power_w * hop1.power_gain_linear;
    let dynamic_noise_power_w = thermal_noise_w * db_to_linear(arch.ris_noise_figure_db);
    let unclamped = (arch.pa_output_power_w
        / (group_size as f64 * (input_power_per_element_w + dynamic_noise_power_w)))
        .sqrt();
    Ok(AmplifierState {
        rho: unclamped.clamp(arch.amp_gain_floor, arch.amp_gain_cap),
        input_power_per_element_w,
        dynamic_noise_power_w,
    })
}

/// End-to-end SNR of the two-hop cascade under ideal per-element phase
/// alignment.
///
/// Active architectures derive their amplifier state internally from the
/// output budget; passive architectures use `rho = 1` and inject no noise.
pub fn end_to_end_snr(
    link: &CascadeLink,
    arch: &RisArchitecture,
    tx_power_w: f64,
    thermal_noise_w: f64,
    receiver_noise_w: f64,
) -> Result<f64> {
    if !(tx_power_w > 0.0) {
        return Err(Error::Domain(format!(
            "tx_power_w must be positive, got {tx_power_w}"
        )));
    }
    if !(receiver_noise_w > 0.0) {
        return Err(Error::Domain(format!(
            "receiver_noise_w must be positive, got {receiver_noise_w}"
        )));
    }
    let g1 = link.hop1.power_gain_linear;
    let g2 = link.hop2.power_gain_linear;
    if !(g1 > 0.0) || !(g2 > 0.0) {
        return Err(Error::Domain(format!(
            "hop gains must be positive, got g1 = {g1}, g2 = {g2}"
        )));
    }
    let amp = match arch.mode {
        RisMode::Passive => AmplifierState::passive(tx_power_w * g1),
        RisMode::SubConnectedActive { .. } => {
            amplification_factor(arch, tx_power_w, &link.hop1, thermal_noise_w)?
        }
    };
    let n = arch.n_total as f64;
    let rho2 = amp.rho * amp.rho;
    let signal = tx_power_w * rho2 * n * n * g1 * g2;
    let noise = rho2 * n * g2 * amp.dynamic_noise_power_w + receiver_noise_w;
    Ok(signal / noise)
}

/// Brute-force SNR over explicit per-element amplitude lists, used as an
/// independent check of [`end_to_end_snr`].
///
/// Elements are grouped contiguously: element `n` belongs to group
/// `n / (h1.len() / rhos.len())` and uses that group's amplification factor.
///
/// ```text
/// SNR = tx * (sum_g rho_g * sum_{n in g} |h1_n| |h2_n|)^2
///       ------------------------------------------------------------
///       sigma_v^2 * sum_g rho_g^2 * sum_{n in g} |h2_n|^2  +  rx noise
/// ```
pub fn elementwise_oracle_snr(
    h1_amplitudes: &[f64],
    h2_amplitudes: &[f64],
    group_rhos: &[f64],
    tx_power_w: f64,
    dynamic_noise_w: f64,
    receiver_noise_w: f64,
) -> Result<f64> {
    let n = h1_amplitudes.len();
    if n == 0 || group_rhos.is_empty() {
        return Err(Error::Contract("oracle inputs must be non-empty".into()));
    }
    if h2_amplitudes.len() != n {
        return Err(Error::Contract(format!(
            "amplitude lists differ in length: {} vs {}",
            n,
            h2_amplitudes.len()
        )));
    }
    if n % group_rhos.len() != 0 {
        return Err(Error::Contract(format!(
            "{} groups do not evenly partition {} elements",
            group_rhos.len(),
            n
        )));
    }
    if !(tx_power_w > 0.0) || !(receiver_noise_w > 0.0) || !(dynamic_noise_w >= 0.0) {
        return Err(Error::Domain(
            "powers must be positive (noise may be zero)".into(),
        ));
    }
    let group_size = n / group_rhos.len();
    let mut coherent_sum = 0.0;
    let mut noise_sum = 0.0;
    for (g, &rho) in group_rhos.iter().enumerate() {
        let mut signal_g = 0.0;
        let mut noise_g = 0.0;
        for e in g * group_size..(g + 1) * group_size {
            signal_g += h1_amplitudes[e].abs() * h2_amplitudes[e].abs();
            noise_g += h2_amplitudes[e] * h2_amplitudes[e];
        }
        coherent_sum += rho * signal_g;
        noise_sum += rho * rho * noise_g;
    }
    let signal = tx_power_w * coherent_sum * coherent_sum;
    let noise = dynamic_noise_w * noise_sum + receiver_noise_w;
    Ok(signal / noise)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hop(linear: f64) -> HopGain {
        HopGain {
            power_gain_db: 10.0 * linear.log10(),
            power_gain_linear: linear,
        }
    }

    #[test]
    fn aperture_gain_near_minus_3_dbi() {
        assert!((aperture_element_gain_dbi(0.2) - -2.9873).abs() < 1e-3);
    }

    #[test]
    fn amplifier_counts() {
        assert_eq!(RisArchitecture::sub_connected(30_000, 2000).amplifier_count(), 15);
        assert_eq!(RisArchitecture::sub_connected(30_000, 500).amplifier_count(), 60);
        assert_eq!(RisArchitecture::passive(30_000).amplifier_count(), 0);
    }

    #[test]
    fn amplification_factor_reference_point() {
        // P_A = 2 W shared by 500 elements at 4e-12 W input each.
        let mut arch = RisArchitecture::sub_connected(30_000, 500);
        arch.ris_noise_figure_db = 0.0;
        let state = amplification_factor(&arch, 1.0, &hop(4e-12), 0.0).unwrap();
        let expected = (2.0f64 / (500.0 * 4e-12)).sqrt();
        assert!((state.rho - expected).abs() / expected < 1e-12);
        assert!((state.rho - 31_622.776).abs() < 1e-3);
        assert_eq!(state.dynamic_noise_power_w, 0.0);
    }

    #[test]
    fn amplification_factor_includes_dynamic_noise() {
        let arch = RisArchitecture::sub_connected(1000, 500);
        // noise figure 5 dB on 4e-13 W thermal noise
        let state = amplification_factor(&arch, 1.0, &hop(1e-12), 4e-13).unwrap();
        let sigma_v2 = 4e-13 * db_to_linear(5.0);
        assert!((state.dynamic_noise_power_w - sigma_v2).abs() / sigma_v2 < 1e-12);
        let expected = (2.0 / (500.0 * (1e-12 + sigma_v2))).sqrt();
        assert!((state.rho - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn amplification_factor_floor_clamp() {
        // Strong input drives the unclamped factor below 1.
        let arch = RisArchitecture::sub_connected(1000, 500);
        let state = amplification_factor(&arch, 1.0, &hop(1.0), 0.0).unwrap();
        assert_eq!(state.rho, 1.0);
    }

    #[test]
    fn amplification_factor_unity_budget() {
        // L = 1 and input + noise exactly equal to the budget: rho = 1.
        let mut arch = RisArchitecture::sub_connected(64, 1);
        arch.ris_noise_figure_db = 0.0;
        let state = amplification_factor(&arch, 1.0, &hop(1.5), 0.5).unwrap();
        assert_eq!(state.rho, 1.0);
    }

    #[test]
    fn amplification_factor_cap_clamp() {
        let mut arch = RisArchitecture::sub_connected(1000, 500);
        arch.amp_gain_cap = 100.0;
        let state = amplification_factor(&arch, 1.0, &hop(4e-12), 0.0).unwrap();
        assert_eq!(state.rho, 100.0);
    }

    #[test]
    fn amplification_factor_rejects_passive() {
        let arch = RisArchitecture::passive(1000);
        assert!(matches!(
            amplification_factor(&arch, 1.0, &hop(1e-12), 0.0),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn passive_snr_reference_point() {
        let arch = RisArchitecture::passive(1000);
        let link = CascadeLink {
            hop1: hop(1e-10),
            hop2: hop(1e-10),
        };
        let snr = end_to_end_snr(&link, &arch, 1.0, 4e-13, 4e-13).unwrap();
        assert!((snr - 0.025).abs() / 0.025 < 1e-12);
    }

    #[test]
    fn single_element_passive_matches_hand_formula() {
        let arch = RisArchitecture::passive(1);
        let link = CascadeLink {
            hop1: hop(2e-9),
            hop2: hop(5e-11),
        };
        let snr = end_to_end_snr(&link, &arch, 3.0, 4e-13, 1e-12).unwrap();
        assert!((snr - 3.0 * 2e-9 * 5e-11 / 1e-12).abs() / snr < 1e-12);
    }

    #[test]
    fn passive_injects_no_dynamic_noise() {
        // Passive SNR must be insensitive to the surface noise figure.
        let mut arch = RisArchitecture::passive(1000);
        let link = CascadeLink {
            hop1: hop(1e-10),
            hop2: hop(1e-10),
        };
        let a = end_to_end_snr(&link, &arch, 1.0, 4e-13, 4e-13).unwrap();
        arch.ris_noise_figure_db = 30.0;
        let b = end_to_end_snr(&link, &arch, 1.0, 4e-13, 4e-13).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn snr_scales_with_n_squared_in_passive_mode() {
        let link = CascadeLink {
            hop1: hop(1e-11),
            hop2: hop(1e-12),
        };
        let snr_n = end_to_end_snr(&link, &RisArchitecture::passive(500), 1.0, 4e-13, 4e-13).unwrap();
        let snr_2n =
            end_to_end_snr(&link, &RisArchitecture::passive(1000), 1.0, 4e-13, 4e-13).unwrap();
        assert!((snr_2n / snr_n - 4.0).abs() < 1e-12);
    }

    #[test]
    fn passive_snr_scales_with_gain_product() {
        let arch = RisArchitecture::passive(100);
        let base = end_to_end_snr(
            &CascadeLink {
                hop1: hop(1e-10),
                hop2: hop(1e-12),
            },
            &arch,
            1.0,
            4e-13,
            4e-13,
        )
        .unwrap();
        let scaled = end_to_end_snr(
            &CascadeLink {
                hop1: hop(3e-10),
                hop2: hop(2e-12),
            },
            &arch,
            1.0,
            4e-13,
            4e-13,
        )
        .unwrap();
        assert!((scaled / base - 6.0).abs() < 1e-9);
    }

    #[test]
    fn grouping_monotonicity_at_system_scale() {
        // Deployment-scale magnitudes: finer grouping (smaller L, more
        // amplifiers) never loses, and every active option beats passive.
        let link = CascadeLink {
            hop1: hop(2.3e-9),
            hop2: hop(5e-14),
        };
        let thermal = 4e-13;
        let snr_for = |arch: RisArchitecture| {
            end_to_end_snr(&link, &arch, 6.3, thermal, 4e-13).unwrap()
        };
        let passive = snr_for(RisArchitecture::passive(30_000));
        let l2000 = snr_for(RisArchitecture::sub_connected(30_000, 2000));
        let l1000 = snr_for(RisArchitecture::sub_connected(30_000, 1000));
        let l500 = snr_for(RisArchitecture::sub_connected(30_000, 500));
        assert!(l500 >= l1000 && l1000 >= l2000 && l2000 >= passive);
        assert!(l500 > passive * 100.0, "active gain should be substantial");
    }

    #[test]
    fn snr_increases_with_tx_power_despite_rho_recomputation() {
        let link = CascadeLink {
            hop1: hop(2.3e-9),
            hop2: hop(5e-14),
        };
        let arch = RisArchitecture::sub_connected(30_000, 500);
        let mut prev = 0.0;
        for dbm in 30..=60 {
            let tx = crate::units::dbm_to_watt(dbm as f64);
            let snr = end_to_end_snr(&link, &arch, tx, 4e-13, 4e-13).unwrap();
            assert!(snr > prev, "SNR not increasing at {dbm} dBm");
            prev = snr;
        }
    }

    #[test]
    fn active_snr_respects_dynamic_noise_ceiling() {
        // As rho grows the SNR approaches tx * N * g1 / sigma_v^2.
        let mut arch = RisArchitecture::sub_connected(1000, 500);
        arch.pa_output_power_w = 1e9;
        let link = CascadeLink {
            hop1: hop(1e-12),
            hop2: hop(1e-10),
        };
        let thermal = 4e-13;
        let sigma_v2 = thermal * db_to_linear(arch.ris_noise_figure_db);
        let ceiling = 1.0 * 1000.0 * 1e-12 / sigma_v2;
        let snr = end_to_end_snr(&link, &arch, 1.0, thermal, 4e-13).unwrap();
        assert!(snr <= ceiling);
        assert!(snr > 0.99 * ceiling, "snr {snr} should approach {ceiling}");
    }

    #[test]
    fn oracle_matches_closed_form_on_uniform_amplitudes() {
        let n = 1000;
        let l = 500;
        let g1: f64 = 3e-11;
        let g2: f64 = 7e-13;
        let tx = 2.0;
        let thermal = 4e-13;
        let arch = RisArchitecture::sub_connected(n, l);
        let state = amplification_factor(&arch, tx, &hop(g1), thermal).unwrap();
        let link = CascadeLink {
            hop1: hop(g1),
            hop2: hop(g2),
        };
        let closed = end_to_end_snr(&link, &arch, tx, thermal, 4e-13).unwrap();
        let h1 = vec![g1.sqrt(); n];
        let h2 = vec![g2.sqrt(); n];
        let rhos = vec![state.rho; n / l];
        let oracle = elementwise_oracle_snr(
            &h1,
            &h2,
            &rhos,
            tx,
            state.dynamic_noise_power_w,
            4e-13,
        )
        .unwrap();
        assert!((oracle - closed).abs() / closed < 1e-12);
    }

    #[test]
    fn oracle_single_element_identity() {
        let snr = elementwise_oracle_snr(&[2e-5], &[3e-7], &[5.0], 1.0, 1e-13, 4e-13).unwrap();
        let expected = (5.0f64 * 2e-5 * 3e-7).powi(2) / (1e-13 * 25.0 * 9e-14 + 4e-13);
        assert!((snr - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn oracle_rejects_malformed_inputs() {
        assert!(elementwise_oracle_snr(&[], &[], &[1.0], 1.0, 0.0, 1e-13).is_err());
        assert!(elementwise_oracle_snr(&[1.0], &[1.0, 2.0], &[1.0], 1.0, 0.0, 1e-13).is_err());
        // 3 groups cannot partition 4 elements.
        assert!(elementwise_oracle_snr(
            &[1.0; 4],
            &[1.0; 4],
            &[1.0; 3],
            1.0,
            0.0,
            1e-13
        )
        .is_err());
    }

    #[test]
    fn architecture_validation() {
        assert!(RisArchitecture::passive(30_000).validate().is_ok());
        assert!(RisArchitecture::sub_connected(30_000, 500).validate().is_ok());
        // 700 does not divide 30000.
        assert!(RisArchitecture::sub_connected(30_000, 700).validate().is_err());
        assert!(RisArchitecture::sub_connected(30_000, 0).validate().is_err());
        assert!(RisArchitecture::passive(0).validate().is_err());
        let mut arch = RisArchitecture::passive(100);
        arch.amp_gain_floor = 0.5;
        assert!(arch.validate().is_err());
    }
}
