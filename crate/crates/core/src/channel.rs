//! Air-to-ground channel model for the platform links.
//!
//! Each hop (ground node to platform, or platform to ground node) is budgeted
//! as free-space path loss plus an elevation-dependent LoS/NLoS state with
//! log-normal shadowing and a fixed clutter penalty in NLoS. The LoS
//! probability table is piecewise linear in elevation and can be loaded from
//! a plain-text file.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::scenario::LinkGeometry;

/// Free-space reference constant for km/GHz units, 20*log10(4*pi*1e12/c).
pub const FSPL_CONST_DB: f64 = 92.45;

/// Default urban LoS probability vs elevation in 10 degree steps.
///
/// Reconstruction of the urban column of the 3GPP TR 38.811 LoS probability
/// table (Table 6.6.1-1); not a measured dataset. Override via
/// `ChannelParams::los_table` or a table file.
pub const URBAN_LOS_TABLE: [(f64, f64); 9] = [
    (10.0, 0.246),
    (20.0, 0.386),
    (30.0, 0.493),
    (40.0, 0.613),
    (50.0, 0.726),
    (60.0, 0.805),
    (70.0, 0.919),
    (80.0, 0.968),
    (90.0, 0.992),
];

/// Propagation and radio parameters shared by both hops.
#[derive(Debug, Clone)]
pub struct ChannelParams {
    pub frequency_ghz: f64,
    pub bandwidth_hz: f64,
    /// Thermal noise density at the receivers.
    pub noise_density_dbm_per_hz: f64,
    /// LoS probability vs elevation, strictly ascending in elevation.
    pub los_table: Vec<(f64, f64)>,
    pub shadow_sigma_los_db: f64,
    pub shadow_sigma_nlos_db: f64,
    /// Extra loss applied when a hop is NLoS.
    pub clutter_loss_nlos_db: f64,
    /// Flat margin for gaseous absorption and rain; 0 disables it.
    pub atmospheric_margin_db: f64,
    /// Donor ground-station dish gain.
    pub gs_antenna_gain_dbi: f64,
    /// Gateway terminal gain.
    pub gw_antenna_gain_dbi: f64,
    pub receiver_noise_figure_db: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            frequency_ghz: 2.4,
            bandwidth_hz: 1e8,
            noise_density_dbm_per_hz: -174.0,
            los_table: URBAN_LOS_TABLE.to_vec(),
            shadow_sigma_los_db: 4.0,
            shadow_sigma_nlos_db: 6.0,
            clutter_loss_nlos_db: 20.0,
            atmospheric_margin_db: 0.0,
            gs_antenna_gain_dbi: 43.2,
            gw_antenna_gain_dbi: 0.0,
            receiver_noise_figure_db: 0.0,
        }
    }
}

impl ChannelParams {
    /// Thermal noise power over the full bandwidth, in watts.
    pub fn thermal_noise_w(&self) -> f64 {
        crate::units::dbm_to_watt(self.noise_density_dbm_per_hz) * self.bandwidth_hz
    }

    /// Receiver noise power including the receiver noise figure, in watts.
    pub fn receiver_noise_w(&self) -> f64 {
        self.thermal_noise_w() * crate::units::db_to_linear(self.receiver_noise_figure_db)
    }

    /// Carrier wavelength in metres.
    pub fn wavelength_m(&self) -> f64 {
        299_792_458.0 / (self.frequency_ghz * 1e9)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frequency_ghz > 0.0) {
            return Err(Error::Config(format!(
                "frequency_ghz must be positive, got {}",
                self.frequency_ghz
            )));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::Config(format!(
                "bandwidth_hz must be positive, got {}",
                self.bandwidth_hz
            )));
        }
        validate_los_table(&self.los_table)?;
        for (name, v) in [
            ("shadow_sigma_los_db", self.shadow_sigma_los_db),
            ("shadow_sigma_nlos_db", self.shadow_sigma_nlos_db),
            ("clutter_loss_nlos_db", self.clutter_loss_nlos_db),
            ("atmospheric_margin_db", self.atmospheric_margin_db),
        ] {
            if !(v >= 0.0) {
                return Err(Error::Config(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !(self.receiver_noise_figure_db >= 0.0) {
            return Err(Error::Config(format!(
                "receiver_noise_figure_db must be >= 0, got {}",
                self.receiver_noise_figure_db
            )));
        }
        Ok(())
    }
}

/// LoS/NLoS state and shadowing realization of one hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    pub is_los: bool,
    /// Log-normal shadowing draw in dB; positive means extra loss.
    pub shadow_db: f64,
}

/// One hop's power gain in both dB and linear form.
#[derive(Debug, Clone, Copy)]
pub struct HopGain {
    pub power_gain_db: f64,
    pub power_gain_linear: f64,
}

/// Free-space path loss in dB for km/GHz inputs:
/// `92.45 + 20*log10(d_km) + 20*log10(f_ghz)`.
pub fn fspl_db(distance_km: f64, frequency_ghz: f64) -> Result<f64> {
    if !(distance_km > 0.0) {
        return Err(Error::Domain(format!(
            "fspl distance must be positive, got {distance_km} km"
        )));
    }
    if !(frequency_ghz > 0.0) {
        return Err(Error::Domain(format!(
            "fspl frequency must be positive, got {frequency_ghz} GHz"
        )));
    }
    Ok(FSPL_CONST_DB + 20.0 * distance_km.log10() + 20.0 * frequency_ghz.log10())
}

/// Checks that a LoS table is usable: non-empty, strictly ascending
/// elevations, probabilities within [0, 1].
pub fn validate_los_table(table: &[(f64, f64)]) -> Result<()> {
    if table.is_empty() {
        return Err(Error::Config("LoS table is empty".into()));
    }
    for (i, &(elev, p)) in table.iter().enumerate() {
        if !elev.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!(
                "LoS table entry {i} ({elev}, {p}) is out of range"
            )));
        }
        if i > 0 && elev <= table[i - 1].0 {
            return Err(Error::Config(format!(
                "LoS table elevations must be strictly ascending (entry {i}: {elev})"
            )));
        }
    }
    Ok(())
}

/// LoS probability at `elevation_deg`, piecewise linear over `table` and
/// clamped to the first/last entry outside its range.
pub fn los_probability(elevation_deg: f64, table: &[(f64, f64)]) -> Result<f64> {
    validate_los_table(table)?;
    if elevation_deg <= table[0].0 {
        return Ok(table[0].1);
    }
    if elevation_deg >= table[table.len() - 1].0 {
        return Ok(table[table.len() - 1].1);
    }
    let idx = table.partition_point(|&(e, _)| e < elevation_deg);
    let (e0, p0) = table[idx - 1];
    let (e1, p1) = table[idx];
    let t = (elevation_deg - e0) / (e1 - e0);
    Ok(p0 + t * (p1 - p0))
}

/// Draws the LoS state and shadowing for one hop at the given elevation.
pub fn sample_link_state<R: Rng + ?Sized>(
    elevation_deg: f64,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<LinkState> {
    let p_los = los_probability(elevation_deg, &params.los_table)?;
    let is_los = rng.gen_bool(p_los);
    let sigma = if is_los {
        params.shadow_sigma_los_db
    } else {
        params.shadow_sigma_nlos_db
    };
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::Config(format!("invalid shadow sigma {sigma}: {e}")))?;
    Ok(LinkState {
        is_los,
        shadow_db: normal.sample(rng),
    })
}

/// Power gain of one hop between an endpoint antenna and a single RIS
/// element:
///
/// `-FSPL + G_endpoint + G_element - margin - clutter(NLoS) - shadow`.
pub fn hop_power_gain(
    geometry: &LinkGeometry,
    state: &LinkState,
    endpoint_antenna_gain_dbi: f64,
    element_gain_dbi: f64,
    params: &ChannelParams,
) -> Result<HopGain> {
    let fspl = fspl_db(geometry.slant_km, params.frequency_ghz)?;
    let clutter = if state.is_los {
        0.0
    } else {
        params.clutter_loss_nlos_db
    };
    let power_gain_db = -fspl + endpoint_antenna_gain_dbi + element_gain_dbi
        - params.atmospheric_margin_db
        - clutter
        - state.shadow_db;
    Ok(HopGain {
        power_gain_db,
        power_gain_linear: crate::units::db_to_linear(power_gain_db),
    })
}

/// Parses a two-column LoS table: `elevation_deg probability` per line,
/// blank lines and `#` comments allowed.
pub fn parse_los_table(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut table = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split_whitespace();
        let (Some(e), Some(p), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(Error::Config(format!(
                "LoS table line {}: expected two columns, got {:?}",
                lineno + 1,
                line
            )));
        };
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| {
                Error::Config(format!(
                    "LoS table line {}: cannot parse {:?} as a number",
                    lineno + 1,
                    s
                ))
            })
        };
        table.push((parse(e)?, parse(p)?));
    }
    validate_los_table(&table)?;
    Ok(table)
}

/// Loads a LoS table file via [`parse_los_table`].
pub fn load_los_table(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_los_table(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{link_geometry, Position3D};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fspl_reference_constant_matches_theory() {
        // 20*log10(4*pi*1e12 / c) rounded to the conventional 92.45.
        let exact = 20.0 * (4.0 * std::f64::consts::PI * 1e12 / 299_792_458.0).log10();
        assert!((FSPL_CONST_DB - exact).abs() < 0.01);
    }

    #[test]
    fn fspl_reference_points() {
        assert!((fspl_db(20.0, 2.4).unwrap() - 126.075).abs() < 1e-3);
        assert!((fspl_db(1.0, 1.0).unwrap() - 92.45).abs() < 1e-12);
        assert!((fspl_db(53.852, 2.4).unwrap() - 134.68).abs() < 1e-2);
    }

    #[test]
    fn fspl_grows_with_distance_and_frequency() {
        let base = fspl_db(10.0, 2.0).unwrap();
        assert!(fspl_db(20.0, 2.0).unwrap() > base);
        assert!(fspl_db(10.0, 4.0).unwrap() > base);
        // Doubling either argument adds exactly 20*log10(2) dB.
        assert!((fspl_db(20.0, 2.0).unwrap() - base - 6.0206).abs() < 1e-3);
    }

    #[test]
    fn fspl_rejects_non_positive_inputs() {
        assert!(fspl_db(0.0, 2.4).is_err());
        assert!(fspl_db(-5.0, 2.4).is_err());
        assert!(fspl_db(10.0, 0.0).is_err());
    }

    #[test]
    fn los_probability_interpolates_and_clamps() {
        let table = [(10.0, 0.25), (90.0, 1.0)];
        assert!((los_probability(50.0, &table).unwrap() - 0.625).abs() < 1e-12);
        assert!((los_probability(90.0, &table).unwrap() - 1.0).abs() < 1e-12);
        // Below the first entry the table clamps.
        assert!((los_probability(5.0, &table).unwrap() - 0.25).abs() < 1e-12);
        assert!((los_probability(120.0, &table).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn los_probability_is_monotone_over_default_table() {
        let mut prev = 0.0;
        for e in 0..=90 {
            let p = los_probability(e as f64, &URBAN_LOS_TABLE).unwrap();
            assert!(p >= prev, "p_los dropped at {e} deg");
            prev = p;
        }
    }

    #[test]
    fn bad_los_tables_are_rejected() {
        assert!(los_probability(50.0, &[]).is_err());
        assert!(validate_los_table(&[(10.0, 0.5), (10.0, 0.6)]).is_err());
        assert!(validate_los_table(&[(10.0, 1.5)]).is_err());
    }

    #[test]
    fn hop_gain_reference_budget() {
        // 20 km LoS hop, donor dish 43.2 dBi, element -3 dBi, no margin.
        let geom = link_geometry(
            Position3D::new(0.0, 0.0, 0.0),
            Position3D::new(0.0, 0.0, 20.0),
        )
        .unwrap();
        let state = LinkState {
            is_los: true,
            shadow_db: 0.0,
        };
        let params = ChannelParams::default();
        let hop = hop_power_gain(&geom, &state, 43.2, -3.0, &params).unwrap();
        assert!((hop.power_gain_db - -85.87).abs() < 1e-2);
        assert!(
            (hop.power_gain_linear - crate::units::db_to_linear(hop.power_gain_db)).abs()
                / hop.power_gain_linear
                < 1e-9
        );
    }

    #[test]
    fn nlos_hop_is_clutter_loss_below_los() {
        let geom = link_geometry(
            Position3D::new(30.0, 0.0, 0.0),
            Position3D::new(0.0, 0.0, 20.0),
        )
        .unwrap();
        let params = ChannelParams::default();
        let los = hop_power_gain(
            &geom,
            &LinkState {
                is_los: true,
                shadow_db: 1.5,
            },
            0.0,
            -3.0,
            &params,
        )
        .unwrap();
        let nlos = hop_power_gain(
            &geom,
            &LinkState {
                is_los: false,
                shadow_db: 1.5,
            },
            0.0,
            -3.0,
            &params,
        )
        .unwrap();
        assert!((los.power_gain_db - nlos.power_gain_db - params.clutter_loss_nlos_db).abs() < 1e-12);
    }

    #[test]
    fn link_state_sampling_follows_the_table() {
        // Empirical LoS frequency within 3 standard errors over 1e5 draws.
        let params = ChannelParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for elev in [15.0, 35.0, 55.0, 75.0, 90.0] {
            let p = los_probability(elev, &params.los_table).unwrap();
            let n = 100_000;
            let hits = (0..n)
                .filter(|_| sample_link_state(elev, &params, &mut rng).unwrap().is_los)
                .count();
            let freq = hits as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!(
                (freq - p).abs() <= 3.0 * se,
                "elev {elev}: freq {freq} vs p {p} (3se = {})",
                3.0 * se
            );
        }
    }

    #[test]
    fn degenerate_probability_and_sigma() {
        let mut params = ChannelParams::default();
        params.los_table = vec![(10.0, 1.0)];
        params.shadow_sigma_los_db = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let s = sample_link_state(45.0, &params, &mut rng).unwrap();
            assert!(s.is_los);
            assert_eq!(s.shadow_db, 0.0);
        }
    }

    #[test]
    fn link_state_sampling_is_deterministic() {
        let params = ChannelParams::default();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..32)
                .map(|_| sample_link_state(40.0, &params, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(5), draw(5));
        assert_ne!(draw(5), draw(6));
    }

    #[test]
    fn los_table_parsing() {
        let text = "# elevation_deg  p_los\n10 0.25\n\n50 0.6  # mid\n90 1.0\n";
        let table = parse_los_table(text).unwrap();
        assert_eq!(table, vec![(10.0, 0.25), (50.0, 0.6), (90.0, 1.0)]);

        assert!(parse_los_table("10 0.25 extra\n").is_err());
        assert!(parse_los_table("10 abc\n").is_err());
        assert!(parse_los_table("90 0.5\n10 0.2\n").is_err());
        assert!(parse_los_table("# only comments\n").is_err());
    }

    #[test]
    fn channel_params_validation() {
        assert!(ChannelParams::default().validate().is_ok());
        let mut p = ChannelParams::default();
        p.bandwidth_hz = 0.0;
        assert!(p.validate().is_err());
        let mut p = ChannelParams::default();
        p.shadow_sigma_nlos_db = -1.0;
        assert!(p.validate().is_err());
    }
}
