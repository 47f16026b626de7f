//! Monte Carlo campaign engine.
//!
//! A campaign runs `num_drops` independent drops. Each drop redraws gateway
//! positions and per-link LoS/shadowing states from its own counter-based
//! RNG substream `(master_seed, drop_index)`, so results do not depend on
//! how drops are scheduled across worker threads. Within a drop the same
//! realizations are reused for every scheme, direction and grid power
//! (common random numbers), which makes scheme comparisons paired.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{hop_power_gain, sample_link_state, ChannelParams, HopGain, LinkState};
use crate::error::{Error, Result};
use crate::metrics::{
    empirical_cdf, energy_efficiency, feasibility_report, ris_power_consumption, shannon_rate,
    CdfSummary, Direction, FeasibilityParams, FeasibilityReport, LinkMetrics, RisPowerParams,
};
use crate::ris::{end_to_end_snr, CascadeLink, RisArchitecture};
use crate::scenario::{link_geometry, sample_gateway_positions, AreaSpec, LinkGeometry};
use crate::units::{dbm_to_watt, linear_to_db};

// ============================================================================
// Campaign description
// ============================================================================

/// Everything one campaign needs: scenario, radio, schemes and grids.
#[derive(Debug, Clone)]
pub struct CampaignSpec {
    pub scenario: AreaSpec,
    pub channel: ChannelParams,
    /// Surface configurations compared under common random numbers.
    pub schemes: Vec<RisArchitecture>,
    pub power: RisPowerParams,
    pub feasibility: FeasibilityParams,
    /// Ground-station transmit grid for the downlink, dBm, ascending.
    pub dl_tx_power_dbm: Vec<f64>,
    /// Gateway transmit grid for the uplink, dBm, ascending.
    pub ul_tx_power_dbm: Vec<f64>,
    /// Optional high-gain receive antenna at the gateways, downlink only.
    /// Replaces `gw_antenna_gain_dbi` on the receive hop when set.
    pub dl_receiver_gain_dbi: Option<f64>,
    pub num_drops: usize,
    pub master_seed: u64,
}

/// Default downlink grid, dBm. The donor transmit power is a calibration
/// knob, not a measured figure; this range puts the median passive gateway
/// in the power-limited regime where one extra dB buys 20-30 Mbit/s.
pub const DEFAULT_DL_TX_POWER_DBM: [f64; 11] = [
    53.0, 54.0, 55.0, 56.0, 57.0, 58.0, 59.0, 60.0, 61.0, 62.0, 63.0,
];

/// Default uplink grid, dBm.
pub const DEFAULT_UL_TX_POWER_DBM: [f64; 3] = [28.0, 29.0, 30.0];

impl Default for CampaignSpec {
    fn default() -> Self {
        Self {
            scenario: AreaSpec::default(),
            channel: ChannelParams::default(),
            schemes: default_schemes(30_000),
            power: RisPowerParams::default(),
            feasibility: FeasibilityParams::default(),
            dl_tx_power_dbm: DEFAULT_DL_TX_POWER_DBM.to_vec(),
            ul_tx_power_dbm: DEFAULT_UL_TX_POWER_DBM.to_vec(),
            dl_receiver_gain_dbi: None,
            num_drops: 100,
            master_seed: 1,
        }
    }
}

/// The four architectures compared by default: passive plus group sizes
/// 2000, 1000 and 500.
pub fn default_schemes(n_total: usize) -> Vec<RisArchitecture> {
    vec![
        RisArchitecture::passive(n_total),
        RisArchitecture::sub_connected(n_total, 2000),
        RisArchitecture::sub_connected(n_total, 1000),
        RisArchitecture::sub_connected(n_total, 500),
    ]
}

fn validate_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config(format!("{name} is empty")));
    }
    for (i, &v) in grid.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Config(format!("{name}[{i}] is not finite")));
        }
        if i > 0 && v <= grid[i - 1] {
            return Err(Error::Config(format!(
                "{name} must be strictly ascending (entry {i}: {v})"
            )));
        }
    }
    Ok(())
}

impl CampaignSpec {
    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.channel.validate()?;
        self.power.validate()?;
        self.feasibility.validate()?;
        if self.schemes.is_empty() {
            return Err(Error::Config("schemes list is empty".into()));
        }
        for s in &self.schemes {
            s.validate()?;
        }
        validate_grid("dl_tx_power_dbm", &self.dl_tx_power_dbm)?;
        validate_grid("ul_tx_power_dbm", &self.ul_tx_power_dbm)?;
        if let Some(g) = self.dl_receiver_gain_dbi {
            if !g.is_finite() {
                return Err(Error::Config("dl_receiver_gain_dbi is not finite".into()));
            }
        }
        if self.num_drops == 0 {
            return Err(Error::Config("num_drops must be at least 1".into()));
        }
        Ok(())
    }

    /// Transmit-power grid for one direction.
    pub fn grid(&self, direction: Direction) -> &[f64] {
        match direction {
            Direction::Downlink => &self.dl_tx_power_dbm,
            Direction::Uplink => &self.ul_tx_power_dbm,
        }
    }
}

// ============================================================================
// Drops
// ============================================================================

/// One evaluated (scheme, direction, power, gateway) combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CampaignRecord {
    pub scheme_index: usize,
    pub tx_power_dbm: f64,
    pub elevation_deg: f64,
    pub metrics: LinkMetrics,
}

/// RNG substream for one drop: the master seed keys the stream family and
/// the drop index selects the stream, so any drop can be generated in
/// isolation.
fn drop_rng(master_seed: u64, drop_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(drop_index as u64);
    rng
}

/// Runs a single drop and returns its records in a fixed order
/// (scheme, direction, grid power, gateway).
pub fn run_drop(spec: &CampaignSpec, drop_index: usize) -> Result<Vec<CampaignRecord>> {
    let ch = &spec.channel;
    let mut rng = drop_rng(spec.master_seed, drop_index);
    let haps = spec.scenario.haps_position();

    // All randomness is drawn up front, before any scheme is evaluated, so
    // every scheme and grid power sees identical realizations.
    let positions = sample_gateway_positions(&spec.scenario, &mut rng);
    let gs_geometry = link_geometry(spec.scenario.ground_station, haps)?;
    let gs_state = sample_link_state(gs_geometry.elevation_deg, ch, &mut rng)?;
    let mut gateway_links: Vec<(LinkGeometry, LinkState)> =
        Vec::with_capacity(positions.len());
    for p in &positions {
        let geometry = link_geometry(*p, haps)?;
        let state = sample_link_state(geometry.elevation_deg, ch, &mut rng)?;
        gateway_links.push((geometry, state));
    }

    let thermal_noise_w = ch.thermal_noise_w();
    let receiver_noise_w = ch.receiver_noise_w();
    let dl_rx_gain_dbi = spec.dl_receiver_gain_dbi.unwrap_or(ch.gw_antenna_gain_dbi);

    let per_direction = spec.dl_tx_power_dbm.len() + spec.ul_tx_power_dbm.len();
    let mut records =
        Vec::with_capacity(spec.schemes.len() * per_direction * positions.len());

    for (scheme_index, arch) in spec.schemes.iter().enumerate() {
        let ris_power_w = ris_power_consumption(arch, &spec.power)?;
        let gs_hop = hop_power_gain(
            &gs_geometry,
            &gs_state,
            ch.gs_antenna_gain_dbi,
            arch.element_gain_dbi,
            ch,
        )?;
        // Per-gateway hops: the downlink receive hop may use the high-gain
        // override, the uplink transmit hop always uses the terminal gain.
        let gw_hops: Vec<(HopGain, HopGain)> = gateway_links
            .iter()
            .map(|(geometry, state)| {
                let dl = hop_power_gain(geometry, state, dl_rx_gain_dbi, arch.element_gain_dbi, ch)?;
                let ul = hop_power_gain(
                    geometry,
                    state,
                    ch.gw_antenna_gain_dbi,
                    arch.element_gain_dbi,
                    ch,
                )?;
                Ok((dl, ul))
            })
            .collect::<Result<_>>()?;

        for direction in [Direction::Downlink, Direction::Uplink] {
            for &tx_power_dbm in spec.grid(direction) {
                let tx_power_w = dbm_to_watt(tx_power_dbm);
                for (gateway_id, ((geometry, _), (dl_hop, ul_hop))) in
                    gateway_links.iter().zip(&gw_hops).enumerate()
                {
                    let link = match direction {
                        Direction::Downlink => CascadeLink {
                            hop1: gs_hop,
                            hop2: *dl_hop,
                        },
                        Direction::Uplink => CascadeLink {
                            hop1: *ul_hop,
                            hop2: gs_hop,
                        },
                    };
                    let snr = end_to_end_snr(&link, arch, tx_power_w, thermal_noise_w, receiver_noise_w)?;
                    let rate_bps = shannon_rate(snr, ch.bandwidth_hz)?;
                    let ee = energy_efficiency(rate_bps, tx_power_w, ris_power_w)?;
                    records.push(CampaignRecord {
                        scheme_index,
                        tx_power_dbm,
                        elevation_deg: geometry.elevation_deg,
                        metrics: LinkMetrics {
                            gateway_id,
                            drop_id: drop_index,
                            direction,
                            snr_db: linear_to_db(snr),
                            rate_bps,
                            energy_efficiency: ee,
                        },
                    });
                }
            }
        }
    }
    Ok(records)
}

// ============================================================================
// Campaign
// ============================================================================

/// Rate and energy-efficiency CDFs of one (scheme, direction, power) series.
#[derive(Debug, Clone)]
pub struct SeriesCdf {
    pub scheme_index: usize,
    pub scheme_label: String,
    pub direction: Direction,
    pub tx_power_dbm: f64,
    pub rate_cdf: CdfSummary,
    pub ee_cdf: CdfSummary,
}

#[derive(Debug, Clone)]
pub struct SchemePowerReport {
    pub label: String,
    pub amplifier_count: usize,
    pub ris_power_w: f64,
}

#[derive(Debug, Clone)]
pub struct CampaignResult {
    pub records: Vec<CampaignRecord>,
    /// Ordered by scheme, then direction (downlink first), then grid power.
    pub series: Vec<SeriesCdf>,
    pub power_report: Vec<SchemePowerReport>,
    /// Feasibility per scheme; mass and aperture are shared, the solar
    /// panel follows each scheme's consumption.
    pub feasibility: Vec<(String, FeasibilityReport)>,
    pub scheme_labels: Vec<String>,
}

/// Runs all drops (in parallel) and aggregates the per-series CDFs.
///
/// Records are concatenated in drop order whatever the worker count, so a
/// fixed spec yields an identical result on any thread pool.
pub fn run_campaign(spec: &CampaignSpec) -> Result<CampaignResult> {
    spec.validate()?;
    let per_drop: Vec<Vec<CampaignRecord>> = (0..spec.num_drops)
        .into_par_iter()
        .map(|drop_index| run_drop(spec, drop_index))
        .collect::<Result<_>>()?;
    let records: Vec<CampaignRecord> = per_drop.into_iter().flatten().collect();

    // Bucket rates and efficiencies per (scheme, direction, grid power).
    let dl = spec.dl_tx_power_dbm.len();
    let ul = spec.ul_tx_power_dbm.len();
    let per_scheme = dl + ul;
    let n_series = spec.schemes.len() * per_scheme;
    let mut rates: Vec<Vec<f64>> = vec![Vec::new(); n_series];
    let mut ees: Vec<Vec<f64>> = vec![Vec::new(); n_series];
    for r in &records {
        let (grid, offset) = match r.metrics.direction {
            Direction::Downlink => (&spec.dl_tx_power_dbm, 0),
            Direction::Uplink => (&spec.ul_tx_power_dbm, dl),
        };
        let power_index = grid
            .iter()
            .position(|&p| p == r.tx_power_dbm)
            .expect("record power comes from the grid");
        let series_index = r.scheme_index * per_scheme + offset + power_index;
        rates[series_index].push(r.metrics.rate_bps);
        ees[series_index].push(r.metrics.energy_efficiency);
    }

    let scheme_labels: Vec<String> = spec.schemes.iter().map(|s| s.label()).collect();
    let mut series = Vec::with_capacity(n_series);
    for (scheme_index, label) in scheme_labels.iter().enumerate() {
        for (direction, grid, offset) in [
            (Direction::Downlink, &spec.dl_tx_power_dbm, 0),
            (Direction::Uplink, &spec.ul_tx_power_dbm, dl),
        ] {
            for (power_index, &tx_power_dbm) in grid.iter().enumerate() {
                let idx = scheme_index * per_scheme + offset + power_index;
                series.push(SeriesCdf {
                    scheme_index,
                    scheme_label: label.clone(),
                    direction,
                    tx_power_dbm,
                    rate_cdf: empirical_cdf(&rates[idx])?,
                    ee_cdf: empirical_cdf(&ees[idx])?,
                });
            }
        }
    }

    let mut power_report = Vec::with_capacity(spec.schemes.len());
    let mut feasibility = Vec::with_capacity(spec.schemes.len());
    for arch in &spec.schemes {
        power_report.push(SchemePowerReport {
            label: arch.label(),
            amplifier_count: arch.amplifier_count(),
            ris_power_w: ris_power_consumption(arch, &spec.power)?,
        });
        feasibility.push((
            arch.label(),
            feasibility_report(arch, &spec.power, &spec.feasibility, spec.channel.frequency_ghz)?,
        ));
    }

    Ok(CampaignResult {
        records,
        series,
        power_report,
        feasibility,
        scheme_labels,
    })
}

// ============================================================================
// Transmit-power sweep
// ============================================================================

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub scheme_label: String,
    pub tx_power_dbm: f64,
    pub median_rate_bps: f64,
    /// Median-rate gain per dB against the previous grid point; `None` on
    /// the first point of each scheme.
    pub slope_mbps_per_db: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub direction: Direction,
    pub rows: Vec<SweepRow>,
}

/// Median rate and per-dB slope over the direction's grid, per scheme.
pub fn sweep_tx_power(spec: &CampaignSpec, direction: Direction) -> Result<SweepTable> {
    if spec.grid(direction).len() < 2 {
        return Err(Error::Config(format!(
            "{} grid needs at least two points for a sweep",
            direction.label()
        )));
    }
    let result = run_campaign(spec)?;
    let mut rows = Vec::new();
    for (scheme_index, label) in result.scheme_labels.iter().enumerate() {
        let mut prev: Option<(f64, f64)> = None;
        for s in result
            .series
            .iter()
            .filter(|s| s.scheme_index == scheme_index && s.direction == direction)
        {
            let median = s.rate_cdf.percentile(0.5)?;
            let slope = prev.map(|(p_dbm, p_rate)| {
                (median - p_rate) / (s.tx_power_dbm - p_dbm) / 1e6
            });
            rows.push(SweepRow {
                scheme_label: label.clone(),
                tx_power_dbm: s.tx_power_dbm,
                median_rate_bps: median,
                slope_mbps_per_db: slope,
            });
            prev = Some((s.tx_power_dbm, median));
        }
    }
    Ok(SweepTable { direction, rows })
}

// ============================================================================
// Grouping selection
// ============================================================================

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupingObjective {
    /// Least surface consumption.
    MinPower,
    /// Largest mean per-drop sum rate over the gateways.
    MaxSumRate,
    /// Largest median energy efficiency.
    MaxEnergyEfficiency,
}

#[derive(Debug, Clone)]
pub struct CandidateReport {
    pub label: String,
    pub amplifier_count: usize,
    pub ris_power_w: f64,
    /// Gateway sum rate per drop and grid point, averaged over the campaign
    /// (both directions pooled).
    pub mean_sum_rate_bps: f64,
    /// Median energy efficiency over all records of the candidate.
    pub median_ee_bit_per_joule: f64,
}

#[derive(Debug, Clone)]
pub struct GroupingSelection {
    pub objective: GroupingObjective,
    pub chosen: RisArchitecture,
    pub table: Vec<CandidateReport>,
}

/// Evaluates every candidate on the same realizations and picks the best
/// one for the objective. Ties go to the candidate with fewer amplifiers.
pub fn select_grouping(
    spec: &CampaignSpec,
    objective: GroupingObjective,
    candidates: &[RisArchitecture],
) -> Result<GroupingSelection> {
    if candidates.is_empty() {
        return Err(Error::Contract("no grouping candidates given".into()));
    }
    // One campaign with all candidates as schemes: realizations are drawn
    // before the scheme loop, so this is exactly common random numbers.
    let mut eval_spec = spec.clone();
    eval_spec.schemes = candidates.to_vec();
    let result = run_campaign(&eval_spec)?;

    let denom =
        (spec.num_drops * (spec.dl_tx_power_dbm.len() + spec.ul_tx_power_dbm.len())) as f64;
    let mut table = Vec::with_capacity(candidates.len());
    for (i, arch) in candidates.iter().enumerate() {
        let (mut rate_total, mut ee_values) = (0.0, Vec::new());
        for r in result.records.iter().filter(|r| r.scheme_index == i) {
            rate_total += r.metrics.rate_bps;
            ee_values.push(r.metrics.energy_efficiency);
        }
        table.push(CandidateReport {
            label: arch.label(),
            amplifier_count: arch.amplifier_count(),
            ris_power_w: ris_power_consumption(arch, &spec.power)?,
            mean_sum_rate_bps: rate_total / denom,
            median_ee_bit_per_joule: empirical_cdf(&ee_values)?.percentile(0.5)?,
        });
    }

    let score = |report: &CandidateReport| match objective {
        GroupingObjective::MinPower => -report.ris_power_w,
        GroupingObjective::MaxSumRate => report.mean_sum_rate_bps,
        GroupingObjective::MaxEnergyEfficiency => report.median_ee_bit_per_joule,
    };
    let mut best = 0;
    for i in 1..table.len() {
        let better = score(&table[i]) > score(&table[best]);
        let tied = score(&table[i]) == score(&table[best])
            && table[i].amplifier_count < table[best].amplifier_count;
        if better || tied {
            best = i;
        }
    }

    Ok(GroupingSelection {
        objective,
        chosen: candidates[best],
        table,
    })
}
