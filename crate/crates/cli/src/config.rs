//! Flat `key = value` configuration with `[section]` headers.
//!
//! Every key carries its unit in the name. Unknown sections or keys are
//! rejected with the offending line, so typos cannot silently fall back to
//! defaults. An empty file (or no `--config` at all) runs the built-in
//! defaults.
//!
//! ```text
//! [scenario]
//! radius_km = 50
//! num_gateways = 1000
//!
//! [campaign]
//! schemes = passive, L2000, L1000, L500
//! dl_tx_power_dbm = 53:63:1        # or an explicit comma list
//! ul_tx_power_dbm = 28, 29, 30
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use hapsim_core::channel::{load_los_table, ChannelParams};
use hapsim_core::engine::CampaignSpec;
use hapsim_core::metrics::{FeasibilityParams, RisPowerParams};
use hapsim_core::ris::{aperture_element_gain_dbi, RisArchitecture, RisMode};
use hapsim_core::scenario::AreaSpec;
use hapsim_core::units::dbm_to_watt;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] hapsim_core::Error),
}

/// Parsed simulator configuration plus the pieces the CLI needs to rebuild
/// per-scheme architectures.
#[derive(Debug, Clone)]
pub struct Builder {
    scenario: AreaSpec,
    channel: ChannelParams,
    n_total: usize,
    pa_output_power_w: f64,
    amp_gain_floor: f64,
    amp_gain_cap: f64,
    ris_noise_figure_db: f64,
    element_gain_dbi: Option<f64>,
    unit_cell_edge_fraction: f64,
    power: RisPowerParams,
    feasibility: FeasibilityParams,
    scheme_tokens: Vec<String>,
    dl_tx_power_dbm: Vec<f64>,
    ul_tx_power_dbm: Vec<f64>,
    dl_receiver_gain_dbi: Option<f64>,
    num_drops: usize,
    master_seed: u64,
    los_table_file: Option<PathBuf>,
}

impl Default for Builder {
    fn default() -> Self {
        let defaults = CampaignSpec::default();
        Self {
            scenario: defaults.scenario,
            channel: defaults.channel,
            n_total: 30_000,
            pa_output_power_w: 2.0,
            amp_gain_floor: 1.0,
            amp_gain_cap: f64::INFINITY,
            ris_noise_figure_db: 5.0,
            element_gain_dbi: None,
            unit_cell_edge_fraction: 0.2,
            power: defaults.power,
            feasibility: defaults.feasibility,
            scheme_tokens: vec![
                "passive".into(),
                "L2000".into(),
                "L1000".into(),
                "L500".into(),
            ],
            dl_tx_power_dbm: defaults.dl_tx_power_dbm,
            ul_tx_power_dbm: defaults.ul_tx_power_dbm,
            dl_receiver_gain_dbi: None,
            num_drops: defaults.num_drops,
            master_seed: defaults.master_seed,
            los_table_file: None,
        }
    }
}

/// Loads a config file and builds the validated campaign spec.
pub fn load_config(path: &Path) -> Result<CampaignSpec, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config(&text, &path.display().to_string(), base_dir)
}

/// Built-in defaults, as if an empty file had been given.
pub fn default_config() -> Result<CampaignSpec, ConfigError> {
    parse_config("", "<defaults>", Path::new("."))
}

/// Parses config text; `path` is used only for error messages and
/// `base_dir` anchors relative file references.
pub fn parse_config(
    text: &str,
    path: &str,
    base_dir: &Path,
) -> Result<CampaignSpec, ConfigError> {
    let mut b = Builder::default();
    let mut section = String::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |msg: String| ConfigError::Parse {
            path: path.to_string(),
            line: line_no,
            msg,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(inner) = line.strip_prefix('[') {
            let Some(name) = inner.strip_suffix(']') else {
                return Err(err(format!("malformed section header {line:?}")));
            };
            let name = name.trim();
            if !matches!(
                name,
                "scenario" | "channel" | "ris" | "power" | "feasibility" | "campaign"
            ) {
                return Err(err(format!("unknown section [{name}]")));
            }
            section = name.to_string();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(format!("expected key = value, got {line:?}")));
        };
        let key = key.trim();
        let value = value.trim();
        if section.is_empty() {
            return Err(err(format!("key {key:?} appears before any [section]")));
        }
        apply_key(&mut b, &section, key, value, base_dir).map_err(err)?;
    }

    finalize(b)
}

fn apply_key(
    b: &mut Builder,
    section: &str,
    key: &str,
    value: &str,
    base_dir: &Path,
) -> Result<(), String> {
    match (section, key) {
        ("scenario", "radius_km") => b.scenario.radius_km = parse_f64(key, value)?,
        ("scenario", "haps_altitude_km") => b.scenario.haps_altitude_km = parse_f64(key, value)?,
        ("scenario", "ground_station_x_km") => {
            b.scenario.ground_station.x_km = parse_f64(key, value)?
        }
        ("scenario", "ground_station_y_km") => {
            b.scenario.ground_station.y_km = parse_f64(key, value)?
        }
        ("scenario", "ground_station_z_km") => {
            b.scenario.ground_station.z_km = parse_f64(key, value)?
        }
        ("scenario", "num_gateways") => b.scenario.num_gateways = parse_usize(key, value)?,

        ("channel", "frequency_ghz") => b.channel.frequency_ghz = parse_f64(key, value)?,
        ("channel", "bandwidth_hz") => b.channel.bandwidth_hz = parse_f64(key, value)?,
        ("channel", "noise_density_dbm_per_hz") => {
            b.channel.noise_density_dbm_per_hz = parse_f64(key, value)?
        }
        ("channel", "los_table_file") => b.los_table_file = Some(base_dir.join(value)),
        ("channel", "shadow_sigma_los_db") => {
            b.channel.shadow_sigma_los_db = parse_f64(key, value)?
        }
        ("channel", "shadow_sigma_nlos_db") => {
            b.channel.shadow_sigma_nlos_db = parse_f64(key, value)?
        }
        ("channel", "clutter_loss_nlos_db") => {
            b.channel.clutter_loss_nlos_db = parse_f64(key, value)?
        }
        ("channel", "atmospheric_margin_db") => {
            b.channel.atmospheric_margin_db = parse_f64(key, value)?
        }
        ("channel", "gs_antenna_gain_dbi") => {
            b.channel.gs_antenna_gain_dbi = parse_f64(key, value)?
        }
        ("channel", "gw_antenna_gain_dbi") => {
            b.channel.gw_antenna_gain_dbi = parse_f64(key, value)?
        }
        ("channel", "receiver_noise_figure_db") => {
            b.channel.receiver_noise_figure_db = parse_f64(key, value)?
        }

        ("ris", "n_total") => b.n_total = parse_usize(key, value)?,
        ("ris", "pa_output_power_w") => b.pa_output_power_w = parse_f64(key, value)?,
        ("ris", "amp_gain_floor") => b.amp_gain_floor = parse_f64(key, value)?,
        ("ris", "amp_gain_cap") => b.amp_gain_cap = parse_f64(key, value)?,
        ("ris", "ris_noise_figure_db") => b.ris_noise_figure_db = parse_f64(key, value)?,
        ("ris", "element_gain_dbi") => b.element_gain_dbi = Some(parse_f64(key, value)?),
        ("ris", "unit_cell_edge_fraction") => {
            b.unit_cell_edge_fraction = parse_f64(key, value)?
        }

        ("power", "switch_power_mw") => b.power.switch_power_w = parse_f64(key, value)? * 1e-3,
        ("power", "control_power_dbm") => {
            b.power.control_power_w = dbm_to_watt(parse_f64(key, value)?)
        }
        ("power", "amplifier_power_w") => b.power.amplifier_power_w = parse_f64(key, value)?,

        ("feasibility", "element_mass_g") => {
            b.feasibility.element_mass_kg = parse_f64(key, value)? * 1e-3
        }
        ("feasibility", "solar_irradiance_w_per_m2") => {
            b.feasibility.solar_irradiance_w_per_m2 = parse_f64(key, value)?
        }
        ("feasibility", "solar_efficiency") => {
            b.feasibility.solar_efficiency = parse_f64(key, value)?
        }

        ("campaign", "schemes") => {
            b.scheme_tokens = value.split(',').map(|s| s.trim().to_string()).collect()
        }
        ("campaign", "dl_tx_power_dbm") => b.dl_tx_power_dbm = parse_grid(key, value)?,
        ("campaign", "ul_tx_power_dbm") => b.ul_tx_power_dbm = parse_grid(key, value)?,
        ("campaign", "dl_receiver_gain_dbi") => {
            b.dl_receiver_gain_dbi = Some(parse_f64(key, value)?)
        }
        ("campaign", "num_drops") => b.num_drops = parse_usize(key, value)?,
        ("campaign", "master_seed") => b.master_seed = parse_u64(key, value)?,

        _ => return Err(format!("unknown key {key:?} in section [{section}]")),
    }
    Ok(())
}

fn parse_f64(key: &str, value: &str) -> Result<f64, String> {
    match value {
        "inf" => Ok(f64::INFINITY),
        _ => value
            .parse::<f64>()
            .map_err(|_| format!("{key}: cannot parse {value:?} as a number")),
    }
}

fn parse_usize(key: &str, value: &str) -> Result<usize, String> {
    value
        .parse::<usize>()
        .map_err(|_| format!("{key}: cannot parse {value:?} as a non-negative integer"))
}

fn parse_u64(key: &str, value: &str) -> Result<u64, String> {
    value
        .parse::<u64>()
        .map_err(|_| format!("{key}: cannot parse {value:?} as a 64-bit seed"))
}

/// Grid syntax: either `a, b, c` or an inclusive range `start:stop:step`.
fn parse_grid(key: &str, value: &str) -> Result<Vec<f64>, String> {
    if value.contains(':') {
        let parts: Vec<&str> = value.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(format!("{key}: range must be start:stop:step, got {value:?}"));
        };
        let start = parse_f64(key, start.trim())?;
        let stop = parse_f64(key, stop.trim())?;
        let step = parse_f64(key, step.trim())?;
        if !(step > 0.0) || stop < start {
            return Err(format!("{key}: range {value:?} is empty or has step <= 0"));
        }
        let mut grid = Vec::new();
        let mut k = 0u32;
        loop {
            let v = start + f64::from(k) * step;
            if v > stop + step * 1e-9 {
                break;
            }
            grid.push(v);
            k += 1;
        }
        Ok(grid)
    } else {
        value
            .split(',')
            .map(|s| parse_f64(key, s.trim()))
            .collect()
    }
}

fn parse_scheme(token: &str, template: &RisArchitecture) -> Result<RisArchitecture, String> {
    if token == "passive" {
        return Ok(RisArchitecture {
            mode: RisMode::Passive,
            ..*template
        });
    }
    if let Some(rest) = token.strip_prefix('L') {
        let group_size = rest
            .parse::<usize>()
            .map_err(|_| format!("scheme {token:?}: expected L<group size>"))?;
        return Ok(RisArchitecture {
            mode: RisMode::SubConnectedActive { group_size },
            ..*template
        });
    }
    Err(format!(
        "scheme {token:?}: expected \"passive\" or \"L<group size>\""
    ))
}

fn finalize(b: Builder) -> Result<CampaignSpec, ConfigError> {
    let mut channel = b.channel;
    if let Some(path) = &b.los_table_file {
        channel.los_table = load_los_table(path)?;
    }
    let template = RisArchitecture {
        mode: RisMode::Passive,
        n_total: b.n_total,
        pa_output_power_w: b.pa_output_power_w,
        amp_gain_floor: b.amp_gain_floor,
        amp_gain_cap: b.amp_gain_cap,
        ris_noise_figure_db: b.ris_noise_figure_db,
        element_gain_dbi: b
            .element_gain_dbi
            .unwrap_or_else(|| aperture_element_gain_dbi(b.unit_cell_edge_fraction)),
        unit_cell_edge_fraction: b.unit_cell_edge_fraction,
    };
    let schemes = b
        .scheme_tokens
        .iter()
        .map(|t| parse_scheme(t, &template))
        .collect::<Result<Vec<_>, String>>()
        .map_err(|msg| ConfigError::Parse {
            path: "<schemes>".into(),
            line: 0,
            msg,
        })?;

    let spec = CampaignSpec {
        scenario: b.scenario,
        channel,
        schemes,
        power: b.power,
        feasibility: b.feasibility,
        dl_tx_power_dbm: b.dl_tx_power_dbm,
        ul_tx_power_dbm: b.ul_tx_power_dbm,
        dl_receiver_gain_dbi: b.dl_receiver_gain_dbi,
        num_drops: b.num_drops,
        master_seed: b.master_seed,
    };
    spec.validate()?;
    Ok(spec)
}
