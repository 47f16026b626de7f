//! Result emission: raw per-link records, empirical CDF series for external
//! plotting, and a human-readable summary.
//!
//! All numeric output goes through Rust's shortest round-trip float
//! formatting (`{}`), so every value in `records.csv` and the CDF files can
//! be parsed back bit-for-bit. Files are plain ASCII and byte-stable for a
//! fixed config and seed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use hapsim_core::engine::{
    CampaignResult, CampaignSpec, GroupingSelection, SchemePowerReport, SweepTable,
};
use hapsim_core::metrics::{Direction, FeasibilityReport};

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] hapsim_core::Error),
}

/// Number of evaluation points per CDF series.
const CDF_POINTS: usize = 200;

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, OutputError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| OutputError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

/// Writes one text file into `out_dir`, creating the directory if needed.
pub fn emit_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, OutputError> {
    fs::create_dir_all(dir).map_err(|source| OutputError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    write_file(dir, name, contents)
}

/// Writes `records.csv`, the four CDF files and `summary.txt` into
/// `out_dir`, creating it if needed. Returns the written paths.
pub fn emit_results(
    spec: &CampaignSpec,
    result: &CampaignResult,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, OutputError> {
    fs::create_dir_all(out_dir).map_err(|source| OutputError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    written.push(write_file(out_dir, "records.csv", &records_csv(spec, result))?);
    for direction in [Direction::Downlink, Direction::Uplink] {
        let name = format!("cdf_rate_{}.csv", direction.label());
        written.push(write_file(out_dir, &name, &cdf_csv(result, direction, true))?);
        let name = format!("cdf_ee_{}.csv", direction.label());
        written.push(write_file(out_dir, &name, &cdf_csv(result, direction, false))?);
    }
    written.push(write_file(out_dir, "summary.txt", &summary_text(spec, result)?)?);
    Ok(written)
}

// ====================================================================
// records.csv
// ====================================================================

pub fn records_csv(spec: &CampaignSpec, result: &CampaignResult) -> String {
    let mut out = String::new();
    out.push_str(
        "scheme,L,direction,tx_power_dbm,drop_id,gateway_id,elevation_deg,snr_db,rate_bps,ee_bit_per_joule\n",
    );
    for rec in &result.records {
        let label = &result.scheme_labels[rec.scheme_index];
        let group = spec.schemes[rec.scheme_index].group_size().unwrap_or(0);
        let m = &rec.metrics;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            label,
            group,
            m.direction.label(),
            rec.tx_power_dbm,
            m.drop_id,
            m.gateway_id,
            rec.elevation_deg,
            m.snr_db,
            m.rate_bps,
            m.energy_efficiency
        );
    }
    out
}

// ====================================================================
// CDF series
// ====================================================================

/// One file per metric and direction; within it, one 200-point series per
/// scheme and transmit power.
pub fn cdf_csv(result: &CampaignResult, direction: Direction, rate_metric: bool) -> String {
    let mut out = String::new();
    out.push_str("scheme,tx_power_dbm,x,F(x)\n");
    for series in &result.series {
        if series.direction != direction {
            continue;
        }
        let cdf = if rate_metric {
            &series.rate_cdf
        } else {
            &series.ee_cdf
        };
        let (lo, hi) = (cdf.min(), cdf.max());
        for i in 0..CDF_POINTS {
            let t = i as f64 / (CDF_POINTS - 1) as f64;
            let x = lo + (hi - lo) * t;
            let _ = writeln!(
                out,
                "{},{},{},{}",
                series.scheme_label,
                series.tx_power_dbm,
                x,
                cdf.evaluate(x)
            );
        }
    }
    out
}

// ====================================================================
// summary.txt
// ====================================================================

fn grid_line(grid: &[f64]) -> String {
    grid.iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn summary_text(spec: &CampaignSpec, result: &CampaignResult) -> Result<String, OutputError> {
    let mut out = String::new();
    let s = &spec.scenario;
    let c = &spec.channel;
    let _ = writeln!(out, "campaign summary");
    let _ = writeln!(out, "================");
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "scenario   : radius {} km, platform altitude {} km, ground station ({}, {}, {}) km",
        s.radius_km,
        s.haps_altitude_km,
        s.ground_station.x_km,
        s.ground_station.y_km,
        s.ground_station.z_km
    );
    let _ = writeln!(
        out,
        "population : {} gateways x {} drops, master seed {}",
        s.num_gateways, spec.num_drops, spec.master_seed
    );
    let _ = writeln!(
        out,
        "channel    : {} GHz, {} Hz bandwidth, noise density {} dBm/Hz",
        c.frequency_ghz, c.bandwidth_hz, c.noise_density_dbm_per_hz
    );
    let _ = writeln!(out, "schemes    : {}", result.scheme_labels.join(", "));
    let _ = writeln!(out, "downlink tx grid (dBm): {}", grid_line(&spec.dl_tx_power_dbm));
    let _ = writeln!(out, "uplink tx grid (dBm)  : {}", grid_line(&spec.ul_tx_power_dbm));
    let _ = writeln!(out);

    out.push_str(&power_block(&result.power_report));
    let _ = writeln!(out);
    out.push_str(&feasibility_block(spec, &result.feasibility));
    let _ = writeln!(out);

    for direction in [Direction::Downlink, Direction::Uplink] {
        write_rate_table(&mut out, result, direction)?;
        let _ = writeln!(out);
    }
    for direction in [Direction::Downlink, Direction::Uplink] {
        write_ee_table(&mut out, result, direction)?;
        let _ = writeln!(out);
    }
    Ok(out)
}

pub fn power_block(rows: &[SchemePowerReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "surface power consumption");
    let _ = writeln!(out, "-------------------------");
    let _ = writeln!(out, "{:<10} {:>10} {:>12}", "scheme", "amplifiers", "P_RIS");
    for row in rows {
        let _ = writeln!(
            out,
            "{:<10} {:>10} {:>10.2} W",
            row.label, row.amplifier_count, row.ris_power_w
        );
    }
    if let Some(peak) = rows.iter().max_by(|a, b| a.ris_power_w.total_cmp(&b.ris_power_w)) {
        let _ = writeln!(
            out,
            "peak draw  : {:.2} W ({}); whole-watt budget ~{} W",
            peak.ris_power_w,
            peak.label,
            peak.ris_power_w.ceil()
        );
    }
    out
}

pub fn feasibility_block(
    spec: &CampaignSpec,
    reports: &[(String, FeasibilityReport)],
) -> String {
    let mut out = String::new();
    let Some((_, first)) = reports.first() else {
        return out;
    };
    let arch = &spec.schemes[0];
    let header = format!(
        "payload feasibility (N = {}, {} GHz)",
        arch.n_total, spec.channel.frequency_ghz
    );
    let _ = writeln!(out, "{header}");
    let _ = writeln!(out, "{}", "-".repeat(header.len()));
    let _ = writeln!(
        out,
        "aperture area : {:.2} m2 (unit cell edge = {} wavelength)",
        first.aperture_area_m2, arch.unit_cell_edge_fraction
    );
    // The aperture scales with wavelength squared, so the same element
    // count quoted at a different carrier gives a very different footprint.
    let area_at_015 =
        arch.n_total as f64 * (arch.unit_cell_edge_fraction * 0.15).powi(2);
    let _ = writeln!(
        out,
        "                note: area scales with wavelength^2; the same element"
    );
    let _ = writeln!(
        out,
        "                count sized at a 0.15 m wavelength (2.0 GHz) occupies {:.2} m2",
        area_at_015
    );
    let _ = writeln!(
        out,
        "total mass    : {} kg at {} g per element",
        first.total_mass_kg,
        spec.feasibility.element_mass_kg * 1e3
    );
    let solar = reports
        .iter()
        .map(|(label, rep)| format!("{:.2} m2 ({})", rep.solar_area_m2, label))
        .collect::<Vec<_>>()
        .join(", ");
    let _ = writeln!(out, "solar panel   : {solar}");
    out
}

fn write_rate_table(
    out: &mut String,
    result: &CampaignResult,
    direction: Direction,
) -> Result<(), OutputError> {
    let _ = writeln!(out, "{} rate percentiles (Mbit/s)", direction.label());
    let _ = writeln!(out, "----------------------------------");
    let _ = writeln!(
        out,
        "{:<10} {:>7} {:>10} {:>10} {:>10}",
        "scheme", "tx_dbm", "p5", "p50", "p95"
    );
    for series in &result.series {
        if series.direction != direction {
            continue;
        }
        let cdf = &series.rate_cdf;
        let _ = writeln!(
            out,
            "{:<10} {:>7} {:>10.2} {:>10.2} {:>10.2}",
            series.scheme_label,
            series.tx_power_dbm,
            cdf.percentile(0.05)? / 1e6,
            cdf.percentile(0.50)? / 1e6,
            cdf.percentile(0.95)? / 1e6
        );
    }
    Ok(())
}

fn write_ee_table(
    out: &mut String,
    result: &CampaignResult,
    direction: Direction,
) -> Result<(), OutputError> {
    let _ = writeln!(out, "{} energy efficiency (bit/J)", direction.label());
    let _ = writeln!(out, "----------------------------------");
    let _ = writeln!(
        out,
        "{:<10} {:>7} {:>12} {:>12}",
        "scheme", "tx_dbm", "p50", "p95"
    );
    for series in &result.series {
        if series.direction != direction {
            continue;
        }
        let cdf = &series.ee_cdf;
        let _ = writeln!(
            out,
            "{:<10} {:>7} {:>12.4e} {:>12.4e}",
            series.scheme_label,
            series.tx_power_dbm,
            cdf.percentile(0.50)?,
            cdf.percentile(0.95)?
        );
    }
    Ok(())
}

// ====================================================================
// sweep / grouping tables
// ====================================================================

pub fn sweep_csv(table: &SweepTable) -> String {
    let mut out = String::new();
    out.push_str("scheme,tx_power_dbm,median_rate_bps,slope_mbps_per_db\n");
    for row in &table.rows {
        let slope = row
            .slope_mbps_per_db
            .map(|v| format!("{v}"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{}",
            row.scheme_label, row.tx_power_dbm, row.median_rate_bps, slope
        );
    }
    out
}

pub fn sweep_text(table: &SweepTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} median-rate sweep", table.direction.label());
    let _ = writeln!(
        out,
        "{:<10} {:>7} {:>14} {:>16}",
        "scheme", "tx_dbm", "median Mbit/s", "slope Mbit/s/dB"
    );
    for row in &table.rows {
        let slope = row
            .slope_mbps_per_db
            .map(|v| format!("{v:.3}"))
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{:<10} {:>7} {:>14.2} {:>16}",
            row.scheme_label,
            row.tx_power_dbm,
            row.median_rate_bps / 1e6,
            slope
        );
    }
    out
}

pub fn grouping_csv(selection: &GroupingSelection) -> String {
    let mut out = String::new();
    out.push_str("label,amplifiers,p_ris_w,mean_sum_rate_bps,median_ee_bit_per_joule,chosen\n");
    let chosen_label = selection.chosen.label();
    for row in &selection.table {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            row.label,
            row.amplifier_count,
            row.ris_power_w,
            row.mean_sum_rate_bps,
            row.median_ee_bit_per_joule,
            u8::from(row.label == chosen_label)
        );
    }
    out
}

pub fn grouping_text(selection: &GroupingSelection) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "grouping selection, objective {:?}: {}",
        selection.objective,
        selection.chosen.label()
    );
    let _ = writeln!(
        out,
        "{:<10} {:>10} {:>10} {:>16} {:>14}",
        "candidate", "amps", "P_RIS W", "mean sum Mbit/s", "median bit/J"
    );
    for row in &selection.table {
        let _ = writeln!(
            out,
            "{:<10} {:>10} {:>10.2} {:>16.2} {:>14.4e}",
            row.label,
            row.amplifier_count,
            row.ris_power_w,
            row.mean_sum_rate_bps / 1e6,
            row.median_ee_bit_per_joule
        );
    }
    out
}
