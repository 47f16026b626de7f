//! Decibel and dBm conversions used throughout the link-budget code.

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to dB.
pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Converts dBm to watts.
pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Converts watts to dBm.
pub fn watt_to_dbm(watt: f64) -> f64 {
    10.0 * watt.log10() + 30.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_round_trip() {
        for db in [-30.0, -3.0, 0.0, 10.0, 43.2] {
            assert!((linear_to_db(db_to_linear(db)) - db).abs() < 1e-12);
        }
    }

    #[test]
    fn dbm_reference_points() {
        assert!((dbm_to_watt(30.0) - 1.0).abs() < 1e-15);
        assert!((dbm_to_watt(0.0) - 1e-3).abs() < 1e-18);
        assert!((watt_to_dbm(2.0) - 33.0103).abs() < 1e-4);
    }

    #[test]
    fn thermal_noise_floor_at_100_mhz() {
        // -174 dBm/Hz over 100 MHz is close to 4e-13 W.
        let w = dbm_to_watt(-174.0) * 1e8;
        assert!((w - 3.98107e-13).abs() < 1e-17);
    }
}
