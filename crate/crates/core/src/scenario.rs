//! Deployment geometry: the service disk, the platform position, and the
//! slant-path geometry between ground nodes and the high-altitude platform.
//!
//! Gateways are dropped uniformly over a disk of `radius_km` centred on the
//! platform's ground projection. The ground station sits at a fixed offset
//! inside the disk.

use rand::Rng;

use crate::error::{Error, Result};

/// Cartesian position in km. `z_km` is height above ground.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position3D {
    pub x_km: f64,
    pub y_km: f64,
    pub z_km: f64,
}

impl Position3D {
    pub fn new(x_km: f64, y_km: f64, z_km: f64) -> Self {
        Self { x_km, y_km, z_km }
    }
}

/// Service-area description for one campaign.
#[derive(Debug, Clone, Copy)]
pub struct AreaSpec {
    /// Radius of the gateway drop disk, centred on the platform nadir.
    pub radius_km: f64,
    /// Platform altitude above ground.
    pub haps_altitude_km: f64,
    /// Fixed ground-station (donor) position; must lie inside the disk.
    pub ground_station: Position3D,
    /// Gateways dropped per Monte Carlo drop.
    pub num_gateways: usize,
}

impl Default for AreaSpec {
    fn default() -> Self {
        Self {
            radius_km: 50.0,
            haps_altitude_km: 20.0,
            ground_station: Position3D::new(5.0, 5.0, 0.0),
            num_gateways: 1000,
        }
    }
}

impl AreaSpec {
    /// Platform position: directly above the disk centre.
    pub fn haps_position(&self) -> Position3D {
        Position3D::new(0.0, 0.0, self.haps_altitude_km)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius_km > 0.0) {
            return Err(Error::Config(format!(
                "radius_km must be positive, got {}",
                self.radius_km
            )));
        }
        if !(self.haps_altitude_km > 0.0) {
            return Err(Error::Config(format!(
                "haps_altitude_km must be positive, got {}",
                self.haps_altitude_km
            )));
        }
        let gs = self.ground_station;
        if gs.z_km < 0.0 {
            return Err(Error::Config(format!(
                "ground_station height must be non-negative, got {}",
                gs.z_km
            )));
        }
        if gs.x_km.hypot(gs.y_km) > self.radius_km {
            return Err(Error::Config(format!(
                "ground_station ({}, {}) lies outside the {} km disk",
                gs.x_km, gs.y_km, self.radius_km
            )));
        }
        if self.num_gateways == 0 {
            return Err(Error::Config("num_gateways must be at least 1".into()));
        }
        Ok(())
    }
}

/// Geometry of one ground-to-platform link.
#[derive(Debug, Clone, Copy)]
pub struct LinkGeometry {
    pub horizontal_km: f64,
    pub slant_km: f64,
    /// Elevation seen from the lower endpoint toward the higher one, in
    /// (0, 90] degrees. 90 means directly overhead.
    pub elevation_deg: f64,
}

/// Computes horizontal distance, slant range and elevation between two
/// endpoints at different heights.
///
/// Exactly one endpoint may sit at each height level: the elevation angle is
/// defined at the lower endpoint looking toward the higher one, so the two
/// heights must differ.
pub fn link_geometry(a: Position3D, b: Position3D) -> Result<LinkGeometry> {
    let dx = a.x_km - b.x_km;
    let dy = a.y_km - b.y_km;
    let dz = a.z_km - b.z_km;
    let horizontal_km = dx.hypot(dy);
    if horizontal_km == 0.0 && dz == 0.0 {
        return Err(Error::Geometry("link endpoints coincide".into()));
    }
    if dz == 0.0 {
        return Err(Error::Geometry(
            "link endpoints are at the same height; elevation is undefined".into(),
        ));
    }
    let slant_km = horizontal_km.hypot(dz);
    let elevation_deg = dz.abs().atan2(horizontal_km).to_degrees();
    Ok(LinkGeometry {
        horizontal_km,
        slant_km,
        elevation_deg,
    })
}

/// Draws `num_gateways` positions uniformly over the service disk (z = 0).
///
/// Radius is sampled as `R * sqrt(u)` with a uniform angle, which is the
/// standard area-uniform disk sampler. Draw order is fixed so a given RNG
/// state always yields the same point set.
pub fn sample_gateway_positions<R: Rng + ?Sized>(area: &AreaSpec, rng: &mut R) -> Vec<Position3D> {
    let mut out = Vec::with_capacity(area.num_gateways);
    for _ in 0..area.num_gateways {
        let u: f64 = rng.gen();
        let v: f64 = rng.gen();
        let r = area.radius_km * u.sqrt();
        let theta = 2.0 * std::f64::consts::PI * v;
        out.push(Position3D::new(r * theta.cos(), r * theta.sin(), 0.0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn geometry_at_disk_edge() {
        let g = link_geometry(
            Position3D::new(50.0, 0.0, 0.0),
            Position3D::new(0.0, 0.0, 20.0),
        )
        .unwrap();
        assert!((g.horizontal_km - 50.0).abs() < 1e-12);
        assert!((g.slant_km - 53.852).abs() < 1e-3);
        assert!((g.elevation_deg - 21.801).abs() < 1e-3);
    }

    #[test]
    fn geometry_at_nadir() {
        let g = link_geometry(
            Position3D::new(0.0, 0.0, 0.0),
            Position3D::new(0.0, 0.0, 20.0),
        )
        .unwrap();
        assert!((g.horizontal_km - 0.0).abs() < 1e-12);
        assert!((g.slant_km - 20.0).abs() < 1e-12);
        assert!((g.elevation_deg - 90.0).abs() < 1e-12);
    }

    #[test]
    fn geometry_from_ground_station() {
        // Donor site at (5, 5, 0) looking at the platform.
        let g = link_geometry(
            Position3D::new(5.0, 5.0, 0.0),
            Position3D::new(0.0, 0.0, 20.0),
        )
        .unwrap();
        assert!((g.horizontal_km - 7.0711).abs() < 1e-4);
        assert!((g.slant_km - 21.2132).abs() < 1e-4);
        assert!((g.elevation_deg - 70.529).abs() < 1e-3);
    }

    #[test]
    fn geometry_is_symmetric_in_endpoint_order() {
        let a = Position3D::new(3.0, -4.0, 0.0);
        let b = Position3D::new(0.5, 2.0, 20.0);
        let ab = link_geometry(a, b).unwrap();
        let ba = link_geometry(b, a).unwrap();
        assert_eq!(ab.slant_km, ba.slant_km);
        assert_eq!(ab.elevation_deg, ba.elevation_deg);
    }

    #[test]
    fn degenerate_links_are_rejected() {
        let p = Position3D::new(1.0, 2.0, 0.0);
        assert!(link_geometry(p, p).is_err());
        assert!(link_geometry(p, Position3D::new(4.0, 2.0, 0.0)).is_err());
    }

    #[test]
    fn positions_stay_inside_the_disk() {
        let area = AreaSpec {
            num_gateways: 10_000,
            ..AreaSpec::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts = sample_gateway_positions(&area, &mut rng);
        assert_eq!(pts.len(), area.num_gateways);
        for p in &pts {
            assert!(p.x_km.hypot(p.y_km) <= area.radius_km + 1e-9);
            assert_eq!(p.z_km, 0.0);
        }
    }

    #[test]
    fn disk_sampling_is_area_uniform() {
        // Half the radius encloses a quarter of the area.
        let area = AreaSpec {
            num_gateways: 100_000,
            ..AreaSpec::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts = sample_gateway_positions(&area, &mut rng);
        let inner = pts
            .iter()
            .filter(|p| p.x_km.hypot(p.y_km) <= area.radius_km / 2.0)
            .count();
        let frac = inner as f64 / pts.len() as f64;
        // 3 standard errors of a Bernoulli(0.25) over 1e5 samples.
        assert!(
            (frac - 0.25).abs() < 3.0 * (0.25f64 * 0.75 / 1e5).sqrt(),
            "inner-disk fraction {frac} too far from 0.25"
        );
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let area = AreaSpec::default();
        let a = sample_gateway_positions(&area, &mut ChaCha8Rng::seed_from_u64(42));
        let b = sample_gateway_positions(&area, &mut ChaCha8Rng::seed_from_u64(42));
        let c = sample_gateway_positions(&area, &mut ChaCha8Rng::seed_from_u64(43));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn area_spec_validation() {
        assert!(AreaSpec::default().validate().is_ok());
        let bad_radius = AreaSpec {
            radius_km: -1.0,
            ..AreaSpec::default()
        };
        assert!(bad_radius.validate().is_err());
        let gs_outside = AreaSpec {
            ground_station: Position3D::new(60.0, 0.0, 0.0),
            ..AreaSpec::default()
        };
        assert!(gs_outside.validate().is_err());
        let no_gateways = AreaSpec {
            num_gateways: 0,
            ..AreaSpec::default()
        };
        assert!(no_gateways.validate().is_err());
    }
}
