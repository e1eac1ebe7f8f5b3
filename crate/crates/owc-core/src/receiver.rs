//! Angle-diversity receiver model: four narrow-FOV photodetector branches
//! per user, orientation systems, and the preamplifier + shot noise model.

use crate::geometry::{az_el_to_normal, Vec3};
use crate::math;
use crate::{Error, Wavelength, ELECTRON_CHARGE};

/// Base azimuths of the four branches; each orientation system adds a fixed
/// offset.
pub const BRANCH_BASE_AZIMUTHS_DEG: [f64; 4] = [0.0, 90.0, 180.0, 270.0];

/// Elevation shared by every branch of every system.
pub const BRANCH_ELEVATION_DEG: f64 = 60.0;

/// Detector field of view (hard cutoff on the incidence angle).
pub const DETECTOR_FOV_DEG: f64 = 25.0;

/// Photodetector area: 20 mm^2.
pub const DETECTOR_AREA_M2: f64 = 2e-5;

/// One photodetector branch of an angle-diversity receiver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReceiverBranch {
    pub position: Vec3,
    /// Unit normal the detector faces, from (azimuth, elevation).
    pub normal: Vec3,
    pub fov_deg: f64,
    pub area_m2: f64,
}

impl ReceiverBranch {
    /// Incidence cosine and distance for light arriving from `source`, or
    /// `None` when the source is outside the field of view (or behind the
    /// detector). Zero-distance sources are rejected as out of view.
    #[inline]
    pub fn reception(&self, source: Vec3) -> Option<(f64, f64)> {
        let to_source = source - self.position;
        let d2 = to_source.norm_squared();
        if d2 <= 0.0 {
            return None;
        }
        let d = math::sqrt(d2);
        let cos_incidence = to_source.dot(self.normal) / d;
        if cos_incidence < math::cos(self.fov_deg.to_radians()) {
            return None;
        }
        Some((cos_incidence, d))
    }
}

/// A four-branch angle-diversity receiver at one user position.
#[derive(Clone, Debug, PartialEq)]
pub struct Adr {
    pub position: Vec3,
    pub branches: [ReceiverBranch; 4],
    /// Azimuth offset applied to the base branch azimuths (30° times the
    /// system index for the built-in systems).
    pub azimuth_offset_deg: f64,
}

impl Adr {
    /// Builds the receiver for one of the three orientation systems
    /// (offsets 0°, 30° and 60°).
    pub fn for_system(position: Vec3, system_id: u8) -> Result<Adr, Error> {
        if !(1..=3).contains(&system_id) {
            return Err(Error::InvalidSystemId(system_id));
        }
        Adr::with_azimuth_offset(position, 30.0 * f64::from(system_id - 1))
    }

    /// Builds a receiver whose four branches sit at the base azimuths plus
    /// an arbitrary offset. All detectors are co-located at the user point.
    pub fn with_azimuth_offset(position: Vec3, azimuth_offset_deg: f64) -> Result<Adr, Error> {
        let mut branches = [ReceiverBranch {
            position,
            normal: Vec3::new(0.0, 0.0, 1.0),
            fov_deg: DETECTOR_FOV_DEG,
            area_m2: DETECTOR_AREA_M2,
        }; 4];
        for (branch, base) in branches.iter_mut().zip(BRANCH_BASE_AZIMUTHS_DEG) {
            let az = math::rem_euclid(base + azimuth_offset_deg, 360.0);
            branch.normal = az_el_to_normal(az, BRANCH_ELEVATION_DEG)?;
        }
        Ok(Adr {
            position,
            branches,
            azimuth_offset_deg,
        })
    }
}

/// Receiver-side noise parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    /// Preamplifier input noise current spectral density, A/sqrt(Hz).
    pub preamp_density_a_sqrt_hz: f64,
    /// Receiver bandwidth over which noise is integrated, Hz.
    pub bandwidth_hz: f64,
    /// Photodetector responsivity per wavelength, A/W.
    pub responsivity_a_per_w: [f64; 4],
    /// Elementary charge, C.
    pub electron_charge_c: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            preamp_density_a_sqrt_hz: 4.47e-12,
            bandwidth_hz: 4e9,
            responsivity_a_per_w: [0.4, 0.35, 0.3, 0.2],
            electron_charge_c: ELECTRON_CHARGE,
        }
    }
}

impl NoiseModel {
    #[inline]
    pub fn responsivity(&self, wavelength: Wavelength) -> f64 {
        self.responsivity_a_per_w[wavelength.index()]
    }
}

/// Total receiver noise variance in A^2 for a branch collecting
/// `total_optical_power_w` at `wavelength`.
///
/// The preamplifier contributes density^2 * B; every watt of received
/// optical power at the branch - desired, interfering, or unmodulated
/// background - contributes shot noise 2 q R P B.
pub fn noise_variance(
    total_optical_power_w: f64,
    wavelength: Wavelength,
    model: &NoiseModel,
) -> Result<f64, Error> {
    if total_optical_power_w < 0.0 {
        return Err(Error::NegativePower(total_optical_power_w));
    }
    let preamp = model.preamp_density_a_sqrt_hz * model.preamp_density_a_sqrt_hz;
    let shot = 2.0
        * model.electron_charge_c
        * model.responsivity(wavelength)
        * total_optical_power_w;
    Ok((preamp + shot) * model.bandwidth_hz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn azimuth_deg(n: Vec3) -> f64 {
        let horizontal = math::sqrt(n.x * n.x + n.y * n.y);
        assert!(horizontal > 1e-12);
        libm::atan2(n.y, n.x).to_degrees().rem_euclid(360.0)
    }

    #[test]
    fn system_azimuths_match_catalog() {
        let p = Vec3::new(1.0, 1.0, 1.0);
        let expected: [[f64; 4]; 3] = [
            [0.0, 90.0, 180.0, 270.0],
            [30.0, 120.0, 210.0, 300.0],
            [60.0, 150.0, 240.0, 330.0],
        ];
        for (system, azimuths) in (1..=3).zip(expected) {
            let adr = Adr::for_system(p, system).unwrap();
            for (branch, az) in adr.branches.iter().zip(azimuths) {
                assert_relative_eq!(azimuth_deg(branch.normal), az, epsilon = 1e-9);
                // All elevations are 60 degrees.
                assert_relative_eq!(branch.normal.z, 0.8660254037844386, epsilon = 1e-12);
                assert_eq!(branch.fov_deg, DETECTOR_FOV_DEG);
                assert_eq!(branch.area_m2, DETECTOR_AREA_M2);
                assert_eq!(branch.position, p);
            }
        }
    }

    #[test]
    fn invalid_system_rejected() {
        let p = Vec3::new(1.0, 1.0, 1.0);
        assert_eq!(
            Adr::for_system(p, 0).unwrap_err(),
            Error::InvalidSystemId(0)
        );
        assert_eq!(
            Adr::for_system(p, 4).unwrap_err(),
            Error::InvalidSystemId(4)
        );
    }

    #[test]
    fn branches_are_ninety_degrees_apart_and_systems_rotate() {
        let p = Vec3::new(2.0, 4.0, 1.0);
        for system in 1..=3 {
            let adr = Adr::for_system(p, system).unwrap();
            for i in 0..4 {
                let a = azimuth_deg(adr.branches[i].normal);
                let b = azimuth_deg(adr.branches[(i + 1) % 4].normal);
                assert_relative_eq!((b - a).rem_euclid(360.0), 90.0, epsilon = 1e-9);
            }
        }
        let s1 = Adr::for_system(p, 1).unwrap();
        let s2 = Adr::for_system(p, 2).unwrap();
        for (b1, b2) in s1.branches.iter().zip(&s2.branches) {
            let delta = (azimuth_deg(b2.normal) - azimuth_deg(b1.normal)).rem_euclid(360.0);
            assert_relative_eq!(delta, 30.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn offset_multiples_of_ninety_relabel_branches() {
        let p = Vec3::new(0.5, 6.5, 1.0);
        let base = Adr::with_azimuth_offset(p, 0.0).unwrap();
        let rotated = Adr::with_azimuth_offset(p, 90.0).unwrap();
        for i in 0..4 {
            assert_eq!(rotated.branches[i].normal, base.branches[(i + 1) % 4].normal);
        }
    }

    #[test]
    fn preamp_floor_matches_table_constants() {
        let model = NoiseModel::default();
        let floor = noise_variance(0.0, Wavelength::Red, &model).unwrap();
        // (4.47e-12)^2 * 4e9
        assert_relative_eq!(floor, 7.99236e-14, max_relative = 1e-9);
    }

    #[test]
    fn shot_term_matches_direct_arithmetic() {
        let model = NoiseModel::default();
        let total = noise_variance(1e-6, Wavelength::Red, &model).unwrap();
        let shot = total - noise_variance(0.0, Wavelength::Red, &model).unwrap();
        // 2 * 1.602176634e-19 * 0.4 * 1e-6 * 4e9
        assert_relative_eq!(shot, 5.1269652288e-16, max_relative = 1e-9);
        // Matches the coarser constant arithmetic with q = 1.602e-19.
        assert_relative_eq!(shot, 5.126e-16, max_relative = 2e-4);
    }

    #[test]
    fn noise_scales_linearly_in_bandwidth() {
        let model = NoiseModel::default();
        let doubled = NoiseModel {
            bandwidth_hz: 8e9,
            ..model
        };
        for p in [0.0, 1e-7, 3e-5] {
            let base = noise_variance(p, Wavelength::Green, &model).unwrap();
            let wide = noise_variance(p, Wavelength::Green, &doubled).unwrap();
            assert_relative_eq!(wide, 2.0 * base, max_relative = 1e-12);
        }
    }

    #[test]
    fn noise_is_monotone_and_positive() {
        let model = NoiseModel::default();
        let mut last = 0.0;
        for i in 0..50 {
            let p = i as f64 * 1e-6;
            let v = noise_variance(p, Wavelength::Blue, &model).unwrap();
            assert!(v > 0.0);
            assert!(v >= last);
            last = v;
        }
        assert_eq!(
            noise_variance(-1e-9, Wavelength::Red, &model).unwrap_err(),
            Error::NegativePower(-1e-9)
        );
    }

    #[test]
    fn reception_applies_fov_cutoff() {
        let p = Vec3::new(2.0, 2.0, 1.0);
        let branch = ReceiverBranch {
            position: p,
            normal: az_el_to_normal(0.0, 60.0).unwrap(),
            fov_deg: 25.0,
            area_m2: DETECTOR_AREA_M2,
        };
        // Straight overhead arrives 30 degrees off the branch normal: blocked.
        assert!(branch.reception(Vec3::new(2.0, 2.0, 3.0)).is_none());
        // A source along the branch normal is accepted with cosine ~1.
        let along = p + branch.normal * 2.0;
        let (cos_inc, d) = branch.reception(along).unwrap();
        assert_relative_eq!(cos_inc, 1.0, epsilon = 1e-12);
        assert_relative_eq!(d, 2.0, epsilon = 1e-12);
    }
}
