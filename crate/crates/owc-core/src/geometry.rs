//! Room and surface geometry: vectors, patch discretization, orientation
//! conversions, and the Lambertian single-hop gain every channel path is
//! built from.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Neg, Sub};

use crate::math;
use crate::Error;

/// A point or direction in room coordinates (meters for points, unitless for
/// directions).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    #[inline]
    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        math::sqrt(self.norm_squared())
    }

    /// Unit vector in this direction, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n > 0.0 {
            Some(self * (1.0 / n))
        } else {
            None
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// An empty box room. The origin sits at one floor corner; x, y and z span
/// the width, length and height.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Room {
    pub width_x_m: f64,
    pub length_y_m: f64,
    pub height_z_m: f64,
    /// Reflection coefficient of the four walls and the ceiling.
    pub reflectivity_walls_ceiling: f64,
    /// Reflection coefficient of the floor.
    pub reflectivity_floor: f64,
    /// Height of the communication floor, the plane receivers operate on.
    pub comm_floor_z_m: f64,
}

impl Room {
    pub fn new(
        width_x_m: f64,
        length_y_m: f64,
        height_z_m: f64,
        reflectivity_walls_ceiling: f64,
        reflectivity_floor: f64,
        comm_floor_z_m: f64,
    ) -> Result<Room, Error> {
        let room = Room {
            width_x_m,
            length_y_m,
            height_z_m,
            reflectivity_walls_ceiling,
            reflectivity_floor,
            comm_floor_z_m,
        };
        room.validate()?;
        Ok(room)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let positive = [
            ("width_x_m", self.width_x_m),
            ("length_y_m", self.length_y_m),
            ("height_z_m", self.height_z_m),
        ];
        for (field, value) in positive {
            if !(value > 0.0) {
                return Err(Error::InvalidRoom { field, value });
            }
        }
        let unit_range = [
            ("reflectivity_walls_ceiling", self.reflectivity_walls_ceiling),
            ("reflectivity_floor", self.reflectivity_floor),
        ];
        for (field, value) in unit_range {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidRoom { field, value });
            }
        }
        if !(self.comm_floor_z_m > 0.0 && self.comm_floor_z_m < self.height_z_m) {
            return Err(Error::InvalidRoom {
                field: "comm_floor_z_m",
                value: self.comm_floor_z_m,
            });
        }
        Ok(())
    }

    pub fn center(&self) -> Vec3 {
        Vec3::new(
            0.5 * self.width_x_m,
            0.5 * self.length_y_m,
            0.5 * self.height_z_m,
        )
    }

    /// Checks that a point lies inside the box (inclusive of the boundary).
    pub fn contains(&self, p: Vec3) -> Result<(), Error> {
        let axes = [
            ("x", p.x, self.width_x_m),
            ("y", p.y, self.length_y_m),
            ("z", p.z, self.height_z_m),
        ];
        for (axis, value, max) in axes {
            if !(0.0..=max).contains(&value) {
                return Err(Error::PositionOutsideRoom { axis, value, max });
            }
        }
        Ok(())
    }
}

/// A discretized surface element acting as a secondary Lambertian emitter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePatch {
    /// Cell center; emission and reception are evaluated here.
    pub center: Vec3,
    /// Unit normal pointing into the room.
    pub normal: Vec3,
    pub area_m2: f64,
    pub reflectivity: f64,
    /// Lambertian order of the re-emission pattern (1 for all room surfaces).
    pub lambertian_order: f64,
}

/// One of the six box surfaces, used in discretization error messages.
const SURFACES: [(&str, usize, usize, usize); 6] = [
    // (name, u-axis, v-axis, fixed axis); fixed axis value and normal set below
    ("floor", 0, 1, 2),
    ("ceiling", 0, 1, 2),
    ("wall x=0", 1, 2, 0),
    ("wall x=max", 1, 2, 0),
    ("wall y=0", 0, 2, 1),
    ("wall y=max", 0, 2, 1),
];

fn grid_steps(dimension_m: f64, edge_m: f64, surface: &'static str) -> Result<usize, Error> {
    let steps = math::round(dimension_m / edge_m);
    if steps < 1.0 || (steps * edge_m - dimension_m).abs() > 1e-9 {
        return Err(Error::NonDividingEdge {
            edge_m,
            dimension_m,
            surface,
        });
    }
    Ok(steps as usize)
}

/// Tiles all six room surfaces with square elements of side `element_edge_m`.
///
/// Patch normals point into the room, and every patch carries its surface's
/// reflectivity. The edge must divide each surface dimension exactly.
pub fn discretize(room: &Room, element_edge_m: f64) -> Result<Vec<SurfacePatch>, Error> {
    room.validate()?;
    if !(element_edge_m > 0.0) {
        return Err(Error::InvalidRoom {
            field: "element_edge_m",
            value: element_edge_m,
        });
    }
    let dims = [room.width_x_m, room.length_y_m, room.height_z_m];
    let mut patches = Vec::new();
    for (i, &(name, u_axis, v_axis, fixed_axis)) in SURFACES.iter().enumerate() {
        let at_max = i % 2 == 1;
        let nu = grid_steps(dims[u_axis], element_edge_m, name)?;
        let nv = grid_steps(dims[v_axis], element_edge_m, name)?;
        let fixed_value = if at_max { dims[fixed_axis] } else { 0.0 };
        let mut normal = [0.0; 3];
        normal[fixed_axis] = if at_max { -1.0 } else { 1.0 };
        let reflectivity = if name == "floor" {
            room.reflectivity_floor
        } else {
            room.reflectivity_walls_ceiling
        };
        for iu in 0..nu {
            for iv in 0..nv {
                let mut c = [0.0; 3];
                c[fixed_axis] = fixed_value;
                c[u_axis] = (iu as f64 + 0.5) * element_edge_m;
                c[v_axis] = (iv as f64 + 0.5) * element_edge_m;
                patches.push(SurfacePatch {
                    center: Vec3::new(c[0], c[1], c[2]),
                    normal: Vec3::new(normal[0], normal[1], normal[2]),
                    area_m2: element_edge_m * element_edge_m,
                    reflectivity,
                    lambertian_order: 1.0,
                });
            }
        }
    }
    Ok(patches)
}

/// Converts an (azimuth, elevation) pair in degrees to a unit direction.
///
/// Azimuth is measured from the +x axis, counterclockwise when viewed from
/// above; elevation is measured from the horizontal plane, so 90° is the
/// zenith. Azimuth must lie in [0, 360) and elevation in [0, 90].
pub fn az_el_to_normal(azimuth_deg: f64, elevation_deg: f64) -> Result<Vec3, Error> {
    if !(0.0..360.0).contains(&azimuth_deg) {
        return Err(Error::AngleOutOfRange {
            name: "azimuth_deg",
            value: azimuth_deg,
            min: 0.0,
            max: 360.0,
        });
    }
    if !(0.0..=90.0).contains(&elevation_deg) {
        return Err(Error::AngleOutOfRange {
            name: "elevation_deg",
            value: elevation_deg,
            min: 0.0,
            max: 90.0,
        });
    }
    let az = azimuth_deg.to_radians();
    let el = elevation_deg.to_radians();
    let (sin_el, cos_el) = (math::sin(el), math::cos(el));
    let (sin_az, cos_az) = (math::sin(az), math::cos(az));
    Ok(Vec3::new(cos_el * cos_az, cos_el * sin_az, sin_el))
}

/// Received power per transmitted watt for one direct Lambertian hop.
///
/// `order` is the emitter's Lambertian order, `distance_m` the hop length,
/// `cos_emit`/`cos_incid` the emission and incidence cosines (clamped to
/// [0, 1] by the caller), and `area_rx_m2` the receiving area:
/// (n+1)/(2 pi d^2) * cos_emit^n * cos_incid * area.
pub fn lambertian_gain(
    order: f64,
    distance_m: f64,
    cos_emit: f64,
    cos_incid: f64,
    area_rx_m2: f64,
) -> Result<f64, Error> {
    if !(distance_m > 0.0) {
        return Err(Error::CoincidentPoints);
    }
    Ok(lambertian_gain_unchecked(
        order, distance_m, cos_emit, cos_incid, area_rx_m2,
    ))
}

/// Hot-path variant of [`lambertian_gain`] without the distance check; the
/// caller must guarantee `distance_m > 0`.
#[inline]
pub(crate) fn lambertian_gain_unchecked(
    order: f64,
    distance_m: f64,
    cos_emit: f64,
    cos_incid: f64,
    area_rx_m2: f64,
) -> f64 {
    let d2 = distance_m * distance_m;
    // `d2` enters through a single division so that scaling the distance by
    // a power of two scales the gain exactly.
    let pattern = if order == 1.0 {
        cos_emit
    } else {
        math::powf(cos_emit, order)
    };
    (order + 1.0) * pattern * cos_incid * area_rx_m2 / (2.0 * PI * d2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn discretize_counts_paper_room() {
        let room = Room::new(4.0, 8.0, 3.0, 0.8, 0.3, 1.0).unwrap();
        assert_eq!(discretize(&room, 0.05).unwrap().len(), 54_400);
        assert_eq!(discretize(&room, 0.20).unwrap().len(), 3_400);
    }

    #[test]
    fn discretize_single_tile_per_surface() {
        let room = Room::new(2.0, 2.0, 2.0, 0.8, 0.3, 1.0).unwrap();
        let patches = discretize(&room, 2.0).unwrap();
        assert_eq!(patches.len(), 6);
    }

    #[test]
    fn discretize_rejects_non_dividing_edge() {
        let room = Room::new(4.0, 8.0, 3.0, 0.8, 0.3, 1.0).unwrap();
        let err = discretize(&room, 0.3).unwrap_err();
        match err {
            Error::NonDividingEdge { dimension_m, .. } => {
                // 0.3 divides neither 4 nor 8; the first offending surface
                // dimension is reported.
                assert_eq!(dimension_m, 4.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
        // The message names the offending dimension.
        #[cfg(feature = "std")]
        assert!(err.to_string().contains("4"));
    }

    #[test]
    fn discretize_conserves_area_and_points_inward() {
        let room = Room::new(4.0, 8.0, 3.0, 0.8, 0.3, 1.0).unwrap();
        let patches = discretize(&room, 0.2).unwrap();
        let total: f64 = patches.iter().map(|p| p.area_m2).sum();
        let expected = 2.0 * (4.0 * 8.0 + 4.0 * 3.0 + 8.0 * 3.0);
        assert_relative_eq!(total, expected, max_relative = 1e-9);
        let center = room.center();
        for p in &patches {
            assert!(p.normal.dot(center - p.center) > 0.0);
            assert_relative_eq!(p.normal.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn discretize_assigns_floor_reflectivity() {
        let room = Room::new(2.0, 2.0, 2.0, 0.8, 0.3, 1.0).unwrap();
        let patches = discretize(&room, 1.0).unwrap();
        let floor: Vec<_> = patches.iter().filter(|p| p.center.z == 0.0).collect();
        assert_eq!(floor.len(), 4);
        assert!(floor.iter().all(|p| p.reflectivity == 0.3));
        assert!(patches
            .iter()
            .filter(|p| p.center.z != 0.0)
            .all(|p| p.reflectivity == 0.8));
    }

    #[test]
    fn az_el_examples() {
        let zenith = az_el_to_normal(0.0, 90.0).unwrap();
        assert_relative_eq!(zenith.x, 0.0, epsilon = 1e-12);
        assert_relative_eq!(zenith.y, 0.0, epsilon = 1e-12);
        assert_relative_eq!(zenith.z, 1.0, epsilon = 1e-12);

        let east = az_el_to_normal(0.0, 60.0).unwrap();
        assert_relative_eq!(east.x, 0.5, epsilon = 1e-12);
        assert_relative_eq!(east.y, 0.0, epsilon = 1e-12);
        assert_relative_eq!(east.z, 0.8660254037844386, epsilon = 1e-12);

        let north = az_el_to_normal(90.0, 60.0).unwrap();
        assert_relative_eq!(north.x, 0.0, epsilon = 1e-12);
        assert_relative_eq!(north.y, 0.5, epsilon = 1e-12);
        assert_relative_eq!(north.z, 0.8660254037844386, epsilon = 1e-12);
    }

    #[test]
    fn az_el_rejects_out_of_range() {
        assert!(az_el_to_normal(360.0, 60.0).is_err());
        assert!(az_el_to_normal(-1.0, 60.0).is_err());
        assert!(az_el_to_normal(0.0, 90.5).is_err());
        assert!(az_el_to_normal(0.0, -0.5).is_err());
    }

    #[test]
    fn lambertian_gain_examples() {
        // (n+1)/(2 pi d^2) * area with all cosines 1:
        // 2 * 2e-5 / (2 pi * 4) = 1.5915494309189533e-6.
        let g2 = lambertian_gain(1.0, 2.0, 1.0, 1.0, 2e-5).unwrap();
        assert_relative_eq!(g2, 1.5915494309189533e-6, max_relative = 1e-12);

        // Doubling the distance quarters the gain exactly.
        let g4 = lambertian_gain(1.0, 4.0, 1.0, 1.0, 2e-5).unwrap();
        assert_eq!(g4, g2 / 4.0);
        assert_relative_eq!(g4, 3.9788735772973833e-7, max_relative = 1e-12);

        // Grazing emission collects nothing.
        assert_eq!(lambertian_gain(1.0, 3.7, 0.0, 0.9, 2e-5).unwrap(), 0.0);
    }

    #[test]
    fn lambertian_gain_rejects_zero_distance() {
        assert_eq!(
            lambertian_gain(1.0, 0.0, 1.0, 1.0, 2e-5),
            Err(Error::CoincidentPoints)
        );
    }

    proptest! {
        #[test]
        fn inverse_square_is_exact(d in 1e-3..1e3f64, cos_e in 0.0..1.0f64, cos_i in 0.0..1.0f64) {
            let near = lambertian_gain(1.0, d, cos_e, cos_i, 2e-5).unwrap();
            let far = lambertian_gain(1.0, 2.0 * d, cos_e, cos_i, 2e-5).unwrap();
            prop_assert_eq!(far, near / 4.0);
        }

        #[test]
        fn az_el_normals_are_unit(az in 0.0..360.0f64, el in 0.0..=90.0f64) {
            let az = if az >= 360.0 { 0.0 } else { az };
            let n = az_el_to_normal(az, el).unwrap();
            prop_assert!((n.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn discretize_area_conservation(
            w in 1..=8usize, l in 1..=8usize, h in 1..=8usize,
        ) {
            let (w, l, h) = (w as f64 * 0.5, l as f64 * 0.5, h as f64 * 0.5);
            let room = Room::new(w, l, h, 0.8, 0.3, h / 2.0).unwrap();
            let patches = discretize(&room, 0.25).unwrap();
            let total: f64 = patches.iter().map(|p| p.area_m2).sum();
            let expected = 2.0 * (w * l + w * h + l * h);
            prop_assert!((total - expected).abs() <= 1e-9 * expected);
            let center = room.center();
            for p in &patches {
                prop_assert!(p.normal.dot(center - p.center) > 0.0);
            }
        }
    }
}
