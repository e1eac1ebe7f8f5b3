//! Built-in configuration catalog: the standard room, the eight ceiling
//! units, the two 8-user placement scenarios with their published reference
//! allocations for each receiver orientation system, and a small 3-user
//! demo instance.

use alloc::vec;
use alloc::vec::Vec;

use crate::channel::{AccessPoint, GainTensor, TraceConfig};
use crate::geometry::{Room, Vec3};
use crate::metrics::UserAssignment;
use crate::receiver::NoiseModel;
use crate::{Error, Wavelength};

/// Standard room: 4 m x 8 m x 3 m, wall/ceiling reflectivity 0.8, floor
/// 0.3, communication floor at 1 m.
pub fn default_room() -> Room {
    Room {
        width_x_m: 4.0,
        length_y_m: 8.0,
        height_z_m: 3.0,
        reflectivity_walls_ceiling: 0.8,
        reflectivity_floor: 0.3,
        comm_floor_z_m: 1.0,
    }
}

/// The eight ceiling units on the standard 2 x 4 grid.
pub fn default_access_points() -> Vec<AccessPoint> {
    let mut aps = Vec::with_capacity(8);
    let mut id = 1u8;
    for x in [1.0, 3.0] {
        for y in [1.0, 3.0, 5.0, 7.0] {
            aps.push(AccessPoint::unit(id, Vec3::new(x, y, 3.0)));
            id += 1;
        }
    }
    aps
}

/// A fully specified simulation instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub scenario_id: u8,
    pub system_id: u8,
    pub room: Room,
    pub aps: Vec<AccessPoint>,
    /// User positions on the communication floor.
    pub users: Vec<Vec3>,
    /// Published allocation for this (scenario, system), when one exists.
    pub reference: Option<Vec<UserAssignment>>,
    pub noise: NoiseModel,
    pub trace: TraceConfig,
}

impl ScenarioSpec {
    /// The same checks applied to user-supplied configurations.
    pub fn validate(&self) -> Result<(), Error> {
        self.room.validate()?;
        for ap in &self.aps {
            self.room.contains(ap.position)?;
            if ap.id == 0 {
                return Err(Error::IndexOutOfRange {
                    entity: "access point id",
                    index: 0,
                    count: self.aps.len(),
                });
            }
        }
        for (i, a) in self.aps.iter().enumerate() {
            if self.aps.iter().skip(i + 1).any(|b| b.id == a.id) {
                return Err(Error::IndexOutOfRange {
                    entity: "duplicate access point id",
                    index: a.id as usize,
                    count: self.aps.len(),
                });
            }
        }
        for user in &self.users {
            self.room.contains(*user)?;
            if (user.z - self.room.comm_floor_z_m).abs() > 1e-9 {
                return Err(Error::PositionOutsideRoom {
                    axis: "z (communication floor)",
                    value: user.z,
                    max: self.room.comm_floor_z_m,
                });
            }
        }
        if let Some(reference) = &self.reference {
            if reference.len() != self.users.len() {
                return Err(Error::IndexOutOfRange {
                    entity: "reference row",
                    index: reference.len(),
                    count: self.users.len(),
                });
            }
            for row in reference {
                if row.ap_id == 0 || !self.aps.iter().any(|ap| ap.id == row.ap_id) {
                    return Err(Error::IndexOutOfRange {
                        entity: "reference access point",
                        index: row.ap_id as usize,
                        count: self.aps.len(),
                    });
                }
                if !(1..=4).contains(&row.branch_id) {
                    return Err(Error::IndexOutOfRange {
                        entity: "reference branch",
                        index: row.branch_id as usize,
                        count: 4,
                    });
                }
            }
        }
        Ok(())
    }
}

const SCENARIO_1_USERS: [(f64, f64); 8] = [
    (0.5, 6.5),
    (0.5, 7.5),
    (1.5, 6.5),
    (1.5, 7.5),
    (2.5, 0.5),
    (2.5, 1.5),
    (3.5, 0.5),
    (3.5, 1.5),
];

const SCENARIO_2_USERS: [(f64, f64); 8] = [
    (0.5, 1.5),
    (0.5, 5.5),
    (0.5, 6.5),
    (1.5, 3.5),
    (2.5, 1.5),
    (2.5, 6.5),
    (3.5, 3.5),
    (3.5, 5.5),
];

use Wavelength::{Red as R, Yellow as Y};

/// Reference allocations per (scenario, system): (ap, branch, wavelength).
const REFERENCE: [[[(u8, u8, Wavelength); 8]; 3]; 2] = [
    // Scenario 1, systems 1..3
    [
        [
            (4, 1, R),
            (4, 3, Y),
            (3, 3, R),
            (8, 4, R),
            (1, 2, R),
            (6, 1, R),
            (5, 2, Y),
            (5, 3, R),
        ],
        [
            (4, 1, R),
            (4, 4, Y),
            (3, 3, R),
            (8, 4, R),
            (1, 2, R),
            (6, 1, R),
            (5, 2, Y),
            (5, 3, R),
        ],
        [
            (3, 4, R),
            (4, 4, Y),
            (8, 1, R),
            (4, 3, R),
            (5, 1, R),
            (1, 3, R),
            (5, 2, Y),
            (6, 2, R),
        ],
    ],
    // Scenario 2, systems 1..3
    [
        [
            (1, 4, R),
            (3, 3, Y),
            (4, 1, R),
            (2, 3, R),
            (5, 4, R),
            (8, 1, R),
            (6, 3, Y),
            (7, 4, R),
        ],
        [
            (1, 4, R),
            (3, 4, Y),
            (4, 1, R),
            (2, 3, R),
            (5, 4, R),
            (8, 1, R),
            (6, 3, Y),
            (7, 3, R),
        ],
        [
            (1, 4, Y),
            (3, 4, Y),
            (4, 1, Y),
            (2, 3, R),
            (5, 4, R),
            (8, 1, R),
            (6, 3, Y),
            (7, 3, R),
        ],
    ],
];

/// One of the six built-in (scenario, system) configurations, including its
/// published reference allocation.
pub fn builtin(scenario_id: u8, system_id: u8) -> Result<ScenarioSpec, Error> {
    let users_xy: &[(f64, f64); 8] = match scenario_id {
        1 => &SCENARIO_1_USERS,
        2 => &SCENARIO_2_USERS,
        other => return Err(Error::InvalidScenarioId(other)),
    };
    if !(1..=3).contains(&system_id) {
        return Err(Error::InvalidSystemId(system_id));
    }
    let room = default_room();
    let users: Vec<Vec3> = users_xy
        .iter()
        .map(|&(x, y)| Vec3::new(x, y, room.comm_floor_z_m))
        .collect();
    let reference = REFERENCE[scenario_id as usize - 1][system_id as usize - 1]
        .iter()
        .map(|&(ap, branch, w)| UserAssignment::new(ap, w, branch))
        .collect();
    let spec = ScenarioSpec {
        scenario_id,
        system_id,
        room,
        aps: default_access_points(),
        users,
        reference: Some(reference),
        noise: NoiseModel::default(),
        trace: TraceConfig::default(),
    };
    spec.validate()?;
    Ok(spec)
}

/// A 3-user / 3-AP / two-wavelength demonstration instance.
///
/// Gains are constructed so each user has one dominant access point, the
/// first user also receives the other two units strongly, and the other two
/// users barely see anything but their own. The optimal allocation then
/// shields user 1 on Blue while users 2 and 3 reuse Red.
#[derive(Clone, Debug)]
pub struct DemoProblem {
    pub tensor: GainTensor,
    pub aps: Vec<AccessPoint>,
    pub noise: NoiseModel,
    pub wavelengths: Vec<Wavelength>,
}

pub fn demo_wdma() -> DemoProblem {
    let aps = vec![
        AccessPoint::unit(1, Vec3::new(1.0, 1.0, 3.0)),
        AccessPoint::unit(2, Vec3::new(2.0, 4.0, 3.0)),
        AccessPoint::unit(3, Vec3::new(3.0, 7.0, 3.0)),
    ];
    // dc[user][branch=0][ap]
    let dc = vec![
        2e-6, 1.5e-6, 1.5e-6, // user 0: exposed to every unit, dominant on 1
        1e-8, 2e-6, 1e-8, //     user 1: isolated, dominant on unit 2
        1e-8, 1e-8, 2e-6, //     user 2: isolated, dominant on unit 3
    ];
    DemoProblem {
        tensor: GainTensor::from_dc(3, 1, 3, dc),
        aps,
        noise: NoiseModel::default(),
        wavelengths: vec![Wavelength::Red, Wavelength::Blue],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_catalog_spot_rows() {
        let s1 = builtin(1, 1).unwrap();
        assert_eq!(s1.users[0], Vec3::new(0.5, 6.5, 1.0));
        assert_eq!(
            s1.reference.as_ref().unwrap()[0],
            UserAssignment::new(4, Wavelength::Red, 1)
        );

        let s2 = builtin(2, 3).unwrap();
        assert_eq!(s2.users[0], Vec3::new(0.5, 1.5, 1.0));
        assert_eq!(
            s2.reference.as_ref().unwrap()[0],
            UserAssignment::new(1, Wavelength::Yellow, 4)
        );

        let s3 = builtin(1, 2).unwrap();
        assert_eq!(
            s3.reference.as_ref().unwrap()[1],
            UserAssignment::new(4, Wavelength::Yellow, 4)
        );
    }

    #[test]
    fn builtin_catalog_has_48_reference_rows() {
        let mut rows = 0;
        for scenario in 1..=2 {
            for system in 1..=3 {
                let spec = builtin(scenario, system).unwrap();
                spec.validate().unwrap();
                assert_eq!(spec.users.len(), 8);
                assert_eq!(spec.aps.len(), 8);
                rows += spec.reference.as_ref().unwrap().len();
                // Reference rows are feasible: no (ap, wavelength) reuse.
                let reference = spec.reference.as_ref().unwrap();
                for (i, a) in reference.iter().enumerate() {
                    for b in reference.iter().skip(i + 1) {
                        assert!(!(a.ap_id == b.ap_id && a.wavelength == b.wavelength));
                    }
                }
            }
        }
        assert_eq!(rows, 48);
    }

    #[test]
    fn builtin_rejects_unknown_ids() {
        assert_eq!(builtin(3, 1).unwrap_err(), Error::InvalidScenarioId(3));
        assert_eq!(builtin(1, 0).unwrap_err(), Error::InvalidSystemId(0));
    }

    #[test]
    fn users_sit_on_the_communication_floor() {
        for scenario in 1..=2 {
            let spec = builtin(scenario, 1).unwrap();
            for user in &spec.users {
                assert_eq!(user.z, 1.0);
            }
        }
    }

    #[test]
    fn validation_catches_out_of_room_users() {
        let mut spec = builtin(1, 1).unwrap();
        spec.users[3] = Vec3::new(1.0, 1.0, 5.0);
        let err = spec.validate().unwrap_err();
        assert_eq!(
            err,
            Error::PositionOutsideRoom {
                axis: "z",
                value: 5.0,
                max: 3.0
            }
        );
    }
}
