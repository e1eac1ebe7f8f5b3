use crate::Wavelength;

/// Errors produced by the channel, receiver, metrics, and allocation layers.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{name} = {value} out of range [{min}, {max})")]
    AngleOutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("element edge {edge_m} m does not divide the {surface} dimension {dimension_m} m")]
    NonDividingEdge {
        edge_m: f64,
        dimension_m: f64,
        surface: &'static str,
    },

    #[error("invalid room: {field} = {value}")]
    InvalidRoom { field: &'static str, value: f64 },

    #[error("coincident points: distance must be positive")]
    CoincidentPoints,

    #[error("optical power must be nonnegative, got {0} W")]
    NegativePower(f64),

    #[error("receiver system id must be 1, 2 or 3, got {0}")]
    InvalidSystemId(u8),

    #[error("scenario id must be 1 or 2, got {0}")]
    InvalidScenarioId(u8),

    #[error("position component {axis} = {value} m outside [0, {max}] m")]
    PositionOutsideRoom {
        axis: &'static str,
        value: f64,
        max: f64,
    },

    #[error("impulse response has zero DC gain; bandwidth is undefined")]
    EmptyResponse,

    #[error("user {0} has no assignment")]
    UserUnassigned(usize),

    #[error("user count {users} exceeds the {capacity} available (access point, wavelength) slots")]
    Infeasible { users: usize, capacity: usize },

    #[error("users {user_a} and {user_b} share access point {ap_id} on {wavelength}")]
    DuplicateSlot {
        user_a: usize,
        user_b: usize,
        ap_id: u8,
        wavelength: Wavelength,
    },

    #[error("exhaustive search would visit ~{combinations:.3e} joint assignments (limit {limit:.1e})")]
    SearchTooLarge { combinations: f64, limit: f64 },

    #[error("assignment indexes entity out of range: {entity} {index} (count {count})")]
    IndexOutOfRange {
        entity: &'static str,
        index: usize,
        count: usize,
    },

    #[error("gain tensor shape ({users}, {branches}, {aps}) does not match problem")]
    ShapeMismatch {
        users: usize,
        branches: usize,
        aps: usize,
    },
}
