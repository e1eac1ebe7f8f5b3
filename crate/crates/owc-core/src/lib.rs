//! Indoor optical wireless (VLC) downlink modeling and multi-user resource
//! allocation.
//!
//! The crate traces the indoor visible-light channel between ceiling-mounted
//! RYGB laser-diode access points and angle-diversity receivers: line of
//! sight plus first- and second-order Lambertian reflections off the room
//! surfaces, accumulated into time-binned impulse responses and DC gains.
//! On top of the channel it provides per-link metrics (SINR at a fixed data
//! rate, 3-dB channel bandwidth, OOK bit error rate) and an exact
//! branch-and-bound allocator that jointly assigns an access point, a
//! wavelength, and a receiver branch to every user under WDMA, with an
//! LP-file exporter for the equivalent integer program.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the default `std`
//! and `rayon` features enable the standard library and data-parallel
//! channel tracing. Results are identical whether or not `rayon` is enabled.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod allocator;
pub mod channel;
pub mod geometry;
pub mod metrics;
pub mod receiver;
pub mod scenarios;

mod error;
mod math;

pub use error::Error;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Elementary charge, C (2019 SI exact value).
pub const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;

/// The four WDMA channels offered by the RYGB laser diodes of each access
/// point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wavelength {
    Red,
    Yellow,
    Green,
    Blue,
}

impl Wavelength {
    /// All four wavelengths in fixed (index) order.
    pub const ALL: [Wavelength; 4] = [
        Wavelength::Red,
        Wavelength::Yellow,
        Wavelength::Green,
        Wavelength::Blue,
    ];

    /// Stable index into per-wavelength arrays.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Wavelength::Red => 0,
            Wavelength::Yellow => 1,
            Wavelength::Green => 2,
            Wavelength::Blue => 3,
        }
    }

    pub fn from_index(idx: usize) -> Option<Wavelength> {
        Wavelength::ALL.get(idx).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Wavelength::Red => "Red",
            Wavelength::Yellow => "Yellow",
            Wavelength::Green => "Green",
            Wavelength::Blue => "Blue",
        }
    }
}

impl core::fmt::Display for Wavelength {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}
