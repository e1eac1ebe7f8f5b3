//! Per-user link metrics: SINR under WDMA interference, 3-dB channel
//! bandwidth from the binned impulse response, and OOK bit error rate.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use crate::channel::{AccessPoint, GainTensor, ImpulseResponse};
use crate::math;
use crate::receiver::{noise_variance, NoiseModel};
use crate::{Error, Wavelength};

/// One user's assigned downlink: access point, wavelength and receiver
/// branch, using the 1-based unit and branch numbering of assignment tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UserAssignment {
    pub ap_id: u8,
    pub wavelength: Wavelength,
    pub branch_id: u8,
}

impl UserAssignment {
    pub fn new(ap_id: u8, wavelength: Wavelength, branch_id: u8) -> UserAssignment {
        UserAssignment {
            ap_id,
            wavelength,
            branch_id,
        }
    }

    #[inline]
    pub fn ap_index(&self) -> usize {
        self.ap_id as usize - 1
    }

    #[inline]
    pub fn branch_index(&self) -> usize {
        self.branch_id as usize - 1
    }

    /// Tie-break key: lexicographic on (access point, wavelength, branch).
    #[inline]
    pub(crate) fn lex_key(&self) -> (u8, usize, u8) {
        (self.ap_id, self.wavelength.index(), self.branch_id)
    }
}

fn check_indices(
    ua: &UserAssignment,
    tensor: &GainTensor,
) -> Result<(), Error> {
    if ua.ap_id == 0 || ua.ap_index() >= tensor.aps() {
        return Err(Error::IndexOutOfRange {
            entity: "access point",
            index: ua.ap_id as usize,
            count: tensor.aps(),
        });
    }
    if ua.branch_id == 0 || ua.branch_index() >= tensor.branches() {
        return Err(Error::IndexOutOfRange {
            entity: "branch",
            index: ua.branch_id as usize,
            count: tensor.branches(),
        });
    }
    Ok(())
}

/// Linear SINR of `user` under the (possibly partial) assignment.
///
/// The signal and each co-wavelength interferer enter as squared
/// photocurrents; the noise variance collects the preamplifier floor plus
/// shot noise from the optical power received at the user's wavelength from
/// every access point, modulated or not.
pub fn sinr(
    user: usize,
    assignment: &[Option<UserAssignment>],
    tensor: &GainTensor,
    aps: &[AccessPoint],
    noise: &NoiseModel,
) -> Result<f64, Error> {
    if user >= tensor.users() || assignment.len() != tensor.users() {
        return Err(Error::IndexOutOfRange {
            entity: "user",
            index: user,
            count: tensor.users(),
        });
    }
    if aps.len() != tensor.aps() {
        return Err(Error::ShapeMismatch {
            users: tensor.users(),
            branches: tensor.branches(),
            aps: aps.len(),
        });
    }
    let ua = assignment[user].ok_or(Error::UserUnassigned(user))?;
    check_indices(&ua, tensor)?;
    let w = ua.wavelength;
    let responsivity = noise.responsivity(w);
    let branch = ua.branch_index();

    let signal_current =
        responsivity * aps[ua.ap_index()].power_w[w.index()] * tensor.dc_gain(user, branch, ua.ap_index());

    let mut total_power_w = 0.0;
    for (a, ap) in aps.iter().enumerate() {
        total_power_w += ap.power_w[w.index()] * tensor.dc_gain(user, branch, a);
    }
    let sigma2 = noise_variance(total_power_w, w, noise)?;

    let mut interference = 0.0;
    for (v, other) in assignment.iter().enumerate() {
        if v == user {
            continue;
        }
        let Some(vb) = other else { continue };
        if vb.wavelength != w || vb.ap_index() == ua.ap_index() {
            continue;
        }
        check_indices(vb, tensor)?;
        let current = responsivity
            * aps[vb.ap_index()].power_w[w.index()]
            * tensor.dc_gain(user, branch, vb.ap_index());
        interference += current * current;
    }

    Ok(signal_current * signal_current / (sigma2 + interference))
}

/// Breakdown of one user's link budget, produced by [`link_report`].
#[derive(Clone, Debug, PartialEq)]
pub struct LinkReport {
    pub user: usize,
    pub assignment: UserAssignment,
    pub sinr_linear: f64,
    pub sinr_db: f64,
    pub ber: f64,
    pub signal_power_w: f64,
    /// Received optical power from each interfering co-wavelength access
    /// point, as (ap_id, watts).
    pub interference_powers_w: Vec<(u8, f64)>,
    pub noise_variance_a2: f64,
    pub channel_bandwidth: Option<BandwidthEstimate>,
}

/// Full link budget for one assigned user; bandwidth is included when the
/// tensor kept its impulse responses.
pub fn link_report(
    user: usize,
    assignment: &[Option<UserAssignment>],
    tensor: &GainTensor,
    aps: &[AccessPoint],
    noise: &NoiseModel,
) -> Result<LinkReport, Error> {
    let ua = assignment[user].ok_or(Error::UserUnassigned(user))?;
    check_indices(&ua, tensor)?;
    let sinr_linear = sinr(user, assignment, tensor, aps, noise)?;
    let w = ua.wavelength;
    let branch = ua.branch_index();

    let signal_power_w =
        aps[ua.ap_index()].power_w[w.index()] * tensor.dc_gain(user, branch, ua.ap_index());
    let mut total_power_w = 0.0;
    for (a, ap) in aps.iter().enumerate() {
        total_power_w += ap.power_w[w.index()] * tensor.dc_gain(user, branch, a);
    }
    let mut interference_powers_w = Vec::new();
    for (v, other) in assignment.iter().enumerate() {
        if v == user {
            continue;
        }
        let Some(vb) = other else { continue };
        if vb.wavelength != w || vb.ap_index() == ua.ap_index() {
            continue;
        }
        interference_powers_w.push((
            vb.ap_id,
            aps[vb.ap_index()].power_w[w.index()] * tensor.dc_gain(user, branch, vb.ap_index()),
        ));
    }
    let channel_bandwidth = tensor
        .response(user, branch, ua.ap_index())
        .and_then(|ir| channel_bandwidth(ir).ok());
    Ok(LinkReport {
        user,
        assignment: ua,
        sinr_linear,
        sinr_db: to_db(sinr_linear),
        ber: ber_ook(sinr_linear),
        signal_power_w,
        interference_powers_w,
        noise_variance_a2: noise_variance(total_power_w, w, noise)?,
        channel_bandwidth,
    })
}

/// 10 log10(x); negative infinity for a dead link.
pub fn to_db(linear: f64) -> f64 {
    if linear > 0.0 {
        10.0 * math::log10(linear)
    } else {
        f64::NEG_INFINITY
    }
}

pub fn from_db(db: f64) -> f64 {
    math::powf(10.0, db / 10.0)
}

/// 3-dB channel bandwidth estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandwidthEstimate {
    pub hz: f64,
    /// True when no 3-dB crossing exists below the Nyquist limit of the
    /// binning; `hz` is then only a lower bound.
    pub is_lower_bound: bool,
}

/// |H(f)| of the binned response evaluated at one frequency. Bin k is
/// treated as an arrival at its center (k + 1/2) * bin_width; the overall
/// delay t0 only contributes a phase and is dropped.
fn spectrum_magnitude(bins: &[f64], bin_width_s: f64, freq_hz: f64) -> f64 {
    let step = -2.0 * PI * freq_hz * bin_width_s;
    let (rot_im, rot_re) = (math::sin(step), math::cos(step));
    // Start at the first bin center.
    let half = 0.5 * step;
    let (mut ph_im, mut ph_re) = (math::sin(half), math::cos(half));
    let (mut re, mut im) = (0.0, 0.0);
    for &b in bins {
        re += b * ph_re;
        im += b * ph_im;
        let next_re = ph_re * rot_re - ph_im * rot_im;
        ph_im = ph_re * rot_im + ph_im * rot_re;
        ph_re = next_re;
    }
    math::sqrt(re * re + im * im)
}

/// Frequency grid used to bracket the 3-dB crossing: 10 MHz.
const BANDWIDTH_SCAN_STEP_HZ: f64 = 1e7;

/// Lowest frequency at which |H(f)| falls to |H(0)|/sqrt(2) (the optical
/// 3-dB point), located on a 10 MHz grid and refined by bisection.
///
/// A response with no crossing below the Nyquist limit of its binning is
/// flat at this resolution; the Nyquist limit is returned flagged as a
/// lower bound. An all-zero response is rejected.
pub fn channel_bandwidth(ir: &ImpulseResponse) -> Result<BandwidthEstimate, Error> {
    let last = ir.bins.iter().rposition(|&b| b != 0.0);
    let Some(last) = last else {
        return Err(Error::EmptyResponse);
    };
    let bins = &ir.bins[..=last];
    let dc: f64 = bins.iter().sum();
    if dc <= 0.0 {
        return Err(Error::EmptyResponse);
    }
    let target = dc / math::sqrt(2.0);
    let nyquist = ir.nyquist_hz();

    let mut prev = 0.0;
    let mut f = BANDWIDTH_SCAN_STEP_HZ;
    while f <= nyquist {
        if spectrum_magnitude(bins, ir.bin_width_s, f) <= target {
            // Bisect the bracketing interval down to 1 kHz.
            let (mut lo, mut hi) = (prev, f);
            while hi - lo > 1e3 {
                let mid = 0.5 * (lo + hi);
                if spectrum_magnitude(bins, ir.bin_width_s, mid) <= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(BandwidthEstimate {
                hz: hi,
                is_lower_bound: false,
            });
        }
        prev = f;
        f += BANDWIDTH_SCAN_STEP_HZ;
    }
    Ok(BandwidthEstimate {
        hz: nyquist,
        is_lower_bound: true,
    })
}

/// OOK bit error rate at the given linear SINR: Q(sqrt(SINR)) via the
/// complementary error function.
pub fn ber_ook(sinr_linear: f64) -> f64 {
    debug_assert!(sinr_linear >= 0.0);
    let x = math::sqrt(sinr_linear.max(0.0));
    0.5 * math::erfc(x / SQRT_2)
}
