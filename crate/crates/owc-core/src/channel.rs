//! Ray-traced channel engine.
//!
//! Received power is accumulated per (access point, receiver branch) pair
//! from three contributions: the line-of-sight hop, first-order reflections
//! off a fine surface grid, and second-order reflections off a coarse grid.
//! Each contribution lands in a time-binned impulse response whose bin sum
//! is the DC channel gain H(0). All gains are per watt of transmitted
//! optical power, so transmit power and responsivity scale the result
//! downstream.
//!
//! Every public entry point reduces patches in a fixed order; the optional
//! `rayon` parallelism only distributes whole (user, branch) jobs, so
//! results are bit-identical across thread counts.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{discretize, lambertian_gain_unchecked, Room, SurfacePatch, Vec3};
use crate::receiver::{Adr, ReceiverBranch};
use crate::{Error, SPEED_OF_LIGHT};

/// Optical power of one RYGB laser diode per wavelength, W.
pub const LD_POWER_W: [f64; 4] = [0.8, 0.5, 0.3, 0.3];

/// Laser diodes per light unit.
pub const LDS_PER_UNIT: usize = 12;

/// A ceiling light unit: co-located RYGB laser diodes pointing straight
/// down, modeled as a first-order Lambertian point source.
#[derive(Clone, Debug, PartialEq)]
pub struct AccessPoint {
    /// 1-based unit number as published in assignment tables.
    pub id: u8,
    pub position: Vec3,
    /// Unit emission axis; straight down for ceiling units.
    pub orientation: Vec3,
    pub lambertian_order: f64,
    /// Total transmit power per wavelength, W (all LDs of the unit).
    pub power_w: [f64; 4],
}

impl AccessPoint {
    /// A standard unit: 12 RYGB LDs, downward, Lambertian order 1.
    pub fn unit(id: u8, position: Vec3) -> AccessPoint {
        let mut power_w = LD_POWER_W;
        for p in &mut power_w {
            *p *= LDS_PER_UNIT as f64;
        }
        AccessPoint {
            id,
            position,
            orientation: Vec3::new(0.0, 0.0, -1.0),
            lambertian_order: 1.0,
            power_w,
        }
    }
}

/// Spatial layout of the LDs inside one unit.
///
/// The default treats all LDs as one co-located point source; the grid
/// layout spreads them on a rectangular lattice for sensitivity checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LdLayout {
    Colocated,
    Grid {
        rows: usize,
        cols: usize,
        spacing_m: f64,
    },
}

/// Which propagation orders to trace and how to bin arrivals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceConfig {
    pub bin_width_s: f64,
    pub include_los: bool,
    pub include_first_order: bool,
    pub include_second_order: bool,
    /// Element edge for first-order reflections.
    pub fine_edge_m: f64,
    /// Element edge for second-order reflections.
    pub coarse_edge_m: f64,
    pub ld_layout: LdLayout,
    /// Keep the binned responses in the gain tensor (DC gains are always
    /// kept).
    pub store_responses: bool,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            // Resolves path differences of 3 mm, well below the surface
            // grids.
            bin_width_s: 1e-11,
            include_los: true,
            include_first_order: true,
            include_second_order: true,
            fine_edge_m: 0.05,
            coarse_edge_m: 0.20,
            ld_layout: LdLayout::Colocated,
            store_responses: true,
        }
    }
}

impl TraceConfig {
    pub fn los_only() -> Self {
        TraceConfig {
            include_first_order: false,
            include_second_order: false,
            ..TraceConfig::default()
        }
    }
}

/// Time-binned received power per watt transmitted for one (access point,
/// branch) path.
#[derive(Clone, Debug, PartialEq)]
pub struct ImpulseResponse {
    pub bin_width_s: f64,
    /// Arrival time of the first bin; never earlier than the straight-line
    /// transmitter-receiver delay.
    pub t0_s: f64,
    /// Gain collected per bin (dimensionless, per watt transmitted).
    pub bins: Vec<f64>,
    /// Sum of all bins, cached by [`ImpulseResponse::finalize`].
    pub dc_gain: f64,
}

impl ImpulseResponse {
    pub fn new(bin_width_s: f64, t0_s: f64) -> ImpulseResponse {
        ImpulseResponse {
            bin_width_s,
            t0_s,
            bins: Vec::new(),
            dc_gain: 0.0,
        }
    }

    /// Adds a path arriving at `delay_s` (absolute, >= t0).
    #[inline]
    pub fn deposit(&mut self, delay_s: f64, gain: f64) {
        if gain <= 0.0 {
            return;
        }
        let offset = (delay_s - self.t0_s) / self.bin_width_s;
        let idx = if offset > 0.0 { offset as usize } else { 0 };
        if idx >= self.bins.len() {
            self.bins.resize(idx + 1, 0.0);
        }
        self.bins[idx] += gain;
    }

    /// Recomputes the cached DC gain from the bins.
    pub fn finalize(&mut self) {
        self.dc_gain = self.bins.iter().sum();
    }

    /// Highest frequency representable by the binning.
    pub fn nyquist_hz(&self) -> f64 {
        0.5 / self.bin_width_s
    }

    /// Adds another response binned on the same grid.
    pub fn merge(&mut self, other: &ImpulseResponse) {
        assert_eq!(self.bin_width_s, other.bin_width_s, "bin width mismatch");
        assert_eq!(self.t0_s, other.t0_s, "t0 mismatch");
        if other.bins.len() > self.bins.len() {
            self.bins.resize(other.bins.len(), 0.0);
        }
        for (dst, src) in self.bins.iter_mut().zip(&other.bins) {
            *dst += src;
        }
        self.finalize();
    }
}

/// DC channel gains (and optionally impulse responses) indexed by
/// (user, branch, access point).
#[derive(Clone, Debug, PartialEq)]
pub struct GainTensor {
    users: usize,
    branches: usize,
    aps: usize,
    dc: Vec<f64>,
    responses: Option<Vec<ImpulseResponse>>,
}

impl GainTensor {
    pub fn from_dc(users: usize, branches: usize, aps: usize, dc: Vec<f64>) -> GainTensor {
        assert_eq!(dc.len(), users * branches * aps);
        GainTensor {
            users,
            branches,
            aps,
            dc,
            responses: None,
        }
    }

    #[inline]
    fn index(&self, user: usize, branch: usize, ap: usize) -> usize {
        debug_assert!(user < self.users && branch < self.branches && ap < self.aps);
        (user * self.branches + branch) * self.aps + ap
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn branches(&self) -> usize {
        self.branches
    }

    pub fn aps(&self) -> usize {
        self.aps
    }

    #[inline]
    pub fn dc_gain(&self, user: usize, branch: usize, ap: usize) -> f64 {
        self.dc[self.index(user, branch, ap)]
    }

    pub fn dc_slice(&self) -> &[f64] {
        &self.dc
    }

    pub fn response(&self, user: usize, branch: usize, ap: usize) -> Option<&ImpulseResponse> {
        self.responses
            .as_ref()
            .map(|r| &r[self.index(user, branch, ap)])
    }

    pub fn has_responses(&self) -> bool {
        self.responses.is_some()
    }

    /// Adds another tensor of identical shape (used to combine per-order
    /// traces).
    pub fn merge(&mut self, other: &GainTensor) {
        assert_eq!(
            (self.users, self.branches, self.aps),
            (other.users, other.branches, other.aps),
            "tensor shape mismatch"
        );
        for (dst, src) in self.dc.iter_mut().zip(&other.dc) {
            *dst += src;
        }
        match (&mut self.responses, &other.responses) {
            (Some(a), Some(b)) => {
                for (dst, src) in a.iter_mut().zip(b) {
                    dst.merge(src);
                }
            }
            (None, None) => {}
            _ => panic!("cannot merge tensors with and without responses"),
        }
    }
}

/// One emitting point of an access point (several when the LD grid layout
/// is enabled).
#[derive(Clone, Copy, Debug)]
struct Source {
    ap_index: usize,
    position: Vec3,
    orientation: Vec3,
    order: f64,
    /// Fraction of the unit's power emitted by this point.
    weight: f64,
}

fn sources_for(aps: &[AccessPoint], layout: LdLayout) -> Vec<Source> {
    let mut sources = Vec::new();
    for (ap_index, ap) in aps.iter().enumerate() {
        match layout {
            LdLayout::Colocated => sources.push(Source {
                ap_index,
                position: ap.position,
                orientation: ap.orientation,
                order: ap.lambertian_order,
                weight: 1.0,
            }),
            LdLayout::Grid {
                rows,
                cols,
                spacing_m,
            } => {
                let weight = 1.0 / (rows * cols) as f64;
                for r in 0..rows {
                    for c in 0..cols {
                        let dx = (c as f64 - 0.5 * (cols as f64 - 1.0)) * spacing_m;
                        let dy = (r as f64 - 0.5 * (rows as f64 - 1.0)) * spacing_m;
                        sources.push(Source {
                            ap_index,
                            position: ap.position + Vec3::new(dx, dy, 0.0),
                            orientation: ap.orientation,
                            order: ap.lambertian_order,
                            weight,
                        });
                    }
                }
            }
        }
    }
    sources
}

/// Reflectivity-weighted gain and distance of the hop from one source point
/// to one patch, zero when the patch faces away or lies in the emission
/// plane.
#[inline]
fn source_to_patch(src: &Source, patch: &SurfacePatch) -> (f64, f64) {
    let dvec = patch.center - src.position;
    let d2 = dvec.norm_squared();
    if d2 <= 0.0 {
        return (0.0, 0.0);
    }
    let d = crate::math::sqrt(d2);
    let cos_emit = dvec.dot(src.orientation) / d;
    if cos_emit <= 0.0 {
        return (0.0, d);
    }
    let cos_incid = -dvec.dot(patch.normal) / d;
    if cos_incid <= 0.0 {
        return (0.0, d);
    }
    let gain = src.weight
        * patch.reflectivity
        * lambertian_gain_unchecked(src.order, d, cos_emit, cos_incid, patch.area_m2);
    (gain, d)
}

/// FOV-gated hop from a re-emitting patch into the detector, without the
/// patch reflectivity.
#[derive(Clone, Copy, Debug)]
struct RxTerm {
    patch: usize,
    gain: f64,
    dist: f64,
}

fn reception_terms(branch: &ReceiverBranch, patches: &[SurfacePatch]) -> Vec<RxTerm> {
    let mut terms = Vec::new();
    for (i, patch) in patches.iter().enumerate() {
        let Some((cos_incid, d)) = branch.reception(patch.center) else {
            continue;
        };
        let to_branch = branch.position - patch.center;
        let cos_emit = to_branch.dot(patch.normal) / d;
        if cos_emit <= 0.0 {
            continue;
        }
        let gain = lambertian_gain_unchecked(
            patch.lambertian_order,
            d,
            cos_emit,
            cos_incid,
            branch.area_m2,
        );
        if gain > 0.0 {
            terms.push(RxTerm {
                patch: i,
                gain,
                dist: d,
            });
        }
    }
    terms
}

fn accumulate_los(sources: &[Source], branch: &ReceiverBranch, out: &mut [ImpulseResponse]) {
    for src in sources {
        if let Some((cos_incid, d)) = branch.reception(src.position) {
            let dvec = branch.position - src.position;
            let cos_emit = dvec.dot(src.orientation) / d;
            if cos_emit <= 0.0 {
                continue;
            }
            let gain = src.weight
                * lambertian_gain_unchecked(src.order, d, cos_emit, cos_incid, branch.area_m2);
            out[src.ap_index].deposit(d / SPEED_OF_LIGHT, gain);
        }
    }
}

fn accumulate_first_order(
    sources: &[Source],
    branch: &ReceiverBranch,
    patches: &[SurfacePatch],
    out: &mut [ImpulseResponse],
) {
    let rx = reception_terms(branch, patches);
    for src in sources {
        for term in &rx {
            let (hop1, d1) = source_to_patch(src, &patches[term.patch]);
            if hop1 > 0.0 {
                out[src.ap_index].deposit((d1 + term.dist) / SPEED_OF_LIGHT, hop1 * term.gain);
            }
        }
    }
}

fn accumulate_second_order(
    sources: &[Source],
    branch: &ReceiverBranch,
    patches: &[SurfacePatch],
    out: &mut [ImpulseResponse],
) {
    let rx = reception_terms(branch, patches);
    if rx.is_empty() {
        return;
    }
    let n_src = sources.len();
    // Source-to-patch tables laid out patch-major so the innermost source
    // loop stays contiguous.
    let mut gains = vec![0.0f64; patches.len() * n_src];
    let mut dists = vec![0.0f64; patches.len() * n_src];
    for (p, patch) in patches.iter().enumerate() {
        for (s, src) in sources.iter().enumerate() {
            let (g, d) = source_to_patch(src, patch);
            gains[p * n_src + s] = g;
            dists[p * n_src + s] = d;
        }
    }
    for term in &rx {
        let second = &patches[term.patch];
        let rx_gain = second.reflectivity * term.gain;
        for (first_idx, first) in patches.iter().enumerate() {
            if first_idx == term.patch {
                continue;
            }
            let dvec = second.center - first.center;
            let d2 = dvec.norm_squared();
            if d2 <= 0.0 {
                continue;
            }
            let d = crate::math::sqrt(d2);
            let cos_emit = dvec.dot(first.normal) / d;
            if cos_emit <= 0.0 {
                continue;
            }
            let cos_incid = -dvec.dot(second.normal) / d;
            if cos_incid <= 0.0 {
                continue;
            }
            let mid = lambertian_gain_unchecked(
                first.lambertian_order,
                d,
                cos_emit,
                cos_incid,
                second.area_m2,
            );
            let tail = mid * rx_gain;
            let row = first_idx * n_src;
            for (s, src) in sources.iter().enumerate() {
                let g = gains[row + s];
                if g > 0.0 {
                    out[src.ap_index].deposit(
                        (dists[row + s] + d + term.dist) / SPEED_OF_LIGHT,
                        g * tail,
                    );
                }
            }
        }
    }
}

fn earliest_delay(sources: &[Source], ap_index: usize, branch: &ReceiverBranch) -> f64 {
    let mut min_d = f64::INFINITY;
    for src in sources.iter().filter(|s| s.ap_index == ap_index) {
        let d = (branch.position - src.position).norm();
        if d < min_d {
            min_d = d;
        }
    }
    if min_d.is_finite() {
        min_d / SPEED_OF_LIGHT
    } else {
        0.0
    }
}

/// Traces every order enabled in `cfg` for all access points into one
/// receiver branch. Entry `i` of the result belongs to `aps[i]`.
pub fn branch_responses(
    aps: &[AccessPoint],
    branch: &ReceiverBranch,
    patches_fine: &[SurfacePatch],
    patches_coarse: &[SurfacePatch],
    cfg: &TraceConfig,
) -> Vec<ImpulseResponse> {
    let sources = sources_for(aps, cfg.ld_layout);
    let mut out: Vec<ImpulseResponse> = (0..aps.len())
        .map(|a| ImpulseResponse::new(cfg.bin_width_s, earliest_delay(&sources, a, branch)))
        .collect();
    if cfg.include_los {
        accumulate_los(&sources, branch, &mut out);
    }
    if cfg.include_first_order {
        accumulate_first_order(&sources, branch, patches_fine, &mut out);
    }
    if cfg.include_second_order {
        accumulate_second_order(&sources, branch, patches_coarse, &mut out);
    }
    for ir in &mut out {
        ir.finalize();
    }
    out
}

/// Line-of-sight gain and delay for one (access point, branch) pair.
///
/// The gain is zero when the arrival falls outside the branch field of
/// view; the delay is always the straight-line flight time.
pub fn los_contribution(ap: &AccessPoint, branch: &ReceiverBranch) -> (f64, f64) {
    let aps = core::slice::from_ref(ap);
    let sources = sources_for(aps, LdLayout::Colocated);
    let mut out = vec![ImpulseResponse::new(1e-11, 0.0)];
    accumulate_los(&sources, branch, &mut out);
    out[0].finalize();
    let d = (branch.position - ap.position).norm();
    (out[0].dc_gain, d / SPEED_OF_LIGHT)
}

/// First-order reflection response of one (access point, branch) pair over
/// the given (fine) patch grid.
pub fn first_order_contribution(
    ap: &AccessPoint,
    branch: &ReceiverBranch,
    patches_fine: &[SurfacePatch],
    cfg: &TraceConfig,
) -> ImpulseResponse {
    let aps = core::slice::from_ref(ap);
    let sources = sources_for(aps, cfg.ld_layout);
    let mut out = vec![ImpulseResponse::new(
        cfg.bin_width_s,
        earliest_delay(&sources, 0, branch),
    )];
    accumulate_first_order(&sources, branch, patches_fine, &mut out);
    let mut ir = out.pop().expect("one response per access point");
    ir.finalize();
    ir
}

/// Second-order reflection response of one (access point, branch) pair over
/// the given (coarse) patch grid: ordered patch pairs, visibility decided
/// by cosine signs (the box room is convex).
pub fn second_order_contribution(
    ap: &AccessPoint,
    branch: &ReceiverBranch,
    patches_coarse: &[SurfacePatch],
    cfg: &TraceConfig,
) -> ImpulseResponse {
    let aps = core::slice::from_ref(ap);
    let sources = sources_for(aps, cfg.ld_layout);
    let mut out = vec![ImpulseResponse::new(
        cfg.bin_width_s,
        earliest_delay(&sources, 0, branch),
    )];
    accumulate_second_order(&sources, branch, patches_coarse, &mut out);
    let mut ir = out.pop().expect("one response per access point");
    ir.finalize();
    ir
}

/// Full impulse response (all orders enabled in `cfg`) for one pair,
/// discretizing the room surfaces on demand.
pub fn impulse_response(
    ap: &AccessPoint,
    branch: &ReceiverBranch,
    room: &Room,
    cfg: &TraceConfig,
) -> Result<ImpulseResponse, Error> {
    let fine = if cfg.include_first_order {
        discretize(room, cfg.fine_edge_m)?
    } else {
        Vec::new()
    };
    let coarse = if cfg.include_second_order {
        discretize(room, cfg.coarse_edge_m)?
    } else {
        Vec::new()
    };
    let aps = core::slice::from_ref(ap);
    let mut out = branch_responses(aps, branch, &fine, &coarse, cfg);
    Ok(out.pop().expect("one response per access point"))
}

#[cfg(feature = "rayon")]
fn map_jobs<T: Sync, R: Send>(jobs: &[T], f: impl Fn(&T) -> R + Send + Sync) -> Vec<R> {
    use rayon::prelude::*;
    jobs.par_iter().map(f).collect()
}

#[cfg(not(feature = "rayon"))]
fn map_jobs<T, R>(jobs: &[T], f: impl Fn(&T) -> R) -> Vec<R> {
    jobs.iter().map(f).collect()
}

/// Fills DC gains (and responses, unless disabled) for every
/// (user, branch, access point) triple.
///
/// Receivers must sit on the communication floor of `room`.
pub fn gain_tensor(
    room: &Room,
    aps: &[AccessPoint],
    receivers: &[Adr],
    cfg: &TraceConfig,
) -> Result<GainTensor, Error> {
    room.validate()?;
    for adr in receivers {
        room.contains(adr.position)?;
        if (adr.position.z - room.comm_floor_z_m).abs() > 1e-9 {
            return Err(Error::PositionOutsideRoom {
                axis: "z (communication floor)",
                value: adr.position.z,
                max: room.comm_floor_z_m,
            });
        }
    }
    let fine = if cfg.include_first_order {
        discretize(room, cfg.fine_edge_m)?
    } else {
        Vec::new()
    };
    let coarse = if cfg.include_second_order {
        discretize(room, cfg.coarse_edge_m)?
    } else {
        Vec::new()
    };

    let n_branches = 4;
    let jobs: Vec<(usize, usize)> = (0..receivers.len())
        .flat_map(|u| (0..n_branches).map(move |b| (u, b)))
        .collect();
    let per_job: Vec<Vec<ImpulseResponse>> = map_jobs(&jobs, |&(u, b)| {
        branch_responses(aps, &receivers[u].branches[b], &fine, &coarse, cfg)
    });

    let mut dc = Vec::with_capacity(receivers.len() * n_branches * aps.len());
    let mut responses = cfg.store_responses.then(Vec::new);
    for job_responses in per_job {
        for ir in job_responses {
            dc.push(ir.dc_gain);
            if let Some(out) = responses.as_mut() {
                out.push(ir);
            }
        }
    }
    Ok(GainTensor {
        users: receivers.len(),
        branches: n_branches,
        aps: aps.len(),
        dc,
        responses,
    })
}
