//! Bowen–Margulis–Sullivan sampling and finite-depth classification of
//! boundary points.
//!
//! The conservativity pipeline enumerates an orbit ball, estimates δ, builds
//! a Patterson–Sullivan histogram, samples pairs `(ξ, η)` from the BMS
//! quasi-product and runs the conical, recurrence and Myrberg statistics on
//! every sampled `ξ`. The indicators are reported side by side; nothing here
//! combines them into a proof.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FlowError, GeometryError};
use crate::geometry::{
    angular_dist, busemann, dist, dist_to_geodesic, gromov_product, visibility_constant,
    visual_angle, BoundaryPoint, DiskPoint, TangentVector,
};
use crate::group::{axis_and_length, classify, fixed_boundary_points, GroupPreset, IsometryClass};
use crate::measure::{
    fmt17, project_atoms, project_orbit, ps_histogram, Atom, MeasureHistogram,
};
use crate::orbit::{annuli_counts, enumerate_ball_with, EnumerationOptions, OrbitBall, ANNULUS_TOLERANCE};
use crate::series::{
    divergence_diagnostic, estimate_delta_counting, estimate_delta_partial_sum, default_s_grid,
    DeltaEstimate, DivergenceDiagnostic, DivergenceThresholds, DivergenceVerdict, SCHEMA_VERSION,
};

/// Proposals tried per sample before the sampler gives up.
const MAX_PROPOSALS: usize = 1_000_000;

/// Additive slack on the log-envelope.
const ENVELOPE_SLACK: f64 = 1e-9;

/// Envelope doublings allowed before a violation becomes an error.
const MAX_DOUBLINGS: u32 = 16;

/// `e^{r β_p(ξ, η)}`, the quasi-product density of the BMS measure.
pub fn bms_density(
    p: DiskPoint,
    r: f64,
    xi: BoundaryPoint,
    eta: BoundaryPoint,
) -> Result<f64, FlowError> {
    if xi == eta {
        return Err(GeometryError::CoincidentEndpoints.into());
    }
    Ok((r * gromov_product(p, xi, eta)?).exp())
}

/// Relative residual of the base-point change
/// `e^{rβ_p(ξ,η)} e^{−rβ_ξ(p,q)} e^{−rβ_η(p,q)} = e^{rβ_q(ξ,η)}`.
///
/// The left side is the density against `μ_p × μ_p` rewritten against
/// `μ_q × μ_q` through the cocycle, so a zero residual means the product
/// measure does not depend on the base point.
pub fn bms_base_point_residual(
    p: DiskPoint,
    q: DiskPoint,
    r: f64,
    xi: BoundaryPoint,
    eta: BoundaryPoint,
) -> Result<f64, FlowError> {
    let lhs = bms_density(p, r, xi, eta)?
        * (-r * busemann(xi, p, q)).exp()
        * (-r * busemann(eta, p, q)).exp();
    let rhs = bms_density(q, r, xi, eta)?;
    Ok((lhs / rhs - 1.0).abs())
}

/// One accepted pair from [`bms_sample`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BmsPairSample {
    pub index: usize,
    pub xi: BoundaryPoint,
    pub eta: BoundaryPoint,
    pub xi_bin: usize,
    pub eta_bin: usize,
    /// `e^{r β_p(ξ, η)}` at the accepted pair.
    pub density: f64,
    pub proposals: usize,
}

/// Samples plus the envelope that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BmsSampling {
    pub samples: Vec<BmsPairSample>,
    pub r: f64,
    pub envelope: f64,
    /// Times the envelope had to be doubled; each doubling reruns every sample.
    pub envelope_doublings: u32,
}

fn adjacent_bins(i: usize, j: usize, bins: usize) -> bool {
    let d = i.abs_diff(j);
    d.min(bins - d) <= 1
}

/// Upper bound of `β_p` over bin centers at least two bins apart, from the
/// separable form `β_p(ξ,η) = −2 ln(|ξ−η|/2) + h(ξ) + h(η)` with
/// `h(ξ) = ln(|ξ−p|²/(1−|p|²))`.
fn gromov_envelope(mu: &MeasureHistogram, support: &[usize]) -> f64 {
    let p = mu.base_point.as_complex();
    let h = |k: usize| {
        let xi = mu.center(k).to_complex();
        ((xi - p).norm_sqr() / (1.0 - p.norm_sqr())).ln()
    };
    let mut hs: Vec<f64> = support.iter().map(|&k| h(k)).collect();
    hs.sort_by(|a, b| b.total_cmp(a));
    let top = hs[0] + hs.get(1).copied().unwrap_or(hs[0]);
    let chord = 2.0 * (mu.bin_width()).sin();
    // the bound is attained at two-bin separations; keep it above rounding
    -2.0 * (chord / 2.0).ln() + top + ENVELOPE_SLACK
}

/// Draws pairs `(ξ, η) ∝ e^{r β_p(ξ,η)} μ(dξ) μ(dη)` by rejection from
/// `μ × μ` restricted to bin pairs that are neither equal nor adjacent.
///
/// Sample `k` uses its own ChaCha8 stream `k` under `seed`, so results do not
/// depend on thread count. Points are bin centers.
pub fn bms_sample(
    mu: &MeasureHistogram,
    r: f64,
    count: usize,
    seed: u64,
) -> Result<BmsSampling, FlowError> {
    if count == 0 {
        return Err(FlowError::NoSamples);
    }
    if mu.is_degenerate() {
        return Err(crate::error::MeasureError::Degenerate.into());
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(FlowError::InvalidArgument(format!("exponent {r} must be nonnegative")));
    }
    let support = mu.positive_bins();
    let bins = mu.bins;
    let separated = support
        .iter()
        .any(|&i| support.iter().any(|&j| !adjacent_bins(i, j, bins)));
    if !separated {
        return Err(FlowError::InvalidArgument(
            "measure has no pair of separated positive bins".into(),
        ));
    }
    let weights: Vec<f64> = support.iter().map(|&k| mu.weights[k]).collect();
    let picker = WeightedIndex::new(&weights)
        .map_err(|e| FlowError::InvalidArgument(format!("bin weights: {e}")))?;
    let mut envelope = (r * gromov_envelope(mu, &support)).exp();
    let mut doublings = 0;
    loop {
        let drawn: Vec<Result<BmsPairSample, (f64, usize)>> = (0..count)
            .into_par_iter()
            .map(|index| draw_pair(mu, r, envelope, &support, &picker, seed, index))
            .collect::<Result<_, FlowError>>()?;
        match drawn.iter().find_map(|d| d.as_ref().err()) {
            None => {
                return Ok(BmsSampling {
                    samples: drawn.into_iter().map(|d| d.unwrap()).collect(),
                    r,
                    envelope,
                    envelope_doublings: doublings,
                });
            }
            Some(&(density, index)) => {
                if doublings >= MAX_DOUBLINGS || !density.is_finite() {
                    return Err(FlowError::EnvelopeViolation { density, envelope });
                }
                log::warn!(
                    "BMS envelope {envelope} exceeded by density {density} at sample {index}; doubling"
                );
                envelope *= 2.0;
                doublings += 1;
            }
        }
    }
}

/// One rejection run; `Err((density, index))` reports an envelope violation.
fn draw_pair(
    mu: &MeasureHistogram,
    r: f64,
    envelope: f64,
    support: &[usize],
    picker: &WeightedIndex<f64>,
    seed: u64,
    index: usize,
) -> Result<Result<BmsPairSample, (f64, usize)>, FlowError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    for attempt in 1..=MAX_PROPOSALS {
        let i = support[picker.sample(&mut rng)];
        let j = support[picker.sample(&mut rng)];
        let u: f64 = rng.gen();
        if adjacent_bins(i, j, mu.bins) {
            continue;
        }
        let (xi, eta) = (mu.center(i), mu.center(j));
        let density = bms_density(mu.base_point, r, xi, eta)?;
        if density > envelope {
            return Ok(Err((density, index)));
        }
        if u * envelope <= density {
            return Ok(Ok(BmsPairSample {
                index,
                xi,
                eta,
                xi_bin: i,
                eta_bin: j,
                density,
                proposals: attempt,
            }));
        }
    }
    Err(FlowError::InvalidArgument(format!(
        "sample {index}: no proposal accepted in {MAX_PROPOSALS} tries"
    )))
}

/// `3 (R_{π/2} + d(p, p₀))`: the conical bound for rays from `p` when the
/// orbit is taken through `p₀`.
pub fn default_conical_threshold(p: DiskPoint, p0: DiskPoint) -> f64 {
    let r = visibility_constant(FRAC_PI_2).expect("π/2 is a valid angle");
    3.0 * (r + dist(p, p0))
}

/// `C_n` against depth `n` for one boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConicalProfile {
    /// Orbit points closer to `p` than this are ignored.
    pub escape_depth: f64,
    /// `(n, C_n)` with `C_n` the least distance from the ray `c_{p,ξ}` to an
    /// orbit point at depth in `[escape_depth, n]`; infinite while that set is empty.
    pub profile: Vec<(f64, f64)>,
    /// Least distance from the ray to an orbit point in the last quartile of depths.
    pub late_min: f64,
}

impl ConicalProfile {
    pub fn final_value(&self) -> f64 {
        self.profile.last().map_or(f64::INFINITY, |x| x.1)
    }

    /// `C_n` changes by at most `tolerance · max(C_q, scale)` over the last quartile
    /// of the profile, where `C_q` is the value at the start of the quartile.
    pub fn has_plateau(&self, tolerance: f64, scale: f64) -> bool {
        let n = self.profile.len();
        if n == 0 {
            return false;
        }
        let start = self.profile[quartile_start(n)].1;
        let end = self.final_value();
        if !end.is_finite() {
            return false;
        }
        start - end <= tolerance * start.max(scale)
    }

    /// Plateau and a final value within `threshold`.
    pub fn is_conical(&self, threshold: f64, tolerance: f64) -> bool {
        self.has_plateau(tolerance, threshold) && self.final_value() <= threshold
    }

    /// The ray passes within `threshold` of an orbit point in the last quartile.
    pub fn is_recurrent(&self, threshold: f64) -> bool {
        self.late_min <= threshold
    }
}

fn quartile_start(len: usize) -> usize {
    (3 * len) / 4
}

/// Distance from the atom to the ray leaving the chart origin at `ray_dir`:
/// `asinh(sinh d · sin Δ)` when the foot of the perpendicular lies on the
/// ray, otherwise the distance to the origin itself.
#[inline]
fn atom_ray_distance(a: &Atom, ray_dir: f64) -> f64 {
    let delta = angular_dist(a.direction, ray_dir);
    if delta <= FRAC_PI_2 {
        (a.distance.sinh() * delta.sin()).asinh()
    } else {
        a.distance
    }
}

/// Orbit atoms seen from a fixed base point, reused across many rays.
pub struct OrbitView<'a> {
    ball: &'a OrbitBall,
    p: DiskPoint,
    atoms: Vec<Atom>,
}

impl<'a> OrbitView<'a> {
    /// Atoms `αq` of the ball seen from `p`.
    pub fn new(ball: &'a OrbitBall, p: DiskPoint) -> Self {
        OrbitView {
            ball,
            p,
            atoms: project_atoms(ball, p),
        }
    }

    pub fn base_point(&self) -> DiskPoint {
        self.p
    }

    /// Conical profile of `ξ` at integer depths from `⌈R/2⌉` to `⌊R⌋`.
    pub fn conical(&self, xi: BoundaryPoint) -> ConicalProfile {
        let radius = self.ball.radius;
        let escape = radius / 2.0;
        let ray_dir = visual_angle(self.p, xi.to_complex());
        let first = escape.floor() as usize + 1;
        let last = (radius + ANNULUS_TOLERANCE).floor() as usize;
        let depths: Vec<usize> = (first.max(1)..=last).collect();
        let quartile_depth = depths
            .get(quartile_start(depths.len()))
            .map_or(radius, |&n| n as f64);
        let mut profile = Vec::with_capacity(depths.len());
        let mut best = f64::INFINITY;
        let mut late_min = f64::INFINITY;
        let mut next = 0;
        for (a, e) in self.atoms.iter().zip(&self.ball.elements) {
            while next < depths.len() && e.distance > depths[next] as f64 + ANNULUS_TOLERANCE {
                profile.push((depths[next] as f64, best));
                next += 1;
            }
            if e.distance < escape || a.direction.is_nan() {
                continue;
            }
            let c = atom_ray_distance(a, ray_dir);
            best = best.min(c);
            if e.distance >= quartile_depth - 1.0 {
                late_min = late_min.min(c);
            }
        }
        while next < depths.len() {
            profile.push((depths[next] as f64, best));
            next += 1;
        }
        ConicalProfile {
            escape_depth: escape,
            profile,
            late_min,
        }
    }
}

/// [`ConicalProfile`] of one point; builds the atom view each call.
pub fn conical_statistic(xi: BoundaryPoint, ball: &OrbitBall, p: DiskPoint) -> ConicalProfile {
    OrbitView::new(ball, p).conical(xi)
}

/// A target pair `(η, η′)` for the Myrberg statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MyrbergTarget {
    pub eta: BoundaryPoint,
    pub eta_prime: BoundaryPoint,
}

/// `(pair, depth n, ε_n)` rows; `ε_n` is the best
/// `max(∠_x(αx, η), |αξ − η′|)` over ball elements at depth at most `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MyrbergProfile {
    pub targets: Vec<MyrbergTarget>,
    /// `eps[pair][n − 1]` for depths `n = 1..=⌊R⌋`.
    pub eps: Vec<Vec<f64>>,
}

impl MyrbergProfile {
    pub fn at_depth(&self, pair: usize, depth: usize) -> f64 {
        self.eps[pair][depth.clamp(1, self.eps[pair].len()) - 1]
    }

    pub fn depths(&self) -> usize {
        self.eps.first().map_or(0, Vec::len)
    }

    /// Largest ε over the pairs at `depth`.
    pub fn worst_at(&self, depth: usize) -> f64 {
        (0..self.eps.len())
            .map(|k| self.at_depth(k, depth))
            .fold(0.0, f64::max)
    }
}

/// Orbit of `x` seen from `x`, for the Myrberg statistic.
pub struct MyrbergView<'a> {
    ball: &'a OrbitBall,
    x: DiskPoint,
    atoms: Vec<Atom>,
}

impl<'a> MyrbergView<'a> {
    pub fn new(ball: &'a OrbitBall, x: DiskPoint) -> Self {
        MyrbergView {
            ball,
            x,
            atoms: project_orbit(ball, x, x),
        }
    }

    pub fn profile(&self, xi: BoundaryPoint, targets: &[MyrbergTarget]) -> MyrbergProfile {
        let depth_max = (self.ball.radius + ANNULUS_TOLERANCE).floor() as usize;
        let eps = targets
            .iter()
            .map(|t| self.profile_one(xi, t, depth_max))
            .collect();
        MyrbergProfile {
            targets: targets.to_vec(),
            eps,
        }
    }

    fn profile_one(&self, xi: BoundaryPoint, t: &MyrbergTarget, depth_max: usize) -> Vec<f64> {
        let eta_dir = visual_angle(self.x, t.eta.to_complex());
        let target = t.eta_prime.theta();
        let mut out = Vec::with_capacity(depth_max);
        let mut best = PI;
        let mut depth = 1;
        for (a, e) in self.atoms.iter().zip(&self.ball.elements) {
            while depth <= depth_max && e.distance > depth as f64 + ANNULUS_TOLERANCE {
                out.push(best);
                depth += 1;
            }
            if a.direction.is_nan() {
                continue;
            }
            let toward = angular_dist(a.direction, eta_dir);
            if toward >= best {
                continue;
            }
            let image = e.map.to_disk().apply_boundary(xi).theta();
            best = best.min(toward.max(angular_dist(image, target)));
        }
        while depth <= depth_max {
            out.push(best);
            depth += 1;
        }
        out
    }
}

/// Myrberg profile of one point; builds the view each call.
pub fn myrberg_statistic(
    xi: BoundaryPoint,
    targets: &[MyrbergTarget],
    ball: &OrbitBall,
    x: DiskPoint,
) -> Result<MyrbergProfile, FlowError> {
    if let Some(t) = targets.iter().find(|t| t.eta == t.eta_prime) {
        return Err(FlowError::InvalidArgument(format!(
            "target pair has coincident points at θ = {}",
            t.eta.theta()
        )));
    }
    Ok(MyrbergView::new(ball, x).profile(xi, targets))
}

/// The three heaviest bins whose centers are pairwise at least `min_sep`
/// apart, paired cyclically. Fewer than two such bins gives no targets.
pub fn default_myrberg_targets(mu: &MeasureHistogram, min_sep: f64) -> Vec<MyrbergTarget> {
    let mut order = mu.positive_bins();
    order.sort_by(|&a, &b| mu.weights[b].total_cmp(&mu.weights[a]).then(a.cmp(&b)));
    let mut chosen: Vec<BoundaryPoint> = Vec::new();
    for k in order {
        let c = mu.center(k);
        if chosen.iter().all(|x| x.angular_dist(&c) >= min_sep) {
            chosen.push(c);
            if chosen.len() == 3 {
                break;
            }
        }
    }
    match chosen.len() {
        0 | 1 => Vec::new(),
        2 => vec![MyrbergTarget {
            eta: chosen[0],
            eta_prime: chosen[1],
        }],
        _ => (0..3)
            .map(|i| MyrbergTarget {
                eta: chosen[i],
                eta_prime: chosen[(i + 1) % 3],
            })
            .collect(),
    }
}

/// Whether both ends of `c_v` sit near the support of `limit_approx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonwanderingResult {
    pub nonwandering: bool,
    /// Angular distance of `c_v(−∞)` to the support.
    pub backward_residual: f64,
    /// Angular distance of `c_v(+∞)` to the support.
    pub forward_residual: f64,
}

pub fn nonwandering_test(
    v: &TangentVector,
    limit_approx: &MeasureHistogram,
    eps: f64,
) -> Result<NonwanderingResult, FlowError> {
    if limit_approx.is_degenerate() {
        return Err(crate::error::MeasureError::Degenerate.into());
    }
    if !(eps >= 0.0) {
        return Err(FlowError::InvalidArgument(format!("eps {eps} must be nonnegative")));
    }
    let g = v.geodesic();
    let backward_residual = limit_approx.distance_to_support(g.theta_minus());
    let forward_residual = limit_approx.distance_to_support(g.theta_plus());
    Ok(NonwanderingResult {
        nonwandering: backward_residual <= eps && forward_residual <= eps,
        backward_residual,
        forward_residual,
    })
}

/// Knobs of the conservativity pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub radius: f64,
    /// `None`: `δ̂ + margin`.
    pub s: Option<f64>,
    pub margin: f64,
    pub bins: usize,
    pub samples: usize,
    pub seed: u64,
    pub p: DiskPoint,
    pub q: DiskPoint,
    pub max_elements: usize,
    pub thresholds: ClassifyThresholds,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            radius: 14.0,
            s: None,
            margin: 0.05,
            bins: 1024,
            samples: 50,
            seed: 0,
            p: DiskPoint::ORIGIN,
            q: DiskPoint::ORIGIN,
            max_elements: 1 << 24,
            thresholds: ClassifyThresholds::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyThresholds {
    /// `None`: [`default_conical_threshold`].
    pub conical: Option<f64>,
    /// Relative change of `C_n` allowed over the last quartile.
    pub plateau_tolerance: f64,
    /// Samples with every pair's ε below this at full depth count as Myrberg-like.
    pub myrberg: f64,
    /// Angular distance to the histogram support accepted as "in the limit set".
    pub limit_eps: f64,
    /// Least angular separation between default Myrberg targets.
    pub target_separation: f64,
    /// Pass fraction at which the conical and recurrence indicators read conservative.
    pub fraction: f64,
    /// Depth gap of the Myrberg trend comparison.
    pub myrberg_window: f64,
    pub divergence: DivergenceThresholds,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        ClassifyThresholds {
            conical: None,
            plateau_tolerance: 0.05,
            myrberg: 0.1,
            limit_eps: 0.02,
            target_separation: 0.5,
            fraction: 0.9,
            myrberg_window: 4.0,
            divergence: DivergenceThresholds::default(),
        }
    }
}

/// Per-sample outcome of the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub index: usize,
    pub point: BoundaryPoint,
    pub eta: BoundaryPoint,
    pub xi_bin: usize,
    pub density: f64,
    pub limit_dist: f64,
    pub conical: ConicalProfile,
    pub myrberg: MyrbergProfile,
    pub in_limit_set: bool,
    pub conical_pass: bool,
    pub recurrent: bool,
    pub myrberg_pass: bool,
}

/// Writes one CSV row per record; profiles are `depth:value` lists joined by `;`.
pub fn write_records_csv<W: Write>(records: &[ClassificationRecord], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "index",
        "xi_theta",
        "eta_theta",
        "xi_bin",
        "density",
        "limit_dist",
        "conical_final",
        "conical_late_min",
        "conical_profile",
        "myrberg_final",
        "myrberg_profile",
        "in_limit_set",
        "conical",
        "recurrent",
        "myrberg",
    ])?;
    for r in records {
        let conical = r
            .conical
            .profile
            .iter()
            .map(|(n, c)| format!("{n}:{}", fmt17(*c)))
            .collect::<Vec<_>>()
            .join(";");
        let depth = r.myrberg.depths();
        let myrberg = (0..r.myrberg.eps.len())
            .flat_map(|k| {
                r.myrberg.eps[k]
                    .iter()
                    .enumerate()
                    .map(move |(i, e)| format!("{k}/{}:{}", i + 1, fmt17(*e)))
            })
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            r.index.to_string(),
            fmt17(r.point.theta()),
            fmt17(r.eta.theta()),
            r.xi_bin.to_string(),
            fmt17(r.density),
            fmt17(r.limit_dist),
            fmt17(r.conical.final_value()),
            fmt17(r.conical.late_min),
            conical,
            fmt17(if depth > 0 { r.myrberg.worst_at(depth) } else { f64::NAN }),
            myrberg,
            r.in_limit_set.to_string(),
            r.conical_pass.to_string(),
            r.recurrent.to_string(),
            r.myrberg_pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// How one indicator reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndicatorReading {
    ConservativeConsistent,
    DissipativeConsistent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MyrbergTrend {
    pub pair: usize,
    pub target: MyrbergTarget,
    /// `(depth, median ε over samples)` at every integer depth.
    pub medians: Vec<(f64, f64)>,
    pub from_depth: f64,
    pub to_depth: f64,
    /// Median at `to_depth` strictly below the median at `from_depth`.
    pub decreasing: bool,
}

/// Conical and limit-set pass rates for Lebesgue-random directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LebesgueControl {
    pub directions: usize,
    pub in_limit_set: f64,
    pub conical: f64,
}

/// Elementary groups get this instead of the dichotomy indicators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementaryReport {
    pub positive_bins: usize,
    pub fixed_points: Vec<BoundaryPoint>,
    /// `ξ` is a fixed point of the first generator, `η′` a point away from it.
    pub negative_control: MyrbergTarget,
    pub negative_control_xi: BoundaryPoint,
    pub negative_control_eps: Vec<f64>,
    /// The control's ε stays above the Myrberg threshold at every depth.
    pub negative_control_triggered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservativityReport {
    pub schema_version: u32,
    pub preset: String,
    pub radius: f64,
    pub ball_size: usize,
    pub ball_complete: bool,
    pub delta: DeltaEstimate,
    pub delta_partial_sum: Option<f64>,
    pub s: f64,
    pub bins: usize,
    pub seed: u64,
    pub divergence: DivergenceDiagnostic,
    pub conical_threshold: f64,
    pub thresholds: ClassifyThresholds,
    pub elementary: Option<ElementaryReport>,
    pub samples: usize,
    pub envelope: Option<f64>,
    pub envelope_doublings: u32,
    pub limit_fraction: f64,
    pub conical_fraction: f64,
    pub recurrence_fraction: f64,
    pub myrberg_fraction: f64,
    pub myrberg_trends: Vec<MyrbergTrend>,
    /// Samples below the Myrberg threshold without a conical pass.
    pub lm_lc_violations: usize,
    pub lebesgue_control: Option<LebesgueControl>,
    pub series_indicator: IndicatorReading,
    pub conical_indicator: IndicatorReading,
    pub recurrence_indicator: IndicatorReading,
    pub myrberg_decreasing: bool,
    /// `elementary`, `conservative-consistent`, `dissipative-consistent` or `indicators-disagree`.
    pub verdict: String,
}

/// Limit points `ξ₀` whose rays from `q` follow an axis through (or near) `q`:
/// fixed points of short axial elements, closest axes first.
fn anchor_points(ball: &OrbitBall) -> Vec<BoundaryPoint> {
    let q = ball.base_q;
    let mut axes: Vec<(f64, usize, [BoundaryPoint; 2])> = ball
        .elements
        .iter()
        .take(4096)
        .enumerate()
        .filter(|(_, e)| classify(&e.map) == IsometryClass::Axial)
        .filter_map(|(i, e)| {
            let (axis, _) = axis_and_length(&e.map).ok()?;
            Some((dist_to_geodesic(q, &axis), i, [axis.theta_minus(), axis.theta_plus()]))
        })
        .collect();
    axes.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out: Vec<BoundaryPoint> = Vec::new();
    for (_, _, ends) in axes {
        for x in ends {
            if out.iter().all(|y| y.angular_dist(&x) > 1e-6) {
                out.push(x);
            }
        }
        if out.len() >= 16 {
            break;
        }
    }
    out
}

/// Per-bin candidates for refinement: the shallowest atoms of each bin that
/// lie at least `floor` from the base point.
struct BinAtoms {
    /// `(element index, weight)` grouped by bin.
    start: Vec<usize>,
    entries: Vec<(usize, f64)>,
}

impl BinAtoms {
    fn new(view: &OrbitView<'_>, mu: &MeasureHistogram, floor: f64) -> Self {
        let bins = mu.bins;
        let keyed: Vec<(usize, usize, f64)> = view
            .atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.theta.is_nan())
            .map(|(i, a)| (mu.bin_of(BoundaryPoint::new(a.theta)), i, a.distance))
            .collect();
        // per bin: shallowest depth at or beyond the floor, else the deepest atom
        let mut shallow = vec![f64::INFINITY; bins];
        let mut deepest = vec![f64::NEG_INFINITY; bins];
        for &(k, _, d) in &keyed {
            deepest[k] = deepest[k].max(d);
            if d >= floor {
                shallow[k] = shallow[k].min(d);
            }
        }
        let band: Vec<f64> = (0..bins)
            .map(|k| if shallow[k].is_finite() { shallow[k] } else { deepest[k] - 1.0 })
            .collect();
        let kept: Vec<&(usize, usize, f64)> = keyed
            .iter()
            .filter(|(k, _, d)| *d >= band[*k] && *d <= band[*k] + 1.0)
            .collect();
        let mut start = vec![0usize; bins + 1];
        for (k, _, _) in &kept {
            start[k + 1] += 1;
        }
        for k in 0..bins {
            start[k + 1] += start[k];
        }
        let mut cursor = start.clone();
        let mut entries = vec![(0, 0.0); kept.len()];
        for &&(k, i, d) in &kept {
            entries[cursor[k]] = (i, (-mu.s_param * d).exp());
            cursor[k] += 1;
        }
        BinAtoms { start, entries }
    }

    fn bin(&self, k: usize) -> &[(usize, f64)] {
        &self.entries[self.start[k]..self.start[k + 1]]
    }
}

/// Deepest-shell atoms seen from `q`, drawn to continue a refined ray.
struct DeepPool {
    entries: Vec<(usize, f64)>,
    weights: Option<WeightedIndex<f64>>,
}

impl DeepPool {
    fn new(ball: &OrbitBall, from_q: &[Atom], s: f64) -> Self {
        let entries: Vec<(usize, f64)> = from_q
            .iter()
            .zip(&ball.elements)
            .enumerate()
            .filter(|(_, (a, e))| e.distance >= ball.radius - 1.0 && !a.direction.is_nan())
            .map(|(i, (a, _))| (i, a.direction))
            .collect();
        let weights =
            WeightedIndex::new(entries.iter().map(|&(i, _)| (-s * ball.elements[i].distance).exp())).ok();
        DeepPool { entries, weights }
    }

    /// An element whose atom leaves `q` at an angle of at least `π/2` from `avoid`.
    fn draw(&self, avoid: f64, rng: &mut ChaCha8Rng) -> Option<usize> {
        let w = self.weights.as_ref()?;
        (0..64)
            .map(|_| self.entries[w.sample(rng)])
            .find(|&(_, dir)| angular_dist(dir, avoid) >= FRAC_PI_2)
            .map(|(i, _)| i)
    }
}

/// The anchor whose direction at `q` is farthest from `avoid`.
fn widest_anchor(anchors: &[BoundaryPoint], q: DiskPoint, avoid: f64) -> Option<BoundaryPoint> {
    anchors
        .iter()
        .max_by(|a, b| {
            let da = angular_dist(visual_angle(q, a.to_complex()), avoid);
            let db = angular_dist(visual_angle(q, b.to_complex()), avoid);
            da.total_cmp(&db)
        })
        .copied()
}

/// Replaces a bin-center sample by a limit point inside the bin.
///
/// An atom `αq` is drawn by weight among the shallowest atoms of the bin whose
/// shadows are no wider than a bin. A deepest-shell atom `βq` leaving `q` away
/// from `α⁻¹p` continues the ray, and an anchor `ξ₀` leaving `q` away from
/// `β⁻¹q` closes it: the result is `αβξ₀`, whose ray passes near `αq` and
/// then follows `α` of the segment `[q, βq]` past the edge of the ball.
#[allow(clippy::too_many_arguments)]
fn refine_point(
    ball: &OrbitBall,
    bin_atoms: &BinAtoms,
    pool: &DeepPool,
    anchors: &[BoundaryPoint],
    p: DiskPoint,
    k: usize,
    rng: &mut ChaCha8Rng,
    fallback: BoundaryPoint,
) -> BoundaryPoint {
    let candidates = bin_atoms.bin(k);
    if candidates.is_empty() || anchors.is_empty() {
        return fallback;
    }
    let pick = match WeightedIndex::new(candidates.iter().map(|c| c.1)) {
        Ok(w) => candidates[w.sample(rng)].0,
        Err(_) => candidates[0].0,
    };
    let q = ball.base_q;
    let g = ball.elements[pick].map.to_disk();
    let back_dir = visual_angle(q, g.inverse().apply(p).as_complex());
    let (g, back_dir) = match pool.draw(back_dir, rng) {
        Some(j) => {
            let h = ball.elements[j].map.to_disk();
            let back = visual_angle(q, h.inverse().apply(q).as_complex());
            (g.compose(&h), back)
        }
        None => (g, back_dir),
    };
    let anchor = widest_anchor(anchors, q, back_dir).unwrap_or(fallback);
    g.apply_boundary(anchor)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Enumerates the ball and runs [`conservativity_report_for_ball`].
pub fn conservativity_report(
    preset: &GroupPreset,
    options: &ClassifyOptions,
) -> Result<ConservativityReport, FlowError> {
    let ball = enumerate_ball_with(
        &preset.generators,
        options.p,
        options.q,
        options.radius,
        options.max_elements,
        EnumerationOptions {
            slack: None,
            filter: preset.filter,
        },
    )?;
    conservativity_report_for_ball(preset, &ball, options)
}

/// The end-to-end pipeline on a prebuilt ball whose base points are `options.p`
/// and `options.q`.
pub fn conservativity_report_for_ball(
    preset: &GroupPreset,
    ball: &OrbitBall,
    options: &ClassifyOptions,
) -> Result<ConservativityReport, FlowError> {
    conservativity_run(preset, ball, options).map(|(report, _)| report)
}

/// [`conservativity_report_for_ball`] together with the per-sample records;
/// elementary groups have no records.
pub fn conservativity_run(
    preset: &GroupPreset,
    ball: &OrbitBall,
    options: &ClassifyOptions,
) -> Result<(ConservativityReport, Vec<ClassificationRecord>), FlowError> {
    if options.samples == 0 {
        return Err(FlowError::NoSamples);
    }
    let th = &options.thresholds;
    let p = ball.base_p;
    let delta = estimate_delta_counting(&annuli_counts(ball))?;
    let delta_partial_sum = estimate_delta_partial_sum(ball, &default_s_grid()).ok();
    let s = options.s.unwrap_or(delta.value + options.margin);
    if s <= delta.value {
        log::warn!("exponent {s} does not exceed the estimated critical exponent {}", delta.value);
    }
    let divergence = divergence_diagnostic(ball, delta.value, &th.divergence)?;
    let mu = ps_histogram(ball, s, p, options.bins)?;
    let conical_threshold = th
        .conical
        .unwrap_or_else(|| default_conical_threshold(p, ball.base_q));
    let series_indicator = match divergence.verdict {
        DivergenceVerdict::Diverging => IndicatorReading::ConservativeConsistent,
        DivergenceVerdict::Converging => IndicatorReading::DissipativeConsistent,
        DivergenceVerdict::Inconclusive => IndicatorReading::Inconclusive,
    };
    let mut report = ConservativityReport {
        schema_version: SCHEMA_VERSION,
        preset: preset.name.clone(),
        radius: ball.radius,
        ball_size: ball.len(),
        ball_complete: ball.complete,
        delta,
        delta_partial_sum,
        s,
        bins: options.bins,
        seed: options.seed,
        divergence,
        conical_threshold,
        thresholds: th.clone(),
        elementary: None,
        samples: 0,
        envelope: None,
        envelope_doublings: 0,
        limit_fraction: 0.0,
        conical_fraction: 0.0,
        recurrence_fraction: 0.0,
        myrberg_fraction: 0.0,
        myrberg_trends: Vec::new(),
        lm_lc_violations: 0,
        lebesgue_control: None,
        series_indicator,
        conical_indicator: IndicatorReading::Inconclusive,
        recurrence_indicator: IndicatorReading::Inconclusive,
        myrberg_decreasing: false,
        verdict: String::new(),
    };
    if preset.elementary || mu.positive_bins().len() <= 2 {
        report.elementary = Some(elementary_report(preset, ball, &mu, th.myrberg)?);
        report.verdict = "elementary".into();
        return Ok((report, Vec::new()));
    }
    let (records, sampling) = classify_samples(ball, &mu, s, options, conical_threshold)?;
    let n = records.len() as f64;
    let frac = |f: &dyn Fn(&ClassificationRecord) -> bool| {
        records.iter().filter(|r| f(r)).count() as f64 / n
    };
    report.samples = records.len();
    report.envelope = Some(sampling.envelope);
    report.envelope_doublings = sampling.envelope_doublings;
    report.limit_fraction = frac(&|r| r.in_limit_set);
    report.conical_fraction = frac(&|r| r.conical_pass);
    report.recurrence_fraction = frac(&|r| r.recurrent);
    report.myrberg_fraction = frac(&|r| r.myrberg_pass);
    report.lm_lc_violations = records
        .iter()
        .filter(|r| r.myrberg_pass && !r.conical_pass)
        .count();
    report.myrberg_trends = myrberg_trends(&records, ball.radius, th.myrberg_window);
    report.myrberg_decreasing =
        !report.myrberg_trends.is_empty() && report.myrberg_trends.iter().all(|t| t.decreasing);
    report.lebesgue_control = Some(lebesgue_control(ball, &mu, options, conical_threshold));
    let reading = |f: f64| {
        if f >= th.fraction {
            IndicatorReading::ConservativeConsistent
        } else if f <= 1.0 - th.fraction {
            IndicatorReading::DissipativeConsistent
        } else {
            IndicatorReading::Inconclusive
        }
    };
    report.conical_indicator = reading(report.conical_fraction);
    report.recurrence_indicator = reading(report.recurrence_fraction);
    let all = [
        report.series_indicator,
        report.conical_indicator,
        report.recurrence_indicator,
    ];
    report.verdict = if all.iter().all(|r| *r == IndicatorReading::ConservativeConsistent) {
        "conservative-consistent"
    } else if all.iter().all(|r| *r == IndicatorReading::DissipativeConsistent) {
        "dissipative-consistent"
    } else {
        "indicators-disagree"
    }
    .into();
    Ok((report, records))
}

/// BMS samples, refined to limit points and classified, in sample order.
pub fn classify_samples(
    ball: &OrbitBall,
    mu: &MeasureHistogram,
    r: f64,
    options: &ClassifyOptions,
    conical_threshold: f64,
) -> Result<(Vec<ClassificationRecord>, BmsSampling), FlowError> {
    let th = &options.thresholds;
    let sampling = bms_sample(mu, r, options.samples, options.seed)?;
    let view = OrbitView::new(ball, mu.base_point);
    let myrberg_view = MyrbergView::new(ball, ball.base_q);
    let targets = default_myrberg_targets(mu, th.target_separation);
    let anchors = anchor_points(ball);
    let floor = (ball.radius / 2.0).max((4.0 / mu.bin_width()).ln());
    let bin_atoms = BinAtoms::new(&view, mu, floor);
    let pool = DeepPool::new(ball, &myrberg_view.atoms, mu.s_param);
    let depth = (ball.radius + ANNULUS_TOLERANCE).floor() as usize;
    let records = sampling
        .samples
        .par_iter()
        .map(|sample| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ 0x7265_6669_6e65);
            rng.set_stream(sample.index as u64);
            let xi = refine_point(
                ball,
                &bin_atoms,
                &pool,
                &anchors,
                mu.base_point,
                sample.xi_bin,
                &mut rng,
                sample.xi,
            );
            let conical = view.conical(xi);
            let myrberg = myrberg_view.profile(xi, &targets);
            let limit_dist = mu.distance_to_support(xi);
            let myrberg_pass = !targets.is_empty() && myrberg.worst_at(depth) <= th.myrberg;
            ClassificationRecord {
                index: sample.index,
                point: xi,
                eta: sample.eta,
                xi_bin: sample.xi_bin,
                density: sample.density,
                limit_dist,
                in_limit_set: limit_dist <= th.limit_eps,
                conical_pass: conical.is_conical(conical_threshold, th.plateau_tolerance),
                recurrent: conical.is_recurrent(conical_threshold),
                myrberg_pass,
                conical,
                myrberg,
            }
        })
        .collect();
    Ok((records, sampling))
}

fn myrberg_trends(records: &[ClassificationRecord], radius: f64, window: f64) -> Vec<MyrbergTrend> {
    let Some(first) = records.first() else {
        return Vec::new();
    };
    let depth_max = first.myrberg.depths();
    let to = depth_max;
    let from = (radius - window).floor().max(1.0) as usize;
    (0..first.myrberg.targets.len())
        .map(|pair| {
            let medians: Vec<(f64, f64)> = (1..=depth_max)
                .map(|n| {
                    let mut v: Vec<f64> = records.iter().map(|r| r.myrberg.at_depth(pair, n)).collect();
                    (n as f64, median(&mut v))
                })
                .collect();
            let at = |n: usize| medians[n.clamp(1, depth_max) - 1].1;
            MyrbergTrend {
                pair,
                target: first.myrberg.targets[pair],
                from_depth: from as f64,
                to_depth: to as f64,
                decreasing: at(to) < at(from),
                medians,
            }
        })
        .collect()
}

/// Uniform directions from a stream separate from the BMS samples.
fn lebesgue_control(
    ball: &OrbitBall,
    mu: &MeasureHistogram,
    options: &ClassifyOptions,
    conical_threshold: f64,
) -> LebesgueControl {
    let view = OrbitView::new(ball, mu.base_point);
    let th = &options.thresholds;
    let count = options.samples;
    let passes: Vec<(bool, bool)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ 0x6c65_6265_7367);
            rng.set_stream(i as u64);
            let xi = BoundaryPoint::new(rng.gen_range(0.0..TAU));
            let in_limit = mu.distance_to_support(xi) <= th.limit_eps;
            let conical = view
                .conical(xi)
                .is_conical(conical_threshold, th.plateau_tolerance);
            (in_limit, conical)
        })
        .collect();
    let n = count as f64;
    LebesgueControl {
        directions: count,
        in_limit_set: passes.iter().filter(|x| x.0).count() as f64 / n,
        conical: passes.iter().filter(|x| x.1).count() as f64 / n,
    }
}

fn elementary_report(
    preset: &GroupPreset,
    ball: &OrbitBall,
    mu: &MeasureHistogram,
    myrberg_threshold: f64,
) -> Result<ElementaryReport, FlowError> {
    let g = preset.generators[0];
    let fixed = fixed_boundary_points(&g)?;
    let xi = *fixed.last().expect("a nontrivial isometry fixes a boundary point");
    let eta_prime = fixed
        .iter()
        .copied()
        .find(|x| x.angular_dist(&xi) > 1e-6)
        .unwrap_or_else(|| BoundaryPoint::new(xi.theta() + PI));
    let eta = BoundaryPoint::new(xi.theta() + FRAC_PI_2);
    let target = MyrbergTarget { eta, eta_prime };
    let profile = MyrbergView::new(ball, ball.base_q).profile(xi, &[target]);
    let eps = profile.eps[0].clone();
    Ok(ElementaryReport {
        positive_bins: mu.positive_bins().len(),
        fixed_points: fixed,
        negative_control: target,
        negative_control_xi: xi,
        negative_control_triggered: eps.iter().all(|&e| e > myrberg_threshold),
        negative_control_eps: eps,
    })
}
