//! Discretized Patterson–Sullivan measures and their audits.
//!
//! An orbit atom `αq` is projected radially from the histogram's base point
//! `p`: it lands on the endpoint of the geodesic ray from `p` through `αq`.
//! Directions and distances come from the matrix `T_p⁻¹ α T_q`, so atoms near
//! the circle keep full precision.

use std::f64::consts::TAU;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::MeasureError;
use crate::geometry::{busemann, shadow_arc_from_parts, BoundaryPoint, DiskIsometry, DiskPoint};
use crate::group::{MobiusMap, MATRIX_TOLERANCE};
use crate::orbit::{OrbitBall, OrbitElement};
use crate::series::SCHEMA_VERSION;
use crate::sum::{tree_sum, tree_sum_by};

pub const MIN_BINS: usize = 64;
pub const MAX_BINS: usize = 65536;

/// Bins lighter than this fraction of the total are treated as empty.
pub const MASS_FLOOR: f64 = 1e-12;

/// Atoms this close to the base point have no direction and are dropped.
pub const NEAR_BASE: f64 = 1e-6;

/// One projected atom: distance from the base point, direction at the base
/// point, and boundary angle of the ray (NaN when the atom sits on the base).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Atom {
    pub distance: f64,
    pub direction: f64,
    pub theta: f64,
}

pub(crate) fn project_atoms(ball: &OrbitBall, p: DiskPoint) -> Vec<Atom> {
    project_orbit(ball, p, ball.base_q)
}

/// Atoms `αx` for every ball element, seen from `p`.
pub(crate) fn project_orbit(ball: &OrbitBall, p: DiskPoint, x: DiskPoint) -> Vec<Atom> {
    let chart = p.translation();
    let pull = chart.inverse();
    let push_q = x.translation();
    ball.elements
        .par_iter()
        .map(|e| {
            let g = pull * e.map.to_disk() * push_q;
            let distance = g.displacement_of_origin();
            if distance < NEAR_BASE {
                return Atom {
                    distance,
                    direction: f64::NAN,
                    theta: f64::NAN,
                };
            }
            let w = g.b() / g.a().conj();
            let direction = w.im.atan2(w.re).rem_euclid(TAU);
            let theta = chart
                .apply_boundary(BoundaryPoint::new(direction))
                .theta();
            Atom {
                distance,
                direction,
                theta,
            }
        })
        .collect()
}

/// Positions within this many bin widths of an edge snap to the edge, so that
/// angles related by an exact symmetry land in corresponding bins.
const EDGE_SNAP: f64 = 1e-9;

#[inline]
pub(crate) fn bin_of(theta: f64, bins: usize) -> usize {
    let x = theta / TAU * bins as f64;
    let edge = x.round();
    let x = if (x - edge).abs() < EDGE_SNAP { edge } else { x };
    (x.max(0.0) as usize) % bins
}

pub fn bin_center(k: usize, bins: usize) -> f64 {
    TAU * (k as f64 + 0.5) / bins as f64
}

/// A binned boundary measure `μ_p`; bin `k` covers `[2πk/B, 2π(k+1)/B)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureHistogram {
    pub bins: usize,
    pub weights: Vec<f64>,
    pub base_point: DiskPoint,
    pub s_param: f64,
    pub ball_radius: f64,
    pub total_mass: f64,
    /// `Σ_α e^{−s d(q, αq)}` over the ball.
    pub normalization: f64,
    pub atoms: usize,
    /// Atoms dropped for sitting on the base point.
    pub excluded: usize,
    /// Atoms with `d(P, αq)` below this were left out; 0 for the full sum.
    pub inner_radius: f64,
}

impl MeasureHistogram {
    pub fn is_degenerate(&self) -> bool {
        !(self.total_mass > 0.0)
    }

    pub fn bin_width(&self) -> f64 {
        TAU / self.bins as f64
    }

    pub fn center(&self, k: usize) -> BoundaryPoint {
        BoundaryPoint::new(bin_center(k, self.bins))
    }

    pub fn bin_of(&self, xi: BoundaryPoint) -> usize {
        bin_of(xi.theta(), self.bins)
    }

    /// Whether bin `k` carries more than the mass floor.
    pub fn is_positive(&self, k: usize) -> bool {
        self.weights[k] > MASS_FLOOR * self.total_mass
    }

    pub fn positive_bins(&self) -> Vec<usize> {
        (0..self.bins).filter(|&k| self.is_positive(k)).collect()
    }

    /// Mass of the counterclockwise arc `[start, start + len)`, splitting the
    /// two end bins in proportion to the overlap.
    pub fn arc_mass(&self, start: f64, len: f64) -> f64 {
        if len >= TAU {
            return self.total_mass;
        }
        let width = self.bin_width();
        let a = start.rem_euclid(TAU);
        let b = a + len;
        let mut mass = 0.0;
        let mut k = (a / width).floor() as usize;
        loop {
            let lo = k as f64 * width;
            let hi = lo + width;
            if lo >= b {
                break;
            }
            let overlap = hi.min(b) - lo.max(a);
            if overlap > 0.0 {
                mass += self.weights[k % self.bins] * (overlap / width);
            }
            k += 1;
        }
        mass
    }

    /// Angular distance from `xi` to the nearest positive bin (0 inside one).
    pub fn distance_to_support(&self, xi: BoundaryPoint) -> f64 {
        let k0 = self.bin_of(xi);
        if self.is_positive(k0) {
            return 0.0;
        }
        let width = self.bin_width();
        let theta = xi.theta();
        let mut best = f64::INFINITY;
        for step in 1..=self.bins / 2 {
            for k in [(k0 + step) % self.bins, (k0 + self.bins - step) % self.bins] {
                if self.is_positive(k) {
                    let lo = k as f64 * width;
                    let d = crate::geometry::angular_dist(theta, lo)
                        .min(crate::geometry::angular_dist(theta, lo + width));
                    best = best.min(d);
                }
            }
            if best < (step as f64 - 1.0) * width {
                break;
            }
        }
        best
    }

    /// CSV rows `bin_index,angle_center,weight` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bin_index", "angle_center", "weight"])?;
        for (k, x) in self.weights.iter().enumerate() {
            w.write_record([
                k.to_string(),
                fmt17(bin_center(k, self.bins)),
                fmt17(*x),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> HistogramSummary {
        let positive = self.positive_bins().len();
        let (argmax, max) = self
            .weights
            .iter()
            .enumerate()
            .fold((0, 0.0), |(bk, bw), (k, &w)| if w > bw { (k, w) } else { (bk, bw) });
        HistogramSummary {
            schema_version: SCHEMA_VERSION,
            bins: self.bins,
            base_point: [self.base_point.re(), self.base_point.im()],
            s_param: self.s_param,
            ball_radius: self.ball_radius,
            total_mass: self.total_mass,
            normalization: self.normalization,
            atoms: self.atoms,
            excluded: self.excluded,
            positive_bins: positive,
            top_bin: argmax,
            top_bin_weight: max,
        }
    }
}

/// Metadata and summary statistics of a histogram, for JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramSummary {
    pub schema_version: u32,
    pub bins: usize,
    pub base_point: [f64; 2],
    pub s_param: f64,
    pub ball_radius: f64,
    pub total_mass: f64,
    pub normalization: f64,
    pub atoms: usize,
    pub excluded: usize,
    pub positive_bins: usize,
    pub top_bin: usize,
    pub top_bin_weight: f64,
}

/// Full-precision decimal, 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn check_bins(bins: usize) -> Result<(), MeasureError> {
    if !(MIN_BINS..=MAX_BINS).contains(&bins) {
        return Err(MeasureError::BadBinCount(bins));
    }
    Ok(())
}

/// `Σ_α e^{−s d(q, αq)}` with `q` the ball's orbit base.
pub fn ball_normalization(ball: &OrbitBall, s: f64) -> f64 {
    tail_normalization(&ball.elements, ball.base_q, s)
}

fn tail_normalization(elements: &[OrbitElement], q: DiskPoint, s: f64) -> f64 {
    let pull = q.translation().inverse();
    let push = q.translation();
    tree_sum_by(elements, &|e: &OrbitElement| {
        let d = (pull * e.map.to_disk() * push).displacement_of_origin();
        (-s * d).exp()
    })
}

/// Bins weighted atoms; each bin is a pairwise sum over its atoms in ball order.
fn bin_atoms(bins: usize, atoms: &[(usize, f64)]) -> Vec<f64> {
    let mut counts = vec![0usize; bins + 1];
    for &(k, _) in atoms {
        counts[k + 1] += 1;
    }
    for k in 0..bins {
        counts[k + 1] += counts[k];
    }
    let mut sorted = vec![0.0; atoms.len()];
    let mut cursor = counts.clone();
    for &(k, w) in atoms {
        sorted[cursor[k]] = w;
        cursor[k] += 1;
    }
    (0..bins)
        .into_par_iter()
        .map(|k| tree_sum(&sorted[counts[k]..counts[k + 1]]))
        .collect()
}

/// Patterson's weighted Dirac sum `(1/P(s,q,q)) Σ e^{−s d(p, αq)} δ_{αq}`,
/// projected to the boundary from `p` and binned.
pub fn ps_histogram(
    ball: &OrbitBall,
    s: f64,
    p: DiskPoint,
    bins: usize,
) -> Result<MeasureHistogram, MeasureError> {
    ps_histogram_tail(ball, s, p, bins, 0.0)
}

/// [`ps_histogram`] over the shell `inner_radius ≤ d(P, αq) ≤ R` of the ball,
/// normalized by the same shell.
///
/// Dropping finitely many atoms does not change a weak limit along `s ↓ δ`
/// for a divergent series, but at a fixed `s > δ` the innermost atoms carry a
/// fixed share of the mass and show up as spikes at bin scale. The shadow
/// and cocycle audits run on the shell for that reason.
pub fn ps_histogram_tail(
    ball: &OrbitBall,
    s: f64,
    p: DiskPoint,
    bins: usize,
    inner_radius: f64,
) -> Result<MeasureHistogram, MeasureError> {
    check_bins(bins)?;
    if ball.is_empty() {
        return Err(MeasureError::EmptyBall);
    }
    if !(s >= 0.0) {
        return Err(MeasureError::InvalidArgument(format!("exponent {s} must be nonnegative")));
    }
    if !(inner_radius >= 0.0 && inner_radius <= ball.radius) {
        return Err(MeasureError::InvalidArgument(format!(
            "inner radius {inner_radius} must lie in [0, {}]",
            ball.radius
        )));
    }
    let first = ball.elements.partition_point(|e| e.distance < inner_radius);
    let shell = &ball.elements[first..];
    if shell.is_empty() {
        return Err(MeasureError::EmptyBall);
    }
    let normalization = tail_normalization(shell, ball.base_q, s);
    let projected = project_atoms(ball, p);
    let weighted: Vec<(usize, f64)> = projected[first..]
        .iter()
        .filter(|a| !a.theta.is_nan())
        .map(|a| (bin_of(a.theta, bins), (-s * a.distance).exp() / normalization))
        .collect();
    let weights = bin_atoms(bins, &weighted);
    let total_mass = tree_sum_by(&weighted, &|a: &(usize, f64)| a.1);
    Ok(MeasureHistogram {
        bins,
        weights,
        base_point: p,
        s_param: s,
        ball_radius: ball.radius,
        total_mass,
        normalization,
        atoms: weighted.len(),
        excluded: shell.len() - weighted.len(),
        inner_radius,
    })
}

/// Comparison of `ln(dμ_p/dμ_q)` with `−r β_ξ(p, q)` bin by bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocycleAuditReport {
    pub schema_version: u32,
    pub r: f64,
    /// `(bin, |ln(w_p/w_q) + r β_ξ(p,q)|)` over bins where both weights clear the floor.
    pub deviations: Vec<(usize, f64)>,
    pub max_abs_deviation: f64,
    /// Mean deviation weighted by `μ_p` mass on the compared bins.
    pub mean_deviation: f64,
    /// Fraction of `μ_p` mass on compared bins.
    pub mass_coverage: f64,
}

pub fn cocycle_audit(
    mu_p: &MeasureHistogram,
    mu_q: &MeasureHistogram,
    r: f64,
) -> Result<CocycleAuditReport, MeasureError> {
    if mu_p.bins != mu_q.bins {
        return Err(MeasureError::BinMismatch(mu_p.bins, mu_q.bins));
    }
    if mu_p.is_degenerate() || mu_q.is_degenerate() {
        return Err(MeasureError::Degenerate);
    }
    let (p, q) = (mu_p.base_point, mu_q.base_point);
    let mut deviations = Vec::new();
    let (mut weighted, mut mass) = (0.0, 0.0);
    for k in 0..mu_p.bins {
        let (wp, wq) = (mu_p.weights[k], mu_q.weights[k]);
        if !(mu_p.is_positive(k) && mu_q.is_positive(k)) {
            continue;
        }
        let dev = ((wp / wq).ln() + r * busemann(mu_p.center(k), p, q)).abs();
        deviations.push((k, dev));
        weighted += wp * dev;
        mass += wp;
    }
    Ok(CocycleAuditReport {
        schema_version: SCHEMA_VERSION,
        r,
        max_abs_deviation: deviations.iter().map(|d| d.1).fold(0.0, f64::max),
        mean_deviation: if mass > 0.0 { weighted / mass } else { 0.0 },
        mass_coverage: mass / mu_p.total_mass,
        deviations,
    })
}

/// Total-variation comparison of `α_* μ_p` with `μ_{αp}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub schema_version: u32,
    pub s: f64,
    pub alpha: MobiusMap,
    pub alpha_in_ball: bool,
    /// `d(P, αP)` for the ball's base point `P`.
    pub displacement: f64,
    pub total_variation: f64,
    /// Half the mass of atoms within `displacement` of the ball's edge; bounds
    /// the total variation.
    pub boundary_annulus_mass: f64,
}

pub fn equivariance_audit(
    ball: &OrbitBall,
    s: f64,
    p: DiskPoint,
    alpha: &MobiusMap,
    bins: usize,
) -> Result<EquivarianceReport, MeasureError> {
    check_bins(bins)?;
    if ball.is_empty() {
        return Err(MeasureError::EmptyBall);
    }
    let alpha_in_ball = alpha.is_identity() || ball.find(alpha, MATRIX_TOLERANCE).is_some();
    if !alpha_in_ball {
        log::warn!("equivariance audit: element {alpha:?} not found in the orbit ball");
    }
    let g: DiskIsometry = alpha.to_disk();
    let ap = g.apply(p);
    let normalization = ball_normalization(ball, s);
    let from_p = project_atoms(ball, p);
    let from_ap = project_atoms(ball, ap);

    let pushed: Vec<(usize, f64)> = from_p
        .iter()
        .filter(|a| !a.theta.is_nan())
        .map(|a| {
            let theta = g.apply_boundary(BoundaryPoint::new(a.theta)).theta();
            (bin_of(theta, bins), (-s * a.distance).exp() / normalization)
        })
        .collect();
    let direct: Vec<(usize, f64)> = from_ap
        .iter()
        .filter(|a| !a.theta.is_nan())
        .map(|a| (bin_of(a.theta, bins), (-s * a.distance).exp() / normalization))
        .collect();
    let h1 = bin_atoms(bins, &pushed);
    let h2 = bin_atoms(bins, &direct);
    let diffs: Vec<f64> = h1.iter().zip(&h2).map(|(a, b)| (a - b).abs()).collect();
    let total_variation = 0.5 * tree_sum(&diffs);

    let base = ball.base_p;
    let displacement = alpha.displacement(base);
    let edge = ball.radius - displacement;
    let edge_terms: Vec<f64> = ball
        .elements
        .iter()
        .zip(from_p.iter().zip(&from_ap))
        .filter(|(e, _)| e.distance > edge)
        .map(|(_, (a, b))| (-s * a.distance).exp() + (-s * b.distance).exp())
        .collect();
    let boundary_annulus_mass = 0.5 * tree_sum(&edge_terms) / normalization;
    Ok(EquivarianceReport {
        schema_version: SCHEMA_VERSION,
        s,
        alpha: *alpha,
        alpha_in_ball,
        displacement,
        total_variation,
        boundary_annulus_mass,
    })
}

/// Ratios `μ_p(pr_p B(αq, R)) / e^{−r d(p, αq)}` over the outer half of a ball.
///
/// Only shadows at least one bin wide enter the ratios: below the bin scale
/// the histogram reports an interpolated density, not a mass, and near a cusp
/// that density lags far behind the limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowLemmaReport {
    pub schema_version: u32,
    pub shadow_radius: f64,
    pub r: f64,
    pub bins: usize,
    pub evaluated: usize,
    /// Shadows that cover the whole circle, left out of the ratios.
    pub full_circle: usize,
    /// Proper shadows narrower than one bin, left out of the ratios.
    pub unresolved: usize,
    /// Resolved shadows that caught no mass, left out of the ratios.
    pub zero_mass: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max(max_ratio, 1/min_ratio)`.
    pub c_emp: f64,
    /// `log10(max_ratio / min_ratio)`.
    pub spread_log10: f64,
}

enum Shadow {
    Full,
    Unresolved,
    Ratio(f64),
}

pub fn shadow_lemma_audit(
    ball: &OrbitBall,
    mu_p: &MeasureHistogram,
    shadow_radius: f64,
    r: f64,
) -> Result<ShadowLemmaReport, MeasureError> {
    if mu_p.is_degenerate() {
        return Err(MeasureError::Degenerate);
    }
    if !(shadow_radius > 0.0) {
        return Err(MeasureError::InvalidArgument(format!(
            "shadow radius {shadow_radius} must be positive"
        )));
    }
    let p = mu_p.base_point;
    let atoms = project_atoms(ball, p);
    let half = ball.radius / 2.0;
    let width = mu_p.bin_width();
    let ratios: Vec<Shadow> = atoms
        .par_iter()
        .filter(|a| a.distance >= half && !a.theta.is_nan())
        .map(|a| {
            let arc = shadow_arc_from_parts(p, a.direction, a.distance, shadow_radius);
            if arc.is_full() {
                return Shadow::Full;
            }
            let (start, len) = arc.boundary_interval();
            if len < width {
                return Shadow::Unresolved;
            }
            Shadow::Ratio(mu_p.arc_mass(start, len) / (-r * a.distance).exp())
        })
        .collect();
    let evaluated = ratios.len();
    let full_circle = ratios.iter().filter(|x| matches!(x, Shadow::Full)).count();
    let unresolved = ratios.iter().filter(|x| matches!(x, Shadow::Unresolved)).count();
    let positive: Vec<f64> = ratios
        .iter()
        .filter_map(|x| match x {
            Shadow::Ratio(v) if *v > 0.0 => Some(*v),
            _ => None,
        })
        .collect();
    let zero_mass = evaluated - full_circle - unresolved - positive.len();
    let min_ratio = positive.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ratio = positive.iter().copied().fold(0.0, f64::max);
    let (c_emp, spread_log10) = if positive.is_empty() {
        (f64::INFINITY, f64::INFINITY)
    } else {
        (max_ratio.max(1.0 / min_ratio), (max_ratio / min_ratio).log10())
    };
    Ok(ShadowLemmaReport {
        schema_version: SCHEMA_VERSION,
        shadow_radius,
        r,
        bins: mu_p.bins,
        evaluated,
        full_circle,
        unresolved,
        zero_mass,
        min_ratio,
        max_ratio,
        c_emp,
        spread_log10,
    })
}

/// How much of the support the orbit of one heavy point reaches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalityReport {
    pub schema_version: u32,
    pub seed_theta: f64,
    pub positive_bins: usize,
    pub covered_bins: usize,
    pub coverage: f64,
}

/// Pushes the center of the heaviest bin by every ball element and reports the
/// fraction of positive bins that receive an image within `eps`.
pub fn support_minimality_probe(
    mu_p: &MeasureHistogram,
    ball: &OrbitBall,
    eps: f64,
) -> Result<MinimalityReport, MeasureError> {
    if mu_p.is_degenerate() {
        return Err(MeasureError::Degenerate);
    }
    if !(eps >= 0.0) {
        return Err(MeasureError::InvalidArgument(format!("eps {eps} must be nonnegative")));
    }
    let top = mu_p.summary().top_bin;
    let xi = mu_p.center(top);
    let bins = mu_p.bins;
    let width = mu_p.bin_width();
    let reach = (eps / width).ceil() as usize;
    let mut hit = vec![false; bins];
    let images: Vec<f64> = ball
        .elements
        .par_iter()
        .map(|e| e.map.to_disk().apply_boundary(xi).theta())
        .collect();
    for theta in images {
        let k = bin_of(theta, bins);
        hit[k] = true;
        for j in 1..=reach.min(bins / 2) {
            for n in [(k + j) % bins, (k + bins - j) % bins] {
                let lo = n as f64 * width;
                let d = crate::geometry::angular_dist(theta, lo)
                    .min(crate::geometry::angular_dist(theta, lo + width));
                if d <= eps {
                    hit[n] = true;
                }
            }
        }
    }
    let positive = mu_p.positive_bins();
    let covered = positive.iter().filter(|&&k| hit[k]).count();
    Ok(MinimalityReport {
        schema_version: SCHEMA_VERSION,
        seed_theta: xi.theta(),
        positive_bins: positive.len(),
        covered_bins: covered,
        coverage: if positive.is_empty() { 0.0 } else { covered as f64 / positive.len() as f64 },
    })
}
