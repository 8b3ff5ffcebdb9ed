//! Model geometry of the Poincaré disk.
//!
//! Points live in the open unit disk with the metric `4|dz|²/(1-|z|²)²`
//! (curvature −1). Ideal points are angles on the unit circle. Inputs given in
//! the upper half-plane go through the fixed Cayley transform
//! `z = (w - i) / (w + i)`, which sends `i` to the disk center and `∞` to
//! angle 0.
//!
//! Every disk isometry used here is an element of SU(1,1), stored as the pair
//! `(a, b)` of the matrix `[[a, b], [conj b, conj a]]` with `|a|² - |b|² = 1`.
//! Distances from the origin are read off as `2 asinh |b|`, which stays
//! accurate far past the point where disk coordinates lose precision.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Points closer than this to the unit circle are rejected at construction.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Two ideal points closer than this (in angle) are considered equal.
pub const ANGLE_TOLERANCE: f64 = 1e-10;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `1 - |z|²` computed without cancellation near the circle.
#[inline]
pub(crate) fn one_minus_norm_sqr(z: Complex64) -> f64 {
    let r = z.norm();
    (1.0 - r) * (1.0 + r)
}

/// Angular distance on the circle, in `[0, π]`.
#[inline]
pub fn angular_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Signed angular difference `b - a` reduced to `(-π, π]`.
#[inline]
pub(crate) fn signed_angle_diff(a: f64, b: f64) -> f64 {
    let d = (b - a).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

#[inline]
pub(crate) fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// A point of the open Poincaré disk.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    re: f64,
    im: f64,
}

impl fmt::Debug for DiskPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiskPoint({}, {})", self.re, self.im)
    }
}

impl DiskPoint {
    /// The disk center, image of `i` under the Cayley transform.
    pub const ORIGIN: DiskPoint = DiskPoint { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Result<Self, GeometryError> {
        if !re.is_finite() || !im.is_finite() || re.hypot(im) >= 1.0 - BOUNDARY_TOLERANCE {
            return Err(GeometryError::NotInterior { re, im });
        }
        Ok(DiskPoint { re, im })
    }

    pub fn from_complex(z: Complex64) -> Result<Self, GeometryError> {
        Self::new(z.re, z.im)
    }

    /// Converts a half-plane point `x + iy` (with `y > 0`) to the disk.
    pub fn from_half_plane(x: f64, y: f64) -> Result<Self, GeometryError> {
        if !x.is_finite() || !y.is_finite() || y <= 0.0 {
            return Err(GeometryError::NotInHalfPlane { x, y });
        }
        let w = Complex64::new(x, y);
        Self::from_complex((w - I) / (w + I))
    }

    /// Builds a point that is only known to satisfy `|z| < 1`.
    ///
    /// Orbit images far from the base point come within `1e-12` of the circle
    /// at distances around 28; their distances are always computed from the
    /// group matrices, never from these coordinates.
    pub(crate) fn from_complex_unchecked(z: Complex64) -> Self {
        debug_assert!(z.norm() <= 1.0, "point outside the closed disk: {z}");
        DiskPoint { re: z.re, im: z.im }
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// Inverse Cayley transform, `w = i (1 + z) / (1 - z)`.
    pub fn to_half_plane(&self) -> (f64, f64) {
        let z = self.as_complex();
        let w = I * (1.0 + z) / (1.0 - z);
        (w.re, w.im)
    }

    /// The disk isometry sending the origin to this point.
    pub fn translation(&self) -> DiskIsometry {
        DiskIsometry::translation_to(*self)
    }
}

/// An ideal point, stored as its angle on the unit circle in `[0, 2π)`.
///
/// Equality is up to [`ANGLE_TOLERANCE`].
#[derive(Clone, Copy, Serialize, Deserialize)]
pub struct BoundaryPoint {
    theta: f64,
}

impl fmt::Debug for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoundaryPoint({})", self.theta)
    }
}

impl PartialEq for BoundaryPoint {
    fn eq(&self, other: &Self) -> bool {
        angular_dist(self.theta, other.theta) <= ANGLE_TOLERANCE
    }
}

impl BoundaryPoint {
    pub fn new(theta: f64) -> Self {
        BoundaryPoint {
            theta: normalize_angle(theta),
        }
    }

    pub fn from_complex(u: Complex64) -> Self {
        Self::new(u.im.atan2(u.re))
    }

    /// Image of the real point `x` of the half-plane boundary.
    pub fn from_half_plane(x: f64) -> Self {
        let w = Complex64::new(x, 0.0);
        Self::from_complex((w - I) / (w + I))
    }

    /// Image of `∞`, which is angle 0.
    pub fn infinity() -> Self {
        BoundaryPoint { theta: 0.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }

    pub fn angular_dist(&self, other: &BoundaryPoint) -> f64 {
        angular_dist(self.theta, other.theta)
    }
}

/// Either an interior point or an ideal point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    Interior(DiskPoint),
    Ideal(BoundaryPoint),
}

impl From<DiskPoint> for Endpoint {
    fn from(p: DiskPoint) -> Self {
        Endpoint::Interior(p)
    }
}

impl From<BoundaryPoint> for Endpoint {
    fn from(xi: BoundaryPoint) -> Self {
        Endpoint::Ideal(xi)
    }
}

impl Endpoint {
    fn as_complex(&self) -> Complex64 {
        match self {
            Endpoint::Interior(p) => p.as_complex(),
            Endpoint::Ideal(xi) => xi.to_complex(),
        }
    }
}

/// An orientation-preserving isometry of the disk, `z ↦ (az + b)/(b̄z + ā)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskIsometry {
    pub(crate) a: Complex64,
    pub(crate) b: Complex64,
}

impl DiskIsometry {
    pub const IDENTITY: DiskIsometry = DiskIsometry {
        a: Complex64 { re: 1.0, im: 0.0 },
        b: Complex64 { re: 0.0, im: 0.0 },
    };

    /// Builds `(a, b)` and rescales so that `|a|² - |b|² = 1`.
    pub fn new(a: Complex64, b: Complex64) -> Result<Self, GeometryError> {
        let det = a.norm_sqr() - b.norm_sqr();
        if !(det > 0.0) || !det.is_finite() {
            return Err(GeometryError::InvalidArgument(format!(
                "|a|² - |b|² = {det} is not positive"
            )));
        }
        let s = det.sqrt().recip();
        Ok(DiskIsometry { a: a * s, b: b * s })
    }

    /// The hyperbolic translation along the diameter through `p` sending 0 to `p`.
    pub fn translation_to(p: DiskPoint) -> Self {
        let z = p.as_complex();
        let s = one_minus_norm_sqr(z).sqrt().recip();
        DiskIsometry {
            a: Complex64::new(s, 0.0),
            b: z * s,
        }
    }

    /// Rotation about the origin by `phi`.
    pub fn rotation(phi: f64) -> Self {
        DiskIsometry {
            a: Complex64::from_polar(1.0, phi / 2.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    #[inline]
    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.b.conj() * z + self.a.conj())
    }

    pub fn apply(&self, p: DiskPoint) -> DiskPoint {
        DiskPoint::from_complex_unchecked(self.apply_complex(p.as_complex()))
    }

    pub fn apply_boundary(&self, xi: BoundaryPoint) -> BoundaryPoint {
        BoundaryPoint::from_complex(self.apply_complex(xi.to_complex()))
    }

    /// Image of the origin.
    pub fn image_of_origin(&self) -> DiskPoint {
        DiskPoint::from_complex_unchecked(self.b / self.a.conj())
    }

    /// `d(0, g(0))`.
    #[inline]
    pub fn displacement_of_origin(&self) -> f64 {
        2.0 * self.b.norm().asinh()
    }

    pub fn compose(&self, rhs: &DiskIsometry) -> DiskIsometry {
        DiskIsometry {
            a: self.a * rhs.a + self.b * rhs.b.conj(),
            b: self.a * rhs.b + self.b * rhs.a.conj(),
        }
    }

    pub fn inverse(&self) -> DiskIsometry {
        DiskIsometry {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    pub fn trace(&self) -> f64 {
        2.0 * self.a.re
    }
}

impl std::ops::Mul for DiskIsometry {
    type Output = DiskIsometry;
    fn mul(self, rhs: DiskIsometry) -> DiskIsometry {
        self.compose(&rhs)
    }
}

/// `d(0, z)` from the coordinates of `z`.
#[inline]
fn dist_from_origin(z: Complex64) -> f64 {
    2.0 * (z.norm() / one_minus_norm_sqr(z).sqrt()).asinh()
}

/// Hyperbolic distance.
pub fn dist(p: DiskPoint, q: DiskPoint) -> f64 {
    let (zp, zq) = (p.as_complex(), q.as_complex());
    let num = (zp - zq).norm();
    if num == 0.0 {
        return 0.0;
    }
    2.0 * (num / (one_minus_norm_sqr(zp) * one_minus_norm_sqr(zq)).sqrt()).asinh()
}

/// Direction (Euclidean angle at `p`) of the geodesic from `p` towards `target`.
///
/// The chart `T_p⁻¹` has a positive real derivative at `p`, so the argument of
/// the pulled-back target is the direction at `p` itself.
pub(crate) fn visual_angle(p: DiskPoint, target: Complex64) -> f64 {
    let w = DiskIsometry::translation_to(p)
        .inverse()
        .apply_complex(target);
    normalize_angle(w.im.atan2(w.re))
}

/// A complete unit-speed geodesic.
///
/// `frame` maps the real diameter onto the geodesic with `frame(0) = origin`,
/// `frame(1) = theta_plus` and `frame(-1) = theta_minus`, so
/// `c(t) = frame(tanh(t/2))`.
#[derive(Debug, Clone, Copy)]
pub struct Geodesic {
    theta_minus: BoundaryPoint,
    theta_plus: BoundaryPoint,
    origin: DiskPoint,
    frame: DiskIsometry,
}

impl Geodesic {
    /// The geodesic through `origin` leaving in Euclidean direction `direction`.
    pub fn through(origin: DiskPoint, direction: f64) -> Self {
        let frame = DiskIsometry::translation_to(origin) * DiskIsometry::rotation(direction);
        Self::from_frame(frame)
    }

    pub(crate) fn from_frame(frame: DiskIsometry) -> Self {
        Geodesic {
            theta_minus: BoundaryPoint::from_complex(frame.apply_complex(Complex64::new(-1.0, 0.0))),
            theta_plus: BoundaryPoint::from_complex(frame.apply_complex(Complex64::new(1.0, 0.0))),
            origin: frame.image_of_origin(),
            frame,
        }
    }

    pub fn theta_minus(&self) -> BoundaryPoint {
        self.theta_minus
    }

    pub fn theta_plus(&self) -> BoundaryPoint {
        self.theta_plus
    }

    pub fn origin(&self) -> DiskPoint {
        self.origin
    }

    pub fn frame(&self) -> DiskIsometry {
        self.frame
    }

    /// `c(t)`. Beyond `|t| ≈ 36` the result rounds onto the circle.
    pub fn point_at(&self, t: f64) -> DiskPoint {
        self.frame.apply(DiskPoint::from_complex_unchecked(Complex64::new(
            (t / 2.0).tanh(),
            0.0,
        )))
    }

    /// `d(p, c(t))`, evaluated in the geodesic's own frame so that it stays
    /// accurate for large `t`.
    pub fn distance_to_point_at(&self, p: DiskPoint, t: f64) -> f64 {
        let w = self.frame.inverse().apply_complex(p.as_complex());
        let r = (t / 2.0).tanh();
        let num = (w - r).norm();
        if num == 0.0 {
            return 0.0;
        }
        2.0 * (num * (t / 2.0).cosh() / one_minus_norm_sqr(w).sqrt()).asinh()
    }

    /// Image of the geodesic (with its parameterization) under `g`.
    pub fn transformed(&self, g: &DiskIsometry) -> Geodesic {
        Self::from_frame(*g * self.frame)
    }

    /// The same point set traversed backwards.
    pub fn reversed(&self) -> Geodesic {
        Self::from_frame(self.frame * DiskIsometry::rotation(PI))
    }
}

/// The geodesic joining `a` to `b`.
///
/// When `a` is interior the parameterization starts there, `c(0) = a`. When
/// only `b` is interior it starts at `b` and points away from `a`. Between two
/// ideal points it starts at the foot of the perpendicular from the origin.
pub fn geodesic_between(
    a: impl Into<Endpoint>,
    b: impl Into<Endpoint>,
) -> Result<Geodesic, GeometryError> {
    let (a, b) = (a.into(), b.into());
    match (a, b) {
        (Endpoint::Interior(p), other) => {
            if let Endpoint::Interior(q) = other {
                if (p.as_complex() - q.as_complex()).norm() == 0.0 {
                    return Err(GeometryError::CoincidentEndpoints);
                }
            }
            let dir = visual_angle(p, other.as_complex());
            Ok(Geodesic::through(p, dir))
        }
        (Endpoint::Ideal(xi), Endpoint::Interior(q)) => {
            let dir = visual_angle(q, xi.to_complex()) + PI;
            Ok(Geodesic::through(q, dir))
        }
        (Endpoint::Ideal(xi), Endpoint::Ideal(eta)) => {
            let sep = xi.angular_dist(&eta);
            if sep <= ANGLE_TOLERANCE {
                return Err(GeometryError::CoincidentEndpoints);
            }
            let mid = xi.theta() + signed_angle_diff(xi.theta(), eta.theta()) / 2.0;
            let rho = (PI / 4.0 - sep / 4.0).tan().max(0.0);
            let origin = DiskPoint::from_complex_unchecked(Complex64::from_polar(rho, mid));
            let dir = visual_angle(origin, eta.to_complex());
            let g = Geodesic::through(origin, dir);
            Ok(Geodesic {
                theta_minus: xi,
                theta_plus: eta,
                ..g
            })
        }
    }
}

/// Busemann function `β_ξ(p, x) = lim_t d(p, c_{x,ξ}(t)) − t`.
///
/// Closed form through the Poisson kernel: with `B_ξ(z) = ln(|ξ−z|²/(1−|z|²))`,
/// `β_ξ(p, x) = B_ξ(p) − B_ξ(x)`.
pub fn busemann(xi: BoundaryPoint, p: DiskPoint, x: DiskPoint) -> f64 {
    horofunction(xi, p) - horofunction(xi, x)
}

#[inline]
fn horofunction(xi: BoundaryPoint, z: DiskPoint) -> f64 {
    let z = z.as_complex();
    2.0 * (xi.to_complex() - z).norm().ln() - one_minus_norm_sqr(z).ln()
}

/// The defining limit of the Busemann function truncated at `t_max`:
/// `d(p, c_{x,ξ}(t_max)) − t_max`.
pub fn busemann_limit_oracle(
    xi: BoundaryPoint,
    p: DiskPoint,
    x: DiskPoint,
    t_max: f64,
) -> Result<f64, GeometryError> {
    if !(t_max >= 10.0) {
        return Err(GeometryError::InvalidArgument(format!(
            "t_max = {t_max} must be at least 10"
        )));
    }
    let ray = geodesic_between(x, xi)?;
    Ok(ray.distance_to_point_at(p, t_max) - t_max)
}

/// Gromov product `β_p(ξ, η) = β_ξ(p, x) + β_η(p, x)` with `x` on `c_{ξ,η}`.
pub fn gromov_product(
    p: DiskPoint,
    xi: BoundaryPoint,
    eta: BoundaryPoint,
) -> Result<f64, GeometryError> {
    let x = geodesic_between(xi, eta)?.origin();
    Ok(busemann(xi, p, x) + busemann(eta, p, x))
}

/// The visual arc `pr_p(B(z, R))` seen from `base`.
///
/// `center` and `half_width` are Euclidean angles at `base`; at the disk
/// center they coincide with boundary angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowArc {
    pub base: DiskPoint,
    pub center: f64,
    pub half_width: f64,
}

impl ShadowArc {
    pub fn full(base: DiskPoint) -> Self {
        ShadowArc {
            base,
            center: 0.0,
            half_width: PI,
        }
    }

    pub fn is_full(&self) -> bool {
        self.half_width >= PI
    }

    pub fn contains(&self, xi: BoundaryPoint) -> bool {
        if self.is_full() {
            return true;
        }
        angular_dist(visual_angle(self.base, xi.to_complex()), self.center) < self.half_width
    }

    /// The arc as an interval of boundary angles: `(start, length)` running
    /// counterclockwise from `start`.
    pub fn boundary_interval(&self) -> (f64, f64) {
        if self.is_full() {
            return (0.0, TAU);
        }
        let chart = DiskIsometry::translation_to(self.base);
        let lo = chart.apply_boundary(BoundaryPoint::new(self.center - self.half_width));
        let hi = chart.apply_boundary(BoundaryPoint::new(self.center + self.half_width));
        let len = (hi.theta() - lo.theta()).rem_euclid(TAU);
        (lo.theta(), len)
    }
}

/// Shadow of the metric ball `B(z, R)` on the ideal boundary, seen from `p`.
///
/// The half-width obeys the right-triangle law `sin ψ = sinh R / sinh d(p,z)`;
/// when `d(p, z) ≤ R` the shadow is the whole circle.
pub fn shadow_arc(p: DiskPoint, z: DiskPoint, radius: f64) -> ShadowArc {
    let d = dist(p, z);
    shadow_arc_from_parts(p, visual_angle(p, z.as_complex()), d, radius)
}

pub(crate) fn shadow_arc_from_parts(
    p: DiskPoint,
    center: f64,
    distance: f64,
    radius: f64,
) -> ShadowArc {
    if distance <= radius {
        return ShadowArc::full(p);
    }
    ShadowArc {
        base: p,
        center,
        half_width: (radius.sinh() / distance.sinh()).min(1.0).asin(),
    }
}

/// `inf_t d(p, c(t))` over the complete geodesic.
pub fn dist_to_geodesic(p: DiskPoint, g: &Geodesic) -> f64 {
    let w = g.frame.inverse().apply_complex(p.as_complex());
    (2.0 * w.im.abs() / one_minus_norm_sqr(w)).asinh()
}

/// `inf_{t ≥ 0} d(p, c(t))` over the forward ray.
pub fn dist_to_ray(p: DiskPoint, g: &Geodesic) -> f64 {
    let w = g.frame.inverse().apply_complex(p.as_complex());
    if w.re >= 0.0 {
        (2.0 * w.im.abs() / one_minus_norm_sqr(w)).asinh()
    } else {
        dist_from_origin(w)
    }
}

/// Riemannian angle at `p` between the geodesics towards `a` and `b`.
pub fn angle_at(
    p: DiskPoint,
    a: impl Into<Endpoint>,
    b: impl Into<Endpoint>,
) -> Result<f64, GeometryError> {
    let (a, b) = (a.into(), b.into());
    for e in [a, b] {
        if let Endpoint::Interior(q) = e {
            if (q.as_complex() - p.as_complex()).norm() == 0.0 {
                return Err(GeometryError::DegenerateAngle);
            }
        }
    }
    Ok(angular_dist(
        visual_angle(p, a.as_complex()),
        visual_angle(p, b.as_complex()),
    ))
}

/// Visual angle subtended at the origin by a geodesic at distance `r`.
///
/// All geodesics at a given distance from the origin are rotations of each
/// other; the maximum over a sample of rotations is returned.
pub(crate) fn subtended_angle_at_distance(r: f64) -> f64 {
    const ROTATIONS: usize = 16;
    let foot = DiskPoint::from_complex_unchecked(Complex64::new((r / 2.0).tanh(), 0.0));
    // perpendicular to the real diameter at `foot`
    let g = Geodesic::through(foot, PI / 2.0);
    (0..ROTATIONS)
        .map(|k| {
            let rot = DiskIsometry::rotation(TAU * k as f64 / ROTATIONS as f64);
            let h = g.transformed(&rot);
            angular_dist(h.theta_minus().theta(), h.theta_plus().theta())
        })
        .fold(0.0, f64::max)
}

/// Uniform visibility radius `R(ε)`: geodesics at distance at least `R(ε)`
/// from a point subtend an angle at most `ε` there.
pub fn visibility_constant(eps: f64) -> Result<f64, GeometryError> {
    if !(eps > 0.0) {
        return Err(GeometryError::InvalidArgument(format!(
            "visibility angle {eps} must be positive"
        )));
    }
    if eps >= PI {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while subtended_angle_at_distance(hi) > eps {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if subtended_angle_at_distance(mid) > eps {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    Ok(hi)
}

/// A unit tangent vector: base point and Euclidean direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    base: DiskPoint,
    direction: f64,
}

impl TangentVector {
    pub fn new(base: DiskPoint, direction: f64) -> Self {
        TangentVector {
            base,
            direction: normalize_angle(direction),
        }
    }

    pub fn base(&self) -> DiskPoint {
        self.base
    }

    pub fn direction(&self) -> f64 {
        self.direction
    }

    /// The geodesic `c_v` with `c_v(0) = base` and `c_v'(0) = v`.
    pub fn geodesic(&self) -> Geodesic {
        Geodesic::through(self.base, self.direction)
    }
}

/// Membership in the truncated cone `TC(v, ε, r)`; `r = 0` gives the cone `C(v, ε)`.
pub fn cone_membership(
    v: &TangentVector,
    x: impl Into<Endpoint>,
    eps: f64,
    r: f64,
) -> Result<bool, GeometryError> {
    let x = x.into();
    if let Endpoint::Interior(q) = x {
        if (q.as_complex() - v.base.as_complex()).norm() == 0.0 {
            return Err(GeometryError::DegenerateAngle);
        }
    }
    let angle = angular_dist(visual_angle(v.base, x.as_complex()), v.direction);
    let far_enough = match x {
        Endpoint::Interior(q) => dist(v.base, q) > r,
        Endpoint::Ideal(_) => true,
    };
    Ok(angle < eps && far_enough)
}
