//! Möbius-map arithmetic, isometry classification, axial-element analysis and
//! the preset group library.
//!
//! Matrices act on the upper half-plane, `w ↦ (aw + b)/(cw + d)`, and are
//! carried to the disk through the Cayley transform.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::GroupError;
use crate::geometry::{geodesic_between, BoundaryPoint, DiskIsometry, DiskPoint, Geodesic};

/// Input matrices may miss unit determinant by at most this much.
pub const DETERMINANT_TOLERANCE: f64 = 1e-6;

/// Entrywise tolerance for matrix identity (after sign canonicalization).
pub const MATRIX_TOLERANCE: f64 = 1e-9;

/// Tolerance on `|trace| - 2` for the parabolic class.
pub const TRACE_TOLERANCE: f64 = 1e-9;

/// A unit-determinant real 2×2 matrix, up to sign.
///
/// The sign is canonical: the first entry of magnitude above
/// [`MATRIX_TOLERANCE`] is positive.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl fmt::Debug for MobiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl MobiusMap {
    pub const IDENTITY: MobiusMap = MobiusMap {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Validates the determinant, rescales it to exactly 1 and canonicalizes the sign.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, GroupError> {
        if ![a, b, c, d].iter().all(|x| x.is_finite()) {
            return Err(GroupError::NonFinite);
        }
        let det = a * d - b * c;
        if (det - 1.0).abs() > DETERMINANT_TOLERANCE {
            return Err(GroupError::BadDeterminant {
                det,
                tolerance: DETERMINANT_TOLERANCE,
            });
        }
        Ok(Self::from_raw(a, b, c, d).renormalized())
    }

    pub(crate) fn from_raw(a: f64, b: f64, c: f64, d: f64) -> Self {
        let lead = [a, b, c, d]
            .into_iter()
            .find(|x| x.abs() > MATRIX_TOLERANCE)
            .unwrap_or(1.0);
        if lead < 0.0 {
            MobiusMap {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
            }
        } else {
            MobiusMap { a, b, c, d }
        }
    }

    /// `diag(λ, 1/λ)`, the dilation `w ↦ λ² w`.
    pub fn diagonal(lambda: f64) -> Result<Self, GroupError> {
        if !(lambda > 0.0) {
            return Err(GroupError::InvalidArgument(format!(
                "diagonal entry {lambda} must be positive"
            )));
        }
        Self::new(lambda, 0.0, 0.0, lambda.recip())
    }

    /// Rotation about `i` by `angle` in the half-plane (by `-angle` measured in the disk).
    pub fn half_plane_rotation(angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        Self::from_raw(c, -s, s, c)
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// Rescales to determinant exactly 1 (up to rounding).
    pub fn renormalized(&self) -> Self {
        let det = self.determinant();
        if det == 1.0 || !(det > 0.0) {
            return *self;
        }
        let s = det.sqrt().recip();
        MobiusMap {
            a: self.a * s,
            b: self.b * s,
            c: self.c * s,
            d: self.d * s,
        }
    }

    /// Matrix product `self · rhs`, i.e. `rhs` acts first.
    pub fn compose(&self, rhs: &MobiusMap) -> MobiusMap {
        Self::from_raw(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }

    pub fn inverse(&self) -> MobiusMap {
        Self::from_raw(self.d, -self.b, -self.c, self.a)
    }

    pub fn power(&self, n: i64) -> MobiusMap {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut acc = MobiusMap::IDENTITY;
        for k in 0..n.unsigned_abs() {
            acc = acc.compose(&base);
            if k % 8 == 7 {
                acc = acc.renormalized();
            }
        }
        acc
    }

    /// `g · self · g⁻¹`.
    pub fn conjugated_by(&self, g: &MobiusMap) -> MobiusMap {
        g.compose(self).compose(&g.inverse())
    }

    /// The corresponding element of SU(1,1) acting on the disk.
    #[inline]
    pub fn to_disk(&self) -> DiskIsometry {
        DiskIsometry {
            a: Complex64::new((self.a + self.d) / 2.0, (self.b - self.c) / 2.0),
            b: Complex64::new((self.a - self.d) / 2.0, -(self.b + self.c) / 2.0),
        }
    }

    /// Inverse of [`MobiusMap::to_disk`].
    pub fn from_disk(g: &DiskIsometry) -> MobiusMap {
        let (alpha, beta) = (g.a(), g.b());
        Self::from_raw(
            alpha.re + beta.re,
            alpha.im - beta.im,
            -alpha.im - beta.im,
            alpha.re - beta.re,
        )
    }

    pub fn apply_half_plane(&self, x: f64, y: f64) -> (f64, f64) {
        let w = Complex64::new(x, y);
        let z = (self.a * w + self.b) / (self.c * w + self.d);
        (z.re, z.im)
    }

    pub fn apply(&self, p: DiskPoint) -> DiskPoint {
        self.to_disk().apply(p)
    }

    pub fn apply_boundary(&self, xi: BoundaryPoint) -> BoundaryPoint {
        self.to_disk().apply_boundary(xi)
    }

    /// Entrywise comparison as isometries (`M` and `-M` agree).
    pub fn approx_eq(&self, other: &MobiusMap, tol: f64) -> bool {
        let (x, y) = (self.entries(), other.entries());
        let same = x.iter().zip(&y).all(|(u, v)| (u - v).abs() <= tol);
        let flipped = x.iter().zip(&y).all(|(u, v)| (u + v).abs() <= tol);
        same || flipped
    }

    /// `min(‖X − Y‖_max, ‖X + Y‖_max)`.
    pub fn residual(&self, other: &MobiusMap) -> f64 {
        let (x, y) = (self.entries(), other.entries());
        let diff = x.iter().zip(&y).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        let sum = x.iter().zip(&y).map(|(u, v)| (u + v).abs()).fold(0.0, f64::max);
        diff.min(sum)
    }

    pub fn is_identity(&self) -> bool {
        self.approx_eq(&MobiusMap::IDENTITY, MATRIX_TOLERANCE)
    }

    /// `d(z, g z)`.
    pub fn displacement(&self, z: DiskPoint) -> f64 {
        let t = z.translation();
        (t.inverse() * self.to_disk() * t).displacement_of_origin()
    }
}

impl std::ops::Mul for MobiusMap {
    type Output = MobiusMap;
    fn mul(self, rhs: MobiusMap) -> MobiusMap {
        self.compose(&rhs)
    }
}

/// Conjugacy class type of an isometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsometryClass {
    Identity,
    Elliptic,
    Parabolic,
    Axial,
}

pub fn classify(m: &MobiusMap) -> IsometryClass {
    if m.is_identity() {
        return IsometryClass::Identity;
    }
    let t = m.trace().abs();
    if (t - 2.0).abs() <= TRACE_TOLERANCE {
        IsometryClass::Parabolic
    } else if t < 2.0 {
        IsometryClass::Elliptic
    } else {
        IsometryClass::Axial
    }
}

/// SU(1,1) form with `Re a ≥ 0`.
fn positive_trace_disk(m: &MobiusMap) -> DiskIsometry {
    let g = m.to_disk();
    if g.a.re < 0.0 {
        DiskIsometry { a: -g.a, b: -g.b }
    } else {
        g
    }
}

/// Boundary fixed points: two for axial elements (repelling first, then
/// attracting), one for parabolic ones, none for elliptic ones.
pub fn fixed_boundary_points(m: &MobiusMap) -> Result<Vec<BoundaryPoint>, GroupError> {
    let class = classify(m);
    let g = positive_trace_disk(m);
    // fixed points of z ↦ (az+b)/(b̄z+ā) solve b̄z² + (ā − a)z − b = 0
    let beta_bar = g.b.conj();
    let i_im_a = Complex64::new(0.0, g.a.im);
    match class {
        IsometryClass::Identity => Err(GroupError::IdentityInput),
        IsometryClass::Elliptic => Ok(Vec::new()),
        IsometryClass::Parabolic => Ok(vec![BoundaryPoint::from_complex(i_im_a / beta_bar)]),
        IsometryClass::Axial => {
            let root = (g.a.re * g.a.re - 1.0).max(0.0).sqrt();
            let attracting = (i_im_a + root) / beta_bar;
            let repelling = (i_im_a - root) / beta_bar;
            Ok(vec![
                BoundaryPoint::from_complex(repelling),
                BoundaryPoint::from_complex(attracting),
            ])
        }
    }
}

/// Translation length `2 arccosh(|tr|/2)` of an axial element.
pub fn translation_length(m: &MobiusMap) -> f64 {
    2.0 * (m.trace().abs() / 2.0).max(1.0).acosh()
}

/// The oriented axis (repelling → attracting) and translation length.
pub fn axis_and_length(m: &MobiusMap) -> Result<(Geodesic, f64), GroupError> {
    if classify(m) != IsometryClass::Axial {
        return Err(GroupError::NotAxial {
            abs_trace: m.trace().abs(),
        });
    }
    let fixed = fixed_boundary_points(m)?;
    let axis = geodesic_between(fixed[0], fixed[1])?;
    Ok((axis, translation_length(m)))
}

/// Outcome of [`commuting_fixed_point_audit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutingAudit {
    /// `min ‖βαⁿ ∓ αⁿβ‖_max`.
    pub commutator_residual: f64,
    pub commuting: bool,
    /// Angular displacement of each axis endpoint of α under β, when commuting.
    pub endpoint_residuals: Option<[f64; 2]>,
    pub pass: bool,
}

/// Angular tolerance for "β fixes the endpoints".
pub const ENDPOINT_TOLERANCE: f64 = 1e-6;

/// Checks that an element commuting with a power of an axial α fixes both axis endpoints of α.
pub fn commuting_fixed_point_audit(
    alpha: &MobiusMap,
    beta: &MobiusMap,
    n: i64,
) -> Result<CommutingAudit, GroupError> {
    if n == 0 {
        return Err(GroupError::InvalidArgument("power n must be nonzero".into()));
    }
    let (axis, _) = axis_and_length(alpha)?;
    let alpha_n = alpha.power(n);
    let lhs = beta.compose(&alpha_n);
    let rhs = alpha_n.compose(beta);
    let scale = lhs
        .entries()
        .iter()
        .chain(rhs.entries().iter())
        .fold(1.0_f64, |m, x| m.max(x.abs()));
    let residual = lhs.residual(&rhs);
    let commuting = residual <= MATRIX_TOLERANCE * scale;
    if !commuting {
        return Ok(CommutingAudit {
            commutator_residual: residual,
            commuting,
            endpoint_residuals: None,
            pass: false,
        });
    }
    let ends = [axis.theta_minus(), axis.theta_plus()];
    let res = ends.map(|xi| beta.apply_boundary(xi).angular_dist(&xi));
    Ok(CommutingAudit {
        commutator_residual: residual,
        commuting,
        endpoint_residuals: Some(res),
        pass: res.iter().all(|r| *r <= ENDPOINT_TOLERANCE),
    })
}

/// Restriction applied to the words of an enumerated ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WordFilter {
    /// Keep words whose exponent sum in the given generator is zero.
    ExponentSumZero { generator: usize },
}

/// A named group in the preset library.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupPreset {
    pub name: String,
    pub generators: Vec<MobiusMap>,
    pub expected_delta: Option<f64>,
    pub delta_note: String,
    pub filter: Option<WordFilter>,
    /// True when the limit set has at most two points.
    pub elementary: bool,
}

impl GroupPreset {
    pub fn new(name: impl Into<String>, generators: Vec<MobiusMap>) -> Result<Self, GroupError> {
        if generators.is_empty() {
            return Err(GroupError::NoGenerators);
        }
        if generators.len() > 26 {
            return Err(GroupError::TooManyGenerators(generators.len()));
        }
        if let Some(index) = generators.iter().position(|g| g.is_identity()) {
            return Err(GroupError::IdentityGenerator { index });
        }
        let elementary = generators.len() == 1;
        Ok(GroupPreset {
            name: name.into(),
            generators,
            expected_delta: None,
            delta_note: String::new(),
            filter: None,
            elementary,
        })
    }

    fn with_delta(mut self, delta: f64, note: &str) -> Self {
        self.expected_delta = Some(delta);
        self.delta_note = note.to_string();
        self
    }

    /// `⟨diag(e^{ℓ/2}, e^{−ℓ/2})⟩`, translation length `ℓ`.
    pub fn cyclic_axial(length: f64) -> Result<Self, GroupError> {
        let g = MobiusMap::diagonal((length / 2.0).exp())?;
        Ok(Self::new(format!("cyclic_axial({length})"), vec![g])?
            .with_delta(0.0, "cyclic axial group: orbit grows linearly"))
    }

    /// `⟨T⟩` with `T = [[1,1],[0,1]]`.
    pub fn cyclic_parabolic() -> Self {
        let t = MobiusMap::new(1.0, 1.0, 0.0, 1.0).expect("unit determinant");
        Self::new("cyclic_parabolic", vec![t])
            .expect("valid generators")
            .with_delta(0.5, "d(i, i+n) ≈ 2 ln n, so the orbit count grows like e^{R/2}")
    }

    /// `PSL(2, Z)` generated by `S = [[0,-1],[1,0]]` and `T = [[1,1],[0,1]]`.
    pub fn modular() -> Self {
        let s = MobiusMap::new(0.0, -1.0, 1.0, 0.0).expect("unit determinant");
        let t = MobiusMap::new(1.0, 1.0, 0.0, 1.0).expect("unit determinant");
        Self::new("modular", vec![s, t])
            .expect("valid generators")
            .with_delta(1.0, "lattice in the hyperbolic plane")
    }

    /// `A = diag(λ, 1/λ)` and its conjugate by a quarter turn of the disk.
    ///
    /// The four ping-pong half-disks are disjoint once `λ ≥ 1 + √2`; this is
    /// reported through [`GroupPreset::schottky_ping_pong_holds`], not enforced.
    pub fn schottky_perp(lambda: f64) -> Result<Self, GroupError> {
        let a = MobiusMap::diagonal(lambda)?;
        let b = a.conjugated_by(&MobiusMap::half_plane_rotation(PI / 2.0));
        let mut preset = Self::new(format!("schottky_perp({lambda})"), vec![a, b])?;
        preset.delta_note = "convex cocompact: 0 < δ < 1".into();
        Ok(preset)
    }

    /// Words of `schottky_perp(λ)` with zero exponent sum in `A`.
    pub fn zcover_schottky(lambda: f64) -> Result<Self, GroupError> {
        let mut preset = Self::schottky_perp(lambda)?;
        preset.name = format!("zcover_schottky({lambda})");
        preset.filter = Some(WordFilter::ExponentSumZero { generator: 0 });
        preset.delta_note = "normal subgroup with quotient Z; finite-depth estimates lag δ".into();
        Ok(preset)
    }

    /// Whether the ping-pong half-disks of a `schottky_perp(λ)` group are disjoint.
    pub fn schottky_ping_pong_holds(lambda: f64) -> bool {
        lambda >= 1.0 + 2.0_f64.sqrt()
    }

    /// Looks a preset up by name; parameters go in parentheses, e.g. `schottky_perp(3)`.
    pub fn by_name(spec: &str) -> Result<Self, GroupError> {
        let spec = spec.trim();
        let (name, param) = match spec.find('(') {
            Some(open) if spec.ends_with(')') => {
                let raw = &spec[open + 1..spec.len() - 1];
                let value: f64 = raw
                    .trim()
                    .parse()
                    .map_err(|_| GroupError::UnknownPreset(spec.to_string()))?;
                (&spec[..open], Some(value))
            }
            Some(_) => return Err(GroupError::UnknownPreset(spec.to_string())),
            None => (spec, None),
        };
        match name {
            "cyclic_axial" => Self::cyclic_axial(param.unwrap_or(2.0)),
            "cyclic_parabolic" => Ok(Self::cyclic_parabolic()),
            "modular" => Ok(Self::modular()),
            "schottky_perp" => Self::schottky_perp(param.unwrap_or(3.0)),
            "zcover_schottky" => Self::zcover_schottky(param.unwrap_or(3.0)),
            _ => Err(GroupError::UnknownPreset(spec.to_string())),
        }
    }

    pub fn names() -> &'static [&'static str] {
        &[
            "cyclic_axial",
            "cyclic_parabolic",
            "modular",
            "schottky_perp",
            "zcover_schottky",
        ]
    }
}

/// Quarter-turn conjugation used by `schottky_perp`, exposed for tests.
pub fn quarter_turn() -> MobiusMap {
    MobiusMap::from_raw(FRAC_1_SQRT_2, -FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dist;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn axial_half() -> MobiusMap {
        MobiusMap::diagonal(0.5_f64.exp()).unwrap()
    }

    fn random_map(rng: &mut ChaCha8Rng) -> MobiusMap {
        let (a, b, c) = (
            rng.gen_range(0.5..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        MobiusMap::new(a, b, c, (1.0 + b * c) / a).unwrap()
    }

    #[test]
    fn construction_validates_and_canonicalizes() {
        assert!(matches!(
            MobiusMap::new(2.0, 0.0, 0.0, 1.0),
            Err(GroupError::BadDeterminant { .. })
        ));
        assert!(MobiusMap::new(f64::NAN, 0.0, 0.0, 1.0).is_err());
        let m = MobiusMap::new(-1.0, -1.0, 0.0, -1.0).unwrap();
        assert_eq!(m.entries(), [1.0, 1.0, 0.0, 1.0]);
        let s = MobiusMap::new(0.0, -1.0, 1.0, 0.0).unwrap();
        assert_eq!(s.entries(), [0.0, 1.0, -1.0, 0.0]);
        let near = MobiusMap::new(1.0 + 1e-8, 0.0, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(near.determinant(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn disk_conversion_round_trip_and_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let m = random_map(&mut rng);
            assert!(MobiusMap::from_disk(&m.to_disk()).approx_eq(&m, 1e-12));
            let (x, y) = (rng.gen_range(-3.0..3.0), rng.gen_range(0.1..3.0));
            let (u, v) = m.apply_half_plane(x, y);
            let via_disk = m.apply(DiskPoint::from_half_plane(x, y).unwrap());
            let direct = DiskPoint::from_half_plane(u, v).unwrap();
            assert_abs_diff_eq!(via_disk.re(), direct.re(), epsilon = 1e-10);
            assert_abs_diff_eq!(via_disk.im(), direct.im(), epsilon = 1e-10);
        }
    }

    #[test]
    fn group_action_is_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..300 {
            let m = random_map(&mut rng);
            let z = DiskPoint::from_half_plane(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..2.0)).unwrap();
            let w = DiskPoint::from_half_plane(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..2.0)).unwrap();
            assert_abs_diff_eq!(dist(m.apply(z), m.apply(w)), dist(z, w), epsilon = 1e-10);
        }
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(&MobiusMap::IDENTITY), IsometryClass::Identity);
        assert_eq!(classify(&MobiusMap::new(1.0, 1.0, 0.0, 1.0).unwrap()), IsometryClass::Parabolic);
        assert_eq!(classify(&axial_half()), IsometryClass::Axial);
        assert_eq!(classify(&MobiusMap::half_plane_rotation(0.7)), IsometryClass::Elliptic);
        assert_eq!(classify(&MobiusMap::new(-1.0, 0.0, 0.0, -1.0).unwrap()), IsometryClass::Identity);
    }

    #[test]
    fn axis_of_diagonal_element() {
        let m = axial_half();
        let (axis, len) = axis_and_length(&m).unwrap();
        assert_abs_diff_eq!(len, 1.0, epsilon = 1e-12);
        // imaginary half-plane axis: from 0 (angle π) to ∞ (angle 0)
        assert_eq!(axis.theta_minus(), BoundaryPoint::from_half_plane(0.0));
        assert_eq!(axis.theta_plus(), BoundaryPoint::infinity());
        // brute-force translation length
        let p = DiskPoint::new(0.3, 0.2).unwrap();
        let n = 32;
        // off the axis the excess 2 ln cosh h is spread over n steps
        assert_abs_diff_eq!(m.power(n).displacement(p) / n as f64, len, epsilon = 1e-1);
        let on_axis = axis.point_at(0.4);
        assert_abs_diff_eq!(m.power(n).displacement(on_axis) / n as f64, len, epsilon = 1e-4);
        assert_abs_diff_eq!(dist(on_axis, m.power(4).apply(on_axis)), 4.0 * len, epsilon = 1e-9);
        for t in [-3.0, -0.5, 0.0, 1.2, 4.0] {
            let moved = m.apply(axis.point_at(t));
            assert_abs_diff_eq!(dist(moved, axis.point_at(t + len)), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn axis_is_equivariant_under_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = axial_half();
        let (axis, len) = axis_and_length(&m).unwrap();
        for _ in 0..50 {
            let g = random_map(&mut rng);
            let (conj_axis, conj_len) = axis_and_length(&m.conjugated_by(&g)).unwrap();
            assert_abs_diff_eq!(conj_len, len, epsilon = 1e-9);
            assert_eq!(conj_axis.theta_plus(), g.apply_boundary(axis.theta_plus()));
            assert_eq!(conj_axis.theta_minus(), g.apply_boundary(axis.theta_minus()));
        }
        assert!(matches!(
            axis_and_length(&MobiusMap::new(1.0, 1.0, 0.0, 1.0).unwrap()),
            Err(GroupError::NotAxial { .. })
        ));
    }

    #[test]
    fn powers_converge_to_axis_endpoints() {
        let m = MobiusMap::new(2.0, 1.0, 1.0, 1.0).unwrap();
        let (axis, _) = axis_and_length(&m).unwrap();
        let p = DiskPoint::new(-0.3, 0.5).unwrap();
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for n in [5, 10, 20] {
            let fwd = BoundaryPoint::from_complex(m.power(n).apply(p).as_complex());
            let bwd = BoundaryPoint::from_complex(m.power(-n).apply(p).as_complex());
            let errs = (fwd.angular_dist(&axis.theta_plus()), bwd.angular_dist(&axis.theta_minus()));
            assert!(errs.0 < prev.0 && errs.1 < prev.1);
            prev = errs;
        }
        assert!(prev.0 < 1e-6 && prev.1 < 1e-6);
    }

    #[test]
    fn fixed_point_counts() {
        let t = MobiusMap::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(fixed_boundary_points(&t).unwrap(), vec![BoundaryPoint::infinity()]);
        let fixed = fixed_boundary_points(&axial_half()).unwrap();
        assert_eq!(fixed, vec![BoundaryPoint::from_half_plane(0.0), BoundaryPoint::infinity()]);
        assert!(fixed_boundary_points(&MobiusMap::half_plane_rotation(1.0)).unwrap().is_empty());
        assert!(matches!(fixed_boundary_points(&MobiusMap::IDENTITY), Err(GroupError::IdentityInput)));
        // solve the half-plane quadratic c x² + (d − a) x − b = 0 directly
        let m = MobiusMap::new(2.0, 1.0, 1.0, 1.0).unwrap();
        let [a, b, c, d] = m.entries();
        let disc = ((d - a) * (d - a) + 4.0 * b * c).sqrt();
        let roots = [(a - d - disc) / (2.0 * c), (a - d + disc) / (2.0 * c)];
        let fixed = fixed_boundary_points(&m).unwrap();
        for r in roots {
            assert!(fixed.contains(&BoundaryPoint::from_half_plane(r)));
        }
    }

    #[test]
    fn commuting_audit_cases() {
        let alpha = MobiusMap::new(2.0, 1.0, 1.0, 1.0).unwrap();
        let a = commuting_fixed_point_audit(&alpha, &alpha.power(2), 3).unwrap();
        assert!(a.commuting && a.pass);
        let id = commuting_fixed_point_audit(&alpha, &MobiusMap::IDENTITY, 1).unwrap();
        assert!(id.pass);
        let g = MobiusMap::new(1.0, 1.0, 0.0, 1.0).unwrap();
        let b = commuting_fixed_point_audit(&alpha, &alpha.power(2).compose(&g), 1).unwrap();
        assert!(!b.commuting && !b.pass);
        assert!(b.commutator_residual > 1e-3);
        assert!(commuting_fixed_point_audit(&alpha, &g, 0).is_err());
        assert!(commuting_fixed_point_audit(&g, &alpha, 1).is_err());
    }

    #[test]
    fn presets_by_name() {
        assert_eq!(GroupPreset::by_name("modular").unwrap().generators.len(), 2);
        let c = GroupPreset::by_name("cyclic_axial(2)").unwrap();
        assert_abs_diff_eq!(translation_length(&c.generators[0]), 2.0, epsilon = 1e-12);
        assert!(c.elementary);
        assert!(GroupPreset::by_name("nope").is_err());
        assert!(GroupPreset::by_name("cyclic_axial(x)").is_err());
        let s = GroupPreset::by_name("schottky_perp(3)").unwrap();
        let [a, b, c, d] = s.generators[1].entries();
        let (ch, sh) = ((3.0 + 1.0 / 3.0) / 2.0, (3.0 - 1.0 / 3.0) / 2.0);
        assert_abs_diff_eq!(a, ch, epsilon = 1e-12);
        assert_abs_diff_eq!(b, sh, epsilon = 1e-12);
        assert_abs_diff_eq!(c, sh, epsilon = 1e-12);
        assert_abs_diff_eq!(d, ch, epsilon = 1e-12);
        assert!(GroupPreset::schottky_ping_pong_holds(3.0));
        assert!(!GroupPreset::schottky_ping_pong_holds(2.0));
        assert!(GroupPreset::by_name("zcover_schottky").unwrap().filter.is_some());
        assert!(matches!(GroupPreset::new("x", vec![]), Err(GroupError::NoGenerators)));
        assert!(matches!(
            GroupPreset::new("x", vec![MobiusMap::IDENTITY]),
            Err(GroupError::IdentityGenerator { index: 0 })
        ));
        assert!(quarter_turn().approx_eq(&MobiusMap::half_plane_rotation(PI / 2.0), 1e-15));
    }
}
