use std::f64::consts::TAU;

use proptest::prelude::*;
use psbench::geometry::{busemann, dist, gromov_product, BoundaryPoint, DiskIsometry, DiskPoint};

fn point() -> impl Strategy<Value = DiskPoint> {
    (0.0..0.97f64, 0.0..TAU).prop_map(|(r, t)| DiskPoint::new(r * t.cos(), r * t.sin()).unwrap())
}

fn boundary() -> impl Strategy<Value = BoundaryPoint> {
    (0.0..TAU).prop_map(BoundaryPoint::new)
}

fn isometry() -> impl Strategy<Value = DiskIsometry> {
    (point(), 0.0..TAU).prop_map(|(p, phi)| DiskPoint::translation(&p).compose(&DiskIsometry::rotation(phi)))
}

proptest! {
    #[test]
    fn distance_is_invariant(g in isometry(), x in point(), y in point()) {
        let d = dist(x, y);
        prop_assert!((dist(g.apply(x), g.apply(y)) - d).abs() <= 1e-8 * (1.0 + d));
    }

    #[test]
    fn triangle_inequality(x in point(), y in point(), z in point()) {
        prop_assert!(dist(x, z) <= dist(x, y) + dist(y, z) + 1e-9);
    }

    #[test]
    fn busemann_is_a_cocycle(xi in boundary(), x in point(), y in point(), z in point()) {
        let lhs = busemann(xi, x, z);
        let rhs = busemann(xi, x, y) + busemann(xi, y, z);
        prop_assert!((lhs - rhs).abs() <= 1e-9);
    }

    #[test]
    fn busemann_is_equivariant(g in isometry(), xi in boundary(), x in point(), y in point()) {
        let moved = busemann(g.apply_boundary(xi), g.apply(x), g.apply(y));
        prop_assert!((moved - busemann(xi, x, y)).abs() <= 1e-7);
    }

    #[test]
    fn gromov_product_is_symmetric_and_nonnegative(p in point(), xi in boundary(), gap in 0.01..(TAU - 0.01)) {
        let eta = BoundaryPoint::new(xi.theta() + gap);
        let a = gromov_product(p, xi, eta).unwrap();
        let b = gromov_product(p, eta, xi).unwrap();
        prop_assert!(a >= -1e-9);
        prop_assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn isometry_inverse_round_trips(g in isometry(), x in point()) {
        let back = g.inverse().apply(g.apply(x));
        prop_assert!(dist(back, x) <= 1e-7);
    }
}
