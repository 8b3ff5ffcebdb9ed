//! Busemann functions, Gromov products and shadows in the Poincaré disk.
//!
//! ```text
//! cargo run --release --example disk_geometry
//! ```

use psbench::geometry::{
    busemann, busemann_limit_oracle, dist, gromov_product, shadow_arc, visibility_constant,
    BoundaryPoint, DiskPoint,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = DiskPoint::from_half_plane(0.0, 1.0)?;
    let x = DiskPoint::new(0.3, -0.4)?;
    let xi = BoundaryPoint::new(1.0);

    // closed form against the defining limit d(p, c(t)) - t
    let closed = busemann(xi, p, x);
    let limit = busemann_limit_oracle(xi, p, x, 30.0)?;
    println!("busemann  closed {closed:+.12}  limit {limit:+.12}");
    println!("          |b| = {:.6} <= d(p,x) = {:.6}", closed.abs(), dist(p, x));

    let eta = BoundaryPoint::new(3.5);
    println!("gromov    beta_p(xi, eta) = {:.6}", gromov_product(p, xi, eta)?);

    // sin psi = sinh R / sinh D
    let z = DiskPoint::new(0.0, 0.9)?;
    for r in [0.5, 1.0, 2.0] {
        let arc = shadow_arc(p, z, r);
        println!(
            "shadow    R = {r:.1}  half-width {:.6}  full {}",
            arc.half_width,
            arc.is_full()
        );
    }

    for eps in [0.1, 0.5, std::f64::consts::FRAC_PI_2] {
        println!("visibility R({eps:.3}) = {:.6}", visibility_constant(eps)?);
    }
    Ok(())
}
