//! Enumerating an orbit ball and counting its annuli.

use psbench::geometry::{BoundaryPoint, DiskPoint};
use psbench::group::GroupPreset;
use psbench::orbit::{annuli_counts, dual_pair_witness, enumerate_ball};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let preset = GroupPreset::by_name("schottky_perp(3)")?;
    let o = DiskPoint::ORIGIN;
    let ball = enumerate_ball(&preset.generators, o, o, 12.0, 1 << 22)?;
    println!(
        "{}: {} elements within distance {} ({} explored)",
        preset.name,
        ball.len(),
        ball.radius,
        ball.explored
    );
    for e in ball.elements.iter().take(6) {
        println!("  {:<8} d = {:.6}", e.word.to_string(), e.distance);
    }
    let counts = annuli_counts(&ball);
    for (n, a) in counts.iter().enumerate() {
        println!("  a_{n:<2} = {a}");
    }

    // α with α⁻¹p toward one limit point and αp toward another
    let (xi, eta) = (BoundaryPoint::new(0.0), BoundaryPoint::new(std::f64::consts::FRAC_PI_2));
    if let Some(w) = dual_pair_witness(&ball, xi, eta, 0.1) {
        println!("dual pair witness {} with residual {:.3e}", w.word, w.residual);
    }
    Ok(())
}
