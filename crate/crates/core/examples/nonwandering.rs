//! Whether a tangent vector's geodesic has both ends on the limit set.

use std::f64::consts::FRAC_PI_4;

use psbench::flow::nonwandering_test;
use psbench::geometry::{DiskPoint, TangentVector};
use psbench::group::GroupPreset;
use psbench::measure::ps_histogram;
use psbench::orbit::enumerate_ball;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let preset = GroupPreset::by_name("schottky_perp(3)")?;
    let o = DiskPoint::ORIGIN;
    let ball = enumerate_ball(&preset.generators, o, o, 12.0, 1 << 22)?;
    let mu = ps_histogram(&ball, 0.7, o, 1024)?;
    for (label, dir) in [("generator axis", 0.0), ("ping-pong gap", FRAC_PI_4)] {
        let v = TangentVector::new(o, dir);
        let r = nonwandering_test(&v, &mu, 0.02)?;
        println!(
            "{label:<15} nonwandering {}  residuals {:.3e} / {:.3e}",
            r.nonwandering, r.backward_residual, r.forward_residual
        );
    }
    Ok(())
}
