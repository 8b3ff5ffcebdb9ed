//! Rejection sampling of boundary pairs from the BMS quasi-product.

use psbench::flow::{bms_base_point_residual, bms_sample};
use psbench::geometry::{BoundaryPoint, DiskPoint};
use psbench::group::GroupPreset;
use psbench::measure::ps_histogram;
use psbench::orbit::enumerate_ball;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let preset = GroupPreset::by_name("schottky_perp(3)")?;
    let o = DiskPoint::ORIGIN;
    let ball = enumerate_ball(&preset.generators, o, o, 12.0, 1 << 22)?;
    let s = 0.7;
    let mu = ps_histogram(&ball, s, o, 1024)?;

    let out = bms_sample(&mu, s, 10, 42)?;
    println!("envelope {:.3e}, doublings {}", out.envelope, out.envelope_doublings);
    for x in &out.samples {
        println!(
            "  #{:<2} xi {:.4}  eta {:.4}  density {:.4}  proposals {}",
            x.index,
            x.xi.theta(),
            x.eta.theta(),
            x.density,
            x.proposals
        );
    }

    // the product density does not depend on the base point
    let q = DiskPoint::new(0.2, -0.5)?;
    let r = bms_base_point_residual(o, q, s, BoundaryPoint::new(0.3), BoundaryPoint::new(2.9))?;
    println!("base-point residual {r:.2e}");
    Ok(())
}
