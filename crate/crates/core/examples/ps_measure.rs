//! A Patterson–Sullivan histogram and its cocycle and equivariance audits.

use psbench::geometry::DiskPoint;
use psbench::group::GroupPreset;
use psbench::measure::{cocycle_audit, equivariance_audit, ps_histogram, ps_histogram_tail};
use psbench::orbit::{annuli_counts, enumerate_ball};
use psbench::series::estimate_delta_counting;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let preset = GroupPreset::modular();
    let (p, q) = (DiskPoint::ORIGIN, DiskPoint::new(0.3, 0.0)?);
    for radius in [9.0, 10.0, 11.0] {
        let ball = enumerate_ball(&preset.generators, p, p, radius, 1 << 24)?;
        let s = estimate_delta_counting(&annuli_counts(&ball))?.value + 0.05;
        let mu = ps_histogram(&ball, s, p, 1024)?;
        let summary = mu.summary();

        // compare tails: the near atoms are not part of the limit
        let hp = ps_histogram_tail(&ball, s, p, 1024, radius / 2.0)?;
        let hq = ps_histogram_tail(&ball, s, q, 1024, radius / 2.0)?;
        let co = cocycle_audit(&hp, &hq, s)?;
        let eq = equivariance_audit(&ball, s, p, &preset.generators[1], 1024)?;
        println!(
            "R={radius:<4} s={s:.4} positive bins {:<4} cocycle mean dev {:.3e}  TV {:.3e} <= {:.3e}",
            summary.positive_bins, co.mean_deviation, eq.total_variation, eq.boundary_annulus_mass
        );
    }
    Ok(())
}
