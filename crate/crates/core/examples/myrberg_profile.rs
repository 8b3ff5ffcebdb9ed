//! Myrberg approach ε against depth, on the modular group and a cyclic control.

use psbench::flow::{default_myrberg_targets, myrberg_statistic, MyrbergTarget};
use psbench::geometry::{BoundaryPoint, DiskPoint};
use psbench::group::{fixed_boundary_points, GroupPreset};
use psbench::measure::ps_histogram;
use psbench::orbit::enumerate_ball;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let o = DiskPoint::ORIGIN;
    let modular = GroupPreset::modular();
    let ball = enumerate_ball(&modular.generators, o, o, 11.0, 1 << 24)?;
    let mu = ps_histogram(&ball, 1.05, o, 1024)?;
    let targets = default_myrberg_targets(&mu, 0.5);
    let xi = BoundaryPoint::new(1.234_567);
    let prof = myrberg_statistic(xi, &targets, &ball, o)?;
    for (k, eps) in prof.eps.iter().enumerate() {
        let row: Vec<String> = eps.iter().map(|e| format!("{e:.3}")).collect();
        println!("modular pair {k}: {}", row.join(" "));
    }

    // ξ fixed by the whole group never moves toward η′
    let cyclic = GroupPreset::by_name("cyclic_axial(2)")?;
    let cball = enumerate_ball(&cyclic.generators, o, o, 11.0, 1 << 20)?;
    let fixed = fixed_boundary_points(&cyclic.generators[0])?;
    let target = MyrbergTarget {
        eta: fixed[0],
        eta_prime: BoundaryPoint::new(fixed[1].theta() + 1.0),
    };
    let prof = myrberg_statistic(fixed[1], &[target], &cball, o)?;
    println!("cyclic control ε at depth 11: {:.3}", prof.worst_at(11));
    Ok(())
}
