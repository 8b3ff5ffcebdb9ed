//! The conical statistic for a limit point and for a direction in a gap.

use psbench::flow::{conical_statistic, default_conical_threshold, OrbitView};
use psbench::geometry::{BoundaryPoint, DiskPoint};
use psbench::group::{fixed_boundary_points, GroupPreset};
use psbench::orbit::enumerate_ball;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let preset = GroupPreset::by_name("schottky_perp(3)")?;
    let o = DiskPoint::ORIGIN;
    let ball = enumerate_ball(&preset.generators, o, o, 14.0, 1 << 22)?;
    let threshold = default_conical_threshold(o, ball.base_q);
    println!("threshold {threshold:.4}");

    let view = OrbitView::new(&ball, o);
    let fixed = fixed_boundary_points(&preset.generators[0])?[0];
    for (label, xi) in [("fixed point", fixed), ("gap", BoundaryPoint::new(0.8))] {
        let c = view.conical(xi);
        let profile: Vec<String> = c.profile.iter().map(|(n, v)| format!("{n}:{v:.3}")).collect();
        println!(
            "{label:<12} {}  conical {}  recurrent {}",
            profile.join(" "),
            c.is_conical(threshold, 0.05),
            c.is_recurrent(threshold)
        );
    }
    // one-off form
    let c = conical_statistic(fixed, &ball, o);
    println!("final C_n at the fixed point {:.3e}", c.final_value());
    Ok(())
}
