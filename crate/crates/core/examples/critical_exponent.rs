//! Two estimates of the critical exponent and the divergence test at each.

use psbench::geometry::DiskPoint;
use psbench::group::GroupPreset;
use psbench::orbit::{annuli_counts, enumerate_ball_with, EnumerationOptions};
use psbench::series::{
    default_s_grid, divergence_diagnostic, estimate_delta_counting, estimate_delta_partial_sum,
    DivergenceThresholds,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let o = DiskPoint::ORIGIN;
    for (name, radius) in [
        ("cyclic_axial(2)", 14.0),
        ("cyclic_parabolic", 14.0),
        ("schottky_perp(3)", 14.0),
        ("modular", 11.0),
    ] {
        let preset = GroupPreset::by_name(name)?;
        let options = EnumerationOptions {
            slack: None,
            filter: preset.filter,
        };
        let ball = enumerate_ball_with(&preset.generators, o, o, radius, 1 << 24, options)?;
        let counting = estimate_delta_counting(&annuli_counts(&ball))?;
        let partial = estimate_delta_partial_sum(&ball, &default_s_grid());
        let diag = divergence_diagnostic(&ball, counting.value, &DivergenceThresholds::default())?;
        println!(
            "{name:<18} R={radius:<4} |ball|={:<8} counting {:.4}  partial-sum {}  at δ̂: {:?}",
            ball.len(),
            counting.value,
            partial.map_or_else(|e| e.to_string(), |d| format!("{d:.4}")),
            diag.verdict
        );
    }
    Ok(())
}
