//! Classifying half-plane matrices and reading off their fixed points.

use psbench::group::{
    axis_and_length, classify, commuting_fixed_point_audit, fixed_boundary_points, GroupPreset,
    MobiusMap,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let samples = [
        ("S", MobiusMap::new(0.0, -1.0, 1.0, 0.0)?),
        ("T", MobiusMap::new(1.0, 1.0, 0.0, 1.0)?),
        ("diag(3)", MobiusMap::diagonal(3.0)?),
        ("ST", MobiusMap::new(0.0, -1.0, 1.0, 1.0)?),
    ];
    for (name, m) in &samples {
        let fixed: Vec<String> = fixed_boundary_points(m)?
            .iter()
            .map(|x| format!("{:.4}", x.theta()))
            .collect();
        println!(
            "{name:>8}  trace {:+.3}  {:?}  boundary fixed points [{}]",
            m.trace(),
            classify(m),
            fixed.join(", ")
        );
    }

    let a = MobiusMap::diagonal(3.0)?;
    let (axis, len) = axis_and_length(&a)?;
    println!(
        "axis of diag(3): {:.4} -> {:.4}, translation length {len:.6}",
        axis.theta_minus().theta(),
        axis.theta_plus().theta()
    );
    let audit = commuting_fixed_point_audit(&a, &MobiusMap::diagonal(2.0)?, 3)?;
    println!("diag(2) commutes with diag(3)^3 and fixes its axis: {}", audit.pass);

    for name in GroupPreset::names() {
        let g = GroupPreset::by_name(name)?;
        println!("preset {:<22} {} generator(s)  {}", g.name, g.generators.len(), g.delta_note);
    }
    Ok(())
}
