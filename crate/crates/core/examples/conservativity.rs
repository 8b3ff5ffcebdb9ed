//! The full conservativity pipeline on a Schottky group.
//!
//! ```text
//! cargo run --release --example conservativity -- "schottky_perp(3)" 14
//! ```

use psbench::flow::{conservativity_report, ClassifyOptions};
use psbench::group::GroupPreset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "schottky_perp(3)".into());
    let radius: f64 = args.next().map_or(Ok(14.0), |r| r.parse())?;
    let preset = GroupPreset::by_name(&name)?;
    let options = ClassifyOptions {
        radius,
        ..ClassifyOptions::default()
    };
    let report = conservativity_report(&preset, &options)?;
    println!("{} at R = {radius}: {}", report.preset, report.verdict);
    println!("  δ̂ = {:.4}, s = {:.4}", report.delta.value, report.s);
    println!("  series     {:?}", report.series_indicator);
    println!("  conical    {:?} ({:.2})", report.conical_indicator, report.conical_fraction);
    println!("  recurrence {:?} ({:.2})", report.recurrence_indicator, report.recurrence_fraction);
    for t in &report.myrberg_trends {
        let at = |n: f64| t.medians.iter().find(|m| m.0 == n).map_or(f64::NAN, |m| m.1);
        println!(
            "  myrberg pair {}: median ε {:.4} -> {:.4} (depth {} -> {})",
            t.pair,
            at(t.from_depth),
            at(t.to_depth),
            t.from_depth,
            t.to_depth
        );
    }
    if let Some(c) = &report.lebesgue_control {
        println!("  uniform directions in the limit set: {:.2}", c.in_limit_set);
    }
    Ok(())
}
