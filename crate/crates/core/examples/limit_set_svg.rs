//! Writes `limitset.svg` for a Schottky group into the current directory.

use psbench::config::RunConfig;
use psbench::measure::ps_histogram;
use psbench::report::{build_ball, limit_set_svg};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = RunConfig {
        preset: "schottky_perp(3)".into(),
        radius: 12.0,
        bins: 2048,
        ..RunConfig::default()
    };
    let (_, ball) = build_ball(&cfg)?;
    let mu = ps_histogram(&ball, 0.65, cfg.p_disk()?, cfg.bins)?;
    let svg = limit_set_svg(&mu, &ball);
    std::fs::write("limitset.svg", &svg)?;
    println!("wrote limitset.svg ({} bytes, {} positive bins)", svg.len(), mu.positive_bins().len());
    Ok(())
}
