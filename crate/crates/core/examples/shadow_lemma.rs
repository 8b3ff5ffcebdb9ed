//! Shadow-lemma ratios μ(shadow) / e^{-s d} over a Schottky ball.

use psbench::geometry::DiskPoint;
use psbench::group::GroupPreset;
use psbench::measure::{ps_histogram_tail, shadow_lemma_audit, support_minimality_probe};
use psbench::orbit::{annuli_counts, enumerate_ball};
use psbench::series::{annuli_bound, estimate_delta_counting};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let preset = GroupPreset::by_name("schottky_perp(3)")?;
    let o = DiskPoint::ORIGIN;
    let ball = enumerate_ball(&preset.generators, o, o, 14.0, 1 << 22)?;
    let s = estimate_delta_counting(&annuli_counts(&ball))?.value + 0.05;
    for bins in [1024, 2048, 4096] {
        let mu = ps_histogram_tail(&ball, s, o, bins, ball.radius / 2.0)?;
        let rep = shadow_lemma_audit(&ball, &mu, 1.5, s)?;
        let min = support_minimality_probe(&mu, &ball, mu.bin_width())?;
        println!(
            "bins {bins:<5} evaluated {:<5} unresolved {:<5} C_emp {:.3}  minimality coverage {:.3}",
            rep.evaluated, rep.unresolved, rep.c_emp, min.coverage
        );
    }
    let bound = annuli_bound(&ball, s);
    println!("annulus sums max/median = {:.3}", bound.ratio);
    Ok(())
}
