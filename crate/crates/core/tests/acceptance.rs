//! Acceptance run: one line per criterion, nonzero exit if any fails.
//!
//! Runs as a plain binary (no libtest harness) so the modular ball of radius
//! 14, about 3.6 million elements, is built once and released early.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use psbench::flow::{conservativity_report, conservativity_run, ClassificationRecord, ClassifyOptions};
use psbench::geometry::{
    busemann, busemann_limit_oracle, dist, dist_to_ray, gromov_product, geodesic_between, shadow_arc,
    BoundaryPoint, DiskPoint, Geodesic,
};
use psbench::group::GroupPreset;
use psbench::measure::{cocycle_audit, equivariance_audit, ps_histogram_tail, shadow_lemma_audit};
use psbench::orbit::{annuli_counts, enumerate_ball_with, EnumerationOptions, OrbitBall};
use psbench::series::{
    annuli_bound, default_s_grid, estimate_delta_counting, estimate_delta_partial_sum,
    partial_sums_by_radius, poincare_partial,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_point(rng: &mut ChaCha8Rng, r: f64) -> DiskPoint {
    let (rad, th) = (r * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU));
    DiskPoint::new(rad * th.cos(), rad * th.sin()).unwrap()
}

fn random_boundary(rng: &mut ChaCha8Rng) -> BoundaryPoint {
    BoundaryPoint::new(rng.gen_range(0.0..TAU))
}

fn ball(name: &str, radius: f64) -> OrbitBall {
    let preset = GroupPreset::by_name(name).unwrap();
    let options = EnumerationOptions {
        slack: None,
        filter: preset.filter,
    };
    let o = DiskPoint::ORIGIN;
    enumerate_ball_with(&preset.generators, o, o, radius, 1 << 24, options).unwrap()
}

fn nonincreasing(v: impl IntoIterator<Item = f64>) -> bool {
    let v: Vec<f64> = v.into_iter().collect();
    v.windows(2).all(|w| w[1] <= w[0])
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn busemann_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (p, x) = (random_point(&mut rng, 0.95), random_point(&mut rng, 0.95));
        let xi = random_boundary(&mut rng);
        let oracle = busemann_limit_oracle(xi, p, x, 30.0).unwrap();
        worst = worst.max((oracle - busemann(xi, p, x)).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst <= 1e-6 && secs < 5.0, format!("sup error {worst:.2e}, {secs:.2} s"))
}

fn busemann_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0;
    for _ in 0..100_000 {
        let (p, x) = (random_point(&mut rng, 0.99), random_point(&mut rng, 0.99));
        let xi = random_boundary(&mut rng);
        if busemann(xi, p, x).abs() > dist(p, x) {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("{violations} violations on 100000 triples"))
}

fn gromov_witness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = random_point(&mut rng, 0.9);
        let xi = random_boundary(&mut rng);
        let eta = BoundaryPoint::new(xi.theta() + rng.gen_range(0.05..TAU - 0.05));
        let g = geodesic_between(xi, eta).unwrap();
        let reference = gromov_product(p, xi, eta).unwrap();
        for _ in 0..5 {
            let x = g.point_at(rng.gen_range(-5.0..5.0));
            worst = worst.max((busemann(xi, p, x) + busemann(eta, p, x) - reference).abs());
        }
    }
    outcome(worst <= 1e-9, format!("max witness spread {worst:.2e}"))
}

/// Half-width of the shadow found by bisecting on the ray direction until the
/// ray is tangent to the ball.
fn tangency_half_width(p: DiskPoint, z: DiskPoint, radius: f64, center: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, PI / 2.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if dist_to_ray(z, &Geodesic::through(p, center + mid)) <= radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn shadow_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst, mut cases): (f64, usize) = (0.0, 0);
    while cases < 1000 {
        let p = random_point(&mut rng, 0.8);
        let z = random_point(&mut rng, 0.995);
        let d = dist(p, z);
        let radius = rng.gen_range(0.05..3.0);
        if d <= radius + 0.05 {
            continue;
        }
        let arc = shadow_arc(p, z, radius);
        let law = (radius.sinh() / d.sinh()).asin();
        let bisected = tangency_half_width(p, z, radius, arc.center);
        worst = worst.max((arc.half_width - law).abs()).max((bisected - law).abs());
        cases += 1;
    }
    outcome(worst <= 1e-6, format!("max deviation {worst:.2e} over {cases} cases"))
}

fn cyclic_exactness() -> Outcome {
    let b = ball("cyclic_axial(2)", 10.0);
    let expected = 1.0 + 2.0 * (1..=5).map(|n| (-2.0 * n as f64).exp()).sum::<f64>();
    let err = (poincare_partial(&b, 1.0) - expected).abs();
    let delta = estimate_delta_counting(&annuli_counts(&ball("cyclic_axial(2)", 14.0)))
        .unwrap()
        .value;
    outcome(
        b.len() == 11 && err <= 1e-12 && delta <= 0.05,
        format!("{} elements, partial sum error {err:.1e}, δ̂ = {delta:.4}", b.len()),
    )
}

fn critical_exponents(modular: &OrbitBall, modular_secs: f64) -> Outcome {
    let mut worst_gap: f64 = 0.0;
    let mut line = Vec::new();
    let mut estimates = |name: &str, b: &OrbitBall| {
        let c = estimate_delta_counting(&annuli_counts(b)).unwrap().value;
        let s = estimate_delta_partial_sum(b, &default_s_grid()).unwrap();
        worst_gap = worst_gap.max((c - s).abs());
        line.push(format!("{name} {c:.3}/{s:.3}"));
        c
    };
    let start = Instant::now();
    let m = estimates("modular", modular);
    let modular_secs = modular_secs + start.elapsed().as_secs_f64();
    let parabolic = estimates("cyclic_parabolic", &ball("cyclic_parabolic", 14.0));
    for name in ["cyclic_axial(2)", "schottky_perp(3)", "zcover_schottky(3)"] {
        estimates(name, &ball(name, 14.0));
    }
    let pass = (0.9..=1.05).contains(&m)
        && modular_secs < 60.0
        && (0.43..=0.57).contains(&parabolic)
        && worst_gap <= 0.07;
    outcome(
        pass,
        format!(
            "{}; largest gap {worst_gap:.3}; modular {modular_secs:.1} s",
            line.join(", ")
        ),
    )
}

fn cocycle(modular: &OrbitBall, s: f64) -> Outcome {
    let p = DiskPoint::ORIGIN;
    let q = DiskPoint::new(0.3, 0.0).unwrap();
    let same = {
        let b = modular.truncated(10.0);
        let h = ps_histogram_tail(&b, s, p, 1024, 5.0).unwrap();
        cocycle_audit(&h, &h.clone(), s).unwrap()
    };
    let zeros = same.max_abs_deviation == 0.0 && same.deviations.iter().all(|d| d.1 == 0.0);
    let devs: Vec<f64> = (10..=14)
        .map(|r| {
            let b = modular.truncated(r as f64);
            let hp = ps_histogram_tail(&b, s, p, 1024, r as f64 / 2.0).unwrap();
            let hq = ps_histogram_tail(&b, s, q, 1024, r as f64 / 2.0).unwrap();
            cocycle_audit(&hp, &hq, s).unwrap().mean_deviation
        })
        .collect();
    let shown: Vec<String> = devs.iter().map(|d| format!("{d:.2e}")).collect();
    outcome(
        zeros && strictly_decreasing(&devs),
        format!("p = q exact zeros: {zeros}; mean deviation R=10..14: {}", shown.join(" ")),
    )
}

fn equivariance(modular: &OrbitBall, s: f64) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let cyclic = ball("cyclic_axial(2)", 14.0);
    let cases: [(&str, &OrbitBall, usize, f64); 3] = [
        ("cyclic", &cyclic, 0, 0.05),
        ("modular S", modular, 0, s),
        ("modular T", modular, 1, s),
    ];
    for (label, b, g, exponent) in cases {
        let alpha = b.generators[g];
        // radii that add no orbit point give the same ball and the same audit
        let mut sizes = Vec::new();
        let rows: Vec<(f64, f64)> = (10..=14)
            .map(|r| b.truncated(r as f64))
            .filter(|t| {
                let fresh = sizes.last() != Some(&t.len());
                sizes.push(t.len());
                fresh
            })
            .map(|t| {
                let e = equivariance_audit(&t, exponent, DiskPoint::ORIGIN, &alpha, 1024).unwrap();
                (e.total_variation, e.boundary_annulus_mass)
            })
            .collect();
        let bounded = rows.iter().all(|(tv, bound)| tv <= bound);
        let tvs: Vec<f64> = rows.iter().map(|r| r.0).collect();
        // an element fixing the base point moves nothing: zero at every radius
        let decreasing = strictly_decreasing(&tvs) || tvs.iter().all(|&t| t == 0.0);
        pass &= bounded && decreasing;
        parts.push(format!(
            "{label} TV {:.2e} -> {:.2e} (bound {:.2e} -> {:.2e})",
            rows[0].0,
            rows[rows.len() - 1].0,
            rows[0].1,
            rows[rows.len() - 1].1
        ));
    }
    outcome(pass, parts.join("; "))
}

fn shadow(modular: &OrbitBall, delta: f64, s: f64) -> Outcome {
    let p = DiskPoint::ORIGIN;
    let c: Vec<f64> = [1024, 2048]
        .iter()
        .map(|&bins| {
            let h = ps_histogram_tail(modular, s, p, bins, modular.radius / 2.0).unwrap();
            shadow_lemma_audit(modular, &h, 1.5, s).unwrap().c_emp
        })
        .collect();
    let stable = c.iter().all(|x| x.is_finite()) && c[1] / c[0] <= 2.0 && c[0] / c[1] <= 2.0;
    let ratio = annuli_bound(modular, delta).ratio;
    outcome(
        stable && ratio <= 20.0,
        format!("C_emp {:.3} (1024 bins), {:.3} (2048 bins); annuli max/median {ratio:.3}", c[0], c[1]),
    )
}

fn profiles_monotone(records: &[ClassificationRecord]) -> bool {
    records.iter().all(|r| {
        nonincreasing(r.conical.profile.iter().map(|x| x.1))
            && r.myrberg.eps.iter().all(|e| nonincreasing(e.iter().copied()))
    })
}

fn dichotomy(modular: &OrbitBall, modular_secs: f64, records: &mut Vec<ClassificationRecord>) -> Outcome {
    let options = ClassifyOptions::default();
    let mut pass = true;
    let mut parts = Vec::new();
    let start = Instant::now();
    let (m, m_records) = conservativity_run(&GroupPreset::modular(), modular, &options).unwrap();
    let pipeline_secs = modular_secs + start.elapsed().as_secs_f64();
    let (sch, sch_records) = {
        let preset = GroupPreset::by_name("schottky_perp(3)").unwrap();
        let b = ball("schottky_perp(3)", options.radius);
        conservativity_run(&preset, &b, &options).unwrap()
    };
    for r in [&m, &sch] {
        let ok = r.verdict == "conservative-consistent"
            && r.conical_fraction >= 0.9
            && r.myrberg_decreasing
            && r.lm_lc_violations == 0;
        pass &= ok;
        parts.push(format!(
            "{} {} conical {:.2} myrberg decreasing {}",
            r.preset, r.verdict, r.conical_fraction, r.myrberg_decreasing
        ));
    }
    for name in ["cyclic_axial(2)", "cyclic_parabolic"] {
        let preset = GroupPreset::by_name(name).unwrap();
        let r = conservativity_report(&preset, &options).unwrap();
        pass &= r.verdict == "elementary";
        parts.push(format!("{name} {}", r.verdict));
    }
    pass &= pipeline_secs < 300.0;
    parts.push(format!("modular pipeline {pipeline_secs:.1} s"));
    records.extend(m_records);
    records.extend(sch_records);
    outcome(pass, parts.join("; "))
}

fn monotonicity(modular: &OrbitBall, records: &[ClassificationRecord]) -> Outcome {
    let grid = default_s_grid();
    let mut sums_ok = true;
    let balls: Vec<OrbitBall> = ["cyclic_axial(2)", "cyclic_parabolic", "schottky_perp(3)", "zcover_schottky(3)"]
        .iter()
        .map(|n| ball(n, 14.0))
        .collect();
    for b in balls.iter().chain(std::iter::once(modular)) {
        for &s in &grid {
            let sums = partial_sums_by_radius(b, s);
            sums_ok &= sums.windows(2).all(|w| w[1] >= w[0]);
        }
    }
    let profiles_ok = profiles_monotone(records);
    outcome(
        sums_ok && profiles_ok && !records.is_empty(),
        format!(
            "partial sums nondecreasing: {sums_ok}; {} sampled profiles nonincreasing: {profiles_ok}",
            records.len()
        ),
    )
}

fn run_cli(verb: &str, args: &[&str], out: &Path, threads: &str) -> bool {
    Command::new(env!("CARGO_BIN_EXE_psbench"))
        .arg(verb)
        .args(args)
        .arg("--out")
        .arg(out)
        .env("PSBENCH_THREADS", threads)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn same_files(a: &Path, b: &Path) -> bool {
    let mut names: Vec<_> = std::fs::read_dir(a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    !names.is_empty()
        && names
            .iter()
            .all(|n| std::fs::read(a.join(n)).ok() == std::fs::read(b.join(n)).ok())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let runs: [(&str, &[&str]); 6] = [
        ("orbit", &["--preset", "modular", "--radius", "9"]),
        ("delta", &["--preset", "modular", "--radius", "10"]),
        ("measure", &["--preset", "modular", "--radius", "10", "--bins", "2048"]),
        ("measure", &["--preset", "cyclic_axial(2)", "--radius", "12"]),
        ("classify", &["--preset", "schottky_perp(3)", "--radius", "12", "--seed", "7"]),
        ("classify", &["--preset", "cyclic_axial(2)", "--radius", "12"]),
    ];
    let mut failed = Vec::new();
    for (k, (verb, args)) in runs.iter().enumerate() {
        let a = dir.path().join(format!("{k}a"));
        let b = dir.path().join(format!("{k}b"));
        // second run with a different worker count
        let ok = run_cli(verb, args, &a, "1") && run_cli(verb, args, &b, "3") && same_files(&a, &b);
        if !ok {
            failed.push(format!("{verb} {}", args.join(" ")));
        }
    }
    outcome(
        failed.is_empty(),
        if failed.is_empty() {
            format!("{} runs byte-identical across reruns and worker counts", runs.len())
        } else {
            format!("differing: {}", failed.join(", "))
        },
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut report = |n: usize, name: &'static str, o: Outcome| {
        println!("[{}] {n:>2}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((n, name, o));
    };

    report(1, "Busemann closed form vs limit oracle", busemann_oracle());
    report(2, "Busemann bounded by distance", busemann_bound());
    report(3, "Gromov product witness independence", gromov_witness());
    report(4, "Shadow half-width law vs tangency bisection", shadow_law());
    report(5, "Cyclic preset exactness", cyclic_exactness());

    let start = Instant::now();
    let modular = ball("modular", 14.0);
    let modular_secs = start.elapsed().as_secs_f64();
    let delta = estimate_delta_counting(&annuli_counts(&modular)).unwrap().value;
    let s = delta + 0.05;

    report(6, "Critical exponents", critical_exponents(&modular, modular_secs));
    report(7, "Cocycle audit", cocycle(&modular, s));
    report(8, "Equivariance audit", equivariance(&modular, s));
    report(9, "Shadow lemma audit", shadow(&modular, delta, s));
    let mut records = Vec::new();
    report(10, "Dichotomy consistency", dichotomy(&modular, modular_secs, &mut records));
    report(11, "Monotonicity invariants", monotonicity(&modular, &records));
    drop(modular);
    report(12, "CLI determinism", determinism());

    let failed = results.iter().filter(|r| !r.2.pass).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
