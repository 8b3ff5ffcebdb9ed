//! The four command-line verbs and the files they write.
//!
//! Every command is a pure function of its [`RunConfig`]: outputs are written
//! single-threaded, numbers use fixed formats, and JSON documents carry a
//! `schema_version`, so reruns are byte-identical.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{GroupError, ReportError};
use crate::flow::{conservativity_run, write_records_csv};
use crate::group::GroupPreset;
use crate::measure::{
    cocycle_audit, equivariance_audit, fmt17, ps_histogram, ps_histogram_tail, shadow_lemma_audit,
    support_minimality_probe, HistogramSummary, MeasureHistogram, MinimalityReport,
};
use crate::orbit::{annuli_counts, enumerate_ball_with, EnumerationOptions, OrbitBall};
use crate::series::{
    annuli_bound, default_s_grid, estimate_delta_counting, poincare_report, AnnuliBound, SCHEMA_VERSION,
};

/// Orbit points drawn in `limitset.svg`, deepest first.
pub const SVG_MAX_DOTS: usize = 12_000;

/// Enumerates the configured ball around `p`. A ball cut short by
/// `max_elements` is kept, with a warning, and flagged incomplete.
pub fn build_ball(cfg: &RunConfig) -> Result<(GroupPreset, OrbitBall), ReportError> {
    let preset = cfg.group()?;
    let p = cfg.p_disk()?;
    let options = EnumerationOptions {
        slack: None,
        filter: preset.filter,
    };
    let ball = match enumerate_ball_with(&preset.generators, p, p, cfg.radius, cfg.max_elements, options) {
        Ok(ball) => ball,
        Err(GroupError::BudgetExceeded { budget, partial, .. }) => {
            log::warn!("element budget {budget} reached; continuing with an incomplete ball");
            *partial
        }
        Err(e) => return Err(e.into()),
    };
    Ok((preset, ball))
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>), ReportError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let file = File::create(&path)?;
    Ok((path, BufWriter::new(file)))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, ReportError> {
    let (path, mut w) = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(path)
}

/// `orbit_ball.csv` and `annuli.csv`.
pub fn cmd_orbit(cfg: &RunConfig) -> Result<Vec<PathBuf>, ReportError> {
    let (_, ball) = build_ball(cfg)?;
    write_orbit(&ball, &cfg.out)
}

pub fn write_orbit(ball: &OrbitBall, dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    let (orbit_path, w) = create(dir, "orbit_ball.csv")?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["index", "word", "a", "b", "c", "d", "re", "im", "distance"])?;
    for (i, e) in ball.elements.iter().enumerate() {
        let [a, b, c, d] = e.map.entries();
        csv.write_record([
            i.to_string(),
            e.word.to_string(),
            fmt17(a),
            fmt17(b),
            fmt17(c),
            fmt17(d),
            fmt17(e.point.re()),
            fmt17(e.point.im()),
            fmt17(e.distance),
        ])?;
    }
    csv.flush()?;

    let (annuli_path, w) = create(dir, "annuli.csv")?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["n", "a_n"])?;
    for (n, a) in annuli_counts(ball).iter().enumerate() {
        csv.write_record([n.to_string(), a.to_string()])?;
    }
    csv.flush()?;
    Ok(vec![orbit_path, annuli_path])
}

/// `poincare_report.json`.
pub fn cmd_delta(cfg: &RunConfig) -> Result<Vec<PathBuf>, ReportError> {
    let (_, ball) = build_ball(cfg)?;
    let report = poincare_report(&ball, &default_s_grid(), &cfg.thresholds.divergence())?;
    Ok(vec![write_json(&cfg.out, "poincare_report.json", &report)?])
}

/// Exponent used by `measure`: the configured value or `δ̂ + margin`.
pub fn measure_exponent(cfg: &RunConfig, ball: &OrbitBall) -> Result<f64, ReportError> {
    match cfg.s.value() {
        Some(s) => Ok(s),
        None => Ok(estimate_delta_counting(&annuli_counts(ball))?.value + cfg.margin),
    }
}

#[derive(Debug, Serialize)]
struct ShadowDocument {
    schema_version: u32,
    /// Measured on the tail histogram (atoms beyond half the radius).
    shadow: crate::measure::ShadowLemmaReport,
    annuli_bound: AnnuliBound,
    minimality: MinimalityReport,
    histogram: HistogramSummary,
}

/// `ps_histogram.csv`, `cocycle_audit.json`, `equivariance_audit.json`,
/// `shadow_audit.json` and `limitset.svg`.
///
/// The cocycle and shadow audits use tail histograms that leave out atoms
/// closer than half the radius; the weak limit does not see finitely many
/// atoms, and the near ones dominate the finite-radius error.
pub fn cmd_measure(cfg: &RunConfig) -> Result<Vec<PathBuf>, ReportError> {
    let (preset, ball) = build_ball(cfg)?;
    let s = measure_exponent(cfg, &ball)?;
    let (p, q) = (cfg.p_disk()?, cfg.q_disk()?);
    let dir = &cfg.out;
    let mut written = Vec::new();

    let mu = ps_histogram(&ball, s, p, cfg.bins)?;
    let (path, w) = create(dir, "ps_histogram.csv")?;
    mu.write_csv(w)?;
    written.push(path);

    let inner = ball.radius / 2.0;
    let tail_p = ps_histogram_tail(&ball, s, p, cfg.bins, inner)?;
    let tail_q = ps_histogram_tail(&ball, s, q, cfg.bins, inner)?;
    let cocycle = cocycle_audit(&tail_p, &tail_q, s)?;
    written.push(write_json(dir, "cocycle_audit.json", &cocycle)?);

    let equivariance = equivariance_audit(&ball, s, p, &preset.generators[0], cfg.bins)?;
    written.push(write_json(dir, "equivariance_audit.json", &equivariance)?);

    let shadow = ShadowDocument {
        schema_version: SCHEMA_VERSION,
        shadow: shadow_lemma_audit(&ball, &tail_p, cfg.shadow_radius, s)?,
        annuli_bound: annuli_bound(&ball, s),
        minimality: support_minimality_probe(&mu, &ball, mu.bin_width())?,
        histogram: mu.summary(),
    };
    written.push(write_json(dir, "shadow_audit.json", &shadow)?);

    let (path, mut w) = create(dir, "limitset.svg")?;
    w.write_all(limit_set_svg(&mu, &ball).as_bytes())?;
    w.flush()?;
    written.push(path);
    Ok(written)
}

/// The unit circle with bin weights as radial bars and the deepest orbit
/// points as dots.
pub fn limit_set_svg(mu: &MeasureHistogram, ball: &OrbitBall) -> String {
    const HALF: f64 = 500.0;
    const RING: f64 = 400.0;
    const BAR: f64 = 90.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="1000" height="1000" viewBox="0 0 1000 1000">
<rect width="1000" height="1000" fill="white"/>
<circle cx="{HALF}" cy="{HALF}" r="{RING}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    let top = mu.weights.iter().copied().fold(0.0, f64::max);
    if top > 0.0 {
        let _ = writeln!(svg, r#"<g stroke="steelblue" stroke-width="2">"#);
        for (k, &w) in mu.weights.iter().enumerate() {
            if !mu.is_positive(k) {
                continue;
            }
            let theta = mu.center(k).theta();
            let (c, s) = (theta.cos(), -theta.sin());
            let len = BAR * (w / top).sqrt();
            let _ = writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
                HALF + RING * c,
                HALF + RING * s,
                HALF + (RING + len) * c,
                HALF + (RING + len) * s
            );
        }
        let _ = writeln!(svg, "</g>");
    }
    let _ = writeln!(svg, r#"<g fill="firebrick">"#);
    let start = ball.len().saturating_sub(SVG_MAX_DOTS);
    for e in &ball.elements[start..] {
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="1"/>"#,
            HALF + RING * e.point.re(),
            HALF - RING * e.point.im()
        );
    }
    let _ = writeln!(svg, "</g>\n</svg>");
    svg
}

/// `conservativity_report.json` and `classification_records.csv`.
pub fn cmd_classify(cfg: &RunConfig) -> Result<Vec<PathBuf>, ReportError> {
    let (preset, ball) = build_ball(cfg)?;
    let options = cfg.classify_options()?;
    let (report, records) = conservativity_run(&preset, &ball, &options)?;
    let mut written = vec![write_json(&cfg.out, "conservativity_report.json", &report)?];
    let (path, w) = create(&cfg.out, "classification_records.csv")?;
    write_records_csv(&records, w)?;
    written.push(path);
    Ok(written)
}
