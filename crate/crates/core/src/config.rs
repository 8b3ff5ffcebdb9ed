//! Run configuration for the command-line tool.
//!
//! A config is one TOML file; every key has a default, so an empty file (or
//! none at all) runs the modular preset at radius 14.
//!
//! ```toml
//! preset = "schottky_perp(3)"
//! radius = 12.0
//! s = "auto"
//! bins = 2048
//! p = [0.0, 1.0]
//!
//! [thresholds]
//! myrberg = 0.1
//! ```
//!
//! Inline generators replace the preset and are half-plane matrices
//! `[a, b, c, d]`:
//!
//! ```toml
//! generators = [[0.0, -1.0, 1.0, 0.0], [1.0, 1.0, 0.0, 1.0]]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::ReportError;
use crate::flow::{ClassifyOptions, ClassifyThresholds};
use crate::geometry::DiskPoint;
use crate::group::{GroupPreset, MobiusMap};
use crate::measure::{MAX_BINS, MIN_BINS};
use crate::series::DivergenceThresholds;

/// Largest radius the config accepts.
pub const MAX_RADIUS: f64 = 30.0;

/// An exponent given as a number or as `"auto"` (`δ̂ + margin`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Exponent {
    #[default]
    Auto,
    Value(f64),
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Exponent::Auto => serializer.serialize_str("auto"),
            Exponent::Value(v) => serializer.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Word(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(v) => Ok(Exponent::Value(v)),
            Raw::Word(w) if w == "auto" => Ok(Exponent::Auto),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "expected a number or \"auto\", found \"{w}\""
            ))),
        }
    }
}

impl Exponent {
    pub fn value(self) -> Option<f64> {
        match self {
            Exponent::Auto => None,
            Exponent::Value(v) => Some(v),
        }
    }
}

/// Classification thresholds as written in the config; `conical` may be `"auto"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdConfig {
    pub conical: Exponent,
    pub plateau_tolerance: f64,
    pub myrberg: f64,
    pub limit_eps: f64,
    pub target_separation: f64,
    pub fraction: f64,
    pub myrberg_window: f64,
    pub eps_div: f64,
    pub tail_decay: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        let c = ClassifyThresholds::default();
        ThresholdConfig {
            conical: Exponent::Auto,
            plateau_tolerance: c.plateau_tolerance,
            myrberg: c.myrberg,
            limit_eps: c.limit_eps,
            target_separation: c.target_separation,
            fraction: c.fraction,
            myrberg_window: c.myrberg_window,
            eps_div: c.divergence.eps_div,
            tail_decay: c.divergence.tail_decay,
        }
    }
}

impl ThresholdConfig {
    pub fn to_thresholds(&self) -> ClassifyThresholds {
        ClassifyThresholds {
            conical: self.conical.value(),
            plateau_tolerance: self.plateau_tolerance,
            myrberg: self.myrberg,
            limit_eps: self.limit_eps,
            target_separation: self.target_separation,
            fraction: self.fraction,
            myrberg_window: self.myrberg_window,
            divergence: self.divergence(),
        }
    }

    pub fn divergence(&self) -> DivergenceThresholds {
        DivergenceThresholds {
            eps_div: self.eps_div,
            tail_decay: self.tail_decay,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub preset: String,
    /// Half-plane matrices `[a, b, c, d]`; when present they replace `preset`.
    pub generators: Option<Vec<[f64; 4]>>,
    /// Base point in half-plane coordinates `[x, y]`: orbit point and viewpoint.
    pub p: [f64; 2],
    /// Second base point, half-plane coordinates; the cocycle audit compares
    /// the measures seen from `p` and from `q`.
    pub q: [f64; 2],
    pub radius: f64,
    pub s: Exponent,
    pub margin: f64,
    pub bins: usize,
    pub samples: usize,
    pub seed: u64,
    pub max_elements: usize,
    /// Shadow radius for the shadow-lemma audit.
    pub shadow_radius: f64,
    pub thresholds: ThresholdConfig,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            preset: "modular".into(),
            generators: None,
            p: [0.0, 1.0],
            q: [0.0, 2.0],
            radius: 14.0,
            s: Exponent::Auto,
            margin: 0.05,
            bins: 1024,
            samples: 50,
            seed: 0,
            max_elements: 1 << 24,
            shadow_radius: 1.5,
            thresholds: ThresholdConfig::default(),
            out: PathBuf::from("out"),
        }
    }
}

fn bad(msg: impl Into<String>) -> ReportError {
    ReportError::Config(msg.into())
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ReportError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ReportError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), ReportError> {
        if !(self.radius > 0.0 && self.radius <= MAX_RADIUS) {
            return Err(bad(format!("radius {} outside (0, {MAX_RADIUS}]", self.radius)));
        }
        if !self.bins.is_power_of_two() || !(MIN_BINS..=MAX_BINS).contains(&self.bins) {
            return Err(bad(format!(
                "bins {} must be a power of two in [{MIN_BINS}, {MAX_BINS}]",
                self.bins
            )));
        }
        if !(self.margin > 0.0) {
            return Err(bad(format!("margin {} must be positive", self.margin)));
        }
        if let Exponent::Value(s) = self.s {
            if !(s > 0.0 && s.is_finite()) {
                return Err(bad(format!("exponent s = {s} must be positive")));
            }
        }
        if self.samples == 0 {
            return Err(bad("samples must be at least 1"));
        }
        if self.max_elements == 0 {
            return Err(bad("max_elements must be at least 1"));
        }
        if !(self.shadow_radius > 0.0) {
            return Err(bad(format!("shadow_radius {} must be positive", self.shadow_radius)));
        }
        for (name, [_, y]) in [("p", self.p), ("q", self.q)] {
            if !(y > 0.0) {
                return Err(bad(format!("{name} must lie in the upper half-plane (y > 0)")));
            }
        }
        let t = &self.thresholds;
        if let Exponent::Value(c) = t.conical {
            if !(c > 0.0) {
                return Err(bad(format!("conical threshold {c} must be positive")));
            }
        }
        if !(0.0..=1.0).contains(&t.fraction) || t.fraction <= 0.5 {
            return Err(bad(format!("fraction {} must lie in (0.5, 1]", t.fraction)));
        }
        for (name, v) in [
            ("plateau_tolerance", t.plateau_tolerance),
            ("myrberg", t.myrberg),
            ("limit_eps", t.limit_eps),
            ("target_separation", t.target_separation),
            ("myrberg_window", t.myrberg_window),
            ("eps_div", t.eps_div),
            ("tail_decay", t.tail_decay),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(bad(format!("threshold {name} = {v} must be finite and nonnegative")));
            }
        }
        self.group()?;
        Ok(())
    }

    /// The group: inline generators if given, otherwise the named preset.
    pub fn group(&self) -> Result<GroupPreset, ReportError> {
        match &self.generators {
            Some(list) => {
                let generators = list
                    .iter()
                    .map(|&[a, b, c, d]| MobiusMap::new(a, b, c, d))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(GroupPreset::new("custom", generators)?)
            }
            None => Ok(GroupPreset::by_name(&self.preset)?),
        }
    }

    pub fn p_disk(&self) -> Result<DiskPoint, ReportError> {
        Ok(DiskPoint::from_half_plane(self.p[0], self.p[1])?)
    }

    pub fn q_disk(&self) -> Result<DiskPoint, ReportError> {
        Ok(DiskPoint::from_half_plane(self.q[0], self.q[1])?)
    }

    pub fn classify_options(&self) -> Result<ClassifyOptions, ReportError> {
        let p = self.p_disk()?;
        Ok(ClassifyOptions {
            radius: self.radius,
            s: self.s.value(),
            margin: self.margin,
            bins: self.bins,
            samples: self.samples,
            seed: self.seed,
            p,
            q: p,
            max_elements: self.max_elements,
            thresholds: self.thresholds.to_thresholds(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = RunConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.group().unwrap().name, "modular");
        assert_eq!(cfg.p_disk().unwrap(), DiskPoint::ORIGIN);
        assert_eq!(cfg.classify_options().unwrap().thresholds, ClassifyThresholds::default());
    }

    #[test]
    fn exponent_accepts_auto_or_number() {
        let cfg = RunConfig::from_toml_str("s = 1.2\n[thresholds]\nconical = 2.5").unwrap();
        assert_eq!(cfg.s, Exponent::Value(1.2));
        assert_eq!(cfg.classify_options().unwrap().thresholds.conical, Some(2.5));
        assert_eq!(RunConfig::from_toml_str("s = \"auto\"").unwrap().s, Exponent::Auto);
        assert!(RunConfig::from_toml_str("s = \"fast\"").is_err());
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn invalid_values_are_rejected() {
        for text in [
            "radius = 0.0",
            "radius = 31.0",
            "bins = 1000",
            "bins = 32",
            "bins = 131072",
            "samples = 0",
            "p = [0.0, -1.0]",
            "preset = \"nope\"",
            "generators = [[2.0, 0.0, 0.0, 2.0]]",
            "unknown_key = 1",
            "[thresholds]\nfraction = 0.4",
        ] {
            assert!(RunConfig::from_toml_str(text).is_err(), "{text}");
        }
    }

    #[test]
    fn inline_generators_replace_the_preset() {
        let cfg = RunConfig::from_toml_str(
            "preset = \"cyclic_parabolic\"\ngenerators = [[0.0, -1.0, 1.0, 0.0], [1.0, 1.0, 0.0, 1.0]]",
        )
        .unwrap();
        let g = cfg.group().unwrap();
        assert_eq!(g.name, "custom");
        assert_eq!(g.generators, GroupPreset::modular().generators);
    }
}
