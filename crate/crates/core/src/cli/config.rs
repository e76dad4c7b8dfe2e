//! `key = value` configuration files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{GroupError, Result};
use crate::tower::TowerSpec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub spec: TowerSpec,
    pub cache: Option<PathBuf>,
    /// Ball radius for property suites and ladder samples.
    pub radius: usize,
    /// Exponent radius for malnormality and torsion checks.
    pub exp_radius: u64,
    pub seed: u64,
    /// Sample budget; larger balls are subsampled.
    pub sample_size: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            spec: TowerSpec::default(),
            cache: None,
            radius: 2,
            exp_radius: 4,
            seed: 0,
            sample_size: 4096,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| GroupError::InvalidSpec(format!("bad value `{}` for `{}`", value, key)))
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut c = Config::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| GroupError::InvalidSpec(format!("line {}: expected `key = value`", n + 1)))?;
            c.set(key.trim(), value.trim())?;
        }
        c.spec.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GroupError::Usage(format!("cannot read config {}: {}", path.display(), e)))?;
        Config::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let b = &mut self.spec.bounds;
        match key {
            "variant" => self.spec.variant = value.parse()?,
            "base_rank" => self.spec.base_rank = parse_num(key, value)?,
            "k_schedule" => self.spec.k_schedule = value.parse()?,
            "a0_index" => self.spec.a0_index = parse_num(key, value)?,
            "max_exponent" => b.max_exponent = parse_num(key, value)?,
            "max_component" => b.max_component = parse_num(key, value)?,
            "max_reps" => b.max_reps = parse_num(key, value)?,
            "max_grade" => b.max_grade = parse_num(key, value)?,
            "cache" => self.cache = (!value.is_empty()).then(|| PathBuf::from(value)),
            "radius" => self.radius = parse_num(key, value)?,
            "exp_radius" => self.exp_radius = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "sample_size" => self.sample_size = parse_num(key, value)?,
            _ => return Err(GroupError::InvalidSpec(format!("unknown config key `{}`", key))),
        }
        Ok(())
    }

    /// The keys that determine the tower, in canonical order.
    pub fn spec_text(&self) -> String {
        let s = &self.spec;
        let b = &s.bounds;
        let mut out = String::new();
        for (k, v) in [
            ("variant", s.variant.to_string()),
            ("base_rank", s.base_rank.to_string()),
            ("k_schedule", s.k_schedule.to_string()),
            ("a0_index", s.a0_index.to_string()),
            ("max_exponent", b.max_exponent.to_string()),
            ("max_component", b.max_component.to_string()),
            ("max_reps", b.max_reps.to_string()),
            ("max_grade", b.max_grade.to_string()),
        ] {
            let _ = writeln!(out, "{} = {}", k, v);
        }
        out
    }

    /// Full canonical serialization; `parse` inverts it.
    pub fn to_text(&self) -> String {
        let mut out = self.spec_text();
        let cache = self.cache.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        for (k, v) in [
            ("cache", cache),
            ("radius", self.radius.to_string()),
            ("exp_radius", self.exp_radius.to_string()),
            ("seed", self.seed.to_string()),
            ("sample_size", self.sample_size.to_string()),
        ] {
            let _ = writeln!(out, "{} = {}", k, v);
        }
        out
    }

    /// sha256 of the spec keys. Cache path and radii do not change the reps.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.spec_text().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{KSchedule, Variant};

    #[test]
    fn round_trip() {
        let mut c = Config::default();
        c.spec.variant = Variant::RationalRoot;
        c.spec.k_schedule = KSchedule::List(vec![2, 3]);
        c.cache = Some("/tmp/x.cache".into());
        c.radius = 3;
        assert_eq!(Config::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Config::parse("base_rank = 1").is_err());
        assert!(Config::parse("k_schedule = 1").is_err());
        assert!(Config::parse("colour = red").is_err());
        assert!(Config::parse("radius").is_err());
        assert!(Config::parse("# comment only\n\nradius = 3 # trailing\n").is_ok());
    }

    #[test]
    fn fingerprint_ignores_radii() {
        let a = Config::default();
        let mut b = a.clone();
        b.radius = 5;
        assert_eq!(a.fingerprint(), b.fingerprint());
        b.spec.base_rank = 3;
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint().len(), 64);
    }
}
