use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which vertices carry the payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CarrierMode {
    /// The most salient `saliency_ratio` fraction of vertices.
    #[default]
    Salient,
    /// Every vertex; saliency is not computed. Used for ablation runs.
    AllVertices,
}

impl FromStr for CarrierMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "salient" => Ok(Self::Salient),
            "all" => Ok(Self::AllVertices),
            other => Err(Error::InvalidKey(format!("unknown carrier mode {other:?} (expected salient|all)"))),
        }
    }
}

impl CarrierMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Salient => "salient",
            Self::AllVertices => "all",
        }
    }
}

/// Secret and public parameters shared by embedder and extractor.
#[derive(Debug, Clone, PartialEq)]
pub struct WatermarkKey {
    /// Payload seed.
    pub key1: u64,
    /// Quantization step in normalized units (mean vertex norm 1).
    pub delta: f64,
    /// Payload length in bits.
    pub payload_bits: usize,
    /// Fraction of vertices, by saliency, used as carriers.
    pub saliency_ratio: f64,
    /// Saliency scale as a fraction of the normalized mesh's bounding-box
    /// diagonal (measured in its principal-axis frame).
    pub sigma_fraction: f64,
    pub carriers: CarrierMode,
}

impl Default for WatermarkKey {
    fn default() -> Self {
        Self {
            key1: 2024,
            delta: Self::DEFAULT_DELTA,
            payload_bits: Self::DEFAULT_PAYLOAD_BITS,
            saliency_ratio: 0.7,
            sigma_fraction: Self::DEFAULT_SIGMA_FRACTION,
            carriers: CarrierMode::Salient,
        }
    }
}

impl WatermarkKey {
    pub const DEFAULT_DELTA: f64 = 0.064;
    pub const DEFAULT_PAYLOAD_BITS: usize = 6;
    pub const DEFAULT_SIGMA_FRACTION: f64 = 0.01;

    pub fn with_key1(key1: u64) -> Self {
        Self { key1, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::InvalidKey(format!("delta must be positive, got {}", self.delta)));
        }
        if self.payload_bits == 0 {
            return Err(Error::InvalidKey("payload_bits must be at least 1".into()));
        }
        if !(self.saliency_ratio > 0.0 && self.saliency_ratio <= 1.0) {
            return Err(Error::InvalidKey(format!("saliency_ratio must lie in (0, 1], got {}", self.saliency_ratio)));
        }
        if !(self.sigma_fraction > 0.0) || !self.sigma_fraction.is_finite() {
            return Err(Error::InvalidKey(format!("sigma_fraction must be positive, got {}", self.sigma_fraction)));
        }
        Ok(())
    }

    /// Serializes to the plain-text key file format:
    ///
    /// ```text
    /// key1 = 2024
    /// delta = 0.064
    /// payload_bits = 6
    /// saliency_ratio = 0.7
    /// sigma_fraction = 0.01
    /// carriers = salient
    /// ```
    pub fn to_key_file(&self) -> String {
        let mut s = String::new();
        writeln!(s, "key1 = {}", self.key1).unwrap();
        writeln!(s, "delta = {}", self.delta).unwrap();
        writeln!(s, "payload_bits = {}", self.payload_bits).unwrap();
        writeln!(s, "saliency_ratio = {}", self.saliency_ratio).unwrap();
        writeln!(s, "sigma_fraction = {}", self.sigma_fraction).unwrap();
        writeln!(s, "carriers = {}", self.carriers.as_str()).unwrap();
        s
    }

    /// Parses a key file. Missing fields keep their defaults; `#` starts a
    /// comment; unknown fields are rejected.
    pub fn from_key_file(text: &str) -> Result<Self> {
        let mut key = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (name, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidKey(format!("line {}: expected `name = value`", i + 1)))?;
            key.set(name.trim(), value.trim())
                .map_err(|e| Error::InvalidKey(format!("line {}: {e}", i + 1)))?;
        }
        key.validate()?;
        Ok(key)
    }

    /// Sets one field by its key-file name.
    pub fn set(&mut self, name: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(name: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::InvalidKey(format!("bad value {v:?} for {name}")))
        }
        match name {
            "key1" => self.key1 = num(name, value)?,
            "delta" => self.delta = num(name, value)?,
            "payload_bits" => self.payload_bits = num(name, value)?,
            "saliency_ratio" => self.saliency_ratio = num(name, value)?,
            "sigma_fraction" => self.sigma_fraction = num(name, value)?,
            "carriers" => self.carriers = value.parse()?,
            other => return Err(Error::InvalidKey(format!("unknown field {other:?}"))),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_file_round_trip() {
        let k = WatermarkKey {
            key1: u64::MAX,
            delta: 0.0123,
            payload_bits: 17,
            saliency_ratio: 0.55,
            sigma_fraction: 0.01,
            carriers: CarrierMode::AllVertices,
        };
        assert_eq!(WatermarkKey::from_key_file(&k.to_key_file()).unwrap(), k);
    }

    #[test]
    fn partial_and_invalid_files() {
        let k = WatermarkKey::from_key_file("# comment\nkey1 = 99\n").unwrap();
        assert_eq!(k, WatermarkKey::with_key1(99));
        assert!(WatermarkKey::from_key_file("delta = -1").is_err());
        assert!(WatermarkKey::from_key_file("payload_bits = 0").is_err());
        assert!(WatermarkKey::from_key_file("saliency_ratio = 1.5").is_err());
        assert!(WatermarkKey::from_key_file("colour = red").is_err());
        assert!(WatermarkKey::from_key_file("key1 99").is_err());
        assert!(WatermarkKey::from_key_file("key1 = -3").is_err());
    }
}
