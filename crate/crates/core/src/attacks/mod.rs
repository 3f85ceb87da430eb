//! Deterministic, seeded mesh attacks.
//!
//! An [`AttackSpec`] has a compact text form used by the command line and
//! benchmark configs:
//!
//! | text               | attack                                             |
//! |--------------------|----------------------------------------------------|
//! | `noise:0.3`        | binary noise, 0.3 % of the mean vertex distance     |
//! | `smooth:0.1,30`    | Laplacian smoothing, λ = 0.1, 30 iterations         |
//! | `quant:9`          | coordinate quantization to 9 bits per axis          |
//! | `sim:7`            | random similarity transform drawn from seed 7       |
//! | `subdiv:loop,1`    | one Loop step (`midpoint`, `loop`, `sqrt3`)         |
//! | `crop:10`          | delete 10 % of the vertices along the main axis     |
//! | `reorder:2`        | permute faces (1 vertices, 2 faces, 3 both)         |
//!
//! Any spec except `sim` takes an optional `@seed` suffix, as in
//! `noise:0.3@17`. Specs without one get a seed from the caller.
//!
//! ```
//! use meshmark::attacks::AttackSpec;
//! let spec: AttackSpec = "smooth:0.1,30".parse().unwrap();
//! assert_eq!(spec.to_string(), "smooth:0.1,30");
//! assert!("smooth:2,30".parse::<AttackSpec>().is_err());
//! ```

mod geometric;
mod subdivision;
mod topology;

use std::fmt;
use std::str::FromStr;

pub use geometric::{
    add_noise, laplacian_smooth, mean_centroid_distance, quantize_coords, similarity_transform, Similarity,
};
pub use subdivision::{subdivide, subdivide_loop, subdivide_midpoint, subdivide_sqrt3, SubdivisionScheme};
pub use topology::{crop, reorder_elements, Permutation, ReorderKind};

use crate::error::{Error, Result};
use crate::mesh::Mesh;

#[derive(Debug, Clone, PartialEq)]
pub enum Attack {
    Noise { amplitude: f64 },
    Smooth { lambda: f64, iterations: usize },
    Quantize { bits: u32 },
    /// Seeded random similarity, or an explicit one (not expressible as text).
    Similarity(Option<Similarity>),
    Subdivide { scheme: SubdivisionScheme, iterations: usize },
    Crop { ratio: f64 },
    Reorder(ReorderKind),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackSpec {
    pub attack: Attack,
    pub seed: Option<u64>,
}

pub const GRAMMAR_HELP: &str = "attack specs: noise:<percent> | smooth:<lambda>,<iterations> | quant:<bits 4..16> | \
sim:<seed> | subdiv:<midpoint|loop|sqrt3>[,<iterations>] | crop:<percent> | reorder:<1|2|3>, \
optionally followed by @<seed>";

impl AttackSpec {
    pub fn new(attack: Attack) -> Self {
        Self { attack, seed: None }
    }

    /// Short attack family name, used as a report column.
    pub fn name(&self) -> &'static str {
        match self.attack {
            Attack::Noise { .. } => "noise",
            Attack::Smooth { .. } => "smooth",
            Attack::Quantize { .. } => "quant",
            Attack::Similarity(_) => "sim",
            Attack::Subdivide { .. } => "subdiv",
            Attack::Crop { .. } => "crop",
            Attack::Reorder(_) => "reorder",
        }
    }

    /// Parameter text as written after the colon.
    pub fn param(&self) -> String {
        match &self.attack {
            Attack::Noise { amplitude } => amplitude.to_string(),
            Attack::Smooth { lambda, iterations } => format!("{lambda},{iterations}"),
            Attack::Quantize { bits } => bits.to_string(),
            Attack::Similarity(None) => self.seed.unwrap_or(0).to_string(),
            Attack::Similarity(Some(_)) => "explicit".into(),
            Attack::Subdivide { scheme, iterations } => format!("{},{iterations}", scheme.name()),
            Attack::Crop { ratio } => ratio.to_string(),
            Attack::Reorder(kind) => (*kind as u8).to_string(),
        }
    }

    /// Fills in `seed` if the spec does not carry its own.
    pub fn with_default_seed(mut self, seed: u64) -> Self {
        self.seed.get_or_insert(seed);
        self
    }

    pub fn apply(&self, mesh: &Mesh) -> Result<Mesh> {
        let seed = self.seed.unwrap_or(0);
        match &self.attack {
            Attack::Noise { amplitude } => add_noise(mesh, *amplitude, seed),
            Attack::Smooth { lambda, iterations } => laplacian_smooth(mesh, *lambda, *iterations),
            Attack::Quantize { bits } => quantize_coords(mesh, *bits),
            Attack::Similarity(explicit) => {
                let t = explicit.unwrap_or_else(|| Similarity::random(mesh, seed));
                similarity_transform(mesh, &t)
            }
            Attack::Subdivide { scheme, iterations } => subdivide(mesh, *scheme, *iterations),
            Attack::Crop { ratio } => crop(mesh, *ratio),
            Attack::Reorder(kind) => Ok(reorder_elements(mesh, *kind, seed)),
        }
    }

    fn validate(&self) -> std::result::Result<(), String> {
        match &self.attack {
            Attack::Noise { amplitude } if !(*amplitude >= 0.0 && amplitude.is_finite()) => {
                Err("noise amplitude must be a non-negative percentage".into())
            }
            Attack::Smooth { lambda, .. } if !(*lambda > 0.0 && *lambda < 1.0) => {
                Err("smoothing lambda must lie in (0, 1)".into())
            }
            Attack::Quantize { bits } if !(4..=16).contains(bits) => Err("quantization bits must lie in 4..=16".into()),
            Attack::Subdivide { iterations: 0, .. } => Err("subdivision needs at least one iteration".into()),
            Attack::Crop { ratio } if !(*ratio > 0.0 && *ratio < 100.0) => {
                Err("crop ratio must lie strictly between 0 and 100".into())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for AttackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name(), self.param())?;
        match (&self.attack, self.seed) {
            (Attack::Similarity(None), _) | (_, None) => Ok(()),
            (_, Some(seed)) => write!(f, "@{seed}"),
        }
    }
}

impl FromStr for AttackSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let fail = |reason: &str| Error::AttackSpec { spec: text.to_string(), reason: reason.to_string() };
        let s = text.trim();
        let (body, seed) = match s.split_once('@') {
            Some((b, sd)) => (b, Some(sd.trim().parse::<u64>().map_err(|_| fail("seed must be an unsigned integer"))?)),
            None => (s, None),
        };
        let (kind, params) = body.split_once(':').ok_or_else(|| fail("expected <kind>:<parameters>"))?;
        let args: Vec<&str> = params.split(',').map(str::trim).collect();
        let real = |i: usize| -> Result<f64> {
            args.get(i).and_then(|a| a.parse::<f64>().ok()).ok_or_else(|| fail("expected a number"))
        };
        let int = |i: usize| -> Result<u64> {
            args.get(i).and_then(|a| a.parse::<u64>().ok()).ok_or_else(|| fail("expected a non-negative integer"))
        };
        let arity = |n: usize| if args.len() == n { Ok(()) } else { Err(fail(&format!("expected {n} parameter(s)"))) };

        let mut spec = match kind.trim() {
            "noise" => {
                arity(1)?;
                AttackSpec::new(Attack::Noise { amplitude: real(0)? })
            }
            "smooth" => {
                arity(2)?;
                AttackSpec::new(Attack::Smooth { lambda: real(0)?, iterations: int(1)? as usize })
            }
            "quant" => {
                arity(1)?;
                let bits = u32::try_from(int(0)?).map_err(|_| fail("bits out of range"))?;
                AttackSpec::new(Attack::Quantize { bits })
            }
            "sim" => {
                arity(1)?;
                if seed.is_some() {
                    return Err(fail("sim takes its seed as the parameter"));
                }
                AttackSpec { attack: Attack::Similarity(None), seed: Some(int(0)?) }
            }
            "subdiv" => {
                if args.is_empty() || args.len() > 2 {
                    return Err(fail("expected <scheme>[,<iterations>]"));
                }
                let scheme = match args[0] {
                    "midpoint" => SubdivisionScheme::Midpoint,
                    "loop" => SubdivisionScheme::Loop,
                    "sqrt3" => SubdivisionScheme::Sqrt3,
                    _ => return Err(fail("scheme must be midpoint, loop or sqrt3")),
                };
                let iterations = if args.len() == 2 { int(1)? as usize } else { 1 };
                AttackSpec::new(Attack::Subdivide { scheme, iterations })
            }
            "crop" => {
                arity(1)?;
                AttackSpec::new(Attack::Crop { ratio: real(0)? })
            }
            "reorder" => {
                arity(1)?;
                let t = u8::try_from(int(0)?).map_err(|_| fail("reorder type must be 1, 2 or 3"))?;
                AttackSpec::new(Attack::Reorder(ReorderKind::try_from(t).map_err(|_| fail("reorder type must be 1, 2 or 3"))?))
            }
            _ => return Err(fail("unknown attack kind")),
        };
        if seed.is_some() {
            spec.seed = seed;
        }
        spec.validate().map_err(|r| fail(&r))?;
        Ok(spec)
    }
}

/// Splits a comma-separated list of specs. A piece without `:` continues the
/// previous spec, so `noise:0.3,smooth:0.1,30` yields two specs.
pub fn parse_attack_list(text: &str) -> Result<Vec<AttackSpec>> {
    let mut pieces: Vec<String> = Vec::new();
    for piece in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match pieces.last_mut() {
            Some(last) if !piece.contains(':') => {
                last.push(',');
                last.push_str(piece);
            }
            _ => pieces.push(piece.to_string()),
        }
    }
    pieces.iter().map(|p| p.parse()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn grammar_round_trips() {
        for text in [
            "noise:0.3",
            "noise:0.05@17",
            "smooth:0.1,30",
            "quant:9",
            "sim:42",
            "subdiv:loop,1",
            "subdiv:sqrt3,2",
            "crop:10",
            "reorder:2@5",
        ] {
            let spec: AttackSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
        let s: AttackSpec = "subdiv:midpoint".parse().unwrap();
        assert_eq!(s.to_string(), "subdiv:midpoint,1");
    }

    #[test]
    fn grammar_rejects_bad_specs() {
        for text in [
            "", "noise", "noise:-1", "noise:x", "smooth:0.1", "smooth:1.5,3", "quant:3", "quant:17", "sim:1@2",
            "subdiv:butterfly,1", "subdiv:loop,0", "crop:0", "crop:100", "reorder:4", "twist:3", "noise:0.1@x",
        ] {
            let err = text.parse::<AttackSpec>().unwrap_err();
            assert!(matches!(err, Error::AttackSpec { .. }), "{text}");
        }
    }

    #[test]
    fn list_parsing_rejoins_parameters() {
        let specs = parse_attack_list("noise:0.05, smooth:0.1,30,quant:9 ,reorder:1").unwrap();
        let names: Vec<String> = specs.iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["noise:0.05", "smooth:0.1,30", "quant:9", "reorder:1"]);
        assert!(parse_attack_list("0.1,noise:1").is_err());
    }

    #[test]
    fn attacks_are_deterministic_and_keep_counts() {
        let m = shapes::torus(16, 8, 1.0, 0.4);
        for text in ["noise:0.5", "smooth:0.1,5", "quant:8", "sim:3", "reorder:1", "reorder:2", "reorder:3"] {
            let spec: AttackSpec = text.parse::<AttackSpec>().unwrap().with_default_seed(11);
            let a = spec.apply(&m).unwrap();
            assert_eq!(a, spec.apply(&m).unwrap(), "{text}");
            assert_eq!((a.vertex_count(), a.face_count()), (m.vertex_count(), m.face_count()), "{text}");
        }
        let e = m.edges().len();
        let s: AttackSpec = "subdiv:midpoint,1".parse().unwrap();
        let out = s.apply(&m).unwrap();
        assert_eq!((out.vertex_count(), out.face_count()), (m.vertex_count() + e, 4 * m.face_count()));
    }

    #[test]
    fn default_seed_does_not_override() {
        let s: AttackSpec = "noise:0.1@3".parse().unwrap();
        assert_eq!(s.with_default_seed(9).seed, Some(3));
        let s: AttackSpec = "noise:0.1".parse().unwrap();
        assert_eq!(s.with_default_seed(9).seed, Some(9));
    }
}
