use std::f64::consts::FRAC_PI_4;
use std::path::Path;

use anyhow::{bail, Context};
use mirror_core::{BoundaryCurve, BoundaryPiece};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const PRESETS: [(&str, &str); 5] = [
    ("example1", include_str!("../presets/example1.json")),
    ("example2", include_str!("../presets/example2.json")),
    ("disk", include_str!("../presets/disk.json")),
    ("rect-1x2", include_str!("../presets/rect-1x2.json")),
    ("square", include_str!("../presets/square.json")),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub pieces: Vec<BoundaryPiece>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_alpha() -> f64 {
    FRAC_PI_4
}

impl DomainSpec {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// A preset name or a path to a domain JSON file.
    pub fn load(arg: &str) -> anyhow::Result<(String, Self)> {
        if let Some((name, text)) = PRESETS.iter().find(|(n, _)| *n == arg) {
            return Ok((name.to_string(), Self::parse(text)?));
        }
        let path = Path::new(arg);
        if !path.exists() {
            let names: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
            bail!("no such domain file or preset: {arg} (presets: {})", names.join(", "));
        }
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        let spec = Self::parse(&text).with_context(|| format!("parsing {arg}"))?;
        Ok((arg.to_string(), spec))
    }

    pub fn curve(&self) -> Result<BoundaryCurve, mirror_core::GeometryError> {
        BoundaryCurve::new(self.pieces.clone())
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("domain serializes");
        hex(&Sha256::digest(bytes))
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
