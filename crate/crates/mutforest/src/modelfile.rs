//! JSON model files, plot-ready CSV output, and run manifests.
//!
//! A model file lists one litter law per type as explicit atoms, plus
//! optional lifetime rates:
//!
//! ```json
//! {
//!   "d": 2,
//!   "laws": [
//!     { "entries": [ { "k": [0, 0], "p": 0.5 }, { "k": [2, 0], "p": 0.3 },
//!                    { "k": [1, 1], "p": 0.2 } ] },
//!     { "entries": [ { "k": [0, 0], "p": 0.6 }, { "k": [0, 2], "p": 0.3 },
//!                    { "k": [1, 0], "p": 0.1 } ] }
//!   ],
//!   "rates": [1.0, 1.0]
//! }
//! ```
//!
//! A ladder file describes a family of binary fission chains that share
//! their own-split rates while the mutation rates run down a ladder:
//!
//! ```json
//! { "own": [1.0, 1.0], "mutation_ladder": [[1.0, 10.0], [1.0, 100.0]],
//!   "last_rate": 1.0 }
//! ```
//!
//! Results go to CSV in long format, one observation per row, next to a
//! `manifest.json` recording the command, a hash of its configuration, the
//! seed, the package version, wall time, and a digest per output file.
//! Everything except wall time is reproducible byte for byte.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::emergence::ChainModel;
use crate::{Error, Pmf, ProgenyLaw, Result};

/// One pmf atom: a child-count vector and its probability.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomFile {
    pub k: Vec<i32>,
    pub p: f64,
}

/// One litter law as a list of atoms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LawFile {
    pub entries: Vec<AtomFile>,
}

/// On-disk form of a progeny-law model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub d: usize,
    pub laws: Vec<LawFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<f64>>,
}

impl ModelFile {
    pub fn to_law(&self) -> Result<ProgenyLaw> {
        if self.laws.len() != self.d {
            return Err(Error::DimMismatch {
                expected: self.d,
                got: self.laws.len(),
            });
        }
        let laws = self
            .laws
            .iter()
            .map(|l| {
                Pmf::from_entries(self.d, l.entries.iter().map(|a| (a.k.clone(), a.p)))
            })
            .collect::<Result<Vec<_>>>()?;
        ProgenyLaw::new(laws, self.rates.clone())
    }

    pub fn from_law(law: &ProgenyLaw) -> Self {
        let laws = (0..law.d())
            .map(|i| LawFile {
                entries: law
                    .law(i)
                    .iter()
                    .map(|(k, p)| AtomFile { k: k.clone(), p: *p })
                    .collect(),
            })
            .collect();
        Self {
            d: law.d(),
            laws,
            rates: law.rates().map(<[f64]>::to_vec),
        }
    }
}

/// Reads and validates a progeny-law model from a JSON file.
pub fn load_progeny(path: &Path) -> Result<ProgenyLaw> {
    let text = fs::read_to_string(path)?;
    let file: ModelFile = serde_json::from_str(&text)?;
    file.to_law()
}

/// Reads a progeny-law model and wraps it as a mutation chain.
pub fn load_chain(path: &Path) -> Result<ChainModel> {
    ChainModel::new(load_progeny(path)?)
}

/// On-disk form of a family of binary fission chains with shared own-split
/// rates and one mutation-rate vector per rung.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LadderFile {
    /// Own-split rate per non-terminal type, fixed across rungs.
    pub own: Vec<f64>,
    /// One mutation-rate vector per rung, same length as `own`.
    pub mutation_ladder: Vec<Vec<f64>>,
    /// Splitting rate of the last type.
    pub last_rate: f64,
}

impl LadderFile {
    pub fn to_models(&self) -> Result<Vec<ChainModel>> {
        if self.mutation_ladder.is_empty() {
            return Err(Error::BadModel("ladder has no rungs".into()));
        }
        self.mutation_ladder
            .iter()
            .map(|rung| {
                if rung.len() != self.own.len() {
                    return Err(Error::DimMismatch {
                        expected: self.own.len(),
                        got: rung.len(),
                    });
                }
                let pairs: Vec<(f64, f64)> =
                    self.own.iter().copied().zip(rung.iter().copied()).collect();
                ChainModel::binary(&pairs, self.last_rate)
            })
            .collect()
    }
}

/// Reads a ladder of binary fission chains from a JSON file.
pub fn load_ladder(path: &Path) -> Result<Vec<ChainModel>> {
    let text = fs::read_to_string(path)?;
    let file: LadderFile = serde_json::from_str(&text)?;
    file.to_models()
}

/// Writes one long-format CSV file. Every row must match the header width;
/// widths are checked before the file is touched.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    if let Some(row) = rows.iter().find(|r| r.len() != header.len()) {
        return Err(Error::Domain(format!(
            "CSV row width {} does not match header width {}",
            row.len(),
            header.len()
        )));
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

pub fn file_sha256(path: &Path) -> Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
}

/// Run record written next to every set of outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    /// Digest of the canonical configuration text for this run.
    pub config_hash: String,
    pub seed: u64,
    pub package: String,
    pub version: String,
    /// Wall time; the one field that varies between identical runs.
    pub runtime_seconds: f64,
    pub outputs: Vec<OutputRecord>,
    #[serde(skip)]
    started: Option<Instant>,
}

impl Manifest {
    /// Starts a manifest; `config` is the canonical configuration text whose
    /// digest identifies the run.
    pub fn start(command: impl Into<String>, config: &str, seed: u64) -> Self {
        Self {
            command: command.into(),
            config_hash: sha256_hex(config.as_bytes()),
            seed,
            package: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            runtime_seconds: 0.0,
            outputs: Vec::new(),
            started: Some(Instant::now()),
        }
    }

    /// Registers a finished output file by name and digest.
    pub fn record_output(&mut self, path: &Path) -> Result<()> {
        let file = path
            .file_name()
            .ok_or_else(|| Error::Domain(format!("output path {path:?} has no file name")))?
            .to_string_lossy()
            .into_owned();
        self.outputs.push(OutputRecord {
            file,
            sha256: file_sha256(path)?,
        });
        Ok(())
    }

    /// Stamps the wall time and writes `manifest.json` into `dir`.
    pub fn write(&mut self, dir: &Path) -> Result<PathBuf> {
        if let Some(t0) = self.started {
            self.runtime_seconds = t0.elapsed().as_secs_f64();
        }
        let path = dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }
}
