//! Run outputs: diagnostics CSV, manifest, and binary checkpoints.
//!
//! Outputs are deterministic for a fixed config and seed: floats are
//! written with Rust's shortest round-trip formatting and no timestamps
//! are embedded.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::galerkin::{Problem, Run};
use crate::scenarios::RunConfig;
use crate::spectral::write_field;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialize: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Galerkin(#[from] crate::galerkin::GalerkinError),
    #[error(transparent)]
    Spectral(#[from] crate::spectral::SpectralError),
}

/// SHA-256 of the canonical (serialized) configuration.
pub fn config_hash(config: &RunConfig) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config_hash: String,
    config: &'a RunConfig,
    basis_size: usize,
    lattice_modes: usize,
    certificate: &'a crate::viscosity::EllipticityCertificate,
    b1: f64,
    b2: f64,
    stability_dt_bound: f64,
    forcing_h_neg1_sq: f64,
    samples: Vec<ManifestSample>,
    diagnostics: String,
}

#[derive(Debug, Serialize)]
struct ManifestSample {
    index: usize,
    t: f64,
    checkpoint: Option<String>,
}

/// Write `diagnostics.csv`, `manifest.json` and `checkpoints/*.bin`.
pub fn write_run(
    out_dir: &Path,
    config: &RunConfig,
    problem: &Problem,
    run: &Run,
    checkpoint_every: usize,
) -> Result<PathBuf, IoError> {
    fs::create_dir_all(out_dir)?;
    let ledger = &run.ledger;

    // Diagnostics CSV.
    let csv_path = out_dir.join("diagnostics.csv");
    {
        let mut csv = fs::File::create(&csv_path)?;
        writeln!(
            csv,
            "t,l2_sq,h1_sq,a_t,forcing_power,nonlinear_residual,energy_identity_residual,b1_margin,b2_margin"
        )?;
        for i in 0..ledger.len() {
            writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{}",
                ledger.times[i],
                ledger.l2_sq[i],
                ledger.h1_sq[i],
                ledger.a_t[i],
                ledger.forcing_power[i],
                ledger.nonlinear_residual[i],
                ledger.energy_identity_residual(i),
                ledger.b1 - ledger.l2_sq[i],
                ledger.b2 - ledger.int_h1_sq[i],
            )?;
        }
    }

    // Checkpoints.
    let ck_dir = out_dir.join("checkpoints");
    fs::create_dir_all(&ck_dir)?;
    let last = run.samples.len() - 1;
    let mut manifest_samples = Vec::with_capacity(run.samples.len());
    for (i, sample) in run.samples.iter().enumerate() {
        let write_it = i == 0 || i == last || (checkpoint_every > 0 && i % checkpoint_every == 0);
        let name = if write_it {
            let name = format!("sample_{i:06}.bin");
            let field = run.field(problem, i)?;
            let mut file = fs::File::create(ck_dir.join(&name))?;
            write_field(&mut file, &field)?;
            Some(name)
        } else {
            None
        };
        manifest_samples.push(ManifestSample {
            index: i,
            t: sample.t,
            checkpoint: name,
        });
    }

    // Manifest.
    let manifest = Manifest {
        tool: "torus-ns",
        version: env!("CARGO_PKG_VERSION"),
        config_hash: config_hash(config),
        config,
        basis_size: problem.basis.len(),
        lattice_modes: problem.lattice.mode_count(),
        certificate: &problem.certificate,
        b1: ledger.b1,
        b2: ledger.b2,
        stability_dt_bound: crate::galerkin::stability_dt_bound(
            &problem.certificate,
            problem.lattice.cutoff(),
        ),
        forcing_h_neg1_sq: run.forcing_norm_sq,
        samples: manifest_samples,
        diagnostics: "diagnostics.csv".into(),
    };
    let manifest_path = out_dir.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest_path)
}
