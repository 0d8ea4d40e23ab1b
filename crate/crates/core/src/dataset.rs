//! The on-disk grasp dataset: UTF-8 JSON Lines (`.qdg.jsonl`), one record per
//! object with a header line carrying the format version and gripper digest.
//! Floats are written as shortest round-trip decimals plus a hex side channel
//! so read(write(x)) reproduces bit patterns exactly.

use crate::grasp::{EvalOutcome, FailureReason, GraspGenome};
use crate::mesh::{AugmentationSpec, TriMesh};
use crate::qd::Archive;
use crate::stats::{linear_edges, Histogram};
use glam::{DQuat, DVec3};
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const DATASET_FORMAT: &str = "qdg.jsonl";
pub const DATASET_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed line: {message}")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: invalid record: {message}")]
    InvalidRecord {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("mesh digest mismatch for {object_id}: dataset has {expected}, mesh is {actual}")]
    DigestMismatch {
        object_id: String,
        expected: String,
        actual: String,
    },
    #[error("size list is empty")]
    EmptySizes,
    #[error("size at index {index} is {value}, expected positive")]
    NonPositiveSize { index: usize, value: f64 },
    #[error("paired rescale needs equal lengths, got {sizes} sizes vs {reference} reference")]
    PairedLengthMismatch { sizes: usize, reference: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceTag {
    Core,
    Augmented,
}

impl std::fmt::Display for SourceTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SourceTag::Core => write!(f, "core"),
            SourceTag::Augmented => write!(f, "augmented"),
        }
    }
}

/// One stored grasp. `float_hex` carries the little-endian bit patterns of
/// position, quaternion, and quality and is authoritative on read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraspEntry {
    pub position: [f64; 3],
    pub quaternion: [f64; 4],
    pub quality: f64,
    pub robust: bool,
    pub failure_reason: FailureReason,
    pub eval_seed: u64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub float_hex: String,
}

impl GraspEntry {
    pub fn new(genome: &GraspGenome, outcome: &EvalOutcome) -> GraspEntry {
        let p = genome.position();
        let q = genome.orientation();
        let mut entry = GraspEntry {
            position: [p.x, p.y, p.z],
            quaternion: [q.x, q.y, q.z, q.w],
            quality: outcome.quality_or_zero(),
            robust: outcome.robust,
            failure_reason: outcome.failure_reason,
            eval_seed: outcome.rng_seed,
            float_hex: String::new(),
        };
        entry.float_hex = entry.encode_hex();
        entry
    }

    pub fn genome(&self) -> GraspGenome {
        GraspGenome::new(
            DVec3::from_array(self.position),
            DQuat::from_xyzw(
                self.quaternion[0],
                self.quaternion[1],
                self.quaternion[2],
                self.quaternion[3],
            ),
        )
        .expect("validated on read")
    }

    pub fn success(&self) -> bool {
        self.failure_reason == FailureReason::None
    }

    fn floats(&self) -> [f64; 8] {
        [
            self.position[0],
            self.position[1],
            self.position[2],
            self.quaternion[0],
            self.quaternion[1],
            self.quaternion[2],
            self.quaternion[3],
            self.quality,
        ]
    }

    fn encode_hex(&self) -> String {
        let mut bytes = Vec::with_capacity(64);
        for f in self.floats() {
            bytes.extend_from_slice(&f.to_le_bytes());
        }
        hex::encode(bytes)
    }

    /// Restore float bit patterns from the hex channel; errors on length or
    /// consistency violations.
    fn apply_hex(&mut self) -> Result<(), String> {
        if self.float_hex.is_empty() {
            return Ok(());
        }
        let bytes = hex::decode(&self.float_hex).map_err(|e| format!("bad float_hex: {e}"))?;
        if bytes.len() != 64 {
            return Err(format!("float_hex holds {} bytes, expected 64", bytes.len()));
        }
        let mut decoded = [0.0f64; 8];
        for (i, chunk) in bytes.chunks_exact(8).enumerate() {
            decoded[i] = f64::from_le_bytes(chunk.try_into().unwrap());
        }
        for (dec, txt) in decoded.iter().zip(self.floats()) {
            let tol = 1e-9 * dec.abs().max(1.0);
            if (dec - txt).abs() > tol {
                return Err(format!(
                    "float_hex value {dec} disagrees with decimal field {txt}"
                ));
            }
        }
        self.position = [decoded[0], decoded[1], decoded[2]];
        self.quaternion = [decoded[3], decoded[4], decoded[5], decoded[6]];
        self.quality = decoded[7];
        Ok(())
    }

    fn validate(&self) -> Result<(), String> {
        let qn = DQuat::from_xyzw(
            self.quaternion[0],
            self.quaternion[1],
            self.quaternion[2],
            self.quaternion[3],
        )
        .length();
        if (qn - 1.0).abs() > 1e-9 {
            return Err(format!("quaternion norm {qn} is not unit"));
        }
        if !(0.0..=1.0).contains(&self.quality) {
            return Err(format!("quality {} outside [0, 1]", self.quality));
        }
        if self.robust && self.quality <= 0.0 {
            return Err("robust grasp with zero quality".into());
        }
        if self.position.iter().any(|c| !c.is_finite()) {
            return Err("non-finite position".into());
        }
        Ok(())
    }
}

/// One object's grasps plus provenance digests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub object_id: String,
    pub mesh_digest: String,
    pub source_tag: SourceTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub augmentation_spec: Option<AugmentationSpec>,
    pub gripper_digest: String,
    pub grasps: Vec<GraspEntry>,
    pub config_digest: String,
}

impl DatasetRecord {
    /// Capture an archive's elites as a dataset record.
    pub fn from_archive(
        archive: &Archive,
        object_id: impl Into<String>,
        mesh: &TriMesh,
        source_tag: SourceTag,
        augmentation_spec: Option<AugmentationSpec>,
        gripper_digest: impl Into<String>,
        config_digest: impl Into<String>,
    ) -> DatasetRecord {
        DatasetRecord {
            object_id: object_id.into(),
            mesh_digest: mesh.digest_hex(),
            source_tag,
            augmentation_spec,
            gripper_digest: gripper_digest.into(),
            grasps: archive
                .elites()
                .map(|e| GraspEntry::new(&e.genome, &e.outcome))
                .collect(),
            config_digest: config_digest.into(),
        }
    }

    pub fn successful_grasps(&self) -> usize {
        self.grasps.iter().filter(|g| g.success()).count()
    }

    pub fn robust_grasps(&self) -> usize {
        self.grasps.iter().filter(|g| g.robust).count()
    }

    fn validate(&self) -> Result<(), String> {
        for (i, g) in self.grasps.iter().enumerate() {
            g.validate().map_err(|e| format!("grasp {i}: {e}"))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DatasetHeader {
    format: String,
    version: u32,
    gripper_digest: String,
}

/// Canonical serialization: header line then one record per line. An empty
/// record list serializes to an empty file.
pub fn dataset_bytes(records: &[DatasetRecord]) -> Vec<u8> {
    if records.is_empty() {
        return Vec::new();
    }
    let header = DatasetHeader {
        format: DATASET_FORMAT.into(),
        version: DATASET_VERSION,
        gripper_digest: records[0].gripper_digest.clone(),
    };
    let mut out = serde_json::to_vec(&header).expect("header serializes");
    out.push(b'\n');
    for r in records {
        out.extend_from_slice(&serde_json::to_vec(r).expect("record serializes"));
        out.push(b'\n');
    }
    out
}

/// Stable 32-byte digest over the canonical serialization.
pub fn dataset_digest(records: &[DatasetRecord]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(dataset_bytes(records));
    h.finalize().into()
}

/// Write atomically: serialize to a temporary sibling and rename into place.
pub fn write_dataset(records: &[DatasetRecord], path: &Path) -> Result<(), DatasetError> {
    crate::util::write_atomic(path, &dataset_bytes(records)).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_dataset(path: &Path) -> Result<Vec<DatasetRecord>, DatasetError> {
    let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut lines = text.lines().enumerate();
    let (_, header_line) = lines.next().expect("non-empty text");
    let header: DatasetHeader =
        serde_json::from_str(header_line).map_err(|e| DatasetError::MalformedLine {
            path: path.to_path_buf(),
            line: 1,
            message: format!("expected dataset header: {e}"),
        })?;
    if header.format != DATASET_FORMAT || header.version != DATASET_VERSION {
        return Err(DatasetError::MalformedLine {
            path: path.to_path_buf(),
            line: 1,
            message: format!(
                "unsupported format {}/{} (expected {DATASET_FORMAT}/{DATASET_VERSION})",
                header.format, header.version
            ),
        });
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut record: DatasetRecord =
            serde_json::from_str(line).map_err(|e| DatasetError::MalformedLine {
                path: path.to_path_buf(),
                line: line_no,
                message: e.to_string(),
            })?;
        for (gi, g) in record.grasps.iter_mut().enumerate() {
            g.apply_hex().map_err(|e| DatasetError::InvalidRecord {
                path: path.to_path_buf(),
                line: line_no,
                message: format!("grasp {gi}: {e}"),
            })?;
        }
        record.validate().map_err(|e| DatasetError::InvalidRecord {
            path: path.to_path_buf(),
            line: line_no,
            message: e,
        })?;
        records.push(record);
    }
    Ok(records)
}

/// Strict-mode check: the record's mesh digest must match the mesh.
pub fn verify_mesh_digest(record: &DatasetRecord, mesh: &TriMesh) -> Result<(), DatasetError> {
    let actual = mesh.digest_hex();
    if record.mesh_digest != actual {
        return Err(DatasetError::DigestMismatch {
            object_id: record.object_id.clone(),
            expected: record.mesh_digest.clone(),
            actual,
        });
    }
    Ok(())
}

/// Per-source-tag slice of the dataset.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SourceBreakdown {
    pub records: usize,
    pub grasps: usize,
    pub successful: usize,
    pub robust: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub records: usize,
    pub total_grasps: usize,
    pub successful_grasps: usize,
    pub robust_grasps: usize,
    pub robust_fraction: f64,
    /// Successful grasps per record.
    pub grasps_per_object: Histogram,
    /// Quality of successful grasps.
    pub quality: Histogram,
    /// Object sizes (AABB diagonal, m), when sizes were supplied.
    pub object_sizes: Option<Histogram>,
    pub per_source: BTreeMap<String, SourceBreakdown>,
}

#[derive(Debug, Clone)]
pub struct StatsOptions {
    pub grasp_count_edges: Vec<f64>,
    pub quality_edges: Vec<f64>,
    pub size_edges: Vec<f64>,
}

impl Default for StatsOptions {
    fn default() -> Self {
        StatsOptions {
            grasp_count_edges: vec![
                0.0, 1.0, 10.0, 100.0, 500.0, 1000.0, 2000.0, 5000.0, 10000.0,
            ],
            quality_edges: linear_edges(0.0, 1.0, 10),
            size_edges: linear_edges(0.0, 1.0, 20),
        }
    }
}

pub fn compute_stats(records: &[DatasetRecord]) -> DatasetStats {
    compute_stats_with(records, None, &StatsOptions::default())
}

/// Histograms and fractions over a record set. `sizes` maps object ids to
/// their AABB diagonal; the size histogram is omitted when absent.
pub fn compute_stats_with(
    records: &[DatasetRecord],
    sizes: Option<&BTreeMap<String, f64>>,
    options: &StatsOptions,
) -> DatasetStats {
    let mut grasps_per_object = Histogram::new(options.grasp_count_edges.clone());
    let mut quality = Histogram::new(options.quality_edges.clone());
    let mut per_source: BTreeMap<String, SourceBreakdown> = BTreeMap::new();
    let mut total_grasps = 0;
    let mut successful_grasps = 0;
    let mut robust_grasps = 0;
    for r in records {
        grasps_per_object.push(r.successful_grasps() as f64);
        let slot = per_source.entry(r.source_tag.to_string()).or_default();
        slot.records += 1;
        for g in &r.grasps {
            total_grasps += 1;
            slot.grasps += 1;
            if g.success() {
                successful_grasps += 1;
                slot.successful += 1;
                quality.push(g.quality);
            }
            if g.robust {
                robust_grasps += 1;
                slot.robust += 1;
            }
        }
    }
    let object_sizes = sizes.map(|m| {
        let mut h = Histogram::new(options.size_edges.clone());
        for r in records {
            if let Some(&s) = m.get(&r.object_id) {
                h.push(s);
            }
        }
        h
    });
    DatasetStats {
        records: records.len(),
        total_grasps,
        successful_grasps,
        robust_grasps,
        robust_fraction: if total_grasps > 0 {
            robust_grasps as f64 / total_grasps as f64
        } else {
            0.0
        },
        grasps_per_object,
        quality,
        object_sizes,
        per_source,
    }
}

/// Scale factors that match a size population to a reference distribution.
/// Unpaired: each object draws a target uniformly from the reference sample
/// (deterministic in the seed). Paired: index-aligned targets.
pub fn rescale_to_reference(
    sizes: &[f64],
    reference_sizes: &[f64],
    rng_seed: u64,
    paired: bool,
) -> Result<Vec<f64>, DatasetError> {
    if sizes.is_empty() || reference_sizes.is_empty() {
        return Err(DatasetError::EmptySizes);
    }
    for (index, &value) in sizes.iter().enumerate() {
        if !value.is_finite() || value <= 0.0 {
            return Err(DatasetError::NonPositiveSize { index, value });
        }
    }
    for (index, &value) in reference_sizes.iter().enumerate() {
        if !value.is_finite() || value <= 0.0 {
            return Err(DatasetError::NonPositiveSize { index, value });
        }
    }
    if paired {
        if sizes.len() != reference_sizes.len() {
            return Err(DatasetError::PairedLengthMismatch {
                sizes: sizes.len(),
                reference: reference_sizes.len(),
            });
        }
        return Ok(sizes
            .iter()
            .zip(reference_sizes)
            .map(|(s, r)| r / s)
            .collect());
    }
    let mut rng = crate::rng::rng_from(rng_seed);
    Ok(sizes
        .iter()
        .map(|s| reference_sizes[rng.random_range(0..reference_sizes.len())] / s)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{ks_p_value, ks_statistic};

    fn sample_record(object_id: &str, source_tag: SourceTag, qualities: &[f64]) -> DatasetRecord {
        let grasps = qualities
            .iter()
            .enumerate()
            .map(|(i, &q)| {
                let genome = GraspGenome::new(
                    DVec3::new(0.01 * i as f64, 0.0, 0.0),
                    DQuat::from_rotation_y(0.1 * i as f64),
                )
                .unwrap();
                let outcome = EvalOutcome {
                    success: q > 0.0,
                    failure_reason: if q > 0.0 {
                        FailureReason::None
                    } else {
                        FailureReason::MissedContact
                    },
                    contacts: None,
                    closing_width: 0.02,
                    quality: Some(q),
                    robust: q >= 0.8,
                    trials_run: 11,
                    rng_seed: i as u64,
                };
                GraspEntry::new(&genome, &outcome)
            })
            .collect();
        DatasetRecord {
            object_id: object_id.into(),
            mesh_digest: "abc".into(),
            source_tag,
            augmentation_spec: None,
            gripper_digest: "g".into(),
            grasps,
            config_digest: "c".into(),
        }
    }

    #[test]
    fn empty_dataset_round_trips_as_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.qdg.jsonl");
        write_dataset(&[], &path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap().len(), 0);
        assert_eq!(read_dataset(&path).unwrap(), Vec::new());
    }

    #[test]
    fn records_round_trip_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.qdg.jsonl");
        let records = vec![
            sample_record("a", SourceTag::Core, &[0.9, 0.3, 0.0]),
            sample_record("b", SourceTag::Augmented, &[1.0]),
        ];
        write_dataset(&records, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3, "header plus one line per record");
        let loaded = read_dataset(&path).unwrap();
        assert_eq!(loaded, records);
        for (a, b) in loaded.iter().zip(&records) {
            for (ga, gb) in a.grasps.iter().zip(&b.grasps) {
                for (x, y) in ga.position.iter().zip(gb.position) {
                    assert_eq!(x.to_bits(), y.to_bits());
                }
                assert_eq!(ga.quality.to_bits(), gb.quality.to_bits());
            }
        }
    }

    #[test]
    fn corrupted_line_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.qdg.jsonl");
        let records = vec![
            sample_record("a", SourceTag::Core, &[0.9]),
            sample_record("b", SourceTag::Core, &[0.5]),
        ];
        write_dataset(&records, &path).unwrap();
        let mut lines: Vec<String> = std::fs::read_to_string(&path)
            .unwrap()
            .lines()
            .map(String::from)
            .collect();
        lines[1] = lines[1].replace("object_id", "object_!d");
        std::fs::write(&path, lines.join("\n")).unwrap();
        let err = read_dataset(&path).unwrap_err();
        match err {
            DatasetError::MalformedLine { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn invalid_quaternion_is_rejected_with_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.qdg.jsonl");
        let mut record = sample_record("a", SourceTag::Core, &[0.9]);
        record.grasps[0].quaternion = [0.0, 0.0, 0.0, 2.0];
        record.grasps[0].float_hex = String::new();
        let bytes = dataset_bytes(&[record]);
        std::fs::write(&path, bytes).unwrap();
        let err = read_dataset(&path).unwrap_err();
        match err {
            DatasetError::InvalidRecord { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("norm"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn stats_count_and_bin_correctly() {
        // Two objects with 1000 and 5000 successful grasps: Fig-5-style bins.
        let a = sample_record("a", SourceTag::Core, &vec![0.6; 1000]);
        let b = sample_record("b", SourceTag::Augmented, &vec![0.9; 5000]);
        let stats = compute_stats(&[a, b]);
        assert_eq!(stats.records, 2);
        assert_eq!(stats.successful_grasps, 6000);
        let h = &stats.grasps_per_object;
        assert_eq!(h.counts[h.bin_of(1000.0)], 1);
        assert_eq!(h.counts[h.bin_of(5000.0)], 1);
        assert_eq!(h.total(), 2);
        assert_eq!(stats.per_source["core"].successful, 1000);
        assert_eq!(stats.per_source["augmented"].robust, 5000);
        // All-failure dataset has zero robust fraction.
        let z = sample_record("z", SourceTag::Core, &[0.0, 0.0]);
        let stats = compute_stats(&[z]);
        assert_eq!(stats.robust_fraction, 0.0);
    }

    #[test]
    fn stats_are_additive_under_concatenation() {
        let a = vec![sample_record("a", SourceTag::Core, &[0.9, 0.0, 0.4])];
        let b = vec![sample_record("b", SourceTag::Augmented, &[0.7])];
        let merged: Vec<DatasetRecord> = a.iter().chain(&b).cloned().collect();
        let sa = compute_stats(&a);
        let sb = compute_stats(&b);
        let sm = compute_stats(&merged);
        assert_eq!(sm.total_grasps, sa.total_grasps + sb.total_grasps);
        assert_eq!(sm.successful_grasps, sa.successful_grasps + sb.successful_grasps);
        for (i, c) in sm.quality.counts.iter().enumerate() {
            assert_eq!(*c, sa.quality.counts[i] + sb.quality.counts[i]);
        }
        // Permutation invariance.
        let reversed: Vec<DatasetRecord> = merged.iter().rev().cloned().collect();
        let sr = compute_stats(&reversed);
        assert_eq!(sm.quality, sr.quality);
        assert_eq!(sm.grasps_per_object, sr.grasps_per_object);
    }

    #[test]
    fn rescale_ratio_and_identity() {
        // mu = target / size.
        let mu = rescale_to_reference(&[0.8], &[0.1], 1, false).unwrap();
        assert!((mu[0] - 0.125).abs() < 1e-12);
        // Identity pairing against itself gives all ones.
        let sizes = vec![0.3, 0.7, 1.2];
        let mu = rescale_to_reference(&sizes, &sizes, 9, true).unwrap();
        assert!(mu.iter().all(|&m| m == 1.0));
        // Errors.
        assert!(matches!(
            rescale_to_reference(&[], &[1.0], 0, false),
            Err(DatasetError::EmptySizes)
        ));
        assert!(matches!(
            rescale_to_reference(&[1.0, -2.0], &[1.0], 0, false),
            Err(DatasetError::NonPositiveSize { index: 1, .. })
        ));
        assert!(matches!(
            rescale_to_reference(&[1.0], &[1.0, 2.0], 0, true),
            Err(DatasetError::PairedLengthMismatch { .. })
        ));
    }

    #[test]
    fn rescale_matches_reference_distribution() {
        let mut rng = crate::rng::rng_from(4);
        let sizes: Vec<f64> = (0..1000).map(|_| rng.random_range(0.6..1.0)).collect();
        let reference: Vec<f64> = (0..500).map(|_| rng.random_range(0.05..0.25)).collect();
        let factors = rescale_to_reference(&sizes, &reference, 11, false).unwrap();
        let rescaled: Vec<f64> = sizes.iter().zip(&factors).map(|(s, m)| s * m).collect();
        assert!(rescaled.iter().all(|&s| s <= 0.25));
        let d = ks_statistic(&rescaled, &reference);
        let p = ks_p_value(d, rescaled.len(), reference.len());
        assert!(p > 0.01, "KS p-value {p} (d = {d})");
        // Determinism.
        let again = rescale_to_reference(&sizes, &reference, 11, false).unwrap();
        assert_eq!(factors, again);
    }

    #[test]
    fn dataset_digest_is_content_stable() {
        let a = vec![sample_record("a", SourceTag::Core, &[0.9])];
        let b = vec![sample_record("a", SourceTag::Core, &[0.9])];
        assert_eq!(dataset_digest(&a), dataset_digest(&b));
        let c = vec![sample_record("a", SourceTag::Core, &[0.8])];
        assert_ne!(dataset_digest(&a), dataset_digest(&c));
    }

    #[test]
    fn mesh_digest_verification() {
        let mesh = crate::mesh::primitives::unit_cube();
        let mut record = sample_record("cube", SourceTag::Core, &[0.9]);
        record.mesh_digest = mesh.digest_hex();
        verify_mesh_digest(&record, &mesh).unwrap();
        record.mesh_digest = "deadbeef".into();
        assert!(matches!(
            verify_mesh_digest(&record, &mesh),
            Err(DatasetError::DigestMismatch { .. })
        ));
    }
}
