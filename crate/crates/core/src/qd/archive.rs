//! The elite archive: a 3-D grid over behavior space keeping the best grasp
//! per cell. Successes always outrank failures; within a tier quality must
//! strictly improve, so an incumbent survives ties.

use crate::geom::Aabb;
use crate::grasp::{EvalOutcome, GraspGenome, GripperSpec};
use glam::DVec3;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

/// One stored solution: the grasp and the outcome that earned its cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Elite {
    pub genome: GraspGenome,
    pub outcome: EvalOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertResult {
    Inserted,
    Replaced,
    Rejected,
}

#[derive(Debug, Clone)]
pub struct Archive {
    bounds: Aabb,
    bins_per_axis: u32,
    cells: BTreeMap<[u32; 3], Elite>,
    success_count: usize,
}

impl Archive {
    pub fn new(bounds: Aabb, bins_per_axis: u32) -> Archive {
        assert!(bins_per_axis >= 1, "need at least one bin per axis");
        Archive {
            bounds,
            bins_per_axis,
            cells: BTreeMap::new(),
            success_count: 0,
        }
    }

    /// Grid sized for an object: its bounds inflated by the gripper reach
    /// (finger length plus jaw travel), so every reachable TCP position bins
    /// inside the grid.
    pub fn for_object(mesh_aabb: &Aabb, gripper: &GripperSpec, bins_per_axis: u32) -> Archive {
        let margin = gripper.finger_length + gripper.max_opening;
        Archive::new(mesh_aabb.inflated(margin), bins_per_axis)
    }

    pub fn bounds(&self) -> Aabb {
        self.bounds
    }

    pub fn bins_per_axis(&self) -> u32 {
        self.bins_per_axis
    }

    /// Cell coordinates of a behavior descriptor: componentwise floor over
    /// the cell size, clamped to the grid. Descriptors outside the bounds
    /// land in boundary cells.
    pub fn bin_of(&self, descriptor: DVec3) -> [u32; 3] {
        let extent = self.bounds.extents();
        let mut out = [0u32; 3];
        for axis in 0..3 {
            let cell = extent[axis] / self.bins_per_axis as f64;
            let idx = if cell > 0.0 {
                ((descriptor[axis] - self.bounds.min[axis]) / cell).floor() as i64
            } else {
                0
            };
            out[axis] = idx.clamp(0, self.bins_per_axis as i64 - 1) as u32;
        }
        out
    }

    /// Offer a solution to the cell its descriptor falls in.
    pub fn try_insert(
        &mut self,
        descriptor: DVec3,
        genome: GraspGenome,
        outcome: EvalOutcome,
    ) -> InsertResult {
        let bin = self.bin_of(descriptor);
        let candidate_rank = rank(&outcome);
        match self.cells.get_mut(&bin) {
            None => {
                self.success_count += outcome.success as usize;
                self.cells.insert(bin, Elite { genome, outcome });
                InsertResult::Inserted
            }
            Some(incumbent) => {
                if candidate_rank > rank(&incumbent.outcome) {
                    self.success_count += outcome.success as usize;
                    self.success_count -= incumbent.outcome.success as usize;
                    *incumbent = Elite { genome, outcome };
                    InsertResult::Replaced
                } else {
                    InsertResult::Rejected
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn success_count(&self) -> usize {
        self.success_count
    }

    pub fn robust_count(&self) -> usize {
        self.cells.values().filter(|e| e.outcome.robust).count()
    }

    pub fn total_cells(&self) -> u64 {
        (self.bins_per_axis as u64).pow(3)
    }

    /// Filled cells over total cells.
    pub fn coverage(&self) -> f64 {
        self.cells.len() as f64 / self.total_cells() as f64
    }

    /// Cells in deterministic (lexicographic bin) order.
    pub fn cells(&self) -> impl Iterator<Item = (&[u32; 3], &Elite)> {
        self.cells.iter()
    }

    pub fn elites(&self) -> impl Iterator<Item = &Elite> {
        self.cells.values()
    }

    pub fn successful_elites(&self) -> impl Iterator<Item = &Elite> {
        self.cells.values().filter(|e| e.outcome.success)
    }

    pub fn get(&self, bin: [u32; 3]) -> Option<&Elite> {
        self.cells.get(&bin)
    }

    /// Stable digest over the full archive state, for reproducibility checks.
    pub fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        for v in [
            self.bounds.min,
            self.bounds.max,
        ] {
            for c in [v.x, v.y, v.z] {
                h.update(c.to_le_bytes());
            }
        }
        h.update(self.bins_per_axis.to_le_bytes());
        for (bin, elite) in &self.cells {
            for b in bin {
                h.update(b.to_le_bytes());
            }
            let p = elite.genome.position();
            let q = elite.genome.orientation();
            for c in [p.x, p.y, p.z, q.x, q.y, q.z, q.w] {
                h.update(c.to_le_bytes());
            }
            h.update([elite.outcome.success as u8, elite.outcome.robust as u8]);
            h.update(elite.outcome.quality_or_zero().to_le_bytes());
            h.update(elite.outcome.closing_width.to_le_bytes());
            h.update(elite.outcome.rng_seed.to_le_bytes());
        }
        h.finalize().into()
    }

    pub fn digest_hex(&self) -> String {
        hex::encode(self.digest())
    }
}

/// Insertion rank: success tier first, then quality.
fn rank(outcome: &EvalOutcome) -> (bool, f64) {
    (outcome.success, outcome.quality_or_zero())
}
