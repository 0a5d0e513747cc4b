//! Partition of valid segments by slope regime.

use serde::{Deserialize, Serialize};

use super::cluster::cluster_1d;
use crate::extract::DetectionSegment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiKind {
    Zero,
    SmallPos,
    SmallNeg,
    LargePos,
    LargeNeg,
    NearPlusOne,
    NearMinusOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiSet {
    pub kind: PsiKind,
    /// Sub-cluster of a large-slope set, grouped by `l_d |s_d| ≈ λ/v`.
    pub sub: Option<usize>,
    /// Indices into the segment slice.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    pub s_small: f64,
    pub s_large: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            s_small: 0.3,
            s_large: 3.0,
        }
    }
}

pub fn psi_kind(seg: &DetectionSegment, th: &Thresholds) -> PsiKind {
    let s = seg.s_d;
    if seg.flat {
        PsiKind::Zero
    } else if (0.0..=th.s_small).contains(&s) {
        PsiKind::SmallPos
    } else if (-th.s_small..0.0).contains(&s) {
        PsiKind::SmallNeg
    } else if s >= th.s_large {
        PsiKind::LargePos
    } else if s <= -th.s_large {
        PsiKind::LargeNeg
    } else if s > 0.0 {
        PsiKind::NearPlusOne
    } else {
        PsiKind::NearMinusOne
    }
}

/// Split the valid segments into Ψ sets. Empty sets are omitted; sets come
/// out in [`PsiKind`] order, sub-clusters by increasing `l_d |s_d|`.
/// `resolution` is the time resolution used when sub-clustering.
pub fn classify_segments(
    segments: &[DetectionSegment],
    th: &Thresholds,
    resolution: f64,
) -> Vec<PsiSet> {
    let kinds = [
        PsiKind::Zero,
        PsiKind::SmallPos,
        PsiKind::SmallNeg,
        PsiKind::LargePos,
        PsiKind::LargeNeg,
        PsiKind::NearPlusOne,
        PsiKind::NearMinusOne,
    ];
    let mut out = Vec::new();
    for kind in kinds {
        let members: Vec<usize> = (0..segments.len())
            .filter(|&i| segments[i].valid_whole_edge && psi_kind(&segments[i], th) == kind)
            .collect();
        if members.is_empty() {
            continue;
        }
        if matches!(kind, PsiKind::LargePos | PsiKind::LargeNeg) {
            let key: Vec<f64> = members
                .iter()
                .map(|&i| segments[i].l_d * segments[i].s_d.abs())
                .collect();
            let c = cluster_1d(&key, resolution, 6);
            for label in 0..c.k {
                out.push(PsiSet {
                    kind,
                    sub: Some(label),
                    members: c.members(label).into_iter().map(|j| members[j]).collect(),
                });
            }
        } else {
            out.push(PsiSet {
                kind,
                sub: None,
                members,
            });
        }
    }
    out
}
