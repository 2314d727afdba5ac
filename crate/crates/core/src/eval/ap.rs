//! Average precision over interpolated precision-recall curves.
//!
//! Matching is greedy in descending score order: each detection claims the
//! unassigned ground truth with the highest overlap at or above the IoU
//! threshold. Because the matching of the top `k` detections never depends on
//! detections below them, one pass yields every point of the PR curve.
//!
//! Ground truths of the evaluated category that fall outside the requested
//! difficulty, and those of the neighboring category (`Van` for `Car`,
//! `Person_sitting` for `Pedestrian`), are ignored: detections matched to them
//! count neither as true nor as false positives. Unmatched detections whose 2D
//! box lies inside a `DontCare` region (covered fraction at or above the
//! threshold) are ignored as well. Detections whose 2D box is shorter than the
//! difficulty's minimum height are dropped before matching.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::iou::{coverage_ltrb, iou_3d, iou_bev, iou_ltrb};
use crate::kitti::{LabelRecord, DONT_CARE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Easy,
    Moderate,
    Hard,
}

impl Difficulty {
    pub const ALL: [Difficulty; 3] = [Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard];

    /// Minimum 2D box height in pixels.
    pub fn min_height(self) -> f64 {
        match self {
            Difficulty::Easy => 40.0,
            Difficulty::Moderate | Difficulty::Hard => 25.0,
        }
    }

    pub fn max_occlusion(self) -> i32 {
        match self {
            Difficulty::Easy => 0,
            Difficulty::Moderate => 1,
            Difficulty::Hard => 2,
        }
    }

    pub fn max_truncation(self) -> f64 {
        match self {
            Difficulty::Easy => 0.15,
            Difficulty::Moderate => 0.30,
            Difficulty::Hard => 0.50,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Moderate => "moderate",
            Difficulty::Hard => "hard",
        }
    }
}

/// The strictest tier whose thresholds the record satisfies; `None` means ignored.
pub fn assign_difficulty(rec: &LabelRecord) -> Option<Difficulty> {
    Difficulty::ALL.into_iter().find(|d| {
        rec.bbox_height() >= d.min_height() && rec.occlusion <= d.max_occlusion() && rec.truncation <= d.max_truncation()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    #[serde(rename = "2d")]
    Detection2d,
    Bev,
    #[serde(rename = "3d")]
    Detection3d,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Detection2d => "2d",
            Task::Bev => "bev",
            Task::Detection3d => "3d",
        }
    }
}

/// Recall positions at which interpolated precision is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecallGrid {
    /// `{0, 0.1, ..., 1.0}`
    R11,
    /// `{1/40, 2/40, ..., 1.0}`
    R40,
}

impl RecallGrid {
    pub fn positions(self) -> Vec<f64> {
        match self {
            RecallGrid::R11 => (0..=10).map(|i| i as f64 / 10.0).collect(),
            RecallGrid::R40 => (1..=40).map(|i| i as f64 / 40.0).collect(),
        }
    }

    pub fn from_count(n: usize) -> Result<Self> {
        match n {
            11 => Ok(RecallGrid::R11),
            40 => Ok(RecallGrid::R40),
            _ => Err(Error::Input(format!("recall positions must be 11 or 40, got {n}"))),
        }
    }

    pub fn count(self) -> usize {
        match self {
            RecallGrid::R11 => 11,
            RecallGrid::R40 => 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub iou_threshold: f64,
    pub recall: RecallGrid,
    pub difficulty: Difficulty,
    pub task: Task,
    pub category: String,
}

impl EvalConfig {
    pub fn new(iou_threshold: f64, recall: RecallGrid, difficulty: Difficulty, task: Task, category: &str) -> Result<Self> {
        if !(iou_threshold > 0.0 && iou_threshold <= 1.0) {
            return Err(Error::Input(format!("IoU threshold must lie in (0, 1], got {iou_threshold}")));
        }
        Ok(Self {
            iou_threshold,
            recall,
            difficulty,
            task,
            category: category.to_string(),
        })
    }

    fn overlap(&self, det: &LabelRecord, gt: &LabelRecord) -> f64 {
        match self.task {
            Task::Detection2d => iou_ltrb(det.bbox, gt.bbox),
            Task::Bev | Task::Detection3d => match (det.box3d(), gt.box3d()) {
                (Ok(d), Ok(g)) if self.task == Task::Bev => iou_bev(&d, &g),
                (Ok(d), Ok(g)) => iou_3d(&d, &g),
                _ => 0.0,
            },
        }
    }
}

fn neighbor_category(category: &str) -> Option<&'static str> {
    match category {
        "Car" => Some("Van"),
        "Pedestrian" => Some("Person_sitting"),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    TruePositive,
    FalsePositive,
    Ignored,
}

/// Matching result of one frame: per-detection outcomes in descending score order.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatch {
    pub outcomes: Vec<(f64, Outcome)>,
    pub num_gt: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum GtRole {
    Valid,
    Ignored,
}

/// Greedy score-descending matching of one frame.
pub fn match_frame(dets: &[LabelRecord], gts: &[LabelRecord], cfg: &EvalConfig) -> Result<FrameMatch> {
    if let Some(i) = dets.iter().position(|d| d.score.is_none()) {
        return Err(Error::Input(format!("detection {i} has no score")));
    }
    let neighbor = neighbor_category(&cfg.category);
    let mut candidates: Vec<(&LabelRecord, GtRole)> = Vec::new();
    let mut dont_care = Vec::new();
    for g in gts {
        if g.category == DONT_CARE {
            dont_care.push(g.bbox);
        } else if g.category == cfg.category {
            let role = match assign_difficulty(g) {
                Some(d) if d <= cfg.difficulty => GtRole::Valid,
                _ => GtRole::Ignored,
            };
            candidates.push((g, role));
        } else if Some(g.category.as_str()) == neighbor {
            candidates.push((g, GtRole::Ignored));
        }
    }
    let num_gt = candidates.iter().filter(|(_, r)| *r == GtRole::Valid).count();

    let mut order: Vec<&LabelRecord> = dets
        .iter()
        .filter(|d| d.category == cfg.category && d.bbox_height() >= cfg.difficulty.min_height())
        .collect();
    // stable: ties keep input order
    order.sort_by(|a, b| b.score.unwrap().total_cmp(&a.score.unwrap()));

    let mut taken = vec![false; candidates.len()];
    let mut outcomes = Vec::with_capacity(order.len());
    for det in order {
        let mut best: Option<(usize, f64)> = None;
        for (j, (g, _)) in candidates.iter().enumerate() {
            if taken[j] {
                continue;
            }
            let o = cfg.overlap(det, g);
            if o >= cfg.iou_threshold && best.is_none_or(|(_, bo)| o > bo) {
                best = Some((j, o));
            }
        }
        let outcome = match best {
            Some((j, _)) => {
                taken[j] = true;
                match candidates[j].1 {
                    GtRole::Valid => Outcome::TruePositive,
                    GtRole::Ignored => Outcome::Ignored,
                }
            }
            None if dont_care.iter().any(|dc| coverage_ltrb(det.bbox, *dc) >= cfg.iou_threshold) => Outcome::Ignored,
            None => Outcome::FalsePositive,
        };
        outcomes.push((det.score.unwrap(), outcome));
    }
    Ok(FrameMatch { outcomes, num_gt })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct APResult {
    /// Percentage in `[0, 100]`.
    pub ap: f64,
    /// `(recall position, interpolated precision)` for every grid point.
    pub samples: Vec<(f64, f64)>,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub ignored_detections: usize,
    pub num_gt: usize,
}

/// Interpolated AP from the raw `(recall, precision)` points of every cutoff.
pub fn interpolated_ap(points: &[(f64, f64)], grid: RecallGrid) -> (f64, Vec<(f64, f64)>) {
    let positions = grid.positions();
    let samples: Vec<(f64, f64)> = positions
        .iter()
        .map(|&r| {
            let p = points
                .iter()
                .filter(|(rec, _)| *rec >= r)
                .map(|(_, p)| *p)
                .fold(0.0, f64::max);
            (r, p)
        })
        .collect();
    let ap = 100.0 * samples.iter().map(|s| s.1).sum::<f64>() / positions.len() as f64;
    (ap, samples)
}

/// Accumulates frame matches into a single PR curve and AP.
pub fn accumulate(matches: &[FrameMatch], grid: RecallGrid) -> APResult {
    let num_gt: usize = matches.iter().map(|m| m.num_gt).sum();
    let mut all: Vec<(f64, Outcome)> = matches.iter().flat_map(|m| m.outcomes.iter().copied()).collect();
    all.sort_by(|a, b| b.0.total_cmp(&a.0));

    let (mut tp, mut fp, mut ignored) = (0usize, 0usize, 0usize);
    let mut points = Vec::with_capacity(all.len());
    for (_, o) in &all {
        match o {
            Outcome::TruePositive => tp += 1,
            Outcome::FalsePositive => fp += 1,
            Outcome::Ignored => {
                ignored += 1;
                continue;
            }
        }
        if num_gt > 0 {
            points.push((tp as f64 / num_gt as f64, tp as f64 / (tp + fp) as f64));
        }
    }
    let (ap, samples) = interpolated_ap(&points, grid);
    APResult {
        ap,
        samples,
        true_positives: tp,
        false_positives: fp,
        false_negatives: num_gt - tp,
        ignored_detections: ignored,
        num_gt,
    }
}

/// AP of a single frame.
pub fn evaluate_ap(dets: &[LabelRecord], gts: &[LabelRecord], cfg: &EvalConfig) -> Result<APResult> {
    Ok(accumulate(&[match_frame(dets, gts, cfg)?], cfg.recall))
}

/// AP over many `(detections, ground truths)` frames. Frames are matched in
/// parallel; accumulation order is fixed by frame order.
pub fn evaluate_ap_frames(frames: &[(Vec<LabelRecord>, Vec<LabelRecord>)], cfg: &EvalConfig) -> Result<APResult> {
    let matches = frames
        .par_iter()
        .map(|(d, g)| match_frame(d, g, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(accumulate(&matches, cfg.recall))
}
