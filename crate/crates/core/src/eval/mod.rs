//! Detection evaluation: overlaps and average precision.

pub mod ap;
pub mod iou;

use serde_json::{json, Value};

pub use ap::{
    accumulate, assign_difficulty, evaluate_ap, evaluate_ap_frames, match_frame, APResult, Difficulty, EvalConfig,
    RecallGrid, Task,
};
pub use iou::{iou_2d, iou_3d, iou_bev, iou_ltrb};

use crate::error::Result;
use crate::kitti::LabelRecord;
use crate::report::{num, Cell, Precision, Table};

/// AP for every difficulty tier under one task/threshold/grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ApReport {
    pub category: String,
    pub task: Task,
    pub iou_threshold: f64,
    pub recall: RecallGrid,
    pub results: Vec<(Difficulty, APResult)>,
}

pub fn ap_report(
    frames: &[(Vec<LabelRecord>, Vec<LabelRecord>)],
    task: Task,
    recall: RecallGrid,
    iou_threshold: f64,
    category: &str,
) -> Result<ApReport> {
    let results = Difficulty::ALL
        .into_iter()
        .map(|d| {
            let cfg = EvalConfig::new(iou_threshold, recall, d, task, category)?;
            Ok((d, evaluate_ap_frames(frames, &cfg)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ApReport {
        category: category.to_string(),
        task,
        iou_threshold,
        recall,
        results,
    })
}

impl ApReport {
    pub fn to_json(&self, p: Precision) -> Value {
        let per: serde_json::Map<String, Value> = self
            .results
            .iter()
            .map(|(d, r)| {
                let samples: Vec<Value> = r.samples.iter().map(|(rc, pr)| json!([num(*rc, p), num(*pr, p)])).collect();
                (
                    d.name().to_string(),
                    json!({
                        "ap": num(r.ap, p),
                        "num_gt": r.num_gt,
                        "true_positives": r.true_positives,
                        "false_positives": r.false_positives,
                        "false_negatives": r.false_negatives,
                        "ignored_detections": r.ignored_detections,
                        "pr_samples": samples,
                    }),
                )
            })
            .collect();
        json!({
            "category": self.category,
            "task": self.task.name(),
            "iou_threshold": num(self.iou_threshold, p),
            "recall_positions": self.recall.count(),
            "difficulties": per,
        })
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["difficulty", "ap", "num_gt", "tp", "fp", "fn"]);
        for (d, r) in &self.results {
            t.push(vec![
                d.name().into(),
                Cell::Num(r.ap),
                Cell::Int(r.num_gt as i64),
                Cell::Int(r.true_positives as i64),
                Cell::Int(r.false_positives as i64),
                Cell::Int(r.false_negatives as i64),
            ]);
        }
        t
    }
}
