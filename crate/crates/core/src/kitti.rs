//! Label and calibration files in the KITTI object devkit layout.
//!
//! Label lines carry 15 whitespace-separated fields plus an optional score:
//!
//! ```text
//! type truncated occluded alpha left top right bottom h w l x y z rotation_y [score]
//! ```
//!
//! Calibration files hold one `Key: v0 v1 ...` entry per line. Projection
//! matrices (`P0`..`P3`) must carry 12 row-major values. See `docs/FORMATS.md`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::camera::{CalibratedCamera, Point3};
use crate::error::{Error, Result};
use crate::geometry::{Box2D, Box3D, BoxKind};

pub const DONT_CARE: &str = "DontCare";

/// One object annotation or detection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub category: String,
    pub truncation: f64,
    pub occlusion: i32,
    pub alpha: f64,
    /// `(left, top, right, bottom)` in pixels.
    pub bbox: [f64; 4],
    /// `(h, w, l)` in meters, file order.
    pub dims: [f64; 3],
    pub location: [f64; 3],
    pub rotation_y: f64,
    pub score: Option<f64>,
}

impl LabelRecord {
    /// `DontCare` regions and records carrying the devkit's negative sentinels.
    pub fn is_ignorable(&self) -> bool {
        self.category == DONT_CARE || self.dims.iter().any(|&d| d <= 0.0)
    }

    pub fn bbox_height(&self) -> f64 {
        self.bbox[3] - self.bbox[1]
    }

    pub fn box2d(&self) -> Box2D {
        let [l, t, r, b] = self.bbox;
        Box2D::from_ltrb(l, t, r, b, BoxKind::Annotated)
    }

    /// The 3D box, reordering file dims `(h, w, l)` into `(W, H, L)`.
    pub fn box3d(&self) -> Result<Box3D> {
        let [h, w, l] = self.dims;
        let [x, y, z] = self.location;
        Box3D::new(w, h, l, Point3::new(x, y, z), self.rotation_y)
    }

    /// Builds a record from a 3D box; `rotation_y` keeps the box yaw.
    pub fn from_box(category: &str, b: &Box3D, bbox: [f64; 4], alpha: f64, score: Option<f64>) -> Self {
        Self {
            category: category.to_string(),
            truncation: 0.0,
            occlusion: 0,
            alpha,
            bbox,
            dims: [b.height, b.width, b.length],
            location: [b.bottom_center.x, b.bottom_center.y, b.bottom_center.z],
            rotation_y: b.yaw,
            score,
        }
    }
}

fn parse_real(tok: &str, line: usize, column: usize, name: &str) -> Result<f64> {
    // only plain decimal notation: digits, sign, a single '.', optional exponent
    let plain = !tok.is_empty() && tok.chars().all(|c| c.is_ascii_digit() || matches!(c, '-' | '+' | '.' | 'e' | 'E'));
    match tok.parse::<f64>() {
        Ok(v) if plain && v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            line,
            column,
            detail: format!("field `{name}`: expected a real number, got `{tok}`"),
        }),
    }
}

const FIELD_NAMES: [&str; 16] = [
    "type", "truncated", "occluded", "alpha", "left", "top", "right", "bottom", "height", "width", "length", "x",
    "y", "z", "rotation_y", "score",
];

/// Parses one label line. `line_no` is only used for error reporting.
pub fn parse_label_line(line: &str, line_no: usize) -> Result<LabelRecord> {
    // (1-based column, token)
    let mut tokens = Vec::with_capacity(16);
    let mut start = None;
    for (i, c) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                tokens.push((line[..s].chars().count() + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if tokens.len() != 15 && tokens.len() != 16 {
        return Err(Error::Parse {
            line: line_no,
            column: tokens.get(15).map_or(line.chars().count() + 1, |t| t.0),
            detail: format!("expected 15 or 16 fields, found {}", tokens.len()),
        });
    }
    let mut reals = [0.0; 16];
    for (k, &(col, tok)) in tokens.iter().enumerate().skip(1) {
        reals[k] = parse_real(tok, line_no, col, FIELD_NAMES[k])?;
    }
    let occ_col = tokens[2].0;
    let occlusion = tokens[2].1.parse::<i32>().map_err(|_| Error::Parse {
        line: line_no,
        column: occ_col,
        detail: format!("field `occluded`: expected an integer, got `{}`", tokens[2].1),
    })?;
    if !(-1..=3).contains(&occlusion) {
        return Err(Error::Parse {
            line: line_no,
            column: occ_col,
            detail: format!("field `occluded`: level {occlusion} outside -1..=3"),
        });
    }
    let bbox = [reals[4], reals[5], reals[6], reals[7]];
    if bbox[2] < bbox[0] || bbox[3] < bbox[1] {
        return Err(Error::Parse {
            line: line_no,
            column: tokens[6].0,
            detail: format!("bbox is inverted: {bbox:?}"),
        });
    }
    Ok(LabelRecord {
        category: tokens[0].1.to_string(),
        truncation: reals[1],
        occlusion,
        alpha: reals[3],
        bbox,
        dims: [reals[8], reals[9], reals[10]],
        location: [reals[11], reals[12], reals[13]],
        rotation_y: reals[14],
        score: (tokens.len() == 16).then_some(reals[15]),
    })
}

/// Parses a whole label file, skipping blank lines.
pub fn parse_label_file(text: &str) -> Result<Vec<LabelRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_label_line(l, i + 1))
        .collect()
}

/// Canonical devkit formatting: reals with two decimals, scores with four.
pub fn serialize_label(rec: &LabelRecord) -> String {
    let mut s = format!("{} {:.2} {} {:.2}", rec.category, rec.truncation, rec.occlusion, rec.alpha);
    for v in rec.bbox.iter().chain(&rec.dims).chain(&rec.location) {
        write!(s, " {v:.2}").unwrap();
    }
    write!(s, " {:.2}", rec.rotation_y).unwrap();
    if let Some(score) = rec.score {
        write!(s, " {score:.4}").unwrap();
    }
    s
}

pub fn serialize_label_file(records: &[LabelRecord]) -> String {
    records.iter().map(|r| serialize_label(r) + "\n").collect()
}

/// All matrices of a calibration file and the camera extracted from the reference one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameCalib {
    /// Every entry in file order, including keys the toolkit does not use.
    pub matrices: Vec<(String, Vec<f64>)>,
    pub reference: String,
    pub camera: CalibratedCamera,
}

impl FrameCalib {
    pub fn get(&self, key: &str) -> Option<&[f64]> {
        self.matrices.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_slice())
    }

    /// Calibration holding only the reference projection matrix of `cam`.
    pub fn from_camera(cam: CalibratedCamera) -> Self {
        Self {
            matrices: vec![(DEFAULT_REFERENCE.to_string(), cam.projection_matrix().to_vec())],
            reference: DEFAULT_REFERENCE.to_string(),
            camera: cam,
        }
    }
}

pub const DEFAULT_REFERENCE: &str = "P2";

fn is_projection_key(key: &str) -> bool {
    key.len() >= 2 && key.starts_with('P') && key[1..].chars().all(|c| c.is_ascii_digit())
}

pub fn parse_calib_file(text: &str) -> Result<FrameCalib> {
    parse_calib_file_with(text, DEFAULT_REFERENCE)
}

pub fn parse_calib_file_with(text: &str, reference: &str) -> Result<FrameCalib> {
    let mut matrices = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(':').ok_or_else(|| Error::Parse {
            line: i + 1,
            column: 1,
            detail: "expected `Key: values`".into(),
        })?;
        let key = key.trim().to_string();
        let values = rest
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Calib {
                        key: key.clone(),
                        detail: format!("line {}: `{t}` is not a real number", i + 1),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        if is_projection_key(&key) && values.len() != 12 {
            return Err(Error::Calib {
                key,
                detail: format!("expected 12 reals, found {}", values.len()),
            });
        }
        matrices.push((key, values));
    }
    let m = matrices
        .iter()
        .find(|(k, _)| k == reference)
        .map(|(_, v)| v.clone())
        .ok_or_else(|| Error::Calib {
            key: reference.to_string(),
            detail: "reference projection matrix missing".into(),
        })?;
    if m.len() != 12 {
        return Err(Error::Calib {
            key: reference.to_string(),
            detail: format!("expected 12 reals, found {}", m.len()),
        });
    }
    let arr: [f64; 12] = m.try_into().expect("length checked");
    let camera = CalibratedCamera::from_projection(&arr).map_err(|e| Error::Calib {
        key: reference.to_string(),
        detail: e.to_string(),
    })?;
    Ok(FrameCalib {
        matrices,
        reference: reference.to_string(),
        camera,
    })
}

/// `%.12e`-style formatting as written by the devkit tools.
fn format_devkit_real(v: f64) -> String {
    let s = format!("{v:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", exp.abs())
}

pub fn serialize_calib(calib: &FrameCalib) -> String {
    let mut out = String::new();
    for (k, vals) in &calib.matrices {
        out.push_str(k);
        out.push(':');
        for v in vals {
            out.push(' ');
            out.push_str(&format_devkit_real(*v));
        }
        out.push('\n');
    }
    out
}

/// Labels and calibration of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub id: String,
    pub labels: Vec<LabelRecord>,
    pub calib: FrameCalib,
}

/// Stems of all `*.txt` files in `dir`, ascending.
pub fn list_frame_ids(dir: &Path) -> Result<Vec<String>> {
    let mut ids = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) == Some("txt") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                ids.push(stem.to_string());
            }
        }
    }
    ids.sort();
    Ok(ids)
}

fn read(path: PathBuf) -> Result<String> {
    std::fs::read_to_string(&path).map_err(|e| Error::io(path, e))
}

/// Loads `<label_dir>/<id>.txt` and `<calib_dir>/<id>.txt` for every id,
/// in ascending id order. Per-frame failures are returned in place; the call
/// only fails outright when a directory is unreadable or every frame failed.
pub fn load_frame_set(label_dir: &Path, calib_dir: &Path, ids: &[String]) -> Result<Vec<(String, Result<Frame>)>> {
    load_frame_set_with(label_dir, calib_dir, ids, DEFAULT_REFERENCE)
}

/// [`load_frame_set`] reading the camera from the `reference` projection key.
pub fn load_frame_set_with(
    label_dir: &Path,
    calib_dir: &Path,
    ids: &[String],
    reference: &str,
) -> Result<Vec<(String, Result<Frame>)>> {
    for dir in [label_dir, calib_dir] {
        std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut ids = ids.to_vec();
    ids.sort();
    ids.dedup();
    let out: Vec<_> = ids
        .into_iter()
        .map(|id| {
            let frame = (|| {
                let labels = parse_label_file(&read(label_dir.join(format!("{id}.txt")))?)?;
                let calib = parse_calib_file_with(&read(calib_dir.join(format!("{id}.txt")))?, reference)?;
                Ok(Frame {
                    id: id.clone(),
                    labels,
                    calib,
                })
            })();
            (id, frame)
        })
        .collect();
    if !out.is_empty() && out.iter().all(|(_, f)| f.is_err()) {
        return Err(Error::Input(format!(
            "none of the {} requested frames could be loaded from {} / {}",
            out.len(),
            label_dir.display(),
            calib_dir.display()
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAR: &str = "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59";
    const DONT: &str = "DontCare -1 -1 -10 500 160 520 170 -1 -1 -1 -1000 -1000 -1000 -10";
    const P2: &str = "P2: 7.215377000000e+02 0.000000000000e+00 6.095593000000e+02 4.485728000000e+01 0.000000000000e+00 7.215377000000e+02 1.728540000000e+02 2.163791000000e-01 0.000000000000e+00 0.000000000000e+00 1.000000000000e+00 2.745884000000e-03";

    #[test]
    fn car_line_binds_positionally() {
        let r = parse_label_line(CAR, 1).unwrap();
        assert_eq!(r.category, "Car");
        assert_eq!(r.truncation, 0.0);
        assert_eq!(r.occlusion, 0);
        assert_eq!(r.alpha, -1.58);
        assert_eq!(r.bbox, [587.01, 173.33, 614.12, 200.12]);
        assert_eq!(r.dims, [1.65, 1.67, 3.64]);
        assert_eq!(r.location, [-0.65, 1.71, 46.70]);
        assert_eq!(r.rotation_y, -1.59);
        assert_eq!(r.score, None);
        assert!(!r.is_ignorable());
        let b = r.box3d().unwrap();
        assert_eq!((b.width, b.height, b.length), (1.67, 1.65, 3.64));
        assert_eq!(serialize_label(&r), CAR);
    }

    #[test]
    fn dont_care_is_ignorable() {
        let r = parse_label_line(DONT, 1).unwrap();
        assert!(r.is_ignorable());
        assert_eq!(r.occlusion, -1);
        assert_eq!(parse_label_line(&serialize_label(&r), 1).unwrap(), r);
    }

    #[test]
    fn score_is_optional() {
        let r = parse_label_line(&format!("{CAR} 0.87"), 1).unwrap();
        assert_eq!(r.score, Some(0.87));
        assert_eq!(parse_label_line(&serialize_label(&r), 1).unwrap(), r);
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_label_line("Car 0 0 1", 7) {
            Err(Error::Parse { line: 7, detail, .. }) => assert!(detail.contains("15 or 16")),
            other => panic!("{other:?}"),
        }
        let bad = CAR.replace("46.70", "46,70");
        match parse_label_line(&bad, 3) {
            Err(Error::Parse { line: 3, column, .. }) => assert_eq!(column, CAR.find("46.70").unwrap() + 1),
            other => panic!("{other:?}"),
        }
        let occ = CAR.replacen(" 0 -1.58", " 4 -1.58", 1);
        assert!(matches!(parse_label_line(&occ, 1), Err(Error::Parse { column: 10, .. })));
        assert!(parse_label_line(&CAR.replace("46.70", "inf"), 1).is_err());
        assert!(parse_label_line(&CAR.replace("587.01", "700.00"), 1).is_err());
    }

    #[test]
    fn calib_extraction() {
        let text = format!("P0: {}\n{P2}\nR0_rect: 1 0 0 0 1 0 0 0 1\nExtra: 5\n", ["0"; 12].join(" "));
        let c = parse_calib_file(&text).unwrap();
        assert_eq!(c.camera.f_u, 721.5377);
        assert_eq!(c.camera.f_v, 721.5377);
        assert_eq!(c.camera.c_u, 609.5593);
        assert_eq!(c.camera.c_v, 172.854);
        assert_eq!(c.camera.t_proj, [44.85728, 0.2163791, 0.002745884]);
        assert_eq!(c.get("Extra"), Some(&[5.0][..]));
        assert_eq!(c.matrices.len(), 4);
        let again = parse_calib_file(&serialize_calib(&c)).unwrap();
        assert_eq!(again, c);
        assert!(serialize_calib(&c).contains(P2));
    }

    #[test]
    fn calib_identity_like() {
        let c = parse_calib_file("P2: 1 0 0 0 0 1 0 0 0 0 1 0\n").unwrap();
        assert_eq!(c.camera, CalibratedCamera::new(1.0, 1.0, 0.0, 0.0).unwrap());
    }

    #[test]
    fn calib_errors_name_the_key() {
        match parse_calib_file("P0: 1 2 3\n") {
            Err(Error::Calib { key, .. }) => assert_eq!(key, "P0"),
            other => panic!("{other:?}"),
        }
        match parse_calib_file("P0: 1 0 0 0 0 1 0 0 0 0 1 0\n") {
            Err(Error::Calib { key, .. }) => assert_eq!(key, "P2"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn frame_set_loading() {
        let dir = tempfile::tempdir().unwrap();
        let (ld, cd) = (dir.path().join("label_2"), dir.path().join("calib"));
        std::fs::create_dir_all(&ld).unwrap();
        std::fs::create_dir_all(&cd).unwrap();
        assert!(load_frame_set(&ld, &cd, &[]).unwrap().is_empty());

        std::fs::write(ld.join("000001.txt"), format!("{CAR}\n{DONT}\n")).unwrap();
        std::fs::write(cd.join("000001.txt"), format!("{P2}\n")).unwrap();
        std::fs::write(ld.join("000000.txt"), format!("{CAR}\n")).unwrap();
        let ids = list_frame_ids(&ld).unwrap();
        assert_eq!(ids, vec!["000000", "000001"]);
        let frames = load_frame_set(&ld, &cd, &ids).unwrap();
        assert_eq!(frames.len(), 2);
        assert!(frames[0].1.is_err(), "label without calib");
        let f = frames[1].1.as_ref().unwrap();
        assert_eq!(f.labels.len(), 2);

        assert!(load_frame_set(&ld, &cd, &["000000".into()]).is_err());
        assert!(matches!(
            load_frame_set(&dir.path().join("nope"), &cd, &[]),
            Err(Error::Io { .. })
        ));
    }
}
