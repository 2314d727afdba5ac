//! The `geodepth` command line.
//!
//! Exit status: 0 on success, 1 for bad input (unreadable files, parse
//! errors, invalid flags), 2 when an internal check fails.

use std::ffi::OsString;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    depth_spread_table, generate_scenes, misalignment_report, misalignment_table, sensitivity_sweep, HeightSource,
    MisalignmentConfig, SpreadConfig, SweepConfig, SyntheticSceneSpec, DEFAULT_DEPTH_BUCKETS,
};
use crate::depth::{compare_formulas, comparison_table, recover_depth, Formula, GeometryObservation, HeightModel};
use crate::depth_metrics::{bucketed_depth_errors, depth_stats_table, DepthSample, DEFAULT_RANGES};
use crate::error::{Error, Result};
use crate::eval::{ap_report, RecallGrid, Task};
use crate::fixtures::verify_fixtures;
use crate::geometry::project_box;
use crate::kitti::{
    list_frame_ids, load_frame_set_with, parse_calib_file_with, parse_label_file, serialize_calib, serialize_label_file, Frame,
    LabelRecord,
};
use crate::report::{json_string, write_atomic, Cell, OutputFormat, Precision, Table};

#[derive(Debug, Parser)]
#[command(name = "geodepth", version, about = "Box geometry, closed-form depth and KITTI-style evaluation")]
pub struct Cli {
    /// Report format; inferred from the --out extension when omitted.
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Print floats at full round-trip precision instead of 6 significant digits.
    #[arg(long, global = true)]
    pub raw: bool,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "GEODEPTH_JOBS")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormulaArg {
    Full,
    V1,
    V2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Paired,
    BottomAnchored,
}

impl From<ModelArg> for HeightModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Paired => HeightModel::Paired,
            ModelArg::BottomAnchored => HeightModel::BottomAnchored,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    #[value(name = "2d")]
    TwoD,
    Bev,
    #[value(name = "3d")]
    ThreeD,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HeightSourceArg {
    Projected,
    Annotated,
}

/// A label file plus its calibration file, or a label directory plus a
/// calibration directory holding files with matching names.
#[derive(Debug, Args)]
pub struct FrameInput {
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub calib: PathBuf,
    /// Calibration key of the camera projection matrix.
    #[arg(long, default_value = "P2")]
    pub reference: String,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Project every labelled 3D box to its 2D box.
    Project {
        #[command(flatten)]
        input: FrameInput,
        #[command(flatten)]
        output: Output,
    },
    /// Recover per-object depth from the projected 2D height.
    RecoverDepth {
        #[command(flatten)]
        input: FrameInput,
        #[arg(long, value_enum, default_value = "full")]
        formula: FormulaArg,
        #[arg(long, value_enum, default_value = "paired")]
        model: ModelArg,
        #[command(flatten)]
        output: Output,
    },
    /// Compare the full, v1 and v2 depth formulas against label depths.
    CompareFormulas {
        /// Labelled frames; when omitted, synthetic frames are generated.
        #[arg(long, requires = "calib")]
        labels: Option<PathBuf>,
        #[arg(long, requires = "labels")]
        calib: Option<PathBuf>,
        #[arg(long, default_value = "P2")]
        reference: String,
        #[arg(long, default_value_t = 100)]
        frames: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "bottom-anchored")]
        model: ModelArg,
        #[command(flatten)]
        output: Output,
    },
    /// Annotated versus projected 2D boxes, per depth bucket.
    MisalignReport {
        #[command(flatten)]
        input: FrameInput,
        #[arg(long, default_value_t = 1242.0)]
        image_width: f64,
        #[arg(long, default_value_t = 375.0)]
        image_height: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Depth spread of objects sharing a 2D height and a 3D height.
    DepthStats {
        #[command(flatten)]
        input: FrameInput,
        #[arg(long, value_delimiter = ',', default_value = "30,35")]
        h_centers: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1.49,1.50,1.51,1.52")]
        height_centers: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        h_tolerance: f64,
        #[arg(long, default_value_t = 0.005)]
        height_tolerance: f64,
        #[arg(long, value_enum, default_value = "projected")]
        height_source: HeightSourceArg,
        #[arg(long, default_value = "Car")]
        category: String,
        #[command(flatten)]
        output: Output,
    },
    /// Closed-form depth over a grid of vertical angles, yaws and footprints.
    Sweep {
        #[arg(long, default_value_t = 1.51)]
        height: f64,
        #[arg(long, default_value_t = 30.0)]
        h: f64,
        #[arg(long, default_value_t = 721.5377)]
        f_v: f64,
        #[arg(long, value_enum, default_value = "paired")]
        model: ModelArg,
        /// Emit every grid cell instead of the summary.
        #[arg(long)]
        cells: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Average precision per difficulty.
    EvalAp {
        /// Detection label file or directory.
        #[arg(long)]
        dets: PathBuf,
        /// Ground-truth label file or directory.
        #[arg(long)]
        gts: PathBuf,
        /// Number of recall positions: 11 or 40.
        #[arg(long, default_value_t = 40, value_parser = parse_recall)]
        recall: usize,
        #[arg(long, default_value_t = 0.7)]
        iou: f64,
        #[arg(long, value_enum, default_value = "3d")]
        task: TaskArg,
        #[arg(long, default_value = "Car")]
        category: String,
        #[command(flatten)]
        output: Output,
    },
    /// SILog, absRel, sqRel and iRMSE per depth range from a `pred,gt[,gt_depth]` CSV.
    DepthMetrics {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Write synthetic labelled frames to `<out-dir>/label_2` and `<out-dir>/calib`.
    GenScenes {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 10)]
        frames: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        boxes_per_frame: usize,
    },
    /// Re-evaluate every golden fixture against the live implementation.
    VerifyFixtures {
        #[arg(long, default_value = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures"))]
        dir: PathBuf,
    },
}

fn parse_recall(s: &str) -> std::result::Result<usize, String> {
    match s {
        "11" => Ok(11),
        "40" => Ok(40),
        _ => Err(format!("expected 11 or 40, got `{s}`")),
    }
}

struct Ctx {
    format: Option<OutputFormat>,
    precision: Precision,
}

impl Ctx {
    fn format_for(&self, out: &Output, default: OutputFormat) -> OutputFormat {
        self.format
            .or_else(|| out.out.as_deref().map(OutputFormat::from_path))
            .unwrap_or(default)
    }

    fn emit_table(&self, t: &Table, out: &Output, stdout: &mut dyn Write) -> Result<()> {
        let text = t.render(self.format_for(out, OutputFormat::Csv), self.precision);
        emit(&text, out, stdout)
    }
}

fn emit(text: &str, out: &Output, stdout: &mut dyn Write) -> Result<()> {
    match &out.out {
        Some(p) => write_atomic(p, text),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invariant(_) => 2,
        _ => 1,
    }
}

fn load_frames(input: &FrameInput, stderr: &mut dyn Write) -> Result<Vec<Frame>> {
    if input.labels.is_dir() {
        let ids = list_frame_ids(&input.labels)?;
        if ids.is_empty() {
            return Err(Error::Input(format!("no label files in {}", input.labels.display())));
        }
        let mut frames = Vec::new();
        for (id, f) in load_frame_set_with(&input.labels, &input.calib, &ids, &input.reference)? {
            match f {
                Ok(f) => frames.push(f),
                Err(e) => {
                    let _ = writeln!(stderr, "warning: skipping frame {id}: {e}");
                }
            }
        }
        Ok(frames)
    } else {
        let labels = parse_label_file(&read(&input.labels)?)?;
        let calib = parse_calib_file_with(&read(&input.calib)?, &input.reference)?;
        let id = input.labels.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        Ok(vec![Frame { id, labels, calib }])
    }
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| Error::io(p, e))
}

/// Label files keyed by frame id: one entry for a file, one per `*.txt` for a directory.
fn load_label_sets(path: &Path) -> Result<Vec<(String, Vec<LabelRecord>)>> {
    if path.is_dir() {
        list_frame_ids(path)?
            .into_iter()
            .map(|id| {
                let recs = parse_label_file(&read(&path.join(format!("{id}.txt")))?)?;
                Ok((id, recs))
            })
            .collect()
    } else {
        let id = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        Ok(vec![(id, parse_label_file(&read(path)?)?)])
    }
}

fn object_rows(frames: &[Frame]) -> impl Iterator<Item = (&Frame, usize, &LabelRecord)> {
    frames
        .iter()
        .flat_map(|f| f.labels.iter().enumerate().map(move |(i, r)| (f, i, r)))
        .filter(|(_, _, r)| !r.is_ignorable())
}

fn execute(cmd: &Command, ctx: &Ctx, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Project { input, output } => {
            let frames = load_frames(input, stderr)?;
            let mut t = Table::new(&["frame", "index", "category", "left", "top", "right", "bottom", "status"]);
            for (f, i, r) in object_rows(&frames) {
                let mut row = vec![Cell::Text(f.id.clone()), Cell::Int(i as i64), Cell::Text(r.category.clone())];
                match r.box3d().and_then(|b| project_box(&b, &f.calib.camera)) {
                    Ok(b) => {
                        row.extend(b.ltrb().map(Cell::Num));
                        row.push("ok".into());
                    }
                    Err(e) => {
                        row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
                        row.push(Cell::Text(e.to_string()));
                    }
                }
                t.push(row);
            }
            ctx.emit_table(&t, output, stdout)
        }
        Command::RecoverDepth { input, formula, model, output } => {
            let frames = load_frames(input, stderr)?;
            let formula = match formula {
                FormulaArg::Full => Formula::Full,
                FormulaArg::V1 => Formula::V1,
                FormulaArg::V2 => Formula::V2,
            };
            let mut t = Table::new(&["frame", "index", "category", "h", "beta", "height", "dz", "z_label", "z_geo", "status"]);
            for (f, i, r) in object_rows(&frames) {
                let mut row = vec![Cell::Text(f.id.clone()), Cell::Int(i as i64), Cell::Text(r.category.clone())];
                let obs = r.box3d().and_then(|b| GeometryObservation::of_box(&b, &f.calib.camera));
                match obs {
                    Ok(o) => {
                        row.extend([o.h, o.beta, o.height, o.dz, r.location[2]].map(Cell::Num));
                        match recover_depth(&o, formula, (*model).into()) {
                            Ok(z) => row.extend([Cell::Num(z), "ok".into()]),
                            Err(e) => row.extend([Cell::Empty, Cell::Text(e.to_string())]),
                        }
                    }
                    Err(e) => {
                        row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, Cell::Num(r.location[2]), Cell::Empty]);
                        row.push(Cell::Text(e.to_string()));
                    }
                }
                t.push(row);
            }
            ctx.emit_table(&t, output, stdout)
        }
        Command::CompareFormulas { labels, calib, reference, frames, seed, model, output } => {
            let loaded = match (labels, calib) {
                (Some(l), Some(c)) => load_frames(
                    &FrameInput { labels: l.clone(), calib: c.clone(), reference: reference.clone() },
                    stderr,
                )?,
                _ => generate_scenes(&SyntheticSceneSpec { seed: *seed, ..Default::default() }, *frames)?,
            };
            let mut rows = Vec::new();
            for f in &loaded {
                let boxes: Vec<_> = f.labels.iter().filter(|r| !r.is_ignorable()).filter_map(|r| r.box3d().ok()).collect();
                let mut part = compare_formulas(&boxes, &f.calib.camera, (*model).into());
                for r in &mut part {
                    r.index += rows.len();
                }
                rows.extend(part);
            }
            ctx.emit_table(&comparison_table(&rows), output, stdout)
        }
        Command::MisalignReport { input, image_width, image_height, output } => {
            let frames = load_frames(input, stderr)?;
            let cfg = MisalignmentConfig { image_size: (*image_width, *image_height) };
            let rows = misalignment_report(&frames, &DEFAULT_DEPTH_BUCKETS, &cfg);
            ctx.emit_table(&misalignment_table(&rows), output, stdout)
        }
        Command::DepthStats {
            input,
            h_centers,
            height_centers,
            h_tolerance,
            height_tolerance,
            height_source,
            category,
            output,
        } => {
            let frames = load_frames(input, stderr)?;
            let cfg = SpreadConfig {
                h_centers: h_centers.clone(),
                height_centers: height_centers.clone(),
                h_tolerance: *h_tolerance,
                height_tolerance: *height_tolerance,
                source: match height_source {
                    HeightSourceArg::Projected => HeightSource::Projected,
                    HeightSourceArg::Annotated => HeightSource::Annotated,
                },
                category: category.clone(),
            };
            ctx.emit_table(&depth_spread_table(&frames, &cfg).to_table(), output, stdout)
        }
        Command::Sweep { height, h, f_v, model, cells, output } => {
            let cfg = SweepConfig {
                height: *height,
                h: *h,
                f_v: *f_v,
                model: (*model).into(),
                ..SweepConfig::car()
            };
            let r = sensitivity_sweep(&cfg)?;
            let t = if *cells {
                r.to_table()
            } else {
                let mut t = Table::new(&["cells", "failed", "min", "max", "spread"]);
                let failed = r.cells.iter().filter(|c| c.depth.is_err()).count();
                let opt = |v: Option<f64>| v.map_or(Cell::Empty, Cell::Num);
                t.push(vec![
                    Cell::Int(r.cells.len() as i64),
                    Cell::Int(failed as i64),
                    opt(r.min),
                    opt(r.max),
                    opt(r.spread),
                ]);
                t
            };
            ctx.emit_table(&t, output, stdout)
        }
        Command::EvalAp { dets, gts, recall, iou, task, category, output } => {
            if gts.is_dir() != dets.is_dir() {
                return Err(Error::Input("--dets and --gts must both be files or both be directories".into()));
            }
            let gt_sets = load_label_sets(gts)?;
            let det_sets = load_label_sets(dets)?;
            let frames: Vec<_> = gt_sets
                .into_iter()
                .map(|(id, g)| {
                    let d = if dets.is_dir() {
                        det_sets.iter().find(|(k, _)| *k == id).map(|(_, d)| d.clone()).unwrap_or_default()
                    } else {
                        det_sets[0].1.clone()
                    };
                    (d, g)
                })
                .collect();
            let task = match task {
                TaskArg::TwoD => Task::Detection2d,
                TaskArg::Bev => Task::Bev,
                TaskArg::ThreeD => Task::Detection3d,
            };
            let report = ap_report(&frames, task, RecallGrid::from_count(*recall)?, *iou, category)?;
            let text = match ctx.format_for(output, OutputFormat::Json) {
                OutputFormat::Json => json_string(&report.to_json(ctx.precision)),
                OutputFormat::Csv => report.to_table().to_csv(ctx.precision),
            };
            emit(&text, output, stdout)
        }
        Command::DepthMetrics { input, output } => {
            let samples = parse_depth_csv(&read(input)?)?;
            let stats = bucketed_depth_errors(&samples, &DEFAULT_RANGES)?;
            ctx.emit_table(&depth_stats_table(&stats), output, stdout)
        }
        Command::GenScenes { out_dir, frames, seed, boxes_per_frame } => {
            let spec = SyntheticSceneSpec { seed: *seed, boxes_per_frame: *boxes_per_frame, ..Default::default() };
            let generated = generate_scenes(&spec, *frames)?;
            let (label_dir, calib_dir) = (out_dir.join("label_2"), out_dir.join("calib"));
            for d in [&label_dir, &calib_dir] {
                std::fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
            }
            for f in &generated {
                write_atomic(&label_dir.join(format!("{}.txt", f.id)), &serialize_label_file(&f.labels))?;
                write_atomic(&calib_dir.join(format!("{}.txt", f.id)), &serialize_calib(&f.calib))?;
            }
            writeln!(stderr, "wrote {} frames to {}", generated.len(), out_dir.display()).ok();
            Ok(())
        }
        Command::VerifyFixtures { dir } => {
            let report = verify_fixtures(dir)?;
            let mut t = Table::new(&["name", "operation", "status", "detail"]);
            for o in &report {
                t.push(vec![
                    Cell::Text(o.name.clone()),
                    Cell::Text(o.operation.clone()),
                    Cell::Text(if o.passed { "pass" } else { "FAIL" }.into()),
                    Cell::Text(o.detail.clone()),
                ]);
            }
            ctx.emit_table(&t, &Output { out: None }, stdout)?;
            let failed: Vec<&str> = report.iter().filter(|o| !o.passed).map(|o| o.name.as_str()).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Error::Invariant(format!("{} fixture(s) failed: {}", failed.len(), failed.join(", "))))
            }
        }
    }
}

/// Rows of `pred,gt[,gt_depth]`; a non-numeric first line is taken as a header.
pub fn parse_depth_csv(text: &str) -> Result<Vec<DepthSample>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(v) if v.len() == 2 || v.len() == 3 => out.push(DepthSample { pred: v[0], gt: v[1], gt_depth: *v.get(2).unwrap_or(&v[1]) }),
            Err(_) if i == 0 => continue,
            _ => {
                return Err(Error::Parse {
                    line: i + 1,
                    column: 1,
                    detail: format!("expected `pred,gt[,gt_depth]`, got `{line}`"),
                })
            }
        }
    }
    Ok(out)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let ctx = Ctx {
        format: cli.format.map(|f| match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }),
        precision: if cli.raw { Precision::Raw } else { Precision::Sig6 },
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        if n == 0 {
            let _ = writeln!(stderr, "error: --jobs must be at least 1");
            return 1;
        }
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker pool: {e}");
            return 2;
        }
    };
    let (mut out_buf, mut err_buf) = (Vec::new(), Vec::new());
    let result = catch_unwind(AssertUnwindSafe(|| {
        pool.install(|| execute(&cli.command, &ctx, &mut out_buf, &mut err_buf))
    }));
    let _ = stdout.write_all(&out_buf);
    let _ = stderr.write_all(&err_buf);
    match result {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
        Err(_) => {
            let _ = writeln!(stderr, "error: internal failure");
            2
        }
    }
}

/// Entry point of the `geodepth` binary.
pub fn main() -> i32 {
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    run(std::env::args_os(), &mut out, &mut err)
}
