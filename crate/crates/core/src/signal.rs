//! Wrench-trial data model: six-axis force/torque recordings with known
//! phase boundaries, plus CSV ingestion and per-phase slicing.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The six wrench axes measured at the wrist: three forces, three torques.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisId {
    Fx,
    Fy,
    Fz,
    Mx,
    My,
    Mz,
}

impl AxisId {
    pub const COUNT: usize = 6;
    pub const ALL: [AxisId; 6] = [
        AxisId::Fx,
        AxisId::Fy,
        AxisId::Fz,
        AxisId::Mx,
        AxisId::My,
        AxisId::Mz,
    ];

    pub fn index(self) -> usize {
        match self {
            AxisId::Fx => 0,
            AxisId::Fy => 1,
            AxisId::Fz => 2,
            AxisId::Mx => 3,
            AxisId::My => 4,
            AxisId::Mz => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AxisId::Fx => "fx",
            AxisId::Fy => "fy",
            AxisId::Fz => "fz",
            AxisId::Mx => "mx",
            AxisId::My => "my",
            AxisId::Mz => "mz",
        }
    }

    pub fn parse(s: &str) -> Option<AxisId> {
        AxisId::ALL.into_iter().find(|a| a.name() == s)
    }
}

impl fmt::Display for AxisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One synchronized reading of all six axes at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrenchSample {
    pub t: f64,
    pub fx: f64,
    pub fy: f64,
    pub fz: f64,
    pub mx: f64,
    pub my: f64,
    pub mz: f64,
}

impl WrenchSample {
    pub fn axis(&self, axis: AxisId) -> f64 {
        match axis {
            AxisId::Fx => self.fx,
            AxisId::Fy => self.fy,
            AxisId::Fz => self.fz,
            AxisId::Mx => self.mx,
            AxisId::My => self.my,
            AxisId::Mz => self.mz,
        }
    }

    fn values(&self) -> [f64; 6] {
        [self.fx, self.fy, self.fz, self.mx, self.my, self.mz]
    }
}

/// The four assembly sub-tasks used as classification targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseId {
    Approach,
    Rotation,
    Insertion,
    Mating,
}

impl PhaseId {
    pub const COUNT: usize = 4;
    pub const ALL: [PhaseId; 4] = [
        PhaseId::Approach,
        PhaseId::Rotation,
        PhaseId::Insertion,
        PhaseId::Mating,
    ];

    pub fn index(self) -> usize {
        match self {
            PhaseId::Approach => 0,
            PhaseId::Rotation => 1,
            PhaseId::Insertion => 2,
            PhaseId::Mating => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PhaseId::Approach => "approach",
            PhaseId::Rotation => "rotation",
            PhaseId::Insertion => "insertion",
            PhaseId::Mating => "mating",
        }
    }

    pub fn parse(s: &str) -> Option<PhaseId> {
        PhaseId::ALL.into_iter().find(|p| p.name() == s)
    }

    pub fn from_index(i: usize) -> Option<PhaseId> {
        PhaseId::ALL.get(i).copied()
    }
}

impl fmt::Display for PhaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which arm produced a recording. Single-arm setups use `Right`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArmId {
    Right,
    Left,
}

impl ArmId {
    pub fn name(self) -> &'static str {
        match self {
            ArmId::Right => "right",
            ArmId::Left => "left",
        }
    }
}

impl fmt::Display for ArmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One labeled phase window `[t_start, t_end)` within a trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpec {
    pub phase: PhaseId,
    pub t_start: f64,
    pub t_end: f64,
}

/// One task execution: synchronized six-axis samples plus its phase windows.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub trial_id: String,
    pub arm: ArmId,
    pub samples: Vec<WrenchSample>,
    pub phases: Vec<PhaseSpec>,
}

/// One axis of one window, ready for segmentation. Construction validates
/// strictly increasing times and a minimum of two samples.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSeries {
    axis: AxisId,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl AxisSeries {
    pub fn new(axis: AxisId, times: Vec<f64>, values: Vec<f64>) -> Result<AxisSeries> {
        if times.len() != values.len() {
            return Err(Error::InvalidParam(format!(
                "times/values length mismatch: {} vs {}",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::SeriesTooShort {
                got: times.len(),
                need: 2,
            });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParam(
                "series times must be strictly increasing".into(),
            ));
        }
        Ok(AxisSeries {
            axis,
            times,
            values,
        })
    }

    pub fn axis(&self) -> AxisId {
        self.axis
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: at least two samples
    }

    /// Time span as `(first, last)`.
    pub fn span(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }
}

/// Supported on-disk trial encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrialFormat {
    /// `t,fx,fy,fz,mx,my,mz` CSV plus a `*.phases.csv` sidecar.
    #[default]
    Csv,
}

const TRIAL_HEADER: &str = "t,fx,fy,fz,mx,my,mz";
const PHASE_HEADER: &str = "phase_id,t_start,t_end";

/// Sidecar path for a trial file: `dir/foo.csv` -> `dir/foo.phases.csv`.
pub fn phase_sidecar_path(trial_path: &Path) -> PathBuf {
    let mut p = trial_path.to_path_buf();
    p.set_extension("phases.csv");
    p
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_float(path: &Path, line: usize, field: &str) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| Error::MalformedRow {
        path: path.to_path_buf(),
        line,
        reason: format!("non-numeric cell {field:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::MalformedRow {
            path: path.to_path_buf(),
            line,
            reason: format!("non-finite cell {field:?}"),
        });
    }
    Ok(v)
}

/// Load a trial recording and its phase sidecar, validating every invariant
/// of the data model. The arm is inferred from a `_left` suffix on the file
/// stem; everything else is `Right`.
pub fn load_trial(path: &Path, format: TrialFormat) -> Result<Trial> {
    let TrialFormat::Csv = format;

    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    let header = match lines.next() {
        Some((_, Ok(h))) => h,
        Some((_, Err(e))) => return Err(io_err(path, e)),
        None => {
            return Err(Error::MalformedRow {
                path: path.to_path_buf(),
                line: 1,
                reason: "empty file".into(),
            })
        }
    };
    if header.trim_end_matches('\r') != TRIAL_HEADER {
        return Err(Error::MalformedRow {
            path: path.to_path_buf(),
            line: 1,
            reason: format!("expected header {TRIAL_HEADER:?}"),
        });
    }

    let mut samples: Vec<WrenchSample> = Vec::new();
    for (idx, line) in lines {
        let line = line.map_err(|e| io_err(path, e))?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::MalformedRow {
                path: path.to_path_buf(),
                line: lineno,
                reason: format!("expected 7 cells, got {}", fields.len()),
            });
        }
        let mut vals = [0.0f64; 7];
        for (i, f) in fields.iter().enumerate() {
            vals[i] = parse_float(path, lineno, f)?;
        }
        if vals[0] < 0.0 {
            return Err(Error::MalformedRow {
                path: path.to_path_buf(),
                line: lineno,
                reason: "negative time".into(),
            });
        }
        if let Some(prev) = samples.last() {
            if vals[0] <= prev.t {
                return Err(Error::NonMonotoneTime {
                    path: path.to_path_buf(),
                    line: lineno,
                });
            }
        }
        samples.push(WrenchSample {
            t: vals[0],
            fx: vals[1],
            fy: vals[2],
            fz: vals[3],
            mx: vals[4],
            my: vals[5],
            mz: vals[6],
        });
    }

    let sidecar = phase_sidecar_path(path);
    if !sidecar.exists() {
        return Err(Error::MissingPhaseFile { path: sidecar });
    }
    let phases = load_phases(&sidecar)?;

    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trial".into());
    let arm = if stem.ends_with("_left") {
        ArmId::Left
    } else {
        ArmId::Right
    };

    let trial = Trial {
        trial_id: stem,
        arm,
        samples,
        phases,
    };
    trial.validate()?;
    Ok(trial)
}

fn load_phases(path: &Path) -> Result<Vec<PhaseSpec>> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    let header = match lines.next() {
        Some((_, Ok(h))) => h,
        Some((_, Err(e))) => return Err(io_err(path, e)),
        None => {
            return Err(Error::MalformedRow {
                path: path.to_path_buf(),
                line: 1,
                reason: "empty sidecar".into(),
            })
        }
    };
    if header.trim_end_matches('\r') != PHASE_HEADER {
        return Err(Error::MalformedRow {
            path: path.to_path_buf(),
            line: 1,
            reason: format!("expected header {PHASE_HEADER:?}"),
        });
    }

    let mut phases = Vec::new();
    for (idx, line) in lines {
        let line = line.map_err(|e| io_err(path, e))?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::MalformedRow {
                path: path.to_path_buf(),
                line: lineno,
                reason: format!("expected 3 cells, got {}", fields.len()),
            });
        }
        let phase = PhaseId::parse(fields[0].trim()).ok_or_else(|| Error::MalformedRow {
            path: path.to_path_buf(),
            line: lineno,
            reason: format!("unknown phase id {:?}", fields[0]),
        })?;
        let t_start = parse_float(path, lineno, fields[1])?;
        let t_end = parse_float(path, lineno, fields[2])?;
        phases.push(PhaseSpec {
            phase,
            t_start,
            t_end,
        });
    }
    Ok(phases)
}

/// Write a trial and its phase sidecar. Floats are written with the shortest
/// representation that parses back to the identical bits, so
/// `load_trial(save_trial(t))` is the identity.
pub fn save_trial(trial: &Trial, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<File>, s: String| -> Result<()> {
        w.write_all(s.as_bytes()).map_err(|e| io_err(path, e))
    };
    write(&mut w, format!("{TRIAL_HEADER}\n"))?;
    for s in &trial.samples {
        write(
            &mut w,
            format!(
                "{},{},{},{},{},{},{}\n",
                s.t, s.fx, s.fy, s.fz, s.mx, s.my, s.mz
            ),
        )?;
    }
    w.flush().map_err(|e| io_err(path, e))?;

    let sidecar = phase_sidecar_path(path);
    let file = File::create(&sidecar).map_err(|e| io_err(&sidecar, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(format!("{PHASE_HEADER}\n").as_bytes())
        .map_err(|e| io_err(&sidecar, e))?;
    for p in &trial.phases {
        w.write_all(format!("{},{},{}\n", p.phase, p.t_start, p.t_end).as_bytes())
            .map_err(|e| io_err(&sidecar, e))?;
    }
    w.flush().map_err(|e| io_err(&sidecar, e))?;
    Ok(())
}

impl Trial {
    /// Check every invariant of the data model: finite, monotone, phase
    /// windows ordered and contiguous, and at least two samples per phase.
    pub fn validate(&self) -> Result<()> {
        if self.samples.len() < 2 {
            return Err(Error::SeriesTooShort {
                got: self.samples.len(),
                need: 2,
            });
        }
        for pair in self.samples.windows(2) {
            if pair[1].t <= pair[0].t {
                return Err(Error::BadPhaseLayout {
                    reason: "sample times not strictly increasing".into(),
                });
            }
        }
        for s in &self.samples {
            if s.t < 0.0 || !s.t.is_finite() || s.values().iter().any(|v| !v.is_finite()) {
                return Err(Error::BadPhaseLayout {
                    reason: format!("non-finite or negative-time sample at t={}", s.t),
                });
            }
        }
        if self.phases.is_empty() {
            return Err(Error::BadPhaseLayout {
                reason: "trial has no phases".into(),
            });
        }
        for p in &self.phases {
            if !(p.t_start < p.t_end) {
                return Err(Error::BadPhaseLayout {
                    reason: format!("phase {} has t_start >= t_end", p.phase),
                });
            }
        }
        for pair in self.phases.windows(2) {
            if pair[1].t_start < pair[0].t_end {
                return Err(Error::BadPhaseLayout {
                    reason: format!("phases {} and {} overlap", pair[0].phase, pair[1].phase),
                });
            }
            if pair[1].t_start != pair[0].t_end {
                return Err(Error::BadPhaseLayout {
                    reason: format!(
                        "gap between phases {} and {}",
                        pair[0].phase, pair[1].phase
                    ),
                });
            }
        }
        for p in &self.phases {
            let count = self
                .samples
                .iter()
                .filter(|s| s.t >= p.t_start && s.t < p.t_end)
                .count();
            if count < 2 {
                return Err(Error::EmptyPhase {
                    phase: p.phase.name().into(),
                });
            }
        }
        Ok(())
    }

    pub fn phase_spec(&self, phase: PhaseId) -> Option<&PhaseSpec> {
        self.phases.iter().find(|p| p.phase == phase)
    }

    /// Full-recording series for one axis.
    pub fn axis_series(&self, axis: AxisId) -> Result<AxisSeries> {
        AxisSeries::new(
            axis,
            self.samples.iter().map(|s| s.t).collect(),
            self.samples.iter().map(|s| s.axis(axis)).collect(),
        )
    }
}

/// Extract the samples of one axis falling in `[t_start, t_end)` of a phase.
/// The phase is expected to belong to the trial; order is preserved.
pub fn slice_phase(trial: &Trial, phase: &PhaseSpec, axis: AxisId) -> Result<AxisSeries> {
    let mut times = Vec::new();
    let mut values = Vec::new();
    for s in &trial.samples {
        if s.t >= phase.t_start && s.t < phase.t_end {
            times.push(s.t);
            values.push(s.axis(axis));
        }
    }
    if times.len() < 2 {
        return Err(Error::EmptyPhase {
            phase: phase.phase.name().into(),
        });
    }
    AxisSeries::new(axis, times, values)
}
