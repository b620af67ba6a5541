//! Primitive layer: partitions each axis series into linear segments and
//! labels each by gradient magnitude against calibrated thresholds.
//!
//! Segmentation is a growing window: the current window extends sample by
//! sample while the least-squares fit keeps R^2 above the gate; on a
//! violation the segment closes at the previous sample. Windows that fail
//! the gate at the minimum length are cut as-is (forced cut), which is what
//! turns contact transients into short impulse segments. Adjacent segments
//! share their boundary sample so segment spans tile the input exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::AxisSeries;

/// Nine-symbol gradient alphabet. `Pimp`/`Nimp` are the impulse extremes
/// that mark surface contacts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradientLabel {
    Pimp,
    Bpos,
    Mpos,
    Spos,
    Const,
    Sneg,
    Mneg,
    Bneg,
    Nimp,
}

impl GradientLabel {
    pub const COUNT: usize = 9;
    pub const ALL: [GradientLabel; 9] = [
        GradientLabel::Pimp,
        GradientLabel::Bpos,
        GradientLabel::Mpos,
        GradientLabel::Spos,
        GradientLabel::Const,
        GradientLabel::Sneg,
        GradientLabel::Mneg,
        GradientLabel::Bneg,
        GradientLabel::Nimp,
    ];

    pub fn code(self) -> &'static str {
        match self {
            GradientLabel::Pimp => "pimp",
            GradientLabel::Bpos => "bpos",
            GradientLabel::Mpos => "mpos",
            GradientLabel::Spos => "spos",
            GradientLabel::Const => "const",
            GradientLabel::Sneg => "sneg",
            GradientLabel::Mneg => "mneg",
            GradientLabel::Bneg => "bneg",
            GradientLabel::Nimp => "nimp",
        }
    }

    pub fn parse(s: &str) -> Option<GradientLabel> {
        GradientLabel::ALL.into_iter().find(|l| l.code() == s)
    }

    pub fn is_impulse(self) -> bool {
        matches!(self, GradientLabel::Pimp | GradientLabel::Nimp)
    }

    /// Positive family, impulse included.
    pub fn is_positive(self) -> bool {
        matches!(
            self,
            GradientLabel::Pimp | GradientLabel::Bpos | GradientLabel::Mpos | GradientLabel::Spos
        )
    }

    /// Negative family, impulse included.
    pub fn is_negative(self) -> bool {
        matches!(
            self,
            GradientLabel::Nimp | GradientLabel::Bneg | GradientLabel::Mneg | GradientLabel::Sneg
        )
    }

    pub fn is_const(self) -> bool {
        self == GradientLabel::Const
    }
}

/// Calibrated gradient bands. Region cuts are fractions of `g_max`; a slope
/// with magnitude at or below `eps_const` reads as constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientThresholds {
    pub eps_const: f64,
    pub g_max: f64,
    pub cut_small: f64,
    pub cut_med: f64,
    pub cut_big: f64,
}

impl GradientThresholds {
    pub fn validate(&self) -> Result<()> {
        let ok = self.eps_const > 0.0
            && self.eps_const < self.cut_small * self.g_max
            && self.cut_small < self.cut_med
            && self.cut_med < self.cut_big
            && self.cut_big <= 1.0
            && self.g_max.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::CalibrationDegenerate(format!(
                "threshold ordering violated: eps={} g_max={} cuts=({},{},{})",
                self.eps_const, self.g_max, self.cut_small, self.cut_med, self.cut_big
            )))
        }
    }
}

/// Segmentation gate parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentationParams {
    /// Minimum determination coefficient before a segment closes.
    pub r2_min: f64,
    /// Minimum window length in samples; failed windows of this length are
    /// cut as-is.
    pub min_window: usize,
}

impl Default for SegmentationParams {
    fn default() -> Self {
        SegmentationParams {
            r2_min: 0.70,
            min_window: 5,
        }
    }
}

/// Band cut fractions of `g_max` separating small/medium/big/impulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandCuts {
    pub small: f64,
    pub med: f64,
    pub big: f64,
}

impl Default for BandCuts {
    fn default() -> Self {
        BandCuts {
            small: 0.25,
            med: 0.50,
            big: 0.75,
        }
    }
}

/// One linear segment of a series. `start`/`end` are inclusive sample
/// indices; adjacent segments share their boundary index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSegment {
    pub start: usize,
    pub end: usize,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

impl LinearSegment {
    pub fn sample_count(&self) -> usize {
        self.end - self.start + 1
    }
}

/// One labeled linear segment with its seven features.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub label: GradientLabel,
    pub avg: f64,
    pub max: f64,
    pub min: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub gradient: f64,
}

/// Incremental least-squares fit over a window. Sums are kept relative to
/// the window's first point to avoid cancellation on long windows.
#[derive(Clone)]
struct WindowFit {
    t0: f64,
    y0: f64,
    n: f64,
    st: f64,
    sy: f64,
    stt: f64,
    sty: f64,
    syy: f64,
    max_abs: f64,
}

#[derive(Debug, Clone, Copy)]
struct FitResult {
    slope: f64,
    intercept: f64,
    r2: f64,
}

impl WindowFit {
    fn new(t0: f64, y0: f64) -> WindowFit {
        WindowFit {
            t0,
            y0,
            n: 0.0,
            st: 0.0,
            sy: 0.0,
            stt: 0.0,
            sty: 0.0,
            syy: 0.0,
            max_abs: 0.0,
        }
    }

    fn push(&mut self, t: f64, y: f64) {
        let dt = t - self.t0;
        let dy = y - self.y0;
        self.n += 1.0;
        self.st += dt;
        self.sy += dy;
        self.stt += dt * dt;
        self.sty += dt * dy;
        self.syy += dy * dy;
        self.max_abs = self.max_abs.max(y.abs());
    }

    fn fit(&self) -> FitResult {
        let n = self.n;
        let sxx = self.stt - self.st * self.st / n;
        let sxy = self.sty - self.st * self.sy / n;
        let sst = self.syy - self.sy * self.sy / n;

        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let mean_dy = self.sy / n;
        let mean_dt = self.st / n;
        let intercept = (self.y0 + mean_dy) - slope * (self.t0 + mean_dt);

        // Constant windows are a perfect degenerate fit.
        let scale = self.max_abs;
        if sst <= 0.0 || sst / n <= 1e-12 * scale * scale {
            return FitResult {
                slope,
                intercept,
                r2: 1.0,
            };
        }
        let sse = (sst - slope * sxy).max(0.0);
        FitResult {
            slope,
            intercept,
            r2: (1.0 - sse / sst).clamp(0.0, 1.0),
        }
    }
}

fn fit_range(times: &[f64], values: &[f64], start: usize, end: usize) -> FitResult {
    let mut w = WindowFit::new(times[start], values[start]);
    for i in start..=end {
        w.push(times[i], values[i]);
    }
    w.fit()
}

fn segment_from(times: &[f64], values: &[f64], start: usize, end: usize) -> LinearSegment {
    let f = fit_range(times, values, start, end);
    LinearSegment {
        start,
        end,
        slope: f.slope,
        intercept: f.intercept,
        r2: f.r2,
    }
}

fn check_params(len: usize, params: &SegmentationParams) -> Result<()> {
    if !(params.r2_min > 0.0 && params.r2_min < 1.0) {
        return Err(Error::InvalidParam(format!(
            "r2_min must lie in (0, 1), got {}",
            params.r2_min
        )));
    }
    if params.min_window < 2 {
        return Err(Error::InvalidParam(format!(
            "min_window must be at least 2, got {}",
            params.min_window
        )));
    }
    if len < params.min_window {
        return Err(Error::SeriesTooShort {
            got: len,
            need: params.min_window,
        });
    }
    Ok(())
}

/// Partition a series into consecutive linear segments. Every segment
/// satisfies `R^2 >= r2_min` or has exactly `min_window` samples; adjacent
/// segments share their boundary sample.
pub fn segment_axis(series: &AxisSeries, params: &SegmentationParams) -> Result<Vec<LinearSegment>> {
    let n = series.len();
    check_params(n, params)?;
    let times = series.times();
    let values = series.values();
    let mw = params.min_window;
    let r2_min = params.r2_min;

    let mut out: Vec<LinearSegment> = Vec::new();
    let mut s = 0usize;
    while s < n - 1 {
        let remaining = n - s;
        if remaining <= mw {
            // Terminal chunk. Shorter-than-window chunks with a bad fit are
            // folded into the previous segment when that keeps it valid.
            let seg = segment_from(times, values, s, n - 1);
            if seg.sample_count() < mw && seg.r2 < r2_min {
                if let Some(prev) = out.last().copied() {
                    let merged = segment_from(times, values, prev.start, n - 1);
                    if merged.r2 >= r2_min {
                        out.pop();
                        out.push(merged);
                        break;
                    }
                }
            }
            out.push(seg);
            break;
        }

        let e0 = s + mw - 1;
        let mut w = WindowFit::new(times[s], values[s]);
        for i in s..=e0 {
            w.push(times[i], values[i]);
        }

        if w.fit().r2 < r2_min {
            // Forced cut at the minimum window, guarded so the remainder can
            // still host a full window where possible.
            let mut j = e0;
            let tail = n - j;
            if tail > 1 && tail < mw {
                let j2 = n - mw;
                if j2 > s && fit_range(times, values, s, j2).r2 >= r2_min {
                    j = j2;
                }
            }
            out.push(segment_from(times, values, s, j));
            s = j;
            continue;
        }

        // Grow while the fit holds.
        let mut j = e0;
        while j + 1 < n {
            let mut probe = w.clone();
            probe.push(times[j + 1], values[j + 1]);
            if probe.fit().r2 < r2_min {
                break;
            }
            w = probe;
            j += 1;
        }

        let tail = n - j;
        if tail > 1 && tail < mw {
            // Give samples back so the tail holds a full window; every grown
            // prefix already passed the gate.
            let j2 = n - mw;
            if j2 > s && (j2 >= e0 || fit_range(times, values, s, j2).r2 >= r2_min) {
                j = j2;
            }
        }
        out.push(segment_from(times, values, s, j));
        s = j;
    }

    if out.is_empty() {
        // n == 1 cannot happen (len >= min_window >= 2), but keep the
        // contract total.
        out.push(segment_from(times, values, 0, n - 1));
    }
    Ok(out)
}

/// Linear-interpolation percentile over a sorted copy of `xs`, `q` in [0,1].
fn percentile(xs: &[f64], q: f64) -> f64 {
    let mut v: Vec<f64> = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n == 1 {
        return v[0];
    }
    let rank = q * (n - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    v[lo] + (v[hi] - v[lo]) * frac
}

/// Calibrate gradient thresholds from a corpus of series: `g_max` is the
/// 99th percentile of segment slope magnitudes, the constant band the 10th
/// percentile with a floor of `0.02 * g_max`. Deterministic for a fixed
/// corpus.
pub fn calibrate_thresholds(
    corpus: &[AxisSeries],
    params: &SegmentationParams,
    cuts: BandCuts,
) -> Result<GradientThresholds> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut slopes: Vec<f64> = Vec::new();
    for series in corpus {
        for seg in segment_axis(series, params)? {
            slopes.push(seg.slope.abs());
        }
    }
    let g_max = percentile(&slopes, 0.99);
    let eps_const = percentile(&slopes, 0.10).max(0.02 * g_max);
    let th = GradientThresholds {
        eps_const,
        g_max,
        cut_small: cuts.small,
        cut_med: cuts.med,
        cut_big: cuts.big,
    };
    th.validate().map_err(|_| {
        Error::CalibrationDegenerate(format!(
            "corpus has no usable gradient dynamic range (g_max={g_max}, eps_const={eps_const})"
        ))
    })?;
    Ok(th)
}

/// Classify a slope into the nine-symbol alphabet. Total over all finite
/// slopes: the constant band first, then sign family and magnitude band.
pub fn classify_gradient(slope: f64, th: &GradientThresholds) -> GradientLabel {
    let a = slope.abs();
    if a <= th.eps_const {
        return GradientLabel::Const;
    }
    let g = th.g_max;
    if slope > 0.0 {
        if a <= th.cut_small * g {
            GradientLabel::Spos
        } else if a <= th.cut_med * g {
            GradientLabel::Mpos
        } else if a <= th.cut_big * g {
            GradientLabel::Bpos
        } else {
            GradientLabel::Pimp
        }
    } else if a <= th.cut_small * g {
        GradientLabel::Sneg
    } else if a <= th.cut_med * g {
        GradientLabel::Mneg
    } else if a <= th.cut_big * g {
        GradientLabel::Bneg
    } else {
        GradientLabel::Nimp
    }
}

/// Segment a series and extract the seven features of each primitive.
pub fn extract_primitives(
    series: &AxisSeries,
    th: &GradientThresholds,
    params: &SegmentationParams,
) -> Result<Vec<Primitive>> {
    let segs = segment_axis(series, params)?;
    let times = series.times();
    let values = series.values();
    Ok(segs
        .into_iter()
        .map(|seg| {
            let window = &values[seg.start..=seg.end];
            let sum: f64 = window.iter().sum();
            let max = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = window.iter().copied().fold(f64::INFINITY, f64::min);
            Primitive {
                label: classify_gradient(seg.slope, th),
                avg: sum / window.len() as f64,
                max,
                min,
                t_start: times[seg.start],
                t_end: times[seg.end],
                gradient: seg.slope,
            }
        })
        .collect())
}
