//! Low-level behavior layer: classifies ordered pairs of motion
//! compositions. Same feature set as the previous layer except RMS is
//! replaced by a maximum-value feature.

use serde::{Deserialize, Serialize};

use crate::compositions::{McLabel, MotionComposition};
use crate::error::{Error, Result};

/// Low-level behavior categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LlbLabel {
    Push,
    Pull,
    Fixed,
    Contact,
    Alignment,
    Shift,
    Noise,
}

impl LlbLabel {
    pub const COUNT: usize = 7;
    pub const ALL: [LlbLabel; 7] = [
        LlbLabel::Push,
        LlbLabel::Pull,
        LlbLabel::Fixed,
        LlbLabel::Contact,
        LlbLabel::Alignment,
        LlbLabel::Shift,
        LlbLabel::Noise,
    ];

    pub fn code(self) -> &'static str {
        match self {
            LlbLabel::Push => "PS",
            LlbLabel::Pull => "PL",
            LlbLabel::Fixed => "FX",
            LlbLabel::Contact => "CT",
            LlbLabel::Alignment => "AL",
            LlbLabel::Shift => "SH",
            LlbLabel::Noise => "N",
        }
    }

    pub fn parse(s: &str) -> Option<LlbLabel> {
        LlbLabel::ALL.into_iter().find(|l| l.code() == s)
    }
}

/// An ordered pair of motion compositions with aggregated features.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowLevelBehavior {
    pub label: LlbLabel,
    pub avg: f64,
    pub max_val: f64,
    pub amplitude: f64,
    pub m1_label: McLabel,
    pub m2_label: McLabel,
    pub t1_start: f64,
    pub t1_end: f64,
    pub t2_start: f64,
    pub t2_end: f64,
    pub t_avg: f64,
}

impl LowLevelBehavior {
    pub fn t_start(&self) -> f64 {
        self.t1_start
    }

    pub fn t_end(&self) -> f64 {
        self.t2_end
    }
}

/// Classify an ordered pair of compositions. Adjustment-family pairs (two
/// adjustments, or an increase against a decrease) become a Shift when the
/// second amplitude is larger, otherwise an Alignment; everything mixed or
/// unstable is Noise.
pub fn classify_mc_pair(m1: &MotionComposition, m2: &MotionComposition) -> LlbLabel {
    use McLabel::*;
    match (m1.label, m2.label) {
        (Increase, Increase) => LlbLabel::Push,
        (Decrease, Decrease) => LlbLabel::Pull,
        (Constant, Constant) => LlbLabel::Fixed,
        (Contact, Contact) => LlbLabel::Contact,
        (Adjustment, Adjustment) | (Increase, Decrease) | (Decrease, Increase) => {
            if m2.amplitude > m1.amplitude {
                LlbLabel::Shift
            } else {
                LlbLabel::Alignment
            }
        }
        _ => LlbLabel::Noise,
    }
}

fn singleton_label(m: McLabel) -> LlbLabel {
    match m {
        McLabel::Increase => LlbLabel::Push,
        McLabel::Decrease => LlbLabel::Pull,
        McLabel::Constant => LlbLabel::Fixed,
        McLabel::Contact => LlbLabel::Contact,
        McLabel::Adjustment => LlbLabel::Alignment,
        McLabel::Unstable => LlbLabel::Noise,
    }
}

fn span(m: &MotionComposition) -> f64 {
    m.t_end() - m.t_start()
}

fn pair_llb(m1: &MotionComposition, m2: &MotionComposition) -> LowLevelBehavior {
    let d1 = span(m1);
    let d2 = span(m2);
    let avg = (m1.avg * d1 + m2.avg * d2) / (d1 + d2);
    LowLevelBehavior {
        label: classify_mc_pair(m1, m2),
        avg,
        max_val: m1.avg.max(m2.avg),
        amplitude: m1.amplitude.max(m2.amplitude),
        m1_label: m1.label,
        m2_label: m2.label,
        t1_start: m1.t_start(),
        t1_end: m1.t_end(),
        t2_start: m2.t_start(),
        t2_end: m2.t_end(),
        t_avg: 0.5 * (m1.t_start() + m2.t_end()),
    }
}

fn singleton_llb(m: &MotionComposition) -> LowLevelBehavior {
    let mid = 0.5 * (m.t_start() + m.t_end());
    LowLevelBehavior {
        label: singleton_label(m.label),
        avg: m.avg,
        max_val: m.avg,
        amplitude: m.amplitude,
        m1_label: m.label,
        m2_label: m.label,
        t1_start: m.t_start(),
        t1_end: mid,
        t2_start: mid,
        t2_end: m.t_end(),
        t_avg: mid,
    }
}

/// Greedy non-overlapping pairing of consecutive compositions; a trailing
/// composition becomes a singleton behavior.
pub fn derive_behaviors(mcs: &[MotionComposition]) -> Result<Vec<LowLevelBehavior>> {
    if mcs.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut out = Vec::with_capacity(mcs.len().div_ceil(2));
    let mut chunks = mcs.chunks_exact(2);
    for pair in &mut chunks {
        out.push(pair_llb(&pair[0], &pair[1]));
    }
    if let [last] = chunks.remainder() {
        out.push(singleton_llb(last));
    }
    Ok(out)
}
