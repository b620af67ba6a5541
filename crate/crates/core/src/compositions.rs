//! Motion composition layer: classifies ordered pairs of primitives into
//! six categories and aggregates their eleven features.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primitives::{GradientLabel, Primitive};

/// Motion composition categories with their single-letter codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum McLabel {
    Adjustment,
    Increase,
    Decrease,
    Constant,
    Contact,
    Unstable,
}

impl McLabel {
    pub const COUNT: usize = 6;
    pub const ALL: [McLabel; 6] = [
        McLabel::Adjustment,
        McLabel::Increase,
        McLabel::Decrease,
        McLabel::Constant,
        McLabel::Contact,
        McLabel::Unstable,
    ];

    pub fn code(self) -> &'static str {
        match self {
            McLabel::Adjustment => "a",
            McLabel::Increase => "i",
            McLabel::Decrease => "d",
            McLabel::Constant => "k",
            McLabel::Contact => "c",
            McLabel::Unstable => "u",
        }
    }

    pub fn parse(s: &str) -> Option<McLabel> {
        McLabel::ALL.into_iter().find(|l| l.code() == s)
    }
}

/// An ordered pair of primitives with its eleven features: label, average,
/// RMS, amplitude, both primitive labels, both spans, and mean time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionComposition {
    pub label: McLabel,
    pub avg: f64,
    pub rms: f64,
    pub amplitude: f64,
    pub p1_label: GradientLabel,
    pub p2_label: GradientLabel,
    pub t1_start: f64,
    pub t1_end: f64,
    pub t2_start: f64,
    pub t2_end: f64,
    pub t_avg: f64,
}

impl MotionComposition {
    pub fn t_start(&self) -> f64 {
        self.t1_start
    }

    pub fn t_end(&self) -> f64 {
        self.t2_end
    }
}

/// Classify an ordered pair of gradient labels. Rules check in order:
/// impulses mean contact, opposite signs mean adjustment, same signs group,
/// and leftover const/non-const mixes are unstable.
pub fn classify_pair(p1: GradientLabel, p2: GradientLabel) -> McLabel {
    if p1.is_impulse() || p2.is_impulse() {
        return McLabel::Contact;
    }
    if (p1.is_positive() && p2.is_negative()) || (p1.is_negative() && p2.is_positive()) {
        return McLabel::Adjustment;
    }
    if p1.is_positive() && p2.is_positive() {
        return McLabel::Increase;
    }
    if p1.is_negative() && p2.is_negative() {
        return McLabel::Decrease;
    }
    if p1.is_const() && p2.is_const() {
        return McLabel::Constant;
    }
    McLabel::Unstable
}

fn singleton_label(p: GradientLabel) -> McLabel {
    if p.is_impulse() {
        McLabel::Contact
    } else if p.is_positive() {
        McLabel::Increase
    } else if p.is_negative() {
        McLabel::Decrease
    } else {
        McLabel::Constant
    }
}

fn pair_mc(p1: &Primitive, p2: &Primitive) -> MotionComposition {
    let d1 = p1.t_end - p1.t_start;
    let d2 = p2.t_end - p2.t_start;
    let total = d1 + d2;
    let avg = (p1.avg * d1 + p2.avg * d2) / total;
    let rms = ((p1.avg * p1.avg * d1 + p2.avg * p2.avg * d2) / total).sqrt();
    MotionComposition {
        label: classify_pair(p1.label, p2.label),
        avg,
        rms,
        amplitude: p1.max.max(p2.max) - p1.min.min(p2.min),
        p1_label: p1.label,
        p2_label: p2.label,
        t1_start: p1.t_start,
        t1_end: p1.t_end,
        t2_start: p2.t_start,
        t2_end: p2.t_end,
        t_avg: 0.5 * (p1.t_start + p2.t_end),
    }
}

fn singleton_mc(p: &Primitive) -> MotionComposition {
    let mid = 0.5 * (p.t_start + p.t_end);
    MotionComposition {
        label: singleton_label(p.label),
        avg: p.avg,
        rms: p.avg.abs(),
        amplitude: p.max - p.min,
        p1_label: p.label,
        p2_label: p.label,
        t1_start: p.t_start,
        t1_end: mid,
        t2_start: mid,
        t2_end: p.t_end,
        t_avg: mid,
    }
}

/// Greedy non-overlapping pairing (1,2),(3,4),... of consecutive primitives;
/// a trailing unpaired primitive becomes a singleton composition.
pub fn compose(primitives: &[Primitive]) -> Result<Vec<MotionComposition>> {
    if primitives.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut out = Vec::with_capacity(primitives.len().div_ceil(2));
    let mut chunks = primitives.chunks_exact(2);
    for pair in &mut chunks {
        out.push(pair_mc(&pair[0], &pair[1]));
    }
    if let [last] = chunks.remainder() {
        out.push(singleton_mc(last));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use GradientLabel::*;

    fn prim(label: GradientLabel, t_start: f64, t_end: f64, lo: f64, hi: f64) -> Primitive {
        Primitive {
            label,
            avg: 0.5 * (lo + hi),
            max: hi,
            min: lo,
            t_start,
            t_end,
            gradient: 0.0,
        }
    }

    #[test]
    fn opposite_signs_are_adjustment() {
        assert_eq!(classify_pair(Spos, Mneg), McLabel::Adjustment);
        assert_eq!(classify_pair(Bneg, Spos), McLabel::Adjustment);
    }

    #[test]
    fn impulse_pairs_are_contact() {
        assert_eq!(classify_pair(Pimp, Nimp), McLabel::Contact);
        assert_eq!(classify_pair(Nimp, Pimp), McLabel::Contact);
        assert_eq!(classify_pair(Pimp, Sneg), McLabel::Contact);
        assert_eq!(classify_pair(Spos, Nimp), McLabel::Contact);
        assert_eq!(classify_pair(Pimp, Const), McLabel::Contact);
    }

    #[test]
    fn const_with_motion_is_unstable() {
        assert_eq!(classify_pair(Const, Bpos), McLabel::Unstable);
        assert_eq!(classify_pair(Sneg, Const), McLabel::Unstable);
    }

    #[test]
    fn table_is_total_and_deterministic() {
        // Exhaustive 9x9 audit: every cell maps to exactly one label and a
        // second pass agrees.
        for a in GradientLabel::ALL {
            for b in GradientLabel::ALL {
                let first = classify_pair(a, b);
                let second = classify_pair(a, b);
                assert_eq!(first, second);
                if a.is_impulse() || b.is_impulse() {
                    assert_eq!(first, McLabel::Contact);
                }
            }
        }
    }

    #[test]
    fn two_small_pos_make_increase() {
        let prims = [
            prim(Spos, 0.0, 1.0, 0.0, 1.0),
            prim(Spos, 1.0, 2.0, 1.0, 2.0),
        ];
        let mcs = compose(&prims).unwrap();
        assert_eq!(mcs.len(), 1);
        assert_eq!(mcs[0].label, McLabel::Increase);
        assert_eq!(mcs[0].p1_label, Spos);
        assert_eq!(mcs[0].p2_label, Spos);
        assert_eq!(mcs[0].amplitude, 2.0);
        assert_eq!(mcs[0].t_avg, 1.0);
    }

    #[test]
    fn trailing_const_singleton() {
        let prims = [prim(Const, 0.0, 1.0, 0.5, 0.5)];
        let mcs = compose(&prims).unwrap();
        assert_eq!(mcs.len(), 1);
        assert_eq!(mcs[0].label, McLabel::Constant);
        assert!(mcs[0].t1_end <= mcs[0].t2_start);
    }

    #[test]
    fn alternating_quads_encode_idid() {
        // Slopes +,+,-,-,+,+,-,- pair into the literal `idid`.
        let labels = [Spos, Mpos, Sneg, Mneg, Spos, Mpos, Sneg, Mneg];
        let prims: Vec<Primitive> = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| prim(l, i as f64, i as f64 + 1.0, 0.0, 1.0))
            .collect();
        let word: String = compose(&prims)
            .unwrap()
            .iter()
            .map(|m| m.label.code())
            .collect();
        assert_eq!(word, "idid");
    }

    #[test]
    fn compression_is_ceil_half() {
        for n in 1usize..30 {
            let prims: Vec<Primitive> = (0..n)
                .map(|i| prim(Spos, i as f64, i as f64 + 1.0, 0.0, 1.0))
                .collect();
            let mcs = compose(&prims).unwrap();
            assert_eq!(mcs.len(), n.div_ceil(2));
        }
    }

    #[test]
    fn spans_tile_primitives() {
        let prims: Vec<Primitive> = (0..7)
            .map(|i| prim(Spos, i as f64, i as f64 + 1.0, 0.0, 1.0))
            .collect();
        let mcs = compose(&prims).unwrap();
        assert_eq!(mcs[0].t_start(), 0.0);
        assert_eq!(mcs.last().unwrap().t_end(), 7.0);
        for w in mcs.windows(2) {
            assert_eq!(w[0].t_end(), w[1].t_start());
        }
        for m in &mcs {
            assert!(m.t1_start < m.t1_end && m.t1_end <= m.t2_start && m.t2_start < m.t2_end);
        }
    }

    #[test]
    fn empty_sequence_rejected() {
        assert!(matches!(compose(&[]), Err(Error::EmptySequence)));
    }
}
