//! Scoring predicted boundaries against human judgements.
//!
//! Gold data is a set of gaps with per-gap vote counts from a panel of
//! judges. A gap is a dominant boundary when its votes reach the chosen
//! threshold; predictions are matched one-to-one against dominant gaps
//! within a position tolerance, greedily in ascending prediction order, and
//! scored with precision, recall, and F1.
//!
//! The paragraph-independence report cross-tabulates predicted gaps, gold
//! gaps, and paragraph breaks, making it visible that cohesion valleys are
//! not merely rediscovered paragraph boundaries.

use std::collections::BTreeSet;
use std::io::{self, BufRead};

use serde::Serialize;
use thiserror::Error;

use crate::segmenter::Segmentation;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("judge count must be at least 1")]
    NoJudges,
    #[error("gold gaps must be strictly increasing at gap {0}")]
    UnorderedGaps(usize),
    #[error("gap {gap} has {votes} votes, outside 1..={judges}")]
    VotesOutOfRange { gap: usize, votes: u32, judges: u32 },
    #[error("vote threshold must be at least 1")]
    ZeroThreshold,
    #[error("vote threshold {threshold} exceeds judge count {judges}")]
    ThresholdTooHigh { threshold: u32, judges: u32 },
    /// A malformed line in a gold or paragraph file; `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Judge-annotated boundary gaps: `(gap, votes)` in ascending gap order,
/// with every vote count in `1..=judge_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldBoundaries {
    entries: Vec<(usize, u32)>,
    judge_count: u32,
}

impl GoldBoundaries {
    pub fn new(entries: Vec<(usize, u32)>, judge_count: u32) -> Result<Self, EvalError> {
        if judge_count == 0 {
            return Err(EvalError::NoJudges);
        }
        for pair in entries.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(EvalError::UnorderedGaps(pair[1].0));
            }
        }
        for &(gap, votes) in &entries {
            if votes == 0 || votes > judge_count {
                return Err(EvalError::VotesOutOfRange {
                    gap,
                    votes,
                    judges: judge_count,
                });
            }
        }
        Ok(Self { entries, judge_count })
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.entries
    }

    pub fn judge_count(&self) -> u32 {
        self.judge_count
    }

    /// Gaps whose votes reach `threshold`, ascending.
    pub fn dominant(&self, threshold: u32) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|&&(_, votes)| votes >= threshold)
            .map(|&(gap, _)| gap)
            .collect()
    }

    /// Default threshold: a strict majority of the panel, `ceil(judges/2)`.
    pub fn majority_threshold(&self) -> u32 {
        self.judge_count.div_ceil(2)
    }
}

/// Parses the gold file format: a `judges <n>` header line followed by
/// `gap<SPACE>votes` lines in ascending gap order.
pub fn parse_gold<R: BufRead>(reader: R) -> Result<GoldBoundaries, EvalError> {
    let mut lines = reader.lines().enumerate();
    let header = loop {
        match lines.next() {
            None => {
                return Err(EvalError::Parse {
                    line: 1,
                    message: "missing `judges <n>` header".to_string(),
                })
            }
            Some((number, line)) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break (number + 1, line);
                }
            }
        }
    };
    let (header_line, header) = header;
    let judge_count: u32 = header
        .strip_prefix("judges")
        .map(str::trim)
        .and_then(|n| n.parse().ok())
        .ok_or(EvalError::Parse {
            line: header_line,
            message: format!("expected `judges <n>`, got `{header}`"),
        })?;

    let mut entries = Vec::new();
    for (number, line) in lines {
        let line = line?;
        let number = number + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let gap = fields.next().expect("non-blank line has a first field");
        let votes = fields.next().ok_or(EvalError::Parse {
            line: number,
            message: "expected `gap votes`".to_string(),
        })?;
        if fields.next().is_some() {
            return Err(EvalError::Parse {
                line: number,
                message: "trailing fields after votes".to_string(),
            });
        }
        let gap: usize = gap.parse().map_err(|_| EvalError::Parse {
            line: number,
            message: format!("gap `{gap}` is not a non-negative integer"),
        })?;
        let votes: u32 = votes.parse().map_err(|_| EvalError::Parse {
            line: number,
            message: format!("votes `{votes}` is not a non-negative integer"),
        })?;
        entries.push((gap, votes));
    }
    GoldBoundaries::new(entries, judge_count)
}

/// Parses a paragraph-break file: one gap per line. Gaps are deduplicated
/// and returned in ascending order.
pub fn parse_paragraph_gaps<R: BufRead>(reader: R) -> Result<Vec<usize>, EvalError> {
    let mut gaps = BTreeSet::new();
    for (number, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let gap: usize = trimmed.parse().map_err(|_| EvalError::Parse {
            line: number + 1,
            message: format!("gap `{trimmed}` is not a non-negative integer"),
        })?;
        gaps.insert(gap);
    }
    Ok(gaps.into_iter().collect())
}

/// Boundary-matching score. `matches` pairs each matched prediction with
/// its gold gap, in ascending prediction order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub matches: Vec<(usize, usize)>,
    pub predicted: usize,
    pub gold: usize,
}

/// Matches predictions one-to-one against dominant gold gaps within
/// `tolerance` positions.
///
/// Predictions are processed in ascending gap order; each takes the nearest
/// unmatched gold gap within the tolerance (ties: the earlier gold gap).
/// Empty sides score by convention: no predictions means precision 1, no
/// dominant gold gaps means recall 1, and F1 is 0 when precision and recall
/// are both 0.
pub fn match_score(
    predicted: &Segmentation,
    gold: &GoldBoundaries,
    tolerance: usize,
    vote_threshold: u32,
) -> Result<MatchScore, EvalError> {
    if vote_threshold == 0 {
        return Err(EvalError::ZeroThreshold);
    }
    if vote_threshold > gold.judge_count() {
        return Err(EvalError::ThresholdTooHigh {
            threshold: vote_threshold,
            judges: gold.judge_count(),
        });
    }

    let gold_gaps = gold.dominant(vote_threshold);
    let mut taken = vec![false; gold_gaps.len()];
    let mut matches = Vec::new();
    for boundary in predicted.boundaries() {
        let mut best: Option<(usize, usize)> = None;
        for (g, &gold_gap) in gold_gaps.iter().enumerate() {
            if taken[g] {
                continue;
            }
            let distance = boundary.gap.abs_diff(gold_gap);
            if distance > tolerance {
                continue;
            }
            // Strict comparison keeps the earliest gold gap on ties.
            if best.map_or(true, |(_, best_distance)| distance < best_distance) {
                best = Some((g, distance));
            }
        }
        if let Some((g, _)) = best {
            taken[g] = true;
            matches.push((boundary.gap, gold_gaps[g]));
        }
    }

    let matched = matches.len() as f64;
    let precision = if predicted.is_empty() {
        1.0
    } else {
        matched / predicted.len() as f64
    };
    let recall = if gold_gaps.is_empty() {
        1.0
    } else {
        matched / gold_gaps.len() as f64
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(MatchScore {
        precision,
        recall,
        f1,
        matches,
        predicted: predicted.len(),
        gold: gold_gaps.len(),
    })
}

/// One row of the paragraph-independence report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportRow {
    pub gap: usize,
    pub predicted: bool,
    pub gold: bool,
    pub votes: Option<u32>,
    pub paragraph: bool,
}

/// Cross-tabulates every gap that is predicted, judged, or a paragraph
/// break. Gold membership here ignores the vote threshold; the votes column
/// carries the raw count so weak and dominant gaps stay distinguishable.
pub fn paragraph_independence_report(
    predicted: &Segmentation,
    gold: &GoldBoundaries,
    paragraph_gaps: &[usize],
) -> Vec<ReportRow> {
    let mut all_gaps: BTreeSet<usize> = BTreeSet::new();
    all_gaps.extend(predicted.gaps());
    all_gaps.extend(gold.entries().iter().map(|&(gap, _)| gap));
    all_gaps.extend(paragraph_gaps.iter().copied());

    all_gaps
        .into_iter()
        .map(|gap| {
            let votes = gold
                .entries()
                .iter()
                .find(|&&(g, _)| g == gap)
                .map(|&(_, votes)| votes);
            ReportRow {
                gap,
                predicted: predicted.gaps().any(|g| g == gap),
                gold: votes.is_some(),
                votes,
                paragraph: paragraph_gaps.contains(&gap),
            }
        })
        .collect()
}

/// Renders report rows as an aligned text table with a relationship note
/// per row.
pub fn render_report(rows: &[ReportRow]) -> String {
    let mut out = String::new();
    out.push_str("gap      predicted  gold  votes  paragraph  note\n");
    for row in rows {
        let votes = row
            .votes
            .map_or_else(|| "-".to_string(), |v| v.to_string());
        let note = match (row.gold, row.paragraph) {
            (true, true) => "boundary at a paragraph break",
            (true, false) => "boundary inside a paragraph",
            (false, true) => "paragraph break, no boundary",
            (false, false) => "prediction only",
        };
        out.push_str(&format!(
            "{:<8} {:<10} {:<5} {:<6} {:<10} {}\n",
            row.gap,
            if row.predicted { "yes" } else { "no" },
            if row.gold { "yes" } else { "no" },
            votes,
            if row.paragraph { "yes" } else { "no" },
            note,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segmenter::find_valleys;
    use std::io::Cursor;

    fn segmentation_with_gaps(gaps: &[usize]) -> Segmentation {
        // Builds a series whose salient valleys sit exactly at `gaps`.
        let n = gaps.iter().max().copied().unwrap_or(0) + 2;
        let mut values = vec![10.0; n];
        for &gap in gaps {
            values[gap - 1] = 1.0;
        }
        let seg = find_valleys(&values, 0.0, 1).unwrap();
        let found: Vec<usize> = seg.gaps().collect();
        assert_eq!(found, gaps, "fixture construction");
        seg
    }

    fn gold(entries: &[(usize, u32)], judges: u32) -> GoldBoundaries {
        GoldBoundaries::new(entries.to_vec(), judges).unwrap()
    }

    #[test]
    fn greedy_matching_example() {
        // Predictions 10 and 14 compete for gold gaps 12 and 30: 10 takes
        // 12 (distance 2), 14 finds nothing unmatched within 4, and 28
        // takes 30.
        let predicted = segmentation_with_gaps(&[10, 14, 28, 50]);
        let g = gold(&[(12, 10), (30, 9)], 16);
        let score = match_score(&predicted, &g, 4, 8).unwrap();
        assert_eq!(score.matches, vec![(10, 12), (28, 30)]);
        assert_eq!(score.precision, 0.5);
        assert_eq!(score.recall, 1.0);
        assert!((score.f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn tie_prefers_earlier_gold_gap() {
        let predicted = segmentation_with_gaps(&[20]);
        let g = gold(&[(18, 16), (22, 16)], 16);
        let score = match_score(&predicted, &g, 5, 8).unwrap();
        assert_eq!(score.matches, vec![(20, 18)]);
    }

    #[test]
    fn empty_sides_follow_the_stated_conventions() {
        let none = Segmentation::default();
        let g = gold(&[(10, 16)], 16);
        let score = match_score(&none, &g, 5, 8).unwrap();
        assert_eq!(
            (score.precision, score.recall, score.f1),
            (1.0, 0.0, 0.0)
        );

        let some = segmentation_with_gaps(&[40]);
        let score = match_score(&some, &g, 5, 16).unwrap();
        assert_eq!(score.gold, 1);
        assert_eq!(score.precision, 0.0);

        // Threshold above every vote count empties the gold side.
        let weak = gold(&[(10, 3)], 16);
        let score = match_score(&some, &weak, 5, 8).unwrap();
        assert_eq!(score.gold, 0);
        assert_eq!((score.recall, score.precision), (1.0, 0.0));

        let score = match_score(&none, &weak, 5, 8).unwrap();
        assert_eq!(
            (score.precision, score.recall, score.f1),
            (1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn vote_threshold_selects_dominant_gaps() {
        let g = gold(&[(5, 12), (9, 3), (20, 8)], 16);
        assert_eq!(g.dominant(8), vec![5, 20]);
        assert_eq!(g.dominant(1), vec![5, 9, 20]);
        assert_eq!(g.majority_threshold(), 8);
    }

    #[test]
    fn matching_is_one_to_one() {
        let predicted = segmentation_with_gaps(&[10, 12]);
        let g = gold(&[(10, 16)], 16);
        let score = match_score(&predicted, &g, 5, 8).unwrap();
        assert_eq!(score.matches.len(), 1);
        assert_eq!(score.matches[0], (10, 10));
    }

    #[test]
    fn threshold_validation() {
        let g = gold(&[(10, 16)], 16);
        let predicted = segmentation_with_gaps(&[10]);
        assert!(matches!(
            match_score(&predicted, &g, 5, 0),
            Err(EvalError::ZeroThreshold)
        ));
        assert!(matches!(
            match_score(&predicted, &g, 5, 17),
            Err(EvalError::ThresholdTooHigh { .. })
        ));
    }

    #[test]
    fn gold_construction_validation() {
        assert!(matches!(
            GoldBoundaries::new(vec![(10, 1)], 0),
            Err(EvalError::NoJudges)
        ));
        assert!(matches!(
            GoldBoundaries::new(vec![(10, 1), (10, 2)], 16),
            Err(EvalError::UnorderedGaps(10))
        ));
        assert!(matches!(
            GoldBoundaries::new(vec![(10, 17)], 16),
            Err(EvalError::VotesOutOfRange { .. })
        ));
        assert!(matches!(
            GoldBoundaries::new(vec![(10, 0)], 16),
            Err(EvalError::VotesOutOfRange { .. })
        ));
    }

    #[test]
    fn parse_gold_reads_header_and_entries() {
        let input = "judges 16\n10 14\n25 9\n";
        let g = parse_gold(Cursor::new(input)).unwrap();
        assert_eq!(g.judge_count(), 16);
        assert_eq!(g.entries(), &[(10, 14), (25, 9)]);

        assert!(matches!(
            parse_gold(Cursor::new("10 14\n")),
            Err(EvalError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_gold(Cursor::new("judges 16\n10\n")),
            Err(EvalError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_gold(Cursor::new("")),
            Err(EvalError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn parse_paragraph_gaps_sorts_and_dedupes() {
        let gaps = parse_paragraph_gaps(Cursor::new("30\n10\n30\n")).unwrap();
        assert_eq!(gaps, vec![10, 30]);
        assert!(matches!(
            parse_paragraph_gaps(Cursor::new("x\n")),
            Err(EvalError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn report_covers_the_union_of_gap_sources() {
        let predicted = segmentation_with_gaps(&[10, 40]);
        let g = gold(&[(10, 14), (25, 9)], 16);
        let rows = paragraph_independence_report(&predicted, &g, &[25, 33]);
        let gaps: Vec<usize> = rows.iter().map(|r| r.gap).collect();
        assert_eq!(gaps, vec![10, 25, 33, 40]);

        assert!(rows[0].predicted && rows[0].gold && !rows[0].paragraph);
        assert_eq!(rows[0].votes, Some(14));
        assert!(!rows[1].predicted && rows[1].gold && rows[1].paragraph);
        assert!(!rows[2].predicted && !rows[2].gold && rows[2].paragraph);
        assert!(rows[3].predicted && !rows[3].gold && !rows[3].paragraph);

        let rendered = render_report(&rows);
        assert_eq!(rendered.lines().count(), 5);
        assert!(rendered.contains("boundary inside a paragraph"));
        assert!(rendered.contains("paragraph break, no boundary"));
    }
}
