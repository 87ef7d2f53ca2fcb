//! Boundary detection on a cohesion series.
//!
//! Topic boundaries are the salient valleys of the series. A candidate
//! valley is any interior position strictly below its left neighbor and no
//! higher than its right neighbor (the leftmost point of a flat valley
//! bottom is the candidate). Its salience is a prominence: the lower of the
//! two ridges separating it from the neighboring candidate valleys (or from
//! the series ends, inclusive, where no candidate intervenes), minus the
//! valley value. Shallow ripples score near zero and are filtered out;
//! crowded valleys are thinned so surviving boundaries keep a minimum
//! distance.
//!
//! The word-frequency baseline [`vmp_series`] counts first-time vocabulary
//! inside a trailing window; its peaks (valleys of the negated series) mark
//! introductions of new material.

use serde::Serialize;
use thiserror::Error;

use crate::lcp::TokenSequence;

#[derive(Debug, Error)]
pub enum SegmentError {
    #[error("series of length {0} is too short for valley detection (need 3)")]
    TooShort(usize),
    #[error("non-finite series value at position {0}")]
    NonFinite(usize),
    #[error("min-prominence must be finite and non-negative, got {0}")]
    BadProminence(f64),
    #[error("min-separation must be at least 1")]
    ZeroSeparation,
    #[error("vocabulary window must be at least 1")]
    ZeroInterval,
}

/// One predicted boundary: the series position of the valley, read as the
/// gap between tokens `gap` and `gap + 1`, plus its prominence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Boundary {
    pub gap: usize,
    pub salience: f64,
}

/// Predicted boundaries in ascending gap order. Saliences are strictly
/// positive and surviving gaps respect the separation the detector ran with.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Segmentation {
    boundaries: Vec<Boundary>,
}

impl Segmentation {
    pub fn boundaries(&self) -> &[Boundary] {
        &self.boundaries
    }

    pub fn gaps(&self) -> impl Iterator<Item = usize> + '_ {
        self.boundaries.iter().map(|b| b.gap)
    }

    pub fn len(&self) -> usize {
        self.boundaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundaries.is_empty()
    }

    /// The boundary with the highest salience (ties: the earliest).
    pub fn top(&self) -> Option<Boundary> {
        self.boundaries
            .iter()
            .copied()
            .reduce(|best, b| if b.salience > best.salience { b } else { best })
    }
}

/// Finds salient valleys in a series.
///
/// Candidates below `min_prominence` are dropped, as are zero-prominence
/// candidates (flat surroundings say nothing). While any two survivors sit
/// closer than `min_separation`, the shallowest conflicted one is discarded
/// (ties: the later one), so thinning never removes the deeper valley of a
/// crowded pair.
///
/// Salience depends only on value differences: adding a constant to the
/// whole series changes nothing, and scaling the series scales saliences by
/// the same factor.
pub fn find_valleys(
    values: &[f64],
    min_prominence: f64,
    min_separation: usize,
) -> Result<Segmentation, SegmentError> {
    if values.len() < 3 {
        return Err(SegmentError::TooShort(values.len()));
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(SegmentError::NonFinite(index + 1));
    }
    if !min_prominence.is_finite() || min_prominence < 0.0 {
        return Err(SegmentError::BadProminence(min_prominence));
    }
    if min_separation == 0 {
        return Err(SegmentError::ZeroSeparation);
    }

    let n = values.len();
    let candidates: Vec<usize> = (1..n - 1)
        .filter(|&i| values[i] < values[i - 1] && values[i] <= values[i + 1])
        .collect();

    let max_of = |slice: &[f64]| {
        slice
            .iter()
            .fold(f64::NEG_INFINITY, |acc, &v| if v > acc { v } else { acc })
    };

    let mut survivors: Vec<Boundary> = Vec::new();
    for (j, &idx) in candidates.iter().enumerate() {
        // Ridges run to the neighboring candidate exclusive, or to the
        // series end inclusive when no candidate intervenes. Candidates are
        // never adjacent, so both spans are non-empty.
        let left_start = if j > 0 { candidates[j - 1] + 1 } else { 0 };
        let right_end = if j + 1 < candidates.len() {
            candidates[j + 1] - 1
        } else {
            n - 1
        };
        let left_ridge = max_of(&values[left_start..idx]);
        let right_ridge = max_of(&values[idx + 1..=right_end]);
        let salience = left_ridge.min(right_ridge) - values[idx];
        if salience > 0.0 && salience >= min_prominence {
            survivors.push(Boundary {
                gap: idx + 1,
                salience,
            });
        }
    }

    enforce_separation(&mut survivors, min_separation);
    Ok(Segmentation {
        boundaries: survivors,
    })
}

/// Repeatedly removes the shallowest boundary that sits within
/// `min_separation` of another (ties: the later one) until no conflicts
/// remain. `boundaries` must be in ascending gap order and stays that way.
fn enforce_separation(boundaries: &mut Vec<Boundary>, min_separation: usize) {
    loop {
        let mut victim: Option<usize> = None;
        for i in 0..boundaries.len() {
            let conflicted = boundaries
                .iter()
                .enumerate()
                .any(|(k, other)| {
                    k != i && boundaries[i].gap.abs_diff(other.gap) < min_separation
                });
            if !conflicted {
                continue;
            }
            victim = Some(match victim {
                None => i,
                Some(v) => {
                    let (s_v, s_i) = (boundaries[v].salience, boundaries[i].salience);
                    // Later index means later gap; prefer evicting it on ties.
                    if s_i < s_v || (s_i == s_v && i > v) {
                        i
                    } else {
                        v
                    }
                }
            });
        }
        match victim {
            Some(v) => {
                boundaries.remove(v);
            }
            None => break,
        }
    }
}

/// Vocabulary-introduction series: for each position, how many of the last
/// `interval` tokens (inclusive, clamped at the text start) are the first
/// occurrence of their word in the whole text.
pub fn vmp_series(tokens: &TokenSequence, interval: usize) -> Result<Vec<f64>, SegmentError> {
    if interval == 0 {
        return Err(SegmentError::ZeroInterval);
    }
    let n = tokens.len();
    let mut seen: std::collections::HashSet<&str> = std::collections::HashSet::with_capacity(n);
    let mut first = vec![0u32; n + 1];
    for (index, token) in tokens.tokens().iter().enumerate() {
        first[index + 1] = u32::from(seen.insert(token.as_str()));
    }
    // Prefix sums turn each trailing-window count into two lookups.
    let mut prefix = vec![0u32; n + 1];
    for i in 1..=n {
        prefix[i] = prefix[i - 1] + first[i];
    }
    Ok((1..=n)
        .map(|i| {
            let start = i.saturating_sub(interval);
            f64::from(prefix[i] - prefix[start])
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lcp::TokenSequence;

    fn seq(tokens: &[&str]) -> TokenSequence {
        TokenSequence::from_tokens(tokens.iter().map(|t| t.to_string()).collect()).unwrap()
    }

    #[test]
    fn two_valleys_with_expected_saliences() {
        let seg = find_valleys(&[5.0, 2.0, 4.0, 1.0, 5.0], 0.0, 1).unwrap();
        let gaps: Vec<usize> = seg.gaps().collect();
        assert_eq!(gaps, vec![2, 4]);
        assert_eq!(seg.boundaries()[0].salience, 2.0);
        assert_eq!(seg.boundaries()[1].salience, 3.0);
        assert_eq!(seg.top().unwrap().gap, 4);
    }

    #[test]
    fn endpoints_are_never_boundaries() {
        let seg = find_valleys(&[0.0, 1.0, 2.0, 1.5, 3.0], 0.0, 1).unwrap();
        let gaps: Vec<usize> = seg.gaps().collect();
        assert_eq!(gaps, vec![4]);
    }

    #[test]
    fn plateau_reports_its_leftmost_position() {
        let seg = find_valleys(&[5.0, 1.0, 1.0, 1.0, 5.0], 0.0, 1).unwrap();
        let gaps: Vec<usize> = seg.gaps().collect();
        assert_eq!(gaps, vec![2]);
        assert_eq!(seg.boundaries()[0].salience, 4.0);
    }

    #[test]
    fn monotone_series_has_no_valleys() {
        let seg = find_valleys(&[1.0, 2.0, 3.0, 4.0], 0.0, 1).unwrap();
        assert!(seg.is_empty());
        let seg = find_valleys(&[4.0, 3.0, 2.0, 1.0], 0.0, 1).unwrap();
        assert!(seg.is_empty());
        let seg = find_valleys(&[2.0, 2.0, 2.0, 2.0], 0.0, 1).unwrap();
        assert!(seg.is_empty());
    }

    #[test]
    fn min_prominence_filters_shallow_valleys() {
        let values = [5.0, 2.0, 4.0, 1.0, 5.0];
        let seg = find_valleys(&values, 2.5, 1).unwrap();
        let gaps: Vec<usize> = seg.gaps().collect();
        assert_eq!(gaps, vec![4]);
    }

    #[test]
    fn min_separation_keeps_the_deeper_valley() {
        // Valleys at positions 2 (salience 2) and 4 (salience 3), 2 apart.
        let values = [5.0, 2.0, 4.0, 1.0, 5.0];
        let seg = find_valleys(&values, 0.0, 3).unwrap();
        let gaps: Vec<usize> = seg.gaps().collect();
        assert_eq!(gaps, vec![4]);
        // Separation exactly equal to the distance is allowed.
        let seg = find_valleys(&values, 0.0, 2).unwrap();
        assert_eq!(seg.len(), 2);
    }

    #[test]
    fn separation_ties_keep_the_earlier_valley() {
        let values = [5.0, 1.0, 4.0, 1.0, 5.0];
        let seg = find_valleys(&values, 0.0, 3).unwrap();
        let gaps: Vec<usize> = seg.gaps().collect();
        assert_eq!(gaps, vec![2]);
    }

    #[test]
    fn salience_is_shift_invariant_and_scale_covariant() {
        let base = [5.0, 2.0, 4.0, 1.0, 5.0];
        let shifted: Vec<f64> = base.iter().map(|v| v + 100.0).collect();
        let scaled: Vec<f64> = base.iter().map(|v| v * 3.0).collect();
        let a = find_valleys(&base, 0.0, 1).unwrap();
        let b = find_valleys(&shifted, 0.0, 1).unwrap();
        let c = find_valleys(&scaled, 0.0, 1).unwrap();
        assert_eq!(a, b);
        let gaps_a: Vec<usize> = a.gaps().collect();
        let gaps_c: Vec<usize> = c.gaps().collect();
        assert_eq!(gaps_a, gaps_c);
        for (x, y) in a.boundaries().iter().zip(c.boundaries()) {
            assert!((y.salience - 3.0 * x.salience).abs() < 1e-12);
        }
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            find_valleys(&[1.0, 2.0], 0.0, 1),
            Err(SegmentError::TooShort(2))
        ));
        assert!(matches!(
            find_valleys(&[1.0, f64::NAN, 2.0], 0.0, 1),
            Err(SegmentError::NonFinite(2))
        ));
        assert!(matches!(
            find_valleys(&[1.0, 0.0, 2.0], -1.0, 1),
            Err(SegmentError::BadProminence(_))
        ));
        assert!(matches!(
            find_valleys(&[1.0, 0.0, 2.0], 0.0, 0),
            Err(SegmentError::ZeroSeparation)
        ));
        let empty = seq(&[]);
        assert!(matches!(
            vmp_series(&empty, 0),
            Err(SegmentError::ZeroInterval)
        ));
    }

    #[test]
    fn vocabulary_series_counts_first_occurrences() {
        let tokens = seq(&["a", "b", "a", "b"]);
        assert_eq!(vmp_series(&tokens, 2).unwrap(), vec![1.0, 2.0, 1.0, 0.0]);
        let tokens = seq(&["a", "b", "c"]);
        assert_eq!(vmp_series(&tokens, 10).unwrap(), vec![1.0, 2.0, 3.0]);
        let empty = seq(&[]);
        assert_eq!(vmp_series(&empty, 3).unwrap(), Vec::<f64>::new());
    }

    #[test]
    fn negated_vocabulary_series_yields_introduction_peaks() {
        // New vocabulary floods in at position 5; the negated series has a
        // valley right where the introduction rate peaks.
        let tokens = seq(&["a", "b", "a", "b", "x", "y", "z", "x", "y", "z"]);
        let series = vmp_series(&tokens, 3).unwrap();
        let negated: Vec<f64> = series.iter().map(|v| -v).collect();
        let seg = find_valleys(&negated, 0.0, 1).unwrap();
        assert!(!seg.is_empty());
        let top = seg.top().unwrap();
        assert!((5..=7).contains(&top.gap));
    }
}
