//! The lexical cohesion profile: a per-position cohesion series over a text.
//!
//! For every token position `i` (1-based) a window of half-width `delta` is
//! clamped to the text, each window token is weighted by window shape and
//! corpus significance, the window's words seed a spreading-activation run,
//! and the cohesion value `c(i)` is the weighted total activity the window's
//! own words retain. Cohesive stretches keep activity inside their
//! vocabulary and score high; windows straddling a topic shift leak
//! activity and score low, so boundaries appear as valleys of the series.

use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::activation::{activate, ActivationParams, SeedSet};
use crate::lexnet::SemanticNetwork;
use crate::significance::SignificanceTable;
use crate::textnorm;

pub const DEFAULT_HALF_WIDTH: usize = 25;

#[derive(Debug, Error)]
pub enum LcpError {
    #[error("text contains no tokens")]
    EmptyText,
    #[error("window half-width must be at least 1")]
    ZeroHalfWidth,
    #[error("unknown window shape `{0}` (expected rect, triangle, or hanning)")]
    UnknownShape(String),
    #[error("offset {offset} lies outside window half-width {half_width}")]
    OffsetOutOfRange { offset: i64, half_width: usize },
    #[error("position {position} outside 1..={len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("token `{0}` is not a normalized word")]
    InvalidToken(String),
}

/// Window taper applied across `-delta..=delta` around the focus position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowShape {
    /// Uniform weight 1 everywhere in the window.
    Rectangular,
    /// Linear falloff `1 - |k|/delta`.
    Triangle,
    /// Raised cosine `0.5 * (1 + cos(pi * k / delta))`.
    Hanning,
}

impl WindowShape {
    pub fn name(self) -> &'static str {
        match self {
            WindowShape::Rectangular => "rect",
            WindowShape::Triangle => "triangle",
            WindowShape::Hanning => "hanning",
        }
    }
}

impl std::str::FromStr for WindowShape {
    type Err = LcpError;

    fn from_str(s: &str) -> Result<Self, LcpError> {
        match s {
            "rect" | "rectangular" => Ok(WindowShape::Rectangular),
            "triangle" => Ok(WindowShape::Triangle),
            "hanning" => Ok(WindowShape::Hanning),
            other => Err(LcpError::UnknownShape(other.to_string())),
        }
    }
}

impl std::fmt::Display for WindowShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A window shape plus half-width `delta >= 1`. The window at position `i`
/// spans `delta` tokens to each side, clamped to the text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    shape: WindowShape,
    half_width: usize,
}

impl WindowSpec {
    pub fn new(shape: WindowShape, half_width: usize) -> Result<Self, LcpError> {
        if half_width == 0 {
            return Err(LcpError::ZeroHalfWidth);
        }
        Ok(Self { shape, half_width })
    }

    pub fn shape(&self) -> WindowShape {
        self.shape
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// Weight of the token `offset` positions from the window center.
    /// Offsets beyond the half-width are an error rather than zero so that
    /// callers iterating a window cannot silently mix up coordinates.
    pub fn weight(&self, offset: i64) -> Result<f64, LcpError> {
        if offset.unsigned_abs() as usize > self.half_width {
            return Err(LcpError::OffsetOutOfRange {
                offset,
                half_width: self.half_width,
            });
        }
        Ok(self.weight_unchecked(offset))
    }

    fn weight_unchecked(&self, offset: i64) -> f64 {
        let delta = self.half_width as f64;
        match self.shape {
            WindowShape::Rectangular => 1.0,
            WindowShape::Triangle => 1.0 - offset.unsigned_abs() as f64 / delta,
            WindowShape::Hanning => {
                if offset.unsigned_abs() as usize == self.half_width {
                    // The cosine lands on -1 exactly; avoid a stray ulp.
                    0.0
                } else {
                    0.5 * (1.0 + (std::f64::consts::PI * offset as f64 / delta).cos())
                }
            }
        }
    }
}

/// Inclusive 1-based window bounds around `position`, clamped to `1..=len`.
pub fn window_bounds(
    position: usize,
    half_width: usize,
    len: usize,
) -> Result<(usize, usize), LcpError> {
    if position == 0 || position > len {
        return Err(LcpError::PositionOutOfRange { position, len });
    }
    Ok(clamped_bounds(position, half_width, len))
}

fn clamped_bounds(position: usize, half_width: usize, len: usize) -> (usize, usize) {
    let left = if position > half_width {
        position - half_width
    } else {
        1
    };
    let right = if position + half_width > len {
        len
    } else {
        position + half_width
    };
    (left, right)
}

/// A tokenized text: normalized tokens plus the paragraph-break gaps
/// recovered from blank lines. Gap `g` sits between tokens `g` and `g + 1`
/// (1-based), so gaps are strictly inside `1..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    tokens: Vec<String>,
    paragraph_gaps: Vec<usize>,
}

impl TokenSequence {
    /// Wraps already-normalized tokens (lowercase, alphanumeric only) with
    /// no paragraph information.
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self, LcpError> {
        for token in &tokens {
            if textnorm::normalize(token).as_deref() != Some(token.as_str()) {
                return Err(LcpError::InvalidToken(token.clone()));
            }
        }
        Ok(Self {
            tokens,
            paragraph_gaps: Vec::new(),
        })
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token at 1-based `position`.
    pub fn token(&self, position: usize) -> &str {
        &self.tokens[position - 1]
    }

    /// Paragraph-break gaps in ascending order. Metadata only: nothing in
    /// the pipeline reads them except the evaluation report.
    pub fn paragraph_gaps(&self) -> &[usize] {
        &self.paragraph_gaps
    }
}

/// Splits raw text into normalized tokens. Chunks are whitespace-delimited;
/// each is lowercased and stripped of non-alphanumeric characters, and
/// chunks that normalize to nothing are dropped. Blank lines become
/// paragraph gaps.
pub fn tokenize(raw: &str) -> TokenSequence {
    let mut tokens: Vec<String> = Vec::new();
    let mut gaps: Vec<usize> = Vec::new();
    for line in raw.lines() {
        if line.trim().is_empty() {
            let gap = tokens.len();
            if gap > 0 && gaps.last() != Some(&gap) {
                gaps.push(gap);
            }
        } else {
            tokens.extend(line.split_whitespace().filter_map(textnorm::normalize));
        }
    }
    if gaps.last() == Some(&tokens.len()) {
        gaps.pop();
    }
    TokenSequence {
        tokens,
        paragraph_gaps: gaps,
    }
}

/// The cohesion series: one value per token position, all non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct LcpSeries {
    values: Vec<f64>,
}

impl LcpSeries {
    pub(crate) fn from_values(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite() && *v >= 0.0));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Which per-occurrence weight multiplies each word's activity in the
/// cohesion sum. Seeding always uses the shaped weight; this flag only
/// affects the output summation. For rectangular windows the two policies
/// coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SumWeighting {
    /// Weight each occurrence by window shape times significance.
    #[default]
    Shaped,
    /// Weight each occurrence by significance alone.
    Flat,
}

/// Parameters shared by every window evaluation in a profile run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CohesionParams {
    pub activation: ActivationParams,
    pub sum_weighting: SumWeighting,
}

/// Cohesion of one window, given `(token, window-weight)` pairs in window
/// order.
///
/// Each occurrence `o` of an in-network token with positive window weight
/// `w_o` contributes mass `g_o = w_o * s(token)`. The window seeds the
/// network with strength `g_o^2 / G` per occurrence (`G` the sum of all
/// `g_o`, duplicate tokens accumulating on their node), activation runs, and
/// the result is the weighted activity the window recovers:
/// `sum over o of g_o * a(node(o))` (or `s(token) * a(node(o))` under
/// [`SumWeighting::Flat`]).
///
/// A window with no usable occurrence (nothing in-network, or all weights
/// zero) scores 0.0: that is a vocabulary-coverage signal, not an error.
pub fn cohesiveness(
    network: &SemanticNetwork,
    table: &SignificanceTable,
    window: &[(&str, f64)],
    params: &CohesionParams,
) -> f64 {
    let mut kept: Vec<(usize, f64, f64)> = Vec::with_capacity(window.len());
    for &(token, window_weight) in window {
        if window_weight <= 0.0 {
            continue;
        }
        let Some(node) = network.lookup(token) else {
            continue;
        };
        let significance = table.significance(token);
        let mass = window_weight * significance;
        if mass > 0.0 {
            kept.push((node.index(), mass, significance));
        }
    }
    if kept.is_empty() {
        return 0.0;
    }

    let total_mass: f64 = kept.iter().map(|&(_, mass, _)| mass).sum();
    let seeds = SeedSet::from_nodes(
        network,
        kept.iter()
            .map(|&(node, mass, _)| (crate::lexnet::NodeId::from_index(node), mass * mass / total_mass)),
    )
    .expect("kept occurrences all have positive mass");
    let pattern = activate(network, &seeds, &params.activation);

    kept.iter()
        .map(|&(node, mass, significance)| {
            let output_weight = match params.sum_weighting {
                SumWeighting::Shaped => mass,
                SumWeighting::Flat => significance,
            };
            output_weight * pattern.values()[node]
        })
        .sum()
}

/// Diagnostics from a profile run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LcpStats {
    /// Positions whose window held no usable token (scored 0.0).
    pub empty_windows: usize,
}

/// Computes the full cohesion series for a text, one window per position.
///
/// Positions are independent, so windows are evaluated in parallel on the
/// current rayon pool; the output is position-ordered and identical for any
/// thread count.
pub fn compute_lcp(
    tokens: &TokenSequence,
    network: &SemanticNetwork,
    table: &SignificanceTable,
    window: &WindowSpec,
    params: &CohesionParams,
) -> Result<LcpSeries, LcpError> {
    compute_lcp_with_stats(tokens, network, table, window, params).map(|(series, _)| series)
}

/// [`compute_lcp`] plus run diagnostics.
pub fn compute_lcp_with_stats(
    tokens: &TokenSequence,
    network: &SemanticNetwork,
    table: &SignificanceTable,
    window: &WindowSpec,
    params: &CohesionParams,
) -> Result<(LcpSeries, LcpStats), LcpError> {
    if tokens.is_empty() {
        return Err(LcpError::EmptyText);
    }
    let len = tokens.len();
    let scored: Vec<(f64, bool)> = (1..=len)
        .into_par_iter()
        .map(|position| {
            let (left, right) = clamped_bounds(position, window.half_width(), len);
            let pairs: Vec<(&str, f64)> = (left..=right)
                .map(|p| {
                    let offset = p as i64 - position as i64;
                    (tokens.token(p), window.weight_unchecked(offset))
                })
                .collect();
            let value = cohesiveness(network, table, &pairs, params);
            (value, value == 0.0)
        })
        .collect();

    let empty_windows = scored.iter().filter(|&&(_, empty)| empty).count();
    let values = scored.into_iter().map(|(value, _)| value).collect();
    Ok((LcpSeries::from_values(values), LcpStats { empty_windows }))
}

/// Writes `position<TAB>token<TAB>value` lines, one per position.
pub fn write_series_tsv<W: Write>(
    writer: &mut W,
    tokens: &TokenSequence,
    series: &LcpSeries,
) -> io::Result<()> {
    assert_eq!(
        tokens.len(),
        series.len(),
        "series does not cover the token sequence"
    );
    for (index, (token, value)) in tokens.tokens().iter().zip(series.values()).enumerate() {
        writeln!(writer, "{}\t{token}\t{value:.9}", index + 1)?;
    }
    Ok(())
}

/// Writes the series as a JSON array of numbers.
pub fn write_series_json<W: Write>(writer: &mut W, series: &LcpSeries) -> io::Result<()> {
    serde_json::to_writer(writer, &series.values)?;
    Ok(())
}
