//! The block-refinement embedding procedure.
//!
//! Pick a base row `r` and let `C` be its 1-columns. Refine the rows by
//! base-`k` digits over `s` steps, keeping the block that contains `r`.
//! A `t`-set of `C` shrinks at a step when one of its common rows is cut
//! away, above or below the surviving block. Sets with at least `2a`
//! shrinking steps get a color `(z, J)`. A column set whose `t`-subsets all
//! share a color then hosts the pattern, one row per step of `J`.
//!
//! The existence arguments behind this are asymptotic, so every stage here
//! is an exact bounded search that may fail. When it does, the pipeline
//! retries with other base rows and finally falls back to
//! [`find_embedding`].

pub mod assemble;
pub mod classify;
pub mod extract;
pub mod params;
pub mod select;
pub mod stats;
pub mod trace;
pub mod tree;

use std::collections::BTreeSet;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::containment::find_embedding;
use crate::error::{Error, Result};
use crate::matrix::Matrix01;
use crate::pattern::{Embedding, Pattern};

use assemble::assemble_embedding;
use classify::classify_steps;
use extract::{extract_monochromatic, extract_product, DEFAULT_EXTRACT_BUDGET};
use params::ProcessParams;
use select::{select_base_row_excluding, BaseRow};
use trace::{Attempt, AttemptResult, StepTrace, TrackedSet};

pub const DEFAULT_EPSILON: f64 = 0.05;
pub const DEFAULT_RETRIES: usize = 32;

/// Make every row have exactly `t` ones by appending columns on the right,
/// each holding a single 1 in a deficient row.
pub fn pad_pattern(pattern: &Pattern) -> Pattern {
    let a = pattern.matrix();
    let t = pattern.t();
    let deficits: Vec<usize> = (0..a.n_rows()).map(|u| t - a.row_weight(u)).collect();
    let extra: usize = deficits.iter().sum();
    if extra == 0 {
        return pattern.clone();
    }
    let mut out = Matrix01::zeros(a.n_rows(), a.n_cols() + extra);
    for (u, y) in a.ones_iter() {
        out.set(u, y, true);
    }
    let mut next = a.n_cols();
    for (u, &d) in deficits.iter().enumerate() {
        for _ in 0..d {
            out.set(u, next, true);
            next += 1;
        }
    }
    Pattern::unchecked(out, None)
}

/// Padding that keeps a column cut: in each part, a row without a 1 gets a
/// new column appended to that part. Returns the padded pattern and the
/// padded position of every original column.
pub fn pad_partite(pattern: &Pattern) -> Result<(Pattern, Vec<usize>)> {
    let widths = pattern
        .column_cut()
        .ok_or_else(|| Error::arg("pattern has no column cut"))?;
    let a = pattern.matrix();
    let mut cells = Vec::new();
    let mut positions = Vec::with_capacity(a.n_cols());
    let mut new_widths = Vec::with_capacity(widths.len());
    let (mut start, mut next) = (0, 0);
    for &w in widths {
        let part_start = next;
        for y in start..start + w {
            positions.push(next);
            cells.extend((0..a.n_rows()).filter(|&u| a.get(u, y)).map(|u| (u, next)));
            next += 1;
        }
        for u in 0..a.n_rows() {
            if !(start..start + w).any(|y| a.get(u, y)) {
                cells.push((u, next));
                next += 1;
            }
        }
        new_widths.push(next - part_start);
        start += w;
    }
    let mut out = Matrix01::zeros(a.n_rows(), next);
    for (u, y) in cells {
        out.set(u, y, true);
    }
    Ok((Pattern::unchecked(out, Some(new_widths)), positions))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbedPath {
    Pipeline,
    Fallback,
    NotFound,
}

impl EmbedPath {
    pub fn as_str(self) -> &'static str {
        match self {
            EmbedPath::Pipeline => "pipeline",
            EmbedPath::Fallback => "fallback",
            EmbedPath::NotFound => "not-found",
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub embedding: Option<Embedding>,
    pub path: EmbedPath,
    pub trace: StepTrace,
}

/// How the padded pattern's columns are extracted.
enum Shape {
    General,
    Partite { widths: Vec<usize> },
}

/// Run the procedure with `s = ceil(4a / epsilon)` and the least `k` with
/// `k^s >= n`, trying up to `retries` base-row selections before falling
/// back to the direct search.
pub fn embed_via_pipeline(
    m: &Matrix01,
    pattern: &Pattern,
    epsilon: f64,
    seed: u64,
    retries: usize,
) -> Result<PipelineOutcome> {
    check_inputs(m, pattern)?;
    let params = ProcessParams::general(m.n_rows(), pattern.rows(), epsilon, seed)?;
    let padded = pad_pattern(pattern);
    let restore: Vec<usize> = (0..pattern.cols()).collect();
    run(m, pattern, &padded, &restore, Shape::General, params, retries)
}

/// The column-t-partite variant: `k = 2`, `s = ceil(log2 n)`, and product
/// extraction over consecutive column groups.
pub fn embed_column_t_partite(m: &Matrix01, pattern: &Pattern, seed: u64, retries: usize) -> Result<PipelineOutcome> {
    check_inputs(m, pattern)?;
    let (padded, restore) = pad_partite(pattern)?;
    let widths = padded.column_cut().expect("padding keeps the cut").to_vec();
    let params = ProcessParams::column_partite(m.n_rows(), seed);
    run(m, pattern, &padded, &restore, Shape::Partite { widths }, params, retries)
}

fn check_inputs(m: &Matrix01, pattern: &Pattern) -> Result<()> {
    if pattern.is_empty() {
        return Err(Error::arg("pattern must have at least one row and one column"));
    }
    if !m.is_square() || m.n_rows() == 0 {
        return Err(Error::arg(format!("host must be square and nonempty, got {}x{}", m.n_rows(), m.n_cols())));
    }
    Ok(())
}

fn run(
    m: &Matrix01,
    pattern: &Pattern,
    padded: &Pattern,
    restore: &[usize],
    shape: Shape,
    params: ProcessParams,
    retries: usize,
) -> Result<PipelineOutcome> {
    let n = m.n_rows();
    let (t, a) = (padded.t(), padded.rows());
    let mut trace = StepTrace::new(n, params.k, params.s);
    if t > 0 && m.weight() > 0 {
        let mut master = ChaCha8Rng::seed_from_u64(params.seed);
        let mut tried = BTreeSet::new();
        for _ in 0..retries {
            let seed = master.next_u64();
            let base = match select_base_row_excluding(m, t, a, &params.with_seed(seed), &tried) {
                Ok(base) => base,
                Err(Error::NoBaseRow) => {
                    trace.attempts.push(Attempt {
                        seed,
                        r: None,
                        c_size: 0,
                        good: 0,
                        bad: 0,
                        result: AttemptResult::NoBaseRow,
                    });
                    break;
                }
                Err(e) => return Err(e),
            };
            tried.insert(base.r);
            record_base(&mut trace, &base);
            let found = attempt(m, padded, &shape, &base)?;
            trace.attempts.push(Attempt {
                seed,
                r: Some(base.r),
                c_size: base.columns.len(),
                good: base.good(),
                bad: base.bad,
                result: if found.is_some() {
                    AttemptResult::Embedded
                } else {
                    AttemptResult::ExtractionFailed
                },
            });
            match found {
                Some((e, used)) => {
                    trace.tracked = track(m, &base, &used, &params)?;
                    let e = Embedding::new(e.row_map, restore.iter().map(|&q| e.col_map[q]).collect());
                    e.validate(m, pattern.matrix())
                        .map_err(|err| Error::Internal(format!("restricted embedding is invalid: {err}")))?;
                    trace.outcome = EmbedPath::Pipeline.as_str().into();
                    return Ok(PipelineOutcome {
                        embedding: Some(e),
                        path: EmbedPath::Pipeline,
                        trace,
                    });
                }
                None => {
                    let sample: Vec<Vec<usize>> = base.colors.keys().take(a).cloned().collect();
                    trace.tracked = track(m, &base, &sample, &params)?;
                }
            }
        }
    }
    let embedding = find_embedding(m, pattern)?;
    let path = if embedding.is_some() {
        EmbedPath::Fallback
    } else {
        EmbedPath::NotFound
    };
    trace.outcome = path.as_str().into();
    Ok(PipelineOutcome { embedding, path, trace })
}

/// One extraction and assembly attempt on a chosen base row. On success
/// also returns the `t`-sets that the pattern rows used.
fn attempt(
    m: &Matrix01,
    padded: &Pattern,
    shape: &Shape,
    base: &BaseRow,
) -> Result<Option<(Embedding, Vec<Vec<usize>>)>> {
    let (t, b) = (padded.t(), padded.cols());
    let picked = match shape {
        Shape::General => extract_monochromatic(&base.colors, &base.columns, t, b, DEFAULT_EXTRACT_BUDGET),
        Shape::Partite { widths } => extract_product(&base.colors, &base.columns, widths, DEFAULT_EXTRACT_BUDGET)
            .map(|(c, parts)| (c, parts.concat())),
    };
    let Some((color, columns)) = picked else {
        return Ok(None);
    };
    let e = assemble_embedding(m, padded.matrix(), &base.chain, &columns, &color)?;
    let used = (0..padded.rows())
        .map(|u| padded.row_support(u).into_iter().map(|y| columns[y]).collect())
        .collect();
    Ok(Some((e, used)))
}

fn record_base(trace: &mut StepTrace, base: &BaseRow) {
    trace.r = Some(base.r);
    trace.columns = base.columns.clone();
    trace.blocks = (0..=base.chain.steps())
        .map(|j| {
            let b = base.chain.block(j);
            (b.start, b.end)
        })
        .collect();
    trace.histogram = base.shrink_histogram.clone();
}

fn track(m: &Matrix01, base: &BaseRow, sets: &[Vec<usize>], params: &ProcessParams) -> Result<Vec<TrackedSet>> {
    let mut out: Vec<TrackedSet> = Vec::new();
    for e in sets {
        if out.iter().any(|t| &t.columns == e) {
            continue;
        }
        let c = classify_steps(m, base.r, e, params)?;
        out.push(TrackedSet {
            columns: e.clone(),
            steps: c.steps,
            counts: c.counts[1..].to_vec(),
        });
    }
    Ok(out)
}
