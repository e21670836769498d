//! Records of pipeline runs and their line-oriented text format.
//!
//! ```text
//! format: zomat-trace-v1
//! n: 16
//! k: 2
//! s: 4
//! outcome: pipeline
//! r: 5
//! columns: 0,1,2
//! block 0 0 16
//! attempt 0 seed=123 r=5 c=16 good=120 bad=0 result=embedded
//! histogram 4 120
//! event 0,1 1 shrinking down 16
//! event 0,1 2 non-shrinking - 8
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pipeline::classify::{StepType, Subtype};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttemptResult {
    Embedded,
    ExtractionFailed,
    NoBaseRow,
}

impl AttemptResult {
    pub fn as_str(self) -> &'static str {
        match self {
            AttemptResult::Embedded => "embedded",
            AttemptResult::ExtractionFailed => "extraction-failed",
            AttemptResult::NoBaseRow => "no-base-row",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "embedded" => AttemptResult::Embedded,
            "extraction-failed" => AttemptResult::ExtractionFailed,
            "no-base-row" => AttemptResult::NoBaseRow,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attempt {
    pub seed: u64,
    pub r: Option<usize>,
    pub c_size: usize,
    pub good: usize,
    pub bad: usize,
    pub result: AttemptResult,
}

/// Step types and block counts of one tracked column set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackedSet {
    pub columns: Vec<usize>,
    /// `steps[j - 1]` is the type of step `j`.
    pub steps: Vec<StepType>,
    /// `counts[j - 1]` is `N_j`.
    pub counts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepTrace {
    pub n: usize,
    pub k: usize,
    pub s: usize,
    /// `pipeline`, `fallback` or `not-found`.
    pub outcome: String,
    /// Base row of the last attempt that got one.
    pub r: Option<usize>,
    /// `C` for that row.
    pub columns: Vec<usize>,
    /// `R_j = lo..hi` for `j = 0..=s`.
    pub blocks: Vec<(usize, usize)>,
    pub attempts: Vec<Attempt>,
    /// Shrinking-step count -> number of `t`-sets of `C`.
    pub histogram: BTreeMap<usize, usize>,
    pub tracked: Vec<TrackedSet>,
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

impl StepTrace {
    pub fn new(n: usize, k: usize, s: usize) -> Self {
        StepTrace {
            n,
            k,
            s,
            outcome: String::new(),
            r: None,
            columns: Vec::new(),
            blocks: Vec::new(),
            attempts: Vec::new(),
            histogram: BTreeMap::new(),
            tracked: Vec::new(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "format: zomat-trace-v1");
        let _ = writeln!(out, "n: {}", self.n);
        let _ = writeln!(out, "k: {}", self.k);
        let _ = writeln!(out, "s: {}", self.s);
        let _ = writeln!(out, "outcome: {}", self.outcome);
        match self.r {
            Some(r) => writeln!(out, "r: {r}"),
            None => writeln!(out, "r: -"),
        }
        .unwrap();
        let _ = writeln!(out, "columns: {}", join(&self.columns));
        for (j, (lo, hi)) in self.blocks.iter().enumerate() {
            let _ = writeln!(out, "block {j} {lo} {hi}");
        }
        for (i, at) in self.attempts.iter().enumerate() {
            let r = at.r.map_or("-".to_string(), |r| r.to_string());
            let _ = writeln!(
                out,
                "attempt {i} seed={} r={r} c={} good={} bad={} result={}",
                at.seed,
                at.c_size,
                at.good,
                at.bad,
                at.result.as_str()
            );
        }
        for (count, num) in &self.histogram {
            let _ = writeln!(out, "histogram {count} {num}");
        }
        for set in &self.tracked {
            let cols = join(&set.columns);
            for (i, (ty, n_j)) in set.steps.iter().zip(&set.counts).enumerate() {
                let (kind, sub) = match ty {
                    StepType::NonShrinking => ("non-shrinking", "-"),
                    StepType::Shrinking(z) => ("shrinking", z.as_str()),
                };
                let _ = writeln!(out, "event {cols} {} {kind} {sub} {n_j}", i + 1);
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut trace = StepTrace::new(0, 0, 0);
        let mut saw_header = false;
        for (idx, line) in text.lines().enumerate() {
            let ln = idx + 1;
            let bad = |msg: &str| Error::format(ln, format!("{msg}: {line:?}"));
            if let Some((key, value)) = line.split_once(": ") {
                match key {
                    "format" if value == "zomat-trace-v1" => saw_header = true,
                    "n" => trace.n = num(value).ok_or_else(|| bad("bad n"))?,
                    "k" => trace.k = num(value).ok_or_else(|| bad("bad k"))?,
                    "s" => trace.s = num(value).ok_or_else(|| bad("bad s"))?,
                    "outcome" => trace.outcome = value.to_string(),
                    "r" => trace.r = opt_num(value).ok_or_else(|| bad("bad r"))?,
                    "columns" => trace.columns = list(value).ok_or_else(|| bad("bad columns"))?,
                    _ => return Err(bad("unknown header")),
                }
                continue;
            }
            if line == "columns:" {
                continue;
            }
            let fields: Vec<&str> = line.split(' ').collect();
            match fields.as_slice() {
                ["block", _, lo, hi] => {
                    let pair = num(lo).zip(num(hi)).ok_or_else(|| bad("bad block"))?;
                    trace.blocks.push(pair);
                }
                ["attempt", _, rest @ ..] => {
                    let kv: BTreeMap<&str, &str> = rest.iter().filter_map(|f| f.split_once('=')).collect();
                    let get = |k: &str| kv.get(k).copied().ok_or_else(|| bad("missing attempt field"));
                    trace.attempts.push(Attempt {
                        seed: get("seed")?.parse().map_err(|_| bad("bad seed"))?,
                        r: opt_num(get("r")?).ok_or_else(|| bad("bad r"))?,
                        c_size: num(get("c")?).ok_or_else(|| bad("bad c"))?,
                        good: num(get("good")?).ok_or_else(|| bad("bad good"))?,
                        bad: num(get("bad")?).ok_or_else(|| bad("bad bad"))?,
                        result: AttemptResult::parse(get("result")?).ok_or_else(|| bad("bad result"))?,
                    });
                }
                ["histogram", count, n] => {
                    let (c, n) = num(count).zip(num(n)).ok_or_else(|| bad("bad histogram"))?;
                    trace.histogram.insert(c, n);
                }
                ["event", cols, j, kind, sub, n_j] => {
                    let cols = list(cols).ok_or_else(|| bad("bad columns"))?;
                    let j = num(j).ok_or_else(|| bad("bad step"))?;
                    let ty = match (*kind, *sub) {
                        ("non-shrinking", "-") => StepType::NonShrinking,
                        ("shrinking", "up") => StepType::Shrinking(Subtype::Up),
                        ("shrinking", "down") => StepType::Shrinking(Subtype::Down),
                        _ => return Err(bad("bad step type")),
                    };
                    let n_j = num(n_j).ok_or_else(|| bad("bad count"))?;
                    if trace.tracked.last().is_none_or(|t| t.columns != cols) {
                        trace.tracked.push(TrackedSet {
                            columns: cols,
                            steps: Vec::new(),
                            counts: Vec::new(),
                        });
                    }
                    let set = trace.tracked.last_mut().expect("just pushed");
                    if j != set.steps.len() + 1 {
                        return Err(bad("steps out of order"));
                    }
                    set.steps.push(ty);
                    set.counts.push(n_j);
                }
                _ => return Err(bad("unrecognized line")),
            }
        }
        if !saw_header {
            return Err(Error::format(1, "missing format header"));
        }
        Ok(trace)
    }
}

fn num(s: &str) -> Option<usize> {
    s.parse().ok()
}

fn opt_num(s: &str) -> Option<Option<usize>> {
    if s == "-" {
        Some(None)
    } else {
        num(s).map(Some)
    }
}

fn list(s: &str) -> Option<Vec<usize>> {
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(num).collect()
}
