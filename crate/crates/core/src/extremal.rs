//! Exact extremal numbers `ex(n, A)` at desk scale, random lower bounds, and
//! the certificates that record them.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::containment::{find_embedding, find_embedding_through, search};
use crate::error::{Error, Result};
use crate::matrix::Matrix01;
use crate::pattern::Pattern;

/// Default node budget for [`ex_exact`].
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// [`ex_exact`] uses exhaustive mode up to this `n`.
pub const EXHAUSTIVE_MAX_N: usize = 4;
/// Largest `n` accepted by [`ex_exhaustive`].
pub const EXHAUSTIVE_LIMIT_N: usize = 6;

/// Largest `n` accepted by [`monotone_checks`].
pub const MONOTONE_MAX_N: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProofMode {
    Exhaustive,
    BranchAndBound,
    LowerBoundOnly,
}

impl ProofMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ProofMode::Exhaustive => "exhaustive",
            ProofMode::BranchAndBound => "branch-and-bound",
            ProofMode::LowerBoundOnly => "lower-bound-only",
        }
    }
}

impl fmt::Display for ProofMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProofMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(ProofMode::Exhaustive),
            "branch-and-bound" => Ok(ProofMode::BranchAndBound),
            "lower-bound-only" => Ok(ProofMode::LowerBoundOnly),
            other => Err(Error::arg(format!("unknown proof mode {other:?}"))),
        }
    }
}

/// A witness that `ex(n, A) >= value`, and for the exact modes a record
/// that no heavier `n x n` matrix avoids `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalCertificate {
    pub n: usize,
    pub pattern: Pattern,
    pub value: usize,
    pub witness: Matrix01,
    pub mode: ProofMode,
    /// Search nodes spent (matrices enumerated, branch-and-bound nodes, or
    /// random trials).
    pub nodes: u64,
}

impl ExtremalCertificate {
    /// Check the witness: `n x n`, weight equal to `value`, avoids the
    /// pattern.
    pub fn validate(&self) -> Result<()> {
        if self.witness.dims() != (self.n, self.n) {
            return Err(Error::arg(format!(
                "witness is {}x{}, expected {n}x{n}",
                self.witness.n_rows(),
                self.witness.n_cols(),
                n = self.n
            )));
        }
        if self.witness.weight() != self.value {
            return Err(Error::arg(format!(
                "witness weight {} differs from claimed value {}",
                self.witness.weight(),
                self.value
            )));
        }
        if find_embedding(&self.witness, &self.pattern)?.is_some() {
            return Err(Error::arg("witness contains the pattern"));
        }
        Ok(())
    }

    /// Structured text: `key: value` header lines, then the pattern and the
    /// witness as `.zom` blocks.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("format: zomat-certificate-v1\n");
        out.push_str(&format!("n: {}\n", self.n));
        out.push_str(&format!("value: {}\n", self.value));
        out.push_str(&format!("mode: {}\n", self.mode));
        out.push_str(&format!("nodes: {}\n", self.nodes));
        if let Some(cut) = self.pattern.column_cut() {
            let cut: Vec<String> = cut.iter().map(|w| w.to_string()).collect();
            out.push_str(&format!("cut: {}\n", cut.join(",")));
        }
        out.push_str("--- pattern\n");
        out.push_str(&self.pattern.matrix().to_zom());
        out.push_str("--- witness\n");
        out.push_str(&self.witness.to_zom());
        out
    }

    /// Parse [`to_text`](Self::to_text) output and re-validate the witness.
    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().collect();
        let pat_at = lines
            .iter()
            .position(|l| *l == "--- pattern")
            .ok_or_else(|| Error::format(lines.len(), "missing '--- pattern' section"))?;
        let wit_at = lines
            .iter()
            .position(|l| *l == "--- witness")
            .filter(|&w| w > pat_at)
            .ok_or_else(|| Error::format(lines.len(), "missing '--- witness' section"))?;

        let mut n = None;
        let mut value = None;
        let mut mode = None;
        let mut nodes = 0;
        let mut cut = None;
        for (idx, line) in lines[..pat_at].iter().enumerate() {
            let (key, val) = line
                .split_once(": ")
                .ok_or_else(|| Error::format(idx + 1, "expected 'key: value'"))?;
            let num = || {
                val.parse::<usize>()
                    .map_err(|_| Error::format(idx + 1, format!("bad number {val:?}")))
            };
            match key {
                "format" if val == "zomat-certificate-v1" => {}
                "format" => return Err(Error::format(idx + 1, format!("unknown format {val:?}"))),
                "n" => n = Some(num()?),
                "value" => value = Some(num()?),
                "mode" => mode = Some(val.parse::<ProofMode>()?),
                "nodes" => nodes = num()? as u64,
                "cut" => {
                    let widths = val
                        .split(',')
                        .map(|w| w.parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| Error::format(idx + 1, format!("bad cut {val:?}")))?;
                    cut = Some(widths);
                }
                other => return Err(Error::format(idx + 1, format!("unknown key {other:?}"))),
            }
        }
        let block = |from: usize, to: usize| -> Result<Matrix01> {
            let mut s = lines[from..to].join("\n");
            s.push('\n');
            Matrix01::parse_zom(&s).map_err(|e| match e {
                Error::Format { line, msg } => Error::format(from + line, msg),
                other => other,
            })
        };
        let pattern_matrix = block(pat_at + 1, wit_at)?;
        let pattern = match cut {
            Some(widths) => Pattern::with_cut(pattern_matrix, widths)?,
            None => Pattern::new(pattern_matrix)?,
        };
        let cert = ExtremalCertificate {
            n: n.ok_or_else(|| Error::format(1, "missing n"))?,
            pattern,
            value: value.ok_or_else(|| Error::format(1, "missing value"))?,
            witness: block(wit_at + 1, lines.len())?,
            mode: mode.ok_or_else(|| Error::format(1, "missing mode"))?,
            nodes,
        };
        cert.validate()?;
        Ok(cert)
    }
}

fn check_pattern(n: usize, pattern: &Pattern) -> Result<()> {
    if n == 0 {
        return Err(Error::arg("n must be at least 1"));
    }
    if pattern.is_empty() {
        return Err(Error::arg("pattern must have at least one row and one column"));
    }
    if pattern.t() == 0 && pattern.rows() <= n && pattern.cols() <= n {
        return Err(Error::arg(format!(
            "a pattern without 1-entries is contained in every {n}x{n} matrix"
        )));
    }
    Ok(())
}

/// `ex(n, A)`: exhaustive enumeration for `n <= 4`, branch-and-bound above.
///
/// If the branch-and-bound search runs out of `budget` nodes the error
/// carries the heaviest avoiding matrix found.
pub fn ex_exact(n: usize, pattern: &Pattern, budget: u64) -> Result<ExtremalCertificate> {
    if n <= EXHAUSTIVE_MAX_N {
        ex_exhaustive(n, pattern, budget)
    } else {
        ex_branch_and_bound(n, pattern, budget)
    }
}

/// Enumerate every avoiding `n x n` matrix row by row and keep the first
/// heaviest one (rows compared as bit masks, in increasing order).
///
/// A row prefix that contains the pattern is never extended, since every
/// completion contains it too. Nothing else is pruned, so the result does
/// not depend on any weight bound. Each visited prefix counts as a node.
pub fn ex_exhaustive(n: usize, pattern: &Pattern, budget: u64) -> Result<ExtremalCertificate> {
    check_pattern(n, pattern)?;
    if n > EXHAUSTIVE_LIMIT_N {
        return Err(Error::arg(format!(
            "exhaustive mode supports n <= {EXHAUSTIVE_LIMIT_N}, got {n}"
        )));
    }
    let mut search = RowEnumeration {
        n,
        pattern: pattern.matrix(),
        budget,
        nodes: 0,
        cur: Matrix01::zeros(n, n),
        best: Matrix01::zeros(n, n),
        best_weight: None,
    };
    let complete = search.visit(0, 0);
    let best = search.best;
    let cert = ExtremalCertificate {
        n,
        pattern: pattern.clone(),
        value: best.weight(),
        witness: best,
        mode: if complete.is_ok() {
            ProofMode::Exhaustive
        } else {
            ProofMode::LowerBoundOnly
        },
        nodes: search.nodes,
    };
    cert.validate()?;
    match complete {
        Ok(()) => Ok(cert),
        Err(()) => Err(Error::BudgetExhausted {
            budget,
            best: Box::new(cert),
        }),
    }
}

struct RowEnumeration<'a> {
    n: usize,
    pattern: &'a Matrix01,
    budget: u64,
    nodes: u64,
    cur: Matrix01,
    best: Matrix01,
    best_weight: Option<usize>,
}

impl RowEnumeration<'_> {
    fn visit(&mut self, row: usize, weight: usize) -> Result<(), ()> {
        if row == self.n {
            if self.best_weight.is_none_or(|w| weight > w) {
                self.best_weight = Some(weight);
                self.best = self.cur.clone();
            }
            return Ok(());
        }
        for mask in 0u64..(1u64 << self.n) {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(());
            }
            for j in 0..self.n {
                self.cur.set(row, j, mask >> j & 1 == 1);
            }
            let prefix = self.cur.submatrix(&(0..=row).collect::<Vec<_>>(), &(0..self.n).collect::<Vec<_>>());
            if search(&prefix, self.pattern, None).is_none() {
                self.visit(row + 1, weight + mask.count_ones() as usize)?;
            }
        }
        for j in 0..self.n {
            self.cur.set(row, j, false);
        }
        Ok(())
    }
}

/// Branch-and-bound over the cells in row-major order, trying 1 before 0.
///
/// The bound uses the fact that any set of consecutive rows of an avoiding
/// matrix is itself avoiding: the optimum for every shorter `k x n` strip is
/// computed first and caps what the unfilled rows can still contribute.
pub fn ex_branch_and_bound(n: usize, pattern: &Pattern, budget: u64) -> Result<ExtremalCertificate> {
    check_pattern(n, pattern)?;
    let mut nodes = 0u64;
    // strip[k] = max weight of a k x n matrix avoiding the pattern
    let mut strip = vec![0usize];
    let mut witness = Matrix01::zeros(0, n);
    for rows in 1..=n {
        let (outcome, used, best_weight, best) = {
            let mut bb = StripSearch::new(rows, n, pattern.matrix(), &strip, budget - nodes.min(budget));
            let outcome = bb.run();
            (outcome, bb.nodes, bb.best_weight, bb.best)
        };
        nodes += used;
        match outcome {
            Ok(()) => {
                strip.push(best_weight);
                witness = best;
            }
            Err(()) => {
                // heaviest strip seen so far, padded with zero rows
                let best = if best.weight() >= witness.weight() {
                    best.pad_rows(n)
                } else {
                    witness.pad_rows(n)
                };
                let cert = ExtremalCertificate {
                    n,
                    pattern: pattern.clone(),
                    value: best.weight(),
                    witness: best,
                    mode: ProofMode::LowerBoundOnly,
                    nodes,
                };
                cert.validate()?;
                return Err(Error::BudgetExhausted {
                    budget,
                    best: Box::new(cert),
                });
            }
        }
    }
    let cert = ExtremalCertificate {
        n,
        pattern: pattern.clone(),
        value: strip[n],
        witness,
        mode: ProofMode::BranchAndBound,
        nodes,
    };
    cert.validate()?;
    Ok(cert)
}

struct StripSearch<'a> {
    rows: usize,
    cols: usize,
    pattern: &'a Matrix01,
    strip: &'a [usize],
    budget: u64,
    nodes: u64,
    cur: Matrix01,
    row_weight: Vec<usize>,
    best: Matrix01,
    best_weight: usize,
}

impl<'a> StripSearch<'a> {
    fn new(rows: usize, cols: usize, pattern: &'a Matrix01, strip: &'a [usize], budget: u64) -> Self {
        StripSearch {
            rows,
            cols,
            pattern,
            strip,
            budget,
            nodes: 0,
            cur: Matrix01::zeros(rows, cols),
            row_weight: vec![0; rows],
            best: Matrix01::zeros(rows, cols),
            best_weight: 0,
        }
    }

    fn run(&mut self) -> Result<(), ()> {
        self.visit(0, 0)
    }

    /// Upper bound on the weight of any completion from cell `idx`.
    fn bound(&self, idx: usize, weight: usize) -> usize {
        let (i, j) = (idx / self.cols, idx % self.cols);
        if i == self.rows {
            return weight;
        }
        let above: usize = self.row_weight[..i].iter().sum();
        let below = self.rows - i - 1;
        let this_row = self.row_weight[i] + (self.cols - j) + self.strip[below];
        // rows i.. form a shorter strip once i > 0
        match self.strip.get(self.rows - i) {
            Some(&cap) => above + this_row.min(cap),
            None => above + this_row,
        }
    }

    fn visit(&mut self, idx: usize, weight: usize) -> Result<(), ()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(());
        }
        if idx == self.rows * self.cols {
            if weight > self.best_weight {
                self.best_weight = weight;
                self.best = self.cur.clone();
            }
            return Ok(());
        }
        if self.bound(idx, weight) <= self.best_weight {
            return Ok(());
        }
        let (i, j) = (idx / self.cols, idx % self.cols);
        self.cur.set(i, j, true);
        if find_embedding_through(&self.cur, self.pattern, (i, j)).is_none() {
            self.row_weight[i] += 1;
            let res = self.visit(idx + 1, weight + 1);
            self.row_weight[i] -= 1;
            res?;
        }
        self.cur.set(i, j, false);
        if self.bound(idx + 1, weight) <= self.best_weight {
            return Ok(());
        }
        self.visit(idx + 1, weight)
    }
}

/// Random construction with deletion: sample each entry with probability
/// `density`, then delete one 1-entry from each copy of the pattern until
/// none is left. Keeps the heaviest result over `trials`.
pub fn ex_lower_random(
    n: usize,
    pattern: &Pattern,
    density: f64,
    trials: usize,
    seed: u64,
) -> Result<ExtremalCertificate> {
    check_pattern(n, pattern)?;
    if trials == 0 {
        return Err(Error::arg("trials must be at least 1"));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::arg(format!("density {density} outside [0, 1]")));
    }
    // None only for patterns that cannot fit, which nothing contains
    let first_one = pattern.matrix().ones_iter().next();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = Matrix01::zeros(n, n);
    for _ in 0..trials {
        let mut m = Matrix01::random(n, n, density, &mut rng);
        if let Some((u, y)) = first_one {
            while let Some(copy) = search(&m, pattern.matrix(), None) {
                m.set(copy.row_map[u], copy.col_map[y], false);
            }
        }
        if m.weight() > best.weight() {
            best = m;
        }
    }
    let cert = ExtremalCertificate {
        n,
        pattern: pattern.clone(),
        value: best.weight(),
        witness: best,
        mode: ProofMode::LowerBoundOnly,
        nodes: trials as u64,
    };
    cert.validate()?;
    Ok(cert)
}

/// Check two sanity laws at `n <= 5`: `ex(., A)` and `ex(., A')` are
/// nondecreasing from `n` to `n + 1`, and if `A` contains `A'` then
/// `ex(n, A') <= ex(n, A)`.
pub fn monotone_checks(a: &Pattern, a_prime: &Pattern, n: usize) -> Result<bool> {
    if n == 0 || n > MONOTONE_MAX_N {
        return Err(Error::arg(format!(
            "monotone checks need 1 <= n <= {MONOTONE_MAX_N}, got {n}"
        )));
    }
    let ex = |p: &Pattern, n: usize| ex_exact(n, p, DEFAULT_BUDGET).map(|c| c.value);
    let ex_a = ex(a, n)?;
    let nondecreasing = ex_a <= ex(a, n + 1)? && ex(a_prime, n)? <= ex(a_prime, n + 1)?;
    let sub_pattern_law = if find_embedding(a.matrix(), a_prime)?.is_some() {
        ex(a_prime, n)? <= ex_a
    } else {
        true
    };
    Ok(nondecreasing && sub_pattern_law)
}
