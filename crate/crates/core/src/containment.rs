//! Ordered containment: does `M` contain `A` after deleting rows and
//! columns and turning some 1s into 0s?
//!
//! [`find_embedding`] is a backtracking search that assigns pattern rows to
//! host rows top-down. For every pattern column it keeps the set of host
//! columns still compatible with the rows placed so far (an AND of packed
//! host rows), and prunes as soon as those sets no longer admit a strictly
//! increasing choice of representatives. [`oracle_contains`] is an
//! independent brute-force check used to validate the search.

use itertools::Itertools;

use crate::bits;
use crate::error::{Error, Result};
use crate::matrix::Matrix01;
use crate::pattern::{Embedding, Pattern};

/// Host matrix limit for [`oracle_contains`].
pub const ORACLE_MAX_HOST: usize = 6;
/// Pattern limit for [`oracle_contains`].
pub const ORACLE_MAX_PATTERN: usize = 4;

/// Search for an embedding of `pattern` into `m`.
///
/// The witness is deterministic: its row map is the lexicographically
/// smallest feasible one and its column map is the leftmost compatible
/// choice for that row map.
pub fn find_embedding(m: &Matrix01, pattern: &Pattern) -> Result<Option<Embedding>> {
    if pattern.is_empty() {
        return Err(Error::arg("pattern must have at least one row and one column"));
    }
    Ok(search(m, pattern.matrix(), None))
}

pub fn contains(m: &Matrix01, pattern: &Pattern) -> Result<bool> {
    find_embedding(m, pattern).map(|e| e.is_some())
}

/// Search for an embedding that uses the 1-entry of `m` at `cell` as the
/// image of some 1-entry of the pattern.
///
/// If `m` with `cell` cleared avoids the pattern, then `m` contains the
/// pattern exactly when this returns `Some`.
pub(crate) fn find_embedding_through(
    m: &Matrix01,
    pattern: &Matrix01,
    cell: (usize, usize),
) -> Option<Embedding> {
    let (i, j) = cell;
    if !m.get(i, j) {
        return None;
    }
    pattern
        .ones_iter()
        .find_map(|(u, y)| search(m, pattern, Some(Pin { u, i, y, j })))
}

/// Embedding search over a raw pattern matrix. Empty patterns trivially
/// embed when they fit.
pub(crate) fn search(m: &Matrix01, pattern: &Matrix01, pin: Option<Pin>) -> Option<Embedding> {
    let (a, b) = pattern.dims();
    if a > m.n_rows() || b > m.n_cols() {
        return None;
    }
    Search::new(m, pattern, pin).run()
}

/// Forces pattern row `u` onto host row `i` and pattern column `y` onto
/// host column `j`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Pin {
    u: usize,
    i: usize,
    y: usize,
    j: usize,
}

struct Search<'a> {
    m: &'a Matrix01,
    supports: Vec<Vec<usize>>,
    b: usize,
    stride: usize,
    // Level `u` holds b column sets of `stride` words each: the feasible
    // host columns after placing pattern rows 0..u.
    levels: Vec<Vec<u64>>,
    row_map: Vec<usize>,
    pin: Option<Pin>,
}

impl<'a> Search<'a> {
    fn new(m: &'a Matrix01, pattern: &Matrix01, pin: Option<Pin>) -> Self {
        let (a, b) = pattern.dims();
        let stride = m.stride();
        let mut base = vec![0u64; b * stride];
        for y in 0..b {
            let set = &mut base[y * stride..(y + 1) * stride];
            match pin {
                Some(p) if p.y == y => bits::set(set, p.j),
                _ => (0..m.n_cols()).for_each(|c| bits::set(set, c)),
            }
        }
        let levels = vec![base; a + 1];
        Search {
            m,
            supports: (0..a).map(|u| pattern.row_ones(u)).collect(),
            b,
            stride,
            levels,
            row_map: Vec::with_capacity(a),
            pin,
        }
    }

    fn run(mut self) -> Option<Embedding> {
        let cols = self.representatives(0)?;
        if self.supports.is_empty() {
            return Some(Embedding::new(Vec::new(), cols));
        }
        self.descend(0, 0)
    }

    /// Leftmost strictly increasing choice of one column per pattern column
    /// from the sets at `level`.
    fn representatives(&self, level: usize) -> Option<Vec<usize>> {
        let sets = &self.levels[level];
        let mut out = Vec::with_capacity(self.b);
        let mut from = 0;
        for y in 0..self.b {
            let c = bits::next_set(&sets[y * self.stride..(y + 1) * self.stride], from)?;
            out.push(c);
            from = c + 1;
        }
        Some(out)
    }

    fn descend(&mut self, u: usize, first_row: usize) -> Option<Embedding> {
        let a = self.supports.len();
        if u == a {
            let cols = self.representatives(a)?;
            return Some(Embedding::new(self.row_map.clone(), cols));
        }
        let mut lo = first_row;
        let mut hi = self.m.n_rows() - (a - u); // inclusive
        if let Some(p) = self.pin {
            if u == p.u {
                if p.i < lo || p.i > hi {
                    return None;
                }
                lo = p.i;
                hi = p.i;
            } else if u < p.u {
                // rows u..p.u must fit strictly above the pinned row
                let gap = p.u - u;
                if p.i < gap {
                    return None;
                }
                hi = hi.min(p.i - gap);
            }
        }
        if lo > hi {
            return None;
        }
        let empty_row = self.supports[u].is_empty();
        for r in lo..=hi {
            if !self.place(u, r) {
                continue;
            }
            self.row_map.push(r);
            let found = self.descend(u + 1, r + 1);
            self.row_map.pop();
            if found.is_some() {
                return found;
            }
            if empty_row {
                // any later host row leaves fewer options for the rows below
                return None;
            }
        }
        None
    }

    /// Fill level `u + 1` from level `u` with pattern row `u` on host row
    /// `r`. Returns false if the column sets no longer admit representatives.
    fn place(&mut self, u: usize, r: usize) -> bool {
        let (head, tail) = self.levels.split_at_mut(u + 1);
        let (src, dst) = (&head[u], &mut tail[0]);
        dst.copy_from_slice(src);
        let row = self.m.row_words(r);
        for &y in &self.supports[u] {
            let set = &mut dst[y * self.stride..(y + 1) * self.stride];
            let mut any = 0;
            for (w, &mask) in set.iter_mut().zip(row) {
                *w &= mask;
                any |= *w;
            }
            if any == 0 {
                return false;
            }
        }
        self.representatives(u + 1).is_some()
    }
}

/// Brute-force containment check: try every ordered choice of rows and
/// columns of `m` and test entrywise domination.
///
/// Limited to hosts of at most 6x6 and patterns of at most 4x4.
pub fn oracle_contains(m: &Matrix01, pattern: &Pattern) -> Result<bool> {
    let (n_rows, n_cols) = m.dims();
    let (a, b) = pattern.matrix().dims();
    if n_rows > ORACLE_MAX_HOST || n_cols > ORACLE_MAX_HOST {
        return Err(Error::arg(format!(
            "oracle host is {n_rows}x{n_cols}, limit is {ORACLE_MAX_HOST}x{ORACLE_MAX_HOST}"
        )));
    }
    if a > ORACLE_MAX_PATTERN || b > ORACLE_MAX_PATTERN {
        return Err(Error::arg(format!(
            "oracle pattern is {a}x{b}, limit is {ORACLE_MAX_PATTERN}x{ORACLE_MAX_PATTERN}"
        )));
    }
    let host: Vec<Vec<bool>> = (0..n_rows)
        .map(|i| (0..n_cols).map(|j| m.get(i, j)).collect())
        .collect();
    let pat: Vec<Vec<bool>> = (0..a)
        .map(|u| (0..b).map(|y| pattern.matrix().get(u, y)).collect())
        .collect();
    let col_choices: Vec<Vec<usize>> = (0..n_cols).combinations(b).collect();
    Ok((0..n_rows).combinations(a).any(|rows| {
        col_choices.iter().any(|cols| {
            (0..a).all(|u| (0..b).all(|y| !pat[u][y] || host[rows[u]][cols[y]]))
        })
    }))
}
