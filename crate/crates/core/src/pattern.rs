use crate::error::{Error, Result};
use crate::matrix::Matrix01;

pub const MAX_PATTERN_ROWS: usize = 8;
pub const MAX_PATTERN_COLS: usize = 12;

/// A forbidden pattern `A` together with its row-degree bound `t`.
///
/// `column_cut`, when present, lists the widths `b_1, ..., b_t` of
/// consecutive column intervals such that every row of `A` has at most one
/// 1-entry inside each interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    matrix: Matrix01,
    t: usize,
    column_cut: Option<Vec<usize>>,
}

impl Pattern {
    /// Wrap a matrix, enforcing the 8x12 pattern size limit.
    pub fn new(matrix: Matrix01) -> Result<Self> {
        if matrix.n_rows() > MAX_PATTERN_ROWS || matrix.n_cols() > MAX_PATTERN_COLS {
            return Err(Error::arg(format!(
                "pattern is {}x{}, limit is {MAX_PATTERN_ROWS}x{MAX_PATTERN_COLS}",
                matrix.n_rows(),
                matrix.n_cols()
            )));
        }
        Ok(Self::unchecked(matrix, None))
    }

    /// Parse `.zom` text into a pattern without a cut.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(Matrix01::parse_zom(text)?)
    }

    /// Like [`Pattern::new`] but also attaches a validated column cut.
    pub fn with_cut(matrix: Matrix01, widths: Vec<usize>) -> Result<Self> {
        let mut p = Self::new(matrix)?;
        p.check_cut(&widths)?;
        p.column_cut = Some(widths);
        Ok(p)
    }

    /// Attach a column cut if the pattern is column-t-partite.
    pub fn with_detected_cut(matrix: Matrix01) -> Result<Self> {
        let mut p = Self::new(matrix)?;
        p.column_cut = p.detect_column_cut();
        Ok(p)
    }

    pub(crate) fn unchecked(matrix: Matrix01, column_cut: Option<Vec<usize>>) -> Self {
        let t = (0..matrix.n_rows()).map(|i| matrix.row_weight(i)).max().unwrap_or(0);
        Pattern {
            matrix,
            t,
            column_cut,
        }
    }

    pub fn matrix(&self) -> &Matrix01 {
        &self.matrix
    }

    /// Number of rows `a`.
    pub fn rows(&self) -> usize {
        self.matrix.n_rows()
    }

    /// Number of columns `b`.
    pub fn cols(&self) -> usize {
        self.matrix.n_cols()
    }

    /// Maximum number of 1-entries in a row.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn column_cut(&self) -> Option<&[usize]> {
        self.column_cut.as_deref()
    }

    pub fn is_empty(&self) -> bool {
        self.rows() == 0 || self.cols() == 0
    }

    /// Column indices of the 1-entries in row `u`.
    pub fn row_support(&self, u: usize) -> Vec<usize> {
        self.matrix.row_ones(u)
    }

    /// Greedy interval cut: extend the current interval while no row gets a
    /// second 1-entry. The greedy cut has the fewest parts of any valid cut,
    /// and every valid cut has at least `t` parts, so the pattern is
    /// column-t-partite exactly when the greedy cut has `t` parts.
    pub fn detect_column_cut(&self) -> Option<Vec<usize>> {
        if self.t == 0 || self.is_empty() {
            return None;
        }
        let mut widths = Vec::new();
        let mut used = vec![false; self.rows()];
        let mut width = 0;
        for y in 0..self.cols() {
            let clash = (0..self.rows()).any(|u| used[u] && self.matrix.get(u, y));
            if clash {
                widths.push(width);
                width = 0;
                used.iter_mut().for_each(|x| *x = false);
            }
            for (u, flag) in used.iter_mut().enumerate() {
                *flag |= self.matrix.get(u, y);
            }
            width += 1;
        }
        widths.push(width);
        (widths.len() == self.t).then_some(widths)
    }

    fn check_cut(&self, widths: &[usize]) -> Result<()> {
        if widths.len() != self.t {
            return Err(Error::arg(format!(
                "column cut has {} parts, pattern has t = {}",
                widths.len(),
                self.t
            )));
        }
        if widths.contains(&0) || widths.iter().sum::<usize>() != self.cols() {
            return Err(Error::arg(format!(
                "column cut widths {widths:?} must be positive and sum to {}",
                self.cols()
            )));
        }
        let mut start = 0;
        for &w in widths {
            for u in 0..self.rows() {
                let ones = (start..start + w).filter(|&y| self.matrix.get(u, y)).count();
                if ones > 1 {
                    return Err(Error::arg(format!(
                        "row {u} has {ones} 1-entries in columns {start}..{}",
                        start + w
                    )));
                }
            }
            start += w;
        }
        Ok(())
    }
}

/// Strictly increasing row and column maps witnessing that a pattern
/// occurs inside a larger matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Embedding {
    pub row_map: Vec<usize>,
    pub col_map: Vec<usize>,
}

impl Embedding {
    pub fn new(row_map: Vec<usize>, col_map: Vec<usize>) -> Self {
        Embedding { row_map, col_map }
    }

    /// Check that the maps are strictly increasing, in range, and carry
    /// every 1-entry of `pattern` onto a 1-entry of `m`.
    pub fn validate(&self, m: &Matrix01, pattern: &Matrix01) -> Result<()> {
        if self.row_map.len() != pattern.n_rows() || self.col_map.len() != pattern.n_cols() {
            return Err(Error::arg("embedding length does not match pattern dimensions"));
        }
        let increasing = |v: &[usize]| v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&self.row_map) || !increasing(&self.col_map) {
            return Err(Error::arg("embedding maps must be strictly increasing"));
        }
        if self.row_map.last().is_some_and(|&r| r >= m.n_rows())
            || self.col_map.last().is_some_and(|&c| c >= m.n_cols())
        {
            return Err(Error::arg("embedding maps outside the host matrix"));
        }
        for (u, y) in pattern.ones_iter() {
            if !m.get(self.row_map[u], self.col_map[y]) {
                return Err(Error::arg(format!(
                    "pattern entry ({u},{y}) maps to a 0 at ({},{})",
                    self.row_map[u], self.col_map[y]
                )));
            }
        }
        Ok(())
    }

    pub fn is_valid(&self, m: &Matrix01, pattern: &Matrix01) -> bool {
        self.validate(m, pattern).is_ok()
    }

    /// Keep only the first `b` pattern columns.
    pub fn restrict_cols(&self, b: usize) -> Embedding {
        Embedding {
            row_map: self.row_map.clone(),
            col_map: self.col_map[..b].to_vec(),
        }
    }

    /// The submatrix of `m` picked out by the maps.
    pub fn image(&self, m: &Matrix01) -> Matrix01 {
        m.submatrix(&self.row_map, &self.col_map)
    }
}
