use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::bits;
use crate::error::{Error, Result};

/// Largest supported number of rows or columns.
pub const MAX_DIM: usize = 1 << 14;

/// A dense zero-one matrix with bit-packed rows.
///
/// Row 0 is the top row and column 0 the leftmost column. Bits past the
/// last column of each row are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix01 {
    n_rows: usize,
    n_cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl Matrix01 {
    /// An all-zero matrix.
    ///
    /// Panics if either dimension exceeds [`MAX_DIM`].
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        assert!(
            n_rows <= MAX_DIM && n_cols <= MAX_DIM,
            "matrix {n_rows}x{n_cols} exceeds the {MAX_DIM} dimension limit"
        );
        let stride = bits::words_for(n_cols);
        Matrix01 {
            n_rows,
            n_cols,
            stride,
            data: vec![0; stride * n_rows],
        }
    }

    pub fn ones(n_rows: usize, n_cols: usize) -> Self {
        Self::from_fn(n_rows, n_cols, |_, _| true)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| i == j)
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(n_rows, n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Build from nested rows of 0/1 values. Panics on ragged input.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(rows.iter().all(|r| r.as_ref().len() == n_cols), "ragged rows");
        Self::from_fn(rows.len(), n_cols, |i, j| rows[i].as_ref()[j] != 0)
    }

    /// Each entry is 1 independently with probability `density`.
    pub fn random<R: Rng + ?Sized>(n_rows: usize, n_cols: usize, density: f64, rng: &mut R) -> Self {
        let p = density.clamp(0.0, 1.0);
        Self::from_fn(n_rows, n_cols, |_, _| rng.gen_bool(p))
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.n_rows, self.n_cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.n_rows && j < self.n_cols, "index ({i},{j}) out of bounds");
        bits::test(self.row_words(i), j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.n_rows && j < self.n_cols, "index ({i},{j}) out of bounds");
        let row = &mut self.data[i * self.stride..(i + 1) * self.stride];
        if value {
            bits::set(row, j);
        } else {
            bits::clear(row, j);
        }
    }

    /// Packed words of row `i`.
    #[inline]
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    /// Number of `u64` words per packed row.
    #[inline]
    pub fn stride(&self) -> usize {
        self.stride
    }

    /// Number of 1-entries.
    pub fn weight(&self) -> usize {
        bits::popcount(&self.data)
    }

    pub fn row_weight(&self, i: usize) -> usize {
        bits::popcount(self.row_words(i))
    }

    /// Column indices of the 1-entries of row `i`, ascending.
    pub fn row_ones(&self, i: usize) -> Vec<usize> {
        let row = self.row_words(i);
        let mut out = Vec::new();
        let mut from = 0;
        while let Some(j) = bits::next_set(row, from) {
            out.push(j);
            from = j + 1;
        }
        out
    }

    /// All 1-entries in row-major order.
    pub fn ones_iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_rows).flat_map(move |i| self.row_ones(i).into_iter().map(move |j| (i, j)))
    }

    /// Reverse the order of the rows.
    pub fn mirror_vertical(&self) -> Self {
        let mut out = Self::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            let src = self.row_words(i);
            let dst = self.n_rows - 1 - i;
            out.data[dst * self.stride..(dst + 1) * self.stride].copy_from_slice(src);
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.n_cols, self.n_rows);
        for (i, j) in self.ones_iter() {
            out.set(j, i, true);
        }
        out
    }

    /// Append all-zero rows at the bottom until there are `total` rows.
    pub fn pad_rows(&self, total: usize) -> Self {
        assert!(total >= self.n_rows);
        let mut out = Self::zeros(total, self.n_cols);
        out.data[..self.data.len()].copy_from_slice(&self.data);
        out
    }

    /// The submatrix on the given rows and columns, in the order given.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |u, y| self.get(rows[u], cols[y]))
    }

    /// True if `self` has a 1 wherever `other` does (same dimensions).
    pub fn covers(&self, other: &Matrix01) -> bool {
        self.dims() == other.dims()
            && self.data.iter().zip(&other.data).all(|(a, b)| b & !a == 0)
    }

    /// Serialize to the `.zom` text format: one line per row, each
    /// terminated by `\n`.
    pub fn to_zom(&self) -> String {
        self.to_string()
    }

    /// Parse `.zom` text. A single trailing newline is accepted.
    pub fn parse_zom(text: &str) -> Result<Self> {
        let body = text.strip_suffix('\n').unwrap_or(text);
        if body.is_empty() {
            return Err(Error::format(1, "empty input"));
        }
        let lines: Vec<&str> = body.split('\n').collect();
        let width = lines[0].len();
        if lines.len() > MAX_DIM || width > MAX_DIM {
            return Err(Error::format(1, format!("dimensions exceed {MAX_DIM}")));
        }
        let mut m = Self::zeros(lines.len(), width);
        for (i, line) in lines.iter().enumerate() {
            if line.len() != width {
                return Err(Error::format(
                    i + 1,
                    format!("ragged row: expected {width} characters, found {}", line.len()),
                ));
            }
            for (j, ch) in line.bytes().enumerate() {
                match ch {
                    b'0' => {}
                    b'1' => m.set(i, j, true),
                    other => {
                        return Err(Error::format(
                            i + 1,
                            format!("invalid character {:?} at column {}", other as char, j + 1),
                        ))
                    }
                }
            }
        }
        if width == 0 {
            return Err(Error::format(1, "empty row"));
        }
        Ok(m)
    }
}

impl FromStr for Matrix01 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_zom(s)
    }
}

impl fmt::Display for Matrix01 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut line = String::with_capacity(self.n_cols + 1);
        for i in 0..self.n_rows {
            line.clear();
            line.extend((0..self.n_cols).map(|j| if self.get(i, j) { '1' } else { '0' }));
            line.push('\n');
            f.write_str(&line)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Matrix01 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix01({}x{})", self.n_rows, self.n_cols)?;
        for i in 0..self.n_rows {
            f.write_str(if i == 0 { " [" } else { ", " })?;
            for j in 0..self.n_cols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
        }
        if self.n_rows > 0 {
            f.write_str("]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn weight_examples() {
        assert_eq!(Matrix01::zeros(3, 3).weight(), 0);
        assert_eq!(Matrix01::identity(3).weight(), 3);
        for n in 1..=9 {
            assert_eq!(Matrix01::ones(n, n).weight(), n * n);
        }
        assert_eq!(Matrix01::ones(3, 130).weight(), 390);
    }

    #[test]
    fn parse_figure_two_pattern() {
        let m: Matrix01 = "101\n011\n110".parse().unwrap();
        assert_eq!(m, Matrix01::from_rows(&[[1, 0, 1], [0, 1, 1], [1, 1, 0]]));
        assert_eq!(m.to_zom(), "101\n011\n110\n");
    }

    #[test]
    fn parse_single_one() {
        let m: Matrix01 = "1".parse().unwrap();
        assert_eq!(m.dims(), (1, 1));
        assert!(m.get(0, 0));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!("10\n0x".parse::<Matrix01>(), Err(Error::Format { line: 2, .. })));
        assert!(matches!("10\n011".parse::<Matrix01>(), Err(Error::Format { line: 2, .. })));
        assert!(matches!("".parse::<Matrix01>(), Err(Error::Format { .. })));
        assert!(matches!("\n".parse::<Matrix01>(), Err(Error::Format { .. })));
        assert!(matches!("10\n\n01".parse::<Matrix01>(), Err(Error::Format { .. })));
        assert!(matches!("10\r\n01".parse::<Matrix01>(), Err(Error::Format { .. })));
        assert!(matches!("10 \n01".parse::<Matrix01>(), Err(Error::Format { .. })));
    }

    #[test]
    fn mirror_examples() {
        let m = Matrix01::identity(2);
        assert_eq!(m.mirror_vertical(), Matrix01::from_rows(&[[0, 1], [1, 0]]));
        let row: Matrix01 = "10110".parse().unwrap();
        assert_eq!(row.mirror_vertical(), row);
    }

    #[test]
    fn padding_bits_stay_zero() {
        let mut m = Matrix01::ones(2, 70);
        m.set(1, 69, false);
        assert_eq!(m.row_words(0)[1] >> 6, 0);
        assert_eq!(m.row_weight(1), 69);
        assert_eq!(m.transpose().transpose(), m);
    }

    fn arb_matrix(max: usize) -> impl Strategy<Value = Matrix01> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec(any::<bool>(), r * c)
                .prop_map(move |v| Matrix01::from_fn(r, c, |i, j| v[i * c + j]))
        })
    }

    proptest! {
        #[test]
        fn zom_round_trip(m in arb_matrix(80)) {
            prop_assert_eq!(Matrix01::parse_zom(&m.to_zom()).unwrap(), m);
        }

        #[test]
        fn mirror_is_weight_preserving_involution(m in arb_matrix(12)) {
            let once = m.mirror_vertical();
            prop_assert_eq!(once.weight(), m.weight());
            prop_assert_eq!(once.mirror_vertical(), m);
        }
    }
}
