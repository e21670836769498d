use std::fmt;

use crate::bits;
use crate::error::{Error, Result};
use crate::matrix::Matrix01;
use crate::pipeline::params::{ProcessParams, RowChain};

/// Where a shrinking step finds a common row: above the surviving block
/// (smaller row index) or below it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subtype {
    Down,
    Up,
}

impl Subtype {
    pub fn flip(self) -> Self {
        match self {
            Subtype::Down => Subtype::Up,
            Subtype::Up => Subtype::Down,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Subtype::Down => "down",
            Subtype::Up => "up",
        }
    }
}

impl fmt::Display for Subtype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepType {
    NonShrinking,
    Shrinking(Subtype),
}

impl StepType {
    pub fn is_shrinking(self) -> bool {
        matches!(self, StepType::Shrinking(_))
    }

    pub fn subtype(self) -> Option<Subtype> {
        match self {
            StepType::Shrinking(z) => Some(z),
            StepType::NonShrinking => None,
        }
    }
}

/// Step types of one column set for one base row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    /// `steps[j - 1]` is the type of step `j`.
    pub steps: Vec<StepType>,
    /// For a shrinking step, a common row outside the block on the side
    /// named by the subtype.
    pub witnesses: Vec<Option<usize>>,
    /// `counts[j]` is the number of common rows inside `R_j`.
    pub counts: Vec<usize>,
}

impl Classification {
    pub fn shrinking_steps(&self) -> Vec<usize> {
        (1..=self.steps.len()).filter(|&j| self.steps[j - 1].is_shrinking()).collect()
    }

    pub fn shrink_count(&self) -> usize {
        self.steps.iter().filter(|s| s.is_shrinking()).count()
    }

    /// At least `2a` shrinking steps.
    pub fn is_good(&self, a: usize) -> bool {
        self.shrink_count() >= 2 * a
    }

    /// `(j, subtype)` for every shrinking step, increasing in `j`.
    pub fn events(&self) -> Vec<(usize, Subtype)> {
        self.steps
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.subtype().map(|z| (i + 1, z)))
            .collect()
    }
}

/// Classify every step for the column set `e` and base row `r`.
pub fn classify_steps(m: &Matrix01, r: usize, e: &[usize], params: &ProcessParams) -> Result<Classification> {
    let n = m.n_rows();
    if r >= n {
        return Err(Error::arg(format!("row {r} out of range for {n} rows")));
    }
    if e.is_empty() {
        return Err(Error::arg("column set is empty"));
    }
    if let Some(&c) = e.iter().find(|&&c| c >= m.n_cols() || !m.get(r, c)) {
        return Err(Error::arg(format!("column {c} is not a 1-entry of row {r}")));
    }
    let chain = RowChain::new(n, r, params)?;
    let common = common_rows(m, e);
    let mut steps = Vec::with_capacity(chain.steps());
    let mut witnesses = Vec::with_capacity(chain.steps());
    for j in 1..=chain.steps() {
        let (above, below) = (chain.above(j), chain.below(j));
        let up = bits::last_in_range(&common, above.start, above.end);
        let down = bits::first_in_range(&common, below.start, below.end);
        let (ty, w) = match (up, down) {
            (Some(i), _) => (StepType::Shrinking(Subtype::Up), Some(i)),
            (None, Some(i)) => (StepType::Shrinking(Subtype::Down), Some(i)),
            (None, None) => (StepType::NonShrinking, None),
        };
        steps.push(ty);
        witnesses.push(w);
    }
    let counts = (0..=chain.steps())
        .map(|j| {
            let b = chain.block(j);
            bits::count_range(&common, b.start, b.end)
        })
        .collect();
    Ok(Classification {
        steps,
        witnesses,
        counts,
    })
}

/// Rows with a 1 in every column of `e`, as packed bits.
fn common_rows(m: &Matrix01, e: &[usize]) -> Vec<u64> {
    let mut out = vec![!0u64; bits::words_for(m.n_rows())];
    for i in 0..m.n_rows() {
        if !e.iter().all(|&c| m.get(i, c)) {
            bits::clear(&mut out, i);
        }
    }
    for i in m.n_rows()..out.len() * 64 {
        bits::clear(&mut out, i);
    }
    out
}

/// Column bitsets over rows, for computing common rows of many column
/// sets quickly.
#[derive(Clone, Debug)]
pub(crate) struct ColumnIndex {
    cols: Matrix01,
}

impl ColumnIndex {
    pub(crate) fn new(m: &Matrix01) -> Self {
        ColumnIndex { cols: m.transpose() }
    }

    pub(crate) fn words(&self) -> usize {
        self.cols.stride()
    }

    /// Write the common rows of `e` into `buf`.
    pub(crate) fn common_rows(&self, e: &[usize], buf: &mut [u64]) {
        buf.copy_from_slice(self.cols.row_words(e[0]));
        for &c in &e[1..] {
            for (w, &x) in buf.iter_mut().zip(self.cols.row_words(c)) {
                *w &= x;
            }
        }
    }
}

/// Shrinking events `(j, subtype)` from packed common rows. Only active
/// steps can shrink.
pub(crate) fn shrink_events(common: &[u64], chain: &RowChain, out: &mut Vec<(usize, Subtype)>) {
    out.clear();
    for j in chain.active_steps() {
        let above = chain.above(j);
        if bits::count_range(common, above.start, above.end) > 0 {
            out.push((j, Subtype::Up));
            continue;
        }
        let below = chain.below(j);
        if bits::count_range(common, below.start, below.end) > 0 {
            out.push((j, Subtype::Down));
        }
    }
}

/// The color `(z, J)` of a good column set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Color {
    pub subtype: Subtype,
    /// `J`, increasing.
    pub steps: Vec<usize>,
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.subtype)?;
        for (i, j) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{j}")?;
        }
        Ok(())
    }
}

/// Color a column set from its shrinking events, or `None` if it has fewer
/// than `2a` of them. The majority subtype wins (ties go to `Down`) and `J`
/// is its `a` largest steps.
pub fn choose_color(events: &[(usize, Subtype)], a: usize) -> Option<Color> {
    if events.len() < 2 * a {
        return None;
    }
    let ups = events.iter().filter(|(_, z)| *z == Subtype::Up).count();
    let subtype = if ups > events.len() - ups {
        Subtype::Up
    } else {
        Subtype::Down
    };
    let mut steps: Vec<usize> = events
        .iter()
        .rev()
        .filter(|(_, z)| *z == subtype)
        .take(a)
        .map(|&(j, _)| j)
        .collect();
    steps.reverse();
    Some(Color { subtype, steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_common_rows() -> Matrix01 {
        let mut m = Matrix01::zeros(8, 2);
        for i in [2, 6] {
            m.set(i, 0, true);
            m.set(i, 1, true);
        }
        m
    }

    #[test]
    fn lone_common_row_never_shrinks() {
        let mut m = Matrix01::zeros(8, 3);
        m.set(5, 0, true);
        m.set(5, 2, true);
        m.set(1, 0, true);
        let p = ProcessParams::explicit(2, 3, 0).unwrap();
        let c = classify_steps(&m, 5, &[0, 2], &p).unwrap();
        assert!(c.steps.iter().all(|s| !s.is_shrinking()));
        assert_eq!(c.counts, vec![1; 4]);
    }

    #[test]
    fn below_then_mirrored_above() {
        let p = ProcessParams::explicit(2, 3, 0).unwrap();
        let m = two_common_rows();
        let c = classify_steps(&m, 2, &[0, 1], &p).unwrap();
        assert_eq!(c.steps[0], StepType::Shrinking(Subtype::Down));
        assert_eq!(c.witnesses[0], Some(6));
        assert_eq!(&c.steps[1..], &[StepType::NonShrinking; 2]);
        assert_eq!(c.counts, vec![2, 1, 1, 1]);

        let c = classify_steps(&m.mirror_vertical(), 5, &[0, 1], &p).unwrap();
        assert_eq!(c.steps[0], StepType::Shrinking(Subtype::Up));
        assert_eq!(c.witnesses[0], Some(1));
        assert_eq!(&c.steps[1..], &[StepType::NonShrinking; 2]);
    }

    #[test]
    fn precondition_is_checked() {
        let p = ProcessParams::explicit(2, 3, 0).unwrap();
        let m = two_common_rows();
        assert!(classify_steps(&m, 3, &[0], &p).is_err());
        assert!(classify_steps(&m, 2, &[5], &p).is_err());
        assert!(classify_steps(&m, 9, &[0], &p).is_err());
    }

    #[test]
    fn fast_events_match() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let p = ProcessParams::explicit(3, 4, 0).unwrap();
        for _ in 0..50 {
            let m = Matrix01::random(70, 6, 0.6, &mut rng);
            let idx = ColumnIndex::new(&m);
            let mut buf = vec![0; idx.words()];
            let mut ev = Vec::new();
            for r in 0..70 {
                let e: Vec<usize> = m.row_ones(r).into_iter().take(2).collect();
                if e.is_empty() {
                    continue;
                }
                let slow = classify_steps(&m, r, &e, &p).unwrap();
                idx.common_rows(&e, &mut buf);
                shrink_events(&buf, &RowChain::new(70, r, &p).unwrap(), &mut ev);
                assert_eq!(ev, slow.events());
            }
        }
    }

    #[test]
    fn color_rules() {
        use Subtype::*;
        assert_eq!(choose_color(&[(1, Up), (2, Down), (3, Up)], 2), None);
        let tie = choose_color(&[(1, Up), (2, Down), (3, Up), (5, Down)], 2).unwrap();
        assert_eq!(tie, Color { subtype: Down, steps: vec![2, 5] });
        let up = choose_color(&[(1, Up), (2, Up), (4, Down), (6, Up), (7, Up)], 2).unwrap();
        assert_eq!(up, Color { subtype: Up, steps: vec![6, 7] });
        assert_eq!(up.to_string(), "up:6,7");
    }
}
