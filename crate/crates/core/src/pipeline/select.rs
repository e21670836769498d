use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix01;
use crate::pipeline::classify::{choose_color, shrink_events, Color, ColumnIndex};
use crate::pipeline::params::{ProcessParams, RowChain};

/// Most candidate rows drawn per selection.
pub const MAX_CANDIDATES: usize = 256;

/// A chosen base row `r` with its column set `C` and the colors of the good
/// `t`-sets of `C`.
#[derive(Clone, Debug)]
pub struct BaseRow {
    pub r: usize,
    /// `C`, increasing.
    pub columns: Vec<usize>,
    /// Good `t`-sets (sorted column lists) and their colors.
    pub colors: BTreeMap<Vec<usize>, Color>,
    pub bad: usize,
    /// Number of `t`-sets of `C` with each shrinking-step count.
    pub shrink_histogram: BTreeMap<usize, usize>,
    pub chain: RowChain,
}

impl BaseRow {
    pub fn good(&self) -> usize {
        self.colors.len()
    }
}

/// Draw `min(n, 256)` row labels uniformly with the parameters' seed and
/// keep the one whose column set has the most good `t`-sets. Ties go to the
/// earliest draw.
pub fn select_base_row(m: &Matrix01, t: usize, a: usize, params: &ProcessParams) -> Result<BaseRow> {
    select_base_row_excluding(m, t, a, params, &BTreeSet::new())
}

/// Like [`select_base_row`], skipping the rows in `exclude`.
pub fn select_base_row_excluding(
    m: &Matrix01,
    t: usize,
    a: usize,
    params: &ProcessParams,
    exclude: &BTreeSet<usize>,
) -> Result<BaseRow> {
    let n = m.n_rows();
    if n == 0 || t == 0 || a == 0 {
        return Err(Error::arg("need a nonempty matrix, t >= 1 and a >= 1"));
    }
    if !params.covers(n) {
        return Err(Error::arg(format!("k={} and s={} do not cover {n} rows", params.k, params.s)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut seen = BTreeSet::new();
    let candidates: Vec<usize> = (0..n.min(MAX_CANDIDATES))
        .map(|_| rng.gen_range(0..n))
        .filter(|r| !exclude.contains(r) && m.row_weight(*r) > 0 && seen.insert(*r))
        .collect();
    let index = ColumnIndex::new(m);
    let mut best: Option<(usize, usize)> = None;
    for &r in &candidates {
        let good = scan(m, &index, r, t, a, params, None)?;
        if best.is_none_or(|(g, _)| good > g) {
            best = Some((good, r));
        }
    }
    let (_, r) = best.ok_or(Error::NoBaseRow)?;
    let mut out = BaseRow {
        r,
        columns: m.row_ones(r),
        colors: BTreeMap::new(),
        bad: 0,
        shrink_histogram: BTreeMap::new(),
        chain: RowChain::new(n, r, params)?,
    };
    scan(m, &index, r, t, a, params, Some(&mut out))?;
    Ok(out)
}

/// Count the good `t`-sets of row `r`, recording colors and counts into
/// `record` when given.
fn scan(
    m: &Matrix01,
    index: &ColumnIndex,
    r: usize,
    t: usize,
    a: usize,
    params: &ProcessParams,
    mut record: Option<&mut BaseRow>,
) -> Result<usize> {
    let chain = RowChain::new(m.n_rows(), r, params)?;
    let columns = m.row_ones(r);
    let mut buf = vec![0u64; index.words()];
    let mut events = Vec::new();
    let mut good = 0;
    for e in columns.iter().copied().combinations(t) {
        index.common_rows(&e, &mut buf);
        shrink_events(&buf, &chain, &mut events);
        let color = choose_color(&events, a);
        if let Some(rec) = record.as_deref_mut() {
            *rec.shrink_histogram.entry(events.len()).or_default() += 1;
            match color {
                Some(c) => {
                    rec.colors.insert(e, c);
                }
                None => rec.bad += 1,
            }
        }
        good += usize::from(events.len() >= 2 * a);
    }
    Ok(good)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::classify::Subtype;

    #[test]
    fn single_full_row_is_all_bad() {
        let mut m = Matrix01::zeros(8, 8);
        (0..8).for_each(|c| m.set(3, c, true));
        let p = ProcessParams::explicit(2, 3, 11).unwrap();
        let base = select_base_row(&m, 2, 1, &p).unwrap();
        assert_eq!(base.r, 3);
        assert_eq!(base.good(), 0);
        assert_eq!(base.bad, 28);
        assert_eq!(base.shrink_histogram, BTreeMap::from([(0, 28)]));
    }

    #[test]
    fn all_ones_pairs_are_good() {
        let m = Matrix01::ones(16, 16);
        let p = ProcessParams::column_partite(16, 5);
        let base = select_base_row(&m, 2, 2, &p).unwrap();
        assert_eq!(base.good(), 120);
        assert_eq!(base.shrink_histogram, BTreeMap::from([(4, 120)]));
        // every pair sees the same chain, so it gets the same color
        let colors: BTreeSet<&Color> = base.colors.values().collect();
        assert_eq!(colors.len(), 1);
        let z = colors.into_iter().next().unwrap().subtype;
        let downs = (1..=4).filter(|&j| !base.chain.below(j).is_empty()).count();
        assert_eq!(z == Subtype::Down, downs >= 2);
    }

    #[test]
    fn zero_matrix_has_no_base_row() {
        let p = ProcessParams::explicit(2, 3, 0).unwrap();
        assert!(matches!(select_base_row(&Matrix01::zeros(8, 8), 2, 1, &p), Err(Error::NoBaseRow)));
    }

    #[test]
    fn selection_is_deterministic_and_respects_exclusions() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = Matrix01::random(32, 32, 0.7, &mut rng);
        let p = ProcessParams::column_partite(32, 9);
        let a = select_base_row(&m, 2, 1, &p).unwrap();
        let b = select_base_row(&m, 2, 1, &p).unwrap();
        assert_eq!((a.r, &a.colors), (b.r, &b.colors));
        let c = select_base_row_excluding(&m, 2, 1, &p, &BTreeSet::from([a.r])).unwrap();
        assert_ne!(c.r, a.r);
        let all: BTreeSet<usize> = (0..32).collect();
        assert!(matches!(select_base_row_excluding(&m, 2, 1, &p, &all), Err(Error::NoBaseRow)));
    }
}
