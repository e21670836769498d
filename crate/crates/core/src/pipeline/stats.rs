//! Monte-Carlo statistics on the bad `t`-sets of random base rows.
//!
//! A `t`-set is heavy when it has more common rows than a threshold. For a
//! fixed heavy set `e` with common rows `I`, a base row drawn from `I` makes
//! `e` bad exactly when the leaf of that row in the prefix tree of `I` has
//! fewer than `2a` branching ancestors, so the conditional bad frequency is
//! at most `k^(2a-1) / threshold`. The frequency is computed here directly,
//! by classifying `e` against every row of `I`.

use std::collections::BTreeMap;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits;
use crate::error::{Error, Result};
use crate::matrix::Matrix01;
use crate::pattern::Pattern;
use crate::pipeline::classify::{classify_steps, shrink_events, ColumnIndex};
use crate::pipeline::params::{kary_digits, ProcessParams, RowChain};
use crate::pipeline::tree::build_prefix_tree;

/// Column sets per sample whose shrinking steps are compared against the
/// prefix tree of their common rows.
pub const BRANCHING_CHECKS_PER_SAMPLE: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Regime {
    /// `s = ceil(4a / epsilon)`, heavy above `n^(epsilon / 2)` common rows.
    General { epsilon: f64 },
    /// `k = 2`, `s = ceil(log2 n)`, heavy above `5 * 2^(2a-1)` common rows.
    ColumnPartite,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::General { .. } => "general",
            Regime::ColumnPartite => "column-partite",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StatsRecord {
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub a: usize,
    pub t: usize,
    pub samples: usize,
    pub threshold: f64,
    /// `k^(2a-1) / threshold`.
    pub bound: f64,
    /// Sampled `|C|` -> number of samples.
    pub c_sizes: BTreeMap<usize, usize>,
    pub mean_c: f64,
    /// Counts over all sampled `t`-sets, with multiplicity across samples.
    pub tsets: u64,
    pub light: u64,
    pub heavy: u64,
    pub bad: u64,
    pub heavy_and_bad: u64,
    /// Shrinking-step count -> number of sampled `t`-sets.
    pub shrink_histogram: BTreeMap<usize, u64>,
    /// Heavy sets checked against the bound (only when it is below 1).
    pub bound_checks: u64,
    pub bound_violations: u64,
    /// Largest conditional bad frequency over the sampled heavy sets.
    pub max_conditional_bad: f64,
    pub branching_checks: u64,
    pub branching_mismatches: u64,
}

impl StatsRecord {
    fn frac(&self, x: u64) -> f64 {
        if self.tsets == 0 {
            0.0
        } else {
            x as f64 / self.tsets as f64
        }
    }

    pub fn light_fraction(&self) -> f64 {
        self.frac(self.light)
    }

    pub fn heavy_fraction(&self) -> f64 {
        self.frac(self.heavy)
    }

    pub fn bad_fraction(&self) -> f64 {
        self.frac(self.bad)
    }

    pub fn heavy_and_bad_fraction(&self) -> f64 {
        self.frac(self.heavy_and_bad)
    }

    /// True if the bound held for every check and every branching check
    /// matched.
    pub fn ok(&self) -> bool {
        self.bound_violations == 0 && self.branching_mismatches == 0
    }
}

/// Sample `samples` base rows uniformly and classify every `t`-set of each
/// row's column set. `t` and `a` come from `pattern`.
pub fn pipeline_stats(
    m: &Matrix01,
    pattern: &Pattern,
    regime: Regime,
    samples: usize,
    seed: u64,
) -> Result<StatsRecord> {
    if samples == 0 {
        return Err(Error::arg("need at least one sample"));
    }
    if !m.is_square() || m.n_rows() == 0 {
        return Err(Error::arg("host must be square and nonempty"));
    }
    let (n, t, a) = (m.n_rows(), pattern.t(), pattern.rows());
    if t == 0 {
        return Err(Error::arg("pattern has no 1-entries"));
    }
    let (params, threshold) = match regime {
        Regime::General { epsilon } => (
            ProcessParams::general(n, a, epsilon, seed)?,
            (n as f64).powf(epsilon / 2.0),
        ),
        Regime::ColumnPartite => (ProcessParams::column_partite(n, seed), 5.0 * 2f64.powi(2 * a as i32 - 1)),
    };
    let bound = (params.k as f64).powi(2 * a as i32 - 1) / threshold;
    let mut rec = StatsRecord {
        n,
        k: params.k,
        s: params.s,
        a,
        t,
        samples,
        threshold,
        bound,
        ..StatsRecord::default()
    };
    let chains: Vec<RowChain> = (0..n).map(|r| RowChain::new(n, r, &params)).collect::<Result<_>>()?;
    let index = ColumnIndex::new(m);
    let mut buf = vec![0u64; index.words()];
    let mut events = Vec::new();
    let mut conditional: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c_total = 0usize;
    for _ in 0..samples {
        let r = rng.gen_range(0..n);
        let columns = m.row_ones(r);
        c_total += columns.len();
        *rec.c_sizes.entry(columns.len()).or_default() += 1;
        for (idx, e) in columns.iter().copied().combinations(t).enumerate() {
            index.common_rows(&e, &mut buf);
            shrink_events(&buf, &chains[r], &mut events);
            let is_bad = events.len() < 2 * a;
            let heavy = bits::popcount(&buf) as f64 > threshold;
            rec.tsets += 1;
            *rec.shrink_histogram.entry(events.len()).or_default() += 1;
            rec.bad += u64::from(is_bad);
            if heavy {
                rec.heavy += 1;
                rec.heavy_and_bad += u64::from(is_bad);
                let freq = match conditional.get(&e) {
                    Some(&f) => f,
                    None => {
                        let f = conditional_bad_frequency(&buf, n, &chains, a);
                        conditional.insert(e.clone(), f);
                        f
                    }
                };
                rec.max_conditional_bad = rec.max_conditional_bad.max(freq);
                if bound < 1.0 {
                    rec.bound_checks += 1;
                    rec.bound_violations += u64::from(freq > bound);
                }
            } else {
                rec.light += 1;
            }
            if idx < BRANCHING_CHECKS_PER_SAMPLE {
                rec.branching_checks += 1;
                if !branching_matches(m, r, &e, &buf, &params)? {
                    rec.branching_mismatches += 1;
                }
            }
        }
    }
    rec.mean_c = c_total as f64 / samples as f64;
    Ok(rec)
}

/// Fraction of the common rows `i` for which the set is bad with base row `i`.
fn conditional_bad_frequency(common: &[u64], n: usize, chains: &[RowChain], a: usize) -> f64 {
    let mut events = Vec::new();
    let (mut rows, mut bad) = (0usize, 0usize);
    let mut i = 0;
    while let Some(r) = bits::next_set(common, i).filter(|&r| r < n) {
        shrink_events(common, &chains[r], &mut events);
        rows += 1;
        bad += usize::from(events.len() < 2 * a);
        i = r + 1;
    }
    bad as f64 / rows as f64
}

/// Step `j` shrinks exactly when the length-`(j-1)` prefix of `r`'s digits
/// is a branching node of the prefix tree of the common rows.
fn branching_matches(m: &Matrix01, r: usize, e: &[usize], common: &[u64], params: &ProcessParams) -> Result<bool> {
    let rows: Vec<usize> = (0..m.n_rows()).filter(|&i| bits::test(common, i)).collect();
    let tree = build_prefix_tree(&rows, params.k, params.s)?;
    let digits = kary_digits(r, params.k, params.s)?;
    let c = classify_steps(m, r, e, params)?;
    Ok((1..=params.s).all(|j| {
        let node = tree.node_for(&digits[..j - 1]).expect("r is a common row");
        tree.tree().is_branching(node) == c.steps[j - 1].is_shrinking()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_full_row_is_all_light_and_bad() {
        let mut m = Matrix01::zeros(16, 16);
        (0..16).for_each(|c| m.set(0, c, true));
        let p = Pattern::parse("11").unwrap();
        let rec = pipeline_stats(&m, &p, Regime::ColumnPartite, 40, 2).unwrap();
        // rows other than 0 have no columns, so only some samples count
        assert_eq!(rec.heavy, 0);
        assert_eq!(rec.light, rec.bad);
        assert!(rec.ok());
    }

    #[test]
    fn all_ones_has_no_heavy_bad_sets() {
        for n in [8, 16, 32] {
            let m = Matrix01::ones(n, n);
            let p = Pattern::parse("11").unwrap();
            let rec = pipeline_stats(&m, &p, Regime::ColumnPartite, 20, 1).unwrap();
            assert_eq!(rec.heavy_and_bad, 0);
            assert!(rec.ok());
        }
    }

    #[test]
    fn bound_is_checked_on_heavy_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = Matrix01::random(64, 64, 0.5, &mut rng);
        let p = Pattern::parse("11").unwrap();
        let rec = pipeline_stats(&m, &p, Regime::ColumnPartite, 50, 8).unwrap();
        assert!((rec.bound - 0.2).abs() < 1e-12);
        assert!(rec.bound_checks > 0);
        assert!(rec.max_conditional_bad <= 0.2);
        assert!(rec.ok());
        assert!(rec.branching_checks > 0);
    }

    #[test]
    fn general_regime_bound_is_vacuous_at_small_n() {
        let m = Matrix01::ones(32, 32);
        let p = Pattern::parse("11").unwrap();
        let rec = pipeline_stats(&m, &p, Regime::General { epsilon: 0.05 }, 5, 0).unwrap();
        assert!(rec.bound >= 1.0);
        assert_eq!(rec.bound_checks, 0);
        assert!(rec.ok());
    }
}
