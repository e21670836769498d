//! Exact bounded searches for column sets whose `t`-subsets all carry one
//! color. These stand in for the Ramsey-type existence arguments, which are
//! far out of reach at desk scale.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

use crate::pipeline::classify::Color;

/// Default node budget for each extraction call.
pub const DEFAULT_EXTRACT_BUDGET: u64 = 2_000_000;

/// Good `t`-sets grouped by color, largest class first (then by color).
fn color_classes(colors: &BTreeMap<Vec<usize>, Color>) -> Vec<(Color, BTreeSet<Vec<usize>>)> {
    let mut classes: BTreeMap<Color, BTreeSet<Vec<usize>>> = BTreeMap::new();
    for (e, c) in colors {
        classes.entry(c.clone()).or_default().insert(e.clone());
    }
    let mut out: Vec<_> = classes.into_iter().collect();
    out.sort_by(|x, y| y.1.len().cmp(&x.1.len()).then_with(|| x.0.cmp(&y.0)));
    out
}

/// Find `b` columns of `columns` all of whose `t`-subsets are keys of
/// `colors` with one shared color. Returns the color and the columns in
/// increasing order, or `None` if no such set exists or the budget runs out.
pub fn extract_monochromatic(
    colors: &BTreeMap<Vec<usize>, Color>,
    columns: &[usize],
    t: usize,
    b: usize,
    budget: u64,
) -> Option<(Color, Vec<usize>)> {
    if t == 0 || b == 0 || columns.len() < b {
        return None;
    }
    let mut nodes = 0u64;
    for (color, class) in color_classes(colors) {
        let used: BTreeSet<usize> = class.iter().flatten().copied().collect();
        let pool: Vec<usize> = columns.iter().copied().filter(|c| used.contains(c)).collect();
        if pool.len() < b {
            continue;
        }
        let mut chosen = Vec::with_capacity(b);
        match clique(&class, &pool, t, b, 0, &mut chosen, &mut nodes, budget) {
            Some(true) => return Some((color, chosen)),
            Some(false) => {}
            None => return None,
        }
    }
    None
}

/// `Some(true)` on success, `Some(false)` when exhausted, `None` when the
/// budget ran out.
#[allow(clippy::too_many_arguments)]
fn clique(
    class: &BTreeSet<Vec<usize>>,
    pool: &[usize],
    t: usize,
    b: usize,
    from: usize,
    chosen: &mut Vec<usize>,
    nodes: &mut u64,
    budget: u64,
) -> Option<bool> {
    if chosen.len() == b {
        return Some(true);
    }
    let need = b - chosen.len();
    for idx in from..pool.len() {
        if pool.len() - idx < need {
            break;
        }
        *nodes += 1;
        if *nodes > budget {
            return None;
        }
        let c = pool[idx];
        if !closes_all(class, chosen, c, t) {
            continue;
        }
        chosen.push(c);
        match clique(class, pool, t, b, idx + 1, chosen, nodes, budget) {
            Some(false) => {}
            other => return other,
        }
        chosen.pop();
    }
    Some(false)
}

/// Every `t`-set made of `c` and `t - 1` members of `chosen` is in `class`.
/// `c` exceeds every member of `chosen`, so the sets come out sorted.
fn closes_all(class: &BTreeSet<Vec<usize>>, chosen: &[usize], c: usize, t: usize) -> bool {
    if t == 1 {
        return class.contains(&vec![c]);
    }
    if chosen.len() + 1 < t {
        return true;
    }
    chosen.iter().copied().combinations(t - 1).all(|mut e| {
        e.push(c);
        class.contains(&e)
    })
}

/// Find consecutive column groups `C_1 < ... < C_t` with `|C_i| = widths[i]`
/// such that every transversal (one column from each group) is a key of
/// `colors`, all with one shared color.
pub fn extract_product(
    colors: &BTreeMap<Vec<usize>, Color>,
    columns: &[usize],
    widths: &[usize],
    budget: u64,
) -> Option<(Color, Vec<Vec<usize>>)> {
    let total: usize = widths.iter().sum();
    if widths.is_empty() || widths.contains(&0) || columns.len() < total {
        return None;
    }
    let mut nodes = 0u64;
    for (color, class) in color_classes(colors) {
        let mut parts: Vec<Vec<usize>> = widths.iter().map(|&w| Vec::with_capacity(w)).collect();
        let mut search = Product {
            class: &class,
            columns,
            widths,
            nodes: &mut nodes,
            budget,
        };
        match search.fill(&mut parts, 0, 0) {
            Some(true) => return Some((color, parts)),
            Some(false) => {}
            None => return None,
        }
    }
    None
}

struct Product<'a> {
    class: &'a BTreeSet<Vec<usize>>,
    columns: &'a [usize],
    widths: &'a [usize],
    nodes: &'a mut u64,
    budget: u64,
}

impl Product<'_> {
    /// Fill `parts[p]` from `columns[from..]`, then the later parts.
    fn fill(&mut self, parts: &mut [Vec<usize>], p: usize, from: usize) -> Option<bool> {
        if p == parts.len() {
            return Some(true);
        }
        if parts[p].len() == self.widths[p] {
            return self.fill(parts, p + 1, from);
        }
        let remaining: usize = self.widths[p..].iter().sum::<usize>() - parts[p].len();
        for idx in from..self.columns.len() {
            if self.columns.len() - idx < remaining {
                break;
            }
            *self.nodes += 1;
            if *self.nodes > self.budget {
                return None;
            }
            let c = self.columns[idx];
            if p + 1 == parts.len() && !self.transversals_ok(&parts[..p], c) {
                continue;
            }
            parts[p].push(c);
            match self.fill(parts, p, idx + 1) {
                Some(false) => {}
                other => return other,
            }
            parts[p].pop();
        }
        Some(false)
    }

    /// All transversals of `earlier` extended by `c` are in the class.
    fn transversals_ok(&self, earlier: &[Vec<usize>], c: usize) -> bool {
        if earlier.is_empty() {
            return self.class.contains(&vec![c]);
        }
        earlier
            .iter()
            .map(|part| part.iter().copied())
            .multi_cartesian_product()
            .all(|mut e| {
                e.push(c);
                self.class.contains(&e)
            })
    }
}
