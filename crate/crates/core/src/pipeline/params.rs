use crate::error::{Error, Result};

/// Parameters of the block-refinement process: `s` refinement steps, each
/// splitting the surviving rows into `k` blocks by the next base-`k` digit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProcessParams {
    /// Only set for the general regime, where `s` is derived from it.
    pub epsilon: Option<f64>,
    pub s: usize,
    pub k: usize,
    pub seed: u64,
}

impl ProcessParams {
    /// General regime: `s = ceil(4a / epsilon)` and `k = ceil(n^(1/s))`,
    /// adjusted so that `k` is the least integer `>= 2` with `k^s >= n`.
    pub fn general(n: usize, a: usize, epsilon: f64, seed: u64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.1) {
            return Err(Error::arg(format!("epsilon {epsilon} outside (0, 1/10)")));
        }
        if a == 0 || n == 0 {
            return Err(Error::arg("need n >= 1 and a pattern with at least one row"));
        }
        // the tolerance keeps e.g. 12 / 0.05 from rounding up past 240
        let s = ((4 * a) as f64 / epsilon - 1e-9).ceil().max(1.0) as usize;
        let mut k = (n as f64).powf(1.0 / s as f64).ceil().max(2.0) as usize;
        while !pow_at_least(k, s, n) {
            k += 1;
        }
        while k > 2 && pow_at_least(k - 1, s, n) {
            k -= 1;
        }
        Ok(ProcessParams {
            epsilon: Some(epsilon),
            s,
            k,
            seed,
        })
    }

    /// Column-t-partite regime: `k = 2`, `s = ceil(log2 n)` (at least 1).
    pub fn column_partite(n: usize, seed: u64) -> Self {
        let s = (usize::BITS - n.saturating_sub(1).leading_zeros()).max(1) as usize;
        ProcessParams {
            epsilon: None,
            s,
            k: 2,
            seed,
        }
    }

    pub fn explicit(k: usize, s: usize, seed: u64) -> Result<Self> {
        if k < 2 || s < 1 {
            return Err(Error::arg(format!("need k >= 2 and s >= 1, got k={k}, s={s}")));
        }
        Ok(ProcessParams {
            epsilon: None,
            s,
            k,
            seed,
        })
    }

    /// True if every row label below `n` has an `s`-digit base-`k` expansion.
    pub fn covers(&self, n: usize) -> bool {
        pow_at_least(self.k, self.s, n)
    }

    pub fn with_seed(self, seed: u64) -> Self {
        ProcessParams { seed, ..self }
    }
}

/// `k^s >= n` without overflow.
pub(crate) fn pow_at_least(k: usize, s: usize, n: usize) -> bool {
    let mut acc: usize = 1;
    for _ in 0..s {
        if acc >= n {
            return true;
        }
        acc = acc.saturating_mul(k);
    }
    acc >= n
}

/// `min(k^e, cap)`.
fn pow_capped(k: usize, e: usize, cap: usize) -> usize {
    let mut acc: usize = 1;
    for _ in 0..e {
        if acc >= cap {
            return cap;
        }
        acc = acc.saturating_mul(k);
    }
    acc.min(cap)
}

/// Base-`k` digits of `i`, most significant first, so that
/// `i = sum_j digits[j-1] * k^(s-j)`.
pub fn kary_digits(i: usize, k: usize, s: usize) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::arg(format!("branching factor {k} must be at least 2")));
    }
    if pow_at_least(k, s, i + 1) {
        let mut digits = vec![0; s];
        let mut rest = i;
        for d in digits.iter_mut().rev() {
            *d = rest % k;
            rest /= k;
            if rest == 0 {
                break;
            }
        }
        Ok(digits)
    } else {
        Err(Error::arg(format!("row {i} has no {s}-digit base-{k} expansion")))
    }
}

/// The nested blocks `R_0 ⊇ R_1 ⊇ ... ⊇ R_s = {r}` for a fixed row `r`:
/// `R_j` holds the rows whose first `j` digits agree with those of `r`.
/// Labels in `n..k^s` are treated as absent, so boundary blocks may be short.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowChain {
    n: usize,
    r: usize,
    /// `bounds[j] = (lo, hi)` with `R_j = lo..hi`.
    bounds: Vec<(usize, usize)>,
}

impl RowChain {
    pub fn new(n: usize, r: usize, params: &ProcessParams) -> Result<Self> {
        if r >= n {
            return Err(Error::arg(format!("row {r} out of range for {n} rows")));
        }
        if !params.covers(n) {
            return Err(Error::arg(format!(
                "k={} and s={} do not cover {n} rows",
                params.k, params.s
            )));
        }
        let bounds = (0..=params.s)
            .map(|j| {
                let size = pow_capped(params.k, params.s - j, n);
                let lo = r / size * size;
                (lo, (lo + size).min(n))
            })
            .collect();
        Ok(RowChain { n, r, bounds })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of steps `s`.
    pub fn steps(&self) -> usize {
        self.bounds.len() - 1
    }

    /// `R_j` as a half-open range.
    pub fn block(&self, j: usize) -> std::ops::Range<usize> {
        let (lo, hi) = self.bounds[j];
        lo..hi
    }

    /// Rows of `R_{j-1}` above `R_j`.
    pub fn above(&self, j: usize) -> std::ops::Range<usize> {
        self.bounds[j - 1].0..self.bounds[j].0
    }

    /// Rows of `R_{j-1}` below `R_j`.
    pub fn below(&self, j: usize) -> std::ops::Range<usize> {
        self.bounds[j].1..self.bounds[j - 1].1
    }

    /// Steps `j` in `1..=s` where `R_j` is strictly smaller than `R_{j-1}`;
    /// no other step can be shrinking.
    pub fn active_steps(&self) -> impl Iterator<Item = usize> + '_ {
        (1..self.bounds.len()).filter(move |&j| self.bounds[j] != self.bounds[j - 1])
    }
}
