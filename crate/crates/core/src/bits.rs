//! Helpers over packed `u64` bit rows. Bit `j` of a row lives in word
//! `j / 64` at position `j % 64`.

pub(crate) const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[inline]
pub(crate) fn test(words: &[u64], j: usize) -> bool {
    words[j / WORD] >> (j % WORD) & 1 == 1
}

#[inline]
pub(crate) fn set(words: &mut [u64], j: usize) {
    words[j / WORD] |= 1 << (j % WORD);
}

#[inline]
pub(crate) fn clear(words: &mut [u64], j: usize) {
    words[j / WORD] &= !(1 << (j % WORD));
}

/// Smallest set bit with index `>= from`.
pub(crate) fn next_set(words: &[u64], from: usize) -> Option<usize> {
    let mut w = from / WORD;
    if w >= words.len() {
        return None;
    }
    let mut cur = words[w] & (!0u64 << (from % WORD));
    loop {
        if cur != 0 {
            return Some(w * WORD + cur.trailing_zeros() as usize);
        }
        w += 1;
        if w == words.len() {
            return None;
        }
        cur = words[w];
    }
}

/// Number of set bits with index in `lo..hi`.
pub(crate) fn count_range(words: &[u64], lo: usize, hi: usize) -> usize {
    if lo >= hi {
        return 0;
    }
    let (lw, hw) = (lo / WORD, (hi - 1) / WORD);
    let lo_mask = !0u64 << (lo % WORD);
    let hi_mask = !0u64 >> (WORD - 1 - (hi - 1) % WORD);
    if lw == hw {
        return (words[lw] & lo_mask & hi_mask).count_ones() as usize;
    }
    let mut total = (words[lw] & lo_mask).count_ones() + (words[hw] & hi_mask).count_ones();
    for w in &words[lw + 1..hw] {
        total += w.count_ones();
    }
    total as usize
}

/// Smallest set bit in `lo..hi`.
pub(crate) fn first_in_range(words: &[u64], lo: usize, hi: usize) -> Option<usize> {
    next_set(words, lo).filter(|&j| j < hi)
}

/// Largest set bit in `lo..hi`.
pub(crate) fn last_in_range(words: &[u64], lo: usize, hi: usize) -> Option<usize> {
    let mut j = hi;
    while j > lo {
        j -= 1;
        let w = words[j / WORD] & (!0u64 >> (WORD - 1 - j % WORD));
        if w == 0 {
            // jump to the end of the previous word
            j -= j % WORD;
            continue;
        }
        let top = j / WORD * WORD + (WORD - 1 - w.leading_zeros() as usize);
        return (top >= lo).then_some(top);
    }
    None
}

pub(crate) fn popcount(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}
