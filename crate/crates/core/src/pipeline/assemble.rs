use crate::error::{Error, Result};
use crate::matrix::Matrix01;
use crate::pattern::Embedding;
use crate::pipeline::classify::{Color, Subtype};
use crate::pipeline::params::RowChain;

/// Build an embedding of `pattern` on the increasing columns `columns`,
/// taking row `u` from the rows that step `j_u` of `color` cuts away.
///
/// For `Down`, the steps are used largest first and row `u` is the topmost
/// suitable row below `R_{j_u}`; the blocks are nested, so the rows come
/// out increasing. `Up` is the mirror image: steps smallest first, and the
/// bottommost suitable row above `R_{j_u}`.
pub fn assemble_embedding(
    m: &Matrix01,
    pattern: &Matrix01,
    chain: &RowChain,
    columns: &[usize],
    color: &Color,
) -> Result<Embedding> {
    let (a, b) = pattern.dims();
    if columns.len() != b || color.steps.len() != a {
        return Err(Error::Internal(format!(
            "{} columns and {} steps for a {a}x{b} pattern",
            columns.len(),
            color.steps.len()
        )));
    }
    if columns.windows(2).any(|w| w[0] >= w[1]) || color.steps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Internal("columns and steps must be increasing".into()));
    }
    let mut steps = color.steps.clone();
    if color.subtype == Subtype::Down {
        steps.reverse();
    }
    let mut rows = Vec::with_capacity(a);
    for (u, &j) in steps.iter().enumerate() {
        if j == 0 || j > chain.steps() {
            return Err(Error::Internal(format!("step {j} outside 1..={}", chain.steps())));
        }
        let need: Vec<usize> = pattern.row_ones(u).into_iter().map(|y| columns[y]).collect();
        let fits = |i: &usize| need.iter().all(|&c| m.get(*i, c));
        let pick = match color.subtype {
            Subtype::Down => chain.below(j).find(fits),
            Subtype::Up => chain.above(j).rev().find(fits),
        };
        match pick {
            Some(i) => rows.push(i),
            None => {
                return Err(Error::Internal(format!(
                    "step {j} has no {} row for pattern row {u}",
                    color.subtype
                )))
            }
        }
    }
    let e = Embedding::new(rows, columns.to_vec());
    e.validate(m, pattern)
        .map_err(|err| Error::Internal(format!("assembled embedding is invalid: {err}")))?;
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::params::ProcessParams;

    #[test]
    fn single_row_pattern() {
        let p = ProcessParams::explicit(2, 3, 0).unwrap();
        let mut m = Matrix01::zeros(8, 4);
        m.set(0, 1, true);
        m.set(0, 3, true);
        m.set(5, 1, true);
        m.set(5, 3, true);
        let chain = RowChain::new(8, 0, &p).unwrap();
        let color = Color {
            subtype: Subtype::Down,
            steps: vec![1],
        };
        let e = assemble_embedding(&m, &"11".parse().unwrap(), &chain, &[1, 3], &color).unwrap();
        assert_eq!(e, Embedding::new(vec![5], vec![1, 3]));
        let bad = Color {
            subtype: Subtype::Down,
            steps: vec![3],
        };
        assert!(matches!(
            assemble_embedding(&m, &"11".parse().unwrap(), &chain, &[1, 3], &bad),
            Err(Error::Internal(_))
        ));
    }
}
