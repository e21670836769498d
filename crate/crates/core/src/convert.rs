//! Ordered bipartite graphs (every vertex of `X` precedes every vertex of
//! `Y`) and their correspondence with zero-one matrices.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::containment::find_embedding;
use crate::error::{Error, Result};
use crate::matrix::Matrix01;
use crate::pattern::Pattern;

/// Side limit for the host graph in [`containment_transfer_check`].
pub const TRANSFER_MAX_HOST: usize = 6;
/// Side limit for the pattern graph in [`containment_transfer_check`].
pub const TRANSFER_MAX_PATTERN: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedBipartiteGraph {
    x_size: usize,
    y_size: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl OrderedBipartiteGraph {
    pub fn new(
        x_size: usize,
        y_size: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (x, y) in edges {
            if x >= x_size || y >= y_size {
                return Err(Error::arg(format!(
                    "edge ({x},{y}) out of range for sides {x_size} and {y_size}"
                )));
            }
            if !set.insert((x, y)) {
                return Err(Error::arg(format!("duplicate edge ({x},{y})")));
            }
        }
        Ok(OrderedBipartiteGraph {
            x_size,
            y_size,
            edges: set,
        })
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.edges.contains(&(x, y))
    }

    /// Position of a vertex in the global order: `X` first, then `Y`.
    pub fn position(&self, side: Side, index: usize) -> usize {
        match side {
            Side::X => index,
            Side::Y => self.x_size + index,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    X,
    Y,
}

/// Text format: `"x_size y_size"` on the first line, then one `"x y"` edge
/// per line.
impl fmt::Display for OrderedBipartiteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.x_size, self.y_size)?;
        for (x, y) in &self.edges {
            writeln!(f, "{x} {y}")?;
        }
        Ok(())
    }
}

impl FromStr for OrderedBipartiteGraph {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let pair = |idx: usize, line: &str| -> Result<(usize, usize)> {
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
                _ => Err(Error::format(idx + 1, format!("expected two integers, got {line:?}"))),
            }
        };
        let (x_size, y_size) = match lines.next() {
            Some((idx, line)) => pair(idx, line)?,
            None => return Err(Error::format(1, "empty input")),
        };
        let edges = lines
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(idx, l)| pair(idx, l))
            .collect::<Result<Vec<_>>>()?;
        OrderedBipartiteGraph::new(x_size, y_size, edges)
    }
}

/// `H_A`: one vertex per row (side `X`) and per column (side `Y`), with an
/// edge wherever `A` has a 1.
pub fn matrix_to_graph(a: &Matrix01) -> OrderedBipartiteGraph {
    OrderedBipartiteGraph {
        x_size: a.n_rows(),
        y_size: a.n_cols(),
        edges: a.ones_iter().collect(),
    }
}

/// `A_H`: rows indexed by `X`, columns by `Y`.
pub fn graph_to_matrix(h: &OrderedBipartiteGraph) -> Matrix01 {
    let mut m = Matrix01::zeros(h.x_size, h.y_size);
    for &(x, y) in &h.edges {
        m.set(x, y, true);
    }
    m
}

/// Does `g` contain `h` as an ordered subgraph? Searches directly for an
/// order-preserving injection of `h`'s vertex sequence into `g`'s that keeps
/// every vertex on its side and sends edges to edges.
pub fn contains_ordered_subgraph(g: &OrderedBipartiteGraph, h: &OrderedBipartiteGraph) -> bool {
    // vertices of h in global order
    let h_vertices: Vec<(Side, usize)> = (0..h.x_size)
        .map(|x| (Side::X, x))
        .chain((0..h.y_size).map(|y| (Side::Y, y)))
        .collect();
    let mut image = vec![0usize; h_vertices.len()];
    extend(g, h, &h_vertices, &mut image, 0, 0)
}

fn extend(
    g: &OrderedBipartiteGraph,
    h: &OrderedBipartiteGraph,
    h_vertices: &[(Side, usize)],
    image: &mut [usize],
    next: usize,
    first_free: usize,
) -> bool {
    if next == h_vertices.len() {
        return true;
    }
    let (side, idx) = h_vertices[next];
    let g_total = g.x_size + g.y_size;
    let (lo, hi) = match side {
        Side::X => (first_free, g.x_size),
        Side::Y => (first_free.max(g.x_size), g_total),
    };
    for pos in lo..hi {
        let ok = match side {
            Side::X => true,
            // every edge into this Y vertex must land on an edge of g
            Side::Y => (0..h.x_size)
                .filter(|&x| h.has_edge(x, idx))
                .all(|x| g.has_edge(image[x], pos - g.x_size)),
        };
        if ok {
            image[next] = pos;
            if extend(g, h, h_vertices, image, next + 1, pos + 1) {
                return true;
            }
        }
    }
    false
}

/// Cross-check ordered-subgraph containment of graphs against matrix
/// containment of their matrices. Returns `true` when the two agree.
pub fn containment_transfer_check(g: &OrderedBipartiteGraph, h: &OrderedBipartiteGraph) -> Result<bool> {
    if g.x_size > TRANSFER_MAX_HOST || g.y_size > TRANSFER_MAX_HOST {
        return Err(Error::arg(format!(
            "host graph sides {}x{} exceed {TRANSFER_MAX_HOST}",
            g.x_size, g.y_size
        )));
    }
    if h.x_size > TRANSFER_MAX_PATTERN || h.y_size > TRANSFER_MAX_PATTERN {
        return Err(Error::arg(format!(
            "pattern graph sides {}x{} exceed {TRANSFER_MAX_PATTERN}",
            h.x_size, h.y_size
        )));
    }
    if h.x_size == 0 || h.y_size == 0 {
        return Err(Error::arg("pattern graph needs a vertex on each side"));
    }
    let by_graph = contains_ordered_subgraph(g, h);
    let pattern = Pattern::new(graph_to_matrix(h))?;
    let by_matrix = find_embedding(&graph_to_matrix(g), &pattern)?.is_some();
    Ok(by_graph == by_matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_and_zero_graphs() {
        let g = matrix_to_graph(&Matrix01::identity(2));
        assert_eq!(g.edges().iter().copied().collect::<Vec<_>>(), vec![(0, 0), (1, 1)]);
        assert!(matrix_to_graph(&Matrix01::zeros(3, 2)).edges().is_empty());
    }

    #[test]
    fn figure_two_pattern_has_six_edges() {
        let a: Matrix01 = "101\n011\n110".parse().unwrap();
        let g = matrix_to_graph(&a);
        assert_eq!(g.edges().len(), 6);
        assert!(a.ones_iter().all(|(u, y)| g.has_edge(u, y)));
        assert_eq!(g.position(Side::Y, 0), 3);
    }

    #[test]
    fn graph_to_matrix_examples() {
        let empty = OrderedBipartiteGraph::new(2, 3, []).unwrap();
        assert_eq!(graph_to_matrix(&empty), Matrix01::zeros(2, 3));
        let single = OrderedBipartiteGraph::new(1, 1, [(0, 0)]).unwrap();
        assert_eq!(graph_to_matrix(&single), Matrix01::ones(1, 1));
    }

    #[test]
    fn constructor_rejects_bad_edges() {
        assert!(OrderedBipartiteGraph::new(1, 1, [(1, 0)]).is_err());
        assert!(OrderedBipartiteGraph::new(2, 2, [(0, 1), (0, 1)]).is_err());
    }

    #[test]
    fn text_format() {
        let g = OrderedBipartiteGraph::new(2, 3, [(1, 2), (0, 0)]).unwrap();
        assert_eq!(g.to_string(), "2 3\n0 0\n1 2\n");
        assert_eq!(g.to_string().parse::<OrderedBipartiteGraph>().unwrap(), g);
        assert!("2 3\n0 x\n".parse::<OrderedBipartiteGraph>().is_err());
        assert!("".parse::<OrderedBipartiteGraph>().is_err());
        assert!("1 1\n0 0 0\n".parse::<OrderedBipartiteGraph>().is_err());
    }

    #[test]
    fn transfer_examples() {
        let g = matrix_to_graph(&"101\n011\n110".parse().unwrap());
        assert!(containment_transfer_check(&g, &matrix_to_graph(&Matrix01::identity(2))).unwrap());
        let anti = matrix_to_graph(&"01\n10".parse().unwrap());
        let diag = matrix_to_graph(&Matrix01::identity(2));
        assert!(!contains_ordered_subgraph(&anti, &diag));
        assert!(containment_transfer_check(&anti, &diag).unwrap());
        assert!(containment_transfer_check(&anti, &anti).unwrap());
        assert!(containment_transfer_check(&matrix_to_graph(&Matrix01::ones(7, 1)), &diag).is_err());
    }

    fn arb_matrix(max: usize) -> impl Strategy<Value = Matrix01> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec(any::<bool>(), r * c)
                .prop_map(move |v| Matrix01::from_fn(r, c, |i, j| v[i * c + j]))
        })
    }

    proptest! {
        #[test]
        fn bijection(m in arb_matrix(4)) {
            let g = matrix_to_graph(&m);
            prop_assert_eq!(graph_to_matrix(&g), m);
            prop_assert_eq!(matrix_to_graph(&graph_to_matrix(&g)), g);
        }

        #[test]
        fn containment_agrees(g in arb_matrix(4), h in arb_matrix(3)) {
            let (g, h) = (matrix_to_graph(&g), matrix_to_graph(&h));
            prop_assert!(containment_transfer_check(&g, &h).unwrap());
        }
    }
}
