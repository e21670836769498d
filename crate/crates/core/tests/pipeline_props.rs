use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zomat_core::pipeline::classify::{classify_steps, StepType, Subtype};
use zomat_core::pipeline::params::{kary_digits, ProcessParams, RowChain};
use zomat_core::pipeline::tree::{build_prefix_tree, count_leaves_few_branching, RootedTree};
use zomat_core::pipeline::{embed_column_t_partite, pad_pattern, pad_partite, EmbedPath};
use zomat_core::{embed_via_pipeline, find_embedding, oracle_contains, Embedding, Matrix01, Pattern};

/// A random instance: matrix, base row, a column set of the base row, and
/// explicit parameters.
fn instance(seed: u64) -> Option<(Matrix01, usize, Vec<usize>, ProcessParams)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k: usize = rng.gen_range(2..=3);
    let s = rng.gen_range(1..=5);
    let top = k.pow(s);
    let n = rng.gen_range(1..=top.min(100));
    let m = Matrix01::random(n, 8, rng.gen_range(0.3..0.95), &mut rng);
    let r = rng.gen_range(0..n);
    let ones = m.row_ones(r);
    if ones.is_empty() {
        return None;
    }
    let size = rng.gen_range(1..=ones.len().min(3));
    let mut e: Vec<usize> = rand::seq::index::sample(&mut rng, ones.len(), size)
        .into_iter()
        .map(|i| ones[i])
        .collect();
    e.sort();
    Some((m, r, e, ProcessParams::explicit(k, s as usize, seed).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn chain_counts_and_witnesses(seed in any::<u64>()) {
        let Some((m, r, e, params)) = instance(seed) else { return Ok(()) };
        let c = classify_steps(&m, r, &e, &params).unwrap();
        let chain = RowChain::new(m.n_rows(), r, &params).unwrap();
        prop_assert_eq!(chain.block(params.s), r..r + 1);
        prop_assert!(c.counts.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(*c.counts.last().unwrap(), 1);
        for j in 1..=params.s {
            let shrinks = c.counts[j] < c.counts[j - 1];
            prop_assert_eq!(shrinks, c.steps[j - 1].is_shrinking());
            match c.steps[j - 1] {
                StepType::NonShrinking => prop_assert_eq!(c.witnesses[j - 1], None),
                StepType::Shrinking(z) => {
                    let w = c.witnesses[j - 1].unwrap();
                    let side = if z == Subtype::Up { chain.above(j) } else { chain.below(j) };
                    prop_assert!(side.contains(&w));
                    prop_assert!(e.iter().all(|&col| m.get(w, col)));
                    if z == Subtype::Down {
                        prop_assert!(chain.above(j).all(|i| !e.iter().all(|&col| m.get(i, col))));
                    }
                }
            }
        }
    }

    #[test]
    fn shrinking_steps_are_branching_nodes(seed in any::<u64>()) {
        let Some((m, r, e, params)) = instance(seed) else { return Ok(()) };
        let c = classify_steps(&m, r, &e, &params).unwrap();
        let common: Vec<usize> = (0..m.n_rows()).filter(|&i| e.iter().all(|&col| m.get(i, col))).collect();
        let tree = build_prefix_tree(&common, params.k, params.s).unwrap();
        let digits = kary_digits(r, params.k, params.s).unwrap();
        for j in 1..=params.s {
            let node = tree.node_for(&digits[..j - 1]).unwrap();
            prop_assert_eq!(tree.tree().is_branching(node), c.steps[j - 1].is_shrinking());
        }
    }

    #[test]
    fn mirror_swaps_subtypes(seed in any::<u64>()) {
        let Some((m, r, e, params)) = instance(seed) else { return Ok(()) };
        let full = params.k.pow(params.s as u32);
        let mirrored = m.pad_rows(full).mirror_vertical();
        let c = classify_steps(&m, r, &e, &params).unwrap();
        let d = classify_steps(&mirrored, full - 1 - r, &e, &params).unwrap();
        let chain = RowChain::new(m.n_rows(), r, &params).unwrap();
        let common = |i: usize| e.iter().all(|&col| m.get(i, col));
        for (j, (x, y)) in (1..).zip(c.steps.iter().zip(&d.steps)) {
            match (x, y) {
                (StepType::NonShrinking, StepType::NonShrinking) => {}
                (StepType::Shrinking(a), StepType::Shrinking(b)) => {
                    // common rows on both sides: "up" wins in both orientations
                    let both = chain.above(j).any(common) && chain.below(j).any(common);
                    if both {
                        prop_assert_eq!((*a, *b), (Subtype::Up, Subtype::Up));
                    } else {
                        prop_assert_eq!(a.flip(), *b);
                    }
                }
                _ => prop_assert!(false, "types differ: {:?} vs {:?}", x, y),
            }
            if params.k == 2 {
                prop_assert_eq!(x.subtype().map(Subtype::flip), y.subtype());
            }
        }
    }

    #[test]
    fn leaf_bound_on_random_trees(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.gen_range(1..=4usize);
        let mut t = RootedTree::new();
        let mut frontier = vec![t.root()];
        for _ in 0..rng.gen_range(0..=6) {
            let mut next = Vec::new();
            for v in frontier {
                for _ in 0..rng.gen_range(0..=k) {
                    next.push(t.add_child(v));
                }
            }
            frontier = next;
        }
        for m in 0..=7u32 {
            prop_assert!(count_leaves_few_branching(&t, m as usize) <= k.pow(m));
        }
    }

    #[test]
    fn padding_transfers_embeddings(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Pattern::new(Matrix01::random(rng.gen_range(1..=3), rng.gen_range(1..=3), 0.6, &mut rng)).unwrap();
        let padded = pad_pattern(&a);
        prop_assert!((0..padded.rows()).all(|u| padded.matrix().row_weight(u) == a.t()));
        prop_assert!(padded.matrix().submatrix(&(0..a.rows()).collect::<Vec<_>>(), &(0..a.cols()).collect::<Vec<_>>()) == *a.matrix());
        let m = Matrix01::random(8, 8, 0.8, &mut rng);
        if let Some(e) = find_embedding(&m, &padded).unwrap() {
            prop_assert!(e.restrict_cols(a.cols()).is_valid(&m, a.matrix()));
        }
    }

    #[test]
    fn pipeline_results_are_sound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Pattern::new(Matrix01::random(rng.gen_range(1..=3), rng.gen_range(1..=3), 0.6, &mut rng)).unwrap();
        let m = Matrix01::random(6, 6, rng.gen_range(0.3..1.0), &mut rng);
        let out = embed_via_pipeline(&m, &a, 0.05, seed, 4).unwrap();
        prop_assert_eq!(out.embedding.is_some(), oracle_contains(&m, &a).unwrap());
        if let Some(e) = &out.embedding {
            prop_assert!(e.is_valid(&m, a.matrix()));
        }
        prop_assert_eq!(out.path == EmbedPath::NotFound, out.embedding.is_none());
        if let Some(cut) = a.detect_column_cut() {
            let a = Pattern::with_cut(a.matrix().clone(), cut).unwrap();
            let out = embed_column_t_partite(&m, &a, seed, 4).unwrap();
            prop_assert_eq!(out.embedding.is_some(), oracle_contains(&m, &a).unwrap());
            if let Some(e) = &out.embedding {
                prop_assert!(e.is_valid(&m, a.matrix()));
            }
        }
    }
}

#[test]
fn partite_padding_restores_columns() {
    let a = Pattern::with_cut("1001\n0100\n0010".parse().unwrap(), vec![2, 2]).unwrap();
    let (padded, pos) = pad_partite(&a).unwrap();
    let m = Matrix01::ones(12, 12);
    let e = find_embedding(&m, &padded).unwrap().unwrap();
    let back = Embedding::new(e.row_map.clone(), pos.iter().map(|&q| e.col_map[q]).collect());
    assert!(back.is_valid(&m, a.matrix()));
}

#[test]
fn dense_hosts_use_the_pipeline() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = Pattern::parse("101\n011\n110").unwrap();
    let m = Matrix01::random(64, 64, 0.9, &mut rng);
    let out = embed_via_pipeline(&m, &p, 0.05, 1, 32).unwrap();
    let e = out.embedding.unwrap();
    assert!(e.is_valid(&m, p.matrix()));
    if out.path == EmbedPath::Pipeline {
        for set in &out.trace.tracked {
            assert!(set.steps.iter().filter(|s| s.is_shrinking()).count() >= 6);
        }
    }
}
