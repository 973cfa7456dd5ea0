//! Agglomerative hierarchical clustering over a distance matrix.
//!
//! Plain `O(n^3)` agglomeration: repeatedly merge the closest pair of
//! clusters, recording the inter-cluster dissimilarity as the merge height,
//! and update the remaining dissimilarities with the Lance-Williams formula
//! of the chosen linkage. Ward linkage uses the squared-dissimilarity update
//! (the `ward.D2` convention) and reports square-rooted heights; inversions
//! it may produce are preserved as computed.
//!
//! Ties on the minimal distance are broken toward the lexicographically
//! smallest pair of cluster indices (leaves are 0..n-1, the merge of step t
//! gets index n+t), so results are identical across platforms.

use crate::dendrogram::Dendrogram;
use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;

/// Inter-cluster dissimilarity update rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linkage {
    /// Mean of all cross-pair distances.
    Average,
    /// Minimum-variance criterion on squared dissimilarities.
    Ward,
}

impl std::fmt::Display for Linkage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Linkage::Average => "average",
            Linkage::Ward => "ward",
        })
    }
}

impl std::str::FromStr for Linkage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "average" => Ok(Linkage::Average),
            "ward" => Ok(Linkage::Ward),
            other => Err(format!(
                "unknown linkage '{other}' (expected average or ward)"
            )),
        }
    }
}

/// Builds the merge tree of `matrix` under the given linkage.
pub fn agglomerate(matrix: &DistanceMatrix, linkage: Linkage) -> Result<Dendrogram> {
    let n = matrix.size();
    if n < 2 {
        return Err(Error::TooFewTexts { n, min: 2 });
    }
    let total = 2 * n - 1;
    // Working dissimilarities indexed by cluster id; Ward works on squares.
    let mut work = vec![0.0f64; total * total];
    for i in 0..n {
        for j in 0..n {
            let d = matrix.get(i, j);
            work[i * total + j] = match linkage {
                Linkage::Average => d,
                Linkage::Ward => d * d,
            };
        }
    }
    let mut sizes = vec![0usize; total];
    // Children of a merge are ordered by the smallest original leaf index
    // they contain, so trees read in input order.
    let mut min_leaf = vec![usize::MAX; total];
    let mut nodes: Vec<Option<Dendrogram>> = Vec::with_capacity(total);
    for (i, label) in matrix.labels().iter().enumerate() {
        sizes[i] = 1;
        min_leaf[i] = i;
        nodes.push(Some(Dendrogram::leaf(label.clone())));
    }
    nodes.resize(total, None);

    let mut active: Vec<usize> = (0..n).collect();
    for step in 0..n - 1 {
        // Closest active pair, ties toward the smallest (i, j).
        let (mut best_i, mut best_j) = (active[0], active[1]);
        let mut best = f64::INFINITY;
        for (a_pos, &i) in active.iter().enumerate() {
            for &j in &active[a_pos + 1..] {
                let d = work[i * total + j];
                if d < best || (d == best && (i, j) < (best_i, best_j)) {
                    best = d;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        let height = match linkage {
            Linkage::Average => best,
            Linkage::Ward => best.sqrt(),
        };
        let new_id = n + step;
        let (ni, nj) = (sizes[best_i] as f64, sizes[best_j] as f64);
        for &k in &active {
            if k == best_i || k == best_j {
                continue;
            }
            let (dki, dkj) = (work[k * total + best_i], work[k * total + best_j]);
            let merged = match linkage {
                Linkage::Average => (ni * dki + nj * dkj) / (ni + nj),
                Linkage::Ward => {
                    let nk = sizes[k] as f64;
                    ((ni + nk) * dki + (nj + nk) * dkj - nk * best) / (ni + nj + nk)
                }
            };
            work[k * total + new_id] = merged;
            work[new_id * total + k] = merged;
        }
        sizes[new_id] = sizes[best_i] + sizes[best_j];
        min_leaf[new_id] = min_leaf[best_i].min(min_leaf[best_j]);
        let (first, second) = if min_leaf[best_i] <= min_leaf[best_j] {
            (best_i, best_j)
        } else {
            (best_j, best_i)
        };
        let left = nodes[first].take().expect("active node present");
        let right = nodes[second].take().expect("active node present");
        nodes[new_id] = Some(Dendrogram::merge(left, right, height));
        active.retain(|&id| id != best_i && id != best_j);
        active.push(new_id);
    }
    Ok(nodes[total - 1].take().expect("root remains"))
}

/// Flat cut into `k` clusters: splits the highest remaining merge `k - 1`
/// times. Clusters come back in root order, labels in traversal order.
pub fn cut(tree: &Dendrogram, k: usize) -> Result<Vec<Vec<String>>> {
    let leaves = tree.size();
    if k < 1 || k > leaves {
        return Err(Error::InvalidCut { k, leaves });
    }
    let mut roots: Vec<&Dendrogram> = vec![tree];
    for _ in 1..k {
        let split_pos = roots
            .iter()
            .enumerate()
            .filter(|(_, node)| matches!(node, Dendrogram::Merge { .. }))
            .max_by(|(_, a), (_, b)| {
                a.height()
                    .partial_cmp(&b.height())
                    .expect("heights are finite")
            })
            .map(|(pos, _)| pos)
            .expect("a mergeable root exists while k <= leaf count");
        let node = roots.remove(split_pos);
        if let Dendrogram::Merge { left, right, .. } = node {
            roots.insert(split_pos, right);
            roots.insert(split_pos, left);
        }
    }
    Ok(roots.iter().map(|node| node.leaf_labels()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DistanceMatrix;
    use proptest::prelude::*;

    fn matrix3(d12: f64, d13: f64, d23: f64) -> DistanceMatrix {
        DistanceMatrix::new(
            vec!["l1".into(), "l2".into(), "l3".into()],
            vec![0.0, d12, d13, d12, 0.0, d23, d13, d23, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn two_texts_merge_at_their_distance() {
        let m =
            DistanceMatrix::new(vec!["a".into(), "b".into()], vec![0.0, 0.37, 0.37, 0.0]).unwrap();
        let tree = agglomerate(&m, Linkage::Average).unwrap();
        assert_eq!(tree.size(), 2);
        assert_eq!(tree.height(), 0.37);
    }

    #[test]
    fn three_leaf_average_linkage_by_hand() {
        // Merge {1,2} at .2, then the average of .9 and .7 gives .8.
        let m = matrix3(0.2, 0.9, 0.7);
        let tree = agglomerate(&m, Linkage::Average).unwrap();
        match &tree {
            Dendrogram::Merge {
                left,
                right,
                height,
                size,
            } => {
                assert_eq!(*size, 3);
                assert!((height - 0.8).abs() < 1e-12);
                assert_eq!(left.leaf_labels(), vec!["l1", "l2"]);
                assert!((left.height() - 0.2).abs() < 1e-12);
                assert_eq!(right.leaf_labels(), vec!["l3"]);
            }
            _ => panic!("expected a merge at the root"),
        }
        assert_eq!(
            crate::dendrogram::to_newick(&tree),
            "((l1:0.2,l2:0.2):0.6,l3:0.8);"
        );
    }

    #[test]
    fn three_leaf_ward_linkage_by_hand() {
        // First merge at d(1,2) = .2; then
        // d(3, {1,2})^2 = (2*.9^2 + 2*.7^2 - .2^2) / 3.
        let m = matrix3(0.2, 0.9, 0.7);
        let tree = agglomerate(&m, Linkage::Ward).unwrap();
        let want = ((2.0 * 0.81 + 2.0 * 0.49 - 0.04) / 3.0f64).sqrt();
        assert!((tree.height() - want).abs() < 1e-12);
        match &tree {
            Dendrogram::Merge { left, .. } => {
                assert!((left.height() - 0.2).abs() < 1e-12);
            }
            _ => panic!("expected a merge at the root"),
        }
    }

    fn planted_two_groups(n1: usize, n2: usize) -> DistanceMatrix {
        let n = n1 + n2;
        let labels: Vec<String> = (0..n)
            .map(|i| {
                if i < n1 {
                    format!("g1-{i}")
                } else {
                    format!("g2-{i}")
                }
            })
            .collect();
        let mut values = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let same = (i < n1) == (j < n1);
                // Slight deterministic jitter keeps pair distances distinct.
                let jitter = ((i * 31 + j * 17) % 7) as f64 * 0.004;
                values[i * n + j] = if same { 0.05 + jitter } else { 0.9 + jitter };
            }
        }
        // Symmetrize the jitter.
        for i in 0..n {
            for j in i + 1..n {
                let v = values[i * n + j].min(values[j * n + i]);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        DistanceMatrix::new(labels, values).unwrap()
    }

    #[test]
    fn tight_groups_split_at_the_top_for_both_linkages() {
        let m = planted_two_groups(4, 3);
        for linkage in [Linkage::Average, Linkage::Ward] {
            let tree = agglomerate(&m, linkage).unwrap();
            let parts = cut(&tree, 2).unwrap();
            let mut sets: Vec<Vec<String>> = parts
                .into_iter()
                .map(|mut p| {
                    p.sort();
                    p
                })
                .collect();
            sets.sort();
            assert_eq!(sets[0], vec!["g1-0", "g1-1", "g1-2", "g1-3"]);
            assert_eq!(sets[1], vec!["g2-4", "g2-5", "g2-6"]);
        }
    }

    #[test]
    fn cut_edge_cases() {
        let m = planted_two_groups(2, 2);
        let tree = agglomerate(&m, Linkage::Average).unwrap();
        let all = cut(&tree, 1).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].len(), 4);
        let singletons = cut(&tree, 4).unwrap();
        assert_eq!(singletons.len(), 4);
        assert!(singletons.iter().all(|c| c.len() == 1));
        assert!(matches!(cut(&tree, 0), Err(Error::InvalidCut { .. })));
        assert!(matches!(cut(&tree, 5), Err(Error::InvalidCut { .. })));
    }

    /// Reference implementation that recomputes average inter-cluster
    /// distances from the raw matrix at every step.
    fn average_reference(m: &DistanceMatrix) -> Vec<(usize, usize, f64)> {
        let n = m.size();
        // (cluster id, member leaf indices)
        let mut clusters: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
        let mut merges = Vec::new();
        for step in 0..n - 1 {
            let mut best = f64::INFINITY;
            let mut best_pair = (usize::MAX, usize::MAX);
            let mut best_pos = (0, 0);
            for a in 0..clusters.len() {
                for b in a + 1..clusters.len() {
                    let (ia, ma) = &clusters[a];
                    let (ib, mb) = &clusters[b];
                    let mut sum = 0.0;
                    for &x in ma {
                        for &y in mb {
                            sum += m.get(x, y);
                        }
                    }
                    let avg = sum / (ma.len() * mb.len()) as f64;
                    let pair = if ia < ib { (*ia, *ib) } else { (*ib, *ia) };
                    if avg < best || (avg == best && pair < best_pair) {
                        best = avg;
                        best_pair = pair;
                        best_pos = (a, b);
                    }
                }
            }
            merges.push((best_pair.0, best_pair.1, best));
            let (_, members_b) = clusters.remove(best_pos.1);
            let (_, members_a) = clusters.remove(best_pos.0);
            let mut merged = members_a;
            merged.extend(members_b);
            clusters.push((n + step, merged));
        }
        merges
    }

    /// Collects (left id, right id, height) from the tree in merge order by
    /// replaying sizes: not possible directly, so rebuild by recursion depth.
    fn collect_heights(tree: &Dendrogram, out: &mut Vec<f64>) {
        if let Dendrogram::Merge {
            left,
            right,
            height,
            ..
        } = tree
        {
            collect_heights(left, out);
            collect_heights(right, out);
            out.push(*height);
        }
    }

    fn random_matrix(n: usize, seed: u64) -> DistanceMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let labels = (0..n).map(|i| format!("t{i}")).collect();
        let mut values = vec![0.0f64; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = rng.gen_range(0.01..1.0);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        DistanceMatrix::new(labels, values).unwrap()
    }

    #[test]
    fn average_linkage_matches_reference_on_random_matrices() {
        for seed in 0..120 {
            let n = 3 + (seed as usize % 4);
            let m = random_matrix(n, seed);
            let tree = agglomerate(&m, Linkage::Average).unwrap();
            let reference = average_reference(&m);
            // The root-last traversal pushes heights bottom-up; sort both
            // sides since traversal and merge order may differ.
            let mut got: Vec<f64> = Vec::new();
            collect_heights(&tree, &mut got);
            got.sort_by(f64::total_cmp);
            let mut want: Vec<f64> = reference.iter().map(|&(_, _, h)| h).collect();
            want.sort_by(f64::total_cmp);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-12, "seed {seed}: {g} vs {w}");
            }
        }
    }

    proptest! {
        // Average-linkage merge heights never decrease.
        #[test]
        fn average_heights_are_monotone(seed in any::<u64>(), n in 3usize..9) {
            let m = random_matrix(n, seed);
            let tree = agglomerate(&m, Linkage::Average).unwrap();
            fn check(node: &Dendrogram) {
                if let Dendrogram::Merge { left, right, height, .. } = node {
                    assert!(left.height() <= height + 1e-12);
                    assert!(right.height() <= height + 1e-12);
                    check(left);
                    check(right);
                }
            }
            check(&tree);
        }

        // Relabeling the matrix permutes leaves but keeps the same merges.
        #[test]
        fn invariant_under_relabeling(seed in any::<u64>(), n in 3usize..8) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let m = random_matrix(n, seed);
            let mut order: Vec<usize> = (0..n).collect();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            order.shuffle(&mut rng);
            let labels: Vec<String> =
                order.iter().map(|&i| m.labels()[i].clone()).collect();
            let mut values = vec![0.0f64; n * n];
            for i in 0..n {
                for j in 0..n {
                    values[i * n + j] = m.get(order[i], order[j]);
                }
            }
            let permuted = DistanceMatrix::new(labels, values).unwrap();

            let t1 = agglomerate(&m, Linkage::Average).unwrap();
            let t2 = agglomerate(&permuted, Linkage::Average).unwrap();

            // Same multiset of (height, leaf set) merges.
            fn merges(node: &Dendrogram, out: &mut Vec<(u64, Vec<String>)>) {
                if let Dendrogram::Merge { left, right, height, .. } = node {
                    let mut labels = node.leaf_labels();
                    labels.sort();
                    out.push((height.to_bits(), labels));
                    merges(left, out);
                    merges(right, out);
                }
            }
            let (mut m1, mut m2) = (Vec::new(), Vec::new());
            merges(&t1, &mut m1);
            merges(&t2, &mut m2);
            m1.sort();
            m2.sort();
            prop_assert_eq!(m1, m2);
        }

        // Finer cuts refine coarser ones.
        #[test]
        fn cuts_are_nested(seed in any::<u64>(), n in 3usize..9) {
            let m = random_matrix(n, seed);
            let tree = agglomerate(&m, Linkage::Average).unwrap();
            for k in 1..n {
                let coarse = cut(&tree, k).unwrap();
                let fine = cut(&tree, k + 1).unwrap();
                for cluster in &fine {
                    let found = coarse.iter().any(|big| {
                        cluster.iter().all(|label| big.contains(label))
                    });
                    prop_assert!(found, "k={k}: {cluster:?} not nested");
                }
            }
        }
    }
}
