/// Strongly connected components: `labels[v]` lies in `[0, count)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccResult {
    pub count: usize,
    pub labels: Vec<usize>,
}

const UNVISITED: usize = usize::MAX;

/// Iterative Tarjan over an adjacency list. Components are numbered in the
/// order they are completed (reverse topological order of the condensation).
pub fn tarjan_scc(adjacency: &[Vec<usize>]) -> SccResult {
    let n = adjacency.len();
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut labels = vec![UNVISITED; n];
    let mut stack: Vec<usize> = Vec::new();
    // (vertex, next edge position)
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0usize;
    let mut count = 0usize;

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&(v, pos)) = call.last() {
            if let Some(&w) = adjacency[v].get(pos) {
                if let Some(top) = call.last_mut() {
                    top.1 += 1;
                }
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                lowlink[parent] = lowlink[parent].min(lowlink[v]);
            }
            if lowlink[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    labels[w] = count;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
        }
    }
    SccResult { count, labels }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn disjoint_two_cycles() {
        let g = vec![vec![1], vec![0], vec![3], vec![2]];
        let r = tarjan_scc(&g);
        assert_eq!(r.count, 2);
        assert_eq!(r.labels[0], r.labels[1]);
        assert_eq!(r.labels[2], r.labels[3]);
        assert_ne!(r.labels[0], r.labels[2]);
    }

    #[test]
    fn directed_path() {
        let n = 500;
        let g: Vec<Vec<usize>> = (0..n)
            .map(|k| if k + 1 < n { vec![k + 1] } else { vec![] })
            .collect();
        let r = tarjan_scc(&g);
        assert_eq!(r.count, n);
        let mut seen = r.labels.clone();
        seen.sort_unstable();
        assert_eq!(seen, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn deep_graph_does_not_overflow() {
        let n = 200_000;
        let g: Vec<Vec<usize>> = (0..n).map(|k| vec![(k + 1) % n]).collect();
        assert_eq!(tarjan_scc(&g).count, 1);
    }

    /// Oracle: transitive closure by repeated boolean squaring-free BFS.
    fn reachability(g: &[Vec<usize>]) -> Vec<Vec<bool>> {
        let n = g.len();
        (0..n)
            .map(|s| {
                let mut seen = vec![false; n];
                let mut todo = vec![s];
                seen[s] = true;
                while let Some(v) = todo.pop() {
                    for &w in &g[v] {
                        if !seen[w] {
                            seen[w] = true;
                            todo.push(w);
                        }
                    }
                }
                seen
            })
            .collect()
    }

    fn components_by_closure(g: &[Vec<usize>]) -> usize {
        let reach = reachability(g);
        let n = g.len();
        let mut assigned = vec![false; n];
        let mut count = 0;
        for v in 0..n {
            if assigned[v] {
                continue;
            }
            count += 1;
            for w in 0..n {
                if reach[v][w] && reach[w][v] {
                    assigned[w] = true;
                }
            }
        }
        count
    }

    #[test]
    fn strongly_connected_tournament() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 50;
        let mut tries = 0;
        loop {
            tries += 1;
            let mut g = vec![Vec::new(); n];
            for a in 0..n {
                for b in (a + 1)..n {
                    if rng.random_bool(0.5) {
                        g[a].push(b);
                    } else {
                        g[b].push(a);
                    }
                }
            }
            if components_by_closure(&g) == 1 {
                assert_eq!(tarjan_scc(&g).count, 1);
                break;
            }
            assert!(tries < 100);
        }
    }

    #[test]
    fn random_graphs_match_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.random_range(1..40);
            let p = rng.random_range(0.0..0.15);
            let g: Vec<Vec<usize>> = (0..n)
                .map(|_| (0..n).filter(|_| rng.random_bool(p)).collect())
                .collect();
            let r = tarjan_scc(&g);
            assert_eq!(r.count, components_by_closure(&g));
            let reach = reachability(&g);
            for (a, row) in reach.iter().enumerate() {
                for (b, &ab) in row.iter().enumerate() {
                    assert_eq!(r.labels[a] == r.labels[b], ab && reach[b][a]);
                }
            }
        }
    }
}
