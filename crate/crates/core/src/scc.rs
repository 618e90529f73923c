//! Iterative Tarjan over graphs given as successor lists.

/// Strongly connected components of the graph on nodes `0..node_count`
/// restricted to nodes where `active(v)` holds. Components are returned in
/// reverse topological order (sinks first); self-loops are irrelevant.
pub fn tarjan<'g, A, S>(node_count: usize, active: A, successors: S) -> Vec<Vec<u32>>
where
    A: Fn(usize) -> bool,
    S: Fn(usize) -> &'g [u32],
{
    const UNVISITED: u32 = u32::MAX;
    let mut index = vec![UNVISITED; node_count];
    let mut low = vec![0u32; node_count];
    let mut on_stack = vec![false; node_count];
    let mut stack: Vec<u32> = Vec::new();
    // (node, next edge offset)
    let mut calls: Vec<(u32, usize)> = Vec::new();
    let mut next_index = 0u32;
    let mut components = Vec::new();

    for root in 0..node_count {
        if !active(root) || index[root] != UNVISITED {
            continue;
        }
        calls.push((root as u32, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root as u32);
        on_stack[root] = true;

        while let Some(&(top, start)) = calls.last() {
            let v = top as usize;
            let succ = successors(v);
            let mut edge = start;
            let mut child = None;
            while edge < succ.len() {
                let w = succ[edge] as usize;
                edge += 1;
                if !active(w) {
                    continue;
                }
                if index[w] == UNVISITED {
                    child = Some(w);
                    break;
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            }
            calls.last_mut().expect("non-empty").1 = edge;
            if let Some(w) = child {
                index[w] = next_index;
                low[w] = next_index;
                next_index += 1;
                stack.push(w as u32);
                on_stack[w] = true;
                calls.push((w as u32, 0));
                continue;
            }
            calls.pop();
            if let Some(&(parent, _)) = calls.last() {
                let p = parent as usize;
                low[p] = low[p].min(low[v]);
            }
            if low[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w as usize] = false;
                    component.push(w);
                    if w as usize == v {
                        break;
                    }
                }
                component.sort_unstable();
                components.push(component);
            }
        }
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(adj: &[Vec<u32>]) -> Vec<Vec<u32>> {
        let mut comps = tarjan(adj.len(), |_| true, |v| adj[v].as_slice());
        comps.sort();
        comps
    }

    #[test]
    fn two_cycles_joined_by_an_edge() {
        let adj = vec![vec![1], vec![0, 2], vec![3], vec![2]];
        assert_eq!(run(&adj), vec![vec![0, 1], vec![2, 3]]);
        // Sinks come first.
        let order = tarjan(adj.len(), |_| true, |v| adj[v].as_slice());
        assert_eq!(order[0], vec![2, 3]);
    }

    #[test]
    fn inactive_nodes_are_skipped() {
        let adj = [vec![1], vec![2], vec![0]];
        let comps = tarjan(3, |v| v != 2, |v| adj[v].as_slice());
        assert_eq!(comps.len(), 2);
    }

    #[test]
    fn long_chain_does_not_recurse() {
        let n = 200_000;
        let adj: Vec<Vec<u32>> = (0..n)
            .map(|v| {
                if v + 1 < n {
                    vec![v as u32 + 1]
                } else {
                    vec![0]
                }
            })
            .collect();
        let comps = tarjan(n, |_| true, |v| adj[v].as_slice());
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].len(), n);
    }
}
