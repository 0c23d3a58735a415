/// Tarjan's algorithm, iterative. Returns `(component of each node, count)`;
/// nodes unreachable from `roots` get `usize::MAX`. Components are numbered
/// in reverse topological order.
pub fn strongly_connected_components(
    num_nodes: usize,
    roots: &[usize],
    succ: impl Fn(usize) -> Vec<usize>,
) -> (Vec<usize>, usize) {
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; num_nodes];
    let mut low = vec![0usize; num_nodes];
    let mut on_stack = vec![false; num_nodes];
    let mut comp = vec![UNSEEN; num_nodes];
    let mut stack = Vec::new();
    let mut counter = 0usize;
    let mut ncomp = 0usize;
    // (node, successors, next successor to visit)
    let mut call: Vec<(usize, Vec<usize>, usize)> = Vec::new();
    for &root in roots {
        if index[root] != UNSEEN {
            continue;
        }
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, succ(root), 0));
        while let Some(frame) = call.last_mut() {
            let v = frame.0;
            if frame.2 < frame.1.len() {
                let w = frame.1[frame.2];
                frame.2 += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, succ(w), 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(parent) = call.last() {
                    let p = parent.0;
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    (comp, ncomp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cycles() {
        let adj = [vec![1], vec![2], vec![1, 3], vec![]];
        let (comp, n) = strongly_connected_components(4, &[0], |v| adj[v].clone());
        assert_eq!(n, 3);
        assert_eq!(comp[1], comp[2]);
        assert_ne!(comp[0], comp[1]);
        assert!(comp[3] < comp[1] && comp[1] < comp[0]);
    }
}
