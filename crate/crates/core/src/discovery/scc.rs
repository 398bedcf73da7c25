//! Tarjan's strongly connected components, with an explicit stack so that
//! long chains cannot exhaust the call stack.

use alloc::vec;
use alloc::vec::Vec;

const UNVISITED: usize = usize::MAX;

/// Returns the strongly connected components of the graph given by
/// `successors`, restricted to nodes where `include` is true. Components come
/// out in reverse topological order; members of each component are sorted.
pub fn strongly_connected_components<F, I>(
    node_count: usize,
    include: impl Fn(usize) -> bool,
    successors: F,
) -> Vec<Vec<usize>>
where
    F: Fn(usize) -> I,
    I: Iterator<Item = usize>,
{
    let mut index = vec![UNVISITED; node_count];
    let mut lowlink = vec![0usize; node_count];
    let mut on_stack = vec![false; node_count];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components = Vec::new();

    // (node, successor iterator)
    let mut call: Vec<(usize, I)> = Vec::new();

    for root in 0..node_count {
        if index[root] != UNVISITED || !include(root) {
            continue;
        }
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, successors(root)));

        while let Some((v, iter)) = call.last_mut() {
            let v = *v;
            match iter.next() {
                Some(w) if !include(w) => {}
                Some(w) if index[w] == UNVISITED => {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, successors(w)));
                }
                Some(w) => {
                    if on_stack[w] {
                        lowlink[v] = lowlink[v].min(index[w]);
                    }
                }
                None => {
                    call.pop();
                    if let Some((parent, _)) = call.last() {
                        let parent = *parent;
                        lowlink[parent] = lowlink[parent].min(lowlink[v]);
                    }
                    if lowlink[v] == index[v] {
                        let mut component = Vec::new();
                        while let Some(w) = stack.pop() {
                            on_stack[w] = false;
                            component.push(w);
                            if w == v {
                                break;
                            }
                        }
                        component.sort_unstable();
                        components.push(component);
                    }
                }
            }
        }
    }
    components
}
