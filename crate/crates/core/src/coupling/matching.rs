//! Maximum bipartite matching: a greedy pass, then augmenting paths (Kuhn)
//! for the rows left unmatched. Vertices are scanned in index order.

pub(crate) struct Matching {
    /// `left_of[j]` is the left vertex matched to right vertex `j`.
    pub left_of: Vec<Option<usize>>,
    /// Augmenting paths that re-routed at least one existing pair.
    pub augmentations: usize,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.left_of.iter().flatten().count()
    }

    /// Pairs `(left, right)` sorted by left index.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut p: Vec<(usize, usize)> =
            self.left_of.iter().enumerate().filter_map(|(j, i)| i.map(|i| (i, j))).collect();
        p.sort_unstable();
        p
    }
}

pub(crate) fn max_matching(rows: usize, cols: usize, edge: impl Fn(usize, usize) -> bool) -> Matching {
    let mut left_of = vec![None; cols];
    let mut augmentations = 0;
    let mut visited = vec![false; cols];
    let mut matched = vec![false; rows];
    // greedy pass: first free column in index order
    for (i, done) in matched.iter_mut().enumerate() {
        if let Some(j) = (0..cols).find(|&j| left_of[j].is_none() && edge(i, j)) {
            left_of[j] = Some(i);
            *done = true;
        }
    }
    for i in (0..rows).filter(|&i| !matched[i]) {
        visited.iter_mut().for_each(|v| *v = false);
        let mut depth = 0;
        if augment(i, &edge, &mut left_of, &mut visited, 0, &mut depth) && depth > 1 {
            augmentations += 1;
        }
    }
    Matching { left_of, augmentations }
}

fn augment(
    i: usize,
    edge: &impl Fn(usize, usize) -> bool,
    left_of: &mut [Option<usize>],
    visited: &mut [bool],
    level: usize,
    depth: &mut usize,
) -> bool {
    for j in 0..left_of.len() {
        if visited[j] || !edge(i, j) {
            continue;
        }
        visited[j] = true;
        let free = match left_of[j] {
            None => true,
            Some(k) => augment(k, edge, left_of, visited, level + 1, depth),
        };
        if free {
            left_of[j] = Some(i);
            *depth = (*depth).max(level + 1);
            return true;
        }
    }
    false
}
