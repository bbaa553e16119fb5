//! Exact minimum vertex cover by branch and bound.
//!
//! Degree-0 and degree-1 reductions, branching on a maximum-degree vertex
//! (take it, or take all of its neighbours), and a greedy maximal matching
//! as the lower bound.

#[derive(Clone, Debug)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    forced: Vec<bool>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n], forced: vec![false; n] }
    }

    /// Adds `{u, v}`. A loop `{v, v}` forces `v` into every cover.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u == v {
            self.forced[u] = true;
        } else {
            self.adj[u].push(v);
            self.adj[v].push(u);
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2 + self.forced.iter().filter(|&&f| f).count()
    }
}

#[derive(Clone)]
struct State {
    alive: Vec<bool>,
    deg: Vec<usize>,
    cover: Vec<usize>,
}

struct Solver<'a> {
    adj: &'a [Vec<usize>],
    best: Vec<usize>,
}

impl State {
    fn remove(&mut self, adj: &[Vec<usize>], v: usize) {
        if !self.alive[v] {
            return;
        }
        self.alive[v] = false;
        for &u in &adj[v] {
            if self.alive[u] {
                self.deg[u] -= 1;
            }
        }
    }

    fn take(&mut self, adj: &[Vec<usize>], v: usize) {
        self.cover.push(v);
        self.remove(adj, v);
    }

    fn reduce(&mut self, adj: &[Vec<usize>]) {
        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..adj.len() {
                if !self.alive[v] {
                    continue;
                }
                match self.deg[v] {
                    0 => {
                        self.remove(adj, v);
                        changed = true;
                    }
                    1 => {
                        let u = adj[v].iter().copied().find(|&u| self.alive[u]).expect("degree 1");
                        self.take(adj, u);
                        self.remove(adj, v);
                        changed = true;
                    }
                    _ => {}
                }
            }
        }
    }

    fn matching_bound(&self, adj: &[Vec<usize>]) -> usize {
        let mut matched = vec![false; adj.len()];
        let mut size = 0;
        for v in 0..adj.len() {
            if !self.alive[v] || matched[v] {
                continue;
            }
            if let Some(u) = adj[v].iter().copied().find(|&u| self.alive[u] && !matched[u]) {
                matched[u] = true;
                matched[v] = true;
                size += 1;
            }
        }
        size
    }
}

impl Solver<'_> {
    fn branch(&mut self, mut s: State) {
        s.reduce(self.adj);
        if s.cover.len() >= self.best.len() {
            return;
        }
        let pick = (0..self.adj.len()).filter(|&v| s.alive[v]).max_by_key(|&v| (s.deg[v], std::cmp::Reverse(v)));
        let Some(v) = pick else {
            self.best = s.cover;
            return;
        };
        if s.cover.len() + s.matching_bound(self.adj) >= self.best.len() {
            return;
        }
        let mut with_v = s.clone();
        with_v.take(self.adj, v);
        self.branch(with_v);

        let neighbours: Vec<usize> = self.adj[v].iter().copied().filter(|&u| s.alive[u]).collect();
        if s.cover.len() + neighbours.len() < self.best.len() {
            for u in neighbours {
                s.take(self.adj, u);
            }
            s.remove(self.adj, v);
            self.branch(s);
        }
    }
}

/// Returns a minimum vertex cover, sorted ascending.
pub fn min_vertex_cover(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut state = State {
        alive: vec![true; n],
        deg: g.adj.iter().map(Vec::len).collect(),
        cover: Vec::new(),
    };
    for v in 0..n {
        if g.forced[v] {
            state.take(&g.adj, v);
        }
    }
    // incumbent: every non-isolated vertex
    let mut best: Vec<usize> = state.cover.clone();
    best.extend((0..n).filter(|&v| state.alive[v] && state.deg[v] > 0));
    let mut solver = Solver { adj: &g.adj, best };
    solver.branch(state);
    let mut cover = solver.best;
    cover.sort_unstable();
    cover
}

/// True if `cover` touches every edge of `g`.
pub fn is_cover(g: &Graph, cover: &[usize]) -> bool {
    let mut inside = vec![false; g.n()];
    for &v in cover {
        inside[v] = true;
    }
    (0..g.n()).all(|v| {
        (!g.forced[v] || inside[v]) && g.adj[v].iter().all(|&u| inside[u] || inside[v])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(g: &Graph) -> usize {
        let n = g.n();
        (0u32..1 << n)
            .filter(|mask| {
                let c: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                is_cover(g, &c)
            })
            .map(u32::count_ones)
            .min()
            .unwrap() as usize
    }

    #[test]
    fn small_graphs() {
        let mut g = Graph::new(4);
        assert!(min_vertex_cover(&g).is_empty());
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(2, 3);
        let c = min_vertex_cover(&g);
        assert_eq!(c.len(), 2);
        assert!(is_cover(&g, &c));
        g.add_edge(3, 3);
        let c = min_vertex_cover(&g);
        assert!(c.contains(&3));
        assert!(is_cover(&g, &c));
    }

    #[test]
    fn matches_brute_force_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.random_range(1..=10);
            let p: f64 = rng.random();
            let mut g = Graph::new(n);
            for i in 0..n {
                for j in i..n {
                    if rng.random::<f64>() < p * if i == j { 0.1 } else { 1.0 } {
                        g.add_edge(i, j);
                    }
                }
            }
            let c = min_vertex_cover(&g);
            assert!(is_cover(&g, &c));
            assert_eq!(c.len(), brute_force(&g));
        }
    }

    #[test]
    fn complete_graph_needs_all_but_one() {
        let mut g = Graph::new(7);
        for i in 0..7 {
            for j in i + 1..7 {
                g.add_edge(i, j);
            }
        }
        assert_eq!(min_vertex_cover(&g).len(), 6);
    }
}
