//! Dinic max-flow over a generic capacity type.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};

/// Residual capacity at or below this counts as saturated for `f64`.
pub const FLOW_EPS: f64 = 1e-15;

/// Capacity arithmetic. `f64` treats residuals below [`FLOW_EPS`] as zero;
/// [`BigRational`] is exact.
pub trait Capacity: Num + Clone + PartialOrd + std::fmt::Debug {
    fn positive(&self) -> bool;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;

    fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

impl Capacity for f64 {
    fn positive(&self) -> bool {
        *self > FLOW_EPS
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Capacity for BigRational {
    fn positive(&self) -> bool {
        *self > BigRational::zero()
    }

    /// Exact binary value of `x`.
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[derive(Clone, Debug)]
struct Edge<T> {
    to: usize,
    cap: T,
    original: T,
}

#[derive(Clone, Debug)]
pub struct FlowNetwork<T> {
    edges: Vec<Edge<T>>,
    adj: Vec<Vec<usize>>,
}

impl<T: Capacity> FlowNetwork<T> {
    pub fn new(nodes: usize) -> Self {
        Self { edges: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    /// Adds `u -> v` and returns its id.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: T) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to: v, cap: cap.clone(), original: cap });
        self.edges.push(Edge { to: u, cap: T::zero(), original: T::zero() });
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }

    /// Flow currently routed through edge `id`.
    pub fn flow(&self, id: usize) -> T {
        let e = &self.edges[id];
        e.original.clone() - e.cap.clone()
    }

    fn levels(&self, s: usize, t: usize) -> Option<Vec<usize>> {
        let mut level = vec![usize::MAX; self.adj.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &id in &self.adj[u] {
                let e = &self.edges[id];
                if e.cap.positive() && level[e.to] == usize::MAX {
                    level[e.to] = level[u] + 1;
                    queue.push_back(e.to);
                }
            }
        }
        (level[t] != usize::MAX).then_some(level)
    }

    fn push(&mut self, u: usize, t: usize, limit: T, level: &[usize], next: &mut [usize]) -> T {
        if u == t {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let id = self.adj[u][next[u]];
            let (to, cap) = (self.edges[id].to, self.edges[id].cap.clone());
            if cap.positive() && level[to] == level[u] + 1 {
                let pushed = self.push(to, t, T::min_of(&limit, &cap), level, next);
                if pushed.positive() {
                    self.edges[id].cap = self.edges[id].cap.clone() - pushed.clone();
                    self.edges[id ^ 1].cap = self.edges[id ^ 1].cap.clone() + pushed.clone();
                    return pushed;
                }
            }
            next[u] += 1;
        }
        T::zero()
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> T {
        let mut total = T::zero();
        let unbounded: T = self.adj[s].iter().fold(T::zero(), |acc, &id| acc + self.edges[id].cap.clone());
        while let Some(level) = self.levels(s, t) {
            let mut next = vec![0; self.adj.len()];
            loop {
                let pushed = self.push(s, t, unbounded.clone(), &level, &mut next);
                if !pushed.positive() {
                    break;
                }
                total = total + pushed;
            }
        }
        total
    }
}
