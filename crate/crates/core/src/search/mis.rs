use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{SearchBudget, SearchError};
use crate::bits::{self, BitMatrix, Ones};
use crate::families::{ekr_by_ids, EkrKind};
use crate::kneser::{independent_witness, KneserGraph};

/// Depth of the deterministic split into independent subtrees.
const SPLIT_DEPTH: usize = 3;
const CLOCK_CHECK: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MisReport {
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
    pub nodes_expanded: u64,
    #[serde(serialize_with = "round_seconds")]
    pub seconds: f64,
    pub witness: Vec<u32>,
}

pub(crate) fn round_seconds<S: serde::Serializer>(s: &f64, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_f64((s * 1000.0).round() / 1000.0)
}

/// Greedy partition of `p` into cliques; `size + cliques` bounds any
/// independent set extending the current one. Stops once the count passes
/// `cap`, charging every leftover vertex as its own clique.
fn clique_cover_bound(adj: &BitMatrix, p: &[u64], cap: usize, rest: &mut Vec<u64>, cand: &mut Vec<u64>) -> usize {
    rest.clear();
    rest.extend_from_slice(p);
    cand.resize(p.len(), 0);
    let mut k = 0;
    while let Some(v) = bits::first(rest) {
        k += 1;
        if k > cap {
            return k + bits::count(rest) - 1;
        }
        rest[v / 64] &= !(1 << (v % 64));
        cand.copy_from_slice(rest);
        bits::and_assign(cand, adj.row(v));
        while let Some(u) = bits::first(cand) {
            rest[u / 64] &= !(1 << (u % 64));
            cand[u / 64] &= !(1 << (u % 64));
            bits::and_assign(cand, adj.row(u));
        }
    }
    k
}

/// Vertex of maximum degree in the subgraph induced by `p`, smallest id on ties,
/// with its degree.
fn max_degree_vertex(adj: &BitMatrix, p: &[u64]) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for v in Ones::new(p) {
        let d = bits::and_count(adj.row(v), p);
        if best.map_or(true, |(_, bd)| d > bd) {
            best = Some((v, d));
        }
    }
    best
}

struct Frame {
    v: usize,
    size: usize,
    bound: usize,
    stage: u8,
}

/// Result of one subtree search.
struct Outcome {
    best: usize,
    witness: Option<Vec<u32>>,
    upper: usize,
    closed: bool,
    nodes: u64,
}

/// Branch-and-bound over one subtree: branch on a maximum-degree vertex of the
/// residual graph (include first), bound by a greedy clique cover.
struct Dfs<'a> {
    adj: &'a BitMatrix,
    stride: usize,
    best: usize,
    witness: Option<Vec<u32>>,
    nodes: u64,
    max_nodes: u64,
    deadline: Instant,
    timed_out: bool,
    frames: Vec<Frame>,
    pstack: Vec<u64>,
    chosen: Vec<u32>,
    scratch: (Vec<u64>, Vec<u64>),
}

impl<'a> Dfs<'a> {
    fn new(adj: &'a BitMatrix, best: usize, max_nodes: u64, deadline: Instant) -> Self {
        Dfs {
            adj,
            stride: adj.stride(),
            best,
            witness: None,
            nodes: 0,
            max_nodes,
            deadline,
            timed_out: false,
            frames: Vec::new(),
            pstack: Vec::new(),
            chosen: Vec::new(),
            scratch: (Vec::new(), Vec::new()),
        }
    }

    fn record(&mut self, size: usize, p: &[u64]) {
        if size > self.best {
            self.best = size;
            let mut w = self.chosen.clone();
            w.extend(Ones::new(p).map(|v| v as u32));
            w.sort_unstable();
            self.witness = Some(w);
        }
    }

    /// Expands a node whose candidate set sits at the top of `pstack`. Keeps a
    /// frame if the node must be branched on, otherwise drops the set.
    fn enter(&mut self, size: usize, parent_bound: usize) {
        self.nodes += 1;
        let start = self.pstack.len() - self.stride;
        let p = &self.pstack[start..];
        let cap = self.best.saturating_sub(size);
        let (rest, cand) = &mut self.scratch;
        let bound = (size + clique_cover_bound(self.adj, p, cap, rest, cand)).min(parent_bound);
        if bound <= self.best {
            self.pstack.truncate(start);
            return;
        }
        match max_degree_vertex(self.adj, p) {
            Some((v, d)) if d > 0 => self.frames.push(Frame {
                v,
                size,
                bound,
                stage: 0,
            }),
            _ => {
                let p = self.pstack[start..].to_vec();
                self.record(size + bits::count(&p), &p);
                self.pstack.truncate(start);
            }
        }
    }

    fn out_of_budget(&mut self) -> bool {
        if self.nodes >= self.max_nodes {
            return true;
        }
        if self.nodes % CLOCK_CHECK == 0 && Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        self.timed_out
    }

    fn run(mut self, p: Vec<u64>, size: usize, chosen: Vec<u32>, bound: usize) -> Outcome {
        self.chosen = chosen;
        self.pstack.extend_from_slice(&p);
        self.enter(size, bound);
        let stride = self.stride;
        let closed = loop {
            let Some(top) = self.frames.last_mut() else {
                break true;
            };
            if top.stage == 2 || top.bound <= self.best {
                if top.stage == 1 {
                    self.chosen.pop();
                }
                self.frames.pop();
                let len = self.pstack.len();
                self.pstack.truncate(len - stride);
                continue;
            }
            if self.out_of_budget() {
                break false;
            }
            let top = self.frames.last_mut().unwrap();
            let (v, size, bound) = (top.v, top.size, top.bound);
            let base = self.pstack.len() - stride;
            self.pstack.extend_from_within(base..base + stride);
            let child = &mut self.pstack[base + stride..];
            if top.stage == 0 {
                top.stage = 1;
                bits::and_not_assign(child, self.adj.row(v));
                child[v / 64] &= !(1 << (v % 64));
                self.chosen.push(v as u32);
                self.enter(size + 1, bound);
            } else {
                top.stage = 2;
                self.chosen.pop();
                child[v / 64] &= !(1 << (v % 64));
                self.enter(size, bound);
            }
        };
        let pending = self.frames.iter().map(|f| f.bound).max().unwrap_or(0);
        Outcome {
            best: self.best,
            witness: self.witness,
            upper: self.best.max(if closed { 0 } else { pending }),
            closed,
            nodes: self.nodes,
        }
    }
}

struct Subproblem {
    p: Vec<u64>,
    size: usize,
    chosen: Vec<u32>,
    bound: usize,
}

/// Splits the root along the first `SPLIT_DEPTH` branch decisions. Subtrees
/// that resolve during the split are folded into `best`/`witness`.
fn split(adj: &BitMatrix, best: &mut usize, witness: &mut Vec<u32>, nodes: &mut u64) -> Vec<Subproblem> {
    let n = adj.size();
    let stride = adj.stride();
    let mut root = vec![0u64; stride];
    for v in 0..n {
        root[v / 64] |= 1 << (v % 64);
    }
    let mut level = vec![Subproblem {
        p: root,
        size: 0,
        chosen: Vec::new(),
        bound: usize::MAX,
    }];
    let (mut rest, mut cand) = (Vec::new(), Vec::new());
    for _ in 0..SPLIT_DEPTH {
        let mut next = Vec::new();
        for sp in level {
            *nodes += 1;
            let bound = (sp.size + clique_cover_bound(adj, &sp.p, usize::MAX, &mut rest, &mut cand)).min(sp.bound);
            if bound <= *best {
                continue;
            }
            match max_degree_vertex(adj, &sp.p) {
                Some((v, d)) if d > 0 => {
                    let mut inc = sp.p.clone();
                    bits::and_not_assign(&mut inc, adj.row(v));
                    inc[v / 64] &= !(1 << (v % 64));
                    let mut chosen = sp.chosen.clone();
                    chosen.push(v as u32);
                    next.push(Subproblem {
                        p: inc,
                        size: sp.size + 1,
                        chosen,
                        bound,
                    });
                    let mut exc = sp.p;
                    exc[v / 64] &= !(1 << (v % 64));
                    next.push(Subproblem {
                        p: exc,
                        size: sp.size,
                        chosen: sp.chosen,
                        bound,
                    });
                }
                _ => {
                    let size = sp.size + bits::count(&sp.p);
                    if size > *best {
                        *best = size;
                        let mut w = sp.chosen;
                        w.extend(Ones::new(&sp.p).map(|v| v as u32));
                        w.sort_unstable();
                        *witness = w;
                    }
                }
            }
        }
        level = next;
    }
    level
}

/// Bounds the independence number of the graph with adjacency `adj`.
///
/// The largest independent seed is the starting lower bound. The search tree
/// is split into a fixed number of subtrees, each given an equal share of the
/// node budget and the seed bound only, so the report does not depend on
/// `budget.threads`.
pub fn independence_number(
    adj: &BitMatrix,
    seeds: &[Vec<u32>],
    budget: &SearchBudget,
) -> Result<MisReport, SearchError> {
    budget.validate()?;
    let start = Instant::now();
    let deadline = budget.deadline(start);
    let mut best = 0;
    let mut witness = Vec::new();
    for s in seeds {
        let mut s = s.clone();
        s.sort_unstable();
        s.dedup();
        if let Some((a, b)) = independent_witness(adj, &s) {
            return Err(SearchError::DependentSeed(a, b));
        }
        if s.len() > best {
            best = s.len();
            witness = s;
        }
    }
    if adj.size() == 0 {
        return Ok(MisReport {
            lower: 0,
            upper: 0,
            exact: true,
            nodes_expanded: 0,
            seconds: start.elapsed().as_secs_f64(),
            witness,
        });
    }
    let mut nodes = 0;
    let subproblems = split(adj, &mut best, &mut witness, &mut nodes);
    let share = (budget.max_nodes.saturating_sub(nodes) / subproblems.len().max(1) as u64).max(1);
    let seed_best = best;
    let outcomes: Vec<Outcome> = budget.pool()?.install(|| {
        subproblems
            .into_par_iter()
            .map(|sp| Dfs::new(adj, seed_best, share, deadline).run(sp.p, sp.size, sp.chosen, sp.bound))
            .collect()
    });
    let mut upper = best;
    let mut exact = true;
    for o in outcomes {
        nodes += o.nodes;
        upper = upper.max(o.upper);
        exact &= o.closed;
        if o.best > best {
            if let Some(w) = o.witness {
                best = o.best;
                witness = w;
            }
        }
    }
    Ok(MisReport {
        lower: best,
        upper: upper.max(best),
        exact,
        nodes_expanded: nodes,
        seconds: start.elapsed().as_secs_f64(),
        witness,
    })
}

/// Largest known independent sets: the point-pencil for line-solid flags and
/// `F(P,l)` for line-plane flags in dimension 5.
pub fn known_seeds(g: &KneserGraph) -> Result<Vec<Vec<u32>>, SearchError> {
    let fs = g.flags();
    let geo = fs.geometry();
    let mut seeds = Vec::new();
    if geo.n() == 5 && fs.flag_type().dims() == [2, 3] {
        let line = geo.supersets(geo.space((1, 0))?, 2)?[0];
        seeds.push(ekr_by_ids(fs, EkrKind::PointLine, 0, line)?.members);
    }
    let pencil = fs.pencil(0);
    if independent_witness(g.adjacency(), &pencil).is_none() {
        seeds.push(pencil);
    }
    Ok(seeds)
}

pub fn kneser_independence_number(g: &KneserGraph, budget: &SearchBudget) -> Result<MisReport, SearchError> {
    independence_number(g.adjacency(), &known_seeds(g)?, budget)
}
