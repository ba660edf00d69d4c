use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::mis::round_seconds;
use super::{SearchBudget, SearchError};
use crate::bits::{self, BitMatrix, BitSet, Ones};
use crate::families::{contained_in_point_pencil, e0_23, e0_24, e1_23, e1_24, match_example_family};
use crate::geometry::FlagSpace;
use crate::kneser::KneserGraph;

/// Swap moves tried after the initial grow of each restart.
const PLATEAU_STEPS: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FalsifierReport {
    pub q: usize,
    pub omega: String,
    pub restarts: u64,
    pub best_size: usize,
    pub e1: u128,
    /// `true` would contradict the published bound; never filtered.
    pub exceeded_e1: bool,
    pub family: Vec<u32>,
    /// Best admissible size per restart, and how many restarts reached it.
    pub restart_histogram: BTreeMap<usize, u64>,
    #[serde(serialize_with = "round_seconds")]
    pub seconds: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Line-solid flags: forbid point-pencils.
    LineSolid,
    /// Line-plane flags: forbid the four extremal families.
    LinePlane,
}

/// Maximal independent set with neighbour counts, kept under single moves.
struct State<'a> {
    adj: &'a BitMatrix,
    members: BitSet,
    free: BitSet,
    tight: Vec<u16>,
    size: usize,
}

impl<'a> State<'a> {
    fn new(adj: &'a BitMatrix) -> Self {
        let n = adj.size();
        State {
            adj,
            members: BitSet::new(n),
            free: BitSet::full(n),
            tight: vec![0; n],
            size: 0,
        }
    }

    fn add(&mut self, v: usize) {
        self.members.insert(v);
        self.free.remove(v);
        self.size += 1;
        bits::and_not_assign(self.free.words_mut(), self.adj.row(v));
        for u in Ones::new(self.adj.row(v)) {
            self.tight[u] += 1;
        }
    }

    fn remove(&mut self, v: usize) {
        self.members.remove(v);
        self.size -= 1;
        for u in Ones::new(self.adj.row(v)) {
            self.tight[u] -= 1;
            if self.tight[u] == 0 && !self.members.contains(u) {
                self.free.insert(u);
            }
        }
        if self.tight[v] == 0 {
            self.free.insert(v);
        }
    }

    fn random_free(&self, rng: &mut ChaCha8Rng) -> Option<usize> {
        let count = self.free.count();
        if count == 0 {
            return None;
        }
        let mut k = rng.gen_range(0..count);
        for (i, &w) in self.free.words().iter().enumerate() {
            let c = w.count_ones() as usize;
            if k < c {
                let mut w = w;
                for _ in 0..k {
                    w &= w - 1;
                }
                return Some(i * 64 + w.trailing_zeros() as usize);
            }
            k -= c;
        }
        None
    }

    fn grow(&mut self, rng: &mut ChaCha8Rng) {
        while let Some(v) = self.random_free(rng) {
            self.add(v);
        }
    }

    /// Swaps a random vertex with exactly one neighbour in the set for that
    /// neighbour, then grows back to maximal.
    fn swap(&mut self, rng: &mut ChaCha8Rng, scratch: &mut Vec<usize>) -> bool {
        scratch.clear();
        scratch.extend((0..self.tight.len()).filter(|&v| self.tight[v] == 1 && !self.members.contains(v)));
        if scratch.is_empty() {
            return false;
        }
        let v = scratch[rng.gen_range(0..scratch.len())];
        let u = Ones::new(self.adj.row(v))
            .find(|&u| self.members.contains(u))
            .expect("a 1-tight vertex has a neighbour in the set");
        self.remove(u);
        self.add(v);
        self.grow(rng);
        true
    }
}

struct Checker<'a> {
    fs: &'a FlagSpace,
    mode: Mode,
    e0: usize,
}

impl Checker<'_> {
    /// A maximal independent set lies in an extremal family only if it equals
    /// it, which needs size `e0`.
    fn admissible(&self, members: &BitSet) -> bool {
        if members.count() != self.e0 {
            return true;
        }
        let set = members.to_vec();
        match self.mode {
            Mode::LineSolid => contained_in_point_pencil(self.fs, &set).is_none(),
            Mode::LinePlane => match_example_family(self.fs, &set).map_or(true, |m| m.is_none()),
        }
    }
}

fn restart(adj: &BitMatrix, checker: &Checker, seed: u64) -> (usize, Vec<u32>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = State::new(adj);
    let mut scratch = Vec::new();
    state.grow(&mut rng);
    let mut best = (0, Vec::new());
    for step in 0..=PLATEAU_STEPS {
        if step > 0 && !state.swap(&mut rng, &mut scratch) {
            break;
        }
        if state.size > best.0 && checker.admissible(&state.members) {
            best = (state.size, state.members.to_vec());
        }
    }
    best
}

/// Randomized search for large maximal EKR sets outside the extremal
/// families, over `budget.max_nodes` restarts. Restart `r` uses the RNG seeded
/// with `budget.seed + r`, so the report is independent of the thread count.
pub fn hm_falsifier(g: &KneserGraph, budget: &SearchBudget) -> Result<FalsifierReport, SearchError> {
    budget.validate()?;
    let start = Instant::now();
    let deadline = budget.deadline(start);
    let fs = g.flags();
    let q = g.q();
    let (mode, e0, e1) = match (g.n(), fs.flag_type().dims()) {
        (5, [2, 4]) => (Mode::LineSolid, e0_24(q as u64), e1_24(q as u64)),
        (5, [2, 3]) => (Mode::LinePlane, e0_23(q as u64), e1_23(q as u64)),
        _ => {
            return Err(SearchError::UnsupportedType(format!(
                "{} in dimension {}; expected {{2,3}} or {{2,4}} in dimension 5",
                fs.flag_type(),
                g.n()
            )))
        }
    };
    let checker = Checker {
        fs,
        mode,
        e0: e0 as usize,
    };
    let adj = g.adjacency();
    type Acc = (usize, u64, Vec<u32>, BTreeMap<usize, u64>, u64);
    let merge = |a: Acc, b: Acc| -> Acc {
        let (mut hist, other) = (a.3, b.3);
        for (k, v) in other {
            *hist.entry(k).or_insert(0) += v;
        }
        let done = a.4 + b.4;
        if (b.0, std::cmp::Reverse(b.1)) > (a.0, std::cmp::Reverse(a.1)) {
            (b.0, b.1, b.2, hist, done)
        } else {
            (a.0, a.1, a.2, hist, done)
        }
    };
    let empty = || -> Acc { (0, u64::MAX, Vec::new(), BTreeMap::new(), 0) };
    let (best_size, _, family, restart_histogram, restarts) = budget.pool()?.install(|| {
        (0..budget.max_nodes)
            .into_par_iter()
            .map(|r| {
                if Instant::now() >= deadline {
                    return empty();
                }
                let (size, members) = restart(adj, &checker, budget.seed.wrapping_add(r));
                (size, r, members, BTreeMap::from([(size, 1)]), 1)
            })
            .reduce(empty, merge)
    });
    let exceeded_e1 = best_size as u128 > e1;
    if exceeded_e1 {
        eprintln!(
            "!!! hm_falsifier: found a maximal EKR set of size {best_size} outside the extremal families, above e1 = {e1} (q = {q}, type {})",
            fs.flag_type()
        );
    }
    Ok(FalsifierReport {
        q,
        omega: fs.flag_type().to_string(),
        restarts,
        best_size,
        e1,
        exceeded_e1,
        family,
        restart_histogram,
        seconds: start.elapsed().as_secs_f64(),
    })
}
