use std::time::Instant;

use serde::Serialize;

use super::mis::{independence_number, known_seeds, round_seconds};
use super::{SearchBudget, SearchError};
use crate::bits::{self, BitMatrix, Ones};
use crate::families::{coloring_23_line, covering_24, verify_coloring};
use crate::kneser::KneserGraph;

/// One bound on the chromatic number and where it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    /// `"dsatur"`, `"coloring:<name>"`, `"clique"` or `"ratio"`.
    pub source: String,
    pub value: usize,
    /// Clique vertices, or the independence upper bound used by the ratio.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub data: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChromaticReport {
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
    pub alpha_upper: usize,
    pub certificates: Vec<Certificate>,
    #[serde(serialize_with = "round_seconds")]
    pub seconds: f64,
}

/// DSATUR greedy coloring; ties broken by degree, then smallest id.
pub fn dsatur(adj: &BitMatrix) -> Vec<u32> {
    let n = adj.size();
    let degree: Vec<usize> = (0..n).map(|v| bits::count(adj.row(v))).collect();
    let mut color = vec![u32::MAX; n];
    let mut seen: Vec<Vec<u64>> = vec![Vec::new(); n];
    let mut sat = vec![0usize; n];
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| color[v] == u32::MAX)
            .max_by(|&a, &b| (sat[a], degree[a]).cmp(&(sat[b], degree[b])).then(b.cmp(&a)))
            .expect("an uncolored vertex remains");
        let used = &seen[v];
        let c = (0..)
            .find(|&c: &usize| used.get(c / 64).map_or(true, |w| w >> (c % 64) & 1 == 0))
            .unwrap();
        color[v] = c as u32;
        for u in Ones::new(adj.row(v)) {
            if color[u] != u32::MAX {
                continue;
            }
            let words = &mut seen[u];
            if words.len() <= c / 64 {
                words.resize(c / 64 + 1, 0);
            }
            if words[c / 64] >> (c % 64) & 1 == 0 {
                words[c / 64] |= 1 << (c % 64);
                sat[u] += 1;
            }
        }
    }
    color
}

/// Greedy cliques grown from every start vertex (at most `starts` of them),
/// always taking the smallest candidate; returns the largest.
pub fn greedy_clique(adj: &BitMatrix, starts: usize) -> Vec<u32> {
    let n = adj.size();
    let mut best: Vec<u32> = Vec::new();
    let mut cand = vec![0u64; adj.stride()];
    for s in 0..n.min(starts) {
        let mut clique = vec![s as u32];
        cand.copy_from_slice(adj.row(s));
        while let Some(u) = bits::first(&cand) {
            clique.push(u as u32);
            bits::and_assign(&mut cand, adj.row(u));
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best.sort_unstable();
    best
}

fn count_colors(colors: &[u32]) -> usize {
    let mut c: Vec<u32> = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn is_proper(adj: &BitMatrix, colors: &[u32]) -> bool {
    colors.len() == adj.size() && (0..adj.size()).all(|v| Ones::new(adj.row(v)).all(|u| colors[u] != colors[v]))
}

/// Chromatic bounds: upper from DSATUR and any supplied proper colorings,
/// lower from a greedy clique and `ceil(|V| / α_upper)`, where `α_upper` comes
/// from a budgeted independence search. The ratio bound holds for every graph:
/// each color class is independent.
pub fn chromatic_bounds(
    adj: &BitMatrix,
    seeds: &[Vec<u32>],
    colorings: &[(String, Vec<u32>)],
    budget: &SearchBudget,
) -> Result<ChromaticReport, SearchError> {
    budget.validate()?;
    let start = Instant::now();
    let n = adj.size();
    let mut certificates = Vec::new();
    let ds = dsatur(adj);
    certificates.push(Certificate {
        source: "dsatur".into(),
        value: count_colors(&ds),
        data: Vec::new(),
    });
    for (name, colors) in colorings {
        if is_proper(adj, colors) {
            certificates.push(Certificate {
                source: format!("coloring:{name}"),
                value: count_colors(colors),
                data: Vec::new(),
            });
        }
    }
    let upper = certificates.iter().map(|c| c.value).min().unwrap_or(0);

    let clique = greedy_clique(adj, 4096);
    let mis = independence_number(adj, seeds, budget)?;
    let alpha_upper = mis.upper;
    let ratio = if alpha_upper == 0 { 0 } else { n.div_ceil(alpha_upper) };
    certificates.push(Certificate {
        source: "clique".into(),
        value: clique.len(),
        data: clique.clone(),
    });
    certificates.push(Certificate {
        source: "ratio".into(),
        value: ratio,
        data: vec![alpha_upper as u32],
    });
    let lower = clique.len().max(ratio);
    Ok(ChromaticReport {
        lower,
        upper,
        exact: lower == upper,
        alpha_upper,
        certificates,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// [`chromatic_bounds`] with the known colorings and independent sets of
/// line-solid and line-plane flags in dimension 5 added.
pub fn kneser_chromatic_bounds(g: &KneserGraph, budget: &SearchBudget) -> Result<ChromaticReport, SearchError> {
    let fs = g.flags();
    let geo = fs.geometry();
    let n = g.vertex_count();
    let mut colorings = Vec::new();
    if geo.n() == 5 {
        let coloring = match fs.flag_type().dims() {
            [2, 4] => Some(covering_24(fs, 0)?),
            [2, 3] => {
                let line = geo.subsets(geo.space((4, 0))?, 2)?[0];
                Some(coloring_23_line(fs, 0, line, 0)?)
            }
            _ => None,
        };
        if let Some(c) = coloring {
            if verify_coloring(g, &c)?.ok() {
                let name = c.classes.first().map(|k| k.name.clone()).unwrap_or_default();
                if let Some(colors) = c.refine(n) {
                    colorings.push((name, colors));
                }
            }
        }
    }
    chromatic_bounds(g.adjacency(), &known_seeds(g)?, &colorings, budget)
}
