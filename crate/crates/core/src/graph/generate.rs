//! Graph families and the random edge-deletion adversary.

use std::collections::HashMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{is_connected, CompleteGraph, Graph, Network};
use crate::error::{Error, Result};
use crate::rng::{stream, Stream};

const CONNECT_RETRIES: u64 = 100;
const PAIRING_RETRIES: usize = 1000;
const SWITCH_ATTEMPTS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    Complete,
    Star,
    Gnp { p: f64 },
    Regular { d: usize },
    /// Block `V₁ = {0..⌊n/2⌋−1}` adjacent to everything; `V₂` filled in to
    /// total degree `⌈(1−ε)n⌉+1` (±1).
    PushAdversary { eps: f64 },
    /// Block `V₁` adjacent to everything; `V₂` internally `G(|V₂|, 1−2ε)`.
    PpAdversary { eps: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Complete => "complete",
            Family::Star => "star",
            Family::Gnp { .. } => "gnp",
            Family::Regular { .. } => "regular",
            Family::PushAdversary { .. } => "push-adversary",
            Family::PpAdversary { .. } => "pp-adversary",
        }
    }

    /// Builds a family from flag-style parts; each parameter must be
    /// present exactly when the family needs it.
    pub fn from_parts(
        name: &str,
        p: Option<f64>,
        d: Option<usize>,
        eps: Option<f64>,
    ) -> Result<Self> {
        let (needs_p, needs_d, needs_eps) = match name {
            "complete" | "star" => (false, false, false),
            "gnp" => (true, false, false),
            "regular" => (false, true, false),
            "push-adversary" | "pp-adversary" => (false, false, true),
            other => return Err(Error::InvalidSpec(format!("unknown family `{other}`"))),
        };
        for (needed, present, flag) in [
            (needs_p, p.is_some(), "p"),
            (needs_d, d.is_some(), "d"),
            (needs_eps, eps.is_some(), "eps"),
        ] {
            if needed && !present {
                return Err(Error::InvalidSpec(format!("family `{name}` requires --{flag}")));
            }
            if !needed && present {
                return Err(Error::InvalidSpec(format!("family `{name}` does not take --{flag}")));
            }
        }
        Ok(match name {
            "complete" => Family::Complete,
            "star" => Family::Star,
            "gnp" => Family::Gnp { p: p.unwrap() },
            "regular" => Family::Regular { d: d.unwrap() },
            "push-adversary" => Family::PushAdversary { eps: eps.unwrap() },
            _ => Family::PpAdversary { eps: eps.unwrap() },
        })
    }

    fn is_random(&self) -> bool {
        !matches!(self, Family::Complete | Family::Star)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Gnp { p } => write!(f, "gnp:p={p}"),
            Family::Regular { d } => write!(f, "regular:d={d}"),
            Family::PushAdversary { eps } => write!(f, "push-adversary:eps={eps}"),
            Family::PpAdversary { eps } => write!(f, "pp-adversary:eps={eps}"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    #[serde(flatten)]
    pub family: Family,
    pub n: usize,
}

impl FamilySpec {
    pub fn new(family: Family, n: usize) -> Result<Self> {
        let spec = Self { family, n };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::InvalidSpec("n must be at least 1".into()));
        }
        match self.family {
            Family::Complete => {}
            Family::Star => {
                if n < 2 {
                    return Err(Error::InvalidSpec("star needs n >= 2".into()));
                }
            }
            Family::Gnp { p } => {
                if !(p > 0.0 && p <= 1.0) {
                    return Err(Error::InvalidSpec(format!("gnp needs p in (0, 1], got {p}")));
                }
            }
            Family::Regular { d } => {
                if d == 0 || d >= n || !(n * d).is_multiple_of(2) {
                    return Err(Error::InvalidSpec(format!(
                        "regular needs 1 <= d < n and n*d even, got n = {n}, d = {d}"
                    )));
                }
            }
            Family::PushAdversary { eps } | Family::PpAdversary { eps } => {
                if n < 8 {
                    return Err(Error::InvalidSpec(format!("adversary families need n >= 8, got {n}")));
                }
                if !(eps > 0.0 && eps < 0.5) {
                    return Err(Error::InvalidSpec(format!("eps must lie in (0, 1/2), got {eps}")));
                }
                if let Family::PushAdversary { eps } = self.family {
                    let floor_degree = push_adversary_degree(n, eps) - 1;
                    if floor_degree > n - 1 {
                        return Err(Error::InvalidSpec(format!(
                            "push-adversary degree window starts at {floor_degree} > n-1 for n = {n}, eps = {eps}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Target `V₂` degree `⌈(1−ε)n⌉ + 1`.
fn push_adversary_degree(n: usize, eps: f64) -> usize {
    ((1.0 - eps) * n as f64).ceil() as usize + 1
}

/// Generates an explicit graph of the requested family.
///
/// Random families are resampled with sub-seed `seed ^ attempt` until the
/// result is connected.
pub fn generate(spec: &FamilySpec, seed: u64) -> Result<Graph> {
    spec.validate()?;
    let n = spec.n;
    match spec.family {
        Family::Complete => Graph::complete(n),
        Family::Star => Graph::star(n),
        family => {
            debug_assert!(family.is_random());
            for attempt in 0..CONNECT_RETRIES {
                let mut rng = stream(seed ^ attempt);
                let g = sample(family, n, &mut rng)?;
                if is_connected(&g) {
                    return Ok(g);
                }
            }
            Err(Error::GenerationFailure(format!(
                "{family} on {n} vertices stayed disconnected after {CONNECT_RETRIES} attempts"
            )))
        }
    }
}

/// Like [`generate`], but keeps `K_n` implicit.
pub fn generate_network(spec: &FamilySpec, seed: u64) -> Result<Network> {
    match spec.family {
        Family::Complete => {
            spec.validate()?;
            Ok(Network::Complete(CompleteGraph::new(spec.n)?))
        }
        _ => generate(spec, seed).map(Network::Explicit),
    }
}

fn sample(family: Family, n: usize, rng: &mut Stream) -> Result<Graph> {
    match family {
        Family::Gnp { p } => {
            let mut adjacency = vec![Vec::new(); n];
            gnp_pairs(n, p, rng, |u, v| {
                adjacency[u].push(v as u32);
                adjacency[v].push(u as u32);
            });
            Ok(Graph::from_adjacency(adjacency))
        }
        Family::Regular { d } => {
            let adjacency = random_degree_sequence(&vec![d; n], rng)?;
            Ok(Graph::from_adjacency(adjacency))
        }
        Family::PushAdversary { eps } => push_adversary(n, eps, rng),
        Family::PpAdversary { eps } => Ok(pp_adversary(n, eps, rng)),
        Family::Complete | Family::Star => unreachable!("deterministic family"),
    }
}

/// Adjacency of a graph where the first `hub` vertices see everyone, and the
/// rest get `inner` (indexed relative to `hub`) on top.
fn two_block(n: usize, hub: usize, inner: Vec<Vec<u32>>) -> Graph {
    let mut adjacency: Vec<Vec<u32>> = (0..hub)
        .map(|v| (0..n as u32).filter(|&u| u as usize != v).collect())
        .collect();
    for list in inner {
        let mut full: Vec<u32> = (0..hub as u32).collect();
        full.extend(list.into_iter().map(|u| u + hub as u32));
        adjacency.push(full);
    }
    Graph::from_adjacency(adjacency)
}

fn push_adversary(n: usize, eps: f64, rng: &mut Stream) -> Result<Graph> {
    let hub = n / 2;
    let size = n - hub;
    let target = push_adversary_degree(n, eps);
    // Interior degree: aim for target - hub, stay inside [target-1, target+1]
    // and inside what a simple graph on `size` vertices allows.
    let low = (target - 1).saturating_sub(hub);
    let high = (target + 1 - hub).min(size - 1);
    let aim = (target - hub).clamp(low, high);
    let mut degrees = vec![aim; size];
    if (aim * size) % 2 == 1 {
        // One vertex absorbs the parity fix, moving away from the window edge.
        degrees[size - 1] = if aim < high { aim + 1 } else { aim - 1 };
    }
    let inner = random_degree_sequence(&degrees, rng)?;
    Ok(two_block(n, hub, inner))
}

fn pp_adversary(n: usize, eps: f64, rng: &mut Stream) -> Graph {
    let hub = n / 2;
    let size = n - hub;
    let mut inner = vec![Vec::new(); size];
    gnp_pairs(size, 1.0 - 2.0 * eps, rng, |u, v| {
        inner[u].push(v as u32);
        inner[v].push(u as u32);
    });
    two_block(n, hub, inner)
}

/// Calls `emit(u, v)` for each pair `u > v` included independently with
/// probability `p`, skipping geometrically between successes.
fn gnp_pairs(n: usize, p: f64, rng: &mut Stream, mut emit: impl FnMut(usize, usize)) {
    if p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                emit(v, w);
            }
        }
        return;
    }
    let log_q = (1.0 - p).ln();
    let (mut v, mut w) = (1usize, -1i64);
    while v < n {
        let r: f64 = rng.gen();
        w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            emit(v, w as usize);
        }
    }
}

fn edge_key(u: u32, v: u32) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    (u64::from(a) << 32) | u64::from(b)
}

/// Simple graph with the given degree sequence: configuration-model pairing,
/// then each self-loop or repeated pair is switched against a random good
/// edge `(x, y)` into `(u, x), (v, y)`. Dense sequences are built as the
/// complement of their complementary sequence.
pub(crate) fn random_degree_sequence(degrees: &[usize], rng: &mut Stream) -> Result<Vec<Vec<u32>>> {
    let n = degrees.len();
    let total: usize = degrees.iter().sum();
    if !total.is_multiple_of(2) || degrees.iter().any(|&d| d >= n.max(1)) && total > 0 {
        return Err(Error::GenerationFailure(format!(
            "degree sequence on {n} vertices is not realisable by the pairing model"
        )));
    }
    if n > 1 && total > n * (n - 1) / 2 {
        let complement: Vec<usize> = degrees.iter().map(|&d| n - 1 - d).collect();
        let sparse = random_degree_sequence(&complement, rng)?;
        return Ok(sparse
            .into_iter()
            .enumerate()
            .map(|(v, list)| {
                let mut keep = vec![true; n];
                keep[v] = false;
                for u in list {
                    keep[u as usize] = false;
                }
                (0..n as u32).filter(|&u| keep[u as usize]).collect()
            })
            .collect());
    }

    let mut stubs: Vec<u32> = degrees
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v as u32, d))
        .collect();
    for _ in 0..PAIRING_RETRIES {
        stubs.shuffle(rng);
        if let Some(edges) = pair_and_repair(&stubs, rng) {
            let mut adjacency = vec![Vec::new(); n];
            for (u, v) in edges {
                adjacency[u as usize].push(v);
                adjacency[v as usize].push(u);
            }
            return Ok(adjacency);
        }
    }
    Err(Error::GenerationFailure(format!(
        "pairing model failed {PAIRING_RETRIES} times on {n} vertices"
    )))
}

fn pair_and_repair(stubs: &[u32], rng: &mut Stream) -> Option<Vec<(u32, u32)>> {
    let mut good: Vec<(u32, u32)> = Vec::with_capacity(stubs.len() / 2);
    let mut index: HashMap<u64, usize> = HashMap::with_capacity(stubs.len() / 2);
    let mut bad = Vec::new();
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0], pair[1]);
        if u == v || index.contains_key(&edge_key(u, v)) {
            bad.push((u, v));
        } else {
            index.insert(edge_key(u, v), good.len());
            good.push((u, v));
        }
    }
    for (u, v) in bad {
        let mut fixed = false;
        for _ in 0..SWITCH_ATTEMPTS {
            if good.is_empty() {
                break;
            }
            let slot = rng.gen_range(0..good.len());
            let (mut x, mut y) = good[slot];
            if rng.gen::<bool>() {
                std::mem::swap(&mut x, &mut y);
            }
            let (a, b) = (edge_key(u, x), edge_key(v, y));
            if u == x || v == y || a == b || index.contains_key(&a) || index.contains_key(&b) {
                continue;
            }
            index.remove(&edge_key(x, y));
            good.swap_remove(slot);
            if slot < good.len() {
                let (p, q) = good[slot];
                index.insert(edge_key(p, q), slot);
            }
            index.insert(a, good.len());
            good.push((u, x));
            index.insert(b, good.len());
            good.push((v, y));
            fixed = true;
            break;
        }
        if !fixed {
            return None;
        }
    }
    Some(good)
}

/// Random subgraph in which every vertex keeps at least
/// `⌈keep_fraction · deg(v)⌉` of its edges. Edges are visited in a uniformly
/// shuffled order and dropped whenever both endpoints stay above quota.
pub fn delete_random(g: &Graph, keep_fraction: f64, seed: u64) -> Result<Graph> {
    if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
        return Err(Error::OutOfRange(format!(
            "keep_fraction must lie in (0, 1], got {keep_fraction}"
        )));
    }
    let n = g.n();
    let quota: Vec<usize> = (0..n)
        .map(|v| (keep_fraction * g.degree(v) as f64).ceil() as usize)
        .collect();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    edges.shuffle(&mut stream(seed));
    let mut adjacency = vec![Vec::new(); n];
    for (u, v) in edges {
        if degree[u] > quota[u] && degree[v] > quota[v] {
            degree[u] -= 1;
            degree[v] -= 1;
        } else {
            adjacency[u].push(v as u32);
            adjacency[v].push(u as u32);
        }
    }
    Ok(Graph::from_adjacency(adjacency))
}
