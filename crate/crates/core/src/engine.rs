//! Synchronous-round simulation of push, pull and push&pull.
//!
//! Every action in round `t` is decided from `I_t` alone. Each message
//! (a push along an informed vertex's pick, or a pull along an uninformed
//! vertex's pick) succeeds independently with probability `q`; a vertex
//! reached by several messages is counted once.
//!
//! Round indexing follows `|I_1| = 1`: the trace starts at `t = 1` and the
//! runtime `T` is the number of rounds executed, i.e. the first `t` with
//! `I_t = V`, minus one.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Topology;
use crate::rng::{stream, Stream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Push,
    Pull,
    Pp,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Push, Protocol::Pull, Protocol::Pp];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Push => "push",
            Protocol::Pull => "pull",
            Protocol::Pp => "pp",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "push" => Ok(Protocol::Push),
            "pull" => Ok(Protocol::Pull),
            "pp" | "push-pull" | "pushpull" => Ok(Protocol::Pp),
            other => Err(Error::InvalidSpec(format!("unknown protocol `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub protocol: Protocol,
    pub q: f64,
    pub start_vertex: usize,
    /// Defaults to `64·⌈log₂ n⌉ + 64`.
    pub max_rounds: Option<u32>,
    pub tilde_threshold_enabled: bool,
}

impl ProtocolConfig {
    pub fn new(protocol: Protocol, q: f64) -> Self {
        Self {
            protocol,
            q,
            start_vertex: 0,
            max_rounds: None,
            tilde_threshold_enabled: true,
        }
    }

    pub fn with_start(mut self, v: usize) -> Self {
        self.start_vertex = v;
        self
    }

    pub fn with_max_rounds(mut self, rounds: u32) -> Self {
        self.max_rounds = Some(rounds);
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        check_q(self.q)?;
        if self.start_vertex >= n {
            return Err(Error::VertexOutOfRange {
                vertex: self.start_vertex,
                n,
            });
        }
        Ok(())
    }

    pub fn round_cap(&self, n: usize) -> u32 {
        self.max_rounds.unwrap_or_else(|| default_max_rounds(n))
    }
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q <= 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("q must lie in (0, 1], got {q}")))
    }
}

pub fn default_max_rounds(n: usize) -> u32 {
    let log2 = usize::BITS - n.saturating_sub(1).leading_zeros();
    64 * log2 + 64
}

/// `n − ⌈n/ln n⌉`, the informed count that ends the first phase.
pub fn tilde_threshold(n: usize) -> usize {
    if n <= 1 {
        return n;
    }
    let nf = n as f64;
    n.saturating_sub((nf / nf.ln()).ceil() as usize)
}

/// Informed set with O(1) membership, insertion, and iteration over both
/// the informed and the uninformed side.
#[derive(Clone, Debug)]
pub struct InformedSet {
    mask: Vec<bool>,
    informed: Vec<u32>,
    uninformed: Vec<u32>,
    slot: Vec<u32>,
}

impl InformedSet {
    pub fn empty(n: usize) -> Self {
        Self {
            mask: vec![false; n],
            informed: Vec::new(),
            uninformed: (0..n as u32).collect(),
            slot: (0..n as u32).collect(),
        }
    }

    pub fn from_vertices(n: usize, vertices: &[usize]) -> Result<Self> {
        let mut set = Self::empty(n);
        for &v in vertices {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            set.insert(v);
        }
        Ok(set)
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        let mut set = Self::empty(mask.len());
        for (v, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
            set.insert(v);
        }
        set
    }

    /// Returns `false` if `v` was already informed.
    pub fn insert(&mut self, v: usize) -> bool {
        if self.mask[v] {
            return false;
        }
        self.mask[v] = true;
        let at = self.slot[v] as usize;
        self.uninformed.swap_remove(at);
        if let Some(&moved) = self.uninformed.get(at) {
            self.slot[moved as usize] = at as u32;
        }
        self.informed.push(v as u32);
        true
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.mask[v]
    }

    pub fn len(&self) -> usize {
        self.informed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.informed.is_empty()
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn is_full(&self) -> bool {
        self.uninformed.is_empty()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Informed vertices in insertion order.
    pub fn informed(&self) -> &[u32] {
        &self.informed
    }

    pub fn uninformed(&self) -> &[u32] {
        &self.uninformed
    }

    pub fn to_sorted_vec(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.informed.iter().map(|&x| x as usize).collect();
        v.sort_unstable();
        v
    }

    pub fn is_subset_of(&self, other: &InformedSet) -> bool {
        self.informed.iter().all(|&v| other.contains(v as usize))
    }
}

#[inline]
fn coin(rng: &mut Stream, q: f64) -> bool {
    q >= 1.0 || rng.gen::<f64>() < q
}

#[inline]
fn pick<T: Topology + ?Sized>(g: &T, v: usize, rng: &mut Stream) -> Option<usize> {
    match g.degree(v) {
        0 => None,
        d => Some(g.neighbor(v, rng.gen_range(0..d))),
    }
}

/// Vertices informed during one round from `informed`, without duplicates,
/// in the order they were first reached. Randomness is consumed in a fixed
/// order: push scans `I_t` in insertion order, pull scans `U_t` in its
/// internal order, pp scans all vertices `0..n`.
fn round_targets<T: Topology + ?Sized>(
    g: &T,
    informed: &InformedSet,
    protocol: Protocol,
    q: f64,
    rng: &mut Stream,
    hit: &mut [bool],
    fresh: &mut Vec<u32>,
) {
    fresh.clear();
    let mut mark = |v: usize, fresh: &mut Vec<u32>| {
        if !hit[v] {
            hit[v] = true;
            fresh.push(v as u32);
        }
    };
    match protocol {
        Protocol::Push => {
            for &u in informed.informed() {
                if let Some(w) = pick(g, u as usize, rng) {
                    if !informed.contains(w) && coin(rng, q) {
                        mark(w, fresh);
                    }
                }
            }
        }
        Protocol::Pull => {
            for &u in informed.uninformed() {
                if let Some(w) = pick(g, u as usize, rng) {
                    if informed.contains(w) && coin(rng, q) {
                        mark(u as usize, fresh);
                    }
                }
            }
        }
        Protocol::Pp => {
            for u in 0..g.vertex_count() {
                let Some(w) = pick(g, u, rng) else { continue };
                match (informed.contains(u), informed.contains(w)) {
                    (true, false) if coin(rng, q) => mark(w, fresh),
                    (false, true) if coin(rng, q) => mark(u, fresh),
                    _ => {}
                }
            }
        }
    }
    for &v in fresh.iter() {
        hit[v as usize] = false;
    }
}

/// One synchronous round: returns `I_{t+1}` computed from `I_t = informed`.
pub fn run_round<T: Topology + ?Sized>(
    g: &T,
    informed: &InformedSet,
    protocol: Protocol,
    q: f64,
    rng: &mut Stream,
) -> Result<InformedSet> {
    check_q(q)?;
    if informed.universe() != g.vertex_count() {
        return Err(Error::InvalidVertexSet(format!(
            "set over {} vertices used with graph on {}",
            informed.universe(),
            g.vertex_count()
        )));
    }
    if informed.is_empty() {
        return Err(Error::InvalidVertexSet("informed set must be nonempty".into()));
    }
    let mut hit = vec![false; g.vertex_count()];
    let mut fresh = Vec::new();
    round_targets(g, informed, protocol, q, rng, &mut hit, &mut fresh);
    let mut next = informed.clone();
    for v in fresh {
        next.insert(v as usize);
    }
    Ok(next)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub t: u32,
    pub informed: u64,
    /// `e(I_t, U_t)`.
    pub boundary: u64,
    #[serde(rename = "new")]
    pub newly_informed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub completed: bool,
    /// Rounds executed until `I_t = V`; equals the round cap when the trial
    /// did not complete.
    pub rounds: u32,
    /// Rounds executed until `|I_t| ≥ n − ⌈n/ln n⌉`.
    pub t_tilde: Option<u32>,
    pub seed: u64,
    pub trace: Vec<RoundRecord>,
}

impl TrialResult {
    /// `T`, or `None` for the not-completed sentinel.
    pub fn runtime(&self) -> Option<u32> {
        self.completed.then_some(self.rounds)
    }

    /// Trace as JSON lines with keys `t`, `informed`, `boundary`, `new`.
    pub fn write_trace_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for record in &self.trace {
            serde_json::to_writer(&mut out, record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Runs the protocol from `I_1 = {start_vertex}` until everyone is informed
/// or the round cap is hit. Deterministic in `seed`.
pub fn simulate<T: Topology + ?Sized>(g: &T, cfg: &ProtocolConfig, seed: u64) -> Result<TrialResult> {
    let n = g.vertex_count();
    cfg.validate(n)?;
    let cap = cfg.round_cap(n);
    let threshold = tilde_threshold(n);
    let mut rng = stream(seed);

    let mut informed = InformedSet::empty(n);
    informed.insert(cfg.start_vertex);
    let mut boundary = g.degree(cfg.start_vertex) as u64;
    let mut trace = vec![RoundRecord {
        t: 1,
        informed: 1,
        boundary,
        newly_informed: 1,
    }];
    let mut t_tilde = (cfg.tilde_threshold_enabled && informed.len() >= threshold).then_some(0);

    let mut hit = vec![false; n];
    let mut fresh = Vec::new();
    let mut executed = 0u32;
    while !informed.is_full() && executed < cap {
        round_targets(g, &informed, cfg.protocol, cfg.q, &mut rng, &mut hit, &mut fresh);
        for &v in &fresh {
            let v = v as usize;
            let inside = g.neighbors_in(v, informed.mask(), informed.len()) as u64;
            boundary = boundary + g.degree(v) as u64 - 2 * inside;
            let added = informed.insert(v);
            assert!(added, "newly informed vertex {v} was already informed");
        }
        executed += 1;
        trace.push(RoundRecord {
            t: executed + 1,
            informed: informed.len() as u64,
            boundary,
            newly_informed: fresh.len() as u64,
        });
        if cfg.tilde_threshold_enabled && t_tilde.is_none() && informed.len() >= threshold {
            t_tilde = Some(executed);
        }
    }

    Ok(TrialResult {
        completed: informed.is_full(),
        rounds: executed,
        t_tilde,
        seed,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{CompleteGraph, Graph};

    #[test]
    fn informed_set_bookkeeping() {
        let mut s = InformedSet::from_vertices(5, &[3, 1]).unwrap();
        assert_eq!(s.len(), 2);
        assert!(!s.insert(3));
        assert!(s.insert(0));
        let mut u: Vec<u32> = s.uninformed().to_vec();
        u.sort_unstable();
        assert_eq!(u, vec![2, 4]);
        assert_eq!(s.to_sorted_vec(), vec![0, 1, 3]);
        assert!(InformedSet::from_vertices(5, &[5]).is_err());
    }

    #[test]
    fn thresholds() {
        assert_eq!(default_max_rounds(1024), 64 * 10 + 64);
        assert_eq!(default_max_rounds(1000), 64 * 10 + 64);
        assert_eq!(default_max_rounds(1), 64);
        // 100 − ⌈100/ln 100⌉ = 100 − 22
        assert_eq!(tilde_threshold(100), 78);
        assert_eq!(tilde_threshold(1), 1);
    }

    #[test]
    fn star_push_adds_one_leaf() {
        let g = Graph::star(6).unwrap();
        let start = InformedSet::from_vertices(6, &[0]).unwrap();
        for seed in 0..50 {
            let next = run_round(&g, &start, Protocol::Push, 1.0, &mut stream(seed)).unwrap();
            assert_eq!(next.len(), 2);
        }
    }

    #[test]
    fn star_pp_from_leaf_reaches_center() {
        let g = Graph::star(6).unwrap();
        let start = InformedSet::from_vertices(6, &[4]).unwrap();
        for seed in 0..50 {
            let next = run_round(&g, &start, Protocol::Pp, 1.0, &mut stream(seed)).unwrap();
            assert!(next.contains(0));
        }
    }

    #[test]
    fn simulate_trivial_cases() {
        let one = Graph::complete(1).unwrap();
        let r = simulate(&one, &ProtocolConfig::new(Protocol::Push, 0.5), 1).unwrap();
        assert!(r.completed);
        assert_eq!((r.rounds, r.t_tilde), (0, Some(0)));

        let k2 = Graph::complete(2).unwrap();
        for seed in 0..20 {
            let r = simulate(&k2, &ProtocolConfig::new(Protocol::Push, 1.0), seed).unwrap();
            assert_eq!(r.runtime(), Some(1));
        }
    }

    #[test]
    fn disconnected_graph_hits_cap() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let cfg = ProtocolConfig::new(Protocol::Pp, 1.0).with_max_rounds(10);
        let r = simulate(&g, &cfg, 1).unwrap();
        assert!(!r.completed);
        assert_eq!(r.rounds, 10);
        assert_eq!(r.runtime(), None);
        assert_eq!(r.trace.last().unwrap().boundary, 0);
    }

    #[test]
    fn boundary_tracks_recomputation() {
        let g = Graph::cycle(12).unwrap();
        let r = simulate(&g, &ProtocolConfig::new(Protocol::Pp, 0.6), 4).unwrap();
        assert!(r.completed);
        assert_eq!(r.trace.first().unwrap().boundary, 2);
        assert_eq!(r.trace.last().unwrap().boundary, 0);
        let k = CompleteGraph::new(50).unwrap();
        let r = simulate(&k, &ProtocolConfig::new(Protocol::Pull, 0.8), 4).unwrap();
        for rec in &r.trace {
            assert_eq!(rec.boundary, rec.informed * (50 - rec.informed));
        }
    }

    #[test]
    fn rejects_bad_config() {
        let g = Graph::complete(3).unwrap();
        assert!(simulate(&g, &ProtocolConfig::new(Protocol::Push, 0.0), 1).is_err());
        assert!(simulate(&g, &ProtocolConfig::new(Protocol::Push, 1.5), 1).is_err());
        assert!(simulate(&g, &ProtocolConfig::new(Protocol::Push, 1.0).with_start(3), 1).is_err());
        let empty = InformedSet::empty(3);
        assert!(run_round(&g, &empty, Protocol::Push, 1.0, &mut stream(0)).is_err());
    }

    #[test]
    fn trace_jsonl_keys() {
        let g = Graph::complete(2).unwrap();
        let r = simulate(&g, &ProtocolConfig::new(Protocol::Push, 1.0), 0).unwrap();
        let mut buf = Vec::new();
        r.write_trace_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "{\"t\":1,\"informed\":1,\"boundary\":1,\"new\":1}\n{\"t\":2,\"informed\":2,\"boundary\":0,\"new\":1}\n"
        );
    }
}
