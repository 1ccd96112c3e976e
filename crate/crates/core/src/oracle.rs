//! Exact one-round outcome distributions on tiny graphs.
//!
//! Every joint neighbour pick of the active choosers is enumerated (all are
//! equally likely). A pick configuration only matters through how many
//! messages reach each vertex, so configurations are first bucketed by that
//! count vector. Given `k` messages, a vertex is informed with probability
//! `1 − (1−q)^k` independently of every other vertex, and the coin outcomes
//! are summed out as a product of Bernoulli factors.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{check_q, run_round, InformedSet, Protocol};
use crate::error::{Error, Result};
use crate::graph::{
    adjacency_spectrum, generate, mixing_deviation, spectral_profile, Family, FamilySpec, Graph,
};
use crate::rng::{derive_seed, stream};
use crate::theory::{lambda_max_pp, two_block_matrix};

pub const MAX_ORACLE_VERTICES: usize = 20;
pub const MAX_CHOOSERS: usize = 12;
const MAX_CONFIGURATIONS: u64 = 1 << 30;
const EXACT_TOLERANCE: f64 = 1e-12;

/// Distribution of `I_{t+1}` as bitmasks over the vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundPmf {
    n: usize,
    start: u32,
    outcomes: BTreeMap<u32, f64>,
}

impl RoundPmf {
    pub fn outcomes(&self) -> &BTreeMap<u32, f64> {
        &self.outcomes
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn probability(&self, set: u32) -> f64 {
        self.outcomes.get(&set).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.outcomes.values().sum()
    }

    /// Entry `k` is `P(|I_{t+1}| = k)`, for `k = 0..=n`.
    pub fn size_pmf(&self) -> Vec<f64> {
        let mut pmf = vec![0.0; self.n + 1];
        for (&set, &p) in &self.outcomes {
            pmf[set.count_ones() as usize] += p;
        }
        pmf
    }

    pub fn mean(&self) -> f64 {
        self.outcomes
            .iter()
            .map(|(&set, &p)| p * f64::from(set.count_ones()))
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.outcomes
            .iter()
            .map(|(&set, &p)| p * (f64::from(set.count_ones()) - mean).powi(2))
            .sum()
    }
}

fn informed_mask(g: &Graph, informed: &[usize]) -> Result<u32> {
    let n = g.n();
    if n > MAX_ORACLE_VERTICES {
        return Err(Error::InstanceTooLarge(format!(
            "{n} vertices exceeds {MAX_ORACLE_VERTICES}"
        )));
    }
    if informed.is_empty() {
        return Err(Error::InvalidVertexSet("informed set must be nonempty".into()));
    }
    let mut mask = 0u32;
    for &v in informed {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        mask |= 1 << v;
    }
    Ok(mask)
}

/// Exact distribution of `I_{t+1}` given `I_t = informed`, with the same
/// semantics as [`run_round`].
pub fn exact_round_pmf(g: &Graph, informed: &[usize], protocol: Protocol, q: f64) -> Result<RoundPmf> {
    check_q(q)?;
    let start = informed_mask(g, informed)?;
    let n = g.n();
    let is_informed = |v: usize| start >> v & 1 == 1;
    let choosers: Vec<usize> = (0..n)
        .filter(|&v| g.degree(v) > 0)
        .filter(|&v| match protocol {
            Protocol::Push => is_informed(v),
            Protocol::Pull => !is_informed(v),
            Protocol::Pp => true,
        })
        .collect();
    if choosers.len() > MAX_CHOOSERS {
        return Err(Error::InstanceTooLarge(format!(
            "{} choosers exceeds {MAX_CHOOSERS}",
            choosers.len()
        )));
    }
    let configurations = choosers
        .iter()
        .try_fold(1u64, |acc, &v| acc.checked_mul(g.degree(v) as u64))
        .filter(|&c| c <= MAX_CONFIGURATIONS)
        .ok_or_else(|| Error::InstanceTooLarge("too many pick configurations".into()))?;

    // Message counts per vertex, 4 bits each (at most 12 messages).
    let mut buckets: HashMap<u128, u64> = HashMap::new();
    let mut picks = vec![0usize; choosers.len()];
    for _ in 0..configurations {
        let mut key = 0u128;
        for (&c, &i) in choosers.iter().zip(&picks) {
            let w = g.neighbors(c)[i] as usize;
            let target = match (is_informed(c), is_informed(w)) {
                (true, false) if protocol != Protocol::Pull => Some(w),
                (false, true) if protocol != Protocol::Push => Some(c),
                _ => None,
            };
            if let Some(t) = target {
                key += 1u128 << (4 * t);
            }
        }
        *buckets.entry(key).or_insert(0) += 1;
        for (slot, &c) in picks.iter_mut().zip(&choosers) {
            *slot += 1;
            if *slot < g.degree(c) {
                break;
            }
            *slot = 0;
        }
    }

    let mut outcomes = BTreeMap::new();
    let mut keys: Vec<_> = buckets.into_iter().collect();
    keys.sort_unstable();
    for (key, count) in keys {
        let mut partial = vec![(start, count as f64 / configurations as f64)];
        for v in 0..n {
            let k = (key >> (4 * v) & 0xf) as i32;
            if k == 0 {
                continue;
            }
            let hit = 1.0 - (1.0 - q).powi(k);
            let mut next = Vec::with_capacity(partial.len() * 2);
            for (set, w) in partial {
                if hit < 1.0 {
                    next.push((set, w * (1.0 - hit)));
                }
                next.push((set | 1 << v, w * hit));
            }
            partial = next;
        }
        for (set, w) in partial {
            *outcomes.entry(set).or_insert(0.0) += w;
        }
    }
    Ok(RoundPmf { n, start, outcomes })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfBoundingReport {
    pub variance: f64,
    pub mean: f64,
    pub pass: bool,
}

/// `Var[|I_{t+1}|] ≤ E[|I_{t+1}|]` on the exact distribution.
pub fn verify_self_bounding(
    g: &Graph,
    informed: &[usize],
    protocol: Protocol,
    q: f64,
) -> Result<SelfBoundingReport> {
    let pmf = exact_round_pmf(g, informed, protocol, q)?;
    let (mean, variance) = (pmf.mean(), pmf.variance());
    Ok(SelfBoundingReport {
        variance,
        mean,
        pass: variance <= mean + EXACT_TOLERANCE,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectationReport {
    /// `Σ_{u∈U}(1 − q|N(u)∩I|/|N(u)|)`.
    pub pull_formula: f64,
    pub pull_exact: f64,
    /// `Σ_{u∈U} Π_{i∈N(u)∩I}(1 − q/|N(i)|)`.
    pub push_formula: f64,
    pub push_exact: f64,
    pub pass: bool,
}

/// Compares the expected number of uninformed vertices after one pull and
/// one push round with the closed-form sums.
pub fn verify_expectation_formulas(g: &Graph, informed: &[usize], q: f64) -> Result<ExpectationReport> {
    let start = informed_mask(g, informed)?;
    let n = g.n();
    let uninformed = (0..n).filter(|&u| start >> u & 1 == 0);
    let mut pull_formula = 0.0;
    let mut push_formula = 0.0;
    for u in uninformed {
        let neighbors = g.neighbors(u);
        let inside: Vec<usize> = neighbors
            .iter()
            .map(|&i| i as usize)
            .filter(|&i| start >> i & 1 == 1)
            .collect();
        pull_formula += if neighbors.is_empty() {
            1.0
        } else {
            1.0 - q * inside.len() as f64 / neighbors.len() as f64
        };
        push_formula += inside
            .iter()
            .map(|&i| 1.0 - q / g.degree(i) as f64)
            .product::<f64>();
    }
    let pull_exact = n as f64 - exact_round_pmf(g, informed, Protocol::Pull, q)?.mean();
    let push_exact = n as f64 - exact_round_pmf(g, informed, Protocol::Push, q)?.mean();
    let pass = (pull_formula - pull_exact).abs() <= EXACT_TOLERANCE
        && (push_formula - push_exact).abs() <= EXACT_TOLERANCE;
    Ok(ExpectationReport {
        pull_formula,
        pull_exact,
        push_formula,
        push_exact,
        pass,
    })
}

/// Every labelled connected graph on `n` vertices.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!((1..=6).contains(&n), "exhaustive enumeration is for n <= 6");
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    (0u32..1 << pairs.len())
        .filter_map(|bits| {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| bits >> i & 1 == 1)
                .map(|(_, &e)| e);
            let g = Graph::from_edges(n, edges).expect("distinct pairs");
            crate::graph::is_connected(&g).then_some(g)
        })
        .collect()
}

fn describe(g: &Graph) -> String {
    let edges: Vec<String> = g.edges().map(|(u, v)| format!("{u}-{v}")).collect();
    format!("n={};{}", g.n(), edges.join(","))
}

fn nonempty_subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..1 << n).map(move |bits| (0..n).filter(|&v| bits >> v & 1 == 1).collect())
}

/// One line of an oracle report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub instance: String,
    pub informed: Vec<usize>,
    pub protocol: Protocol,
    pub q: f64,
    pub mean: f64,
    pub variance: f64,
    pub pass: bool,
}

/// Self-bounding check over all connected graphs on `1..=max_n` vertices,
/// every nonempty informed set, every protocol and every `q` in `qs`.
pub fn self_bounding_sweep(max_n: usize, qs: &[f64]) -> Result<Vec<OracleRecord>> {
    let graphs: Vec<Graph> = (1..=max_n).flat_map(connected_graphs).collect();
    let per_graph: Vec<Result<Vec<OracleRecord>>> = graphs
        .par_iter()
        .map(|g| {
            let mut records = Vec::new();
            let instance = describe(g);
            for informed in nonempty_subsets(g.n()) {
                for protocol in Protocol::ALL {
                    for &q in qs {
                        let r = verify_self_bounding(g, &informed, protocol, q)?;
                        records.push(OracleRecord {
                            instance: instance.clone(),
                            informed: informed.clone(),
                            protocol,
                            q,
                            mean: r.mean,
                            variance: r.variance,
                            pass: r.pass,
                        });
                    }
                }
            }
            Ok(records)
        })
        .collect();
    let mut all = Vec::new();
    for part in per_graph {
        all.extend(part?);
    }
    Ok(all)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectationRecord {
    pub instance: String,
    pub informed: Vec<usize>,
    pub q: f64,
    #[serde(flatten)]
    pub report: ExpectationReport,
}

pub fn expectation_sweep(max_n: usize, qs: &[f64]) -> Result<Vec<ExpectationRecord>> {
    let graphs: Vec<Graph> = (1..=max_n).flat_map(connected_graphs).collect();
    let per_graph: Vec<Result<Vec<ExpectationRecord>>> = graphs
        .par_iter()
        .map(|g| {
            let instance = describe(g);
            let mut records = Vec::new();
            for informed in nonempty_subsets(g.n()) {
                for &q in qs {
                    records.push(ExpectationRecord {
                        instance: instance.clone(),
                        informed: informed.clone(),
                        q,
                        report: verify_expectation_formulas(g, &informed, q)?,
                    });
                }
            }
            Ok(records)
        })
        .collect();
    let mut all = Vec::new();
    for part in per_graph {
        all.extend(part?);
    }
    Ok(all)
}

/// A tiny instance for engine/oracle agreement checks.
#[derive(Clone, Debug)]
pub struct TinyInstance {
    pub name: &'static str,
    pub graph: Graph,
    pub informed: Vec<usize>,
    pub protocol: Protocol,
    pub q: f64,
}

/// Twenty fixed instances covering all protocols, several `q` and graphs
/// with unequal degrees.
pub fn fixed_instances() -> Vec<TinyInstance> {
    let k3 = Graph::complete(3).unwrap();
    let k5 = Graph::complete(5).unwrap();
    let star4 = Graph::star(4).unwrap();
    let star6 = Graph::star(6).unwrap();
    let c6 = Graph::cycle(6).unwrap();
    let path5 = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
    let paw = Graph::from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
    let bowtie = Graph::from_edges(5, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]).unwrap();
    let lollipop =
        Graph::from_edges(7, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6)])
            .unwrap();
    use Protocol::*;
    let spec: [(&'static str, &Graph, &[usize], Protocol, f64); 20] = [
        ("k3-push-2", &k3, &[0, 1], Push, 1.0),
        ("k3-pull-1", &k3, &[0], Pull, 0.5),
        ("k3-pp-1", &k3, &[1], Pp, 0.7),
        ("k5-push-2", &k5, &[0, 3], Push, 0.6),
        ("k5-pull-2", &k5, &[1, 4], Pull, 0.9),
        ("k5-pp-1", &k5, &[2], Pp, 1.0),
        ("star4-push-center", &star4, &[0], Push, 1.0),
        ("star4-pull-leaf", &star4, &[2], Pull, 0.8),
        ("star6-pp-leaf", &star6, &[5], Pp, 0.5),
        ("star6-push-leaves", &star6, &[1, 2, 3], Push, 0.4),
        ("c6-push-1", &c6, &[0], Push, 0.9),
        ("c6-pull-arc", &c6, &[0, 1, 2], Pull, 0.3),
        ("c6-pp-2", &c6, &[0, 3], Pp, 0.8),
        ("path5-push-end", &path5, &[0, 1], Push, 0.7),
        ("path5-pull-mid", &path5, &[2], Pull, 1.0),
        ("paw-pp-tail", &paw, &[3], Pp, 0.6),
        ("paw-push-hub", &paw, &[2], Push, 0.5),
        ("bowtie-pull-hub", &bowtie, &[2], Pull, 0.7),
        ("bowtie-pp-wing", &bowtie, &[0, 1], Pp, 0.9),
        ("lollipop-pp-clique", &lollipop, &[0, 1], Pp, 0.75),
    ];
    spec.into_iter()
        .map(|(name, g, informed, protocol, q)| TinyInstance {
            name,
            graph: g.clone(),
            informed: informed.to_vec(),
            protocol,
            q,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementRecord {
    pub instance: String,
    pub protocol: Protocol,
    pub q: f64,
    pub exact_mean: f64,
    pub exact_variance: f64,
    pub sampled_mean: f64,
    pub repetitions: u64,
    /// `|sampled − exact|` in exact standard errors.
    pub z: f64,
    pub pass: bool,
}

/// Monte Carlo mean of `|I_{t+1}|` over `repetitions` engine rounds against
/// the exact mean; passes within `max_z` standard errors.
pub fn engine_agreement(inst: &TinyInstance, repetitions: u64, max_z: f64, seed: u64) -> Result<AgreementRecord> {
    let pmf = exact_round_pmf(&inst.graph, &inst.informed, inst.protocol, inst.q)?;
    let start = InformedSet::from_vertices(inst.graph.n(), &inst.informed)?;
    let mut rng = stream(seed);
    let mut total = 0u64;
    for _ in 0..repetitions {
        total += run_round(&inst.graph, &start, inst.protocol, inst.q, &mut rng)?.len() as u64;
    }
    let sampled_mean = total as f64 / repetitions as f64;
    let (exact_mean, exact_variance) = (pmf.mean(), pmf.variance());
    let se = (exact_variance / repetitions as f64).sqrt();
    let gap = (sampled_mean - exact_mean).abs();
    let z = if se > 0.0 {
        gap / se
    } else if gap < 1e-12 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(AgreementRecord {
        instance: inst.name.to_string(),
        protocol: inst.protocol,
        q: inst.q,
        exact_mean,
        exact_variance,
        sampled_mean,
        repetitions,
        z,
        pass: z <= max_z,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralCheck {
    pub check: String,
    pub instance: String,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Spectral self-checks: eigen-reconstruction of adjacency matrices, the
/// mixing bound on random regular graphs, and the two-block `λ_max` closed
/// form against its characteristic-polynomial root.
pub fn spectral_suite(seed: u64) -> Result<Vec<SpectralCheck>> {
    let mut checks = Vec::new();
    let mut graphs = vec![
        ("k8".to_string(), Graph::complete(8)?),
        ("star9".to_string(), Graph::star(9)?),
        ("c12".to_string(), Graph::cycle(12)?),
    ];
    for (i, (family, n)) in [
        (Family::Gnp { p: 0.2 }, 40),
        (Family::Regular { d: 6 }, 64),
        (Family::Regular { d: 3 }, 30),
        (Family::PushAdversary { eps: 0.3 }, 20),
        (Family::PpAdversary { eps: 0.2 }, 32),
    ]
    .into_iter()
    .enumerate()
    {
        let spec = FamilySpec::new(family, n)?;
        graphs.push((format!("{family}/n={n}"), generate(&spec, derive_seed(seed, &[i as u64]))?));
    }
    for (name, g) in &graphs {
        let (values, vectors) = adjacency_spectrum(g);
        let n = g.n();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let rebuilt: f64 = (0..n).map(|k| values[k] * vectors[(r, k)] * vectors[(c, k)]).sum();
                let target = if g.has_edge(r, c) { 1.0 } else { 0.0 };
                worst = worst.max((rebuilt - target).abs());
            }
        }
        checks.push(SpectralCheck {
            check: "eigen-reconstruction".into(),
            instance: name.clone(),
            error: worst,
            tolerance: 1e-9,
            pass: worst <= 1e-9,
        });
    }

    let mut rng = stream(derive_seed(seed, &[99]));
    for d in [4usize, 8, 16] {
        let spec = FamilySpec::new(Family::Regular { d }, 60)?;
        let g = generate(&spec, derive_seed(seed, &[100 + d as u64]))?;
        let lambda = spectral_profile(&g).lambda;
        let mut worst_slack = f64::NEG_INFINITY;
        for _ in 0..200 {
            let size = rng.gen_range(1..g.n());
            let mut all: Vec<usize> = (0..g.n()).collect();
            rand::seq::SliceRandom::shuffle(all.as_mut_slice(), &mut rng);
            all.truncate(size);
            let deviation = mixing_deviation(&g, &all)?;
            let bound = lambda * ((size * (g.n() - size)) as f64).sqrt();
            worst_slack = worst_slack.max(deviation - bound);
        }
        checks.push(SpectralCheck {
            check: "mixing-bound".into(),
            instance: format!("regular:d={d}/n=60"),
            error: worst_slack.max(0.0),
            tolerance: 1e-9,
            pass: worst_slack <= 1e-9,
        });
    }

    let mut worst = 0.0f64;
    let mut above = true;
    for i in 0..50 {
        let eps = 0.49 * i as f64 / 49.0;
        for j in 0..50 {
            let q = 0.02 + 0.98 * j as f64 / 49.0;
            let closed = lambda_max_pp(eps, q)?;
            worst = worst.max((closed - two_block_matrix(eps, q)?.top_eigenvalue()).abs());
            if eps > 0.0 {
                above &= closed > 1.0 + 2.0 * q;
            }
        }
    }
    checks.push(SpectralCheck {
        check: "lambda-max-closed-form".into(),
        instance: "50x50 grid".into(),
        error: worst,
        tolerance: 1e-12,
        pass: worst <= 1e-12 && above,
    });
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn k3_push_single_chooser() {
        let pmf = exact_round_pmf(&Graph::complete(3).unwrap(), &[0], Protocol::Push, 1.0).unwrap();
        assert!(close(pmf.size_pmf()[2], 1.0));
    }

    #[test]
    fn k3_push_two_informed() {
        let g = Graph::complete(3).unwrap();
        let pmf = exact_round_pmf(&g, &[0, 1], Protocol::Push, 1.0).unwrap();
        let sizes = pmf.size_pmf();
        assert!(close(sizes[2], 0.25) && close(sizes[3], 0.75));
        assert!(close(pmf.mean(), 2.75) && close(pmf.variance(), 0.1875));
        let r = verify_self_bounding(&g, &[0, 1], Protocol::Push, 1.0).unwrap();
        assert!(r.pass && close(r.variance, 0.1875) && close(r.mean, 2.75));
    }

    #[test]
    fn k3_pull_half() {
        let g = Graph::complete(3).unwrap();
        let pmf = exact_round_pmf(&g, &[0], Protocol::Pull, 0.5).unwrap();
        let sizes = pmf.size_pmf();
        assert!(close(sizes[1], 9.0 / 16.0) && close(sizes[2], 6.0 / 16.0) && close(sizes[3], 1.0 / 16.0));
        assert!(close(pmf.mean(), 1.5));
        assert!(close(pmf.probability(0b011), 3.0 / 16.0));
        let e = verify_expectation_formulas(&g, &[0], 0.5).unwrap();
        assert!(e.pass && close(e.pull_formula, 1.5) && close(e.pull_exact, 1.5));
    }

    #[test]
    fn star_push_from_center() {
        let g = Graph::star(4).unwrap();
        let e = verify_expectation_formulas(&g, &[0], 1.0).unwrap();
        assert!(close(e.push_formula, 2.0) && close(e.push_exact, 2.0) && e.pass);
        let pmf = exact_round_pmf(&g, &[0], Protocol::Push, 1.0).unwrap();
        assert!(close(pmf.size_pmf()[2], 1.0));
    }

    #[test]
    fn full_set_has_no_randomness() {
        let g = Graph::cycle(5).unwrap();
        let all: Vec<usize> = (0..5).collect();
        for p in Protocol::ALL {
            let r = verify_self_bounding(&g, &all, p, 0.4).unwrap();
            assert!(r.pass && r.variance == 0.0 && close(r.mean, 5.0));
        }
        let e = verify_expectation_formulas(&g, &all, 0.4).unwrap();
        assert!(e.pass && e.pull_formula == 0.0 && close(e.push_exact, 0.0));
    }

    #[test]
    fn pmf_support_and_mass() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)]).unwrap();
        for p in Protocol::ALL {
            let pmf = exact_round_pmf(&g, &[1, 4], p, 0.6).unwrap();
            assert!((pmf.total() - 1.0).abs() < 1e-12);
            for &set in pmf.outcomes().keys() {
                assert_eq!(set & pmf.start(), pmf.start());
                let added = (set & !pmf.start()).count_ones();
                match p {
                    Protocol::Push => assert!(added <= 2),
                    Protocol::Pull => assert!(added <= 3),
                    Protocol::Pp => {}
                }
            }
        }
    }

    #[test]
    fn too_large_instances() {
        let big = Graph::complete(21).unwrap();
        assert!(matches!(
            exact_round_pmf(&big, &[0], Protocol::Push, 1.0),
            Err(Error::InstanceTooLarge(_))
        ));
        let k15 = Graph::complete(15).unwrap();
        assert!(matches!(
            exact_round_pmf(&k15, &[0], Protocol::Pull, 1.0),
            Err(Error::InstanceTooLarge(_))
        ));
        assert!(exact_round_pmf(&k15, &[0], Protocol::Push, 1.0).is_ok());
    }

    #[test]
    fn connected_graph_counts() {
        // Labelled connected graphs: 1, 1, 4, 38, 728.
        let counts: Vec<usize> = (1..=5).map(|n| connected_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 4, 38, 728]);
    }

    #[test]
    fn twenty_fixed_instances() {
        let all = fixed_instances();
        assert_eq!(all.len(), 20);
        for inst in &all {
            exact_round_pmf(&inst.graph, &inst.informed, inst.protocol, inst.q).unwrap();
        }
    }
}
