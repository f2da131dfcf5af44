use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mask::{binomial, Combinations, SubsetMask};

/// An `s`-uniform hypergraph on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypergraph {
    n: usize,
    s: usize,
    edges: Vec<SubsetMask>,
}

/// Largest vertex count for the exact searches.
pub const EXACT_VERTEX_CAP: usize = 20;

impl Hypergraph {
    pub fn new(n: usize, s: usize, edges: impl IntoIterator<Item = SubsetMask>) -> Result<Self> {
        let mut edges: Vec<SubsetMask> = edges.into_iter().collect();
        if let Some(e) = edges.iter().find(|e| e.len() != s || !e.fits(n)) {
            return Err(Error::invalid(format!(
                "edge {e} is not an {s}-subset of 0..{n}"
            )));
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Hypergraph { n, s, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn edges(&self) -> &[SubsetMask] {
        &self.edges
    }

    /// No edge lies inside `set`.
    pub fn is_independent(&self, set: &SubsetMask) -> bool {
        !self.edges.iter().any(|e| e.is_subset(set))
    }

    fn check_exact(&self) -> Result<()> {
        if self.n > EXACT_VERTEX_CAP {
            return Err(Error::ResourceLimit {
                what: "exact independent-set search vertices",
                needed: self.n as u128,
                cap: EXACT_VERTEX_CAP as u128,
            });
        }
        Ok(())
    }

    fn edge_bits(&self) -> Vec<Vec<u32>> {
        let mut by_vertex = vec![Vec::new(); self.n];
        for e in &self.edges {
            let bits = e.low_bits() as u32;
            for v in e.iter() {
                by_vertex[v].push(bits);
            }
        }
        by_vertex
    }
}

/// Lexicographically first independent set of size `l`, by exact search.
pub fn turan_independent(h: &Hypergraph, l: usize) -> Result<Option<SubsetMask>> {
    h.check_exact()?;
    fn rec(by_vertex: &[Vec<u32>], v: usize, chosen: u32, need: usize) -> Option<u32> {
        if need == 0 {
            return Some(chosen);
        }
        if by_vertex.len() - v < need {
            return None;
        }
        let with = chosen | 1 << v;
        if by_vertex[v].iter().all(|&e| e & !with != 0) {
            if let Some(found) = rec(by_vertex, v + 1, with, need - 1) {
                return Some(found);
            }
        }
        rec(by_vertex, v + 1, chosen, need)
    }
    let found = rec(&h.edge_bits(), 0, 0, l);
    Ok(found.map(|b| SubsetMask::from_bits(u64::from(b))))
}

/// `|E| < C(l-1,s-1)^-1 (n-l+1)/(n-s+1) C(n,s)`, in exact integers.
pub fn below_turan_threshold(n: usize, s: usize, edges: usize, l: usize) -> bool {
    if l == 0 || l > n || s == 0 || s > n {
        return false;
    }
    let lhs = edges as u128 * binomial(l as u64 - 1, s as u64 - 1) * (n - s + 1) as u128;
    let rhs = (n - l + 1) as u128 * binomial(n as u64, s as u64);
    lhs < rhs
}

/// Largest `l` whose threshold lies above `edges` (0 if none).
fn guaranteed_size(n: usize, edges: usize) -> usize {
    (1..=n)
        .filter(|&l| below_turan_threshold(n, 2, edges, l))
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TuranSweep {
    pub max_n: usize,
    pub graphs: u64,
    pub failures: u64,
    /// `(n, edges, l)` of the first graph whose independence number falls
    /// below a size the threshold guarantees.
    pub first_failure: Option<(usize, Vec<(usize, usize)>, usize)>,
}

/// For each subset of `0..n` (as bits) whether it is independent in the
/// graph with neighbour masks `adj`.
fn independent_table(adj: &[u32]) -> Vec<bool> {
    let n = adj.len();
    let mut table = vec![false; 1 << n];
    table[0] = true;
    for s in 1usize..1 << n {
        let v = 31 - (s as u32).leading_zeros() as usize;
        let rest = s & !(1 << v);
        table[s] = table[rest] && adj[v] as usize & rest == 0;
    }
    table
}

fn adjacency(n: usize, pairs: &[(usize, usize)], bits: u64) -> Vec<u32> {
    let mut adj = vec![0u32; n];
    for (i, &(a, b)) in pairs.iter().enumerate() {
        if bits >> i & 1 == 1 {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
    }
    adj
}

fn edge_list(pairs: &[(usize, usize)], bits: u64) -> Vec<(usize, usize)> {
    (0..pairs.len())
        .filter(|&i| bits >> i & 1 == 1)
        .map(|i| pairs[i])
        .collect()
}

/// Checks every labeled graph on `2..=max_n` vertices (`max_n <= 8`): its
/// independence number reaches every `l` whose threshold exceeds its edge
/// count. Graphs on 8 vertices are handled as one extra vertex joined to a
/// subset of a 7-vertex graph.
pub fn turan_graph_sweep(max_n: usize) -> Result<TuranSweep> {
    if max_n > 8 {
        return Err(Error::ResourceLimit {
            what: "exhaustive graph sweep vertices",
            needed: max_n as u128,
            cap: 8,
        });
    }
    let mut out = TuranSweep {
        max_n,
        graphs: 0,
        failures: 0,
        first_failure: None,
    };
    for n in 2..=max_n.min(7) {
        let pairs: Vec<(usize, usize)> = Combinations::new(n, 2).map(|c| (c[0], c[1])).collect();
        let need: Vec<usize> = (0..=pairs.len()).map(|e| guaranteed_size(n, e)).collect();
        let failures: Vec<(u64, usize)> = (0..1u64 << pairs.len())
            .into_par_iter()
            .filter_map(|bits| {
                let table = independent_table(&adjacency(n, &pairs, bits));
                let alpha = (0..table.len())
                    .filter(|&s| table[s])
                    .map(|s| s.count_ones() as usize)
                    .max()
                    .unwrap_or(0);
                let l = need[bits.count_ones() as usize];
                (alpha < l).then_some((bits, l))
            })
            .collect();
        out.graphs += 1 << pairs.len();
        out.failures += failures.len() as u64;
        if out.first_failure.is_none() {
            out.first_failure = failures.first().map(|&(b, l)| (n, edge_list(&pairs, b), l));
        }
    }
    if max_n == 8 {
        let pairs: Vec<(usize, usize)> = Combinations::new(7, 2).map(|c| (c[0], c[1])).collect();
        let need: Vec<usize> = (0..=28).map(|e| guaranteed_size(8, e)).collect();
        let need = &need;
        let failures: Vec<(u64, u32, usize)> = (0..1u64 << 21)
            .into_par_iter()
            .flat_map_iter(|bits| {
                let table = independent_table(&adjacency(7, &pairs, bits));
                // best[T]: largest independent set inside T.
                let mut best: Vec<u8> = (0..128usize)
                    .map(|s| if table[s] { s.count_ones() as u8 } else { 0 })
                    .collect();
                for v in 0..7 {
                    for t in 0..128usize {
                        if t >> v & 1 == 1 {
                            best[t] = best[t].max(best[t & !(1 << v)]);
                        }
                    }
                }
                let alpha7 = best[127] as usize;
                let e7 = bits.count_ones() as usize;
                (0..128u32).filter_map(move |nb| {
                    let alpha = alpha7.max(1 + best[(!nb & 127) as usize] as usize);
                    let l = need[e7 + nb.count_ones() as usize];
                    (alpha < l).then_some((bits, nb, l))
                })
            })
            .collect();
        out.graphs += 1 << 28;
        out.failures += failures.len() as u64;
        if out.first_failure.is_none() {
            out.first_failure = failures.first().map(|&(b, nb, l)| {
                let mut edges = edge_list(&pairs, b);
                edges.extend((0..7).filter(|v| nb >> v & 1 == 1).map(|v| (v, 7)));
                (8, edges, l)
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalGlobalReport {
    pub n: usize,
    pub s: usize,
    pub t: usize,
    /// `t < s <= 2s - 3`, the range as literally stated.
    pub stated_range: bool,
    /// `t < s <= 2t - 3`.
    pub corrected_range: bool,
    /// Every `s`-subset holds an independent `t`-subset.
    pub hypothesis_holds: bool,
    pub failing_subset: Option<SubsetMask>,
    pub independence_number: usize,
    /// `n - s + 1`.
    pub target: usize,
    pub independent_set: Option<SubsetMask>,
    /// Hypothesis holds inside the corrected range.
    pub lemma_applies: bool,
    /// The lemma applies and its conclusion fails.
    pub counterexample: bool,
}

/// Independence number of every induced subgraph, indexed by vertex subset.
fn induced_alpha(adj: &[u32]) -> Vec<u8> {
    let n = adj.len();
    let mut alpha = vec![0u8; 1 << n];
    for s in 1usize..1 << n {
        let v = s.trailing_zeros() as usize;
        let rest = s & !(1 << v);
        alpha[s] = alpha[rest].max(1 + alpha[rest & !(adj[v] as usize)]);
    }
    alpha
}

/// Checks "every `s`-set holds an independent `t`-set" and looks for an
/// independent set of size `n - s + 1`.
pub fn local_to_global_independent(
    g: &Hypergraph,
    s: usize,
    t: usize,
) -> Result<LocalGlobalReport> {
    if g.s() != 2 {
        return Err(Error::invalid(
            "local-to-global check needs a graph (s = 2 edges)",
        ));
    }
    let n = g.n();
    if n > 18 {
        return Err(Error::ResourceLimit {
            what: "local-to-global vertices",
            needed: n as u128,
            cap: 18,
        });
    }
    if s == 0 || s > n || t > s {
        return Err(Error::invalid(format!(
            "need 1 <= s <= n and t <= s, got s={s}, t={t}, n={n}"
        )));
    }
    let mut adj = vec![0u32; n];
    for e in g.edges() {
        let v = e.to_vec();
        adj[v[0]] |= 1 << v[1];
        adj[v[1]] |= 1 << v[0];
    }
    let alpha = induced_alpha(&adj);
    let failing_subset = Combinations::new(n, s)
        .map(SubsetMask::from_indices)
        .find(|m| (alpha[m.low_bits() as usize] as usize) < t);
    let target = n - s + 1;
    let independent_set = turan_independent(g, target)?;
    let stated_range = t < s && s + 3 <= 2 * s;
    let corrected_range = t < s && s + 3 <= 2 * t;
    let hypothesis_holds = failing_subset.is_none();
    let lemma_applies = corrected_range && hypothesis_holds;
    Ok(LocalGlobalReport {
        n,
        s,
        t,
        stated_range,
        corrected_range,
        hypothesis_holds,
        failing_subset,
        independence_number: alpha[(1usize << n) - 1] as usize,
        target,
        counterexample: lemma_applies && independent_set.is_none(),
        independent_set,
        lemma_applies,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalGlobalSweep {
    pub instances: usize,
    /// Instances in the corrected range satisfying the hypothesis.
    pub applicable: usize,
    pub counterexamples: usize,
    /// Instances in the literal range satisfying the hypothesis but lacking
    /// an independent set of size `n - s + 1`.
    pub stated_range_failures: usize,
    pub first_counterexample: Option<(usize, Vec<(usize, usize)>, usize, usize)>,
}

/// Seeded sparse random graphs on `6..=max_n` vertices with random `(s, t)`.
pub fn local_to_global_sweep(
    instances: usize,
    max_n: usize,
    seed: u64,
) -> Result<LocalGlobalSweep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = LocalGlobalSweep {
        instances,
        applicable: 0,
        counterexamples: 0,
        stated_range_failures: 0,
        first_counterexample: None,
    };
    for _ in 0..instances {
        let n = rng.gen_range(6..=max_n.max(6));
        let t = rng.gen_range(2..=(n + 3) / 2);
        let s = rng.gen_range(t + 1..=n.min(2 * t + 2).max(t + 1));
        let edge_count = rng.gen_range(0..=n);
        let edges: Vec<SubsetMask> = (0..edge_count)
            .map(|_| super::shadow::random_subset(&mut rng, n, 2))
            .collect();
        let g = Hypergraph::new(n, 2, edges)?;
        let rep = local_to_global_independent(&g, s, t)?;
        if rep.lemma_applies {
            out.applicable += 1;
        }
        if rep.counterexample {
            out.counterexamples += 1;
            out.first_counterexample.get_or_insert_with(|| {
                let e = g
                    .edges()
                    .iter()
                    .map(|e| (e.to_vec()[0], e.to_vec()[1]))
                    .collect();
                (n, e, s, t)
            });
        }
        if rep.stated_range && rep.hypothesis_holds && rep.independent_set.is_none() {
            out.stated_range_failures += 1;
        }
    }
    Ok(out)
}
