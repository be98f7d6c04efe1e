//! Largest sets of inputs whose pairwise delta patterns avoid `H_k`.
//!
//! Two distinct inputs are adjacent when their delta pattern is not a
//! codeword; such sets are exactly the cliques of that graph, and they are
//! the row sets of 1-monochromatic rectangles `A x A` on the diagonal.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bits::Bits;
use crate::error::{Error, Result};
use crate::hadamard;
use crate::heqfun::{delta_pattern, HeqInput, HeqParams, InstanceRecord};

#[derive(Debug, Clone)]
pub struct ConditionGraph {
    params: HeqParams,
    adj: Vec<Bits>,
}

impl ConditionGraph {
    pub fn new(params: HeqParams, budget: u64) -> Result<Self> {
        let n = vertex_count(params, budget)?;
        let inputs: Vec<HeqInput> = (0..n as u64).map(|i| params.input_at(i)).collect();
        let mut adj = vec![Bits::new(n); n];
        for u in 0..n {
            for v in u + 1..n {
                let p = delta_pattern(&inputs[u], &inputs[v])?;
                if !p.is_codeword() {
                    adj[u].insert(v);
                    adj[v].insert(u);
                }
            }
        }
        Ok(ConditionGraph { params, adj })
    }

    pub fn params(&self) -> HeqParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn vertex(&self, i: usize) -> HeqInput {
        self.params.input_at(i as u64)
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].count()
    }

    /// Exact maximum clique by branch and bound with a greedy colouring bound.
    pub fn max_clique(&self) -> (Vec<usize>, u64) {
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.degree(b).cmp(&self.degree(a)).then(a.cmp(&b)));
        let mut search = MaxClique {
            graph: self,
            best: Vec::new(),
            nodes: 0,
        };
        let mut current = Vec::new();
        search.expand(&mut current, order);
        let mut best = search.best;
        best.sort_unstable();
        (best, search.nodes)
    }
}

/// Every nonempty condition set, in lexicographic order of input indices.
/// Fails once more than `max_sets` sets have been produced.
pub fn all_condition_sets(
    params: HeqParams,
    budget: u64,
    max_sets: usize,
) -> Result<Vec<Vec<HeqInput>>> {
    let g = ConditionGraph::new(params, budget)?;
    let mut out = Vec::new();
    let mut current = Vec::new();
    extend_sets(&g, &mut current, 0, max_sets, &mut out)?;
    Ok(out
        .into_iter()
        .map(|set: Vec<usize>| set.into_iter().map(|i| g.vertex(i)).collect())
        .collect())
}

fn extend_sets(
    g: &ConditionGraph,
    current: &mut Vec<usize>,
    from: usize,
    max_sets: usize,
    out: &mut Vec<Vec<usize>>,
) -> Result<()> {
    for v in from..g.len() {
        if current.iter().all(|&u| g.is_edge(u, v)) {
            current.push(v);
            if out.len() == max_sets {
                return Err(Error::BudgetExceeded {
                    what: "condition set enumeration",
                    needed: format!("more than {max_sets} sets"),
                    budget: max_sets.to_string(),
                });
            }
            out.push(current.clone());
            extend_sets(g, current, v + 1, max_sets, out)?;
            current.pop();
        }
    }
    Ok(())
}

fn vertex_count(params: HeqParams, budget: u64) -> Result<usize> {
    params
        .input_count()
        .filter(|&n| n <= budget)
        .map(|n| n as usize)
        .ok_or_else(|| Error::BudgetExceeded {
            what: "condition graph",
            needed: format!("(2^{})^{} vertices", params.kprime, params.input_len()),
            budget: budget.to_string(),
        })
}

struct MaxClique<'a> {
    graph: &'a ConditionGraph,
    best: Vec<usize>,
    nodes: u64,
}

impl MaxClique<'_> {
    /// Greedy sequential colouring of `cands`; returns vertices sorted by
    /// colour with the colour number (an upper bound on any clique among the
    /// vertices up to that point).
    fn colour(&self, cands: &[usize]) -> Vec<(usize, usize)> {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &v in cands {
            match classes
                .iter_mut()
                .find(|c| c.iter().all(|&u| !self.graph.is_edge(u, v)))
            {
                Some(c) => c.push(v),
                None => classes.push(vec![v]),
            }
        }
        classes
            .into_iter()
            .enumerate()
            .flat_map(|(c, vs)| vs.into_iter().map(move |v| (v, c + 1)))
            .collect()
    }

    fn expand(&mut self, current: &mut Vec<usize>, cands: Vec<usize>) {
        self.nodes += 1;
        let coloured = self.colour(&cands);
        let mut alive: Vec<usize> = cands;
        for &(v, colour) in coloured.iter().rev() {
            if current.len() + colour <= self.best.len() {
                return;
            }
            current.push(v);
            let next: Vec<usize> = alive
                .iter()
                .copied()
                .filter(|&u| u != v && self.graph.is_edge(v, u))
                .collect();
            if next.is_empty() {
                if current.len() > self.best.len() {
                    self.best = current.clone();
                }
            } else {
                self.expand(current, next);
            }
            current.pop();
            alive.retain(|&u| u != v);
        }
    }
}

/// Direct check of the pairwise condition on a set of inputs: every pair of
/// distinct members must have a delta pattern outside `H_k`, checked by
/// exhaustive codeword comparison. Returns the first offending pair of
/// positions, if any.
pub fn satisfies_condition(set: &[HeqInput]) -> Result<Option<(usize, usize)>> {
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            let p = delta_pattern(&set[i], &set[j])?;
            // Identical members give the zero pattern, which is a codeword.
            if hadamard::is_codeword(p.bits())? {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum CliqueMode {
    Exact,
    /// Seeded randomized greedy: `restarts` rounds, each drawing `tries`
    /// random inputs and keeping those compatible with the set so far.
    Heuristic {
        seed: u64,
        restarts: u32,
        tries: u32,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct CliqueResult {
    pub k: u32,
    pub kprime: u32,
    pub size: usize,
    /// `true` when `size` is the proven maximum.
    pub exact: bool,
    pub search_nodes: u64,
    #[serde(serialize_with = "ser_witness")]
    pub witness: Vec<HeqInput>,
}

fn ser_witness<S: serde::Serializer>(w: &[HeqInput], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(w.iter().map(|a| a.entries()))
}

/// Largest condition set for `params`: exact (graph must fit in `budget`
/// vertices) or a verified lower bound from the seeded heuristic.
pub fn max_condition_set(params: HeqParams, mode: CliqueMode, budget: u64) -> Result<CliqueResult> {
    let (witness, exact, nodes) = match mode {
        CliqueMode::Exact => {
            let g = ConditionGraph::new(params, budget)?;
            let (best, nodes) = g.max_clique();
            (
                best.into_iter().map(|i| g.vertex(i)).collect::<Vec<_>>(),
                true,
                nodes,
            )
        }
        CliqueMode::Heuristic {
            seed,
            restarts,
            tries,
        } => {
            let (w, nodes) = heuristic(params, seed, restarts, tries);
            (w, false, nodes)
        }
    };
    if let Some((i, j)) = satisfies_condition(&witness)? {
        let rec = InstanceRecord::from_pair(&witness[i], &witness[j]);
        return Err(Error::InvalidInput(format!(
            "solver produced an invalid set; offending pair {rec:?}"
        )));
    }
    Ok(CliqueResult {
        k: params.k,
        kprime: params.kprime,
        size: witness.len(),
        exact,
        search_nodes: nodes,
        witness,
    })
}

fn heuristic(params: HeqParams, seed: u64, restarts: u32, tries: u32) -> (Vec<HeqInput>, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphabet = params.alphabet();
    let mut best: Vec<HeqInput> = vec![HeqInput::zeros(params)];
    let mut draws = 0u64;
    for _ in 0..restarts.max(1) {
        let mut set: Vec<HeqInput> = Vec::new();
        for _ in 0..tries.max(1) {
            draws += 1;
            let entries = (0..params.input_len())
                .map(|_| rng.random_range(0..alphabet) as u32)
                .collect();
            let cand = HeqInput::new(params, entries).expect("in range");
            let fits = set.iter().all(|m| {
                let p = delta_pattern(m, &cand).expect("same params");
                !p.is_zero() && !p.is_codeword()
            });
            if fits {
                set.push(cand);
            }
        }
        if set.len() > best.len() {
            best = set;
        }
    }
    best.sort();
    (best, draws)
}
