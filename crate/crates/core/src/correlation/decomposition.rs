use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::Result;
use crate::exact::{QMatrix, Q};
use crate::subst::SubstitutionRule;

/// The induced substitution `σ⊗σ` on ordered letter pairs.
///
/// `(σ⊗σ)(αβ)` is the word of pairs `(σ(α)_i, σ(β)_i)` for `i < L`. Pairs
/// are indexed lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiSubstitution {
    rule: SubstitutionRule,
}

impl BiSubstitution {
    pub fn new(rule: &SubstitutionRule) -> Self {
        Self { rule: rule.clone() }
    }

    pub fn length(&self) -> usize {
        self.rule.length()
    }

    pub fn pair_count(&self) -> usize {
        self.rule.size() * self.rule.size()
    }

    /// Pair reached from `pair` at image position `i`.
    pub fn step(&self, pair: usize, i: usize) -> usize {
        let d = self.rule.size();
        let a = self.rule.image((pair / d) as u8)[i];
        let b = self.rule.image((pair % d) as u8)[i];
        usize::from(a) * d + usize::from(b)
    }

    pub fn image(&self, pair: usize) -> Vec<usize> {
        (0..self.length()).map(|i| self.step(pair, i)).collect()
    }

    /// Image with two-letter labels, e.g. `AB ↦ [AA, BB, DA, BC]` for `σ`.
    pub fn image_labels(&self, pair: &str) -> Result<Vec<String>> {
        let alphabet = self.rule.alphabet();
        let idx = alphabet.pair_index(pair)?;
        Ok(self
            .image(idx)
            .into_iter()
            .map(|p| alphabet.pair_label(p))
            .collect())
    }
}

/// Closed strongly connected classes of the pair graph, the remaining
/// transient pairs, and the absorption probabilities of the uniform pair
/// chain into each class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisubstDecomposition {
    /// Pair indices per class, each sorted; classes ordered by smallest member.
    pub ergodic_classes: Vec<Vec<usize>>,
    pub transient: Vec<usize>,
    /// `absorption[pair][c]`: probability that the chain started at `pair`
    /// ends in class `c`. Indicator rows for recurrent pairs.
    pub absorption: Vec<Vec<Q>>,
    pub(crate) labels: Vec<String>,
}

impl BisubstDecomposition {
    pub fn class_count(&self) -> usize {
        self.ergodic_classes.len()
    }

    pub fn pair_count(&self) -> usize {
        self.absorption.len()
    }

    pub fn label(&self, pair: usize) -> &str {
        &self.labels[pair]
    }

    pub fn class_labels(&self) -> Vec<Vec<String>> {
        self.ergodic_classes
            .iter()
            .map(|c| c.iter().map(|&p| self.labels[p].clone()).collect())
            .collect()
    }

    pub fn transient_labels(&self) -> Vec<String> {
        self.transient
            .iter()
            .map(|&p| self.labels[p].clone())
            .collect()
    }

    /// Class index of a recurrent pair.
    pub fn class_of(&self, pair: usize) -> Option<usize> {
        self.ergodic_classes.iter().position(|c| c.contains(&pair))
    }
}

/// Ergodic decomposition of `σ⊗σ`: the pair graph has an edge
/// `αβ → (σ(α)_i, σ(β)_i)` for every `i`; its closed SCCs are the ergodic
/// classes.
pub fn ergodic_decomposition(rule: &SubstitutionRule) -> Result<BisubstDecomposition> {
    let bi = BiSubstitution::new(rule);
    let n = bi.pair_count();
    let l = bi.length();

    let mut graph = DiGraph::<usize, ()>::with_capacity(n, n * l);
    let nodes: Vec<_> = (0..n).map(|p| graph.add_node(p)).collect();
    for p in 0..n {
        for i in 0..l {
            graph.update_edge(nodes[p], nodes[bi.step(p, i)], ());
        }
    }

    let mut component = vec![usize::MAX; n];
    let sccs = tarjan_scc(&graph);
    for (ci, scc) in sccs.iter().enumerate() {
        for node in scc {
            component[graph[*node]] = ci;
        }
    }
    let mut classes: Vec<Vec<usize>> = sccs
        .iter()
        .enumerate()
        .filter(|(ci, scc)| {
            scc.iter().all(|node| {
                let p = graph[*node];
                (0..l).all(|i| component[bi.step(p, i)] == *ci)
            })
        })
        .map(|(_, scc)| {
            let mut members: Vec<usize> = scc.iter().map(|node| graph[*node]).collect();
            members.sort_unstable();
            members
        })
        .collect();
    classes.sort_by_key(|c| c[0]);

    let class_of = |p: usize| classes.iter().position(|c| c.contains(&p));
    let transient: Vec<usize> = (0..n).filter(|&p| class_of(p).is_none()).collect();
    let absorption = absorption_probabilities(&bi, &classes, &transient);
    let labels = (0..n).map(|p| rule.alphabet().pair_label(p)).collect();

    Ok(BisubstDecomposition {
        ergodic_classes: classes,
        transient,
        absorption,
        labels,
    })
}

/// Exact absorption probabilities of the chain that moves
/// `αβ → (σ(α)_i, σ(β)_i)` with `i` uniform: `(I − P_TT)·a_c = P_{T→c}·1`.
fn absorption_probabilities(
    bi: &BiSubstitution,
    classes: &[Vec<usize>],
    transient: &[usize],
) -> Vec<Vec<Q>> {
    let n = bi.pair_count();
    let l = bi.length();
    let step_prob = Q::new(One::one(), l.into());
    let mut out = vec![vec![Q::zero(); classes.len()]; n];
    for (c, class) in classes.iter().enumerate() {
        for &p in class {
            out[p][c] = Q::one();
        }
    }
    if transient.is_empty() {
        return out;
    }

    let t_index = |p: usize| transient.iter().position(|&t| t == p);
    let m = transient.len();
    let mut system = QMatrix::identity(m);
    let mut rhs = vec![vec![Q::zero(); m]; classes.len()];
    for (row, &p) in transient.iter().enumerate() {
        for i in 0..l {
            let next = bi.step(p, i);
            if let Some(col) = t_index(next) {
                system[(row, col)] -= &step_prob;
            } else if let Some(c) = classes.iter().position(|cl| cl.contains(&next)) {
                rhs[c][row] += &step_prob;
            }
        }
    }
    for (c, b) in rhs.iter().enumerate() {
        // every transient pair reaches a closed class, so I − P_TT is nonsingular
        let a = system.solve(b).expect("transient block is substochastic");
        for (row, &p) in transient.iter().enumerate() {
            out[p][c] = a[row].clone();
        }
    }
    out
}
