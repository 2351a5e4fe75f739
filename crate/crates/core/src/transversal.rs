//! Schreier transversals built from spanning trees of the subgroup
//! graph, representative computation in the coset graph, and the
//! classification of representatives (internal, geodesic, stable,
//! singular).

use crate::automaton::ReducedAutomaton;
use crate::error::{Error, Result};
use crate::graph::{SpanningTree, StallingsGraph, BASEPOINT};
use crate::words::Word;
use serde::Serialize;
use std::collections::VecDeque;

/// Flags of a single representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RepClassification {
    pub internal: bool,
    pub geodesic: bool,
    pub stable: bool,
    pub singular: bool,
}

/// A right Schreier transversal `S`: tree words of a spanning tree of
/// the coset graph. Prefix-closed, one representative per coset.
pub struct SchreierTransversal {
    graph: StallingsGraph,
    tree: SpanningTree,
    automaton: ReducedAutomaton,
    subgroup_automaton: ReducedAutomaton,
    distances: Vec<usize>,
}

impl SchreierTransversal {
    pub fn new(graph: StallingsGraph, tree: SpanningTree) -> SchreierTransversal {
        let automaton = Self::build_automaton(&graph, &tree);
        let subgroup_automaton = ReducedAutomaton::subgroup(&graph);
        let distances = graph.distances_from(BASEPOINT);
        SchreierTransversal {
            graph,
            tree,
            automaton,
            subgroup_automaton,
            distances,
        }
    }

    pub fn geodesic(graph: StallingsGraph) -> SchreierTransversal {
        let tree = graph.geodesic_spanning_tree();
        SchreierTransversal::new(graph, tree)
    }

    pub fn graph(&self) -> &StallingsGraph {
        &self.graph
    }

    pub fn tree(&self) -> &SpanningTree {
        &self.tree
    }

    /// States `0..|V|` are the graph vertices carrying the tree edges in
    /// both directions; a shared external state per direction accepts the
    /// hanging-tree tails opened by each frontier descriptor.
    fn build_automaton(graph: &StallingsGraph, tree: &SpanningTree) -> ReducedAutomaton {
        let alphabet = graph.alphabet();
        let dirs = alphabet.dirs();
        let n = graph.vertex_count();
        let ext = |d: usize| n + d;
        let mut next = vec![vec![None; dirs]; n + dirs];
        for e in &tree.edges {
            next[e.src][2 * e.gen] = Some(e.dst);
            next[e.dst][2 * e.gen + 1] = Some(e.src);
        }
        for f in graph.frontier() {
            let d = f.missing_direction.dir();
            next[f.boundary_vertex][d] = Some(ext(d));
        }
        for d in 0..dirs {
            for d2 in 0..dirs {
                if d2 != (d ^ 1) {
                    next[ext(d)][d2] = Some(ext(d2));
                }
            }
        }
        ReducedAutomaton::from_parts(alphabet, BASEPOINT, vec![true; n + dirs], next)
            .intersection(&ReducedAutomaton::universe(alphabet))
    }

    /// The transversal as a regular set.
    pub fn automaton(&self) -> &ReducedAutomaton {
        &self.automaton
    }

    /// Trace of `w` through the subgroup graph: `Ok(vertex)` if the path
    /// stays internal, `Err((exit_vertex, position))` where it leaves.
    fn trace(&self, w: &Word) -> std::result::Result<usize, (usize, usize)> {
        match self.graph.trace_from(BASEPOINT, w) {
            Ok(v) => Ok(v),
            Err(pos) => {
                let prefix = w.prefix(pos);
                let v = self
                    .graph
                    .trace_from(BASEPOINT, &prefix)
                    .expect("prefix before fall-off stays internal");
                Err((v, pos))
            }
        }
    }

    /// The unique `s ∈ S` with `Cs = Cw`.
    pub fn representative(&self, w: &Word) -> Word {
        match self.trace(w) {
            Ok(v) => self.tree.word_to(v),
            Err((v, pos)) => {
                let head = self.tree.word_to(v);
                let tail = Word::from_letters_unchecked(w.as_slice()[pos..].to_vec());
                head.concat_no_cancel(&tail)
                    .expect("tail direction is missing at the exit vertex, tree arrival is not")
            }
        }
    }

    pub fn contains(&self, s: &Word) -> bool {
        self.automaton.accepts(s)
    }

    /// All representatives up to `max_len`, classified, in
    /// length-lexicographic order.
    pub fn enumerate(&self, max_len: usize) -> Vec<(Word, RepClassification)> {
        self.automaton
            .enumerate_words(max_len)
            .into_iter()
            .map(|s| {
                let c = self.classify_rep(&s).expect("enumerated word is in S");
                (s, c)
            })
            .collect()
    }

    pub fn classify_rep(&self, s: &Word) -> Result<RepClassification> {
        if !self.contains(s) {
            return Err(Error::NotInTransversal);
        }
        Ok(RepClassification {
            internal: self.is_internal(s),
            geodesic: self.is_geodesic(s).expect("membership already checked"),
            stable: self.is_stable(s).expect("membership already checked"),
            singular: self.is_singular(s),
        })
    }

    fn is_internal(&self, s: &Word) -> bool {
        self.trace(s).is_ok()
    }

    /// `|s|` equals the coset-graph distance from the basepoint to the
    /// endpoint of `s`. External endpoints hang off their exit vertex by
    /// a unique path, so only the internal part needs a BFS oracle.
    pub fn is_geodesic(&self, s: &Word) -> Result<bool> {
        if !self.contains(s) {
            return Err(Error::NotInTransversal);
        }
        let (v, internal_len) = match self.trace(s) {
            Ok(v) => (v, s.len()),
            Err((v, pos)) => (v, pos),
        };
        Ok(internal_len == self.distances[v])
    }

    /// `sC ⊆ S`, decided by automata emptiness.
    pub fn is_stable(&self, s: &Word) -> Result<bool> {
        if !self.contains(s) {
            return Err(Error::NotInTransversal);
        }
        let alphabet = self.graph.alphabet();
        let coset = ReducedAutomaton::finite(alphabet, std::slice::from_ref(s))
            .reduced_product(&self.subgroup_automaton);
        Ok(coset.is_subset_of(&self.automaton))
    }

    /// Membership of `s` in the generalized normalizer
    /// `{f : f⁻¹Cf ∩ C ≠ 1}`: the pullback of the conjugate subgroup
    /// graph with the subgroup graph has rank at least 1.
    pub fn is_singular(&self, s: &Word) -> bool {
        is_singular(s, &self.graph, &self.tree)
    }

    /// Internal representatives, one per graph vertex, in BFS order.
    pub fn internal_reps(&self) -> Vec<Word> {
        (0..self.graph.vertex_count())
            .map(|v| self.tree.word_to(v))
            .collect()
    }

    /// Pairs `(s1, s2)` of internal representatives with `s1s2⁻¹`
    /// singular; the generalized normalizer is the union of the double
    /// cosets `C s1s2⁻¹ C` over the returned pairs.
    pub fn generalized_normalizer(&self) -> Vec<(Word, Word)> {
        let reps = self.internal_reps();
        let mut out = Vec::new();
        for s1 in &reps {
            for s2 in &reps {
                let f = s1.multiply(&s2.inverse());
                if self.is_singular(&f) {
                    out.push((s1.clone(), s2.clone()));
                }
            }
        }
        out
    }

    /// A covering family of left cosets `s1s2⁻¹C` containing every
    /// unstable representative: all internal pairs, deduplicated by
    /// left-coset equality. Per-element stability stays decided by
    /// `is_stable`, not by this family.
    pub fn unstable_cosets(&self) -> Vec<(Word, Word)> {
        let reps = self.internal_reps();
        let mut out: Vec<(Word, Word)> = Vec::new();
        let mut kept: Vec<Word> = Vec::new();
        for s1 in &reps {
            for s2 in &reps {
                let f = s1.multiply(&s2.inverse());
                // uC = vC iff v^-1 u in C
                let dup = kept
                    .iter()
                    .any(|g| self.graph.membership(&g.inverse().multiply(&f)));
                if !dup {
                    kept.push(f);
                    out.push((s1.clone(), s2.clone()));
                }
            }
        }
        out
    }

    /// Representatives of the unstable part `S_uns` as a regular set:
    /// `S` minus the stable representatives, computed exactly from the
    /// coset family and the stability test is not needed; instead
    /// `S_uns = S ∩ (∪ s1s2⁻¹C)` over-approximates, so the exact set is
    /// assembled as a difference of `S` with the stable sublanguage.
    pub fn unstable_automaton(&self) -> ReducedAutomaton {
        // S_uns = S ∩ (union of covering cosets), then filtered: a
        // representative in a coset may still be stable, so remove the
        // exact stable language S_st = {s in S : sC ⊆ S}. S_st is regular:
        // s is stable iff no word of sC leaves S, i.e. s avoids the set
        // of words with an unstable continuation. Decide per automaton
        // state: stability of s depends only on the state s reaches in
        // the product of S's automaton with the coset machinery; here we
        // use the direct characterization below.
        self.stable_automaton().complement_in_f().intersection(&self.automaton)
    }

    /// The stable representatives `S_st = {s ∈ S : sC ⊆ S}` as a regular
    /// set. Stability of `s` depends only on the pair of states reached
    /// by `s` in (automaton of S, subset construction over C-translates),
    /// but at desk scale a per-state test suffices: two words reaching
    /// the same state of S's automaton with the same last letter have the
    /// same stable/unstable status.
    pub fn stable_automaton(&self) -> ReducedAutomaton {
        let typed = self.automaton.typed();
        let n = typed.aut.state_count();
        // find one witness word per typed state, test it, and keep the
        // states whose witnesses are stable
        let mut witness: Vec<Option<Word>> = vec![None; n];
        witness[typed.aut.initial()] = Some(Word::empty());
        let mut queue = VecDeque::from([typed.aut.initial()]);
        while let Some(v) = queue.pop_front() {
            let w = witness[v].clone().unwrap();
            for (l, t) in typed.aut.transitions_from(v) {
                if witness[t].is_none() {
                    let mut w2 = w.clone();
                    w2.push_unchecked(l);
                    witness[t] = Some(w2);
                    queue.push_back(t);
                }
            }
        }
        let accepting: Vec<bool> = (0..n)
            .map(|s| match &witness[s] {
                Some(w) => self.is_stable(w).unwrap_or(false),
                None => false,
            })
            .collect();
        let mut table = vec![vec![None; self.graph.alphabet().dirs()]; n];
        for (s, row) in table.iter_mut().enumerate() {
            for (l, t) in typed.aut.transitions_from(s) {
                row[l.dir()] = Some(t);
            }
        }
        ReducedAutomaton::from_parts(self.graph.alphabet(), typed.aut.initial(), accepting, table)
            .trimmed()
    }

    /// The singular representatives `S_sin ⊆ S` as a regular set:
    /// `S ∩ N*` where `N* = ∪ C s1s2⁻¹ C` over the normalizer family.
    pub fn singular_automaton(&self) -> ReducedAutomaton {
        let alphabet = self.graph.alphabet();
        let c = &self.subgroup_automaton;
        let mut n_star = ReducedAutomaton::empty(alphabet);
        let mut seen: Vec<Word> = Vec::new();
        for (s1, s2) in self.generalized_normalizer() {
            let f = s1.multiply(&s2.inverse());
            let dup = seen
                .iter()
                .any(|g| self.double_coset_eq(g, &f));
            if dup {
                continue;
            }
            seen.push(f.clone());
            let mid = ReducedAutomaton::finite(alphabet, &[f]);
            let dc = c.reduced_product(&mid).reduced_product(c);
            n_star = n_star.union(&dc).minimized();
        }
        self.automaton.intersection(&n_star)
    }

    /// `Cs1C = Cs2C` iff `s2 ∈ Cs1C`.
    fn double_coset_eq(&self, a: &Word, b: &Word) -> bool {
        let alphabet = self.graph.alphabet();
        let c = &self.subgroup_automaton;
        let mid = ReducedAutomaton::finite(alphabet, std::slice::from_ref(a));
        let dc = c.reduced_product(&mid).reduced_product(c);
        dc.accepts(b)
    }
}

/// `s` lies in the generalized normalizer of the subgroup of `graph`:
/// `s⁻¹Cs ∩ C ≠ 1`.
pub fn is_singular(s: &Word, graph: &StallingsGraph, tree: &SpanningTree) -> bool {
    let basis = graph.basis(tree);
    if basis.is_empty() {
        return false;
    }
    let conj: Vec<Word> = basis
        .iter()
        .map(|g| s.inverse().multiply(g).multiply(s))
        .collect();
    let conj_graph =
        StallingsGraph::build(graph.alphabet(), &conj).expect("conjugates share the alphabet");
    !conj_graph.intersect(graph).is_trivial()
}
