//! Deterministic automata over reduced words: the representation of
//! regular subsets of the free group.
//!
//! Every constructor and operation maintains the invariant that the
//! accepted language consists of freely reduced words only; complements
//! are always taken relative to the set of reduced words, never over the
//! raw free monoid.

use crate::error::{Error, Result};
use crate::graph::StallingsGraph;
use crate::words::{Alphabet, Letter, Word};
use serde::ser::SerializeStruct;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

/// Deterministic partial automaton over `X ∪ X^-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedAutomaton {
    alphabet: Alphabet,
    initial: usize,
    accepting: Vec<bool>,
    next: Vec<Vec<Option<usize>>>,
}

impl ReducedAutomaton {
    pub fn from_parts(
        alphabet: Alphabet,
        initial: usize,
        accepting: Vec<bool>,
        next: Vec<Vec<Option<usize>>>,
    ) -> Self {
        debug_assert_eq!(accepting.len(), next.len());
        debug_assert!(next.iter().all(|r| r.len() == alphabet.dirs()));
        ReducedAutomaton {
            alphabet,
            initial,
            accepting,
            next,
        }
    }

    /// Accepts every reduced word. One root state plus a last-letter state
    /// per direction.
    pub fn universe(alphabet: Alphabet) -> Self {
        let dirs = alphabet.dirs();
        let mut next = vec![vec![None; dirs]; dirs + 1];
        for d in 0..dirs {
            next[0][d] = Some(d + 1);
            for d2 in 0..dirs {
                if d2 != (d ^ 1) {
                    next[d + 1][d2] = Some(d2 + 1);
                }
            }
        }
        ReducedAutomaton {
            alphabet,
            initial: 0,
            accepting: vec![true; dirs + 1],
            next,
        }
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        ReducedAutomaton {
            alphabet,
            initial: 0,
            accepting: vec![false],
            next: vec![vec![None; alphabet.dirs()]],
        }
    }

    /// The cone `C(u)`: all reduced words with prefix `u`.
    pub fn cone(alphabet: Alphabet, base: &Word) -> Self {
        if base.is_empty() {
            return Self::universe(alphabet);
        }
        let dirs = alphabet.dirs();
        let n = base.len();
        // spine 0..n, then one free state per last direction
        let free = |d: usize| n + 1 + d;
        let mut next = vec![vec![None; dirs]; n + 1 + dirs];
        for (i, l) in base.letters().enumerate() {
            next[i][l.dir()] = Some(i + 1);
        }
        let last = base.last().unwrap().dir();
        for d in 0..dirs {
            if d != (last ^ 1) {
                next[n][d] = Some(free(d));
            }
            for d2 in 0..dirs {
                if d2 != (d ^ 1) {
                    next[free(d)][d2] = Some(free(d2));
                }
            }
        }
        let mut accepting = vec![false; n + 1 + dirs];
        for a in accepting.iter_mut().skip(n) {
            *a = true;
        }
        ReducedAutomaton {
            alphabet,
            initial: 0,
            accepting,
            next,
        }
        .trimmed()
    }

    /// A finite set of words, as a trie.
    pub fn finite(alphabet: Alphabet, words: &[Word]) -> Self {
        let dirs = alphabet.dirs();
        let mut next: Vec<Vec<Option<usize>>> = vec![vec![None; dirs]];
        let mut accepting = vec![false];
        for w in words {
            let mut cur = 0usize;
            for l in w.letters() {
                cur = match next[cur][l.dir()] {
                    Some(t) => t,
                    None => {
                        next.push(vec![None; dirs]);
                        accepting.push(false);
                        let t = next.len() - 1;
                        next[cur][l.dir()] = Some(t);
                        t
                    }
                };
            }
            accepting[cur] = true;
        }
        ReducedAutomaton {
            alphabet,
            initial: 0,
            accepting,
            next,
        }
        .trimmed()
    }

    /// The subgroup `C = L(Γ, {1}, 1)` recognized by its Stallings graph.
    pub fn subgroup(graph: &StallingsGraph) -> Self {
        let n = graph.vertex_count();
        let dirs = graph.alphabet().dirs();
        let mut next = vec![vec![None; dirs]; n];
        for (v, row) in next.iter_mut().enumerate() {
            for (d, slot) in row.iter_mut().enumerate() {
                *slot = graph.transition(v, Letter::from_dir(d));
            }
        }
        let mut accepting = vec![false; n];
        accepting[crate::graph::BASEPOINT] = true;
        // The raw transition table also spells unreduced walks such as
        // x x^-1; restrict to reduced words.
        ReducedAutomaton {
            alphabet: graph.alphabet(),
            initial: crate::graph::BASEPOINT,
            accepting,
            next,
        }
        .intersection(&Self::universe(graph.alphabet()))
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.next.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    pub fn accepting_states(&self) -> Vec<usize> {
        (0..self.state_count()).filter(|&s| self.accepting[s]).collect()
    }

    pub fn transition(&self, s: usize, l: Letter) -> Option<usize> {
        self.next[s][l.dir()]
    }

    pub fn transitions_from(&self, s: usize) -> impl Iterator<Item = (Letter, usize)> + '_ {
        self.next[s]
            .iter()
            .enumerate()
            .filter_map(|(d, t)| t.map(|t| (Letter::from_dir(d), t)))
    }

    pub fn out_degree(&self, s: usize) -> usize {
        self.next[s].iter().filter(|t| t.is_some()).count()
    }

    pub fn accepts(&self, w: &Word) -> bool {
        let mut cur = self.initial;
        for l in w.letters() {
            match self.transition(cur, *l) {
                Some(t) => cur = t,
                None => return false,
            }
        }
        self.accepting[cur]
    }

    /// Accessible and co-accessible part, renumbered in BFS direction
    /// order for diff-stable output. An empty language canonicalizes to
    /// the one-state empty automaton.
    pub fn trimmed(&self) -> Self {
        let n = self.state_count();
        let dirs = self.alphabet.dirs();
        let mut reach = vec![false; n];
        reach[self.initial] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(v) = queue.pop_front() {
            for t in self.next[v].iter().flatten() {
                if !reach[*t] {
                    reach[*t] = true;
                    queue.push_back(*t);
                }
            }
        }
        // reverse reachability from accepting states
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            for t in self.next[v].iter().flatten() {
                rev[*t].push(v);
            }
        }
        let mut coacc = vec![false; n];
        let mut queue: VecDeque<usize> =
            (0..n).filter(|&v| self.accepting[v] && reach[v]).collect();
        for &v in &queue {
            coacc[v] = true;
        }
        while let Some(v) = queue.pop_front() {
            for &p in &rev[v] {
                if reach[p] && !coacc[p] {
                    coacc[p] = true;
                    queue.push_back(p);
                }
            }
        }
        if !coacc[self.initial] {
            return Self::empty(self.alphabet);
        }
        // BFS renumber over alive states
        let alive = |v: usize| reach[v] && coacc[v];
        let mut order = vec![usize::MAX; n];
        order[self.initial] = 0;
        let mut count = 1;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(v) = queue.pop_front() {
            for d in 0..dirs {
                if let Some(t) = self.next[v][d] {
                    if alive(t) && order[t] == usize::MAX {
                        order[t] = count;
                        count += 1;
                        queue.push_back(t);
                    }
                }
            }
        }
        let mut next = vec![vec![None; dirs]; count];
        let mut accepting = vec![false; count];
        for v in 0..n {
            if !alive(v) || order[v] == usize::MAX {
                continue;
            }
            accepting[order[v]] = self.accepting[v];
            for d in 0..dirs {
                if let Some(t) = self.next[v][d] {
                    if alive(t) && order[t] != usize::MAX {
                        next[order[v]][d] = Some(order[t]);
                    }
                }
            }
        }
        ReducedAutomaton {
            alphabet: self.alphabet,
            initial: 0,
            accepting,
            next,
        }
    }

    pub fn is_empty_language(&self) -> bool {
        !self.trimmed().accepting.iter().any(|&a| a)
    }

    /// Product construction completed within the reduced universe, so that
    /// arbitrary boolean acceptance conditions are available.
    fn boolean_product(
        a: &ReducedAutomaton,
        b: &ReducedAutomaton,
        accept: impl Fn(bool, bool) -> bool,
    ) -> ReducedAutomaton {
        debug_assert_eq!(a.alphabet, b.alphabet);
        let alphabet = a.alphabet;
        let u = ReducedAutomaton::universe(alphabet);
        let dirs = alphabet.dirs();
        type Key = (Option<usize>, Option<usize>, usize);
        let start: Key = (Some(a.initial), Some(b.initial), u.initial);
        let mut ids: HashMap<Key, usize> = HashMap::new();
        ids.insert(start, 0);
        let mut states = vec![start];
        let mut next: Vec<Vec<Option<usize>>> = vec![vec![None; dirs]];
        let mut accepting = Vec::new();
        let acc = |k: &Key, a: &ReducedAutomaton, b: &ReducedAutomaton| {
            accept(
                k.0.map(|s| a.accepting[s]).unwrap_or(false),
                k.1.map(|s| b.accepting[s]).unwrap_or(false),
            )
        };
        accepting.push(acc(&start, a, b));
        let mut i = 0;
        while i < states.len() {
            let (qa, qb, qu) = states[i];
            for d in 0..dirs {
                if let Some(tu) = u.next[qu][d] {
                    let ta = qa.and_then(|s| a.next[s][d]);
                    let tb = qb.and_then(|s| b.next[s][d]);
                    let key = (ta, tb, tu);
                    let id = *ids.entry(key).or_insert_with(|| {
                        states.push(key);
                        next.push(vec![None; dirs]);
                        accepting.push(acc(&key, a, b));
                        states.len() - 1
                    });
                    next[i][d] = Some(id);
                }
            }
            i += 1;
        }
        ReducedAutomaton {
            alphabet,
            initial: 0,
            accepting,
            next,
        }
        .trimmed()
    }

    pub fn union(&self, other: &ReducedAutomaton) -> ReducedAutomaton {
        Self::boolean_product(self, other, |x, y| x || y)
    }

    pub fn intersection(&self, other: &ReducedAutomaton) -> ReducedAutomaton {
        Self::boolean_product(self, other, |x, y| x && y)
    }

    pub fn difference(&self, other: &ReducedAutomaton) -> ReducedAutomaton {
        Self::boolean_product(self, other, |x, y| x && !y)
    }

    pub fn complement_in_f(&self) -> ReducedAutomaton {
        ReducedAutomaton::universe(self.alphabet).difference(self)
    }

    pub fn is_subset_of(&self, other: &ReducedAutomaton) -> bool {
        self.difference(other).is_empty_language()
    }

    pub fn language_eq(&self, other: &ReducedAutomaton) -> bool {
        self.is_subset_of(other) && other.is_subset_of(self)
    }

    /// Prefix closure: trimmed, then every surviving state accepting.
    pub fn prefix_closure(&self) -> ReducedAutomaton {
        let mut t = self.trimmed();
        if t.is_empty_language() {
            return t;
        }
        for a in t.accepting.iter_mut() {
            *a = true;
        }
        t
    }

    pub fn is_prefix_closed(&self) -> bool {
        self.language_eq(&self.prefix_closure())
    }

    /// Product with the universe automaton: language unchanged (for inputs
    /// already over reduced words) and every state annotated with the
    /// unique letter on its incoming arrows (`None` only at the initial
    /// state). This is the normal form counting, cones and consistency
    /// all work on.
    pub fn typed(&self) -> TypedAutomaton {
        let t = self.intersection(&ReducedAutomaton::universe(self.alphabet));
        TypedAutomaton::annotate(t)
    }

    /// `A ∘ B`: concatenations with no cancellation at the junction.
    pub fn concat_no_cancel(&self, other: &ReducedAutomaton) -> ReducedAutomaton {
        let a = self.typed();
        let b = other.trimmed();
        if a.aut.is_empty_language() || b.is_empty_language() {
            return ReducedAutomaton::empty(self.alphabet);
        }
        let dirs = self.alphabet.dirs();
        let na = a.aut.state_count();
        let nb = b.state_count();
        let b_eps = b.accepting[b.initial];
        let mut nfa = Nfa::new(self.alphabet, na + nb);
        for s in 0..na {
            for d in 0..dirs {
                if let Some(t) = a.aut.next[s][d] {
                    nfa.add(s, d, t);
                }
            }
            if a.aut.accepting[s] {
                // jump into b: any first letter of b compatible with the
                // last letter of the a-part
                let forbidden = a.types[s].map(|l| l.dir() ^ 1);
                for d in 0..dirs {
                    if Some(d) == forbidden {
                        continue;
                    }
                    if let Some(t) = b.next[b.initial][d] {
                        nfa.add(s, d, na + t);
                    }
                }
                if b_eps {
                    nfa.accepting.insert(s);
                }
            }
        }
        for s in 0..nb {
            for d in 0..dirs {
                if let Some(t) = b.next[s][d] {
                    nfa.add(na + s, d, na + t);
                }
            }
            if b.accepting[s] {
                nfa.accepting.insert(na + s);
            }
        }
        nfa.initial.insert(a.aut.initial);
        nfa.determinize().trimmed()
    }

    /// Reduced product `{reduce(ab) : a ∈ A, b ∈ B}`, via cancellation
    /// saturation of the concatenation NFA.
    pub fn reduced_product(&self, other: &ReducedAutomaton) -> ReducedAutomaton {
        let a = self.trimmed();
        let b = other.trimmed();
        if a.is_empty_language() || b.is_empty_language() {
            return ReducedAutomaton::empty(self.alphabet);
        }
        let dirs = self.alphabet.dirs();
        let na = a.state_count();
        let nb = b.state_count();
        let mut nfa = Nfa::new(self.alphabet, na + nb);
        for s in 0..na {
            for d in 0..dirs {
                if let Some(t) = a.next[s][d] {
                    nfa.add(s, d, t);
                }
            }
            if a.accepting[s] {
                nfa.eps.insert((s, na + b.initial));
            }
        }
        for s in 0..nb {
            for d in 0..dirs {
                if let Some(t) = b.next[s][d] {
                    nfa.add(na + s, d, na + t);
                }
            }
            if b.accepting[s] {
                nfa.accepting.insert(na + s);
            }
        }
        nfa.initial.insert(a.initial);
        nfa.saturate_cancellation();
        nfa.determinize()
            .intersection(&ReducedAutomaton::universe(self.alphabet))
    }

    /// Moore partition refinement on the partial DFA; input is trimmed
    /// first. Missing transitions are a distinguishing signature of their
    /// own, so states with different enabled directions never merge.
    pub fn minimized(&self) -> ReducedAutomaton {
        let t = self.trimmed();
        let n = t.state_count();
        if n <= 1 {
            return t;
        }
        let dirs = self.alphabet.dirs();
        let mut class: Vec<usize> = t.accepting.iter().map(|&a| a as usize).collect();
        loop {
            let mut sig_ids: BTreeMap<(usize, Vec<Option<usize>>), usize> = BTreeMap::new();
            let mut new_class = vec![0; n];
            for s in 0..n {
                let sig: Vec<Option<usize>> = (0..dirs)
                    .map(|d| t.next[s][d].map(|x| class[x]))
                    .collect();
                let key = (class[s], sig);
                let id = sig_ids.len();
                let entry = *sig_ids.entry(key).or_insert(id);
                new_class[s] = entry;
            }
            if new_class == class {
                break;
            }
            class = new_class;
        }
        let ncls = class.iter().max().unwrap() + 1;
        let mut next = vec![vec![None; dirs]; ncls];
        let mut accepting = vec![false; ncls];
        for s in 0..n {
            accepting[class[s]] = t.accepting[s];
            for d in 0..dirs {
                next[class[s]][d] = t.next[s][d].map(|x| class[x]);
            }
        }
        ReducedAutomaton {
            alphabet: self.alphabet,
            initial: class[t.initial],
            accepting,
            next,
        }
        .trimmed()
    }

    /// The relative Myhill-Nerode quotient of `R` within prefix-closed `L`:
    /// the minimal automaton whose states are the equivalence classes of
    /// words under residual-language equality with cancellation-free
    /// extension.
    pub fn mn_quotient(r: &ReducedAutomaton, l: &ReducedAutomaton) -> Result<ReducedAutomaton> {
        if !r.is_subset_of(l) {
            return Err(Error::NotContained);
        }
        // The last-letter product encodes "extension without cancellation";
        // trimming drops empty-residual words; minimizing merges equal
        // residuals. Words outside L have empty residuals because L is
        // prefix-closed, so no L-restriction is needed beyond containment.
        Ok(r.typed().aut.minimized())
    }

    /// Words of length at most `max_len`, in length-lexicographic order.
    pub fn enumerate_words(&self, max_len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut layer = vec![(self.initial, Word::empty())];
        if self.accepting[self.initial] {
            out.push(Word::empty());
        }
        for _ in 0..max_len {
            let mut nxt = Vec::new();
            for (s, w) in &layer {
                for (l, t) in self.transitions_from(*s) {
                    let mut w2 = w.clone();
                    w2.push_unchecked(l);
                    if self.accepting[t] {
                        out.push(w2.clone());
                    }
                    nxt.push((t, w2));
                }
            }
            layer = nxt;
            if layer.is_empty() {
                break;
            }
        }
        out
    }

    /// Count of accepted words of length exactly `k` by direct traversal;
    /// exponential in `k`, used as a cross-check only.
    pub fn count_words_of_len(&self, k: usize) -> u64 {
        let mut layer: HashMap<usize, u64> = HashMap::from([(self.initial, 1)]);
        for _ in 0..k {
            let mut nxt: HashMap<usize, u64> = HashMap::new();
            for (s, c) in layer {
                for (_, t) in self.transitions_from(s) {
                    *nxt.entry(t).or_insert(0) += c;
                }
            }
            layer = nxt;
        }
        layer
            .into_iter()
            .filter(|(s, _)| self.accepting[*s])
            .map(|(_, c)| c)
            .sum()
    }

    /// Cone witness for a prefix-closed set: shortest `u` (BFS
    /// direction-order tie-breaking) with `C(u) ⊆ L(A)`, if any.
    ///
    /// A witness state must be persistently complete: every state
    /// reachable from it is accepting and carries every direction its
    /// type allows.
    pub fn contains_cone(&self) -> Option<Word> {
        let typed = self.typed();
        let t = &typed.aut;
        let n = t.state_count();
        if t.is_empty_language() {
            return None;
        }
        let dirs = self.alphabet.dirs();
        let complete = |s: usize| -> bool {
            if !t.accepting[s] {
                return false;
            }
            let required = match typed.types[s] {
                None => dirs,
                Some(_) => dirs - 1,
            };
            t.out_degree(s) == required
        };
        // states that can reach a non-complete state
        let mut bad: Vec<bool> = (0..n).map(|s| !complete(s)).collect();
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for s in 0..n {
            for t2 in t.next[s].iter().flatten() {
                rev[*t2].push(s);
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&s| bad[s]).collect();
        while let Some(v) = queue.pop_front() {
            for &p in &rev[v] {
                if !bad[p] {
                    bad[p] = true;
                    queue.push_back(p);
                }
            }
        }
        // shortest word to a persistent state
        let mut seen = vec![false; n];
        seen[t.initial] = true;
        let mut queue = VecDeque::from([(t.initial, Word::empty())]);
        while let Some((s, w)) = queue.pop_front() {
            if !bad[s] {
                return Some(w);
            }
            for d in 0..dirs {
                if let Some(nx) = t.next[s][d] {
                    if !seen[nx] {
                        seen[nx] = true;
                        let mut w2 = w.clone();
                        w2.push_unchecked(Letter::from_dir(d));
                        queue.push_back((nx, w2));
                    }
                }
            }
        }
        None
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("automaton serialization")
    }

    pub fn from_json(alphabet: Alphabet, v: &serde_json::Value) -> Result<Self> {
        let err = |msg: &str| Error::Parse {
            pos: 0,
            msg: msg.to_string(),
        };
        let states = v["states"].as_u64().ok_or_else(|| err("missing states"))? as usize;
        let initial = v["initial"].as_u64().ok_or_else(|| err("missing initial"))? as usize;
        let mut accepting = vec![false; states];
        for a in v["accepting"].as_array().ok_or_else(|| err("missing accepting"))? {
            let s = a.as_u64().ok_or_else(|| err("bad accepting state"))? as usize;
            if s >= states {
                return Err(err("accepting state out of range"));
            }
            accepting[s] = true;
        }
        let mut next = vec![vec![None; alphabet.dirs()]; states];
        for tr in v["transitions"].as_array().ok_or_else(|| err("missing transitions"))? {
            let arr = tr.as_array().ok_or_else(|| err("bad transition"))?;
            if arr.len() != 3 {
                return Err(err("transition must be [src, letter, dst]"));
            }
            let src = arr[0].as_u64().ok_or_else(|| err("bad src"))? as usize;
            let dst = arr[2].as_u64().ok_or_else(|| err("bad dst"))? as usize;
            let lstr = arr[1].as_str().ok_or_else(|| err("bad letter"))?;
            let c = lstr.chars().next().ok_or_else(|| err("empty letter"))?;
            let l = Letter::from_char(c).ok_or_else(|| err("invalid letter"))?;
            if src >= states || dst >= states || !alphabet.contains(l) {
                return Err(err("transition out of range"));
            }
            next[src][l.dir()] = Some(dst);
        }
        let aut = ReducedAutomaton {
            alphabet,
            initial,
            accepting,
            next,
        };
        // external input may spell unreduced words; restrict
        Ok(aut.intersection(&ReducedAutomaton::universe(alphabet)))
    }
}

impl Serialize for ReducedAutomaton {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ReducedAutomaton", 4)?;
        st.serialize_field("states", &self.state_count())?;
        st.serialize_field("initial", &self.initial)?;
        st.serialize_field("accepting", &self.accepting_states())?;
        let mut transitions: Vec<(usize, String, usize)> = Vec::new();
        for v in 0..self.state_count() {
            for (l, t) in self.transitions_from(v) {
                transitions.push((v, l.to_char().to_string(), t));
            }
        }
        st.serialize_field("transitions", &transitions)?;
        st.end()
    }
}

/// An automaton together with the unique incoming letter of each state
/// (`None` exactly at the initial state). Produced by [`ReducedAutomaton::typed`].
#[derive(Debug, Clone)]
pub struct TypedAutomaton {
    pub aut: ReducedAutomaton,
    pub types: Vec<Option<Letter>>,
}

impl TypedAutomaton {
    fn annotate(aut: ReducedAutomaton) -> TypedAutomaton {
        let n = aut.state_count();
        let mut types: Vec<Option<Letter>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[aut.initial] = true;
        for s in 0..n {
            for (l, t) in aut.transitions_from(s) {
                debug_assert!(!seen[t] || types[t] == Some(l) || t == aut.initial);
                types[t] = Some(l);
                seen[t] = true;
            }
        }
        if aut.state_count() > 0 {
            types[aut.initial] = None;
        }
        TypedAutomaton { aut, types }
    }

    /// Out-degree used by the uniform no-return walk at state `s`.
    pub fn out_degree(&self, s: usize) -> usize {
        self.aut.out_degree(s)
    }
}

/// Nondeterministic helper used by concatenation constructions.
struct Nfa {
    alphabet: Alphabet,
    n: usize,
    trans: Vec<Vec<Vec<usize>>>,
    eps: BTreeSet<(usize, usize)>,
    initial: BTreeSet<usize>,
    accepting: BTreeSet<usize>,
}

impl Nfa {
    fn new(alphabet: Alphabet, n: usize) -> Nfa {
        Nfa {
            alphabet,
            n,
            trans: vec![vec![Vec::new(); alphabet.dirs()]; n],
            eps: BTreeSet::new(),
            initial: BTreeSet::new(),
            accepting: BTreeSet::new(),
        }
    }

    fn add(&mut self, s: usize, d: usize, t: usize) {
        if !self.trans[s][d].contains(&t) {
            self.trans[s][d].push(t);
        }
    }

    fn eps_closure(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut out = set.clone();
        let mut queue: VecDeque<usize> = set.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            for &(p, q) in self.eps.range((v, 0)..=(v, usize::MAX)) {
                debug_assert_eq!(p, v);
                if out.insert(q) {
                    queue.push_back(q);
                }
            }
        }
        out
    }

    /// Adds an ε-edge p -> q whenever p --x--> r =ε=> s --x^-1--> q, until
    /// a fixpoint. Afterwards the ε-NFA accepts all partial reductions of
    /// its original words, in particular the fully reduced ones.
    fn saturate_cancellation(&mut self) {
        let dirs = self.alphabet.dirs();
        loop {
            let mut added = false;
            // closure as a relation, recomputed each round; n is small
            let mut closure: Vec<BTreeSet<usize>> = Vec::with_capacity(self.n);
            for s in 0..self.n {
                closure.push(self.eps_closure(&BTreeSet::from([s])));
            }
            let mut new_edges = Vec::new();
            for p in 0..self.n {
                for d in 0..dirs {
                    for &r in &self.trans[p][d] {
                        for &s in &closure[r] {
                            for &q in &self.trans[s][d ^ 1] {
                                if p != q && !self.eps.contains(&(p, q)) {
                                    new_edges.push((p, q));
                                }
                            }
                        }
                    }
                }
            }
            for e in new_edges {
                if self.eps.insert(e) {
                    added = true;
                }
            }
            if !added {
                break;
            }
        }
    }

    fn determinize(&self) -> ReducedAutomaton {
        let dirs = self.alphabet.dirs();
        let start = self.eps_closure(&self.initial);
        let mut ids: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
        ids.insert(start.clone(), 0);
        let mut subsets = vec![start];
        let mut next: Vec<Vec<Option<usize>>> = vec![vec![None; dirs]];
        let mut accepting = Vec::new();
        accepting.push(subsets[0].iter().any(|s| self.accepting.contains(s)));
        let mut i = 0;
        while i < subsets.len() {
            for d in 0..dirs {
                let mut tgt = BTreeSet::new();
                for &s in &subsets[i] {
                    for &t in &self.trans[s][d] {
                        tgt.insert(t);
                    }
                }
                if tgt.is_empty() {
                    continue;
                }
                let tgt = self.eps_closure(&tgt);
                let id = match ids.get(&tgt) {
                    Some(&id) => id,
                    None => {
                        let id = subsets.len();
                        ids.insert(tgt.clone(), id);
                        accepting.push(tgt.iter().any(|s| self.accepting.contains(s)));
                        subsets.push(tgt);
                        next.push(vec![None; dirs]);
                        id
                    }
                };
                next[i][d] = Some(id);
            }
            i += 1;
        }
        ReducedAutomaton {
            alphabet: self.alphabet,
            initial: 0,
            accepting,
            next,
        }
    }
}
