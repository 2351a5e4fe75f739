//! The absorbing Markov chain attached to a consistent automaton part:
//! the uniform 1/ν walk over prototype out-degrees, with a dead state
//! collecting the missing arrows. Absorption into the accepting state
//! computes λ_L exactly; the transient block certifies geometric decay.

use crate::automaton::{ReducedAutomaton, TypedAutomaton};
use crate::consistent::{ConsistentPart, StarPart};
use crate::error::{Error, Result};
use crate::linalg::{self, RatMatrix};
use crate::words::Word;
use num::{BigInt, BigRational, One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Per transient state: the ν uniform options, of which the first
/// `arrows.len()` follow automaton arrows (`None` meaning the absorbing
/// target) and the remaining `ν − arrows.len()` fall into the dead state.
#[derive(Debug, Clone)]
pub struct AbsorbingChain {
    arrows: Vec<Vec<Option<usize>>>,
    nu: Vec<usize>,
    initial: usize,
}

/// Outcome counts of Monte-Carlo walks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkTally {
    pub target: u64,
    pub dead: u64,
    pub unresolved: u64,
}

impl AbsorbingChain {
    /// Chain of a `B3` split part: transient states are all states but
    /// `z2`, the target is `z2`.
    pub fn from_star_part(sp: &StarPart, ambient: &TypedAutomaton) -> AbsorbingChain {
        Self::build(&sp.aut, &sp.prototype, sp.z2, ambient)
    }

    /// Chain of a `B1`-style part: transient states are all states but
    /// `z` (which has no outgoing arrows there).
    pub fn from_part(part: &ConsistentPart, ambient: &TypedAutomaton) -> AbsorbingChain {
        debug_assert_eq!(part.aut.out_degree(part.z), 0);
        Self::build(&part.aut, &part.prototype, part.z, ambient)
    }

    fn build(
        aut: &ReducedAutomaton,
        prototype: &[usize],
        target: usize,
        ambient: &TypedAutomaton,
    ) -> AbsorbingChain {
        let n = aut.state_count();
        // renumber transient states, skipping the target
        let mut index = vec![usize::MAX; n];
        let mut count = 0;
        for s in 0..n {
            if s != target {
                index[s] = count;
                count += 1;
            }
        }
        let mut arrows = vec![Vec::new(); count];
        let mut nu = vec![0usize; count];
        for s in 0..n {
            if s == target {
                continue;
            }
            let v = ambient.aut.out_degree(prototype[s]);
            let outgoing: Vec<Option<usize>> = aut
                .transitions_from(s)
                .map(|(_, t)| if t == target { None } else { Some(index[t]) })
                .collect();
            debug_assert!(outgoing.len() <= v, "arrows exceed prototype out-degree");
            arrows[index[s]] = outgoing;
            nu[index[s]] = v;
        }
        AbsorbingChain {
            arrows,
            nu,
            initial: index[aut.initial()],
        }
    }

    pub fn transient_count(&self) -> usize {
        self.arrows.len()
    }

    /// Transient-to-transient block; rows sum to at most 1.
    pub fn q_matrix(&self) -> RatMatrix {
        let n = self.transient_count();
        let mut q = vec![vec![BigRational::zero(); n]; n];
        for (s, row) in self.arrows.iter().enumerate() {
            if self.nu[s] == 0 {
                continue;
            }
            let p = BigRational::new(BigInt::one(), BigInt::from(self.nu[s]));
            for t in row.iter().flatten() {
                q[s][*t] += &p;
            }
        }
        q
    }

    /// One-step absorption probabilities `(into target, into dead)` per
    /// transient state; `Q`-row + both = 1 exactly, ν = 0 states fall
    /// entirely into the dead state.
    pub fn absorption_rows(&self) -> (Vec<BigRational>, Vec<BigRational>) {
        let n = self.transient_count();
        let mut to_target = vec![BigRational::zero(); n];
        let mut to_dead = vec![BigRational::zero(); n];
        for s in 0..n {
            if self.nu[s] == 0 {
                to_dead[s] = BigRational::one();
                continue;
            }
            let p = BigRational::new(BigInt::one(), BigInt::from(self.nu[s]));
            for t in &self.arrows[s] {
                if t.is_none() {
                    to_target[s] += &p;
                }
            }
            let missing = self.nu[s] - self.arrows[s].len();
            to_dead[s] = &p * BigRational::from(BigInt::from(missing));
        }
        (to_target, to_dead)
    }

    fn absorb(&self, rhs: &[BigRational]) -> BigRational {
        let n = self.transient_count();
        let q = self.q_matrix();
        let mut a = linalg::identity(n);
        for i in 0..n {
            for j in 0..n {
                a[i][j] -= &q[i][j];
            }
        }
        let x = linalg::solve(&a, rhs).expect("I - Q of an absorbing chain is invertible");
        x[self.initial].clone()
    }

    /// `P(Z2)`: total probability of absorption into the target, exact.
    pub fn target_probability(&self) -> BigRational {
        let (t, _) = self.absorption_rows();
        self.absorb(&t)
    }

    /// `P(D)`, exact.
    pub fn dead_probability(&self) -> BigRational {
        let (_, d) = self.absorption_rows();
        self.absorb(&d)
    }

    /// Mass absorbed into the target at exactly step `k`, for
    /// `k = 1..=up_to`: the step distribution `f'_k`.
    pub fn step_masses(&self, up_to: usize) -> Vec<BigRational> {
        let n = self.transient_count();
        let q = self.q_matrix();
        let (r, _) = self.absorption_rows();
        let mut u = vec![BigRational::zero(); n];
        u[self.initial] = BigRational::one();
        let mut out = Vec::with_capacity(up_to);
        for _ in 1..=up_to {
            out.push(u.iter().zip(&r).map(|(a, b)| a * b).sum());
            // u <- u Q
            u = (0..n)
                .map(|j| (0..n).map(|i| &u[i] * &q[i][j]).sum())
                .collect();
        }
        out
    }

    /// Probability of still being transient after `k` steps.
    pub fn survival(&self, k: usize) -> BigRational {
        let n = self.transient_count();
        let q = self.q_matrix();
        let mut u = vec![BigRational::zero(); n];
        u[self.initial] = BigRational::one();
        for _ in 0..k {
            u = (0..n)
                .map(|j| (0..n).map(|i| &u[i] * &q[i][j]).sum())
                .collect();
        }
        u.into_iter().sum()
    }

    /// Certified `q < 1` with `f'_k ≤ q^k` for every `k ≥ 1`, together
    /// with the power `K` used for the norm bound. Soundness:
    /// `f'_k ≤ survival(k−1) ≤ β^⌊(k−1)/K⌋` with `β = ‖Q^K‖_∞ < 1` and
    /// `‖Q‖_∞ ≤ 1`; the returned q satisfies `q^(2K) ≥ β`, which covers
    /// all `k ≥ 2K`, and the remaining small k are checked exactly.
    pub fn geometric_envelope(&self) -> Option<(BigRational, usize)> {
        if self.transient_count() == 0 {
            return Some((BigRational::zero(), 1));
        }
        let (beta, k) = norm_power(&self.q_matrix())?;
        let masses = self.step_masses(2 * k + 2);
        certified_q(&beta, k, &masses).map(|q| (q, k))
    }

    /// Simulates `walks` uniform 1/ν walks from the initial state with a
    /// fixed seed; `max_steps` caps each walk.
    pub fn sample(&self, walks: u64, max_steps: usize, seed: u64) -> WalkTally {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tally = WalkTally {
            target: 0,
            dead: 0,
            unresolved: 0,
        };
        for _ in 0..walks {
            let mut s = self.initial;
            let mut resolved = false;
            for _ in 0..max_steps {
                if self.nu[s] == 0 {
                    tally.dead += 1;
                    resolved = true;
                    break;
                }
                let pick = rng.gen_range(0..self.nu[s]);
                if pick >= self.arrows[s].len() {
                    tally.dead += 1;
                    resolved = true;
                    break;
                }
                match self.arrows[s][pick] {
                    None => {
                        tally.target += 1;
                        resolved = true;
                        break;
                    }
                    Some(t) => s = t,
                }
            }
            if !resolved {
                tally.unresolved += 1;
            }
        }
        tally
    }
}

fn row_norm(m: &RatMatrix) -> BigRational {
    m.iter()
        .map(|row| row.iter().sum::<BigRational>())
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a })
}

/// Repeatedly squares `w` (row sums ≤ 1) until `β = ‖w^K‖_∞ < 1`.
fn norm_power(w: &RatMatrix) -> Option<(BigRational, usize)> {
    let one = BigRational::one();
    let mut power = w.clone();
    let mut k = 1usize;
    let mut beta = row_norm(&power);
    while beta >= one {
        if k > 4096 {
            return None; // the block is not substochastic-transient
        }
        power = linalg::mat_mul(&power, &power);
        k *= 2;
        beta = row_norm(&power);
    }
    Some((beta, k))
}

/// Smallest convenient `q < 1` with `masses[j-1] ≤ q^j` for all listed j
/// and `q^(2K) ≥ β`; the latter covers every k ≥ 2K via
/// `f_k ≤ β^⌊(k−1)/K⌋`, provided `masses` reaches index 2K+2.
fn certified_q(beta: &BigRational, k: usize, masses: &[BigRational]) -> Option<BigRational> {
    use num::ToPrimitive;
    let one = BigRational::one();
    debug_assert!(masses.len() >= 2 * k + 2);
    if masses.iter().any(|f| f >= &one) {
        return None;
    }
    // near-optimal float guess: q must dominate β^(1/2K) and every
    // f_j^(1/j); verified exactly below, only the bound is certified
    let mut guess = if beta.is_zero() {
        0.0
    } else {
        beta.to_f64().unwrap_or(1.0).powf(1.0 / (2.0 * k as f64))
    };
    for (i, fj) in masses.iter().enumerate() {
        let f = fj.to_f64().unwrap_or(1.0);
        if f > 0.0 {
            guess = guess.max(f.powf(1.0 / (i + 1) as f64));
        }
    }
    let mut bound = if guess == 0.0 {
        BigRational::zero()
    } else {
        BigRational::from_float((guess * (1.0 + 1e-9)).min(1.0)).unwrap()
    };
    let feasible = |q: &BigRational| {
        q.pow(2 * k as i32) >= *beta
            && masses
                .iter()
                .enumerate()
                .all(|(i, fj)| fj <= &q.pow((i + 1) as i32))
    };
    while !feasible(&bound) {
        if bound >= one {
            return None;
        }
        // raise toward 1; terminates because all masses and β are < 1
        bound = (&bound + &one) / BigRational::from(BigInt::from(2));
    }
    if bound >= one {
        return None;
    }
    Some(bound)
}

/// Step-weighted product of a sublanguage `T` with its ambient `L`: the
/// entry for an arrow is 1/out-degree of its source in `L`, so
/// `u W^k a = f'_k(T, L)`, the relative λ_L-mass at length k.
#[derive(Debug, Clone)]
pub struct RelativeWeights {
    w: RatMatrix,
    initial: usize,
    accepting: Vec<bool>,
}

impl RelativeWeights {
    pub fn new(t: &ReducedAutomaton, l: &ReducedAutomaton) -> Result<RelativeWeights> {
        if !t.is_subset_of(l) {
            return Err(Error::NotContained);
        }
        let t = t.trimmed();
        let l = l.trimmed();
        // reachable product states
        let mut index = std::collections::HashMap::new();
        let start = (t.initial(), l.initial());
        index.insert(start, 0usize);
        let mut order = vec![start];
        let mut head = 0;
        while head < order.len() {
            let (ts, ls) = order[head];
            head += 1;
            for (letter, tt) in t.transitions_from(ts) {
                if let Some(lt) = l.transition(ls, letter) {
                    let next = (tt, lt);
                    if !index.contains_key(&next) {
                        index.insert(next, order.len());
                        order.push(next);
                    }
                }
            }
        }
        let n = order.len();
        let mut w = vec![vec![BigRational::zero(); n]; n];
        let mut accepting = vec![false; n];
        for (i, &(ts, ls)) in order.iter().enumerate() {
            accepting[i] = t.is_accepting(ts) && l.is_accepting(ls);
            let nu = l.out_degree(ls);
            for (letter, tt) in t.transitions_from(ts) {
                if let Some(lt) = l.transition(ls, letter) {
                    w[i][index[&(tt, lt)]] +=
                        BigRational::new(BigInt::one(), BigInt::from(nu));
                }
            }
        }
        Ok(RelativeWeights {
            w,
            initial: 0,
            accepting,
        })
    }

    /// `f'_k(T, L)` for `k = 1..=up_to`.
    pub fn masses(&self, up_to: usize) -> Vec<BigRational> {
        let n = self.w.len();
        let mut u = vec![BigRational::zero(); n];
        u[self.initial] = BigRational::one();
        let mut out = Vec::with_capacity(up_to);
        for _ in 1..=up_to {
            u = (0..n)
                .map(|j| (0..n).map(|i| &u[i] * &self.w[i][j]).sum())
                .collect();
            out.push(
                u.iter()
                    .zip(&self.accepting)
                    .filter(|(_, acc)| **acc)
                    .map(|(v, _)| v.clone())
                    .sum(),
            );
        }
        out
    }

    /// Certified `q < 1` with `f'_k(T, L) ≤ q^k` for every `k ≥ 1`;
    /// `None` when no such q exists (some level carries full mass).
    pub fn geometric_envelope(&self) -> Option<(BigRational, usize)> {
        if self.w.is_empty() {
            return Some((BigRational::zero(), 1));
        }
        let (beta, k) = norm_power(&self.w)?;
        let masses = self.masses(2 * k + 2);
        certified_q(&beta, k, &masses).map(|q| (q, k))
    }
}

/// `λ_L(w)`: product of 1/out-degree along the path of `w` in the
/// trimmed prefix-closed automaton of `L`.
pub fn lambda_l_word(w: &Word, l: &ReducedAutomaton) -> Result<BigRational> {
    let a = l.trimmed();
    let mut cur = a.initial();
    let mut value = BigRational::one();
    for letter in w.letters() {
        let nu = a.out_degree(cur);
        match a.transition(cur, *letter) {
            Some(t) => {
                value *= BigRational::new(BigInt::one(), BigInt::from(nu));
                cur = t;
            }
            None => return Err(Error::NotInLanguage),
        }
    }
    if !a.is_accepting(cur) {
        return Err(Error::NotInLanguage);
    }
    Ok(value)
}
