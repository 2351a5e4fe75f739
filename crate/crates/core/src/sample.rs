//! No-return random walks on the free group: the stopping walk W_s,
//! which halts with probability s at each vertex and never backtracks,
//! and the non-stop walk W_0 truncated at a length cap.

use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter, Word};
use num::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seedable walker; one instance yields an independent reproducible
/// stream of words.
pub struct Walker {
    alphabet: Alphabet,
    rng: ChaCha8Rng,
}

impl Walker {
    pub fn new(alphabet: Alphabet, seed: u64) -> Walker {
        Walker {
            alphabet,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Walker on an independent RNG stream, for sharded sampling.
    pub fn stream(alphabet: Alphabet, seed: u64, stream: u64) -> Walker {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Walker { alphabet, rng }
    }

    fn step(&mut self, last: Option<Letter>) -> Letter {
        let m = self.alphabet.rank();
        match last {
            None => Letter::from_dir(self.rng.gen_range(0..2 * m)),
            Some(prev) => {
                // uniform over the 2m−1 directions that do not cancel
                let banned = prev.inverse().dir();
                let pick = self.rng.gen_range(0..2 * m - 1);
                Letter::from_dir(if pick >= banned { pick + 1 } else { pick })
            }
        }
    }

    /// One W_s sample: stop with probability s before each step; steps
    /// never backtrack, so the output is already reduced.
    pub fn sample_ws(&mut self, s: &BigRational) -> Result<Word> {
        use num::ToPrimitive;
        let zero = BigRational::from_integer(0.into());
        let one = BigRational::from_integer(1.into());
        if *s <= zero || *s > one {
            return Err(Error::InvalidParameter(
                "stopping probability must lie in (0, 1]".into(),
            ));
        }
        let stop = s.to_f64().unwrap();
        let mut word = Word::empty();
        loop {
            if self.rng.gen_bool(stop) {
                return Ok(word);
            }
            let next = self.step(word.last());
            word.push_unchecked(next);
        }
    }

    /// One W_0 sample truncated at `max_len`.
    pub fn sample_w0(&mut self, max_len: usize) -> Word {
        let mut word = Word::empty();
        for _ in 0..max_len {
            let next = self.step(word.last());
            word.push_unchecked(next);
        }
        word
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::mu_s;
    use crate::words::sphere_size;
    use crate::ReducedAutomaton;
    use num::{BigInt, ToPrimitive};
    use std::collections::HashMap;

    fn alphabet() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn ws_outputs_are_reduced() {
        let mut walker = Walker::new(alphabet(), 1);
        let s = rat(1, 5);
        for _ in 0..500 {
            let w = walker.sample_ws(&s).unwrap();
            let reparsed = alphabet().parse_word(&w.to_string(), true).unwrap();
            assert_eq!(w, reparsed);
        }
    }

    #[test]
    fn ws_word_distribution_matches_mu() {
        // empirical point masses vs μ_s(w) = s(1−s)^k / (2m(2m−1)^(k−1))
        let mut walker = Walker::new(alphabet(), 42);
        let s = rat(1, 2);
        let n = 100_000u64;
        let mut counts: HashMap<String, u64> = HashMap::new();
        for _ in 0..n {
            let w = walker.sample_ws(&s).unwrap();
            *counts.entry(w.to_string()).or_default() += 1;
        }
        let targets = ["1", "a", "b", "A", "B", "ab", "aa", "Ba", "aba", "bAb"];
        for t in targets {
            let w = alphabet().parse_word(t, true).unwrap();
            let singleton = ReducedAutomaton::finite(alphabet(), &[w.clone()]);
            let p = mu_s(&singleton, &s).unwrap().to_f64().unwrap();
            let observed = *counts.get(t).unwrap_or(&0) as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!(
                (observed - p).abs() < 4.0 * se,
                "w = {t}: observed {observed}, expected {p}"
            );
        }
    }

    #[test]
    fn ws_length_marginal_is_geometric() {
        let mut walker = Walker::new(alphabet(), 7);
        let s = rat(1, 3);
        let n = 100_000u64;
        let mut lengths: HashMap<usize, u64> = HashMap::new();
        let mut total_len = 0u64;
        for _ in 0..n {
            let w = walker.sample_ws(&s).unwrap();
            *lengths.entry(w.len()).or_default() += 1;
            total_len += w.len() as u64;
        }
        for k in 0..6usize {
            let p = (1.0 / 3.0) * (2.0f64 / 3.0).powi(k as i32);
            let observed = *lengths.get(&k).unwrap_or(&0) as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((observed - p).abs() < 4.0 * se, "k = {k}");
        }
        // mean length 1/s − 1 = 2
        let mean = total_len as f64 / n as f64;
        assert!((mean - 2.0).abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn w0_is_uniform_on_spheres() {
        // conditioned on any length, W_0 prefixes are uniform
        let mut walker = Walker::new(alphabet(), 3);
        let n = 60_000u64;
        let k = 2usize;
        let mut counts: HashMap<String, u64> = HashMap::new();
        for _ in 0..n {
            let w = walker.sample_w0(k);
            assert_eq!(w.len(), k);
            *counts.entry(w.to_string()).or_default() += 1;
        }
        let sphere = sphere_size(k, &alphabet()).to_u64().unwrap();
        assert_eq!(counts.len() as u64, sphere);
        let p = 1.0 / sphere as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        for (w, c) in counts {
            let observed = c as f64 / n as f64;
            assert!((observed - p).abs() < 4.0 * se, "w = {w}");
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let sample = |seed, stream| {
            let mut w = Walker::stream(alphabet(), seed, stream);
            (0..20).map(|_| w.sample_w0(6).to_string()).collect::<Vec<_>>()
        };
        assert_eq!(sample(9, 0), sample(9, 0));
        assert_ne!(sample(9, 0), sample(9, 1));
        assert_ne!(sample(9, 0), sample(10, 0));
    }

    #[test]
    fn ws_rejects_bad_parameter() {
        let mut walker = Walker::new(alphabet(), 1);
        assert!(walker.sample_ws(&rat(0, 1)).is_err());
        assert!(walker.sample_ws(&rat(3, 2)).is_err());
        assert!(walker.sample_ws(&rat(1, 1)).is_ok());
    }
}
