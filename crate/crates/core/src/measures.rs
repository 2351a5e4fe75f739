//! Exact counting and measures for regular subsets: frequencies f_k,
//! the stopping-walk measure μ_s as a rational function of s, its values
//! μ_0 and μ_1 at the boundary, the frequency measure λ, and relative
//! size ratios.

use crate::automaton::ReducedAutomaton;
use crate::error::{Error, Result};
use crate::linalg::{self, RatMatrix};
use crate::poly::{Poly, RationalFn};
use crate::words::{sphere_size, Alphabet, Word};
use num::{BigInt, BigRational, One, Signed, Zero};

fn big(n: usize) -> BigRational {
    BigRational::from(BigInt::from(n))
}

/// Path-counting matrix of a trimmed automaton: `n_k = start · M^k · accept`.
pub struct TransferMatrix {
    pub alphabet: Alphabet,
    pub m: Vec<Vec<BigInt>>,
    pub start: Vec<BigInt>,
    pub accept: Vec<BigInt>,
}

impl TransferMatrix {
    pub fn of(a: &ReducedAutomaton) -> TransferMatrix {
        let t = a.trimmed();
        let n = t.state_count();
        let mut m = vec![vec![BigInt::zero(); n]; n];
        for s in 0..n {
            for (_, dst) in t.transitions_from(s) {
                m[s][dst] += 1;
            }
        }
        let mut start = vec![BigInt::zero(); n];
        start[t.initial()] = BigInt::one();
        let accept = (0..n)
            .map(|s| {
                if t.is_accepting(s) {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            })
            .collect();
        TransferMatrix {
            alphabet: a.alphabet(),
            m,
            start,
            accept,
        }
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    /// `n_0, n_1, ..., n_k`.
    pub fn counts_up_to(&self, k: usize) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(k + 1);
        let mut v = self.start.clone();
        for _ in 0..=k {
            out.push(v.iter().zip(&self.accept).map(|(a, b)| a * b).sum());
            v = (0..self.dim())
                .map(|j| (0..self.dim()).map(|i| &v[i] * &self.m[i][j]).sum())
                .collect();
        }
        out
    }

    pub fn count(&self, k: usize) -> BigInt {
        self.counts_up_to(k).pop().unwrap()
    }

    pub fn rational_matrix(&self) -> RatMatrix {
        self.m
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| BigRational::from(c.clone()))
                    .collect()
            })
            .collect()
    }

    /// `c, σ` with `n_k ≤ c σ^k` for every `k ≥ 0`, from a certified
    /// Collatz-Wielandt vector. σ is an upper bound for the spectral
    /// radius; both are exact rationals.
    pub fn count_envelope(&self, iterations: usize) -> (BigRational, BigRational) {
        let m = self.rational_matrix();
        let n = self.dim();
        let mut x = vec![BigRational::one(); n];
        for _ in 0..iterations {
            let mx = linalg::mat_vec(&m, &x);
            for (xi, mxi) in x.iter_mut().zip(mx) {
                *xi += mxi;
            }
        }
        let mx = linalg::mat_vec(&m, &x);
        let mut sigma = BigRational::zero();
        for (xi, mxi) in x.iter().zip(&mx) {
            let r = mxi / xi;
            if r > sigma {
                sigma = r;
            }
        }
        // n_k = start·M^k·accept ≤ β · start·M^k·x ≤ β σ^k (start·x)
        let beta = self
            .accept
            .iter()
            .zip(&x)
            .map(|(a, xi)| BigRational::from(a.clone()) / xi)
            .fold(BigRational::zero(), |acc, r| if r > acc { r } else { acc });
        let sx: BigRational = self
            .start
            .iter()
            .zip(&x)
            .map(|(s, xi)| BigRational::from(s.clone()) * xi)
            .sum();
        (beta * sx, sigma)
    }
}

/// Generating function `N(t) = Σ n_k t^k` as a reduced quotient of
/// polynomials with exact rational coefficients.
#[derive(Debug, Clone)]
pub struct RationalSeries {
    pub num: Poly,
    pub den: Poly,
}

impl RationalSeries {
    /// `den(t) = det(I - tM)` (the reversed characteristic polynomial)
    /// and `num = truncation of N·den`, exact by Cramer's rule.
    pub fn of(tm: &TransferMatrix) -> RationalSeries {
        let n = tm.dim();
        let chi = linalg::char_poly(&tm.rational_matrix());
        let den = Poly::from_coeffs((0..=n).map(|j| chi.coeff(n - j)).collect());
        let counts = tm.counts_up_to(2 * n + 1);
        let mut num_coeffs = vec![BigRational::zero(); n + 1];
        for (j, c) in num_coeffs.iter_mut().enumerate() {
            for i in 0..=j {
                *c += BigRational::from(counts[i].clone()) * den.coeff(j - i);
            }
        }
        // beyond degree n the convolution must vanish identically
        debug_assert!((n + 1..=2 * n + 1).all(|j| {
            let mut c = BigRational::zero();
            for i in j.saturating_sub(n)..=j {
                c += BigRational::from(counts[i].clone()) * den.coeff(j - i);
            }
            c.is_zero()
        }));
        RationalSeries {
            num: Poly::from_coeffs(num_coeffs),
            den,
        }
    }

    /// Coefficient extraction by the linear recurrence of `den`
    /// (constant term 1).
    pub fn coefficients(&self, up_to: usize) -> Vec<BigRational> {
        debug_assert!(self.den.coeff(0).is_one());
        let d = self.den.degree().unwrap_or(0);
        let mut out: Vec<BigRational> = Vec::with_capacity(up_to + 1);
        for k in 0..=up_to {
            let mut c = self.num.coeff(k);
            for j in 1..=d.min(k) {
                c -= self.den.coeff(j) * &out[k - j];
            }
            out.push(c);
        }
        out
    }

    pub fn eval(&self, t: &BigRational) -> Option<BigRational> {
        RationalFn::new(self.num.clone(), self.den.clone()).eval(t)
    }
}

pub fn growth_series(a: &ReducedAutomaton) -> RationalSeries {
    RationalSeries::of(&TransferMatrix::of(a))
}

/// `(n_k, f_k)`: the count of length-k words of `L(A)` and its share of
/// the sphere.
pub fn count_fk(a: &ReducedAutomaton, k: usize) -> (BigInt, BigRational) {
    let n_k = TransferMatrix::of(a).count(k);
    let f_k = BigRational::new(n_k.clone(), sphere_size(k, &a.alphabet()));
    (n_k, f_k)
}

pub fn fk_sequence(a: &ReducedAutomaton, up_to: usize) -> Vec<BigRational> {
    let counts = TransferMatrix::of(a).counts_up_to(up_to);
    counts
        .into_iter()
        .enumerate()
        .map(|(k, n)| BigRational::new(n, sphere_size(k, &a.alphabet())))
        .collect()
}

/// μ_s(L(A)) as an exact rational function of the stopping probability s:
/// `s·[ε ∈ R] + s(2m−1)/(2m) · (N(t) − n_0)` with `t = (1−s)/(2m−1)`.
pub fn mu_rational(a: &ReducedAutomaton) -> RationalFn {
    let m = a.alphabet().rank();
    let series = growth_series(a);
    let n0 = series
        .coefficients(0)
        .pop()
        .unwrap();
    let t_of_s = Poly::from_coeffs(vec![
        BigRational::one() / big(2 * m - 1),
        -BigRational::one() / big(2 * m - 1),
    ]);
    let composed = RationalFn::new(series.num.compose(&t_of_s), series.den.compose(&t_of_s));
    let s = RationalFn::from_poly(Poly::x());
    let tail = composed
        .add(&RationalFn::from_poly(Poly::constant(-n0.clone())))
        .mul(&s.scale(&(big(2 * m - 1) / big(2 * m))));
    s.scale(&n0).add(&tail)
}

/// Exact value of μ_s for `0 < s < 1`.
pub fn mu_s(a: &ReducedAutomaton, s: &BigRational) -> Result<BigRational> {
    if !(s.is_positive() && s < &BigRational::one()) {
        return Err(Error::InvalidParameter(format!(
            "s must lie in (0,1), got {s}"
        )));
    }
    mu_rational(a).eval(s).ok_or(Error::OutsideConvergence)
}

/// `(μ_0, μ_1)`: the value of μ at s = 0 (`None` when the reduced
/// rational function has a pole there) and, when μ_0 = 0, the linear
/// coefficient `(μ/s)(0)`.
pub fn mu0_mu1(a: &ReducedAutomaton) -> (Option<BigRational>, Option<BigRational>) {
    let mu = mu_rational(a);
    let zero = BigRational::zero();
    let mu0 = mu.eval(&zero);
    let mu1 = match &mu0 {
        Some(v) if v.is_zero() => mu.div_by_x().eval(&zero),
        _ => None,
    };
    (mu0, mu1)
}

/// `λ(R) = Σ_k f_k(R)`, `None` when the sum diverges. Convergence is
/// exact: for a trimmed transfer matrix the sum is finite iff `2m − 1`
/// is not an eigenvalue.
pub fn lambda_measure(a: &ReducedAutomaton) -> Option<BigRational> {
    let m = a.alphabet().rank();
    let tm = TransferMatrix::of(a);
    let chi = linalg::char_poly(&tm.rational_matrix());
    if chi.eval(&big(2 * m - 1)).is_zero() {
        return None;
    }
    let series = RationalSeries::of(&tm);
    let n0 = series.coefficients(0).pop().unwrap();
    let t0 = BigRational::one() / big(2 * m - 1);
    let n_at = series
        .eval(&t0)
        .expect("denominator nonzero when 2m-1 is not an eigenvalue");
    Some(&n0 + (n_at - &n0) * big(2 * m - 1) / big(2 * m))
}

/// Relative size ratio `f_k(R, L) = |R ∩ S_k| / |L ∩ S_k|`; `None` when
/// `L` has no words of length `k`.
pub fn fk_relative(r: &ReducedAutomaton, l: &ReducedAutomaton, k: usize) -> Option<BigRational> {
    let nr = TransferMatrix::of(r).count(k);
    let nl = TransferMatrix::of(l).count(k);
    if nl.is_zero() {
        None
    } else {
        Some(BigRational::new(nr, nl))
    }
}

/// Closed form `λ(w) = 1/(2m(2m−1)^{|w|−1})` for a single nonempty word.
pub fn lambda_word_closed_form(w: &Word, alphabet: &Alphabet) -> BigRational {
    if w.is_empty() {
        return BigRational::one();
    }
    BigRational::new(BigInt::one(), sphere_size(w.len(), alphabet))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::StallingsGraph;
    use crate::words::enumerate_sphere;

    fn alphabet() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn w(s: &str) -> Word {
        alphabet().parse_word(s, true).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn universe() -> ReducedAutomaton {
        ReducedAutomaton::universe(alphabet())
    }

    #[test]
    fn count_fk_examples() {
        for k in 0..=8 {
            let (_, f) = count_fk(&universe(), k);
            assert!(f.is_one());
        }
        let cone = ReducedAutomaton::cone(alphabet(), &w("a"));
        let (_, f5) = count_fk(&cone, 5);
        assert_eq!(f5, rat(1, 4));
        // subgroup counts against enumeration
        let g = StallingsGraph::build(alphabet(), &[w("abA")]).unwrap();
        let c = ReducedAutomaton::subgroup(&g);
        for k in 0..=10 {
            let (n, _) = count_fk(&c, k);
            let brute = enumerate_sphere(k, alphabet()).filter(|u| c.accepts(u)).count();
            assert_eq!(n, BigInt::from(brute), "k = {k}");
        }
    }

    #[test]
    fn series_coefficients_match_transfer_counts() {
        let g = StallingsGraph::build(alphabet(), &[w("aa"), w("b")]).unwrap();
        for a in [
            universe(),
            ReducedAutomaton::cone(alphabet(), &w("ab")),
            ReducedAutomaton::subgroup(&g),
            ReducedAutomaton::finite(alphabet(), &[w("a"), w("bAb")]),
        ] {
            let tm = TransferMatrix::of(&a);
            let series = RationalSeries::of(&tm);
            let direct = tm.counts_up_to(20);
            let by_series = series.coefficients(20);
            for k in 0..=20 {
                assert_eq!(by_series[k], BigRational::from(direct[k].clone()), "k = {k}");
            }
        }
    }

    #[test]
    fn mu_of_f_is_one() {
        for s in [rat(1, 10), rat(1, 3), rat(1, 2), rat(9, 10)] {
            assert!(mu_s(&universe(), &s).unwrap().is_one(), "s = {s}");
        }
    }

    #[test]
    fn mu_of_singletons() {
        let eps = ReducedAutomaton::finite(alphabet(), &[Word::empty()]);
        for s in [rat(1, 10), rat(1, 2)] {
            assert_eq!(mu_s(&eps, &s).unwrap(), s);
        }
        // μ_s({w}) = s(1-s)^{|w|}/(2m(2m-1)^{|w|-1})
        for word in ["a", "ab", "aBa", "bbbb"] {
            let word = w(word);
            let single = ReducedAutomaton::finite(alphabet(), std::slice::from_ref(&word));
            for s in [rat(1, 3), rat(1, 2)] {
                let expected = &s
                    * (BigRational::one() - &s).pow(word.len() as i32)
                    / BigRational::from(sphere_size(word.len(), &alphabet()));
                assert_eq!(mu_s(&single, &s).unwrap(), expected, "w = {word}");
            }
        }
    }

    #[test]
    fn mu_of_cone_matches_direct_summation() {
        // μ_s(C(a)) = Σ_{k≥1} 3^{k−1} s(1−s)^k / (4·3^{k−1}) = s(1−s)/(4s) ... = (1−s)/4
        let cone = ReducedAutomaton::cone(alphabet(), &w("a"));
        let s = rat(1, 2);
        assert_eq!(mu_s(&cone, &s).unwrap(), rat(1, 8));
        // partial-sum oracle: Σ_{k=1..K} f_k-weighted terms approaches the value
        let mut partial = BigRational::zero();
        let one = BigRational::one();
        for k in 1..=60 {
            let n_k = TransferMatrix::of(&cone).count(k);
            partial += &s * (&one - &s).pow(k as i32) * BigRational::from(n_k)
                / BigRational::from(sphere_size(k, &alphabet()));
        }
        let exact = mu_s(&cone, &s).unwrap();
        assert!((&exact - &partial).abs() < rat(1, 1_000_000_000));
    }

    #[test]
    fn mu_s_rejects_bad_parameter() {
        assert!(mu_s(&universe(), &rat(0, 1)).is_err());
        assert!(mu_s(&universe(), &rat(3, 2)).is_err());
    }

    #[test]
    fn mu0_mu1_examples() {
        // F: μ0 = 1
        assert_eq!(mu0_mu1(&universe()).0, Some(BigRational::one()));
        // C(a): μ0 = 1/4, matches Cesàro averages of the constant f_k = 1/4
        let cone = ReducedAutomaton::cone(alphabet(), &w("a"));
        let (mu0, _) = mu0_mu1(&cone);
        assert_eq!(mu0, Some(rat(1, 4)));
        let fks = fk_sequence(&cone, 40);
        let avg: BigRational =
            fks[1..].iter().sum::<BigRational>() / BigRational::from(BigInt::from(40));
        assert!((avg - rat(1, 4)).abs() < rat(1, 10));
        // single word: μ0 = 0, μ1 = λ(w)
        for word in ["a", "ab", "Bab"] {
            let word = w(word);
            let single = ReducedAutomaton::finite(alphabet(), std::slice::from_ref(&word));
            let (mu0, mu1) = mu0_mu1(&single);
            assert_eq!(mu0, Some(BigRational::zero()));
            assert_eq!(mu1, Some(lambda_word_closed_form(&word, &alphabet())));
        }
    }

    #[test]
    fn lambda_examples() {
        // single words: closed form
        for word in ["a", "ab", "aBa"] {
            let word = w(word);
            let single = ReducedAutomaton::finite(alphabet(), std::slice::from_ref(&word));
            assert_eq!(
                lambda_measure(&single),
                Some(lambda_word_closed_form(&word, &alphabet()))
            );
        }
        // cone: divergent
        assert_eq!(lambda_measure(&ReducedAutomaton::cone(alphabet(), &w("a"))), None);
        assert_eq!(lambda_measure(&universe()), None);
        // subgroup: finite, matches partial sums within the certified tail
        let g = StallingsGraph::build(alphabet(), &[w("abA")]).unwrap();
        let c = ReducedAutomaton::subgroup(&g);
        let lambda = lambda_measure(&c).expect("subgroup of infinite index");
        let k_max = 40;
        let partial: BigRational = fk_sequence(&c, k_max).into_iter().sum();
        assert!(partial <= lambda);
        // tail bound: Σ_{k>K} f_k ≤ (c_env/2m) Σ_{k>K} (σ/(2m−1))^k (2m−1)
        // f_k ≤ c(2m−1)/(2m) (σ/(2m−1))^k, so the tail past k_max is a
        // geometric sum
        let (c_env, sigma) = TransferMatrix::of(&c).count_envelope(40);
        let ratio = sigma / big(3);
        assert!(ratio < BigRational::one());
        let tail = c_env * big(3) / big(4) * ratio.pow((k_max + 1) as i32)
            / (BigRational::one() - ratio);
        assert!(lambda <= partial + tail);
    }

    #[test]
    fn fk_relative_examples() {
        let g = StallingsGraph::build(alphabet(), &[w("abA")]).unwrap();
        let c = ReducedAutomaton::subgroup(&g);
        for k in 0..=8 {
            // R = L
            assert_eq!(fk_relative(&c, &c, k).is_some(), !TransferMatrix::of(&c).count(k).is_zero());
            if let Some(v) = fk_relative(&c, &c, k) {
                assert!(v.is_one());
            }
            // relative to F = absolute
            let (_, fk) = count_fk(&c, k);
            assert_eq!(fk_relative(&c, &universe(), k), Some(fk));
        }
        // undefined when L misses the length
        let finite_l = ReducedAutomaton::finite(alphabet(), &[w("a")]);
        assert_eq!(fk_relative(&finite_l, &finite_l, 5), None);
    }

    #[test]
    fn count_envelope_is_sound() {
        let g = StallingsGraph::build(alphabet(), &[w("aa"), w("b"), w("abA")]).unwrap();
        for a in [
            ReducedAutomaton::subgroup(&g),
            ReducedAutomaton::cone(alphabet(), &w("ab")),
            universe(),
        ] {
            let tm = TransferMatrix::of(&a);
            let (c, sigma) = tm.count_envelope(30);
            let counts = tm.counts_up_to(14);
            let mut power = BigRational::one();
            for (k, n) in counts.iter().enumerate() {
                assert!(
                    BigRational::from(n.clone()) <= &c * &power,
                    "k = {k}: envelope violated"
                );
                power *= &sigma;
            }
        }
    }
}
