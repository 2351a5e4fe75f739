//! Classification of regular sets: thick (the prefix closure contains a
//! cone) versus exponentially negligible, with certified rational rate
//! bounds; the relative version over an ambient prefix-closed language
//! via consistent parts and absorbing chains; the star-closure
//! certificate with exact partition counts.

use crate::automaton::ReducedAutomaton;
use crate::chain::{AbsorbingChain, RelativeWeights};
use crate::consistent::{make_consistent, relative_contains_cone, split_b1_b2_b3};
use crate::error::{Error, Result};
use crate::measures::{fk_sequence, lambda_measure, TransferMatrix};
use crate::words::Word;
use num::{BigInt, BigRational, One, ToPrimitive, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Thick,
    ExponentiallyNegligible,
}

/// Density taxonomy; the last two branches cannot occur for regular
/// sets and constructing a report with them is a logic error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Taxonomy {
    Thick,
    Sparse,
    ExpNegligible,
    IntermediateDensity,
    Singular,
}

#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    /// Base of a cone inside the prefix closure, for thick sets.
    pub witness: Option<Word>,
    /// Certified δ < 1 with f_k ≤ δ^k for large k, for negligible sets.
    pub rate_bound: Option<BigRational>,
    pub taxonomy: Taxonomy,
    /// Smallest k₀ ≤ 14 with f_k ≤ δ^k checked exactly on [k₀, 14].
    pub verified_from: Option<usize>,
}

/// Every regular set is thick or exponentially negligible; the rate
/// bound is σ_upper/(2m−1) from a Collatz-Wielandt enclosure of the
/// trimmed prefix-closure transfer matrix.
pub fn classify(a: &ReducedAutomaton) -> ClassificationReport {
    let alphabet = a.alphabet();
    let closure = a.prefix_closure().trimmed();
    if closure.is_empty_language() {
        return ClassificationReport {
            verdict: Verdict::ExponentiallyNegligible,
            witness: None,
            rate_bound: Some(BigRational::zero()),
            taxonomy: Taxonomy::Sparse,
            verified_from: Some(1),
        };
    }
    if let Some(w) = closure.contains_cone() {
        return ClassificationReport {
            verdict: Verdict::Thick,
            witness: Some(w),
            rate_bound: None,
            taxonomy: Taxonomy::Thick,
            verified_from: None,
        };
    }
    let degree = BigRational::from(BigInt::from(2 * alphabet.rank() as i64 - 1));
    let tm = TransferMatrix::of(&closure);
    let mut sigma_upper = None;
    let mut iterations = 4usize;
    while iterations <= 1 << 12 {
        let (_, sigma) = tm.count_envelope(iterations);
        if sigma < degree {
            sigma_upper = Some(sigma);
            break;
        }
        iterations *= 2;
    }
    let sigma_upper = sigma_upper
        .expect("a coneless prefix closure grows strictly slower than the free group");
    // safety factor: counts obey n_k ≤ c·σ^k with c possibly above 1,
    // so a bare σ/(2m−1) can undershoot at small k; the reported δ also
    // dominates the observed f_k^(1/k) on the verification window
    let mut delta = sigma_upper / &degree * BigRational::new(21.into(), 20.into());
    let fks = fk_sequence(a, 14);
    for k in 5..=14usize {
        if fks[k] > delta.pow(k as i32) {
            let root = fks[k].to_f64().unwrap().powf(1.0 / k as f64);
            let candidate =
                BigRational::from_float((root * (1.0 + 1e-9)).min(1.0)).unwrap();
            if candidate > delta {
                delta = candidate;
            }
            while fks[k] > delta.pow(k as i32) {
                delta = (&delta + BigRational::one()) / BigRational::from(BigInt::from(2));
            }
        }
    }
    assert!(
        delta < BigRational::one(),
        "a coneless set stays below a geometric envelope"
    );
    // exact small-k verification of f_k ≤ δ^k, recording where it starts
    let mut verified_from = None;
    for k0 in (1..=14usize).rev() {
        if fks[k0] <= delta.pow(k0 as i32) {
            verified_from = Some(k0);
        } else {
            break;
        }
    }
    let taxonomy = match lambda_measure(a) {
        Some(_) => Taxonomy::Sparse,
        None => Taxonomy::ExpNegligible,
    };
    ClassificationReport {
        verdict: Verdict::ExponentiallyNegligible,
        witness: None,
        rate_bound: Some(delta),
        taxonomy,
        verified_from,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelativeVerdict {
    NonSmallCone,
    ExponentiallyMeasurable,
}

/// Per-part certificate of exponential λ_L-measurability: the loop
/// language R3 at the part's accepting state has absorption mass
/// `lambda_r3 = P(Z2) < 1`, geometric envelope `f'_k(R3, L) ≤ q^k`, and
/// star series `λ_L(R2) = Σ_j P(Z2)^j = P(Z2)/(1 − P(Z2))`.
#[derive(Debug, Clone)]
pub struct PartCertificate {
    pub lambda_r3: BigRational,
    pub dead_mass: BigRational,
    pub q: BigRational,
    pub lambda_r2: BigRational,
}

#[derive(Debug, Clone)]
pub struct RelativeReport {
    pub verdict: RelativeVerdict,
    pub witness: Option<Word>,
    pub parts: Vec<PartCertificate>,
}

/// Relative classification of `R ⊆ L` inside a prefix-closed regular
/// `L`: either the prefix closure of R contains a non-small L-cone, or
/// every consistent part certifies exponential λ_L-measurability.
pub fn classify_relative(
    r: &ReducedAutomaton,
    l: &ReducedAutomaton,
) -> Result<RelativeReport> {
    if !l.is_prefix_closed() {
        return Err(Error::InvalidParameter(
            "ambient language must be prefix-closed".into(),
        ));
    }
    if !r.is_subset_of(l) {
        return Err(Error::NotContained);
    }
    if r.is_empty_language() {
        return Ok(RelativeReport {
            verdict: RelativeVerdict::ExponentiallyMeasurable,
            witness: None,
            parts: Vec::new(),
        });
    }
    let rbar = r.prefix_closure();
    let quotient = ReducedAutomaton::mn_quotient(&rbar, l)?;
    let family = make_consistent(&quotient, l)?;
    if let Some(w) = relative_contains_cone(&family) {
        return Ok(RelativeReport {
            verdict: RelativeVerdict::NonSmallCone,
            witness: Some(w),
            parts: Vec::new(),
        });
    }
    let one = BigRational::one();
    let mut parts = Vec::new();
    for part in &family.parts {
        let split = split_b1_b2_b3(part);
        let chain = AbsorbingChain::from_star_part(&split.b3, &family.ambient);
        let lambda_r3 = chain.target_probability();
        assert!(
            lambda_r3 < one,
            "absent a cone witness, every loop language loses mass"
        );
        let dead_mass = chain.dead_probability();
        let (q, _) = chain
            .geometric_envelope()
            .expect("absorbing transient block admits a geometric envelope");
        let lambda_r2 = &lambda_r3 / (&one - &lambda_r3);
        parts.push(PartCertificate {
            lambda_r3,
            dead_mass,
            q,
            lambda_r2,
        });
    }
    Ok(RelativeReport {
        verdict: RelativeVerdict::ExponentiallyMeasurable,
        witness: None,
        parts,
    })
}

/// Exact partition counts p(0..=n) via the pentagonal-number
/// recurrence.
pub fn partition_counts(n: usize) -> Vec<BigInt> {
    let mut p = vec![BigInt::zero(); n + 1];
    p[0] = BigInt::one();
    for i in 1..=n {
        let mut total = BigInt::zero();
        let mut k = 1i64;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            let g2 = k * (3 * k + 1) / 2;
            if g1 as usize > i {
                break;
            }
            let sign = if k % 2 == 0 { -1 } else { 1 };
            total += sign * &p[i - g1 as usize];
            if g2 as usize <= i {
                total += sign * &p[i - g2 as usize];
            }
            k += 1;
        }
        p[i] = total;
    }
    p
}

/// Certificate that the star closure of a geometrically small language
/// stays exponentially small: `f'_k(T°∞, L) ≤ p(k)·q^k` with exact
/// partition counts p(k) for k < threshold, and `≤ q1^k` beyond.
#[derive(Debug, Clone)]
pub struct StarCertificate {
    pub q: BigRational,
    pub q1: BigRational,
    pub threshold: usize,
    partition: Vec<BigInt>,
}

impl StarCertificate {
    /// Envelope value at length k.
    pub fn bound_at(&self, k: usize) -> BigRational {
        if k < self.threshold {
            BigRational::from(self.partition[k].clone()) * self.q.pow(k as i32)
        } else {
            self.q1.pow(k as i32)
        }
    }
}

/// Round a positive float up to a nearby rational, with margin.
fn rational_upper(x: f64) -> BigRational {
    BigRational::from_float(x * (1.0 + 1e-9)).expect("finite float")
}

/// Certifies that `T°∞` is exponentially λ_L-measurable when
/// `f'_k(T, L) ≤ q^k` holds for all k with some q < 1 (verified via the
/// weighted-product envelope); `None` when the hypothesis fails or the
/// resulting q1 reaches 1. The factor `e^(π√(2/3)/√K)` dominates
/// `p(k)^(1/k)` for k ≥ K by the Hardy-Ramanujan bound, so `q1^k`
/// absorbs the partition counts beyond the threshold.
pub fn star_closure_measure(
    t: &ReducedAutomaton,
    l: &ReducedAutomaton,
    threshold: usize,
) -> Result<Option<StarCertificate>> {
    let weights = RelativeWeights::new(t, l)?;
    let Some((q, _)) = weights.geometric_envelope() else {
        return Ok(None);
    };
    let k = threshold.max(1);
    let c = std::f64::consts::PI * (2.0f64 / 3.0).sqrt();
    let factor = rational_upper((c / (k as f64).sqrt()).exp());
    let q1 = &q * factor;
    if q1 >= BigRational::one() {
        return Ok(None);
    }
    Ok(Some(StarCertificate {
        q,
        q1,
        threshold: k,
        partition: partition_counts(k),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::lambda_l_word;
    use crate::graph::StallingsGraph;
    use crate::transversal::SchreierTransversal;
    use crate::words::{sphere_size, Alphabet};

    fn alphabet() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn w(s: &str) -> Word {
        alphabet().parse_word(s, true).unwrap()
    }

    fn universe() -> ReducedAutomaton {
        ReducedAutomaton::universe(alphabet())
    }

    fn subgroup(words: &[&str]) -> ReducedAutomaton {
        let gens: Vec<Word> = words.iter().map(|s| w(s)).collect();
        ReducedAutomaton::subgroup(&StallingsGraph::build(alphabet(), &gens).unwrap())
    }

    #[test]
    fn transversal_is_thick() {
        let g = StallingsGraph::build(alphabet(), &[w("abA")]).unwrap();
        let t = SchreierTransversal::geodesic(g);
        let report = classify(t.automaton());
        assert_eq!(report.verdict, Verdict::Thick);
        assert!(report.witness.is_some());
        assert_eq!(report.taxonomy, Taxonomy::Thick);
    }

    #[test]
    fn subgroup_is_negligible_with_sound_rate() {
        let c = subgroup(&["abA"]);
        let report = classify(&c);
        assert_eq!(report.verdict, Verdict::ExponentiallyNegligible);
        let delta = report.rate_bound.unwrap();
        assert!(delta < BigRational::one());
        let k0 = report.verified_from.unwrap();
        assert!(k0 <= 5, "rate bound kicks in late: k0 = {k0}");
        let fks = fk_sequence(&c, 14);
        for k in k0..=14 {
            assert!(fks[k] <= delta.pow(k as i32), "k = {k}");
        }
        assert_eq!(report.taxonomy, Taxonomy::Sparse);
    }

    #[test]
    fn double_coset_is_negligible() {
        // A w B with both factors of infinite index
        let a = subgroup(&["abA"]);
        let b = subgroup(&["ba"]);
        let word = ReducedAutomaton::finite(alphabet(), &[w("bb")]);
        let awb = a.reduced_product(&word).reduced_product(&b);
        let report = classify(&awb);
        assert_eq!(report.verdict, Verdict::ExponentiallyNegligible);
    }

    #[test]
    fn empty_set_is_negligible_rate_zero() {
        let report = classify(&ReducedAutomaton::empty(alphabet()));
        assert_eq!(report.verdict, Verdict::ExponentiallyNegligible);
        assert_eq!(report.rate_bound.unwrap(), BigRational::zero());
    }

    #[test]
    fn whole_group_is_thick_with_empty_witness() {
        let report = classify(&universe());
        assert_eq!(report.verdict, Verdict::Thick);
        assert_eq!(report.witness.unwrap(), Word::empty());
    }

    #[test]
    fn verdict_invariant_under_finite_union_and_closure() {
        let cases = [
            subgroup(&["abA"]),
            ReducedAutomaton::cone(alphabet(), &w("ab")),
            subgroup(&["ab", "ba"]),
            ReducedAutomaton::finite(alphabet(), &[w("a"), w("bb")]),
        ];
        let finite = ReducedAutomaton::finite(alphabet(), &[w("aB"), w("bab")]);
        for a in &cases {
            let base = classify(a).verdict;
            assert_eq!(classify(&a.union(&finite)).verdict, base);
            assert_eq!(classify(&a.prefix_closure()).verdict, base);
        }
    }

    #[test]
    fn relative_whole_language_is_cone() {
        let l = universe();
        let report = classify_relative(&l, &l).unwrap();
        assert_eq!(report.verdict, RelativeVerdict::NonSmallCone);
        assert_eq!(report.witness.unwrap(), Word::empty());
    }

    #[test]
    fn relative_degenerates_to_absolute_over_f() {
        let cases = [
            subgroup(&["abA"]),
            subgroup(&["ab"]),
            subgroup(&["ab", "ba"]),
            ReducedAutomaton::cone(alphabet(), &w("aB")),
            ReducedAutomaton::finite(alphabet(), &[w("a"), w("abb")]),
            ReducedAutomaton::empty(alphabet()),
            universe(),
            subgroup(&["aa", "bb"]),
            ReducedAutomaton::cone(alphabet(), &w("b")).difference(&subgroup(&["ba"])),
            subgroup(&["abA"]).union(&ReducedAutomaton::finite(alphabet(), &[w("bb")])),
        ];
        for (i, a) in cases.iter().enumerate() {
            let absolute = classify(a).verdict;
            let relative = classify_relative(a, &universe()).unwrap().verdict;
            let expected = match absolute {
                Verdict::Thick => RelativeVerdict::NonSmallCone,
                Verdict::ExponentiallyNegligible => RelativeVerdict::ExponentiallyMeasurable,
            };
            assert_eq!(relative, expected, "case {i}");
        }
    }

    #[test]
    fn relative_certificates_are_exact() {
        let c = subgroup(&["ab"]);
        let report = classify_relative(&c, &universe()).unwrap();
        assert_eq!(report.verdict, RelativeVerdict::ExponentiallyMeasurable);
        assert!(!report.parts.is_empty());
        let one = BigRational::one();
        for part in &report.parts {
            assert!(part.lambda_r3 < one);
            assert!((&part.lambda_r3 + &part.dead_mass).is_one());
            assert!(part.q < one);
            assert_eq!(
                part.lambda_r2,
                &part.lambda_r3 / (&one - &part.lambda_r3)
            );
        }
    }

    #[test]
    fn relative_requires_containment_and_closure() {
        let a = ReducedAutomaton::cone(alphabet(), &w("a"));
        let b = ReducedAutomaton::cone(alphabet(), &w("b")).prefix_closure();
        assert!(matches!(classify_relative(&a, &b), Err(Error::NotContained)));
        let open = ReducedAutomaton::finite(alphabet(), &[w("ab")]);
        assert!(matches!(
            classify_relative(&open, &open),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn partition_counts_match_known_values() {
        let p = partition_counts(20);
        let known = [
            1u64, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135, 176, 231, 297,
            385, 490, 627,
        ];
        for (i, v) in known.iter().enumerate() {
            assert_eq!(p[i], BigInt::from(*v), "p({i})");
        }
    }

    #[test]
    fn star_closure_certificate_covers_even_powers() {
        // T = {aa}: the star closure is the even powers of the generator
        let t = ReducedAutomaton::finite(alphabet(), &[w("aa")]);
        let cert = star_closure_measure(&t, &universe(), 200)
            .unwrap()
            .expect("certificate");
        assert!(cert.q1 < BigRational::one());
        for j in 1..=10usize {
            let word = alphabet().parse_word(&"a".repeat(2 * j), true).unwrap();
            let mass = lambda_l_word(&word, &universe()).unwrap();
            assert!(mass <= cert.bound_at(2 * j), "k = {}", 2 * j);
        }
    }

    #[test]
    fn star_closure_empirical_partial_sums_stay_below_envelope() {
        // compare levelwise: the exact star-closure mass at each length
        // stays below the certified envelope
        let t = ReducedAutomaton::finite(alphabet(), &[w("ab"), w("ba")]);
        let cert = star_closure_measure(&t, &universe(), 200)
            .unwrap()
            .expect("certificate");
        // words of T°∞ up to length 20: closure under no-cancel concat
        let mut closure = ReducedAutomaton::finite(alphabet(), &[Word::empty()]);
        for _ in 0..10 {
            let next = closure.union(&closure.concat_no_cancel(&t));
            if next.language_eq(&closure) {
                break;
            }
            closure = next;
        }
        for k in 1..=20usize {
            let mass: BigRational = closure
                .enumerate_words(k)
                .into_iter()
                .filter(|u| u.len() == k)
                .map(|u| lambda_l_word(&u, &universe()).unwrap())
                .sum();
            assert!(mass <= cert.bound_at(k), "k = {k}");
        }
    }

    #[test]
    fn star_closure_empty_input() {
        let t = ReducedAutomaton::empty(alphabet());
        let cert = star_closure_measure(&t, &universe(), 200)
            .unwrap()
            .expect("certificate");
        for k in 1..=5 {
            assert!(cert.bound_at(k).is_zero() || cert.bound_at(k) >= BigRational::zero());
        }
        assert!(cert.q.is_zero());
    }

    #[test]
    fn star_closure_declines_full_language() {
        assert!(star_closure_measure(&universe(), &universe(), 200)
            .unwrap()
            .is_none());
    }

    #[test]
    fn rate_bound_matches_closed_form_for_cone() {
        // the cone over a single letter keeps f_k = 1/4 exactly, thick
        let cone = ReducedAutomaton::cone(alphabet(), &w("a"));
        let report = classify(&cone);
        assert_eq!(report.verdict, Verdict::Thick);
        let (_, fk) = crate::measures::count_fk(&cone, 5);
        assert_eq!(
            fk,
            BigRational::new(BigInt::one(), BigInt::from(4))
        );
        let _ = sphere_size(5, &alphabet());
    }
}
