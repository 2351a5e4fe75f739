//! Exact univariate polynomials and rational functions over the
//! rationals, plus Sturm-sequence real root isolation.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::fmt;

/// Dense polynomial; invariant: no trailing zero coefficients, the zero
/// polynomial is the empty vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(Vec<BigRational>);

fn rat(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

impl Poly {
    pub fn zero() -> Poly {
        Poly(Vec::new())
    }

    pub fn one() -> Poly {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    pub fn x() -> Poly {
        Poly::from_coeffs(vec![BigRational::zero(), BigRational::one()])
    }

    /// Coefficients in increasing degree order.
    pub fn from_coeffs(mut c: Vec<BigRational>) -> Poly {
        while c.last().map(|x| x.is_zero()).unwrap_or(false) {
            c.pop();
        }
        Poly(c)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.0.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading(&self) -> BigRational {
        self.0.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly::zero();
        }
        Poly::from_coeffs(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64))
                .collect(),
        )
    }

    /// Substitution `p(q(x))`.
    pub fn compose(&self, q: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.0.iter().rev() {
            acc = acc.mul(q).add(&Poly::constant(c.clone()));
        }
        acc
    }

    /// Euclidean division; panics on zero divisor.
    pub fn divrem(&self, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero(), "division by zero polynomial");
        let dd = div.degree().unwrap();
        let lead = div.leading();
        let mut rem = self.0.clone();
        let mut quot = vec![
            BigRational::zero();
            self.0.len().saturating_sub(div.0.len()).saturating_add(1)
        ];
        while rem.len() > dd || (rem.len() == dd + 1 && dd == 0) {
            while rem.last().map(|x| x.is_zero()).unwrap_or(false) {
                rem.pop();
            }
            if rem.len() <= dd {
                break;
            }
            let shift = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() / &lead;
            quot[shift] = factor.clone();
            for (i, c) in div.0.iter().enumerate() {
                let v = c * &factor;
                rem[shift + i] -= v;
            }
        }
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Exact quotient; panics if the division leaves a remainder.
    pub fn exact_div(&self, div: &Poly) -> Poly {
        let (q, r) = self.divrem(div);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let lead = a.leading();
            a.scale(&(BigRational::one() / lead))
        }
    }

    /// Number of sign changes of the Sturm sequence at `x`.
    fn sturm_changes(seq: &[Poly], x: &BigRational) -> usize {
        let mut last = 0i8;
        let mut changes = 0;
        for p in seq {
            let v = p.eval(x);
            let sign = if v.is_zero() {
                continue;
            } else if v.is_positive() {
                1
            } else {
                -1
            };
            if last != 0 && sign != last {
                changes += 1;
            }
            last = sign;
        }
        changes
    }

    fn sturm_sequence(&self) -> Vec<Poly> {
        // square-free part first so multiplicities do not break the count
        let d = self.derivative();
        let g = self.gcd(&d);
        let p0 = if g.degree().unwrap_or(0) > 0 {
            self.exact_div(&g)
        } else {
            self.clone()
        };
        let mut seq = vec![p0.clone(), p0.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let (_, r) = seq[n - 2].divrem(&seq[n - 1]);
            seq.push(r.neg());
        }
        seq.pop();
        seq
    }

    /// Distinct real roots in the half-open interval `(lo, hi]`.
    pub fn count_roots_in(&self, lo: &BigRational, hi: &BigRational) -> usize {
        let seq = self.sturm_sequence();
        Poly::sturm_changes(&seq, lo) - Poly::sturm_changes(&seq, hi)
    }

    /// Cauchy bound: every real root lies in `[-b, b]`.
    pub fn root_bound(&self) -> BigRational {
        let lead = self.leading();
        let mx = self
            .0
            .iter()
            .map(|c| (c / &lead).abs())
            .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
        mx + BigRational::one()
    }

    /// Encloses the largest real root in a half-open interval `(lo, hi]`
    /// of width at most `tol`; `None` when there is no real root.
    pub fn largest_real_root(&self, tol: &BigRational) -> Option<(BigRational, BigRational)> {
        assert!(!self.is_zero() && self.degree().unwrap() >= 1);
        let seq = self.sturm_sequence();
        let bound = self.root_bound();
        let mut lo = -bound.clone();
        let mut hi = bound;
        if Poly::sturm_changes(&seq, &lo) == Poly::sturm_changes(&seq, &hi) {
            return None;
        }
        // keep the largest root strictly above lo: bisect on "roots in (mid, hi]"
        let total = |a: &BigRational, b: &BigRational| {
            Poly::sturm_changes(&seq, a) - Poly::sturm_changes(&seq, b)
        };
        while &hi - &lo > *tol {
            let mid = (&lo + &hi) / rat(2);
            if total(&mid, &hi) > 0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some((lo, hi))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*s")?,
                _ => write!(f, "({c})*s^{i}")?,
            }
        }
        Ok(())
    }
}

/// Quotient of polynomials, kept in lowest terms with monic denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> RationalFn {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RationalFn {
                num,
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.degree().unwrap_or(0) > 0 {
            (num.exact_div(&g), den.exact_div(&g))
        } else {
            (num, den)
        };
        let lead = den.leading();
        let inv = BigRational::one() / lead;
        num = num.scale(&inv);
        den = den.scale(&inv);
        RationalFn { num, den }
    }

    pub fn from_poly(p: Poly) -> RationalFn {
        RationalFn {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// `None` when the reduced denominator vanishes at `x` (a pole).
    pub fn eval(&self, x: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    pub fn add(&self, other: &RationalFn) -> RationalFn {
        RationalFn::new(
            self.num
                .mul(&other.den)
                .add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn scale(&self, c: &BigRational) -> RationalFn {
        RationalFn::new(self.num.scale(c), self.den.clone())
    }

    pub fn mul(&self, other: &RationalFn) -> RationalFn {
        RationalFn::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    /// Quotient by the monomial `s`; exact when the numerator has no
    /// constant term, otherwise introduces a pole at 0.
    pub fn div_by_x(&self) -> RationalFn {
        RationalFn::new(self.num.clone(), self.den.mul(&Poly::x()))
    }

    /// Substitution of a polynomial for the variable.
    pub fn compose_poly(&self, q: &Poly) -> RationalFn {
        RationalFn::new(self.num.compose(q), self.den.compose(q))
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect())
    }

    #[test]
    fn arithmetic_identities() {
        let a = p(&[1, 2, 3]);
        let b = p(&[-1, 4]);
        assert_eq!(a.add(&b).sub(&b), a);
        assert_eq!(a.mul(&b).exact_div(&b), a);
        let x = rat(7) / rat(3);
        assert_eq!(a.mul(&b).eval(&x), a.eval(&x) * b.eval(&x));
    }

    #[test]
    fn divrem_property() {
        let a = p(&[3, 0, -2, 1, 5]);
        let b = p(&[1, 1, 2]);
        let (q, r) = a.divrem(&b);
        assert_eq!(b.mul(&q).add(&r), a);
        assert!(r.degree().unwrap_or(0) < b.degree().unwrap());
    }

    #[test]
    fn gcd_of_products() {
        let g = p(&[1, 1]); // 1 + s
        let a = g.mul(&p(&[2, 0, 1]));
        let b = g.mul(&p(&[-1, 1]));
        assert_eq!(a.gcd(&b), g);
        assert_eq!(p(&[1]).gcd(&p(&[0, 1])), Poly::one());
    }

    #[test]
    fn compose_affine() {
        // p(s) = s^2, q(s) = 1 - s => p(q) = 1 - 2s + s^2
        let sq = p(&[0, 0, 1]);
        let q = p(&[1, -1]);
        assert_eq!(sq.compose(&q), p(&[1, -2, 1]));
    }

    #[test]
    fn sturm_counts() {
        // (s - 1)(s - 2)(s + 3)
        let f = p(&[-1, 1]).mul(&p(&[-2, 1])).mul(&p(&[3, 1]));
        assert_eq!(f.count_roots_in(&rat(0), &rat(10)), 2);
        assert_eq!(f.count_roots_in(&rat(-10), &rat(0)), 1);
        // repeated root still counted once
        let g = p(&[-1, 1]).mul(&p(&[-1, 1]));
        assert_eq!(g.count_roots_in(&rat(0), &rat(2)), 1);
    }

    #[test]
    fn largest_root_enclosure() {
        let f = p(&[-6, 11, -6, 1]); // roots 1, 2, 3
        let tol = BigRational::new(BigInt::from(1), BigInt::from(1000));
        let (lo, hi) = f.largest_real_root(&tol).unwrap();
        assert!(lo < rat(3) && rat(3) <= hi);
        assert!(&hi - &lo <= tol);
        // s^2 + 1 has no real root
        assert!(p(&[1, 0, 1]).largest_real_root(&tol).is_none());
    }

    #[test]
    fn rational_fn_reduction() {
        // (s^2 - 1)/(s - 1) = s + 1
        let r = RationalFn::new(p(&[-1, 0, 1]), p(&[-1, 1]));
        assert_eq!(r.num(), &p(&[1, 1]));
        assert_eq!(r.den(), &Poly::one());
        assert_eq!(r.eval(&rat(1)), Some(rat(2)));
        // pole detection
        let q = RationalFn::new(p(&[1]), p(&[-1, 1]));
        assert_eq!(q.eval(&rat(1)), None);
        assert_eq!(q.eval(&rat(3)), Some(rat(1) / rat(2)));
    }
}
