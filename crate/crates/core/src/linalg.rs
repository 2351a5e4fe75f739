//! Exact rational linear algebra: Gaussian elimination, characteristic
//! polynomials and certified spectral radius bounds for nonnegative
//! matrices.

use crate::poly::Poly;
use num::{BigInt, BigRational, One, Zero};

pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn identity(n: usize) -> RatMatrix {
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigRational::one();
    }
    m
}

pub fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let n = a.len();
    let p = b[0].len();
    let mut out = vec![vec![BigRational::zero(); p]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..p {
                if !b[k][j].is_zero() {
                    out[i][j] += aik * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn mat_vec(a: &RatMatrix, v: &[BigRational]) -> Vec<BigRational> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, x)| c * x)
                .sum()
        })
        .collect()
}

pub fn mat_add(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn mat_trace(a: &RatMatrix) -> BigRational {
    a.iter().enumerate().map(|(i, r)| r[i].clone()).sum()
}

pub fn mat_scale(a: &RatMatrix, c: &BigRational) -> RatMatrix {
    a.iter()
        .map(|r| r.iter().map(|x| x * c).collect())
        .collect()
}

/// Solves `A x = b` exactly; `None` when `A` is singular.
pub fn solve(a: &RatMatrix, b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.len();
    debug_assert_eq!(b.len(), n);
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for c in col..=n {
            m[col][c] = &m[col][c] / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let v = &m[col][c] * &f;
                    m[r][c] -= v;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Characteristic polynomial `det(xI - M)` by the Faddeev-LeVerrier
/// recurrence; monic of degree `n`.
pub fn char_poly(m: &RatMatrix) -> Poly {
    let n = m.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut aux = identity(n);
    for k in 1..=n {
        let prod = mat_mul(m, &aux);
        let c = -mat_trace(&prod) / BigRational::from(BigInt::from(k as i64));
        coeffs[n - k] = c.clone();
        aux = prod;
        for (i, row) in aux.iter_mut().enumerate() {
            row[i] += &c;
        }
    }
    Poly::from_coeffs(coeffs)
}

/// Certified Collatz-Wielandt enclosure of the spectral radius of a
/// nonnegative matrix: with `x = (M + I)^p 1` (strictly positive),
/// `min_i (Mx)_i / x_i <= rho(M) <= max_i (Mx)_i / x_i`. Larger `p`
/// tightens the interval.
pub fn spectral_radius_bounds(m: &RatMatrix, p: usize) -> (BigRational, BigRational) {
    let n = m.len();
    if n == 0 {
        return (BigRational::zero(), BigRational::zero());
    }
    let mut x = vec![BigRational::one(); n];
    for _ in 0..p {
        let mx = mat_vec(m, &x);
        for (xi, mxi) in x.iter_mut().zip(mx) {
            *xi += mxi; // (M + I) x stays strictly positive
        }
    }
    let mx = mat_vec(m, &x);
    let mut lo: Option<BigRational> = None;
    let mut hi: Option<BigRational> = None;
    for (xi, mxi) in x.iter().zip(&mx) {
        let r = mxi / xi;
        if lo.as_ref().map(|l| &r < l).unwrap_or(true) {
            lo = Some(r.clone());
        }
        if hi.as_ref().map(|h| &r > h).unwrap_or(true) {
            hi = Some(r);
        }
    }
    (lo.unwrap(), hi.unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rm(rows: &[&[i64]]) -> RatMatrix {
        rows.iter()
            .map(|r| {
                r.iter()
                    .map(|&c| BigRational::from(BigInt::from(c)))
                    .collect()
            })
            .collect()
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    #[test]
    fn solve_known_system() {
        // 2x + y = 5, x - y = 1 => x = 2, y = 1
        let a = rm(&[&[2, 1], &[1, -1]]);
        let x = solve(&a, &[rat(5), rat(1)]).unwrap();
        assert_eq!(x, vec![rat(2), rat(1)]);
        // singular
        let s = rm(&[&[1, 2], &[2, 4]]);
        assert!(solve(&s, &[rat(1), rat(1)]).is_none());
    }

    #[test]
    fn solve_residual_property() {
        let a = rm(&[&[3, 1, -2], &[1, 0, 5], &[-1, 4, 2]]);
        let b = [rat(7), rat(-3), rat(11)];
        let x = solve(&a, &b).unwrap();
        assert_eq!(mat_vec(&a, &x), b.to_vec());
    }

    #[test]
    fn char_poly_known() {
        // [[2, 1], [1, 2]]: x^2 - 4x + 3
        let m = rm(&[&[2, 1], &[1, 2]]);
        let p = char_poly(&m);
        assert_eq!(p.coeffs(), &[rat(3), rat(-4), rat(1)]);
        // companion matrix of x^3 - 2x - 5
        let c = rm(&[&[0, 0, 5], &[1, 0, 2], &[0, 1, 0]]);
        let p = char_poly(&c);
        assert_eq!(p.coeffs(), &[rat(-5), rat(-2), rat(0), rat(1)]);
    }

    #[test]
    fn cayley_hamilton_spot_check() {
        let m = rm(&[&[1, 2, 0], &[0, 1, 3], &[4, 0, 1]]);
        let p = char_poly(&m);
        // evaluate p at M
        let n = m.len();
        let mut acc = vec![vec![BigRational::zero(); n]; n];
        let mut pw = identity(n);
        for c in p.coeffs() {
            acc = mat_add(&acc, &mat_scale(&pw, c));
            pw = mat_mul(&pw, &m);
        }
        assert!(acc.iter().all(|r| r.iter().all(|x| x.is_zero())));
    }

    #[test]
    fn spectral_bounds_vs_sturm_root() {
        // irreducible nonnegative matrix; Perron root is the largest real
        // root of the characteristic polynomial
        let m = rm(&[&[0, 2, 1], &[1, 0, 1], &[1, 1, 0]]);
        let p = char_poly(&m);
        let tol = BigRational::new(BigInt::from(1), BigInt::from(1_000_000));
        let (rlo, rhi) = p.largest_real_root(&tol).unwrap();
        let (blo, bhi) = spectral_radius_bounds(&m, 40);
        assert!(blo <= rhi && rlo <= bhi, "enclosures must overlap");
        assert!(&bhi - &blo < rat(1) / rat(1000), "bounds should be tight");
    }

    #[test]
    fn spectral_bounds_exact_for_constant_row_sums() {
        // row sums all 3: rho = 3 and the enclosure is immediately tight
        let m = rm(&[&[1, 2], &[2, 1]]);
        let (lo, hi) = spectral_radius_bounds(&m, 0);
        assert_eq!(lo, rat(3));
        assert_eq!(hi, rat(3));
    }
}
