use super::BigComplex;
use crate::error::{Error, Result};
use rug::{Float, Integer};
use serde::Serialize;
use std::fmt;

/// Integer polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    pub coeffs: Vec<Integer>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<Integer>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| Integer::from(v)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn content(&self) -> Integer {
        self.coeffs.iter().fold(Integer::new(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> Self {
        let mut g = self.content();
        if g == 0 {
            return self.clone();
        }
        if self.coeffs.last().is_some_and(|c| *c < 0) {
            g = -g;
        }
        IntPolynomial::new(self.coeffs.iter().map(|c| Integer::from(c / &g)).collect())
    }

    pub fn eval(&self, x: &BigComplex) -> BigComplex {
        let p = x.prec();
        let mut acc = BigComplex::zero(p);
        for c in self.coeffs.iter().rev() {
            acc = &acc * x;
            acc.re += c;
        }
        acc
    }

    pub fn max_coeff_bits(&self) -> u32 {
        self.coeffs.iter().map(|c| c.significant_bits()).max().unwrap_or(0)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 && self.coeffs.len() > 1 {
                continue;
            }
            let neg = *c < 0;
            let a = Integer::from(c.abs_ref());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono = match i {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            };
            if i == 0 {
                write!(f, "{a}")?;
            } else if a == 1 {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{a}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

fn dot(a: &[Integer], b: &[Integer]) -> Integer {
    let mut s = Integer::new();
    for (x, y) in a.iter().zip(b) {
        s += Integer::from(x * y);
    }
    s
}

/// LLL reduction (delta = 0.99) of the rows of `basis`, in place.
///
/// Gram-Schmidt data is kept in floating point at a precision derived from the
/// entry sizes; the basis itself stays exact.
pub fn lll_reduce(basis: &mut [Vec<Integer>]) {
    let n = basis.len();
    if n < 2 {
        return;
    }
    let bits = basis.iter().flatten().map(|x| x.significant_bits()).max().unwrap_or(1);
    let prec = 2 * bits + 64 + 8 * n as u32;
    let delta = Float::with_val(prec, 0.99);

    let gram_schmidt = |b: &[Vec<Integer>]| -> (Vec<Vec<Float>>, Vec<Float>) {
        let mut mu = vec![vec![Float::new(prec); n]; n];
        let mut bb = vec![Float::new(prec); n];
        // r[i][j] = <b_i, b*_j>, computed from exact inner products
        let mut r = vec![vec![Float::new(prec); n]; n];
        for i in 0..n {
            for j in 0..=i {
                let mut v = Float::with_val(prec, &dot(&b[i], &b[j]));
                for k in 0..j {
                    v -= Float::with_val(prec, &mu[j][k] * &r[i][k]);
                }
                r[i][j] = v.clone();
                if j < i {
                    mu[i][j] = if bb[j].is_zero() { Float::new(prec) } else { v / &bb[j] };
                } else {
                    bb[i] = v;
                }
            }
        }
        (mu, bb)
    };

    let (mut mu, mut bb) = gram_schmidt(basis);
    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 200_000 {
            break;
        }
        for j in (0..k).rev() {
            let q = Float::with_val(prec, mu[k][j].round_ref());
            if q.is_zero() {
                continue;
            }
            let qi = q.to_integer().unwrap_or_default();
            let (head, tail) = basis.split_at_mut(k);
            for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                *x -= Integer::from(&qi * y);
            }
            for i in 0..j {
                let t = Float::with_val(prec, &q * &mu[j][i]);
                mu[k][i] -= t;
            }
            mu[k][j] -= &q;
        }
        let lhs = bb[k].clone();
        let m2 = Float::with_val(prec, mu[k][k - 1].square_ref());
        let rhs = Float::with_val(prec, &delta - &m2) * &bb[k - 1];
        if lhs < rhs {
            basis.swap(k, k - 1);
            let gs = gram_schmidt(basis);
            mu = gs.0;
            bb = gs.1;
            k = (k - 1).max(1);
        } else {
            k += 1;
        }
    }
}

/// Finds a primitive integer polynomial of minimal degree vanishing at `x`.
///
/// Degrees 1..=max_degree are tried in order; for each, the lattice
/// [I | round(2^B x^j)] (real and imaginary columns) is LLL-reduced with
/// B = prec(x) - 16. A short vector is accepted when its coefficients fit in
/// `max_coeff_bits` and |p(x)| < 2^{-B/4}.
pub fn integer_relation(x: &BigComplex, max_degree: usize, max_coeff_bits: u32) -> Result<IntPolynomial> {
    let prec = x.prec();
    let needed = (max_degree as u32 + 1) * max_coeff_bits + 16;
    if prec < needed {
        return Err(Error::InsufficientPrecision(format!(
            "need at least {needed} bits for degree {max_degree} with {max_coeff_bits}-bit coefficients, have {prec}"
        )));
    }
    let b = prec as i32 - 16;
    let tol = super::pow2(prec, -b / 4);
    let scale = super::pow2(prec, b);
    let mut powers = vec![BigComplex::one(prec)];
    for j in 1..=max_degree {
        powers.push(&powers[j - 1] * x);
    }
    let to_int = |v: &Float| -> Integer {
        Float::with_val(prec, v * &scale).round().to_integer().unwrap_or_default()
    };
    for d in 1..=max_degree {
        let mut basis: Vec<Vec<Integer>> = (0..=d)
            .map(|j| {
                let mut row = vec![Integer::new(); d + 3];
                row[j] = Integer::from(1);
                row[d + 1] = to_int(&powers[j].re);
                row[d + 2] = to_int(&powers[j].im);
                row
            })
            .collect();
        lll_reduce(&mut basis);
        let mut hits = Vec::new();
        for row in basis.iter() {
            let p = IntPolynomial::new(row[..=d].to_vec());
            if p.coeffs.iter().all(|c| *c == 0) || p.degree() == 0 {
                continue;
            }
            if p.max_coeff_bits() > max_coeff_bits {
                continue;
            }
            if p.eval(x).abs() < tol {
                hits.push(p.primitive());
            }
        }
        match hits.len() {
            0 => continue,
            1 => return Ok(hits.remove(0)),
            _ => {
                // several short relations at one degree: only fine if they agree
                let first = hits[0].clone();
                if hits.iter().all(|h| *h == first) {
                    return Ok(first);
                }
                return Err(Error::InsufficientPrecision(format!(
                    "{} independent relations of degree {d} pass the tolerance",
                    hits.len()
                )));
            }
        }
    }
    Err(Error::NotFound(format!("no relation of degree <= {max_degree} with {max_coeff_bits}-bit coefficients")))
}
