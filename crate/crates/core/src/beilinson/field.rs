//! Exact arithmetic in ℚ(√d) and in polynomial rings over it.

use crate::error::{Error, Result};
use crate::numerics::BigComplex;
use rug::{Float, Integer, Rational};
use serde::{Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// u + v√d with d squarefree and greater than 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadFieldElem {
    pub d: i64,
    pub u: Rational,
    pub v: Rational,
}

fn squarefree(d: i64) -> bool {
    let mut n = d;
    let mut p = 2;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        if n % p == 0 {
            n /= p;
        }
        p += 1;
    }
    true
}

impl QuadFieldElem {
    pub fn new(d: i64, u: Rational, v: Rational) -> Result<Self> {
        if d <= 1 || !squarefree(d) {
            return Err(Error::DomainError(format!("d = {d} is not a squarefree integer > 1")));
        }
        Ok(QuadFieldElem { d, u, v })
    }

    /// u + v√d from integers. Panics on a bad d; meant for embedded data.
    pub fn ints(d: i64, u: i64, v: i64) -> Self {
        Self::new(d, Rational::from(u), Rational::from(v)).expect("valid field")
    }

    /// (un/ud) + (vn/vd)√d.
    pub fn ratios(d: i64, u: (i64, i64), v: (i64, i64)) -> Self {
        Self::new(d, Rational::from(u), Rational::from(v)).expect("valid field")
    }

    pub fn zero(d: i64) -> Self {
        Self::ints(d, 0, 0)
    }

    pub fn one(d: i64) -> Self {
        Self::ints(d, 1, 0)
    }

    pub fn sqrt_d(d: i64) -> Self {
        Self::ints(d, 0, 1)
    }

    pub fn from_rational(d: i64, r: Rational) -> Self {
        QuadFieldElem { d, u: r, v: Rational::new() }.checked()
    }

    fn checked(self) -> Self {
        debug_assert!(self.d > 1);
        self
    }

    fn same(&self, o: &Self) {
        assert_eq!(self.d, o.d, "elements of different fields");
    }

    pub fn is_zero(&self) -> bool {
        self.u == 0 && self.v == 0
    }

    pub fn is_rational(&self) -> bool {
        self.v == 0
    }

    /// √d ↦ -√d.
    pub fn conj(&self) -> Self {
        QuadFieldElem { d: self.d, u: self.u.clone(), v: Rational::from(-&self.v) }
    }

    pub fn norm(&self) -> Rational {
        Rational::from(self.u.square_ref()) - Rational::from(self.v.square_ref()) * self.d
    }

    pub fn trace(&self) -> Rational {
        Rational::from(&self.u * 2u32)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DomainError("division by zero in ℚ(√d)".into()));
        }
        let n = self.norm();
        let c = self.conj();
        Ok(QuadFieldElem { d: self.d, u: Rational::from(&c.u / &n), v: Rational::from(&c.v / &n) })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self * &o.inv()?)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        QuadFieldElem { d: self.d, u: Rational::from(&self.u * r), v: Rational::from(&self.v * r) }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.d);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact square root inside ℚ(√d), if there is one.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        // (a + b√d)² = u + v√d: a² + d b² = u, 2ab = v, so a² = (u ± √N)/2
        let s = rational_sqrt(&self.norm())?;
        for sign in [1i32, -1] {
            let a2 = Rational::from(&self.u + Rational::from(&s * sign)) / 2u32;
            if let Some(a) = rational_sqrt(&a2) {
                let cand = if a == 0 {
                    let b2 = Rational::from(&self.u / self.d);
                    rational_sqrt(&b2).map(|b| QuadFieldElem { d: self.d, u: Rational::new(), v: b })
                } else {
                    let b = Rational::from(&self.v / Rational::from(&a * 2u32));
                    Some(QuadFieldElem { d: self.d, u: a, v: b })
                };
                if let Some(c) = cand {
                    if &(&c * &c) == self {
                        return Some(c);
                    }
                }
            }
        }
        None
    }

    /// Value under √d ↦ +√d.
    pub fn eval(&self, prec: u32) -> Float {
        let s = Float::with_val(prec, self.d).sqrt();
        Float::with_val(prec, &self.u) + s * &self.v
    }

    pub fn eval_c(&self, prec: u32) -> BigComplex {
        BigComplex::from_real(self.eval(prec))
    }
}

fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if *r < 0 {
        return None;
    }
    let (n, d) = (r.numer(), r.denom());
    if !n.is_perfect_square() || !d.is_perfect_square() {
        return None;
    }
    Some(Rational::from((Integer::from(n.sqrt_ref()), Integer::from(d.sqrt_ref()))))
}

impl<'a> Add<&'a QuadFieldElem> for &'a QuadFieldElem {
    type Output = QuadFieldElem;
    fn add(self, o: &QuadFieldElem) -> QuadFieldElem {
        self.same(o);
        QuadFieldElem { d: self.d, u: Rational::from(&self.u + &o.u), v: Rational::from(&self.v + &o.v) }
    }
}

impl<'a> Sub<&'a QuadFieldElem> for &'a QuadFieldElem {
    type Output = QuadFieldElem;
    fn sub(self, o: &QuadFieldElem) -> QuadFieldElem {
        self.same(o);
        QuadFieldElem { d: self.d, u: Rational::from(&self.u - &o.u), v: Rational::from(&self.v - &o.v) }
    }
}

impl<'a> Mul<&'a QuadFieldElem> for &'a QuadFieldElem {
    type Output = QuadFieldElem;
    fn mul(self, o: &QuadFieldElem) -> QuadFieldElem {
        self.same(o);
        let u = Rational::from(&self.u * &o.u) + Rational::from(&self.v * &o.v) * self.d;
        let v = Rational::from(&self.u * &o.v) + Rational::from(&self.v * &o.u);
        QuadFieldElem { d: self.d, u, v }
    }
}

impl Neg for &QuadFieldElem {
    type Output = QuadFieldElem;
    fn neg(self) -> QuadFieldElem {
        QuadFieldElem { d: self.d, u: Rational::from(-&self.u), v: Rational::from(-&self.v) }
    }
}

impl fmt::Display for QuadFieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v == 0 {
            return write!(f, "{}", self.u);
        }
        let neg = self.v < 0;
        let a = Rational::from(self.v.abs_ref());
        let t = if a == 1 {
            format!("√{}", self.d)
        } else if *a.denom() == 1 {
            format!("{a}√{}", self.d)
        } else {
            format!("({a})√{}", self.d)
        };
        match (self.u == 0, neg) {
            (true, false) => write!(f, "{t}"),
            (true, true) => write!(f, "-{t}"),
            (false, false) => write!(f, "{}+{t}", self.u),
            (false, true) => write!(f, "{}-{t}", self.u),
        }
    }
}

impl Serialize for QuadFieldElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Polynomial over ℚ(√d), coefficients from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KPoly {
    pub d: i64,
    pub c: Vec<QuadFieldElem>,
}

impl KPoly {
    pub fn new(d: i64, mut c: Vec<QuadFieldElem>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        KPoly { d, c }
    }

    /// From integer pairs (u, v), constant term first.
    pub fn from_ints(d: i64, c: &[(i64, i64)]) -> Self {
        Self::new(d, c.iter().map(|&(u, v)| QuadFieldElem::ints(d, u, v)).collect())
    }

    pub fn zero(d: i64) -> Self {
        KPoly { d, c: vec![] }
    }

    pub fn constant(c: QuadFieldElem) -> Self {
        Self::new(c.d, vec![c])
    }

    pub fn x(d: i64) -> Self {
        Self::from_ints(d, &[(0, 0), (1, 0)])
    }

    /// x - r
    pub fn linear(r: &QuadFieldElem) -> Self {
        Self::new(r.d, vec![-r, QuadFieldElem::one(r.d)])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lead(&self) -> QuadFieldElem {
        self.c.last().cloned().unwrap_or_else(|| QuadFieldElem::zero(self.d))
    }

    pub fn coeff(&self, i: usize) -> QuadFieldElem {
        self.c.get(i).cloned().unwrap_or_else(|| QuadFieldElem::zero(self.d))
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new(self.d, (0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new(self.d, (0..n).map(|i| &self.coeff(i) - &o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.d);
        }
        let mut c = vec![QuadFieldElem::zero(self.d); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = &c[i + j] + &(a * b);
            }
        }
        Self::new(self.d, c)
    }

    pub fn scale(&self, s: &QuadFieldElem) -> Self {
        Self::new(self.d, self.c.iter().map(|a| a * s).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(QuadFieldElem::one(self.d));
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn product<'a>(d: i64, it: impl IntoIterator<Item = &'a KPoly>) -> Self {
        it.into_iter().fold(Self::constant(QuadFieldElem::one(d)), |a, b| a.mul(b))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.d,
            self.c.iter().enumerate().skip(1).map(|(i, a)| a.scale(&Rational::from(i as u64))).collect(),
        )
    }

    pub fn conj(&self) -> Self {
        Self::new(self.d, self.c.iter().map(|a| a.conj()).collect())
    }

    pub fn monic(&self) -> Result<Self> {
        let l = self.lead().inv()?;
        Ok(self.scale(&l))
    }

    pub fn divrem(&self, div: &Self) -> Result<(Self, Self)> {
        if div.is_zero() {
            return Err(Error::DomainError("polynomial division by zero".into()));
        }
        let li = div.lead().inv()?;
        let mut r = self.clone();
        let dd = div.degree();
        let mut q = vec![QuadFieldElem::zero(self.d); self.c.len().saturating_sub(dd).max(1)];
        while !r.is_zero() && r.degree() >= dd {
            let s = r.degree() - dd;
            let t = &r.lead() * &li;
            let mut sub = vec![QuadFieldElem::zero(self.d); s];
            sub.extend(div.c.iter().map(|a| a * &t));
            q[s] = t;
            // exact arithmetic, so the leading term cancels and the degree drops
            r = r.sub(&Self::new(self.d, sub));
        }
        Ok((Self::new(self.d, q), r))
    }

    pub fn rem(&self, div: &Self) -> Result<Self> {
        Ok(self.divrem(div)?.1)
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Self) -> Result<Self> {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return Ok(a);
        }
        a.monic()
    }

    pub fn eval_exact(&self, x: &QuadFieldElem) -> QuadFieldElem {
        let mut acc = QuadFieldElem::zero(self.d);
        for a in self.c.iter().rev() {
            acc = &(&acc * x) + a;
        }
        acc
    }

    /// Horner evaluation with √d ↦ +√d.
    pub fn eval(&self, x: &BigComplex) -> BigComplex {
        let p = x.prec();
        let mut acc = BigComplex::zero(p);
        for a in self.c.iter().rev() {
            acc = &(&acc * x) + &a.eval_c(p);
        }
        acc
    }

    /// Σ g(r) over the roots of `self` (monic, squarefree), exactly.
    ///
    /// Uses Σ g(r)/(x - r) = (g·ψ' mod ψ)/ψ and reads the x^{n-1} coefficient.
    pub fn root_trace(&self, g: &Self) -> Result<QuadFieldElem> {
        let n = self.degree();
        if self.is_zero() || n == 0 {
            return Ok(QuadFieldElem::zero(self.d));
        }
        let t = g.mul(&self.derivative()).rem(self)?;
        Ok(t.coeff(n - 1))
    }
}

impl fmt::Display for KPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({a})")?,
                1 => write!(f, "({a})X")?,
                _ => write!(f, "({a})X^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for KPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// num/den over ℚ(√d).
#[derive(Clone, Debug, Serialize)]
pub struct RatFn {
    pub num: KPoly,
    pub den: KPoly,
}

impl RatFn {
    pub fn new(num: KPoly, den: KPoly) -> Self {
        RatFn { num, den }
    }

    pub fn derivative(&self) -> Self {
        let n = self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()));
        RatFn { num: n, den: self.den.mul(&self.den) }
    }

    pub fn conj(&self) -> Self {
        RatFn { num: self.num.conj(), den: self.den.conj() }
    }

    pub fn eval(&self, x: &BigComplex) -> BigComplex {
        &self.num.eval(x) / &self.den.eval(x)
    }

    /// Same function, compared by cross-multiplication.
    pub fn same_as(&self, o: &Self) -> bool {
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }

    /// s·f + t
    pub fn affine(&self, s: &QuadFieldElem, t: &QuadFieldElem) -> Self {
        RatFn { num: self.num.scale(s).add(&self.den.scale(t)), den: self.den.clone() }
    }
}
