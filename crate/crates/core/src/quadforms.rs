//! Positive definite binary quadratic forms, class numbers and CM points.

use crate::error::{Error, Result};
use crate::numerics::BigComplex;
use rug::{Float, Rational};
use serde::Serialize;
use std::fmt;

/// The form a x² + b x y + c y², also read as the CM point τ with
/// a τ² + b τ + c = 0 and Im τ > 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

pub type CmPoint = QuadForm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DiscriminantRecord {
    pub d: i64,
    pub h: u64,
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl QuadForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn content(&self) -> i64 {
        gcd(gcd(self.a, self.b), self.c)
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0 && self.disc() < 0
    }

    /// Divides by the content and makes `a` positive.
    pub fn primitive(&self) -> Self {
        let g = self.content().max(1);
        let s = if self.a < 0 { -g } else { g };
        QuadForm::new(self.a / s, self.b / s, self.c / s)
    }

    pub fn is_reduced(&self) -> bool {
        let QuadForm { a, b, c } = *self;
        b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    /// Gauss reduction. The form must be positive definite.
    pub fn reduce(&self) -> Self {
        let QuadForm { mut a, mut b, mut c } = *self;
        debug_assert!(self.is_positive_definite());
        loop {
            // translate b into (-a, a]
            if b > a || b <= -a {
                let two_a = 2 * a;
                let k = (a - b).div_euclid(two_a);
                // b + 2ak lands in (-a, a]
                let nb = b + two_a * k;
                c += k * b + a * k * k;
                b = nb;
            }
            if a > c {
                (a, c) = (c, a);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            return QuadForm::new(a, b, c);
        }
    }

    /// The root τ = (-b + √D)/(2a) in the upper half plane.
    pub fn tau(&self, prec: u32) -> BigComplex {
        let d = self.disc();
        let two_a = Float::with_val(prec, 2 * self.a);
        let re = Float::with_val(prec, -self.b) / &two_a;
        let im = Float::with_val(prec, -d).sqrt() / &two_a;
        BigComplex::from_parts(re, im)
    }

    pub fn tau_f64(&self) -> (f64, f64) {
        let d = self.disc() as f64;
        let a2 = 2.0 * self.a as f64;
        (-(self.b as f64) / a2, (-d).sqrt() / a2)
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl std::str::FromStr for QuadForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let v: Vec<i64> = t
            .split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|e| Error::Parse(format!("{s}: {e}"))))
            .collect::<Result<_>>()?;
        if v.len() != 3 {
            return Err(Error::Parse(format!("{s}: expected three integers")));
        }
        Ok(QuadForm::new(v[0], v[1], v[2]))
    }
}

pub fn reduce(f: &QuadForm) -> QuadForm {
    f.reduce()
}

fn check_disc(d: i64) -> Result<()> {
    if d >= 0 || d.rem_euclid(4) > 1 {
        return Err(Error::BadDiscriminant(d));
    }
    Ok(())
}

fn isqrt(n: i64) -> i64 {
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// All reduced primitive forms of discriminant `d`, ordered by (b, a).
pub fn reduced_forms(d: i64) -> Result<Vec<QuadForm>> {
    check_disc(d)?;
    let mut out = Vec::new();
    let bmax = isqrt(-d / 3);
    for b in -bmax..=bmax {
        if (b - d).rem_euclid(2) != 0 {
            continue;
        }
        let ac = (b * b - d) / 4;
        let a0 = b.abs().max(1);
        let mut a = a0;
        while a * a <= ac {
            if ac % a == 0 {
                let f = QuadForm::new(a, b, ac / a);
                if f.is_reduced() && f.is_primitive() {
                    out.push(f);
                }
            }
            a += 1;
        }
    }
    Ok(out)
}

/// h(D) by enumeration of reduced forms.
pub fn class_number(d: i64) -> Result<u64> {
    Ok(reduced_forms(d)?.len() as u64)
}

/// Kronecker symbol (d/p) for a prime p.
pub fn kronecker_prime(d: i64, p: i64) -> i64 {
    if p == 2 {
        return match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    let r = d.rem_euclid(p);
    if r == 0 {
        return 0;
    }
    // Euler's criterion
    let mut acc = 1i128;
    let mut base = r as i128;
    let mut e = (p - 1) / 2;
    let m = p as i128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

/// χ₋₄(n)
pub fn chi_m4(n: i64) -> i64 {
    match n.rem_euclid(4) {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

pub fn prime_factors(mut n: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut p = 2;
    n = n.abs();
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// h(m²D) from h(D) via the order formula, with h(D) computed by enumeration.
pub fn class_number_by_order_formula(d_fund: i64, m: i64) -> Result<Rational> {
    check_disc(d_fund)?;
    if m < 1 {
        return Err(Error::DomainError(format!("conductor {m} must be positive")));
    }
    let h = class_number(d_fund)?;
    let units = match (d_fund, m > 1) {
        (-3, true) => 3,
        (-4, true) => 2,
        _ => 1,
    };
    let mut r = Rational::from((h as i64 * m, units));
    for p in prime_factors(m) {
        r *= Rational::from((p - kronecker_prime(d_fund, p), p));
    }
    Ok(r)
}

/// Fundamental discriminants of class number 1.
pub const FUNDAMENTAL_H1: [i64; 9] = [-3, -4, -7, -8, -11, -19, -43, -67, -163];
/// Fundamental discriminants of class number 2.
pub const FUNDAMENTAL_H2: [i64; 18] =
    [-15, -20, -24, -35, -40, -51, -52, -88, -91, -115, -123, -148, -187, -232, -235, -267, -403, -427];

/// Every D < 0 with h(D) ≤ 2, sorted by h then by |D|.
///
/// Candidates are f²·d_K over the fundamental lists; the order formula
/// exceeds 2 once φ(f)/3 > 2, so conductors up to 18 cover everything.
/// Each record is re-checked by enumeration.
pub fn discriminants_with_h_leq_2() -> Vec<DiscriminantRecord> {
    let mut out = Vec::new();
    for &dk in FUNDAMENTAL_H1.iter().chain(FUNDAMENTAL_H2.iter()) {
        for f in 1..=18i64 {
            let h = class_number_by_order_formula(dk, f).expect("valid discriminant");
            if h <= 2 {
                let d = f * f * dk;
                let hn = h.numer().to_u64().expect("small");
                debug_assert_eq!(class_number(d).ok(), Some(hn));
                out.push(DiscriminantRecord { d, h: hn });
            }
        }
    }
    out.sort_by_key(|r| (r.h, -r.d));
    out
}

/// The primitive form satisfied by nτ.
pub fn cm_scale(p: &QuadForm, n: i64) -> QuadForm {
    QuadForm::new(p.a, n * p.b, n * n * p.c).primitive()
}

/// Standard fundamental domain with the boundary convention of reduced
/// forms: b ≥ 0 on the edges puts τ = (-b + √D)/2a on the Re τ ≤ 0 side.
pub fn in_f(tau: &BigComplex, tol: f64) -> bool {
    let (x, y) = tau.to_f64();
    if y <= 0.0 {
        return false;
    }
    let r2 = x * x + y * y;
    if x.abs() > 0.5 + tol || r2 < 1.0 - tol {
        return false;
    }
    let on_edge = (x.abs() - 0.5).abs() <= tol || (r2 - 1.0).abs() <= tol;
    !(on_edge && x > tol)
}

/// The closed region bounded by Re τ = ±1/2 and the circles |τ ∓ 1/4| = 1/4.
pub fn in_fprime(tau: &BigComplex, tol: f64) -> bool {
    let (x, y) = tau.to_f64();
    if y <= 0.0 {
        return false;
    }
    let d1 = ((x - 0.25).powi(2) + y * y).sqrt();
    let d2 = ((x + 0.25).powi(2) + y * y).sqrt();
    x.abs() <= 0.5 + tol && d1 >= 0.25 - tol && d2 >= 0.25 - tol
}

pub fn tau_of(p: &QuadForm, prec: u32) -> BigComplex {
    p.tau(prec)
}

/// Discriminant table as CSV with header `D,h`.
pub fn discriminants_csv(rows: &[DiscriminantRecord]) -> String {
    let mut s = String::from("D,h\n");
    for r in rows {
        s.push_str(&format!("{},{}\n", r.d, r.h));
    }
    s
}
