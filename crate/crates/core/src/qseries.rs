//! Exact truncated q-expansions.
//!
//! A [`PowerSeriesZ`] stores `Σ c_n q^{base/24 + n}` for `0 ≤ n < order` with
//! integer numerators over one common denominator. Exponents outside the
//! window are unknown, never zero.

use crate::error::{Error, Result};
use crate::quadforms::{chi_m4, prime_factors};
use rug::{Assign, Integer, Rational};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeriesZ {
    /// Leading exponent times 24.
    pub base24: i64,
    pub coeffs: Vec<Integer>,
    /// Positive common denominator.
    pub denom: Integer,
}

impl PowerSeriesZ {
    pub fn from_integers(base24: i64, coeffs: Vec<Integer>) -> Self {
        PowerSeriesZ { base24, coeffs, denom: Integer::from(1) }
    }

    pub fn from_i64(base24: i64, c: &[i64]) -> Self {
        Self::from_integers(base24, c.iter().map(|&v| Integer::from(v)).collect())
    }

    /// Number of known coefficients.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    fn normalized(mut self) -> Self {
        let mut g = self.denom.clone();
        for c in &self.coeffs {
            if g == 1 {
                break;
            }
            g.gcd_mut(c);
        }
        if g != 1 && g != 0 {
            for c in self.coeffs.iter_mut() {
                c.div_exact_mut(&g);
            }
            self.denom.div_exact_mut(&g);
        }
        self
    }

    pub fn is_integral(&self) -> bool {
        self.denom == 1
    }

    pub fn require_integral(self) -> Result<Self> {
        if self.is_integral() {
            Ok(self)
        } else {
            Err(Error::NonIntegralCoefficients(format!("common denominator {}", self.denom)))
        }
    }

    /// Coefficient of q^{e24/24}; None when outside the known window or off grid.
    pub fn coeff24(&self, e24: i64) -> Option<Rational> {
        let d = e24 - self.base24;
        if d < 0 {
            return if d % 24 == 0 { Some(Rational::new()) } else { None };
        }
        if d % 24 != 0 {
            return None;
        }
        let n = (d / 24) as usize;
        self.coeffs.get(n).map(|c| Rational::from((c.clone(), self.denom.clone())))
    }

    /// Coefficient of q^n for an integer exponent.
    pub fn coeff(&self, n: i64) -> Option<Rational> {
        self.coeff24(24 * n)
    }

    /// Coefficients c_0..c_{N-1} indexed by exponent, N the first unknown
    /// exponent. Fails off the integer grid.
    pub fn integer_coeffs(&self) -> Result<Vec<Rational>> {
        if self.base24 % 24 != 0 {
            return Err(Error::DomainError(format!("exponents are in {}/24 + Z", self.base24)));
        }
        let shift = self.base24 / 24;
        let top = shift + self.order() as i64;
        Ok((0..top.max(0)).map(|n| self.coeff(n).unwrap_or_default()).collect())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let (num, den) = r.clone().into_numer_denom();
        PowerSeriesZ {
            base24: self.base24,
            coeffs: self.coeffs.iter().map(|c| Integer::from(c * &num)).collect(),
            denom: Integer::from(&self.denom * &den),
        }
        .normalized()
    }

    pub fn neg(&self) -> Self {
        self.scale(&Rational::from(-1))
    }

    /// Sum; the result is known up to the smaller of the two windows.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.base24 - other.base24) % 24 != 0 {
            return Err(Error::DomainError("series live on different exponent grids".into()));
        }
        let base = self.base24.min(other.base24);
        let end = (self.base24 + 24 * self.order() as i64).min(other.base24 + 24 * other.order() as i64);
        let len = ((end - base) / 24).max(0) as usize;
        let den = Integer::from(self.denom.lcm_ref(&other.denom));
        let fa = Integer::from(&den / &self.denom);
        let fb = Integer::from(&den / &other.denom);
        let mut coeffs = vec![Integer::new(); len];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let e = base + 24 * i as i64;
            let ia = (e - self.base24) / 24;
            if ia >= 0 {
                *c += Integer::from(&self.coeffs[ia as usize] * &fa);
            }
            let ib = (e - other.base24) / 24;
            if ib >= 0 {
                *c += Integer::from(&other.coeffs[ib as usize] * &fb);
            }
        }
        Ok(PowerSeriesZ { base24: base, coeffs, denom: den }.normalized())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Product, known to min(order) terms.
    pub fn mul(&self, other: &Self) -> Self {
        let len = self.order().min(other.order());
        let mut coeffs = vec![Integer::new(); len];
        for (i, a) in self.coeffs.iter().take(len).enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(len - i).enumerate() {
                if *b != 0 {
                    coeffs[i + j] += Integer::from(a * b);
                }
            }
        }
        PowerSeriesZ {
            base24: self.base24 + other.base24,
            coeffs,
            denom: Integer::from(&self.denom * &other.denom),
        }
        .normalized()
    }

    /// Inverse of a series whose leading coefficient is a unit (±1 over 1).
    pub fn inverse(&self) -> Result<Self> {
        let lead = self.coeffs.first().ok_or_else(|| Error::DomainError("empty series".into()))?;
        if !self.is_integral() || (*lead != 1 && *lead != -1) {
            return Err(Error::DomainError("leading coefficient is not a unit".into()));
        }
        let u = lead.clone();
        let n = self.order();
        let mut inv = vec![Integer::new(); n];
        inv[0] = u.clone();
        for k in 1..n {
            let mut s = Integer::new();
            for j in 1..=k {
                if self.coeffs[j] != 0 {
                    s += Integer::from(&self.coeffs[j] * &inv[k - j]);
                }
            }
            inv[k] = -(s * &u);
        }
        Ok(PowerSeriesZ::from_integers(-self.base24, inv))
    }

    /// q → q^d.
    pub fn dilate(&self, d: u32) -> Self {
        let d = d as usize;
        if d == 1 {
            return self.clone();
        }
        // unknown coefficients start at d times the old window
        let len = self.order() * d;
        let mut coeffs = vec![Integer::new(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * d] = c.clone();
        }
        PowerSeriesZ { base24: self.base24 * d as i64, coeffs, denom: self.denom.clone() }
    }

    /// Keeps the first `n` known coefficients.
    pub fn truncate(&self, n: usize) -> Self {
        let mut s = self.clone();
        s.coeffs.truncate(n);
        s
    }

    /// Human-readable head, e.g. "q - 3*q^9 + 2*q^17 + O(q^20)".
    pub fn display_terms(&self, max_terms: usize) -> String {
        let mut out = String::new();
        let mut shown = 0;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            if shown == max_terms {
                break;
            }
            let r = Rational::from((c.clone(), self.denom.clone()));
            let neg = r < 0;
            let a = Rational::from(r.abs_ref());
            let e = self.base24 + 24 * i as i64;
            let mono = if e == 0 {
                String::new()
            } else if e == 24 {
                "q".into()
            } else if e % 24 == 0 {
                format!("q^{}", e / 24)
            } else {
                format!("q^({e}/24)")
            };
            let body = match (a == 1, mono.is_empty()) {
                (true, false) => mono,
                (_, true) => a.to_string(),
                (false, false) => format!("{a}*{mono}"),
            };
            if shown == 0 {
                out.push_str(if neg { "-" } else { "" });
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
            shown += 1;
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

#[derive(Serialize)]
struct SeriesJson {
    base_exponent: String,
    coefficients: Vec<String>,
    order: usize,
}

impl Serialize for PowerSeriesZ {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let b = Rational::from((self.base24, 24));
        SeriesJson {
            base_exponent: b.to_string(),
            coefficients: self
                .coeffs
                .iter()
                .map(|c| Rational::from((c.clone(), self.denom.clone())).to_string())
                .collect(),
            order: self.order(),
        }
        .serialize(s)
    }
}

/// ∏ η(mτ)^{r_m}
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaQuotient {
    pub factors: Vec<(u32, i32)>,
}

impl EtaQuotient {
    pub fn new(factors: &[(u32, i32)]) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for &(m, _) in factors {
            if m == 0 || !seen.insert(m) {
                return Err(Error::DomainError(format!("eta divisors must be distinct and positive, got {m}")));
            }
        }
        Ok(EtaQuotient { factors: factors.to_vec() })
    }

    /// Leading exponent times 24.
    pub fn base24(&self) -> i64 {
        self.factors.iter().map(|&(m, r)| m as i64 * r as i64).sum()
    }
}

/// q^{1/24} ∏ (1 - q^n) by the pentagonal number theorem.
pub fn eta_expansion(order: usize) -> PowerSeriesZ {
    let mut c = vec![Integer::new(); order.max(1)];
    c[0] = Integer::from(1);
    let mut k = 1i64;
    loop {
        let p1 = (k * (3 * k - 1) / 2) as usize;
        if p1 >= order {
            break;
        }
        let s = if k % 2 == 0 { 1 } else { -1 };
        c[p1] += s;
        let p2 = (k * (3 * k + 1) / 2) as usize;
        if p2 < order {
            c[p2] += s;
        }
        k += 1;
    }
    PowerSeriesZ::from_integers(1, c)
}

/// Exact expansion of an eta quotient with `order` known terms.
///
/// Each factor (1-q^{mn}) product is sparse by the pentagonal number
/// theorem, so positive powers are sparse multiplications and negative
/// powers sparse divisions, O(order·√order) apiece.
pub fn eta_quotient_expansion(eq: &EtaQuotient, order: usize) -> PowerSeriesZ {
    let order = order.max(1);
    // (exponent, sign) of ∏(1-q^n) below `order`
    let mut pent = Vec::new();
    let mut k = 1i64;
    loop {
        let s = if k % 2 == 0 { 1 } else { -1 };
        let p1 = (k * (3 * k - 1) / 2) as usize;
        if p1 >= order {
            break;
        }
        pent.push((p1, s));
        let p2 = (k * (3 * k + 1) / 2) as usize;
        if p2 < order {
            pent.push((p2, s));
        }
        k += 1;
    }
    let mut a = vec![Integer::new(); order];
    a[0] = Integer::from(1);
    let mut tmp = Integer::new();
    // multiplications first keep the intermediates small
    let mut factors = eq.factors.clone();
    factors.sort_by_key(|&(_, r)| std::cmp::Reverse(r));
    for &(m, r) in &factors {
        let m = m as usize;
        for _ in 0..r.unsigned_abs() {
            if r > 0 {
                // a ← a·E(q^m), from the top down
                for n in (1..order).rev() {
                    for &(e, s) in &pent {
                        let off = e * m;
                        if off > n {
                            break;
                        }
                        if a[n - off] != 0 {
                            tmp.assign(&a[n - off] * s);
                            a[n] += &tmp;
                        }
                    }
                }
            } else {
                // a ← a/E(q^m): b_n = a_n - Σ s_j b_{n - m e_j}
                for n in 1..order {
                    for &(e, s) in &pent {
                        let off = e * m;
                        if off > n {
                            break;
                        }
                        if a[n - off] != 0 {
                            tmp.assign(&a[n - off] * s);
                            a[n] -= &tmp;
                        }
                    }
                }
            }
        }
    }
    PowerSeriesZ::from_integers(eq.base24(), a)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Modularity {
    /// Weight as a rational string, e.g. "2" or "1/2".
    pub weight: String,
    pub level: u64,
    pub character_discriminant: i64,
}

fn lcm(a: u64, b: u64) -> u64 {
    a / crate::quadforms::gcd(a as i64, b as i64) as u64 * b
}

/// Weight, least level and character of an eta quotient, or None when no
/// level up to `max_level` satisfies both congruences (or the weight is not
/// integral).
pub fn eta_quotient_modularity(eq: &EtaQuotient, max_level: u64) -> Option<Modularity> {
    let twice_k: i64 = eq.factors.iter().map(|&(_, r)| r as i64).sum();
    if twice_k % 2 != 0 {
        return None;
    }
    let k = twice_k / 2;
    let n = eq.factors.iter().fold(1u64, |acc, &(m, _)| lcm(acc, m as u64));
    if eq.base24() % 24 != 0 {
        return None;
    }
    let mut level = None;
    let mut m = n;
    while m <= max_level {
        let s: i64 = eq.factors.iter().map(|&(d, r)| (m / d as u64) as i64 * r as i64).sum();
        if s % 24 == 0 {
            level = Some(m);
            break;
        }
        m += n;
    }
    let level = level?;
    // χ(d) = ((-1)^k P / d) with P = ∏ m^{r_m}; the symbol depends only on
    // the squarefree part of (-1)^k P
    let mut sign = if k % 2 == 0 { 1i64 } else { -1 };
    let mut sqf = 1i64;
    let mut primes = std::collections::BTreeMap::<i64, i64>::new();
    for &(m, r) in &eq.factors {
        let mut mm = m as i64;
        for p in prime_factors(mm) {
            let mut e = 0;
            while mm % p == 0 {
                mm /= p;
                e += 1;
            }
            *primes.entry(p).or_default() += e * r as i64;
        }
    }
    for (p, e) in primes {
        if e.rem_euclid(2) == 1 {
            sqf *= p;
        }
    }
    if sqf < 0 {
        sign = -sign;
        sqf = -sqf;
    }
    let s = sign * sqf;
    let disc = if s.rem_euclid(4) == 1 { s } else { 4 * s };
    Some(Modularity { weight: k.to_string(), level, character_discriminant: disc })
}

/// Σ scale·χ₋₄(slot)·(αm + βn) q^{Am² + Bmn + Cn²}
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaSpec {
    pub form: (i64, i64, i64),
    /// Linear form coefficients (α, β) as "p/q" strings.
    pub alpha: String,
    pub beta: String,
    pub char_slot: CharSlot,
    pub scale: String,
    #[serde(default)]
    pub parity: Option<(u8, u8)>,
}

/// Which variable χ₋₄ reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CharSlot {
    M,
    N,
}

impl ThetaSpec {
    pub fn new(form: (i64, i64, i64), alpha: i64, beta: i64, scale: (i64, i64)) -> Self {
        ThetaSpec {
            form,
            alpha: alpha.to_string(),
            beta: beta.to_string(),
            char_slot: CharSlot::N,
            scale: Rational::from(scale).to_string(),
            parity: None,
        }
    }

    /// Restricts to m ≡ pm, n ≡ pn (mod 2).
    pub fn with_parity(mut self, pm: u8, pn: u8) -> Self {
        self.parity = Some((pm, pn));
        self
    }

    pub fn rationals(&self) -> Result<(Rational, Rational, Rational)> {
        let p = |s: &str| s.parse::<Rational>().map_err(|e| Error::Parse(format!("{s}: {e}")));
        Ok((p(&self.alpha)?, p(&self.beta)?, p(&self.scale)?))
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b, c) = self.form;
        if a <= 0 || b * b - 4 * a * c >= 0 {
            return Err(Error::DomainError(format!("form ({a},{b},{c}) is not positive definite")));
        }
        self.rationals().map(|_| ())
    }
}

/// Exact theta expansion for exponents 0..order. The result may carry a
/// denominator; use [`PowerSeriesZ::require_integral`] to insist on integers.
pub fn theta_expansion(spec: &ThetaSpec, order: usize) -> Result<PowerSeriesZ> {
    spec.validate()?;
    let (alpha, beta, scale) = spec.rationals()?;
    let (a, b, c) = spec.form;
    let d = 4 * a * c - b * b;
    let bound = order as i64 - 1;
    // m range from the ellipse: Q ≥ (d/4c) m²
    let mmax = ((4 * c * bound) as f64 / d as f64).sqrt().floor() as i64 + 1;
    // αm + βn with a common denominator
    let den = Integer::from(alpha.denom().lcm_ref(beta.denom()));
    let al = Integer::from(alpha.numer() * Integer::from(&den / alpha.denom()));
    let be = Integer::from(beta.numer() * Integer::from(&den / beta.denom()));
    let al = al.to_i64().ok_or_else(|| Error::DomainError("alpha too large".into()))?;
    let be = be.to_i64().ok_or_else(|| Error::DomainError("beta too large".into()))?;
    let mut acc = vec![0i64; order];
    for m in -mmax..=mmax {
        if let Some((pm, _)) = spec.parity {
            if m.rem_euclid(2) != pm as i64 {
                continue;
            }
        }
        // c n² + b m n + a m² - bound ≤ 0
        let qa = c as f64;
        let qb = (b * m) as f64;
        let qc = (a * m * m - bound) as f64;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            continue;
        }
        let sq = disc.sqrt();
        let lo = ((-qb - sq) / (2.0 * qa)).floor() as i64 - 1;
        let hi = ((-qb + sq) / (2.0 * qa)).ceil() as i64 + 1;
        for n in lo..=hi {
            let q = a * m * m + b * m * n + c * n * n;
            if q < 0 || q > bound {
                continue;
            }
            if let Some((_, pn)) = spec.parity {
                if n.rem_euclid(2) != pn as i64 {
                    continue;
                }
            }
            let ch = match spec.char_slot {
                CharSlot::N => chi_m4(n),
                CharSlot::M => chi_m4(m),
            };
            if ch == 0 {
                continue;
            }
            acc[q as usize] += ch * (al * m + be * n);
        }
    }
    let (sn, sd) = scale.into_numer_denom();
    let coeffs = acc.into_iter().map(|v| Integer::from(v) * &sn).collect();
    Ok(PowerSeriesZ { base24: 0, coeffs, denom: sd * den }.normalized())
}

/// ⌈k · N ∏_{p|N}(1 + 1/p) / 12⌉
pub fn sturm_bound(level: u64, weight: u64) -> u64 {
    let mut idx = level;
    for p in prime_factors(level as i64) {
        idx = idx / p as u64 * (p as u64 + 1);
    }
    (weight * idx).div_ceil(12)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SturmResult {
    pub equal: bool,
    pub first_mismatch: Option<i64>,
    pub bound: u64,
}

/// Exact equality of integer-exponent coefficients 0..=bound.
pub fn sturm_compare(lhs: &PowerSeriesZ, rhs: &PowerSeriesZ, level: u64, weight: u64) -> Result<SturmResult> {
    let bound = sturm_bound(level, weight);
    let l = lhs.integer_coeffs()?;
    let r = rhs.integer_coeffs()?;
    let need = bound as usize + 1;
    let have = l.len().min(r.len());
    if have < need {
        return Err(Error::TruncationTooShort { needed: need, have });
    }
    let first_mismatch = (0..need).find(|&i| l[i] != r[i]).map(|i| i as i64);
    Ok(SturmResult { equal: first_mismatch.is_none(), first_mismatch, bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    // q F'/F = Σ c_k q^k with c_k = -Σ_{m|k} m r_m σ(k/m), so n a_n = Σ c_k a_{n-k}
    fn log_derivative_expansion(eq: &EtaQuotient, order: usize) -> Vec<Integer> {
        let mut sig = vec![0i64; order + 1];
        for d in 1..=order {
            for k in (d..=order).step_by(d) {
                sig[k] += d as i64;
            }
        }
        let c: Vec<i64> = (0..order)
            .map(|k| {
                if k == 0 {
                    return 0;
                }
                eq.factors
                    .iter()
                    .filter(|&&(m, _)| k % m as usize == 0)
                    .map(|&(m, r)| -(m as i64) * r as i64 * sig[k / m as usize])
                    .sum()
            })
            .collect();
        let mut a = vec![Integer::new(); order];
        a[0] = Integer::from(1);
        for n in 1..order {
            let mut s = Integer::new();
            for k in 1..=n {
                s += Integer::from(&a[n - k] * c[k]);
            }
            s.div_exact_mut(&Integer::from(n));
            a[n] = s;
        }
        a
    }

    #[test]
    fn sparse_expansion_matches_log_derivative() {
        for f in [vec![(8, 8), (4, -2), (16, -2)], vec![(4, 2), (8, 2)], vec![(1, -1)], vec![(2, 5), (1, -2), (4, -2)], vec![(1, 24)]] {
            let eq = EtaQuotient::new(&f).unwrap();
            let s = eta_quotient_expansion(&eq, 300);
            assert_eq!(s.coeffs, log_derivative_expansion(&eq, 300), "{f:?}");
        }
    }
    use proptest::prelude::*;

    fn brute_product(n: usize) -> Vec<i64> {
        let mut p = vec![0i64; n];
        p[0] = 1;
        for k in 1..n {
            for i in (k..n).rev() {
                p[i] -= p[i - k];
            }
        }
        p
    }

    fn ints(s: &PowerSeriesZ, upto: usize) -> Vec<i64> {
        s.integer_coeffs().unwrap()[..upto].iter().map(|r| r.numer().to_i64().unwrap()).collect()
    }

    fn f64_form() -> EtaQuotient {
        EtaQuotient::new(&[(8, 8), (4, -2), (16, -2)]).unwrap()
    }

    fn f32_form() -> EtaQuotient {
        EtaQuotient::new(&[(4, 2), (8, 2)]).unwrap()
    }

    #[test]
    fn pentagonal() {
        let e = eta_expansion(13);
        assert_eq!(e.base24, 1);
        let want = [1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1];
        assert_eq!(e.coeffs.iter().map(|c| c.to_i64().unwrap()).collect::<Vec<_>>(), want);
        // 15 is the pentagonal number 3(3·3+1)/2, so the sign is (-1)^3
        let e = eta_expansion(16);
        let b = brute_product(16);
        assert_eq!(e.coeffs[15], b[15]);
        assert_eq!(e.coeffs[15], -1);
        assert_eq!(e.coeffs[3], 0);
    }

    #[test]
    fn pentagonal_matches_brute_product() {
        let e = eta_expansion(201);
        let b = brute_product(201);
        for n in 0..201 {
            assert_eq!(e.coeffs[n], b[n], "n={n}");
        }
    }

    #[test]
    fn lambda_quotient() {
        let eq = EtaQuotient::new(&[(1, 8), (2, -24), (4, 16)]).unwrap();
        let s = eta_quotient_expansion(&eq, 6).scale(&Rational::from(16));
        assert_eq!(ints(&s, 5), [0, 16, -128, 704, -3072]);
    }

    #[test]
    fn f64_and_f32() {
        let a = eta_quotient_expansion(&f64_form(), 30);
        let want64 = [(1, 1), (5, 2), (9, -3), (13, -6), (17, 2), (25, -1)];
        for (n, c) in want64 {
            assert_eq!(a.coeff(n).unwrap(), c);
        }
        let b = eta_quotient_expansion(&f32_form(), 30);
        let want32 = [(1, 1), (5, -2), (9, -3), (13, 6), (17, 2), (25, -1)];
        for (n, c) in want32 {
            assert_eq!(b.coeff(n).unwrap(), c);
        }
        // nothing printed between the listed exponents
        for n in [2, 3, 4, 6, 7, 8, 21] {
            assert_eq!(a.coeff(n).unwrap(), 0);
            assert_eq!(b.coeff(n).unwrap(), 0);
        }
    }

    #[test]
    fn eta_quotient_equals_product_of_powers() {
        // oracle: multiply individual dilated eta series
        let eq = EtaQuotient::new(&[(2, 3), (3, -1), (6, 2)]).unwrap();
        let n = 40;
        let mut prod = PowerSeriesZ::from_i64(0, &vec![1; 1].into_iter().chain(vec![0; n - 1]).collect::<Vec<_>>());
        for &(m, r) in &eq.factors {
            let e = eta_expansion(n).dilate(m).truncate(n);
            let f = if r > 0 { e } else { e.inverse().unwrap() };
            for _ in 0..r.abs() {
                prod = prod.mul(&f);
            }
        }
        let direct = eta_quotient_expansion(&eq, n);
        assert_eq!(direct.base24, prod.base24);
        assert_eq!(direct.coeffs, prod.coeffs);
    }

    #[test]
    fn modularity() {
        let l = eta_quotient_modularity(&EtaQuotient::new(&[(1, 8), (2, -24), (4, 16)]).unwrap(), 10_000).unwrap();
        assert_eq!((l.weight.as_str(), l.level), ("0", 4));
        let f = eta_quotient_modularity(&f32_form(), 10_000).unwrap();
        assert_eq!((f.weight.as_str(), f.level), ("2", 32));
        assert_eq!(f.character_discriminant, 1);
        let g = eta_quotient_modularity(&f64_form(), 10_000).unwrap();
        assert_eq!((g.weight.as_str(), g.level), ("2", 64));
        assert!(eta_quotient_modularity(&EtaQuotient::new(&[(1, 1)]).unwrap(), 10_000).is_none());
        // Δ = η^24 has level 1
        let d = eta_quotient_modularity(&EtaQuotient::new(&[(1, 24)]).unwrap(), 10).unwrap();
        assert_eq!((d.weight.as_str(), d.level), ("12", 1));
    }

    #[test]
    fn theta_examples() {
        let t = theta_expansion(&ThetaSpec::new((16, 0, 1), 0, 1, (1, 2)), 60).unwrap().require_integral().unwrap();
        for (n, c) in [(1, 1), (9, -3), (17, 2), (25, -1), (41, 10), (49, -7)] {
            assert_eq!(t.coeff(n).unwrap(), c);
        }
        for n in [2, 5, 13, 33, 37] {
            assert_eq!(t.coeff(n).unwrap(), 0);
        }
        let t = theta_expansion(&ThetaSpec::new((16, 16, 5), 8, 5, (1, 4)), 90).unwrap();
        let nz: Vec<(i64, i64)> = (0..90)
            .filter_map(|n| {
                let c = t.coeff(n).unwrap();
                (c != 0).then(|| (n, c.numer().to_i64().unwrap()))
            })
            .collect();
        assert_eq!(&nz[..8], &[(5, 1), (13, -3), (29, 5), (37, 1), (45, -3), (53, -7), (61, 5), (85, 2)]);
        let g = theta_expansion(&ThetaSpec::new((2, 0, 1), 0, 1, (1, 4)).with_parity(1, 1), 50).unwrap();
        let nz: Vec<(i64, i64)> = (0..50)
            .filter_map(|n| {
                let c = g.coeff(n).unwrap();
                (c != 0).then(|| (n, c.numer().to_i64().unwrap()))
            })
            .collect();
        assert_eq!(nz, [(3, 1), (11, -3), (19, 1), (27, 2), (43, 5)]);
    }

    #[test]
    fn non_integral_is_reported() {
        let t = theta_expansion(&ThetaSpec::new((1, 0, 1), 0, 1, (1, 3)), 10).unwrap();
        assert!(matches!(t.require_integral(), Err(Error::NonIntegralCoefficients(_))));
    }

    #[test]
    fn sturm() {
        assert_eq!(sturm_bound(64, 2), 16);
        assert_eq!(sturm_bound(32, 2), 8);
        assert_eq!(sturm_bound(1, 12), 1);
        let f64s = eta_quotient_expansion(&f64_form(), 40);
        let f32s = eta_quotient_expansion(&f32_form(), 40);
        let t1 = theta_expansion(&ThetaSpec::new((16, 0, 1), 0, 1, (1, 2)), 40).unwrap();
        let t2 = theta_expansion(&ThetaSpec::new((16, 16, 5), 8, 5, (1, 4)), 40).unwrap();
        let half = Rational::from((1, 2));
        let quarter = Rational::from((1, 4));
        let r1 = f64s.add(&f32s).unwrap().scale(&half);
        let r2 = f64s.sub(&f32s).unwrap().scale(&quarter);
        assert!(sturm_compare(&t1, &r1, 64, 2).unwrap().equal);
        assert!(sturm_compare(&t2, &r2, 64, 2).unwrap().equal);
        let r = sturm_compare(&f64s, &f32s, 64, 2).unwrap();
        assert_eq!(r.first_mismatch, Some(5));
        let short = f64s.truncate(10);
        assert!(matches!(sturm_compare(&short, &f32s, 64, 2), Err(Error::TruncationTooShort { .. })));
    }

    #[test]
    fn series_json_shape() {
        let v = serde_json::to_value(eta_expansion(3)).unwrap();
        assert_eq!(v["base_exponent"], "1/24");
        assert_eq!(v["order"], 3);
        assert_eq!(v["coefficients"], serde_json::json!(["1", "-1", "-1"]));
    }

    fn small_series() -> impl Strategy<Value = PowerSeriesZ> {
        (0i64..3, proptest::collection::vec(-50i64..50, 12)).prop_map(|(b, c)| PowerSeriesZ::from_i64(24 * b, &c))
    }

    proptest! {
        #[test]
        fn mul_commutes_and_associates(a in small_series(), b in small_series(), c in small_series()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn theta_independent_of_enumeration(a in 1i64..20, b in -10i64..10, c in 1i64..20, al in -3i64..3, be in -3i64..3) {
            prop_assume!(b * b - 4 * a * c < 0);
            let s = ThetaSpec::new((a, b, c), al, be, (1, 1));
            let t = theta_expansion(&s, 60).unwrap();
            // oracle: plain box enumeration
            let mut acc = vec![0i64; 60];
            for m in -40i64..=40 {
                for n in -40i64..=40 {
                    let q = a * m * m + b * m * n + c * n * n;
                    if (0..60).contains(&q) {
                        acc[q as usize] += chi_m4(n) * (al * m + be * n);
                    }
                }
            }
            for (n, v) in acc.iter().enumerate() {
                prop_assert_eq!(t.coeff(n as i64).unwrap(), *v);
            }
        }
    }
}
