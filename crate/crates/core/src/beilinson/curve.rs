//! Weierstrass curves Y² = X³ + a2X² + a4X + a6 over ℚ(√d), Vélu isogenies,
//! isomorphisms, and a numeric group law for spot checks.

use super::field::{KPoly, QuadFieldElem, RatFn};
use crate::error::{Error, Result};
use crate::numerics::BigComplex;
use rand::Rng;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

/// How (x, y) on P_k = 0 is tied to (X, Y).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    /// x = (kX - 2Y)/(2X(X-1)), y = (kX + 2Y)/(2X(X-1)); Y² = X³ + (k²/4 - 2)X² + X.
    Plain,
    /// x = (kX - √2Y)/(X(X-2)), y = (kX + √2Y)/(X(X-2)); Y² = X³ + (k²/2 - 4)X² + 4X.
    Scaled,
}

impl Chart {
    /// c in dX/2Y = y dx/(c·x(1 - y²)).
    pub fn omega_scale(&self, prec: u32) -> Float {
        match self {
            Chart::Plain => Float::with_val(prec, 1u32),
            Chart::Scaled => Float::with_val(prec, 2u32).sqrt(),
        }
    }

    fn consts(&self, prec: u32) -> (BigComplex, BigComplex, BigComplex) {
        // (X-shift s, Y-factor t, numerator scale n): X(X - s), kX ∓ tY, over n
        let one = BigComplex::one(prec);
        match self {
            Chart::Plain => (one.clone(), BigComplex::from_real(Float::with_val(prec, 2u32)), one.scale_f64(2.0)),
            Chart::Scaled => (one.scale_f64(2.0), BigComplex::from_real(Float::with_val(prec, 2u32).sqrt()), one),
        }
    }

    /// (X, Y) from a point of P_k = 0.
    pub fn to_weierstrass(&self, x: &BigComplex, y: &BigComplex) -> (BigComplex, BigComplex) {
        let p = x.prec();
        let (s, t, n) = self.consts(p);
        // X = -s/(xy), Y = nX(X - s)(y - x)/(2t)
        let xx = -&(&s / &(x * y));
        let yy = &(&(&n * &xx) * &(&(&xx - &s) * &(y - x))) / &t.scale_f64(2.0);
        (xx, yy)
    }

    /// (x, y) on P_k = 0 from a curve point.
    pub fn from_weierstrass(&self, xx: &BigComplex, yy: &BigComplex, k: &BigComplex) -> (BigComplex, BigComplex) {
        let p = xx.prec();
        let (s, t, n) = self.consts(p);
        let den = &n * &(xx * &(xx - &s));
        let kx = k * xx;
        let ty = &t * yy;
        (&(&kx - &ty) / &den, &(&kx + &ty) / &den)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Curve {
    pub a2: QuadFieldElem,
    pub a4: QuadFieldElem,
    pub a6: QuadFieldElem,
    pub chart: Option<Chart>,
}

/// The Weierstrass model of P_k = 0 in the given chart, from k² ∈ ℚ(√d).
pub fn curve_from_k(k2: &QuadFieldElem, chart: Chart) -> Curve {
    let d = k2.d;
    let (a2, a4) = match chart {
        Chart::Plain => (&k2.scale(&Rational::from((1, 4))) - &QuadFieldElem::ints(d, 2, 0), QuadFieldElem::one(d)),
        Chart::Scaled => (&k2.scale(&Rational::from((1, 2))) - &QuadFieldElem::ints(d, 4, 0), QuadFieldElem::ints(d, 4, 0)),
    };
    Curve { a2, a4, a6: QuadFieldElem::zero(d), chart: Some(chart) }
}

impl Curve {
    pub fn new(a2: QuadFieldElem, a4: QuadFieldElem, a6: QuadFieldElem) -> Result<Self> {
        let c = Curve { a2, a4, a6, chart: None };
        if c.discriminant().is_zero() {
            return Err(Error::DomainError("singular curve".into()));
        }
        Ok(c)
    }

    pub fn d(&self) -> i64 {
        self.a2.d
    }

    /// X³ + a2X² + a4X + a6
    pub fn rhs(&self) -> KPoly {
        KPoly::new(self.d(), vec![self.a6.clone(), self.a4.clone(), self.a2.clone(), QuadFieldElem::one(self.d())])
    }

    pub fn c4(&self) -> QuadFieldElem {
        // 16a2² - 48a4
        (&self.a2 * &self.a2).scale(&Rational::from(16)).sub_ref(&self.a4.scale(&Rational::from(48)))
    }

    pub fn c6(&self) -> QuadFieldElem {
        // -64a2³ + 288a2a4 - 864a6
        let a2c = self.a2.pow(3).scale(&Rational::from(-64));
        let m = (&self.a2 * &self.a4).scale(&Rational::from(288));
        &(&a2c + &m) - &self.a6.scale(&Rational::from(864))
    }

    pub fn discriminant(&self) -> QuadFieldElem {
        (&self.c4().pow(3) - &self.c6().pow(2)).scale(&Rational::from((1, 1728)))
    }

    pub fn j_invariant(&self) -> Result<QuadFieldElem> {
        self.c4().pow(3).div(&self.discriminant())
    }

    /// Coefficients under √d ↦ -√d.
    pub fn conj(&self) -> Self {
        Curve { a2: self.a2.conj(), a4: self.a4.conj(), a6: self.a6.conj(), chart: self.chart }
    }

    pub fn same_equation(&self, o: &Self) -> bool {
        self.a2 == o.a2 && self.a4 == o.a4 && self.a6 == o.a6
    }

    pub fn numeric(&self, prec: u32) -> NumCurve {
        NumCurve { a2: self.a2.eval_c(prec), a4: self.a4.eval_c(prec), a6: self.a6.eval_c(prec) }
    }
}

trait SubRef {
    fn sub_ref(&self, o: &Self) -> Self;
}

impl SubRef for QuadFieldElem {
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
}

/// A point over ℂ.
#[derive(Clone, Debug)]
pub enum Point {
    Infinity,
    Affine(BigComplex, BigComplex),
}

/// Curve coefficients under one complex embedding.
#[derive(Clone, Debug)]
pub struct NumCurve {
    pub a2: BigComplex,
    pub a4: BigComplex,
    pub a6: BigComplex,
}

impl NumCurve {
    pub fn rhs(&self, x: &BigComplex) -> BigComplex {
        &(&(&(&(x + &self.a2) * x) + &self.a4) * x) + &self.a6
    }

    /// |Y² - f(X)| relative to the size of the terms.
    pub fn residual(&self, pt: &Point) -> f64 {
        match pt {
            Point::Infinity => 0.0,
            Point::Affine(x, y) => {
                let f = self.rhs(x);
                let scale = f.abs().to_f64().max(1.0);
                (y * y).dist(&f).to_f64() / scale
            }
        }
    }

    /// A point with X uniform in the box [-2, 2]².
    pub fn random_point<R: Rng>(&self, rng: &mut R, prec: u32) -> Point {
        let x = BigComplex::from_f64(prec, rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let y = self.rhs(&x).sqrt();
        Point::Affine(x, y)
    }

    pub fn neg(&self, p: &Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x.clone(), -y.clone()),
        }
    }

    pub fn add(&self, p: &Point, q: &Point) -> Point {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine(a, b), Point::Affine(c, d)) => (a, b, c, d),
        };
        let prec = x1.prec();
        let tiny = Float::with_val(64, Float::i_exp(1, -(prec as i32) / 2));
        let scale = x1.abs().to_f64().max(1.0);
        let lam = if x1.dist(x2).to_f64() <= tiny.to_f64() * scale {
            if (y1 + y2).abs().to_f64() <= tiny.to_f64() * scale {
                return Point::Infinity;
            }
            // (3x² + 2a2x + a4)/(2y)
            let num = &(&(x1 * x1).scale_f64(3.0) + &(&self.a2 * x1).scale_f64(2.0)) + &self.a4;
            &num / &y1.scale_f64(2.0)
        } else {
            &(y2 - y1) / &(x2 - x1)
        };
        let x3 = &(&(&lam * &lam) - &self.a2) - &(x1 + x2);
        let y3 = -&(&(&lam * &(&x3 - x1)) + y1);
        Point::Affine(x3, y3)
    }

    pub fn mul(&self, n: i64, p: &Point) -> Point {
        let mut acc = Point::Infinity;
        let mut base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut m = n.unsigned_abs();
        while m > 0 {
            if m & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            m >>= 1;
        }
        acc
    }
}

/// Distance between points, relative to coordinate size; O is far from
/// every affine point.
pub fn point_distance(p: &Point, q: &Point) -> f64 {
    match (p, q) {
        (Point::Infinity, Point::Infinity) => 0.0,
        (Point::Affine(x1, y1), Point::Affine(x2, y2)) => {
            let s = x1.abs().to_f64().max(y1.abs().to_f64()).max(1.0);
            x1.dist(x2).to_f64().max(y1.dist(y2).to_f64()) / s
        }
        _ => f64::INFINITY,
    }
}

/// (X, Y) ↦ (x_map(X), Y·y_map(X)).
#[derive(Clone, Debug, Serialize)]
pub struct Isogeny {
    pub domain: Curve,
    pub codomain: Curve,
    pub x_map: RatFn,
    pub y_map: RatFn,
    pub degree: u32,
    pub kernel: KPoly,
}

impl Isogeny {
    pub fn apply(&self, p: &Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => {
                let den = self.x_map.den.eval(x);
                let num = self.x_map.num.eval(x);
                let scale = num.abs().to_f64().max(1.0);
                if den.abs().to_f64() <= scale * 2f64.powi(-(x.prec() as i32) / 2) {
                    return Point::Infinity;
                }
                Point::Affine(&num / &den, y * &self.y_map.eval(x))
            }
        }
    }

    /// Coefficients under √d ↦ -√d.
    pub fn conj(&self) -> Self {
        Isogeny {
            domain: self.domain.conj(),
            codomain: self.codomain.conj(),
            x_map: self.x_map.conj(),
            y_map: self.y_map.conj(),
            degree: self.degree,
            kernel: self.kernel.conj(),
        }
    }

    /// c with φ*(dX/2Y) = c·dX/2Y, read off at a point: x_map'(X)/y_map(X).
    pub fn differential_ratio(&self, x: &BigComplex) -> BigComplex {
        &self.x_map.derivative().eval(x) / &self.y_map.eval(x)
    }

    /// The composite with an isomorphism on the codomain side.
    pub fn followed_by(&self, iso: &Isomorphism, target: &Curve) -> Isogeny {
        let u2 = &iso.u * &iso.u;
        let u3 = &u2 * &iso.u;
        Isogeny {
            domain: self.domain.clone(),
            codomain: target.clone(),
            x_map: self.x_map.affine(&u2, &iso.r),
            y_map: RatFn::new(self.y_map.num.scale(&u3), self.y_map.den.clone()),
            degree: self.degree,
            kernel: self.kernel.clone(),
        }
    }
}

/// Normalized Vélu isogeny (x-only Kohel form) with the given kernel polynomial.
///
/// The kernel splits into ψ₂ = gcd(ψ, f) (2-torsion) and ψ₁ = ψ/ψ₂ (pairs ±P).
/// X = x + Σ_{ψ₁}[2f'(r)/(x-r) + 4f(r)/(x-r)²] + Σ_{ψ₂} f'(r)/(x-r), with each
/// root sum Σ g(r)/(x-r) formed exactly as (g·ψ' mod ψ)/ψ.
pub fn velu_isogeny(curve: &Curve, kernel: &KPoly) -> Result<Isogeny> {
    let d = curve.d();
    if kernel.is_zero() {
        return Err(Error::KernelNotSubgroup("zero kernel polynomial".into()));
    }
    let psi = kernel.monic()?;
    let f = curve.rhs();
    let fp = f.derivative();
    let psi2 = psi.gcd(&f)?;
    let (psi1, rest) = psi.divrem(&psi2)?;
    if !rest.is_zero() || psi1.gcd(&f)?.degree() > 0 || psi1.gcd(&psi1.derivative())?.degree() > 0 {
        return Err(Error::KernelNotSubgroup(format!("{kernel} has repeated or mixed factors")));
    }
    let x = KPoly::x(d);
    let two = QuadFieldElem::ints(d, 2, 0);
    let four = QuadFieldElem::ints(d, 4, 0);
    let d1 = psi1.derivative();
    let t1 = fp.scale(&two).mul(&d1).rem(&psi1)?;
    let t2 = f.scale(&four).mul(&d1).rem(&psi1)?;
    let t3 = fp.mul(&psi2.derivative()).rem(&psi2)?;
    let p1sq = psi1.mul(&psi1);
    let den = p1sq.mul(&psi2);
    // X = x + t1/ψ1 - (t2/ψ1)' + t3/ψ2
    let num = x
        .mul(&den)
        .add(&t1.mul(&psi1).mul(&psi2))
        .sub(&t2.derivative().mul(&psi1).sub(&t2.mul(&d1)).mul(&psi2))
        .add(&t3.mul(&p1sq));
    let v = &psi1.root_trace(&fp.scale(&two))? + &psi2.root_trace(&fp)?;
    let w1 = f.scale(&four).add(&x.mul(&fp).scale(&two));
    let w = &psi1.root_trace(&w1)? + &psi2.root_trace(&x.mul(&fp))?;
    let a4 = &curve.a4 - &v.scale(&Rational::from(5));
    let a6 = &(&curve.a6 - &(&curve.a2 * &v).scale(&Rational::from(4))) - &w.scale(&Rational::from(7));
    let codomain = Curve { a2: curve.a2.clone(), a4, a6, chart: None };
    let x_map = RatFn::new(num, den);
    let y_map = x_map.derivative();
    // f·(N'D - ND')² = (N³ + a2N²D + A4ND² + A6D³)·D holds iff the kernel is a subgroup
    let (n, dd) = (&x_map.num, &x_map.den);
    let lhs = f.mul(&y_map.num).mul(&y_map.num);
    let cod = &codomain;
    let rhs = n
        .pow(3)
        .add(&n.pow(2).mul(dd).scale(&cod.a2))
        .add(&n.mul(&dd.pow(2)).scale(&cod.a4))
        .add(&dd.pow(3).scale(&cod.a6))
        .mul(dd);
    if lhs != rhs {
        return Err(Error::KernelNotSubgroup(format!("{kernel} does not cut out a subgroup")));
    }
    let degree = (2 * psi1.degree() + psi2.degree() + 1) as u32;
    Ok(Isogeny { domain: curve.clone(), codomain: codomain.clone(), x_map, y_map, degree, kernel: psi })
}

/// (X, Y) ↦ (u²X + r, u³Y).
#[derive(Clone, Debug, Serialize)]
pub struct Isomorphism {
    pub u: QuadFieldElem,
    pub r: QuadFieldElem,
}

impl Isomorphism {
    pub fn apply(&self, p: &Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => {
                let prec = x.prec();
                let u = self.u.eval_c(prec);
                let u2 = &u * &u;
                Point::Affine(&(&u2 * x) + &self.r.eval_c(prec), &(&u2 * &u) * y)
            }
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let ui = self.u.inv()?;
        let r = -&(&(&ui * &ui) * &self.r);
        Ok(Isomorphism { u: ui, r })
    }
}

/// The image of `curve` under (X, Y) ↦ (u²X + r, u³Y).
pub fn twist(curve: &Curve, u: &QuadFieldElem, r: &QuadFieldElem) -> Result<(Curve, Isomorphism)> {
    if u.is_zero() {
        return Err(Error::DomainError("u must be nonzero".into()));
    }
    let u2 = u * u;
    let u4 = &u2 * &u2;
    let u6 = &u4 * &u2;
    let b2 = &curve.a2 * &u2;
    let b4 = &curve.a4 * &u4;
    let b6 = &curve.a6 * &u6;
    let r2 = r * r;
    let r3 = &r2 * r;
    let three = Rational::from(3);
    let two = Rational::from(2);
    // Y² = (X-r)³ + b2(X-r)² + b4(X-r) + b6
    let a2 = &b2 - &r.scale(&three);
    let a4 = &(&r2.scale(&three) - &(&b2 * r).scale(&two)) + &b4;
    let a6 = &(&(&(-&r3) + &(&b2 * &r2)) - &(&b4 * r)) + &b6;
    Ok((Curve { a2, a4, a6, chart: None }, Isomorphism { u: u.clone(), r: r.clone() }))
}

/// The isomorphism from → to over ℚ(√d), with u > 0 in the real embedding.
pub fn isomorphism_between(from: &Curve, to: &Curve) -> Result<Isomorphism> {
    let d = from.d();
    let (c4f, c6f, c4t, c6t) = (from.c4(), from.c6(), to.c4(), to.c6());
    let u2 = if !c4f.is_zero() && !c6f.is_zero() {
        if c4t.is_zero() || c6t.is_zero() {
            return Err(Error::NotFound("j-invariants differ".into()));
        }
        c6t.div(&c4t)?.div(&c6f.div(&c4f)?)?
    } else if c4f.is_zero() {
        // j = 0: u⁶ = c6'/c6, and only the real cube root can lie in a real field
        real_cube_root(&c6t.div(&c6f)?).ok_or_else(|| Error::NotFound("u² is not in the field".into()))?
    } else {
        // j = 1728: u⁴ = c4'/c4
        let q = c4t.div(&c4f)?;
        let s = q.sqrt().ok_or_else(|| Error::NotFound("u⁴ has no square root in the field".into()))?;
        if s.eval(64) > 0 {
            s
        } else {
            -&s
        }
    };
    if c4t != &u2.pow(2) * &c4f || c6t != &u2.pow(3) * &c6f {
        return Err(Error::NotFound("curves are not isomorphic".into()));
    }
    let mut u = u2.sqrt().ok_or_else(|| Error::NotFound("isomorphic only over a quadratic extension".into()))?;
    if u.eval(64) < 0 {
        u = -&u;
    }
    let r = (&(&from.a2 * &u2) - &to.a2).scale(&Rational::from((1, 3)));
    let (img, iso) = twist(from, &u, &r)?;
    if !img.same_equation(to) {
        return Err(Error::NotFound("curves are not isomorphic".into()));
    }
    debug_assert_eq!(img.d(), d);
    Ok(iso)
}

/// Cube root inside ℚ(√d) recognised from both real embeddings.
fn real_cube_root(s: &QuadFieldElem) -> Option<QuadFieldElem> {
    let p = 256;
    let plus = s.eval(p).cbrt();
    let minus = s.conj().eval(p).cbrt();
    let a = Float::with_val(p, &plus + &minus) / 2u32;
    let b = Float::with_val(p, &plus - &minus) / (Float::with_val(p, s.d).sqrt() * 2u32);
    let c = QuadFieldElem::new(s.d, recognize_rational(&a)?, recognize_rational(&b)?).ok()?;
    (c.pow(3) == *s).then_some(c)
}

/// Continued-fraction reconstruction with denominators up to 10^15.
fn recognize_rational(x: &Float) -> Option<Rational> {
    let p = x.prec();
    let mut t = x.clone();
    let (mut h0, mut h1) = (rug::Integer::from(0), rug::Integer::from(1));
    let (mut k0, mut k1) = (rug::Integer::from(1), rug::Integer::from(0));
    for _ in 0..80 {
        let a = t.to_integer_round(rug::float::Round::Down)?.0;
        let h2 = rug::Integer::from(&a * &h1) + &h0;
        let k2 = rug::Integer::from(&a * &k1) + &k0;
        if k2 > 1_000_000_000_000_000u64 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = Rational::from((h1.clone(), k1.clone()));
        let err = Float::with_val(p, x - &approx).abs();
        if err < Float::with_val(p, Float::i_exp(1, -(p as i32) + 40)) {
            return Some(approx);
        }
        let frac = Float::with_val(p, &t - &a);
        if frac.is_zero() {
            return Some(approx);
        }
        t = frac.recip();
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(d: i64, u: i64, v: i64) -> QuadFieldElem {
        QuadFieldElem::ints(d, u, v)
    }

    #[test]
    fn curves_from_k() {
        let e = curve_from_k(&q(2, 272, 192), Chart::Plain);
        assert_eq!(e.a2, q(2, 66, 48));
        assert_eq!(e.a4, q(2, 1, 0));
        let e = curve_from_k(&q(3, 8, 4), Chart::Scaled);
        assert_eq!((e.a2.clone(), e.a4.clone()), (q(3, 0, 2), q(3, 4, 0)));
        let e = curve_from_k(&q(7, 2048, 768), Chart::Scaled);
        assert_eq!(e.a2, q(7, 1020, 384));
        assert!(!e.discriminant().is_zero());
    }

    #[test]
    fn charts_invert_each_other() {
        let p = 192;
        for (chart, k) in [(Chart::Plain, 3.3), (Chart::Scaled, 1.7)] {
            let k = BigComplex::from_f64(p, k, 0.0);
            let x = BigComplex::from_f64(p, 0.3, 0.8);
            let (y, _) = crate::mahler::roots_y(&x, &k);
            let (xx, yy) = chart.to_weierstrass(&x, &y);
            let (x2, y2) = chart.from_weierstrass(&xx, &yy, &k);
            assert!(x2.dist(&x) < 1e-50 && y2.dist(&y) < 1e-50);
            // and (X, Y) lies on the chart's curve
            let k2 = &k * &k;
            let a2 = match chart {
                Chart::Plain => k2.scale_f64(0.25).re - 2u32,
                Chart::Scaled => k2.scale_f64(0.5).re - 4u32,
            };
            let a4 = if chart == Chart::Plain { 1.0 } else { 4.0 };
            let nc = NumCurve {
                a2: BigComplex::from_real(a2),
                a4: BigComplex::from_f64(p, a4, 0.0),
                a6: BigComplex::zero(p),
            };
            assert!(nc.residual(&Point::Affine(xx, yy)) < 1e-50);
        }
    }

    #[test]
    fn velu_example() {
        let e = curve_from_k(&q(2, 272, 192), Chart::Plain);
        let ker = KPoly::from_ints(2, &[(0, 0), (1, 0), (1, 0)]);
        let phi = velu_isogeny(&e, &ker).unwrap();
        assert_eq!(phi.degree, 4);
        assert_eq!(phi.codomain.a4, q(2, 1276, 960));
        assert_eq!(phi.codomain.a6, q(2, 137464, 96960));
        // not a subgroup: a single non-2-torsion x-coordinate plus junk
        let bad = KPoly::from_ints(2, &[(5, 0), (1, 0)]);
        assert!(matches!(velu_isogeny(&e, &bad), Err(Error::KernelNotSubgroup(_))));
    }

    #[test]
    fn twist_examples() {
        let e = curve_from_k(&q(2, 272, 192), Chart::Plain);
        let (same, _) = twist(&e, &q(2, 1, 0), &q(2, 0, 0)).unwrap();
        assert!(same.same_equation(&e));
        let u = QuadFieldElem::ratios(2, (3, 2), (-1, 1));
        let r = QuadFieldElem::ratios(2, (-49, 2), (18, 1));
        let et = Curve::new(q(2, 66, 48), q(2, 1276, 960), q(2, 137464, 96960)).unwrap();
        let (img, iso) = twist(&et, &u, &r).unwrap();
        assert!(img.same_equation(&curve_from_k(&q(2, 272, -192), Chart::Plain)));
        let found = isomorphism_between(&et, &img).unwrap();
        assert_eq!(found.u, u);
        assert_eq!(found.r, r);
        // there and back on random points
        let inv = iso.inverse().unwrap();
        let nc = et.numeric(160);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let p = nc.random_point(&mut rng, 160);
            let back = inv.apply(&iso.apply(&p));
            assert!(point_distance(&p, &back) < 1e-40);
            assert!(img.numeric(160).residual(&iso.apply(&p)) < 1e-35);
        }
        assert!(twist(&e, &q(2, 0, 0), &q(2, 1, 0)).is_err());
    }

    #[test]
    fn group_law() {
        let e = curve_from_k(&q(2, 272, 192), Chart::Plain).numeric(160);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = e.random_point(&mut rng, 160);
        let q2 = e.random_point(&mut rng, 160);
        let lhs = e.add(&e.add(&p, &q2), &p);
        let rhs = e.add(&p, &e.add(&q2, &p));
        assert!(point_distance(&lhs, &rhs) < 1e-30);
        assert!(point_distance(&e.mul(3, &p), &e.add(&p, &e.add(&p, &p))) < 1e-30);
        assert!(matches!(e.add(&p, &e.neg(&p)), Point::Infinity));
        assert!(e.residual(&e.mul(-5, &p)) < 1e-30);
        // (0, 0) has order 2
        let t = Point::Affine(BigComplex::zero(160), BigComplex::zero(160));
        assert!(matches!(e.mul(2, &t), Point::Infinity));
    }

    #[test]
    fn cube_roots() {
        let c = QuadFieldElem::ratios(3, (2, 3), (-1, 5));
        assert_eq!(real_cube_root(&c.pow(3)), Some(c));
        assert_eq!(real_cube_root(&q(3, 2, 0)), None);
    }
}
