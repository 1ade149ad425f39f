use rug::Float;
use serde::{Serialize, Serializer};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Complex number as a pair of MPFR floats.
#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl BigComplex {
    pub fn zero(prec: u32) -> Self {
        BigComplex { re: Float::new(prec), im: Float::new(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_f64(prec, 1.0, 0.0)
    }

    pub fn i(prec: u32) -> Self {
        Self::from_f64(prec, 0.0, 1.0)
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        BigComplex { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    /// Both parts are brought to the larger precision.
    pub fn from_parts(re: Float, im: Float) -> Self {
        let p = re.prec().max(im.prec());
        BigComplex { re: Float::with_val(p, re), im: Float::with_val(p, im) }
    }

    pub fn from_real(re: Float) -> Self {
        let p = re.prec();
        BigComplex { re, im: Float::new(p) }
    }

    /// e^{iθ}
    pub fn expi(theta: &Float) -> Self {
        let p = theta.prec();
        let (s, c) = Float::with_val(p, theta).sin_cos(Float::new(p));
        BigComplex { re: c, im: s }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        BigComplex { re: Float::with_val(prec, &self.re), im: Float::with_val(prec, &self.im) }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        BigComplex { re: self.re.clone(), im: Float::with_val(self.im.prec(), -&self.im) }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        let mut r = Float::with_val(p, self.re.square_ref());
        r += Float::with_val(p, self.im.square_ref());
        r
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn scale(&self, s: &Float) -> Self {
        let p = self.prec().max(s.prec());
        BigComplex { re: Float::with_val(p, &self.re * s), im: Float::with_val(p, &self.im * s) }
    }

    pub fn scale_f64(&self, s: f64) -> Self {
        BigComplex { re: Float::with_val(self.prec(), &self.re * s), im: Float::with_val(self.prec(), &self.im * s) }
    }

    /// Multiplication by i.
    pub fn mul_i(&self) -> Self {
        BigComplex { re: Float::with_val(self.im.prec(), -&self.im), im: self.re.clone() }
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        let p = self.prec();
        BigComplex {
            re: Float::with_val(p, &self.re / &n),
            im: Float::with_val(p, -Float::with_val(p, &self.im / &n)),
        }
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = Float::with_val(p, self.re.exp_ref());
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        BigComplex { re: Float::with_val(p, &m * &c), im: Float::with_val(p, &m * &s) }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let p = self.prec();
        BigComplex { re: Float::with_val(p, self.abs().ln_ref()), im: self.arg() }
    }

    /// Principal square root (branch cut on the negative real axis, sqrt(-1) = i).
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return BigComplex::zero(p);
        }
        let r = self.abs();
        if self.re >= 0 {
            let t = Float::with_val(p, Float::with_val(p, &r + &self.re) / 2u32).sqrt();
            let im = Float::with_val(p, &self.im / Float::with_val(p, &t * 2u32));
            BigComplex { re: t, im }
        } else {
            let t = Float::with_val(p, Float::with_val(p, &r - &self.re) / 2u32).sqrt();
            let re = Float::with_val(p, self.im.abs_ref()) / Float::with_val(p, &t * 2u32);
            let im = if self.im < 0 { -t } else { t };
            BigComplex { re, im }
        }
    }

    pub fn powi(&self, n: i64) -> Self {
        let p = self.prec();
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut base = self.clone();
        let mut acc = BigComplex::one(p);
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// z^(a/b) via the principal logarithm.
    pub fn pow_frac(&self, num: i64, den: i64) -> Self {
        let l = self.ln();
        let p = self.prec();
        let s = Float::with_val(p, num) / Float::with_val(p, den);
        l.scale(&s).exp()
    }

    /// |self - other|
    pub fn dist(&self, other: &BigComplex) -> Float {
        (self - other).abs()
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        let re = super::format_real(&self.re, digits);
        let sign = if self.im < 0 { "-" } else { "+" };
        let im = super::format_real(&Float::with_val(self.im.prec(), self.im.abs_ref()), digits);
        write!(f, "{re}{sign}{im}i")
    }
}

impl Serialize for BigComplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let digits = super::digits_for_prec(self.prec()).min(80);
        let mut st = s.serialize_struct("BigComplex", 2)?;
        st.serialize_field("re", &super::format_real(&self.re, digits))?;
        st.serialize_field("im", &super::format_real(&self.im, digits))?;
        st.end()
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&BigComplex> for &BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: &BigComplex) -> BigComplex {
                let f: fn(&BigComplex, &BigComplex) -> BigComplex = $body;
                f(self, rhs)
            }
        }
        impl $trait<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: BigComplex) -> BigComplex {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: &BigComplex) -> BigComplex {
                (&self).$method(rhs)
            }
        }
        impl $trait<BigComplex> for &BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: BigComplex) -> BigComplex {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| {
    let p = a.prec().max(b.prec());
    BigComplex { re: Float::with_val(p, &a.re + &b.re), im: Float::with_val(p, &a.im + &b.im) }
});

binop!(Sub, sub, |a, b| {
    let p = a.prec().max(b.prec());
    BigComplex { re: Float::with_val(p, &a.re - &b.re), im: Float::with_val(p, &a.im - &b.im) }
});

binop!(Mul, mul, |a, b| {
    let p = a.prec().max(b.prec());
    let mut re = Float::with_val(p, &a.re * &b.re);
    re -= Float::with_val(p, &a.im * &b.im);
    let mut im = Float::with_val(p, &a.re * &b.im);
    im += Float::with_val(p, &a.im * &b.re);
    BigComplex { re, im }
});

binop!(Div, div, |a, b| {
    let p = a.prec().max(b.prec());
    let n = b.norm_sqr();
    let mut re = Float::with_val(p, &a.re * &b.re);
    re += Float::with_val(p, &a.im * &b.im);
    let mut im = Float::with_val(p, &a.im * &b.re);
    im -= Float::with_val(p, &a.re * &b.im);
    BigComplex { re: re / &n, im: im / &n }
});

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex { re: -self.re, im: -self.im }
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        -(self.clone())
    }
}

impl AddAssign<&BigComplex> for BigComplex {
    fn add_assign(&mut self, rhs: &BigComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl AddAssign<BigComplex> for BigComplex {
    fn add_assign(&mut self, rhs: BigComplex) {
        *self += &rhs;
    }
}

impl SubAssign<&BigComplex> for BigComplex {
    fn sub_assign(&mut self, rhs: &BigComplex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&BigComplex> for BigComplex {
    fn mul_assign(&mut self, rhs: &BigComplex) {
        *self = &*self * rhs;
    }
}

impl Mul<&Float> for &BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &Float) -> BigComplex {
        self.scale(rhs)
    }
}

impl Add<&Float> for &BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &Float) -> BigComplex {
        let p = self.prec().max(rhs.prec());
        BigComplex { re: Float::with_val(p, &self.re + rhs), im: Float::with_val(p, &self.im) }
    }
}
