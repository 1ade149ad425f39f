//! L(f, 2) for weight-2 cusp forms given by theta series, eta quotients or
//! rational combinations of rescaled forms, and the check
//! m(k) = c_k·L(f_k, 2) for the embedded identity table.

use crate::error::{Error, Result};
use crate::mahler::mahler_jensen;
use crate::numerics::{adaptive_integrate, pi, ser_float, BigComplex};
use crate::paperdata::{table2, PrintedIdentity};
use crate::qseries::{eta_quotient_expansion, theta_expansion, EtaQuotient, ThetaSpec};
use crate::{kexpr, QuadForm};
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

/// A weight-2 form described symbolically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormSpec {
    pub kind: FormKind,
    pub level: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormKind {
    Theta(ThetaSpec),
    Eta(EtaQuotient),
    Combo(Vec<ComboTerm>),
}

/// coefficient · inner(dilation · τ)
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComboTerm {
    /// Rational as "p/q".
    pub coeff: String,
    pub inner: FormSpec,
    pub dilation: u32,
}

impl FormSpec {
    pub fn theta(spec: ThetaSpec, level: u64) -> Self {
        FormSpec { kind: FormKind::Theta(spec), level }
    }

    pub fn eta(eq: EtaQuotient, level: u64) -> Self {
        FormSpec { kind: FormKind::Eta(eq), level }
    }

    pub fn combo(terms: Vec<(Rational, FormSpec, u32)>, level: u64) -> Self {
        let terms = terms
            .into_iter()
            .map(|(c, inner, dilation)| ComboTerm { coeff: c.to_string(), inner, dilation })
            .collect();
        FormSpec { kind: FormKind::Combo(terms), level }
    }

    /// f(dτ) as a one-term combination.
    pub fn dilated(&self, d: u32) -> Self {
        FormSpec::combo(vec![(Rational::from(1), self.clone(), d)], self.level * d as u64)
    }
}

/// The η-quotient η(8τ)^8/(η(4τ)²η(16τ)²), level 64.
pub fn f64_form() -> FormSpec {
    FormSpec::eta(EtaQuotient::new(&[(8, 8), (4, -2), (16, -2)]).expect("valid"), 64)
}

/// The η-quotient η(4τ)²η(8τ)², level 32.
pub fn f32_form() -> FormSpec {
    FormSpec::eta(EtaQuotient::new(&[(4, 2), (8, 2)]).expect("valid"), 32)
}

/// Exact coefficients c_0..c_nmax (index = exponent).
pub fn coefficients(spec: &FormSpec, nmax: usize) -> Result<Vec<Rational>> {
    if nmax == 0 {
        return Err(Error::DomainError("nmax must be at least 1".into()));
    }
    match &spec.kind {
        FormKind::Theta(t) => {
            let s = theta_expansion(t, nmax + 1)?;
            Ok(s.integer_coeffs()?.into_iter().take(nmax + 1).collect())
        }
        FormKind::Eta(e) => {
            let b = e.base24();
            if b % 24 != 0 || b < 0 {
                return Err(Error::DomainError(format!("eta quotient starts at q^({b}/24)")));
            }
            let lead = (b / 24) as usize;
            let order = (nmax + 1).saturating_sub(lead).max(1);
            let s = eta_quotient_expansion(e, order);
            let mut v = s.integer_coeffs()?;
            v.resize(nmax + 1, Rational::new());
            Ok(v)
        }
        FormKind::Combo(terms) => {
            let mut out = vec![Rational::new(); nmax + 1];
            for t in terms {
                let c: Rational = t.coeff.parse().map_err(|e| Error::Parse(format!("{}: {e}", t.coeff)))?;
                if t.dilation == 0 {
                    return Err(Error::DomainError("dilation must be positive".into()));
                }
                let d = t.dilation as usize;
                let inner = coefficients(&t.inner, nmax / d)?;
                for (n, v) in inner.iter().enumerate() {
                    out[n * d] += Rational::from(&c * v);
                }
            }
            Ok(out)
        }
    }
}

/// Knobs for [`lvalue2`].
#[derive(Clone, Debug, Serialize)]
pub struct LOptions {
    /// Split point between the analytic tail and the quadrature.
    pub t0: f64,
    /// Lower end of the quadrature; below it only a bound is used.
    pub t_min: f64,
    /// Working precision in bits (raised to what eps needs).
    pub prec: u32,
    /// Multiplier on the automatically chosen q-expansion length.
    pub truncation_factor: f64,
    /// Halve t_min on TailBoundExceeded, at most this many times.
    pub max_halvings: u32,
}

impl Default for LOptions {
    fn default() -> Self {
        LOptions { t0: 0.15, t_min: 0.01, prec: 256, truncation_factor: 1.0, max_halvings: 0 }
    }
}

impl LOptions {
    /// Defaults with automatic lowering of t_min.
    pub fn auto() -> Self {
        LOptions { max_halvings: 12, ..Default::default() }
    }
}

/// L(f, 2) with its error budget.
#[derive(Clone, Debug, Serialize)]
pub struct LValue {
    #[serde(serialize_with = "ser_float")]
    pub value: Float,
    pub t_min: f64,
    pub terms: usize,
    pub remainder_bound: f64,
}

fn bits_for(eps: f64) -> u32 {
    (-eps.max(f64::MIN_POSITIVE).log2()).ceil().max(0.0) as u32
}

/// L(f, 2) = 4π² ∫₀^∞ f(it) t dt.
///
/// For t ≥ t₀ each term integrates in closed form to
/// c_n(1 + 2πnt₀)e^{-2πnt₀}/n². On [t_min, t₀] the q-series is summed
/// at 1.5× precision under tanh-sinh quadrature. The piece below t_min is
/// bounded with |f(it)| ≤ κ t⁻² e^{-2π/(Nt)}, κ = 10⁴|f(i t_min)| t_min²
/// e^{2π/(N t_min)}, which integrates to 4π²κE₁(2π/(N t_min)).
pub fn lvalue2(spec: &FormSpec, eps: f64, opts: &LOptions) -> Result<LValue> {
    let mut o = opts.clone();
    let mut halvings = 0;
    loop {
        match lvalue2_once(spec, eps, &o) {
            Err(Error::TailBoundExceeded { .. }) if halvings < opts.max_halvings => {
                o.t_min /= 2.0;
                halvings += 1;
            }
            r => return r,
        }
    }
}

fn lvalue2_once(spec: &FormSpec, eps: f64, opts: &LOptions) -> Result<LValue> {
    if !(opts.t_min > 0.0 && opts.t_min < opts.t0) {
        return Err(Error::DomainError(format!("need 0 < t_min < t0, got {} and {}", opts.t_min, opts.t0)));
    }
    let p = opts.prec.max(bits_for(eps) + 32);
    let hp = p + p / 2;
    let two_pi = std::f64::consts::PI * 2.0;
    let level = spec.level.max(1) as f64;

    // truncation: C·N·e^{-2πN t_min} below the target, with |c_n| ≤ C n
    let probe = coefficients(spec, 200)?;
    let cmax = probe
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, c)| c.to_f64().abs() / n as f64)
        .fold(0.0f64, f64::max)
        .max(1.0);
    let target = (hp as f64) * std::f64::consts::LN_2 + cmax.ln() + 2.0 * (1.0 / (two_pi * opts.t_min)).ln() + 10.0;
    let nmax = ((target / (two_pi * opts.t_min)) * opts.truncation_factor).ceil() as usize + 10;
    let coeffs = coefficients(spec, nmax)?;
    if coeffs[0] != 0 {
        return Err(Error::DomainError("form has a constant term; L(f, 2) needs a cusp form".into()));
    }
    let cf: Vec<Option<Float>> =
        coeffs.iter().map(|c| if *c == 0 { None } else { Some(Float::with_val(hp, c)) }).collect();

    let pi_h = pi(hp);
    let two_pi_h = Float::with_val(hp, &pi_h * 2u32);
    // f(it) = Σ c_n e^{-2πnt}, cut where the terms drop below 2^-hp
    let f_at = |t: &Float| -> Float {
        let tf = t.to_f64();
        let ncut = (((hp as f64) * std::f64::consts::LN_2 + cmax.ln() + 20.0) / (two_pi * tf)).ceil() as usize;
        let ncut = ncut.min(nmax);
        let q = Float::with_val(hp, -Float::with_val(hp, &two_pi_h * t)).exp();
        let mut qn = Float::with_val(hp, 1u32);
        let mut s = Float::new(hp);
        for c in cf.iter().take(ncut + 1).skip(1) {
            qn *= &q;
            if let Some(c) = c {
                s += Float::with_val(hp, c * &qn);
            }
        }
        s
    };

    // tail t ≥ t₀
    let t0 = Float::with_val(hp, opts.t0);
    let mut tail = Float::new(hp);
    for (n, c) in cf.iter().enumerate().skip(1) {
        if let Some(c) = c {
            let x = Float::with_val(hp, &two_pi_h * &t0) * n as u32;
            if x.to_f64() > (hp as f64) * std::f64::consts::LN_2 + 20.0 {
                break;
            }
            let term = Float::with_val(hp, &x + 1u32) * Float::with_val(hp, (-x.clone()).exp_ref()) * c;
            tail += term / (n as f64 * n as f64);
        }
    }

    // remainder below t_min
    let a = two_pi / level;
    let tm = Float::with_val(hp, opts.t_min);
    let f_tm = f_at(&tm).to_f64().abs();
    let kappa = 1e4 * f_tm * opts.t_min * opts.t_min * (a / opts.t_min).exp();
    let e1 = Float::with_val(64, 0u32).gamma_inc(&Float::with_val(64, a / opts.t_min)).to_f64();
    let remainder = 4.0 * std::f64::consts::PI * std::f64::consts::PI * kappa * e1;
    if !(remainder < eps / 4.0) {
        return Err(Error::TailBoundExceeded { bound: remainder, eps });
    }

    // head on [t_min, t₀]
    let qeps = Float::with_val(hp, eps / (16.0 * std::f64::consts::PI * std::f64::consts::PI));
    let head = adaptive_integrate(|t| BigComplex::from_real(Float::with_val(hp, f_at(t) * t)), &tm, &t0, &qeps, false)?;
    let four_pi2 = Float::with_val(hp, pi_h.square_ref()) * 4u32;
    let value = Float::with_val(p, Float::with_val(hp, &head.re * &four_pi2) + &tail);
    Ok(LValue { value, t_min: opts.t_min, terms: nmax, remainder_bound: remainder })
}

/// Solves L1 = αL_f + ᾱL_g, L2 = βL_f + β̄L_g and checks L_g = conj(L_f).
pub fn extract_conjugate_pair(
    l1: &BigComplex,
    l2: &BigComplex,
    alpha: &BigComplex,
    beta: &BigComplex,
    tol: f64,
) -> Result<(BigComplex, BigComplex)> {
    let det = &(alpha * &beta.conj()) - &(&alpha.conj() * beta);
    let scale = alpha.abs().to_f64().max(1.0) * beta.abs().to_f64().max(1.0);
    if det.abs().to_f64() < 1e-30 * scale {
        return Err(Error::SingularSystem);
    }
    let lf = &(&(l1 * &beta.conj()) - &(&alpha.conj() * l2)) / &det;
    let lg = &(&(alpha * l2) - &(beta * l1)) / &det;
    let gap = lg.dist(&lf.conj()).to_f64();
    if gap > tol * lf.abs().to_f64().max(1.0) {
        return Err(Error::ConjugacyViolation(format!("|L_g - conj(L_f)| = {gap:e}")));
    }
    Ok((lf, lg))
}

/// c_k = r√s/π² attached to k.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityRecord {
    pub row: usize,
    pub k: String,
    pub c_rational: String,
    pub c_sqrt: i64,
    pub form: FormSpec,
    pub level: u64,
    pub cm_point: QuadForm,
}

impl From<&PrintedIdentity> for IdentityRecord {
    fn from(p: &PrintedIdentity) -> Self {
        IdentityRecord {
            row: p.row,
            k: p.k.to_string(),
            c_rational: Rational::from(p.c_rational).to_string(),
            c_sqrt: p.c_sqrt,
            form: FormSpec::theta(p.theta.clone(), p.level),
            level: p.level,
            cm_point: p.cm_point,
        }
    }
}

/// The 35 embedded identities.
pub fn identity_table() -> Vec<IdentityRecord> {
    table2().iter().map(IdentityRecord::from).collect()
}

impl IdentityRecord {
    /// c_k at `prec` bits.
    pub fn c_value(&self, prec: u32) -> Result<Float> {
        let r: Rational = self.c_rational.parse().map_err(|e| Error::Parse(format!("{}: {e}", self.c_rational)))?;
        let s = Float::with_val(prec, self.c_sqrt).sqrt();
        Ok(Float::with_val(prec, &r) * s / Float::with_val(prec, pi(prec).square_ref()))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub row: usize,
    pub k: String,
    pub k_value: BigComplex,
    #[serde(serialize_with = "ser_float")]
    pub c: Float,
    #[serde(rename = "L", serialize_with = "ser_float")]
    pub l: Float,
    #[serde(serialize_with = "ser_float")]
    pub m: Float,
    #[serde(serialize_with = "ser_float")]
    pub cl: Float,
    pub residual: f64,
    pub digits_agreed: f64,
    pub t_min: f64,
}

/// |m(k) - c_k L(f_k, 2)| together with both sides.
pub fn verify_identity(row: &IdentityRecord, eps: f64) -> Result<IdentityCheck> {
    let p = 128u32.max(bits_for(eps) + 48);
    let k = kexpr::parse(&row.k, p)?;
    let m = mahler_jensen(&k, &Float::with_val(p, eps / 4.0))?;
    let l = lvalue2(&row.form, eps / 8.0, &LOptions { prec: p, ..LOptions::auto() })?;
    let c = row.c_value(p)?;
    let cl = Float::with_val(p, &c * &l.value);
    let residual = Float::with_val(p, &m - &cl).abs().to_f64();
    let rel = residual / m.to_f64().abs().max(1e-300);
    let digits_agreed = if rel > 0.0 { -rel.log10() } else { f64::from(p) * std::f64::consts::LOG10_2 };
    Ok(IdentityCheck { row: row.row, k: row.k.clone(), k_value: k, c, l: l.value, m, cl, residual, digits_agreed, t_min: l.t_min })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{sturm_compare, PowerSeriesZ};

    fn r(v: i64) -> Rational {
        Rational::from(v)
    }

    #[test]
    fn f64_coefficients() {
        let c = coefficients(&f64_form(), 25).unwrap();
        let want = [0, 1, 0, 0, 0, 2, 0, 0, 0, -3];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(c[i], r(*w), "c_{i}");
        }
    }

    #[test]
    fn average_of_f64_and_f32_is_a_theta_series() {
        let half = Rational::from((1, 2));
        let avg = FormSpec::combo(vec![(half.clone(), f64_form(), 1), (half, f32_form(), 1)], 64);
        let theta = FormSpec::theta(ThetaSpec::new((16, 0, 1), 0, 1, (1, 2)), 64);
        let n = 60;
        let a = coefficients(&avg, n).unwrap();
        let t = coefficients(&theta, n).unwrap();
        assert_eq!(a, t);
        // up to the Sturm bound of level 64
        let to_series = |v: &[Rational]| {
            PowerSeriesZ::from_integers(0, v.iter().map(|x| x.numer().clone()).collect())
        };
        let res = sturm_compare(&to_series(&a), &to_series(&t), 64, 2).unwrap();
        assert!(res.equal);
    }

    #[test]
    fn dilation_substitutes_q() {
        let base = FormSpec::theta(ThetaSpec::new((1, 0, 1), 0, 1, (1, 2)), 16);
        let c = coefficients(&base, 20).unwrap();
        let d = coefficients(&base.dilated(2), 40).unwrap();
        for n in 0..=20 {
            assert_eq!(d[2 * n], c[n]);
            if 2 * n + 1 <= 40 {
                assert_eq!(d[2 * n + 1], r(0));
            }
        }
        let combo = FormSpec::combo(
            vec![(r(1), FormSpec::eta(EtaQuotient::new(&[(1, 24)]).unwrap(), 1), 2)],
            2,
        );
        let c = coefficients(&combo, 6).unwrap();
        assert_eq!(&c[..5], &[r(0), r(0), r(1), r(0), r(-24)]);
    }

    #[test]
    fn spec_json_round_trip() {
        let s = FormSpec::combo(vec![(Rational::from((7, 14)), f64_form(), 2)], 128);
        let j = serde_json::to_string(&s).unwrap();
        let back: FormSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn lvalue_against_dirichlet_series() {
        // Σ c_n/n² converges absolutely; 200000 terms give about 1e-5
        let spec = f32_form();
        let l = lvalue2(&spec, 1e-20, &LOptions::auto()).unwrap();
        let c = coefficients(&spec, 200_000).unwrap();
        let mut s = 0.0;
        for (n, v) in c.iter().enumerate().skip(1) {
            s += v.to_f64() / (n as f64 * n as f64);
        }
        assert!((l.value.to_f64() - s).abs() < 1e-4, "{} vs {s}", l.value);
    }

    #[test]
    fn dilation_scales_lvalue() {
        let base = f32_form();
        let l1 = lvalue2(&base, 1e-20, &LOptions::auto()).unwrap().value;
        for d in [2u32, 4] {
            let ld = lvalue2(&base.dilated(d), 1e-20, &LOptions::auto()).unwrap().value;
            let diff = Float::with_val(128, &ld * (d * d)) - &l1;
            assert!(diff.abs() < 1e-18);
        }
    }

    #[test]
    fn split_and_truncation_stability() {
        let spec = f64_form();
        let base = lvalue2(&spec, 1e-22, &LOptions::auto()).unwrap().value;
        for t0 in [0.1, 0.25, 0.05, 0.5] {
            let v = lvalue2(&spec, 1e-22, &LOptions { t0, ..LOptions::auto() }).unwrap().value;
            assert!(Float::with_val(128, &v - &base).abs() < 1e-20, "t0={t0}");
        }
        let v = lvalue2(&spec, 1e-22, &LOptions { truncation_factor: 2.0, ..LOptions::auto() }).unwrap().value;
        assert!(Float::with_val(128, &v - &base).abs() < 1e-20);
        let v = lvalue2(&spec, 1e-22, &LOptions { prec: 512, ..LOptions::auto() }).unwrap().value;
        assert!(Float::with_val(128, &v - &base).abs() < 1e-20);
    }

    #[test]
    fn tail_bound_error_when_tmin_too_large() {
        let spec = FormSpec::theta(ThetaSpec::new((28, 0, 1), 0, 1, (1, 2)), 448);
        let e = lvalue2(&spec, 1e-20, &LOptions::default()).unwrap_err();
        assert!(matches!(e, Error::TailBoundExceeded { .. }));
    }

    #[test]
    fn conjugate_pair_examples() {
        let z = BigComplex::zero(128);
        let (f, g) = extract_conjugate_pair(&z, &z, &BigComplex::one(128), &BigComplex::i(128), 1e-20).unwrap();
        assert!(f.is_zero() && g.is_zero());
        // synthetic data: Lf = 0.3 + 0.7i
        let lf = BigComplex::from_f64(128, 0.3, 0.7);
        let s3 = Float::with_val(128, 3u32).sqrt();
        let alpha = BigComplex::from_parts(Float::with_val(128, 0.5), Float::with_val(128, &s3 / 6u32));
        let beta = BigComplex::from_parts(Float::with_val(128, 0.5), -Float::with_val(128, &s3 / 2u32));
        let l1 = &(&alpha * &lf) + &(&alpha.conj() * &lf.conj());
        let l2 = &(&beta * &lf) + &(&beta.conj() * &lf.conj());
        let (f, g) = extract_conjugate_pair(&l1, &l2, &alpha, &beta, 1e-25).unwrap();
        assert!(f.dist(&lf) < 1e-30 && g.dist(&lf.conj()) < 1e-30);
        let bad = &l2 + &BigComplex::i(128);
        assert!(matches!(
            extract_conjugate_pair(&l1, &bad, &alpha, &beta, 1e-25),
            Err(Error::ConjugacyViolation(_))
        ));
        let one = BigComplex::one(128);
        assert!(matches!(extract_conjugate_pair(&l1, &l2, &one, &one, 1e-20), Err(Error::SingularSystem)));
    }

    fn check_row(k: &str) {
        let row = identity_table().into_iter().find(|r| r.k == k).unwrap();
        let res = verify_identity(&row, 1e-20).unwrap();
        assert!(res.residual < 1e-10, "{k}: {}", res.residual);
        assert!(res.m > 0);
    }

    #[test]
    fn identity_rows() {
        check_row("4*sqrt(2)");
        check_row("12-8*sqrt(2)");
        check_row("3*sqrt(2)/2-sqrt(14)/2");
    }
}
