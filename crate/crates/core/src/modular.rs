//! Numeric modular functions on the upper half-plane.
//!
//! Everything is built on `eta_numeric`, which first moves τ into the
//! standard fundamental domain with the η transformation laws and then sums
//! the pentagonal series.

use crate::error::{Error, Result};
use crate::numerics::{pi, pow2, BigComplex};
use rug::Float;
use serde::Serialize;

/// Default lower bound on Im τ accepted by the evaluators.
pub const IM_FLOOR: f64 = 1e-3;

const GUARD: u32 = 32;

/// A point of the upper half-plane.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HalfPlanePoint {
    pub tau: BigComplex,
}

impl HalfPlanePoint {
    pub fn new(tau: BigComplex) -> Result<Self> {
        if tau.im <= 0 {
            return Err(Error::DomainError(format!("Im(tau) = {} is not positive", tau.im.to_f64())));
        }
        Ok(HalfPlanePoint { tau })
    }

    pub fn prec(&self) -> u32 {
        self.tau.prec()
    }
}

fn check_floor(tau: &BigComplex, floor: f64) -> Result<()> {
    if !(tau.im > 0) {
        return Err(Error::DomainError(format!("Im(tau) = {} is not positive", tau.im.to_f64())));
    }
    if tau.im < floor {
        return Err(Error::PrecisionLoss(format!("Im(tau) = {:e} is below the floor {floor:e}", tau.im.to_f64())));
    }
    Ok(())
}

/// e^{2πi x τ}
fn q_pow(tau: &BigComplex, x: &Float) -> BigComplex {
    let p = tau.prec();
    let two_pi_x = Float::with_val(p, pi(p) * 2u32) * x;
    tau.mul_i().scale(&two_pi_x).exp()
}

/// Moves τ into the closed fundamental domain.
///
/// Returns (τ', m) with η(τ) = m·η(τ'). Only the modular-invariant part is
/// needed by `j_numeric`, which ignores m.
fn reduce_with_multiplier(tau: &BigComplex) -> (BigComplex, BigComplex) {
    let p = tau.prec();
    let mut t = tau.clone();
    let mut mult = BigComplex::one(p);
    let mut shift = 0i64;
    let pi12 = Float::with_val(p, pi(p) / 12u32);
    for _ in 0..10_000 {
        let n = t.re.to_f64().round();
        if n != 0.0 {
            t.re -= n;
            shift += n as i64;
        }
        if t.norm_sqr() >= 1u32 {
            break;
        }
        // η(t) = η(-1/t)/√(-i t)
        if shift.rem_euclid(24) != 0 {
            let ang = Float::with_val(p, &pi12 * shift.rem_euclid(24));
            mult *= &BigComplex::expi(&ang);
            shift = 0;
        }
        let s = (-t.mul_i()).sqrt();
        mult = &mult / &s;
        t = -t.recip();
    }
    if shift.rem_euclid(24) != 0 {
        let ang = Float::with_val(p, &pi12 * shift.rem_euclid(24));
        mult *= &BigComplex::expi(&ang);
    }
    (t, mult)
}

/// q^{1/24} Σ (-1)^k q^{k(3k-1)/2} for τ with Im τ bounded below.
fn eta_series(tau: &BigComplex) -> BigComplex {
    let p = tau.prec();
    let y = tau.im.to_f64();
    // |q|^e < 2^-(p+8) once e > (p+8) ln2 / (2π y)
    let emax = (p as f64 + 8.0) * std::f64::consts::LN_2 / (2.0 * std::f64::consts::PI * y);
    let mut sum = BigComplex::one(p);
    let mut k = 1i64;
    loop {
        let e1 = k * (3 * k - 1) / 2;
        if e1 as f64 > emax {
            break;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let t1 = q_pow(tau, &Float::with_val(p, e1)).scale_f64(sign);
        sum += &t1;
        let e2 = k * (3 * k + 1) / 2;
        if (e2 as f64) <= emax {
            let t2 = q_pow(tau, &Float::with_val(p, e2)).scale_f64(sign);
            sum += &t2;
        }
        k += 1;
    }
    let q24 = q_pow(tau, &(Float::with_val(p, 1u32) / 24u32));
    &q24 * &sum
}

/// Dedekind η(τ) with the default floor on Im τ.
pub fn eta_numeric(tau: &BigComplex) -> Result<BigComplex> {
    eta_numeric_with_floor(tau, IM_FLOOR)
}

/// η(τ), refusing inputs with Im τ below `floor`.
///
/// After reduction Im τ ≥ √3/2, so the floor guards against the reduction
/// itself amplifying rounding error.
pub fn eta_numeric_with_floor(tau: &BigComplex, floor: f64) -> Result<BigComplex> {
    check_floor(tau, floor)?;
    let p = tau.prec();
    let wp = p + GUARD + extra_bits(tau);
    let (t, mult) = reduce_with_multiplier(&tau.with_prec(wp));
    Ok((&mult * &eta_series(&t)).with_prec(p))
}

/// Bits lost to cancellation when reducing points close to the real axis.
fn extra_bits(tau: &BigComplex) -> u32 {
    let y = tau.im.to_f64();
    if y >= 1.0 {
        0
    } else {
        (-y.log2()).ceil() as u32 * 2
    }
}

fn dilate(tau: &BigComplex, n: u32) -> BigComplex {
    BigComplex { re: Float::with_val(tau.prec(), &tau.re * n), im: Float::with_val(tau.prec(), &tau.im * n) }
}

/// λ(2τ) = 16 η(τ)^8 η(4τ)^16 / η(2τ)^24.
pub fn lambda2(tau: &BigComplex) -> Result<BigComplex> {
    check_floor(tau, IM_FLOOR)?;
    let p = tau.prec();
    let t = tau.with_prec(p + GUARD);
    let e1 = eta_numeric(&t)?;
    let e2 = eta_numeric(&dilate(&t, 2))?;
    let e4 = eta_numeric(&dilate(&t, 4))?;
    let num = &e1.powi(8) * &e4.powi(16);
    Ok((&num / &e2.powi(24)).scale_f64(16.0).with_prec(p))
}

/// Klein's j via E4^3/Δ, evaluated at the reduced point.
pub fn j_numeric(tau: &BigComplex) -> Result<BigComplex> {
    check_floor(tau, IM_FLOOR)?;
    let p = tau.prec();
    let wp = p + GUARD + extra_bits(tau);
    let (t, _) = reduce_with_multiplier(&tau.with_prec(wp));
    let eta = eta_series(&t);
    let delta = eta.powi(24);
    let e4 = eisenstein(4, &t)?;
    Ok((&e4.powi(3) / &delta).with_prec(p))
}

/// E_4 or E_6 by their divisor-sum q-series. Meant for reduced τ.
pub fn eisenstein(weight: u32, tau: &BigComplex) -> Result<BigComplex> {
    let (e, c) = match weight {
        4 => (3u32, 240.0),
        6 => (5u32, -504.0),
        _ => return Err(Error::DomainError(format!("E_{weight} is not provided"))),
    };
    if tau.im <= 0 {
        return Err(Error::DomainError("τ must lie in the upper half-plane".into()));
    }
    let p = tau.prec();
    let q = q_pow(tau, &Float::with_val(p, 1u32));
    let qa = q.abs().to_f64();
    let mut sum = BigComplex::zero(p);
    let mut qn = BigComplex::one(p);
    let target = pow2(64, -(p as i32) - 8).to_f64().max(f64::MIN_POSITIVE);
    let mut n = 1u64;
    loop {
        qn = &qn * &q;
        let s: f64 = (1..=n).filter(|d| n % d == 0).map(|d| (d as f64).powi(e as i32)).sum();
        sum += &qn.scale_f64(s);
        // σ_e(n) ≤ 2n^e bounds the tail term
        if (n as f64).powi(e as i32) * 2.0 * qa.powi(n as i32) < target * 1e-3 || n > 10_000 {
            break;
        }
        n += 1;
    }
    let mut r = sum.scale_f64(c);
    r.re += 1u32;
    Ok(r)
}

/// Weber 𝔣(τ) = e^{-πi/24} η((τ+1)/2)/η(τ).
pub fn weber_f(tau: &BigComplex) -> Result<BigComplex> {
    let p = tau.prec();
    let t = tau.with_prec(p + GUARD);
    let mut h = t.clone();
    h.re += 1u32;
    let h = h.scale_f64(0.5);
    let phase = BigComplex::expi(&Float::with_val(p + GUARD, -pi(p + GUARD) / 24u32));
    let v = &(&phase * &eta_numeric(&h)?) / &eta_numeric(&t)?;
    Ok(v.with_prec(p))
}

/// Weber 𝔣₁(τ) = η(τ/2)/η(τ).
pub fn weber_f1(tau: &BigComplex) -> Result<BigComplex> {
    let p = tau.prec();
    let t = tau.with_prec(p + GUARD);
    let v = &eta_numeric(&t.scale_f64(0.5))? / &eta_numeric(&t)?;
    Ok(v.with_prec(p))
}

/// Weber 𝔣₂(τ) = √2 η(2τ)/η(τ).
pub fn weber_f2(tau: &BigComplex) -> Result<BigComplex> {
    let p = tau.prec();
    let t = tau.with_prec(p + GUARD);
    let s2 = Float::with_val(p + GUARD, 2u32).sqrt();
    let v = (&eta_numeric(&dilate(&t, 2))? / &eta_numeric(&t)?).scale(&s2);
    Ok(v.with_prec(p))
}

/// k = 4/√λ(2τ), principal branch.
pub fn k_from_tau(tau: &BigComplex) -> Result<BigComplex> {
    let p = tau.prec();
    let l = lambda2(&tau.with_prec(p + GUARD))?;
    if l.abs() < pow2(p, -(p as i32) + 16) {
        return Err(Error::DomainError("lambda(2 tau) vanishes to working precision".into()));
    }
    let v = l.sqrt().recip().scale_f64(4.0);
    Ok(v.with_prec(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadforms::QuadForm;
    use proptest::prelude::*;
    use rug::ops::Pow;

    const P: u32 = 256;

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(P, re, im)
    }

    fn sqrt(n: u32) -> Float {
        Float::with_val(P, n).sqrt()
    }

    fn near(a: &BigComplex, b: &BigComplex, tol: f64) -> bool {
        a.dist(b).to_f64() < tol
    }

    fn brute_eta(tau: &BigComplex, terms: usize) -> BigComplex {
        let q = q_pow(tau, &Float::with_val(P, 1u32));
        let mut prod = BigComplex::one(P);
        let mut qn = BigComplex::one(P);
        for _ in 0..terms {
            qn = &qn * &q;
            prod = &prod * &(&BigComplex::one(P) - &qn);
        }
        &q_pow(tau, &(Float::with_val(P, 1u32) / 24u32)) * &prod
    }

    #[test]
    fn eta_at_i() {
        let quarter = Float::with_val(P, 0.25);
        let g = Float::with_val(P, quarter.gamma_ref());
        let pi34 = Float::with_val(P, pi(P).pow(Float::with_val(P, 0.75)));
        let exact = g / (pi34 * 2u32);
        let e = eta_numeric(&c(0.0, 1.0)).unwrap();
        assert!(Float::with_val(P, &e.re - &exact).abs() < pow2(P, -240));
        assert!(e.im.clone().abs() < pow2(P, -240));
        assert!((e.re.to_f64() - 0.768225).abs() < 1e-6);
        assert!(near(&e, &brute_eta(&c(0.0, 1.0), 30), 1e-20));
    }

    #[test]
    fn eta_against_product_off_axis() {
        for (x, y) in [(0.3, 0.8), (-0.45, 0.6), (2.7, 0.35), (0.1, 0.2)] {
            let t = c(x, y);
            let e = eta_numeric(&t).unwrap();
            assert!(near(&e, &brute_eta(&t, 600), 1e-20), "{x} {y}");
        }
    }

    #[test]
    fn transformation_laws() {
        let t = c(0.3, 0.8);
        let mut t1 = t.clone();
        t1.re += 1u32;
        let lhs = eta_numeric(&t1).unwrap();
        let rhs = &BigComplex::expi(&Float::with_val(P, pi(P) / 12u32)) * &eta_numeric(&t).unwrap();
        assert!(lhs.dist(&rhs) < pow2(P, -240));

        let t = c(0.2, 1.1);
        let lhs = eta_numeric(&(-t.recip())).unwrap();
        let rhs = &(-t.mul_i()).sqrt() * &eta_numeric(&t).unwrap();
        assert!(lhs.dist(&rhs) < pow2(P, -240));
    }

    #[test]
    fn floor_rejects_points_near_axis() {
        assert!(matches!(eta_numeric(&c(0.1, 1e-4)), Err(Error::PrecisionLoss(_))));
        assert!(matches!(eta_numeric(&c(0.1, -1.0)), Err(Error::DomainError(_))));
    }

    #[test]
    fn lambda_examples() {
        let l = lambda2(&QuadForm::new(1, 0, 1).tau(P)).unwrap();
        let exact = Float::with_val(P, 17u32) - sqrt(2) * 12u32;
        assert!(Float::with_val(P, &l.re - &exact).abs() < pow2(P, -230));
        assert!((l.re.to_f64() - 0.0294372).abs() < 1e-7);

        let l = lambda2(&QuadForm::new(2, -2, 1).tau(P)).unwrap();
        assert!(near(&l, &c(-1.0, 0.0), 1e-60));

        let t = QuadForm::new(5, -4, 1).tau(P);
        assert!(near(&t, &c(0.4, 0.2), 1e-16));
        let l = lambda2(&t).unwrap();
        let exact = Float::with_val(P, 17u32) + sqrt(2) * 12u32;
        assert!(Float::with_val(P, &l.re - &exact).abs() < pow2(P, -220));
        assert!((l.re.to_f64() - 33.970).abs() < 1e-3);
    }

    #[test]
    fn j_examples() {
        let j = j_numeric(&c(0.0, 1.0)).unwrap();
        assert!(near(&j, &c(1728.0, 0.0), 1e-60));
        let j = j_numeric(&c(0.0, 2.0)).unwrap();
        assert!(near(&j, &c(287496.0, 0.0), 1e-55));
        let j = j_numeric(&QuadForm::new(1, -1, 1).tau(P)).unwrap();
        assert!(j.abs() < 1e-60);
    }

    #[test]
    fn eisenstein_zeros() {
        // E6(i) = 0 and E4(ρ) = 0
        assert!(eisenstein(6, &c(0.0, 1.0)).unwrap().abs() < 1e-70);
        assert!(eisenstein(4, &QuadForm::new(1, 1, 1).tau(P)).unwrap().abs() < 1e-70);
        let e4 = eisenstein(4, &c(0.0, 1.0)).unwrap();
        // E4(i) = 3Γ(1/4)^8/(2π)^6
        let g = Float::with_val(P, 0.25).gamma();
        let want = Float::with_val(P, g.pow(8u32)) * 3u32 / Float::with_val(P, pi(P) * 2u32).pow(6u32);
        assert!(Float::with_val(P, &e4.re - &want).abs() < 1e-70);
        assert!(eisenstein(8, &c(0.0, 1.0)).is_err());
    }

    #[test]
    fn weber_examples() {
        let f1 = weber_f1(&c(0.0, 2.0)).unwrap().powi(24);
        assert!(near(&f1, &c(512.0, 0.0), 1e-60));
        // 𝔣⁸ = 𝔣₁⁸ + 𝔣₂⁸ and 𝔣𝔣₁𝔣₂ = √2 with 𝔣₁⁸ = 8 force 𝔣₂⁸ = 3√2 - 4
        let f2 = weber_f2(&c(0.0, 2.0)).unwrap().powi(24);
        let exact = sqrt(2) * 198u32 - 280u32;
        assert!((f2.re.to_f64() - 0.0142853498728196).abs() < 1e-15);
        assert!(near(&f2, &BigComplex::from_real(exact), 1e-60));
        let t = c(0.1, 1.3);
        let prod = &(&weber_f(&t).unwrap() * &weber_f1(&t).unwrap()) * &weber_f2(&t).unwrap();
        assert!(near(&prod, &BigComplex::from_real(sqrt(2)), 1e-70));
    }

    #[test]
    fn k_examples() {
        let k = k_from_tau(&c(0.0, 1.0)).unwrap();
        let exact = sqrt(2) * 8u32 + 12u32;
        assert!(near(&k, &BigComplex::from_real(exact), 1e-60));
        let k = k_from_tau(&QuadForm::new(5, -4, 1).tau(P)).unwrap();
        let exact = Float::with_val(P, 12u32) - sqrt(2) * 8u32;
        assert!(near(&k, &BigComplex::from_real(exact), 1e-60));
        let k = k_from_tau(&QuadForm::new(2, 0, 1).tau(P)).unwrap();
        let exact = sqrt(2) * 4u32 + 4u32;
        assert!(near(&k, &BigComplex::from_real(exact), 1e-60));
        // principal branch: λ = -1 gives 4/i = -4i
        let k = k_from_tau(&QuadForm::new(2, -2, 1).tau(P)).unwrap();
        assert!(near(&k, &c(0.0, -4.0), 1e-60));
    }

    #[test]
    fn half_plane_point_rejects_lower_half() {
        assert!(HalfPlanePoint::new(c(0.0, -1.0)).is_err());
        assert_eq!(HalfPlanePoint::new(c(0.0, 1.0)).unwrap().prec(), P);
    }

    /// γ τ for an integer matrix.
    fn mobius(g: [[i64; 2]; 2], t: &BigComplex) -> BigComplex {
        let num = &t.scale_f64(g[0][0] as f64) + &Float::with_val(P, g[0][1]);
        let den = &t.scale_f64(g[1][0] as f64) + &Float::with_val(P, g[1][1]);
        &num / &den
    }

    fn matmul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
        [
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn lambda_gamma0_4_invariant(
            word in proptest::collection::vec(0usize..4, 1..5),
            x in -0.5f64..0.5,
            y in 0.4f64..1.5,
        ) {
            // Γ0(4) is generated by ±T and (1 0; 4 1)
            let gens = [[[1, 1], [0, 1]], [[1, -1], [0, 1]], [[1, 0], [4, 1]], [[1, 0], [-4, 1]]];
            let mut g = [[1i64, 0], [0, 1]];
            for &w in &word {
                g = matmul(g, gens[w]);
            }
            prop_assert_eq!(g[1][0] % 4, 0);
            prop_assert_eq!(g[0][0] * g[1][1] - g[0][1] * g[1][0], 1);
            let t = c(x, y);
            let gt = mobius(g, &t);
            prop_assume!(gt.im.to_f64() > 1e-3);
            let a = lambda2(&t).unwrap();
            let b = lambda2(&gt).unwrap();
            let scale = a.abs().to_f64().max(1.0);
            prop_assert!(a.dist(&b).to_f64() < 1e-30 * scale);
            let mut t1 = t.clone();
            t1.re += 1u32;
            prop_assert!(lambda2(&t1).unwrap().dist(&a).to_f64() < 1e-30 * scale);
        }

        #[test]
        fn weber_identities(x in -0.5f64..0.5, y in 0.5f64..1.5) {
            let t = c(x, y);
            let j = j_numeric(&t).unwrap();
            let scale = j.abs().to_f64().max(1.0);
            let f24 = weber_f(&t).unwrap().powi(24);
            let f124 = weber_f1(&t).unwrap().powi(24);
            let f224 = weber_f2(&t).unwrap().powi(24);
            let sixteen = BigComplex::from_f64(P, 16.0, 0.0);
            let j_f = &(&f24 - &sixteen).powi(3) / &f24;
            let j_f1 = &(&f124 + &sixteen).powi(3) / &f124;
            let j_f2 = &(&f224 + &sixteen).powi(3) / &f224;
            prop_assert!(j.dist(&j_f).to_f64() < 1e-40 * scale);
            prop_assert!(j.dist(&j_f1).to_f64() < 1e-40 * scale);
            prop_assert!(j.dist(&j_f2).to_f64() < 1e-40 * scale);

            let t2 = dilate(&t, 2);
            let l = lambda2(&t).unwrap();
            let via_weber = (&weber_f1(&t2).unwrap().powi(8) * &weber_f2(&t2).unwrap().powi(16)).scale_f64(1.0 / 16.0);
            prop_assert!(l.dist(&via_weber).to_f64() < 1e-40 * l.abs().to_f64().max(1.0));

            let prod = &weber_f1(&t2).unwrap() * &weber_f2(&t).unwrap();
            prop_assert!(prod.dist(&BigComplex::from_real(sqrt(2))).to_f64() < 1e-60);
        }
    }
}
