//! Mahler measure of P_k = x + 1/x + y + 1/y + k.
//!
//! `mahler_jensen` integrates log max(|y₁|, 1) over the unit circle in x;
//! `mahler_lattice` evaluates the Kronecker–Eisenstein sum attached to a
//! CM point τ with k = 4/√λ(2τ).

use crate::error::{Error, Result};
use crate::numerics::{adaptive_integrate, pi, pow2, BigComplex};
use crate::quadforms::in_fprime;
use rug::Float;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Roots of y² + (x + 1/x + k)y + 1 = 0 ordered so that |y₁| ≥ |y₂|.
///
/// The larger root is formed without cancellation and y₂ = 1/y₁.
pub fn roots_y(x: &BigComplex, k: &BigComplex) -> (BigComplex, BigComplex) {
    let w = &(x + &x.recip()) + k;
    roots_from_w(&w)
}

fn roots_from_w(w: &BigComplex) -> (BigComplex, BigComplex) {
    let p = w.prec();
    let two = Float::with_val(p, 2u32);
    // w² - 4 = (w - 2)(w + 2) keeps accuracy near the branch points
    let disc = &(w + &Float::with_val(p, -&two)) * &(w + &two);
    let s = disc.sqrt();
    // choose the sign that adds magnitudes
    let dot = Float::with_val(p, &w.re * &s.re) + Float::with_val(p, &w.im * &s.im);
    let big = if dot >= 0 { -(w + &s) } else { &s - w };
    let y1 = big.scale_f64(0.5);
    if y1.is_zero() {
        // w = 0 exactly: y = ±i
        return (BigComplex::i(p), -BigComplex::i(p));
    }
    let y2 = y1.recip();
    (y1, y2)
}

/// A maximal θ-interval of [0, π] on which |x + 1/x + k| stays on one side of 2.
#[derive(Clone, Debug)]
pub struct BranchInterval {
    pub start: Float,
    pub end: Float,
    /// Both y-roots are conjugate and on the unit circle (real k, |w| ≤ 2).
    pub on_circle: bool,
}

/// Branch structure of the y-roots along x = e^{iθ}.
///
/// Only θ ∈ [0, π] is stored; everything depends on cos θ, so the picture on
/// [π, 2π] is the mirror image.
#[derive(Clone, Debug)]
pub struct BranchData {
    pub k: BigComplex,
    /// Angles in [0, π] with |2cos θ + k| = 2.
    pub crossings: Vec<Float>,
    pub intervals: Vec<BranchInterval>,
}

impl Serialize for BranchData {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Iv {
            start: f64,
            end: f64,
            on_circle: bool,
        }
        let mut st = s.serialize_struct("BranchData", 3)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("crossings", &self.crossings.iter().map(|c| c.to_f64()).collect::<Vec<_>>())?;
        let iv: Vec<Iv> = self
            .intervals
            .iter()
            .map(|i| Iv { start: i.start.to_f64(), end: i.end.to_f64(), on_circle: i.on_circle })
            .collect();
        st.serialize_field("intervals", &iv)?;
        st.end()
    }
}

impl BranchData {
    pub fn new(k: &BigComplex) -> Self {
        let p = k.prec();
        let pi = pi(p);
        let mut crossings = Vec::new();
        // |2c + k|² = 4 with c = cos θ: 2c = -Re k ± √(4 - (Im k)²)
        let ki2 = Float::with_val(p, k.im.square_ref());
        let rad = Float::with_val(p, 4u32 - ki2);
        if rad >= 0 {
            let r = rad.sqrt();
            for sgn in [-1i32, 1] {
                let two_c = Float::with_val(p, -&k.re) + Float::with_val(p, &r * sgn);
                let c = two_c / 2u32;
                if c >= -1i32 && c <= 1u32 {
                    crossings.push(c.acos());
                }
            }
        }
        crossings.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        crossings.dedup_by(|a, b| Float::with_val(p, &*a - &*b).abs() < pow2(p, -(p as i32) + 8));
        let mut cuts = vec![Float::new(p)];
        for c in &crossings {
            if *c > cuts[cuts.len() - 1] && *c < pi {
                cuts.push(c.clone());
            }
        }
        cuts.push(pi.clone());
        let real_k = k.im.is_zero();
        let intervals = cuts
            .windows(2)
            .map(|w| {
                let mid = Float::with_val(p, &w[0] + &w[1]) / 2u32;
                let wv = &BigComplex::from_real(Float::with_val(p, mid.cos_ref()) * 2u32) + k;
                let on_circle = real_k && wv.abs() <= 2u32;
                BranchInterval { start: w[0].clone(), end: w[1].clone(), on_circle }
            })
            .collect();
        BranchData { k: k.clone(), crossings, intervals }
    }
}

/// m(k) = (1/2π)∫ log max(|y₁(e^{iθ})|, 1) dθ to absolute error `eps`.
///
/// Works at the precision of `k` (raised if eps asks for more).
pub fn mahler_jensen(k: &BigComplex, eps: &Float) -> Result<Float> {
    let need = (-eps.to_f64().max(f64::MIN_POSITIVE).log2()).ceil() as u32 + 24;
    let p = k.prec().max(need).max(64);
    let k = k.with_prec(p);
    let branches = BranchData::new(&k);
    let pi_p = pi(p);
    // the integral over [0, π] is divided by π, so π·eps is the absolute target
    let qeps = Float::with_val(p, eps * &pi_p) / 4u32;
    let mut total = Float::new(p);
    for iv in branches.intervals.iter().filter(|iv| !iv.on_circle) {
        let v = adaptive_integrate(
            |th| {
                let w = &BigComplex::from_real(Float::with_val(p, th.cos_ref()) * 2u32) + &k;
                let (y1, _) = roots_from_w(&w);
                let a = y1.abs();
                if a <= 1u32 {
                    BigComplex::zero(p)
                } else {
                    BigComplex::from_real(a.ln())
                }
            },
            &iv.start,
            &iv.end,
            &qeps,
            false,
        )?;
        total += &v.re;
    }
    Ok(total / &pi_p)
}

/// Evaluation strategy for the lattice sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LatticeStrategy {
    /// Disk truncation in double precision with radius doubling.
    Direct,
    /// Incomplete-gamma split with Poisson summation on the dual lattice.
    Accelerated,
}

impl std::str::FromStr for LatticeStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(LatticeStrategy::Direct),
            "accelerated" => Ok(LatticeStrategy::Accelerated),
            _ => Err(Error::Parse(format!("unknown lattice strategy {s:?}"))),
        }
    }
}

/// Smallest eps the direct strategy accepts.
pub const DIRECT_EPS_FLOOR: f64 = 1e-9;
const DIRECT_MAX_RADIUS: f64 = 8192.0;

/// Re(16 Im τ/π² Σ′ χ₋₄(n)(4mτ̄+n)/|4mτ+n|⁴), which equals m(4/√λ(2τ)).
pub fn mahler_lattice(tau: &BigComplex, eps: &Float, strategy: LatticeStrategy) -> Result<Float> {
    if !in_fprime(tau, 1e-12) {
        return Err(Error::DomainError(format!("tau = {tau} is not in F'")));
    }
    match strategy {
        LatticeStrategy::Direct => lattice_direct(tau, eps.to_f64()),
        LatticeStrategy::Accelerated => lattice_accelerated(tau, eps),
    }
}

fn chi4(n: i64) -> f64 {
    match n.rem_euclid(4) {
        1 => 1.0,
        3 => -1.0,
        _ => 0.0,
    }
}

/// Σ over |4mτ+n| ≤ r of Re(χ(n) z̄/|z|⁴).
fn disk_sum(x: f64, y: f64, r: f64) -> f64 {
    let mut s = 0.0;
    let mmax = (r / (4.0 * y)).floor() as i64;
    for m in -mmax..=mmax {
        let zy = 4.0 * m as f64 * y;
        let zx0 = 4.0 * m as f64 * x;
        let half = (r * r - zy * zy).max(0.0).sqrt();
        let nlo = (-zx0 - half).ceil() as i64;
        let nhi = (-zx0 + half).floor() as i64;
        let mut row = 0.0;
        for n in nlo..=nhi {
            let c = chi4(n);
            if c == 0.0 {
                continue;
            }
            let zx = zx0 + n as f64;
            let n2 = zx * zx + zy * zy;
            row += c * zx / (n2 * n2);
        }
        s += row;
    }
    s
}

fn lattice_direct(tau: &BigComplex, eps: f64) -> Result<Float> {
    if eps < DIRECT_EPS_FLOOR {
        return Err(Error::StrategyPrecisionExceeded(format!(
            "direct summation works in double precision; eps {eps:e} is below {DIRECT_EPS_FLOOR:e}"
        )));
    }
    let (x, y) = tau.to_f64();
    let pref = 16.0 * y / (std::f64::consts::PI * std::f64::consts::PI);
    let mut r = 32.0;
    let mut prev = pref * disk_sum(x, y, r);
    loop {
        r *= 2.0;
        let cur = pref * disk_sum(x, y, r);
        if (cur - prev).abs() < eps / 4.0 {
            return Ok(Float::with_val(64, cur));
        }
        if r >= DIRECT_MAX_RADIUS {
            return Err(Error::StrategyPrecisionExceeded(format!(
                "radius {r} reached with last change {:e} against eps {eps:e}",
                (cur - prev).abs()
            )));
        }
        prev = cur;
    }
}

/// Ewald split of Σ′ χ(n) z̄/|z|⁴ over z = 4mτ + n.
///
/// With n = 4j + r the sum is 4⁻³ Σ_{r=1,3} χ(r) Σ_{w∈Λ} f(w + r/4) where
/// Λ = Zτ + Z and f(z) = z̄/|z|⁴ = z̄ ∫₀^∞ t e^{-t|z|²} dt. The part t > t*
/// gives z̄ Γ(2, t*|z|²)/|z|⁴ on Λ + u; the part t < t* is Poisson-summed
/// to (-iπ²/A) Σ_{ξ≠0} ξ̄ e^{2πi⟨ξ,u⟩} E₁(π²|ξ|²/t*) on the dual lattice.
fn lattice_accelerated(tau: &BigComplex, eps: &Float) -> Result<Float> {
    let need = (-eps.to_f64().max(f64::MIN_POSITIVE).log2()).ceil() as u32 + 32;
    let p = tau.prec().max(need).max(64);
    let tau = tau.with_prec(p);
    let (tx, ty) = (tau.re.clone(), tau.im.clone());
    let pi_p = pi(p);
    let area = ty.clone();
    let tstar = Float::with_val(p, &pi_p / &area);
    // terms fall like e^{-X}; stop once X exceeds this
    let xmax = need as f64 * std::f64::consts::LN_2 + 10.0;

    let mut total = BigComplex::zero(p);
    for (r, chi) in [(1u32, 1i32), (3, -1)] {
        let u = Float::with_val(p, r) / 4u32;
        let mut part = BigComplex::zero(p);

        // direct side over w = mτ + j, z = w + u
        let rad = (xmax / tstar.to_f64()).sqrt();
        let (txf, tyf) = (tx.to_f64(), ty.to_f64());
        let mmax = (rad / tyf).ceil() as i64 + 1;
        for m in -mmax..=mmax {
            let zy = Float::with_val(p, &ty * m);
            let cx = txf * m as f64 + u.to_f64();
            let jr = rad + 1.0;
            for j in ((-cx - jr).floor() as i64)..=((-cx + jr).ceil() as i64) {
                let zx = Float::with_val(p, &tx * m) + &u + j;
                let n2 = Float::with_val(p, zx.square_ref()) + Float::with_val(p, zy.square_ref());
                let xarg = Float::with_val(p, &tstar * &n2);
                if xarg.to_f64() > xmax {
                    continue;
                }
                // Γ(2, X) = (1 + X) e^{-X}
                let g2 = Float::with_val(p, &xarg + 1u32) * Float::with_val(p, (-xarg.clone()).exp_ref());
                let w = Float::with_val(p, &g2 / Float::with_val(p, n2.square_ref()));
                part.re += Float::with_val(p, &zx * &w);
                part.im -= Float::with_val(p, &zy * &w);
            }
        }

        // dual side: ξ = a(1, -τx/τy) + b(0, 1/τy)
        let pi2 = Float::with_val(p, pi_p.square_ref());
        let dual_scale = Float::with_val(p, &pi2 / &tstar);
        let ximax = (xmax / dual_scale.to_f64()).sqrt();
        let amax = ximax.ceil() as i64 + 1;
        let mut dual = BigComplex::zero(p);
        for a in -amax..=amax {
            let xi1 = Float::with_val(p, a);
            let base2 = Float::with_val(p, -Float::with_val(p, &tx * a) / &ty);
            let c2 = base2.to_f64() * tyf;
            let br = ximax * tyf + 1.0;
            for b in ((-c2 - br).floor() as i64)..=((-c2 + br).ceil() as i64) {
                if a == 0 && b == 0 {
                    continue;
                }
                let xi2 = Float::with_val(p, &base2 + Float::with_val(p, b) / &ty);
                let n2 = Float::with_val(p, xi1.square_ref()) + Float::with_val(p, xi2.square_ref());
                let arg = Float::with_val(p, &dual_scale * &n2);
                if arg.to_f64() > xmax {
                    continue;
                }
                let e1 = Float::with_val(p, 0u32).gamma_inc(&arg);
                // e^{2πi⟨ξ,u⟩} with u real: ⟨ξ,u⟩ = ξ₁u
                let ph = Float::with_val(p, &pi_p * 2u32) * &xi1 * &u;
                let phase = BigComplex::expi(&ph);
                let xibar = BigComplex { re: xi1.clone(), im: Float::with_val(p, -&xi2) };
                dual += &(&phase * &xibar).scale(&e1);
            }
        }
        // multiply by -iπ²/A
        let factor = Float::with_val(p, &pi2 / &area);
        let dual = dual.mul_i().scale(&factor);
        part -= &dual;
        if chi > 0 {
            total += &part;
        } else {
            total -= &part;
        }
    }
    let s = total.scale_f64(1.0 / 64.0);
    let pref = Float::with_val(p, &ty * 16u32) / Float::with_val(p, pi_p.square_ref());
    Ok(Float::with_val(p, &s.re * &pref))
}
