//! Deninger paths over the unit x-circle, integrals of ω = dX/2Y and of the
//! regulator 1-form along them, and period lattices via the AGM.

use super::curve::{Chart, NumCurve};
use crate::error::{Error, Result};
use crate::mahler::{mahler_jensen, roots_y};
use crate::modular::eisenstein;
use crate::numerics::{adaptive_integrate, format_real, pi, pow2, BigComplex};
use rug::Float;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// A θ-interval traversed on one y-branch; decreasing when start > end.
#[derive(Clone, Debug)]
pub struct Segment {
    pub theta_start: Float,
    pub theta_end: Float,
    /// 1 for |y| ≥ 1, 2 for the reciprocal root.
    pub branch: u8,
}

impl Segment {
    pub fn increasing(&self) -> bool {
        self.theta_start < self.theta_end
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    Loop,
    Arcs,
}

#[derive(Clone, Debug)]
pub struct PathSpec {
    pub k: Float,
    pub chart: Chart,
    pub kind: PathKind,
    pub segments: Vec<Segment>,
}

impl Serialize for PathSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let segs: Vec<(String, String, u8)> = self
            .segments
            .iter()
            .map(|g| (format_real(&g.theta_start, 20), format_real(&g.theta_end, 20), g.branch))
            .collect();
        let mut st = s.serialize_struct("PathSpec", 4)?;
        st.serialize_field("k", &format_real(&self.k, 20))?;
        st.serialize_field("chart", &self.chart)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("segments", &segs)?;
        st.end()
    }
}

/// The closed path over |x| = 1 for real k.
///
/// With |2cos θ + k| > 2 everywhere it is branch 1 over [-π, π]. Otherwise the
/// roots leave the unit circle only on one arc, and the path runs along
/// branch 1 with θ increasing and comes back on branch 2.
pub fn deninger_path(k: &Float, chart: Chart) -> Result<PathSpec> {
    let p = k.prec();
    let four = Float::with_val(p, 4u32);
    if Float::with_val(p, k.abs_ref()) > four {
        let pi = pi(p);
        let seg = Segment { theta_start: Float::with_val(p, -&pi), theta_end: pi, branch: 1 };
        return Ok(PathSpec { k: k.clone(), chart, kind: PathKind::Loop, segments: vec![seg] });
    }
    if k.is_zero() || Float::with_val(p, k.abs_ref()) == four {
        return Err(Error::DomainError("k = 0, ±4 give a singular curve".into()));
    }
    let (lo, hi) = if *k > 0 {
        // cos θc = (2 - k)/2, arc around θ = 0
        let tc = (Float::with_val(p, 2u32 - k) / 2u32).acos();
        (Float::with_val(p, -&tc), tc)
    } else {
        // cos θc = (-2 - k)/2, arc around θ = π
        let tc = (Float::with_val(p, -2i32 - k) / 2u32).acos();
        let other = Float::with_val(p, pi(p) * 2u32) - &tc;
        (tc, other)
    };
    let segments = vec![
        Segment { theta_start: lo.clone(), theta_end: hi.clone(), branch: 1 },
        Segment { theta_start: hi, theta_end: lo, branch: 2 },
    ];
    Ok(PathSpec { k: k.clone(), chart, kind: PathKind::Arcs, segments })
}

impl PathSpec {
    /// Positive crossing angle of an arc path.
    pub fn crossing(&self) -> Option<Float> {
        match self.kind {
            PathKind::Loop => None,
            PathKind::Arcs => {
                let s = &self.segments[0];
                Some(if s.theta_start < 0 { s.theta_end.clone() } else { s.theta_start.clone() })
            }
        }
    }

    /// (x, y) on P_k = 0 at angle θ on the given branch.
    pub fn xy(&self, theta: &Float, branch: u8) -> (BigComplex, BigComplex) {
        let x = BigComplex::expi(theta);
        let k = BigComplex::from_real(self.k.clone());
        let (y1, y2) = roots_y(&x, &k);
        (x, if branch == 1 { y1 } else { y2 })
    }

    pub fn point(&self, theta: &Float, branch: u8) -> (BigComplex, BigComplex) {
        let (x, y) = self.xy(theta, branch);
        self.chart.to_weierstrass(&x, &y)
    }

    /// Segments join up and complex conjugation reverses the path.
    pub fn check_closed_and_odd(&self, samples: usize) -> bool {
        let p = self.k.prec();
        let tol = pow2(p, -(p as i32) / 3).to_f64();
        let close = |a: &(BigComplex, BigComplex), b: &(BigComplex, BigComplex)| {
            let s = a.0.abs().to_f64().max(a.1.abs().to_f64()).max(1.0);
            a.0.dist(&b.0).to_f64() <= tol * s && a.1.dist(&b.1).to_f64() <= tol * s
        };
        let n = self.segments.len();
        for (i, seg) in self.segments.iter().enumerate() {
            let next = &self.segments[(i + 1) % n];
            let e = self.point(&seg.theta_end, seg.branch);
            let s = self.point(&next.theta_start, next.branch);
            // X = -1/(xy) is finite at the joins; rounding near the double
            // root only costs half the precision
            if !close(&e, &s) {
                return false;
            }
            for j in 1..samples {
                let t = Float::with_val(p, &seg.theta_start + Float::with_val(p, &seg.theta_end - &seg.theta_start) * (j as f64 / samples as f64));
                let mirror = Float::with_val(p, &seg.theta_start + &seg.theta_end) - &t;
                let a = self.point(&t, seg.branch);
                let b = self.point(&mirror, seg.branch);
                if !close(&(a.0.conj(), a.1.conj()), &b) {
                    return false;
                }
            }
        }
        true
    }
}

/// ∫_γ dX/2Y, using dX/2Y = i·y/(c(1 - y²)) dθ on x = e^{iθ}.
pub fn path_integral_omega(path: &PathSpec, eps: &Float) -> Result<BigComplex> {
    let p = path.k.prec();
    let c = path.chart.omega_scale(p);
    let mut total = BigComplex::zero(p);
    for seg in &path.segments {
        let f = |t: &Float| {
            let (_, y) = path.xy(t, seg.branch);
            let one_minus = &BigComplex::one(p) - &(&y * &y);
            (&y / &one_minus).mul_i().scale(&Float::with_val(p, c.recip_ref()))
        };
        total += &oriented(f, seg, eps, path.kind == PathKind::Arcs)?;
    }
    Ok(total)
}

fn oriented<F: Fn(&Float) -> BigComplex>(f: F, seg: &Segment, eps: &Float, singular: bool) -> Result<BigComplex> {
    let n = Float::with_val(eps.prec(), eps / 4u32);
    if seg.increasing() {
        adaptive_integrate(f, &seg.theta_start, &seg.theta_end, &n, singular)
    } else {
        Ok(-adaptive_integrate(f, &seg.theta_end, &seg.theta_start, &n, singular)?)
    }
}

/// A Milnor symbol {a, b} with a, b monomials x^i y^j.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub a: (i32, i32),
    pub b: (i32, i32),
}

impl Symbol {
    /// {x, y} for the first chart, {xy, x/y} for the second.
    pub fn m1(chart: Chart) -> Self {
        match chart {
            Chart::Plain => Symbol { a: (1, 0), b: (0, 1) },
            Chart::Scaled => Symbol { a: (1, 1), b: (1, -1) },
        }
    }
}

/// (1/2π)∫_γ log|a| d arg b - log|b| d arg a by direct quadrature.
pub fn pairing_direct(path: &PathSpec, sym: Symbol, eps: &Float) -> Result<Float> {
    let p = path.k.prec();
    let mut total = BigComplex::zero(p);
    for seg in &path.segments {
        let f = |t: &Float| {
            let (x, y) = path.xy(t, seg.branch);
            // x' = ix, y' = -w'y²/(y² - 1), w' = i(x - 1/x)
            let dx = x.mul_i();
            let wp = (&x - &x.recip()).mul_i();
            let y2 = &y * &y;
            let dy = -&(&(&wp * &y2) / &(&y2 - &BigComplex::one(p)));
            let lx = Float::with_val(p, x.abs().ln_ref());
            let ly = Float::with_val(p, y.abs().ln_ref());
            let dlx = &dx / &x;
            let dly = &dy / &y;
            let log_abs = |m: (i32, i32)| Float::with_val(p, &lx * m.0) + Float::with_val(p, &ly * m.1);
            let darg = |m: (i32, i32)| Float::with_val(p, &dlx.im * m.0) + Float::with_val(p, &dly.im * m.1);
            let v = Float::with_val(p, log_abs(sym.a) * darg(sym.b)) - Float::with_val(p, log_abs(sym.b) * darg(sym.a));
            BigComplex::from_real(v)
        };
        total += &oriented(f, seg, eps, path.kind == PathKind::Arcs)?;
    }
    Ok(total.re / (pi(p) * 2u32))
}

/// Coefficient n with ⟨γ, M₁⟩ = n·m(k): each segment contributes ∓2πm(k)
/// to ∫ log|y| dθ with the orientation conventions above.
pub fn m1_coefficient(path: &PathSpec) -> i64 {
    let per = match path.chart {
        Chart::Plain => -1,
        Chart::Scaled => 2,
    };
    per * path.segments.len() as i64
}

/// ⟨γ, M₁⟩ from the Jensen closed form.
pub fn pairing_closed_form(path: &PathSpec, eps: &Float) -> Result<Float> {
    let m = mahler_jensen(&BigComplex::from_real(path.k.clone()), eps)?;
    Ok(m * m1_coefficient(path))
}

/// A reduced basis of the lattice of dX/2Y and its primitive purely
/// imaginary vector.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodLattice {
    pub w1: BigComplex,
    pub w2: BigComplex,
    pub imaginary: BigComplex,
}

/// Roots of X³ + a2X² + a4X + a6 by Durand–Kerner.
pub fn cubic_roots(c: &NumCurve) -> Result<[BigComplex; 3]> {
    let p = c.a2.prec();
    let f = |x: &BigComplex| c.rhs(x);
    let seed = BigComplex::from_f64(p, 0.4, 0.9);
    let r = 1.0 + c.a2.abs().to_f64().max(c.a4.abs().to_f64()).max(c.a6.abs().to_f64());
    let mut z = [seed.scale_f64(r), (&seed * &seed).scale_f64(r), (&(&seed * &seed) * &seed).scale_f64(r)];
    let tol = pow2(p, -(p as i32) + 16).to_f64() * r;
    for _ in 0..2000 {
        let mut delta = 0f64;
        for i in 0..3 {
            let mut den = BigComplex::one(p);
            for j in 0..3 {
                if i != j {
                    den = &den * &(&z[i] - &z[j]);
                }
            }
            let step = &f(&z[i]) / &den;
            delta = delta.max(step.abs().to_f64());
            z[i] = &z[i] - &step;
        }
        if delta <= tol {
            return Ok(z);
        }
    }
    Err(Error::NoConvergence("cubic roots".into()))
}

fn frac(z: &BigComplex, n: u32, d: u32) -> BigComplex {
    let q = Float::with_val(z.prec(), n) / d;
    z.scale(&q)
}

fn agm(a: &BigComplex, b: &BigComplex) -> BigComplex {
    let p = a.prec();
    let (mut a, mut b) = (a.clone(), b.clone());
    let tol = pow2(p, -(p as i32) + 4).to_f64();
    for _ in 0..200 {
        if a.dist(&b).to_f64() <= tol * a.abs().to_f64() {
            break;
        }
        let an = (&a + &b).scale_f64(0.5);
        let mut bn = (&a * &b).sqrt();
        // the optimal choice keeps b on the side of a
        if (&an - &bn).abs() > (&an + &bn).abs() {
            bn = -bn;
        }
        a = an;
        b = bn;
    }
    a
}

fn gauss_reduce(mut w1: BigComplex, mut w2: BigComplex) -> (BigComplex, BigComplex) {
    if w2.abs() < w1.abs() {
        std::mem::swap(&mut w1, &mut w2);
    }
    for _ in 0..200 {
        let t = &w2 / &w1;
        let m = t.re.to_f64().round();
        if m != 0.0 {
            w2 = &w2 - &w1.scale_f64(m);
        }
        if w2.abs() < w1.abs() {
            std::mem::swap(&mut w1, &mut w2);
        } else {
            break;
        }
    }
    if (&w2 / &w1).im < 0 {
        w2 = -w2;
    }
    (w1, w2)
}

/// Periods of dX/2Y on the curve in one complex embedding.
///
/// Candidate bases come from the AGM on differences of the 2-torsion
/// abscissae; a candidate is kept only if its Eisenstein invariants
/// reproduce g₂, g₃ of the curve.
pub fn fundamental_periods(c: &NumCurve) -> Result<PeriodLattice> {
    let p = c.a2.prec();
    let e = cubic_roots(c)?;
    let pi_p = BigComplex::from_real(pi(p));
    // Y² = x³ + Ax + B after X = x - a2/3
    let a2sq = &c.a2 * &c.a2;
    let big_a = &c.a4 - &frac(&a2sq, 1, 3);
    let big_b = &(&c.a6 - &frac(&(&c.a2 * &c.a4), 1, 3)) + &frac(&(&a2sq * &c.a2), 2, 27);
    let g2 = big_a.scale_f64(-4.0);
    let g3 = big_b.scale_f64(-4.0);
    let tol = pow2(p, -(p as i32) / 2).to_f64();
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for pm in perms {
        let (e1, e2, e3) = (&e[pm[0]], &e[pm[1]], &e[pm[2]]);
        let s13 = (e1 - e3).sqrt();
        let w1 = &pi_p / &agm(&s13, &(e1 - e2).sqrt());
        let w2 = (&pi_p / &agm(&s13, &(e2 - e3).sqrt())).mul_i();
        if (&w2 / &w1).im.clone().abs() < tol {
            continue;
        }
        let (w1, w2) = gauss_reduce(w1, w2);
        let tau = &w2 / &w1;
        let e4 = eisenstein(4, &tau)?;
        let e6 = eisenstein(6, &tau)?;
        let pi4 = pi_p.powi(4);
        let cg2 = &(&e4 * &frac(&pi4, 4, 3)) / &w1.powi(4);
        let cg3 = &(&e6 * &frac(&(&pi4 * &(&pi_p * &pi_p)), 8, 27)) / &w1.powi(6);
        let scale2 = g2.abs().to_f64().max(1.0);
        let scale3 = g3.abs().to_f64().max(1.0);
        if cg2.dist(&g2).to_f64() <= tol * scale2 && cg3.dist(&g3).to_f64() <= tol * scale3 {
            let imaginary = imaginary_generator(&w1, &w2)?;
            return Ok(PeriodLattice { w1, w2, imaginary });
        }
    }
    Err(Error::AgmBranchFailure("no branch choice reproduces g2, g3".into()))
}

fn imaginary_generator(w1: &BigComplex, w2: &BigComplex) -> Result<BigComplex> {
    let p = w1.prec();
    let tol = pow2(p, -(p as i32) / 2).to_f64();
    let mut best: Option<BigComplex> = None;
    for m in -4i32..=4 {
        for n in -4i32..=4 {
            if m == 0 && n == 0 {
                continue;
            }
            let v = &w1.scale_f64(m as f64) + &w2.scale_f64(n as f64);
            if v.re.to_f64().abs() > tol * v.abs().to_f64() {
                continue;
            }
            let v = if v.im < 0 { -v } else { v };
            if best.as_ref().map_or(true, |b| v.abs() < b.abs()) {
                best = Some(v);
            }
        }
    }
    best.ok_or_else(|| Error::NotFound("no purely imaginary period with small coordinates".into()))
}
