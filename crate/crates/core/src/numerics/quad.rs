use super::{pi, pow2, BigComplex};
use crate::error::{Error, Result};
use rug::Float;

/// Tanh-sinh quadrature with step halving.
#[derive(Clone, Debug)]
pub struct Quadrature {
    /// Levels below this are never accepted as converged.
    pub min_level: u32,
    /// Step 2^-max_level is the finest tried before giving up.
    pub max_level: u32,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { min_level: 3, max_level: 12 }
    }
}

/// ∫_a^b f with estimated absolute error below `eps`.
///
/// With `endpoint_singularity` the substitution t = a + (b-a) sin²φ is applied
/// first, which turns (t-a)^{-1/2} and (b-t)^{-1/2} behavior into smooth data.
/// Near b the integrand sees a rounded t, so b - t is only known to about
/// half the working precision there.
pub fn adaptive_integrate<F>(f: F, a: &Float, b: &Float, eps: &Float, endpoint_singularity: bool) -> Result<BigComplex>
where
    F: Fn(&Float) -> BigComplex,
{
    Quadrature::default().integrate(f, a, b, eps, endpoint_singularity)
}

impl Quadrature {
    pub fn integrate<F>(&self, f: F, a: &Float, b: &Float, eps: &Float, endpoint_singularity: bool) -> Result<BigComplex>
    where
        F: Fn(&Float) -> BigComplex,
    {
        let prec = a.prec().max(b.prec());
        if !endpoint_singularity {
            return self.tanh_sinh(|x, _, _| f(x), a, b, eps, prec);
        }
        let width = Float::with_val(prec, b - a);
        let zero = Float::new(prec);
        let top = pi(prec) / 2u32;
        let quarter = Float::with_val(prec, &top / 2u32);
        let g = |phi: &Float, d0: &Float, d1: &Float| -> BigComplex {
            // d0 = phi, d1 = pi/2 - phi, both accurate near their endpoints
            let s = Float::with_val(prec, d0.sin_ref());
            let c = Float::with_val(prec, d1.sin_ref());
            let x = if *phi <= quarter {
                Float::with_val(prec, a + Float::with_val(prec, &width * Float::with_val(prec, s.square_ref())))
            } else {
                Float::with_val(prec, b - Float::with_val(prec, &width * Float::with_val(prec, c.square_ref())))
            };
            let jac = Float::with_val(prec, &width * 2u32) * &s * &c;
            f(&x).scale(&jac)
        };
        self.tanh_sinh(g, &zero, &top, eps, prec)
    }

    fn tanh_sinh<G>(&self, g: G, a: &Float, b: &Float, eps: &Float, prec: u32) -> Result<BigComplex>
    where
        G: Fn(&Float, &Float, &Float) -> BigComplex,
    {
        let half = Float::with_val(prec, b - a) / 2u32;
        let width = Float::with_val(prec, b - a);
        let mid = Float::with_val(prec, a + &half);
        let half_pi = pi(prec) / 2u32;
        let floor = pow2(prec, -(prec as i32) - 20);
        let skip_floor = pow2(prec, -(prec as i32) / 2);
        // t range: beyond tmax the node sits within 2^-(prec+20) of an endpoint
        let umax = (prec as f64 + 21.0) * std::f64::consts::LN_2 / 2.0;
        let tmax = (umax / std::f64::consts::FRAC_PI_2).asinh();

        let node = |t: f64| -> Result<BigComplex> {
            let tt = Float::with_val(prec, t.abs());
            let et = Float::with_val(prec, tt.exp_ref());
            let emt = Float::with_val(prec, et.recip_ref());
            let sinh = Float::with_val(prec, &et - &emt) / 2u32;
            let cosh = Float::with_val(prec, &et + &emt) / 2u32;
            let u = Float::with_val(prec, &half_pi * &sinh);
            let e2u = Float::with_val(prec, Float::with_val(prec, &u * 2u32).exp_ref());
            let delta = Float::with_val(prec, 2u32) / Float::with_val(prec, &e2u + 1u32);
            if delta < floor {
                return Ok(BigComplex::zero(prec));
            }
            let one_minus_s2 = Float::with_val(prec, &delta * Float::with_val(prec, 2u32 - &delta));
            let w = Float::with_val(prec, &half_pi * &cosh) * one_minus_s2 * &half;
            let off = Float::with_val(prec, &half * &delta);
            let (x, da, db) = if t == 0.0 {
                (mid.clone(), half.clone(), half.clone())
            } else if t > 0.0 {
                let x = Float::with_val(prec, b - &off);
                let da = Float::with_val(prec, &width - &off);
                (x, da, off.clone())
            } else {
                let x = Float::with_val(prec, a + &off);
                let db = Float::with_val(prec, &width - &off);
                (x, off.clone(), db)
            };
            let v = g(&x, &da, &db);
            if !v.is_finite() {
                if delta < skip_floor {
                    return Ok(BigComplex::zero(prec));
                }
                return Err(Error::NoConvergence(format!("integrand not finite at t={t}")));
            }
            Ok(v.scale(&w))
        };

        let mut sum = node(0.0)?;
        let mut j = 1i64;
        loop {
            let t = j as f64;
            if t > tmax {
                break;
            }
            sum += &node(t)?;
            sum += &node(-t)?;
            j += 1;
        }
        let mut prev = sum.clone();
        let mut last_diff = None;
        for level in 1..=self.max_level {
            let h = 2f64.powi(-(level as i32));
            let mut j = 1i64;
            loop {
                let t = j as f64 * h;
                if t > tmax {
                    break;
                }
                sum += &node(t)?;
                sum += &node(-t)?;
                j += 2;
            }
            let est = sum.scale(&Float::with_val(prec, h));
            let diff = est.dist(&prev);
            if level >= self.min_level && diff < *eps {
                return Ok(est);
            }
            last_diff = Some(diff.to_f64());
            prev = est;
        }
        Err(Error::NoConvergence(format!(
            "tanh-sinh reached level {} with difference {:e}",
            self.max_level,
            last_diff.unwrap_or(f64::NAN)
        )))
    }
}
