//! Per-case pipeline: isogeny identities, pushforward multipliers, the
//! pairing matrix and the comparison of R with const/π⁴·L(E, 2).

use super::curve::{curve_from_k, isomorphism_between, point_distance, velu_isogeny, Curve, Isogeny, Isomorphism, Point};
use super::field::QuadFieldElem;
use super::paths::{
    deninger_path, fundamental_periods, pairing_closed_form, pairing_direct, path_integral_omega, PathSpec, Symbol,
};
use crate::error::{Error, Result};
use crate::kexpr;
use crate::lvalues::{coefficients, extract_conjugate_pair, identity_table, lvalue2, FormSpec, LOptions};
use crate::mahler::mahler_jensen;
use crate::numerics::{pi, ser_float, BigComplex};
use crate::paperdata::{case_dossier, CaseDossier, CaseLData};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Float;
use serde::Serialize;

/// Which curve of a case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

/// The pair (E, E^σ) of a case.
pub fn case_curves(case: &CaseDossier) -> (Curve, Curve) {
    let e = curve_from_k(&case.k2, case.chart);
    let es = e.conj();
    (e, es)
}

fn k_value(case: &CaseDossier, side: Side, prec: u32) -> Result<Float> {
    let s = match side {
        Side::Plus => case.k.0,
        Side::Minus => case.k.1,
    };
    Ok(kexpr::parse(s, prec)?.re)
}

/// γ_E (plus) or γ_{E^σ} (minus).
pub fn case_path(case: &CaseDossier, side: Side, prec: u32) -> Result<PathSpec> {
    deninger_path(&k_value(case, side, prec)?, case.chart)
}

/// The printed map φ: E → E^σ as an isogeny.
pub fn printed_isogeny(case: &CaseDossier) -> Isogeny {
    let (e, es) = case_curves(case);
    Isogeny {
        domain: e,
        codomain: es,
        x_map: case.x_map.clone(),
        y_map: case.y_map.clone(),
        degree: case.degree,
        kernel: case.kernel.clone(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IsogenyReport {
    pub case: String,
    pub degree: u32,
    /// Printed intermediate curve and its x-map agree with Vélu (when printed).
    pub intermediate_matches: Option<bool>,
    pub isomorphism: Isomorphism,
    /// The printed (u, r) is the one found (when printed).
    pub twist_matches: Option<bool>,
    /// Vélu followed by the isomorphism equals the printed maps exactly.
    pub maps_match_exact: bool,
    pub map_residual: f64,
    pub codomain_residual: f64,
    pub kernel_divides_denominator: bool,
    pub kernel_point_to_infinity: Option<bool>,
    pub composition: i64,
    pub composition_residual: f64,
    pub multiplier: String,
    pub multiplier_numeric: (f64, f64),
    pub multiplier_residual: f64,
    /// 1/u equals the printed multiplier.
    pub multiplier_exact: bool,
    pub points: usize,
    pub passed: bool,
}

/// Exact and numeric checks of the printed isogeny of a case.
///
/// Numeric checks use `points` random points at `prec` bits; maps and
/// compositions pass at 1e-25, the multiplier at 1e-20.
pub fn check_isogeny_identities(case: &CaseDossier, points: usize, prec: u32) -> Result<IsogenyReport> {
    let (e, es) = case_curves(case);
    let velu = velu_isogeny(&e, &case.kernel)?;
    let intermediate_matches = case.intermediate.as_ref().map(|(a2, a4, a6)| {
        let cod = &velu.codomain;
        let same_curve = cod.a2 == *a2 && cod.a4 == *a4 && cod.a6 == *a6;
        same_curve && case.intermediate_x_map.as_ref().map_or(true, |m| m.same_as(&velu.x_map))
    });
    let printed = printed_isogeny(case);
    // the isomorphism is fixed up to ±1; the printed Y-map picks the sign
    let base = isomorphism_between(&velu.codomain, &es)?;
    let flipped = Isomorphism { u: -&base.u, r: base.r.clone() };
    let iso = if velu.followed_by(&flipped, &es).y_map.same_as(&printed.y_map) { flipped } else { base };
    let composed = velu.followed_by(&iso, &es);
    let maps_match_exact = composed.x_map.same_as(&printed.x_map) && composed.y_map.same_as(&printed.y_map);
    let twist_matches = case.twist.as_ref().map(|(u, r)| iso.u == *u && iso.r == *r);
    let kernel_divides_denominator = printed.x_map.den.rem(&case.kernel)?.is_zero();
    let kernel_point_to_infinity = match case.kernel_point {
        Some((xs, ys)) => {
            let pt = Point::Affine(kexpr::parse(xs, prec)?, kexpr::parse(ys, prec)?);
            let on_curve = e.numeric(prec).residual(&pt) < 1e-30;
            Some(on_curve && matches!(printed.apply(&pt), Point::Infinity))
        }
        None => None,
    };
    let multiplier_exact = iso.u.inv()? == case.multiplier;

    let ne = e.numeric(prec);
    let nes = es.numeric(prec);
    let back = printed.conj();
    let c = case.multiplier.eval_c(prec);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ case.degree as u64);
    let (mut map_res, mut cod_res, mut comp_res, mut mult_res) = (0f64, 0f64, 0f64, 0f64);
    let mut mult_num = BigComplex::zero(prec);
    for _ in 0..points {
        let p = ne.random_point(&mut rng, prec);
        let img = printed.apply(&p);
        map_res = map_res.max(point_distance(&img, &composed.apply(&p)));
        cod_res = cod_res.max(nes.residual(&img));
        comp_res = comp_res.max(point_distance(&back.apply(&img), &ne.mul(case.composition, &p)));
        if let Point::Affine(x, _) = &p {
            mult_num = printed.differential_ratio(x);
            mult_res = mult_res.max(mult_num.dist(&c).to_f64() / c.abs().to_f64());
        }
    }
    let passed = intermediate_matches.unwrap_or(true)
        && twist_matches.unwrap_or(true)
        && kernel_point_to_infinity.unwrap_or(true)
        && maps_match_exact
        && kernel_divides_denominator
        && multiplier_exact
        && map_res < 1e-25
        && cod_res < 1e-25
        && comp_res < 1e-25
        && mult_res < 1e-20;
    Ok(IsogenyReport {
        case: case.id.to_string(),
        degree: velu.degree,
        intermediate_matches,
        isomorphism: iso,
        twist_matches,
        maps_match_exact,
        map_residual: map_res,
        codomain_residual: cod_res,
        kernel_divides_denominator,
        kernel_point_to_infinity,
        composition: case.composition,
        composition_residual: comp_res,
        multiplier: case.multiplier.to_string(),
        multiplier_numeric: mult_num.to_f64(),
        multiplier_residual: mult_res,
        multiplier_exact,
        points,
        passed,
    })
}

/// Pushforward data: ∫ω over both paths, their period certificates and
/// the integers a, b with φ_*γ_E = aγ_{E^σ}, (φ^σ)_*γ_{E^σ} = bγ_E.
#[derive(Clone, Debug, Serialize)]
pub struct Pushforward {
    pub omega_plus: BigComplex,
    pub omega_minus: BigComplex,
    /// ∫_γ ω divided by the primitive imaginary period, per side.
    pub period_ratio_plus: BigComplex,
    pub period_ratio_minus: BigComplex,
    pub a: i64,
    pub b: i64,
    pub a_residual: f64,
    pub b_residual: f64,
}

fn nearest_integer(z: &BigComplex, what: &str) -> Result<(i64, f64)> {
    let n = z.re.to_f64().round();
    let res = z.dist(&BigComplex::from_f64(z.prec(), n, 0.0)).to_f64();
    if res >= 1e-8 {
        return Err(Error::NotNearInteger(format!("{what} = {:?}, off by {res:e}", z.to_f64())));
    }
    Ok((n as i64, res))
}

/// a = c·∫_{γ_E}ω / ∫_{γ_{E^σ}}ω and b = σ(c)·∫_{γ_{E^σ}}ω / ∫_{γ_E}ω.
///
/// `multiplier` is c in φ*ω_{E^σ} = c·ω_E; the composition check a·b = n is
/// exact.
pub fn pushforward_multipliers(
    plus: &PathSpec,
    minus: &PathSpec,
    curves: (&Curve, &Curve),
    multiplier: &QuadFieldElem,
    composition: i64,
    eps: &Float,
) -> Result<Pushforward> {
    let p = plus.k.prec();
    let op = path_integral_omega(plus, eps)?;
    let om = path_integral_omega(minus, eps)?;
    let ratio = |om: &BigComplex, c: &Curve| -> Result<BigComplex> {
        let lat = fundamental_periods(&c.numeric(p))?;
        Ok(om / &lat.imaginary)
    };
    let rp = ratio(&op, curves.0)?;
    let rm = ratio(&om, curves.1)?;
    for r in [&rp, &rm] {
        if (r.re.to_f64().abs() - 1.0).abs() > 1e-10 || r.im.to_f64().abs() > 1e-10 {
            return Err(Error::NotFound(format!("path is not a generator: ratio {:?}", r.to_f64())));
        }
    }
    let c = multiplier.eval_c(p);
    let cs = multiplier.conj().eval_c(p);
    let (a, ares) = nearest_integer(&(&(&c * &op) / &om), "a")?;
    let (b, bres) = nearest_integer(&(&(&cs * &om) / &op), "b")?;
    if a * b != composition {
        return Err(Error::NotNearInteger(format!("a·b = {} but φ^σ∘φ = [{composition}]", a * b)));
    }
    Ok(Pushforward {
        omega_plus: op,
        omega_minus: om,
        period_ratio_plus: rp,
        period_ratio_minus: rm,
        a,
        b,
        a_residual: ares,
        b_residual: bres,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PairingEntry {
    #[serde(serialize_with = "ser_float")]
    pub direct: Float,
    #[serde(serialize_with = "ser_float")]
    pub closed_form: Float,
    pub difference: f64,
}

/// ⟨γ, M₁⟩ both by quadrature and from m(k).
pub fn regulator_pairing(path: &PathSpec, eps: &Float) -> Result<PairingEntry> {
    let direct = pairing_direct(path, Symbol::m1(path.chart), eps)?;
    let closed_form = pairing_closed_form(path, eps)?;
    let difference = Float::with_val(direct.prec(), &direct - &closed_form).abs().to_f64();
    Ok(PairingEntry { direct, closed_form, difference })
}

#[derive(Clone, Debug)]
pub struct RegulatorOptions {
    pub prec: u32,
    /// Target for path integrals and Mahler measures.
    pub eps: f64,
    /// Target for each L-value.
    pub l_eps: f64,
    /// Random points in the isogeny checks.
    pub points: usize,
    /// Exchange the roles of E and E^σ.
    pub swapped: bool,
}

impl Default for RegulatorOptions {
    fn default() -> Self {
        RegulatorOptions { prec: 256, eps: 1e-30, l_eps: 1e-20, points: 20, swapped: false }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LData {
    /// L-values of the two forms (complex for a conjugate pair).
    pub l_f: BigComplex,
    pub l_g: BigComplex,
    #[serde(serialize_with = "ser_float")]
    pub l_e: Float,
    pub forms: [String; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct RegulatorReport {
    pub case: String,
    pub swapped: bool,
    pub k_plus: String,
    pub k_minus: String,
    #[serde(serialize_with = "ser_float")]
    pub m_plus: Float,
    #[serde(serialize_with = "ser_float")]
    pub m_minus: Float,
    pub paths: [PathSpec; 2],
    pub pushforward: Pushforward,
    /// ⟨γ_E, M₁⟩ and ⟨γ_{E^σ}, M₁⟩.
    pub m1_pairings: [PairingEntry; 2],
    /// Rows M₁, M₂; columns γ_E, γ_{E^σ}.
    pub matrix: [[String; 2]; 2],
    #[serde(serialize_with = "ser_float")]
    pub regulator: Float,
    /// |c₊m₊² + c₋m₋²| with the printed coefficients.
    #[serde(serialize_with = "ser_float")]
    pub regulator_printed_form: Float,
    pub constant: u64,
    pub l_values: LData,
    #[serde(serialize_with = "ser_float")]
    pub predicted: Float,
    pub residual: f64,
    pub isogeny: Option<IsogenyReport>,
    pub passed: bool,
}

fn case_l_values(case: &CaseDossier, opts: &RegulatorOptions) -> Result<LData> {
    let p = opts.prec;
    let lopts = LOptions { prec: p, ..LOptions::auto() };
    match &case.ldata {
        CaseLData::Product { f, g } => {
            let lf = lvalue2(f, opts.l_eps, &lopts)?.value;
            let lg = lvalue2(g, opts.l_eps, &lopts)?.value;
            let l_e = Float::with_val(p, &lf * &lg);
            Ok(LData {
                l_f: BigComplex::from_real(lf),
                l_g: BigComplex::from_real(lg),
                l_e,
                forms: [case.labels.newforms[0].into(), case.labels.newforms[1].into()],
            })
        }
        CaseLData::ConjugatePair { rows, alpha, beta } => {
            let table = identity_table();
            let row_form = |r: usize| -> Result<FormSpec> {
                table.iter().find(|x| x.row == r).map(|x| x.form.clone()).ok_or_else(|| Error::NotFound(format!("row {r}")))
            };
            let l1 = lvalue2(&row_form(rows.0)?, opts.l_eps, &lopts)?.value;
            let l2 = lvalue2(&row_form(rows.1)?, opts.l_eps, &lopts)?.value;
            // a dilation τ ↦ dτ divides L(·, 2) by d²
            let effective = |terms: &[(&str, u32)]| -> Result<BigComplex> {
                let mut s = BigComplex::zero(p);
                for (v, d) in terms {
                    s += &kexpr::parse(v, p)?.scale_f64(1.0 / f64::from(d * d));
                }
                Ok(s)
            };
            let (lf, lg) = extract_conjugate_pair(
                &BigComplex::from_real(l1),
                &BigComplex::from_real(l2),
                &effective(alpha)?,
                &effective(beta)?,
                opts.l_eps * 1e3,
            )?;
            let l_e = (&lf * &lg).re;
            Ok(LData { l_f: lf, l_g: lg, l_e, forms: [case.labels.newforms[0].into(), case.labels.newforms[1].into()] })
        }
    }
}

/// The full verification of one case: R from the pairing matrix against
/// const/π⁴·L(E, 2). Passes when the residual is below 1e-8, the direct and
/// closed-form pairings agree to 1e-6 and the isogeny checks pass.
pub fn regulator_case(case_id: &str, opts: &RegulatorOptions) -> Result<RegulatorReport> {
    let case = case_dossier(case_id)?;
    let p = opts.prec;
    let eps = Float::with_val(p, opts.eps);
    let isogeny = check_isogeny_identities(&case, opts.points, p.min(192))?;
    let (e, es) = case_curves(&case);
    let (mut sp, mut sm) = (Side::Plus, Side::Minus);
    let (mut ce, mut ces) = (&e, &es);
    let mut mult = case.multiplier.clone();
    if opts.swapped {
        // φ^σ: E^σ → E with multiplier σ(c)
        std::mem::swap(&mut sp, &mut sm);
        std::mem::swap(&mut ce, &mut ces);
        mult = mult.conj();
    }
    let plus = case_path(&case, sp, p)?;
    let minus = case_path(&case, sm, p)?;
    let push = pushforward_multipliers(&plus, &minus, (ce, ces), &mult, case.composition, &eps)?;
    let m_plus = mahler_jensen(&BigComplex::from_real(plus.k.clone()), &eps)?;
    let m_minus = mahler_jensen(&BigComplex::from_real(minus.k.clone()), &eps)?;
    let pe = regulator_pairing(&plus, &eps)?;
    let pes = regulator_pairing(&minus, &eps)?;
    let (x, y) = (&pe.closed_form, &pes.closed_form);
    let row2 = [Float::with_val(p, y * push.a), Float::with_val(p, x * push.b)];
    let det = Float::with_val(p, x * &row2[1]) - Float::with_val(p, y * &row2[0]);
    let regulator = det.abs();
    let (cp, cm) = if opts.swapped { (case.r_coeffs.1, case.r_coeffs.0) } else { case.r_coeffs };
    let printed = (Float::with_val(p, m_plus.square_ref()) * cp + Float::with_val(p, m_minus.square_ref()) * cm).abs();
    let l_values = case_l_values(&case, opts)?;
    let pi4 = Float::with_val(p, pi(p).square_ref()).square();
    let predicted = Float::with_val(p, &l_values.l_e * case.constant) / pi4;
    let residual = Float::with_val(p, &regulator - &predicted).abs().to_f64();
    let fmt = |v: &Float| crate::numerics::format_real(v, 30);
    let matrix = [[fmt(x), fmt(y)], [fmt(&row2[0]), fmt(&row2[1])]];
    let passed = residual < 1e-8
        && pe.difference < 1e-6
        && pes.difference < 1e-6
        && Float::with_val(p, &regulator - &printed).abs() < 1e-8
        && regulator > 0
        && isogeny.passed;
    Ok(RegulatorReport {
        case: case.id.to_string(),
        swapped: opts.swapped,
        k_plus: if opts.swapped { case.k.1 } else { case.k.0 }.to_string(),
        k_minus: if opts.swapped { case.k.0 } else { case.k.1 }.to_string(),
        m_plus,
        m_minus,
        paths: [plus, minus],
        pushforward: push,
        m1_pairings: [pe, pes],
        matrix,
        regulator,
        regulator_printed_form: printed,
        constant: case.constant,
        l_values,
        predicted,
        residual,
        isogeny: Some(isogeny),
        passed,
    })
}

/// Coefficients a_1..a_nmax (index 0 unused) of the first newform of a case.
///
/// For a conjugate pair they are solved from θ_i = Σ_j 2Re(c_ij f(d_jτ)),
/// one unknown a_n at a time starting from the smallest dilation.
pub fn newform_coefficients(case: &CaseDossier, nmax: usize) -> Result<Vec<(f64, f64)>> {
    match &case.ldata {
        CaseLData::Product { f, .. } => {
            let c = coefficients(f, nmax)?;
            Ok(c.iter().map(|v| (v.to_f64(), 0.0)).collect())
        }
        CaseLData::ConjugatePair { rows, alpha, beta } => {
            if alpha.iter().map(|t| t.1).ne(beta.iter().map(|t| t.1)) || alpha.is_empty() {
                return Err(Error::DomainError("α and β need the same dilations".into()));
            }
            let dil: Vec<usize> = alpha.iter().map(|t| t.1 as usize).collect();
            let dmin = *dil.iter().min().expect("nonempty");
            let parse = |v: &[(&str, u32)]| -> Result<Vec<(f64, f64)>> {
                v.iter().map(|(s, _)| Ok(kexpr::parse(s, 64)?.to_f64())).collect()
            };
            let cs = [parse(alpha)?, parse(beta)?];
            let table = identity_table();
            let mut th = Vec::new();
            for r in [rows.0, rows.1] {
                let form = &table.iter().find(|x| x.row == r).ok_or_else(|| Error::NotFound(format!("row {r}")))?.form;
                th.push(coefficients(form, dmin * nmax)?.iter().map(|v| v.to_f64()).collect::<Vec<f64>>());
            }
            let jmin = dil.iter().position(|&d| d == dmin).expect("present");
            let re2 = |c: (f64, f64), a: (f64, f64)| 2.0 * (c.0 * a.0 - c.1 * a.1);
            let mut a = vec![(0.0, 0.0); nmax + 1];
            for n in 1..=nmax {
                let big = dmin * n;
                let mut rhs = [th[0][big], th[1][big]];
                for (j, &d) in dil.iter().enumerate() {
                    if j != jmin && big % d == 0 {
                        for i in 0..2 {
                            rhs[i] -= re2(cs[i][j], a[big / d]);
                        }
                    }
                }
                // 2Re(c·(x + iy)) = 2c_re·x - 2c_im·y
                let m = [[2.0 * cs[0][jmin].0, -2.0 * cs[0][jmin].1], [2.0 * cs[1][jmin].0, -2.0 * cs[1][jmin].1]];
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                if det.abs() < 1e-12 {
                    return Err(Error::SingularSystem);
                }
                a[n] = ((rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det, (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det);
            }
            Ok(a)
        }
    }
}
