//! Reference tables embedded as data: the CM-point table and the 35
//! Mahler measure identities, plus helpers to parse their printed values.

use crate::beilinson::{Chart, KPoly, QuadFieldElem, RatFn};
use crate::error::{Error, Result};
use crate::lvalues::FormSpec;
use crate::qseries::ThetaSpec;
use crate::quadforms::QuadForm;
use serde::Serialize;

/// One printed row of the CM-point table.
#[derive(Clone, Debug, Serialize)]
pub struct PrintedCmRow {
    pub triple: QuadForm,
    pub h2: u64,
    pub product: u64,
    pub lambda: &'static str,
}

const T1: [((i64, i64, i64), u64, u64, &str); 47] = [
    ((2, -2, 1), 1, 1, "-1.0000"),
    ((4, 0, 1), 1, 1, "0.50000"),
    ((8, -4, 1), 1, 1, "2.0000"),
    ((16, 16, 5), 1, 2, "-32.970"),
    ((16, 0, 1), 1, 2, "0.97056"),
    ((1, 0, 1), 1, 2, "0.029437"),
    ((5, -4, 1), 1, 2, "33.970"),
    ((4, -4, 5), 1, 4, "-0.030330"),
    ((20, -4, 1), 1, 4, "1.03033"),
    ((8, 8, 3), 1, 2, "-4.8284"),
    ((8, 0, 1), 1, 2, "0.82842"),
    ((2, 0, 1), 1, 2, "0.17157"),
    ((6, 4, 1), 1, 2, "5.8284"),
    ((4, 4, 3), 1, 4, "-0.20710"),
    ((12, 4, 1), 1, 4, "1.20710"),
    ((3, 3, 1), 1, 2, "-13.928"),
    ((1, 1, 1), 1, 2, "-0.071796"),
    ((16, 4, 1), 1, 2, "1.07179"),
    ((16, 12, 3), 1, 2, "14.928"),
    ((4, 0, 3), 1, 4, "0.066987"),
    ((12, 0, 1), 1, 4, "0.93301"),
    ((4, 2, 1), 1, 1, "0.50000-0.86602i"),
    ((4, -2, 1), 1, 1, "0.50000+0.86602i"),
    ((7, 7, 2), 1, 2, "-253.99"),
    ((1, 1, 2), 1, 2, "-0.0039370"),
    ((32, 4, 1), 1, 2, "1.0039"),
    ((32, 28, 7), 1, 2, "254.99"),
    ((4, 0, 7), 1, 4, "0.0039216"),
    ((28, 0, 1), 1, 4, "0.99607"),
    ((2, 1, 1), 1, 1, "0.031250-0.24803i"),
    ((2, -1, 1), 1, 1, "0.031250+0.24803i"),
    ((4, 3, 1), 1, 1, "0.50000-3.9686i"),
    ((4, -3, 1), 1, 1, "0.50000+3.9686i"),
    ((8, 2, 1), 1, 1, "0.96875-0.24803i"),
    ((8, -2, 1), 1, 1, "0.96875+0.24803i"),
    ((4, -1, 1), 2, 4, "0.50000+0.30096i"),
    ((4, 1, 1), 2, 4, "0.50000-0.30096i"),
    ((8, 7, 2), 2, 4, "0.50000-27.411i"),
    ((8, -7, 2), 2, 4, "0.50000+27.411i"),
    ((2, 1, 2), 2, 4, "0.00066519-0.036468i"),
    ((2, -1, 2), 2, 4, "0.00066519+0.036468i"),
    ((6, 3, 1), 2, 4, "1.4680-0.88368i"),
    ((6, -3, 1), 2, 4, "1.4680+0.88368i"),
    ((8, 6, 3), 2, 4, "-0.46808-0.88368i"),
    ((8, -6, 3), 2, 4, "-0.46808+0.88368i"),
    ((16, 2, 1), 2, 4, "0.99933-0.036468i"),
    ((16, -2, 1), 2, 4, "0.99933+0.036468i"),
];

pub fn table1() -> Vec<PrintedCmRow> {
    T1.iter()
        .map(|&((a, b, c), h2, product, lambda)| PrintedCmRow { triple: QuadForm::new(a, b, c), h2, product, lambda })
        .collect()
}

/// Discriminants of class number one, in printed order.
pub const CLASS_NUMBER_1: [i64; 13] = [-3, -4, -7, -8, -11, -12, -16, -19, -27, -28, -43, -67, -163];

/// Discriminants of class number two, in printed order.
pub const CLASS_NUMBER_2: [i64; 29] = [
    -15, -20, -24, -32, -35, -36, -40, -48, -51, -52, -60, -64, -72, -75, -88, -91, -99, -100, -112, -115, -123,
    -147, -148, -187, -232, -235, -267, -403, -427,
];

/// A printed decimal complex number with the size of one unit in the last
/// printed digit of each part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrintedComplex {
    pub re: f64,
    pub im: f64,
    pub re_ulp: f64,
    pub im_ulp: f64,
}

impl PrintedComplex {
    /// True when both parts of `(re, im)` lie within one printed unit.
    /// Printed values are truncated as often as rounded, so one unit is the
    /// honest tolerance.
    pub fn matches(&self, re: f64, im: f64) -> bool {
        (re - self.re).abs() <= self.re_ulp * 1.0001 && (im - self.im).abs() <= self.im_ulp * 1.0001
    }
}

fn decimal_ulp(s: &str) -> f64 {
    match s.find('.') {
        Some(i) => 10f64.powi(-((s.len() - i - 1) as i32)),
        None => 1.0,
    }
}

/// Parses strings such as "-1.0000", "0.50000-0.86602i" or "0.5+3i".
pub fn parse_printed_complex(s: &str) -> Result<PrintedComplex> {
    let s = s.trim().replace('−', "-");
    let err = || Error::Parse(format!("cannot read complex value {s:?}"));
    if let Some(body) = s.strip_suffix('i') {
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .last()
            .map(|(i, _)| i);
        let (re_s, im_s) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im_digits = im_s.trim_start_matches(['+', '-']);
        Ok(PrintedComplex {
            re: re_s.parse().map_err(|_| err())?,
            im: im_s.parse().map_err(|_| err())?,
            re_ulp: decimal_ulp(re_s),
            im_ulp: decimal_ulp(im_digits),
        })
    } else {
        // a printed real number still gets a unit of slack in the imaginary part
        let ulp = decimal_ulp(&s);
        Ok(PrintedComplex { re: s.parse().map_err(|_| err())?, im: 0.0, re_ulp: ulp, im_ulp: ulp })
    }
}

/// One printed row of the identity table: m(k) = c_k L(f_k, 2) with
/// c_k = r√s/π² and f_k a theta series.
#[derive(Clone, Debug, Serialize)]
pub struct PrintedIdentity {
    /// Row number, 1-based.
    pub row: usize,
    /// k as printed, in the syntax accepted by `kexpr::parse`.
    pub k: &'static str,
    /// c_k·π² = r·√s.
    pub c_rational: (i64, i64),
    pub c_sqrt: i64,
    pub level: u64,
    pub theta: ThetaSpec,
    /// The CM point of the matching CM-table row.
    pub cm_point: QuadForm,
}

#[allow(clippy::type_complexity)]
const T2: [(&str, (i64, i64), i64, u64, (i64, i64), i64, i64, (i64, i64, i64)); 35] = [
    ("4i", (16, 1), 1, 32, (1, 2), 2, 1, (8, 4, 1)),
    ("4*sqrt(2)", (16, 1), 1, 64, (1, 2), 0, 1, (4, 0, 1)),
    ("2*sqrt(2)", (8, 1), 1, 32, (1, 2), 1, 1, (2, 2, 1)),
    ("root4(8)*(sqrt(2)-1)*i", (8, 1), 1, 64, (1, 2), -2, 1, (5, -4, 1)),
    ("root4(8)*(sqrt(2)+1)", (8, 1), 1, 64, (1, 2), 0, 1, (1, 0, 1)),
    ("12+8*sqrt(2)", (32, 1), 1, 64, (1, 2), 0, 1, (16, 0, 1)),
    ("12-8*sqrt(2)", (64, 1), 1, 64, (1, 4), 8, 5, (16, 16, 5)),
    ("8i*sqrt(4+3*sqrt(2))", (32, 1), 1, 256, (1, 2), 2, 1, (20, 4, 1)),
    ("8*sqrt(3*sqrt(2)-4)", (256, 1), 1, 256, (1, 16), 2, 5, (4, 4, 5)),
    ("4i/sqrt(2*sqrt(2)+2)", (8, 1), 2, 64, (1, 2), -2, 1, (6, -4, 1)),
    ("4/sqrt(2*sqrt(2)-2)", (8, 1), 2, 64, (1, 2), 0, 1, (2, 0, 1)),
    ("4+4*sqrt(2)", (16, 1), 2, 64, (1, 2), 0, 1, (8, 0, 1)),
    ("4-4*sqrt(2)", (32, 1), 2, 64, (-1, 4), 4, -3, (8, -8, 3)),
    ("4i*sqrt(2+2*sqrt(2))", (16, 1), 2, 128, (1, 2), -2, 1, (12, -4, 1)),
    ("4*sqrt(2*sqrt(2)-2)", (64, 1), 2, 128, (-1, 8), 2, -3, (4, -4, 3)),
    ("(8-4*sqrt(3))*i", (48, 1), 3, 48, (-1, 2), 2, -1, (16, -12, 3)),
    ("(8+4*sqrt(3))*i", (16, 1), 3, 48, (-1, 2), 2, -1, (16, -4, 1)),
    ("sqrt(2)+sqrt(6)", (6, 1), 3, 48, (-1, 6), 1, -2, (1, -1, 1)),
    ("sqrt(2)-sqrt(6)", (2, 1), 3, 48, (-1, 2), 3, -2, (3, -3, 1)),
    ("4*sqrt(2)+4*sqrt(6)", (16, 1), 3, 192, (1, 2), 0, 1, (12, 0, 1)),
    ("4*sqrt(2)-4*sqrt(6)", (48, 1), 3, 192, (1, 2), 0, 1, (4, 0, 3)),
    ("2*sqrt(3)+2i", (8, 1), 3, 48, (-1, 2), 1, -1, (4, -2, 1)),
    ("2*sqrt(3)-2i", (8, 1), 3, 48, (1, 2), 1, 1, (4, 2, 1)),
    ("(32-12*sqrt(7))*i", (112, 1), 7, 112, (-1, 2), 2, -1, (32, -28, 7)),
    ("(32+12*sqrt(7))*i", (16, 1), 7, 112, (-1, 2), 2, -1, (32, -4, 1)),
    ("3*sqrt(2)/2+sqrt(14)/2", (14, 1), 7, 112, (-1, 14), 1, -4, (1, -1, 2)),
    ("3*sqrt(2)/2-sqrt(14)/2", (2, 1), 7, 112, (-1, 2), 7, -4, (7, -7, 2)),
    ("24*sqrt(2)+8*sqrt(14)", (16, 1), 7, 448, (1, 2), 0, 1, (28, 0, 1)),
    ("24*sqrt(2)-8*sqrt(14)", (112, 1), 7, 448, (1, 2), 0, 1, (4, 0, 7)),
    ("6+2i*sqrt(7)", (8, 1), 7, 56, (-1, 2), 1, -1, (8, -2, 1)),
    ("6-2i*sqrt(7)", (8, 1), 7, 56, (1, 2), 1, 1, (8, 2, 1)),
    ("3/2+i*sqrt(7)/2", (4, 1), 7, 28, (-1, 4), 3, -2, (4, -3, 1)),
    ("3/2-i*sqrt(7)/2", (4, 1), 7, 28, (1, 4), 3, 2, (4, 3, 1)),
    ("3*sqrt(7)/2+i/2", (4, 1), 7, 56, (-1, 4), 1, -2, (2, -1, 1)),
    ("3*sqrt(7)/2-i/2", (4, 1), 7, 56, (1, 4), 1, 2, (2, 1, 1)),
];

pub fn table2() -> Vec<PrintedIdentity> {
    let t1 = table1();
    T2.iter()
        .enumerate()
        .map(|(i, &(k, c_rational, c_sqrt, level, scale, alpha, beta, form))| PrintedIdentity {
            row: i + 1,
            k,
            c_rational,
            c_sqrt,
            level,
            theta: ThetaSpec::new(form, alpha, beta, scale),
            cm_point: t1[i].triple,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(table1().len(), 47);
        assert_eq!(table2().len(), 35);
        assert!(table2().iter().all(|r| r.theta.validate().is_ok()));
    }

    #[test]
    fn identity_k_matches_cm_point() {
        // m(k) only sees |P_k| on the torus, so ±k and ±k̄ are interchangeable
        for r in table2() {
            let k = crate::kexpr::parse(r.k, 128).unwrap();
            let kt = crate::modular::k_from_tau(&r.cm_point.tau(128)).unwrap();
            let cands = [kt.clone(), -kt.clone(), kt.conj(), -kt.conj()];
            let best = cands.iter().map(|c| c.dist(&k).to_f64()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-30, "row {} k={} from tau {}", r.row, r.k, kt);
        }
    }

    #[test]
    fn printed_complex() {
        let v = parse_printed_complex("0.50000-0.86602i").unwrap();
        assert_eq!((v.re, v.im), (0.5, -0.86602));
        assert!((v.re_ulp - 1e-5).abs() < 1e-18 && (v.im_ulp - 1e-5).abs() < 1e-18);
        assert!(v.matches(0.5, -0.8660254));
        assert!(!v.matches(0.5, -0.86604));
        let v = parse_printed_complex("-253.99").unwrap();
        assert_eq!((v.re, v.im), (-253.99, 0.0));
        assert!((v.re_ulp - 0.01).abs() < 1e-15);
        let v = parse_printed_complex("0.00066519+0.036468i").unwrap();
        assert_eq!(v.im, 0.036468);
        assert!(parse_printed_complex("abc").is_err());
    }
}

/// Polynomial Σ s_i(u_i + v_i√d)X^i from (s, (u, v)) pairs, constant term first.
fn kp(d: i64, terms: &[(i64, (i64, i64))]) -> KPoly {
    let c = terms.iter().map(|&(s, (u, v))| QuadFieldElem::ints(d, s * u, s * v)).collect();
    KPoly::new(d, c)
}

fn q(d: i64, u: i64, v: i64) -> QuadFieldElem {
    QuadFieldElem::ints(d, u, v)
}

/// How the L-values of a case are obtained.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLData {
    /// L(E, 2) = L(f, 2)L(g, 2) for two rational newforms.
    Product { f: FormSpec, g: FormSpec },
    /// Two identity rows whose theta series are αf(dτ) + ᾱg(dτ) + ..., with
    /// f and g conjugate. Each coefficient list is (value, dilation).
    ConjugatePair {
        rows: (usize, usize),
        alpha: Vec<(&'static str, u32)>,
        beta: Vec<(&'static str, u32)>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseLabels {
    pub curve: &'static str,
    pub lfunction: &'static str,
    pub newforms: [&'static str; 2],
}

/// Everything printed about one regulator case.
#[derive(Clone, Debug, Serialize)]
pub struct CaseDossier {
    pub id: &'static str,
    pub d: i64,
    pub chart: Chart,
    /// k for E and for E^σ, in kexpr syntax.
    pub k: (&'static str, &'static str),
    pub k2: QuadFieldElem,
    /// Printed factor cutting out the kernel of φ: E → E^σ.
    pub kernel: KPoly,
    pub degree: u32,
    /// (X, Y) ↦ (x_map(X), Y·y_map(X)).
    pub x_map: RatFn,
    pub y_map: RatFn,
    /// φ^σ∘φ = [composition].
    pub composition: i64,
    /// φ*ω_{E^σ} = multiplier·ω_E.
    pub multiplier: QuadFieldElem,
    /// Printed intermediate curve and isomorphism (u, r), when given.
    pub intermediate: Option<(QuadFieldElem, QuadFieldElem, QuadFieldElem)>,
    pub twist: Option<(QuadFieldElem, QuadFieldElem)>,
    pub intermediate_x_map: Option<RatFn>,
    /// A printed nontrivial kernel point (X, Y) in kexpr syntax.
    pub kernel_point: Option<(&'static str, &'static str)>,
    /// Printed crossing angles of the E and E^σ paths.
    pub theta: (Option<&'static str>, Option<&'static str>),
    /// Printed ∫ω over both paths.
    pub omega: Option<(&'static str, &'static str)>,
    /// |a|, |b| with φ_*γ_E = aγ_{E^σ}, (φ^σ)_*γ_{E^σ} = bγ_E, and whether
    /// the printed signs are opposite.
    pub pushforward: ((i64, i64), bool),
    /// |⟨γ_E, M₁⟩|/m(k₊) and |⟨γ_{E^σ}, M₁⟩|/m(k₋).
    pub pairing_m1: (i64, i64),
    /// R = c₊m(k₊)² + c₋m(k₋)².
    pub r_coeffs: (i64, i64),
    /// R = constant/π⁴·L(E, 2).
    pub constant: u64,
    pub ldata: CaseLData,
    pub labels: CaseLabels,
}

pub fn case_dossiers() -> Vec<CaseDossier> {
    use crate::lvalues::{f32_form, f64_form};
    let den6 = kp(2, &[(0, (0, 0)), (4, (1, 0))]).mul(&kp(2, &[(1, (1, 0)), (2, (1, 0)), (1, (1, 0))]));
    let s6 = CaseDossier {
        id: "6",
        d: 2,
        chart: Chart::Plain,
        k: ("12+8*sqrt(2)", "12-8*sqrt(2)"),
        k2: q(2, 272, 192),
        kernel: kp(2, &[(0, (0, 0)), (1, (1, 0)), (1, (1, 0))]),
        degree: 4,
        x_map: RatFn::new(
            kp(2, &[(1, (1, 0)), (-2, (1, 0)), (1, (1, 0))]).mul(&kp(2, &[(1, (17, -12)), (-6, (5, -4)), (1, (17, -12))])),
            den6,
        ),
        y_map: RatFn::new(
            kp(2, &[(-1, (1, 0)), (1, (1, 0))])
                .mul(&kp(2, &[(1, (1, 0)), (4, (1, 0)), (2, (131, 96)), (4, (1, 0)), (1, (1, 0))]))
                .scale(&q(2, 99, -70)),
            kp(2, &[(0, (0, 0)), (0, (0, 0)), (8, (1, 0))]).mul(&kp(2, &[(1, (1, 0)), (1, (1, 0))]).pow(3)),
        ),
        composition: 4,
        multiplier: q(2, 6, 4),
        intermediate: Some((q(2, 66, 48), q(2, 1276, 960), q(2, 137464, 96960))),
        twist: Some((QuadFieldElem::ratios(2, (3, 2), (-1, 1)), QuadFieldElem::ratios(2, (-49, 2), (18, 1)))),
        intermediate_x_map: Some(RatFn::new(
            kp(2, &[(1, (1, 0)), (2, (1, 0)), (-2, (127, 96)), (2, (1, 0)), (1, (1, 0))]),
            kp(2, &[(0, (0, 0)), (1, (1, 0))]).mul(&kp(2, &[(1, (1, 0)), (1, (1, 0))]).pow(2)),
        )),
        kernel_point: Some(("-1", "4*sqrt(4+3*sqrt(2))")),
        theta: (None, Some("atan(2*sqrt(2+10*sqrt(2))/7)")),
        omega: Some(("0.27152i", "3.1651i")),
        pushforward: ((1, 4), false),
        pairing_m1: (1, 2),
        r_coeffs: (4, -4),
        constant: 4096,
        ldata: CaseLData::Product { f: f64_form(), g: f32_form() },
        labels: CaseLabels {
            curve: "2.2.8.1-32.1-a8",
            lfunction: "4-2e11-1.1-c1e2-0-0",
            newforms: ["64.2.a.a", "32.2.a.a"],
        },
    };
    let den71 = kp(3, &[(1, (0, 2)), (3, (1, 0))]);
    let s71 = CaseDossier {
        id: "7.1",
        d: 3,
        chart: Chart::Scaled,
        k: ("sqrt(2)+sqrt(6)", "sqrt(2)-sqrt(6)"),
        k2: q(3, 8, 4),
        kernel: den71.clone(),
        degree: 3,
        x_map: RatFn::new(
            kp(3, &[(0, (0, 0)), (3, (1, 0))]).mul(&kp(3, &[(12, (1, 0)), (4, (0, 1)), (1, (1, 0))])),
            den71.pow(2),
        ),
        y_map: RatFn::new(
            kp(3, &[(2, (0, 1)), (1, (1, 0))]).mul(&kp(3, &[(4, (1, 0)), (0, (0, 0)), (1, (1, 0))])).scale(&q(3, 0, 3)),
            den71.pow(3),
        ),
        composition: -3,
        multiplier: q(3, 0, 1),
        intermediate: None,
        twist: None,
        intermediate_x_map: None,
        kernel_point: None,
        theta: (Some("pi-atan(sqrt((sqrt(2)-1)*(sqrt(3)-1)/2))"), Some("pi-atan(sqrt((sqrt(2)+1)*(sqrt(3)+1)/2))")),
        omega: None,
        pushforward: ((3, 1), true),
        pairing_m1: (4, 4),
        r_coeffs: (16, 48),
        constant: 2304,
        ldata: CaseLData::ConjugatePair { rows: (18, 19), alpha: vec![("(3+i*sqrt(3))/6", 1)], beta: vec![("(1-i*sqrt(3))/2", 1)] },
        labels: CaseLabels {
            curve: "2.2.12.1-16.1-a1",
            lfunction: "4-48e2-1.1-c1e2-0-2",
            newforms: ["48.2.c.a.47.1", "48.2.c.a.47.2"],
        },
    };
    let den72 = kp(3, &[(1, (6, -4)), (3, (1, 0))]);
    let s72 = CaseDossier {
        id: "7.2",
        d: 3,
        chart: Chart::Scaled,
        k: ("4*sqrt(2)+4*sqrt(6)", "4*sqrt(2)-4*sqrt(6)"),
        k2: q(3, 128, 64),
        kernel: den72.clone(),
        degree: 3,
        x_map: RatFn::new(
            kp(3, &[(0, (0, 0)), (3, (1, 0))]).mul(&kp(3, &[(12, (1, 0)), (1, (12, -8)), (1, (7, -4))])),
            den72.pow(2),
        ),
        y_map: RatFn::new(
            kp(3, &[(1, (-6, -4)), (1, (1, 0))]).mul(&kp(3, &[(4, (1, 0)), (12, (1, 0)), (1, (1, 0))])).scale(&q(3, -3, 2).pow(3)),
            den72.pow(3),
        ),
        composition: -3,
        multiplier: q(3, 3, 2),
        intermediate: None,
        twist: None,
        intermediate_x_map: None,
        kernel_point: None,
        theta: (None, None),
        omega: None,
        pushforward: ((1, 3), true),
        pairing_m1: (2, 2),
        r_coeffs: (12, 4),
        constant: 9216,
        ldata: CaseLData::ConjugatePair { rows: (20, 21), alpha: vec![("1/2", 1)], beta: vec![("i/(2*sqrt(3))", 1)] },
        labels: CaseLabels {
            curve: "2.2.12.1-256.1-c8",
            lfunction: "4-192e2-1.1-c1e2-0-1",
            newforms: ["192.2.c.a.191.1", "192.2.c.a.191.2"],
        },
    };
    let phi1 = kp(7, &[(8, (0, 1)), (56, (1, 0)), (14, (0, 1)), (7, (1, 0))]);
    let phi2 = kp(7, &[(448, (1, 0)), (448, (0, 1)), (1232, (1, 0)), (240, (0, 1)), (168, (1, 0)), (8, (0, 1)), (1, (1, 0))]);
    let phi3 = kp(
        7,
        &[
            (512, (0, 1)),
            (3584, (1, 0)),
            (1536, (0, 1)),
            (2752, (1, 0)),
            (544, (0, 1)),
            (720, (1, 0)),
            (120, (0, 1)),
            (96, (1, 0)),
            (6, (0, 1)),
            (1, (1, 0)),
        ],
    );
    let seven_x = kp(7, &[(0, (0, 0)), (7, (1, 0))]);
    let s73 = CaseDossier {
        id: "7.3",
        d: 7,
        chart: Chart::Scaled,
        k: ("3*sqrt(2)/2+sqrt(14)/2", "3*sqrt(2)/2-sqrt(14)/2"),
        k2: q(7, 8, 3),
        kernel: phi1.clone(),
        degree: 7,
        x_map: RatFn::new(seven_x.mul(&phi2), phi1.pow(2)),
        y_map: RatFn::new(phi3.scale(&q(7, 0, 7)), phi1.pow(3)),
        composition: -7,
        multiplier: q(7, 0, 1),
        intermediate: None,
        twist: None,
        intermediate_x_map: None,
        kernel_point: None,
        theta: (
            Some("pi-atan(sqrt(552*sqrt(2)-433-4*sqrt(7*(2993-1428*sqrt(2))))/47)"),
            Some("atan(sqrt(552*sqrt(2)-433+4*sqrt(7*(2993-1428*sqrt(2))))/47)"),
        ),
        omega: None,
        pushforward: ((7, 1), true),
        pairing_m1: (4, 4),
        r_coeffs: (16, 112),
        constant: 3136,
        ldata: CaseLData::ConjugatePair {
            rows: (26, 27),
            alpha: vec![("(7-i*sqrt(7))/14", 2), ("(7+3*i*sqrt(7))/7", 4)],
            beta: vec![("(1+i*sqrt(7))/2", 2), ("-3+i*sqrt(7)", 4)],
        },
        labels: CaseLabels {
            curve: "2.2.28.1-1.1-a2",
            lfunction: "4-28e2-1.1-c1e2-0-1",
            newforms: ["28.2.d.a.27.1", "28.2.d.a.27.2"],
        },
    };
    let psi1 = kp(7, &[(8, (21, -8)), (308, (1, 0)), (-14, (15, 8)), (7, (1, 0))]);
    let psi2 = kp(
        7,
        &[(448, (1, 0)), (-448, (15, 8)), (560, (139, 48)), (-96, (189, 104)), (12, (371, -32)), (44, (21, -8)), (1, (127, -48))],
    );
    let psi3 = kp(
        7,
        &[
            (-512, (21, 8)),
            (-256, (6727, 2544)),
            (1536, (1029, 388)),
            (256, (2104321, 795348)),
            (64, (13721325, 5186128)),
            (288, (2959, 1112)),
            (-96, (212583, 80356)),
            (-48, (6289, 2380)),
            (-6, (15, 8)),
            (1, (1, 0)),
        ],
    );
    let s74 = CaseDossier {
        id: "7.4",
        d: 7,
        chart: Chart::Scaled,
        k: ("24*sqrt(2)+8*sqrt(14)", "24*sqrt(2)-8*sqrt(14)"),
        k2: q(7, 2048, 768),
        kernel: psi1.clone(),
        degree: 7,
        x_map: RatFn::new(seven_x.mul(&psi2), psi1.pow(2)),
        y_map: RatFn::new(psi3.scale(&(-&q(7, 21, -8).pow(3))), psi1.pow(3)),
        composition: -7,
        multiplier: q(7, 21, 8),
        intermediate: None,
        twist: None,
        intermediate_x_map: None,
        kernel_point: None,
        theta: (None, None),
        omega: None,
        pushforward: ((1, 7), true),
        pairing_m1: (2, 2),
        r_coeffs: (28, 4),
        constant: 50176,
        ldata: CaseLData::ConjugatePair { rows: (28, 29), alpha: vec![("1/2", 1)], beta: vec![("i/(2*sqrt(7))", 1)] },
        labels: CaseLabels {
            curve: "2.2.28.1-256.1-j8",
            lfunction: "4-448e2-1.1-c1e2-0-0",
            newforms: ["448.2.f.b.447.1", "448.2.f.b.447.2"],
        },
    };
    vec![s6, s71, s72, s73, s74]
}

pub fn case_dossier(id: &str) -> Result<CaseDossier> {
    let id = id.trim_start_matches('§');
    case_dossiers()
        .into_iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::NotFound(format!("no regulator case {id}; expected one of 6, 7.1, 7.2, 7.3, 7.4")))
}
