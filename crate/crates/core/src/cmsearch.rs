//! Search for CM points τ₀ in F′ whose λ(2τ₀) has small degree.
//!
//! Reduced forms of every discriminant with h(D) ≤ 2 are moved into F′ by a
//! fixed list of eight matrices, filtered by class numbers of the scaled
//! points 2τ₀ and 4τ₀, and deduplicated by the value of λ(2τ₀).

use crate::error::Result;
use crate::modular::lambda2;
use crate::numerics::{format_sig_trunc, BigComplex};
use crate::quadforms::{class_number, cm_scale, discriminants_with_h_leq_2, in_fprime, reduced_forms, QuadForm};
use rayon::prelude::*;
use serde::Serialize;

/// Integer 2×2 matrix ((p, q), (r, s)).
pub type Mat2 = [[i64; 2]; 2];

pub const IDENTITY: Mat2 = [[1, 0], [0, 1]];
pub const S: Mat2 = [[0, -1], [1, 0]];
pub const T: Mat2 = [[1, 1], [0, 1]];
pub const T_INV: Mat2 = [[1, -1], [0, 1]];

pub fn mat_mul(a: Mat2, b: Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// I, S, ST, ST⁻¹, ST², ST⁻², ST²S, ST⁻²S: together with the translates of F
/// these cover F′.
pub fn covering_matrices() -> [Mat2; 8] {
    let t2 = mat_mul(T, T);
    let ti2 = mat_mul(T_INV, T_INV);
    [
        IDENTITY,
        S,
        mat_mul(S, T),
        mat_mul(S, T_INV),
        mat_mul(S, t2),
        mat_mul(S, ti2),
        mat_mul(mat_mul(S, t2), S),
        mat_mul(mat_mul(S, ti2), S),
    ]
}

/// The primitive form whose upper half-plane root is γ·τ_f.
///
/// Substituting τ = (sτ′ - q)/(-rτ′ + p) into aτ² + bτ + c and clearing the
/// denominator gives the new coefficients. Requires det γ = 1.
pub fn matrix_act(g: Mat2, f: &QuadForm) -> QuadForm {
    let [[p, q], [r, s]] = g;
    debug_assert_eq!(p * s - q * r, 1);
    let (a, b, c) = (f.a, f.b, f.c);
    let na = a * s * s - b * s * r + c * r * r;
    let nb = -2 * a * s * q + b * (s * p + q * r) - 2 * c * r * p;
    let nc = a * q * q - b * q * p + c * p * p;
    let mut out = QuadForm::new(na, nb, nc).primitive();
    if out.a < 0 {
        out = QuadForm::new(-out.a, -out.b, -out.c);
    }
    out
}

/// Which class numbers the filter of step (3) uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
pub enum CmFilter {
    /// h(D_{2τ₀}) ≤ 2 and h(D_{2τ₀})·h(D_{4τ₀}) ≤ 4. Reproduces the 47
    /// printed rows, whose second column is h(D_{2τ₀}).
    #[default]
    Table,
    /// h(D_{τ₀}) ≤ 2 and h(D_{τ₀})·h(D_{4τ₀}) ≤ 4, read literally.
    Literal,
}

impl std::str::FromStr for CmFilter {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(CmFilter::Table),
            "literal" => Ok(CmFilter::Literal),
            _ => Err(crate::Error::Parse(format!("unknown filter {s:?}, expected table or literal"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub filter: CmFilter,
    /// Precision for the deduplication pass.
    pub search_prec: u32,
    /// Precision for the emitted λ values.
    pub emit_prec: u32,
    /// Relative tolerance for two λ values to count as equal.
    pub dedup_tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { filter: CmFilter::Table, search_prec: 128, emit_prec: 256, dedup_tol: 1e-5 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Table1Row {
    pub triple: QuadForm,
    pub disc: i64,
    /// h(D_{2τ₀})
    pub h2: u64,
    /// h(D_{τ₀})·h(D_{4τ₀})
    pub product: u64,
    pub lambda: BigComplex,
    /// λ(2τ₀) to five significant digits per part.
    pub lambda5: String,
}

/// Five significant digits per part, truncated as in the printed table;
/// the imaginary part is omitted when negligible.
pub fn format_lambda5(l: &BigComplex) -> String {
    let (re, im) = l.to_f64();
    let scale = re.abs().max(im.abs()).max(1e-300);
    if im.abs() <= 1e-12 * scale {
        return format_sig_trunc(re, 5);
    }
    let re_s = format_sig_trunc(re, 5);
    let im_s = format_sig_trunc(im.abs(), 5);
    format!("{re_s}{}{im_s}i", if im < 0.0 { "-" } else { "+" })
}

struct Candidate {
    form: QuadForm,
    h2: u64,
    product: u64,
    lambda: BigComplex,
}

fn h(d: i64) -> u64 {
    class_number(d).expect("scaled CM discriminants are valid")
}

fn candidates_for(d: i64, opts: &SearchOptions) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    let mats = covering_matrices();
    for f in reduced_forms(d)? {
        for g in mats {
            let f2 = matrix_act(g, &f);
            let tau = f2.tau(opts.search_prec);
            if !in_fprime(&tau, 1e-12) {
                continue;
            }
            let h1 = h(f2.disc());
            let h2 = h(cm_scale(&f2, 2).disc());
            let h4 = h(cm_scale(&f2, 4).disc());
            let keep = match opts.filter {
                CmFilter::Table => h2 <= 2 && h2 * h4 <= 4,
                CmFilter::Literal => h1 <= 2 && h1 * h4 <= 4,
            };
            if !keep {
                continue;
            }
            out.push(Candidate { form: f2, h2, product: h1 * h4, lambda: lambda2(&tau)? });
        }
    }
    Ok(out)
}

/// Runs the search with default options.
pub fn algorithm1() -> Result<Vec<Table1Row>> {
    algorithm1_with(&SearchOptions::default())
}

/// The four-step search. Discriminants are processed in parallel; the
/// deduplication is a sequential pass over candidates sorted by (a, |b|, c, b),
/// so the smallest triple represents each λ value.
pub fn algorithm1_with(opts: &SearchOptions) -> Result<Vec<Table1Row>> {
    let discs: Vec<i64> = discriminants_with_h_leq_2().into_iter().map(|r| r.d).collect();
    let per_disc: Vec<Vec<Candidate>> = discs.par_iter().map(|&d| candidates_for(d, opts)).collect::<Result<_>>()?;
    let mut all: Vec<Candidate> = per_disc.into_iter().flatten().collect();
    all.sort_by_key(|c| (c.form.a, c.form.b.abs(), c.form.c, c.form.b));
    let mut kept: Vec<Candidate> = Vec::new();
    for c in all {
        let dup = kept.iter().any(|k| {
            let scale = k.lambda.abs().to_f64().max(1.0);
            c.lambda.dist(&k.lambda).to_f64() <= opts.dedup_tol * scale
        });
        if !dup {
            kept.push(c);
        }
    }
    kept.par_iter()
        .map(|c| {
            let lambda = lambda2(&c.form.tau(opts.emit_prec))?;
            Ok(Table1Row {
                triple: c.form,
                disc: c.form.disc(),
                h2: c.h2,
                product: c.product,
                lambda5: format_lambda5(&lambda),
                lambda,
            })
        })
        .collect()
}

/// Whether j(4τ₀) is a simple root of Φ₄(X, j(τ₀)).
///
/// The other roots are j(Mτ₀) for M = (1 k; 0 4), k = 0..3, and (2 1; 0 2).
/// When they are all distinct from j(4τ₀), λ(2τ₀) lies in Q(j(τ₀), j(4τ₀))
/// and its degree is at most h(D_{τ₀})·h(D_{4τ₀}).
pub fn degree_bound_applies(f: &QuadForm, prec: u32) -> Result<bool> {
    use crate::modular::j_numeric;
    let tau = f.tau(prec);
    let mobius = |a: i64, b: i64, d: i64| -> BigComplex {
        let mut t = tau.scale_f64(a as f64);
        t.re += b;
        t.scale_f64(1.0 / d as f64)
    };
    let j4 = j_numeric(&mobius(4, 0, 1))?;
    let scale = j4.abs().to_f64().max(1.0);
    for (a, b, d) in [(1, 0, 4), (1, 1, 4), (1, 2, 4), (1, 3, 4), (2, 1, 2)] {
        let o = j_numeric(&mobius(a, b, d))?;
        if o.dist(&j4).to_f64() < 1e-20 * scale.max(o.abs().to_f64()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rows rendered as CSV with header `a,b,c,D,h2,product,lambda`.
pub fn rows_csv(rows: &[Table1Row]) -> String {
    let mut s = String::from("a,b,c,D,h2,product,lambda\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.triple.a, r.triple.b, r.triple.c, r.disc, r.h2, r.product, r.lambda5
        ));
    }
    s
}

/// Result of comparing search output to the printed table.
#[derive(Clone, Debug, Serialize)]
pub struct TableDiff {
    /// Printed rows with no computed row of the same (h2, product, λ).
    pub missing: Vec<String>,
    /// Computed rows with no printed counterpart.
    pub extra: Vec<String>,
    /// Printed rows whose own triple gives a λ outside the printed digits.
    pub bad_printed_lambda: Vec<String>,
}

impl TableDiff {
    pub fn is_clean(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty() && self.bad_printed_lambda.is_empty()
    }
}

/// Multiset comparison of (h2, product, λ within one printed unit).
pub fn diff_against_printed(rows: &[Table1Row]) -> Result<TableDiff> {
    use crate::paperdata::{parse_printed_complex, table1};
    let printed = table1();
    let mut used = vec![false; rows.len()];
    let mut missing = Vec::new();
    let mut bad = Vec::new();
    for p in &printed {
        let pc = parse_printed_complex(p.lambda)?;
        let own = lambda2(&p.triple.tau(128))?.to_f64();
        if !pc.matches(own.0, own.1) {
            bad.push(format!("{} printed {} computed {:.8}{:+.8}i", p.triple, p.lambda, own.0, own.1));
        }
        let hit = rows.iter().enumerate().position(|(i, r)| {
            let (re, im) = r.lambda.to_f64();
            !used[i] && r.h2 == p.h2 && r.product == p.product && pc.matches(re, im)
        });
        match hit {
            Some(i) => used[i] = true,
            None => missing.push(format!("{} h2={} product={} lambda={}", p.triple, p.h2, p.product, p.lambda)),
        }
    }
    let extra = rows
        .iter()
        .zip(&used)
        .filter(|(_, u)| !**u)
        .map(|(r, _)| format!("{} h2={} product={} lambda={}", r.triple, r.h2, r.product, r.lambda5))
        .collect();
    Ok(TableDiff { missing, extra, bad_printed_lambda: bad })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integer_relation;
    use proptest::prelude::*;

    #[test]
    fn matrix_action_examples() {
        let i = QuadForm::new(1, 0, 1);
        assert_eq!(matrix_act(S, &i), i);
        assert_eq!(matrix_act(T, &QuadForm::new(1, 1, 1)), QuadForm::new(1, -1, 1));
        let f = QuadForm::new(5, -4, 1);
        assert_eq!(matrix_act(IDENTITY, &f), f);
    }

    fn mobius(g: Mat2, t: (f64, f64)) -> (f64, f64) {
        let (x, y) = t;
        let (nr, ni) = (g[0][0] as f64 * x + g[0][1] as f64, g[0][0] as f64 * y);
        let (dr, di) = (g[1][0] as f64 * x + g[1][1] as f64, g[1][0] as f64 * y);
        let n = dr * dr + di * di;
        ((nr * dr + ni * di) / n, (ni * dr - nr * di) / n)
    }

    proptest! {
        #[test]
        fn action_moves_the_root(a in 1i64..50, c in 1i64..50, t in -0.99f64..0.99, k in 0usize..8) {
            let b = (t * 2.0 * ((a * c) as f64).sqrt()).trunc() as i64;
            let f = QuadForm::new(a, b, c).primitive();
            let g = covering_matrices()[k];
            let f2 = matrix_act(g, &f);
            prop_assert_eq!(f2.disc(), f.disc());
            let (x, y) = mobius(g, f.tau_f64());
            let (x2, y2) = f2.tau_f64();
            prop_assert!((x - x2).abs() < 1e-9 && (y - y2).abs() < 1e-9);
        }
    }

    #[test]
    fn reproduces_printed_table() {
        let rows = algorithm1().unwrap();
        assert_eq!(rows.len(), 47);
        let d = diff_against_printed(&rows).unwrap();
        assert!(d.is_clean(), "{d:?}");
        assert!(rows.iter().any(|r| r.triple == QuadForm::new(2, -2, 1) && r.lambda5 == "-1.0000"));
        let r = rows.iter().find(|r| r.triple == QuadForm::new(8, 7, 2)).unwrap();
        assert_eq!((r.h2, r.product), (2, 4));
        assert_eq!(r.lambda5, "0.50000-27.411i");
    }

    #[test]
    fn emitted_rows_lie_in_fprime_and_are_distinct() {
        let rows = algorithm1().unwrap();
        for (i, r) in rows.iter().enumerate() {
            assert!(in_fprime(&r.triple.tau(128), 1e-12));
            assert!(r.triple.is_primitive());
            assert!(r.product <= 4);
            for s in &rows[..i] {
                assert_ne!(r.lambda5, s.lambda5);
            }
        }
    }

    #[test]
    fn literal_filter_is_a_superset() {
        let lit = algorithm1_with(&SearchOptions { filter: CmFilter::Literal, ..Default::default() }).unwrap();
        assert_eq!(lit.len(), 63);
        let table = algorithm1().unwrap();
        for r in &table {
            assert!(lit.iter().any(|s| s.lambda.dist(&r.lambda).to_f64() < 1e-20 * r.lambda.abs().to_f64().max(1.0)));
        }
    }

    #[test]
    fn lambda_degree_is_bounded_by_product() {
        let mut outside = 0;
        for r in algorithm1().unwrap() {
            let l = lambda2(&r.triple.tau(768)).unwrap();
            let p = integer_relation(&l, 2 * r.product as usize, 80).unwrap();
            if degree_bound_applies(&r.triple, 256).unwrap() {
                assert!(p.degree() as u64 <= r.product, "{} {}", r.triple, p);
            } else {
                // e^{-iπ/3} at (4,2,1) has product 1 and degree 2
                outside += 1;
                assert!(p.degree() as u64 <= 2 * r.product, "{} {}", r.triple, p);
            }
        }
        assert!(outside > 0);
    }

    #[test]
    fn sixth_root_of_unity_row() {
        let l = lambda2(&QuadForm::new(4, 2, 1).tau(256)).unwrap();
        let p = integer_relation(&l, 4, 32).unwrap();
        assert_eq!(p, crate::numerics::IntPolynomial::from_i64(&[1, -1, 1]));
        assert!(!degree_bound_applies(&QuadForm::new(4, 2, 1), 256).unwrap());
        assert!(degree_bound_applies(&QuadForm::new(4, 0, 1), 256).unwrap());
    }

    #[test]
    fn lambda5_formatting() {
        assert_eq!(format_lambda5(&BigComplex::from_f64(64, -1.0, 0.0)), "-1.0000");
        assert_eq!(format_lambda5(&BigComplex::from_f64(64, 0.5, -27.4112)), "0.50000-27.411i");
        assert_eq!(format_lambda5(&BigComplex::from_f64(64, 0.0294372515, 0.0)), "0.029437");
    }

    #[test]
    fn csv_header() {
        let rows = algorithm1().unwrap();
        let csv = rows_csv(&rows);
        assert!(csv.starts_with("a,b,c,D,h2,product,lambda\n"));
        assert_eq!(csv.lines().count(), 48);
    }
}
