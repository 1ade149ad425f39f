//! End-to-end acceptance run: one line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines are always shown.

use mahlercm::beilinson::regulator::case_curves;
use mahlercm::beilinson::{
    case_path, check_isogeny_identities, fundamental_periods, path_integral_omega, pushforward_multipliers,
    regulator_case, QuadFieldElem, RegulatorOptions, Side,
};
use mahlercm::cmsearch::{algorithm1_with, diff_against_printed, SearchOptions};
use mahlercm::lvalues::{coefficients, f32_form, f64_form, identity_table, lvalue2, FormSpec, LOptions};
use mahlercm::mahler::{mahler_jensen, mahler_lattice, LatticeStrategy};
use mahlercm::modular::{j_numeric, k_from_tau, lambda2, weber_f1, weber_f2};
use mahlercm::numerics::integer_relation;
use mahlercm::paperdata::{case_dossier, case_dossiers, table1};
use mahlercm::qseries::{sturm_bound, sturm_compare, theta_expansion, PowerSeriesZ, ThetaSpec};
use mahlercm::quadforms::discriminants_with_h_leq_2;
use mahlercm::{kexpr, BigComplex};
use rayon::prelude::*;
use rug::{Float, Rational};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(t: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let e = t.elapsed();
    if e > limit {
        return Err(format!("{what} took {e:.1?}, limit {limit:?}"));
    }
    Ok(())
}

fn rel_err(x: &BigComplex, want: &BigComplex) -> f64 {
    x.dist(want).to_f64() / want.abs().to_f64()
}

fn table1_reproduction() -> Outcome {
    let t = Instant::now();
    let opts = SearchOptions { search_prec: 128, emit_prec: 128, ..Default::default() };
    let rows = algorithm1_with(&opts).map_err(|e| e.to_string())?;
    within(t, Duration::from_secs(120), "search")?;
    let printed = table1();
    ensure!(rows.len() == printed.len(), "{} rows, {} printed", rows.len(), printed.len());
    let diff = diff_against_printed(&rows).map_err(|e| e.to_string())?;
    ensure!(diff.is_clean(), "{diff:?}");
    Ok(format!("{}/{} printed rows matched (h, product, λ); the printed table has 47 rows", rows.len(), printed.len()))
}

fn class_number_lists() -> Outcome {
    let t = Instant::now();
    let recs = discriminants_with_h_leq_2();
    within(t, Duration::from_secs(10), "enumeration")?;
    let join = |h: u64| recs.iter().filter(|r| r.h == h).map(|r| r.d.to_string()).collect::<Vec<_>>().join(",");
    let h1 = "-3,-4,-7,-8,-11,-12,-16,-19,-27,-28,-43,-67,-163";
    let h2 = "-15,-20,-24,-32,-35,-36,-40,-48,-51,-52,-60,-64,-72,-75,-88,-91,\
              -99,-100,-112,-115,-123,-147,-148,-187,-232,-235,-267,-403,-427";
    ensure!(join(1) == h1, "h=1: {}", join(1));
    ensure!(join(2) == h2, "h=2: {}", join(2));
    Ok("13 discriminants with h=1 and 29 with h=2, byte-identical".into())
}

fn spot_values() -> Outcome {
    let p = 256;
    let i = BigComplex::i(p);
    let two_i = i.scale_f64(2.0);
    let s2 = Float::with_val(p, 2).sqrt();
    let real = |x: Float| BigComplex::from_real(x);
    let lam = lambda2(&i).map_err(|e| e.to_string())?;
    let e1 = rel_err(&lam, &real(Float::with_val(p, 17) - Float::with_val(p, &s2 * 12)));
    ensure!(e1 < 1e-60, "λ(2i) off by {e1:e}");
    let j = j_numeric(&two_i).map_err(|e| e.to_string())?;
    let e2 = rel_err(&j, &real(Float::with_val(p, 287496)));
    ensure!(e2 < 1e-60, "j(2i) off by {e2:e}");
    let f1 = weber_f1(&two_i).map_err(|e| e.to_string())?.powi(24);
    let e3 = rel_err(&f1, &real(Float::with_val(p, 512)));
    ensure!(e3 < 1e-40, "f1(2i)^24 off by {e3:e}");
    let f2 = weber_f2(&two_i).map_err(|e| e.to_string())?.powi(24);
    let true_f2 = real(Float::with_val(p, &s2 * 198) - 280u32);
    let stated_f2 = real(Float::with_val(p, &s2 * 192) - 280u32);
    let e4 = rel_err(&f2, &true_f2);
    ensure!(e4 < 1e-40, "f2(2i)^24 off by {e4:e}");
    // 𝔣₂⁸ = 3√2 − 4 follows from 𝔣₁²⁴ = 512, 𝔣⁸ = 𝔣₁⁸ + 𝔣₂⁸ and 𝔣𝔣₁𝔣₂ = √2
    let gap = f2.dist(&stated_f2).to_f64();
    ensure!(gap > 1.0, "f2 matches the stated value");
    Ok(format!(
        "λ(2i), j(2i), f1(2i)^24 to 60/60/40 digits; f2(2i)^24 = -280+198√2 to 40 digits \
         (the stated -280+192√2 is refuted, off by {gap:.2})"
    ))
}

fn algebraicity() -> Outcome {
    use mahlercm::cmsearch::degree_bound_applies;
    let t = Instant::now();
    let rows = algorithm1_with(&SearchOptions { emit_prec: 128, ..Default::default() }).map_err(|e| e.to_string())?;
    let mut within_product = 0;
    let mut excluded = Vec::new();
    for r in &rows {
        let l = lambda2(&r.triple.tau(768)).map_err(|e| e.to_string())?;
        let p = integer_relation(&l, 2 * r.product as usize, 80).map_err(|e| format!("{}: {e}", r.triple))?;
        if p.degree() as u64 <= r.product {
            within_product += 1;
        } else {
            // the bound needs j(4τ₀) to be a simple root of Φ₄(X, j(τ₀))
            let applies = degree_bound_applies(&r.triple, 256).map_err(|e| e.to_string())?;
            ensure!(!applies, "{}: degree {} > product {} although the bound applies", r.triple, p.degree(), r.product);
            excluded.push(format!("{}:{}>{}", r.triple, p.degree(), r.product));
        }
    }
    within(t, Duration::from_secs(300), "relations")?;
    Ok(format!(
        "relations found for all {} rows; degree ≤ product on {within_product}; the other {} fail the \
         simple-root hypothesis of the degree bound [{}]",
        rows.len(),
        excluded.len(),
        excluded.join(" ")
    ))
}

fn assert_series(name: &str, s: &PowerSeriesZ, printed: &[(i64, i64)]) -> Result<(), String> {
    let last = printed.last().expect("nonempty").0;
    for n in 0..=last {
        let want = printed.iter().find(|(e, _)| *e == n).map_or(0, |(_, c)| *c);
        let got = s.coeff(n).ok_or_else(|| format!("{name}: no coefficient at q^{n}"))?;
        ensure!(got == want, "{name}: q^{n} coefficient {got}, printed {want}");
    }
    Ok(())
}

fn series_of(spec: &FormSpec, n: usize) -> Result<PowerSeriesZ, String> {
    let c = coefficients(spec, n).map_err(|e| e.to_string())?;
    ensure!(c.iter().all(|v| *v.denom() == 1), "non-integral coefficients");
    Ok(PowerSeriesZ::from_integers(0, c.into_iter().map(|v| v.numer().clone()).collect()))
}

fn q_expansions() -> Outcome {
    let theta = |spec: ThetaSpec| theta_expansion(&spec, 120).map_err(|e| e.to_string());
    let f64s = series_of(&f64_form(), 40)?;
    let f32s = series_of(&f32_form(), 40)?;
    assert_series("f64", &f64s, &[(1, 1), (5, 2), (9, -3), (13, -6), (17, 2), (25, -1)])?;
    assert_series("f32", &f32s, &[(1, 1), (5, -2), (9, -3), (13, 6), (17, 2), (25, -1)])?;
    let t41 = theta(ThetaSpec::new((16, 0, 1), 0, 1, (1, 2)))?;
    assert_series("k=12+8√2", &t41, &[(1, 1), (9, -3), (17, 2), (25, -1), (41, 10), (49, -7)])?;
    let t42 = theta(ThetaSpec::new((16, 16, 5), 8, 5, (1, 4)))?;
    assert_series(
        "k=12-8√2",
        &t42,
        &[(5, 1), (13, -3), (29, 5), (37, 1), (45, -3), (53, -7), (61, 5), (85, 2)],
    )?;
    let g = theta(ThetaSpec::new((2, 0, 1), 0, 1, (1, 4)).with_parity(1, 1))?;
    assert_series("g", &g, &[(3, 1), (11, -3), (19, 1), (27, 2), (43, 5)])?;
    let f = theta(ThetaSpec::new((8, 0, 1), 0, 1, (1, 2)))?;
    assert_series("f", &f, &[(1, 1), (9, -1), (17, -6), (25, 5), (33, 12)])?;
    // the two level-64 rows against combinations of f64 and f32
    let (level, weight) = (64, 2);
    let n = sturm_bound(level, weight) as usize + 8;
    let rows = identity_table();
    let q = |a: i64, b: i64| Rational::from((a, b));
    for (row, a, b) in [(6, q(1, 2), q(1, 2)), (7, q(1, 4), q(-1, 4))] {
        let lhs = series_of(&rows[row - 1].form, n)?;
        let rhs = series_of(&FormSpec::combo(vec![(a, f64_form(), 1), (b, f32_form(), 1)], level), n)?;
        let r = sturm_compare(&lhs, &rhs, level, weight).map_err(|e| e.to_string())?;
        ensure!(r.bound == 16 && r.equal, "row {row}: {r:?}");
    }
    Ok("f64, f32, both level-64 examples, f and g match every printed coefficient; both Sturm checks equal to q^16".into())
}

const STRICT_ROWS: [usize; 13] = [1, 2, 3, 6, 7, 18, 19, 20, 21, 26, 27, 28, 29];

fn mahler_identities() -> Outcome {
    let t = Instant::now();
    let p = 256;
    let rows = identity_table();
    ensure!(rows.len() == 35, "{} identity rows", rows.len());
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().map_err(|e| e.to_string())?;
    let results: Vec<Result<(usize, f64, f64), String>> = pool.install(|| {
        rows.par_iter()
            .map(|r| {
                let tol = if STRICT_ROWS.contains(&r.row) { 1e-10 } else { 1e-8 };
                let k = kexpr::parse(&r.k, p).map_err(|e| e.to_string())?;
                let m = mahler_jensen(&k, &Float::with_val(p, tol / 100.0)).map_err(|e| e.to_string())?;
                let l = lvalue2(&r.form, tol / 100.0, &LOptions { prec: p, ..LOptions::auto() })
                    .map_err(|e| format!("row {}: {e}", r.row))?;
                let c = r.c_value(p).map_err(|e| e.to_string())?;
                let res = Float::with_val(p, &m - Float::with_val(p, &c * &l.value)).abs().to_f64();
                Ok((r.row, res, tol))
            })
            .collect()
    });
    within(t, Duration::from_secs(1800), "identities")?;
    let mut worst = 0f64;
    for r in results {
        let (row, res, tol) = r?;
        ensure!(res < tol, "row {row}: residual {res:e} ≥ {tol:e}");
        worst = worst.max(res);
    }
    Ok(format!("13 rows below 1e-10 and the other 22 below 1e-8; largest residual {worst:.1e}"))
}

fn cross_method() -> Outcome {
    let mut worst = 0f64;
    for row in table1() {
        let tau = row.triple.tau(128);
        let k = k_from_tau(&tau).map_err(|e| e.to_string())?;
        let j = mahler_jensen(&k, &Float::with_val(128, 1e-12)).map_err(|e| e.to_string())?.to_f64();
        let d = mahler_lattice(&tau, &Float::with_val(64, 1e-4), LatticeStrategy::Direct)
            .map_err(|e| format!("{}: {e}", row.triple))?
            .to_f64();
        worst = worst.max((j - d).abs());
        ensure!((j - d).abs() < 1e-3, "{}: jensen {j}, lattice {d}", row.triple);
    }
    Ok(format!("direct lattice sum within {worst:.1e} of the Jensen integral at all 47 points"))
}

fn period_integrals() -> Outcome {
    let p = 256;
    let eps = Float::with_val(p, 1e-30);
    let six = case_dossier("6").map_err(|e| e.to_string())?;
    let plus = case_path(&six, Side::Plus, p).map_err(|e| e.to_string())?;
    let minus = case_path(&six, Side::Minus, p).map_err(|e| e.to_string())?;
    let ip = path_integral_omega(&plus, &eps).map_err(|e| e.to_string())?;
    let im = path_integral_omega(&minus, &eps).map_err(|e| e.to_string())?;
    ensure!(ip.re.to_f64().abs() < 1e-20 && im.re.to_f64().abs() < 1e-20, "integrals not imaginary");
    let five = |x: f64| format!("{:.5}", x);
    ensure!(five(ip.im.to_f64()) == "0.27152", "E: {}", ip.im.to_f64());
    ensure!(format!("{:.4}", im.im.to_f64()) == "3.1651", "Eσ: {}", im.im.to_f64());
    let mut worst = 0f64;
    for case in case_dossiers() {
        let (e, es) = case_curves(&case);
        for (side, curve) in [(Side::Plus, &e), (Side::Minus, &es)] {
            let path = case_path(&case, side, p).map_err(|e| e.to_string())?;
            let om = path_integral_omega(&path, &eps).map_err(|e| e.to_string())?;
            let lat = fundamental_periods(&curve.numeric(p)).map_err(|e| e.to_string())?;
            let ratio = &om / &lat.imaginary;
            let dev = (ratio.re.to_f64().abs() - 1.0).abs().max(ratio.im.to_f64().abs());
            ensure!(dev < 1e-10, "{} {side:?}: ratio {:?}", case.id, ratio.to_f64());
            worst = worst.max(dev);
        }
    }
    Ok(format!(
        "0.{}i and {}i; all 10 paths are ± the imaginary generator (worst {worst:.1e})",
        &five(ip.im.to_f64())[2..],
        format!("{:.4}", im.im.to_f64())
    ))
}

fn isogeny_suite() -> Outcome {
    let p = 256;
    let eps = Float::with_val(p, 1e-30);
    let expected = [
        ("6", QuadFieldElem::ints(2, 6, 4)),
        ("7.1", QuadFieldElem::ints(3, 0, 1)),
        ("7.2", QuadFieldElem::ints(3, 3, 2)),
        ("7.3", QuadFieldElem::ints(7, 0, 1)),
        ("7.4", QuadFieldElem::ints(7, 21, 8)),
    ];
    let mut found = Vec::new();
    for (id, mult) in expected {
        let case = case_dossier(id).map_err(|e| e.to_string())?;
        ensure!(case.multiplier == mult, "{id}: multiplier {:?}", case.multiplier);
        let r = check_isogeny_identities(&case, 20, p).map_err(|e| e.to_string())?;
        ensure!(r.points == 20, "{id}: {} points", r.points);
        ensure!(r.maps_match_exact, "{id}: Vélu maps differ from the printed ones");
        ensure!(r.map_residual < 1e-25 && r.codomain_residual < 1e-25, "{id}: map residual {:e}", r.map_residual);
        ensure!(r.composition.unsigned_abs() == u64::from(case.degree), "{id}: composition {}", r.composition);
        ensure!(r.composition_residual < 1e-25, "{id}: composition residual {:e}", r.composition_residual);
        ensure!(r.multiplier_residual < 1e-20 && r.multiplier_exact, "{id}: multiplier residual {:e}", r.multiplier_residual);
        let (e, es) = case_curves(&case);
        let plus = case_path(&case, Side::Plus, p).map_err(|e| e.to_string())?;
        let minus = case_path(&case, Side::Minus, p).map_err(|e| e.to_string())?;
        let push = pushforward_multipliers(&plus, &minus, (&e, &es), &case.multiplier, case.composition, &eps)
            .map_err(|e| e.to_string())?;
        let ((pa, pb), opposite) = case.pushforward;
        let shape = (push.a.abs(), push.b.abs()) == (pa, pb) && ((push.a * push.b) < 0) == opposite;
        ensure!(shape, "{id}: pushforward ({}, {})", push.a, push.b);
        ensure!((push.a * push.b).unsigned_abs() == u64::from(case.degree), "{id}: |ab| ≠ degree");
        found.push(format!("{id}:({},{})", push.a, push.b));
    }
    Ok(format!("maps, compositions and multipliers hold at 20 points each; pushforwards {}", found.join(" ")))
}

fn regulators() -> Outcome {
    let constants = [("6", 4096), ("7.1", 2304), ("7.2", 9216), ("7.3", 3136), ("7.4", 50176)];
    let mut worst = (0f64, 0f64);
    let mut rs = Vec::new();
    for (id, c) in constants {
        let r = regulator_case(id, &RegulatorOptions::default()).map_err(|e| format!("{id}: {e}"))?;
        ensure!(r.constant == c, "{id}: constant {}", r.constant);
        ensure!(r.regulator > 0, "{id}: R = 0");
        ensure!(r.residual < 1e-8, "{id}: |R - const/π⁴·L| = {:e}", r.residual);
        for m in &r.m1_pairings {
            ensure!(m.difference < 1e-6, "{id}: direct vs closed form {:e}", m.difference);
            worst.1 = worst.1.max(m.difference);
        }
        worst.0 = worst.0.max(r.residual);
        rs.push(format!("{id}:{:.6}", r.regulator.to_f64()));
    }
    Ok(format!(
        "R = {}; worst residual {:.1e}, worst direct-vs-closed {:.1e}",
        rs.join(" "),
        worst.0,
        worst.1
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("CM table reproduction", table1_reproduction),
        ("class number lists", class_number_lists),
        ("spot values", spot_values),
        ("algebraicity", algebraicity),
        ("q-expansion exactness", q_expansions),
        ("Mahler identities", mahler_identities),
        ("cross-method", cross_method),
        ("period integrals", period_integrals),
        ("isogeny suite", isogeny_suite),
        ("regulators", regulators),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
