//! Shared inputs for the criterion benches.

use mahlercm::{BigComplex, QuadForm};

/// CM points of a few printed rows, from small to large discriminant.
pub fn sample_points(prec: u32) -> Vec<(QuadForm, BigComplex)> {
    [(1, 0, 1), (4, 0, 1), (16, 16, 5), (28, 0, 1)]
        .into_iter()
        .map(|(a, b, c)| {
            let f = QuadForm::new(a, b, c);
            (f, f.tau(prec))
        })
        .collect()
}
