//! Values checked against computations that do not go through the library's
//! row reducer or locality solver.

use deltader_core::dersolve::{assemble, solve_half_derivations};
use deltader_core::exactlin::{frac, int};
use deltader_core::locality::zero_propagation_scan;
use deltader_core::operators::Window;
use deltader_core::text::parse_element;
use deltader_core::verify::WITTZ_SCAN_INFEASIBLE;
use deltader_core::{Algebra, Scalar};
use num_traits::Zero;

/// Plain dense Gaussian elimination.
#[allow(clippy::needless_range_loop)]
fn dense_rank(mut rows: Vec<Vec<Scalar>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][col].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = &rows[r][col] / &pivot;
                for c in col..ncols {
                    let sub = &f * &rows[rank][c];
                    rows[r][c] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn window(alg: &Algebra, i: (i64, i64), o: (i64, i64)) -> Window {
    Window::ranges(alg, i, o).unwrap()
}

#[test]
fn solved_dimension_equals_dense_nullity() {
    for (alg, i, o) in [
        (Algebra::WittZ, (-3, 3), (-6, 6)),
        (Algebra::WittOneSided, (-1, 4), (-1, 8)),
        (Algebra::Thin, (1, 6), (1, 10)),
        (Algebra::SolvAbelian, (1, 6), (1, 6)),
        (Algebra::wab(int(0), int(-1)), (-2, 2), (-4, 4)),
        (Algebra::wab(frac(1, 2), int(1)), (-2, 2), (-4, 4)),
    ] {
        let w = window(&alg, i, o);
        let sys = assemble(&alg, &frac(1, 2), &w).unwrap();
        let n = sys.matrix.ncols();
        let dense: Vec<Vec<Scalar>> = sys
            .matrix
            .rows()
            .iter()
            .map(|r| (0..n).map(|c| r.coeff(&c)).collect())
            .collect();
        let nullity = n - dense_rank(dense);
        assert_eq!(solve_half_derivations(&alg, &w).unwrap().dim(), nullity, "{alg}");
    }
}

#[test]
fn family_dimensions_counted_by_hand() {
    // α1..α10 plus β2..β6 (β_i sends e6 to e_{i+4}, which must stay ≤ e10).
    let alg = Algebra::Thin;
    assert_eq!(solve_half_derivations(&alg, &window(&alg, (1, 6), (1, 10))).unwrap().dim(), 15);
    // Shifts t = 0..7.
    let alg = Algebra::WittOneSided;
    assert_eq!(solve_half_derivations(&alg, &window(&alg, (-1, 5), (-1, 12))).unwrap().dim(), 8);
    // α_t and β_t for |t| ≤ 3.
    let alg = Algebra::wab(int(0), int(-1));
    assert_eq!(solve_half_derivations(&alg, &window(&alg, (-3, 3), (-6, 6))).unwrap().dim(), 14);
    // D_α with α1..αn and no extra direction.
    for n in 3..=8 {
        let alg = Algebra::SolvAbelian;
        assert_eq!(solve_half_derivations(&alg, &window(&alg, (1, n), (1, n))).unwrap().dim(), n as usize);
    }
}

/// The WittZ family on I=E(-6..6), O=E(-10..10) is the shifts with |t| ≤ 4,
/// so Σ p_t T_t (e1 − c e0) = target reads p(z)(z − c) = target(z) for a
/// Laurent polynomial p supported in z^{-4..4}. That holds iff target(c) = 0
/// and the synthetic-division quotient fits.
fn laurent_feasible(target: &[(i64, i64)], c: i64) -> bool {
    let lo = target.iter().map(|t| t.0).min().unwrap();
    let hi = target.iter().map(|t| t.0).max().unwrap();
    let mut coeffs: Vec<i64> = (lo..=hi)
        .map(|d| target.iter().filter(|t| t.0 == d).map(|t| t.1).sum())
        .collect();
    // Divide by (z − c) from the top degree down.
    let mut quotient = vec![0; coeffs.len().saturating_sub(1)];
    for k in (1..coeffs.len()).rev() {
        quotient[k - 1] = coeffs[k];
        coeffs[k - 1] += c * coeffs[k];
    }
    let remainder = coeffs[0];
    let q_lo = lo;
    let q_hi = hi - 1;
    remainder == 0 && (q_lo..=q_hi).all(|d| (-4..=4).contains(&d) || quotient[(d - q_lo) as usize] == 0)
}

#[test]
fn zero_propagation_scan_matches_laurent_division() {
    let alg = Algebra::WittZ;
    let family = solve_half_derivations(&alg, &window(&alg, (-6, 6), (-10, 10))).unwrap();
    let cs: Vec<Scalar> = (1..=10).map(int).collect();
    let cases: [(&str, &[(i64, i64)]); 4] = [
        ("e1", &[(1, 1)]),
        ("e1 - 2*e0", &[(1, 1), (0, -2)]),
        ("e2 - 5*e1 + 6*e0", &[(2, 1), (1, -5), (0, 6)]),
        ("e3 - 7*e2", &[(3, 1), (2, -7)]),
    ];
    for (value, poly) in cases {
        let scan = zero_propagation_scan(&alg, &parse_element(value).unwrap(), 0, &cs, &family).unwrap();
        for (p, c) in scan.iter().zip(1..=10) {
            assert_eq!(p.feasible, laurent_feasible(poly, c), "value {value}, c = {c}");
        }
    }
    let infeasible: Vec<i64> = (1..=10).filter(|c| !laurent_feasible(&[(1, 1)], *c)).collect();
    assert_eq!(infeasible, WITTZ_SCAN_INFEASIBLE);
}
