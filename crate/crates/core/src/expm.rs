//! Matrix exponential by scaling and squaring with Padé approximants
//! (Higham 2005): the lowest-degree approximant whose error bound holds at
//! the matrix 1-norm is used; otherwise the degree-13 approximant is applied
//! to `A / 2^s` and the result squared `s` times.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
];
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17_297_280.0,
    8_648_640.0,
    1_995_840.0,
    277_200.0,
    25_200.0,
    1_512.0,
    56.0,
    1.0,
];
const B9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3_960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// `exp(m)` for a square matrix with finite entries.
///
/// Returns [`Error::Overflow`] when the result cannot be represented in
/// double precision.
pub fn matrix_exponential(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    assert!(m.is_square(), "matrix exponential needs a square matrix");
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("matrix", "entries must be finite"));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(m.clone());
    }

    let norm = one_norm(m);
    let result = match THETA.iter().find(|&&(_, theta)| norm <= theta) {
        Some(&(degree, _)) => pade_low(m, degree),
        None => {
            let s = if norm > THETA_13 {
                (norm / THETA_13).log2().ceil().max(0.0) as i32
            } else {
                0
            };
            let scaled = m * 2f64.powi(-s);
            let mut e = pade13(&scaled);
            for _ in 0..s {
                e = &e * &e;
                if e.iter().any(|x| !x.is_finite()) {
                    break;
                }
            }
            e
        }
    };

    if result.iter().all(|x| x.is_finite()) {
        Ok(result)
    } else {
        Err(Error::Overflow {
            spectral_radius: spectral_radius(m),
            horizon: 1.0,
        })
    }
}

/// Column-sum norm.
pub fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest eigenvalue modulus, from the real Schur form.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Spectral radius, skipping the eigen-solve when the cheap norm bound is
/// already below `limit`.
pub(crate) fn spectral_radius_bounded(m: &DMatrix<f64>, limit: f64) -> f64 {
    let bound = one_norm(m).min(inf_norm(m));
    if bound <= limit {
        bound
    } else {
        spectral_radius(m)
    }
}

fn pade_low(a: &DMatrix<f64>, degree: usize) -> DMatrix<f64> {
    let b: &[f64] = match degree {
        3 => &B3,
        5 => &B5,
        7 => &B7,
        9 => &B9,
        _ => unreachable!(),
    };
    let n = a.nrows();
    let ident = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    // even powers I, A^2, A^4, ...
    let mut powers = vec![ident, a2.clone()];
    while powers.len() <= degree / 2 {
        let next = powers.last().unwrap() * &a2;
        powers.push(next);
    }
    let mut u = DMatrix::zeros(n, n);
    let mut v = DMatrix::zeros(n, n);
    for (k, p) in powers.iter().enumerate() {
        u += p * b[2 * k + 1];
        v += p * b[2 * k];
    }
    let u = a * u;
    solve(&v - &u, &v + &u)
}

fn pade13(a: &DMatrix<f64>) -> DMatrix<f64> {
    let b = &B13;
    let n = a.nrows();
    let ident = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &ident * b[1];
    let u = a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &ident * b[0];
    solve(&v - &u, &v + &u)
}

/// Solves `q x = p`. The Padé denominator is nonsingular within the theta
/// bounds.
fn solve(q: DMatrix<f64>, p: DMatrix<f64>) -> DMatrix<f64> {
    q.lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular within the scaling bounds")
}
