//! Characteristic polynomials, their roots, and the Hurwitz test.
//!
//! Coefficients are stored in ascending powers: `coeffs[k]` multiplies `λ^k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `det(λI - J) = c0 + c1 λ + c2 λ^2 + c3 λ^3 + λ^4`, stored ascending.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharPoly {
    pub coeffs: [f64; 5],
}

impl CharPoly {
    pub fn monic(c0: f64, c1: f64, c2: f64, c3: f64) -> Self {
        Self {
            coeffs: [c0, c1, c2, c3, 1.0],
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner(&self.coeffs, z)
    }

    /// The cubic left after dividing out one factor of `λ`.
    ///
    /// Meaningful when `c0` vanishes identically, as it does for both model
    /// Jacobians.
    pub fn deflate_zero_root(&self) -> [f64; 4] {
        [self.coeffs[1], self.coeffs[2], self.coeffs[3], self.coeffs[4]]
    }
}

pub(crate) fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Faddeev-LeVerrier recurrence for a 4x4 matrix.
pub fn characteristic_polynomial(j: &[[f64; 4]; 4]) -> CharPoly {
    const N: usize = 4;
    let mut coeffs = [0.0; N + 1];
    coeffs[N] = 1.0;
    let mut m = [[0.0; N]; N];
    for k in 1..=N {
        // M_k = J M_{k-1} + c_{n-k+1} I
        let mut next = matmul(j, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += coeffs[N - k + 1];
        }
        m = next;
        let jm = matmul(j, &m);
        let trace: f64 = (0..N).map(|i| jm[i][i]).sum();
        coeffs[N - k] = -trace / k as f64;
    }
    CharPoly { coeffs }
}

fn matmul(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..4 {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub const DK_MAX_ITER: usize = 500;
pub const DK_TOL: f64 = 1e-12;

/// All roots of a monic polynomial (ascending coefficients, leading one last),
/// by Durand-Kerner iteration. Sorted by real part, largest first.
pub fn monic_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("polynomial coefficient".into()));
    }
    if coeffs[n] != 1.0 {
        return Err(Error::Precondition("polynomial must be monic".into()));
    }

    // Fujiwara-style radius so that the starting circle encloses the roots.
    let radius = (1..=n)
        .map(|k| coeffs[n - k].abs().powf(1.0 / k as f64))
        .fold(0.0_f64, f64::max);
    let radius = if radius > 0.0 { 2.0 * radius } else { 1.0 };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    let mut converged = false;
    for _ in 0..DK_MAX_ITER {
        let mut max_step = 0.0_f64;
        for k in 0..n {
            let num = horner(coeffs, z[k]);
            let mut den = Complex64::new(1.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != k {
                    let diff = z[k] - zj;
                    den *= if diff == Complex64::new(0.0, 0.0) {
                        Complex64::new(1e-300, 0.0)
                    } else {
                        diff
                    };
                }
            }
            let step = num / den;
            if !step.is_finite() {
                continue;
            }
            z[k] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
        }
        if max_step < DK_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::RootsNoConvergence {
            iterations: DK_MAX_ITER,
            best: z,
        });
    }
    z.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(z)
}

/// The four eigenvalues encoded by a characteristic polynomial.
pub fn polynomial_roots(cp: &CharPoly) -> Result<[Complex64; 4]> {
    let roots = monic_roots(&cp.coeffs)?;
    for r in &roots {
        let bound = 1e-8 * (1.0 + r.norm()).powi(4);
        if cp.eval(*r).norm() > bound {
            return Err(Error::RootsNoConvergence {
                iterations: DK_MAX_ITER,
                best: roots,
            });
        }
    }
    Ok([roots[0], roots[1], roots[2], roots[3]])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurwitzVerdict {
    pub stable: bool,
    /// Leading principal minors of the Hurwitz matrix, smallest first.
    pub determinants: Vec<f64>,
}

/// Hurwitz determinants `Δ1..Δn` of a monic polynomial (ascending coefficients).
pub fn hurwitz_determinants(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len() - 1;
    // a_i multiplies λ^(n-i), a_0 = 1.
    let a = |i: isize| -> f64 {
        if i < 0 || i as usize > n {
            0.0
        } else {
            coeffs[n - i as usize]
        }
    };
    let mut h = vec![vec![0.0; n]; n];
    for (row, line) in h.iter_mut().enumerate() {
        for (col, cell) in line.iter_mut().enumerate() {
            *cell = a(2 * col as isize - row as isize + 1);
        }
    }
    (1..=n).map(|k| leading_minor(&h, k)).collect()
}

fn leading_minor(h: &[Vec<f64>], k: usize) -> f64 {
    let mut m: Vec<Vec<f64>> = h[..k].iter().map(|r| r[..k].to_vec()).collect();
    let mut det = 1.0;
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        let (upper, lower) = m.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for row in lower.iter_mut() {
            let f = row[col] / pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
        }
    }
    det
}

/// Quartic Routh-Hurwitz test: every `c_i > 0` and `c3 c2 c1 > c1^2 + c3^2 c0`.
pub fn routh_hurwitz(cp: &CharPoly) -> HurwitzVerdict {
    let [c0, c1, c2, c3, _] = cp.coeffs;
    let positive = [c0, c1, c2, c3].iter().all(|&c| c > 0.0);
    HurwitzVerdict {
        stable: positive && c3 * c2 * c1 > c1 * c1 + c3 * c3 * c0,
        determinants: hurwitz_determinants(&cp.coeffs),
    }
}

/// Cubic Routh-Hurwitz test: every `c_i > 0` and `c2 c1 > c0`.
pub fn routh_hurwitz_cubic(coeffs: &[f64; 4]) -> HurwitzVerdict {
    let [c0, c1, c2, _] = *coeffs;
    let positive = [c0, c1, c2].iter().all(|&c| c > 0.0);
    HurwitzVerdict {
        stable: positive && c2 * c1 > c0,
        determinants: hurwitz_determinants(coeffs),
    }
}
