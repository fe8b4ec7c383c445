//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the library's numerical kernels.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Minimizes `tau|z| + (z - v)²/2` per coordinate over a grid of spacing `h`.
pub fn grid_prox(v: &[f64], tau: f64, h: f64) -> Vec<f64> {
    v.iter()
        .map(|&vi| {
            let span = vi.abs() + 1.0;
            let steps = (2.0 * span / h).ceil() as i64;
            let mut best = (f64::INFINITY, 0.0);
            for s in 0..=steps {
                let z = -span + s as f64 * h;
                let obj = tau * z.abs() + 0.5 * (z - vi) * (z - vi);
                if obj < best.0 {
                    best = (obj, z);
                }
            }
            best.1
        })
        .collect()
}

/// Projection onto the simplex by enumerating candidate supports and keeping
/// the one satisfying the optimality conditions.
pub fn simplex_by_enumeration(v: &[f64]) -> Vec<f64> {
    let l = v.len();
    assert!(l <= 16);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << l) {
        let members: Vec<usize> = (0..l).filter(|i| mask & (1 << i) != 0).collect();
        let theta = (members.iter().map(|&i| v[i]).sum::<f64>() - 1.0) / members.len() as f64;
        let mut x = vec![0.0; l];
        let mut ok = true;
        for i in 0..l {
            if mask & (1 << i) != 0 {
                x[i] = v[i] - theta;
                ok &= x[i] >= -1e-12;
            } else {
                ok &= v[i] - theta <= 1e-12;
            }
        }
        if ok {
            let d: f64 = x.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
            if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
                best = Some((d, x.into_iter().map(|t| t.max(0.0)).collect()));
            }
        }
    }
    best.expect("some support satisfies the optimality conditions").1
}

/// Largest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_max_eigenvalue(mut s: Vec<Vec<f64>>) -> f64 {
    let n = s.len();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s[i][j] * s[i][j])
            .sum();
        if off < 1e-22 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if s[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let (a, b) = (s[k][p], s[k][q]);
                    s[k][p] = c * a - sn * b;
                    s[k][q] = sn * a + c * b;
                }
                for k in 0..n {
                    let (a, b) = (s[p][k], s[q][k]);
                    s[p][k] = c * a - sn * b;
                    s[q][k] = sn * a + c * b;
                }
            }
        }
    }
    (0..n).map(|i| s[i][i]).fold(f64::NEG_INFINITY, f64::max)
}

/// `‖A‖₂` from the eigenvalues of `AᵀA`.
pub fn spectral_norm_oracle(rows: &[Vec<f64>]) -> f64 {
    let n = rows[0].len();
    let gram: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| rows.iter().map(|r| r[i] * r[j]).sum()).collect())
        .collect();
    jacobi_max_eigenvalue(gram).max(0.0).sqrt()
}

/// Minimizes `‖x‖₁ + (λ1/2)‖y − Ax‖² + (λ2/2)‖x‖²` by cyclic coordinate
/// descent.
pub fn lasso_coordinate_descent(rows: &[Vec<f64>], y: &[f64], l1: f64, l2: f64, sweeps: usize) -> Vec<f64> {
    let n = rows[0].len();
    let mut x = vec![0.0; n];
    let mut r: Vec<f64> = y.to_vec();
    let col_sq: Vec<f64> = (0..n).map(|j| rows.iter().map(|row| row[j] * row[j]).sum()).collect();
    for _ in 0..sweeps {
        let mut moved: f64 = 0.0;
        for j in 0..n {
            let rho: f64 = rows.iter().zip(&r).map(|(row, ri)| row[j] * ri).sum::<f64>() + col_sq[j] * x[j];
            let denom = l1 * col_sq[j] + l2;
            let z = l1 * rho;
            let new = z.signum() * (z.abs() - 1.0).max(0.0) / denom;
            let d = new - x[j];
            if d != 0.0 {
                for (row, ri) in rows.iter().zip(r.iter_mut()) {
                    *ri -= row[j] * d;
                }
                x[j] = new;
            }
            moved = moved.max(d.abs());
        }
        if moved < 1e-14 {
            break;
        }
    }
    x
}

/// Central finite-difference gradient.
pub fn finite_difference<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|j| {
            let mut a = x.to_vec();
            let mut b = x.to_vec();
            a[j] += h;
            b[j] -= h;
            (f(&a) - f(&b)) / (2.0 * h)
        })
        .collect()
}

/// `f_i(x)` for a support window written out term by term.
pub fn window_objective(
    rows: &[Vec<f64>],
    y: &[f64],
    window: (usize, usize),
    c: f64,
    l1: f64,
    l2: f64,
    x: &[f64],
) -> f64 {
    let (start, width) = window;
    let mut f = 0.0;
    for (j, xj) in x.iter().enumerate() {
        f += xj.abs() + 0.5 * l2 * xj * xj;
        let inside = j + 1 >= start && j + 1 < start + width;
        if !inside {
            f += c * xj * xj;
        }
    }
    for (row, yi) in rows.iter().zip(y) {
        let ax: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
        f += 0.5 * l1 * (yi - ax) * (yi - ax);
    }
    f
}

/// Monte Carlo mean of `‖g‖₂` for `g ~ N(0, I_m)` with its standard error.
pub fn mc_gauss_norm(m: usize, samples: usize, seed: u64) -> (f64, f64) {
    let mut r = rng(seed);
    let vals: Vec<f64> = (0..samples)
        .map(|_| gaussian_vec(&mut r, m).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let mean = vals.iter().sum::<f64>() / samples as f64;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (samples - 1) as f64;
    (mean, (var / samples as f64).sqrt())
}

/// `√2 Γ((m+1)/2) / Γ(m/2)` through the ratio recursion `a_{m+1} = m / a_m`.
pub fn gauss_norm_recursion(m: usize) -> f64 {
    let mut a = (2.0 / std::f64::consts::PI).sqrt();
    for k in 1..m {
        a = k as f64 / a;
    }
    a
}
