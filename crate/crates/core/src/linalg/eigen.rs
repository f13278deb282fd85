use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::DenseMatrix;
use crate::error::LinalgError;

/// Largest matrix the eigensolver accepts.
pub const MAX_EIGEN_DIM: usize = 64;

/// Eigenvalues of a real matrix, in no particular order.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSet {
    pub values: Vec<Complex64>,
    /// `false` when the QR sweep budget ran out; the undeflated part of
    /// `values` then holds diagonal entries of the partially reduced matrix.
    pub converged: bool,
}

impl EigenSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_real(&self) -> f64 {
        self.values.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Eigenvalues with `im > threshold`, one representative per conjugate pair.
    pub fn upper_complex(&self, threshold: f64) -> impl Iterator<Item = Complex64> + '_ {
        self.values.iter().copied().filter(move |z| z.im > threshold)
    }

    /// Sorted copy: descending real part, then descending imaginary part.
    pub fn sorted(&self) -> Vec<Complex64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        v
    }
}

/// Eigenvalues by balancing, Householder reduction to upper Hessenberg form
/// and Francis double-shift QR with deflation of 1×1 and 2×2 blocks.
///
/// Sweeps are capped at `100·n`; past that the result carries
/// `converged = false`.
pub fn eigenvalues(a: &DenseMatrix) -> Result<EigenSet, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let n = a.nrows();
    if n > MAX_EIGEN_DIM {
        return Err(LinalgError::TooLarge(n));
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    Ok(hessenberg_qr(&mut h))
}

/// Diagonal similarity by powers of two so that row and column norms are
/// comparable. Exact in floating point.
fn balance(a: &mut DenseMatrix) {
    const RADIX: f64 = 2.0;
    const RADIX_SQ: f64 = RADIX * RADIX;
    let n = a.nrows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX_SQ;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX_SQ;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= inv;
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut DenseMatrix) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    for k in 0..n - 2 {
        let scale: f64 = (k + 1..n).map(|i| a[(i, k)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut sigma = 0.0;
        for i in k + 1..n {
            v[i] = a[(i, k)] / scale;
            sigma += v[i] * v[i];
        }
        let norm = libm::sqrt(sigma);
        let alpha = if v[k + 1] > 0.0 { -norm } else { norm };
        v[k + 1] -= alpha;
        let vtv: f64 = (k + 1..n).map(|i| v[i] * v[i]).sum();
        if vtv == 0.0 {
            continue;
        }
        let beta = 2.0 / vtv;
        // left: A ← (I − β v vᵀ) A on rows k+1..n
        for j in k..n {
            let s: f64 = (k + 1..n).map(|i| v[i] * a[(i, j)]).sum::<f64>() * beta;
            for i in k + 1..n {
                a[(i, j)] -= s * v[i];
            }
        }
        // right: A ← A (I − β v vᵀ) on columns k+1..n
        for i in 0..n {
            let s: f64 = (k + 1..n).map(|j| a[(i, j)] * v[j]).sum::<f64>() * beta;
            for j in k + 1..n {
                a[(i, j)] -= s * v[j];
            }
        }
        a[(k + 1, k)] = alpha * scale;
        for i in k + 2..n {
            a[(i, k)] = 0.0;
        }
    }
}

#[inline]
fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (destroys `a`).
fn hessenberg_qr(a: &mut DenseMatrix) -> EigenSet {
    let n = a.nrows();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    if n == 0 {
        return EigenSet {
            values: Vec::new(),
            converged: true,
        };
    }
    let max_sweeps = 100 * n;
    let mut sweeps = 0usize;
    let mut converged = true;

    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }

    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let mut its = 0usize;
    while nn >= 0 {
        let hi = nn as usize;
        // locate a negligible subdiagonal element
        let mut l = hi;
        while l > 0 {
            let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
            if s == 0.0 {
                s = anorm;
            }
            if a[(l, l - 1)].abs() + s == s {
                a[(l, l - 1)] = 0.0;
                break;
            }
            l -= 1;
        }
        let mut x = a[(hi, hi)];
        if l == hi {
            wr[hi] = x + t;
            wi[hi] = 0.0;
            nn -= 1;
            its = 0;
            continue;
        }
        let mut y = a[(hi - 1, hi - 1)];
        let mut w = a[(hi, hi - 1)] * a[(hi - 1, hi)];
        if l == hi - 1 {
            let p = 0.5 * (y - x);
            let q = p * p + w;
            let z = libm::sqrt(q.abs());
            x += t;
            if q >= 0.0 {
                let z = p + sign(z, p);
                wr[hi - 1] = x + z;
                wr[hi] = if z != 0.0 { x - w / z } else { x + z };
                wi[hi - 1] = 0.0;
                wi[hi] = 0.0;
            } else {
                wr[hi - 1] = x + p;
                wr[hi] = x + p;
                wi[hi - 1] = -z;
                wi[hi] = z;
            }
            nn -= 2;
            its = 0;
            continue;
        }

        if sweeps >= max_sweeps {
            converged = false;
            for i in 0..=hi {
                wr[i] = a[(i, i)] + t;
                wi[i] = 0.0;
            }
            break;
        }
        if its > 0 && its.is_multiple_of(10) {
            // exceptional shift
            t += x;
            for i in 0..=hi {
                a[(i, i)] -= x;
            }
            let s = a[(hi, hi - 1)].abs() + a[(hi - 1, hi - 2)].abs();
            x = 0.75 * s;
            y = x;
            w = -0.4375 * s * s;
        }
        its += 1;
        sweeps += 1;

        // look for two consecutive small subdiagonal elements
        let mut m = hi - 2;
        let (mut p, mut q, mut r);
        loop {
            let z = a[(m, m)];
            let rr = x - z;
            let ss = y - z;
            p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
            q = a[(m + 1, m + 1)] - z - rr - ss;
            r = a[(m + 2, m + 1)];
            let s = p.abs() + q.abs() + r.abs();
            p /= s;
            q /= s;
            r /= s;
            if m == l {
                break;
            }
            let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
            let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
            if u + v == v {
                break;
            }
            m -= 1;
        }
        for i in m + 2..=hi {
            a[(i, i - 2)] = 0.0;
            if i != m + 2 {
                a[(i, i - 3)] = 0.0;
            }
        }
        // double QR step on rows l..=hi, columns m..=hi
        let mut k = m;
        while k < hi {
            let mut xk = 0.0;
            if k != m {
                p = a[(k, k - 1)];
                q = a[(k + 1, k - 1)];
                r = if k != hi - 1 { a[(k + 2, k - 1)] } else { 0.0 };
                xk = p.abs() + q.abs() + r.abs();
                if xk != 0.0 {
                    p /= xk;
                    q /= xk;
                    r /= xk;
                }
            }
            let s = sign(libm::sqrt(p * p + q * q + r * r), p);
            if s != 0.0 {
                if k == m {
                    if l != m {
                        a[(k, k - 1)] = -a[(k, k - 1)];
                    }
                } else {
                    a[(k, k - 1)] = -s * xk;
                }
                p += s;
                let hx = p / s;
                let hy = q / s;
                let hz = r / s;
                q /= p;
                r /= p;
                for j in k..=hi {
                    let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                    if k != hi - 1 {
                        pp += r * a[(k + 2, j)];
                        a[(k + 2, j)] -= pp * hz;
                    }
                    a[(k + 1, j)] -= pp * hy;
                    a[(k, j)] -= pp * hx;
                }
                let mmin = if hi < k + 3 { hi } else { k + 3 };
                for i in l..=mmin {
                    let mut pp = hx * a[(i, k)] + hy * a[(i, k + 1)];
                    if k != hi - 1 {
                        pp += hz * a[(i, k + 2)];
                        a[(i, k + 2)] -= pp * r;
                    }
                    a[(i, k + 1)] -= pp * q;
                    a[(i, k)] -= pp;
                }
            }
            k += 1;
        }
    }

    EigenSet {
        values: wr
            .into_iter()
            .zip(wi)
            .map(|(re, im)| Complex64::new(re, im))
            .collect(),
        converged,
    }
}
