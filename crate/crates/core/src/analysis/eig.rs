//! Eigenvalues of small dense complex matrices.
//!
//! Hessenberg reduction by Householder reflections followed by shifted QR
//! iteration with Givens rotations and deflation. Eigenvalues only, which is
//! all harmonic inversion needs; intended for matrix dimensions up to a few
//! dozen.

use nalgebra::DMatrix;
use num_complex::Complex64;

type C = Complex64;

fn house_apply_left(a: &mut DMatrix<C>, v: &[C], col0: usize) {
    // A -= 2 v (v^H A) for rows covered by v starting at row col0.
    let n = a.ncols();
    let m = v.len();
    for c in col0..n {
        let mut dot = C::new(0.0, 0.0);
        for (r, vr) in v.iter().enumerate() {
            dot += vr.conj() * a[(a.nrows() - m + r, c)];
        }
        let row0 = a.nrows() - m;
        for (r, vr) in v.iter().enumerate() {
            let val = a[(row0 + r, c)] - 2.0 * vr * dot;
            a[(row0 + r, c)] = val;
        }
    }
}

fn house_apply_right(a: &mut DMatrix<C>, v: &[C]) {
    let m = v.len();
    let col0 = a.ncols() - m;
    for r in 0..a.nrows() {
        let mut dot = C::new(0.0, 0.0);
        for (c, vc) in v.iter().enumerate() {
            dot += a[(r, col0 + c)] * vc;
        }
        for (c, vc) in v.iter().enumerate() {
            let val = a[(r, col0 + c)] - 2.0 * dot * vc.conj();
            a[(r, col0 + c)] = val;
        }
    }
}

fn to_hessenberg(a: &mut DMatrix<C>) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        // Zero column k below the subdiagonal.
        let m = n - k - 1;
        let mut v: Vec<C> = (0..m).map(|r| a[(k + 1 + r, k)]).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            continue;
        }
        let phase = if v[0].norm() > 1e-300 { v[0] / v[0].norm() } else { C::new(1.0, 0.0) };
        v[0] += phase * norm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm < 1e-300 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        house_apply_left(a, &v, 0);
        house_apply_right(a, &v);
    }
}

/// Givens pair (c real, s complex) such that
/// `[c, s; -conj(s), c]^H [a; b] = [r; 0]`.
fn givens(a: C, b: C) -> (f64, C) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, C::new(0.0, 0.0));
    }
    let r = (na * na + nb * nb).sqrt();
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let alpha = a / na;
    (na / r, alpha * b.conj() / r)
}

/// Eigenvalues of a square complex matrix by shifted Hessenberg QR.
pub fn eigenvalues(mut a: DMatrix<C>) -> Vec<C> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![a[(0, 0)]];
    }
    to_hessenberg(&mut a);
    let mut eigs = vec![C::new(0.0, 0.0); n];
    let mut hi = n; // active block is 0..hi
    let mut iter_guard = 0usize;
    let max_iter = 60 * n;
    while hi > 0 {
        if hi == 1 {
            eigs[0] = a[(0, 0)];
            break;
        }
        // Deflation scan.
        let mut lo = hi - 1;
        while lo > 0 {
            let sub = a[(lo, lo - 1)].norm();
            let diag = a[(lo - 1, lo - 1)].norm() + a[(lo, lo)].norm();
            if sub <= 1e-14 * diag.max(1e-300) {
                a[(lo, lo - 1)] = C::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            // 1x1 block converged.
            eigs[hi - 1] = a[(hi - 1, hi - 1)];
            hi -= 1;
            continue;
        }
        iter_guard += 1;
        if iter_guard > max_iter {
            // Give up on further refinement; report the diagonal of the
            // remaining block (harmonic inversion treats the amplitudes as
            // the final arbiter anyway).
            for i in 0..hi {
                eigs[i] = a[(i, i)];
            }
            break;
        }
        // Wilkinson shift from the trailing 2x2 of the active block.
        let (p, q) = (hi - 2, hi - 1);
        let (h11, h12, h21, h22) = (a[(p, p)], a[(p, q)], a[(q, p)], a[(q, q)]);
        let tr = h11 + h22;
        let det = h11 * h22 - h12 * h21;
        let disc = (tr * tr - 4.0 * det).sqrt();
        let l1 = (tr + disc) * 0.5;
        let l2 = (tr - disc) * 0.5;
        let shift = if (l1 - h22).norm() < (l2 - h22).norm() { l1 } else { l2 };
        // Explicit shifted QR on the active block via Givens rotations.
        let m = hi - lo;
        for i in lo..hi {
            a[(i, i)] -= shift;
        }
        let mut rots: Vec<(f64, C)> = Vec::with_capacity(m - 1);
        for i in lo..hi - 1 {
            let (c, s) = givens(a[(i, i)], a[(i + 1, i)]);
            rots.push((c, s));
            // Apply G^H to rows i, i+1.
            for col in i..hi {
                let x = a[(i, col)];
                let y = a[(i + 1, col)];
                a[(i, col)] = x.scale(c) + s * y;
                a[(i + 1, col)] = -s.conj() * x + y.scale(c);
            }
        }
        for (ri, &(c, s)) in rots.iter().enumerate() {
            let i = lo + ri;
            // Apply G on columns i, i+1.
            let row_end = (i + 2).min(hi);
            for row in lo..row_end {
                let x = a[(row, i)];
                let y = a[(row, i + 1)];
                a[(row, i)] = x.scale(c) + y * s.conj();
                a[(row, i + 1)] = -x * s + y.scale(c);
            }
        }
        for i in lo..hi {
            a[(i, i)] += shift;
        }
    }
    eigs
}
