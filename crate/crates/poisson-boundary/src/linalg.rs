//! Dense Gaussian elimination over [`Field`] scalars: rank, nullspace and a Hermitian PSD test.
//! Exact in exact mode; float mode uses partial pivoting and the scalar's zero tolerance.

use crate::scalar::{Field, Real};

/// Row-major dense matrix.
pub type Dense<S> = Vec<Vec<S>>;

/// Reduced row echelon form and the pivot columns.
pub fn rref<S: Field>(m: &Dense<S>) -> (Dense<S>, Vec<usize>) {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // Largest modulus first; harmless in exact mode, stabilizing in float mode.
        let best = (r..rows)
            .filter(|&i| !a[i][c].is_zero())
            .max_by(|&i, &j| {
                a[i][c]
                    .to_c64()
                    .norm()
                    .total_cmp(&a[j][c].to_c64().norm())
            });
        let Some(p) = best else { continue };
        a.swap(r, p);
        let inv = a[r][c].inv();
        for x in a[r].iter_mut().skip(c) {
            *x = x.mul(&inv);
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                *x = x.sub(&f.mul(y));
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank<S: Field>(m: &Dense<S>) -> usize {
    rref(m).1.len()
}

/// Basis of `{x : m x = 0}`, one vector per free column.
pub fn nullspace<S: Field>(m: &Dense<S>) -> Vec<Vec<S>> {
    let cols = m.first().map_or(0, Vec::len);
    let (a, pivots) = rref(m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); cols];
            v[f] = S::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = a[r][f].neg();
            }
            v
        })
        .collect()
}

/// Hermitian positive-semidefiniteness by symmetric elimination: a zero pivot must have a
/// zero row, and every non-zero pivot must be real and positive.
pub fn is_psd<S: Field>(m: &Dense<S>) -> bool {
    let n = m.len();
    let mut a = m.clone();
    for i in 0..n {
        for j in 0..n {
            if !a[i][j].sub(&a[j][i].conj()).is_zero() {
                return false;
            }
        }
    }
    let mut alive: Vec<usize> = (0..n).collect();
    while let Some(pos) = alive
        .iter()
        .position(|&k| !a[k][k].is_zero())
    {
        let k = alive.remove(pos);
        let p = a[k][k].clone();
        if !p.im().approx_eq(&S::Real::zero()) || !p.re().is_positive() {
            return false;
        }
        let inv = p.inv();
        let pivot_row = a[k].clone();
        for &i in &alive {
            let f = a[i][k].mul(&inv);
            for &j in &alive {
                a[i][j] = a[i][j].sub(&f.mul(&pivot_row[j]));
            }
        }
    }
    alive.iter().all(|&i| alive.iter().all(|&j| a[i][j].is_zero()))
}
