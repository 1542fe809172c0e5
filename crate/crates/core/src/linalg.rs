//! Dense Gaussian elimination over `F_q`.

use crate::gfq::BaseField;

pub type Vector = Vec<u32>;

/// Brings `rows` into reduced row echelon form in place, dropping zero rows.
/// Returns the pivot columns.
pub fn rref(f: &BaseField, rows: &mut Vec<Vector>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == rows.len() {
            break;
        }
        let Some(pivot_row) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let inv = f.inv(rows[rank][col]).expect("pivot is nonzero");
        if inv != 1 {
            for x in rows[rank].iter_mut() {
                *x = f.mul(*x, inv);
            }
        }
        let pivot = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == rank || row[col] == 0 {
                continue;
            }
            let c = row[col];
            for (x, &pv) in row.iter_mut().zip(&pivot).skip(col) {
                if pv != 0 {
                    *x = f.sub(*x, f.mul(c, pv));
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    pivots
}

pub fn rank(f: &BaseField, rows: &[Vector], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(f, &mut m, ncols).len()
}

/// Basis of `{x : M x = 0}` where `rows` are the rows of `M`.
pub fn kernel(f: &BaseField, rows: &[Vector], ncols: usize) -> Vec<Vector> {
    let mut m = rows.to_vec();
    let pivots = rref(f, &mut m, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![0u32; ncols];
            v[free] = 1;
            for (row, &p) in m.iter().zip(&pivots) {
                v[p] = f.neg(row[free]);
            }
            v
        })
        .collect()
}

pub fn transpose(rows: &[Vector], ncols: usize) -> Vec<Vector> {
    (0..ncols)
        .map(|c| rows.iter().map(|r| r[c]).collect())
        .collect()
}

pub fn dot(f: &BaseField, a: &[u32], b: &[u32]) -> u32 {
    a.iter()
        .zip(b)
        .fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// `Σ coeffs[i] * vectors[i]`.
pub fn combine(f: &BaseField, coeffs: &[u32], vectors: &[Vector], len: usize) -> Vector {
    let mut out = vec![0u32; len];
    for (&c, v) in coeffs.iter().zip(vectors) {
        if c == 0 {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(v) {
            *o = f.add(*o, f.mul(c, x));
        }
    }
    out
}

/// Inverse of a square matrix given by rows, or `None` when singular.
pub fn inverse(f: &BaseField, rows: &[Vector]) -> Option<Vec<Vector>> {
    let n = rows.len();
    let mut aug: Vec<Vector> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| u32::from(i == j)));
            row
        })
        .collect();
    let pivots = rref(f, &mut aug, 2 * n);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Position of `v` in lexicographic order (first coordinate most significant).
pub fn vector_index(q: u32, v: &[u32]) -> u64 {
    v.iter().fold(0u64, |acc, &c| acc * q as u64 + c as u64)
}

pub fn vector_from_index(q: u32, len: usize, mut idx: u64) -> Vector {
    let mut v = vec![0u32; len];
    for slot in v.iter_mut().rev() {
        *slot = (idx % q as u64) as u32;
        idx /= q as u64;
    }
    v
}

pub fn is_zero(v: &[u32]) -> bool {
    v.iter().all(|&c| c == 0)
}
