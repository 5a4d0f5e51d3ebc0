//! One row pair per work item, merging the two sorted column lists.

use rayon::prelude::*;

use crate::sparse::CsrMatrix;

/// Visits the nonzeros of `driver` and reports each one together with the
/// matching value of `other` (if stored). Both slices are sorted.
#[inline(always)]
fn merge_lookup<F: FnMut(Option<f64>, f64)>(
    other_cols: &[usize],
    other_vals: &[f64],
    driver_cols: &[usize],
    driver_vals: &[f64],
    mut f: F,
) {
    let mut p = 0;
    for (t, &c) in driver_cols.iter().enumerate() {
        while p < other_cols.len() && other_cols[p] < c {
            p += 1;
        }
        let hit = if p < other_cols.len() && other_cols[p] == c {
            Some(other_vals[p])
        } else {
            None
        };
        f(hit, driver_vals[t]);
    }
}

/// For each cell, streams the nonzeros of `B_j` and reduces
/// `contrib(A_i[c] if stored, B_j[c])` into the cell.
pub(crate) fn naive_pass1<F, R>(a: &CsrMatrix, b: &CsrMatrix, out: &mut [f64], reduce: &R, contrib: &F)
where
    F: Fn(Option<f64>, f64) -> Option<f64> + Sync,
    R: Fn(f64, f64) -> f64 + Sync,
{
    let n = b.n_rows();
    if n == 0 {
        return;
    }
    out.par_chunks_mut(n).enumerate().for_each(|(i, out_row)| {
        let (ac, av) = a.row(i);
        for (j, cell) in out_row.iter_mut().enumerate() {
            let (bc, bv) = b.row(j);
            let mut acc = *cell;
            merge_lookup(ac, av, bc, bv, |hit, bval| {
                if let Some(v) = contrib(hit, bval) {
                    acc = reduce(acc, v);
                }
            });
            *cell = acc;
        }
    });
}

/// For each cell, streams the nonzeros of `A_i` and reduces
/// `contrib(B_j[c] if stored, A_i[c])` into the cell.
pub(crate) fn naive_pass2<F, R>(a: &CsrMatrix, b: &CsrMatrix, out: &mut [f64], reduce: &R, contrib: &F)
where
    F: Fn(Option<f64>, f64) -> Option<f64> + Sync,
    R: Fn(f64, f64) -> f64 + Sync,
{
    let n = b.n_rows();
    if n == 0 {
        return;
    }
    out.par_chunks_mut(n).enumerate().for_each(|(i, out_row)| {
        let (ac, av) = a.row(i);
        for (j, cell) in out_row.iter_mut().enumerate() {
            let (bc, bv) = b.row(j);
            let mut acc = *cell;
            merge_lookup(bc, bv, ac, av, |hit, aval| {
                if let Some(v) = contrib(hit, aval) {
                    acc = reduce(acc, v);
                }
            });
            *cell = acc;
        }
    });
}

/// Single merge over both rows. Annihilating semirings only evaluate the
/// product where both columns are stored; otherwise the full union is
/// visited with absent entries read as 0.
pub(crate) fn naive_union<const ANNIHILATING: bool, P, R>(
    a: &CsrMatrix,
    b: &CsrMatrix,
    out: &mut [f64],
    product: &P,
    reduce: &R,
) where
    P: Fn(f64, f64) -> f64 + Sync,
    R: Fn(f64, f64) -> f64 + Sync,
{
    let n = b.n_rows();
    if n == 0 {
        return;
    }
    out.par_chunks_mut(n).enumerate().for_each(|(i, out_row)| {
        let (ac, av) = a.row(i);
        for (j, cell) in out_row.iter_mut().enumerate() {
            let (bc, bv) = b.row(j);
            let mut acc = *cell;
            let (mut ia, mut ib) = (0, 0);
            while ia < ac.len() || ib < bc.len() {
                let col_a = if ia < ac.len() { ac[ia] } else { usize::MAX };
                let col_b = if ib < bc.len() { bc[ib] } else { usize::MAX };
                let mut va = 0.0;
                let mut vb = 0.0;
                if col_a <= col_b {
                    va = av[ia];
                    ia += 1;
                }
                if col_b <= col_a {
                    vb = bv[ib];
                    ib += 1;
                }
                if ANNIHILATING && col_a != col_b {
                    continue;
                }
                acc = reduce(acc, product(va, vb));
            }
            *cell = acc;
        }
    });
}
