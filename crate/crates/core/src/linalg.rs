//! Row reduction over a finite field.

use crate::field::{FieldElement, FieldSpec};

/// Reduces `rows` in place to reduced row echelon form and returns the pivot
/// columns. Zero rows are dropped.
pub fn row_reduce(field: &FieldSpec, rows: &mut Vec<Vec<FieldElement>>) -> Vec<usize> {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..width {
        let Some(found) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, found);
        let scale = field.inv(rows[rank][col]).expect("pivot is nonzero");
        for v in rows[rank].iter_mut() {
            *v = field.mul(*v, scale);
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col];
            for (v, &p) in row.iter_mut().zip(&pivot_row) {
                *v = field.sub(*v, field.mul(factor, p));
            }
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    pivots
}

pub fn rank(field: &FieldSpec, rows: &[Vec<FieldElement>]) -> usize {
    let mut rows = rows.to_vec();
    row_reduce(field, &mut rows).len()
}

/// Basis of `{ v : M v = 0 }` for the matrix given by `rows` (each of length
/// `width`).
pub fn nullspace(field: &FieldSpec, rows: &[Vec<FieldElement>], width: usize) -> Vec<Vec<FieldElement>> {
    let mut reduced = rows.to_vec();
    let pivots = row_reduce(field, &mut reduced);
    let free: Vec<usize> = (0..width).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![FieldElement::ZERO; width];
            v[f] = FieldElement::ONE;
            for (row, &pc) in reduced.iter().zip(&pivots) {
                v[pc] = field.neg(row[f]);
            }
            v
        })
        .collect()
}
