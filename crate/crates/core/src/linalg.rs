//! Exact Gauss-Jordan elimination on sparse rational matrices.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::scalar::{Rational, Scalar};

pub type SparseRow = BTreeMap<usize, Rational>;

/// Values that can be combined linearly with rational weights.
pub trait Module: Clone {
    fn vanishes(&self) -> bool;
    fn add_scaled(&mut self, other: &Self, factor: &Rational);
    fn zeroed(&self) -> Self;
}

impl Module for Rational {
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_scaled(&mut self, other: &Self, factor: &Rational) {
        *self += other * factor;
    }
    fn zeroed(&self) -> Self {
        Rational::zero()
    }
}

impl Module for Scalar {
    fn vanishes(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add_scaled(&mut self, other: &Self, factor: &Rational) {
        *self = &*self + &other.scale(factor);
    }
    fn zeroed(&self) -> Self {
        Scalar::zero(self.chart())
    }
}

/// Reduced row echelon form `T M = R` with the transform `T` retained, so that
/// right-hand sides can be reduced after the fact.
#[derive(Clone, Debug)]
pub struct Reduction {
    nrows: usize,
    ncols: usize,
    /// Pivot column of reduced row `k`, for `k < rank`.
    pivots: Vec<usize>,
    rows: Vec<SparseRow>,
    transform: Vec<SparseRow>,
}

fn axpy(target: &mut SparseRow, source: &SparseRow, factor: &Rational) {
    for (&j, v) in source {
        let entry = target.entry(j).or_insert_with(Rational::zero);
        *entry += v * factor;
        if entry.is_zero() {
            target.remove(&j);
        }
    }
}

impl Reduction {
    /// Reduce a matrix given by its columns, each a list of `(row, value)`.
    pub fn new(nrows: usize, columns: &[Vec<(usize, Rational)>]) -> Reduction {
        let ncols = columns.len();
        let mut rows: Vec<SparseRow> = vec![SparseRow::new(); nrows];
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col {
                if !v.is_zero() {
                    rows[*i].insert(j, v.clone());
                }
            }
        }
        let mut transform: Vec<SparseRow> =
            (0..nrows).map(|i| SparseRow::from([(i, Rational::one())])).collect();
        let mut pivots = Vec::new();
        for col in 0..ncols {
            let rank = pivots.len();
            let Some(found) = (rank..nrows).find(|&i| rows[i].contains_key(&col)) else {
                continue;
            };
            rows.swap(rank, found);
            transform.swap(rank, found);
            let inv = Rational::one() / &rows[rank][&col];
            for v in rows[rank].values_mut() {
                *v *= &inv;
            }
            for v in transform[rank].values_mut() {
                *v *= &inv;
            }
            let (pivot_row, pivot_t) = (rows[rank].clone(), transform[rank].clone());
            for i in 0..nrows {
                if i == rank {
                    continue;
                }
                if let Some(c) = rows[i].get(&col).cloned() {
                    let factor = -c;
                    axpy(&mut rows[i], &pivot_row, &factor);
                    axpy(&mut transform[i], &pivot_t, &factor);
                }
            }
            pivots.push(col);
        }
        Reduction { nrows, ncols, pivots, rows, transform }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    /// Basis of the null space, one vector per free column, as sparse columns.
    pub fn nullspace(&self) -> Vec<SparseRow> {
        let mut is_pivot = vec![None; self.ncols];
        for (k, &c) in self.pivots.iter().enumerate() {
            is_pivot[c] = Some(k);
        }
        (0..self.ncols)
            .filter(|&c| is_pivot[c].is_none())
            .map(|free| {
                let mut v = SparseRow::from([(free, Rational::one())]);
                for (k, &pc) in self.pivots.iter().enumerate() {
                    if let Some(e) = self.rows[k].get(&free) {
                        v.insert(pc, -e.clone());
                    }
                }
                v
            })
            .collect()
    }

    /// Particular solution of `M x = b` supported on pivot columns, or `None`
    /// when the system is inconsistent. `b` is indexed by row.
    pub fn solve<T: Module>(&self, b: &[T], zero: &T) -> Option<Vec<T>> {
        assert_eq!(b.len(), self.nrows, "right-hand side has the wrong length");
        let reduced = |k: usize| {
            let mut acc = zero.zeroed();
            for (&i, f) in &self.transform[k] {
                if !b[i].vanishes() {
                    acc.add_scaled(&b[i], f);
                }
            }
            acc
        };
        if (self.rank()..self.nrows).any(|k| !reduced(k).vanishes()) {
            return None;
        }
        let mut x = vec![zero.zeroed(); self.ncols];
        for (k, &c) in self.pivots.iter().enumerate() {
            x[c] = reduced(k);
        }
        Some(x)
    }
}

/// Determinant of a square matrix by exact elimination.
pub fn determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !a[i][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= &a[col][col];
        for i in col + 1..n {
            let factor = &a[i][col] / &a[col][col];
            for j in col..n {
                let v = &a[col][j] * &factor;
                a[i][j] -= v;
            }
        }
    }
    det
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(p, col);
        let inv = Rational::one() / &a[col][col];
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let factor = a[i][col].clone();
                for j in 0..2 * n {
                    let v = &a[col][j] * &factor;
                    a[i][j] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}
