//! Dense exact rational matrices, just enough for ranks, kernels, and
//! membership tests in cohomology computations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type R = BigRational;

pub fn rz() -> R {
    R::zero()
}

pub fn rone() -> R {
    R::one()
}

pub fn rint(n: i64) -> R {
    R::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<R>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            a: vec![R::zero(); rows * cols],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.a[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.a[i * self.cols + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &R) {
        let idx = i * self.cols + j;
        self.a[idx] = self.a[idx].clone() + v.clone();
    }

    /// Row-reduces in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for j in 0..self.cols {
                    self.a.swap(row * self.cols + j, p * self.cols + j);
                }
            }
            let inv = self.get(row, col).clone().recip();
            for j in col..self.cols {
                let v = self.get(row, j).clone() * inv.clone();
                self.set(row, j, v);
            }
            for r in 0..self.rows {
                if r != row && !self.get(r, col).is_zero() {
                    let f = self.get(r, col).clone();
                    for j in col..self.cols {
                        let v = self.get(r, j).clone() - f.clone() * self.get(row, j).clone();
                        self.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// A basis of the kernel as column vectors.
    pub fn kernel(&self) -> Vec<Vec<R>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.sort();
        let mut out = Vec::new();
        for &fc in &free {
            let mut v = vec![R::zero(); self.cols];
            v[fc] = R::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.get(r, fc).clone();
            }
            out.push(v);
        }
        out
    }

    /// Solves A x = b; returns any solution if consistent.
    pub fn solve(&self, b: &[R]) -> Option<Vec<R>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Mat::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![R::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(r, self.cols).clone();
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel() {
        let mut m = Mat::zero(2, 3);
        m.set(0, 0, rint(1));
        m.set(0, 1, rint(2));
        m.set(0, 2, rint(3));
        m.set(1, 0, rint(2));
        m.set(1, 1, rint(4));
        m.set(1, 2, rint(6));
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in k {
            let s: R = (0..3).map(|j| m.get(0, j).clone() * v[j].clone()).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn solve_consistent() {
        let mut m = Mat::zero(2, 2);
        m.set(0, 0, rint(1));
        m.set(0, 1, rint(1));
        m.set(1, 0, rint(1));
        m.set(1, 1, rint(-1));
        let x = m.solve(&[rint(3), rint(1)]).unwrap();
        assert_eq!(x, vec![rint(2), rint(1)]);
        let mut s = Mat::zero(2, 1);
        s.set(0, 0, rint(1));
        s.set(1, 0, rint(1));
        assert!(s.solve(&[rint(1), rint(2)]).is_none());
    }
}
