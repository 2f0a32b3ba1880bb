//! Banded LU factorization with partial pivoting (the dgbtf2/dgbtrs scheme).

use crate::error::{Error, Result};

/// Square matrix with `kl` sub- and `ku` super-diagonals, stored by column
/// with `kl` extra rows for pivoting fill-in.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ld: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ld = 2 * kl + ku + 1;
        BandedMatrix {
            n,
            kl,
            ku,
            ld,
            data: vec![0.0; ld * n],
        }
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i + self.ku + self.kl >= j && i <= j + self.kl, "({i},{j}) outside band");
        j * self.ld + (self.kl + self.ku + i - j)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.slot(i, j)]
    }

    /// Set an entry inside the original band `j - ku <= i <= j + kl`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        debug_assert!(i + self.ku >= j, "({i},{j}) above the declared band");
        let s = self.slot(i, j);
        self.data[s] = x;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// In-place LU factorization.
    pub fn factor(mut self) -> Result<BandedLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut ipiv = vec![0usize; n];
        for j in 0..n {
            let last = (j + kl).min(n - 1);
            let (mut p, mut best) = (j, self.get(j, j).abs());
            for i in j + 1..=last {
                let a = self.get(i, j).abs();
                if a > best {
                    p = i;
                    best = a;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::LinearAlgebra(format!("zero pivot in column {j}")));
            }
            ipiv[j] = p;
            let c_last = (j + ku + kl).min(n - 1);
            if p != j {
                for c in j..=c_last {
                    let (a, b) = (self.slot(j, c), self.slot(p, c));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.get(j, j);
            for i in j + 1..=last {
                let s = self.slot(i, j);
                let l = self.data[s] / pivot;
                self.data[s] = l;
                if l != 0.0 {
                    for c in j + 1..=c_last {
                        let (t, src) = (self.slot(i, c), self.slot(j, c));
                        self.data[t] -= l * self.data[src];
                    }
                }
            }
        }
        Ok(BandedLu { m: self, ipiv })
    }
}

#[derive(Debug, Clone)]
pub struct BandedLu {
    m: BandedMatrix,
    ipiv: Vec<usize>,
}

impl BandedLu {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, kl, ku) = (self.m.n, self.m.kl, self.m.ku);
        for j in 0..n {
            b.swap(j, self.ipiv[j]);
            let bj = b[j];
            if bj != 0.0 {
                for i in j + 1..=(j + kl).min(n - 1) {
                    b[i] -= self.m.get(i, j) * bj;
                }
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.m.get(j, j);
            let bj = b[j];
            for i in j.saturating_sub(ku + kl)..j {
                b[i] -= self.m.get(i, j) * bj;
            }
        }
    }
}
