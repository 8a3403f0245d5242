//! Small symmetric banded matrices and their Cholesky factorization.
//!
//! Hessians of the dual problem are tridiagonal for hat functions, block
//! diagonal (2x2) for partial moments and dense for full moments. All three
//! are stored as symmetric band matrices with half-bandwidth `p`.

#[derive(Debug, Clone, PartialEq)]
pub struct SymBand {
    n: usize,
    p: usize,
    /// Row-major lower band: entry `(i, j)` with `i - p <= j <= i` lives at
    /// `i * (p + 1) + (i - j)`.
    data: Vec<f64>,
}

impl SymBand {
    pub fn zeros(n: usize, p: usize) -> Self {
        let p = p.min(n.saturating_sub(1));
        Self {
            n,
            p,
            data: vec![0.0; n * (p + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.p
    }

    pub fn fill_zero(&mut self) {
        self.data.iter_mut().for_each(|v| *v = 0.0);
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.p);
        i * (self.p + 1) + (i - j)
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.p {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// Adds `v` to the symmetric pair `(i, j)`, `(j, i)`; requires `i >= j`.
    #[inline]
    pub fn add_lower(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let lo = i.saturating_sub(self.p);
            let hi = (i + self.p).min(self.n - 1);
            *yi = (lo..=hi).map(|j| self.get(i, j) * x[j]).sum();
        }
    }

    /// In-place Cholesky `A = L L^T`. Fails when a pivot drops to
    /// `pivot_floor` times the original diagonal entry or below.
    pub fn cholesky(&self, pivot_floor: f64) -> Option<BandCholesky> {
        let mut l = self.clone();
        let n = self.n;
        let p = self.p;
        for j in 0..n {
            let diag_orig = self.data[self.idx(j, j)];
            let mut d = diag_orig;
            let k0 = j.saturating_sub(p);
            for k in k0..j {
                let v = l.data[l.idx(j, k)];
                d -= v * v;
            }
            if !(d > pivot_floor * diag_orig.abs()) || !d.is_finite() || d <= 0.0 {
                return None;
            }
            let djj = d.sqrt();
            let kj = l.idx(j, j);
            l.data[kj] = djj;
            for i in (j + 1)..(j + p + 1).min(n) {
                let mut s = l.data[l.idx(i, j)];
                let k0 = i.saturating_sub(p);
                for k in k0..j {
                    s -= l.data[l.idx(i, k)] * l.data[l.idx(j, k)];
                }
                let kij = l.idx(i, j);
                l.data[kij] = s / djj;
            }
        }
        Some(BandCholesky { l })
    }
}

#[derive(Debug, Clone)]
pub struct BandCholesky {
    l: SymBand,
}

impl BandCholesky {
    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let l = &self.l;
        let (n, p) = (l.n, l.p);
        for i in 0..n {
            let mut s = b[i];
            for k in i.saturating_sub(p)..i {
                s -= l.data[l.idx(i, k)] * b[k];
            }
            b[i] = s / l.data[l.idx(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in (i + 1)..(i + p + 1).min(n) {
                s -= l.data[l.idx(k, i)] * b[k];
            }
            b[i] = s / l.data[l.idx(i, i)];
        }
    }

    /// Lower factor as a dense matrix.
    pub fn factor_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.l.n;
        nalgebra::DMatrix::from_fn(n, n, |i, j| {
            if i >= j && i - j <= self.l.p {
                self.l.data[self.l.idx(i, j)]
            } else {
                0.0
            }
        })
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}
