//! Banded LU with partial pivoting for matrices whose last column is dense.
//!
//! The traveling-wave Jacobian is block tridiagonal except for the column of
//! the unknown wave speed, which couples to every equation. Putting that
//! column last keeps all fill-in either inside the widened band or inside the
//! dense column.

#[derive(Debug, Clone)]
pub(crate) struct BandedWithDenseColumn {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    band: Vec<f64>,
    last: Vec<f64>,
    pivots: Vec<usize>,
    factored: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Singular(pub usize);

impl BandedWithDenseColumn {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        assert!(n >= 2);
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            band: vec![0.0; n * width],
            last: vec![0.0; n],
            pivots: vec![0; n],
            factored: false,
        }
    }

    pub fn clear(&mut self) {
        self.band.iter_mut().for_each(|x| *x = 0.0);
        self.last.iter_mut().for_each(|x| *x = 0.0);
        self.factored = false;
    }

    #[inline]
    fn idx(&self, r: usize, c: usize) -> usize {
        debug_assert!(c + self.kl >= r && c + self.kl - r < self.width, "({r}, {c}) outside band");
        r * self.width + c + self.kl - r
    }

    /// Adds `value` to entry `(r, c)` of the unfactored matrix.
    pub fn add(&mut self, r: usize, c: usize, value: f64) {
        debug_assert!(!self.factored);
        if c == self.n - 1 {
            self.last[r] += value;
        } else {
            assert!(c + self.kl >= r && c <= r + self.ku, "({r}, {c}) outside band");
            let i = self.idx(r, c);
            self.band[i] += value;
        }
    }

    /// Product of the unfactored matrix with `x`.
    #[cfg(test)]
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert!(!self.factored);
        let n = self.n;
        for r in 0..n {
            let lo = r.saturating_sub(self.kl);
            let hi = (r + self.ku).min(n - 2);
            let mut acc = self.last[r] * x[n - 1];
            for c in lo..=hi {
                acc += self.band[self.idx(r, c)] * x[c];
            }
            out[r] = acc;
        }
    }

    pub fn factor(&mut self) -> Result<(), Singular> {
        let n = self.n;
        let reach = self.kl + self.ku;
        for k in 0..n - 1 {
            let rmax = (k + self.kl).min(n - 1);
            let mut p = k;
            let mut best = self.band[self.idx(k, k)].abs();
            for r in k + 1..=rmax {
                let v = self.band[self.idx(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 {
                return Err(Singular(k));
            }
            self.pivots[k] = p;
            let cmax = (k + reach).min(n - 2);
            if p != k {
                for c in k..=cmax {
                    let (a, b) = (self.idx(k, c), self.idx(p, c));
                    self.band.swap(a, b);
                }
                self.last.swap(k, p);
            }
            let pivot = self.band[self.idx(k, k)];
            for r in k + 1..=rmax {
                let irk = self.idx(r, k);
                let m = self.band[irk] / pivot;
                self.band[irk] = m;
                if m == 0.0 {
                    continue;
                }
                for c in k + 1..=cmax {
                    let (ir, ik) = (self.idx(r, c), self.idx(k, c));
                    self.band[ir] -= m * self.band[ik];
                }
                self.last[r] -= m * self.last[k];
            }
        }
        if self.last[n - 1] == 0.0 {
            return Err(Singular(n - 1));
        }
        self.pivots[n - 1] = n - 1;
        self.factored = true;
        Ok(())
    }

    /// Solves in place; `factor` must have succeeded.
    pub fn solve(&self, b: &mut [f64]) {
        assert!(self.factored);
        let n = self.n;
        let reach = self.kl + self.ku;
        for k in 0..n - 1 {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                for r in k + 1..=(k + self.kl).min(n - 1) {
                    b[r] -= self.band[self.idx(r, k)] * bk;
                }
            }
        }
        b[n - 1] /= self.last[n - 1];
        let xl = b[n - 1];
        for k in (0..n - 1).rev() {
            let mut s = b[k] - self.last[k] * xl;
            for c in k + 1..=(k + reach).min(n - 2) {
                s -= self.band[self.idx(k, c)] * b[c];
            }
            b[k] = s / self.band[self.idx(k, k)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
            a.swap(k, p);
            b.swap(k, p);
            for r in k + 1..n {
                let m = a[r][k] / a[k][k];
                for c in k..n {
                    a[r][c] -= m * a[k][c];
                }
                b[r] -= m * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let s: f64 = (k + 1..n).map(|c| a[k][c] * x[c]).sum();
            x[k] = (b[k] - s) / a[k][k];
        }
        x
    }

    #[test]
    fn matches_dense_elimination() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for &(n, kl, ku) in &[(2, 1, 1), (7, 3, 2), (30, 3, 2), (41, 1, 4), (25, 2, 0)] {
            let mut m = BandedWithDenseColumn::new(n, kl, ku);
            let mut dense = vec![vec![0.0; n]; n];
            for r in 0..n {
                for c in 0..n {
                    let in_band = c + kl >= r && c <= r + ku;
                    if in_band || c == n - 1 {
                        // weak diagonal so that pivoting actually happens
                        let v = rng.gen_range(-1.0..1.0) + if r == c { 0.05 } else { 0.0 };
                        m.add(r, c, v);
                        dense[r][c] = v;
                    }
                }
            }
            let x_true: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let mut b = vec![0.0; n];
            m.matvec(&x_true, &mut b);
            let reference = dense_solve(dense, b.clone());
            m.factor().unwrap();
            m.solve(&mut b);
            for i in 0..n {
                assert!((b[i] - reference[i]).abs() < 1e-8 * (1.0 + reference[i].abs()), "n={n} i={i}");
                assert!((b[i] - x_true[i]).abs() < 1e-6 * (1.0 + x_true[i].abs()));
            }
        }
    }

    #[test]
    fn detects_singular_matrix() {
        let mut m = BandedWithDenseColumn::new(4, 1, 1);
        m.add(0, 0, 1.0);
        m.add(1, 1, 1.0);
        // row 2 and column 2 empty
        m.add(3, 3, 1.0);
        assert!(m.factor().is_err());
    }
}
