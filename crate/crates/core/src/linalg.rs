//! Dense complex LU factorization with partial pivoting and complex Schur
//! factorization.

use num_complex::Complex64 as C64;

/// Pivots smaller than this multiple of the largest row sum are treated as
/// zero.
pub const SINGULAR_RELATIVE_PIVOT: f64 = 1e-12;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            data.extend_from_slice(row);
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|x| x.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPivot {
    pub step: usize,
    pub pivot: f64,
    pub scale: f64,
}

/// `P A = L U`, with unit-diagonal `L` stored below the diagonal.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn factor(mut a: DenseMatrix) -> Result<Self, SingularPivot> {
        let n = a.n;
        let scale = a.norm_inf();
        let threshold = SINGULAR_RELATIVE_PIVOT * scale;
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].norm();
            for i in k + 1..n {
                let v = a[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best < threshold || best == 0.0 {
                return Err(SingularPivot { step: k, pivot: best, scale });
            }
            if p != k {
                perm.swap(p, k);
                let (lo, hi) = a.data.split_at_mut(p * n);
                lo[k * n..(k + 1) * n].swap_with_slice(&mut hi[..n]);
            }

            let inv = a[(k, k)].inv();
            let (top, bottom) = a.data.split_at_mut((k + 1) * n);
            let pivot_row = &top[k * n + k + 1..(k + 1) * n];
            for row in bottom.chunks_exact_mut(n) {
                if row[k] == C64::new(0.0, 0.0) {
                    continue;
                }
                let factor = row[k] * inv;
                row[k] = factor;
                for (x, &u) in row[k + 1..].iter_mut().zip(pivot_row) {
                    *x -= factor * u;
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.n
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: C64 = row[..i].iter().zip(&x[..i]).map(|(l, y)| l * y).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: C64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(u, y)| u * y).sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }
}

/// `A = Q U Q^H` with `Q` unitary and `U` upper triangular.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub q: DenseMatrix,
    pub u: DenseMatrix,
}

/// Iteration budget per eigenvalue.
const SCHUR_ITERATIONS_PER_EIGENVALUE: usize = 30;
/// Every this many iterations without deflation an ad hoc shift is used.
const EXCEPTIONAL_SHIFT_PERIOD: usize = 10;

/// Complex Schur factorization: Householder reduction to Hessenberg form,
/// then single-shift QR sweeps with Wilkinson shifts. Returns `None` when an
/// eigenvalue fails to converge within the iteration budget.
pub fn schur(a: DenseMatrix) -> Option<SchurForm> {
    let n = a.n;
    let (mut h, mut q) = hessenberg(a);
    let scale = h.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let zero = C64::new(0.0, 0.0);
    if n < 2 || scale == 0.0 {
        return Some(SchurForm { q, u: h });
    }

    let mut hi = n - 1;
    let mut iterations = 0;
    let mut total = 0;
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let mut diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if diag == 0.0 {
                diag = scale;
            }
            if h[(lo, lo - 1)].norm() <= f64::EPSILON * diag {
                h[(lo, lo - 1)] = zero;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iterations = 0;
            continue;
        }

        iterations += 1;
        total += 1;
        if total > SCHUR_ITERATIONS_PER_EIGENVALUE * n {
            return None;
        }
        let shift = if iterations % EXCEPTIONAL_SHIFT_PERIOD == 0 {
            h[(hi, hi)] + 0.75 * h[(hi, hi - 1)].re.abs()
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        // implicit single-shift sweep over rows lo..=hi
        let mut x = h[(lo, lo)] - shift;
        let mut y = h[(lo + 1, lo)];
        for j in lo..hi {
            if j > lo {
                x = h[(j, j - 1)];
                y = h[(j + 1, j - 1)];
            }
            let (c, s) = givens(x, y);
            for col in j.saturating_sub(1).max(lo)..n {
                let (u, v) = (h[(j, col)], h[(j + 1, col)]);
                h[(j, col)] = u * c + s * v;
                h[(j + 1, col)] = v * c - s.conj() * u;
            }
            if j > lo {
                h[(j + 1, j - 1)] = zero;
            }
            for row in 0..=(j + 2).min(hi) {
                let (u, v) = (h[(row, j)], h[(row, j + 1)]);
                h[(row, j)] = u * c + v * s.conj();
                h[(row, j + 1)] = v * c - u * s;
            }
            for row in 0..n {
                let (u, v) = (q[(row, j)], q[(row, j + 1)]);
                q[(row, j)] = u * c + v * s.conj();
                q[(row, j + 1)] = v * c - u * s;
            }
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = zero;
        }
    }
    Some(SchurForm { q, u: h })
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = 0.5 * (a - d);
    let root = (half * half + b * c).sqrt();
    let mid = 0.5 * (a + d);
    let (p, m) = (mid + root, mid - root);
    if (p - d).norm() <= (m - d).norm() {
        p
    } else {
        m
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` with real `c` mapping `(x, y)` to
/// `(r, 0)`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let norm = ax.hypot(y.norm());
    if norm == 0.0 {
        (1.0, C64::new(0.0, 0.0))
    } else if ax == 0.0 {
        (0.0, y.conj() / norm)
    } else {
        (ax / norm, (x / ax) * y.conj() / norm)
    }
}

/// `A = Q H Q^H` with `H` upper Hessenberg, by Householder reflections.
fn hessenberg(mut a: DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let n = a.n;
    let mut q = DenseMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let phase = if v[0].norm() == 0.0 { C64::new(1.0, 0.0) } else { v[0] / v[0].norm() };
        v[0] += phase * norm;
        let vnorm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= vnorm;
        }
        // rows: A <- (I - 2 v v^H) A
        for col in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * a[(k + 1 + i, col)]).sum();
            for (i, vi) in v.iter().enumerate() {
                a[(k + 1 + i, col)] -= 2.0 * vi * dot;
            }
        }
        // columns: A <- A (I - 2 v v^H), and the same for Q
        for m in [&mut a, &mut q] {
            for row in 0..n {
                let dot: C64 = v.iter().enumerate().map(|(i, vi)| m[(row, k + 1 + i)] * vi).sum();
                for (i, vi) in v.iter().enumerate() {
                    m[(row, k + 1 + i)] -= 2.0 * dot * vi.conj();
                }
            }
        }
        for i in k + 2..n {
            a[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    (a, q)
}
