//! Small dense linear-algebra helpers backing the factorization module:
//! row-major matrices, Householder QR, and a one-sided Jacobi SVD for the
//! narrow projected problems produced by the randomized range finder.

use crate::weighting::SparseDocTermMatrix;

/// Row-major dense matrix. Internal to the crate; sized for the "small side"
/// of randomized factorizations, not for general numerics.
#[derive(Debug, Clone)]
pub(crate) struct DenseMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DenseMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMat { rows, cols, data }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// self (m x n) * other (n x p).
    pub fn matmul(&self, other: &DenseMat) -> DenseMat {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> DenseMat {
        let mut out = DenseMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = self.at(i, j);
            }
        }
        out
    }

    /// Thin Q of the Householder QR of self (m x n, m >= n not required;
    /// returns m x min(m, n) with orthonormal columns spanning the column
    /// space).
    pub fn thin_q(&self) -> DenseMat {
        let m = self.rows;
        let n = self.cols;
        let r = m.min(n);
        let mut a = self.clone();
        let mut taus = Vec::with_capacity(r);
        let mut vs: Vec<Vec<f64>> = Vec::with_capacity(r);

        for k in 0..r {
            // Householder vector for column k below the diagonal.
            let mut norm2 = 0.0;
            for i in k..m {
                let v = a.at(i, k);
                norm2 += v * v;
            }
            let norm = norm2.sqrt();
            let mut v = vec![0.0; m - k];
            if norm == 0.0 {
                taus.push(0.0);
                vs.push(v);
                continue;
            }
            let a0 = a.at(k, k);
            let alpha = if a0 >= 0.0 { -norm } else { norm };
            v[0] = a0 - alpha;
            for i in (k + 1)..m {
                v[i - k] = a.at(i, k);
            }
            let vnorm2: f64 = v.iter().map(|x| x * x).sum();
            let tau = if vnorm2 == 0.0 { 0.0 } else { 2.0 / vnorm2 };
            // Apply H = I - tau v v^T to the trailing block.
            for j in k..n {
                let mut dot = 0.0;
                for i in k..m {
                    dot += v[i - k] * a.at(i, j);
                }
                let s = tau * dot;
                for i in k..m {
                    *a.at_mut(i, j) -= s * v[i - k];
                }
            }
            taus.push(tau);
            vs.push(v);
        }

        // Accumulate Q by applying the reflectors to the first r columns of I.
        let mut q = DenseMat::zeros(m, r);
        for j in 0..r {
            *q.at_mut(j, j) = 1.0;
        }
        for k in (0..r).rev() {
            let tau = taus[k];
            if tau == 0.0 {
                continue;
            }
            let v = &vs[k];
            for j in 0..r {
                let mut dot = 0.0;
                for i in k..m {
                    dot += v[i - k] * q.at(i, j);
                }
                let s = tau * dot;
                for i in k..m {
                    *q.at_mut(i, j) -= s * v[i - k];
                }
            }
        }
        q
    }
}

/// Sparse (m x n) times dense (n x p).
pub(crate) fn sparse_dense_mul(a: &SparseDocTermMatrix, b: &DenseMat) -> DenseMat {
    assert_eq!(a.n_words(), b.rows);
    let mut out = DenseMat::zeros(a.n_docs(), b.cols);
    for i in 0..a.n_docs() {
        let dst_range = i * b.cols..(i + 1) * b.cols;
        for (j, w) in a.row(i) {
            let src = b.row(j as usize);
            let dst = &mut out.data[dst_range.clone()];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += w * s;
            }
        }
    }
    out
}

/// Sparse transposed: a^T (n x m) times dense (m x p).
pub(crate) fn sparse_t_dense_mul(a: &SparseDocTermMatrix, b: &DenseMat) -> DenseMat {
    assert_eq!(a.n_docs(), b.rows);
    let mut out = DenseMat::zeros(a.n_words(), b.cols);
    for i in 0..a.n_docs() {
        let src = b.row(i).to_vec();
        for (j, w) in a.row(i) {
            let dst = &mut out.data[(j as usize) * b.cols..(j as usize + 1) * b.cols];
            for (d, s) in dst.iter_mut().zip(&src) {
                *d += w * s;
            }
        }
    }
    out
}

/// SVD of a wide matrix `g` (l x n, l <= n) by one-sided Jacobi on g^T.
///
/// Returns (u, sigma, v): g = u * diag(sigma) * v^T with u (l x l),
/// v (n x l), sigma descending. Jacobi keeps small singular values accurate,
/// which the spectrum checks in the test suite rely on.
pub(crate) fn jacobi_svd_wide(g: &DenseMat) -> (DenseMat, Vec<f64>, DenseMat) {
    let l = g.rows;
    let n = g.cols;
    assert!(l <= n, "jacobi_svd_wide expects a wide matrix");

    // m = g^T (n x l): orthogonalize its columns by plane rotations.
    let mut m = g.transpose();
    // j accumulates the rotations; g = j * sigma * (normalized m)^T.
    let mut j = DenseMat::zeros(l, l);
    for i in 0..l {
        *j.at_mut(i, i) = 1.0;
    }

    let eps = 1e-14;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..l {
            for q in (p + 1)..l {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for i in 0..n {
                    let xp = m.at(i, p);
                    let xq = m.at(i, q);
                    app += xp * xp;
                    aqq += xq * xq;
                    apq += xp * xq;
                }
                if apq.abs() <= eps * (app * aqq).sqrt() || apq == 0.0 {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let xp = m.at(i, p);
                    let xq = m.at(i, q);
                    *m.at_mut(i, p) = c * xp - s * xq;
                    *m.at_mut(i, q) = s * xp + c * xq;
                }
                for i in 0..l {
                    let jp = j.at(i, p);
                    let jq = j.at(i, q);
                    *j.at_mut(i, p) = c * jp - s * jq;
                    *j.at_mut(i, q) = s * jp + c * jq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values.
    let mut order: Vec<usize> = (0..l).collect();
    let sigmas: Vec<f64> = (0..l)
        .map(|p| (0..n).map(|i| m.at(i, p).powi(2)).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&a, &b| sigmas[b].partial_cmp(&sigmas[a]).unwrap());

    let mut u = DenseMat::zeros(l, l);
    let mut v = DenseMat::zeros(n, l);
    let mut sigma = Vec::with_capacity(l);
    for (dst, &src) in order.iter().enumerate() {
        let s = sigmas[src];
        sigma.push(s);
        for i in 0..l {
            *u.at_mut(i, dst) = j.at(i, src);
        }
        if s > 0.0 {
            for i in 0..n {
                *v.at_mut(i, dst) = m.at(i, src) / s;
            }
        }
    }
    (u, sigma, v)
}
