//! Small dense least squares by Householder QR.

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }
}

#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub solution: Vec<f64>,
    /// Diagonal of the triangular factor.
    pub r_diagonal: Vec<f64>,
}

impl LeastSquares {
    /// `(max |R_ii| / min |R_ii|)²`, a cheap estimate of the Gram condition number.
    pub fn gram_condition_estimate(&self) -> f64 {
        let max = self.r_diagonal.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        let min = self.r_diagonal.iter().fold(f64::INFINITY, |m, r| m.min(r.abs()));
        if min == 0.0 {
            f64::INFINITY
        } else {
            (max / min).powi(2)
        }
    }
}

/// Minimizes `‖A x - b‖₂` for `rows ≥ cols`. Columns with a zero pivot give a
/// zero coefficient and an infinite condition estimate.
pub fn householder_least_squares(a: &DenseMatrix, b: &[f64]) -> LeastSquares {
    assert!(a.rows >= a.cols && b.len() == a.rows);
    let (m, n) = (a.rows, a.cols);
    let mut qr = a.clone();
    let mut rhs = b.to_vec();
    let mut r_diagonal = vec![0.0; n];
    for j in 0..n {
        let col = &qr.col(j)[j..];
        let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if col[0] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = col.to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        r_diagonal[j] = alpha;
        if vnorm2 == 0.0 {
            continue;
        }
        let reflect = |x: &mut [f64]| {
            let s = 2.0 * v.iter().zip(x.iter()).map(|(a, b)| a * b).sum::<f64>() / vnorm2;
            x.iter_mut().zip(&v).for_each(|(xi, vi)| *xi -= s * vi);
        };
        for k in j..n {
            let start = k * m + j;
            reflect(&mut qr.data[start..start + (m - j)]);
        }
        reflect(&mut rhs[j..]);
    }
    let mut x = vec![0.0; n];
    for j in (0..n).rev() {
        if r_diagonal[j] == 0.0 {
            continue;
        }
        let s: f64 = (j + 1..n).map(|k| qr.get(j, k) * x[k]).sum();
        x[j] = (rhs[j] - s) / r_diagonal[j];
    }
    LeastSquares { solution: x, r_diagonal }
}
