//! Small dense linear algebra used by the solvers. Row-major `Vec<Vec<f64>>`.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub(crate) fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Orthogonalizes `v` against the orthonormal `basis` (two passes of modified Gram-Schmidt).
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            axpy(v, -c, b);
        }
    }
}

/// Walks `rows` in order and keeps those not in the span of the earlier kept rows.
///
/// A row is dropped when its component orthogonal to the kept rows has norm at most
/// `tol * max(1, |row|)`. Returns the kept indices and an orthonormal basis of their span.
pub(crate) fn independent_rows(rows: &[Vec<f64>], tol: f64) -> (Vec<usize>, Vec<Vec<f64>>) {
    let mut kept = Vec::new();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let scale = norm(row).max(1.0);
        let mut v = row.clone();
        orthogonalize(&mut v, &basis);
        let r = norm(&v);
        if r > tol * scale {
            v.iter_mut().for_each(|x| *x /= r);
            basis.push(v);
            kept.push(i);
        }
    }
    (kept, basis)
}

/// Orthonormal basis of `{v : row . v = 0 for all rows}` in `R^n`.
pub(crate) fn null_space(rows: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let (_, mut basis) = independent_rows(rows, 1e-10);
    let range_dim = basis.len();
    let mut out = Vec::new();
    // Greedy completion with unit vectors: pick the one with the largest residual each time.
    while range_dim + out.len() < n {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            orthogonalize(&mut e, &basis);
            let r = norm(&e);
            if best.as_ref().is_none_or(|(br, _)| r > *br) {
                best = Some((r, e));
            }
        }
        let (r, mut v) = best.expect("n > 0");
        if r < 1e-8 {
            break;
        }
        v.iter_mut().for_each(|x| *x /= r);
        basis.push(v.clone());
        out.push(v);
    }
    out
}

/// Solves the square system `a x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when a pivot falls below `1e-300` relative to the matrix scale.
pub(crate) fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |s, x| s.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() <= 1e-14 * scale {
            return None;
        }
        m.swap(col, piv);
        for i in col + 1..n {
            let f = m[i][col] / m[col][col];
            if f != 0.0 {
                let (top, bottom) = m.split_at_mut(i);
                for (x, y) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                    *x -= f * y;
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Least-squares solution of an `m x p` system via Householder QR with column pivoting.
#[derive(Debug, Clone)]
pub(crate) struct LeastSquares {
    pub x: Vec<f64>,
    pub rank: usize,
}

/// Minimizes `|a x - b|_2`. Columns judged dependent (`|R_jj| <= tol * |R_00|`)
/// get coefficient zero.
pub(crate) fn least_squares(a: &[Vec<f64>], b: &[f64], tol: f64) -> LeastSquares {
    let m = a.len();
    let p = a.first().map_or(0, |r| r.len());
    // Column-major copy.
    let mut cols: Vec<Vec<f64>> = (0..p).map(|j| a.iter().map(|r| r[j]).collect()).collect();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..p).collect();
    let steps = m.min(p);
    let mut rank = 0;
    let mut r00 = 0.0;
    for k in 0..steps {
        // Pivot: remaining column with the largest trailing norm.
        let (best, best_norm) = (k..p)
            .map(|j| (j, norm(&cols[j][k..])))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("nonempty range");
        if k == 0 {
            r00 = best_norm;
        }
        if best_norm <= tol * r00.max(f64::MIN_POSITIVE) {
            break;
        }
        cols.swap(k, best);
        perm.swap(k, best);
        // Householder reflector zeroing cols[k][k+1..].
        let alpha = if cols[k][k] > 0.0 {
            -best_norm
        } else {
            best_norm
        };
        let mut v = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2 = dot(&v, &v);
        if vnorm2 > 0.0 {
            for col in cols.iter_mut().skip(k) {
                let c = 2.0 * dot(&v, &col[k..]) / vnorm2;
                for (x, vi) in col[k..].iter_mut().zip(&v) {
                    *x -= c * vi;
                }
            }
            let c = 2.0 * dot(&v, &rhs[k..]) / vnorm2;
            for (x, vi) in rhs[k..].iter_mut().zip(&v) {
                *x -= c * vi;
            }
        }
        rank += 1;
    }
    // Back substitution on the leading rank x rank block.
    let mut z = vec![0.0; rank];
    for i in (0..rank).rev() {
        let s: f64 = (i + 1..rank).map(|j| cols[j][i] * z[j]).sum();
        z[i] = (rhs[i] - s) / cols[i][i];
    }
    let mut x = vec![0.0; p];
    for (i, zi) in z.into_iter().enumerate() {
        x[perm[i]] = zi;
    }
    LeastSquares { x, rank }
}
