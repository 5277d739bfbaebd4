//! Integer lattice normal forms: Hermite and Smith, with transforms.
//!
//! Everything downstream represents finite abelian groups as quotients of
//! integer lattices, so the whole computational stack bottoms out here.
//! Matrices are dense row-major `Vec<Vec<i128>>`; the dimensions in play
//! stay tiny (tens of rows), so naive pivoting is fine.

pub type Mat = Vec<Vec<i128>>;

pub fn zeros(rows: usize, cols: usize) -> Mat {
    vec![vec![0; cols]; rows]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

/// rows(a) x cols(b) product; panics on dimension mismatch.
pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let cols = if b.is_empty() { 0 } else { b[0].len() };
    let mut out = zeros(a.len(), cols);
    for (i, arow) in a.iter().enumerate() {
        assert_eq!(arow.len(), b.len(), "mat_mul dimension mismatch");
        for (k, &av) in arow.iter().enumerate() {
            if av == 0 {
                continue;
            }
            for (j, &bv) in b[k].iter().enumerate() {
                out[i][j] += av * bv;
            }
        }
    }
    out
}

pub fn row_mat_mul(x: &[i128], a: &Mat) -> Vec<i128> {
    let cols = if a.is_empty() { 0 } else { a[0].len() };
    let mut out = vec![0; cols];
    for (k, &xv) in x.iter().enumerate() {
        if xv == 0 {
            continue;
        }
        for (j, &av) in a[k].iter().enumerate() {
            out[j] += xv * av;
        }
    }
    out
}

/// Row-style Hermite normal form. Returns `(h, u)` with `u * a = h`,
/// `u` unimodular, `h` in row echelon form with positive pivots and
/// entries above each pivot reduced.
pub fn hnf_with_transform(a: &Mat, cols: usize) -> (Mat, Mat) {
    let rows = a.len();
    let mut h = a.clone();
    for row in &h {
        assert_eq!(row.len(), cols);
    }
    let mut u = identity(rows);
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row >= rows {
            break;
        }
        // Euclidean elimination below the pivot.
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..rows {
                if h[r][col] != 0 {
                    best = match best {
                        None => Some(r),
                        Some(b) if h[r][col].abs() < h[b][col].abs() => Some(r),
                        keep => keep,
                    };
                }
            }
            let Some(b) = best else { break };
            h.swap(pivot_row, b);
            u.swap(pivot_row, b);
            let p = h[pivot_row][col];
            let mut done = true;
            for r in pivot_row + 1..rows {
                if h[r][col] != 0 {
                    let q = h[r][col].div_euclid(p);
                    row_sub(&mut h, r, pivot_row, q);
                    row_sub(&mut u, r, pivot_row, q);
                    if h[r][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h[pivot_row][col] == 0 {
            continue;
        }
        if h[pivot_row][col] < 0 {
            row_neg(&mut h, pivot_row);
            row_neg(&mut u, pivot_row);
        }
        let p = h[pivot_row][col];
        for r in 0..pivot_row {
            let q = h[r][col].div_euclid(p);
            if q != 0 {
                row_sub(&mut h, r, pivot_row, q);
                row_sub(&mut u, r, pivot_row, q);
            }
        }
        pivot_row += 1;
    }
    (h, u)
}

fn row_sub(m: &mut Mat, r: usize, from: usize, q: i128) {
    if q == 0 {
        return;
    }
    let src = m[from].clone();
    for (t, s) in m[r].iter_mut().zip(src) {
        *t -= q * s;
    }
}

fn row_neg(m: &mut Mat, r: usize) {
    for v in m[r].iter_mut() {
        *v = -*v;
    }
}

/// Basis (as rows) of `{x : x * a = 0}`.
pub fn left_kernel(a: &Mat, cols: usize) -> Mat {
    let (h, u) = hnf_with_transform(a, cols);
    h.iter()
        .zip(u)
        .filter(|(hrow, _)| hrow.iter().all(|&v| v == 0))
        .map(|(_, urow)| urow)
        .collect()
}

/// One solution `x` of `x * a = b` over the integers, if any.
pub fn solve_left(a: &Mat, cols: usize, b: &[i128]) -> Option<Vec<i128>> {
    assert_eq!(b.len(), cols);
    let (h, u) = hnf_with_transform(a, cols);
    let mut y = vec![0i128; h.len()];
    let mut residual = b.to_vec();
    for (r, hrow) in h.iter().enumerate() {
        let Some(col) = hrow.iter().position(|&v| v != 0) else { break };
        let p = hrow[col];
        if residual[col] % p != 0 {
            return None;
        }
        let q = residual[col] / p;
        y[r] = q;
        if q != 0 {
            for (res, hv) in residual.iter_mut().zip(hrow) {
                *res -= q * hv;
            }
        }
    }
    if residual.iter().any(|&v| v != 0) {
        return None;
    }
    Some(row_mat_mul(&y, &u))
}

/// Smith normal form restricted to what the quotient construction needs:
/// for the row lattice of `a` inside `Z^n`, returns `(d, v, w)` such that
/// with coordinates `y = x * v` the lattice becomes `⊕ d_i * Z` and
/// `w = v^{-1}`. The `d_i` form a divisibility chain `d_1 | d_2 | ...`
/// padded with zeros for coordinates the lattice does not constrain.
pub fn snf_quotient(a: &Mat, n: usize) -> (Vec<i128>, Mat, Mat) {
    let mut m = a.clone();
    for row in &m {
        assert_eq!(row.len(), n);
    }
    let mut v = identity(n);
    let mut w = identity(n);
    let rows = m.len();
    let rank = rows.min(n);

    let mut t = 0;
    while t < rank {
        // Find the nonzero entry of least magnitude in the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..n {
                if m[r][c] != 0 {
                    best = match best {
                        None => Some((r, c)),
                        Some((br, bc)) if m[r][c].abs() < m[br][bc].abs() => Some((r, c)),
                        keep => keep,
                    };
                }
            }
        }
        let Some((br, bc)) = best else { break };
        m.swap(t, br);
        col_swap(&mut m, &mut v, &mut w, t, bc);

        let mut clean = true;
        let p = m[t][t];
        for r in t + 1..rows {
            if m[r][t] != 0 {
                let q = m[r][t].div_euclid(p);
                row_sub(&mut m, r, t, q);
                if m[r][t] != 0 {
                    clean = false;
                }
            }
        }
        for c in t + 1..n {
            if m[t][c] != 0 {
                let q = m[t][c].div_euclid(p);
                col_sub(&mut m, &mut v, &mut w, c, t, q);
                if m[t][c] != 0 {
                    clean = false;
                }
            }
        }
        if !clean {
            continue;
        }
        // Divisibility fix: entries elsewhere must be divisible by the pivot.
        let mut fixed = true;
        'outer: for r in t + 1..rows {
            for c in t + 1..n {
                if m[r][c] % p != 0 {
                    // Fold row r into the pivot column and retry the block.
                    col_add(&mut m, &mut v, &mut w, t, c, 1);
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if fixed {
            if m[t][t] < 0 {
                col_neg(&mut m, &mut v, &mut w, t);
            }
            t += 1;
        }
    }

    let mut d = vec![0i128; n];
    for (i, di) in d.iter_mut().enumerate().take(t) {
        *di = m[i][i];
    }
    (d, v, w)
}

fn col_swap(m: &mut Mat, v: &mut Mat, w: &mut Mat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for row in m.iter_mut() {
        row.swap(a, b);
    }
    for row in v.iter_mut() {
        row.swap(a, b);
    }
    w.swap(a, b);
}

/// col_to -= q * col_from, with transform bookkeeping.
fn col_sub(m: &mut Mat, v: &mut Mat, w: &mut Mat, to: usize, from: usize, q: i128) {
    col_add(m, v, w, to, from, -q)
}

/// col_to += q * col_from, with transform bookkeeping.
fn col_add(m: &mut Mat, v: &mut Mat, w: &mut Mat, to: usize, from: usize, q: i128) {
    if q == 0 {
        return;
    }
    for row in m.iter_mut() {
        let s = row[from];
        row[to] += q * s;
    }
    for row in v.iter_mut() {
        let s = row[from];
        row[to] += q * s;
    }
    // w = v^{-1}: the inverse column op acts as a row op on w.
    let src = w[to].clone();
    for (t, s) in w[from].iter_mut().zip(src) {
        *t -= q * s;
    }
}

fn col_neg(m: &mut Mat, v: &mut Mat, w: &mut Mat, c: usize) {
    for row in m.iter_mut() {
        row[c] = -row[c];
    }
    for row in v.iter_mut() {
        row[c] = -row[c];
    }
    for x in w[c].iter_mut() {
        *x = -*x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_transform_is_consistent() {
        let a = vec![vec![4, 2, 0], vec![2, 8, 2], vec![0, 0, 6]];
        let (h, u) = hnf_with_transform(&a, 3);
        assert_eq!(mat_mul(&u, &a), h);
        // echelon shape
        let pivots: Vec<_> = h
            .iter()
            .filter_map(|row| row.iter().position(|&x| x != 0))
            .collect();
        for pair in pivots.windows(2) {
            assert!(pair[0] < pair[1]);
        }
    }

    #[test]
    fn kernel_rows_annihilate() {
        let a = vec![vec![2, 4], vec![1, 2], vec![3, 6]];
        let k = left_kernel(&a, 2);
        assert!(!k.is_empty());
        for row in &k {
            assert_eq!(row_mat_mul(row, &a), vec![0, 0]);
        }
    }

    #[test]
    fn solve_left_finds_solutions() {
        let a = vec![vec![2, 0], vec![0, 3]];
        let x = solve_left(&a, 2, &[4, 9]).unwrap();
        assert_eq!(row_mat_mul(&x, &a), vec![4, 9]);
        assert!(solve_left(&a, 2, &[1, 0]).is_none());
    }

    #[test]
    fn snf_quotient_shape() {
        // Z^2 / <(2,0),(0,8)> = Z/2 + Z/8
        let a = vec![vec![2, 0], vec![0, 8]];
        let (d, v, w) = snf_quotient(&a, 2);
        let mut nonzero: Vec<i128> = d.iter().copied().filter(|&x| x != 0).collect();
        nonzero.sort_unstable();
        assert_eq!(nonzero, vec![2, 8]);
        assert_eq!(mat_mul(&v, &w), identity(2));
    }

    #[test]
    fn snf_divisibility_chain() {
        let a = vec![vec![2, 1, 0], vec![0, 3, 4], vec![4, 0, 5]];
        let (d, v, w) = snf_quotient(&a, 3);
        assert_eq!(mat_mul(&v, &w), identity(3));
        let nz: Vec<i128> = d.iter().copied().filter(|&x| x != 0).collect();
        for pair in nz.windows(2) {
            assert_eq!(pair[1] % pair[0], 0, "divisibility chain broken: {nz:?}");
        }
    }
}
