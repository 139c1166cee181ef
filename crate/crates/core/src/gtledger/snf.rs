//! Smith normal form over the integers, with both transforms kept.

use crate::Error;

fn ovf() -> Error {
    Error::Verification("integer overflow in Smith normal form".into())
}

/// `u · m · v = d`, `d` diagonal with `d[i] | d[i+1]`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: Vec<Vec<i128>>,
    pub v: Vec<Vec<i128>>,
    /// Nonzero diagonal entries, positive, in order.
    pub diag: Vec<i128>,
    pub rows: usize,
    pub cols: usize,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// Re-multiplies `u · m · v` and compares with the diagonal form.
    pub fn verify(&self, m: &[Vec<i128>]) -> Result<(), Error> {
        let um = mat_mul(&self.u, m, self.rows, self.cols)?;
        let umv = mat_mul(&um, &self.v, self.cols, self.cols)?;
        for (i, row) in umv.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                let want = if i == j && i < self.diag.len() { self.diag[i] } else { 0 };
                if x != want {
                    return Err(Error::Verification(format!("U*M*V differs from D at ({}, {})", i, j)));
                }
            }
        }
        for w in self.diag.windows(2) {
            if w[0] <= 0 || w[1] % w[0] != 0 {
                return Err(Error::Verification("diagonal entries do not divide each other".into()));
            }
        }
        if det_is_unit(&self.u)? && det_is_unit(&self.v)? {
            Ok(())
        } else {
            Err(Error::Verification("transform is not unimodular".into()))
        }
    }
}

fn mat_mul(a: &[Vec<i128>], b: &[Vec<i128>], inner: usize, cols: usize) -> Result<Vec<Vec<i128>>, Error> {
    let mut out = vec![vec![0i128; cols]; a.len()];
    for (i, row) in a.iter().enumerate() {
        for k in 0..inner {
            let x = row[k];
            if x == 0 {
                continue;
            }
            for j in 0..cols {
                let t = x.checked_mul(b[k][j]).ok_or_else(ovf)?;
                out[i][j] = out[i][j].checked_add(t).ok_or_else(ovf)?;
            }
        }
    }
    Ok(out)
}

/// Fraction-free elimination; true iff the determinant is ±1.
fn det_is_unit(m: &[Vec<i128>]) -> Result<bool, Error> {
    let n = m.len();
    if n == 0 {
        return Ok(true);
    }
    let mut a = m.to_vec();
    let mut sign = 1i128;
    for c in 0..n {
        loop {
            let piv = (c..n).filter(|&r| a[r][c] != 0).min_by_key(|&r| a[r][c].unsigned_abs());
            let Some(p) = piv else { return Ok(false) };
            if p != c {
                a.swap(p, c);
                sign = -sign;
            }
            let mut clean = true;
            for r in c + 1..n {
                if a[r][c] != 0 {
                    let q = a[r][c].div_euclid(a[c][c]);
                    for j in c..n {
                        let t = q.checked_mul(a[c][j]).ok_or_else(ovf)?;
                        a[r][j] = a[r][j].checked_sub(t).ok_or_else(ovf)?;
                    }
                    if a[r][c] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if a[c][c].abs() != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn row_op(m: &mut [Vec<i128>], dst: usize, src: usize, q: i128) -> Result<(), Error> {
    if q == 0 {
        return Ok(());
    }
    for j in 0..m[dst].len() {
        let t = q.checked_mul(m[src][j]).ok_or_else(ovf)?;
        m[dst][j] = m[dst][j].checked_sub(t).ok_or_else(ovf)?;
    }
    Ok(())
}

fn col_op(m: &mut [Vec<i128>], dst: usize, src: usize, q: i128) -> Result<(), Error> {
    if q == 0 {
        return Ok(());
    }
    for row in m.iter_mut() {
        let t = q.checked_mul(row[src]).ok_or_else(ovf)?;
        row[dst] = row[dst].checked_sub(t).ok_or_else(ovf)?;
    }
    Ok(())
}

fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

/// Computes the Smith normal form of a `rows × cols` matrix.
pub fn smith_normal_form(m: &[Vec<i128>], cols: usize) -> Result<Snf, Error> {
    let rows = m.len();
    let mut a = m.to_vec();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 && best.is_none_or(|(bi, bj)| x.unsigned_abs() < a[bi][bj].unsigned_abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut changed = false;
            for i in t + 1..rows {
                if a[i][t] != 0 {
                    let q = a[i][t].div_euclid(a[t][t]);
                    row_op(&mut a, i, t, q)?;
                    row_op(&mut u, i, t, q)?;
                    if a[i][t] != 0 {
                        a.swap(t, i);
                        u.swap(t, i);
                        changed = true;
                    }
                }
            }
            for j in t + 1..cols {
                if a[t][j] != 0 {
                    let q = a[t][j].div_euclid(a[t][t]);
                    col_op(&mut a, j, t, q)?;
                    col_op(&mut v, j, t, q)?;
                    if a[t][j] != 0 {
                        for row in a.iter_mut() {
                            row.swap(t, j);
                        }
                        for row in v.iter_mut() {
                            row.swap(t, j);
                        }
                        changed = true;
                    }
                }
            }
            if changed {
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let p = a[t][t];
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % p != 0));
            match bad {
                Some(i) => {
                    row_op(&mut a, t, i, -1)?;
                    row_op(&mut u, t, i, -1)?;
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for x in a[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
        diag.push(a[t][t]);
    }
    let snf = Snf { u, v, diag, rows, cols };
    snf.verify(m)?;
    Ok(snf)
}
