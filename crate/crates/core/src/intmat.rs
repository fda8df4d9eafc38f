//! Exact integer matrix reductions: Smith diagonal and row-style Hermite
//! normal form with a tracked transform. Inputs are desk sized, so plain
//! `i128` arithmetic is used throughout.

pub type Matrix = Vec<Vec<i128>>;

fn is_zero_below(m: &Matrix, t: usize) -> bool {
    m.iter().skip(t).all(|row| row.iter().skip(t).all(|&x| x == 0))
}

/// Diagonal of the Smith normal form (nonnegative, each dividing the next),
/// computed by elementary row and column operations with the pivot chosen as
/// the entry of least absolute value.
pub fn smith_diagonal(input: &Matrix) -> Vec<i128> {
    let mut m = input.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        if is_zero_below(&m, t) {
            break;
        }
        loop {
            let (mut pi, mut pj, mut best) = (t, t, i128::MAX);
            for (i, row) in m.iter().enumerate().skip(t) {
                for (j, &x) in row.iter().enumerate().skip(t) {
                    if x != 0 && x.abs() < best {
                        best = x.abs();
                        pi = i;
                        pj = j;
                    }
                }
            }
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let p = m[t][t];
            let mut dirty = false;
            for i in t + 1..rows {
                let q = m[i][t] / p;
                if q != 0 {
                    for j in t..cols {
                        m[i][j] -= q * m[t][j];
                    }
                }
                dirty |= m[i][t] != 0;
            }
            for j in t + 1..cols {
                let q = m[t][j] / p;
                if q != 0 {
                    for row in m.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                dirty |= m[t][j] != 0;
            }
            if dirty {
                continue;
            }
            // Pivot must divide the rest of the submatrix.
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| m[i][j] % p != 0));
            match offender {
                Some(i) => {
                    for j in t..cols {
                        m[t][j] += m[i][j];
                    }
                }
                None => break,
            }
        }
        diag.push(m[t][t].abs());
    }
    diag
}

/// Integer row lattice in Hermite normal form. `rows[k] = Σ transform[k][i] ·
/// generators[i]`.
#[derive(Debug, Clone)]
pub struct Lattice {
    dim: usize,
    rows: Matrix,
    pivots: Vec<usize>,
    transform: Matrix,
    generators: usize,
}

impl Lattice {
    pub fn new(dim: usize, generators: &Matrix) -> Self {
        let g = generators.len();
        let mut rows: Matrix = generators.clone();
        let mut transform: Matrix = (0..g)
            .map(|i| (0..g).map(|j| i128::from(i == j)).collect())
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..dim {
            // Euclid on column `col` among rows r.. until a single nonzero remains.
            loop {
                let nz: Vec<usize> = (r..rows.len()).filter(|&i| rows[i][col] != 0).collect();
                if nz.len() <= 1 {
                    break;
                }
                let k = *nz.iter().min_by_key(|&&i| rows[i][col].abs()).unwrap();
                for &i in &nz {
                    if i != k {
                        let q = rows[i][col] / rows[k][col];
                        for j in 0..dim {
                            rows[i][j] -= q * rows[k][j];
                        }
                        for j in 0..g {
                            transform[i][j] -= q * transform[k][j];
                        }
                    }
                }
            }
            let Some(k) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
                continue;
            };
            rows.swap(r, k);
            transform.swap(r, k);
            if rows[r][col] < 0 {
                rows[r].iter_mut().for_each(|x| *x = -*x);
                transform[r].iter_mut().for_each(|x| *x = -*x);
            }
            let p = rows[r][col];
            for i in 0..r {
                let q = rows[i][col].div_euclid(p);
                if q != 0 {
                    for j in 0..dim {
                        rows[i][j] -= q * rows[r][j];
                    }
                    for j in 0..g {
                        transform[i][j] -= q * transform[r][j];
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
        rows.truncate(r);
        transform.truncate(r);
        Lattice { dim, rows, pivots, transform, generators: g }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Canonical representative of `v` modulo the lattice, together with the
    /// generator coefficients `c` such that `v = remainder + Σ c_i gen_i`.
    pub fn reduce(&self, v: &[i128]) -> (Vec<i128>, Vec<i128>) {
        let mut v = v.to_vec();
        let mut coeffs = vec![0i128; self.generators];
        for (row, (&col, tr)) in self.rows.iter().zip(self.pivots.iter().zip(&self.transform)) {
            let q = v[col].div_euclid(row[col]);
            if q != 0 {
                for j in 0..self.dim {
                    v[j] -= q * row[j];
                }
                for j in 0..self.generators {
                    coeffs[j] += q * tr[j];
                }
            }
        }
        (v, coeffs)
    }

    pub fn contains(&self, v: &[i128]) -> bool {
        self.reduce(v).0.iter().all(|&x| x == 0)
    }
}
