//! Small dense matrices of polynomials.

use crate::arith::Polynomial;
use crate::ring::Frac;

pub type Matrix = Vec<Vec<Polynomial>>;
pub type FracMatrix = Vec<Vec<Frac>>;

/// Determinant by dynamic programming over column subsets (exact, no division).
pub fn determinant(m: &Matrix) -> Polynomial {
    let n = m.len();
    if n == 0 {
        return Polynomial::one();
    }
    assert!(m.iter().all(|r| r.len() == n), "square matrix expected");
    assert!(n <= 20, "matrix too large for subset expansion");
    let mut dp: Vec<Polynomial> = vec![Polynomial::zero(); 1 << n];
    dp[0] = Polynomial::one();
    for mask in 0usize..(1 << n) {
        let row = mask.count_ones() as usize;
        if row >= n || dp[mask].is_zero() {
            continue;
        }
        for col in 0..n {
            if mask & (1 << col) != 0 || m[row][col].is_zero() {
                continue;
            }
            // inversions contributed: used columns to the right of `col`
            let above = (mask >> (col + 1)).count_ones();
            let term = &dp[mask] * &m[row][col];
            let next = mask | (1 << col);
            dp[next] = if above % 2 == 0 { &dp[next] + &term } else { &dp[next] - &term };
        }
    }
    dp[(1 << n) - 1].clone()
}

fn without(m: &Matrix, row: usize, col: usize) -> Matrix {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| x.clone()).collect())
        .collect()
}

/// Classical adjoint: `adj(H) H = H adj(H) = det(H) Id`.
pub fn adjugate(m: &Matrix) -> Matrix {
    let n = m.len();
    if n == 1 {
        return vec![vec![Polynomial::one()]];
    }
    let mut out = vec![vec![Polynomial::zero(); n]; n];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let minor = determinant(&without(m, j, i));
            *entry = if (i + j) % 2 == 0 { minor } else { -&minor };
        }
    }
    out
}

pub fn mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn mul_frac(a: &FracMatrix, b: &FracMatrix) -> FracMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Frac::zero(), |acc, k| acc.add(&row[k].mul(&b[k][j]))))
                .collect()
        })
        .collect()
}

pub fn to_frac(m: &Matrix) -> FracMatrix {
    m.iter().map(|r| r.iter().cloned().map(Frac::from).collect()).collect()
}

pub fn scale(m: &Matrix, c: &Frac) -> FracMatrix {
    m.iter().map(|r| r.iter().map(|x| c.mul_poly(x)).collect()).collect()
}

/// `c` times the `rows` x `cols` matrix `(Id | 0)`.
pub fn scaled_identity(rows: usize, cols: usize, c: &Frac) -> FracMatrix {
    (0..rows)
        .map(|i| (0..cols).map(|j| if i == j { c.clone() } else { Frac::zero() }).collect())
        .collect()
}

pub fn frac_eq(a: &FracMatrix, b: &FracMatrix) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.len() == y.len() && x.iter().zip(y).all(|(p, q)| p == q))
}

pub fn to_strings(m: &Matrix) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
}

pub fn frac_strings(m: &FracMatrix) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::serde_poly::parse_free;

    fn p(s: &str) -> Polynomial {
        parse_free(s).unwrap()
    }

    fn m(rows: &[&[&str]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|s| p(s)).collect()).collect()
    }

    #[test]
    fn small_determinants() {
        assert_eq!(determinant(&m(&[&["1", "1"], &["Y2", "Y1"]])), p("Y1 - Y2"));
        assert_eq!(determinant(&m(&[&["0", "1"], &["1", "0"]])), p("-1"));
        let three = m(&[&["2", "0", "1"], &["1", "3", "0"], &["0", "1", "4"]]);
        assert_eq!(determinant(&three), p("25"));
    }

    #[test]
    fn adjugate_identity() {
        let h = m(&[&["2*Y1", "2*Y2"], &["0", "1"]]);
        let adj = adjugate(&h);
        let det = determinant(&h);
        let prod = mul(&h, &adj);
        assert_eq!(prod, vec![vec![det.clone(), Polynomial::zero()], vec![Polynomial::zero(), det]]);
    }
}
