//! Exact dense linear algebra over ℚ.
//!
//! Ranks and determinants clear denominators row by row and run fraction-free
//! (Bareiss) elimination on `i128`, switching to big integers when a product
//! would overflow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"` or `"p/q"`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            let n: BigInt = n.trim().parse().ok()?;
            (!d.is_zero()).then(|| Rat::new(n, d))
        }
        None => Some(Rat::from_integer(s.parse().ok()?)),
    }
}

/// Serializes a rational as the string `"p/q"` (or `"p"`).
pub mod serde_rat {
    use super::{parse_rat, Rat};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
    }
}

pub mod serde_rat_vec {
    use super::{parse_rat, Rat};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_rat(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Matrix { rows, cols, data: entries.iter().map(|&x| rat(x)).collect() }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let data: Vec<Rat> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), r * c);
        Matrix { rows: r, cols: c, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    /// Integer rows obtained by scaling each row with the lcm of its denominators.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let rows = self.integer_rows();
        match small_rows(&rows) {
            Some(small) => sparse_rank(small).unwrap_or_else(|| bareiss_big(rows).0),
            None => bareiss_big(rows).0,
        }
    }

    /// Entries as `i64` when every one is an integer that fits.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.data.iter().map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None }).collect()
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        if self.rows == 0 {
            return Rat::one();
        }
        let mut scale = BigInt::one();
        for i in 0..self.rows {
            scale *= self.row(i).iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        }
        let (rank, det) = bareiss_big(self.integer_rows());
        if rank < self.rows {
            return Rat::zero();
        }
        Rat::new(det, scale)
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self.get(r, c).recip();
            for j in 0..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let f = self.get(i, c).clone();
                for j in 0..self.cols {
                    let v = self.get(i, j) - &f * self.get(r, j);
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Basis of `{x : A x = 0}` as the columns of the returned matrix.
    pub fn nullspace(&self) -> Matrix {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            out.set(f, k, Rat::one());
            for (r, &p) in pivots.iter().enumerate() {
                out.set(p, k, -m.get(r, f).clone());
            }
        }
        out
    }

    /// Rows spanning `{y : y A = 0}`.
    pub fn left_nullspace(&self) -> Matrix {
        self.transpose().nullspace().transpose()
    }
}

/// Rank of an integer matrix given row by row.
pub fn integer_rank(rows: Vec<Vec<i128>>) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    sparse_rank(rows).unwrap_or_else(|| bareiss_big(big).0)
}

/// Integer elimination that prefers `±1` pivots and only touches rows meeting
/// the pivot column; other pivots use cross multiplication. `None` on overflow.
fn sparse_rank(mut m: Vec<Vec<i128>>) -> Option<usize> {
    let rows = m.len();
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let nnz = |row: &[i128]| row[c..].iter().filter(|&&x| x != 0).count();
        let Some(p) = (r..rows).filter(|&i| m[i][c] != 0).min_by_key(|&i| (m[i][c].unsigned_abs(), nnz(&m[i]))) else {
            continue;
        };
        m.swap(p, r);
        let (top, rest) = m.split_at_mut(r + 1);
        let pivot = &top[r];
        let pv = pivot[c];
        let support: Vec<usize> = (c + 1..cols).filter(|&j| pivot[j] != 0).collect();
        for row in rest.iter_mut() {
            let f = row[c];
            if f == 0 {
                continue;
            }
            if pv.abs() == 1 {
                let k = f * pv;
                for &j in &support {
                    row[j] = row[j].checked_sub(k.checked_mul(pivot[j])?)?;
                }
            } else {
                for j in c + 1..cols {
                    row[j] = row[j].checked_mul(pv)?.checked_sub(f.checked_mul(pivot[j])?)?;
                }
                let g = row[c + 1..].iter().fold(0i128, |a, &x| gcd_i128(a, x));
                if g > 1 {
                    row[c + 1..].iter_mut().for_each(|x| *x /= g);
                }
            }
            row[c] = 0;
        }
        r += 1;
    }
    Some(r)
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn small_rows(rows: &[Vec<BigInt>]) -> Option<Vec<Vec<i128>>> {
    rows.iter()
        .map(|r| r.iter().map(|x| x.to_i128().filter(|v| v.abs() < (1 << 60))).collect())
        .collect()
}

/// Fraction-free elimination over big integers; returns the rank and, for a
/// square matrix of full rank, its determinant.
fn bareiss_big(mut m: Vec<Vec<BigInt>>) -> (usize, BigInt) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            m.swap(p, r);
            sign = -sign;
        }
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &m[i][j] * &m[r][c] - &m[i][c] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    let det = if r == rows && rows == cols { sign * prev } else { BigInt::zero() };
    (r, det)
}
