//! Dense exact linear algebra over `Rat`, plus the index sets used by
//! exterior and symmetric powers.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::primes::factorial;
use crate::rational::{int, Rat};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(crate::rational::fmt_rat).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn diagonal(d: &[Rat]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch {
                expected: c,
                found: bad.len(),
            });
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
        .expect("rectangular")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Rat>]) -> Result<Self> {
        let n = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.len(),
                });
            }
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, o: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: o.rows,
            });
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        if self.cols != x.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rat::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// `x^T A x`.
    pub fn quad_form(&self, x: &[Rat]) -> Result<Rat> {
        let ax = self.mul_vec(x)?;
        Ok(ax.iter().zip(x).fold(Rat::zero(), |acc, (a, b)| acc + a * b))
    }

    pub fn neg(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = &self[(i, j)];
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// For a monomial matrix, `perm[i]` is the column of the nonzero entry in row `i`.
    pub fn monomial_permutation(&self) -> Option<Vec<usize>> {
        if !self.is_square() {
            return None;
        }
        let mut perm = Vec::with_capacity(self.rows);
        let mut used = vec![false; self.cols];
        for i in 0..self.rows {
            let mut nz = self.row(i).iter().enumerate().filter(|(_, x)| !x.is_zero());
            let (j, _) = nz.next()?;
            if nz.next().is_some() || used[j] {
                return None;
            }
            used[j] = true;
            perm.push(j);
        }
        Some(perm)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Row echelon form by exact elimination with partial pivoting; returns the
    /// reduced matrix, the rank, and the determinant sign/scale bookkeeping.
    fn eliminate(&self) -> (RatMatrix, usize, Rat) {
        let mut a = self.clone();
        let mut det = Rat::one();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(piv) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
                det = Rat::zero();
                continue;
            };
            if piv != r {
                for j in 0..a.cols {
                    a.data.swap(piv * a.cols + j, r * a.cols + j);
                }
                det = -det;
            }
            let p = a[(r, c)].clone();
            det *= &p;
            for i in r + 1..a.rows {
                if a[(i, c)].is_zero() {
                    continue;
                }
                let f = &a[(i, c)] / &p;
                for j in c..a.cols {
                    let t = &f * &a[(r, j)];
                    if !t.is_zero() {
                        a[(i, j)] -= t;
                    }
                }
            }
            r += 1;
        }
        if r < a.rows {
            det = Rat::zero();
        }
        (a, r, det)
    }

    pub fn rank(&self) -> usize {
        self.eliminate().1
    }

    pub fn det(&self) -> Result<Rat> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        if self.rows == 0 {
            return Ok(Rat::one());
        }
        if self.is_diagonal() {
            return Ok((0..self.rows).fold(Rat::one(), |acc, i| acc * &self[(i, i)]));
        }
        Ok(self.eliminate().2)
    }

    pub fn inverse(&self) -> Result<RatMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        if self.is_diagonal() {
            let mut out = Self::zeros(n, n);
            for i in 0..n {
                if self[(i, i)].is_zero() {
                    return Err(Error::SingularMatrix("zero on the diagonal".into()));
                }
                out[(i, i)] = self[(i, i)].recip();
            }
            return Ok(out);
        }
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let piv = (c..n)
                .find(|&i| !a[(i, c)].is_zero())
                .ok_or_else(|| Error::SingularMatrix(format!("no pivot in column {c}")))?;
            if piv != c {
                for j in 0..n {
                    a.data.swap(piv * n + j, c * n + j);
                    inv.data.swap(piv * n + j, c * n + j);
                }
            }
            let p = a[(c, c)].recip();
            for j in 0..n {
                a[(c, j)] *= &p;
                inv[(c, j)] *= &p;
            }
            for i in 0..n {
                if i == c || a[(i, c)].is_zero() {
                    continue;
                }
                let f = a[(i, c)].clone();
                for j in 0..n {
                    let t = &f * &a[(c, j)];
                    if !t.is_zero() {
                        a[(i, j)] -= t;
                    }
                    let t = &f * &inv[(c, j)];
                    if !t.is_zero() {
                        inv[(i, j)] -= t;
                    }
                }
            }
        }
        Ok(inv)
    }

    /// Pivots of the LDL^T factorization without pivoting, i.e. ratios of
    /// consecutive leading principal minors. `None` if a pivot vanishes.
    pub fn ldl_pivots(&self) -> Option<Vec<Rat>> {
        let n = self.rows;
        if self.is_diagonal() {
            let d: Vec<Rat> = (0..n).map(|i| self[(i, i)].clone()).collect();
            return if d.iter().any(Zero::is_zero) { None } else { Some(d) };
        }
        let mut a = self.clone();
        let mut piv = Vec::with_capacity(n);
        for k in 0..n {
            let p = a[(k, k)].clone();
            if p.is_zero() {
                return None;
            }
            for i in k + 1..n {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let f = &a[(i, k)] / &p;
                for j in k..n {
                    let t = &f * &a[(k, j)];
                    if !t.is_zero() {
                        a[(i, j)] -= t;
                    }
                }
            }
            piv.push(p);
        }
        Some(piv)
    }

    /// All leading principal minors positive.
    pub fn is_positive_definite(&self) -> bool {
        self.is_symmetric()
            && self
                .ldl_pivots()
                .is_some_and(|p| p.iter().all(Signed::is_positive))
    }

    pub fn kron(&self, o: &RatMatrix) -> RatMatrix {
        let mut out = Self::zeros(self.rows * o.rows, self.cols * o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..o.rows {
                    for l in 0..o.cols {
                        let b = &o[(k, l)];
                        if !b.is_zero() {
                            out[(i * o.rows + k, j * o.cols + l)] = a * b;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn block_diag(&self, o: &RatMatrix) -> RatMatrix {
        let mut out = Self::zeros(self.rows + o.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..o.rows {
            for j in 0..o.cols {
                out[(self.rows + i, self.cols + j)] = o[(i, j)].clone();
            }
        }
        out
    }

    /// The `l`-th compound: `l x l` minors indexed by lex-ordered subsets.
    pub fn compound(&self, l: usize) -> Result<RatMatrix> {
        let rs = combinations(self.rows, l);
        let cs = combinations(self.cols, l);
        let mut out = Self::zeros(rs.len(), cs.len());
        if self.is_diagonal() {
            for (a, s) in rs.iter().enumerate() {
                out[(a, a)] = s.iter().fold(Rat::one(), |acc, &i| acc * &self[(i, i)]);
            }
            return Ok(out);
        }
        for (a, r) in rs.iter().enumerate() {
            for (b, c) in cs.iter().enumerate() {
                out[(a, b)] = self.submatrix(r, c).det()?;
            }
        }
        Ok(out)
    }

    /// Action of the matrix on the degree-`l` monomials of `compositions(n, l)`:
    /// column `beta` holds the coefficients of `prod_j (M e_j)^{beta_j}`.
    pub fn sym_power(&self, l: usize) -> Result<RatMatrix> {
        let n = self.rows;
        let basis = compositions(n, l);
        let index: HashMap<&[u32], usize> = basis
            .iter()
            .enumerate()
            .map(|(i, a)| (a.as_slice(), i))
            .collect();
        let mut out = Self::zeros(basis.len(), basis.len());
        if self.is_diagonal() {
            for (a, alpha) in basis.iter().enumerate() {
                out[(a, a)] = alpha
                    .iter()
                    .enumerate()
                    .fold(Rat::one(), |acc, (i, &k)| acc * pow_rat(&self[(i, i)], k));
            }
            return Ok(out);
        }
        let columns: Vec<Vec<(usize, Rat)>> = (0..n)
            .map(|j| {
                (0..n)
                    .filter(|&i| !self[(i, j)].is_zero())
                    .map(|i| (i, self[(i, j)].clone()))
                    .collect()
            })
            .collect();
        for (b, beta) in basis.iter().enumerate() {
            let mut poly: HashMap<Vec<u32>, Rat> = HashMap::new();
            poly.insert(vec![0; n], Rat::one());
            for (j, &k) in beta.iter().enumerate() {
                for _ in 0..k {
                    let mut next: HashMap<Vec<u32>, Rat> = HashMap::new();
                    for (mono, coeff) in &poly {
                        for (i, a) in &columns[j] {
                            let mut m = mono.clone();
                            m[*i] += 1;
                            *next.entry(m).or_insert_with(Rat::zero) += coeff * a;
                        }
                    }
                    next.retain(|_, c| !c.is_zero());
                    poly = next;
                }
            }
            for (mono, coeff) in poly {
                out[(index[mono.as_slice()], b)] = coeff;
            }
        }
        Ok(out)
    }
}

pub fn pow_rat(x: &Rat, k: u32) -> Rat {
    num_traits::pow(x.clone(), k as usize)
}

/// `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Exponent vectors of length `n` summing to `l`, in descending lexicographic
/// order (starting at `(l, 0, ..., 0)`).
pub fn compositions(n: usize, l: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for k in (0..=left).rev() {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
    }
    rec(0, l as u32, &mut cur, &mut out);
    out
}

/// `prod_i alpha_i!`.
pub fn multi_factorial(alpha: &[u32]) -> BigInt {
    alpha
        .iter()
        .fold(BigInt::one(), |acc, &k| acc * BigInt::from(factorial(k as u64)))
}

/// Permanent of the `l x l` matrix whose rows are row `i` of `g` repeated
/// `alpha_i` times and whose columns are column `j` repeated `beta_j` times
/// (Ryser's formula summed over column multiplicities).
pub fn multiset_permanent(g: &RatMatrix, alpha: &[u32], beta: &[u32]) -> Rat {
    let n = g.cols();
    let l: u32 = beta.iter().sum();
    let mut total = Rat::zero();
    let mut s = vec![0u32; n];
    loop {
        let size: u32 = s.iter().sum();
        if size > 0 {
            let mut term = Rat::one();
            for (j, &sj) in s.iter().enumerate() {
                term *= Rat::from_integer(BigInt::from(crate::primes::binomial(
                    beta[j] as u64,
                    sj as u64,
                )));
            }
            for (i, &ai) in alpha.iter().enumerate() {
                if ai == 0 || term.is_zero() {
                    continue;
                }
                let r = s
                    .iter()
                    .enumerate()
                    .filter(|(_, &sj)| sj > 0)
                    .fold(Rat::zero(), |acc, (j, &sj)| {
                        acc + &g[(i, j)] * Rat::from_integer(BigInt::from(sj))
                    });
                term *= pow_rat(&r, ai);
            }
            if (l - size) % 2 == 1 {
                total -= term;
            } else {
                total += term;
            }
        }
        // odometer over 0 <= s_j <= beta_j
        let mut j = 0;
        loop {
            if j == n {
                return total;
            }
            if s[j] < beta[j] {
                s[j] += 1;
                break;
            }
            s[j] = 0;
            j += 1;
        }
    }
}

/// Gcd of the maximal minors of an integer `n x m` matrix (given by rows),
/// `n >= m`, computed from a Hermite-style echelon form under unimodular row
/// operations.
pub fn gcd_maximal_minors(rows: &[Vec<BigInt>]) -> BigInt {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let n = a.len();
    let m = a.first().map_or(0, Vec::len);
    let mut det = BigInt::one();
    let mut r = 0;
    for c in 0..m {
        // fold every row below r into row r by extended gcd steps
        for i in r + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            if a[r][c].is_zero() {
                a.swap(r, i);
                continue;
            }
            let e = a[r][c].extended_gcd(&a[i][c]);
            let (x, y) = (e.x, e.y);
            let u = &a[r][c] / &e.gcd;
            let v = &a[i][c] / &e.gcd;
            for k in c..m {
                let top = &x * &a[r][k] + &y * &a[i][k];
                let bot = &u * &a[i][k] - &v * &a[r][k];
                a[r][k] = top;
                a[i][k] = bot;
            }
        }
        if r >= n || a[r][c].is_zero() {
            return BigInt::zero();
        }
        det *= a[r][c].abs();
        r += 1;
    }
    det
}

/// Column scaling that turns each rational column into a primitive integer
/// vector (positive multiple).
pub fn primitive_integer(v: &[Rat]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rat::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn det_and_inverse() {
        let m = RatMatrix::from_i64(&[&[2, 3], &[3, 8]]);
        assert_eq!(m.det().unwrap(), int(7));
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        let sing = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(sing.det().unwrap(), int(0));
        assert!(sing.inverse().is_err());
        assert_eq!(sing.rank(), 1);
    }

    #[test]
    fn ones_plus_identity_has_det_n_plus_one() {
        for n in 1..8 {
            let mut g = RatMatrix::identity(n);
            for i in 0..n {
                for j in 0..n {
                    g[(i, j)] += int(1);
                }
            }
            assert_eq!(g.det().unwrap(), int(n as i64 + 1));
            assert!(g.is_positive_definite());
        }
    }

    #[test]
    fn index_sets() {
        assert_eq!(
            combinations(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(
            compositions(2, 2),
            vec![vec![2, 0], vec![1, 1], vec![0, 2]]
        );
        assert_eq!(compositions(3, 2).len(), 6);
    }

    #[test]
    fn compound_of_product_is_product_of_compounds() {
        let a = RatMatrix::from_i64(&[&[1, 2, 0], &[3, -1, 4], &[0, 5, 2]]);
        let b = RatMatrix::from_i64(&[&[2, 0, 1], &[1, 1, 0], &[-2, 3, 1]]);
        let ab = a.mul(&b).unwrap();
        for l in 1..=3 {
            assert_eq!(
                ab.compound(l).unwrap(),
                a.compound(l).unwrap().mul(&b.compound(l).unwrap()).unwrap()
            );
        }
        assert_eq!(a.compound(3).unwrap()[(0, 0)], a.det().unwrap());
    }

    #[test]
    fn sym_power_is_functorial() {
        let a = RatMatrix::from_rows(vec![vec![int(1), rat(1, 2)], vec![int(-1), int(3)]]).unwrap();
        let b = RatMatrix::from_i64(&[&[0, 1], &[1, 1]]);
        let ab = a.mul(&b).unwrap();
        for l in 1..4 {
            assert_eq!(
                ab.sym_power(l).unwrap(),
                a.sym_power(l).unwrap().mul(&b.sym_power(l).unwrap()).unwrap()
            );
        }
        // det S^2(M) = det(M)^3 for 2x2
        let s2 = a.sym_power(2).unwrap();
        assert_eq!(s2.det().unwrap(), pow_rat(&a.det().unwrap(), 3));
    }

    #[test]
    fn permanent_matches_direct_sum_over_permutations() {
        let g = RatMatrix::from_i64(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 2]]);
        // per of rows (0,0,1), cols (1,2,2)
        let rows = [0usize, 0, 1];
        let cols = [1usize, 2, 2];
        let mut direct = Rat::zero();
        for p in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            direct += (0..3).fold(Rat::one(), |acc, i| acc * &g[(rows[i], cols[p[i]])]);
        }
        assert_eq!(multiset_permanent(&g, &[2, 1, 0], &[0, 1, 2]), direct);
    }

    #[test]
    fn gcd_of_maximal_minors() {
        let rows = vec![
            vec![BigInt::from(2), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(2)],
            vec![BigInt::from(2), BigInt::from(4)],
        ];
        // minors: 4, 8-0=... (2*4-0*2)=8, (0*4-2*2)=-4 -> gcd 4
        assert_eq!(gcd_maximal_minors(&rows), BigInt::from(4));
        let rows = vec![vec![BigInt::from(6)], vec![BigInt::from(10)], vec![BigInt::from(15)]];
        assert_eq!(gcd_maximal_minors(&rows), BigInt::from(1));
        assert_eq!(
            primitive_integer(&[rat(1, 2), rat(-1, 3), int(0)]),
            vec![BigInt::from(3), BigInt::from(-2), BigInt::from(0)]
        );
    }
}
