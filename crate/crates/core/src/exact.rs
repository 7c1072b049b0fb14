//! Exact rational linear algebra and univariate polynomials.
//!
//! Everything here works over `BigRational`; matrices are small (at most
//! `d² × d²` for a `d`-letter alphabet) so dense Gaussian elimination is fine.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
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

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Q::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn add_scaled(&self, other: &Self, scale: &Q) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b * scale)
                .collect(),
        }
    }

    pub fn trace(&self) -> Q {
        (0..self.rows.min(self.cols)).fold(Q::zero(), |acc, i| acc + &self[(i, i)])
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self[(r, c)].recip();
            for j in c..self.cols {
                let v = &self[(r, j)] * &inv;
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in c..self.cols {
                    let v = &self[(r, j)] * &f;
                    self[(i, j)] -= v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right kernel `{x : A x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![Q::zero(); self.cols];
                x[f] = Q::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    x[pc] = -m[(r, f)].clone();
                }
                x
            })
            .collect()
    }

    /// Solves `A x = b` for square nonsingular `A`.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert!(self.is_square());
        assert_eq!(b.len(), self.rows);
        let n = self.rows;
        let mut aug = Self::zeros(n, n + 1);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n)] = b[i].clone();
        }
        let pivots = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some((0..n).map(|i| aug[(i, n)].clone()).collect())
    }

    /// Characteristic polynomial `det(λI − A)` (Faddeev–LeVerrier).
    pub fn char_poly(&self) -> Poly {
        assert!(self.is_square());
        let n = self.rows;
        let mut coeffs = vec![Q::zero(); n + 1];
        coeffs[n] = Q::one();
        let mut m = Self::zeros(n, n);
        let id = Self::identity(n);
        for k in 1..=n {
            m = self.mul(&m).add_scaled(&id, &coeffs[n - k + 1]);
            let am = self.mul(&m);
            coeffs[n - k] = -am.trace() / q(k as i64);
        }
        Poly::new(coeffs)
    }

    /// Positive semidefiniteness of a symmetric matrix: every elementary
    /// symmetric function of the eigenvalues is nonnegative.
    pub fn is_psd(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        let cp = self.char_poly();
        let n = self.rows;
        (1..=n).all(|j| {
            let e = if j % 2 == 0 {
                cp.coeff(n - j)
            } else {
                -cp.coeff(n - j)
            };
            !e.is_negative()
        })
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Univariate polynomial with rational coefficients, lowest degree first.
/// The zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Q>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Q) -> Self {
        Self::new(vec![c])
    }

    /// `x − root`
    pub fn linear_factor(root: &Q) -> Self {
        Self::new(vec![-root.clone(), Q::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn leading(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs
            .iter()
            .rev()
            .fold(Q::zero(), |acc, c| acc * x + c)
    }

    pub fn sign_at(&self, x: &Q) -> Ordering {
        self.eval(x).cmp(&Q::zero())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn neg(&self) -> Self {
        self.scale(&q(-1))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * q(i as i64))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Q::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let f = rem.last().unwrap() / &lead;
            for (i, c) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] -= c * &f;
            }
            quot[shift] = f;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&self.leading().recip())
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`: same roots, all simple.
    pub fn squarefree(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Lagrange interpolation through `(x_i, y_i)` with distinct `x_i`.
    pub fn interpolate(points: &[(Q, Q)]) -> Self {
        let mut acc = Self::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut basis = Self::constant(Q::one());
            let mut denom = Q::one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if i != j {
                    basis = basis.mul(&Self::linear_factor(xj));
                    denom *= xi - xj;
                }
            }
            acc = acc.add(&basis.scale(&(yi / denom)));
        }
        acc
    }

    /// Primitive integer polynomial with the same roots.
    fn integer_coeffs(&self) -> Vec<BigInt> {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Q::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if g.is_zero() {
            ints
        } else {
            ints.into_iter().map(|c| c / &g).collect()
        }
    }

    /// All rational roots with multiplicity, plus the cofactor left after
    /// dividing them out. Returns `None` when a coefficient is too large to
    /// enumerate divisors.
    pub fn rational_roots(&self) -> Option<(Vec<(Q, usize)>, Poly)> {
        assert!(!self.is_zero());
        let mut rest = self.clone();
        let mut roots: Vec<(Q, usize)> = Vec::new();
        let mut zero_mult = 0;
        while rest.coeff(0).is_zero() && rest.degree().unwrap_or(0) > 0 {
            rest = Self::new(rest.coeffs[1..].to_vec());
            zero_mult += 1;
        }
        if zero_mult > 0 {
            roots.push((Q::zero(), zero_mult));
        }
        if rest.degree().unwrap_or(0) == 0 {
            return Some((roots, rest));
        }
        let ints = rest.integer_coeffs();
        let a0 = divisors(&ints[0].abs())?;
        let an = divisors(&ints.last().unwrap().abs())?;
        let mut candidates: Vec<Q> = Vec::new();
        for p in &a0 {
            for d in &an {
                let c = Q::new(p.clone(), d.clone());
                candidates.push(c.clone());
                candidates.push(-c);
            }
        }
        candidates.sort();
        candidates.dedup();
        for c in candidates {
            let mut mult = 0;
            while rest.degree().unwrap_or(0) > 0 && rest.eval(&c).is_zero() {
                rest = rest.div_rem(&Self::linear_factor(&c)).0;
                mult += 1;
            }
            if mult > 0 {
                roots.push((c, mult));
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        Some((roots, rest))
    }

    /// Sturm chain of a squarefree polynomial.
    fn sturm_chain(&self) -> Vec<Poly> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[n - 2].div_rem(&chain[n - 1]).1;
            if r.is_zero() {
                break;
            }
            chain.push(r.neg());
        }
        chain
    }

    /// Bound `B` with every real root in `(-B, B)` (Cauchy).
    pub fn root_bound(&self) -> Q {
        let lead = self.leading().abs();
        let m = self
            .coeffs
            .iter()
            .rev()
            .skip(1)
            .map(|c| c.abs() / &lead)
            .max()
            .unwrap_or_else(Q::zero);
        m + Q::one()
    }

    /// Isolating intervals `(lo, hi]` of width at most `width` for every real
    /// root of the polynomial. Exact rational roots are returned as
    /// [`RealRoot::Exact`].
    pub fn real_roots(&self, width: &Q) -> Vec<RealRoot> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let (rational, rest) = self
            .rational_roots()
            .unwrap_or_else(|| (Vec::new(), self.clone()));
        let mut out: Vec<RealRoot> = rational
            .into_iter()
            .map(|(r, _)| RealRoot::Exact(r))
            .collect();
        if rest.degree().unwrap_or(0) > 0 {
            let sf = rest.squarefree();
            let chain = sf.sturm_chain();
            let b = sf.root_bound();
            let mut stack = vec![(-b.clone(), b)];
            while let Some((lo, hi)) = stack.pop() {
                let n = sturm_count(&chain, &lo, &hi);
                if n == 0 {
                    continue;
                }
                if n == 1 && &hi - &lo <= *width {
                    out.push(RealRoot::Isolated {
                        lo,
                        hi,
                        poly: sf.clone(),
                    });
                    continue;
                }
                let mid = (&lo + &hi) / q(2);
                if sf.eval(&mid).is_zero() {
                    // irrational-only polynomial cannot vanish at a rational
                    unreachable!("rational root survived extraction");
                }
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
        out.sort_by(|a, b| {
            a.approx()
                .partial_cmp(&b.approx())
                .unwrap_or(Ordering::Equal)
        });
        out
    }
}

fn sign_changes(chain: &[Poly], x: &Q) -> usize {
    let signs: Vec<Ordering> = chain
        .iter()
        .map(|p| p.sign_at(x))
        .filter(|s| *s != Ordering::Equal)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots in `(lo, hi]`.
fn sturm_count(chain: &[Poly], lo: &Q, hi: &Q) -> usize {
    sign_changes(chain, lo).saturating_sub(sign_changes(chain, hi))
}

/// Positive divisors; gives up above 10^15.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.to_u64()?;
    if n > 1_000_000_000_000_000 {
        return None;
    }
    if n == 0 {
        return Some(vec![BigInt::one()]);
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1u64;
    while i * i <= n {
        if n % i == 0 {
            small.push(BigInt::from(i));
            if i * i != n {
                large.push(BigInt::from(n / i));
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}

/// A real root of a rational polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealRoot {
    Exact(Q),
    /// The unique root of `poly` in `(lo, hi]`; irrational.
    Isolated {
        lo: Q,
        hi: Q,
        poly: Poly,
    },
}

impl RealRoot {
    pub fn approx(&self) -> f64 {
        match self {
            RealRoot::Exact(v) => to_f64(v),
            RealRoot::Isolated { lo, hi, .. } => to_f64(&((lo + hi) / q(2))),
        }
    }

    pub fn lower(&self) -> &Q {
        match self {
            RealRoot::Exact(v) => v,
            RealRoot::Isolated { lo, .. } => lo,
        }
    }

    pub fn upper(&self) -> &Q {
        match self {
            RealRoot::Exact(v) => v,
            RealRoot::Isolated { hi, .. } => hi,
        }
    }
}

impl fmt::Display for RealRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealRoot::Exact(v) => write!(f, "{v}"),
            RealRoot::Isolated { lo, hi, .. } => write!(f, "root in ({lo}, {hi}]"),
        }
    }
}

pub fn to_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qm(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| q(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn solve_and_nullspace() {
        let a = qm(&[&[2, 1], &[1, 3]]);
        let x = a.solve(&[q(3), q(5)]).unwrap();
        assert_eq!(x, vec![frac(4, 5), frac(7, 5)]);
        assert!(qm(&[&[1, 2], &[2, 4]]).solve(&[q(1), q(1)]).is_none());

        let k = qm(&[&[1, 2], &[2, 4]]).nullspace();
        assert_eq!(k, vec![vec![q(-2), q(1)]]);
    }

    #[test]
    fn char_poly_of_small_matrices() {
        // [[2,1],[1,2]] -> λ² − 4λ + 3
        let cp = qm(&[&[2, 1], &[1, 2]]).char_poly();
        assert_eq!(cp.coeffs(), &[q(3), q(-4), q(1)]);
        let cp = QMatrix::identity(3).char_poly();
        // (λ − 1)³
        assert_eq!(cp.coeffs(), &[q(-1), q(3), q(-3), q(1)]);
    }

    #[test]
    fn psd_via_principal_invariants() {
        assert!(qm(&[&[1, 1], &[1, 1]]).is_psd());
        assert!(!qm(&[&[1, 2], &[2, 1]]).is_psd());
        assert!(qm(&[&[0, 0], &[0, 0]]).is_psd());
        assert!(!qm(&[&[1, 0], &[1, 1]]).is_psd());
    }

    #[test]
    fn rational_roots_with_multiplicity() {
        // (x − 1/2)² (x + 3) x
        let p = Poly::linear_factor(&frac(1, 2))
            .mul(&Poly::linear_factor(&frac(1, 2)))
            .mul(&Poly::linear_factor(&q(-3)))
            .mul(&Poly::linear_factor(&q(0)));
        let (roots, rest) = p.rational_roots().unwrap();
        assert_eq!(roots, vec![(q(-3), 1), (q(0), 1), (frac(1, 2), 2)]);
        assert_eq!(rest.degree(), Some(0));
    }

    #[test]
    fn isolates_irrational_roots() {
        // x² − 2
        let p = Poly::new(vec![q(-2), q(0), q(1)]);
        let roots = p.real_roots(&frac(1, 1 << 20));
        assert_eq!(roots.len(), 2);
        assert!((roots[0].approx() + 2f64.sqrt()).abs() < 1e-5);
        assert!((roots[1].approx() - 2f64.sqrt()).abs() < 1e-5);
        // x² + 1 has none
        assert!(Poly::new(vec![q(1), q(0), q(1)])
            .real_roots(&frac(1, 8))
            .is_empty());
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = Poly::new(vec![q(1), frac(-1, 2), q(0), q(2)]);
        let pts: Vec<(Q, Q)> = (0..4).map(|x| (q(x), p.eval(&q(x)))).collect();
        assert_eq!(Poly::interpolate(&pts), p);
    }

    #[test]
    fn squarefree_part() {
        let p = Poly::linear_factor(&q(1)).mul(&Poly::linear_factor(&q(1)));
        assert_eq!(p.squarefree(), Poly::linear_factor(&q(1)));
    }
}
