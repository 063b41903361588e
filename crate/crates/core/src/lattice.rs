//! Exact integer lattice linear algebra.
//!
//! Everything here works over arbitrary-precision integers: Hermite and Smith
//! normal forms, saturation of sublattices, indices, basis completion, and the
//! solution of congruence systems `M·φ ≡ r (mod ℤ)` whose right-hand sides are
//! torsion values.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type IntVector = Vec<BigInt>;

/// Builds an integer vector from machine integers.
pub fn ivec(entries: &[i64]) -> IntVector {
    entries.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gcd of all entries (non-negative; zero for the zero vector).
pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

pub fn format_vector(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(","))
}

/// A dense integer matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: &[IntVector]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row.iter().cloned());
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Convenience constructor for tests and examples.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<IntVector> = rows.iter().map(|r| ivec(r)).collect();
        Self::from_rows(cols, &rows).expect("ragged matrix literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<IntVector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> IntVector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
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
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[BigInt]) -> IntVector {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| &v[i] * &self[(i, j)]).sum())
            .collect()
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row(i).iter().all(Zero::is_zero)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.determinant().abs().is_one()
    }

    /// Inverse of a unimodular matrix, `None` otherwise.
    pub fn inverse_unimodular(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let (h, u) = hermite_normal_form(self);
        (h == Self::identity(self.rows)).then_some(u)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    /// `row_dst -= q * row_src`
    fn sub_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * q;
            self[(dst, j)] -= v;
        }
    }

    /// Replaces rows (a, b) by (x·a + y·b, r·a + s·b).
    fn combine_rows(&mut self, a: usize, b: usize, c: &[BigInt; 4]) {
        let [x, y, r, s] = c;
        for j in 0..self.cols {
            let va = self[(a, j)].clone();
            let vb = self[(b, j)].clone();
            self[(a, j)] = x * &va + y * &vb;
            self[(b, j)] = r * &va + s * &vb;
        }
    }

    /// Replaces columns (a, b) by (x·a + y·b, r·a + s·b).
    fn combine_cols(&mut self, a: usize, b: usize, c: &[BigInt; 4]) {
        let [x, y, r, s] = c;
        for i in 0..self.rows {
            let va = self[(i, a)].clone();
            let vb = self[(i, b)].clone();
            self[(i, a)] = x * &va + y * &vb;
            self[(i, b)] = r * &va + s * &vb;
        }
    }
}

impl Index<(usize, usize)> for IntegerMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows).map(|i| format_vector(self.row(i))).collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// Unimodular 2×2 transform `[x, y, -b/g, a/g]` with `x·a + y·b = g = gcd(a, b)`.
/// Applied to a pair (a, b) it produces (g, 0).
fn gcd_transform(a: &BigInt, b: &BigInt) -> [BigInt; 4] {
    // plain elimination when a | b, so the pivot row is left untouched
    if !a.is_zero() && b.is_multiple_of(a) {
        return [BigInt::one(), BigInt::zero(), -(b / a), BigInt::one()];
    }
    let e = a.extended_gcd(b);
    let (mut g, mut x, mut y) = (e.gcd, e.x, e.y);
    if g.is_negative() {
        g = -g;
        x = -x;
        y = -y;
    }
    let r = -(b / &g);
    let s = a / &g;
    [x, y, r, s]
}

/// Row-style Hermite normal form: returns `(H, U)` with `U·M = H`, `U` unimodular,
/// `H` in echelon form with positive pivots and entries above each pivot reduced
/// into `[0, pivot)`. Zero rows are collected at the bottom.
pub fn hermite_normal_form(m: &IntegerMatrix) -> (IntegerMatrix, IntegerMatrix) {
    let mut h = m.clone();
    let mut u = IntegerMatrix::identity(m.rows);
    let mut pivot_row = 0;
    for col in 0..m.cols {
        if pivot_row == m.rows {
            break;
        }
        for i in pivot_row + 1..m.rows {
            if h[(i, col)].is_zero() {
                continue;
            }
            let t = gcd_transform(&h[(pivot_row, col)], &h[(i, col)]);
            h.combine_rows(pivot_row, i, &t);
            u.combine_rows(pivot_row, i, &t);
        }
        if h[(pivot_row, col)].is_zero() {
            continue;
        }
        if h[(pivot_row, col)].is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        let pivot = h[(pivot_row, col)].clone();
        for i in 0..pivot_row {
            let q = h[(i, col)].div_floor(&pivot);
            if !q.is_zero() {
                h.sub_row_multiple(i, pivot_row, &q);
                u.sub_row_multiple(i, pivot_row, &q);
            }
        }
        pivot_row += 1;
    }
    (h, u)
}

/// `U·M·V = D` with `D` diagonal, `d₁ | d₂ | …`, and `U`, `V` unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub d: IntegerMatrix,
    pub u: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithDecomposition {
    /// Nonzero diagonal entries, in order.
    pub fn elementary_divisors(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d[(i, i)].clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.elementary_divisors().len()
    }
}

pub fn smith_normal_form(m: &IntegerMatrix) -> SmithDecomposition {
    let (k, n) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntegerMatrix::identity(k);
    let mut v = IntegerMatrix::identity(n);
    for t in 0..k.min(n) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..k {
            for j in t..n {
                let x = &d[(i, j)];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < d[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            for i in t + 1..k {
                if !d[(i, t)].is_zero() {
                    let tr = gcd_transform(&d[(t, t)], &d[(i, t)]);
                    d.combine_rows(t, i, &tr);
                    u.combine_rows(t, i, &tr);
                }
            }
            for j in t + 1..n {
                if !d[(t, j)].is_zero() {
                    let tr = gcd_transform(&d[(t, t)], &d[(t, j)]);
                    d.combine_cols(t, j, &tr);
                    v.combine_cols(t, j, &tr);
                }
            }
            let column_clear = (t + 1..k).all(|i| d[(i, t)].is_zero());
            if !column_clear {
                continue;
            }
            let pivot = d[(t, t)].clone();
            let offender = (t + 1..k)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !d[(i, j)].is_multiple_of(&pivot));
            match offender {
                Some((i, _)) => {
                    let one = BigInt::one();
                    let zero = BigInt::zero();
                    let add = [one.clone(), one.clone(), zero, one];
                    d.combine_rows(t, i, &add);
                    u.combine_rows(t, i, &add);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithDecomposition { d, u, v }
}

/// A sublattice of `ℤⁿ`, stored by its canonical Hermite basis so that equality
/// of sublattices is equality of the stored matrices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sublattice {
    ambient: usize,
    basis: IntegerMatrix,
}

impl Sublattice {
    pub fn from_generators(ambient: usize, generators: &[IntVector]) -> Result<Self> {
        let m = IntegerMatrix::from_rows(ambient, generators)?;
        let (h, _) = hermite_normal_form(&m);
        let rows: Vec<IntVector> = (0..h.rows)
            .filter(|&i| !h.is_zero_row(i))
            .map(|i| h.row(i).to_vec())
            .collect();
        Ok(Self {
            ambient,
            basis: IntegerMatrix::from_rows(ambient, &rows)?,
        })
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            ambient,
            basis: IntegerMatrix::identity(ambient),
        }
    }

    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: IntegerMatrix::zeros(0, ambient),
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.rows
    }

    pub fn basis(&self) -> &IntegerMatrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<IntVector> {
        self.basis.row_vectors()
    }

    /// Integer coordinates of `v` in the Hermite basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<IntVector> {
        if v.len() != self.ambient {
            return None;
        }
        let mut rest: IntVector = v.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            let row = self.basis.row(i);
            let pivot_col = row.iter().position(|x| !x.is_zero())?;
            let (q, r) = rest[pivot_col].div_rem(&row[pivot_col]);
            if !r.is_zero() {
                return None;
            }
            for (x, b) in rest.iter_mut().zip(row) {
                *x -= &q * b;
            }
            coords.push(q);
        }
        rest.iter().all(Zero::is_zero).then_some(coords)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn is_subset_of(&self, other: &Sublattice) -> bool {
        self.ambient == other.ambient && (0..self.rank()).all(|i| other.contains(self.basis.row(i)))
    }

    pub fn sum(&self, other: &Sublattice) -> Sublattice {
        let mut gens = self.basis_rows();
        gens.extend(other.basis_rows());
        Sublattice::from_generators(self.ambient, &gens).expect("matching ambient ranks")
    }

    /// `⟨L⟩_ℚ ∩ ℤⁿ`.
    pub fn saturate(&self) -> Sublattice {
        if self.rank() == 0 {
            return self.clone();
        }
        let snf = smith_normal_form(&self.basis);
        let v_inv = snf
            .v
            .inverse_unimodular()
            .expect("smith transform is unimodular");
        let rows: Vec<IntVector> = (0..self.rank()).map(|i| v_inv.row(i).to_vec()).collect();
        Sublattice::from_generators(self.ambient, &rows).expect("matching ambient ranks")
    }

    pub fn is_saturated(&self) -> bool {
        self.saturate() == *self
    }
}

impl fmt::Display for Sublattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.basis)
    }
}

/// Index of one lattice in another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeIndex {
    Finite(BigInt),
    Infinite,
}

impl fmt::Display for LatticeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeIndex::Finite(k) => write!(f, "{k}"),
            LatticeIndex::Infinite => write!(f, "infinite"),
        }
    }
}

/// `[outer : inner]`, computed from the elementary divisors of the change of basis.
pub fn lattice_index(inner: &Sublattice, outer: &Sublattice) -> Result<LatticeIndex> {
    if !inner.is_subset_of(outer) {
        return Err(Error::NotContained);
    }
    if inner.rank() < outer.rank() {
        return Ok(LatticeIndex::Infinite);
    }
    let coords: Vec<IntVector> = inner
        .basis_rows()
        .iter()
        .map(|row| outer.coordinates(row).expect("containment checked"))
        .collect();
    let change = IntegerMatrix::from_rows(outer.rank(), &coords)?;
    let index = smith_normal_form(&change)
        .elementary_divisors()
        .into_iter()
        .fold(BigInt::one(), |acc, d| acc * d);
    Ok(LatticeIndex::Finite(index))
}

/// Extends a basis of a saturated sublattice to a unimodular `n×n` matrix whose
/// first `rank(L)` rows are the Hermite basis of `L`.
pub fn complete_to_basis(lattice: &Sublattice) -> Result<IntegerMatrix> {
    if !lattice.is_saturated() {
        return Err(Error::NotSaturated);
    }
    let n = lattice.ambient;
    let r = lattice.rank();
    let mut rows = lattice.basis_rows();
    if r < n {
        let w = if r == 0 {
            IntegerMatrix::identity(n)
        } else {
            smith_normal_form(&lattice.basis)
                .v
                .inverse_unimodular()
                .expect("smith transform is unimodular")
        };
        let tail: Vec<IntVector> = (r..n).map(|i| w.row(i).to_vec()).collect();
        let tail = IntegerMatrix::from_rows(n, &tail)?;
        let (h, _) = hermite_normal_form(&tail);
        rows.extend(h.row_vectors());
    }
    IntegerMatrix::from_rows(n, &rows)
}

pub fn is_primitive(v: &[BigInt]) -> Result<bool> {
    let g = content(v);
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(g.is_one())
}

/// An element of `ℚ/ℤ`, standing for the root of unity `e^{2πi r}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionValue(BigRational);

impl TorsionValue {
    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn new(numerator: i64, denominator: i64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::from_ratio(BigRational::new(
            numerator.into(),
            denominator.into(),
        )))
    }

    /// Reduces an arbitrary rational into `[0, 1)`.
    pub fn from_ratio(r: BigRational) -> Self {
        let fl = r.floor();
        Self(r - fl)
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::from_ratio(&self.0 * BigRational::from_integer(k.clone()))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(0.0)
    }

    /// `e^{2πi r}`.
    pub fn to_unit_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, std::f64::consts::TAU * self.to_f64())
    }
}

impl Add for &TorsionValue {
    type Output = TorsionValue;

    fn add(self, rhs: &TorsionValue) -> TorsionValue {
        TorsionValue::from_ratio(&self.0 + &rhs.0)
    }
}

impl Sub for &TorsionValue {
    type Output = TorsionValue;

    fn sub(self, rhs: &TorsionValue) -> TorsionValue {
        TorsionValue::from_ratio(&self.0 - &rhs.0)
    }
}

impl Neg for &TorsionValue {
    type Output = TorsionValue;

    fn neg(self) -> TorsionValue {
        TorsionValue::from_ratio(-&self.0)
    }
}

impl fmt::Display for TorsionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for TorsionValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `Σ kᵢ·rᵢ mod 1`.
pub fn pair_with(v: &[BigInt], phi: &[TorsionValue]) -> TorsionValue {
    let sum = v
        .iter()
        .zip(phi)
        .fold(BigRational::zero(), |acc, (k, r)| {
            acc + BigRational::from_integer(k.clone()) * r.as_ratio()
        });
    TorsionValue::from_ratio(sum)
}

/// Lexicographic order on torsion vectors.
pub fn cmp_torsion_vectors(a: &[TorsionValue], b: &[TorsionValue]) -> Ordering {
    a.iter().cmp(b.iter())
}

/// Solution set of `M·φ ≡ r (mod ℤ)` over `φ ∈ (ℝ/ℤ)ⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TorsionSolution {
    /// Finitely many cosets of the connected subgroup spanned by `kernel`
    /// (the integer vectors `x` with `M·x = 0`).
    Consistent {
        representatives: Vec<Vec<TorsionValue>>,
        kernel: Sublattice,
    },
    Inconsistent,
}

impl TorsionSolution {
    pub fn representatives(&self) -> &[Vec<TorsionValue>] {
        match self {
            TorsionSolution::Consistent {
                representatives, ..
            } => representatives,
            TorsionSolution::Inconsistent => &[],
        }
    }
}

pub fn solve_torsion_system(m: &IntegerMatrix, rhs: &[TorsionValue]) -> Result<TorsionSolution> {
    if rhs.len() != m.rows {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            found: rhs.len(),
        });
    }
    let n = m.cols;
    let snf = smith_normal_form(m);
    let divisors = snf.elementary_divisors();
    let rank = divisors.len();
    // c = U·r as exact rationals
    let c: Vec<BigRational> = (0..m.rows)
        .map(|i| {
            (0..m.rows).fold(BigRational::zero(), |acc, j| {
                acc + BigRational::from_integer(snf.u[(i, j)].clone()) * rhs[j].as_ratio()
            })
        })
        .collect();
    if c[rank..].iter().any(|x| !x.is_integer()) {
        return Ok(TorsionSolution::Inconsistent);
    }

    let kernel_rows: Vec<IntVector> = (rank..n).map(|j| snf.v.column(j)).collect();
    let kernel = Sublattice::from_generators(n, &kernel_rows)?;

    // ψᵢ = (cᵢ + j)/dᵢ for j in 0..dᵢ, free coordinates set to zero
    let mut psis: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n]];
    for (i, d) in divisors.iter().enumerate() {
        let d_ratio = BigRational::from_integer(d.clone());
        let count = d.to_usize().expect("elementary divisor fits in usize");
        let mut next = Vec::with_capacity(psis.len() * count);
        for psi in &psis {
            for j in 0..count {
                let mut p = psi.clone();
                p[i] = (&c[i] + BigRational::from_integer(j.into())) / &d_ratio;
                next.push(p);
            }
        }
        psis = next;
    }

    let mut representatives: Vec<Vec<TorsionValue>> = psis
        .iter()
        .map(|psi| {
            (0..n)
                .map(|row| {
                    let s = (0..n).fold(BigRational::zero(), |acc, k| {
                        acc + BigRational::from_integer(snf.v[(row, k)].clone()) * &psi[k]
                    });
                    TorsionValue::from_ratio(s)
                })
                .collect()
        })
        .collect();
    representatives.sort();
    representatives.dedup();
    Ok(TorsionSolution::Consistent {
        representatives,
        kernel,
    })
}
