//! Vectors and square matrices over a finite field.

use std::fmt;
use std::hash::{Hash, Hasher};

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::{Felt, Field};

#[derive(Clone, PartialEq, Eq)]
pub struct Vector {
    field: Field,
    coords: Vec<Felt>,
}

impl Hash for Vector {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Vector {
    pub fn new(field: &Field, coords: Vec<Felt>) -> Self {
        Vector {
            field: field.clone(),
            coords,
        }
    }

    /// Builds a vector from canonical element indices.
    pub fn from_indices(field: &Field, idx: &[usize]) -> Result<Self> {
        let coords = idx.iter().map(|&i| field.elem(i)).collect::<Result<_>>()?;
        Ok(Vector::new(field, coords))
    }

    pub fn zero(field: &Field, n: usize) -> Self {
        Vector::new(field, vec![Felt::ZERO; n])
    }

    /// The `i`-th standard basis vector (0-based).
    pub fn basis(field: &Field, n: usize, i: usize) -> Self {
        let mut v = Vector::zero(field, n);
        v.coords[i] = Felt::ONE;
        v
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Felt] {
        &self.coords
    }

    pub fn indices(&self) -> Vec<usize> {
        self.coords.iter().map(|c| c.index()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    fn check_compatible(&self, other: &Vector) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    pub fn dot(&self, other: &Vector) -> Result<Felt> {
        self.check_compatible(other)?;
        let f = &self.field;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .fold(Felt::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        self.check_compatible(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| self.field.add(a, b))
            .collect();
        Ok(Vector::new(&self.field, coords))
    }

    pub fn scale(&self, r: Felt) -> Vector {
        self.map(|c| self.field.mul(r, c))
    }

    /// Applies `f` to every coordinate.
    pub fn map(&self, f: impl Fn(Felt) -> Felt) -> Vector {
        Vector::new(&self.field, self.coords.iter().map(|&c| f(c)).collect())
    }

    /// First nonzero coordinate, with its position.
    pub fn leading(&self) -> Option<(usize, Felt)> {
        self.coords
            .iter()
            .copied()
            .enumerate()
            .find(|(_, c)| !c.is_zero())
    }

    /// The scalar multiple of `self` whose first nonzero coordinate is 1.
    pub fn monic_rep(&self) -> Result<Vector> {
        let (_, lead) = self.leading().ok_or(Error::ZeroVector)?;
        Ok(self.scale(self.field.inv(lead)?))
    }

    pub fn is_monic(&self) -> bool {
        matches!(self.leading(), Some((_, c)) if c == Felt::ONE)
    }
}

/// Dense square-or-rectangular matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<Felt>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn new(field: &Field, rows: usize, cols: usize, entries: Vec<Felt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(entries.len(), rows * cols));
        }
        Ok(Matrix {
            field: field.clone(),
            rows,
            cols,
            entries,
        })
    }

    pub fn from_indices(field: &Field, rows: usize, cols: usize, idx: &[usize]) -> Result<Self> {
        let entries = idx.iter().map(|&i| field.elem(i)).collect::<Result<_>>()?;
        Matrix::new(field, rows, cols, entries)
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        Matrix::diag(field, &vec![Felt::ONE; n])
    }

    pub fn diag(field: &Field, d: &[Felt]) -> Self {
        let n = d.len();
        let mut entries = vec![Felt::ZERO; n * n];
        for (i, &x) in d.iter().enumerate() {
            entries[i * n + i] = x;
        }
        Matrix {
            field: field.clone(),
            rows: n,
            cols: n,
            entries,
        }
    }

    /// The matrix whose `i`-th column is `cols[i]`.
    pub fn from_columns(cols: &[Vector]) -> Result<Self> {
        let first = cols
            .first()
            .ok_or_else(|| Error::Invalid("no columns".into()))?;
        let (n, field) = (first.dim(), first.field().clone());
        let mut entries = vec![Felt::ZERO; n * cols.len()];
        for (j, c) in cols.iter().enumerate() {
            first.check_compatible(c)?;
            for (i, &x) in c.coords().iter().enumerate() {
                entries[i * cols.len() + j] = x;
            }
        }
        Matrix::new(&field, n, cols.len(), entries)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Felt {
        self.entries[r * self.cols + c]
    }

    pub fn entries(&self) -> &[Felt] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> Vector {
        Vector::new(
            &self.field,
            self.entries[r * self.cols..(r + 1) * self.cols].to_vec(),
        )
    }

    pub fn column(&self, c: usize) -> Vector {
        Vector::new(
            &self.field,
            (0..self.rows).map(|r| self.get(r, c)).collect(),
        )
    }

    pub fn transpose(&self) -> Matrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.get(r, c));
            }
        }
        Matrix {
            field: self.field.clone(),
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn mul_vec(&self, v: &Vector) -> Result<Vector> {
        if self.field != *v.field() {
            return Err(Error::FieldMismatch);
        }
        if self.cols != v.dim() {
            return Err(Error::DimensionMismatch(self.cols, v.dim()));
        }
        let f = &self.field;
        let coords = (0..self.rows)
            .map(|r| {
                (0..self.cols).fold(Felt::ZERO, |acc, c| {
                    f.add(acc, f.mul(self.get(r, c), v.coords[c]))
                })
            })
            .collect();
        Ok(Vector::new(f, coords))
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(self.cols, other.rows));
        }
        let f = &self.field;
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                entries.push((0..self.cols).fold(Felt::ZERO, |acc, i| {
                    f.add(acc, f.mul(self.get(r, i), other.get(i, c)))
                }));
            }
        }
        Matrix::new(f, self.rows, other.cols, entries)
    }

    /// Applies `f` to every entry.
    pub fn map(&self, f: impl Fn(Felt) -> Felt) -> Matrix {
        Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Gauss-Jordan inversion.
    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(self.rows, self.cols));
        }
        let n = self.rows;
        let f = &self.field;
        let mut a: Vec<Vec<Felt>> = (0..n).map(|r| self.row(r).coords).collect();
        let mut inv: Vec<Vec<Felt>> = (0..n).map(|r| Vector::basis(f, n, r).coords).collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .ok_or(Error::Singular)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let s = f.inv(a[col][col])?;
            for x in a[col].iter_mut().chain(inv[col].iter_mut()) {
                *x = f.mul(s, *x);
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let m = a[r][col];
                for c in 0..n {
                    a[r][c] = f.sub(a[r][c], f.mul(m, a[col][c]));
                    inv[r][c] = f.sub(inv[r][c], f.mul(m, inv[col][c]));
                }
            }
        }
        Matrix::new(f, n, n, inv.into_iter().flatten().collect())
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols
            && rank(&(0..self.rows).map(|r| self.row(r)).collect::<Vec<_>>()) == self.rows
    }

    /// Uniformly random invertible `n x n` matrix, by rejection sampling.
    pub fn random_invertible<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Matrix {
        loop {
            let entries = (0..n * n)
                .map(|_| Felt::from_index_unchecked(rng.gen_range(0..field.q())))
                .collect();
            let m = Matrix {
                field: field.clone(),
                rows: n,
                cols: n,
                entries,
            };
            if m.is_invertible() {
                return m;
            }
        }
    }
}

/// Reduced row echelon form of a list of row vectors.
#[derive(Clone, Debug)]
pub struct Rref {
    /// Nonzero rows of the reduced form.
    pub basis: Vec<Vector>,
    /// Pivot column of each basis row.
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

pub fn rref(rows: &[Vector]) -> Result<Rref> {
    let Some(first) = rows.first() else {
        return Ok(Rref {
            basis: vec![],
            pivots: vec![],
        });
    };
    for r in rows {
        first.check_compatible(r)?;
    }
    let f = first.field().clone();
    let n = first.dim();
    let mut m: Vec<Vec<Felt>> = rows.iter().map(|r| r.coords.clone()).collect();
    let mut pivots = vec![];
    let mut top = 0;
    for col in 0..n {
        let Some(p) = (top..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(top, p);
        let s = f.inv(m[top][col])?;
        for x in m[top].iter_mut() {
            *x = f.mul(s, *x);
        }
        let pivot = m[top].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != top && !row[col].is_zero() {
                let k = row[col];
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x = f.sub(*x, f.mul(k, y));
                }
            }
        }
        pivots.push(col);
        top += 1;
        if top == m.len() {
            break;
        }
    }
    m.truncate(top);
    Ok(Rref {
        basis: m.into_iter().map(|c| Vector::new(&f, c)).collect(),
        pivots,
    })
}

pub fn rank(rows: &[Vector]) -> usize {
    rref(rows).map(|r| r.rank()).unwrap_or(0)
}

/// Basis of `{x : r . x = 0 for every row r}`, each vector monic.
pub fn nullspace(rows: &[Vector], n: usize, field: &Field) -> Result<Vec<Vector>> {
    let red = rref(rows)?;
    let mut out = vec![];
    for free in (0..n).filter(|c| !red.pivots.contains(c)) {
        let mut x = Vector::basis(field, n, free);
        for (row, &p) in red.basis.iter().zip(&red.pivots) {
            x.coords[p] = field.neg(row.coords[free]);
        }
        out.push(x.monic_rep()?);
    }
    Ok(out)
}

/// Basis of the kernel of the functional `x -> u . x`, an (n-1)-dimensional
/// subspace for `u != 0`.
pub fn kernel_basis(u: &Vector) -> Result<Vec<Vector>> {
    if u.is_zero() {
        return Err(Error::ZeroVector);
    }
    nullspace(std::slice::from_ref(u), u.dim(), u.field())
}

/// Every vector in the span of `gens` (including zero), without repeats.
pub fn span(gens: &[Vector], field: &Field, n: usize) -> Vec<Vector> {
    let mut out = vec![Vector::zero(field, n)];
    for g in gens {
        let mut next = Vec::with_capacity(out.len() * field.q());
        for v in &out {
            for r in field.elements() {
                next.push(v.add(&g.scale(r)).expect("same space"));
            }
        }
        next.sort_by(|a, b| a.coords.cmp(&b.coords));
        next.dedup();
        out = next;
    }
    out
}

/// Every nonzero vector of `F_q^n` in lexicographic order of coordinates.
pub fn nonzero_vectors(field: &Field, n: usize) -> impl Iterator<Item = Vector> + '_ {
    let q = field.q();
    let total = q.pow(n as u32);
    (1..total).map(move |mut code| {
        let mut coords = vec![Felt::ZERO; n];
        for slot in coords.iter_mut().rev() {
            *slot = Felt::from_index_unchecked(code % q);
            code /= q;
        }
        Vector::new(field, coords)
    })
}
