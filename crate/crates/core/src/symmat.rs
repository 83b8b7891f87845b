//! Matrices over the polynomial ring, generic matrices and the determinant
//! families used to describe the Gröbner bases of the two-sided modules.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm;
use crate::poly::{rat, ModuleElement, Poly, Rational};

/// Dense `rows × cols` matrix with polynomial entries, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            data: vec![Poly::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        PolyMatrix::scalar(n, &Poly::one())
    }

    pub fn scalar(n: usize, p: &Poly) -> Self {
        let mut out = PolyMatrix::zeros(n, n);
        for i in 0..n {
            out.set(i, i, p.clone());
        }
        out
    }

    /// The matrix unit `e_{ij}` (1-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut out = PolyMatrix::zeros(n, n);
        out.set(i - 1, j - 1, Poly::one());
        out
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(PolyMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_rationals(rows: &[Vec<Rational>]) -> Result<Self> {
        PolyMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().cloned().map(Poly::constant).collect())
                .collect(),
        )
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        PolyMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Poly::int(v)).collect())
                .collect(),
        )
        .expect("rectangular literal")
    }

    /// The generic `n × n` matrix `X_k = (x_{ij}^{(k)})`.
    pub fn generic(k: usize, n: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::OutOfBounds(format!(
                "matrix index k={k} must be ≥ 1"
            )));
        }
        Ok(PolyMatrix::generic_rect(k, n, n))
    }

    /// Rectangular generic matrix with entries `x_{ij}^{(k)}`.
    pub fn generic_rect(k: usize, rows: usize, cols: usize) -> Self {
        let mut out = PolyMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, Poly::x(k, i + 1, j + 1));
            }
        }
        out
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// 0-based access.
    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Poly {
        &mut self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        self.data[i * self.cols + j] = p;
    }

    pub fn row(&self, i: usize) -> &[Poly] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Poly>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn row_elements(&self) -> Vec<ModuleElement> {
        (0..self.rows)
            .map(|i| ModuleElement::new(self.row(i).to_vec()))
            .collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Poly> {
        self.data.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Poly::is_zero)
    }

    /// `Some(c)` if the matrix is `c·1`.
    pub fn as_scalar(&self) -> Option<Poly> {
        if !self.is_square() {
            return None;
        }
        let c = if self.rows == 0 {
            Poly::zero()
        } else {
            self.get(0, 0).clone()
        };
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j);
                let ok = if i == j { *e == c } else { e.is_zero() };
                if !ok {
                    return None;
                }
            }
        }
        Some(c)
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> PolyMatrix {
        self.map(|p| p.scale(c))
    }

    pub fn scale_poly(&self, f: &Poly) -> PolyMatrix {
        self.map(|p| p * f)
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn trace(&self) -> Poly {
        let mut t = Poly::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self.get(i, i);
        }
        t
    }

    pub fn checked_mul(&self, rhs: &PolyMatrix) -> Result<PolyMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = PolyMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(t, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a * b;
                    *out.get_mut(i, j) += &prod;
                }
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, rhs: &PolyMatrix) -> Result<PolyMatrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn checked_sub(&self, rhs: &PolyMatrix) -> Result<PolyMatrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &PolyMatrix, f: impl Fn(&Poly, &Poly) -> Poly) -> Result<PolyMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add_assign(&mut self, rhs: &PolyMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }

    pub fn sub_assign(&mut self, rhs: &PolyMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }

    pub fn neg(&self) -> PolyMatrix {
        self.map(|p| -p)
    }

    /// Rows and columns are 0-based index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn substitute(&self, f: &dyn Fn(crate::poly::VarId) -> Option<Poly>) -> PolyMatrix {
        self.map(|p| p.substitute(f))
    }

    /// Exact determinant. The empty matrix has determinant 1.
    pub fn det(&self) -> Result<Poly> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        if self.rows <= 4 {
            Ok(self.det_leibniz())
        } else {
            Ok(self.det_bareiss())
        }
    }

    /// Permutation expansion.
    pub fn det_leibniz(&self) -> Poly {
        assert!(self.is_square());
        let n = self.rows;
        let mut out = Poly::zero();
        'perms: for p in perm::permutations(n) {
            let mut term = Poly::int(perm::sign(&p));
            for (i, &j) in p.iter().enumerate() {
                let e = self.get(i, j);
                if e.is_zero() {
                    continue 'perms;
                }
                term = &term * e;
            }
            out += &term;
        }
        out
    }

    /// Fraction-free elimination with exact polynomial division.
    pub fn det_bareiss(&self) -> Poly {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return Poly::one();
        }
        let mut a = self.to_rows();
        let mut sign = 1i64;
        let mut prev = Poly::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Poly::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                    let (q, r) = num.div_rem(&prev);
                    debug_assert!(r.is_zero(), "Bareiss division must be exact");
                    a[i][j] = q;
                }
            }
            prev = a[k][k].clone();
        }
        a[n - 1][n - 1].scale(&rat(sign))
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

impl Serialize for PolyMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Poly>>::deserialize(d)?;
        PolyMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// `[(i_1, j_1), …, (i_n, j_n)]`: determinant of the matrix whose `ℓ`-th row
/// is row `j_ℓ` of the generic matrix `X_{i_ℓ}`. Indices are 1-based.
pub fn bracket_det(spec: &[(usize, usize)], n: usize) -> Result<Poly> {
    if spec.len() != n {
        return Err(Error::Dimension(format!(
            "bracket of length {} for n={n}",
            spec.len()
        )));
    }
    let mut rows = Vec::with_capacity(n);
    for &(k, j) in spec {
        if k == 0 || j == 0 || j > n {
            return Err(Error::OutOfBounds(format!("row ({k}, {j}) with n={n}")));
        }
        rows.push((1..=n).map(|c| Poly::x(k, j, c)).collect());
    }
    PolyMatrix::from_rows(rows)?.det()
}

/// `D_{j_1…j_n}`: row `ℓ` is row `j_ℓ` of `X_ℓ`.
pub fn d_det(js: &[usize], n: usize) -> Result<Poly> {
    let spec: Vec<(usize, usize)> = js.iter().enumerate().map(|(l, &j)| (l + 1, j)).collect();
    bracket_det(&spec, n)
}

/// Index data for the determinant families `D^c`, `D^r`, `d^c`, `d^r`.
///
/// `k_set = {k_1 < … < k_a}` carries the row tuple `v`, `l_set = {l_1 < … < l_b}`
/// carries the column tuple `s`. `Q = K ∩ L = {q_1 < … < q_c}` with
/// `q_ℓ = k_{d_ℓ} = l_{f_ℓ}`. Permutations `σ ∈ Sym U^c`, `τ ∈ Sym W^c` are
/// passed as explicit image lists: `sigma[ℓ] = σ(u'_ℓ)` and `tau[ℓ] = τ(w'_ℓ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetFamilySpec {
    pub n: usize,
    pub k_set: Vec<usize>,
    pub l_set: Vec<usize>,
    pub v: Vec<usize>,
    pub s: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetFamily {
    /// `D^c_λ(Q_σ, L_S∖Q)`: full `b × b` determinant of `Y`.
    Dc,
    /// `D^r_λ(Q_τ, K_V∖Q)`: full `a × a` determinant of `Z`.
    Dr,
    /// `d^c_{λ,W^c}(Q_σ)`: rows `selection` of `Y`, columns `f_1…f_c`.
    DcQ,
    /// `d^c_{λ,W}(L_S∖Q)`: rows `selection` of `Y`, the remaining columns.
    DcRest,
    /// `d^r_{λ,U^c}(Q_τ)`: rows `d_1…d_c` of `Z`, columns `selection`.
    DrQ,
    /// `d^r_{λ,U}(K_V∖Q)`: remaining rows of `Z`, columns `selection`.
    DrRest,
}

impl DetFamilySpec {
    pub fn new(
        n: usize,
        k_set: Vec<usize>,
        l_set: Vec<usize>,
        v: Vec<usize>,
        s: Vec<usize>,
    ) -> Result<Self> {
        let spec = DetFamilySpec {
            n,
            k_set,
            l_set,
            v,
            s,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let strictly_sorted = |xs: &[usize]| xs.windows(2).all(|w| w[0] < w[1]);
        if !strictly_sorted(&self.k_set) || !strictly_sorted(&self.l_set) {
            return Err(Error::Malformed(
                "K and L must be strictly increasing".into(),
            ));
        }
        if self.k_set.contains(&0) || self.l_set.contains(&0) {
            return Err(Error::Malformed("matrix indices are 1-based".into()));
        }
        if self.v.len() != self.k_set.len() || self.s.len() != self.l_set.len() {
            return Err(Error::Malformed(
                "|V| must equal |K| and |S| must equal |L|".into(),
            ));
        }
        if self.k_set.len() > self.n || self.l_set.len() > self.n {
            return Err(Error::Malformed("|K|, |L| must not exceed n".into()));
        }
        if self.v.iter().chain(&self.s).any(|&x| x == 0 || x > self.n) {
            return Err(Error::OutOfBounds("V, S entries must lie in 1..=n".into()));
        }
        Ok(())
    }

    pub fn a(&self) -> usize {
        self.k_set.len()
    }

    pub fn b(&self) -> usize {
        self.l_set.len()
    }

    pub fn q(&self) -> Vec<usize> {
        self.k_set
            .iter()
            .copied()
            .filter(|k| self.l_set.contains(k))
            .collect()
    }

    pub fn c(&self) -> usize {
        self.q().len()
    }

    /// 1-based positions `d_ℓ` of `q_ℓ` inside `K`.
    pub fn d(&self) -> Vec<usize> {
        self.q()
            .iter()
            .map(|q| self.k_set.iter().position(|k| k == q).unwrap() + 1)
            .collect()
    }

    /// 1-based positions `f_ℓ` of `q_ℓ` inside `L`.
    pub fn f(&self) -> Vec<usize> {
        self.q()
            .iter()
            .map(|q| self.l_set.iter().position(|l| l == q).unwrap() + 1)
            .collect()
    }

    fn check_images(&self, images: &[usize], lambda: usize) -> Result<()> {
        if images.len() != self.c() {
            return Err(Error::Malformed(format!(
                "permutation has {} images, expected c={}",
                images.len(),
                self.c()
            )));
        }
        if images
            .iter()
            .chain([&lambda])
            .any(|&x| x == 0 || x > self.n)
        {
            return Err(Error::OutOfBounds("index outside 1..=n".into()));
        }
        Ok(())
    }

    /// The `b × b` matrix `Y`; the last row uses row index `λ`.
    pub fn y_matrix(&self, sigma: &[usize], lambda: usize) -> Result<PolyMatrix> {
        self.check_images(sigma, lambda)?;
        let b = self.b();
        let q = self.q();
        let f = self.f();
        let mut y = PolyMatrix::zeros(b, b);
        for col in 1..=b {
            let (group, column) = match f.iter().position(|&fl| fl == col) {
                Some(l) => (q[l], sigma[l]),
                None => (self.l_set[col - 1], self.s[col - 1]),
            };
            for row in 1..=b {
                let r = if row == b { lambda } else { row };
                y.set(row - 1, col - 1, Poly::x(group, r, column));
            }
        }
        Ok(y)
    }

    /// The `a × a` matrix `Z`; the last column uses column index `λ`.
    pub fn z_matrix(&self, tau: &[usize], lambda: usize) -> Result<PolyMatrix> {
        self.check_images(tau, lambda)?;
        let a = self.a();
        let q = self.q();
        let d = self.d();
        let mut z = PolyMatrix::zeros(a, a);
        for row in 1..=a {
            let (group, r) = match d.iter().position(|&dl| dl == row) {
                Some(l) => (q[l], tau[l]),
                None => (self.k_set[row - 1], self.v[row - 1]),
            };
            for col in 1..=a {
                let c = if col == a { lambda } else { col };
                z.set(row - 1, col - 1, Poly::x(group, r, c));
            }
        }
        Ok(z)
    }

    /// Determinants of `Y`, `Z` and their distinguished submatrices.
    /// `perm` holds the images of `σ` (for `Y`) or `τ` (for `Z`);
    /// `selection` is the 1-based row set (`Y` families) or column set
    /// (`Z` families) used by the `d` variants.
    pub fn det_family(
        &self,
        which: DetFamily,
        perm: &[usize],
        lambda: usize,
        selection: &[usize],
    ) -> Result<Poly> {
        let zero_based = |xs: &[usize]| xs.iter().map(|x| x - 1).collect::<Vec<_>>();
        let check_sel = |bound: usize, len: usize| -> Result<()> {
            if selection.len() != len || selection.iter().any(|&x| x == 0 || x > bound) {
                return Err(Error::Malformed(format!(
                    "selection {selection:?} must have {len} entries in 1..={bound}"
                )));
            }
            Ok(())
        };
        match which {
            DetFamily::Dc => self.y_matrix(perm, lambda)?.det(),
            DetFamily::Dr => self.z_matrix(perm, lambda)?.det(),
            DetFamily::DcQ | DetFamily::DcRest => {
                let y = self.y_matrix(perm, lambda)?;
                let f = self.f();
                let cols: Vec<usize> = if which == DetFamily::DcQ {
                    f.clone()
                } else {
                    (1..=self.b()).filter(|c| !f.contains(c)).collect()
                };
                check_sel(self.b(), cols.len())?;
                y.submatrix(&zero_based(selection), &zero_based(&cols))
                    .det()
            }
            DetFamily::DrQ | DetFamily::DrRest => {
                let z = self.z_matrix(perm, lambda)?;
                let d = self.d();
                let rows: Vec<usize> = if which == DetFamily::DrQ {
                    d.clone()
                } else {
                    (1..=self.a()).filter(|r| !d.contains(r)).collect()
                };
                check_sel(self.a(), rows.len())?;
                z.submatrix(&zero_based(&rows), &zero_based(selection))
                    .det()
            }
        }
    }
}

/// `X'_k` (block diagonal with `n` copies of `X_k`) and `X''_k`, whose row
/// `(i-1)n + t` carries `x_{γ i}^{(k)}` in column `(γ-1)n + t`.
pub fn kron_blocks(k: usize, n: usize) -> Result<(PolyMatrix, PolyMatrix)> {
    if k == 0 {
        return Err(Error::OutOfBounds("matrix index must be ≥ 1".into()));
    }
    let nn = n * n;
    let mut xp = PolyMatrix::zeros(nn, nn);
    let mut xpp = PolyMatrix::zeros(nn, nn);
    for g in 1..=n {
        for j in 1..=n {
            for d in 1..=n {
                xp.set((g - 1) * n + j - 1, (g - 1) * n + d - 1, Poly::x(k, j, d));
            }
        }
    }
    for i in 1..=n {
        for t in 1..=n {
            for g in 1..=n {
                xpp.set((i - 1) * n + t - 1, (g - 1) * n + t - 1, Poly::x(k, g, i));
            }
        }
    }
    Ok((xp, xpp))
}

/// `Ξ^{(KL)}`: the `X'_k` for `k ∈ K` stacked above the `X''_l` for `l ∈ L`.
pub fn build_xi(k_set: &[usize], l_set: &[usize], n: usize) -> Result<PolyMatrix> {
    let mut rows = Vec::new();
    for &k in k_set {
        rows.extend(kron_blocks(k, n)?.0.to_rows());
    }
    for &l in l_set {
        rows.extend(kron_blocks(l, n)?.1.to_rows());
    }
    if rows.is_empty() {
        return Ok(PolyMatrix::zeros(0, n * n));
    }
    PolyMatrix::from_rows(rows)
}

/// Matrix with rational entries as a constant polynomial matrix.
pub fn constant_matrix(rows: &[Vec<Rational>]) -> Result<PolyMatrix> {
    PolyMatrix::from_rationals(rows)
}

/// `Some(rational entries)` if every entry is constant.
pub fn as_rational_matrix(m: &PolyMatrix) -> Option<Vec<Vec<Rational>>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m.get(i, j).as_constant()).collect())
        .collect()
}

pub fn rational_identity(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect()
}
