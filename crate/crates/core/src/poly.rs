//! Sparse multivariate polynomials over ℚ in the variables `x_{ij}^{(k)}`,
//! together with the term orders used by the Gröbner engine.
//!
//! Variable order: `x_{i1 j1}^{(k1)} > x_{i2 j2}^{(k2)}` iff
//! `(k1, i1, j1) < (k2, i2, j2)` lexicographically. Monomials are compared
//! lexicographically with respect to that variable order. Module terms
//! `p·u_a` are compared position-first (smaller position is greater), then by
//! monomial.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The indeterminate `x_{ij}^{(k)}`: entry `(i, j)` of the generic matrix `X_k`.
/// All indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId {
    pub k: u16,
    pub i: u16,
    pub j: u16,
}

impl VarId {
    pub fn new(k: usize, i: usize, j: usize) -> Self {
        VarId {
            k: k as u16,
            i: i as u16,
            j: j as u16,
        }
    }

    pub fn check_bounds(&self, n: usize, m: usize) -> Result<()> {
        let ok = (1..=m).contains(&(self.k as usize))
            && (1..=n).contains(&(self.i as usize))
            && (1..=n).contains(&(self.j as usize));
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfBounds(format!("{self} with n={n}, m={m}")))
        }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}_{}{}", self.k, self.i, self.j)
    }
}

/// Variable order. Note the inversion: the smaller index triple is the larger variable.
pub fn var_cmp(a: &VarId, b: &VarId) -> Ordering {
    b.cmp(a)
}

/// A power product, stored as `(variable, exponent)` pairs sorted by index
/// triple with no zero exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: Vec<(VarId, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: VarId) -> Self {
        Monomial {
            factors: vec![(v, 1)],
        }
    }

    pub fn from_factors(mut factors: Vec<(VarId, u32)>) -> Self {
        factors.retain(|&(_, e)| e > 0);
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(VarId, u32)> = Vec::with_capacity(factors.len());
        for (v, e) in factors {
            match merged.last_mut() {
                Some((w, f)) if *w == v => *f += e,
                _ => merged.push((v, e)),
            }
        }
        Monomial { factors: merged }
    }

    pub fn factors(&self) -> &[(VarId, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: &VarId) -> u32 {
        self.factors
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|idx| self.factors[idx].1)
            .unwrap_or(0)
    }

    /// Total degree in the variables of the generic matrix `X_k`.
    pub fn group_degree(&self, k: u16) -> u32 {
        self.factors
            .iter()
            .filter(|(v, _)| v.k == k)
            .map(|&(_, e)| e)
            .sum()
    }

    /// `k ↦ degree in X_k`, sorted by `k`.
    pub fn multidegree(&self) -> BTreeMap<u16, u32> {
        let mut out = BTreeMap::new();
        for &(v, e) in &self.factors {
            *out.entry(v.k).or_insert(0) += e;
        }
        out
    }

    pub fn groups(&self) -> BTreeSet<u16> {
        self.factors.iter().map(|(v, _)| v.k).collect()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.factors, &other.factors);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut p, mut q) = (0, 0);
        while p < a.len() && q < b.len() {
            match a[p].0.cmp(&b[q].0) {
                Ordering::Less => {
                    out.push(a[p]);
                    p += 1;
                }
                Ordering::Greater => {
                    out.push(b[q]);
                    q += 1;
                }
                Ordering::Equal => {
                    out.push((a[p].0, a[p].1 + b[q].1));
                    p += 1;
                    q += 1;
                }
            }
        }
        out.extend_from_slice(&a[p..]);
        out.extend_from_slice(&b[q..]);
        Monomial { factors: out }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        let b = &other.factors;
        let mut q = 0;
        for &(v, e) in &self.factors {
            while q < b.len() && b[q].0 < v {
                q += 1;
            }
            if q == b.len() || b[q].0 != v || b[q].1 < e {
                return false;
            }
        }
        true
    }

    /// `other / self`, if `self` divides `other`.
    pub fn divide_into(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        let mut out = Vec::with_capacity(other.factors.len());
        for &(v, e) in &other.factors {
            let d = e - self.exponent(&v);
            if d > 0 {
                out.push((v, d));
            }
        }
        Some(Monomial { factors: out })
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        self.merge_with(other, u32::max)
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        self.merge_with(other, u32::min)
    }

    fn merge_with(&self, other: &Monomial, f: impl Fn(u32, u32) -> u32) -> Monomial {
        let mut vars: BTreeSet<VarId> = self.factors.iter().map(|(v, _)| *v).collect();
        vars.extend(other.factors.iter().map(|(v, _)| *v));
        let factors = vars
            .into_iter()
            .map(|v| (v, f(self.exponent(&v), other.exponent(&v))))
            .filter(|&(_, e)| e > 0)
            .collect();
        Monomial { factors }
    }

    pub fn map_vars(&self, f: impl Fn(VarId) -> VarId) -> Monomial {
        Monomial::from_factors(self.factors.iter().map(|&(v, e)| (f(v), e)).collect())
    }
}

/// Lexicographic monomial order induced by [`var_cmp`].
pub fn mono_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    let (x, y) = (&a.factors, &b.factors);
    let mut p = 0;
    loop {
        match (x.get(p), y.get(p)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some(&(va, ea)), Some(&(vb, eb))) => {
                if va != vb {
                    // The side holding the smaller triple carries a larger
                    // variable that the other side lacks.
                    return if va < vb {
                        Ordering::Greater
                    } else {
                        Ordering::Less
                    };
                }
                if ea != eb {
                    return ea.cmp(&eb);
                }
                p += 1;
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        mono_cmp(self, other)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (idx, (v, e)) in self.factors.iter().enumerate() {
            if idx > 0 {
                write!(f, "*")?;
            }
            write!(f, "{v}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Exact polynomial: monomial → nonzero rational coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::monomial(Monomial::one(), c)
    }

    pub fn int(c: i64) -> Self {
        Poly::constant(rat(c))
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn var(v: VarId) -> Self {
        Poly::monomial(Monomial::var(v), Rational::one())
    }

    /// Shorthand for the single variable `x_{ij}^{(k)}`.
    pub fn x(k: usize, i: usize, j: usize) -> Self {
        Poly::var(VarId::new(k, i, j))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The constant term, or `None` if the polynomial is not a constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(n, d)| (n.mul(m), d * c)).collect(),
        }
    }

    /// `self += c·m·other`.
    pub fn add_scaled_term(&mut self, other: &Poly, m: &Monomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (n, d) in &other.terms {
            self.add_term(n.mul(m), d * c);
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous_of_degree(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    /// Union of the variable groups `k` appearing in any term.
    pub fn groups(&self) -> BTreeSet<u16> {
        self.terms.keys().flat_map(|m| m.groups()).collect()
    }

    /// True iff every term has, for each `k` in `groups`, exactly one variable
    /// of `X_k` to the first power, and no variables outside `groups`.
    /// The zero polynomial is not multilinear.
    pub fn is_multilinear(&self, groups: &BTreeSet<u16>) -> bool {
        !self.is_zero()
            && self.terms.keys().all(|m| {
                m.factors()
                    .iter()
                    .all(|(v, e)| *e == 1 && groups.contains(&v.k))
                    && groups.iter().all(|&k| m.group_degree(k) == 1)
            })
    }

    /// Ring homomorphism fixing ℚ and sending each variable to `f(v)`
    /// (or to itself when `f` returns `None`).
    pub fn substitute(&self, f: &dyn Fn(VarId) -> Option<Poly>) -> Poly {
        let mut cache: BTreeMap<VarId, Poly> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut acc = Poly::constant(c.clone());
            for &(v, e) in m.factors() {
                let img = cache
                    .entry(v)
                    .or_insert_with(|| f(v).unwrap_or_else(|| Poly::var(v)))
                    .clone();
                acc = &acc * &img.pow(e);
                if acc.is_zero() {
                    break;
                }
            }
            out += &acc;
        }
        out
    }

    /// Substitute rationals for variables; unmapped variables are kept.
    pub fn substitute_values(&self, f: &dyn Fn(VarId) -> Option<Rational>) -> Poly {
        self.substitute(&|v| f(v).map(Poly::constant))
    }

    pub fn map_vars(&self, f: impl Fn(VarId) -> VarId) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.map_vars(&f), c.clone())))
    }

    /// Division by a single nonzero polynomial with respect to the term order.
    /// Returns `(quotient, remainder)`; the remainder is the unique normal
    /// form modulo the principal ideal.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let (lm, lc) = divisor
            .leading_term()
            .map(|(m, c)| (m.clone(), c.clone()))
            .expect("division by zero polynomial");
        let mut rest = self.clone();
        let mut quo = Poly::zero();
        let mut rem = Poly::zero();
        while let Some((m, c)) = rest.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            match lm.divide_into(&m) {
                Some(t) => {
                    let q = &c / &lc;
                    rest.add_scaled_term(divisor, &t, &-q.clone());
                    quo.add_term(t, q);
                }
                None => {
                    rest.terms.remove(&m);
                    rem.add_term(m, c);
                }
            }
        }
        (quo, rem)
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_scaled_term(rhs, m, c);
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

/// Serialized term: `{coeff: "p/q", vars: [[k, i, j, exp], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermRepr {
    pub coeff: String,
    pub vars: Vec<[u32; 4]>,
}

impl Poly {
    /// Canonical serialized form, terms descending in the monomial order.
    pub fn to_repr(&self) -> Vec<TermRepr> {
        self.terms
            .iter()
            .rev()
            .map(|(m, c)| TermRepr {
                coeff: c.to_string(),
                vars: m
                    .factors()
                    .iter()
                    .map(|&(v, e)| [v.k as u32, v.i as u32, v.j as u32, e])
                    .collect(),
            })
            .collect()
    }

    pub fn from_repr(repr: &[TermRepr]) -> Result<Poly> {
        let mut p = Poly::zero();
        for t in repr {
            let c = parse_rational(&t.coeff)?;
            let mut factors = Vec::with_capacity(t.vars.len());
            for &[k, i, j, e] in &t.vars {
                if k == 0 || i == 0 || j == 0 {
                    return Err(Error::Malformed(format!(
                        "variable indices are 1-based, got [{k}, {i}, {j}]"
                    )));
                }
                factors.push((VarId::new(k as usize, i as usize, j as usize), e));
            }
            p.add_term(Monomial::from_factors(factors), c);
        }
        Ok(p)
    }
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_repr().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = Vec::<TermRepr>::deserialize(d)?;
        Poly::from_repr(&repr).map_err(serde::de::Error::custom)
    }
}

/// Parses `"p/q"` or `"p"`; decimals are rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.contains('.') || s.contains('e') || s.contains('E') {
        return Err(Error::Malformed(format!("rational must be p/q, got {s:?}")));
    }
    let r: Rational = s
        .parse()
        .map_err(|_| Error::Malformed(format!("bad rational {s:?}")))?;
    Ok(r)
}

/// A term `c·m·u_pos` of a free module (0-based position).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleTerm {
    pub position: usize,
    pub monomial: Monomial,
    pub coefficient: Rational,
}

/// Position-over-term order: the smaller position is the greater term; on equal
/// positions the larger monomial wins. Coefficients are ignored.
pub fn module_term_cmp(a: &ModuleTerm, b: &ModuleTerm) -> Ordering {
    position_term_cmp(a.position, &a.monomial, b.position, &b.monomial)
}

pub fn position_term_cmp(pa: usize, ma: &Monomial, pb: usize, mb: &Monomial) -> Ordering {
    match pb.cmp(&pa) {
        Ordering::Equal => mono_cmp(ma, mb),
        ord => ord,
    }
}

/// Element of the free module `C^r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModuleElement {
    pub components: Vec<Poly>,
}

impl ModuleElement {
    pub fn zero(rank: usize) -> Self {
        ModuleElement {
            components: vec![Poly::zero(); rank],
        }
    }

    pub fn new(components: Vec<Poly>) -> Self {
        ModuleElement { components }
    }

    pub fn unit(rank: usize, pos: usize, p: Poly) -> Self {
        let mut e = ModuleElement::zero(rank);
        e.components[pos] = p;
        e
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    pub fn leading_term(&self) -> Option<ModuleTerm> {
        self.components.iter().enumerate().find_map(|(pos, p)| {
            p.leading_term().map(|(m, c)| ModuleTerm {
                position: pos,
                monomial: m.clone(),
                coefficient: c.clone(),
            })
        })
    }

    pub fn scale(&self, c: &Rational) -> ModuleElement {
        ModuleElement::new(self.components.iter().map(|p| p.scale(c)).collect())
    }

    pub fn mul_poly(&self, f: &Poly) -> ModuleElement {
        ModuleElement::new(self.components.iter().map(|p| p * f).collect())
    }

    pub fn add_scaled_term(&mut self, other: &ModuleElement, m: &Monomial, c: &Rational) {
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            a.add_scaled_term(b, m, c);
        }
    }

    pub fn add_assign(&mut self, other: &ModuleElement) {
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            *a += b;
        }
    }

    pub fn sub_assign(&mut self, other: &ModuleElement) {
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            *a -= b;
        }
    }

    /// Dot product with the columns of a matrix given as rows
    /// (`Σ_i f_i · rows[i]`).
    pub fn combine_rows(coeffs: &[Poly], rows: &[ModuleElement]) -> ModuleElement {
        let rank = rows.first().map(ModuleElement::rank).unwrap_or(0);
        let mut out = ModuleElement::zero(rank);
        for (f, row) in coeffs.iter().zip(rows) {
            if f.is_zero() {
                continue;
            }
            for (a, b) in out.components.iter_mut().zip(&row.components) {
                *a += &(f * b);
            }
        }
        out
    }

    pub fn groups(&self) -> BTreeSet<u16> {
        self.components.iter().flat_map(Poly::groups).collect()
    }
}

impl fmt::Display for ModuleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (pos, p) in self.components.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({p})u{}", pos + 1)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(k: usize, i: usize, j: usize) -> Poly {
        Poly::x(k, i, j)
    }

    fn mono(vars: &[(usize, usize, usize, u32)]) -> Monomial {
        Monomial::from_factors(
            vars.iter()
                .map(|&(k, i, j, e)| (VarId::new(k, i, j), e))
                .collect(),
        )
    }

    #[test]
    fn var_order_inverts_index_triples() {
        let a = VarId::new(1, 1, 1);
        let b = VarId::new(1, 1, 2);
        assert_eq!(var_cmp(&a, &b), Ordering::Greater);
        let nn = VarId::new(1, 3, 3);
        let next = VarId::new(2, 1, 1);
        assert_eq!(var_cmp(&nn, &next), Ordering::Greater);
        assert_eq!(var_cmp(&a, &a), Ordering::Equal);
    }

    #[test]
    fn mono_cmp_examples() {
        let a = mono(&[(1, 1, 1, 1)]);
        let b = mono(&[(1, 1, 2, 1), (2, 1, 1, 1)]);
        assert_eq!(mono_cmp(&a, &b), Ordering::Greater);
        assert_eq!(mono_cmp(&b, &Monomial::one()), Ordering::Greater);
        assert_eq!(mono_cmp(&b, &b), Ordering::Equal);
    }

    #[test]
    fn module_term_cmp_examples() {
        let t = |pos, m: Monomial| ModuleTerm {
            position: pos,
            monomial: m,
            coefficient: rat(1),
        };
        // u_{1,1} (position 0) beats u_{1,2} (position 1) for any monomials.
        let big = mono(&[(1, 1, 1, 5)]);
        assert_eq!(
            module_term_cmp(&t(0, Monomial::one()), &t(1, big.clone())),
            Ordering::Greater
        );
        assert_eq!(
            module_term_cmp(&t(0, mono(&[(1, 1, 1, 1)])), &t(0, mono(&[(1, 1, 2, 1)]))),
            Ordering::Greater
        );
        assert_eq!(
            module_term_cmp(&t(2, big.clone()), &t(2, big)),
            Ordering::Equal
        );
    }

    #[test]
    fn arithmetic_examples() {
        let a = &x(1, 1, 1) + &Poly::one();
        let b = &x(1, 1, 1) - &Poly::one();
        let expected = &x(1, 1, 1).pow(2) - &Poly::one();
        assert_eq!(&a * &b, expected);

        let p = x(1, 1, 1).scale(&rat(3));
        let s = p.substitute_values(&|v| (v == VarId::new(1, 1, 1)).then(|| ratio(2, 3)));
        assert_eq!(s, Poly::int(2));

        let sum = &p + &(-&p);
        assert!(sum.is_zero());
        assert_eq!(sum.len(), 0);
    }

    #[test]
    fn multilinearity() {
        let g: BTreeSet<u16> = [1, 2].into();
        let d = &(&x(1, 1, 1) * &x(2, 1, 2)) - &(&x(1, 1, 2) * &x(2, 1, 1));
        assert!(d.is_multilinear(&g));
        assert!(!x(1, 1, 1).pow(2).is_multilinear(&[1].into()));
        assert!(!Poly::zero().is_multilinear(&g));
        assert!(!x(1, 1, 1).is_multilinear(&g));
        assert!(!(&x(1, 1, 1) * &x(1, 2, 2)).is_multilinear(&[1].into()));
    }

    #[test]
    fn serialization_is_sorted_descending() {
        let p = &(&x(2, 1, 1) + &x(1, 1, 1).scale(&ratio(-1, 2))) + &Poly::int(3);
        let repr = p.to_repr();
        assert_eq!(repr[0].vars, vec![[1, 1, 1, 1]]);
        assert_eq!(repr[0].coeff, "-1/2");
        assert_eq!(repr[2].vars, Vec::<[u32; 4]>::new());
        assert_eq!(Poly::from_repr(&repr).unwrap(), p);
        assert!(parse_rational("0.5").is_err());
    }

    #[test]
    fn div_rem_by_principal_divisor() {
        let d = &(&x(1, 1, 1) * &x(1, 2, 2)) - &(&x(1, 1, 2) * &x(1, 2, 1));
        let f = &(&d * &(&x(1, 1, 1) + &Poly::int(2))) + &x(1, 2, 2);
        let (q, r) = f.div_rem(&d);
        assert_eq!(r, x(1, 2, 2));
        assert_eq!(&(&q * &d) + &r, f);
    }

    #[test]
    fn monomial_gcd_lcm() {
        let a = mono(&[(1, 1, 1, 2), (2, 1, 1, 1)]);
        let b = mono(&[(1, 1, 1, 1), (1, 2, 2, 1)]);
        assert_eq!(a.gcd(&b), mono(&[(1, 1, 1, 1)]));
        assert_eq!(a.lcm(&b), mono(&[(1, 1, 1, 2), (1, 2, 2, 1), (2, 1, 1, 1)]));
        assert!(a.gcd(&b).divides(&a));
        assert_eq!(
            b.divide_into(&a.lcm(&b)).unwrap(),
            mono(&[(1, 1, 1, 1), (2, 1, 1, 1)])
        );
    }
}
