//! Two-sided identities. A decomposition writes
//! `F_k = Σ_l x_l p_kl + λ_k + φ_k`, `G_l = Σ_k p_kl x_k + λ_l + ψ_l` with
//! `Σ_k φ_k x_k = 0 = Σ_l x_l ψ_l` and `λ_i = 0` unless `i ∈ K ∩ L`.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{random_multilinear_scalar, random_one_sided_on, FISpec};
use crate::error::{Error, Result};
use crate::linalg::LinearSystem;
use crate::modgb::{
    build_g_families_kl, schreyer_decompose, schreyer_pair, BuchbergerOptions, FamilyElement,
    FamilyKind, GroebnerBasis, SchreyerSyzygy,
};
use crate::poly::{Monomial, Poly, Rational, VarId};
use crate::symmat::{build_xi, PolyMatrix};

/// The coordinate matrix of `p_kl`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PBlock {
    pub k: usize,
    pub l: usize,
    pub p: PolyMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoSidedDecomposition {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "K")]
    pub k_set: Vec<usize>,
    #[serde(rename = "L")]
    pub l_set: Vec<usize>,
    /// Nonzero blocks only, sorted by `(k, l)`.
    pub p: Vec<PBlock>,
    /// Nonzero `λ_i` only.
    #[serde(deserialize_with = "super::index_map")]
    pub lambda: BTreeMap<usize, Poly>,
    #[serde(deserialize_with = "super::index_map")]
    pub phi: BTreeMap<usize, PolyMatrix>,
    #[serde(deserialize_with = "super::index_map")]
    pub psi: BTreeMap<usize, PolyMatrix>,
}

impl TwoSidedDecomposition {
    fn assemble(
        spec: &FISpec,
        p: BTreeMap<(usize, usize), PolyMatrix>,
        lambda: BTreeMap<usize, Poly>,
        phi: BTreeMap<usize, PolyMatrix>,
        psi: BTreeMap<usize, PolyMatrix>,
    ) -> Self {
        let zero = || PolyMatrix::zeros(spec.n, spec.n);
        TwoSidedDecomposition {
            n: spec.n,
            m: spec.m,
            k_set: spec.k_set.clone(),
            l_set: spec.l_set.clone(),
            p: p.into_iter()
                .filter(|(_, b)| !b.is_zero())
                .map(|((k, l), p)| PBlock { k, l, p })
                .collect(),
            lambda: lambda.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
            phi: spec
                .k_set
                .iter()
                .map(|&k| (k, phi.get(&k).cloned().unwrap_or_else(zero)))
                .collect(),
            psi: spec
                .l_set
                .iter()
                .map(|&l| (l, psi.get(&l).cloned().unwrap_or_else(zero)))
                .collect(),
        }
    }

    pub fn p_block(&self, k: usize, l: usize) -> Option<&PolyMatrix> {
        self.p.iter().find(|b| b.k == k && b.l == l).map(|b| &b.p)
    }

    /// `φ = ψ = 0`.
    pub fn is_standard(&self) -> bool {
        self.phi.values().chain(self.psi.values()).all(PolyMatrix::is_zero)
    }

    /// The maps `Σ_l x_l p_kl + λ_k` and `Σ_k p_kl x_k + λ_l`.
    pub fn standard_part(&self) -> Result<FISpec> {
        let n = self.n;
        let mut f: BTreeMap<usize, PolyMatrix> =
            self.k_set.iter().map(|&k| (k, PolyMatrix::zeros(n, n))).collect();
        let mut g: BTreeMap<usize, PolyMatrix> =
            self.l_set.iter().map(|&l| (l, PolyMatrix::zeros(n, n))).collect();
        for b in &self.p {
            let (Some(fk), Some(gl)) = (f.get_mut(&b.k), g.get_mut(&b.l)) else {
                return Err(Error::Malformed(format!(
                    "block p_({},{}) outside K × L",
                    b.k, b.l
                )));
            };
            fk.add_assign(&PolyMatrix::generic(b.l, n)?.checked_mul(&b.p)?);
            gl.add_assign(&b.p.checked_mul(&PolyMatrix::generic(b.k, n)?)?);
        }
        for (&i, c) in &self.lambda {
            let (Some(fi), Some(gi)) = (f.get_mut(&i), g.get_mut(&i)) else {
                return Err(Error::Malformed(format!("λ_{i} with {i} outside K ∩ L")));
            };
            fi.add_assign(&PolyMatrix::scalar(n, c));
            gi.add_assign(&PolyMatrix::scalar(n, c));
        }
        Ok(FISpec {
            n,
            m: self.m,
            k_set: self.k_set.clone(),
            l_set: self.l_set.clone(),
            f,
            g,
        })
    }

    /// Standard part plus `φ` and `ψ`.
    pub fn reconstruct(&self) -> Result<FISpec> {
        let mut s = self.standard_part()?;
        for (k, h) in &self.phi {
            s.f.get_mut(k)
                .ok_or_else(|| Error::Malformed(format!("φ_{k} with {k} outside K")))?
                .add_assign(h);
        }
        for (l, h) in &self.psi {
            s.g.get_mut(l)
                .ok_or_else(|| Error::Malformed(format!("ψ_{l} with {l} outside L")))?
                .add_assign(h);
        }
        Ok(s)
    }

    /// Checks every defining property against `spec`.
    pub fn verify(&self, spec: &FISpec) -> Result<()> {
        let fail = |msg: String| Err(Error::Internal(msg));
        if (self.n, self.m, &self.k_set, &self.l_set) != (spec.n, spec.m, &spec.k_set, &spec.l_set) {
            return fail("decomposition is for a different shape".into());
        }
        for b in &self.p {
            if b.k == b.l {
                return fail(format!("diagonal block p_({},{})", b.k, b.l));
            }
            let groups = spec.groups_without(&[b.k, b.l]);
            if b.p.entries().any(|e| !e.is_zero() && !e.is_multilinear(&groups)) {
                return fail(format!("p_({},{}) is not multilinear", b.k, b.l));
            }
        }
        for (&i, c) in &self.lambda {
            if !c.is_multilinear(&spec.groups_without(&[i])) {
                return fail(format!("λ_{i} is not multilinear"));
            }
        }
        let r = self.reconstruct()?;
        if r.f != spec.f || r.g != spec.g {
            return fail("maps do not add up to the identity".into());
        }
        let mut left = PolyMatrix::zeros(self.n, self.n);
        for (&k, h) in &self.phi {
            left.add_assign(&h.checked_mul(&PolyMatrix::generic(k, self.n)?)?);
        }
        if !left.is_zero() {
            return fail("Σ φ_k x_k ≠ 0".into());
        }
        let mut right = PolyMatrix::zeros(self.n, self.n);
        for (&l, h) in &self.psi {
            right.add_assign(&PolyMatrix::generic(l, self.n)?.checked_mul(h)?);
        }
        if !right.is_zero() {
            return fail("Σ x_l ψ_l ≠ 0".into());
        }
        Ok(())
    }
}

/// All monomials with exactly one variable of each listed group.
pub fn multilinear_monomials(n: usize, groups: &[usize]) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    for &k in groups {
        let mut next = Vec::with_capacity(out.len() * n * n);
        for m in &out {
            for i in 1..=n {
                for j in 1..=n {
                    next.push(m.mul(&Monomial::var(VarId::new(k, i, j))));
                }
            }
        }
        out = next;
    }
    out
}

fn var(k: usize, i: usize, j: usize) -> Monomial {
    Monomial::var(VarId::new(k, i, j))
}

/// Unknown coefficients of the `p_kl` and `λ_i` for a given shape.
enum Unknown {
    P { k: usize, l: usize, r: usize, c: usize, mono: Monomial },
    Lambda { i: usize, mono: Monomial },
}

fn unknowns(spec: &FISpec) -> Vec<Unknown> {
    let n = spec.n;
    let mut out = Vec::new();
    for &k in &spec.k_set {
        for &l in &spec.l_set {
            if k == l {
                continue;
            }
            let groups: Vec<usize> = (1..=spec.m).filter(|&g| g != k && g != l).collect();
            let monos = multilinear_monomials(n, &groups);
            for r in 1..=n {
                for c in 1..=n {
                    for mono in &monos {
                        out.push(Unknown::P { k, l, r, c, mono: mono.clone() });
                    }
                }
            }
        }
    }
    for &i in spec.k_set.iter().filter(|i| spec.l_set.contains(i)) {
        let groups: Vec<usize> = (1..=spec.m).filter(|&g| g != i).collect();
        for mono in multilinear_monomials(n, &groups) {
            out.push(Unknown::Lambda { i, mono });
        }
    }
    out
}

type EqKey = (u8, usize, usize, usize, Monomial);

fn solve_system(
    eqs: BTreeMap<EqKey, BTreeMap<usize, Rational>>,
    mut rhs: BTreeMap<EqKey, Rational>,
) -> Option<BTreeMap<usize, Rational>> {
    let mut eqs = eqs;
    for key in rhs.keys() {
        eqs.entry(key.clone()).or_default();
    }
    let mut sys = LinearSystem::new();
    for (key, coeffs) in eqs {
        let r = rhs.remove(&key).unwrap_or_default();
        if !sys.add_equation(coeffs, r) {
            return None;
        }
    }
    sys.solution()
}

fn read_solution(
    spec: &FISpec,
    unk: &[Unknown],
    sol: &BTreeMap<usize, Rational>,
) -> (BTreeMap<(usize, usize), PolyMatrix>, BTreeMap<usize, Poly>) {
    let mut p: BTreeMap<(usize, usize), PolyMatrix> = BTreeMap::new();
    let mut lambda: BTreeMap<usize, Poly> = BTreeMap::new();
    for (&u, c) in sol {
        match &unk[u] {
            Unknown::P { k, l, r, c: col, mono } => p
                .entry((*k, *l))
                .or_insert_with(|| PolyMatrix::zeros(spec.n, spec.n))
                .get_mut(r - 1, col - 1)
                .add_term(mono.clone(), c.clone()),
            Unknown::Lambda { i, mono } => lambda
                .entry(*i)
                .or_insert_with(Poly::zero)
                .add_term(mono.clone(), c.clone()),
        }
    }
    (p, lambda)
}

/// Solves `F_k = Σ_l x_l p_kl + λ_k`, `G_l = Σ_k p_kl x_k + λ_l` exactly by
/// linear algebra on monomial coefficients. Identities with `|K|, |L| ≤ n`
/// always have such a solution; `NoSolution` otherwise signals a
/// nonstandard part.
pub fn standard_solve_small(spec: &FISpec) -> Result<TwoSidedDecomposition> {
    spec.validate()?;
    let n = spec.n;
    let unk = unknowns(spec);
    let mut eqs: BTreeMap<EqKey, BTreeMap<usize, Rational>> = BTreeMap::new();
    let mut put = |key: EqKey, u: usize| {
        *eqs.entry(key).or_default().entry(u).or_default() += Rational::from_integer(1.into());
    };
    for (u, x) in unk.iter().enumerate() {
        match x {
            Unknown::P { k, l, r, c, mono } => {
                for a in 1..=n {
                    put((0, *k, a, *c, mono.mul(&var(*l, a, *r))), u);
                    put((1, *l, *r, a, mono.mul(&var(*k, *c, a))), u);
                }
            }
            Unknown::Lambda { i, mono } => {
                for a in 1..=n {
                    put((0, *i, a, a, mono.clone()), u);
                    put((1, *i, a, a, mono.clone()), u);
                }
            }
        }
    }
    let mut rhs: BTreeMap<EqKey, Rational> = BTreeMap::new();
    for (side, maps) in [(0u8, &spec.f), (1u8, &spec.g)] {
        for (&k, h) in maps {
            for a in 1..=n {
                for b in 1..=n {
                    for (mono, c) in h.get(a - 1, b - 1).terms() {
                        rhs.insert((side, k, a, b, mono.clone()), c.clone());
                    }
                }
            }
        }
    }
    let sol = solve_system(eqs, rhs)
        .ok_or_else(|| Error::NoSolution("no standard solution".into()))?;
    let (p, lambda) = read_solution(spec, &unk, &sol);
    let d = TwoSidedDecomposition::assemble(spec, p, lambda, BTreeMap::new(), BTreeMap::new());
    d.verify(spec)
        .map_err(|e| Error::Internal(format!("standard solution failed its check: {e}")))?;
    Ok(d)
}

/// Independent route: finds `p_kl`, `λ_i` with
/// `Σ_{k,l} x_l p_kl x_k + Σ_i λ_i x_i = Σ_k F_k x_k` and takes `φ`, `ψ` as
/// the remainders. `None` if no such `p`, `λ` exist.
pub fn oracle_decompose(spec: &FISpec) -> Result<Option<TwoSidedDecomposition>> {
    spec.validate()?;
    let n = spec.n;
    let unk = unknowns(spec);
    let mut eqs: BTreeMap<EqKey, BTreeMap<usize, Rational>> = BTreeMap::new();
    for (u, x) in unk.iter().enumerate() {
        for a in 1..=n {
            for b in 1..=n {
                match x {
                    Unknown::P { k, l, r, c, mono } => {
                        let key = (0, 0, a, b, mono.mul(&var(*l, a, *r)).mul(&var(*k, *c, b)));
                        *eqs.entry(key).or_default().entry(u).or_default() +=
                            Rational::from_integer(1.into());
                    }
                    Unknown::Lambda { i, mono } => {
                        let key = (0, 0, a, b, mono.mul(&var(*i, a, b)));
                        *eqs.entry(key).or_default().entry(u).or_default() +=
                            Rational::from_integer(1.into());
                    }
                }
            }
        }
    }
    let mut lhs = PolyMatrix::zeros(n, n);
    for (&k, h) in &spec.f {
        lhs.add_assign(&h.checked_mul(&PolyMatrix::generic(k, n)?)?);
    }
    let mut rhs: BTreeMap<EqKey, Rational> = BTreeMap::new();
    for a in 1..=n {
        for b in 1..=n {
            for (mono, c) in lhs.get(a - 1, b - 1).terms() {
                rhs.insert((0, 0, a, b, mono.clone()), c.clone());
            }
        }
    }
    let Some(sol) = solve_system(eqs, rhs) else {
        return Ok(None);
    };
    let (p, lambda) = read_solution(spec, &unk, &sol);
    let mut d = TwoSidedDecomposition::assemble(spec, p, lambda, BTreeMap::new(), BTreeMap::new());
    let std = d.standard_part()?;
    for (k, h) in &spec.f {
        d.phi.insert(*k, h.checked_sub(&std.f[k])?);
    }
    for (l, h) in &spec.g {
        d.psi.insert(*l, h.checked_sub(&std.g[l])?);
    }
    // The F side alone fixes p and λ up to terms that cancel in Σ x_l p_kl x_k,
    // so a nonzero Σ x_l ψ_l means the input is no identity.
    let mut right = PolyMatrix::zeros(n, n);
    for (&l, h) in &d.psi {
        right.add_assign(&PolyMatrix::generic(l, n)?.checked_mul(h)?);
    }
    if !right.is_zero() {
        return Ok(None);
    }
    d.verify(spec)
        .map_err(|e| Error::Internal(format!("oracle decomposition failed its check: {e}")))?;
    Ok(Some(d))
}

pub fn oracle_solvable(spec: &FISpec) -> Result<bool> {
    Ok(oracle_decompose(spec)?.is_some())
}

/// Random identity built from random `p`, `λ` and, if `one_sided` is set,
/// random one-sided parts `φ` (when `|K| > n`) and `ψ` (when `|L| > n`).
pub fn random_two_sided<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    k_set: &[usize],
    l_set: &[usize],
    one_sided: bool,
) -> Result<FISpec> {
    let mut p = BTreeMap::new();
    for &k in k_set {
        for &l in l_set {
            if k == l || rng.gen_bool(0.3) {
                continue;
            }
            let groups: Vec<usize> = (1..=m).filter(|&g| g != k && g != l).collect();
            let mut b = PolyMatrix::zeros(n, n);
            for r in 0..n {
                for c in 0..n {
                    if rng.gen_bool(0.5) {
                        b.set(r, c, random_multilinear_scalar(rng, n, &groups, 1));
                    }
                }
            }
            p.insert((k, l), b);
        }
    }
    let mut lambda = BTreeMap::new();
    for &i in k_set.iter().filter(|i| l_set.contains(i)) {
        if rng.gen_bool(0.7) {
            let groups: Vec<usize> = (1..=m).filter(|&g| g != i).collect();
            lambda.insert(i, random_multilinear_scalar(rng, n, &groups, 1));
        }
    }
    let mut phi = BTreeMap::new();
    let mut psi = BTreeMap::new();
    if one_sided && k_set.len() > n {
        let count = rng.gen_range(1..=2);
        let (f, _) = random_one_sided_on(rng, n, m, k_set, count)?;
        phi = f.into_iter().filter(|(k, _)| k_set.contains(k)).collect();
    }
    if one_sided && l_set.len() > n {
        let count = rng.gen_range(1..=2);
        let (f, _) = random_one_sided_on(rng, n, m, l_set, count)?;
        let flip = |v: VarId| Some(Poly::x(v.k as usize, v.j as usize, v.i as usize));
        psi = f
            .into_iter()
            .filter(|(l, _)| l_set.contains(l))
            .map(|(l, h)| (l, h.substitute(&flip).transpose()))
            .collect();
    }
    let shape = FISpec {
        n,
        m,
        k_set: k_set.to_vec(),
        l_set: l_set.to_vec(),
        f: BTreeMap::new(),
        g: BTreeMap::new(),
    };
    let d = TwoSidedDecomposition::assemble(&shape, p, lambda, phi, psi);
    let s = d.reconstruct()?;
    s.validate()?;
    Ok(s)
}

fn unflatten(v: &[Poly], offset: usize, n: usize) -> PolyMatrix {
    let mut out = PolyMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            out.set(a, b, v[offset + a * n + b].clone());
        }
    }
    out
}

/// Which family a pair of basis elements belongs to, and the reducers its
/// standard expression may use.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum PairClass {
    Left,
    Right,
    Mixed(Vec<usize>, Vec<usize>),
}

fn classify(fam: &[FamilyElement], i: usize, j: usize) -> PairClass {
    match (fam[i].kind, fam[j].kind) {
        (FamilyKind::Prime, FamilyKind::Prime) => PairClass::Left,
        (FamilyKind::DoublePrime, FamilyKind::DoublePrime) => PairClass::Right,
        (FamilyKind::Prime, _) => PairClass::Mixed(fam[i].set.clone(), fam[j].set.clone()),
        _ => PairClass::Mixed(fam[j].set.clone(), fam[i].set.clone()),
    }
}

fn admissible(class: &PairClass, e: &FamilyElement) -> bool {
    match (class, e.kind) {
        (PairClass::Left, k) => k == FamilyKind::Prime,
        (PairClass::Right, k) => k == FamilyKind::DoublePrime,
        (PairClass::Mixed(ks, _), FamilyKind::Prime) => e.set.iter().all(|k| ks.contains(k)),
        (PairClass::Mixed(_, ls), FamilyKind::DoublePrime) => e.set.iter().all(|l| ls.contains(l)),
    }
}

/// Decomposes a two-sided identity through the syzygies of `Ξ^{(KL)}`.
///
/// The row vector `H = (F', −G'')` of flattened maps is a syzygy on the rows
/// of `Ξ^{(KL)}`. Since `G'^{(K)} ∪ G''^{(L)}` is a multilinear Gröbner basis
/// containing those rows, `H` is a combination of the Schreyer syzygies
/// `τ_ij`. Pairs inside `G'` contribute to `φ`, pairs inside `G''` to `ψ`,
/// and a mixed pair to an identity on `K' ⊆ K`, `L' ⊆ L` with
/// `|K'|, |L'| ≤ n`, which is solved by [`standard_solve_small`].
pub fn decompose_two_sided(spec: &FISpec) -> Result<TwoSidedDecomposition> {
    spec.validate()?;
    let (n, nn) = (spec.n, spec.n * spec.n);
    let (ks, ls) = (&spec.k_set, &spec.l_set);
    let offset = ks.len() * nn;
    let total = offset + ls.len() * nn;
    if total == 0 {
        return Ok(TwoSidedDecomposition::assemble(
            spec,
            BTreeMap::new(),
            BTreeMap::new(),
            BTreeMap::new(),
            BTreeMap::new(),
        ));
    }

    let mut h = vec![Poly::zero(); total];
    for (p, k) in ks.iter().enumerate() {
        for (e, c) in spec.f[k].entries().enumerate() {
            h[p * nn + e] = c.clone();
        }
    }
    for (q, l) in ls.iter().enumerate() {
        for (e, c) in spec.g[l].entries().enumerate() {
            h[offset + q * nn + e] = -c;
        }
    }

    let (gp, gpp) = build_g_families_kl(n, ks, ls)?;
    let fam: Vec<FamilyElement> = gp.into_iter().chain(gpp).collect();
    let rows = build_xi(ks, ls, n)?.row_elements();
    let basis = GroebnerBasis::with_expressions(
        rows,
        fam.iter().map(|e| e.element.clone()).collect(),
        fam.iter().map(|e| e.expression.clone()).collect(),
        BuchbergerOptions::multilinear(),
    )?;

    // Each row of Ξ is itself a basis element with a unit expression.
    let mut row_to_basis = vec![usize::MAX; total];
    for (b, expr) in basis.expressions.iter().enumerate() {
        let nz: Vec<usize> = (0..total).filter(|&r| !expr[r].is_zero()).collect();
        if let [r] = nz[..] {
            if expr[r] == Poly::one() && row_to_basis[r] == usize::MAX {
                row_to_basis[r] = b;
            }
        }
    }
    if row_to_basis.contains(&usize::MAX) {
        return Err(Error::Internal("some row of Ξ is missing from the basis".into()));
    }
    let mut s = vec![Poly::zero(); basis.len()];
    for (r, c) in h.iter().enumerate() {
        s[row_to_basis[r]] += c;
    }

    let pairs = basis.pairs();
    let syz: Vec<(PairClass, SchreyerSyzygy)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let class = classify(&fam, i, j);
            let allowed = |t: usize| admissible(&class, &fam[t]);
            schreyer_pair(&basis, i, j, &allowed)
                .map(|z| (class, z))
                .ok_or_else(|| {
                    Error::Internal(format!("S-vector of pair ({i},{j}) does not reduce to zero"))
                })
        })
        .collect::<Result<_>>()?;
    let plain: Vec<SchreyerSyzygy> = syz.iter().map(|(_, z)| z.clone()).collect();
    let coeffs = schreyer_decompose(&basis, &plain, &s)
        .ok_or_else(|| Error::Internal("syzygy is not a combination of the τ_ij".into()))?;

    let parts: Vec<(PairClass, Vec<Poly>)> = coeffs
        .par_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(t, c)| {
            let tau: Vec<Poly> = plain[t].tau().iter().map(|x| x * c).collect();
            (syz[t].0.clone(), basis.lift(&tau))
        })
        .collect();
    let mut groups: BTreeMap<PairClass, Vec<Poly>> = BTreeMap::new();
    for (class, v) in parts {
        let acc = groups
            .entry(class)
            .or_insert_with(|| vec![Poly::zero(); total]);
        for (a, x) in acc.iter_mut().zip(&v) {
            *a += x;
        }
    }
    let mut check = vec![Poly::zero(); total];
    for v in groups.values() {
        for (a, x) in check.iter_mut().zip(v) {
            *a += x;
        }
    }
    if check != h {
        return Err(Error::Internal("lifted syzygies do not sum to H".into()));
    }

    let block_f = |v: &[Poly], k: usize| {
        let p = ks.iter().position(|&x| x == k).expect("k in K");
        unflatten(v, p * nn, n)
    };
    let block_g = |v: &[Poly], l: usize| {
        let q = ls.iter().position(|&x| x == l).expect("l in L");
        unflatten(v, offset + q * nn, n).neg()
    };
    let support = |v: &[Poly], kk: &[usize], ll: &[usize]| -> bool {
        ks.iter().all(|k| kk.contains(k) || block_f(v, *k).is_zero())
            && ls.iter().all(|l| ll.contains(l) || block_g(v, *l).is_zero())
    };

    let mut phi = BTreeMap::new();
    let mut psi = BTreeMap::new();
    let mut small = Vec::new();
    for (class, v) in &groups {
        match class {
            PairClass::Left => {
                if !support(v, ks, &[]) {
                    return Err(Error::Internal("left syzygy touches the right side".into()));
                }
                phi = ks.iter().map(|&k| (k, block_f(v, k))).collect();
            }
            PairClass::Right => {
                if !support(v, &[], ls) {
                    return Err(Error::Internal("right syzygy touches the left side".into()));
                }
                psi = ls.iter().map(|&l| (l, block_g(v, l))).collect();
            }
            PairClass::Mixed(kk, ll) => {
                if !support(v, kk, ll) {
                    return Err(Error::Internal("mixed syzygy leaves its support".into()));
                }
                small.push(FISpec {
                    n,
                    m: spec.m,
                    k_set: kk.clone(),
                    l_set: ll.clone(),
                    f: kk.iter().map(|&k| (k, block_f(v, k))).collect(),
                    g: ll.iter().map(|&l| (l, block_g(v, l))).collect(),
                });
            }
        }
    }
    let solved: Vec<TwoSidedDecomposition> = small
        .par_iter()
        .map(standard_solve_small)
        .collect::<Result<_>>()?;
    let mut p: BTreeMap<(usize, usize), PolyMatrix> = BTreeMap::new();
    let mut lambda: BTreeMap<usize, Poly> = BTreeMap::new();
    for d in solved {
        for b in d.p {
            p.entry((b.k, b.l))
                .or_insert_with(|| PolyMatrix::zeros(n, n))
                .add_assign(&b.p);
        }
        for (i, c) in d.lambda {
            *lambda.entry(i).or_insert_with(Poly::zero) += &c;
        }
    }
    let d = TwoSidedDecomposition::assemble(spec, p, lambda, phi, psi);
    d.verify(spec)
        .map_err(|e| Error::Internal(format!("decomposition failed its check: {e}")))?;
    Ok(d)
}

/// Indices `k ∈ K`, `l ∈ L` whose maps are nonzero.
pub fn support(spec: &FISpec) -> (BTreeSet<usize>, BTreeSet<usize>) {
    (
        spec.f.iter().filter(|(_, h)| !h.is_zero()).map(|(&k, _)| k).collect(),
        spec.g.iter().filter(|(_, h)| !h.is_zero()).map(|(&l, _)| l).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisolve::check_fi;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_standard() {
        let p = PolyMatrix::from_ints(&[&[1, 2], &[0, -1]]);
        let mut f = BTreeMap::new();
        f.insert(1, PolyMatrix::generic(2, 2).unwrap().checked_mul(&p).unwrap());
        let mut g = BTreeMap::new();
        g.insert(2, p.checked_mul(&PolyMatrix::generic(1, 2).unwrap()).unwrap());
        let spec = FISpec::new(2, 2, vec![1], vec![2], f, g).unwrap();
        assert!(check_fi(&spec).unwrap().holds);
        let d = standard_solve_small(&spec).unwrap();
        assert_eq!(d.p_block(1, 2), Some(&p));
        assert!(d.lambda.is_empty() && d.is_standard());

        let mut f = BTreeMap::new();
        f.insert(1, PolyMatrix::identity(2));
        let bad = FISpec::new(2, 1, vec![1], vec![], f, BTreeMap::new()).unwrap();
        assert!(matches!(standard_solve_small(&bad), Err(Error::NoSolution(_))));
        assert!(!oracle_solvable(&bad).unwrap());
    }

    #[test]
    fn central_lambda() {
        let c = Poly::x(2, 1, 2);
        let mut f = BTreeMap::new();
        f.insert(1, PolyMatrix::scalar(2, &c));
        let g = f.clone();
        let spec = FISpec::new(2, 2, vec![1], vec![1], f, g).unwrap();
        let d = standard_solve_small(&spec).unwrap();
        assert_eq!(d.lambda.get(&1), Some(&c));
        assert_eq!(decompose_two_sided(&spec).unwrap().lambda.get(&1), Some(&c));
    }

    #[test]
    fn random_full_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let all = [1, 2, 3];
        for _ in 0..3 {
            let spec = random_two_sided(&mut rng, 2, 3, &all, &all, true).unwrap();
            assert!(check_fi(&spec).unwrap().holds);
            let d = decompose_two_sided(&spec).unwrap();
            d.verify(&spec).unwrap();
            assert!(oracle_solvable(&spec).unwrap());
        }
    }
}
