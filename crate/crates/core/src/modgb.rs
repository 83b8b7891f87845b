//! Gröbner bases of submodules of `C^r` under the position-over-term order,
//! with the bookkeeping needed to turn reductions back into syzygies.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::subsets;
use crate::poly::{module_term_cmp, ModuleElement, ModuleTerm, Monomial, Poly};
use crate::symmat::{DetFamily, DetFamilySpec, PolyMatrix};

/// `Σ_{ℓ=0}^{c} (−1)^ℓ [j_0,…,ĵ_ℓ,…,j_c] u_{j_ℓ}` for every chain
/// `j_0 < … < j_c` of rows of the `r × c` matrix `y` (`r > c`).
pub fn determinantal_generators(y: &PolyMatrix) -> Result<Vec<ModuleElement>> {
    let (r, c) = (y.nrows(), y.ncols());
    if r <= c {
        return Err(Error::Dimension(format!(
            "determinantal relations need more rows than columns, got {r}x{c}"
        )));
    }
    let rows: Vec<usize> = (0..r).collect();
    subsets(&rows, c + 1)
        .into_iter()
        .map(|chain| chain_generator(y, &chain))
        .collect()
}

/// Determinantal relations on the stacked rows of `X_1, …, X_m` that are
/// multilinear: the `n + 1` chosen rows come from distinct matrices. Row
/// `(k, t)` of the stack sits at position `(k−1)n + t − 1`.
pub fn multilinear_determinantal_generators(n: usize, m: usize) -> Result<Vec<ModuleElement>> {
    Ok(multilinear_chains(n, m)?
        .into_iter()
        .map(|(_, g)| g)
        .collect())
}

/// Like [`multilinear_determinantal_generators`] but keeps the chain: a list
/// of `(group, row)` pairs, 1-based, groups increasing.
pub fn multilinear_chains(n: usize, m: usize) -> Result<Vec<(Vec<(usize, usize)>, ModuleElement)>> {
    let y = stacked_generic(n, m)?;
    let groups: Vec<usize> = (1..=m).collect();
    let mut out = Vec::new();
    for set in subsets(&groups, n + 1) {
        for rows in crate::perm::tuples(n, n + 1) {
            let chain: Vec<(usize, usize)> = set.iter().copied().zip(rows).collect();
            let idx: Vec<usize> = chain.iter().map(|&(k, t)| (k - 1) * n + t - 1).collect();
            out.push((chain, chain_generator(&y, &idx)?));
        }
    }
    Ok(out)
}

/// The `mn × n` matrix stacking the generic `X_1, …, X_m`.
pub fn stacked_generic(n: usize, m: usize) -> Result<PolyMatrix> {
    let mut rows = Vec::new();
    for k in 1..=m {
        rows.extend(PolyMatrix::generic(k, n)?.to_rows());
    }
    PolyMatrix::from_rows(rows)
}

fn chain_generator(y: &PolyMatrix, chain: &[usize]) -> Result<ModuleElement> {
    let cols: Vec<usize> = (0..y.ncols()).collect();
    let mut g = ModuleElement::zero(y.nrows());
    for (l, &j) in chain.iter().enumerate() {
        let rest: Vec<usize> = chain.iter().copied().filter(|&x| x != j).collect();
        let minor = y.submatrix(&rest, &cols).det()?;
        g.components[j] = if l % 2 == 0 { minor } else { -&minor };
    }
    Ok(g)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuchbergerOptions {
    /// Only form S-pairs whose lcm is multilinear (multidegree ≤ 1 in every
    /// variable group).
    pub multilinear_only: bool,
    /// Group weight carried by each position, counted in the multidegree.
    pub position_groups: Option<Vec<u16>>,
    /// Abort with `ResourceCap` once the basis grows past this size.
    pub max_elements: Option<usize>,
}

impl BuchbergerOptions {
    pub fn multilinear() -> Self {
        BuchbergerOptions {
            multilinear_only: true,
            ..Default::default()
        }
    }

    pub fn with_position_groups(mut self, groups: Vec<u16>) -> Self {
        self.position_groups = Some(groups);
        self
    }

    fn admits(&self, position: usize, lcm: &Monomial) -> bool {
        if !self.multilinear_only {
            return true;
        }
        let mut deg = lcm.multidegree();
        if let Some(pg) = &self.position_groups {
            *deg.entry(pg[position]).or_insert(0) += 1;
        }
        deg.values().all(|&d| d <= 1)
    }
}

/// A Gröbner basis together with the expression of each element in terms of
/// the generators it was computed from.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    pub rank: usize,
    pub generators: Vec<ModuleElement>,
    pub elements: Vec<ModuleElement>,
    /// `elements[i] = Σ_g expressions[i][g]·generators[g]`.
    pub expressions: Vec<Vec<Poly>>,
    pub options: BuchbergerOptions,
    leads: Vec<ModuleTerm>,
    by_position: BTreeMap<usize, Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct NormalForm {
    pub remainder: ModuleElement,
    /// One quotient per basis element.
    pub quotients: Vec<Poly>,
}

impl GroebnerBasis {
    /// Wraps `gens` as a basis without completing it. The zero elements are
    /// dropped from `elements` but kept in `generators`.
    pub fn from_elements(gens: Vec<ModuleElement>, options: BuchbergerOptions) -> Result<Self> {
        let rank = check_rank(&gens)?;
        let mut b = GroebnerBasis {
            rank,
            generators: gens.clone(),
            elements: Vec::new(),
            expressions: Vec::new(),
            options,
            leads: Vec::new(),
            by_position: BTreeMap::new(),
        };
        for (i, g) in gens.into_iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            let mut e = vec![Poly::zero(); b.generators.len()];
            e[i] = Poly::one();
            b.push(g, e);
        }
        Ok(b)
    }

    /// Wraps elements whose expressions over `generators` are already known.
    /// The caller vouches for the Gröbner property.
    pub fn with_expressions(
        generators: Vec<ModuleElement>,
        elements: Vec<ModuleElement>,
        expressions: Vec<Vec<Poly>>,
        options: BuchbergerOptions,
    ) -> Result<Self> {
        let rank = check_rank(&generators)?;
        if check_rank(&elements)? != rank && !elements.is_empty() {
            return Err(Error::Dimension("elements and generators differ in rank".into()));
        }
        if expressions.len() != elements.len()
            || expressions.iter().any(|e| e.len() != generators.len())
        {
            return Err(Error::Dimension("expression table has the wrong shape".into()));
        }
        let mut b = GroebnerBasis {
            rank,
            generators,
            elements: Vec::new(),
            expressions: Vec::new(),
            options,
            leads: Vec::new(),
            by_position: BTreeMap::new(),
        };
        for (g, e) in elements.into_iter().zip(expressions) {
            if g.is_zero() {
                return Err(Error::Malformed("zero basis element".into()));
            }
            b.push(g, e);
        }
        Ok(b)
    }

    fn push(&mut self, g: ModuleElement, expr: Vec<Poly>) {
        let lt = g.leading_term().expect("nonzero basis element");
        self.by_position
            .entry(lt.position)
            .or_default()
            .push(self.elements.len());
        self.leads.push(lt);
        self.elements.push(g);
        self.expressions.push(expr);
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn leading_terms(&self) -> &[ModuleTerm] {
        &self.leads
    }

    fn find_reducer_in(
        &self,
        t: &ModuleTerm,
        allowed: &(dyn Fn(usize) -> bool + Sync),
    ) -> Option<(usize, Monomial)> {
        self.by_position.get(&t.position)?.iter().filter(|&&i| allowed(i)).find_map(|&i| {
            self.leads[i]
                .monomial
                .divide_into(&t.monomial)
                .map(|q| (i, q))
        })
    }

    /// Expands `Σ coeffs[i]·elements[i]` into a combination of the generators.
    pub fn lift(&self, coeffs: &[Poly]) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.generators.len()];
        for (c, expr) in coeffs.iter().zip(&self.expressions) {
            if c.is_zero() {
                continue;
            }
            for (o, e) in out.iter_mut().zip(expr) {
                if !e.is_zero() {
                    *o += &(c * e);
                }
            }
        }
        out
    }

    /// Pairs `(i, j)`, `i < j`, with leading terms in the same position and
    /// admitted by the options.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for idx in self.by_position.values() {
            for (a, &i) in idx.iter().enumerate() {
                for &j in &idx[a + 1..] {
                    let (i, j) = (i.min(j), i.max(j));
                    if self.admits_pair(i, j) {
                        out.push((i, j));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn admits_pair(&self, i: usize, j: usize) -> bool {
        let lcm = self.leads[i].monomial.lcm(&self.leads[j].monomial);
        self.options.admits(self.leads[i].position, &lcm)
    }

    /// The S-vector of a pair, with its expression over the basis.
    pub fn s_vector(&self, i: usize, j: usize) -> (ModuleElement, Vec<Poly>) {
        let (m_ji, m_ij) = self.pair_multipliers(i, j);
        let mut s = self.elements[i].mul_poly(&m_ji);
        s.sub_assign(&self.elements[j].mul_poly(&m_ij));
        let mut coeffs = vec![Poly::zero(); self.len()];
        coeffs[i] = m_ji;
        coeffs[j] = -&m_ij;
        (s, coeffs)
    }

    /// `(m_ji, m_ij)` with `m_ji·init(g_i) = m_ij·init(g_j)`:
    /// `m_ji = c_j·init(g_j)/gcd`, `m_ij = c_i·init(g_i)/gcd`.
    pub fn pair_multipliers(&self, i: usize, j: usize) -> (Poly, Poly) {
        let (a, b) = (&self.leads[i], &self.leads[j]);
        let g = a.monomial.gcd(&b.monomial);
        let mj = g.divide_into(&b.monomial).expect("gcd divides");
        let mi = g.divide_into(&a.monomial).expect("gcd divides");
        (
            Poly::monomial(mj, b.coefficient.clone()),
            Poly::monomial(mi, a.coefficient.clone()),
        )
    }

    /// Buchberger's criterion over the admitted pairs; returns the pairs
    /// whose S-vectors do not reduce to zero.
    pub fn criterion_failures(&self) -> Vec<(usize, usize)> {
        self.pairs()
            .into_par_iter()
            .filter(|&(i, j)| {
                !normal_form(&self.s_vector(i, j).0, self)
                    .remainder
                    .is_zero()
            })
            .collect()
    }

    pub fn is_groebner(&self) -> bool {
        self.criterion_failures().is_empty()
    }

    /// Elements whose components are all multilinear.
    pub fn multilinear_elements(&self) -> Vec<ModuleElement> {
        multilinear_filter(&self.elements)
    }
}

fn check_rank(gens: &[ModuleElement]) -> Result<usize> {
    let rank = gens.first().map(ModuleElement::rank).unwrap_or(0);
    if gens.iter().any(|g| g.rank() != rank) {
        return Err(Error::Dimension("generators of different rank".into()));
    }
    Ok(rank)
}

/// Full reduction of `v` modulo `basis`: `v = Σ quotients_i·g_i + remainder`
/// where no term of the remainder is divisible by a leading term of the basis.
pub fn normal_form(v: &ModuleElement, basis: &GroebnerBasis) -> NormalForm {
    normal_form_restricted(v, basis, &|_| true)
}

/// [`normal_form`] using only the basis elements accepted by `allowed`.
pub fn normal_form_restricted(
    v: &ModuleElement,
    basis: &GroebnerBasis,
    allowed: &(dyn Fn(usize) -> bool + Sync),
) -> NormalForm {
    let mut p = v.clone();
    let mut remainder = ModuleElement::zero(v.rank());
    let mut quotients = vec![Poly::zero(); basis.len()];
    while let Some(lt) = p.leading_term() {
        match basis.find_reducer_in(&lt, allowed) {
            Some((i, q)) => {
                let c = &lt.coefficient / &basis.leads[i].coefficient;
                p.add_scaled_term(&basis.elements[i], &q, &-c.clone());
                quotients[i].add_term(q, c);
            }
            None => {
                p.components[lt.position].add_term(lt.monomial.clone(), -lt.coefficient.clone());
                remainder.components[lt.position].add_term(lt.monomial, lt.coefficient);
            }
        }
    }
    NormalForm {
        remainder,
        quotients,
    }
}

/// Completes `gens` to a Gröbner basis. Pairs are taken by the normal
/// strategy: smallest lcm first, ties broken by position, then by index.
pub fn buchberger(gens: Vec<ModuleElement>, options: BuchbergerOptions) -> Result<GroebnerBasis> {
    let mut basis = GroebnerBasis::from_elements(gens, options)?;
    let mut queue: BTreeSet<PairKey> = BTreeSet::new();
    for (i, j) in basis.pairs() {
        queue.insert(PairKey::new(&basis, i, j));
    }
    while let Some(key) = queue.pop_first() {
        let (s, coeffs) = basis.s_vector(key.i, key.j);
        let nf = normal_form(&s, &basis);
        if nf.remainder.is_zero() {
            continue;
        }
        let mut total = coeffs;
        for (t, q) in total.iter_mut().zip(&nf.quotients) {
            *t -= q;
        }
        let expr = basis.lift(&total);
        let new = basis.len();
        if let Some(cap) = basis.options.max_elements {
            if new >= cap {
                return Err(Error::ResourceCap(format!(
                    "Gröbner basis exceeded {cap} elements"
                )));
            }
        }
        basis.push(nf.remainder, expr);
        let pos = basis.leads[new].position;
        for &i in &basis.by_position[&pos] {
            if i != new && basis.admits_pair(i, new) {
                queue.insert(PairKey::new(&basis, i, new));
            }
        }
    }
    Ok(basis)
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct PairKey {
    lcm: Monomial,
    position: usize,
    i: usize,
    j: usize,
}

impl PairKey {
    fn new(b: &GroebnerBasis, i: usize, j: usize) -> Self {
        PairKey {
            lcm: b.leads[i].monomial.lcm(&b.leads[j].monomial),
            position: b.leads[i].position,
            i,
            j,
        }
    }
}

impl Ord for PairKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.lcm
            .cmp(&other.lcm)
            .then(self.position.cmp(&other.position))
            .then((self.j, self.i).cmp(&(other.j, other.i)))
    }
}

impl PartialOrd for PairKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// `τ_ij = m_ji u_i − m_ij u_j − Σ_ℓ h_ℓ u_ℓ`, a syzygy on the basis built
/// from a standard expression of `σ_ij = m_ji g_i − m_ij g_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchreyerSyzygy {
    pub i: usize,
    pub j: usize,
    pub m_ji: Poly,
    pub m_ij: Poly,
    pub h: Vec<Poly>,
}

impl SchreyerSyzygy {
    /// Coefficient vector of `τ_ij` over the basis elements.
    pub fn tau(&self) -> Vec<Poly> {
        let mut t: Vec<Poly> = self.h.iter().map(|p| -p).collect();
        t[self.i] += &self.m_ji;
        t[self.j] -= &self.m_ij;
        t
    }

    /// `init(σ_ij) ≥ init(h_ℓ g_ℓ)` for every ℓ.
    pub fn is_init_dominant(&self, basis: &GroebnerBasis) -> bool {
        let sigma = {
            let mut s = basis.elements[self.i].mul_poly(&self.m_ji);
            s.sub_assign(&basis.elements[self.j].mul_poly(&self.m_ij));
            s
        };
        let Some(top) = sigma.leading_term() else {
            return self.h.iter().all(Poly::is_zero);
        };
        self.h
            .iter()
            .zip(&basis.elements)
            .all(|(h, g)| match g.mul_poly(h).leading_term() {
                None => true,
                Some(t) => module_term_cmp(&top, &t) != std::cmp::Ordering::Less,
            })
    }
}

/// One syzygy per admitted pair with leading terms in the same position.
pub fn schreyer_syzygies(basis: &GroebnerBasis) -> Vec<SchreyerSyzygy> {
    basis
        .pairs()
        .into_par_iter()
        .map(|(i, j)| {
            let s = schreyer_pair(basis, i, j, &|_| true);
            debug_assert!(s.is_some(), "basis is not Gröbner at ({i},{j})");
            s.unwrap_or_else(|| SchreyerSyzygy {
                i,
                j,
                m_ji: Poly::zero(),
                m_ij: Poly::zero(),
                h: vec![Poly::zero(); basis.len()],
            })
        })
        .collect()
}

/// `τ_ij` with the standard expression of `σ_ij` taken over the elements
/// accepted by `allowed`; `None` if `σ_ij` does not reduce to zero there.
pub fn schreyer_pair(
    basis: &GroebnerBasis,
    i: usize,
    j: usize,
    allowed: &(dyn Fn(usize) -> bool + Sync),
) -> Option<SchreyerSyzygy> {
    let (m_ji, m_ij) = basis.pair_multipliers(i, j);
    let (s, _) = basis.s_vector(i, j);
    let nf = normal_form_restricted(&s, basis, allowed);
    nf.remainder.is_zero().then_some(SchreyerSyzygy {
        i,
        j,
        m_ji,
        m_ij,
        h: nf.quotients,
    })
}

/// Writes a syzygy `s` on the basis elements as `Σ c_t τ_t` by division in
/// the Schreyer order: `m u_i > m' u_j` iff `m·init(g_i) > m'·init(g_j)`, or
/// the two agree and `i < j`. The leading term of `τ_ij` is `m_ji u_i`.
/// Returns the coefficients `c_t`, or `None` if some leading term has no
/// matching syzygy among `syz` (the basis is then not Gröbner in that degree).
pub fn schreyer_decompose(
    basis: &GroebnerBasis,
    syz: &[SchreyerSyzygy],
    s: &[Poly],
) -> Option<Vec<Poly>> {
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (t, z) in syz.iter().enumerate() {
        index.insert((z.i, z.j), t);
    }
    let taus: Vec<Vec<Poly>> = syz.iter().map(SchreyerSyzygy::tau).collect();
    let mut rest = s.to_vec();
    let mut coeffs = vec![Poly::zero(); syz.len()];
    loop {
        // Schreyer-leading term of `rest`.
        let mut best: Option<(usize, Monomial, ModuleTerm)> = None;
        for (i, p) in rest.iter().enumerate() {
            let Some((m, _)) = p.leading_term() else {
                continue;
            };
            let lead = &basis.leads[i];
            let image = ModuleTerm {
                position: lead.position,
                monomial: m.mul(&lead.monomial),
                coefficient: lead.coefficient.clone(),
            };
            let better = match &best {
                None => true,
                Some((_, _, b)) => module_term_cmp(&image, b) == std::cmp::Ordering::Greater,
            };
            if better {
                best = Some((i, m.clone(), image));
            }
        }
        let Some((i, m, image)) = best else {
            return Some(coeffs);
        };
        // A partner with the same image must exist since `rest` is a syzygy.
        let j = (i + 1..rest.len()).find(|&j| {
            basis.leads[j].position == image.position
                && rest[j].terms().any(|(mj, _)| mj.mul(&basis.leads[j].monomial) == image.monomial)
        })?;
        let t = *index.get(&(i, j))?;
        let (mm, mc) = syz[t].m_ji.leading_term().expect("nonzero multiplier");
        let q = mm.divide_into(&m)?;
        let c = rest[i].coeff(&m) / mc;
        for (r, tau) in rest.iter_mut().zip(&taus[t]) {
            if !tau.is_zero() {
                *r -= &tau.mul_term(&q, &c);
            }
        }
        coeffs[t].add_term(q, c);
    }
}

/// Elements whose nonzero components are all multilinear in one common set
/// of variable groups.
pub fn multilinear_filter(elements: &[ModuleElement]) -> Vec<ModuleElement> {
    elements
        .iter()
        .filter(|g| {
            let groups = g.groups();
            g.components
                .iter()
                .all(|p| p.is_zero() || p.is_multilinear(&groups))
        })
        .cloned()
        .collect()
}

/// Whether every element of `a` reduces to zero modulo `b`.
pub fn reduces_to_zero(a: &[ModuleElement], b: &GroebnerBasis) -> bool {
    a.par_iter().all(|g| normal_form(g, b).remainder.is_zero())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    /// `Σ_α D^r_α(K_V) u_{γ,α}`, built from the `X'_k` rows.
    Prime,
    /// `Σ_β D^c_β(L_S) u_{β,δ}`, built from the `X''_l` rows.
    DoublePrime,
}

/// One member of `G'` or `G''` with its expression over the rows of `Ξ^{(KL)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyElement {
    pub kind: FamilyKind,
    /// `γ` for `G'`, `δ` for `G''`.
    pub fixed: usize,
    pub set: Vec<usize>,
    pub tuple: Vec<usize>,
    pub element: ModuleElement,
    pub expression: Vec<Poly>,
}

/// `G'^{(K)}` and `G''^{(L)}` inside `C^{n²}`, with expressions over the rows
/// of `Ξ^{(KL)}` (the `X'_k`, `k ∈ K`, then the `X''_l`, `l ∈ L`).
pub fn build_g_families_kl(
    n: usize,
    k_set: &[usize],
    l_set: &[usize],
) -> Result<(Vec<FamilyElement>, Vec<FamilyElement>)> {
    if n == 0 {
        return Err(Error::OutOfBounds("n must be ≥ 1".into()));
    }
    let nn = n * n;
    let total = (k_set.len() + l_set.len()) * nn;
    let mut gp = Vec::new();
    for size in 1..=n.min(k_set.len()) {
        for set in subsets(k_set, size) {
            for v in crate::perm::tuples(n, size) {
                let spec = DetFamilySpec::new(n, set.clone(), vec![], v.clone(), vec![])?;
                // Cofactors along the last column of Z.
                let z = spec.z_matrix(&[], n)?;
                let cof = cofactors(&z, size - 1, true)?;
                for gamma in 1..=n {
                    let mut el = ModuleElement::zero(nn);
                    for alpha in size..=n {
                        el.components[n * (gamma - 1) + alpha - 1] =
                            spec.det_family(DetFamily::Dr, &[], alpha, &[])?;
                    }
                    let mut expr = vec![Poly::zero(); total];
                    for (l, c) in cof.iter().enumerate() {
                        let p = k_set.iter().position(|&k| k == set[l]).unwrap();
                        expr[p * nn + (gamma - 1) * n + v[l] - 1] += c;
                    }
                    gp.push(FamilyElement {
                        kind: FamilyKind::Prime,
                        fixed: gamma,
                        set: set.clone(),
                        tuple: v.clone(),
                        element: el,
                        expression: expr,
                    });
                }
            }
        }
    }
    let offset = k_set.len() * nn;
    let mut gpp = Vec::new();
    for size in 1..=n.min(l_set.len()) {
        for set in subsets(l_set, size) {
            for s in crate::perm::tuples(n, size) {
                let spec = DetFamilySpec::new(n, vec![], set.clone(), vec![], s.clone())?;
                // Cofactors along the last row of Y.
                let y = spec.y_matrix(&[], n)?;
                let cof = cofactors(&y, size - 1, false)?;
                for delta in 1..=n {
                    let mut el = ModuleElement::zero(nn);
                    for beta in size..=n {
                        el.components[n * (beta - 1) + delta - 1] =
                            spec.det_family(DetFamily::Dc, &[], beta, &[])?;
                    }
                    let mut expr = vec![Poly::zero(); total];
                    for (l, c) in cof.iter().enumerate() {
                        let p = l_set.iter().position(|&k| k == set[l]).unwrap();
                        expr[offset + p * nn + (s[l] - 1) * n + delta - 1] += c;
                    }
                    gpp.push(FamilyElement {
                        kind: FamilyKind::DoublePrime,
                        fixed: delta,
                        set: set.clone(),
                        tuple: s.clone(),
                        element: el,
                        expression: expr,
                    });
                }
            }
        }
    }
    Ok((gp, gpp))
}

/// `G'` and `G''` for `K = L = ℕ_m`, as plain module elements.
pub fn build_g_families(n: usize, m: usize) -> Result<(Vec<ModuleElement>, Vec<ModuleElement>)> {
    let all: Vec<usize> = (1..=m).collect();
    let (gp, gpp) = build_g_families_kl(n, &all, &all)?;
    Ok((
        gp.into_iter().map(|f| f.element).collect(),
        gpp.into_iter().map(|f| f.element).collect(),
    ))
}

/// Signed cofactors of a square matrix along column `line` (`by_column`) or
/// row `line`.
fn cofactors(a: &PolyMatrix, line: usize, by_column: bool) -> Result<Vec<Poly>> {
    let size = a.nrows();
    (0..size)
        .map(|l| {
            let keep = |skip: usize| (0..size).filter(move |&x| x != skip).collect::<Vec<_>>();
            let minor = if by_column {
                a.submatrix(&keep(l), &keep(line)).det()?
            } else {
                a.submatrix(&keep(line), &keep(l)).det()?
            };
            Ok(if (l + line) % 2 == 0 { minor } else { -&minor })
        })
        .collect()
}

/// `U_λ`: `U` with `top` replaced by `λ` when present, sorted.
fn with_last(set: &[usize], top: usize, lambda: usize) -> Vec<usize> {
    let mut out: Vec<usize> = set
        .iter()
        .map(|&u| if u == top { lambda } else { u })
        .collect();
    out.sort_unstable();
    out
}

/// All bijections of `set` onto itself as image lists, with their signs.
fn set_permutations(set: &[usize]) -> Vec<(Vec<usize>, i64)> {
    crate::perm::permutations(set.len())
        .into_iter()
        .map(|p| {
            let sign = crate::perm::sign(&p);
            (p.iter().map(|&i| set[i]).collect(), sign)
        })
        .collect()
}

fn complement(set: &[usize], size: usize) -> Vec<usize> {
    (1..=size).filter(|x| !set.contains(x)).collect()
}

fn signed(p: Poly, sign: i64) -> Poly {
    if sign < 0 {
        -&p
    } else {
        p
    }
}

fn parity_sign(sum: usize) -> i64 {
    if sum % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Both sides of `Σ_{σ ∈ Sym U_α} (−1)^σ d^c_{β,W}(Q_σ) =
/// Σ_{τ ∈ Sym W_β} (−1)^τ d^r_{α,U}(Q_τ)` for `c`-subsets `U ⊆ ℕ_a`,
/// `W ⊆ ℕ_b`.
pub fn polarized_laplace_check(
    spec: &DetFamilySpec,
    u: &[usize],
    w: &[usize],
    alpha: usize,
    beta: usize,
) -> Result<(Poly, Poly)> {
    spec.validate()?;
    let (a, b, c, n) = (spec.a(), spec.b(), spec.c(), spec.n);
    check_range(alpha, a, n, beta, b)?;
    let subset_ok = |x: &[usize], bound: usize| {
        x.len() == c && x.windows(2).all(|p| p[0] < p[1]) && x.iter().all(|&e| e >= 1 && e <= bound)
    };
    if !subset_ok(u, a) || !subset_ok(w, b) {
        return Err(Error::Malformed(format!("U, W must be {c}-subsets of ℕ_a, ℕ_b")));
    }
    let mut lhs = Poly::zero();
    for (img, sg) in set_permutations(&with_last(u, a, alpha)) {
        lhs += &signed(spec.det_family(DetFamily::DcQ, &img, beta, w)?, sg);
    }
    let mut rhs = Poly::zero();
    for (img, sg) in set_permutations(&with_last(w, b, beta)) {
        rhs += &signed(spec.det_family(DetFamily::DrQ, &img, alpha, u)?, sg);
    }
    Ok((lhs, rhs))
}

fn check_range(alpha: usize, a: usize, n: usize, beta: usize, b: usize) -> Result<()> {
    if alpha < a.max(1) || alpha > n || beta < b.max(1) || beta > n {
        return Err(Error::OutOfBounds(format!(
            "need a ≤ α ≤ n and b ≤ β ≤ n, got α={alpha}, β={beta}"
        )));
    }
    Ok(())
}

/// Both sides of the identity between the Laplace-expanded products of
/// `d^r`/`D^c` and `d^c`/`D^r` over all complementary index sets.
pub fn polarized_laplace_check_full(
    spec: &DetFamilySpec,
    alpha: usize,
    beta: usize,
) -> Result<(Poly, Poly)> {
    spec.validate()?;
    let (a, b, c, n) = (spec.a(), spec.b(), spec.c(), spec.n);
    check_range(alpha, a, n, beta, b)?;
    let (d, f) = (spec.d(), spec.f());
    let any = vec![1; c];
    let na: Vec<usize> = (1..=a).collect();
    let nb: Vec<usize> = (1..=b).collect();

    let mut lhs = Poly::zero();
    for uset in subsets(&na, a - c) {
        let uc = complement(&uset, a);
        let outer = spec.det_family(DetFamily::DrRest, &any, alpha, &uset)?;
        let mut inner = Poly::zero();
        for (img, sg) in set_permutations(&with_last(&uc, a, alpha)) {
            inner += &signed(spec.det_family(DetFamily::Dc, &img, beta, &[])?, sg);
        }
        lhs += &signed(&outer * &inner, parity_sign(uc.iter().sum()));
    }
    lhs = signed(lhs, parity_sign(d.iter().sum()));

    let mut rhs = Poly::zero();
    for wset in subsets(&nb, b - c) {
        let wc = complement(&wset, b);
        let outer = spec.det_family(DetFamily::DcRest, &any, beta, &wset)?;
        let mut inner = Poly::zero();
        for (img, sg) in set_permutations(&with_last(&wc, b, beta)) {
            inner += &signed(spec.det_family(DetFamily::Dr, &img, alpha, &[])?, sg);
        }
        rhs += &signed(&outer * &inner, parity_sign(wc.iter().sum()));
    }
    rhs = signed(rhs, parity_sign(f.iter().sum()));
    Ok((lhs, rhs))
}

/// `D^c_β(Q_σ, L_S∖Q)` and its Laplace expansion along the columns
/// `f_1, …, f_c`.
pub fn laplace_expansion_check(spec: &DetFamilySpec, sigma: &[usize], beta: usize) -> Result<(Poly, Poly)> {
    let (b, c) = (spec.b(), spec.c());
    let full = spec.det_family(DetFamily::Dc, sigma, beta, &[])?;
    let f = spec.f();
    let nb: Vec<usize> = (1..=b).collect();
    let mut sum = Poly::zero();
    for wset in subsets(&nb, b - c) {
        let wc = complement(&wset, b);
        let rest = spec.det_family(DetFamily::DcRest, sigma, beta, &wset)?;
        let q = spec.det_family(DetFamily::DcQ, sigma, beta, &wc)?;
        let sg = parity_sign(f.iter().sum::<usize>() + wc.iter().sum::<usize>());
        sum += &signed(&rest * &q, sg);
    }
    Ok((full, sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn annihilates(g: &ModuleElement, y: &PolyMatrix) -> bool {
        ModuleElement::combine_rows(&g.components, &y.row_elements()).is_zero()
    }

    #[test]
    fn koszul_and_small_shapes() {
        let y = PolyMatrix::generic_rect(1, 2, 1);
        let g = determinantal_generators(&y).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].components, vec![Poly::x(1, 2, 1), -&Poly::x(1, 1, 1)]);
        for (r, c, count) in [(3, 2, 1), (4, 2, 4), (4, 3, 1), (5, 3, 5)] {
            let y = PolyMatrix::generic_rect(1, r, c);
            let gens = determinantal_generators(&y).unwrap();
            assert_eq!(gens.len(), count);
            assert!(gens.iter().all(|g| annihilates(g, &y)));
        }
        assert!(determinantal_generators(&PolyMatrix::generic_rect(1, 2, 2)).is_err());
    }

    #[test]
    fn determinantal_relations_are_groebner() {
        for (r, c) in [(3, 1), (4, 2), (5, 2), (5, 3)] {
            let gens = determinantal_generators(&PolyMatrix::generic_rect(1, r, c)).unwrap();
            let b = buchberger(gens.clone(), BuchbergerOptions::default()).unwrap();
            assert_eq!(b.len(), gens.len(), "{r}x{c}");
        }
    }

    #[test]
    fn normal_form_basics() {
        let y = PolyMatrix::generic_rect(1, 4, 2);
        let gens = determinantal_generators(&y).unwrap();
        let b = GroebnerBasis::from_elements(gens.clone(), BuchbergerOptions::default()).unwrap();
        let nf = normal_form(&ModuleElement::zero(4), &b);
        assert!(nf.remainder.is_zero() && nf.quotients.iter().all(Poly::is_zero));
        let nf = normal_form(&gens[0], &b);
        assert!(nf.remainder.is_zero());
        assert_eq!(nf.quotients[0], Poly::one());
        let v = {
            let mut v = gens[1].mul_poly(&Poly::x(1, 3, 1));
            v.add_assign(&gens[2].mul_poly(&Poly::x(1, 1, 2)));
            v
        };
        let nf = normal_form(&v, &b);
        assert!(nf.remainder.is_zero());
        let back = ModuleElement::combine_rows(&nf.quotients, &b.elements);
        assert_eq!(back, v);
    }

    #[test]
    fn expressions_reproduce_elements() {
        let x = Poly::x(1, 1, 1);
        let y = Poly::x(1, 1, 2);
        let z = Poly::x(1, 2, 1);
        let gens = vec![
            ModuleElement::new(vec![&x * &y, z.clone()]),
            ModuleElement::new(vec![&x * &x, y.clone()]),
        ];
        let b = buchberger(gens.clone(), BuchbergerOptions::default()).unwrap();
        assert!(b.len() > 2);
        assert!(b.is_groebner());
        for (e, expr) in b.elements.iter().zip(&b.expressions) {
            assert_eq!(&ModuleElement::combine_rows(expr, &gens), e);
        }
    }

    #[test]
    fn schreyer_koszul() {
        let a = Poly::x(1, 1, 1);
        let c = Poly::x(1, 2, 1);
        let gens = vec![
            ModuleElement::new(vec![a.clone()]),
            ModuleElement::new(vec![c.scale(&rat(2))]),
        ];
        let b = GroebnerBasis::from_elements(gens, BuchbergerOptions::default()).unwrap();
        let syz = schreyer_syzygies(&b);
        assert_eq!(syz.len(), 1);
        let t = syz[0].tau();
        assert_eq!(t, vec![c.scale(&rat(2)), -&a]);
        assert!(ModuleElement::combine_rows(&t, &b.elements).is_zero());
        assert!(syz[0].is_init_dominant(&b));

        let split = GroebnerBasis::from_elements(
            vec![
                ModuleElement::unit(2, 0, a.clone()),
                ModuleElement::unit(2, 1, c),
            ],
            BuchbergerOptions::default(),
        )
        .unwrap();
        assert!(schreyer_syzygies(&split).is_empty());
    }

    #[test]
    fn filter() {
        let sq = ModuleElement::new(vec![Poly::x(1, 1, 1).pow(2)]);
        let ok = ModuleElement::new(vec![&Poly::x(1, 1, 1) * &Poly::x(2, 1, 2), Poly::zero()]);
        assert_eq!(multilinear_filter(&[sq, ok.clone()]), vec![ok]);
        assert!(multilinear_filter(&[]).is_empty());
    }

    #[test]
    fn multilinear_chain_generators() {
        let y = stacked_generic(2, 3).unwrap();
        let gens = multilinear_determinantal_generators(2, 3).unwrap();
        assert_eq!(gens.len(), 8);
        assert!(gens.iter().all(|g| annihilates(g, &y)));
    }

    fn xi_rows(k_set: &[usize], l_set: &[usize], n: usize) -> Vec<ModuleElement> {
        crate::symmat::build_xi(k_set, l_set, n).unwrap().row_elements()
    }

    #[test]
    fn families_match_their_expressions() {
        for (n, m) in [(1, 2), (2, 2), (2, 3)] {
            let all: Vec<usize> = (1..=m).collect();
            let rows = xi_rows(&all, &all, n);
            let (gp, gpp) = build_g_families_kl(n, &all, &all).unwrap();
            for f in gp.iter().chain(&gpp) {
                assert_eq!(ModuleElement::combine_rows(&f.expression, &rows), f.element);
            }
        }
        // n = 1: |K| ≤ 1, so G' is just the rows x^(k) u_1.
        let (gp, gpp) = build_g_families(1, 2).unwrap();
        assert_eq!(gp.len(), 2);
        assert_eq!(gp[1].components, vec![Poly::x(2, 1, 1)]);
        assert_eq!(gpp, gp);
    }

    #[test]
    fn families_are_multilinear_groebner_bases() {
        let (gp, gpp) = build_g_families(2, 2).unwrap();
        let opts = BuchbergerOptions::multilinear();
        assert!(GroebnerBasis::from_elements(gp.clone(), opts.clone()).unwrap().is_groebner());
        assert!(GroebnerBasis::from_elements(gpp.clone(), opts.clone()).unwrap().is_groebner());
        let mut both = gp;
        both.extend(gpp);
        let union = GroebnerBasis::from_elements(both.clone(), opts.clone()).unwrap();
        assert!(union.is_groebner());
        let full = buchberger(xi_rows(&[1, 2], &[1, 2], 2), opts).unwrap();
        assert!(reduces_to_zero(&multilinear_filter(&full.elements), &union));
        assert!(reduces_to_zero(&multilinear_filter(&both), &full));
    }

    fn example_spec() -> DetFamilySpec {
        DetFamilySpec::new(4, vec![1, 2, 3], vec![2, 3, 4, 5], vec![4, 1, 2], vec![3, 4, 2, 1]).unwrap()
    }

    #[test]
    fn laplace_trivial_and_example() {
        let spec = DetFamilySpec::new(2, vec![1], vec![1], vec![1], vec![1]).unwrap();
        let (l, r) = polarized_laplace_check(&spec, &[1], &[1], 1, 1).unwrap();
        assert_eq!(l, Poly::x(1, 1, 1));
        assert_eq!(r, Poly::x(1, 1, 1));

        let spec = example_spec();
        for alpha in 3..=4 {
            for beta in 4..=4 {
                let (l, r) = polarized_laplace_check(&spec, &[1, 3], &[2, 4], alpha, beta).unwrap();
                assert_eq!(l, r);
                assert!(!l.is_zero());
                let (l, r) = polarized_laplace_check_full(&spec, alpha, beta).unwrap();
                assert_eq!(l, r);
            }
        }
        let (full, sum) = laplace_expansion_check(&spec, &[1, 3], 4).unwrap();
        assert_eq!(full, sum);
        assert!(polarized_laplace_check(&spec, &[1], &[2, 4], 3, 4).is_err());
        assert!(polarized_laplace_check_full(&spec, 2, 4).is_err());
    }

    #[test]
    fn laplace_c_two_at_n_two() {
        let spec = DetFamilySpec::new(2, vec![1, 2], vec![1, 2], vec![1, 2], vec![2, 1]).unwrap();
        let (l, r) = polarized_laplace_check(&spec, &[1, 2], &[1, 2], 2, 2).unwrap();
        assert_eq!(l, r);
        let (l, r) = polarized_laplace_check_full(&spec, 2, 2).unwrap();
        assert_eq!(l, r);
    }
}
