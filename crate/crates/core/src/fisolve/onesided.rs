use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_fi, random_multilinear_scalar, FISpec};
use crate::error::{Error, Result};
use crate::modgb::{buchberger, multilinear_chains, normal_form, BuchbergerOptions, GroebnerBasis};
use crate::perm::{arrangement_sign, subsets, tuples};
use crate::poly::{ModuleElement, Poly, VarId};
use crate::symmat::{bracket_det, PolyMatrix};

/// One coefficient `λ_{ℓIJ}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneSidedTerm {
    pub ell: usize,
    #[serde(rename = "I")]
    pub i: Vec<usize>,
    #[serde(rename = "J")]
    pub j: Vec<usize>,
    pub lambda: Poly,
}

/// `F_k = Σ_{ℓ,I,J} (−1)^s λ_{ℓIJ} [(i_1,j_1),…,(i_s,j_s)^,…,(i_{n+1},j_{n+1})] e_{ℓ j_s}`
/// where `i_s = k`. Terms are sorted by `(ℓ, I, J)` and nonzero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneSidedSolution {
    pub n: usize,
    pub m: usize,
    pub terms: Vec<OneSidedTerm>,
}

impl OneSidedSolution {
    fn from_map(n: usize, m: usize, map: BTreeMap<(usize, Vec<usize>, Vec<usize>), Poly>) -> Self {
        let terms = map
            .into_iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|((ell, i, j), lambda)| OneSidedTerm { ell, i, j, lambda })
            .collect();
        OneSidedSolution { n, m, terms }
    }
}

fn bracket_without(i: &[usize], j: &[usize], s: usize, n: usize) -> Result<Poly> {
    let pairs: Vec<(usize, usize)> = i
        .iter()
        .zip(j)
        .enumerate()
        .filter(|&(t, _)| t != s)
        .map(|(_, (&a, &b))| (a, b))
        .collect();
    bracket_det(&pairs, n)
}

fn sign_of(s: usize) -> i64 {
    // `s` is 0-based here; the formula uses the 1-based position.
    if s % 2 == 0 {
        -1
    } else {
        1
    }
}

/// The coordinate matrices `F_1, …, F_m` described by a solution.
pub fn reconstruct_one_sided(sol: &OneSidedSolution) -> Result<BTreeMap<usize, PolyMatrix>> {
    let n = sol.n;
    let mut out: BTreeMap<usize, PolyMatrix> =
        (1..=sol.m).map(|k| (k, PolyMatrix::zeros(n, n))).collect();
    for t in &sol.terms {
        if t.i.len() != n + 1 || t.j.len() != n + 1 || t.ell == 0 || t.ell > n {
            return Err(Error::Malformed(format!("bad index data {:?} {:?}", t.i, t.j)));
        }
        for s in 0..=n {
            let b = bracket_without(&t.i, &t.j, s, n)?;
            let entry = (&b * &t.lambda).scale(&crate::poly::rat(sign_of(s)));
            let target = out
                .get_mut(&t.i[s])
                .ok_or_else(|| Error::OutOfBounds(format!("index {} > m", t.i[s])))?;
            *target.get_mut(t.ell - 1, t.j[s] - 1) += &entry;
        }
    }
    Ok(out)
}

/// Multilinear Gröbner basis of the syzygies on the rows of the stacked
/// generic matrix, generated by the determinantal relations
/// `Σ_s (−1)^s [… ŝ …] u_{(i_s−1)n+j_s}` (1-based `s`).
fn syzygy_basis(n: usize, m: usize) -> Result<(Vec<Vec<(usize, usize)>>, GroebnerBasis)> {
    let chains = multilinear_chains(n, m)?;
    let labels = chains.iter().map(|(c, _)| c.clone()).collect();
    let gens: Vec<ModuleElement> = chains
        .into_iter()
        .map(|(_, g)| g.scale(&crate::poly::rat(-1)))
        .collect();
    let groups = (0..m * n).map(|p| (p / n + 1) as u16).collect();
    let opts = BuchbergerOptions::multilinear().with_position_groups(groups);
    Ok((labels, buchberger(gens, opts)?))
}

/// Solves a left-sided identity `Σ_k F_k x_k = 0`. Each row slice `ℓ` is a
/// syzygy on the rows of the stacked generic matrix; dividing it by the
/// determinantal basis gives the `λ_{ℓIJ}`.
pub fn solve_one_sided(spec: &FISpec) -> Result<OneSidedSolution> {
    if !spec.l_set.is_empty() {
        return Err(Error::Malformed("one-sided solve needs L = ∅".into()));
    }
    if !check_fi(spec)?.holds {
        return Err(Error::IdentityFails);
    }
    let (n, m) = (spec.n, spec.m);
    if spec.is_zero() {
        return Ok(OneSidedSolution {
            n,
            m,
            terms: vec![],
        });
    }
    if m <= n {
        return Err(Error::NoSolution(format!(
            "with m = {m} ≤ n = {n} only the zero solution exists"
        )));
    }
    let (labels, basis) = syzygy_basis(n, m)?;
    let slices: Vec<Result<Vec<Poly>>> = (1..=n)
        .into_par_iter()
        .map(|ell| {
            let mut v = ModuleElement::zero(m * n);
            for (&k, h) in &spec.f {
                for j in 0..n {
                    v.components[(k - 1) * n + j] = h.get(ell - 1, j).clone();
                }
            }
            let nf = normal_form(&v, &basis);
            if !nf.remainder.is_zero() {
                return Err(Error::Internal(format!(
                    "row {ell} is not in the determinantal syzygy module"
                )));
            }
            Ok(basis.lift(&nf.quotients))
        })
        .collect();
    let mut map = BTreeMap::new();
    for (ell, coeffs) in (1..=n).zip(slices) {
        for (chain, lambda) in labels.iter().zip(coeffs?) {
            if lambda.is_zero() {
                continue;
            }
            let i = chain.iter().map(|&(k, _)| k).collect();
            let j = chain.iter().map(|&(_, t)| t).collect();
            map.insert((ell, i, j), lambda);
        }
    }
    let sol = OneSidedSolution::from_map(n, m, map);
    let back = reconstruct_one_sided(&sol)?;
    for k in 1..=m {
        let want = spec
            .f
            .get(&k)
            .cloned()
            .unwrap_or_else(|| PolyMatrix::zeros(n, n));
        if back[&k] != want {
            return Err(Error::Internal(format!("reconstruction of F_{k} differs")));
        }
    }
    Ok(sol)
}

/// Random left-sided identity built from `count` determinantal generators
/// with random multilinear coefficients. Returns the spec and the solution
/// it was built from.
pub fn random_one_sided<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    count: usize,
) -> Result<(FISpec, OneSidedSolution)> {
    let all: Vec<usize> = (1..=m).collect();
    let (f, sol) = random_one_sided_on(rng, n, m, &all, count)?;
    let spec = FISpec::left(n, f.into_values().collect())?;
    Ok((spec, sol))
}

/// Like [`random_one_sided`] but every bracket uses indices from `groups`,
/// so `F_k = 0` for `k` outside it. Returns `F_1, …, F_m`.
pub fn random_one_sided_on<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    groups: &[usize],
    count: usize,
) -> Result<(BTreeMap<usize, PolyMatrix>, OneSidedSolution)> {
    if groups.len() <= n {
        return Err(Error::OutOfBounds(format!(
            "need more than n = {n} groups, got {}",
            groups.len()
        )));
    }
    if groups.iter().any(|&k| k == 0 || k > m) {
        return Err(Error::OutOfBounds(format!("groups must lie in 1..={m}")));
    }
    let all: Vec<usize> = (1..=m).collect();
    let sets = subsets(groups, n + 1);
    let js = tuples(n, n + 1);
    let mut map: BTreeMap<(usize, Vec<usize>, Vec<usize>), Poly> = BTreeMap::new();
    for _ in 0..count {
        let ell = rng.gen_range(1..=n);
        let i = sets[rng.gen_range(0..sets.len())].clone();
        let j = js[rng.gen_range(0..js.len())].clone();
        let outside: Vec<usize> = all.iter().copied().filter(|k| !i.contains(k)).collect();
        let terms = rng.gen_range(1..=2);
        let lambda = random_multilinear_scalar(rng, n, &outside, terms);
        let e = map.entry((ell, i, j)).or_insert_with(Poly::zero);
        *e += &lambda;
    }
    let sol = OneSidedSolution::from_map(n, m, map);
    let f = reconstruct_one_sided(&sol)?;
    Ok((f, sol))
}

/// `S_k` with `F_k(x, …, x) = det(x)·S_k(x)`, `x = X_1`. Each bracket with
/// all arguments equal collapses to `±det(x)` (or 0 on a repeated row).
pub fn det_trace_extract(sol: &OneSidedSolution, k: usize) -> Result<PolyMatrix> {
    let n = sol.n;
    if sol.m <= n && !sol.terms.is_empty() {
        return Err(Error::Malformed("need m > n".into()));
    }
    let collapse = |v: VarId| Some(Poly::x(1, v.i as usize, v.j as usize));
    let mut s_k = PolyMatrix::zeros(n, n);
    for t in &sol.terms {
        let Some(s) = t.i.iter().position(|&i| i == k) else {
            continue;
        };
        let rest: Vec<usize> = t
            .j
            .iter()
            .enumerate()
            .filter(|&(u, _)| u != s)
            .map(|(_, &j)| j)
            .collect();
        let sign = arrangement_sign(&rest) * sign_of(s);
        if sign == 0 {
            continue;
        }
        let lam = t.lambda.substitute(&collapse).scale(&crate::poly::rat(sign));
        *s_k.get_mut(t.ell - 1, t.j[s] - 1) += &lam;
    }
    let f = reconstruct_one_sided(sol)?;
    let t_k = f
        .get(&k)
        .map(|h| h.substitute(&collapse))
        .unwrap_or_else(|| PolyMatrix::zeros(n, n));
    let det = PolyMatrix::generic(1, n)?.det()?;
    if t_k != s_k.scale_poly(&det) {
        return Err(Error::Internal("T_k ≠ det·S_k".into()));
    }
    Ok(s_k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpi::{basic_nonstandard_fi, unit_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn koszul_case() {
        let f = vec![
            PolyMatrix::scalar(1, &Poly::x(2, 1, 1)),
            PolyMatrix::scalar(1, &-&Poly::x(1, 1, 1)),
        ];
        let spec = FISpec::left(1, f).unwrap();
        let sol = solve_one_sided(&spec).unwrap();
        assert_eq!(sol.terms.len(), 1);
        let t = &sol.terms[0];
        assert_eq!((t.ell, t.i.clone(), t.j.clone()), (1, vec![1, 2], vec![1, 1]));
        assert_eq!(t.lambda, Poly::int(-1));
    }

    #[test]
    fn zero_and_small_m() {
        let spec = FISpec::left(2, vec![PolyMatrix::zeros(2, 2); 3]).unwrap();
        assert!(solve_one_sided(&spec).unwrap().terms.is_empty());
        let spec = FISpec::left(2, vec![PolyMatrix::zeros(2, 2); 2]).unwrap();
        assert!(solve_one_sided(&spec).unwrap().terms.is_empty());
    }

    #[test]
    fn basic_identity_round_trip() {
        let units: Vec<_> = [(1, 2), (2, 1), (1, 1)]
            .iter()
            .map(|&(i, j)| unit_matrix(2, i, j))
            .collect();
        let spec = FISpec::left(2, basic_nonstandard_fi(2, &units).unwrap()).unwrap();
        let sol = solve_one_sided(&spec).unwrap();
        assert!(!sol.terms.is_empty());
        assert_eq!(
            reconstruct_one_sided(&sol).unwrap().into_values().collect::<Vec<_>>(),
            spec.f.values().cloned().collect::<Vec<_>>()
        );
    }

    #[test]
    fn random_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in [3, 4] {
            for _ in 0..3 {
                let (spec, _) = random_one_sided(&mut rng, 2, m, 3).unwrap();
                assert!(check_fi(&spec).unwrap().holds);
                solve_one_sided(&spec).unwrap();
            }
        }
    }

    #[test]
    fn det_factor() {
        // −(1/2)[Q̃_2(x1, x2), x3] with Q̃_2 the noncentral part of Q_2:
        // F_3(x, x) = det(x)·1.
        let id = crate::symmat::rational_identity(2);
        let f: Vec<_> = basic_nonstandard_fi(2, &[id.clone(), id.clone(), id])
            .unwrap()
            .into_iter()
            .map(|h| h.scale(&crate::poly::ratio(-1, 2)))
            .collect();
        let sol = solve_one_sided(&FISpec::left(2, f).unwrap()).unwrap();
        let s3 = det_trace_extract(&sol, 3).unwrap();
        assert_eq!(s3, PolyMatrix::identity(2));
        let empty = OneSidedSolution {
            n: 2,
            m: 3,
            terms: vec![],
        };
        assert!(det_trace_extract(&empty, 1).unwrap().is_zero());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (_, sol) = random_one_sided(&mut rng, 2, 3, 4).unwrap();
        for k in 1..=3 {
            det_trace_extract(&sol, k).unwrap();
        }
    }
}
