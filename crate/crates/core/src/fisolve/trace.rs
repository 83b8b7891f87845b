//! Commuting traces `T(x) = t(x, …, x)` with `[T(x), x] = 0`, and their
//! standard forms `T(x) = Σ_i μ_i(x) x^i`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{decompose_two_sided, FISpec, OneSidedSolution, OneSidedTerm};
use crate::error::{Error, Result};
use crate::gpi::{noncentral_part, MatrixArg};
use crate::linalg::solve_poly_combination;
use crate::perm::{factorial, permutations, tuples};
use crate::poly::{ratio, Poly, VarId};
use crate::symmat::PolyMatrix;

/// `mu[i]` is a homogeneous polynomial of degree `r − i` in the entries of
/// `x = X_1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceForm {
    pub n: usize,
    pub r: usize,
    pub mu: Vec<Poly>,
}

fn only_group_one(p: &Poly) -> bool {
    p.terms()
        .all(|(m, _)| m.factors().iter().all(|(v, _)| v.k == 1))
}

/// `Σ_i μ_i(x) x^i` on the generic `x = X_1`.
pub fn eval_trace_form(tf: &TraceForm) -> Result<PolyMatrix> {
    let x = PolyMatrix::generic(1, tf.n)?;
    let mut power = PolyMatrix::identity(tf.n);
    let mut out = PolyMatrix::zeros(tf.n, tf.n);
    for mu in &tf.mu {
        out.add_assign(&power.scale_poly(mu));
        power = power.checked_mul(&x)?;
    }
    Ok(out)
}

/// `T(x) = t(x, …, x)`: every group of `t` set to `X_1`.
pub fn trace_of_map(t: &PolyMatrix) -> PolyMatrix {
    t.substitute(&|v| Some(Poly::x(1, v.i as usize, v.j as usize)))
}

/// `Σ_{σ ∈ S_r} t(x_σ(1), …, x_σ(r))`.
pub fn symmetrize(t: &PolyMatrix, r: usize) -> PolyMatrix {
    let mut out = PolyMatrix::zeros(t.nrows(), t.ncols());
    for s in permutations(r) {
        out.add_assign(&t.substitute(&|v| {
            Some(Poly::x(s[v.k as usize - 1] + 1, v.i as usize, v.j as usize))
        }));
    }
    out
}

/// The symmetric `d`-linear map in groups `1..=d` whose trace is `T`.
/// Entries of `T` must be homogeneous of degree `d` in the entries of `X_1`.
pub fn polarize(t: &PolyMatrix, d: usize) -> Result<PolyMatrix> {
    let perms = permutations(d);
    let scale = ratio(1, factorial(d) as i64);
    let mut out = PolyMatrix::zeros(t.nrows(), t.ncols());
    for a in 0..t.nrows() {
        for b in 0..t.ncols() {
            let e = t.get(a, b);
            if !only_group_one(e) || !(e.is_zero() || e.is_homogeneous_of_degree(d as u32)) {
                return Err(Error::Malformed(format!(
                    "entry ({}, {}) is not homogeneous of degree {d} in X_1",
                    a + 1,
                    b + 1
                )));
            }
            let mut acc = Poly::zero();
            for (m, c) in e.terms() {
                let vars: Vec<VarId> = m
                    .factors()
                    .iter()
                    .flat_map(|&(v, k)| std::iter::repeat(v).take(k as usize))
                    .collect();
                for s in &perms {
                    let mut term = Poly::constant(c * &scale);
                    for (g, &i) in s.iter().enumerate() {
                        let v = vars[i];
                        term = &term * &Poly::x(g + 1, v.i as usize, v.j as usize);
                    }
                    acc += &term;
                }
            }
            out.set(a, b, acc);
        }
    }
    Ok(out)
}

/// Coefficients `c_0, …, c_n` of the characteristic polynomial of the
/// generic `X_1`, so that `Σ c_i X_1^i = 0`; `c_n = 1`, `c_0 = (−1)^n det`.
pub fn charpoly_coeffs(n: usize) -> Result<Vec<Poly>> {
    let x = PolyMatrix::generic(1, n)?;
    let mut power = x.clone();
    let mut p = vec![Poly::zero()];
    for _ in 1..=n {
        p.push(power.trace());
        power = power.checked_mul(&x)?;
    }
    let mut e = vec![Poly::one()];
    for i in 1..=n {
        let mut acc = Poly::zero();
        for j in 1..=i {
            let t = &e[i - j] * &p[j];
            if j % 2 == 1 {
                acc += &t;
            } else {
                acc -= &t;
            }
        }
        e.push(acc.scale(&ratio(1, i as i64)));
    }
    Ok((0..=n)
        .map(|i| {
            let k = n - i;
            if k % 2 == 0 {
                e[k].clone()
            } else {
                -&e[k]
            }
        })
        .collect())
}

/// The unique representative of a standard form: for `j = 0, 1, …, r − n`
/// the multiple of `det` in `μ_j` is traded for `x^j q_n(x)`, so that no
/// term of `μ_0, …, μ_{r−n}` is divisible by the leading term of `det`.
pub fn canonicalize_trace_form(tf: &TraceForm) -> Result<TraceForm> {
    let n = tf.n;
    let c = charpoly_coeffs(n)?;
    let mut mu = tf.mu.clone();
    for j in 0..mu.len() {
        if j + n >= mu.len() {
            break;
        }
        let (q, _) = mu[j].div_rem(&c[0]);
        if q.is_zero() {
            continue;
        }
        for (i, ci) in c.iter().enumerate() {
            mu[j + i] -= &(&q * ci);
        }
    }
    Ok(TraceForm { n, r: tf.r, mu })
}

/// Standard form of the commuting trace of the `r`-linear map with
/// coordinates `t` (entries multilinear in groups `1..=r`), following the
/// induction on `r`: polarize the commuting condition, decompose the
/// resulting two-sided identity, set all arguments equal, average the
/// one-sided parts away and recurse on the `(r−1)`-linear part `P`.
pub fn commuting_trace_form(t: &PolyMatrix, n: usize, r: usize) -> Result<TraceForm> {
    if t.nrows() != n || t.ncols() != n {
        return Err(Error::Dimension(format!("expected a {n}x{n} map")));
    }
    let groups = (1..=r as u16).collect();
    if t.entries().any(|e| !e.is_zero() && !e.is_multilinear(&groups)) {
        return Err(Error::NotMultilinear(format!("map must be {r}-linear")));
    }
    let tr = trace_of_map(t);
    let x = PolyMatrix::generic(1, n)?;
    if !tr.checked_mul(&x)?.checked_sub(&x.checked_mul(&tr)?)?.is_zero() {
        return Err(Error::IdentityFails);
    }
    let mu = standard_form(t, n, r)?;
    let tf = canonicalize_trace_form(&TraceForm { n, r, mu })?;
    if eval_trace_form(&tf)? != tr {
        return Err(Error::Internal("standard form does not reproduce T".into()));
    }
    Ok(tf)
}

/// Random standard form: `μ_i` a product of `r − i` random linear forms in
/// the entries of `X_1`, scaled by a small integer (possibly zero).
pub fn random_trace_form<R: rand::Rng>(rng: &mut R, n: usize, r: usize) -> TraceForm {
    let mu = (0..=r)
        .map(|i| {
            if rng.gen_bool(0.25) {
                return Poly::zero();
            }
            super::random_multilinear_scalar(rng, n, &vec![1; r - i], 1)
        })
        .collect();
    TraceForm { n, r, mu }
}

fn scalar_of(m: &PolyMatrix) -> Result<Poly> {
    m.as_scalar()
        .ok_or_else(|| Error::Internal("expected a scalar matrix".into()))
}

fn standard_form(t: &PolyMatrix, n: usize, r: usize) -> Result<Vec<Poly>> {
    let tr = trace_of_map(t);
    if r == 0 {
        return Ok(vec![scalar_of(&tr)?]);
    }
    let m = r + 1;
    let f = symmetrize(t, r);
    // F(x̄^k): argument slots 1..r filled with the groups of ℕ_m ∖ {k}.
    let maps: BTreeMap<usize, PolyMatrix> = (1..=m)
        .map(|k| {
            let shift = move |g: usize| if g >= k { g + 1 } else { g };
            let h = f.substitute(&|v| Some(Poly::x(shift(v.k as usize), v.i as usize, v.j as usize)));
            (k, h)
        })
        .collect();
    let all: Vec<usize> = (1..=m).collect();
    let spec = FISpec::new(n, m, all.clone(), all, maps.clone(), maps)?;
    let d = decompose_two_sided(&spec)?;

    let inv = ratio(1, factorial(r) as i64);
    let mut p_k: Vec<PolyMatrix> = vec![PolyMatrix::zeros(n, n); m + 1];
    for b in &d.p {
        p_k[b.k].add_assign(&trace_of_map(&b.p).scale(&inv));
    }
    let sum_rest = (2..=m).fold(PolyMatrix::zeros(n, n), |mut acc, l| {
        acc.add_assign(&p_k[l]);
        acc
    });
    let tilde = sum_rest
        .checked_sub(&p_k[1].scale(&ratio(m as i64 - 1, 1)))?
        .scale(&ratio(1, m as i64));
    let p = p_k[1].checked_add(&tilde)?;
    let x = PolyMatrix::generic(1, n)?;
    let mu0 = scalar_of(&tr.checked_sub(&x.checked_mul(&p)?)?)?;
    let pol = polarize(&p, r - 1)?;
    let lower = standard_form(&pol, n, r - 1)?;
    let mut mu = vec![mu0];
    mu.extend(lower);
    Ok(mu)
}

/// Coordinates of the symmetric `n`-linear map `−(1/n!) Q̃_n` in groups
/// `1..=n`. Its trace is `det(x)·1`.
pub fn det_map(n: usize) -> Result<PolyMatrix> {
    let args: Vec<MatrixArg> = (1..=n).map(MatrixArg::Generic).collect();
    let v = crate::gpi::eval(&noncentral_part(n), &args, n)?;
    Ok(v.scale(&ratio(-1, factorial(n) as i64)))
}

/// Looks for a left identity `Σ_{k≤n} F_k x_k + F(x̄^{n+1}) x_{n+1} = 0` with
/// the given `n`-linear `F` (groups `1..=n`) in the last slot. Returns the
/// identity, or `None` if no `F_1, …, F_n` exist.
pub fn left_completion(f: &PolyMatrix, n: usize) -> Result<Option<FISpec>> {
    let m = n + 1;
    let groups: Vec<usize> = (1..=m).collect();
    let mut basis = Vec::new();
    for ell in 1..=n {
        for j in tuples(n, m) {
            basis.push(OneSidedSolution {
                n,
                m,
                terms: vec![OneSidedTerm {
                    ell,
                    i: groups.clone(),
                    j,
                    lambda: Poly::one(),
                }],
            });
        }
    }
    let comps: Vec<BTreeMap<usize, PolyMatrix>> = basis
        .iter()
        .map(super::reconstruct_one_sided)
        .collect::<Result<_>>()?;
    let columns: Vec<Vec<Poly>> = comps
        .iter()
        .map(|c| c[&m].entries().cloned().collect())
        .collect();
    let target: Vec<Poly> = f.entries().cloned().collect();
    let Some(coeffs) = solve_poly_combination(&columns, &target) else {
        return Ok(None);
    };
    let mut out: BTreeMap<usize, PolyMatrix> =
        groups.iter().map(|&k| (k, PolyMatrix::zeros(n, n))).collect();
    for (c, comp) in coeffs.iter().zip(&comps) {
        for (k, h) in comp {
            out.get_mut(k).expect("k in range").add_assign(&h.scale(c));
        }
    }
    let spec = FISpec::left(n, out.into_values().collect())?;
    if &spec.f[&m] != f || !super::check_fi(&spec)?.holds {
        return Err(Error::Internal("left completion failed its check".into()));
    }
    Ok(Some(spec))
}
