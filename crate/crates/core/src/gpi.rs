//! Generalized polynomials with trace factors: the Cayley–Hamilton
//! polynomials `q_n`, `Q_n`, `Q̃_n`, their evaluation and coordinate forms.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm;
use crate::poly::{parse_rational, rat, ratio, Poly, Rational};
use crate::symmat::PolyMatrix;

pub type RatMatrix = Vec<Vec<Rational>>;

/// A letter of a word: an argument slot (1-based) or an inline constant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Slot(usize),
    Const(RatMatrix),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LetterRepr {
    Slot(usize),
    Const(Vec<Vec<String>>),
}

impl Serialize for Letter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Letter::Slot(k) => LetterRepr::Slot(*k),
            Letter::Const(a) => LetterRepr::Const(rat_grid_to_strings(a)),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match LetterRepr::deserialize(d)? {
            LetterRepr::Slot(0) => Err(serde::de::Error::custom("slots are 1-based")),
            LetterRepr::Slot(k) => Ok(Letter::Slot(k)),
            LetterRepr::Const(g) => rat_grid_from_strings(&g)
                .map(Letter::Const)
                .map_err(serde::de::Error::custom),
        }
    }
}

pub fn rat_grid_to_strings(a: &RatMatrix) -> Vec<Vec<String>> {
    a.iter()
        .map(|r| r.iter().map(|c| c.to_string()).collect())
        .collect()
}

pub fn rat_grid_from_strings(g: &[Vec<String>]) -> Result<RatMatrix> {
    g.iter()
        .map(|r| r.iter().map(|s| parse_rational(s)).collect())
        .collect()
}

/// Rotate a cyclic word to its lexicographically least rotation.
pub fn min_rotation(w: &[Letter]) -> Vec<Letter> {
    (0..w.len().max(1))
        .map(|r| {
            let mut v = w.to_vec();
            v.rotate_left(r.min(w.len()));
            v
        })
        .min()
        .unwrap_or_default()
}

/// Trace factors and word of a term, in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct TermKey {
    traces: Vec<Vec<Letter>>,
    word: Vec<Letter>,
}

impl TermKey {
    fn canonical(traces: Vec<Vec<Letter>>, word: Vec<Letter>) -> Self {
        let mut traces: Vec<Vec<Letter>> = traces.iter().map(|t| min_rotation(t)).collect();
        traces.sort();
        TermKey { traces, word }
    }
}

// Longer words first, then trace factors, then the word itself.
impl Ord for TermKey {
    fn cmp(&self, other: &Self) -> Ordering {
        (Reverse(self.word.len()), &self.traces, &self.word).cmp(&(
            Reverse(other.word.len()),
            &other.traces,
            &other.word,
        ))
    }
}

impl PartialOrd for TermKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenTerm {
    pub coeff: Rational,
    pub traces: Vec<Vec<Letter>>,
    pub word: Vec<Letter>,
}

#[derive(Serialize, Deserialize)]
struct GenTermRepr {
    coeff: String,
    traces: Vec<Vec<Letter>>,
    word: Vec<Letter>,
}

#[derive(Serialize, Deserialize)]
struct GenPolyRepr {
    arity: usize,
    terms: Vec<GenTermRepr>,
}

/// Formal generalized polynomial `Σ c · tr(w_1)…tr(w_r) · w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenPoly {
    arity: usize,
    terms: BTreeMap<TermKey, Rational>,
}

impl GenPoly {
    pub fn zero(arity: usize) -> Self {
        GenPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(arity: usize) -> Self {
        GenPoly::term(arity, Rational::one(), vec![], vec![])
    }

    pub fn term(
        arity: usize,
        coeff: Rational,
        traces: Vec<Vec<Letter>>,
        word: Vec<Letter>,
    ) -> Self {
        let mut g = GenPoly::zero(arity);
        g.add_term(coeff, traces, word);
        g
    }

    /// The monomial `x_{s_1} … x_{s_k}`.
    pub fn word(arity: usize, slots: &[usize]) -> Self {
        GenPoly::term(
            arity,
            Rational::one(),
            vec![],
            slots.iter().map(|&s| Letter::Slot(s)).collect(),
        )
    }

    /// `tr(x_{s_1} … x_{s_k})`.
    pub fn trace_of(arity: usize, slots: &[usize]) -> Self {
        GenPoly::term(
            arity,
            Rational::one(),
            vec![slots.iter().map(|&s| Letter::Slot(s)).collect()],
            vec![],
        )
    }

    pub fn add_term(&mut self, coeff: Rational, traces: Vec<Vec<Letter>>, word: Vec<Letter>) {
        if coeff.is_zero() {
            return;
        }
        for l in traces.iter().flatten().chain(&word) {
            if let Letter::Slot(s) = l {
                self.arity = self.arity.max(*s);
            }
        }
        let key = TermKey::canonical(traces, word);
        let entry = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn with_arity(mut self, arity: usize) -> Self {
        self.arity = self.arity.max(arity);
        self
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

    pub fn terms(&self) -> Vec<GenTerm> {
        self.terms
            .iter()
            .map(|(k, c)| GenTerm {
                coeff: c.clone(),
                traces: k.traces.clone(),
                word: k.word.clone(),
            })
            .collect()
    }

    pub fn add(&self, other: &GenPoly) -> GenPoly {
        let mut out = self.clone().with_arity(other.arity);
        for (k, c) in &other.terms {
            out.add_term(c.clone(), k.traces.clone(), k.word.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> GenPoly {
        let mut out = GenPoly::zero(self.arity);
        for (k, d) in &self.terms {
            out.add_term(d * c, k.traces.clone(), k.word.clone());
        }
        out
    }

    pub fn neg(&self) -> GenPoly {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &GenPoly) -> GenPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &GenPoly) -> GenPoly {
        let mut out = GenPoly::zero(self.arity.max(other.arity));
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let mut traces = ka.traces.clone();
                traces.extend(kb.traces.iter().cloned());
                let mut word = ka.word.clone();
                word.extend(kb.word.iter().cloned());
                out.add_term(ca * cb, traces, word);
            }
        }
        out
    }

    /// Rename slot `s` to `f(s)`.
    pub fn relabel(&self, f: &dyn Fn(usize) -> usize, arity: usize) -> GenPoly {
        let map = |l: &Letter| match l {
            Letter::Slot(s) => Letter::Slot(f(*s)),
            c => c.clone(),
        };
        let mut out = GenPoly::zero(arity);
        for (k, c) in &self.terms {
            out.add_term(
                c.clone(),
                k.traces
                    .iter()
                    .map(|t| t.iter().map(map).collect())
                    .collect(),
                k.word.iter().map(map).collect(),
            );
        }
        out
    }

    /// Replace every occurrence of slot `s` by the word `f(s)`.
    pub fn substitute_words(&self, f: &dyn Fn(usize) -> Vec<Letter>, arity: usize) -> GenPoly {
        let map = |w: &[Letter]| -> Vec<Letter> {
            w.iter()
                .flat_map(|l| match l {
                    Letter::Slot(s) => f(*s),
                    c => vec![c.clone()],
                })
                .collect()
        };
        let mut out = GenPoly::zero(arity);
        for (k, c) in &self.terms {
            out.add_term(
                c.clone(),
                k.traces.iter().map(|t| map(t)).collect(),
                map(&k.word),
            );
        }
        out
    }

    /// Terms with a nonempty word.
    pub fn noncentral_terms(&self) -> GenPoly {
        self.filter(|k| !k.word.is_empty())
    }

    /// Terms with an empty word.
    pub fn central_terms(&self) -> GenPoly {
        self.filter(|k| k.word.is_empty())
    }

    fn filter(&self, keep: impl Fn(&TermKey) -> bool) -> GenPoly {
        GenPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Every term uses each slot `1..=arity` exactly once.
    pub fn is_multilinear(&self) -> bool {
        self.terms.keys().all(|k| {
            let mut count = vec![0usize; self.arity + 1];
            for l in k.traces.iter().flatten().chain(&k.word) {
                if let Letter::Slot(s) = l {
                    count[*s] += 1;
                }
            }
            count[1..].iter().all(|&c| c == 1)
        })
    }

    /// Central polynomial from a commutative polynomial in the generic
    /// entries: `x_{ij}^{(k)} = tr(e_{ji} x_{slot(k)})`.
    pub fn from_scalar_poly(
        p: &Poly,
        n: usize,
        slot_of: &dyn Fn(usize) -> usize,
        arity: usize,
    ) -> GenPoly {
        let mut out = GenPoly::zero(arity);
        for (m, c) in p.terms() {
            let mut traces = Vec::new();
            for &(v, e) in m.factors() {
                let unit = unit_matrix(n, v.j as usize, v.i as usize);
                for _ in 0..e {
                    traces.push(vec![
                        Letter::Const(unit.clone()),
                        Letter::Slot(slot_of(v.k as usize)),
                    ]);
                }
            }
            out.add_term(c.clone(), traces, vec![]);
        }
        out
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("GenPoly serializes")
    }
}

pub fn unit_matrix(n: usize, i: usize, j: usize) -> RatMatrix {
    (1..=n)
        .map(|r| {
            (1..=n)
                .map(|c| {
                    if (r, c) == (i, j) {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

impl Serialize for GenPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GenPolyRepr {
            arity: self.arity,
            terms: self
                .terms()
                .into_iter()
                .map(|t| GenTermRepr {
                    coeff: t.coeff.to_string(),
                    traces: t.traces,
                    word: t.word,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GenPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GenPolyRepr::deserialize(d)?;
        let mut g = GenPoly::zero(repr.arity);
        for t in repr.terms {
            let c = parse_rational(&t.coeff).map_err(serde::de::Error::custom)?;
            g.add_term(c, t.traces, t.word);
        }
        if g.arity != repr.arity {
            return Err(serde::de::Error::custom("slot index exceeds arity"));
        }
        Ok(g)
    }
}

fn fmt_letters(f: &mut fmt::Formatter<'_>, w: &[Letter]) -> fmt::Result {
    for l in w {
        match l {
            Letter::Slot(s) => write!(f, "x{s}")?,
            Letter::Const(a) => {
                let rows: Vec<String> = a
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|c| c.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    })
                    .collect();
                write!(f, "[{}]", rows.join(";"))?
            }
        }
    }
    Ok(())
}

impl fmt::Display for GenPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (k, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (idx, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            let bare = k.traces.is_empty() && k.word.is_empty();
            if !a.is_one() || bare {
                write!(f, "{a}")?;
                if !bare {
                    write!(f, " ")?;
                }
            }
            for t in &k.traces {
                write!(f, "tr(")?;
                fmt_letters(f, t)?;
                write!(f, ")")?;
            }
            fmt_letters(f, &k.word)?;
        }
        Ok(())
    }
}

/// `φ_σ` for `σ` on `0..=n` (0-based one-line; `n` plays the role of `n+1`).
pub fn phi(sigma: &[usize]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let n = sigma.len() - 1;
    let mut traces = Vec::new();
    for cyc in perm::cycles(sigma) {
        if !cyc.contains(&n) {
            traces.push(cyc.iter().map(|c| c + 1).collect());
        }
    }
    let mut word = Vec::new();
    let mut c = sigma[n];
    while c != n {
        word.push(c + 1);
        c = sigma[c];
    }
    (traces, word)
}

fn slot_letters(v: &[usize]) -> Vec<Letter> {
    v.iter().map(|&s| Letter::Slot(s)).collect()
}

/// `Q_n = Σ_{σ ∈ S_{n+1}} (-1)^σ φ_σ`. `Q_0 = 1`.
pub fn polarized_ch(n: usize) -> GenPoly {
    let mut out = GenPoly::zero(n);
    for sigma in perm::permutations(n + 1) {
        let (traces, word) = phi(&sigma);
        out.add_term(
            rat(perm::sign(&sigma)),
            traces.iter().map(|t| slot_letters(t)).collect(),
            slot_letters(&word),
        );
    }
    out
}

/// `Q̃_n`: the terms of `Q_n` with a nonempty word.
pub fn noncentral_part(n: usize) -> GenPoly {
    polarized_ch(n).noncentral_terms()
}

/// `q_n(x) = x^n + τ_1(x) x^{n-1} + … + τ_n(x)` with `τ_i = (-1)^i e_i`, the
/// `e_i` expanded in power-sum traces by Newton's identities.
pub fn ch_poly(n: usize) -> Result<GenPoly> {
    if n == 0 {
        return Err(Error::OutOfBounds("ch_poly needs n ≥ 1".into()));
    }
    let power_trace = |j: usize| GenPoly::trace_of(1, &vec![1; j]);
    let mut e = vec![GenPoly::one(1)];
    for i in 1..=n {
        let mut acc = GenPoly::zero(1);
        for j in 1..=i {
            let t = e[i - j].mul(&power_trace(j));
            acc = if j % 2 == 1 { acc.add(&t) } else { acc.sub(&t) };
        }
        e.push(acc.scale(&ratio(1, i as i64)));
    }
    let mut q = GenPoly::zero(1);
    for (i, ei) in e.iter().enumerate() {
        let sign = if i % 2 == 0 { rat(1) } else { rat(-1) };
        q = q.add(&ei.mul(&GenPoly::word(1, &vec![1; n - i])).scale(&sign));
    }
    Ok(q)
}

/// Argument of an evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatrixArg {
    Const(RatMatrix),
    /// The generic matrix `X_k`.
    Generic(usize),
    /// `a · X_k`.
    Scaled(RatMatrix, usize),
    /// Any polynomial matrix.
    Matrix(PolyMatrix),
}

impl MatrixArg {
    pub fn to_matrix(&self, n: usize) -> Result<PolyMatrix> {
        let m = match self {
            MatrixArg::Const(a) => PolyMatrix::from_rationals(a)?,
            MatrixArg::Generic(k) => PolyMatrix::generic(*k, n)?,
            MatrixArg::Scaled(a, k) => {
                PolyMatrix::from_rationals(a)?.checked_mul(&PolyMatrix::generic(*k, n)?)?
            }
            MatrixArg::Matrix(m) => m.clone(),
        };
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::Dimension(format!("argument is not {n}x{n}")));
        }
        Ok(m)
    }

    /// Group index and left constant for generic-type arguments.
    fn generic_parts(&self, n: usize) -> Option<(usize, PolyMatrix)> {
        match self {
            MatrixArg::Generic(k) => Some((*k, PolyMatrix::identity(n))),
            MatrixArg::Scaled(a, k) => Some((*k, PolyMatrix::from_rationals(a).ok()?)),
            _ => None,
        }
    }
}

fn letters_product(w: &[Letter], vals: &[PolyMatrix], n: usize) -> Result<PolyMatrix> {
    let mut acc: Option<PolyMatrix> = None;
    for l in w {
        let m = match l {
            Letter::Slot(s) => vals[s - 1].clone(),
            Letter::Const(a) => {
                let c = PolyMatrix::from_rationals(a)?;
                if c.nrows() != n || c.ncols() != n {
                    return Err(Error::Dimension(format!("constant is not {n}x{n}")));
                }
                c
            }
        };
        acc = Some(match acc {
            None => m,
            Some(p) => p.checked_mul(&m)?,
        });
    }
    Ok(acc.unwrap_or_else(|| PolyMatrix::identity(n)))
}

fn term_scalar(k: &TermKey, c: &Rational, vals: &[PolyMatrix], n: usize) -> Result<Poly> {
    let mut s = Poly::constant(c.clone());
    for t in &k.traces {
        s = &s * &letters_product(t, vals, n)?.trace();
        if s.is_zero() {
            break;
        }
    }
    Ok(s)
}

/// Evaluate on `n × n` matrices.
pub fn eval(g: &GenPoly, args: &[MatrixArg], n: usize) -> Result<PolyMatrix> {
    if args.len() != g.arity {
        return Err(Error::Dimension(format!(
            "{} arguments for arity {}",
            args.len(),
            g.arity
        )));
    }
    let vals = args
        .iter()
        .map(|a| a.to_matrix(n))
        .collect::<Result<Vec<_>>>()?;
    let terms: Vec<(&TermKey, &Rational)> = g.terms.iter().collect();
    let parts = terms
        .par_iter()
        .map(|(k, c)| {
            let s = term_scalar(k, c, &vals, n)?;
            if s.is_zero() {
                return Ok(PolyMatrix::zeros(n, n));
            }
            Ok(letters_product(&k.word, &vals, n)?.scale_poly(&s))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = PolyMatrix::zeros(n, n);
    for p in &parts {
        out.add_assign(p);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `Σ F_k x_k`: each term is split before its last letter.
    Left,
    /// `Σ x_l G_l`: each term is split after its first letter.
    Right,
}

/// Coordinate matrices of a multilinear `g` read as a one-sided expression.
/// Slot arguments must be `Generic` or `Scaled` with distinct groups; with
/// `Side::Right` only `Generic` arguments are accepted. The result is keyed
/// by group index.
pub fn coordinate_form(
    g: &GenPoly,
    args: &[MatrixArg],
    n: usize,
    side: Side,
) -> Result<BTreeMap<usize, PolyMatrix>> {
    if !g.is_multilinear() {
        return Err(Error::NotMultilinear("generalized polynomial".into()));
    }
    if args.len() != g.arity {
        return Err(Error::Dimension(format!(
            "{} arguments for arity {}",
            args.len(),
            g.arity
        )));
    }
    let mut parts = Vec::with_capacity(args.len());
    let mut groups = BTreeSet::new();
    for a in args {
        let (k, c) = a
            .generic_parts(n)
            .ok_or_else(|| Error::Malformed("coordinate form needs generic arguments".into()))?;
        if side == Side::Right && !matches!(a, MatrixArg::Generic(_)) {
            return Err(Error::Malformed(
                "right coordinate form needs unscaled arguments".into(),
            ));
        }
        if !groups.insert(k) {
            return Err(Error::NotMultilinear(format!("group {k} used twice")));
        }
        parts.push((k, c));
    }
    let vals = args
        .iter()
        .map(|a| a.to_matrix(n))
        .collect::<Result<Vec<_>>>()?;
    let mut out: BTreeMap<usize, PolyMatrix> = groups
        .iter()
        .map(|&k| (k, PolyMatrix::zeros(n, n)))
        .collect();
    for (key, c) in &g.terms {
        let (split, rest) = match side {
            Side::Left => (
                key.word.last(),
                &key.word[..key.word.len().saturating_sub(1)],
            ),
            Side::Right => (key.word.first(), key.word.get(1..).unwrap_or(&[])),
        };
        let Some(Letter::Slot(s)) = split else {
            return Err(Error::Malformed(format!("term {key:?} is not one-sided")));
        };
        let (k, a) = &parts[s - 1];
        let s = term_scalar(key, c, &vals, n)?;
        let body = letters_product(rest, &vals, n)?.scale_poly(&s);
        let coeff = match side {
            Side::Left => body.checked_mul(a)?,
            Side::Right => body,
        };
        out.get_mut(k).unwrap().add_assign(&coeff);
    }
    Ok(out)
}

/// Coordinate matrices `F_1, …, F_{n+1}` of
/// `[Q̃_n(a_1x_1, …, a_nx_n), a_{n+1}x_{n+1}] = Σ F_k x_k`.
pub fn basic_nonstandard_fi(n: usize, a: &[RatMatrix]) -> Result<Vec<PolyMatrix>> {
    if a.len() != n + 1 {
        return Err(Error::Dimension(format!(
            "need {} constants, got {}",
            n + 1,
            a.len()
        )));
    }
    for m in a {
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("constant is not {n}x{n}")));
        }
    }
    let qt = noncentral_part(n).with_arity(n + 1);
    let last = GenPoly::word(n + 1, &[n + 1]);
    let g = qt.mul(&last).sub(&last.mul(&qt));
    let args: Vec<MatrixArg> = a
        .iter()
        .enumerate()
        .map(|(i, m)| MatrixArg::Scaled(m.clone(), i + 1))
        .collect();
    let f = coordinate_form(&g, &args, n, Side::Left)?;
    Ok((1..=n + 1).map(|k| f[&k].clone()).collect())
}

/// Element `α·1 + β·e + γ·c` of the formal algebra generated by a rank-one
/// idempotent `e` and `c = [e x_1 e, e x_2 e]`, where `ece = c`,
/// `tr(e) = 1` and `tr(c) = 0`. `c²` is outside the model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankOneValue {
    pub one: Rational,
    pub e: Rational,
    pub c: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankOneArg {
    E,
    C,
}

impl RankOneValue {
    fn from_arg(a: RankOneArg) -> Self {
        let (e, c) = match a {
            RankOneArg::E => (rat(1), rat(0)),
            RankOneArg::C => (rat(0), rat(1)),
        };
        RankOneValue { one: rat(0), e, c }
    }

    fn identity() -> Self {
        RankOneValue {
            one: rat(1),
            e: rat(0),
            c: rat(0),
        }
    }

    fn mul(&self, o: &Self) -> Result<Self> {
        if !(&self.c * &o.c).is_zero() {
            return Err(Error::Internal("c² is outside the rank-one model".into()));
        }
        Ok(RankOneValue {
            one: &self.one * &o.one,
            e: &self.one * &o.e + &self.e * &o.one + &self.e * &o.e,
            c: &self.one * &o.c + &self.c * &o.one + &self.e * &o.c + &self.c * &o.e,
        })
    }

    fn trace(&self, n: usize) -> Rational {
        &self.one * rat(n as i64) + &self.e
    }
}

/// Evaluate in the formal rank-one model; constants are not supported.
pub fn eval_rank_one(g: &GenPoly, args: &[RankOneArg], n: usize) -> Result<RankOneValue> {
    if args.len() != g.arity {
        return Err(Error::Dimension(format!(
            "{} arguments for arity {}",
            args.len(),
            g.arity
        )));
    }
    let product = |w: &[Letter]| -> Result<RankOneValue> {
        let mut acc = RankOneValue::identity();
        for l in w {
            match l {
                Letter::Slot(s) => acc = acc.mul(&RankOneValue::from_arg(args[s - 1]))?,
                Letter::Const(_) => {
                    return Err(Error::Malformed(
                        "constants are not supported in the rank-one model".into(),
                    ))
                }
            }
        }
        Ok(acc)
    };
    let mut out = RankOneValue {
        one: rat(0),
        e: rat(0),
        c: rat(0),
    };
    for (k, c) in &g.terms {
        let mut s = c.clone();
        for t in &k.traces {
            s *= product(t)?.trace(n);
        }
        let w = product(&k.word)?;
        out.one += &s * &w.one;
        out.e += &s * &w.e;
        out.c += &s * &w.c;
    }
    Ok(out)
}
