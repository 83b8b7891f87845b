use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::OneSidedSolution;
use crate::error::Result;
use crate::gpi::{coordinate_form, noncentral_part, unit_matrix, GenPoly, Letter, MatrixArg, RatMatrix, Side};
use crate::poly::{rat, Rational};
use crate::symmat::PolyMatrix;

/// `coeff · g · [Q̃_n(a_1 x_{k_1}, …, a_n x_{k_n}), a_{n+1} x_{k_{n+1}}]` with
/// `g` central and `Q̃_n` the noncentral part of `Q_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GpiTerm {
    pub coeff: Rational,
    pub g: GenPoly,
    pub slots: Vec<usize>,
    pub a: Vec<RatMatrix>,
}

#[derive(Serialize, Deserialize)]
struct GpiTermRepr {
    coeff: String,
    g: serde_json::Value,
    slots: Vec<usize>,
    a: Vec<Vec<Vec<String>>>,
}

impl Serialize for GpiTerm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GpiTermRepr {
            coeff: self.coeff.to_string(),
            g: self.g.to_json_value(),
            slots: self.slots.clone(),
            a: self.a.iter().map(crate::gpi::rat_grid_to_strings).collect(),
        }
        .serialize(s)
    }
}

impl GpiTerm {
    /// The generalized polynomial this term stands for, in `arity` slots.
    pub fn to_genpoly(&self, arity: usize) -> GenPoly {
        let n = self.slots.len() - 1;
        let dressed = |k: usize| vec![Letter::Const(self.a[k].clone()), Letter::Slot(self.slots[k])];
        let qt = noncentral_part(n).substitute_words(&|s| dressed(s - 1), arity);
        let last = GenPoly::term(arity, rat(1), vec![], dressed(n));
        let bracket = qt.mul(&last).sub(&last.mul(&qt));
        self.g.mul(&bracket).scale(&self.coeff)
    }
}

/// Rewrites a one-sided solution as a sum of commutators with `Q̃_n`. The
/// determinantal generator for `(ℓ, I, J)` equals
/// `(−1)^n [Q̃_n(e_{1j_1}x_{i_1}, …, e_{nj_n}x_{i_n}), e_{ℓj_{n+1}}x_{i_{n+1}}]`.
pub fn to_gpi_sum(sol: &OneSidedSolution) -> Vec<GpiTerm> {
    let n = sol.n;
    let sign = if n % 2 == 0 { rat(1) } else { rat(-1) };
    sol.terms
        .iter()
        .map(|t| {
            let mut a: Vec<RatMatrix> = (0..n).map(|k| unit_matrix(n, k + 1, t.j[k])).collect();
            a.push(unit_matrix(n, t.ell, t.j[n]));
            GpiTerm {
                coeff: sign.clone(),
                g: GenPoly::from_scalar_poly(&t.lambda, n, &|k| k, sol.m),
                slots: t.i.clone(),
                a,
            }
        })
        .collect()
}

/// Left coordinate matrices `F_1, …, F_m` of a GPI sum.
pub fn expand_gpi_sum(terms: &[GpiTerm], n: usize, m: usize) -> Result<BTreeMap<usize, PolyMatrix>> {
    let args: Vec<MatrixArg> = (1..=m).map(MatrixArg::Generic).collect();
    let parts: Vec<Result<BTreeMap<usize, PolyMatrix>>> = terms
        .par_iter()
        .map(|t| coordinate_form(&t.to_genpoly(m), &args, n, Side::Left))
        .collect();
    let mut out: BTreeMap<usize, PolyMatrix> =
        (1..=m).map(|k| (k, PolyMatrix::zeros(n, n))).collect();
    for p in parts {
        for (k, h) in p? {
            out.get_mut(&k).expect("group in range").add_assign(&h);
        }
    }
    Ok(out)
}
