//! Functional identities `Σ_{k∈K} F_k(x̄^k) x_k = Σ_{l∈L} x_l G_l(x̄^l)` on
//! `M_n(ℚ)`, represented by the coordinate matrices of the multilinear maps
//! evaluated on generic matrices.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{rat, Poly};
use crate::symmat::PolyMatrix;

mod gpisum;
mod onesided;
mod trace;
mod twosided;

pub use gpisum::{expand_gpi_sum, to_gpi_sum, GpiTerm};
pub use onesided::{
    det_trace_extract, random_one_sided, random_one_sided_on, reconstruct_one_sided, solve_one_sided, OneSidedSolution,
    OneSidedTerm,
};
pub use trace::{
    canonicalize_trace_form, charpoly_coeffs, commuting_trace_form, det_map, eval_trace_form,
    left_completion, polarize, random_trace_form, symmetrize, trace_of_map, TraceForm,
};
pub use twosided::{
    decompose_two_sided, multilinear_monomials, oracle_decompose, oracle_solvable, random_two_sided,
    standard_solve_small, support, PBlock, TwoSidedDecomposition,
};

/// Coordinate data of a functional identity. `f[k]` is the matrix of
/// `F_k` on generic arguments, `g[l]` that of `G_l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FISpec {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "K")]
    pub k_set: Vec<usize>,
    #[serde(rename = "L")]
    pub l_set: Vec<usize>,
    #[serde(rename = "F", deserialize_with = "index_map")]
    pub f: BTreeMap<usize, PolyMatrix>,
    #[serde(rename = "G", deserialize_with = "index_map")]
    pub g: BTreeMap<usize, PolyMatrix>,
}

/// Maps keyed by matrix index. JSON keys are strings; going through
/// `String` keeps this working inside tagged or flattened containers.
pub(crate) fn index_map<'de, D, V>(d: D) -> std::result::Result<BTreeMap<usize, V>, D::Error>
where
    D: serde::Deserializer<'de>,
    V: Deserialize<'de>,
{
    let raw = BTreeMap::<String, V>::deserialize(d)?;
    raw.into_iter()
        .map(|(k, v)| {
            k.parse::<usize>()
                .map(|k| (k, v))
                .map_err(|_| serde::de::Error::custom(format!("bad index key {k:?}")))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FICheck {
    pub holds: bool,
    pub residual: PolyMatrix,
}

impl FISpec {
    pub fn new(
        n: usize,
        m: usize,
        k_set: Vec<usize>,
        l_set: Vec<usize>,
        f: BTreeMap<usize, PolyMatrix>,
        g: BTreeMap<usize, PolyMatrix>,
    ) -> Result<Self> {
        let spec = FISpec {
            n,
            m,
            k_set,
            l_set,
            f,
            g,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `Σ_k F_k x_k = 0` with `K = ℕ_m`; `f[k-1]` is `F_k`.
    pub fn left(n: usize, f: Vec<PolyMatrix>) -> Result<Self> {
        let m = f.len();
        let map = f.into_iter().enumerate().map(|(i, h)| (i + 1, h)).collect();
        FISpec::new(n, m, (1..=m).collect(), vec![], map, BTreeMap::new())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::OutOfBounds("n must be ≥ 1".into()));
        }
        for (name, set, maps) in [("K", &self.k_set, &self.f), ("L", &self.l_set, &self.g)] {
            if !set.windows(2).all(|w| w[0] < w[1]) || set.iter().any(|&k| k == 0 || k > self.m) {
                return Err(Error::Malformed(format!(
                    "{name} must be an increasing subset of 1..={}",
                    self.m
                )));
            }
            if maps.keys().ne(set.iter()) {
                return Err(Error::Malformed(format!("{name} does not match its map keys")));
            }
            for (&k, h) in maps {
                if h.nrows() != self.n || h.ncols() != self.n {
                    return Err(Error::Dimension(format!(
                        "coordinate matrix for index {k} is {}x{}, expected {n}x{n}",
                        h.nrows(),
                        h.ncols(),
                        n = self.n
                    )));
                }
                let groups = self.groups_without(&[k]);
                if h.entries().any(|p| !p.is_zero() && !p.is_multilinear(&groups)) {
                    return Err(Error::NotMultilinear(format!(
                        "entries for index {k} must be multilinear in the other {} arguments",
                        self.m - 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn groups_without(&self, skip: &[usize]) -> BTreeSet<u16> {
        (1..=self.m)
            .filter(|k| !skip.contains(k))
            .map(|k| k as u16)
            .collect()
    }

    /// `Σ_k F_k X_k − Σ_l X_l G_l`.
    pub fn residual(&self) -> Result<PolyMatrix> {
        let mut r = PolyMatrix::zeros(self.n, self.n);
        for (&k, h) in &self.f {
            r.add_assign(&h.checked_mul(&PolyMatrix::generic(k, self.n)?)?);
        }
        for (&l, h) in &self.g {
            r.sub_assign(&PolyMatrix::generic(l, self.n)?.checked_mul(h)?);
        }
        Ok(r)
    }

    pub fn is_zero(&self) -> bool {
        self.f.values().chain(self.g.values()).all(PolyMatrix::is_zero)
    }

    /// The same identity with `K = L = ℕ_m`, missing maps set to zero.
    pub fn padded(&self) -> FISpec {
        let all: Vec<usize> = (1..=self.m).collect();
        let fill = |maps: &BTreeMap<usize, PolyMatrix>| {
            all.iter()
                .map(|&k| {
                    (
                        k,
                        maps.get(&k)
                            .cloned()
                            .unwrap_or_else(|| PolyMatrix::zeros(self.n, self.n)),
                    )
                })
                .collect()
        };
        FISpec {
            n: self.n,
            m: self.m,
            k_set: all.clone(),
            l_set: all.clone(),
            f: fill(&self.f),
            g: fill(&self.g),
        }
    }
}

/// Verifies the identity on generic matrices. Because the maps are
/// multilinear, vanishing on generic matrices is equivalent to vanishing on
/// all of `M_n(ℚ)^m`.
pub fn check_fi(spec: &FISpec) -> Result<FICheck> {
    spec.validate()?;
    let residual = spec.residual()?;
    Ok(FICheck {
        holds: residual.is_zero(),
        residual,
    })
}

/// Random multilinear scalar in the given groups: a sum of `terms` products
/// of linear forms with small integer coefficients.
pub fn random_multilinear_scalar<R: Rng>(
    rng: &mut R,
    n: usize,
    groups: &[usize],
    terms: usize,
) -> Poly {
    let mut out = Poly::zero();
    for _ in 0..terms {
        let mut prod = Poly::int(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
        for &k in groups {
            let mut form = Poly::zero();
            while form.is_zero() {
                for i in 1..=n {
                    for j in 1..=n {
                        if rng.gen_bool(0.4) {
                            form += &Poly::x(k, i, j).scale(&rat(rng.gen_range(-2..=2)));
                        }
                    }
                }
            }
            prod = &prod * &form;
        }
        out += &prod;
    }
    out
}
