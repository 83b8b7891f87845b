//! Exact sparse linear systems over ℚ, kept in reduced row echelon form as
//! equations arrive.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::poly::{Monomial, Poly, Rational};

#[derive(Clone, Debug)]
struct Row {
    coeffs: BTreeMap<usize, Rational>,
    rhs: Rational,
}

/// Incremental Gauss–Jordan elimination. Pivot rows are kept fully reduced
/// against each other, so the particular solution with all free variables
/// set to zero can be read off directly.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    rows: Vec<Row>,
    pivot_of: BTreeMap<usize, usize>,
    inconsistent: bool,
}

impl LinearSystem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `Σ coeffs[j]·u_j = rhs`. Returns false if the system became
    /// inconsistent.
    pub fn add_equation(&mut self, coeffs: BTreeMap<usize, Rational>, rhs: Rational) -> bool {
        let mut row = Row { coeffs, rhs };
        row.coeffs.retain(|_, c| !c.is_zero());
        let hits: Vec<usize> = row
            .coeffs
            .keys()
            .filter(|c| self.pivot_of.contains_key(c))
            .copied()
            .collect();
        for col in hits {
            let Some(f) = row.coeffs.get(&col).cloned() else {
                continue;
            };
            let p = &self.rows[self.pivot_of[&col]];
            for (j, v) in &p.coeffs {
                let e = row.coeffs.entry(*j).or_insert_with(Rational::zero);
                *e -= &f * v;
                if e.is_zero() {
                    row.coeffs.remove(j);
                }
            }
            row.rhs -= &f * &p.rhs;
        }
        let Some((&pivot, lead)) = row.coeffs.iter().next() else {
            if !row.rhs.is_zero() {
                self.inconsistent = true;
            }
            return !self.inconsistent;
        };
        let inv = Rational::one() / lead;
        for v in row.coeffs.values_mut() {
            *v *= &inv;
        }
        row.rhs *= &inv;
        for r in self.rows.iter_mut() {
            if let Some(f) = r.coeffs.get(&pivot).cloned() {
                for (j, v) in &row.coeffs {
                    let e = r.coeffs.entry(*j).or_insert_with(Rational::zero);
                    *e -= &f * v;
                    if e.is_zero() {
                        r.coeffs.remove(j);
                    }
                }
                r.rhs -= &f * &row.rhs;
            }
        }
        self.pivot_of.insert(pivot, self.rows.len());
        self.rows.push(row);
        !self.inconsistent
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Particular solution (free variables zero); only nonzero values are
    /// listed. `None` if inconsistent.
    pub fn solution(&self) -> Option<BTreeMap<usize, Rational>> {
        if self.inconsistent {
            return None;
        }
        let mut out = BTreeMap::new();
        for (&col, &r) in &self.pivot_of {
            let v = &self.rows[r].rhs;
            if !v.is_zero() {
                out.insert(col, v.clone());
            }
        }
        Some(out)
    }
}

/// Finds rationals `c_j` with `Σ_j c_j·columns[j] = target`, where every
/// column and the target are vectors of polynomials of the same length.
/// Returns the particular solution with free unknowns zero.
pub fn solve_poly_combination(columns: &[Vec<Poly>], target: &[Poly]) -> Option<Vec<Rational>> {
    let mut eqs: BTreeMap<(usize, Monomial), BTreeMap<usize, Rational>> = BTreeMap::new();
    for (j, col) in columns.iter().enumerate() {
        for (pos, p) in col.iter().enumerate() {
            for (m, c) in p.terms() {
                eqs.entry((pos, m.clone()))
                    .or_default()
                    .insert(j, c.clone());
            }
        }
    }
    let mut rhs: BTreeMap<(usize, Monomial), Rational> = BTreeMap::new();
    for (pos, p) in target.iter().enumerate() {
        for (m, c) in p.terms() {
            rhs.insert((pos, m.clone()), c.clone());
            eqs.entry((pos, m.clone())).or_default();
        }
    }
    let mut sys = LinearSystem::new();
    for (key, coeffs) in eqs {
        let r = rhs.remove(&key).unwrap_or_else(Rational::zero);
        if !sys.add_equation(coeffs, r) {
            return None;
        }
    }
    let sol = sys.solution()?;
    Some(
        (0..columns.len())
            .map(|j| sol.get(&j).cloned().unwrap_or_else(Rational::zero))
            .collect(),
    )
}
