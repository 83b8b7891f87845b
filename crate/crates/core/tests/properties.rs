use chfi::fisolve::{random_one_sided, reconstruct_one_sided, solve_one_sided};
use chfi::gpi::{eval, polarized_ch, MatrixArg};
use chfi::io::{to_canonical_json, Problem, ProblemFile};
use chfi::poly::{parse_rational, ratio, Poly};
use chfi::symmat::PolyMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Sum of `c · x^{(k)}_{ij}` products from a list of small integer terms.
fn poly_from(terms: &[(i64, Vec<(usize, usize, usize)>)]) -> Poly {
    let mut out = Poly::zero();
    for (c, vars) in terms {
        let mut t = Poly::int(*c);
        for &(k, i, j) in vars {
            t = &t * &Poly::x(k, i, j);
        }
        out += &t;
    }
    out
}

fn poly_strategy() -> impl Strategy<Value = Poly> {
    let var = (1usize..=3, 1usize..=2, 1usize..=2);
    let term = (-4i64..=4, prop::collection::vec(var, 0..3));
    prop::collection::vec(term, 0..4).prop_map(|t| poly_from(&t))
}

fn int_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-5i64..=5, n), n)
}

fn to_matrix(rows: &[Vec<i64>]) -> PolyMatrix {
    let r: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    PolyMatrix::from_ints(&r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_laws(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn determinants_agree(rows in int_matrix(3), other in int_matrix(3)) {
        let a = to_matrix(&rows);
        let b = to_matrix(&other);
        prop_assert_eq!(a.det_leibniz(), a.det_bareiss());
        let ab = a.checked_mul(&b).unwrap();
        prop_assert_eq!(ab.det().unwrap(), &a.det().unwrap() * &b.det().unwrap());
    }

    #[test]
    fn cayley_hamilton_on_constants(rows in prop::collection::vec(int_matrix(3), 3)) {
        let args: Vec<MatrixArg> = rows
            .iter()
            .map(|r| MatrixArg::Matrix(to_matrix(r)))
            .collect();
        prop_assert!(eval(&polarized_ch(3), &args, 3).unwrap().is_zero());
    }

    #[test]
    fn rationals_print_and_parse(p in -1000i64..1000, q in 1i64..1000) {
        let r = ratio(p, q);
        prop_assert_eq!(parse_rational(&r.to_string()).unwrap(), r);
    }

    #[test]
    fn one_sided_round_trip(seed in any::<u64>(), m in 3usize..=4, count in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (spec, _) = random_one_sided(&mut rng, 2, m, count).unwrap();
        let sol = solve_one_sided(&spec).unwrap();
        prop_assert_eq!(reconstruct_one_sided(&sol).unwrap(), spec.f.clone());
        let text = to_canonical_json(&ProblemFile::new(Problem::Fi(spec.clone()))).unwrap();
        let back = ProblemFile::parse(&text).unwrap();
        prop_assert_eq!(back.problem, Problem::Fi(spec));
        prop_assert_eq!(to_canonical_json(&ProblemFile::parse(&text).unwrap()).unwrap(), text);
    }
}
