//! Small permutation helpers. Permutations are stored in one-line notation
//! on `0..n`: `p[i]` is the image of `i`.

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        if !next_permutation(&mut cur) {
            break;
        }
    }
    out
}

pub fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Sign as `+1` / `-1`.
pub fn sign(p: &[usize]) -> i64 {
    let cycles = cycles(p).len();
    if (p.len() - cycles) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Cycle decomposition; each cycle starts at its smallest element and lists
/// `c, p(c), p(p(c)), …`. Fixed points are included as 1-cycles.
pub fn cycles(p: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut c = start;
        while !seen[c] {
            seen[c] = true;
            cyc.push(c);
            c = p[c];
        }
        out.push(cyc);
    }
    out
}

/// Sign of the arrangement `values` relative to its sorted order
/// (`0` if there is a repeat).
pub fn arrangement_sign<T: Ord>(values: &[T]) -> i64 {
    let mut s = 1;
    for a in 0..values.len() {
        for b in a + 1..values.len() {
            match values[a].cmp(&values[b]) {
                std::cmp::Ordering::Equal => return 0,
                std::cmp::Ordering::Greater => s = -s,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    s
}

/// All `k`-element subsets of `items`, each in the input order, lexicographic.
pub fn subsets<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > items.len() {
        return out;
    }
    loop {
        out.push(idx.iter().map(|&i| items[i].clone()).collect());
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] < items.len() - k + pos {
                idx[pos] += 1;
                for q in pos + 1..k {
                    idx[q] = idx[q - 1] + 1;
                }
                break;
            }
        }
    }
}

/// All tuples in `{1..=base}^len`, lexicographic.
pub fn tuples(base: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=base).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_signs() {
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(0).len(), 1);
        let total: i64 = permutations(4).iter().map(|p| sign(p)).sum();
        assert_eq!(total, 0);
        assert_eq!(sign(&[1, 0, 2]), -1);
        assert_eq!(sign(&[1, 2, 0]), 1);
        for p in permutations(4) {
            assert_eq!(sign(&p), arrangement_sign(&p));
        }
    }

    #[test]
    fn cycle_decomposition() {
        assert_eq!(cycles(&[1, 2, 0, 3]), vec![vec![0, 1, 2], vec![3]]);
    }

    #[test]
    fn subsets_and_tuples() {
        assert_eq!(subsets(&[1, 2, 3, 4], 2).len(), 6);
        assert_eq!(subsets(&[1, 2, 3], 0), vec![Vec::<i32>::new()]);
        assert!(subsets(&[1, 2], 3).is_empty());
        assert_eq!(tuples(2, 3).len(), 8);
        assert_eq!(tuples(3, 0), vec![Vec::<usize>::new()]);
    }
}
