//! Closed-form optima and the complete catalogue of extremal families.

use num_bigint::BigUint;
use serde::Serialize;
use std::collections::BTreeMap;

use crate::error::Error;
use crate::family::{Family, Problem};
use crate::set::IntSet;

/// The structural classes of families attaining the maximum total size.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "class")]
pub enum ExtremalClass {
    /// `m` suffix intervals `[t_i, n]` with nondecreasing thresholds summing
    /// to `n + 1` (each at most `q + 1`), plus `k - m` copies of `[q+1, n]`.
    #[serde(rename = "suffix")]
    SuffixIntervals { thresholds: Vec<usize> },
    /// Only when `r = 0` and `k = m + 1`: `m` copies of `[q, n]` plus one
    /// interior interval `[q+1, n-1]`.
    #[serde(rename = "special")]
    SpecialEven,
    /// Only when `m = 2` and `n` is odd: every set is the odd numbers in
    /// `[1, n]`.
    #[serde(rename = "odd")]
    OddsAll,
    /// `m` copies of the full interval plus `k - m` empty sets; only extremal
    /// when empty sets are admitted.
    #[serde(rename = "trivial")]
    TrivialWithEmpty,
}

/// Which reading of the product bound's second exponent to use.
///
/// The two variants share the form `(n-q+1)^(m-(r+1)) * (n-q)^e`. `Printed`
/// takes `e = n - m + (r+1)`, under which the exponents total `n`; since a
/// bound on a product of `k` set sizes should have exponents totalling `k`,
/// `Corrected` takes `e = k - m + (r+1)`. Exhaustive search confirms the
/// corrected reading (see the acceptance suite).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProductInterpretation {
    Printed,
    Corrected,
}

/// Maximum of `sum |A_i|` over rainbow-free families of nonempty sets:
/// `k(n - q) + m - (r + 1)`.
///
/// The hypotheses (`m >= 2`, `k >= m + 1`, `n >= m + 1`) are enforced by
/// [`Problem`] construction.
pub fn sum_bound(p: &Problem) -> usize {
    p.k() * (p.n() - p.q()) + p.m() - (p.r() + 1)
}

/// Bound on `prod |A_i|` over rainbow-free families, under the chosen
/// exponent reading.
pub fn product_bound(p: &Problem, interpretation: ProductInterpretation) -> BigUint {
    let (n, m, k, q, r) = (p.n(), p.m(), p.k(), p.q(), p.r());
    let high = BigUint::from(n - q + 1).pow((m - (r + 1)) as u32);
    let low_exp = match interpretation {
        ProductInterpretation::Printed => n - m + (r + 1),
        ProductInterpretation::Corrected => k - m + (r + 1),
    };
    high * BigUint::from(n - q).pow(low_exp as u32)
}

/// Build the family a class describes, validating its parameter constraints.
pub fn construct_extremal(p: &Problem, class: &ExtremalClass) -> Result<Family, Error> {
    let (n, m, k, q, r) = (p.n(), p.m(), p.k(), p.q(), p.r());
    let mut sets: Vec<IntSet> = Vec::with_capacity(k);
    match class {
        ExtremalClass::SuffixIntervals { thresholds } => {
            if thresholds.len() != m {
                return Err(Error::InvalidParameters(format!(
                    "expected {m} thresholds, got {}",
                    thresholds.len()
                )));
            }
            if thresholds.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::InvalidParameters(
                    "thresholds must be nondecreasing".to_string(),
                ));
            }
            if let Some(&t) = thresholds.iter().find(|&&t| t < 1 || t > q + 1) {
                return Err(Error::InvalidParameters(format!(
                    "threshold {t} is outside [1, q + 1] = [1, {}]",
                    q + 1
                )));
            }
            let sum: usize = thresholds.iter().sum();
            if sum != n + 1 {
                return Err(Error::InvalidParameters(format!(
                    "thresholds must sum to n + 1 = {}, got {sum}",
                    n + 1
                )));
            }
            for &t in thresholds {
                sets.push(IntSet::suffix(n, t)?);
            }
            for _ in m..k {
                sets.push(IntSet::suffix(n, q + 1)?);
            }
        }
        ExtremalClass::SpecialEven => {
            if r != 0 || k != m + 1 {
                return Err(Error::InvalidParameters(format!(
                    "the special class requires r = 0 and k = m + 1, got r = {r}, k = {k}"
                )));
            }
            for _ in 0..m {
                sets.push(IntSet::suffix(n, q)?);
            }
            sets.push(IntSet::interval(n, q + 1, n - 1)?);
        }
        ExtremalClass::OddsAll => {
            if m != 2 || n % 2 == 0 {
                return Err(Error::InvalidParameters(format!(
                    "the odd class requires m = 2 and odd n, got m = {m}, n = {n}"
                )));
            }
            let odds: Vec<usize> = (1..=n).step_by(2).collect();
            for _ in 0..k {
                sets.push(IntSet::from_elements(n, &odds)?);
            }
        }
        ExtremalClass::TrivialWithEmpty => {
            for _ in 0..m {
                sets.push(IntSet::full(n));
            }
            for _ in m..k {
                sets.push(IntSet::empty(n));
            }
        }
    }
    Family::new(*p, sets)
}

/// Every family the equality characterization generates for `p`, as
/// deduplicated canonical representatives sorted by canonical key.
///
/// `allow_empty` additionally includes the trivial family with empty sets,
/// whether or not it attains the corresponding optimum.
pub fn enumerate_theorem_families(p: &Problem, allow_empty: bool) -> Vec<Family> {
    let mut found: BTreeMap<_, Family> = BTreeMap::new();
    let mut push = |family: Family| {
        found.entry(family.canonical_key()).or_insert(family);
    };

    for thresholds in threshold_vectors(p) {
        let class = ExtremalClass::SuffixIntervals { thresholds };
        push(construct_extremal(p, &class).expect("enumerated thresholds are valid"));
    }
    if p.r() == 0 && p.k() == p.m() + 1 {
        push(construct_extremal(p, &ExtremalClass::SpecialEven).expect("guard checked"));
    }
    if p.m() == 2 && p.n() % 2 == 1 {
        push(construct_extremal(p, &ExtremalClass::OddsAll).expect("guard checked"));
    }
    if allow_empty {
        push(construct_extremal(p, &ExtremalClass::TrivialWithEmpty).expect("always valid"));
    }
    found.into_values().collect()
}

/// All nondecreasing vectors `t_1 <= ... <= t_m` with entries in `[1, q+1]`
/// summing to `n + 1`.
fn threshold_vectors(p: &Problem) -> Vec<Vec<usize>> {
    let (m, q, target) = (p.m(), p.q(), p.n() + 1);
    let mut out = Vec::new();
    let mut acc = Vec::with_capacity(m);
    rec(m, q + 1, 1, target, &mut acc, &mut out);
    return out;

    fn rec(
        m: usize,
        max_t: usize,
        min_t: usize,
        remaining: usize,
        acc: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let left = m - acc.len();
        if left == 0 {
            if remaining == 0 {
                out.push(acc.clone());
            }
            return;
        }
        for t in min_t..=max_t {
            // The remaining entries are at least t and at most max_t each.
            if t * left > remaining || remaining > t + max_t * (left - 1) {
                continue;
            }
            acc.push(t);
            rec(m, max_t, t, remaining - t, acc, out);
            acc.pop();
        }
    }
}

/// Every class whose constructed family equals `family` as a multiset.
///
/// Purely structural: no rainbow check is involved. The list is usually a
/// singleton or empty, but coincidences between classes are tolerated.
pub fn classify(family: &Family) -> Vec<ExtremalClass> {
    let p = family.problem();
    let (n, m, k, q, r) = (p.n(), p.m(), p.k(), p.q(), p.r());
    let key = family.canonical_key();
    let mut out = Vec::new();

    // Suffix intervals: infer the thresholds, then confirm by rebuilding.
    // Any valid assignment must use every start below q + 1 as a threshold,
    // so the m smallest starts are the only candidate.
    let starts: Option<Vec<usize>> =
        family.sets().iter().map(IntSet::suffix_interval).collect();
    if let Some(mut starts) = starts {
        starts.sort_unstable();
        if starts[m..].iter().all(|&t| t == q + 1) {
            let class = ExtremalClass::SuffixIntervals { thresholds: starts[..m].to_vec() };
            if construct_extremal(p, &class).is_ok_and(|g| g.canonical_key() == key) {
                out.push(class);
            }
        }
    }

    let mut candidates = Vec::new();
    if r == 0 && k == m + 1 {
        candidates.push(ExtremalClass::SpecialEven);
    }
    if m == 2 && n % 2 == 1 {
        candidates.push(ExtremalClass::OddsAll);
    }
    candidates.push(ExtremalClass::TrivialWithEmpty);
    for class in candidates {
        if construct_extremal(p, &class).is_ok_and(|g| g.canonical_key() == key) {
            out.push(class);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rainbow::find_rainbow;

    fn problem(n: usize, m: usize, k: usize) -> Problem {
        Problem::new(n, m, k).unwrap()
    }

    fn lists(f: &Family) -> Vec<Vec<usize>> {
        f.sets().iter().map(IntSet::to_vec).collect()
    }

    #[test]
    fn sum_bound_values() {
        assert_eq!(sum_bound(&problem(5, 2, 3)), 9);
        assert_eq!(sum_bound(&problem(6, 2, 3)), 10);
        assert_eq!(sum_bound(&problem(6, 3, 4)), 18);
        let expected = [(3, 6), (4, 7), (5, 9), (6, 10), (7, 12), (8, 13)];
        for (n, bound) in expected {
            assert_eq!(sum_bound(&problem(n, 2, 3)), bound);
        }
    }

    #[test]
    fn product_bound_values() {
        let p = problem(5, 2, 3);
        assert_eq!(product_bound(&p, ProductInterpretation::Corrected), BigUint::from(27u32));
        assert_eq!(product_bound(&p, ProductInterpretation::Printed), BigUint::from(243u32));

        let p = problem(6, 3, 4);
        assert_eq!(product_bound(&p, ProductInterpretation::Corrected), BigUint::from(400u32));
        // 5^2 * 4^4: the printed exponents total n rather than k.
        assert_eq!(product_bound(&p, ProductInterpretation::Printed), BigUint::from(6400u32));
    }

    #[test]
    fn construct_suffix_intervals() {
        let p = problem(6, 2, 3);
        let f = construct_extremal(
            &p,
            &ExtremalClass::SuffixIntervals { thresholds: vec![3, 4] },
        )
        .unwrap();
        assert_eq!(lists(&f), vec![vec![3, 4, 5, 6], vec![4, 5, 6], vec![4, 5, 6]]);
        assert_eq!(f.stats().total, 10);
        assert_eq!(find_rainbow(&f), None);
    }

    #[test]
    fn construct_special_even() {
        let p = problem(6, 2, 3);
        let f = construct_extremal(&p, &ExtremalClass::SpecialEven).unwrap();
        assert_eq!(lists(&f), vec![vec![3, 4, 5, 6], vec![3, 4, 5, 6], vec![4, 5]]);
        assert_eq!(f.stats().total, 10);
        assert_eq!(find_rainbow(&f), None);
    }

    #[test]
    fn construct_odds() {
        let p = problem(5, 2, 3);
        let f = construct_extremal(&p, &ExtremalClass::OddsAll).unwrap();
        assert_eq!(lists(&f), vec![vec![1, 3, 5]; 3]);
        assert_eq!(f.stats().total, 9);
        assert_eq!(find_rainbow(&f), None);
    }

    #[test]
    fn construct_trivial() {
        let p = problem(5, 2, 3);
        let f = construct_extremal(&p, &ExtremalClass::TrivialWithEmpty).unwrap();
        assert_eq!(lists(&f), vec![vec![1, 2, 3, 4, 5], vec![1, 2, 3, 4, 5], vec![]]);
        assert_eq!(f.stats().total, 10);
        assert_eq!(find_rainbow(&f), None);
    }

    #[test]
    fn construct_rejects_mismatches() {
        let p = problem(5, 2, 3);
        assert!(construct_extremal(&p, &ExtremalClass::SpecialEven).is_err());
        assert!(construct_extremal(
            &p,
            &ExtremalClass::SuffixIntervals { thresholds: vec![2, 3] }
        )
        .is_err());
        assert!(construct_extremal(
            &p,
            &ExtremalClass::SuffixIntervals { thresholds: vec![3, 2, 1] }
        )
        .is_err());
        let p = problem(6, 2, 3);
        assert!(construct_extremal(&p, &ExtremalClass::OddsAll).is_err());
        assert!(construct_extremal(
            &p,
            &ExtremalClass::SuffixIntervals { thresholds: vec![2, 5] }
        )
        .is_err());
    }

    #[test]
    fn enumerate_families_examples() {
        let fams = enumerate_theorem_families(&problem(5, 2, 3), false);
        let keys: Vec<_> = fams.iter().map(lists).collect();
        assert_eq!(keys.len(), 2);
        assert!(keys.contains(&vec![vec![1, 3, 5]; 3]));
        assert!(keys.contains(&vec![vec![3, 4, 5]; 3]));

        let fams = enumerate_theorem_families(&problem(6, 2, 3), false);
        assert_eq!(fams.len(), 2);

        let fams = enumerate_theorem_families(&problem(6, 3, 4), false);
        assert_eq!(fams.len(), 3);
        let keys: Vec<_> = fams.iter().map(|f| f.canonical_key()).collect();
        let t133 = construct_extremal(
            &problem(6, 3, 4),
            &ExtremalClass::SuffixIntervals { thresholds: vec![1, 3, 3] },
        )
        .unwrap();
        let t223 = construct_extremal(
            &problem(6, 3, 4),
            &ExtremalClass::SuffixIntervals { thresholds: vec![2, 2, 3] },
        )
        .unwrap();
        let special = construct_extremal(&problem(6, 3, 4), &ExtremalClass::SpecialEven).unwrap();
        for f in [t133, t223, special] {
            assert!(keys.contains(&f.canonical_key()));
        }

        // The trivial family only joins when empties are admitted.
        let with_empty = enumerate_theorem_families(&problem(5, 2, 3), true);
        assert_eq!(with_empty.len(), 3);
    }

    #[test]
    fn classify_examples() {
        let p = problem(6, 2, 3);
        let f = construct_extremal(
            &p,
            &ExtremalClass::SuffixIntervals { thresholds: vec![3, 4] },
        )
        .unwrap();
        assert_eq!(
            classify(&f),
            vec![ExtremalClass::SuffixIntervals { thresholds: vec![3, 4] }]
        );

        // All three sets equal [3, 6]: threshold sum is 9, not n + 1 = 7.
        let sets = vec![IntSet::suffix(6, 3).unwrap(); 3];
        let g = Family::new(p, sets).unwrap();
        assert_eq!(classify(&g), vec![]);
        assert!(find_rainbow(&g).is_some());

        let odds = construct_extremal(&problem(5, 2, 3), &ExtremalClass::OddsAll).unwrap();
        assert_eq!(classify(&odds), vec![ExtremalClass::OddsAll]);

        let trivial =
            construct_extremal(&problem(5, 2, 3), &ExtremalClass::TrivialWithEmpty).unwrap();
        assert_eq!(classify(&trivial), vec![ExtremalClass::TrivialWithEmpty]);
    }

    // Grid sweep: every generated family is rainbow-free, attains the bound,
    // and classifies back to a class that reconstructs it.
    #[test]
    fn grid_families_attain_bound_and_round_trip() {
        for m in [2, 3] {
            for k in m + 1..=m + 3 {
                for n in m + 1..=12 {
                    let p = problem(n, m, k);
                    let bound = sum_bound(&p);
                    // Independent recomputation of the total from thresholds.
                    for thresholds in super::threshold_vectors(&p) {
                        let direct: usize = thresholds.iter().map(|&t| n - t + 1).sum::<usize>()
                            + (k - m) * (n - p.q());
                        assert_eq!(direct, bound);
                    }
                    for f in enumerate_theorem_families(&p, false) {
                        assert_eq!(find_rainbow(&f), None, "rainbow in {:?}", lists(&f));
                        assert_eq!(f.stats().total, bound);
                        let classes = classify(&f);
                        assert!(!classes.is_empty());
                        assert!(classes.iter().any(|c| construct_extremal(&p, c)
                            .unwrap()
                            .canonical_key()
                            == f.canonical_key()));
                    }
                    // The trivial family beats the bound exactly when k = m+1
                    // and q >= m; at k = m+1 the margin is q + 1 - m.
                    let trivial_total = m * n;
                    assert_eq!(trivial_total > bound, k == m + 1 && p.q() >= m);
                    if k == m + 1 {
                        assert_eq!(trivial_total as i64 - bound as i64, p.q() as i64 + 1 - m as i64);
                    }
                }
            }
        }
    }

    // Round-trip over every class valid somewhere on the grid.
    #[test]
    fn classify_round_trip_on_grid() {
        for m in [2, 3] {
            for k in m + 1..=m + 3 {
                for n in m + 1..=12 {
                    let p = problem(n, m, k);
                    let mut classes: Vec<ExtremalClass> = super::threshold_vectors(&p)
                        .into_iter()
                        .map(|thresholds| ExtremalClass::SuffixIntervals { thresholds })
                        .collect();
                    if p.r() == 0 && k == m + 1 {
                        classes.push(ExtremalClass::SpecialEven);
                    }
                    if m == 2 && n % 2 == 1 {
                        classes.push(ExtremalClass::OddsAll);
                    }
                    classes.push(ExtremalClass::TrivialWithEmpty);
                    for class in classes {
                        let f = construct_extremal(&p, &class).unwrap();
                        assert!(
                            classify(&f).contains(&class),
                            "classify missed {class:?} at n={n} m={m} k={k}"
                        );
                    }
                }
            }
        }
    }
}
