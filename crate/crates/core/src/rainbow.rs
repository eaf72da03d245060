//! Sumset computation and rainbow-solution detection.
//!
//! A rainbow solution to `x1 + ... + xm = x(m+1)` assigns the `m + 1`
//! variables to pairwise distinct sets of the family and picks one value per
//! variable from its set so that the sum identity holds. Values may coincide
//! across variables; only the set indices must differ.
//!
//! Detection works on the subset lattice: for every index subset `S` of size
//! up to `m`, the sumset of the sets in `S` is built by dynamic programming
//! (each subset extends the subset without its lowest index by one shifted-OR
//! pass), and a family has a rainbow solution iff some size-`m` sumset meets a
//! set outside `S`.

use serde::Serialize;

use crate::family::Family;
use crate::set::IntSet;

/// A concrete rainbow solution: `m` source placements and one target
/// placement, as `(set_index, value)` pairs with 1-based set indices.
///
/// Sources are stored sorted by set index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub sources: Vec<(usize, usize)>,
    pub target: (usize, usize),
}

impl Witness {
    /// Key realizing the documented total order on witnesses:
    /// (target index, target value, source indices, sorted source values,
    /// source values in index order). The final component breaks ties the
    /// sorted values cannot.
    fn order_key(&self) -> (usize, usize, Vec<usize>, Vec<usize>, Vec<usize>) {
        let idx: Vec<usize> = self.sources.iter().map(|&(i, _)| i).collect();
        let vals: Vec<usize> = self.sources.iter().map(|&(_, v)| v).collect();
        let mut sorted = vals.clone();
        sorted.sort_unstable();
        (self.target.0, self.target.1, idx, sorted, vals)
    }
}

/// The iterated sumset `{a1 + ... + at : ai in sets[i]}` over
/// `[1, sum of universe maxima]`.
///
/// Empty inputs absorb: the result is empty as soon as any set is empty.
/// A single set is returned unchanged.
///
/// # Panics
///
/// Panics on an empty list of sets.
pub fn iterated_sumset(sets: &[IntSet]) -> IntSet {
    assert!(!sets.is_empty(), "iterated_sumset requires at least one set");
    let mut acc = sets[0].clone();
    for s in &sets[1..] {
        acc = acc.sumset(s);
    }
    acc
}

struct MaskEntry {
    mask: u64,
    pop: usize,
    /// Index of the lowest set bit: the set this entry adds.
    newest: usize,
    /// Position of the entry for `mask` without its lowest bit, if any.
    rest: Option<usize>,
}

/// Reusable subset-lattice workspace. One instance per thread; `has_rainbow`
/// recomputes every sumset from the given sets on each call, so the detector
/// carries no state between families.
pub(crate) struct Detector {
    k: usize,
    m: usize,
    entries: Vec<MaskEntry>,
    sums: Vec<IntSet>,
    rank: std::collections::HashMap<u64, usize>,
}

impl Detector {
    /// Workspace for families of `k` sets over `[1, n]` with `m` summands.
    ///
    /// Memory grows with the number of index subsets of size at most `m`,
    /// so this is meant for small `k` (at most 63).
    pub(crate) fn new(k: usize, n: usize, m: usize) -> Detector {
        assert!(k <= 63, "detection supports at most 63 sets");
        let mut entries: Vec<MaskEntry> = Vec::new();
        let mut sums: Vec<IntSet> = Vec::new();
        let mut rank = std::collections::HashMap::new();
        let mut layer: Vec<u64> = Vec::new();
        for pop in 1..=m.min(k) {
            layer.clear();
            push_combinations(k, pop, &mut layer);
            for &mask in layer.iter() {
                let newest = mask.trailing_zeros() as usize;
                let rest_mask = mask & (mask - 1);
                let rest = if rest_mask == 0 { None } else { Some(rank[&rest_mask]) };
                rank.insert(mask, entries.len());
                entries.push(MaskEntry { mask, pop, newest, rest });
                sums.push(IntSet::empty(pop * n));
            }
        }
        Detector { k, m, entries, sums, rank }
    }

    /// Whether the given sets (a full family or a prefix of one) admit a
    /// rainbow solution. Exits as soon as one size-`m` sumset meets a
    /// disjoint set.
    pub(crate) fn has_rainbow(&mut self, sets: &[IntSet]) -> bool {
        let j = sets.len();
        debug_assert!(j <= self.k);
        if j < self.m + 1 {
            return false;
        }
        let limit = 1u64 << j;
        for (i, e) in self.entries.iter().enumerate() {
            if e.mask >= limit {
                continue;
            }
            let (built, cur) = self.sums.split_at_mut(i);
            let slot = &mut cur[0];
            match e.rest {
                None => slot.copy_from(&sets[e.newest]),
                Some(r) => {
                    slot.clear_all();
                    for x in sets[e.newest].iter() {
                        slot.or_shifted(&built[r], x);
                    }
                }
            }
            if e.pop == self.m {
                for (t, target) in sets.iter().enumerate() {
                    if e.mask >> t & 1 == 0 && slot.intersects(target) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Rebuild every sumset without early exit, for witness extraction.
    fn build_all(&mut self, sets: &[IntSet]) {
        debug_assert_eq!(sets.len(), self.k);
        for (i, e) in self.entries.iter().enumerate() {
            let (built, cur) = self.sums.split_at_mut(i);
            let slot = &mut cur[0];
            match e.rest {
                None => slot.copy_from(&sets[e.newest]),
                Some(r) => {
                    slot.clear_all();
                    for x in sets[e.newest].iter() {
                        slot.or_shifted(&built[r], x);
                    }
                }
            }
        }
    }

    fn sum_for(&self, mask: u64) -> &IntSet {
        &self.sums[self.rank[&mask]]
    }
}

fn push_combinations(k: usize, pop: usize, out: &mut Vec<u64>) {
    fn rec(k: usize, pop: usize, start: usize, acc: u64, out: &mut Vec<u64>) {
        if pop == 0 {
            out.push(acc);
            return;
        }
        for i in start..=k - pop {
            rec(k, pop - 1, i + 1, acc | 1 << i, out);
        }
    }
    rec(k, pop, 0, 0, out);
}

/// All size-`m` subsets of the 1-based indices `1..=k` except `excluded`,
/// as ascending index vectors in lexicographic order.
fn source_subsets(k: usize, m: usize, excluded: usize) -> Vec<Vec<usize>> {
    let pool: Vec<usize> = (1..=k).filter(|&i| i != excluded).collect();
    let mut out = Vec::new();
    let mut acc = Vec::with_capacity(m);
    fn rec(pool: &[usize], m: usize, start: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if acc.len() == m {
            out.push(acc.clone());
            return;
        }
        for i in start..pool.len() {
            acc.push(pool[i]);
            rec(pool, m, i + 1, acc, out);
            acc.pop();
        }
    }
    rec(&pool, m, 0, &mut acc, &mut out);
    out
}

fn mask_of(indices: &[usize]) -> u64 {
    indices.iter().fold(0u64, |acc, &i| acc | 1 << (i - 1))
}

/// Find a rainbow solution if one exists.
///
/// When several exist, the returned witness is the minimum under the order
/// (target index, target value, source indices, sorted source values, source
/// values in index order), so outputs are reproducible.
pub fn find_rainbow(family: &Family) -> Option<Witness> {
    let p = family.problem();
    let (k, m) = (p.k(), p.m());
    let mut detector = Detector::new(k, p.n(), m);
    if !detector.has_rainbow(family.sets()) {
        return None;
    }
    detector.build_all(family.sets());

    for t in 1..=k {
        let subsets = source_subsets(k, m, t);
        let target_set = family.set(t);
        let value = subsets
            .iter()
            .filter_map(|s| detector.sum_for(mask_of(s)).first_common(target_set))
            .min();
        let Some(value) = value else { continue };
        let indices = subsets
            .iter()
            .find(|s| detector.sum_for(mask_of(s)).contains(value))
            .expect("some subset produced the minimal value");
        let source_sets: Vec<&IntSet> = indices.iter().map(|&i| family.set(i)).collect();
        let values =
            minimal_assignment(&source_sets, value).expect("the sumset contains the value");
        let witness = Witness {
            sources: indices.iter().copied().zip(values).collect(),
            target: (t, value),
        };
        debug_assert!(verify_witness(family, &witness));
        return Some(witness);
    }
    unreachable!("detection reported a rainbow solution but extraction found none")
}

/// The value tuple summing to `target` that minimizes (sorted values, values
/// in position order), or `None` when no tuple sums to `target`.
fn minimal_assignment(sets: &[&IntSet], target: usize) -> Option<Vec<usize>> {
    let mins: Vec<usize> = sets.iter().map(|s| s.min_element().unwrap_or(usize::MAX)).collect();
    let maxs: Vec<usize> = sets.iter().map(|s| s.max_element().unwrap_or(0)).collect();
    if mins.contains(&usize::MAX) {
        return None;
    }
    let min_suffix: Vec<usize> = suffix_sums(&mins);
    let max_suffix: Vec<usize> = suffix_sums(&maxs);

    let mut best: Option<(Vec<usize>, Vec<usize>)> = None;
    let mut acc = Vec::with_capacity(sets.len());
    search(sets, target, &min_suffix, &max_suffix, &mut acc, &mut best);
    return best.map(|(_, vals)| vals);

    fn suffix_sums(v: &[usize]) -> Vec<usize> {
        let mut out = vec![0; v.len() + 1];
        for i in (0..v.len()).rev() {
            out[i] = out[i + 1] + v[i];
        }
        out
    }

    fn search(
        sets: &[&IntSet],
        remaining: usize,
        min_suffix: &[usize],
        max_suffix: &[usize],
        acc: &mut Vec<usize>,
        best: &mut Option<(Vec<usize>, Vec<usize>)>,
    ) {
        let pos = acc.len();
        if pos == sets.len() {
            if remaining == 0 {
                let mut sorted = acc.clone();
                sorted.sort_unstable();
                let key = (sorted, acc.clone());
                if best.as_ref().is_none_or(|b| key < *b) {
                    *best = Some(key);
                }
            }
            return;
        }
        for v in sets[pos].iter() {
            if v + min_suffix[pos + 1] > remaining {
                break;
            }
            if v + max_suffix[pos + 1] < remaining {
                continue;
            }
            acc.push(v);
            search(sets, remaining - v, min_suffix, max_suffix, acc, best);
            acc.pop();
        }
    }
}

/// Brute-force reference detector: loops over every injective assignment of
/// the `m + 1` variables to set indices and every value tuple, and returns
/// the minimal witness under the same total order as [`find_rainbow`].
///
/// This is the independent oracle for the same predicate; it shares no code
/// with the sumset path. Only feasible at tiny scale.
pub fn naive_find_rainbow(family: &Family) -> Option<Witness> {
    let p = family.problem();
    let (k, m) = (p.k(), p.m());
    let mut best: Option<Witness> = None;
    for t in 1..=k {
        for indices in source_subsets(k, m, t) {
            let mut values = Vec::with_capacity(m);
            enumerate(family, t, &indices, &mut values, &mut best);
        }
    }
    return best;

    fn enumerate(
        family: &Family,
        t: usize,
        indices: &[usize],
        values: &mut Vec<usize>,
        best: &mut Option<Witness>,
    ) {
        if values.len() == indices.len() {
            let sum: usize = values.iter().sum();
            if family.set(t).contains(sum) {
                let candidate = Witness {
                    sources: indices.iter().copied().zip(values.iter().copied()).collect(),
                    target: (t, sum),
                };
                if best.as_ref().is_none_or(|b| candidate.order_key() < b.order_key()) {
                    *best = Some(candidate);
                }
            }
            return;
        }
        for v in family.set(indices[values.len()]).iter() {
            values.push(v);
            enumerate(family, t, indices, values, best);
            values.pop();
        }
    }
}

/// Check every witness invariant against the family: `m` sources, pairwise
/// distinct in-range indices, sources sorted by index, memberships, and the
/// sum identity.
pub fn verify_witness(family: &Family, witness: &Witness) -> bool {
    let p = family.problem();
    if witness.sources.len() != p.m() {
        return false;
    }
    let mut indices: Vec<usize> = witness.sources.iter().map(|&(i, _)| i).collect();
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return false;
    }
    indices.push(witness.target.0);
    indices.sort_unstable();
    if indices[0] < 1 || *indices.last().unwrap() > p.k() {
        return false;
    }
    if indices.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    for &(i, v) in witness.sources.iter().chain(std::iter::once(&witness.target)) {
        if !family.set(i).contains(v) {
            return false;
        }
    }
    witness.sources.iter().map(|&(_, v)| v).sum::<usize>() == witness.target.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::Problem;

    fn family(n: usize, m: usize, sets: &[&[usize]]) -> Family {
        let problem = Problem::new(n, m, sets.len()).unwrap();
        let sets = sets.iter().map(|s| IntSet::from_elements(n, s).unwrap()).collect();
        Family::new(problem, sets).unwrap()
    }

    #[test]
    fn iterated_sumset_examples() {
        let a = IntSet::from_elements(3, &[1, 3]).unwrap();
        let b = IntSet::from_elements(2, &[2]).unwrap();
        assert_eq!(iterated_sumset(&[a, b]).to_vec(), vec![3, 5]);

        // Direct enumeration of the 8 sums gives {3,4,5,6}: the
        // superadditivity equality case (all progressions, difference 1).
        let s = IntSet::from_elements(2, &[1, 2]).unwrap();
        let triple = iterated_sumset(&[s.clone(), s.clone(), s.clone()]);
        assert_eq!(triple.to_vec(), vec![3, 4, 5, 6]);
        assert_eq!(triple.len(), 2 + 2 + 2 - 2);

        let empty = IntSet::empty(4);
        let one = IntSet::from_elements(4, &[1]).unwrap();
        assert!(iterated_sumset(&[empty, one]).is_empty());

        let single = IntSet::from_elements(9, &[2, 7]).unwrap();
        assert_eq!(iterated_sumset(std::slice::from_ref(&single)), single);
    }

    #[test]
    fn find_rainbow_singleton_chain() {
        let f = family(3, 2, &[&[1], &[2], &[3]]);
        let w = find_rainbow(&f).unwrap();
        assert_eq!(w, Witness { sources: vec![(1, 1), (2, 2)], target: (3, 3) });
        assert!(verify_witness(&f, &w));
    }

    #[test]
    fn find_rainbow_odds_free() {
        let f = family(5, 2, &[&[1, 3, 5], &[1, 3, 5], &[1, 3, 5]]);
        assert_eq!(find_rainbow(&f), None);
        assert_eq!(naive_find_rainbow(&f), None);
    }

    #[test]
    fn find_rainbow_suffix_blocks() {
        let f = family(6, 2, &[&[3, 4, 5, 6], &[3, 4, 5, 6], &[3, 4, 5, 6]]);
        let w = find_rainbow(&f).unwrap();
        // 3 + 3 = 6; the minimal witness targets set 1.
        assert_eq!(w, Witness { sources: vec![(2, 3), (3, 3)], target: (1, 6) });
        assert_eq!(naive_find_rainbow(&f), Some(w));
    }

    #[test]
    fn naive_empty_set_pigeonhole() {
        // With k = m + 1 every injective assignment uses the empty set.
        let problem = Problem::new(4, 2, 3).unwrap();
        let sets = vec![
            IntSet::from_elements(4, &[1, 2]).unwrap(),
            IntSet::from_elements(4, &[2, 4]).unwrap(),
            IntSet::empty(4),
        ];
        let f = Family::new(problem, sets).unwrap();
        assert_eq!(naive_find_rainbow(&f), None);
        assert_eq!(find_rainbow(&f), None);
    }

    #[test]
    fn values_may_repeat_across_sets() {
        let f = family(4, 2, &[&[2], &[2], &[4]]);
        let w = naive_find_rainbow(&f).unwrap();
        assert_eq!(w, Witness { sources: vec![(1, 2), (2, 2)], target: (3, 4) });
        assert_eq!(find_rainbow(&f), Some(w));
    }

    #[test]
    fn verify_witness_rejects_violations() {
        let f = family(3, 2, &[&[1], &[2], &[3]]);
        let good = Witness { sources: vec![(1, 1), (2, 2)], target: (3, 3) };
        assert!(verify_witness(&f, &good));

        let repeated = Witness { sources: vec![(1, 1), (1, 1)], target: (3, 3) };
        assert!(!verify_witness(&f, &repeated));

        let target_repeats_source = Witness { sources: vec![(1, 1), (2, 2)], target: (2, 2) };
        assert!(!verify_witness(&f, &target_repeats_source));

        let bad_sum = Witness { sources: vec![(1, 1), (2, 2)], target: (3, 3 + 1) };
        assert!(!verify_witness(&f, &bad_sum));

        let missing_membership = Witness { sources: vec![(1, 2), (2, 1)], target: (3, 3) };
        assert!(!verify_witness(&f, &missing_membership));

        let unsorted = Witness { sources: vec![(2, 2), (1, 1)], target: (3, 3) };
        assert!(!verify_witness(&f, &unsorted));

        let out_of_range = Witness { sources: vec![(1, 1), (4, 2)], target: (3, 3) };
        assert!(!verify_witness(&f, &out_of_range));
    }

    #[test]
    fn three_summand_detection() {
        // 1 + 1 + 2 = 4 with sources in sets 1, 2, 3 and target in set 4.
        let f = family(4, 3, &[&[1], &[1], &[2], &[4]]);
        let w = find_rainbow(&f).unwrap();
        assert!(verify_witness(&f, &w));
        assert_eq!(naive_find_rainbow(&f), Some(w));

        // Raising the target out of reach kills the solution.
        let g = family(5, 3, &[&[1], &[1], &[2], &[5]]);
        assert_eq!(find_rainbow(&g), None);
        assert_eq!(naive_find_rainbow(&g), None);
    }
}
