//! Compression of arbitrary families into nested ones of equal total size,
//! and the greedy lifting of witnesses back through the compression.

use crate::error::Error;
use crate::family::Family;
use crate::rainbow::{verify_witness, Witness};
use crate::set::IntSet;

/// Replace each family by its multiplicity layers: the i-th output set holds
/// the elements contained in at least `i` of the input sets.
///
/// The output is nested, preserves the problem parameters, the total size and
/// the multiplicity profile, and is a fixed point of this map. Rainbow-free
/// inputs compress to rainbow-free outputs (witnesses lift back, see
/// [`lift_witness`]); the converse fails.
pub fn compress(family: &Family) -> Family {
    let p = family.problem();
    let n = p.n();
    let mut multiplicity = vec![0usize; n + 1];
    for set in family.sets() {
        for x in set.iter() {
            multiplicity[x] += 1;
        }
    }
    let layers = (1..=p.k())
        .map(|i| {
            let mut layer = IntSet::empty(n);
            for (x, &count) in multiplicity.iter().enumerate().skip(1) {
                if count >= i {
                    layer.set_bit(x);
                }
            }
            layer
        })
        .collect();
    Family::new(*p, layers).expect("layers match the problem parameters")
}

/// Turn a witness for `compress(family)` into a witness for `family`.
///
/// Entries are processed in increasing order of their layer index. An element
/// of layer `i` lies in at least `i` original sets while fewer than `i` are
/// consumed when it is reached, so an unused original set containing it
/// always exists; ties go to the smallest set index.
///
/// Fails if the witness is not valid for the compressed family.
pub fn lift_witness(family: &Family, witness: &Witness) -> Result<Witness, Error> {
    let compressed = compress(family);
    if !verify_witness(&compressed, witness) {
        return Err(Error::InvalidWitness(
            "lift_witness requires a witness valid for the compressed family".to_string(),
        ));
    }

    let mut entries: Vec<(usize, usize, bool)> = witness
        .sources
        .iter()
        .map(|&(layer, value)| (layer, value, false))
        .chain(std::iter::once((witness.target.0, witness.target.1, true)))
        .collect();
    entries.sort_unstable();

    let mut used = vec![false; family.problem().k() + 1];
    let mut sources = Vec::with_capacity(witness.sources.len());
    let mut target = None;
    for (_, value, is_target) in entries {
        let chosen = (1..=family.problem().k())
            .find(|&j| !used[j] && family.set(j).contains(value))
            .expect("an element of layer i lies in at least i unused original sets");
        used[chosen] = true;
        if is_target {
            target = Some((chosen, value));
        } else {
            sources.push((chosen, value));
        }
    }
    sources.sort_unstable();
    let lifted = Witness { sources, target: target.expect("exactly one target entry") };
    debug_assert!(verify_witness(family, &lifted));
    Ok(lifted)
}
