//! Small reference arrangements in rank 2 used by tests, docs and the CLI.

use rand::Rng;

use crate::arrangement::Arrangement;
use crate::lattice::{ivec, IntVector, TorsionValue};

/// `{t² = 1, s² = 1, ts = 1, ts⁻¹ = 1}`, normalized to six primitive characters.
pub fn squares() -> Arrangement {
    let zero = TorsionValue::zero();
    Arrangement::normalize(
        2,
        &[
            (ivec(&[2, 0]), zero.clone()),
            (ivec(&[0, 2]), zero.clone()),
            (ivec(&[1, 1]), zero.clone()),
            (ivec(&[1, -1]), zero),
        ],
    )
    .expect("valid arrangement")
}

/// `{ts = 1, ts⁻¹ = 1}`: two connected hypersurfaces meeting in two points.
pub fn diagonals() -> Arrangement {
    let zero = TorsionValue::zero();
    Arrangement::normalize(2, &[(ivec(&[1, 1]), zero.clone()), (ivec(&[1, -1]), zero)])
        .expect("valid arrangement")
}

/// A random arrangement with rank in `1..=max_rank`, at most `max_chars` raw
/// characters with entries in `[-max_entry, max_entry]` and constant
/// denominators at most `max_den`, normalized. Draws until the characters span
/// a finite-index sublattice.
pub fn random_arrangement<R: Rng>(
    rng: &mut R,
    max_rank: usize,
    max_chars: usize,
    max_entry: i64,
    max_den: i64,
) -> Arrangement {
    loop {
        let rank = rng.gen_range(1..=max_rank);
        if max_chars < rank {
            continue;
        }
        let count = rng.gen_range(rank..=max_chars);
        let raw: Vec<(IntVector, TorsionValue)> = (0..count)
            .map(|_| {
                let lambda: Vec<i64> = loop {
                    let v: Vec<i64> = (0..rank).map(|_| rng.gen_range(-max_entry..=max_entry)).collect();
                    if v.iter().any(|&x| x != 0) {
                        break v;
                    }
                };
                let q = rng.gen_range(1..=max_den);
                let p = rng.gen_range(0..q);
                (ivec(&lambda), TorsionValue::new(p, q).expect("nonzero denominator"))
            })
            .collect();
        if let Ok(arr) = Arrangement::normalize(rank, &raw) {
            return arr;
        }
    }
}
