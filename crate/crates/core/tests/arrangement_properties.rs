use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use toric_wonderful::arrangement::{Arrangement, Layer};
use toric_wonderful::fixtures::random_arrangement;
use toric_wonderful::lattice::{smith_normal_form, IntVector, IntegerMatrix, Sublattice, TorsionValue};

fn arrangement(seed: u64, max_rank: usize) -> Arrangement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_arrangement(&mut rng, max_rank, 5, 2, 4)
}

fn to_i(x: &BigInt) -> i64 {
    x.to_i64().unwrap()
}

/// Number of connected components of `{λ_i(t) = a_i : i ∈ subset}`, counted on
/// a torsion grid fine enough to meet every component. Grid points are grouped
/// by the values of the saturated span, which separate components.
fn grid_components(arr: &Arrangement, subset: &[usize]) -> usize {
    let n = arr.rank();
    let rows: Vec<IntVector> = subset.iter().map(|&i| arr.characters()[i].lambda.clone()).collect();
    let m = IntegerMatrix::from_rows(n, &rows).unwrap();
    let dmax = smith_normal_form(&m)
        .elementary_divisors()
        .last()
        .cloned()
        .unwrap_or_else(BigInt::one);
    let den = subset
        .iter()
        .map(|&i| arr.characters()[i].constant.denominator().clone())
        .fold(BigInt::one(), |a, b| a.lcm(&b));
    let grid = to_i(&(den * dmax));
    let sat: Vec<Vec<i64>> = Sublattice::from_generators(n, &rows)
        .unwrap()
        .saturate()
        .basis_rows()
        .iter()
        .map(|r| r.iter().map(to_i).collect())
        .collect();
    let eqs: Vec<(Vec<i64>, i64)> = subset
        .iter()
        .map(|&i| {
            let c = &arr.characters()[i];
            let target = to_i(c.constant.numerator()) * (grid / to_i(c.constant.denominator()));
            (c.lambda.iter().map(to_i).collect(), target)
        })
        .collect();
    let mut seen = BTreeSet::new();
    let mut k = vec![0i64; n];
    for code in 0..(grid as usize).pow(n as u32) {
        let mut c = code;
        for slot in k.iter_mut() {
            *slot = (c % grid as usize) as i64;
            c /= grid as usize;
        }
        let pair = |row: &[i64]| row.iter().zip(&k).map(|(a, b)| a * b).sum::<i64>().rem_euclid(grid);
        if eqs.iter().all(|(row, t)| pair(row) == *t) {
            seen.insert(sat.iter().map(|r| pair(r)).collect::<Vec<_>>());
        }
    }
    seen.len()
}

fn geometry(layers: &[Layer]) -> BTreeSet<(String, Vec<TorsionValue>)> {
    layers
        .iter()
        .map(|l| (l.lattice().to_string(), l.values().to_vec()))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn complete_sets_biject_with_layers_through_a_point(seed in any::<u64>()) {
        let arr = arrangement(seed, 3);
        let poset = arr.build_poset();
        for p in poset.points() {
            let local = arr.localized(p).unwrap();
            let mut built = BTreeSet::new();
            for a in arr.complete_subsets(p).unwrap() {
                if a.is_empty() {
                    continue;
                }
                let layer = arr.layer_from_complete_set(p, &a).unwrap();
                prop_assert!(layer.contains(p));
                let restricted: Vec<usize> =
                    layer.support().iter().copied().filter(|i| local.contains(i)).collect();
                prop_assert_eq!(&restricted, &a);
                prop_assert!(built.insert(layer));
            }
            let through: BTreeSet<Layer> = poset
                .layers_containing(p)
                .into_iter()
                .map(|i| poset.layer(i).clone())
                .collect();
            prop_assert_eq!(built, through);
        }
    }

    #[test]
    fn supports_are_closed(seed in any::<u64>()) {
        let arr = arrangement(seed, 3);
        let poset = arr.build_poset();
        for layer in poset.layers() {
            let comps = arr.layer_components(layer.support()).unwrap();
            prop_assert!(comps.contains(layer));
        }
    }

    #[test]
    fn component_counts_match_grid_enumeration(seed in any::<u64>(), mask in 1u32..32) {
        let arr = arrangement(seed, 2);
        let subset: Vec<usize> = (0..arr.characters().len()).filter(|i| mask & (1 << i) != 0).collect();
        prop_assume!(!subset.is_empty());
        let comps = arr.layer_components(&subset).unwrap();
        prop_assert_eq!(comps.len(), grid_components(&arr, &subset));
    }

    #[test]
    fn poset_ignores_character_order(seed in any::<u64>()) {
        let arr = arrangement(seed, 3);
        let mut raw: Vec<(IntVector, TorsionValue)> = arr
            .characters()
            .iter()
            .map(|c| (c.lambda.clone(), c.constant.clone()))
            .collect();
        raw.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed));
        let shuffled = Arrangement::normalize(arr.rank(), &raw).unwrap();
        let (a, b) = (arr.build_poset(), shuffled.build_poset());
        prop_assert_eq!(a.len(), b.len());
        prop_assert_eq!(geometry(a.layers()), geometry(b.layers()));
        prop_assert_eq!(a.hasse_edges(), b.hasse_edges());
    }
}
