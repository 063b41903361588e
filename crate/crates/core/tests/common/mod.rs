//! Brute-force oracles and instance builders shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toric_wonderful::arrangement::{Layer, LayerPoset};
use toric_wonderful::decomposition::{irreducible_layers, BuildingSet, Partition};
use toric_wonderful::fixtures;
use toric_wonderful::lattice::{
    ivec, lattice_index, smith_normal_form, IntVector, IntegerMatrix, LatticeIndex, Sublattice, TorsionValue,
};
use toric_wonderful::nested::NestedSet;

pub fn tv(p: i64, q: i64) -> TorsionValue {
    TorsionValue::new(p, q).unwrap()
}

pub fn point(poset: &LayerPoset, coords: &[TorsionValue]) -> Layer {
    poset
        .points()
        .into_iter()
        .find(|p| p.torsion_coordinates() == Some(coords))
        .expect("point of the arrangement")
        .clone()
}

/// Component through `p` of the hypersurface of the character `lambda`.
pub fn hyper(poset: &LayerPoset, lambda: &[i64], p: &Layer) -> Layer {
    let arr = poset.arrangement();
    let idx = arr
        .characters()
        .iter()
        .position(|c| c.lambda == ivec(lambda) && p.value_of(&c.lambda) == Some(c.constant.clone()))
        .expect("character through the point");
    arr.layer_components(&[idx])
        .unwrap()
        .into_iter()
        .find(|l| l.contains(p))
        .unwrap()
}

/// All set partitions of `0..m`, as lists of blocks.
pub fn all_partitions(m: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for i in 0..m {
        let mut next = Vec::new();
        for p in &out {
            for b in 0..p.len() {
                let mut q = p.clone();
                q[b].push(i);
                next.push(q);
            }
            let mut q = p.clone();
            q.push(vec![i]);
            next.push(q);
        }
        out = next;
    }
    out
}

fn span(n: usize, vectors: &[IntVector], block: &[usize]) -> Sublattice {
    let gens: Vec<IntVector> = block.iter().map(|&i| vectors[i].clone()).collect();
    Sublattice::from_generators(n, &gens).unwrap()
}

/// Integral decomposition test through ranks and the index of the block sum in
/// the saturation of the whole set.
pub fn oracle_is_integral(vectors: &[IntVector], blocks: &[Vec<usize>]) -> bool {
    let n = vectors[0].len();
    let all: Vec<usize> = (0..vectors.len()).collect();
    let whole = span(n, vectors, &all).saturate();
    let sats: Vec<Sublattice> = blocks.iter().map(|b| span(n, vectors, b).saturate()).collect();
    let rank_sum: usize = sats.iter().map(Sublattice::rank).sum();
    if rank_sum != whole.rank() {
        return false;
    }
    let gens: Vec<IntVector> = sats.iter().flat_map(Sublattice::basis_rows).collect();
    let sum = Sublattice::from_generators(n, &gens).unwrap();
    lattice_index(&sum, &whole).unwrap() == LatticeIndex::Finite(1.into())
}

/// The integral decompositions with the most blocks, and all integral
/// decompositions.
pub fn oracle_decompositions(vectors: &[IntVector]) -> (Vec<Partition>, Vec<Partition>) {
    let valid: Vec<Partition> = all_partitions(vectors.len())
        .into_iter()
        .filter(|blocks| oracle_is_integral(vectors, blocks))
        .map(|blocks| Partition::new(vectors.len(), blocks).unwrap())
        .collect();
    let most = valid.iter().map(Partition::len).max().unwrap_or(0);
    let finest = valid.iter().filter(|p| p.len() == most).cloned().collect();
    (finest, valid)
}

pub fn random_vectors(rng: &mut ChaCha8Rng, max_rank: usize, max_count: usize, max_entry: i64) -> Vec<IntVector> {
    let n = rng.gen_range(1..=max_rank);
    let count = rng.gen_range(1..=max_count);
    (0..count)
        .map(|_| loop {
            let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-max_entry..=max_entry)).collect();
            if v.iter().any(|&x| x != 0) {
                break ivec(&v);
            }
        })
        .collect()
}

/// Minimal members of `g` containing `d`.
fn oracle_factors(g: &BuildingSet, d: &Layer) -> Vec<usize> {
    let above: Vec<usize> = (0..g.len()).filter(|&i| g.members()[i].contains(d)).collect();
    above
        .iter()
        .copied()
        .filter(|&i| {
            !above
                .iter()
                .any(|&j| j != i && g.members()[i].contains(&g.members()[j]))
        })
        .collect()
}

/// For every maximal chain of the poset, the set of building-set members that
/// are factors of some element of the chain. A set of members is nested iff
/// it lies inside one of these.
pub fn flag_factor_sets(poset: &LayerPoset, g: &BuildingSet) -> Vec<BTreeSet<usize>> {
    let layers = poset.layers();
    let n = layers.len();
    let covers: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| {
                    j != i
                        && layers[j].contains(&layers[i])
                        && !(0..n).any(|k| {
                            k != i
                                && k != j
                                && layers[k].contains(&layers[i])
                                && layers[j].contains(&layers[k])
                        })
                })
                .collect()
        })
        .collect();
    let minimal: Vec<usize> = (0..n)
        .filter(|&i| !(0..n).any(|j| j != i && layers[i].contains(&layers[j])))
        .collect();
    let factors: Vec<Vec<usize>> = layers.iter().map(|d| oracle_factors(g, d)).collect();

    fn walk(
        i: usize,
        covers: &[Vec<usize>],
        factors: &[Vec<usize>],
        acc: &BTreeSet<usize>,
        out: &mut BTreeSet<BTreeSet<usize>>,
    ) {
        let mut acc = acc.clone();
        acc.extend(factors[i].iter().copied());
        if covers[i].is_empty() {
            out.insert(acc);
            return;
        }
        for &j in &covers[i] {
            walk(j, covers, factors, &acc, out);
        }
    }
    let mut out = BTreeSet::new();
    for &m in &minimal {
        walk(m, &covers, &factors, &BTreeSet::new(), &mut out);
    }
    out.into_iter().collect()
}

/// Every subset of size `1..=k` of some flag factor set, i.e. all nested sets
/// of at most `k` members.
pub fn oracle_nested_subsets(flag_sets: &[BTreeSet<usize>], k: usize) -> HashSet<Vec<usize>> {
    let mut out = HashSet::new();
    for f in flag_sets {
        let items: Vec<usize> = f.iter().copied().collect();
        for sub in small_subsets(items.len(), k) {
            out.insert(sub.iter().map(|&i| items[i]).collect());
        }
    }
    out
}

/// Subsets of `0..m` of size `1..=k`.
pub fn small_subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == k {
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

pub fn minimal_members(members: &[Layer]) -> Vec<&Layer> {
    members
        .iter()
        .filter(|c| !members.iter().any(|d| d != *c && c.contains(d)))
        .collect()
}

/// The lattices of the minimal members have ranks adding up to the codimension
/// of the center, and their sum is the (saturated) lattice of the center.
pub fn rank_additive(members: &[Layer], center: &Layer) -> bool {
    let mins = minimal_members(members);
    let rank_sum: usize = mins.iter().map(|c| c.codim()).sum();
    let n = center.lattice().ambient_rank();
    let gens: Vec<IntVector> = mins.iter().flat_map(|c| c.lattice().basis_rows()).collect();
    let sum = Sublattice::from_generators(n, &gens).unwrap();
    rank_sum == center.codim()
        && &sum == center.lattice()
        && lattice_index(&sum, &sum.saturate()).unwrap() == LatticeIndex::Finite(1.into())
}

pub fn unimodular(rows: &[IntVector]) -> bool {
    let n = rows.len();
    let m = IntegerMatrix::from_rows(n, rows).unwrap();
    let divs = smith_normal_form(&m).elementary_divisors();
    divs.len() == n && divs.iter().all(|d| *d == 1.into())
}

/// Adaptedness checked through lattice indices: for each member `C`, the basis
/// vectors of the members containing `C` generate exactly `Λ_C`, and they are
/// `rank Λ_C` in number.
pub fn adapted(s: &NestedSet, vectors: &[IntVector]) -> bool {
    unimodular(vectors)
        && s.members().iter().all(|c| {
            let rows: Vec<IntVector> = s
                .members()
                .iter()
                .zip(vectors)
                .filter(|(d, _)| d.contains(c))
                .map(|(_, v)| v.clone())
                .collect();
            let span = Sublattice::from_generators(s.center().lattice().ambient_rank(), &rows).unwrap();
            rows.len() == c.codim()
                && span.is_subset_of(c.lattice())
                && lattice_index(&span, c.lattice()).unwrap() == LatticeIndex::Finite(1.into())
        })
}

/// The unique inclusion-maximal member on which `λ` is constant.
pub fn largest_constant_member(s: &NestedSet, lambda: &[num_bigint::BigInt]) -> Option<usize> {
    let on: Vec<usize> = (0..s.len())
        .filter(|&i| s.members()[i].value_of(lambda).is_some())
        .collect();
    let tops: Vec<usize> = on
        .iter()
        .copied()
        .filter(|&i| on.iter().all(|&j| s.members()[i].contains(&s.members()[j])))
        .collect();
    (tops.len() == 1).then(|| tops[0])
}

pub struct Instance {
    pub name: String,
    pub poset: LayerPoset,
    pub g: BuildingSet,
}

fn instance(name: String, poset: LayerPoset) -> Instance {
    let g = irreducible_layers(&poset);
    Instance { name, poset, g }
}

/// Both reference arrangements followed by `count` seeded random ones with
/// rank at most 3, at most 5 characters, entries in `[-2, 2]` and constant
/// denominators at most 4.
pub fn instances(seed: u64, count: usize) -> Vec<Instance> {
    let mut out = vec![
        instance("diagonals".into(), fixtures::diagonals().build_poset()),
        instance("squares".into(), fixtures::squares().build_poset()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let arr = fixtures::random_arrangement(&mut rng, 3, 5, 2, 4);
        out.push(instance(format!("random #{i}"), arr.build_poset()));
    }
    out
}
