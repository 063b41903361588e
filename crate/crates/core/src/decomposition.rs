//! Integral and complex decompositions of character sets, irreducibility, and
//! building sets of layers.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::arrangement::{Layer, LayerPoset};
use crate::error::{Error, Result};
use crate::lattice::{IntVector, Sublattice};

/// A set partition of `0..ground`, blocks sorted internally and by smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(ground: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; ground];
        let mut normalized = Vec::with_capacity(blocks.len());
        for mut block in blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            block.sort_unstable();
            for &i in &block {
                if i >= ground {
                    return Err(Error::InvalidPartition(format!("index {i} out of range")));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidPartition(format!("index {i} repeated")));
                }
            }
            normalized.push(block);
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("index {i} not covered")));
        }
        normalized.sort_by_key(|b| b[0]);
        Ok(Self { blocks: normalized })
    }

    pub fn trivial(ground: usize) -> Self {
        Self {
            blocks: if ground == 0 {
                Vec::new()
            } else {
                vec![(0..ground).collect()]
            },
        }
    }

    pub fn singletons(ground: usize) -> Self {
        Self {
            blocks: (0..ground).map(|i| vec![i]).collect(),
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn ground(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.blocks.len() <= 1
    }

    /// Every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.blocks
            .iter()
            .all(|b| coarser.blocks.iter().any(|c| b.iter().all(|i| c.contains(i))))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let items: Vec<String> = b.iter().map(|i| i.to_string()).collect();
                format!("{{{}}}", items.join(","))
            })
            .collect();
        write!(f, "{}", blocks.join(" "))
    }
}

fn ambient(vectors: &[IntVector]) -> usize {
    vectors.first().map_or(0, Vec::len)
}

fn span(vectors: &[IntVector], indices: &[usize]) -> Sublattice {
    let gens: Vec<IntVector> = indices.iter().map(|&i| vectors[i].clone()).collect();
    Sublattice::from_generators(ambient(vectors), &gens).expect("vectors share a length")
}

fn check_partition(vectors: &[IntVector], p: &Partition) -> Result<()> {
    if p.ground() != vectors.len() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} elements, set has {}",
            p.ground(),
            vectors.len()
        )));
    }
    Ok(())
}

/// The block saturations are independent and sum to the saturation of the whole set.
pub fn is_integral_decomposition(vectors: &[IntVector], p: &Partition) -> Result<bool> {
    check_partition(vectors, p)?;
    let all: Vec<usize> = (0..vectors.len()).collect();
    let whole = span(vectors, &all).saturate();
    let blocks: Vec<Sublattice> = p
        .blocks
        .iter()
        .map(|b| span(vectors, b).saturate())
        .collect();
    let rank_sum: usize = blocks.iter().map(Sublattice::rank).sum();
    let total = blocks
        .iter()
        .fold(Sublattice::zero(ambient(vectors)), |acc, b| acc.sum(b));
    Ok(rank_sum == whole.rank() && total == whole)
}

/// The block ranks add up to the rank of the whole set.
pub fn is_complex_decomposition(vectors: &[IntVector], p: &Partition) -> Result<bool> {
    check_partition(vectors, p)?;
    let all: Vec<usize> = (0..vectors.len()).collect();
    let rank_sum: usize = p.blocks.iter().map(|b| span(vectors, b).rank()).sum();
    Ok(rank_sum == span(vectors, &all).rank())
}

/// Connected components of the linear matroid over `ℚ`: the finest complex
/// decomposition. Computed from fundamental circuits of a greedy basis.
pub fn matroid_components(vectors: &[IntVector]) -> Partition {
    let n = vectors.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut j = i;
        while parent[j] != r {
            let next = parent[j];
            parent[j] = r;
            j = next;
        }
        r
    }

    let mut basis: Vec<usize> = Vec::new();
    for i in 0..n {
        let mut candidate = basis.clone();
        candidate.push(i);
        if span(vectors, &candidate).rank() > basis.len() {
            basis = candidate;
        }
    }
    let full_rank = basis.len();
    for e in (0..n).filter(|e| !basis.contains(e)) {
        for (pos, &b) in basis.iter().enumerate() {
            let mut swapped = basis.clone();
            swapped[pos] = e;
            if span(vectors, &swapped).rank() == full_rank {
                let (re, rb) = (find(&mut parent, e), find(&mut parent, b));
                parent[re] = rb;
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    Partition::new(n, groups.into_values().collect()).expect("union-find yields a partition")
}

/// All set partitions of `0..m` as block-label vectors (restricted growth strings).
fn set_partitions(m: usize) -> Vec<Vec<usize>> {
    fn grow(labels: &mut Vec<usize>, max: usize, m: usize, out: &mut Vec<Vec<usize>>) {
        if labels.len() == m {
            out.push(labels.clone());
            return;
        }
        for l in 0..=max + 1 {
            labels.push(l);
            grow(labels, max.max(l), m, out);
            labels.pop();
        }
    }
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut labels = vec![0];
    grow(&mut labels, 0, m, &mut out);
    out
}

/// The unique decomposition into ℤ-irreducible blocks. Its blocks are unions of
/// matroid components, so the search runs over coarsenings of those, finest first.
pub fn finest_integral_decomposition(vectors: &[IntVector]) -> Partition {
    let components = matroid_components(vectors);
    let comp_blocks = components.blocks();
    let m = comp_blocks.len();
    let all: Vec<usize> = (0..vectors.len()).collect();
    let whole = span(vectors, &all).saturate();
    let n = ambient(vectors);

    let mut memo: HashMap<Vec<usize>, Sublattice> = HashMap::new();
    let mut saturation_of = |group: Vec<usize>| -> Sublattice {
        memo.entry(group.clone())
            .or_insert_with(|| {
                let idx: Vec<usize> = group
                    .iter()
                    .flat_map(|&c| comp_blocks[c].iter().copied())
                    .collect();
                span(vectors, &idx).saturate()
            })
            .clone()
    };

    let mut labelings = set_partitions(m);
    labelings.sort_by_key(|l| std::cmp::Reverse(l.iter().max().map_or(0, |x| x + 1)));
    for labels in labelings {
        let count = labels.iter().max().map_or(0, |x| x + 1);
        let groups: Vec<Vec<usize>> = (0..count)
            .map(|g| (0..m).filter(|&c| labels[c] == g).collect())
            .collect();
        let total = groups
            .into_iter()
            .map(&mut saturation_of)
            .fold(Sublattice::zero(n), |acc, s| acc.sum(&s));
        if total == whole {
            let blocks: Vec<Vec<usize>> = (0..count)
                .map(|g| {
                    (0..m)
                        .filter(|&c| labels[c] == g)
                        .flat_map(|c| comp_blocks[c].iter().copied())
                        .collect()
                })
                .collect();
            return Partition::new(vectors.len(), blocks).expect("coarsening is a partition");
        }
    }
    Partition::trivial(vectors.len())
}

pub fn is_z_irreducible(vectors: &[IntVector]) -> bool {
    finest_integral_decomposition(vectors).is_trivial()
}

pub fn is_c_irreducible(vectors: &[IntVector]) -> bool {
    matroid_components(vectors).is_trivial()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BuildingFlavor {
    Irreducible,
    Custom,
}

/// A building set of layers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildingSet {
    members: Vec<Layer>,
    flavor: BuildingFlavor,
}

impl BuildingSet {
    /// Validates the building-set property at every point: each nonempty flat of
    /// the localized characters must be integrally decomposed by the maximal
    /// localized members it contains.
    pub fn custom(poset: &LayerPoset, members: Vec<Layer>) -> Result<Self> {
        let mut members = members;
        members.sort();
        members.dedup();
        if members.iter().any(|m| poset.index_of(m).is_none()) {
            return Err(Error::InvalidBuildingSet(
                "member is not a layer of the arrangement".into(),
            ));
        }
        let arr = poset.arrangement();
        for p in poset.points() {
            let local: Vec<&[usize]> = members
                .iter()
                .filter(|m| m.contains(p))
                .map(|m| m.support())
                .collect();
            for flat in arr.complete_subsets(p)?.into_iter().filter(|f| !f.is_empty()) {
                let inside: Vec<&[usize]> = local
                    .iter()
                    .copied()
                    .filter(|x| x.iter().all(|i| flat.contains(i)))
                    .collect();
                let maximal: Vec<&[usize]> = inside
                    .iter()
                    .copied()
                    .filter(|x| {
                        !inside
                            .iter()
                            .any(|y| y.len() > x.len() && x.iter().all(|i| y.contains(i)))
                    })
                    .collect();
                let blocks: Vec<Vec<usize>> = maximal
                    .iter()
                    .map(|x| {
                        x.iter()
                            .map(|i| flat.iter().position(|f| f == i).expect("subset of flat"))
                            .collect()
                    })
                    .collect();
                let describe = || {
                    let items: Vec<String> = flat.iter().map(|i| i.to_string()).collect();
                    format!("flat {{{}}} at point {}", items.join(","), p)
                };
                let partition = Partition::new(flat.len(), blocks).map_err(|_| {
                    Error::InvalidBuildingSet(format!("{} is not partitioned", describe()))
                })?;
                let vectors = arr.lambdas(&flat);
                if !is_integral_decomposition(&vectors, &partition)? {
                    return Err(Error::InvalidBuildingSet(format!(
                        "{} is not decomposed",
                        describe()
                    )));
                }
            }
        }
        Ok(Self {
            members,
            flavor: BuildingFlavor::Custom,
        })
    }

    pub fn members(&self) -> &[Layer] {
        &self.members
    }

    pub fn flavor(&self) -> BuildingFlavor {
        self.flavor
    }

    pub fn contains(&self, layer: &Layer) -> bool {
        self.members.binary_search(layer).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// The building set of ℤ-irreducible layers.
pub fn irreducible_layers(poset: &LayerPoset) -> BuildingSet {
    let arr = poset.arrangement();
    let members: Vec<Layer> = poset
        .layers()
        .iter()
        .filter(|l| is_z_irreducible(&arr.lambdas(l.support())))
        .cloned()
        .collect();
    BuildingSet {
        members,
        flavor: BuildingFlavor::Irreducible,
    }
}

/// The minimal members of `g` containing `c`; their localized character sets
/// decompose that of `c`, and their intersection is `c`.
pub fn factors(poset: &LayerPoset, c: &Layer, g: &BuildingSet) -> Result<Vec<Layer>> {
    if poset.index_of(c).is_none() {
        return Err(Error::NotInPoset);
    }
    let above: Vec<&Layer> = g.members.iter().filter(|d| d.contains(c)).collect();
    Ok(above
        .iter()
        .filter(|d| !above.iter().any(|e| e != *d && d.contains(e)))
        .map(|d| (*d).clone())
        .collect())
}
