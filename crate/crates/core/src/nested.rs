//! Nested sets of layers: membership, centers, maximal nested sets per point,
//! cores and successors.

use std::collections::HashMap;

use crate::arrangement::{Layer, LayerPoset};
use crate::decomposition::BuildingSet;
use crate::error::{Error, Result};

/// A strictly increasing chain of layers `D₁ ⊊ … ⊊ D_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flag {
    chain: Vec<Layer>,
}

impl Flag {
    pub fn new(chain: Vec<Layer>) -> Result<Self> {
        for pair in chain.windows(2) {
            if pair[0] == pair[1] || !pair[1].contains(&pair[0]) {
                return Err(Error::NotContained);
            }
        }
        Ok(Self { chain })
    }

    pub fn chain(&self) -> &[Layer] {
        &self.chain
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }
}

/// A nested set together with its center and a witnessing flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedSet {
    members: Vec<Layer>,
    witness: Flag,
    center: Layer,
}

impl NestedSet {
    pub fn new(poset: &LayerPoset, g: &BuildingSet, members: Vec<Layer>) -> Result<Self> {
        NestedContext::new(poset, g)?.nested_set(members)
    }

    /// Members in canonical order.
    pub fn members(&self) -> &[Layer] {
        &self.members
    }

    pub fn witness_flag(&self) -> &Flag {
        &self.witness
    }

    pub fn center(&self) -> &Layer {
        &self.center
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, layer: &Layer) -> Option<usize> {
        self.members.binary_search(layer).ok()
    }

    pub fn is_maximal(&self) -> bool {
        self.center.is_point() && self.members.len() == self.center.codim()
    }

    /// Members contained in `c`, `c` included when it is a member.
    pub fn members_below(&self, c: &Layer) -> Vec<usize> {
        (0..self.members.len())
            .filter(|&i| c.contains(&self.members[i]))
            .collect()
    }
}

/// Containment tables for one poset and building set, so that nestedness can
/// be decided without lattice computations.
pub struct NestedContext<'a> {
    poset: &'a LayerPoset,
    g: &'a BuildingSet,
    /// Poset index of each building-set member.
    member_layer: Vec<usize>,
    /// `points_in[j][k]` iff layer `j` contains the `k`-th point.
    points_in: Vec<Vec<bool>>,
    /// Per point: supports of the layers through it, with their poset index.
    flats: Vec<HashMap<Vec<usize>, usize>>,
    /// Per point: building-set members through it.
    local_members: Vec<Vec<usize>>,
}

impl<'a> NestedContext<'a> {
    pub fn new(poset: &'a LayerPoset, g: &'a BuildingSet) -> Result<Self> {
        let member_layer = g
            .members()
            .iter()
            .map(|m| poset.index_of(m).ok_or(Error::NotInPoset))
            .collect::<Result<Vec<_>>>()?;
        let points = poset.point_indices();
        let contains = |j: usize, p: usize| j == p || poset.is_below(p, j);
        let points_in: Vec<Vec<bool>> = (0..poset.len())
            .map(|j| points.iter().map(|&p| contains(j, p)).collect())
            .collect();
        let flats = points
            .iter()
            .map(|&p| {
                (0..poset.len())
                    .filter(|&j| contains(j, p))
                    .map(|j| (poset.layer(j).support().to_vec(), j))
                    .collect()
            })
            .collect();
        let local_members = points
            .iter()
            .map(|&p| {
                (0..member_layer.len())
                    .filter(|&m| contains(member_layer[m], p))
                    .collect()
            })
            .collect();
        Ok(Self {
            poset,
            g,
            member_layer,
            points_in,
            flats,
            local_members,
        })
    }

    pub fn poset(&self) -> &LayerPoset {
        self.poset
    }

    pub fn building_set(&self) -> &BuildingSet {
        self.g
    }

    fn member_indices(&self, members: &[Layer]) -> Result<Vec<usize>> {
        let mut idx = members
            .iter()
            .map(|m| self.g.members().binary_search(m).map_err(|_| Error::NotInBuildingSet))
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        idx.dedup();
        Ok(idx)
    }

    fn layer_contains(&self, outer: usize, inner: usize) -> bool {
        outer == inner || self.poset.is_below(inner, outer)
    }

    fn support(&self, m: usize) -> &[usize] {
        self.g.members()[m].support()
    }

    /// For a nested set of member indices, its center (poset index) and the
    /// position of a point of the center.
    fn decide(&self, members: &[usize]) -> Option<(usize, usize)> {
        let layers: Vec<usize> = members.iter().map(|&m| self.member_layer[m]).collect();
        let common: Vec<usize> = (0..self.points_in.first().map_or(0, Vec::len))
            .filter(|&k| layers.iter().all(|&j| self.points_in[j][k]))
            .collect();
        let &first = common.first()?;
        // the component of the intersection through the first common point
        let center = self.flats[first]
            .values()
            .copied()
            .filter(|&j| layers.iter().all(|&l| self.layer_contains(l, j)))
            .max_by_key(|&j| (self.poset.layer(j).dim(), std::cmp::Reverse(j)))?;
        if common.iter().any(|&k| !self.points_in[center][k]) {
            return None;
        }
        common
            .iter()
            .all(|&k| self.nested_at(members, k))
            .then_some((center, first))
    }

    /// The antichain criterion in the localized character set at the `k`-th point.
    fn nested_at(&self, members: &[usize], k: usize) -> bool {
        let n = members.len();
        for mask in 1u64..(1u64 << n) {
            if mask.count_ones() < 2 {
                continue;
            }
            let chosen: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| members[i]).collect();
            let antichain = chosen.iter().enumerate().all(|(i, &a)| {
                chosen.iter().skip(i + 1).all(|&b| {
                    let (la, lb) = (self.member_layer[a], self.member_layer[b]);
                    !self.layer_contains(la, lb) && !self.layer_contains(lb, la)
                })
            });
            if !antichain {
                continue;
            }
            let mut union: Vec<usize> = chosen.iter().flat_map(|&c| self.support(c).iter().copied()).collect();
            union.sort_unstable();
            union.dedup();
            if !self.flats[k].contains_key(&union) {
                return false;
            }
            let inside: Vec<usize> = self.local_members[k]
                .iter()
                .copied()
                .filter(|&x| is_subset(self.support(x), &union))
                .collect();
            let mut maximal: Vec<usize> = inside
                .iter()
                .copied()
                .filter(|&x| {
                    !inside.iter().any(|&y| {
                        self.support(y).len() > self.support(x).len()
                            && is_subset(self.support(x), self.support(y))
                    })
                })
                .collect();
            maximal.sort_unstable();
            if maximal != chosen {
                return false;
            }
        }
        true
    }

    /// The flag of flats spanned by the members taken from the largest localized
    /// character set downwards; each member is a factor of one of its layers.
    fn witness(&self, members: &[usize], k: usize) -> Flag {
        let mut ordered = members.to_vec();
        ordered.sort_by(|&a, &b| self.support(b).len().cmp(&self.support(a).len()).then(a.cmp(&b)));
        let mut chain: Vec<Layer> = Vec::new();
        for j in 0..ordered.len() {
            let mut union: Vec<usize> = ordered[j..]
                .iter()
                .flat_map(|&c| self.support(c).iter().copied())
                .collect();
            union.sort_unstable();
            union.dedup();
            let layer = self.poset.layer(self.flats[k][&union]).clone();
            if chain.last() != Some(&layer) {
                chain.push(layer);
            }
        }
        Flag::new(chain).expect("unions shrink along the order")
    }

    /// Nestedness of a set given by indices into the building set's members.
    pub fn is_nested_indices(&self, members: &[usize]) -> bool {
        let mut idx = members.to_vec();
        idx.sort_unstable();
        idx.dedup();
        idx.is_empty() || self.decide(&idx).is_some()
    }

    /// Decides nestedness; returns a witnessing flag when the set is nested.
    pub fn is_nested(&self, members: &[Layer]) -> Result<Option<Flag>> {
        let idx = self.member_indices(members)?;
        if idx.is_empty() {
            return Ok(Some(Flag::new(Vec::new())?));
        }
        Ok(self.decide(&idx).map(|(_, k)| self.witness(&idx, k)))
    }

    pub fn nested_set(&self, members: Vec<Layer>) -> Result<NestedSet> {
        let idx = self.member_indices(&members)?;
        if idx.is_empty() {
            return Err(Error::EmptySubset);
        }
        let (center, k) = self.decide(&idx).ok_or(Error::NotNested)?;
        Ok(NestedSet {
            members: idx.iter().map(|&m| self.g.members()[m].clone()).collect(),
            witness: self.witness(&idx, k),
            center: self.poset.layer(center).clone(),
        })
    }

    /// All maximal nested sets with center `p`, in canonical order.
    pub fn enumerate_maximal(&self, p: &Layer) -> Result<Vec<NestedSet>> {
        self.poset.arrangement().localized(p)?;
        let k = self
            .poset
            .index_of(p)
            .and_then(|j| self.poset.point_indices().iter().position(|&q| q == j))
            .ok_or(Error::NotAPoint)?;
        let candidates = &self.local_members[k];
        let mut found = Vec::new();
        self.extend(candidates, &mut Vec::new(), 0, &mut found);
        let mut sets = Vec::new();
        for members in found {
            let set = self.nested_set(members.iter().map(|&m| self.g.members()[m].clone()).collect())?;
            if &set.center == p {
                assert_eq!(set.len(), self.poset.rank(), "maximal nested set of wrong size");
                sets.push(set);
            }
        }
        sets.sort_by(|a, b| a.members.cmp(&b.members));
        Ok(sets)
    }

    fn extend(&self, candidates: &[usize], current: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
        let mut extendable = false;
        for (pos, &c) in candidates.iter().enumerate() {
            if current.contains(&c) {
                continue;
            }
            let mut trial = current.clone();
            trial.push(c);
            trial.sort_unstable();
            if self.decide(&trial).is_none() {
                continue;
            }
            extendable = true;
            if pos >= start {
                current.push(c);
                self.extend(candidates, current, pos + 1, out);
                current.pop();
            }
        }
        if !extendable && !current.is_empty() {
            let mut set = current.clone();
            set.sort_unstable();
            out.push(set);
        }
    }

    /// Maximal nested sets over all points, grouped by point in canonical order.
    pub fn all_maximal(&self) -> Result<Vec<NestedSet>> {
        let mut all = Vec::new();
        for p in self.poset.points() {
            all.extend(self.enumerate_maximal(p)?);
        }
        Ok(all)
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|i| b.contains(i))
}

/// Decides nestedness; returns a witnessing flag when the set is nested.
pub fn is_nested(poset: &LayerPoset, members: &[Layer], g: &BuildingSet) -> Result<Option<Flag>> {
    if members.iter().any(|m| !g.contains(m)) {
        return Err(Error::NotInBuildingSet);
    }
    NestedContext::new(poset, g)?.is_nested(members)
}

/// The intersection of a nested set, which is a layer.
pub fn center(poset: &LayerPoset, members: &[Layer], g: &BuildingSet) -> Result<Layer> {
    Ok(NestedSet::new(poset, g, members.to_vec())?.center)
}

/// All maximal nested sets with center `p`, in canonical order.
pub fn enumerate_maximal(poset: &LayerPoset, p: &Layer, g: &BuildingSet) -> Result<Vec<NestedSet>> {
    NestedContext::new(poset, g)?.enumerate_maximal(p)
}

/// Maximal nested sets over all points, grouped by point in canonical order.
pub fn all_maximal(poset: &LayerPoset, g: &BuildingSet) -> Result<Vec<NestedSet>> {
    NestedContext::new(poset, g)?.all_maximal()
}

/// The largest member of `s` contained in `c`.
pub fn s_core(s: &NestedSet, c: &Layer) -> Result<Layer> {
    s.members_below(c)
        .into_iter()
        .map(|i| &s.members[i])
        .max_by_key(|m| m.dim())
        .cloned()
        .ok_or(Error::NoElementContained)
}

/// The largest member of `s` properly contained in the member `c`.
pub fn successor(s: &NestedSet, c: &Layer) -> Result<Layer> {
    successor_index(s, s.position(c).ok_or(Error::NotMember)?)
        .map(|i| s.members[i].clone())
}

pub(crate) fn successor_index(s: &NestedSet, i: usize) -> Result<usize> {
    let c = &s.members[i];
    s.members_below(c)
        .into_iter()
        .filter(|&j| j != i)
        .max_by_key(|&j| s.members[j].dim())
        .ok_or(Error::IsMinimal)
}
