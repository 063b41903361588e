//! Toric arrangements given by primitive characters with torsion constants,
//! their layers, the layer poset, and the local flat structure at each point.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{
    content, format_vector, pair_with, solve_torsion_system, IntVector, IntegerMatrix,
    Sublattice, TorsionSolution, TorsionValue,
};

/// A character `λ` together with the constant `a = e^{2πi r}`; the hypersurface
/// `{λ = a}` of the torus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightedCharacter {
    pub lambda: IntVector,
    pub constant: TorsionValue,
}

impl WeightedCharacter {
    pub fn new(lambda: IntVector, constant: TorsionValue) -> Self {
        Self { lambda, constant }
    }
}

impl fmt::Display for WeightedCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ; {}", format_vector(&self.lambda), self.constant)
    }
}

/// A connected component of an intersection of hypersurfaces, encoded by the
/// saturated lattice of characters constant on it and the values they take
/// (given on the Hermite basis rows of the lattice).
///
/// Equality, hashing and ordering ignore `support`, which is derived data.
#[derive(Clone, Debug)]
pub struct Layer {
    lattice: Sublattice,
    values: Vec<TorsionValue>,
    support: Vec<usize>,
}

impl Layer {
    pub fn lattice(&self) -> &Sublattice {
        &self.lattice
    }

    pub fn values(&self) -> &[TorsionValue] {
        &self.values
    }

    /// Indices of the arrangement characters whose hypersurface contains the layer.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn dim(&self) -> usize {
        self.lattice.ambient_rank() - self.lattice.rank()
    }

    pub fn codim(&self) -> usize {
        self.lattice.rank()
    }

    pub fn is_point(&self) -> bool {
        self.dim() == 0
    }

    /// Torsion coordinates of a point layer.
    pub fn torsion_coordinates(&self) -> Option<&[TorsionValue]> {
        self.is_point().then_some(&self.values[..])
    }

    /// Constant value of `mu` on the layer, if `mu` is constant there.
    pub fn value_of(&self, mu: &[BigInt]) -> Option<TorsionValue> {
        let coords = self.lattice.coordinates(mu)?;
        Some(pair_with(&coords, &self.values))
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Layer) -> bool {
        self.lattice.is_subset_of(&other.lattice)
            && self
                .lattice
                .basis_rows()
                .iter()
                .zip(&self.values)
                .all(|(row, v)| other.value_of(row).as_ref() == Some(v))
    }

    /// Some torsion point `φ` with `⟨μ, φ⟩ = χ(μ)` on the lattice; lies on the layer.
    pub fn representative(&self) -> Vec<TorsionValue> {
        if self.is_point() {
            return self.values.clone();
        }
        let n = self.lattice.ambient_rank();
        if self.lattice.rank() == 0 {
            return vec![TorsionValue::zero(); n];
        }
        solve_torsion_system(self.lattice.basis(), &self.values)
            .expect("dimensions agree")
            .representatives()
            .first()
            .cloned()
            .expect("a layer is nonempty")
    }

    fn cmp_lattice(&self, other: &Self) -> Ordering {
        let (a, b) = (self.lattice.basis(), other.lattice.basis());
        for i in 0..a.rows().min(b.rows()) {
            for j in 0..a.cols().min(b.cols()) {
                let (x, y) = (&a[(i, j)], &b[(i, j)]);
                let ord = x
                    .magnitude()
                    .cmp(y.magnitude())
                    .then_with(|| x.is_negative().cmp(&y.is_negative()));
                if ord != Ordering::Equal {
                    return ord;
                }
            }
        }
        (a.rows(), a.cols()).cmp(&(b.rows(), b.cols()))
    }
}

impl PartialEq for Layer {
    fn eq(&self, other: &Self) -> bool {
        self.lattice == other.lattice && self.values == other.values
    }
}

impl Eq for Layer {}

impl Hash for Layer {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.lattice.hash(state);
        self.values.hash(state);
    }
}

/// Canonical order: by dimension, then Hermite basis entries compared by
/// magnitude with positive before negative, then values.
impl Ord for Layer {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim()
            .cmp(&other.dim())
            .then_with(|| self.cmp_lattice(other))
            .then_with(|| self.values.cmp(&other.values))
    }
}

impl PartialOrd for Layer {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let values: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        let support: Vec<String> = self.support.iter().map(|i| i.to_string()).collect();
        write!(
            f,
            "({} ; [{}] ; dim {} ; {{{}}})",
            self.lattice,
            values.join(","),
            self.dim(),
            support.join(",")
        )
    }
}

/// A toric arrangement in a torus of rank `n`, normalized to primitive characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    rank: usize,
    characters: Vec<WeightedCharacter>,
}

impl Arrangement {
    /// Splits every non-primitive `(λ, r)` with `gcd(λ) = d` into the `d` pairs
    /// `(λ/d, (r + i)/d)`, merges duplicates, and checks finite index.
    pub fn normalize(rank: usize, raw: &[(IntVector, TorsionValue)]) -> Result<Self> {
        let mut characters = Vec::new();
        for (lambda, r) in raw {
            check_length(rank, lambda)?;
            let d = content(lambda);
            if d.is_zero() {
                return Err(Error::ZeroVector);
            }
            let reduced: IntVector = lambda.iter().map(|x| x / &d).collect();
            let mut i = BigInt::zero();
            while i < d {
                let shifted = (r.as_ratio() + BigRational::from_integer(i.clone()))
                    / BigRational::from_integer(d.clone());
                characters.push(WeightedCharacter::new(
                    reduced.clone(),
                    TorsionValue::from_ratio(shifted),
                ));
                i += 1;
            }
        }
        Self::assemble(rank, characters)
    }

    /// Accepts only primitive characters, reporting the first offender.
    pub fn from_primitive(rank: usize, raw: &[(IntVector, TorsionValue)]) -> Result<Self> {
        let mut characters = Vec::new();
        for (index, (lambda, r)) in raw.iter().enumerate() {
            check_length(rank, lambda)?;
            let d = content(lambda);
            if d.is_zero() {
                return Err(Error::ZeroVector);
            }
            if d != BigInt::from(1) {
                return Err(Error::NotPrimitive {
                    index,
                    vector: format_vector(lambda),
                    gcd: d.to_string(),
                });
            }
            characters.push(WeightedCharacter::new(lambda.clone(), r.clone()));
        }
        Self::assemble(rank, characters)
    }

    fn assemble(rank: usize, characters: Vec<WeightedCharacter>) -> Result<Self> {
        if characters.is_empty() || rank == 0 {
            return Err(Error::EmptyArrangement);
        }
        let mut seen = HashSet::new();
        let characters: Vec<WeightedCharacter> = characters
            .into_iter()
            .filter(|c| seen.insert(c.clone()))
            .collect();
        let lambdas: Vec<IntVector> = characters.iter().map(|c| c.lambda.clone()).collect();
        let span_rank = Sublattice::from_generators(rank, &lambdas)?.rank();
        if span_rank < rank {
            return Err(Error::InfiniteIndex { rank, span_rank });
        }
        Ok(Self { rank, characters })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn characters(&self) -> &[WeightedCharacter] {
        &self.characters
    }

    pub fn lambdas(&self, indices: &[usize]) -> Vec<IntVector> {
        indices
            .iter()
            .map(|&i| self.characters[i].lambda.clone())
            .collect()
    }

    fn check_indices(&self, indices: &[usize]) -> Result<()> {
        match indices.iter().find(|&&i| i >= self.characters.len()) {
            Some(&i) => Err(Error::IndexOutOfRange(i)),
            None => Ok(()),
        }
    }

    /// Characters whose hypersurface contains the layer `(lattice, values)`.
    fn support_of(&self, lattice: &Sublattice, values: &[TorsionValue]) -> Vec<usize> {
        self.characters
            .iter()
            .enumerate()
            .filter(|(_, c)| {
                lattice
                    .coordinates(&c.lambda)
                    .is_some_and(|coords| pair_with(&coords, values) == c.constant)
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Builds the layer with the given saturated lattice through the torsion point `phi`.
    pub(crate) fn layer_through(&self, lattice: Sublattice, phi: &[TorsionValue]) -> Layer {
        let values: Vec<TorsionValue> = lattice
            .basis_rows()
            .iter()
            .map(|row| pair_with(row, phi))
            .collect();
        let support = self.support_of(&lattice, &values);
        Layer {
            lattice,
            values,
            support,
        }
    }

    /// Connected components of `{t : μᵢ(t) = e^{2πi rᵢ}}`.
    pub(crate) fn components_of(
        &self,
        rows: &[IntVector],
        rhs: &[TorsionValue],
    ) -> Result<Vec<Layer>> {
        let m = IntegerMatrix::from_rows(self.rank, rows)?;
        let solution = solve_torsion_system(&m, rhs)?;
        let lattice = Sublattice::from_generators(self.rank, rows)?.saturate();
        let mut layers: Vec<Layer> = match solution {
            TorsionSolution::Inconsistent => Vec::new(),
            TorsionSolution::Consistent {
                representatives, ..
            } => representatives
                .iter()
                .map(|phi| self.layer_through(lattice.clone(), phi))
                .collect(),
        };
        layers.sort();
        layers.dedup();
        Ok(layers)
    }

    /// Connected components of the intersection of the selected hypersurfaces.
    pub fn layer_components(&self, subset: &[usize]) -> Result<Vec<Layer>> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        self.check_indices(subset)?;
        let rows = self.lambdas(subset);
        let rhs: Vec<TorsionValue> = subset
            .iter()
            .map(|&i| self.characters[i].constant.clone())
            .collect();
        self.components_of(&rows, &rhs)
    }

    /// Components of the intersection of several layers (empty if disjoint).
    pub fn intersect_layers(&self, layers: &[&Layer]) -> Result<Vec<Layer>> {
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for layer in layers {
            rows.extend(layer.lattice.basis_rows());
            rhs.extend(layer.values.iter().cloned());
        }
        if rows.is_empty() {
            return Err(Error::EmptySubset);
        }
        self.components_of(&rows, &rhs)
    }

    pub fn build_poset(&self) -> LayerPoset {
        LayerPoset::build(self.clone())
    }

    pub fn points(&self) -> Vec<Layer> {
        self.build_poset().points().into_iter().cloned().collect()
    }

    fn check_point(&self, p: &Layer) -> Result<()> {
        if !p.is_point() || p.lattice.ambient_rank() != self.rank {
            return Err(Error::NotAPoint);
        }
        let lambdas = self.lambdas(&p.support);
        let spanned = Sublattice::from_generators(self.rank, &lambdas)?;
        if spanned.rank() < self.rank {
            return Err(Error::NotAPoint);
        }
        Ok(())
    }

    /// Indices of the characters whose hypersurface passes through the point.
    pub fn localized(&self, p: &Layer) -> Result<Vec<usize>> {
        self.check_point(p)?;
        Ok(p.support.clone())
    }

    /// `⟨B⟩_ℚ ∩ within`, as indices.
    pub fn closure_in(&self, within: &[usize], subset: &[usize]) -> Vec<usize> {
        let span = Sublattice::from_generators(self.rank, &self.lambdas(subset))
            .expect("matching ranks")
            .saturate();
        within
            .iter()
            .copied()
            .filter(|&i| span.contains(&self.characters[i].lambda))
            .collect()
    }

    /// All flats of the localized character set at `p`, including `∅` and `X_p`,
    /// ordered by size and then lexicographically.
    pub fn complete_subsets(&self, p: &Layer) -> Result<Vec<Vec<usize>>> {
        let local = self.localized(p)?;
        let mut flats: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut queue = VecDeque::new();
        let bottom = self.closure_in(&local, &[]);
        flats.insert(bottom.clone());
        queue.push_back(bottom);
        while let Some(flat) = queue.pop_front() {
            for &e in &local {
                if flat.contains(&e) {
                    continue;
                }
                let mut grown = flat.clone();
                grown.push(e);
                let closed = self.closure_in(&local, &grown);
                if flats.insert(closed.clone()) {
                    queue.push_back(closed);
                }
            }
        }
        let mut out: Vec<Vec<usize>> = flats.into_iter().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(out)
    }

    /// The unique layer through `p` whose localized character set is `subset`.
    pub fn layer_from_complete_set(&self, p: &Layer, subset: &[usize]) -> Result<Layer> {
        let local = self.localized(p)?;
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.is_empty() || sorted.iter().any(|i| !local.contains(i)) {
            return Err(Error::NotComplete);
        }
        if self.closure_in(&local, &sorted) != sorted {
            return Err(Error::NotComplete);
        }
        let lattice = Sublattice::from_generators(self.rank, &self.lambdas(&sorted))?.saturate();
        Ok(self.layer_through(lattice, &p.values))
    }
}

fn check_length(rank: usize, lambda: &[BigInt]) -> Result<()> {
    if lambda.len() != rank {
        return Err(Error::DimensionMismatch {
            expected: rank,
            found: lambda.len(),
        });
    }
    Ok(())
}

/// All layers of an arrangement ordered by inclusion. The ambient torus is not a layer.
#[derive(Clone, Debug)]
pub struct LayerPoset {
    arrangement: Arrangement,
    layers: Vec<Layer>,
    /// `contained[i][j]` iff `layers[i] ⊊ layers[j]`.
    contained: Vec<Vec<bool>>,
    points: Vec<usize>,
}

impl LayerPoset {
    /// Closes the set of hypersurface components under intersection with further
    /// hypersurfaces; this reaches every component of every intersection.
    pub fn build(arrangement: Arrangement) -> Self {
        let mut found: HashSet<Layer> = HashSet::new();
        let mut queue = VecDeque::new();
        for i in 0..arrangement.characters.len() {
            for layer in arrangement.layer_components(&[i]).expect("valid index") {
                if found.insert(layer.clone()) {
                    queue.push_back(layer);
                }
            }
        }
        while let Some(layer) = queue.pop_front() {
            if layer.is_point() {
                continue;
            }
            for (i, c) in arrangement.characters.iter().enumerate() {
                if layer.support.contains(&i) {
                    continue;
                }
                let mut rows = layer.lattice.basis_rows();
                rows.push(c.lambda.clone());
                let mut rhs = layer.values.clone();
                rhs.push(c.constant.clone());
                for next in arrangement.components_of(&rows, &rhs).expect("valid rows") {
                    if found.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
        let mut layers: Vec<Layer> = found.into_iter().collect();
        layers.sort();
        let contained: Vec<Vec<bool>> = layers
            .iter()
            .enumerate()
            .map(|(i, small)| {
                layers
                    .iter()
                    .enumerate()
                    .map(|(j, big)| i != j && big.contains(small))
                    .collect()
            })
            .collect();
        let points = (0..layers.len())
            .filter(|&i| layers[i].is_point())
            .collect();
        Self {
            arrangement,
            layers,
            contained,
            points,
        }
    }

    pub fn arrangement(&self) -> &Arrangement {
        &self.arrangement
    }

    pub fn rank(&self) -> usize {
        self.arrangement.rank
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn index_of(&self, layer: &Layer) -> Option<usize> {
        self.layers.binary_search(layer).ok()
    }

    pub fn layer(&self, index: usize) -> &Layer {
        &self.layers[index]
    }

    /// `layers[i] ⊊ layers[j]`.
    pub fn is_below(&self, i: usize, j: usize) -> bool {
        self.contained[i][j]
    }

    /// Points in canonical (lexicographic torsion coordinate) order.
    pub fn points(&self) -> Vec<&Layer> {
        self.points.iter().map(|&i| &self.layers[i]).collect()
    }

    pub fn point_indices(&self) -> &[usize] {
        &self.points
    }

    /// Indices of the layers containing `layer` (including itself).
    pub fn layers_containing(&self, layer: &Layer) -> Vec<usize> {
        (0..self.layers.len())
            .filter(|&j| self.layers[j].contains(layer))
            .collect()
    }

    /// Covering relations `(i, j)` with `layers[i] ⋖ layers[j]`.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let n = self.layers.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.contained[i][j]
                    && !(0..n).any(|k| self.contained[i][k] && self.contained[k][j])
                {
                    edges.push((i, j));
                }
            }
        }
        edges
    }
}
