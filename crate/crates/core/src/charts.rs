//! Chart atlas of the wonderful model: adapted bases, coordinate maps, the
//! functions `p_λ`, chart membership, transitions, curve limits and divisor
//! intersections.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arrangement::{Layer, LayerPoset, WeightedCharacter};
use crate::decomposition::{factors, BuildingSet};
use crate::error::{Error, Result};
use crate::lattice::{
    complete_to_basis, IntVector, IntegerMatrix, Sublattice, TorsionValue,
};
use crate::nested::{all_maximal, is_nested, successor_index, NestedSet};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Integer vectors `λ_C` indexed like the members of a maximal nested set,
/// with their constant values `a_C` at the center.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedBasis {
    vectors: Vec<IntVector>,
    constants: Vec<TorsionValue>,
}

impl AdaptedBasis {
    /// Constants are the values of the vectors at the center of `s`.
    pub fn new(s: &NestedSet, vectors: Vec<IntVector>) -> Result<Self> {
        let constants = vectors
            .iter()
            .map(|v| s.center().value_of(v).ok_or(Error::NotAdapted))
            .collect::<Result<_>>()?;
        let basis = Self { vectors, constants };
        if basis.is_adapted_to(s) {
            Ok(basis)
        } else {
            Err(Error::NotAdapted)
        }
    }

    pub fn vectors(&self) -> &[IntVector] {
        &self.vectors
    }

    pub fn constants(&self) -> &[TorsionValue] {
        &self.constants
    }

    pub fn matrix(&self) -> IntegerMatrix {
        let n = self.vectors.first().map_or(0, Vec::len);
        IntegerMatrix::from_rows(n, &self.vectors).expect("vectors share a length")
    }

    /// For every member `C`, `{λ_D : D ⊇ C}` is a basis of the lattice of `C`,
    /// and the whole matrix is unimodular.
    pub fn is_adapted_to(&self, s: &NestedSet) -> bool {
        if self.vectors.len() != s.len()
            || self.vectors.iter().any(|v| v.len() != s.center().lattice().ambient_rank())
            || !self.matrix().is_unimodular()
        {
            return false;
        }
        s.members().iter().all(|c| {
            let rows: Vec<IntVector> = (0..s.len())
                .filter(|&d| s.members()[d].contains(c))
                .map(|d| self.vectors[d].clone())
                .collect();
            rows.len() == c.codim()
                && Sublattice::from_generators(c.lattice().ambient_rank(), &rows).ok().as_ref()
                    == Some(c.lattice())
        })
    }
}

fn unit(n: usize, j: usize) -> IntVector {
    (0..n)
        .map(|i| if i == j { BigInt::one() } else { BigInt::zero() })
        .collect()
}

/// Builds an adapted basis member by member, from the largest layers down: each
/// member's lattice is completed from the vectors already given to the members
/// above it. Standard unit vectors are preferred as completions when they work.
pub fn adapted_basis(s: &NestedSet) -> Result<AdaptedBasis> {
    if !s.is_maximal() {
        return Err(Error::NotMaximal);
    }
    let members = s.members();
    let n = s.center().lattice().ambient_rank();
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(members[i].dim()));
    let mut vectors: Vec<Option<IntVector>> = vec![None; members.len()];
    for &i in &order {
        let c = &members[i];
        let lattice = c.lattice();
        let k = lattice.rank();
        let above: Vec<IntVector> = (0..members.len())
            .filter(|&d| d != i && members[d].contains(c))
            .map(|d| vectors[d].clone().expect("larger members come first"))
            .collect();
        if above.len() + 1 != k {
            return Err(Error::NotMaximal);
        }
        let coords: Vec<IntVector> = above
            .iter()
            .map(|v| lattice.coordinates(v).ok_or(Error::NotContained))
            .collect::<Result<_>>()?;
        let completes = |w: &IntVector| {
            let mut rows = coords.clone();
            rows.push(w.clone());
            IntegerMatrix::from_rows(k, &rows).is_ok_and(|m| m.is_unimodular())
        };
        let from_units = (0..n)
            .map(|j| unit(n, j))
            .find_map(|e| lattice.coordinates(&e).filter(|w| completes(w)));
        let w = match from_units {
            Some(w) => w,
            None => {
                let sub = Sublattice::from_generators(k, &coords)?;
                let full = complete_to_basis(&sub)?;
                full.row(k - 1).to_vec()
            }
        };
        debug_assert!(completes(&w));
        let lambda = lattice.basis().left_apply(&w);
        vectors[i] = Some(lambda);
    }
    let vectors: Vec<IntVector> = vectors.into_iter().map(|v| v.expect("assigned")).collect();
    let constants = vectors
        .iter()
        .map(|v| s.center().value_of(v).expect("point lattice is full"))
        .collect();
    Ok(AdaptedBasis { vectors, constants })
}

fn p_s_position(s: &NestedSet, lambda: &[BigInt]) -> Result<usize> {
    if lambda.iter().all(Zero::is_zero) {
        return Err(Error::ZeroVector);
    }
    let members = s.members();
    let candidates: Vec<usize> = (0..members.len())
        .filter(|&i| members[i].lattice().contains(lambda))
        .collect();
    let top = candidates
        .iter()
        .copied()
        .max_by_key(|&i| members[i].dim())
        .ok_or(Error::NoConstantLayer)?;
    if candidates.iter().all(|&j| members[top].contains(&members[j])) {
        Ok(top)
    } else {
        Err(Error::NoConstantLayer)
    }
}

/// `λ(t) = ∏ t_j^{λ_j}`.
pub fn eval_character(lambda: &[BigInt], t: &[Complex64]) -> Complex64 {
    lambda
        .iter()
        .zip(t)
        .fold(Complex64::new(1.0, 0.0), |acc, (e, x)| acc * x.powi(to_exponent(e)))
}

fn to_exponent(e: &BigInt) -> i32 {
    e.to_i32().expect("exponent fits in i32")
}

fn near_zero(x: Complex64, scale: f64, tol: f64) -> bool {
    x.norm() <= tol * (1.0 + scale)
}

/// `(x^m − c^m)/(x − c)` as a Laurent polynomial in `x`.
fn difference_quotient(x: Complex64, c: Complex64, m: i32) -> Complex64 {
    let geometric = |m: i32| -> Complex64 {
        (0..m).fold(Complex64::zero(), |acc, j| acc + x.powi(m - 1 - j) * c.powi(j))
    };
    match m.cmp(&0) {
        std::cmp::Ordering::Equal => Complex64::zero(),
        std::cmp::Ordering::Greater => geometric(m),
        std::cmp::Ordering::Less => -(x.powi(m) * c.powi(m)) * geometric(-m),
    }
}

/// A chart `V_S` attached to a maximal nested set.
#[derive(Clone, Debug)]
pub struct Chart {
    nested: NestedSet,
    basis: AdaptedBasis,
    inverse: Vec<Vec<i32>>,
    below: Vec<Vec<usize>>,
    successor: Vec<Option<usize>>,
    a: Vec<Complex64>,
    local: Vec<WeightedCharacter>,
    avoid: Vec<Layer>,
    tolerance: f64,
}

impl Chart {
    pub fn new(poset: &LayerPoset, s: NestedSet) -> Result<Self> {
        let basis = adapted_basis(&s)?;
        Self::with_basis(poset, s, basis)
    }

    /// A chart built on a given adapted basis.
    pub fn with_basis(poset: &LayerPoset, s: NestedSet, basis: AdaptedBasis) -> Result<Self> {
        if !s.is_maximal() {
            return Err(Error::NotMaximal);
        }
        if !basis.is_adapted_to(&s) {
            return Err(Error::NotAdapted);
        }
        let inverse = basis
            .matrix()
            .inverse_unimodular()
            .expect("adapted basis is unimodular");
        let n = s.len();
        let inverse = (0..n)
            .map(|j| (0..n).map(|c| to_exponent(&inverse[(j, c)])).collect())
            .collect();
        let members = s.members();
        let below = members.iter().map(|c| s.members_below(c)).collect();
        let successor = (0..n).map(|i| successor_index(&s, i).ok()).collect();
        let a = basis.constants.iter().map(TorsionValue::to_unit_complex).collect();
        let p = s.center();
        let arr = poset.arrangement();
        let local = arr
            .localized(p)?
            .into_iter()
            .map(|i| arr.characters()[i].clone())
            .collect();
        let avoid = poset.layers().iter().filter(|l| !l.contains(p)).cloned().collect();
        Ok(Self {
            nested: s,
            basis,
            inverse,
            below,
            successor,
            a,
            local,
            avoid,
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn nested_set(&self) -> &NestedSet {
        &self.nested
    }

    pub fn basis(&self) -> &AdaptedBasis {
        &self.basis
    }

    pub fn center(&self) -> &Layer {
        self.nested.center()
    }

    pub fn dim(&self) -> usize {
        self.nested.len()
    }

    /// Characters of the arrangement through the center.
    pub fn local_characters(&self) -> &[WeightedCharacter] {
        &self.local
    }

    /// Indices of the members contained in member `i`.
    pub fn members_below(&self, i: usize) -> &[usize] {
        &self.below[i]
    }

    pub fn successor(&self, i: usize) -> Option<usize> {
        self.successor[i]
    }

    fn check_len(&self, z: &[Complex64]) -> Result<()> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: z.len(),
            });
        }
        Ok(())
    }

    fn monomial(&self, i: usize, z: &[Complex64]) -> Complex64 {
        self.below[i].iter().map(|&e| z[e]).product()
    }

    /// `x_C = ∏_{E⊆C} z_E + a_C`, failing outside the domain.
    fn basis_values(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(z)?;
        (0..self.dim())
            .map(|i| {
                let x = self.monomial(i, z) + self.a[i];
                if near_zero(x, 0.0, self.tolerance) {
                    Err(Error::OutsideDomain)
                } else {
                    Ok(x)
                }
            })
            .collect()
    }

    /// The maximal member on whose lattice `λ` lies, as an index.
    pub fn p_s_index(&self, lambda: &[BigInt]) -> Result<usize> {
        p_s_position(&self.nested, lambda)
    }

    pub fn p_s_map(&self, lambda: &[BigInt]) -> Result<Layer> {
        self.p_s_index(lambda).map(|i| self.nested.members()[i].clone())
    }

    /// `f_S`: chart coordinates to a torus point in standard coordinates.
    pub fn chart_to_torus(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let x = self.basis_values(z)?;
        Ok(self
            .inverse
            .iter()
            .map(|row| row.iter().zip(&x).map(|(&e, xc)| xc.powi(e)).product())
            .collect())
    }

    /// The inverse of `f_S` off the divisor.
    pub fn torus_to_chart(&self, t: &[Complex64]) -> Result<Vec<Complex64>> {
        if t.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: t.len(),
            });
        }
        if t.iter().any(|x| x.norm() == 0.0) {
            return Err(Error::OutsideDomain);
        }
        let values: Vec<Complex64> = self
            .basis
            .vectors
            .iter()
            .map(|v| eval_character(v, t))
            .collect();
        let d: Vec<Complex64> = values.iter().zip(&self.a).map(|(x, a)| x - a).collect();
        (0..self.dim())
            .map(|i| match self.successor[i] {
                None => Ok(d[i]),
                Some(s) => {
                    if near_zero(d[s], values[s].norm(), self.tolerance) {
                        Err(Error::OnDivisor)
                    } else {
                        Ok(d[i] / d[s])
                    }
                }
            })
            .collect()
    }

    /// Exponents of `λ` in the adapted basis.
    fn basis_coordinates(&self, lambda: &[BigInt]) -> Vec<i32> {
        let n = self.dim();
        (0..n)
            .map(|c| {
                let m: BigInt = (0..n)
                    .map(|j| &lambda[j] * BigInt::from(self.inverse[j][c]))
                    .sum();
                to_exponent(&m)
            })
            .collect()
    }

    fn is_local(&self, lambda: &[BigInt], constant: &TorsionValue) -> bool {
        self.center().value_of(lambda).as_ref() == Some(constant)
    }

    /// `p_λ` at `z`, for a character through the center.
    pub fn p_lambda_eval(&self, character: &WeightedCharacter, z: &[Complex64]) -> Result<Complex64> {
        self.p_lambda(&character.lambda, &character.constant, z)
    }

    fn p_lambda(&self, lambda: &[BigInt], constant: &TorsionValue, z: &[Complex64]) -> Result<Complex64> {
        if !self.is_local(lambda, constant) {
            return Err(Error::NoConstantLayer);
        }
        let x = self.basis_values(z)?;
        let c = self.p_s_index(lambda)?;
        let m = self.basis_coordinates(lambda);
        let mut order = vec![c];
        order.extend((0..self.dim()).filter(|&d| d != c && m[d] != 0));
        let mut sum = Complex64::zero();
        for (pos, &k) in order.iter().enumerate() {
            if m[k] == 0 {
                continue;
            }
            let before: Complex64 = order[..pos].iter().map(|&j| self.a[j].powi(m[j])).product();
            let after: Complex64 = order[pos + 1..].iter().map(|&j| x[j].powi(m[j])).product();
            let extra: Complex64 = self.below[k]
                .iter()
                .filter(|e| !self.below[c].contains(e))
                .map(|&e| z[e])
                .product();
            sum += before * difference_quotient(x[k], self.a[k], m[k]) * after * extra;
        }
        Ok(sum)
    }

    /// `λ − a` at `z` as a monomial in the coordinates times a value that is
    /// nonzero near the center.
    fn factored(
        &self,
        lambda: &[BigInt],
        constant: &TorsionValue,
        z: &[Complex64],
    ) -> Result<(Vec<i32>, Complex64)> {
        let mut exps = vec![0; self.dim()];
        if self.is_local(lambda, constant) {
            if let Ok(c) = self.p_s_index(lambda) {
                for &e in &self.below[c] {
                    exps[e] = 1;
                }
                return Ok((exps, self.p_lambda(lambda, constant, z)?));
            }
        }
        let t = self.chart_to_torus(z)?;
        Ok((exps, eval_character(lambda, &t) - constant.to_unit_complex()))
    }

    fn evaluate_monomial(&self, exps: &[i32], value: Complex64, z: &[Complex64]) -> Result<Complex64> {
        let mut out = value;
        for (e, zc) in exps.iter().zip(z) {
            if *e < 0 && near_zero(*zc, 0.0, self.tolerance) {
                return Err(Error::NotInOverlap);
            }
            out *= zc.powi(*e);
        }
        Ok(out)
    }

    /// Membership in `V_S`.
    pub fn in_chart(&self, z: &[Complex64]) -> bool {
        let Ok(t) = self.chart_to_torus(z) else {
            return false;
        };
        if self.avoid.iter().any(|l| on_layer(l, &t, self.tolerance)) {
            return false;
        }
        self.local.iter().all(|ch| {
            self.p_lambda_eval(ch, z)
                .is_ok_and(|v| v.norm() > self.tolerance)
        })
    }

    /// `λ(f_S(z)) − a` through the factorization, as used by the residual check.
    pub fn factored_difference(&self, character: &WeightedCharacter, z: &[Complex64]) -> Result<Complex64> {
        let (exps, value) = self.factored(&character.lambda, &character.constant, z)?;
        self.evaluate_monomial(&exps, value, z)
    }
}

/// Numeric membership of a torus point in a layer.
pub fn on_layer(layer: &Layer, t: &[Complex64], tolerance: f64) -> bool {
    layer
        .lattice()
        .basis_rows()
        .iter()
        .zip(layer.values())
        .all(|(mu, v)| {
            let x = eval_character(mu, t);
            near_zero(x - v.to_unit_complex(), x.norm(), tolerance)
        })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TransitionClause {
    /// Member of the source chart only: its coordinate is a unit on the overlap.
    SourceOnly,
    /// Member of both charts: the ratio of the two coordinates is a unit.
    Shared,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransitionEntry {
    pub member: usize,
    pub clause: TransitionClause,
    pub magnitude: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransitionReport {
    pub entries: Vec<TransitionEntry>,
}

/// The coordinates in `q` of the model point with coordinates `z` in `s`.
/// Coordinates are taken as monomial-times-unit expressions in `z`, so points
/// on the divisor are handled through their limits.
pub fn transition(s: &Chart, q: &Chart, z: &[Complex64]) -> Result<(Vec<Complex64>, TransitionReport)> {
    if !s.in_chart(z) {
        return Err(Error::NotInOverlap);
    }
    let n = q.dim();
    let mut factored: Vec<(Vec<i32>, Complex64)> = Vec::with_capacity(n);
    for c in 0..n {
        let (mut exps, mut value) = s.factored(&q.basis.vectors[c], &q.basis.constants[c], z)?;
        if let Some(d) = q.successor[c] {
            let (den_exps, den_value) = s.factored(&q.basis.vectors[d], &q.basis.constants[d], z)?;
            if near_zero(den_value, 0.0, s.tolerance) {
                return Err(Error::NotInOverlap);
            }
            for (e, f) in exps.iter_mut().zip(den_exps) {
                *e -= f;
            }
            value /= den_value;
        }
        factored.push((exps, value));
    }
    let image: Vec<Complex64> = factored
        .iter()
        .map(|(e, v)| s.evaluate_monomial(e, *v, z))
        .collect::<Result<_>>()?;
    if !q.in_chart(&image) {
        return Err(Error::NotInOverlap);
    }
    let mut entries = Vec::new();
    for (i, member) in s.nested.members().iter().enumerate() {
        let entry = match q.nested.position(member) {
            None => TransitionEntry {
                member: i,
                clause: TransitionClause::SourceOnly,
                magnitude: z[i].norm(),
            },
            Some(j) => {
                let (exps, value) = &factored[j];
                let mut ratio_exps: Vec<i32> = exps.iter().map(|e| -e).collect();
                ratio_exps[i] += 1;
                let ratio = s.evaluate_monomial(&ratio_exps, value.inv(), z)?;
                TransitionEntry {
                    member: i,
                    clause: TransitionClause::Shared,
                    magnitude: ratio.norm(),
                }
            }
        };
        entries.push(entry);
    }
    Ok((image, TransitionReport { entries }))
}

/// A curve `s ↦ exp(2πi(φ_p + Σ s^j v_j))` through a point of the arrangement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveGerm {
    point: Layer,
    jets: Vec<Vec<BigRational>>,
}

impl CurveGerm {
    pub fn new(point: Layer, jets: Vec<Vec<BigRational>>) -> Result<Self> {
        if !point.is_point() {
            return Err(Error::NotAPoint);
        }
        if jets.is_empty() {
            return Err(Error::InvalidGerm("no jet vectors".into()));
        }
        let n = point.lattice().ambient_rank();
        if let Some(v) = jets.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
        Ok(Self { point, jets })
    }

    pub fn point(&self) -> &Layer {
        &self.point
    }

    pub fn jets(&self) -> &[Vec<BigRational>] {
        &self.jets
    }

    /// `(n_λ, ⟨λ, v_{n_λ}⟩)`, or `None` if `λ` is constant along the curve.
    pub fn order(&self, lambda: &[BigInt]) -> Option<(usize, BigRational)> {
        self.jets.iter().enumerate().find_map(|(j, v)| {
            let c: BigRational = lambda
                .iter()
                .zip(v)
                .map(|(l, x)| BigRational::from_integer(l.clone()) * x)
                .sum();
            (!c.is_zero()).then_some((j + 1, c))
        })
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("finite ratio")
}

/// The default adapted basis, with each `λ_C` shifted by small multiples of
/// the vectors of larger members until its order along the germ equals the
/// order of the local characters sent to `C`. A unit-vector completion can be
/// constant along the curve, and then the chart misses it.
fn curve_basis(poset: &LayerPoset, s: &NestedSet, germ: &CurveGerm) -> Result<AdaptedBasis> {
    let default = adapted_basis(s)?;
    let arr = poset.arrangement();
    let members = s.members();
    let mut target: Vec<Option<usize>> = vec![None; members.len()];
    for i in arr.localized(s.center())? {
        let lambda = &arr.characters()[i].lambda;
        if let (Ok(c), Some((n, _))) = (p_s_position(s, lambda), germ.order(lambda)) {
            target[c] = Some(target[c].map_or(n, |m: usize| m.min(n)));
        }
    }
    let order_of = |v: &IntVector| germ.order(v).map(|(n, _)| n);
    if (0..members.len()).all(|i| target[i].is_none() || order_of(&default.vectors[i]) == target[i]) {
        return Ok(default);
    }
    let mut by_dim: Vec<usize> = (0..members.len()).collect();
    by_dim.sort_by_key(|&i| std::cmp::Reverse(members[i].dim()));
    let mut vectors = default.vectors.clone();
    for &i in &by_dim {
        if target[i].is_none() || order_of(&vectors[i]) == target[i] {
            continue;
        }
        let above: Vec<usize> = (0..members.len())
            .filter(|&d| d != i && members[d].contains(&members[i]))
            .collect();
        let steps = [0i64, 1, -1, 2, -2];
        let combos = steps.len().pow(above.len() as u32);
        let found = (1..combos).find_map(|mut code| {
            let mut v = vectors[i].clone();
            for &d in &above {
                let k = BigInt::from(steps[code % steps.len()]);
                code /= steps.len();
                for (x, y) in v.iter_mut().zip(&vectors[d]) {
                    *x += &k * y;
                }
            }
            (order_of(&v) == target[i]).then_some(v)
        });
        match found {
            Some(v) => vectors[i] = v,
            None => {
                return Err(Error::LiftFailed(format!(
                    "no basis vector of member {i} has the order of its characters"
                )))
            }
        }
    }
    AdaptedBasis::new(s, vectors)
}

/// A maximal nested set whose chart contains the limit of the curve, and the
/// chart coordinates of that limit.
pub fn chart_for_curve(
    poset: &LayerPoset,
    g: &BuildingSet,
    germ: &CurveGerm,
) -> Result<(Chart, Vec<Complex64>)> {
    let p = germ.point();
    if poset.index_of(p).is_none() {
        return Err(Error::NotAPoint);
    }
    let arr = poset.arrangement();
    let local = arr.localized(p)?;
    let mut orders = Vec::with_capacity(local.len());
    for &i in &local {
        let ch = &arr.characters()[i];
        match germ.order(&ch.lambda) {
            Some((n, _)) => orders.push(n),
            None => {
                return Err(Error::InvalidGerm(format!(
                    "the curve stays on the hypersurface of {ch}"
                )))
            }
        }
    }
    let top = orders.iter().copied().max().unwrap_or(0);
    let mut flag_factors: Vec<Layer> = Vec::new();
    for h in 1..=top {
        let level: Vec<usize> = local
            .iter()
            .zip(&orders)
            .filter(|(_, &n)| n >= h)
            .map(|(&i, _)| i)
            .collect();
        let closed = arr.closure_in(&local, &level);
        let layer = arr.layer_from_complete_set(p, &closed)?;
        for f in factors(poset, &layer, g)? {
            if !flag_factors.contains(&f) {
                flag_factors.push(f);
            }
        }
    }
    let lift_failed = |why: &str| Error::LiftFailed(why.to_string());
    if is_nested(poset, &flag_factors, g)?.is_none() {
        return Err(lift_failed("flag factors are not nested"));
    }
    let mut members = flag_factors;
    for c in g.members().iter().filter(|c| c.contains(p)) {
        if members.contains(c) {
            continue;
        }
        let mut trial = members.clone();
        trial.push(c.clone());
        if is_nested(poset, &trial, g)?.is_some() {
            members = trial;
        }
    }
    let s = NestedSet::new(poset, g, members)?;
    if !s.is_maximal() || s.center() != p {
        return Err(lift_failed("completion is not maximal at the point"));
    }
    let basis = curve_basis(poset, &s, germ)?;
    let chart = Chart::with_basis(poset, s, basis)?;
    let basis = chart.basis();
    let leading = |i: usize| -> Option<(usize, Complex64)> {
        germ.order(&basis.vectors[i])
            .map(|(n, c)| (n, chart.a[i] * ratio_to_f64(&c)))
    };
    let mut z = Vec::with_capacity(chart.dim());
    for i in 0..chart.dim() {
        let value = match chart.successor[i] {
            None => Complex64::zero(),
            Some(d) => match (leading(i), leading(d)) {
                (_, None) => return Err(lift_failed("successor coordinate is constant")),
                (None, Some(_)) => Complex64::zero(),
                (Some((nc, cc)), Some((nd, cd))) => match nc.cmp(&nd) {
                    std::cmp::Ordering::Greater => Complex64::zero(),
                    std::cmp::Ordering::Equal => cc / cd,
                    std::cmp::Ordering::Less => {
                        return Err(lift_failed("coordinate diverges along the curve"))
                    }
                },
            },
        };
        z.push(value);
    }
    if !chart.in_chart(&z) {
        return Err(lift_failed("limit is outside the chart"));
    }
    Ok((chart, z))
}

/// Dimension of the intersection of the boundary divisors of `n`, or `None`
/// when it is empty.
pub fn divisor_dim(poset: &LayerPoset, g: &BuildingSet, n: &[Layer]) -> Result<Option<usize>> {
    if n.iter().any(|c| !g.contains(c)) {
        return Err(Error::NotInBuildingSet);
    }
    let mut distinct = n.to_vec();
    distinct.sort();
    distinct.dedup();
    Ok(is_nested(poset, &distinct, g)?.map(|_| poset.rank() - distinct.len()))
}

/// Charts for every maximal nested set, grouped by center.
pub fn atlas(poset: &LayerPoset, g: &BuildingSet) -> Result<Vec<Chart>> {
    all_maximal(poset, g)?
        .into_iter()
        .map(|s| Chart::new(poset, s))
        .collect()
}
