//! One test per acceptance criterion. Each prints a single
//! `criterion N: PASS|FAIL (...)` line before asserting.

mod common;

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::time::Instant;

use common::*;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toric_wonderful::arrangement::{Arrangement, Layer, LayerPoset};
use toric_wonderful::charts::{adapted_basis, atlas, chart_for_curve, divisor_dim, Chart, CurveGerm};
use toric_wonderful::decomposition::{
    finest_integral_decomposition, irreducible_layers, is_c_irreducible, is_z_irreducible, BuildingSet,
};
use toric_wonderful::fixtures;
use toric_wonderful::lattice::{ivec, lattice_index, IntVector, LatticeIndex, Sublattice, TorsionValue};
use toric_wonderful::nested::NestedContext;
use toric_wonderful::verify::{covering_chart, in_complement, sample_near, sample_torus, verify_atlas, VerifyOptions};
use toric_wonderful::Error;

const TOL: f64 = 1e-9;

fn verdict(n: usize, ok: bool, details: String) {
    println!("criterion {n}: {} ({details})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {details}");
}

fn reference() -> Vec<(&'static str, LayerPoset, BuildingSet)> {
    [("diagonals", fixtures::diagonals()), ("squares", fixtures::squares())]
        .into_iter()
        .map(|(name, arr)| {
            let poset = arr.build_poset();
            let g = irreducible_layers(&poset);
            (name, poset, g)
        })
        .collect()
}

fn lambda_set(arr: &Arrangement, indices: &[usize]) -> BTreeSet<IntVector> {
    indices.iter().map(|&i| arr.characters()[i].lambda.clone()).collect()
}

#[test]
fn criterion_1_squares_reproduction() {
    let start = Instant::now();
    let zero = tv(0, 1);
    let raw = [
        (ivec(&[2, 0]), zero.clone()),
        (ivec(&[0, 2]), zero.clone()),
        (ivec(&[1, 1]), zero.clone()),
        (ivec(&[1, -1]), zero.clone()),
    ];
    let arr = Arrangement::normalize(2, &raw).unwrap();
    let got: BTreeSet<(IntVector, TorsionValue)> = arr
        .characters()
        .iter()
        .map(|c| (c.lambda.clone(), c.constant.clone()))
        .collect();
    let expected: BTreeSet<(IntVector, TorsionValue)> = [
        (ivec(&[1, 0]), tv(0, 1)),
        (ivec(&[1, 0]), tv(1, 2)),
        (ivec(&[0, 1]), tv(0, 1)),
        (ivec(&[0, 1]), tv(1, 2)),
        (ivec(&[1, 1]), tv(0, 1)),
        (ivec(&[1, -1]), tv(0, 1)),
    ]
    .into_iter()
    .collect();
    let chars_ok = arr.characters().len() == 6 && got == expected;

    let poset = arr.build_poset();
    let coords: Vec<Vec<TorsionValue>> = poset
        .points()
        .iter()
        .map(|p| p.torsion_coordinates().unwrap().to_vec())
        .collect();
    let expected_points = vec![
        vec![tv(0, 1), tv(0, 1)],
        vec![tv(0, 1), tv(1, 2)],
        vec![tv(1, 2), tv(0, 1)],
        vec![tv(1, 2), tv(1, 2)],
    ];
    let points_ok = coords == expected_points;

    let local = |c: &[TorsionValue]| arr.localized(&point(&poset, c)).unwrap();
    let x1 = local(&[tv(0, 1), tv(0, 1)]);
    let x2 = local(&[tv(1, 2), tv(1, 2)]);
    let x3 = local(&[tv(0, 1), tv(1, 2)]);
    let x4 = local(&[tv(1, 2), tv(0, 1)]);
    let (l1, l2, l3, l4) = (lambda_set(&arr, &x1), lambda_set(&arr, &x2), lambda_set(&arr, &x3), lambda_set(&arr, &x4));
    let all: BTreeSet<IntVector> = raw.iter().map(|(v, _)| v.clone()).collect();
    let axes: BTreeSet<IntVector> = [ivec(&[1, 0]), ivec(&[0, 1])].into_iter().collect();
    let local_ok = x1.len() == 4
        && x2.len() == 4
        && x3.len() == 2
        && x4.len() == 2
        && l1 == l2
        && l3 == l4
        && l3.is_subset(&l1)
        && l3 != l1
        && l3 == axes
        && l1.len() == all.len();
    let secs = start.elapsed().as_secs_f64();
    verdict(
        1,
        chars_ok && points_ok && local_ok && secs < 1.0,
        format!(
            "{} characters, {} points, |X_p1|={} |X_p2|={} |X_p3|={} |X_p4|={}, {secs:.3} s",
            arr.characters().len(),
            coords.len(),
            x1.len(),
            x2.len(),
            x3.len(),
            x4.len()
        ),
    );
}

#[test]
fn criterion_2_diagonals_reproduction() {
    let start = Instant::now();
    let arr = fixtures::diagonals();
    let vectors = arr.lambdas(&[0, 1]);
    let z_irr = is_z_irreducible(&vectors);
    let c_irr = is_c_irreducible(&vectors);
    let span = Sublattice::from_generators(2, &vectors).unwrap();
    let index = lattice_index(&span, &Sublattice::full(2)).unwrap();
    let components = arr.layer_components(&[0, 1]).unwrap().len();

    let poset = arr.build_poset();
    let g = irreducible_layers(&poset);
    let mut nonempty = 0;
    let mut pairs_ok = true;
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            let (a, b) = (&g.members()[i], &g.members()[j]);
            let dim = divisor_dim(&poset, &g, &[a.clone(), b.clone()]).unwrap();
            let mixed = a.is_point() != b.is_point();
            match dim {
                Some(d) => {
                    nonempty += 1;
                    pairs_ok &= mixed && d == 0;
                }
                None => pairs_ok &= !mixed,
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = z_irr
        && !c_irr
        && index == LatticeIndex::Finite(2.into())
        && components == 2
        && g.len() == 4
        && nonempty == 4
        && pairs_ok
        && secs < 1.0;
    verdict(
        2,
        ok,
        format!(
            "Z-irreducible {z_irr}, C-irreducible {c_irr}, index {index}, {components} components, |I|={}, {nonempty} nonempty pairs, {secs:.3} s",
            g.len()
        ),
    );
}

#[test]
fn criterion_3_decomposition_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0;
    let mut non_unique = 0;
    for _ in 0..200 {
        let v = random_vectors(&mut rng, 3, 6, 2);
        let (finest, valid) = oracle_decompositions(&v);
        if finest.len() != 1 {
            non_unique += 1;
            continue;
        }
        let ours = finest_integral_decomposition(&v);
        if ours != finest[0] || !valid.iter().all(|p| ours.refines(p)) {
            mismatches += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        3,
        mismatches == 0 && non_unique == 0 && secs < 60.0,
        format!("200 sets, {mismatches} mismatches, {non_unique} non-unique, {secs:.2} s"),
    );
}

#[test]
fn criterion_4_nestedness_oracle() {
    let start = Instant::now();
    let mut subsets = 0usize;
    let mut disagreements = Vec::new();
    let all = instances(2024, 20);
    for inst in &all {
        let nested = oracle_nested_subsets(&flag_factor_sets(&inst.poset, &inst.g), 4);
        let ctx = NestedContext::new(&inst.poset, &inst.g).unwrap();
        for subset in small_subsets(inst.g.len(), 4) {
            subsets += 1;
            if ctx.is_nested_indices(&subset) != nested.contains(&subset) {
                disagreements.push(format!("{} {subset:?}", inst.name));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        4,
        disagreements.is_empty(),
        format!(
            "{} instances, {subsets} subsets, {} disagreements{}, {secs:.2} s",
            all.len(),
            disagreements.len(),
            disagreements.first().map(|d| format!(" e.g. {d}")).unwrap_or_default()
        ),
    );
}

#[test]
fn criterion_5_nested_set_laws() {
    let mut failures = Vec::new();
    let mut total = 0;
    for inst in instances(2024, 20) {
        let ctx = NestedContext::new(&inst.poset, &inst.g).unwrap();
        let all = ctx.all_maximal().unwrap();
        total += all.len();
        let mut union = BTreeSet::new();
        let mut count = 0;
        for p in inst.poset.points() {
            for s in ctx.enumerate_maximal(p).unwrap() {
                count += 1;
                if s.center() != p {
                    failures.push(format!("{}: center mismatch", inst.name));
                }
                union.insert(s.members().to_vec());
            }
        }
        let whole: BTreeSet<Vec<Layer>> = all.iter().map(|s| s.members().to_vec()).collect();
        if union != whole || count != all.len() || whole.len() != all.len() {
            failures.push(format!("{}: maximal sets do not split by point", inst.name));
        }
        for s in &all {
            if s.len() != inst.poset.rank() {
                failures.push(format!("{}: |S| = {}", inst.name, s.len()));
            }
            if !rank_additive(s.members(), s.center()) {
                failures.push(format!("{}: rank additivity", inst.name));
            }
        }
    }

    let refs = reference();
    let count_at = |k: usize, c: &[TorsionValue]| {
        let (_, poset, g) = &refs[k];
        NestedContext::new(poset, g).unwrap().enumerate_maximal(&point(poset, c)).unwrap().len()
    };
    let diag_total = NestedContext::new(&refs[0].1, &refs[0].2).unwrap().all_maximal().unwrap().len();
    let diag_p1 = count_at(0, &[tv(0, 1), tv(0, 1)]);
    let diag_p2 = count_at(0, &[tv(1, 2), tv(1, 2)]);
    let sq_p1 = count_at(1, &[tv(0, 1), tv(0, 1)]);
    let sq_p3 = count_at(1, &[tv(0, 1), tv(1, 2)]);
    let counts_ok = diag_total == 4 && diag_p1 == 2 && diag_p2 == 2 && sq_p1 == 4 && sq_p3 == 1;
    verdict(
        5,
        failures.is_empty() && counts_ok,
        format!(
            "{total} maximal sets checked, {} law failures, diagonals |M|={diag_total} ({diag_p1}+{diag_p2}), squares |M_p1|={sq_p1} |M_p3|={sq_p3}",
            failures.len()
        ),
    );
}

#[test]
fn criterion_6_adapted_bases() {
    let mut checked = 0;
    let mut failures = Vec::new();
    for inst in instances(2024, 20) {
        let ctx = NestedContext::new(&inst.poset, &inst.g).unwrap();
        for s in ctx.all_maximal().unwrap() {
            checked += 1;
            let basis = adapted_basis(&s).unwrap();
            let chart = Chart::new(&inst.poset, s.clone()).unwrap();
            let mut images: Vec<usize> = basis
                .vectors()
                .iter()
                .filter_map(|v| chart.p_s_index(v).ok())
                .collect();
            let in_order = basis
                .vectors()
                .iter()
                .enumerate()
                .all(|(i, v)| largest_constant_member(&s, v) == Some(i) && chart.p_s_index(v) == Ok(i));
            images.sort_unstable();
            images.dedup();
            let ok = basis.is_adapted_to(&s)
                && adapted(&s, basis.vectors())
                && in_order
                && images.len() == s.len();
            if !ok {
                failures.push(format!("{} {:?}", inst.name, s.members()));
            }
        }
    }
    verdict(
        6,
        failures.is_empty(),
        format!("{checked} maximal nested sets, {} failures", failures.len()),
    );
}

#[test]
fn criterion_7_chart_analytics() {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut ok = true;
    for (name, poset, g) in reference() {
        let charts = atlas(&poset, &g).unwrap();
        let opts = VerifyOptions { seed: 7, samples: 100, pair_samples: 20, tolerance: TOL };
        let r = verify_atlas(&poset, &g, &charts, &opts);
        let origin = r.charts.iter().all(|c| c.origin_in_chart);
        let pass = r.max_residual < TOL
            && r.max_inverse_error < TOL
            && r.short_pairs == 0
            && r.min_transition_magnitude >= 1e-9
            && r.max_transition_magnitude <= 1e9
            && r.max_transition_error < TOL
            && origin;
        ok &= pass;
        details.push(format!(
            "{name}: {} charts, residual {:.1e}, roundtrip {:.1e}, {} pairs x {} samples ({} short), magnitudes [{:.1e}, {:.1e}], transition error {:.1e}, origin in every V_S {origin}",
            r.charts.len(),
            r.max_residual,
            r.max_inverse_error,
            r.transition_pairs,
            opts.pair_samples,
            r.short_pairs,
            r.min_transition_magnitude,
            r.max_transition_magnitude,
            r.max_transition_error,
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(7, ok && secs < 30.0, format!("{}; {secs:.2} s", details.join("; ")));
}

fn jet(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
}

fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
}

/// Torus point of the germ at parameter `s`.
fn germ_at(germ: &CurveGerm, s: f64) -> Vec<Complex64> {
    let p = germ.point().torsion_coordinates().unwrap();
    (0..p.len())
        .map(|j| {
            let mut phase = p[j].to_f64();
            for (k, v) in germ.jets().iter().enumerate() {
                phase += s.powi(k as i32 + 1) * v[j].to_f64().unwrap();
            }
            Complex64::new(0.0, TAU * phase).exp()
        })
        .collect()
}

#[test]
fn criterion_8_curve_lifting() {
    let refs = reference();
    let (_, poset, g) = &refs[0];
    let p1 = point(poset, &[tv(0, 1), tv(0, 1)]);
    let h_ts = hyper(poset, &[1, 1], &p1);
    let h_inv = hyper(poset, &[1, -1], &p1);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);

    let germ = CurveGerm::new(p1.clone(), vec![jet(&[1, 1]), jet(&[1, 0])]).unwrap();
    let (chart, z) = chart_for_curve(poset, g, &germ).unwrap();
    let first = chart.nested_set().members() == [p1.clone(), h_inv.clone()] && close(&z, &[zero, zero], TOL);

    let germ = CurveGerm::new(p1.clone(), vec![jet(&[1, 0])]).unwrap();
    let (chart, z) = chart_for_curve(poset, g, &germ).unwrap();
    let second = chart.nested_set().members() == [p1.clone(), h_ts.clone()] && close(&z, &[zero, one], TOL);

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut valid = 0;
    let mut skipped = 0;
    let mut failures = Vec::new();
    let mut max_gap: f64 = 0.0;
    let mut max_gap_ratio: f64 = 0.0;
    while valid < 50 {
        let (_, poset, g) = &refs[valid % 2];
        let points = poset.points();
        let p = points[rng.gen_range(0..points.len())].clone();
        let jets: Vec<Vec<BigRational>> = (0..rng.gen_range(1..=2))
            .map(|_| {
                (0..2)
                    .map(|_| BigRational::new(BigInt::from(rng.gen_range(-2..=2)), BigInt::from(rng.gen_range(1..=3))))
                    .collect()
            })
            .collect();
        let germ = CurveGerm::new(p, jets).unwrap();
        match chart_for_curve(poset, g, &germ) {
            Err(Error::InvalidGerm(_)) => skipped += 1,
            Err(e) => {
                valid += 1;
                failures.push(format!("{germ:?}: {e}"));
            }
            Ok((chart, z)) => {
                valid += 1;
                if !chart.in_chart(&z) {
                    failures.push(format!("{germ:?}: limit outside chart"));
                }
                // The lifted curve approaches the limit linearly in s.
                let gap = |s: f64| {
                    let along = chart.torus_to_chart(&germ_at(&germ, s)).unwrap();
                    along.iter().zip(&z).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
                };
                let (coarse, fine) = (gap(1e-4), gap(1e-5));
                max_gap = max_gap.max(coarse);
                if coarse > 1e-9 {
                    max_gap_ratio = max_gap_ratio.max(fine / coarse);
                }
            }
        }
    }
    verdict(
        8,
        first && second && failures.is_empty() && max_gap < 1e-2 && max_gap_ratio < 0.2,
        format!(
            "worked germs {first}/{second}, 50 random germs ({skipped} staying on a hypersurface redrawn), {} failures{}, curve-to-limit gap {max_gap:.1e} at s=1e-4 shrinking by {max_gap_ratio:.2} at s=1e-5",
            failures.len(),
            failures.first().map(|f| format!(" e.g. {f}")).unwrap_or_default()
        ),
    );
}

#[test]
fn criterion_9_atlas_cover() {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut uncovered_total = 0;
    for (name, poset, g) in reference() {
        let charts = atlas(&poset, &g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let points = poset.points();
        let mut samples = 0;
        let mut uncovered = 0;
        while samples < 500 {
            let t = if samples % 2 == 0 {
                sample_torus(&mut rng, poset.rank())
            } else {
                let p = points[rng.gen_range(0..points.len())];
                sample_near(&mut rng, p, 1e-2)
            };
            if !in_complement(&poset, &t, 1e-6) {
                continue;
            }
            samples += 1;
            if covering_chart(&charts, &t).is_none() {
                uncovered += 1;
            }
        }
        uncovered_total += uncovered;
        details.push(format!("{name}: {samples} points, {uncovered} uncovered"));
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(9, uncovered_total == 0 && secs < 10.0, format!("{}; {secs:.2} s", details.join("; ")));
}
