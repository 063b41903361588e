//! Structured reports and their text rendering. Both renderings depend only
//! on the input, the command and the seed.

use std::fmt::Write as _;

use serde::Serialize;
use toric_wonderful::arrangement::{Layer, LayerPoset};
use toric_wonderful::lattice::format_vector;
use toric_wonderful::verify::VerifyReport;

#[derive(Debug, Clone, Serialize)]
pub struct LayerView {
    pub id: String,
    /// Hermite basis rows of the lattice of characters constant on the layer.
    pub basis: Vec<String>,
    /// Values of those rows on the layer, as elements of ℚ/ℤ.
    pub values: Vec<String>,
    pub dim: usize,
    /// Indices of the characters whose hypersurface contains the layer.
    pub support: Vec<usize>,
}

impl LayerView {
    pub fn new(id: usize, layer: &Layer) -> Self {
        Self {
            id: layer_id(id),
            basis: layer.lattice().basis_rows().iter().map(|r| format_vector(r)).collect(),
            values: layer.values().iter().map(ToString::to_string).collect(),
            dim: layer.dim(),
            support: layer.support().to_vec(),
        }
    }

    fn text(&self) -> String {
        let support: Vec<String> = self.support.iter().map(|i| format!("x{i}")).collect();
        format!(
            "([{}] ; [{}] ; dim {} ; {{{}}})",
            self.basis.join(","),
            self.values.join(","),
            self.dim,
            support.join(",")
        )
    }
}

pub fn layer_id(i: usize) -> String {
    format!("L{i}")
}

#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub command: String,
    pub name: Option<String>,
    pub rank: usize,
    pub normalized: bool,
    /// Characters after normalization, as `[λ] ; r` for `λ(t) = e^{2πi r}`.
    pub characters: Vec<String>,
    /// Every layer, in canonical order; `id` is its position.
    pub layers: Vec<LayerView>,
}

impl Header {
    pub fn new(command: &str, name: Option<String>, poset: &LayerPoset, normalized: bool) -> Self {
        Self {
            command: command.to_string(),
            name,
            rank: poset.rank(),
            normalized,
            characters: poset.arrangement().characters().iter().map(ToString::to_string).collect(),
            layers: poset.layers().iter().enumerate().map(|(i, l)| LayerView::new(i, l)).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointView {
    pub id: String,
    pub coordinates: Vec<String>,
    pub local: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IrreducibleView {
    pub id: String,
    pub z_irreducible: bool,
    pub c_irreducible: bool,
    pub member: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NestedView {
    pub members: Vec<String>,
    pub center: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisEntry {
    pub member: String,
    pub vector: String,
    pub constant: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChartView {
    pub center: String,
    pub members: Vec<String>,
    pub basis: Vec<BasisEntry>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Body {
    Layers {
        edges: Vec<(String, String)>,
    },
    Points {
        points: Vec<PointView>,
    },
    Irreducible {
        building_set: Vec<String>,
        layers: Vec<IrreducibleView>,
    },
    Nested {
        point: Option<String>,
        maximal: bool,
        sets: Vec<NestedView>,
    },
    Charts {
        charts: Vec<ChartView>,
        verification: Option<VerifyReport>,
    },
    Divisor {
        set: Vec<String>,
        dimension: Option<usize>,
    },
    Curve {
        point: String,
        jets: Vec<Vec<String>>,
        chart: ChartView,
        /// Limit coordinates as `[re, im]`, ordered like the chart members.
        limit: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub header: Header,
    pub body: Body,
}

impl Report {
    /// Verification outcome, when the command ran one.
    pub fn verification_failed(&self) -> bool {
        matches!(&self.body, Body::Charts { verification: Some(v), .. } if !v.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let h = &self.header;
        let _ = writeln!(out, "# toric-wonderful {}", h.command);
        let _ = writeln!(
            out,
            "# arrangement {}: rank {}, {} characters{}",
            h.name.as_deref().unwrap_or("(unnamed)"),
            h.rank,
            h.characters.len(),
            if h.normalized { " after normalization" } else { "" }
        );
        for (i, c) in h.characters.iter().enumerate() {
            let _ = writeln!(out, "#   x{i} = {c}");
        }
        let _ = writeln!(
            out,
            "# layer ids in canonical order (dimension, Hermite basis, values); each layer is (basis ; values ; dim ; support):"
        );
        for l in &h.layers {
            let _ = writeln!(out, "#   {} = {}", l.id, l.text());
        }
        self.body_text(&mut out);
        out
    }

    fn body_text(&self, out: &mut String) {
        let layers = &self.header.layers;
        match &self.body {
            Body::Layers { edges } => {
                let _ = writeln!(out, "layers: {}", layers.len());
                for l in layers {
                    let _ = writeln!(out, "{} {}", l.id, l.text());
                }
                let _ = writeln!(out, "hasse edges: {}", edges.len());
                for (a, b) in edges {
                    let _ = writeln!(out, "{a} < {b}");
                }
            }
            Body::Points { points } => {
                let _ = writeln!(out, "points: {}", points.len());
                for p in points {
                    let local: Vec<String> = p.local.iter().map(|i| format!("x{i}")).collect();
                    let _ = writeln!(
                        out,
                        "{} ({}) local {{{}}}",
                        p.id,
                        p.coordinates.join(","),
                        local.join(",")
                    );
                }
            }
            Body::Irreducible { building_set, layers } => {
                let _ = writeln!(out, "building set: {} layers: {}", building_set.len(), building_set.join(" "));
                for l in layers {
                    let _ = writeln!(
                        out,
                        "{} Z-irreducible {} C-irreducible {}{}",
                        l.id,
                        yes_no(l.z_irreducible),
                        yes_no(l.c_irreducible),
                        if l.member { " member" } else { "" }
                    );
                }
            }
            Body::Nested { point, maximal, sets } => {
                let _ = writeln!(
                    out,
                    "{} nested sets{}: {}",
                    if *maximal { "maximal" } else { "all" },
                    point.as_ref().map(|p| format!(" at {p}")).unwrap_or_default(),
                    sets.len()
                );
                for s in sets {
                    let _ = writeln!(out, "{{{}}} center {}", s.members.join(","), s.center);
                }
            }
            Body::Charts { charts, verification } => {
                let _ = writeln!(out, "charts: {}", charts.len());
                for (i, c) in charts.iter().enumerate() {
                    let _ = writeln!(out, "chart {i}: center {} members {{{}}}", c.center, c.members.join(","));
                    for b in &c.basis {
                        let _ = writeln!(out, "  {} : {} ; {}", b.member, b.vector, b.constant);
                    }
                }
                if let Some(v) = verification {
                    verification_text(out, v);
                }
            }
            Body::Divisor { set, dimension } => {
                let _ = match dimension {
                    Some(d) => writeln!(out, "divisor {{{}}}: dimension {d}", set.join(",")),
                    None => writeln!(out, "divisor {{{}}}: EMPTY (not nested)", set.join(",")),
                };
            }
            Body::Curve { point, jets, chart, limit } => {
                let jets: Vec<String> = jets.iter().map(|j| format!("({})", j.join(","))).collect();
                let _ = writeln!(out, "curve at {point} with jets {}", jets.join(" "));
                let _ = writeln!(out, "chart: center {} members {{{}}}", chart.center, chart.members.join(","));
                for (b, z) in chart.basis.iter().zip(limit) {
                    let _ = writeln!(
                        out,
                        "  {} : {} ; {}  limit {}",
                        b.member,
                        b.vector,
                        b.constant,
                        complex_text(z)
                    );
                }
            }
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn complex_text(z: &[f64; 2]) -> String {
    format!("{:.12}{:+.12}i", z[0] + 0.0, z[1] + 0.0)
}

fn verification_text(out: &mut String, v: &VerifyReport) {
    let _ = writeln!(out, "verification (seed {}): {}", v.seed, if v.passed { "PASS" } else { "FAIL" });
    for (i, c) in v.charts.iter().enumerate() {
        let _ = writeln!(
            out,
            "  chart {i}: adapted {} bijective {} cores {} origin {} residual {:.3e} roundtrip {:.3e}",
            yes_no(c.adapted),
            yes_no(c.bijective),
            yes_no(c.cores_reached),
            yes_no(c.origin_in_chart),
            c.max_residual,
            c.max_inverse_error
        );
    }
    let _ = writeln!(out, "  max residual {:.3e}", v.max_residual);
    let _ = writeln!(out, "  max roundtrip error {:.3e}", v.max_inverse_error);
    let _ = writeln!(
        out,
        "  transitions: {} pairs, {} samples, {} short pairs, magnitudes [{:.3e}, {:.3e}], error {:.3e}",
        v.transition_pairs,
        v.transition_samples,
        v.short_pairs,
        v.min_transition_magnitude,
        v.max_transition_magnitude,
        v.max_transition_error
    );
    let _ = writeln!(out, "  cover: {} samples, {} uncovered", v.cover_samples, v.uncovered);
}
