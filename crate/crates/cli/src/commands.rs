use num_rational::BigRational;
use thiserror::Error;
use toric_wonderful::arrangement::{Layer, LayerPoset};
use toric_wonderful::charts::{atlas, chart_for_curve, divisor_dim, Chart, CurveGerm};
use toric_wonderful::decomposition::{irreducible_layers, is_c_irreducible, is_z_irreducible};
use toric_wonderful::lattice::format_vector;
use toric_wonderful::nested::NestedContext;
use toric_wonderful::verify::{verify_atlas, VerifyOptions};
use toric_wonderful::Error as CoreError;

use crate::parse::{parse_rational, ArrangementFile, BuildError, ParseError};
use crate::report::{layer_id, BasisEntry, Body, ChartView, Header, IrreducibleView, NestedView, PointView, Report};

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Layers,
    Points,
    Irreducible,
    Nested { point: Option<String>, max: bool },
    Charts { verify: bool },
    Divisor { set: Vec<String> },
    Curve { point: String, jets: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Layers => "layers",
            Command::Points => "points",
            Command::Irreducible => "irreducible",
            Command::Nested { .. } => "nested",
            Command::Charts { .. } => "charts",
            Command::Divisor { .. } => "divisor",
            Command::Curve { .. } => "curve",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub no_normalize: bool,
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            no_normalize: false,
            seed: 0,
            samples: 100,
            tolerance: toric_wonderful::charts::DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Build(#[from] BuildError),
    #[error("unknown layer id `{0}` (ids are listed in the report header)")]
    UnknownLayer(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("{context}: {source}")]
    Domain { context: String, source: CoreError },
}

fn domain(context: impl Into<String>) -> impl FnOnce(CoreError) -> CliError {
    let context = context.into();
    move |source| CliError::Domain { context, source }
}

fn resolve(poset: &LayerPoset, id: &str) -> Result<usize, CliError> {
    id.trim()
        .strip_prefix('L')
        .and_then(|k| k.parse::<usize>().ok())
        .filter(|&k| k < poset.len())
        .ok_or_else(|| CliError::UnknownLayer(id.trim().to_string()))
}

fn id_of(poset: &LayerPoset, layer: &Layer) -> String {
    layer_id(poset.index_of(layer).expect("layer of the poset"))
}

fn chart_view(poset: &LayerPoset, chart: &Chart) -> ChartView {
    let s = chart.nested_set();
    let basis = chart.basis();
    ChartView {
        center: id_of(poset, s.center()),
        members: s.members().iter().map(|c| id_of(poset, c)).collect(),
        basis: s
            .members()
            .iter()
            .zip(basis.vectors().iter().zip(basis.constants()))
            .map(|(c, (v, a))| BasisEntry {
                member: id_of(poset, c),
                vector: format_vector(v),
                constant: a.to_string(),
            })
            .collect(),
    }
}

/// All nested subsets of the given member indices, in lexicographic order.
fn all_nested(ctx: &NestedContext, candidates: &[usize]) -> Vec<Vec<usize>> {
    fn extend(ctx: &NestedContext, candidates: &[usize], start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for k in start..candidates.len() {
            cur.push(candidates[k]);
            if ctx.is_nested_indices(cur) {
                out.push(cur.clone());
                extend(ctx, candidates, k + 1, cur, out);
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    extend(ctx, candidates, 0, &mut Vec::new(), &mut out);
    out
}

fn parse_jets(text: &str, rank: usize) -> Result<Vec<Vec<BigRational>>, CliError> {
    text.split(';')
        .map(|v| {
            let entries: Vec<BigRational> = v
                .split(',')
                .map(|x| {
                    parse_rational(x).ok_or_else(|| CliError::InvalidArgument(format!("`{}` is not a rational", x.trim())))
                })
                .collect::<Result<_, _>>()?;
            if entries.len() != rank {
                return Err(CliError::InvalidArgument(format!(
                    "jet `{}` has {} entries but the rank is {rank}",
                    v.trim(),
                    entries.len()
                )));
            }
            Ok(entries)
        })
        .collect()
}

pub fn run(file: &ArrangementFile, command: &Command, opts: &Options) -> Result<Report, CliError> {
    let arrangement = file.build(opts.no_normalize)?;
    let poset = arrangement.build_poset();
    let header = Header::new(command.name(), file.name.clone(), &poset, !opts.no_normalize);
    let g = irreducible_layers(&poset);
    let body = match command {
        Command::Layers => Body::Layers {
            edges: poset
                .hasse_edges()
                .into_iter()
                .map(|(i, j)| (layer_id(i), layer_id(j)))
                .collect(),
        },
        Command::Points => Body::Points {
            points: poset
                .point_indices()
                .iter()
                .map(|&i| {
                    let p = poset.layer(i);
                    PointView {
                        id: layer_id(i),
                        coordinates: p.values().iter().map(ToString::to_string).collect(),
                        local: p.support().to_vec(),
                    }
                })
                .collect(),
        },
        Command::Irreducible => Body::Irreducible {
            building_set: g.members().iter().map(|c| id_of(&poset, c)).collect(),
            layers: poset
                .layers()
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    let vectors = arrangement.lambdas(l.support());
                    IrreducibleView {
                        id: layer_id(i),
                        z_irreducible: is_z_irreducible(&vectors),
                        c_irreducible: is_c_irreducible(&vectors),
                        member: g.contains(l),
                    }
                })
                .collect(),
        },
        Command::Nested { point, max } => {
            let ctx = NestedContext::new(&poset, &g).map_err(domain("nested"))?;
            let p = point.as_deref().map(|id| resolve(&poset, id)).transpose()?;
            if let Some(k) = p {
                if !poset.layer(k).is_point() {
                    return Err(CliError::Domain {
                        context: format!("nested --point {}", layer_id(k)),
                        source: CoreError::NotAPoint,
                    });
                }
            }
            let sets: Vec<NestedView> = if *max {
                let found = match p {
                    Some(k) => ctx.enumerate_maximal(poset.layer(k)),
                    None => ctx.all_maximal(),
                }
                .map_err(domain("nested --max"))?;
                found
                    .iter()
                    .map(|s| NestedView {
                        members: s.members().iter().map(|c| id_of(&poset, c)).collect(),
                        center: id_of(&poset, s.center()),
                    })
                    .collect()
            } else {
                let candidates: Vec<usize> = (0..g.len())
                    .filter(|&i| p.is_none_or(|k| g.members()[i].contains(poset.layer(k))))
                    .collect();
                all_nested(&ctx, &candidates)
                    .into_iter()
                    .map(|idx| {
                        let members: Vec<Layer> = idx.iter().map(|&i| g.members()[i].clone()).collect();
                        let s = ctx.nested_set(members).map_err(domain("nested"))?;
                        Ok(NestedView {
                            members: s.members().iter().map(|c| id_of(&poset, c)).collect(),
                            center: id_of(&poset, s.center()),
                        })
                    })
                    .collect::<Result<_, CliError>>()?
            };
            Body::Nested {
                point: p.map(layer_id),
                maximal: *max,
                sets,
            }
        }
        Command::Charts { verify } => {
            let charts: Vec<Chart> = atlas(&poset, &g)
                .map_err(domain("charts"))?
                .into_iter()
                .map(|c| c.with_tolerance(opts.tolerance))
                .collect();
            let verification = verify.then(|| {
                let v = VerifyOptions {
                    seed: opts.seed,
                    samples: opts.samples,
                    tolerance: opts.tolerance,
                    ..Default::default()
                };
                verify_atlas(&poset, &g, &charts, &v)
            });
            Body::Charts {
                charts: charts.iter().map(|c| chart_view(&poset, c)).collect(),
                verification,
            }
        }
        Command::Divisor { set } => {
            let idx: Vec<usize> = set.iter().map(|id| resolve(&poset, id)).collect::<Result<_, _>>()?;
            if idx.is_empty() {
                return Err(CliError::InvalidArgument("divisor --set needs at least one layer id".into()));
            }
            let layers: Vec<Layer> = idx.iter().map(|&i| poset.layer(i).clone()).collect();
            let dimension = divisor_dim(&poset, &g, &layers).map_err(domain("divisor --set"))?;
            Body::Divisor {
                set: idx.into_iter().map(layer_id).collect(),
                dimension,
            }
        }
        Command::Curve { point, jets } => {
            let k = resolve(&poset, point)?;
            let vectors = parse_jets(jets, poset.rank())?;
            let germ = CurveGerm::new(poset.layer(k).clone(), vectors.clone()).map_err(domain("curve"))?;
            let (chart, z) = chart_for_curve(&poset, &g, &germ).map_err(domain("curve"))?;
            Body::Curve {
                point: layer_id(k),
                jets: vectors
                    .iter()
                    .map(|v| v.iter().map(ToString::to_string).collect())
                    .collect(),
                chart: chart_view(&poset, &chart.with_tolerance(opts.tolerance)),
                limit: z.iter().map(|c| [c.re + 0.0, c.im + 0.0]).collect(),
            }
        }
    };
    Ok(Report { header, body })
}
