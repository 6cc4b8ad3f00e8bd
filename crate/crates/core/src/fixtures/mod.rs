//! Fixture registry and the declarative fixture file format.
//!
//! A fixture file is a TOML document embedding expression strings: an
//! ambient chart with a sampling box, a metric, a connection specification
//! (Levi-Civita, or Levi-Civita shifted by a difference tensor given by its
//! nonzero entries), an optional contact structure, an optional hypersurface
//! with analytically declared frames, optional worked-example reproduction
//! rows, and per-row expected-outcome annotations. No executable code lives
//! in fixture files.
//!
//! Loading validates the document at bootstrap points before the fixture is
//! accepted; the built-in registry goes through the same path.

pub mod registry;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::connection::{Connection, DifferenceTensor};
use crate::contact::ContactStructure;
use crate::expr::Expr;
use crate::geometry::{Chart, Metric, OneForm, Sampler, Tensor11, VectorField};
use crate::lightlike::{Hypersurface, Reproduction};
use crate::{Error, Result};

pub const FIXTURE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FixtureSpec {
    pub format_version: u32,
    pub name: String,
    pub ambient: ChartSpec,
    pub metric: MetricSpec,
    pub connection: ConnectionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contact: Option<ContactSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypersurface: Option<HypersurfaceSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reproduction: Vec<ReproductionSpec>,
    /// Row-id prefix -> "report": rows matching the prefix are computed and
    /// reported but excluded from the exit code.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub expectations: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ChartSpec {
    pub coords: Vec<String>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MetricSpec {
    pub index: usize,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConnectionSpec {
    /// "levi-civita" or "k-shift" (Levi-Civita plus the difference tensor).
    pub kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub k: Vec<KEntry>,
}

/// One nonzero difference-tensor entry K^upper_{i j}, by coordinate name.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KEntry {
    pub upper: String,
    pub i: String,
    pub j: String,
    pub expr: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ContactSpec {
    pub epsilon: i8,
    pub nu: Vec<String>,
    pub eta: Vec<String>,
    pub phi: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HypersurfaceSpec {
    pub coords: Vec<String>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<String>,
    pub param: Vec<String>,
    pub xi: Vec<String>,
    pub transversal: Vec<String>,
    pub screen: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_index: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReproductionSpec {
    pub id: String,
    pub reference: String,
    /// "levi-civita", "primal", or "star-claimed" (Levi-Civita minus K).
    pub connection: String,
    /// "xi", "nu", or "screen:IDX".
    pub x: String,
    pub y: String,
    pub expected: Vec<String>,
}

/// A loaded and validated fixture.
pub struct Fixture {
    pub spec: FixtureSpec,
    pub chart: Chart,
    pub metric: Metric,
    pub connection: Connection,
    pub k: Option<DifferenceTensor>,
    pub contact: Option<ContactStructure>,
    pub hypersurface: Option<Hypersurface>,
}

impl Fixture {
    pub fn name(&self) -> &str {
        &self.spec.name
    }

    /// The starred connection a worked example claims via the mean-connection
    /// relation: Levi-Civita minus the declared difference tensor. This is
    /// generally distinct from the metric dual of the primal connection.
    pub fn star_claimed(&self) -> Option<Connection> {
        self.k.as_ref().map(|k| {
            Connection::from_difference(Connection::levi_civita(&self.metric), k.negated())
        })
    }

    pub fn reproductions(&self) -> Result<Vec<Reproduction>> {
        let hyp = match &self.hypersurface {
            Some(h) => h,
            None => return Ok(Vec::new()),
        };
        let hyp_names = hyp.chart.name_refs();
        let mut out = Vec::new();
        for spec in &self.spec.reproduction {
            let conn = match spec.connection.as_str() {
                "levi-civita" => Connection::levi_civita(&self.metric),
                "primal" => self.connection.clone(),
                "star-claimed" => self.star_claimed().ok_or_else(|| {
                    Error::Schema(format!(
                        "reproduction `{}` needs a k-shift connection for its claimed star",
                        spec.id
                    ))
                })?,
                other => {
                    return Err(Error::Schema(format!(
                        "reproduction `{}`: unknown connection `{other}`",
                        spec.id
                    )))
                }
            };
            let resolve = |which: &str| -> Result<VectorField> {
                match which {
                    "xi" => Ok(hyp.xi.clone()),
                    "nu" => hyp
                        .nu()
                        .cloned()
                        .ok_or_else(|| Error::Schema("reproduction refers to nu but none declared".into())),
                    other => match other.strip_prefix("screen:") {
                        Some(idx) => {
                            let i: usize = idx.parse().map_err(|_| {
                                Error::Schema(format!("bad screen index in `{other}`"))
                            })?;
                            hyp.screen.get(i).cloned().ok_or_else(|| {
                                Error::Schema(format!("screen index {i} out of range"))
                            })
                        }
                        None => Err(Error::Schema(format!("unknown frame field `{other}`"))),
                    },
                }
            };
            let expected = VectorField::new(
                spec.expected
                    .iter()
                    .map(|s| Expr::parse(s, &hyp_names))
                    .collect::<Result<Vec<_>>>()?,
            );
            out.push(Reproduction {
                id: spec.id.clone(),
                reference: spec.reference.clone(),
                conn,
                x: resolve(&spec.x)?,
                y: resolve(&spec.y)?,
                expected,
            });
        }
        Ok(out)
    }

    /// Expected outcome for a row: true when the fixture marks the row (by
    /// id prefix) as report-only.
    pub fn is_report_only(&self, row_id: &str) -> bool {
        self.spec
            .expectations
            .iter()
            .any(|(prefix, v)| v == "report" && row_id.starts_with(prefix.as_str()))
    }

    pub fn to_toml(&self) -> String {
        spec_to_toml(&self.spec)
    }
}

pub fn spec_to_toml(spec: &FixtureSpec) -> String {
    toml::to_string_pretty(spec).expect("fixture serialization")
}

fn parse_chart(spec: &ChartSpec) -> Result<Chart> {
    let n = spec.coords.len();
    if spec.lo.len() != n || spec.hi.len() != n {
        return Err(Error::Schema(format!(
            "chart box dimensions {}/{} do not match {} coordinates",
            spec.lo.len(),
            spec.hi.len(),
            n
        )));
    }
    let names: Vec<&str> = spec.coords.iter().map(|s| s.as_str()).collect();
    let mut chart = Chart::new(&names, &spec.lo, &spec.hi);
    for c in &spec.constraints {
        chart = chart.with_constraint(Expr::parse(c, &names)?);
    }
    Ok(chart)
}

fn coord_index(chart: &Chart, name: &str) -> Result<usize> {
    chart
        .names
        .iter()
        .position(|c| c == name)
        .ok_or_else(|| Error::Schema(format!("unknown coordinate `{name}` in connection entry")))
}

/// Compile a spec into runtime objects. Bootstrap validation happens in
/// [`load_spec`]; this step only checks structure and parses expressions.
pub fn compile(spec: FixtureSpec) -> Result<Fixture> {
    if spec.format_version != FIXTURE_FORMAT_VERSION {
        return Err(Error::Schema(format!(
            "unsupported fixture format_version {} (engine speaks {})",
            spec.format_version, FIXTURE_FORMAT_VERSION
        )));
    }
    let chart = parse_chart(&spec.ambient)?;
    let names = chart.name_refs();
    let n = chart.dim();

    if spec.metric.rows.len() != n || spec.metric.rows.iter().any(|r| r.len() != n) {
        return Err(Error::Schema(format!(
            "metric must be a {n}x{n} grid of expressions"
        )));
    }
    let mut entries = Vec::with_capacity(n * n);
    for row in &spec.metric.rows {
        for s in row {
            entries.push(Expr::parse(s, &names)?);
        }
    }
    let metric = Metric::new(n, entries, spec.metric.index);

    let (connection, k) = match spec.connection.kind.as_str() {
        "levi-civita" => (Connection::levi_civita(&metric), None),
        "k-shift" => {
            let mut k_entries = vec![Expr::zero(); n * n * n];
            for e in &spec.connection.k {
                let kk = coord_index(&chart, &e.upper)?;
                let i = coord_index(&chart, &e.i)?;
                let j = coord_index(&chart, &e.j)?;
                k_entries[(kk * n + i) * n + j] = Expr::parse(&e.expr, &names)?;
            }
            let k = DifferenceTensor::from_exprs(n, k_entries);
            (
                Connection::from_difference(Connection::levi_civita(&metric), k.clone()),
                Some(k),
            )
        }
        other => {
            return Err(Error::Schema(format!(
                "unknown connection kind `{other}` (expected levi-civita or k-shift)"
            )))
        }
    };

    let contact = match &spec.contact {
        None => None,
        Some(c) => {
            if c.epsilon != 1 {
                return Err(Error::Schema(
                    "the structure field nu must be spacelike: epsilon = 1 is required".into(),
                ));
            }
            if c.nu.len() != n || c.eta.len() != n || c.phi.len() != n || c.phi.iter().any(|r| r.len() != n) {
                return Err(Error::Schema("contact structure dimensions are inconsistent".into()));
            }
            let nu = VectorField::new(c.nu.iter().map(|s| Expr::parse(s, &names)).collect::<Result<_>>()?);
            let eta = OneForm::new(c.eta.iter().map(|s| Expr::parse(s, &names)).collect::<Result<_>>()?);
            // phi rows are matrix rows: phi[a][b] = component a of phi(d_b)
            let mut phi_entries = Vec::with_capacity(n * n);
            for row in &c.phi {
                for s in row {
                    phi_entries.push(Expr::parse(s, &names)?);
                }
            }
            Some(ContactStructure {
                phi: Tensor11::new(n, phi_entries),
                nu,
                eta,
            })
        }
    };

    let hypersurface = match &spec.hypersurface {
        None => None,
        Some(h) => {
            let hyp_chart = parse_chart(&ChartSpec {
                coords: h.coords.clone(),
                lo: h.lo.clone(),
                hi: h.hi.clone(),
                constraints: h.constraints.clone(),
            })?;
            let hyp_names = hyp_chart.name_refs();
            if h.param.len() != n {
                return Err(Error::Schema(format!(
                    "hypersurface parametrization must have {n} ambient components"
                )));
            }
            if h.screen.len() + 1 != hyp_chart.dim() {
                return Err(Error::Schema(format!(
                    "screen frame must have {} fields for a {}-dimensional hypersurface",
                    hyp_chart.dim() - 1,
                    hyp_chart.dim()
                )));
            }
            let parse_field = |comps: &[String]| -> Result<VectorField> {
                if comps.len() != n {
                    return Err(Error::Schema(format!(
                        "hypersurface fields need {n} ambient components"
                    )));
                }
                Ok(VectorField::new(
                    comps
                        .iter()
                        .map(|s| Expr::parse(s, &hyp_names))
                        .collect::<Result<Vec<_>>>()?,
                ))
            };
            if let Some(i) = h.nu_index {
                if i >= h.screen.len() {
                    return Err(Error::Schema(format!("nu_index {i} out of screen range")));
                }
            }
            let param = h
                .param
                .iter()
                .map(|s| Expr::parse(s, &hyp_names))
                .collect::<Result<Vec<_>>>()?;
            let xi = parse_field(&h.xi)?;
            let transversal = parse_field(&h.transversal)?;
            let screen = h.screen.iter().map(|f| parse_field(f)).collect::<Result<Vec<_>>>()?;
            drop(hyp_names);
            Some(Hypersurface::new(
                hyp_chart,
                param,
                xi,
                transversal,
                screen,
                h.nu_index,
            ))
        }
    };

    Ok(Fixture {
        spec,
        chart,
        metric,
        connection,
        k,
        contact,
        hypersurface,
    })
}

/// Bootstrap validation at 20 seeded points: metric symmetry and
/// nondegeneracy, and every declared hypersurface frame condition.
pub fn bootstrap(fx: &Fixture) -> Result<()> {
    let name = fx.name().to_string();
    let fail = |message: String, residual: f64, point: &[f64]| Error::Bootstrap {
        fixture: name.clone(),
        message,
        residual,
        point: point.to_vec(),
    };
    let mut sampler = Sampler::new(7);
    for _ in 0..20 {
        let p = sampler.sample(&fx.chart)?;
        let g = fx.metric.eval(&p)?;
        for i in 0..fx.metric.n {
            for j in (i + 1)..fx.metric.n {
                let d = (g[(i, j)] - g[(j, i)]).abs();
                if d > 1e-12 {
                    return Err(fail(format!("metric is not symmetric at entry ({i}, {j})"), d, &p));
                }
            }
        }
        let det = crate::linalg::det(&g);
        if det.abs() < 1e-10 {
            return Err(fail("ambient metric is degenerate".into(), det.abs(), &p));
        }
        let negatives = g
            .symmetric_eigenvalues()
            .iter()
            .filter(|&&l| l < 0.0)
            .count();
        if negatives != fx.metric.index {
            return Err(fail(
                format!(
                    "metric index mismatch: declared {}, eigenvalues give {}",
                    fx.metric.index, negatives
                ),
                negatives as f64,
                &p,
            ));
        }
    }
    if let Some(hyp) = &fx.hypersurface {
        let mut sampler = Sampler::new(11);
        for _ in 0..20 {
            let u = sampler.sample(&hyp.chart)?;
            let p = hyp.ambient_point(&u)?;
            let gm = fx.metric.eval(&p)?;
            let xiv = hyp.xi.eval(&u)?;
            let nv = hyp.transversal.eval(&u)?;
            let pairings = [
                ("g(xi,xi) = 0", (xiv.transpose() * &gm * &xiv)[(0, 0)]),
                ("g(N,N) = 0", (nv.transpose() * &gm * &nv)[(0, 0)]),
                ("g(xi,N) = 1", (xiv.transpose() * &gm * &nv)[(0, 0)] - 1.0),
            ];
            for (what, r) in pairings {
                if r.abs() > 1e-8 {
                    return Err(fail(format!("declared frame violates {what}"), r.abs(), &u));
                }
            }
            for (i, f) in hyp.tangent_frame().iter().enumerate() {
                let v = f.eval(&u)?;
                let (_, res) = hyp.pushforward_coords(&u, &v)?;
                if res > 1e-8 {
                    return Err(fail(format!("tangent frame field {i} is not tangent"), res, &u));
                }
            }
            for (i, w) in hyp.screen.iter().enumerate() {
                let wv = w.eval(&u)?;
                let r1 = (xiv.transpose() * &gm * &wv)[(0, 0)];
                let r2 = (nv.transpose() * &gm * &wv)[(0, 0)];
                if r1.abs() > 1e-8 || r2.abs() > 1e-8 {
                    return Err(fail(
                        format!("screen field {i} is not orthogonal to xi and N"),
                        r1.abs().max(r2.abs()),
                        &u,
                    ));
                }
            }
            hyp.radical(&fx.metric, &u, 1e-10).map_err(|e| {
                fail(format!("radical construction failed: {e}"), 1.0, &u)
            })?;
        }
    }
    Ok(())
}

/// Compile and bootstrap a spec.
pub fn load_spec(spec: FixtureSpec) -> Result<Fixture> {
    let fx = compile(spec)?;
    bootstrap(&fx)?;
    Ok(fx)
}

/// Load a fixture by registry name, or from a TOML file when the argument
/// names no registry entry but an existing path.
pub fn load(name_or_path: &str) -> Result<Fixture> {
    if let Some(spec) = registry::spec(name_or_path) {
        return load_spec(spec);
    }
    let path = Path::new(name_or_path);
    if path.exists() {
        return load_file(path);
    }
    Err(Error::UnknownFixture {
        name: name_or_path.to_string(),
        available: registry::names().iter().map(|s| s.to_string()).collect(),
    })
}

pub fn load_file(path: &Path) -> Result<Fixture> {
    let text = std::fs::read_to_string(path)?;
    let spec: FixtureSpec =
        toml::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    load_spec(spec)
}
