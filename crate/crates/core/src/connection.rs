//! Affine connections as Christoffel coefficient fields.
//!
//! A [`Connection`] yields the coefficients Gamma^k_ij at any admissible
//! point. Four sources exist: identically zero (flat chart), explicit
//! expressions, the Levi-Civita connection of a metric (coefficients are
//! produced numerically per point by differentiating the metric entries with
//! dual numbers and assembling the Koszul formula; no symbolic
//! differentiation is involved), and a base connection shifted by a
//! difference tensor. The dual of a connection with respect to a metric is
//! solved pointwise from the duality law and is again a `Connection`.

use nalgebra::DVector;

use crate::expr::Expr;
use crate::geometry::{lie_bracket, Metric, VectorField};
use crate::{linalg, Error, Result};

/// Dense cube of connection coefficients at one point: `get(k, i, j)` is
/// Gamma^k_ij, the dx^k component of D_{d_i} d_j.
#[derive(Debug, Clone, PartialEq)]
pub struct Coeffs {
    pub n: usize,
    data: Vec<f64>,
}

impl Coeffs {
    pub fn zeros(n: usize) -> Coeffs {
        Coeffs {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.data[(k * self.n + i) * self.n + j] = v;
    }

    pub fn max_abs_diff(&self, other: &Coeffs) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Contraction Gamma^._ij X^i Y^j.
    pub fn contract(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.n);
        for k in 0..self.n {
            let mut acc = 0.0;
            for i in 0..self.n {
                if x[i] == 0.0 {
                    continue;
                }
                for j in 0..self.n {
                    acc += self.get(k, i, j) * x[i] * y[j];
                }
            }
            out[k] = acc;
        }
        out
    }
}

/// Difference tensor K^k_ij, either declared as expressions or obtained as
/// the difference of two connections.
#[derive(Debug, Clone)]
pub enum DifferenceTensor {
    Exprs { n: usize, entries: Vec<Expr> },
    Diff { a: Box<Connection>, b: Box<Connection> },
}

impl DifferenceTensor {
    pub fn from_exprs(n: usize, entries: Vec<Expr>) -> DifferenceTensor {
        assert_eq!(entries.len(), n * n * n);
        DifferenceTensor::Exprs { n, entries }
    }

    pub fn zero(n: usize) -> DifferenceTensor {
        DifferenceTensor::Exprs {
            n,
            entries: vec![Expr::zero(); n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DifferenceTensor::Exprs { n, .. } => *n,
            DifferenceTensor::Diff { a, .. } => a.dim(),
        }
    }

    pub fn values(&self, p: &[f64]) -> Result<Coeffs> {
        match self {
            DifferenceTensor::Exprs { n, entries } => {
                let mut c = Coeffs::zeros(*n);
                for k in 0..*n {
                    for i in 0..*n {
                        for j in 0..*n {
                            c.set(k, i, j, entries[(k * n + i) * n + j].eval(p)?);
                        }
                    }
                }
                Ok(c)
            }
            DifferenceTensor::Diff { a, b } => {
                let ca = a.coeffs(p)?;
                let cb = b.coeffs(p)?;
                let mut c = Coeffs::zeros(ca.n);
                for k in 0..ca.n {
                    for i in 0..ca.n {
                        for j in 0..ca.n {
                            c.set(k, i, j, ca.get(k, i, j) - cb.get(k, i, j));
                        }
                    }
                }
                Ok(c)
            }
        }
    }

    /// K(X, Y) at p.
    pub fn apply(&self, x: &VectorField, y: &VectorField, p: &[f64]) -> Result<DVector<f64>> {
        Ok(self.values(p)?.contract(&x.eval(p)?, &y.eval(p)?))
    }

    /// Negated tensor (used to build the claimed starred pair of a fixture).
    pub fn negated(&self) -> DifferenceTensor {
        match self {
            DifferenceTensor::Exprs { n, entries } => DifferenceTensor::Exprs {
                n: *n,
                entries: entries.iter().map(|e| -e.clone()).collect(),
            },
            DifferenceTensor::Diff { a, b } => DifferenceTensor::Diff {
                a: b.clone(),
                b: a.clone(),
            },
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    /// Flat chart connection: all coefficients vanish.
    Zero { n: usize },
    /// Coefficients given as expressions over the chart.
    Explicit { n: usize, gamma: Vec<Expr> },
    /// Levi-Civita connection of a metric; coefficients assembled per point.
    LeviCivita { g: Metric, degen_tol: f64 },
    /// Base connection plus a difference tensor.
    Shifted {
        base: Box<Connection>,
        k: DifferenceTensor,
    },
    /// Dual of `base` with respect to `g`, solved per point from
    /// Z g(X,Y) = g(D_Z X, Y) + g(X, D*_Z Y).
    Dual {
        base: Box<Connection>,
        g: Metric,
        degen_tol: f64,
    },
}

#[derive(Debug, Clone)]
pub struct Connection {
    kind: Kind,
    cache: crate::cache::PointCache<Coeffs>,
}

impl Connection {
    fn from_kind(kind: Kind) -> Connection {
        Connection {
            kind,
            cache: crate::cache::PointCache::new(),
        }
    }

    pub fn zero(n: usize) -> Connection {
        Connection::from_kind(Kind::Zero { n })
    }

    pub fn levi_civita(g: &Metric) -> Connection {
        Connection::from_kind(Kind::LeviCivita {
            g: g.clone(),
            degen_tol: 1e-10,
        })
    }

    pub fn explicit(n: usize, gamma: Vec<Expr>) -> Connection {
        assert_eq!(gamma.len(), n * n * n);
        Connection::from_kind(Kind::Explicit { n, gamma })
    }

    /// `base + K`: the converse construction from a mean connection and a
    /// difference tensor.
    pub fn from_difference(base: Connection, k: DifferenceTensor) -> Connection {
        Connection::from_kind(Kind::Shifted {
            base: Box::new(base),
            k,
        })
    }

    pub fn dual(base: &Connection, g: &Metric) -> Connection {
        Connection::from_kind(Kind::Dual {
            base: Box::new(base.clone()),
            g: g.clone(),
            degen_tol: 1e-10,
        })
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            Kind::Zero { n } => *n,
            Kind::Explicit { n, .. } => *n,
            Kind::LeviCivita { g, .. } => g.n,
            Kind::Shifted { base, .. } => base.dim(),
            Kind::Dual { base, .. } => base.dim(),
        }
    }

    pub fn coeffs(&self, p: &[f64]) -> Result<Coeffs> {
        self.cache.get_or(p, || self.coeffs_uncached(p))
    }

    fn coeffs_uncached(&self, p: &[f64]) -> Result<Coeffs> {
        match &self.kind {
            Kind::Zero { n } => Ok(Coeffs::zeros(*n)),
            Kind::Explicit { n, gamma } => {
                let mut c = Coeffs::zeros(*n);
                for k in 0..*n {
                    for i in 0..*n {
                        for j in 0..*n {
                            c.set(k, i, j, gamma[(k * n + i) * n + j].eval(p)?);
                        }
                    }
                }
                Ok(c)
            }
            Kind::LeviCivita { g, degen_tol } => levi_civita_at(g, p, *degen_tol),
            Kind::Shifted { base, k } => {
                let mut c = base.coeffs(p)?;
                let kv = k.values(p)?;
                for kk in 0..c.n {
                    for i in 0..c.n {
                        for j in 0..c.n {
                            c.set(kk, i, j, c.get(kk, i, j) + kv.get(kk, i, j));
                        }
                    }
                }
                Ok(c)
            }
            Kind::Dual { base, g, degen_tol } => dual_at(base, g, p, *degen_tol),
        }
    }

    /// (D_X Y)^k = X(Y^k) + Gamma^k_ij X^i Y^j, with both fields over the
    /// connection's chart.
    pub fn covariant_derivative(
        &self,
        x: &VectorField,
        y: &VectorField,
        p: &[f64],
    ) -> Result<DVector<f64>> {
        let xv = x.eval(p)?;
        let dy = y.derive_along(p, xv.as_slice())?;
        Ok(dy + self.coeffs(p)?.contract(&xv, &y.eval(p)?))
    }

    /// Torsion T(X,Y) = D_X Y - D_Y X - [X, Y] at p.
    pub fn torsion(&self, x: &VectorField, y: &VectorField, p: &[f64]) -> Result<DVector<f64>> {
        let dxy = self.covariant_derivative(x, y, p)?;
        let dyx = self.covariant_derivative(y, x, p)?;
        Ok(dxy - dyx - lie_bracket(x, y, p)?)
    }

    /// (D_X g)(Y, Z) = X g(Y,Z) - g(D_X Y, Z) - g(Y, D_X Z) at p.
    pub fn metric_defect(
        &self,
        g: &Metric,
        x: &VectorField,
        y: &VectorField,
        z: &VectorField,
        p: &[f64],
    ) -> Result<f64> {
        let gyz = g.apply_symbolic(y, z);
        let xg = crate::geometry::directional_derivative(x, &gyz, p)?;
        let gm = g.eval(p)?;
        let dxy = self.covariant_derivative(x, y, p)?;
        let dxz = self.covariant_derivative(x, z, p)?;
        let zv = z.eval(p)?;
        let yv = y.eval(p)?;
        Ok(xg - (dxy.transpose() * &gm * zv)[(0, 0)] - (yv.transpose() * &gm * dxz)[(0, 0)])
    }
}

/// Koszul formula at one point. The metric entry gradients come from
/// dual-number evaluation, so the only approximation is the final linear
/// solve.
fn levi_civita_at(g: &Metric, p: &[f64], degen_tol: f64) -> Result<Coeffs> {
    let n = g.n;
    let (gm, grads) = g.eval_with_grads(p)?;
    let d = linalg::det(&gm);
    if d.abs() < degen_tol {
        return Err(Error::SingularMetric {
            point: p.to_vec(),
            det: d,
            threshold: degen_tol,
        });
    }
    let ginv = linalg::invert(&gm).ok_or_else(|| Error::SingularMetric {
        point: p.to_vec(),
        det: d,
        threshold: degen_tol,
    })?;
    // dg(c, a, b) = d_c g_ab
    let dg = |c: usize, a: usize, b: usize| grads[a * n + b][c];
    let mut out = Coeffs::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    let first = 0.5 * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
                    acc += ginv[(k, l)] * first;
                }
                out.set(k, i, j, acc);
            }
        }
    }
    Ok(out)
}

/// Solve the duality law for the starred coefficients:
/// Gamma*^l_ij g_lk = d_i g_jk - Gamma^l_ik g_jl, one small linear solve per
/// (i, j) pair.
fn dual_at(base: &Connection, g: &Metric, p: &[f64], degen_tol: f64) -> Result<Coeffs> {
    let n = g.n;
    let (gm, grads) = g.eval_with_grads(p)?;
    let d = linalg::det(&gm);
    if d.abs() < degen_tol {
        return Err(Error::SingularMetric {
            point: p.to_vec(),
            det: d,
            threshold: degen_tol,
        });
    }
    let gamma = base.coeffs(p)?;
    let dg = |c: usize, a: usize, b: usize| grads[a * n + b][c];
    let lu = gm.clone().lu();
    let mut out = Coeffs::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut rhs = DVector::zeros(n);
            for k in 0..n {
                let mut v = dg(i, j, k);
                for l in 0..n {
                    v -= gamma.get(l, i, k) * gm[(j, l)];
                }
                rhs[k] = v;
            }
            let x = lu.solve(&rhs).ok_or_else(|| Error::SingularMetric {
                point: p.to_vec(),
                det: d,
                threshold: degen_tol,
            })?;
            for k in 0..n {
                out.set(k, i, j, x[k]);
            }
        }
    }
    Ok(out)
}

/// Residual of the duality law Z g(X,Y) - g(D_Z X, Y) - g(X, D*_Z Y) at p.
pub fn duality_residual(
    d: &Connection,
    dstar: &Connection,
    g: &Metric,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    p: &[f64],
) -> Result<f64> {
    let gxy = g.apply_symbolic(x, y);
    let zg = crate::geometry::directional_derivative(z, &gxy, p)?;
    let gm = g.eval(p)?;
    let dzx = d.covariant_derivative(z, x, p)?;
    let dzy = dstar.covariant_derivative(z, y, p)?;
    let xv = x.eval(p)?;
    let yv = y.eval(p)?;
    Ok(zg - (dzx.transpose() * &gm * yv)[(0, 0)] - (xv.transpose() * &gm * dzy)[(0, 0)])
}

/// K = D - LeviCivita(g) as a lazily evaluated difference tensor.
pub fn difference_tensor(d: &Connection, g: &Metric) -> DifferenceTensor {
    DifferenceTensor::Diff {
        a: Box::new(d.clone()),
        b: Box::new(Connection::levi_civita(g)),
    }
}
