//! Charts, fields, metrics, and the pointwise calculus on a single chart.
//!
//! All geometry lives on one chart per fixture; fields are tuples of [`Expr`]
//! coefficient functions. Everything is immutable after construction and
//! evaluation is pure.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::expr::Expr;
use crate::{linalg, Error, Result};

/// Coordinate chart: names, a sampling box, and optional region constraints.
/// A point is admissible when it lies in the box and every constraint
/// expression evaluates to a strictly positive value.
#[derive(Debug, Clone)]
pub struct Chart {
    pub names: Vec<String>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub constraints: Vec<Expr>,
}

impl Chart {
    pub fn new(names: &[&str], lo: &[f64], hi: &[f64]) -> Chart {
        assert_eq!(names.len(), lo.len());
        assert_eq!(names.len(), hi.len());
        Chart {
            names: names.iter().map(|s| s.to_string()).collect(),
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            constraints: Vec::new(),
        }
    }

    pub fn with_constraint(mut self, c: Expr) -> Chart {
        self.constraints.push(c);
        self
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn name_refs(&self) -> Vec<&str> {
        self.names.iter().map(|s| s.as_str()).collect()
    }

    pub fn parse(&self, text: &str) -> Result<Expr> {
        Expr::parse(text, &self.name_refs())
    }

    pub fn admits(&self, p: &[f64]) -> bool {
        self.constraints
            .iter()
            .all(|c| matches!(c.eval(p), Ok(v) if v > 0.0))
    }
}

/// Deterministic point sampler: a seeded ChaCha8 stream, uniform over the
/// chart box, rejecting points that violate the region constraints. The
/// seed is recorded in reports so every sampled sequence is reproducible.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn sample(&mut self, chart: &Chart) -> Result<Vec<f64>> {
        for _ in 0..10_000 {
            let p: Vec<f64> = (0..chart.dim())
                .map(|i| self.rng.gen_range(chart.lo[i]..=chart.hi[i]))
                .collect();
            if chart.admits(&p) {
                return Ok(p);
            }
        }
        Err(Error::Sampling(format!(
            "rejection sampling exhausted on chart {:?}",
            chart.names
        )))
    }

    pub fn sample_many(&mut self, chart: &Chart, count: usize) -> Result<Vec<Vec<f64>>> {
        (0..count).map(|_| self.sample(chart)).collect()
    }

    /// Uniform draw from an interval (for fixture parameters in tests).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..=hi)
    }

    /// Random polynomial of degree <= 2 in the chart coordinates with small
    /// integer-ish coefficients; used to extend frame checks beyond the
    /// declared frame fields.
    pub fn polynomial(&mut self, dim: usize) -> Expr {
        let mut e = Expr::constant((self.rng.gen_range(-4i32..=4)) as f64 * 0.5);
        for i in 0..dim {
            let c1 = self.rng.gen_range(-2i32..=2);
            if c1 != 0 {
                e = e + Expr::constant(f64::from(c1) * 0.5) * Expr::coord(i);
            }
            let c2 = self.rng.gen_range(-1i32..=1);
            if c2 != 0 {
                let j = self.rng.gen_range(0..dim);
                e = e + Expr::constant(f64::from(c2) * 0.25) * Expr::coord(i) * Expr::coord(j);
            }
        }
        e
    }

    pub fn polynomial_field(&mut self, dim: usize) -> VectorField {
        VectorField::new((0..dim).map(|_| self.polynomial(dim)).collect())
    }
}

/// Vector field: one coefficient expression per ambient component. The
/// expressions are functions of whatever chart the field is declared over
/// (the ambient chart for ambient fields, the hypersurface chart for fields
/// along a hypersurface).
#[derive(Debug, Clone)]
pub struct VectorField {
    pub comps: Vec<Expr>,
}

impl VectorField {
    pub fn new(comps: Vec<Expr>) -> VectorField {
        VectorField { comps }
    }

    pub fn zero(n: usize) -> VectorField {
        VectorField {
            comps: vec![Expr::zero(); n],
        }
    }

    /// Constant-coefficient field.
    pub fn constant(v: &[f64]) -> VectorField {
        VectorField {
            comps: v.iter().map(|&c| Expr::constant(c)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn eval(&self, p: &[f64]) -> Result<DVector<f64>> {
        let mut out = DVector::zeros(self.comps.len());
        for (i, c) in self.comps.iter().enumerate() {
            out[i] = c.eval(p)?;
        }
        Ok(out)
    }

    /// Derivative of each component along the coordinate direction seeds:
    /// returns the Jacobian row-block dY^a/du^i as an (n_comps x dim_p) matrix.
    pub fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let mut out = DMatrix::zeros(self.comps.len(), p.len());
        for (a, c) in self.comps.iter().enumerate() {
            let d = c.eval_grad(p)?;
            for (i, g) in d.partials.iter().enumerate() {
                out[(a, i)] = *g;
            }
        }
        Ok(out)
    }

    /// Directional derivative of the components along a numeric direction
    /// in the field's own chart.
    pub fn derive_along(&self, p: &[f64], dir: &[f64]) -> Result<DVector<f64>> {
        let mut out = DVector::zeros(self.comps.len());
        for (a, c) in self.comps.iter().enumerate() {
            out[a] = c.eval_dual(p, dir)?.partials[0];
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Expr) -> VectorField {
        VectorField {
            comps: self.comps.iter().map(|c| s.clone() * c.clone()).collect(),
        }
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        VectorField {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn neg(&self) -> VectorField {
        VectorField {
            comps: self.comps.iter().map(|c| -c.clone()).collect(),
        }
    }
}

/// One-form: one coefficient expression per coordinate covector.
#[derive(Debug, Clone)]
pub struct OneForm {
    pub comps: Vec<Expr>,
}

impl OneForm {
    pub fn new(comps: Vec<Expr>) -> OneForm {
        OneForm { comps }
    }

    pub fn eval(&self, p: &[f64]) -> Result<DVector<f64>> {
        let mut out = DVector::zeros(self.comps.len());
        for (i, c) in self.comps.iter().enumerate() {
            out[i] = c.eval(p)?;
        }
        Ok(out)
    }

    /// Pairing with a vector field, as a symbolic scalar expression.
    pub fn apply_symbolic(&self, v: &VectorField) -> Expr {
        let mut e = Expr::zero();
        for (c, vc) in self.comps.iter().zip(&v.comps) {
            e = e + c.clone() * vc.clone();
        }
        e
    }

    pub fn apply(&self, v: &VectorField, p: &[f64]) -> Result<f64> {
        Ok(self.eval(p)?.dot(&v.eval(p)?))
    }
}

/// Metric values together with the per-entry coordinate gradients.
pub type MetricWithGrads = (DMatrix<f64>, Vec<Vec<f64>>);

/// Metric tensor: symmetric matrix of coefficient expressions with a
/// declared index (number of negative eigenvalues).
#[derive(Debug, Clone)]
pub struct Metric {
    pub n: usize,
    pub entries: Vec<Expr>, // row-major n*n
    pub index: usize,
    cache: crate::cache::PointCache<DMatrix<f64>>,
}

impl Metric {
    pub fn new(n: usize, entries: Vec<Expr>, index: usize) -> Metric {
        assert_eq!(entries.len(), n * n);
        Metric {
            n,
            entries,
            index,
            cache: crate::cache::PointCache::new(),
        }
    }

    pub fn diagonal(signs: &[f64]) -> Metric {
        let n = signs.len();
        let mut entries = vec![Expr::zero(); n * n];
        let mut index = 0;
        for (i, &s) in signs.iter().enumerate() {
            entries[i * n + i] = Expr::constant(s);
            if s < 0.0 {
                index += 1;
            }
        }
        Metric::new(n, entries, index)
    }

    pub fn entry(&self, i: usize, j: usize) -> &Expr {
        &self.entries[i * self.n + j]
    }

    pub fn eval(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.cache.get_or(p, || {
            let mut m = DMatrix::zeros(self.n, self.n);
            for i in 0..self.n {
                for j in 0..self.n {
                    m[(i, j)] = self.entry(i, j).eval(p)?;
                }
            }
            Ok(m)
        })
    }

    /// Values and coordinate gradients of every entry:
    /// `grads[(i,j)][k] = d g_ij / d x^k`.
    pub fn eval_with_grads(&self, p: &[f64]) -> Result<MetricWithGrads> {
        let mut m = DMatrix::zeros(self.n, self.n);
        let mut grads = vec![vec![0.0; self.n]; self.n * self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                let d = self.entry(i, j).eval_grad(p)?;
                m[(i, j)] = d.value;
                grads[i * self.n + j] = d.partials;
            }
        }
        Ok((m, grads))
    }

    pub fn inverse_at(&self, p: &[f64], degen_tol: f64) -> Result<DMatrix<f64>> {
        let g = self.eval(p)?;
        let d = linalg::det(&g);
        if d.abs() < degen_tol {
            return Err(Error::SingularMetric {
                point: p.to_vec(),
                det: d,
                threshold: degen_tol,
            });
        }
        linalg::invert(&g).ok_or_else(|| Error::SingularMetric {
            point: p.to_vec(),
            det: d,
            threshold: degen_tol,
        })
    }

    /// g(X, Y) at p.
    pub fn apply(&self, x: &VectorField, y: &VectorField, p: &[f64]) -> Result<f64> {
        let g = self.eval(p)?;
        Ok((x.eval(p)?.transpose() * g * y.eval(p)?)[(0, 0)])
    }

    /// g(X, Y) as a symbolic scalar expression over the metric's own chart.
    pub fn apply_symbolic(&self, x: &VectorField, y: &VectorField) -> Expr {
        let mut e = Expr::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                let term = self.entry(i, j).clone() * x.comps[i].clone() * y.comps[j].clone();
                e = e + term;
            }
        }
        e
    }

    /// Lowering g(v, .) as a one-form with symbolic components.
    pub fn flat(&self, v: &VectorField) -> OneForm {
        let mut comps = Vec::with_capacity(self.n);
        for j in 0..self.n {
            let mut e = Expr::zero();
            for i in 0..self.n {
                e = e + self.entry(i, j).clone() * v.comps[i].clone();
            }
            comps.push(e);
        }
        OneForm::new(comps)
    }
}

/// (1,1)-tensor field as a matrix of coefficient expressions. Applying it to
/// a vector field is done symbolically so the result can be differentiated.
#[derive(Debug, Clone)]
pub struct Tensor11 {
    pub n: usize,
    pub entries: Vec<Expr>, // row-major: entries[a*n + b] = T^a_b
}

impl Tensor11 {
    pub fn new(n: usize, entries: Vec<Expr>) -> Tensor11 {
        assert_eq!(entries.len(), n * n);
        Tensor11 { n, entries }
    }

    pub fn zero(n: usize) -> Tensor11 {
        Tensor11 {
            n,
            entries: vec![Expr::zero(); n * n],
        }
    }

    pub fn entry(&self, a: usize, b: usize) -> &Expr {
        &self.entries[a * self.n + b]
    }

    pub fn set(&mut self, a: usize, b: usize, e: Expr) {
        self.entries[a * self.n + b] = e;
    }

    pub fn eval(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for a in 0..self.n {
            for b in 0..self.n {
                m[(a, b)] = self.entry(a, b).eval(p)?;
            }
        }
        Ok(m)
    }

    /// T(v) with symbolic components.
    pub fn apply(&self, v: &VectorField) -> VectorField {
        let mut comps = Vec::with_capacity(self.n);
        for a in 0..self.n {
            let mut e = Expr::zero();
            for b in 0..self.n {
                e = e + self.entry(a, b).clone() * v.comps[b].clone();
            }
            comps.push(e);
        }
        VectorField::new(comps)
    }
}

/// X(s) at p: the derivative of the scalar field `s` along the vector field
/// `X`, both expressed over the same chart.
pub fn directional_derivative(x: &VectorField, s: &Expr, p: &[f64]) -> Result<f64> {
    let dir = x.eval(p)?;
    Ok(s.eval_dual(p, dir.as_slice())?.partials[0])
}

/// Lie bracket [X, Y]^k = X^i dY^k/dx^i - Y^i dX^k/dx^i at p.
pub fn lie_bracket(x: &VectorField, y: &VectorField, p: &[f64]) -> Result<DVector<f64>> {
    let xv = x.eval(p)?;
    let yv = y.eval(p)?;
    let dy = y.derive_along(p, xv.as_slice())?;
    let dx = x.derive_along(p, yv.as_slice())?;
    Ok(dy - dx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart4() -> Chart {
        Chart::new(
            &["x0", "x1", "x2", "x3"],
            &[-1.0, -1.0, -1.4, -1.4],
            &[1.0, 1.0, 1.4, 1.4],
        )
    }

    fn graph_xi(chart: &Chart) -> VectorField {
        let f = chart.parse("sqrt(x2^2 + x3^2)").unwrap();
        VectorField::new(vec![
            f.clone(),
            -f,
            chart.parse("sqrt(2)*x2").unwrap(),
            chart.parse("sqrt(2)*x3").unwrap(),
        ])
    }

    #[test]
    fn directional_derivative_of_radius_along_radical() {
        // xi(f) = sqrt(2) f; at x2=1, x3=0 this is sqrt(2)
        let chart = chart4();
        let f = chart.parse("sqrt(x2^2 + x3^2)").unwrap();
        let xi = graph_xi(&chart);
        let p = [0.3, -0.2, 1.0, 0.0];
        let v = directional_derivative(&xi, &f, &p).unwrap();
        assert!((v - std::f64::consts::SQRT_2).abs() < 1e-12);
        // generic point: xi(f) = sqrt(2) f
        let p = [0.1, 0.4, 0.7, -0.5];
        let v = directional_derivative(&xi, &f, &p).unwrap();
        let fv = f.eval(&p).unwrap();
        assert!((v - std::f64::consts::SQRT_2 * fv).abs() < 1e-12);
    }

    #[test]
    fn directional_derivative_trivials() {
        let chart = chart4();
        let constant = chart.parse("7").unwrap();
        let any = VectorField::constant(&[1.0, -2.0, 0.5, 3.0]);
        assert_eq!(
            directional_derivative(&any, &constant, &[0.1, 0.2, 0.3, 0.4]).unwrap(),
            0.0
        );
        let z = chart.parse("x3").unwrap();
        let dz = VectorField::constant(&[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(directional_derivative(&dz, &z, &[0.0, 0.0, 0.5, 0.5]).unwrap(), 1.0);
    }

    #[test]
    fn lie_bracket_examples() {
        let chart = chart4();
        let p = [0.3, 0.7, -0.4, 0.9];
        // coordinate fields commute
        let e1 = VectorField::constant(&[0.0, 1.0, 0.0, 0.0]);
        let e2 = VectorField::constant(&[0.0, 0.0, 1.0, 0.0]);
        assert!(lie_bracket(&e1, &e2, &p).unwrap().norm() < 1e-15);
        // [X, X] = 0 for a non-constant field
        let x = VectorField::new(vec![
            chart.parse("x1*x2").unwrap(),
            chart.parse("x0 - x3^2").unwrap(),
            chart.parse("1").unwrap(),
            chart.parse("x0*x1*x2").unwrap(),
        ]);
        assert!(lie_bracket(&x, &x, &p).unwrap().norm() < 1e-12);
        // [x1 d2, d1] = -d2
        let a = VectorField::new(vec![
            Expr::zero(),
            Expr::zero(),
            chart.parse("x1").unwrap(),
            Expr::zero(),
        ]);
        let b = VectorField::constant(&[0.0, 1.0, 0.0, 0.0]);
        let br = lie_bracket(&a, &b, &p).unwrap();
        assert!((br[2] + 1.0).abs() < 1e-12);
        assert!(br[0].abs() + br[1].abs() + br[3].abs() < 1e-12);
    }

    #[test]
    fn lie_bracket_antisymmetry_and_jacobi() {
        let chart = chart4();
        let mut s = Sampler::new(11);
        for _ in 0..5 {
            let x = s.polynomial_field(4);
            let y = s.polynomial_field(4);
            let z = s.polynomial_field(4);
            let p = s.sample(&chart).unwrap();
            let xy = lie_bracket(&x, &y, &p).unwrap();
            let yx = lie_bracket(&y, &x, &p).unwrap();
            assert!((xy.clone() + yx).norm() < 1e-8);
            // Jacobi: [[x,y],z] + [[y,z],x] + [[z,x],y] = 0. The outer
            // bracket needs d_i [x,y]^k, a second derivative of the inputs;
            // take central differences of the exact inner bracket (AD), which
            // keeps the error at O(h^2).
            let h = 1e-5;
            let outer = |a: &VectorField, b: &VectorField, c: &VectorField, p: &[f64]| {
                let ab = lie_bracket(a, b, p).unwrap();
                let cv = c.eval(p).unwrap();
                // term1: [a,b]^i d_i c^k  (exact via AD)
                let t1 = c.derive_along(p, ab.as_slice()).unwrap();
                // term2: c^i d_i [a,b]^k (FD of the AD bracket)
                let mut t2 = DVector::zeros(4);
                for i in 0..4 {
                    let mut pp = p.to_vec();
                    let mut pm = p.to_vec();
                    pp[i] += h;
                    pm[i] -= h;
                    let fp = lie_bracket(a, b, &pp).unwrap();
                    let fm = lie_bracket(a, b, &pm).unwrap();
                    t2 += cv[i] * (fp - fm) / (2.0 * h);
                }
                t1 - t2
            };
            let j = outer(&x, &y, &z, &p) + outer(&y, &z, &x, &p) + outer(&z, &x, &y, &p);
            assert!(j.norm() < 1e-8, "jacobi residual {}", j.norm());
        }
    }

    #[test]
    fn metric_apply_on_graph_frame() {
        let chart = chart4();
        let g = Metric::diagonal(&[-1.0, -1.0, 1.0, 1.0]);
        let xi = graph_xi(&chart);
        // N = (1/(4 f^2)) * ( -f d0 + f d1 + sqrt2 x2 d2 + sqrt2 x3 d3 )
        let nf = VectorField::new(vec![
            chart.parse("-1/(4*sqrt(x2^2+x3^2))").unwrap(),
            chart.parse("1/(4*sqrt(x2^2+x3^2))").unwrap(),
            chart.parse("sqrt(2)*x2/(4*(x2^2+x3^2))").unwrap(),
            chart.parse("sqrt(2)*x3/(4*(x2^2+x3^2))").unwrap(),
        ]);
        // image of hypersurface point (0,1,0): ambient (sqrt2, 0, 1, 0)
        let p = [std::f64::consts::SQRT_2, 0.0, 1.0, 0.0];
        assert!(g.apply(&xi, &xi, &p).unwrap().abs() < 1e-12);
        assert!((g.apply(&xi, &nf, &p).unwrap() - 1.0).abs() < 1e-12);
        let zero = VectorField::zero(4);
        assert_eq!(g.apply(&zero, &xi, &p).unwrap(), 0.0);
    }

    #[test]
    fn metric_bilinearity_and_symmetry() {
        let chart = chart4();
        let g = Metric::diagonal(&[-1.0, -1.0, 1.0, 1.0]);
        let mut s = Sampler::new(5);
        for _ in 0..20 {
            let x = s.polynomial_field(4);
            let y = s.polynomial_field(4);
            let z = s.polynomial_field(4);
            let p = s.sample(&chart).unwrap();
            let sym = g.apply(&x, &y, &p).unwrap() - g.apply(&y, &x, &p).unwrap();
            assert!(sym.abs() < 1e-12);
            let lin = g.apply(&x.add(&z), &y, &p).unwrap()
                - g.apply(&x, &y, &p).unwrap()
                - g.apply(&z, &y, &p).unwrap();
            assert!(lin.abs() < 1e-12);
        }
    }

    #[test]
    fn symbolic_metric_apply_matches_numeric() {
        let chart = chart4();
        let g = Metric::diagonal(&[-1.0, -1.0, 1.0, 1.0]);
        let mut s = Sampler::new(9);
        let x = s.polynomial_field(4);
        let y = s.polynomial_field(4);
        let e = g.apply_symbolic(&x, &y);
        for _ in 0..10 {
            let p = s.sample(&chart).unwrap();
            assert!((e.eval(&p).unwrap() - g.apply(&x, &y, &p).unwrap()).abs() < 1e-12);
        }
    }
}
