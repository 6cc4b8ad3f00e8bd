//! Lightlike hypersurface pipeline.
//!
//! A [`Hypersurface`] is a parametrized immersion into the ambient chart
//! together with analytically declared frame data: the radical generator xi,
//! the lightlike transversal N, a screen frame, and optionally a
//! distinguished tangent field nu. Fields along the hypersurface are
//! expressed over hypersurface coordinates with ambient components; ambient
//! connection coefficients are pulled back by evaluating at the image point,
//! and all derivatives of hypersurface fields are taken in hypersurface
//! coordinates with dual numbers.
//!
//! The per-point numeric constructions ([`Hypersurface::radical`],
//! [`Hypersurface::solve_transversal`]) exist to validate the declared
//! closed forms, not to replace them: operations that differentiate xi or N
//! always use the declared expressions.

use nalgebra::{DMatrix, DVector};

use crate::connection::Connection;
use crate::expr::Expr;
use crate::geometry::{Chart, Metric, Sampler, VectorField};
use crate::report::{pinned, CheckRow, RowBuilder, RunConfig};
use crate::{linalg, Error, Result};

#[derive(Debug, Clone)]
pub struct Hypersurface {
    /// Hypersurface chart (m+1 coordinates plus sampling box).
    pub chart: Chart,
    /// Immersion: one ambient coordinate expression per ambient dimension,
    /// over the hypersurface chart.
    pub param: Vec<Expr>,
    /// Radical generator, ambient components over hypersurface coordinates.
    pub xi: VectorField,
    /// Lightlike transversal N.
    pub transversal: VectorField,
    /// Screen frame fields.
    pub screen: Vec<VectorField>,
    /// Index into `screen` of the structure field nu, when declared.
    pub nu_index: Option<usize>,
    point_cache: crate::cache::PointCache<Vec<f64>>,
    jacobian_cache: crate::cache::PointCache<DMatrix<f64>>,
}

impl Hypersurface {
    pub fn new(
        chart: Chart,
        param: Vec<Expr>,
        xi: VectorField,
        transversal: VectorField,
        screen: Vec<VectorField>,
        nu_index: Option<usize>,
    ) -> Hypersurface {
        Hypersurface {
            chart,
            param,
            xi,
            transversal,
            screen,
            nu_index,
            point_cache: crate::cache::PointCache::new(),
            jacobian_cache: crate::cache::PointCache::new(),
        }
    }
}

impl Hypersurface {
    pub fn ambient_dim(&self) -> usize {
        self.param.len()
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn nu(&self) -> Option<&VectorField> {
        self.nu_index.map(|i| &self.screen[i])
    }

    /// Tangent frame in declaration order: xi first, then the screen.
    pub fn tangent_frame(&self) -> Vec<VectorField> {
        let mut f = vec![self.xi.clone()];
        f.extend(self.screen.iter().cloned());
        f
    }

    pub fn ambient_point(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.point_cache
            .get_or(u, || self.param.iter().map(|e| e.eval(u)).collect())
    }

    /// Jacobian of the immersion, (ambient_dim x dim), exact via AD.
    pub fn jacobian(&self, u: &[f64]) -> Result<DMatrix<f64>> {
        self.jacobian_cache.get_or(u, || {
            let mut j = DMatrix::zeros(self.ambient_dim(), self.dim());
            for (a, e) in self.param.iter().enumerate() {
                let d = e.eval_grad(u)?;
                for i in 0..self.dim() {
                    j[(a, i)] = d.partials[i];
                }
            }
            Ok(j)
        })
    }

    /// Coordinates of an ambient vector in the immersion basis, with the
    /// least-squares residual (nonzero means the vector is not tangent).
    pub fn pushforward_coords(&self, u: &[f64], v: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
        let j = self.jacobian(u)?;
        Ok(linalg::lstsq(&j, v))
    }

    /// Pull an ambient-chart scalar back to the hypersurface chart.
    pub fn pullback(&self, ambient_expr: &Expr) -> Expr {
        ambient_expr.substitute(&self.param)
    }

    /// g(Y, Z) composed with the immersion, as a symbolic scalar over the
    /// hypersurface chart. Y, Z are fields along the hypersurface.
    pub fn metric_scalar(&self, g: &Metric, y: &VectorField, z: &VectorField) -> Expr {
        let mut e = Expr::zero();
        for a in 0..g.n {
            for b in 0..g.n {
                let gab = self.pullback(g.entry(a, b));
                e = e + gab * y.comps[a].clone() * z.comps[b].clone();
            }
        }
        e
    }

    /// theta(Y) = g(Y, N) as a symbolic scalar over the hypersurface chart.
    pub fn theta_scalar(&self, g: &Metric, y: &VectorField) -> Expr {
        self.metric_scalar(g, y, &self.transversal)
    }

    /// Screen projection P(Y) = Y - theta(Y) xi as a symbolic field.
    pub fn project_screen(&self, g: &Metric, y: &VectorField) -> VectorField {
        let theta = self.theta_scalar(g, y);
        y.sub(&self.xi.scale(&theta))
    }

    /// X(s) for a hypersurface scalar s: the pushforward coordinates of X
    /// seed the dual-number derivative over hypersurface coordinates.
    pub fn derive_scalar(&self, x: &VectorField, s: &Expr, u: &[f64]) -> Result<f64> {
        let xv = x.eval(u)?;
        let (xhat, _) = self.pushforward_coords(u, &xv)?;
        Ok(s.eval_dual(u, xhat.as_slice())?.partials[0])
    }

    /// Lie bracket of two tangent fields, ambient components:
    /// [X,Y]^a = Xhat(Y^a) - Yhat(X^a).
    pub fn bracket(&self, x: &VectorField, y: &VectorField, u: &[f64]) -> Result<DVector<f64>> {
        let xv = x.eval(u)?;
        let yv = y.eval(u)?;
        let (xhat, _) = self.pushforward_coords(u, &xv)?;
        let (yhat, _) = self.pushforward_coords(u, &yv)?;
        let dy = y.derive_along(u, xhat.as_slice())?;
        let dx = x.derive_along(u, yhat.as_slice())?;
        Ok(dy - dx)
    }

    /// Ambient covariant derivative along the hypersurface:
    /// (D_X Y)^a = Xhat(Y^a) + Gamma^a_bc(psi(u)) X^b Y^c.
    pub fn ambient_derivative(
        &self,
        conn: &Connection,
        x: &VectorField,
        y: &VectorField,
        u: &[f64],
    ) -> Result<DVector<f64>> {
        let p = self.ambient_point(u)?;
        let xv = x.eval(u)?;
        let (xhat, _) = self.pushforward_coords(u, &xv)?;
        let dy = y.derive_along(u, xhat.as_slice())?;
        Ok(dy + conn.coeffs(&p)?.contract(&xv, &y.eval(u)?))
    }

    /// Gram matrix of the tangent frame: the induced metric at u.
    pub fn induced_metric(&self, g: &Metric, u: &[f64]) -> Result<DMatrix<f64>> {
        let p = self.ambient_point(u)?;
        let gm = g.eval(&p)?;
        let frame = self.tangent_frame();
        let m = frame.len();
        let mut gram = DMatrix::zeros(m, m);
        let vals: Vec<DVector<f64>> = frame.iter().map(|f| f.eval(u)).collect::<Result<_>>()?;
        for i in 0..m {
            for j in 0..m {
                gram[(i, j)] = (vals[i].transpose() * &gm * &vals[j])[(0, 0)];
            }
        }
        Ok(gram)
    }

    /// Nullspace generator of the induced metric at u, in ambient
    /// components. The rank deficiency must be exactly one. The generator is
    /// scaled so that g(generator, N) = 1 against the declared transversal,
    /// or to unit coordinate norm with its first nonzero coordinate positive
    /// when no transversal is declared.
    pub fn radical(&self, g: &Metric, u: &[f64], degen_tol: f64) -> Result<DVector<f64>> {
        let gram = self.induced_metric(g, u)?;
        let sv = linalg::singular_values(&gram);
        let scale = sv[0].max(1.0);
        let deficiency = sv.iter().filter(|&&s| s < degen_tol * scale).count();
        if deficiency == 0 {
            return Err(Error::NotLightlike {
                point: u.to_vec(),
                singular_values: sv,
            });
        }
        if deficiency > 1 {
            return Err(Error::DegeneracyTooHigh {
                deficiency,
                point: u.to_vec(),
                singular_values: sv,
            });
        }
        let coeffs = linalg::nullspace_vector(&gram);
        let frame = self.tangent_frame();
        let mut gen = DVector::zeros(self.ambient_dim());
        for (c, f) in coeffs.iter().zip(&frame) {
            gen += *c * f.eval(u)?;
        }
        // orientation and scale
        let p = self.ambient_point(u)?;
        let gm = g.eval(&p)?;
        let nv = self.transversal.eval(u)?;
        let pairing = (gen.transpose() * &gm * &nv)[(0, 0)];
        if pairing.abs() > 1e-14 {
            gen /= pairing;
        } else {
            gen /= gen.norm();
            if let Some(first) = gen.iter().find(|v| v.abs() > 1e-12) {
                if *first < 0.0 {
                    gen = -gen;
                }
            }
        }
        Ok(gen)
    }

    /// Solve for the unique transversal at u: g(N, W_a) = 0, g(N, xi) = 1,
    /// g(N, N) = 0, given the declared xi and screen. The linear conditions
    /// leave a one-parameter family N0 + t xi; the null normalization fixes
    /// t by a quadratic whose leading coefficient g(xi, xi) vanishes on a
    /// lightlike hypersurface.
    pub fn solve_transversal(&self, g: &Metric, u: &[f64], degen_tol: f64) -> Result<DVector<f64>> {
        let p = self.ambient_point(u)?;
        let gm = g.eval(&p)?;
        let n = self.ambient_dim();
        // screen Gram must be nondegenerate
        let m = self.screen.len();
        let mut sg = DMatrix::zeros(m, m);
        let svals: Vec<DVector<f64>> = self.screen.iter().map(|w| w.eval(u)).collect::<Result<_>>()?;
        for i in 0..m {
            for j in 0..m {
                sg[(i, j)] = (svals[i].transpose() * &gm * &svals[j])[(0, 0)];
            }
        }
        let sdet = linalg::det(&sg);
        if sdet.abs() < degen_tol {
            return Err(Error::SingularScreen {
                point: u.to_vec(),
                det: sdet,
            });
        }
        let xiv = self.xi.eval(u)?;
        let mut a = DMatrix::zeros(m + 1, n);
        let mut rhs = DVector::zeros(m + 1);
        for (i, w) in svals.iter().enumerate() {
            let row = (w.transpose() * &gm).transpose();
            for c in 0..n {
                a[(i, c)] = row[c];
            }
        }
        let xrow = (xiv.transpose() * &gm).transpose();
        for c in 0..n {
            a[(m, c)] = xrow[c];
        }
        rhs[m] = 1.0;
        let n0 = linalg::min_norm_solution(&a, &rhs).ok_or_else(|| Error::SingularScreen {
            point: u.to_vec(),
            det: sdet,
        })?;
        // family N0 + t xi; normalize g(N,N) = 0
        let qa = (xiv.transpose() * &gm * &xiv)[(0, 0)];
        let qb = 2.0 * (n0.transpose() * &gm * &xiv)[(0, 0)];
        let qc = (n0.transpose() * &gm * &n0)[(0, 0)];
        let t = if qa.abs() < 1e-12 {
            -qc / qb
        } else {
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                return Err(Error::TransversalQuadratic {
                    point: u.to_vec(),
                    a: qa,
                    b: qb,
                    c: qc,
                });
            }
            // root closest to the degenerate solution -c/b
            let r1 = (-qb + disc.sqrt()) / (2.0 * qa);
            let r2 = (-qb - disc.sqrt()) / (2.0 * qa);
            let lin = -qc / qb;
            if (r1 - lin).abs() < (r2 - lin).abs() {
                r1
            } else {
                r2
            }
        };
        Ok(n0 + t * xiv)
    }
}

/// Gauss and Weingarten data for one ambient connection on a hypersurface.
/// `theta(v) = g(v, N)` evaluates against the declared transversal.
pub struct InducedObjects<'a> {
    pub hyp: &'a Hypersurface,
    pub g: &'a Metric,
    pub conn: &'a Connection,
}

impl<'a> InducedObjects<'a> {
    pub fn new(hyp: &'a Hypersurface, g: &'a Metric, conn: &'a Connection) -> Self {
        InducedObjects { hyp, g, conn }
    }

    fn gm(&self, u: &[f64]) -> Result<DMatrix<f64>> {
        let p = self.hyp.ambient_point(u)?;
        self.g.eval(&p)
    }

    /// Ambient pairing g(v, w) for numeric vectors at u.
    pub fn pair(&self, u: &[f64], v: &DVector<f64>, w: &DVector<f64>) -> Result<f64> {
        Ok((v.transpose() * self.gm(u)? * w)[(0, 0)])
    }

    pub fn theta_of(&self, u: &[f64], v: &DVector<f64>) -> Result<f64> {
        let nv = self.hyp.transversal.eval(u)?;
        self.pair(u, v, &nv)
    }

    /// Screen projection of a numeric tangent vector: v - theta(v) xi.
    pub fn project(&self, u: &[f64], v: &DVector<f64>) -> Result<DVector<f64>> {
        let t = self.theta_of(u, v)?;
        Ok(v - t * self.hyp.xi.eval(u)?)
    }

    /// B(X, Y) = g(D_X Y, xi).
    pub fn b_form(&self, x: &VectorField, y: &VectorField, u: &[f64]) -> Result<f64> {
        let d = self.hyp.ambient_derivative(self.conn, x, y, u)?;
        let xiv = self.hyp.xi.eval(u)?;
        self.pair(u, &d, &xiv)
    }

    /// Gauss decomposition D_X Y = (tangent part) + B(X,Y) N. Returns the
    /// tangent part, the B value, and the tangency residual of the tangent
    /// part against the immersion.
    pub fn gauss(
        &self,
        x: &VectorField,
        y: &VectorField,
        u: &[f64],
    ) -> Result<(DVector<f64>, f64, f64)> {
        let d = self.hyp.ambient_derivative(self.conn, x, y, u)?;
        let xiv = self.hyp.xi.eval(u)?;
        let b = self.pair(u, &d, &xiv)?;
        let tangent = &d - b * self.hyp.transversal.eval(u)?;
        let (_, res) = self.hyp.pushforward_coords(u, &tangent)?;
        Ok((tangent, b, res))
    }

    /// Induced connection value D_X Y (the tangent part), with the
    /// decomposition-failure check.
    pub fn induced(&self, x: &VectorField, y: &VectorField, u: &[f64]) -> Result<DVector<f64>> {
        let (tangent, _, res) = self.gauss(x, y, u)?;
        if res > 1e-6 {
            return Err(Error::Decomposition {
                message: "Gauss tangent part is not tangent; fixture frames are inconsistent".into(),
                residual: res,
                point: u.to_vec(),
            });
        }
        Ok(tangent)
    }

    /// Weingarten decomposition D_X N = -A_N X + tau(X) N. Returns A_N X,
    /// tau(X), and the tangency residual of A_N X.
    pub fn weingarten(&self, x: &VectorField, u: &[f64]) -> Result<(DVector<f64>, f64, f64)> {
        let d = self.hyp.ambient_derivative(self.conn, x, &self.hyp.transversal, u)?;
        let xiv = self.hyp.xi.eval(u)?;
        let tau = self.pair(u, &d, &xiv)?;
        let a_n = -(&d - tau * self.hyp.transversal.eval(u)?);
        let (_, res) = self.hyp.pushforward_coords(u, &a_n)?;
        Ok((a_n, tau, res))
    }

    /// Screen decomposition of D_X PY: the screen part and the screen
    /// fundamental form value C(X, PY) = theta(D_X PY).
    pub fn screen_decompose(
        &self,
        x: &VectorField,
        py: &VectorField,
        u: &[f64],
    ) -> Result<(DVector<f64>, f64)> {
        let d = self.induced(x, py, u)?;
        let c = self.theta_of(u, &d)?;
        let screen_part = self.project(u, &d)?;
        Ok((screen_part, c))
    }

    /// Radical decomposition of D_X xi = -Abar_xi X - tau(X) xi: the screen
    /// shape operator value and the radical connection form.
    pub fn radical_decompose(&self, x: &VectorField, u: &[f64]) -> Result<(DVector<f64>, f64)> {
        let d = self.induced(x, &self.hyp.xi, u)?;
        let abar = -self.project(u, &d)?;
        let tau = -self.theta_of(u, &d)?;
        Ok((abar, tau))
    }
}

/// Tangent field arguments for the hypersurface suites: the declared frame
/// plus random polynomial combinations of it (combinations keep tangency).
pub fn tangent_fields(hyp: &Hypersurface, sampler: &mut Sampler, extra: usize) -> Vec<VectorField> {
    let mut fields = hyp.tangent_frame();
    let frame = hyp.tangent_frame();
    let dim = hyp.dim();
    for _ in 0..extra {
        let mut f = VectorField::zero(hyp.ambient_dim());
        for base in &frame {
            f = f.add(&base.scale(&sampler.polynomial(dim)));
        }
        fields.push(f);
    }
    fields
}

/// Frame-validation rows shared by the hypersurface suites: tangency and
/// independence of the declared frame, the null/orthogonality conditions on
/// xi and N, the numeric radical and transversal against the declared ones,
/// and the screen Gram nondegeneracy.
pub fn frame_rows(
    hyp: &Hypersurface,
    g: &Metric,
    cfg: &RunConfig,
    prefix: &str,
) -> Result<Vec<CheckRow>> {
    let mut sampler = Sampler::new(cfg.seed);
    let points = sampler.sample_many(&hyp.chart, cfg.points)?;

    let id = |suffix: &str| format!("{prefix}.{suffix}");
    let mut tangency = RowBuilder::new(&id("frame-tangency"), "frame fields are pushforwards", pinned::TANGENCY);
    let mut independence = RowBuilder::new(
        &id("frame-independent"),
        "smallest singular value of frame matrix > 1e-8",
        0.5,
    );
    let mut rank = RowBuilder::new(
        &id("rank-deficiency-one"),
        "induced metric has rank deficiency exactly 1",
        0.5,
    );
    let mut gram_null = RowBuilder::new(
        &id("gram-smallest-sv"),
        "smallest singular value of the induced metric",
        cfg.degen_tol,
    )
    .report_only();
    let mut collinear = RowBuilder::new(
        &id("radical-collinear"),
        "numeric radical generator is collinear with declared xi",
        pinned::TANGENCY,
    );
    let mut n_match = RowBuilder::new(
        &id("transversal-match"),
        "solved N equals declared N",
        pinned::TANGENCY,
    );
    let mut xi_null = RowBuilder::new(&id("xi-null"), "g(xi, xi) = 0", pinned::FRAME_CONDITIONS);
    let mut xi_screen = RowBuilder::new(&id("xi-screen-orth"), "g(xi, W_a) = 0", pinned::FRAME_CONDITIONS);
    let mut n_null = RowBuilder::new(&id("n-null"), "g(N, N) = 0", pinned::FRAME_CONDITIONS);
    let mut n_xi = RowBuilder::new(&id("n-xi-one"), "g(xi, N) = 1", pinned::FRAME_CONDITIONS);
    let mut n_screen = RowBuilder::new(&id("n-screen-orth"), "g(N, W_a) = 0", pinned::FRAME_CONDITIONS);
    let mut screen_det = RowBuilder::new(
        &id("screen-nondegenerate"),
        "|det screen Gram| > degeneracy threshold",
        0.5,
    );

    for u in &points {
        let p = hyp.ambient_point(u)?;
        let gm = g.eval(&p)?;
        let xiv = hyp.xi.eval(u)?;
        let nv = hyp.transversal.eval(u)?;
        let j = hyp.jacobian(u)?;
        // tangency of the declared tangent frame
        let frame = hyp.tangent_frame();
        let mut frame_mat = DMatrix::zeros(hyp.ambient_dim(), frame.len());
        for (i, f) in frame.iter().enumerate() {
            let v = f.eval(u)?;
            let (_, res) = linalg::lstsq(&j, &v);
            tangency.record(res / v.norm().max(1.0), u);
            frame_mat.set_column(i, &v);
        }
        let sv = linalg::singular_values(&frame_mat);
        independence.record(if sv[sv.len() - 1] > 1e-8 { 0.0 } else { 1.0 }, u);

        match hyp.radical(g, u, cfg.degen_tol) {
            Ok(gen) => {
                // sine of the angle between gen and xi
                let cross = &gen / gen.norm() - (gen.dot(&xiv) / (gen.norm() * xiv.norm_squared())) * &xiv;
                collinear.record(cross.norm(), u);
                rank.record(0.0, u);
            }
            Err(_) => rank.record(1.0, u),
        }
        let gram = hyp.induced_metric(g, u)?;
        let gsv = linalg::singular_values(&gram);
        gram_null.record(gsv[gsv.len() - 1], u);

        let solved = hyp.solve_transversal(g, u, cfg.degen_tol)?;
        n_match.record((&solved - &nv).norm(), u);

        xi_null.record((xiv.transpose() * &gm * &xiv)[(0, 0)], u);
        n_null.record((nv.transpose() * &gm * &nv)[(0, 0)], u);
        n_xi.record((xiv.transpose() * &gm * &nv)[(0, 0)] - 1.0, u);

        let m = hyp.screen.len();
        let mut sg = DMatrix::zeros(m, m);
        for (i, w) in hyp.screen.iter().enumerate() {
            let wv = w.eval(u)?;
            xi_screen.record((xiv.transpose() * &gm * &wv)[(0, 0)], u);
            n_screen.record((nv.transpose() * &gm * &wv)[(0, 0)], u);
            for (jj, w2) in hyp.screen.iter().enumerate() {
                sg[(i, jj)] = (wv.transpose() * &gm * w2.eval(u)?)[(0, 0)];
            }
        }
        screen_det.record(
            if linalg::det(&sg).abs() > cfg.degen_tol {
                0.0
            } else {
                1.0
            },
            u,
        );
    }

    Ok(vec![
        tangency.finish(),
        independence.finish(),
        rank.finish(),
        gram_null.finish(),
        collinear.finish(),
        n_match.finish(),
        xi_null.finish(),
        xi_screen.finish(),
        n_null.finish(),
        n_xi.finish(),
        n_screen.finish(),
        screen_det.finish(),
    ])
}

/// Screen/radical identity rows for the Levi-Civita connection of the
/// ambient metric: the non-metric defect of the induced connection, the
/// screen shape operator against B, and the vanishing rows for B(X, xi),
/// theta-components of the shape operators, and A*_xi xi.
pub fn section2_rows(hyp: &Hypersurface, g: &Metric, cfg: &RunConfig) -> Result<Vec<CheckRow>> {
    let lc = Connection::levi_civita(g);
    let ind = InducedObjects::new(hyp, g, &lc);
    let mut sampler = Sampler::new(cfg.seed ^ 0x22);
    let points = sampler.sample_many(&hyp.chart, cfg.points)?;
    let fields = tangent_fields(hyp, &mut sampler, 2);

    let mut reassembly_g = RowBuilder::new(
        "s2.gauss-reassembly",
        "D_X Y = tangent + B(X,Y) N reassembles",
        pinned::REASSEMBLY,
    );
    let mut reassembly_w = RowBuilder::new(
        "s2.weingarten-reassembly",
        "D_X N = -A_N X + tau(X) N reassembles",
        pinned::REASSEMBLY,
    );
    let mut nonmetric = RowBuilder::new(
        "s2.induced-non-metric",
        "(nabla_X g)(Y,Z) = B(X,Y) theta(Z) + B(X,Z) theta(Y)",
        cfg.tol,
    );
    let mut shape_vs_b = RowBuilder::new("s2.shape-vs-b", "g(A*_xi X, W) = B(X, W)", cfg.tol);
    let mut b_xi = RowBuilder::new("s2.b-xi-zero", "B(X, xi) = 0", pinned::REASSEMBLY);
    let mut shape_theta = RowBuilder::new("s2.shape-screen-theta", "g(A*_xi X, N) = 0", pinned::REASSEMBLY);
    let mut an_theta = RowBuilder::new("s2.weingarten-theta", "g(A_N X, N) = 0", pinned::REASSEMBLY);
    let mut axixi = RowBuilder::new("s2.shape-xi-zero", "A*_xi xi = 0", pinned::REASSEMBLY);
    let mut tau_cross = RowBuilder::new(
        "s2.tau-consistency",
        "tau from Weingarten = -theta(nabla_X xi)",
        pinned::REASSEMBLY,
    );

    for u in &points {
        let nv = hyp.transversal.eval(u)?;
        let (a_xi_xi, _) = ind.radical_decompose(&hyp.xi, u)?;
        axixi.record(a_xi_xi.norm(), u);
        for x in &fields {
            let (a_n, tau, wres) = ind.weingarten(x, u)?;
            reassembly_w.record(wres, u);
            an_theta.record(ind.pair(u, &a_n, &nv)?, u);
            let (abar, tau_r) = ind.radical_decompose(x, u)?;
            tau_cross.record(tau - tau_r, u);
            shape_theta.record(ind.pair(u, &abar, &nv)?, u);
            b_xi.record(ind.b_form(x, &hyp.xi, u)?, u);
            for w in &hyp.screen {
                let wv = w.eval(u)?;
                shape_vs_b.record(ind.pair(u, &abar, &wv)? - ind.b_form(x, w, u)?, u);
            }
            for y in &fields {
                // the transversal split is exact by construction; the content
                // of the reassembly check is that the tangent part is tangent
                let (_, _, gres) = ind.gauss(x, y, u)?;
                reassembly_g.record(gres, u);
                for z in fields.iter().take(4) {
                    // (nabla_X g)(Y,Z) with the induced connection
                    let gyz = hyp.metric_scalar(g, y, z);
                    let xg = hyp.derive_scalar(x, &gyz, u)?;
                    let dxy = ind.induced(x, y, u)?;
                    let dxz = ind.induced(x, z, u)?;
                    let defect = xg - ind.pair(u, &dxy, &z.eval(u)?)? - ind.pair(u, &y.eval(u)?, &dxz)?;
                    let by = ind.b_form(x, y, u)?;
                    let bz = ind.b_form(x, z, u)?;
                    let ty = ind.theta_of(u, &y.eval(u)?)?;
                    let tz = ind.theta_of(u, &z.eval(u)?)?;
                    nonmetric.record(defect - by * tz - bz * ty, u);
                }
            }
        }
    }

    let mut rows = frame_rows(hyp, g, cfg, "s2")?;
    rows.extend([
        reassembly_g.finish(),
        reassembly_w.finish(),
        nonmetric.finish(),
        shape_vs_b.finish(),
        b_xi.finish(),
        shape_theta.finish(),
        an_theta.finish(),
        axixi.finish(),
        tau_cross.finish(),
    ]);
    Ok(rows)
}

/// A worked-example reproduction row: an expected covariant derivative value
/// on specific frame fields, checked at every sampled point.
pub struct Reproduction {
    pub id: String,
    pub reference: String,
    pub conn: Connection,
    pub x: VectorField,
    pub y: VectorField,
    pub expected: VectorField,
}

/// Dual-pair identity rows on the hypersurface. `d` is the fixture primal
/// connection; the starred connection is its computed metric dual.
pub fn section3_rows(
    hyp: &Hypersurface,
    g: &Metric,
    d: &Connection,
    reproductions: &[Reproduction],
    cfg: &RunConfig,
) -> Result<Vec<CheckRow>> {
    let dstar = Connection::dual(d, g);
    let primal = InducedObjects::new(hyp, g, d);
    let dual = InducedObjects::new(hyp, g, &dstar);
    let mut sampler = Sampler::new(cfg.seed ^ 0x33);
    let points = sampler.sample_many(&hyp.chart, cfg.points)?;
    let fields = tangent_fields(hyp, &mut sampler, 2);

    let mut reassembly_p = RowBuilder::new(
        "s3.gauss-reassembly-primal",
        "D_X Y decomposes tangentially",
        pinned::REASSEMBLY,
    );
    let mut reassembly_d = RowBuilder::new(
        "s3.gauss-reassembly-dual",
        "D*_X Y decomposes tangentially",
        pinned::REASSEMBLY,
    );
    let mut b_sym = RowBuilder::new("s3.b-symmetric", "B(X,Y) = B(Y,X)", pinned::REASSEMBLY);
    let mut bstar_sym = RowBuilder::new("s3.bstar-symmetric", "B*(X,Y) = B*(Y,X)", pinned::REASSEMBLY);
    let mut dual_defect = RowBuilder::new(
        "s3.dual-defect-induced",
        "X g(Y,Z) - g(D_X Y, Z) - g(Y, D*_X Z) (induced pair need not be dual)",
        cfg.tol,
    )
    .report_only();
    let mut gauss_metric = RowBuilder::new(
        "s3.gauss-metric",
        "X g(Y,Z) = g(D_X Y,Z) + g(Y,D*_X Z) + B(X,Y) theta(Z) + B*(X,Z) theta(Y)",
        cfg.tol,
    );
    let mut sum_defect = RowBuilder::new(
        "s3.sum-defect",
        "(D_X g + D*_X g)(Y,Z) = (B+B*)(X,Y) theta(Z) + (B+B*)(X,Z) theta(Y)",
        cfg.tol,
    );
    let mut b_sum_xi = RowBuilder::new("s3.b-sum-xi", "B(X,xi) + B*(X,xi) = 0", cfg.tol);
    let mut shape_sum = RowBuilder::new("s3.shape-sum-theta", "g(A_N X + A*_N X, N) = 0", cfg.tol);
    let mut screen_dual = RowBuilder::new("s3.screen-form-dual", "C(X,PY) = g(A*_N X, PY)", cfg.tol);
    let mut screen_primal = RowBuilder::new("s3.screen-form-primal", "C*(X,PY) = g(A_N X, PY)", cfg.tol);
    let mut b_via_shape = RowBuilder::new(
        "s3.b-via-shape",
        "B(X,Y) = g(Abar*_xi X, Y) + B*(X,xi) theta(Y)",
        cfg.tol,
    );
    let mut bstar_via_shape = RowBuilder::new(
        "s3.bstar-via-shape",
        "B*(X,Y) = g(Abar_xi X, Y) + B(X,xi) theta(Y)",
        cfg.tol,
    );
    let mut radical_sum = RowBuilder::new("s3.radical-shape-sum", "Abar*_xi xi + Abar_xi xi = 0", cfg.tol);
    let mut tau_cross = RowBuilder::new(
        "s3.tau-consistency",
        "tau from Weingarten = -theta(D_X xi)",
        pinned::REASSEMBLY,
    );
    let mut tau_star_cross = RowBuilder::new(
        "s3.tau-star-consistency",
        "tau* from Weingarten = -theta(D*_X xi)",
        pinned::REASSEMBLY,
    );

    for u in &points {
        let nv = hyp.transversal.eval(u)?;
        let (abar_xi, _) = primal.radical_decompose(&hyp.xi, u)?;
        let (abar_star_xi, _) = dual.radical_decompose(&hyp.xi, u)?;
        radical_sum.record((&abar_xi + &abar_star_xi).norm(), u);
        for x in &fields {
            let (_, tau, _) = primal.weingarten(x, u)?;
            let (_, tau_star, _) = dual.weingarten(x, u)?;
            let (abar, tau_r) = primal.radical_decompose(x, u)?;
            let (abar_star, tau_star_r) = dual.radical_decompose(x, u)?;
            tau_cross.record(tau - tau_r, u);
            tau_star_cross.record(tau_star - tau_star_r, u);
            let (a_n, _, _) = primal.weingarten(x, u)?;
            let (a_n_star, _, _) = dual.weingarten(x, u)?;
            shape_sum.record(primal.pair(u, &(&a_n + &a_n_star), &nv)?, u);
            let b_x_xi = primal.b_form(x, &hyp.xi, u)?;
            let bstar_x_xi = dual.b_form(x, &hyp.xi, u)?;
            b_sum_xi.record(b_x_xi + bstar_x_xi, u);
            for y in &fields {
                let yv = y.eval(u)?;
                let (_, b_xy, gres_p) = primal.gauss(x, y, u)?;
                let (_, bstar_xy, gres_d) = dual.gauss(x, y, u)?;
                reassembly_p.record(gres_p, u);
                reassembly_d.record(gres_d, u);
                let b_yx = primal.b_form(y, x, u)?;
                let bstar_yx = dual.b_form(y, x, u)?;
                b_sym.record(b_xy - b_yx, u);
                bstar_sym.record(bstar_xy - bstar_yx, u);
                let theta_y = primal.theta_of(u, &yv)?;
                b_via_shape.record(
                    b_xy - primal.pair(u, &abar_star, &yv)? - bstar_x_xi * theta_y,
                    u,
                );
                bstar_via_shape.record(
                    bstar_xy - primal.pair(u, &abar, &yv)? - b_x_xi * theta_y,
                    u,
                );
                // screen fundamental forms against the dual shape operators
                let py = hyp.project_screen(g, y);
                let (_, c_val) = primal.screen_decompose(x, &py, u)?;
                let (_, c_star_val) = dual.screen_decompose(x, &py, u)?;
                let pyv = py.eval(u)?;
                screen_dual.record(c_val - primal.pair(u, &a_n_star, &pyv)?, u);
                screen_primal.record(c_star_val - primal.pair(u, &a_n, &pyv)?, u);
                for z in fields.iter().take(4) {
                    let zv = z.eval(u)?;
                    let gyz = hyp.metric_scalar(g, y, z);
                    let xg = hyp.derive_scalar(x, &gyz, u)?;
                    let dxy = primal.induced(x, y, u)?;
                    let dstar_xz = dual.induced(x, z, u)?;
                    let defect = xg
                        - primal.pair(u, &dxy, &zv)?
                        - primal.pair(u, &yv, &dstar_xz)?;
                    dual_defect.record(defect, u);
                    let theta_z = primal.theta_of(u, &zv)?;
                    let bstar_xz = dual.b_form(x, z, u)?;
                    gauss_metric.record(defect - b_xy * theta_z - bstar_xz * theta_y, u);
                    // sum of metric defects of the induced pair
                    let dxz = primal.induced(x, z, u)?;
                    let dstar_xy = dual.induced(x, y, u)?;
                    let dg = xg - primal.pair(u, &dxy, &zv)? - primal.pair(u, &yv, &dxz)?;
                    let dg_star = xg - primal.pair(u, &dstar_xy, &zv)? - primal.pair(u, &yv, &dstar_xz)?;
                    let bz = primal.b_form(x, z, u)?;
                    let rhs = (b_xy + bstar_xy) * theta_z + (bz + bstar_xz) * theta_y;
                    sum_defect.record(dg + dg_star - rhs, u);
                }
            }
        }
    }

    let mut rows = frame_rows(hyp, g, cfg, "s3")?;
    rows.extend([
        reassembly_p.finish(),
        reassembly_d.finish(),
        b_sym.finish(),
        bstar_sym.finish(),
        dual_defect.finish(),
        gauss_metric.finish(),
        sum_defect.finish(),
        b_sum_xi.finish(),
        shape_sum.finish(),
        screen_dual.finish(),
        screen_primal.finish(),
        b_via_shape.finish(),
        bstar_via_shape.finish(),
        radical_sum.finish(),
        tau_cross.finish(),
        tau_star_cross.finish(),
    ]);

    for rep in reproductions {
        let mut row = RowBuilder::new(&rep.id, &rep.reference, pinned::REASSEMBLY);
        for u in &points {
            let got = hyp.ambient_derivative(&rep.conn, &rep.x, &rep.y, u)?;
            let want = rep.expected.eval(u)?;
            row.record((got - want).norm(), u);
        }
        rows.push(row.finish());
    }
    Ok(rows)
}
