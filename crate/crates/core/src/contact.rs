//! Almost contact metric structures and the Sasakian residual suites.
//!
//! Nothing here is assumed: every structure equation is evaluated at sampled
//! points and reported as a residual. The structure field `nu` is required
//! spacelike engine-wide (epsilon = +1); fixtures declaring epsilon = -1 are
//! rejected at load time.

use crate::connection::{difference_tensor, duality_residual, Connection, DifferenceTensor};
use crate::geometry::{Chart, Metric, OneForm, Sampler, Tensor11, VectorField};
use crate::report::{pinned, CheckRow, RowBuilder, RunConfig};
use crate::Result;

/// Almost contact metric data (phi, nu, eta) on the ambient chart. The
/// compatibility residuals are computed by [`acm_rows`], never assumed.
#[derive(Debug, Clone)]
pub struct ContactStructure {
    pub phi: Tensor11,
    pub nu: VectorField,
    pub eta: OneForm,
}

/// Everything needed to test the statistical-contact interaction: the
/// structure, the metric, the primal connection D = nabla + K, its computed
/// dual, and the difference tensor K.
pub struct ContactPackage {
    pub cs: ContactStructure,
    pub g: Metric,
    pub d: Connection,
    pub dstar: Connection,
    pub k: DifferenceTensor,
}

impl ContactPackage {
    pub fn new(cs: ContactStructure, g: Metric, d: Connection) -> ContactPackage {
        let dstar = Connection::dual(&d, &g);
        let k = difference_tensor(&d, &g);
        ContactPackage { cs, g, d, dstar, k }
    }
}

/// Field arguments used by the ambient suites: the coordinate frame, the
/// structure field, and a few random polynomial fields.
pub fn ambient_fields(chart: &Chart, cs: Option<&ContactStructure>, sampler: &mut Sampler) -> Vec<VectorField> {
    let n = chart.dim();
    let mut fields = Vec::new();
    for a in 0..n {
        let mut comps = vec![crate::expr::Expr::zero(); n];
        comps[a] = crate::expr::Expr::one();
        fields.push(VectorField::new(comps));
    }
    if let Some(cs) = cs {
        fields.push(cs.nu.clone());
    }
    for _ in 0..2 {
        fields.push(sampler.polynomial_field(n));
    }
    fields
}

/// Residual rows for the almost contact metric equations.
pub fn acm_rows(
    cs: &ContactStructure,
    g: &Metric,
    chart: &Chart,
    cfg: &RunConfig,
) -> Result<Vec<CheckRow>> {
    let mut sampler = Sampler::new(cfg.seed);
    let points = sampler.sample_many(chart, cfg.points)?;
    let fields = ambient_fields(chart, Some(cs), &mut sampler);

    let mut phi_nu = RowBuilder::new("acm.phi-nu-zero", "phi(nu) = 0", cfg.tol);
    let mut eta_phi = RowBuilder::new("acm.eta-phi-zero", "eta(phi X) = 0", cfg.tol);
    let mut eta_nu = RowBuilder::new("acm.eta-nu-one", "eta(nu) = 1", cfg.tol);
    let mut phi_sq = RowBuilder::new("acm.phi-squared", "phi^2 X = -X + eta(X) nu", cfg.tol);
    let mut metric_nu = RowBuilder::new("acm.metric-nu", "g(X, nu) = eta(X)", cfg.tol);
    let mut compat = RowBuilder::new(
        "acm.phi-compat",
        "g(phi X, phi Y) = g(X, Y) - eta(X) eta(Y)",
        cfg.tol,
    );
    let mut fstr = RowBuilder::new("acm.f-structure", "phi^3 X + phi X = 0", pinned::DUALITY);

    for p in &points {
        let nu_v = cs.nu.eval(p)?;
        let phi_m = cs.phi.eval(p)?;
        let eta_v = cs.eta.eval(p)?;
        let gm = g.eval(p)?;
        phi_nu.record((&phi_m * &nu_v).norm(), p);
        eta_nu.record(eta_v.dot(&nu_v) - 1.0, p);
        for x in &fields {
            let xv = x.eval(p)?;
            let px = &phi_m * &xv;
            eta_phi.record(eta_v.dot(&px), p);
            let p2 = &phi_m * &px;
            phi_sq.record((&p2 + &xv - eta_v.dot(&xv) * &nu_v).norm(), p);
            metric_nu.record((xv.transpose() * &gm * &nu_v)[(0, 0)] - eta_v.dot(&xv), p);
            let p3 = &phi_m * &p2;
            fstr.record((&p3 + &px).norm(), p);
            for y in &fields {
                let yv = y.eval(p)?;
                let py = &phi_m * &yv;
                let lhs = (px.transpose() * &gm * &py)[(0, 0)];
                let rhs = (xv.transpose() * &gm * &yv)[(0, 0)] - eta_v.dot(&xv) * eta_v.dot(&yv);
                compat.record(lhs - rhs, p);
            }
        }
    }
    Ok(vec![
        phi_nu.finish(),
        eta_phi.finish(),
        eta_nu.finish(),
        phi_sq.finish(),
        metric_nu.finish(),
        compat.finish(),
        fstr.finish(),
    ])
}

/// Residual rows for the Sasakian structure equations of the Levi-Civita
/// connection: (nabla_X phi) Y = g(X,Y) nu - eta(Y) X and nabla_X nu = -phi X.
pub fn sasakian_rows(
    cs: &ContactStructure,
    g: &Metric,
    chart: &Chart,
    cfg: &RunConfig,
) -> Result<Vec<CheckRow>> {
    let lc = Connection::levi_civita(g);
    let mut sampler = Sampler::new(cfg.seed ^ 0x5a5a);
    let points = sampler.sample_many(chart, cfg.points)?;
    let fields = ambient_fields(chart, Some(cs), &mut sampler);

    let mut nabla_phi = RowBuilder::new(
        "sasaki.nabla-phi",
        "(nabla_X phi) Y = g(X,Y) nu - eta(Y) X",
        cfg.tol,
    );
    let mut nabla_nu = RowBuilder::new("sasaki.nabla-nu", "nabla_X nu = -phi X", cfg.tol);

    for p in &points {
        let gm = g.eval(p)?;
        let phi_m = cs.phi.eval(p)?;
        let eta_v = cs.eta.eval(p)?;
        let nu_v = cs.nu.eval(p)?;
        for x in &fields {
            let xv = x.eval(p)?;
            let dnu = lc.covariant_derivative(x, &cs.nu, p)?;
            nabla_nu.record((&dnu + &phi_m * &xv).norm(), p);
            for y in &fields {
                let yv = y.eval(p)?;
                let phi_y = cs.phi.apply(y);
                let d_phi_y = lc.covariant_derivative(x, &phi_y, p)?;
                let d_y = lc.covariant_derivative(x, y, p)?;
                let nabla_phi_y = &d_phi_y - &phi_m * &d_y;
                let gxy = (xv.transpose() * &gm * &yv)[(0, 0)];
                let r = &nabla_phi_y - gxy * &nu_v + eta_v.dot(&yv) * &xv;
                nabla_phi.record(r.norm(), p);
            }
        }
    }
    Ok(vec![nabla_phi.finish(), nabla_nu.finish()])
}

/// Rows for the characterization equations of the statistical pair on a
/// contact structure:
///   th1: D_X phi Y - phi D*_X Y = g(X,Y) nu - g(Y,nu) X
///   th2: D_X nu = -phi X + g(D_X nu, nu) nu
///   th3: the starred form of th1.
pub fn characterization_rows(
    pkg: &ContactPackage,
    chart: &Chart,
    cfg: &RunConfig,
) -> Result<Vec<CheckRow>> {
    let mut sampler = Sampler::new(cfg.seed ^ 0x3c3c);
    let points = sampler.sample_many(chart, cfg.points)?;
    let fields = ambient_fields(chart, Some(&pkg.cs), &mut sampler);

    let mut th_primal = RowBuilder::new(
        "th42.primal",
        "D_X phi Y - phi D*_X Y = g(X,Y) nu - g(Y,nu) X",
        cfg.tol,
    );
    let mut th_nu = RowBuilder::new("th42.nu", "D_X nu = -phi X + g(D_X nu, nu) nu", cfg.tol);
    let mut th_dual = RowBuilder::new(
        "th42.dual",
        "D*_X phi Y - phi D_X Y = g(X,Y) nu - g(Y,nu) X",
        cfg.tol,
    );

    for p in &points {
        let gm = pkg.g.eval(p)?;
        let phi_m = pkg.cs.phi.eval(p)?;
        let nu_v = pkg.cs.nu.eval(p)?;
        for x in &fields {
            let xv = x.eval(p)?;
            let dnu = pkg.d.covariant_derivative(x, &pkg.cs.nu, p)?;
            let g_dnu_nu = (dnu.transpose() * &gm * &nu_v)[(0, 0)];
            th_nu.record((&dnu + &phi_m * &xv - g_dnu_nu * &nu_v).norm(), p);
            for y in &fields {
                let yv = y.eval(p)?;
                let phi_y = pkg.cs.phi.apply(y);
                let gxy = (xv.transpose() * &gm * &yv)[(0, 0)];
                let gynu = (yv.transpose() * &gm * &nu_v)[(0, 0)];
                let rhs = gxy * &nu_v - gynu * &xv;

                let lhs1 = pkg.d.covariant_derivative(x, &phi_y, p)?
                    - &phi_m * pkg.dstar.covariant_derivative(x, y, p)?;
                th_primal.record((&lhs1 - &rhs).norm(), p);

                let lhs3 = pkg.dstar.covariant_derivative(x, &phi_y, p)?
                    - &phi_m * pkg.d.covariant_derivative(x, y, p)?;
                th_dual.record((&lhs3 - &rhs).norm(), p);
            }
        }
    }
    Ok(vec![th_primal.finish(), th_nu.finish(), th_dual.finish()])
}

/// Dual-connection law rows for the package: the duality residual of the
/// computed pair, the involution, self-duality of Levi-Civita, and the mean
/// connection against Levi-Civita.
pub fn pair_rows(pkg_g: &Metric, d: &Connection, chart: &Chart, cfg: &RunConfig) -> Result<Vec<CheckRow>> {
    let dstar = Connection::dual(d, pkg_g);
    let lc = Connection::levi_civita(pkg_g);
    let mut sampler = Sampler::new(cfg.seed ^ 0xd00d);
    let points = sampler.sample_many(chart, cfg.points)?;
    let fields = ambient_fields(chart, None, &mut sampler);

    let mut law = RowBuilder::new(
        "pair.duality",
        "Z g(X,Y) = g(D_Z X, Y) + g(X, D*_Z Y)",
        pinned::DUALITY,
    );
    let mut involution = RowBuilder::new("pair.involution", "(D*)* = D", pinned::DUALITY);
    let mut lc_self = RowBuilder::new("pair.lc-self-dual", "dual(nabla) = nabla", pinned::DUALITY);
    let mut mean = RowBuilder::new("pair.mean-vs-lc", "(D + D*)/2 = nabla", cfg.tol);
    let ddstar = Connection::dual(&dstar, pkg_g);
    let lc_dual = Connection::dual(&lc, pkg_g);

    for p in &points {
        let cd = d.coeffs(p)?;
        let cds = dstar.coeffs(p)?;
        let clc = lc.coeffs(p)?;
        involution.record(ddstar.coeffs(p)?.max_abs_diff(&cd), p);
        lc_self.record(lc_dual.coeffs(p)?.max_abs_diff(&clc), p);
        let mut mean_c = cd.clone();
        for k in 0..mean_c.n {
            for i in 0..mean_c.n {
                for j in 0..mean_c.n {
                    mean_c.set(k, i, j, 0.5 * (cd.get(k, i, j) + cds.get(k, i, j)));
                }
            }
        }
        mean.record(mean_c.max_abs_diff(&clc), p);
        for (ix, x) in fields.iter().enumerate() {
            for y in fields.iter().skip(ix) {
                for z in &fields {
                    law.record(duality_residual(d, &dstar, pkg_g, x, y, z, p)?, p);
                }
            }
        }
    }
    Ok(vec![law.finish(), involution.finish(), lc_self.finish(), mean.finish()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::report::RowStatus;

    /// Flat contact structure on a 5d chart of signature (-,+,-,+,+):
    /// eta = dz, nu = dz-dual, phi pairing x_i with y_i.
    fn flat_contact() -> (Chart, Metric, ContactStructure, Connection) {
        let chart = Chart::new(
            &["x1", "x2", "y1", "y2", "z"],
            &[-1.0; 5],
            &[1.0; 5],
        );
        let g = Metric::diagonal(&[-1.0, 1.0, -1.0, 1.0, 1.0]);
        let mut phi = Tensor11::zero(5);
        // phi(dx_i) = -dy_i, phi(dy_i) = dx_i
        phi.set(2, 0, -Expr::one());
        phi.set(3, 1, -Expr::one());
        phi.set(0, 2, Expr::one());
        phi.set(1, 3, Expr::one());
        let nu = VectorField::constant(&[0.0, 0.0, 0.0, 0.0, 1.0]);
        let eta = OneForm::new(vec![
            Expr::zero(),
            Expr::zero(),
            Expr::zero(),
            Expr::zero(),
            Expr::one(),
        ]);
        // K(X,Y) = g(X,nu) g(Y,nu) nu as coordinate entries: K^z_zz = 1
        let mut k_entries = vec![Expr::zero(); 125];
        k_entries[(4 * 5 + 4) * 5 + 4] = Expr::one();
        let k = DifferenceTensor::from_exprs(5, k_entries);
        let d = Connection::from_difference(Connection::zero(5), k);
        (chart, g, ContactStructure { phi, nu, eta }, d)
    }

    #[test]
    fn flat_structure_satisfies_acm_but_not_sasaki() {
        let (chart, g, cs, _) = flat_contact();
        let cfg = RunConfig {
            points: 16,
            ..RunConfig::default()
        };
        let rows = acm_rows(&cs, &g, &chart, &cfg).unwrap();
        for row in &rows {
            assert_eq!(row.status, RowStatus::Pass, "{} residual {}", row.id, row.max_residual);
        }
        // phi^2 dx1 = -dx1 exactly
        let p = [0.2, -0.3, 0.4, 0.1, 0.9];
        let phi_m = cs.phi.eval(&p).unwrap();
        let e1 = nalgebra::DVector::from_row_slice(&[1.0, 0.0, 0.0, 0.0, 0.0]);
        let p2 = &phi_m * (&phi_m * &e1);
        assert_eq!(p2, -e1);

        // nu is parallel in the flat metric, so nabla_X nu + phi X = phi X:
        // the row must report a nonzero residual equal to max |phi X|
        let rows = sasakian_rows(&cs, &g, &chart, &cfg).unwrap();
        let nn = rows.iter().find(|r| r.id == "sasaki.nabla-nu").unwrap();
        assert_eq!(nn.status, RowStatus::Fail);
        assert!(nn.max_residual > 0.9, "residual {}", nn.max_residual);
    }

    #[test]
    fn flat_package_is_statistical_with_anticommuting_k() {
        let (chart, g, cs, d) = flat_contact();
        let cfg = RunConfig {
            points: 12,
            ..RunConfig::default()
        };
        let rows =
            crate::suites::statistical_rows(&g, &d, Some(&cs.phi), &chart, &cfg).unwrap();
        for row in &rows {
            if row.status != RowStatus::ReportOnly {
                assert_eq!(row.status, RowStatus::Pass, "{} residual {}", row.id, row.max_residual);
            }
        }
    }

    #[test]
    fn pair_laws_hold_for_flat_package() {
        let (chart, g, _, d) = flat_contact();
        let cfg = RunConfig {
            points: 8,
            ..RunConfig::default()
        };
        let rows = pair_rows(&g, &d, &chart, &cfg).unwrap();
        for row in &rows {
            assert_eq!(row.status, RowStatus::Pass, "{} residual {}", row.id, row.max_residual);
        }
    }
}
