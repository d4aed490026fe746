use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{ExperimentConfig, FormSpec};
use super::output::{write_csv, Outcome, Plot, Scale};
use super::Command;
use crate::chains::{
    exterior_derivative, integrate_one_form, integrate_two_form, measure_disk, AnalyticTwoForm, OneForm, ParamDisk,
};
use crate::decay::{
    calibrate_k_emp, decay_bound_series, DecayOptions, DecaySeries, LinearModel, StripChoice, USRectangle,
};
use crate::dynamics::{
    accessibility_criterion, accessibility_value, anosov_section_criterion, anosov_value, pisot_example,
    spectral_rates, standard_holder_bound, CriterionReport, ToralAutomorphism,
};
use crate::error::{Error, Result};
use crate::fields::{fmt17, make_weierstrass, random_field, Axis};
use crate::inequality::{
    eps_sweep, isoperimetric_check, log_grid, ls_slope, random_convex_polygon, verify_main_inequality,
};
use crate::mollify::{mollify, verify_regularization_with, RegularizationReport};

const RANDOM_1D_NODES: usize = 1025;
const RANDOM_2D_NODES: usize = 129;
const STOKES_TOL: f64 = 1e-6;
const MOLLIFIED_STOKES_TOL: f64 = 1e-5;

fn bad(key: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn theta_open(key: &str, t: f64) -> Result<f64> {
    if t > 0.0 && t < 1.0 {
        Ok(t)
    } else {
        Err(bad(key, format!("{t} not in (0, 1)")))
    }
}

pub(super) fn dispatch(cmd: &Command, cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let mut o = Outcome::default();
    let csv = out.join(format!("{}.csv", cmd.name()));
    let svg = cfg
        .svg
        .unwrap_or(false)
        .then(|| out.join(format!("{}.svg", cmd.name())));
    match cmd {
        Command::MollifyCheck { epsilons, theta } => mollify_check(cfg, epsilons.as_deref(), *theta, &csv, &mut o)?,
        Command::StokesCheck { epsilon } => stokes_check(cfg, *epsilon, &csv, &mut o)?,
        Command::Inequality { theta } => inequality(cfg, *theta, &csv, svg.as_deref(), &mut o)?,
        Command::Isoperimetric { polygons } => isoperimetric(cfg, *polygons, &csv, &mut o)?,
        Command::Criteria {
            matrix,
            theta,
            ell,
            extra_center_dims,
        } => criteria(cfg, matrix.as_deref(), *theta, *ell, *extra_center_dims, &csv, &mut o)?,
        Command::Pisot => pisot(&csv, &mut o)?,
        Command::Decay {
            matrix,
            theta,
            k_min,
            k_max,
            c1,
        } => decay(
            cfg,
            matrix.as_deref(),
            *theta,
            *k_min,
            *k_max,
            *c1,
            &csv,
            svg.as_deref(),
            &mut o,
        )?,
    }
    o.files.insert(0, csv);
    if let Some(p) = svg.filter(|p| p.exists()) {
        o.files.push(p);
    }
    Ok(o)
}

fn mollify_check(
    cfg: &ExperimentConfig,
    epsilons: Option<&[f64]>,
    theta: Option<f64>,
    csv: &Path,
    o: &mut Outcome,
) -> Result<()> {
    let mut m = cfg.mollify.clone().unwrap_or_default();
    if let Some(e) = epsilons {
        m.epsilons = Some(e.to_vec());
    }
    if theta.is_some() {
        m.theta = theta;
    }
    let eps = m.epsilons()?;
    let theta = theta_open("mollify.theta", m.theta()?)?;
    let (base, terms) = (m.base.unwrap_or(2), m.terms.unwrap_or(8));
    let res = m.resolution.unwrap_or(4097);
    let u = make_weierstrass(theta, base, terms, res).map_err(|e| bad("mollify.resolution", e.to_string()))?;
    let reports = verify_regularization_with(&u, theta, &eps, cfg.slack()?)?;
    o.info(format!(
        "W_{theta}: base {base}, {terms} terms, {res} nodes, C^θ norm {:.6}",
        reports[0].cnorm
    ));
    for r in &reports {
        o.check(
            format!("sup bound eps={}", r.epsilon),
            r.pass_b,
            format!("sup|u^e| = {:.6e} <= sup|u| = {:.6e}", r.sup_ue, r.sup_u),
        );
        o.check(
            format!("approximation eps={}", r.epsilon),
            r.pass_c,
            format!("{:.6e} <= {:.6e}", r.measured_c, r.bound_c * r.slack),
        );
        o.check(
            format!("derivative eps={}", r.epsilon),
            r.pass_d,
            format!("{:.6e} <= {:.6e}", r.measured_d, r.bound_d * r.slack),
        );
    }
    let rows: Vec<Vec<String>> = reports.iter().map(RegularizationReport::csv_record).collect();
    write_csv(csv, &RegularizationReport::CSV_HEADER, &rows)?;

    // sup bound on seeded random fields, half 1D and half 2D
    let count = m.random_fields.unwrap_or(20);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let mut rand_rows = Vec::new();
    let mut worst = 0usize;
    for id in 0..count {
        let axes = if id % 2 == 0 {
            vec![Axis::periodic(0.0, 1.0, RANDOM_1D_NODES)?]
        } else {
            vec![Axis::periodic(0.0, 1.0, RANDOM_2D_NODES)?; 2]
        };
        let f = random_field(&mut rng, axes)?;
        let sup = f.sup_norm();
        for &e in &eps {
            let s = mollify(&f, e)?.sup_norm();
            if s > sup {
                worst += 1;
            }
            rand_rows.push(vec![
                id.to_string(),
                f.dim().to_string(),
                fmt17(e),
                fmt17(sup),
                fmt17(s),
                (s <= sup).to_string(),
            ]);
        }
    }
    if count > 0 {
        o.check(
            "sup bound random fields",
            worst == 0,
            format!("{count} fields x {} epsilons, {worst} violations", eps.len()),
        );
        let p = csv.with_file_name("mollify-check-random.csv");
        write_csv(
            &p,
            &["field_id", "dim", "epsilon", "sup_u", "sup_ue", "pass"],
            &rand_rows,
        )?;
        o.files.push(p);
    }
    Ok(())
}

fn stokes_check(cfg: &ExperimentConfig, epsilon: Option<f64>, csv: &Path, o: &mut Outcome) -> Result<()> {
    let st = cfg.stokes.clone().unwrap_or_default();
    let header = [
        "check",
        "area",
        "boundary_integral",
        "interior_integral",
        "expected",
        "residual",
        "tolerance",
        "pass",
    ];
    let mut rows = Vec::new();

    let x_dy = FormSpec::AreaForm {
        nodes: None,
        lo: None,
        hi: None,
        theta: None,
    }
    .build()?;
    let disk = ParamDisk::unit_disk();
    let area = measure_disk(&disk)?.area;
    let b = integrate_one_form(&x_dy, &disk.boundary())?;
    let i = integrate_two_form(&AnalyticTwoForm(|_| 1.0), &disk)?;
    let res = (b - std::f64::consts::PI).abs();
    o.check(
        "x dy on unit disk",
        res <= STOKES_TOL,
        format!("|pi - {b:.15}| = {res:.3e}"),
    );
    rows.push(vec![
        "x_dy_unit_disk".to_string(),
        fmt17(area),
        fmt17(b),
        fmt17(i),
        fmt17(std::f64::consts::PI),
        fmt17(res),
        fmt17(STOKES_TOL),
        (res <= STOKES_TOL).to_string(),
    ]);

    if let Some(spec) = &cfg.form {
        let alpha = spec.build()?;
        let eps = epsilon.or(st.epsilon).unwrap_or(0.05);
        if !(eps > 0.0) {
            return Err(bad("stokes.epsilon", format!("{eps} must be positive")));
        }
        let disk = st.disk.clone().unwrap_or(ParamDisk::square([0.3, 0.3], 0.2));
        let tol = st.tolerance.unwrap_or(MOLLIFIED_STOKES_TOL);
        let ae = alpha.mollify(eps)?;
        let area = measure_disk(&disk)?.area;
        let b = integrate_one_form(&ae, &disk.boundary())?;
        let i = integrate_two_form(&exterior_derivative(&ae)?, &disk)?;
        let res = (b - i).abs();
        o.check(
            format!("mollified Stokes eps={eps}"),
            res <= tol,
            format!("|{b:.12e} - {i:.12e}| = {res:.3e} <= {tol:e}"),
        );
        rows.push(vec![
            "mollified".to_string(),
            fmt17(area),
            fmt17(b),
            fmt17(i),
            fmt17(i),
            fmt17(res),
            fmt17(tol),
            (res <= tol).to_string(),
        ]);
    }
    write_csv(csv, &header, &rows)
}

fn inequality(
    cfg: &ExperimentConfig,
    theta: Option<f64>,
    csv: &Path,
    svg: Option<&Path>,
    o: &mut Outcome,
) -> Result<()> {
    let spec = cfg.form()?;
    let theta = theta_open("theta", theta.unwrap_or(spec.theta()))?;
    let alpha = spec.with_theta(theta).build()?;
    let sigma = cfg.sigma()?;
    let (family, radii) = cfg.disks.clone().unwrap_or_default().build()?;
    let rep = verify_main_inequality(&alpha, &family, theta, sigma)?;
    let evaluated = rep.evaluated().count();
    o.info(format!(
        "{} disks, {evaluated} evaluated, theta {theta}, sigma {sigma}, cnorm {:.6}",
        family.len(),
        rep.reports.first().map_or(f64::NAN, |r| r.cnorm)
    ));
    o.check(
        "empirical K finite",
        rep.empirical_k.is_finite() && rep.non_finite == 0 && evaluated > 0,
        format!("K = {:.6e} over {evaluated} disks", rep.empirical_k),
    );
    if let Some(r) = &radii {
        let (x, y): (Vec<f64>, Vec<f64>) = rep
            .reports
            .iter()
            .zip(r)
            .filter(|(q, _)| !q.skipped && q.ratio > 0.0)
            .map(|(q, &r)| (r.ln(), q.ratio.ln()))
            .unzip();
        if x.len() >= 2 {
            let slope = ls_slope(&x, &y)?;
            o.check(
                "no blow-up as disks shrink",
                slope <= 0.1,
                format!("slope {slope:.4} <= 0.1"),
            );
        }
        if let Some(p) = svg {
            let pts = rep
                .reports
                .iter()
                .zip(r)
                .filter(|(q, _)| !q.skipped)
                .map(|(q, &r)| (r, q.ratio))
                .collect();
            Plot {
                title: "ratio vs r",
                x_label: "r",
                y_label: "ratio",
                x_scale: Scale::Log,
                y_scale: Scale::Log,
                series: vec![("ratio", pts)],
            }
            .write(p)?;
        }
    }
    let mut worst: f64 = 0.0;
    let cnorm = rep.reports.first().map_or(1.0, |r| r.cnorm);
    for q in rep.evaluated() {
        let grid = log_grid(q.eps_star * 1e-2, q.eps_star * 1e2, 1000)?;
        let s = eps_sweep(cnorm, q.measures.area, q.measures.length, theta, &grid)?;
        worst = worst.max((s.min_value() - s.closed_form_min).abs() / s.closed_form_min);
    }
    o.check(
        "eps sweep matches closed form",
        worst <= 5e-3,
        format!("worst relative gap {worst:.3e}"),
    );
    let rows: Vec<Vec<String>> = rep.reports.iter().map(|r| r.csv_record()).collect();
    write_csv(csv, &crate::inequality::InequalityReport::CSV_HEADER, &rows)
}

fn isoperimetric(cfg: &ExperimentConfig, polygons: Option<usize>, csv: &Path, o: &mut Outcome) -> Result<()> {
    let ic = cfg.isoperimetric.clone().unwrap_or_default();
    let count = polygons.or(ic.polygons).unwrap_or(10);
    let vertices = ic.vertices.unwrap_or(12);
    if vertices < 3 {
        return Err(bad("isoperimetric.vertices", "need at least 3"));
    }
    let mut rows = Vec::new();
    let disk = isoperimetric_check(&ParamDisk::unit_disk())?;
    let rel = disk.gap.abs() / disk.area;
    o.check(
        "unit disk equality",
        rel <= 1e-6,
        format!("|D| = {:.12}, C2 L^2 = {:.12}", disk.area, disk.bound),
    );
    let mut push = |id: &str, kind: &str, r: &crate::inequality::IsoperimetricReport| {
        rows.push(vec![
            id.to_string(),
            kind.to_string(),
            fmt17(r.area),
            fmt17(r.length),
            fmt17(r.bound),
            fmt17(r.gap),
            r.holds.to_string(),
        ]);
    };
    push("0", "unit-disk", &disk);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let mut strict = 0;
    for id in 1..=count {
        let r = isoperimetric_check(&random_convex_polygon(&mut rng, vertices)?)?;
        if r.holds && r.gap > 0.0 {
            strict += 1;
        }
        push(&id.to_string(), "convex-polygon", &r);
    }
    o.check(
        "strict inequality on polygons",
        strict == count,
        format!("{strict} of {count} polygons strictly inside the bound"),
    );
    write_csv(
        csv,
        &["disk_id", "kind", "area", "length", "bound", "gap", "holds"],
        &rows,
    )
}

#[allow(clippy::too_many_arguments)]
fn criteria(
    cfg: &ExperimentConfig,
    matrix: Option<&[i64]>,
    theta: Option<f64>,
    ell: Option<usize>,
    extra: Option<usize>,
    csv: &Path,
    o: &mut Outcome,
) -> Result<()> {
    let cc = cfg.criteria.clone().unwrap_or_default();
    let entries = matrix
        .map(<[i64]>::to_vec)
        .or(cc.matrix.clone())
        .unwrap_or_else(|| vec![2, 1, 1, 1]);
    let theta = match theta {
        Some(t) => theta_open("theta", t)?,
        None => cc.theta()?,
    };
    let a = ToralAutomorphism::from_row_major(&entries).map_err(|e| bad("criteria.matrix", e.to_string()))?;
    let extra = extra.or(cc.extra_center_dims).unwrap_or(0);
    let rates = spectral_rates(&a, extra)?;
    let ell_opt = ell.or(cc.ell);
    let ev: Vec<String> = a
        .eigenvalues()
        .iter()
        .map(|z| format!("{:.12}{:+.12}i", z.re, z.im))
        .collect();
    o.info(format!("eigenvalues: {}", ev.join(", ")));
    o.info(format!(
        "dims s/c/u: {}/{}/{}  mu = {}  nu = {}",
        rates.dim_s,
        rates.dim_c,
        rates.dim_u,
        rates.lambda_u.map_or("-".into(), |v| format!("{v:.12}")),
        rates.lambda_s.map_or("-".into(), |v| format!("{v:.12}")),
    ));
    let mut reports: Vec<CriterionReport> = Vec::new();
    if rates.dim_c == 0 {
        let r = anosov_section_criterion(&rates, theta)?;
        let at = anosov_value(rates.mu()?, rates.nu()?, r.theta_threshold)?;
        o.check(
            "anosov threshold consistency",
            (at.value - 1.0).abs() <= 1e-9,
            format!("value at theta* = {:.15}", at.value),
        );
        reports.push(r);
    }
    if rates.dim_c > 0 || ell_opt.is_some() {
        let ell = ell_opt.unwrap_or(rates.dim_c);
        let r = accessibility_criterion(&rates, theta, ell)?;
        if ell > 0 {
            let at = accessibility_value(rates.mu()?, rates.nu()?, rates.m_c, r.theta_threshold, ell)?;
            o.check(
                "accessibility threshold consistency",
                (at.value - 1.0).abs() <= 1e-9,
                format!("value at theta* = {:.15}", at.value),
            );
        }
        reports.push(r);
        if let Ok(b) = standard_holder_bound(&rates) {
            o.info(format!("standard Holder bound: {b:.12}"));
        }
    }
    o.info(format!(
        "{:<16} {:>8} {:>20} {:>6} {:>20} {:>9}",
        "criterion", "theta", "value", "holds", "theta*", "reachable"
    ));
    for r in &reports {
        o.info(format!(
            "{:<16} {:>8.4} {:>20.15} {:>6} {:>20.15} {:>9}",
            r.name, r.theta, r.value, r.holds, r.theta_threshold, r.threshold_reachable
        ));
    }
    let rows: Vec<Vec<String>> = reports.iter().map(CriterionReport::csv_record).collect();
    write_csv(csv, &CriterionReport::CSV_HEADER, &rows)
}

fn pisot(csv: &Path, o: &mut Outcome) -> Result<()> {
    let p = pisot_example()?;
    o.info(format!("xi  = {:.12}", p.xi));
    o.info(format!("eta = {:.12}", p.eta));
    o.info(format!("accessibility threshold = {:.12}", p.accessibility_threshold));
    o.info(format!("standard Holder bound   = {:.12}", p.standard_bound));
    o.check(
        "p(xi) = 0",
        p.poly_residual <= 1e-9,
        format!("|p(xi)| = {:.3e}", p.poly_residual),
    );
    o.check(
        "xi eta^2 = 1",
        p.det_residual <= 1e-9,
        format!("|xi eta^2 - 1| = {:.3e}", p.det_residual),
    );
    o.check(
        "thresholds coincide at 1/2",
        p.thresholds_coincide(1e-9),
        "both within 1e-9 of 0.5",
    );
    let rows = vec![
        vec!["xi".to_string(), fmt17(p.xi)],
        vec!["eta".to_string(), fmt17(p.eta)],
        vec!["det_residual".to_string(), fmt17(p.det_residual)],
        vec!["poly_residual".to_string(), fmt17(p.poly_residual)],
        vec!["accessibility_threshold".to_string(), fmt17(p.accessibility_threshold)],
        vec!["standard_bound".to_string(), fmt17(p.standard_bound)],
    ];
    write_csv(csv, &["quantity", "value"], &rows)
}

#[allow(clippy::too_many_arguments)]
fn decay(
    cfg: &ExperimentConfig,
    matrix: Option<&[f64]>,
    theta: Option<f64>,
    k_min: Option<u32>,
    k_max: Option<u32>,
    c1: Option<f64>,
    csv: &Path,
    svg: Option<&Path>,
    o: &mut Outcome,
) -> Result<()> {
    let mut dc = cfg.decay.clone().unwrap_or_default();
    if let Some(m) = matrix {
        let [a, b, c, d] = m else {
            return Err(bad("matrix", format!("need 4 entries, got {}", m.len())));
        };
        dc.matrix = Some([[*a, *b], [*c, *d]]);
    }
    dc.theta = theta.or(dc.theta);
    dc.k_min = k_min.or(dc.k_min);
    dc.k_max = k_max.or(dc.k_max);
    dc.c1 = c1.or(dc.c1);
    dc.validate()?;
    let spec = cfg.form()?;
    let theta = dc.theta.unwrap_or(spec.theta());
    let alpha: OneForm = spec.with_theta(theta).build()?;
    let model = LinearModel::new(dc.matrix.unwrap_or([[1.5, 0.0], [0.0, 0.4]]))
        .map_err(|e| bad("decay.matrix", e.to_string()))?;
    let d = USRectangle::new(
        &model,
        dc.corner.unwrap_or([0.3, 0.3]),
        dc.unstable.unwrap_or(0.1),
        dc.stable.unwrap_or(0.1),
    )?;
    let opts = DecayOptions {
        theta,
        sigma: cfg.sigma()?,
        c1: dc.c1.unwrap_or(1.0),
        k_min: dc.k_min.unwrap_or(0),
        k_max: dc.k_max.unwrap_or(12),
    };
    let cnorm = alpha.cnorm_at(theta)?.cnorm;
    let k_emp = calibrate_k_emp(
        &alpha,
        dc.calibration_corner.unwrap_or([0.3, 0.3]),
        dc.calibration_j_min.unwrap_or(2)..=dc.calibration_j_max.unwrap_or(8),
        theta,
        opts.sigma,
        cnorm,
    )?;
    let s = decay_bound_series(&alpha, &model, &d, &opts, k_emp, cnorm)?;
    o.info(format!(
        "mu = {}, nu = {}, cnorm {cnorm:.6}, K_emp {k_emp:.6e}, predicted rate {:.6}",
        model.mu(),
        model.nu(),
        s.predicted_rate
    ));
    for r in &s.rows {
        match r.choice {
            StripChoice::PreAsymptotic { n0 } => o.info(format!("k = {}: pre-asymptotic (N0 = {n0:.4})", r.k)),
            StripChoice::EmptyBand { n0 } => o.info(format!("k = {}: no integer in (N0, 2N0), N0 = {n0:.4}", r.k)),
            StripChoice::Admissible { .. } => {}
        }
    }
    checks_for_series(&s, o);
    write_csv(csv, &DecaySeries::CSV_HEADER, &s.csv_records())?;
    if let Some(p) = svg {
        Plot {
            title: "decay bound",
            x_label: "k",
            y_label: "bound_k",
            x_scale: Scale::Linear,
            y_scale: Scale::Log,
            series: vec![("bound_k", s.admissible().map(|r| (f64::from(r.k), r.bound)).collect())],
        }
        .write(p)?;
    }
    Ok(())
}

fn checks_for_series(s: &DecaySeries, o: &mut Outcome) {
    match s.fitted_rate {
        Some(f) => {
            let rel = (f - s.predicted_rate).abs() / s.predicted_rate;
            o.check(
                "fitted rate",
                rel <= 0.1,
                format!("{f:.6} vs predicted {:.6} (relative {rel:.3e})", s.predicted_rate),
            );
        }
        None => o.check("fitted rate", false, "fewer than two admissible k"),
    }
    let tele = s.admissible().map(|r| r.telescoping_residual).fold(0.0, f64::max);
    o.check("telescoping identity", tele <= 1e-8, format!("max residual {tele:.3e}"));
    let empty = s
        .rows
        .iter()
        .filter(|r| matches!(r.choice, StripChoice::EmptyBand { .. }))
        .count();
    let inside = s.admissible().all(|r| match r.choice {
        StripChoice::Admissible { n0, n } => (n as f64) > n0 && (n as f64) < 2.0 * n0,
        _ => false,
    });
    o.check(
        "strip count inside (N0, 2N0)",
        inside && empty == 0,
        format!("{} admissible k, {empty} empty bands", s.admissible().count()),
    );
}
