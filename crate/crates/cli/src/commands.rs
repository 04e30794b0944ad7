use crate::args::{Cli, Command, McMode, ModelArgs, ModelKind, Space};
use crate::output::{
    num, quantity_cells, Document, Emitted, Format, PlainQuantity, Quantity, Table,
};
use crate::CliError;
use blackbody::decoherence::{decoherence_curve, lambda_from_limit};
use blackbody::diffusion::{
    air_diffusion, diffusion_constant, k_space_diffusion, scattering_constant_lambda,
    AirEnvironment, ThermalEnvironment,
};
use blackbody::drag::{
    drag_coefficient_nonrel, dual_path, fluctuation_dissipation, nonrel_slope_limit,
    two_level_drag, two_level_drag_quadrature, RelativisticState,
};
use blackbody::equilibrium::{
    equilibrium_residual, fokker_planck_checkpoints, ou_moments, spectrum_ode_solve,
    SpectrumBranch, VelocityDistribution,
};
use blackbody::stochastic::{
    gaussian_independence_control, gaussian_independence_test, ou_path_samples, ou_trajectories,
    recoil_second_moment, simulate_kicks, FieldSampleSpec, KickProcessSpec, OuScheme, OuSpec,
    RecoilSampling,
};
use blackbody::verify::{run_criterion, CriterionResult, CRITERIA};
use blackbody::{PolarizabilityModel, QuadratureConfig, Statistics, Unit, CGS};
use rayon::prelude::*;
use serde_json::{json, Value};

/// The emitted document and whether the run counts as success.
pub struct Outcome {
    pub emitted: Emitted,
    pub success: bool,
}

impl Outcome {
    fn ok(emitted: Emitted) -> Self {
        Outcome {
            emitted,
            success: true,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_with<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, CliError> {
    s.parse().map_err(|_| usage(format!("unknown {what} '{s}'")))
}

pub fn build_model(m: &ModelArgs) -> Result<PolarizabilityModel, CliError> {
    let kind = m.model.ok_or_else(|| usage("--model is required"))?;
    let foreign: Vec<&str> = [
        ("particle-mass", m.particle_mass.is_some(), kind != ModelKind::Electron),
        ("charge", m.charge.is_some(), kind != ModelKind::Electron),
        ("radius", m.radius.is_some(), kind != ModelKind::Sphere),
        ("epsilon", m.epsilon.is_some(), kind != ModelKind::Sphere),
        ("omega0", m.omega0.is_some(), kind != ModelKind::TwoLevel),
        ("dipole", m.dipole.is_some(), kind != ModelKind::TwoLevel),
        ("linewidth", m.linewidth.is_some(), kind != ModelKind::TwoLevel),
    ]
    .iter()
    .filter(|(_, given, other)| *given && *other)
    .map(|(name, _, _)| *name)
    .collect();
    if !foreign.is_empty() {
        return Err(usage(format!(
            "--{} do(es) not apply to the {kind:?} model",
            foreign.join(", --")
        )));
    }
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| usage(format!("--{name} is required for {kind:?}")));
    Ok(match kind {
        ModelKind::Electron => match (m.particle_mass, m.charge) {
            (None, None) => PolarizabilityModel::electron(),
            (mass, charge) => PolarizabilityModel::charged_particle(
                mass.unwrap_or(CGS.m_e),
                charge.unwrap_or(CGS.e_charge),
            )?,
        },
        ModelKind::Sphere => PolarizabilityModel::sphere(
            need(m.radius, "radius")?,
            m.epsilon.ok_or_else(|| usage("--epsilon is required for Sphere"))?,
        )?,
        ModelKind::TwoLevel => PolarizabilityModel::two_level(
            need(m.omega0, "omega0")?,
            need(m.dipole, "dipole")?,
            need(m.linewidth, "linewidth")?,
            m.p1,
            m.p2,
        )?,
    })
}

fn quadrature(cli: &Cli) -> Result<QuadratureConfig<f64>, CliError> {
    let mut cfg = QuadratureConfig::default();
    if let Some(r) = cli.global.rel_tol {
        if !(r > 0.0 && r < 1.0) {
            return Err(usage("--rel-tol must lie in (0, 1)"));
        }
        cfg = cfg.with_rel_tol(r);
    }
    if let Some(a) = cli.global.abs_tol {
        if a.is_nan() || a < 0.0 {
            return Err(usage("--abs-tol must be non-negative"));
        }
        cfg = cfg.with_abs_tol(a);
    }
    if let Some(n) = cli.global.max_subdivisions {
        if n == 0 {
            return Err(usage("--max-subdivisions must be positive"));
        }
        cfg = cfg.with_max_subdivisions(n);
    }
    Ok(cfg)
}

fn model_json(model: &PolarizabilityModel) -> Value {
    serde_json::to_value(model).expect("model serializes")
}

fn cross_check_cells(q: &Quantity) -> Vec<String> {
    match q.cross_check {
        Some(c) => vec![num(c.value), c.method.to_string(), num(c.rel_diff)],
        None => vec![String::new(), String::new(), String::new()],
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn finish(format: Format, doc: Document, table: Table) -> Outcome {
    Outcome::ok(match format {
        Format::Json => Emitted::Json(doc),
        Format::Csv => Emitted::Csv(table),
    })
}

/// Evaluate a sweep in parallel, keeping input order.
fn sweep<T, F>(points: &[f64], f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(f64) -> Result<T, CliError> + Sync,
{
    points.par_iter().map(|&p| f(p)).collect()
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = quadrature(cli)?;
    let units = cli.global.units;
    let format = cli.global.format.unwrap_or(Format::Json);
    let name = cli.command.name();
    let mut doc = Document::new(name, units);

    match &cli.command {
        Command::Diffusion {
            model,
            temperature,
            statistics,
            space,
        } => {
            let model = build_model(model)?;
            let stats: Statistics = parse_with(statistics, "statistics")?;
            let rows = sweep(&temperature.0, |t| {
                let env = ThermalEnvironment::new(t, stats)?;
                let r = match space {
                    Space::Momentum => diffusion_constant(&model, &env, &cfg)?,
                    Space::K => k_space_diffusion(&model, &env, &cfg)?,
                };
                Ok((t, Quantity::from_rate(&r, units)))
            })?;
            doc.model = Some(model_json(&model));
            doc.parameters = json!({
                "statistics": stats.as_str(),
                "space": match space { Space::Momentum => "momentum", Space::K => "k" },
            });
            let mut table = Table::new(&[
                "temperature_K", "statistics", "value", "unit", "method", "err_estimate",
                "cross_check_value", "cross_check_method", "cross_check_rel_diff",
            ]);
            for (t, q) in rows {
                doc.results.push(json!({"temperature_K": t, "diffusion": q}));
                let mut row = vec![num(t), stats.as_str().to_string()];
                row.extend(quantity_cells(&q));
                row.extend(cross_check_cells(&q));
                table.push(row);
            }
            Ok(finish(format, doc, table))
        }

        Command::Drag { model, temperature } => {
            let model = build_model(model)?;
            let two_level = matches!(model, PolarizabilityModel::TwoLevel { .. });
            let rows = sweep(&temperature.0, |t| {
                if two_level {
                    let quad = two_level_drag_quadrature(&model, t, &cfg)?;
                    let narrow = two_level_drag(&model, t)?;
                    Ok((t, Quantity::from_rate(&quad, units), None, Some(Quantity::from_rate(&narrow, units)), None))
                } else {
                    let d = drag_coefficient_nonrel(&model, t, &cfg)?;
                    let fdt = fluctuation_dissipation(&model, t, &cfg)?;
                    Ok((
                        t,
                        Quantity::from_rate(&d.m_xi, units),
                        d.xi.map(|x| Quantity::from_rate(&x, units)),
                        None,
                        Some(fdt.rel_diff),
                    ))
                }
            })?;
            doc.model = Some(model_json(&model));
            let mut table = Table::new(&[
                "temperature_K", "m_xi", "unit", "method", "err_estimate", "xi", "xi_unit",
                "narrow_line_m_xi", "fdt_rel_diff",
            ]);
            for (t, m_xi, xi, narrow, fdt) in rows {
                doc.results.push(json!({
                    "temperature_K": t,
                    "m_xi": m_xi,
                    "xi": xi,
                    "narrow_line_m_xi": narrow,
                    "fdt_rel_diff": fdt,
                }));
                let mut row = vec![num(t)];
                row.extend(quantity_cells(&m_xi));
                row.push(opt_num(xi.map(|q| q.value)));
                row.push(xi.map(|q| q.unit.to_string()).unwrap_or_default());
                row.push(opt_num(narrow.map(|q| q.value)));
                row.push(opt_num(fdt));
                table.push(row);
            }
            Ok(finish(format, doc, table))
        }

        Command::DragRelativistic {
            model,
            beta,
            temperature,
            particle_temperature,
            slope_limit,
        } => {
            let model = build_model(model)?;
            let t_lab = *temperature;
            let t_particle = particle_temperature.unwrap_or(t_lab);
            let rows = sweep(&beta.0, |b| {
                let state = RelativisticState::from_beta(b, t_lab, t_particle)?;
                let d = dual_path(&state, &model, &cfg)?;
                Ok((b, state.velocity, d))
            })?;
            doc.model = Some(model_json(&model));
            let mut params = json!({"temperature_K": t_lab, "particle_temperature_K": t_particle});
            if *slope_limit {
                let s = nonrel_slope_limit(&model, t_lab, &cfg)?;
                let fv = |v: f64| units.plain(v, Unit::ForcePerVelocity);
                params["slope_limit"] = json!({
                    "betas": s.betas,
                    "slopes": s.slopes.iter().map(|&v| fv(v)).collect::<Vec<PlainQuantity>>(),
                    "slope": Quantity {
                        value: fv(s.slope).value,
                        unit: fv(s.slope).unit,
                        method: "richardson",
                        err_estimate: (s.residual * s.slope).abs() * units.factor(Unit::ForcePerVelocity),
                        cross_check: None,
                    },
                    "richardson_residual": s.residual,
                    "slope_induced_only": fv(s.slope_induced_only),
                    "slope_induced_plus_dd": fv(s.slope_induced_plus_dd),
                    "ratio_to_induced_only": s.ratio_to_induced_only,
                });
            }
            doc.parameters = params;
            let mut table = Table::new(&[
                "beta", "velocity", "velocity_unit", "milton_force", "unit", "method", "err_estimate",
                "induced", "absorbed", "dd", "composition_total", "rel_diff",
            ]);
            for (b, v, d) in rows {
                let q = |r| Quantity::from_rate(r, units);
                let milton = q(&d.milton);
                let vel = units.plain(v, Unit::Velocity);
                doc.results.push(json!({
                    "beta": b,
                    "velocity": vel,
                    "milton": milton,
                    "induced": q(&d.composition.induced),
                    "absorbed": q(&d.composition.absorbed),
                    "dd": q(&d.composition.dd),
                    "composition_total": q(&d.composition.total),
                    "rel_diff": d.rel_diff,
                }));
                let mut row = vec![num(b), num(vel.value), vel.unit.to_string()];
                row.extend(quantity_cells(&milton));
                for r in [&d.composition.induced, &d.composition.absorbed, &d.composition.dd, &d.composition.total] {
                    row.push(num(q(r).value));
                }
                row.push(num(d.rel_diff));
                table.push(row);
            }
            Ok(finish(format, doc, table))
        }

        Command::Decoherence {
            model,
            temperature,
            separations,
        } => {
            let model = build_model(model)?;
            let curve = decoherence_curve(&model, *temperature, &separations.0, &cfg)?;
            doc.model = Some(model_json(&model));
            doc.parameters = json!({
                "temperature_K": temperature,
                "lambda_fit": curve.lambda_fit.as_ref().map(|l| json!({
                    "lambda": Quantity::from_rate(&l.lambda, units),
                    "extrapolation_residual": l.residual,
                })),
            });
            let mut table = Table::new(&[
                "separation", "separation_unit", "value", "unit", "method", "err_estimate",
                "f_over_d2", "f_over_d2_unit",
            ]);
            for (&d, f) in curve.separations.iter().zip(&curve.f_values) {
                let fq = Quantity::from_rate(f, units);
                let ratio = if d > 0.0 {
                    let mut r = f.scaled(1.0 / (d * d));
                    r.unit = Unit::WavenumberSquaredPerTime;
                    Some(Quantity::from_rate(&r, units))
                } else {
                    None
                };
                let sep = units.plain(d, Unit::Length);
                doc.results.push(json!({"separation": sep, "f": fq, "f_over_d2": ratio}));
                let mut row = vec![num(sep.value), sep.unit.to_string()];
                row.extend(quantity_cells(&fq));
                row.push(opt_num(ratio.map(|q| q.value)));
                row.push(ratio.map(|q| q.unit.to_string()).unwrap_or_default());
                table.push(row);
            }
            Ok(finish(format, doc, table))
        }

        Command::Lambda { model, temperature } => {
            let model = build_model(model)?;
            let rows = sweep(&temperature.0, |t| {
                let ex = lambda_from_limit(&model, t, &cfg)?;
                let closed = match model {
                    PolarizabilityModel::Sphere { .. } => Some(scattering_constant_lambda(&model, t)?),
                    _ => None,
                };
                Ok((t, ex, closed))
            })?;
            doc.model = Some(model_json(&model));
            let mut table = Table::new(&[
                "temperature_K", "value", "unit", "method", "err_estimate", "extrapolation_residual",
                "closed_form", "rel_diff",
            ]);
            for (t, ex, closed) in rows {
                let lq = Quantity::from_rate(&ex.lambda, units);
                let cq = closed.map(|c| Quantity::from_rate(&c, units));
                let rel = closed.map(|c| (ex.lambda.value - c.value).abs() / c.value.abs());
                doc.results.push(json!({
                    "temperature_K": t,
                    "lambda": lq,
                    "extrapolation_residual": ex.residual,
                    "closed_form": cq,
                    "rel_diff": rel,
                }));
                let mut row = vec![num(t)];
                row.extend(quantity_cells(&lq));
                row.push(num(ex.residual));
                row.push(opt_num(cq.map(|q| q.value)));
                row.push(opt_num(rel));
                table.push(row);
            }
            Ok(finish(format, doc, table))
        }

        Command::Spectrum {
            model,
            branch,
            temperature,
            x_grid,
            anchor_x,
            anchor_n,
        } => {
            let branch: SpectrumBranch = parse_with(branch, "spectrum branch")?;
            let wt = CGS.k_b * temperature / CGS.hbar;
            let n0 = anchor_n.unwrap_or_else(|| branch.analytic(*anchor_x, branch.canonical_constant()));
            let grid: Vec<f64> = x_grid.0.iter().map(|x| x * wt).collect();
            let sol = spectrum_ode_solve(branch, *temperature, anchor_x * wt, n0, &grid)?;
            let residual = match model.model {
                Some(_) => {
                    let m = build_model(model)?;
                    doc.model = Some(model_json(&m));
                    Some(equilibrium_residual(&m, *temperature, &cfg)?)
                }
                None => None,
            };
            doc.parameters = json!({
                "branch": branch.as_str(),
                "temperature_K": temperature,
                "anchor_x": anchor_x,
                "anchor_n": n0,
                "integration_constant": sol.integration_constant,
                "max_rel_deviation": sol.max_rel_deviation(*temperature),
                "equilibrium_residual": residual,
            });
            let mut table = Table::new(&[
                "x", "omega", "omega_unit", "n", "unit", "method", "err_estimate", "analytic",
            ]);
            for (&x, (&w, &n)) in x_grid.0.iter().zip(sol.omega_grid.iter().zip(&sol.n_values)) {
                let exact = branch.analytic(x, sol.integration_constant);
                // The analytic family member is the reference; its distance
                // from the ODE value is the error estimate.
                let q = Quantity::scalar(n, (n - exact).abs(), "ode");
                let omega = units.plain(w, Unit::Rate);
                doc.results.push(json!({"x": x, "omega": omega, "n": q, "analytic": exact}));
                let mut row = vec![num(x), num(omega.value), omega.unit.to_string()];
                row.extend(quantity_cells(&q));
                row.push(num(exact));
                table.push(row);
            }
            Ok(finish(format, doc, table))
        }

        Command::FokkerPlanck {
            model,
            mass,
            temperature,
            xi,
            v0,
            sigma,
            cells,
            half_width,
            dt,
            checkpoints,
        } => {
            let built = model.model.map(|_| build_model(model)).transpose()?;
            let m = mass
                .or_else(|| built.and_then(|b| b.mass()))
                .ok_or_else(|| usage("--mass is required unless the model has one"))?;
            let xi = match (xi, built) {
                (Some(x), _) => *x,
                (None, Some(b)) => drag_coefficient_nonrel(&b, *temperature, &cfg)?.m_xi.value / m,
                (None, None) => return Err(usage("--xi is required unless a --model is given")),
            };
            let vt = (CGS.k_b * temperature / m).sqrt();
            let f0 = VelocityDistribution::gaussian(m, *temperature, xi, v0 * vt, sigma * vt, *cells, *half_width)?;
            let (m0, var0) = (f0.mean(), f0.variance());
            let snaps = fokker_planck_checkpoints(&f0, &checkpoints.0, *dt)?;
            if let Some(b) = built {
                doc.model = Some(model_json(&b));
            }
            doc.parameters = json!({
                "mass": units.plain(m, Unit::Mass),
                "temperature_K": temperature,
                "xi": units.plain(xi, Unit::Rate),
                "thermal_velocity": units.plain(vt, Unit::Velocity),
                "cells": cells,
                "half_width": half_width,
                "xi_dt": dt,
            });
            let mut table = Table::new(&[
                "xi_t", "mean", "variance", "velocity_unit", "method", "analytic_mean",
                "analytic_variance", "l1_to_maxwell",
            ]);
            for s in &snaps {
                let (am, av) = ou_moments(m0, var0, xi, m, *temperature, s.xi_t / xi);
                let mean = s.mean();
                let var = s.variance();
                let vf = units.factor(Unit::Velocity);
                let v2f = units.factor(Unit::VelocitySquared);
                let mq = Quantity {
                    value: mean * vf,
                    unit: units.symbol(Unit::Velocity),
                    method: "finite_volume",
                    err_estimate: (mean - am).abs() * vf,
                    cross_check: None,
                };
                let vq = Quantity {
                    value: var * v2f,
                    unit: units.symbol(Unit::VelocitySquared),
                    method: "finite_volume",
                    err_estimate: (var - av).abs() * v2f,
                    cross_check: None,
                };
                let l1 = s.l1_to_maxwell();
                doc.results.push(json!({
                    "xi_t": s.xi_t,
                    "mean": mq,
                    "variance": vq,
                    "analytic_mean": am * vf,
                    "analytic_variance": av * v2f,
                    "l1_to_maxwell": l1,
                }));
                table.push(vec![
                    num(s.xi_t),
                    num(mq.value),
                    num(vq.value),
                    mq.unit.to_string(),
                    "finite_volume".into(),
                    num(am * vf),
                    num(av * v2f),
                    num(l1),
                ]);
            }
            Ok(finish(format, doc, table))
        }

        Command::Montecarlo {
            model,
            mode,
            seed,
            temperature,
            kicks,
            paths,
            sampling,
            beta,
            samples,
            xi,
            mass,
            v0,
            dt,
            checkpoints,
            scheme,
            modes,
            dump_paths,
        } => {
            let sampling: RecoilSampling = parse_with(sampling, "recoil sampling")?;
            match mode {
                McMode::Kicks => {
                    let model = build_model(model)?;
                    let mut spec = KickProcessSpec::with_kick_budget(model, *temperature, *kicks, *paths, *seed)?;
                    spec.sampling = sampling;
                    if let Some(b) = beta {
                        spec.beta = *b;
                    }
                    let r = simulate_kicks(&spec, &cfg)?;
                    doc.model = Some(model_json(&model));
                    doc.parameters = json!({
                        "mode": "kicks",
                        "seed": seed,
                        "temperature_K": temperature,
                        "beta": units.plain(spec.beta, Unit::Rate),
                        "paths": paths,
                        "frequency_bins": spec.frequency_bins,
                        "duration_over_beta": spec.duration,
                        "sampling": sampling,
                    });
                    let msq = Quantity::from_rate(&r.msq_momentum, units);
                    let d = Quantity::from_rate(&r.diffusion_estimate, units);
                    doc.results.push(json!({
                        "msq_momentum": msq,
                        "diffusion_estimate": d,
                        "binned_campbell": units.plain(r.binned_campbell, Unit::MomentumSquaredPerTime),
                        "kicks": r.kicks,
                        "precision_warning": r.precision_warning,
                    }));
                    let mut table = Table::new(&[
                        "quantity", "value", "unit", "method", "err_estimate",
                        "cross_check_value", "cross_check_method", "cross_check_rel_diff",
                    ]);
                    for (label, q) in [("msq_momentum", &msq), ("diffusion_estimate", &d)] {
                        let mut row = vec![label.to_string()];
                        row.extend(quantity_cells(q));
                        row.extend(cross_check_cells(q));
                        table.push(row);
                    }
                    Ok(finish(format, doc, table))
                }
                McMode::Recoil => {
                    if *samples < 100_000 {
                        return Err(usage("--samples must be at least 1e5 for the recoil moment"));
                    }
                    let est = recoil_second_moment(sampling, *samples as u64, *seed);
                    doc.parameters = json!({"mode": "recoil", "seed": seed, "sampling": sampling, "samples": samples});
                    let q = Quantity::scalar(est.mean, est.std_error, "monte_carlo");
                    doc.results.push(json!({"second_moment": q, "reference": 2.0 / 3.0, "z_score": est.z_score(2.0 / 3.0)}));
                    let mut table = Table::new(&["quantity", "value", "unit", "method", "err_estimate"]);
                    let mut row = vec!["second_moment".to_string()];
                    row.extend(quantity_cells(&q));
                    table.push(row);
                    Ok(finish(format, doc, table))
                }
                McMode::Ou => {
                    let scheme = match scheme.as_str() {
                        "euler_maruyama" | "euler" => OuScheme::EulerMaruyama,
                        "exact" => OuScheme::Exact,
                        other => return Err(usage(format!("unknown OU scheme '{other}'"))),
                    };
                    let spec = OuSpec {
                        xi: *xi,
                        mass: *mass,
                        temperature: *temperature,
                        v0: *v0,
                        n_paths: *paths,
                        t_final: *checkpoints.0.last().expect("non-empty sweep"),
                        dt: *dt,
                        seed: *seed,
                        scheme,
                    };
                    let ens = ou_trajectories(&spec, &checkpoints.0)?;
                    if let Some(path) = dump_paths {
                        let (times, samples) = ou_path_samples(&spec, &checkpoints.0)?;
                        let mut t = Table::new(&["path", "t", "velocity", "unit"]);
                        let vf = units.factor(Unit::Velocity);
                        for (p, s) in samples.iter().enumerate() {
                            for (tk, v) in times.iter().zip(s) {
                                t.push(vec![p.to_string(), num(*tk), num(v * vf), units.symbol(Unit::Velocity).into()]);
                            }
                        }
                        std::fs::write(path, t.render())
                            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
                    }
                    doc.parameters = json!({
                        "mode": "ou",
                        "seed": seed,
                        "scheme": scheme,
                        "xi": units.plain(*xi, Unit::Rate),
                        "mass": units.plain(*mass, Unit::Mass),
                        "temperature_K": temperature,
                        "paths": paths,
                        "dt": dt,
                    });
                    let mut table = Table::new(&[
                        "t", "mean", "mean_err", "variance", "variance_err", "velocity_unit",
                        "method", "analytic_mean", "analytic_variance",
                    ]);
                    let vf = units.factor(Unit::Velocity);
                    let v2f = units.factor(Unit::VelocitySquared);
                    for e in ens {
                        let mq = Quantity {
                            value: e.mean.mean * vf,
                            unit: units.symbol(Unit::Velocity),
                            method: "monte_carlo",
                            err_estimate: e.mean.std_error * vf,
                            cross_check: None,
                        };
                        let vq = Quantity {
                            value: e.variance * v2f,
                            unit: units.symbol(Unit::VelocitySquared),
                            method: "monte_carlo",
                            err_estimate: e.variance_std_error * v2f,
                            cross_check: None,
                        };
                        doc.results.push(json!({
                            "t": e.t,
                            "mean": mq,
                            "variance": vq,
                            "analytic_mean": e.analytic_mean * vf,
                            "analytic_variance": e.analytic_variance * v2f,
                        }));
                        table.push(vec![
                            num(e.t),
                            num(mq.value),
                            num(mq.err_estimate),
                            num(vq.value),
                            num(vq.err_estimate),
                            mq.unit.into(),
                            "monte_carlo".into(),
                            num(e.analytic_mean * vf),
                            num(e.analytic_variance * v2f),
                        ]);
                    }
                    Ok(finish(format, doc, table))
                }
                McMode::Fields => {
                    let spec = FieldSampleSpec {
                        mode_count: *modes,
                        sample_count: *samples,
                        seed: *seed,
                    };
                    let r = gaussian_independence_test(&spec)?;
                    let c = gaussian_independence_control(&spec)?;
                    doc.parameters = json!({"mode": "fields", "seed": seed, "modes": modes, "samples": samples});
                    let mut table = Table::new(&["case", "correlation", "correlation_bound", "max_cf_deviation", "cf_bound", "passed"]);
                    for (label, rep) in [("field", &r), ("control_y_equals_x", &c)] {
                        doc.results.push(json!({
                            "case": label,
                            "correlation": Quantity::scalar(rep.correlation, 1.0 / (rep.samples as f64).sqrt(), "monte_carlo"),
                            "correlation_bound": rep.correlation_bound,
                            "max_cf_deviation": Quantity::scalar(rep.max_cf_deviation(), 1.0 / (rep.samples as f64).sqrt(), "monte_carlo"),
                            "cf_bound": rep.cf_bound,
                            "grid": rep.grid,
                            "cf_deviation": rep.cf_deviation,
                            "passed": rep.passed(),
                        }));
                        table.push(vec![
                            label.into(),
                            num(rep.correlation),
                            num(rep.correlation_bound),
                            num(rep.max_cf_deviation()),
                            num(rep.cf_bound),
                            rep.passed().to_string(),
                        ]);
                    }
                    Ok(finish(format, doc, table))
                }
            }
        }

        Command::Air {
            radius,
            temperature,
            molecule_mass,
            number_density,
        } => {
            let rows = sweep(&temperature.0, |t| {
                let env = AirEnvironment::new(t, *molecule_mass, *number_density, *radius)?;
                Ok((t, Quantity::from_rate(&air_diffusion(&env)?, units)))
            })?;
            doc.parameters = json!({
                "radius": units.plain(*radius, Unit::Length),
                "molecule_mass": units.plain(*molecule_mass, Unit::Mass),
                "number_density": units.plain(*number_density, Unit::NumberDensity),
            });
            let mut table = Table::new(&[
                "temperature_K", "value", "unit", "method", "err_estimate",
                "cross_check_value", "cross_check_method", "cross_check_rel_diff",
            ]);
            for (t, q) in rows {
                doc.results.push(json!({"temperature_K": t, "diffusion": q}));
                let mut row = vec![num(t)];
                row.extend(quantity_cells(&q));
                row.extend(cross_check_cells(&q));
                table.push(row);
            }
            Ok(finish(format, doc, table))
        }

        Command::Verify { criteria } => {
            let ids: Vec<u8> = if criteria.is_empty() {
                CRITERIA.iter().map(|c| c.0).collect()
            } else {
                criteria.clone()
            };
            let results = ids
                .iter()
                .map(|&id| run_criterion(id, &cfg))
                .collect::<Result<Vec<_>, _>>()?;
            let success = results.iter().all(|r| r.passed);
            let emitted = match cli.global.format {
                None => Emitted::Text(verify_table(&results)),
                Some(Format::Json) => {
                    doc.parameters = json!({"passed": success});
                    doc.results = results.iter().map(|r| serde_json::to_value(r).expect("serializes")).collect();
                    Emitted::Json(doc)
                }
                Some(Format::Csv) => {
                    let mut t = Table::new(&["id", "name", "passed", "residual", "threshold", "seconds", "detail"]);
                    for r in &results {
                        t.push(vec![
                            r.id.to_string(),
                            r.name.into(),
                            r.passed.to_string(),
                            num(r.residual),
                            num(r.threshold),
                            format!("{:.3}", r.seconds),
                            r.detail.clone(),
                        ]);
                    }
                    Emitted::Csv(t)
                }
            };
            Ok(Outcome { emitted, success })
        }
    }
}

fn verify_table(results: &[CriterionResult]) -> String {
    let mut s = format!(
        "{:>3}  {:<4}  {:<36} {:>11} {:>11} {:>8}  {}\n",
        "id", "", "criterion", "residual", "threshold", "seconds", "worst check"
    );
    for r in results {
        s.push_str(&format!(
            "{:>3}  {:<4}  {:<36} {:>11.3e} {:>11.3e} {:>8.2}  {}\n",
            r.id,
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.residual,
            r.threshold,
            r.seconds,
            r.detail
        ));
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    s.push_str(&format!("{} of {} criteria passed\n", results.len() - failed, results.len()));
    s
}
