//! The five scenarios.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};
use sigma_forge::convergence::fit_order;
use sigma_forge::dualisation::{
    doubled_rep, dual_constants, graded_jacobi_check, jacobi_cancellation_check, s_action,
    s_squared_sign, verify_intertwining, Generator,
};
use sigma_forge::dynamics::{
    bianchi_residual, chain_identity_mismatch, doubled_current_via_rep, dual_field_strength,
    evolve_pcm_1p1, formulations_equivalence_check, formulations_mismatch,
    integrate_multipliers_1p1, map_dual_to_multiplier, on_shell_residuals, second_order_residual,
    second_order_terms, DualPotentialField, MultiplierField, SolverConfig,
};
use sigma_forge::exterior::{
    double_star_sign, ext_d, hodge, random_smooth_field, Signature, SmoothFieldSpec,
};
use sigma_forge::lie::{
    adjoint_rep, check_ad_invariance, named_algebra, trace_form, AlgebraDefinition, NamedAlgebra,
    StructureConstants,
};
use sigma_forge::parametrization::{
    current_from_strengths, field_strengths, noether_current_direct,
};
use sigma_forge::{
    Error, FormField64, Grid64, Mat64, Representation64, ScalarField64, StructureConstants64,
    Tensor3F64, TraceForm64, Trajectory64,
};

use crate::checks::Recorder;
use crate::config::{
    GridSpec, InitialData, RepresentationSpec, RunConfig, Scenario, SignatureSpec, SimulateSpec,
    Study, TraceFormSpec,
};
use crate::report::Report;
use crate::{CliError, Context};

/// Where a run reads relative paths from and writes dumps to.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub scenario: Scenario,
    /// Directory that relative algebra-file paths are resolved against.
    pub base_dir: PathBuf,
    pub dump_dir: Option<PathBuf>,
}

/// Mutable state shared by the scenario bodies.
struct Ctx<'a> {
    cfg: &'a RunConfig,
    rec: Recorder,
    data: BTreeMap<String, Value>,
    warnings: Vec<String>,
    dump_dir: Option<PathBuf>,
}

impl Ctx<'_> {
    fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.data.insert(key.into(), v.into());
    }

    fn dump_field(&self, name: &str, f: &FormField64) -> Result<(), CliError> {
        if let Some(dir) = &self.dump_dir {
            f.write_dump(dir.join(format!("{name}.json")))
                .ctx(&format!("writing {name}"))?;
        }
        Ok(())
    }
}

/// Executes one scenario.
pub fn run(cfg: RunConfig, opts: &RunOptions) -> Result<Report, CliError> {
    cfg.validate_for(opts.scenario)?;
    let start = Instant::now();
    if let Some(dir) = &opts.dump_dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut ctx = Ctx {
        cfg: &cfg,
        rec: Recorder::new(&cfg.thresholds)?,
        data: BTreeMap::new(),
        warnings: Vec::new(),
        dump_dir: opts.dump_dir.clone(),
    };
    match opts.scenario {
        Scenario::Validate => validate(&mut ctx, &opts.base_dir)?,
        other => {
            let model = Model::load(&cfg, &opts.base_dir)?;
            ctx.put("algebra_dim", model.sc.dim());
            match other {
                Scenario::Dualize => dualize(&mut ctx, &model)?,
                Scenario::Identities => identities(&mut ctx, &model)?,
                Scenario::Simulate => simulate(&mut ctx, &model)?,
                Scenario::Convergence => convergence(&mut ctx, &model)?,
                Scenario::Validate => unreachable!(),
            }
        }
    }
    let Ctx {
        rec,
        data,
        warnings,
        ..
    } = ctx;
    let include_timings = cfg.output.include_timings;
    let mut report = Report::new(opts.scenario, cfg, rec.into_records());
    report.data = data;
    report.warnings = warnings;
    if include_timings {
        let mut t = BTreeMap::new();
        t.insert("total_seconds".to_string(), start.elapsed().as_secs_f64());
        report.timings = Some(t);
    }
    Ok(report)
}

// ---------------------------------------------------------------- model

enum Source {
    Named(StructureConstants64, Representation64),
    File(AlgebraDefinition<f64>),
}

fn load_source(cfg: &RunConfig, base: &Path) -> Result<Source, CliError> {
    if cfg.algebra.parse::<NamedAlgebra>().is_ok() {
        let (sc, rep) = named_algebra::<f64>(&cfg.algebra).ctx("building the named algebra")?;
        return Ok(Source::Named(sc, rep));
    }
    let path = base.join(&cfg.algebra);
    if !path.is_file() {
        return Err(CliError::Config(format!(
            "`{}` is neither a built-in algebra nor a readable file",
            cfg.algebra
        )));
    }
    match AlgebraDefinition::<f64>::load(&path) {
        Ok(def) => Ok(Source::File(def)),
        Err(Error::Parse(msg)) | Err(Error::Io(msg)) => {
            Err(CliError::Config(format!("{}: {msg}", path.display())))
        }
        Err(e) => Err(CliError::numerical(
            format!("loading {}", path.display()),
            e,
        )),
    }
}

fn explicit_rep(
    mats: &[Vec<Vec<f64>>],
    sc: &StructureConstants64,
) -> Result<Representation64, CliError> {
    let mats = mats
        .iter()
        .map(|m| Mat64::from_rows(m))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Config(format!("representation: {e}")))?;
    if mats.len() != sc.dim() {
        return Err(CliError::Config(format!(
            "representation has {} matrices for a {}-dimensional algebra",
            mats.len(),
            sc.dim()
        )));
    }
    Representation64::new(mats).map_err(|e| CliError::Config(format!("representation: {e}")))
}

/// Representation chosen by the config, not yet checked against `sc`.
fn choose_rep(
    cfg: &RunConfig,
    sc: &StructureConstants64,
    own: Option<&Representation64>,
) -> Result<Representation64, CliError> {
    match &cfg.representation {
        RepresentationSpec::Keyword(k) if k == "default" => {
            Ok(own.cloned().unwrap_or_else(|| adjoint_rep(sc)))
        }
        RepresentationSpec::Keyword(k) if k == "adjoint" => Ok(adjoint_rep(sc)),
        RepresentationSpec::Keyword(k) => Err(CliError::Config(format!(
            "representation must be \"default\", \"adjoint\" or a list of matrices, got `{k}`"
        ))),
        RepresentationSpec::Explicit(m) => explicit_rep(m, sc),
    }
}

fn choose_trace_form(
    cfg: &RunConfig,
    rep: &Representation64,
    own: Option<&TraceForm64>,
) -> Result<sigma_forge::Result<TraceForm64>, CliError> {
    match &cfg.trace_form {
        TraceFormSpec::Keyword(k) if k == "from_rep" => {
            let uses_own_rep = cfg.representation == RepresentationSpec::default();
            Ok(match own {
                Some(t) if uses_own_rep => Ok(t.clone()),
                _ => trace_form(rep),
            })
        }
        TraceFormSpec::Keyword(k) => Err(CliError::Config(format!(
            "trace_form must be \"from_rep\" or a matrix, got `{k}`"
        ))),
        TraceFormSpec::Explicit(rows) => {
            let m =
                Mat64::from_rows(rows).map_err(|e| CliError::Config(format!("trace_form: {e}")))?;
            if m.rows() != rep.n_generators() || !m.is_square() {
                return Err(CliError::Config(format!(
                    "trace_form must be {n}×{n}",
                    n = rep.n_generators()
                )));
            }
            Ok(TraceForm64::from_matrix(&m))
        }
    }
}

/// Validated algebra, representation and trace form.
struct Model {
    sc: StructureConstants64,
    rep: Representation64,
    t: TraceForm64,
}

impl Model {
    fn load(cfg: &RunConfig, base: &Path) -> Result<Self, CliError> {
        let (sc, own_rep, own_t) = match load_source(cfg, base)? {
            Source::Named(sc, rep) => (sc, Some(rep), None),
            Source::File(def) => (def.structure, def.rep, def.trace_form),
        };
        let rep = choose_rep(cfg, &sc, own_rep.as_ref())?
            .validate(&sc)
            .ctx("checking the representation")?;
        let t = choose_trace_form(cfg, &rep, own_t.as_ref())?.ctx("building the trace form")?;
        Ok(Self { sc, rep, t })
    }
}

fn grid(spec: &GridSpec, refine: usize) -> Result<Grid64, CliError> {
    let shape: Vec<usize> = spec.shape.iter().map(|n| n * refine).collect();
    let h: Vec<f64> = match &spec.h {
        Some(h) => h.iter().map(|h| h / refine as f64).collect(),
        None => shape.iter().map(|&n| 1.0 / n as f64).collect(),
    };
    Grid64::new(shape, h, signature(spec.signature))
        .map_err(|e| CliError::Config(format!("grid: {e}")))
}

fn signature(s: SignatureSpec) -> Signature {
    match s {
        SignatureSpec::Lorentzian => Signature::Lorentzian,
        SignatureSpec::Euclidean => Signature::Euclidean,
    }
}

fn random_form(
    cfg: &RunConfig,
    grid: &Grid64,
    degree: usize,
    n_comp: usize,
    salt: u64,
) -> Result<FormField64, CliError> {
    Ok(random_smooth_field(
        grid,
        degree,
        n_comp,
        cfg.seed.wrapping_add(salt),
        cfg.fields.n_modes,
    )
    .ctx("sampling a random field")?
    .scale(cfg.fields.amplitude))
}

fn random_phi(cfg: &RunConfig, grid: &Grid64, g: usize) -> Result<ScalarField64, CliError> {
    ScalarField64::new(random_form(cfg, grid, 0, g, 0)?).ctx("building φ")
}

fn order(ctx: &mut Ctx, name: &str, h: &[f64], errors: &[f64]) -> Result<(), CliError> {
    // a vanishing error has no order; record it as a failure
    let p = fit_order(h, errors).unwrap_or(f64::NAN);
    ctx.rec.record(name, p);
    ctx.put(
        name,
        json!({ "h": h, "errors": errors, "order": if p.is_finite() { json!(p) } else { Value::Null } }),
    );
    Ok(())
}

// ------------------------------------------------------------- validate

fn validate(ctx: &mut Ctx, base: &Path) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let (sc, own_rep, own_t) = match load_source(cfg, base) {
        Ok(Source::Named(sc, rep)) => (sc, Some(rep), None),
        Ok(Source::File(def)) => (def.structure, def.rep, def.trace_form),
        // a bad definition file is the thing being validated
        Err(CliError::Numerical { source, .. }) => {
            match source {
                Error::AntisymmetryViolation { residual, indices } => {
                    ctx.rec.record("structure.antisymmetry", residual);
                    ctx.put("worst_indices", json!(indices));
                }
                Error::JacobiViolation { residual, indices } => {
                    ctx.rec.record("structure.antisymmetry", 0.0);
                    ctx.rec.record("structure.jacobi", residual);
                    ctx.put("worst_indices", json!(indices));
                }
                Error::HomomorphismViolation { residual, indices } => {
                    ctx.rec.record("structure.antisymmetry", 0.0);
                    ctx.rec.record("structure.jacobi", 0.0);
                    ctx.rec.record("representation.homomorphism", residual);
                    ctx.put("worst_indices", json!(indices));
                }
                other => return Err(CliError::numerical("loading the algebra", other)),
            }
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    let r = *sc.residuals();
    ctx.rec.record("structure.antisymmetry", r.antisymmetry);
    ctx.rec.record("structure.jacobi", r.jacobi);
    ctx.put("algebra_dim", sc.dim());
    ctx.put("abelian", sc.is_abelian());
    let rep = choose_rep(cfg, &sc, own_rep.as_ref())?;
    ctx.rec.record(
        "representation.homomorphism",
        rep.homomorphism_residual(&sc).0,
    );
    ctx.put("representation_dim", rep.n_rep());
    match choose_trace_form(cfg, &rep, own_t.as_ref())? {
        Ok(t) => {
            ctx.rec.record("trace_form.condition", t.condition());
            ctx.put("trace_form", json!(t.matrix().to_rows()));
            ctx.put("ad_invariance_residual", check_ad_invariance(&t, &sc));
        }
        Err(Error::DegenerateTraceForm { condition }) => {
            ctx.rec.record("trace_form.condition", condition);
        }
        Err(e) => return Err(CliError::numerical("building the trace form", e)),
    }
    Ok(())
}

// -------------------------------------------------------------- dualize

fn generator_name(g: Generator) -> String {
    match g {
        Generator::Original(i) => format!("T_{i}"),
        Generator::Dual(i) => format!("T̃_{i}"),
    }
}

fn dualize(ctx: &mut Ctx, m: &Model) -> Result<(), CliError> {
    let d = ctx.cfg.grid.as_ref().expect("validated").d;
    let da = dual_constants(&m.sc, &m.t, d).ctx("computing dual constants")?;
    let jac = graded_jacobi_check(&da);
    ctx.rec
        .record("dual.intertwining", verify_intertwining(&da));
    ctx.rec.record("dual.closure", jac.tt_dual);
    ctx.rec.record("dual.graded_jacobi", jac.max());
    // S² on originals against ★★ on the (D-1)-forms that carry the duals,
    // in the mostly-plus Lorentzian convention
    let s2 = s_squared_sign(d) as f64;
    let star2 = double_star_sign::<f64>(d - 1, d, 1);
    ctx.rec.record("dual.s_squared", (s2 - star2).abs());
    let res = doubled_rep(&da).residuals(&da);
    ctx.rec.record(
        "dual.doubled_rep",
        res.original_original
            .max(res.original_dual)
            .max(res.dual_products),
    );
    let g = m.sc.dim();
    let diff_from_c = (0..g)
        .map(|n| (da.d_matrix(n) - &m.sc.ad_matrix(n)).max_abs())
        .fold(0.0, f64::max);
    let ad_inv = check_ad_invariance(&m.t, &m.sc);
    if ad_inv < 1e-12 {
        ctx.rec.record("dual.invariant_form", diff_from_c);
    }

    let nonzeros: Vec<Value> = da
        .d_tensor()
        .nonzeros()
        .into_iter()
        .map(|(l, mm, i, v)| json!([l, mm, i, v]))
        .collect();
    ctx.put("spacetime_dim", d);
    ctx.put("d_tensor_nonzeros", nonzeros);
    ctx.put("d_tensor_layout", "[l, m, i, D^l_mi]");
    ctx.put("max_abs_d_minus_c", diff_from_c);
    ctx.put("trace_form", json!(m.t.matrix().to_rows()));
    ctx.put("trace_form_condition", m.t.condition());
    ctx.put("ad_invariance_residual", ad_inv);
    ctx.put(
        "graded_jacobi",
        json!({
            "ttt": jac.ttt,
            "tt_dual": jac.tt_dual,
            "t_dual_dual": jac.t_dual_dual,
            "dual_dual_dual": jac.dual_dual_dual,
        }),
    );
    ctx.put(
        "dual_parity",
        format!("{:?}", da.dual_parity()).to_lowercase(),
    );
    let table: Vec<Value> = [Generator::Original(0), Generator::Dual(0)]
        .into_iter()
        .map(|gen| {
            let (img, sign) = s_action(gen, d);
            json!({ "from": generator_name(gen).replace('0', "i"), "to": generator_name(img).replace('0', "i"), "sign": sign })
        })
        .collect();
    ctx.put("s_table", table);
    ctx.put("s_squared_sign", s2);
    Ok(())
}

// ----------------------------------------------------------- identities

fn broken_su2() -> StructureConstants64 {
    let (sc, _) = named_algebra::<f64>("su2").expect("built in");
    let mut c: Tensor3F64 = sc.tensor().clone();
    // [T0, T1] = T2 + T0 violates Jacobi
    c[(0, 0, 1)] = 1.0;
    c[(0, 1, 0)] = -1.0;
    StructureConstants::unchecked(c).expect("cubic tensor")
}

fn identities(ctx: &mut Ctx, m: &Model) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let spec = cfg.grid.as_ref().expect("validated");
    let (g0, g1) = (grid(spec, 1)?, grid(spec, 2)?);
    let d = spec.d;
    let n_g = m.sc.dim();
    let s = g0.signature().s();

    let mut dd = 0.0f64;
    let mut ss = 0.0f64;
    for p in 0..=d {
        let a = random_form(cfg, &g0, p, n_g, 100 + p as u64)?;
        if p + 2 <= d {
            dd = dd.max(ext_d(&ext_d(&a).ctx("d")?).ctx("d")?.norm_linf());
        }
        let twice = hodge(&hodge(&a).ctx("★")?).ctx("★")?;
        let sign = double_star_sign::<f64>(p, d, s);
        ss = ss.max(twice.try_sub(&a.scale(sign)).ctx("★★")?.norm_linf());
    }
    ctx.rec.record("exterior.dd", dd);
    ctx.rec.record("exterior.double_star", ss);

    let noether = |grid: &Grid64| -> Result<f64, CliError> {
        let phi = random_phi(cfg, grid, n_g)?;
        let f = field_strengths(&phi, &m.sc).ctx("field strengths")?;
        let direct = noether_current_direct(&phi, &m.rep).ctx("g⁻¹dg")?;
        let from_f = current_from_strengths(&f, &m.rep).ctx("F^m R_m")?;
        Ok(direct.try_sub(&from_f).ctx("current")?.norm_linf())
    };
    let hs = [g0.spacing()[0], g1.spacing()[0]];
    let errs = [noether(&g0)?, noether(&g1)?];
    order(ctx, "noether.current_order", &hs, &errs)?;

    let phi = random_phi(cfg, &g0, n_g)?;
    let f = field_strengths(&phi, &m.sc).ctx("field strengths")?;
    let bianchi = bianchi_residual(&f, &m.sc).ctx("Bianchi residual")?;
    if m.sc.is_abelian() {
        ctx.rec.record("bianchi.abelian_exact", bianchi.norm_linf());
    } else {
        let phi1 = random_phi(cfg, &g1, n_g)?;
        let f1 = field_strengths(&phi1, &m.sc).ctx("field strengths")?;
        let e1 = bianchi_residual(&f1, &m.sc)
            .ctx("Bianchi residual")?
            .norm_linf();
        order(ctx, "bianchi.order", &hs, &[bianchi.norm_linf(), e1])?;
    }

    let seed = cfg.seed;
    ctx.rec.record(
        "cancellation.jacobi",
        jacobi_cancellation_check(&m.sc, &g0, seed).ctx("Jacobi cancellation")?,
    );
    ctx.rec.record(
        "cancellation.broken_control",
        jacobi_cancellation_check(&broken_su2(), &g0, seed).ctx("Jacobi cancellation control")?,
    );

    let ad_inv = check_ad_invariance(&m.t, &m.sc);
    ctx.put("ad_invariance_residual", ad_inv);
    if ad_inv < 1e-12 {
        let (_, source) = second_order_terms(&f, &m.sc, &m.t).ctx("second-order source")?;
        ctx.rec
            .record("second_order.invariant_source", source.norm_linf());
    }

    let da = dual_constants(&m.sc, &m.t, d).ctx("computing dual constants")?;
    ctx.rec.record(
        "chain.cartan_maurer",
        chain_identity_mismatch(&f, &da).ctx("dual Cartan–Maurer")?,
    );

    // off-shell: F and φ̃ are independent random forms
    let f_rand = random_form(cfg, &g0, 1, n_g, 200)?;
    let dual =
        DualPotentialField::new(random_form(cfg, &g0, d - 2, n_g, 300)?).ctx("dual potential")?;
    ctx.rec.record(
        "formulations.equivalence",
        formulations_equivalence_check(&f_rand, &dual, &da).ctx("equivalence")?,
    );
    let a = map_dual_to_multiplier(&dual, &m.t).ctx("multiplier map")?;
    let flipped = MultiplierField::new(a.into_field().scale(-1.0)).ctx("multiplier")?;
    ctx.rec.record(
        "formulations.wrong_sign",
        formulations_mismatch(&f_rand, &dual, &flipped, &da).ctx("equivalence control")?,
    );

    if d == 2 {
        let err = |grid: &Grid64| -> Result<f64, CliError> {
            let phi = random_phi(cfg, grid, n_g)?;
            let f = field_strengths(&phi, &m.sc).ctx("field strengths")?;
            let dual = DualPotentialField::new(random_form(cfg, grid, 0, n_g, 400)?)
                .ctx("dual potential")?;
            let via_rep = doubled_current_via_rep(&phi, &dual, &da).ctx("doubled current")?;
            let direct = dual_field_strength(&f, &dual, &da).ctx("dual field strength")?;
            Ok(via_rep.try_sub(&direct).ctx("doubled current")?.norm_linf())
        };
        let errs = [err(&g0)?, err(&g1)?];
        order(ctx, "doubled.group_current_order", &hs, &errs)?;
    }

    ctx.put("spacetime_dim", d);
    ctx.dump_field("phi", phi.field())?;
    ctx.dump_field("field_strengths", &f)?;
    ctx.dump_field("bianchi_residual", &bianchi)?;
    let second = second_order_residual(&f, &m.sc, &m.t).ctx("second-order residual")?;
    ctx.dump_field("second_order_residual", &second)?;
    Ok(())
}

// -------------------------------------------------------------- simulate

/// A solver run derived from the `[simulate]` table at resolution `n_x`.
struct Run {
    cfg: SolverConfig<f64>,
    /// Exact `φ(t_end)` per point, when known.
    exact: Option<Vec<f64>>,
}

fn check_len(v: &[f64], g: usize, what: &str) -> Result<(), CliError> {
    if v.len() != g {
        return Err(CliError::Config(format!(
            "{what} has {} entries for a {g}-dimensional algebra",
            v.len()
        )));
    }
    Ok(())
}

fn build_run(cfg: &RunConfig, spec: &SimulateSpec, m: &Model, n_x: usize) -> Result<Run, CliError> {
    let g = m.sc.dim();
    let h = spec.length / n_x as f64;
    // an explicit dt is taken at the configured resolution and scaled with h
    let dt = match spec.dt {
        Some(dt) => dt * spec.n_x as f64 / n_x as f64,
        None => spec.courant.unwrap_or(0.25) * h,
    };
    let every = spec
        .snapshot_every
        .unwrap_or_else(|| ((h / dt).round() as usize).max(1));
    let base = SolverConfig::new(m.sc.clone(), m.t.clone(), n_x, spec.length, dt, spec.t_end)
        .with_snapshot_every(every);
    let (l, t_end) = (spec.length, spec.t_end);
    Ok(match &spec.initial {
        InitialData::Homogeneous { velocity } => {
            check_len(velocity, g, "initial.velocity")?;
            let exact = (0..n_x)
                .flat_map(|_| velocity.iter().map(|v| v * t_end))
                .collect();
            Run {
                cfg: base.with_initial(|_| (vec![0.0; g], velocity.clone())),
                exact: Some(exact),
            }
        }
        InitialData::Wave {
            direction,
            amplitude,
            mode,
        } => {
            check_len(direction, g, "initial.direction")?;
            let k = TAU * *mode as f64 / l;
            let a = *amplitude;
            let profile = |x: f64, t: f64| -> Vec<f64> {
                direction
                    .iter()
                    .map(|v| a * (k * (x - t)).sin() * v)
                    .collect()
            };
            // right-moving, exact for abelian algebras only
            let exact = m.sc.is_abelian().then(|| {
                (0..n_x)
                    .flat_map(|p| profile(p as f64 * h, t_end))
                    .collect()
            });
            Run {
                cfg: base.with_initial(|x| {
                    let vel = direction
                        .iter()
                        .map(|v| -a * k * (k * x).cos() * v)
                        .collect();
                    (profile(x, 0.0), vel)
                }),
                exact,
            }
        }
        InitialData::Smooth {
            amplitude,
            velocity_amplitude,
        } => {
            let sample = |salt: u64, amp: f64| -> Result<Vec<f64>, CliError> {
                let s =
                    SmoothFieldSpec::new(1, 0, g, cfg.seed.wrapping_add(salt), cfg.fields.n_modes)
                        .ctx("sampling initial data")?;
                Ok((0..n_x)
                    .flat_map(|p| {
                        (0..g)
                            .map(|a| amp * s.eval_lattice(&[n_x], &[p as i64], a, 0))
                            .collect::<Vec<_>>()
                    })
                    .collect())
            };
            let mut c = base;
            c.phi0 = sample(500, *amplitude)?;
            c.phi_dot0 = sample(600, *velocity_amplitude)?;
            Run {
                cfg: c,
                exact: None,
            }
        }
    })
}

fn evolve(run: &Run) -> Result<Trajectory64, CliError> {
    evolve_pcm_1p1(&run.cfg).ctx("evolving the field equations")
}

fn final_error_max(traj: &Trajectory64, exact: &[f64]) -> f64 {
    traj.phi
        .last()
        .expect("at least one snapshot")
        .iter()
        .zip(exact)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn final_error_l2(traj: &Trajectory64, exact: &[f64]) -> f64 {
    let sum: f64 = traj
        .phi
        .last()
        .expect("at least one snapshot")
        .iter()
        .zip(exact)
        .map(|(a, b)| (a - b).powi(2))
        .sum();
    (sum * traj.h).sqrt()
}

/// Drops a final snapshot that was taken off the regular spacing (when the
/// step count is not a multiple of the snapshot interval).
fn uniform_snapshots(traj: &Trajectory64) -> Result<Trajectory64, CliError> {
    let n = traj.len();
    if n < 3 || traj.snapshot_spacing().is_ok() {
        return Ok(traj.clone());
    }
    Trajectory64::from_snapshots(
        traj.times[..n - 1].to_vec(),
        traj.phi[..n - 1].to_vec(),
        traj.velocity[..n - 1].to_vec(),
        traj.n_x,
        traj.n_g,
        traj.h,
    )
    .ctx("trimming the trajectory")
}

/// On-shell norms skip two slices at each end of the time axis.
const MIN_SNAPSHOTS: usize = 5;

fn simulate(ctx: &mut Ctx, m: &Model) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let spec = cfg.simulate.as_ref().expect("validated");
    let run = build_run(cfg, spec, m, spec.n_x)?;
    let traj = evolve(&run)?;
    ctx.warnings.extend(traj.warnings.iter().cloned());

    match (&spec.initial, &run.exact) {
        (InitialData::Homogeneous { .. }, Some(exact)) => {
            ctx.rec
                .record("solver.homogeneous_error", final_error_max(&traj, exact));
        }
        (InitialData::Wave { .. }, Some(exact)) => {
            let e0 = final_error_l2(&traj, exact);
            ctx.rec.record("solver.wave_error", e0);
            let fine = build_run(cfg, spec, m, 2 * spec.n_x)?;
            let t1 = evolve(&fine)?;
            let e1 = final_error_l2(&t1, fine.exact.as_ref().expect("abelian"));
            order(ctx, "solver.wave_order", &[traj.h, t1.h], &[e0, e1])?;
        }
        (InitialData::Wave { .. }, None) => ctx.warnings.push(
            "travelling-wave error skipped: no exact solution for a non-abelian algebra".into(),
        ),
        _ => {}
    }
    ctx.rec
        .record("solver.energy_drift", traj.max_relative_energy_drift());

    let uniform = uniform_snapshots(&traj)?;
    if uniform.len() >= MIN_SNAPSHOTS {
        let traj = &uniform;
        let on = on_shell_residuals(traj, &m.sc, &m.t).ctx("on-shell residuals")?;
        ctx.rec.record("onshell.bianchi", on.bianchi);
        ctx.rec.record("onshell.second_order", on.second_order);
        let hist = integrate_multipliers_1p1(traj, &m.sc, &m.t).ctx("multiplier integration")?;
        ctx.rec
            .record("multipliers.cross_residual", hist.cross_residual);
    } else {
        ctx.warnings.push(format!(
            "only {} evenly spaced snapshots; on-shell and multiplier checks need {MIN_SNAPSHOTS}",
            uniform.len()
        ));
    }

    ctx.put("snapshots", traj.len());
    ctx.put("h", traj.h);
    ctx.put("t_final", *traj.times.last().expect("nonempty"));
    ctx.put("energy_initial", traj.energies[0]);
    ctx.put("energy_final", *traj.energies.last().expect("nonempty"));
    if let Some(dir) = &ctx.dump_dir {
        traj.write_csv(dir.join("energy.csv"))
            .ctx("writing energy.csv")?;
        let field = uniform.spacetime_field().ctx("spacetime field")?;
        ctx.dump_field("phi_spacetime", field.field())?;
    }
    Ok(())
}

// ----------------------------------------------------------- convergence

fn convergence(ctx: &mut Ctx, m: &Model) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let conv = cfg.convergence.as_ref().expect("validated");
    let n_g = m.sc.dim();
    let levels = &conv.levels;
    let mut hs = Vec::new();
    let mut errs = Vec::new();
    let name = match conv.study {
        Study::Noether | Study::Bianchi => {
            let (d, sig) = match (&cfg.grid, conv.study) {
                (Some(gs), _) => (gs.d, signature(gs.signature)),
                (None, _) => (2, Signature::Lorentzian),
            };
            if conv.study == Study::Bianchi && m.sc.is_abelian() {
                return Err(CliError::Config(
                    "the discrete Bianchi residual vanishes identically for abelian algebras"
                        .into(),
                ));
            }
            for &n in levels {
                let grid = Grid64::cubic(d, n, 1.0, sig)
                    .map_err(|e| CliError::Config(format!("grid: {e}")))?;
                let phi = random_phi(cfg, &grid, n_g)?;
                let f = field_strengths(&phi, &m.sc).ctx("field strengths")?;
                let e = if conv.study == Study::Noether {
                    let direct = noether_current_direct(&phi, &m.rep).ctx("g⁻¹dg")?;
                    let from_f = current_from_strengths(&f, &m.rep).ctx("F^m R_m")?;
                    direct.try_sub(&from_f).ctx("current")?.norm_linf()
                } else {
                    bianchi_residual(&f, &m.sc)
                        .ctx("Bianchi residual")?
                        .norm_linf()
                };
                hs.push(grid.spacing()[0]);
                errs.push(e);
            }
            if conv.study == Study::Noether {
                "convergence.noether"
            } else {
                "convergence.bianchi"
            }
        }
        Study::Wave => {
            if !m.sc.is_abelian() {
                return Err(CliError::Config(
                    "the wave study needs an abelian algebra (exact solution)".into(),
                ));
            }
            let spec = match &cfg.simulate {
                Some(
                    s @ SimulateSpec {
                        initial: InitialData::Wave { .. },
                        ..
                    },
                ) => s.clone(),
                Some(s) => SimulateSpec {
                    initial: default_wave(n_g),
                    dt: None,
                    snapshot_every: Some(usize::MAX),
                    ..s.clone()
                },
                None => SimulateSpec {
                    n_x: levels[0],
                    length: 1.0,
                    dt: None,
                    courant: None,
                    t_end: 1.0,
                    snapshot_every: Some(usize::MAX),
                    initial: default_wave(n_g),
                },
            };
            for &n in levels {
                let run = build_run(cfg, &spec, m, n)?;
                let traj = evolve(&run)?;
                hs.push(traj.h);
                errs.push(final_error_l2(&traj, run.exact.as_ref().expect("abelian")));
            }
            "convergence.wave"
        }
        Study::OnShell | Study::Multipliers => {
            let spec = cfg.simulate.as_ref().expect("validated");
            for &n in levels {
                // snapshots one grid spacing apart so the spacetime grid
                // refines isotropically
                let spec = SimulateSpec {
                    snapshot_every: None,
                    ..spec.clone()
                };
                let run = build_run(cfg, &spec, m, n)?;
                let traj = evolve(&run)?;
                let e = if conv.study == Study::OnShell {
                    on_shell_residuals(&traj, &m.sc, &m.t)
                        .ctx("on-shell residuals")?
                        .second_order
                } else {
                    integrate_multipliers_1p1(&traj, &m.sc, &m.t)
                        .ctx("multiplier integration")?
                        .cross_residual
                };
                hs.push(traj.h);
                errs.push(e);
            }
            if conv.study == Study::OnShell {
                "convergence.on_shell"
            } else {
                "convergence.multipliers"
            }
        }
    };
    ctx.put("levels", json!(levels));
    order(ctx, name, &hs, &errs)
}

fn default_wave(g: usize) -> InitialData {
    let mut direction = vec![0.0; g];
    direction[0] = 1.0;
    InitialData::Wave {
        direction,
        amplitude: 1.0,
        mode: 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(scenario: Scenario) -> RunOptions {
        RunOptions {
            scenario,
            base_dir: PathBuf::from("."),
            dump_dir: None,
        }
    }

    fn run_toml(scenario: Scenario, text: &str) -> Report {
        run(RunConfig::from_toml_str(text).unwrap(), &opts(scenario)).unwrap()
    }

    #[test]
    fn validate_su2_is_exact() {
        let r = run_toml(Scenario::Validate, "algebra = \"su2\"");
        assert!(r.pass, "{}", r.summary());
        assert_eq!(r.check("structure.jacobi").unwrap().value, Some(0.0));
    }

    #[test]
    fn heisenberg_trace_form_is_degenerate() {
        let r = run_toml(Scenario::Validate, "algebra = \"heisenberg3\"");
        assert!(!r.pass);
        assert!(!r.check("trace_form.condition").unwrap().pass);
        assert!(r.check("structure.jacobi").unwrap().pass);
    }

    #[test]
    fn unknown_algebra_is_a_config_error() {
        let cfg = RunConfig::from_toml_str("algebra = \"e8\"").unwrap();
        let err = run(cfg, &opts(Scenario::Validate)).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn dualize_killing_su2_gives_c() {
        let r = run_toml(
            Scenario::Dualize,
            "algebra = \"su2\"\nrepresentation = \"adjoint\"\n[grid]\nd = 3\nshape = [4, 4, 4]",
        );
        assert!(r.pass, "{}", r.summary());
        assert!(r.check("dual.invariant_form").is_some());
        assert_eq!(r.data["d_tensor_nonzeros"].as_array().unwrap().len(), 6);
    }

    #[test]
    fn dualize_skewed_form_has_no_invariant_check() {
        let r = run_toml(
            Scenario::Dualize,
            "algebra = \"so3\"\ntrace_form = [[1.0,0.0,0.0],[0.0,1.0,0.0],[0.0,0.0,2.0]]\n[grid]\nd = 2\nshape = [4, 4]",
        );
        assert!(r.pass, "{}", r.summary());
        assert!(r.check("dual.invariant_form").is_none());
    }

    #[test]
    fn homogeneous_simulation() {
        let r = run_toml(
            Scenario::Simulate,
            r#"
            algebra = "su2"
            representation = "adjoint"
            [simulate]
            n_x = 32
            dt = 1e-3
            snapshot_every = 50
            initial = { kind = "homogeneous", velocity = [0.4, -0.3, 0.5] }
            "#,
        );
        assert!(r.pass, "{}", r.summary());
        assert!(r.check("solver.homogeneous_error").unwrap().value.unwrap() < 1e-6);
    }

    #[test]
    fn singular_evolution_is_a_numerical_abort() {
        let text = r#"
            algebra = "su2"
            [simulate]
            n_x = 8
            dt = 0.125
            t_end = 0.25
            initial = { kind = "homogeneous", velocity = [50.26548245743669, 0.0, 0.0] }
        "#;
        let err = run(
            RunConfig::from_toml_str(text).unwrap(),
            &opts(Scenario::Simulate),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 3, "{err}");
    }
}
