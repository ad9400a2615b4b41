//! Method-of-lines solver for the principal chiral model in `1+1`
//! dimensions.
//!
//! With `t = x⁰`, `F_t = W(φ) φ̇` and `F_x = W(φ) ∂_xφ`, the second-order
//! equation reads
//!
//! ```text
//! T ∂_t F_t = T ∂_x F_x + B(F_x, F_x) - B(F_t, F_t),   B(u, w)_l = C^k_{ln} T_{mk} u^n w^m
//! ```
//!
//! and `∂_t F_t = W φ̈ + (∂_t W) φ̇`, so each point solves
//! `T W φ̈ = T ∂_x F_x + B(F_x, F_x) - B(F_t, F_t) - T (∂_t W) φ̇`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::exterior::{FormField, Signature, SpacetimeGrid};
use crate::lie::{StructureConstants, TraceForm};
use crate::linalg::{Mat, Tensor3};
use crate::parametrization::{build_m, field_strengths, w_derivative_apply, w_matrix, ScalarField};
use crate::scalar::Scalar;

use super::residuals::{bianchi_residual, second_order_residual};

/// Largest 1-norm condition number of `T·W(φ)` accepted by the per-point
/// solve. `W` degenerates where `M(φ)` has an eigenvalue in `2πi ℤ∖{0}`.
pub const MAX_EVOLUTION_CONDITION: f64 = 1e12;

/// Inputs of [`evolve_pcm_1p1`]. Field arrays are point-major:
/// `value[point * n_g + a]`.
#[derive(Clone, Debug)]
pub struct SolverConfig<S> {
    pub structure: StructureConstants<S>,
    pub trace_form: TraceForm<S>,
    pub n_x: usize,
    pub length: S,
    pub dt: S,
    pub t_end: S,
    /// Record a snapshot every this many steps.
    pub snapshot_every: usize,
    pub phi0: Vec<S>,
    pub phi_dot0: Vec<S>,
}

impl<S: Scalar> SolverConfig<S> {
    /// Zero initial data on `n_x` points of a circle of circumference
    /// `length`.
    pub fn new(
        structure: StructureConstants<S>,
        trace_form: TraceForm<S>,
        n_x: usize,
        length: S,
        dt: S,
        t_end: S,
    ) -> Self {
        let g = structure.dim();
        Self {
            structure,
            trace_form,
            n_x,
            length,
            dt,
            t_end,
            snapshot_every: 1,
            phi0: vec![S::zero(); n_x * g],
            phi_dot0: vec![S::zero(); n_x * g],
        }
    }

    /// Fills `φ(0)` and `φ̇(0)` from a function of the position.
    pub fn with_initial(mut self, f: impl Fn(S) -> (Vec<S>, Vec<S>)) -> Self {
        let g = self.structure.dim();
        let h = self.h();
        for p in 0..self.n_x {
            let (phi, vel) = f(h * S::from_usize_lossy(p));
            self.phi0[p * g..(p + 1) * g].copy_from_slice(&phi[..g]);
            self.phi_dot0[p * g..(p + 1) * g].copy_from_slice(&vel[..g]);
        }
        self
    }

    pub fn with_snapshot_every(mut self, every: usize) -> Self {
        self.snapshot_every = every;
        self
    }

    pub fn h(&self) -> S {
        self.length / S::from_usize_lossy(self.n_x)
    }

    fn validate(&self) -> Result<()> {
        let g = self.structure.dim();
        if self.trace_form.dim() != g {
            return Err(Error::ShapeMismatch(
                "trace form and algebra disagree".into(),
            ));
        }
        if self.n_x < crate::exterior::MIN_EXTENT {
            return Err(Error::InvalidGrid(format!(
                "need at least {} points",
                crate::exterior::MIN_EXTENT
            )));
        }
        if !(self.length > S::zero()) || !(self.dt > S::zero()) || !(self.t_end > S::zero()) {
            return Err(Error::InvalidArgument(
                "length, dt and t_end must be positive".into(),
            ));
        }
        if self.snapshot_every == 0 {
            return Err(Error::InvalidArgument(
                "snapshot_every must be at least 1".into(),
            ));
        }
        if self.phi0.len() != self.n_x * g || self.phi_dot0.len() != self.n_x * g {
            return Err(Error::ShapeMismatch(
                "initial data has the wrong length".into(),
            ));
        }
        if self
            .phi0
            .iter()
            .chain(&self.phi_dot0)
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidArgument("initial data is not finite".into()));
        }
        Ok(())
    }
}

/// Snapshots of an evolution on a periodic line.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<S> {
    pub times: Vec<S>,
    /// `φ` per snapshot, point-major.
    pub phi: Vec<Vec<S>>,
    /// `φ̇` per snapshot, point-major.
    pub velocity: Vec<Vec<S>>,
    pub energies: Vec<S>,
    pub warnings: Vec<String>,
    pub n_x: usize,
    pub n_g: usize,
    pub h: S,
}

impl<S: Scalar> Trajectory<S> {
    /// Wraps externally produced snapshots; energies are left at zero.
    pub fn from_snapshots(
        times: Vec<S>,
        phi: Vec<Vec<S>>,
        velocity: Vec<Vec<S>>,
        n_x: usize,
        n_g: usize,
        h: S,
    ) -> Result<Self> {
        if times.len() != phi.len() || times.len() != velocity.len() {
            return Err(Error::ShapeMismatch("snapshot counts disagree".into()));
        }
        if phi.iter().chain(&velocity).any(|s| s.len() != n_x * n_g) {
            return Err(Error::ShapeMismatch("snapshot has the wrong length".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "times must be strictly increasing".into(),
            ));
        }
        let energies = vec![S::zero(); times.len()];
        Ok(Self {
            times,
            phi,
            velocity,
            energies,
            warnings: Vec::new(),
            n_x,
            n_g,
            h,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Common spacing of the snapshot times, if uniform to roundoff.
    pub fn snapshot_spacing(&self) -> Result<S> {
        if self.times.len() < 2 {
            return Err(Error::InvalidArgument("need at least two snapshots".into()));
        }
        let delta =
            (self.times[self.len() - 1] - self.times[0]) / S::from_usize_lossy(self.len() - 1);
        let tol = S::lit(1e-9) * (S::one() + self.times[self.len() - 1].abs());
        if self
            .times
            .windows(2)
            .any(|w| (w[1] - w[0] - delta).abs() > tol)
        {
            return Err(Error::InvalidArgument(
                "snapshot times are not uniform".into(),
            ));
        }
        Ok(delta)
    }

    /// The snapshots as a scalar field on a 2D Lorentzian grid with axes
    /// `(t, x)`. The time axis is not periodic: stencils that wrap around it
    /// are meaningless, so norms should skip the first and last two slices.
    pub fn spacetime_field(&self) -> Result<ScalarField<S>> {
        let delta = self.snapshot_spacing()?;
        let grid = SpacetimeGrid::new(
            vec![self.len(), self.n_x],
            vec![delta, self.h],
            Signature::Lorentzian,
        )?;
        let (n_x, g) = (self.n_x, self.n_g);
        let mut field = FormField::zeros(&grid, 0, g)?;
        for (i, snap) in self.phi.iter().enumerate() {
            for p in 0..n_x {
                for a in 0..g {
                    field.set(i * n_x + p, a, 0, snap[p * g + a]);
                }
            }
        }
        ScalarField::with_cap(field, S::max_value())
    }

    /// Delimited time series: `t, energy, relative energy drift`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,energy,relative_energy_drift\n");
        let e0 = self.energies.first().copied().unwrap_or_else(S::zero);
        for (t, e) in self.times.iter().zip(&self.energies) {
            let drift = if e0 != S::zero() {
                ((*e - e0) / e0).abs()
            } else {
                (*e - e0).abs()
            };
            let _ = writeln!(
                out,
                "{:e},{:e},{:e}",
                t.to_f64_lossy(),
                e.to_f64_lossy(),
                drift.to_f64_lossy()
            );
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// `max_t |E(t) - E(0)| / |E(0)|`.
    pub fn max_relative_energy_drift(&self) -> S {
        let e0 = self.energies.first().copied().unwrap_or_else(S::zero);
        let scale = if e0 != S::zero() { e0.abs() } else { S::one() };
        self.energies
            .iter()
            .fold(S::zero(), |acc, &e| acc.max((e - e0).abs() / scale))
    }
}

/// Per-point `F_t` and `F_x` on a periodic line.
pub(crate) struct LineStrengths<S> {
    pub ft: Vec<S>,
    pub fx: Vec<S>,
    pub w: Vec<Mat<S>>,
    pub m: Vec<Mat<S>>,
}

pub(crate) fn line_strengths<S: Scalar>(
    phi: &[S],
    vel: &[S],
    n_x: usize,
    h: S,
    sc: &StructureConstants<S>,
) -> Result<LineStrengths<S>> {
    let g = sc.dim();
    let inv_2h = S::one() / (h + h);
    let mut out = LineStrengths {
        ft: vec![S::zero(); n_x * g],
        fx: vec![S::zero(); n_x * g],
        w: Vec::with_capacity(n_x),
        m: Vec::with_capacity(n_x),
    };
    for p in 0..n_x {
        let (fwd, bwd) = ((p + 1) % n_x, (p + n_x - 1) % n_x);
        let m = build_m(&phi[p * g..(p + 1) * g], sc);
        let w = w_matrix(&m)?;
        let dx: Vec<S> = (0..g)
            .map(|a| (phi[fwd * g + a] - phi[bwd * g + a]) * inv_2h)
            .collect();
        out.ft[p * g..(p + 1) * g].copy_from_slice(&w.mat_vec(&vel[p * g..(p + 1) * g]));
        out.fx[p * g..(p + 1) * g].copy_from_slice(&w.mat_vec(&dx));
        out.w.push(w);
        out.m.push(m);
    }
    Ok(out)
}

fn quadratic<S: Scalar>(b: &Tensor3<S>, u: &[S], w: &[S]) -> Vec<S> {
    let g = u.len();
    (0..g)
        .map(|l| {
            let mut acc = S::zero();
            for n in 0..g {
                for m in 0..g {
                    acc += b[(l, n, m)] * u[n] * w[m];
                }
            }
            acc
        })
        .collect()
}

struct Rhs<'a, S> {
    sc: &'a StructureConstants<S>,
    t: &'a TraceForm<S>,
    b: Tensor3<S>,
    n_x: usize,
    h: S,
}

impl<S: Scalar> Rhs<'_, S> {
    fn energy(&self, phi: &[S], vel: &[S]) -> Result<S> {
        let ls = line_strengths(phi, vel, self.n_x, self.h, self.sc)?;
        let g = self.sc.dim();
        let t = self.t.matrix();
        let mut e = S::zero();
        for p in 0..self.n_x {
            let (ft, fx) = (&ls.ft[p * g..(p + 1) * g], &ls.fx[p * g..(p + 1) * g]);
            let (tft, tfx) = (t.mat_vec(ft), t.mat_vec(fx));
            for a in 0..g {
                e += ft[a] * tft[a] + fx[a] * tfx[a];
            }
        }
        Ok(S::lit(0.5) * e * self.h)
    }

    /// `φ̈` at every point.
    fn accel(&self, phi: &[S], vel: &[S], time: S) -> Result<Vec<S>> {
        let g = self.sc.dim();
        let n_x = self.n_x;
        let ls = line_strengths(phi, vel, n_x, self.h, self.sc)?;
        let inv_2h = S::one() / (self.h + self.h);
        let t = self.t.matrix();
        let mut out = vec![S::zero(); n_x * g];
        for p in 0..n_x {
            let (fwd, bwd) = ((p + 1) % n_x, (p + n_x - 1) % n_x);
            let r = p * g..(p + 1) * g;
            let dfx: Vec<S> = (0..g)
                .map(|a| (ls.fx[fwd * g + a] - ls.fx[bwd * g + a]) * inv_2h)
                .collect();
            let v = &vel[r.clone()];
            let m_dot = build_m(v, self.sc);
            let wdot_v = w_derivative_apply(&ls.m[p], &m_dot, v)?;
            let kinetic = t.mat_vec(&dfx);
            let correction = t.mat_vec(&wdot_v);
            let bxx = quadratic(&self.b, &ls.fx[r.clone()], &ls.fx[r.clone()]);
            let btt = quadratic(&self.b, &ls.ft[r.clone()], &ls.ft[r.clone()]);
            let rhs: Vec<S> = (0..g)
                .map(|a| kinetic[a] + bxx[a] - btt[a] - correction[a])
                .collect();
            let singular = || Error::SingularEvolutionMatrix {
                time: time.to_f64_lossy(),
                point: p,
            };
            let tw = t * &ls.w[p];
            if !(tw.condition_number() < S::lit(MAX_EVOLUTION_CONDITION)) {
                return Err(singular());
            }
            let lu = tw.lu().map_err(|_| singular())?;
            let acc = lu.solve(&rhs);
            if acc.iter().any(|x| !x.is_finite()) {
                return Err(singular());
            }
            out[r].copy_from_slice(&acc);
        }
        Ok(out)
    }
}

fn axpy<S: Scalar>(x: &[S], a: S, y: &[S]) -> Vec<S> {
    x.iter().zip(y).map(|(&xi, &yi)| xi + a * yi).collect()
}

/// Integrates the second-order equation with classical fourth-order
/// Runge–Kutta on a periodic line.
///
/// The step is shrunk slightly if needed so that `t_end` is hit exactly.
pub fn evolve_pcm_1p1<S: Scalar>(cfg: &SolverConfig<S>) -> Result<Trajectory<S>> {
    cfg.validate()?;
    let g = cfg.structure.dim();
    let h = cfg.h();
    let n_steps = (cfg.t_end / cfg.dt - S::lit(1e-9))
        .ceil()
        .to_f64_lossy()
        .max(1.0) as usize;
    let dt = cfg.t_end / S::from_usize_lossy(n_steps);
    let mut warnings = Vec::new();
    if dt > S::lit(0.5) * h {
        warnings.push(format!(
            "CFL: dt = {} exceeds 0.5·h = {}",
            dt.to_f64_lossy(),
            (S::lit(0.5) * h).to_f64_lossy()
        ));
    }
    let b = Tensor3::from_fn(g, g, g, |l, n, m| {
        (0..g)
            .map(|k| cfg.structure.get(k, l, n) * cfg.trace_form.get(m, k))
            .sum()
    });
    let rhs = Rhs {
        sc: &cfg.structure,
        t: &cfg.trace_form,
        b,
        n_x: cfg.n_x,
        h,
    };
    let mut phi = cfg.phi0.clone();
    let mut vel = cfg.phi_dot0.clone();
    let mut traj = Trajectory {
        times: vec![S::zero()],
        phi: vec![phi.clone()],
        velocity: vec![vel.clone()],
        energies: vec![rhs.energy(&phi, &vel)?],
        warnings: Vec::new(),
        n_x: cfg.n_x,
        n_g: g,
        h,
    };
    let half = S::lit(0.5) * dt;
    let sixth = dt / S::lit(6.0);
    for step in 0..n_steps {
        let t0 = dt * S::from_usize_lossy(step);
        let a1 = rhs.accel(&phi, &vel, t0)?;
        let (p2, v2) = (axpy(&phi, half, &vel), axpy(&vel, half, &a1));
        let a2 = rhs.accel(&p2, &v2, t0 + half)?;
        let (p3, v3) = (axpy(&phi, half, &v2), axpy(&vel, half, &a2));
        let a3 = rhs.accel(&p3, &v3, t0 + half)?;
        let (p4, v4) = (axpy(&phi, dt, &v3), axpy(&vel, dt, &a3));
        let a4 = rhs.accel(&p4, &v4, t0 + dt)?;
        for i in 0..phi.len() {
            phi[i] += sixth * (vel[i] + (v2[i] + v3[i]) * S::lit(2.0) + v4[i]);
            vel[i] += sixth * (a1[i] + (a2[i] + a3[i]) * S::lit(2.0) + a4[i]);
        }
        if (step + 1) % cfg.snapshot_every == 0 || step + 1 == n_steps {
            traj.times.push(dt * S::from_usize_lossy(step + 1));
            traj.phi.push(phi.clone());
            traj.velocity.push(vel.clone());
            traj.energies.push(rhs.energy(&phi, &vel)?);
        }
    }
    traj.warnings = warnings;
    Ok(traj)
}

/// Interior L∞ norms of the Bianchi and second-order residuals evaluated on
/// the spacetime grid of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OnShellResiduals<S> {
    pub bianchi: S,
    pub second_order: S,
}

pub fn on_shell_residuals<S: Scalar>(
    traj: &Trajectory<S>,
    sc: &StructureConstants<S>,
    t: &TraceForm<S>,
) -> Result<OnShellResiduals<S>> {
    let phi = traj.spacetime_field()?;
    let f = field_strengths(&phi, sc)?;
    Ok(OnShellResiduals {
        bianchi: bianchi_residual(&f, sc)?.norm_linf_interior(0, 2),
        second_order: second_order_residual(&f, sc, t)?.norm_linf_interior(0, 2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{adjoint_rep, named_algebra, trace_form};
    use std::f64::consts::TAU;

    fn su2() -> (StructureConstants<f64>, TraceForm<f64>) {
        let (sc, _) = named_algebra::<f64>("su2").unwrap();
        let t = trace_form(&adjoint_rep(&sc)).unwrap();
        (sc, t)
    }

    fn wave_error(n: usize) -> f64 {
        let (sc, _) = named_algebra::<f64>("abelian(1)").unwrap();
        let t = TraceForm::from_matrix(&Mat::identity(1)).unwrap();
        let k = TAU;
        let cfg = SolverConfig::new(sc, t, n, 1.0, 0.25 / n as f64, 1.0)
            .with_initial(|x| (vec![(k * x).sin()], vec![-k * (k * x).cos()]))
            .with_snapshot_every(usize::MAX);
        let traj = evolve_pcm_1p1(&cfg).unwrap();
        let last = traj.phi.last().unwrap();
        let h = 1.0 / n as f64;
        let sum: f64 = (0..n)
            .map(|p| (last[p] - (k * (p as f64 * h - 1.0)).sin()).powi(2))
            .sum();
        (sum * h).sqrt()
    }

    #[test]
    fn abelian_wave_second_order() {
        let (e1, e2) = (wave_error(32), wave_error(64));
        let order = (e1 / e2).log2();
        assert!((1.8..=2.2).contains(&order), "{e1} {e2} {order}");
    }

    #[test]
    fn one_parameter_subgroup_is_reproduced() {
        let (sc, t) = su2();
        let v = [0.4, -0.3, 0.5];
        let cfg = SolverConfig::new(sc, t, 32, 1.0, 1e-3, 1.0)
            .with_initial(|_| (vec![0.0; 3], v.to_vec()))
            .with_snapshot_every(100);
        let traj = evolve_pcm_1p1(&cfg).unwrap();
        assert!((traj.times.last().unwrap() - 1.0).abs() < 1e-12);
        let last = traj.phi.last().unwrap();
        let err = last
            .iter()
            .enumerate()
            .map(|(i, x)| (x - v[i % 3]).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
        assert!(traj.max_relative_energy_drift() < 1e-8);
        assert!(traj.warnings.is_empty());
    }

    #[test]
    fn small_amplitude_energy_is_conserved() {
        let (sc, t) = su2();
        let cfg = SolverConfig::new(sc, t, 32, 1.0, 2e-3, 1.0)
            .with_initial(|x| {
                let s = 1e-3 * (TAU * x).sin();
                (vec![s, 0.5 * s, -s], vec![0.0, 1e-3 * (TAU * x).cos(), 0.0])
            })
            .with_snapshot_every(50);
        let traj = evolve_pcm_1p1(&cfg).unwrap();
        assert!(
            traj.max_relative_energy_drift() < 1e-8,
            "{}",
            traj.max_relative_energy_drift()
        );
    }

    #[test]
    fn on_shell_residuals_shrink_with_resolution() {
        let (sc, t) = su2();
        let run = |n: usize| {
            let dt = 0.25 / n as f64;
            let cfg = SolverConfig::new(sc.clone(), t.clone(), n, 1.0, dt, 0.5)
                .with_initial(|x| {
                    let s = 0.3 * (TAU * x).sin();
                    (
                        vec![s, 0.2, -0.5 * s],
                        vec![0.1 * (TAU * x).cos(), 0.3, 0.0],
                    )
                })
                .with_snapshot_every(4);
            let traj = evolve_pcm_1p1(&cfg).unwrap();
            on_shell_residuals(&traj, &sc, &t).unwrap()
        };
        let (r1, r2) = (run(32), run(64));
        assert!(
            (r1.second_order / r2.second_order).log2() > 1.8,
            "{r1:?} {r2:?}"
        );
        assert!((r1.bianchi / r2.bianchi).log2() > 1.8, "{r1:?} {r2:?}");
    }

    #[test]
    fn cfl_warning() {
        let (sc, t) = su2();
        let cfg = SolverConfig::new(sc, t, 8, 1.0, 0.1, 0.2);
        let traj = evolve_pcm_1p1(&cfg).unwrap();
        assert_eq!(traj.warnings.len(), 1);
    }

    #[test]
    fn leaving_the_chart_aborts() {
        // |φ| = 2π puts eigenvalues ±2πi in M, where W is singular
        let (sc, t) = su2();
        let cfg = SolverConfig::new(sc, t, 8, 1.0, 0.01, 0.02)
            .with_initial(|_| (vec![TAU, 0.0, 0.0], vec![0.0; 3]));
        assert!(matches!(
            evolve_pcm_1p1(&cfg),
            Err(Error::SingularEvolutionMatrix { point: 0, .. })
        ));
    }

    #[test]
    fn csv_export() {
        let (sc, t) = su2();
        let cfg = SolverConfig::new(sc, t, 8, 1.0, 0.05, 0.1)
            .with_initial(|_| (vec![0.0; 3], vec![0.1, 0.0, 0.0]));
        let csv = evolve_pcm_1p1(&cfg).unwrap().to_csv();
        assert!(csv.starts_with("t,energy,relative_energy_drift\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
