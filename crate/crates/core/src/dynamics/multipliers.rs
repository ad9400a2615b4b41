//! The first-order equations read as evolution equations for the scalar
//! multipliers of a `1+1` dimensional trajectory.
//!
//! Components of `T★F + dA + C F∧A = 0` along `dt` and `dx`:
//!
//! ```text
//! ∂_t A_l = T_{ml} F^m_x - C^k_{ln} A_k F^n_t
//! ∂_x A_l = T_{ml} F^m_t - C^k_{ln} A_k F^n_x
//! ```
//!
//! The time equation is integrated at fixed `x`; the space equation is then a
//! consistency condition, which holds exactly when the second-order equation
//! does.

use crate::error::{Error, Result};
use crate::lie::{StructureConstants, TraceForm};
use crate::scalar::Scalar;

use super::solver::{line_strengths, Trajectory};

/// Multipliers along a trajectory, sampled at every other snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierHistory<S> {
    pub times: Vec<S>,
    /// `A_l` per stored time, point-major.
    pub values: Vec<Vec<S>>,
    /// Interior L∞ of the space-equation residual per stored time.
    pub residuals: Vec<S>,
    /// Maximum of `residuals`.
    pub cross_residual: S,
}

/// `out_l = T_{ml} u^m - C^k_{ln} A_k w^n`.
fn transport<S: Scalar>(
    sc: &StructureConstants<S>,
    t: &TraceForm<S>,
    a: &[S],
    u: &[S],
    w: &[S],
) -> Vec<S> {
    let g = a.len();
    (0..g)
        .map(|l| {
            let mut acc = S::zero();
            for m in 0..g {
                acc += t.get(m, l) * u[m];
            }
            for (k, &ak) in a.iter().enumerate() {
                for (n, &wn) in w.iter().enumerate() {
                    acc -= sc.get(k, l, n) * ak * wn;
                }
            }
            acc
        })
        .collect()
}

/// Integrates the multipliers along a trajectory with uniform snapshots and
/// reports how far they are from satisfying the space equation.
///
/// The initial slice solves the space equation by Heun quadrature from
/// `A = 0` at `x = 0`, so the residual starts at discretisation level; a
/// zero initial slice would violate it by `O(φ̇)`. Time steps are fourth-order
/// Runge–Kutta over pairs of snapshots, with the middle snapshot as the
/// half-step. On-shell `A` generally winds around the circle (its total
/// change is a conserved charge), so the residual skips the two points at the
/// seam.
pub fn integrate_multipliers_1p1<S: Scalar>(
    traj: &Trajectory<S>,
    sc: &StructureConstants<S>,
    t: &TraceForm<S>,
) -> Result<MultiplierHistory<S>> {
    let g = sc.dim();
    if traj.n_g != g || t.dim() != g {
        return Err(Error::ShapeMismatch(
            "trajectory, algebra and trace form disagree on n_g".into(),
        ));
    }
    if traj.len() < 3 {
        return Err(Error::InvalidArgument(
            "need at least three snapshots".into(),
        ));
    }
    let delta = traj.snapshot_spacing()?;
    let (n_x, h) = (traj.n_x, traj.h);
    let strengths = traj
        .phi
        .iter()
        .zip(&traj.velocity)
        .map(|(phi, vel)| line_strengths(phi, vel, n_x, h, sc))
        .collect::<Result<Vec<_>>>()?;
    let at = |v: &[S], p: usize| v[p * g..(p + 1) * g].to_vec();

    // initial slice from the space equation
    let s0 = &strengths[0];
    let mut a = vec![S::zero(); n_x * g];
    for p in 0..n_x - 1 {
        let cur = at(&a, p);
        let k1 = transport(sc, t, &cur, &at(&s0.ft, p), &at(&s0.fx, p));
        let pred: Vec<S> = cur.iter().zip(&k1).map(|(&x, &k)| x + h * k).collect();
        let k2 = transport(sc, t, &pred, &at(&s0.ft, p + 1), &at(&s0.fx, p + 1));
        for l in 0..g {
            a[(p + 1) * g + l] = cur[l] + S::lit(0.5) * h * (k1[l] + k2[l]);
        }
    }

    let residual = |a: &[S], i: usize| -> S {
        let s = &strengths[i];
        let inv_2h = S::one() / (h + h);
        let mut worst = S::zero();
        for p in 1..n_x - 1 {
            let rhs = transport(sc, t, &at(a, p), &at(&s.ft, p), &at(&s.fx, p));
            for l in 0..g {
                let dx = (a[(p + 1) * g + l] - a[(p - 1) * g + l]) * inv_2h;
                worst = worst.max((dx - rhs[l]).abs());
            }
        }
        worst
    };

    let mut out = MultiplierHistory {
        times: vec![traj.times[0]],
        residuals: vec![residual(&a, 0)],
        values: vec![a.clone()],
        cross_residual: S::zero(),
    };
    let step = delta + delta;
    let mut i = 0;
    while i + 2 < traj.len() {
        let (s0, s1, s2) = (&strengths[i], &strengths[i + 1], &strengths[i + 2]);
        for p in 0..n_x {
            let cur = at(&a, p);
            let f = |s: &super::solver::LineStrengths<S>, a: &[S]| {
                transport(sc, t, a, &at(&s.fx, p), &at(&s.ft, p))
            };
            let shift =
                |k: &[S], c: S| -> Vec<S> { cur.iter().zip(k).map(|(&x, &y)| x + c * y).collect() };
            let k1 = f(s0, &cur);
            let k2 = f(s1, &shift(&k1, delta));
            let k3 = f(s1, &shift(&k2, delta));
            let k4 = f(s2, &shift(&k3, step));
            for l in 0..g {
                a[p * g + l] =
                    cur[l] + step / S::lit(6.0) * (k1[l] + S::lit(2.0) * (k2[l] + k3[l]) + k4[l]);
            }
        }
        i += 2;
        out.times.push(traj.times[i]);
        out.residuals.push(residual(&a, i));
        out.values.push(a.clone());
    }
    out.cross_residual = out.residuals.iter().fold(S::zero(), |m, &r| m.max(r));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve_pcm_1p1, SolverConfig};
    use crate::lie::{adjoint_rep, named_algebra, trace_form};
    use crate::linalg::Mat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn su2() -> (StructureConstants<f64>, TraceForm<f64>) {
        let (sc, _) = named_algebra::<f64>("su2").unwrap();
        let t = trace_form(&adjoint_rep(&sc)).unwrap();
        (sc, t)
    }

    fn wave(n: usize) -> (MultiplierHistory<f64>, f64) {
        let (sc, _) = named_algebra::<f64>("abelian(1)").unwrap();
        let t = TraceForm::from_matrix(&Mat::identity(1)).unwrap();
        let cfg = SolverConfig::new(sc.clone(), t.clone(), n, 1.0, 0.25 / n as f64, 0.5)
            .with_initial(|x| (vec![(TAU * x).sin()], vec![-TAU * (TAU * x).cos()]));
        let traj = evolve_pcm_1p1(&cfg).unwrap();
        let hist = integrate_multipliers_1p1(&traj, &sc, &t).unwrap();
        // closed form: A = -φ + φ(0, 0) with φ = sin 2π(x - t)
        let last_t = *hist.times.last().unwrap();
        let h = 1.0 / n as f64;
        let err = (0..n)
            .map(|p| {
                let exact = -(TAU * (p as f64 * h - last_t)).sin();
                (hist.values.last().unwrap()[p] - exact).abs()
            })
            .fold(0.0, f64::max);
        (hist, err)
    }

    #[test]
    fn abelian_wave_multiplier() {
        let (h1, e1) = wave(32);
        let (h2, e2) = wave(64);
        assert!(e1 < 0.05 && e2 < e1 / 3.0, "{e1} {e2}");
        let order = (h1.cross_residual / h2.cross_residual).log2();
        assert!(
            (1.8..=2.2).contains(&order),
            "{} {}",
            h1.cross_residual,
            h2.cross_residual
        );
    }

    #[test]
    fn homogeneous_solution_multiplier_is_static() {
        let (sc, t) = su2();
        let v = [0.4, -0.3, 0.5];
        let cfg = SolverConfig::new(sc.clone(), t.clone(), 32, 1.0, 1e-3, 1.0)
            .with_initial(|_| (vec![0.0; 3], v.to_vec()))
            .with_snapshot_every(10);
        let traj = evolve_pcm_1p1(&cfg).unwrap();
        let hist = integrate_multipliers_1p1(&traj, &sc, &t).unwrap();
        assert!(hist.cross_residual < 1e-6, "{}", hist.cross_residual);
        let drift = hist
            .values
            .last()
            .unwrap()
            .iter()
            .zip(&hist.values[0])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(drift < 1e-10, "{drift}");
    }

    #[test]
    fn off_shell_snapshots_fail_consistency() {
        let (sc, t) = su2();
        let (n_x, n_snap) = (32, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut random =
            || -> Vec<f64> { (0..n_x * 3).map(|_| rng.gen_range(-0.5..0.5)).collect() };
        let phi = (0..n_snap).map(|_| random()).collect();
        let vel = (0..n_snap).map(|_| random()).collect();
        let times = (0..n_snap).map(|i| i as f64 * 0.01).collect();
        let traj = Trajectory::from_snapshots(times, phi, vel, n_x, 3, 1.0 / n_x as f64).unwrap();
        let hist = integrate_multipliers_1p1(&traj, &sc, &t).unwrap();
        assert!(hist.cross_residual > 1.0, "{}", hist.cross_residual);
    }
}
