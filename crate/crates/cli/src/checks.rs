//! Catalog of every check a run can execute.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::{Scenario, ThresholdOverride};
use crate::CliError;

/// Pass condition of a check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    AtMost(f64),
    /// Negative controls: the value must be large.
    AtLeast(f64),
    Within([f64; 2]),
}

impl Criterion {
    pub fn passes(self, value: f64) -> bool {
        match self {
            Criterion::AtMost(t) => value <= t,
            Criterion::AtLeast(t) => value >= t,
            Criterion::Within([lo, hi]) => (lo..=hi).contains(&value),
        }
    }

    fn with_override(self, o: &ThresholdOverride) -> Option<Self> {
        match (self, o) {
            (Criterion::AtMost(_), ThresholdOverride::Value(v)) => Some(Criterion::AtMost(*v)),
            (Criterion::AtLeast(_), ThresholdOverride::Value(v)) => Some(Criterion::AtLeast(*v)),
            (Criterion::Within(_), ThresholdOverride::Range(r)) => Some(Criterion::Within(*r)),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Residual,
    Error,
    Order,
    Control,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CheckSpec {
    pub name: &'static str,
    /// The identity or property being measured.
    pub tag: &'static str,
    pub scenario: Scenario,
    pub metric: Metric,
    pub default: Criterion,
}

const ORDER: Criterion = Criterion::Within([1.8, 2.2]);

macro_rules! check {
    ($name:literal, $tag:literal, $sc:ident, $metric:ident, $crit:expr) => {
        CheckSpec {
            name: $name,
            tag: $tag,
            scenario: Scenario::$sc,
            metric: Metric::$metric,
            default: $crit,
        }
    };
}

pub const CATALOG: &[CheckSpec] = &[
    check!(
        "structure.antisymmetry",
        "C^l_mn + C^l_nm = 0",
        Validate,
        Residual,
        Criterion::AtMost(1e-12)
    ),
    check!(
        "structure.jacobi",
        "Jacobi identity of C",
        Validate,
        Residual,
        Criterion::AtMost(1e-12)
    ),
    check!(
        "representation.homomorphism",
        "[R_m, R_n] = C^l_mn R_l",
        Validate,
        Residual,
        Criterion::AtMost(1e-12)
    ),
    check!(
        "trace_form.condition",
        "T_mn = tr(R_m R_n) nondegenerate",
        Validate,
        Residual,
        Criterion::AtMost(1e12)
    ),
    check!(
        "dual.intertwining",
        "T_kl D^k_nm = C^k_ln T_mk",
        Dualize,
        Residual,
        Criterion::AtMost(1e-12)
    ),
    check!(
        "dual.closure",
        "[D_m, D_n] = C^l_mn D_l",
        Dualize,
        Residual,
        Criterion::AtMost(1e-12)
    ),
    check!(
        "dual.graded_jacobi",
        "graded Jacobi identity of the doubled algebra",
        Dualize,
        Residual,
        Criterion::AtMost(1e-12)
    ),
    check!(
        "dual.s_squared",
        "S² equals ★★ on (D-1)-forms",
        Dualize,
        Residual,
        Criterion::AtMost(0.0)
    ),
    check!(
        "dual.doubled_rep",
        "brackets of the nilpotent doubled representation",
        Dualize,
        Residual,
        Criterion::AtMost(1e-12)
    ),
    check!(
        "dual.invariant_form",
        "D_n = C_n for an ad-invariant trace form",
        Dualize,
        Residual,
        Criterion::AtMost(1e-14)
    ),
    check!(
        "exterior.dd",
        "d∘d = 0",
        Identities,
        Residual,
        Criterion::AtMost(1e-13)
    ),
    check!(
        "exterior.double_star",
        "★★ = (-1)^(p(D-p)+s)",
        Identities,
        Residual,
        Criterion::AtMost(1e-12)
    ),
    check!(
        "noether.current_order",
        "g⁻¹dg = W^m_n dφ^n R_m",
        Identities,
        Order,
        ORDER
    ),
    check!(
        "bianchi.order",
        "dF^l + ½C^l_mn F^m∧F^n = 0",
        Identities,
        Order,
        ORDER
    ),
    check!(
        "bianchi.abelian_exact",
        "dF = 0 for F = dφ",
        Identities,
        Residual,
        Criterion::AtMost(1e-13)
    ),
    check!(
        "cancellation.jacobi",
        "multiplier terms cancel by the Jacobi identity",
        Identities,
        Residual,
        Criterion::AtMost(1e-13)
    ),
    check!(
        "cancellation.broken_control",
        "cancellation fails without Jacobi",
        Identities,
        Control,
        Criterion::AtLeast(1e-3)
    ),
    check!(
        "second_order.invariant_source",
        "C^k_ln T_mk F^n∧★F^m = 0 for ad-invariant T",
        Identities,
        Residual,
        Criterion::AtMost(1e-13)
    ),
    check!(
        "chain.cartan_maurer",
        "T-contracted dual Cartan–Maurer = second-order equation",
        Identities,
        Residual,
        Criterion::AtMost(1e-12)
    ),
    check!(
        "formulations.equivalence",
        "twisted self-duality = first-order equations at A_n = -T_jn φ̃^j",
        Identities,
        Residual,
        Criterion::AtMost(1e-12)
    ),
    check!(
        "formulations.wrong_sign",
        "equivalence fails for A_n = +T_jn φ̃^j",
        Identities,
        Control,
        Criterion::AtLeast(1e-3)
    ),
    check!(
        "doubled.group_current_order",
        "g′⁻¹dg′ dual part = dφ̃ + D F φ̃",
        Identities,
        Order,
        ORDER
    ),
    check!(
        "solver.homogeneous_error",
        "φ(t) = t·v reproduced",
        Simulate,
        Error,
        Criterion::AtMost(1e-6)
    ),
    check!(
        "solver.wave_error",
        "L2 error against the travelling wave",
        Simulate,
        Error,
        Criterion::AtMost(5e-3)
    ),
    check!(
        "solver.wave_order",
        "order of the travelling-wave error under one refinement",
        Simulate,
        Order,
        ORDER
    ),
    check!(
        "solver.energy_drift",
        "relative energy drift",
        Simulate,
        Error,
        Criterion::AtMost(1e-8)
    ),
    check!(
        "onshell.bianchi",
        "Bianchi residual along the trajectory",
        Simulate,
        Residual,
        Criterion::AtMost(1e-2)
    ),
    check!(
        "onshell.second_order",
        "second-order residual along the trajectory",
        Simulate,
        Residual,
        Criterion::AtMost(1e-2)
    ),
    check!(
        "multipliers.cross_residual",
        "space component of the first-order equations",
        Simulate,
        Residual,
        Criterion::AtMost(1e-2)
    ),
    check!(
        "convergence.noether",
        "order of g⁻¹dg - F^m R_m",
        Convergence,
        Order,
        ORDER
    ),
    check!(
        "convergence.bianchi",
        "order of the Bianchi residual",
        Convergence,
        Order,
        ORDER
    ),
    check!(
        "convergence.wave",
        "order of the travelling-wave error",
        Convergence,
        Order,
        ORDER
    ),
    check!(
        "convergence.on_shell",
        "order of the on-shell second-order residual",
        Convergence,
        Order,
        ORDER
    ),
    check!(
        "convergence.multipliers",
        "order of the multiplier cross residual",
        Convergence,
        Order,
        ORDER
    ),
];

pub fn lookup(name: &str) -> Option<&'static CheckSpec> {
    CATALOG.iter().find(|c| c.name == name)
}

/// One executed check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub tag: String,
    pub metric: Metric,
    /// `null` when the quantity could not be computed.
    pub value: Option<f64>,
    pub threshold: Criterion,
    pub pass: bool,
}

/// Collects check records, applying threshold overrides from the config.
#[derive(Debug, Default)]
pub struct Recorder {
    thresholds: BTreeMap<String, Criterion>,
    records: Vec<CheckRecord>,
}

impl Recorder {
    pub fn new(overrides: &BTreeMap<String, ThresholdOverride>) -> Result<Self, CliError> {
        let mut thresholds = BTreeMap::new();
        for (name, o) in overrides {
            let spec = lookup(name).ok_or_else(|| {
                CliError::Config(format!("unknown check `{name}` in [thresholds]"))
            })?;
            let crit = spec.default.with_override(o).ok_or_else(|| {
                CliError::Config(format!("threshold for `{name}` has the wrong shape"))
            })?;
            thresholds.insert(name.clone(), crit);
        }
        Ok(Self {
            thresholds,
            records: Vec::new(),
        })
    }

    pub fn criterion(&self, name: &str) -> Criterion {
        self.thresholds.get(name).copied().unwrap_or_else(|| {
            lookup(name)
                .expect("check missing from the catalog")
                .default
        })
    }

    /// Records `value` for `name`. Non-finite values fail.
    pub fn record(&mut self, name: &str, value: f64) -> bool {
        let spec = lookup(name).expect("check missing from the catalog");
        assert!(
            self.records.iter().all(|r| r.name != name),
            "check `{name}` recorded twice"
        );
        let crit = self.criterion(name);
        let pass = value.is_finite() && crit.passes(value);
        self.records.push(CheckRecord {
            name: name.into(),
            tag: spec.tag.into(),
            metric: spec.metric,
            value: value.is_finite().then_some(value),
            threshold: crit,
            pass,
        });
        pass
    }

    pub fn into_records(self) -> Vec<CheckRecord> {
        self.records
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_names_are_unique() {
        let mut names: Vec<_> = CATALOG.iter().map(|c| c.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), CATALOG.len());
        assert!(CATALOG.len() >= 12);
    }

    #[test]
    fn every_scenario_has_checks() {
        for sc in Scenario::ALL {
            assert!(CATALOG.iter().any(|c| c.scenario == sc), "{sc}");
        }
    }

    #[test]
    fn overrides_apply() {
        let mut o = BTreeMap::new();
        o.insert(
            "dual.intertwining".to_string(),
            ThresholdOverride::Value(1e-3),
        );
        let mut r = Recorder::new(&o).unwrap();
        assert!(r.record("dual.intertwining", 1e-4));
        assert!(!r.record("dual.closure", 1e-4));
        assert!(!r.record("convergence.wave", f64::NAN));
        let recs = r.into_records();
        assert_eq!(recs[2].value, None);
    }

    #[test]
    fn bad_overrides() {
        let mut o = BTreeMap::new();
        o.insert("nope".to_string(), ThresholdOverride::Value(1.0));
        assert!(Recorder::new(&o).is_err());
        let mut o = BTreeMap::new();
        o.insert(
            "convergence.wave".to_string(),
            ThresholdOverride::Value(1.0),
        );
        assert!(Recorder::new(&o).is_err());
    }

    #[test]
    fn controls_need_large_values() {
        assert!(Criterion::AtLeast(1e-3).passes(0.5));
        assert!(!Criterion::AtLeast(1e-3).passes(1e-9));
        assert!(Criterion::Within([1.8, 2.2]).passes(2.0));
    }
}
