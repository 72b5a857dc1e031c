//! Registered experiments and their parameter schemas.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    Real,
    Count,
    Statistics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSchema {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: ParamKind,
    pub default: Value,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentInfo {
    pub name: String,
    pub section: String,
    pub summary: String,
    pub sampled: bool,
    pub params: Vec<ParamSchema>,
}

impl ExperimentInfo {
    pub fn param(&self, name: &str) -> Option<&ParamSchema> {
        self.params.iter().find(|p| p.name == name)
    }
}

fn p(name: &str, kind: ParamKind, default: Value, description: &str) -> ParamSchema {
    ParamSchema {
        name: name.into(),
        kind,
        default,
        description: description.into(),
    }
}

fn entry(name: &str, section: &str, summary: &str, sampled: bool, params: Vec<ParamSchema>) -> ExperimentInfo {
    ExperimentInfo {
        name: name.into(),
        section: section.into(),
        summary: summary.into(),
        sampled,
        params,
    }
}

pub fn catalog() -> Vec<ExperimentInfo> {
    use ParamKind::*;
    let phi = || p("phi", Real, json!(0.0), "relative phase of the delocalized particle (rad)");
    vec![
        entry(
            "photon-swap",
            "§7",
            "photon superposition swapped onto two spins, x-basis coincidences",
            true,
            vec![phi()],
        ),
        entry(
            "rabi",
            "§7",
            "atom driven by a coherent field, exact vs sin²(|α|t)",
            false,
            vec![
                p("alpha", Real, json!(10.0), "field amplitude |α|"),
                p("alpha_phase", Real, json!(0.0), "field phase arg α (rad)"),
                p("cutoff", Count, json!(160), "field occupation cutoff"),
                p("points", Count, json!(41), "reported times over [0, π/(2|α|)]"),
            ],
        ),
        entry(
            "bell-chain",
            "§4",
            "chained spin relations on the singlet and the local-variable bound",
            true,
            vec![p("n", Count, json!(2), "chain length N, 2 ≤ N ≤ 8")],
        ),
        entry(
            "aux-phase",
            "§8",
            "phase read out against an auxiliary particle",
            true,
            vec![
                phi(),
                p("statistics", Statistics, json!("boson"), "boson or fermion"),
            ],
        ),
        entry(
            "fermion-nogo",
            "§8",
            "local fermion quadratures anticommute and would signal",
            true,
            vec![],
        ),
        entry(
            "coherent-factorization",
            "§8",
            "coherent state of a split mode vs product of local coherent states",
            false,
            vec![
                p("alpha", Real, json!(2.0), "amplitude |α| of the split mode"),
                p("alpha_phase", Real, json!(0.0), "phase arg α (rad)"),
                p("cutoff", Count, json!(24), "per-site occupation cutoff"),
            ],
        ),
        entry(
            "collective-chain",
            "§10",
            "electron phase passed to photons and positrons by pair annihilation",
            true,
            vec![phi()],
        ),
        entry(
            "gauge-check",
            "§9",
            "potential step on all charges at B vs on the test particle only",
            true,
            vec![phi(), p("kick", Real, json!(std::f64::consts::FRAC_PI_2), "phase step at B (rad)")],
        ),
    ]
}

pub fn lookup(name: &str) -> Option<ExperimentInfo> {
    catalog().into_iter().find(|e| e.name == name)
}

pub fn names() -> Vec<String> {
    catalog().into_iter().map(|e| e.name).collect()
}
