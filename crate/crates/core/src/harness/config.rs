use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{ObjectiveWeights, PenaltyScale};
use crate::infra::{Preset, ScenarioDoc, Tier};
use crate::solvers::TabuParams;
use crate::vnffg::WorkloadParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Tscp,
    RandomExplore,
    Greedy,
    Psf,
    Optimal,
}

impl SolverKind {
    pub const ALL: [SolverKind; 5] = [
        SolverKind::Tscp,
        SolverKind::RandomExplore,
        SolverKind::Greedy,
        SolverKind::Psf,
        SolverKind::Optimal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Tscp => "tscp",
            SolverKind::RandomExplore => "random_explore",
            SolverKind::Greedy => "greedy",
            SolverKind::Psf => "psf",
            SolverKind::Optimal => "optimal",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::schema("solvers", format!("unknown solver `{s}`")))
    }
}

/// Which tiers of the scenario a sweep point keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TierSet {
    Hybrid,
    CloudOnly,
    FogOnly,
}

impl TierSet {
    pub fn name(self) -> &'static str {
        match self {
            TierSet::Hybrid => "hybrid",
            TierSet::CloudOnly => "cloud_only",
            TierSet::FogOnly => "fog_only",
        }
    }

    pub fn tiers(self) -> &'static [Tier] {
        match self {
            TierSet::Hybrid => &[Tier::Cloud, Tier::Fog],
            TierSet::CloudOnly => &[Tier::Cloud],
            TierSet::FogOnly => &[Tier::Fog],
        }
    }
}

/// How the two sides of the objective are brought to a common scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Raw seconds and currency.
    None,
    /// Each side divided by its value for the seeded initial placement on
    /// the hybrid network of the sweep point.
    #[default]
    Initial,
}

/// Search settings shared by the tabu based solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub tabu_tenure: usize,
    pub stop_after: usize,
    pub neighborhood_size: usize,
}

impl SearchConfig {
    pub fn params(&self, weights: ObjectiveWeights, seed: u64, scale: PenaltyScale) -> TabuParams {
        TabuParams {
            tabu_tenure: self.tabu_tenure,
            stop_after: self.stop_after,
            neighborhood_size: self.neighborhood_size,
            weights,
            seed,
            penalty_scale: Some(scale),
        }
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            tabu_tenure: 60,
            stop_after: 20,
            neighborhood_size: 16,
        }
    }
}

/// A full experiment: every combination of seed, request count, fog
/// `p_static`, tier set and alpha is one sweep point, and every solver runs
/// once per point.
///
/// ```json
/// { "preset": "topology-10", "solvers": ["tscp", "greedy"],
///   "alphas": [0.5], "requests": [15], "seeds": [1, 2, 3] }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub preset: Option<Preset>,
    /// Used instead of the preset when present; its seed is replaced by the
    /// sweep seed.
    pub scenario: Option<ScenarioDoc>,
    pub quadrature_grid: Option<usize>,
    pub workload: WorkloadParams,
    pub solvers: Vec<SolverKind>,
    pub alphas: Vec<f64>,
    /// Fog `p_static` values; empty keeps the scenario value.
    pub p_static: Vec<f64>,
    pub requests: Vec<usize>,
    pub seeds: Vec<u64>,
    pub tier_sets: Vec<TierSet>,
    pub normalization: Normalization,
    pub search: SearchConfig,
    /// Record wall times; off keeps the output byte-reproducible.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "experiment".into(),
            preset: Some(Preset::Topology10),
            scenario: None,
            quadrature_grid: None,
            workload: WorkloadParams::default(),
            solvers: vec![SolverKind::Tscp],
            alphas: vec![0.5],
            p_static: Vec::new(),
            requests: vec![15],
            seeds: (1..=10).collect(),
            tier_sets: vec![TierSet::Hybrid],
            normalization: Normalization::default(),
            search: SearchConfig::default(),
            timing: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = super::parse_json(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.solvers.is_empty() {
            return Err(Error::schema("solvers", "at least one solver required"));
        }
        if self.seeds.is_empty() {
            return Err(Error::schema("seeds", "at least one seed required"));
        }
        if self.requests.is_empty() || self.requests.contains(&0) {
            return Err(Error::schema("requests", "need at least one positive request count"));
        }
        if self.alphas.is_empty() {
            return Err(Error::schema("alphas", "at least one alpha required"));
        }
        if self.tier_sets.is_empty() {
            return Err(Error::schema("tier_sets", "at least one tier set required"));
        }
        for (i, a) in self.alphas.iter().enumerate() {
            if !(0.0..=1.0).contains(a) {
                return Err(Error::schema(format!("alphas[{i}]"), "must lie in [0, 1]"));
            }
        }
        for (i, p) in self.p_static.iter().enumerate() {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::schema(format!("p_static[{i}]"), "must lie in [0, 1]"));
            }
        }
        if self.preset.is_none() && self.scenario.is_none() {
            return Err(Error::schema("preset", "either `preset` or `scenario` is required"));
        }
        let s = &self.search;
        if s.tabu_tenure == 0 || s.stop_after == 0 || s.neighborhood_size == 0 {
            return Err(Error::schema("search", "tenure, stop_after and neighborhood_size must be >= 1"));
        }
        Ok(())
    }

    /// Scenario document of one seed.
    pub fn scenario_doc(&self, seed: u64) -> ScenarioDoc {
        let mut doc = match &self.scenario {
            Some(d) => d.clone(),
            None => ScenarioDoc::preset(self.preset.unwrap_or(Preset::Topology10), seed),
        };
        doc.seed = seed;
        if self.quadrature_grid.is_some() {
            doc.quadrature_grid = self.quadrature_grid;
        }
        doc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"solvers": ["tscp", "greedy"], "seeds": [1, 2]}"#).unwrap();
        assert_eq!(cfg.solvers, vec![SolverKind::Tscp, SolverKind::Greedy]);
        assert_eq!(cfg.requests, vec![15]);
        assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let e = ExperimentConfig::from_json(r#"{"solvers": ["tabu"]}"#).unwrap_err();
        assert!(matches!(e, Error::Schema { ref path, .. } if path.starts_with("solvers")), "{e}");
        let e = ExperimentConfig::from_json(r#"{"alphas": [0.5, 2.0]}"#).unwrap_err();
        assert!(matches!(e, Error::Schema { ref path, .. } if path == "alphas[1]"), "{e}");
        let e = ExperimentConfig::from_json(r#"{"seeds": []}"#).unwrap_err();
        assert!(matches!(e, Error::Schema { ref path, .. } if path == "seeds"), "{e}");
        let e = ExperimentConfig::from_json(r#"{"search": {"tabu_tenure": "x"}}"#).unwrap_err();
        assert!(matches!(e, Error::Schema { ref path, .. } if path == "search.tabu_tenure"), "{e}");
    }

    #[test]
    fn solver_names() {
        for k in SolverKind::ALL {
            assert_eq!(SolverKind::parse(k.name()).unwrap(), k);
        }
        assert!(SolverKind::parse("annealing").is_err());
    }
}
