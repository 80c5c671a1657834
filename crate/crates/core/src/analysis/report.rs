//! One-call analysis of a trajectory set into a JSON-ready report.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::fmt::Real;
use crate::model::{FitResult, GridSpec, TrajectorySet};
use crate::net::{build_network, MobilityNetwork, Neighborhood, WeightKind};

use super::binning::BinnedCurve;
use super::mobility::*;
use super::network::*;

/// MLE and log-histogram exponents further apart than this raise a warning.
pub const ESTIMATOR_GAP_WARNING: f64 = 0.3;

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// Grid bounds; grid-only metrics are skipped without them.
    pub grid: Option<GridSpec>,
    /// Window length in time units for return and preferential metrics.
    pub window: u64,
    pub weight: WeightKind,
    /// Used only when the network is built here.
    pub directed: bool,
    pub teleport_threshold: u64,
    pub top_fraction: f64,
    pub neighborhood: Neighborhood,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            grid: None,
            window: 1,
            weight: WeightKind::Agents,
            directed: false,
            teleport_threshold: 10,
            top_fraction: 0.01,
            neighborhood: Neighborhood::Moore,
        }
    }
}

/// A plotted curve row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub value: f64,
    pub count: u64,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Skipped {
    pub metric: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub fits: BTreeMap<String, FitResult>,
    pub metrics: BTreeMap<String, Real>,
    pub counts: BTreeMap<String, u64>,
    pub skipped: Vec<Skipped>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub curves: BTreeMap<String, Vec<CurvePoint>>,
}

impl Report {
    pub fn fit(&self, name: &str) -> Option<&FitResult> {
        self.fits.get(name)
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).map(|r| r.0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn skip(&mut self, metric: &str, reason: impl ToString) {
        self.skipped.push(Skipped {
            metric: metric.to_string(),
            reason: reason.to_string(),
        });
    }

    fn put_fit(&mut self, name: &str, fit: FitResult) {
        self.fits.insert(name.to_string(), fit);
    }

    fn put_metric(&mut self, name: &str, v: f64) {
        self.metrics.insert(name.to_string(), Real(v));
    }

    fn put_count(&mut self, name: &str, v: usize) {
        self.counts.insert(name.to_string(), v as u64);
    }

    fn put_binned(&mut self, name: &str, curve: &BinnedCurve) {
        self.curves.insert(
            name.to_string(),
            curve
                .bins
                .iter()
                .map(|b| CurvePoint {
                    x: b.center,
                    value: b.value,
                    count: b.count as u64,
                })
                .collect(),
        );
    }

    fn put_tail(&mut self, name: &str, tail: &TailFit) {
        self.put_fit(name, tail.mle.clone());
        if let Some(l) = &tail.loghist {
            self.put_fit(&format!("{name}_loghist"), l.clone());
        }
        if let (Some(l), Some(gap)) = (&tail.loghist, tail.disagreement()) {
            if gap > ESTIMATOR_GAP_WARNING {
                self.warnings.push(format!(
                    "{name}: MLE exponent {:.3} and log-histogram exponent {:.3} differ by {gap:.3}",
                    tail.mle.exponent, l.exponent
                ));
            }
        }
    }
}

/// Run every applicable metric. A metric that cannot be computed is listed
/// under `skipped` with the reason; the call fails only if nothing applies.
pub fn analyze(
    trajs: &TrajectorySet,
    net: Option<&MobilityNetwork>,
    opts: &AnalyzeOptions,
) -> Result<Report> {
    let mut r = Report::default();
    r.put_count("agents", trajs.len());
    r.put_count("events", trajs.event_count());
    r.put_count("locations", trajs.locations.len());

    match exploration_curve(trajs) {
        Ok(ec) => {
            r.put_binned("exploration_curve", &ec.curve);
            r.put_fit("exploration_curve", ec.fit);
        }
        Err(e) => r.skip("exploration_curve", e),
    }
    match rank_frequency(trajs) {
        Ok(rf) => {
            r.curves.insert(
                "rank_frequency".into(),
                rf.curve
                    .iter()
                    .map(|p| CurvePoint {
                        x: p.rank as f64,
                        value: p.fraction,
                        count: p.agents as u64,
                    })
                    .collect(),
            );
            r.put_count("rank_frequency_excluded", rf.excluded);
            r.put_fit("rank_frequency", rf.fit);
        }
        Err(e) => r.skip("rank_frequency", e),
    }
    let stats = all_agent_stats(trajs);
    match fluctuation_scaling(&stats) {
        Ok(fl) => {
            r.put_count("fluctuation_excluded_single_location", fl.excluded_single_location);
            r.put_count("fluctuation_excluded_zero_sigma", fl.excluded_zero_sigma);
            r.put_fit("fluctuation_scaling", fl.fit);
        }
        Err(e) => r.skip("fluctuation_scaling", e),
    }
    match estimate_gamma(trajs) {
        Ok(g) => {
            r.put_binned("exploration_decay", &g.curve);
            r.put_metric("mu_from_gamma", analytic_mu(g.fit.exponent.max(0.0)));
            r.put_fit("exploration_decay", g.fit);
        }
        Err(e) => r.skip("exploration_decay", e),
    }
    match preferential_check(trajs, opts.window) {
        Ok(p) => {
            r.put_binned("preferential_movement", &p.curve);
            r.put_fit("preferential_movement", p.fit);
        }
        Err(e) => r.skip("preferential_movement", e),
    }
    let ginis = visitation_gini(trajs);
    if ginis.is_empty() {
        r.skip("visitation_gini_mean", "no agents");
    } else {
        r.put_metric(
            "visitation_gini_mean",
            ginis.iter().sum::<f64>() / ginis.len() as f64,
        );
    }
    match return_probability(trajs, opts.window) {
        Ok(rp) => {
            r.curves.insert(
                "return_probability".into(),
                rp.per_window
                    .iter()
                    .map(|w| CurvePoint {
                        x: w.window as f64,
                        value: w.probability,
                        count: w.moves,
                    })
                    .collect(),
            );
            r.put_metric("return_probability", rp.overall);
        }
        Err(e) => r.skip("return_probability", e),
    }
    match retention_rate(trajs) {
        Ok(v) => r.put_metric("retention_rate", v),
        Err(e) => r.skip("retention_rate", e),
    }

    grid_metrics(&mut r, trajs, opts);

    let built;
    let net = match net {
        Some(n) => n,
        None => {
            built = build_network(trajs, opts.directed);
            &built
        }
    };
    r.put_count("nodes", net.node_count());
    r.put_count("edges", net.edge_count());
    r.put_count("total_transitions", net.total_transitions() as usize);
    r.put_count("max_edge_events", net.max_edge_events() as usize);
    match visitor_distribution(net) {
        Ok(vd) => r.put_tail("visitor_count", &vd.fit),
        Err(e) => r.skip("visitor_count", e),
    }
    match top_share(net, opts.top_fraction) {
        Ok(v) => r.put_metric("top_share", v),
        Err(e) => r.skip("top_share", e),
    }
    match degree_visitor_scaling(net, opts.weight) {
        Ok(d) => {
            r.put_tail("degree", &d.degree);
            r.put_tail("link_weight", &d.weight);
            r.put_count("isolated_nodes", d.isolated);
            r.put_fit("visitors_vs_degree", d.visitors_vs_degree);
        }
        Err(e) => r.skip("degree", e),
    }

    if r.fits.is_empty() && r.metrics.is_empty() {
        return Err(Error::InsufficientData(
            "no metric could be computed from the input".into(),
        ));
    }
    Ok(r)
}

fn grid_metrics(r: &mut Report, trajs: &TrajectorySet, opts: &AnalyzeOptions) {
    const GRID_ONLY: [&str; 3] = ["teleport_fraction", "ranked_distance", "neighborhood_visitors"];
    let Some(grid) = opts.grid.as_ref() else {
        for m in GRID_ONLY {
            r.skip(m, "no grid bounds given");
        }
        return;
    };
    if let Err(e) = trajs.grid_points(grid) {
        for m in GRID_ONLY {
            r.skip(m, &e);
        }
        return;
    }
    match teleport_fraction(trajs, grid, opts.teleport_threshold) {
        Ok(v) => r.put_metric("teleport_fraction", v),
        Err(e) => r.skip("teleport_fraction", e),
    }
    match ranked_distance(trajs, grid) {
        Ok(rd) => {
            r.curves.insert(
                "ranked_distance".into(),
                rd.overall
                    .iter()
                    .map(|p| CurvePoint {
                        x: p.rank as f64,
                        value: p.mean_distance,
                        count: p.agents as u64,
                    })
                    .collect(),
            );
            match rd.fit {
                Some(f) => r.put_fit("ranked_distance", f),
                None => r.skip("ranked_distance", "too few ranks for a slope"),
            }
        }
        Err(e) => r.skip("ranked_distance", e),
    }
    match neighborhood_scaling(trajs, grid, opts.neighborhood) {
        Ok(f) => r.put_fit("neighborhood_visitors", f),
        Err(e) => r.skip("neighborhood_visitors", e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{canonicalize_trajectories, MovementEvent};

    #[test]
    fn non_grid_data_skips_grid_metrics() {
        let events = (0..20).flat_map(|a| {
            (0..30).map(move |t| MovementEvent::new(format!("a{a}"), t, format!("L{}", (a * t) % 17)))
        });
        let set = canonicalize_trajectories(events);
        let opts = AnalyzeOptions {
            grid: Some(GridSpec::default()),
            ..Default::default()
        };
        let rep = analyze(&set, None, &opts).unwrap();
        assert!(rep.metric("teleport_fraction").is_none());
        let skipped: Vec<&str> = rep.skipped.iter().map(|s| s.metric.as_str()).collect();
        assert!(skipped.contains(&"teleport_fraction"));
        assert!(skipped.contains(&"neighborhood_visitors"));
        assert!(rep.fit("exploration_curve").is_some());
        assert!(rep.metric("retention_rate").is_some());
    }

    #[test]
    fn empty_input_is_an_error() {
        let set = canonicalize_trajectories(Vec::new());
        assert!(analyze(&set, None, &AnalyzeOptions::default()).is_err());
    }
}
