//! Metrics on mobility networks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{FitResult, GridSpec, Quantity, TrajectorySet};
use crate::net::{neighborhood_visitor_average, MobilityNetwork, Neighborhood, WeightKind};

use super::binning::fit_loglog_ols;
use super::powerlaw::{fit_powerlaw_loghist, fit_powerlaw_mle};

/// A heavy-tail fit with both estimators.
#[derive(Debug, Clone, Serialize)]
pub struct TailFit {
    pub mle: FitResult,
    pub loghist: Option<FitResult>,
}

impl TailFit {
    fn of(samples: &[f64], quantity: Quantity) -> Result<Self> {
        let mle = fit_powerlaw_mle(samples, true)?.with_quantity(quantity);
        let loghist = fit_powerlaw_loghist(samples, true)
            .ok()
            .map(|f| f.with_quantity(quantity));
        Ok(TailFit { mle, loghist })
    }

    /// Absolute gap between the two estimates, if both exist.
    pub fn disagreement(&self) -> Option<f64> {
        self.loghist
            .as_ref()
            .map(|l| (l.exponent - self.mle.exponent).abs())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VisitorDistribution {
    #[serde(skip)]
    pub samples: Vec<u64>,
    pub fit: TailFit,
}

/// Distribution of distinct visitors per location, `P(N) ~ N^-alpha`.
pub fn visitor_distribution(net: &MobilityNetwork) -> Result<VisitorDistribution> {
    let samples = net.visitor_counts();
    if samples.is_empty() {
        return Err(Error::InsufficientData("network has no nodes".into()));
    }
    let xs: Vec<f64> = samples.iter().map(|&v| v as f64).collect();
    Ok(VisitorDistribution {
        fit: TailFit::of(&xs, Quantity::VisitorCount)?,
        samples,
    })
}

/// Share of all visitors held by the top `ceil(fraction * nodes)` locations.
pub fn top_share(net: &MobilityNetwork, fraction: f64) -> Result<f64> {
    top_share_of(&net.visitor_counts(), fraction)
}

pub fn top_share_of(visitors: &[u64], fraction: f64) -> Result<f64> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "fraction must lie in (0, 1], got {fraction}"
        )));
    }
    if visitors.is_empty() {
        return Err(Error::InsufficientData("no locations".into()));
    }
    let total: u64 = visitors.iter().sum();
    if total == 0 {
        return Err(Error::Degenerate("no visitors at any location".into()));
    }
    let mut sorted = visitors.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let k = ((fraction * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    let top: u64 = sorted[..k].iter().sum();
    Ok(top as f64 / total as f64)
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeVisitorScaling {
    pub degree: TailFit,
    pub weight: TailFit,
    pub weight_kind: WeightKind,
    /// Slope of visitors against degree, `N ~ k^beta`.
    pub visitors_vs_degree: FitResult,
    /// Nodes with degree zero, left out of the slope.
    pub isolated: usize,
    #[serde(skip)]
    pub degrees: Vec<u64>,
    #[serde(skip)]
    pub weights: Vec<u64>,
}

/// Degree and link-weight distributions plus the visitor-degree slope.
pub fn degree_visitor_scaling(
    net: &MobilityNetwork,
    weight_kind: WeightKind,
) -> Result<DegreeVisitorScaling> {
    let degrees = net.degrees();
    let weights = net.edge_weights(weight_kind);
    let positive: Vec<f64> = degrees.iter().filter(|&&d| d > 0).map(|&d| d as f64).collect();
    let degree = TailFit::of(&positive, Quantity::Degree)?;
    let ws: Vec<f64> = weights.iter().map(|&w| w as f64).collect();
    let weight = TailFit::of(&ws, Quantity::LinkWeight)?;
    let pairs: Vec<(f64, f64)> = degrees
        .iter()
        .zip(net.nodes())
        .filter(|(k, n)| **k > 0 && n.visitors > 0)
        .map(|(&k, n)| (k as f64, n.visitors as f64))
        .collect();
    let visitors_vs_degree = fit_loglog_ols(&pairs)?.with_quantity(Quantity::VisitorsVsDegree);
    Ok(DegreeVisitorScaling {
        isolated: degrees.iter().filter(|&&d| d == 0).count(),
        degree,
        weight,
        weight_kind,
        visitors_vs_degree,
        degrees,
        weights,
    })
}

/// Slope of a land's visitors against its neighbors' mean,
/// `N ~ <N_neighbors>^beta`.
pub fn neighborhood_scaling(
    trajs: &TrajectorySet,
    grid: &GridSpec,
    shape: Neighborhood,
) -> Result<FitResult> {
    let nv = neighborhood_visitor_average(trajs, grid, shape)?;
    let pairs: Vec<(f64, f64)> = nv
        .pairs
        .iter()
        .map(|p| (p.neighbor_mean, p.visitors as f64))
        .collect();
    Ok(fit_loglog_ols(&pairs)?.with_quantity(Quantity::NeighborhoodVisitors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{canonicalize_trajectories, MovementEvent};
    use crate::net::build_network;

    #[test]
    fn top_share_examples() {
        assert_eq!(top_share_of(&[97, 1, 1, 1], 0.25).unwrap(), 0.97);
        assert_eq!(top_share_of(&[97, 1, 1, 1], 1.0).unwrap(), 1.0);
        let uniform = vec![5u64; 1000];
        assert!((top_share_of(&uniform, 0.01).unwrap() - 0.01).abs() < 1e-12);
        assert!(top_share_of(&[1, 2], 0.0).is_err());
        assert!(top_share_of(&[], 0.5).is_err());
    }

    #[test]
    fn single_visitor_everywhere_is_degenerate() {
        let set = canonicalize_trajectories(
            (0..30).map(|i| MovementEvent::new(format!("a{i}"), 0, format!("L{i}"))),
        );
        let net = build_network(&set, false);
        assert!(matches!(visitor_distribution(&net), Err(Error::Degenerate(_))));
    }

    #[test]
    fn star_hub_collects_leaf_visitors() {
        // agent i goes leaf_i -> hub -> leaf_i; every leaf has one visitor
        let events = (0..12).flat_map(|i| {
            let a = format!("a{i}");
            let leaf = format!("leaf{i}");
            [
                MovementEvent::new(a.clone(), 0, leaf.as_str()),
                MovementEvent::new(a.clone(), 1, "hub"),
                MovementEvent::new(a, 2, leaf.as_str()),
            ]
        });
        let net = build_network(&canonicalize_trajectories(events), false);
        let hub = net.node_by_id(&"hub".into()).unwrap();
        let leaves: u64 = (0..12)
            .map(|i| net.node_by_id(&format!("leaf{i}").as_str().into()).unwrap().visitors)
            .sum();
        assert_eq!(hub.visitors, leaves);
    }
}
