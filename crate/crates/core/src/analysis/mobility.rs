//! Individual-level mobility metrics computed from trajectories.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{agent_stats, AgentStats, FitResult, GridSpec, Quantity, Trajectory, TrajectorySet};
use crate::par::{self, Exec};

use super::binning::{fit_loglog_ols, BinMean, BinnedCurve};

/// `S(n)` for `n = 1..=len`: distinct locations among the first `n` events.
pub fn distinct_prefix(tr: &Trajectory) -> Vec<u32> {
    let mut seen = HashSet::new();
    tr.locs()
        .map(|l| {
            seen.insert(l);
            seen.len() as u32
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ExplorationCurve {
    pub curve: BinnedCurve,
    pub fit: FitResult,
}

/// Growth of distinct locations with the number of events, `S(n) ~ n^mu`.
pub fn exploration_curve(trajs: &TrajectorySet) -> Result<ExplorationCurve> {
    exploration_curve_with(trajs, Exec::default())
}

pub fn exploration_curve_with(trajs: &TrajectorySet, exec: Exec) -> Result<ExplorationCurve> {
    if trajs.is_empty() {
        return Err(Error::InsufficientData("no trajectories".into()));
    }
    let prefixes = par::map_slice(exec, &trajs.trajectories, distinct_prefix);
    let points: Vec<(f64, f64)> = prefixes
        .iter()
        .flat_map(|p| p.iter().enumerate().map(|(i, &s)| ((i + 1) as f64, s as f64)))
        .collect();
    let curve = BinnedCurve::from_points(&points, BinMean::Arithmetic);
    let fit = curve
        .fit(points.len())?
        .with_quantity(Quantity::ExplorationCurve);
    Ok(ExplorationCurve { curve, fit })
}

/// One agent's rank-ordered visit shares.
///
/// Ties in visit count go to the location discovered first.
pub fn rank_fractions(tr: &Trajectory) -> Vec<f64> {
    let mut order: HashMap<u32, (u64, usize)> = HashMap::new();
    for (i, loc) in tr.locs().enumerate() {
        order.entry(loc).or_insert((0, i)).0 += 1;
    }
    let mut ranked: Vec<(u64, usize)> = order.into_values().collect();
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let n = tr.len() as f64;
    ranked.iter().map(|(c, _)| *c as f64 / n).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RankPoint {
    pub rank: usize,
    #[serde(serialize_with = "crate::io::fmt::ser_real")]
    pub fraction: f64,
    pub agents: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankFrequency {
    pub curve: Vec<RankPoint>,
    pub fit: FitResult,
    /// Agents with a single location, left out.
    pub excluded: usize,
}

/// Mean share of time at the k-th most visited location, `P(k) ~ k^-alpha`.
///
/// Each rank is averaged over the agents that have at least that many
/// locations.
pub fn rank_frequency(trajs: &TrajectorySet) -> Result<RankFrequency> {
    let per_agent = par::map_slice(Exec::default(), &trajs.trajectories, rank_fractions);
    let mut sums: Vec<f64> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut excluded = 0;
    for fr in &per_agent {
        if fr.len() < 2 {
            excluded += 1;
            continue;
        }
        if sums.len() < fr.len() {
            sums.resize(fr.len(), 0.0);
            counts.resize(fr.len(), 0);
        }
        for (k, f) in fr.iter().enumerate() {
            sums[k] += f;
            counts[k] += 1;
        }
    }
    if counts.is_empty() {
        return Err(Error::InsufficientData("no agent visited two locations".into()));
    }
    let curve: Vec<RankPoint> = sums
        .iter()
        .zip(&counts)
        .enumerate()
        .map(|(k, (s, &c))| RankPoint {
            rank: k + 1,
            fraction: s / c as f64,
            agents: c,
        })
        .collect();
    let pairs: Vec<(f64, f64)> = curve.iter().map(|p| (p.rank as f64, p.fraction)).collect();
    let fit = if pairs.len() >= 3 {
        fit_loglog_ols(&pairs)?
    } else {
        super::binning::ols_loglog_points(&pairs)?.into_fit(1.0, pairs.len())
    };
    Ok(RankFrequency {
        curve,
        fit: fit.negated().with_quantity(Quantity::RankFrequency),
        excluded,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Fluctuation {
    /// `(f_mean, sigma_f)` per included agent.
    #[serde(skip)]
    pub pairs: Vec<(f64, f64)>,
    pub fit: FitResult,
    pub excluded_single_location: usize,
    pub excluded_zero_sigma: usize,
}

/// Dispersion of per-location visit counts against their mean, `sigma ~ f^beta`.
pub fn fluctuation_scaling(stats: &[AgentStats]) -> Result<Fluctuation> {
    let mut pairs = Vec::new();
    let (mut single, mut zero) = (0, 0);
    for s in stats {
        if s.distinct < 2 {
            single += 1;
        } else if s.sigma_f == 0.0 {
            zero += 1;
        } else {
            pairs.push((s.f_mean, s.sigma_f));
        }
    }
    if stats.len() - single < 3 {
        return Err(Error::InsufficientData(
            "fluctuation scaling needs 3 agents with 2+ locations".into(),
        ));
    }
    let fit = fit_loglog_ols(&pairs)?.with_quantity(Quantity::FluctuationScaling);
    Ok(Fluctuation {
        pairs,
        fit,
        excluded_single_location: single,
        excluded_zero_sigma: zero,
    })
}

/// Stats for every agent, in agent order.
pub fn all_agent_stats(trajs: &TrajectorySet) -> Vec<AgentStats> {
    par::map_slice(Exec::default(), &trajs.trajectories, |tr| agent_stats(trajs, tr))
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaEstimate {
    pub curve: BinnedCurve,
    pub fit: FitResult,
    pub opportunities: usize,
}

/// Empirical exploration probability against distinct locations so far,
/// `p_new(S) ~ S^-gamma`.
///
/// Every event after an agent's first is one opportunity: `S` is the number
/// of distinct locations before it, and it counts as new if the location had
/// not been seen by that agent.
pub fn estimate_gamma(trajs: &TrajectorySet) -> Result<GammaEstimate> {
    let per_agent = par::map_slice(Exec::default(), &trajs.trajectories, |tr| {
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(tr.len().saturating_sub(1));
        for (i, loc) in tr.locs().enumerate() {
            let before = seen.len();
            let new = seen.insert(loc);
            if i > 0 {
                out.push((before as f64, if new { 1.0 } else { 0.0 }));
            }
        }
        out
    });
    let points: Vec<(f64, f64)> = per_agent.into_iter().flatten().collect();
    if points.len() < 100 {
        return Err(Error::InsufficientData(format!(
            "gamma estimate needs 100 exploration opportunities, got {}",
            points.len()
        )));
    }
    let curve = BinnedCurve::from_points(&points, BinMean::Arithmetic);
    let fit = curve
        .fit(points.len())?
        .negated()
        .with_quantity(Quantity::ExplorationDecay);
    Ok(GammaEstimate {
        opportunities: points.len(),
        curve,
        fit,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PreferentialCheck {
    /// `(popularity share in window w, share of window w+1 moves)`.
    #[serde(skip)]
    pub pairs: Vec<(f64, f64)>,
    pub curve: BinnedCurve,
    pub fit: FitResult,
    pub windows: usize,
}

/// Does a location's share of visits in one window predict its share of
/// arrivals in the next? A slope near 1 means movement is proportional to
/// popularity.
pub fn preferential_check(trajs: &TrajectorySet, window: u64) -> Result<PreferentialCheck> {
    if window == 0 {
        return Err(Error::InvalidInput("window length must be positive".into()));
    }
    let t0 = trajs
        .iter()
        .filter_map(|tr| tr.visits.first().map(|v| v.t))
        .min()
        .ok_or_else(|| Error::InsufficientData("no events".into()))?;
    let mut per_window: BTreeMap<u64, HashMap<u32, u64>> = BTreeMap::new();
    for tr in trajs.iter() {
        for v in &tr.visits {
            *per_window
                .entry((v.t - t0) / window)
                .or_default()
                .entry(v.loc)
                .or_default() += 1;
        }
    }
    if per_window.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 windows, got {}",
            per_window.len()
        )));
    }
    let windows: Vec<(&u64, &HashMap<u32, u64>)> = per_window.iter().collect();
    let mut pairs = Vec::new();
    for w in windows.windows(2) {
        let (&k0, now) = w[0];
        let (&k1, next) = w[1];
        if k1 != k0 + 1 {
            continue;
        }
        let total_now: u64 = now.values().sum();
        let total_next: u64 = next.values().sum();
        let mut locs: Vec<(&u32, &u64)> = now.iter().collect();
        locs.sort_unstable();
        for (loc, &c) in locs {
            let share = c as f64 / total_now as f64;
            let arrive = next.get(loc).copied().unwrap_or(0) as f64 / total_next as f64;
            pairs.push((share, arrive));
        }
    }
    if pairs.is_empty() {
        return Err(Error::InsufficientData("no adjacent window pairs".into()));
    }
    let curve = BinnedCurve::from_points(&pairs, BinMean::Arithmetic);
    let fit = curve
        .fit(pairs.len())?
        .with_quantity(Quantity::PreferentialMovement);
    Ok(PreferentialCheck {
        pairs,
        curve,
        fit,
        windows: per_window.len(),
    })
}

/// Gini coefficient, `sum_ij |x_i - x_j| / (2 n^2 mean)`.
pub fn gini(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InsufficientData("gini of an empty list".into()));
    }
    if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(Error::InvalidInput(format!("gini needs non-negative values, got {v}")));
    }
    let mut xs = values.to_vec();
    xs.sort_by(f64::total_cmp);
    let total: f64 = xs.iter().sum();
    if total == 0.0 {
        return Err(Error::Degenerate("gini of all-zero values".into()));
    }
    let n = xs.len() as f64;
    // sum_ij |x_i - x_j| = 2 sum_i (2i - n + 1) x_(i) for 0-based sorted i
    let weighted: f64 = xs
        .iter()
        .enumerate()
        .map(|(i, x)| (2.0 * i as f64 - n + 1.0) * x)
        .sum();
    Ok((weighted / (n * total)).max(0.0))
}

/// Per-agent Gini of visit counts across that agent's locations.
pub fn visitation_gini(trajs: &TrajectorySet) -> Vec<f64> {
    par::map_slice(Exec::default(), &trajs.trajectories, |tr| {
        let mut counts: HashMap<u32, u64> = HashMap::new();
        for l in tr.locs() {
            *counts.entry(l).or_default() += 1;
        }
        let v: Vec<f64> = counts.values().map(|&c| c as f64).collect();
        gini(&v).unwrap_or(0.0)
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowReturn {
    /// Windows since the agent's first event.
    pub window: u64,
    #[serde(serialize_with = "crate::io::fmt::ser_real")]
    pub probability: f64,
    pub moves: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReturnProbability {
    pub per_window: Vec<WindowReturn>,
    /// Share of all moves landing somewhere the agent had already been.
    #[serde(serialize_with = "crate::io::fmt::ser_real")]
    pub overall: f64,
    pub moves: u64,
}

/// Probability of returning to known locations, overall and per window.
///
/// Windows are counted from each agent's first event. A move in window
/// `k >= 1` is a return if its location was visited in any window before
/// `k`.
pub fn return_probability(trajs: &TrajectorySet, window: u64) -> Result<ReturnProbability> {
    if window == 0 {
        return Err(Error::InvalidInput("window length must be positive".into()));
    }
    let per_agent = par::map_slice(Exec::default(), &trajs.trajectories, |tr| {
        let mut ever: HashSet<u32> = HashSet::new();
        let mut before_window: HashSet<u32> = HashSet::new();
        let mut this_window: Vec<u32> = Vec::new();
        let mut current = 0;
        let mut windows: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
        let (mut returns, mut moves) = (0u64, 0u64);
        let Some(first) = tr.visits.first() else {
            return (windows, returns, moves);
        };
        for (i, v) in tr.visits.iter().enumerate() {
            let k = (v.t - first.t) / window;
            if k != current {
                before_window.extend(this_window.drain(..));
                current = k;
            }
            if i > 0 {
                moves += 1;
                if ever.contains(&v.loc) {
                    returns += 1;
                }
                if k > 0 {
                    let e = windows.entry(k).or_default();
                    e.1 += 1;
                    if before_window.contains(&v.loc) {
                        e.0 += 1;
                    }
                }
            }
            ever.insert(v.loc);
            this_window.push(v.loc);
        }
        (windows, returns, moves)
    });
    let mut totals: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
    let (mut returns, mut moves) = (0, 0);
    for (w, r, m) in per_agent {
        returns += r;
        moves += m;
        for (k, (a, b)) in w {
            let e = totals.entry(k).or_default();
            e.0 += a;
            e.1 += b;
        }
    }
    if moves == 0 {
        return Err(Error::InsufficientData("no moves".into()));
    }
    Ok(ReturnProbability {
        per_window: totals
            .into_iter()
            .map(|(window, (r, m))| WindowReturn {
                window,
                probability: r as f64 / m as f64,
                moves: m,
            })
            .collect(),
        overall: returns as f64 / moves as f64,
        moves,
    })
}

/// Share of consecutive event pairs that stay on the same location.
pub fn retention_rate(trajs: &TrajectorySet) -> Result<f64> {
    let (stay, total) = trajs.iter().fold((0u64, 0u64), |(s, n), tr| {
        let stays = tr.visits.windows(2).filter(|w| w[0].loc == w[1].loc).count() as u64;
        (s + stays, n + tr.len().saturating_sub(1) as u64)
    });
    if total == 0 {
        return Err(Error::InsufficientData("no transitions".into()));
    }
    Ok(stay as f64 / total as f64)
}

/// Manhattan lengths of every location-changing consecutive pair.
pub fn displacements(trajs: &TrajectorySet, grid: &GridSpec) -> Result<Vec<u64>> {
    let pts = trajs.grid_points(grid)?;
    Ok(trajs
        .iter()
        .flat_map(|tr| {
            tr.visits
                .windows(2)
                .filter(|w| w[0].loc != w[1].loc)
                .map(|w| pts[w[0].loc as usize].manhattan(pts[w[1].loc as usize]))
                .collect::<Vec<_>>()
        })
        .collect())
}

/// Fraction of jumps longer than `threshold`.
pub fn teleport_share(jumps: &[u64], threshold: u64) -> f64 {
    if jumps.is_empty() {
        return 0.0;
    }
    jumps.iter().filter(|&&d| d > threshold).count() as f64 / jumps.len() as f64
}

/// Fraction of displacements (location-changing moves) longer than
/// `threshold` grid steps.
pub fn teleport_fraction(trajs: &TrajectorySet, grid: &GridSpec, threshold: u64) -> Result<f64> {
    Ok(teleport_share(&displacements(trajs, grid)?, threshold))
}

#[derive(Debug, Clone, Serialize)]
pub struct RankDistancePoint {
    pub rank: usize,
    #[serde(serialize_with = "crate::io::fmt::ser_real")]
    pub mean_distance: f64,
    pub agents: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankedDistance {
    pub overall: Vec<RankDistancePoint>,
    /// Keyed by the lower edge of the agent's base-2 `S` bin.
    pub by_distinct: BTreeMap<u64, Vec<RankDistancePoint>>,
    pub fit: Option<FitResult>,
    pub excluded: usize,
}

/// Distance from each agent's most visited location to its k-th ranked one.
pub fn ranked_distance(trajs: &TrajectorySet, grid: &GridSpec) -> Result<RankedDistance> {
    let pts = trajs.grid_points(grid)?;
    let mut overall: Vec<(f64, usize)> = Vec::new();
    let mut strata: BTreeMap<u64, Vec<(f64, usize)>> = BTreeMap::new();
    let mut excluded = 0;
    let accumulate = |acc: &mut Vec<(f64, usize)>, k: usize, d: f64| {
        if acc.len() <= k {
            acc.resize(k + 1, (0.0, 0));
        }
        acc[k].0 += d;
        acc[k].1 += 1;
    };
    for tr in trajs.iter() {
        let mut order: HashMap<u32, (u64, usize)> = HashMap::new();
        for (i, loc) in tr.locs().enumerate() {
            order.entry(loc).or_insert((0, i)).0 += 1;
        }
        if order.len() < 2 {
            excluded += 1;
            continue;
        }
        let mut ranked: Vec<(u32, u64, usize)> =
            order.into_iter().map(|(l, (c, f))| (l, c, f)).collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
        let home = pts[ranked[0].0 as usize];
        let stratum = 1u64 << (63 - (ranked.len() as u64).leading_zeros());
        let bucket = strata.entry(stratum).or_default();
        for (k, (loc, _, _)) in ranked.iter().enumerate().skip(1) {
            let d = home.manhattan(pts[*loc as usize]) as f64;
            accumulate(&mut overall, k + 1, d);
            accumulate(bucket, k + 1, d);
        }
    }
    let finish = |acc: Vec<(f64, usize)>| -> Vec<RankDistancePoint> {
        acc.into_iter()
            .enumerate()
            .filter(|(_, (_, c))| *c > 0)
            .map(|(rank, (s, c))| RankDistancePoint {
                rank,
                mean_distance: s / c as f64,
                agents: c,
            })
            .collect()
    };
    let overall = finish(overall);
    let pairs: Vec<(f64, f64)> = overall
        .iter()
        .filter(|p| p.mean_distance > 0.0)
        .map(|p| (p.rank as f64, p.mean_distance))
        .collect();
    let fit = fit_loglog_ols(&pairs)
        .ok()
        .map(|f| f.with_quantity(Quantity::RankedDistance));
    Ok(RankedDistance {
        overall,
        by_distinct: strata.into_iter().map(|(k, v)| (k, finish(v))).collect(),
        fit,
        excluded,
    })
}

/// `1 / (1 + gamma)`: exponent of `S ~ n^mu` implied by `p_new ~ S^-gamma`.
pub fn analytic_mu(gamma: f64) -> f64 {
    1.0 / (1.0 + gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{canonicalize_trajectories, MovementEvent};

    fn one(locs: &[&str]) -> TrajectorySet {
        many(&[("a", locs)])
    }

    fn many(agents: &[(&str, &[&str])]) -> TrajectorySet {
        canonicalize_trajectories(agents.iter().flat_map(|(a, locs)| {
            locs.iter()
                .enumerate()
                .map(move |(t, l)| MovementEvent::new(*a, t as u64, *l))
        }))
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("L{i}")).collect()
    }

    #[test]
    fn novel_walk_has_unit_exponent() {
        let ls = names(300);
        let refs: Vec<&str> = ls.iter().map(String::as_str).collect();
        let fit = exploration_curve(&one(&refs)).unwrap().fit;
        assert!((fit.exponent - 1.0).abs() < 1e-12, "{fit:?}");
    }

    #[test]
    fn stationary_walk_has_zero_exponent() {
        let refs = vec!["X"; 300];
        let fit = exploration_curve(&one(&refs)).unwrap().fit;
        assert!(fit.exponent.abs() < 1e-12);
    }

    #[test]
    fn rank_fraction_example() {
        let set = one(&["A", "B", "A", "C", "A", "B", "A"]);
        assert_eq!(
            rank_fractions(&set.trajectories[0]),
            vec![4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]
        );
    }

    #[test]
    fn rank_ties_go_to_first_discovered() {
        let set = one(&["B", "A", "A", "B", "C"]);
        let tr = &set.trajectories[0];
        assert_eq!(rank_fractions(tr), vec![0.4, 0.4, 0.2]);
    }

    #[test]
    fn uniform_agents_give_flat_rank_curve() {
        let ls = names(40);
        let mut visits: Vec<&str> = Vec::new();
        for _ in 0..3 {
            visits.extend(ls.iter().map(String::as_str));
        }
        let rf = rank_frequency(&many(&[("a", &visits), ("b", &visits), ("c", &["Q"])])).unwrap();
        assert!(rf.fit.exponent.abs() < 1e-12);
        assert_eq!(rf.excluded, 1);
    }

    #[test]
    fn fluctuation_noiseless_linear() {
        let mk = |f: f64| AgentStats {
            agent: String::new(),
            n: 0,
            distinct: 5,
            f_mean: f,
            sigma_f: 0.5 * f,
            visit_counts: Default::default(),
        };
        let stats: Vec<AgentStats> = (1..40).map(|i| mk(i as f64 * 1.7)).collect();
        let fl = fluctuation_scaling(&stats).unwrap();
        assert!((fl.fit.exponent - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fluctuation_slope_is_scale_covariant() {
        let base = many(&[
            ("a", &["A", "A", "B"]),
            ("b", &["A", "A", "A", "B", "C"]),
            ("c", &["A", "A", "A", "A", "A", "B", "B", "C"]),
            ("d", &["A", "B", "B", "B", "C", "C", "D", "D", "D", "D", "D"]),
            ("e", &["X"]),
        ]);
        let scaled_events: Vec<MovementEvent> = base
            .to_events()
            .into_iter()
            .flat_map(|e| std::iter::repeat_n(e, 3))
            .collect();
        let scaled = canonicalize_trajectories(scaled_events);
        let f1 = fluctuation_scaling(&all_agent_stats(&base)).unwrap();
        let f3 = fluctuation_scaling(&all_agent_stats(&scaled)).unwrap();
        assert!((f1.fit.exponent - f3.fit.exponent).abs() < 1e-12);
        assert_eq!(f1.excluded_single_location, 1);
        for ((x1, y1), (x3, y3)) in f1.pairs.iter().zip(&f3.pairs) {
            assert!((x3 / x1 - 3.0).abs() < 1e-12 && (y3 / y1 - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn always_exploring_gives_zero_gamma() {
        let ls = names(200);
        let refs: Vec<&str> = ls.iter().map(String::as_str).collect();
        let g = estimate_gamma(&one(&refs)).unwrap();
        assert!(g.fit.exponent.abs() < 1e-12);
        assert!(g.curve.bins.iter().all(|b| b.value == 1.0));
        assert!(estimate_gamma(&one(&refs[..50])).is_err());
    }

    #[test]
    fn gini_examples() {
        assert_eq!(gini(&[2.0, 2.0, 2.0, 2.0]).unwrap(), 0.0);
        assert!((gini(&[1.0, 0.0, 0.0, 0.0]).unwrap() - 0.75).abs() < 1e-12);
        assert!(gini(&[0.0, 0.0]).is_err());
        assert!(gini(&[]).is_err());
    }

    #[test]
    fn return_probability_example() {
        let rp = return_probability(&one(&["A", "B", "A", "B", "A"]), 1).unwrap();
        assert_eq!(rp.overall, 0.75);
        assert_eq!(rp.moves, 4);
        let probs: Vec<f64> = rp.per_window.iter().map(|w| w.probability).collect();
        assert_eq!(probs, vec![0.0, 1.0, 1.0, 1.0]);
        let novel = return_probability(&one(&["A", "B", "C"]), 1).unwrap();
        assert_eq!(novel.overall, 0.0);
    }

    #[test]
    fn return_probability_uses_earlier_windows_only() {
        // window 2 ticks: [A,B] [A,C] [C,...]
        let rp = return_probability(&one(&["A", "B", "A", "C", "C"]), 2).unwrap();
        let w: Vec<(u64, f64)> = rp.per_window.iter().map(|w| (w.window, w.probability)).collect();
        assert_eq!(w, vec![(1, 0.5), (2, 1.0)]);
    }

    #[test]
    fn retention_examples() {
        assert_eq!(retention_rate(&one(&["A", "A", "B", "B", "B"])).unwrap(), 0.75);
        assert_eq!(retention_rate(&one(&["A", "B", "A", "B"])).unwrap(), 0.0);
        assert!(retention_rate(&one(&["A"])).is_err());
    }

    #[test]
    fn teleport_examples() {
        assert_eq!(teleport_share(&[1, 2, 15, 3], 10), 0.25);
        assert_eq!(teleport_share(&[1, 2, 10], 10), 0.0);
        let grid = GridSpec::default();
        let set = one(&["0,0", "0,1", "0,1", "20,1", "20,3"]);
        assert_eq!(teleport_fraction(&set, &grid, 10).unwrap(), 1.0 / 3.0);
        assert!(teleport_fraction(&one(&["L1", "L2"]), &grid, 10).is_err());
    }

    #[test]
    fn ranked_distance_adjacent_second() {
        let grid = GridSpec::default();
        let set = many(&[("a", &["0,0", "0,0", "1,0"]), ("b", &["5,5"])]);
        let rd = ranked_distance(&set, &grid).unwrap();
        assert_eq!(rd.excluded, 1);
        assert_eq!(rd.overall.len(), 1);
        assert_eq!((rd.overall[0].rank, rd.overall[0].mean_distance), (2, 1.0));
    }

    #[test]
    fn analytic_mu_examples() {
        assert_eq!(analytic_mu(0.0), 1.0);
        assert_eq!(analytic_mu(1.0), 0.5);
        assert!((analytic_mu(0.41) - 0.709).abs() < 5e-4);
    }
}
