//! Network and curve tables as CSV.

use std::collections::HashMap;
use std::io::{Read, Write};

use crate::analysis::CurvePoint;
use crate::error::{Error, Result};
use crate::model::{LocationId, LocationTable};
use crate::net::{EdgeWeight, MobilityNetwork, NodeStats};

use super::fmt::fmt_real;
use super::traj::csv_error;

pub const EDGE_HEADER: [&str; 4] = ["src", "dst", "weight_events", "weight_agents"];
pub const NODE_HEADER: [&str; 5] = ["loc", "visitors", "events", "self_transitions", "degree"];
pub const CURVE_HEADER: [&str; 3] = ["bin_center", "value", "count"];

fn io_err(e: csv::Error) -> Error {
    csv_error(e)
}

pub fn write_edges_csv<W: Write>(writer: W, net: &MobilityNetwork) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(EDGE_HEADER).map_err(io_err)?;
    let ids = net.locations();
    for ((a, b), wt) in net.sorted_edges() {
        w.write_record([
            ids.id(a).as_str(),
            ids.id(b).as_str(),
            &wt.events.to_string(),
            &wt.agents.to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_nodes_csv<W: Write>(writer: W, net: &MobilityNetwork) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(NODE_HEADER).map_err(io_err)?;
    let degrees = net.degrees();
    for (i, (n, k)) in net.nodes().iter().zip(&degrees).enumerate() {
        w.write_record([
            net.locations().id(i as u32).as_str(),
            &n.visitors.to_string(),
            &n.events.to_string(),
            &n.self_transitions.to_string(),
            &k.to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}

fn check_header(got: &csv::StringRecord, want: &[&str]) -> Result<()> {
    if got.iter().ne(want.iter().copied()) {
        return Err(Error::parse(
            1,
            format!("expected header `{}`, got `{}`", want.join(","), got.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    Ok(())
}

fn field_u64(rec: &csv::StringRecord, i: usize, name: &str) -> Result<u64> {
    let line = rec.position().map_or(0, |p| p.line() as usize);
    rec.get(i)
        .unwrap_or("")
        .parse()
        .map_err(|_| Error::parse(line, format!("`{name}` must be a non-negative integer")))
}

/// Rebuild a network from its node and edge tables. The degree column is
/// recomputed from the edges rather than trusted.
pub fn read_network<N: Read, E: Read>(nodes: N, edges: E, directed: bool) -> Result<MobilityNetwork> {
    let mut locations = LocationTable::new();
    let mut stats = Vec::new();
    let mut rdr = csv::Reader::from_reader(nodes);
    check_header(rdr.headers().map_err(io_err)?, &NODE_HEADER)?;
    for rec in rdr.records() {
        let rec = rec.map_err(io_err)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let id = LocationId::new(rec.get(0).unwrap_or(""));
        if locations.get(&id).is_some() {
            return Err(Error::parse(line, format!("duplicate node `{id}`")));
        }
        locations.intern(&id);
        stats.push(NodeStats {
            visitors: field_u64(&rec, 1, "visitors")?,
            events: field_u64(&rec, 2, "events")?,
            self_transitions: field_u64(&rec, 3, "self_transitions")?,
        });
    }
    let mut map = HashMap::new();
    let mut rdr = csv::Reader::from_reader(edges);
    check_header(rdr.headers().map_err(io_err)?, &EDGE_HEADER)?;
    for rec in rdr.records() {
        let rec = rec.map_err(io_err)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let node = |i: usize| {
            let id = LocationId::new(rec.get(i).unwrap_or(""));
            locations
                .get(&id)
                .ok_or_else(|| Error::parse(line, format!("edge endpoint `{id}` is not in the node table")))
        };
        let (a, b) = (node(0)?, node(1)?);
        if a == b {
            return Err(Error::parse(line, "self-loops belong in the node table"));
        }
        let key = if directed { (a, b) } else { (a.min(b), a.max(b)) };
        let w = EdgeWeight {
            events: field_u64(&rec, 2, "weight_events")?,
            agents: field_u64(&rec, 3, "weight_agents")?,
        };
        if map.insert(key, w).is_some() {
            return Err(Error::parse(line, "duplicate edge"));
        }
    }
    Ok(MobilityNetwork::from_parts(locations, stats, map, directed))
}

pub fn write_curve_csv<W: Write>(writer: W, points: &[CurvePoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CURVE_HEADER).map_err(io_err)?;
    for p in points {
        w.write_record([fmt_real(p.x), fmt_real(p.value), p.count.to_string()])
            .map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{canonicalize_trajectories, MovementEvent};
    use crate::net::build_network;

    fn sample(directed: bool) -> MobilityNetwork {
        let ev = ["A", "B", "A", "A", "C"]
            .iter()
            .enumerate()
            .map(|(t, l)| MovementEvent::new("u", t as u64, *l))
            .chain([MovementEvent::new("v", 0, "B"), MovementEvent::new("v", 1, "A")]);
        build_network(&canonicalize_trajectories(ev), directed)
    }

    #[test]
    fn tables_have_exact_headers() {
        let net = sample(false);
        let mut e = Vec::new();
        let mut n = Vec::new();
        write_edges_csv(&mut e, &net).unwrap();
        write_nodes_csv(&mut n, &net).unwrap();
        let e = String::from_utf8(e).unwrap();
        let n = String::from_utf8(n).unwrap();
        assert!(e.starts_with("src,dst,weight_events,weight_agents\n"));
        assert!(n.starts_with("loc,visitors,events,self_transitions,degree\n"));
        assert!(e.contains("A,B,3,2\n"), "{e}");
        assert!(n.contains("A,2,4,1,2\n"), "{n}");
    }

    #[test]
    fn network_round_trip() {
        for directed in [false, true] {
            let net = sample(directed);
            let (mut e, mut n) = (Vec::new(), Vec::new());
            write_edges_csv(&mut e, &net).unwrap();
            write_nodes_csv(&mut n, &net).unwrap();
            let back = read_network(n.as_slice(), e.as_slice(), directed).unwrap();
            assert_eq!(back, net);
        }
    }

    #[test]
    fn unknown_endpoint_is_reported() {
        let nodes = "loc,visitors,events,self_transitions,degree\nA,1,1,0,1\n";
        let edges = "src,dst,weight_events,weight_agents\nA,Z,1,1\n";
        match read_network(nodes.as_bytes(), edges.as_bytes(), false) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn curve_rows_use_fixed_digits() {
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &[CurvePoint { x: 1.5, value: 0.1, count: 7 }]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "bin_center,value,count\n1.5000000000000000,0.10000000000000001,7\n"
        );
    }
}
