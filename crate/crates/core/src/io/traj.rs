//! Trajectory files: NDJSON event logs and headed CSV.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{LocationId, MovementEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Ndjson,
    Csv,
}

impl Format {
    /// Guess from the file extension, `None` if it says nothing.
    pub fn from_path(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(Format::Csv),
            "ndjson" | "jsonl" | "json" => Some(Format::Ndjson),
            _ => None,
        }
    }

    /// Guess from content: JSON lines start with `{`.
    pub fn sniff(text: &str) -> Format {
        match text.trim_start().chars().next() {
            Some('{') | None => Format::Ndjson,
            _ => Format::Csv,
        }
    }
}

/// Input column (or JSON key) holding each event field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMap {
    pub agent: String,
    pub t: String,
    pub loc: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            agent: "agent".into(),
            t: "t".into(),
            loc: "loc".into(),
        }
    }
}

impl FromStr for ColumnMap {
    type Err = Error;

    /// `agent=COL,t=COL,loc=COL`; omitted fields keep their default name.
    fn from_str(s: &str) -> Result<Self> {
        let mut map = ColumnMap::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, col) = part
                .split_once('=')
                .ok_or_else(|| Error::config("map", format!("expected FIELD=COLUMN, got `{part}`")))?;
            let col = col.trim().to_string();
            if col.is_empty() {
                return Err(Error::config("map", format!("empty column for `{key}`")));
            }
            match key.trim() {
                "agent" => map.agent = col,
                "t" => map.t = col,
                "loc" => map.loc = col,
                other => {
                    return Err(Error::config(
                        "map",
                        format!("unknown field `{other}`, expected agent, t or loc"),
                    ))
                }
            }
        }
        Ok(map)
    }
}

/// Events read from a file, plus the header metadata of generated files.
#[derive(Debug, Clone, Default)]
pub struct Ingested {
    pub events: Vec<MovementEvent>,
    pub meta: Option<Value>,
}

pub fn read_events_path(path: &Path, format: Option<Format>, map: &ColumnMap) -> Result<Ingested> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    let format = format
        .or_else(|| Format::from_path(path))
        .unwrap_or_else(|| Format::sniff(&text));
    read_events_str(&text, format, map)
}

pub fn read_events_str(text: &str, format: Format, map: &ColumnMap) -> Result<Ingested> {
    match format {
        Format::Ndjson => read_ndjson(text.as_bytes(), map),
        Format::Csv => read_csv(text.as_bytes(), map),
    }
}

fn json_text(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn parse_time(raw: &str) -> std::result::Result<u64, String> {
    raw.trim()
        .parse::<u64>()
        .map_err(|_| format!("timestamp `{raw}` is not a non-negative integer"))
}

fn nonempty(field: &str, raw: String) -> std::result::Result<String, String> {
    if raw.trim().is_empty() {
        Err(format!("empty `{field}`"))
    } else {
        Ok(raw)
    }
}

pub fn read_ndjson<R: Read>(reader: R, map: &ColumnMap) -> Result<Ingested> {
    let mut out = Ingested::default();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value =
            serde_json::from_str(&line).map_err(|e| Error::parse(lineno, e.to_string()))?;
        let Value::Object(obj) = value else {
            return Err(Error::parse(lineno, "expected a JSON object"));
        };
        if out.events.is_empty() && out.meta.is_none() && obj.contains_key("meta") {
            out.meta = obj.get("meta").cloned();
            continue;
        }
        let field = |name: &str| -> Result<String> {
            let v = obj
                .get(name)
                .ok_or_else(|| Error::parse(lineno, format!("missing key `{name}`")))?;
            json_text(v).ok_or_else(|| Error::parse(lineno, format!("`{name}` must be a string or number")))
        };
        let agent = nonempty(&map.agent, field(&map.agent)?).map_err(|m| Error::parse(lineno, m))?;
        let t = parse_time(&field(&map.t)?).map_err(|m| Error::parse(lineno, m))?;
        let loc = nonempty(&map.loc, field(&map.loc)?).map_err(|m| Error::parse(lineno, m))?;
        out.events.push(MovementEvent::new(agent, t, loc));
    }
    Ok(out)
}

pub fn read_csv<R: Read>(reader: R, map: &ColumnMap) -> Result<Ingested> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);
    let headers = match rdr.headers() {
        Ok(h) => h.clone(),
        Err(e) => return Err(csv_error(e)),
    };
    if headers.is_empty() {
        return Ok(Ingested::default());
    }
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::parse(1, format!("missing column `{name}`")))
    };
    let (ia, it, il) = (col(&map.agent)?, col(&map.t)?, col(&map.loc)?);
    let mut out = Ingested::default();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let lineno = rec.position().map_or(0, |p| p.line() as usize);
        let get = |i: usize| rec.get(i).unwrap_or("").to_string();
        let agent = nonempty(&map.agent, get(ia)).map_err(|m| Error::parse(lineno, m))?;
        let t = parse_time(&get(it)).map_err(|m| Error::parse(lineno, m))?;
        let loc = nonempty(&map.loc, get(il)).map_err(|m| Error::parse(lineno, m))?;
        out.events.push(MovementEvent::new(agent, t, loc));
    }
    Ok(out)
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::parse(line, format!("{kind:?}")),
    }
}

#[derive(Serialize)]
struct EventLine<'a> {
    agent: &'a str,
    t: u64,
    loc: &'a LocationId,
}

#[derive(Serialize)]
struct Header<'a, M: Serialize> {
    meta: &'a M,
}

/// Write an optional `{"meta": ...}` header and one event object per line.
pub fn write_ndjson<'a, W, M, I>(writer: W, meta: Option<&M>, events: I) -> Result<()>
where
    W: Write,
    M: Serialize,
    I: IntoIterator<Item = &'a MovementEvent>,
{
    let mut w = BufWriter::new(writer);
    if let Some(meta) = meta {
        serde_json::to_writer(&mut w, &Header { meta })?;
        w.write_all(b"\n")?;
    }
    for e in events {
        write_event(&mut w, e)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_event<W: Write>(w: &mut W, e: &MovementEvent) -> Result<()> {
    serde_json::to_writer(
        &mut *w,
        &EventLine {
            agent: &e.agent,
            t: e.t,
            loc: &e.loc,
        },
    )?;
    w.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn event_line_layout() {
        let mut buf = Vec::new();
        let e = MovementEvent::new("a17", 42, "L993");
        write_ndjson(&mut buf, None::<&()>, [&e]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "{\"agent\":\"a17\",\"t\":42,\"loc\":\"L993\"}\n");
    }

    #[test]
    fn ndjson_round_trip_with_header() {
        let events = vec![
            MovementEvent::new("a0", 0, "L3"),
            MovementEvent::new("a1", 0, "-4,7"),
        ];
        let mut buf = Vec::new();
        write_ndjson(&mut buf, Some(&serde_json::json!({"version": "x"})), &events).unwrap();
        let back = read_ndjson(buf.as_slice(), &ColumnMap::default()).unwrap();
        assert_eq!(back.events, events);
        assert_eq!(back.meta.unwrap()["version"], "x");
    }

    #[test]
    fn ndjson_errors_carry_line_numbers() {
        let text = "{\"agent\":\"a\",\"t\":1,\"loc\":\"A\"}\n\n{\"agent\":\"a\",\"t\":-2,\"loc\":\"B\"}\n";
        match read_ndjson(text.as_bytes(), &ColumnMap::default()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match read_ndjson("{\"agent\":\"a\"\n".as_bytes(), &ColumnMap::default()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn csv_with_column_map() {
        let text = "user,when,contract,price\nu1,100,0xab,3\nu1,160,0xcd,4\n";
        let map: ColumnMap = "agent=user,t=when,loc=contract".parse().unwrap();
        let got = read_csv(text.as_bytes(), &map).unwrap().events;
        assert_eq!(got[1], MovementEvent::new("u1", 160, "0xcd"));
        let err = read_csv(text.as_bytes(), &ColumnMap::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn csv_bad_row_line_number() {
        let text = "agent,t,loc\na,1,A\nb,x,B\n";
        match read_csv(text.as_bytes(), &ColumnMap::default()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn numeric_ids_become_text() {
        let got = read_ndjson("{\"agent\":7,\"t\":\"5\",\"loc\":12}".as_bytes(), &ColumnMap::default())
            .unwrap()
            .events;
        assert_eq!(got, vec![MovementEvent::new("7", 5, "12")]);
    }

    #[test]
    fn bad_map_names_field() {
        assert!(matches!(
            "who=user".parse::<ColumnMap>(),
            Err(Error::Config { field: "map", .. })
        ));
    }

    #[test]
    fn format_guessing() {
        assert_eq!(Format::from_path(Path::new("x.CSV")), Some(Format::Csv));
        assert_eq!(Format::from_path(Path::new("x.jsonl")), Some(Format::Ndjson));
        assert_eq!(Format::from_path(Path::new("x")), None);
        assert_eq!(Format::sniff("  {\"a\":1}"), Format::Ndjson);
        assert_eq!(Format::sniff("agent,t,loc"), Format::Csv);
    }
}
