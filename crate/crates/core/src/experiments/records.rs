//! CSV form of a [`RecordSet`].
//!
//! Columns: `n, trial, realized_n, dn, gumbel_T, strong_ratio`, one
//! `W_beta=<β>` column per β, then `contained` and `shell_hit` (`true`,
//! `false`, or empty when not recorded). Floats use the shortest
//! representation that parses back to the same value.

use std::io::{Read, Write};

use super::trials::{RecordSet, TrialRecord};
use crate::error::{Error, Result};

const FIXED: [&str; 6] = ["n", "trial", "realized_n", "dn", "gumbel_T", "strong_ratio"];
const W_PREFIX: &str = "W_beta=";

fn flag(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "true",
        Some(false) => "false",
        None => "",
    }
}

pub fn write_records<W: Write>(set: &RecordSet, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = FIXED.iter().map(|s| s.to_string()).collect();
    header.extend(set.betas.iter().map(|b| format!("{W_PREFIX}{b:?}")));
    header.push("contained".into());
    header.push("shell_hit".into());
    w.write_record(&header)?;
    for r in &set.records {
        let mut row = vec![
            r.n.to_string(),
            r.trial.to_string(),
            r.realized_n.to_string(),
            format!("{:?}", r.dn),
            format!("{:?}", r.gumbel_t),
            format!("{:?}", r.strong_ratio),
        ];
        row.extend(r.isolated.iter().map(u64::to_string));
        row.push(flag(r.contained).into());
        row.push(flag(r.shell_hit).into());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn parse<T: std::str::FromStr>(line: usize, column: &str, text: &str) -> Result<T> {
    text.parse()
        .map_err(|_| Error::Records(format!("row {line}: bad {column} value `{text}`")))
}

fn parse_flag(line: usize, column: &str, text: &str) -> Result<Option<bool>> {
    match text {
        "" => Ok(None),
        "true" => Ok(Some(true)),
        "false" => Ok(Some(false)),
        other => Err(Error::Records(format!("row {line}: bad {column} value `{other}`"))),
    }
}

pub fn read_records<R: Read>(input: R) -> Result<RecordSet> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.is_empty() {
        return Err(Error::Empty("records file"));
    }
    let position = |name: &str| header.iter().position(|h| h == name);
    let mut missing: Vec<String> = FIXED
        .iter()
        .chain(std::iter::once(&"contained"))
        .filter(|c| position(c).is_none())
        .map(|c| c.to_string())
        .collect();
    let w_cols: Vec<(usize, f64)> = header
        .iter()
        .enumerate()
        .filter_map(|(i, h)| h.strip_prefix(W_PREFIX).map(|b| (i, b)))
        .map(|(i, b)| {
            b.parse::<f64>()
                .map(|beta| (i, beta))
                .map_err(|_| Error::Records(format!("bad column name `{W_PREFIX}{b}`")))
        })
        .collect::<Result<_>>()?;
    if w_cols.is_empty() {
        missing.push(format!("{W_PREFIX}<beta>"));
    }
    if !missing.is_empty() {
        return Err(Error::Schema { missing });
    }
    let idx: Vec<usize> = FIXED.iter().map(|c| position(c).expect("checked")).collect();
    let contained_idx = position("contained").expect("checked");
    let shell_idx = position("shell_hit");
    let mut records = Vec::new();
    for (k, row) in rd.records().enumerate() {
        let row = row?;
        let line = k + 2;
        let get = |i: usize| row.get(i).unwrap_or("");
        records.push(TrialRecord {
            n: parse(line, "n", get(idx[0]))?,
            trial: parse(line, "trial", get(idx[1]))?,
            realized_n: parse(line, "realized_n", get(idx[2]))?,
            dn: parse(line, "dn", get(idx[3]))?,
            gumbel_t: parse(line, "gumbel_T", get(idx[4]))?,
            strong_ratio: parse(line, "strong_ratio", get(idx[5]))?,
            isolated: w_cols
                .iter()
                .map(|&(i, _)| parse(line, "W", get(i)))
                .collect::<Result<_>>()?,
            contained: parse_flag(line, "contained", get(contained_idx))?,
            shell_hit: match shell_idx {
                Some(i) => parse_flag(line, "shell_hit", get(i))?,
                None => None,
            },
        });
    }
    if records.is_empty() {
        return Err(Error::Empty("records file"));
    }
    Ok(RecordSet {
        betas: w_cols.into_iter().map(|(_, b)| b).collect(),
        records,
    })
}
