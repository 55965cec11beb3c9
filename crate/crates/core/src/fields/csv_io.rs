//! Grid dumps: columns `i1..id, x1..xd, Re v1, Im v1, ..., Re vN, Im vN`.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::grid::{GridField, GridSpec};
use crate::error::{Error, Result};

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub fn write_csv<W: Write>(v: &GridField, out: W) -> Result<()> {
    let d = v.spec.d;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=d).map(|k| format!("i{k}")).collect();
    header.extend((1..=d).map(|k| format!("x{k}")));
    for c in 1..=v.components {
        header.push(format!("re_v{c}"));
        header.push(format!("im_v{c}"));
    }
    w.write_record(&header).map_err(csv_err)?;
    for flat in 0..v.spec.len() {
        let idx = v.spec.multi_index(flat);
        let mut row: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
        row.extend(idx.iter().map(|&i| format!("{:e}", v.spec.coord(i))));
        for z in v.node(flat) {
            row.push(format!("{:e}", z.re));
            row.push(format!("{:e}", z.im));
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a dump written by [`write_csv`], recovering the grid from the indices and coordinates.
pub fn read_csv<R: Read>(input: R) -> Result<GridField> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    let d = header.iter().filter(|h| h.starts_with('i') && !h.starts_with("im")).count();
    let components = (header.len() - 2 * d) / 2;
    if d == 0 || components == 0 || header.len() != 2 * d + 2 * components {
        return Err(Error::Config { field: "csv header".into(), message: "unrecognized column layout".into() });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let parse = |k: usize| -> Result<f64> {
            rec[k]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Config { field: format!("csv column {}", &header[k]), message: e.to_string() })
        };
        let idx: Vec<usize> = (0..d).map(|k| parse(k).map(|x| x as usize)).collect::<Result<_>>()?;
        let x0 = parse(d)?;
        let vals: Vec<Complex64> = (0..components)
            .map(|c| Ok(Complex64::new(parse(2 * d + 2 * c)?, parse(2 * d + 2 * c + 1)?)))
            .collect::<Result<_>>()?;
        rows.push((idx, x0, vals));
    }
    let n = rows.iter().flat_map(|r| r.0.iter()).max().map(|m| m + 1).unwrap_or(0);
    let first = rows
        .iter()
        .find(|r| r.0[0] == 0)
        .ok_or_else(|| Error::Config { field: "csv".into(), message: "no row with i1 = 0".into() })?;
    let spec = GridSpec::new(d, -first.1, n)?;
    if rows.len() != spec.len() {
        return Err(Error::Dimension(format!("{} rows for a grid of {} nodes", rows.len(), spec.len())));
    }
    let mut field = GridField::zeros(spec, components);
    for (idx, _, vals) in rows {
        field.node_mut(spec.flat_index(&idx)).copy_from_slice(&vals);
    }
    Ok(field)
}
