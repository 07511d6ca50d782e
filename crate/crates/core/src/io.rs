//! Text file formats for atomic and discrete varifolds.
//!
//! Atomic:
//!
//! ```text
//! varifold-atoms v1 n=<n> d=<d> count=<N> [lo=<a,b,..> hi=<a,b,..>]
//! x_1 … x_n | b_11 … b_1n ; … ; b_d1 … b_dn | m
//! ```
//!
//! Discrete:
//!
//! ```text
//! varifold-grid v1 n=<n> d=<d> h=<h> origin=<o_1,..> counts=<c_1,..> cells=<K>
//! i_1 … i_n | b_11 … b_1n ; … | m [| degenerate]
//! ```
//!
//! Floats use Rust's shortest round-trip representation, so writing and
//! reading back reproduces every value bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grassmann::Plane;
use crate::gridding::{CartesianGrid, Cell, DiscreteVarifold};
use crate::varifold::{Atom, AtomicVarifold, BoxRegion};

pub const ATOMS_MAGIC: &str = "varifold-atoms";
pub const GRID_MAGIC: &str = "varifold-grid";
pub const VERSION: &str = "v1";

fn join(values: &[f64], sep: &str) -> String {
    let mut out = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        write!(out, "{v}").unwrap();
    }
    out
}

fn basis_field(plane: &Plane) -> String {
    (0..plane.dim())
        .map(|k| join(plane.basis_vector(k), " "))
        .collect::<Vec<_>>()
        .join(" ; ")
}

pub fn write_atoms(v: &AtomicVarifold) -> String {
    let dom = v.domain();
    let mut out = format!(
        "{ATOMS_MAGIC} {VERSION} n={} d={} count={} lo={} hi={}\n",
        v.ambient_dim(),
        v.dim(),
        v.len(),
        join(dom.lo(), ","),
        join(dom.hi(), ",")
    );
    for a in v.atoms() {
        writeln!(out, "{} | {} | {}", join(&a.x, " "), basis_field(&a.plane), a.mass).unwrap();
    }
    out
}

pub fn write_grid(dv: &DiscreteVarifold) -> String {
    let grid = dv.grid();
    let counts: Vec<String> = grid.counts().iter().map(|c| c.to_string()).collect();
    let mut out = format!(
        "{GRID_MAGIC} {VERSION} n={} d={} h={} origin={} counts={} cells={}\n",
        grid.dim(),
        dv.dim(),
        grid.h(),
        join(grid.origin(), ","),
        counts.join(","),
        dv.cells().len()
    );
    for (index, cell) in dv.cells() {
        let idx: Vec<String> = index.iter().map(|i| i.to_string()).collect();
        write!(out, "{} | {} | {}", idx.join(" "), basis_field(&cell.plane), cell.mass).unwrap();
        if cell.degenerate {
            out.push_str(" | degenerate");
        }
        out.push('\n');
    }
    out
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

struct Header<'a> {
    fields: BTreeMap<&'a str, &'a str>,
    line: usize,
}

impl<'a> Header<'a> {
    fn parse(text: &'a str, magic: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        if tokens.next() != Some(magic) {
            return Err(parse_err(1, format!("expected `{magic}` header")));
        }
        match tokens.next() {
            Some(VERSION) => {}
            other => return Err(parse_err(1, format!("unsupported version {other:?}"))),
        }
        let mut fields = BTreeMap::new();
        for token in tokens {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| parse_err(1, format!("malformed header field `{token}`")))?;
            fields.insert(key, value);
        }
        Ok(Self { fields, line: 1 })
    }

    fn get(&self, key: &str) -> Result<&'a str> {
        self.fields
            .get(key)
            .copied()
            .ok_or_else(|| parse_err(self.line, format!("missing header field `{key}`")))
    }

    fn usize(&self, key: &str) -> Result<usize> {
        self.get(key)?
            .parse()
            .map_err(|_| parse_err(self.line, format!("`{key}` is not an integer")))
    }

    fn floats(&self, key: &str) -> Result<Vec<f64>> {
        self.get(key)?
            .split(',')
            .map(|s| {
                s.parse()
                    .map_err(|_| parse_err(self.line, format!("`{key}` has a bad number `{s}`")))
            })
            .collect()
    }
}

fn floats(text: &str, line: usize) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|s| s.parse().map_err(|_| parse_err(line, format!("bad number `{s}`"))))
        .collect()
}

fn parse_plane(text: &str, n: usize, d: usize, line: usize) -> Result<Plane> {
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .map(|row| floats(row, line))
        .collect::<Result<_>>()?;
    if rows.len() != d || rows.iter().any(|r| r.len() != n) {
        return Err(parse_err(line, format!("basis must be {d} rows of {n} numbers")));
    }
    Plane::from_orthonormal_basis(&rows).map_err(|e| parse_err(line, e.to_string()))
}

fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn read_atoms(text: &str) -> Result<AtomicVarifold> {
    let header = Header::parse(text.lines().next().unwrap_or(""), ATOMS_MAGIC)?;
    let n = header.usize("n")?;
    let d = header.usize("d")?;
    let count = header.usize("count")?;
    let domain = match (header.fields.contains_key("lo"), header.fields.contains_key("hi")) {
        (true, true) => Some(
            BoxRegion::new(header.floats("lo")?, header.floats("hi")?)
                .map_err(|e| parse_err(1, e.to_string()))?,
        ),
        (false, false) => None,
        _ => return Err(parse_err(1, "`lo` and `hi` must appear together")),
    };
    let mut atoms = Vec::with_capacity(count);
    for (line, record) in records(text) {
        let parts: Vec<&str> = record.split('|').collect();
        if parts.len() != 3 {
            return Err(parse_err(line, "expected `x | basis | mass`"));
        }
        let x = floats(parts[0], line)?;
        if x.len() != n {
            return Err(parse_err(line, format!("expected {n} coordinates")));
        }
        let plane = parse_plane(parts[1], n, d, line)?;
        let mass = parts[2]
            .trim()
            .parse()
            .map_err(|_| parse_err(line, "bad mass"))?;
        atoms.push(Atom::new(x, plane, mass));
    }
    if atoms.len() != count {
        return Err(parse_err(
            1,
            format!("header announces {count} atoms, found {}", atoms.len()),
        ));
    }
    AtomicVarifold::new(d, atoms, domain)
}

pub fn read_grid(text: &str) -> Result<DiscreteVarifold> {
    let header = Header::parse(text.lines().next().unwrap_or(""), GRID_MAGIC)?;
    let n = header.usize("n")?;
    let d = header.usize("d")?;
    let h: f64 = header
        .get("h")?
        .parse()
        .map_err(|_| parse_err(1, "`h` is not a number"))?;
    let origin = header.floats("origin")?;
    let counts: Vec<usize> = header
        .get("counts")?
        .split(',')
        .map(|s| s.parse().map_err(|_| parse_err(1, format!("bad count `{s}`"))))
        .collect::<Result<_>>()?;
    let expected = header.usize("cells")?;
    if origin.len() != n || counts.len() != n {
        return Err(parse_err(1, "origin/counts length differs from n"));
    }
    let grid = CartesianGrid::new(origin, h, counts).map_err(|e| parse_err(1, e.to_string()))?;

    let mut cells = BTreeMap::new();
    for (line, record) in records(text) {
        let parts: Vec<&str> = record.split('|').collect();
        if parts.len() != 3 && parts.len() != 4 {
            return Err(parse_err(line, "expected `index | basis | mass [| degenerate]`"));
        }
        let index: Vec<usize> = parts[0]
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| parse_err(line, format!("bad index `{s}`"))))
            .collect::<Result<_>>()?;
        if index.len() != n {
            return Err(parse_err(line, format!("expected {n} indices")));
        }
        let plane = parse_plane(parts[1], n, d, line)?;
        let mass = parts[2]
            .trim()
            .parse()
            .map_err(|_| parse_err(line, "bad mass"))?;
        let degenerate = match parts.get(3).map(|s| s.trim()) {
            None => false,
            Some("degenerate") => true,
            Some(other) => return Err(parse_err(line, format!("unknown flag `{other}`"))),
        };
        if cells
            .insert(index.clone(), Cell { mass, plane, degenerate })
            .is_some()
        {
            return Err(parse_err(line, format!("duplicate cell {index:?}")));
        }
    }
    if cells.len() != expected {
        return Err(parse_err(
            1,
            format!("header announces {expected} cells, found {}", cells.len()),
        ));
    }
    DiscreteVarifold::new(d, grid, cells)
}
