//! Plain-text trajectory files.
//!
//! Each snapshot is a header `t=<time> n=<cells> xmin=<x_min> xmax=<x_max>`
//! followed by one value per line; snapshots are separated by a blank line.
//! Numbers use the shortest representation that parses back to the same
//! `f64`, so writing and reading is lossless.

use std::fmt::Write as _;

use crate::error::{BpError, Result};
use crate::grid::{CellProfile, Grid, Trajectory};

pub fn write_profile(out: &mut String, t: f64, p: &CellProfile) {
    let g = p.grid();
    writeln!(out, "t={t:?} n={} xmin={:?} xmax={:?}", g.n_cells(), g.x_min(), g.x_max()).unwrap();
    for v in p.values() {
        writeln!(out, "{v:?}").unwrap();
    }
}

pub fn format_trajectory(traj: &Trajectory) -> String {
    let mut out = String::new();
    for (k, (t, p)) in traj.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        write_profile(&mut out, t, p);
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> BpError {
    BpError::Parse { line, msg: msg.into() }
}

struct Header {
    t: f64,
    n: usize,
    x_min: f64,
    x_max: f64,
}

fn parse_header(line_no: usize, line: &str) -> Result<Header> {
    let mut t = None;
    let mut n = None;
    let mut x_min = None;
    let mut x_max = None;
    for field in line.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, format!("expected key=value, got `{field}`")))?;
        let real = || {
            value
                .parse::<f64>()
                .map_err(|_| parse_err(line_no, format!("`{key}` is not a number: `{value}`")))
        };
        match key {
            "t" => t = Some(real()?),
            "xmin" => x_min = Some(real()?),
            "xmax" => x_max = Some(real()?),
            "n" => {
                n = Some(value.parse::<usize>().map_err(|_| {
                    parse_err(line_no, format!("`n` is not a cell count: `{value}`"))
                })?)
            }
            _ => return Err(parse_err(line_no, format!("unknown header field `{key}`"))),
        }
    }
    let missing = |k: &str| parse_err(line_no, format!("header lacks `{k}`"));
    Ok(Header {
        t: t.ok_or_else(|| missing("t"))?,
        n: n.ok_or_else(|| missing("n"))?,
        x_min: x_min.ok_or_else(|| missing("xmin"))?,
        x_max: x_max.ok_or_else(|| missing("xmax"))?,
    })
}

pub fn parse_trajectory(text: &str) -> Result<Trajectory> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut traj: Option<Trajectory> = None;
    while let Some((line_no, header)) = lines.by_ref().find(|(_, l)| !l.is_empty()) {
        let h = parse_header(line_no, header)?;
        let grid = Grid::new(h.x_min, h.x_max, h.n).map_err(|e| parse_err(line_no, e.to_string()))?;
        let mut values = Vec::with_capacity(h.n);
        for _ in 0..h.n {
            let (i, l) = lines
                .next()
                .filter(|(_, l)| !l.is_empty())
                .ok_or_else(|| parse_err(line_no, format!("snapshot t={} has fewer than {} values", h.t, h.n)))?;
            values.push(l.parse::<f64>().map_err(|_| parse_err(i, format!("not a number: `{l}`")))?);
        }
        let p = CellProfile::new(grid, values).map_err(|e| parse_err(line_no, e.to_string()))?;
        match traj.as_mut() {
            None => traj = Some(Trajectory::new(h.t, p).map_err(|e| parse_err(line_no, e.to_string()))?),
            Some(tr) => tr.push(h.t, p).map_err(|e| parse_err(line_no, e.to_string()))?,
        }
        if let Some((i, l)) = lines.next() {
            if !l.is_empty() {
                return Err(parse_err(i, format!("expected a blank line after {} values", h.n)));
            }
        }
    }
    traj.ok_or_else(|| parse_err(0, "no snapshots found"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small() -> Trajectory {
        let g = Grid::new(-1.0, 1.0, 3).unwrap();
        let mut tr = Trajectory::new(0.0, CellProfile::new(g, vec![0.0, 1.0, -0.5]).unwrap()).unwrap();
        tr.push(0.1, CellProfile::new(g, vec![1e-300, 0.1 + 0.2, -3.0]).unwrap()).unwrap();
        tr
    }

    #[test]
    fn layout() {
        let s = format_trajectory(&small());
        let expected = "t=0.0 n=3 xmin=-1.0 xmax=1.0\n0.0\n1.0\n-0.5\n\n\
                        t=0.1 n=3 xmin=-1.0 xmax=1.0\n1e-300\n0.30000000000000004\n-3.0\n";
        assert_eq!(s, expected);
        assert_eq!(parse_trajectory(&s).unwrap(), small());
    }

    #[test]
    fn tolerates_trailing_blank_lines() {
        let s = format_trajectory(&small()) + "\n\n";
        assert_eq!(parse_trajectory(&s).unwrap(), small());
    }

    #[test]
    fn reports_bad_input() {
        let bad = [
            ("", 0),
            ("t=0 n=3 xmin=0 xmax=1\n1\n2\n", 1),
            ("t=0 n=2 xmin=0 xmax=1\n1\nfoo\n", 3),
            ("t=0 n=2 xmin=0\n1\n2\n", 1),
            ("t=0 n=2 xmin=0 xmax=1 y=2\n1\n2\n", 1),
            ("t=0 n=2 xmin=0 xmax=1\n1\n2\n3\n", 4),
            ("t=1 n=2 xmin=0 xmax=1\n1\n2\n\nt=0.5 n=2 xmin=0 xmax=1\n1\n2\n", 5),
            ("t=0 n=2 xmin=0 xmax=1\n1\nNaN\n", 1),
        ];
        for (text, line) in bad {
            match parse_trajectory(text) {
                Err(BpError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    proptest! {
        #[test]
        fn round_trip(
            vals in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 4), 1..5),
            x_min in -100.0f64..0.0,
        ) {
            let g = Grid::new(x_min, x_min + 7.3, 4).unwrap();
            let mut tr = Trajectory::new(0.0, CellProfile::new(g, vals[0].clone()).unwrap()).unwrap();
            for (k, v) in vals.iter().enumerate().skip(1) {
                tr.push(k as f64 / 3.0, CellProfile::new(g, v.clone()).unwrap()).unwrap();
            }
            let text = format_trajectory(&tr);
            let back = parse_trajectory(&text).unwrap();
            prop_assert_eq!(&back, &tr);
            prop_assert_eq!(format_trajectory(&back), text);
        }
    }
}
