//! Line-oriented text format for point configurations.
//!
//! ```text
//! chaoslab-points v1
//! dim 2
//! intensity 50
//! half_width 0.5 0.5
//! seed 42 0
//! marked 1
//! points 3
//! 0.125 -0.25 1.5
//! ...
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading a
//! written file reproduces every coordinate bit for bit.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::point_process::{MarkedPoint, PointConfiguration, Window};
use crate::rng::StreamKey;

const MAGIC: &str = "chaoslab-points v1";

pub fn write_configuration<W: Write>(config: &PointConfiguration, mut out: W) -> Result<()> {
    let d = config.dim();
    let marked = config.has_marks() && !config.is_empty();
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC}");
    let _ = writeln!(s, "dim {d}");
    let _ = writeln!(s, "intensity {:?}", config.intensity);
    let _ = write!(s, "half_width");
    for w in config.window.half_width() {
        let _ = write!(s, " {w:?}");
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "seed {} {}", config.seed.seed, config.seed.stream);
    let _ = writeln!(s, "marked {}", u8::from(marked));
    let _ = writeln!(s, "points {}", config.len());
    for p in &config.points {
        for (a, c) in p.location(d).iter().enumerate() {
            if a > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{c:?}");
        }
        if marked {
            let _ = write!(s, " {:?}", p.m());
        }
        s.push('\n');
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse { line, reason: reason.into() }
}

fn field<'a>(line_no: usize, line: &'a str, key: &str) -> Result<Vec<&'a str>> {
    let mut it = line.split_whitespace();
    match it.next() {
        Some(k) if k == key => Ok(it.collect()),
        _ => Err(parse_err(line_no, format!("expected `{key}`"))),
    }
}

fn num<T: std::str::FromStr>(line_no: usize, tok: &str) -> Result<T> {
    tok.parse().map_err(|_| parse_err(line_no, format!("bad number `{tok}`")))
}

fn one<T: std::str::FromStr>(line_no: usize, toks: &[&str]) -> Result<T> {
    match toks {
        [t] => num(line_no, t),
        _ => Err(parse_err(line_no, "expected exactly one value")),
    }
}

pub fn read_configuration<R: BufRead>(input: R) -> Result<PointConfiguration> {
    let lines: Vec<String> = input.lines().collect::<std::io::Result<_>>()?;
    let get = |i: usize| -> Result<&str> { lines.get(i).map(|s| s.trim()).ok_or_else(|| parse_err(i + 1, "unexpected end of input")) };
    if get(0)? != MAGIC {
        return Err(parse_err(1, format!("missing header `{MAGIC}`")));
    }
    let dim: usize = one(2, &field(2, get(1)?, "dim")?)?;
    let intensity: f64 = one(3, &field(3, get(2)?, "intensity")?)?;
    let hw = field(4, get(3)?, "half_width")?.iter().map(|t| num(4, t)).collect::<Result<Vec<f64>>>()?;
    if hw.len() != dim {
        return Err(parse_err(4, format!("expected {dim} half widths, got {}", hw.len())));
    }
    let window = Window::new(hw).map_err(|e| parse_err(4, e.to_string()))?;
    let seed = field(5, get(4)?, "seed")?;
    if seed.len() != 2 {
        return Err(parse_err(5, "expected `seed <seed> <stream>`"));
    }
    let key = StreamKey::new(num(5, seed[0])?, num(5, seed[1])?);
    let marked: u8 = one(6, &field(6, get(5)?, "marked")?)?;
    let n: usize = one(7, &field(7, get(6)?, "points")?)?;
    let width = dim + usize::from(marked == 1);
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let line_no = 8 + i;
        let toks: Vec<&str> = get(7 + i)?.split_whitespace().collect();
        if toks.len() != width {
            return Err(parse_err(line_no, format!("expected {width} values, got {}", toks.len())));
        }
        let loc = toks[..dim].iter().map(|t| num(line_no, t)).collect::<Result<Vec<f64>>>()?;
        let mark = if marked == 1 { Some(num(line_no, toks[dim])?) } else { None };
        points.push(MarkedPoint::new(&loc, mark));
    }
    if lines.len() > 7 + n && lines[7 + n..].iter().any(|l| !l.trim().is_empty()) {
        return Err(parse_err(8 + n, "trailing content after the declared points"));
    }
    Ok(PointConfiguration::new(window, intensity, points, key))
}
