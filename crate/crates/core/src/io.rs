//! Text formats: net files, trace files, key-value reports and an SVG plot.
//!
//! Net file:
//!
//! ```text
//! m n eps mu0 [periodic]
//! x_1 ... x_m
//! ...
//! ```
//!
//! Floats are written with 17 significant digits so a read followed by a
//! write reproduces the file byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::geom::{Point, Simplex};
use crate::net::{Net, NetError};
use crate::perturb::RunTrace;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Net(#[from] NetError),
}

impl IoError {
    pub fn code(&self) -> &'static str {
        match self {
            IoError::Io { .. } => "INPUT_IO",
            IoError::Parse { .. } => "INPUT_PARSE",
            IoError::Net(_) => "INPUT_NET",
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        message: message.into(),
    }
}

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn parse_f64(tok: &str, line: usize, what: &str) -> Result<f64, IoError> {
    let x: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("bad {what} {tok:?}")))?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("non-finite {what} {tok:?}")));
    }
    Ok(x)
}

pub fn parse_net(text: &str) -> Result<Net, IoError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let hl = hl + 1;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if !(4..=5).contains(&toks.len()) {
        return Err(parse_err(hl, "header must be `m n eps mu0 [periodic]`"));
    }
    let m: usize = toks[0]
        .parse()
        .map_err(|_| parse_err(hl, format!("bad dimension {:?}", toks[0])))?;
    let n: usize = toks[1]
        .parse()
        .map_err(|_| parse_err(hl, format!("bad point count {:?}", toks[1])))?;
    let eps = parse_f64(toks[2], hl, "eps")?;
    let mu0 = parse_f64(toks[3], hl, "mu0")?;
    let periodic = match toks.get(4) {
        None => false,
        Some(&"periodic") => true,
        Some(t) => return Err(parse_err(hl, format!("unknown header flag {t:?}"))),
    };
    if m == 0 {
        return Err(parse_err(hl, "dimension must be positive"));
    }
    if n > text.len() {
        return Err(parse_err(hl, format!("point count {n} exceeds file size")));
    }
    let mut points = Vec::with_capacity(n);
    for (i, line) in lines {
        let coords = line
            .split_whitespace()
            .map(|t| parse_f64(t, i + 1, "coordinate"))
            .collect::<Result<Vec<f64>, _>>()?;
        if coords.len() != m {
            return Err(parse_err(
                i + 1,
                format!("expected {m} coordinates, found {}", coords.len()),
            ));
        }
        if points.len() == n {
            return Err(parse_err(i + 1, format!("more than {n} points")));
        }
        points.push(Point::new(coords));
    }
    if points.len() != n {
        return Err(parse_err(
            hl,
            format!("header promises {n} points, found {}", points.len()),
        ));
    }
    Ok(Net::new(points, eps, mu0, periodic)?)
}

pub fn format_net(net: &Net) -> String {
    let mut out = format!(
        "{} {} {} {}",
        net.dim(),
        net.len(),
        fmt_f64(net.eps()),
        fmt_f64(net.mu0())
    );
    if net.is_periodic() {
        out.push_str(" periodic");
    }
    out.push('\n');
    for p in net.points() {
        let line: Vec<String> = p.coords().iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_net(path: &Path) -> Result<Net, IoError> {
    parse_net(&read_text(path)?)
}

/// Writes through a temporary file in the same directory, then renames.
pub fn atomic_write(path: &Path, contents: &[u8]) -> Result<(), IoError> {
    let wrap = |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    };
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(wrap)
}

pub fn write_net(path: &Path, net: &Net) -> Result<(), IoError> {
    atomic_write(path, format_net(net).as_bytes())
}

/// One line per point: `index retries displacement`.
pub fn format_trace(trace: &RunTrace) -> String {
    trace
        .retries
        .iter()
        .zip(&trace.displacements)
        .enumerate()
        .map(|(i, (r, d))| format!("{i} {r} {}\n", fmt_f64(*d)))
        .collect()
}

/// Parses a trace file into `(retries, displacements)`.
pub fn parse_trace(text: &str) -> Result<(Vec<u64>, Vec<f64>), IoError> {
    let mut retries = Vec::new();
    let mut disp = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 3 || toks[0].parse::<usize>().ok() != Some(retries.len()) {
            return Err(parse_err(i + 1, "expected `index retries displacement`"));
        }
        retries.push(toks[1].parse().map_err(|_| parse_err(i + 1, "bad retry count"))?);
        disp.push(parse_f64(toks[2], i + 1, "displacement")?);
    }
    Ok((retries, disp))
}

/// Sectioned key-value document with sorted keys.
///
/// ```text
/// [params]
/// gamma0 = 1.0000000000000000e-2
/// ```
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

/// Sections that always come first, in this order.
pub const REPORT_SECTIONS: [&str; 4] = ["params", "delaunay", "protection", "forbidden"];

impl Report {
    pub fn new() -> Self {
        let mut r = Report::default();
        for s in REPORT_SECTIONS {
            r.sections.insert(s.into(), BTreeMap::new());
        }
        r
    }

    pub fn set(&mut self, section: &str, key: impl Into<String>, value: impl Into<String>) {
        self.sections
            .entry(section.into())
            .or_default()
            .insert(key.into(), value.into());
    }

    pub fn set_f64(&mut self, section: &str, key: impl Into<String>, value: f64) {
        self.set(section, key, fmt_f64(value));
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(String::as_str)
    }

    pub fn get_f64(&self, section: &str, key: &str) -> Option<f64> {
        self.get(section, key)?.parse().ok()
    }

    fn ordered(&self) -> Vec<(&String, &BTreeMap<String, String>)> {
        let rank = |name: &str| {
            REPORT_SECTIONS
                .iter()
                .position(|s| *s == name)
                .unwrap_or(REPORT_SECTIONS.len())
        };
        let mut v: Vec<_> = self.sections.iter().collect();
        v.sort_by(|a, b| (rank(a.0), a.0).cmp(&(rank(b.0), b.0)));
        v
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, (name, keys)) in self.ordered().into_iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("[{name}]\n"));
            for (k, v) in keys {
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Report, IoError> {
        let mut r = Report::default();
        let mut current: Option<String> = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                r.sections.entry(name.to_string()).or_default();
                current = Some(name.to_string());
                continue;
            }
            let section = current
                .as_ref()
                .ok_or_else(|| parse_err(i + 1, "key outside a section"))?;
            let (k, v) = line
                .split_once(" = ")
                .ok_or_else(|| parse_err(i + 1, "expected `key = value`"))?;
            r.set(section, k, v);
        }
        Ok(r)
    }
}

/// Zero-padded key for the i-th of `n` items, so lexicographic order is
/// numeric order.
pub fn indexed_key(prefix: &str, i: usize, n: usize) -> String {
    let width = n.max(1).to_string().len();
    format!("{prefix}{i:0width$}")
}

/// Scatter plot of a planar net with the given simplices drawn as
/// outlines.
pub fn svg_plot(net: &Net, simplices: &[Simplex]) -> Option<String> {
    if net.dim() != 2 {
        return None;
    }
    let xs = net.points().iter().map(|p| p[0]);
    let ys = net.points().iter().map(|p| p[1]);
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let (y0, y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    let span = (x1 - x0).max(y1 - y0).max(1e-12);
    let size = 800.0;
    let pad = 20.0;
    let sx = |x: f64| pad + (x - x0) / span * (size - 2.0 * pad);
    let sy = |y: f64| size - pad - (y - y0) / span * (size - 2.0 * pad);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for s in simplices {
        let anchor = net.point(s.vertices()[0]).coords().to_vec();
        let pts: Vec<String> = s
            .vertices()
            .iter()
            .map(|&v| {
                let p = net.unwrap_near(&anchor, net.point(v).coords());
                format!("{:.3},{:.3}", sx(p[0]), sy(p[1]))
            })
            .collect();
        out.push_str(&format!(
            "<polygon points=\"{}\" fill=\"none\" stroke=\"#4477aa\" stroke-width=\"1\"/>\n",
            pts.join(" ")
        ));
    }
    for p in net.points() {
        out.push_str(&format!(
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" fill=\"#cc3311\"/>\n",
            sx(p[0]),
            sy(p[1])
        ));
    }
    out.push_str("</svg>\n");
    Some(out)
}
