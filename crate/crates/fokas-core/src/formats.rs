//! Text formats for profiles, spectral tables, fields and key=value reports,
//! plus atomic file writes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{Axis, FieldGrid, Profile};
use crate::linalg::C64;
use crate::spectral::{SampleLabel, SpectralMeta, SpectralRecord, SpectralTable};

fn parse_err(path: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        msg: msg.into(),
    }
}

/// Writes `contents` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Validation(format!("not a file path: {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// `key=value` pairs of a header line after its leading words.
fn header_pairs<'a>(path: &str, line: &'a str, words: &[&str]) -> Result<Vec<(&'a str, &'a str)>> {
    let mut it = line.split_whitespace();
    for w in words {
        if it.next() != Some(*w) {
            return Err(parse_err(path, 1, format!("expected header starting with `{}`", words.join(" "))));
        }
    }
    it.map(|kv| kv.split_once('=').ok_or_else(|| parse_err(path, 1, format!("bad header field `{kv}`"))))
        .collect()
}

fn header_value<T: std::str::FromStr>(path: &str, pairs: &[(&str, &str)], key: &str) -> Result<T> {
    let v = pairs
        .iter()
        .find(|(k, _)| *k == key)
        .ok_or_else(|| parse_err(path, 1, format!("header lacks `{key}=`")))?
        .1;
    v.parse().map_err(|_| parse_err(path, 1, format!("bad value `{v}` for `{key}`")))
}

fn parse_f64(path: &str, line: usize, s: &str) -> Result<f64> {
    s.parse().map_err(|_| parse_err(path, line, format!("not a number: `{s}`")))
}

/// Data lines (1-based numbers) after the header, skipping blanks and `#` comments.
fn body(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn pairs_of(path: &str, text: &str, expect: usize) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(expect);
    for (n, l) in body(text) {
        let mut f = l.split_whitespace();
        let (Some(re), Some(im), None) = (f.next(), f.next(), f.next()) else {
            return Err(parse_err(path, n, "expected `re im`"));
        };
        out.push(C64::new(parse_f64(path, n, re)?, parse_f64(path, n, im)?));
    }
    if out.len() != expect {
        return Err(parse_err(path, 1, format!("header announces {expect} samples, found {}", out.len())));
    }
    Ok(out)
}

pub fn profile_to_string(p: &Profile) -> String {
    let mut s = format!("# profile {} h={:.17e} n={}\n", p.axis.tag(), p.step, p.len());
    for z in &p.samples {
        let _ = writeln!(s, "{:.17e} {:.17e}", z.re, z.im);
    }
    s
}

/// `path` is used in error messages only.
pub fn parse_profile(path: &str, text: &str) -> Result<Profile> {
    let head = text.lines().next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let mut words = head.split_whitespace();
    let axis = match (words.next(), words.next(), words.next()) {
        (Some("#"), Some("profile"), Some("x")) => Axis::X,
        (Some("#"), Some("profile"), Some("y")) => Axis::Y,
        _ => return Err(parse_err(path, 1, "expected `# profile <x|y> h=<step> n=<count>`")),
    };
    let pairs = header_pairs(path, head, &["#", "profile", axis.tag()])?;
    let h: f64 = header_value(path, &pairs, "h")?;
    let n: usize = header_value(path, &pairs, "n")?;
    Profile::new(axis, h, pairs_of(path, text, n)?)
}

pub fn read_profile(path: &Path) -> Result<Profile> {
    parse_profile(&path.display().to_string(), &read_file(path)?)
}

pub fn field_to_string(f: &FieldGrid) -> String {
    let mut s = format!("# field hx={:.17e} hy={:.17e} nx={} ny={}\n", f.hx, f.hy, f.nx, f.ny);
    for z in &f.data {
        let _ = writeln!(s, "{:.17e} {:.17e}", z.re, z.im);
    }
    s
}

pub fn parse_field(path: &str, text: &str) -> Result<FieldGrid> {
    let head = text.lines().next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let pairs = header_pairs(path, head, &["#", "field"])?;
    let hx: f64 = header_value(path, &pairs, "hx")?;
    let hy: f64 = header_value(path, &pairs, "hy")?;
    let nx: usize = header_value(path, &pairs, "nx")?;
    let ny: usize = header_value(path, &pairs, "ny")?;
    FieldGrid::new(hx, hy, nx, ny, pairs_of(path, text, nx * ny)?)
}

pub fn read_field(path: &Path) -> Result<FieldGrid> {
    parse_field(&path.display().to_string(), &read_file(path)?)
}

fn opt_pair(s: &mut String, v: Option<C64>) {
    match v {
        Some(z) => {
            let _ = write!(s, " {:.17e} {:.17e}", z.re, z.im);
        }
        None => s.push_str(" nan nan"),
    }
}

fn opt_num(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| format!("{x:.17e}"))
}

/// Header `# spectral ...` then `ray|sector index re_l im_l a b A B c+` with
/// each value as `re im`; absent values are written `nan nan`.
pub fn table_to_string(t: &SpectralTable) -> String {
    let m = &t.meta;
    let mut s = format!(
        "# spectral radius={:.17e} nodes_per_ray={} rtol={:.17e} x_max={} length={} records={}\n",
        m.radius,
        m.nodes_per_ray,
        m.rtol,
        opt_num(m.x_max),
        opt_num(m.length),
        t.records.len()
    );
    for r in &t.records {
        match r.label {
            SampleLabel::Ray(k) => {
                let _ = write!(s, "ray {k}");
            }
            SampleLabel::Sector(k) => {
                let _ = write!(s, "sector {k}");
            }
        }
        let _ = write!(s, " {:.17e} {:.17e}", r.lambda.re, r.lambda.im);
        for v in [r.a, r.b, r.big_a, r.big_b, r.c_plus] {
            opt_pair(&mut s, v);
        }
        s.push('\n');
    }
    s
}

fn header_opt(path: &str, pairs: &[(&str, &str)], key: &str) -> Result<Option<f64>> {
    let raw: String = header_value(path, pairs, key)?;
    if raw == "none" {
        Ok(None)
    } else {
        parse_f64(path, 1, &raw).map(Some)
    }
}

pub fn parse_table(path: &str, text: &str) -> Result<SpectralTable> {
    let head = text.lines().next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let pairs = header_pairs(path, head, &["#", "spectral"])?;
    let meta = SpectralMeta {
        radius: header_value(path, &pairs, "radius")?,
        nodes_per_ray: header_value(path, &pairs, "nodes_per_ray")?,
        rtol: header_value(path, &pairs, "rtol")?,
        x_max: header_opt(path, &pairs, "x_max")?,
        length: header_opt(path, &pairs, "length")?,
    };
    let count: usize = header_value(path, &pairs, "records")?;
    let mut records = Vec::with_capacity(count);
    for (n, l) in body(text) {
        let f: Vec<&str> = l.split_whitespace().collect();
        // c+ columns are optional
        if f.len() != 12 && f.len() != 14 {
            return Err(parse_err(path, n, format!("expected 12 or 14 columns, found {}", f.len())));
        }
        let index: u8 = f[1].parse().map_err(|_| parse_err(path, n, format!("bad index `{}`", f[1])))?;
        let label = match f[0] {
            "ray" if index < 12 => SampleLabel::Ray(index),
            "sector" if (1..=6).contains(&index) => SampleLabel::Sector(index),
            other => return Err(parse_err(path, n, format!("bad label `{other} {index}`"))),
        };
        let mut vals = Vec::with_capacity(6);
        for c in f[2..].chunks(2) {
            let re = parse_f64(path, n, c[0])?;
            let im = parse_f64(path, n, c[1])?;
            vals.push(if re.is_nan() || im.is_nan() { None } else { Some(C64::new(re, im)) });
        }
        let lambda = vals[0].ok_or_else(|| parse_err(path, n, "lambda is missing"))?;
        records.push(SpectralRecord {
            label,
            lambda,
            a: vals[1],
            b: vals[2],
            big_a: vals[3],
            big_b: vals[4],
            c_plus: vals.get(5).copied().flatten(),
        });
    }
    if records.len() != count {
        return Err(parse_err(path, 1, format!("header announces {count} records, found {}", records.len())));
    }
    Ok(SpectralTable::new(meta, records))
}

pub fn read_table(path: &Path) -> Result<SpectralTable> {
    parse_table(&path.display().to_string(), &read_file(path)?)
}

/// Ordered `key=value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn num(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.push(key, format!("{value:.6e}"))
    }

    pub fn complex(&mut self, key: impl Into<String>, value: C64) -> &mut Self {
        self.push(key, format!("{:.17e},{:.17e}", value.re, value.im))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn extend(&mut self, other: &Report) {
        self.entries.extend(other.entries.iter().cloned());
    }

    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect();
        Self { entries }
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_round_trip() {
        let p = Profile::from_fn(Axis::Y, 0.1, 7, |s| C64::new(s.sin(), 1.0 / 3.0 - s)).unwrap();
        let q = parse_profile("mem", &profile_to_string(&p)).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn field_round_trip() {
        let f = FieldGrid::from_fn(0.1, 0.2, 5, 4, |x, y| C64::new(x.exp(), y * std::f64::consts::PI)).unwrap();
        let g = parse_field("mem", &field_to_string(&f)).unwrap();
        assert_eq!(field_to_string(&f), field_to_string(&g));
        assert_eq!(f.data, g.data);
    }

    #[test]
    fn table_round_trip_keeps_missing_values() {
        let rec = |label, lambda: C64, a: Option<C64>| SpectralRecord {
            label,
            lambda,
            a,
            b: a.map(|v| v * 0.5),
            big_a: None,
            big_b: None,
            c_plus: None,
        };
        let t = SpectralTable::new(
            SpectralMeta { x_max: Some(10.0), length: None, radius: 4.0, nodes_per_ray: 8, rtol: 1e-10 },
            vec![
                rec(SampleLabel::Ray(0), C64::new(1.0, 0.0), Some(C64::new(1.0, 0.1))),
                rec(SampleLabel::Sector(2), C64::from_polar(1.0, 1.2), None),
            ],
        );
        let text = table_to_string(&t);
        let u = parse_table("mem", &text).unwrap();
        assert_eq!(u.records, t.records);
        assert_eq!(u.meta, t.meta);
        assert_eq!(table_to_string(&u), text);
    }

    #[test]
    fn bad_line_reports_its_number() {
        let text = "# profile x h=0.1 n=4\n0 0\n1 1\n2 oops\n3 3\n";
        match parse_profile("f", text).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn report_parses_back() {
        let mut r = Report::new();
        r.push("status", "pass").num("residual", 1.5e-9);
        assert_eq!(Report::parse(&r.to_string()), r);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(read_file(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
