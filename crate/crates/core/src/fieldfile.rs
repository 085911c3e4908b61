//! Plain-text container for measured or synthesized complex fields.
//!
//! ```text
//! format_version 1
//! kind planar            # or: line
//! frequency <Hz>
//! sound_speed <m/s>
//! z_plane <m>
//! y0 <m>                 # line files only
//! N <count>
//! J <count>              # planar files only
//! <x> <y> <re> <im>      # one record per node, y outer, x inner
//! ```
//!
//! Floats are written with 17 significant digits so a write/read cycle is
//! lossless. Blank lines and `#` comments are ignored on input.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field_model::Medium;
use crate::linear::LineField;
use crate::planar::PlanarField;
use crate::sampling::{LineGrid, PlanarGrid};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Planar(PlanarField),
    Line(LineField),
}

impl Field {
    pub fn kind(&self) -> &'static str {
        match self {
            Field::Planar(_) => "planar",
            Field::Line(_) => "line",
        }
    }

    pub fn z_plane(&self) -> f64 {
        match self {
            Field::Planar(f) => f.grid().z_plane(),
            Field::Line(f) => f.grid().z_plane(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldFile {
    pub frequency: f64,
    pub medium: Medium,
    pub field: Field,
}

impl FieldFile {
    pub fn new(frequency: f64, medium: Medium, field: Field) -> Result<Self> {
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(Error::domain(format!(
                "frequency must be positive, got {frequency}"
            )));
        }
        Ok(Self {
            frequency,
            medium,
            field,
        })
    }

    pub fn wavenumber(&self) -> f64 {
        self.medium.wavenumber(self.frequency)
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serializes `file` into the text format. Output depends only on the values.
pub fn to_text(file: &FieldFile) -> String {
    let mut out = String::new();
    let mut push = |line: String| {
        out.push_str(&line);
        out.push('\n');
    };
    push(format!("format_version {FORMAT_VERSION}"));
    push(format!("kind {}", file.field.kind()));
    push(format!("frequency {}", fmt_f64(file.frequency)));
    push(format!(
        "sound_speed {}",
        fmt_f64(file.medium.sound_speed())
    ));
    push(format!("z_plane {}", fmt_f64(file.field.z_plane())));
    let record = |x: f64, y: f64, p: Complex64| {
        format!(
            "{} {} {} {}",
            fmt_f64(x),
            fmt_f64(y),
            fmt_f64(p.re),
            fmt_f64(p.im)
        )
    };
    match &file.field {
        Field::Planar(f) => {
            let (n, j) = f.grid().shape();
            push(format!("N {n}"));
            push(format!("J {j}"));
            for (jj, &y) in f.grid().y_coords().iter().enumerate() {
                for (nn, &x) in f.grid().x_coords().iter().enumerate() {
                    push(record(x, y, f.values()[[nn, jj]]));
                }
            }
        }
        Field::Line(f) => {
            let y0 = f.grid().y0();
            push(format!("y0 {}", fmt_f64(y0)));
            push(format!("N {}", f.grid().len()));
            for (&x, &p) in f.grid().x_coords().iter().zip(f.values()) {
                push(record(x, y0, p));
            }
        }
    }
    out
}

pub fn write_field(file: &FieldFile, path: impl AsRef<Path>) -> Result<()> {
    let mut handle = fs::File::create(path)?;
    handle.write_all(to_text(file).as_bytes())?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<FieldFile> {
    from_text(&fs::read_to_string(path)?)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank, comment-stripped line with its 1-based number.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                return Some((i + 1, line));
            }
        }
        None
    }

    fn header(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let (no, line) = self
            .next_content()
            .ok_or_else(|| Error::parse(self.last + 1, format!("missing header field '{key}'")))?;
        let mut parts = line.split_whitespace();
        let found = parts.next().unwrap_or("");
        if found != key {
            return Err(Error::parse(
                no,
                format!("expected header field '{key}', found '{found}'"),
            ));
        }
        let value = parts
            .next()
            .ok_or_else(|| Error::parse(no, format!("header field '{key}' has no value")))?;
        if parts.next().is_some() {
            return Err(Error::parse(no, format!("trailing tokens after '{key}'")));
        }
        Ok((no, value))
    }

    fn header_f64(&mut self, key: &str) -> Result<f64> {
        let (no, value) = self.header(key)?;
        let v: f64 = value
            .parse()
            .map_err(|_| Error::parse(no, format!("'{value}' is not a number")))?;
        if !v.is_finite() {
            return Err(Error::parse(no, format!("'{key}' must be finite")));
        }
        Ok(v)
    }

    fn header_count(&mut self, key: &str) -> Result<usize> {
        let (no, value) = self.header(key)?;
        let n: usize = value
            .parse()
            .map_err(|_| Error::parse(no, format!("'{value}' is not a count")))?;
        if n == 0 {
            return Err(Error::parse(no, format!("'{key}' must be at least 1")));
        }
        Ok(n)
    }
}

struct Record {
    line: usize,
    x: f64,
    y: f64,
    value: Complex64,
}

fn read_records(lines: &mut Lines<'_>, count: usize) -> Result<Vec<Record>> {
    let mut records = Vec::with_capacity(count);
    for index in 0..count {
        let (no, line) = lines.next_content().ok_or_else(|| {
            Error::parse(lines.last + 1, format!("missing record {index} of {count}"))
        })?;
        let fields = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::parse(no, format!("record {index} has a non-numeric field")))?;
        if fields.len() != 4 {
            return Err(Error::parse(
                no,
                format!("record {index} has {} fields, expected 4", fields.len()),
            ));
        }
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::parse(no, format!("record {index} is not finite")));
        }
        records.push(Record {
            line: no,
            x: fields[0],
            y: fields[1],
            value: Complex64::new(fields[2], fields[3]),
        });
    }
    if let Some((no, _)) = lines.next_content() {
        return Err(Error::parse(no, format!("more than {count} records")));
    }
    Ok(records)
}

fn check_ascending(records: &[&Record], coord: impl Fn(&Record) -> f64, axis: &str) -> Result<()> {
    for pair in records.windows(2) {
        if coord(pair[1]) <= coord(pair[0]) {
            return Err(Error::parse(
                pair[1].line,
                format!("{axis} coordinates not strictly ascending"),
            ));
        }
    }
    Ok(())
}

pub fn from_text(text: &str) -> Result<FieldFile> {
    let mut lines = Lines::new(text);
    let (no, version) = lines.header("format_version")?;
    if version != FORMAT_VERSION.to_string() {
        return Err(Error::parse(
            no,
            format!("unsupported format_version {version}"),
        ));
    }
    let (kind_line, kind) = lines.header("kind")?;
    if kind != "planar" && kind != "line" {
        return Err(Error::parse(kind_line, format!("unknown kind '{kind}'")));
    }
    let frequency = lines.header_f64("frequency")?;
    let sound_speed = lines.header_f64("sound_speed")?;
    let z_plane = lines.header_f64("z_plane")?;
    let medium = Medium::new(sound_speed).map_err(|e| Error::parse(kind_line, e.to_string()))?;
    let header_err = |e: Error| Error::parse(kind_line, e.to_string());

    let field = match kind {
        "planar" => {
            let n = lines.header_count("N")?;
            let j = lines.header_count("J")?;
            let records = read_records(&mut lines, n * j)?;
            let row = |jj: usize| records[jj * n..(jj + 1) * n].iter().collect::<Vec<_>>();
            let first: Vec<&Record> = row(0);
            check_ascending(&first, |r| r.x, "x")?;
            let firsts: Vec<&Record> = (0..j).map(|jj| &records[jj * n]).collect();
            check_ascending(&firsts, |r| r.y, "y")?;
            let mut values = Array2::zeros((n, j));
            for jj in 0..j {
                let y = records[jj * n].y;
                for (nn, r) in row(jj).into_iter().enumerate() {
                    if r.x != first[nn].x || r.y != y {
                        return Err(Error::parse(
                            r.line,
                            "records do not form a rectangular grid",
                        ));
                    }
                    values[[nn, jj]] = r.value;
                }
            }
            let grid = PlanarGrid::new(
                first.iter().map(|r| r.x).collect(),
                firsts.iter().map(|r| r.y).collect(),
                z_plane,
            )
            .map_err(header_err)?;
            Field::Planar(PlanarField::new(grid, values)?)
        }
        "line" => {
            let y0 = lines.header_f64("y0")?;
            let n = lines.header_count("N")?;
            // a J field here means planar data labelled as a line
            let mut probe = Lines {
                inner: lines.inner.clone(),
                last: lines.last,
            };
            if let Some((no, l)) = probe.next_content() {
                if l.split_whitespace().next() == Some("J") {
                    return Err(Error::parse(no, "kind mismatch: 'J' given for a line file"));
                }
            }
            let records = read_records(&mut lines, n)?;
            let refs: Vec<&Record> = records.iter().collect();
            check_ascending(&refs, |r| r.x, "x")?;
            if let Some(r) = records.iter().find(|r| r.y != y0) {
                return Err(Error::parse(r.line, "record y differs from header y0"));
            }
            let grid = LineGrid::new(records.iter().map(|r| r.x).collect(), y0, z_plane)
                .map_err(header_err)?;
            Field::Line(LineField::new(
                grid,
                records.iter().map(|r| r.value).collect(),
            )?)
        }
        other => return Err(Error::parse(kind_line, format!("unknown kind '{other}'"))),
    };
    FieldFile::new(frequency, medium, field).map_err(header_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{chamber_scenario, SourceLayout};
    use proptest::prelude::*;

    fn planar_file(values: Array2<Complex64>, xs: Vec<f64>, ys: Vec<f64>) -> FieldFile {
        let grid = PlanarGrid::new(xs, ys, 0.28).unwrap();
        FieldFile::new(
            1500.0,
            Medium::default(),
            Field::Planar(PlanarField::new(grid, values).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn single_node_of_zeros() {
        let file = planar_file(Array2::zeros((1, 1)), vec![0.0], vec![0.0]);
        let text = to_text(&file);
        assert_eq!(text.lines().count(), 8);
        assert!(text.ends_with(&format!("{0} {0} {0} {0}\n", fmt_f64(0.0))));
        assert_eq!(from_text(&text).unwrap(), file);
    }

    #[test]
    fn scenario_file_round_trip() {
        let s = chamber_scenario(1500.0, SourceLayout::MonopolePair).unwrap();
        let file = FieldFile::new(
            1500.0,
            s.model.medium(),
            Field::Planar(s.near_field().unwrap()),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("near.field");
        write_field(&file, &path).unwrap();
        let first = fs::read(&path).unwrap();
        let text = String::from_utf8(first.clone()).unwrap();
        assert_eq!(text.lines().count(), 7 + 21 * 11);
        assert!(text.contains("frequency 1.5000000000000000e3"));
        let back = read_field(&path).unwrap();
        assert_eq!(back, file);
        write_field(&back, &path).unwrap();
        assert_eq!(fs::read(&path).unwrap(), first);
    }

    #[test]
    fn truncated_file_names_missing_record() {
        let s = chamber_scenario(500.0, SourceLayout::MonopolePair).unwrap();
        let file = FieldFile::new(
            500.0,
            Medium::default(),
            Field::Line(s.near_line_field().unwrap()),
        )
        .unwrap();
        let text = to_text(&file);
        let cut: String = text
            .lines()
            .take(7 + 15)
            .map(|l| format!("{l}\n"))
            .collect();
        match from_text(&cut) {
            Err(Error::Parse { message, .. }) => {
                assert!(message.contains("record 15"), "{message}")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn line_file_with_j_is_rejected() {
        let text = "format_version 1\nkind line\nfrequency 500\nsound_speed 300\nz_plane 0.28\n\
                    y0 0\nN 2\nJ 1\n0 0 1 0\n0.1 0 1 0\n";
        match from_text(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 8);
                assert!(message.contains("kind mismatch"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_inputs() {
        let base = "format_version 1\nkind line\nfrequency 500\nsound_speed 300\nz_plane 0.28\ny0 0\nN 2\n";
        let descending = format!("{base}0.1 0 1 0\n0 0 1 0\n");
        assert!(matches!(
            from_text(&descending),
            Err(Error::Parse { line: 9, .. })
        ));
        let extra = format!("{base}0 0 1 0\n0.1 0 1 0\n0.2 0 1 0\n");
        assert!(matches!(
            from_text(&extra),
            Err(Error::Parse { line: 10, .. })
        ));
        let bad_number = format!("{base}0 0 x 0\n0.1 0 1 0\n");
        assert!(matches!(
            from_text(&bad_number),
            Err(Error::Parse { line: 8, .. })
        ));
        assert!(matches!(
            from_text("format_version 2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            from_text("format_version 1\nkind sphere\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        let commented = format!("# generated\n{base}\n0 0 1 0 # first\n0.1 0 1 0\n");
        assert!(from_text(&commented).is_ok());
    }

    proptest! {
        #[test]
        fn text_round_trip_is_bit_exact(
            n in 1usize..5,
            j in 1usize..5,
            seed in prop::collection::vec(-1e6f64..1e6, 40),
            step in 1e-3f64..2.0,
        ) {
            let xs: Vec<f64> = (0..n).map(|i| -0.37 + i as f64 * step).collect();
            let ys: Vec<f64> = (0..j).map(|i| 0.11 + i as f64 * step * 1.3).collect();
            let values = Array2::from_shape_fn((n, j), |(a, b)| {
                let i = 2 * (a * j + b);
                Complex64::new(seed[i] / 7.0, seed[i + 1] * 1e-9)
            });
            let file = planar_file(values, xs, ys);
            let text = to_text(&file);
            let back = from_text(&text).unwrap();
            prop_assert_eq!(&back, &file);
            prop_assert_eq!(to_text(&back), text);
        }
    }
}
