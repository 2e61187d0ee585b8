//! Text formats read and written by the CLI.
//!
//! Every stage hands its result to the next one as text, so the writers and
//! readers here define what a stage-by-stage run and a pipeline run share.

use std::collections::HashMap;

use trajkit::{
    integrate_heading, normalize_angle, BrokenLine, Clearance, CurvePiece, DiscretizedPath, Point2, Pose, SmoothPath,
    SpeedProfile,
};

/// Formats `v` with 12 significant digits, switching to exponent notation
/// for very small or very large magnitudes.
pub fn sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{v:.*}", (11 - exp) as usize);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x y [clearance]` per line, `inf` or a missing clearance meaning
/// unbounded. `#` starts a comment.
pub fn parse_broken_line(text: &str) -> Result<BrokenLine, String> {
    let mut points = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let at = |msg: String| format!("line {}: {msg}", n + 1);
        let toks: Vec<&str> = content.split_whitespace().collect();
        if !(2..=3).contains(&toks.len()) {
            return Err(at(format!("expected `x y [clearance]`, got `{content}`")));
        }
        let num = |t: &str| t.parse::<f64>().map_err(|_| at(format!("`{t}` is not a number")));
        let p = Point2::new(num(toks[0])?, num(toks[1])?);
        let c = match toks.get(2) {
            None => Clearance::Unbounded,
            Some(t) => match num(t)? {
                v if v == f64::INFINITY => Clearance::Unbounded,
                v => Clearance::Bounded(v),
            },
        };
        points.push((p, c));
    }
    BrokenLine::from_annotated(points).map_err(|e| e.to_string())
}

fn write_csv(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// A CSV file indexed by column name.
struct Table {
    columns: HashMap<String, usize>,
    rows: Vec<csv::StringRecord>,
}

impl Table {
    fn parse(text: &str, required: &[&str]) -> Result<Self, String> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let columns: HashMap<String, usize> = r
            .headers()
            .map_err(|e| e.to_string())?
            .iter()
            .enumerate()
            .map(|(i, h)| (h.to_string(), i))
            .collect();
        if let Some(missing) = required.iter().find(|c| !columns.contains_key(**c)) {
            return Err(format!("missing column `{missing}`"));
        }
        let rows = r.records().collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
        Ok(Self { columns, rows })
    }

    fn text(&self, row: usize, col: &str) -> &str {
        self.rows[row].get(self.columns[col]).unwrap_or("")
    }

    fn num(&self, row: usize, col: &str) -> Result<f64, String> {
        let t = self.text(row, col);
        t.parse()
            .map_err(|_| format!("row {}: column `{col}` holds `{t}`, not a number", row + 1))
    }
}

pub const PIECE_HEADER: [&str; 9] = ["i", "kind", "x", "y", "theta", "length", "kappa_start", "kappa_rate", "heading_sum"];

/// One row per piece; `heading_sum` is the running total of heading change.
pub fn write_pieces(path: &SmoothPath) -> String {
    let mut heading = 0.0;
    write_csv(
        &PIECE_HEADER,
        path.pieces().iter().enumerate().map(|(i, p)| {
            heading += integrate_heading(p);
            vec![
                i.to_string(),
                p.kind.as_str().to_string(),
                sig12(p.start.x()),
                sig12(p.start.y()),
                sig12(p.start.heading),
                sig12(p.length),
                sig12(p.kappa_start),
                sig12(p.kappa_rate),
                sig12(heading),
            ]
        }),
    )
}

pub fn parse_pieces(text: &str) -> Result<SmoothPath, String> {
    let t = Table::parse(text, &PIECE_HEADER[1..8])?;
    let mut pieces = Vec::with_capacity(t.rows.len());
    for row in 0..t.rows.len() {
        let start = Pose::new(t.num(row, "x")?, t.num(row, "y")?, t.num(row, "theta")?);
        let (length, k0, rate) = (t.num(row, "length")?, t.num(row, "kappa_start")?, t.num(row, "kappa_rate")?);
        let piece = match t.text(row, "kind") {
            "line" => CurvePiece::line(start, length),
            "arc" => CurvePiece::arc(start, length, k0),
            "clothoid" => CurvePiece::clothoid(start, length, k0, rate),
            other => return Err(format!("row {}: unknown piece kind `{other}`", row + 1)),
        };
        piece.validate().map_err(|e| format!("row {}: {e}", row + 1))?;
        pieces.push(piece);
    }
    if pieces.is_empty() {
        return Err("the piece table is empty".into());
    }
    Ok(SmoothPath::from_pieces(pieces))
}

pub const CONFIG_HEADER: [&str; 6] = ["i", "x", "y", "theta", "kappa", "s"];

pub fn write_configs(path: &DiscretizedPath) -> String {
    let s = path.arc_lengths();
    write_csv(
        &CONFIG_HEADER,
        path.configs().iter().enumerate().map(|(i, c)| {
            vec![
                i.to_string(),
                sig12(c.x()),
                sig12(c.y()),
                sig12(normalize_angle(c.heading)),
                sig12(path.index_curvature(i)),
                sig12(s[i]),
            ]
        }),
    )
}

/// Reads the poses of a configuration table; derived columns are ignored.
pub fn parse_configs(text: &str) -> Result<Vec<Pose>, String> {
    let t = Table::parse(text, &["x", "y", "theta"])?;
    (0..t.rows.len())
        .map(|row| Ok(Pose::new(t.num(row, "x")?, t.num(row, "y")?, t.num(row, "theta")?)))
        .collect()
}

pub const PROFILE_HEADER: [&str; 10] =
    ["i", "x", "y", "theta", "kappa", "z", "v_left", "v_right", "a_tangential", "t"];

/// `a_tangential` on row `i` is the acceleration over the step leaving `i`;
/// the last row repeats the final step.
pub fn write_profile(path: &DiscretizedPath, profile: &SpeedProfile, track_width: f64) -> String {
    let wheels = profile.wheel_speeds(path, track_width);
    let accel = profile.tangential_accel(path, track_width);
    write_csv(
        &PROFILE_HEADER,
        path.configs().iter().enumerate().map(|(i, c)| {
            let (v_right, v_left) = wheels[i];
            vec![
                i.to_string(),
                sig12(c.x()),
                sig12(c.y()),
                sig12(normalize_angle(c.heading)),
                sig12(path.index_curvature(i)),
                sig12(profile.z[i]),
                sig12(v_left),
                sig12(v_right),
                sig12(accel[i.min(accel.len() - 1)]),
                sig12(profile.t[i]),
            ]
        }),
    )
}
