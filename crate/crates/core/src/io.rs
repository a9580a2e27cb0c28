//! Text formats: exact number parsing, set definition files, CSV output.

use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::{Point, TorusSet};

/// Parse `"p/q"`, an integer, or a decimal literal (optionally with an
/// exponent) into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::invalid(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::invalid(format!("zero denominator in {text:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut v = if scale >= 0 {
        BigRational::from_integer(n * ten.pow(scale as u32))
    } else {
        BigRational::new(n, ten.pow((-scale) as u32))
    };
    if neg {
        v = -v;
    }
    Ok(v)
}

fn number(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(Error::invalid(format!(
            "expected a number or \"p/q\" string, got {other}"
        ))),
    }
}

fn point(v: &Value) -> Result<Point<BigRational>> {
    match v.as_array().map(Vec::as_slice) {
        Some([x, y]) => Ok(Point::new(number(x)?, number(y)?)),
        _ => Err(Error::invalid(format!("expected a point [x, y], got {v}"))),
    }
}

/// Parse a set definition:
/// `{"polygon": [[x, y], ...]}` or `{"disc": {"center": [x, y], "radius": r}}`.
/// Coordinates may be JSON numbers (read as exact decimals) or `"p/q"` strings.
pub fn parse_set(text: &str) -> Result<TorusSet<BigRational>> {
    let v: Value = serde_json::from_str(text)?;
    if let Some(poly) = v.get("polygon") {
        let pts = poly
            .as_array()
            .ok_or_else(|| Error::invalid("\"polygon\" must be a list of points"))?
            .iter()
            .map(point)
            .collect::<Result<Vec<_>>>()?;
        return TorusSet::polygon(pts);
    }
    if let Some(disc) = v.get("disc") {
        let center = point(
            disc.get("center")
                .ok_or_else(|| Error::invalid("disc needs \"center\""))?,
        )?;
        let radius = number(
            disc.get("radius")
                .ok_or_else(|| Error::invalid("disc needs \"radius\""))?,
        )?;
        return TorusSet::disc(center, radius);
    }
    Err(Error::invalid(
        "set file needs a \"polygon\" or \"disc\" key",
    ))
}

pub fn read_set(path: &Path) -> Result<TorusSet<BigRational>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_set(&text)
}

/// Inverse of [`parse_set`]; coordinates are written as `"p/q"` strings.
pub fn set_to_json(set: &TorusSet<BigRational>) -> Value {
    let pt = |p: &Point<BigRational>| Value::from(vec![p.x.to_string(), p.y.to_string()]);
    match set {
        TorusSet::Polygon(poly) => {
            serde_json::json!({ "polygon": poly.vertices().iter().map(pt).collect::<Vec<_>>() })
        }
        TorusSet::Disc(d) => {
            serde_json::json!({ "disc": { "center": pt(&d.center), "radius": d.radius.to_string() } })
        }
    }
}

/// Digits used for every floating-point CSV field; enough to round-trip an
/// `f64` exactly.
pub const CSV_DIGITS: usize = 17;

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// A CSV table with a fixed header.
#[derive(Debug, Clone, Default)]
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let row: Vec<String> = fields.into_iter().map(|f| f.as_ref().to_string()).collect();
        debug_assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)
            .and_then(|_| self.rows.iter().try_for_each(|r| w.write_record(r)))
            .map_err(|e| Error::Io(e.to_string()))?;
        w.into_inner().map_err(|e| Error::Io(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_bytes()?)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

/// `p/q` or an integer, matching the input syntax of [`parse_rational`].
pub fn fmt_ratio(v: &BigRational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        v.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_exact_numbers() {
        assert_eq!(parse_rational("3/4").unwrap(), r(3, 4));
        assert_eq!(parse_rational("-0.125").unwrap(), r(-1, 8));
        assert_eq!(parse_rational(".5").unwrap(), r(1, 2));
        assert_eq!(parse_rational("2.5e-1").unwrap(), r(1, 4));
        assert_eq!(parse_rational("7").unwrap(), r(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn set_files_round_trip() {
        let text = r#"{"polygon": [[0, 0], ["1/2", 0], [0.5, "1/2"]]}"#;
        let set = parse_set(text).unwrap();
        assert_eq!(parse_set(&set_to_json(&set).to_string()).unwrap(), set);
        let text = r#"{"disc": {"center": [0.5, 0.5], "radius": "1/4"}}"#;
        let set = parse_set(text).unwrap();
        assert_eq!(parse_set(&set_to_json(&set).to_string()).unwrap(), set);
        assert!(parse_set(r#"{"circle": 1}"#).is_err());
    }

    #[test]
    fn csv_fields_are_quoted_when_needed() {
        let mut csv = Csv::new(&["set", "sup"]);
        csv.row(["a,b", "0.5"]);
        assert_eq!(
            String::from_utf8(csv.to_bytes().unwrap()).unwrap(),
            "set,sup\n\"a,b\",0.5\n"
        );
    }

    #[test]
    fn floats_round_trip_through_csv_text() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 12345.678] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
