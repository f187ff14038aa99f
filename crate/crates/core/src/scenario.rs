//! Plain-text scenario files.
//!
//! ```text
//! # comment
//! dim 2
//! degree 1
//! theta pi/3
//! horizon 1
//! seed 7
//! point 0 | 0 1 | 1/2
//! point 1 | 1 | -1/4 3/8
//! ```
//!
//! A `point` line holds an id and one `|`-separated coefficient list per
//! coordinate, constant term first. Coefficients are integers or `num/den`.
//! `dim` and `degree` must precede the points; `theta`, `eps`, `horizon` and
//! `seed` are optional.

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dashu_int::IBig;

use crate::motion::{rat, Polynomial, Rational, Trajectory};

/// Largest trajectory degree accepted.
pub const MAX_DEGREE: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct Header {
    pub dim: usize,
    pub degree: usize,
    pub theta: Option<f64>,
    pub eps: Option<f64>,
    pub horizon: Rational,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub header: Header,
    pub points: Vec<Trajectory>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        column,
        message: message.into(),
    })
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(s: &str, offset: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in s.char_indices() {
        if ch.is_whitespace() {
            if let Some(st) = start.take() {
                out.push((offset + st + 1, &s[st..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push((offset + st + 1, &s[st..]));
    }
    out
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let ok = |x: &str, signed: bool| {
        let x = if signed {
            x.strip_prefix('-').or_else(|| x.strip_prefix('+')).unwrap_or(x)
        } else {
            x
        };
        !x.is_empty() && x.bytes().all(|b| b.is_ascii_digit())
    };
    if !ok(n, true) || !ok(d, false) {
        return None;
    }
    let n: IBig = n.trim_start_matches('+').parse().ok()?;
    let d: IBig = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::from_parts_signed(n, d))
}

/// Accepts a decimal or `pi/k`.
pub fn parse_angle(s: &str) -> Option<f64> {
    if let Some(k) = s.strip_prefix("pi/") {
        let k: f64 = k.parse().ok()?;
        return (k > 0.0).then(|| std::f64::consts::PI / k);
    }
    let v: f64 = s.parse().ok()?;
    v.is_finite().then_some(v)
}

fn parse_f64(s: &str) -> Option<f64> {
    let v: f64 = s.parse().ok()?;
    v.is_finite().then_some(v)
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let mut dim = None;
    let mut degree = None;
    let mut theta = None;
    let mut eps = None;
    let mut horizon = Rational::one();
    let mut seed = None;
    let mut points = Vec::new();
    let mut ids = HashSet::new();
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.split('#').next().unwrap();
        let mut groups = line.split('|');
        let head = groups.next().unwrap();
        let toks = tokens(head, 0);
        let Some(&(col, key)) = toks.first() else {
            if line.contains('|') {
                return err(ln, 1, "coefficients without a point record");
            }
            continue;
        };
        let single = |name: &str| -> Result<(usize, &str), ParseError> {
            if toks.len() != 2 || line.contains('|') {
                return err(ln, col, format!("`{}` takes exactly one value", name));
            }
            Ok(toks[1])
        };
        match key {
            "dim" | "degree" => {
                if !points.is_empty() {
                    return err(ln, col, format!("`{}` must precede the points", key));
                }
                let (c, v) = single(key)?;
                let v: usize = match v.parse() {
                    Ok(v) => v,
                    Err(_) => return err(ln, c, format!("malformed number `{}`", v)),
                };
                if key == "dim" {
                    if v != 2 && v != 3 {
                        return err(ln, c, format!("dimension must be 2 or 3, got {}", v));
                    }
                    dim = Some(v);
                } else {
                    if v > MAX_DEGREE {
                        return err(
                            ln,
                            c,
                            format!("degree overflow: {} exceeds the supported maximum {}", v, MAX_DEGREE),
                        );
                    }
                    degree = Some(v);
                }
            }
            "theta" | "eps" => {
                let (c, v) = single(key)?;
                let parsed = if key == "theta" { parse_angle(v) } else { parse_f64(v) };
                match parsed {
                    Some(x) if x > 0.0 => {
                        if key == "theta" {
                            theta = Some(x)
                        } else {
                            eps = Some(x)
                        }
                    }
                    _ => return err(ln, c, format!("malformed number `{}`", v)),
                }
            }
            "horizon" => {
                let (c, v) = single(key)?;
                match parse_rational(v) {
                    Some(h) if h >= Rational::zero() => horizon = h,
                    _ => return err(ln, c, format!("malformed number `{}`", v)),
                }
            }
            "seed" => {
                let (c, v) = single(key)?;
                match v.parse() {
                    Ok(s) => seed = Some(s),
                    Err(_) => return err(ln, c, format!("malformed number `{}`", v)),
                }
            }
            "point" => {
                let (Some(d), Some(s)) = (dim, degree) else {
                    return err(ln, col, "`dim` and `degree` must precede the points");
                };
                if toks.len() != 2 {
                    return err(ln, col, "expected `point <id> | coefficients ...`");
                }
                let (ic, id) = toks[1];
                let id: u64 = match id.parse() {
                    Ok(v) => v,
                    Err(_) => return err(ln, ic, format!("malformed id `{}`", id)),
                };
                if !ids.insert(id) {
                    return err(ln, ic, format!("duplicate id {}", id));
                }
                let mut coords = Vec::with_capacity(d);
                let mut offset = head.len() + 1;
                for g in groups {
                    let mut cs = Vec::new();
                    let mut last_col = offset + 1;
                    for (c, tok) in tokens(g, offset) {
                        match parse_rational(tok) {
                            Some(v) => cs.push(v),
                            None => return err(ln, c, format!("malformed number `{}`", tok)),
                        }
                        last_col = c;
                    }
                    if cs.is_empty() {
                        return err(ln, offset + 1, "empty coefficient list");
                    }
                    let p = Polynomial::new(cs);
                    if p.degree() > s {
                        return err(
                            ln,
                            last_col,
                            format!("degree overflow: degree {} exceeds {}", p.degree(), s),
                        );
                    }
                    coords.push(p);
                    offset += g.len() + 1;
                }
                if coords.len() != d {
                    return err(ln, col, format!("expected {} coordinates, found {}", d, coords.len()));
                }
                points.push(Trajectory::new(id, coords));
            }
            other => return err(ln, col, format!("unknown keyword `{}`", other)),
        }
    }
    let (Some(dim), Some(degree)) = (dim, degree) else {
        return err(text.lines().count().max(1), 1, "missing `dim` or `degree`");
    };
    Ok(Scenario {
        header: Header {
            dim,
            degree,
            theta,
            eps,
            horizon,
            seed,
        },
        points,
    })
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = &self.header;
        writeln!(f, "dim {}", h.dim)?;
        writeln!(f, "degree {}", h.degree)?;
        if let Some(t) = h.theta {
            writeln!(f, "theta {}", t)?;
        }
        if let Some(e) = h.eps {
            writeln!(f, "eps {}", e)?;
        }
        writeln!(f, "horizon {}", h.horizon)?;
        if let Some(s) = h.seed {
            writeln!(f, "seed {}", s)?;
        }
        for p in &self.points {
            let mut line = format!("point {}", p.point_id);
            for c in p.coords() {
                line.push_str(" |");
                if c.is_zero() {
                    line.push_str(" 0");
                }
                for k in c.coeffs() {
                    write!(line, " {}", k).unwrap();
                }
            }
            writeln!(f, "{}", line)?;
        }
        Ok(())
    }
}

/// Parameters of a random scenario.
#[derive(Clone, Debug)]
pub struct GenSpec {
    pub n: usize,
    pub dim: usize,
    pub degree: usize,
    pub seed: u64,
    pub horizon: Rational,
    pub theta: Option<f64>,
    pub eps: Option<f64>,
}

const GRID: i64 = 1 << 16;

/// Random trajectories: start in the unit box, every higher coefficient in
/// `[-1, 1]`, all multiples of `2^-16`.
pub fn generate(spec: &GenSpec) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let points = (0..spec.n)
        .map(|i| {
            let coords = (0..spec.dim)
                .map(|_| {
                    let cs = (0..=spec.degree)
                        .map(|k| {
                            let v = if k == 0 {
                                rng.gen_range(0..=GRID)
                            } else {
                                rng.gen_range(-GRID..=GRID)
                            };
                            rat(v, GRID)
                        })
                        .collect();
                    Polynomial::new(cs)
                })
                .collect();
            Trajectory::new(i as u64, coords)
        })
        .collect();
    Scenario {
        header: Header {
            dim: spec.dim,
            degree: spec.degree,
            theta: spec.theta,
            eps: spec.eps,
            horizon: spec.horizon.clone(),
            seed: Some(spec.seed),
        },
        points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::int;

    #[test]
    fn parses_example() {
        let s = parse_scenario("dim 2\ndegree 1\ntheta pi/3\npoint 4 | 0 1 | 1/2\npoint 1 | 1 | -1/4 3/8\n").unwrap();
        assert_eq!(s.points.len(), 2);
        assert_eq!(s.points[0].coords()[0], Polynomial::from_i64(&[0, 1]));
        assert_eq!(s.header.horizon, int(1));
        assert!((s.header.theta.unwrap() - std::f64::consts::FRAC_PI_3).abs() < 1e-15);
    }

    #[test]
    fn empty_point_list() {
        let s = parse_scenario("dim 3\ndegree 2\n").unwrap();
        assert!(s.points.is_empty());
    }

    #[test]
    fn positioned_errors() {
        let e = parse_scenario("dim 2\ndegree 1\npoint 0 | 0 1 2 | 0\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 15));
        assert!(e.message.contains("degree overflow"));
        let e = parse_scenario("dim 2\ndegree 1\npoint 0 | 0 | 0\npoint 0 | 1 | 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (4, 7));
        let e = parse_scenario("dim 2\ndegree 1\npoint 0 | 0 | 1/x\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 15));
        let e = parse_scenario("dim 2\ndegree 5\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 8));
        assert!(parse_scenario("dim 2\ndegree 1\npoint 0 | 1/0 | 0\n").is_err());
    }

    #[test]
    fn round_trip() {
        let s = generate(&GenSpec {
            n: 100,
            dim: 3,
            degree: 2,
            seed: 9,
            horizon: int(2),
            theta: Some(0.5),
            eps: None,
        });
        let again = parse_scenario(&s.to_string()).unwrap();
        assert_eq!(again, s);
        assert_eq!(again.to_string(), s.to_string());
    }
}
