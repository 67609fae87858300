//! Parsers for the small text grammars accepted on the command line and in
//! config files: angles and initial-state descriptors.

use std::f64::consts::PI;
use std::path::PathBuf;

use creutz::states::Side;
use creutz::{Leg, SiteIndex};

/// Parses `pi`, `-pi`, `pi/2`, `-3pi/2`, `3*pi/4`, `1.5pi` or plain decimal
/// radians.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
    let bad = || format!("`{text}` is not an angle (expected e.g. pi, pi/2, -3pi/2, 0.25)");
    if s.is_empty() {
        return Err(bad());
    }
    let Some(pos) = s.find("pi") else {
        return s.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad);
    };
    let (head, tail) = (&s[..pos], &s[pos + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let coefficient = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let denominator = match tail {
        "" => 1.0,
        t => {
            let d = t.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            d
        }
    };
    let x = coefficient * PI / denominator;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad())
    }
}

/// One single-particle factor of a product state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    Edge(Side),
    Site(SiteIndex),
}

/// Initial-state descriptor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Init {
    Site(SiteIndex),
    Doublon(SiteIndex),
    Edge(Side),
    DoublonEdge(Side),
    Noon,
    Product(Factor, Factor),
    /// JSON array of `[re, im]` amplitudes.
    File(PathBuf),
}

fn parse_leg(s: &str) -> Option<Leg> {
    match s {
        "A" | "a" => Some(Leg::A),
        "B" | "b" => Some(Leg::B),
        _ => None,
    }
}

fn parse_site(s: &str) -> Option<SiteIndex> {
    let (j, leg) = s.split_once(',')?;
    let j: usize = j.trim().parse().ok()?;
    (j >= 1).then_some(())?;
    Some(SiteIndex::new(j, parse_leg(leg.trim())?))
}

fn parse_side(s: &str) -> Option<Side> {
    match s {
        "left" | "l" | "L" => Some(Side::Left),
        "right" | "r" | "R" => Some(Side::Right),
        _ => None,
    }
}

/// Splits the leading factor off `text`, returning it and the unparsed rest.
fn parse_factor(text: &str) -> Option<(Factor, &str)> {
    if let Some(rest) = text.strip_prefix("site:") {
        // `j,leg` then optionally `,next`
        let mut parts = rest.splitn(3, ',');
        let (j, leg) = (parts.next()?, parts.next()?);
        let site = parse_site(&format!("{j},{leg}"))?;
        return Some((Factor::Site(site), parts.next().unwrap_or("")));
    }
    let (head, rest) = text.split_once(',').unwrap_or((text, ""));
    let side = match head {
        "edgeL" => Side::Left,
        "edgeR" => Side::Right,
        h => parse_side(h.strip_prefix("edge:")?)?,
    };
    Some((Factor::Edge(side), rest))
}

pub fn parse_init(text: &str) -> Result<Init, String> {
    let bad = || {
        format!(
            "unknown initial state `{text}` (expected site:j,leg | doublon:j,leg | edge:left|right | \
             doublon-edge:left|right | noon | product:edgeL,site:j,leg | file:<path>)"
        )
    };
    let t = text.trim();
    if t == "noon" {
        return Ok(Init::Noon);
    }
    if let Some(path) = t.strip_prefix("file:") {
        return Ok(Init::File(PathBuf::from(path)));
    }
    let (kind, arg) = t.split_once(':').ok_or_else(bad)?;
    match kind {
        "site" => parse_site(arg).map(Init::Site).ok_or_else(bad),
        "doublon" => parse_site(arg).map(Init::Doublon).ok_or_else(bad),
        "edge" => parse_side(arg).map(Init::Edge).ok_or_else(bad),
        "doublon-edge" => parse_side(arg).map(Init::DoublonEdge).ok_or_else(bad),
        "product" => {
            let (first, rest) = parse_factor(arg).ok_or_else(bad)?;
            let (second, rest) = parse_factor(rest).ok_or_else(bad)?;
            if rest.is_empty() {
                Ok(Init::Product(first, second))
            } else {
                Err(bad())
            }
        }
        _ => Err(bad()),
    }
}
