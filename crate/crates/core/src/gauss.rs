//! Gauss diagrams of knot projections and arrow-diagram (Polyak–Viro type)
//! formulas evaluated on them.
//!
//! Arrow convention: an arrow `i>j` runs from its tail `i`, matched to the
//! lower (under) passage of a crossing, to its head `j`, matched to the
//! upper (over) passage.
//!
//! Code grammar: `long:` or `compact:` followed by tokens `O<id><sign>` /
//! `U<id><sign>`, sign `+` or `-`; compact codes may contain one `@` marking
//! the basepoint (default: before the first token).
//!
//! Formula grammar: terms `coeff * D[i>j, ...]` or `coeff * O[i>j, ...]`
//! joined by `+`/`-`. `D` diagrams are based (endpoints in linear order from
//! the basepoint, an optional leading `|` marks it); `O` diagrams are
//! absolute (endpoints in cyclic order). Coefficients are rationals `a` or
//! `a/b` and default to 1.

use num_rational::Rational64;
use num_traits::{One, Zero};
use std::fmt;

use crate::crossing::crossings;
use crate::curve::{Curve, CurveKind};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Visit {
    pub crossing: usize,
    pub over: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussDiagram {
    pub kind: CurveKind,
    /// Sign of crossing `i`, ±1.
    pub signs: Vec<i8>,
    /// Visits read from the basepoint.
    pub word: Vec<Visit>,
}

impl GaussDiagram {
    pub fn crossings(&self) -> usize {
        self.signs.len()
    }

    /// Flip every sign and every over/under.
    pub fn mirror(&self) -> Self {
        GaussDiagram {
            kind: self.kind,
            signs: self.signs.iter().map(|s| -s).collect(),
            word: self
                .word
                .iter()
                .map(|v| Visit {
                    crossing: v.crossing,
                    over: !v.over,
                })
                .collect(),
        }
    }

    /// Relabel crossings by first visit.
    pub fn canonical(&self) -> Self {
        let mut map = vec![usize::MAX; self.signs.len()];
        let mut next = 0;
        for v in &self.word {
            if map[v.crossing] == usize::MAX {
                map[v.crossing] = next;
                next += 1;
            }
        }
        let mut signs = vec![0; self.signs.len()];
        for (old, &new) in map.iter().enumerate() {
            signs[new] = self.signs[old];
        }
        GaussDiagram {
            kind: self.kind,
            signs,
            word: self
                .word
                .iter()
                .map(|v| Visit {
                    crossing: map[v.crossing],
                    over: v.over,
                })
                .collect(),
        }
    }
}

impl fmt::Display for GaussDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            CurveKind::Long => "long:",
            CurveKind::Compact => "compact:",
        };
        write!(f, "{kind}")?;
        for v in &self.word {
            let s = if self.signs[v.crossing] > 0 { '+' } else { '-' };
            write!(f, " {}{}{}", if v.over { 'O' } else { 'U' }, v.crossing + 1, s)?;
        }
        Ok(())
    }
}

fn perr<T>(offset: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        offset,
        msg: msg.into(),
    })
}

/// Tokens with their byte offsets.
fn tokens(text: &str, start: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut begin = None;
    for (i, ch) in text.char_indices() {
        if ch.is_whitespace() || ch == ',' {
            if let Some(b) = begin.take() {
                out.push((start + b, &text[b..i]));
            }
        } else if begin.is_none() {
            begin = Some(i);
        }
    }
    if let Some(b) = begin {
        out.push((start + b, &text[b..]));
    }
    out
}

pub fn parse_gauss(text: &str) -> Result<GaussDiagram> {
    let Some(colon) = text.find(':') else {
        return perr(0, "missing 'long:' or 'compact:' header");
    };
    let kind = match text[..colon].trim() {
        "long" => CurveKind::Long,
        "compact" => CurveKind::Compact,
        other => return perr(0, format!("unknown kind {other:?}")),
    };
    let mut ids: Vec<u64> = Vec::new();
    let mut signs: Vec<i8> = Vec::new();
    let mut seen: Vec<[Option<usize>; 2]> = Vec::new();
    let mut word = Vec::new();
    let mut base: Option<usize> = None;
    for (off, tok) in tokens(&text[colon + 1..], colon + 1) {
        if tok == "@" {
            if kind == CurveKind::Long {
                return perr(off, "basepoint marker in a long code");
            }
            if base.replace(word.len()).is_some() {
                return perr(off, "second basepoint marker");
            }
            continue;
        }
        let mut chars = tok.chars();
        let over = match chars.next() {
            Some('O') | Some('o') => true,
            Some('U') | Some('u') => false,
            _ => return perr(off, format!("token {tok:?} must start with O or U")),
        };
        let rest = chars.as_str();
        let sign_at = rest
            .char_indices()
            .find(|(_, c)| !c.is_ascii_digit())
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        let (num, sgn) = rest.split_at(sign_at);
        let Ok(id) = num.parse::<u64>() else {
            return perr(off, format!("token {tok:?} lacks a crossing id"));
        };
        let sign: i8 = match sgn {
            "+" => 1,
            "-" | "−" => -1,
            _ => return perr(off, format!("token {tok:?} lacks a sign")),
        };
        let idx = match ids.iter().position(|&x| x == id) {
            Some(i) => i,
            None => {
                ids.push(id);
                signs.push(sign);
                seen.push([None, None]);
                ids.len() - 1
            }
        };
        if signs[idx] != sign {
            return perr(off, format!("crossing {id} has conflicting signs"));
        }
        let slot = &mut seen[idx][usize::from(over)];
        if slot.is_some() {
            let which = if over { "over" } else { "under" };
            return perr(off, format!("crossing {id} has two {which} passages"));
        }
        *slot = Some(off);
        word.push(Visit {
            crossing: idx,
            over,
        });
    }
    let incomplete: Vec<String> = ids
        .iter()
        .zip(&seen)
        .filter(|(_, s)| s[0].is_none() || s[1].is_none())
        .map(|(id, _)| id.to_string())
        .collect();
    if !incomplete.is_empty() {
        let first = seen
            .iter()
            .filter(|s| s[0].is_none() || s[1].is_none())
            .filter_map(|s| s[0].or(s[1]))
            .min()
            .unwrap_or(0);
        return perr(first, format!("incomplete crossing ids: {}", incomplete.join(", ")));
    }
    if let Some(b) = base {
        word.rotate_left(b);
    }
    Ok(GaussDiagram { kind, signs, word })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowDiagram {
    /// (tail, head) endpoint positions, 0-based.
    pub arrows: Vec<(usize, usize)>,
    /// Based (linear endpoint order) or absolute (cyclic).
    pub based: bool,
}

impl ArrowDiagram {
    pub fn new(arrows: Vec<(usize, usize)>, based: bool) -> Result<Self> {
        let k = arrows.len();
        let mut hit = vec![false; 2 * k];
        for &(a, b) in &arrows {
            for e in [a, b] {
                if e >= 2 * k || std::mem::replace(&mut hit[e], true) {
                    return Err(Error::Input(format!(
                        "arrow endpoints must be a permutation of 1..{}",
                        2 * k
                    )));
                }
            }
        }
        Ok(ArrowDiagram { arrows, based })
    }

    pub fn order(&self) -> usize {
        self.arrows.len()
    }
}

impl fmt::Display for ArrowDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.arrows.iter().map(|(a, b)| format!("{}>{}", a + 1, b + 1)).collect();
        write!(f, "{}[{}]", if self.based { 'D' } else { 'O' }, body.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowFormula {
    pub terms: Vec<(Rational64, ArrowDiagram)>,
}

impl fmt::Display for ArrowFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, d)) in self.terms.iter().enumerate() {
            let neg = *c < Rational64::zero();
            let mag = if neg { -c } else { *c };
            match (i, neg) {
                (0, true) => write!(f, "-{mag} * {d}")?,
                (0, false) => write!(f, "{mag} * {d}")?,
                (_, true) => write!(f, " - {mag} * {d}")?,
                (_, false) => write!(f, " + {mag} * {d}")?,
            }
        }
        Ok(())
    }
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.s[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.s[self.pos..].chars().next().unwrap().len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.s[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        let len = self.s[start..].chars().take_while(char::is_ascii_digit).count();
        if len == 0 {
            return perr(start, "expected an integer");
        }
        self.pos += len;
        self.s[start..self.pos]
            .parse()
            .or_else(|_| perr(start, "integer out of range"))
    }
}

pub fn parse_formula(text: &str) -> Result<ArrowFormula> {
    let mut cur = Cursor { s: text, pos: 0 };
    let mut terms = Vec::new();
    loop {
        let mut sign = 1;
        if cur.eat('+') {
        } else if cur.eat('-') || cur.eat('−') {
            sign = -1;
        } else if !terms.is_empty() {
            return perr(cur.pos, "expected '+' or '-' between terms");
        }
        let mut coeff = Rational64::one();
        if cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            let num = cur.int()?;
            let den = if cur.eat('/') { cur.int()? } else { 1 };
            if den == 0 {
                return perr(cur.pos, "zero denominator");
            }
            coeff = Rational64::new(num, den);
            if !cur.eat('*') {
                return perr(cur.pos, "expected '*' after coefficient");
            }
        }
        let at = cur.pos;
        let based = match cur.peek() {
            Some('D') => true,
            Some('O') => false,
            _ => return perr(at, "expected a diagram D[...] or O[...]"),
        };
        cur.pos += 1;
        if !cur.eat('[') {
            return perr(cur.pos, "expected '['");
        }
        if based {
            cur.eat('|');
        }
        let mut arrows = Vec::new();
        if !cur.eat(']') {
            loop {
                let a = cur.int()?;
                if !cur.eat('>') {
                    return perr(cur.pos, "expected '>' in arrow");
                }
                let b = cur.int()?;
                if a < 1 || b < 1 {
                    return perr(cur.pos, "endpoints are numbered from 1");
                }
                arrows.push((a as usize - 1, b as usize - 1));
                if cur.eat(']') {
                    break;
                }
                if !cur.eat(',') {
                    return perr(cur.pos, "expected ',' or ']'");
                }
            }
        }
        let d = ArrowDiagram::new(arrows, based).map_err(|e| Error::Parse {
            offset: at,
            msg: e.to_string(),
        })?;
        terms.push((coeff * Rational64::from_integer(sign), d));
        if cur.peek().is_none() {
            break;
        }
    }
    Ok(ArrowFormula { terms })
}

/// Signed count of the diagram's occurrences in `g`.
fn count_diagram(d: &ArrowDiagram, g: &GaussDiagram) -> i64 {
    let k = d.order();
    let n = g.crossings();
    if k == 0 {
        return 1;
    }
    if k > n {
        return 0;
    }
    let mut total = 0i64;
    let mut subset: Vec<usize> = (0..k).collect();
    let mut pos = Vec::with_capacity(2 * k);
    loop {
        pos.clear();
        pos.extend(
            g.word
                .iter()
                .filter(|v| subset.binary_search(&v.crossing).is_ok())
                .copied(),
        );
        let weight: i64 = subset.iter().map(|&c| g.signs[c] as i64).product();
        let rotations = if d.based { 1 } else { 2 * k };
        for r in 0..rotations {
            let at = |e: usize| pos[(e + r) % (2 * k)];
            let ok = d.arrows.iter().all(|&(t, h)| {
                let (vt, vh) = (at(t), at(h));
                vt.crossing == vh.crossing && !vt.over && vh.over
            });
            if ok {
                total += weight;
            }
        }
        let mut i = k;
        loop {
            if i == 0 {
                return total;
            }
            i -= 1;
            if subset[i] < n - k + i {
                subset[i] += 1;
                for j in i + 1..k {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn evaluate_formula(f: &ArrowFormula, g: &GaussDiagram) -> Result<Rational64> {
    Ok(f.terms
        .iter()
        .map(|(c, d)| c * Rational64::from_integer(count_diagram(d, g)))
        .sum())
}

pub struct Builtins {
    pub v2: ArrowFormula,
    pub v3: ArrowFormula,
}

pub const V2_TEXT: &str = "1 * D[1>3, 4>2]";
pub const V3_TEXT: &str = "1/2 * O[1>3, 2>5, 4>6] + 1/3 * O[2>5, 4>1, 6>3]";

pub fn builtin_formulas() -> Builtins {
    Builtins {
        v2: parse_formula(V2_TEXT).expect("builtin v2 parses"),
        v3: parse_formula(V3_TEXT).expect("builtin v3 parses"),
    }
}

/// Resolve a builtin name or parse formula text.
pub fn formula_by_name(name: &str) -> Result<ArrowFormula> {
    match name {
        "v2" => Ok(builtin_formulas().v2),
        "v3" => Ok(builtin_formulas().v3),
        text => parse_formula(text),
    }
}

/// Gauss diagram of a knot in ℝ³ from its projection; compact words start at
/// parameter 0, crossings are numbered by first visit.
pub fn project_to_diagram(curve: &dyn Curve) -> Result<GaussDiagram> {
    let cs = crossings(curve)?;
    let mut visits: Vec<(f64, Visit)> = Vec::with_capacity(2 * cs.len());
    for (i, c) in cs.iter().enumerate() {
        visits.push((c.s, Visit { crossing: i, over: c.over_s }));
        visits.push((c.t, Visit { crossing: i, over: !c.over_s }));
    }
    visits.sort_by(|a, b| a.0.total_cmp(&b.0));
    let g = GaussDiagram {
        kind: curve.kind(),
        signs: cs.iter().map(|c| c.sign).collect(),
        word: visits.into_iter().map(|v| v.1).collect(),
    };
    Ok(g.canonical())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates_codes() {
        let g = parse_gauss("long: O1+ U1+").unwrap();
        assert_eq!((g.crossings(), g.word.len()), (1, 2));
        let e = parse_gauss("long: O1+ U2-").unwrap_err().to_string();
        assert!(e.contains("1") && e.contains("2"), "{e}");
        assert!(parse_gauss("compact: O1+ U1-").is_err());
        assert!(parse_gauss("compact: O1+ O1+").is_err());
        assert!(parse_gauss("compact: X1+").is_err());
        let b = parse_gauss("compact: O1+ @ U2+ O3+ U1+ O2+ U3+").unwrap();
        assert_eq!(b.word[0], Visit { crossing: 1, over: false });
    }

    #[test]
    fn formula_grammar() {
        let v3 = parse_formula(V3_TEXT).unwrap();
        assert_eq!(v3.terms[0].0, Rational64::new(1, 2));
        assert_eq!(v3.terms[1].0, Rational64::new(1, 3));
        assert!(parse_formula("1 * D[1>1]").is_err());
        assert!(parse_formula("1 * D[1>3, 3>2]").is_err());
        let f = parse_formula("-2/4 * D[| 1>2] + O[2>1]").unwrap();
        assert_eq!(f.terms[0].0, Rational64::new(-1, 2));
        assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }
}
