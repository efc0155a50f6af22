//! ℤ/2 chain complex of generalized chord-diagram cells of long knots, p ≤ 3.
//!
//! A cell is a set of `m` ordered sites on ℝ¹, a set of chords between sites
//! and a set of starred sites. The groups of the configuration are the
//! connected components of the chord graph, so a face is non-marginal by
//! construction: its chords generate exactly the coincidence pattern.
//!
//! Text form: `[m=4 | chords: (1,3)(2,4) | stars: ]`, sites numbered from 1.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GCDCell {
    m: u8,
    chords: Vec<(u8, u8)>,
    stars: Vec<u8>,
}

impl GCDCell {
    pub fn new(m: u8, chords: &[(u8, u8)], stars: &[u8]) -> Result<Self> {
        let bad = |msg: String| Err(Error::Input(msg));
        let mut cs: Vec<(u8, u8)> = Vec::with_capacity(chords.len());
        for &(a, b) in chords {
            let (a, b) = (a.min(b), a.max(b));
            if a == 0 || b > m || a == b {
                return bad(format!("chord ({a},{b}) invalid for {m} sites"));
            }
            cs.push((a, b));
        }
        cs.sort_unstable();
        if cs.windows(2).any(|w| w[0] == w[1]) {
            return bad("repeated chord".into());
        }
        let mut st = stars.to_vec();
        st.sort_unstable();
        if st.windows(2).any(|w| w[0] == w[1]) || st.iter().any(|&s| s == 0 || s > m) {
            return bad("stars must be distinct sites".into());
        }
        let cell = GCDCell {
            m,
            chords: cs,
            stars: st,
        };
        if let Some(s) = (1..=m).find(|&s| !cell.covers(s)) {
            return bad(format!("site {s} carries neither chord nor star"));
        }
        Ok(cell)
    }

    pub fn sites(&self) -> u8 {
        self.m
    }

    pub fn chords(&self) -> &[(u8, u8)] {
        &self.chords
    }

    pub fn stars(&self) -> &[u8] {
        &self.stars
    }

    fn covers(&self, s: u8) -> bool {
        self.stars.contains(&s) || self.chords.iter().any(|&(a, b)| a == s || b == s)
    }

    /// Component label of every site (labels are minimal site indices).
    fn components(&self) -> Vec<u8> {
        let mut parent: Vec<u8> = (0..=self.m).collect();
        fn find(p: &mut [u8], x: u8) -> u8 {
            let mut r = x;
            while p[r as usize] != r {
                r = p[r as usize];
            }
            p[x as usize] = r;
            r
        }
        for &(a, b) in &self.chords {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra.max(rb) as usize] = ra.min(rb);
        }
        (0..=self.m).map(|x| find(&mut parent, x)).collect()
    }

    /// Groups of the A-part: chord-graph components with at least two sites.
    pub fn groups(&self) -> Vec<Vec<u8>> {
        let comp = self.components();
        let mut groups: Vec<Vec<u8>> = Vec::new();
        for s in 1..=self.m {
            let members: Vec<u8> = (1..=self.m).filter(|&x| comp[x as usize] == comp[s as usize]).collect();
            if members.len() >= 2 && members[0] == s {
                groups.push(members);
            }
        }
        groups
    }

    /// Σ(aᵢ − 1) + b.
    pub fn complexity(&self) -> usize {
        self.groups().iter().map(|g| g.len() - 1).sum::<usize>() + self.stars.len()
    }

    /// m + q − 1 with q the number of face vertices (chords and stars).
    pub fn degree(&self) -> usize {
        self.m as usize + self.chords.len() + self.stars.len() - 1
    }
}

impl fmt::Display for GCDCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[m={} | chords: ", self.m)?;
        for (a, b) in &self.chords {
            write!(f, "({a},{b})")?;
        }
        write!(f, " | stars:")?;
        for s in &self.stars {
            write!(f, " {s}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for GCDCell {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let err = |msg: &str| Error::Parse {
            offset: 0,
            msg: format!("{msg} in cell {text:?}"),
        };
        let body = text
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| err("missing brackets"))?;
        let parts: Vec<&str> = body.split('|').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(err("expected three '|'-separated parts"));
        }
        let m: u8 = parts[0]
            .strip_prefix("m=")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| err("bad site count"))?;
        let chords_txt = parts[1].strip_prefix("chords:").ok_or_else(|| err("missing 'chords:'"))?;
        let mut chords = Vec::new();
        for piece in chords_txt.split(')').map(str::trim).filter(|s| !s.is_empty()) {
            let inner = piece.strip_prefix('(').ok_or_else(|| err("bad chord"))?;
            let (a, b) = inner.split_once(',').ok_or_else(|| err("bad chord"))?;
            let a = a.trim().parse().map_err(|_| err("bad chord endpoint"))?;
            let b = b.trim().parse().map_err(|_| err("bad chord endpoint"))?;
            chords.push((a, b));
        }
        let stars_txt = parts[2].strip_prefix("stars:").ok_or_else(|| err("missing 'stars:'"))?;
        let stars = stars_txt
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| err("bad star")))
            .collect::<Result<Vec<u8>>>()?;
        GCDCell::new(m, &chords, &stars)
    }
}

/// Formal sum of cells with coefficients in ℤ/2.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Chain2 {
    cells: BTreeSet<GCDCell>,
}

impl Chain2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add(&mut self, cell: GCDCell) {
        if !self.cells.remove(&cell) {
            self.cells.insert(cell);
        }
    }

    pub fn add_chain(&mut self, other: &Chain2) {
        for c in &other.cells {
            self.add(c.clone());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &GCDCell> {
        self.cells.iter()
    }

    pub fn contains(&self, c: &GCDCell) -> bool {
        self.cells.contains(c)
    }
}

impl FromIterator<GCDCell> for Chain2 {
    fn from_iter<I: IntoIterator<Item = GCDCell>>(iter: I) -> Self {
        let mut ch = Chain2::zero();
        for c in iter {
            ch.add(c);
        }
        ch
    }
}

impl fmt::Display for Chain2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cells.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.cells.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Mod-2 boundary within the same filtration term.
pub fn boundary(cell: &GCDCell) -> Chain2 {
    let p = cell.complexity();
    let mut out = Chain2::zero();
    let comps = cell.components();
    for k in 0..cell.chords.len() {
        let mut chords = cell.chords.clone();
        chords.remove(k);
        let face = GCDCell {
            m: cell.m,
            chords,
            stars: cell.stars.clone(),
        };
        if face.components() == comps {
            out.add(face);
        }
    }
    for i in 1..cell.m {
        if let Some(face) = collide(cell, i) {
            if face.complexity() == p {
                out.add(face);
            }
        }
    }
    out
}

/// Merge sites i and i+1; a chord between them becomes a star.
fn collide(cell: &GCDCell, i: u8) -> Option<GCDCell> {
    let map = |s: u8| if s > i { s - 1 } else { s };
    let mut chords = Vec::new();
    let mut stars: Vec<u8> = cell.stars.iter().map(|&s| map(s)).collect();
    for &(a, b) in &cell.chords {
        if a == i && b == i + 1 {
            stars.push(i);
        } else {
            chords.push((map(a), map(b)));
        }
    }
    let (nc, ns) = (chords.len(), stars.len());
    chords.sort_unstable();
    chords.dedup();
    stars.sort_unstable();
    stars.dedup();
    if chords.len() != nc || stars.len() != ns {
        return None;
    }
    Some(GCDCell {
        m: cell.m - 1,
        chords,
        stars,
    })
}

pub fn boundary_chain(chain: &Chain2) -> Chain2 {
    let mut out = Chain2::zero();
    for c in chain.iter() {
        out.add_chain(&boundary(c));
    }
    out
}

pub fn verify_cycle(chain: &Chain2) -> bool {
    boundary_chain(chain).is_zero()
}

/// All cells of complexity `p` (1 ≤ p ≤ 3), optionally of one degree, in
/// canonical order.
pub fn enumerate_cells(p: usize, degree: Option<usize>) -> Result<Vec<GCDCell>> {
    if !(1..=3).contains(&p) {
        return Err(Error::Unsupported(format!("complexity {p} (supported: 1..=3)")));
    }
    let mut out = BTreeSet::new();
    for m in 1..=(2 * p) as u8 {
        let pairs: Vec<(u8, u8)> = (1..=m)
            .flat_map(|a| (a + 1..=m).map(move |b| (a, b)))
            .collect();
        for star_mask in 0u32..(1 << m) {
            if star_mask.count_ones() as usize > p {
                continue;
            }
            let stars: Vec<u8> = (1..=m).filter(|s| star_mask >> (s - 1) & 1 == 1).collect();
            for chord_mask in 0u64..(1 << pairs.len()) {
                let chords: Vec<(u8, u8)> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| chord_mask >> k & 1 == 1)
                    .map(|(_, &c)| c)
                    .collect();
                let Ok(cell) = GCDCell::new(m, &chords, &stars) else {
                    continue;
                };
                if cell.complexity() == p && degree.map_or(true, |d| cell.degree() == d) {
                    out.insert(cell);
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Boundary matrix from degree d to degree d−1 (rows: targets).
fn boundary_matrix(src: &[GCDCell], dst: &[GCDCell]) -> BitMatrix {
    let mut mat = BitMatrix::zeros(dst.len(), src.len());
    for (j, c) in src.iter().enumerate() {
        for f in boundary(c).iter() {
            let i = dst.binary_search(f).expect("boundary stays in the complex");
            mat.flip(i, j);
        }
    }
    mat
}

fn cells_by_degree(p: usize) -> Result<Vec<(usize, Vec<GCDCell>)>> {
    let all = enumerate_cells(p, None)?;
    let max = all.iter().map(GCDCell::degree).max().unwrap_or(0);
    Ok((0..=max + 1)
        .map(|d| (d, all.iter().filter(|c| c.degree() == d).cloned().collect()))
        .collect())
}

/// dim over ℤ/2 of ker ∂ / im ∂ in complexity `p` and the given degree.
pub fn homology_rank(p: usize, degree: usize) -> Result<usize> {
    let table = homology_table(p)?;
    Ok(table.iter().find(|r| r.degree == degree).map_or(0, |r| r.rank))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyRow {
    pub degree: usize,
    pub cells: usize,
    pub rank: usize,
}

pub fn homology_table(p: usize) -> Result<Vec<HomologyRow>> {
    let by = cells_by_degree(p)?;
    let empty = Vec::new();
    let get = |d: usize| by.iter().find(|x| x.0 == d).map_or(&empty, |x| &x.1);
    let mut rows = Vec::new();
    for (d, cells) in &by {
        if cells.is_empty() {
            continue;
        }
        let down = if *d == 0 { 0 } else { boundary_matrix(cells, get(d - 1)).rank() };
        let up = boundary_matrix(get(d + 1), cells).rank();
        rows.push(HomologyRow {
            degree: *d,
            cells: cells.len(),
            rank: cells.len() - down - up,
        });
    }
    Ok(rows)
}

/// A chain x of one degree higher with ∂x = `chain`, if any.
pub fn bounding_chain(chain: &Chain2) -> Option<Chain2> {
    let first = chain.iter().next()?;
    let (p, d) = (first.complexity(), first.degree());
    let src = enumerate_cells(p, Some(d + 1)).ok()?;
    let dst = enumerate_cells(p, Some(d)).ok()?;
    let mat = boundary_matrix(&src, &dst);
    let rhs: Vec<bool> = dst.iter().map(|c| chain.contains(c)).collect();
    let x = mat.solve(&rhs)?;
    Some(src.into_iter().zip(x).filter(|(_, b)| *b).map(|(c, _)| c).collect())
}

fn cell(m: u8, chords: &[(u8, u8)], stars: &[u8]) -> GCDCell {
    GCDCell::new(m, chords, stars).expect("fixture cell is valid")
}

/// ∂(chord) = star.
pub fn example1_equation() -> (GCDCell, Chain2) {
    (cell(2, &[(1, 2)], &[]), [cell(1, &[], &[1])].into_iter().collect())
}

/// The boundary equations of the complexity-2 term, signs reduced mod 2,
/// including the three cells of lowest degree whose boundary is zero.
pub fn example2_equations() -> Vec<(GCDCell, Chain2)> {
    let t12_13 = || cell(3, &[(1, 2), (1, 3)], &[]);
    let t12_23 = || cell(3, &[(1, 2), (2, 3)], &[]);
    let t13_23 = || cell(3, &[(1, 3), (2, 3)], &[]);
    let c_s1 = || cell(2, &[(1, 2)], &[1]);
    let c_s2 = || cell(2, &[(1, 2)], &[2]);
    let ss = || cell(2, &[], &[1, 2]);
    let ch = |v: Vec<GCDCell>| v.into_iter().collect::<Chain2>();
    vec![
        (cell(4, &[(1, 3), (2, 4)], &[]), ch(vec![t12_13(), t12_23(), t13_23()])),
        (
            cell(4, &[(1, 2), (3, 4)], &[]),
            ch(vec![cell(3, &[(2, 3)], &[1]), t12_23(), cell(3, &[(1, 2)], &[3])]),
        ),
        (
            cell(4, &[(1, 4), (2, 3)], &[]),
            ch(vec![t12_13(), cell(3, &[(1, 3)], &[2]), t13_23()]),
        ),
        (cell(3, &[(1, 2), (2, 3), (1, 3)], &[]), ch(vec![t12_13(), t12_23(), t13_23()])),
        (t12_13(), ch(vec![c_s1()])),
        (t12_23(), ch(vec![c_s1(), c_s2()])),
        (t13_23(), ch(vec![c_s2()])),
        (cell(3, &[(1, 2)], &[3]), ch(vec![ss(), c_s2()])),
        (cell(3, &[(1, 3)], &[2]), ch(vec![c_s1(), c_s2()])),
        (cell(3, &[(2, 3)], &[1]), ch(vec![c_s1(), ss()])),
        (c_s1(), Chain2::zero()),
        (c_s2(), Chain2::zero()),
        (ss(), Chain2::zero()),
    ]
}

/// Generator of the order-2 homology: first plus last top cell.
pub fn order2_generator() -> Chain2 {
    [cell(4, &[(1, 3), (2, 4)], &[]), cell(3, &[(1, 2), (2, 3), (1, 3)], &[])]
        .into_iter()
        .collect()
}

/// Principal part of the order-3 long-knot class: two cells.
pub fn principal_part_two_cells() -> Chain2 {
    [
        cell(5, &[(1, 4), (2, 5), (3, 5)], &[]),
        cell(4, &[(1, 3), (3, 4), (1, 4), (2, 4)], &[]),
    ]
    .into_iter()
    .collect()
}

/// Principal part for odd n: five cells.
pub fn principal_part_five_cells() -> Chain2 {
    [
        cell(4, &[(1, 3), (2, 3), (3, 4), (2, 4)], &[]),
        cell(4, &[(2, 3), (3, 4), (2, 4), (1, 4)], &[]),
        cell(5, &[(1, 4), (3, 5), (2, 5)], &[]),
        cell(5, &[(2, 4), (3, 5), (1, 5)], &[]),
        cell(5, &[(1, 4), (2, 4), (3, 5)], &[]),
    ]
    .into_iter()
    .collect()
}
