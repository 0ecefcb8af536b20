//! Lines in `Z_d × Z_d`, the circulant support pattern `M_p` and its index
//! classes `I_p(x)`.
//!
//! Flat indices are row-major: the tensor pair `(j1, j2)` sits at
//! `d·j1 + j2`, so an entry `(r, s)` of a `d² × d²` matrix is entry
//! `(j2, k2)` of the block `B(j1, k1)`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::algebra::{GfAddTable, PermutationZd};
use crate::{Error, Result};

pub fn tensor_to_flat(d: usize, j1: usize, j2: usize) -> Result<usize> {
    if j1 >= d || j2 >= d {
        return Err(Error::IndexOutOfRange {
            what: "tensor index",
            value: j1.max(j2) as i64,
            bound: d,
        });
    }
    Ok(d * j1 + j2)
}

pub fn flat_to_tensor(d: usize, r: usize) -> Result<(usize, usize)> {
    if r >= d * d {
        return Err(Error::IndexOutOfRange {
            what: "flat index",
            value: r as i64,
            bound: d * d,
        });
    }
    Ok((r / d, r % d))
}

/// A set of `d` points of `Z_d²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    d: usize,
    points: Vec<(usize, usize)>,
}

impl Line {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn points(&self) -> &[(usize, usize)] {
        &self.points
    }

    pub fn contains(&self, pt: (usize, usize)) -> bool {
        self.points.contains(&pt)
    }

    fn build(d: usize, offset: usize, f: impl Fn(usize) -> (usize, usize)) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if offset >= d {
            return Err(Error::IndexOutOfRange {
                what: "line offset",
                value: offset as i64,
                bound: d,
            });
        }
        Ok(Self {
            d,
            points: (0..d).map(f).collect(),
        })
    }
}

/// `{(x, x + offset)}`.
pub fn slope_one_line(d: usize, offset: usize) -> Result<Line> {
    Line::build(d, offset, |x| (x, (x + offset) % d))
}

/// `{(x0, y)}`.
pub fn vertical_line(d: usize, x0: usize) -> Result<Line> {
    Line::build(d, x0, |y| (x0, y))
}

/// `{(x, y0)}`.
pub fn horizontal_line(d: usize, y0: usize) -> Result<Line> {
    Line::build(d, y0, |x| (x, y0))
}

/// The positions of one index class: `positions[j·d + k]` is the unique
/// position of the class inside block `B(j, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexClass {
    pub x: usize,
    pub positions: Vec<(usize, usize)>,
}

/// What generated a pattern: a permutation of `Z_d`, or a GF(q) addition
/// table with the identity labeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternSource {
    Circulant(PermutationZd),
    Galois(usize),
}

const NO_CLASS: u32 = u32::MAX;

/// The zero/one pattern `M_p` as a set of flat-index pairs partitioned
/// into `d` index classes.
#[derive(Debug, Clone)]
pub struct SupportPattern {
    d: usize,
    source: PatternSource,
    classes: Vec<IndexClass>,
    // n×n lookup, class label or NO_CLASS
    lookup: Vec<u32>,
}

impl SupportPattern {
    fn from_classes(d: usize, source: PatternSource, classes: Vec<IndexClass>) -> Self {
        let n = d * d;
        let mut lookup = vec![NO_CLASS; n * n];
        for class in &classes {
            for &(r, s) in &class.positions {
                lookup[r * n + s] = class.x as u32;
            }
        }
        Self {
            d,
            source,
            classes,
            lookup,
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn source(&self) -> &PatternSource {
        &self.source
    }

    pub fn permutation(&self) -> Option<&PermutationZd> {
        match &self.source {
            PatternSource::Circulant(p) => Some(p),
            PatternSource::Galois(_) => None,
        }
    }

    pub fn classes(&self) -> &[IndexClass] {
        &self.classes
    }

    pub fn contains(&self, r: usize, s: usize) -> bool {
        self.class_at(r, s).is_some()
    }

    pub fn class_at(&self, r: usize, s: usize) -> Option<usize> {
        let n = self.d * self.d;
        match self.lookup.get(r * n + s) {
            Some(&c) if c != NO_CLASS => Some(c as usize),
            _ => None,
        }
    }

    pub fn support(&self) -> BTreeSet<(usize, usize)> {
        self.classes
            .iter()
            .flat_map(|c| c.positions.iter().copied())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.classes.iter().map(|c| c.positions.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dot / `x_k` text picture, one row per line. Cells are padded to a
    /// common width and separated by a single space.
    pub fn render_text(&self) -> String {
        let n = self.d * self.d;
        let width = format!("x{}", self.d - 1).len();
        let mut out = String::new();
        for r in 0..n {
            let cells: Vec<String> = (0..n)
                .map(|s| match self.class_at(r, s) {
                    Some(x) => format!("{:<width$}", format!("x{x}")),
                    None => format!("{:<width$}", "."),
                })
                .collect();
            out.push_str(cells.join(" ").trim_end());
            out.push('\n');
        }
        out
    }

    /// Minimal SVG: one labelled cell per support position, block grid lines.
    pub fn render_svg(&self) -> String {
        const CELL: usize = 24;
        let n = self.d * self.d;
        let size = n * CELL;
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}" font-family="monospace" font-size="10">"#
        );
        let _ = writeln!(svg, r#"<rect width="{size}" height="{size}" fill="white"/>"#);
        for b in 0..=self.d {
            let z = b * self.d * CELL;
            let _ = writeln!(
                svg,
                r#"<line x1="{z}" y1="0" x2="{z}" y2="{size}" stroke="gray"/><line x1="0" y1="{z}" x2="{size}" y2="{z}" stroke="gray"/>"#
            );
        }
        for class in &self.classes {
            for &(r, s) in &class.positions {
                let (x, y) = (s * CELL, r * CELL);
                let _ = writeln!(
                    svg,
                    r#"<text x="{}" y="{}" text-anchor="middle">x{}</text>"#,
                    x + CELL / 2,
                    y + CELL / 2 + 4,
                    class.x
                );
            }
        }
        svg.push_str("</svg>\n");
        svg
    }
}

/// `M_p`: block `B_p(j, k)` is supported on `{(x + p(j), x + p(k))}` and
/// the class `I_p(x)` collects the `x`-th point of every block.
pub fn support_pattern(p: &PermutationZd) -> SupportPattern {
    let d = p.dim();
    let classes = (0..d)
        .map(|x| IndexClass {
            x,
            positions: block_pairs(d)
                .map(|(j, k)| {
                    (
                        d * j + (x + p.apply(j)) % d,
                        d * k + (x + p.apply(k)) % d,
                    )
                })
                .collect(),
        })
        .collect();
    SupportPattern::from_classes(d, PatternSource::Circulant(p.clone()), classes)
}

/// Same construction with GF(q) addition in place of `Z_d` addition and the
/// identity labeling.
pub fn gf_support_pattern(table: &GfAddTable) -> SupportPattern {
    let q = table.order();
    let classes = (0..q)
        .map(|x| IndexClass {
            x,
            positions: block_pairs(q)
                .map(|(j, k)| (q * j + table.add(x, j), q * k + table.add(x, k)))
                .collect(),
        })
        .collect();
    SupportPattern::from_classes(q, PatternSource::Galois(q), classes)
}

fn block_pairs(d: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..d).flat_map(move |j| (0..d).map(move |k| (j, k)))
}
