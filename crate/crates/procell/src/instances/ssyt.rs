//! Partitions, semistandard Young tableaux, and their enumeration.
//!
//! A tableau is semistandard when entries increase weakly along rows and
//! strictly down columns.

use crate::cell::CellError;
use crate::poset::Label;

/// Integer partition: weakly decreasing positive parts (row lengths).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Partition(Vec<u64>);

impl Partition {
    pub fn new(parts: Vec<u64>) -> Result<Partition, CellError> {
        for w in parts.windows(2) {
            if w[0] < w[1] {
                return Err(CellError::Bound(format!(
                    "parts not weakly decreasing: {parts:?}"
                )));
            }
        }
        if parts.contains(&0) {
            return Err(CellError::Bound(format!("zero part in {parts:?}")));
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Partition {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u64] {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.len()
    }

    pub fn size(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Dominance: self ⊵ other, defined only between partitions of equal
    /// size (prefix sums of self are at least those of other).
    pub fn dominates(&self, other: &Partition) -> bool {
        if self.size() != other.size() {
            return false;
        }
        let mut a = 0u64;
        let mut b = 0u64;
        for k in 0..self.0.len().max(other.0.len()) {
            a += self.0.get(k).copied().unwrap_or(0);
            b += other.0.get(k).copied().unwrap_or(0);
            if a < b {
                return false;
            }
        }
        true
    }

    /// Canonical label, e.g. `(2,1)`; the empty partition is `()`.
    pub fn label(&self) -> Label {
        let inner: Vec<String> = self.0.iter().map(u64::to_string).collect();
        Label::new(format!("({})", inner.join(",")))
    }

    /// Parses `(2,1)` or `2,1`; `()` is the empty partition.
    pub fn parse(s: &str) -> Result<Partition, CellError> {
        let t = s.trim();
        let t = t.strip_prefix('(').unwrap_or(t);
        let t = t.strip_suffix(')').unwrap_or(t);
        let t = t.trim();
        if t.is_empty() {
            return Ok(Partition::empty());
        }
        let parts: Result<Vec<u64>, _> = t.split(',').map(|p| p.trim().parse()).collect();
        match parts {
            Ok(parts) => Partition::new(parts),
            Err(_) => Err(CellError::Bound(format!("cannot parse partition {s:?}"))),
        }
    }

    /// All partitions of `size` with at most `max_rows` rows, in
    /// lexicographically decreasing part order ((4) first, then (3,1), ...).
    pub fn enumerate(size: u64, max_rows: usize) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut parts = Vec::new();
        fn rec(remaining: u64, max_part: u64, rows_left: usize, parts: &mut Vec<u64>, out: &mut Vec<Partition>) {
            if remaining == 0 {
                out.push(Partition(parts.clone()));
                return;
            }
            if rows_left == 0 {
                return;
            }
            let hi = remaining.min(max_part);
            for p in (1..=hi).rev() {
                parts.push(p);
                rec(remaining - p, p, rows_left - 1, parts, out);
                parts.pop();
            }
        }
        rec(size, size.max(1), max_rows, &mut parts, &mut out);
        out
    }
}

/// Semistandard tableau: rows of entries matching an underlying partition
/// shape.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Tableau(Vec<Vec<u32>>);

impl Tableau {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Tableau, CellError> {
        let t = Tableau(rows);
        if !t.is_semistandard() {
            return Err(CellError::Bound(format!("not semistandard: {t:?}")));
        }
        Ok(t)
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.0
    }

    pub fn shape(&self) -> Partition {
        Partition(self.0.iter().map(|r| r.len() as u64).collect())
    }

    pub fn is_semistandard(&self) -> bool {
        for w in self.0.windows(2) {
            if w[0].len() < w[1].len() {
                return false; // not a partition shape
            }
        }
        for row in &self.0 {
            if row.is_empty() {
                return false;
            }
            for w in row.windows(2) {
                if w[0] > w[1] {
                    return false; // rows weakly increase
                }
            }
        }
        for r in 1..self.0.len() {
            for c in 0..self.0[r].len() {
                if self.0[r - 1][c] >= self.0[r][c] {
                    return false; // columns strictly increase
                }
            }
        }
        true
    }

    /// Canonical label: rows joined by `|`, entries by `,`; the empty
    /// tableau is `-`.
    pub fn label(&self) -> Label {
        if self.0.is_empty() {
            return Label::new("-");
        }
        let rows: Vec<String> = self
            .0
            .iter()
            .map(|r| {
                r.iter()
                    .map(u32::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        Label::new(rows.join("|"))
    }

    pub fn parse(s: &str) -> Result<Tableau, CellError> {
        if s == "-" {
            return Ok(Tableau(Vec::new()));
        }
        let mut rows = Vec::new();
        for row in s.split('|') {
            let entries: Result<Vec<u32>, _> = row.split(',').map(|e| e.trim().parse()).collect();
            rows.push(entries.map_err(|_| CellError::Bound(format!("cannot parse tableau {s:?}")))?);
        }
        Tableau::new(rows)
    }
}

/// All semistandard fillings of `shape` with entries from 1..=n, in
/// deterministic (lexicographic, row-major) order.
///
/// A shape with more than n nonzero rows admits no semistandard filling
/// (columns increase strictly), and is rejected.
pub fn enumerate_ssyt(shape: &Partition, n: u32) -> Result<Vec<Tableau>, CellError> {
    if shape.rows() > n as usize {
        return Err(CellError::Bound(format!(
            "shape {} has {} rows, more than n = {n}",
            shape.label(),
            shape.rows()
        )));
    }
    if shape.rows() == 0 {
        return Ok(vec![Tableau(Vec::new())]);
    }
    let parts = shape.parts();
    let mut rows: Vec<Vec<u32>> = parts.iter().map(|&l| vec![0u32; l as usize]).collect();
    let mut out = Vec::new();
    // fill cells row-major; each cell min bound: left neighbor, and
    // strictly above neighbor + 1
    fn rec(
        parts: &[u64],
        n: u32,
        r: usize,
        c: usize,
        rows: &mut Vec<Vec<u32>>,
        out: &mut Vec<Tableau>,
    ) {
        if r == parts.len() {
            out.push(Tableau(rows.clone()));
            return;
        }
        let (nr, nc) = if c + 1 < parts[r] as usize {
            (r, c + 1)
        } else {
            (r + 1, 0)
        };
        let mut lo = 1u32;
        if c > 0 {
            lo = lo.max(rows[r][c - 1]);
        }
        if r > 0 && c < parts[r - 1] as usize {
            lo = lo.max(rows[r - 1][c] + 1);
        }
        for v in lo..=n {
            rows[r][c] = v;
            rec(parts, n, nr, nc, rows, out);
        }
        rows[r][c] = 0;
    }
    rec(parts, n, 0, 0, &mut rows, &mut out);
    Ok(out)
}
