//! Temperley-Lieb diagram algebras TL_n(δ).
//!
//! Basis elements are planar perfect matchings of 2n boundary points (n on
//! top, n on the bottom); multiplication concatenates diagrams, and each
//! closed loop contributes a factor δ. The cell structure stratifies
//! diagrams by through-strand count, with FEWER through-strands placed
//! LOWER in the cell poset so that the span below a cell is the two-sided
//! ideal of diagrams with fewer through-strands. That orientation is a
//! choice; the axiom report is its arbiter.

use std::collections::HashMap;
use std::sync::Arc;

use crate::cell::{BasisIndex, CellDatum, CellError, MultFn, TableauxFn};
use crate::field::{Field, FieldError, Scalar};
use crate::poset::{Label, Poset};

/// Largest strand count accepted by [`tl_datum`].
pub const TL_MAX_N: usize = 6;

/// A planar pairing of 2n boundary points: 0..n-1 on top (left to right),
/// n..2n-1 on the bottom (left to right).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TLDiagram {
    n: usize,
    pairing: Vec<usize>,
}

impl TLDiagram {
    /// Validates and wraps a pairing; rejects non-matchings and crossings.
    pub fn new(n: usize, pairing: Vec<usize>) -> Result<TLDiagram, CellError> {
        if pairing.len() != 2 * n {
            return Err(CellError::Bound(format!(
                "pairing has {} points, expected {}",
                pairing.len(),
                2 * n
            )));
        }
        for (i, &j) in pairing.iter().enumerate() {
            if j >= 2 * n || j == i || pairing[j] != i {
                return Err(CellError::Bound(format!(
                    "not a perfect matching at point {i}"
                )));
            }
        }
        let d = TLDiagram { n, pairing };
        if !d.is_planar() {
            return Err(CellError::Bound("crossing strands".into()));
        }
        Ok(d)
    }

    pub fn strands(&self) -> usize {
        self.n
    }

    /// Position on the boundary circle: top row left to right, then bottom
    /// row right to left.
    fn circle_pos(&self, i: usize) -> usize {
        if i < self.n {
            i
        } else {
            self.n + (2 * self.n - 1 - i)
        }
    }

    fn is_planar(&self) -> bool {
        let pairs: Vec<(usize, usize)> = (0..2 * self.n)
            .filter(|&i| i < self.pairing[i])
            .map(|i| {
                let (a, b) = (self.circle_pos(i), self.circle_pos(self.pairing[i]));
                (a.min(b), a.max(b))
            })
            .collect();
        for (k, &(a, b)) in pairs.iter().enumerate() {
            for &(c, d) in &pairs[k + 1..] {
                let c_in = a < c && c < b;
                let d_in = a < d && d < b;
                if c_in != d_in {
                    return false;
                }
            }
        }
        true
    }

    /// Number of through-strands (top-to-bottom pairs).
    pub fn through_strands(&self) -> usize {
        (0..self.n).filter(|&i| self.pairing[i] >= self.n).count()
    }

    /// Vertical flip, exchanging top and bottom rows; this realizes the
    /// involution on diagrams.
    pub fn flip(&self) -> TLDiagram {
        let n = self.n;
        let sw = |i: usize| if i < n { i + n } else { i - n };
        let mut pairing = vec![0; 2 * n];
        for i in 0..2 * n {
            pairing[sw(i)] = sw(self.pairing[i]);
        }
        TLDiagram { n, pairing }
    }

    /// Stacks `self` on top of `other`, gluing `self`'s bottom row to
    /// `other`'s top row. Returns the closed-loop count and the resulting
    /// diagram.
    pub fn compose(&self, other: &TLDiagram) -> (usize, TLDiagram) {
        assert_eq!(self.n, other.n, "strand counts must match");
        let n = self.n;
        // combined nodes: self points 0..2n, other points 2n..4n
        let matching = |x: usize| -> usize {
            if x < 2 * n {
                self.pairing[x]
            } else {
                2 * n + other.pairing[x - 2 * n]
            }
        };
        // middle nodes are self's bottom row and other's top row
        let glue = |x: usize| -> usize {
            if x < 2 * n {
                debug_assert!(x >= n);
                2 * n + (x - n)
            } else {
                debug_assert!(x < 3 * n);
                (x - 2 * n) + n
            }
        };
        let is_boundary = |x: usize| x < n || x >= 3 * n;
        let mut visited = vec![false; 4 * n];
        let mut pairing = vec![usize::MAX; 2 * n];
        let out_id = |x: usize| if x < n { x } else { x - 2 * n };
        for start in (0..n).chain(3 * n..4 * n) {
            if visited[start] {
                continue;
            }
            visited[start] = true;
            let mut cur = matching(start);
            while !is_boundary(cur) {
                visited[cur] = true;
                cur = glue(cur);
                visited[cur] = true;
                cur = matching(cur);
            }
            visited[cur] = true;
            pairing[out_id(start)] = out_id(cur);
            pairing[out_id(cur)] = out_id(start);
        }
        let mut loops = 0;
        for m in (n..2 * n).chain(2 * n..3 * n) {
            if visited[m] {
                continue;
            }
            loops += 1;
            let mut cur = m;
            loop {
                visited[cur] = true;
                let g = glue(cur);
                visited[g] = true;
                cur = matching(g);
                if cur == m {
                    break;
                }
            }
        }
        let composed = TLDiagram { n, pairing };
        debug_assert!(composed.is_planar());
        (loops, composed)
    }

    /// Splits into (through-count, top half, bottom half).
    pub fn halves(&self) -> (usize, HalfDiagram, HalfDiagram) {
        let n = self.n;
        let mut top = vec![b'|'; n];
        let mut bottom = vec![b'|'; n];
        let mut through = 0;
        for i in 0..2 * n {
            let j = self.pairing[i];
            if i >= j {
                continue;
            }
            if j < n {
                top[i] = b'(';
                top[j] = b')';
            } else if i >= n {
                bottom[i - n] = b'(';
                bottom[j - n] = b')';
            } else {
                through += 1;
            }
        }
        (
            through,
            HalfDiagram { n, pattern: top },
            HalfDiagram { n, pattern: bottom },
        )
    }

    /// Assembles a full diagram from two half-diagrams with equal defect
    /// counts; defects are joined in left-to-right order.
    pub fn from_halves(top: &HalfDiagram, bottom: &HalfDiagram) -> TLDiagram {
        assert_eq!(top.n, bottom.n);
        assert_eq!(top.defects().len(), bottom.defects().len());
        let n = top.n;
        let mut pairing = vec![usize::MAX; 2 * n];
        for (a, b) in top.arcs() {
            pairing[a] = b;
            pairing[b] = a;
        }
        for (a, b) in bottom.arcs() {
            pairing[n + a] = n + b;
            pairing[n + b] = n + a;
        }
        for (&d_top, &d_bot) in top.defects().iter().zip(bottom.defects().iter()) {
            pairing[d_top] = n + d_bot;
            pairing[n + d_bot] = d_top;
        }
        let d = TLDiagram { n, pairing };
        debug_assert!(d.is_planar());
        d
    }
}

/// Half-diagram on n points: a planar partial matching whose unmatched
/// points (the future through-strands) are not nested under any arc.
/// Encoded as a pattern over `(`, `)`, `|` with balanced parens and `|`
/// only at nesting depth zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HalfDiagram {
    n: usize,
    pattern: Vec<u8>,
}

impl HalfDiagram {
    pub fn parse(n: usize, label: &str) -> Option<HalfDiagram> {
        let pattern = label.as_bytes().to_vec();
        if pattern.len() != n {
            return None;
        }
        let mut depth = 0i64;
        for &c in &pattern {
            match c {
                b'(' => depth += 1,
                b')' => {
                    depth -= 1;
                    if depth < 0 {
                        return None;
                    }
                }
                b'|' => {
                    if depth != 0 {
                        return None;
                    }
                }
                _ => return None,
            }
        }
        if depth != 0 {
            return None;
        }
        Some(HalfDiagram { n, pattern })
    }

    pub fn label(&self) -> String {
        String::from_utf8(self.pattern.clone()).expect("pattern is ASCII")
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut stack = Vec::new();
        let mut arcs = Vec::new();
        for (i, &c) in self.pattern.iter().enumerate() {
            match c {
                b'(' => stack.push(i),
                b')' => {
                    let j = stack.pop().expect("validated pattern");
                    arcs.push((j, i));
                }
                _ => {}
            }
        }
        arcs.sort_unstable();
        arcs
    }

    pub fn defects(&self) -> Vec<usize> {
        self.pattern
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == b'|')
            .map(|(i, _)| i)
            .collect()
    }

    /// All half-diagrams on n points with t defects, in lexicographic
    /// pattern order.
    pub fn enumerate(n: usize, t: usize) -> Vec<HalfDiagram> {
        let mut out = Vec::new();
        let mut pattern = Vec::with_capacity(n);
        fn rec(n: usize, t: usize, depth: usize, defects: usize, pattern: &mut Vec<u8>, out: &mut Vec<HalfDiagram>) {
            if pattern.len() == n {
                if depth == 0 && defects == t {
                    out.push(HalfDiagram {
                        n,
                        pattern: pattern.clone(),
                    });
                }
                return;
            }
            // ASCII order: '(' < ')' < '|'
            pattern.push(b'(');
            rec(n, t, depth + 1, defects, pattern, out);
            pattern.pop();
            if depth > 0 {
                pattern.push(b')');
                rec(n, t, depth - 1, defects, pattern, out);
                pattern.pop();
            }
            if depth == 0 && defects < t {
                pattern.push(b'|');
                rec(n, t, depth, defects + 1, pattern, out);
                pattern.pop();
            }
        }
        rec(n, t, 0, 0, &mut pattern, &mut out);
        out
    }
}

/// Through-strand counts n, n-2, ..., down to 0 or 1.
fn through_counts(n: usize) -> Vec<usize> {
    let mut t = n as i64;
    let mut out = Vec::new();
    while t >= 0 {
        out.push(t as usize);
        t -= 2;
    }
    out
}

/// The Temperley-Lieb datum TL_n(δ) over δ's field.
pub fn tl_datum(n: usize, delta: &Scalar) -> Result<CellDatum, CellError> {
    if !(1..=TL_MAX_N).contains(&n) {
        return Err(CellError::Bound(format!(
            "tl_datum accepts 1 <= n <= {TL_MAX_N}, got {n}"
        )));
    }
    let field = delta.field();
    let cells: Vec<Label> = through_counts(n)
        .iter()
        .map(|t| Label::new(t.to_string()))
        .collect();
    let poset = Poset::finite_from_leq("tl-through-counts", cells.clone(), |a, b| {
        let (a, b): (usize, usize) = (a.as_str().parse().unwrap(), b.as_str().parse().unwrap());
        a <= b
    })?;
    let mut tabs: HashMap<Label, Vec<Label>> = HashMap::new();
    for t in through_counts(n) {
        let list = HalfDiagram::enumerate(n, t)
            .into_iter()
            .map(|h| Label::new(h.label()))
            .collect();
        tabs.insert(Label::new(t.to_string()), list);
    }
    let tableaux: TableauxFn = {
        let tabs = tabs.clone();
        Arc::new(move |l: &Label| tabs.get(l).cloned())
    };
    let delta = delta.clone();
    let mult: MultFn = Arc::new(move |i: &BasisIndex, j: &BasisIndex| {
        let di = diagram_of(n, i)?;
        let dj = diagram_of(n, j)?;
        let (loops, composed) = di.compose(&dj);
        let (t, top, bottom) = composed.halves();
        let idx = BasisIndex::new(t.to_string(), top.label(), bottom.label());
        Ok(vec![(idx, delta.pow(loops as u64))])
    });
    let identity = "|".repeat(n);
    let unit = Some(vec![(
        BasisIndex::new(n.to_string(), identity.clone(), identity),
        field.one(),
    )]);
    Ok(CellDatum::new(
        format!("tl{n}"),
        field,
        poset,
        tableaux,
        mult,
        unit,
    ))
}

fn diagram_of(n: usize, idx: &BasisIndex) -> Result<TLDiagram, CellError> {
    let top = HalfDiagram::parse(n, idx.row.as_str())
        .ok_or_else(|| CellError::InvalidIndex(Box::new(idx.clone())))?;
    let bottom = HalfDiagram::parse(n, idx.col.as_str())
        .ok_or_else(|| CellError::InvalidIndex(Box::new(idx.clone())))?;
    Ok(TLDiagram::from_halves(&top, &bottom))
}

/// δ must live in the datum's field; kept separate from [`tl_datum`] only
/// to give CLI code a uniform error path.
pub fn check_delta(field: Field, delta: &Scalar) -> Result<(), CellError> {
    if delta.field() != field {
        return Err(FieldError::Mismatch(field, delta.field()).into());
    }
    Ok(())
}
