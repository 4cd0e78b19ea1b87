//! The type-A tableau tower: shapes with fewer than n nonzero rows,
//! ordered by dominance with the MORE dominant shape LOWER, carrying
//! semistandard tableau sets with entries from {1, ..., n}.
//!
//! This instance ships label-level data only: the poset, the tableau sets,
//! and the column-removal maps that describe how connecting maps act on
//! basis labels. No multiplication table is invented for it, so it feeds
//! the coideal/profinite machinery and the label-map coherence tests, not
//! the Gram pipeline.

use std::sync::Arc;

use crate::cell::CellError;
use crate::poset::{Label, Poset, UpsetOutcome};

use super::ssyt::{enumerate_ssyt, Partition, Tableau};

/// Largest n accepted by [`tableau_tower`].
pub const TOWER_MAX_N: u32 = 6;

/// Outcome of removing the leftmost column from a pair of tableaux.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ColumnRemoval {
    Removed(Tableau, Tableau),
    Zero,
}

/// Label-level effect of the connecting maps: if both tableaux have a first
/// column of full height n, delete it from each; otherwise the pair maps to
/// zero.
pub fn column_removal(s: &Tableau, t: &Tableau, n: u32) -> Result<ColumnRemoval, CellError> {
    if s.shape() != t.shape() {
        return Err(CellError::Bound(format!(
            "shape mismatch: {} vs {}",
            s.shape().label(),
            t.shape().label()
        )));
    }
    if s.rows().len() != n as usize {
        return Ok(ColumnRemoval::Zero);
    }
    let strip = |tab: &Tableau| -> Result<Tableau, CellError> {
        let rows: Vec<Vec<u32>> = tab
            .rows()
            .iter()
            .filter(|r| r.len() > 1)
            .map(|r| r[1..].to_vec())
            .collect();
        Tableau::new(rows)
    };
    Ok(ColumnRemoval::Removed(strip(s)?, strip(t)?))
}

/// The tableau tower for a fixed n: a lazy profinite-type poset of shapes
/// plus the map λ -> M(λ).
#[derive(Clone)]
pub struct TableauTower {
    n: u32,
    poset: Poset,
}

fn parse_shape(l: &Label, n: u32) -> Option<Partition> {
    let p = Partition::parse(l.as_str()).ok()?;
    // canonical label form and fewer than n nonzero rows
    if p.label() != *l || p.rows() >= n as usize {
        return None;
    }
    Some(p)
}

fn shapes_of_size(size: u64, n: u32) -> Vec<Partition> {
    Partition::enumerate(size, n as usize - 1)
}

/// Builds the lazily-enumerated shape poset for sl_n weights: `a <= b`
/// means a dominates b, so the principal coideal of a shape is the finite
/// set of equal-size shapes it dominates.
pub fn tableau_tower(n: u32) -> Result<TableauTower, CellError> {
    if !(2..=TOWER_MAX_N).contains(&n) {
        return Err(CellError::Bound(format!(
            "tableau_tower accepts 2 <= n <= {TOWER_MAX_N}, got {n}"
        )));
    }
    let contains = Arc::new(move |l: &Label| parse_shape(l, n).is_some());
    let leq = Arc::new(move |a: &Label, b: &Label| {
        let pa = parse_shape(a, n).expect("checked by contains");
        let pb = parse_shape(b, n).expect("checked by contains");
        pa.dominates(&pb)
    });
    let upset = Arc::new(move |a: &Label, cap: usize| {
        let pa = parse_shape(a, n).expect("checked by contains");
        let mut out = Vec::new();
        for q in shapes_of_size(pa.size(), n) {
            if pa.dominates(&q) {
                if out.len() == cap {
                    return UpsetOutcome::Exceeded;
                }
                out.push(q.label());
            }
        }
        UpsetOutcome::Finite(out)
    });
    let rank = Arc::new(move |l: &Label| {
        let p = parse_shape(l, n).expect("checked by contains");
        let idx = shapes_of_size(p.size(), n)
            .iter()
            .position(|q| *q == p)
            .expect("shape is in its own size class") as u64;
        p.size() * 1_000_000 + idx
    });
    let sample = Arc::new(move |k: usize| {
        let mut out = Vec::new();
        let mut size = 0u64;
        while out.len() < k {
            for q in shapes_of_size(size, n) {
                out.push(q.label());
                if out.len() == k {
                    break;
                }
            }
            size += 1;
        }
        out
    });
    let poset = Poset::lazy(format!("tableau-tower-{n}"), contains, leq, upset, rank, sample);
    Ok(TableauTower { n, poset })
}

impl TableauTower {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    /// The tableau set M(λ) for a shape in the tower.
    pub fn tableaux(&self, shape: &Partition) -> Result<Vec<Tableau>, CellError> {
        if !self.poset.contains(&shape.label()) {
            return Err(CellError::UnknownCell(shape.label()));
        }
        enumerate_ssyt(shape, self.n)
    }

    /// Label-level connecting map on a basis pair of the tower.
    pub fn connecting_label_map(
        &self,
        s: &Tableau,
        t: &Tableau,
    ) -> Result<ColumnRemoval, CellError> {
        column_removal(s, t, self.n)
    }
}
