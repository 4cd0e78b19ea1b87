//! The polynomial algebra R\[x\] as a cell datum of profinite type: cells are
//! the naturals with the REVERSE of the usual order, every tableau set is a
//! singleton, the basis element of cell k is the monomial x^k, and the
//! involution is the identity.
//!
//! Finite-dimensional cellular theory fails on this instance (only the cell
//! 0 carries a nonzero Gram form), which is exactly what makes it the
//! canonical regression datum for the completion machinery: the completed
//! algebra is the power series ring and its unique smooth simple sits at 0.

use std::sync::Arc;

use crate::cell::{BasisIndex, CellDatum, MultFn, TableauxFn};
use crate::completion::{Completion, CompletionError};
use crate::field::Field;
use crate::poset::{Label, Poset, UpsetOutcome, DEFAULT_UPSET_CAP};

/// Tableau label used for every singleton M(λ).
pub const POLY_TAB: &str = "s";

fn exponent(l: &Label) -> Option<u64> {
    let s = l.as_str();
    if s.is_empty() || (s.len() > 1 && s.starts_with('0')) {
        return None; // canonical decimal form only
    }
    s.parse().ok()
}

/// Lazy poset of naturals ordered by the reverse of the usual order:
/// a <= b here means a >= b as integers, so ⟨k⟩ = {0, 1, ..., k}.
pub fn reversed_naturals() -> Poset {
    let contains = Arc::new(|l: &Label| exponent(l).is_some());
    let leq = Arc::new(|a: &Label, b: &Label| {
        exponent(a).expect("checked by contains") >= exponent(b).expect("checked by contains")
    });
    let upset = Arc::new(|a: &Label, cap: usize| {
        let k = exponent(a).expect("checked by contains");
        if (k + 1) as usize > cap {
            return UpsetOutcome::Exceeded;
        }
        UpsetOutcome::Finite((0..=k).map(|i| Label::new(i.to_string())).collect())
    });
    let rank = Arc::new(|l: &Label| exponent(l).expect("checked by contains"));
    let sample = Arc::new(|k: usize| (0..k as u64).map(|i| Label::new(i.to_string())).collect());
    Poset::lazy("naturals-reversed", contains, leq, upset, rank, sample)
}

/// The profinite-type polynomial datum over `field`.
///
/// The multiplication oracle adds exponents; truncations are obtained with
/// [`crate::completion::quotient`] and behave as truncated polynomial rings.
pub fn poly_datum(field: Field) -> CellDatum {
    let poset = reversed_naturals();
    let tableaux: TableauxFn = Arc::new(|l: &Label| {
        exponent(l).map(|_| vec![Label::new(POLY_TAB)])
    });
    let mult: MultFn = Arc::new(move |i: &BasisIndex, j: &BasisIndex| {
        let a = exponent(&i.cell).expect("validated index");
        let b = exponent(&j.cell).expect("validated index");
        let idx = BasisIndex::new((a + b).to_string(), POLY_TAB, POLY_TAB);
        Ok(vec![(idx, field.one())])
    });
    let unit = Some(vec![(BasisIndex::new("0", POLY_TAB, POLY_TAB), field.one())]);
    CellDatum::new("poly", field, poset, tableaux, mult, unit)
}

/// Basis index of the monomial x^k.
pub fn monomial(k: u64) -> BasisIndex {
    BasisIndex::new(k.to_string(), POLY_TAB, POLY_TAB)
}

/// The completed polynomial datum with its named generators registered:
/// `geometric` (the all-ones oracle, i.e. the formal geometric series) in
/// addition to the built-in `delta` (the unit).
pub fn poly_completion(field: Field, seed: u64) -> Result<Completion, CompletionError> {
    let d = poly_datum(field);
    let c = Completion::new_seeded(&d, 16, DEFAULT_UPSET_CAP, seed)?;
    let ones = c.from_oracle(Arc::new(move |_: &BasisIndex| field.one()));
    c.register_generator("geometric", ones);
    Ok(c)
}
