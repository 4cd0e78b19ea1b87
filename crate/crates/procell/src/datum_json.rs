//! JSON interchange format for finite cell data.
//!
//! A datum file carries the field descriptor, the poset (elements plus
//! covering relations `[a, b]` meaning a < b; the transitive closure is
//! computed on load), the tableau sets, the multiplication table as triples
//! `(i, j, [(k, scalar), ...])` over the canonical basis enumeration, and an
//! optional unit expansion. Scalar strings are bit-exact (`num/den` over the
//! rationals, a decimal residue over F_p). The involution is implied by
//! index transposition and is not stored.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::cell::{BasisIndex, CellDatum, CellError, MultFn, TableauxFn};
use crate::field::{Field, FieldError, Scalar};
use crate::poset::{Label, Poset, PosetError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(thiserror::Error, Debug)]
pub enum DatumError {
    #[error("json parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0}, expected {SCHEMA_VERSION}")]
    Schema(u32),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error("product entry ({i}, {j}): {message}")]
    BadEntry { i: usize, j: usize, message: String },
    #[error("basis index {0} out of range (dimension {1})")]
    IndexRange(usize, usize),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PosetBlock {
    pub elements: Vec<String>,
    /// Covering relations [a, b] with a < b.
    pub covers: Vec<(String, String)>,
}

/// One multiplication-table row: basis positions (i, j) and the product's
/// terms as (position, scalar string) pairs.
pub type ProductEntry = (usize, usize, Vec<(usize, String)>);

/// Serialized form of a finite cell datum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatumFile {
    pub schema: u32,
    pub name: String,
    pub field: String,
    pub poset: PosetBlock,
    pub tableaux: BTreeMap<String, Vec<String>>,
    pub products: Vec<ProductEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<Vec<(usize, String)>>,
}

impl DatumFile {
    pub fn from_json(s: &str) -> Result<DatumFile, DatumError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("datum file serializes")
    }
}

/// Canonical basis enumeration of a finite datum: cells in poset order,
/// tableau pairs row-major.
fn enumerate_basis(
    elements: &[Label],
    tableaux: &HashMap<Label, Vec<Label>>,
) -> Vec<BasisIndex> {
    let mut out = Vec::new();
    for cell in elements {
        if let Some(tabs) = tableaux.get(cell) {
            for s in tabs {
                for t in tabs {
                    out.push(BasisIndex {
                        cell: cell.clone(),
                        row: s.clone(),
                        col: t.clone(),
                    });
                }
            }
        }
    }
    out
}

/// Builds a table-backed cell datum from its serialized form.
pub fn load(file: &DatumFile) -> Result<CellDatum, DatumError> {
    if file.schema != SCHEMA_VERSION {
        return Err(DatumError::Schema(file.schema));
    }
    let field = Field::parse(&file.field)?;
    let elements: Vec<Label> = file.poset.elements.iter().map(Label::new).collect();
    let covers: Vec<(Label, Label)> = file
        .poset
        .covers
        .iter()
        .map(|(a, b)| (Label::new(a.clone()), Label::new(b.clone())))
        .collect();
    let poset = Poset::finite_from_covers(file.name.clone(), elements.clone(), &covers)?;
    let tabs: HashMap<Label, Vec<Label>> = file
        .tableaux
        .iter()
        .map(|(cell, list)| {
            (
                Label::new(cell.clone()),
                list.iter().map(Label::new).collect(),
            )
        })
        .collect();
    let basis = enumerate_basis(&elements, &tabs);
    let dim = basis.len();
    let mut table: HashMap<(usize, usize), Vec<(BasisIndex, Scalar)>> = HashMap::new();
    for (i, j, entry) in &file.products {
        if *i >= dim || *j >= dim {
            return Err(DatumError::IndexRange((*i).max(*j), dim));
        }
        let mut terms = Vec::with_capacity(entry.len());
        for (k, scalar) in entry {
            if *k >= dim {
                return Err(DatumError::IndexRange(*k, dim));
            }
            let c = field.parse_scalar(scalar).map_err(|e| DatumError::BadEntry {
                i: *i,
                j: *j,
                message: e.to_string(),
            })?;
            terms.push((basis[*k].clone(), c));
        }
        table.insert((*i, *j), terms);
    }
    let positions: HashMap<BasisIndex, usize> = basis
        .iter()
        .enumerate()
        .map(|(n, b)| (b.clone(), n))
        .collect();
    let tableaux_fn: TableauxFn = {
        let tabs = tabs.clone();
        std::sync::Arc::new(move |l: &Label| tabs.get(l).cloned())
    };
    let mult: MultFn = std::sync::Arc::new(move |i: &BasisIndex, j: &BasisIndex| {
        let (pi, pj) = match (positions.get(i), positions.get(j)) {
            (Some(&pi), Some(&pj)) => (pi, pj),
            _ => return Err(CellError::InvalidIndex(Box::new(i.clone()))),
        };
        table
            .get(&(pi, pj))
            .cloned()
            .ok_or_else(|| CellError::MissingProduct(Box::new(i.clone()), Box::new(j.clone())))
    });
    let unit = match &file.unit {
        None => None,
        Some(entries) => {
            let mut terms = Vec::with_capacity(entries.len());
            for (k, scalar) in entries {
                if *k >= dim {
                    return Err(DatumError::IndexRange(*k, dim));
                }
                let c = field.parse_scalar(scalar).map_err(|e| DatumError::BadEntry {
                    i: *k,
                    j: *k,
                    message: format!("unit: {e}"),
                })?;
                terms.push((basis[*k].clone(), c));
            }
            Some(terms)
        }
    };
    Ok(CellDatum::new(
        file.name.clone(),
        field,
        poset,
        tableaux_fn,
        mult,
        unit,
    ))
}

pub fn load_str(s: &str) -> Result<CellDatum, DatumError> {
    load(&DatumFile::from_json(s)?)
}

/// Serializes a finite datum by evaluating the multiplication oracle on all
/// basis pairs. Round-trips bit-exactly through scalar strings.
pub fn save(d: &CellDatum) -> Result<DatumFile, DatumError> {
    let cells = d.cells()?;
    let mut tabs_map = BTreeMap::new();
    let mut tabs_lookup: HashMap<Label, Vec<Label>> = HashMap::new();
    for cell in &cells {
        let tabs = d.tableaux(cell)?;
        tabs_map.insert(
            cell.as_str().to_string(),
            tabs.iter().map(|t| t.as_str().to_string()).collect(),
        );
        tabs_lookup.insert(cell.clone(), tabs);
    }
    let basis = enumerate_basis(&cells, &tabs_lookup);
    let positions: HashMap<BasisIndex, usize> = basis
        .iter()
        .enumerate()
        .map(|(n, b)| (b.clone(), n))
        .collect();
    let mut products = Vec::with_capacity(basis.len() * basis.len());
    for (i, bi) in basis.iter().enumerate() {
        for (j, bj) in basis.iter().enumerate() {
            let p = d.mult_basis(bi, bj)?;
            let entry: Vec<(usize, String)> = p
                .terms()
                .map(|(idx, c)| (positions[idx], c.to_string()))
                .collect();
            products.push((i, j, entry));
        }
    }
    // covering relations: a < b with nothing strictly between
    let mut covers = Vec::new();
    for a in &cells {
        for b in &cells {
            if !d.poset().lt(a, b)? {
                continue;
            }
            let mut is_cover = true;
            for c in &cells {
                if d.poset().lt(a, c)? && d.poset().lt(c, b)? {
                    is_cover = false;
                    break;
                }
            }
            if is_cover {
                covers.push((a.as_str().to_string(), b.as_str().to_string()));
            }
        }
    }
    let unit = if d.has_unit() {
        let u = d.unit_element()?;
        Some(
            u.terms()
                .map(|(idx, c)| (positions[idx], c.to_string()))
                .collect(),
        )
    } else {
        None
    };
    Ok(DatumFile {
        schema: SCHEMA_VERSION,
        name: d.name().to_string(),
        field: d.field().to_string(),
        poset: PosetBlock {
            elements: cells.iter().map(|c| c.as_str().to_string()).collect(),
            covers,
        },
        tableaux: tabs_map,
        products,
        unit,
    })
}
