//! Cell modules, Gram forms, radicals, irreducible quotients and the
//! classification of a finite cell datum: the cells with nonvanishing Gram
//! form index the absolutely irreducible modules, with dim L(λ) the rank of
//! the form.
//!
//! Membership in that index set depends on the ground field through the
//! Gram form, and the Burnside span criterion used here certifies absolute
//! irreducibility over the given field.

use rayon::prelude::*;

use crate::cell::{BasisIndex, CellDatum, CellError};
use crate::field::Scalar;
use crate::matrix::{span_dimension, Matrix, MatrixError};
use crate::poset::Label;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Field(#[from] crate::field::FieldError),
    #[error("Gram probe pairs disagree at cell {cell}: {witness}")]
    InconsistentProbes { cell: Label, witness: String },
    #[error("module is zero")]
    ZeroModule,
    #[error("vector has length {got}, expected {want}")]
    VectorLength { got: usize, want: usize },
}

/// The cell module W(λ): basis M(λ) with the action of every algebra basis
/// element given through structure constants.
#[derive(Clone, Debug)]
pub struct CellModule {
    cell: Label,
    basis: Vec<Label>,
    /// (algebra basis element, its action matrix), in canonical basis order.
    action: Vec<(BasisIndex, Matrix)>,
}

impl CellModule {
    pub fn cell(&self) -> &Label {
        &self.cell
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Label] {
        &self.basis
    }

    pub fn action(&self) -> &[(BasisIndex, Matrix)] {
        &self.action
    }
}

/// Builds W(λ) over a finite datum, with action matrices for every algebra
/// basis element.
pub fn cell_module(d: &CellDatum, cell: &Label) -> Result<CellModule, RepError> {
    let tabs = d.tableaux(cell)?;
    let mut action = Vec::new();
    for b in d.basis()? {
        let a = d.basis_element(&b)?;
        let m = d.structure_constants(&a, cell)?;
        action.push((b, m));
    }
    Ok(CellModule {
        cell: cell.clone(),
        basis: tabs,
        action,
    })
}

/// The bilinear form of a cell, as a matrix over M(λ).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramForm {
    pub cell: Label,
    pub matrix: Matrix,
}

/// Extracts the Gram form: the coefficient of C(λ; S1, T2) in the product
/// C(λ; S1, T1) · C(λ; S2, T2), read off the FIRST probe pair (S1, T2) in
/// load order and asserted equal on all other probes. Disagreement is
/// corruption and is surfaced, not averaged away.
pub fn gram(d: &CellDatum, cell: &Label) -> Result<GramForm, RepError> {
    let tabs = d.tableaux(cell)?;
    let n = tabs.len();
    let extract = |s1: &Label, t2: &Label| -> Result<Matrix, RepError> {
        let mut m = Matrix::zeros(d.field(), n, n);
        for (i, t1) in tabs.iter().enumerate() {
            let left = d.basis_element(&BasisIndex {
                cell: cell.clone(),
                row: s1.clone(),
                col: t1.clone(),
            })?;
            for (j, s2) in tabs.iter().enumerate() {
                let right = d.basis_element(&BasisIndex {
                    cell: cell.clone(),
                    row: s2.clone(),
                    col: t2.clone(),
                })?;
                let p = d.multiply(&left, &right)?;
                m.set(
                    i,
                    j,
                    p.coeff(&BasisIndex {
                        cell: cell.clone(),
                        row: s1.clone(),
                        col: t2.clone(),
                    }),
                );
            }
        }
        Ok(m)
    };
    let first = extract(&tabs[0], &tabs[0])?;
    for s1 in &tabs {
        for t2 in &tabs {
            if s1 == &tabs[0] && t2 == &tabs[0] {
                continue;
            }
            let other = extract(s1, t2)?;
            if other != first {
                return Err(RepError::InconsistentProbes {
                    cell: cell.clone(),
                    witness: format!("probe ({s1}, {t2}) disagrees with ({}, {})", tabs[0], tabs[0]),
                });
            }
        }
    }
    Ok(GramForm {
        cell: cell.clone(),
        matrix: first,
    })
}

/// Radical and irreducible-quotient data of one cell.
#[derive(Clone, Debug)]
pub struct IrreducibleReport {
    pub cell: Label,
    pub gram: GramForm,
    pub rad_basis: Vec<Vec<Scalar>>,
    pub dim_w: usize,
    pub dim_l: usize,
    pub in_lambda0: bool,
}

pub fn irreducible_report(d: &CellDatum, cell: &Label) -> Result<IrreducibleReport, RepError> {
    let g = gram(d, cell)?;
    let dim_w = g.matrix.rows();
    let dim_l = g.matrix.rank();
    let rad_basis = g.matrix.nullspace();
    debug_assert_eq!(dim_l + rad_basis.len(), dim_w);
    Ok(IrreducibleReport {
        cell: cell.clone(),
        in_lambda0: !g.matrix.is_zero(),
        gram: g,
        rad_basis,
        dim_w,
        dim_l,
    })
}

/// True iff the span of `vs` is invariant under every action matrix.
pub fn submodule_check(m: &CellModule, vs: &[Vec<Scalar>]) -> Result<bool, RepError> {
    let dim = m.dim();
    for v in vs {
        if v.len() != dim {
            return Err(RepError::VectorLength {
                got: v.len(),
                want: dim,
            });
        }
    }
    if vs.is_empty() {
        return Ok(true);
    }
    let field = m.action[0].1.field();
    let base = Matrix::from_rows(field, vs.to_vec())?;
    let base_rank = base.rank();
    for (_, a) in &m.action {
        for v in vs {
            let w = a.mul_vec(v)?;
            let mut rows = vs.to_vec();
            rows.push(w);
            if Matrix::from_rows(field, rows)?.rank() != base_rank {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A finite-dimensional module given by the action matrices of the algebra
/// basis elements.
#[derive(Clone, Debug)]
pub struct ModuleAction {
    pub dim: usize,
    pub mats: Vec<(BasisIndex, Matrix)>,
}

/// Action of W(λ) itself.
pub fn module_action(m: &CellModule) -> ModuleAction {
    ModuleAction {
        dim: m.dim(),
        mats: m.action.clone(),
    }
}

/// Action induced on the quotient L(λ) = W(λ) / rad(λ).
///
/// Coordinates on the quotient are the free columns of the reduced
/// rad-basis matrix; vectors are reduced modulo the radical before reading
/// those coordinates off.
pub fn quotient_action(m: &CellModule, rad: &[Vec<Scalar>]) -> Result<ModuleAction, RepError> {
    let dim = m.dim();
    if rad.is_empty() {
        return Ok(module_action(m));
    }
    let field = m.action[0].1.field();
    let mut nmat = Matrix::from_rows(field, rad.to_vec())?;
    let pivots = nmat.rref();
    let is_pivot = {
        let mut v = vec![false; dim];
        for &c in &pivots {
            v[c] = true;
        }
        v
    };
    let free: Vec<usize> = (0..dim).filter(|&c| !is_pivot[c]).collect();
    #[allow(clippy::needless_range_loop)]
    let reduce = |v: &[Scalar]| -> Result<Vec<Scalar>, RepError> {
        let mut v = v.to_vec();
        for (row, &col) in pivots.iter().enumerate() {
            if v[col].is_zero() {
                continue;
            }
            let k = v[col].clone();
            for c in 0..dim {
                let d = nmat.at(row, c).mul(&k)?;
                v[c] = v[c].sub(&d)?;
            }
        }
        Ok(v)
    };
    let qdim = free.len();
    let mut mats = Vec::with_capacity(m.action.len());
    for (b, a) in &m.action {
        let mut q = Matrix::zeros(field, qdim, qdim);
        for (jq, &j) in free.iter().enumerate() {
            let mut e = vec![field.zero(); dim];
            e[j] = field.one();
            let w = reduce(&a.mul_vec(&e)?)?;
            for (iq, &i) in free.iter().enumerate() {
                q.set(iq, jq, w[i].clone());
            }
        }
        mats.push((b.clone(), q));
    }
    Ok(ModuleAction { dim: qdim, mats })
}

/// Burnside criterion: a nonzero module is absolutely irreducible iff its
/// action matrices span the full matrix space.
pub fn absolutely_irreducible(action: &ModuleAction) -> Result<bool, RepError> {
    if action.dim == 0 {
        return Err(RepError::ZeroModule);
    }
    let mats: Vec<Matrix> = action.mats.iter().map(|(_, m)| m.clone()).collect();
    Ok(span_dimension(&mats, action.dim)? == action.dim * action.dim)
}

/// One classification row.
#[derive(Clone, Debug)]
pub struct ClassRow {
    pub cell: Label,
    pub dim_w: usize,
    pub dim_l: usize,
    pub in_lambda0: bool,
    /// dim plus the traces of the L(λ)-action of each algebra basis
    /// element; distinct fingerprints certify pairwise non-isomorphism.
    pub fingerprint: Option<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub rows: Vec<ClassRow>,
    /// Set when two cells in Λ₀ share a fingerprint, in which case the
    /// non-isomorphism certificate is inconclusive.
    pub fingerprint_collision: bool,
}

impl Classification {
    pub fn lambda0(&self) -> Vec<Label> {
        self.rows
            .iter()
            .filter(|r| r.in_lambda0)
            .map(|r| r.cell.clone())
            .collect()
    }
}

/// Classifies a finite datum: per-cell dim W, dim L, Λ₀ membership, and a
/// trace fingerprint certifying pairwise non-isomorphism of the simples.
pub fn classify(d: &CellDatum) -> Result<Classification, RepError> {
    let cells = d.cells()?;
    let rows: Vec<ClassRow> = cells
        .par_iter()
        .map(|cell| -> Result<ClassRow, RepError> {
            let rep = irreducible_report(d, cell)?;
            let fingerprint = if rep.in_lambda0 {
                let m = cell_module(d, cell)?;
                let q = quotient_action(&m, &rep.rad_basis)?;
                let mut fp = vec![format!("dim={}", q.dim)];
                for (_, a) in &q.mats {
                    fp.push(a.trace()?.to_string());
                }
                Some(fp)
            } else {
                None
            };
            Ok(ClassRow {
                cell: cell.clone(),
                dim_w: rep.dim_w,
                dim_l: rep.dim_l,
                in_lambda0: rep.in_lambda0,
                fingerprint,
            })
        })
        .collect::<Result<_, RepError>>()?;
    let mut prints: Vec<&Vec<String>> = rows.iter().filter_map(|r| r.fingerprint.as_ref()).collect();
    prints.sort();
    let fingerprint_collision = prints.windows(2).any(|w| w[0] == w[1]);
    Ok(Classification {
        rows,
        fingerprint_collision,
    })
}
