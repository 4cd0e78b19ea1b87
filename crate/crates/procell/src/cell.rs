//! Cell data: a poset of cells, tableau sets M(λ), a distinguished basis
//! C(λ; S, T), a multiplication oracle, and the involution sending
//! C(λ; S, T) to C(λ; T, S).
//!
//! The multiplication oracle is either an explicit table (finite instances,
//! JSON-loadable) or a callback (diagram composition, monomial
//! multiplication); infinite instances cannot ship tables. Axiom
//! verification is exhaustive on finite data rather than sampled, so a
//! passing report is a proof for the instance at hand.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::field::{Field, FieldError, Scalar};
use crate::matrix::{Matrix, MatrixError};
use crate::poset::{Label, Poset, PosetError};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum CellError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("unknown cell {0}")]
    UnknownCell(Label),
    #[error("invalid basis index {0}")]
    InvalidIndex(Box<BasisIndex>),
    #[error("elements belong to different cell data")]
    DatumMismatch,
    #[error("no product defined for {0} * {1}")]
    MissingProduct(Box<BasisIndex>, Box<BasisIndex>),
    #[error("structure constants at cell {cell} depend on the column: {witness}")]
    InconsistentColumns { cell: Label, witness: String },
    #[error("datum has no unit expansion")]
    NoUnit,
    #[error("instance bound exceeded: {0}")]
    Bound(String),
    #[error("operation requires a finite cell datum; quotient by a finite coideal first")]
    NotFinite,
}

/// Basis label (λ, S, T): cell λ with a pair of tableaux from M(λ).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BasisIndex {
    pub cell: Label,
    pub row: Label,
    pub col: Label,
}

impl BasisIndex {
    pub fn new(cell: impl Into<Label>, row: impl Into<Label>, col: impl Into<Label>) -> BasisIndex {
        BasisIndex {
            cell: cell.into(),
            row: row.into(),
            col: col.into(),
        }
    }

    /// Image under the involution: swap the tableau pair.
    pub fn transpose(&self) -> BasisIndex {
        BasisIndex {
            cell: self.cell.clone(),
            row: self.col.clone(),
            col: self.row.clone(),
        }
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C[{};{},{}]", self.cell, self.row, self.col)
    }
}

/// Finitely supported linear combination of basis indices.
///
/// Zero coefficients are never stored, so equality is structural.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Element {
    datum_id: u64,
    field: Field,
    terms: BTreeMap<BasisIndex, Scalar>,
}

impl Element {
    pub fn field(&self) -> Field {
        self.field
    }

    pub(crate) fn datum_id(&self) -> u64 {
        self.datum_id
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisIndex, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, idx: &BasisIndex) -> Scalar {
        self.terms
            .get(idx)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    fn check_datum(&self, other: &Element) -> Result<(), CellError> {
        if self.datum_id != other.datum_id {
            return Err(CellError::DatumMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Element) -> Result<Element, CellError> {
        self.check_datum(other)?;
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.add_term(idx.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Element) -> Result<Element, CellError> {
        self.add(&other.scale(&self.field.from_i64(-1))?)
    }

    pub fn scale(&self, k: &Scalar) -> Result<Element, CellError> {
        if k.is_zero() {
            return Ok(Element {
                datum_id: self.datum_id,
                field: self.field,
                terms: BTreeMap::new(),
            });
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.mul(k)?;
        }
        Ok(out)
    }

    fn add_term(&mut self, idx: BasisIndex, c: Scalar) -> Result<(), CellError> {
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.remove(&idx) {
            None => {
                self.terms.insert(idx, c);
            }
            Some(old) => {
                let sum = old.add(&c)?;
                if !sum.is_zero() {
                    self.terms.insert(idx, sum);
                }
            }
        }
        Ok(())
    }
}

/// Outcome of one axiom check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass,
    Fail { witness: String },
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CheckOutcome::Pass)
    }

    pub fn witness(&self) -> Option<&str> {
        match self {
            CheckOutcome::Pass => None,
            CheckOutcome::Fail { witness } => Some(witness),
        }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckOutcome::Pass => write!(f, "pass"),
            CheckOutcome::Fail { witness } => write!(f, "FAIL ({witness})"),
        }
    }
}

/// Per-axiom verification report.
///
/// `basis` covers well-formedness of the labelled basis, totality of the
/// multiplication oracle, and the unit law when a unit expansion is present.
/// `associativity` is checked explicitly because the table format does not
/// force it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub basis: CheckOutcome,
    pub involution: CheckOutcome,
    pub triangularity: CheckOutcome,
    pub associativity: CheckOutcome,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.basis.passed()
            && self.involution.passed()
            && self.triangularity.passed()
            && self.associativity.passed()
    }

    pub fn lines(&self) -> Vec<(&'static str, &CheckOutcome)> {
        vec![
            ("basis", &self.basis),
            ("involution", &self.involution),
            ("triangularity", &self.triangularity),
            ("associativity", &self.associativity),
        ]
    }
}

pub type TableauxFn = Arc<dyn Fn(&Label) -> Option<Vec<Label>> + Send + Sync>;
pub type MultFn =
    Arc<dyn Fn(&BasisIndex, &BasisIndex) -> Result<Vec<(BasisIndex, Scalar)>, CellError> + Send + Sync>;

static DATUM_IDS: AtomicU64 = AtomicU64::new(1);

struct CellDatumInner {
    id: u64,
    name: String,
    field: Field,
    poset: Poset,
    tableaux: TableauxFn,
    mult: MultFn,
    unit: Option<Vec<(BasisIndex, Scalar)>>,
}

/// Immutable cell datum handle; clones share the same underlying datum.
///
/// The unit is optional metadata: an instance may omit it, and operations
/// that need it fail cleanly.
#[derive(Clone)]
pub struct CellDatum(Arc<CellDatumInner>);

impl fmt::Debug for CellDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CellDatum({})", self.0.name)
    }
}

impl CellDatum {
    pub fn new(
        name: impl Into<String>,
        field: Field,
        poset: Poset,
        tableaux: TableauxFn,
        mult: MultFn,
        unit: Option<Vec<(BasisIndex, Scalar)>>,
    ) -> CellDatum {
        CellDatum(Arc::new(CellDatumInner {
            id: DATUM_IDS.fetch_add(1, Ordering::Relaxed),
            name: name.into(),
            field,
            poset,
            tableaux,
            mult,
            unit,
        }))
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn field(&self) -> Field {
        self.0.field
    }

    pub fn poset(&self) -> &Poset {
        &self.0.poset
    }

    pub fn is_finite(&self) -> bool {
        self.0.poset.is_finite()
    }

    /// Tableau set M(λ), in the instance's load order.
    pub fn tableaux(&self, cell: &Label) -> Result<Vec<Label>, CellError> {
        if !self.0.poset.contains(cell) {
            return Err(CellError::UnknownCell(cell.clone()));
        }
        (self.0.tableaux)(cell).ok_or_else(|| CellError::UnknownCell(cell.clone()))
    }

    /// Cells of a finite datum, in canonical order.
    pub fn cells(&self) -> Result<Vec<Label>, CellError> {
        Ok(self.0.poset.elements()?.to_vec())
    }

    /// Full basis of a finite datum: cells in order, then row-major tableau
    /// pairs.
    pub fn basis(&self) -> Result<Vec<BasisIndex>, CellError> {
        let mut out = Vec::new();
        for cell in self.cells()? {
            let tabs = self.tableaux(&cell)?;
            for s in &tabs {
                for t in &tabs {
                    out.push(BasisIndex {
                        cell: cell.clone(),
                        row: s.clone(),
                        col: t.clone(),
                    });
                }
            }
        }
        Ok(out)
    }

    pub fn dimension(&self) -> Result<usize, CellError> {
        Ok(self.basis()?.len())
    }

    fn check_index(&self, idx: &BasisIndex) -> Result<(), CellError> {
        let tabs = self.tableaux(&idx.cell)?;
        if tabs.contains(&idx.row) && tabs.contains(&idx.col) {
            Ok(())
        } else {
            Err(CellError::InvalidIndex(Box::new(idx.clone())))
        }
    }

    /// Checks that an index names an actual basis element of this datum.
    pub fn validate_index(&self, idx: &BasisIndex) -> Result<(), CellError> {
        self.check_index(idx)
    }

    pub fn zero(&self) -> Element {
        Element {
            datum_id: self.0.id,
            field: self.0.field,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis_element(&self, idx: &BasisIndex) -> Result<Element, CellError> {
        self.check_index(idx)?;
        let mut e = self.zero();
        e.add_term(idx.clone(), self.0.field.one())?;
        Ok(e)
    }

    pub fn element_from_terms<I>(&self, terms: I) -> Result<Element, CellError>
    where
        I: IntoIterator<Item = (BasisIndex, Scalar)>,
    {
        let mut e = self.zero();
        for (idx, c) in terms {
            self.check_index(&idx)?;
            if c.field() != self.0.field {
                return Err(FieldError::Mismatch(self.0.field, c.field()).into());
            }
            e.add_term(idx, c)?;
        }
        Ok(e)
    }

    /// The unit written in the basis, when the instance provides one.
    pub fn unit_element(&self) -> Result<Element, CellError> {
        let unit = self.0.unit.as_ref().ok_or(CellError::NoUnit)?;
        self.element_from_terms(unit.iter().cloned())
    }

    pub fn has_unit(&self) -> bool {
        self.0.unit.is_some()
    }

    /// Product of two basis elements via the oracle, normalized and
    /// validated.
    pub fn mult_basis(&self, i: &BasisIndex, j: &BasisIndex) -> Result<Element, CellError> {
        self.check_index(i)?;
        self.check_index(j)?;
        let raw = (self.0.mult)(i, j)?;
        let mut e = self.zero();
        for (idx, c) in raw {
            self.check_index(&idx)?;
            if c.field() != self.0.field {
                return Err(FieldError::Mismatch(self.0.field, c.field()).into());
            }
            e.add_term(idx, c)?;
        }
        Ok(e)
    }

    /// Bilinear extension of the basis multiplication oracle.
    pub fn multiply(&self, x: &Element, y: &Element) -> Result<Element, CellError> {
        if x.datum_id != self.0.id || y.datum_id != self.0.id {
            return Err(CellError::DatumMismatch);
        }
        let mut out = self.zero();
        for (bi, ci) in &x.terms {
            for (bj, cj) in &y.terms {
                let p = self.mult_basis(bi, bj)?;
                let k = ci.mul(cj)?;
                for (idx, c) in p.terms {
                    out.add_term(idx, c.mul(&k)?)?;
                }
            }
        }
        Ok(out)
    }

    /// The involution *: linear extension of C(λ; S, T) -> C(λ; T, S).
    pub fn involution(&self, x: &Element) -> Element {
        debug_assert_eq!(x.datum_id, self.0.id, "element from another datum");
        let mut out = self.zero();
        for (idx, c) in &x.terms {
            out.terms.insert(idx.transpose(), c.clone());
        }
        out
    }

    /// Deletes all coefficients on basis indices (μ, ...) with μ < λ,
    /// i.e. reduces modulo the span A(<λ).
    pub fn reduce_mod_lt(&self, x: &Element, cell: &Label) -> Result<Element, CellError> {
        if x.datum_id != self.0.id {
            return Err(CellError::DatumMismatch);
        }
        if !self.0.poset.contains(cell) {
            return Err(CellError::UnknownCell(cell.clone()));
        }
        let mut out = self.zero();
        for (idx, c) in &x.terms {
            if !self.0.poset.lt(&idx.cell, cell)? {
                out.terms.insert(idx.clone(), c.clone());
            }
        }
        Ok(out)
    }

    /// Membership in the span A(<λ) of all basis indices with cell
    /// strictly below λ: true iff nothing of the element survives
    /// reduction.
    pub fn in_lower_span(&self, x: &Element, cell: &Label) -> Result<bool, CellError> {
        Ok(self.reduce_mod_lt(x, cell)?.is_zero())
    }

    /// The matrix r_a(S', S) of a at cell λ, read off from a·C(λ; S, T) for
    /// the first column T and asserted equal for all other columns.
    /// Disagreement is surfaced as corruption, never averaged away.
    pub fn structure_constants(&self, a: &Element, cell: &Label) -> Result<Matrix, CellError> {
        if a.datum_id != self.0.id {
            return Err(CellError::DatumMismatch);
        }
        let tabs = self.tableaux(cell)?;
        let n = tabs.len();
        let extract = |t: &Label| -> Result<Matrix, CellError> {
            let mut m = Matrix::zeros(self.0.field, n, n);
            for (sj, s) in tabs.iter().enumerate() {
                let c_st = self.basis_element(&BasisIndex {
                    cell: cell.clone(),
                    row: s.clone(),
                    col: t.clone(),
                })?;
                let p = self.multiply(a, &c_st)?;
                for (si, s_prime) in tabs.iter().enumerate() {
                    let idx = BasisIndex {
                        cell: cell.clone(),
                        row: s_prime.clone(),
                        col: t.clone(),
                    };
                    m.set(si, sj, p.coeff(&idx));
                }
            }
            Ok(m)
        };
        let first = extract(&tabs[0])?;
        for t in &tabs[1..] {
            let other = extract(t)?;
            if other != first {
                return Err(CellError::InconsistentColumns {
                    cell: cell.clone(),
                    witness: format!("columns {} and {} disagree", tabs[0], t),
                });
            }
        }
        Ok(first)
    }

    /// Exhaustive axiom verification of a finite datum.
    pub fn verify(&self) -> Result<AxiomReport, CellError> {
        if !self.is_finite() {
            return Err(CellError::NotFinite);
        }
        let cells = self.cells()?;
        let skipped = || CheckOutcome::Fail {
            witness: "skipped: multiplication oracle unavailable".into(),
        };
        if let Err(witness) = self.verify_wellformed(&cells) {
            return Ok(AxiomReport {
                basis: CheckOutcome::Fail { witness },
                involution: skipped(),
                triangularity: skipped(),
                associativity: skipped(),
            });
        }
        let basis = self.basis()?;

        // totality: cache all pairwise products once; a failure here blocks
        // the remaining checks
        let n = basis.len();
        let pos: HashMap<BasisIndex, usize> =
            basis.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
        let mut products: Vec<Vec<Element>> = Vec::with_capacity(n);
        for i in &basis {
            let mut row = Vec::with_capacity(n);
            for j in &basis {
                match self.mult_basis(i, j) {
                    Ok(p) => row.push(p),
                    Err(e) => {
                        return Ok(AxiomReport {
                            basis: CheckOutcome::Fail {
                                witness: format!("product {i} * {j}: {e}"),
                            },
                            involution: skipped(),
                            triangularity: skipped(),
                            associativity: skipped(),
                        })
                    }
                }
            }
            products.push(row);
        }

        Ok(AxiomReport {
            basis: self.verify_unit_law(&basis),
            involution: self.verify_involution(&basis, &pos, &products),
            triangularity: self.verify_triangularity(&cells, &basis, &pos, &products)?,
            associativity: self.verify_associativity(&basis, &pos, &products)?,
        })
    }

    fn verify_wellformed(&self, cells: &[Label]) -> Result<(), String> {
        for cell in cells {
            let tabs = self
                .tableaux(cell)
                .map_err(|e| format!("cell {cell}: {e}"))?;
            if tabs.is_empty() {
                return Err(format!("cell {cell} has empty tableau set"));
            }
            let mut seen = std::collections::BTreeSet::new();
            for t in &tabs {
                if !seen.insert(t) {
                    return Err(format!("cell {cell} repeats tableau {t}"));
                }
            }
        }
        Ok(())
    }

    /// Unit law, when a unit expansion is shipped; part of basis
    /// well-formedness.
    fn verify_unit_law(&self, basis: &[BasisIndex]) -> CheckOutcome {
        if !self.has_unit() {
            return CheckOutcome::Pass;
        }
        let u = match self.unit_element() {
            Ok(u) => u,
            Err(e) => {
                return CheckOutcome::Fail {
                    witness: format!("unit expansion invalid: {e}"),
                }
            }
        };
        for b in basis {
            let eb = self.basis_element(b).expect("basis index is valid");
            match (self.multiply(&u, &eb), self.multiply(&eb, &u)) {
                (Ok(l), Ok(r)) => {
                    if l != eb || r != eb {
                        return CheckOutcome::Fail {
                            witness: format!("unit law fails at {b}"),
                        };
                    }
                }
                (Err(e), _) | (_, Err(e)) => {
                    return CheckOutcome::Fail {
                        witness: format!("unit product at {b}: {e}"),
                    }
                }
            }
        }
        CheckOutcome::Pass
    }

    fn verify_involution(
        &self,
        basis: &[BasisIndex],
        pos: &HashMap<BasisIndex, usize>,
        products: &[Vec<Element>],
    ) -> CheckOutcome {
        for (i, bi) in basis.iter().enumerate() {
            if bi.transpose().transpose() != *bi {
                return CheckOutcome::Fail {
                    witness: format!("involution not of order 2 at {bi}"),
                };
            }
            for (j, bj) in basis.iter().enumerate() {
                let lhs = self.involution(&products[i][j]);
                let ti = pos[&bi.transpose()];
                let tj = pos[&bj.transpose()];
                let rhs = &products[tj][ti];
                if lhs != *rhs {
                    return CheckOutcome::Fail {
                        witness: format!("({bi} * {bj})* != ({bj})* ({bi})*"),
                    };
                }
            }
        }
        CheckOutcome::Pass
    }

    fn verify_triangularity(
        &self,
        cells: &[Label],
        basis: &[BasisIndex],
        pos: &HashMap<BasisIndex, usize>,
        products: &[Vec<Element>],
    ) -> Result<CheckOutcome, CellError> {
        for (i, a) in basis.iter().enumerate() {
            for cell in cells {
                let tabs = self.tableaux(cell)?;
                // r-matrix per column; all columns must agree
                let mut first: Option<(Vec<Scalar>, &Label)> = None;
                for t in &tabs {
                    let mut r = Vec::with_capacity(tabs.len() * tabs.len());
                    for s in &tabs {
                        let idx = BasisIndex {
                            cell: cell.clone(),
                            row: s.clone(),
                            col: t.clone(),
                        };
                        let p = &products[i][pos[&idx]];
                        // every term must be strictly lower or (λ, S', T)
                        for (term, _) in p.terms() {
                            let lower = self.0.poset.lt(&term.cell, cell)?;
                            let level = term.cell == *cell && term.col == *t;
                            if !lower && !level {
                                return Ok(CheckOutcome::Fail {
                                    witness: format!(
                                        "{a} * {idx} has term at {term}, neither lower than {cell} nor on column {t}"
                                    ),
                                });
                            }
                        }
                        for s_prime in &tabs {
                            r.push(p.coeff(&BasisIndex {
                                cell: cell.clone(),
                                row: s_prime.clone(),
                                col: t.clone(),
                            }));
                        }
                    }
                    match &first {
                        None => first = Some((r, t)),
                        Some((r0, t0)) => {
                            if *r0 != r {
                                return Ok(CheckOutcome::Fail {
                                    witness: format!(
                                        "structure constants of {a} at cell {cell} differ between columns {t0} and {t}"
                                    ),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(CheckOutcome::Pass)
    }

    fn verify_associativity(
        &self,
        basis: &[BasisIndex],
        pos: &HashMap<BasisIndex, usize>,
        products: &[Vec<Element>],
    ) -> Result<CheckOutcome, CellError> {
        // multiply a cached product (an element) by a basis element on the
        // right/left, reusing the cache
        let by_basis_right = |x: &Element, k: usize| -> Result<Element, CellError> {
            let mut out = self.zero();
            for (b, c) in x.terms() {
                let p = &products[pos[b]][k];
                for (idx, d) in p.terms() {
                    out.add_term(idx.clone(), d.mul(c)?)?;
                }
            }
            Ok(out)
        };
        let by_basis_left = |i: usize, x: &Element| -> Result<Element, CellError> {
            let mut out = self.zero();
            for (b, c) in x.terms() {
                let p = &products[i][pos[b]];
                for (idx, d) in p.terms() {
                    out.add_term(idx.clone(), d.mul(c)?)?;
                }
            }
            Ok(out)
        };
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                for k in 0..basis.len() {
                    let left = by_basis_right(&products[i][j], k)?;
                    let right = by_basis_left(i, &products[j][k])?;
                    if left != right {
                        return Ok(CheckOutcome::Fail {
                            witness: format!(
                                "({} * {}) * {} != {} * ({} * {})",
                                basis[i], basis[j], basis[k], basis[i], basis[j], basis[k]
                            ),
                        });
                    }
                }
            }
        }
        Ok(CheckOutcome::Pass)
    }

    /// Renders an element deterministically, terms in canonical cell order.
    pub fn element_display(&self, x: &Element) -> String {
        if x.is_zero() {
            return "0".into();
        }
        let mut keyed: Vec<(u64, &BasisIndex, &Scalar)> = x
            .terms()
            .map(|(idx, c)| (self.0.poset.rank_of(&idx.cell).unwrap_or(u64::MAX), idx, c))
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)));
        let mut out = String::new();
        for (_, idx, c) in keyed {
            if !out.is_empty() {
                out.push_str(" + ");
            }
            if c.is_one() {
                out.push_str(&idx.to_string());
            } else {
                out.push_str(&format!("{c}*{idx}"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Hand-rolled two-cell datum: cells "lo" < "hi", both with singleton
    /// tableau sets; u = C[hi] acts as unit, e = C[lo] with e*e = 2e.
    fn toy() -> CellDatum {
        let field = Field::Rational;
        let poset = Poset::finite_from_covers(
            "toy",
            vec![Label::new("lo"), Label::new("hi")],
            &[(Label::new("lo"), Label::new("hi"))],
        )
        .unwrap();
        let tableaux: TableauxFn = Arc::new(|_: &Label| Some(vec![Label::new("s")]));
        let mult: MultFn = Arc::new(move |i: &BasisIndex, j: &BasisIndex| {
            let e = BasisIndex::new("lo", "s", "s");
            let one = Field::Rational.one();
            let two = Field::Rational.from_i64(2);
            Ok(match (i.cell.as_str(), j.cell.as_str()) {
                ("hi", "hi") => vec![(i.clone(), one)],
                ("hi", "lo") => vec![(e, one)],
                ("lo", "hi") => vec![(e, one)],
                ("lo", "lo") => vec![(e, two)],
            _ => unreachable!(),
            })
        });
        let unit = Some(vec![(BasisIndex::new("hi", "s", "s"), field.one())]);
        CellDatum::new("toy", field, poset, tableaux, mult, unit)
    }

    #[test]
    fn toy_datum_passes_all_axioms() {
        let d = toy();
        let report = d.verify().unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn unit_multiplies_trivially() {
        let d = toy();
        let u = d.unit_element().unwrap();
        for b in d.basis().unwrap() {
            let eb = d.basis_element(&b).unwrap();
            assert_eq!(d.multiply(&u, &eb).unwrap(), eb);
            assert_eq!(d.multiply(&eb, &u).unwrap(), eb);
        }
    }

    #[test]
    fn structure_constants_of_unit_is_identity() {
        let d = toy();
        let u = d.unit_element().unwrap();
        for cell in d.cells().unwrap() {
            let m = d.structure_constants(&u, &cell).unwrap();
            assert_eq!(m, Matrix::identity(Field::Rational, 1));
        }
    }

    #[test]
    fn reduce_mod_lt_drops_lower_cells() {
        let d = toy();
        let e = d.basis_element(&BasisIndex::new("lo", "s", "s")).unwrap();
        let u = d.basis_element(&BasisIndex::new("hi", "s", "s")).unwrap();
        let x = e.add(&u).unwrap();
        let hi = Label::new("hi");
        let reduced = d.reduce_mod_lt(&x, &hi).unwrap();
        assert_eq!(reduced, u);
        // λ is not < λ, so the cell's own level survives
        let lo = Label::new("lo");
        assert_eq!(d.reduce_mod_lt(&e, &lo).unwrap(), e);
    }

    #[test]
    fn involution_is_order_two() {
        let d = toy();
        let e = d.basis_element(&BasisIndex::new("lo", "s", "s")).unwrap();
        assert_eq!(d.involution(&d.involution(&e)), e);
    }

    #[test]
    fn element_display_is_ordered_by_cell_rank() {
        let d = toy();
        let e = d.basis_element(&BasisIndex::new("lo", "s", "s")).unwrap();
        let u = d.basis_element(&BasisIndex::new("hi", "s", "s")).unwrap();
        let two = Field::Rational.from_i64(2);
        let x = e.scale(&two).unwrap().add(&u).unwrap();
        assert_eq!(d.element_display(&x), "2*C[lo;s,s] + C[hi;s,s]");
        assert_eq!(d.element_display(&d.zero()), "0");
    }

    #[test]
    fn lower_span_membership_agrees_with_the_span() {
        let d = toy();
        let e = d.basis_element(&BasisIndex::new("lo", "s", "s")).unwrap();
        let u = d.basis_element(&BasisIndex::new("hi", "s", "s")).unwrap();
        let hi = Label::new("hi");
        assert!(d.in_lower_span(&e, &hi).unwrap());
        assert!(!d.in_lower_span(&u, &hi).unwrap());
        assert!(!d.in_lower_span(&e.add(&u).unwrap(), &hi).unwrap());
        assert!(d.in_lower_span(&d.zero(), &hi).unwrap());
    }

    #[test]
    fn datum_mismatch_detected() {
        let d1 = toy();
        let d2 = toy();
        let x = d1.basis_element(&BasisIndex::new("lo", "s", "s")).unwrap();
        let y = d2.basis_element(&BasisIndex::new("lo", "s", "s")).unwrap();
        assert!(matches!(d1.multiply(&x, &y), Err(CellError::DatumMismatch)));
        assert!(matches!(x.add(&y), Err(CellError::DatumMismatch)));
    }

    #[test]
    fn lower_span_absorbs_multiplication() {
        // reduce_mod_lt(a*m, λ) depends only on reduce_mod_lt(m, λ): adding
        // anything from the span below λ to m cannot change the reduction
        // of the product
        use crate::instances::tl::tl_datum;
        let delta = Field::Rational.from_i64(2);
        let d = tl_datum(3, &delta).unwrap();
        let basis = d.basis().unwrap();
        for cell in d.cells().unwrap() {
            let lower: Vec<&BasisIndex> = basis
                .iter()
                .filter(|b| d.poset().lt(&b.cell, &cell).unwrap())
                .collect();
            for a in &basis {
                let ea = d.basis_element(a).unwrap();
                for m in &basis {
                    let em = d.basis_element(m).unwrap();
                    let mut perturbed = em.clone();
                    for (k, low) in lower.iter().enumerate() {
                        let c = Field::Rational.from_i64(k as i64 + 1);
                        let noise = d.basis_element(low).unwrap().scale(&c).unwrap();
                        perturbed = perturbed.add(&noise).unwrap();
                    }
                    let p1 = d.reduce_mod_lt(&d.multiply(&ea, &em).unwrap(), &cell).unwrap();
                    let p2 = d
                        .reduce_mod_lt(&d.multiply(&ea, &perturbed).unwrap(), &cell)
                        .unwrap();
                    assert_eq!(p1, p2, "a = {a}, m = {m}, cell = {cell}");
                }
            }
        }
    }

    #[test]
    fn corrupted_product_fails_triangularity() {
        // same as toy() but e*e leaks a term at the higher cell, which
        // cannot appear in a * C[lo] modulo the span below lo
        let field = Field::Rational;
        let poset = Poset::finite_from_covers(
            "toy-bad",
            vec![Label::new("lo"), Label::new("hi")],
            &[(Label::new("lo"), Label::new("hi"))],
        )
        .unwrap();
        let tableaux: TableauxFn = Arc::new(|_: &Label| Some(vec![Label::new("s")]));
        let mult: MultFn = Arc::new(move |i: &BasisIndex, j: &BasisIndex| {
            let e = BasisIndex::new("lo", "s", "s");
            let u = BasisIndex::new("hi", "s", "s");
            let one = Field::Rational.one();
            Ok(match (i.cell.as_str(), j.cell.as_str()) {
                ("hi", "hi") => vec![(u, one)],
                ("hi", "lo") => vec![(e, one)],
                ("lo", "hi") => vec![(e, one)],
                ("lo", "lo") => vec![(u, one)], // corrupted: should be 2e
                _ => unreachable!(),
            })
        });
        let d = CellDatum::new("toy-bad", field, poset, tableaux, mult, None);
        let report = d.verify().unwrap();
        assert!(!report.passed());
        assert!(!report.triangularity.passed());
        assert!(report.triangularity.witness().is_some());
    }
}
