//! Finite-coideal quotients A_P, connecting epimorphisms ψ, the procellular
//! completion realized through coefficient oracles, its ideal topology, and
//! the smooth-module classification.
//!
//! Elements of the completion are coefficient oracles, not streams: global
//! equality of two oracles is only semi-decidable, so the API exposes
//! equality AT a finite coideal (`equal_mod`) and never global equality.
//! Oracles are required to be terminating procedures, which realizes a
//! computable subring of the full completion.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, RwLock};

use crate::cell::{BasisIndex, CellDatum, CellError, Element, MultFn, TableauxFn};
use crate::field::Scalar;
use crate::matrix::Matrix;
use crate::poset::{Coideal, Label, Poset, PosetError};
use crate::rep::{cell_module, gram, RepError};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum CompletionError {
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("coideal does not belong to the datum's poset")]
    ForeignCoideal,
    #[error("connecting map requires nested coideals (source must contain target)")]
    NotNested,
    #[error("datum is not of profinite type: {0}")]
    NotProfinite(String),
    #[error("module spec carries no tail promise; smoothness is undecidable")]
    NoTailPromise,
    #[error("element has no known finite support")]
    UnknownSupport,
    #[error("unknown completion generator {0:?}")]
    UnknownGenerator(String),
}

/// The finite-dimensional cellular quotient A_P of a datum by the ideal
/// spanned by all basis elements with cell outside the finite coideal P.
#[derive(Clone)]
pub struct QuotientAlgebra {
    parent: CellDatum,
    coideal: Coideal,
    datum: CellDatum,
}

impl fmt::Debug for QuotientAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuotientAlgebra({} mod {:?})", self.parent.name(), self.coideal)
    }
}

impl QuotientAlgebra {
    pub fn parent(&self) -> &CellDatum {
        &self.parent
    }

    pub fn coideal(&self) -> &Coideal {
        &self.coideal
    }

    /// The inherited finite cell datum.
    pub fn datum(&self) -> &CellDatum {
        &self.datum
    }

    /// ψ_P on a parent element: kills every coefficient with cell outside P.
    pub fn project_parent(&self, x: &Element) -> Result<Element, CompletionError> {
        if x.datum_id() != self.parent.id() {
            return Err(CellError::DatumMismatch.into());
        }
        let terms: Vec<(BasisIndex, Scalar)> = x
            .terms()
            .filter(|(idx, _)| self.coideal.contains(&idx.cell))
            .map(|(idx, c)| (idx.clone(), c.clone()))
            .collect();
        Ok(self.datum.element_from_terms(terms)?)
    }
}

/// Builds the quotient A_P with its inherited cell datum.
///
/// P = ∅ is allowed and yields the zero algebra.
pub fn quotient(d: &CellDatum, p: &Coideal) -> Result<QuotientAlgebra, CompletionError> {
    if !p.poset().same(d.poset()) {
        return Err(CompletionError::ForeignCoideal);
    }
    let members = p.members_in_order()?;
    let member_set: BTreeSet<Label> = p.members().clone();
    let parent_poset = d.poset().clone();
    let poset = Poset::finite_from_leq(
        format!("{}-restricted", parent_poset.name()),
        members,
        |a, b| parent_poset.leq(a, b).expect("members are elements"),
    )?;
    let parent = d.clone();
    let tableaux: TableauxFn = {
        let parent = parent.clone();
        let member_set = member_set.clone();
        Arc::new(move |l: &Label| {
            if member_set.contains(l) {
                parent.tableaux(l).ok()
            } else {
                None
            }
        })
    };
    let mult: MultFn = {
        let parent = parent.clone();
        let member_set = member_set.clone();
        Arc::new(move |i: &BasisIndex, j: &BasisIndex| {
            let p = parent.mult_basis(i, j)?;
            Ok(p.terms()
                .filter(|(idx, _)| member_set.contains(&idx.cell))
                .map(|(idx, c)| (idx.clone(), c.clone()))
                .collect())
        })
    };
    let unit = if d.has_unit() {
        let u = d.unit_element()?;
        Some(
            u.terms()
                .filter(|(idx, _)| member_set.contains(&idx.cell))
                .map(|(idx, c)| (idx.clone(), c.clone()))
                .collect(),
        )
    } else {
        None
    };
    let datum = CellDatum::new(
        format!("{}-mod-{}", d.name(), member_set.len()),
        d.field(),
        poset,
        tableaux,
        mult,
        unit,
    );
    Ok(QuotientAlgebra {
        parent: d.clone(),
        coideal: p.clone(),
        datum,
    })
}

/// The connecting epimorphism ψ from A_{P1} onto A_{P2} for nested finite
/// coideals P1 ⊇ P2: basis elements with cell in P2 map to themselves,
/// everything else to zero.
pub struct ConnectingMap {
    source: QuotientAlgebra,
    target: QuotientAlgebra,
}

impl ConnectingMap {
    pub fn source(&self) -> &QuotientAlgebra {
        &self.source
    }

    pub fn target(&self) -> &QuotientAlgebra {
        &self.target
    }

    pub fn apply(&self, x: &Element) -> Result<Element, CompletionError> {
        if x.datum_id() != self.source.datum.id() {
            return Err(CellError::DatumMismatch.into());
        }
        let terms: Vec<(BasisIndex, Scalar)> = x
            .terms()
            .filter(|(idx, _)| self.target.coideal.contains(&idx.cell))
            .map(|(idx, c)| (idx.clone(), c.clone()))
            .collect();
        Ok(self.target.datum.element_from_terms(terms)?)
    }
}

/// Builds the connecting map and verifies on every basis pair of the source
/// that it is an algebra homomorphism.
pub fn connecting_map(
    q1: &QuotientAlgebra,
    q2: &QuotientAlgebra,
) -> Result<ConnectingMap, CompletionError> {
    if q1.parent.id() != q2.parent.id() {
        return Err(CompletionError::ForeignCoideal);
    }
    if !q2.coideal.is_subset(&q1.coideal) {
        return Err(CompletionError::NotNested);
    }
    let map = ConnectingMap {
        source: q1.clone(),
        target: q2.clone(),
    };
    let basis = q1.datum.basis()?;
    for i in &basis {
        for j in &basis {
            let xy = q1.datum.mult_basis(i, j)?;
            let lhs = map.apply(&xy)?;
            let xi = map.apply(&q1.datum.basis_element(i)?)?;
            let xj = map.apply(&q1.datum.basis_element(j)?)?;
            let rhs = q2.datum.multiply(&xi, &xj)?;
            if lhs != rhs {
                return Err(CompletionError::NotProfinite(format!(
                    "connecting map is not a homomorphism at {i} * {j}"
                )));
            }
        }
    }
    Ok(map)
}

type OracleFn = Arc<dyn Fn(&BasisIndex) -> Scalar + Send + Sync>;

struct CompletionInner {
    datum: CellDatum,
    cap: usize,
    quotients: Mutex<HashMap<BTreeSet<Label>, QuotientAlgebra>>,
    generators: RwLock<HashMap<String, CompletionElement>>,
}

/// Handle to the procellular completion of a profinite-type datum.
///
/// Construction is gated by a profinite check on a sample of the poset;
/// finite data are trivially complete and always pass. Quotient algebras
/// are memoized per coideal behind a lock invisible to callers.
#[derive(Clone)]
pub struct Completion {
    inner: Arc<CompletionInner>,
}

impl fmt::Debug for Completion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Completion({})", self.inner.datum.name())
    }
}

impl Completion {
    /// Gates on the profinite-type condition: lazily-enumerated posets are
    /// spot-checked on `sample_size` elements (all principal coideals must
    /// stay under `cap`).
    pub fn new(datum: &CellDatum, sample_size: usize, cap: usize) -> Result<Completion, CompletionError> {
        Completion::new_seeded(datum, sample_size, cap, 0)
    }

    /// Like [`Completion::new`] with an explicit seed for the sampled
    /// order-axiom spot checks.
    pub fn new_seeded(
        datum: &CellDatum,
        sample_size: usize,
        cap: usize,
        seed: u64,
    ) -> Result<Completion, CompletionError> {
        if !datum.is_finite() {
            datum
                .poset()
                .spot_check_axioms(seed, sample_size.max(8))
                .map_err(|e| CompletionError::NotProfinite(e.to_string()))?;
            let sample = datum.poset().sample(sample_size.max(1));
            let report = datum.poset().profinite_check(&sample, cap)?;
            if !report.all_finite() {
                let bad = report
                    .entries
                    .iter()
                    .find(|(_, s)| !matches!(s, crate::poset::UpsetStatus::Finite(_)))
                    .map(|(l, _)| l.to_string())
                    .unwrap_or_default();
                return Err(CompletionError::NotProfinite(format!(
                    "principal coideal of {bad} exceeded cap {cap}"
                )));
            }
        }
        Ok(Completion {
            inner: Arc::new(CompletionInner {
                datum: datum.clone(),
                cap,
                quotients: Mutex::new(HashMap::new()),
                generators: RwLock::new(HashMap::new()),
            }),
        })
    }

    pub fn datum(&self) -> &CellDatum {
        &self.inner.datum
    }

    /// The principal coideal ⟨λ⟩ of a cell.
    pub fn principal(&self, cell: &Label) -> Result<Coideal, CompletionError> {
        Ok(self.inner.datum.poset().coideal(std::slice::from_ref(cell), self.inner.cap)?)
    }

    /// Memoized quotient at a finite coideal.
    pub fn quotient_at(&self, p: &Coideal) -> Result<QuotientAlgebra, CompletionError> {
        {
            let cache = self.inner.quotients.lock().expect("poisoned quotient cache");
            if let Some(q) = cache.get(p.members()) {
                return Ok(q.clone());
            }
        }
        let q = quotient(&self.inner.datum, p)?;
        let mut cache = self.inner.quotients.lock().expect("poisoned quotient cache");
        Ok(cache.entry(p.members().clone()).or_insert(q).clone())
    }

    /// The zero element (empty formal sum).
    pub fn zero(&self) -> CompletionElement {
        let field = self.inner.datum.field();
        CompletionElement {
            completion: self.clone(),
            oracle: Arc::new(move |_| field.zero()),
            support: Some(BTreeMap::new()),
        }
    }

    /// Embeds a finitely supported element (the canonical dense embedding of
    /// the original algebra into its completion).
    pub fn embed(&self, terms: &[(BasisIndex, Scalar)]) -> Result<CompletionElement, CompletionError> {
        let mut support: BTreeMap<BasisIndex, Scalar> = BTreeMap::new();
        let field = self.inner.datum.field();
        for (idx, c) in terms {
            self.inner.datum.validate_index(idx)?;
            if c.field() != field {
                return Err(CellError::from(crate::field::FieldError::Mismatch(field, c.field())).into());
            }
            let entry = support.remove(idx).unwrap_or_else(|| field.zero());
            let sum = entry.add(c).map_err(CellError::from)?;
            if !sum.is_zero() {
                support.insert(idx.clone(), sum);
            }
        }
        Ok(Self::from_support(self.clone(), support))
    }

    fn from_support(completion: Completion, support: BTreeMap<BasisIndex, Scalar>) -> CompletionElement {
        let field = completion.inner.datum.field();
        let map = support.clone();
        CompletionElement {
            completion,
            oracle: Arc::new(move |idx| map.get(idx).cloned().unwrap_or_else(|| field.zero())),
            support: Some(support),
        }
    }

    /// Wraps an arbitrary total coefficient oracle.
    pub fn from_oracle(&self, oracle: OracleFn) -> CompletionElement {
        CompletionElement {
            completion: self.clone(),
            oracle,
            support: None,
        }
    }

    /// Registers a named generator for the CLI and serialization surface.
    pub fn register_generator(&self, name: impl Into<String>, e: CompletionElement) {
        self.inner
            .generators
            .write()
            .expect("poisoned generator registry")
            .insert(name.into(), e);
    }

    /// Looks up a named generator. `delta` (the unit) is built in for data
    /// that carry a unit expansion.
    pub fn generator(&self, name: &str) -> Result<CompletionElement, CompletionError> {
        if name == "delta" {
            if self.inner.datum.has_unit() {
                let u = self.inner.datum.unit_element()?;
                let terms: Vec<(BasisIndex, Scalar)> =
                    u.terms().map(|(i, c)| (i.clone(), c.clone())).collect();
                return self.embed(&terms);
            }
            return Err(CompletionError::UnknownGenerator(name.into()));
        }
        self.inner
            .generators
            .read()
            .expect("poisoned generator registry")
            .get(name)
            .cloned()
            .ok_or_else(|| CompletionError::UnknownGenerator(name.into()))
    }
}

/// An element of the completion: a total coefficient oracle on basis labels,
/// observable only through finite-coideal projections.
#[derive(Clone)]
pub struct CompletionElement {
    completion: Completion,
    oracle: OracleFn,
    /// Known finite support, when the element was built from one.
    support: Option<BTreeMap<BasisIndex, Scalar>>,
}

impl fmt::Debug for CompletionElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.support {
            Some(s) => write!(f, "CompletionElement(finite support, {} terms)", s.len()),
            None => write!(f, "CompletionElement(oracle)"),
        }
    }
}

impl CompletionElement {
    pub fn completion(&self) -> &Completion {
        &self.completion
    }

    /// Coefficient at one basis label.
    pub fn coeff(&self, idx: &BasisIndex) -> Result<Scalar, CompletionError> {
        self.completion.inner.datum.validate_index(idx)?;
        Ok((self.oracle)(idx))
    }

    /// Known finite support, if any.
    pub fn known_support(&self) -> Option<&BTreeMap<BasisIndex, Scalar>> {
        self.support.as_ref()
    }

    /// Projection into A_P: the finite sum of oracle coefficients over the
    /// basis labels with cell in P.
    pub fn project(&self, p: &Coideal) -> Result<Element, CompletionError> {
        let q = self.completion.quotient_at(p)?;
        self.project_in(&q)
    }

    /// Projection into an already-built quotient.
    pub fn project_in(&self, q: &QuotientAlgebra) -> Result<Element, CompletionError> {
        let mut terms = Vec::new();
        for cell in q.coideal.members() {
            for s in q.parent().tableaux(cell)? {
                for t in q.parent().tableaux(cell)? {
                    let idx = BasisIndex {
                        cell: cell.clone(),
                        row: s.clone(),
                        col: t.clone(),
                    };
                    let c = (self.oracle)(&idx);
                    if !c.is_zero() {
                        terms.push((idx, c));
                    }
                }
            }
        }
        Ok(q.datum.element_from_terms(terms)?)
    }

    pub fn add(&self, other: &CompletionElement) -> CompletionElement {
        let (a, b) = (self.oracle.clone(), other.oracle.clone());
        let support = match (&self.support, &other.support) {
            (Some(x), Some(y)) => {
                let mut s = x.clone();
                for (idx, c) in y {
                    let field = c.field();
                    let entry = s.remove(idx).unwrap_or_else(|| field.zero());
                    let sum = entry.add(c).expect("same field");
                    if !sum.is_zero() {
                        s.insert(idx.clone(), sum);
                    }
                }
                Some(s)
            }
            _ => None,
        };
        CompletionElement {
            completion: self.completion.clone(),
            oracle: Arc::new(move |idx| a(idx).add(&b(idx)).expect("same field")),
            support,
        }
    }

    pub fn neg(&self) -> CompletionElement {
        let a = self.oracle.clone();
        CompletionElement {
            completion: self.completion.clone(),
            oracle: Arc::new(move |idx| a(idx).neg()),
            support: self
                .support
                .as_ref()
                .map(|s| s.iter().map(|(i, c)| (i.clone(), c.neg())).collect()),
        }
    }

    pub fn sub(&self, other: &CompletionElement) -> CompletionElement {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Scalar) -> CompletionElement {
        let a = self.oracle.clone();
        let k2 = k.clone();
        let support = if k.is_zero() {
            Some(BTreeMap::new())
        } else {
            self.support.as_ref().map(|s| {
                s.iter()
                    .map(|(i, c)| (i.clone(), c.mul(&k2).expect("same field")))
                    .collect()
            })
        };
        let k = k.clone();
        CompletionElement {
            completion: self.completion.clone(),
            oracle: Arc::new(move |idx| a(idx).mul(&k).expect("same field")),
            support,
        }
    }

    /// Product in the completion. The coefficient of (λ, S, T) is read from
    /// the product of the two projections computed in A_⟨λ⟩ — the minimal
    /// sufficient window; compatibility of the connecting maps makes any
    /// containing window give the same answer.
    pub fn mul(&self, other: &CompletionElement) -> CompletionElement {
        let left = self.clone();
        let right = other.clone();
        let completion = self.completion.clone();
        let zero_support = matches!(&self.support, Some(s) if s.is_empty())
            || matches!(&other.support, Some(s) if s.is_empty());
        let comp2 = completion.clone();
        let oracle: OracleFn = Arc::new(move |idx: &BasisIndex| {
            let p = comp2
                .principal(&idx.cell)
                .expect("profinite-type datum was gated at construction");
            let q = comp2.quotient_at(&p).expect("quotient of principal coideal");
            let x = left.project_in(&q).expect("projection is finite");
            let y = right.project_in(&q).expect("projection is finite");
            let prod = q.datum.multiply(&x, &y).expect("quotient multiplication");
            prod.coeff(idx)
        });
        CompletionElement {
            completion,
            oracle,
            support: if zero_support { Some(BTreeMap::new()) } else { None },
        }
    }

    /// The involution of the completion: transposes every basis label.
    pub fn hat_involution(&self) -> CompletionElement {
        let a = self.oracle.clone();
        CompletionElement {
            completion: self.completion.clone(),
            oracle: Arc::new(move |idx| a(&idx.transpose())),
            support: self
                .support
                .as_ref()
                .map(|s| s.iter().map(|(i, c)| (i.transpose(), c.clone())).collect()),
        }
    }

    /// Membership in the open ideal of P: true iff the projection to A_P
    /// vanishes.
    pub fn in_ideal(&self, p: &Coideal) -> Result<bool, CompletionError> {
        Ok(self.project(p)?.is_zero())
    }

    /// Equality at a finite coideal; global equality of oracles is not
    /// decidable and is deliberately not offered.
    pub fn equal_mod(&self, other: &CompletionElement, p: &Coideal) -> Result<bool, CompletionError> {
        Ok(self.project(p)? == other.project(p)?)
    }

    /// The finite-support element agreeing with this one on P and vanishing
    /// outside; the constructive witness for density of the embedded
    /// algebra.
    pub fn truncation(&self, p: &Coideal) -> Result<CompletionElement, CompletionError> {
        let projected = self.project(p)?;
        let terms: Vec<(BasisIndex, Scalar)> = projected
            .terms()
            .map(|(i, c)| (i.clone(), c.clone()))
            .collect();
        self.completion.embed(&terms)
    }

    /// For a nonzero finite-support element, a principal coideal ⟨λ⟩ whose
    /// ideal does NOT contain it: the separation witness of the Hausdorff
    /// property. Returns None for the zero element.
    pub fn separation_witness(&self) -> Result<Option<Coideal>, CompletionError> {
        let support = self.support.as_ref().ok_or(CompletionError::UnknownSupport)?;
        match support.keys().next() {
            None => Ok(None),
            Some(idx) => Ok(Some(self.completion.principal(&idx.cell)?)),
        }
    }
}

/// Tail behaviour promised by a module spec: all basis labels with cell
/// outside the named coideal act as zero.
#[derive(Clone, Debug)]
pub enum TailPromise {
    ZeroOutside(Coideal),
    Unspecified,
}

/// A finite-dimensional module over the completion, given by the action of
/// parent basis labels plus a tail promise.
#[derive(Clone)]
pub struct ModuleSpec {
    pub dim: usize,
    pub action: Arc<dyn Fn(&BasisIndex) -> Matrix + Send + Sync>,
    pub tail: TailPromise,
}

/// Decides smoothness of a finite-dimensional module spec: smooth iff the
/// kernel contains the ideal of some finite coideal, i.e. iff all labels
/// outside it act as zero. The promise is verified on `halo` labels outside
/// the promised coideal rather than trusted blindly.
pub fn smooth_check(
    completion: &Completion,
    spec: &ModuleSpec,
    halo: usize,
) -> Result<bool, CompletionError> {
    let p = match &spec.tail {
        TailPromise::Unspecified => return Err(CompletionError::NoTailPromise),
        TailPromise::ZeroOutside(p) => p,
    };
    if spec.dim == 0 {
        return Ok(true);
    }
    let datum = completion.datum();
    let mut want = (p.len() + halo).max(1);
    let mut outside: Vec<Label> = loop {
        let sample = datum.poset().sample(want);
        let got: Vec<Label> = sample.into_iter().filter(|l| !p.contains(l)).collect();
        if got.len() >= halo || datum.is_finite() {
            break got;
        }
        want *= 2;
    };
    outside.truncate(halo);
    for cell in &outside {
        let tabs = datum.tableaux(cell)?;
        for s in &tabs {
            for t in &tabs {
                let idx = BasisIndex {
                    cell: cell.clone(),
                    row: s.clone(),
                    col: t.clone(),
                };
                if !(spec.action)(&idx).is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The cell module of the completion at λ: the cell module of A_⟨λ⟩ pulled
/// back through ψ_⟨λ⟩, so every label outside ⟨λ⟩ acts as zero.
pub fn cell_module_hat(
    completion: &Completion,
    cell: &Label,
) -> Result<ModuleSpec, CompletionError> {
    let p = completion.principal(cell)?;
    let q = completion.quotient_at(&p)?;
    let m = cell_module(q.datum(), cell)?;
    let dim = m.dim();
    let field = completion.datum().field();
    let table: HashMap<BasisIndex, Matrix> = m
        .action()
        .iter()
        .map(|(b, mat)| (b.clone(), mat.clone()))
        .collect();
    let action = Arc::new(move |idx: &BasisIndex| {
        table
            .get(idx)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(field, dim, dim))
    });
    Ok(ModuleSpec {
        dim,
        action,
        tail: TailPromise::ZeroOutside(p),
    })
}

/// Classification of smooth simples within a working window: the cells of
/// the bound whose Gram form (computed in A_bound) is nonzero, paired with
/// the rank of the form.
pub fn smooth_classify(
    completion: &Completion,
    bound: &Coideal,
) -> Result<Vec<(Label, usize)>, CompletionError> {
    let q = completion.quotient_at(bound)?;
    let mut out = Vec::new();
    for cell in bound.members_in_order()? {
        let g = gram(q.datum(), &cell)?;
        let rank = g.matrix.rank();
        if rank > 0 {
            out.push((cell, rank));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::instances::poly::{monomial, poly_datum, POLY_TAB};
    use crate::instances::tl::tl_datum;
    use crate::poset::DEFAULT_UPSET_CAP;

    fn poly_completion() -> Completion {
        crate::instances::poly::poly_completion(Field::Rational, 0).unwrap()
    }

    fn nth_coideal(c: &Completion, k: u64) -> Coideal {
        c.datum()
            .poset()
            .coideal(&[Label::new(k.to_string())], DEFAULT_UPSET_CAP)
            .unwrap()
    }

    #[test]
    fn quotient_of_poly_is_truncated_polynomials() {
        let c = poly_completion();
        let p = nth_coideal(&c, 2);
        let q = c.quotient_at(&p).unwrap();
        assert_eq!(q.datum().dimension().unwrap(), 3);
        let x = q.datum().basis_element(&monomial(1)).unwrap();
        let x2 = q.datum().basis_element(&monomial(2)).unwrap();
        assert!(q.datum().multiply(&x, &x2).unwrap().is_zero());
        assert!(q.datum().verify().unwrap().passed());
    }

    #[test]
    fn structure_constants_of_x_vanish_at_every_cell() {
        // x * x^k = x^(k+1) lies below cell k under the reversed order, so
        // the 1x1 structure-constant matrix of x at cell k is zero
        let c = poly_completion();
        for k in 0..=3u64 {
            let q = c.quotient_at(&nth_coideal(&c, 2 * k + 2)).unwrap();
            let x = q.datum().basis_element(&monomial(1)).unwrap();
            let m = q
                .datum()
                .structure_constants(&x, &Label::new(k.to_string()))
                .unwrap();
            assert_eq!(m, Matrix::zeros(Field::Rational, 1, 1), "cell {k}");
        }
    }

    #[test]
    fn reduce_mod_lt_on_the_lazy_datum() {
        // 3 > 1 as naturals means cell 3 sits below cell 1 in the reversed
        // order, so x^3 reduces to zero modulo the span below cell 1
        let d = poly_datum(Field::Rational);
        let x3 = d.basis_element(&monomial(3)).unwrap();
        assert!(d.reduce_mod_lt(&x3, &Label::new("1")).unwrap().is_zero());
        assert_eq!(d.reduce_mod_lt(&x3, &Label::new("3")).unwrap(), x3);
    }

    #[test]
    fn quotient_by_everything_or_nothing() {
        let delta = Field::Rational.from_i64(2);
        let d = tl_datum(3, &delta).unwrap();
        let full = Coideal::from_members(
            d.poset(),
            d.poset().elements().unwrap().iter().cloned().collect(),
        )
        .unwrap();
        let q = quotient(&d, &full).unwrap();
        assert_eq!(q.datum().dimension().unwrap(), d.dimension().unwrap());
        // identical products on all basis pairs
        for i in d.basis().unwrap() {
            for j in d.basis().unwrap() {
                let a = d.mult_basis(&i, &j).unwrap();
                let b = q.datum().mult_basis(&i, &j).unwrap();
                let a_terms: Vec<_> = a.terms().map(|(x, c)| (x.clone(), c.clone())).collect();
                let b_terms: Vec<_> = b.terms().map(|(x, c)| (x.clone(), c.clone())).collect();
                assert_eq!(a_terms, b_terms);
            }
        }
        let empty = Coideal::empty(d.poset());
        let qz = quotient(&d, &empty).unwrap();
        assert_eq!(qz.datum().dimension().unwrap(), 0);
    }

    #[test]
    fn connecting_map_on_poly_quotients() {
        let c = poly_completion();
        let q3 = c.quotient_at(&nth_coideal(&c, 3)).unwrap();
        let q1 = c.quotient_at(&nth_coideal(&c, 1)).unwrap();
        // verified on all 16 basis pairs of the 4-dimensional source
        let psi = connecting_map(&q3, &q1).unwrap();
        // basis element with cell in the target survives
        let x = q3.datum().basis_element(&monomial(1)).unwrap();
        assert_eq!(psi.apply(&x).unwrap(), q1.datum().basis_element(&monomial(1)).unwrap());
        // basis element with cell outside dies
        let x3 = q3.datum().basis_element(&monomial(3)).unwrap();
        assert!(psi.apply(&x3).unwrap().is_zero());
        // non-nested coideals are rejected
        assert!(matches!(
            connecting_map(&q1, &q3),
            Err(CompletionError::NotNested)
        ));
    }

    #[test]
    fn psi_factorization_through_quotients() {
        // ψ_{P1,P2} ∘ ψ_{P1} = ψ_{P2} on parent basis elements
        let c = poly_completion();
        let d = c.datum().clone();
        let q4 = c.quotient_at(&nth_coideal(&c, 4)).unwrap();
        let q2 = c.quotient_at(&nth_coideal(&c, 2)).unwrap();
        let psi = connecting_map(&q4, &q2).unwrap();
        for k in 0..8 {
            let b = d.basis_element(&monomial(k)).unwrap();
            let via = psi.apply(&q4.project_parent(&b).unwrap()).unwrap();
            let direct = q2.project_parent(&b).unwrap();
            assert_eq!(via, direct, "x^{k}");
        }
    }

    #[test]
    fn geometric_projection_reads_off_coefficients() {
        let c = poly_completion();
        let g = c.generator("geometric").unwrap();
        let p2 = nth_coideal(&c, 2);
        let proj = g.project(&p2).unwrap();
        assert_eq!(proj.support_len(), 3); // 1 + x + x^2
        for k in 0..=2 {
            assert!(proj.coeff(&monomial(k)).is_one());
        }
        // embedded finite elements project to their own truncation
        let one = Field::Rational.one();
        let e = c
            .embed(&[(monomial(1), one.clone()), (monomial(4), one.clone())])
            .unwrap();
        let proj = e.project(&p2).unwrap();
        assert_eq!(proj.support_len(), 1);
        assert!(proj.coeff(&monomial(1)).is_one());
        // the zero oracle projects to zero
        assert!(c.zero().project(&p2).unwrap().is_zero());
    }

    #[test]
    fn one_minus_x_inverts_geometric_series() {
        let c = poly_completion();
        let g = c.generator("geometric").unwrap();
        let f = Field::Rational;
        let one_minus_x = c
            .embed(&[(monomial(0), f.one()), (monomial(1), f.from_i64(-1))])
            .unwrap();
        let prod = one_minus_x.mul(&g);
        let unit = c.generator("delta").unwrap();
        for k in 0..=5 {
            let p = nth_coideal(&c, k);
            assert!(prod.equal_mod(&unit, &p).unwrap(), "window {k}");
        }
    }

    #[test]
    fn unit_is_neutral_at_every_truncation() {
        let c = poly_completion();
        let unit = c.generator("delta").unwrap();
        let g = c.generator("geometric").unwrap();
        for k in 0..=4 {
            let p = nth_coideal(&c, k);
            assert!(unit.mul(&g).equal_mod(&g, &p).unwrap());
            assert!(g.mul(&unit).equal_mod(&g, &p).unwrap());
        }
    }

    #[test]
    fn hat_involution_properties() {
        let c = poly_completion();
        let g = c.generator("geometric").unwrap();
        // the poly involution is the identity on labels, so involution
        // fixes every coefficient; applying it twice is always the identity
        for k in 0..6 {
            assert_eq!(
                g.hat_involution().coeff(&monomial(k)).unwrap(),
                g.coeff(&monomial(k)).unwrap()
            );
        }
        let two = Field::Rational.from_i64(2);
        let e = c.embed(&[(monomial(2), two)]).unwrap();
        let twice = e.hat_involution().hat_involution();
        for k in 0..6 {
            assert_eq!(twice.coeff(&monomial(k)).unwrap(), e.coeff(&monomial(k)).unwrap());
        }
    }

    #[test]
    fn involution_transposes_asymmetric_support() {
        // a TL-style element with asymmetric support transposes
        let delta = Field::Rational.from_i64(2);
        let d = tl_datum(3, &delta).unwrap();
        let c = Completion::new(&d, 4, DEFAULT_UPSET_CAP).unwrap();
        let idx = BasisIndex::new("1", "()|", "|()");
        let e = c.embed(&[(idx.clone(), Field::Rational.one())]).unwrap();
        let star = e.hat_involution();
        assert!(star.coeff(&idx).unwrap().is_zero());
        assert!(star.coeff(&idx.transpose()).unwrap().is_one());
    }

    #[test]
    fn involution_is_an_anti_automorphism_at_truncations() {
        use rand::{Rng, SeedableRng};
        let c = poly_completion();
        let f = Field::Rational;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut random = || {
            let mut terms = Vec::new();
            for k in 0..=6u64 {
                let v = rng.gen_range(-2i64..=2);
                if v != 0 {
                    terms.push((monomial(k), f.from_i64(v)));
                }
            }
            c.embed(&terms).unwrap()
        };
        for _ in 0..10 {
            let e1 = random();
            let e2 = random();
            let lhs = e1.mul(&e2).hat_involution();
            let rhs = e2.hat_involution().mul(&e1.hat_involution());
            for k in 0..=4u64 {
                assert!(lhs.equal_mod(&rhs, &nth_coideal(&c, k)).unwrap(), "window {k}");
            }
        }
    }

    #[test]
    fn projections_are_compatible_across_nested_coideals() {
        // ψ_{P1,P2}(project(e, P1)) = project(e, P2) for P1 ⊇ P2
        let c = poly_completion();
        let g = c.generator("geometric").unwrap();
        let e = c
            .embed(&[(monomial(2), Field::Rational.from_i64(5))])
            .unwrap();
        for big in 2..=5u64 {
            for small in 0..=big {
                let q_big = c.quotient_at(&nth_coideal(&c, big)).unwrap();
                let q_small = c.quotient_at(&nth_coideal(&c, small)).unwrap();
                let psi = connecting_map(&q_big, &q_small).unwrap();
                for x in [&g, &e] {
                    let via = psi.apply(&x.project_in(&q_big).unwrap()).unwrap();
                    let direct = x.project_in(&q_small).unwrap();
                    assert_eq!(via, direct);
                }
            }
        }
    }

    #[test]
    fn ideal_membership() {
        let c = poly_completion();
        let g = c.generator("geometric").unwrap();
        let p2 = nth_coideal(&c, 2);
        // a single nonzero coefficient at λ separates from zero at ⟨λ⟩
        let e = c.embed(&[(monomial(3), Field::Rational.one())]).unwrap();
        let p3 = nth_coideal(&c, 3);
        assert!(!e.in_ideal(&p3).unwrap());
        assert!(e.in_ideal(&p2).unwrap()); // x^3 vanishes in A_⟨2⟩
        assert!(c.zero().in_ideal(&p3).unwrap());
        // geometric minus its ⟨2⟩-truncation lies in the ⟨2⟩-ideal
        let t = g.truncation(&p2).unwrap();
        assert!(g.sub(&t).in_ideal(&p2).unwrap());
        assert!(!g.sub(&t).in_ideal(&nth_coideal(&c, 4)).unwrap());
    }

    #[test]
    fn involution_fixes_ideals_setwise() {
        // membership in the ideal of P is insensitive to the involution,
        // which is what makes the involution a homeomorphism
        let delta = Field::Rational.from_i64(2);
        let d = tl_datum(3, &delta).unwrap();
        let c = Completion::new(&d, 4, DEFAULT_UPSET_CAP).unwrap();
        let p = d.poset().coideal(&[Label::new("3")], 10).unwrap();
        let asym = c
            .embed(&[(BasisIndex::new("1", "()|", "|()"), Field::Rational.one())])
            .unwrap();
        let sym = c
            .embed(&[(
                BasisIndex::new("3", "|||", "|||"),
                Field::Rational.from_i64(4),
            )])
            .unwrap();
        for e in [&asym, &sym] {
            assert_eq!(
                e.in_ideal(&p).unwrap(),
                e.hat_involution().in_ideal(&p).unwrap()
            );
        }
        assert!(asym.in_ideal(&p).unwrap());
        assert!(!sym.in_ideal(&p).unwrap());
    }

    #[test]
    fn separation_witness_for_finite_support() {
        let c = poly_completion();
        let e = c
            .embed(&[(monomial(5), Field::Rational.from_i64(7))])
            .unwrap();
        let w = e.separation_witness().unwrap().expect("nonzero element");
        assert!(!e.in_ideal(&w).unwrap());
        assert!(c.zero().separation_witness().unwrap().is_none());
        let g = c.generator("geometric").unwrap();
        assert!(matches!(
            g.separation_witness(),
            Err(CompletionError::UnknownSupport)
        ));
    }

    #[test]
    fn smooth_check_on_pulled_back_cell_modules() {
        let c = poly_completion();
        let spec = cell_module_hat(&c, &Label::new("3")).unwrap();
        assert_eq!(spec.dim, 1);
        assert!(smooth_check(&c, &spec, 8).unwrap());
    }

    #[test]
    fn evaluation_at_one_is_not_smooth() {
        let c = poly_completion();
        let f = Field::Rational;
        // 1-dimensional module where every monomial acts as 1
        let action = Arc::new(move |_: &BasisIndex| Matrix::from_i64(f, &[&[1]]));
        let spec = ModuleSpec {
            dim: 1,
            action,
            tail: TailPromise::ZeroOutside(nth_coideal(&c, 4)),
        };
        assert!(!smooth_check(&c, &spec, 8).unwrap());
    }

    #[test]
    fn zero_module_is_smooth_and_missing_promise_errors() {
        let c = poly_completion();
        let f = Field::Rational;
        let zero_action = Arc::new(move |_: &BasisIndex| Matrix::zeros(f, 0, 0));
        let spec = ModuleSpec {
            dim: 0,
            action: zero_action.clone(),
            tail: TailPromise::ZeroOutside(nth_coideal(&c, 0)),
        };
        assert!(smooth_check(&c, &spec, 4).unwrap());
        let spec = ModuleSpec {
            dim: 1,
            action: Arc::new(move |_| Matrix::zeros(f, 1, 1)),
            tail: TailPromise::Unspecified,
        };
        assert!(matches!(
            smooth_check(&c, &spec, 4),
            Err(CompletionError::NoTailPromise)
        ));
    }

    #[test]
    fn smooth_classification_of_poly() {
        let c = poly_completion();
        let out = smooth_classify(&c, &nth_coideal(&c, 6)).unwrap();
        assert_eq!(out, vec![(Label::new("0"), 1)]);
    }

    #[test]
    fn smooth_classification_of_finite_datum_matches_classify() {
        for dv in [0i64, 1, 2] {
            let delta = Field::Rational.from_i64(dv);
            let d = tl_datum(3, &delta).unwrap();
            let c = Completion::new(&d, 4, DEFAULT_UPSET_CAP).unwrap();
            let full = Coideal::from_members(
                d.poset(),
                d.poset().elements().unwrap().iter().cloned().collect(),
            )
            .unwrap();
            let smooth = smooth_classify(&c, &full).unwrap();
            let classification = crate::rep::classify(&d).unwrap();
            let want: Vec<(Label, usize)> = classification
                .rows
                .iter()
                .filter(|r| r.in_lambda0)
                .map(|r| (r.cell.clone(), r.dim_l))
                .collect();
            assert_eq!(smooth, want, "delta = {dv}");
        }
    }

    #[test]
    fn toy_tower_shaped_datum_smooth_classification() {
        // a two-cell datum over dominance-ordered shape labels with a
        // TL_2-style table: u = C[(1,1)] is the unit, e = C[(2)] with
        // e*e = δe; (2) dominates (1,1) so (2) sits lower
        use crate::cell::{MultFn, TableauxFn};
        let f = Field::Rational;
        for dv in [0i64, 2] {
            let delta = f.from_i64(dv);
            let poset = Poset::finite_from_leq(
                "shapes-of-2",
                vec![Label::new("(2)"), Label::new("(1,1)")],
                |a, b| {
                    let pa = crate::instances::ssyt::Partition::parse(a.as_str()).unwrap();
                    let pb = crate::instances::ssyt::Partition::parse(b.as_str()).unwrap();
                    pa.dominates(&pb)
                },
            )
            .unwrap();
            let tableaux: TableauxFn = Arc::new(|_: &Label| Some(vec![Label::new("t")]));
            let delta2 = delta.clone();
            let mult: MultFn = Arc::new(move |i: &BasisIndex, j: &BasisIndex| {
                let e = BasisIndex::new("(2)", "t", "t");
                let one = Field::Rational.one();
                Ok(match (i.cell.as_str(), j.cell.as_str()) {
                    ("(1,1)", "(1,1)") => vec![(i.clone(), one)],
                    ("(1,1)", "(2)") | ("(2)", "(1,1)") => vec![(e, one)],
                    ("(2)", "(2)") => vec![(e, delta2.clone())],
                    _ => unreachable!(),
                })
            });
            let unit = Some(vec![(BasisIndex::new("(1,1)", "t", "t"), f.one())]);
            let d = CellDatum::new("toy-tower", f, poset, tableaux, mult, unit);
            assert!(d.verify().unwrap().passed());
            let c = Completion::new(&d, 2, DEFAULT_UPSET_CAP).unwrap();
            let bound = Coideal::from_members(
                d.poset(),
                d.poset().elements().unwrap().iter().cloned().collect(),
            )
            .unwrap();
            let smooth = smooth_classify(&c, &bound).unwrap();
            // per-cell Gram ranks computed directly
            let mut want = Vec::new();
            for cell in d.cells().unwrap() {
                let g = gram(&d, &cell).unwrap();
                if g.matrix.rank() > 0 {
                    want.push((cell, g.matrix.rank()));
                }
            }
            assert_eq!(smooth, want, "delta = {dv}");
            if dv == 0 {
                assert_eq!(smooth, vec![(Label::new("(1,1)"), 1)]);
            } else {
                assert_eq!(smooth.len(), 2);
            }
        }
    }

    #[test]
    fn gram_is_insensitive_to_the_truncation_window() {
        let c = poly_completion();
        for cell_k in 0..4u64 {
            let cell = Label::new(cell_k.to_string());
            let mut forms = Vec::new();
            for window in cell_k..cell_k + 3 {
                let q = c.quotient_at(&nth_coideal(&c, window)).unwrap();
                forms.push(gram(q.datum(), &cell).unwrap().matrix);
            }
            assert!(forms.windows(2).all(|w| w[0] == w[1]), "cell {cell_k}");
        }
    }

    #[test]
    fn non_profinite_direction_is_gated() {
        // naturals with the usual order: ⟨0⟩ is infinite
        let contains = Arc::new(|l: &Label| l.as_str().parse::<u64>().is_ok());
        let leq = Arc::new(|a: &Label, b: &Label| {
            a.as_str().parse::<u64>().unwrap() <= b.as_str().parse::<u64>().unwrap()
        });
        let upset = Arc::new(|_: &Label, _: usize| crate::poset::UpsetOutcome::Exceeded);
        let rank = Arc::new(|l: &Label| l.as_str().parse::<u64>().unwrap());
        let sample = Arc::new(|k: usize| {
            (0..k as u64).map(|i| Label::new(i.to_string())).collect()
        });
        let poset = Poset::lazy("naturals-usual", contains, leq, upset, rank, sample);
        let f = Field::Rational;
        let tableaux: TableauxFn = Arc::new(|l: &Label| {
            l.as_str().parse::<u64>().ok().map(|_| vec![Label::new(POLY_TAB)])
        });
        let mult: MultFn = Arc::new(move |i: &BasisIndex, _j: &BasisIndex| {
            Ok(vec![(i.clone(), Field::Rational.one())])
        });
        let d = CellDatum::new("bad", f, poset, tableaux, mult, None);
        assert!(matches!(
            Completion::new(&d, 4, 100),
            Err(CompletionError::NotProfinite(_))
        ));
    }
}
