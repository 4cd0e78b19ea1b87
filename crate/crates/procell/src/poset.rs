//! Finite and lazily-enumerated posets, coideal generation, and the
//! profinite-type finiteness check.
//!
//! Element labels are opaque ordered byte strings, so posets over naturals,
//! partitions and tableaux share one code path. A lazy poset must supply its
//! own up-set enumerator; the library never tries to invert a bare `leq`
//! predicate.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default cap used when enumerating principal coideals of lazy posets.
pub const DEFAULT_UPSET_CAP: usize = 10_000;

/// Default maximum bound size accepted by [`Coideal::sub_coideals`].
pub const DEFAULT_SUBCOIDEAL_GUARD: usize = 20;

/// Opaque element label; ordering is byte-lexicographic and used only for
/// deterministic storage, never as the poset order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(s: impl Into<String>) -> Label {
        Label(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Label {
        Label(s.to_string())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Label {
        Label(s)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("unknown element {0}")]
    UnknownElement(Label),
    #[error("up-set of {element} exceeded cap {cap}; direction is not of profinite type")]
    CapExceeded { element: Label, cap: usize },
    #[error("not a poset: {0}")]
    NotAPoset(String),
    #[error("bound has {size} elements, above the guard {max}")]
    SizeGuard { size: usize, max: usize },
    #[error("operation requires a finite poset")]
    NotFinite,
    #[error("{0:?} is not upward closed (missing {1})")]
    NotUpwardClosed(Vec<Label>, Label),
}

/// Outcome of enumerating a principal coideal under a cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UpsetOutcome {
    Finite(Vec<Label>),
    Exceeded,
}

type ContainsFn = Arc<dyn Fn(&Label) -> bool + Send + Sync>;
type LeqFn = Arc<dyn Fn(&Label, &Label) -> bool + Send + Sync>;
type UpsetFn = Arc<dyn Fn(&Label, usize) -> UpsetOutcome + Send + Sync>;
type RankFn = Arc<dyn Fn(&Label) -> u64 + Send + Sync>;
type SampleFn = Arc<dyn Fn(usize) -> Vec<Label> + Send + Sync>;

enum PosetKind {
    Finite {
        elements: Vec<Label>,
        index: HashMap<Label, usize>,
        leq: Vec<bool>, // row-major n*n, leq[a*n+b] == (a <= b)
    },
    Lazy {
        contains: ContainsFn,
        leq: LeqFn,
        upset: UpsetFn,
        rank: RankFn,
        sample: SampleFn,
    },
}

struct PosetInner {
    name: String,
    kind: PosetKind,
}

/// Immutable partial order over opaque labels. Cheap to clone and share.
#[derive(Clone)]
pub struct Poset(Arc<PosetInner>);

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poset({})", self.0.name)
    }
}

impl Poset {
    /// Finite poset from an element list and covering relations `(a, b)`
    /// meaning `a < b`. The transitive closure is computed here; reflexivity
    /// is implicit; antisymmetry is verified and cycles are rejected.
    pub fn finite_from_covers(
        name: impl Into<String>,
        elements: Vec<Label>,
        covers: &[(Label, Label)],
    ) -> Result<Poset, PosetError> {
        let n = elements.len();
        let mut index = HashMap::new();
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(PosetError::NotAPoset(format!("duplicate element {e}")));
            }
        }
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (a, b) in covers {
            let ia = *index.get(a).ok_or_else(|| PosetError::UnknownElement(a.clone()))?;
            let ib = *index.get(b).ok_or_else(|| PosetError::UnknownElement(b.clone()))?;
            leq[ia * n + ib] = true;
        }
        // Floyd-Warshall style closure
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && leq[i * n + j] && leq[j * n + i] {
                    return Err(PosetError::NotAPoset(format!(
                        "cycle through {} and {}",
                        elements[i], elements[j]
                    )));
                }
            }
        }
        Ok(Poset(Arc::new(PosetInner {
            name: name.into(),
            kind: PosetKind::Finite {
                elements,
                index,
                leq,
            },
        })))
    }

    /// Finite poset from a decidable order predicate, verified exhaustively
    /// (reflexive, antisymmetric, transitive).
    pub fn finite_from_leq(
        name: impl Into<String>,
        elements: Vec<Label>,
        leq_fn: impl Fn(&Label, &Label) -> bool,
    ) -> Result<Poset, PosetError> {
        let n = elements.len();
        let mut index = HashMap::new();
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(PosetError::NotAPoset(format!("duplicate element {e}")));
            }
        }
        let mut leq = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                leq[i * n + j] = leq_fn(&elements[i], &elements[j]);
            }
        }
        for i in 0..n {
            if !leq[i * n + i] {
                return Err(PosetError::NotAPoset(format!(
                    "not reflexive at {}",
                    elements[i]
                )));
            }
            for j in 0..n {
                if i != j && leq[i * n + j] && leq[j * n + i] {
                    return Err(PosetError::NotAPoset(format!(
                        "not antisymmetric at {} and {}",
                        elements[i], elements[j]
                    )));
                }
                for k in 0..n {
                    if leq[i * n + j] && leq[j * n + k] && !leq[i * n + k] {
                        return Err(PosetError::NotAPoset(format!(
                            "not transitive at {} <= {} <= {}",
                            elements[i], elements[j], elements[k]
                        )));
                    }
                }
            }
        }
        Ok(Poset(Arc::new(PosetInner {
            name: name.into(),
            kind: PosetKind::Finite {
                elements,
                index,
                leq,
            },
        })))
    }

    /// Lazy poset over an infinite (or merely unenumerated) label set.
    ///
    /// `upset` must enumerate the principal coideal of an element up to a
    /// cap; `rank` fixes the canonical listing order; `sample` yields the
    /// first `k` elements in that order.
    pub fn lazy(
        name: impl Into<String>,
        contains: ContainsFn,
        leq: LeqFn,
        upset: UpsetFn,
        rank: RankFn,
        sample: SampleFn,
    ) -> Poset {
        Poset(Arc::new(PosetInner {
            name: name.into(),
            kind: PosetKind::Lazy {
                contains,
                leq,
                upset,
                rank,
                sample,
            },
        }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.0.kind, PosetKind::Finite { .. })
    }

    /// Pointer identity; used to reject cross-poset operations.
    pub fn same(&self, other: &Poset) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn contains(&self, l: &Label) -> bool {
        match &self.0.kind {
            PosetKind::Finite { index, .. } => index.contains_key(l),
            PosetKind::Lazy { contains, .. } => contains(l),
        }
    }

    pub fn leq(&self, a: &Label, b: &Label) -> Result<bool, PosetError> {
        match &self.0.kind {
            PosetKind::Finite { index, leq, elements } => {
                let ia = *index.get(a).ok_or_else(|| PosetError::UnknownElement(a.clone()))?;
                let ib = *index.get(b).ok_or_else(|| PosetError::UnknownElement(b.clone()))?;
                Ok(leq[ia * elements.len() + ib])
            }
            PosetKind::Lazy { contains, leq, .. } => {
                for l in [a, b] {
                    if !contains(l) {
                        return Err(PosetError::UnknownElement(l.clone()));
                    }
                }
                Ok(leq(a, b))
            }
        }
    }

    /// Strict order a < b.
    pub fn lt(&self, a: &Label, b: &Label) -> Result<bool, PosetError> {
        Ok(a != b && self.leq(a, b)?)
    }

    /// Principal coideal ⟨a⟩ = { b : a <= b }, enumerated up to `cap`.
    pub fn upset(&self, a: &Label, cap: usize) -> Result<UpsetOutcome, PosetError> {
        match &self.0.kind {
            PosetKind::Finite { elements, .. } => {
                if !self.contains(a) {
                    return Err(PosetError::UnknownElement(a.clone()));
                }
                let mut out = Vec::new();
                for b in elements {
                    if self.leq(a, b)? {
                        if out.len() == cap {
                            return Ok(UpsetOutcome::Exceeded);
                        }
                        out.push(b.clone());
                    }
                }
                Ok(UpsetOutcome::Finite(out))
            }
            PosetKind::Lazy { contains, upset, .. } => {
                if !contains(a) {
                    return Err(PosetError::UnknownElement(a.clone()));
                }
                Ok(upset(a, cap))
            }
        }
    }

    /// Element list of a finite poset, in load order.
    pub fn elements(&self) -> Result<&[Label], PosetError> {
        match &self.0.kind {
            PosetKind::Finite { elements, .. } => Ok(elements),
            PosetKind::Lazy { .. } => Err(PosetError::NotFinite),
        }
    }

    /// First `k` elements in the canonical listing order.
    pub fn sample(&self, k: usize) -> Vec<Label> {
        match &self.0.kind {
            PosetKind::Finite { elements, .. } => {
                elements.iter().take(k).cloned().collect()
            }
            PosetKind::Lazy { sample, .. } => sample(k),
        }
    }

    /// Canonical listing rank of an element (load order for finite posets).
    pub fn rank_of(&self, l: &Label) -> Result<u64, PosetError> {
        match &self.0.kind {
            PosetKind::Finite { index, .. } => index
                .get(l)
                .map(|&i| i as u64)
                .ok_or_else(|| PosetError::UnknownElement(l.clone())),
            PosetKind::Lazy { contains, rank, .. } => {
                if contains(l) {
                    Ok(rank(l))
                } else {
                    Err(PosetError::UnknownElement(l.clone()))
                }
            }
        }
    }

    /// Sorts labels into the poset's canonical listing order.
    pub fn canonical_sort(&self, labels: &mut [Label]) -> Result<(), PosetError> {
        let mut keyed: Vec<(u64, Label)> = labels
            .iter()
            .map(|l| Ok((self.rank_of(l)?, l.clone())))
            .collect::<Result<_, PosetError>>()?;
        keyed.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        for (slot, (_, l)) in labels.iter_mut().zip(keyed) {
            *slot = l;
        }
        Ok(())
    }

    /// Coideal generated by `gens`: { b : g <= b for some g }.
    pub fn coideal(&self, gens: &[Label], cap: usize) -> Result<Coideal, PosetError> {
        let mut members = BTreeSet::new();
        for g in gens {
            match self.upset(g, cap)? {
                UpsetOutcome::Finite(up) => members.extend(up),
                UpsetOutcome::Exceeded => {
                    return Err(PosetError::CapExceeded {
                        element: g.clone(),
                        cap,
                    })
                }
            }
        }
        Ok(Coideal {
            poset: self.clone(),
            members,
        })
    }

    /// True iff the finite set `s` is upward closed.
    pub fn is_coideal(&self, s: &BTreeSet<Label>) -> Result<bool, PosetError> {
        for a in s {
            if !self.contains(a) {
                return Err(PosetError::UnknownElement(a.clone()));
            }
        }
        match &self.0.kind {
            PosetKind::Finite { elements, .. } => {
                for a in s {
                    for b in elements {
                        if self.lt(a, b)? && !s.contains(b) {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            PosetKind::Lazy { .. } => {
                for a in s {
                    match self.upset(a, DEFAULT_UPSET_CAP)? {
                        UpsetOutcome::Finite(up) => {
                            if up.iter().any(|b| !s.contains(b)) {
                                return Ok(false);
                            }
                        }
                        UpsetOutcome::Exceeded => {
                            return Err(PosetError::CapExceeded {
                                element: a.clone(),
                                cap: DEFAULT_UPSET_CAP,
                            })
                        }
                    }
                }
                Ok(true)
            }
        }
    }

    /// Per-element finiteness report for the profinite-type condition: every
    /// principal coideal ⟨a⟩ must be finite.
    pub fn profinite_check(
        &self,
        sample: &[Label],
        cap: usize,
    ) -> Result<ProfiniteReport, PosetError> {
        let mut entries = Vec::new();
        for a in sample {
            let status = match self.upset(a, cap)? {
                UpsetOutcome::Finite(up) => UpsetStatus::Finite(up.len()),
                UpsetOutcome::Exceeded => UpsetStatus::Exceeded(cap),
            };
            entries.push((a.clone(), status));
        }
        Ok(ProfiniteReport { entries })
    }

    /// Spot-checks the order axioms of a lazy poset on a seeded sample
    /// (finite posets are verified exhaustively at construction).
    pub fn spot_check_axioms(&self, seed: u64, samples: usize) -> Result<(), PosetError> {
        let pool = self.sample(samples.max(4));
        if pool.is_empty() {
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for a in &pool {
            if !self.leq(a, a)? {
                return Err(PosetError::NotAPoset(format!("not reflexive at {a}")));
            }
        }
        for _ in 0..samples {
            let a = pool.choose(&mut rng).expect("pool nonempty");
            let b = pool.choose(&mut rng).expect("pool nonempty");
            let c = pool.choose(&mut rng).expect("pool nonempty");
            if a != b && self.leq(a, b)? && self.leq(b, a)? {
                return Err(PosetError::NotAPoset(format!(
                    "not antisymmetric at {a} and {b}"
                )));
            }
            if self.leq(a, b)? && self.leq(b, c)? && !self.leq(a, c)? {
                return Err(PosetError::NotAPoset(format!(
                    "not transitive at {a} <= {b} <= {c}"
                )));
            }
            // up-set enumerator must agree with the predicate
            if let UpsetOutcome::Finite(up) = self.upset(a, DEFAULT_UPSET_CAP)? {
                let claims = up.contains(b);
                if claims != self.leq(a, b)? {
                    return Err(PosetError::NotAPoset(format!(
                        "up-set enumerator disagrees with leq at {a}, {b}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Upward-closed finite subset of a poset.
#[derive(Clone)]
pub struct Coideal {
    poset: Poset,
    members: BTreeSet<Label>,
}

impl fmt::Debug for Coideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coideal{:?}", self.members)
    }
}

impl PartialEq for Coideal {
    fn eq(&self, other: &Self) -> bool {
        self.poset.same(&other.poset) && self.members == other.members
    }
}
impl Eq for Coideal {}

impl Coideal {
    /// Wraps an explicit member set, verifying upward closure.
    pub fn from_members(poset: &Poset, members: BTreeSet<Label>) -> Result<Coideal, PosetError> {
        if !poset.is_coideal(&members)? {
            let witness = members.iter().next().cloned().unwrap_or_else(|| Label::new("?"));
            return Err(PosetError::NotUpwardClosed(
                members.iter().cloned().collect(),
                witness,
            ));
        }
        Ok(Coideal {
            poset: poset.clone(),
            members,
        })
    }

    pub fn empty(poset: &Poset) -> Coideal {
        Coideal {
            poset: poset.clone(),
            members: BTreeSet::new(),
        }
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn members(&self) -> &BTreeSet<Label> {
        &self.members
    }

    /// Members sorted in the poset's canonical listing order.
    pub fn members_in_order(&self) -> Result<Vec<Label>, PosetError> {
        let mut v: Vec<Label> = self.members.iter().cloned().collect();
        self.poset.canonical_sort(&mut v)?;
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.members.contains(l)
    }

    pub fn is_subset(&self, other: &Coideal) -> bool {
        self.poset.same(&other.poset) && self.members.is_subset(&other.members)
    }

    /// Coideals are closed under union; the inverse system over finite
    /// coideals is therefore directed, which the completion machinery
    /// relies on.
    pub fn union(&self, other: &Coideal) -> Coideal {
        assert!(self.poset.same(&other.poset), "coideals of different posets");
        Coideal {
            poset: self.poset.clone(),
            members: self.members.union(&other.members).cloned().collect(),
        }
    }

    pub fn intersection(&self, other: &Coideal) -> Coideal {
        assert!(self.poset.same(&other.poset), "coideals of different posets");
        Coideal {
            poset: self.poset.clone(),
            members: self.members.intersection(&other.members).cloned().collect(),
        }
    }

    /// All coideals contained in this one (including ∅ and the bound
    /// itself), ordered by inclusion (listed by ascending size).
    pub fn sub_coideals(&self, guard: usize) -> Result<Vec<Coideal>, PosetError> {
        let n = self.members.len();
        if n > guard {
            return Err(PosetError::SizeGuard { size: n, max: guard });
        }
        let elems: Vec<Label> = self.members.iter().cloned().collect();
        // strictly-above lists within the bound
        let mut above: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                if i != j && self.poset.lt(a, b)? {
                    above[i].push(j);
                }
            }
        }
        // scan in a top-down linear extension: fewer elements above first
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| above[i].len());
        let mut results: Vec<BTreeSet<Label>> = Vec::new();
        let mut chosen = vec![false; n];
        fn rec(
            pos: usize,
            order: &[usize],
            above: &[Vec<usize>],
            elems: &[Label],
            chosen: &mut Vec<bool>,
            results: &mut Vec<BTreeSet<Label>>,
        ) {
            if pos == order.len() {
                let set: BTreeSet<Label> = chosen
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c)
                    .map(|(i, _)| elems[i].clone())
                    .collect();
                results.push(set);
                return;
            }
            let e = order[pos];
            // excluding e is always allowed
            chosen[e] = false;
            rec(pos + 1, order, above, elems, chosen, results);
            // including e requires everything above it
            if above[e].iter().all(|&j| chosen[j]) {
                chosen[e] = true;
                rec(pos + 1, order, above, elems, chosen, results);
                chosen[e] = false;
            }
        }
        rec(0, &order, &above, &elems, &mut chosen, &mut results);
        results.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(results
            .into_iter()
            .map(|members| Coideal {
                poset: self.poset.clone(),
                members,
            })
            .collect())
    }
}

/// Per-element outcome of the profinite-type check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UpsetStatus {
    Finite(usize),
    Exceeded(usize),
}

#[derive(Clone, Debug)]
pub struct ProfiniteReport {
    pub entries: Vec<(Label, UpsetStatus)>,
}

impl ProfiniteReport {
    pub fn all_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|(_, s)| matches!(s, UpsetStatus::Finite(_)))
    }
}
