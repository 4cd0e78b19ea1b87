//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the exact bound it enforced. Everything is exact arithmetic; there are
//! no tolerances to tune, only equalities and counts.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use procell::cell::{BasisIndex, CellDatum};
use procell::completion::{
    connecting_map, smooth_classify, Completion, CompletionElement, QuotientAlgebra,
};
use procell::datum_json::{self, DatumFile};
use procell::field::Field;
use procell::instances::poly::monomial;
use procell::instances::ssyt::{enumerate_ssyt, Partition};
use procell::instances::tl::tl_datum;
use procell::instances::tower::{column_removal, ColumnRemoval};
use procell::matrix::span_dimension;
use procell::poset::{Coideal, Label, DEFAULT_UPSET_CAP};
use procell::rep::{cell_module, classify, gram, irreducible_report, quotient_action};

fn fields() -> Vec<Field> {
    vec![Field::Rational, Field::prime(5).unwrap()]
}

fn poly_completion(field: Field) -> Completion {
    procell::instances::poly::poly_completion(field, 0).unwrap()
}

fn nth(c: &Completion, k: u64) -> Coideal {
    c.datum()
        .poset()
        .coideal(&[Label::new(k.to_string())], DEFAULT_UPSET_CAP)
        .unwrap()
}

fn poly_trunc(c: &Completion, k: u64) -> QuotientAlgebra {
    c.quotient_at(&nth(c, k)).unwrap()
}

/// Seeded random finite-support completion element over cells 0..=8.
fn random_element(c: &Completion, field: Field, rng: &mut ChaCha8Rng) -> CompletionElement {
    let mut terms = Vec::new();
    for k in 0..=8u64 {
        if rng.gen_bool(0.4) {
            let v = rng.gen_range(-3i64..=3);
            if v != 0 {
                terms.push((monomial(k), field.from_i64(v)));
            }
        }
    }
    c.embed(&terms).unwrap()
}

// ----------------------------------------------------------------------
// criterion 1: axiom suite plus mutation harness
// ----------------------------------------------------------------------

fn mutate(file: &DatumFile, dim: usize, rng: &mut ChaCha8Rng) -> DatumFile {
    let field = Field::Rational;
    let mut f = file.clone();
    loop {
        let e = rng.gen_range(0..f.products.len());
        if f.products[e].2.is_empty() {
            continue;
        }
        let entry = &mut f.products[e].2;
        match rng.gen_range(0..4u32) {
            0 => {
                // bump one coefficient by 1
                let t = rng.gen_range(0..entry.len());
                let c = field.parse_scalar(&entry[t].1).unwrap();
                let bumped = c.add(&field.one()).unwrap();
                if bumped.is_zero() {
                    entry.remove(t);
                } else {
                    entry[t].1 = bumped.to_string();
                }
            }
            1 => {
                // redirect one output index
                let t = rng.gen_range(0..entry.len());
                let cur = entry[t].0;
                let mut k = rng.gen_range(0..dim);
                if k == cur {
                    k = (k + 1) % dim;
                }
                entry[t].0 = k;
            }
            2 => {
                let t = rng.gen_range(0..entry.len());
                entry.remove(t);
            }
            3 => {
                // add a fresh term with coefficient 1
                let present: BTreeSet<usize> = entry.iter().map(|(k, _)| *k).collect();
                if present.len() == dim {
                    continue;
                }
                let mut k = rng.gen_range(0..dim);
                while present.contains(&k) {
                    k = (k + 1) % dim;
                }
                entry.push((k, "1".into()));
            }
            _ => unreachable!(),
        }
        return f;
    }
}

/// Runs `count` seeded one-entry corruptions of a table and returns how
/// many were detected with a concrete witness.
fn mutation_detections(d: &CellDatum, count: usize, rng: &mut ChaCha8Rng) -> usize {
    let file = datum_json::save(d).unwrap();
    let dim = d.dimension().unwrap();
    let mut detected = 0;
    for _ in 0..count {
        let bad = mutate(&file, dim, rng);
        let loaded = match datum_json::load(&bad) {
            Ok(l) => l,
            Err(_) => {
                detected += 1; // refusing to load is detection with a message
                continue;
            }
        };
        let report = loaded.verify().unwrap();
        if !report.passed() {
            let witness = report
                .lines()
                .iter()
                .find(|(_, o)| !o.passed())
                .and_then(|(_, o)| o.witness())
                .map(str::to_string);
            assert!(
                witness.is_some() && !witness.unwrap().is_empty(),
                "detection must carry a witness"
            );
            detected += 1;
        }
    }
    detected
}

#[test]
fn criterion_1_axiom_suite() {
    // exhaustive passes
    for field in fields() {
        let c = poly_completion(field);
        for k in 0..=8u64 {
            let q = poly_trunc(&c, k);
            let report = q.datum().verify().unwrap();
            assert!(report.passed(), "poly trunc {k} over {field}: {report:?}");
        }
        for n in 1..=5usize {
            for dv in 0..=3i64 {
                let delta = field.from_i64(dv);
                let d = tl_datum(n, &delta).unwrap();
                let report = d.verify().unwrap();
                assert!(report.passed(), "TL_{n} delta={dv} over {field}: {report:?}");
            }
        }
    }
    // seeded mutation harness: 100 corruptions each of the TL_3 table and
    // the poly ⟨4⟩ table over the rationals
    let seed = 0xC0FFEE;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tl3 = tl_datum(3, &Field::Rational.from_i64(2)).unwrap();
    let c = poly_completion(Field::Rational);
    let poly4 = poly_trunc(&c, 4);
    let detected =
        mutation_detections(&tl3, 100, &mut rng) + mutation_detections(poly4.datum(), 100, &mut rng);
    println!("mutation harness (seed {seed:#x}): {detected}/200 detected");
    assert!(detected >= 198, "detected only {detected}/200 mutations");
    println!(
        "PASS criterion 1: axioms exhaustively verified (poly k<=8, TL_n n<=5, delta 0..3, Q and F_5); \
         {detected}/200 seeded mutations detected with witnesses (>= 198 required)"
    );
}

// ----------------------------------------------------------------------
// criterion 2: polynomial-counterexample regression
// ----------------------------------------------------------------------

#[test]
fn criterion_2_poly_regression() {
    for field in fields() {
        let c = poly_completion(field);
        for k in 0..=8u64 {
            let q = poly_trunc(&c, k);
            let table = classify(q.datum()).unwrap();
            assert_eq!(
                table.lambda0(),
                vec![Label::new("0")],
                "trunc {k} over {field}"
            );
            let zero_row = table.rows.iter().find(|r| r.cell == Label::new("0")).unwrap();
            assert_eq!(zero_row.dim_l, 1);
            for row in &table.rows {
                if row.cell != Label::new("0") {
                    assert_eq!(row.dim_l, 0, "cell {} must have zero form", row.cell);
                }
            }
        }
    }
    println!(
        "PASS criterion 2: poly truncations k<=8 classify to a single simple at cell 0 with dim L = 1, exactly"
    );
}

// ----------------------------------------------------------------------
// criterion 3: finite classification cross-check on TL_3
// ----------------------------------------------------------------------

#[test]
fn criterion_3_tl3_classification() {
    let field = Field::Rational;
    let d = tl_datum(3, &field.from_i64(2)).unwrap();
    let table = classify(&d).unwrap();
    let mut dims: Vec<usize> = table
        .rows
        .iter()
        .filter(|r| r.in_lambda0)
        .map(|r| r.dim_l)
        .collect();
    dims.sort();
    assert_eq!(dims, vec![1, 2], "two simples of dims 1 and 2");
    // Burnside certificate: the quotient action matrices span dim^2
    for row in &table.rows {
        let rep = irreducible_report(&d, &row.cell).unwrap();
        let m = cell_module(&d, &row.cell).unwrap();
        let q = quotient_action(&m, &rep.rad_basis).unwrap();
        let mats: Vec<_> = q.mats.iter().map(|(_, m)| m.clone()).collect();
        assert_eq!(
            span_dimension(&mats, q.dim).unwrap(),
            q.dim * q.dim,
            "L({}) must be absolutely irreducible",
            row.cell
        );
    }
    // 1^2 + 2^2 = 5 = Catalan(3): the regular module is a direct sum of
    // full matrix blocks, so this parameter is semisimple
    let total: usize = dims.iter().map(|d| d * d).sum();
    assert_eq!(total, d.dimension().unwrap());
    assert_eq!(total, 5);

    // TL_3 at delta = 1: the 1-through Gram matrix is [[1,1],[1,1]] of rank 1
    let d1 = tl_datum(3, &field.from_i64(1)).unwrap();
    let g = gram(&d1, &Label::new("1")).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            assert!(g.matrix.at(i, j).is_one());
        }
    }
    assert_eq!(g.matrix.rank(), 1);
    let rep = irreducible_report(&d1, &Label::new("1")).unwrap();
    assert_eq!(rep.dim_l, 1);
    println!(
        "PASS criterion 3: TL_3(2)/Q has simples of dims {{1,2}}, Burnside-certified, 1^2+2^2 = 5 = Catalan(3); \
         TL_3(1) has dim L(1-through) = 1 from the rank-1 all-ones Gram matrix"
    );
}

// ----------------------------------------------------------------------
// criterion 4: inverse-system laws
// ----------------------------------------------------------------------

#[test]
fn criterion_4_inverse_system_laws() {
    let field = Field::Rational;
    let c = poly_completion(field);
    let d = c.datum().clone();
    let bound = nth(&c, 6);
    let coideals = bound.sub_coideals(20).unwrap();
    assert_eq!(coideals.len(), 8, "coideals of a 7-chain are its prefixes");
    let window: Vec<BasisIndex> = (0..=8).map(monomial).collect();
    let mut triples = 0usize;
    for p1 in &coideals {
        for p2 in &coideals {
            if !p2.is_subset(p1) {
                continue;
            }
            let q1 = c.quotient_at(p1).unwrap();
            let q2 = c.quotient_at(p2).unwrap();
            // constructor verifies the homomorphism law on all basis pairs
            let psi12 = connecting_map(&q1, &q2).unwrap();
            // factorization through the parent on basis labels
            for b in &window {
                let e = d.basis_element(b).unwrap();
                let via = psi12.apply(&q1.project_parent(&e).unwrap()).unwrap();
                let direct = q2.project_parent(&e).unwrap();
                assert_eq!(via, direct, "psi_(P1,P2) . psi_P1 = psi_P2 at {b}");
            }
            for p3 in &coideals {
                if !p3.is_subset(p2) {
                    continue;
                }
                triples += 1;
                let q3 = c.quotient_at(p3).unwrap();
                let psi23 = connecting_map(&q2, &q3).unwrap();
                let psi13 = connecting_map(&q1, &q3).unwrap();
                for b in q1.datum().basis().unwrap() {
                    let e = q1.datum().basis_element(&b).unwrap();
                    let lhs = psi23.apply(&psi12.apply(&e).unwrap()).unwrap();
                    let rhs = psi13.apply(&e).unwrap();
                    assert_eq!(lhs, rhs, "functoriality at {b}");
                }
            }
        }
    }
    assert_eq!(triples, 120, "nested triples among the 8 chain coideals");
    println!(
        "PASS criterion 4: connecting-map functoriality and factorization hold exactly on all basis \
         elements for all {triples} nested coideal triples inside the 7-element window"
    );
}

// ----------------------------------------------------------------------
// criterion 5: completion arithmetic
// ----------------------------------------------------------------------

#[test]
fn criterion_5_completion_arithmetic() {
    let field = Field::Rational;
    let c = poly_completion(field);
    let geometric = c.generator("geometric").unwrap();
    let one_minus_x = c
        .embed(&[(monomial(0), field.one()), (monomial(1), field.from_i64(-1))])
        .unwrap();
    let unit = c.generator("delta").unwrap();
    let prod = one_minus_x.mul(&geometric);
    for k in 0..=8u64 {
        assert!(
            prod.equal_mod(&unit, &nth(&c, k)).unwrap(),
            "(1-x) * geometric = 1 at window {k}"
        );
    }

    let seed = 0x5EED_0005u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let windows = nth(&c, 5).sub_coideals(20).unwrap();
    assert_eq!(windows.len(), 7);
    for pair in 0..100 {
        let e1 = random_element(&c, field, &mut rng);
        let e2 = random_element(&c, field, &mut rng);
        let prod = e1.mul(&e2);
        for p in &windows {
            let q = c.quotient_at(p).unwrap();
            let lhs = prod.project_in(&q).unwrap();
            let rhs = q
                .datum()
                .multiply(&e1.project_in(&q).unwrap(), &e2.project_in(&q).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs, "pair {pair}, window {:?}", p.members());
        }
    }
    println!(
        "PASS criterion 5: (1-x)*geometric = 1 at windows 0..=8; homomorphism law exact for 100 seeded \
         pairs (seed {seed:#x}) across all 7 sub-coideals of the 6-element window"
    );
}

// ----------------------------------------------------------------------
// criterion 6: topology (separation and density)
// ----------------------------------------------------------------------

#[test]
fn criterion_6_topology() {
    let field = Field::Rational;
    let c = poly_completion(field);
    let seed = 0x5EED_0006u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let windows = nth(&c, 5).sub_coideals(20).unwrap();
    let mut checked = 0usize;
    while checked < 100 {
        let e = random_element(&c, field, &mut rng);
        if e.known_support().unwrap().is_empty() {
            continue;
        }
        checked += 1;
        // separation: some principal coideal ideal misses e
        let w = e.separation_witness().unwrap().expect("nonzero element");
        assert!(!e.in_ideal(&w).unwrap(), "separation witness must separate");
        // density: the P-truncation approximates e within the P-ideal
        for p in &windows {
            let f = e.truncation(p).unwrap();
            assert!(e.sub(&f).in_ideal(p).unwrap(), "e - trunc_P(e) in ideal");
        }
    }
    // density also holds for a genuinely infinite oracle
    let ones = c.from_oracle(Arc::new(move |_: &BasisIndex| field.one()));
    for p in &windows {
        let f = ones.truncation(p).unwrap();
        assert!(ones.sub(&f).in_ideal(p).unwrap());
    }
    println!(
        "PASS criterion 6: separation witnesses found for 100 seeded nonzero elements (seed {seed:#x}); \
         truncations land in e + ideal for all 7 sub-coideals of the 6-element window"
    );
}

// ----------------------------------------------------------------------
// criterion 7: smooth classification agreement
// ----------------------------------------------------------------------

#[test]
fn criterion_7_smooth_agreement() {
    for field in fields() {
        let c = poly_completion(field);
        for k in 0..=8u64 {
            let simples = smooth_classify(&c, &nth(&c, k)).unwrap();
            assert_eq!(
                simples,
                vec![(Label::new("0"), 1)],
                "poly window {k} over {field}"
            );
        }
    }
    // finite data viewed as trivially complete: the smooth classification
    // within the whole poset equals the finite classification
    let mut instances = 0usize;
    for field in fields() {
        for n in 1..=4usize {
            for dv in 0..=3i64 {
                let delta = field.from_i64(dv);
                let d = tl_datum(n, &delta).unwrap();
                let c = Completion::new(&d, 4, DEFAULT_UPSET_CAP).unwrap();
                let full = Coideal::from_members(
                    d.poset(),
                    d.poset().elements().unwrap().iter().cloned().collect(),
                )
                .unwrap();
                let smooth = smooth_classify(&c, &full).unwrap();
                let finite = classify(&d).unwrap();
                let want: Vec<(Label, usize)> = finite
                    .rows
                    .iter()
                    .filter(|r| r.in_lambda0)
                    .map(|r| (r.cell.clone(), r.dim_l))
                    .collect();
                assert_eq!(smooth, want, "TL_{n} delta={dv} over {field}");
                instances += 1;
            }
        }
    }
    println!(
        "PASS criterion 7: smooth classification is {{0}} for poly windows k<=8 over Q and F_5, and \
         matches the finite classification exactly on {instances} finite instances"
    );
}

// ----------------------------------------------------------------------
// criterion 8: tableau layer
// ----------------------------------------------------------------------

/// Independent filling oracle: every row-major filling, filtered by the
/// semistandard conditions spelled out locally.
fn brute_force_ssyt(shape: &Partition, n: u32) -> usize {
    let parts = shape.parts();
    let cells: usize = shape.size() as usize;
    let mut count = 0usize;
    let total = (n as u64).pow(cells as u32);
    'outer: for mut code in 0..total {
        let mut rows: Vec<Vec<u32>> = Vec::new();
        for &l in parts {
            let mut row = Vec::new();
            for _ in 0..l {
                row.push((code % n as u64) as u32 + 1);
                code /= n as u64;
            }
            rows.push(row);
        }
        for row in &rows {
            for w in row.windows(2) {
                if w[0] > w[1] {
                    continue 'outer;
                }
            }
        }
        for r in 1..rows.len() {
            for (c, entry) in rows[r].clone().into_iter().enumerate() {
                if rows[r - 1][c] >= entry {
                    continue 'outer;
                }
            }
        }
        count += 1;
    }
    count
}

#[test]
fn criterion_8_tableau_layer() {
    let shape21 = Partition::new(vec![2, 1]).unwrap();
    let fast = enumerate_ssyt(&shape21, 3).unwrap().len();
    let brute = brute_force_ssyt(&shape21, 3);
    assert_eq!(fast, 8);
    assert_eq!(brute, 8);

    // column-removal coherence, exhaustively for all shapes with <= 4
    // boxes and at most n rows, n <= 3
    let mut shapes_checked = 0usize;
    for n in 1..=3u32 {
        for size in 1..=4u64 {
            for shape in Partition::enumerate(size, n as usize) {
                let tabs = enumerate_ssyt(&shape, n).unwrap();
                if tabs.is_empty() {
                    continue;
                }
                shapes_checked += 1;
                let mut zero_count = 0usize;
                let mut targets: BTreeSet<Partition> = BTreeSet::new();
                let mut pairs = 0usize;
                for s in &tabs {
                    for t in &tabs {
                        pairs += 1;
                        match column_removal(s, t, n).unwrap() {
                            ColumnRemoval::Zero => zero_count += 1,
                            ColumnRemoval::Removed(sp, tp) => {
                                assert!(sp.is_semistandard() && tp.is_semistandard());
                                assert_eq!(sp.shape(), tp.shape(), "pair stays in one cell");
                                targets.insert(sp.shape());
                            }
                        }
                    }
                }
                // same-cell pairs map coherently: all to zero, or all into
                // one smaller cell
                assert!(
                    zero_count == pairs || (zero_count == 0 && targets.len() == 1),
                    "shape {} with n = {n}: {zero_count}/{pairs} zero, targets {targets:?}",
                    shape.label()
                );
                // the zero case is exactly the absence of a full column
                assert_eq!(zero_count == pairs, shape.rows() != n as usize);
            }
        }
    }
    // swapping the pair commutes with removal
    let shape22 = Partition::new(vec![2, 2]).unwrap();
    let tabs = enumerate_ssyt(&shape22, 2).unwrap();
    for s in &tabs {
        for t in &tabs {
            match (column_removal(s, t, 2).unwrap(), column_removal(t, s, 2).unwrap()) {
                (ColumnRemoval::Removed(a, b), ColumnRemoval::Removed(c, d)) => {
                    assert_eq!(a, d);
                    assert_eq!(b, c);
                }
                (ColumnRemoval::Zero, ColumnRemoval::Zero) => {}
                _ => panic!("swap changed the zero status"),
            }
        }
    }
    println!(
        "PASS criterion 8: SSYT count for (2,1) with n=3 is 8 (matches the brute-force filling oracle); \
         column-removal coherence holds exhaustively on {shapes_checked} shapes with <= 4 boxes, n <= 3"
    );
}
