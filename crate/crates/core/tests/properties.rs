//! Property suites over random origamis, random integer matrices and random braid words.

use origami_curves::flatgeom::{self, Direction, SpinParity};
use origami_curves::grpcore::{Permutation, Word};
use origami_curves::gtledger::{
    self, artin_identity_check, smith_normal_form, strand_permutations, subgroup_abelianization, tau, Presentation,
    Subgroup,
};
use origami_curves::origami::Origami;
use origami_curves::veech::{act_word_raw, Letter, StWord};
use proptest::prelude::*;

fn perm_strategy(d: usize) -> impl Strategy<Value = Permutation> {
    Just((0..d).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Permutation::from_images(v).unwrap())
}

fn origami_strategy(max_d: usize) -> impl Strategy<Value = Origami> {
    (1..=max_d)
        .prop_flat_map(|d| (perm_strategy(d), perm_strategy(d)))
        .prop_filter_map("disconnected", |(h, v)| Origami::new(h, v).ok())
}

/// Isomorphism of two transitive pairs by propagating one square image.
fn isomorphic(a: &Origami, b: &Origami) -> bool {
    let d = a.degree();
    if d != b.degree() {
        return false;
    }
    'start: for s in 0..d {
        let mut map = vec![usize::MAX; d];
        map[0] = s;
        let mut stack = vec![0];
        while let Some(i) = stack.pop() {
            for (pa, pb) in [(a.h(), b.h()), (a.v(), b.v())] {
                let (j, k) = (pa.apply(i), pb.apply(map[i]));
                if map[j] == usize::MAX {
                    map[j] = k;
                    stack.push(j);
                } else if map[j] != k {
                    continue 'start;
                }
            }
        }
        let mut seen = vec![false; d];
        if map.iter().all(|&x| !std::mem::replace(&mut seen[x], true)) {
            return true;
        }
    }
    false
}

fn st(word: &[(Letter, i64)]) -> StWord {
    StWord(word.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn sl2_relations_act_trivially(o in origami_strategy(8)) {
        let s4 = st(&[(Letter::S, 4)]);
        let st3 = st(&[(Letter::S, 1), (Letter::T, 1), (Letter::S, 1), (Letter::T, 1), (Letter::S, 1), (Letter::T, 1), (Letter::S, -2)]);
        prop_assert!(isomorphic(&act_word_raw(&s4, &o), &o));
        prop_assert!(isomorphic(&act_word_raw(&st3, &o), &o));
    }

    #[test]
    fn zero_orders_sum_to_euler_characteristic(o in origami_strategy(8)) {
        let sd = o.singularity_data();
        let total: usize = sd.zero_orders.iter().sum();
        prop_assert_eq!(total + 2, 2 * sd.genus);
        // Riemann-Hurwitz over the one-point branched torus
        let ct_total: usize = sd.commutator_cycle_type.iter().sum();
        prop_assert_eq!(ct_total, o.degree());
    }

    #[test]
    fn cylinders_tile_the_surface(o in origami_strategy(8), p in -4i64..=4, q in -4i64..=4) {
        prop_assume!(p != 0 || q != 0);
        let cd = flatgeom::cylinder_decomposition(&o, Direction::new(p, q).unwrap());
        let area: usize = cd.cylinders.iter().map(|c| c.width * c.height).sum();
        prop_assert_eq!(area, o.degree());
        let strips: usize = cd.cylinders.iter().map(|c| c.height).sum();
        prop_assert_eq!(strips, cd.unit_strip_count);
    }

    #[test]
    fn canonical_form_is_idempotent_and_conjugation_invariant(
        (o, g) in origami_strategy(6).prop_flat_map(|o| { let d = o.degree(); (Just(o), perm_strategy(d)) })
    ) {
        let c = o.canonicalize();
        prop_assert_eq!(c.canonicalize(), c.clone());
        prop_assert!(isomorphic(&c, &o));
        let moved = Origami::new(o.h().conjugate_by(&g), o.v().conjugate_by(&g)).unwrap();
        prop_assert_eq!(moved.canonicalize(), c);
    }

    #[test]
    fn canonical_equality_matches_brute_force(a in origami_strategy(5), b in origami_strategy(5)) {
        prop_assert_eq!(a.equivalent(&b), isomorphic(&a, &b));
    }
}

/// Random symplectic change: transvections along `a_i`, `b_i`, and mixing pairs.
fn transvect(basis: &mut [(Vec<i64>, Vec<i64>)], kind: u8, i: usize, j: usize, k: i64) {
    let add = |x: &mut Vec<i64>, y: &[i64], k: i64| x.iter_mut().zip(y).for_each(|(a, b)| *a += k * b);
    match kind {
        0 => {
            let b = basis[i].1.clone();
            add(&mut basis[i].0, &b, k);
        }
        1 => {
            let a = basis[i].0.clone();
            add(&mut basis[i].1, &a, k);
        }
        _ if i != j => {
            // a_i += k b_j, a_j += k b_i keeps the form
            let (bi, bj) = (basis[i].1.clone(), basis[j].1.clone());
            add(&mut basis[i].0, &bj, k);
            add(&mut basis[j].0, &bi, k);
        }
        _ => basis.swap(0, i),
    }
}

fn even_origami() -> impl Strategy<Value = Origami> {
    origami_strategy(8).prop_filter("spin undefined", |o| {
        let sd = o.singularity_data();
        sd.genus >= 1 && sd.zero_orders.iter().all(|k| k % 2 == 0)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn arf_is_basis_independent(o in even_origami(), moves in prop::collection::vec((0u8..3, 0usize..8, 0usize..8, -3i64..=3), 1..12)) {
        let sd = flatgeom::spin_data(&o);
        let mut basis = sd.symplectic_basis().unwrap();
        let g = basis.len();
        prop_assert_eq!(g, sd.genus);
        let arf0 = sd.arf(&basis);
        for (kind, i, j, k) in moves {
            transvect(&mut basis, kind, i % g, j % g, k);
        }
        for (i, (ai, bi)) in basis.iter().enumerate() {
            prop_assert_eq!(sd.pairing(ai, bi), 1);
            for (aj, bj) in &basis[i + 1..] {
                prop_assert_eq!(sd.pairing(ai, aj), 0);
                prop_assert_eq!(sd.pairing(bi, bj), 0);
                prop_assert_eq!(sd.pairing(ai, bj), 0);
                prop_assert_eq!(sd.pairing(bi, aj), 0);
            }
        }
        prop_assert_eq!(sd.arf(&basis), arf0);
        let parity = flatgeom::spin_parity(&o).unwrap();
        prop_assert_eq!(parity, if arf0 == 0 { SpinParity::Even } else { SpinParity::Odd });
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

fn det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        1 => m[0][0],
        n => (0..n)
            .map(|c| {
                let minor: Vec<Vec<i128>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, &x)| x).collect()).collect();
                let s = if c % 2 == 0 { 1 } else { -1 };
                s * m[0][c] * det(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n).flat_map(|last| subsets(last, k - 1).into_iter().map(move |mut s| { s.push(last); s })).collect()
}

/// gcd of the k×k minors.
fn determinantal_divisor(m: &[Vec<i128>], cols: usize, k: usize) -> i128 {
    let mut g = 0;
    for rs in subsets(m.len(), k) {
        for cs in subsets(cols, k) {
            let sub: Vec<Vec<i128>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c]).collect()).collect();
            g = gcd(g, det(&sub));
        }
    }
    g
}

fn mat(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<i128>>> {
    prop::collection::vec(prop::collection::vec(-9i128..=9, cols), rows)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn smith_form_remultiplies(m in (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| mat(r, c).prop_map(move |m| (m, c)))) {
        let (m, cols) = m;
        let snf = smith_normal_form(&m, cols).unwrap();
        // independent re-multiplication
        let rows = m.len();
        let mut d = vec![vec![0i128; cols]; rows];
        for i in 0..rows {
            for j in 0..cols {
                for a in 0..rows {
                    for b in 0..cols {
                        d[i][j] += snf.u[i][a] * m[a][b] * snf.v[b][j];
                    }
                }
            }
        }
        for i in 0..rows {
            for j in 0..cols {
                let want = if i == j && i < snf.diag.len() { snf.diag[i] } else { 0 };
                prop_assert_eq!(d[i][j], want);
            }
        }
        prop_assert_eq!(det(&snf.u).abs(), 1);
        prop_assert_eq!(det(&snf.v).abs(), 1);
        // d_1 ⋯ d_k is the k-th determinantal divisor
        let mut prod = 1;
        for k in 1..=rows.min(cols) {
            let dk = determinantal_divisor(&m, cols, k);
            if k <= snf.diag.len() {
                prod *= snf.diag[k - 1];
                prop_assert_eq!(prod, dk);
            } else {
                prop_assert_eq!(dk, 0);
            }
        }
    }
}

fn random_word(n: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((1..n as i64, prop::bool::ANY), 0..10)
        .prop_map(|v| Word::from_letters(&v.into_iter().map(|(g, s)| if s { g } else { -g }).collect::<Vec<_>>()))
}

fn braid_relators(n: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for i in 1..n - 1 {
        let (a, b) = (tau(i), tau(i + 1));
        out.push(a.mul(&b).mul(&a).mul(&b.mul(&a).mul(&b).inverse()));
    }
    for i in 1..n {
        for j in i + 2..n {
            out.push(Word::commutator(&tau(i), &tau(j)));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn artin_action_kills_conjugated_relators(n in 3usize..=6, g in random_word(6), k in 0usize..16) {
        prop_assume!(g.max_generator().is_none_or(|m| m < n - 1));
        let rels = braid_relators(n);
        let r = &rels[k % rels.len()];
        prop_assert!(artin_identity_check(n, &g.mul(r).mul(&g.inverse())).unwrap());
        // a single generator never acts trivially
        prop_assert!(!artin_identity_check(n, &tau(1 + k % (n - 1))).unwrap());
    }

    #[test]
    fn class_of_is_a_homomorphism(u in random_word(4), v in random_word(4), a in random_word(4), b in random_word(4)) {
        let sab = subgroup_abelianization(&Presentation::braid(4).with_relators([gtledger::named_word(4, "w4").unwrap()]), &strand_permutations(4), Subgroup::Kernel).unwrap();
        // pure elements: u a² u⁻¹-style conjugates and squares of random words
        let p = u.mul(&a.pow(24)).mul(&u.inverse());
        let q = v.mul(&b.pow(12)).mul(&v.inverse()).mul(&tau(1).pow(2));
        prop_assert!(sab.contains(&p) && sab.contains(&q));
        let (zp, zq, zpq) = (sab.coordinates(&p).unwrap(), sab.coordinates(&q).unwrap(), sab.coordinates(&p.mul(&q)).unwrap());
        let sum: Vec<i128> = zp.iter().zip(&zq).map(|(x, y)| x + y).collect();
        prop_assert_eq!(sab.reduce(&sum), sab.class_of(&p.mul(&q)).unwrap());
        prop_assert_eq!(sab.reduce(&zpq), sab.class_of(&q.mul(&p)).unwrap());
        let inv: Vec<i128> = zp.iter().map(|x| -x).collect();
        prop_assert_eq!(sab.reduce(&inv), sab.class_of(&p.inverse()).unwrap());
    }
}

#[test]
fn braid_relations_hold_up_to_six_strands() {
    for n in 2..=6 {
        for r in braid_relators(n) {
            assert!(artin_identity_check(n, &r).unwrap(), "B{} relator {:?}", n, r);
        }
        if n >= 3 {
            assert!(!artin_identity_check(n, &Word::commutator(&tau(1), &tau(2))).unwrap());
        }
    }
}

#[test]
fn braid_groups_abelianize_to_z() {
    for n in 2..=6 {
        let sab = subgroup_abelianization(&Presentation::braid(n), &vec![Permutation::identity(1); n - 1], Subgroup::Kernel).unwrap();
        assert_eq!(sab.free_rank(), 1, "B{}", n);
        assert!(sab.torsion().is_empty(), "B{}", n);
        // every generator maps to the same class
        let c = sab.class_of(&tau(1)).unwrap();
        for i in 2..n {
            assert_eq!(sab.class_of(&tau(i)).unwrap(), c);
        }
    }
}
