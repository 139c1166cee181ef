//! The SL(2,Z) action on origamis, Veech groups, cusps and elliptic points.
//!
//! `T = [[1,1],[0,1]]` acts by `(h, v) ↦ (h, v·h⁻¹)` and `S = [[0,-1],[1,0]]`
//! by `(h, v) ↦ (v⁻¹, h)`. Both agree with shearing and rotating the squares,
//! so `act(A, o)` is the surface `o` pushed forward by `A`.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::flatgeom::{self, Direction};
use crate::origami::Origami;
use crate::Error;

pub const DEFAULT_ORBIT_BOUND: usize = 1_000_000;

/// An element of SL(2,Z), row-major.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct IntMatrix2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntMatrix2 {
    pub const I: IntMatrix2 = IntMatrix2 { a: 1, b: 0, c: 0, d: 1 };
    pub const S: IntMatrix2 = IntMatrix2 { a: 0, b: -1, c: 1, d: 0 };
    pub const T: IntMatrix2 = IntMatrix2 { a: 1, b: 1, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, Error> {
        if a * d - b * c != 1 {
            return Err(Error::Invalid(format!("[[{},{}],[{},{}]] has determinant {}", a, b, c, d, a * d - b * c)));
        }
        Ok(IntMatrix2 { a, b, c, d })
    }

    pub fn minus_identity() -> Self {
        IntMatrix2 { a: -1, b: 0, c: 0, d: -1 }
    }

    pub fn mul(&self, o: &IntMatrix2) -> IntMatrix2 {
        IntMatrix2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> IntMatrix2 {
        IntMatrix2 { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn rows(&self) -> [[i64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    /// `self · (p, q)ᵀ`.
    pub fn apply(&self, p: i64, q: i64) -> (i64, i64) {
        (self.a * p + self.b * q, self.c * p + self.d * q)
    }

    /// Equal up to sign.
    pub fn projectively_eq(&self, o: &IntMatrix2) -> bool {
        self == o || *self == o.mul(&IntMatrix2::minus_identity())
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Letter {
    S,
    T,
}

/// A word in S and T; the product of its syllables left to right.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct StWord(pub Vec<(Letter, i64)>);

impl StWord {
    fn push(&mut self, l: Letter, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.0.last_mut() {
            if last.0 == l {
                last.1 += e;
                if last.1 == 0 {
                    self.0.pop();
                }
                return;
            }
        }
        self.0.push((l, e));
    }

    pub fn mul(&self, o: &StWord) -> StWord {
        let mut w = self.clone();
        for &(l, e) in &o.0 {
            w.push(l, e);
        }
        w
    }

    pub fn inverse(&self) -> StWord {
        StWord(self.0.iter().rev().map(|&(l, e)| (l, -e)).collect())
    }

    pub fn letter(l: Letter) -> StWord {
        StWord(vec![(l, 1)])
    }

    pub fn matrix(&self) -> IntMatrix2 {
        let mut m = IntMatrix2::I;
        for &(l, e) in &self.0 {
            let base = match l {
                Letter::S => IntMatrix2::S,
                Letter::T => IntMatrix2::T,
            };
            let g = if e < 0 { base.inverse() } else { base };
            for _ in 0..e.unsigned_abs() {
                m = m.mul(&g);
            }
        }
        m
    }
}

impl fmt::Display for StWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(l, e)| {
                let n = if l == Letter::S { "S" } else { "T" };
                if e == 1 { n.to_string() } else { format!("{}^{}", n, e) }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Fixed decomposition of a matrix into S and T by the Euclidean algorithm.
pub fn decompose(m: &IntMatrix2) -> StWord {
    let mut cur = *m;
    let mut w = StWord::default();
    while cur.c != 0 {
        let q = cur.a.div_euclid(cur.c);
        // cur ← T^{-q}·cur, then S⁻¹·cur
        cur = IntMatrix2 { a: cur.a - q * cur.c, b: cur.b - q * cur.d, c: cur.c, d: cur.d };
        cur = IntMatrix2 { a: cur.c, b: cur.d, c: -cur.a, d: -cur.b };
        w.push(Letter::T, q);
        w.push(Letter::S, 1);
    }
    if cur.a == 1 {
        w.push(Letter::T, cur.b);
    } else {
        w.push(Letter::S, 2);
        w.push(Letter::T, -cur.b);
    }
    debug_assert_eq!(w.matrix(), *m);
    w
}

fn act_s(o: &Origami) -> Origami {
    Origami::new_unchecked(o.v().inverse(), o.h().clone())
}

fn act_t_pow(o: &Origami, e: i64) -> Origami {
    Origami::new_unchecked(o.h().clone(), o.v().compose(&o.h().pow(-e)))
}

/// Applies a word, rightmost syllable first; the result is not canonicalized.
pub fn act_word_raw(w: &StWord, o: &Origami) -> Origami {
    let mut cur = o.clone();
    for &(l, e) in w.0.iter().rev() {
        match l {
            Letter::S => {
                for _ in 0..e.rem_euclid(4) {
                    cur = act_s(&cur);
                }
            }
            Letter::T => cur = act_t_pow(&cur, e),
        }
    }
    cur
}

/// `A·o`, canonicalized.
pub fn act(m: &IntMatrix2, o: &Origami) -> Origami {
    act_word_raw(&decompose(m), o).canonicalize()
}

/// The affine group of an origami as a finite-index subgroup of SL(2,Z).
#[derive(Clone, Debug)]
pub struct VeechGroupData {
    /// Orbit points `A_i·o`, canonical, in BFS order.
    pub orbit: Vec<Origami>,
    /// Coset representatives `A_i` with their S/T words.
    pub reps: Vec<(StWord, IntMatrix2)>,
    pub s_action: Vec<usize>,
    pub t_action: Vec<usize>,
    /// Schreier generators `A_j⁻¹·X·A_i` from closure edges.
    pub generators: Vec<(StWord, IntMatrix2)>,
    pub contains_minus_identity: bool,
}

impl VeechGroupData {
    /// Index in SL(2,Z).
    pub fn sl2_index(&self) -> usize {
        self.orbit.len()
    }

    /// Index in PSL(2,Z).
    pub fn projective_index(&self) -> usize {
        if self.contains_minus_identity { self.orbit.len() } else { self.orbit.len() / 2 }
    }

    /// Class of every orbit point under ±I, numbered by first appearance.
    pub fn projective_classes(&self) -> (Vec<usize>, usize) {
        let n = self.orbit.len();
        let mut class = vec![usize::MAX; n];
        let mut count = 0;
        for i in 0..n {
            if class[i] != usize::MAX {
                continue;
            }
            class[i] = count;
            let j = self.s_action[self.s_action[i]];
            class[j] = count;
            count += 1;
        }
        (class, count)
    }
}

/// BFS over the SL(2,Z)-orbit of the canonical class of `o`.
pub fn veech_group(o: &Origami, bound: usize) -> Result<VeechGroupData, Error> {
    let start = o.canonicalize();
    let mut index: HashMap<Origami, usize> = HashMap::new();
    let mut orbit = vec![start.clone()];
    let mut reps = vec![(StWord::default(), IntMatrix2::I)];
    index.insert(start, 0);
    let mut s_action = Vec::new();
    let mut t_action = Vec::new();
    let mut generators: Vec<(StWord, IntMatrix2)> = Vec::new();
    let mut head = 0;
    while head < orbit.len() {
        let p = orbit[head].clone();
        for (l, img) in [(Letter::S, act_s(&p)), (Letter::T, act_t_pow(&p, 1))] {
            let q = img.canonicalize();
            let (w_i, m_i) = reps[head].clone();
            let xw = StWord::letter(l).mul(&w_i);
            let target = match index.get(&q) {
                Some(&j) => {
                    let (w_j, _) = &reps[j];
                    let g = w_j.inverse().mul(&xw);
                    let gm = g.matrix();
                    if gm != IntMatrix2::I {
                        generators.push((g, gm));
                    }
                    j
                }
                None => {
                    if orbit.len() >= bound {
                        return Err(Error::BoundExceeded { bound });
                    }
                    let j = orbit.len();
                    let xm = match l {
                        Letter::S => IntMatrix2::S,
                        Letter::T => IntMatrix2::T,
                    }
                    .mul(&m_i);
                    index.insert(q.clone(), j);
                    orbit.push(q);
                    reps.push((xw, xm));
                    j
                }
            };
            match l {
                Letter::S => s_action.push(target),
                Letter::T => t_action.push(target),
            }
        }
        head += 1;
    }
    let o0 = &orbit[0];
    let minus = Origami::new_unchecked(o0.h().inverse(), o0.v().inverse());
    let contains_minus_identity = minus.canonicalize() == *o0;
    Ok(VeechGroupData { orbit, reps, s_action, t_action, generators, contains_minus_identity })
}

/// Whether `m·o` is equivalent to `o`.
pub fn contains(vgd: &VeechGroupData, m: &IntMatrix2, o: &Origami) -> bool {
    let _ = vgd;
    act(m, o) == o.canonicalize()
}

/// Γ(2) ⊆ Γ on generators and −I, and projective index 6.
pub fn equals_gamma2(vgd: &VeechGroupData, o: &Origami) -> bool {
    let g1 = IntMatrix2 { a: 1, b: 2, c: 0, d: 1 };
    let g2 = IntMatrix2 { a: 1, b: 0, c: 2, d: 1 };
    contains(vgd, &g1, o) && contains(vgd, &g2, o) && vgd.contains_minus_identity && vgd.projective_index() == 6
}

#[derive(Clone, Debug, Serialize)]
pub struct Cusp {
    pub width: usize,
    pub representative: IntMatrix2,
    /// Horizontal maximal cylinders of `representative·o`.
    pub node_count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CuspReport {
    pub cusps: Vec<Cusp>,
    pub e2: usize,
    pub e3: usize,
    pub curve_genus: usize,
    /// Cusps whose node count reaches `3g − 3` for the surface genus `g ≥ 2`.
    pub maximally_degenerate: Vec<usize>,
}

pub fn cusp_report(o: &Origami, vgd: &VeechGroupData) -> Result<CuspReport, Error> {
    let (class, count) = vgd.projective_classes();
    let mut first = vec![usize::MAX; count];
    for (i, &c) in class.iter().enumerate() {
        if first[c] == usize::MAX {
            first[c] = i;
        }
    }
    let on_class = |act: &Vec<usize>, c: usize| class[act[first[c]]];
    let mut seen = vec![false; count];
    let mut cusps = Vec::new();
    for c in 0..count {
        if seen[c] {
            continue;
        }
        let mut width = 0;
        let mut k = c;
        while !seen[k] {
            seen[k] = true;
            width += 1;
            k = on_class(&vgd.t_action, k);
        }
        let rep_idx = first[c];
        let node_count = flatgeom::cylinder_decomposition(&vgd.orbit[rep_idx], Direction::HORIZONTAL).cylinders.len();
        cusps.push(Cusp { width, representative: vgd.reps[rep_idx].1, node_count });
    }
    let e2 = (0..count).filter(|&c| on_class(&vgd.s_action, c) == c).count();
    let e3 = (0..count).filter(|&c| on_class(&vgd.s_action, on_class(&vgd.t_action, c)) == c).count();
    let twelve_g = 12 + count as i64 - 3 * e2 as i64 - 4 * e3 as i64 - 6 * cusps.len() as i64;
    if twelve_g < 0 || twelve_g % 12 != 0 {
        return Err(Error::Verification(format!(
            "genus formula gives {}/12 for index {}, e2 {}, e3 {}, {} cusps",
            twelve_g,
            count,
            e2,
            e3,
            cusps.len()
        )));
    }
    let g = o.singularity_data().genus;
    let maximally_degenerate = if g >= 2 {
        cusps.iter().enumerate().filter(|(_, c)| c.node_count == 3 * g - 3).map(|(i, _)| i).collect()
    } else {
        Vec::new()
    };
    Ok(CuspReport { cusps, e2, e3, curve_genus: (twelve_g / 12) as usize, maximally_degenerate })
}

/// Whether `o2` lies in the SL(2,Z)-orbit of `o1`.
pub fn same_teichmueller_curve(o1: &Origami, o2: &Origami, bound: usize) -> Result<bool, Error> {
    if o1.degree() != o2.degree() || o1.singularity_data() != o2.singularity_data() {
        return Ok(false);
    }
    let vgd = veech_group(o1, bound)?;
    let target = o2.canonicalize();
    Ok(vgd.orbit.contains(&target))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposition_reproduces_matrices() {
        for &(a, b, c, d) in &[(1, 0, 0, 1), (0, -1, 1, 0), (2, 1, 1, 1), (-1, 0, 0, -1), (5, 3, 3, 2), (1, -7, 0, 1), (-3, 2, -5, 3)] {
            let m = IntMatrix2::new(a, b, c, d).unwrap();
            assert_eq!(decompose(&m).matrix(), m);
        }
    }

    #[test]
    fn basic_actions() {
        let l = Origami::builtin("L22").unwrap();
        assert_eq!(act(&IntMatrix2::I, &l), l.canonicalize());
        let mut cur = l.clone();
        for _ in 0..4 {
            cur = act(&IntMatrix2::S, &cur);
        }
        assert_eq!(cur, l.canonicalize());
        // T by hand: v·h⁻¹ = (12)·(23) = (123)
        let t = act(&IntMatrix2::T, &l);
        let hand = Origami::from_cycles(3, &[vec![2, 3]], &[vec![1, 2, 3]]).unwrap();
        assert_eq!(t, hand.canonicalize());
    }

    #[test]
    fn torus_group_is_everything() {
        let t = Origami::builtin("torus").unwrap();
        let vg = veech_group(&t, 10).unwrap();
        assert_eq!(vg.projective_index(), 1);
        let cr = cusp_report(&t, &vg).unwrap();
        assert_eq!(cr.cusps.len(), 1);
        assert_eq!((cr.cusps[0].width, cr.cusps[0].node_count, cr.curve_genus), (1, 1, 0));
    }

    #[test]
    fn l22_group() {
        let l = Origami::builtin("L22").unwrap();
        let vg = veech_group(&l, 100).unwrap();
        assert_eq!(vg.projective_index(), 3);
        assert!(contains(&vg, &IntMatrix2::S, &l));
        assert!(!contains(&vg, &IntMatrix2::T, &l));
        let cr = cusp_report(&l, &vg).unwrap();
        assert_eq!(cr.cusps.len(), 2);
        assert_eq!(cr.cusps.iter().map(|c| c.width).sum::<usize>(), 3);
        for g in &vg.generators {
            assert!(contains(&vg, &g.1, &l));
        }
    }

    #[test]
    fn s2_group_is_gamma2() {
        let s = Origami::builtin("S2").unwrap();
        let vg = veech_group(&s, 100).unwrap();
        assert_eq!(vg.projective_index(), 6);
        assert!(equals_gamma2(&vg, &s));
        let cr = cusp_report(&s, &vg).unwrap();
        assert_eq!(cr.cusps.len(), 3);
        assert!(cr.cusps.iter().all(|c| c.width == 2));
        assert_eq!(cr.curve_genus, 0);
        assert_eq!(cr.maximally_degenerate.len(), 1);
        assert_eq!(cr.cusps[cr.maximally_degenerate[0]].node_count, 3);
    }

    #[test]
    fn orbit_comparisons() {
        let a = Origami::builtin("L22").unwrap();
        let b = Origami::from_cycles(3, &[vec![1, 2, 3]], &[vec![1, 2]]).unwrap();
        assert!(same_teichmueller_curve(&a, &b, 100).unwrap());
        let s = Origami::builtin("S2").unwrap();
        assert!(!same_teichmueller_curve(&a, &s, 100).unwrap());
        assert!(matches!(veech_group(&s, 2), Err(Error::BoundExceeded { .. })));
    }
}
