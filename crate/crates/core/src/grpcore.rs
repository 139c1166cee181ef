//! Permutations, free-group words and coset machinery.
//!
//! Permutations act on the left: `p.compose(&q)` is `p·q`, which applies `q`
//! first. Symbols are stored 0-based and printed 1-based. A [`Word`] is
//! evaluated in an action the same way, so the rightmost syllable acts first.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::Error;

/// A bijection of `{0, .., d-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(d: usize) -> Self {
        Permutation { images: (0..d as u32).collect() }
    }

    /// Builds a permutation from 0-based images.
    pub fn from_images(images: Vec<usize>) -> Result<Self, Error> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &i in &images {
            if i >= d || seen[i] {
                return Err(Error::Invalid(format!("images {:?} are not a bijection", images)));
            }
            seen[i] = true;
        }
        Ok(Permutation { images: images.into_iter().map(|i| i as u32).collect() })
    }

    /// Builds a permutation of degree `d` from 1-based cycles.
    pub fn from_cycles(d: usize, cycles: &[Vec<usize>]) -> Result<Self, Error> {
        let mut images: Vec<usize> = (0..d).collect();
        let mut touched = vec![false; d];
        for c in cycles {
            for &s in c {
                if s == 0 || s > d {
                    return Err(Error::Invalid(format!("symbol {} outside 1..{}", s, d)));
                }
                if touched[s - 1] {
                    return Err(Error::Invalid(format!("symbol {} appears twice in cycles", s)));
                }
                touched[s - 1] = true;
            }
            for k in 0..c.len() {
                images[c[k] - 1] = c[(k + 1) % c.len()] - 1;
            }
        }
        Permutation::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i as usize).collect()
    }

    /// `self·other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in compose");
        Permutation { images: other.images.iter().map(|&i| self.images[i as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    pub fn pow(&self, e: i64) -> Permutation {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = Permutation::identity(self.degree());
        let mut sq = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.compose(&sq);
            }
            sq = sq.compose(&sq);
            n >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    pub fn is_fixed_point_free_involution(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 != j && self.images[j as usize] == i as u32)
    }

    /// All cycles, 0-based, each starting at its least symbol, ordered by that symbol.
    pub fn cycles_with_fixed(&self) -> Vec<Vec<usize>> {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut out = Vec::new();
        for i in 0..d {
            if seen[i] {
                continue;
            }
            let mut c = Vec::new();
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                c.push(j);
                j = self.apply(j);
            }
            out.push(c);
        }
        out
    }

    /// Nontrivial cycles in 1-based notation, fixed points omitted.
    pub fn to_cycles(&self) -> Vec<Vec<usize>> {
        self.cycles_with_fixed()
            .into_iter()
            .filter(|c| c.len() > 1)
            .map(|c| c.into_iter().map(|i| i + 1).collect())
            .collect()
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles_with_fixed().len()
    }

    /// Conjugate `g·self·g⁻¹`.
    pub fn conjugate_by(&self, g: &Permutation) -> Permutation {
        g.compose(self).compose(&g.inverse())
    }

    /// Relabel through `label`: the result sends `label[i]` to `label[self(i)]`.
    pub fn relabel(&self, label: &[usize]) -> Permutation {
        let mut images = vec![0u32; self.degree()];
        for i in 0..self.degree() {
            images[label[i]] = label[self.apply(i)] as u32;
        }
        Permutation { images }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs = self.to_cycles();
        if cs.is_empty() {
            return write!(f, "()");
        }
        for c in cs {
            let parts: Vec<String> = c.iter().map(|s| s.to_string()).collect();
            write!(f, "({})", parts.join(","))?;
        }
        Ok(())
    }
}

/// Sorted cycle lengths, summing to the degree.
pub fn cycle_type(p: &Permutation) -> Vec<usize> {
    let mut t: Vec<usize> = p.cycles_with_fixed().iter().map(|c| c.len()).collect();
    t.sort_unstable();
    t
}

fn check_degrees(gens: &[Permutation], d: usize) -> Result<(), Error> {
    for g in gens {
        if g.degree() != d {
            return Err(Error::Invalid(format!("generator of degree {} in a degree-{} action", g.degree(), d)));
        }
    }
    Ok(())
}

fn orbit_of(gens: &[Permutation], d: usize, start: usize) -> Vec<bool> {
    let mut seen = vec![false; d];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(i) = stack.pop() {
        for g in gens {
            let j = g.apply(i);
            if !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen
}

/// All elements of `⟨gens⟩`, identity first, by breadth-first closure.
/// Errors once more than `bound` elements appear.
pub fn enumerate_group(gens: &[Permutation], bound: usize) -> Result<Vec<Permutation>, Error> {
    let d = gens.first().map(|g| g.degree()).unwrap_or(0);
    check_degrees(gens, d)?;
    let id = Permutation::identity(d);
    let mut seen: std::collections::HashSet<Vec<usize>> = std::collections::HashSet::from([id.images()]);
    let mut elems = vec![id];
    let mut i = 0;
    while i < elems.len() {
        for g in gens {
            let p = g.compose(&elems[i]);
            if seen.insert(p.images()) {
                if elems.len() >= bound {
                    return Err(Error::BoundExceeded { bound });
                }
                elems.push(p);
            }
        }
        i += 1;
    }
    Ok(elems)
}

pub fn is_transitive(gens: &[Permutation], d: usize) -> Result<bool, Error> {
    check_degrees(gens, d)?;
    if d == 0 {
        return Ok(false);
    }
    Ok(orbit_of(gens, d, 0).into_iter().all(|b| b))
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Least block system with `0` and `k` in one block.
fn minimal_block_with(gens: &[Permutation], d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(d);
    let mut queue = VecDeque::new();
    uf.union(0, k);
    queue.push_back((0, k));
    while let Some((a, b)) = queue.pop_front() {
        for g in gens {
            let (ga, gb) = (g.apply(a), g.apply(b));
            if uf.union(ga, gb) {
                queue.push_back((ga, gb));
            }
        }
    }
    let mut blocks: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..d {
        let r = uf.find(i);
        blocks.entry(r).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = blocks.into_values().collect();
    out.sort();
    out
}

/// Nontrivial block systems generated by one pair `{1, k}`, as 1-based partitions.
///
/// Every minimal block system is of this form. The list is empty iff the action
/// is primitive.
pub fn block_systems(gens: &[Permutation], d: usize) -> Result<Vec<Vec<Vec<usize>>>, Error> {
    if !is_transitive(gens, d)? {
        return Err(Error::Invalid("block systems need a transitive action".into()));
    }
    let mut found: Vec<Vec<Vec<usize>>> = Vec::new();
    for k in 1..d {
        let sys = minimal_block_with(gens, d, k);
        if sys.len() > 1 && !found.contains(&sys) {
            found.push(sys);
        }
    }
    found.sort_by_key(|s| std::cmp::Reverse(s.len()));
    Ok(found
        .into_iter()
        .map(|s| s.into_iter().map(|b| b.into_iter().map(|i| i + 1).collect()).collect())
        .collect())
}

/// BFS relabeling of `(h, v)` from `start` with edge order h, h⁻¹, v, v⁻¹.
fn bfs_labels(gens4: &[&Permutation; 4], d: usize, start: usize) -> Vec<usize> {
    let mut label = vec![usize::MAX; d];
    let mut order = Vec::with_capacity(d);
    label[start] = 0;
    order.push(start);
    let mut head = 0;
    while head < order.len() {
        let i = order[head];
        head += 1;
        for g in gens4.iter() {
            let j = g.apply(i);
            if label[j] == usize::MAX {
                label[j] = order.len();
                order.push(j);
            }
        }
    }
    label
}

/// Canonical representative of the simultaneous-conjugacy class of a transitive pair.
pub fn canonical_pair(h: &Permutation, v: &Permutation) -> Result<(Permutation, Permutation), Error> {
    let d = h.degree();
    if v.degree() != d {
        return Err(Error::Invalid("h and v have different degrees".into()));
    }
    if !is_transitive(&[h.clone(), v.clone()], d)? {
        return Err(Error::Invalid("pair is not transitive".into()));
    }
    Ok(canonical_pair_unchecked(h, v))
}

pub(crate) fn canonical_pair_unchecked(h: &Permutation, v: &Permutation) -> (Permutation, Permutation) {
    let d = h.degree();
    let (hi, vi) = (h.inverse(), v.inverse());
    let gens4 = [h, &hi, v, &vi];
    let mut best: Option<(Vec<u32>, Vec<u32>)> = None;
    for s in 0..d {
        let label = bfs_labels(&gens4, d, s);
        let nh = h.relabel(&label).images;
        // compare h first; skip v when h already loses
        if let Some((bh, bv)) = &best {
            match nh.cmp(bh) {
                std::cmp::Ordering::Greater => continue,
                std::cmp::Ordering::Equal => {
                    let nv = v.relabel(&label).images;
                    if nv < *bv {
                        best = Some((nh, nv));
                    }
                    continue;
                }
                std::cmp::Ordering::Less => {}
            }
        }
        let nv = v.relabel(&label).images;
        best = Some((nh, nv));
    }
    let (bh, bv) = best.expect("degree is positive");
    (Permutation { images: bh }, Permutation { images: bv })
}

/// A freely reduced word: `(generator, exponent)` syllables, exponents nonzero,
/// neighbours on different generators.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word {
    syl: Vec<(usize, i64)>,
}

impl Word {
    pub fn empty() -> Self {
        Word { syl: Vec::new() }
    }

    pub fn gen(i: usize) -> Self {
        Word { syl: vec![(i, 1)] }
    }

    pub fn gen_pow(i: usize, e: i64) -> Self {
        Word::from_syllables(&[(i, e)])
    }

    pub fn from_syllables(s: &[(usize, i64)]) -> Self {
        let mut w = Word::empty();
        for &(g, e) in s {
            w.push(g, e);
        }
        w
    }

    /// Builds from signed 1-based letters: `3` is generator 2, `-3` its inverse.
    pub fn from_letters(letters: &[i64]) -> Self {
        let mut w = Word::empty();
        for &l in letters {
            assert!(l != 0, "letter 0 is not a generator");
            w.push(l.unsigned_abs() as usize - 1, l.signum());
        }
        w
    }

    fn push(&mut self, g: usize, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.syl.last_mut() {
            if last.0 == g {
                last.1 += e;
                if last.1 == 0 {
                    self.syl.pop();
                }
                return;
            }
        }
        self.syl.push((g, e));
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syl
    }

    pub fn is_empty(&self) -> bool {
        self.syl.is_empty()
    }

    pub fn len(&self) -> usize {
        self.syl.iter().map(|s| s.1.unsigned_abs() as usize).sum()
    }

    /// Letters as `(generator, ±1)`, left to right.
    pub fn letters(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.syl.iter().flat_map(|&(g, e)| std::iter::repeat_n((g, e.signum()), e.unsigned_abs() as usize))
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &(g, e) in &other.syl {
            w.push(g, e);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word { syl: self.syl.iter().rev().map(|&(g, e)| (g, -e)).collect() }
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut w = Word::empty();
        for _ in 0..e.unsigned_abs() {
            w = w.mul(&base);
        }
        w
    }

    /// `[a, b] = a·b·a⁻¹·b⁻¹`.
    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.mul(b).mul(&a.inverse()).mul(&b.inverse())
    }

    pub fn exponent_sum(&self, g: usize) -> i64 {
        self.syl.iter().filter(|s| s.0 == g).map(|s| s.1).sum()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.syl.iter().map(|s| s.0).max()
    }

    /// Image under the homomorphism sending generator `i` to `images[i]`.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut w = Word::empty();
        for &(g, e) in &self.syl {
            w = w.mul(&images[g].pow(e));
        }
        w
    }

    /// Evaluates in a left action; the rightmost syllable acts first.
    pub fn eval(&self, gens: &[Permutation]) -> Permutation {
        let d = gens.first().map(|g| g.degree()).unwrap_or(0);
        let mut p = Permutation::identity(d);
        for &(g, e) in &self.syl {
            p = p.compose(&gens[g].pow(e));
        }
        p
    }

    /// Image of one point, without building the full permutation.
    pub fn act_on(&self, gens: &[Permutation], mut i: usize) -> usize {
        for &(g, e) in self.syl.iter().rev() {
            if e > 0 {
                for _ in 0..e {
                    i = gens[g].apply(i);
                }
            } else {
                for _ in 0..(-e) {
                    i = gens[g].images.iter().position(|&j| j as usize == i).unwrap();
                }
            }
        }
        i
    }

    /// Cyclically reduced form (conjugate with no cancelling ends).
    pub fn cyclically_reduced(&self) -> Word {
        let mut s = self.syl.clone();
        loop {
            if s.len() >= 2 && s[0].0 == s[s.len() - 1].0 {
                let last = s.pop().unwrap();
                s[0].1 += last.1;
                if s[0].1 == 0 {
                    s.remove(0);
                }
            } else {
                break;
            }
        }
        Word { syl: s }
    }

    /// Renders with generator names; exponents as `^e`.
    pub fn render(&self, names: &[&str]) -> String {
        if self.syl.is_empty() {
            return "1".into();
        }
        self.syl
            .iter()
            .map(|&(g, e)| {
                let n = names.get(g).map(|s| s.to_string()).unwrap_or_else(|| format!("g{}", g + 1));
                if e == 1 { n } else { format!("{}^{}", n, e) }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&[]))
    }
}

/// Coset data for the point stabilizer of a transitive left action of a free group.
#[derive(Clone, Debug)]
pub struct SchreierData {
    pub gens: Vec<Permutation>,
    pub degree: usize,
    pub basepoint: usize,
    /// `transversal[i]` sends the basepoint to `i`.
    pub transversal: Vec<Word>,
    /// Free generators of the stabilizer, one per non-tree edge.
    pub subgroup_gens: Vec<Word>,
    /// `edge_gen[c][g]` is the index of the Schreier generator on edge `(c, g)`, if nontrivial.
    pub edge_gen: Vec<Vec<Option<usize>>>,
}

impl SchreierData {
    /// BFS transversal, generators in index order.
    pub fn new(gens: Vec<Permutation>, basepoint: usize) -> Result<Self, Error> {
        let d = gens.first().map(|g| g.degree()).ok_or_else(|| Error::Invalid("no generators".into()))?;
        if !is_transitive(&gens, d)? {
            return Err(Error::Invalid("coset action is not transitive".into()));
        }
        let mut tr: Vec<Option<Word>> = vec![None; d];
        tr[basepoint] = Some(Word::empty());
        let mut queue = VecDeque::from([basepoint]);
        while let Some(c) = queue.pop_front() {
            for (gi, g) in gens.iter().enumerate() {
                let n = g.apply(c);
                if tr[n].is_none() {
                    tr[n] = Some(Word::gen(gi).mul(tr[c].as_ref().unwrap()));
                    queue.push_back(n);
                }
            }
        }
        Self::from_transversal(gens, basepoint, tr.into_iter().map(|w| w.unwrap()).collect())
    }

    /// Uses a given transversal; it must be closed under deleting the first letter.
    pub fn from_transversal(gens: Vec<Permutation>, basepoint: usize, transversal: Vec<Word>) -> Result<Self, Error> {
        let d = gens[0].degree();
        check_degrees(&gens, d)?;
        if transversal.len() != d {
            return Err(Error::Invalid("transversal size differs from the degree".into()));
        }
        for (i, t) in transversal.iter().enumerate() {
            if t.act_on(&gens, basepoint) != i {
                return Err(Error::Invalid(format!("transversal word {} does not reach coset {}", i + 1, i + 1)));
            }
        }
        let mut subgroup_gens = Vec::new();
        let mut edge_gen = vec![vec![None; gens.len()]; d];
        for c in 0..d {
            for (gi, g) in gens.iter().enumerate() {
                let n = g.apply(c);
                let s = transversal[n].inverse().mul(&Word::gen(gi)).mul(&transversal[c]);
                if !s.is_empty() {
                    edge_gen[c][gi] = Some(subgroup_gens.len());
                    subgroup_gens.push(s);
                }
            }
        }
        let expected = d * (gens.len().saturating_sub(1)) + 1;
        if subgroup_gens.len() != expected {
            return Err(Error::Invalid(format!(
                "transversal is not a Schreier transversal: {} generators, expected {}",
                subgroup_gens.len(),
                expected
            )));
        }
        Ok(SchreierData { degree: d, basepoint, transversal, subgroup_gens, edge_gen, gens })
    }

    pub fn stabilizes(&self, w: &Word) -> bool {
        w.act_on(&self.gens, self.basepoint) == self.basepoint
    }

    /// Walks `w` from coset `start`, rightmost letter first, and reports the
    /// Schreier-generator letters met along the way in word order.
    pub fn trace(&self, w: &Word, start: usize) -> (Vec<(usize, i64)>, usize) {
        let inv: Vec<Permutation> = self.gens.iter().map(|g| g.inverse()).collect();
        let mut c = start;
        let mut rev: Vec<(usize, i64)> = Vec::new();
        let letters: Vec<(usize, i64)> = w.letters().collect();
        for &(g, s) in letters.iter().rev() {
            if s > 0 {
                if let Some(k) = self.edge_gen[c][g] {
                    rev.push((k, 1));
                }
                c = self.gens[g].apply(c);
            } else {
                let p = inv[g].apply(c);
                if let Some(k) = self.edge_gen[p][g] {
                    rev.push((k, -1));
                }
                c = p;
            }
        }
        rev.reverse();
        (rev, c)
    }
}

/// Rewrites a stabilizer element in the free Schreier generators.
pub fn schreier_rewrite(sd: &SchreierData, w: &Word) -> Result<Word, Error> {
    let (letters, end) = sd.trace(w, sd.basepoint);
    if end != sd.basepoint {
        return Err(Error::Invalid("word does not stabilize the basepoint".into()));
    }
    let mut out = Word::empty();
    for (k, e) in letters {
        out.push(k, e);
    }
    Ok(out)
}

/// Action of the ambient free group on `(coset, sheet)` pairs, indexed `coset·m + sheet`.
pub fn induce_action(outer: &SchreierData, inner: &[Permutation]) -> Result<Vec<Permutation>, Error> {
    if inner.len() != outer.subgroup_gens.len() {
        return Err(Error::Invalid(format!(
            "{} inner permutations for {} subgroup generators",
            inner.len(),
            outer.subgroup_gens.len()
        )));
    }
    let m = inner.first().map(|p| p.degree()).unwrap_or(1);
    check_degrees(inner, m)?;
    let d = outer.degree;
    let mut out = Vec::new();
    for (gi, g) in outer.gens.iter().enumerate() {
        let mut images = vec![0usize; d * m];
        for c in 0..d {
            let nc = g.apply(c);
            for s in 0..m {
                let ns = match outer.edge_gen[c][gi] {
                    Some(k) => inner[k].apply(s),
                    None => s,
                };
                images[c * m + s] = nc * m + ns;
            }
        }
        out.push(Permutation::from_images(images)?);
    }
    Ok(out)
}

/// Nielsen generators of Aut(F₂) as images of `(x, y)`.
pub fn nielsen_automorphisms() -> Vec<[Word; 2]> {
    let x = Word::gen(0);
    let y = Word::gen(1);
    vec![[y.clone(), x.clone()], [x.inverse(), y.clone()], [x.mul(&y), y]]
}

/// Whether the stabilizer is carried to itself by every Nielsen generator.
pub fn is_characteristic(sd: &SchreierData) -> bool {
    assert_eq!(sd.gens.len(), 2, "characteristic test is for the rank-2 free group");
    nielsen_automorphisms()
        .iter()
        .all(|phi| sd.subgroup_gens.iter().all(|s| sd.stabilizes(&s.substitute(phi))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(d: usize, c: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(d, &c.iter().map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn cycle_types() {
        assert_eq!(cycle_type(&p(4, &[&[1, 2], &[3, 4]])), vec![2, 2]);
        assert_eq!(cycle_type(&Permutation::identity(3)), vec![1, 1, 1]);
        let h = p(4, &[&[1, 2], &[3, 4]]);
        let v = p(4, &[&[2, 3]]);
        let c = h.compose(&v).compose(&h.inverse()).compose(&v.inverse());
        // by hand, rightmost first: 1→1→2→3→4 and 2→3→4→4→3
        assert_eq!(c, p(4, &[&[1, 4], &[2, 3]]));
        assert_eq!(cycle_type(&c), vec![2, 2]);
    }

    #[test]
    fn composition_applies_right_first() {
        let a = p(3, &[&[1, 2]]);
        let b = p(3, &[&[2, 3]]);
        // (12)·(23): 2 → 3 → 3
        assert_eq!(a.compose(&b).apply(1), 2);
        assert_eq!(a.compose(&b), p(3, &[&[1, 2, 3]]));
    }

    #[test]
    fn transitivity() {
        assert!(is_transitive(&[p(3, &[&[2, 3]]), p(3, &[&[1, 2]])], 3).unwrap());
        assert!(!is_transitive(&[Permutation::identity(2)], 2).unwrap());
        assert!(is_transitive(&[p(4, &[&[1, 2], &[3, 4]]), p(4, &[&[2, 3]])], 4).unwrap());
        assert!(is_transitive(&[Permutation::identity(3)], 4).is_err());
    }

    #[test]
    fn blocks() {
        let g = [p(4, &[&[1, 2], &[3, 4]]), p(4, &[&[2, 3]])];
        let bs = block_systems(&g, 4).unwrap();
        assert!(bs.contains(&vec![vec![1, 4], vec![2, 3]]));
        // oracle: check each 2+2 partition for invariance
        let parts = [[[1, 2], [3, 4]], [[1, 3], [2, 4]], [[1, 4], [2, 3]]];
        for part in parts {
            let blk = |i: usize| if part[0].contains(&(i + 1)) { 0 } else { 1 };
            let inv = g.iter().all(|gg| {
                (0..4).all(|i| (0..4).all(|j| blk(i) != blk(j) || blk(gg.apply(i)) == blk(gg.apply(j))))
            });
            let sys = vec![part[0].to_vec(), part[1].to_vec()];
            assert_eq!(inv, bs.contains(&sys));
        }
        assert!(block_systems(&[p(3, &[&[1, 2, 3]]), p(3, &[&[1, 2]])], 3).unwrap().is_empty());
        assert!(block_systems(&[Permutation::identity(1)], 1).unwrap().is_empty());
    }

    #[test]
    fn canonical_forms() {
        let h = p(3, &[&[2, 3]]);
        let v = p(3, &[&[1, 2]]);
        let g = p(3, &[&[1, 2, 3]]);
        let c1 = canonical_pair(&h, &v).unwrap();
        let c2 = canonical_pair(&h.conjugate_by(&g), &v.conjugate_by(&g)).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(canonical_pair(&c1.0, &c1.1).unwrap(), c1);
        let a = canonical_pair(&p(3, &[&[1, 2, 3]]), &p(3, &[&[1, 2]])).unwrap();
        assert_ne!(a, c1);
    }

    #[test]
    fn canonical_matches_conjugator_search() {
        let h1 = p(4, &[&[1, 2], &[3, 4]]);
        let v1 = p(4, &[&[2, 3]]);
        let h2 = p(4, &[&[1, 3], &[2, 4]]);
        let v2 = p(4, &[&[3, 4]]);
        let mut exists = false;
        for perm in all_perms(4) {
            let g = Permutation::from_images(perm).unwrap();
            if h1.conjugate_by(&g) == h2 && v1.conjugate_by(&g) == v2 {
                exists = true;
            }
        }
        let same = canonical_pair(&h1, &v1).unwrap() == canonical_pair(&h2, &v2).unwrap();
        assert_eq!(exists, same);
    }

    pub(crate) fn all_perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for q in all_perms(n - 1) {
            for pos in 0..n {
                let mut r = q.clone();
                r.insert(pos, n - 1);
                out.push(r);
            }
        }
        out
    }

    fn two_torsion_action() -> SchreierData {
        // cosets 00, 10, 01, 11 of the [2]-subgroup
        let x = Permutation::from_images(vec![1, 0, 3, 2]).unwrap();
        let y = Permutation::from_images(vec![2, 3, 0, 1]).unwrap();
        SchreierData::new(vec![x, y], 0).unwrap()
    }

    #[test]
    fn schreier_basics() {
        let sd = two_torsion_action();
        assert_eq!(sd.subgroup_gens.len(), 4 * 1 + 1);
        assert_eq!(schreier_rewrite(&sd, &Word::empty()).unwrap(), Word::empty());
        let r = schreier_rewrite(&sd, &Word::gen_pow(0, 2)).unwrap();
        assert_eq!(r.len(), 1);
        assert!(schreier_rewrite(&sd, &Word::gen(0)).is_err());
        // evaluation oracle: rewritten word re-expands to the original
        let w = Word::from_letters(&[1, 2, 1, -2, -1, 1, 2, 2]);
        assert!(sd.stabilizes(&w));
        assert!(!sd.stabilizes(&w.mul(&Word::from_letters(&[-1]))));
        let r = schreier_rewrite(&sd, &w).unwrap();
        assert_eq!(r.substitute(&sd.subgroup_gens), w);
    }

    #[test]
    fn induced_actions() {
        let sd = two_torsion_action();
        let triv = vec![Permutation::identity(1); 5];
        let a = induce_action(&sd, &triv).unwrap();
        assert_eq!(a, sd.gens);
        assert!(induce_action(&sd, &triv[..3]).is_err());
    }

    #[test]
    fn characteristic_subgroups() {
        assert!(is_characteristic(&two_torsion_action()));
        let whole = SchreierData::new(vec![Permutation::identity(1), Permutation::identity(1)], 0).unwrap();
        assert!(is_characteristic(&whole));
        // point stabilizer in the L(2,2) action h=(23), v=(12)
        let l = SchreierData::new(vec![p(3, &[&[2, 3]]), p(3, &[&[1, 2]])], 0).unwrap();
        assert!(!is_characteristic(&l));
    }
}
