//! Braid-group quotients, their finite-index subgroups and abelianization
//! bookkeeping with formal exponents.
//!
//! Braid generators `τ₁..τ_{n-1}` are generators `0..n-2` of a [`Word`].
//! The finite image of a braid word is its permutation of the strands, with
//! `τᵢ ↦ (i, i+1)`. Subgroups are described through that image, and the
//! abelianization of a subgroup is computed by Reidemeister–Schreier rewriting
//! followed by unit elimination and a Smith normal form.

mod snf;
pub mod script;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::grpcore::{self, Permutation, SchreierData, Word};
use crate::Error;

pub use script::{verify_gt_ledger, verify_ledger_script, LedgerReport, LedgerScript, StepOutcome, S2_LEDGER};
pub use snf::{smith_normal_form, Snf};

/// A finitely presented group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: usize,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: usize, relators: Vec<Word>) -> Result<Self, Error> {
        for r in &relators {
            if let Some(g) = r.max_generator() {
                if g >= generators {
                    return Err(Error::Invalid(format!("relator uses generator {} of {}", g + 1, generators)));
                }
            }
        }
        Ok(Presentation { generators, relators })
    }

    pub fn free(rank: usize) -> Self {
        Presentation { generators: rank, relators: Vec::new() }
    }

    /// Artin presentation of `B_n`.
    pub fn braid(n: usize) -> Self {
        let g = n.saturating_sub(1);
        let mut rel = Vec::new();
        for i in 0..g {
            for j in i + 1..g {
                let (a, b) = (Word::gen(i), Word::gen(j));
                if j == i + 1 {
                    let l = a.mul(&b).mul(&a);
                    let r = b.mul(&a).mul(&b);
                    rel.push(l.mul(&r.inverse()));
                } else {
                    rel.push(Word::commutator(&a, &b));
                }
            }
        }
        Presentation { generators: g, relators: rel }
    }

    /// `B_n / ⟨y_n⟩`, the sphere braid group.
    pub fn sphere_braid(n: usize) -> Self {
        let mut p = Self::braid(n);
        p.relators.push(y(n));
        p
    }

    /// `B_n / ⟨w_n, y_n⟩`, the mapping class group of the sphere with `n`
    /// unordered marked points.
    pub fn sphere_mapping_class(n: usize) -> Self {
        let mut p = Self::braid(n);
        p.relators.push(w(n));
        p.relators.push(y(n));
        p
    }

    pub fn with_relators(mut self, extra: impl IntoIterator<Item = Word>) -> Self {
        self.relators.extend(extra);
        self
    }
}

/// `τᵢ` for 1-based `i`.
pub fn tau(i: usize) -> Word {
    Word::gen(i - 1)
}

fn y(i: usize) -> Word {
    let mut s: Vec<(usize, i64)> = (1..i).rev().map(|k| (k - 1, 1)).collect();
    s.extend((1..i).map(|k| (k - 1, 1)));
    Word::from_syllables(&s)
}

fn w(i: usize) -> Word {
    (2..=i).fold(Word::empty(), |acc, k| acc.mul(&y(k)))
}

fn x(i: usize, j: usize) -> Word {
    let (i, j) = (i.min(j), i.max(j));
    let c = Word::from_syllables(&(i + 1..j).rev().map(|k| (k - 1, 1)).collect::<Vec<_>>());
    c.mul(&Word::gen_pow(i - 1, 2)).mul(&c.inverse())
}

fn z3() -> Word {
    Word::from_letters(&[2, 3]).pow(3)
}

fn parse_index(s: &str) -> Option<usize> {
    s.parse().ok()
}

/// Braid-group words by name: `t<i>`, `y<i>`, `w<i>`, `x<ij>`, `z3`, `k5`,
/// `k6`, `k6_printed`, `w3`, `epsilon`.
///
/// `k6` is `[B, ABA]` with `A = τ₂τ₄`, `B = τ₁²τ₃τ₅²`. The variant with a
/// single `τ₅` in `B` is `k6_printed`; it does not lie in the pure braid group.
pub fn named_word(n: usize, name: &str) -> Result<Word, Error> {
    let need = |k: usize| -> Result<(), Error> {
        if n < k {
            Err(Error::Invalid(format!("{} needs at least {} strands, got {}", name, k, n)))
        } else {
            Ok(())
        }
    };
    let bad = || Error::Invalid(format!("unknown or out-of-range braid word {}", name));
    match name {
        "z3" => {
            need(4)?;
            Ok(z3())
        }
        "k5" => {
            need(4)?;
            let a = Word::from_letters(&[1, 3]);
            let b = Word::gen(1).mul(&z3());
            Ok(Word::commutator(&a, &b.mul(&a).mul(&b)))
        }
        "k6" | "k6_printed" => {
            need(6)?;
            let a = Word::from_letters(&[2, 4]);
            if name == "k6" {
                let b = Word::from_letters(&[1, 1, 3, 5, 5]);
                Ok(Word::commutator(&b, &a.mul(&b).mul(&a)))
            } else {
                let b = Word::from_letters(&[1, 1, 3, 5]);
                Ok(Word::commutator(&a, &b.mul(&a).mul(&b)))
            }
        }
        "w3" => {
            need(3)?;
            Ok(Word::from_letters(&[1, 2]).pow(3))
        }
        "epsilon" => {
            need(3)?;
            Ok(Word::from_letters(&[1, 2]).pow(6))
        }
        _ => {
            let (head, rest) = name.split_at(1);
            match head {
                "t" => {
                    let i = parse_index(rest).ok_or_else(bad)?;
                    if i == 0 || i >= n {
                        return Err(bad());
                    }
                    Ok(tau(i))
                }
                "y" | "w" => {
                    let i = parse_index(rest).ok_or_else(bad)?;
                    if i < 2 || i > n {
                        return Err(bad());
                    }
                    Ok(if head == "y" { y(i) } else { w(i) })
                }
                "x" if rest.len() == 2 => {
                    let i = parse_index(&rest[..1]).ok_or_else(bad)?;
                    let j = parse_index(&rest[1..]).ok_or_else(bad)?;
                    if i == j || i == 0 || j == 0 || i > n || j > n {
                        return Err(bad());
                    }
                    Ok(x(i, j))
                }
                _ => Err(bad()),
            }
        }
    }
}

/// Transpositions `(i, i+1)` for `τᵢ`.
pub fn strand_permutations(n: usize) -> Vec<Permutation> {
    (0..n.saturating_sub(1))
        .map(|i| {
            let mut im: Vec<usize> = (0..n).collect();
            im.swap(i, i + 1);
            Permutation::from_images(im).expect("transposition")
        })
        .collect()
}

/// Class of a pure braid word in `P_n^ab`, coordinates `x_ij` for `i < j` in
/// lexicographic order. Computed from signed crossing counts of strand pairs.
pub fn pure_braid_class(n: usize, w: &Word) -> Result<Vec<i64>, Error> {
    let mut pos: Vec<usize> = (0..n).collect();
    let mut cnt = vec![0i64; n * (n - 1) / 2];
    for (g, s) in w.letters() {
        if g + 1 >= n {
            return Err(Error::Invalid(format!("generator t{} out of range for {} strands", g + 1, n)));
        }
        let (a, b) = (pos[g], pos[g + 1]);
        cnt[pair_index(n, a, b)] += s;
        pos.swap(g, g + 1);
    }
    if pos.iter().enumerate().any(|(i, &p)| i != p) {
        return Err(Error::Invalid("word is not a pure braid".into()));
    }
    Ok(cnt.into_iter().map(|c| c / 2).collect())
}

fn pair_index(n: usize, a: usize, b: usize) -> usize {
    let (i, j) = (a.min(b), a.max(b));
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Renders a pure-braid class as a product of `x_ij` powers.
pub fn render_xij(n: usize, v: &[i64]) -> String {
    let mut parts = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let e = v[pair_index(n, i, j)];
            if e == 1 {
                parts.push(format!("x{}{}", i + 1, j + 1));
            } else if e != 0 {
                parts.push(format!("x{}{}^{}", i + 1, j + 1, e));
            }
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

// ---------------------------------------------------------------------------
// Artin action

/// Image of `w` under the Artin action on the free group `⟨t₁..t_n⟩`:
/// `τᵢ: tᵢ ↦ tᵢt_{i+1}tᵢ⁻¹, t_{i+1} ↦ tᵢ`.
pub fn artin_images(n: usize, w: &Word) -> Result<Vec<Word>, Error> {
    if let Some(g) = w.max_generator() {
        if g + 1 >= n {
            return Err(Error::Invalid(format!("generator t{} out of range for {} strands", g + 1, n)));
        }
    }
    let mut img: Vec<Word> = (0..n).map(Word::gen).collect();
    let letters: Vec<(usize, i64)> = w.letters().collect();
    for &(g, s) in letters.iter().rev() {
        let mut sub: Vec<Word> = (0..n).map(Word::gen).collect();
        let (a, b) = (Word::gen(g), Word::gen(g + 1));
        if s > 0 {
            sub[g] = a.mul(&b).mul(&a.inverse());
            sub[g + 1] = a;
        } else {
            sub[g] = b.clone();
            sub[g + 1] = b.inverse().mul(&a).mul(&b);
        }
        for im in img.iter_mut() {
            *im = im.substitute(&sub);
        }
    }
    Ok(img)
}

/// Decides `w = 1` in `B_n` through the faithful Artin action.
pub fn artin_identity_check(n: usize, w: &Word) -> Result<bool, Error> {
    let img = artin_images(n, w)?;
    Ok(img.iter().enumerate().all(|(i, im)| *im == Word::gen(i)))
}

/// `w` commutes with every `τᵢ` in `B_n`.
pub fn is_central(n: usize, w: &Word) -> Result<bool, Error> {
    for i in 1..n {
        if !artin_identity_check(n, &Word::commutator(w, &tau(i)))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Tests whether `w`, read in `B_n / ⟨y_n⟩`, acts on the fundamental group
/// of the `n`-punctured sphere by an inner automorphism. Together with the
/// faithfulness of that outer action this decides triviality in the mapping
/// class group of the sphere, i.e. modulo the centre.
pub fn outer_action_trivial(n: usize, w: &Word) -> Result<bool, Error> {
    if n < 3 {
        return Ok(true);
    }
    let img = artin_images(n, w)?;
    // t_n = (t_1 ⋯ t_{n-1})⁻¹
    let mut sub: Vec<Word> = (0..n - 1).map(Word::gen).collect();
    sub.push((0..n - 1).fold(Word::empty(), |acc, i| acc.mul(&Word::gen(i))).inverse());
    let img: Vec<Word> = img[..n - 1].iter().map(|im| im.substitute(&sub)).collect();
    let Some(p) = conjugator_of_generator(&img[0], 0) else { return Ok(false) };
    let w1 = p.inverse().mul(&img[1]).mul(&p);
    let k = match w1.syllables() {
        [(1, 1)] => 0,
        [(0, k), (1, 1), (0, m)] if *k == -*m => *k,
        _ => return Ok(false),
    };
    let g = p.mul(&Word::gen_pow(0, k));
    Ok(img.iter().enumerate().all(|(i, im)| g.inverse().mul(im).mul(&g) == Word::gen(i)))
}

/// If `w = p·t_g·p⁻¹` (freely reduced, `p` not ending in `t_g^±`), returns `p`.
fn conjugator_of_generator(w: &Word, g: usize) -> Option<Word> {
    let s = w.syllables();
    if s.len() % 2 == 0 {
        return None;
    }
    let m = s.len() / 2;
    if s[m] != (g, 1) {
        return None;
    }
    let p = Word::from_syllables(&s[..m]);
    if p.inverse().syllables() != &s[m + 1..] {
        return None;
    }
    Some(p)
}

// ---------------------------------------------------------------------------
// Formal exponents

/// Symbols of a formal exponent. `Rho` is the Kummer-cocycle value; `E` is a
/// spare unknown for exponents on the right-hand side of an equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Symbol {
    Rho,
    Dl,
    Dm,
    Dr,
    A,
    E,
}

impl Symbol {
    pub const ALL: [Symbol; 6] = [Symbol::Rho, Symbol::Dl, Symbol::Dm, Symbol::Dr, Symbol::A, Symbol::E];

    pub fn name(self) -> &'static str {
        match self {
            Symbol::Rho => "rho",
            Symbol::Dl => "dl",
            Symbol::Dm => "dm",
            Symbol::Dr => "dr",
            Symbol::A => "a",
            Symbol::E => "e",
        }
    }

    pub fn from_name(s: &str) -> Option<Symbol> {
        Symbol::ALL.into_iter().find(|x| x.name() == s)
    }
}

/// Affine-linear integer expression in the [`Symbol`]s.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FormalExponent {
    coeffs: BTreeMap<Symbol, i64>,
    constant: i64,
}

impl FormalExponent {
    pub fn constant(c: i64) -> Self {
        FormalExponent { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn symbol(s: Symbol, k: i64) -> Self {
        let mut f = Self::constant(0);
        f.add_term(s, k);
        f
    }

    fn add_term(&mut self, s: Symbol, k: i64) {
        let e = self.coeffs.entry(s).or_insert(0);
        *e += k;
        if *e == 0 {
            self.coeffs.remove(&s);
        }
    }

    pub fn coeff(&self, s: Symbol) -> i64 {
        self.coeffs.get(&s).copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> i64 {
        self.constant
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn add(&self, o: &FormalExponent) -> FormalExponent {
        let mut r = self.clone();
        for (&s, &k) in &o.coeffs {
            r.add_term(s, k);
        }
        r.constant += o.constant;
        r
    }

    pub fn scale(&self, k: i64) -> FormalExponent {
        if k == 0 {
            return Self::constant(0);
        }
        FormalExponent { coeffs: self.coeffs.iter().map(|(&s, &c)| (s, c * k)).collect(), constant: self.constant * k }
    }

    pub fn neg(&self) -> FormalExponent {
        self.scale(-1)
    }

    /// Replaces `s` by `value`.
    pub fn substitute(&self, s: Symbol, value: &FormalExponent) -> FormalExponent {
        let k = self.coeff(s);
        let mut r = self.clone();
        r.coeffs.remove(&s);
        r.add(&value.scale(k))
    }

    pub fn eval(&self, assign: &BTreeMap<Symbol, i64>) -> Result<i64, Error> {
        let mut v = self.constant;
        for (s, &c) in &self.coeffs {
            let x = assign.get(s).ok_or_else(|| Error::Invalid(format!("no value for {}", s.name())))?;
            v += c * x;
        }
        Ok(v)
    }
}

impl fmt::Display for FormalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (s, &c) in &self.coeffs {
            let sign = if c < 0 { "-" } else if out.is_empty() { "" } else { "+" };
            let mag = if c.abs() == 1 { String::new() } else { c.abs().to_string() };
            out.push_str(&format!("{}{}{}", sign, mag, s.name()));
        }
        if self.constant != 0 || out.is_empty() {
            if self.constant >= 0 && !out.is_empty() {
                out.push('+');
            }
            out.push_str(&self.constant.to_string());
        }
        write!(f, "{}", out)
    }
}

impl std::str::FromStr for FormalExponent {
    type Err = Error;

    /// Parses sums like `dl+3rho`, `-2rho`, `4`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let err = || Error::Parse(format!("bad formal exponent {:?}", s));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(err());
        }
        let mut r = FormalExponent::constant(0);
        let b = t.as_bytes();
        let mut i = 0;
        while i < b.len() {
            let mut sign = 1;
            if b[i] == b'+' || b[i] == b'-' {
                if b[i] == b'-' {
                    sign = -1;
                }
                i += 1;
            } else if i > 0 {
                return Err(err());
            }
            let ds = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let num: Option<i64> = if i > ds { Some(t[ds..i].parse().map_err(|_| err())?) } else { None };
            let ls = i;
            while i < b.len() && b[i].is_ascii_alphabetic() {
                i += 1;
            }
            if i > ls {
                let sym = Symbol::from_name(&t[ls..i]).ok_or_else(err)?;
                r.add_term(sym, sign * num.unwrap_or(1));
            } else {
                r.constant += sign * num.ok_or_else(err)?;
            }
        }
        Ok(r)
    }
}

// ---------------------------------------------------------------------------
// Subgroup abelianization

/// Finite-index subgroup of a presented group, given through the finite
/// permutation image of the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subgroup {
    /// Kernel of the map to the permutation image.
    Kernel,
    /// Preimage of the stabilizer of a point.
    Stabilizer(usize),
}

/// Element of the abelianized module: torsion components reduced modulo
/// their invariant factors, then free components.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ModuleClass {
    pub torsion: Vec<i128>,
    pub free: Vec<i128>,
}

impl ModuleClass {
    pub fn is_zero(&self) -> bool {
        self.torsion.iter().chain(&self.free).all(|&x| x == 0)
    }

    pub fn is_torsion(&self) -> bool {
        self.free.iter().all(|&x| x == 0)
    }
}

/// Conjugation action of one element on the class of another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ActionKind {
    Fixes,
    Inverts,
    Other(ModuleClass),
}

/// Abelianization of a finite-index subgroup, with the map from words.
#[derive(Clone, Debug)]
pub struct SubgroupAbelianization {
    pub presentation: Presentation,
    pub images: Vec<Permutation>,
    pub subgroup: Subgroup,
    /// Relators imposed inside the subgroup only (rewritten from the basepoint).
    pub subgroup_relators: Vec<Word>,
    pub cosets: SchreierData,
    inverse_gens: Vec<Permutation>,
    /// Schreier generator `k` as a vector in Smith coordinates.
    gen_z: Vec<Vec<i128>>,
    /// Nonzero invariant factors; coordinates past them are free.
    diag: Vec<i128>,
    dim: usize,
    /// Exponent of the finite image group.
    pub exponent: i64,
    pub image_order: usize,
    relator_rows: Vec<BTreeMap<usize, i64>>,
}

const IMAGE_BOUND: usize = 1_000_000;

pub fn subgroup_abelianization(
    pres: &Presentation,
    perm_images: &[Permutation],
    subgroup: Subgroup,
) -> Result<SubgroupAbelianization, Error> {
    subgroup_abelianization_with(pres, perm_images, subgroup, &[])
}

/// As [`subgroup_abelianization`], additionally killing the given subgroup
/// elements (only these elements, not their conjugates).
pub fn subgroup_abelianization_with(
    pres: &Presentation,
    perm_images: &[Permutation],
    subgroup: Subgroup,
    subgroup_relators: &[Word],
) -> Result<SubgroupAbelianization, Error> {
    if perm_images.len() != pres.generators {
        return Err(Error::Invalid(format!(
            "{} permutation images for {} generators",
            perm_images.len(),
            pres.generators
        )));
    }
    if pres.generators == 0 {
        return Err(Error::Invalid("presentation has no generators".into()));
    }
    for (i, r) in pres.relators.iter().enumerate() {
        if !r.eval(perm_images).is_identity() {
            return Err(Error::Invalid(format!("relator {} is not satisfied by the permutation images", i + 1)));
        }
    }
    let (elements, exponent) = enumerate_image(perm_images)?;
    let coset_gens: Vec<Permutation> = match subgroup {
        Subgroup::Kernel => {
            let index: HashMap<Vec<usize>, usize> =
                elements.iter().enumerate().map(|(i, p)| (p.images(), i)).collect();
            perm_images
                .iter()
                .map(|g| {
                    let im: Vec<usize> = elements.iter().map(|e| index[&g.compose(e).images()]).collect();
                    Permutation::from_images(im).expect("regular action")
                })
                .collect()
        }
        Subgroup::Stabilizer(p) => {
            if p >= perm_images[0].degree() {
                return Err(Error::Invalid(format!("point {} outside the permutation domain", p + 1)));
            }
            perm_images.to_vec()
        }
    };
    let base = match subgroup {
        Subgroup::Kernel => 0,
        Subgroup::Stabilizer(p) => p,
    };
    let cosets = SchreierData::new(coset_gens, base)?;
    let inverse_gens: Vec<Permutation> = cosets.gens.iter().map(|g| g.inverse()).collect();
    let mut sab = SubgroupAbelianization {
        presentation: pres.clone(),
        images: perm_images.to_vec(),
        subgroup,
        subgroup_relators: subgroup_relators.to_vec(),
        cosets,
        inverse_gens,
        gen_z: Vec::new(),
        diag: Vec::new(),
        dim: 0,
        exponent,
        image_order: elements.len(),
        relator_rows: Vec::new(),
    };
    let mut rows = Vec::new();
    for c in 0..sab.cosets.degree {
        for r in &pres.relators {
            let (row, end) = sab.trace_sparse(r, c);
            debug_assert_eq!(end, c);
            rows.push(row);
        }
    }
    for (i, k) in subgroup_relators.iter().enumerate() {
        let (row, end) = sab.trace_sparse(k, base);
        if end != base {
            return Err(Error::Invalid(format!("subgroup relator {} does not lie in the subgroup", i + 1)));
        }
        rows.push(row);
    }
    sab.relator_rows = rows.clone();
    sab.solve_module(rows)?;
    Ok(sab)
}

fn enumerate_image(gens: &[Permutation]) -> Result<(Vec<Permutation>, i64), Error> {
    let elems = grpcore::enumerate_group(gens, IMAGE_BOUND)?;
    let mut exp = BigInt::one();
    for p in &elems {
        for c in p.cycles_with_fixed() {
            exp = exp.lcm(&BigInt::from(c.len()));
        }
    }
    Ok((elems, exp.to_i64().ok_or_else(|| Error::Invalid("image exponent too large".into()))?))
}

impl SubgroupAbelianization {
    /// Walks `w` from coset `start`, summing Schreier-generator letters.
    fn walk(&self, w: &Word, start: usize, mut visit: impl FnMut(usize, i64)) -> usize {
        let mut c = start;
        let syl = w.syllables();
        for &(g, e) in syl.iter().rev() {
            for _ in 0..e.unsigned_abs() {
                if e > 0 {
                    if let Some(k) = self.cosets.edge_gen[c][g] {
                        visit(k, 1);
                    }
                    c = self.cosets.gens[g].apply(c);
                } else {
                    let p = self.inverse_gens[g].apply(c);
                    if let Some(k) = self.cosets.edge_gen[p][g] {
                        visit(k, -1);
                    }
                    c = p;
                }
            }
        }
        c
    }

    fn trace_sparse(&self, w: &Word, start: usize) -> (BTreeMap<usize, i64>, usize) {
        let mut row: BTreeMap<usize, i64> = BTreeMap::new();
        let end = self.walk(w, start, |k, s| {
            let e = row.entry(k).or_insert(0);
            *e += s;
            if *e == 0 {
                row.remove(&k);
            }
        });
        (row, end)
    }

    fn solve_module(&mut self, rows: Vec<BTreeMap<usize, i64>>) -> Result<(), Error> {
        let ngen = self.cosets.subgroup_gens.len();
        let (subs, alive, rest) = eliminate_units(rows, ngen)?;
        let na = alive.len();
        let mut col = vec![usize::MAX; ngen];
        for (i, &a) in alive.iter().enumerate() {
            col[a] = i;
        }
        // images of Schreier generators in alive coordinates
        let mut img: Vec<Option<Vec<i128>>> = vec![None; ngen];
        for &a in &alive {
            let mut v = vec![0i128; na];
            v[col[a]] = 1;
            img[a] = Some(v);
        }
        for (c, sub) in subs.iter().rev() {
            let mut v = vec![0i128; na];
            for &(k, coef) in sub {
                let ik = img[k].as_ref().expect("substitution order");
                for (x, y) in v.iter_mut().zip(ik) {
                    *x = x.checked_add(y.checked_mul(i128::from(coef)).ok_or_else(overflow)?).ok_or_else(overflow)?;
                }
            }
            img[*c] = Some(v);
        }
        let mut dense: BTreeSet<Vec<i128>> = BTreeSet::new();
        for r in rest {
            let mut v = vec![0i128; na];
            for (k, e) in r {
                v[col[k]] += i128::from(e);
            }
            if v.iter().any(|&x| x != 0) {
                dense.insert(v);
            }
        }
        let m: Vec<Vec<i128>> = dense.into_iter().collect();
        let snf = smith_normal_form(&m, na)?;
        let gen_z: Vec<Vec<i128>> = img
            .into_iter()
            .map(|v| {
                let v = v.expect("every generator has an image");
                let mut z = vec![0i128; na];
                for (i, &x) in v.iter().enumerate() {
                    if x != 0 {
                        for (j, zj) in z.iter_mut().enumerate() {
                            *zj += x * snf.v[i][j];
                        }
                    }
                }
                z
            })
            .collect();
        self.gen_z = gen_z;
        self.diag = snf.diag.clone();
        self.dim = na;
        Ok(())
    }

    pub fn free_rank(&self) -> usize {
        self.dim - self.diag.len()
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<i128> {
        self.diag.iter().copied().filter(|&d| d > 1).collect()
    }

    pub fn index(&self) -> usize {
        self.cosets.degree
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.cosets.stabilizes(w)
    }

    /// Smith coordinates of a subgroup element, before reduction.
    pub fn coordinates(&self, w: &Word) -> Result<Vec<i128>, Error> {
        let mut z = vec![0i128; self.dim];
        let end = self.walk(w, self.cosets.basepoint, |k, s| {
            for (a, b) in z.iter_mut().zip(&self.gen_z[k]) {
                *a += i128::from(s) * b;
            }
        });
        if end != self.cosets.basepoint {
            return Err(Error::Invalid("word does not lie in the subgroup".into()));
        }
        Ok(z)
    }

    pub fn reduce(&self, z: &[i128]) -> ModuleClass {
        let torsion =
            self.diag.iter().enumerate().filter(|(_, &d)| d > 1).map(|(i, &d)| z[i].rem_euclid(d)).collect();
        ModuleClass { torsion, free: z[self.diag.len()..].to_vec() }
    }

    pub fn class_of(&self, w: &Word) -> Result<ModuleClass, Error> {
        Ok(self.reduce(&self.coordinates(w)?))
    }

    /// Checks that every rewritten relator maps to zero.
    pub fn check_relators(&self) -> Result<(), Error> {
        for (i, row) in self.relator_rows.iter().enumerate() {
            let mut z = vec![0i128; self.dim];
            for (&k, &e) in row {
                for (a, b) in z.iter_mut().zip(&self.gen_z[k]) {
                    *a += i128::from(e) * b;
                }
            }
            if !self.reduce(&z).is_zero() {
                return Err(Error::Verification(format!("rewritten relator {} is nonzero", i + 1)));
            }
        }
        Ok(())
    }

    /// Order of a class: `Some(k)` for torsion classes, `None` otherwise.
    pub fn order(&self, c: &ModuleClass) -> Option<i128> {
        if !c.is_torsion() {
            return None;
        }
        let ds: Vec<i128> = self.torsion();
        let mut o = BigInt::one();
        for (x, d) in c.torsion.iter().zip(ds) {
            let g = BigInt::from(*x).gcd(&BigInt::from(d));
            o = o.lcm(&(BigInt::from(d) / g));
        }
        o.to_i128()
    }
}

fn overflow() -> Error {
    Error::Verification("integer overflow during unit elimination".into())
}

type Substitution = (usize, Vec<(usize, i64)>);

/// Eliminates generators that occur with coefficient ±1 in some relator row.
/// Returns the substitutions in elimination order, the surviving generators,
/// and the remaining rows.
fn eliminate_units(
    mut rows: Vec<BTreeMap<usize, i64>>,
    ngen: usize,
) -> Result<(Vec<Substitution>, Vec<usize>, Vec<BTreeMap<usize, i64>>), Error> {
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ngen];
    for (r, row) in rows.iter().enumerate() {
        for &k in row.keys() {
            col_rows[k].insert(r);
        }
    }
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
        rows.iter().enumerate().filter(|(_, r)| !r.is_empty()).map(|(i, r)| Reverse((r.len(), i))).collect();
    let mut eliminated = vec![false; ngen];
    let mut subs = Vec::new();
    while let Some(Reverse((len, r))) = heap.pop() {
        if rows[r].len() != len || len == 0 {
            continue;
        }
        let pivot = rows[r]
            .iter()
            .filter(|(_, &e)| e.abs() == 1)
            .map(|(&k, &e)| (col_rows[k].len(), k, e))
            .min();
        let Some((_, c, s)) = pivot else { continue };
        let row = std::mem::take(&mut rows[r]);
        for &k in row.keys() {
            col_rows[k].remove(&r);
        }
        let sub: Vec<(usize, i64)> = row.iter().filter(|(&k, _)| k != c).map(|(&k, &e)| (k, -s * e)).collect();
        let touched: Vec<usize> = col_rows[c].iter().copied().collect();
        for r2 in touched {
            let coef = rows[r2][&c];
            let factor = -coef * s;
            for (&k, &e) in &row {
                let t = factor.checked_mul(e).ok_or_else(overflow)?;
                let ent = rows[r2].entry(k).or_insert(0);
                *ent = ent.checked_add(t).ok_or_else(overflow)?;
                if *ent == 0 {
                    rows[r2].remove(&k);
                    col_rows[k].remove(&r2);
                } else {
                    col_rows[k].insert(r2);
                }
            }
            if !rows[r2].is_empty() {
                heap.push(Reverse((rows[r2].len(), r2)));
            }
        }
        eliminated[c] = true;
        subs.push((c, sub));
    }
    let alive = (0..ngen).filter(|&k| !eliminated[k]).collect();
    let rest = rows.into_iter().filter(|r| !r.is_empty()).collect();
    Ok((subs, alive, rest))
}

/// Compares the class of `u·c·u⁻¹` with `±` the class of `c`.
pub fn conjugation_action(sab: &SubgroupAbelianization, u: &Word, c: &Word) -> Result<ActionKind, Error> {
    let k = sab.class_of(c)?;
    let kc = sab.class_of(&u.mul(c).mul(&u.inverse()))?;
    if kc == k {
        return Ok(ActionKind::Fixes);
    }
    let neg = sab.reduce(&sab.coordinates(c)?.iter().map(|x| -x).collect::<Vec<_>>());
    if kc == neg {
        return Ok(ActionKind::Inverts);
    }
    Ok(ActionKind::Other(kc))
}

// ---------------------------------------------------------------------------
// Formal products and linear solving

/// Builds `Π base^e` left to right.
pub fn power_product(terms: &[(Word, i64)]) -> Word {
    let mut syl: Vec<(usize, i64)> = Vec::new();
    for (b, e) in terms {
        let piece = if *e < 0 { b.inverse() } else { b.clone() };
        for _ in 0..e.unsigned_abs() {
            syl.extend_from_slice(piece.syllables());
        }
    }
    Word::from_syllables(&syl)
}

/// A product `Π base^{exponent}` with formal exponents.
pub type FormalWord = Vec<(Word, FormalExponent)>;

pub fn evaluate_formal(terms: &[(Word, FormalExponent)], assign: &BTreeMap<Symbol, i64>) -> Result<Word, Error> {
    let conc: Vec<(Word, i64)> =
        terms.iter().map(|(b, e)| Ok((b.clone(), e.eval(assign)?))).collect::<Result<_, Error>>()?;
    Ok(power_product(&conc))
}

/// Class of a formal product: a constant plus one coefficient vector per
/// symbol, over the Smith coordinates (rational, since powers of elements
/// outside the subgroup only contribute through multiples of the exponent of
/// the finite image).
#[derive(Clone, Debug, PartialEq)]
pub struct FormalClass {
    pub constant: Vec<BigRational>,
    pub coeffs: BTreeMap<Symbol, Vec<BigRational>>,
}

fn to_q(v: &[i128]) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()
}

fn sub_v(a: &[i128], b: &[i128]) -> Vec<i128> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Samples the class of a formal product along multiples of the image
/// exponent and reads off its affine structure. Symbols other than `Rho` may
/// only sit on subgroup elements.
pub fn class_of_formal(sab: &SubgroupAbelianization, terms: &[(Word, FormalExponent)]) -> Result<FormalClass, Error> {
    let syms: BTreeSet<Symbol> = terms.iter().flat_map(|(_, e)| e.symbols()).collect();
    for (b, e) in terms {
        if e.symbols().any(|s| s != Symbol::Rho) && !sab.contains(b) {
            return Err(Error::Invalid(format!(
                "exponent {} sits on a word outside the subgroup; only rho may do that",
                e
            )));
        }
    }
    let m = sab.exponent;
    let at = |rho: i64, extra: Option<(Symbol, i64)>| -> Result<Vec<i128>, Error> {
        let mut a: BTreeMap<Symbol, i64> = syms.iter().map(|&s| (s, 0)).collect();
        a.insert(Symbol::Rho, rho);
        if let Some((s, v)) = extra {
            a.insert(s, v);
        }
        sab.coordinates(&evaluate_formal(terms, &a)?)
    };
    let v0 = at(0, None)?;
    let v1 = at(m, None)?;
    let v2 = at(2 * m, None)?;
    if sub_v(&v2, &v1) != sub_v(&v1, &v0) {
        return Err(Error::Verification("class is not affine in rho along multiples of the image exponent".into()));
    }
    let mq = BigRational::from_integer(BigInt::from(m));
    let mut coeffs = BTreeMap::new();
    coeffs.insert(Symbol::Rho, to_q(&sub_v(&v1, &v0)).into_iter().map(|x| x / &mq).collect::<Vec<_>>());
    for &s in syms.iter().filter(|&&s| s != Symbol::Rho) {
        let w1 = sub_v(&at(m, Some((s, 1)))?, &v1);
        let w2 = sub_v(&at(m, Some((s, 2)))?, &v1);
        let w3 = sub_v(&at(2 * m, Some((s, 1)))?, &v2);
        if w2 != w1.iter().map(|x| 2 * x).collect::<Vec<_>>() || w3 != w1 {
            return Err(Error::Verification(format!("class is not linear in {}", s.name())));
        }
        coeffs.insert(s, to_q(&w1));
    }
    Ok(FormalClass { constant: to_q(&v0), coeffs })
}

/// Outcome of an exact rational linear solve.
#[derive(Clone, Debug, PartialEq)]
pub enum LinearSolution {
    None,
    Unique(Vec<BigRational>),
    Multiple,
}

/// Solves `Σ_j x_j·cols[j] = rhs` exactly.
pub fn solve_linear(cols: &[Vec<BigRational>], rhs: &[BigRational]) -> LinearSolution {
    let n = cols.len();
    let m = rhs.len();
    let mut a: Vec<Vec<BigRational>> =
        (0..m).map(|i| (0..n).map(|j| cols[j][i].clone()).chain([rhs[i].clone()]).collect()).collect();
    let mut piv_cols = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..=n {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        piv_cols.push(c);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[n].is_zero()) {
        return LinearSolution::None;
    }
    if piv_cols.len() < n {
        return LinearSolution::Multiple;
    }
    LinearSolution::Unique((0..n).map(|j| a[j][n].clone()).collect())
}

/// Solution of a formal equation for its unknowns, affine in `rho`.
#[derive(Clone, Debug, PartialEq)]
pub enum FormalSolution {
    None,
    Multiple,
    NonIntegral(String),
    Unique(BTreeMap<Symbol, FormalExponent>),
}

/// Symbols of `terms` that are not unknowns: `rho` first, then the rest.
fn parameters(terms: &[(Word, FormalExponent)], unknowns: &[Symbol]) -> Vec<Symbol> {
    let mut ps: BTreeSet<Symbol> = terms.iter().flat_map(|(_, e)| e.symbols()).collect();
    ps.insert(Symbol::Rho);
    ps.into_iter().filter(|s| !unknowns.contains(s)).collect()
}

/// Solves `class(terms) = 0` for `unknowns` as affine functions of `rho` and
/// of any other symbol present, using the free part, then re-checks the
/// solution exactly (torsion included) on a grid of parameter values.
pub fn solve_formal(
    sab: &SubgroupAbelianization,
    terms: &[(Word, FormalExponent)],
    unknowns: &[Symbol],
) -> Result<FormalSolution, Error> {
    let params = parameters(terms, unknowns);
    let fc = class_of_formal(sab, terms)?;
    let r = sab.diag.len();
    let zero = vec![BigRational::zero(); sab.dim];
    let free_neg = |v: &Vec<BigRational>| v[r..].iter().map(|x| -x).collect::<Vec<_>>();
    let cols: Vec<Vec<BigRational>> =
        unknowns.iter().map(|s| fc.coeffs.get(s).unwrap_or(&zero)[r..].to_vec()).collect();
    let mut parts: Vec<(Option<Symbol>, Vec<BigRational>)> = Vec::new();
    for target in params.iter().map(|&p| Some(p)).chain([None]) {
        let rhs = match target {
            Some(p) => free_neg(fc.coeffs.get(&p).unwrap_or(&zero)),
            None => free_neg(&fc.constant),
        };
        match solve_linear(&cols, &rhs) {
            LinearSolution::Unique(x) => parts.push((target, x)),
            LinearSolution::None => return Ok(FormalSolution::None),
            LinearSolution::Multiple => return Ok(FormalSolution::Multiple),
        }
    }
    let mut sol = BTreeMap::new();
    for (i, &s) in unknowns.iter().enumerate() {
        let mut f = FormalExponent::constant(0);
        for (target, x) in &parts {
            let c = &x[i];
            if !c.is_integer() {
                let what = target.map(|t| t.name()).unwrap_or("1");
                return Ok(FormalSolution::NonIntegral(format!("{}: coefficient {} of {}", s.name(), c, what)));
            }
            let k = c.to_integer().to_i64().ok_or_else(|| Error::Invalid("coefficient too large".into()))?;
            match target {
                Some(t) => f.add_term(*t, k),
                None => f.constant += k,
            }
        }
        sol.insert(s, f);
    }
    let m = sab.exponent;
    let others: Vec<Symbol> = params.iter().copied().filter(|&p| p != Symbol::Rho).collect();
    for rho in [0, m, 2 * m, 3 * m] {
        for bits in 0..(1u32 << others.len()) {
            let mut assign = BTreeMap::from([(Symbol::Rho, rho)]);
            for (j, &p) in others.iter().enumerate() {
                assign.insert(p, i64::from((bits >> j) & 1) * 3 - 1);
            }
            if !formal_class_zero(sab, terms, &sol, &assign)? {
                return Ok(FormalSolution::None);
            }
        }
    }
    Ok(FormalSolution::Unique(sol))
}

/// Exact check of `class(terms) = 0` at concrete parameter values, unknowns
/// replaced by `sol`. Errors when the evaluated word leaves the subgroup.
pub fn formal_class_zero(
    sab: &SubgroupAbelianization,
    terms: &[(Word, FormalExponent)],
    sol: &BTreeMap<Symbol, FormalExponent>,
    params: &BTreeMap<Symbol, i64>,
) -> Result<bool, Error> {
    let mut assign = params.clone();
    for (&s, f) in sol {
        assign.insert(s, f.eval(params)?);
    }
    Ok(sab.class_of(&evaluate_formal(terms, &assign)?)?.is_zero())
}

/// Residues of `rho` modulo the image exponent (other parameters zero) at
/// which the evaluated word lies in the subgroup, and how many of those give
/// the zero class.
pub fn residue_survey(
    sab: &SubgroupAbelianization,
    terms: &[(Word, FormalExponent)],
    sol: &BTreeMap<Symbol, FormalExponent>,
) -> Result<(usize, usize), Error> {
    let unknowns: Vec<Symbol> = sol.keys().copied().collect();
    let params = parameters(terms, &unknowns);
    let (mut inside, mut zero) = (0, 0);
    for r in 1..sab.exponent {
        let mut p: BTreeMap<Symbol, i64> = params.iter().map(|&s| (s, 0)).collect();
        p.insert(Symbol::Rho, r);
        let mut assign = p.clone();
        for (&s, f) in sol {
            assign.insert(s, f.eval(&p)?);
        }
        let w = evaluate_formal(terms, &assign)?;
        if sab.contains(&w) {
            inside += 1;
            if sab.class_of(&w)?.is_zero() {
                zero += 1;
            }
        }
    }
    Ok((inside, zero))
}

/// All symbols at zero.
pub fn zero_assignment(terms: &[(Word, FormalExponent)]) -> BTreeMap<Symbol, i64> {
    let mut a: BTreeMap<Symbol, i64> = terms.iter().flat_map(|(_, e)| e.symbols()).map(|s| (s, 0)).collect();
    a.insert(Symbol::Rho, 0);
    a
}

// ---------------------------------------------------------------------------
// GT pairs

/// Result of the elementary checks on a candidate pair `(λ, f)`.
#[derive(Clone, Debug, Serialize)]
pub struct GtPairReport {
    pub lambda: i64,
    pub f: String,
    /// `f(x,y) f(y,x) = 1` in the free group.
    pub two_cycle: bool,
    /// `f(z,x) z^m f(y,z) y^m f(x,y) x^m = 1` with `z = (xy)⁻¹`, `m = (λ-1)/2`.
    pub three_cycle: bool,
    pub three_cycle_residual: String,
    /// Abelianized five-cycle relation in the pure part of the five-point
    /// sphere quotient. Necessary but not sufficient.
    pub pentagon_shadow: bool,
}

impl GtPairReport {
    pub fn passed(&self) -> bool {
        self.two_cycle && self.three_cycle && self.pentagon_shadow
    }
}

pub fn gt_pair_basic_check(lambda: i64, f: &Word) -> Result<GtPairReport, Error> {
    if lambda % 2 == 0 {
        return Err(Error::Invalid(format!("lambda = {} is not odd", lambda)));
    }
    if f.max_generator().is_some_and(|g| g > 1) {
        return Err(Error::Invalid("f must be a word in x and y".into()));
    }
    if f.exponent_sum(0) != 0 || f.exponent_sum(1) != 0 {
        return Err(Error::Invalid("f is not in the derived subgroup".into()));
    }
    let (xw, yw) = (Word::gen(0), Word::gen(1));
    let fx = |a: &Word, b: &Word| f.substitute(&[a.clone(), b.clone()]);
    let two_cycle = fx(&xw, &yw).mul(&fx(&yw, &xw)).is_empty();
    let z = xw.mul(&yw).inverse();
    let m = (lambda - 1) / 2;
    let r = fx(&z, &xw)
        .mul(&z.pow(m))
        .mul(&fx(&yw, &z))
        .mul(&yw.pow(m))
        .mul(&fx(&xw, &yw))
        .mul(&xw.pow(m));
    let sab = subgroup_abelianization(&Presentation::sphere_mapping_class(5), &strand_permutations(5), Subgroup::Kernel)?;
    let xs = |i, j| x(i, j);
    let pent = fx(&xs(1, 2), &xs(2, 3))
        .mul(&fx(&xs(3, 4), &xs(4, 5)))
        .mul(&fx(&xs(5, 1), &xs(1, 2)))
        .mul(&fx(&xs(2, 3), &xs(3, 4)))
        .mul(&fx(&xs(4, 5), &xs(5, 1)));
    let pentagon_shadow = sab.class_of(&pent)?.is_zero();
    Ok(GtPairReport {
        lambda,
        f: f.render(&["x", "y"]),
        two_cycle,
        three_cycle: r.is_empty(),
        three_cycle_residual: r.render(&["x", "y"]),
        pentagon_shadow,
    })
}

/// Coefficients as integers, when they are.
pub fn integral(v: &[BigRational]) -> Option<Vec<i128>> {
    v.iter().map(|x| if x.is_integer() { x.to_integer().to_i128() } else { None }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(letters: &[i64]) -> Word {
        Word::from_letters(letters)
    }

    #[test]
    fn named_words() {
        assert_eq!(named_word(3, "y2").unwrap(), t(&[1, 1]));
        assert_eq!(named_word(4, "x12").unwrap(), t(&[1, 1]));
        assert_eq!(named_word(3, "x13").unwrap(), t(&[2, 1, 1, -2]));
        assert_eq!(named_word(4, "y3").unwrap(), t(&[2, 1, 1, 2]));
        assert!(named_word(3, "x14").is_err());
        assert!(named_word(3, "z3").is_err());
        assert_eq!(named_word(4, "w3").unwrap(), t(&[1, 2]).pow(3));
    }

    #[test]
    fn artin_examples() {
        assert!(artin_identity_check(4, &Word::commutator(&t(&[1, 3]), &t(&[2, 1, 3, 2]))).unwrap());
        assert!(artin_identity_check(3, &t(&[1, 2, 1]).mul(&t(&[2, 1, 2]).inverse())).unwrap());
        assert!(!artin_identity_check(3, &t(&[1, 2, -1, -2])).unwrap());
        // y2 y3 is the full twist (t1 t2)^3
        let w3 = named_word(3, "w3").unwrap();
        assert!(artin_identity_check(3, &w3.inverse().mul(&named_word(3, "w3").unwrap())).unwrap());
        assert!(artin_identity_check(3, &w3.inverse().mul(&y(2)).mul(&y(3))).unwrap());
        assert!(is_central(4, &w(4)).unwrap());
        assert!(!is_central(4, &w3).unwrap());
    }

    #[test]
    fn artin_hand_oracle() {
        // τ1 τ2 τ1⁻¹ τ2⁻¹ moves t1: compute by hand on t3 which τ2 touches
        let img = artin_images(3, &t(&[2])).unwrap();
        assert_eq!(img[1], t(&[2, 3, -2]));
        assert_eq!(img[2], t(&[2]));
    }

    #[test]
    fn pure_class_oracle() {
        assert_eq!(pure_braid_class(3, &x(1, 3)).unwrap(), vec![0, 1, 0]);
        assert_eq!(render_xij(4, &pure_braid_class(4, &z3()).unwrap()), "x23 x24 x34");
        assert!(pure_braid_class(3, &tau(1)).is_err());
    }

    #[test]
    fn formal_exponent_parse_print() {
        let f: FormalExponent = "dl+3rho".parse().unwrap();
        assert_eq!(f.coeff(Symbol::Dl), 1);
        assert_eq!(f.coeff(Symbol::Rho), 3);
        assert_eq!(f.to_string(), "3rho+dl");
        assert_eq!("-2rho".parse::<FormalExponent>().unwrap().to_string(), "-2rho");
        assert_eq!("4".parse::<FormalExponent>().unwrap().to_string(), "4");
        assert_eq!("rho-1".parse::<FormalExponent>().unwrap().to_string(), "rho-1");
        assert!("2x".parse::<FormalExponent>().is_err());
        let g = f.substitute(Symbol::Dl, &"-2rho".parse().unwrap());
        assert_eq!(g.to_string(), "rho");
    }

    #[test]
    fn trivial_and_free_abelianizations() {
        let id1 = vec![Permutation::identity(1); 3];
        let s = subgroup_abelianization(&Presentation::free(3), &id1, Subgroup::Kernel).unwrap();
        assert_eq!((s.free_rank(), s.torsion()), (3, vec![]));
        for n in 2..=5 {
            let p = Presentation::braid(n);
            let s = subgroup_abelianization(&p, &vec![Permutation::identity(1); n - 1], Subgroup::Kernel).unwrap();
            assert_eq!(s.free_rank(), 1, "B_{}", n);
            assert!(s.torsion().is_empty());
        }
    }

    #[test]
    fn pure_braid_abelianization() {
        let s = subgroup_abelianization(&Presentation::braid(4), &strand_permutations(4), Subgroup::Kernel).unwrap();
        assert_eq!(s.index(), 24);
        assert_eq!(s.free_rank(), 6);
        assert!(s.torsion().is_empty());
        s.check_relators().unwrap();
        // pure classes agree with crossing counts: x13 differs from x24
        assert_ne!(s.class_of(&x(1, 3)).unwrap(), s.class_of(&x(2, 4)).unwrap());
        assert!(s.class_of(&tau(1)).is_err());
    }

    #[test]
    fn stabilizer_subgroup() {
        // point stabilizer of B_3 acting on strands: index 3
        let s = subgroup_abelianization(&Presentation::braid(3), &strand_permutations(3), Subgroup::Stabilizer(2))
            .unwrap();
        assert_eq!(s.index(), 3);
        s.check_relators().unwrap();
        assert!(s.contains(&tau(1)));
        assert!(!s.contains(&tau(2)));
    }

    #[test]
    fn mod_w4_k5_relations() {
        let p = Presentation::braid(4).with_relators([w(4)]);
        let k5 = named_word(4, "k5").unwrap();
        let s = subgroup_abelianization_with(&p, &strand_permutations(4), Subgroup::Kernel, &[k5]).unwrap();
        s.check_relators().unwrap();
        let sum = ["x12", "x13", "x14", "x23", "x24", "x34"]
            .iter()
            .fold(Word::empty(), |a, n| a.mul(&named_word(4, n).unwrap()));
        assert!(s.class_of(&sum).unwrap().is_zero());
        let d = s.class_of(&x(1, 3).mul(&x(2, 4).inverse())).unwrap();
        assert!(!d.is_zero() && d.is_torsion());
        assert_eq!(s.order(&d), Some(2));
        let c = Word::commutator(&z3().mul(&tau(2)), &t(&[1, 3]).pow(2));
        let target = t(&[1, 1]).inverse().mul(&x(1, 3)).mul(&x(2, 4)).mul(&x(3, 4).inverse());
        assert_eq!(s.class_of(&c).unwrap(), s.class_of(&target).unwrap());
        assert_eq!(conjugation_action(&s, &z3().mul(&tau(2)), &c).unwrap(), ActionKind::Inverts);
        assert_eq!(conjugation_action(&s, &t(&[1, 3]).pow(2), &c).unwrap(), ActionKind::Fixes);
        assert_eq!(conjugation_action(&s, &c, &c).unwrap(), ActionKind::Fixes);
    }

    #[test]
    fn outer_action() {
        // y4 acts by an inner automorphism, τ1 does not
        assert!(outer_action_trivial(4, &y(4)).unwrap());
        assert!(!outer_action_trivial(4, &tau(1)).unwrap());
        assert!(outer_action_trivial(4, &named_word(4, "w3").unwrap()).unwrap());
    }

    #[test]
    fn linear_solver_cases() {
        let q = |x: i64| BigRational::from_integer(BigInt::from(x));
        let cols = vec![vec![q(1), q(0)], vec![q(0), q(2)]];
        assert_eq!(solve_linear(&cols, &[q(3), q(4)]), LinearSolution::Unique(vec![q(3), q(2)]));
        let cols = vec![vec![q(1), q(1)], vec![q(2), q(2)]];
        assert_eq!(solve_linear(&cols, &[q(1), q(1)]), LinearSolution::Multiple);
        assert_eq!(solve_linear(&cols, &[q(1), q(2)]), LinearSolution::None);
    }

    #[test]
    fn gt_pairs() {
        let one = Word::empty();
        assert!(gt_pair_basic_check(1, &one).unwrap().passed());
        assert!(gt_pair_basic_check(-1, &one).unwrap().passed());
        let c = Word::commutator(&Word::gen(0), &Word::gen(1));
        let r = gt_pair_basic_check(1, &c).unwrap();
        assert!(r.two_cycle);
        // [z,x][y,z][x,y] with z = (xy)⁻¹ is not trivial in F2
        assert!(!r.three_cycle);
        assert!(r.pentagon_shadow);
        assert!(gt_pair_basic_check(2, &one).is_err());
        assert!(gt_pair_basic_check(1, &Word::gen(0)).is_err());
    }
}
