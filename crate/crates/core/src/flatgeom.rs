//! Cylinder decompositions in rational directions and the parity of the spin
//! structure.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::Serialize;

use crate::grpcore::Permutation;
use crate::origami::Origami;
use crate::veech::{self, IntMatrix2};
use crate::Error;

/// A primitive integer direction; the first nonzero entry is positive.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct Direction {
    pub p: i64,
    pub q: i64,
}

impl Direction {
    pub const HORIZONTAL: Direction = Direction { p: 1, q: 0 };
    pub const VERTICAL: Direction = Direction { p: 0, q: 1 };
    pub const DIAGONAL: Direction = Direction { p: 1, q: 1 };

    pub fn new(p: i64, q: i64) -> Result<Self, Error> {
        if p == 0 && q == 0 {
            return Err(Error::Invalid("direction (0,0)".into()));
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / g, q / g);
        if p < 0 || (p == 0 && q < 0) {
            p = -p;
            q = -q;
        }
        Ok(Direction { p, q })
    }

    /// A matrix in SL(2,Z) sending `(p, q)` to `(1, 0)`.
    pub fn to_horizontal(&self) -> IntMatrix2 {
        let e = self.p.extended_gcd(&self.q);
        IntMatrix2 { a: e.x, b: e.y, c: -self.q, d: self.p }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Direction {
    type Err = Error;

    /// `p/q`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let (a, b) = s.split_once('/').ok_or_else(|| Error::Parse(format!("direction {:?}: expected p/q", s)))?;
        let p = a.trim().parse::<i64>().map_err(|e| Error::Parse(format!("direction {:?}: {}", s, e)))?;
        let q = b.trim().parse::<i64>().map_err(|e| Error::Parse(format!("direction {:?}: {}", s, e)))?;
        Direction::new(p, q)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cylinder {
    pub width: usize,
    pub height: usize,
    /// Unit strips bottom to top, as 1-based squares of the sheared origami.
    #[serde(skip)]
    pub strips: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CylinderDecomposition {
    pub direction: Direction,
    pub cylinders: Vec<Cylinder>,
    pub unit_strip_count: usize,
}

/// Corner classes: `corner[i]` is the class of the lower-left corner of square `i`,
/// and `singular[c]` whether class `c` is a zero of ω.
pub(crate) fn corner_classes(o: &Origami) -> (Vec<usize>, Vec<bool>) {
    let (h, v) = (o.h(), o.v());
    // going once around the lower-left corner of i: left, down, right, up
    let around = v.compose(h).compose(&v.inverse()).compose(&h.inverse());
    let cycles = around.cycles_with_fixed();
    let mut corner = vec![0; o.degree()];
    let mut singular = Vec::with_capacity(cycles.len());
    for (k, c) in cycles.iter().enumerate() {
        for &i in c {
            corner[i] = k;
        }
        singular.push(c.len() > 1);
    }
    (corner, singular)
}

fn horizontal_decomposition(o: &Origami) -> Vec<Cylinder> {
    let (h, v) = (o.h(), o.v());
    let strips = h.cycles_with_fixed();
    let mut strip_of = vec![0; o.degree()];
    for (k, s) in strips.iter().enumerate() {
        for &i in s {
            strip_of[i] = k;
        }
    }
    let (corner, singular) = corner_classes(o);
    // top boundary of a strip passes through the lower-left corners of the squares above it
    let top_clean: Vec<bool> = strips.iter().map(|s| s.iter().all(|&i| !singular[corner[v.apply(i)]])).collect();
    let above = |k: usize| strip_of[v.apply(strips[k][0])];
    let below = |k: usize| strip_of[v.inverse().apply(strips[k][0])];
    let mut used = vec![false; strips.len()];
    let mut out = Vec::new();
    for k0 in 0..strips.len() {
        if used[k0] {
            continue;
        }
        // walk down to the bottom strip of this cylinder
        let mut bottom = k0;
        let mut steps = 0;
        while top_clean[below(bottom)] && steps < strips.len() {
            bottom = below(bottom);
            steps += 1;
        }
        let mut members = Vec::new();
        let mut k = bottom;
        loop {
            used[k] = true;
            members.push(strips[k].iter().map(|&i| i + 1).collect::<Vec<_>>());
            if !top_clean[k] {
                break;
            }
            k = above(k);
            if k == bottom {
                break;
            }
        }
        out.push(Cylinder { width: strips[bottom].len(), height: members.len(), strips: members });
    }
    out
}

pub fn cylinder_decomposition(o: &Origami, dir: Direction) -> CylinderDecomposition {
    let sheared = if dir == Direction::HORIZONTAL { o.clone() } else { veech::act(&dir.to_horizontal(), o) };
    let cylinders = horizontal_decomposition(&sheared);
    let unit_strip_count = sheared.h().cycle_count();
    CylinderDecomposition { direction: dir, cylinders, unit_strip_count }
}

#[derive(Clone, Debug, Serialize)]
pub struct Fingerprint {
    pub counts: Vec<(Direction, usize)>,
    pub pairwise_distinct: bool,
}

pub fn direction_fingerprint(o: &Origami, dirs: &[Direction]) -> Fingerprint {
    let counts: Vec<(Direction, usize)> = dirs.iter().map(|&d| (d, cylinder_decomposition(o, d).cylinders.len())).collect();
    let mut c: Vec<usize> = counts.iter().map(|x| x.1).collect();
    c.sort_unstable();
    let pairwise_distinct = c.windows(2).all(|w| w[0] != w[1]);
    Fingerprint { counts, pairwise_distinct }
}

// Moves in the dual graph, counterclockwise from east.
const R: u8 = 0;
const U: u8 = 1;
const L: u8 = 2;
const D: u8 = 3;

/// A closed walk through square centres: start square and moves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Loop {
    pub start: usize,
    pub moves: Vec<u8>,
}

fn step(h: &Permutation, v: &Permutation, hi: &Permutation, vi: &Permutation, s: usize, m: u8) -> usize {
    match m {
        R => h.apply(s),
        U => v.apply(s),
        L => hi.apply(s),
        _ => vi.apply(s),
    }
}

impl Loop {
    /// Squares visited; `squares[t]` is where move `t` starts.
    pub fn squares(&self, o: &Origami) -> Vec<usize> {
        let (hi, vi) = (o.h().inverse(), o.v().inverse());
        let mut s = self.start;
        let mut out = Vec::with_capacity(self.moves.len());
        for &m in &self.moves {
            out.push(s);
            s = step(o.h(), o.v(), &hi, &vi, s, m);
        }
        out
    }

    /// Free and cyclic reduction; adjacent opposite moves always retrace one edge.
    pub fn reduce(&self, o: &Origami) -> Loop {
        let sq = self.squares(o);
        let mut st: Vec<(usize, u8)> = Vec::new();
        for (t, &m) in self.moves.iter().enumerate() {
            if let Some(&(_, pm)) = st.last() {
                if (pm + 2) % 4 == m {
                    st.pop();
                    continue;
                }
            }
            st.push((sq[t], m));
        }
        let mut lo = 0;
        let mut hi = st.len();
        while hi - lo >= 2 && (st[lo].1 + 2) % 4 == st[hi - 1].1 {
            lo += 1;
            hi -= 1;
        }
        let part = &st[lo..hi];
        Loop { start: part.first().map(|x| x.0).unwrap_or(self.start), moves: part.iter().map(|x| x.1).collect() }
    }

    /// (left turns − right turns) / 4 of a cyclically reduced walk.
    pub fn turning_number(&self) -> i64 {
        let n = self.moves.len();
        let mut sum = 0i64;
        for t in 0..n {
            match (self.moves[(t + 1) % n] + 4 - self.moves[t]) % 4 {
                1 => sum += 1,
                3 => sum -= 1,
                _ => {}
            }
        }
        debug_assert_eq!(sum % 4, 0);
        sum / 4
    }
}

/// Quadratic-form data on the fundamental cycles of the dual graph.
#[derive(Clone, Debug)]
pub struct SpinData {
    pub loops: Vec<Loop>,
    /// Algebraic intersection numbers; antisymmetric.
    pub intersection: Vec<Vec<i64>>,
    /// `q` on each loop.
    pub q: Vec<u8>,
    pub genus: usize,
}

/// Fundamental cycles of a BFS spanning tree rooted at square 0.
pub fn fundamental_loops(o: &Origami) -> Vec<Loop> {
    let d = o.degree();
    let (h, v) = (o.h(), o.v());
    // path from the root as moves
    let mut path: Vec<Option<Vec<u8>>> = vec![None; d];
    let mut tree = vec![[false; 2]; d];
    path[0] = Some(Vec::new());
    let mut queue = std::collections::VecDeque::from([0usize]);
    let (hi, vi) = (h.inverse(), v.inverse());
    while let Some(s) = queue.pop_front() {
        for m in [R, U, L, D] {
            let t = step(h, v, &hi, &vi, s, m);
            if path[t].is_none() {
                let mut p = path[s].clone().unwrap();
                p.push(m);
                path[t] = Some(p);
                match m {
                    R => tree[s][0] = true,
                    U => tree[s][1] = true,
                    L => tree[t][0] = true,
                    _ => tree[t][1] = true,
                }
                queue.push_back(t);
            }
        }
    }
    let mut loops = Vec::new();
    for s in 0..d {
        for (k, m) in [(0, R), (1, U)] {
            if tree[s][k] {
                continue;
            }
            let t = step(h, v, &hi, &vi, s, m);
            let mut moves = path[s].clone().unwrap();
            moves.push(m);
            moves.extend(path[t].as_ref().unwrap().iter().rev().map(|&x| (x + 2) % 4));
            loops.push(Loop { start: 0, moves }.reduce(o));
        }
    }
    loops
}

/// Boundary parameter (counterclockwise from the lower-left corner) of a
/// crossing at offset `x ∈ (0,1)` on the side through which move `m` leaves.
fn exit_param(m: u8, x: f64) -> f64 {
    match m {
        R => 1.0 + x,
        U => 2.0 + (1.0 - x),
        L => 3.0 + (1.0 - x),
        _ => x,
    }
}

fn entry_param(m: u8, x: f64) -> f64 {
    exit_param((m + 2) % 4, x)
}

fn in_arc(from: f64, to: f64, x: f64) -> bool {
    if from < to { from < x && x < to } else { x > from || x < to }
}

struct Chord {
    square: usize,
    a: f64,
    b: f64,
    owner: usize,
}

/// Intersection matrix and self-crossing counts of a family of loops drawn
/// simultaneously, each edge crossing at its own offset.
pub fn intersections(o: &Origami, loops: &[Loop]) -> (Vec<Vec<i64>>, Vec<usize>) {
    let d = o.degree();
    let hi = o.h().inverse();
    let vi = o.v().inverse();
    // edge id: 2s for the right side of s, 2s+1 for the top side of s
    let edge = |s: usize, m: u8| match m {
        R => 2 * s,
        U => 2 * s + 1,
        L => 2 * hi.apply(s),
        _ => 2 * vi.apply(s) + 1,
    };
    let mut total = vec![0usize; 2 * d];
    let all_sq: Vec<Vec<usize>> = loops.iter().map(|l| l.squares(o)).collect();
    for (l, sq) in loops.iter().zip(&all_sq) {
        for (t, &m) in l.moves.iter().enumerate() {
            total[edge(sq[t], m)] += 1;
        }
    }
    let mut used = vec![0usize; 2 * d];
    let mut chords: Vec<Chord> = Vec::new();
    for (k, (l, sq)) in loops.iter().zip(&all_sq).enumerate() {
        let n = l.moves.len();
        let mut offsets = Vec::with_capacity(n);
        for (t, &m) in l.moves.iter().enumerate() {
            let e = edge(sq[t], m);
            used[e] += 1;
            // offset along the right side measured upward, along the top measured rightward
            offsets.push(used[e] as f64 / (total[e] + 1) as f64);
        }
        for t in 0..n {
            let prev = (t + n - 1) % n;
            chords.push(Chord {
                square: sq[t],
                a: entry_param(l.moves[prev], offsets[prev]),
                b: exit_param(l.moves[t], offsets[t]),
                owner: k,
            });
        }
    }
    let nl = loops.len();
    let mut m = vec![vec![0i64; nl]; nl];
    let mut selfx = vec![0usize; nl];
    let mut by_square: Vec<Vec<usize>> = vec![Vec::new(); d];
    for (i, c) in chords.iter().enumerate() {
        by_square[c.square].push(i);
    }
    for idx in &by_square {
        for (x, &i) in idx.iter().enumerate() {
            for &j in &idx[x + 1..] {
                let (ci, cj) = (&chords[i], &chords[j]);
                if in_arc(ci.a, ci.b, cj.a) == in_arc(ci.a, ci.b, cj.b) {
                    continue;
                }
                if ci.owner == cj.owner {
                    selfx[ci.owner] += 1;
                    continue;
                }
                let sign = if in_arc(ci.a, ci.b, cj.a) { 1 } else { -1 };
                m[ci.owner][cj.owner] += sign;
                m[cj.owner][ci.owner] -= sign;
            }
        }
    }
    (m, selfx)
}

/// `q = turning number + self-crossings + 1 (mod 2)` on each fundamental loop.
pub fn spin_data(o: &Origami) -> SpinData {
    let loops = fundamental_loops(o);
    let (intersection, selfx) = intersections(o, &loops);
    let q = loops.iter().zip(&selfx).map(|(l, &x)| ((l.turning_number() + 1 + x as i64).rem_euclid(2)) as u8).collect();
    SpinData { loops, intersection, q, genus: o.singularity_data().genus }
}

impl SpinData {
    pub fn pairing(&self, x: &[i64], y: &[i64]) -> i64 {
        let n = x.len();
        let mut s = 0;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..n {
                s += x[i] * self.intersection[i][j] * y[j];
            }
        }
        s
    }

    /// `q` of an integer combination of the loops.
    pub fn q_of(&self, c: &[i64]) -> u8 {
        let n = c.len();
        let mut s = 0i64;
        for i in 0..n {
            s += c[i].rem_euclid(2) * self.q[i] as i64;
            for j in i + 1..n {
                s += c[i] * c[j] * self.intersection[i][j];
            }
        }
        s.rem_euclid(2) as u8
    }

    pub fn arf(&self, basis: &[(Vec<i64>, Vec<i64>)]) -> u8 {
        (basis.iter().map(|(a, b)| (self.q_of(a) * self.q_of(b)) as u32).sum::<u32>() % 2) as u8
    }

    /// Symplectic basis `(aᵢ, bᵢ)` with `aᵢ·bᵢ = 1`, by congruence reduction of
    /// the intersection matrix.
    pub fn symplectic_basis(&self) -> Result<Vec<(Vec<i64>, Vec<i64>)>, Error> {
        let n = self.loops.len();
        let mut g = self.intersection.clone();
        let mut b: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        fn add(g: &mut [Vec<i64>], b: &mut [Vec<i64>], k: usize, l: usize, q: i64) {
            // B_k += q B_l
            let n = g.len();
            for j in 0..n {
                b[k][j] += q * b[l][j];
            }
            for j in 0..n {
                g[k][j] += q * g[l][j];
            }
            for j in 0..n {
                g[j][k] += q * g[j][l];
            }
        }
        fn swap(g: &mut [Vec<i64>], b: &mut [Vec<i64>], k: usize, l: usize) {
            if k == l {
                return;
            }
            b.swap(k, l);
            g.swap(k, l);
            for row in g.iter_mut() {
                row.swap(k, l);
            }
        }
        let mut p = 0;
        let mut out = Vec::new();
        while p + 1 < n {
            let mut best: Option<(usize, usize)> = None;
            for i in p..n {
                for j in p..n {
                    if g[i][j] != 0 && best.is_none_or(|(bi, bj)| g[i][j].abs() < g[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((i, j)) = best else { break };
            swap(&mut g, &mut b, p, i);
            let j = if j == p { i } else { j };
            swap(&mut g, &mut b, p + 1, j);
            let piv = g[p][p + 1];
            let mut clean = true;
            for k in p + 2..n {
                let q = g[p][k].div_euclid(piv);
                if q != 0 {
                    add(&mut g, &mut b, k, p + 1, -q);
                }
                let q2 = g[p + 1][k].div_euclid(-piv);
                if q2 != 0 {
                    add(&mut g, &mut b, k, p, -q2);
                }
                if g[p][k] != 0 || g[p + 1][k] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            if piv == -1 {
                swap(&mut g, &mut b, p, p + 1);
            } else if piv != 1 {
                return Err(Error::Verification(format!("intersection form has elementary divisor {}", piv)));
            }
            out.push((b[p].clone(), b[p + 1].clone()));
            p += 2;
        }
        if out.len() != self.genus {
            return Err(Error::Verification(format!("symplectic rank {} for genus {}", 2 * out.len(), self.genus)));
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SpinParity {
    Even,
    Odd,
    Undefined,
}

impl SpinParity {
    pub fn value(&self) -> Option<u8> {
        match self {
            SpinParity::Even => Some(0),
            SpinParity::Odd => Some(1),
            SpinParity::Undefined => None,
        }
    }
}

impl fmt::Display for SpinParity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{}", v),
            None => write!(f, "undefined"),
        }
    }
}

pub fn spin_parity(o: &Origami) -> Result<SpinParity, Error> {
    if o.singularity_data().zero_orders.iter().any(|k| k % 2 == 1) {
        return Ok(SpinParity::Undefined);
    }
    let sd = spin_data(o);
    let basis = sd.symplectic_basis()?;
    Ok(if sd.arf(&basis) == 0 { SpinParity::Even } else { SpinParity::Odd })
}
