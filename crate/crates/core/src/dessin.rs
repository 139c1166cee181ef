//! Belyi monodromy, two post-compositions with fixed outer maps, and the
//! origami obtained by pulling a pure dessin back to the 2-torsion cover of
//! the four-punctured torus.

use serde::{Deserialize, Serialize};

use crate::flatgeom::{cylinder_decomposition, Direction};
use crate::grpcore::{self, induce_action, Permutation, SchreierData, Word};
use crate::origami::Origami;
use crate::Error;

/// Monodromy `(g0, g1)` of a covering of the sphere branched over 0, 1, ∞.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DessinMonodromy {
    pub g0: Permutation,
    pub g1: Permutation,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DessinFile {
    degree: usize,
    g0: Vec<Vec<usize>>,
    g1: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdjustMode {
    /// `4β(1−β)`.
    Compose4x1mx,
    /// `4β²(1−β²)`.
    PrecomposeSquareThen4x,
}

impl std::str::FromStr for AdjustMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "compose_4x_1mx" => Ok(AdjustMode::Compose4x1mx),
            "precompose_square_then_4x" => Ok(AdjustMode::PrecomposeSquareThen4x),
            _ => Err(Error::Invalid(format!("unknown adjustment mode {:?}", s))),
        }
    }
}

impl DessinMonodromy {
    pub fn new(g0: Permutation, g1: Permutation) -> Result<Self, Error> {
        let d = g0.degree();
        if g1.degree() != d || d == 0 {
            return Err(Error::Invalid("g0 and g1 must have the same positive degree".into()));
        }
        if !grpcore::is_transitive(&[g0.clone(), g1.clone()], d)? {
            return Err(Error::Invalid("⟨g0, g1⟩ is not transitive".into()));
        }
        let m = DessinMonodromy { g0, g1 };
        m.genus()?;
        Ok(m)
    }

    /// The pure degree-6 dessin `((123), (14)(25)(36))` of `4x³(1−x³)`.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "D6" => DessinMonodromy::new(
                Permutation::from_cycles(6, &[vec![1, 2, 3]]).ok()?,
                Permutation::from_cycles(6, &[vec![1, 4], vec![2, 5], vec![3, 6]]).ok()?,
            )
            .ok(),
            "D2" => DessinMonodromy::new(Permutation::identity(2), Permutation::from_cycles(2, &[vec![1, 2]]).ok()?).ok(),
            _ => None,
        }
    }

    pub fn degree(&self) -> usize {
        self.g0.degree()
    }

    /// `(g1·g0)⁻¹`, so that `g∞·g1·g0 = 1`.
    pub fn g_inf(&self) -> Permutation {
        self.g1.compose(&self.g0).inverse()
    }

    pub fn is_pure(&self) -> bool {
        self.g1.is_fixed_point_free_involution()
    }

    pub fn is_totally_ramified_at_infinity(&self) -> bool {
        self.g_inf().cycle_count() == 1
    }

    pub fn genus(&self) -> Result<usize, Error> {
        let c = self.g0.cycle_count() + self.g1.cycle_count() + self.g_inf().cycle_count();
        let chi = c as i64 - self.degree() as i64;
        if chi > 2 || (2 - chi) % 2 != 0 {
            return Err(Error::Invalid(format!("cycle counts give Euler characteristic {}", chi)));
        }
        Ok(((2 - chi) / 2) as usize)
    }

    pub fn to_json(&self) -> String {
        let f = DessinFile { degree: self.degree(), g0: self.g0.to_cycles(), g1: self.g1.to_cycles() };
        serde_json::to_string(&f).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, Error> {
        let f: DessinFile =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("dessin file, line {} column {}: {}", e.line(), e.column(), e)))?;
        let g0 = Permutation::from_cycles(f.degree, &f.g0).map_err(|e| Error::Parse(format!("field \"g0\": {}", e)))?;
        let g1 = Permutation::from_cycles(f.degree, &f.g1).map_err(|e| Error::Parse(format!("field \"g1\": {}", e)))?;
        DessinMonodromy::new(g0, g1)
    }

    /// Same dessin up to relabeling the sheets.
    pub fn equivalent(&self, other: &DessinMonodromy) -> bool {
        self.degree() == other.degree()
            && grpcore::canonical_pair_unchecked(&self.g0, &self.g1) == grpcore::canonical_pair_unchecked(&other.g0, &other.g1)
    }
}

/// Lifts through an outer degree-2 map with monodromy `outer` on the two
/// sheets; `inner` lists, per Schreier generator, which of `g0`, `g1` (or
/// nothing) its lift encircles.
fn lift_through(d: &DessinMonodromy, outer: [Permutation; 2], transversal: Vec<Word>, inner: &[Option<u8>]) -> DessinMonodromy {
    let sd = SchreierData::from_transversal(outer.to_vec(), 0, transversal).expect("fixed lifting table");
    let id = Permutation::identity(d.degree());
    let perms: Vec<Permutation> = inner
        .iter()
        .map(|k| match k {
            Some(0) => d.g0.clone(),
            Some(_) => d.g1.clone(),
            None => id.clone(),
        })
        .collect();
    let g = induce_action(&sd, &perms).expect("fixed lifting table");
    DessinMonodromy { g0: g[0].clone(), g1: g[1].clone() }
}

fn compose_4x_1mx(d: &DessinMonodromy) -> DessinMonodromy {
    // 4x(1−x): 0 has the unramified preimages 0 and 1, 1 the double point 1/2.
    // Generators on edges (sheet 0, γ0), (sheet 1, γ0), (sheet 1, γ1) encircle
    // x = 0, x = 1 and x = 1/2.
    let outer = [Permutation::identity(2), Permutation::from_images(vec![1, 0]).unwrap()];
    lift_through(d, outer, vec![Word::empty(), Word::gen(1)], &[Some(0), Some(1), None])
}

fn square(d: &DessinMonodromy) -> DessinMonodromy {
    // x²: branched over 0 and ∞. Generators on edges (sheet 0, γ1), (sheet 1, γ0),
    // (sheet 1, γ1) encircle y = 1, y = 0 and y = −1.
    let outer = [Permutation::from_images(vec![1, 0]).unwrap(), Permutation::identity(2)];
    lift_through(d, outer, vec![Word::empty(), Word::gen(0)], &[Some(1), Some(0), None])
}

pub fn belyi_adjust(d: &DessinMonodromy, mode: AdjustMode) -> DessinMonodromy {
    match mode {
        AdjustMode::Compose4x1mx => compose_4x_1mx(d),
        AdjustMode::PrecomposeSquareThen4x => compose_4x_1mx(&square(d)),
    }
}

/// Images of the Schreier generators of the 2-torsion subgroup, in edge order
/// `(10,x), (10,y), (01,y), (11,x), (11,y)` for the transversal `1, x, y, xy`
/// on the cosets `00, 10, 01, 11`.
pub fn torsion_cover_images(d: &DessinMonodromy) -> Vec<Permutation> {
    let ginf = d.g_inf();
    let id = Permutation::identity(d.degree());
    vec![
        d.g0.compose(&ginf),
        id,
        ginf.clone(),
        ginf.inverse().compose(&d.g0.inverse()),
        ginf.inverse(),
    ]
}

/// The coset action of the free group `⟨x, y⟩` on `F/⟨x², y², xy²x, yx²y⟩`.
pub fn torsion_schreier() -> SchreierData {
    let x = Permutation::from_images(vec![1, 0, 3, 2]).unwrap();
    let y = Permutation::from_images(vec![2, 3, 0, 1]).unwrap();
    let tr = vec![Word::empty(), Word::gen(0), Word::gen(1), Word::gen(0).mul(&Word::gen(1))];
    SchreierData::from_transversal(vec![x, y], 0, tr).expect("fixed transversal")
}

/// Degree `4D` origami; square `c·D + s` is sheet `s` over coset `c`.
pub fn origami_from_dessin(d: &DessinMonodromy) -> Result<Origami, Error> {
    if !d.is_pure() {
        return Err(Error::Invalid("dessin is not pure: g1 must be a fixed-point-free involution".into()));
    }
    if !d.is_totally_ramified_at_infinity() {
        return Err(Error::Invalid("dessin is not totally ramified over ∞".into()));
    }
    let sd = torsion_schreier();
    let hv = induce_action(&sd, &torsion_cover_images(d))?;
    Origami::new(hv[0].clone(), hv[1].clone())
}

/// Loop images `m(a) = g∞·g1·g∞⁻¹`, `m(b) = g∞` and `m(a)·m(b)`.
pub fn loop_images(d: &DessinMonodromy) -> [Permutation; 3] {
    let ginf = d.g_inf();
    let ma = d.g1.conjugate_by(&ginf);
    let mab = ma.compose(&ginf);
    [ma, ginf, mab]
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectionCheck {
    pub direction: String,
    pub maximal_cylinders: usize,
    pub heights: Vec<usize>,
    pub unit_strips: usize,
    /// Twice the cycle count of the matching loop image.
    pub predicted_unit_strips: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FingerprintReport {
    pub source_degree: usize,
    pub directions: Vec<DirectionCheck>,
    /// Expected multiset `{1, D/2, r}`; `r` is the leftover count when `1` and `D/2` occur.
    pub r: Option<usize>,
    pub pairwise_distinct: bool,
    pub all_heights_two: bool,
    pub strip_doubling: bool,
}

impl FingerprintReport {
    pub fn counts(&self) -> Vec<usize> {
        self.directions.iter().map(|c| c.maximal_cylinders).collect()
    }

    /// Error naming the first failing direction, if any.
    pub fn check(&self) -> Result<(), Error> {
        let half = self.source_degree / 2;
        if self.r.is_none() {
            return Err(Error::Verification(format!(
                "maximal cylinder counts {:?} over {} do not contain 1 and {}",
                self.counts(),
                self.directions.iter().map(|c| c.direction.as_str()).collect::<Vec<_>>().join(", "),
                half
            )));
        }
        for c in &self.directions {
            if c.heights.iter().any(|&h| h != 2) {
                return Err(Error::Verification(format!("direction {}: cylinder heights {:?}, expected all 2", c.direction, c.heights)));
            }
            if c.unit_strips != c.predicted_unit_strips {
                return Err(Error::Verification(format!(
                    "direction {}: {} unit strips, loop image predicts {}",
                    c.direction, c.unit_strips, c.predicted_unit_strips
                )));
            }
        }
        Ok(())
    }
}

/// Measures the origami built from `d` in the directions `1/0, 0/1, 1/1`.
pub fn fingerprint_check(o: &Origami, d: &DessinMonodromy) -> Result<FingerprintReport, Error> {
    let dd = d.degree();
    if o.degree() != 4 * dd {
        return Err(Error::Invalid(format!("origami of degree {} cannot come from a dessin of degree {}", o.degree(), dd)));
    }
    let dirs = [Direction::HORIZONTAL, Direction::VERTICAL, Direction::DIAGONAL];
    let images = loop_images(d);
    let directions: Vec<DirectionCheck> = dirs
        .iter()
        .zip(images.iter())
        .map(|(&dir, m)| {
            let cd = cylinder_decomposition(o, dir);
            DirectionCheck {
                direction: dir.to_string(),
                maximal_cylinders: cd.cylinders.len(),
                heights: cd.cylinders.iter().map(|c| c.height).collect(),
                unit_strips: cd.unit_strip_count,
                predicted_unit_strips: 2 * m.cycle_count(),
            }
        })
        .collect();
    let mut rest: Vec<usize> = directions.iter().map(|c| c.maximal_cylinders).collect();
    let mut take = |x: usize| match rest.iter().position(|&y| y == x) {
        Some(i) => {
            rest.remove(i);
            true
        }
        None => false,
    };
    let r = if take(1) && take(dd / 2) { Some(rest[0]) } else { None };
    let mut sorted: Vec<usize> = directions.iter().map(|c| c.maximal_cylinders).collect();
    sorted.sort_unstable();
    let pairwise_distinct = sorted.windows(2).all(|w| w[0] != w[1]);
    let all_heights_two = directions.iter().all(|c| c.heights.iter().all(|&h| h == 2));
    let strip_doubling = directions.iter().all(|c| c.unit_strips == c.predicted_unit_strips);
    Ok(FingerprintReport { source_degree: dd, directions, r, pairwise_distinct, all_heights_two, strip_doubling })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(d: usize, c: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(d, &c.iter().map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn flags() {
        let q = DessinMonodromy::new(Permutation::identity(2), perm(2, &[&[1, 2]])).unwrap();
        assert!(q.is_pure() && q.is_totally_ramified_at_infinity());
        assert_eq!(q.genus().unwrap(), 0);
        let d6 = DessinMonodromy::builtin("D6").unwrap();
        assert!(d6.is_pure() && d6.is_totally_ramified_at_infinity());
        assert_eq!(d6.genus().unwrap(), 0);
        assert_eq!(d6.g0.cycle_count(), 4);
        assert_eq!(d6.g1.cycle_count(), 3);
        let t = DessinMonodromy::new(perm(2, &[&[1, 2]]), perm(2, &[&[1, 2]])).unwrap();
        assert!(t.is_pure());
        assert!(!t.is_totally_ramified_at_infinity());
        assert_eq!(t.genus().unwrap(), 0);
        assert!(DessinMonodromy::new(Permutation::identity(2), Permutation::identity(2)).is_err());
    }

    #[test]
    fn adjustments() {
        let one = DessinMonodromy::new(Permutation::identity(1), Permutation::identity(1)).unwrap();
        let q = belyi_adjust(&one, AdjustMode::Compose4x1mx);
        assert!(q.equivalent(&DessinMonodromy::new(Permutation::identity(2), perm(2, &[&[1, 2]])).unwrap()));
        let cube = DessinMonodromy::new(perm(3, &[&[1, 2, 3]]), Permutation::identity(3)).unwrap();
        let d6 = belyi_adjust(&cube, AdjustMode::Compose4x1mx);
        assert!(d6.equivalent(&DessinMonodromy::builtin("D6").unwrap()));
        for mode in [AdjustMode::Compose4x1mx, AdjustMode::PrecomposeSquareThen4x] {
            for src in [&one, &cube, &d6] {
                let out = belyi_adjust(src, mode);
                let k = if mode == AdjustMode::Compose4x1mx { 2 } else { 4 };
                assert_eq!(out.degree(), k * src.degree());
                assert!(out.is_pure());
                out.genus().unwrap();
                if src.is_totally_ramified_at_infinity() {
                    assert!(out.is_totally_ramified_at_infinity());
                }
            }
            let out = belyi_adjust(&cube, AdjustMode::Compose4x1mx);
            assert_eq!(out.g0.cycle_count(), cube.g0.cycle_count() + cube.g1.cycle_count());
        }
    }

    /// Direct gluing of four copies of the `D`-sheeted cover of the pillowcase:
    /// each crossing of a side of the base square carries its own sheet permutation.
    fn fiber_product(d: &DessinMonodromy) -> Origami {
        let n = d.degree();
        let sl = d.g0.inverse();
        let sr = d.g_inf();
        let st = sr.clone();
        let sb = Permutation::identity(n);
        let idx = |c: usize, s: usize| c * n + s;
        let (q00, q10, q01, q11) = (0, 1, 2, 3);
        let mut h = vec![0; 4 * n];
        let mut v = vec![0; 4 * n];
        for s in 0..n {
            h[idx(q00, s)] = idx(q10, sr.apply(s));
            h[idx(q10, s)] = idx(q00, sl.inverse().apply(s));
            h[idx(q01, s)] = idx(q11, sr.inverse().apply(s));
            h[idx(q11, s)] = idx(q01, sl.apply(s));
            v[idx(q00, s)] = idx(q01, st.apply(s));
            v[idx(q01, s)] = idx(q00, sb.inverse().apply(s));
            v[idx(q10, s)] = idx(q11, st.inverse().apply(s));
            v[idx(q11, s)] = idx(q10, sb.apply(s));
        }
        Origami::new(Permutation::from_images(h).unwrap(), Permutation::from_images(v).unwrap()).unwrap()
    }

    #[test]
    fn pipeline_matches_direct_gluing() {
        for name in ["D6", "D2"] {
            let d = DessinMonodromy::builtin(name).unwrap();
            let o = origami_from_dessin(&d).unwrap();
            assert_eq!(o.degree(), 4 * d.degree());
            assert!(o.equivalent(&fiber_product(&d)), "{}", name);
        }
    }

    #[test]
    fn measured_fingerprints() {
        let d6 = DessinMonodromy::builtin("D6").unwrap();
        let o = origami_from_dessin(&d6).unwrap();
        let sd = o.singularity_data();
        assert_eq!((sd.genus, sd.zero_orders.clone()), (4, vec![2, 2, 2]));
        let rep = fingerprint_check(&o, &d6).unwrap();
        assert_eq!(rep.counts(), vec![3, 2, 5]);
        assert!(rep.pairwise_distinct);
        assert!(rep.strip_doubling);
        assert_eq!(rep.directions.iter().map(|c| c.unit_strips).collect::<Vec<_>>(), vec![6, 2, 8]);
        assert!(!rep.all_heights_two);
        assert!(rep.check().is_err());

        let d2 = DessinMonodromy::builtin("D2").unwrap();
        let o2 = origami_from_dessin(&d2).unwrap();
        assert_eq!(o2.singularity_data().genus, 1);
        let rep2 = fingerprint_check(&o2, &d2).unwrap();
        assert_eq!(rep2.counts(), vec![1, 1, 1]);
        assert!(!rep2.pairwise_distinct);

        let t = Origami::builtin("torus").unwrap();
        assert!(fingerprint_check(&t, &d6).is_err());
        assert!(origami_from_dessin(&DessinMonodromy::new(perm(2, &[&[1, 2]]), perm(2, &[&[1, 2]])).unwrap()).is_err());
    }

    #[test]
    fn json_round_trip() {
        let d6 = DessinMonodromy::builtin("D6").unwrap();
        let j = d6.to_json();
        assert_eq!(j, r#"{"degree":6,"g0":[[1,2,3]],"g1":[[1,4],[2,5],[3,6]]}"#);
        assert_eq!(DessinMonodromy::from_json(&j).unwrap(), d6);
        assert!(DessinMonodromy::from_json(r#"{"degree":2,"g0":[],"g1":[[1,2]],"x":1}"#).is_err());
    }
}
