//! The [`Origami`] type, its singularity data and its JSON form.

use serde::{Deserialize, Serialize};

use crate::grpcore::{self, canonical_pair_unchecked, cycle_type, Permutation};
use crate::Error;

/// A connected square-tiled surface: `h` glues each square to its right
/// neighbour, `v` to the square above.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Origami {
    h: Permutation,
    v: Permutation,
}

/// Zeros of the translation form and the marked points over the base point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularityData {
    /// Positive zero orders, decreasing.
    pub zero_orders: Vec<usize>,
    pub genus: usize,
    /// Number of marked points, one per commutator cycle.
    pub n: usize,
    pub commutator_cycle_type: Vec<usize>,
}

impl SingularityData {
    /// Stratum label such as `H(1,1)`; the torus gives `H(0)`.
    pub fn stratum(&self) -> String {
        if self.zero_orders.is_empty() {
            return "H(0)".into();
        }
        let parts: Vec<String> = self.zero_orders.iter().map(|k| k.to_string()).collect();
        format!("H({})", parts.join(","))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OrigamiFile {
    d: usize,
    h: Vec<Vec<usize>>,
    v: Vec<Vec<usize>>,
}

impl Origami {
    pub fn new(h: Permutation, v: Permutation) -> Result<Self, Error> {
        if h.degree() != v.degree() || h.degree() == 0 {
            return Err(Error::Invalid(format!("h has degree {}, v has degree {}", h.degree(), v.degree())));
        }
        if !grpcore::is_transitive(&[h.clone(), v.clone()], h.degree())? {
            return Err(Error::Invalid("⟨h, v⟩ is not transitive: the surface is disconnected".into()));
        }
        Ok(Origami { h, v })
    }

    pub(crate) fn new_unchecked(h: Permutation, v: Permutation) -> Self {
        Origami { h, v }
    }

    /// Builds from 1-based cycle lists.
    pub fn from_cycles(d: usize, h: &[Vec<usize>], v: &[Vec<usize>]) -> Result<Self, Error> {
        Origami::new(Permutation::from_cycles(d, h)?, Permutation::from_cycles(d, v)?)
    }

    /// `torus`, `L22` (h=(23), v=(12)) and `S2` (h=(12)(34), v=(23)).
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "torus" => Origami::from_cycles(1, &[], &[]).ok(),
            "L22" => Origami::from_cycles(3, &[vec![2, 3]], &[vec![1, 2]]).ok(),
            "S2" => Origami::from_cycles(4, &[vec![1, 2], vec![3, 4]], &[vec![2, 3]]).ok(),
            _ => None,
        }
    }

    pub fn degree(&self) -> usize {
        self.h.degree()
    }

    pub fn h(&self) -> &Permutation {
        &self.h
    }

    pub fn v(&self) -> &Permutation {
        &self.v
    }

    /// `h·v·h⁻¹·v⁻¹`.
    pub fn commutator(&self) -> Permutation {
        self.h.compose(&self.v).compose(&self.h.inverse()).compose(&self.v.inverse())
    }

    pub fn singularity_data(&self) -> SingularityData {
        let ct = cycle_type(&self.commutator());
        let mut zero_orders: Vec<usize> = ct.iter().filter(|&&k| k > 1).map(|&k| k - 1).collect();
        zero_orders.sort_unstable_by(|a, b| b.cmp(a));
        let vcount = ct.len();
        let genus = (self.degree() + 2 - vcount) / 2;
        SingularityData { zero_orders, genus, n: vcount, commutator_cycle_type: ct }
    }

    pub fn canonicalize(&self) -> Origami {
        let (h, v) = canonical_pair_unchecked(&self.h, &self.v);
        Origami { h, v }
    }

    pub fn is_canonical(&self) -> bool {
        self.canonicalize() == *self
    }

    /// Same covering up to relabeling the squares.
    pub fn equivalent(&self, other: &Origami) -> bool {
        self.degree() == other.degree() && self.canonicalize() == other.canonicalize()
    }

    /// Quotients by the block systems of the monodromy group.
    pub fn intermediate_coverings(&self) -> Vec<(Origami, Vec<Vec<usize>>)> {
        let gens = [self.h.clone(), self.v.clone()];
        let systems = grpcore::block_systems(&gens, self.degree()).expect("origamis are transitive");
        systems
            .into_iter()
            .map(|sys| {
                let mut block_of = vec![0usize; self.degree()];
                for (b, blk) in sys.iter().enumerate() {
                    for &s in blk {
                        block_of[s - 1] = b;
                    }
                }
                let quot = |p: &Permutation| {
                    let images: Vec<usize> = sys.iter().map(|blk| block_of[p.apply(blk[0] - 1)]).collect();
                    Permutation::from_images(images).expect("blocks are permuted")
                };
                (Origami::new_unchecked(quot(&self.h), quot(&self.v)), sys)
            })
            .collect()
    }

    /// Canonical JSON, e.g. `{"d":4,"h":[[1,2],[3,4]],"v":[[2,3]]}`.
    pub fn to_json(&self) -> String {
        let c = self.canonicalize();
        let f = OrigamiFile { d: c.degree(), h: c.h.to_cycles(), v: c.v.to_cycles() };
        serde_json::to_string(&f).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, Error> {
        let f: OrigamiFile =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("origami file, line {} column {}: {}", e.line(), e.column(), e)))?;
        let h = Permutation::from_cycles(f.d, &f.h).map_err(|e| Error::Parse(format!("field \"h\": {}", e)))?;
        let v = Permutation::from_cycles(f.d, &f.v).map_err(|e| Error::Parse(format!("field \"v\": {}", e)))?;
        Origami::new(h, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singularities_of_builtins() {
        let t = Origami::builtin("torus").unwrap().singularity_data();
        assert_eq!((t.zero_orders.clone(), t.genus, t.n), (vec![], 1, 1));
        let l = Origami::builtin("L22").unwrap();
        // h·v·h⁻¹·v⁻¹ by hand: 1→2→3→3→... a 3-cycle on all squares
        assert_eq!(cycle_type(&l.commutator()), vec![3]);
        let ls = l.singularity_data();
        assert_eq!((ls.zero_orders.clone(), ls.genus, ls.n), (vec![2], 2, 1));
        let s = Origami::builtin("S2").unwrap().singularity_data();
        assert_eq!((s.zero_orders.clone(), s.genus, s.n), (vec![1, 1], 2, 2));
        assert_eq!(s.stratum(), "H(1,1)");
    }

    #[test]
    fn s2_factors_through_an_isogeny() {
        let s2 = Origami::builtin("S2").unwrap();
        let ic = s2.intermediate_coverings();
        assert_eq!(ic.len(), 1);
        let (q, sys) = &ic[0];
        assert_eq!(sys, &vec![vec![1, 4], vec![2, 3]]);
        assert_eq!(q.degree(), 2);
        assert_eq!(q.h().to_cycles(), vec![vec![1, 2]]);
        assert!(q.v().is_identity());
        assert!(Origami::builtin("L22").unwrap().intermediate_coverings().is_empty());
        assert!(Origami::builtin("torus").unwrap().intermediate_coverings().is_empty());
    }

    #[test]
    fn json_round_trip() {
        let s2 = Origami::builtin("S2").unwrap();
        let j = s2.to_json();
        let back = Origami::from_json(&j).unwrap();
        assert!(back.equivalent(&s2));
        assert!(back.is_canonical());
        assert!(Origami::from_json(r#"{"d":2,"h":[],"v":[]}"#).is_err());
        let e = Origami::from_json(r#"{"d":2,"h":[[1,3]],"v":[]}"#).unwrap_err();
        assert!(e.to_string().contains("\"h\""));
    }

    #[test]
    fn distinct_classes() {
        let a = Origami::from_cycles(3, &[vec![1, 2, 3]], &[vec![1, 2]]).unwrap();
        let b = Origami::builtin("L22").unwrap();
        assert!(!a.equivalent(&b));
    }
}
