//! Simplicial complexes on a fixed ambient vertex set, their Stanley–Reisner
//! ideals and the deletion/link/cone decomposition at a vertex.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::polycore::Monomial;

/// Vertex subsets are bitmasks over at most 64 vertices.
pub type VertexSet = u64;

pub const MAX_VERTICES: usize = 64;

pub fn vertices_of(set: VertexSet) -> Vec<usize> {
    (0..MAX_VERTICES).filter(|&i| set >> i & 1 == 1).collect()
}

fn set_of(vertices: &[usize], ambient: usize) -> Result<VertexSet> {
    let mut s = 0u64;
    for &v in vertices {
        if v >= ambient {
            return Err(Error::Input(format!("vertex {v} outside the ambient set 0..{}", ambient - 1)));
        }
        s |= 1 << v;
    }
    Ok(s)
}

/// A simplicial complex given by its facets. The empty face is always
/// present; vertices of the ambient set that lie in no face are ghosts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimplicialComplex {
    ambient: usize,
    facets: Vec<VertexSet>,
}

impl SimplicialComplex {
    pub fn new(ambient: usize, facets: &[Vec<usize>]) -> Result<SimplicialComplex> {
        let masks = facets.iter().map(|f| set_of(f, ambient)).collect::<Result<Vec<_>>>()?;
        SimplicialComplex::from_sets(ambient, masks)
    }

    /// Builds the complex generated by `sets`; non-maximal sets are dropped.
    pub fn from_sets(ambient: usize, sets: impl IntoIterator<Item = VertexSet>) -> Result<SimplicialComplex> {
        if ambient == 0 || ambient > MAX_VERTICES {
            return Err(Error::Input(format!("ambient vertex count {ambient} must be in 1..=64")));
        }
        let limit = if ambient == 64 { u64::MAX } else { (1u64 << ambient) - 1 };
        let sets: BTreeSet<VertexSet> = sets.into_iter().collect();
        if let Some(bad) = sets.iter().find(|&&s| s & !limit != 0) {
            return Err(Error::Input(format!("face {:?} outside the ambient set", vertices_of(*bad))));
        }
        let mut facets: Vec<VertexSet> = sets
            .iter()
            .copied()
            .filter(|&s| !sets.iter().any(|&t| t != s && s & t == s))
            .collect();
        if facets.is_empty() {
            facets.push(0);
        }
        facets.sort_by_key(|&s| vertices_of(s));
        Ok(SimplicialComplex { ambient, facets })
    }

    /// The full simplex on all ambient vertices.
    pub fn simplex(ambient: usize) -> SimplicialComplex {
        let all = if ambient == 64 { u64::MAX } else { (1u64 << ambient) - 1 };
        SimplicialComplex::from_sets(ambient, [all]).expect("valid ambient size")
    }

    /// The complex `{∅}`.
    pub fn empty(ambient: usize) -> SimplicialComplex {
        SimplicialComplex::from_sets(ambient, [0]).expect("valid ambient size")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn facets(&self) -> &[VertexSet] {
        &self.facets
    }

    pub fn facet_lists(&self) -> Vec<Vec<usize>> {
        self.facets.iter().map(|&f| vertices_of(f)).collect()
    }

    /// Union of all faces.
    pub fn used_vertices(&self) -> VertexSet {
        self.facets.iter().fold(0, |a, &f| a | f)
    }

    pub fn is_face_set(&self, s: VertexSet) -> bool {
        self.facets.iter().any(|&f| s & f == s)
    }

    pub fn is_face(&self, vertices: &[usize]) -> Result<bool> {
        Ok(self.is_face_set(set_of(vertices, self.ambient)?))
    }

    /// All faces, ordered by size and then by bitmask.
    pub fn faces(&self) -> Vec<VertexSet> {
        let mut out = BTreeSet::new();
        for &f in &self.facets {
            // enumerate submasks of f
            let mut s = f;
            loop {
                out.insert(s);
                if s == 0 {
                    break;
                }
                s = (s - 1) & f;
            }
        }
        let mut v: Vec<VertexSet> = out.into_iter().collect();
        v.sort_by_key(|&s| (s.count_ones(), s));
        v
    }

    /// Minimal non-faces: non-faces all of whose proper subsets are faces.
    pub fn minimal_nonfaces(&self) -> Vec<VertexSet> {
        let mut out = BTreeSet::new();
        for face in self.faces() {
            for v in 0..self.ambient {
                if face >> v & 1 == 1 {
                    continue;
                }
                let s = face | 1 << v;
                if self.is_face_set(s) {
                    continue;
                }
                let minimal = vertices_of(s).iter().all(|&u| self.is_face_set(s & !(1 << u)));
                if minimal {
                    out.insert(s);
                }
            }
        }
        let mut v: Vec<VertexSet> = out.into_iter().collect();
        v.sort_by_key(|&s| (s.count_ones(), vertices_of(s)));
        v
    }

    /// Generators of the Stanley–Reisner ideal, one square-free monomial per
    /// minimal non-face.
    pub fn sr_ideal(&self) -> Vec<Monomial> {
        self.minimal_nonfaces()
            .into_iter()
            .map(|s| Monomial::from_support(self.ambient, s))
            .collect()
    }

    fn check_vertex(&self, i: usize) -> Result<()> {
        if i >= self.ambient {
            return Err(Error::Input(format!("vertex {i} outside the ambient set 0..{}", self.ambient - 1)));
        }
        Ok(())
    }

    /// Faces not containing `i`.
    pub fn deletion(&self, i: usize) -> Result<SimplicialComplex> {
        self.check_vertex(i)?;
        SimplicialComplex::from_sets(self.ambient, self.facets.iter().map(|&f| f & !(1 << i)))
    }

    /// `{F : i ∉ F, F ∪ {i} ∈ Σ}`.
    pub fn link(&self, i: usize) -> Result<SimplicialComplex> {
        self.check_vertex(i)?;
        let sets: Vec<VertexSet> = self
            .facets
            .iter()
            .filter(|&&f| f >> i & 1 == 1)
            .map(|&f| f & !(1 << i))
            .collect();
        if sets.is_empty() {
            // i is unused: no face F has F ∪ {i} in Σ, not even ∅.
            return Err(Error::Input(format!("vertex {i} is not a vertex of the complex; its link is void")));
        }
        SimplicialComplex::from_sets(self.ambient, sets)
    }

    /// Cone with apex `i`; the apex must be unused.
    pub fn cone(&self, i: usize) -> Result<SimplicialComplex> {
        self.check_vertex(i)?;
        if self.used_vertices() >> i & 1 == 1 {
            return Err(Error::Input(format!("cone apex {i} is already a vertex of the complex")));
        }
        SimplicialComplex::from_sets(self.ambient, self.facets.iter().map(|&f| f | 1 << i))
    }

    /// `cone(link(Σ, i), i)`.
    pub fn star(&self, i: usize) -> Result<SimplicialComplex> {
        self.link(i)?.cone(i)
    }

    /// True iff the used vertices form a face; `{∅}` counts as a simplex.
    pub fn is_simplex(&self) -> bool {
        self.facets.len() == 1
    }

    /// Splits a non-simplex into deletion and link at the smallest used
    /// vertex whose star is not the whole complex.
    pub fn vorst_decompose(&self) -> Result<VorstDecomposition> {
        if self.is_simplex() {
            return Err(Error::Precondition("a simplex has no Vorst decomposition".into()));
        }
        let apex = vertices_of(self.used_vertices())
            .into_iter()
            .find(|&i| self.star(i).map(|s| s != *self).unwrap_or(false))
            .ok_or_else(|| Error::Internal("non-simplex is a cone over every used vertex".into()))?;
        let dec = VorstDecomposition {
            apex,
            sigma1: self.deletion(apex)?,
            sigma2: self.link(apex)?,
        };
        dec.check(self)?;
        Ok(dec)
    }
}

impl fmt::Display for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Σ[{}]{:?}", self.ambient, self.facet_lists())
    }
}

/// `Σ = Σ₁ ∪ C(Σ₂)` with `Σ₁ ∩ C(Σ₂) = Σ₂`, apex `i` in no face of `Σ₁`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VorstDecomposition {
    pub apex: usize,
    /// Deletion of the apex.
    pub sigma1: SimplicialComplex,
    /// Link of the apex.
    pub sigma2: SimplicialComplex,
}

impl VorstDecomposition {
    /// Re-checks the three set identities against `sigma`.
    pub fn check(&self, sigma: &SimplicialComplex) -> Result<()> {
        let i = self.apex;
        let fail = |what: &str| Err(Error::Internal(format!("decomposition of {sigma} at {i}: {what}")));
        let f1: BTreeSet<VertexSet> = self.sigma1.faces().into_iter().collect();
        let f2: BTreeSet<VertexSet> = self.sigma2.faces().into_iter().collect();
        if f1.iter().any(|&f| f >> i & 1 == 1) {
            return fail("apex occurs in the deletion");
        }
        if !f2.is_subset(&f1) {
            return fail("link is not contained in the deletion");
        }
        let fc: BTreeSet<VertexSet> = self.sigma2.cone(i)?.faces().into_iter().collect();
        let all: BTreeSet<VertexSet> = sigma.faces().into_iter().collect();
        if f1.union(&fc).copied().collect::<BTreeSet<_>>() != all {
            return fail("deletion ∪ cone differs from the complex");
        }
        if f1.intersection(&fc).copied().collect::<BTreeSet<_>>() != f2 {
            return fail("deletion ∩ cone differs from the link");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(ambient: usize, facets: &[&[usize]]) -> SimplicialComplex {
        SimplicialComplex::new(ambient, &facets.iter().map(|f| f.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn hollow() -> SimplicialComplex {
        cx(3, &[&[0, 1], &[1, 2], &[0, 2]])
    }

    #[test]
    fn face_queries() {
        assert!(cx(2, &[&[0]]).is_face(&[]).unwrap());
        assert!(hollow().is_face(&[0, 1]).unwrap());
        assert!(!hollow().is_face(&[0, 1, 2]).unwrap());
        assert!(hollow().is_face(&[3]).is_err());
    }

    #[test]
    fn nonfaces_and_ideals() {
        assert!(SimplicialComplex::simplex(4).minimal_nonfaces().is_empty());
        assert!(SimplicialComplex::simplex(4).sr_ideal().is_empty());
        let two = cx(2, &[&[0], &[1]]);
        assert_eq!(two.minimal_nonfaces(), vec![0b11]);
        assert_eq!(two.sr_ideal(), vec![Monomial::from_exponents(vec![1, 1])]);
        assert_eq!(hollow().minimal_nonfaces(), vec![0b111]);
        let ghosts = SimplicialComplex::empty(2);
        assert_eq!(
            ghosts.sr_ideal(),
            vec![Monomial::from_exponents(vec![1, 0]), Monomial::from_exponents(vec![0, 1])]
        );
    }

    #[test]
    fn link_deletion_cone() {
        assert_eq!(hollow().link(0).unwrap(), cx(3, &[&[1], &[2]]));
        assert_eq!(SimplicialComplex::empty(3).cone(1).unwrap(), cx(3, &[&[1]]));
        let s = cx(3, &[&[0, 1]]);
        assert_eq!(s.deletion(2).unwrap(), s);
        assert!(s.cone(0).is_err());
        assert!(s.star(2).is_err());
    }

    #[test]
    fn simplex_detection() {
        assert!(SimplicialComplex::simplex(3).is_simplex());
        assert!(SimplicialComplex::empty(3).is_simplex());
        assert!(!hollow().is_simplex());
    }

    #[test]
    fn decomposition_examples() {
        let d = cx(2, &[&[0], &[1]]).vorst_decompose().unwrap();
        assert_eq!(d.apex, 0);
        assert_eq!(d.sigma1, cx(2, &[&[1]]));
        assert_eq!(d.sigma2, SimplicialComplex::empty(2));

        let d = hollow().vorst_decompose().unwrap();
        assert_eq!(d.apex, 0);
        assert_eq!(d.sigma1, cx(3, &[&[1, 2]]));
        assert_eq!(d.sigma2, cx(3, &[&[1], &[2]]));

        let d = cx(3, &[&[0, 1], &[0, 2]]).vorst_decompose().unwrap();
        assert_eq!(d.apex, 1);
        assert_eq!(d.sigma1, cx(3, &[&[0, 2]]));
        assert_eq!(d.sigma2, cx(3, &[&[0]]));

        assert!(matches!(SimplicialComplex::simplex(3).vorst_decompose(), Err(Error::Precondition(_))));
    }
}
