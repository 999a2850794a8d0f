//! Discrete spacetime cylinders `Z (time) x Z_N (space)` with slope-bounded
//! light cones, causally convex regions and time-ordered tuples.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub t: i64,
    pub x: i64,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.t, self.x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lattice {
    /// Number of spatial sites `N`.
    pub sites: i64,
    /// Sites a signal may travel per time step.
    pub slope: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegionKind {
    All,
    Points,
    Hull(Vec<Point>),
}

/// A region of the ambient lattice. Finite regions carry their points.
#[derive(Clone, PartialEq, Eq)]
pub struct Region {
    pub kind: RegionKind,
    points: Option<Arc<BTreeSet<Point>>>,
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.kind, &self.points) {
            (RegionKind::All, _) => write!(f, "All"),
            (RegionKind::Hull(s), Some(p)) => write!(f, "Hull{:?}[{} pts]", s, p.len()),
            (_, Some(p)) => write!(f, "Points{:?}", p),
            (_, None) => write!(f, "?"),
        }
    }
}

impl Region {
    pub fn all() -> Self {
        Self { kind: RegionKind::All, points: None }
    }

    pub fn is_all(&self) -> bool {
        self.kind == RegionKind::All
    }

    pub fn points(&self) -> Option<&BTreeSet<Point>> {
        self.points.as_deref()
    }

    pub fn is_finite(&self) -> bool {
        self.points.is_some()
    }

    pub fn contains(&self, p: &Point) -> bool {
        match &self.points {
            None => true,
            Some(s) => s.contains(p),
        }
    }

    pub fn len(&self) -> Option<usize> {
        self.points.as_ref().map(|s| s.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// `[min t, max t]` of a finite nonempty region.
    pub fn time_range(&self) -> Option<(i64, i64)> {
        let s = self.points.as_ref()?;
        Some((s.first()?.t, s.iter().map(|p| p.t).max()?))
    }

    pub fn is_subset_of(&self, other: &Region) -> bool {
        match (&self.points, &other.points) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a.is_subset(b),
        }
    }

    pub fn overlaps(&self, other: &Region) -> bool {
        match (&self.points, &other.points) {
            (None, None) => true,
            (None, Some(s)) | (Some(s), None) => !s.is_empty(),
            (Some(a), Some(b)) => a.intersection(b).next().is_some(),
        }
    }
}

/// Cut data for a partition of unity subordinate to `{t > t0 - 1}, {t < t0 + 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CutoffData {
    pub t0: i64,
}

pub fn make_cutoff(t0: i64) -> CutoffData {
    CutoffData { t0 }
}

impl CutoffData {
    pub fn sigma_minus(&self) -> i64 {
        self.t0 - 1
    }

    pub fn sigma_plus(&self) -> i64 {
        self.t0 + 1
    }

    pub fn chi_plus(&self, p: &Point) -> bool {
        p.t > self.t0
    }

    pub fn chi_minus(&self, p: &Point) -> bool {
        p.t <= self.t0
    }

    /// Membership in `I+(Sigma_-)`, i.e. one step past the lower slice.
    pub fn in_future_of_sigma_minus(&self, p: &Point) -> bool {
        p.t > self.sigma_minus()
    }

    pub fn in_past_of_sigma_plus(&self, p: &Point) -> bool {
        p.t < self.sigma_plus()
    }
}

/// The pieces of a time-ordered tuple split off its last region.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub hull: Region,
    pub inner: Vec<Region>,
    pub outer: (Region, Region),
}

impl Lattice {
    pub fn new(sites: i64, slope: i64) -> Result<Self> {
        if sites < 1 || slope < 1 {
            return Err(Error::Precondition(format!("need N >= 1 and slope >= 1, got N={sites}, slope={slope}")));
        }
        Ok(Self { sites, slope })
    }

    pub fn point(&self, t: i64, x: i64) -> Point {
        Point { t, x: x.rem_euclid(self.sites) }
    }

    pub fn wrap(&self, x: i64) -> i64 {
        x.rem_euclid(self.sites)
    }

    pub fn ring_distance(&self, x1: i64, x2: i64) -> i64 {
        let d = (x1 - x2).rem_euclid(self.sites);
        d.min(self.sites - d)
    }

    /// `q ∈ J+(p)`.
    pub fn in_future_of(&self, p: &Point, q: &Point) -> bool {
        q.t >= p.t && self.ring_distance(p.x, q.x) <= self.slope * (q.t - p.t)
    }

    pub fn causally_related(&self, p: &Point, q: &Point) -> bool {
        self.in_future_of(p, q) || self.in_future_of(q, p)
    }

    pub fn in_future_of_set(&self, s: &[Point], q: &Point) -> bool {
        s.iter().any(|p| self.in_future_of(p, q))
    }

    pub fn in_past_of_set(&self, s: &[Point], q: &Point) -> bool {
        s.iter().any(|p| self.in_future_of(q, p))
    }

    pub fn slice(&self, t: i64) -> impl Iterator<Item = Point> + '_ {
        (0..self.sites).map(move |x| Point { t, x })
    }

    /// `J+(S)` enumerated on `[min t(S), min t(S) + horizon]`.
    pub fn causal_future(&self, s: &[Point], horizon: i64) -> Vec<Point> {
        let Some(t0) = s.iter().map(|p| p.t).min() else { return Vec::new() };
        (t0..=t0 + horizon.max(0)).flat_map(|t| self.slice(t)).filter(|q| self.in_future_of_set(s, q)).collect()
    }

    /// `J-(S)` enumerated on `[max t(S) - horizon, max t(S)]`.
    pub fn causal_past(&self, s: &[Point], horizon: i64) -> Vec<Point> {
        let Some(t1) = s.iter().map(|p| p.t).max() else { return Vec::new() };
        (t1 - horizon.max(0)..=t1).flat_map(|t| self.slice(t)).filter(|q| self.in_past_of_set(s, q)).collect()
    }

    pub fn region_points(&self, pts: impl IntoIterator<Item = Point>) -> Region {
        let set: BTreeSet<Point> = pts.into_iter().map(|p| self.point(p.t, p.x)).collect();
        Region { kind: RegionKind::Points, points: Some(Arc::new(set)) }
    }

    /// `J+(S) ∩ J-(S)`.
    pub fn causal_hull(&self, seeds: &[Point]) -> Result<Region> {
        if seeds.is_empty() {
            return Err(Error::Precondition("causal hull of an empty set".into()));
        }
        let seeds: Vec<Point> = seeds.iter().map(|p| self.point(p.t, p.x)).collect();
        let lo = seeds.iter().map(|p| p.t).min().unwrap_or_default();
        let hi = seeds.iter().map(|p| p.t).max().unwrap_or_default();
        let set: BTreeSet<Point> = (lo..=hi)
            .flat_map(|t| self.slice(t))
            .filter(|q| self.in_future_of_set(&seeds, q) && self.in_past_of_set(&seeds, q))
            .collect();
        Ok(Region { kind: RegionKind::Hull(seeds), points: Some(Arc::new(set)) })
    }

    /// The full slab `t0 <= t <= t1`, built as the hull of its two boundary
    /// slices.
    pub fn slab(&self, t0: i64, t1: i64) -> Result<Region> {
        let seeds: Vec<Point> = self.slice(t0).chain(self.slice(t1)).collect();
        self.causal_hull(&seeds)
    }

    /// `J+(R) ∩ J-(R) = R`, checked on a finite region.
    pub fn is_causally_convex(&self, r: &Region) -> bool {
        let Some(pts) = r.points() else { return true };
        let v: Vec<Point> = pts.iter().copied().collect();
        let Some((lo, hi)) = r.time_range() else { return true };
        (lo..=hi)
            .flat_map(|t| self.slice(t))
            .all(|q| !(self.in_future_of_set(&v, &q) && self.in_past_of_set(&v, &q)) || pts.contains(&q))
    }

    /// `J+(R1) ∩ R2 ≠ ∅`.
    pub fn future_meets(&self, r1: &Region, r2: &Region) -> bool {
        match (r1.points(), r2.points()) {
            (Some(a), Some(b)) => a.iter().any(|p| b.iter().any(|q| self.in_future_of(p, q))),
            (None, Some(s)) | (Some(s), None) => !s.is_empty(),
            (None, None) => true,
        }
    }

    pub fn causally_disjoint(&self, r1: &Region, r2: &Region) -> Result<bool> {
        if r1.is_all() && r2.is_all() {
            return Err(Error::Unsupported("causal disjointness of two infinite regions".into()));
        }
        Ok(!self.future_meets(r1, r2) && !self.future_meets(r2, r1))
    }

    fn check_disjoint(&self, regions: &[Region]) -> Result<()> {
        for i in 0..regions.len() {
            for j in i + 1..regions.len() {
                if regions[i].overlaps(&regions[j]) {
                    return Err(Error::InvalidTuple(format!("regions {i} and {j} overlap")));
                }
            }
        }
        Ok(())
    }

    /// `J+(R_i) ∩ R_j = ∅` for all `i < j`: earlier entries are later in time.
    pub fn is_time_ordered(&self, regions: &[Region]) -> Result<bool> {
        self.check_disjoint(regions)?;
        for i in 0..regions.len() {
            for j in i + 1..regions.len() {
                if self.future_meets(&regions[i], &regions[j]) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// A permutation `rho` with `(R_rho[0], R_rho[1], ...)` time-ordered,
    /// smallest index first among the admissible choices.
    pub fn find_time_ordering(&self, regions: &[Region]) -> Result<Option<Vec<usize>>> {
        self.check_disjoint(regions)?;
        let n = regions.len();
        // must_precede[j] lists i that have to come after j
        let mut indegree = vec![0usize; n];
        let mut after: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if i != j && self.future_meets(&regions[i], &regions[j]) {
                    after[j].push(i);
                    indegree[i] += 1;
                }
            }
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(&k) = ready.iter().next() {
            ready.remove(&k);
            order.push(k);
            for &i in &after[k] {
                indegree[i] -= 1;
                if indegree[i] == 0 {
                    ready.insert(i);
                }
            }
        }
        Ok((order.len() == n).then_some(order))
    }

    pub fn is_time_orderable(&self, regions: &[Region]) -> Result<bool> {
        Ok(self.find_time_ordering(regions)?.is_some())
    }

    /// Splits a time-ordered tuple into the hull of its first `n-1` regions
    /// and the pair `(hull, R_n)`.
    pub fn factorize_tuple(&self, regions: &[Region], target: &Region) -> Result<Factorization> {
        if regions.len() < 2 {
            return Err(Error::Precondition("factorization needs at least two regions".into()));
        }
        if !self.is_time_ordered(regions)? {
            return Err(Error::Precondition("tuple is not time-ordered".into()));
        }
        let (head, last) = regions.split_at(regions.len() - 1);
        let mut seeds = Vec::new();
        for r in head {
            let pts = r
                .points()
                .ok_or_else(|| Error::Unsupported("factorization of a tuple containing the whole lattice".into()))?;
            seeds.extend(pts.iter().copied());
        }
        let hull = self.causal_hull(&seeds)?;
        if !hull.is_subset_of(target) {
            return Err(Error::Precondition("hull leaves the target region".into()));
        }
        Ok(Factorization { hull: hull.clone(), inner: head.to_vec(), outer: (hull, last[0].clone()) })
    }

    /// Contains a complete time slice.
    pub fn is_cauchy_region(&self, r: &Region) -> bool {
        let Some((lo, hi)) = r.time_range() else { return r.is_all() };
        (lo..=hi).any(|t| self.slice(t).all(|p| r.contains(&p)))
    }

    pub fn translate(&self, r: &Region, dt: i64, dx: i64) -> Region {
        match (&r.kind, r.points()) {
            (RegionKind::All, _) => Region::all(),
            (kind, Some(pts)) => {
                let moved: BTreeSet<Point> = pts.iter().map(|p| self.point(p.t + dt, p.x + dx)).collect();
                let kind = match kind {
                    RegionKind::Hull(s) => RegionKind::Hull(s.iter().map(|p| self.point(p.t + dt, p.x + dx)).collect()),
                    k => k.clone(),
                };
                Region { kind, points: Some(Arc::new(moved)) }
            }
            (_, None) => r.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(n: i64) -> Lattice {
        Lattice::new(n, 1).unwrap()
    }

    /// Brute-force J+ on a finite window, independent of the library path.
    fn brute_future(l: &Lattice, s: &[Point], t: i64) -> BTreeSet<Point> {
        let mut out = BTreeSet::new();
        for x in 0..l.sites {
            for p in s {
                let d = (x - p.x).rem_euclid(l.sites);
                let d = d.min(l.sites - d);
                if t >= p.t && d <= t - p.t {
                    out.insert(Point { t, x });
                }
            }
        }
        out
    }

    #[test]
    fn future_cone_examples() {
        let l = lat(9);
        let o = l.point(0, 0);
        let at2: BTreeSet<Point> = l.causal_future(&[o], 2).into_iter().filter(|p| p.t == 2).collect();
        let want: BTreeSet<Point> = (-2..=2).map(|x| l.point(2, x)).collect();
        assert_eq!(at2, want);
        assert!(l.causal_future(&[o], 3).contains(&o));
        let l5 = lat(5);
        let at3: Vec<Point> = l5.causal_future(&[o], 3).into_iter().filter(|p| p.t == 3).collect();
        assert_eq!(at3.len(), 5);
        assert_eq!(at3.into_iter().collect::<BTreeSet<_>>(), brute_future(&l5, &[o], 3));
    }

    #[test]
    fn future_is_transitive() {
        let l = lat(11);
        let s = vec![l.point(0, 0), l.point(1, 4)];
        let j = l.causal_future(&s, 4);
        let jj = l.causal_future(&j, 4);
        let j_set: BTreeSet<Point> = j.into_iter().collect();
        assert_eq!(jj.into_iter().collect::<BTreeSet<_>>(), j_set);
    }

    #[test]
    fn hull_examples() {
        let l = lat(9);
        let single = l.causal_hull(&[l.point(3, 4)]).unwrap();
        assert_eq!(single.len(), Some(1));
        let d = l.causal_hull(&[l.point(0, 0), l.point(2, 0)]).unwrap();
        let want: BTreeSet<Point> =
            [(0, 0), (1, -1), (1, 0), (1, 1), (2, 0)].iter().map(|&(t, x)| l.point(t, x)).collect();
        assert_eq!(d.points().unwrap(), &want);
        assert!(l.is_causally_convex(&d));
        let again = l.causal_hull(&d.points().unwrap().iter().copied().collect::<Vec<_>>()).unwrap();
        assert_eq!(again.points(), d.points());
        assert_eq!(d.time_range(), Some((0, 2)));
    }

    #[test]
    fn non_convex_point_set_detected() {
        let l = lat(9);
        let r = l.region_points([l.point(0, 0), l.point(2, 0)]);
        assert!(!l.is_causally_convex(&r));
    }

    #[test]
    fn disjointness() {
        let l = lat(9);
        let a = l.causal_hull(&[l.point(0, 0)]).unwrap();
        let b = l.causal_hull(&[l.point(0, 3)]).unwrap();
        assert!(l.causally_disjoint(&a, &b).unwrap());
        assert!(l.causally_disjoint(&b, &a).unwrap());
        assert!(!l.causally_disjoint(&a, &a).unwrap());
        let c = l.causal_hull(&[l.point(2, 1)]).unwrap();
        assert!(!l.causally_disjoint(&a, &c).unwrap());
        assert!(l.causally_disjoint(&Region::all(), &Region::all()).is_err());
    }

    #[test]
    fn time_ordering_convention() {
        let l = lat(21);
        let r1 = l.causal_hull(&[l.point(0, 0)]).unwrap();
        let r2 = l.causal_hull(&[l.point(5, 0)]).unwrap();
        let forward = l.is_time_ordered(&[r1.clone(), r2.clone()]).unwrap();
        let backward = l.is_time_ordered(&[r2.clone(), r1.clone()]).unwrap();
        assert!(forward ^ backward);
        assert!(backward, "the later region comes first");
        assert_eq!(l.find_time_ordering(&[r1.clone(), r2.clone()]).unwrap(), Some(vec![1, 0]));
        assert_eq!(l.find_time_ordering(&[]).unwrap(), Some(vec![]));
        let far = l.causal_hull(&[l.point(0, 10)]).unwrap();
        assert!(l.is_time_ordered(&[r1.clone(), far.clone()]).unwrap());
        assert!(l.is_time_ordered(&[far, r1.clone()]).unwrap());
        assert!(matches!(l.is_time_ordered(&[r1.clone(), r1]), Err(Error::InvalidTuple(_))));
    }

    #[test]
    fn factorization_of_stacked_diamonds() {
        let l = lat(21);
        let d = |t| l.causal_hull(&[l.point(t, 0), l.point(t + 2, 0)]).unwrap();
        let tuple = vec![d(8), d(4), d(0)];
        assert!(l.is_time_ordered(&tuple).unwrap());
        let f = l.factorize_tuple(&tuple, &Region::all()).unwrap();
        assert!(l.is_time_ordered(&f.inner).unwrap());
        assert!(l.is_time_ordered(&[f.outer.0.clone(), f.outer.1.clone()]).unwrap());
        for r in &f.inner {
            assert!(r.is_subset_of(&f.hull));
        }
        assert!(l.is_causally_convex(&f.hull));
        assert_eq!(f.hull.time_range(), Some((4, 10)));
        // a bounded target that already contains both diamonds
        let target = l.causal_hull(&[l.point(-1, 0), l.point(11, 0)]).unwrap();
        let g = l.factorize_tuple(&tuple, &target).unwrap();
        assert_eq!(g.hull.points(), f.hull.points());
        assert_ne!(g.hull.points(), target.points());
        let pair = l.factorize_tuple(&[d(4), d(0)], &Region::all()).unwrap();
        assert_eq!(pair.hull.points(), d(4).points());
    }

    #[test]
    fn cauchy_regions() {
        let l = lat(9);
        assert!(l.is_cauchy_region(&Region::all()));
        assert!(l.is_cauchy_region(&l.slab(0, 2).unwrap()));
        assert_eq!(l.slab(0, 2).unwrap().len(), Some(27));
        assert!(!l.is_cauchy_region(&l.causal_hull(&[l.point(0, 0), l.point(4, 0)]).unwrap()));
    }

    #[test]
    fn cutoff_partition() {
        let c = make_cutoff(3);
        for t in -2..8 {
            let p = Point { t, x: 0 };
            assert!(c.chi_plus(&p) ^ c.chi_minus(&p));
            if c.chi_plus(&p) {
                assert!(c.in_future_of_sigma_minus(&p));
            } else {
                assert!(c.in_past_of_sigma_plus(&p));
            }
        }
        assert_eq!((c.sigma_minus(), c.sigma_plus()), (2, 4));
    }

    #[test]
    fn translation_preserves_shape() {
        let l = lat(9);
        let d = l.causal_hull(&[l.point(0, 0), l.point(2, 0)]).unwrap();
        let m = l.translate(&d, 5, 8);
        assert_eq!(m.len(), d.len());
        assert!(l.is_causally_convex(&m));
        assert!(m.contains(&l.point(6, 0)));
    }
}
