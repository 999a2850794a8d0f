//! Free BV theories on the lattice: complex, fiber metric and witness.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::green::GreenData;
use super::stencil::{diff, EntryKey, Section, Site, Stencil};
use crate::complexes::{rank, LinComb};
use crate::lattice::{Lattice, Point};
use crate::scalar::{is_odd, rat_int, sign_rational, HScalar, Rational};
use crate::verify::{check_all, CheckReport, Counterexample};

/// Pointwise pairing blocks `(n, m) -> matrix[i][j] = (e_i, e_j)` for
/// `e_i` in degree `n`, `e_j` in degree `m`, `n + m = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FiberMetric {
    blocks: BTreeMap<(i64, i64), Vec<Vec<Rational>>>,
}

impl FiberMetric {
    pub fn set(&mut self, n: i64, m: i64, rows: Vec<Vec<i64>>) {
        let m_rows = rows.into_iter().map(|r| r.into_iter().map(rat_int).collect()).collect();
        self.blocks.insert((n, m), m_rows);
    }

    pub fn get(&self, n: i64, m: i64, i: usize, j: usize) -> Rational {
        self.blocks
            .get(&(n, m))
            .and_then(|b| b.get(i))
            .and_then(|r| r.get(j))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn block(&self, n: i64, m: i64) -> Option<&Vec<Vec<Rational>>> {
        self.blocks.get(&(n, m))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(i64, i64), &Vec<Vec<Rational>>)> {
        self.blocks.iter()
    }

    /// `(e_i, e_j) = -(-1)^{nm} (e_j, e_i)`.
    pub fn check_antisymmetry(&self) -> CheckReport {
        let mut r = CheckReport::new("metric graded antisymmetry");
        for (&(n, m), b) in &self.blocks {
            for (i, row) in b.iter().enumerate() {
                for (j, c) in row.iter().enumerate() {
                    let other = self.get(m, n, j, i);
                    let want = -sign_rational(n * m) * &other;
                    r.record((*c != want).then(|| {
                        Counterexample::new(format!("block ({n},{m}) [{i}][{j}]"), format!("{c} vs {want}"), 1)
                    }));
                }
            }
        }
        r
    }

    pub fn check_nondegenerate(&self, ranks: &BTreeMap<i64, usize>) -> CheckReport {
        let mut r = CheckReport::new("metric nondegenerate");
        for (&n, &rk) in ranks {
            let other = ranks.get(&(1 - n)).copied().unwrap_or(0);
            let cols: Vec<LinComb<usize>> = (0..rk)
                .map(|i| (0..other).map(|j| (j, HScalar::from_rational(self.get(n, 1 - n, i, j)))).collect())
                .collect();
            let full = rk == other && rank(&cols).map(|k| k == rk).unwrap_or(false);
            r.record((!full).then(|| Counterexample::new(format!("degree {n}"), "pairing block is singular", 1)));
        }
        r
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeBVModel {
    pub name: String,
    pub lattice: Lattice,
    pub ranks: BTreeMap<i64, usize>,
    pub q: Stencil,
    pub w: Stencil,
    /// `P = QW + WQ`, derived.
    pub p: Stencil,
    pub metric: FiberMetric,
}

impl FreeBVModel {
    pub fn new(name: &str, lattice: Lattice, ranks: BTreeMap<i64, usize>, q: Stencil, w: Stencil, metric: FiberMetric) -> Self {
        let p = q.compose(&w).plus(&w.compose(&q));
        Self { name: name.to_string(), lattice, ranks, q, w, p, metric }
    }

    /// Lattice Klein-Gordon field: degrees 0 and 1, `Q = P`, `W = id`.
    pub fn kg(lattice: Lattice, kappa: Rational, mass2: Rational) -> Self {
        let mut p = Stencil::zero();
        let one = Rational::one();
        let mut put = |dt, dx, c: Rational| {
            p.add_entry(EntryKey { in_deg: 0, in_fiber: 0, out_deg: 1, out_fiber: 0, dt, dx }, &c);
        };
        put(1, 0, one.clone());
        put(-1, 0, one.clone());
        put(0, 0, -rat_int(2) + &kappa * rat_int(2) + &mass2);
        put(0, 1, -kappa.clone());
        put(0, -1, -kappa);
        let w = Stencil::identity_block(1, 0, 1);
        let mut metric = FiberMetric::default();
        metric.set(1, 0, vec![vec![1]]);
        metric.set(0, 1, vec![vec![-1]]);
        let ranks = BTreeMap::from([(0, 1), (1, 1)]);
        Self::new("kg", lattice, ranks, p, w, metric)
    }

    /// Lattice Maxwell 1-forms in 1+1 dimensions: ghost `c`, potential
    /// `A = (A_t, A_x)`, antifields `A‡`, `c‡` in degrees -1..2.
    pub fn maxwell2d(lattice: Lattice) -> Self {
        use diff::*;
        let c = |from: (i64, usize), to: (i64, usize), terms, s| Stencil::component(from, to, terms, s);
        // exterior derivative on 0-forms and 1-forms, and the signed adjoints
        let d0 = |from: i64, to: i64| c((from, 0), (to, 0), DT_PLUS, 1).plus(&c((from, 0), (to, 1), DX_PLUS, 1));
        let delta1 =
            |from: i64, to: i64| c((from, 0), (to, 0), DT_MINUS, 1).plus(&c((from, 1), (to, 0), DX_MINUS, -1));
        const F: i64 = 100;
        let d1 = c((0, 1), (F, 0), DT_PLUS, 1).plus(&c((0, 0), (F, 0), DX_PLUS, -1));
        let delta2 = c((F, 0), (1, 0), DX_MINUS, 1).plus(&c((F, 0), (1, 1), DT_MINUS, 1));
        let q = d0(-1, 0).plus(&delta2.compose(&d1)).plus(&delta1(1, 2));
        let w = delta1(0, -1).plus(&Stencil::identity_block(1, 0, 2)).plus(&d0(2, 1));
        let mut metric = FiberMetric::default();
        metric.set(1, 0, vec![vec![-1, 0], vec![0, 1]]);
        metric.set(0, 1, vec![vec![1, 0], vec![0, -1]]);
        metric.set(2, -1, vec![vec![1]]);
        metric.set(-1, 2, vec![vec![-1]]);
        let ranks = BTreeMap::from([(-1, 1), (0, 2), (1, 2), (2, 1)]);
        Self::new("maxwell2d", lattice, ranks, q, w, metric)
    }

    /// Same theory with the sign of the `(0,1)` metric block reversed, which
    /// breaks compatibility on purpose.
    pub fn with_flipped_metric(mut self) -> Self {
        if let Some(b) = self.metric.blocks.get_mut(&(0, 1)) {
            for row in b.iter_mut() {
                for c in row.iter_mut() {
                    *c = -c.clone();
                }
            }
        }
        self.name = format!("{}-flipped", self.name);
        self
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.ranks.keys().copied()
    }

    pub fn rank(&self, deg: i64) -> usize {
        self.ranks.get(&deg).copied().unwrap_or(0)
    }

    /// All generators sitting at a point.
    pub fn sites_at(&self, p: Point) -> Vec<Site> {
        self.ranks.iter().flat_map(|(&d, &r)| (0..r).map(move |f| Site::new(d, p, f))).collect()
    }

    pub fn delta_basis<'a>(&self, points: impl IntoIterator<Item = &'a Point>) -> Vec<Site> {
        points.into_iter().flat_map(|p| self.sites_at(*p)).collect()
    }

    /// Points `(t, x)` for `t` in `ts` and `x` in `xs`, reduced mod N.
    pub fn window_points(&self, ts: std::ops::RangeInclusive<i64>, xs: std::ops::RangeInclusive<i64>) -> Vec<Point> {
        ts.flat_map(|t| xs.clone().map(move |x| (t, x))).map(|(t, x)| self.lattice.point(t, x)).collect()
    }

    /// `∫(δ_a, δ_b)` with unit volume per site.
    pub fn pair_sites(&self, a: &Site, b: &Site) -> Rational {
        if a.t != b.t || a.x != b.x || a.deg + b.deg != 1 {
            return Rational::zero();
        }
        self.metric.get(a.deg, b.deg, a.fiber, b.fiber)
    }

    /// `∫(u, v)` with `v` read pointwise through `value`.
    pub fn integrate_with(&self, u: &Section, value: impl Fn(&Site) -> Rational) -> HScalar {
        let mut acc = HScalar::zero();
        for (s, c) in u.iter() {
            let m = 1 - s.deg;
            for f in 0..self.rank(m) {
                let g = self.metric.get(s.deg, m, s.fiber, f);
                if g.is_zero() {
                    continue;
                }
                let v = value(&Site { deg: m, t: s.t, x: s.x, fiber: f });
                if !v.is_zero() {
                    acc.add_scaled(c, &(g * v));
                }
            }
        }
        acc
    }

    pub fn integrate(&self, u: &Section, v: &Section) -> HScalar {
        let mut acc = HScalar::zero();
        for (a, ca) in u.iter() {
            for f in 0..self.rank(1 - a.deg) {
                let b = Site { deg: 1 - a.deg, t: a.t, x: a.x, fiber: f };
                let cb = v.get(&b);
                if !cb.is_zero() {
                    acc += &(&(ca * &cb) * &HScalar::from_rational(self.pair_sites(a, &b)));
                }
            }
        }
        acc
    }

    pub fn apply_q(&self, v: &Section) -> Section {
        self.q.apply(&self.lattice, v)
    }

    pub fn apply_w(&self, v: &Section) -> Section {
        self.w.apply(&self.lattice, v)
    }

    pub fn apply_p(&self, v: &Section) -> Section {
        self.p.apply(&self.lattice, v)
    }

    /// All pairs from `sites` whose supports lie within `radius` in time and
    /// space.
    pub fn near_pairs(&self, sites: &[Site], radius: i64) -> Vec<(Site, Site)> {
        let mut out = Vec::new();
        for a in sites {
            for b in sites {
                if (a.t - b.t).abs() <= radius && self.lattice.ring_distance(a.x, b.x) <= radius {
                    out.push((*a, *b));
                }
            }
        }
        out
    }

    pub fn stencil_radius(&self) -> i64 {
        [&self.q, &self.w, &self.p].iter().map(|s| s.time_radius().max(s.space_radius())).max().unwrap_or(0)
    }

    /// `∫(Qφ1, φ2) + (-1)^{|φ1|} ∫(φ1, Qφ2) = 0`.
    pub fn verify_metric_compat(&self, pairs: &[(Site, Site)]) -> CheckReport {
        check_all("metric compatibility", pairs, |(a, b)| {
            let (da, db) = (Section::basis(*a), Section::basis(*b));
            let lhs = self.integrate(&self.apply_q(&da), &db);
            let mut rhs = self.integrate(&da, &self.apply_q(&db));
            if is_odd(a.deg) {
                rhs = -rhs;
            }
            let total = &lhs + &rhs;
            (!total.is_zero()).then(|| Counterexample::new(format!("{a:?} x {b:?}"), format!("defect {total}"), 2))
        })
    }

    /// The witness conditions, the remark identities and `Q^2 = 0`, each
    /// both as a stencil identity and on the sampled generators.
    pub fn verify_witness(&self, sites: &[Site], pairs: &[(Site, Site)]) -> Vec<CheckReport> {
        let l = &self.lattice;
        let mut out = Vec::new();

        let mut green = CheckReport::new("witness (i): P Green hyperbolic");
        match GreenData::new(self) {
            Ok(g) => {
                for (deg, data) in &g.degrees {
                    green.record(data.cone_violation(l.slope).map(|e| {
                        Counterexample::new(format!("degree {deg}"), format!("entry outside the cone: {e:?}"), 1)
                    }));
                }
            }
            Err(e) => green.fail(Counterexample::new(self.name.clone(), e.to_string(), 1)),
        }
        out.push(green);

        let stencil_check = |name: &str, lhs: Stencil, rhs: Stencil| {
            let mut r = CheckReport::new(name);
            r.record((lhs != rhs).then(|| {
                Counterexample::new("stencil", format!("difference {:?}", lhs.minus(&rhs).entries().take(4).collect::<Vec<_>>()), 1)
            }));
            r.merge(check_all(name, sites, |s| {
                let v = Section::basis(*s);
                let d = lhs.apply(l, &v).minus(&rhs.apply(l, &v));
                (!d.is_zero()).then(|| Counterexample::new(format!("{s:?}"), format!("difference {d:?}"), 1))
            }));
            r
        };
        let (q, w, p) = (&self.q, &self.w, &self.p);
        out.push(stencil_check("Q^2 = 0", q.compose(q), Stencil::zero()));
        out.push(stencil_check("witness (ii): QWW = WWQ", q.compose(w).compose(w), w.compose(w).compose(q)));
        out.push(stencil_check("PW = WP", p.compose(w), w.compose(p)));
        out.push(stencil_check("PQ = QP", p.compose(q), q.compose(p)));

        out.push(check_all("witness (iii): W formally self-adjoint", pairs, |(a, b)| {
            let (da, db) = (Section::basis(*a), Section::basis(*b));
            let lhs = self.integrate(&self.apply_w(&da), &db);
            let mut rhs = self.integrate(&da, &self.apply_w(&db));
            if is_odd(a.deg) {
                rhs = -rhs;
            }
            (lhs != rhs).then(|| Counterexample::new(format!("{a:?} x {b:?}"), format!("{lhs} vs {rhs}"), 2))
        }));
        out.push(check_all("P formally self-adjoint", pairs, |(a, b)| {
            let (da, db) = (Section::basis(*a), Section::basis(*b));
            let lhs = self.integrate(&self.apply_p(&da), &db);
            let rhs = self.integrate(&da, &self.apply_p(&db));
            (lhs != rhs).then(|| Counterexample::new(format!("{a:?} x {b:?}"), format!("{lhs} vs {rhs}"), 2))
        }));
        out
    }
}
